#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace presslab {

// Generic enumeration over all m^n words is refused beyond this many words.
inline constexpr std::uint64_t kWordCap = 4096;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Symbols are 0-based generator indices. The empty word never appears.
using Word = std::vector<int>;

enum class Domain { Torus, Interval };

// Integer matrix acting on the torus. For the circle only `a` is used.
struct Mat2 {
    long a = 1, b = 0, c = 0, d = 1;
    long det() const { return a * d - b * c; }
    bool diagonal() const { return b == 0 && c == 0; }
    bool operator==(const Mat2&) const = default;
};

Mat2 operator*(const Mat2& l, const Mat2& r);

// Increasing affine branch mapping [lo, hi] onto [0, 1].
struct Branch {
    double lo = 0.0;
    double hi = 1.0;
    double slope() const { return 1.0 / (hi - lo); }
};

struct IntervalMap {
    std::vector<Branch> branches;
};

class DepthTooLarge : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class OutOfDomain : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class System {
  public:
    static System torus(int dim, std::vector<Mat2> mats);
    static System interval(std::vector<IntervalMap> maps);

    int m() const { return m_; }
    int dim() const { return dim_; }
    Domain domain() const { return domain_; }
    bool linear() const { return domain_ == Domain::Torus; }
    bool all_diagonal() const;
    const std::vector<Mat2>& matrices() const { return mats_; }
    const std::vector<IntervalMap>& interval_maps() const { return maps_; }

    // Largest sup-norm expansion over generators (at least 1).
    double max_expansion() const { return lmax_; }
    // Per-generator sup-norm operator norm (torus) or largest branch slope.
    double expansion(int j) const;

    bool in_domain(const Point& p) const;
    std::optional<Point> apply(int j, const Point& p) const;
    double distance(const Point& a, const Point& b) const;

    // log |Df_j(p)| for conformal systems; nullopt when not conformal.
    std::optional<double> log_derivative(int j, const Point& p) const;

    // Same system with generators reordered: new generator i is old perm[i].
    System permuted(const std::vector<int>& perm) const;

    std::string describe() const;

  private:
    Domain domain_ = Domain::Torus;
    int dim_ = 2;
    int m_ = 0;
    double lmax_ = 1.0;
    std::vector<Mat2> mats_;
    std::vector<IntervalMap> maps_;
};

double circle_distance(double a, double b);
double frac(double v);

struct TrigTerm {
    double amp = 0.0;
    int kx = 0;
    int ky = 0;
    double phase = 0.0;
};

// Piecewise-constant contribution on [lo, hi).
struct Step {
    double lo = 0.0;
    double hi = 0.0;
    double value = 0.0;
};

// phi(p) = constant + coord * p.x + sum amp cos(2 pi (kx x + ky y) + phase) + steps
struct Potential {
    double constant = 0.0;
    double coord = 0.0;
    std::vector<TrigTerm> trig;
    std::vector<Step> steps;

    double operator()(const Point& p) const;
    bool is_constant() const { return coord == 0.0 && trig.empty() && steps.empty(); }
    double sup_bound() const;
    // Bound on |phi(q) - phi(p)| over q with d(p, q) < r.
    double oscillation(const System& sys, const Point& p, double r) const;
};

struct MultiPotential {
    std::vector<Potential> comps;

    int m() const { return static_cast<int>(comps.size()); }
    bool word_constant() const;
    std::vector<double> constants() const;
    double sup_bound() const;
    MultiPotential scaled(double t) const;
    MultiPotential shifted(double c) const;
    MultiPotential permuted(const std::vector<int>& perm) const;

    static MultiPotential zero(int m);
    static MultiPotential constant(std::vector<double> c);
};

enum class BallKind { Trajectory, Condensed, Exhaustive };

struct BallSpec {
    BallKind kind = BallKind::Trajectory;
    Word word;      // Trajectory only
    int depth = 0;  // Condensed / Exhaustive; equals word length for Trajectory
    Point center;
    double eps = 0.0;
    int n() const { return kind == BallKind::Trajectory ? static_cast<int>(word.size()) : depth; }
};

void validate_word(const Word& w, int m);
std::uint64_t word_count(int m, int n);  // saturates at UINT64_MAX
std::vector<Word> all_words(int m, int n);
Word word_from_index(std::uint64_t idx, int m, int n);
std::string word_to_string(const Word& w);  // 1-based, e.g. "1,2,1"

std::vector<Point> orbit(const System& sys, const Point& x, const Word& c);
double consecutive_sum(const System& sys, const MultiPotential& phi, const Point& x, const Word& c);
double dn_distance(const System& sys, const Point& x, const Point& z, const Word& c);

bool ball_contains(const System& sys, const BallSpec& ball, const Point& z);

// Minimum and maximum of S_n Phi(x, C) over all words of length n.
struct SumRange {
    double lo = 0.0;
    double hi = 0.0;
};
SumRange sum_range(const System& sys, const MultiPotential& phi, const Point& x, int n);

std::vector<BallSpec> vitali_disjointify(const System& sys, const std::vector<BallSpec>& balls);

}  // namespace presslab
