#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "presslab/core.hpp"

namespace presslab {

class UnderResolved : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Probability measure as cell masses on a uniform grid of the domain, or as weighted points.
struct MeasureModel {
    enum class Kind { GridDensity, EmpiricalSample } kind = Kind::GridDensity;
    int dim = 1;
    long cells = 0;             // per axis (grid only)
    bool uniform = false;       // grid with equal masses; not materialized
    std::vector<double> mass;   // row-major, index = i + cells * j
    std::vector<Point> points;  // sample only
    std::vector<double> weights;

    double total_mass() const;
    double cell_mass(long i, long j) const;  // indices already reduced mod cells
    void validate() const;

    static MeasureModel lebesgue(int dim, long cells);
    static MeasureModel grid(int dim, long cells, std::vector<double> masses);
    static MeasureModel dirac(const Point& p);
    static MeasureModel sample(std::vector<Point> pts, std::vector<double> w);
    // Rows "cell-index,mass"; the grid side is the smallest k with k^dim > max index.
    static MeasureModel from_csv(const std::string& text, int dim);
};

struct ProductMeasureModel {
    std::vector<double> symbol_weights;
    MeasureModel base;

    void validate(int m) const;
};

// "lebesgue", "dirac:x,y", "bernoulli:p1,...,pm x lebesgue" (also with '*' or U+00D7).
ProductMeasureModel parse_measure(const std::string& spec, int dim, int m, long cells);

// Serial reference and a row-parallel version; identical results.
double ball_measure(const MeasureModel& mu, const System& sys, const BallSpec& ball);
double ball_measure_parallel(const MeasureModel& mu, const System& sys, const BallSpec& ball);

// Points drawn from mu (cell chosen by mass, then uniform inside the cell).
std::vector<Point> sample_points(const MeasureModel& mu, const System& sys, int count, std::uint64_t seed);

struct LocalEntropyEstimate {
    Point x;
    double eps = 0.0;
    std::vector<int> ns;
    std::vector<double> upper_seq, lower_seq, exhaustive_seq;  // per n: sup / inf over words, exhaustive
    double h_upper_local = 0.0;
    double h_lower_local = 0.0;
    double h_exhaustive_local = 0.0;
    bool zero_mass = false;  // some ball had no mass; its rate is +inf
};

struct LocalOptions {
    int pool_random = 32;
    std::uint64_t seed = 1;
};

LocalEntropyEstimate local_amalgamated_entropy(const MeasureModel& mu, const System& sys, const Point& x, double eps,
                                               const std::vector<int>& n_range, const LocalOptions& opt = {});

// One estimate per point, serially or with OpenMP over the points.
std::vector<LocalEntropyEstimate> local_entropies_serial(const MeasureModel& mu, const System& sys,
                                                         const std::vector<Point>& xs, double eps,
                                                         const std::vector<int>& n_range, const LocalOptions& opt = {});
std::vector<LocalEntropyEstimate> local_entropies_parallel(const MeasureModel& mu, const System& sys,
                                                           const std::vector<Point>& xs, double eps,
                                                           const std::vector<int>& n_range,
                                                           const LocalOptions& opt = {});

double shannon_entropy(const std::vector<double>& p);

struct MarginalReport {
    double h_product = 0.0;   // entropy of the product measure on the lift
    double h_symbols = 0.0;   // entropy of its symbol marginal
    double bound = 0.0;       // h_product - h_symbols
    double tolerance = 0.0;
    std::vector<LocalEntropyEstimate> points;
    int violations = 0;
    bool passed = false;
};

// Requires all generators equal, or uniform weights with commuting diagonal generators.
MarginalReport marginal_bound_check(const ProductMeasureModel& prod, const System& sys,
                                    const std::vector<Point>& xs, double eps, const std::vector<int>& n_range,
                                    double tolerance, const LocalOptions& opt = {});

}  // namespace presslab
