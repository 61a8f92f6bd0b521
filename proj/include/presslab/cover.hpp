#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "presslab/core.hpp"

namespace presslab {

struct Region {
    enum class Kind { Whole, Box } kind = Kind::Whole;
    Point lo;
    Point hi{1.0, 1.0};
};

// Closed intervals [a, b] describing the depth-n condensed core of an interval system.
std::vector<std::array<double, 2>> interval_core(const System& sys, int n);

// Target points of the generic path: cell centres of a delta-grid restricted to the region.
struct TargetGrid {
    int dim = 1;
    bool wraps = true;
    long cells = 0;  // per axis
    double delta = 0.0;
    std::vector<Point> pts;
    std::vector<std::array<long, 2>> ij;
    std::vector<int> centers;  // candidate atom centres (indices into pts)
    std::unordered_map<std::uint64_t, int> index;

    int find(long i, long j) const;
    std::size_t size() const { return pts.size(); }
};

struct GridOptions {
    int refine = 2;
    std::size_t max_points = std::size_t(1) << 21;
    Region region;
};

TargetGrid build_target_grid(const System& sys, int n, double eps, const GridOptions& opt);

// A ball family: a fixed trajectory word, or the condensed / exhaustive ball of depth n.
struct BallShape {
    BallKind kind = BallKind::Trajectory;
    Word word;
    int depth = 0;
    int tag = 0;  // caller's identifier (e.g. index in a word pool)
};

enum class WeightRule { WordSum, LowerSum, UpperSum };

struct Atom {
    int center = 0;
    int shape = 0;  // index into the shape list
    double logw = 0.0;
    std::vector<int> cover;  // sorted target indices inside the ball
};

struct AtomRequest {
    const System* sys = nullptr;
    const MultiPotential* phi = nullptr;
    const TargetGrid* grid = nullptr;
    std::vector<BallShape> shapes;
    WeightRule rule = WeightRule::WordSum;
    int n = 1;
    double eps = 0.0;
};

// Coverage is traced by flood fill from the centre through grid neighbours, so a recorded
// coverage list is always a subset of the true ball and any cover built from it is feasible.
std::vector<Atom> build_atoms_serial(const AtomRequest& req);
std::vector<Atom> build_atoms_parallel(const AtomRequest& req);

struct CoverResult {
    std::vector<int> chosen;  // indices into the atom list
    double log_cost = 0.0;
    bool feasible = false;
};

// Greedy weighted set cover: repeatedly takes the atom maximizing newly covered points / weight.
CoverResult greedy_cover(const std::vector<Atom>& atoms, std::size_t npoints);

// Mass-ratio lower bound: log of min over atoms of weight * npoints / |cover|.
double mass_ratio_log_bound(const std::vector<Atom>& atoms, std::size_t npoints);

enum class PackMetric { Word, AnyWord, AllWords };

struct PackResult {
    std::vector<int> points;
    double log_sum = 0.0;
};

// Greedy maximal 2eps-separated set in the given Bowen-type metric. Weights are the
// consecutive sums reduced by the potential's oscillation over 2eps-balls, so the weighted
// sum bounds every cover cost from below.
PackResult packing(const System& sys, const MultiPotential& phi, const TargetGrid& grid, PackMetric metric,
                   const Word& word, WeightRule rule, int n, double eps);

// min / max over words of S_n Phi(x, C) - (oscillation of Phi along the orbit at radius r).
SumRange slack_sum_range(const System& sys, const MultiPotential& phi, const Point& x, int n, double r);
double slack_word_sum(const System& sys, const MultiPotential& phi, const Point& x, const Word& w, double r);

}  // namespace presslab
