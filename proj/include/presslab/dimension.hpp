#pragma once

#include <vector>

#include "presslab/core.hpp"
#include "presslab/pressure.hpp"

namespace presslab {

// Component j is -log|Df_j|. Needs a conformal expanding system: interval maps, circle maps,
// or diagonal toral maps with |a| = |d|.
MultiPotential unstable_multipotential(const System& sys);

struct PressureSample {
    double t = 0.0;
    double value = 0.0;
};

struct RootResult {
    double root = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int iterations = 0;
    std::vector<PressureSample> samples;
    bool monotone = true;  // sampled values strictly decreasing in t
};

struct DimensionResult {
    double t_uA = 0.0;
    std::vector<double> per_map_roots;
    double lo = 0.0;
    double hi = 0.0;
    int iterations = 0;
    bool monotone = true;
    std::vector<PressureSample> samples;
};

struct RootOptions {
    double lo = 0.0;
    double hi = 1.0;
    double width = 1e-3;
};

// Growth rate of the cover cost from depth n-1 to n; the depth-independent constant cancels.
double pressure_increment(const System& sys, const MultiPotential& phi, const PressureKind& kind, int n, double eps,
                          const EstimateOptions& opt);

// Bisection for the zero of t -> pressure_increment(t * phi). The bracket is widened once.
RootResult pressure_root(const System& sys, const MultiPotential& phi, const PressureKind& kind, int n, double eps,
                         const EstimateOptions& opt, const RootOptions& ropt);

// t_uA from amalgamated pressure; per-map roots from each generator on its own repeller.
DimensionResult bowen_root(const System& sys, int n, double eps, const EstimateOptions& opt = {},
                           const RootOptions& ropt = {});

System single_generator(const System& sys, int j);

}  // namespace presslab
