#pragma once

#include <vector>

#include "presslab/core.hpp"
#include "presslab/pressure.hpp"

namespace presslab {

// (omega, x) on the one-sided shift times the base; only a finite prefix of omega is kept.
struct LiftPoint {
    Word prefix;
    Point base;
};

class PrefixExhausted : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// F(omega, x) = (sigma omega, f_{omega_0} x)
LiftPoint skew_apply(const System& sys, const LiftPoint& p);

// phi_{omega_0}(x)
double lifted_potential(const MultiPotential& phi, const LiftPoint& p);

// n-step Birkhoff sum of the lifted potential along F.
double lifted_sum(const System& sys, const MultiPotential& phi, LiftPoint p, int n);

// log of the product-space cover cost: one cylinder per word, each carrying its base cover.
double lift_log_cost(const std::vector<double>& per_word_log_costs);

PressureEstimate lift_pressure_estimate(const System& sys, const MultiPotential& phi, int n, double eps,
                                        const EstimateOptions& opt = {});

struct LiftReport {
    PressureEstimate lift;
    PressureEstimate amalgamated;
    PressureEstimate condensed_upper;
    double log_m = 0.0;
    double lower_margin = 0.0;  // lift.upper - (amalgamated.lower + log m)
    double upper_margin = 0.0;  // (condensed_upper.upper + log m) - lift.lower
    bool passed = false;
};

LiftReport check_lift_inequalities(const System& sys, const MultiPotential& phi, int n, double eps,
                                   const EstimateOptions& opt = {}, double tolerance = 1e-9);

}  // namespace presslab
