#include "presslab/lift.hpp"

#include <cmath>

#include "presslab/util.hpp"

namespace presslab {

LiftPoint skew_apply(const System& sys, const LiftPoint& p) {
    if (p.prefix.empty()) throw PrefixExhausted("skew product needs a nonempty prefix");
    const int j = p.prefix.front();
    validate_word({j}, sys.m());
    auto next = sys.apply(j, p.base);
    if (!next) throw OutOfDomain("base point leaves the domain");
    return {Word(p.prefix.begin() + 1, p.prefix.end()), *next};
}

double lifted_potential(const MultiPotential& phi, const LiftPoint& p) {
    if (p.prefix.empty()) throw PrefixExhausted("lifted potential needs a nonempty prefix");
    return phi.comps.at(p.prefix.front())(p.base);
}

double lifted_sum(const System& sys, const MultiPotential& phi, LiftPoint p, int n) {
    if (static_cast<int>(p.prefix.size()) < n) throw PrefixExhausted("prefix shorter than the depth");
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
        s += lifted_potential(phi, p);
        p = skew_apply(sys, p);
    }
    return s;
}

double lift_log_cost(const std::vector<double>& per_word_log_costs) {
    if (per_word_log_costs.empty()) throw std::invalid_argument("no cylinders");
    return log_sum_exp(per_word_log_costs);
}

PressureEstimate lift_pressure_estimate(const System& sys, const MultiPotential& phi, int n, double eps,
                                        const EstimateOptions& opt) {
    return estimate_pressure(sys, phi, {KindTag::Lift, {}}, n, eps, opt);
}

LiftReport check_lift_inequalities(const System& sys, const MultiPotential& phi, int n, double eps,
                                   const EstimateOptions& opt, double tolerance) {
    auto es = estimate_all(sys, phi,
                           {{KindTag::Lift, {}}, {KindTag::Amalgamated, {}}, {KindTag::CondensedUpper, {}}}, n, eps,
                           opt);
    LiftReport r;
    r.lift = es[0];
    r.amalgamated = es[1];
    r.condensed_upper = es[2];
    r.log_m = std::log(double(sys.m()));
    r.lower_margin = r.lift.upper - (r.amalgamated.lower + r.log_m);
    r.upper_margin = (r.condensed_upper.upper + r.log_m) - r.lift.lower;
    r.passed = r.lower_margin >= -tolerance && r.upper_margin >= -tolerance;
    return r;
}

}  // namespace presslab
