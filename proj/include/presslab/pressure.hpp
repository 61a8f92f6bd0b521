#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "presslab/core.hpp"
#include "presslab/cover.hpp"

namespace presslab {

class Infeasible : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class KindTag { Amalgamated, CondensedLower, CondensedUpper, ExhaustiveLower, ExhaustiveUpper, Trajectory, Free, Lift };

// How omega|_n is produced for trajectory pressure.
struct TrajectoryRule {
    enum class Type { Constant, Periodic, Prefix } type = Type::Constant;
    Word pattern{0};

    Word prefix(int n) const;
    std::string describe() const;  // 1-based, e.g. "periodic:1,2"
    static TrajectoryRule constant(int j) { return {Type::Constant, {j}}; }
    static TrajectoryRule periodic(Word w) { return {Type::Periodic, std::move(w)}; }
    static TrajectoryRule explicit_prefix(Word w) { return {Type::Prefix, std::move(w)}; }
};

struct PressureKind {
    KindTag tag = KindTag::Amalgamated;
    TrajectoryRule rule;

    std::string name() const;
    // "amalgamated", "condensed_lower", ..., "trajectory:periodic:1,2", "free", "lift"
    static PressureKind parse(const std::string& s);
    static PressureKind trajectory(TrajectoryRule r) { return {KindTag::Trajectory, std::move(r)}; }
};

std::vector<PressureKind> all_set_kinds();  // the six non-trajectory kinds (lift excluded)

enum class Method { AnalyticBox, GenericGrid };
std::string method_name(Method m);

struct PressureEstimate {
    PressureKind kind;
    double lower = 0.0;
    double upper = 0.0;
    int n = 0;
    double eps = 0.0;
    Method method = Method::GenericGrid;
    double cover_size = 0.0;
    double log_cost_lower = 0.0;
    double log_cost_upper = 0.0;
    bool stochastic = false;
    double sampling_error = 0.0;  // standard error of the sampled log-mean, divided by n
    std::uint64_t seed = 0;

    double midpoint() const { return 0.5 * (lower + upper); }
    double width() const { return upper - lower; }
};

struct EstimateOptions {
    enum class MethodChoice { Auto, Analytic, Generic } method = MethodChoice::Auto;
    int pool_random = 32;
    std::uint64_t seed = 1;
    GridOptions grid;
    std::uint64_t free_samples = 512;  // word samples for free / lift pressure beyond the cap
    bool parallel = true;
};

// Constant words, period-2 words and `random_words` further distinct random words.
std::vector<Word> word_pool(int m, int n, int random_words, std::uint64_t seed);

// log of vol(X) / vol(eps-ball): the depth-0 covering ratio removed from lower bounds.
double log_depth0_ratio(const System& sys, double eps);

bool analytic_available(const System& sys, const MultiPotential& phi, double eps);

struct CoverEntry {
    Point center;
    BallKind ball = BallKind::Trajectory;
    Word word;
    double logw = 0.0;
};

struct CoverSolution {
    std::vector<CoverEntry> atoms;
    double log_cost = 0.0;
    KindTag tag = KindTag::Amalgamated;
    int n = 0;
    double eps = 0.0;
};

// Greedy cover of one kind on the generic grid (no cross-kind reductions).
CoverSolution min_cover_cost(const System& sys, const MultiPotential& phi, const PressureKind& kind, int n, double eps,
                             const EstimateOptions& opt = {});

// log of the weighted packing sum for the kind (generic grid).
double packing_bound(const System& sys, const MultiPotential& phi, const PressureKind& kind, int n, double eps,
                     const EstimateOptions& opt = {});

// Re-weights a frozen cover under another potential; returns log of the total weight.
double frozen_log_cost(const System& sys, const MultiPotential& phi, const CoverSolution& cover);

// Estimates for several kinds sharing one grid, one word pool and one set of per-word covers.
// Upper bounds are reduced through the cover inclusions used in the inequality proofs, so
// upper(P^A) <= upper(P_traj(w)) for pool words, upper(P^A) <= upper(P_l),
// upper(P^+_l) <= upper(P^A) and upper(P^A) <= upper(P_free) <= upper(P_u) hold exactly.
std::vector<PressureEstimate> estimate_all(const System& sys, const MultiPotential& phi,
                                           const std::vector<PressureKind>& kinds, int n, double eps,
                                           const EstimateOptions& opt = {});

PressureEstimate estimate_pressure(const System& sys, const MultiPotential& phi, const PressureKind& kind, int n,
                                   double eps, const EstimateOptions& opt = {});

struct ChainCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool exact = false;  // by-construction inequality between upper bounds
    bool holds = false;
};

struct ChainReport {
    std::vector<PressureEstimate> estimates;
    std::vector<ChainCheck> checks;
    bool passed = false;
};

ChainReport verify_inequality_chain(const System& sys, const MultiPotential& phi, int n, double eps,
                                    const EstimateOptions& opt = {}, double tolerance = 1e-9);

struct Extrapolation {
    double value = 0.0;
    double error_bar = 0.0;
    bool converged = true;
    bool monotone = true;
};

Extrapolation extrapolate(const std::vector<PressureEstimate>& seq);

struct ShiftReport {
    double upper_omega = 0.0;
    double upper_shifted = 0.0;
    double difference = 0.0;
    double bound = 0.0;
    bool passed = false;
};

ShiftReport trajectory_shift_check(const System& sys, const MultiPotential& phi, const Word& omega_prefix, int n,
                                   double eps, const EstimateOptions& opt = {});

struct LipschitzReport {
    double log_cost_phi = 0.0;
    double log_cost_psi = 0.0;
    double difference = 0.0;  // |(1/n) log cost(phi) - (1/n) log cost(psi)| on the frozen cover
    double sup_distance = 0.0;
    bool passed = false;
};

// Sup-norm distance measured on a sample grid plus every point the frozen cover evaluates.
double potential_distance(const System& sys, const MultiPotential& phi, const MultiPotential& psi,
                          const CoverSolution& cover);

LipschitzReport lipschitz_check(const System& sys, const MultiPotential& phi, const MultiPotential& psi,
                                const PressureKind& kind, int n, double eps, const EstimateOptions& opt = {},
                                double tolerance = 1e-9);

}  // namespace presslab
