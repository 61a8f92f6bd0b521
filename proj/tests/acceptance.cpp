// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "presslab/core.hpp"
#include "presslab/cover.hpp"
#include "presslab/dimension.hpp"
#include "presslab/lift.hpp"
#include "presslab/localent.hpp"
#include "presslab/pressure.hpp"
#include "presslab/systems.hpp"
#include "support.hpp"

using namespace presslab;
using testsupport::Gen;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

struct Bracket {
    double value = 0.0;
    double err = 0.0;
    double lo() const { return value - err; }
    double hi() const { return value + err; }
    bool contains(double v) const { return lo() <= v && v <= hi(); }
};

EstimateOptions generic() {
    EstimateOptions o;
    o.method = EstimateOptions::MethodChoice::Generic;
    return o;
}

// Extrapolated value and error bar of each requested kind over the depth sweep.
std::map<KindTag, Bracket> sweep(const System& s, const std::vector<PressureKind>& kinds, const std::vector<int>& ns,
                                 double eps, const EstimateOptions& opt) {
    std::map<KindTag, std::vector<PressureEstimate>> seqs;
    for (int n : ns)
        for (const auto& e : estimate_all(s, MultiPotential::zero(s.m()), kinds, n, eps, opt)) seqs[e.kind.tag].push_back(e);
    std::map<KindTag, Bracket> out;
    for (const auto& [tag, seq] : seqs) {
        auto x = extrapolate(seq);
        out[tag] = {x.value, x.error_bar};
    }
    return out;
}

std::string fmt(const Bracket& b) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f +- %.4f", b.value, b.err);
    return buf;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

const std::vector<PressureKind> kTriple{{KindTag::ExhaustiveUpper, {}}, {KindTag::Amalgamated, {}}, {KindTag::CondensedUpper, {}}};
const std::vector<int> kDepths{4, 6, 8, 10, 12};

EstimateOptions analytic() {
    EstimateOptions o;
    o.method = EstimateOptions::MethodChoice::Analytic;
    return o;
}

// 1. Golden triple for diag:2,3|3,2.
void golden_triple(Outcome& r) {
    const auto t0 = std::chrono::steady_clock::now();
    auto b = sweep(parse_system("diag:2,3|3,2"), kTriple, kDepths, 0.25, analytic());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double targets[] = {std::log(4.0), std::log(6.0), std::log(9.0)};
    const char* names[] = {"h+", "hA", "hcond"};
    for (int i = 0; i < 3; ++i) {
        const Bracket& x = b[kTriple[i].tag];
        r.detail << " " << names[i] << "=" << fmt(x) << " (target " << fmt(targets[i]) << ")";
        r.require(x.contains(targets[i]), std::string(names[i]) + " bracket misses target");
        r.require(x.err <= 0.25, std::string(names[i]) + " error bar > 0.25");
    }
    r.detail << " time=" << fmt(secs) << "s";
    r.require(secs <= 60.0, "runtime > 60 s");
}

// 2. Closed forms on random diagonal tuples.
void closed_forms(Outcome& r) {
    Gen g(2024);
    int misses = 0;
    for (int t = 0; t < 5; ++t) {
        long a = g.integer(2, 6), be = g.integer(2, 6), c = g.integer(2, 6), d = g.integer(2, 6);
        std::ostringstream spec;
        spec << "diag:" << a << "," << be << "|" << c << "," << d;
        auto b = sweep(parse_system(spec.str()), kTriple, kDepths, 0.125, analytic());
        auto cf = closed_form_entropies(a, be, c, d);
        const double want[] = {cf.h_plus, cf.h_amalgamated, cf.h_condensed};
        r.detail << " " << spec.str() << ":";
        for (int i = 0; i < 3; ++i) {
            const bool ok = b[kTriple[i].tag].contains(want[i]);
            r.detail << (ok ? "ok" : "MISS");
            if (!ok) {
                ++misses;
                r.detail << "(" << fmt(want[i]) << " vs " << fmt(b[kTriple[i].tag]) << ")";
            }
            r.detail << (i < 2 ? "," : "");
        }
    }
    r.require(misses == 0, std::to_string(misses) + " of 15 closed-form values outside the error bars");
}

// 3. Exhaustive entropy separates the two conjugacy-example systems.
void conjugacy_separation(Outcome& r) {
    const std::vector<PressureKind> hp{{KindTag::ExhaustiveUpper, {}}};
    auto a = sweep(parse_system("diag:4,5|2,6"), hp, kDepths, 1.0 / 16, analytic())[KindTag::ExhaustiveUpper];
    auto b = sweep(parse_system("diag:2,10|3,4"), hp, kDepths, 1.0 / 16, analytic())[KindTag::ExhaustiveUpper];
    const double gap = std::fabs(a.value - b.value);
    r.detail << " h+{A(4,5),A(2,6)}=" << fmt(a) << " h+{A(2,10),A(3,4)}=" << fmt(b) << " gap=" << fmt(gap);
    r.require(gap >= 0.15, "gap < 0.15");
    r.require(a.hi() < b.lo() || b.hi() < a.lo(), "intervals overlap");
}

// 4. Shear pair collapse.
void shear_collapse(Outcome& r) {
    auto s = parse_system("toral:0,1,1,2|2,1,1,0");
    const auto zero = MultiPotential::zero(2);
    auto traj = estimate_pressure(s, zero, PressureKind::trajectory(TrajectoryRule::periodic({0, 1})), 32, 0.25);
    auto amal = estimate_pressure(s, zero, {KindTag::Amalgamated, {}}, 32, 0.25);
    auto single = estimate_pressure(s, zero, PressureKind::trajectory(TrajectoryRule::constant(0)), 32, 0.25);
    const double h1 = std::log(1.0 + std::sqrt(2.0));
    r.detail << " traj(12)=[" << fmt(traj.lower) << "," << fmt(traj.upper) << "] mid=" << fmt(traj.midpoint())
             << " amal.upper=" << fmt(amal.upper) << " h(f1)=[" << fmt(single.lower) << "," << fmt(single.upper) << "]";
    r.require(traj.method == Method::AnalyticBox, "trajectory not on the analytic path");
    r.require(traj.midpoint() <= 0.15, "trajectory estimate > 0.15");
    r.require(amal.upper <= 0.2, "amalgamated upper > 0.2");
    r.require(single.lower <= h1 && h1 <= single.upper, "single-map interval misses log(1+sqrt 2)");
    r.require(single.lower >= h1 - 0.1 && single.upper <= h1 + 0.1, "single-map interval wider than +-0.1");
}

// 5. Inequality chains over the zoo.
void inequality_chains(Outcome& r) {
    Gen g(5);
    int exact_bad = 0, interval_bad = 0, checks = 0, pool_bad = 0;
    for (const auto& z : testsupport::zoo()) {
        const System& s = z.system;
        const int n = s.dim() == 2 ? 2 : 3;
        const double eps = s.dim() == 2 ? 0.25 : 0.1;
        for (int t = 0; t < 3; ++t) {
            auto phi = random_potential(s.m(), s.dim(), g.integer(1, 1 << 20), 0.5);
            EstimateOptions opt = generic();
            auto rep = verify_inequality_chain(s, phi, n, eps, opt);
            for (const auto& c : rep.checks) {
                ++checks;
                if (!c.holds) ++(c.exact ? exact_bad : interval_bad);
            }
            double amal_upper = 0.0;
            for (const auto& e : rep.estimates)
                if (e.kind.tag == KindTag::Amalgamated) amal_upper = e.upper;
            for (const auto& w : word_pool(s.m(), n, opt.pool_random, opt.seed)) {
                auto e = estimate_pressure(s, phi, PressureKind::trajectory(TrajectoryRule::explicit_prefix(w)), n, eps, opt);
                ++checks;
                if (amal_upper > e.upper) ++pool_bad;
            }
        }
    }
    r.detail << " " << checks << " checks, exact violations " << exact_bad + pool_bad << ", interval violations "
             << interval_bad;
    r.require(exact_bad + pool_bad + interval_bad == 0, "chain violations");
}

// 6. Frozen-cover Lipschitz bound and constant shift.
void lipschitz(Outcome& r) {
    Gen g(6);
    double worst = -1e300, worst_shift = 0.0;
    int bad = 0, pairs = 0;
    for (const char* spec : {"circle:2|3", "diag:2,3|3,2"}) {
        auto s = parse_system(spec);
        const int n = s.dim() == 2 ? 2 : 3;
        const double eps = s.dim() == 2 ? 0.25 : 0.1;
        auto phi = random_potential(s.m(), s.dim(), g.integer(1, 1 << 20), 0.5);
        auto cover = min_cover_cost(s, phi, {KindTag::Amalgamated, {}}, n, eps, generic());
        const double base = frozen_log_cost(s, phi, cover);
        for (int i = 0; i < 100; ++i, ++pairs) {
            auto pert = random_potential(s.m(), s.dim(), g.integer(1, 1 << 20), g.uniform(0.01, 0.3));
            MultiPotential psi = phi;
            for (int j = 0; j < s.m(); ++j) {
                psi.comps[j].constant += pert.comps[j].constant;
                for (const auto& tr : pert.comps[j].trig) psi.comps[j].trig.push_back(tr);
            }
            const double diff = std::fabs(frozen_log_cost(s, psi, cover) - base) / n;
            const double dist = potential_distance(s, phi, psi, cover);
            worst = std::max(worst, diff - dist);
            if (diff > dist + 1e-9) ++bad;
        }
        const double c = g.uniform(-1.0, 1.0);
        const double shift = (frozen_log_cost(s, phi.shifted(c), cover) - base) / n;
        worst_shift = std::max(worst_shift, std::fabs(shift - c));
    }
    r.detail << " " << pairs << " pairs, worst |d| - ||phi-psi|| = " << worst << ", shift error " << worst_shift;
    r.require(bad == 0, std::to_string(bad) + " pairs exceed the bound");
    r.require(worst_shift <= 1e-9, "constant shift not exact");
}

// 7. Lift sandwich.
void lift_sandwich(Outcome& r) {
    auto rep = check_lift_inequalities(parse_system("diag:2,3|3,2"), MultiPotential::zero(2), 12, 0.25);
    r.detail << " h_top(F)=[" << fmt(rep.lift.lower) << "," << fmt(rep.lift.upper) << "] allowed [" << fmt(std::log(12.0) - 0.3)
             << "," << fmt(std::log(18.0) + 0.3) << "] margins " << fmt(rep.lower_margin) << "," << fmt(rep.upper_margin);
    r.require(rep.lift.lower >= std::log(12.0) - 0.3 && rep.lift.upper <= std::log(18.0) + 0.3, "interval outside window");
    r.require(rep.passed, "sandwich violated");
}

// 8. Marginal bound for two doubling maps.
void marginal(Outcome& r) {
    auto s = parse_system("circle:2|2");
    auto base = MeasureModel::lebesgue(1, 1 << 16);
    ProductMeasureModel prod{{0.5, 0.5}, base};
    auto xs = sample_points(base, s, 50, 8);
    auto rep = marginal_bound_check(prod, s, xs, 0.25, {4, 6, 8, 10}, 0.15);
    double worst = -1e300;
    int above = 0;
    for (const auto& e : rep.points) {
        worst = std::max(worst, e.h_lower_local);
        if (e.h_lower_local > std::log(2.0) + 0.15) ++above;
    }
    r.detail << " " << rep.points.size() << " points, max h+ = " << fmt(worst) << " (bound " << fmt(rep.bound) << " + 0.15)";
    r.require(rep.points.size() == 50, "expected 50 points");
    r.require(above == 0 && rep.passed, "points above the bound");
}

// 9. Bowen roots.
void bowen_roots(Outcome& r) {
    auto three = bowen_root(parse_system("cantor:3,3"), 6, 0.125);
    auto five = bowen_root(parse_system("cantor:5,5"), 6, 0.125);
    auto pair = bowen_root(parse_system("cantor:3,3|5,5"), 6, 0.125);
    r.detail << " ternary=" << fmt(three.per_map_roots[0]) << " slope5=" << fmt(five.per_map_roots[0])
             << " t_uA=" << fmt(pair.t_uA);
    r.require(std::fabs(three.per_map_roots[0] - 0.6309) <= 0.02, "ternary root");
    r.require(std::fabs(five.per_map_roots[0] - 0.4307) <= 0.02, "slope-5 root");
    r.require(pair.t_uA <= 0.4307 + 0.02, "two-map root above the bound");
}

// 10. Structural properties.
void structural(Outcome& r) {
    Gen g(10);
    std::map<std::string, int> fails;
    int total = 0;
    auto check = [&](bool ok, const char* what) {
        ++total;
        if (!ok) ++fails[what];
    };
    const auto systems = testsupport::zoo();

    for (const auto& z : systems) {
        const System& s = z.system;
        for (int t = 0; t < 100; ++t) {
            const int n = g.integer(1, s.dim() == 2 ? 4 : 3);
            const double eps = g.uniform(0.02, 0.3);
            Point c = g.core_point(s, n + 1);
            Word w = g.word(s.m(), n);
            Point p = g.near(s, c, eps);
            BallSpec tr{BallKind::Trajectory, w, n, c, eps};
            BallSpec cond{BallKind::Condensed, {}, n, c, eps};
            BallSpec exh{BallKind::Exhaustive, {}, n, c, eps};
            BallSpec deeper{BallKind::Trajectory, Word(w.begin(), w.end() - (n > 1 ? 1 : 0)), 0, c, eps};
            deeper.depth = deeper.n();
            bool in_c = false, in_t = false, in_e = false, in_short = false;
            try {
                in_c = ball_contains(s, cond, p);
                in_t = ball_contains(s, tr, p);
                in_e = ball_contains(s, exh, p);
                in_short = ball_contains(s, deeper, p);
            } catch (const OutOfDomain&) {
                continue;
            }
            check(!in_c || in_t, "condensed in trajectory");
            check(!in_t || in_e, "trajectory in exhaustive");
            check(!in_t || in_short, "depth nesting");
            BallSpec wide = tr;
            wide.eps = eps * 1.5;
            check(!in_t || ball_contains(s, wide, p), "radius nesting");
        }
    }

    for (const auto& z : systems) {
        const System& s = z.system;
        MultiPotential phi = random_potential(s.m(), s.dim(), g.integer(1, 1 << 20), 1.0);
        for (int t = 0; t < 100; ++t) {
            int a = g.integer(1, 4), b = g.integer(1, 4);
            Point x = g.core_point(s, a + b);
            Word u = g.word(s.m(), a), v = g.word(s.m(), b), uv = u;
            uv.insert(uv.end(), v.begin(), v.end());
            const double lhs = consecutive_sum(s, phi, x, uv);
            const double rhs = consecutive_sum(s, phi, x, u) + consecutive_sum(s, phi, orbit(s, x, u).back(), v);
            check(std::fabs(lhs - rhs) <= 1e-12, "additivity");
        }
    }

    for (const auto& z : systems) {
        const System& s = z.system;
        Word omega = g.word(s.m(), 5);
        const double eps = 0.04;
        for (int rep = 0; rep < 4; ++rep) {
            std::vector<BallSpec> balls;
            for (int k = 0; k < 20; ++k) {
                int n = g.integer(1, 5);
                Word w(omega.begin(), omega.begin() + n);
                balls.push_back({BallKind::Trajectory, w, n, g.core_point(s, 5), eps});
            }
            auto kept = vitali_disjointify(s, balls);
            for (std::size_t i = 0; i < kept.size(); ++i)
                for (std::size_t j = i + 1; j < kept.size(); ++j) {
                    const Word& shorter = kept[i].word.size() <= kept[j].word.size() ? kept[i].word : kept[j].word;
                    check(dn_distance(s, kept[i].center, kept[j].center, shorter) >= 2 * eps, "Vitali disjointness");
                }
            for (int t = 0; t < 200; ++t) {
                const BallSpec& b = balls[g.integer(0, static_cast<int>(balls.size()) - 1)];
                Point p = g.near(s, b.center, eps);
                if (!ball_contains(s, b, p)) continue;
                bool covered = false;
                for (auto k : kept) {
                    k.eps = 3 * eps;
                    covered = covered || ball_contains(s, k, p);
                }
                check(covered, "Vitali 3 eps coverage");
            }
        }
    }

    for (int t = 0; t < 40; ++t) {
        const char* specs[] = {"circle:2|3", "circle:2", "cantor:3,3|5,5", "circle:2|3|4"};
        auto s = parse_system(specs[g.integer(0, 3)]);
        const int n = g.integer(1, s.m() == 3 ? 2 : 3);
        const double eps = g.uniform(0.05, 0.3);
        auto phi = random_potential(s.m(), 1, g.integer(1, 1 << 20), g.uniform(0.0, 1.0));
        const std::vector<PressureKind> kinds{
            {KindTag::Amalgamated, {}}, {KindTag::CondensedUpper, {}}, PressureKind::trajectory(TrajectoryRule::periodic({0, s.m() - 1}))};
        for (const auto& k : kinds) {
            auto cover = min_cover_cost(s, phi, k, n, eps, generic());
            check(packing_bound(s, phi, k, n, eps, generic()) <= cover.log_cost + 1e-12, "packing <= spanning");
        }
    }

    for (const char* spec : {"circle:2|3", "circle:2|3|4", "diag:2,3|3,2|2,2"}) {
        auto s = parse_system(spec);
        const int n = s.dim() == 2 || s.m() == 3 ? 2 : 3;
        const double eps = s.dim() == 2 ? 0.25 : 0.1;
        std::vector<int> perm(s.m());
        for (int i = 0; i < s.m(); ++i) perm[i] = (i + 1) % s.m();
        auto phi = random_potential(s.m(), s.dim(), g.integer(1, 1 << 20), 0.5);
        auto a = estimate_all(s, phi, all_set_kinds(), n, eps, generic());
        auto b = estimate_all(s.permuted(perm), phi.permuted(perm), all_set_kinds(), n, eps, generic());
        for (std::size_t i = 0; i < a.size(); ++i) {
            check(std::fabs(a[i].upper - b[i].upper) <= 1e-12 * std::max(1.0, std::fabs(a[i].upper)), "permutation equivariance");
            check(std::fabs(a[i].lower - b[i].lower) <= 1e-12 * std::max(1.0, std::fabs(a[i].lower)), "permutation equivariance");
        }
        EstimateOptions serial = generic();
        serial.parallel = false;
        auto c = estimate_all(s, phi, all_set_kinds(), n, eps, generic());
        auto d = estimate_all(s, phi, all_set_kinds(), n, eps, serial);
        for (std::size_t i = 0; i < a.size(); ++i) {
            check(a[i].upper == c[i].upper && a[i].lower == c[i].lower && a[i].cover_size == c[i].cover_size, "determinism");
            check(a[i].upper == d[i].upper && a[i].lower == d[i].lower, "serial equals parallel");
        }
    }

    int failed = 0;
    for (const auto& [what, k] : fails) {
        failed += k;
        r.detail << " " << what << ":" << k;
    }
    r.detail << " " << total - failed << "/" << total << " checks";
    r.require(failed == 0, "property failures");
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
        {"AC1 golden triple diag:2,3|3,2", golden_triple},
        {"AC2 closed-form entropies, 5 random tuples", closed_forms},
        {"AC3 conjugacy separation by h+", conjugacy_separation},
        {"AC4 shear pair collapse", shear_collapse},
        {"AC5 inequality chains over the zoo", inequality_chains},
        {"AC6 frozen-cover Lipschitz bound", lipschitz},
        {"AC7 lift sandwich", lift_sandwich},
        {"AC8 marginal local-entropy bound", marginal},
        {"AC9 Bowen roots", bowen_roots},
        {"AC10 structural property suite", structural},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome r;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            run(r);
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %s:%s (%.1fs)\n", r.pass ? "PASS" : "FAIL", name, r.detail.str().c_str(), secs);
        std::fflush(stdout);
        if (!r.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
