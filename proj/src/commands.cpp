#include "presslab/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "presslab/dimension.hpp"
#include "presslab/lift.hpp"
#include "presslab/localent.hpp"
#include "presslab/systems.hpp"
#include "presslab/util.hpp"

namespace presslab {

using Json = nlohmann::ordered_json;

std::string csv_escape(const std::string& f) {
    if (f.find_first_of(",\"\n") == std::string::npos) return f;
    std::string out = "\"";
    for (char c : f) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string estimate_csv_header() { return "kind,n,epsilon,lower,upper,cover_size,method,seed\n"; }

namespace {

std::string format_count(double c) {
    if (c >= 0.0 && c < 1e18) {
        char buf[32];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, static_cast<unsigned long long>(std::llround(c)));
        (void)ec;
        return std::string(buf, p);
    }
    return format_double(c);
}

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json estimate_json(const PressureEstimate& e) {
    Json j;
    j["kind"] = e.kind.name();
    j["n"] = e.n;
    j["epsilon"] = num(e.eps);
    j["lower"] = num(e.lower);
    j["upper"] = num(e.upper);
    j["cover_size"] = num(e.cover_size);
    j["method"] = method_name(e.method);
    j["seed"] = e.seed;
    j["log_cost_lower"] = num(e.log_cost_lower);
    j["log_cost_upper"] = num(e.log_cost_upper);
    j["stochastic"] = e.stochastic;
    j["sampling_error"] = num(e.sampling_error);
    return j;
}

struct Setup {
    System sys;
    MultiPotential phi;
    EstimateOptions opt;
    std::vector<PressureKind> kinds;
};

Setup setup(const RunConfig& cfg) {
    Setup s{parse_system(cfg.system), {}, {}, {}};
    s.phi = parse_potential(cfg.potential, s.sys);
    s.opt.pool_random = cfg.pool_random;
    s.opt.seed = cfg.seed;
    s.opt.method = cfg.method == "analytic"  ? EstimateOptions::MethodChoice::Analytic
                   : cfg.method == "generic" ? EstimateOptions::MethodChoice::Generic
                                             : EstimateOptions::MethodChoice::Auto;
    if (cfg.kinds.empty())
        s.kinds = all_set_kinds();
    else
        for (const auto& k : cfg.kinds) s.kinds.push_back(PressureKind::parse(k));
    return s;
}

Json header(const std::string& command, const RunConfig& cfg) {
    Json j;
    j["schema_version"] = 1;
    j["command"] = command;
    j["system"] = cfg.system;
    j["potential"] = cfg.potential;
    j["seed"] = cfg.seed;
    return j;
}

struct ExtrapolationRow {
    std::string kind;
    double eps = 0.0;
    int n = 0;
    Extrapolation x;
    Method method = Method::GenericGrid;
};

// Estimates over the (eps, n) grid plus extrapolation over n for every kind and eps.
struct Table {
    std::vector<PressureEstimate> rows;
    std::vector<ExtrapolationRow> extrapolations;
    bool eps_monotone = true;
};

Table run_grid(const Setup& s, const RunConfig& cfg) {
    Table t;
    std::map<std::pair<std::string, double>, std::vector<PressureEstimate>> seqs;
    for (double eps : cfg.eps)
        for (int n : cfg.ns)
            for (auto& e : estimate_all(s.sys, s.phi, s.kinds, n, eps, s.opt)) {
                seqs[{e.kind.name(), eps}].push_back(e);
                t.rows.push_back(e);
            }
    if (cfg.ns.size() >= 3) {
        for (double eps : cfg.eps)
            for (const auto& k : s.kinds) {
                const auto& seq = seqs.at({k.name(), eps});
                t.extrapolations.push_back({k.name(), eps, seq.back().n, extrapolate(seq), seq.back().method});
            }
    }
    // Upper estimates should not increase with eps at a fixed depth.
    for (const auto& k : s.kinds)
        for (int n : cfg.ns) {
            std::vector<std::pair<double, double>> byeps;
            for (const auto& e : t.rows)
                if (e.n == n && e.kind.name() == k.name()) byeps.push_back({e.eps, e.upper});
            std::sort(byeps.begin(), byeps.end());
            for (std::size_t i = 1; i < byeps.size(); ++i)
                if (byeps[i].second > byeps[i - 1].second + 1e-12) t.eps_monotone = false;
        }
    return t;
}

std::string table_csv(const Table& t, std::uint64_t seed) {
    std::ostringstream o;
    o << estimate_csv_header();
    for (const auto& e : t.rows) o << estimate_csv_row(e);
    for (const auto& x : t.extrapolations)
        o << csv_escape(x.kind) << ',' << x.n << ',' << format_double(x.eps) << ','
          << format_double(x.x.value - x.x.error_bar) << ',' << format_double(x.x.value + x.x.error_bar) << ",0,"
          << "Extrapolated" << ',' << seed << '\n';
    return o.str();
}

Json table_json(const Table& t, const std::string& command, const RunConfig& cfg) {
    Json j = header(command, cfg);
    j["estimates"] = Json::array();
    for (const auto& e : t.rows) j["estimates"].push_back(estimate_json(e));
    j["extrapolations"] = Json::array();
    for (const auto& x : t.extrapolations) {
        Json r;
        r["kind"] = x.kind;
        r["epsilon"] = num(x.eps);
        r["n"] = x.n;
        r["value"] = num(x.x.value);
        r["error_bar"] = num(x.x.error_bar);
        r["converged"] = x.x.converged;
        r["monotone"] = x.x.monotone;
        r["method"] = method_name(x.method);
        j["extrapolations"].push_back(r);
    }
    j["eps_monotone"] = t.eps_monotone;
    return j;
}

CommandResult cmd_estimate(const RunConfig& cfg, const std::string& name) {
    Setup s = setup(cfg);
    Table t = run_grid(s, cfg);
    CommandResult r;
    r.output = cfg.format == "json" ? table_json(t, name, cfg).dump(2) + "\n" : table_csv(t, cfg.seed);
    if (!t.eps_monotone) r.message = "note: upper estimates are not monotone in eps on this grid\n";
    return r;
}

struct CheckRow {
    std::string check;
    std::string detail;
    double lhs = 0.0;
    double rhs = 0.0;
    bool passed = false;
};

CommandResult cmd_verify(const RunConfig& cfg) {
    Setup s = setup(cfg);
    std::vector<CheckRow> checks;
    std::vector<PressureEstimate> estimates;
    auto want = [&](const std::string& c) { return std::find(cfg.checks.begin(), cfg.checks.end(), c) != cfg.checks.end(); };
    static const std::vector<std::string> known{"chain", "shift", "lipschitz", "lift", "marginal", "separation"};
    for (const auto& c : cfg.checks)
        if (std::find(known.begin(), known.end(), c) == known.end())
            throw std::invalid_argument("unknown check '" + c + "'");

    for (double eps : cfg.eps)
        for (int n : cfg.ns) {
            const std::string at = "n=" + std::to_string(n) + " eps=" + format_double(eps);
            if (want("chain")) {
                auto rep = verify_inequality_chain(s.sys, s.phi, n, eps, s.opt, cfg.tolerance);
                for (const auto& c : rep.checks)
                    checks.push_back({"chain", c.name + (c.exact ? " [exact]" : " [interval]") + " " + at, c.lhs, c.rhs, c.holds});
                estimates.insert(estimates.end(), rep.estimates.begin(), rep.estimates.end());
            }
            if (want("shift")) {
                Word w = PressureKind::parse("trajectory:" + cfg.shift_word).rule.prefix(n + 1);
                auto rep = trajectory_shift_check(s.sys, s.phi, w, n, eps, s.opt);
                checks.push_back({"shift", at, rep.difference, rep.bound + cfg.tolerance, rep.difference <= rep.bound + cfg.tolerance});
            }
            if (want("lift")) {
                auto rep = check_lift_inequalities(s.sys, s.phi, n, eps, s.opt, cfg.tolerance);
                checks.push_back({"lift", "lower side " + at, rep.amalgamated.lower + rep.log_m, rep.lift.upper,
                                  rep.lower_margin >= -cfg.tolerance});
                checks.push_back({"lift", "upper side " + at, rep.lift.lower, rep.condensed_upper.upper + rep.log_m,
                                  rep.upper_margin >= -cfg.tolerance});
                estimates.push_back(rep.lift);
            }
        }

    if (want("lipschitz")) {
        EstimateOptions gopt = s.opt;
        gopt.method = EstimateOptions::MethodChoice::Generic;
        const PressureKind kind{KindTag::Amalgamated, {}};
        CoverSolution cover = min_cover_cost(s.sys, s.phi, kind, cfg.lipschitz_n, cfg.lipschitz_eps, gopt);
        const double base = frozen_log_cost(s.sys, s.phi, cover);
        int bad = 0;
        double worst = -1e300;
        for (int i = 0; i < cfg.lipschitz_pairs; ++i) {
            MultiPotential pert = random_potential(s.sys.m(), s.sys.dim(), mix_seed(cfg.seed, 7000 + i), cfg.lipschitz_amplitude / 2);
            MultiPotential psi = s.phi;
            for (int j = 0; j < psi.m(); ++j) {
                psi.comps[j].constant += pert.comps[j].constant;
                for (const auto& tr : pert.comps[j].trig) psi.comps[j].trig.push_back(tr);
            }
            const double diff = std::fabs(base - frozen_log_cost(s.sys, psi, cover)) / cover.n;
            const double dist = potential_distance(s.sys, s.phi, psi, cover);
            worst = std::max(worst, diff - dist);
            if (!(diff <= dist + cfg.tolerance)) ++bad;
        }
        checks.push_back({"lipschitz", std::to_string(cfg.lipschitz_pairs) + " random pairs, worst excess", worst,
                          cfg.tolerance, bad == 0});
        const double c = 0.37;
        const double shifted = frozen_log_cost(s.sys, s.phi.shifted(c), cover);
        const double diff = (shifted - base) / cover.n;
        checks.push_back({"lipschitz", "constant shift c=0.37", diff, c, std::fabs(diff - c) <= std::max(1e-9, cfg.tolerance) && cfg.tolerance >= 0});
    }

    if (want("marginal")) {
        long cells = cfg.cells > 0 ? cfg.cells : (s.sys.dim() == 1 ? 1L << 16 : 1L << 14);
        auto prod = parse_measure(cfg.measure, s.sys.dim(), s.sys.m(), cells);
        auto xs = sample_points(prod.base, s.sys, cfg.points, cfg.seed);
        LocalOptions lo{cfg.pool_random, cfg.seed};
        auto rep = marginal_bound_check(prod, s.sys, xs, cfg.local_eps, cfg.local_ns, cfg.marginal_tolerance, lo);
        double worst = 0.0;
        for (const auto& e : rep.points) worst = std::max(worst, e.h_lower_local);
        checks.push_back({"marginal", std::to_string(xs.size()) + " points, max lower local entropy vs bound", worst,
                          rep.bound + rep.tolerance, rep.passed});
    }

    if (want("separation")) {
        const int n = *std::max_element(cfg.ns.begin(), cfg.ns.end());
        const double eps = cfg.eps.front();
        const PressureKind hp{KindTag::ExhaustiveUpper, {}};
        auto a = estimate_pressure(s.sys, s.phi, hp, n, eps, s.opt);
        for (const auto& other : cfg.compare_systems) {
            System sys2 = parse_system(other);
            auto b = estimate_pressure(sys2, parse_potential(cfg.potential, sys2), hp, n, eps, s.opt);
            const double gap = std::fabs(a.midpoint() - b.midpoint());
            const bool disjoint = a.upper < b.lower || b.upper < a.lower;
            const bool yes = gap >= cfg.separation_gap && disjoint;
            checks.push_back({"separation", cfg.system + " vs " + other + " distinguishable: " + (yes ? "yes" : "no"), gap,
                              cfg.separation_gap, yes});
            estimates.push_back(a);
            estimates.push_back(b);
        }
    }

    CommandResult r;
    const bool ok = std::all_of(checks.begin(), checks.end(), [](const CheckRow& c) { return c.passed; });
    r.exit_code = ok ? kExitOk : kExitCheckFailed;
    if (cfg.format == "json") {
        Json j = header("verify", cfg);
        j["passed"] = ok;
        j["checks"] = Json::array();
        for (const auto& c : checks)
            j["checks"].push_back({{"check", c.check}, {"detail", c.detail}, {"lhs", num(c.lhs)}, {"rhs", num(c.rhs)}, {"passed", c.passed}});
        j["estimates"] = Json::array();
        for (const auto& e : estimates) j["estimates"].push_back(estimate_json(e));
        r.output = j.dump(2) + "\n";
    } else {
        std::ostringstream o;
        o << "check,detail,lhs,rhs,passed\n";
        for (const auto& c : checks)
            o << c.check << ',' << csv_escape(c.detail) << ',' << format_double(c.lhs) << ',' << format_double(c.rhs) << ','
              << (c.passed ? "yes" : "no") << '\n';
        r.output = o.str();
    }
    if (!ok) r.message = "verification failed\n";
    return r;
}

CommandResult cmd_dimension(const RunConfig& cfg) {
    Setup s = setup(cfg);
    auto d = bowen_root(s.sys, cfg.dimension_n, cfg.dimension_eps, s.opt, {cfg.bracket_lo, cfg.bracket_hi, 1e-3});
    Json j = header("dimension", cfg);
    j["n"] = cfg.dimension_n;
    j["epsilon"] = num(cfg.dimension_eps);
    j["t_uA"] = num(d.t_uA);
    j["bracket"] = {num(d.lo), num(d.hi)};
    j["iterations"] = d.iterations;
    j["per_map_roots"] = Json::array();
    for (double t : d.per_map_roots) j["per_map_roots"].push_back(num(t));
    j["monotone"] = d.monotone;
    j["samples"] = Json::array();
    for (const auto& p : d.samples) j["samples"].push_back({{"t", num(p.t)}, {"value", num(p.value)}});
    CommandResult r;
    r.output = j.dump(2) + "\n";
    if (!d.monotone) {
        r.exit_code = kExitCheckFailed;
        r.message = "pressure estimates are not strictly decreasing in t\n";
    }
    return r;
}

CommandResult cmd_localent(const RunConfig& cfg) {
    Setup s = setup(cfg);
    long cells = cfg.cells > 0 ? cfg.cells : (s.sys.dim() == 1 ? 1L << 16 : 1L << 14);
    auto prod = parse_measure(cfg.measure, s.sys.dim(), s.sys.m(), cells);
    auto xs = sample_points(prod.base, s.sys, cfg.points, cfg.seed);
    LocalOptions lo{cfg.pool_random, cfg.seed};
    auto es = local_entropies_parallel(prod.base, s.sys, xs, cfg.local_eps, cfg.local_ns, lo);
    CommandResult r;
    if (cfg.format == "json") {
        Json j = header("localent", cfg);
        j["measure"] = cfg.measure;
        j["points"] = Json::array();
        for (const auto& e : es) {
            Json p;
            p["x"] = num(e.x.x);
            p["y"] = num(e.x.y);
            p["epsilon"] = num(e.eps);
            p["n"] = e.ns;
            auto seq = [](const std::vector<double>& v) {
                Json a = Json::array();
                for (double x : v) a.push_back(num(x));
                return a;
            };
            p["upper_seq"] = seq(e.upper_seq);
            p["lower_seq"] = seq(e.lower_seq);
            p["exhaustive_seq"] = seq(e.exhaustive_seq);
            p["h_upper_local"] = num(e.h_upper_local);
            p["h_lower_local"] = num(e.h_lower_local);
            p["h_exhaustive_local"] = num(e.h_exhaustive_local);
            p["zero_mass"] = e.zero_mass;
            j["points"].push_back(p);
        }
        r.output = j.dump(2) + "\n";
    } else {
        std::ostringstream o;
        o << "x,y,epsilon,h_upper_local,h_lower_local,h_exhaustive_local,zero_mass,seed\n";
        for (const auto& e : es)
            o << format_double(e.x.x) << ',' << format_double(e.x.y) << ',' << format_double(e.eps) << ','
              << format_double(e.h_upper_local) << ',' << format_double(e.h_lower_local) << ','
              << format_double(e.h_exhaustive_local) << ',' << (e.zero_mass ? "yes" : "no") << ',' << cfg.seed << '\n';
        r.output = o.str();
    }
    return r;
}

}  // namespace

std::string estimate_csv_row(const PressureEstimate& e) {
    std::ostringstream o;
    o << csv_escape(e.kind.name()) << ',' << e.n << ',' << format_double(e.eps) << ',' << format_double(e.lower) << ','
      << format_double(e.upper) << ',' << format_count(e.cover_size) << ',' << method_name(e.method) << ',' << e.seed
      << '\n';
    return o.str();
}

CommandResult run_command(const std::string& command, const RunConfig& cfg) {
    try {
        if (command == "estimate") return cmd_estimate(cfg, "estimate");
        if (command == "sweep") return cmd_estimate(cfg, "sweep");
        if (command == "verify") return cmd_verify(cfg);
        if (command == "dimension") return cmd_dimension(cfg);
        if (command == "localent") return cmd_localent(cfg);
        return {kExitParse, "", "unknown command '" + command + "'\n"};
    } catch (const Infeasible& e) {
        return {kExitInfeasible, "", std::string("infeasible: ") + e.what() + "\n"};
    } catch (const UnderResolved& e) {
        return {kExitInfeasible, "", std::string("under-resolved: ") + e.what() + "\n"};
    } catch (const DepthTooLarge& e) {
        return {kExitInfeasible, "", std::string("infeasible: ") + e.what() + "\n"};
    } catch (const std::invalid_argument& e) {
        return {kExitParse, "", std::string("invalid input: ") + e.what() + "\n"};
    } catch (const std::out_of_range& e) {
        return {kExitParse, "", std::string("invalid input: ") + e.what() + "\n"};
    } catch (const std::logic_error& e) {
        return {kExitInternal, "", std::string("internal error: ") + e.what() + "\n"};
    } catch (const std::runtime_error& e) {
        return {kExitInfeasible, "", std::string("infeasible: ") + e.what() + "\n"};
    }
}

}  // namespace presslab
