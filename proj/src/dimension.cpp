#include "presslab/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace presslab {

MultiPotential unstable_multipotential(const System& sys) {
    MultiPotential out;
    for (int j = 0; j < sys.m(); ++j) {
        Potential p;
        if (sys.domain() == Domain::Torus) {
            auto ld = sys.log_derivative(j, {0.0, 0.0});
            if (!ld) throw std::invalid_argument("system is not conformal: unstable potential undefined");
            if (!(*ld > 0.0)) throw std::invalid_argument("system is not expanding");
            p.constant = -*ld;
        } else {
            const auto& br = sys.interval_maps()[j].branches;
            double s0 = br.front().slope();
            bool same = true;
            for (const auto& b : br) {
                if (!(b.slope() > 1.0)) throw std::invalid_argument("system is not expanding");
                same = same && b.slope() == s0;
            }
            if (same) {
                p.constant = -std::log(s0);
            } else {
                for (const auto& b : br) p.steps.push_back({b.lo, b.hi, -std::log(b.slope())});
            }
        }
        out.comps.push_back(p);
    }
    return out;
}

System single_generator(const System& sys, int j) {
    if (j < 0 || j >= sys.m()) throw std::out_of_range("generator index");
    if (sys.domain() == Domain::Torus) return System::torus(sys.dim(), {sys.matrices()[j]});
    return System::interval({sys.interval_maps()[j]});
}

double pressure_increment(const System& sys, const MultiPotential& phi, const PressureKind& kind, int n, double eps,
                          const EstimateOptions& opt) {
    if (n < 2) throw std::invalid_argument("pressure increment needs depth at least 2");
    auto a = estimate_pressure(sys, phi, kind, n, eps, opt);
    auto b = estimate_pressure(sys, phi, kind, n - 1, eps, opt);
    return a.log_cost_upper - b.log_cost_upper;
}

RootResult pressure_root(const System& sys, const MultiPotential& phi, const PressureKind& kind, int n, double eps,
                         const EstimateOptions& opt, const RootOptions& ropt) {
    if (!(ropt.lo < ropt.hi)) throw std::invalid_argument("root bracket must satisfy lo < hi");
    RootResult r;
    auto f = [&](double t) {
        double v = pressure_increment(sys, phi.scaled(t), kind, n, eps, opt);
        r.samples.push_back({t, v});
        return v;
    };
    double lo = ropt.lo, hi = ropt.hi;
    double flo = f(lo);
    if (lo == 0.0 && flo <= 0.0) {
        // No exponential growth at t = 0: the set is too thin to carry positive dimension.
        r.root = r.lo = r.hi = 0.0;
        return r;
    }
    double fhi = f(hi);
    if (!(flo > 0.0 && fhi < 0.0)) {
        const double w = hi - lo;
        lo = std::max(0.0, lo - w);
        hi = hi + w;
        flo = f(lo);
        fhi = f(hi);
        if (!(flo > 0.0 && fhi < 0.0)) throw std::runtime_error("no sign change of the pressure in the bracket");
    }
    while (hi - lo > ropt.width) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm > 0.0)
            lo = mid;
        else
            hi = mid;
        ++r.iterations;
    }
    r.lo = lo;
    r.hi = hi;
    r.root = 0.5 * (lo + hi);
    auto s = r.samples;
    std::sort(s.begin(), s.end(), [](const PressureSample& a, const PressureSample& b) { return a.t < b.t; });
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i].t > s[i - 1].t && !(s[i].value < s[i - 1].value)) r.monotone = false;
    return r;
}

DimensionResult bowen_root(const System& sys, int n, double eps, const EstimateOptions& opt, const RootOptions& ropt) {
    const MultiPotential phi = unstable_multipotential(sys);
    RootResult a = pressure_root(sys, phi, {KindTag::Amalgamated, {}}, n, eps, opt, ropt);
    DimensionResult d;
    d.t_uA = a.root;
    d.lo = a.lo;
    d.hi = a.hi;
    d.iterations = a.iterations;
    d.monotone = a.monotone;
    d.samples = a.samples;
    for (int j = 0; j < sys.m(); ++j) {
        System one = single_generator(sys, j);
        MultiPotential pj{{phi.comps[j]}};
        RootResult rj =
            pressure_root(one, pj, PressureKind::trajectory(TrajectoryRule::constant(0)), n, eps, opt, ropt);
        d.per_map_roots.push_back(rj.root);
        d.monotone = d.monotone && rj.monotone;
    }
    return d;
}

}  // namespace presslab
