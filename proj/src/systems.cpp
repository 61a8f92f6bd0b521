#include "presslab/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "presslab/util.hpp"

namespace presslab {

ToralGenerator ToralGenerator::from(const Mat2& m) {
    if (m.det() == 0) throw std::invalid_argument("toral generator must have nonzero determinant");
    return {m, toral_eigen(m), m.diagonal()};
}

Point toral_apply(const Mat2& g, const Point& p) {
    return {frac(double(g.a) * p.x + double(g.b) * p.y), frac(double(g.c) * p.x + double(g.d) * p.y)};
}

std::pair<std::complex<double>, std::complex<double>> toral_eigen(const Mat2& g) {
    const double tr = double(g.a + g.d);
    const double det = double(g.det());
    const double disc = tr * tr - 4.0 * det;
    std::complex<double> l1, l2;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        // Avoid cancellation: compute the larger root first, the other from the product.
        const double big = tr >= 0 ? (tr + s) / 2.0 : (tr - s) / 2.0;
        l1 = big;
        l2 = big != 0.0 ? det / big : (tr - big);
    } else {
        const double s = std::sqrt(-disc);
        l1 = {tr / 2.0, s / 2.0};
        l2 = {tr / 2.0, -s / 2.0};
    }
    if (std::abs(l1) > std::abs(l2)) std::swap(l1, l2);
    return {l1, l2};
}

double toral_entropy(const Mat2& g, int dim) {
    if (dim == 1) return std::log(std::fabs(double(g.a)));
    auto [l1, l2] = toral_eigen(g);
    double h = 0.0;
    if (std::abs(l1) > 1.0) h += std::log(std::abs(l1));
    if (std::abs(l2) > 1.0) h += std::log(std::abs(l2));
    return h;
}

namespace {

// Repeated division, so boxes compare exactly with trajectory boxes built symbol by symbol.
double shrink(double eps, double factor, int n) {
    for (int i = 0; i < n; ++i) eps /= factor;
    return eps;
}

}  // namespace

BallBox analytic_ball_box(const System& sys, BoxKind kind, const Word& word, int n, double eps) {
    if (!sys.all_diagonal() || sys.dim() != 2) throw std::invalid_argument("analytic path unavailable: non-diagonal generator");
    for (const auto& M : sys.matrices())
        if (std::labs(M.a) < 2 || std::labs(M.d) < 2) throw std::invalid_argument("analytic path needs diagonal entries >= 2");
    if (!(eps > 0.0)) throw std::invalid_argument("radius must be positive");
    const auto& mats = sys.matrices();
    switch (kind) {
        case BoxKind::Trajectory: {
            validate_word(word, sys.m());
            double hx = eps, hy = eps;
            for (int s : word) {
                hx /= std::fabs(double(mats[s].a));
                hy /= std::fabs(double(mats[s].d));
            }
            return {hx, hy};
        }
        case BoxKind::Condensed:
        case BoxKind::ExhaustiveOuter: {
            if (n < 1) throw std::invalid_argument("depth must be at least 1");
            double ax = std::fabs(double(mats[0].a)), ay = std::fabs(double(mats[0].d));
            for (const auto& M : mats) {
                double mx = std::fabs(double(M.a)), my = std::fabs(double(M.d));
                ax = kind == BoxKind::Condensed ? std::max(ax, mx) : std::min(ax, mx);
                ay = kind == BoxKind::Condensed ? std::max(ay, my) : std::min(ay, my);
            }
            return {shrink(eps, ax, n), shrink(eps, ay, n)};
        }
        case BoxKind::ExhaustiveInner: {
            if (n < 1) throw std::invalid_argument("depth must be at least 1");
            // Largest single trajectory box: the word repeating the generator of least determinant.
            std::size_t best = 0;
            for (std::size_t j = 1; j < mats.size(); ++j)
                if (std::labs(mats[j].det()) < std::labs(mats[best].det())) best = j;
            return {shrink(eps, std::fabs(double(mats[best].a)), n), shrink(eps, std::fabs(double(mats[best].d)), n)};
        }
    }
    return {};
}

ClosedForm closed_form_entropies(long alpha, long beta, long gamma, long delta) {
    if (alpha < 2 || beta < 2 || gamma < 2 || delta < 2) throw std::invalid_argument("closed form needs entries >= 2");
    const auto L = [](long v) { return std::log(double(v)); };
    return {L(std::min(alpha, gamma)) + L(std::min(beta, delta)), std::min(L(alpha) + L(beta), L(gamma) + L(delta)),
            L(std::max(alpha, gamma)) + L(std::max(beta, delta))};
}

namespace {

bool is_square(long v) {
    if (v < 0) return false;
    long r = static_cast<long>(std::llround(std::sqrt(double(v))));
    for (long c = std::max(0L, r - 2); c <= r + 2; ++c)
        if (c * c == v) return true;
    return false;
}

}  // namespace

bool char_poly_irreducible(const Mat2& g) {
    // x^2 - t x + d is reducible over Z iff its discriminant is a perfect square
    // (monic quadratic: rational roots are integers by Gauss's lemma).
    const long t = g.a + g.d;
    const long d = g.det();
    const long disc = t * t - 4 * d;
    if (is_square(disc)) return false;
    // An integer root r would divide d; checked directly for completeness.
    for (long r = -std::labs(d); r <= std::labs(d); ++r)
        if (r != 0 && d % r == 0 && r * r - t * r + d == 0) return false;
    return true;
}

BerendVerdict berend_check(const std::vector<Mat2>& gens, double h_plus_estimate,
                           const std::vector<double>& single_entropies) {
    if (gens.size() < 2) throw std::invalid_argument("berend check needs at least two generators");
    if (single_entropies.size() != gens.size()) throw std::invalid_argument("one single-map entropy per generator");
    BerendVerdict v;
    v.commutative = true;
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = i + 1; j < gens.size(); ++j)
            if (!(gens[i] * gens[j] == gens[j] * gens[i])) v.commutative = false;
    v.all_eigen_moduli_gt1 = true;
    for (const auto& g : gens) {
        auto [l1, l2] = toral_eigen(g);
        if (!(std::abs(l1) > 1.0 && std::abs(l2) > 1.0)) v.all_eigen_moduli_gt1 = false;
        if (char_poly_irreducible(g) && std::fabs(std::abs(l1) - std::abs(l2)) > 1e-12)
            v.has_irreducible_generator_with_distinct_moduli = true;
    }
    v.exhaustive_lt_every_single_entropy =
        std::all_of(single_entropies.begin(), single_entropies.end(), [&](double h) { return h_plus_estimate < h; });
    if (v.commutative && v.all_eigen_moduli_gt1 && v.has_irreducible_generator_with_distinct_moduli &&
        v.exhaustive_lt_every_single_entropy)
        v.conclusion = BerendConclusion::OnlyTorusInvariant;
    return v;
}

System expanding_interval_system(const std::vector<std::vector<double>>& slopes) {
    std::vector<IntervalMap> maps;
    for (const auto& gen : slopes) {
        if (gen.empty()) throw std::invalid_argument("generator without branches");
        double total = 0.0;
        for (double s : gen) {
            if (!(s > 1.0)) throw std::invalid_argument("branch slope must exceed 1");
            total += 1.0 / s;
        }
        if (total > 1.0 + 1e-12) throw std::invalid_argument("overlapping branches");
        IntervalMap f;
        const std::size_t k = gen.size();
        if (k == 1) {
            f.branches.push_back({0.0, 1.0 / gen[0]});
        } else {
            const double gap = (1.0 - total) / double(k - 1);
            double pos = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                double len = 1.0 / gen[i];
                double lo = (i + 1 == k) ? 1.0 - len : pos;
                f.branches.push_back({lo, lo + len});
                pos = lo + len + gap;
            }
        }
        maps.push_back(f);
    }
    return System::interval(maps);
}

namespace {

std::vector<long> parse_longs(const std::string& s) {
    std::vector<long> out;
    for (const auto& tok : split(s, ',')) out.push_back(parse_long(trim(tok)));
    return out;
}

Mat2 matrix_from(const std::vector<long>& v) {
    if (v.size() != 4) throw std::invalid_argument("toral generator needs four entries");
    return {v[0], v[1], v[2], v[3]};
}

}  // namespace

System parse_system(const std::string& spec_in) {
    const std::string spec = trim(spec_in);
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("system spec needs a 'kind:' prefix");
    const std::string kind = trim(spec.substr(0, colon));
    const std::string body = trim(spec.substr(colon + 1));
    if (body.empty()) throw std::invalid_argument("empty system spec");

    if (kind == "diag") {
        std::vector<Mat2> mats;
        for (const auto& g : split(body, '|')) {
            auto v = parse_longs(g);
            if (v.size() != 2) throw std::invalid_argument("diag generator needs two entries");
            mats.push_back({v[0], 0, 0, v[1]});
        }
        return System::torus(2, mats);
    }
    if (kind == "circle") {
        std::vector<Mat2> mats;
        for (const auto& g : split(body, '|')) mats.push_back({parse_long(trim(g)), 0, 0, 1});
        return System::torus(1, mats);
    }
    if (kind == "toral") {
        std::vector<Mat2> mats;
        if (body.find('|') != std::string::npos) {
            for (const auto& g : split(body, '|')) {
                std::string flat = g;
                std::replace(flat.begin(), flat.end(), ';', ',');
                mats.push_back(matrix_from(parse_longs(flat)));
            }
        } else {
            auto groups = split(body, ';');
            bool rows = groups.size() == 2 && parse_longs(groups[0]).size() == 2 && parse_longs(groups[1]).size() == 2;
            if (rows) {
                auto r0 = parse_longs(groups[0]), r1 = parse_longs(groups[1]);
                mats.push_back({r0[0], r0[1], r1[0], r1[1]});
            } else {
                for (const auto& g : groups) mats.push_back(matrix_from(parse_longs(g)));
            }
        }
        return System::torus(2, mats);
    }
    if (kind == "cantor") {
        std::vector<std::vector<double>> slopes;
        for (const auto& g : split(body, '|')) {
            std::vector<double> s;
            for (const auto& tok : split(g, ',')) s.push_back(parse_double(trim(tok)));
            slopes.push_back(s);
        }
        return expanding_interval_system(slopes);
    }
    throw std::invalid_argument("unknown system kind '" + kind + "'");
}

MultiPotential random_potential(int m, int dim, std::uint64_t seed, double amplitude) {
    if (m < 1) throw std::invalid_argument("potential needs at least one component");
    if (!(amplitude >= 0.0)) throw std::invalid_argument("amplitude must be nonnegative");
    std::mt19937_64 rng(mix_seed(seed, 0x9073));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> k(-2, 2);
    MultiPotential out;
    for (int j = 0; j < m; ++j) {
        Potential p;
        p.constant = amplitude * u(rng);
        for (int t = 0; t < 2; ++t) {
            TrigTerm term;
            term.amp = 0.5 * amplitude * u(rng);
            term.kx = k(rng);
            term.ky = dim == 2 ? k(rng) : 0;
            term.phase = std::numbers::pi * u(rng);
            p.trig.push_back(term);
        }
        out.comps.push_back(p);
    }
    return out;
}

MultiPotential parse_potential(const std::string& raw, const System& sys) {
    const std::string s = trim(raw);
    if (s == "zero") return MultiPotential::zero(sys.m());
    if (s == "coordinate") {
        MultiPotential out = MultiPotential::zero(sys.m());
        for (auto& p : out.comps) p.coord = 1.0;
        return out;
    }
    auto colon = s.find(':');
    const std::string head = s.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (head == "constants") {
        std::vector<double> c;
        for (const auto& t : split(rest, ',')) c.push_back(parse_double(trim(t)));
        if (static_cast<int>(c.size()) != sys.m())
            throw std::invalid_argument("constants potential needs one value per generator");
        return MultiPotential::constant(c);
    }
    if (head == "random") {
        auto f = split(rest, ',');
        if (f.size() != 2) throw std::invalid_argument("random potential is random:seed,amplitude");
        return random_potential(sys.m(), sys.dim(), static_cast<std::uint64_t>(parse_long(trim(f[0]))),
                                parse_double(trim(f[1])));
    }
    throw std::invalid_argument("unknown potential '" + s + "'");
}

std::vector<ZooEntry> system_zoo() {
    std::vector<ZooEntry> z;
    for (const char* s : {"diag:2,3|3,2", "toral:0,1,1,2|2,1,1,0", "circle:2|2", "circle:2|3", "cantor:3,3|5,5"})
        z.push_back({s, parse_system(s)});
    return z;
}

}  // namespace presslab
