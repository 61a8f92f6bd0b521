#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "presslab/dimension.hpp"
#include "presslab/systems.hpp"
#include "support.hpp"

using namespace presslab;

namespace {

// Zero of t -> log sum_k r_k^t for an affine full-branch map with contraction ratios r_k.
double moran_root(const std::vector<double>& slopes) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi), s = 0.0;
        for (double a : slopes) s += std::pow(a, -mid);
        (s > 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("unstable multipotential") {
    auto c = unstable_multipotential(parse_system("cantor:3,3"));
    REQUIRE(c.m() == 1);
    CHECK(c.comps[0]({0.1, 0}) == doctest::Approx(-std::log(3.0)));
    auto p = unstable_multipotential(parse_system("cantor:3,3|5,5"));
    CHECK(p.comps[0]({0.9, 0}) == doctest::Approx(-std::log(3.0)));
    CHECK(p.comps[1]({0.1, 0}) == doctest::Approx(-std::log(5.0)));
    auto mixed = unstable_multipotential(parse_system("cantor:3,5"));
    CHECK(mixed.comps[0]({0.1, 0}) == doctest::Approx(-std::log(3.0)));
    CHECK(mixed.comps[0]({0.9, 0}) == doctest::Approx(-std::log(5.0)));
    CHECK(unstable_multipotential(parse_system("diag:3,3|2,2")).comps[0]({0.2, 0.2}) == doctest::Approx(-std::log(3.0)));
    CHECK_THROWS_AS(unstable_multipotential(parse_system("diag:2,3|3,2")), std::invalid_argument);
}

TEST_CASE("single-map Bowen roots match the full-shift oracle") {
    for (const auto& [spec, slopes] : std::vector<std::pair<const char*, std::vector<double>>>{
             {"cantor:3,3", {3, 3}}, {"cantor:5,5", {5, 5}}, {"cantor:4,4", {4, 4}}, {"cantor:6,6", {6, 6}},
             {"cantor:4,4,4", {4, 4, 4}}}) {
        auto r = bowen_root(parse_system(spec), 6, 0.125);
        INFO(spec);
        CHECK(std::fabs(r.t_uA - moran_root(slopes)) <= 0.02);
        REQUIRE(r.per_map_roots.size() == 1);
        CHECK(std::fabs(r.per_map_roots[0] - moran_root(slopes)) <= 0.02);
        CHECK(r.monotone);
        CHECK(r.hi - r.lo <= 1e-3 + 1e-12);
    }
    CHECK(std::fabs(moran_root({3, 3}) - std::log(2.0) / std::log(3.0)) < 1e-12);
}

TEST_CASE("mixed slopes: Moran equation root") {
    auto r = bowen_root(parse_system("cantor:3,5"), 6, 0.125);
    CHECK(std::fabs(r.t_uA - moran_root({3, 5})) <= 0.02);
}

TEST_CASE("scaling slopes moves the root as log k / log(a s)") {
    for (double s : {1.0, 2.0, 3.0}) {
        const int a = static_cast<int>(3 * s);
        auto sys = expanding_interval_system({{double(a), double(a)}});
        auto r = bowen_root(sys, 6, 0.125);
        CHECK(std::fabs(r.t_uA - std::log(2.0) / std::log(3.0 * s)) <= 0.02);
    }
}

TEST_CASE("two-map Cantor pair: amalgamated root below every single-map root") {
    auto r = bowen_root(parse_system("cantor:3,3|5,5"), 6, 0.125);
    REQUIRE(r.per_map_roots.size() == 2);
    CHECK(std::fabs(r.per_map_roots[0] - std::log(2.0) / std::log(3.0)) <= 0.02);
    CHECK(std::fabs(r.per_map_roots[1] - std::log(2.0) / std::log(5.0)) <= 0.02);
    CHECK(r.t_uA <= std::min(r.per_map_roots[0], r.per_map_roots[1]) + 0.02);
}

TEST_CASE("pressure increment decreases in t") {
    auto s = parse_system("cantor:3,3");
    auto phi = unstable_multipotential(s);
    EstimateOptions opt;
    const auto kind = PressureKind::trajectory(TrajectoryRule::constant(0));
    double prev = 1e300;
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        double v = pressure_increment(s, phi.scaled(t), kind, 6, 0.125, opt);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(pressure_increment(s, phi.scaled(0.0), kind, 6, 0.125, opt) == doctest::Approx(std::log(2.0)).epsilon(0.02));
    CHECK_THROWS(pressure_increment(s, phi, kind, 1, 0.125, opt));
}

TEST_CASE("root bracket handling") {
    auto s = parse_system("cantor:3,3");
    auto phi = unstable_multipotential(s);
    const auto kind = PressureKind::trajectory(TrajectoryRule::constant(0));
    RootOptions narrow{0.0, 0.4, 1e-3};
    auto r = pressure_root(s, phi, kind, 6, 0.125, {}, narrow);
    CHECK(std::fabs(r.root - std::log(2.0) / std::log(3.0)) <= 0.02);
    RootOptions hopeless{0.9, 0.95, 1e-3};
    CHECK_THROWS_AS(pressure_root(s, phi, kind, 6, 0.125, {}, hopeless), std::runtime_error);
}

TEST_CASE("single generator subsystem") {
    auto s = parse_system("cantor:3,3|5,5");
    auto one = single_generator(s, 1);
    CHECK(one.m() == 1);
    CHECK(one.max_expansion() == doctest::Approx(5.0));
    CHECK_THROWS(single_generator(s, 2));
}
