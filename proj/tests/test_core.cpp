#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "presslab/core.hpp"
#include "presslab/systems.hpp"
#include "support.hpp"

using namespace presslab;
using testsupport::Gen;

namespace {

System doubling() { return parse_system("circle:2"); }

MultiPotential coordinate(int m) {
    MultiPotential p = MultiPotential::zero(m);
    for (auto& c : p.comps) c.coord = 1.0;
    return p;
}

BallSpec traj(const Word& w, Point c, double eps) { return {BallKind::Trajectory, w, static_cast<int>(w.size()), c, eps}; }
BallSpec condensed(int n, Point c, double eps) { return {BallKind::Condensed, {}, n, c, eps}; }
BallSpec exhaustive(int n, Point c, double eps) { return {BallKind::Exhaustive, {}, n, c, eps}; }

}  // namespace

TEST_CASE("orbit applies the first symbol first") {
    auto o = orbit(doubling(), {0.3, 0}, {0, 0});
    REQUIRE(o.size() == 3);
    CHECK(o[0].x == doctest::Approx(0.3));
    CHECK(o[1].x == doctest::Approx(0.6));
    CHECK(o[2].x == doctest::Approx(0.2));

    auto d = parse_system("diag:2,3|3,2");
    auto p = orbit(d, {0.4, 0.9}, {0});
    CHECK(p[1].x == doctest::Approx(0.8));
    CHECK(p[1].y == doctest::Approx(0.7));

    // Word (1,2): apply A(2,3) then A(3,2).
    auto q = orbit(d, {0.1, 0.1}, {0, 1});
    CHECK(q[2].x == doctest::Approx(0.6));
    CHECK(q[2].y == doctest::Approx(0.6));
}

TEST_CASE("single-symbol word gives one application") {
    auto o = orbit(doubling(), {0.45, 0}, {0});
    CHECK(o.size() == 2);
    CHECK(o[1].x == doctest::Approx(0.9));
}

TEST_CASE("consecutive sums") {
    auto d = parse_system("diag:2,3|3,2");
    CHECK(consecutive_sum(d, MultiPotential::zero(2), {0.2, 0.7}, {0, 1, 1}) == 0.0);
    CHECK(consecutive_sum(d, MultiPotential::constant({0.5, -1.25}), {0.2, 0.7}, {0, 1}) == doctest::Approx(-0.75));
    CHECK(consecutive_sum(doubling(), coordinate(1), {0.3, 0}, {0, 0}) == doctest::Approx(0.9));
}

TEST_CASE("ball membership examples on the doubling map") {
    auto s = doubling();
    CHECK(ball_contains(s, traj({0}, {0.3, 0}, 0.1), {0.34, 0}));
    CHECK_FALSE(ball_contains(s, traj({0}, {0.3, 0}, 0.1), {0.36, 0}));
    CHECK(dn_distance(s, {0.3, 0}, {0.34, 0}, {0}) == doctest::Approx(0.08));
    CHECK(dn_distance(s, {0.3, 0}, {0.3, 0}, {0, 0, 0}) == 0.0);
}

TEST_CASE("membership is strict at the radius") {
    auto s = doubling();
    // d(0.25, 0.5) = 0.25 exactly
    CHECK_FALSE(ball_contains(s, traj({0}, {0.25, 0}, 0.25), {0.5, 0}));
}

TEST_CASE("centre lies in every ball") {
    Gen g(11);
    for (const auto& z : testsupport::zoo()) {
        for (int t = 0; t < 20; ++t) {
            int n = g.integer(1, 4);
            Point c = g.core_point(z.system, n);
            CHECK(ball_contains(z.system, traj(g.word(z.system.m(), n), c, 0.05), c));
            CHECK(ball_contains(z.system, condensed(n, c, 0.05), c));
            CHECK(ball_contains(z.system, exhaustive(n, c, 0.05), c));
        }
    }
}

TEST_CASE("condensed implies every trajectory implies exhaustive") {
    Gen g(12);
    long condensed_hits = 0, exhaustive_hits = 0;
    for (const auto& z : testsupport::zoo()) {
        const System& s = z.system;
        for (int t = 0; t < 300; ++t) {
            int n = g.integer(1, 4);
            double eps = g.uniform(0.02, 0.3);
            Point c = g.core_point(s, n);
            Point p = g.near(s, c, eps);
            bool in_c = ball_contains(s, condensed(n, c, eps), p);
            bool in_e = ball_contains(s, exhaustive(n, c, eps), p);
            bool all = true, any = false;
            for (const auto& w : all_words(s.m(), n)) {
                bool in = ball_contains(s, traj(w, c, eps), p);
                all = all && in;
                any = any || in;
            }
            CHECK(in_c == all);
            CHECK(in_e == any);
            if (in_c) CHECK(in_e);
            condensed_hits += in_c;
            exhaustive_hits += in_e;
        }
    }
    CHECK(condensed_hits > 0);
    CHECK(exhaustive_hits > condensed_hits);
}

TEST_CASE("depth and radius monotonicity") {
    Gen g(13);
    for (const auto& z : testsupport::zoo()) {
        const System& s = z.system;
        for (int t = 0; t < 200; ++t) {
            int n = g.integer(1, 4);
            double eps = g.uniform(0.02, 0.3);
            Point c = g.core_point(s, n + 1);
            Point p = g.near(s, c, eps);
            Word w = g.word(s.m(), n + 1);
            Word v(w.begin(), w.begin() + n);
            if (ball_contains(s, traj(w, c, eps), p)) CHECK(ball_contains(s, traj(v, c, eps), p));
            if (ball_contains(s, condensed(n + 1, c, eps), p)) CHECK(ball_contains(s, condensed(n, c, eps), p));
            if (ball_contains(s, exhaustive(n + 1, c, eps), p)) CHECK(ball_contains(s, exhaustive(n, c, eps), p));
            double smaller = eps * g.uniform(0.1, 1.0);
            if (ball_contains(s, traj(v, c, smaller), p)) CHECK(ball_contains(s, traj(v, c, eps), p));
            if (ball_contains(s, exhaustive(n, c, smaller), p)) CHECK(ball_contains(s, exhaustive(n, c, eps), p));
        }
    }
}

TEST_CASE("concatenation additivity of consecutive sums") {
    Gen g(14);
    for (const auto& z : testsupport::zoo()) {
        const System& s = z.system;
        MultiPotential phi = random_potential(s.m(), s.dim(), 99, 1.0);
        for (auto& c : phi.comps) c.coord = 0.3;
        for (int t = 0; t < 200; ++t) {
            int a = g.integer(1, 5), b = g.integer(1, 5);
            Point x = g.core_point(s, a + b);
            Word u = g.word(s.m(), a), v = g.word(s.m(), b);
            Word uv = u;
            uv.insert(uv.end(), v.begin(), v.end());
            Point fx = orbit(s, x, u).back();
            double lhs = consecutive_sum(s, phi, x, uv);
            double rhs = consecutive_sum(s, phi, x, u) + consecutive_sum(s, phi, fx, v);
            CHECK(std::fabs(lhs - rhs) <= 1e-12);
        }
    }
}

TEST_CASE("Bowen distance is a metric for each word") {
    Gen g(15);
    for (const auto& z : testsupport::zoo()) {
        const System& s = z.system;
        for (int t = 0; t < 200; ++t) {
            int n = g.integer(1, 4);
            Word w = g.word(s.m(), n);
            Point a = g.core_point(s, n), b = g.core_point(s, n), c = g.core_point(s, n);
            double ab = dn_distance(s, a, b, w), bc = dn_distance(s, b, c, w), ac = dn_distance(s, a, c, w);
            CHECK(ab == doctest::Approx(dn_distance(s, b, a, w)));
            CHECK(ab >= 0.0);
            CHECK(ab >= s.distance(a, b));
            CHECK(ac <= ab + bc + 1e-12);
        }
    }
}

TEST_CASE("condensed and exhaustive balls are capped") {
    auto d = parse_system("diag:2,3|3,2");
    CHECK_THROWS_AS(ball_contains(d, condensed(13, {0.1, 0.1}, 0.1), {0.1, 0.1}), DepthTooLarge);
    CHECK_NOTHROW(ball_contains(d, condensed(12, {0.1, 0.1}, 0.1), {0.1, 0.1}));
}

TEST_CASE("words are validated") {
    CHECK_THROWS(validate_word({}, 2));
    CHECK_THROWS(validate_word({2}, 2));
    CHECK_THROWS(validate_word({-1}, 2));
    CHECK_NOTHROW(validate_word({0, 1, 1}, 2));
    CHECK(word_to_string({0, 1, 1}) == "1,2,2");
    CHECK(word_count(2, 12) == 4096);
    CHECK(all_words(2, 3).size() == 8);
    CHECK(word_from_index(5, 2, 3) == Word{1, 0, 1});
}

TEST_CASE("vitali extraction: trivial families") {
    auto s = doubling();
    Word w{0, 0, 0, 0, 0, 0};
    BallSpec a = traj({0, 0}, {0.3, 0}, 0.05);
    CHECK(vitali_disjointify(s, {a}).size() == 1);
    BallSpec b = traj({0, 0, 0}, {0.8, 0}, 0.05);
    CHECK(vitali_disjointify(s, {a, b}).size() == 2);
}

TEST_CASE("vitali extraction: overlapping balls, dropped one inside the 3 eps enlargement") {
    auto s = doubling();
    const double eps = 0.1;
    BallSpec shallow = traj({0, 0}, {0.3, 0}, eps);
    BallSpec deep = traj({0, 0, 0, 0}, {0.31, 0}, eps);
    auto kept = vitali_disjointify(s, {deep, shallow});
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].word.size() == 2);
    BallSpec big = kept[0];
    big.eps = 3 * eps;
    Gen g(16);
    int inside = 0;
    for (int t = 0; t < 1000; ++t) {
        Point p = g.near(s, deep.center, eps);
        if (!ball_contains(s, deep, p)) continue;
        ++inside;
        CHECK(ball_contains(s, big, p));
    }
    CHECK(inside > 0);
}

TEST_CASE("vitali extraction: random families along one trajectory") {
    Gen g(17);
    for (const auto& z : testsupport::zoo()) {
        const System& s = z.system;
        Word omega = g.word(s.m(), 6);
        const double eps = 0.04;
        for (int rep = 0; rep < 5; ++rep) {
            std::vector<BallSpec> balls;
            for (int k = 0; k < 25; ++k) {
                int n = g.integer(1, 6);
                balls.push_back(traj(Word(omega.begin(), omega.begin() + n), g.core_point(s, 6), eps));
            }
            auto kept = vitali_disjointify(s, balls);
            for (std::size_t i = 0; i < kept.size(); ++i)
                for (std::size_t j = i + 1; j < kept.size(); ++j) {
                    const Word& shorter = kept[i].word.size() <= kept[j].word.size() ? kept[i].word : kept[j].word;
                    CHECK(dn_distance(s, kept[i].center, kept[j].center, shorter) >= 2 * eps);
                }
            for (int t = 0; t < 300; ++t) {
                const BallSpec& b = balls[g.integer(0, static_cast<int>(balls.size()) - 1)];
                Point p = g.near(s, b.center, eps);
                if (!ball_contains(s, b, p)) continue;
                bool covered = false;
                for (auto k : kept) {
                    k.eps = 3 * eps;
                    covered = covered || ball_contains(s, k, p);
                }
                CHECK(covered);
            }
        }
    }
}

TEST_CASE("vitali extraction rejects mixed trajectories") {
    auto s = parse_system("circle:2|3");
    CHECK_THROWS_AS(vitali_disjointify(s, {traj({0, 0}, {0.1, 0}, 0.1), traj({1, 0}, {0.5, 0}, 0.1)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(vitali_disjointify(s, {traj({0}, {0.1, 0}, 0.1), traj({0, 1}, {0.5, 0}, 0.2)}),
                    std::invalid_argument);
}

TEST_CASE("torus metric is symmetric, zero on the diagonal and a max of circle distances") {
    Gen g(18);
    auto s = parse_system("diag:2,3|3,2");
    for (int t = 0; t < 500; ++t) {
        Point a = g.point(s), b = g.point(s);
        CHECK(s.distance(a, b) == s.distance(b, a));
        CHECK(s.distance(a, a) == 0.0);
        CHECK(s.distance(a, b) <= 0.5);
        CHECK(s.distance(a, b) == std::max(circle_distance(a.x, b.x), circle_distance(a.y, b.y)));
    }
}

TEST_CASE("generators map the domain into itself") {
    Gen g(19);
    for (const auto& z : testsupport::zoo()) {
        const System& s = z.system;
        for (int t = 0; t < 200; ++t) {
            Point p = g.core_point(s, 1);
            for (int j = 0; j < s.m(); ++j) {
                auto q = s.apply(j, p);
                REQUIRE(q.has_value());
                CHECK(s.in_domain(*q));
            }
        }
    }
}

TEST_CASE("potentials respect their sup bound") {
    Gen g(20);
    for (const auto& z : testsupport::zoo()) {
        MultiPotential phi = random_potential(z.system.m(), z.system.dim(), 5, 0.7);
        for (int t = 0; t < 200; ++t) {
            Point p = g.point(z.system);
            for (const auto& c : phi.comps) CHECK(std::fabs(c(p)) <= phi.sup_bound() + 1e-12);
        }
    }
}
