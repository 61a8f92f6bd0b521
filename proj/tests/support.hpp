#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "presslab/core.hpp"
#include "presslab/systems.hpp"

namespace testsupport {

using presslab::Point;
using presslab::System;
using presslab::Word;

// Small deterministic generators for property tests.
struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double uniform(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(rng); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

    Word word(int m, int n) {
        Word w(n);
        for (auto& s : w) s = integer(0, m - 1);
        return w;
    }

    Point point(const System& sys) {
        if (sys.dim() == 1) return {uniform(), 0.0};
        return {uniform(), uniform()};
    }

    // A point whose orbits stay defined for n steps (interval systems need the core).
    Point core_point(const System& sys, int n);

    Point near(const System& sys, const Point& c, double r) {
        Point p{c.x + uniform(-r, r), sys.dim() == 2 ? c.y + uniform(-r, r) : 0.0};
        if (sys.domain() == presslab::Domain::Torus) {
            p.x = presslab::frac(p.x);
            if (sys.dim() == 2) p.y = presslab::frac(p.y);
        } else {
            p.x = std::min(1.0, std::max(0.0, p.x));
        }
        return p;
    }
};

std::vector<presslab::ZooEntry> zoo();

}  // namespace testsupport
