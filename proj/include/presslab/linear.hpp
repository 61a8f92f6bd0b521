#pragma once

#include <array>
#include <vector>

#include "presslab/core.hpp"

namespace presslab {

using Vec2 = std::array<double, 2>;

// Open convex ball {v : |r . v| < eps for every row r} of a linear toral system
// (dimension 1 or 2), centred at the origin.
struct ConvexBall {
    int dim = 2;
    double eps = 0.0;
    std::vector<Vec2> rows;
    std::vector<Vec2> vertices;  // dim 2 only, counter-clockwise
    double area = 0.0;           // length when dim == 1

    bool contains(const Vec2& v) const;
};

// Largest eps for which Bowen balls of the linear system are exactly these convex sets.
double exact_radius_limit(const System& sys);

ConvexBall bowen_convex_ball(const System& sys, const Word& word, double eps);
// Intersection over all words of length n (enumerates m^n words; capped).
ConvexBall condensed_convex_ball(const System& sys, int n, double eps);

// log of an upper bound on the number of translates needed to cover the torus.
double log_cover_count_upper(const ConvexBall& k);

// Axis count for open intervals of half-length h covering the circle.
double axis_cover_count(double h);

// Area of a union of origin-centred boxes given by half-sides (hx, hy).
double union_of_centered_boxes_area(std::vector<std::array<double, 2>> boxes);

}  // namespace presslab
