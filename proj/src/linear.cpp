#include "presslab/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace presslab {

namespace {

using Mat = std::array<double, 4>;  // row-major 2x2

Mat to_mat(const Mat2& m) { return {double(m.a), double(m.b), double(m.c), double(m.d)}; }

Mat mul(const Mat& l, const Mat& r) {
    return {l[0] * r[0] + l[1] * r[2], l[0] * r[1] + l[1] * r[3], l[2] * r[0] + l[3] * r[2], l[2] * r[1] + l[3] * r[3]};
}

double cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

// Keep the part of the polygon with r . v <= h.
std::vector<Vec2> clip(const std::vector<Vec2>& poly, const Vec2& r, double h) {
    std::vector<Vec2> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        double gp = h - (r[0] * p[0] + r[1] * p[1]);
        double gq = h - (r[0] * q[0] + r[1] * q[1]);
        if (gp >= 0) out.push_back(p);
        if ((gp >= 0) != (gq >= 0)) {
            double t = gp / (gp - gq);
            out.push_back({p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])});
        }
    }
    return out;
}

double shoelace(const std::vector<Vec2>& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
    return std::fabs(a) / 2.0;
}

void add_row(std::vector<Vec2>& rows, std::set<std::pair<double, double>>& seen, Vec2 r) {
    // r and -r describe the same strip.
    if (r[0] < 0 || (r[0] == 0 && r[1] < 0)) r = {-r[0], -r[1]};
    if (seen.insert({r[0], r[1]}).second) rows.push_back(r);
}

ConvexBall finish(int dim, double eps, std::vector<Vec2> rows) {
    ConvexBall k;
    k.dim = dim;
    k.eps = eps;
    k.rows = std::move(rows);
    if (dim == 1) {
        double mx = 0.0;
        for (const auto& r : k.rows) mx = std::max(mx, std::fabs(r[0]));
        k.area = 2.0 * eps / mx;
        return k;
    }
    std::vector<Vec2> poly{{-eps, -eps}, {eps, -eps}, {eps, eps}, {-eps, eps}};
    for (const auto& r : k.rows) {
        poly = clip(poly, r, eps);
        poly = clip(poly, {-r[0], -r[1]}, eps);
        if (poly.size() < 3) throw std::runtime_error("degenerate Bowen polygon");
    }
    k.vertices = poly;
    k.area = shoelace(poly);
    return k;
}

double circle_count(double h) { return axis_cover_count(h); }

bool cell_fits(const ConvexBall& k, const Vec2& u, const Vec2& w) {
    const Vec2 c1{(u[0] + w[0]) / 2, (u[1] + w[1]) / 2};
    const Vec2 c2{(u[0] - w[0]) / 2, (u[1] - w[1]) / 2};
    return k.contains(c1) && k.contains(c2) && k.contains({-c1[0], -c1[1]}) && k.contains({-c2[0], -c2[1]});
}

}  // namespace

bool ConvexBall::contains(const Vec2& v) const {
    for (const auto& r : rows)
        if (!(std::fabs(r[0] * v[0] + r[1] * v[1]) < eps)) return false;
    if (dim == 2) return std::fabs(v[0]) < eps && std::fabs(v[1]) < eps;
    return std::fabs(v[0]) < eps;
}

double exact_radius_limit(const System& sys) {
    if (!sys.linear()) throw std::invalid_argument("exact convex balls need a linear system");
    return 1.0 / (sys.max_expansion() + 1.0);
}

double axis_cover_count(double h) {
    if (h > 0.5) return 1.0;
    return std::floor((1.0 / (2.0 * h)) * (1.0 + 1e-12)) + 1.0;
}

ConvexBall bowen_convex_ball(const System& sys, const Word& word, double eps) {
    if (!sys.linear()) throw std::invalid_argument("exact convex balls need a linear system");
    validate_word(word, sys.m());
    std::vector<Vec2> rows;
    std::set<std::pair<double, double>> seen;
    Mat P{1, 0, 0, 1};
    add_row(rows, seen, {1, 0});
    if (sys.dim() == 2) add_row(rows, seen, {0, 1});
    for (int s : word) {
        P = mul(to_mat(sys.matrices()[s]), P);
        add_row(rows, seen, {P[0], P[1]});
        if (sys.dim() == 2) add_row(rows, seen, {P[2], P[3]});
    }
    return finish(sys.dim(), eps, std::move(rows));
}

ConvexBall condensed_convex_ball(const System& sys, int n, double eps) {
    if (!sys.linear()) throw std::invalid_argument("exact convex balls need a linear system");
    if (word_count(sys.m(), n) > kWordCap) throw DepthTooLarge("depth too large: m^n exceeds the enumeration cap");
    std::vector<Vec2> rows;
    std::set<std::pair<double, double>> seen;
    std::vector<Mat> level{{1, 0, 0, 1}};
    add_row(rows, seen, {1, 0});
    if (sys.dim() == 2) add_row(rows, seen, {0, 1});
    for (int k = 0; k < n; ++k) {
        std::vector<Mat> next;
        std::set<Mat> uniq;
        for (const auto& P : level)
            for (const auto& M : sys.matrices()) {
                Mat Q = mul(to_mat(M), P);
                if (uniq.insert(Q).second) next.push_back(Q);
            }
        for (const auto& Q : next) {
            add_row(rows, seen, {Q[0], Q[1]});
            if (sys.dim() == 2) add_row(rows, seen, {Q[2], Q[3]});
        }
        level = std::move(next);
    }
    return finish(sys.dim(), eps, std::move(rows));
}

double log_cover_count_upper(const ConvexBall& k) {
    if (k.dim == 1) return std::log(circle_count(k.area / 2.0));
    const auto& V = k.vertices;
    double best_area = -1.0;
    Vec2 bv{}, bw{};
    for (std::size_t i = 0; i < V.size(); ++i)
        for (std::size_t j = i + 1; j < V.size(); ++j) {
            double a = 2.0 * std::fabs(cross(V[i], V[j]));
            if (a > best_area) {
                best_area = a;
                bv = V[i];
                bw = V[j];
            }
        }
    if (!(best_area > 0.0)) throw std::runtime_error("degenerate inscribed parallelogram");

    const Vec2 e1{bw[0] - bv[0], bw[1] - bv[1]};
    const Vec2 e2{-(bv[0] + bw[0]), -(bv[1] + bw[1])};
    const double det = e1[0] * e2[1] - e2[0] * e1[1];
    // B = [e1 e2] as columns; Binv = B^{-1}.
    const Mat binv{e2[1] / det, -e2[0] / det, -e1[1] / det, e1[0] / det};

    double best = std::numeric_limits<double>::infinity();
    for (double s : {1.0, 1.0 + 1e-7, 1.0 + 1e-3, 1.01}) {
        for (int mask = 0; mask < 16; ++mask) {
            std::array<double, 4> M;
            for (int e = 0; e < 4; ++e) M[e] = (mask >> e & 1) ? std::ceil(binv[e] * s) : std::floor(binv[e] * s);
            const double dm = M[0] * M[3] - M[1] * M[2];
            if (dm == 0.0 || std::fabs(dm) >= best) continue;
            // Columns of M^{-1} generate a lattice containing Z^2 of index |det M|.
            const Vec2 b1{M[3] / dm, -M[2] / dm};
            const Vec2 b2{-M[1] / dm, M[0] / dm};
            const Vec2 s12{b1[0] + b2[0], b1[1] + b2[1]};
            const Vec2 d12{b1[0] - b2[0], b1[1] - b2[1]};
            if (cell_fits(k, b1, b2) || cell_fits(k, s12, b2) || cell_fits(k, b1, s12) || cell_fits(k, d12, b2) ||
                cell_fits(k, b1, {-d12[0], -d12[1]}))
                best = std::fabs(dm);
        }
    }

    // Minkowski fallback: tiles of a slightly shrunk parallelogram meeting a unit fundamental domain.
    const double shrink = 1.0 - 1e-6;
    const Vec2 q1{2 * shrink * e1[0], 2 * shrink * e1[1]};
    const Vec2 q2{2 * shrink * e2[0], 2 * shrink * e2[1]};
    const double tile = std::fabs(det) * shrink * shrink;
    const double qarea = std::fabs(cross(q1, q2));
    auto mixed = [&](const Vec2& d1, const Vec2& d2) {
        return std::fabs(cross(d1, q1)) + std::fabs(cross(d1, q2)) + std::fabs(cross(d2, q1)) + std::fabs(cross(d2, q2));
    };
    std::vector<double> us{0.0};
    for (const auto& q : {q1, q2}) {
        if (q[1] != 0.0) us.push_back(q[0] / q[1]);
        if (q[0] != 0.0) us.push_back(q[1] / q[0]);
    }
    for (double u : us) {
        double a1 = 1.0 + qarea + mixed({1, 0}, {u, 1});
        double a2 = 1.0 + qarea + mixed({0, 1}, {1, u});
        best = std::min(best, std::floor(std::min(a1, a2) / tile));
    }
    return std::log(std::max(best, 1.0));
}

double union_of_centered_boxes_area(std::vector<std::array<double, 2>> boxes) {
    if (boxes.empty()) return 0.0;
    std::sort(boxes.begin(), boxes.end(), [](const auto& a, const auto& b) { return a[0] > b[0]; });
    double area = 0.0, ymax = 0.0;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        ymax = std::max(ymax, boxes[i][1]);
        double next = i + 1 < boxes.size() ? boxes[i + 1][0] : 0.0;
        area += 4.0 * (boxes[i][0] - next) * ymax;
    }
    return area;
}

}  // namespace presslab
