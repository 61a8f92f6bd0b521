#include "presslab/localent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "presslab/linear.hpp"
#include "presslab/pressure.hpp"
#include "presslab/systems.hpp"
#include "presslab/util.hpp"

namespace presslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

long wrap(long i, long k) {
    long r = i % k;
    return r < 0 ? r + k : r;
}

}  // namespace

double MeasureModel::total_mass() const {
    if (kind == Kind::EmpiricalSample) {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
    if (uniform) return 1.0;
    double s = 0.0;
    for (double v : mass) s += v;
    return s;
}

double MeasureModel::cell_mass(long i, long j) const {
    if (uniform) return dim == 1 ? 1.0 / double(cells) : 1.0 / (double(cells) * double(cells));
    return mass[i + cells * (dim == 2 ? j : 0)];
}

void MeasureModel::validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("measure dimension must be 1 or 2");
    if (kind == Kind::EmpiricalSample) {
        if (points.empty() || points.size() != weights.size()) throw std::invalid_argument("sample needs weighted points");
        for (double w : weights)
            if (!(w >= 0.0)) throw std::invalid_argument("negative sample weight");
    } else {
        if (cells < 1) throw std::invalid_argument("grid needs at least one cell");
        if (!uniform) {
            const long need = dim == 1 ? cells : cells * cells;
            if (static_cast<long>(mass.size()) != need) throw std::invalid_argument("grid mass has the wrong size");
            for (double w : mass)
                if (!(w >= 0.0)) throw std::invalid_argument("negative cell mass");
        }
    }
    if (std::fabs(total_mass() - 1.0) > 1e-9) throw std::invalid_argument("measure must have total mass 1");
}

MeasureModel MeasureModel::lebesgue(int dim, long cells) {
    MeasureModel m;
    m.kind = Kind::GridDensity;
    m.dim = dim;
    m.cells = cells;
    m.uniform = true;
    m.validate();
    return m;
}

MeasureModel MeasureModel::grid(int dim, long cells, std::vector<double> masses) {
    MeasureModel m;
    m.kind = Kind::GridDensity;
    m.dim = dim;
    m.cells = cells;
    m.mass = std::move(masses);
    m.validate();
    return m;
}

MeasureModel MeasureModel::dirac(const Point& p) { return sample({p}, {1.0}); }

MeasureModel MeasureModel::sample(std::vector<Point> pts, std::vector<double> w) {
    MeasureModel m;
    m.kind = Kind::EmpiricalSample;
    m.dim = 2;
    m.points = std::move(pts);
    m.weights = std::move(w);
    m.validate();
    return m;
}

MeasureModel MeasureModel::from_csv(const std::string& text, int dim) {
    std::vector<std::pair<long, double>> rows;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    long top = -1;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto f = split(line, ',');
        if (f.size() != 2) throw std::invalid_argument("measure csv line " + std::to_string(lineno) + ": expected cell-index,mass");
        long idx;
        double w;
        try {
            idx = parse_long(trim(f[0]));
            w = parse_double(trim(f[1]));
        } catch (const std::exception&) {
            if (rows.empty() && lineno == 1) continue;  // header
            throw std::invalid_argument("measure csv line " + std::to_string(lineno) + ": bad number");
        }
        if (idx < 0) throw std::invalid_argument("measure csv line " + std::to_string(lineno) + ": negative index");
        rows.push_back({idx, w});
        top = std::max(top, idx);
    }
    if (rows.empty()) throw std::invalid_argument("measure csv has no rows");
    long k = 1;
    while ((dim == 1 ? k : k * k) <= top) ++k;
    std::vector<double> mass(dim == 1 ? k : k * k, 0.0);
    for (auto [i, w] : rows) mass[i] += w;
    return grid(dim, k, std::move(mass));
}

void ProductMeasureModel::validate(int m) const {
    if (static_cast<int>(symbol_weights.size()) != m) throw std::invalid_argument("symbol weights need one entry per generator");
    double s = 0.0;
    for (double p : symbol_weights) {
        if (!(p >= 0.0)) throw std::invalid_argument("negative symbol weight");
        s += p;
    }
    if (std::fabs(s - 1.0) > 1e-9) throw std::invalid_argument("symbol weights must sum to 1");
    base.validate();
}

ProductMeasureModel parse_measure(const std::string& raw, int dim, int m, long cells) {
    std::string s = trim(raw);
    ProductMeasureModel out;
    out.symbol_weights.assign(m, 1.0 / m);
    const std::string bern = "bernoulli:";
    if (s.rfind(bern, 0) == 0) {
        std::size_t cut = std::string::npos, skip = 1;
        for (std::size_t i = bern.size(); i < s.size(); ++i) {
            if (s[i] == '*' || s[i] == 'x') {
                cut = i;
                break;
            }
            if (s.compare(i, 2, "\xC3\x97") == 0) {
                cut = i;
                skip = 2;
                break;
            }
        }
        if (cut == std::string::npos) throw std::invalid_argument("bernoulli measure needs a base: bernoulli:p1,...,pm x lebesgue");
        out.symbol_weights.clear();
        for (const auto& t : split(trim(s.substr(bern.size(), cut - bern.size())), ','))
            out.symbol_weights.push_back(parse_double(trim(t)));
        s = trim(s.substr(cut + skip));
    }
    if (s == "lebesgue") {
        out.base = MeasureModel::lebesgue(dim, cells);
    } else if (s.rfind("dirac:", 0) == 0) {
        auto f = split(s.substr(6), ',');
        if (f.empty() || f.size() > 2) throw std::invalid_argument("dirac needs x or x,y");
        Point p{parse_double(trim(f[0])), f.size() == 2 ? parse_double(trim(f[1])) : 0.0};
        out.base = MeasureModel::dirac(p);
    } else if (s.rfind("csv:", 0) == 0) {
        std::ifstream in(s.substr(4));
        if (!in) throw std::invalid_argument("cannot open measure file '" + s.substr(4) + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        out.base = MeasureModel::from_csv(buf.str(), dim);
    } else {
        throw std::invalid_argument("unknown measure '" + s + "'");
    }
    out.validate(m);
    return out;
}

namespace {

struct RowSum {
    double mass = 0.0;
    long count = 0;
};

// Integer cell range [first, last] whose centres lie strictly inside (x + lo, x + hi).
std::pair<long, long> cell_range(double x, double lo, double hi, long k) {
    const long first = static_cast<long>(std::floor(k * (x + lo) - 0.5)) + 1;
    const long last = static_cast<long>(std::ceil(k * (x + hi) - 0.5)) - 1;
    return {first, last};
}

bool row_interval(const ConvexBall& b, double dy, double& lo, double& hi) {
    lo = -b.eps;
    hi = b.eps;
    for (const auto& r : b.rows) {
        if (r[0] == 0.0) {
            if (!(std::fabs(r[1] * dy) < b.eps)) return false;
            continue;
        }
        double a = (-b.eps - r[1] * dy) / r[0];
        double c = (b.eps - r[1] * dy) / r[0];
        if (a > c) std::swap(a, c);
        lo = std::max(lo, a);
        hi = std::min(hi, c);
    }
    return lo < hi;
}

RowSum sum_ranges(const MeasureModel& mu, std::vector<std::pair<long, long>> ranges, long j, bool wraps) {
    std::sort(ranges.begin(), ranges.end());
    RowSum s;
    long cur_first = 0, cur_last = -1;
    bool open = false;
    auto flush = [&] {
        if (!open) return;
        for (long i = cur_first; i <= cur_last; ++i) {
            long ii = wraps ? wrap(i, mu.cells) : i;
            if (ii < 0 || ii >= mu.cells) continue;
            ++s.count;
            if (!mu.uniform) s.mass += mu.cell_mass(ii, j);
        }
    };
    for (auto [a, b] : ranges) {
        if (a > b) continue;
        if (open && a <= cur_last + 1) {
            cur_last = std::max(cur_last, b);
        } else {
            flush();
            cur_first = a;
            cur_last = b;
            open = true;
        }
    }
    flush();
    return s;
}

std::vector<ConvexBall> convex_pieces(const System& sys, const BallSpec& ball) {
    switch (ball.kind) {
        case BallKind::Trajectory:
            return {bowen_convex_ball(sys, ball.word, ball.eps)};
        case BallKind::Condensed:
            return {condensed_convex_ball(sys, ball.depth, ball.eps)};
        case BallKind::Exhaustive: {
            if (word_count(sys.m(), ball.depth) > kWordCap) throw DepthTooLarge("exhaustive ball needs m^n within the cap");
            std::vector<ConvexBall> out;
            for (const auto& w : all_words(sys.m(), ball.depth)) out.push_back(bowen_convex_ball(sys, w, ball.eps));
            return out;
        }
    }
    return {};
}

// Row y-offsets of the window (a single row in dimension 1).
std::vector<long> window_rows(const MeasureModel& mu, const BallSpec& ball) {
    if (mu.dim == 1) return {0};
    auto [a, b] = cell_range(ball.center.y, -ball.eps, ball.eps, mu.cells);
    b = std::min(b, a + mu.cells - 1);  // a window wider than the torus visits each row once
    std::vector<long> rows;
    for (long j = a; j <= b; ++j) rows.push_back(j);
    return rows;
}

RowSum convex_row(const MeasureModel& mu, const BallSpec& ball, const std::vector<ConvexBall>& pieces, long j) {
    const double dy = mu.dim == 2 ? (j + 0.5) / mu.cells - ball.center.y : 0.0;
    std::vector<std::pair<long, long>> ranges;
    for (const auto& p : pieces) {
        double lo, hi;
        if (row_interval(p, dy, lo, hi)) ranges.push_back(cell_range(ball.center.x, lo, hi, mu.cells));
    }
    return sum_ranges(mu, std::move(ranges), wrap(j, mu.cells), true);
}

RowSum generic_row(const MeasureModel& mu, const System& sys, const BallSpec& ball, long j) {
    const bool wraps = sys.domain() == Domain::Torus;
    const long k = mu.cells;
    auto [a, b] = cell_range(ball.center.x, -ball.eps, ball.eps, k);
    if (wraps) b = std::min(b, a + k - 1);
    const long jj = mu.dim == 2 ? wrap(j, k) : 0;
    RowSum s;
    for (long i = a; i <= b; ++i) {
        long ii = wraps ? wrap(i, k) : i;
        if (ii < 0 || ii >= k) continue;
        Point z{(ii + 0.5) / k, mu.dim == 2 ? (jj + 0.5) / k : 0.0};
        if (!ball_contains(sys, ball, z)) continue;
        ++s.count;
        if (!mu.uniform) s.mass += mu.cell_mass(ii, jj);
    }
    return s;
}

double finish(const MeasureModel& mu, const std::vector<RowSum>& rows) {
    if (mu.uniform) {
        long c = 0;
        for (const auto& r : rows) c += r.count;
        return double(c) * mu.cell_mass(0, 0);
    }
    double s = 0.0;
    for (const auto& r : rows) s += r.mass;
    return s;
}

double ball_measure_impl(const MeasureModel& mu, const System& sys, const BallSpec& ball, bool parallel) {
    if (!(ball.eps > 0.0)) throw std::invalid_argument("radius must be positive");
    if (ball.kind == BallKind::Trajectory) validate_word(ball.word, sys.m());
    if (mu.kind == MeasureModel::Kind::EmpiricalSample) {
        double s = 0.0;
        for (std::size_t i = 0; i < mu.points.size(); ++i)
            if (sys.in_domain(mu.points[i]) && ball_contains(sys, ball, mu.points[i])) s += mu.weights[i];
        return s;
    }
    if (mu.dim != sys.dim()) throw std::invalid_argument("measure and system dimensions differ");
    if (1.0 / double(mu.cells) > ball.eps / 4.0) throw UnderResolved("grid resolution coarser than eps/4");

    const bool convex = sys.linear() && ball.eps <= exact_radius_limit(sys);
    std::vector<ConvexBall> pieces;
    if (convex) pieces = convex_pieces(sys, ball);
    const auto js = window_rows(mu, ball);
    std::vector<RowSum> rows(js.size());
    const long count = static_cast<long>(js.size());
    auto one = [&](long r) {
        rows[r] = convex ? convex_row(mu, ball, pieces, js[r]) : generic_row(mu, sys, ball, js[r]);
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long r = 0; r < count; ++r) one(r);
    } else {
        for (long r = 0; r < count; ++r) one(r);
    }
    return finish(mu, rows);
}

double rate(double mass, int n) { return mass > 0.0 ? -std::log(mass) / n : kInf; }

}  // namespace

double ball_measure(const MeasureModel& mu, const System& sys, const BallSpec& ball) {
    return ball_measure_impl(mu, sys, ball, false);
}

double ball_measure_parallel(const MeasureModel& mu, const System& sys, const BallSpec& ball) {
    return ball_measure_impl(mu, sys, ball, true);
}

std::vector<Point> sample_points(const MeasureModel& mu, const System& sys, int count, std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed, 0x5A3D));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Point> out;
    if (mu.kind == MeasureModel::Kind::EmpiricalSample) {
        std::discrete_distribution<std::size_t> pick(mu.weights.begin(), mu.weights.end());
        for (int k = 0; k < count; ++k) out.push_back(mu.points[pick(rng)]);
        return out;
    }
    const long total = mu.dim == 1 ? mu.cells : mu.cells * mu.cells;
    std::discrete_distribution<long> pick;
    if (!mu.uniform) pick = std::discrete_distribution<long>(mu.mass.begin(), mu.mass.end());
    std::uniform_int_distribution<long> any(0, total - 1);
    while (static_cast<int>(out.size()) < count) {
        long c = mu.uniform ? any(rng) : pick(rng);
        long i = c % mu.cells, j = c / mu.cells;
        Point p{(i + unit(rng)) / mu.cells, mu.dim == 2 ? (j + unit(rng)) / mu.cells : 0.0};
        if (sys.in_domain(p)) out.push_back(p);
    }
    return out;
}

LocalEntropyEstimate local_amalgamated_entropy(const MeasureModel& mu, const System& sys, const Point& x, double eps,
                                               const std::vector<int>& n_range, const LocalOptions& opt) {
    if (n_range.empty()) throw std::invalid_argument("empty depth range");
    LocalEntropyEstimate e;
    e.x = x;
    e.eps = eps;
    e.ns = n_range;
    e.h_upper_local = e.h_lower_local = e.h_exhaustive_local = kInf;
    for (int n : n_range) {
        double up = -kInf, lo = kInf;
        for (const auto& w : word_pool(sys.m(), n, opt.pool_random, opt.seed)) {
            double r = rate(ball_measure(mu, sys, {BallKind::Trajectory, w, n, x, eps}), n);
            up = std::max(up, r);
            lo = std::min(lo, r);
        }
        double ex = rate(ball_measure(mu, sys, {BallKind::Exhaustive, {}, n, x, eps}), n);
        if (std::isinf(up) || std::isinf(ex)) e.zero_mass = true;
        e.upper_seq.push_back(up);
        e.lower_seq.push_back(lo);
        e.exhaustive_seq.push_back(ex);
        e.h_upper_local = std::min(e.h_upper_local, up);
        e.h_lower_local = std::min(e.h_lower_local, lo);
        e.h_exhaustive_local = std::min(e.h_exhaustive_local, ex);
    }
    return e;
}

std::vector<LocalEntropyEstimate> local_entropies_serial(const MeasureModel& mu, const System& sys,
                                                         const std::vector<Point>& xs, double eps,
                                                         const std::vector<int>& n_range, const LocalOptions& opt) {
    std::vector<LocalEntropyEstimate> out;
    for (const auto& x : xs) out.push_back(local_amalgamated_entropy(mu, sys, x, eps, n_range, opt));
    return out;
}

std::vector<LocalEntropyEstimate> local_entropies_parallel(const MeasureModel& mu, const System& sys,
                                                           const std::vector<Point>& xs, double eps,
                                                           const std::vector<int>& n_range,
                                                           const LocalOptions& opt) {
    std::vector<LocalEntropyEstimate> out(xs.size());
    std::exception_ptr err;
    const long count = static_cast<long>(xs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < count; ++i) {
        try {
            out[i] = local_amalgamated_entropy(mu, sys, xs[i], eps, n_range, opt);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
}

double shannon_entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double q : p)
        if (q > 0.0) h -= q * std::log(q);
    return h;
}

namespace {

// Entropy of the base measure under generator j, known in closed form for Lebesgue and fixed Dirac points.
double base_entropy(const MeasureModel& base, const System& sys, int j) {
    if (!sys.linear()) throw std::invalid_argument("base entropy is known only for toral systems");
    if (base.kind == MeasureModel::Kind::GridDensity && base.uniform) return toral_entropy(sys.matrices()[j], sys.dim());
    if (base.kind == MeasureModel::Kind::EmpiricalSample && base.points.size() == 1) {
        auto q = sys.apply(j, base.points[0]);
        if (q && sys.distance(*q, base.points[0]) < 1e-12) return 0.0;
        throw std::invalid_argument("Dirac base must sit at a common fixed point");
    }
    throw std::invalid_argument("base entropy is known only for Lebesgue or fixed Dirac measures");
}

bool same_matrix(const Mat2& a, const Mat2& b) { return a.a == b.a && a.b == b.b && a.c == b.c && a.d == b.d; }

}  // namespace

MarginalReport marginal_bound_check(const ProductMeasureModel& prod, const System& sys,
                                    const std::vector<Point>& xs, double eps, const std::vector<int>& n_range,
                                    double tolerance, const LocalOptions& opt) {
    prod.validate(sys.m());
    if (!sys.linear()) throw std::invalid_argument("marginal bound needs a toral system");
    const auto& mats = sys.matrices();
    const bool all_equal =
        std::all_of(mats.begin(), mats.end(), [&](const Mat2& g) { return same_matrix(g, mats.front()); });
    const bool uniform = std::all_of(prod.symbol_weights.begin(), prod.symbol_weights.end(),
                                     [&](double p) { return std::fabs(p - 1.0 / sys.m()) < 1e-12; });
    if (!all_equal && !(uniform && sys.all_diagonal()))
        throw std::invalid_argument("non-ergodic configuration: need equal generators or uniform weights with diagonal generators");

    MarginalReport r;
    r.h_symbols = shannon_entropy(prod.symbol_weights);
    double fibre = 0.0;
    for (int j = 0; j < sys.m(); ++j) fibre += prod.symbol_weights[j] * base_entropy(prod.base, sys, j);
    r.h_product = r.h_symbols + fibre;
    r.bound = r.h_product - r.h_symbols;
    r.tolerance = tolerance;
    r.points = local_entropies_parallel(prod.base, sys, xs, eps, n_range, opt);
    for (const auto& e : r.points)
        if (e.h_exhaustive_local > e.h_lower_local + 1e-12 || e.h_lower_local > r.bound + tolerance) ++r.violations;
    r.passed = r.violations == 0;
    return r;
}

}  // namespace presslab
