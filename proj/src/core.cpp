#include "presslab/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace presslab {

Mat2 operator*(const Mat2& l, const Mat2& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
}

double frac(double v) {
    double f = v - std::floor(v);
    return f >= 1.0 ? 0.0 : f;
}

double circle_distance(double a, double b) {
    double d = std::fabs(a - b);
    d = d - std::floor(d);
    return std::min(d, 1.0 - d);
}

System System::torus(int dim, std::vector<Mat2> mats) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("torus dimension must be 1 or 2");
    if (mats.empty()) throw std::invalid_argument("system needs at least one generator");
    System s;
    s.domain_ = Domain::Torus;
    s.dim_ = dim;
    s.m_ = static_cast<int>(mats.size());
    for (auto& M : mats) {
        if (dim == 1) M = Mat2{M.a, 0, 0, 1};
        if ((dim == 1 ? M.a : M.det()) == 0) throw std::invalid_argument("generator matrix is singular");
    }
    s.mats_ = std::move(mats);
    for (int j = 0; j < s.m_; ++j) s.lmax_ = std::max(s.lmax_, s.expansion(j));
    return s;
}

System System::interval(std::vector<IntervalMap> maps) {
    if (maps.empty()) throw std::invalid_argument("system needs at least one generator");
    System s;
    s.domain_ = Domain::Interval;
    s.dim_ = 1;
    s.m_ = static_cast<int>(maps.size());
    for (auto& f : maps) {
        if (f.branches.empty()) throw std::invalid_argument("interval map without branches");
        std::sort(f.branches.begin(), f.branches.end(),
                  [](const Branch& a, const Branch& b) { return a.lo < b.lo; });
        for (std::size_t i = 0; i < f.branches.size(); ++i) {
            const Branch& b = f.branches[i];
            if (!(b.lo >= 0.0 && b.hi <= 1.0 && b.hi > b.lo)) throw std::invalid_argument("branch outside [0,1]");
            if (b.slope() <= 1.0) throw std::invalid_argument("branch slope must exceed 1");
            if (i > 0 && b.lo <= f.branches[i - 1].hi) throw std::invalid_argument("overlapping branches");
        }
    }
    s.maps_ = std::move(maps);
    for (int j = 0; j < s.m_; ++j) s.lmax_ = std::max(s.lmax_, s.expansion(j));
    return s;
}

bool System::all_diagonal() const {
    if (domain_ != Domain::Torus) return false;
    return std::all_of(mats_.begin(), mats_.end(), [](const Mat2& M) { return M.diagonal(); });
}

double System::expansion(int j) const {
    if (domain_ == Domain::Torus) {
        const Mat2& M = mats_[j];
        if (dim_ == 1) return std::fabs(static_cast<double>(M.a));
        return std::max(std::fabs(double(M.a)) + std::fabs(double(M.b)), std::fabs(double(M.c)) + std::fabs(double(M.d)));
    }
    double s = 1.0;
    for (const auto& b : maps_[j].branches) s = std::max(s, b.slope());
    return s;
}

bool System::in_domain(const Point& p) const {
    if (domain_ == Domain::Torus) {
        bool ok = p.x >= 0.0 && p.x < 1.0;
        if (dim_ == 2) ok = ok && p.y >= 0.0 && p.y < 1.0;
        return ok;
    }
    return p.x >= 0.0 && p.x <= 1.0;
}

std::optional<Point> System::apply(int j, const Point& p) const {
    if (domain_ == Domain::Torus) {
        const Mat2& M = mats_[j];
        if (dim_ == 1) return Point{frac(double(M.a) * p.x), 0.0};
        return Point{frac(double(M.a) * p.x + double(M.b) * p.y), frac(double(M.c) * p.x + double(M.d) * p.y)};
    }
    for (const auto& b : maps_[j].branches) {
        if (p.x >= b.lo && p.x <= b.hi) {
            double v = (p.x - b.lo) / (b.hi - b.lo);
            return Point{std::clamp(v, 0.0, 1.0), 0.0};
        }
    }
    return std::nullopt;
}

double System::distance(const Point& a, const Point& b) const {
    if (domain_ == Domain::Torus) {
        double d = circle_distance(a.x, b.x);
        if (dim_ == 2) d = std::max(d, circle_distance(a.y, b.y));
        return d;
    }
    return std::fabs(a.x - b.x);
}

std::optional<double> System::log_derivative(int j, const Point& p) const {
    if (domain_ == Domain::Torus) {
        const Mat2& M = mats_[j];
        if (dim_ == 1) return std::log(std::fabs(double(M.a)));
        if (M.diagonal() && std::labs(M.a) == std::labs(M.d)) return std::log(std::fabs(double(M.a)));
        return std::nullopt;
    }
    for (const auto& b : maps_[j].branches)
        if (p.x >= b.lo && p.x <= b.hi) return std::log(b.slope());
    return std::nullopt;
}

System System::permuted(const std::vector<int>& perm) const {
    if (static_cast<int>(perm.size()) != m_) throw std::invalid_argument("permutation size mismatch");
    if (domain_ == Domain::Torus) {
        std::vector<Mat2> mats;
        for (int i : perm) mats.push_back(mats_.at(i));
        return torus(dim_, mats);
    }
    std::vector<IntervalMap> maps;
    for (int i : perm) maps.push_back(maps_.at(i));
    return interval(maps);
}

std::string System::describe() const {
    std::ostringstream os;
    if (domain_ == Domain::Torus) {
        os << (dim_ == 1 ? "circle" : "torus") << "[";
        for (int j = 0; j < m_; ++j) {
            const Mat2& M = mats_[j];
            if (j) os << " | ";
            if (dim_ == 1)
                os << M.a;
            else
                os << M.a << "," << M.b << ";" << M.c << "," << M.d;
        }
        os << "]";
    } else {
        os << "interval[";
        for (int j = 0; j < m_; ++j) {
            if (j) os << " | ";
            for (std::size_t i = 0; i < maps_[j].branches.size(); ++i)
                os << (i ? "," : "") << maps_[j].branches[i].slope();
        }
        os << "]";
    }
    return os.str();
}

double Potential::operator()(const Point& p) const {
    double v = constant + coord * p.x;
    for (const auto& t : trig)
        v += t.amp * std::cos(2.0 * std::numbers::pi * (t.kx * p.x + t.ky * p.y) + t.phase);
    for (const auto& s : steps)
        if (p.x >= s.lo && p.x < s.hi) v += s.value;
    return v;
}

double Potential::sup_bound() const {
    double b = std::fabs(constant) + std::fabs(coord);
    for (const auto& t : trig) b += std::fabs(t.amp);
    double smax = 0.0;
    for (const auto& s : steps) smax = std::max(smax, std::fabs(s.value));
    return b + smax;
}

double Potential::oscillation(const System& sys, const Point& p, double r) const {
    double osc = 0.0;
    for (const auto& t : trig) osc += std::fabs(t.amp) * 2.0 * std::numbers::pi * (std::abs(t.kx) + std::abs(t.ky)) * r;
    if (coord != 0.0) {
        bool wraps = sys.domain() == Domain::Torus && (p.x - r < 0.0 || p.x + r > 1.0);
        osc += std::fabs(coord) * (wraps ? 1.0 : r);
    }
    for (const auto& s : steps) {
        bool edge = (s.lo > p.x - r && s.lo < p.x + r) || (s.hi > p.x - r && s.hi < p.x + r);
        if (edge) osc += std::fabs(s.value);
    }
    return osc;
}

bool MultiPotential::word_constant() const {
    return std::all_of(comps.begin(), comps.end(), [](const Potential& p) { return p.is_constant(); });
}

std::vector<double> MultiPotential::constants() const {
    std::vector<double> c;
    for (const auto& p : comps) c.push_back(p.constant);
    return c;
}

double MultiPotential::sup_bound() const {
    double b = 0.0;
    for (const auto& p : comps) b = std::max(b, p.sup_bound());
    return b;
}

MultiPotential MultiPotential::scaled(double t) const {
    MultiPotential r = *this;
    for (auto& p : r.comps) {
        p.constant *= t;
        p.coord *= t;
        for (auto& tr : p.trig) tr.amp *= t;
        for (auto& s : p.steps) s.value *= t;
    }
    return r;
}

MultiPotential MultiPotential::shifted(double c) const {
    MultiPotential r = *this;
    for (auto& p : r.comps) p.constant += c;
    return r;
}

MultiPotential MultiPotential::permuted(const std::vector<int>& perm) const {
    MultiPotential r;
    for (int i : perm) r.comps.push_back(comps.at(i));
    return r;
}

MultiPotential MultiPotential::zero(int m) { return MultiPotential{std::vector<Potential>(m)}; }

MultiPotential MultiPotential::constant(std::vector<double> c) {
    MultiPotential r;
    for (double v : c) r.comps.push_back(Potential{v, 0.0, {}, {}});
    return r;
}

void validate_word(const Word& w, int m) {
    if (w.empty()) throw std::invalid_argument("empty word");
    for (int s : w)
        if (s < 0 || s >= m) throw std::invalid_argument("word symbol out of range");
}

std::uint64_t word_count(int m, int n) {
    std::uint64_t c = 1;
    for (int i = 0; i < n; ++i) {
        if (c > std::numeric_limits<std::uint64_t>::max() / std::uint64_t(m)) return std::numeric_limits<std::uint64_t>::max();
        c *= std::uint64_t(m);
    }
    return c;
}

Word word_from_index(std::uint64_t idx, int m, int n) {
    Word w(n);
    for (int k = n - 1; k >= 0; --k) {
        w[k] = static_cast<int>(idx % std::uint64_t(m));
        idx /= std::uint64_t(m);
    }
    return w;
}

std::vector<Word> all_words(int m, int n) {
    std::uint64_t c = word_count(m, n);
    if (c > kWordCap) throw DepthTooLarge("depth too large for generic path: m^n exceeds the enumeration cap");
    std::vector<Word> out;
    out.reserve(c);
    for (std::uint64_t i = 0; i < c; ++i) out.push_back(word_from_index(i, m, n));
    return out;
}

std::string word_to_string(const Word& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(w[i] + 1);
    }
    return s;
}

std::vector<Point> orbit(const System& sys, const Point& x, const Word& c) {
    validate_word(c, sys.m());
    std::vector<Point> out{x};
    out.reserve(c.size() + 1);
    for (int s : c) {
        auto nxt = sys.apply(s, out.back());
        if (!nxt) throw OutOfDomain("orbit leaves the domain");
        out.push_back(*nxt);
    }
    return out;
}

double consecutive_sum(const System& sys, const MultiPotential& phi, const Point& x, const Word& c) {
    if (phi.m() != sys.m()) throw std::invalid_argument("potential component count differs from m");
    validate_word(c, sys.m());
    double s = 0.0;
    Point p = x;
    for (std::size_t k = 0; k < c.size(); ++k) {
        s += phi.comps[c[k]](p);
        if (k + 1 < c.size()) {
            auto nxt = sys.apply(c[k], p);
            if (!nxt) throw OutOfDomain("orbit leaves the domain");
            p = *nxt;
        }
    }
    return s;
}

double dn_distance(const System& sys, const Point& x, const Point& z, const Word& c) {
    auto ox = orbit(sys, x, c);
    auto oz = orbit(sys, z, c);
    double d = 0.0;
    for (std::size_t k = 0; k < ox.size(); ++k) d = std::max(d, sys.distance(ox[k], oz[k]));
    return d;
}

namespace {

bool condensed_dfs(const System& sys, int left, const Point& x, const Point& z, double eps) {
    if (!(sys.distance(x, z) < eps)) return false;
    if (left == 0) return true;
    for (int j = 0; j < sys.m(); ++j) {
        auto nx = sys.apply(j, x);
        if (!nx) throw OutOfDomain("condensed ball center leaves the domain");
        auto nz = sys.apply(j, z);
        if (!nz) return false;
        if (!condensed_dfs(sys, left - 1, *nx, *nz, eps)) return false;
    }
    return true;
}

bool exhaustive_dfs(const System& sys, int left, const Point& x, const Point& z, double eps) {
    if (!(sys.distance(x, z) < eps)) return false;
    if (left == 0) return true;
    for (int j = 0; j < sys.m(); ++j) {
        auto nx = sys.apply(j, x);
        auto nz = sys.apply(j, z);
        if (!nx || !nz) continue;
        if (exhaustive_dfs(sys, left - 1, *nx, *nz, eps)) return true;
    }
    return false;
}

void sum_dfs(const System& sys, const MultiPotential& phi, int left, const Point& x, double acc, SumRange& r,
             bool& first) {
    if (left == 0) {
        if (first) {
            r = {acc, acc};
            first = false;
        } else {
            r.lo = std::min(r.lo, acc);
            r.hi = std::max(r.hi, acc);
        }
        return;
    }
    for (int j = 0; j < sys.m(); ++j) {
        double a = acc + phi.comps[j](x);
        if (left == 1) {
            sum_dfs(sys, phi, 0, x, a, r, first);
            continue;
        }
        auto nx = sys.apply(j, x);
        if (!nx) throw OutOfDomain("orbit leaves the domain");
        sum_dfs(sys, phi, left - 1, *nx, a, r, first);
    }
}

}  // namespace

bool ball_contains(const System& sys, const BallSpec& ball, const Point& z) {
    if (!(ball.eps > 0.0)) throw std::invalid_argument("ball radius must be positive");
    switch (ball.kind) {
        case BallKind::Trajectory: {
            validate_word(ball.word, sys.m());
            Point x = ball.center, y = z;
            for (std::size_t k = 0;; ++k) {
                if (!(sys.distance(x, y) < ball.eps)) return false;
                if (k == ball.word.size()) return true;
                auto nx = sys.apply(ball.word[k], x);
                if (!nx) throw OutOfDomain("ball center leaves the domain");
                auto ny = sys.apply(ball.word[k], y);
                if (!ny) return false;
                x = *nx;
                y = *ny;
            }
        }
        case BallKind::Condensed:
        case BallKind::Exhaustive: {
            if (ball.depth < 1) throw std::invalid_argument("ball depth must be at least 1");
            if (word_count(sys.m(), ball.depth) > kWordCap)
                throw DepthTooLarge("depth too large for generic path: m^n exceeds the enumeration cap");
            if (ball.kind == BallKind::Condensed) return condensed_dfs(sys, ball.depth, ball.center, z, ball.eps);
            return exhaustive_dfs(sys, ball.depth, ball.center, z, ball.eps);
        }
    }
    return false;
}

SumRange sum_range(const System& sys, const MultiPotential& phi, const Point& x, int n) {
    if (n < 1) throw std::invalid_argument("depth must be at least 1");
    if (phi.word_constant()) {
        auto c = phi.constants();
        auto [lo, hi] = std::minmax_element(c.begin(), c.end());
        return {n * *lo, n * *hi};
    }
    if (word_count(sys.m(), n) > kWordCap)
        throw DepthTooLarge("depth too large for generic path: m^n exceeds the enumeration cap");
    SumRange r;
    bool first = true;
    sum_dfs(sys, phi, n, x, 0.0, r, first);
    return r;
}

std::vector<BallSpec> vitali_disjointify(const System& sys, const std::vector<BallSpec>& balls) {
    if (balls.empty()) return {};
    const BallSpec* longest = &balls[0];
    for (const auto& b : balls) {
        if (b.kind != BallKind::Trajectory) throw std::invalid_argument("vitali extraction needs trajectory balls");
        if (b.eps != balls[0].eps) throw std::invalid_argument("vitali extraction needs a common radius");
        if (b.word.size() > longest->word.size()) longest = &b;
    }
    for (const auto& b : balls)
        if (!std::equal(b.word.begin(), b.word.end(), longest->word.begin()))
            throw std::invalid_argument("balls do not lie along one trajectory");

    std::vector<std::size_t> order(balls.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return balls[a].word.size() < balls[b].word.size(); });

    std::vector<BallSpec> kept;
    const double eps = balls[0].eps;
    for (std::size_t idx : order) {
        const BallSpec& b = balls[idx];
        bool disjoint = true;
        for (const auto& k : kept) {
            if (dn_distance(sys, k.center, b.center, k.word) < 2.0 * eps) {
                disjoint = false;
                break;
            }
        }
        if (disjoint) kept.push_back(b);
    }
    return kept;
}

}  // namespace presslab
