#include "presslab/cover.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <queue>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace presslab {

namespace {

std::vector<std::array<double, 2>> intersect(const std::vector<std::array<double, 2>>& a,
                                             const std::vector<std::array<double, 2>>& b) {
    std::vector<std::array<double, 2>> out;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        double lo = std::max(a[i][0], b[j][0]);
        double hi = std::min(a[i][1], b[j][1]);
        if (lo <= hi) out.push_back({lo, hi});
        if (a[i][1] < b[j][1])
            ++i;
        else
            ++j;
    }
    return out;
}

std::uint64_t key_of(long i, long j, long cells) { return std::uint64_t(i) * std::uint64_t(cells) + std::uint64_t(j); }

}  // namespace

std::vector<std::array<double, 2>> interval_core(const System& sys, int n) {
    if (sys.domain() != Domain::Interval) throw std::invalid_argument("interval core needs an interval system");
    std::vector<std::array<double, 2>> D{{0.0, 1.0}};
    for (int k = 0; k < n; ++k) {
        std::vector<std::array<double, 2>> next;
        bool first = true;
        for (const auto& f : sys.interval_maps()) {
            std::vector<std::array<double, 2>> U;
            for (const auto& b : f.branches)
                for (const auto& iv : D) U.push_back({b.lo + iv[0] * (b.hi - b.lo), b.lo + iv[1] * (b.hi - b.lo)});
            next = first ? U : intersect(next, U);
            first = false;
        }
        D = std::move(next);
        if (D.empty()) break;
    }
    return D;
}

int TargetGrid::find(long i, long j) const {
    if (wraps) {
        i = ((i % cells) + cells) % cells;
        j = dim == 2 ? ((j % cells) + cells) % cells : 0;
    } else if (i < 0 || i >= cells) {
        return -1;
    }
    auto it = index.find(key_of(i, j, cells));
    return it == index.end() ? -1 : it->second;
}

TargetGrid build_target_grid(const System& sys, int n, double eps, const GridOptions& opt) {
    if (n < 1) throw std::invalid_argument("depth must be at least 1");
    if (!(eps > 0.0)) throw std::invalid_argument("radius must be positive");
    if (opt.refine < 1) throw std::invalid_argument("grid refinement must be at least 1");
    const double dc = std::min(eps / 4.0, eps * std::pow(sys.max_expansion(), -n));
    // Spacing a quarter-cell finer than dc/refine keeps the thinnest ball radius off the target lattice,
    // so rounding cannot decide which boundary targets a ball holds.
    const double nt = std::ceil(opt.refine / dc * (1.0 + 0.25 / opt.refine));
    const double total = sys.domain() == Domain::Torus ? std::pow(nt, sys.dim()) : nt;
    if (sys.domain() == Domain::Torus && total > double(opt.max_points))
        throw std::runtime_error("grid too fine for the generic path (" + std::to_string(static_cast<long long>(total)) +
                                 " points); use the analytic path or a smaller depth");
    if (nt > 4e15) throw std::runtime_error("grid too fine for the generic path");

    TargetGrid g;
    g.dim = sys.dim();
    g.cells = static_cast<long>(nt);
    g.delta = 1.0 / nt;
    const auto& R = opt.region;
    auto in_box = [&](const Point& p) {
        if (R.kind == Region::Kind::Whole) return true;
        bool ok = p.x >= R.lo.x && p.x < R.hi.x;
        if (g.dim == 2) ok = ok && p.y >= R.lo.y && p.y < R.hi.y;
        return ok;
    };
    auto add = [&](long i, long j, bool center) {
        Point p{(i + 0.5) * g.delta, g.dim == 2 ? (j + 0.5) * g.delta : 0.0};
        if (!in_box(p)) return;
        int id = static_cast<int>(g.pts.size());
        g.pts.push_back(p);
        g.ij.push_back({i, j});
        g.index.emplace(key_of(i, j, g.cells), id);
        if (center) g.centers.push_back(id);
    };

    if (sys.domain() == Domain::Torus) {
        g.wraps = true;
        if (g.dim == 1) {
            for (long i = 0; i < g.cells; ++i) add(i, 0, i % opt.refine == 0);
        } else {
            for (long i = 0; i < g.cells; ++i)
                for (long j = 0; j < g.cells; ++j) add(i, j, i % opt.refine == 0 && j % opt.refine == 0);
        }
    } else {
        g.wraps = false;
        for (const auto& iv : interval_core(sys, n)) {
            long a = static_cast<long>(std::ceil(iv[0] / g.delta - 0.5));
            long b = static_cast<long>(std::floor(iv[1] / g.delta - 0.5));
            for (long i = std::max(a, 0L); i <= std::min(b, g.cells - 1); ++i) {
                if (!g.index.count(key_of(i, 0, g.cells))) add(i, 0, true);
                if (g.pts.size() > opt.max_points)
                    throw std::runtime_error("grid too fine for the generic path; use a smaller depth");
            }
        }
    }
    if (g.pts.empty()) throw std::runtime_error("region contains no grid points");
    if (g.centers.empty()) g.centers.push_back(0);
    return g;
}

namespace {

double atom_weight(const AtomRequest& req, const BallShape& s, const Point& c) {
    switch (req.rule) {
        case WeightRule::WordSum:
            return s.kind == BallKind::Trajectory ? consecutive_sum(*req.sys, *req.phi, c, s.word)
                                                  : sum_range(*req.sys, *req.phi, c, req.n).lo;
        case WeightRule::LowerSum:
            return sum_range(*req.sys, *req.phi, c, req.n).lo;
        case WeightRule::UpperSum:
            return sum_range(*req.sys, *req.phi, c, req.n).hi;
    }
    return 0.0;
}

void flood(const AtomRequest& req, const BallShape& s, int center, std::vector<int>& stamp, int token,
           std::vector<int>& out) {
    const TargetGrid& g = *req.grid;
    BallSpec ball;
    ball.kind = s.kind;
    ball.word = s.word;
    ball.depth = s.kind == BallKind::Trajectory ? static_cast<int>(s.word.size()) : req.n;
    ball.center = g.pts[center];
    ball.eps = req.eps;
    out.clear();
    std::vector<int> queue{center};
    stamp[center] = token;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        int q = queue[head];
        if (!ball_contains(*req.sys, ball, g.pts[q])) continue;
        out.push_back(q);
        const auto [i, j] = g.ij[q];
        for (long di = -1; di <= 1; ++di)
            for (long dj = (g.dim == 2 ? -1 : 0); dj <= (g.dim == 2 ? 1 : 0); ++dj) {
                if (di == 0 && dj == 0) continue;
                int r = g.find(i + di, j + dj);
                if (r >= 0 && stamp[r] != token) {
                    stamp[r] = token;
                    queue.push_back(r);
                }
            }
    }
    std::sort(out.begin(), out.end());
}

Atom make_atom(const AtomRequest& req, std::size_t task, std::vector<int>& stamp) {
    const std::size_t S = req.shapes.size();
    Atom a;
    a.center = req.grid->centers[task / S];
    a.shape = static_cast<int>(task % S);
    const BallShape& s = req.shapes[a.shape];
    a.logw = atom_weight(req, s, req.grid->pts[a.center]);
    flood(req, s, a.center, stamp, static_cast<int>(task), a.cover);
    return a;
}

void check_request(const AtomRequest& req) {
    if (!req.sys || !req.phi || !req.grid) throw std::invalid_argument("incomplete atom request");
    if (req.shapes.empty()) throw std::invalid_argument("atom request without ball shapes");
    if (req.grid->centers.size() * req.shapes.size() > std::size_t(std::numeric_limits<int>::max()))
        throw std::runtime_error("too many candidate atoms");
}

}  // namespace

std::vector<Atom> build_atoms_serial(const AtomRequest& req) {
    check_request(req);
    const std::size_t tasks = req.grid->centers.size() * req.shapes.size();
    std::vector<Atom> atoms(tasks);
    std::vector<int> stamp(req.grid->size(), -1);
    for (std::size_t t = 0; t < tasks; ++t) atoms[t] = make_atom(req, t, stamp);
    return atoms;
}

std::vector<Atom> build_atoms_parallel(const AtomRequest& req) {
    check_request(req);
    const std::size_t tasks = req.grid->centers.size() * req.shapes.size();
    std::vector<Atom> atoms(tasks);
    std::exception_ptr err;
#pragma omp parallel
    {
        std::vector<int> stamp(req.grid->size(), -1);
#pragma omp for schedule(dynamic, 64)
        for (long long t = 0; t < static_cast<long long>(tasks); ++t) {
            try {
                atoms[t] = make_atom(req, static_cast<std::size_t>(t), stamp);
            } catch (...) {
#pragma omp critical(presslab_atom_error)
                if (!err) err = std::current_exception();
            }
        }
    }
    if (err) std::rethrow_exception(err);
    return atoms;
}

namespace {

struct HeapItem {
    double key;
    int atom;
};

// Total order on candidate atoms that does not depend on their position in the list.
bool better(const std::vector<Atom>& atoms, const HeapItem& x, const HeapItem& y) {
    if (x.key != y.key) return x.key > y.key;
    const Atom& a = atoms[x.atom];
    const Atom& b = atoms[y.atom];
    if (a.center != b.center) return a.center < b.center;
    if (a.cover != b.cover) return a.cover < b.cover;
    if (a.logw != b.logw) return a.logw < b.logw;
    return x.atom < y.atom;
}

}  // namespace

CoverResult greedy_cover(const std::vector<Atom>& atoms, std::size_t npoints) {
    std::vector<char> covered(npoints, 0);
    std::size_t remaining = npoints;
    auto cmp = [&](const HeapItem& x, const HeapItem& y) { return better(atoms, y, x); };
    std::priority_queue<HeapItem, std::vector<HeapItem>, decltype(cmp)> heap(cmp);
    for (std::size_t i = 0; i < atoms.size(); ++i)
        if (!atoms[i].cover.empty())
            heap.push({std::log(double(atoms[i].cover.size())) - atoms[i].logw, static_cast<int>(i)});

    CoverResult res;
    std::vector<double> logs;
    while (remaining > 0 && !heap.empty()) {
        HeapItem top = heap.top();
        heap.pop();
        const Atom& a = atoms[top.atom];
        std::size_t fresh = 0;
        for (int p : a.cover) fresh += covered[p] ? 0 : 1;
        if (fresh == 0) continue;
        HeapItem cur{std::log(double(fresh)) - a.logw, top.atom};
        if (!heap.empty() && better(atoms, heap.top(), cur)) {
            heap.push(cur);
            continue;
        }
        res.chosen.push_back(top.atom);
        logs.push_back(a.logw);
        for (int p : a.cover)
            if (!covered[p]) {
                covered[p] = 1;
                --remaining;
            }
    }
    res.feasible = remaining == 0;
    double mx = logs.empty() ? 0.0 : *std::max_element(logs.begin(), logs.end());
    double s = 0.0;
    for (double l : logs) s += std::exp(l - mx);
    res.log_cost = logs.empty() ? -std::numeric_limits<double>::infinity() : mx + std::log(s);
    return res;
}

double mass_ratio_log_bound(const std::vector<Atom>& atoms, std::size_t npoints) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : atoms)
        if (!a.cover.empty()) best = std::min(best, a.logw + std::log(double(npoints)) - std::log(double(a.cover.size())));
    return best;
}

namespace {

void slack_dfs(const System& sys, const MultiPotential& phi, int left, const Point& x, double acc, double r,
               SumRange& range, bool& first) {
    for (int j = 0; j < sys.m(); ++j) {
        const Potential& p = phi.comps[j];
        double a = acc + p(x) - p.oscillation(sys, x, r);
        if (left == 1) {
            if (first) {
                range = {a, a};
                first = false;
            } else {
                range.lo = std::min(range.lo, a);
                range.hi = std::max(range.hi, a);
            }
            continue;
        }
        auto nx = sys.apply(j, x);
        if (!nx) throw OutOfDomain("orbit leaves the domain");
        slack_dfs(sys, phi, left - 1, *nx, a, r, range, first);
    }
}

}  // namespace

SumRange slack_sum_range(const System& sys, const MultiPotential& phi, const Point& x, int n, double r) {
    if (phi.word_constant()) return sum_range(sys, phi, x, n);
    if (word_count(sys.m(), n) > kWordCap) throw DepthTooLarge("depth too large: m^n exceeds the enumeration cap");
    SumRange range;
    bool first = true;
    slack_dfs(sys, phi, n, x, 0.0, r, range, first);
    return range;
}

double slack_word_sum(const System& sys, const MultiPotential& phi, const Point& x, const Word& w, double r) {
    auto orb = orbit(sys, x, w);
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const Potential& p = phi.comps[w[k]];
        s += p(orb[k]) - p.oscillation(sys, orb[k], r);
    }
    return s;
}

PackResult packing(const System& sys, const MultiPotential& phi, const TargetGrid& grid, PackMetric metric,
                   const Word& word, WeightRule rule, int n, double eps) {
    const double r = 2.0 * eps;
    const long B = std::max(1L, static_cast<long>(std::floor(1.0 / r)));
    const bool wrap = sys.domain() == Domain::Torus;
    const int dim = grid.dim;
    std::vector<std::vector<int>> buckets(dim == 2 ? B * B : B);
    auto bucket_of = [&](double v) { return std::min(B - 1, static_cast<long>(std::floor(v * B))); };

    BallSpec probe;
    probe.kind = metric == PackMetric::Word ? BallKind::Trajectory
                                            : (metric == PackMetric::AnyWord ? BallKind::Exhaustive : BallKind::Condensed);
    probe.word = word;
    probe.depth = n;
    probe.eps = r;

    PackResult res;
    std::vector<double> logs;
    std::vector<long> nbx, nby;
    for (int c : grid.centers) {
        const Point& p = grid.pts[c];
        const long bx = bucket_of(p.x), by = dim == 2 ? bucket_of(p.y) : 0;
        nbx.clear();
        nby.clear();
        for (long d = -1; d <= 1; ++d) {
            long x = bx + d, y = by + d;
            if (wrap) {
                x = (x + B) % B;
                y = (y + B) % B;
            }
            if (x >= 0 && x < B && std::find(nbx.begin(), nbx.end(), x) == nbx.end()) nbx.push_back(x);
            if (dim == 2 && y >= 0 && y < B && std::find(nby.begin(), nby.end(), y) == nby.end()) nby.push_back(y);
        }
        if (dim == 1) nby = {0};
        probe.center = p;
        bool clash = false;
        for (long x : nbx) {
            for (long y : nby) {
                for (int q : buckets[dim == 2 ? x * B + y : x]) {
                    const Point& pq = grid.pts[q];
                    if (!(sys.distance(p, pq) < r)) continue;
                    if (ball_contains(sys, probe, pq)) {
                        clash = true;
                        break;
                    }
                }
                if (clash) break;
            }
            if (clash) break;
        }
        if (clash) continue;
        buckets[dim == 2 ? bx * B + by : bx].push_back(c);
        res.points.push_back(c);
        double w = 0.0;
        if (rule == WeightRule::WordSum && metric == PackMetric::Word)
            w = slack_word_sum(sys, phi, p, word, r);
        else {
            SumRange sr = slack_sum_range(sys, phi, p, n, r);
            w = rule == WeightRule::UpperSum ? sr.hi : sr.lo;
        }
        logs.push_back(w);
    }
    double mx = *std::max_element(logs.begin(), logs.end());
    double s = 0.0;
    for (double l : logs) s += std::exp(l - mx);
    res.log_sum = mx + std::log(s);
    return res;
}

}  // namespace presslab
