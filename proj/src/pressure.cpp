#include "presslab/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "presslab/linear.hpp"
#include "presslab/util.hpp"

namespace presslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Word parse_word_1based(const std::string& s) {
    Word w;
    for (const auto& tok : split(s, ',')) {
        long v = parse_long(trim(tok));
        if (v < 1) throw std::invalid_argument("word symbols are 1-based");
        w.push_back(static_cast<int>(v - 1));
    }
    return w;
}

}  // namespace

Word TrajectoryRule::prefix(int n) const {
    if (n < 1) throw std::invalid_argument("depth must be at least 1");
    if (pattern.empty()) throw std::invalid_argument("empty trajectory pattern");
    Word w(n);
    switch (type) {
        case Type::Constant:
            std::fill(w.begin(), w.end(), pattern[0]);
            break;
        case Type::Periodic:
            for (int k = 0; k < n; ++k) w[k] = pattern[k % pattern.size()];
            break;
        case Type::Prefix:
            if (static_cast<int>(pattern.size()) < n) throw std::invalid_argument("explicit trajectory prefix too short");
            std::copy(pattern.begin(), pattern.begin() + n, w.begin());
            break;
    }
    return w;
}

std::string TrajectoryRule::describe() const {
    switch (type) {
        case Type::Constant:
            return "const:" + std::to_string(pattern.at(0) + 1);
        case Type::Periodic:
            return "periodic:" + word_to_string(pattern);
        case Type::Prefix:
            return "prefix:" + word_to_string(pattern);
    }
    return {};
}

std::string PressureKind::name() const {
    switch (tag) {
        case KindTag::Amalgamated: return "amalgamated";
        case KindTag::CondensedLower: return "condensed_lower";
        case KindTag::CondensedUpper: return "condensed_upper";
        case KindTag::ExhaustiveLower: return "exhaustive_lower";
        case KindTag::ExhaustiveUpper: return "exhaustive_upper";
        case KindTag::Free: return "free";
        case KindTag::Lift: return "lift";
        case KindTag::Trajectory: return "trajectory:" + rule.describe();
    }
    return {};
}

PressureKind PressureKind::parse(const std::string& raw) {
    const std::string s = trim(raw);
    static const std::map<std::string, KindTag> plain{
        {"amalgamated", KindTag::Amalgamated},         {"condensed_lower", KindTag::CondensedLower},
        {"condensed_upper", KindTag::CondensedUpper},  {"exhaustive_lower", KindTag::ExhaustiveLower},
        {"exhaustive_upper", KindTag::ExhaustiveUpper}, {"free", KindTag::Free},
        {"lift", KindTag::Lift}};
    if (auto it = plain.find(s); it != plain.end()) return {it->second, {}};
    const std::string pre = "trajectory:";
    if (s.rfind(pre, 0) == 0) {
        std::string rest = s.substr(pre.size());
        auto colon = rest.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("trajectory kind needs const:, periodic: or prefix:");
        std::string type = rest.substr(0, colon);
        Word w = parse_word_1based(rest.substr(colon + 1));
        if (type == "const") {
            if (w.size() != 1) throw std::invalid_argument("const trajectory takes one symbol");
            return trajectory(TrajectoryRule::constant(w[0]));
        }
        if (type == "periodic") return trajectory(TrajectoryRule::periodic(w));
        if (type == "prefix") return trajectory(TrajectoryRule::explicit_prefix(w));
        throw std::invalid_argument("unknown trajectory rule '" + type + "'");
    }
    throw std::invalid_argument("unknown pressure kind '" + s + "'");
}

std::vector<PressureKind> all_set_kinds() {
    return {{KindTag::ExhaustiveLower, {}}, {KindTag::ExhaustiveUpper, {}}, {KindTag::Amalgamated, {}},
            {KindTag::Free, {}},            {KindTag::CondensedLower, {}},  {KindTag::CondensedUpper, {}}};
}

std::string method_name(Method m) { return m == Method::AnalyticBox ? "AnalyticBox" : "GenericGrid"; }

std::vector<Word> word_pool(int m, int n, int random_words, std::uint64_t seed) {
    if (m < 1 || n < 1) throw std::invalid_argument("word pool needs m >= 1 and n >= 1");
    std::vector<Word> pool;
    std::set<Word> seen;
    auto add = [&](Word w) {
        if (seen.insert(w).second) pool.push_back(std::move(w));
    };
    for (int j = 0; j < m; ++j) add(Word(n, j));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j) add(TrajectoryRule::periodic({i, j}).prefix(n));
    const std::uint64_t total = word_count(m, n);
    std::mt19937_64 rng(mix_seed(seed, 0x9001 + std::uint64_t(n)));
    std::uniform_int_distribution<int> sym(0, m - 1);
    int added = 0, attempts = 0;
    while (added < random_words && seen.size() < total && attempts < 64 * (random_words + 1)) {
        ++attempts;
        Word w(n);
        for (auto& s : w) s = sym(rng);
        if (seen.insert(w).second) {
            pool.push_back(std::move(w));
            ++added;
        }
    }
    return pool;
}

double log_depth0_ratio(const System& sys, double eps) {
    return std::max(0.0, -double(sys.dim()) * std::log(2.0 * eps));
}

bool analytic_available(const System& sys, const MultiPotential& phi, double eps) {
    return sys.linear() && phi.word_constant() && eps > 0.0 && eps <= exact_radius_limit(sys);
}

namespace {

struct Bounds {
    double log_low = -kInf;
    double log_up = kInf;
    double size = 0.0;
    bool stochastic = false;
    double log_se = 0.0;
};

double log_mean_exp(const std::vector<double>& v) { return log_sum_exp(v) - std::log(double(v.size())); }

// Delta-method standard error of log(mean(exp(v))).
double log_mean_se(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double top = *std::max_element(v.begin(), v.end());
    double s = 0.0, s2 = 0.0;
    for (double x : v) {
        const double w = std::exp(x - top);
        s += w;
        s2 += w * w;
    }
    const double k = double(v.size());
    const double mean = s / k;
    const double var = std::max(0.0, (s2 - k * mean * mean) / (k - 1.0));
    return std::sqrt(var / k) / mean;
}

std::vector<Word> free_words(int m, int n, const EstimateOptions& opt, bool& stochastic) {
    if (word_count(m, n) <= kWordCap) {
        stochastic = false;
        return all_words(m, n);
    }
    stochastic = true;
    std::mt19937_64 rng(mix_seed(opt.seed, 0xF4EE + std::uint64_t(n)));
    std::uniform_int_distribution<int> sym(0, m - 1);
    std::vector<Word> out(opt.free_samples, Word(n));
    for (auto& w : out)
        for (auto& s : w) s = sym(rng);
    return out;
}

// ---------------------------------------------------------------------------------------------
// Analytic path: linear toral systems with word-constant potentials and eps inside the exact range.

class AnalyticEngine {
  public:
    AnalyticEngine(const System& sys, const MultiPotential& phi, int n, double eps, const EstimateOptions& opt)
        : sys_(sys), n_(n), eps_(eps), opt_(opt), c_(phi.constants()) {
        diagonal_ = sys.dim() == 1 || sys.all_diagonal();
        cmin_ = *std::min_element(c_.begin(), c_.end());
        cmax_ = *std::max_element(c_.begin(), c_.end());
        if (diagonal_) enumerate_classes();
    }

    Bounds trajectory(const Word& w) {
        if (diagonal_) return class_bounds(counts_of(w));
        ConvexBall k = bowen_convex_ball(sys_, w, eps_);
        double lw = word_weight(w);
        double lc = log_cover_count_upper(k);
        return {lw - std::log(k.area), lw + lc, std::exp(lc)};
    }

    Bounds condensed(bool upper) {
        double lw = n_ * (upper ? cmax_ : cmin_);
        double la, lc;
        if (diagonal_) {
            auto [hx, hy] = condensed_box();
            la = log_box_area(hx, hy);
            lc = log_box_count(hx, hy);
        } else {
            ConvexBall k = condensed_convex_ball(sys_, n_, eps_);
            la = std::log(k.area);
            lc = log_cover_count_upper(k);
        }
        return {lw - la, lw + lc, std::exp(lc)};
    }

    Bounds exhaustive(bool upper) {
        double lw = n_ * (upper ? cmax_ : cmin_);
        double la, lc = kInf;
        if (diagonal_) {
            std::vector<std::array<double, 2>> boxes;
            for (const auto& cl : classes_) {
                boxes.push_back({cl.hx, sys_.dim() == 2 ? cl.hy : 1.0});
                lc = std::min(lc, log_box_count(cl.hx, cl.hy));
            }
            if (sys_.dim() == 1) {
                double h = 0.0;
                for (const auto& b : boxes) h = std::max(h, b[0]);
                la = std::log(2.0 * h);
            } else {
                la = std::log(union_of_centered_boxes_area(boxes));
            }
        } else {
            if (word_count(sys_.m(), n_) > kWordCap) throw DepthTooLarge("exhaustive ball needs m^n within the cap");
            std::vector<double> areas;
            for (const auto& w : all_words(sys_.m(), n_)) {
                ConvexBall k = bowen_convex_ball(sys_, w, eps_);
                areas.push_back(std::log(k.area));
                lc = std::min(lc, log_cover_count_upper(k));
            }
            la = std::min(log_sum_exp(areas), std::log(4.0 * eps_ * eps_));
        }
        return {lw - la, lw + lc, std::exp(lc)};
    }

    // Lower bound on every amalgamated cover and the best pure-word cover found.
    Bounds amalgamated(const std::vector<Word>& pool) {
        Bounds b;
        if (diagonal_) {
            for (const auto& cl : classes_) {
                b.log_low = b.log_low == -kInf ? cl.logw - cl.log_area : std::min(b.log_low, cl.logw - cl.log_area);
                double up = cl.logw + cl.log_count;
                if (up < b.log_up) {
                    b.log_up = up;
                    b.size = std::exp(cl.log_count);
                }
            }
            return b;
        }
        if (word_count(sys_.m(), n_) <= kWordCap) {
            double low = kInf;
            for (const auto& w : all_words(sys_.m(), n_)) {
                ConvexBall k = bowen_convex_ball(sys_, w, eps_);
                low = std::min(low, word_weight(w) - std::log(k.area));
            }
            b.log_low = low;
        } else {
            // area(K_C) <= min(4 eps^2, 4 eps^2 / |det P_n|)
            double step_det = kInf;
            for (int j = 0; j < sys_.m(); ++j)
                step_det = std::min(step_det, c_[j] + std::log(std::fabs(double(sys_.matrices()[j].det()))));
            b.log_low = std::max(n_ * cmin_, n_ * step_det) - std::log(4.0 * eps_ * eps_);
        }
        for (const auto& w : pool) {
            Bounds t = trajectory(w);
            if (t.log_up < b.log_up) {
                b.log_up = t.log_up;
                b.size = t.size;
            }
        }
        return b;
    }

    // Per-word covers averaged over words; `cap_up` is the condensed-upper cost every word may fall back to.
    Bounds free_sum(double cap_up, double cap_size, bool& stochastic, double& best_word_up, double& best_word_size) {
        std::vector<double> lows, ups;
        best_word_up = kInf;
        if (diagonal_) {
            stochastic = false;
            for (const auto& cl : classes_) {
                double up = cl.logw + cl.log_count;
                if (up < best_word_up) {
                    best_word_up = up;
                    best_word_size = std::exp(cl.log_count);
                }
                lows.push_back(cl.log_mult + cl.logw - cl.log_area);
                ups.push_back(cl.log_mult + std::min(up, cap_up));
            }
            double lognm = n_ * std::log(double(sys_.m()));
            return {log_sum_exp(lows) - lognm, log_sum_exp(ups) - lognm, cap_size, false};
        }
        auto words = free_words(sys_.m(), n_, opt_, stochastic);
        for (const auto& w : words) {
            Bounds t = trajectory(w);
            if (t.log_up < best_word_up) {
                best_word_up = t.log_up;
                best_word_size = t.size;
            }
            lows.push_back(t.log_low);
            ups.push_back(std::min(t.log_up, cap_up));
        }
        return {log_mean_exp(lows), log_mean_exp(ups), cap_size, stochastic, stochastic ? log_mean_se(ups) : 0.0};
    }

  private:
    struct Class {
        std::vector<int> counts;
        double hx = 0, hy = 0, logw = 0, log_area = 0, log_count = 0, log_mult = 0;
    };

    std::vector<int> counts_of(const Word& w) const {
        validate_word(w, sys_.m());
        std::vector<int> p(sys_.m(), 0);
        for (int s : w) ++p[s];
        return p;
    }

    double word_weight(const Word& w) const {
        double s = 0.0;
        for (int k : w) s += c_[k];
        return s;
    }

    double log_box_area(double hx, double hy) const {
        return sys_.dim() == 1 ? std::log(2.0 * hx) : std::log(2.0 * hx) + std::log(2.0 * hy);
    }
    double log_box_count(double hx, double hy) const {
        double c = std::log(axis_cover_count(hx));
        if (sys_.dim() == 2) c += std::log(axis_cover_count(hy));
        return c;
    }

    std::array<double, 2> condensed_box() const {
        double ax = 0, ay = 0;
        for (const auto& M : sys_.matrices()) {
            ax = std::max(ax, std::fabs(double(M.a)));
            ay = std::max(ay, std::fabs(double(M.d)));
        }
        return {eps_ * std::pow(ax, -n_), eps_ * std::pow(ay, -n_)};
    }

    Class make_class(const std::vector<int>& p) const {
        Class cl;
        cl.counts = p;
        double lx = std::log(eps_), ly = std::log(eps_);
        cl.log_mult = std::lgamma(n_ + 1.0);
        for (int j = 0; j < sys_.m(); ++j) {
            const Mat2& M = sys_.matrices()[j];
            lx -= p[j] * std::log(std::fabs(double(M.a)));
            ly -= p[j] * std::log(std::fabs(double(M.d)));
            cl.logw += p[j] * c_[j];
            cl.log_mult -= std::lgamma(p[j] + 1.0);
        }
        cl.hx = std::exp(lx);
        cl.hy = std::exp(ly);
        cl.log_area = sys_.dim() == 1 ? std::log(2.0) + lx : 2.0 * std::log(2.0) + lx + ly;
        cl.log_count = log_box_count(cl.hx, cl.hy);
        return cl;
    }

    Bounds class_bounds(const std::vector<int>& p) const {
        Class cl = make_class(p);
        return {cl.logw - cl.log_area, cl.logw + cl.log_count, std::exp(cl.log_count)};
    }

    void enumerate_classes() {
        std::vector<int> p(sys_.m(), 0);
        std::function<void(int, int)> rec = [&](int j, int left) {
            if (j == sys_.m() - 1) {
                p[j] = left;
                classes_.push_back(make_class(p));
                return;
            }
            for (int k = left; k >= 0; --k) {
                p[j] = k;
                rec(j + 1, left - k);
            }
        };
        rec(0, n_);
    }

    const System& sys_;
    int n_;
    double eps_;
    EstimateOptions opt_;
    std::vector<double> c_;
    double cmin_ = 0, cmax_ = 0;
    bool diagonal_ = false;
    std::vector<Class> classes_;
};

// ---------------------------------------------------------------------------------------------
// Generic path: greedy covers of grid target points.

class GenericEngine {
  public:
    GenericEngine(const System& sys, const MultiPotential& phi, int n, double eps, const EstimateOptions& opt)
        : sys_(sys), phi_(phi), n_(n), eps_(eps), opt_(opt), grid_(build_target_grid(sys, n, eps, opt.grid)) {}

    const TargetGrid& grid() const { return grid_; }

    struct Built {
        std::vector<Atom> atoms;
        std::vector<BallShape> shapes;
        CoverResult cover;
    };

    Built cover(std::vector<BallShape> shapes, WeightRule rule) {
        AtomRequest req;
        req.sys = &sys_;
        req.phi = &phi_;
        req.grid = &grid_;
        req.shapes = shapes;
        req.rule = rule;
        req.n = n_;
        req.eps = eps_;
        Built b;
        b.shapes = std::move(shapes);
        b.atoms = opt_.parallel ? build_atoms_parallel(req) : build_atoms_serial(req);
        b.cover = greedy_cover(b.atoms, grid_.size());
        if (!b.cover.feasible) throw Infeasible("grid too coarse to certify coverage");
        return b;
    }

    Bounds trajectory(const Word& w) {
        if (auto it = traj_.find(w); it != traj_.end()) return it->second;
        Built b = cover({BallShape{BallKind::Trajectory, w, n_, 0}}, WeightRule::WordSum);
        PackResult p = packing(sys_, phi_, grid_, PackMetric::Word, w, WeightRule::WordSum, n_, eps_);
        check_duality(p.log_sum, b.cover.log_cost);
        Bounds r{p.log_sum, b.cover.log_cost, double(b.cover.chosen.size())};
        traj_[w] = r;
        return r;
    }

    Bounds amalgamated(const std::vector<Word>& pool) {
        std::vector<BallShape> shapes;
        for (std::size_t i = 0; i < pool.size(); ++i)
            shapes.push_back({BallKind::Trajectory, pool[i], n_, static_cast<int>(i)});
        Built b = cover(shapes, WeightRule::WordSum);
        PackResult p = packing(sys_, phi_, grid_, PackMetric::AnyWord, {}, WeightRule::LowerSum, n_, eps_);
        check_duality(p.log_sum, b.cover.log_cost);
        return {p.log_sum, b.cover.log_cost, double(b.cover.chosen.size())};
    }

    Bounds condensed(bool upper) {
        WeightRule rule = upper ? WeightRule::UpperSum : WeightRule::LowerSum;
        Built b = cover({BallShape{BallKind::Condensed, {}, n_, 0}}, rule);
        PackResult p = packing(sys_, phi_, grid_, PackMetric::AllWords, {}, rule, n_, eps_);
        check_duality(p.log_sum, b.cover.log_cost);
        return {p.log_sum, b.cover.log_cost, double(b.cover.chosen.size())};
    }

    Bounds exhaustive(bool upper) {
        Built b = cover({BallShape{BallKind::Exhaustive, {}, n_, 0}}, upper ? WeightRule::UpperSum : WeightRule::LowerSum);
        double low = std::min(mass_ratio_log_bound(b.atoms, grid_.size()), b.cover.log_cost);
        return {low, b.cover.log_cost, double(b.cover.chosen.size())};
    }

    Bounds free_sum(double cap_up, double cap_size, bool& stochastic, double& best_word_up, double& best_word_size) {
        auto words = free_words(sys_.m(), n_, opt_, stochastic);
        std::vector<double> lows, ups;
        best_word_up = kInf;
        for (const auto& w : words) {
            Bounds t = trajectory(w);
            if (t.log_up < best_word_up) {
                best_word_up = t.log_up;
                best_word_size = t.size;
            }
            lows.push_back(t.log_low);
            ups.push_back(std::min(t.log_up, cap_up));
        }
        return {log_mean_exp(lows), log_mean_exp(ups), cap_size, stochastic, stochastic ? log_mean_se(ups) : 0.0};
    }

  private:
    static void check_duality(double pack, double cover) {
        if (pack > cover + 1e-9) throw std::logic_error("packing sum exceeds cover cost");
    }

    const System& sys_;
    const MultiPotential& phi_;
    int n_;
    double eps_;
    EstimateOptions opt_;
    TargetGrid grid_;
    std::map<Word, Bounds> traj_;
};

template <class Engine>
std::vector<PressureEstimate> run_kinds(Engine& eng, const System& sys, const std::vector<PressureKind>& kinds, int n,
                                        double eps, const EstimateOptions& opt, Method method) {
    auto wants = [&](KindTag t) {
        return std::any_of(kinds.begin(), kinds.end(), [&](const PressureKind& k) { return k.tag == t; });
    };
    const bool want_el = wants(KindTag::ExhaustiveLower);
    const bool want_a = wants(KindTag::Amalgamated) || want_el;
    const bool want_free = wants(KindTag::Free) || wants(KindTag::Lift);
    std::map<KindTag, Bounds> got;
    // Condensed covers feed the reductions; when only needed as a reduction they may be skipped
    // beyond the enumeration cap.
    auto condensed = [&](KindTag t, bool needed) {
        const bool requested = wants(t);
        if (!requested && !needed) return;
        try {
            got[t] = eng.condensed(t == KindTag::CondensedUpper);
        } catch (const DepthTooLarge&) {
            if (requested) throw;
            got[t] = Bounds{};
        }
    };
    condensed(KindTag::CondensedLower, want_a);
    condensed(KindTag::CondensedUpper, want_free || want_a);

    double best_word_up = kInf, best_word_size = 0.0;
    if (want_free) {
        bool stochastic = false;
        const Bounds& cu = got[KindTag::CondensedUpper];
        Bounds f = eng.free_sum(cu.log_up, cu.size, stochastic, best_word_up, best_word_size);
        got[KindTag::Free] = f;
        Bounds lift = f;
        const double lognm = n * std::log(double(sys.m()));
        lift.log_low += lognm;
        lift.log_up += lognm;
        got[KindTag::Lift] = lift;
    }
    if (want_a) {
        auto pool = word_pool(sys.m(), n, opt.pool_random, opt.seed);
        Bounds a = eng.amalgamated(pool);
        auto take = [&](double up, double size) {
            if (up < a.log_up) {
                a.log_up = up;
                a.size = size;
            }
        };
        for (const auto& w : pool) {
            Bounds t = eng.trajectory(w);
            take(t.log_up, t.size);
        }
        take(best_word_up, best_word_size);
        take(got[KindTag::CondensedLower].log_up, got[KindTag::CondensedLower].size);
        take(got[KindTag::CondensedUpper].log_up, got[KindTag::CondensedUpper].size);
        got[KindTag::Amalgamated] = a;
    }
    if (want_el) {
        Bounds e = eng.exhaustive(false);
        const Bounds& a = got[KindTag::Amalgamated];
        if (a.log_up < e.log_up) {
            e.log_up = a.log_up;
            e.size = a.size;
        }
        got[KindTag::ExhaustiveLower] = e;
    }
    if (wants(KindTag::ExhaustiveUpper)) got[KindTag::ExhaustiveUpper] = eng.exhaustive(true);

    const double logk = log_depth0_ratio(sys, eps);
    std::vector<PressureEstimate> out;
    for (const auto& k : kinds) {
        Bounds b = k.tag == KindTag::Trajectory ? eng.trajectory(k.rule.prefix(n)) : got.at(k.tag);
        PressureEstimate e;
        e.kind = k;
        e.n = n;
        e.eps = eps;
        e.method = method;
        e.log_cost_lower = b.log_low;
        e.log_cost_upper = b.log_up;
        e.upper = b.log_up / n;
        e.lower = std::min((b.log_low - logk) / n, e.upper);
        e.cover_size = b.size;
        e.stochastic = b.stochastic;
        e.sampling_error = b.log_se / n;
        e.seed = opt.seed;
        out.push_back(e);
    }
    return out;
}

void check_inputs(const System& sys, const MultiPotential& phi, int n, double eps) {
    if (n < 1) throw std::invalid_argument("depth n must be at least 1");
    if (!(eps > 0.0)) throw std::invalid_argument("radius must be positive");
    if (phi.m() != sys.m()) throw std::invalid_argument("potential has the wrong number of components");
}

bool use_analytic(const System& sys, const MultiPotential& phi, double eps, const EstimateOptions& opt) {
    switch (opt.method) {
        case EstimateOptions::MethodChoice::Analytic:
            if (!analytic_available(sys, phi, eps))
                throw std::invalid_argument(
                    "analytic path unavailable: needs a linear toral system, word-constant potential and eps <= "
                    "1/(L_max+1)");
            return true;
        case EstimateOptions::MethodChoice::Generic:
            return false;
        case EstimateOptions::MethodChoice::Auto:
            return analytic_available(sys, phi, eps);
    }
    return false;
}

WeightRule rule_for(KindTag t) {
    switch (t) {
        case KindTag::CondensedLower:
        case KindTag::ExhaustiveLower:
            return WeightRule::LowerSum;
        case KindTag::CondensedUpper:
        case KindTag::ExhaustiveUpper:
            return WeightRule::UpperSum;
        default:
            return WeightRule::WordSum;
    }
}

}  // namespace

std::vector<PressureEstimate> estimate_all(const System& sys, const MultiPotential& phi,
                                           const std::vector<PressureKind>& kinds, int n, double eps,
                                           const EstimateOptions& opt) {
    check_inputs(sys, phi, n, eps);
    if (kinds.empty()) throw std::invalid_argument("no pressure kinds requested");
    if (use_analytic(sys, phi, eps, opt)) {
        AnalyticEngine eng(sys, phi, n, eps, opt);
        return run_kinds(eng, sys, kinds, n, eps, opt, Method::AnalyticBox);
    }
    // Refuse uncapped union/intersection balls before paying for the grid.
    if (word_count(sys.m(), n) > kWordCap)
        for (const auto& k : kinds)
            if (k.tag == KindTag::CondensedLower || k.tag == KindTag::CondensedUpper ||
                k.tag == KindTag::ExhaustiveLower || k.tag == KindTag::ExhaustiveUpper)
                throw DepthTooLarge("depth too large: m^n exceeds the enumeration cap for " + k.name());
    GenericEngine eng(sys, phi, n, eps, opt);
    return run_kinds(eng, sys, kinds, n, eps, opt, Method::GenericGrid);
}

PressureEstimate estimate_pressure(const System& sys, const MultiPotential& phi, const PressureKind& kind, int n,
                                   double eps, const EstimateOptions& opt) {
    return estimate_all(sys, phi, {kind}, n, eps, opt).front();
}

CoverSolution min_cover_cost(const System& sys, const MultiPotential& phi, const PressureKind& kind, int n, double eps,
                             const EstimateOptions& opt) {
    check_inputs(sys, phi, n, eps);
    GenericEngine eng(sys, phi, n, eps, opt);
    std::vector<BallShape> shapes;
    switch (kind.tag) {
        case KindTag::Trajectory:
            shapes.push_back({BallKind::Trajectory, kind.rule.prefix(n), n, 0});
            break;
        case KindTag::Amalgamated:
            for (const auto& w : word_pool(sys.m(), n, opt.pool_random, opt.seed))
                shapes.push_back({BallKind::Trajectory, w, n, 0});
            break;
        case KindTag::CondensedLower:
        case KindTag::CondensedUpper:
            shapes.push_back({BallKind::Condensed, {}, n, 0});
            break;
        case KindTag::ExhaustiveLower:
        case KindTag::ExhaustiveUpper:
            shapes.push_back({BallKind::Exhaustive, {}, n, 0});
            break;
        default:
            throw std::invalid_argument("min_cover_cost handles single-cover kinds only");
    }
    auto built = eng.cover(shapes, rule_for(kind.tag));
    CoverSolution sol;
    sol.tag = kind.tag;
    sol.n = n;
    sol.eps = eps;
    sol.log_cost = built.cover.log_cost;
    for (int idx : built.cover.chosen) {
        const Atom& a = built.atoms[idx];
        const BallShape& s = built.shapes[a.shape];
        sol.atoms.push_back({eng.grid().pts[a.center], s.kind, s.word, a.logw});
    }
    return sol;
}

double packing_bound(const System& sys, const MultiPotential& phi, const PressureKind& kind, int n, double eps,
                     const EstimateOptions& opt) {
    check_inputs(sys, phi, n, eps);
    TargetGrid g = build_target_grid(sys, n, eps, opt.grid);
    switch (kind.tag) {
        case KindTag::Trajectory:
            return packing(sys, phi, g, PackMetric::Word, kind.rule.prefix(n), WeightRule::WordSum, n, eps).log_sum;
        case KindTag::Amalgamated:
            return packing(sys, phi, g, PackMetric::AnyWord, {}, WeightRule::LowerSum, n, eps).log_sum;
        case KindTag::CondensedLower:
            return packing(sys, phi, g, PackMetric::AllWords, {}, WeightRule::LowerSum, n, eps).log_sum;
        case KindTag::CondensedUpper:
            return packing(sys, phi, g, PackMetric::AllWords, {}, WeightRule::UpperSum, n, eps).log_sum;
        default:
            throw std::invalid_argument("packing bound is defined for trajectory, amalgamated and condensed kinds");
    }
}

double frozen_log_cost(const System& sys, const MultiPotential& phi, const CoverSolution& cover) {
    std::vector<double> logs;
    WeightRule rule = rule_for(cover.tag);
    for (const auto& a : cover.atoms) {
        if (rule == WeightRule::WordSum && a.ball == BallKind::Trajectory)
            logs.push_back(consecutive_sum(sys, phi, a.center, a.word));
        else {
            SumRange r = sum_range(sys, phi, a.center, cover.n);
            logs.push_back(rule == WeightRule::UpperSum ? r.hi : r.lo);
        }
    }
    return log_sum_exp(logs);
}

ChainReport verify_inequality_chain(const System& sys, const MultiPotential& phi, int n, double eps,
                                    const EstimateOptions& opt, double tolerance) {
    std::vector<PressureKind> kinds = all_set_kinds();
    auto pool = word_pool(sys.m(), n, opt.pool_random, opt.seed);
    for (const auto& w : pool) kinds.push_back(PressureKind::trajectory(TrajectoryRule::explicit_prefix(w)));
    ChainReport rep;
    rep.estimates = estimate_all(sys, phi, kinds, n, eps, opt);
    const auto& E = rep.estimates;
    auto find = [&](KindTag t) -> const PressureEstimate& {
        for (const auto& e : E)
            if (e.kind.tag == t) return e;
        throw std::logic_error("missing estimate");
    };
    const auto& el = find(KindTag::ExhaustiveLower);
    const auto& eu = find(KindTag::ExhaustiveUpper);
    const auto& a = find(KindTag::Amalgamated);
    const auto& fr = find(KindTag::Free);
    const auto& cl = find(KindTag::CondensedLower);
    const auto& cu = find(KindTag::CondensedUpper);

    auto exact = [&](const std::string& name, double l, double r) {
        rep.checks.push_back({name, l, r, true, l <= r + tolerance});
    };
    auto ordered = [&](const std::string& name, const PressureEstimate& x, const PressureEstimate& y) {
        rep.checks.push_back({name, x.lower, y.upper, false, x.lower <= y.upper + tolerance});
    };
    double min_traj = kInf;
    for (const auto& e : E)
        if (e.kind.tag == KindTag::Trajectory) min_traj = std::min(min_traj, e.upper);
    exact("upper(P^A) <= min pool upper(P_traj)", a.upper, min_traj);
    exact("upper(P^A) <= upper(P_l)", a.upper, cl.upper);
    exact("upper(P+_l) <= upper(P^A)", el.upper, a.upper);
    exact("upper(P^A) <= upper(P_free)", a.upper, fr.upper);
    exact("upper(P_free) <= upper(P_u)", fr.upper, cu.upper);
    ordered("P+_l <= P^A", el, a);
    ordered("P+_l <= P+_u", el, eu);
    for (const auto& e : E)
        if (e.kind.tag == KindTag::Trajectory) ordered("P^A <= P_traj(" + word_to_string(e.kind.rule.pattern) + ")", a, e);
    ordered("P^A <= P_l", a, cl);
    ordered("P_l <= P_u", cl, cu);
    ordered("P^A <= P_free", a, fr);
    ordered("P_free <= P_u", fr, cu);
    rep.passed = std::all_of(rep.checks.begin(), rep.checks.end(), [](const ChainCheck& c) { return c.holds; });
    return rep;
}

Extrapolation extrapolate(const std::vector<PressureEstimate>& seq) {
    if (seq.size() < 3) throw std::invalid_argument("extrapolation needs at least three depths");
    Extrapolation r;
    const auto& last = seq.back();
    const auto& prev = seq[seq.size() - 2];
    r.value = last.midpoint();
    r.error_bar = std::max(last.width(), std::fabs(last.midpoint() - prev.midpoint()));
    r.converged = last.width() < seq.front().width() || last.width() == 0.0;
    bool inc = true, dec = true;
    for (std::size_t i = 1; i < seq.size(); ++i) {
        inc = inc && seq[i].midpoint() >= seq[i - 1].midpoint();
        dec = dec && seq[i].midpoint() <= seq[i - 1].midpoint();
    }
    r.monotone = inc || dec;
    return r;
}

namespace {

double max_preimages(const System& sys) {
    double mx = 1.0;
    if (sys.domain() == Domain::Torus) {
        for (const auto& M : sys.matrices()) mx = std::max(mx, std::fabs(double(sys.dim() == 1 ? M.a : M.det())));
    } else {
        for (const auto& f : sys.interval_maps()) mx = std::max(mx, double(f.branches.size()));
    }
    return mx;
}

}  // namespace

ShiftReport trajectory_shift_check(const System& sys, const MultiPotential& phi, const Word& omega_prefix, int n,
                                   double eps, const EstimateOptions& opt) {
    if (static_cast<int>(omega_prefix.size()) < n + 1) throw std::invalid_argument("shift check needs a prefix of length n+1");
    Word w(omega_prefix.begin(), omega_prefix.begin() + n);
    Word s(omega_prefix.begin() + 1, omega_prefix.begin() + n + 1);
    auto e1 = estimate_pressure(sys, phi, PressureKind::trajectory(TrajectoryRule::explicit_prefix(w)), n, eps, opt);
    auto e2 = estimate_pressure(sys, phi, PressureKind::trajectory(TrajectoryRule::explicit_prefix(s)), n, eps, opt);
    ShiftReport r;
    r.upper_omega = e1.upper;
    r.upper_shifted = e2.upper;
    r.difference = std::fabs(e1.upper - e2.upper);
    r.bound = (phi.sup_bound() + std::log(sys.m() * max_preimages(sys))) / n + e1.width() + e2.width();
    r.passed = r.difference <= r.bound;
    return r;
}

double potential_distance(const System& sys, const MultiPotential& phi, const MultiPotential& psi,
                          const CoverSolution& cover) {
    if (phi.m() != psi.m()) throw std::invalid_argument("potentials differ in component count");
    double d = 0.0;
    auto visit = [&](const Point& p) {
        for (int j = 0; j < phi.m(); ++j) d = std::max(d, std::fabs(phi.comps[j](p) - psi.comps[j](p)));
    };
    const int S = 64;
    for (int i = 0; i < S; ++i) {
        if (sys.dim() == 1) {
            Point p{(i + 0.5) / S, 0.0};
            if (sys.in_domain(p)) visit(p);
            continue;
        }
        for (int j = 0; j < S; ++j) visit({(i + 0.5) / S, (j + 0.5) / S});
    }
    const bool all = rule_for(cover.tag) != WeightRule::WordSum;
    std::function<void(const Point&, int)> tree = [&](const Point& p, int left) {
        visit(p);
        if (left == 0) return;
        for (int j = 0; j < sys.m(); ++j)
            if (auto q = sys.apply(j, p)) tree(*q, left - 1);
    };
    for (const auto& a : cover.atoms) {
        if (all) {
            tree(a.center, cover.n - 1);
        } else {
            auto orb = orbit(sys, a.center, a.word);
            for (std::size_t k = 0; k + 1 < orb.size(); ++k) visit(orb[k]);
        }
    }
    return d;
}

LipschitzReport lipschitz_check(const System& sys, const MultiPotential& phi, const MultiPotential& psi,
                                const PressureKind& kind, int n, double eps, const EstimateOptions& opt,
                                double tolerance) {
    CoverSolution cover = min_cover_cost(sys, phi, kind, n, eps, opt);
    LipschitzReport r;
    r.log_cost_phi = frozen_log_cost(sys, phi, cover);
    r.log_cost_psi = frozen_log_cost(sys, psi, cover);
    r.difference = std::fabs(r.log_cost_phi - r.log_cost_psi) / n;
    r.sup_distance = potential_distance(sys, phi, psi, cover);
    r.passed = r.difference <= r.sup_distance + tolerance;
    return r;
}

}  // namespace presslab
