#include "mdim/birkhoff.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>

#include "mdim/parallel.hpp"

namespace mdim {

namespace {

constexpr double kMassTol = 1e-12;

}  // namespace

double birkhoff_average(const Observable& phi, const SymbolicPoint& x, long n) {
    if (n < 1) fail(ErrorKind::config, "bad-horizon", "Birkhoff average needs n >= 1");
    double s = 0.0;
    for (long i = 0; i < n; ++i) s += phi.at_symbol(x.at(i));
    return s / static_cast<double>(n);
}

void DeviationSpec::validate() const {
    if (!(err > 0.0)) fail(ErrorKind::config, "bad-deviation", "err must be positive");
    if (n < 1) fail(ErrorKind::config, "bad-deviation", "n must be at least 1");
}

EmpiricalMeasure EmpiricalMeasure::uniform(std::vector<SymbolicPoint> atoms) {
    if (atoms.empty()) fail(ErrorKind::config, "empty-measure", "measure needs at least one atom");
    EmpiricalMeasure mu;
    mu.weights.assign(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
    mu.atoms = std::move(atoms);
    return mu;
}

void EmpiricalMeasure::validate(double tol) const {
    if (atoms.empty() || atoms.size() != weights.size())
        fail(ErrorKind::config, "bad-measure", "atoms and weights must be nonempty and aligned");
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) fail(ErrorKind::config, "bad-measure", "weights must be positive");
        total += w;
    }
    if (std::fabs(total - 1.0) > tol) fail(ErrorKind::config, "bad-measure", "weights must sum to 1");
}

std::vector<std::size_t> deviation_members(const Observable& phi, const CandidateFamily& cand, const DeviationSpec& spec) {
    spec.validate();
    std::vector<std::size_t> out;
    if (cand.word_based()) {
        long depth = cand.depth();
        std::vector<Symbol> w(static_cast<std::size_t>(depth));
        double tail_value = phi.at_symbol(cand.tail());
        for (std::size_t i = 0; i < cand.size(); ++i) {
            cand.word(i, w.data());
            double s = 0.0;
            long lim = std::min(spec.n, depth);
            for (long c = 0; c < lim; ++c) s += phi.at_symbol(w[c]);
            s += static_cast<double>(spec.n - lim) * tail_value;
            if (std::fabs(s / static_cast<double>(spec.n) - spec.alpha) < spec.err) out.push_back(i);
        }
        return out;
    }
    for (std::size_t i = 0; i < cand.size(); ++i)
        if (std::fabs(birkhoff_average(phi, cand.point(i), spec.n) - spec.alpha) < spec.err) out.push_back(i);
    return out;
}

SeparatedSet separated_in_deviation(const ShiftSystem& sys, const Observable& phi, const DeviationSpec& spec, double eps,
                                    const CandidateFamily& cand, Strategy strategy, const SeparationOptions& opt) {
    auto idx = deviation_members(phi, cand, spec);
    if (idx.empty())
        fail(ErrorKind::infeasible, "empty-deviation",
             "no candidate has average within " + std::to_string(spec.err) + " of " + std::to_string(spec.alpha) +
                 " at n = " + std::to_string(spec.n));
    CandidateFamily sub = cand.subset(idx);
    SeparatedSet s = maximal_separated(sys, sub, spec.n, eps, strategy, opt);
    for (auto& i : s.indices) i = idx[i];
    return s;
}

BallTable::BallTable(const ShiftSystem& sys, std::vector<SymbolicPoint> points, double eps, long n_max, unsigned workers)
    : points_(std::move(points)), eps_(eps), n_max_(n_max) {
    if (points_.empty()) fail(ErrorKind::config, "empty-target", "ball table needs at least one point");
    if (n_max < 1 || n_max > 60000) fail(ErrorKind::config, "bad-horizon", "n_max must lie in [1, 60000]");
    double thr = eps - 2.0 * sys.error();
    if (!(thr > 0.0)) fail(ErrorKind::config, "eps-below-error", "eps must exceed twice the certified metric error");
    std::size_t n = points_.size();
    reach_.assign(n * n, 0);
    parallel_for(n, workers, [&](std::size_t b, std::size_t e, unsigned) {
        for (std::size_t i = b; i < e; ++i) {
            reach_[i * n + i] = static_cast<std::uint16_t>(n_max);
            for (std::size_t j = i + 1; j < n; ++j)
                reach_[i * n + j] = static_cast<std::uint16_t>(sys.reach(points_[i], points_[j], n_max, thr));
        }
    });
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) reach_[i * n + j] = reach_[j * n + i];
}

KatokTable::KatokTable(const ShiftSystem& sys, const EmpiricalMeasure& mu, double eps, long n_max, unsigned workers)
    : weights_((mu.validate(), mu.weights)), balls_(sys, mu.atoms, eps, n_max, workers) {}

namespace {

struct Balls {
    std::vector<std::vector<std::uint32_t>> members;
    std::vector<double> mass;
};

Balls collect_balls(const KatokTable& t, long n) {
    const auto& w = t.weights();
    const BallTable& bt = t.balls();
    std::size_t na = w.size();
    Balls b;
    b.members.resize(na);
    b.mass.assign(na, 0.0);
    for (std::size_t c = 0; c < na; ++c)
        for (std::size_t j = 0; j < na; ++j)
            if (bt.reach(c, j) >= n) {
                b.members[c].push_back(static_cast<std::uint32_t>(j));
                b.mass[c] += w[j];
            }
    return b;
}

std::size_t greedy_count(const Balls& balls, const std::vector<double>& weights, double need) {
    std::size_t na = weights.size();
    std::vector<char> covered(na, 0);
    auto gain = [&](std::size_t c) {
        double g = 0.0;
        for (auto j : balls.members[c])
            if (!covered[j]) g += weights[j];
        return g;
    };
    using Entry = std::pair<double, std::size_t>;
    auto cmp = [](const Entry& a, const Entry& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second > b.second;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    for (std::size_t c = 0; c < na; ++c) heap.push({balls.mass[c], c});
    double got = 0.0;
    std::size_t count = 0;
    while (got <= need && !heap.empty()) {
        Entry top = heap.top();
        heap.pop();
        double g = gain(top.second);
        if (g < top.first) {
            heap.push({g, top.second});
            continue;
        }
        for (auto j : balls.members[top.second])
            if (!covered[j]) {
                covered[j] = 1;
                got += weights[j];
            }
        ++count;
    }
    return count;
}

// Smallest k for which some k balls cover more than need, searched upward
// from the mass lower bound; -1 when the budget runs out.
long exact_count(const Balls& balls, const std::vector<double>& weights, double need, std::size_t upper, std::size_t budget) {
    // distinct balls only, heaviest first
    std::map<std::vector<std::uint32_t>, std::size_t> uniq;
    for (std::size_t c = 0; c < balls.members.size(); ++c) uniq.emplace(balls.members[c], c);
    std::vector<std::size_t> order;
    for (auto& kv : uniq) order.push_back(kv.second);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (balls.mass[a] != balls.mass[b]) return balls.mass[a] > balls.mass[b];
        return a < b;
    });
    std::vector<double> masses;
    for (auto c : order) masses.push_back(balls.mass[c]);

    std::size_t lb = 0;
    for (double acc = 0.0; lb < masses.size() && acc <= need; ++lb) acc += masses[lb];

    std::vector<int> cover(weights.size(), 0);
    std::size_t nodes = 0;
    bool out_of_budget = false;

    // returns true when k more balls starting at position pos can push the mass past need
    auto dfs = [&](auto&& self, std::size_t pos, std::size_t k, double got) -> bool {
        if (got > need) return true;
        if (k == 0 || out_of_budget) return false;
        if (++nodes > budget) {
            out_of_budget = true;
            return false;
        }
        for (std::size_t i = pos; i < masses.size(); ++i) {
            double optimistic = got;
            for (std::size_t t = i; t < i + k && t < masses.size(); ++t) optimistic += masses[t];
            if (optimistic <= need) return false;  // masses are sorted, later starts are no better
            double add = 0.0;
            for (auto j : balls.members[order[i]])
                if (cover[j]++ == 0) add += weights[j];
            bool ok = self(self, i + 1, k - 1, got + add);
            for (auto j : balls.members[order[i]]) --cover[j];
            if (ok) return true;
            if (out_of_budget) return false;
        }
        return false;
    };

    for (std::size_t k = std::max<std::size_t>(lb, 1); k < upper; ++k) {
        if (dfs(dfs, 0, k, 0.0)) return static_cast<long>(k);
        if (out_of_budget) return -1;
    }
    return static_cast<long>(upper);
}

}  // namespace

KatokCount katok_covering_number(const KatokTable& table, long n, double delta, const KatokOptions& opt) {
    if (!(delta > 0.0 && delta < 1.0)) fail(ErrorKind::config, "bad-delta", "delta must lie in (0, 1)");
    if (n < 1 || n > table.n_max()) fail(ErrorKind::config, "bad-horizon", "n outside the prepared range");
    const auto& w = table.weights();
    Balls balls = collect_balls(table, n);
    double need = 1.0 - delta + kMassTol;
    KatokCount out;
    out.greedy = greedy_count(balls, w, need);
    out.count = out.greedy;
    if (w.size() <= opt.exact_atoms) {
        long e = exact_count(balls, w, need, out.greedy, opt.node_budget);
        if (e >= 0) {
            out.count = static_cast<std::size_t>(e);
            out.exact = true;
        }
    }
    return out;
}

KatokCount katok_covering_number(const ShiftSystem& sys, const EmpiricalMeasure& mu, long n, double eps, double delta,
                                 const KatokOptions& opt) {
    KatokTable t(sys, mu, eps, n, opt.workers);
    return katok_covering_number(t, n, delta, opt);
}

KatokEstimate katok_entropy_estimate(const KatokTable& table, double eps, double delta, const std::vector<long>& n_grid,
                                     const KatokOptions& opt) {
    if (n_grid.empty()) fail(ErrorKind::config, "bad-grid", "empty n grid");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1]) fail(ErrorKind::config, "bad-grid", "n grid must be increasing");
    KatokEstimate est;
    est.eps = eps;
    est.delta = delta;
    std::vector<double> xs, ys;
    for (long n : n_grid) {
        KatokCount c = katok_covering_number(table, n, delta, opt);
        est.rows.push_back({n, c.count, c.exact, std::log(static_cast<double>(c.count))});
        xs.push_back(static_cast<double>(n));
        ys.push_back(est.rows.back().log_count);
    }
    if (xs.size() == 1) {
        est.lower = est.upper = ys[0] / xs[0];
        return est;
    }
    auto q = trailing_quotients(xs, ys);
    est.lower = *std::min_element(q.begin(), q.end());
    est.upper = *std::max_element(q.begin(), q.end());
    return est;
}

KatokEstimate katok_entropy_estimate(const ShiftSystem& sys, const EmpiricalMeasure& mu, double eps, double delta,
                                     const std::vector<long>& n_grid, const KatokOptions& opt) {
    if (n_grid.empty()) fail(ErrorKind::config, "bad-grid", "empty n grid");
    KatokTable t(sys, mu, eps, n_grid.back(), opt.workers);
    return katok_entropy_estimate(t, eps, delta, n_grid, opt);
}

}  // namespace mdim
