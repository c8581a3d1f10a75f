#include "mdim/counting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <set>

namespace mdim {

CandidateFamily CandidateFamily::exhaustive(std::size_t symbols, long depth, Symbol tail) {
    if (depth < 0) fail(ErrorKind::config, "bad-depth", "negative depth");
    double full = std::pow(static_cast<double>(symbols), static_cast<double>(depth));
    if (full > 9e15) fail(ErrorKind::infeasible, "cap-exceeded", "family too large to index");
    CandidateFamily c;
    c.exhaustive_ = true;
    c.symbols_ = symbols;
    c.depth_ = depth;
    c.tail_ = tail;
    c.size_ = static_cast<std::size_t>(std::llround(full));
    c.full_size_ = full;
    return c;
}

CandidateFamily CandidateFamily::from_words(std::vector<Symbol> flat, long depth, Symbol tail) {
    CandidateFamily c;
    c.depth_ = depth;
    c.tail_ = tail;
    if (depth == 0) {
        c.size_ = 1;
    } else {
        if (flat.size() % static_cast<std::size_t>(depth) != 0)
            fail(ErrorKind::config, "bad-words", "flat word table is not a multiple of depth");
        c.size_ = flat.size() / static_cast<std::size_t>(depth);
    }
    c.flat_ = std::move(flat);
    c.full_size_ = static_cast<double>(c.size_);
    return c;
}

CandidateFamily CandidateFamily::from_points(std::vector<SymbolicPoint> points) {
    CandidateFamily c;
    c.size_ = points.size();
    c.points_ = std::move(points);
    c.full_size_ = static_cast<double>(c.size_);
    return c;
}

void CandidateFamily::word(std::size_t i, Symbol* out) const {
    if (exhaustive_) {
        std::size_t v = i;
        for (long k = depth_ - 1; k >= 0; --k) {
            out[k] = static_cast<Symbol>(v % symbols_);
            v /= symbols_;
        }
        return;
    }
    const Symbol* src = flat_.data() + i * static_cast<std::size_t>(depth_);
    std::copy(src, src + depth_, out);
}

std::vector<Symbol> CandidateFamily::word(std::size_t i) const {
    std::vector<Symbol> w(static_cast<std::size_t>(depth_));
    word(i, w.data());
    return w;
}

SymbolicPoint CandidateFamily::point(std::size_t i) const {
    if (!word_based()) return points_[i];
    return SymbolicPoint(0, word(i), tail_);
}

CandidateFamily CandidateFamily::subset(const std::vector<std::size_t>& idx) const {
    if (!word_based()) {
        std::vector<SymbolicPoint> pts;
        for (std::size_t i : idx) pts.push_back(points_[i]);
        CandidateFamily c = from_points(std::move(pts));
        c.sampled_ = sampled_;
        return c;
    }
    std::vector<Symbol> flat(idx.size() * static_cast<std::size_t>(depth_));
    for (std::size_t k = 0; k < idx.size(); ++k) word(idx[k], flat.data() + k * static_cast<std::size_t>(depth_));
    CandidateFamily c = from_words(std::move(flat), depth_, tail_);
    if (depth_ == 0) c.size_ = idx.size();
    c.sampled_ = sampled_;
    c.full_size_ = full_size_;
    return c;
}

CandidateFamily enumerate_candidates(const ShiftSystem& sys, long depth, const EnumerateOptions& opt) {
    std::size_t k = sys.alphabet().size();
    double full = std::pow(static_cast<double>(k), static_cast<double>(depth));
    Symbol tail = sys.alphabet().tail();
    if (full <= opt.cap) return CandidateFamily::exhaustive(k, depth, tail);
    if (opt.sample_size == 0)
        fail(ErrorKind::infeasible, "cap-exceeded",
             "|K|^depth = " + std::to_string(full) + " exceeds cap; sampling mode needs a declared sample size");
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    std::set<std::vector<Symbol>> seen;
    std::vector<Symbol> flat;
    std::vector<Symbol> w(static_cast<std::size_t>(depth));
    std::size_t attempts = 0;
    while (seen.size() < opt.sample_size && attempts < 20 * opt.sample_size) {
        ++attempts;
        for (auto& s : w) s = static_cast<Symbol>(pick(rng));
        if (seen.insert(w).second) flat.insert(flat.end(), w.begin(), w.end());
    }
    CandidateFamily c = CandidateFamily::from_words(std::move(flat), depth, tail);
    c.mark_sampled(full);
    return c;
}

double word_bowen(const ShiftSystem& sys, const Symbol* a, const Symbol* b, long depth, long n, double stop) {
    long p = 0;
    while (p < depth && a[p] == b[p]) ++p;
    if (p == depth) return 0.0;
    long q = depth - 1;
    while (a[q] == b[q]) --q;
    const Alphabet& A = sys.alphabet();
    const auto& w = sys.weights();
    long m = sys.truncation();
    long i0 = std::max(0L, p - m), i1 = std::min(n - 1, q + m);
    double best = 0.0;
    // start at the first difference, where the weight-one term usually decides
    auto term = [&](long i) {
        double s = 0.0;
        long lo = std::max(p, i - m), hi = std::min(q, i + m);
        for (long c = lo; c <= hi; ++c)
            if (a[c] != b[c]) s += A.dist(a[c], b[c]) * w[static_cast<std::size_t>(std::labs(c - i))];
        return s;
    };
    if (p >= i0 && p <= i1) {
        best = term(p);
        if (best > stop) return best;
    }
    for (long i = i0; i <= i1; ++i) {
        double s = term(i);
        if (s > best) {
            best = s;
            if (best > stop) return best;
        }
    }
    return best;
}

namespace {

// Open-addressing map from (node, symbol) to child node.
class ChildMap {
public:
    ChildMap() { rehash(1 << 12); }

    std::uint32_t find(std::uint64_t key) const {
        std::size_t h = slot(key);
        while (true) {
            if (keys_[h] == kEmpty) return kNone;
            if (keys_[h] == key) return vals_[h];
            h = (h + 1) & mask_;
        }
    }

    void insert(std::uint64_t key, std::uint32_t v) {
        if ((count_ + 1) * 2 > keys_.size()) rehash(keys_.size() * 2);
        std::size_t h = slot(key);
        while (keys_[h] != kEmpty) h = (h + 1) & mask_;
        keys_[h] = key;
        vals_[h] = v;
        ++count_;
    }

    static constexpr std::uint32_t kNone = 0xffffffffu;

private:
    static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};

    std::size_t slot(std::uint64_t key) const {
        return static_cast<std::size_t>((key * 0x9E3779B97F4A7C15ull) >> shift_);
    }

    void rehash(std::size_t cap) {
        std::vector<std::uint64_t> old_k = std::move(keys_);
        std::vector<std::uint32_t> old_v = std::move(vals_);
        keys_.assign(cap, kEmpty);
        vals_.assign(cap, 0);
        mask_ = cap - 1;
        shift_ = 64 - std::countr_zero(cap);
        count_ = 0;
        for (std::size_t i = 0; i < old_k.size(); ++i)
            if (old_k[i] != kEmpty) insert(old_k[i], old_v[i]);
    }

    std::vector<std::uint64_t> keys_;
    std::vector<std::uint32_t> vals_;
    std::size_t mask_ = 0;
    int shift_ = 0;
    std::size_t count_ = 0;
};

// Greedy over a word-based family. Kept words live in a trie over the first
// min(n, depth) coordinates; a conflicting pair must agree up to thr on each
// of those coordinates, so a query only walks neighbouring symbols.
std::vector<std::size_t> greedy_words(const ShiftSystem& sys, const CandidateFamily& cand, long n, double thr) {
    const Alphabet& A = sys.alphabet();
    long depth = cand.depth();
    long key_len = std::min(n, depth);
    std::size_t k = A.size();
    std::vector<std::vector<Symbol>> nb(k);
    for (std::size_t s = 0; s < k; ++s)
        for (std::size_t t = 0; t < k; ++t)
            if (A.dist(static_cast<Symbol>(s), static_cast<Symbol>(t)) <= thr) nb[s].push_back(static_cast<Symbol>(t));

    ChildMap children;
    std::uint32_t next_node = 1;
    std::vector<std::vector<std::uint32_t>> bucket(1);
    std::vector<Symbol> kept_flat;
    std::vector<std::size_t> kept;
    std::vector<Symbol> w(static_cast<std::size_t>(depth));
    std::vector<std::pair<std::uint32_t, long>> stack;

    for (std::size_t i = 0; i < cand.size(); ++i) {
        cand.word(i, w.data());
        bool conflict = false;
        stack.clear();
        stack.push_back({0u, 0L});
        while (!stack.empty() && !conflict) {
            auto [node, level] = stack.back();
            stack.pop_back();
            if (level == key_len) {
                for (std::uint32_t kid : bucket[node]) {
                    const Symbol* other = kept_flat.data() + static_cast<std::size_t>(kid) * depth;
                    if (word_bowen(sys, w.data(), other, depth, n, thr) <= thr) {
                        conflict = true;
                        break;
                    }
                }
                continue;
            }
            for (Symbol s : nb[w[level]]) {
                std::uint32_t c = children.find((static_cast<std::uint64_t>(node) << 16) | s);
                if (c != ChildMap::kNone) stack.push_back({c, level + 1});
            }
        }
        if (conflict) continue;
        std::uint32_t node = 0;
        for (long level = 0; level < key_len; ++level) {
            std::uint64_t key = (static_cast<std::uint64_t>(node) << 16) | w[level];
            std::uint32_t c = children.find(key);
            if (c == ChildMap::kNone) {
                c = next_node++;
                children.insert(key, c);
                bucket.emplace_back();
            }
            node = c;
        }
        bucket[node].push_back(static_cast<std::uint32_t>(kept.size()));
        kept.push_back(i);
        kept_flat.insert(kept_flat.end(), w.begin(), w.end());
    }
    return kept;
}

std::vector<std::size_t> greedy_points(const ShiftSystem& sys, const CandidateFamily& cand, long n, double eps) {
    std::vector<std::size_t> kept;
    std::vector<SymbolicPoint> kp;
    for (std::size_t i = 0; i < cand.size(); ++i) {
        SymbolicPoint x = cand.point(i);
        bool ok = true;
        for (const auto& y : kp)
            if (!sys.separated(x, y, n, eps)) {
                ok = false;
                break;
            }
        if (ok) {
            kept.push_back(i);
            kp.push_back(std::move(x));
        }
    }
    return kept;
}

class MaxIndependentSet {
public:
    MaxIndependentSet(std::size_t n, std::vector<std::uint64_t> adj, std::size_t budget)
        : n_(n), w_((n + 63) / 64), adj_(std::move(adj)), budget_(budget) {}

    std::vector<std::size_t> solve() {
        std::vector<std::uint64_t> all(w_, 0);
        for (std::size_t v = 0; v < n_; ++v) all[v / 64] |= std::uint64_t{1} << (v % 64);
        rec(all);
        std::sort(best_.begin(), best_.end());
        return best_;
    }

private:
    const std::uint64_t* row(std::size_t v) const { return adj_.data() + v * w_; }

    std::size_t count(const std::vector<std::uint64_t>& s) const {
        std::size_t c = 0;
        for (auto x : s) c += static_cast<std::size_t>(std::popcount(x));
        return c;
    }

    std::size_t degree(std::size_t v, const std::vector<std::uint64_t>& s) const {
        std::size_t c = 0;
        const std::uint64_t* r = row(v);
        for (std::size_t i = 0; i < w_; ++i) c += static_cast<std::size_t>(std::popcount(r[i] & s[i]));
        return c;
    }

    // greedy clique cover of the conflict graph; an independent set uses at
    // most one vertex per clique
    std::size_t clique_cover(std::vector<std::uint64_t> q) const {
        std::size_t cliques = 0;
        std::vector<std::uint64_t> cand(w_);
        while (true) {
            std::size_t v = first(q);
            if (v == n_) break;
            ++cliques;
            q[v / 64] &= ~(std::uint64_t{1} << (v % 64));
            const std::uint64_t* r = row(v);
            for (std::size_t i = 0; i < w_; ++i) cand[i] = q[i] & r[i];
            while (true) {
                std::size_t u = first(cand);
                if (u == n_) break;
                q[u / 64] &= ~(std::uint64_t{1} << (u % 64));
                const std::uint64_t* ru = row(u);
                for (std::size_t i = 0; i < w_; ++i) cand[i] &= ru[i];
                cand[u / 64] &= ~(std::uint64_t{1} << (u % 64));
            }
        }
        return cliques;
    }

    std::size_t first(const std::vector<std::uint64_t>& s) const {
        for (std::size_t i = 0; i < w_; ++i)
            if (s[i]) return i * 64 + static_cast<std::size_t>(std::countr_zero(s[i]));
        return n_;
    }

    void rec(std::vector<std::uint64_t> p) {
        if (++nodes_ > budget_) fail(ErrorKind::infeasible, "strategy-infeasible", "exact search exceeded its node budget");
        // vertices without conflicts in p are always taken
        bool changed = true;
        std::size_t taken = 0;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < w_; ++i) {
                std::uint64_t bits = p[i];
                while (bits) {
                    std::size_t v = i * 64 + static_cast<std::size_t>(std::countr_zero(bits));
                    bits &= bits - 1;
                    if (degree(v, p) == 0) {
                        cur_.push_back(v);
                        ++taken;
                        p[v / 64] &= ~(std::uint64_t{1} << (v % 64));
                        changed = true;
                    }
                }
            }
        }
        std::size_t left = count(p);
        if (left == 0) {
            if (cur_.size() > best_.size()) best_ = cur_;
        } else if (cur_.size() + clique_cover(p) > best_.size()) {
            // branch on the minimum-degree vertex and its neighbours
            std::size_t v = n_, dmin = n_ + 1;
            for (std::size_t i = 0; i < w_; ++i) {
                std::uint64_t bits = p[i];
                while (bits) {
                    std::size_t u = i * 64 + static_cast<std::size_t>(std::countr_zero(bits));
                    bits &= bits - 1;
                    std::size_t d = degree(u, p);
                    if (d < dmin) {
                        dmin = d;
                        v = u;
                    }
                }
            }
            std::vector<std::size_t> branch{v};
            const std::uint64_t* rv = row(v);
            for (std::size_t i = 0; i < w_; ++i) {
                std::uint64_t bits = rv[i] & p[i];
                while (bits) {
                    branch.push_back(i * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
                    bits &= bits - 1;
                }
            }
            std::vector<std::uint64_t> rest = p;
            for (std::size_t u : branch) {
                std::vector<std::uint64_t> q = rest;
                const std::uint64_t* ru = row(u);
                for (std::size_t i = 0; i < w_; ++i) q[i] &= ~ru[i];
                q[u / 64] &= ~(std::uint64_t{1} << (u % 64));
                cur_.push_back(u);
                rec(std::move(q));
                cur_.pop_back();
                rest[u / 64] &= ~(std::uint64_t{1} << (u % 64));
            }
        }
        cur_.resize(cur_.size() - taken);
    }

    std::size_t n_, w_;
    std::vector<std::uint64_t> adj_;
    std::size_t budget_;
    std::size_t nodes_ = 0;
    std::vector<std::size_t> cur_, best_;
};

}  // namespace

SeparatedSet maximal_separated(const ShiftSystem& sys, const CandidateFamily& cand, long n, double eps,
                               Strategy strategy, const SeparationOptions& opt) {
    if (n < 1) fail(ErrorKind::config, "bad-horizon", "n must be at least 1");
    if (!(eps > 2.0 * sys.error()))
        fail(ErrorKind::config, "eps-below-error", "eps must exceed twice the certified metric error");
    double thr = eps + 2.0 * sys.error();
    SeparatedSet out;
    out.n = n;
    out.eps = eps;
    out.strategy = strategy;
    out.sampled = cand.sampled();

    if (strategy == Strategy::greedy) {
        out.indices = cand.word_based() ? greedy_words(sys, cand, n, thr) : greedy_points(sys, cand, n, eps);
    } else {
        std::size_t sz = cand.size();
        if (sz > opt.exact_cap)
            fail(ErrorKind::infeasible, "strategy-infeasible",
                 std::to_string(sz) + " candidates exceed the exact cap " + std::to_string(opt.exact_cap));
        std::size_t w = (sz + 63) / 64;
        std::vector<std::uint64_t> adj(sz * w, 0);
        std::vector<SymbolicPoint> pts;
        std::vector<Symbol> flat;
        long depth = cand.depth();
        if (cand.word_based()) {
            flat.resize(sz * static_cast<std::size_t>(depth));
            for (std::size_t i = 0; i < sz; ++i) cand.word(i, flat.data() + i * depth);
        } else {
            for (std::size_t i = 0; i < sz; ++i) pts.push_back(cand.point(i));
        }
        for (std::size_t i = 0; i < sz; ++i)
            for (std::size_t j = i + 1; j < sz; ++j) {
                bool conflict = cand.word_based()
                                    ? word_bowen(sys, flat.data() + i * depth, flat.data() + j * depth, depth, n, thr) <= thr
                                    : !sys.separated(pts[i], pts[j], n, eps);
                if (conflict) {
                    adj[i * w + j / 64] |= std::uint64_t{1} << (j % 64);
                    adj[j * w + i / 64] |= std::uint64_t{1} << (i % 64);
                }
            }
        MaxIndependentSet mis(sz, std::move(adj), opt.node_budget);
        out.indices = mis.solve();
    }
    for (std::size_t i : out.indices) out.members.push_back(cand.point(i));
    return out;
}

GrowthLedger htop_eps_estimate(const ShiftSystem& sys, double eps, const std::vector<long>& n_grid,
                               const GrowthOptions& opt) {
    if (n_grid.empty()) fail(ErrorKind::config, "bad-grid", "empty n grid");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1]) fail(ErrorKind::config, "bad-grid", "n grid must be increasing");
    GrowthLedger led;
    led.eps = eps;
    std::vector<double> xs, ys;
    for (long n : n_grid) {
        long depth = n + opt.depth_margin;
        CandidateFamily cand = enumerate_candidates(sys, depth, opt.enumerate);
        SeparatedSet s = maximal_separated(sys, cand, n, eps, opt.strategy, opt.separation);
        GrowthRow r{n, depth, s.size(), std::log(static_cast<double>(s.size())), cand.sampled()};
        led.sampled = led.sampled || r.sampled;
        led.rows.push_back(r);
        xs.push_back(static_cast<double>(n));
        ys.push_back(r.log_count);
    }
    if (xs.size() == 1) {
        led.slope = ys[0] / xs[0];
        led.upper = led.lower = led.slope;
        return led;
    }
    std::size_t keep = std::max<std::size_t>(2, (xs.size() + 1) / 2);
    std::vector<double> tx(xs.end() - static_cast<long>(keep), xs.end());
    std::vector<double> ty(ys.end() - static_cast<long>(keep), ys.end());
    LineFit fit = least_squares(tx, ty);
    led.slope = fit.slope;
    led.residual = fit.residual;
    auto q = trailing_quotients(xs, ys);
    led.upper = *std::max_element(q.begin(), q.end());
    led.lower = *std::min_element(q.begin(), q.end());
    return led;
}

MdimEstimate mdim_estimate(const std::vector<ShiftSystem>& systems, const std::vector<double>& eps_grid,
                           const std::vector<long>& n_grid, const GrowthOptions& opt) {
    if (systems.size() != eps_grid.size()) fail(ErrorKind::config, "bad-grid", "one system per eps required");
    if (eps_grid.size() < 2) fail(ErrorKind::config, "bad-grid", "at least two eps values required");
    for (std::size_t i = 1; i < eps_grid.size(); ++i)
        if (!(eps_grid[i] < eps_grid[i - 1])) fail(ErrorKind::config, "bad-grid", "eps grid must be decreasing");
    MdimEstimate est;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        const ShiftSystem& sys = systems[i];
        double eps = eps_grid[i];
        double res = sys.alphabet().resolution();
        if (res >= eps / 2.0 || !(eps > 2.0 * (sys.tail_bound() + res)))
            fail(ErrorKind::config, "resolution-too-coarse",
                 "eps " + std::to_string(eps) + " is not above twice tail error plus resolution " + std::to_string(res));
        GrowthLedger led = htop_eps_estimate(sys, eps, n_grid, opt);
        est.sampled = est.sampled || led.sampled;
        xs.push_back(-std::log(eps));
        ys.push_back(led.slope);
        est.rows.push_back(MdimRow{eps, led.slope, res, std::move(led)});
    }
    LineFit fit = least_squares(xs, ys);
    est.fitted = fit.slope;
    est.residual = fit.residual;
    auto q = trailing_quotients(xs, ys);
    est.upper = *std::max_element(q.begin(), q.end());
    est.lower = *std::min_element(q.begin(), q.end());
    return est;
}

MdimEstimate mdim_estimate(const ShiftSystem& sys, const std::vector<double>& eps_grid,
                           const std::vector<long>& n_grid, const GrowthOptions& opt) {
    std::vector<ShiftSystem> systems(eps_grid.size(), sys);
    return mdim_estimate(systems, eps_grid, n_grid, opt);
}

}  // namespace mdim
