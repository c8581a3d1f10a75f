#include "mdim/caratheodory.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

#include "mdim/parallel.hpp"

namespace mdim {

void CoverFamily::add(BowenBall b) {
    min_n = elements.empty() ? b.n : std::min(min_n, b.n);
    elements.push_back(std::move(b));
}

double cover_weight(const CoverFamily& cover, double s) {
    if (cover.elements.empty()) fail(ErrorKind::config, "empty-cover", "cover has no elements");
    double w = 0.0;
    for (const auto& e : cover.elements) w += std::exp(-s * static_cast<double>(e.n));
    return w;
}

bool covers(const ShiftSystem& sys, const CoverFamily& cover, const std::vector<SymbolicPoint>& targets) {
    for (const auto& t : targets) {
        bool in = false;
        for (const auto& e : cover.elements) {
            double thr = e.eps - 2.0 * sys.error();
            if (thr > 0.0 && sys.reach(t, e.center, e.n, thr) >= e.n) {
                in = true;
                break;
            }
        }
        if (!in) return false;
    }
    return true;
}

CoverFamily cover_from_centers(const std::vector<SymbolicPoint>& centers, long n, double eps) {
    CoverFamily c;
    for (std::size_t i = 0; i < centers.size(); ++i) c.add(BowenBall{centers[i], i, n, eps});
    return c;
}

CoverFamily greedy_bowen_cover(const BallTable& table, long N, long n_max, double probe_s) {
    if (N < 1) fail(ErrorKind::config, "bad-horizon", "N must be at least 1");
    if (n_max < N) fail(ErrorKind::infeasible, "uncoverable-point", "n_max below N leaves no admissible ball");
    if (n_max > table.n_max()) fail(ErrorKind::config, "bad-horizon", "n_max exceeds the prepared ball table");
    std::size_t T = table.size();
    std::vector<char> covered(T, 0);
    for (std::size_t j = 0; j < T; ++j) {
        bool ok = false;
        for (std::size_t c = 0; c < T && !ok; ++c) ok = table.reach(c, j) >= N;
        if (!ok) fail(ErrorKind::infeasible, "uncoverable-point", "target " + std::to_string(j) + " fits no ball");
    }

    auto uncovered = [&](std::size_t c, long n) {
        std::size_t u = 0;
        for (std::size_t j = 0; j < T; ++j)
            if (!covered[j] && table.reach(c, j) >= n) ++u;
        return u;
    };
    auto log_cost = [&](long n, std::size_t u) { return -probe_s * static_cast<double>(n) - std::log(static_cast<double>(u)); };

    // (log cost, n, center): smallest cost, then largest n, then lowest center
    using Entry = std::tuple<double, long, std::size_t>;
    auto worse = [](const Entry& a, const Entry& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
        if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
        return std::get<2>(a) > std::get<2>(b);
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
    std::vector<std::size_t> hist(static_cast<std::size_t>(n_max) + 2);
    for (std::size_t c = 0; c < T; ++c) {
        std::fill(hist.begin(), hist.end(), 0);
        for (std::size_t j = 0; j < T; ++j) ++hist[static_cast<std::size_t>(std::min(table.reach(c, j), n_max))];
        std::size_t u = 0;
        for (long n = n_max; n >= N; --n) {
            u += hist[static_cast<std::size_t>(n)];
            if (u > 0) heap.push({log_cost(n, u), n, c});
        }
    }

    CoverFamily cover;
    std::size_t left = T;
    while (left > 0) {
        if (heap.empty()) fail(ErrorKind::infeasible, "uncoverable-point", "greedy cover ran out of balls");
        Entry top = heap.top();
        heap.pop();
        auto [cost, n, c] = top;
        std::size_t u = uncovered(c, n);
        if (u == 0) continue;
        double now = log_cost(n, u);
        if (now > cost) {
            heap.push({now, n, c});
            continue;
        }
        for (std::size_t j = 0; j < T; ++j)
            if (!covered[j] && table.reach(c, j) >= n) {
                covered[j] = 1;
                --left;
            }
        cover.add(BowenBall{table.point(c), c, n, table.eps()});
    }
    return cover;
}

CoverFamily greedy_bowen_cover(const ShiftSystem& sys, const std::vector<SymbolicPoint>& targets, double eps, long N,
                               long n_max, double probe_s) {
    BallTable t(sys, targets, eps, std::max(n_max, 1L));
    return greedy_bowen_cover(t, N, n_max, probe_s);
}

CriticalExponent bowen_entropy_estimate(const BallTable& table, std::size_t alphabet_size, long N, long n_max,
                                        const BisectionOptions& opt) {
    CriticalExponent r;
    r.eps = table.eps();
    r.N = N;
    r.n_max = n_max;
    double lo = opt.s_min;
    double hi = opt.s_max >= 0.0 ? opt.s_max : std::log(static_cast<double>(std::max<std::size_t>(alphabet_size, 1))) + 1.0;
    if (!(hi > lo)) fail(ErrorKind::config, "bad-range", "exponent range is empty");
    auto weight_at = [&](double s) { return cover_weight(greedy_bowen_cover(table, N, n_max, s), s); };
    double wlo = weight_at(lo);
    double whi = weight_at(hi);
    r.probes = 2;
    if (!(wlo >= 1.0) || !(whi < 1.0))
        fail(ErrorKind::infeasible, "bracket-not-found",
             "cover weight does not cross 1 on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    while (hi - lo > opt.tolerance) {
        double mid = 0.5 * (lo + hi);
        double w = weight_at(mid);
        ++r.probes;
        if (w >= 1.0) {
            lo = mid;
            wlo = w;
        } else {
            hi = mid;
            whi = w;
        }
    }
    r.s_lo = lo;
    r.s_hi = hi;
    r.weight_lo = wlo;
    r.weight_hi = whi;
    r.value = 0.5 * (lo + hi);
    return r;
}

CriticalExponent bowen_entropy_estimate(const ShiftSystem& sys, const std::vector<SymbolicPoint>& targets, double eps,
                                        long N, long n_max, const BisectionOptions& opt) {
    BallTable t(sys, targets, eps, std::max(n_max, 1L));
    return bowen_entropy_estimate(t, sys.alphabet().size(), N, n_max, opt);
}

std::size_t uniform_cover_count(const BallTable& table, long N) {
    if (N < 1 || N > table.n_max()) fail(ErrorKind::config, "bad-horizon", "N outside the prepared ball table");
    std::size_t T = table.size();
    std::vector<char> covered(T, 0);
    auto gain = [&](std::size_t c) {
        std::size_t g = 0;
        for (std::size_t j = 0; j < T; ++j)
            if (!covered[j] && table.reach(c, j) >= N) ++g;
        return g;
    };
    using Entry = std::pair<std::size_t, std::size_t>;
    auto cmp = [](const Entry& a, const Entry& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second > b.second;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    for (std::size_t c = 0; c < T; ++c) heap.push({gain(c), c});
    std::size_t left = T, count = 0;
    while (left > 0) {
        Entry top = heap.top();
        heap.pop();
        std::size_t g = gain(top.second);
        if (g < top.first) {
            heap.push({g, top.second});
            continue;
        }
        for (std::size_t j = 0; j < T; ++j)
            if (!covered[j] && table.reach(top.second, j) >= N) {
                covered[j] = 1;
                --left;
            }
        ++count;
    }
    return count;
}

CapacityEstimate capacity_entropy(const BallTable& table, const std::vector<long>& N_grid) {
    if (N_grid.empty()) fail(ErrorKind::config, "bad-grid", "empty N grid");
    for (std::size_t i = 1; i < N_grid.size(); ++i)
        if (N_grid[i] <= N_grid[i - 1]) fail(ErrorKind::config, "bad-grid", "N grid must be increasing");
    CapacityEstimate est;
    est.eps = table.eps();
    std::vector<double> xs, ys;
    for (long N : N_grid) {
        std::size_t c = uniform_cover_count(table, N);
        double lc = std::log(static_cast<double>(c));
        est.rows.push_back({N, c, lc / static_cast<double>(N)});
        xs.push_back(static_cast<double>(N));
        ys.push_back(lc);
    }
    if (xs.size() == 1) {
        est.upper = est.lower = est.rows[0].exponent;
        return est;
    }
    auto q = trailing_quotients(xs, ys);
    est.upper = *std::max_element(q.begin(), q.end());
    est.lower = *std::min_element(q.begin(), q.end());
    return est;
}

CapacityEstimate capacity_entropy(const ShiftSystem& sys, const std::vector<SymbolicPoint>& targets, double eps,
                                  const std::vector<long>& N_grid) {
    if (N_grid.empty()) fail(ErrorKind::config, "bad-grid", "empty N grid");
    BallTable t(sys, targets, eps, *std::max_element(N_grid.begin(), N_grid.end()));
    return capacity_entropy(t, N_grid);
}

MassCertificate mass_distribution_check(const ShiftSystem& sys, const EmpiricalMeasure& mu,
                                        const std::vector<SymbolicPoint>& targets, double eps, long N, double s0,
                                        const std::vector<std::pair<SymbolicPoint, long>>& samples, unsigned workers) {
    mu.validate();
    double on_target = 0.0;
    for (std::size_t a = 0; a < mu.size(); ++a)
        for (const auto& t : targets)
            if (mu.atoms[a] == t) {
                on_target += mu.weights[a];
                break;
            }
    if (std::fabs(on_target - 1.0) > 1e-9)
        fail(ErrorKind::config, "measure-off-target", "measure is not supported on the target set");

    MassCertificate cert;
    cert.eps = eps;
    cert.N = N;
    cert.s0 = s0;
    double slack = 1e-12 * (1.0 + sys.alphabet().diam());
    auto outside = [&](const SymbolicPoint& x, const SymbolicPoint& y, long n) {
        return sys.bowen_lower(x, y, n, eps + slack) >= eps + slack;
    };

    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples[i].second >= N) idx.push_back(i);
    std::vector<CheckedBall> checked(idx.size());
    parallel_for(idx.size(), workers, [&](std::size_t b, std::size_t e, unsigned) {
        for (std::size_t k = b; k < e; ++k) {
            const auto& [x, n] = samples[idx[k]];
            CheckedBall cb;
            cb.center = x;
            cb.n = n;
            cb.bound = std::exp(-static_cast<double>(n) * s0);
            for (const auto& t : targets)
                if (!outside(x, t, n)) {
                    cb.intersects = true;
                    break;
                }
            if (cb.intersects) {
                for (std::size_t a = 0; a < mu.size(); ++a)
                    if (!outside(x, mu.atoms[a], n)) cb.measure += mu.weights[a];
                cb.ok = cb.measure <= cb.bound * (1.0 + 1e-12);
            }
            checked[k] = std::move(cb);
        }
    });
    for (std::size_t k = 0; k < checked.size(); ++k)
        if (!checked[k].ok && cert.pass) {
            cert.pass = false;
            cert.violation = k;
        }
    cert.balls = std::move(checked);
    return cert;
}

}  // namespace mdim
