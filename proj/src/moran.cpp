#include "mdim/moran.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include "mdim/parallel.hpp"

namespace mdim {

namespace {

struct Mixture {
    Symbol lo = 0, hi = 0;
    long count_hi = 0;
    double deviation = std::numeric_limits<double>::infinity();
};

Mixture best_mixture(const Observable& phi, double alpha, long n) {
    Mixture best;
    const auto& v = phi.table();
    if (alpha < phi.min_value() || alpha > phi.max_value() || n < 1) return best;
    double dn = static_cast<double>(n);
    for (std::size_t p = 0; p < v.size(); ++p)
        for (std::size_t q = 0; q < v.size(); ++q) {
            if (v[p] > alpha || v[q] < alpha) continue;
            long c0 = 0;
            if (v[q] != v[p]) c0 = std::lround((alpha - v[p]) / (v[q] - v[p]) * dn);
            for (long c = c0 - 1; c <= c0 + 1; ++c) {
                if (c < 0 || c > n) continue;
                double avg = (v[p] * static_cast<double>(n - c) + v[q] * static_cast<double>(c)) / dn;
                double dev = std::fabs(avg - alpha);
                if (dev < best.deviation) best = {static_cast<Symbol>(p), static_cast<Symbol>(q), c, dev};
            }
        }
    return best;
}

// smallest N >= 1 with 2 X <= N b
long slack_count(double X, double b) {
    long N = std::max(1L, static_cast<long>(std::ceil(2.0 * X / b)));
    while (2.0 * X > static_cast<double>(N) * b) ++N;
    while (N > 1 && 2.0 * X <= static_cast<double>(N - 1) * b) --N;
    return N;
}

void keep_worst(CheckResult& r, double margin, std::size_t a, std::size_t b, bool ok) {
    if (r.checked == 0 || std::tie(margin, a, b) < std::tie(r.worst_margin, r.a, r.b)) {
        r.worst_margin = margin;
        r.a = a;
        r.b = b;
    }
    ++r.checked;
    if (!ok) r.pass = false;
}

void merge(CheckResult& into, const CheckResult& part) {
    if (part.checked == 0) return;
    std::size_t n = into.checked;
    bool pass = into.pass && part.pass;
    if (n == 0 || std::tie(part.worst_margin, part.a, part.b) < std::tie(into.worst_margin, into.a, into.b)) {
        into.worst_margin = part.worst_margin;
        into.a = part.a;
        into.b = part.b;
    }
    into.checked = n + part.checked;
    into.pass = pass;
}

}  // namespace

double MoranSchedule::radius(int k) const { return std::ldexp(eps0, -(5 + k)); }

std::vector<std::string> schedule_violations(const MoranSchedule& s) {
    std::vector<std::string> out;
    std::size_t sz = static_cast<std::size_t>(s.K) + 1;
    if (s.K < 1 || s.delta.size() != sz || s.nhat.size() != sz || s.N.size() != sz || s.L.size() != sz ||
        s.t.size() != sz) {
        out.push_back("per-level vectors do not match K");
        return out;
    }
    if (!(s.growth_a > 0.0) || !(s.growth_b > 0.0)) out.push_back("growth bounds must be positive");
    if (!(s.delta[1] < s.gamma)) out.push_back("delta_1 must be below gamma");
    if (s.t[0] != 0) out.push_back("t_0 must be 0");
    for (int k = 1; k <= s.K; ++k) {
        std::string at = " at k = " + std::to_string(k);
        if (!(s.delta[k] > 0.0)) out.push_back("delta must be positive" + at);
        if (k > 1 && !(s.delta[k] < s.delta[k - 1])) out.push_back("delta must decrease" + at);
        if (s.nhat[k] < 1 || s.N[k] < 1 || s.L[k] < 1) out.push_back("nhat, N, L must be positive" + at);
        long expect = k == 1 ? s.N[1] * s.nhat[1] + (s.N[1] - 1) * s.L[1] : s.t[k - 1] + s.N[k] * (s.nhat[k] + s.L[k]);
        if (s.t[k] != expect) out.push_back("t recurrence broken" + at);
        if (!(std::log(static_cast<double>(s.L[k])) / static_cast<double>(s.nhat[k]) < s.gamma / std::ldexp(1.0, k + 1)))
            out.push_back("tempered condition fails" + at);
        if (k < s.K) {
            double a = static_cast<double>(s.nhat[k + 1] + s.L[k + 1]) / static_cast<double>(s.N[k]);
            if (!(a <= s.bound_a(k))) out.push_back("growth condition A fails" + at);
            double sum = 0.0;
            for (int i = 1; i <= k; ++i) sum += static_cast<double>(s.N[i] * (s.nhat[i] + s.L[i]));
            if (!(sum / static_cast<double>(s.N[k + 1]) <= s.bound_b(k))) out.push_back("growth condition B fails" + at);
        }
    }
    return out;
}

double best_mixture_deviation(const Observable& phi, double alpha, long n) { return best_mixture(phi, alpha, n).deviation; }

MoranSchedule build_schedule(const ShiftSystem& sys, const Observable& phi, const MoranParams& p) {
    const Alphabet& A = sys.alphabet();
    if (p.K < 1 || p.K > 20) fail(ErrorKind::config, "bad-schedule", "K must lie in [1, 20]");
    if (!(p.gamma > 0.0 && p.gamma < 1.0)) fail(ErrorKind::config, "bad-schedule", "gamma must lie in (0, 1)");
    if (!(p.eps0 > 0.0 && p.eps0 < A.diam())) fail(ErrorKind::config, "bad-schedule", "eps0 must lie in (0, diam)");
    if (p.alpha1 == p.alpha2) fail(ErrorKind::config, "bad-schedule", "alpha1 and alpha2 must differ");
    if (!(p.growth_a > 0.0 && p.growth_b > 0.0)) fail(ErrorKind::config, "bad-schedule", "growth bounds must be positive");
    if (phi.table().size() != A.size()) fail(ErrorKind::config, "bad-observable", "observable does not match the alphabet");
    for (double a : {p.alpha1, p.alpha2})
        if (a < phi.min_value() || a > phi.max_value())
            fail(ErrorKind::infeasible, "empty-deviation", "target average " + std::to_string(a) + " is not achievable");

    MoranSchedule s;
    s.eps0 = p.eps0;
    s.gamma = p.gamma;
    s.alpha1 = p.alpha1;
    s.alpha2 = p.alpha2;
    s.K = p.K;
    s.growth_a = p.growth_a;
    s.growth_b = p.growth_b;
    std::size_t sz = static_cast<std::size_t>(p.K) + 1;
    s.delta.assign(sz, 0.0);
    s.V.assign(sz, 0);
    s.nhat.assign(sz, 0);
    s.N.assign(sz, 0);
    s.L.assign(sz, 0);
    s.t.assign(sz, 0);
    s.M.assign(sz, 0);

    for (int k = 1; k <= p.K; ++k) {
        s.delta[k] = p.gamma / std::ldexp(1.0, k);
        s.L[k] = full_shift_gap(sys, s.radius(k))(1);
        double v = std::ldexp(1.0, k + 1) * std::log(static_cast<double>(s.L[k])) / p.gamma;
        s.V[k] = static_cast<long>(std::ceil(v));
        long n = s.V[k] + 1;
        while (!(best_mixture_deviation(phi, s.alpha(k), n) < 4.0 * s.delta[k])) {
            if (++n > p.max_nhat)
                fail(ErrorKind::infeasible, "budget-exceeded", "no admissible nhat within the cap at k = " + std::to_string(k));
        }
        if (n > p.max_nhat)
            fail(ErrorKind::infeasible, "budget-exceeded", "nhat " + std::to_string(n) + " exceeds the cap at k = " + std::to_string(k));
        s.nhat[k] = n;
    }
    for (int k = 1; k <= p.K; ++k) {
        long N = 1;
        if (k < p.K) N = std::max(N, slack_count(static_cast<double>(s.nhat[k + 1] + s.L[k + 1]), s.bound_a(k)));
        if (k > 1) {
            double sum = 0.0;
            for (int i = 1; i < k; ++i) sum += static_cast<double>(s.N[i] * (s.nhat[i] + s.L[i]));
            N = std::max(N, slack_count(sum, s.bound_b(k - 1)));
        }
        if (N > p.max_N)
            fail(ErrorKind::infeasible, "budget-exceeded", "N exceeds the cap at k = " + std::to_string(k));
        s.N[k] = N;
        s.t[k] = k == 1 ? N * s.nhat[1] + (N - 1) * s.L[1] : s.t[k - 1] + N * (s.nhat[k] + s.L[k]);
    }
    if (s.t[p.K] > p.max_t)
        fail(ErrorKind::infeasible, "budget-exceeded",
             "t_K = " + std::to_string(s.t[p.K]) + " exceeds the cap " + std::to_string(p.max_t));
    auto bad = schedule_violations(s);
    if (!bad.empty()) fail(ErrorKind::infeasible, "schedule-invalid", bad.front());
    return s;
}

SeparatedSet build_base_separated(const ShiftSystem& sys, const Observable& phi, MoranSchedule& s, int k,
                                  const MoranParams& p) {
    if (k < 1 || k > s.K) fail(ErrorKind::config, "bad-level", "level outside the schedule");
    long n = s.nhat[k];
    double alpha = s.alpha(k);
    double err = 4.0 * s.delta[k];
    std::size_t q = sys.alphabet().size();
    Symbol tail = sys.alphabet().tail();
    double full = std::pow(static_cast<double>(q), static_cast<double>(n));

    CandidateFamily cand;
    if (full <= p.candidate_cap) {
        cand = CandidateFamily::exhaustive(q, n, tail);
    } else {
        Mixture mix = best_mixture(phi, alpha, n);
        if (!(mix.deviation < err))
            fail(ErrorKind::infeasible, "empty-deviation", "no two-symbol mixture reaches the target at k = " + std::to_string(k));
        if (p.candidate_samples == 0) fail(ErrorKind::config, "bad-schedule", "candidate_samples must be positive");
        std::mt19937_64 rng(p.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(k));
        std::vector<Symbol> base(static_cast<std::size_t>(n), mix.lo);
        std::fill(base.begin(), base.begin() + mix.count_hi, mix.hi);
        std::set<std::vector<Symbol>> seen;
        std::vector<Symbol> flat;
        for (std::size_t tries = 0; seen.size() < p.candidate_samples && tries < 50 * p.candidate_samples; ++tries) {
            std::vector<Symbol> w = base;
            std::shuffle(w.begin(), w.end(), rng);
            if (seen.insert(w).second) flat.insert(flat.end(), w.begin(), w.end());
        }
        cand = CandidateFamily::from_words(std::move(flat), n, tail);
        cand.mark_sampled(full);
    }
    SeparationOptions opt;
    opt.workers = p.workers;
    SeparatedSet S = separated_in_deviation(sys, phi, DeviationSpec{alpha, err, n}, 9.0 * s.eps0 / 8.0, cand,
                                            Strategy::greedy, opt);
    S.sampled = S.sampled || cand.sampled();
    s.M[static_cast<std::size_t>(k)] = S.size();
    return S;
}

SegmentPlan level_plan(const MoranSchedule& s, int k, const SymbolicPoint* parent, const SeparatedSet& S,
                       const std::vector<std::uint32_t>& tuple) {
    if (static_cast<long>(tuple.size()) != s.N[k]) fail(ErrorKind::config, "bad-tuple", "tuple length differs from N_k");
    SegmentPlan plan;
    plan.eps = s.radius(k);
    long nh = s.nhat[k], L = s.L[k];
    long start = 0;
    if (k > 1) {
        if (!parent) fail(ErrorKind::config, "missing-parent", "levels above 1 need a parent center");
        plan.segments.push_back({*parent, 0, s.t[k - 1] - 1});
        start = s.t[k - 1] + L;
    }
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        if (tuple[i] >= S.size()) fail(ErrorKind::config, "bad-tuple", "tuple index outside S_k");
        long a = start + static_cast<long>(i) * (nh + L);
        plan.segments.push_back({S.members[tuple[i]], a, a + nh - 1});
    }
    return plan;
}

FractalLevel build_level(const ShiftSystem& sys, const FractalLevel* previous, const SeparatedSet& S,
                         const MoranSchedule& s, int k, Mode mode, const MoranParams& p) {
    if (k < 1 || k > s.K) fail(ErrorKind::config, "bad-level", "level outside the schedule");
    if (S.size() == 0) fail(ErrorKind::infeasible, "empty-deviation", "S_k is empty");
    if (k > 1 && !previous) fail(ErrorKind::config, "missing-parent", "levels above 1 need the previous level");
    std::size_t M = S.size();
    long N = s.N[k];
    double per = std::pow(static_cast<double>(M), static_cast<double>(N));
    std::size_t parents = previous ? previous->centers.size() : 1;
    double count = static_cast<double>(parents) * per;

    FractalLevel level;
    level.k = k;
    level.t = s.t[k];
    level.radius = s.radius(k);
    level.full_count = (previous ? previous->full_count : 1.0) * per;
    level.sampled = previous && previous->sampled;

    std::vector<std::pair<std::size_t, std::vector<std::uint32_t>>> picks;
    auto decode = [&](std::uint64_t code) {
        std::vector<std::uint32_t> digits(static_cast<std::size_t>(N));
        for (long i = N - 1; i >= 0; --i) {
            digits[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(code % M);
            code /= M;
        }
        return digits;
    };
    bool enumerate_all = mode == Mode::exact || count <= static_cast<double>(p.level_samples);
    if (mode == Mode::exact && count > static_cast<double>(p.max_centers))
        fail(ErrorKind::infeasible, "cap-exceeded",
             "level " + std::to_string(k) + " needs " + std::to_string(count) + " centers, cap " + std::to_string(p.max_centers));
    if (enumerate_all) {
        auto per_count = static_cast<std::uint64_t>(std::llround(per));
        for (std::size_t par = 0; par < parents; ++par)
            for (std::uint64_t c = 0; c < per_count; ++c) picks.push_back({par, decode(c)});
    } else {
        level.sampled = true;
        std::mt19937_64 rng(p.seed ^ (0xD1B54A32D192ED03ULL * static_cast<std::uint64_t>(k)));
        std::uniform_int_distribution<std::size_t> pick_parent(0, parents - 1);
        std::uniform_int_distribution<std::uint32_t> pick_digit(0, static_cast<std::uint32_t>(M - 1));
        std::set<std::pair<std::size_t, std::vector<std::uint32_t>>> seen;
        for (std::size_t tries = 0; seen.size() < p.level_samples && tries < 50 * p.level_samples; ++tries) {
            std::vector<std::uint32_t> d(static_cast<std::size_t>(N));
            std::size_t par = pick_parent(rng);
            for (auto& x : d) x = pick_digit(rng);
            seen.insert({par, std::move(d)});
        }
        picks.assign(seen.begin(), seen.end());
    }

    std::size_t n = picks.size();
    level.centers.resize(n);
    level.parent.resize(n);
    level.tuples.resize(n);
    std::vector<char> shadow_ok(n, 1);
    GapFunction gap = GapFunction::constant(static_cast<int>(s.L[k]), level.radius);
    parallel_for(n, p.workers, [&](std::size_t b, std::size_t e, unsigned) {
        for (std::size_t i = b; i < e; ++i) {
            const SymbolicPoint* par = previous ? &previous->centers[picks[i].first] : nullptr;
            SegmentPlan plan = level_plan(s, k, par, S, picks[i].second);
            level.centers[i] = glue(sys, plan, gap);
            shadow_ok[i] = verify_shadowing(sys, level.centers[i], plan, level.radius).pass;
            level.parent[i] = picks[i].first;
            level.tuples[i] = picks[i].second;
        }
    });
    for (std::size_t i = 0; i < n; ++i)
        if (!shadow_ok[i])
            fail(ErrorKind::certificate, "shadowing-failed", "glued center " + std::to_string(i) + " misses its plan");
    return level;
}

LevelReport verify_level(const ShiftSystem& sys, const FractalLevel& level, const FractalLevel* previous,
                         const MoranSchedule& s, const MoranParams& p) {
    LevelReport rep;
    rep.k = level.k;
    rep.sampled = level.sampled;
    const auto& C = level.centers;
    std::size_t n = C.size();
    double err = sys.error();
    double sep_thr = 17.0 * s.eps0 / 16.0 + 2.0 * err;
    double dis_thr = 2.0 * level.radius + 2.0 * err;
    double stop = std::max(sep_thr, dis_thr);
    unsigned W = std::max(1u, p.workers);

    // pairwise separation and disjointness
    std::vector<std::pair<std::size_t, std::size_t>> sample;
    if (level.sampled && n >= 2) {
        std::mt19937_64 rng(p.seed ^ (0xA24BAED4963EE407ULL * static_cast<std::uint64_t>(level.k)));
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t r = 0; r < p.pair_samples; ++r) {
            std::size_t a = pick(rng), b = pick(rng);
            if (a == b) continue;
            sample.push_back({std::min(a, b), std::max(a, b)});
        }
    }
    std::vector<CheckResult> sep(W), dis(W);
    auto pair_check = [&](std::size_t i, std::size_t j, unsigned w) {
        double v = sys.bowen_lower(C[i], C[j], level.t, stop);
        keep_worst(sep[w], v - sep_thr, i, j, v > sep_thr);
        keep_worst(dis[w], v - dis_thr, i, j, v > dis_thr);
    };
    if (level.sampled) {
        parallel_for(sample.size(), W, [&](std::size_t b, std::size_t e, unsigned w) {
            for (std::size_t r = b; r < e; ++r) pair_check(sample[r].first, sample[r].second, w);
        });
    } else {
        parallel_for(n, W, [&](std::size_t b, std::size_t e, unsigned w) {
            for (std::size_t i = b; i < e; ++i)
                for (std::size_t j = i + 1; j < n; ++j) pair_check(i, j, w);
        });
    }
    for (unsigned w = 0; w < W; ++w) {
        merge(rep.separation, sep[w]);
        merge(rep.disjointness, dis[w]);
    }
    if (level.k == 1 || !previous) return rep;

    // nesting into the parent ball and the sibling dichotomy
    long tp = s.t[level.k - 1];
    double r = level.radius;
    double r_parent = s.radius(level.k - 1);
    std::vector<CheckResult> nest(W), sib(W);
    parallel_for(n, W, [&](std::size_t b, std::size_t e, unsigned w) {
        for (std::size_t i = b; i < e; ++i) {
            Distance d = sys.bowen_metric(C[i], previous->centers[level.parent[i]], tp);
            double m = r - (d.value + d.error);
            keep_worst(nest[w], m, i, level.parent[i], m >= 0.0);
        }
    });
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return level.parent[a] < level.parent[b]; });
    std::vector<std::pair<std::size_t, std::size_t>> groups;  // [begin, end) in order
    for (std::size_t g = 0; g < n;) {
        std::size_t h = g;
        while (h < n && level.parent[order[h]] == level.parent[order[g]]) ++h;
        groups.push_back({g, h});
        g = h;
    }
    parallel_for(groups.size(), W, [&](std::size_t b, std::size_t e, unsigned w) {
        for (std::size_t g = b; g < e; ++g)
            for (std::size_t x = groups[g].first; x < groups[g].second; ++x)
                for (std::size_t y = x + 1; y < groups[g].second; ++y) {
                    std::size_t i = std::min(order[x], order[y]), j = std::max(order[x], order[y]);
                    if (level.tuples[i] == level.tuples[j]) continue;
                    Distance close = sys.bowen_metric(C[i], C[j], tp);
                    double m1 = r_parent - (close.value + close.error);
                    double far = sys.bowen_lower(C[i], C[j], level.t, sep_thr);
                    double m2 = far - sep_thr;
                    keep_worst(sib[w], std::min(m1, m2), i, j, m1 > 0.0 && m2 > 0.0);
                }
    });
    for (unsigned w = 0; w < W; ++w) {
        merge(rep.nesting, nest[w]);
        merge(rep.siblings, sib[w]);
    }
    return rep;
}

OscillationCertificate oscillation_certificate(const ShiftSystem& sys, const Observable& phi, const MoranSchedule& s,
                                               const SymbolicPoint& x) {
    OscillationCertificate cert;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int k = 1; k <= s.K; ++k) {
        Checkpoint c;
        c.k = k;
        c.t = s.t[k];
        c.average = birkhoff_average(phi, x, c.t);
        c.alpha = s.alpha(k);
        c.var = phi.modulus(sys.alphabet(), s.radius(k));
        c.bound = c.var + 4.0 * s.delta[k] +
                  2.0 * static_cast<double>(s.t[k - 1] + s.N[k] * s.L[k]) * phi.sup_norm() / static_cast<double>(c.t);
        c.ok = std::fabs(c.average - c.alpha) <= c.bound + c.var;
        if (!c.ok) cert.pass = false;
        lo = std::min(lo, c.average);
        hi = std::max(hi, c.average);
        cert.checkpoints.push_back(c);
    }
    cert.oscillation = cert.checkpoints.empty() ? 0.0 : hi - lo;
    return cert;
}

Representative representative_point(const ShiftSystem& sys, const Observable& phi, const MoranSchedule& s,
                                    const std::vector<FractalLevel>& levels, std::size_t leaf) {
    if (static_cast<int>(levels.size()) != s.K) fail(ErrorKind::config, "bad-level", "need one level per schedule depth");
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (levels[i].k != static_cast<int>(i) + 1) fail(ErrorKind::config, "bad-level", "levels are not chained 1..K");
    if (leaf >= levels.back().centers.size()) fail(ErrorKind::config, "bad-level", "leaf index outside level K");
    Representative r;
    r.point = levels.back().centers[leaf];
    r.certificate = oscillation_certificate(sys, phi, s, r.point);
    for (const auto& c : r.certificate.checkpoints)
        if (!c.ok)
            fail(ErrorKind::certificate, "bound-violated",
                 "|A - alpha| = " + std::to_string(std::fabs(c.average - c.alpha)) + " above B_k = " +
                     std::to_string(c.bound) + " at k = " + std::to_string(c.k));
    return r;
}

EmpiricalMeasure level_measure(const FractalLevel& level) {
    if (level.sampled) fail(ErrorKind::config, "sampled-level", "level measures need an exact-mode level");
    return EmpiricalMeasure::uniform(level.centers);
}

double mass_exponent(const MoranSchedule& s, double S_target) {
    return (S_target - 4.0 * s.gamma) * std::fabs(std::log(5.0 * s.eps0));
}

MassCertificate ball_bound_check(const ShiftSystem& sys, const FractalLevel& level, const MoranSchedule& s,
                                 double S_target, const std::vector<std::pair<SymbolicPoint, long>>& samples,
                                 int floor_level, unsigned workers) {
    if (floor_level < 1 || floor_level > s.K) fail(ErrorKind::config, "bad-level", "floor level outside the schedule");
    long floor_t = s.t[floor_level];
    for (const auto& smp : samples)
        if (smp.second < floor_t)
            fail(ErrorKind::config, "bad-horizon", "ball length " + std::to_string(smp.second) + " below t_floor");
    EmpiricalMeasure nu = level_measure(level);
    MassCertificate cert = mass_distribution_check(sys, nu, level.centers, s.eps0 / 4.0, floor_t, mass_exponent(s, S_target),
                                                   samples, workers);
    cert.measure_ref = "nu_" + std::to_string(level.k);
    return cert;
}

}  // namespace mdim
