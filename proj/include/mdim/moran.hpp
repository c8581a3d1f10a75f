#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdim/birkhoff.hpp"
#include "mdim/caratheodory.hpp"
#include "mdim/specification.hpp"

namespace mdim {

struct MoranParams {
    double eps0 = 0.25;
    double gamma = 0.05;
    double alpha1 = 0.2;
    double alpha2 = 0.8;
    int K = 3;
    // declared growth bounds b(k) = c / k for conditions A and B
    double growth_a = 1100.0;
    double growth_b = 1700.0;
    long max_t = 10000;
    long max_nhat = 20000;
    long max_N = 1000;
    std::size_t max_centers = 1 << 16;
    // S_k candidates: exhaustive when |K|^nhat fits, else type-class samples
    double candidate_cap = 1 << 16;
    std::size_t candidate_samples = 2;
    std::size_t level_samples = 256;  // centers drawn per level in sampled mode
    std::size_t pair_samples = 20000;  // pairs checked per level in sampled mode
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

// Per-level vectors are indexed by k = 1..K; entry 0 is unused except t[0] = 0.
struct MoranSchedule {
    double eps0 = 0.0;
    double gamma = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    int K = 0;
    double growth_a = 0.0;
    double growth_b = 0.0;
    std::vector<double> delta;
    std::vector<long> V;
    std::vector<long> nhat;
    std::vector<long> N;
    std::vector<long> L;
    std::vector<long> t;
    std::vector<std::size_t> M;  // filled by build_base_separated

    static int rho(int k) { return ((k + 1) % 2) + 1; }
    double alpha(int k) const { return rho(k) == 1 ? alpha1 : alpha2; }
    double radius(int k) const;  // eps0 / 2^(5 + k)
    double bound_a(int k) const { return growth_a / k; }
    double bound_b(int k) const { return growth_b / k; }
};

// Invariant violations, empty when the schedule is sound. Growth condition A
// needs nhat_{k+1}, so it is checked for k < K only.
std::vector<std::string> schedule_violations(const MoranSchedule& s);

// Smallest deviation |A - alpha| reachable by a length-n word mixing two
// symbols; infinity when alpha lies outside the observable's range.
double best_mixture_deviation(const Observable& phi, double alpha, long n);

MoranSchedule build_schedule(const ShiftSystem& sys, const Observable& phi, const MoranParams& p);

// Maximal (nhat_k, 9 eps0 / 8)-separated subset of the deviation set
// P(alpha_rho(k), 4 delta_k, nhat_k); records M_k.
SeparatedSet build_base_separated(const ShiftSystem& sys, const Observable& phi, MoranSchedule& s, int k,
                                  const MoranParams& p);

struct FractalLevel {
    int k = 0;
    long t = 0;
    double radius = 0.0;
    std::vector<SymbolicPoint> centers;
    std::vector<std::size_t> parent;                 // index into the previous level
    std::vector<std::vector<std::uint32_t>> tuples;  // indices into S_k
    bool sampled = false;
    double full_count = 0.0;  // prod M_i^N_i
};

// The plan gluing a parent (or nothing at level 1) with one N_k-tuple.
SegmentPlan level_plan(const MoranSchedule& s, int k, const SymbolicPoint* parent, const SeparatedSet& S,
                       const std::vector<std::uint32_t>& tuple);

FractalLevel build_level(const ShiftSystem& sys, const FractalLevel* previous, const SeparatedSet& S,
                         const MoranSchedule& s, int k, Mode mode, const MoranParams& p);

struct CheckResult {
    bool pass = true;
    std::size_t checked = 0;
    double worst_margin = 0.0;  // smallest certified margin seen; negative on failure
    std::size_t a = 0, b = 0;   // worst pair or edge
};

struct LevelReport {
    int k = 0;
    bool sampled = false;
    CheckResult separation;
    CheckResult disjointness;
    CheckResult nesting;
    CheckResult siblings;
    bool pass() const { return separation.pass && disjointness.pass && nesting.pass && siblings.pass; }
};

LevelReport verify_level(const ShiftSystem& sys, const FractalLevel& level, const FractalLevel* previous,
                         const MoranSchedule& s, const MoranParams& p);

struct Checkpoint {
    int k;
    long t;
    double average;
    double alpha;
    double bound;  // B_k
    double var;    // var(phi, r_k)
    bool ok;
};

struct OscillationCertificate {
    std::vector<Checkpoint> checkpoints;
    double oscillation = 0.0;  // max minus min of the checkpoint averages
    bool pass = true;
};

OscillationCertificate oscillation_certificate(const ShiftSystem& sys, const Observable& phi, const MoranSchedule& s,
                                               const SymbolicPoint& x);

struct Representative {
    SymbolicPoint point;
    OscillationCertificate certificate;
};

// The level-K center as the finite-depth representative; throws
// bound-violated when a checkpoint misses its bound.
Representative representative_point(const ShiftSystem& sys, const Observable& phi, const MoranSchedule& s,
                                    const std::vector<FractalLevel>& levels, std::size_t leaf);

EmpiricalMeasure level_measure(const FractalLevel& level);

// Mass exponent (S_target - 4 gamma) |log 5 eps0|.
double mass_exponent(const MoranSchedule& s, double S_target);

// nu_K(B_n(x, eps0 / 4)) <= exp(-n (S_target - 4 gamma) |log 5 eps0|) for
// every sampled ball; every n must be at least t_floor.
MassCertificate ball_bound_check(const ShiftSystem& sys, const FractalLevel& level, const MoranSchedule& s,
                                 double S_target, const std::vector<std::pair<SymbolicPoint, long>>& samples,
                                 int floor_level, unsigned workers = 1);

}  // namespace mdim
