#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mdim/birkhoff.hpp"

namespace mdim {

struct BowenBall {
    SymbolicPoint center;
    std::size_t center_index = 0;  // into the target list when drawn from it
    long n = 1;
    double eps = 0.0;
};

struct CoverFamily {
    std::vector<BowenBall> elements;
    long min_n = 0;
    void add(BowenBall b);
};

double cover_weight(const CoverFamily& cover, double s);

// Every target inside some element, membership certified with the error margin.
bool covers(const ShiftSystem& sys, const CoverFamily& cover, const std::vector<SymbolicPoint>& targets);

// Balls B_n(c, eps) around the given centers.
CoverFamily cover_from_centers(const std::vector<SymbolicPoint>& centers, long n, double eps);

// Greedy cover at a probe exponent: repeatedly take the ball (center from
// the targets, n in [N, n_max]) with the least weight per newly covered
// target; ties prefer larger n, then the lower center index.
CoverFamily greedy_bowen_cover(const BallTable& table, long N, long n_max, double probe_s);
CoverFamily greedy_bowen_cover(const ShiftSystem& sys, const std::vector<SymbolicPoint>& targets, double eps, long N,
                               long n_max, double probe_s);

struct CriticalExponent {
    double eps = 0.0;
    long N = 0;
    long n_max = 0;
    double s_lo = 0.0;
    double s_hi = 0.0;
    double weight_lo = 0.0;
    double weight_hi = 0.0;
    double value = 0.0;  // bracket midpoint
    int probes = 0;
    std::string bound_side = "upper";
};

struct BisectionOptions {
    double s_min = 0.0;
    double s_max = -1.0;  // negative: log |K| + 1
    double tolerance = 1e-3;
};

CriticalExponent bowen_entropy_estimate(const BallTable& table, std::size_t alphabet_size, long N, long n_max,
                                        const BisectionOptions& opt = {});
CriticalExponent bowen_entropy_estimate(const ShiftSystem& sys, const std::vector<SymbolicPoint>& targets, double eps,
                                        long N, long n_max, const BisectionOptions& opt = {});

struct CapacityRow {
    long N;
    std::size_t count;  // greedy uniform-N cover size
    double exponent;    // log count / N, the critical exponent of this cover
};

struct CapacityEstimate {
    double eps = 0.0;
    std::vector<CapacityRow> rows;
    double upper = 0.0;  // max trailing difference quotient of log count over N
    double lower = 0.0;
    std::string bound_side = "upper";
};

std::size_t uniform_cover_count(const BallTable& table, long N);
CapacityEstimate capacity_entropy(const BallTable& table, const std::vector<long>& N_grid);
CapacityEstimate capacity_entropy(const ShiftSystem& sys, const std::vector<SymbolicPoint>& targets, double eps,
                                  const std::vector<long>& N_grid);

struct CheckedBall {
    SymbolicPoint center;
    long n = 0;
    double measure = 0.0;
    double bound = 0.0;
    bool intersects = false;
    bool ok = true;
};

struct MassCertificate {
    std::string measure_ref;
    double eps = 0.0;
    long N = 0;
    double s0 = 0.0;
    std::vector<CheckedBall> balls;
    bool pass = true;
    std::optional<std::size_t> violation;  // first failing ball
    std::string bound_side = "lower";
};

// Balls with n < N are skipped. The measure of a ball counts every atom not
// certified outside it, so the reported mass never undercounts.
MassCertificate mass_distribution_check(const ShiftSystem& sys, const EmpiricalMeasure& mu,
                                        const std::vector<SymbolicPoint>& targets, double eps, long N, double s0,
                                        const std::vector<std::pair<SymbolicPoint, long>>& samples,
                                        unsigned workers = 1);

}  // namespace mdim
