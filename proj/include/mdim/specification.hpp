#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdim/shiftspace.hpp"

namespace mdim {

class GapFunction {
public:
    GapFunction() = default;
    static GapFunction constant(int value, double eps);
    // values[n - 1] = L(n); the last entry extends to larger n
    static GapFunction tabulated(std::vector<int> values, double eps);

    int operator()(long n) const;
    bool is_constant() const { return constant_; }
    double eps() const { return eps_; }
    const std::vector<int>& values() const { return values_; }

    bool nondecreasing() const;
    // L(2n)/(2n) <= L(n)/n for every tabulated n >= threshold
    bool tempered(long threshold = 1) const;
    void validate(long threshold = 1) const;

private:
    bool constant_ = true;
    std::vector<int> values_{2};
    double eps_ = 0.0;
};

// Constant gap 2 * max(1, ceil(log2(8 (1 + diam) / eps))).
GapFunction full_shift_gap(const ShiftSystem& sys, double eps);

struct Segment {
    SymbolicPoint source;
    long a = 0;
    long b = 0;
};

struct SegmentPlan {
    std::vector<Segment> segments;
    double eps = 0.0;
};

struct PlanViolation {
    std::size_t index;  // constraint between segments index and index + 1, or ordering of index
    long gap;
    long required;
    std::string what;
};

std::optional<PlanViolation> check_plan(const SegmentPlan& plan, const GapFunction& gap);

// Copies each source over its block, extended into the neighbouring gaps up
// to their midpoints (odd gaps give the extra coordinate to the earlier
// block); the outer edges extend by half a gap and the rest is tail.
SymbolicPoint glue(const ShiftSystem& sys, const SegmentPlan& plan, const GapFunction& gap);

struct ShadowReport {
    bool pass = true;
    std::vector<double> per_segment;  // truncated d_len(sigma^a y, x_j)
    std::size_t worst_segment = 0;
    long worst_i = 0;
    double worst = 0.0;
    double error = 0.0;
};

ShadowReport verify_shadowing(const ShiftSystem& sys, const SymbolicPoint& y, const SegmentPlan& plan, double eps);

}  // namespace mdim
