#include "mdim/specification.hpp"

#include <algorithm>
#include <cmath>

namespace mdim {

GapFunction GapFunction::constant(int value, double eps) {
    if (value < 1) fail(ErrorKind::config, "bad-gap", "gap values must be positive");
    GapFunction g;
    g.constant_ = true;
    g.values_ = {value};
    g.eps_ = eps;
    return g;
}

GapFunction GapFunction::tabulated(std::vector<int> values, double eps) {
    if (values.empty()) fail(ErrorKind::config, "bad-gap", "empty gap table");
    for (int v : values)
        if (v < 1) fail(ErrorKind::config, "bad-gap", "gap values must be positive");
    GapFunction g;
    g.constant_ = false;
    g.values_ = std::move(values);
    g.eps_ = eps;
    return g;
}

int GapFunction::operator()(long n) const {
    if (constant_) return values_[0];
    if (n < 1) return values_[0];
    std::size_t i = static_cast<std::size_t>(n - 1);
    return i < values_.size() ? values_[i] : values_.back();
}

bool GapFunction::nondecreasing() const {
    return std::is_sorted(values_.begin(), values_.end());
}

bool GapFunction::tempered(long threshold) const {
    if (constant_) return true;
    long top = static_cast<long>(values_.size());
    for (long n = std::max(1L, threshold); 2 * n <= top; ++n)
        if (static_cast<double>((*this)(2 * n)) / static_cast<double>(2 * n) >
            static_cast<double>((*this)(n)) / static_cast<double>(n))
            return false;
    return true;
}

void GapFunction::validate(long threshold) const {
    if (!nondecreasing()) fail(ErrorKind::config, "bad-gap", "gap function must be nondecreasing");
    if (!tempered(threshold)) fail(ErrorKind::config, "bad-gap", "gap function is not tempered on the table");
}

GapFunction full_shift_gap(const ShiftSystem& sys, double eps) {
    if (!(eps > 0.0)) fail(ErrorKind::config, "bad-eps", "gap scale must be positive");
    double x = 8.0 * (1.0 + sys.alphabet().diam()) / eps;
    // smallest g with 2^g >= x, computed without trusting log2 near integers
    int g = static_cast<int>(std::ceil(std::log2(x)));
    while (std::ldexp(1.0, g) < x) ++g;
    while (std::ldexp(1.0, g - 1) >= x) --g;
    return GapFunction::constant(2 * std::max(1, g), eps);
}

std::optional<PlanViolation> check_plan(const SegmentPlan& plan, const GapFunction& gap) {
    const auto& s = plan.segments;
    for (std::size_t j = 0; j < s.size(); ++j) {
        if (s[j].a < 0) return PlanViolation{j, s[j].a, 0, "negative block start"};
        if (s[j].a > s[j].b) return PlanViolation{j, s[j].b - s[j].a, 0, "block end before start"};
        if (j + 1 < s.size()) {
            long g = s[j + 1].a - s[j].b;
            long need = gap(s[j + 1].b - s[j + 1].a);
            if (s[j].b >= s[j + 1].a) return PlanViolation{j, g, 1, "blocks overlap"};
            if (g < need) return PlanViolation{j, g, need, "gap below L(b - a) of the next block"};
        }
    }
    return std::nullopt;
}

SymbolicPoint glue(const ShiftSystem& sys, const SegmentPlan& plan, const GapFunction& gap) {
    if (plan.segments.empty()) fail(ErrorKind::config, "inadmissible-plan", "plan has no segments");
    if (auto v = check_plan(plan, gap))
        fail(ErrorKind::infeasible, "inadmissible-plan",
             v->what + " at segment " + std::to_string(v->index) + " (gap " + std::to_string(v->gap) + ", required " +
                 std::to_string(v->required) + ")");
    const auto& s = plan.segments;
    std::size_t k = s.size();
    std::vector<long> lo(k), hi(k);
    for (std::size_t j = 0; j < k; ++j) {
        lo[j] = s[j].a;
        hi[j] = s[j].b;
    }
    for (std::size_t j = 0; j + 1 < k; ++j) {
        long free = s[j + 1].a - s[j].b - 1;
        hi[j] += (free + 1) / 2;
        lo[j + 1] -= free / 2;
    }
    lo[0] -= (gap(s[0].b - s[0].a) + 1) / 2;
    hi[k - 1] += (gap(s[k - 1].b - s[k - 1].a) + 1) / 2;

    Symbol tail = sys.alphabet().tail();
    long wlo = std::min(0L, lo[0]);
    std::vector<Symbol> word(static_cast<std::size_t>(hi[k - 1] - wlo + 1), tail);
    for (std::size_t j = 0; j < k; ++j)
        for (long i = lo[j]; i <= hi[j]; ++i) word[static_cast<std::size_t>(i - wlo)] = s[j].source.at(i - s[j].a);
    return SymbolicPoint(wlo, std::move(word), tail);
}

ShadowReport verify_shadowing(const ShiftSystem& sys, const SymbolicPoint& y, const SegmentPlan& plan, double eps) {
    ShadowReport r;
    r.error = sys.error();
    for (std::size_t j = 0; j < plan.segments.size(); ++j) {
        const Segment& seg = plan.segments[j];
        long len = seg.b - seg.a + 1;
        SymbolicPoint ys = shift_apply(y, seg.a);
        double d = sys.bowen_metric(ys, seg.source, len).value;
        r.per_segment.push_back(d);
        if (j == 0 || d > r.worst) {
            r.worst = d;
            r.worst_segment = j;
            r.worst_i = seg.a;
            if (!(d + r.error < eps)) {
                for (long i = 0; i < len; ++i)
                    if (!(sys.term(ys, seg.source, i) + r.error < eps)) {
                        r.worst_i = seg.a + i;
                        break;
                    }
            }
        }
        if (!(d + r.error < eps)) r.pass = false;
    }
    return r;
}

}  // namespace mdim
