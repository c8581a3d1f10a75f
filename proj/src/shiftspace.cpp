#include "mdim/shiftspace.hpp"

#include <algorithm>
#include <cmath>

namespace mdim {

namespace {

// First coordinate in [c0, c1] where x and y differ, or c1 + 1.
long first_diff(const SymbolicPoint& x, const SymbolicPoint& y, long c0, long c1) {
    long c = c0;
    long blo = std::max(x.lo(), y.lo());
    long bhi = std::min(x.hi(), y.hi());
    for (; c <= c1 && c < blo; ++c)
        if (x.at(c) != y.at(c)) return c;
    if (c <= c1 && c <= bhi) {
        long end = std::min(c1, bhi);
        const Symbol* px = x.word().data() + (c - x.lo());
        const Symbol* py = y.word().data() + (c - y.lo());
        long len = end - c + 1;
        auto r = std::mismatch(px, px + len, py);
        if (r.first != px + len) return c + (r.first - px);
        c = end + 1;
    }
    long top = std::max(x.hi(), y.hi());
    for (; c <= c1; ++c) {
        if (c > top) return x.tail() == y.tail() ? c1 + 1 : c;
        if (x.at(c) != y.at(c)) return c;
    }
    return c1 + 1;
}

// Last coordinate in [c0, c1] where x and y differ, or c0 - 1.
long last_diff(const SymbolicPoint& x, const SymbolicPoint& y, long c0, long c1) {
    long c = c1;
    if (x.tail() == y.tail()) c = std::min(c1, std::max(x.hi(), y.hi()));
    for (; c >= c0; --c) {
        if (x.tail() == y.tail() && c < std::min(x.lo(), y.lo())) return c0 - 1;
        if (x.at(c) != y.at(c)) return c;
    }
    return c0 - 1;
}

}  // namespace

SymbolicPoint::SymbolicPoint(long lo, std::vector<Symbol> word, Symbol tail)
    : lo_(lo), word_(std::move(word)), tail_(tail) {
    if (word_.empty()) {
        lo_ = 0;
        word_.push_back(tail_);
    }
    // keep 0 inside the window
    if (lo_ > 0) {
        word_.insert(word_.begin(), static_cast<std::size_t>(lo_), tail_);
        lo_ = 0;
    }
    if (hi() < 0) word_.resize(word_.size() + static_cast<std::size_t>(-hi()), tail_);
}

bool SymbolicPoint::operator==(const SymbolicPoint& o) const {
    if (tail_ != o.tail_) return false;
    long a = std::min(lo(), o.lo()), b = std::max(hi(), o.hi());
    return first_diff(*this, o, a, b) > b;
}

void SymbolicPoint::validate(const Alphabet& a) const {
    if (tail_ >= a.size()) fail(ErrorKind::config, "bad-point", "tail symbol out of range");
    for (Symbol s : word_)
        if (s >= a.size()) fail(ErrorKind::config, "bad-point", "symbol out of range");
}

SymbolicPoint shift_apply(const SymbolicPoint& x, long k) {
    return SymbolicPoint(x.lo() - k, x.word(), x.tail());
}

SymbolicPoint make_point(std::vector<Symbol> word, Symbol tail) {
    return SymbolicPoint(0, std::move(word), tail);
}

ShiftSystem::ShiftSystem(Alphabet alphabet, int truncation_radius)
    : alphabet_(std::move(alphabet)), m_(truncation_radius) {
    if (m_ < 1 || m_ > 60) fail(ErrorKind::config, "bad-truncation", "truncation radius must lie in [1, 60]");
    weights_.resize(static_cast<std::size_t>(m_) + 1);
    for (int j = 0; j <= m_; ++j) weights_[j] = std::ldexp(1.0, -j);
    error_ = tail_bound() + 1e-12 * (1.0 + 3.0 * alphabet_.diam());
}

double ShiftSystem::tail_bound() const { return 4.0 * alphabet_.diam() * std::ldexp(1.0, -m_); }

double ShiftSystem::term(const SymbolicPoint& x, const SymbolicPoint& y, long i) const {
    double s = 0.0;
    for (long j = -m_; j <= m_; ++j) {
        Symbol a = x.at(i + j), b = y.at(i + j);
        if (a != b) s += alphabet_.dist(a, b) * weights_[static_cast<std::size_t>(std::labs(j))];
    }
    return s;
}

namespace {

// conv[i - i0] = truncated d'(sigma^i x, sigma^i y) for i in [i0, i1], in O(i1 - i0 + m).
void conv_range(const ShiftSystem& sys, const SymbolicPoint& x, const SymbolicPoint& y, long i0, long i1,
                std::vector<double>& out) {
    long m = sys.truncation();
    long c0 = i0 - m, len = (i1 - i0 + 1) + 2 * m;
    std::vector<double> delta(static_cast<std::size_t>(len));
    const Alphabet& A = sys.alphabet();
    for (long k = 0; k < len; ++k) {
        Symbol a = x.at(c0 + k), b = y.at(c0 + k);
        delta[k] = a == b ? 0.0 : A.dist(a, b);
    }
    const auto& w = sys.weights();
    long count = i1 - i0 + 1;
    out.assign(static_cast<std::size_t>(count), 0.0);
    // left part: coordinates i-m..i ; delta index of coordinate c is c - c0
    double lf = 0.0;
    for (long j = 0; j <= m; ++j) lf += delta[(i0 - j) - c0] * w[j];
    out[0] = lf;
    for (long i = i0 + 1; i <= i1; ++i) {
        lf = lf * 0.5 - delta[(i - 1 - m) - c0] * w[m] * 0.5 + delta[i - c0];
        out[i - i0] = lf;
    }
    // right part: coordinates i+1..i+m
    double rt = 0.0;
    for (long j = 1; j <= m; ++j) rt += delta[(i1 + j) - c0] * w[j];
    out[count - 1] += rt;
    for (long i = i1 - 1; i >= i0; --i) {
        rt = (rt + delta[(i + 1) - c0]) * 0.5 - delta[(i + m + 1) - c0] * w[m] * 0.5;
        out[i - i0] += rt;
    }
    for (double& v : out)
        if (v < 0.0) v = 0.0;
}

}  // namespace

Distance ShiftSystem::product_metric(const SymbolicPoint& x, const SymbolicPoint& y) const {
    return Distance{term(x, y, 0), error_};
}

Distance ShiftSystem::bowen_metric(const SymbolicPoint& x, const SymbolicPoint& y, long n) const {
    if (n < 1) fail(ErrorKind::config, "bad-horizon", "Bowen metric needs n >= 1");
    long c0 = -m_, c1 = n - 1 + m_;
    long p = first_diff(x, y, c0, c1);
    if (p > c1) return Distance{0.0, error_};
    long q = last_diff(x, y, p, c1);
    long i0 = std::max(0L, p - m_), i1 = std::min(n - 1, q + m_);
    std::vector<double> conv;
    conv_range(*this, x, y, i0, i1, conv);
    return Distance{*std::max_element(conv.begin(), conv.end()), error_};
}

long ShiftSystem::reach(const SymbolicPoint& x, const SymbolicPoint& y, long n, double thr) const {
    long c0 = -m_, c1 = n - 1 + m_;
    long p = first_diff(x, y, c0, c1);
    if (p > c1) return thr > 0.0 ? n : 0;
    long q = last_diff(x, y, p, c1);
    long i0 = std::max(0L, p - m_), i1 = std::min(n - 1, q + m_);
    if (thr <= 0.0) return 0;
    std::vector<double> conv;
    conv_range(*this, x, y, i0, i1, conv);
    for (long i = i0; i <= i1; ++i)
        if (conv[i - i0] >= thr) return i;
    return n;
}

double ShiftSystem::bowen_lower(const SymbolicPoint& x, const SymbolicPoint& y, long n, double stop_above) const {
    long c0 = -m_, c1 = n - 1 + m_;
    long p = first_diff(x, y, c0, c1);
    if (p > c1) return 0.0;
    double probe = term(x, y, std::clamp(p, 0L, n - 1));
    if (probe > stop_above) return probe;
    long q = last_diff(x, y, p, c1);
    long i0 = std::max(0L, p - m_), i1 = std::min(n - 1, q + m_);
    std::vector<double> conv;
    conv_range(*this, x, y, i0, i1, conv);
    return *std::max_element(conv.begin(), conv.end());
}

bool ShiftSystem::separated(const SymbolicPoint& x, const SymbolicPoint& y, long n, double thr) const {
    double margin = thr + 2.0 * error_;
    return bowen_lower(x, y, n, margin) > margin;
}

Observable::Observable(std::vector<double> table) : table_(std::move(table)) {
    if (table_.empty()) fail(ErrorKind::config, "bad-observable", "empty observable table");
    min_ = *std::min_element(table_.begin(), table_.end());
    max_ = *std::max_element(table_.begin(), table_.end());
    sup_ = std::max(std::fabs(min_), std::fabs(max_));
}

Observable Observable::valuation(const Alphabet& a) {
    if (!a.has_valuation()) fail(ErrorKind::config, "bad-observable", "alphabet has no valuation");
    return Observable(a.valuation());
}

Observable Observable::constant(double c, std::size_t symbols) {
    return Observable(std::vector<double>(symbols, c));
}

double Observable::modulus(const Alphabet& a, double eps) const {
    double v = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p)
        for (std::size_t q = p + 1; q < a.size(); ++q)
            if (a.dist(static_cast<Symbol>(p), static_cast<Symbol>(q)) < eps)
                v = std::max(v, std::fabs(table_[p] - table_[q]));
    return v;
}

ShiftSystem product_system(const ShiftSystem& a, const ShiftSystem& b) {
    if (a.truncation() != b.truncation())
        fail(ErrorKind::config, "truncation-mismatch", "product factors must share the truncation radius");
    return ShiftSystem(product_alphabet(a.alphabet(), b.alphabet()), a.truncation());
}

SymbolicPoint pair_point(const SymbolicPoint& x, const SymbolicPoint& y, std::size_t b_size) {
    long lo = std::min(x.lo(), y.lo()), hi = std::max(x.hi(), y.hi());
    std::vector<Symbol> w(static_cast<std::size_t>(hi - lo + 1));
    for (long c = lo; c <= hi; ++c)
        w[c - lo] = static_cast<Symbol>(x.at(c) * b_size + y.at(c));
    return SymbolicPoint(lo, std::move(w), static_cast<Symbol>(x.tail() * b_size + y.tail()));
}

}  // namespace mdim
