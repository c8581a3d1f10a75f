#pragma once

#include <vector>

#include "mdim/metricspace.hpp"

namespace mdim {

// A bi-infinite sequence stored over the window [lo, hi] and filled with the
// tail symbol everywhere else.
class SymbolicPoint {
public:
    SymbolicPoint() : word_{0} {}
    SymbolicPoint(long lo, std::vector<Symbol> word, Symbol tail);

    static SymbolicPoint constant(Symbol s) { return SymbolicPoint(0, {s}, s); }

    long lo() const { return lo_; }
    long hi() const { return lo_ + static_cast<long>(word_.size()) - 1; }
    Symbol tail() const { return tail_; }
    const std::vector<Symbol>& word() const { return word_; }

    Symbol at(long i) const {
        long k = i - lo_;
        if (k < 0 || k >= static_cast<long>(word_.size())) return tail_;
        return word_[static_cast<std::size_t>(k)];
    }

    // Equality of the represented sequences, not of the storage.
    bool operator==(const SymbolicPoint& o) const;
    bool operator!=(const SymbolicPoint& o) const { return !(*this == o); }

    void validate(const Alphabet& a) const;

private:
    long lo_ = 0;
    std::vector<Symbol> word_;
    Symbol tail_ = 0;
};

SymbolicPoint shift_apply(const SymbolicPoint& x, long k);

// Coordinates [0, word.size()) set, tail elsewhere.
SymbolicPoint make_point(std::vector<Symbol> word, Symbol tail);

struct Distance {
    double value = 0.0;
    double error = 0.0;  // true distance lies in [value, value + error]
};

class ShiftSystem {
public:
    ShiftSystem() = default;
    ShiftSystem(Alphabet alphabet, int truncation_radius);

    const Alphabet& alphabet() const { return alphabet_; }
    int truncation() const { return m_; }
    double tail_bound() const;
    // tail bound plus floating point slack; the certified error of every distance
    double error() const { return error_; }

    Distance product_metric(const SymbolicPoint& x, const SymbolicPoint& y) const;
    Distance bowen_metric(const SymbolicPoint& x, const SymbolicPoint& y, long n) const;

    // Truncated d'(sigma^i x, sigma^i y).
    double term(const SymbolicPoint& x, const SymbolicPoint& y, long i) const;

    // Number of leading times i = 0, 1, ... (at most n) with term < thr.
    // x lies in the Bowen ball B_k(y, .) at threshold thr iff k <= reach.
    long reach(const SymbolicPoint& x, const SymbolicPoint& y, long n, double thr) const;

    // Certified d_n(x, y) > thr: some truncated term exceeds thr by more than
    // twice the error. Stops at the first witness.
    bool separated(const SymbolicPoint& x, const SymbolicPoint& y, long n, double thr) const;

    // Largest lower bound on d_n found before stopping; equals the truncated
    // d_n when no term beats stop_above.
    double bowen_lower(const SymbolicPoint& x, const SymbolicPoint& y, long n, double stop_above) const;

    const std::vector<double>& weights() const { return weights_; }

private:
    Alphabet alphabet_;
    int m_ = 20;
    double error_ = 0.0;
    std::vector<double> weights_;  // 2^-|j| for j in [0, m]
};

// Coordinate-0 observable phi(x) = table[x_0].
class Observable {
public:
    Observable() = default;
    explicit Observable(std::vector<double> table);

    static Observable valuation(const Alphabet& a);
    static Observable constant(double c, std::size_t symbols);

    int window_radius() const { return 0; }
    double value(const SymbolicPoint& x) const { return table_[x.at(0)]; }
    double at_symbol(Symbol s) const { return table_[s]; }
    double sup_norm() const { return sup_; }
    double min_value() const { return min_; }
    double max_value() const { return max_; }
    bool is_constant() const { return max_ == min_; }
    const std::vector<double>& table() const { return table_; }

    // var(phi, eps) = sup |phi(w) - phi(z)| over d'(w, z) < eps; for a
    // coordinate-0 observable d(w_0, z_0) <= d'(w, z), so the alphabet pairs
    // bound it exactly.
    double modulus(const Alphabet& a, double eps) const;

private:
    std::vector<double> table_;
    double sup_ = 0.0, min_ = 0.0, max_ = 0.0;
};

ShiftSystem product_system(const ShiftSystem& a, const ShiftSystem& b);
// Pairs coordinates of x (over a's alphabet) and y (over b's alphabet).
SymbolicPoint pair_point(const SymbolicPoint& x, const SymbolicPoint& y, std::size_t b_size);

}  // namespace mdim
