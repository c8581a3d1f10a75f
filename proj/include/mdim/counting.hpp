#pragma once

#include <cstdint>
#include <vector>

#include "mdim/shiftspace.hpp"

namespace mdim {

// Candidate points for separated-set searches. Word-based families hold
// words on [0, depth) sharing one tail; exhaustive ones are generated on
// demand in lexicographic order.
class CandidateFamily {
public:
    static CandidateFamily exhaustive(std::size_t symbols, long depth, Symbol tail);
    static CandidateFamily from_words(std::vector<Symbol> flat, long depth, Symbol tail);
    static CandidateFamily from_points(std::vector<SymbolicPoint> points);

    std::size_t size() const { return size_; }
    bool word_based() const { return points_.empty() || size_ == 0; }
    bool sampled() const { return sampled_; }
    double full_size() const { return full_size_; }
    long depth() const { return depth_; }
    Symbol tail() const { return tail_; }

    void word(std::size_t i, Symbol* out) const;
    std::vector<Symbol> word(std::size_t i) const;
    SymbolicPoint point(std::size_t i) const;

    CandidateFamily subset(const std::vector<std::size_t>& idx) const;

    void mark_sampled(double full_size) {
        sampled_ = true;
        full_size_ = full_size;
    }

private:
    std::size_t size_ = 0;
    long depth_ = 0;
    Symbol tail_ = 0;
    std::size_t symbols_ = 0;
    bool exhaustive_ = false;
    bool sampled_ = false;
    double full_size_ = 0.0;
    std::vector<Symbol> flat_;
    std::vector<SymbolicPoint> points_;
};

struct EnumerateOptions {
    double cap = 1e8;               // largest exhaustive family
    std::size_t sample_size = 0;    // 0 forbids sampling beyond the cap
    std::uint64_t seed = 1;
};

CandidateFamily enumerate_candidates(const ShiftSystem& sys, long depth, const EnumerateOptions& opt = {});

enum class Strategy { greedy, exact };

struct SeparatedSet {
    long n = 0;
    double eps = 0.0;
    std::vector<SymbolicPoint> members;
    std::vector<std::size_t> indices;  // into the candidate family
    Strategy strategy = Strategy::greedy;
    bool sampled = false;
    std::size_t size() const { return members.size(); }
};

struct SeparationOptions {
    std::size_t exact_cap = 4096;
    std::size_t node_budget = 5'000'000;
    unsigned workers = 1;
};

SeparatedSet maximal_separated(const ShiftSystem& sys, const CandidateFamily& cand, long n, double eps,
                               Strategy strategy, const SeparationOptions& opt = {});

// Truncated Bowen distance between two words on [0, depth) with a common
// tail; returns as soon as a term exceeds stop.
double word_bowen(const ShiftSystem& sys, const Symbol* a, const Symbol* b, long depth, long n, double stop);

struct GrowthRow {
    long n;
    long depth;
    std::size_t count;
    double log_count;
    bool sampled;
};

struct GrowthLedger {
    double eps = 0.0;
    std::vector<GrowthRow> rows;
    double slope = 0.0;
    double residual = 0.0;
    double upper = 0.0;  // max trailing difference quotient
    double lower = 0.0;  // min trailing difference quotient
    bool sampled = false;
};

struct GrowthOptions {
    long depth_margin = 0;  // depth(n) = n + margin
    Strategy strategy = Strategy::greedy;
    EnumerateOptions enumerate;
    SeparationOptions separation;
};

GrowthLedger htop_eps_estimate(const ShiftSystem& sys, double eps, const std::vector<long>& n_grid,
                               const GrowthOptions& opt = {});

struct MdimRow {
    double eps;
    double htop;
    double resolution;
    GrowthLedger ledger;
};

struct MdimEstimate {
    std::vector<MdimRow> rows;
    double upper = 0.0;
    double lower = 0.0;
    double fitted = 0.0;
    double residual = 0.0;
    bool sampled = false;
};

// One system per eps, so the discretization may follow the scale.
MdimEstimate mdim_estimate(const std::vector<ShiftSystem>& systems, const std::vector<double>& eps_grid,
                           const std::vector<long>& n_grid, const GrowthOptions& opt = {});
MdimEstimate mdim_estimate(const ShiftSystem& sys, const std::vector<double>& eps_grid,
                           const std::vector<long>& n_grid, const GrowthOptions& opt = {});

}  // namespace mdim
