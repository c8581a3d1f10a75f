#pragma once

#include <cstdint>
#include <vector>

#include "mdim/counting.hpp"

namespace mdim {

double birkhoff_average(const Observable& phi, const SymbolicPoint& x, long n);

struct DeviationSpec {
    double alpha = 0.0;
    double err = 0.0;
    long n = 1;
    void validate() const;
};

struct EmpiricalMeasure {
    std::vector<SymbolicPoint> atoms;
    std::vector<double> weights;

    static EmpiricalMeasure uniform(std::vector<SymbolicPoint> atoms);
    std::size_t size() const { return atoms.size(); }
    void validate(double tol = 1e-12) const;
};

// Indices of candidates with |A_n(x) - alpha| < err.
std::vector<std::size_t> deviation_members(const Observable& phi, const CandidateFamily& cand, const DeviationSpec& spec);

SeparatedSet separated_in_deviation(const ShiftSystem& sys, const Observable& phi, const DeviationSpec& spec, double eps,
                                    const CandidateFamily& cand, Strategy strategy = Strategy::greedy,
                                    const SeparationOptions& opt = {});

// Bowen balls centred at a fixed point list, prepared once for every n up
// to n_max: reach(i, j) is the largest n with point j certified inside
// B_n(point i, eps), i.e. every term below eps minus twice the error.
class BallTable {
public:
    BallTable(const ShiftSystem& sys, std::vector<SymbolicPoint> points, double eps, long n_max, unsigned workers = 1);

    std::size_t size() const { return points_.size(); }
    const SymbolicPoint& point(std::size_t i) const { return points_[i]; }
    const std::vector<SymbolicPoint>& points() const { return points_; }
    long n_max() const { return n_max_; }
    double eps() const { return eps_; }
    long reach(std::size_t i, std::size_t j) const { return reach_[i * points_.size() + j]; }

private:
    std::vector<SymbolicPoint> points_;
    double eps_;
    long n_max_;
    std::vector<std::uint16_t> reach_;
};

// Atom-centred balls of an empirical measure.
class KatokTable {
public:
    KatokTable(const ShiftSystem& sys, const EmpiricalMeasure& mu, double eps, long n_max, unsigned workers = 1);

    const std::vector<double>& weights() const { return weights_; }
    const BallTable& balls() const { return balls_; }
    long n_max() const { return balls_.n_max(); }
    double eps() const { return balls_.eps(); }

private:
    std::vector<double> weights_;
    BallTable balls_;
};

struct KatokCount {
    std::size_t count = 0;
    std::size_t greedy = 0;
    bool exact = false;
};

struct KatokOptions {
    std::size_t exact_atoms = 1024;
    std::size_t node_budget = 2'000'000;
    unsigned workers = 1;
};

KatokCount katok_covering_number(const KatokTable& table, long n, double delta, const KatokOptions& opt = {});
KatokCount katok_covering_number(const ShiftSystem& sys, const EmpiricalMeasure& mu, long n, double eps, double delta,
                                 const KatokOptions& opt = {});

struct KatokRow {
    long n;
    std::size_t count;
    bool exact;
    double log_count;
};

struct KatokEstimate {
    double eps = 0.0;
    double delta = 0.0;
    std::vector<KatokRow> rows;
    double lower = 0.0;  // liminf proxy
    double upper = 0.0;  // limsup proxy
};

KatokEstimate katok_entropy_estimate(const KatokTable& table, double eps, double delta, const std::vector<long>& n_grid,
                                     const KatokOptions& opt = {});
KatokEstimate katok_entropy_estimate(const ShiftSystem& sys, const EmpiricalMeasure& mu, double eps, double delta,
                                     const std::vector<long>& n_grid, const KatokOptions& opt = {});

}  // namespace mdim
