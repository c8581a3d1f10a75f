#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mdim/common.hpp"

namespace mdim {

// How an alphabet was generated; kept so it can be written back out in
// formulaic form instead of as a dense matrix.
struct Formula {
    std::string kind;  // interval_grid | cantor | discrete | product | dense
    std::vector<double> params;
    std::vector<Formula> factors;
};

// A finite metric point cloud standing in for a compact alphabet K.
class Alphabet {
public:
    Alphabet() = default;

    // Dense distance matrix, row-major n x n.
    static Alphabet from_matrix(std::vector<std::string> labels, std::vector<double> matrix);
    // l1 distance between coordinate vectors (n points, dim coordinates each).
    static Alphabet from_coords(std::vector<std::string> labels, std::vector<double> coords, std::size_t dim);

    std::size_t size() const { return labels_.size(); }
    double dist(Symbol a, Symbol b) const {
        if (!table_.empty()) return table_[static_cast<std::size_t>(a) * size() + b];
        return raw_dist(a, b);
    }
    double diam() const { return diam_; }

    Symbol tail() const { return tail_; }
    void set_tail(Symbol s);

    bool has_valuation() const { return !valuation_.empty(); }
    const std::vector<double>& valuation() const { return valuation_; }
    void set_valuation(std::vector<double> v);

    // Declared discretization spacing of the cloud.
    double resolution() const { return resolution_; }
    void set_resolution(double r) { resolution_ = r; }

    const std::string& label(Symbol s) const { return labels_[s]; }
    const std::vector<std::string>& labels() const { return labels_; }
    std::optional<Symbol> find(const std::string& label) const;

    bool has_coords() const { return dim_ > 0; }
    std::size_t dim() const { return dim_; }
    const double* coord(Symbol s) const { return coords_.data() + static_cast<std::size_t>(s) * dim_; }

    const Formula& formula() const { return formula_; }
    void set_formula(Formula f) { formula_ = std::move(f); }

private:
    double raw_dist(Symbol a, Symbol b) const;
    void finish();

    std::vector<std::string> labels_;
    std::vector<double> matrix_;
    std::vector<double> coords_;
    std::size_t dim_ = 0;
    std::vector<double> table_;
    double diam_ = 0.0;
    Symbol tail_ = 0;
    std::vector<double> valuation_;
    double resolution_ = 0.0;
    Formula formula_;
};

// Built-in generators.
Alphabet interval_grid(std::size_t points, double lo = 0.0, double hi = 1.0);
Alphabet cantor_alphabet(int depth);
Alphabet discrete_alphabet(std::size_t symbols);
Alphabet product_alphabet(const Alphabet& a, const Alphabet& b);
Alphabet dense_alphabet(std::vector<std::string> labels, std::vector<double> matrix);

struct MetricViolation {
    enum class Kind { nonzero_diagonal, negative, asymmetry, triangle };
    Kind kind;
    Symbol a, b, c;
    double excess;
};

const char* violation_name(MetricViolation::Kind k);

struct MetricReport {
    std::vector<MetricViolation> violations;
    bool valid() const { return violations.empty(); }
};

MetricReport verify_metric(const Alphabet& space, double tol = 1e-12);

struct BoxCount {
    double eps;
    std::size_t count;        // greedy cover count on the finest discretization
    std::size_t lower_bound;  // 2 eps packing bound
    bool exact;
    std::vector<std::size_t> per_discretization;
};

struct BoxDimension {
    std::vector<BoxCount> rows;
    double slope = 0.0;  // least squares of log N against |log eps|
    double residual = 0.0;
    double upper_slope = 0.0;
    double lower_slope = 0.0;
    double resolution = 0.0;
};

// Minimal closed eps-ball cover count via lazy greedy, lowest index wins ties.
std::size_t greedy_ball_cover(const Alphabet& space, double eps);
std::size_t packing_lower_bound(const Alphabet& space, double eps);

BoxDimension box_dimension_estimate(const std::vector<Alphabet>& family, const std::vector<double>& eps_grid,
                                    std::size_t exact_threshold = std::size_t{1} << 16);

struct CoverElement {
    Symbol center;
    double radius;  // open ball
    std::vector<Symbol> members;
};

struct CoverSpec {
    std::vector<CoverElement> elements;
    double diam_bound = 0.0;
    double lebesgue_bound = 0.0;
};

CoverSpec build_cover(const Alphabet& space, double eps);

// Slope helpers shared by the estimators.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // root mean square
};
LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y);
// Consecutive difference quotients over the trailing half (at least two rows).
std::vector<double> trailing_quotients(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mdim
