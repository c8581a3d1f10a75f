#include "mdim/metricspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

namespace mdim {

namespace {

constexpr std::size_t kTableLimit = 2048;

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

}  // namespace

Alphabet Alphabet::from_matrix(std::vector<std::string> labels, std::vector<double> matrix) {
    if (labels.empty()) fail(ErrorKind::config, "empty-alphabet", "alphabet needs at least one symbol");
    if (labels.size() > std::numeric_limits<Symbol>::max())
        fail(ErrorKind::config, "alphabet-too-large", std::to_string(labels.size()) + " symbols");
    if (matrix.size() != labels.size() * labels.size())
        fail(ErrorKind::config, "bad-matrix", "distance matrix must be n x n");
    Alphabet a;
    a.labels_ = std::move(labels);
    a.matrix_ = std::move(matrix);
    a.finish();
    a.formula_ = Formula{"dense", {}, {}};
    return a;
}

Alphabet Alphabet::from_coords(std::vector<std::string> labels, std::vector<double> coords, std::size_t dim) {
    if (labels.empty()) fail(ErrorKind::config, "empty-alphabet", "alphabet needs at least one symbol");
    if (labels.size() > std::numeric_limits<Symbol>::max())
        fail(ErrorKind::config, "alphabet-too-large", std::to_string(labels.size()) + " symbols");
    if (dim == 0 || coords.size() != labels.size() * dim)
        fail(ErrorKind::config, "bad-coords", "coordinate table must be n x dim");
    Alphabet a;
    a.labels_ = std::move(labels);
    a.coords_ = std::move(coords);
    a.dim_ = dim;
    a.finish();
    return a;
}

double Alphabet::raw_dist(Symbol a, Symbol b) const {
    if (dim_ > 0) {
        const double* p = coord(a);
        const double* q = coord(b);
        double s = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) s += std::fabs(p[i] - q[i]);
        return s;
    }
    return matrix_[static_cast<std::size_t>(a) * size() + b];
}

void Alphabet::finish() {
    std::size_t n = size();
    if (n <= kTableLimit) {
        table_.resize(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                table_[i * n + j] = raw_dist(static_cast<Symbol>(i), static_cast<Symbol>(j));
    }
    diam_ = 0.0;
    if (dim_ == 1) {
        auto [mn, mx] = std::minmax_element(coords_.begin(), coords_.end());
        diam_ = *mx - *mn;
    } else {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                diam_ = std::max(diam_, dist(static_cast<Symbol>(i), static_cast<Symbol>(j)));
    }
}

void Alphabet::set_tail(Symbol s) {
    if (s >= size()) fail(ErrorKind::config, "bad-tail", "tail symbol out of range");
    tail_ = s;
}

void Alphabet::set_valuation(std::vector<double> v) {
    if (!v.empty() && v.size() != size()) fail(ErrorKind::config, "bad-valuation", "valuation size mismatch");
    valuation_ = std::move(v);
}

std::optional<Symbol> Alphabet::find(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == label) return static_cast<Symbol>(i);
    return std::nullopt;
}

Alphabet interval_grid(std::size_t points, double lo, double hi) {
    if (points == 0) fail(ErrorKind::config, "bad-generator", "interval grid needs at least one point");
    if (!(hi >= lo)) fail(ErrorKind::config, "bad-generator", "interval bounds reversed");
    std::vector<std::string> labels(points);
    std::vector<double> coords(points);
    double h = points > 1 ? (hi - lo) / static_cast<double>(points - 1) : 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        coords[i] = points > 1 ? lo + h * static_cast<double>(i) : lo;
        labels[i] = fmt_num(coords[i]);
    }
    Alphabet a = Alphabet::from_coords(std::move(labels), coords, 1);
    a.set_resolution(h);
    a.set_valuation(coords);
    a.set_formula(Formula{"interval_grid", {static_cast<double>(points), lo, hi}, {}});
    return a;
}

Alphabet cantor_alphabet(int depth) {
    if (depth < 0 || depth > 15) fail(ErrorKind::config, "bad-generator", "cantor depth must lie in [0, 15]");
    std::size_t n = std::size_t{1} << depth;
    std::vector<std::string> labels(n);
    std::vector<double> coords(n);
    for (std::size_t i = 0; i < n; ++i) {
        // binary digits of i, most significant first, select left or right thirds
        double x = 0.0, scale = 1.0;
        for (int d = depth - 1; d >= 0; --d) {
            scale /= 3.0;
            if ((i >> d) & 1u) x += 2.0 * scale;
        }
        coords[i] = x;
        labels[i] = fmt_num(x);
    }
    Alphabet a = Alphabet::from_coords(std::move(labels), coords, 1);
    a.set_resolution(std::pow(3.0, -depth));
    a.set_valuation(coords);
    a.set_formula(Formula{"cantor", {static_cast<double>(depth)}, {}});
    return a;
}

Alphabet discrete_alphabet(std::size_t symbols) {
    if (symbols == 0) fail(ErrorKind::config, "bad-generator", "discrete alphabet needs a symbol");
    std::vector<std::string> labels(symbols);
    for (std::size_t i = 0; i < symbols; ++i) {
        if (symbols <= 26)
            labels[i] = std::string(1, static_cast<char>('a' + i));
        else
            labels[i] = "s" + std::to_string(i);
    }
    std::vector<double> m(symbols * symbols, 1.0);
    for (std::size_t i = 0; i < symbols; ++i) m[i * symbols + i] = 0.0;
    Alphabet a = Alphabet::from_matrix(std::move(labels), std::move(m));
    std::vector<double> val(symbols);
    for (std::size_t i = 0; i < symbols; ++i)
        val[i] = symbols > 1 ? static_cast<double>(i) / static_cast<double>(symbols - 1) : 0.0;
    a.set_valuation(std::move(val));
    a.set_formula(Formula{"discrete", {static_cast<double>(symbols)}, {}});
    return a;
}

Alphabet product_alphabet(const Alphabet& a, const Alphabet& b) {
    std::size_t na = a.size(), nb = b.size();
    std::size_t n = na * nb;
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j) labels[i * nb + j] = a.label(static_cast<Symbol>(i)) + "|" + b.label(static_cast<Symbol>(j));
    Alphabet p;
    if (a.has_coords() && b.has_coords()) {
        std::size_t dim = a.dim() + b.dim();
        std::vector<double> coords(n * dim);
        for (std::size_t i = 0; i < na; ++i)
            for (std::size_t j = 0; j < nb; ++j) {
                double* out = coords.data() + (i * nb + j) * dim;
                std::copy(a.coord(static_cast<Symbol>(i)), a.coord(static_cast<Symbol>(i)) + a.dim(), out);
                std::copy(b.coord(static_cast<Symbol>(j)), b.coord(static_cast<Symbol>(j)) + b.dim(), out + a.dim());
            }
        p = Alphabet::from_coords(std::move(labels), std::move(coords), dim);
    } else {
        std::vector<double> m(n * n);
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y)
                m[x * n + y] = a.dist(static_cast<Symbol>(x / nb), static_cast<Symbol>(y / nb)) +
                               b.dist(static_cast<Symbol>(x % nb), static_cast<Symbol>(y % nb));
        p = Alphabet::from_matrix(std::move(labels), std::move(m));
    }
    p.set_tail(static_cast<Symbol>(a.tail() * nb + b.tail()));
    if (a.has_valuation() && b.has_valuation()) {
        std::vector<double> val(n);
        for (std::size_t x = 0; x < n; ++x) val[x] = a.valuation()[x / nb] + b.valuation()[x % nb];
        p.set_valuation(std::move(val));
    }
    p.set_resolution(a.resolution() + b.resolution());
    p.set_formula(Formula{"product", {}, {a.formula(), b.formula()}});
    return p;
}

Alphabet dense_alphabet(std::vector<std::string> labels, std::vector<double> matrix) {
    return Alphabet::from_matrix(std::move(labels), std::move(matrix));
}

const char* violation_name(MetricViolation::Kind k) {
    switch (k) {
        case MetricViolation::Kind::nonzero_diagonal: return "nonzero_diagonal";
        case MetricViolation::Kind::negative: return "negative";
        case MetricViolation::Kind::asymmetry: return "asymmetry";
        case MetricViolation::Kind::triangle: return "triangle";
    }
    return "unknown";
}

MetricReport verify_metric(const Alphabet& space, double tol) {
    MetricReport r;
    std::size_t n = space.size();
    auto S = [](std::size_t i) { return static_cast<Symbol>(i); };
    for (std::size_t i = 0; i < n; ++i) {
        double d = space.dist(S(i), S(i));
        if (std::fabs(d) > tol) r.violations.push_back({MetricViolation::Kind::nonzero_diagonal, S(i), S(i), S(i), std::fabs(d)});
        for (std::size_t j = 0; j < n; ++j) {
            double dij = space.dist(S(i), S(j));
            if (dij < -tol) r.violations.push_back({MetricViolation::Kind::negative, S(i), S(j), S(j), -dij});
            if (j > i) {
                double dji = space.dist(S(j), S(i));
                if (std::fabs(dij - dji) > tol)
                    r.violations.push_back({MetricViolation::Kind::asymmetry, S(i), S(j), S(j), std::fabs(dij - dji)});
            }
        }
    }
    // Coordinate-embedded alphabets are l1 restrictions and satisfy the
    // triangle inequality by construction; the cubic scan is for matrices.
    if (space.has_coords()) return r;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t c = 0; c < n; ++c) {
            double dac = space.dist(S(a), S(c));
            for (std::size_t b = 0; b < n; ++b) {
                double excess = dac - space.dist(S(a), S(b)) - space.dist(S(b), S(c));
                if (excess > tol) r.violations.push_back({MetricViolation::Kind::triangle, S(a), S(b), S(c), excess});
            }
        }
    return r;
}

std::size_t greedy_ball_cover(const Alphabet& space, double eps) {
    std::size_t n = space.size();
    std::vector<char> covered(n, 0);
    auto gain = [&](std::size_t c) {
        std::size_t g = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (!covered[j] && space.dist(static_cast<Symbol>(c), static_cast<Symbol>(j)) <= eps) ++g;
        return g;
    };
    // max-heap on gain, then lowest index
    using Entry = std::pair<std::size_t, std::size_t>;
    auto cmp = [](const Entry& x, const Entry& y) {
        if (x.first != y.first) return x.first < y.first;
        return x.second > y.second;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    for (std::size_t c = 0; c < n; ++c) heap.push({gain(c), c});
    std::size_t remaining = n, count = 0;
    while (remaining > 0) {
        Entry top = heap.top();
        heap.pop();
        std::size_t g = gain(top.second);
        if (g != top.first) {
            heap.push({g, top.second});
            continue;
        }
        for (std::size_t j = 0; j < n; ++j)
            if (!covered[j] && space.dist(static_cast<Symbol>(top.second), static_cast<Symbol>(j)) <= eps) {
                covered[j] = 1;
                --remaining;
            }
        ++count;
    }
    return count;
}

std::size_t packing_lower_bound(const Alphabet& space, double eps) {
    // Points pairwise farther than 2 eps apart lie in distinct closed eps-balls.
    std::vector<Symbol> kept;
    for (std::size_t i = 0; i < space.size(); ++i) {
        bool ok = true;
        for (Symbol k : kept)
            if (space.dist(k, static_cast<Symbol>(i)) <= 2.0 * eps) {
                ok = false;
                break;
            }
        if (ok) kept.push_back(static_cast<Symbol>(i));
    }
    return kept.size();
}

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit f;
    std::size_t n = x.size();
    if (n == 0) return f;
    if (n == 1) {
        f.intercept = y[0];
        return f;
    }
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = y[i] - (f.intercept + f.slope * x[i]);
        ss += e * e;
    }
    f.residual = std::sqrt(ss / static_cast<double>(n));
    return f;
}

std::vector<double> trailing_quotients(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> q;
    std::size_t n = x.size();
    if (n < 2) return q;
    std::size_t keep = std::max<std::size_t>(2, (n + 1) / 2);
    for (std::size_t i = n - keep; i + 1 < n; ++i) q.push_back((y[i + 1] - y[i]) / (x[i + 1] - x[i]));
    return q;
}

BoxDimension box_dimension_estimate(const std::vector<Alphabet>& family, const std::vector<double>& eps_grid,
                                    std::size_t exact_threshold) {
    if (family.empty()) fail(ErrorKind::config, "empty-family", "no discretizations given");
    if (eps_grid.empty()) fail(ErrorKind::config, "bad-grid", "empty eps grid");
    for (std::size_t i = 1; i < eps_grid.size(); ++i)
        if (!(eps_grid[i] < eps_grid[i - 1])) fail(ErrorKind::config, "bad-grid", "eps grid must be strictly decreasing");
    const Alphabet& finest = family.back();
    double min_eps = eps_grid.back();
    if (finest.resolution() >= min_eps / 2.0)
        fail(ErrorKind::config, "resolution-too-coarse",
             "resolution " + fmt_num(finest.resolution()) + " >= " + fmt_num(min_eps / 2.0));
    for (double e : eps_grid)
        if (!(e > 0.0) || (finest.size() > 1 && e >= finest.diam()))
            fail(ErrorKind::config, "bad-grid", "eps must lie in (0, diam)");

    BoxDimension out;
    out.resolution = finest.resolution();
    std::vector<double> xs, ys;
    for (double e : eps_grid) {
        BoxCount row{e, 0, 0, false, {}};
        // running maximum keeps the reported count monotone under refinement
        for (const Alphabet& a : family) {
            std::size_t c = greedy_ball_cover(a, e);
            if (!row.per_discretization.empty()) c = std::max(c, row.per_discretization.back());
            row.per_discretization.push_back(c);
        }
        row.count = row.per_discretization.back();
        if (finest.size() <= exact_threshold) {
            row.lower_bound = packing_lower_bound(finest, e);
            row.exact = row.lower_bound == row.count;
        }
        xs.push_back(-std::log(e));
        ys.push_back(std::log(static_cast<double>(row.count)));
        out.rows.push_back(std::move(row));
    }
    LineFit fit = least_squares(xs, ys);
    out.slope = fit.slope;
    out.residual = fit.residual;
    auto q = trailing_quotients(xs, ys);
    if (!q.empty()) {
        out.upper_slope = *std::max_element(q.begin(), q.end());
        out.lower_slope = *std::min_element(q.begin(), q.end());
    }
    return out;
}

CoverSpec build_cover(const Alphabet& space, double eps) {
    std::size_t n = space.size();
    if (!(eps > 0.0) || (n > 1 && eps > space.diam()))
        fail(ErrorKind::config, "bad-radius", "cover radius must lie in (0, diam]");
    auto S = [](std::size_t i) { return static_cast<Symbol>(i); };

    // maximal eps/4-separated net, index order
    std::vector<Symbol> net;
    for (std::size_t i = 0; i < n; ++i) {
        bool far = true;
        for (Symbol c : net)
            if (space.dist(c, S(i)) <= eps / 4.0) {
                far = false;
                break;
            }
        if (far) net.push_back(S(i));
    }

    CoverSpec cover;
    cover.diam_bound = eps;
    std::vector<std::vector<std::size_t>> containing(n);
    for (Symbol c : net) {
        CoverElement el{c, eps / 2.0, {}};
        for (std::size_t j = 0; j < n; ++j)
            if (space.dist(c, S(j)) < eps / 2.0) {
                containing[j].push_back(cover.elements.size());
                el.members.push_back(S(j));
            }
        cover.elements.push_back(std::move(el));
    }

    std::vector<char> in(n, 0);
    for (const auto& el : cover.elements) {
        for (Symbol p : el.members)
            for (Symbol q : el.members)
                if (space.dist(p, q) > eps)
                    fail(ErrorKind::infeasible, "infeasible-cover", "element diameter exceeds " + fmt_num(eps));
    }

    // Lebesgue number on the cloud: for each point, the best element's
    // distance to the nearest non-member, capped at the diameter bound.
    double leb = eps;
    for (std::size_t x = 0; x < n; ++x) {
        double best = 0.0;
        for (std::size_t e : containing[x]) {
            std::fill(in.begin(), in.end(), 0);
            for (Symbol p : cover.elements[e].members) in[p] = 1;
            double r = std::numeric_limits<double>::infinity();
            for (std::size_t y = 0; y < n; ++y)
                if (!in[y]) r = std::min(r, space.dist(S(x), S(y)));
            best = std::max(best, r);
        }
        leb = std::min(leb, best);
    }
    cover.lebesgue_bound = leb;
    if (leb < eps / 4.0)
        fail(ErrorKind::infeasible, "infeasible-cover", "Lebesgue number " + fmt_num(leb) + " below eps/4");
    return cover;
}

}  // namespace mdim
