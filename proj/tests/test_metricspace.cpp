#include <doctest.h>

#include <cmath>
#include <random>

#include "mdim/metricspace.hpp"

using namespace mdim;

namespace {

// Open ball of radius r around x lies in some element, checked on every cloud point.
bool lebesgue_holds(const Alphabet& a, const CoverSpec& c, double r) {
    for (std::size_t x = 0; x < a.size(); ++x) {
        bool inside_some = false;
        for (const auto& el : c.elements) {
            std::vector<char> in(a.size(), 0);
            for (Symbol m : el.members) in[m] = 1;
            bool ok = true;
            for (std::size_t y = 0; y < a.size() && ok; ++y)
                if (a.dist(static_cast<Symbol>(x), static_cast<Symbol>(y)) < r && !in[y]) ok = false;
            if (ok) {
                inside_some = true;
                break;
            }
        }
        if (!inside_some) return false;
    }
    return true;
}

double element_diam(const Alphabet& a, const CoverElement& el) {
    double d = 0.0;
    for (Symbol p : el.members)
        for (Symbol q : el.members) d = std::max(d, a.dist(p, q));
    return d;
}

}  // namespace

TEST_SUITE("metricspace") {

TEST_CASE("two-symbol discrete metric is valid") {
    Alphabet a = dense_alphabet({"a", "b"}, {0, 1, 1, 0});
    CHECK(verify_metric(a).valid());
    CHECK(a.diam() == 1.0);
}

TEST_CASE("triangle violation is reported at (a, b, c)") {
    Alphabet a = dense_alphabet({"a", "b", "c"}, {0, 1, 5, 1, 0, 1, 5, 1, 0});
    MetricReport r = verify_metric(a);
    REQUIRE_FALSE(r.valid());
    bool found = false;
    for (const auto& v : r.violations)
        if (v.kind == MetricViolation::Kind::triangle && v.a == 0 && v.b == 1 && v.c == 2) {
            found = true;
            CHECK(v.excess == doctest::Approx(3.0));
        }
    CHECK(found);
}

TEST_CASE("asymmetry, negative and diagonal violations are reported") {
    Alphabet a = dense_alphabet({"a", "b"}, {0.5, 1, 2, 0});
    MetricReport r = verify_metric(a);
    int diag = 0, asym = 0;
    for (const auto& v : r.violations) {
        diag += v.kind == MetricViolation::Kind::nonzero_diagonal;
        asym += v.kind == MetricViolation::Kind::asymmetry;
    }
    CHECK(diag == 1);
    CHECK(asym == 1);
    Alphabet n = dense_alphabet({"a", "b"}, {0, -1, -1, 0});
    bool neg = false;
    for (const auto& v : verify_metric(n).violations) neg = neg || v.kind == MetricViolation::Kind::negative;
    CHECK(neg);
}

TEST_CASE("uniform interval grid is a valid metric") {
    Alphabet a = interval_grid(101);
    CHECK(verify_metric(a).valid());
    CHECK(a.diam() == doctest::Approx(1.0));
    CHECK(a.resolution() == doctest::Approx(0.01));
}

TEST_CASE("built-in generators always produce valid metrics") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        int kind = trial % 4;
        Alphabet a;
        if (kind == 0) a = interval_grid(1 + rng() % 40, -1.0 * (rng() % 3), 1.0 + rng() % 3);
        if (kind == 1) a = cantor_alphabet(static_cast<int>(rng() % 6));
        if (kind == 2) a = discrete_alphabet(1 + rng() % 6);
        if (kind == 3) a = product_alphabet(discrete_alphabet(1 + rng() % 3), interval_grid(1 + rng() % 5));
        REQUIRE(verify_metric(a).valid());
    }
}

TEST_CASE("product alphabets sum the factor distances") {
    Alphabet p = product_alphabet(discrete_alphabet(2), discrete_alphabet(2));
    CHECK(p.size() == 4);
    CHECK(p.diam() == doctest::Approx(2.0));
    CHECK(verify_metric(p).valid());
    Alphabet q = product_alphabet(interval_grid(3), cantor_alphabet(1));
    // symbol i * |B| + j pairs a_i with b_j
    CHECK(q.dist(0, 5) == doctest::Approx(1.0 + 2.0 / 3.0));
}

TEST_CASE("interval box dimension is close to 1") {
    std::vector<double> eps;
    for (int k = 3; k <= 7; ++k) eps.push_back(std::ldexp(1.0, -k));
    BoxDimension bd = box_dimension_estimate({interval_grid(4097)}, eps);
    CHECK(std::fabs(bd.slope - 1.0) < 0.1);
    for (const auto& r : bd.rows) {
        double oracle = std::ceil(1.0 / (2.0 * r.eps));
        CHECK(std::fabs(static_cast<double>(r.count) - oracle) <= 1.0);
    }
}

TEST_CASE("single point has box dimension 0") {
    BoxDimension bd = box_dimension_estimate({interval_grid(1)}, {0.5, 0.25, 0.125});
    CHECK(bd.slope == doctest::Approx(0.0));
    for (const auto& r : bd.rows) CHECK(r.count == 1);
}

TEST_CASE("Cantor box dimension is close to log 2 / log 3") {
    std::vector<double> eps;
    for (int k = 2; k <= 6; ++k) eps.push_back(std::pow(3.0, -k));
    BoxDimension bd = box_dimension_estimate({cantor_alphabet(8)}, eps);
    CHECK(std::fabs(bd.slope - std::log(2.0) / std::log(3.0)) < 0.05);
    for (std::size_t i = 0; i < bd.rows.size(); ++i) CHECK(bd.rows[i].count == (std::size_t{1} << (i + 2)));
}

TEST_CASE("coarse discretization is rejected") {
    CHECK_THROWS_WITH_AS(box_dimension_estimate({interval_grid(5)}, {0.5, 0.25}), doctest::Contains("resolution-too-coarse"),
                         Error);
    CHECK_THROWS_AS(box_dimension_estimate({interval_grid(65)}, {0.25, 0.5}), Error);
}

TEST_CASE("refinement never decreases the cover count") {
    std::vector<Alphabet> fam = {interval_grid(17), interval_grid(65), interval_grid(257), interval_grid(1025)};
    BoxDimension bd = box_dimension_estimate(fam, {0.25, 0.125, 0.0625, 0.03125});
    for (const auto& r : bd.rows)
        for (std::size_t i = 1; i < r.per_discretization.size(); ++i)
            CHECK(r.per_discretization[i] >= r.per_discretization[i - 1]);
}

TEST_CASE("interval cover at eps 1/4 meets both bounds") {
    Alphabet a = interval_grid(101);
    CoverSpec c = build_cover(a, 0.25);
    CHECK(c.diam_bound <= 0.25);
    CHECK(c.lebesgue_bound >= 1.0 / 16.0);
    for (const auto& el : c.elements) CHECK(element_diam(a, el) <= 0.25);
    CHECK(lebesgue_holds(a, c, c.lebesgue_bound));
}

TEST_CASE("single point cover") {
    CoverSpec c = build_cover(interval_grid(1), 0.3);
    CHECK(c.elements.size() == 1);
    CHECK(c.lebesgue_bound == doctest::Approx(0.3));
}

TEST_CASE("two-symbol discrete cover at eps 1/2") {
    Alphabet a = discrete_alphabet(2);
    CoverSpec c = build_cover(a, 0.5);
    REQUIRE(c.elements.size() == 2);
    for (const auto& el : c.elements) CHECK(el.members.size() == 1);
    CHECK(c.lebesgue_bound >= 0.125);
    CHECK(lebesgue_holds(a, c, c.lebesgue_bound));
}

TEST_CASE("randomized covers satisfy the diameter and Lebesgue bounds") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int built = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = 2 + rng() % 25, dim = 1 + rng() % 2;
        std::vector<std::string> labels(n);
        std::vector<double> coords(n * dim);
        for (auto& x : coords) x = u(rng);
        Alphabet a = Alphabet::from_coords(labels, coords, dim);
        double eps = a.diam() * (0.05 + 0.95 * u(rng));
        if (!(eps > 0.0)) continue;
        try {
            CoverSpec c = build_cover(a, eps);
            ++built;
            REQUIRE(c.diam_bound <= eps);
            REQUIRE(c.lebesgue_bound >= eps / 4.0);
            for (const auto& el : c.elements) REQUIRE(element_diam(a, el) <= c.diam_bound + 1e-12);
            REQUIRE(lebesgue_holds(a, c, c.lebesgue_bound));
        } catch (const Error& e) {
            REQUIRE(std::string(e.what()).find("infeasible-cover") == 0);
        }
    }
    CHECK(built > 500);
}

TEST_CASE("least squares and trailing quotients") {
    LineFit f = least_squares({1, 2, 3}, {2, 4, 6});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.residual == doctest::Approx(0.0));
    auto q = trailing_quotients({1, 2, 3, 4}, {0, 1, 3, 6});
    REQUIRE(q.size() == 1);
    CHECK(q[0] == doctest::Approx(3.0));
}

}  // TEST_SUITE
