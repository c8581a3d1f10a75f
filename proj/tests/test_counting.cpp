#include <doctest.h>

#include <cmath>
#include <random>

#include "mdim/counting.hpp"

using namespace mdim;

namespace {

// Brute-force Bowen distance from the definition, independent of the word kernels.
double brute_dn(const ShiftSystem& sys, const SymbolicPoint& x, const SymbolicPoint& y, long n) {
    double best = 0.0;
    int m = sys.truncation();
    for (long i = 0; i < n; ++i) {
        double s = 0.0;
        for (long j = -m; j <= m; ++j)
            s += sys.alphabet().dist(x.at(i + j), y.at(i + j)) * std::ldexp(1.0, -static_cast<int>(std::labs(j)));
        best = std::max(best, s);
    }
    return best;
}

}  // namespace

TEST_SUITE("counting") {

TEST_CASE("candidate enumeration sizes") {
    ShiftSystem two(discrete_alphabet(2), 10), three(discrete_alphabet(3), 10);
    CHECK(enumerate_candidates(two, 3).size() == 8);
    CandidateFamily zero = enumerate_candidates(two, 0);
    REQUIRE(zero.size() == 1);
    CHECK(zero.point(0) == SymbolicPoint::constant(two.alphabet().tail()));
    CHECK(enumerate_candidates(three, 2).size() == 9);
    auto w = enumerate_candidates(three, 2).word(5);
    CHECK(w == std::vector<Symbol>{1, 2});
}

TEST_CASE("enumeration cap and sampling") {
    ShiftSystem two(discrete_alphabet(2), 10);
    EnumerateOptions o;
    o.cap = 100;
    CHECK_THROWS_WITH_AS(enumerate_candidates(two, 10, o), doctest::Contains("cap-exceeded"), Error);
    o.sample_size = 50;
    CandidateFamily f = enumerate_candidates(two, 10, o);
    CHECK(f.sampled());
    CHECK(f.size() == 50);
    CHECK(f.full_size() == doctest::Approx(1024.0));
    CandidateFamily g = enumerate_candidates(two, 10, o);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(f.word(i) == g.word(i));
}

TEST_CASE("maximal separated examples") {
    ShiftSystem sys(discrete_alphabet(2), 10);
    auto c2 = enumerate_candidates(sys, 2);
    CHECK(maximal_separated(sys, c2, 2, 0.5, Strategy::greedy).size() == 4);
    CHECK(maximal_separated(sys, c2, 2, 0.5, Strategy::exact).size() == 4);
    CHECK(maximal_separated(sys, c2, 2, 3.5, Strategy::greedy).size() == 1);
    auto pts = CandidateFamily::from_points({SymbolicPoint::constant(0), SymbolicPoint::constant(1)});
    CHECK(maximal_separated(sys, pts, 1, 0.5, Strategy::greedy).size() == 2);
    CHECK(maximal_separated(sys, pts, 1, 0.5, Strategy::exact).size() == 2);
}

TEST_CASE("exact strategy refuses families above its cap") {
    ShiftSystem sys(discrete_alphabet(2), 10);
    SeparationOptions o;
    o.exact_cap = 16;
    CHECK_THROWS_WITH_AS(maximal_separated(sys, enumerate_candidates(sys, 5), 5, 0.5, Strategy::exact, o),
                         doctest::Contains("strategy-infeasible"), Error);
    CHECK_THROWS_AS(maximal_separated(sys, enumerate_candidates(sys, 2), 2, 1e-13, Strategy::greedy), Error);
}

TEST_CASE("greedy sets are separated and spanning") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 1000; ++t) {
        Alphabet a = t % 2 ? interval_grid(2 + rng() % 3) : discrete_alphabet(1 + rng() % 3);
        ShiftSystem sys(a, 12 + static_cast<int>(rng() % 5));
        long depth = 1 + static_cast<long>(rng() % 3);
        long n = 1 + static_cast<long>(rng() % static_cast<unsigned long>(depth));
        double eps = 0.05 + 1.5 * static_cast<double>(rng() % 100) / 100.0;
        auto cand = enumerate_candidates(sys, depth);
        SeparatedSet s = maximal_separated(sys, cand, n, eps, Strategy::greedy);
        double err = sys.error();
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i + 1; j < s.size(); ++j) REQUIRE(brute_dn(sys, s.members[i], s.members[j], n) - eps > 2 * err - 1e-12);
        for (std::size_t c = 0; c < cand.size(); ++c) {
            bool near = false;
            for (const auto& m : s.members) near = near || brute_dn(sys, cand.point(c), m, n) <= eps + 2 * err + 1e-12;
            REQUIRE(near);
        }
    }
}

TEST_CASE("exact maximum versus greedy and monotonicity") {
    std::mt19937_64 rng(77);
    double worst_ratio = 1.0;
    for (int t = 0; t < 300; ++t) {
        Alphabet a = interval_grid(2 + rng() % 3);
        ShiftSystem sys(a, 8);
        long depth = 1 + static_cast<long>(rng() % 3);
        long n = 1 + static_cast<long>(rng() % static_cast<unsigned long>(depth));
        double eps = 0.1 + static_cast<double>(rng() % 100) / 100.0;
        auto cand = enumerate_candidates(sys, depth);
        std::size_t g = maximal_separated(sys, cand, n, eps, Strategy::greedy).size();
        std::size_t e = maximal_separated(sys, cand, n, eps, Strategy::exact).size();
        REQUIRE(e >= g);
        REQUIRE(2 * g >= e);
        worst_ratio = std::min(worst_ratio, static_cast<double>(g) / static_cast<double>(e));
        // s(n, eps) nonincreasing in eps and nondecreasing in n on exact instances
        std::size_t e_big = maximal_separated(sys, cand, n, eps * 1.5, Strategy::exact).size();
        REQUIRE(e_big <= e);
        if (n < depth) REQUIRE(maximal_separated(sys, cand, n + 1, eps, Strategy::exact).size() >= e);
    }
    MESSAGE("worst greedy/exact ratio " << worst_ratio);
}

TEST_CASE("topological entropy at eps 0.5 on finite alphabets") {
    ShiftSystem two(discrete_alphabet(2), 12);
    GrowthLedger l2 = htop_eps_estimate(two, 0.5, {2, 3, 4, 5, 6, 7, 8, 9, 10});
    CHECK(std::fabs(l2.slope - std::log(2.0)) < 0.02 * std::log(2.0));
    for (const auto& r : l2.rows) CHECK(r.count == (std::size_t{1} << r.n));
    CHECK(l2.lower <= l2.upper);
    ShiftSystem one(discrete_alphabet(1), 12);
    CHECK(htop_eps_estimate(one, 0.5, {1, 2, 3, 4}).slope == doctest::Approx(0.0));
    ShiftSystem four(discrete_alphabet(4), 12);
    GrowthLedger l4 = htop_eps_estimate(four, 0.5, {2, 3, 4, 5, 6, 7, 8});
    CHECK(std::fabs(l4.slope - std::log(4.0)) < 0.02 * std::log(4.0));
}

TEST_CASE("ledger is independent of the worker count") {
    ShiftSystem sys(interval_grid(9), 10);
    GrowthOptions a, b;
    b.separation.workers = 3;
    GrowthLedger la = htop_eps_estimate(sys, 0.3, {1, 2, 3}, a), lb = htop_eps_estimate(sys, 0.3, {1, 2, 3}, b);
    REQUIRE(la.rows.size() == lb.rows.size());
    for (std::size_t i = 0; i < la.rows.size(); ++i) CHECK(la.rows[i].count == lb.rows[i].count);
    CHECK(la.slope == lb.slope);
}

TEST_CASE("mean dimension of finite alphabets and trivial products") {
    ShiftSystem two(discrete_alphabet(2), 20);
    MdimEstimate e = mdim_estimate(two, {0.5, 0.25, 0.125}, {4, 5, 6, 7, 8});
    CHECK(std::fabs(e.fitted) <= 0.05);
    CHECK(e.lower <= e.upper);
    ShiftSystem p = product_system(ShiftSystem(discrete_alphabet(1), 20), ShiftSystem(discrete_alphabet(1), 20));
    MdimEstimate z = mdim_estimate(p, {0.5, 0.25}, {1, 2, 3});
    CHECK(z.fitted == doctest::Approx(0.0));
}

TEST_CASE("mean dimension resolution guard") {
    ShiftSystem coarse(interval_grid(5), 20);
    CHECK_THROWS_WITH_AS(mdim_estimate(coarse, {0.5, 0.25}, {1, 2}), doctest::Contains("resolution-too-coarse"), Error);
    CHECK_THROWS_AS(mdim_estimate(coarse, {0.25, 0.5}, {1, 2}), Error);
}

}  // TEST_SUITE
