#include <doctest.h>

#include <cmath>

#include "mdim/moran.hpp"

using namespace mdim;

namespace {

// Schedule with all levels set by hand; t follows the cumulative-length law.
MoranSchedule hand_schedule(const ShiftSystem& sys, double eps0, const std::vector<long>& nhat, const std::vector<long>& N,
                            double alpha1 = 0.2, double alpha2 = 0.8, double delta1 = 0.025) {
    MoranSchedule s;
    s.eps0 = eps0;
    s.gamma = 2 * delta1;
    s.alpha1 = alpha1;
    s.alpha2 = alpha2;
    s.K = static_cast<int>(nhat.size());
    s.growth_a = s.growth_b = 1e9;
    s.delta = {0.0};
    s.V = {0};
    s.nhat = {0};
    s.N = {0};
    s.L = {0};
    s.t = {0};
    s.M = {0};
    for (int k = 1; k <= s.K; ++k) {
        long L = full_shift_gap(sys, s.radius(k))(1);
        long n = nhat[static_cast<std::size_t>(k - 1)], c = N[static_cast<std::size_t>(k - 1)];
        s.delta.push_back(std::ldexp(delta1, 1 - k));
        s.V.push_back(0);
        s.nhat.push_back(n);
        s.N.push_back(c);
        s.L.push_back(L);
        s.t.push_back(k == 1 ? c * n + (c - 1) * L : s.t.back() + c * (n + L));
        s.M.push_back(0);
    }
    return s;
}

SeparatedSet word_set(const std::vector<std::vector<Symbol>>& words) {
    SeparatedSet S;
    S.n = static_cast<long>(words[0].size());
    for (const auto& w : words) S.members.push_back(SymbolicPoint(0, w, 0));
    return S;
}

SymbolicPoint flip(const SymbolicPoint& x, long i) {
    long lo = std::min(x.lo(), i);
    long hi = std::max(x.lo() + static_cast<long>(x.word().size()) - 1, i);
    std::vector<Symbol> w;
    for (long j = lo; j <= hi; ++j) w.push_back(x.at(j));
    w[static_cast<std::size_t>(i - lo)] = static_cast<Symbol>(1 - w[static_cast<std::size_t>(i - lo)]);
    return SymbolicPoint(lo, w, x.tail());
}

}  // namespace

TEST_SUITE("moran") {

TEST_CASE("rho alternates") {
    CHECK(MoranSchedule::rho(1) == 1);
    CHECK(MoranSchedule::rho(2) == 2);
    CHECK(MoranSchedule::rho(3) == 1);
    CHECK(MoranSchedule::rho(4) == 2);
}

TEST_CASE("schedule construction") {
    ShiftSystem sys(discrete_alphabet(2), 20);
    Observable phi({0.0, 1.0});
    MoranParams p;
    p.K = 2;
    MoranSchedule s = build_schedule(sys, phi, p);
    CHECK(schedule_violations(s).empty());
    CHECK(s.t[2] <= 10000);
    CHECK(s.delta[1] == doctest::Approx(0.025));
    CHECK(s.delta[2] == doctest::Approx(0.0125));
    for (int k = 1; k <= 2; ++k) {
        CHECK(std::log(static_cast<double>(s.L[k])) / static_cast<double>(s.nhat[k]) < p.gamma / std::ldexp(1.0, k + 1));
        CHECK(s.L[k] == full_shift_gap(sys, s.radius(k))(1));
    }
    CHECK(s.t[1] == s.N[1] * s.nhat[1] + (s.N[1] - 1) * s.L[1]);
    CHECK(s.t[2] == s.t[1] + s.N[2] * (s.nhat[2] + s.L[2]));

    MoranParams half = p;
    half.gamma = 0.5;
    MoranSchedule h = build_schedule(sys, phi, half);
    CHECK(h.delta[1] == doctest::Approx(0.25));
    CHECK(h.delta[2] == doctest::Approx(0.125));

    MoranParams tight = p;
    tight.max_t = 100;
    CHECK_THROWS_WITH_AS(build_schedule(sys, phi, tight), doctest::Contains("budget-exceeded"), Error);
    MoranParams same = p;
    same.alpha2 = same.alpha1;
    CHECK_THROWS_AS(build_schedule(sys, phi, same), Error);
    MoranParams out = p;
    out.alpha2 = 1.5;
    CHECK_THROWS_AS(build_schedule(sys, phi, out), Error);
}

TEST_CASE("schedule invariant checker flags broken schedules") {
    ShiftSystem sys(discrete_alphabet(2), 20);
    MoranSchedule s = hand_schedule(sys, 0.25, {300, 600}, {2, 4});
    CHECK(schedule_violations(s).empty());
    MoranSchedule bad_t = s;
    bad_t.t[2] += 1;
    CHECK_FALSE(schedule_violations(bad_t).empty());
    MoranSchedule bad_delta = s;
    bad_delta.delta[2] = bad_delta.delta[1];
    CHECK_FALSE(schedule_violations(bad_delta).empty());
    MoranSchedule short_n = hand_schedule(sys, 0.25, {4, 600}, {2, 4});
    CHECK_FALSE(schedule_violations(short_n).empty());
}

TEST_CASE("base separated sets") {
    ShiftSystem sys(discrete_alphabet(2), 20);
    Observable phi({0.0, 1.0});
    MoranParams p;
    MoranSchedule s = hand_schedule(sys, 0.8, {4}, {1}, 0.5, 0.8, 0.075);
    SeparatedSet S = build_base_separated(sys, phi, s, 1, p);
    CHECK(S.size() == 14);
    CHECK(s.M[1] == 14);
    MoranSchedule wide = hand_schedule(sys, 0.8, {4}, {1}, 0.5, 0.8, 10.0);
    CHECK(build_base_separated(sys, phi, wide, 1, p).size() ==
          maximal_separated(sys, enumerate_candidates(sys, 4), 4, 0.9, Strategy::greedy).size());
    MoranSchedule beyond = hand_schedule(sys, 0.8, {4}, {1}, 1.5, 0.8, 0.075);
    CHECK_THROWS_WITH_AS(build_base_separated(sys, phi, beyond, 1, p), doctest::Contains("empty-deviation"), Error);
}

TEST_CASE("level cardinalities and verification") {
    ShiftSystem sys(discrete_alphabet(2), 20);
    MoranParams p;
    MoranSchedule s = hand_schedule(sys, 0.25, {4, 4}, {2, 1});
    SeparatedSet S1 = word_set({{0, 0, 0, 1}, {0, 1, 1, 0}, {1, 0, 1, 0}, {1, 1, 1, 1}});
    SeparatedSet S2 = word_set({{0, 0, 1, 1}, {1, 1, 0, 0}, {0, 1, 0, 1}});
    FractalLevel h1 = build_level(sys, nullptr, S1, s, 1, Mode::exact, p);
    CHECK(h1.centers.size() == 16);
    CHECK(h1.full_count == doctest::Approx(16.0));
    FractalLevel h2 = build_level(sys, &h1, S2, s, 2, Mode::exact, p);
    CHECK(h2.centers.size() == 48);
    CHECK(verify_level(sys, h1, nullptr, s, p).pass());
    LevelReport r2 = verify_level(sys, h2, &h1, s, p);
    CHECK(r2.pass());
    CHECK(r2.separation.checked == 48 * 47 / 2);
    CHECK(r2.nesting.checked == 48);
    for (std::size_t i = 0; i < h2.centers.size(); ++i)
        CHECK(sys.bowen_metric(h2.centers[i], h1.centers[h2.parent[i]], s.t[1]).value <= s.radius(2));

    MoranSchedule one = hand_schedule(sys, 0.25, {4}, {1});
    FractalLevel single = build_level(sys, nullptr, S1, one, 1, Mode::exact, p);
    REQUIRE(single.centers.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(sys.bowen_metric(single.centers[i], S1.members[i], 4).value < s.radius(1));

    // planted violations
    FractalLevel corrupt = h2;
    corrupt.centers[5] = flip(corrupt.centers[5], 1);
    CHECK_FALSE(verify_level(sys, corrupt, &h1, s, p).nesting.pass);
    FractalLevel dup = h1;
    dup.centers.push_back(dup.centers[3]);
    dup.parent.push_back(dup.parent[3]);
    dup.tuples.push_back(dup.tuples[3]);
    LevelReport rd = verify_level(sys, dup, nullptr, s, p);
    CHECK_FALSE(rd.separation.pass);
    CHECK(rd.separation.a == 3);
    CHECK(rd.separation.b == 16);

    MoranParams small = p;
    small.max_centers = 8;
    CHECK_THROWS_WITH_AS(build_level(sys, nullptr, S1, s, 1, Mode::exact, small), doctest::Contains("cap-exceeded"), Error);
    small.level_samples = 5;
    FractalLevel sampled = build_level(sys, nullptr, S1, s, 1, Mode::sampled, small);
    CHECK(sampled.sampled);
    CHECK(sampled.centers.size() == 5);
    CHECK_THROWS_WITH_AS(level_measure(sampled), doctest::Contains("sampled-level"), Error);
}

TEST_CASE("oscillation certificates") {
    ShiftSystem sys(discrete_alphabet(2), 20);
    Observable phi({0.0, 1.0});
    MoranParams p;
    MoranSchedule s = hand_schedule(sys, 0.25, {4}, {1}, 0.5, 0.8, 0.025);
    SeparatedSet S = word_set({{0, 1, 0, 1}});
    std::vector<FractalLevel> levels = {build_level(sys, nullptr, S, s, 1, Mode::exact, p)};
    Representative r = representative_point(sys, phi, s, levels, 0);
    REQUIRE(r.certificate.checkpoints.size() == 1);
    const Checkpoint& c = r.certificate.checkpoints[0];
    CHECK(c.average == doctest::Approx(0.5));
    CHECK(std::fabs(c.average - 0.5) <= c.bound);
    CHECK(c.bound == doctest::Approx(c.var + 0.1 + 2.0 * (0 + 1 * s.L[1]) / 4.0));

    Observable flat = Observable::constant(0.4, 2);
    MoranSchedule s2 = hand_schedule(sys, 0.25, {4, 4}, {2, 1});
    SeparatedSet S1 = word_set({{0, 0, 0, 1}, {0, 1, 1, 0}});
    FractalLevel h1 = build_level(sys, nullptr, S1, s2, 1, Mode::exact, p);
    FractalLevel h2 = build_level(sys, &h1, S1, s2, 2, Mode::exact, p);
    OscillationCertificate oc = oscillation_certificate(sys, flat, s2, h2.centers[3]);
    CHECK(oc.oscillation == doctest::Approx(0.0));
    for (const auto& cp : oc.checkpoints) CHECK(cp.average == doctest::Approx(0.4));
}

TEST_CASE("two-level pipeline on the 2-shift") {
    ShiftSystem sys(discrete_alphabet(2), 20);
    Observable phi({0.0, 1.0});
    MoranParams p;
    p.K = 2;
    MoranSchedule s = build_schedule(sys, phi, p);
    std::vector<FractalLevel> levels;
    for (int k = 1; k <= 2; ++k) {
        SeparatedSet S = build_base_separated(sys, phi, s, k, p);
        levels.push_back(build_level(sys, levels.empty() ? nullptr : &levels.back(), S, s, k, Mode::exact, p));
        CHECK(verify_level(sys, levels.back(), k == 1 ? nullptr : &levels[0], s, p).pass());
    }
    double expect = 1.0;
    for (int k = 1; k <= 2; ++k) expect *= std::pow(static_cast<double>(s.M[k]), static_cast<double>(s.N[k]));
    CHECK(static_cast<double>(levels.back().centers.size()) == expect);
    for (std::size_t leaf = 0; leaf < levels.back().centers.size(); ++leaf) {
        Representative r = representative_point(sys, phi, s, levels, leaf);
        CHECK(r.certificate.pass);
    }
}

TEST_CASE("level measures and ball bounds") {
    ShiftSystem sys(discrete_alphabet(2), 20);
    MoranParams p;
    MoranSchedule s = hand_schedule(sys, 0.25, {4}, {2});
    SeparatedSet S1 = word_set({{0, 0, 0, 1}, {0, 1, 1, 0}, {1, 0, 1, 0}, {1, 1, 1, 1}});
    FractalLevel h1 = build_level(sys, nullptr, S1, s, 1, Mode::exact, p);
    EmpiricalMeasure nu = level_measure(h1);
    double total = 0.0;
    for (double w : nu.weights) {
        CHECK(w == doctest::Approx(1.0 / 16.0));
        total += w;
    }
    CHECK(total == doctest::Approx(1.0));
    FractalLevel lone = h1;
    lone.centers.resize(1);
    CHECK(level_measure(lone).weights == std::vector<double>{1.0});

    long t = s.t[1];
    MassCertificate zero = ball_bound_check(sys, h1, s, 0.0, {{h1.centers[0], t}, {h1.centers[7], t + 3}}, 1);
    CHECK(zero.pass);
    MassCertificate one = ball_bound_check(sys, h1, s, 1.0, {{h1.centers[2], t}}, 1);
    REQUIRE(one.balls.size() == 1);
    CHECK(one.balls[0].measure == doctest::Approx(1.0 / 16.0));
    double bound = std::exp(-static_cast<double>(t) * (1.0 - 4.0 * s.gamma) * std::fabs(std::log(5.0 * s.eps0)));
    CHECK(one.balls[0].bound == doctest::Approx(bound));
    CHECK(one.pass == (1.0 / 16.0 <= bound));
    SymbolicPoint far(0, std::vector<Symbol>(static_cast<std::size_t>(t), 1), 1);
    MassCertificate vac = ball_bound_check(sys, h1, s, 5.0, {{far, t}}, 1);
    CHECK(vac.pass);
    CHECK(vac.balls[0].measure == 0.0);
    CHECK_THROWS_WITH_AS(ball_bound_check(sys, h1, s, 1.0, {{h1.centers[0], t - 1}}, 1), doctest::Contains("bad-horizon"),
                         Error);
}

}  // TEST_SUITE
