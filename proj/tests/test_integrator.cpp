#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <random>

#include "duffing/integrator.hpp"
#include "duffing/shooting.hpp"

using namespace duffing;

TEST_CASE("rest point stays at rest") {
    ProblemParams p = ProblemParams::make(1.0, 0.0, ForcingSpec::constant(0.0));
    Trajectory t = integrate(p, 0.0, 10.0, 0.0, 0.0);
    for (double s = 0; s <= 10.0; s += 0.1) {
        CHECK(std::fabs(t.u(s)) < 1e-12);
        CHECK(std::fabs(t.du(s)) < 1e-12);
    }
}

TEST_CASE("below the lowest equilibrium the solution dives to the guard") {
    // U_lower(0) = -(1+sqrt 5)/2 at lambda=2; start just below it.
    ProblemParams p = ProblemParams::make(1.0, 2.0);
    double alpha = -(1.0 + std::sqrt(5.0)) / 2.0 - 0.01;
    Trajectory t = integrate(p, 0.0, 20.0, alpha, 0.0);
    CHECK(t.terminal() == Terminal::GuardLow);
    // Monotone decrease up to the guard.
    double prev = t.u(t.tStart());
    for (double s = 0.05; s <= t.tEnd(); s += 0.05) {
        CHECK(t.u(s) <= prev + 1e-12);
        prev = t.u(s);
    }
}

TEST_CASE("monotone crossing of b before pi/2 at lambda0, eps=0.25") {
    double lambda0 = computeLambda0(ForcingSpec::cosine());
    ProblemParams p = ProblemParams::make(0.25, lambda0);
    IntegrateOptions opt;
    opt.events.push_back(levelEvent("cross-b", p.b, +1, true));
    Trajectory t = integrate(p, 0.0, kPi / 2, -std::sqrt(lambda0), 0.0, opt);
    REQUIRE(t.terminal() == Terminal::EventStop);
    CHECK(t.events().back().t < kPi / 2);
}

TEST_CASE("truncated shots are total and signed at the ends") {
    ProblemParams p = ProblemParams::make(1.0, 2.0, ForcingSpec::cosine(), true);
    Trajectory lo = integrate(p, 0.0, kPi, -10.0, 0.0);
    CHECK(lo.terminal() == Terminal::ReachedTend);
    CHECK(lo.du(kPi) < 0);
    Trajectory hi = integrate(p, 0.0, kPi, 10.0, 0.0);
    CHECK(hi.terminal() == Terminal::ReachedTend);
    CHECK(hi.du(kPi) > 0);
}

TEST_CASE("truncated and untruncated agree while inside the band") {
    ProblemParams p = ProblemParams::make(0.5, 2.0);
    ProblemParams pt = p.withTruncation(true);
    Trajectory a = integrate(p, 0.0, 2.0, -1.0, 0.0);
    Trajectory b = integrate(pt, 0.0, 2.0, -1.0, 0.0);
    for (double s = 0; s <= 2.0; s += 0.01) {
        if (std::fabs(a.u(s)) > p.b) break;
        CHECK(a.u(s) == doctest::Approx(b.u(s)).epsilon(1e-9));
    }
}

TEST_CASE("even forcing gives even solutions about t=0") {
    ProblemParams p = ProblemParams::make(0.5, 2.0);
    Trajectory fwd = integrate(p, 0.0, 1.5, -1.4, 0.0);
    Trajectory bwd = integrate(p, 0.0, -1.5, -1.4, 0.0);
    for (double s = 0; s <= 1.5; s += 0.05)
        CHECK(fwd.u(s) == doctest::Approx(bwd.u(-s)).epsilon(1e-9));
}

TEST_CASE("self-convergence under tolerance halving") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> de(0.05, 1.0), dl(0.5, 3.0),
        da(-1.5, 0.0);
    for (int i = 0; i < 10; ++i) {
        ProblemParams p =
            ProblemParams::make(de(rng), dl(rng), ForcingSpec::cosine(), true);
        double alpha = da(rng);
        IntegrateOptions coarse, fine;
        fine.rtol = coarse.rtol / 2;
        fine.atol = coarse.atol / 2;
        double uc = integrate(p, 0, kPi, alpha, 0, coarse).u(kPi);
        double uf = integrate(p, 0, kPi, alpha, 0, fine).u(kPi);
        // Local error is tolerance-bounded per step; the global defect
        // accumulates over O(10^3) steps, so allow a 100x stack-up factor.
        CHECK(std::fabs(uc - uf) <=
              100 * fine.rtol * std::max(1.0, std::fabs(uf)) + 100 * fine.atol);
    }
}

TEST_CASE("variational component matches finite differences") {
    // Untruncated and short-horizon, so the right-hand side is smooth along
    // the whole span (the truncation corner is only C^0 in the parameters).
    ProblemParams p = ProblemParams::make(0.5, 2.0);
    double alpha = -1.55;
    const double T = 1.0;
    IntegrateOptions opt;
    opt.variational = true;
    opt.lambdaSensitivity = true;
    opt.guard = false;
    Trajectory t = integrate(p, 0, T, alpha, 0, opt);
    const double da = 1e-6;
    double fd = (integrate(p, 0, T, alpha + da, 0).u(T) -
                 integrate(p, 0, T, alpha - da, 0).u(T)) /
                (2 * da);
    CHECK(t.v(T) == doctest::Approx(fd).epsilon(1e-4));

    const double dl = 1e-6;
    ProblemParams pp = p, pm = p;
    pp.lambda += dl;
    pm.lambda -= dl;
    double fdh = (integrate(pp, 0, T, alpha, 0).u(T) -
                  integrate(pm, 0, T, alpha, 0).u(T)) /
                 (2 * dl);
    CHECK(t.hSens(T) == doctest::Approx(fdh).epsilon(1e-4));
}

TEST_CASE("crossing times: the odd solution crosses zero at pi/2") {
    ProblemParams p = ProblemParams::make(1.0, 2.0);
    UpResult up = findUp(p);
    Curve zero;
    zero.id = "level0";
    zero.tmin = 0.1;
    zero.tmax = kPi - 0.1;
    zero.value = [](double) { return 0.0; };
    zero.slope = [](double) { return 0.0; };
    auto events = crossingTimes(up.solution, zero);
    REQUIRE(events.size() == 1);
    CHECK(events[0].t == doctest::Approx(kPi / 2).epsilon(1e-8));
}

TEST_CASE("binary sample round-trip is exact") {
    ProblemParams p = ProblemParams::make(0.5, 2.0);
    Trajectory t = integrate(p, 0.0, 2.0, -1.0, 0.0);
    std::string path = "roundtrip_samples.bin";
    writeSamplesBinary(path, t.samples());
    auto back = readSamplesBinary(path);
    REQUIRE(back.size() == t.samples().size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].t == t.samples()[i].t);
        CHECK(back[i].u == t.samples()[i].u);
        CHECK(back[i].du == t.samples()[i].du);
    }
    std::remove(path.c_str());
}
