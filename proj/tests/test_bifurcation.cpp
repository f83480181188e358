#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "duffing/bifurcation.hpp"

using namespace duffing;

TEST_CASE("sweep at eps=1 finds the bifurcation near lambda=1.023") {
    BifurcationDiagram d = sweep(0.95, 1.11, 0.02, 1.0);
    REQUIRE(d.foundLambdaB);
    double lambdaB = 0.5 * (d.lambdaBLo + d.lambdaBHi);
    CHECK(d.lambdaBHi - d.lambdaBLo <= 1e-4);
    CHECK(lambdaB > 1.013);
    CHECK(lambdaB < 1.033);
    CHECK(d.countBelow == 1);
    CHECK(d.countAbove >= 3);
    CHECK(lambdaB < computeLambda0(ForcingSpec::cosine()));
}

TEST_CASE("single zero below the bifurcation and at lambda <= 0") {
    for (double lambda : {0.0, -1.0, 0.5}) {
        LambdaSlice s = sliceAt(lambda, 1.0, ForcingSpec::cosine());
        CHECK(s.zeros.size() == 1);
    }
}

TEST_CASE("pitchfork exclusion along the odd solution") {
    for (double lambda : {1.0, 1.5}) {
        ProblemParams p = ProblemParams::make(0.1, lambda);
        PitchforkReport r = pitchforkExclusion(p);
        CHECK(r.minV > 0.0);
        CHECK(r.vPrimePi > 0.0);
        CHECK(r.excluded);
        CHECK(r.vPrimePi ==
              doctest::Approx(r.fdSlope).epsilon(1e-3));
    }
}

TEST_CASE("fold direction at the detected bifurcation (eps=1)") {
    FoldPoint fp = findFold(1.0, 1.0, 1.05);
    CHECK(fp.lambda > 1.013);
    CHECK(fp.lambda < 1.033);
    CHECK(std::fabs(fp.G) <= 1e-6);
    CHECK(std::fabs(fp.Gslope) <= 1e-6);

    ProblemParams p = ProblemParams::make(1.0, fp.lambda);
    FoldReport r = foldDirection(p, fp.alpha);
    CHECK(r.uNegative);
    CHECK(r.vPi > 0.0);
    CHECK(r.hPrimePi > 0.0);
    CHECK(r.hPrimePi == doctest::Approx(r.fdLambdaSlope).epsilon(1e-3));
    CHECK_THROWS_WITH(foldDirection(p, fp.alpha + 0.3),
                      doctest::Contains("not a fold"));
}

TEST_CASE("lambda_b approaches lambda0 from below as eps shrinks") {
    auto table = lambdaBLimit({1.0, 0.5, 0.25, 0.1});
    double lambda0 = computeLambda0(ForcingSpec::cosine());
    REQUIRE(table.size() == 4);
    for (const LambdaBEntry& e : table) CHECK(e.lambdaB < lambda0);
    for (std::size_t i = 1; i < table.size(); ++i)
        CHECK(table[i].lambdaB > table[i - 1].lambdaB);
    CHECK(lambda0 - table.back().lambdaB <
          lambda0 - table.front().lambdaB);
}
