#pragma once

#include <vector>

#include "duffing/core.hpp"
#include "duffing/shooting.hpp"

// Lambda-sweeps of the zeros of the boundary functional G(alpha) = u_alpha'(pi),
// detection of the bifurcation value lambda_b where extra zeros appear,
// variational diagnostics excluding a pitchfork (v'(pi) > 0 along the odd
// solution) and fixing the fold direction (h'(pi) > 0), and the small-eps
// trend lambda_b -> lambda0.

namespace duffing {

struct ZeroRecord {
    double alpha = 0.0;
    double G = 0.0;        // residual of the polished zero
    double slope = 0.0;    // G'(alpha) = v'(pi), the stability surrogate
};

struct LambdaSlice {
    double lambda = 0.0;
    std::vector<ZeroRecord> zeros;
};

struct BifurcationDiagram {
    double epsilon = 0.0;
    ForcingSpec forcing = ForcingSpec::cosine();
    std::vector<LambdaSlice> slices;      // one per grid lambda, ascending
    bool foundLambdaB = false;
    double lambdaBLo = 0.0;               // bracketing interval, width <= 1e-4
    double lambdaBHi = 0.0;
    int countBelow = 0;                   // zero counts across the transition
    int countAbove = 0;
};

// Zero count and records at one lambda: single scan plus refinement (the
// scan density is doubled once as a missed-bracket check).
LambdaSlice sliceAt(double lambda, double epsilon, const ForcingSpec& forcing,
                    int density = 800);

// Scans [lambdaLo, lambdaHi] at the given step, then bisects the first
// zero-count transition to a bracket of width <= 1e-4.  Throws
// "count oscillation" if counts are non-monotone near the transition beyond
// one grid cell.
BifurcationDiagram sweep(double lambdaLo, double lambdaHi, double step,
                         double epsilon,
                         const ForcingSpec& forcing = ForcingSpec::cosine(),
                         int density = 800);

struct PitchforkReport {
    double alphaP = 0.0;     // the odd solution's initial value
    double minV = 0.0;       // min of the variational solution on [0, pi]
    double vPrimePi = 0.0;   // G'(alpha_p) from the variational system
    double fdSlope = 0.0;    // centered finite difference of G, delta = 1e-6
    bool excluded = false;   // v > 0 on [0, pi] and v'(pi) > 0
};

// Co-integrates the variational system along the odd solution u_p.
PitchforkReport pitchforkExclusion(const ProblemParams& params);

struct FoldPoint {
    double lambda = 0.0;   // where the interior local maximum of G crosses 0
    double alpha = 0.0;    // the (near-)double zero
    double G = 0.0;
    double Gslope = 0.0;
};

// Locates the fold on the negative-alpha side: the local maximum of G left
// of the odd solution rises through zero as lambda increases across
// lambda_b.  Returns the near-double zero with |G| and |G'| below 1e-6.
FoldPoint findFold(double epsilon, double lambdaLo, double lambdaHi,
                   const ForcingSpec& forcing = ForcingSpec::cosine());

struct FoldReport {
    double alpha = 0.0;
    double G = 0.0;
    double Gslope = 0.0;
    double vPi = 0.0;          // v(pi) > 0 along the chain of the argument
    double hPrimePi = 0.0;     // dG/dlambda from the lambda-sensitivity system
    double fdLambdaSlope = 0.0;// (G(lambda+d) - G(lambda-d)) / 2d, d = 1e-5
    bool uNegative = false;    // u < 0 on [0, pi]
};

// Fold-direction diagnostic at a near-double zero: requires |G| and |G'|
// both <= 1e-6 at alpha1, else throws "not a fold".
FoldReport foldDirection(const ProblemParams& params, double alpha1);

struct LambdaBEntry {
    double epsilon = 0.0;
    double lambdaB = 0.0;
};

// lambda_b(eps) for a decreasing eps-suite, each located by the fold search;
// the trend approaches lambda0 from below.
std::vector<LambdaBEntry> lambdaBLimit(const std::vector<double>& epsSuite,
                                       const ForcingSpec& forcing =
                                           ForcingSpec::cosine());

}  // namespace duffing
