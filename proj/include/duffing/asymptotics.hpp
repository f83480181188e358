#pragma once

#include <string>
#include <utility>
#include <vector>

#include "duffing/core.hpp"
#include "duffing/integrator.hpp"

// Quantitative small-eps diagnostics: sup-norm distance of a computed
// solution to an equilibrium branch (with the eps^2 ratio that estimates the
// tracking constant), log-log convergence-rate regression, rescaled
// comparison of internal layers to the frozen-time limit profiles, and the
// exponential inter-layer tail bound.

namespace duffing {

// ---------------------------------------------------------------------------
// Branch-tracking band
// ---------------------------------------------------------------------------

struct BandReport {
    Branch branch = Branch::Lower;
    double c = 0.0, d = 0.0, mu = 0.0;   // errors measured on [c+mu, d-mu]
    double epsilon = 0.0;
    double e0 = 0.0;       // sup |u - branch|
    double e1 = 0.0;       // sup eps |u' - branch'|
    double ratio0 = 0.0;   // e0 / eps^2: fitted tracking constant
    double ratio1 = 0.0;   // e1 / eps^2: fitted derivative constant
    double tWorst = 0.0;   // location of the e0 supremum
};

// Sup-norm distance of the sampled solution to the Lower or Upper branch on
// [c+mu, d-mu], scanned at resolution min(eps/10, 1e-3).  The solution must
// stay on the matching side of +-sqrt(lambda/3) on [c, d]; otherwise throws
// "side violation" naming the first offending time.
BandReport bandCheck(const ProblemParams& params,
                     const std::vector<Sample>& solution, Branch branch,
                     double c, double d, double mu = 0.3);

// ---------------------------------------------------------------------------
// Convergence-rate regression
// ---------------------------------------------------------------------------

struct RateFit {
    double slope = 0.0;       // least-squares slope of log err vs log eps
    double intercept = 0.0;
    double maxResidual = 0.0; // worst per-point log residual
};

// Fits err ~ C eps^slope from (eps, err) pairs.  Requires at least four
// eps values spanning a factor >= 4; otherwise throws "insufficient spread".
RateFit rateRegression(const std::vector<std::pair<double, double>>& points);

// ---------------------------------------------------------------------------
// Layer profile comparison
// ---------------------------------------------------------------------------

struct LayerReport {
    double center = 0.0;      // layer center used for the rescaling
    double window = 0.0;      // tau half-window of the comparison
    double supError = 0.0;    // sup_tau |u(center + eps tau) - V(tau)|
    double offset = 0.0;      // |extremum/zero time - center| in t units
    double offsetBound = 0.0; // 3 eps |ln eps| / K
    double M1 = 0.0;          // 2 (Ubar(pi) - sqrt(lambda/3))
};

// Rescales t = center + eps tau and compares the solution to the matching
// frozen-time limit profile on tau in [max(-window, lo), min(window, hi)]
// (the intersection with the sampled span, so endpoint layers compare
// one-sided).  Throws "profile window unreachable" if the solution leaves
// [-2b, 2b] inside the window.
LayerReport layerProfileCheck(const ProblemParams& params,
                              const std::vector<Sample>& solution,
                              ProfileKind kind, double center, double window,
                              double kappa = 1.0);

// ---------------------------------------------------------------------------
// Exponential tail bound
// ---------------------------------------------------------------------------

struct TailReport {
    double mu = 0.0;
    double lhsMax = 0.0;   // max of |u-ref| + (eps/2K) |u'-ref'| on [c+mu, d-mu]
    double bound = 0.0;    // M1 exp(-K mu / eps)
    bool holds = false;
};

// Verifies |u - ref| + (eps/2K)|u' - ref'| <= M1 e^{-K mu / eps} on
// [c+mu, d-mu] with M1 = 2 (Ubar(pi) - sqrt(lambda/3)), for a solution and a
// reference that both hug the same branch.
TailReport exponentialTailCheck(const ProblemParams& params,
                                const std::vector<Sample>& solution,
                                const std::vector<Sample>& reference,
                                double c, double d, double mu);

// Kendall rank correlation of two equally long value lists; used to test
// that fitted tracking constants show no growth trend along an eps-suite.
double kendallTau(const std::vector<double>& x, const std::vector<double>& y);

// Cubic-Hermite evaluation of a sample array (value and derivative); t is
// clamped to the sampled span.  Shared by the diagnostics above.
double sampleValue(const std::vector<Sample>& samples, double t);
double sampleSlope(const std::vector<Sample>& samples, double t);

}  // namespace duffing
