#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

// Problem definition for the forced Duffing equation
//   eps^2 u'' = u^3 - lambda u + g(t)
// together with the cubic equilibrium geometry, critical constants and
// the frozen-time limit profiles used by the asymptotic diagnostics.

namespace duffing {

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Forcing
// ---------------------------------------------------------------------------

enum class ForcingKind { Cosine, CosMinusSin2, Fourier };

struct FourierTerm {
    int harmonic = 0;     // k in cos(k t), sin(k t); k = 0 gives a constant
    double cosCoeff = 0.0;
    double sinCoeff = 0.0;
};

class ForcingSpec {
public:
    static ForcingSpec cosine();
    static ForcingSpec cosMinusSin2();                 // g(t) = cos t - sin 2t
    static ForcingSpec fourier(std::vector<FourierTerm> terms);
    static ForcingSpec constant(double value);         // frozen-time forcing

    double operator()(double t) const;
    double derivative(double t) const;

    // sup |g| over one period (exact for Cosine, grid+refine otherwise).
    double supNorm() const;

    ForcingKind kind() const { return kind_; }
    const std::vector<FourierTerm>& terms() const { return terms_; }

private:
    ForcingKind kind_ = ForcingKind::Cosine;
    std::vector<FourierTerm> terms_;
};

// ---------------------------------------------------------------------------
// Problem parameters
// ---------------------------------------------------------------------------

// Barrier level for the truncation.  For lambda > 0 we use
// b = sqrt(lambda + 1/(2 lambda)); for lambda <= 0 the smallest level, found
// by doubling from 1, with b^3 - lambda b > sup|g|.
double defaultBarrier(double lambda, double supG = 1.0);

struct ProblemParams {
    double epsilon = 1.0;
    double lambda = 2.0;
    ForcingSpec forcing = ForcingSpec::cosine();
    bool truncate = false;   // freeze u^3 - lambda u outside [-b, b]
    double b = 0.0;

    static ProblemParams make(double epsilon, double lambda,
                              ForcingSpec forcing = ForcingSpec::cosine(),
                              bool truncate = false);

    ProblemParams withTruncation(bool on) const {
        ProblemParams p = *this;
        p.truncate = on;
        return p;
    }

    // u^3 - lambda u, frozen at +-b when truncation is on.
    double nonlinearity(double u) const;
    // d/du of the (possibly truncated) nonlinearity.
    double nonlinearityPrime(double u) const;
};

// ---------------------------------------------------------------------------
// Cubic equilibrium branches
// ---------------------------------------------------------------------------

enum class Branch { Lower, Middle, Upper, Single, LowerMiddle, MiddleUpper };

struct CubicRoot {
    double value = 0.0;
    Branch branch = Branch::Single;
};

// All real roots of u^3 - lambda u + c = 0, sorted ascending, Newton
// polished to residual <= 1e-12 * max(1, |r|^3).  At a double root the merged
// pair is labelled LowerMiddle or MiddleUpper depending on the sign of c.
std::vector<CubicRoot> solveCubicBranches(double lambda, double c);

// Branch functions of t for forcing g.  Throw if the requested branch does
// not exist at t.
double lowerBranch(double lambda, const ForcingSpec& g, double t);
double middleBranch(double lambda, const ForcingSpec& g, double t);
double upperBranch(double lambda, const ForcingSpec& g, double t);
int branchCount(double lambda, const ForcingSpec& g, double t);

// d/dt of a branch, from implicit differentiation: B' = -g'(t)/(3B^2-lambda).
double branchSlope(double lambda, const ForcingSpec& g, double t, double branchValue);

// ---------------------------------------------------------------------------
// Critical constants
// ---------------------------------------------------------------------------

// lambda0 = the lambda at which max_t |g(t)| = (2 lambda/3) sqrt(lambda/3),
// located by bisection to 1e-10.  Throws "no finite lambda0" when sup|g| = 0.
double computeLambda0(const ForcingSpec& g);

// Frozen-time energy H(u) = lambda u^2 - u^4/2.
double energyH(double lambda, double u);

// Anchor V_kappa(0) of the homoclinic orbit of  v'' = v^3 - lambda v + kappa,
// i.e. the turning point of the level set through the upper saddle.
// Throws "no homoclinic" when the frozen system has fewer than three
// equilibria at this (lambda, kappa).
double homoclinicAnchor(double lambda, double kappa);

// Lambda = inf{ lambda > lambda0 : V_1(0) < U_0(pi) } for cosine forcing,
// by bisection on (lambda0 + 1e-6, 3] to 1e-8.
double computeLambda();

struct CriticalConstants {
    double lambda0 = 0.0;
    double Lambda = 0.0;
    double K = 0.0;       // sqrt(Ubar(0) - sqrt(lambda/3)), for lambda > lambda0
};

CriticalConstants criticalConstants(double lambda);

// ---------------------------------------------------------------------------
// Limit profiles (frozen-time homoclinic / heteroclinic orbits)
// ---------------------------------------------------------------------------

enum class ProfileKind {
    HomoclinicVKappa,    // v'' = v^3 - lambda v + kappa, kappa in (0,1]
    HomoclinicVMinus1,   // v'' = v^3 - lambda v - 1
    HeteroclinicV0Plus,  // v'' = v^3 - lambda v, Ubar(pi/2) -> Ulower(pi/2)
    HeteroclinicV0Minus, // reflection V0-(t) = -V0+(-t)
};

struct LimitProfile {
    ProfileKind kind;
    double lambda = 0.0;
    double kappa = 0.0;
    double anchor = 0.0;            // value at tau = 0
    std::vector<double> tau;
    std::vector<double> v;
    std::vector<double> vdot;
    double energyDrift = 0.0;       // max |E(tau) - E(0)| along the window

    double valueAt(double t) const;   // linear interpolation on the samples
    double slopeAt(double t) const;
};

// Samples of the requested profile on [-T, T] at spacing `step` in tau.
// Throws "window too large" if the orbit leaves [-2b, 2b].
LimitProfile limitProfile(ProfileKind kind, double lambda, double kappa,
                          double window, double step);

}  // namespace duffing
