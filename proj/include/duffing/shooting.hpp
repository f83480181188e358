#pragma once

#include <optional>
#include <vector>

#include "duffing/core.hpp"
#include "duffing/integrator.hpp"

// Shooting on the initial value u(0) = alpha, u'(0) = 0 (and, for the up-wind
// family, on the initial slope at t = pi/2).  The boundary functional is
// G(alpha) = u_alpha'(pi) for the truncated equation, which is total and
// continuous in alpha.

namespace duffing {

enum class SolutionClass { U1, U2, U3, U4, U5, MMaxima, UpWind, Other };

struct ExtremaLadder {
    std::vector<Event> maxima;   // interior extrema, ordered by time
    std::vector<Event> minima;

    // Successive maxima (minima) strictly decreasing inside (0, pi).
    bool decreasing(double tol = 0.0) const;
};

struct ShootResult {
    double alpha = 0.0;          // u(0) for alpha-shots, u'(pi/2) for up-wind
    double residual = 0.0;       // |u'(pi)| of the polished solution
    SolutionClass cls = SolutionClass::Other;
    int m = 0;                   // maxima count for the m-maxima / up-wind families
    double antisymmetryDefect = 0.0;  // max |u(pi/2+s) + u(pi/2-s)| (U3 only)
    ExtremaLadder ladder;
    Trajectory solution;         // truncated integration over the full span
    // Collocation-refined samples of the solution, populated when the shot
    // trajectory loses accuracy along a slow-manifold tail (small eps); all
    // verification checks then run on these samples.
    std::vector<Sample> profile;
};

// G(alpha) = u'(pi) of the truncated equation.
double shootG(const ProblemParams& params, double alpha);

// G and the linearized slope dG/dalpha = v'(pi) from the variational system.
struct GWithSlope {
    double G = 0.0;
    double slope = 0.0;
};
GWithSlope shootGWithSlope(const ProblemParams& params, double alpha);

// All roots of G on [lo, hi]: scan (initially `density` points, doubled until
// the bracket count stabilizes twice), then bisection to width 1e-6 followed
// by secant polish; duplicates merged within 1e-8.  Throws "scan too coarse"
// if adjacent brackets sit closer than two scan steps at the final density.
std::vector<double> findGZeros(const ProblemParams& params, double lo,
                               double hi, int density = 4000);

// findGZeros over [-b-1, b+1] plus classification.  Trajectories cover
// [0, 2 pi].
std::vector<ShootResult> findPeriodicAll(const ProblemParams& params,
                                         int density = 4000);

struct UpResult {
    double alpha = 0.0;
    double residual = 0.0;
    double antisymmetryDefect = 0.0;
    // [0, pi], from the bisected alpha; empty when the shot bracket is
    // unresolvable in double precision (small eps) and only the collocation
    // profile below is produced.
    Trajectory solution;
    std::vector<Sample> profile;      // u_p on [0, pi/2] from the collocation
                                      // refinement (reliable for all eps)
};

// The odd periodic solution u_p: largest alpha < 0 whose first zero crossing
// sits at t = pi/2.  For small eps the shot trajectory loses accuracy beyond
// the layer (conditioning grows like exp(K pi/(2 eps))), so the returned
// profile is re-solved by damped-Newton finite differences on [0, pi/2].
UpResult findUp(const ProblemParams& params);

// Periodic solution with exactly m maxima in (0, pi], the last at pi,
// -sqrt(lambda) < u(0) < U0(pi) and U0(pi) < u(pi) < Ubar(pi).
// Requires lambda > Lambda.
ShootResult findMMaxima(const ProblemParams& params, int m);

// Up-wind solution: u(pi/2) = 0, u'(pi/2) = beta < 0, with m minima and m
// maxima in (pi/2, pi], the last maximum at pi.  The returned trajectory
// covers [pi/2, pi]; alpha holds beta.
ShootResult findUpwind(const ProblemParams& params, int m);

// Interior extrema of a trajectory on (t0, t1), from derivative-zero events.
ExtremaLadder extremaLadder(const Trajectory& traj, double t0, double t1);

// Finite-difference Newton solve of eps^2 u'' = u^3 - lambda u + g on
// [0, pi/2] with u'(0) = 0, u(pi/2) = 0, on a grid resolving the layer.
// Used for the small-eps u_p profile.  Throws if Newton stalls.
std::vector<Sample> relaxUpProfile(const ProblemParams& params,
                                   const std::vector<Sample>* seed = nullptr);

}  // namespace duffing
