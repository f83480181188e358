#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "duffing/core.hpp"
#include "duffing/integrator.hpp"

// Symbolic-dynamics machinery: the monotone-crossing certificate ("condition
// A"), the spike family generated from the certified solution, and nested
// bisection on initial values producing solutions with a prescribed
// spike-crossing itinerary, together with the induced order on itineraries.
//
// The interesting initial values cluster exponentially close to the value
// whose solution tracks the lower equilibrium branch; resolving an itinerary
// of depth n pi costs roughly 10 n decimal digits at eps = 0.25.  The
// bisection therefore runs on an MPFR-backed fixed-step integrator whose
// working precision follows the bracket width.

namespace duffing {

// ---------------------------------------------------------------------------
// Condition A
// ---------------------------------------------------------------------------

struct EpsilonLambda {
    double b = 0.0;
    double Tlambda = 0.0;
    double epsLambda = 0.0;   // pi / (3 Tlambda)
};

// Closed-form sufficient threshold: the solution of the slow-scale equation
// from (-sqrt(lambda), 0) reaches b monotonically before pi/(3 eps) whenever
// eps <= epsLambda.  Two branches of Tlambda, switching at lambda = 4.
// Throws "lambda below lambda0".
EpsilonLambda epsilonLambda(double lambda);

enum class CertMethod { ClosedForm, DirectIntegration };

struct ConditionACertificate {
    double lambda = 0.0;
    double epsilon = 0.0;
    double alphaBar = 0.0;
    CertMethod method = CertMethod::DirectIntegration;
    bool holds = false;
    double bound = 0.0;       // Tlambda (closed form) or pi/2 (direct)
    double crossTime = 0.0;   // time of the +b crossing (direct path; NaN if none)
};

// alphaBar defaults to -sqrt(lambda).  ClosedForm: holds iff eps <= epsLambda
// (throws below lambda0).  DirectIntegration: integrate from (alphaBar, 0);
// holds iff u' > 0 throughout and u reaches +b before t = pi/2.
ConditionACertificate certifyConditionA(const ProblemParams& params,
                                        CertMethod method,
                                        double alphaBar = std::nan(""));

// ---------------------------------------------------------------------------
// Spike family
// ---------------------------------------------------------------------------

// w_k(t) = (-1)^k u_abar(t - k pi) restricted to where |w_k| <= b, i.e. to
// [k pi - T, k pi + T] with T the certified +b crossing time.  Only w_0 is
// integrated; every other spike is a translation (even k) or a translated
// reflection (odd k) of the same sample array.
struct SpikeFamily {
    double alphaBar = 0.0;
    double b = 0.0;
    double T = 0.0;                // support half-width, < pi/2
    int count = 0;                 // spikes w_0 .. w_{count-1}
    std::vector<double> tau;       // sample offsets on [0, T]
    std::vector<double> w0;        // u_abar(tau)
    std::vector<double> dw0;

    double value(int k, double t) const;   // throws outside the support
    double slope(int k, double t) const;
    double sLower(int k) const { return k * kPi - T; }
    double sUpper(int k) const { return k * kPi + T; }
    bool contains(int k, double t) const {
        return k >= 0 && k < count && t >= sLower(k) && t <= sUpper(k);
    }
};

SpikeFamily buildSpikes(const ProblemParams& params, double alphaBar,
                        int count);

// ---------------------------------------------------------------------------
// Itineraries
// ---------------------------------------------------------------------------

struct SymbolSequence {
    std::vector<int> sigma;        // strictly increasing, gaps >= 2

    static SymbolSequence parse(const std::string& csv);
    void validate() const;         // throws std::invalid_argument
};

// Entries from {1..5}: 1/2 = double crossing of w_{2k-1}; 3 = neither spike
// of the window; 4/5 = double crossing of w_{2k}.  A 1 or 2 may not be
// adjacent to a 4 or 5.
struct FiveSymbolSequence {
    std::vector<int> omega;

    static FiveSymbolSequence parse(const std::string& csv);
    void validate() const;
    SymbolSequence crossings() const;   // the induced spike index set
};

struct CrossingRecord {
    int spike = 0;
    double t = 0.0;
    double u = 0.0;
    double slopeGap = 0.0;   // |u' - w_k'| at the crossing
};

struct BracketResult {
    // Nested interval per refinement stage (double-rounded; deep stages
    // coincide at double precision, see widthLog10PerStage).
    std::vector<std::pair<double, double>> history;
    std::vector<double> widthLog10PerStage;
    std::string alphaLowStr;       // deepest bracket endpoints, full precision
    std::string alphaHighStr;
    double alpha = 0.0;            // representative: deepest midpoint
    double widthLog10 = 0.0;
    double horizon = 0.0;
    int digits = 0;                // working precision at the deepest stage
    std::vector<Sample> profile;   // representative trajectory
    std::vector<CrossingRecord> crossings;   // first crossing per spike
};

// Reproduce the nested-interval construction: bisect on the classified exit
// pattern until the representative's spike-crossing set equals sigma exactly
// on [0, horizon] with no guard hit.  Horizon defaults to (sigma_last + 2) pi
// (pi for the empty itinerary).  Throws "bracket collapse" when the required
// precision exceeds the ladder, "pattern ambiguity" on a tangential crossing.
BracketResult findItinerarySolution(const ProblemParams& params,
                                    const SymbolSequence& sigma,
                                    double horizon = 0.0);

// As above plus the g+/g- side conditions that split each crossing window
// into the five symbols.
BracketResult findFiveSymbolSolution(const ProblemParams& params,
                                     const FiveSymbolSequence& omega,
                                     double horizon = 0.0);

// ---------------------------------------------------------------------------
// Kneading order
// ---------------------------------------------------------------------------

struct KneadingVerdict {
    int verdict = 0;      // +1: alpha(s1) > alpha(s2), -1: the reverse
    int predicted = 0;    // from the first-difference rank rules
    bool consistent = false;
};

// Compares the constructed brackets of two itineraries.  Throws
// "incomparable" when the brackets overlap.
KneadingVerdict kneadingOrder(const ProblemParams& params,
                              const SymbolSequence& s1,
                              const SymbolSequence& s2);

// Order of two already-constructed brackets (+1/-1); throws "incomparable".
int compareBrackets(const BracketResult& a, const BracketResult& b);

// First-difference rank of the symbol following a common prefix: even
// symbols order above the empty continuation, odd symbols below; among evens
// the smaller is larger in alpha, among odds the larger is larger.
double symbolRank(int symbol);   // symbol 0 encodes "no further crossing"

}  // namespace duffing
