#include "duffing/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "duffing/integrator.hpp"

namespace duffing {

namespace {

ProblemParams paramsAt(double lambda, double epsilon, const ForcingSpec& g) {
    return ProblemParams::make(epsilon, lambda, g, /*truncate=*/true);
}

// Sign changes of G on a uniform alpha grid; returns bracket lower indices.
std::vector<double> scanG(const ProblemParams& p, double lo, double hi, int n,
                          std::vector<int>* brackets) {
    std::vector<double> G(n + 1);
    for (int i = 0; i <= n; ++i)
        G[i] = shootG(p, lo + (hi - lo) * i / n);
    brackets->clear();
    for (int i = 0; i < n; ++i)
        if (G[i] == 0.0 || (G[i] < 0) != (G[i + 1] < 0)) brackets->push_back(i);
    return G;
}

double bisectG(const ProblemParams& p, double a, double b, double Ga) {
    for (int it = 0; it < 64 && b - a > 1e-13 * std::max(1.0, std::fabs(a));
         ++it) {
        double m = 0.5 * (a + b);
        double Gm = shootG(p, m);
        if (Gm == 0.0) return m;
        if ((Gm < 0) == (Ga < 0)) {
            a = m;
            Ga = Gm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

int countZeros(double lambda, double epsilon, const ForcingSpec& g,
               int density) {
    ProblemParams p = paramsAt(lambda, epsilon, g);
    double lo = -p.b - 1, hi = p.b + 1;
    std::vector<int> br;
    scanG(p, lo, hi, density, &br);
    return static_cast<int>(br.size());
}

// Interior local maximum of G with the most negative alpha, refined by
// bisection on the variational slope G' to |G'| <= 1e-8.
bool localMaxOfG(const ProblemParams& p, double lo, double hi, int n,
                 double* alphaStar, double* Gstar, double* slopeStar) {
    std::vector<double> G(n + 1);
    for (int i = 0; i <= n; ++i)
        G[i] = shootG(p, lo + (hi - lo) * i / n);
    int idx = -1;
    for (int i = 1; i < n; ++i)
        if (G[i] > G[i - 1] && G[i] > G[i + 1]) {
            idx = i;
            break;   // most negative alpha first
        }
    if (idx < 0) return false;
    double a = lo + (hi - lo) * (idx - 1) / n;
    double b = lo + (hi - lo) * (idx + 1) / n;
    // slope is positive at a, negative at b; bisect the sign change.
    for (int it = 0; it < 80; ++it) {
        double m = 0.5 * (a + b);
        GWithSlope gs = shootGWithSlope(p, m);
        if (std::fabs(gs.slope) <= 1e-9 || b - a < 1e-14) {
            *alphaStar = m;
            *Gstar = gs.G;
            *slopeStar = gs.slope;
            return true;
        }
        if (gs.slope > 0) a = m;
        else b = m;
    }
    GWithSlope gs = shootGWithSlope(p, 0.5 * (a + b));
    *alphaStar = 0.5 * (a + b);
    *Gstar = gs.G;
    *slopeStar = gs.slope;
    return true;
}

// Value of G at its interior local maximum left of the odd solution.
double foldFunctional(double lambda, double epsilon, const ForcingSpec& g,
                      double* alphaStar, double* slopeStar) {
    ProblemParams p = paramsAt(lambda, epsilon, g);
    double G = 0;
    if (!localMaxOfG(p, -p.b - 1, -0.02, 160, alphaStar, &G, slopeStar))
        throw std::runtime_error("no interior local maximum of G found");
    return G;
}

}  // namespace

LambdaSlice sliceAt(double lambda, double epsilon, const ForcingSpec& forcing,
                    int density) {
    ProblemParams p = paramsAt(lambda, epsilon, forcing);
    double lo = -p.b - 1, hi = p.b + 1;
    std::vector<int> br, br2;
    std::vector<double> G = scanG(p, lo, hi, density, &br);
    scanG(p, lo, hi, 2 * density, &br2);   // missed-bracket check
    if (br2.size() > br.size()) {
        br = br2;
        G = scanG(p, lo, hi, 2 * density, &br2);
        density *= 2;
    }
    LambdaSlice slice;
    slice.lambda = lambda;
    double h = (hi - lo) / density;
    for (int i : br) {
        double a = lo + h * i;
        double alpha = bisectG(p, a, a + h, G[i]);
        GWithSlope gs = shootGWithSlope(p, alpha);
        if (!slice.zeros.empty() &&
            std::fabs(alpha - slice.zeros.back().alpha) < 1e-8)
            continue;
        slice.zeros.push_back({alpha, gs.G, gs.slope});
    }
    return slice;
}

BifurcationDiagram sweep(double lambdaLo, double lambdaHi, double step,
                         double epsilon, const ForcingSpec& forcing,
                         int density) {
    if (step <= 0 || lambdaHi <= lambdaLo)
        throw std::invalid_argument("sweep: bad lambda range");
    BifurcationDiagram d;
    d.epsilon = epsilon;
    d.forcing = forcing;
    for (double lam = lambdaLo; lam <= lambdaHi + 0.5 * step; lam += step)
        d.slices.push_back(sliceAt(std::min(lam, lambdaHi), epsilon, forcing,
                                   density));

    std::vector<int> counts;
    for (const auto& s : d.slices) counts.push_back((int)s.zeros.size());

    // Locate the first count increase and reject oscillation beyond one cell.
    int trans = -1;
    for (std::size_t i = 0; i + 1 < counts.size(); ++i) {
        if (counts[i + 1] > counts[i] && trans < 0) trans = (int)i;
        if (counts[i + 1] < counts[i]) {
            bool oneCell = i + 2 < counts.size() && counts[i + 2] >= counts[i];
            if (!oneCell) throw std::runtime_error("count oscillation");
        }
    }
    if (trans < 0) return d;   // no transition inside the window

    double lo = d.slices[trans].lambda;
    double hi = d.slices[trans + 1].lambda;
    int cBelow = counts[trans], cAbove = counts[trans + 1];
    while (hi - lo > 1e-4) {
        double mid = 0.5 * (lo + hi);
        int c = countZeros(mid, epsilon, forcing, density);
        if (c > cBelow) hi = mid;
        else lo = mid;
    }
    d.foundLambdaB = true;
    d.lambdaBLo = lo;
    d.lambdaBHi = hi;
    d.countBelow = cBelow;
    d.countAbove = cAbove;
    return d;
}

PitchforkReport pitchforkExclusion(const ProblemParams& params) {
    ProblemParams p = params.withTruncation(true);
    UpResult up = findUp(p);
    PitchforkReport r;
    r.alphaP = up.alpha;

    IntegrateOptions opt;
    opt.variational = true;
    opt.guard = false;
    Trajectory traj = integrate(p, 0.0, kPi, up.alpha, 0.0, opt);
    r.minV = traj.v(0.0);
    for (double t = 0; t <= kPi; t += 1e-3)
        r.minV = std::min(r.minV, traj.v(std::min(t, kPi)));
    r.vPrimePi = traj.dv(kPi);

    const double da = 1e-6;
    r.fdSlope = (shootG(p, up.alpha + da) - shootG(p, up.alpha - da)) / (2 * da);
    r.excluded = r.minV > 0 && r.vPrimePi > 0;
    return r;
}

FoldPoint findFold(double epsilon, double lambdaLo, double lambdaHi,
                   const ForcingSpec& forcing) {
    double aLo, sLo, aHi, sHi;
    double mLo = foldFunctional(lambdaLo, epsilon, forcing, &aLo, &sLo);
    double mHi = foldFunctional(lambdaHi, epsilon, forcing, &aHi, &sHi);
    if (!(mLo < 0 && mHi > 0))
        throw std::runtime_error(
            "findFold: local maximum of G does not change sign on the bracket");
    FoldPoint best{lambdaHi, aHi, mHi, sHi};
    double lo = lambdaLo, hi = lambdaHi;
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        double a, s;
        double m = foldFunctional(mid, epsilon, forcing, &a, &s);
        if (std::fabs(m) < std::fabs(best.G)) best = {mid, a, m, s};
        if (std::fabs(m) < 1e-9) break;
        if (m > 0) hi = mid;
        else lo = mid;
    }
    return best;
}

FoldReport foldDirection(const ProblemParams& params, double alpha1) {
    ProblemParams p = params.withTruncation(true);
    GWithSlope gs = shootGWithSlope(p, alpha1);
    if (std::fabs(gs.G) > 1e-6 || std::fabs(gs.slope) > 1e-6)
        throw std::runtime_error("not a fold");

    FoldReport r;
    r.alpha = alpha1;
    r.G = gs.G;
    r.Gslope = gs.slope;

    IntegrateOptions opt;
    opt.variational = true;
    opt.lambdaSensitivity = true;
    opt.guard = false;
    Trajectory traj = integrate(p, 0.0, kPi, alpha1, 0.0, opt);
    r.vPi = traj.v(kPi);
    r.hPrimePi = traj.dhSens(kPi);
    double umax = -1e300;
    for (double t = 0; t <= kPi; t += 1e-3)
        umax = std::max(umax, traj.u(std::min(t, kPi)));
    r.uNegative = umax < 0;

    const double dl = 1e-5;
    ProblemParams pp = p, pm = p;
    pp.lambda += dl;
    pm.lambda -= dl;
    r.fdLambdaSlope = (shootG(pp, alpha1) - shootG(pm, alpha1)) / (2 * dl);
    return r;
}

std::vector<LambdaBEntry> lambdaBLimit(const std::vector<double>& epsSuite,
                                       const ForcingSpec& forcing) {
    const double lambda0 = computeLambda0(forcing);
    std::vector<LambdaBEntry> out;
    for (double eps : epsSuite) {
        double lo = 0.8, hi = lambda0 - 1e-3;
        double a, s;
        if (foldFunctional(lo, eps, forcing, &a, &s) >= 0 ||
            foldFunctional(hi, eps, forcing, &a, &s) <= 0)
            throw std::runtime_error("lambdaBLimit: bracket failure");
        while (hi - lo > 1e-6) {
            double mid = 0.5 * (lo + hi);
            if (foldFunctional(mid, eps, forcing, &a, &s) > 0) hi = mid;
            else lo = mid;
        }
        out.push_back({eps, 0.5 * (lo + hi)});
    }
    return out;
}

}  // namespace duffing
