#include "duffing/core.hpp"

#include <algorithm>
#include <cmath>

namespace duffing {

// ---------------------------------------------------------------------------
// ForcingSpec
// ---------------------------------------------------------------------------

ForcingSpec ForcingSpec::cosine() {
    ForcingSpec f;
    f.kind_ = ForcingKind::Cosine;
    f.terms_ = {{1, 1.0, 0.0}};
    return f;
}

ForcingSpec ForcingSpec::cosMinusSin2() {
    ForcingSpec f;
    f.kind_ = ForcingKind::CosMinusSin2;
    f.terms_ = {{1, 1.0, 0.0}, {2, 0.0, -1.0}};
    return f;
}

ForcingSpec ForcingSpec::fourier(std::vector<FourierTerm> terms) {
    ForcingSpec f;
    f.kind_ = ForcingKind::Fourier;
    f.terms_ = std::move(terms);
    return f;
}

ForcingSpec ForcingSpec::constant(double value) {
    ForcingSpec f;
    f.kind_ = ForcingKind::Fourier;
    f.terms_ = {{0, value, 0.0}};
    return f;
}

double ForcingSpec::operator()(double t) const {
    double s = 0.0;
    for (const auto& term : terms_) {
        if (term.harmonic == 0) {
            s += term.cosCoeff;
        } else {
            s += term.cosCoeff * std::cos(term.harmonic * t) +
                 term.sinCoeff * std::sin(term.harmonic * t);
        }
    }
    return s;
}

double ForcingSpec::derivative(double t) const {
    double s = 0.0;
    for (const auto& term : terms_) {
        if (term.harmonic == 0) continue;
        s += -term.cosCoeff * term.harmonic * std::sin(term.harmonic * t) +
             term.sinCoeff * term.harmonic * std::cos(term.harmonic * t);
    }
    return s;
}

double ForcingSpec::supNorm() const {
    if (kind_ == ForcingKind::Cosine) return std::abs(terms_[0].cosCoeff);
    // Coarse grid over [0, 2 pi], then golden-section refinement around each
    // local maximum of |g|.
    const int n = 4096;
    double best = 0.0;
    double bestT = 0.0;
    for (int i = 0; i <= n; ++i) {
        double t = 2.0 * kPi * i / n;
        double v = std::abs((*this)(t));
        if (v > best) {
            best = v;
            bestT = t;
        }
    }
    double a = bestT - 2.0 * kPi / n;
    double c = bestT + 2.0 * kPi / n;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = c - gr * (c - a);
    double x2 = a + gr * (c - a);
    double f1 = std::abs((*this)(x1));
    double f2 = std::abs((*this)(x2));
    for (int it = 0; it < 120 && (c - a) > 1e-14; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (c - a);
            f2 = std::abs((*this)(x2));
        } else {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - gr * (c - a);
            f1 = std::abs((*this)(x1));
        }
    }
    return std::max(best, std::max(f1, f2));
}

// ---------------------------------------------------------------------------
// ProblemParams
// ---------------------------------------------------------------------------

double defaultBarrier(double lambda, double supG) {
    if (lambda > 0.0) return std::sqrt(lambda + 0.5 / lambda);
    double b = 1.0;
    while (b * b * b - lambda * b <= supG) b *= 2.0;
    return b;
}

ProblemParams ProblemParams::make(double epsilon, double lambda,
                                  ForcingSpec forcing, bool truncate) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    ProblemParams p;
    p.epsilon = epsilon;
    p.lambda = lambda;
    p.forcing = std::move(forcing);
    p.truncate = truncate;
    p.b = defaultBarrier(lambda, p.forcing.supNorm());
    return p;
}

double ProblemParams::nonlinearity(double u) const {
    if (truncate) {
        if (u > b) return b * b * b - lambda * b;
        if (u < -b) return -(b * b * b - lambda * b);
    }
    return u * u * u - lambda * u;
}

double ProblemParams::nonlinearityPrime(double u) const {
    if (truncate && std::abs(u) > b) return 0.0;
    return 3.0 * u * u - lambda;
}

// ---------------------------------------------------------------------------
// Cubic roots
// ---------------------------------------------------------------------------

namespace {

double polishCubic(double lambda, double c, double x) {
    for (int i = 0; i < 3; ++i) {
        double f = x * x * x - lambda * x + c;
        double fp = 3.0 * x * x - lambda;
        if (fp == 0.0) break;
        x -= f / fp;
    }
    return x;
}

}  // namespace

std::vector<CubicRoot> solveCubicBranches(double lambda, double c) {
    // u^3 + p u + q with p = -lambda, q = c.
    const double p = -lambda;
    const double q = c;
    const double disc = -4.0 * p * p * p - 27.0 * q * q;  // > 0: three real roots
    std::vector<CubicRoot> out;

    const double doubleRootTol = 1e-13 * std::max(1.0, lambda * lambda * lambda);
    if (lambda > 0.0 && std::abs(disc) <= doubleRootTol) {
        // Tangency: a simple root plus a double root at -+sqrt(lambda/3).
        double d = std::sqrt(lambda / 3.0);
        if (q >= 0.0) {
            // double root at -d (where the local max of u^3 - lambda u sits)
            out.push_back({polishCubic(lambda, c, 2.0 * d), Branch::Upper});
            out.push_back({-d, Branch::LowerMiddle});
            std::sort(out.begin(), out.end(),
                      [](const CubicRoot& a, const CubicRoot& b) { return a.value < b.value; });
        } else {
            out.push_back({polishCubic(lambda, c, -2.0 * d), Branch::Lower});
            out.push_back({d, Branch::MiddleUpper});
            std::sort(out.begin(), out.end(),
                      [](const CubicRoot& a, const CubicRoot& b) { return a.value < b.value; });
        }
        return out;
    }

    if (lambda > 0.0 && disc > 0.0) {
        // Trigonometric form: roots 2 sqrt(lambda/3) cos(phi/3 - 2 pi k/3).
        double m = 2.0 * std::sqrt(lambda / 3.0);
        double arg = -3.0 * q / (lambda * m);
        arg = std::clamp(arg, -1.0, 1.0);
        double phi = std::acos(arg);
        std::vector<double> roots;
        for (int k = 0; k < 3; ++k) {
            roots.push_back(m * std::cos((phi - 2.0 * kPi * k) / 3.0));
        }
        std::sort(roots.begin(), roots.end());
        out.push_back({polishCubic(lambda, c, roots[0]), Branch::Lower});
        out.push_back({polishCubic(lambda, c, roots[1]), Branch::Middle});
        out.push_back({polishCubic(lambda, c, roots[2]), Branch::Upper});
        return out;
    }

    // Single real root: Cardano (stable form) + polish.
    double root;
    if (std::abs(q) < 1e-300) {
        root = 0.0;
    } else {
        double halfQ = q / 2.0;
        double thirdP = p / 3.0;
        double discC = halfQ * halfQ + thirdP * thirdP * thirdP;
        if (discC >= 0.0) {
            double s = std::sqrt(discC);
            double a = std::cbrt(-halfQ + s);
            double bb = std::cbrt(-halfQ - s);
            root = a + bb;
        } else {
            // Should not happen when disc <= 0, but fall back to bisection.
            root = 0.0;
        }
    }
    root = polishCubic(lambda, c, root);
    out.push_back({root, Branch::Single});
    return out;
}

namespace {

std::vector<CubicRoot> branchRootsAt(double lambda, const ForcingSpec& g, double t) {
    return solveCubicBranches(lambda, g(t));
}

}  // namespace

int branchCount(double lambda, const ForcingSpec& g, double t) {
    return static_cast<int>(branchRootsAt(lambda, g, t).size());
}

double lowerBranch(double lambda, const ForcingSpec& g, double t) {
    auto roots = branchRootsAt(lambda, g, t);
    for (const auto& r : roots) {
        if (r.branch == Branch::Lower || r.branch == Branch::LowerMiddle) return r.value;
    }
    throw std::runtime_error("lower branch does not exist at this t");
}

double middleBranch(double lambda, const ForcingSpec& g, double t) {
    auto roots = branchRootsAt(lambda, g, t);
    for (const auto& r : roots) {
        if (r.branch == Branch::Middle || r.branch == Branch::LowerMiddle ||
            r.branch == Branch::MiddleUpper)
            return r.value;
    }
    throw std::runtime_error("middle branch does not exist at this t");
}

double upperBranch(double lambda, const ForcingSpec& g, double t) {
    auto roots = branchRootsAt(lambda, g, t);
    for (const auto& r : roots) {
        if (r.branch == Branch::Upper || r.branch == Branch::MiddleUpper) return r.value;
    }
    throw std::runtime_error("upper branch does not exist at this t");
}

double branchSlope(double lambda, const ForcingSpec& g, double t, double branchValue) {
    double denom = 3.0 * branchValue * branchValue - lambda;
    if (denom == 0.0) throw std::runtime_error("branch slope undefined at a fold");
    return -g.derivative(t) / denom;
}

// ---------------------------------------------------------------------------
// Critical constants
// ---------------------------------------------------------------------------

double computeLambda0(const ForcingSpec& g) {
    double M = g.supNorm();
    if (M <= 0.0) throw std::runtime_error("no finite lambda0: forcing vanishes");
    // Local max of u^3 - lambda u equals (2 lambda/3) sqrt(lambda/3);
    // increasing in lambda, so bisection brackets are easy to find.
    auto h = [M](double lam) {
        return (2.0 * lam / 3.0) * std::sqrt(lam / 3.0) - M;
    };
    double lo = 1e-8, hi = 1.0;
    while (h(hi) < 0.0) hi *= 2.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-10; ++it) {
        double mid = 0.5 * (lo + hi);
        (h(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double energyH(double lambda, double u) {
    return lambda * u * u - 0.5 * u * u * u * u;
}

double homoclinicAnchor(double lambda, double kappa) {
    auto roots = solveCubicBranches(lambda, kappa);
    if (roots.size() < 3) throw std::runtime_error("no homoclinic: fewer than three equilibria");
    double ubar = roots[2].value;  // upper saddle of the frozen system
    // Level set of W(v) = v^4/4 - lambda v^2/2 + kappa v through ubar:
    // W(v) - W(ubar) = (v - ubar)^2 (v^2 + 2 ubar v + 3 ubar^2 - 2 lambda)/4.
    // The turning point of the homoclinic loop is the larger root of the
    // quadratic factor (the first level crossing left of the saddle).
    double rad = 2.0 * (lambda - ubar * ubar);
    if (rad <= 0.0) throw std::runtime_error("no homoclinic: saddle outside the well");
    return -ubar + std::sqrt(rad);
}

double computeLambda() {
    double lambda0 = computeLambda0(ForcingSpec::cosine());
    auto s = [](double lam) {
        // V_1(0) - U_0(pi); negative once the homoclinic dips below the
        // middle branch at t = pi.
        double anchor = homoclinicAnchor(lam, 1.0);
        auto roots = solveCubicBranches(lam, -1.0);
        if (roots.size() < 3) throw std::runtime_error("no middle branch at t = pi");
        return anchor - roots[1].value;
    };
    double lo = lambda0 + 1e-6;
    double hi = 3.0;
    if (s(lo) <= 0.0) throw std::runtime_error("sign check failed at lambda0");
    if (s(hi) >= 0.0) throw std::runtime_error("sign check failed at lambda = 3");
    for (int it = 0; it < 200 && (hi - lo) > 1e-8; ++it) {
        double mid = 0.5 * (lo + hi);
        (s(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

CriticalConstants criticalConstants(double lambda) {
    CriticalConstants c;
    c.lambda0 = computeLambda0(ForcingSpec::cosine());
    c.Lambda = computeLambda();
    if (lambda > c.lambda0) {
        double ubar0 = upperBranch(lambda, ForcingSpec::cosine(), 0.0);
        c.K = std::sqrt(ubar0 - std::sqrt(lambda / 3.0));
    }
    return c;
}

// ---------------------------------------------------------------------------
// Limit profiles
// ---------------------------------------------------------------------------

namespace {

// One RK4 step of the frozen system v'' = v^3 - lambda v + kappa.
void rk4Step(double lambda, double kappa, double h, double& v, double& w) {
    auto f = [&](double vv) { return vv * vv * vv - lambda * vv + kappa; };
    double k1v = w, k1w = f(v);
    double k2v = w + 0.5 * h * k1w, k2w = f(v + 0.5 * h * k1v);
    double k3v = w + 0.5 * h * k2w, k3w = f(v + 0.5 * h * k2v);
    double k4v = w + h * k3w, k4w = f(v + h * k3v);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
}

}  // namespace

double LimitProfile::valueAt(double t) const {
    if (tau.empty()) throw std::runtime_error("empty profile");
    if (t <= tau.front()) return v.front();
    if (t >= tau.back()) return v.back();
    auto it = std::upper_bound(tau.begin(), tau.end(), t);
    size_t i = static_cast<size_t>(it - tau.begin());
    double w = (t - tau[i - 1]) / (tau[i] - tau[i - 1]);
    return v[i - 1] * (1.0 - w) + v[i] * w;
}

double LimitProfile::slopeAt(double t) const {
    if (tau.empty()) throw std::runtime_error("empty profile");
    if (t <= tau.front()) return vdot.front();
    if (t >= tau.back()) return vdot.back();
    auto it = std::upper_bound(tau.begin(), tau.end(), t);
    size_t i = static_cast<size_t>(it - tau.begin());
    double w = (t - tau[i - 1]) / (tau[i] - tau[i - 1]);
    return vdot[i - 1] * (1.0 - w) + vdot[i] * w;
}

LimitProfile limitProfile(ProfileKind kind, double lambda, double kappa,
                          double window, double step) {
    if (!(window > 0.0) || !(step > 0.0)) throw std::invalid_argument("bad window/step");

    LimitProfile prof;
    prof.kind = kind;
    prof.lambda = lambda;

    double v0 = 0.0, w0 = 0.0, kap = 0.0;
    switch (kind) {
        case ProfileKind::HomoclinicVKappa:
            if (!(kappa > 0.0 && kappa <= 1.0))
                throw std::invalid_argument("kappa must lie in (0, 1]");
            kap = kappa;
            v0 = homoclinicAnchor(lambda, kappa);
            w0 = 0.0;
            break;
        case ProfileKind::HomoclinicVMinus1:
            // Reflection v -> -v of the kappa = +1 orbit.
            kap = -1.0;
            v0 = -homoclinicAnchor(lambda, 1.0);
            w0 = 0.0;
            break;
        case ProfileKind::HeteroclinicV0Plus:
        case ProfileKind::HeteroclinicV0Minus: {
            if (!(lambda > 0.0)) throw std::invalid_argument("heteroclinic needs lambda > 0");
            kap = 0.0;
            double saddle = std::sqrt(lambda);
            double lambda0 = computeLambda0(ForcingSpec::cosine());
            double delta = 0.1;
            if (lambda > lambda0) {
                double gap = upperBranch(lambda, ForcingSpec::cosine(), 0.0) -
                             std::sqrt(lambda / 3.0);
                delta = std::min(0.1, 0.25 * gap);
            }
            v0 = saddle - delta;
            // Energy level through the saddle: W(v) = v^4/4 - lambda v^2/2.
            double W0 = 0.25 * v0 * v0 * v0 * v0 - 0.5 * lambda * v0 * v0;
            double Ws = 0.25 * lambda * lambda - 0.5 * lambda * lambda;
            w0 = -std::sqrt(std::max(0.0, 2.0 * (W0 - Ws)));
            break;
        }
    }
    prof.kappa = kap;
    prof.anchor = (kind == ProfileKind::HeteroclinicV0Minus) ? -v0 : v0;

    const double guard = 2.0 * defaultBarrier(lambda > 0 ? lambda : 1.0);
    int n = static_cast<int>(std::ceil(window / step));
    // March forward and backward from tau = 0 with a fine fixed-step RK4;
    // substeps keep the energy drift near rounding level.
    int sub = std::max(1, static_cast<int>(std::ceil(step / 1e-3)));
    double hs = step / sub;

    // Saddles of the frozen system (outer equilibria).  Once the orbit gets
    // this close to one, pin it there: integrating further only accumulates
    // drift that eventually throws the orbit over the separatrix.
    std::vector<double> saddles;
    for (const auto& r : solveCubicBranches(lambda, kap)) {
        if (3.0 * r.value * r.value - lambda > 0.0) saddles.push_back(r.value);
    }
    const double parkRadius = 1e-5;
    auto maybePark = [&](double& v, double& w, bool& parked) {
        if (parked) return;
        for (double s : saddles) {
            if ((v - s) * (v - s) + w * w < parkRadius * parkRadius) {
                v = s;
                w = 0.0;
                parked = true;
                return;
            }
        }
    };

    std::vector<double> tF(1, 0.0), vF(1, v0), wF(1, w0);
    std::vector<double> tB, vB, wB;
    {
        double v = v0, w = w0;
        bool parked = false;
        for (int i = 1; i <= n; ++i) {
            if (!parked)
                for (int k = 0; k < sub; ++k) rk4Step(lambda, kap, hs, v, w);
            maybePark(v, w, parked);
            if (std::abs(v) > guard) throw std::runtime_error("window too large: profile left the barrier box");
            tF.push_back(i * step);
            vF.push_back(v);
            wF.push_back(w);
        }
        v = v0;
        w = w0;
        parked = false;
        for (int i = 1; i <= n; ++i) {
            if (!parked)
                for (int k = 0; k < sub; ++k) rk4Step(lambda, kap, -hs, v, w);
            maybePark(v, w, parked);
            if (std::abs(v) > guard) throw std::runtime_error("window too large: profile left the barrier box");
            tB.push_back(-i * step);
            vB.push_back(v);
            wB.push_back(w);
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        prof.tau.push_back(tB[i]);
        prof.v.push_back(vB[i]);
        prof.vdot.push_back(wB[i]);
    }
    prof.tau.insert(prof.tau.end(), tF.begin(), tF.end());
    prof.v.insert(prof.v.end(), vF.begin(), vF.end());
    prof.vdot.insert(prof.vdot.end(), wF.begin(), wF.end());

    if (kind == ProfileKind::HeteroclinicV0Minus) {
        // V0-(t) = -V0+(-t): reflect the sampled orbit.
        std::reverse(prof.v.begin(), prof.v.end());
        std::reverse(prof.vdot.begin(), prof.vdot.end());
        for (auto& x : prof.v) x = -x;
        // d/dt of -V(-t) is +V'(-t): the reversed vdot keeps its sign.
    }

    auto energy = [&](double v, double w) {
        return 0.5 * w * w - (0.25 * v * v * v * v - 0.5 * lambda * v * v + kap * v);
    };
    double e0 = energy(v0, w0);
    double drift = 0.0;
    for (size_t i = 0; i < prof.v.size(); ++i) {
        double sgn = (kind == ProfileKind::HeteroclinicV0Minus) ? -1.0 : 1.0;
        double vv = sgn * prof.v[i];  // undo reflection for the energy of the base orbit
        double ww = sgn * prof.vdot[i];
        drift = std::max(drift, std::abs(energy(vv, ww) - e0));
    }
    prof.energyDrift = drift;
    return prof;
}

}  // namespace duffing
