#include "duffing/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace duffing {

namespace {

// Index of the sample interval containing t (samples sorted ascending).
std::size_t intervalFor(const std::vector<Sample>& s, double t) {
    if (s.size() < 2) throw std::runtime_error("sample array too short");
    auto it = std::upper_bound(
        s.begin(), s.end(), t,
        [](double x, const Sample& a) { return x < a.t; });
    std::size_t i = static_cast<std::size_t>(it - s.begin());
    if (i == 0) return 0;
    if (i >= s.size()) return s.size() - 2;
    return i - 1;
}

}  // namespace

double sampleValue(const std::vector<Sample>& samples, double t) {
    std::size_t i = intervalFor(samples, t);
    const Sample& a = samples[i];
    const Sample& b = samples[i + 1];
    double h = b.t - a.t;
    if (h == 0.0) return a.u;
    double s = std::clamp((t - a.t) / h, 0.0, 1.0);
    double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    double h10 = s * (1 - s) * (1 - s);
    double h01 = s * s * (3 - 2 * s);
    double h11 = s * s * (s - 1);
    return h00 * a.u + h10 * h * a.du + h01 * b.u + h11 * h * b.du;
}

double sampleSlope(const std::vector<Sample>& samples, double t) {
    std::size_t i = intervalFor(samples, t);
    const Sample& a = samples[i];
    const Sample& b = samples[i + 1];
    double h = b.t - a.t;
    if (h == 0.0) return a.du;
    double s = std::clamp((t - a.t) / h, 0.0, 1.0);
    double d00 = 6 * s * (s - 1) / h;
    double d10 = (1 - s) * (1 - 3 * s);
    double d01 = -d00;
    double d11 = s * (3 * s - 2);
    return d00 * a.u + d10 * a.du + d01 * b.u + d11 * b.du;
}

BandReport bandCheck(const ProblemParams& params,
                     const std::vector<Sample>& solution, Branch branch,
                     double c, double d, double mu) {
    if (branch != Branch::Lower && branch != Branch::Upper)
        throw std::invalid_argument("bandCheck: branch must be Lower or Upper");
    if (d <= c) throw std::invalid_argument("bandCheck: empty interval");

    const double side = std::sqrt(params.lambda / 3.0);
    const double dt = std::min(params.epsilon / 10.0, 1e-3);

    // Side precondition on the full [c, d].
    for (double t = c; t <= d + 0.5 * dt; t += dt) {
        double tt = std::min(t, d);
        double u = sampleValue(solution, tt);
        bool ok = branch == Branch::Lower ? u <= -side + 1e-9 : u >= side - 1e-9;
        if (!ok) {
            std::ostringstream os;
            os << "side violation at t=" << tt << " (u=" << u << ")";
            throw std::runtime_error(os.str());
        }
    }

    BandReport r;
    r.branch = branch;
    r.c = c;
    r.d = d;
    r.mu = mu;
    r.epsilon = params.epsilon;
    double lo = c + mu, hi = d - mu;
    if (hi <= lo) throw std::invalid_argument("bandCheck: mu empties interval");
    for (double t = lo; t <= hi + 0.5 * dt; t += dt) {
        double tt = std::min(t, hi);
        double bv = branch == Branch::Lower
                        ? lowerBranch(params.lambda, params.forcing, tt)
                        : upperBranch(params.lambda, params.forcing, tt);
        double bs = branchSlope(params.lambda, params.forcing, tt, bv);
        double e0 = std::fabs(sampleValue(solution, tt) - bv);
        double e1 = params.epsilon * std::fabs(sampleSlope(solution, tt) - bs);
        if (e0 > r.e0) {
            r.e0 = e0;
            r.tWorst = tt;
        }
        r.e1 = std::max(r.e1, e1);
    }
    double e2 = params.epsilon * params.epsilon;
    r.ratio0 = r.e0 / e2;
    r.ratio1 = r.e1 / e2;
    return r;
}

RateFit rateRegression(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 4) throw std::runtime_error("insufficient spread");
    double emin = points[0].first, emax = points[0].first;
    for (const auto& p : points) {
        emin = std::min(emin, p.first);
        emax = std::max(emax, p.first);
        if (p.first <= 0 || p.second <= 0)
            throw std::invalid_argument("rateRegression: positive data required");
    }
    if (emax / emin < 4.0) throw std::runtime_error("insufficient spread");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(points.size());
    for (const auto& p : points) {
        double x = std::log(p.first), y = std::log(p.second);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    RateFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    for (const auto& p : points) {
        double res = std::log(p.second) - (f.intercept + f.slope * std::log(p.first));
        f.maxResidual = std::max(f.maxResidual, std::fabs(res));
    }
    return f;
}

LayerReport layerProfileCheck(const ProblemParams& params,
                              const std::vector<Sample>& solution,
                              ProfileKind kind, double center, double window,
                              double kappa) {
    const double eps = params.epsilon;
    const double b = params.b > 0 ? params.b
                                  : defaultBarrier(params.lambda,
                                                   params.forcing.supNorm());
    // Heteroclinic profiles are translation-invariant orbits; their natural
    // time origin is the zero crossing, not the near-saddle anchor used to
    // construct them.  Sample a wider window so the re-centred profile still
    // covers [-window, window], then shift so V(0) = 0.  Rising layers are
    // checked in the reflected form |u + V0-| (equivalently u against the
    // rising connection -V0-), falling layers as |u - V0+|.
    bool heteroclinic = kind == ProfileKind::HeteroclinicV0Plus ||
                        kind == ProfileKind::HeteroclinicV0Minus;
    LimitProfile prof =
        limitProfile(kind, params.lambda, kappa,
                     heteroclinic ? window + 8.0 : window,
                     std::min(0.01, window / 100.0));
    double tauShift = 0.0;
    if (heteroclinic) {
        for (std::size_t i = 1; i < prof.v.size(); ++i) {
            if (prof.v[i - 1] * prof.v[i] <= 0.0) {
                double w = prof.v[i - 1] / (prof.v[i - 1] - prof.v[i]);
                tauShift = prof.tau[i - 1] +
                           w * (prof.tau[i] - prof.tau[i - 1]);
                break;
            }
        }
    }
    const double profSign =
        (kind == ProfileKind::HeteroclinicV0Minus) ? -1.0 : 1.0;

    LayerReport r;
    r.center = center;
    r.window = window;
    CriticalConstants cc = criticalConstants(params.lambda);
    r.offsetBound = 3.0 * eps * std::fabs(std::log(eps)) / cc.K;
    r.M1 = 2.0 * (upperBranch(params.lambda, params.forcing, kPi) -
                  std::sqrt(params.lambda / 3.0));

    double tLo = solution.front().t, tHi = solution.back().t;
    double tauLo = std::max(-window, (tLo - center) / eps);
    double tauHi = std::min(window, (tHi - center) / eps);
    if (tauHi <= tauLo)
        throw std::runtime_error("profile window unreachable");

    const double dtau = 0.01;
    for (double tau = tauLo; tau <= tauHi + 0.5 * dtau; tau += dtau) {
        double tt = std::min(tau, tauHi);
        double u = sampleValue(solution, center + eps * tt);
        if (std::fabs(u) > 2 * b)
            throw std::runtime_error("profile window unreachable");
        r.supError = std::max(
            r.supError,
            std::fabs(u - profSign * prof.valueAt(tt + tauShift)));
    }

    // Nearest derivative sign change (extremum) or zero crossing, whichever
    // event anchors this profile kind, measured against the claimed center.
    bool anchorIsZero = kind == ProfileKind::HeteroclinicV0Plus ||
                        kind == ProfileKind::HeteroclinicV0Minus;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < solution.size(); ++i) {
        bool hit = anchorIsZero
                       ? solution[i - 1].u * solution[i].u <= 0.0
                       : solution[i - 1].du * solution[i].du <= 0.0;
        if (!hit) continue;
        double t = 0.5 * (solution[i - 1].t + solution[i].t);
        if (std::fabs(t - center) < std::fabs(best)) best = t - center;
    }
    r.offset = std::isfinite(best) ? std::fabs(best) : 0.0;
    return r;
}

TailReport exponentialTailCheck(const ProblemParams& params,
                                const std::vector<Sample>& solution,
                                const std::vector<Sample>& reference,
                                double c, double d, double mu) {
    CriticalConstants cc = criticalConstants(params.lambda);
    TailReport r;
    r.mu = mu;
    r.bound = 2.0 * (upperBranch(params.lambda, params.forcing, kPi) -
                     std::sqrt(params.lambda / 3.0)) *
              std::exp(-cc.K * mu / params.epsilon);
    double lo = c + mu, hi = d - mu;
    if (hi <= lo) throw std::invalid_argument("tail check: mu empties interval");
    const double dt = std::min(params.epsilon / 10.0, 1e-3);
    for (double t = lo; t <= hi + 0.5 * dt; t += dt) {
        double tt = std::min(t, hi);
        double e0 = std::fabs(sampleValue(solution, tt) - sampleValue(reference, tt));
        double e1 = std::fabs(sampleSlope(solution, tt) - sampleSlope(reference, tt));
        r.lhsMax = std::max(r.lhsMax, e0 + params.epsilon / (2 * cc.K) * e1);
    }
    r.holds = r.lhsMax <= r.bound;
    return r;
}

double kendallTau(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("kendallTau: need two equal-length lists");
    long concordant = 0, discordant = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            double s = (x[j] - x[i]) * (y[j] - y[i]);
            if (s > 0) ++concordant;
            else if (s < 0) ++discordant;
        }
    long total = concordant + discordant;
    if (total == 0) return 0.0;
    return static_cast<double>(concordant - discordant) / total;
}

}  // namespace duffing
