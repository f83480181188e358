#include "duffing/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

namespace duffing {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

constexpr int kMaxSteps = 4000000;
constexpr int kEventScan = 8;   // interior samples per step for event bracketing

struct Rhs {
    const ProblemParams* p;
    bool variational, sensitivity;
    int dim;

    // y = (u, w [, v, vdot] [, h, hdot]) as functions of tau = t/eps.
    void operator()(double tau, const double* y, double* dy) const {
        double t = p->epsilon * tau;
        double u = y[0];
        dy[0] = y[1];
        dy[1] = p->nonlinearity(u) + p->forcing(t);
        int k = 2;
        if (variational) {
            double np = p->nonlinearityPrime(u);
            dy[k] = y[k + 1];
            dy[k + 1] = np * y[k];
            k += 2;
        }
        if (sensitivity) {
            double np = p->nonlinearityPrime(u);
            dy[k] = y[k + 1];
            dy[k + 1] = np * y[k] - u;
        }
    }
};

double denseEval(const std::array<double, 5>& r, double theta) {
    double theta1 = 1.0 - theta;
    return r[0] + theta * (r[1] + theta1 * (r[2] + theta * (r[3] + theta1 * r[4])));
}

}  // namespace

// ---------------------------------------------------------------------------
// Trajectory dense output
// ---------------------------------------------------------------------------

const Trajectory::Step& Trajectory::stepFor(double tau) const {
    // Binary search on step start times (monotone in the march direction).
    int lo = 0, hi = static_cast<int>(steps_.size()) - 1;
    if (forward_) {
        while (lo < hi) {
            int mid = (lo + hi + 1) / 2;
            if (steps_[mid].tau0 <= tau) lo = mid; else hi = mid - 1;
        }
    } else {
        while (lo < hi) {
            int mid = (lo + hi + 1) / 2;
            if (steps_[mid].tau0 >= tau) lo = mid; else hi = mid - 1;
        }
    }
    return steps_[lo];
}

double Trajectory::component(double t, int comp) const {
    double lo = std::min(tStart_, tEnd_), hi = std::max(tStart_, tEnd_);
    t = std::clamp(t, lo, hi);
    double tau = t / params_.epsilon;
    const Step& s = stepFor(tau);
    double theta = (tau - s.tau0) / s.h;
    theta = std::clamp(theta, 0.0, 1.0);
    return denseEval(s.rcont[comp], theta);
}

double Trajectory::u(double t) const { return component(t, 0); }
double Trajectory::du(double t) const { return component(t, 1) / params_.epsilon; }

double Trajectory::v(double t) const {
    if (!variational_) throw std::runtime_error("variational component not integrated");
    return component(t, 2);
}
double Trajectory::dv(double t) const {
    if (!variational_) throw std::runtime_error("variational component not integrated");
    return component(t, 3) / params_.epsilon;
}
double Trajectory::hSens(double t) const {
    if (!lambdaSensitivity_) throw std::runtime_error("sensitivity component not integrated");
    return component(t, variational_ ? 4 : 2);
}
double Trajectory::dhSens(double t) const {
    if (!lambdaSensitivity_) throw std::runtime_error("sensitivity component not integrated");
    return component(t, variational_ ? 5 : 3) / params_.epsilon;
}

// ---------------------------------------------------------------------------
// integrate
// ---------------------------------------------------------------------------

Trajectory integrate(const ProblemParams& params, double t0, double t1,
                     double u0, double du0, const IntegrateOptions& options) {
    if (t0 == t1) throw std::invalid_argument("empty integration span");
    const double eps = params.epsilon;

    Rhs rhs{&params, options.variational, options.lambdaSensitivity, 0};
    int dim = 2 + (options.variational ? 2 : 0) + (options.lambdaSensitivity ? 2 : 0);
    rhs.dim = dim;

    Trajectory traj;
    traj.params_ = params;
    traj.tStart_ = t0;
    traj.tEnd_ = t1;
    traj.forward_ = t1 > t0;
    traj.variational_ = options.variational;
    traj.lambdaSensitivity_ = options.lambdaSensitivity;
    traj.dim_ = dim;

    // Assemble the event list; the blow-up guard is just a pair of stopping
    // level events.
    std::vector<EventSpec> events = options.events;
    double guardLevel = options.guardLevel > 0.0 ? options.guardLevel : 2.0 * params.b;
    size_t guardHighIdx = events.size(), guardLowIdx = events.size() + 1;
    if (options.guard && !params.truncate) {
        events.push_back(levelEvent("__guard_high", guardLevel, +1, true));
        events.push_back(levelEvent("__guard_low", -guardLevel, -1, true));
    } else {
        guardHighIdx = guardLowIdx = static_cast<size_t>(-1);
    }

    const double tau0 = t0 / eps, tau1 = t1 / eps;
    const double dir = traj.forward_ ? 1.0 : -1.0;

    std::vector<double> y(dim, 0.0), ynew(dim), err(dim);
    std::vector<std::vector<double>> k(7, std::vector<double>(dim));
    y[0] = u0;
    y[1] = du0 * eps;   // w = dv/dtau = eps * du/dt
    int idx = 2;
    if (options.variational) { y[idx] = 1.0; y[idx + 1] = 0.0; idx += 2; }
    if (options.lambdaSensitivity) { y[idx] = 0.0; y[idx + 1] = 0.0; }

    traj.samples_.push_back({t0, u0, du0});

    double tau = tau0;
    double h = dir * std::min(1e-3, std::abs(tau1 - tau0));
    rhs(tau, y.data(), k[0].data());

    bool done = false;
    int nsteps = 0;
    while (!done) {
        if (++nsteps > kMaxSteps) throw std::runtime_error("step count overflow");
        if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(tau)))
            throw std::runtime_error("step size underflow");
        bool lastStep = false;
        if (dir * (tau + h - tau1) >= 0.0) {
            h = tau1 - tau;
            lastStep = true;
        }

        // Stage evaluations (k[0] carried over, FSAL).
        auto stage = [&](int s, double c, std::initializer_list<std::pair<int, double>> as) {
            for (int i = 0; i < dim; ++i) {
                double acc = y[i];
                for (auto [j, a] : as) acc += h * a * k[j][i];
                ynew[i] = acc;
            }
            rhs(tau + c * h, ynew.data(), k[s].data());
        };
        stage(1, c2, {{0, a21}});
        stage(2, c3, {{0, a31}, {1, a32}});
        stage(3, c4, {{0, a41}, {1, a42}, {2, a43}});
        stage(4, c5, {{0, a51}, {1, a52}, {2, a53}, {3, a54}});
        stage(5, 1.0, {{0, a61}, {1, a62}, {2, a63}, {3, a64}, {4, a65}});
        for (int i = 0; i < dim; ++i) {
            ynew[i] = y[i] + h * (b1 * k[0][i] + b3 * k[2][i] + b4 * k[3][i] +
                                  b5 * k[4][i] + b6 * k[5][i]);
        }
        rhs(tau + h, ynew.data(), k[6].data());
        double errNorm = 0.0;
        for (int i = 0; i < dim; ++i) {
            double e = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] +
                            e5 * k[4][i] + e6 * k[5][i] + e7 * k[6][i]);
            double sc = options.atol +
                        options.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            errNorm += (e / sc) * (e / sc);
        }
        errNorm = std::sqrt(errNorm / dim);

        if (errNorm > 1.0) {
            double fac = std::max(0.2, 0.9 * std::pow(errNorm, -0.2));
            h *= fac;
            continue;
        }

        // Accepted: build dense-output coefficients.
        Trajectory::Step step;
        step.tau0 = tau;
        step.h = h;
        step.rcont.resize(dim);
        for (int i = 0; i < dim; ++i) {
            double dy = ynew[i] - y[i];
            double bspl = h * k[0][i] - dy;
            step.rcont[i][0] = y[i];
            step.rcont[i][1] = dy;
            step.rcont[i][2] = bspl;
            step.rcont[i][3] = dy - h * k[6][i] - bspl;
            step.rcont[i][4] = h * (d1 * k[0][i] + d3 * k[2][i] + d4 * k[3][i] +
                                    d5 * k[4][i] + d6 * k[5][i] + d7 * k[6][i]);
        }

        // Event scan on the dense output of this step.
        struct Hit { double tauHit; size_t spec; };
        std::vector<Hit> hits;
        for (size_t s = 0; s < events.size(); ++s) {
            const EventSpec& ev = events[s];
            auto phi = [&](double theta) {
                double tt = eps * (tau + theta * h);
                double uu = denseEval(step.rcont[0], theta);
                double ww = denseEval(step.rcont[1], theta) / eps;
                return ev.fn(tt, uu, ww);
            };
            double prev = phi(0.0);
            for (int j = 1; j <= kEventScan; ++j) {
                double theta = static_cast<double>(j) / kEventScan;
                double cur = phi(theta);
                if (prev == 0.0 || prev * cur < 0.0) {
                    double lo = static_cast<double>(j - 1) / kEventScan;
                    double hi = theta;
                    double flo = prev;
                    if (flo == 0.0) {
                        hits.push_back({tau + lo * h, s});
                    } else {
                        for (int it = 0; it < 80; ++it) {
                            double mid = 0.5 * (lo + hi);
                            double fm = phi(mid);
                            if (fm == 0.0) { lo = hi = mid; break; }
                            if (flo * fm < 0.0) hi = mid; else { lo = mid; flo = fm; }
                        }
                        hits.push_back({tau + 0.5 * (lo + hi) * h, s});
                    }
                }
                prev = cur;
            }
        }
        std::sort(hits.begin(), hits.end(),
                  [&](const Hit& a, const Hit& b) { return dir * a.tauHit < dir * b.tauHit; });

        double stopTau = 0.0;
        bool stopped = false;
        for (const Hit& hit : hits) {
            const EventSpec& ev = events[hit.spec];
            double t = eps * hit.tauHit;
            if (t < ev.tmin || t > ev.tmax) continue;
            // Skip roots pinned at the very start of the trajectory (e.g. a
            // derivative-zero event when shooting from a stationary point).
            if (std::abs(t - t0) < 1e-9 * std::max(1.0, std::abs(t0)) + 1e-12) continue;
            double theta = (hit.tauHit - tau) / h;
            double uu = denseEval(step.rcont[0], theta);
            double ww = denseEval(step.rcont[1], theta) / eps;
            // Crossing direction from the event function just around the root.
            double before = [&] {
                double th = std::max(0.0, theta - 1e-6);
                return ev.fn(eps * (tau + th * h), denseEval(step.rcont[0], th),
                             denseEval(step.rcont[1], th) / eps);
            }();
            int direction = before < 0.0 ? +1 : -1;
            if (ev.direction != 0 && direction != ev.direction) continue;
            Event rec;
            rec.id = ev.id;
            rec.t = t;
            rec.u = uu;
            rec.du = ww;
            rec.direction = direction;
            rec.tangential = ev.slope && std::abs(ww - ev.slope(t)) < 1e-6;
            traj.events_.push_back(rec);
            if (ev.stop) {
                stopped = true;
                stopTau = hit.tauHit;
                if (hit.spec == guardHighIdx) traj.terminal_ = Terminal::GuardHigh;
                else if (hit.spec == guardLowIdx) traj.terminal_ = Terminal::GuardLow;
                else traj.terminal_ = Terminal::EventStop;
                break;
            }
        }

        traj.steps_.push_back(std::move(step));
        if (stopped) {
            traj.tEnd_ = eps * stopTau;
            done = true;
        } else {
            tau += h;
            std::swap(y, ynew);
            std::swap(k[0], k[6]);   // FSAL
            traj.samples_.push_back({eps * tau, y[0], y[1] / eps});
            if (lastStep) {
                traj.tEnd_ = t1;
                traj.terminal_ = Terminal::ReachedTend;
                done = true;
            } else {
                double fac = errNorm > 0.0
                                 ? std::min(10.0, std::max(0.2, 0.9 * std::pow(errNorm, -0.2)))
                                 : 10.0;
                h *= fac;
            }
        }
    }
    if (traj.terminal_ != Terminal::ReachedTend) {
        // Trim the sample list to the realized span and append the end state.
        double te = traj.tEnd_;
        while (!traj.samples_.empty() &&
               dir * (traj.samples_.back().t - te) > 0.0)
            traj.samples_.pop_back();
        traj.samples_.push_back({te, traj.u(te), traj.du(te)});
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Curve crossings
// ---------------------------------------------------------------------------

std::vector<Event> crossingTimes(const Trajectory& traj, const Curve& curve) {
    std::vector<Event> out;
    double lo = std::max(std::min(traj.tStart(), traj.tEnd()), curve.tmin);
    double hi = std::min(std::max(traj.tStart(), traj.tEnd()), curve.tmax);
    if (!(hi > lo)) return out;

    double dt = std::min(curve.sampleDt, traj.params().epsilon * 0.05);
    int n = std::max(2, static_cast<int>(std::ceil((hi - lo) / dt)));
    auto phi = [&](double t) { return traj.u(t) - curve.value(t); };

    double tPrev = lo, fPrev = phi(lo);
    for (int j = 1; j <= n; ++j) {
        double t = lo + (hi - lo) * j / n;
        double f = phi(t);
        if (fPrev == 0.0 || fPrev * f < 0.0) {
            double a = tPrev, b = t, fa = fPrev;
            if (fa != 0.0) {
                for (int it = 0; it < 80 && (b - a) > 1e-13; ++it) {
                    double mid = 0.5 * (a + b);
                    double fm = phi(mid);
                    if (fm == 0.0) { a = b = mid; break; }
                    if (fa * fm < 0.0) b = mid; else { a = mid; fa = fm; }
                }
            }
            double tr = 0.5 * (a + b);
            Event rec;
            rec.id = curve.id;
            rec.t = tr;
            rec.u = traj.u(tr);
            rec.du = traj.du(tr);
            rec.direction = fPrev < 0.0 ? +1 : -1;
            rec.tangential = curve.slope &&
                             std::abs(rec.du - curve.slope(tr)) < 1e-6;
            out.push_back(rec);
        }
        tPrev = t;
        fPrev = f;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Event builders
// ---------------------------------------------------------------------------

EventSpec levelEvent(std::string id, double level, int direction, bool stop) {
    EventSpec ev;
    ev.id = std::move(id);
    ev.fn = [level](double, double u, double) { return u - level; };
    ev.direction = direction;
    ev.stop = stop;
    return ev;
}

EventSpec derivativeZeroEvent(std::string id, int direction, bool stop) {
    EventSpec ev;
    ev.id = std::move(id);
    ev.fn = [](double, double, double du) { return du; };
    ev.direction = direction;
    ev.stop = stop;
    return ev;
}

// ---------------------------------------------------------------------------
// Binary sample round-trip
// ---------------------------------------------------------------------------

namespace {
constexpr char kSampleMagic[8] = {'D', 'U', 'F', 'S', 'M', 'P', 'L', '1'};
}

void writeSamplesBinary(const std::string& path,
                        const std::vector<Sample>& samples) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f.write(kSampleMagic, sizeof kSampleMagic);
    std::uint64_t n = samples.size();
    f.write(reinterpret_cast<const char*>(&n), sizeof n);
    for (const Sample& s : samples) {
        double row[3] = {s.t, s.u, s.du};
        f.write(reinterpret_cast<const char*>(row), sizeof row);
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<Sample> readSamplesBinary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    char magic[8];
    f.read(magic, sizeof magic);
    if (!f || !std::equal(magic, magic + 8, kSampleMagic))
        throw std::runtime_error("bad sample file header: " + path);
    std::uint64_t n = 0;
    f.read(reinterpret_cast<char*>(&n), sizeof n);
    std::vector<Sample> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        double row[3];
        f.read(reinterpret_cast<char*>(row), sizeof row);
        if (!f) throw std::runtime_error("truncated sample file: " + path);
        out.push_back({row[0], row[1], row[2]});
    }
    return out;
}

}  // namespace duffing
