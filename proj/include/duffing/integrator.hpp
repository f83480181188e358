#pragma once

#include <array>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "duffing/core.hpp"

// Adaptive Dormand-Prince 5(4) integration of the forced Duffing equation in
// the rescaled time tau = t/eps (so layers are O(1) wide for every eps), with
// continuous dense output, event location, an optional first variational
// component and an optional lambda-sensitivity component.

namespace duffing {

struct EventSpec {
    std::string id;
    // Scalar event function evaluated along the trajectory; roots are events.
    std::function<double(double t, double u, double du)> fn;
    // Optional slope of the reference curve at t, used only for the
    // tangency flag |du - slope| < 1e-6.
    std::function<double(double t)> slope;
    int direction = 0;   // +1: fn crosses upward, -1: downward, 0: any
    bool stop = false;
    double tmin = -std::numeric_limits<double>::infinity();
    double tmax = std::numeric_limits<double>::infinity();
};

struct Event {
    std::string id;
    double t = 0.0;
    double u = 0.0;
    double du = 0.0;
    int direction = 0;
    bool tangential = false;
};

enum class Terminal { ReachedTend, EventStop, GuardHigh, GuardLow };

struct IntegrateOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    // Co-integrate v with eps^2 v'' = (3u^2 - lambda) v, v(t0) = 1, v'(t0) = 0.
    bool variational = false;
    // Co-integrate h with eps^2 h'' = (3u^2 - lambda) h - u, h(t0) = h'(t0) = 0
    // (sensitivity of the solution to lambda).
    bool lambdaSensitivity = false;
    std::vector<EventSpec> events;
    // Stop when |u| exceeds guardLevel (default 2b); only meaningful for the
    // untruncated equation, where leaving [-b, b] is irreversible.
    bool guard = true;
    double guardLevel = 0.0;   // 0 -> 2b
};

struct Sample {
    double t = 0.0;
    double u = 0.0;
    double du = 0.0;
};

class Trajectory {
public:
    // Dense evaluation; t is clamped to the realized span.
    double u(double t) const;
    double du(double t) const;
    double v(double t) const;        // variational value / derivative
    double dv(double t) const;
    double hSens(double t) const;    // lambda-sensitivity value / derivative
    double dhSens(double t) const;

    double tStart() const { return tStart_; }
    double tEnd() const { return tEnd_; }      // where integration actually stopped
    bool hasVariational() const { return variational_; }
    bool hasLambdaSensitivity() const { return lambdaSensitivity_; }

    const std::vector<Sample>& samples() const { return samples_; }
    const std::vector<Event>& events() const { return events_; }
    Terminal terminal() const { return terminal_; }
    const ProblemParams& params() const { return params_; }

private:
    friend Trajectory integrate(const ProblemParams&, double, double, double,
                                double, const IntegrateOptions&);

    struct Step {
        double tau0 = 0.0;   // step start in tau
        double h = 0.0;      // step size in tau (signed)
        // Dense-output coefficients per component.
        std::vector<std::array<double, 5>> rcont;
    };

    double component(double t, int comp) const;
    const Step& stepFor(double tau) const;

    ProblemParams params_;
    double tStart_ = 0.0, tEnd_ = 0.0;
    bool forward_ = true;
    bool variational_ = false, lambdaSensitivity_ = false;
    int dim_ = 2;
    std::vector<Step> steps_;
    std::vector<Sample> samples_;
    std::vector<Event> events_;
    Terminal terminal_ = Terminal::ReachedTend;
};

// Integrate from (u0, du0) at t0 to t1 (either direction).  Throws
// std::runtime_error on step-size underflow or step-count overflow.
Trajectory integrate(const ProblemParams& params, double t0, double t1,
                     double u0, double du0,
                     const IntegrateOptions& options = {});

// A time-dependent reference curve with a finite support window, used for
// trajectory-curve crossing detection.
struct Curve {
    std::string id;
    double tmin = 0.0;
    double tmax = 0.0;
    std::function<double(double t)> value;
    std::function<double(double t)> slope;
    double sampleDt = 0.05;   // scan resolution for sign-change bracketing
};

// All crossings of u(t) with the curve on the overlap of the trajectory span
// and the curve window, located on the dense output to 1e-12 in t.
std::vector<Event> crossingTimes(const Trajectory& traj, const Curve& curve);

// Convenience event builders.
EventSpec levelEvent(std::string id, double level, int direction, bool stop);
EventSpec derivativeZeroEvent(std::string id, int direction = 0, bool stop = false);

// Binary round-trip for sample arrays (versioned header, little-endian
// 64-bit floats); used to persist and reuse spike curves.  readSamplesBinary
// throws on a missing file or a version mismatch.
void writeSamplesBinary(const std::string& path,
                        const std::vector<Sample>& samples);
std::vector<Sample> readSamplesBinary(const std::string& path);

}  // namespace duffing
