// Python bindings for the main operations: constants, cubic branches,
// condition certification, periodic-solution shooting, itinerary
// construction and the kneading order.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "duffing/bifurcation.hpp"
#include "duffing/chaos.hpp"
#include "duffing/core.hpp"
#include "duffing/shooting.hpp"

namespace py = pybind11;
using namespace duffing;

namespace {

ForcingSpec forcingByName(const std::string& name) {
    if (name == "cosine") return ForcingSpec::cosine();
    if (name == "cos-sin2") return ForcingSpec::cosMinusSin2();
    throw std::invalid_argument("unknown forcing: " + name);
}

std::string branchName(Branch b) {
    switch (b) {
        case Branch::Lower: return "lower";
        case Branch::Middle: return "middle";
        case Branch::Upper: return "upper";
        case Branch::LowerMiddle: return "lower+middle";
        case Branch::MiddleUpper: return "middle+upper";
        default: return "single";
    }
}

std::string clsName(SolutionClass c) {
    switch (c) {
        case SolutionClass::U1: return "u1";
        case SolutionClass::U2: return "u2";
        case SolutionClass::U3: return "u3";
        case SolutionClass::U4: return "u4";
        case SolutionClass::U5: return "u5";
        case SolutionClass::MMaxima: return "mMaxima";
        case SolutionClass::UpWind: return "upWind";
        default: return "other";
    }
}

py::dict bracketDict(const BracketResult& r) {
    py::dict d;
    d["alpha"] = r.alpha;
    d["alpha_low"] = r.alphaLowStr;
    d["alpha_high"] = r.alphaHighStr;
    d["width_log10"] = r.widthLog10;
    d["horizon"] = r.horizon;
    d["digits"] = r.digits;
    py::list crossings;
    for (const CrossingRecord& c : r.crossings) {
        py::dict cd;
        cd["spike"] = c.spike;
        cd["t"] = c.t;
        cd["u"] = c.u;
        cd["slope_gap"] = c.slopeGap;
        crossings.append(cd);
    }
    d["crossings"] = crossings;
    return d;
}

}  // namespace

PYBIND11_MODULE(_duffing, m) {
    m.doc() = "Shooting toolkit for eps^2 u'' = u^3 - lambda u + g(t)";

    m.def(
        "lambda0",
        [](const std::string& forcing) {
            return computeLambda0(forcingByName(forcing));
        },
        py::arg("forcing") = "cosine",
        "lambda at which the equilibrium curve splits into three branches");

    m.def("Lambda", &computeLambda,
          "threshold above which the homoclinic anchor drops below U0(pi)");

    m.def(
        "cubic_branches",
        [](double lambda, double c) {
            py::list out;
            for (const CubicRoot& r : solveCubicBranches(lambda, c))
                out.append(py::make_tuple(r.value, branchName(r.branch)));
            return out;
        },
        py::arg("lambda"), py::arg("c"),
        "sorted real roots of u^3 - lambda u + c with branch labels");

    m.def(
        "epsilon_lambda",
        [](double lambda) {
            EpsilonLambda e = epsilonLambda(lambda);
            py::dict d;
            d["b"] = e.b;
            d["T_lambda"] = e.Tlambda;
            d["eps_lambda"] = e.epsLambda;
            return d;
        },
        py::arg("lambda"), "closed-form certification threshold");

    m.def(
        "certify_condition_a",
        [](double epsilon, double lambda, const std::string& method) {
            ProblemParams p = ProblemParams::make(epsilon, lambda);
            CertMethod mth = method == "closed" ? CertMethod::ClosedForm
                                                : CertMethod::DirectIntegration;
            ConditionACertificate c = certifyConditionA(p, mth);
            py::dict d;
            d["holds"] = c.holds;
            d["alpha_bar"] = c.alphaBar;
            d["bound"] = c.bound;
            d["cross_time"] = c.crossTime;
            return d;
        },
        py::arg("epsilon"), py::arg("lambda"), py::arg("method") = "direct");

    m.def(
        "shoot_g",
        [](double epsilon, double lambda, double alpha) {
            return shootG(ProblemParams::make(epsilon, lambda,
                                              ForcingSpec::cosine(), true),
                          alpha);
        },
        py::arg("epsilon"), py::arg("lambda"), py::arg("alpha"),
        "boundary functional u_alpha'(pi) of the truncated equation");

    m.def(
        "find_periodic_all",
        [](double epsilon, double lambda, int density) {
            ProblemParams p = ProblemParams::make(epsilon, lambda,
                                                  ForcingSpec::cosine(), true);
            py::list out;
            for (const ShootResult& r : findPeriodicAll(p, density)) {
                py::dict d;
                d["alpha"] = r.alpha;
                d["residual"] = r.residual;
                d["classification"] = clsName(r.cls);
                d["antisymmetry_defect"] = r.antisymmetryDefect;
                out.append(d);
            }
            return out;
        },
        py::arg("epsilon"), py::arg("lambda"), py::arg("density") = 4000);

    m.def(
        "find_up",
        [](double epsilon, double lambda) {
            UpResult r = findUp(ProblemParams::make(epsilon, lambda));
            py::dict d;
            d["alpha"] = r.alpha;
            d["residual"] = r.residual;
            d["antisymmetry_defect"] = r.antisymmetryDefect;
            return d;
        },
        py::arg("epsilon"), py::arg("lambda"),
        "the odd solution vanishing at pi/2");

    m.def(
        "find_itinerary",
        [](double epsilon, double lambda, const std::vector<int>& sigma,
           double horizon) {
            ProblemParams p = ProblemParams::make(epsilon, lambda);
            SymbolSequence s;
            s.sigma = sigma;
            s.validate();
            return bracketDict(findItinerarySolution(p, s, horizon));
        },
        py::arg("epsilon"), py::arg("lambda"), py::arg("sigma"),
        py::arg("horizon") = 0.0,
        "nested-interval construction of a spike-itinerary solution");

    m.def(
        "find_five_symbol",
        [](double epsilon, double lambda, const std::vector<int>& omega,
           double horizon) {
            ProblemParams p = ProblemParams::make(epsilon, lambda);
            FiveSymbolSequence w;
            w.omega = omega;
            w.validate();
            return bracketDict(findFiveSymbolSolution(p, w, horizon));
        },
        py::arg("epsilon"), py::arg("lambda"), py::arg("omega"),
        py::arg("horizon") = 0.0);

    m.def(
        "kneading_order",
        [](double epsilon, double lambda, const std::vector<int>& s1,
           const std::vector<int>& s2) {
            ProblemParams p = ProblemParams::make(epsilon, lambda);
            SymbolSequence a, b;
            a.sigma = s1;
            b.sigma = s2;
            a.validate();
            b.validate();
            KneadingVerdict v = kneadingOrder(p, a, b);
            py::dict d;
            d["verdict"] = v.verdict;
            d["predicted"] = v.predicted;
            d["consistent"] = v.consistent;
            return d;
        },
        py::arg("epsilon"), py::arg("lambda"), py::arg("sigma1"),
        py::arg("sigma2"));
}
