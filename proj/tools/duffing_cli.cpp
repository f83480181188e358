// Command-line front end: equilibrium geometry, condition certification,
// periodic and layered solution finders, itinerary construction, kneading
// order, layer diagnostics and bifurcation sweeps, with CSV/JSON emission.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "duffing/asymptotics.hpp"
#include "duffing/bifurcation.hpp"
#include "duffing/chaos.hpp"
#include "duffing/core.hpp"
#include "duffing/integrator.hpp"
#include "duffing/shooting.hpp"

using json = nlohmann::ordered_json;
using namespace duffing;

namespace {

ForcingSpec forcingFromName(const std::string& name) {
    if (name == "cosine") return ForcingSpec::cosine();
    if (name == "cos-sin2") return ForcingSpec::cosMinusSin2();
    throw CLI::ValidationError("--forcing", "unknown forcing: " + name);
}

std::string className(SolutionClass c) {
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

json ladderJson(const ExtremaLadder& l) {
    json j;
    j["maxima"] = json::array();
    j["minima"] = json::array();
    for (const Event& e : l.maxima) j["maxima"].push_back({{"t", e.t}, {"u", e.u}});
    for (const Event& e : l.minima) j["minima"].push_back({{"t", e.t}, {"u", e.u}});
    return j;
}

// CSV trajectory dialect: comma separated, '.' decimal, header, LF endings.
void writeTrajectoryCsv(const std::string& path,
                        const std::vector<Sample>& samples,
                        const std::vector<Event>& events) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "t,u,du,event_marker\n";
    std::size_t ev = 0;
    char buf[160];
    for (const Sample& s : samples) {
        std::string marker;
        while (ev < events.size() && events[ev].t <= s.t)
            marker = events[ev++].id;
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%s\n", s.t, s.u,
                      s.du, marker.c_str());
        f << buf;
    }
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

json bracketJson(const BracketResult& r) {
    json j;
    j["alpha"] = r.alpha;
    j["alpha_low"] = r.alphaLowStr;
    j["alpha_high"] = r.alphaHighStr;
    j["width_log10"] = r.widthLog10;
    j["horizon"] = r.horizon;
    j["digits"] = r.digits;
    j["interval_history"] = json::array();
    for (std::size_t i = 0; i < r.history.size(); ++i)
        j["interval_history"].push_back({{"lo", r.history[i].first},
                                         {"hi", r.history[i].second},
                                         {"width_log10",
                                          r.widthLog10PerStage[i]}});
    j["crossings"] = json::array();
    for (const CrossingRecord& c : r.crossings)
        j["crossings"].push_back({{"spike", c.spike},
                                  {"t", c.t},
                                  {"u", c.u},
                                  {"slope_gap", c.slopeGap}});
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shooting toolkit for the periodically forced Duffing "
                 "equation eps^2 u'' = u^3 - lambda u + g(t)"};
    app.require_subcommand(1);

    double epsilon = 0.25, lambda = 2.0;
    std::string forcingName = "cosine";
    std::string outDir = ".";
    if (const char* env = std::getenv("DUFFING_OUT")) outDir = env;
    app.add_option("--out", outDir, "output directory for CSV files");

    // --- equilibria ---------------------------------------------------------
    auto* eq = app.add_subcommand("equilibria",
                                  "equilibrium branches of u^3-lambda*u+g(t)");
    double eqTmin = 0.0, eqTmax = 2 * kPi, eqStep = 0.01;
    eq->add_option("--lambda", lambda);
    eq->add_option("--forcing", forcingName);
    eq->add_option("--tmin", eqTmin);
    eq->add_option("--tmax", eqTmax);
    eq->add_option("--step", eqStep);

    // --- condition-a --------------------------------------------------------
    auto* ca = app.add_subcommand("condition-a",
                                  "certify the monotone-crossing condition");
    std::string method = "direct";
    bool requireHold = false;
    double alphaBar = std::nan("");
    ca->add_option("--lambda", lambda);
    ca->add_option("--epsilon", epsilon);
    ca->add_option("--method", method, "closed | direct");
    ca->add_option("--alpha-bar", alphaBar);
    ca->add_flag("--require-hold", requireHold,
                 "exit 2 when the certificate does not hold");

    // --- periodic -----------------------------------------------------------
    auto* pe = app.add_subcommand("periodic", "all 2pi-periodic solutions");
    int density = 4000;
    bool writeTraces = false;
    pe->add_option("--epsilon", epsilon);
    pe->add_option("--lambda", lambda);
    pe->add_option("--forcing", forcingName);
    pe->add_option("--density", density);
    pe->add_flag("--traces", writeTraces, "write per-solution CSV traces");

    // --- upwind -------------------------------------------------------------
    auto* uw = app.add_subcommand("upwind", "down-jumping layered solution");
    int mCount = 1;
    uw->add_option("--epsilon", epsilon);
    uw->add_option("--lambda", lambda);
    uw->add_option("--m", mCount);

    // --- chaos --------------------------------------------------------------
    auto* ch = app.add_subcommand("chaos",
                                  "itinerary-constrained bounded solution");
    std::string sigmaCsv, omegaCsv, binaryOut;
    double horizon = 0.0;
    ch->add_option("--epsilon", epsilon);
    ch->add_option("--lambda", lambda);
    ch->add_option("--sigma", sigmaCsv, "spike itinerary, e.g. 1,3");
    ch->add_option("--omega", omegaCsv, "five-symbol word, e.g. 4,3,1");
    ch->add_option("--horizon", horizon);
    ch->add_option("--binary-out", binaryOut,
                   "also write the trajectory in the binary sample format");

    // --- kneading -----------------------------------------------------------
    auto* kn = app.add_subcommand("kneading", "order two itineraries");
    std::string sigma1Csv, sigma2Csv;
    kn->add_option("--epsilon", epsilon);
    kn->add_option("--lambda", lambda);
    kn->add_option("--sigma1", sigma1Csv)->required();
    kn->add_option("--sigma2", sigma2Csv);

    // --- layers -------------------------------------------------------------
    auto* la = app.add_subcommand("layers",
                                  "branch-tracking errors of the odd solution "
                                  "across an eps suite");
    std::string epsList = "0.04,0.03,0.02,0.015,0.01";
    la->add_option("--lambda", lambda);
    la->add_option("--eps-list", epsList);

    // --- bifurcate ----------------------------------------------------------
    auto* bi = app.add_subcommand("bifurcate", "lambda sweep of the G zeros");
    double lamMin = 0.9, lamMax = 1.15, lamStep = 0.02;
    int sweepDensity = 800;
    bi->add_option("--epsilon", epsilon);
    bi->add_option("--forcing", forcingName);
    bi->add_option("--lambda-min", lamMin);
    bi->add_option("--lambda-max", lamMax);
    bi->add_option("--step", lamStep);
    bi->add_option("--density", sweepDensity);

    // --- profile ------------------------------------------------------------
    auto* pr = app.add_subcommand("profile", "critical constants as JSON");
    pr->add_option("--lambda", lambda);
    pr->add_option("--forcing", forcingName);

    CLI11_PARSE(app, argc, argv);

    try {
        std::filesystem::create_directories(outDir);
        ForcingSpec forcing = forcingFromName(forcingName);

        if (eq->parsed()) {
            std::string path = outDir + "/equilibria.csv";
            std::ofstream f(path);
            f << "t,U_lower,U_middle,U_upper\n";
            char buf[160];
            for (double t = eqTmin; t <= eqTmax + 0.5 * eqStep; t += eqStep) {
                double tt = std::min(t, eqTmax);
                if (branchCount(lambda, forcing, tt) == 3) {
                    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g\n",
                                  tt, lowerBranch(lambda, forcing, tt),
                                  middleBranch(lambda, forcing, tt),
                                  upperBranch(lambda, forcing, tt));
                } else {
                    auto roots = solveCubicBranches(lambda, forcing(tt));
                    std::snprintf(buf, sizeof buf, "%.10g,%.10g,,\n", tt,
                                  roots.front().value);
                }
                f << buf;
            }
            emit({{"command", "equilibria"},
                  {"lambda", lambda},
                  {"lambda0", computeLambda0(forcing)},
                  {"csv", path}});
            return 0;
        }

        if (ca->parsed()) {
            ProblemParams p = ProblemParams::make(epsilon, lambda, forcing);
            CertMethod m = method == "closed" ? CertMethod::ClosedForm
                                              : CertMethod::DirectIntegration;
            if (method != "closed" && method != "direct")
                throw CLI::ValidationError("--method", "closed | direct");
            ConditionACertificate cert = certifyConditionA(p, m, alphaBar);
            emit({{"command", "condition-a"},
                  {"lambda", cert.lambda},
                  {"epsilon", cert.epsilon},
                  {"method", method},
                  {"alpha_bar", cert.alphaBar},
                  {"holds", cert.holds},
                  {"bound", cert.bound},
                  {"cross_time", cert.crossTime}});
            return requireHold && !cert.holds ? 2 : 0;
        }

        if (pe->parsed()) {
            ProblemParams p =
                ProblemParams::make(epsilon, lambda, forcing, true);
            auto results = findPeriodicAll(p, density);
            json out;
            out["command"] = "periodic";
            out["epsilon"] = epsilon;
            out["lambda"] = lambda;
            out["solutions"] = json::array();
            int k = 0;
            for (const ShootResult& r : results) {
                json s;
                s["alpha"] = r.alpha;
                s["residual"] = r.residual;
                s["classification"] = className(r.cls);
                s["antisymmetry_defect"] = r.antisymmetryDefect;
                s["extrema"] = ladderJson(r.ladder);
                if (writeTraces) {
                    std::string path = outDir + "/periodic_" +
                                       std::to_string(k) + ".csv";
                    writeTrajectoryCsv(path, r.solution.samples(),
                                       r.solution.events());
                    s["csv"] = path;
                }
                out["solutions"].push_back(s);
                ++k;
            }
            emit(out);
            return 0;
        }

        if (uw->parsed()) {
            ProblemParams p = ProblemParams::make(epsilon, lambda, forcing);
            ShootResult r = findUpwind(p, mCount);
            std::string path = outDir + "/upwind.csv";
            const std::vector<Sample>& prof =
                r.profile.empty() ? r.solution.samples() : r.profile;
            writeTrajectoryCsv(path, prof, {});
            emit({{"command", "upwind"},
                  {"beta", r.alpha},
                  {"residual", r.residual},
                  {"m", r.m},
                  {"extrema", ladderJson(r.ladder)},
                  {"csv", path}});
            return 0;
        }

        if (ch->parsed()) {
            ProblemParams p = ProblemParams::make(epsilon, lambda, forcing);
            if (sigmaCsv.empty() == omegaCsv.empty())
                throw CLI::ValidationError("--sigma",
                                           "give exactly one of --sigma/--omega");
            BracketResult r;
            if (!omegaCsv.empty()) {
                FiveSymbolSequence omega = FiveSymbolSequence::parse(omegaCsv);
                r = findFiveSymbolSolution(p, omega, horizon);
            } else {
                SymbolSequence sigma = SymbolSequence::parse(sigmaCsv);
                r = findItinerarySolution(p, sigma, horizon);
            }
            std::string path = outDir + "/chaos_trajectory.csv";
            writeTrajectoryCsv(path, r.profile, {});
            if (!binaryOut.empty()) writeSamplesBinary(binaryOut, r.profile);
            json out = bracketJson(r);
            out["command"] = "chaos";
            out["csv"] = path;
            emit(out);
            return 0;
        }

        if (kn->parsed()) {
            ProblemParams p = ProblemParams::make(epsilon, lambda, forcing);
            SymbolSequence s1 = SymbolSequence::parse(sigma1Csv);
            SymbolSequence s2 = SymbolSequence::parse(sigma2Csv);
            KneadingVerdict v = kneadingOrder(p, s1, s2);
            emit({{"command", "kneading"},
                  {"sigma1", sigma1Csv},
                  {"sigma2", sigma2Csv},
                  {"verdict", v.verdict},
                  {"predicted", v.predicted},
                  {"consistent", v.consistent}});
            return v.consistent ? 0 : 2;
        }

        if (la->parsed()) {
            std::vector<double> epsSuite;
            for (std::size_t pos = 0; pos < epsList.size();) {
                std::size_t comma = epsList.find(',', pos);
                epsSuite.push_back(std::stod(epsList.substr(pos, comma - pos)));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
            std::string path = outDir + "/layers.csv";
            std::ofstream f(path);
            f << "epsilon,e0,e1,ratio0,ratio1\n";
            std::vector<std::pair<double, double>> pts0, pts1;
            const double c = 0.3, d = kPi / 2 - 0.3;
            for (double e : epsSuite) {
                ProblemParams p = ProblemParams::make(e, lambda, forcing);
                UpResult up = findUp(p);
                BandReport br = bandCheck(p, up.profile, Branch::Lower, c, d, 0.0);
                pts0.push_back({e, br.e0});
                pts1.push_back({e, br.e1 / e});   // |u' - branch'| alone
                char buf[160];
                std::snprintf(buf, sizeof buf, "%g,%.6e,%.6e,%.6e,%.6e\n", e,
                              br.e0, br.e1, br.ratio0, br.ratio1);
                f << buf;
            }
            RateFit f0 = rateRegression(pts0);
            RateFit f1 = rateRegression(pts1);
            emit({{"command", "layers"},
                  {"lambda", lambda},
                  {"csv", path},
                  {"value_slope", f0.slope},
                  {"derivative_slope", f1.slope}});
            return 0;
        }

        if (bi->parsed()) {
            BifurcationDiagram d =
                sweep(lamMin, lamMax, lamStep, epsilon, forcing, sweepDensity);
            std::string path = outDir + "/bifurcation.csv";
            std::ofstream f(path);
            f << "lambda,alpha,G_slope,v_prime_pi\n";
            char buf[200];
            for (const LambdaSlice& s : d.slices)
                for (const ZeroRecord& z : s.zeros) {
                    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.6e,%.6e\n",
                                  s.lambda, z.alpha, z.slope, z.slope);
                    f << buf;
                }
            json out;
            out["command"] = "bifurcate";
            out["epsilon"] = epsilon;
            out["csv"] = path;
            out["found_lambda_b"] = d.foundLambdaB;
            if (d.foundLambdaB) {
                out["lambda_b_lo"] = d.lambdaBLo;
                out["lambda_b_hi"] = d.lambdaBHi;
                out["count_below"] = d.countBelow;
                out["count_above"] = d.countAbove;
            }
            emit(out);
            return 0;
        }

        if (pr->parsed()) {
            json out;
            out["command"] = "profile";
            out["lambda0"] = computeLambda0(forcing);
            if (forcing.kind() == ForcingKind::Cosine) {
                out["Lambda"] = computeLambda();
                if (lambda > out["lambda0"].get<double>()) {
                    CriticalConstants cc = criticalConstants(lambda);
                    out["K"] = cc.K;
                    EpsilonLambda el = epsilonLambda(lambda);
                    out["b"] = el.b;
                    out["T_lambda"] = el.Tlambda;
                    out["eps_lambda"] = el.epsLambda;
                }
            }
            out["lambda"] = lambda;
            emit(out);
            return 0;
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
