// Command-line front end. Every run writes a manifest (argument echo, seed,
// wall time, outputs, status), including on failure paths.
//
// Exit codes: 0 success, 1 usage, 2 domain error, 3 solver error.

#include <obi/dag.hpp>
#include <obi/mappings.hpp>
#include <obi/polytope.hpp>
#include <obi/quantum.hpp>
#include <obi/steering.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <sstream>

using namespace obi;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "obi 1.0.0";

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text, std::vector<std::string>& outputs) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write " + path);
    out << text;
    outputs.push_back(path);
}

LinearFunctional inequality_by_name(const std::string& name, int l) {
    if (name == "il22") return il22_functional(l, 0, 0, 0, 1);
    if (name == "trivial") return trivial_functional(l, 0, 0, 0);
    if (name == "i1") return instrumental_functional(1, l);
    if (name == "i2") return instrumental_functional(2, l);
    if (name == "i3") return instrumental_functional(3, l);
    throw DomainError("unknown inequality: " + name);
}

bool upper_bounded(const std::string& name) { // classical bound is an upper bound (<= 0 families)
    return name == "i1" || name == "i2" || name == "i3";
}

// Optional JSON config: {"command": "...", "args": {"flag": value, ...}}
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.size() >= 2 && args[0] == "--config") {
        const json j = json::parse(read_file(args[1]));
        std::vector<std::string> out;
        out.push_back(j.at("command").get<std::string>());
        if (j.contains("args"))
            for (const auto& [k, v] : j.at("args").items()) {
                out.push_back("--" + k);
                if (!v.is_boolean()) out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
            }
        for (size_t i = 2; i < args.size(); ++i) out.push_back(args[i]);
        return out;
    }
    return args;
}

} // namespace

int main(int argc, char** argv) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto wall_start = std::chrono::system_clock::now();

    CLI::App app{"observational-interventional toolbox: inequalities, membership, facets,\n"
                 "quantum violations, detection thresholds, graph surgery and steering tests"};
    app.require_subcommand(1);

    std::string manifest_path = "obi-manifest.json";
    app.add_option("--manifest", manifest_path, "manifest output path");

    std::vector<std::string> outputs;
    std::function<int()> run; // set by the chosen subcommand

    // ---- eval ----------------------------------------------------------------
    {
        auto* c = app.add_subcommand("eval", "evaluate an inequality family on a behavior");
        auto behavior = std::make_shared<std::string>();
        auto ineq = std::make_shared<std::string>("il22");
        auto out = std::make_shared<std::string>();
        c->add_option("--behavior", *behavior, "behavior JSON file")->required();
        c->add_option("--inequality", *ineq, "il22 | trivial | i1 | i2 | i3");
        c->add_option("--out", *out, "write the per-instance values as JSON");
        c->callback([&, behavior, ineq, out] {
            run = [&, behavior, ineq, out]() {
                const auto b = behavior_from_json(read_file(*behavior));
                const auto base = inequality_by_name(*ineq, b.l);
                const auto family = orbit(base);
                double best = upper_bounded(*ineq) ? -1e300 : 1e300;
                json values = json::array();
                for (const auto& f : family) {
                    const double v = f.eval(b);
                    values.push_back(v);
                    best = upper_bounded(*ineq) ? std::max(best, v) : std::min(best, v);
                }
                std::printf("%s over %zu relabelings: %s value %.12g (classical %s 0)\n", ineq->c_str(), family.size(),
                            upper_bounded(*ineq) ? "max" : "min", best, upper_bounded(*ineq) ? "<=" : ">=");
                if (!out->empty()) {
                    json j{{"inequality", *ineq}, {"extreme", best}, {"values", values}};
                    write_file(*out, j.dump(2), outputs);
                }
                return 0;
            };
        });
    }

    // ---- membership ------------------------------------------------------------
    {
        auto* c = app.add_subcommand("membership", "decide membership in the classical polytope");
        auto behavior = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        c->add_option("--behavior", *behavior, "behavior JSON file")->required();
        c->add_option("--out", *out, "write verdict and certificate JSON");
        c->callback([&, behavior, out] {
            run = [&, behavior, out]() {
                const auto b = behavior_from_json(read_file(*behavior));
                const auto lp = membership_lp(b);
                const auto cons = membership_constructive(b);
                if (lp.member) std::printf("member (constructive: %s)\n", cons.feasible ? "feasible" : "boundary");
                else
                    std::printf("non-member: certificate value %.9g vs classical minimum %.9g\n", lp.certificate_value,
                                lp.classical_min);
                if (!out->empty()) {
                    json j{{"member", lp.member}};
                    j["constructive_feasible"] = cons.feasible;
                    j["boundary"] = cons.boundary;
                    if (lp.member) j["weights"] = lp.weights;
                    else {
                        json cert;
                        cert["const"] = lp.certificate.constant;
                        for (int x = 0; x < b.l; ++x)
                            for (int a = 0; a < 2; ++a)
                                for (int bb = 0; bb < 2; ++bb)
                                    cert["obs:" + std::to_string(x) + ":" + std::to_string(a) + ":" +
                                         std::to_string(bb)] = lp.certificate.oc(x, a, bb);
                        for (int a = 0; a < 2; ++a)
                            for (int bb = 0; bb < 2; ++bb)
                                cert["do:" + std::to_string(a) + ":" + std::to_string(bb)] = lp.certificate.dc(a, bb);
                        j["certificate"] = cert;
                        j["certificate_value"] = lp.certificate_value;
                        j["classical_min"] = lp.classical_min;
                    }
                    write_file(*out, j.dump(2), outputs);
                }
                return 0;
            };
        });
    }

    // ---- facets ----------------------------------------------------------------
    {
        auto* c = app.add_subcommand("facets", "enumerate the facets of the classical polytope");
        auto l = std::make_shared<int>(2);
        auto out = std::make_shared<std::string>("facets.json");
        c->add_option("--l", *l, "number of instrument settings (2..4)");
        c->add_option("--out", *out, "output JSON path");
        c->callback([&, l, out] {
            run = [&, l, out]() {
                const auto fe = enumerate_facets({*l, 2, 2});
                std::printf("dimension %d, %zu facets in %d orbits:", fe.dimension, fe.facets.size(), fe.orbit_count);
                for (const auto& [fam, n] : fe.family_counts) std::printf(" %s=%d", fam.c_str(), n);
                std::printf("\n");
                write_file(*out, facets_to_json(fe), outputs);
                return 0;
            };
        });
    }

    // ---- quantum-violation -------------------------------------------------------
    {
        auto* c = app.add_subcommand("quantum-violation", "seesaw bound on the quantum value of an inequality");
        auto ineq = std::make_shared<std::string>("il22");
        auto l = std::make_shared<int>(2);
        auto restarts = std::make_shared<int>(20);
        auto seed = std::make_shared<uint64_t>();
        auto out = std::make_shared<std::string>();
        c->add_option("--inequality", *ineq, "il22 | trivial | i1 | i2 | i3");
        c->add_option("--l", *l, "number of settings");
        c->add_option("--restarts", *restarts, "random restarts");
        c->add_option("--seed", *seed, "rng seed (mandatory: stochastic run)")->required();
        c->add_option("--out", *out, "write the optimal behavior as JSON");
        c->callback([&, ineq, l, restarts, seed, out] {
            run = [&, ineq, l, restarts, seed, out]() {
                SeesawOptions so;
                so.restarts = *restarts;
                so.seed = *seed;
                so.maximize = upper_bounded(*ineq);
                const auto r = seesaw_optimize(*l, inequality_by_name(*ineq, *l), so);
                std::printf("%s quantum %s = %.12g (%s after %d iterations)\n", ineq->c_str(),
                            so.maximize ? "max" : "min", r.value, r.converged ? "converged" : "iteration cap",
                            r.iterations);
                if (!out->empty()) write_file(*out, behavior_to_json(born_behavior(r.model)), outputs);
                return 0;
            };
        });
    }

    // ---- efficiency-sweep ----------------------------------------------------------
    {
        auto* c = app.add_subcommand("efficiency-sweep", "best il22 violation over a detection-efficiency grid");
        auto grid = std::make_shared<int>(16);
        auto min_eta = std::make_shared<double>(0.4);
        auto restarts = std::make_shared<int>(4);
        auto seed = std::make_shared<uint64_t>();
        auto out = std::make_shared<std::string>("sweep.csv");
        auto threads = std::make_shared<int>(2);
        c->add_option("--grid", *grid, "grid points per axis");
        c->add_option("--min-eta", *min_eta, "lower end of the grid");
        c->add_option("--restarts", *restarts, "seesaw restarts per grid point");
        c->add_option("--seed", *seed, "rng seed (mandatory: stochastic run)")->required();
        c->add_option("--out", *out, "CSV output path");
        c->add_option("--threads", *threads, "worker threads");
        c->callback([&, grid, min_eta, restarts, seed, out, threads] {
            run = [&, grid, min_eta, restarts, seed, out, threads]() {
                const int n = *grid;
                if (n < 2) throw DomainError("grid must have at least 2 points per axis");
                std::vector<double> result(static_cast<size_t>(n) * n);
                std::atomic<int> next{0};
                auto worker = [&] {
                    for (;;) {
                        const int k = next.fetch_add(1);
                        if (k >= n * n) return;
                        const int i = k / n, j = k % n;
                        const double e1 = *min_eta + (1.0 - *min_eta) * i / (n - 1);
                        const double e2 = *min_eta + (1.0 - *min_eta) * j / (n - 1);
                        SeesawOptions so;
                        so.restarts = *restarts;
                        so.seed = *seed + static_cast<uint64_t>(k);
                        result[static_cast<size_t>(k)] = best_noisy_violation({e1, e2}, so);
                    }
                };
                std::vector<std::future<void>> pool;
                for (int t = 0; t < std::max(1, *threads); ++t) pool.push_back(std::async(std::launch::async, worker));
                for (auto& f : pool) f.get();
                std::ostringstream csv;
                csv << "eta1,eta2,best_Il22\n";
                char buf[96];
                for (int k = 0; k < n * n; ++k) {
                    const int i = k / n, j = k % n;
                    const double e1 = *min_eta + (1.0 - *min_eta) * i / (n - 1);
                    const double e2 = *min_eta + (1.0 - *min_eta) * j / (n - 1);
                    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", e1, e2, result[static_cast<size_t>(k)]);
                    csv << buf;
                }
                write_file(*out, csv.str(), outputs);
                std::printf("wrote %dx%d sweep to %s\n", n, n, out->c_str());
                return 0;
            };
        });
    }

    // ---- hardy-check ------------------------------------------------------------------
    {
        auto* c = app.add_subcommand("hardy-check", "difference-of-hardy identity and ceilings on Bell data");
        auto bell = std::make_shared<std::string>();
        auto behavior = std::make_shared<std::string>();
        c->add_option("--bell", *bell, "Bell behavior JSON file");
        c->add_option("--behavior", *behavior, "extended behavior JSON (mapped through the bijection)");
        c->callback([&, bell, behavior] {
            run = [&, bell, behavior]() {
                BellBehavior p;
                if (!bell->empty()) p = bell_from_json(read_file(*bell));
                else if (!behavior->empty()) p = instrumental_to_bell(behavior_from_json(read_file(*behavior)));
                else throw DomainError("hardy-check needs --bell or --behavior");
                const auto rep = hardy_implies_chsh_check(p);
                std::printf("d0 = %.9g, d1 = %.9g, identity residual = %.3g\n", rep.d0, rep.d1, rep.identity_residual);
                std::printf("hardy min = %.9g, chsh max = %.9g, implication %s\n", rep.hardy_min, rep.chsh_max,
                            rep.implication_ok ? "holds" : "violated");
                return 0;
            };
        });
    }

    // ---- exogenize ---------------------------------------------------------------------
    {
        auto* c = app.add_subcommand("exogenize", "split intervened nodes into exogenous copies");
        auto dag = std::make_shared<std::string>();
        auto targets = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        c->add_option("--dag", *dag, "DAG JSON file")->required();
        c->add_option("--targets", *targets, "comma-separated node names")->required();
        c->add_option("--out", *out, "output DAG JSON path");
        c->callback([&, dag, targets, out] {
            run = [&, dag, targets, out]() {
                const Dag g = dag_from_json(read_file(*dag));
                std::vector<int> ids;
                std::stringstream ss(*targets);
                std::string name;
                while (std::getline(ss, name, ',')) {
                    const int id = g.index_of(name);
                    if (id < 0) throw DomainError("unknown node: " + name);
                    ids.push_back(id);
                }
                const Dag exo = exogenize(g, ids);
                const std::string js = dag_to_json(exo);
                if (!out->empty()) write_file(*out, js, outputs);
                else std::printf("%s\n", js.c_str());
                return 0;
            };
        });
    }

    // ---- steering-robustness ----------------------------------------------------------
    {
        auto* c = app.add_subcommand("steering-robustness", "classical-noise robustness of an extended assemblage");
        auto scenario = std::make_shared<std::string>();
        auto assemblage = std::make_shared<std::string>();
        auto param = std::make_shared<double>(1.0);
        auto data = std::make_shared<std::string>("interventions");
        c->add_option("--scenario", *scenario, "x3 | rsp | rsp-ent (alternative to --assemblage)");
        c->add_option("--assemblage", *assemblage, "assemblage JSON file");
        c->add_option("--param", *param, "visibility v / angle phi / angle theta for the generator");
        c->add_option("--data", *data, "interventions | observational");
        c->callback([&, scenario, assemblage, param, data] {
            run = [&, scenario, assemblage, param, data]() {
                ExtendedAssemblage e(2);
                if (!assemblage->empty()) e = assemblage_from_json(read_file(*assemblage));
                else if (*scenario == "x3") e = x3_assemblage(*param);
                else if (*scenario == "rsp") e = rsp_assemblage(*param);
                else if (*scenario == "rsp-ent") e = rsp_entanglement_assemblage(*param);
                else throw DomainError("steering-robustness needs --assemblage or a known --scenario");
                RobustnessOptions ro;
                ro.include_do = (*data != "observational");
                const auto r = robustness_primal(e, ro);
                std::printf("tau = %.9g (%s, residual %.2e, %d iterations)\n", r.tau,
                            r.classical ? "classical" : "nonclassical", r.residual, r.iterations);
                return 0;
            };
        });
    }

    // ---- witness-verify ------------------------------------------------------------------
    {
        auto* c = app.add_subcommand("witness-verify", "feasibility and value of a steering witness");
        auto witness = std::make_shared<std::string>();
        auto assemblage = std::make_shared<std::string>();
        auto scenario = std::make_shared<std::string>();
        auto param = std::make_shared<double>(1.0);
        auto tol = std::make_shared<double>(0.01);
        c->add_option("--witness", *witness, "witness JSON file")->required();
        c->add_option("--assemblage", *assemblage, "assemblage JSON file");
        c->add_option("--scenario", *scenario, "x3 (alternative to --assemblage)");
        c->add_option("--param", *param, "generator parameter");
        c->add_option("--tol", *tol, "feasibility slack (absorbs table rounding)");
        c->callback([&, witness, assemblage, scenario, param, tol] {
            run = [&, witness, assemblage, scenario, param, tol]() {
                const auto w = witness_from_json(read_file(*witness));
                ExtendedAssemblage e(w.nx);
                if (!assemblage->empty()) e = assemblage_from_json(read_file(*assemblage));
                else if (*scenario == "x3") e = x3_assemblage(*param);
                else throw DomainError("witness-verify needs --assemblage or --scenario x3");
                const auto rep = verify_witness(w, e, *tol);
                const auto p3 = prop3_bound(w);
                std::printf("feasible: %s (worst margin %.4g)\n", rep.feasible ? "yes" : "no", rep.worst_margin);
                std::printf("observational value %.6g, interventional value %.6g, total %.6g\n", rep.obs_value,
                            rep.do_value, rep.total_value);
                std::printf("observational ceiling %.6g, classical bound %.6g, useful: %s\n", p3.lhs, p3.rhs,
                            p3.useful ? "yes" : "no");
                return 0;
            };
        });
    }

    // ---- critical-visibility ----------------------------------------------------------------
    {
        auto* c = app.add_subcommand("critical-visibility", "smallest visibility with nonclassical robustness");
        auto scenario = std::make_shared<std::string>("tripartite");
        auto data = std::make_shared<std::string>("interventions");
        auto ndi = std::make_shared<bool>(false);
        c->add_option("--scenario", *scenario, "x3 | tripartite");
        c->add_option("--data", *data, "interventions | observational");
        c->add_flag("--no-direct-influence", *ndi, "restrict the tripartite model: last party ignores b");
        c->callback([&, scenario, data, ndi] {
            run = [&, scenario, data, ndi]() {
                VisibilityOptions vo;
                vo.include_do = (*data != "observational");
                vo.no_direct_influence = *ndi;
                const auto sc = (*scenario == "x3") ? SteeringScenario::X3 : SteeringScenario::Tripartite;
                const double v = critical_visibility(sc, vo);
                std::printf("critical visibility = %.4f\n", v);
                return 0;
            };
        });
    }

    // ---- rsp-sweep -------------------------------------------------------------------------
    {
        auto* c = app.add_subcommand("rsp-sweep", "robustness sweep for remote state preparation");
        auto vary = std::make_shared<std::string>("measurements");
        auto points = std::make_shared<int>(33);
        auto out = std::make_shared<std::string>("rsp.csv");
        c->add_option("--vary", *vary, "measurements (angle phi) | entanglement (angle theta)");
        c->add_option("--points", *points, "sample count");
        c->add_option("--out", *out, "CSV output path");
        c->callback([&, vary, points, out] {
            run = [&, vary, points, out]() {
                if (*points < 2) throw DomainError("need at least 2 points");
                const bool meas = (*vary == "measurements");
                std::ostringstream csv;
                csv << (meas ? "phi,tau\n" : "theta,tau\n");
                char buf[64];
                SdpState warm;
                for (int i = 0; i < *points; ++i) {
                    const double hi = meas ? M_PI : M_PI / 4;
                    const double p = hi * i / (*points - 1);
                    const auto e = meas ? rsp_assemblage(p) : rsp_entanglement_assemblage(p);
                    const auto r = robustness_primal(e, {}, &warm);
                    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", p, r.tau);
                    csv << buf;
                }
                write_file(*out, csv.str(), outputs);
                std::printf("wrote %d samples to %s\n", *points, out->c_str());
                return 0;
            };
        });
    }

    // ---- parse and run -----------------------------------------------------------------------
    const auto args = expand_config(argc, argv);
    std::vector<const char*> cargs{argv[0]};
    for (const auto& a : args) cargs.push_back(a.c_str());

    int exit_code = 0;
    std::string status = "ok";
    try {
        try {
            app.parse(static_cast<int>(cargs.size()), cargs.data());
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e); // prints usage/help
            return code == 0 ? 0 : 1;
        }
        if (run) exit_code = run();
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        status = e.what();
        exit_code = 3;
    } catch (const std::exception& e) { // domain/structural/model/capacity
        std::fprintf(stderr, "error: %s\n", e.what());
        status = e.what();
        exit_code = 2;
    }

    json manifest;
    manifest["version"] = kVersion;
    manifest["command"] = args;
    const auto start_t = std::chrono::system_clock::to_time_t(wall_start);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%FT%TZ", std::gmtime(&start_t));
    manifest["started_at"] = stamp;
    for (size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--seed") manifest["seed"] = args[i + 1];
    manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest["status"] = status;
    manifest["exit_code"] = exit_code;
    manifest["outputs"] = outputs;
    std::ofstream mf(manifest_path);
    if (mf) mf << manifest.dump(2) << "\n";

    return exit_code;
}
