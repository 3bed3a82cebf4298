// rydwire: command-line front end for the quantum-wire toolkit.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rydwire/errors.hpp"
#include "rydwire/experiment.hpp"

namespace fs = std::filesystem;
using namespace rydwire;

namespace {

constexpr const char *kOutRootEnv = "RYDWIRE_OUT_ROOT";

fs::path default_out(const std::string &leaf) {
    const char *root = std::getenv(kOutRootEnv);
    return fs::path(root != nullptr && *root != '\0' ? root : "rydwire-out") / leaf;
}

void print_error(const std::string &code, const std::string &message) {
    nlohmann::json rec = {{"error", code}, {"message", message}};
    std::cerr << rec.dump() << "\n";
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Rydberg quantum-wire simulations of Platonic graphs"};
    app.require_subcommand(1);

    std::string out_flag;
    bool quiet = false;
    app.add_option("--out", out_flag, "Output directory");
    app.add_flag("--quiet", quiet, "Only print errors");
    app.fallthrough();

    std::string graph_name;
    auto *graph_cmd = app.add_subcommand("graph", "Print or write a wired graph");
    graph_cmd->add_option("name", graph_name, "tetrahedron | cube | octahedron")->required();
    bool graph_base = false;
    graph_cmd->add_flag("--base", graph_base, "Emit the unwired graph instead");

    std::string layout_name;
    double ratio = 0.0;
    double spacing = kExperimentSpacing;
    auto *layout_cmd = app.add_subcommand("layout", "Write atom coordinates");
    layout_cmd->add_option("name", layout_name, "Graph name")->required();
    layout_cmd->add_option("--ratio", ratio, "d'/d for the K4 family (tetrahedron only)");
    layout_cmd->add_option("--d", spacing, "Spacing d in um for the K4 family");

    std::string phases_name;
    bool phases_wired = false;
    auto *phases_cmd = app.add_subcommand("phases", "Classical phase diagram");
    phases_cmd->add_option("name", phases_name, "Graph name")->required();
    phases_cmd->add_flag("--wired", phases_wired, "Use the wired graph");

    std::string config_path;
    std::uint64_t seed = 0;
    auto *evolve_cmd = app.add_subcommand("evolve", "Noiseless sweep; writes the final state and its distribution");
    auto *run_cmd = app.add_subcommand("run", "Full pipeline: evolve, sample, post-select, report");
    for (auto *cmd : {evolve_cmd, run_cmd}) {
        cmd->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
        cmd->add_option("--seed", seed, "Overrides the config seed");
    }

    std::string points_path;
    auto *scaling_cmd = app.add_subcommand("scaling", "N' versus N table and linear fit");
    scaling_cmd->add_option("--points", points_path, "CSV label,n,n_prime[,source]")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    }

    auto log = [&](const std::string &msg) {
        if (!quiet) {
            std::cout << msg << "\n";
        }
    };

    try {
        if (graph_cmd->parsed()) {
            const auto doc = graph_base ? to_json(platonic_graph(graph_name)) : to_json(wire_platonic(graph_name));
            if (out_flag.empty()) {
                std::cout << doc.dump(2) << "\n";
            } else {
                write_json(fs::path(out_flag) / "graph.json", doc);
                log("wrote " + (fs::path(out_flag) / "graph.json").string());
            }
        } else if (layout_cmd->parsed()) {
            const Layout layout = ratio > 0.0 ? (parse_platonic(layout_name) == PlatonicName::Tetrahedron
                                                     ? k4_family_layout(spacing, ratio)
                                                     : throw InvalidArgument("--ratio applies to the tetrahedron"))
                                              : table1_layout(layout_name);
            if (out_flag.empty()) {
                std::cout << layout_csv(layout);
            } else {
                write_text(fs::path(out_flag) / "layout.csv", layout_csv(layout));
                log("wrote " + (fs::path(out_flag) / "layout.csv").string());
            }
        } else if (phases_cmd->parsed()) {
            const fs::path out = out_flag.empty() ? default_out("phases-" + to_string(parse_platonic(phases_name)))
                                                  : fs::path(out_flag);
            phase_report(phases_name, phases_wired, out);
            log("wrote " + (out / "phases.json").string());
        } else if (evolve_cmd->parsed() || run_cmd->parsed()) {
            std::ifstream in(config_path);
            nlohmann::json doc;
            try {
                doc = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error &e) {
                throw InvalidArgument("config is not valid JSON: " + std::string(e.what()));
            }
            if (evolve_cmd->count("--seed") + run_cmd->count("--seed") > 0) {
                doc["seed"] = seed;
            }
            const ExperimentConfig config = ExperimentConfig::from_json(doc, fs::path(config_path).parent_path());
            const std::string leaf = (run_cmd->parsed() ? "run-" : "evolve-") + std::to_string(config.seed);
            const fs::path out = !out_flag.empty() ? fs::path(out_flag)
                                 : config.output  ? *config.output
                                                  : default_out(leaf);
            if (run_cmd->parsed()) {
                const RunResult r = run_experiment(config, out);
                log("MIS probability " + std::to_string(r.mis.value) + " +/- " + std::to_string(r.mis.error) +
                    " from " + std::to_string(r.postselected.total_count()) + " kept events; wrote " + out.string());
            } else {
                ExperimentConfig pure = config;
                pure.noise = NoiseModel{};
                const Model model = build_model(pure);
                std::optional<StateVector> state;
                const EvolutionOutcome evo = run_evolution(pure, model, &state);
                fs::create_directories(out);
                std::ofstream bin(out / "state.bin", std::ios::binary);
                state->save(bin);
                write_json(out / "schedule.json", to_json(model.schedule));
                write_json(out / "distribution.json",
                           Distribution::from_probabilities(model.graph.num_atoms(), evo.probabilities).to_json());
                log("norm error " + std::to_string(evo.norm_error) + "; wrote " + out.string());
            }
        } else if (scaling_cmd->parsed()) {
            const auto points = points_path.empty() ? builtin_scaling_points() : read_scaling_csv(points_path);
            const fs::path out = out_flag.empty() ? default_out("scaling") : fs::path(out_flag);
            const LinearFit fit = scaling_report(points, out);
            log("slope " + std::to_string(fit.slope) + ", intercept " + std::to_string(fit.intercept) + "; wrote " +
                out.string());
        }
    } catch (const EmptyPostselection &e) {
        nlohmann::json rec = {{"error", e.code()},
                              {"message", e.what()},
                              {"kept_events", e.kept_events},
                              {"total_events", e.total_events}};
        std::cerr << rec.dump() << "\n";
        return 2;
    } catch (const Error &e) {
        print_error(e.code(), e.what());
        return 2;
    } catch (const std::exception &e) {
        print_error("internal", e.what());
        return 3;
    }
    return 0;
}
