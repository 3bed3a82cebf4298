#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rydwire/evolution.hpp"
#include "rydwire/graphs.hpp"
#include "rydwire/layout.hpp"
#include "rydwire/measure.hpp"
#include "rydwire/spectrum.hpp"

namespace rydwire {

inline constexpr int kConfigSchemaVersion = 1;

enum class LayoutSource { Table1, K4Family, File, None };

/// Declarative description of one run. Parsed from a JSON document; every
/// field but `seed` has a default.
struct ExperimentConfig {
    std::string graph = "tetrahedron";        // Platonic name, ignored when graph_file is set
    std::optional<std::filesystem::path> graph_file;  // wired graph JSON
    LayoutSource layout = LayoutSource::Table1;
    double d_um = kExperimentSpacing;
    double d_ratio = 1.0;
    std::optional<std::filesystem::path> layout_file;  // layout CSV
    Coupling::Mode coupling = Coupling::Mode::Uniform;
    std::optional<SweepSchedule> schedule;  // default schedule when empty
    NoiseModel noise;
    long shots = 1000;
    std::uint64_t seed = 0;
    int trajectories = 500;  // used when dephasing is on and N exceeds the density limit
    StepControl step{0.04, Integrator::Magnus4, 1e-12};
    bool refine_step = true;
    double refine_tol = 1e-6;
    std::optional<std::filesystem::path> output;

    static ExperimentConfig from_json(const nlohmann::json &doc, const std::filesystem::path &base_dir = {});
    nlohmann::json to_json() const;
};

ExperimentConfig load_config(const std::filesystem::path &path);

/// Graph, layout (if any) and coupling resolved from a config.
struct Model {
    WiredGraph graph;
    std::optional<Layout> layout;
    PhysicalParams params;
    Coupling coupling;
    SweepSchedule schedule;
};

Model build_model(const ExperimentConfig &config);

Layout read_layout_csv(const std::filesystem::path &path, const WiredGraph &graph);

struct EvolutionOutcome {
    std::vector<double> probabilities;
    std::string method;  // "pure", "density" or "trajectories"
    StepControl step;
    double norm_error = 0.0;
};

EvolutionOutcome run_evolution(const ExperimentConfig &config, const Model &model,
                               std::optional<StateVector> *final_state = nullptr);

struct RunResult {
    Model model;
    EvolutionOutcome evolution;
    ShotSet shots;
    Distribution raw;
    Distribution postselected;
    Estimate mis;
    nlohmann::json report;
};

/// Full pipeline. Writes layout.csv, schedule.json, shots.csv,
/// raw_distribution.json, postselected_distribution.json and report.json
/// into `out_dir` when it is set.
RunResult run_experiment(const ExperimentConfig &config, const std::optional<std::filesystem::path> &out_dir);

void phase_report(std::string_view graph_name, bool wired, const std::filesystem::path &out_dir);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LinearFit fit_scaling(const std::vector<ScalingRecord> &points);
/// CSV with header label,n,n_prime[,source].
std::vector<ScalingRecord> read_scaling_csv(const std::filesystem::path &path);
std::string scaling_csv(const std::vector<ScalingRecord> &points);
LinearFit scaling_report(const std::vector<ScalingRecord> &points, const std::filesystem::path &out_dir);

void write_text(const std::filesystem::path &path, const std::string &text);
void write_json(const std::filesystem::path &path, const nlohmann::json &doc);

}  // namespace rydwire
