#include "rydwire/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rydwire/errors.hpp"
#include "rydwire/rng.hpp"

namespace rydwire {

namespace fs = std::filesystem;

namespace {

// Sub-stream indices under the run seed.
constexpr std::uint64_t kShotStream = 0;
constexpr std::uint64_t kDetectionStream = 1;
constexpr std::uint64_t kTrajectoryStream = 2;

std::string read_file(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidArgument("cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path resolve(const fs::path &base, const std::string &p) {
    fs::path path(p);
    if (path.is_relative() && !base.empty()) {
        path = base / path;
    }
    if (!fs::exists(path)) {
        throw InvalidArgument("referenced file '" + path.string() + "' does not exist");
    }
    return path;
}

const char *integrator_name(Integrator i) { return i == Integrator::Magnus4 ? "magnus4" : "midpoint"; }

Integrator parse_integrator(const std::string &s) {
    if (s == "magnus4") {
        return Integrator::Magnus4;
    }
    if (s == "midpoint") {
        return Integrator::ExponentialMidpoint;
    }
    throw InvalidArgument("unknown integrator '" + s + "'");
}

const char *layout_name(LayoutSource s) {
    switch (s) {
        case LayoutSource::Table1: return "table1";
        case LayoutSource::K4Family: return "k4_family";
        case LayoutSource::File: return "file";
        case LayoutSource::None: break;
    }
    return "none";
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json &doc, const fs::path &base_dir) {
    static const std::set<std::string> known = {"schema_version", "seed",   "graph", "graph_file", "layout",
                                                "coupling",       "schedule", "noise", "shots",      "trajectories",
                                                "step",           "output"};
    if (!doc.is_object()) {
        throw InvalidArgument("config must be a JSON object");
    }
    for (const auto &[key, value] : doc.items()) {
        if (!known.contains(key)) {
            throw InvalidArgument("unknown config key '" + key + "'");
        }
    }
    try {
        const int version = doc.value("schema_version", kConfigSchemaVersion);
        if (version != kConfigSchemaVersion) {
            throw InvalidArgument("unsupported schema_version " + std::to_string(version));
        }
        if (!doc.contains("seed")) {
            throw InvalidArgument("config must set a seed");
        }
        ExperimentConfig c;
        c.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("graph_file")) {
            c.graph_file = resolve(base_dir, doc.at("graph_file").get<std::string>());
        } else {
            c.graph = to_string(parse_platonic(doc.value("graph", c.graph)));
        }

        if (doc.contains("layout")) {
            const auto &l = doc.at("layout");
            const std::string src = l.is_string() ? l.get<std::string>() : l.value("source", "table1");
            if (src == "table1") {
                c.layout = LayoutSource::Table1;
            } else if (src == "k4_family") {
                c.layout = LayoutSource::K4Family;
            } else if (src == "file") {
                c.layout = LayoutSource::File;
                c.layout_file = resolve(base_dir, l.at("path").get<std::string>());
            } else if (src == "none") {
                c.layout = LayoutSource::None;
            } else {
                throw InvalidArgument("unknown layout source '" + src + "'");
            }
            if (l.is_object()) {
                c.d_um = l.value("d_um", c.d_um);
                c.d_ratio = l.value("d_ratio", c.d_ratio);
            }
        } else if (c.graph_file) {
            c.layout = LayoutSource::None;
        }

        const auto coupling = doc.value("coupling", std::string("uniform"));
        if (coupling == "uniform") {
            c.coupling = Coupling::Mode::Uniform;
        } else if (coupling == "physical") {
            c.coupling = Coupling::Mode::Physical;
        } else {
            throw InvalidArgument("unknown coupling mode '" + coupling + "'");
        }
        if (c.coupling == Coupling::Mode::Physical && c.layout == LayoutSource::None) {
            throw InvalidArgument("physical coupling needs a layout");
        }

        if (doc.contains("schedule") && !(doc.at("schedule").is_string() && doc.at("schedule") == "default")) {
            c.schedule = schedule_from_json(doc.at("schedule"));
        }
        if (doc.contains("noise")) {
            c.noise = noise_from_json(doc.at("noise"));
        }
        c.shots = doc.value("shots", c.shots);
        if (c.shots < 1) {
            throw InvalidArgument("shots must be at least 1");
        }
        c.trajectories = doc.value("trajectories", c.trajectories);
        if (doc.contains("step")) {
            const auto &s = doc.at("step");
            c.step.dt = s.value("dt_us", c.step.dt);
            c.step.integrator = parse_integrator(s.value("integrator", std::string(integrator_name(c.step.integrator))));
            c.refine_step = s.value("refine", c.refine_step);
            c.refine_tol = s.value("tol", c.refine_tol);
            if (!(c.step.dt > 0.0)) {
                throw InvalidArgument("dt_us must be positive");
            }
        }
        if (doc.contains("output")) {
            c.output = doc.at("output").get<std::string>();
        }
        return c;
    } catch (const nlohmann::json::exception &e) {
        throw InvalidArgument(std::string("malformed config: ") + e.what());
    }
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["schema_version"] = kConfigSchemaVersion;
    j["seed"] = seed;
    if (graph_file) {
        j["graph_file"] = graph_file->string();
    } else {
        j["graph"] = graph;
    }
    nlohmann::json l = {{"source", layout_name(layout)}};
    if (layout == LayoutSource::K4Family) {
        l["d_um"] = d_um;
        l["d_ratio"] = d_ratio;
    }
    if (layout_file) {
        l["path"] = layout_file->string();
    }
    j["layout"] = l;
    j["coupling"] = rydwire::to_string(coupling);
    j["schedule"] = schedule ? rydwire::to_json(*schedule) : nlohmann::json("default");
    j["noise"] = rydwire::to_json(noise);
    j["shots"] = shots;
    j["trajectories"] = trajectories;
    j["step"] = {{"dt_us", step.dt},
                 {"integrator", integrator_name(step.integrator)},
                 {"refine", refine_step},
                 {"tol", refine_tol}};
    if (output) {
        j["output"] = output->string();
    }
    return j;
}

ExperimentConfig load_config(const fs::path &path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error &e) {
        throw InvalidArgument("config is not valid JSON: " + std::string(e.what()));
    }
    return ExperimentConfig::from_json(doc, path.parent_path());
}

Layout read_layout_csv(const fs::path &path, const WiredGraph &graph) {
    std::istringstream in(read_file(path));
    std::string line;
    std::getline(in, line);
    if (line.rfind("atom_id,", 0) != 0) {
        throw InvalidArgument("layout CSV must start with the atom_id,role,x_um,y_um header");
    }
    std::vector<Point> pts(graph.num_atoms());
    std::vector<bool> seen(graph.num_atoms(), false);
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cols;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) {
            cols.push_back(cell);
        }
        if (cols.size() != 4) {
            throw InvalidArgument("layout CSV row needs 4 columns: '" + line + "'");
        }
        const int id = std::stoi(cols[0]);
        if (id < 0 || id >= graph.num_atoms() || seen[id]) {
            throw InvalidArgument("bad or repeated atom id " + cols[0]);
        }
        seen[id] = true;
        pts[id] = {std::stod(cols[2]), std::stod(cols[3])};
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw DimensionMismatch("layout CSV does not place every atom");
    }
    return Layout(graph, std::move(pts));
}

Model build_model(const ExperimentConfig &config) {
    const PhysicalParams params = PhysicalParams::experiment();
    WiredGraph graph = config.graph_file ? wired_graph_from_json(nlohmann::json::parse(read_file(*config.graph_file)))
                                         : wire_platonic(config.graph);
    std::optional<Layout> layout;
    switch (config.layout) {
        case LayoutSource::Table1:
            if (config.graph_file) {
                throw InvalidArgument("tabulated layouts exist only for the built-in graphs");
            }
            layout = table1_layout(config.graph);
            break;
        case LayoutSource::K4Family:
            if (config.graph_file || parse_platonic(config.graph) != PlatonicName::Tetrahedron) {
                throw InvalidArgument("k4_family layouts apply to the tetrahedron only");
            }
            layout = k4_family_layout(config.d_um, config.d_ratio);
            break;
        case LayoutSource::File:
            layout = read_layout_csv(*config.layout_file, graph);
            break;
        case LayoutSource::None:
            break;
    }
    Coupling coupling = config.coupling == Coupling::Mode::Physical
                            ? Coupling::physical(*layout, params.c6)
                            : Coupling::uniform(graph.atoms_graph(), params.nearest_neighbor_u());
    SweepSchedule schedule;
    if (config.schedule) {
        schedule = *config.schedule;
    } else if (config.graph_file) {
        schedule = default_schedule(graph.base().name());
    } else {
        schedule = default_schedule(config.graph);
    }
    return Model{std::move(graph), std::move(layout), params, std::move(coupling), schedule};
}

EvolutionOutcome run_evolution(const ExperimentConfig &config, const Model &model,
                               std::optional<StateVector> *final_state) {
    const RydbergHamiltonian h(model.coupling);
    const int n = model.graph.num_atoms();
    const StateVector initial = StateVector::basis_state(n, 0);
    EvolutionOutcome out;
    out.step = config.step;

    std::optional<StateVector> pure;
    if (config.refine_step) {
        auto r = evolve_pure_refined(initial, model.schedule, h, config.step, config.refine_tol);
        out.step = r.step;
        pure = std::move(r.state);
    } else if (config.noise.dephasing_rate == 0.0) {
        pure = evolve_pure(initial, model.schedule, h, config.step);
    }

    if (config.noise.dephasing_rate == 0.0) {
        out.method = "pure";
        out.probabilities = pure->probabilities();
        out.norm_error = std::abs(pure->norm() - 1.0);
    } else if (n <= kMaxDensityAtoms) {
        out.method = "density";
        const auto rho = evolve_density(pure_density(initial), model.schedule, config.noise, h, out.step);
        out.probabilities.resize(rho.rows());
        for (Eigen::Index s = 0; s < rho.rows(); ++s) {
            out.probabilities[s] = rho(s, s).real();
        }
        out.norm_error = std::abs(rho.trace().real() - 1.0);
    } else {
        out.method = "trajectories";
        const auto ensemble = evolve_trajectories(initial, model.schedule, config.noise, h, config.trajectories,
                                                  derive_seed(config.seed, kTrajectoryStream), out.step);
        out.probabilities = mean_populations(ensemble);
        double worst = 0.0;
        for (const auto &psi : ensemble) {
            worst = std::max(worst, std::abs(psi.norm() - 1.0));
        }
        out.norm_error = worst;
    }
    if (final_state != nullptr) {
        *final_state = std::move(pure);
    }
    return out;
}

void write_text(const fs::path &path, const std::string &text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InvalidArgument("cannot write '" + path.string() + "'");
    }
    out << text;
}

void write_json(const fs::path &path, const nlohmann::json &doc) { write_text(path, doc.dump(2) + "\n"); }

RunResult run_experiment(const ExperimentConfig &config, const std::optional<fs::path> &out_dir) {
    Model model = build_model(config);
    EvolutionOutcome evo = run_evolution(config, model);

    ShotSet shots = sample_shots(evo.probabilities, model.graph.num_atoms(), config.shots,
                                 derive_seed(config.seed, kShotStream));
    if (config.noise.p01 > 0.0 || config.noise.p10 > 0.0) {
        shots = apply_detection_errors(shots, config.noise.p01, config.noise.p10,
                                       derive_seed(config.seed, kDetectionStream));
    }
    Distribution raw = distribution_from_shots(shots);
    Distribution post = postselect_af(shots, model.graph);
    const Estimate mis = mis_probability(post, model.graph.base());

    nlohmann::json report;
    report["schema_version"] = kConfigSchemaVersion;
    report["graph"] = model.graph.name();
    report["num_atoms"] = model.graph.num_atoms();
    report["seed"] = config.seed;
    report["config"] = config.to_json();
    report["parameters"] = {
        {"c6_mhz_um6", quoted_mhz(model.params.c6)},
        {"omega0_mhz", quoted_mhz(model.schedule.omega0)},
        {"delta_i_mhz", quoted_mhz(model.schedule.delta_i)},
        {"delta_f_mhz", quoted_mhz(model.schedule.delta_f)},
        {"tf_us", model.schedule.tf},
        {"coupling", rydwire::to_string(model.coupling.mode())},
        {"nearest_neighbor_u_mhz", quoted_mhz(model.params.nearest_neighbor_u())},
        {"gamma_mhz", quoted_mhz(config.noise.dephasing_rate)},
        {"dephasing_mode", config.noise.mode == DephasingMode::Collective ? "collective" : "per_atom"},
        {"p01", config.noise.p01},
        {"p10", config.noise.p10},
        {"dt_us", model.schedule.tf / evo.step.steps_for(model.schedule.tf)},
        {"integrator", integrator_name(evo.step.integrator)},
    };
    report["evolution"] = {{"method", evo.method}, {"norm_error", evo.norm_error}};
    if (evo.method == "trajectories") {
        report["evolution"]["trajectories"] = config.trajectories;
    }
    report["shots"] = config.shots;
    report["state_hash"] = shots.source.state_hash;
    report["postselection"] = {
        {"kept_events", post.total_count()},
        {"total_events", post.raw_events},
        {"kept_fraction", static_cast<double>(post.total_count()) / static_cast<double>(post.raw_events)}};
    report["mis_probability"] = {{"value", mis.value}, {"stderr", mis.error}};
    if (config.noise.dephasing_rate > 0.0) {
        report["notes"] = {"dephasing rate is a tunable placeholder, not a calibrated value"};
    }

    if (out_dir) {
        if (model.layout) {
            write_text(*out_dir / "layout.csv", layout_csv(*model.layout));
        }
        write_json(*out_dir / "schedule.json", to_json(model.schedule));
        write_text(*out_dir / "shots.csv", shots_csv(shots));
        write_json(*out_dir / "raw_distribution.json", raw.to_json());
        write_json(*out_dir / "postselected_distribution.json", post.to_json());
        write_json(*out_dir / "report.json", report);
    }
    return RunResult{std::move(model), std::move(evo), std::move(shots), std::move(raw),
                     std::move(post), mis,            std::move(report)};
}

void phase_report(std::string_view graph_name, bool wired, const fs::path &out_dir) {
    const Graph g = wired ? wire_platonic(graph_name).atoms_graph() : platonic_graph(graph_name);
    const auto regions = phase_diagram(g);
    write_json(out_dir / "phases.json", phase_json(regions, g.num_vertices()));
    write_text(out_dir / "phases.csv", phase_csv(regions, g.num_vertices()));
}

LinearFit fit_scaling(const std::vector<ScalingRecord> &points) {
    std::set<int> distinct;
    for (const auto &p : points) {
        distinct.insert(p.n);
    }
    if (distinct.size() < 2) {
        throw InvalidArgument("scaling fit needs at least two distinct N");
    }
    const double m = static_cast<double>(points.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto &p : points) {
        sx += p.n;
        sy += p.n_prime;
        sxx += static_cast<double>(p.n) * p.n;
        sxy += static_cast<double>(p.n) * p.n_prime;
    }
    LinearFit f;
    f.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / m;
    return f;
}

std::vector<ScalingRecord> read_scaling_csv(const fs::path &path) {
    std::istringstream in(read_file(path));
    std::string line;
    std::getline(in, line);
    if (line.rfind("label,n,n_prime", 0) != 0) {
        throw InvalidArgument("scaling CSV must start with the label,n,n_prime header");
    }
    std::vector<ScalingRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cols;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) {
            cols.push_back(cell);
        }
        if (cols.size() < 3) {
            throw InvalidArgument("scaling CSV row needs label,n,n_prime: '" + line + "'");
        }
        out.push_back(scaling_point(std::stoi(cols[1]), std::stoi(cols[2]), cols[0],
                                    cols.size() > 3 ? cols[3] : std::string("user")));
    }
    return out;
}

std::string scaling_csv(const std::vector<ScalingRecord> &points) {
    std::string out = "label,n,n_prime,source\n";
    for (const auto &p : points) {
        out += p.label + "," + std::to_string(p.n) + "," + std::to_string(p.n_prime) + "," + p.source + "\n";
    }
    return out;
}

LinearFit scaling_report(const std::vector<ScalingRecord> &points, const fs::path &out_dir) {
    const LinearFit fit = fit_scaling(points);
    write_text(out_dir / "scaling.csv", scaling_csv(points));
    auto rows = nlohmann::json::array();
    for (const auto &p : points) {
        rows.push_back({{"label", p.label}, {"n", p.n}, {"n_prime", p.n_prime}, {"source", p.source}});
    }
    write_json(out_dir / "scaling.json", {{"points", rows}, {"slope", fit.slope}, {"intercept", fit.intercept}});
    return fit;
}

}  // namespace rydwire
