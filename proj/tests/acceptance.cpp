// Acceptance suite: one PASS/FAIL line per criterion, details indented above it.

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "rydwire/errors.hpp"
#include "rydwire/evolution.hpp"
#include "rydwire/experiment.hpp"
#include "rydwire/layout.hpp"
#include "rydwire/measure.hpp"
#include "rydwire/spectrum.hpp"

using namespace rydwire;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void detail(const char *fmt, ...) __attribute__((format(printf, 1, 2)));
void detail(const char *fmt, ...) {
    std::printf("    ");
    va_list ap;
    va_start(ap, fmt);
    std::vprintf(fmt, ap);
    va_end(ap);
    std::printf("\n");
    std::fflush(stdout);
}

void verdict(int id, const std::string &title, bool ok, double seconds) {
    std::printf("%s [%d] %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, title.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) {
        ++failures;
    }
}

void criterion(int id, const std::string &title, const std::function<bool()> &body) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body();
    } catch (const std::exception &e) {
        detail("exception: %s", e.what());
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    verdict(id, title, ok, dt);
}

const double kU = PhysicalParams::experiment().nearest_neighbor_u();

std::string join(const std::vector<Ratio> &rs) {
    std::string s = "{";
    for (std::size_t i = 0; i < rs.size(); ++i) {
        s += (i ? "," : "") + rs[i].to_string();
    }
    return s + "}";
}

std::string sizes(const std::vector<PhaseRegion> &rs) {
    std::string s = "{";
    for (std::size_t i = 0; i < rs.size(); ++i) {
        s += (i ? "," : "") + std::to_string(rs[i].configs.size());
    }
    return s + "}";
}

// --- independent oracles ---------------------------------------------------

Eigen::MatrixXd embed(const Eigen::Matrix2d &op, int a, int n) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(1, 1);
    for (int k = 0; k < n; ++k) {
        const Eigen::MatrixXd f = k == a ? Eigen::MatrixXd(op) : Eigen::MatrixXd::Identity(2, 2);
        out = Eigen::kroneckerProduct(out, f).eval();
    }
    return out;
}

Eigen::MatrixXd kron_hamiltonian(int n, double omega, double delta, const Eigen::MatrixXd &u) {
    Eigen::Matrix2d sx;
    sx << 0, 1, 1, 0;
    Eigen::Matrix2d nr;
    nr << 0, 0, 0, 1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(1 << n, 1 << n);
    for (int a = 0; a < n; ++a) {
        h += 0.5 * omega * embed(sx, a, n) - delta * embed(nr, a, n);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (u(i, j) != 0.0) {
                h += u(i, j) * embed(nr, i, n) * embed(nr, j, n);
            }
        }
    }
    return h;
}

// Fourth-order two-exponential Magnus stepping with full eigendecompositions
// of the Kronecker-built operator.
Eigen::VectorXcd oracle_sweep(int n, const Eigen::MatrixXd &u, const SweepSchedule &s, int steps) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(1 << n);
    psi(0) = 1.0;
    const double dt = s.tf / steps;
    const double r = std::sqrt(3.0) / 6.0;
    const double a1 = 0.25 - r;
    const double a2 = 0.25 + r;
    for (int k = 0; k < steps; ++k) {
        const auto p = s.at(k * dt + (0.5 - r) * dt);
        const auto q = s.at(k * dt + (0.5 + r) * dt);
        const Eigen::MatrixXd h1 = kron_hamiltonian(n, p.omega, p.delta, u);
        const Eigen::MatrixXd h2 = kron_hamiltonian(n, q.omega, q.delta, u);
        for (const Eigen::MatrixXd &m : {Eigen::MatrixXd(a2 * h1 + a1 * h2), Eigen::MatrixXd(a1 * h1 + a2 * h2)}) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
            const Eigen::MatrixXcd v = eig.eigenvectors().cast<cplx>();
            Eigen::VectorXcd ph(m.rows());
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                ph(i) = std::exp(cplx(0.0, -dt * eig.eigenvalues()(i)));
            }
            psi = v * ph.asDiagonal() * (v.adjoint() * psi);
        }
    }
    return psi;
}

// Exact readout channel on a probability vector: every bit flips independently.
std::vector<double> readout_channel(const std::vector<double> &p, int n, double p01, double p10) {
    std::vector<double> out(p.size(), 0.0);
    for (std::size_t s = 0; s < p.size(); ++s) {
        if (p[s] == 0.0) {
            continue;
        }
        for (std::size_t t = 0; t < p.size(); ++t) {
            double w = p[s];
            for (int b = 0; b < n; ++b) {
                const bool in = s >> b & 1;
                const bool o = t >> b & 1;
                w *= in ? (o ? 1.0 - p10 : p10) : (o ? p01 : 1.0 - p01);
            }
            out[t] += w;
        }
    }
    return out;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main() {
    std::printf("rydwire acceptance suite\n");

    criterion(1, "graph and encoding exactness", [] {
        bool ok = true;
        const std::tuple<const char *, int, std::size_t> want[] = {
            {"tetrahedron", 6, 7}, {"cube", 16, 20}, {"octahedron", 18, 24}};
        for (auto [name, atoms, edges] : want) {
            const WiredGraph wg = wire_platonic(name);
            detail("%s': %d atoms, %zu edges (want %d, %zu)", name, wg.num_atoms(), wg.all_edges().size(), atoms,
                   edges);
            ok &= wg.num_atoms() == atoms && wg.all_edges().size() == edges;
        }
        const auto mis = mis_set(wire_platonic("cube").atoms_graph());
        std::vector<std::uint64_t> idx;
        for (Basis s : mis) {
            idx.push_back(encode(SpinConfig(16, s)));
        }
        detail("MIS(Q3') indices: %s", [&] {
            std::string s;
            for (auto i : idx) {
                s += std::to_string(i) + " ";
            }
            return s;
        }().c_str());
        ok &= idx == std::vector<std::uint64_t>{26283, 39254};
        return ok;
    });

    criterion(2, "phase diagrams by brute force (exact)", [] {
        bool ok = true;
        const auto k4 = phase_diagram(platonic_graph("tetrahedron"));
        detail("K4 boundaries %s sizes %s (want {0,1,2,3}, {1,4,6,4,1})", join(boundaries(k4)).c_str(),
               sizes(k4).c_str());
        ok &= boundaries(k4) == std::vector<Ratio>{0, 1, 2, 3} && sizes(k4) == "{1,4,6,4,1}";
        const auto q3 = phase_diagram(platonic_graph("cube"));
        detail("Q3 boundaries %s sizes %s (want {0,3}, MIS sector = two Neel configs)", join(boundaries(q3)).c_str(),
               sizes(q3).c_str());
        ok &= boundaries(q3) == std::vector<Ratio>{0, 3} && q3.size() == 3 &&
              q3[1].configs == mis_set(platonic_graph("cube"));
        const auto k222 = phase_diagram(platonic_graph("octahedron"));
        detail("K222 boundaries %s sizes %s (want {0,2,3} with 3 MIS and 3 inverted-MIS)",
               join(boundaries(k222)).c_str(), sizes(k222).c_str());
        if (k222.size() >= 3) {
            detail("K222 sector (%s,%s): %zu configs with %d excitations", k222[2].lo.to_string().c_str(),
                   k222[2].hi.to_string().c_str(), k222[2].configs.size(), k222[2].excitation_count);
        }
        const bool k222_ok = boundaries(k222) == std::vector<Ratio>{0, 2, 3} && sizes(k222) == "{1,3,3,1}";
        if (!k222_ok) {
            detail("K222: the four-excitation sector (3 configs, 2 excited pairs) meets the all-up line at 4U,");
            detail("        since 2U-4D = 6U-6D  <=>  D = 2U; PM-up wins only for D > 4U (12U-6D < 2U-4D).");
        }
        return ok && k222_ok;
    });

    criterion(3, "K4' ground-state amplitudes at D=0.51U, W=0.01U (tol 0.01)", [] {
        const WiredGraph wg = wire_platonic("tetrahedron");
        const RydbergHamiltonian h(Coupling::uniform(wg.atoms_graph(), kU));
        bool ok = true;
        for (double x : {0.25, 0.51, 0.75}) {
            const auto gs = ground_state(h, 0.01 * kU, x * kU);
            const auto p = gs.state.probabilities();
            double af = 0.0, zero = 0.0;
            double af_worst = 0.0, zero_worst = 0.0;
            for (Basis s : mis_set(wg.atoms_graph())) {
                const bool wire_zero = SpinConfig(6, s).to_string().substr(0, 2) == "00";
                (wire_zero ? zero : af) = p[s];
                if (wire_zero) {
                    zero_worst = std::max(zero_worst, std::abs(p[s] - 5.0 / 32.0));
                } else {
                    af_worst = std::max(af_worst, std::abs(p[s] - 3.0 / 32.0));
                }
            }
            detail("D=%.2fU: AF-wire configs %.5f (3/32=0.09375), |00>_W configs %.5f (5/32=0.15625), residual %.1e",
                   x, af, zero, gs.residual);
            if (x == 0.51) {
                ok = af_worst <= 0.01 && zero_worst <= 0.01;
                detail("max deviation %.5f / %.5f", af_worst, zero_worst);
            }
        }
        const auto lim = small_omega_limit(h, 0.51 * kU, default_small_omegas(kU));
        const Basis af_cfg = concat_bits({"10", "0001"}).bits();
        const Basis zero_cfg = concat_bits({"00", "0101"}).bits();
        detail("W->0 extrapolation at D=0.51U: %.5f / %.5f", lim.extrapolated[af_cfg], lim.extrapolated[zero_cfg]);
        return ok;
    });

    criterion(4, "K222' small-W ground state: 9-config support, line symmetry, b^2/a^2 vs 41/20 (15%)", [] {
        const WiredGraph wg = wire_platonic("octahedron");
        const RydbergHamiltonian h(Coupling::uniform(wg.atoms_graph(), kU));
        const auto mis = mis_set(wg.atoms_graph());
        auto analyse = [&](const std::vector<double> &p, double &ratio, double &support, double &line_dev) {
            support = 0.0;
            double a2 = 0.0, b2 = 0.0;
            std::array<double, 3> lines{};
            for (Basis s : mis) {
                support += p[s];
                const Basis base = s & 0x3F;
                const int line = base == 9 ? 0 : base == 18 ? 1 : 2;
                lines[line] += p[s];
                bool has_1001 = false;
                for (std::size_t w = 0; w < 3; ++w) {
                    has_1001 |= wire_bits(wg, w, s) == 0b1001;
                }
                (has_1001 ? b2 : a2) += p[s];
            }
            ratio = (b2 / 3.0) / (a2 / 6.0);
            line_dev = 0.0;
            for (double l : lines) {
                line_dev = std::max(line_dev, std::abs(l / support - 1.0 / 3.0));
            }
        };
        const auto lim = small_omega_limit(h, 0.51 * kU, default_small_omegas(kU));
        double ratio = 0, support = 0, line_dev = 0;
        analyse(lim.extrapolated, ratio, support, line_dev);
        std::size_t nonzero = 0;
        for (Basis s : mis) {
            nonzero += lim.extrapolated[s] > 1e-3;
        }
        detail("D=0.51U, W->0: weight on the 9 configs %.6f (%zu of 9 populated), max line deviation %.2e", support,
               nonzero, line_dev);
        detail("D=0.51U, W->0: b^2/a^2 = %.4f vs 2.05 (%.1f%% off)", ratio, 100.0 * (ratio / 2.05 - 1.0));
        for (double x : {0.15, 0.25, 0.75}) {
            const auto gs = ground_state(h, 0.01 * kU, x * kU);
            double r = 0, sup = 0, ld = 0;
            analyse(gs.state.probabilities(), r, sup, ld);
            detail("D=%.2fU, W=0.01U: b^2/a^2 = %.4f, support %.4f", x, r, sup);
        }
        return support >= 0.99 && nonzero == 9 && line_dev <= 0.01 && std::abs(ratio / 2.05 - 1.0) <= 0.15;
    });

    criterion(5, "noiseless sweeps: post-selected MIS weight >= 0.9 and orbit symmetry within 2%", [] {
        bool ok = true;
        for (auto name : {PlatonicName::Tetrahedron, PlatonicName::Cube, PlatonicName::Octahedron}) {
            const WiredGraph wg = wire_platonic(name);
            const RydbergHamiltonian h(Coupling::uniform(wg.atoms_graph(), kU));
            const auto r = evolve_pure_refined(StateVector::basis_state(wg.num_atoms(), 0), default_schedule(name), h,
                                               {0.04, Integrator::Magnus4});
            double kept = 0.0;
            const auto d = project_wires_af(r.state, wg, &kept);
            const auto mis = mis_probability(d, wg.base());
            std::vector<double> orbit;
            for (Basis s : mis_set(wg.base())) {
                orbit.push_back(d.probability(s));
            }
            const double mean = std::accumulate(orbit.begin(), orbit.end(), 0.0) / orbit.size();
            double spread = 0.0;
            for (double p : orbit) {
                spread = std::max(spread, std::abs(p / mean - 1.0));
            }
            detail("%s': dt=%.3f us (change %.1e), norm err %.1e, AF weight %.4f, MIS %.4f, orbit spread %.2e",
                   to_string(name).c_str(), r.step.dt, r.infidelity_change, std::abs(r.state.norm() - 1.0), kept,
                   mis.value, spread);
            ok &= mis.value >= 0.9 && spread <= 0.02;
        }
        return ok;
    });

    criterion(6, "noisy K4' bracket contains 0.33; density vs 5000 trajectories TV <= 0.02", [] {
        const WiredGraph wg = wire_platonic("tetrahedron");
        const auto params = PhysicalParams::experiment();
        const RydbergHamiltonian h(Coupling::physical(table1_layout("tetrahedron"), params.c6));
        const auto s = default_schedule("tetrahedron");
        const StepControl step{0.02, Integrator::Magnus4};
        double lo = 1.0, hi = 0.0;
        for (double g : {0.0, 0.025, 0.05, 0.075, 0.1}) {
            NoiseModel n;
            n.dephasing_rate = angular_mhz(g);
            const auto rho = evolve_density(pure_density(StateVector::basis_state(6, 0)), s, n, h, step);
            std::vector<double> p(64);
            for (int i = 0; i < 64; ++i) {
                p[i] = rho(i, i).real();
            }
            const double clean = mis_probability(project_wires_af(p, wg), wg.base()).value;
            const auto read = readout_channel(p, 6, 0.12, 0.09);
            double kept = 0.0;
            const double noisy = mis_probability(project_wires_af(read, wg, &kept), wg.base()).value;
            detail("gamma=2pi*%.3f MHz: MIS %.4f without readout errors, %.4f with (kept fraction %.3f)", g, clean,
                   noisy, kept);
            lo = std::min(lo, noisy);
            hi = std::max(hi, noisy);
        }
        detail("bracket [%.4f, %.4f] vs 0.33 (a bracket check, not a fit to unpublished noise)", lo, hi);
        {
            const RydbergHamiltonian hu(Coupling::uniform(wg.atoms_graph(), kU));
            for (double g : {0.0, 0.1}) {
                NoiseModel n;
                n.dephasing_rate = angular_mhz(g);
                const auto rho = evolve_density(pure_density(StateVector::basis_state(6, 0)), s, n, hu, step);
                std::vector<double> p(64);
                for (int i = 0; i < 64; ++i) {
                    p[i] = rho(i, i).real();
                }
                const auto read = readout_channel(p, 6, 0.12, 0.09);
                detail("uniform coupling, gamma=2pi*%.3f MHz: MIS %.4f with readout errors (informational)", g,
                       mis_probability(project_wires_af(read, wg), wg.base()).value);
            }
        }

        NoiseModel n;
        n.dephasing_rate = angular_mhz(0.1);
        const auto rho = evolve_density(pure_density(StateVector::basis_state(6, 0)), s, n, h, step);
        const auto ens = evolve_trajectories(StateVector::basis_state(6, 0), s, n, h, 5000, 20240607, step);
        const auto mean = mean_populations(ens);
        double tv = 0.0;
        for (int i = 0; i < 64; ++i) {
            tv += std::abs(mean[i] - rho(i, i).real());
        }
        tv *= 0.5;
        detail("gamma=2pi*0.1 MHz: TV(density, trajectories) = %.4f", tv);
        return lo <= 0.33 && 0.33 <= hi && tv <= 0.02;
    });

    criterion(7, "scaling formulas: M(25) ~ 100, M(80) ~ 2e5 within x2; p = exp(-0.6/16)", [] {
        const double p = survival(0.6, 16.0);
        bool ok = p >= 0.96 && p <= 0.97;
        detail("p = %.4f", p);
        for (auto [np, want] : {std::pair{25, 100.0}, std::pair{80, 2.0e5}}) {
            const double pg = rearrangement_probability(p, np);
            const auto r = required_shots(0.12, 0.09, np, pg);
            detail("N'=%d: P_r=P_g=%.4f, P_g'=%.3e, P_others=%.3e, M=%.4g (want ~%.0f, ratio %.2f)", np, pg,
                   r.p_g_prime, r.p_others, r.shots, want, r.shots / want);
            ok &= r.shots >= want / 2.0 && r.shots <= want * 2.0;
        }
        return ok;
    });

    criterion(8, "oracle equivalence for N <= 10 (operator, eigenpairs, propagation)", [] {
        struct Case {
            std::string name;
            Graph graph;
            Eigen::MatrixXd u;
        };
        std::vector<Case> cases;
        for (auto name : {PlatonicName::Tetrahedron, PlatonicName::Cube, PlatonicName::Octahedron}) {
            const Graph g = platonic_graph(name);
            cases.push_back({to_string(name), g, Coupling::uniform(g, kU).matrix()});
        }
        const WiredGraph k4w = wire_platonic("tetrahedron");
        cases.push_back({"tetrahedron' uniform", k4w.atoms_graph(), Coupling::uniform(k4w.atoms_graph(), kU).matrix()});
        cases.push_back({"tetrahedron' physical", k4w.atoms_graph(),
                         pairwise_couplings(table1_layout("tetrahedron"), PhysicalParams::experiment().c6)});
        bool ok = true;
        const auto sched = default_schedule("tetrahedron");
        for (const auto &c : cases) {
            const int n = c.graph.num_vertices();
            const RydbergHamiltonian h(Coupling::physical(c.u));
            const double om = 0.74 * kTwoPi;
            const double de = 0.51 * kU;
            const Eigen::MatrixXd dense = kron_hamiltonian(n, om, de, c.u);
            // Matrix-free action on every basis vector.
            double op_err = 0.0;
            std::vector<double> e(h.dimension()), he(h.dimension());
            for (std::size_t s = 0; s < h.dimension(); ++s) {
                std::fill(e.begin(), e.end(), 0.0);
                e[s] = 1.0;
                h.apply(om, de, e, he);
                for (std::size_t t = 0; t < h.dimension(); ++t) {
                    op_err = std::max(op_err, std::abs(he[t] - dense(t, s)));
                }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
            const auto gs = ground_state(h, om, de);
            const double e_err = std::abs(gs.energy - eig.eigenvalues()(0));
            Eigen::Map<const Eigen::VectorXcd> v(gs.state.amplitudes().data(), dense.rows());
            const double vec_err = 1.0 - std::norm(eig.eigenvectors().col(0).cast<cplx>().dot(v));
            // Gap check: the eigenvector comparison is meaningful only for a non-degenerate ground state.
            const double gap = eig.eigenvalues()(1) - eig.eigenvalues()(0);
            const Eigen::VectorXcd oracle = oracle_sweep(n, c.u, sched, 200);
            double worst_fid = 2.0;
            for (auto prop : {Propagator::Dense, Propagator::Krylov}) {
                StepControl st{0.02, Integrator::Magnus4};
                st.propagator = prop;
                const auto psi = evolve_pure(StateVector::basis_state(n, 0), sched, h, st);
                Eigen::Map<const Eigen::VectorXcd> w(psi.amplitudes().data(), oracle.size());
                worst_fid = std::min(worst_fid, std::norm(oracle.dot(w)));
            }
            detail("%-22s op %.1e, E %.1e, 1-|<v|v>|^2 %.1e (gap %.2f), propagation |1-F| %.1e", c.name.c_str(),
                   op_err, e_err, std::abs(vec_err), gap, std::abs(1.0 - worst_fid));
            ok &= op_err <= 1e-10 && e_err <= 1e-8 && (gap < 1e-6 || vec_err <= 1e-8) && std::abs(1.0 - worst_fid) <= 1e-8;
        }
        return ok;
    });

    criterion(9, "determinism: identical (config, seed) give byte-identical files", [] {
        const nlohmann::json doc = {{"schema_version", 1},
                                    {"seed", 927},
                                    {"graph", "tetrahedron"},
                                    {"coupling", "physical"},
                                    {"noise", {{"dephasing_rate_mhz", 0.05}, {"p01", 0.12}, {"p10", 0.09}}},
                                    {"shots", 927},
                                    {"step", {{"dt_us", 0.02}, {"integrator", "magnus4"}, {"refine", false}}}};
        const fs::path root = fs::temp_directory_path() / "rydwire_acceptance_determinism";
        fs::remove_all(root);
        run_experiment(ExperimentConfig::from_json(doc), root / "a");
        run_experiment(ExperimentConfig::from_json(doc), root / "b");
        bool ok = true;
        int files = 0;
        for (const auto &entry : fs::directory_iterator(root / "a")) {
            const bool same = slurp(entry.path()) == slurp(root / "b" / entry.path().filename());
            ok &= same;
            ++files;
            if (!same) {
                detail("%s differs", entry.path().filename().c_str());
            }
        }
        detail("%d files compared", files);
        return ok && files >= 6;
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
