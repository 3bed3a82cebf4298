#include "rydwire/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "rydwire/errors.hpp"
#include "rydwire/layout.hpp"
#include "rydwire/rng.hpp"

namespace rydwire {

void SweepSchedule::validate() const {
    if (!(0.0 < t1 && t1 < t2 && t2 < tf)) {
        throw InvalidArgument("schedule needs 0 < t1 < t2 < tf");
    }
    if (omega0 < 0.0) {
        throw InvalidArgument("peak Rabi frequency must be non-negative");
    }
}

SweepSchedule::Value SweepSchedule::at(double t) const {
    if (!(t >= 0.0 && t <= tf)) {
        throw InvalidArgument("time " + std::to_string(t) + " outside [0, tf]");
    }
    if (t <= t1) {
        return {omega0 * t / t1, delta_i};
    }
    if (t <= t2) {
        const double f = (t - t1) / (t2 - t1);
        return {omega0, delta_i + (delta_f - delta_i) * f};
    }
    return {omega0 * (tf - t) / (tf - t2), delta_f};
}

SweepSchedule::Value schedule_value(const SweepSchedule &schedule, double t) { return schedule.at(t); }

SweepSchedule default_schedule(PlatonicName name) {
    SweepSchedule s;
    s.tf = 4.0;
    s.t1 = s.tf / 10.0;
    s.t2 = s.tf - s.t1;
    s.omega0 = angular_mhz(kExperimentOmega0Quoted);
    s.delta_i = angular_mhz(-3.0);
    s.delta_f = angular_mhz(name == PlatonicName::Tetrahedron ? 2.0 : 3.0);
    return s;
}

SweepSchedule default_schedule(std::string_view name) { return default_schedule(parse_platonic(name)); }

nlohmann::json to_json(const SweepSchedule &s) {
    return {{"t1_us", s.t1},
            {"t2_us", s.t2},
            {"tf_us", s.tf},
            {"omega0_mhz", quoted_mhz(s.omega0)},
            {"delta_i_mhz", quoted_mhz(s.delta_i)},
            {"delta_f_mhz", quoted_mhz(s.delta_f)}};
}

SweepSchedule schedule_from_json(const nlohmann::json &doc) {
    try {
        SweepSchedule s;
        s.t1 = doc.at("t1_us").get<double>();
        s.t2 = doc.at("t2_us").get<double>();
        s.tf = doc.at("tf_us").get<double>();
        s.omega0 = angular_mhz(doc.at("omega0_mhz").get<double>());
        s.delta_i = angular_mhz(doc.at("delta_i_mhz").get<double>());
        s.delta_f = angular_mhz(doc.at("delta_f_mhz").get<double>());
        s.validate();
        return s;
    } catch (const nlohmann::json::exception &e) {
        throw InvalidArgument(std::string("malformed schedule: ") + e.what());
    }
}

void NoiseModel::validate() const {
    if (!(dephasing_rate >= 0.0)) {
        throw InvalidArgument("dephasing rate must be non-negative");
    }
    if (!(p01 >= 0.0 && p01 <= 1.0 && p10 >= 0.0 && p10 <= 1.0)) {
        throw InvalidArgument("detection error probabilities must lie in [0, 1]");
    }
}

NoiseModel NoiseModel::experiment() {
    NoiseModel n;
    n.dephasing_rate = angular_mhz(0.05);
    n.p01 = 0.12;
    n.p10 = 0.09;
    return n;
}

nlohmann::json to_json(const NoiseModel &n) {
    return {{"dephasing_rate_mhz", quoted_mhz(n.dephasing_rate)},
            {"dephasing_mode", n.mode == DephasingMode::Collective ? "collective" : "per_atom"},
            {"p01", n.p01},
            {"p10", n.p10}};
}

NoiseModel noise_from_json(const nlohmann::json &doc) {
    NoiseModel n;
    n.dephasing_rate = angular_mhz(doc.value("dephasing_rate_mhz", 0.0));
    const auto mode = doc.value("dephasing_mode", std::string("collective"));
    if (mode == "collective") {
        n.mode = DephasingMode::Collective;
    } else if (mode == "per_atom") {
        n.mode = DephasingMode::PerAtom;
    } else {
        throw InvalidArgument("unknown dephasing mode '" + mode + "'");
    }
    n.p01 = doc.value("p01", 0.0);
    n.p10 = doc.value("p10", 0.0);
    n.validate();
    return n;
}

int StepControl::steps_for(double tf) const {
    if (!(dt > 0.0)) {
        throw InvalidArgument("time step must be positive");
    }
    return std::max(1, static_cast<int>(std::ceil(tf / dt - 1e-9)));
}

// ---------------------------------------------------------------------------

namespace {

// One factor exp(-i·tau·H(omega, delta)) of a step.
struct Stage {
    double tau;
    double omega;
    double delta;
};

std::vector<Stage> step_stages(const SweepSchedule &s, double t, double dt, Integrator integrator) {
    if (integrator == Integrator::ExponentialMidpoint) {
        const auto v = s.at(t + 0.5 * dt);
        return {{dt, v.omega, v.delta}};
    }
    // exp(-i dt (a1 H1 + a2 H2)) exp(-i dt (a2 H1 + a1 H2)) with Gauss nodes;
    // a1 + a2 = 1/2, so each factor is exp(-i (dt/2) H(Ω', Δ')).
    const double r3 = std::sqrt(3.0);
    const double a1 = (3.0 - 2.0 * r3) / 12.0;
    const double a2 = (3.0 + 2.0 * r3) / 12.0;
    const auto h1 = s.at(t + (0.5 - r3 / 6.0) * dt);
    const auto h2 = s.at(t + (0.5 + r3 / 6.0) * dt);
    Stage first{0.5 * dt, 2.0 * (a2 * h1.omega + a1 * h2.omega), 2.0 * (a2 * h1.delta + a1 * h2.delta)};
    Stage second{0.5 * dt, 2.0 * (a1 * h1.omega + a2 * h2.omega), 2.0 * (a1 * h1.delta + a2 * h2.delta)};
    return {first, second};
}

// Dense route for small Hilbert spaces: H = Q Λ Q^T.
constexpr std::size_t kDenseDimension = 256;

struct DenseStage {
    Eigen::MatrixXd q;
    Eigen::VectorXcd phases;

    DenseStage(const RydbergHamiltonian &h, const Stage &st) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h.dense(st.omega, st.delta));
        q = eig.eigenvectors();
        phases.resize(q.rows());
        for (Eigen::Index i = 0; i < q.rows(); ++i) {
            phases(i) = std::exp(cplx(0.0, -st.tau * eig.eigenvalues()(i)));
        }
    }

    Eigen::MatrixXcd unitary() const {
        return q.cast<cplx>() * phases.asDiagonal() * q.transpose().cast<cplx>();
    }

    template <class Mat>
    void apply(Mat &states) const {
        Eigen::MatrixXcd tmp = q.transpose().cast<cplx>() * states;
        tmp = phases.asDiagonal() * tmp;
        states = q.cast<cplx>() * tmp;
    }
};

// exp(-i tau H) psi by Lanczos; splits tau if the Krylov space does not converge.
class KrylovExp {
  public:
    explicit KrylovExp(double tol) : tol_(tol) {}

    void apply(const RydbergHamiltonian &h, const Stage &st, std::vector<cplx> &psi) {
        apply_split(h, st.omega, st.delta, st.tau, psi, 0);
    }

  private:
    static constexpr int kMaxKrylov = 30;

    void apply_split(const RydbergHamiltonian &h, double omega, double delta, double tau, std::vector<cplx> &psi,
                     int depth) {
        if (!try_apply(h, omega, delta, tau, psi)) {
            if (depth > 20) {
                throw NonConvergence("Krylov exponential failed to converge");
            }
            apply_split(h, omega, delta, 0.5 * tau, psi, depth + 1);
            apply_split(h, omega, delta, 0.5 * tau, psi, depth + 1);
        }
    }

    bool try_apply(const RydbergHamiltonian &h, double omega, double delta, double tau, std::vector<cplx> &psi) {
        const std::size_t dim = psi.size();
        double norm0 = 0.0;
        for (const auto &a : psi) {
            norm0 += std::norm(a);
        }
        norm0 = std::sqrt(norm0);
        if (norm0 == 0.0) {
            return true;
        }
        if (basis_.size() < kMaxKrylov + 1) {
            basis_.resize(kMaxKrylov + 1);
        }
        w_.resize(dim);
        basis_[0].resize(dim);
        for (std::size_t s = 0; s < dim; ++s) {
            basis_[0][s] = psi[s] / norm0;
        }
        std::vector<double> alpha;
        std::vector<double> beta;
        const int max_m = static_cast<int>(std::min<std::size_t>(kMaxKrylov, dim));
        for (int j = 0; j < max_m; ++j) {
            h.apply(omega, delta, std::span<const cplx>(basis_[j]), std::span<cplx>(w_));
            double a = 0.0;
            for (std::size_t s = 0; s < dim; ++s) {
                a += std::real(std::conj(basis_[j][s]) * w_[s]);
            }
            for (std::size_t s = 0; s < dim; ++s) {
                w_[s] -= a * basis_[j][s];
            }
            if (j > 0) {
                for (std::size_t s = 0; s < dim; ++s) {
                    w_[s] -= beta[j - 1] * basis_[j - 1][s];
                }
            }
            // One pass of full reorthogonalization keeps short Krylov spaces clean.
            for (int i = 0; i <= j; ++i) {
                cplx c{};
                for (std::size_t s = 0; s < dim; ++s) {
                    c += std::conj(basis_[i][s]) * w_[s];
                }
                for (std::size_t s = 0; s < dim; ++s) {
                    w_[s] -= c * basis_[i][s];
                }
            }
            alpha.push_back(a);
            double b = 0.0;
            for (const auto &x : w_) {
                b += std::norm(x);
            }
            b = std::sqrt(b);

            const int m = j + 1;
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) {
                t(i, i) = alpha[i];
                if (i + 1 < m) {
                    t(i, i + 1) = t(i + 1, i) = beta[i];
                }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
            Eigen::VectorXcd c(m);
            for (int i = 0; i < m; ++i) {
                c(i) = std::exp(cplx(0.0, -tau * eig.eigenvalues()(i))) * eig.eigenvectors()(0, i);
            }
            Eigen::VectorXcd coeff = eig.eigenvectors().cast<cplx>() * c;
            const bool exhausted = b <= 1e-14 * std::max(1.0, std::abs(a)) || m == static_cast<int>(dim);
            const double err = b * std::abs(coeff(m - 1)) * std::abs(tau);
            if (exhausted || (m >= 3 && err <= tol_)) {
                std::fill(psi.begin(), psi.end(), cplx{});
                for (int i = 0; i < m; ++i) {
                    const cplx ci = norm0 * coeff(i);
                    for (std::size_t s = 0; s < dim; ++s) {
                        psi[s] += ci * basis_[i][s];
                    }
                }
                return true;
            }
            beta.push_back(b);
            basis_[j + 1].resize(dim);
            for (std::size_t s = 0; s < dim; ++s) {
                basis_[j + 1][s] = w_[s] / b;
            }
        }
        return false;
    }

    double tol_;
    std::vector<std::vector<cplx>> basis_;
    std::vector<cplx> w_;
};

bool use_dense(const RydbergHamiltonian &h, Propagator p) {
    if (p == Propagator::Auto) {
        return h.dimension() <= kDenseDimension;
    }
    if (p == Propagator::Dense && h.num_atoms() > kMaxDenseAtoms) {
        throw TooLarge("dense propagation limited to " + std::to_string(kMaxDenseAtoms) + " atoms");
    }
    return p == Propagator::Dense;
}

void check_initial(const StateVector &initial, const RydbergHamiltonian &h) {
    if (initial.num_atoms() != h.num_atoms()) {
        throw DimensionMismatch("initial state and Hamiltonian disagree on atom count");
    }
    if (std::abs(initial.norm() - 1.0) > 1e-8) {
        throw NotNormalized("initial state is not normalized");
    }
}

// Dephasing exponent f(s, t): ρ_st decays as exp(-γ τ f / 2).
double dephasing_distance(const RydbergHamiltonian &h, DephasingMode mode, Basis s, Basis t) {
    if (mode == DephasingMode::Collective) {
        const double d = static_cast<double>(h.excitations(s)) - static_cast<double>(h.excitations(t));
        return d * d;
    }
    return static_cast<double>(std::popcount(s ^ t));
}

}  // namespace

StateVector evolve_pure(const StateVector &initial, const SweepSchedule &schedule, const RydbergHamiltonian &h,
                        const StepControl &step) {
    schedule.validate();
    check_initial(initial, h);
    const int n = step.steps_for(schedule.tf);
    const double dt = schedule.tf / n;
    if (use_dense(h, step.propagator)) {
        Eigen::VectorXcd psi = Eigen::Map<const Eigen::VectorXcd>(initial.amplitudes().data(),
                                                                  static_cast<Eigen::Index>(initial.dimension()));
        for (int k = 0; k < n; ++k) {
            for (const auto &st : step_stages(schedule, k * dt, dt, step.integrator)) {
                DenseStage(h, st).apply(psi);
            }
        }
        return StateVector(initial.num_atoms(), std::vector<cplx>(psi.data(), psi.data() + psi.size()));
    }
    std::vector<cplx> psi = initial.amplitudes();
    KrylovExp expm(step.krylov_tol);
    for (int k = 0; k < n; ++k) {
        for (const auto &st : step_stages(schedule, k * dt, dt, step.integrator)) {
            expm.apply(h, st, psi);
        }
    }
    return StateVector(initial.num_atoms(), std::move(psi));
}

RefinedEvolution evolve_pure_refined(const StateVector &initial, const SweepSchedule &schedule,
                                     const RydbergHamiltonian &h, StepControl start, double tol, int max_halvings) {
    StateVector coarse = evolve_pure(initial, schedule, h, start);
    for (int k = 1; k <= max_halvings; ++k) {
        StepControl fine = start;
        fine.dt = start.dt / 2.0;
        StateVector next = evolve_pure(initial, schedule, h, fine);
        const double change = 1.0 - coarse.fidelity(next);
        if (change <= tol) {
            return {std::move(next), fine, change, k};
        }
        coarse = std::move(next);
        start = fine;
    }
    throw NonConvergence("time step refinement did not reach tolerance " + std::to_string(tol));
}

DensityOperator pure_density(const StateVector &state) {
    Eigen::Map<const Eigen::VectorXcd> v(state.amplitudes().data(), static_cast<Eigen::Index>(state.dimension()));
    return v * v.adjoint();
}

DensityOperator evolve_density(const DensityOperator &initial, const SweepSchedule &schedule, const NoiseModel &noise,
                               const RydbergHamiltonian &h, const StepControl &step) {
    schedule.validate();
    noise.validate();
    if (h.num_atoms() > kMaxDensityAtoms) {
        throw TooLarge("density-operator evolution limited to " + std::to_string(kMaxDensityAtoms) + " atoms");
    }
    const auto dim = static_cast<Eigen::Index>(h.dimension());
    if (initial.rows() != dim || initial.cols() != dim) {
        throw DimensionMismatch("density operator dimension does not match the Hamiltonian");
    }
    const int n = step.steps_for(schedule.tf);
    const double dt = schedule.tf / n;

    Eigen::MatrixXd half_decay = Eigen::MatrixXd::Ones(dim, dim);
    if (noise.dephasing_rate > 0.0) {
        for (Eigen::Index s = 0; s < dim; ++s) {
            for (Eigen::Index t = 0; t < dim; ++t) {
                const double f = dephasing_distance(h, noise.mode, static_cast<Basis>(s), static_cast<Basis>(t));
                half_decay(s, t) = std::exp(-0.5 * noise.dephasing_rate * f * (0.5 * dt));
            }
        }
    }
    DensityOperator rho = initial;
    for (int k = 0; k < n; ++k) {
        rho = rho.cwiseProduct(half_decay.cast<cplx>());
        for (const auto &st : step_stages(schedule, k * dt, dt, step.integrator)) {
            const Eigen::MatrixXcd u = DenseStage(h, st).unitary();
            rho = u * rho * u.adjoint();
        }
        rho = rho.cwiseProduct(half_decay.cast<cplx>());
    }
    return rho;
}

std::vector<StateVector> evolve_trajectories(const StateVector &initial, const SweepSchedule &schedule,
                                             const NoiseModel &noise, const RydbergHamiltonian &h, int n_traj,
                                             std::uint64_t seed, const StepControl &step) {
    schedule.validate();
    noise.validate();
    check_initial(initial, h);
    if (n_traj < 1) {
        throw InvalidArgument("need at least one trajectory");
    }
    const int n = step.steps_for(schedule.tf);
    const double dt = schedule.tf / n;
    const std::size_t dim = h.dimension();
    const int atoms = h.num_atoms();
    const double sigma = std::sqrt(noise.dephasing_rate * 0.5 * dt);
    const bool noisy = noise.dephasing_rate > 0.0;

    // Each trajectory owns its engine and its normal distribution, which caches a spare variate.
    struct Stream {
        std::mt19937_64 rng;
        std::normal_distribution<double> gauss{0.0, 1.0};
    };
    std::vector<Stream> streams;
    streams.reserve(n_traj);
    for (int r = 0; r < n_traj; ++r) {
        streams.push_back({std::mt19937_64(derive_seed(seed, static_cast<std::uint64_t>(r)))});
    }
    std::vector<double> kicks(atoms);
    std::vector<cplx> by_count(atoms + 1);

    // Multiplies one trajectory by exp(-i Σ φ_i n_i) for freshly drawn φ.
    auto kick = [&](Stream &st, cplx *amps) {
        if (!noisy) {
            return;
        }
        if (noise.mode == DephasingMode::Collective) {
            const double phi = sigma * st.gauss(st.rng);
            for (int k = 0; k <= atoms; ++k) {
                by_count[k] = std::exp(cplx(0.0, -phi * k));
            }
            for (std::size_t s = 0; s < dim; ++s) {
                amps[s] *= by_count[h.excitations(static_cast<Basis>(s))];
            }
        } else {
            for (int a = 0; a < atoms; ++a) {
                kicks[a] = sigma * st.gauss(st.rng);
            }
            for (std::size_t s = 0; s < dim; ++s) {
                double phase = 0.0;
                for (int a = 0; a < atoms; ++a) {
                    if (s & atom_bit(a, atoms)) {
                        phase += kicks[a];
                    }
                }
                amps[s] *= std::exp(cplx(0.0, -phase));
            }
        }
    };

    std::vector<StateVector> out;
    out.reserve(n_traj);
    if (use_dense(h, step.propagator)) {
        // All trajectories advance in lockstep and share each step's propagator.
        Eigen::MatrixXcd states(static_cast<Eigen::Index>(dim), n_traj);
        for (int r = 0; r < n_traj; ++r) {
            for (std::size_t s = 0; s < dim; ++s) {
                states(static_cast<Eigen::Index>(s), r) = initial[s];
            }
        }
        for (int k = 0; k < n; ++k) {
            for (int r = 0; r < n_traj; ++r) {
                kick(streams[r], states.col(r).data());
            }
            for (const auto &st : step_stages(schedule, k * dt, dt, step.integrator)) {
                // Column by column so a trajectory's rounding does not depend on the ensemble size.
                const Eigen::MatrixXcd u = DenseStage(h, st).unitary();
                for (int r = 0; r < n_traj; ++r) {
                    const Eigen::VectorXcd v = u * states.col(r);
                    states.col(r) = v;
                }
            }
            for (int r = 0; r < n_traj; ++r) {
                kick(streams[r], states.col(r).data());
            }
        }
        for (int r = 0; r < n_traj; ++r) {
            out.emplace_back(atoms, std::vector<cplx>(states.col(r).data(), states.col(r).data() + dim));
        }
        return out;
    }
    KrylovExp expm(step.krylov_tol);
    for (int r = 0; r < n_traj; ++r) {
        std::vector<cplx> psi = initial.amplitudes();
        for (int k = 0; k < n; ++k) {
            kick(streams[r], psi.data());
            for (const auto &st : step_stages(schedule, k * dt, dt, step.integrator)) {
                expm.apply(h, st, psi);
            }
            kick(streams[r], psi.data());
        }
        out.emplace_back(atoms, std::move(psi));
    }
    return out;
}

std::vector<double> mean_populations(const std::vector<StateVector> &ensemble) {
    if (ensemble.empty()) {
        throw InvalidArgument("empty ensemble");
    }
    std::vector<double> p(ensemble.front().dimension(), 0.0);
    for (const auto &psi : ensemble) {
        for (std::size_t s = 0; s < p.size(); ++s) {
            p[s] += std::norm(psi[s]);
        }
    }
    for (auto &x : p) {
        x /= static_cast<double>(ensemble.size());
    }
    return p;
}

}  // namespace rydwire
