#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "rydwire/graphs.hpp"
#include "rydwire/hamiltonian.hpp"

namespace rydwire {

/// Three-stage quasi-adiabatic ramp: Ω rises 0 -> Ω0 on [0, t1] at Δ_i,
/// Δ sweeps Δ_i -> Δ_f on [t1, t2] at Ω0, Ω falls to 0 on [t2, tf] at Δ_f.
/// Times in μs, frequencies in angular MHz.
struct SweepSchedule {
    double t1 = 0.0;
    double t2 = 0.0;
    double tf = 0.0;
    double omega0 = 0.0;
    double delta_i = 0.0;
    double delta_f = 0.0;

    struct Value {
        double omega;
        double delta;
    };

    void validate() const;
    Value at(double t) const;
};

SweepSchedule::Value schedule_value(const SweepSchedule &schedule, double t);

/// tf = 4 μs, t1 = tf/10, t2 = tf - t1, Ω0 = 2π·0.74 MHz, Δ_i = -2π·3 MHz,
/// Δ_f = 2π·2 MHz (tetrahedron) or 2π·3 MHz (cube, octahedron).
SweepSchedule default_schedule(PlatonicName name);
SweepSchedule default_schedule(std::string_view name);

nlohmann::json to_json(const SweepSchedule &schedule);
SweepSchedule schedule_from_json(const nlohmann::json &doc);

enum class DephasingMode { Collective, PerAtom };

/// Laser-phase dephasing (Lindblad L = sqrt(γ)·Σn_i, or sqrt(γ)·n_i per atom)
/// plus classical readout flips, which are applied to shots, not states.
struct NoiseModel {
    double dephasing_rate = 0.0;  // γ, angular MHz
    DephasingMode mode = DephasingMode::Collective;
    double p01 = 0.0;  // ground read as Rydberg
    double p10 = 0.0;  // Rydberg read as ground

    void validate() const;
    /// γ = 2π·0.05 MHz (a placeholder, not a measured value) with the
    /// reported detection errors p01 = 0.12, p10 = 0.09.
    static NoiseModel experiment();
};

nlohmann::json to_json(const NoiseModel &noise);
NoiseModel noise_from_json(const nlohmann::json &doc);

enum class Integrator {
    ExponentialMidpoint,  // exp(-i H(t + dt/2) dt), second order
    Magnus4,              // two-exponential commutator-free Magnus, fourth order
};

/// Auto uses dense eigendecompositions up to 8 atoms and Lanczos beyond.
enum class Propagator { Auto, Dense, Krylov };

struct StepControl {
    double dt = 1e-3;  // μs
    Integrator integrator = Integrator::ExponentialMidpoint;
    double krylov_tol = 1e-12;
    Propagator propagator = Propagator::Auto;

    /// Number of steps actually taken over [0, tf]; dt is shrunk so they tile it.
    int steps_for(double tf) const;
};

StateVector evolve_pure(const StateVector &initial, const SweepSchedule &schedule, const RydbergHamiltonian &h,
                        const StepControl &step = {});

/// Halves dt (starting from `start.dt`) until halving again changes the final
/// state by at most `tol` in infidelity. Returns the finer of the last pair.
struct RefinedEvolution {
    StateVector state;
    StepControl step;
    double infidelity_change = 0.0;
    int halvings = 0;
};

RefinedEvolution evolve_pure_refined(const StateVector &initial, const SweepSchedule &schedule,
                                     const RydbergHamiltonian &h, StepControl start, double tol = 1e-6,
                                     int max_halvings = 8);

using DensityOperator = Eigen::MatrixXcd;

inline constexpr int kMaxDensityAtoms = 10;

DensityOperator pure_density(const StateVector &state);

/// Lindblad evolution; Strang splitting of the (exactly integrable) dephasing
/// around the unitary step, so every step is a CPTP map.
DensityOperator evolve_density(const DensityOperator &initial, const SweepSchedule &schedule, const NoiseModel &noise,
                               const RydbergHamiltonian &h, const StepControl &step = {});

/// Unravelling of the same generator by random phase kicks φ ~ N(0, γ·dt/2)
/// coupled to Σn_i (or to each n_i), using the same splitting as
/// evolve_density so ensemble averages converge to it. Trajectory r draws
/// from its own stream derived from (seed, r).
std::vector<StateVector> evolve_trajectories(const StateVector &initial, const SweepSchedule &schedule,
                                             const NoiseModel &noise, const RydbergHamiltonian &h, int n_traj,
                                             std::uint64_t seed, const StepControl &step = {});

/// Ensemble-averaged configuration probabilities.
std::vector<double> mean_populations(const std::vector<StateVector> &ensemble);

}  // namespace rydwire
