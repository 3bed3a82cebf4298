#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rydwire/graphs.hpp"
#include "rydwire/hamiltonian.hpp"

namespace rydwire {

inline constexpr int kMaxBruteForceAtoms = 24;

/// Exact rational number with positive denominator, used for phase boundaries
/// expressed in units of U.
struct Ratio {
    long long num = 0;
    long long den = 1;

    Ratio() = default;
    Ratio(long long n, long long d = 1);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string to_string() const;

    friend bool operator==(const Ratio &a, const Ratio &b) { return a.num * b.den == b.num * a.den; }
    friend bool operator<(const Ratio &a, const Ratio &b) { return a.num * b.den < b.num * a.den; }
    friend bool operator<=(const Ratio &a, const Ratio &b) { return !(b < a); }
};

/// Argmin of the Ω = 0 energy -Δk + U·(#excited edges), every tie included.
std::vector<Basis> classical_ground_configs(const Graph &graph, double delta, double u);

/// A Δ interval (in units of U) over which the classical ground set is constant.
struct PhaseRegion {
    Ratio lo;
    Ratio hi;
    int excitation_count = 0;
    int excited_pairs = 0;
    std::vector<Basis> configs;
};

/// Classical phase diagram over Δ/U in (lo, hi). Boundaries are exact ties
/// between the lower envelope of the lines E_k(Δ) = -kΔ + U·m_k, where m_k
/// is the fewest excited edges among k-excitation configurations.
std::vector<PhaseRegion> phase_diagram(const Graph &graph, Ratio lo = Ratio(-1), Ratio hi = Ratio(5));

std::vector<Ratio> boundaries(const std::vector<PhaseRegion> &regions);

nlohmann::json phase_json(const std::vector<PhaseRegion> &regions, int num_atoms);
std::string phase_csv(const std::vector<PhaseRegion> &regions, int num_atoms);

/// All maximum independent sets, as configuration words.
std::vector<Basis> mis_set(const Graph &graph);
bool is_independent(const Graph &graph, Basis config);

enum class ReferenceName { MisK4, MisQ3, MisK222, MisK4Wired, MisQ3Wired, MisK222Wired };

ReferenceName parse_reference(std::string_view name);
std::string to_string(ReferenceName name);
/// Closed-form MIS superpositions of the base and wired graphs.
StateVector reference_state(ReferenceName name);

struct EigenOptions {
    double tol = 1e-9;       // residual ||Hψ - Eψ|| in angular MHz
    int max_basis = 80;      // Krylov basis size before a thick restart
    int keep = 16;           // Ritz vectors retained at restart
    long max_matvecs = 400000;
};

struct Eigenpair {
    double energy = 0.0;
    StateVector state;
    double residual = 0.0;
    long matvecs = 0;
};

/// Lowest eigenpair by thick-restart Lanczos with full reorthogonalization.
/// Starts from the vector (-1)^popcount(s)/sqrt(2^N), which overlaps the
/// ground state of every operator of this family.
Eigenpair ground_state(const RydbergHamiltonian &h, double omega, double delta, const EigenOptions &options = {});
Eigenpair ground_state(const HamiltonianParams &params, const EigenOptions &options = {});

/// Ground-state probabilities at a sequence of small Ω and their polynomial
/// extrapolation in Ω^2 to Ω -> 0+.
struct SmallOmegaLimit {
    std::vector<double> omegas;
    std::vector<std::vector<double>> probabilities;
    std::vector<double> extrapolated;
};

std::vector<double> default_small_omegas(double u);
SmallOmegaLimit small_omega_limit(const RydbergHamiltonian &h, double delta, std::span<const double> omegas,
                                  const EigenOptions &options = {});

}  // namespace rydwire
