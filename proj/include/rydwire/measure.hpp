#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rydwire/evolution.hpp"
#include "rydwire/graphs.hpp"
#include "rydwire/hamiltonian.hpp"

namespace rydwire {

struct ShotSource {
    std::string state_hash;  // FNV-1a of the sampled probabilities, hex
    std::uint64_t seed = 0;
    std::string noise = "none";
};

struct ShotSet {
    int num_atoms = 0;
    std::vector<Basis> shots;
    ShotSource source;

    std::size_t size() const { return shots.size(); }
};

ShotSet sample_shots(const StateVector &state, long m, std::uint64_t seed);
ShotSet sample_shots(const DensityOperator &rho, int num_atoms, long m, std::uint64_t seed);
/// Born-rule sampling from explicit configuration probabilities.
ShotSet sample_shots(std::span<const double> probabilities, int num_atoms, long m, std::uint64_t seed);

ShotSet apply_detection_errors(const ShotSet &shots, double p01, double p10, std::uint64_t seed);

/// `bits` holds the wire in chain order, first atom in the highest bit.
bool af_condition(Basis bits, int wire_length);

/// Sparse distribution over `num_bits`-bit configurations. `total_count` is
/// the number of events behind it (0 for exact distributions).
class Distribution {
  public:
    Distribution() = default;
    Distribution(int num_bits, std::map<Basis, double> probabilities, long total_count = 0,
                 std::map<Basis, long> counts = {});

    static Distribution from_counts(int num_bits, const std::map<Basis, long> &counts);
    static Distribution from_probabilities(int num_bits, std::span<const double> probabilities);

    int num_bits() const { return num_bits_; }
    long total_count() const { return total_count_; }
    const std::map<Basis, double> &probabilities() const { return probs_; }
    const std::map<Basis, long> &counts() const { return counts_; }

    double probability(Basis config) const;
    long count(Basis config) const;
    /// sqrt(p(1-p)/M); zero for exact distributions.
    double stderr_of(Basis config) const;
    double total() const;

    /// Events seen before post-selection, when this came out of one.
    long raw_events = 0;

    nlohmann::json to_json() const;

  private:
    int num_bits_ = 0;
    std::map<Basis, double> probs_;
    std::map<Basis, long> counts_;
    long total_count_ = 0;
};

Distribution distribution_from_shots(const ShotSet &shots);

nlohmann::json to_json(const Distribution &dist);
std::string shots_csv(const ShotSet &shots);

/// Wire bits of wire `w` inside a full N'-atom configuration.
Basis wire_bits(const WiredGraph &wg, std::size_t w, Basis config);
/// Base-vertex part of a full configuration (vertices are the last atoms).
Basis base_bits(const WiredGraph &wg, Basis config);
bool all_wires_af(const WiredGraph &wg, Basis config);

Distribution postselect_af(const ShotSet &shots, const WiredGraph &wg);
Distribution postselect_af(const Distribution &dist, const WiredGraph &wg);

/// Exact post-selection on amplitudes. `af_weight` receives the surviving probability.
Distribution project_wires_af(const StateVector &state, const WiredGraph &wg, double *af_weight = nullptr);
Distribution project_wires_af(std::span<const double> probabilities, const WiredGraph &wg,
                              double *af_weight = nullptr);

struct Estimate {
    double value = 0.0;
    double error = 0.0;  // binomial standard error
};

Estimate mis_probability(const Distribution &dist, const Graph &graph);

double survival(double t, double t0);
double rearrangement_probability(double p_single, int n_prime);

struct ShotRequirement {
    double p_g_prime = 0.0;
    double p_others = 0.0;
    double shots = 0.0;
};

/// M such that |P_g' - P_others| equals one binomial standard error of P_g'.
ShotRequirement required_shots(double p01, double p10, int n_prime, double p_g);

}  // namespace rydwire
