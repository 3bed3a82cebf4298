#include "rydwire/measure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "rydwire/errors.hpp"
#include "rydwire/rng.hpp"
#include "rydwire/spectrum.hpp"

namespace rydwire {

namespace {

std::string fnv1a_hex(std::span<const double> values) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double v : values) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int k = 0; k < 8; ++k) {
            h ^= (bits >> (8 * k)) & 0xFF;
            h *= 0x100000001b3ULL;
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string bitstring(Basis config, int num_bits) {
    std::string s(num_bits, '0');
    for (int k = 0; k < num_bits; ++k) {
        if (config & (Basis{1} << (num_bits - 1 - k))) {
            s[k] = '1';
        }
    }
    return s;
}

void check_probability(double p, const char *what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument(std::string(what) + " must lie in [0, 1]");
    }
}

}  // namespace

ShotSet sample_shots(std::span<const double> probabilities, int num_atoms, long m, std::uint64_t seed) {
    if (m < 1) {
        throw InvalidArgument("need at least one shot");
    }
    if (probabilities.size() != (std::size_t{1} << num_atoms)) {
        throw DimensionMismatch("probability vector is not 2^N long");
    }
    std::vector<double> cumulative(probabilities.size());
    double acc = 0.0;
    for (std::size_t s = 0; s < probabilities.size(); ++s) {
        if (probabilities[s] < -1e-12) {
            throw NotNormalized("negative probability in sampled distribution");
        }
        acc += std::max(probabilities[s], 0.0);
        cumulative[s] = acc;
    }
    if (std::abs(acc - 1.0) > 1e-8) {
        throw NotNormalized("sampled distribution sums to " + std::to_string(acc));
    }
    ShotSet out;
    out.num_atoms = num_atoms;
    out.source.state_hash = fnv1a_hex(probabilities);
    out.source.seed = seed;
    out.shots.resize(static_cast<std::size_t>(m));
    for (long i = 0; i < m; ++i) {
        ShotStream rng(seed, static_cast<std::uint64_t>(i));
        const double u = rng.uniform() * acc;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) {
            --it;
        }
        // Never land on a zero-probability configuration through round-off.
        while (it != cumulative.begin() && probabilities[it - cumulative.begin()] <= 0.0) {
            --it;
        }
        out.shots[i] = static_cast<Basis>(it - cumulative.begin());
    }
    return out;
}

ShotSet sample_shots(const StateVector &state, long m, std::uint64_t seed) {
    const auto p = state.probabilities();
    return sample_shots(p, state.num_atoms(), m, seed);
}

ShotSet sample_shots(const DensityOperator &rho, int num_atoms, long m, std::uint64_t seed) {
    if (rho.rows() != rho.cols() || static_cast<std::size_t>(rho.rows()) != (std::size_t{1} << num_atoms)) {
        throw DimensionMismatch("density operator is not 2^N square");
    }
    std::vector<double> p(rho.rows());
    for (Eigen::Index s = 0; s < rho.rows(); ++s) {
        p[s] = rho(s, s).real();
    }
    return sample_shots(p, num_atoms, m, seed);
}

ShotSet apply_detection_errors(const ShotSet &shots, double p01, double p10, std::uint64_t seed) {
    check_probability(p01, "p01");
    check_probability(p10, "p10");
    ShotSet out = shots;
    std::ostringstream noise;
    noise << "detection p01=" << p01 << " p10=" << p10 << " seed=" << seed;
    out.source.noise = noise.str();
    const int n = shots.num_atoms;
    for (std::size_t i = 0; i < out.shots.size(); ++i) {
        ShotStream rng(seed, i);
        Basis c = out.shots[i];
        for (int a = 0; a < n; ++a) {
            const Basis bit = atom_bit(a, n);
            const double u = rng.uniform();
            if (c & bit) {
                if (u < p10) {
                    c &= ~bit;
                }
            } else if (u < p01) {
                c |= bit;
            }
        }
        out.shots[i] = c;
    }
    return out;
}

bool af_condition(Basis bits, int wire_length) {
    if (wire_length < 2 || wire_length % 2 != 0) {
        throw InvalidArgument("wire length must be even and positive");
    }
    if ((bits >> wire_length) != 0) {
        throw InvalidArgument("wire bits exceed wire length");
    }
    return std::popcount(bits) == wire_length / 2 && (bits & (bits >> 1)) == 0;
}

// ---------------------------------------------------------------------------

Distribution::Distribution(int num_bits, std::map<Basis, double> probabilities, long total_count,
                           std::map<Basis, long> counts)
    : num_bits_(num_bits), probs_(std::move(probabilities)), counts_(std::move(counts)), total_count_(total_count) {
    if (num_bits < 1 || num_bits > kMaxAtoms) {
        throw InvalidArgument("distribution bit width out of range");
    }
    double sum = 0.0;
    for (auto it = probs_.begin(); it != probs_.end();) {
        if (it->second < 0.0 || (it->first >> num_bits) != 0) {
            throw InvalidArgument("invalid distribution entry");
        }
        if (it->second == 0.0) {
            it = probs_.erase(it);
        } else {
            sum += it->second;
            ++it;
        }
    }
    if (sum <= 0.0) {
        throw NotNormalized("distribution has no weight");
    }
    for (auto &[c, p] : probs_) {
        p /= sum;
    }
}

Distribution Distribution::from_counts(int num_bits, const std::map<Basis, long> &counts) {
    long total = 0;
    std::map<Basis, double> probs;
    for (auto [c, k] : counts) {
        total += k;
    }
    if (total <= 0) {
        throw NotNormalized("no events to build a distribution from");
    }
    for (auto [c, k] : counts) {
        probs[c] = static_cast<double>(k) / static_cast<double>(total);
    }
    return Distribution(num_bits, std::move(probs), total, counts);
}

Distribution Distribution::from_probabilities(int num_bits, std::span<const double> probabilities) {
    if (probabilities.size() != (std::size_t{1} << num_bits)) {
        throw DimensionMismatch("probability vector is not 2^N long");
    }
    std::map<Basis, double> probs;
    for (std::size_t s = 0; s < probabilities.size(); ++s) {
        if (probabilities[s] > 0.0) {
            probs.emplace_hint(probs.end(), static_cast<Basis>(s), probabilities[s]);
        }
    }
    return Distribution(num_bits, std::move(probs));
}

double Distribution::probability(Basis config) const {
    auto it = probs_.find(config);
    return it == probs_.end() ? 0.0 : it->second;
}

long Distribution::count(Basis config) const {
    auto it = counts_.find(config);
    return it == counts_.end() ? 0 : it->second;
}

double Distribution::stderr_of(Basis config) const {
    if (total_count_ <= 0) {
        return 0.0;
    }
    const double p = probability(config);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(total_count_));
}

double Distribution::total() const {
    double s = 0.0;
    for (auto [c, p] : probs_) {
        s += p;
    }
    return s;
}

nlohmann::json Distribution::to_json() const {
    auto arr = nlohmann::json::array();
    for (auto [c, p] : probs_) {
        arr.push_back({{"index", c + 1},
                       {"bitstring", bitstring(c, num_bits_)},
                       {"probability", p},
                       {"stderr", stderr_of(c)},
                       {"count", count(c)}});
    }
    return arr;
}

nlohmann::json to_json(const Distribution &dist) { return dist.to_json(); }

Distribution distribution_from_shots(const ShotSet &shots) {
    std::map<Basis, long> counts;
    for (Basis c : shots.shots) {
        ++counts[c];
    }
    return Distribution::from_counts(shots.num_atoms, counts);
}

std::string shots_csv(const ShotSet &shots) {
    std::string out = "shot_index,bitstring\n";
    for (std::size_t i = 0; i < shots.shots.size(); ++i) {
        out += std::to_string(i) + "," + bitstring(shots.shots[i], shots.num_atoms) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------

Basis wire_bits(const WiredGraph &wg, std::size_t w, Basis config) {
    const auto &wire = wg.wires().at(w);
    const int n = wg.num_atoms();
    const int len = wire.length();
    Basis bits = 0;
    for (int k = 0; k < len; ++k) {
        if (config & atom_bit(wire.atoms[k], n)) {
            bits |= Basis{1} << (len - 1 - k);
        }
    }
    return bits;
}

Basis base_bits(const WiredGraph &wg, Basis config) {
    return config & ((Basis{1} << wg.base().num_vertices()) - 1);
}

bool all_wires_af(const WiredGraph &wg, Basis config) {
    for (std::size_t w = 0; w < wg.wires().size(); ++w) {
        if (!af_condition(wire_bits(wg, w, config), wg.wires()[w].length())) {
            return false;
        }
    }
    return true;
}

namespace {

Distribution postselect_counts(const std::map<Basis, long> &counts, long total, const WiredGraph &wg) {
    std::map<Basis, long> kept;
    long kept_events = 0;
    for (auto [c, k] : counts) {
        if (all_wires_af(wg, c)) {
            kept[base_bits(wg, c)] += k;
            kept_events += k;
        }
    }
    if (kept_events == 0) {
        throw EmptyPostselection(0, static_cast<unsigned long long>(total));
    }
    auto d = Distribution::from_counts(wg.base().num_vertices(), kept);
    d.raw_events = total;
    return d;
}

}  // namespace

Distribution postselect_af(const ShotSet &shots, const WiredGraph &wg) {
    if (shots.num_atoms != wg.num_atoms()) {
        throw DimensionMismatch("shots have " + std::to_string(shots.num_atoms) + " atoms, wired graph has " +
                                std::to_string(wg.num_atoms()));
    }
    std::map<Basis, long> counts;
    for (Basis c : shots.shots) {
        ++counts[c];
    }
    return postselect_counts(counts, static_cast<long>(shots.size()), wg);
}

Distribution postselect_af(const Distribution &dist, const WiredGraph &wg) {
    if (dist.num_bits() != wg.num_atoms()) {
        throw DimensionMismatch("distribution width does not match the wired graph");
    }
    if (dist.total_count() > 0) {
        return postselect_counts(dist.counts(), dist.total_count(), wg);
    }
    std::map<Basis, double> kept;
    double weight = 0.0;
    for (auto [c, p] : dist.probabilities()) {
        if (all_wires_af(wg, c)) {
            kept[base_bits(wg, c)] += p;
            weight += p;
        }
    }
    if (weight <= 0.0) {
        throw EmptyPostselection(0, 0);
    }
    return Distribution(wg.base().num_vertices(), std::move(kept));
}

Distribution project_wires_af(std::span<const double> probabilities, const WiredGraph &wg, double *af_weight) {
    if (probabilities.size() != (std::size_t{1} << wg.num_atoms())) {
        throw DimensionMismatch("state dimension does not match the wired graph");
    }
    std::map<Basis, double> kept;
    double weight = 0.0;
    for (std::size_t s = 0; s < probabilities.size(); ++s) {
        if (probabilities[s] > 0.0 && all_wires_af(wg, static_cast<Basis>(s))) {
            kept[base_bits(wg, static_cast<Basis>(s))] += probabilities[s];
            weight += probabilities[s];
        }
    }
    if (af_weight != nullptr) {
        *af_weight = weight;
    }
    if (weight <= 0.0) {
        throw EmptyPostselection(0, 0);
    }
    return Distribution(wg.base().num_vertices(), std::move(kept));
}

Distribution project_wires_af(const StateVector &state, const WiredGraph &wg, double *af_weight) {
    if (std::abs(state.norm() - 1.0) > 1e-8) {
        throw NotNormalized("state is not normalized");
    }
    const auto p = state.probabilities();
    return project_wires_af(p, wg, af_weight);
}

Estimate mis_probability(const Distribution &dist, const Graph &graph) {
    if (dist.num_bits() != graph.num_vertices()) {
        throw DimensionMismatch("distribution width does not match the graph");
    }
    Estimate e;
    for (Basis c : mis_set(graph)) {
        e.value += dist.probability(c);
    }
    if (dist.total_count() > 0) {
        e.error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(dist.total_count()));
    }
    return e;
}

double survival(double t, double t0) {
    if (!(t >= 0.0 && t0 > 0.0)) {
        throw InvalidArgument("survival needs t >= 0 and t0 > 0");
    }
    return std::exp(-t / t0);
}

double rearrangement_probability(double p_single, int n_prime) {
    check_probability(p_single, "single-atom probability");
    if (n_prime < 0) {
        throw InvalidArgument("atom count must be non-negative");
    }
    return std::pow(p_single, n_prime);
}

ShotRequirement required_shots(double p01, double p10, int n_prime, double p_g) {
    check_probability(p01, "p01");
    check_probability(p10, "p10");
    check_probability(p_g, "P_g");
    if (n_prime < 1) {
        throw InvalidArgument("atom count must be positive");
    }
    const double half = 0.5 * n_prime;
    ShotRequirement r;
    r.p_g_prime = std::pow(1.0 - p01, half) * std::pow(1.0 - p10, half) * p_g;
    r.p_others = p01 * std::pow(1.0 - p01, half - 1.0) * std::pow(1.0 - p10, half) * p_g;
    const double gap = r.p_g_prime - r.p_others;
    if (!(std::abs(gap) > 0.0)) {
        throw InvalidArgument("P_g' equals P_others; no finite shot count separates them");
    }
    r.shots = r.p_g_prime * (1.0 - r.p_g_prime) / (gap * gap);
    return r;
}

}  // namespace rydwire
