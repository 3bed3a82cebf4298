#include "rydwire/spectrum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "rydwire/errors.hpp"

namespace rydwire {

Ratio::Ratio(long long n, long long d) {
    if (d == 0) {
        throw InvalidArgument("zero denominator");
    }
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const long long g = std::gcd(n < 0 ? -n : n, d);
    num = g ? n / g : n;
    den = g ? d / g : d;
}

std::string Ratio::to_string() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

namespace {

void check_brute_force(int n) {
    if (n > kMaxBruteForceAtoms) {
        throw TooLarge("brute-force enumeration limited to " + std::to_string(kMaxBruteForceAtoms) + " atoms");
    }
}

// Neighbour masks in Basis bit positions (atom a <-> bit N-1-a).
std::vector<Basis> bit_neighbor_masks(const Graph &g) {
    const int n = g.num_vertices();
    std::vector<Basis> masks(n, 0);
    for (auto [a, b] : g.edges()) {
        masks[n - 1 - a] |= atom_bit(b, n);
        masks[n - 1 - b] |= atom_bit(a, n);
    }
    return masks;
}

int excited_pairs(const std::vector<Basis> &masks, Basis s) {
    int twice = 0;
    for (Basis r = s; r != 0; r &= r - 1) {
        twice += std::popcount(s & masks[std::countr_zero(r)]);
    }
    return twice / 2;
}

}  // namespace

std::vector<Basis> classical_ground_configs(const Graph &graph, double delta, double u) {
    const int n = graph.num_vertices();
    check_brute_force(n);
    const auto masks = bit_neighbor_masks(graph);
    const Basis dim = Basis{1} << n;
    // Energies are -Δk + U·m with integer k, m; compare the (k, m) classes
    // exactly and only then evaluate the floating-point energy per class.
    std::vector<int> best_pairs(n + 1, std::numeric_limits<int>::max());
    for (Basis s = 0; s < dim; ++s) {
        const int k = std::popcount(s);
        best_pairs[k] = std::min(best_pairs[k], excited_pairs(masks, s));
    }
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= n; ++k) {
        best = std::min(best, -delta * k + u * best_pairs[k]);
    }
    const double slack = 1e-12 * (std::abs(delta) + std::abs(u)) * (n + 1) * (n + 1);
    std::vector<bool> winner(n + 1, false);
    for (int k = 0; k <= n; ++k) {
        winner[k] = (-delta * k + u * best_pairs[k]) <= best + slack;
    }
    std::vector<Basis> out;
    for (Basis s = 0; s < dim; ++s) {
        const int k = std::popcount(s);
        if (winner[k] && excited_pairs(masks, s) == best_pairs[k]) {
            out.push_back(s);
        }
    }
    return out;
}

std::vector<PhaseRegion> phase_diagram(const Graph &graph, Ratio lo, Ratio hi) {
    const int n = graph.num_vertices();
    check_brute_force(n);
    if (!(lo < hi)) {
        throw InvalidArgument("phase diagram range is empty");
    }
    const auto masks = bit_neighbor_masks(graph);
    const Basis dim = Basis{1} << n;
    std::vector<int> m(n + 1, std::numeric_limits<int>::max());
    std::vector<std::vector<Basis>> argmin(n + 1);
    for (Basis s = 0; s < dim; ++s) {
        const int k = std::popcount(s);
        const int p = excited_pairs(masks, s);
        if (p < m[k]) {
            m[k] = p;
            argmin[k].clear();
        }
        if (p == m[k]) {
            argmin[k].push_back(s);
        }
    }
    // Energy in units of U at Δ/U = x is m_k - k·x.
    auto energy_at = [&](int k, const Ratio &x) { return Ratio(m[k] * x.den - k * x.num, x.den); };

    int current = 0;
    for (int k = 1; k <= n; ++k) {
        const Ratio ek = energy_at(k, lo);
        const Ratio ec = energy_at(current, lo);
        if (ek < ec || ek == ec) {  // ties go to the steeper line, which wins just above lo
            current = k;
        }
    }
    std::vector<PhaseRegion> regions;
    Ratio x = lo;
    while (true) {
        int next = -1;
        Ratio cross;
        for (int k = current + 1; k <= n; ++k) {
            Ratio xk(m[k] - m[current], k - current);
            if (!(x < xk)) {
                continue;
            }
            if (next < 0 || xk < cross || xk == cross) {
                next = k;
                cross = xk;
            }
        }
        PhaseRegion r;
        r.lo = x;
        r.excitation_count = current;
        r.excited_pairs = m[current];
        r.configs = argmin[current];
        if (next < 0 || hi <= cross) {
            r.hi = hi;
            regions.push_back(std::move(r));
            break;
        }
        r.hi = cross;
        regions.push_back(std::move(r));
        x = cross;
        current = next;
    }
    return regions;
}

std::vector<Ratio> boundaries(const std::vector<PhaseRegion> &regions) {
    std::vector<Ratio> out;
    for (std::size_t i = 0; i + 1 < regions.size(); ++i) {
        out.push_back(regions[i].hi);
    }
    return out;
}

nlohmann::json phase_json(const std::vector<PhaseRegion> &regions, int num_atoms) {
    auto out = nlohmann::json::array();
    for (const auto &r : regions) {
        std::vector<std::uint64_t> idx;
        for (Basis s : r.configs) {
            idx.push_back(encode(SpinConfig(num_atoms, s)));
        }
        out.push_back({{"delta_lo_over_U", r.lo.value()},
                       {"delta_hi_over_U", r.hi.value()},
                       {"delta_lo_exact", r.lo.to_string()},
                       {"delta_hi_exact", r.hi.to_string()},
                       {"excitation_count", r.excitation_count},
                       {"excited_pairs", r.excited_pairs},
                       {"configs", idx}});
    }
    return out;
}

std::string phase_csv(const std::vector<PhaseRegion> &regions, int num_atoms) {
    std::ostringstream out;
    out << "delta_lo_over_U,delta_hi_over_U,excitation_count,excited_pairs,num_configs,configs\n";
    for (const auto &r : regions) {
        out << r.lo.value() << ',' << r.hi.value() << ',' << r.excitation_count << ',' << r.excited_pairs << ','
            << r.configs.size() << ',';
        for (std::size_t i = 0; i < r.configs.size(); ++i) {
            out << (i ? " " : "") << encode(SpinConfig(num_atoms, r.configs[i]));
        }
        out << '\n';
    }
    return out.str();
}

bool is_independent(const Graph &graph, Basis config) {
    const int n = graph.num_vertices();
    for (auto [a, b] : graph.edges()) {
        if ((config & atom_bit(a, n)) && (config & atom_bit(b, n))) {
            return false;
        }
    }
    return true;
}

std::vector<Basis> mis_set(const Graph &graph) {
    const int n = graph.num_vertices();
    check_brute_force(n);
    const auto masks = bit_neighbor_masks(graph);
    std::vector<Basis> out;
    int best = -1;
    for (Basis s = 0; s < (Basis{1} << n); ++s) {
        const int k = std::popcount(s);
        if (k < best || excited_pairs(masks, s) != 0) {
            continue;
        }
        if (k > best) {
            best = k;
            out.clear();
        }
        out.push_back(s);
    }
    return out;
}

ReferenceName parse_reference(std::string_view name) {
    static const std::map<std::string, ReferenceName, std::less<>> names = {
        {"MIS(K4)", ReferenceName::MisK4},         {"MIS(Q3)", ReferenceName::MisQ3},
        {"MIS(K222)", ReferenceName::MisK222},     {"MIS(K4')", ReferenceName::MisK4Wired},
        {"MIS(Q3')", ReferenceName::MisQ3Wired},   {"MIS(K222')", ReferenceName::MisK222Wired}};
    auto it = names.find(name);
    if (it == names.end()) {
        throw InvalidArgument("unknown reference state '" + std::string(name) + "'");
    }
    return it->second;
}

std::string to_string(ReferenceName name) {
    switch (name) {
        case ReferenceName::MisK4:
            return "MIS(K4)";
        case ReferenceName::MisQ3:
            return "MIS(Q3)";
        case ReferenceName::MisK222:
            return "MIS(K222)";
        case ReferenceName::MisK4Wired:
            return "MIS(K4')";
        case ReferenceName::MisQ3Wired:
            return "MIS(Q3')";
        case ReferenceName::MisK222Wired:
            return "MIS(K222')";
    }
    return "?";
}

namespace {

struct Term {
    double amplitude;
    SpinConfig config;
};

StateVector from_terms(const std::vector<Term> &terms) {
    StateVector s(terms.front().config.num_atoms());
    for (const auto &t : terms) {
        s[t.config.bits()] += t.amplitude;
    }
    return s;
}

}  // namespace

StateVector reference_state(ReferenceName name) {
    auto c = [](std::initializer_list<std::string_view> parts) { return concat_bits(parts); };
    switch (name) {
        case ReferenceName::MisK4: {
            std::vector<Term> t;
            for (auto b : {"1000", "0100", "0010", "0001"}) {
                t.push_back({0.5, c({b})});
            }
            return from_terms(t);
        }
        case ReferenceName::MisQ3: {
            const double a = 1.0 / std::sqrt(2.0);
            return from_terms({{a, c({"01010101"})}, {a, c({"10101010"})}});
        }
        case ReferenceName::MisK222: {
            const double a = 1.0 / std::sqrt(3.0);
            return from_terms({{a, c({"100100"})}, {a, c({"010010"})}, {a, c({"001001"})}});
        }
        case ReferenceName::MisK4Wired: {
            const double af = std::sqrt(3.0 / 32.0);
            const double zero = std::sqrt(5.0 / 32.0);
            std::vector<Term> t = {{af, c({"10", "0001"})}, {af, c({"10", "0010"})},
                                   {af, c({"01", "0100"})}, {af, c({"01", "1000"})}};
            for (auto b : {"0101", "0110", "1001", "1010"}) {
                t.push_back({zero, c({"00", b})});
            }
            return from_terms(t);
        }
        case ReferenceName::MisQ3Wired: {
            const double a = 1.0 / std::sqrt(2.0);
            return from_terms({{a, c({"01", "10", "01", "10", "10101010"})},
                               {a, c({"10", "01", "10", "01", "01010101"})}});
        }
        case ReferenceName::MisK222Wired: {
            const double a = std::sqrt(20.0 / 243.0);
            const double b = std::sqrt(41.0 / 243.0);
            // The free wire of each line is in a(|0101> + |1010>) + b|1001>.
            const std::vector<std::pair<double, std::string_view>> free_wire = {{a, "0101"}, {a, "1010"}, {b, "1001"}};
            std::vector<Term> t;
            for (auto [amp, w] : free_wire) {
                t.push_back({amp, c({"1010", "0101", w, "001001"})});
                t.push_back({amp, c({w, "1010", "0101", "010010"})});
                t.push_back({amp, c({"0101", w, "1010", "100100"})});
            }
            return from_terms(t);
        }
    }
    throw InvalidArgument("unknown reference state");
}

// ---------------------------------------------------------------------------
// Thick-restart Lanczos on the real symmetric operator.

namespace {

double dot(const std::vector<double> &a, const std::vector<double> &b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

void axpy(double alpha, const std::vector<double> &x, std::vector<double> &y) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] += alpha * x[i];
    }
}

}  // namespace

Eigenpair ground_state(const RydbergHamiltonian &h, double omega, double delta, const EigenOptions &options) {
    const std::size_t dim = h.dimension();
    const int max_basis = static_cast<int>(std::min<std::size_t>(std::max(options.max_basis, 4), dim));
    const int keep = std::clamp(options.keep, 1, std::max(1, max_basis - 2));

    std::vector<std::vector<double>> basis;
    basis.reserve(max_basis + 1);
    {
        std::vector<double> v(dim);
        const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
        for (std::size_t s = 0; s < dim; ++s) {
            v[s] = (std::popcount(s) % 2 == 0) ? amp : -amp;
        }
        basis.push_back(std::move(v));
    }
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(max_basis, max_basis);
    std::vector<double> w(dim);
    long matvecs = 0;

    while (true) {
        // Expand: column j of T is V^T A v_j.
        double beta = 0.0;
        bool invariant = false;
        while (static_cast<int>(basis.size()) <= max_basis) {
            const int j = static_cast<int>(basis.size()) - 1;
            h.apply(omega, delta, std::span<const double>(basis[j]), std::span<double>(w));
            ++matvecs;
            std::vector<double> coeff(j + 1, 0.0);
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i <= j; ++i) {
                    const double c = dot(basis[i], w);
                    axpy(-c, basis[i], w);
                    coeff[i] += c;
                }
            }
            for (int i = 0; i <= j; ++i) {
                t(i, j) = t(j, i) = coeff[i];
            }
            beta = std::sqrt(dot(w, w));
            const double scale = std::max(1.0, std::abs(t(j, j)));
            if (beta <= 1e-13 * scale || static_cast<std::size_t>(j + 1) == dim) {
                invariant = true;
                basis.resize(j + 1);
                break;
            }
            if (j + 1 == max_basis) {
                break;
            }
            std::vector<double> next(w);
            for (auto &x : next) {
                x /= beta;
            }
            basis.push_back(std::move(next));
        }

        const int m = static_cast<int>(basis.size());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t.topLeftCorner(m, m));
        const Eigen::VectorXd theta = eig.eigenvalues();
        const Eigen::MatrixXd y = eig.eigenvectors();
        const double residual = invariant ? 0.0 : beta * std::abs(y(m - 1, 0));

        const bool done = residual <= options.tol || matvecs >= options.max_matvecs;
        const int k = done ? 1 : std::min(keep, m - 1);
        std::vector<std::vector<double>> ritz(k, std::vector<double>(dim, 0.0));
        for (int r = 0; r < k; ++r) {
            for (int i = 0; i < m; ++i) {
                axpy(y(i, r), basis[i], ritz[r]);
            }
        }
        if (done) {
            if (residual > options.tol) {
                throw NonConvergence("Lanczos residual " + std::to_string(residual) + " after " +
                                     std::to_string(matvecs) + " matvecs");
            }
            // Recompute the residual explicitly on the final vector.
            std::vector<double> &x = ritz[0];
            const double nx = std::sqrt(dot(x, x));
            for (auto &v : x) {
                v /= nx;
            }
            h.apply(omega, delta, std::span<const double>(x), std::span<double>(w));
            const double e = dot(x, w);
            axpy(-e, x, w);
            Eigenpair out;
            out.energy = e;
            out.residual = std::sqrt(dot(w, w));
            out.matvecs = matvecs + 1;
            std::vector<cplx> amps(dim);
            for (std::size_t s = 0; s < dim; ++s) {
                amps[s] = x[s];
            }
            out.state = StateVector(h.num_atoms(), std::move(amps));
            return out;
        }

        // Thick restart: keep k Ritz vectors plus the current residual direction.
        std::vector<double> residual_vec(w);
        for (auto &x : residual_vec) {
            x /= beta;
        }
        basis = std::move(ritz);
        basis.push_back(std::move(residual_vec));
        t.setZero();
        for (int r = 0; r < k; ++r) {
            t(r, r) = theta(r);
            t(r, k) = t(k, r) = beta * y(m - 1, r);
        }
        // Column k is recomputed by the next expansion step.
    }
}

Eigenpair ground_state(const HamiltonianParams &params, const EigenOptions &options) {
    return ground_state(RydbergHamiltonian(params.coupling), params.omega, params.delta, options);
}

std::vector<double> default_small_omegas(double u) { return {1e-1 * u, std::pow(10.0, -1.5) * u, 1e-2 * u}; }

SmallOmegaLimit small_omega_limit(const RydbergHamiltonian &h, double delta, std::span<const double> omegas,
                                  const EigenOptions &options) {
    if (omegas.empty()) {
        throw InvalidArgument("need at least one Rabi frequency");
    }
    SmallOmegaLimit out;
    for (double om : omegas) {
        if (!(om > 0.0)) {
            throw InvalidArgument("small-Ω sequence must be positive");
        }
        out.omegas.push_back(om);
        out.probabilities.push_back(ground_state(h, om, delta, options).state.probabilities());
    }
    // Lagrange interpolation in x = Ω^2, evaluated at x = 0.
    const std::size_t n = omegas.size();
    std::vector<double> weight(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = omegas[i] * omegas[i];
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                const double xj = omegas[j] * omegas[j];
                weight[i] *= (0.0 - xj) / (xi - xj);
            }
        }
    }
    const std::size_t dim = h.dimension();
    out.extrapolated.assign(dim, 0.0);
    double total = 0.0;
    for (std::size_t s = 0; s < dim; ++s) {
        double p = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            p += weight[i] * out.probabilities[i][s];
        }
        out.extrapolated[s] = std::max(p, 0.0);
        total += out.extrapolated[s];
    }
    for (auto &p : out.extrapolated) {
        p /= total;
    }
    return out;
}

}  // namespace rydwire
