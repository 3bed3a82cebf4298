#include "rydwire/hamiltonian.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "rydwire/errors.hpp"

namespace rydwire {

namespace {

void check_atom_count(int n) {
    if (n < 1 || n > kMaxAtoms) {
        throw InvalidArgument("atom count " + std::to_string(n) + " outside 1.." + std::to_string(kMaxAtoms));
    }
}

}  // namespace

SpinConfig::SpinConfig(int num_atoms, Basis bits) : num_atoms_(num_atoms), bits_(bits) {
    check_atom_count(num_atoms);
    if ((bits >> num_atoms) != 0) {
        throw InvalidArgument("configuration has bits beyond atom count");
    }
}

SpinConfig SpinConfig::from_string(std::string_view bits) {
    Basis v = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw InvalidArgument("bitstring may only contain 0 and 1");
        }
        v = (v << 1) | static_cast<Basis>(c == '1');
    }
    return SpinConfig(static_cast<int>(bits.size()), v);
}

int SpinConfig::excitations() const { return std::popcount(bits_); }

std::string SpinConfig::to_string() const {
    std::string s(num_atoms_, '0');
    for (int a = 0; a < num_atoms_; ++a) {
        if (excited(a)) {
            s[a] = '1';
        }
    }
    return s;
}

std::uint64_t encode(const SpinConfig &config) { return config.bits() + 1; }

SpinConfig decode(std::uint64_t index, int num_atoms) {
    check_atom_count(num_atoms);
    if (index < 1 || index > (std::uint64_t{1} << num_atoms)) {
        throw InvalidArgument("index " + std::to_string(index) + " outside 1..2^" + std::to_string(num_atoms));
    }
    return SpinConfig(num_atoms, index - 1);
}

SpinConfig concat_bits(std::initializer_list<std::string_view> parts) {
    std::string all;
    for (auto p : parts) {
        all += p;
    }
    return SpinConfig::from_string(all);
}

Coupling Coupling::uniform(const Graph &graph, double u) {
    Coupling c;
    c.mode_ = Mode::Uniform;
    c.num_atoms_ = graph.num_vertices();
    for (auto [i, j] : graph.edges()) {
        c.terms_.push_back({i, j, u});
    }
    return c;
}

Coupling Coupling::physical(const Eigen::MatrixXd &matrix) {
    if (matrix.rows() != matrix.cols()) {
        throw DimensionMismatch("coupling matrix must be square");
    }
    Coupling c;
    c.mode_ = Mode::Physical;
    c.num_atoms_ = static_cast<int>(matrix.rows());
    for (int i = 0; i < c.num_atoms_; ++i) {
        for (int j = i + 1; j < c.num_atoms_; ++j) {
            if (matrix(i, j) != matrix(j, i)) {
                throw InvalidArgument("coupling matrix must be symmetric");
            }
            if (matrix(i, j) != 0.0) {
                c.terms_.push_back({i, j, matrix(i, j)});
            }
        }
    }
    return c;
}

Coupling Coupling::physical(const Layout &layout, double c6) { return physical(pairwise_couplings(layout, c6)); }

Eigen::MatrixXd Coupling::matrix() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(num_atoms_, num_atoms_);
    for (const auto &t : terms_) {
        m(t.i, t.j) = m(t.j, t.i) = t.u;
    }
    return m;
}

std::string to_string(Coupling::Mode mode) { return mode == Coupling::Mode::Uniform ? "uniform" : "physical"; }

double classical_energy(const SpinConfig &config, double delta, const Coupling &coupling) {
    if (config.num_atoms() != coupling.num_atoms()) {
        throw DimensionMismatch("configuration and coupling disagree on atom count");
    }
    double e = -delta * config.excitations();
    for (const auto &t : coupling.terms()) {
        if (config.excited(t.i) && config.excited(t.j)) {
            e += t.u;
        }
    }
    return e;
}

// ---------------------------------------------------------------------------

StateVector::StateVector(int num_atoms) : num_atoms_(num_atoms) {
    check_atom_count(num_atoms);
    if (num_atoms > 30) {
        throw TooLarge("state vectors are limited to 30 atoms");
    }
    amps_.assign(std::size_t{1} << num_atoms, cplx{});
}

StateVector::StateVector(int num_atoms, std::vector<cplx> amplitudes) : num_atoms_(num_atoms), amps_(std::move(amplitudes)) {
    check_atom_count(num_atoms);
    if (amps_.size() != (std::size_t{1} << num_atoms)) {
        throw DimensionMismatch("amplitude count is not 2^N");
    }
}

StateVector StateVector::basis_state(int num_atoms, Basis config) {
    StateVector s(num_atoms);
    s.amps_.at(config) = 1.0;
    return s;
}

double StateVector::norm() const {
    double acc = 0.0;
    for (const auto &a : amps_) {
        acc += std::norm(a);
    }
    return std::sqrt(acc);
}

void StateVector::normalize() {
    const double n = norm();
    if (n == 0.0) {
        throw NotNormalized("cannot normalize the zero vector");
    }
    for (auto &a : amps_) {
        a /= n;
    }
}

std::vector<double> StateVector::probabilities() const {
    std::vector<double> p(amps_.size());
    for (std::size_t s = 0; s < amps_.size(); ++s) {
        p[s] = std::norm(amps_[s]);
    }
    return p;
}

cplx StateVector::inner(const StateVector &other) const {
    if (other.amps_.size() != amps_.size()) {
        throw DimensionMismatch("inner product of states with different dimensions");
    }
    cplx acc{};
    for (std::size_t s = 0; s < amps_.size(); ++s) {
        acc += std::conj(amps_[s]) * other.amps_[s];
    }
    return acc;
}

double StateVector::fidelity(const StateVector &other) const { return std::norm(inner(other)); }

namespace {

void put_u64(std::ostream &out, std::uint64_t v, int bytes) {
    for (int k = 0; k < bytes; ++k) {
        out.put(static_cast<char>((v >> (8 * k)) & 0xFF));
    }
}

std::uint64_t get_u64(std::istream &in, int bytes) {
    std::uint64_t v = 0;
    for (int k = 0; k < bytes; ++k) {
        int c = in.get();
        if (c == std::char_traits<char>::eof()) {
            throw InvalidArgument("truncated state file");
        }
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * k);
    }
    return v;
}

}  // namespace

void StateVector::save(std::ostream &out) const {
    put_u64(out, static_cast<std::uint64_t>(num_atoms_), 4);
    for (const auto &a : amps_) {
        put_u64(out, std::bit_cast<std::uint64_t>(a.real()), 8);
        put_u64(out, std::bit_cast<std::uint64_t>(a.imag()), 8);
    }
}

StateVector StateVector::load(std::istream &in) {
    const int n = static_cast<int>(get_u64(in, 4));
    StateVector s(n);
    for (auto &a : s.amps_) {
        const double re = std::bit_cast<double>(get_u64(in, 8));
        const double im = std::bit_cast<double>(get_u64(in, 8));
        a = {re, im};
    }
    return s;
}

// ---------------------------------------------------------------------------

RydbergHamiltonian::RydbergHamiltonian(Coupling coupling) : coupling_(std::move(coupling)), num_atoms_(coupling_.num_atoms()) {
    check_atom_count(num_atoms_);
    if (num_atoms_ > 30) {
        throw TooLarge("matrix-free operator limited to 30 atoms");
    }
    const std::size_t dim = std::size_t{1} << num_atoms_;
    // Pair energies between bit positions.
    std::vector<double> pair(static_cast<std::size_t>(num_atoms_) * num_atoms_, 0.0);
    for (const auto &t : coupling_.terms()) {
        const int bi = num_atoms_ - 1 - t.i;
        const int bj = num_atoms_ - 1 - t.j;
        pair[bi * num_atoms_ + bj] += t.u;
        pair[bj * num_atoms_ + bi] += t.u;
    }
    excitations_.assign(dim, 0);
    interaction_.assign(dim, 0.0);
    for (std::size_t s = 1; s < dim; ++s) {
        const int low = std::countr_zero(s);
        const std::size_t rest = s & (s - 1);
        excitations_[s] = static_cast<std::uint8_t>(excitations_[rest] + 1);
        double e = interaction_[rest];
        for (std::size_t r = rest; r != 0; r &= r - 1) {
            e += pair[low * num_atoms_ + std::countr_zero(r)];
        }
        interaction_[s] = e;
    }
}

template <class T>
void RydbergHamiltonian::apply_impl(double omega, double delta, std::span<const T> in, std::span<T> out) const {
    const std::size_t dim = dimension();
    if (in.size() != dim || out.size() != dim) {
        throw DimensionMismatch("state dimension does not match the operator");
    }
    for (std::size_t s = 0; s < dim; ++s) {
        out[s] = (interaction_[s] - delta * excitations_[s]) * in[s];
    }
    if (omega == 0.0) {
        return;
    }
    const double h = 0.5 * omega;
    for (int b = 0; b < num_atoms_; ++b) {
        const std::size_t m = std::size_t{1} << b;
        for (std::size_t base = 0; base < dim; base += 2 * m) {
            T *lo = out.data() + base;
            T *hi = lo + m;
            const T *in_lo = in.data() + base;
            const T *in_hi = in_lo + m;
            for (std::size_t k = 0; k < m; ++k) {
                lo[k] += h * in_hi[k];
                hi[k] += h * in_lo[k];
            }
        }
    }
}

void RydbergHamiltonian::apply(double omega, double delta, std::span<const cplx> in, std::span<cplx> out) const {
    apply_impl<cplx>(omega, delta, in, out);
}

void RydbergHamiltonian::apply(double omega, double delta, std::span<const double> in, std::span<double> out) const {
    apply_impl<double>(omega, delta, in, out);
}

Eigen::MatrixXd RydbergHamiltonian::dense(double omega, double delta) const {
    if (num_atoms_ > kMaxDenseAtoms) {
        throw TooLarge("dense matrices are limited to " + std::to_string(kMaxDenseAtoms) + " atoms");
    }
    const auto dim = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        m(s, s) = diagonal(static_cast<Basis>(s), delta);
        for (int b = 0; b < num_atoms_; ++b) {
            m(s ^ (Eigen::Index{1} << b), s) = 0.5 * omega;
        }
    }
    return m;
}

StateVector apply_hamiltonian(const StateVector &state, const HamiltonianParams &params) {
    if (state.num_atoms() != params.coupling.num_atoms()) {
        throw DimensionMismatch("state has " + std::to_string(state.num_atoms()) + " atoms, coupling has " +
                                std::to_string(params.coupling.num_atoms()));
    }
    RydbergHamiltonian h(params.coupling);
    StateVector out(state.num_atoms());
    h.apply(params.omega, params.delta, state.amplitudes(), out.amplitudes());
    return out;
}

Eigen::MatrixXd build_dense(const HamiltonianParams &params) {
    if (params.coupling.num_atoms() > kMaxDenseAtoms) {
        throw TooLarge("dense matrices are limited to " + std::to_string(kMaxDenseAtoms) + " atoms");
    }
    return RydbergHamiltonian(params.coupling).dense(params.omega, params.delta);
}

}  // namespace rydwire
