#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rydwire/graphs.hpp"
#include "rydwire/layout.hpp"

namespace rydwire {

using cplx = std::complex<double>;

/// Raw configuration word. Atom 0 of the atom order is the most significant
/// of the num_atoms bits, so the printed bitstring reads in atom order.
using Basis = std::uint64_t;

inline constexpr int kMaxAtoms = 62;

constexpr Basis atom_bit(int atom, int num_atoms) { return Basis{1} << (num_atoms - 1 - atom); }

/// A classical configuration of N two-level atoms; bit 1 = Rydberg.
class SpinConfig {
  public:
    SpinConfig(int num_atoms, Basis bits);

    /// "011010" in atom order.
    static SpinConfig from_string(std::string_view bits);

    int num_atoms() const { return num_atoms_; }
    Basis bits() const { return bits_; }
    bool excited(int atom) const { return (bits_ & atom_bit(atom, num_atoms_)) != 0; }
    int excitations() const;
    std::string to_string() const;

    bool operator==(const SpinConfig &) const = default;

  private:
    int num_atoms_;
    Basis bits_;
};

/// 1-based decimal label: |n=1> is all atoms in the ground state.
std::uint64_t encode(const SpinConfig &config);
SpinConfig decode(std::uint64_t index, int num_atoms);

/// Concatenates bit fields in atom order, e.g. concat({"01", "10", "0100"}).
SpinConfig concat_bits(std::initializer_list<std::string_view> parts);

/// Interaction part of the Ising model: a list of pair couplings U_ij.
class Coupling {
  public:
    enum class Mode { Uniform, Physical };

    struct Term {
        int i;
        int j;
        double u;
    };

    /// U on every edge of `graph`, nothing elsewhere.
    static Coupling uniform(const Graph &graph, double u);
    /// Every pair with its own U_ij (e.g. C6/r^6 including tails).
    static Coupling physical(const Eigen::MatrixXd &matrix);
    static Coupling physical(const Layout &layout, double c6);

    Mode mode() const { return mode_; }
    int num_atoms() const { return num_atoms_; }
    const std::vector<Term> &terms() const { return terms_; }
    Eigen::MatrixXd matrix() const;

  private:
    Mode mode_ = Mode::Uniform;
    int num_atoms_ = 0;
    std::vector<Term> terms_;
};

std::string to_string(Coupling::Mode mode);

/// Drive parameters at one instant; ħ = 1, angular MHz.
struct HamiltonianParams {
    double omega = 0.0;
    double delta = 0.0;
    Coupling coupling;
};

/// -Δ·(#excited) + Σ U_ij n_i n_j. The configuration-independent +ΔN/2 of
/// the spin form is dropped here and in every operator built from it.
double classical_energy(const SpinConfig &config, double delta, const Coupling &coupling);

/// Amplitudes over the 2^N configurations, indexed by the raw Basis word.
class StateVector {
  public:
    StateVector() = default;
    explicit StateVector(int num_atoms);
    StateVector(int num_atoms, std::vector<cplx> amplitudes);

    static StateVector basis_state(int num_atoms, Basis config);

    int num_atoms() const { return num_atoms_; }
    std::size_t dimension() const { return amps_.size(); }
    std::vector<cplx> &amplitudes() { return amps_; }
    const std::vector<cplx> &amplitudes() const { return amps_; }
    cplx &operator[](Basis s) { return amps_[s]; }
    const cplx &operator[](Basis s) const { return amps_[s]; }

    double norm() const;
    void normalize();
    std::vector<double> probabilities() const;
    /// <this|other>
    cplx inner(const StateVector &other) const;
    double fidelity(const StateVector &other) const;

    /// Little-endian: uint32 N, then 2^N (re, im) float64 pairs.
    void save(std::ostream &out) const;
    static StateVector load(std::istream &in);

  private:
    int num_atoms_ = 0;
    std::vector<cplx> amps_;
};

/// Matrix-free Rydberg Ising operator for a fixed coupling; Ω and Δ are
/// supplied per application so the same object serves a whole sweep.
class RydbergHamiltonian {
  public:
    explicit RydbergHamiltonian(Coupling coupling);

    const Coupling &coupling() const { return coupling_; }
    int num_atoms() const { return num_atoms_; }
    std::size_t dimension() const { return excitations_.size(); }

    double diagonal(Basis s, double delta) const { return interaction_[s] - delta * excitations_[s]; }
    int excitations(Basis s) const { return excitations_[s]; }
    double interaction_energy(Basis s) const { return interaction_[s]; }
    const std::vector<std::uint8_t> &excitation_counts() const { return excitations_; }

    /// out = H(Ω, Δ) in, O(N·2^N).
    void apply(double omega, double delta, std::span<const cplx> in, std::span<cplx> out) const;
    void apply(double omega, double delta, std::span<const double> in, std::span<double> out) const;

    /// Dense real symmetric matrix, N <= 14.
    Eigen::MatrixXd dense(double omega, double delta) const;

  private:
    template <class T>
    void apply_impl(double omega, double delta, std::span<const T> in, std::span<T> out) const;

    Coupling coupling_;
    int num_atoms_;
    std::vector<std::uint8_t> excitations_;
    std::vector<double> interaction_;
};

StateVector apply_hamiltonian(const StateVector &state, const HamiltonianParams &params);
Eigen::MatrixXd build_dense(const HamiltonianParams &params);

inline constexpr int kMaxDenseAtoms = 14;

}  // namespace rydwire
