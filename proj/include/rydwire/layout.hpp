#pragma once

#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "rydwire/graphs.hpp"

namespace rydwire {

// Frequencies are angular (rad/μs) everywhere; a quoted "x MHz" is x·2π.
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double angular_mhz(double quoted) { return kTwoPi * quoted; }
constexpr double quoted_mhz(double angular) { return angular / kTwoPi; }

// Experimental operating point.
inline constexpr double kExperimentOmega0Quoted = 0.74;   // MHz
inline constexpr double kExperimentBlockadeRadius = 10.55;  // μm
inline constexpr double kExperimentSpacing = 8.0;          // μm

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double distance(Point a, Point b);

struct PhysicalParams {
    double c6 = 0.0;      // angular MHz · μm^6
    double omega0 = 0.0;  // angular MHz
    double d = 0.0;       // μm

    /// C6 calibrated so that the blockade radius at Ω0 = 2π·0.74 MHz is 10.55 μm.
    static PhysicalParams experiment();

    double blockade_radius() const;
    /// Nearest-neighbour interaction C6/d^6.
    double nearest_neighbor_u() const;
    void validate() const;
};

double interaction_strength(double dist, double c6);
double blockade_radius(double c6, double omega);
double calibrate_c6(double radius, double omega);
/// Two-photon Rabi frequency Ω_red·Ω_blue / (2Δ_m).
double effective_rabi(double omega_red, double omega_blue, double delta_m);

/// Atom coordinates in μm, indexed by the wired graph's atom order.
class Layout {
  public:
    Layout(WiredGraph graph, std::vector<Point> positions);

    const WiredGraph &graph() const { return graph_; }
    const std::vector<Point> &positions() const { return positions_; }
    Point position(int atom) const { return positions_.at(atom); }
    int num_atoms() const { return static_cast<int>(positions_.size()); }

  private:
    WiredGraph graph_;
    std::vector<Point> positions_;
};

/// Coordinates exactly as tabulated for the experiments.
Layout table1_layout(PlatonicName name);
Layout table1_layout(std::string_view name);

/// K4'-like arrays with dimer edges of length d and the five wire-involved
/// edges of length d' = ratio·d. Throws DegenerateGeometry for d' < d/2.
Layout k4_family_layout(double d, double ratio);

Eigen::MatrixXd distance_matrix(const Layout &layout);
/// Unit-disk graph: edge iff distance <= cutoff.
Graph derive_adjacency(const Layout &layout, double cutoff);
/// Full van der Waals matrix C6/r^6 (zero diagonal).
Eigen::MatrixXd pairwise_couplings(const Layout &layout, double c6);

std::string layout_csv(const Layout &layout);
nlohmann::json to_json(const Layout &layout);

}  // namespace rydwire
