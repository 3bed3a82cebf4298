#include "rydwire/layout.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "rydwire/errors.hpp"

namespace rydwire {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double interaction_strength(double dist, double c6) {
    if (!(dist > 0.0)) {
        throw InvalidArgument("interaction distance must be positive");
    }
    return c6 / std::pow(dist, 6);
}

double blockade_radius(double c6, double omega) {
    if (!(c6 > 0.0) || !(omega > 0.0)) {
        throw InvalidArgument("blockade radius needs positive C6 and Rabi frequency");
    }
    return std::pow(c6 / omega, 1.0 / 6.0);
}

double calibrate_c6(double radius, double omega) {
    if (!(radius > 0.0) || !(omega > 0.0)) {
        throw InvalidArgument("C6 calibration needs positive radius and Rabi frequency");
    }
    return omega * std::pow(radius, 6);
}

double effective_rabi(double omega_red, double omega_blue, double delta_m) {
    if (delta_m == 0.0) {
        throw InvalidArgument("intermediate-state detuning must be non-zero");
    }
    return omega_red * omega_blue / (2.0 * delta_m);
}

PhysicalParams PhysicalParams::experiment() {
    PhysicalParams p;
    p.omega0 = angular_mhz(kExperimentOmega0Quoted);
    p.c6 = calibrate_c6(kExperimentBlockadeRadius, p.omega0);
    p.d = kExperimentSpacing;
    return p;
}

double PhysicalParams::blockade_radius() const { return rydwire::blockade_radius(c6, omega0); }

double PhysicalParams::nearest_neighbor_u() const { return interaction_strength(d, c6); }

void PhysicalParams::validate() const {
    if (!(c6 > 0.0) || !(omega0 > 0.0) || !(d > 0.0)) {
        throw InvalidArgument("physical parameters must be positive");
    }
    if (!(d < blockade_radius())) {
        throw InvalidArgument("nearest-neighbour spacing must be inside the blockade radius");
    }
}

Layout::Layout(WiredGraph graph, std::vector<Point> positions)
    : graph_(std::move(graph)), positions_(std::move(positions)) {
    if (static_cast<int>(positions_.size()) != graph_.num_atoms()) {
        throw DimensionMismatch("layout has " + std::to_string(positions_.size()) + " positions for " +
                                std::to_string(graph_.num_atoms()) + " atoms");
    }
}

Layout table1_layout(PlatonicName name) {
    switch (name) {
        case PlatonicName::Tetrahedron:
            return Layout(wire_platonic(name), {{-4.0, 0.0},
                                                {4.0, 0.0},
                                                {-10.9, 4.0},
                                                {-10.9, -4.0},
                                                {10.9, -4.0},
                                                {10.9, 4.0}});
        case PlatonicName::Cube:
            // Each wire listed from its head terminal to its tail terminal.
            return Layout(wire_platonic(name), {{4.0, 15.3},
                                                {-4.0, 15.3},
                                                {-15.3, 4.0},
                                                {-15.3, -4.0},
                                                {-4.0, -15.3},
                                                {4.0, -15.3},
                                                {15.3, -4.0},
                                                {15.3, 4.0},
                                                {-4.0, 4.0},
                                                {-4.0, -4.0},
                                                {4.0, -4.0},
                                                {4.0, 4.0},
                                                {9.7, 9.7},
                                                {-9.7, 9.7},
                                                {-9.7, -9.7},
                                                {9.7, -9.7}});
        case PlatonicName::Octahedron:
            return Layout(wire_platonic(name), {{-6.9, 13.8},
                                                {-14.9, 13.8},
                                                {-18.9, 6.9},
                                                {-14.9, 0.0},
                                                {-8.0, -12.0},
                                                {-4.0, -18.9},
                                                {4.0, -18.9},
                                                {8.0, -12.0},
                                                {14.9, 0.0},
                                                {18.9, 6.9},
                                                {14.9, 13.8},
                                                {6.9, 13.8},
                                                {0.0, 9.8},
                                                {-4.0, 2.9},
                                                {-8.0, -4.0},
                                                {0.0, -4.0},
                                                {8.0, -4.0},
                                                {4.0, 2.9}});
    }
    throw UnsupportedGraph("unknown");
}

Layout table1_layout(std::string_view name) { return table1_layout(parse_platonic(name)); }

Layout k4_family_layout(double d, double ratio) {
    if (!(d > 0.0) || !(ratio > 0.0)) {
        throw InvalidArgument("k4 family needs positive spacing and ratio");
    }
    const double dp = ratio * d;
    const double arm2 = dp * dp - d * d / 4.0;
    if (arm2 < 0.0) {
        throw DegenerateGeometry("d' = " + std::to_string(dp) + " is shorter than d/2");
    }
    const double x = dp / 2.0 + std::sqrt(arm2);
    return Layout(wire_platonic(PlatonicName::Tetrahedron),
                  {{-dp / 2.0, 0.0}, {dp / 2.0, 0.0}, {-x, d / 2.0}, {-x, -d / 2.0}, {x, -d / 2.0}, {x, d / 2.0}});
}

Eigen::MatrixXd distance_matrix(const Layout &layout) {
    const int n = layout.num_atoms();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            out(i, j) = out(j, i) = distance(layout.position(i), layout.position(j));
        }
    }
    return out;
}

Graph derive_adjacency(const Layout &layout, double cutoff) {
    std::vector<Edge> edges;
    const int n = layout.num_atoms();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (distance(layout.position(i), layout.position(j)) <= cutoff) {
                edges.push_back({i, j});
            }
        }
    }
    return Graph(layout.graph().name() + " (unit disk)", n, std::move(edges));
}

Eigen::MatrixXd pairwise_couplings(const Layout &layout, double c6) {
    const int n = layout.num_atoms();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double r = distance(layout.position(i), layout.position(j));
            if (r <= 0.0) {
                throw SingularCoupling("atoms " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
            }
            out(i, j) = out(j, i) = c6 / std::pow(r, 6);
        }
    }
    return out;
}

namespace {

std::string fmt1(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    // Avoid "-0.0".
    if (std::string(buf) == "-0.0") {
        return "0.0";
    }
    return buf;
}

std::string atom_role(const WiredGraph &g, int atom) {
    return g.is_wire_atom(atom) ? "wire:" + g.atom_label(atom) : "vertex:" + g.atom_label(atom);
}

}  // namespace

std::string layout_csv(const Layout &layout) {
    std::ostringstream out;
    out << "atom_id,role,x_um,y_um\n";
    for (int a = 0; a < layout.num_atoms(); ++a) {
        out << a << ',' << atom_role(layout.graph(), a) << ',' << fmt1(layout.position(a).x) << ','
            << fmt1(layout.position(a).y) << '\n';
    }
    return out.str();
}

nlohmann::json to_json(const Layout &layout) {
    auto atoms = nlohmann::json::array();
    for (int a = 0; a < layout.num_atoms(); ++a) {
        // Round through the 0.1 μm text form so JSON and CSV agree.
        atoms.push_back({{"atom_id", a},
                         {"role", atom_role(layout.graph(), a)},
                         {"x_um", std::stod(fmt1(layout.position(a).x))},
                         {"y_um", std::stod(fmt1(layout.position(a).y))}});
    }
    return {{"graph", layout.graph().name()}, {"atoms", atoms}};
}

}  // namespace rydwire
