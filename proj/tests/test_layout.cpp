#include <gtest/gtest.h>

#include <cmath>

#include "rydwire/errors.hpp"
#include "rydwire/layout.hpp"

using namespace rydwire;

TEST(Physical, CalibrationRoundTrip) {
    const auto p = PhysicalParams::experiment();
    EXPECT_NEAR(p.blockade_radius(), 10.55, 1e-12);
    EXPECT_NEAR(quoted_mhz(p.omega0), 0.74, 1e-15);
    EXPECT_NEAR(p.c6, p.omega0 * std::pow(10.55, 6), 1e-6 * p.c6);
    EXPECT_NO_THROW(p.validate());
}

TEST(Physical, NearestNeighbourInteractionOverRabi) {
    const auto p = PhysicalParams::experiment();
    EXPECT_NEAR(p.nearest_neighbor_u() / p.omega0, std::pow(10.55 / 8.0, 6), 1e-12);
    // (10.55/8)^6 = 5.260, within rounding of 5.27.
    EXPECT_NEAR(p.nearest_neighbor_u() / p.omega0, 5.27, 0.02);
}

TEST(Physical, TwoPhotonRabi) {
    EXPECT_NEAR(effective_rabi(112.0, 7.4, 560.0), 0.74, 1e-12);
    EXPECT_THROW(effective_rabi(1.0, 1.0, 0.0), InvalidArgument);
}

TEST(Physical, InteractionFallsAsSixthPower) {
    const double c6 = 1.0e6;
    EXPECT_NEAR(interaction_strength(8.0, c6) / interaction_strength(16.0, c6), 64.0, 1e-9);
    EXPECT_THROW(interaction_strength(0.0, c6), InvalidArgument);
    EXPECT_THROW(blockade_radius(-1.0, 1.0), InvalidArgument);
}

TEST(Physical, SpacingOutsideBlockadeRejected) {
    auto p = PhysicalParams::experiment();
    p.d = 12.0;
    EXPECT_THROW(p.validate(), InvalidArgument);
}

// Unit-disk graph at the blockade radius reproduces the wired graph, and
// every edge sits at the nominal spacing.
TEST(ReferenceLayout, UnitDiskMatchesWiredGraph) {
    for (auto name : {PlatonicName::Tetrahedron, PlatonicName::Cube, PlatonicName::Octahedron}) {
        const Layout layout = table1_layout(name);
        const Graph udg = derive_adjacency(layout, kExperimentBlockadeRadius);
        EXPECT_TRUE(udg.same_structure(layout.graph().atoms_graph())) << to_string(name);
        for (auto [a, b] : layout.graph().all_edges()) {
            EXPECT_NEAR(distance(layout.position(a), layout.position(b)), 8.0, 0.1)
                << to_string(name) << " edge " << a << "-" << b;
        }
    }
}

TEST(ReferenceLayout, NonEdgesOutsideBlockade) {
    for (auto name : {PlatonicName::Tetrahedron, PlatonicName::Cube, PlatonicName::Octahedron}) {
        const Layout layout = table1_layout(name);
        const auto d = distance_matrix(layout);
        const Graph &g = layout.graph().atoms_graph();
        for (int i = 0; i < layout.num_atoms(); ++i) {
            for (int j = i + 1; j < layout.num_atoms(); ++j) {
                if (!g.has_edge(i, j)) {
                    EXPECT_GT(d(i, j), kExperimentBlockadeRadius) << to_string(name) << " " << i << "-" << j;
                }
            }
        }
    }
}

TEST(ReferenceLayout, DistanceMatrixSymmetricZeroDiagonal) {
    const auto d = distance_matrix(table1_layout("cube"));
    EXPECT_EQ(d.rows(), 16);
    EXPECT_TRUE(d.isApprox(d.transpose()));
    EXPECT_EQ(d.diagonal().cwiseAbs().maxCoeff(), 0.0);
}

TEST(K4Family, UnitRatioIsEquilateral) {
    const Layout layout = k4_family_layout(8.0, 1.0);
    for (auto [a, b] : layout.graph().all_edges()) {
        EXPECT_NEAR(distance(layout.position(a), layout.position(b)), 8.0, 1e-12);
    }
}

TEST(K4Family, WireEdgesScaleWithRatio) {
    for (double ratio : {0.8, 0.9, 1.1, 1.2, 1.3}) {
        const Layout layout = k4_family_layout(8.0, ratio);
        const WiredGraph &wg = layout.graph();
        for (auto [a, b] : wg.all_edges()) {
            const double len = distance(layout.position(a), layout.position(b));
            const bool dimer = !wg.is_wire_atom(a) && !wg.is_wire_atom(b);
            EXPECT_NEAR(len, dimer ? 8.0 : 8.0 * ratio, 1e-12) << ratio;
        }
    }
}

TEST(K4Family, DegenerateBelowHalf) {
    EXPECT_THROW(k4_family_layout(8.0, 0.49), DegenerateGeometry);
    EXPECT_NO_THROW(k4_family_layout(8.0, 0.5));
    EXPECT_THROW(k4_family_layout(-8.0, 1.0), InvalidArgument);
}

TEST(Couplings, PhysicalMatrix) {
    const Layout layout = table1_layout("tetrahedron");
    const double c6 = PhysicalParams::experiment().c6;
    const auto u = pairwise_couplings(layout, c6);
    EXPECT_TRUE(u.isApprox(u.transpose()));
    EXPECT_NEAR(u(0, 1), c6 / std::pow(8.0, 6), 1e-9 * u(0, 1));
    EXPECT_EQ(u(2, 2), 0.0);
}

TEST(Couplings, CoincidentAtomsAreSingular) {
    const WiredGraph wg = wire_platonic("tetrahedron");
    const Layout bad(wg, {{0, 0}, {0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}});
    EXPECT_THROW(pairwise_couplings(bad, 1.0), SingularCoupling);
}

TEST(Layout, CountMismatch) {
    EXPECT_THROW(Layout(wire_platonic("tetrahedron"), {{0, 0}}), DimensionMismatch);
}

TEST(Layout, CsvFormat) {
    const std::string csv = layout_csv(table1_layout("tetrahedron"));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "atom_id,role,x_um,y_um");
    EXPECT_NE(csv.find("0,wire:W[0],-4.0,0.0"), std::string::npos);
    EXPECT_NE(csv.find("2,vertex:1,-10.9,4.0"), std::string::npos);
    EXPECT_EQ(csv.find("-0.0,"), std::string::npos);
    const std::string family = layout_csv(k4_family_layout(8.0, 1.0));
    EXPECT_EQ(family.find(",-0.0"), std::string::npos);
}

TEST(Layout, JsonHasEveryAtom) {
    const auto doc = to_json(table1_layout("octahedron"));
    EXPECT_EQ(doc["atoms"].size(), 18u);
    EXPECT_EQ(doc["atoms"][0]["atom_id"], 0);
}
