#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace rydwire {

/// Unordered vertex pair, always stored with first < second.
using Edge = std::pair<int, int>;

Edge make_edge(int a, int b);

/// Simple undirected graph. Vertices are 0..num_vertices-1; conventional
/// 1-based labels map to id = label - 1. Edges are kept sorted
/// lexicographically so serialization is reproducible.
class Graph {
  public:
    Graph() = default;
    Graph(std::string name, int num_vertices, std::vector<Edge> edges);

    const std::string &name() const { return name_; }
    int num_vertices() const { return num_vertices_; }
    const std::vector<Edge> &edges() const { return edges_; }
    std::size_t num_edges() const { return edges_.size(); }

    bool has_edge(int a, int b) const;
    int degree(int v) const;
    std::vector<int> neighbors(int v) const;

    /// Per-vertex neighbor bitmasks; requires num_vertices <= 64.
    std::vector<std::uint64_t> neighbor_masks() const;

    /// f = 2 - |V| + |E|.
    int euler_faces() const { return 2 - num_vertices_ + static_cast<int>(edges_.size()); }

    bool same_structure(const Graph &other) const {
        return num_vertices_ == other.num_vertices_ && edges_ == other.edges_;
    }

  private:
    std::string name_;
    int num_vertices_ = 0;
    std::vector<Edge> edges_;
};

enum class PlatonicName { Tetrahedron, Cube, Octahedron };

PlatonicName parse_platonic(std::string_view name);
std::string to_string(PlatonicName name);

/// K4, Q3 or K_{2,2,2} with vertex numbering of the experimental layouts.
Graph platonic_graph(PlatonicName name);
Graph platonic_graph(std::string_view name);

/// A chain of an even number of auxiliary atoms standing in for one or more
/// base edges. The first atom attaches to every vertex in `head_terminals`,
/// the last one to every vertex in `tail_terminals`.
struct Wire {
    std::string label;
    std::vector<int> atoms;
    std::vector<int> head_terminals;
    std::vector<int> tail_terminals;
    std::vector<Edge> replaced_edges;

    int length() const { return static_cast<int>(atoms.size()); }
};

/// Declarative description of a wire, before atom ids are assigned.
struct WireSpec {
    std::string label;
    int length = 2;
    std::vector<int> head_terminals;
    std::vector<int> tail_terminals;
    std::vector<Edge> replaced_edges;
};

/// A base graph G together with its quantum-wired counterpart G'.
///
/// Atom order (the order used by every bitstring in the library): all wire
/// atoms first, wire by wire, then the base vertices in index order. Base
/// vertex v therefore lives at atom id `num_wire_atoms() + v`.
class WiredGraph {
  public:
    WiredGraph(Graph base, const std::vector<WireSpec> &wires, std::string name = {});

    const std::string &name() const { return name_; }
    const Graph &base() const { return base_; }
    const std::vector<Wire> &wires() const { return wires_; }
    /// Graph over all N' atoms (wire atoms and base vertices).
    const Graph &atoms_graph() const { return all_; }
    const std::vector<Edge> &all_edges() const { return all_.edges(); }

    int num_atoms() const { return all_.num_vertices(); }
    int num_wire_atoms() const { return num_wire_atoms_; }
    int vertex_atom(int vertex) const { return num_wire_atoms_ + vertex; }
    bool is_wire_atom(int atom) const { return atom < num_wire_atoms_; }

    /// "W1[0]" style for wire atoms, "1".."N" (1-based) for vertices.
    std::string atom_label(int atom) const;

  private:
    std::string name_;
    Graph base_;
    std::vector<Wire> wires_;
    Graph all_;
    int num_wire_atoms_ = 0;
};

/// The wiring used in the experiments: K4' (one 2-atom wire with four
/// terminal attachments), Q3' (four 2-atom wires), K222' (three 4-atom wires).
WiredGraph wire_platonic(PlatonicName name);
WiredGraph wire_platonic(std::string_view name);

/// Drops the wire atoms and restores the replaced edges.
Graph strip_wires(const WiredGraph &wg);

struct ScalingRecord {
    std::string label;
    int n = 0;
    int n_prime = 0;
    std::string source;  // "constructed", "reported" or "user"
};

ScalingRecord scaling_point(int n, int n_prime, std::string label = {}, std::string source = "user");
ScalingRecord scaling_point(PlatonicName name);
/// Constructed points for the three built-in graphs plus the reported K222' count.
std::vector<ScalingRecord> builtin_scaling_points();

nlohmann::json to_json(const Graph &g);
nlohmann::json to_json(const WiredGraph &wg);
WiredGraph wired_graph_from_json(const nlohmann::json &doc);

}  // namespace rydwire
