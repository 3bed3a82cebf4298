#include "rydwire/graphs.hpp"

#include <algorithm>
#include <set>

#include "rydwire/errors.hpp"

namespace rydwire {

Edge make_edge(int a, int b) {
    if (a == b) {
        throw InvalidArgument("self-loop on vertex " + std::to_string(a));
    }
    return a < b ? Edge{a, b} : Edge{b, a};
}

Graph::Graph(std::string name, int num_vertices, std::vector<Edge> edges)
    : name_(std::move(name)), num_vertices_(num_vertices) {
    if (num_vertices < 0) {
        throw InvalidArgument("negative vertex count");
    }
    std::set<Edge> seen;
    for (auto [a, b] : edges) {
        Edge e = make_edge(a, b);
        if (e.first < 0 || e.second >= num_vertices) {
            throw InvalidArgument("edge (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
        }
        if (!seen.insert(e).second) {
            throw InvalidArgument("duplicate edge (" + std::to_string(e.first) + "," + std::to_string(e.second) + ")");
        }
    }
    edges_.assign(seen.begin(), seen.end());
}

bool Graph::has_edge(int a, int b) const {
    if (a == b) {
        return false;
    }
    return std::binary_search(edges_.begin(), edges_.end(), make_edge(a, b));
}

int Graph::degree(int v) const {
    return static_cast<int>(std::count_if(edges_.begin(), edges_.end(), [v](const Edge &e) {
        return e.first == v || e.second == v;
    }));
}

std::vector<int> Graph::neighbors(int v) const {
    std::vector<int> out;
    for (auto [a, b] : edges_) {
        if (a == v) {
            out.push_back(b);
        } else if (b == v) {
            out.push_back(a);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::uint64_t> Graph::neighbor_masks() const {
    if (num_vertices_ > 64) {
        throw TooLarge("neighbor masks need at most 64 vertices");
    }
    std::vector<std::uint64_t> masks(num_vertices_, 0);
    for (auto [a, b] : edges_) {
        masks[a] |= std::uint64_t{1} << b;
        masks[b] |= std::uint64_t{1} << a;
    }
    return masks;
}

PlatonicName parse_platonic(std::string_view name) {
    if (name == "tetrahedron" || name == "K4") {
        return PlatonicName::Tetrahedron;
    }
    if (name == "cube" || name == "Q3") {
        return PlatonicName::Cube;
    }
    if (name == "octahedron" || name == "K222") {
        return PlatonicName::Octahedron;
    }
    throw UnsupportedGraph(std::string(name));
}

std::string to_string(PlatonicName name) {
    switch (name) {
        case PlatonicName::Tetrahedron:
            return "tetrahedron";
        case PlatonicName::Cube:
            return "cube";
        case PlatonicName::Octahedron:
            return "octahedron";
    }
    return "unknown";
}

namespace {

// Edge lists in 1-based vertex labels, as drawn in the layouts.
std::vector<Edge> from_labels(std::initializer_list<Edge> labelled) {
    std::vector<Edge> out;
    for (auto [a, b] : labelled) {
        out.push_back(make_edge(a - 1, b - 1));
    }
    return out;
}

}  // namespace

Graph platonic_graph(PlatonicName name) {
    switch (name) {
        case PlatonicName::Tetrahedron:
            return Graph("K4", 4, from_labels({{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}));
        case PlatonicName::Cube:
            // Inner square 1-4, outer square 5-8, spokes 1-6, 2-7, 3-8, 4-5.
            return Graph("Q3", 8,
                         from_labels({{1, 2}, {2, 3}, {3, 4}, {1, 4}, {1, 6}, {2, 7}, {3, 8}, {4, 5},
                                      {5, 6}, {6, 7}, {7, 8}, {5, 8}}));
        case PlatonicName::Octahedron:
            // Opposite (non-adjacent) pairs are {1,4}, {2,5}, {3,6}.
            return Graph("K222", 6,
                         from_labels({{1, 2}, {1, 6}, {2, 6}, {2, 3}, {2, 4}, {3, 4}, {4, 5}, {4, 6},
                                      {5, 6}, {1, 3}, {3, 5}, {1, 5}}));
    }
    throw UnsupportedGraph("unknown");
}

Graph platonic_graph(std::string_view name) { return platonic_graph(parse_platonic(name)); }

WiredGraph::WiredGraph(Graph base, const std::vector<WireSpec> &wires, std::string name)
    : name_(name.empty() ? base.name() + "'" : std::move(name)), base_(std::move(base)) {
    for (const auto &spec : wires) {
        num_wire_atoms_ += spec.length;
    }
    const int n_base = base_.num_vertices();
    std::set<Edge> replaced_all;
    std::vector<Edge> edges;
    int next_atom = 0;
    for (const auto &spec : wires) {
        if (spec.length < 2 || spec.length % 2 != 0) {
            throw InvalidArgument("wire " + spec.label + " must have an even length >= 2");
        }
        if (spec.head_terminals.empty() || spec.tail_terminals.empty()) {
            throw InvalidArgument("wire " + spec.label + " needs terminals at both ends");
        }
        Wire w;
        w.label = spec.label;
        w.head_terminals = spec.head_terminals;
        w.tail_terminals = spec.tail_terminals;
        for (int k = 0; k < spec.length; ++k) {
            w.atoms.push_back(next_atom++);
        }
        for (auto e : spec.replaced_edges) {
            e = make_edge(e.first, e.second);
            if (!base_.has_edge(e.first, e.second)) {
                throw InvalidArgument("wire " + spec.label + " replaces a non-edge");
            }
            auto in = [](const std::vector<int> &v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); };
            bool spans = (in(w.head_terminals, e.first) && in(w.tail_terminals, e.second)) ||
                         (in(w.head_terminals, e.second) && in(w.tail_terminals, e.first));
            if (!spans) {
                throw InvalidArgument("wire " + spec.label + " does not span one of its replaced edges");
            }
            if (!replaced_all.insert(e).second) {
                throw InvalidArgument("edge replaced by two wires");
            }
            w.replaced_edges.push_back(e);
        }
        std::sort(w.replaced_edges.begin(), w.replaced_edges.end());
        for (int k = 0; k + 1 < spec.length; ++k) {
            edges.push_back(make_edge(w.atoms[k], w.atoms[k + 1]));
        }
        for (int v : w.head_terminals) {
            if (v < 0 || v >= n_base) {
                throw InvalidArgument("terminal out of range");
            }
            edges.push_back(make_edge(w.atoms.front(), num_wire_atoms_ + v));
        }
        for (int v : w.tail_terminals) {
            if (v < 0 || v >= n_base) {
                throw InvalidArgument("terminal out of range");
            }
            edges.push_back(make_edge(w.atoms.back(), num_wire_atoms_ + v));
        }
        wires_.push_back(std::move(w));
    }
    for (const auto &e : base_.edges()) {
        if (!replaced_all.count(e)) {
            edges.push_back(make_edge(num_wire_atoms_ + e.first, num_wire_atoms_ + e.second));
        }
    }
    all_ = Graph(name_, num_wire_atoms_ + n_base, std::move(edges));
}

std::string WiredGraph::atom_label(int atom) const {
    if (atom < 0 || atom >= num_atoms()) {
        throw InvalidArgument("atom id out of range");
    }
    if (atom >= num_wire_atoms_) {
        return std::to_string(atom - num_wire_atoms_ + 1);
    }
    for (const auto &w : wires_) {
        if (atom >= w.atoms.front() && atom <= w.atoms.back()) {
            return w.label + "[" + std::to_string(atom - w.atoms.front()) + "]";
        }
    }
    return "?";
}

WiredGraph wire_platonic(PlatonicName name) {
    auto v = [](int label) { return label - 1; };
    switch (name) {
        case PlatonicName::Tetrahedron:
            // Atom a couples to 1,2 and atom b to 3,4; the chain replaces all four cross edges.
            return WiredGraph(platonic_graph(name),
                              {{"W", 2, {v(1), v(2)}, {v(3), v(4)},
                                {{v(1), v(3)}, {v(1), v(4)}, {v(2), v(3)}, {v(2), v(4)}}}},
                              "K4'");
        case PlatonicName::Cube:
            // The outer square 5-6-7-8, traversed counter-clockwise.
            return WiredGraph(platonic_graph(name),
                              {{"W1", 2, {v(5)}, {v(6)}, {{v(5), v(6)}}},
                               {"W2", 2, {v(6)}, {v(7)}, {{v(6), v(7)}}},
                               {"W3", 2, {v(7)}, {v(8)}, {{v(7), v(8)}}},
                               {"W4", 2, {v(8)}, {v(5)}, {{v(8), v(5)}}}},
                              "Q3'");
        case PlatonicName::Octahedron:
            return WiredGraph(platonic_graph(name),
                              {{"W1", 4, {v(1)}, {v(3)}, {{v(1), v(3)}}},
                               {"W2", 4, {v(3)}, {v(5)}, {{v(3), v(5)}}},
                               {"W3", 4, {v(5)}, {v(1)}, {{v(5), v(1)}}}},
                              "K222'");
    }
    throw UnsupportedGraph("unknown");
}

WiredGraph wire_platonic(std::string_view name) { return wire_platonic(parse_platonic(name)); }

Graph strip_wires(const WiredGraph &wg) {
    const int offset = wg.num_wire_atoms();
    std::vector<Edge> edges;
    for (auto [a, b] : wg.all_edges()) {
        if (a >= offset && b >= offset) {
            edges.push_back({a - offset, b - offset});
        }
    }
    for (const auto &w : wg.wires()) {
        edges.insert(edges.end(), w.replaced_edges.begin(), w.replaced_edges.end());
    }
    return Graph(wg.base().name(), wg.base().num_vertices(), std::move(edges));
}

ScalingRecord scaling_point(int n, int n_prime, std::string label, std::string source) {
    if (n < 1) {
        throw InvalidArgument("scaling point needs N >= 1");
    }
    if (n_prime < n) {
        throw InvalidArgument("scaling point needs N' >= N");
    }
    return {std::move(label), n, n_prime, std::move(source)};
}

ScalingRecord scaling_point(PlatonicName name) {
    auto wg = wire_platonic(name);
    return scaling_point(wg.base().num_vertices(), wg.num_atoms(), to_string(name), "constructed");
}

std::vector<ScalingRecord> builtin_scaling_points() {
    return {scaling_point(PlatonicName::Tetrahedron), scaling_point(PlatonicName::Cube),
            scaling_point(PlatonicName::Octahedron), scaling_point(6, 22, "octahedron", "reported")};
}

namespace {

nlohmann::json edges_json(const std::vector<Edge> &edges) {
    auto out = nlohmann::json::array();
    for (auto [a, b] : edges) {
        out.push_back({a, b});
    }
    return out;
}

std::vector<Edge> edges_from_json(const nlohmann::json &arr) {
    std::vector<Edge> out;
    for (const auto &e : arr) {
        out.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    }
    return out;
}

}  // namespace

nlohmann::json to_json(const Graph &g) {
    return {{"name", g.name()}, {"vertices", g.num_vertices()}, {"edges", edges_json(g.edges())}};
}

nlohmann::json to_json(const WiredGraph &wg) {
    nlohmann::json wires = nlohmann::json::array();
    for (const auto &w : wg.wires()) {
        wires.push_back({{"label", w.label},
                         {"atoms", w.atoms},
                         {"terminals", {w.head_terminals, w.tail_terminals}},
                         {"replaced_edges", edges_json(w.replaced_edges)}});
    }
    return {{"name", wg.name()},
            {"base", to_json(wg.base())},
            {"vertices", wg.num_atoms()},
            {"edges", edges_json(wg.all_edges())},
            {"wires", wires}};
}

WiredGraph wired_graph_from_json(const nlohmann::json &doc) {
    try {
        const auto &b = doc.at("base");
        Graph base(b.value("name", std::string("G")), b.at("vertices").get<int>(), edges_from_json(b.at("edges")));
        std::vector<WireSpec> specs;
        for (const auto &w : doc.at("wires")) {
            WireSpec s;
            s.label = w.value("label", "W" + std::to_string(specs.size() + 1));
            s.length = static_cast<int>(w.at("atoms").size());
            s.head_terminals = w.at("terminals").at(0).get<std::vector<int>>();
            s.tail_terminals = w.at("terminals").at(1).get<std::vector<int>>();
            s.replaced_edges = edges_from_json(w.at("replaced_edges"));
            specs.push_back(std::move(s));
        }
        WiredGraph wg(std::move(base), specs, doc.value("name", std::string()));
        if (doc.contains("edges") &&
            Graph("", wg.num_atoms(), edges_from_json(doc.at("edges"))).edges() != wg.all_edges()) {
            throw InvalidArgument("wired graph edges do not match its wires");
        }
        return wg;
    } catch (const nlohmann::json::exception &e) {
        throw InvalidArgument(std::string("malformed wired-graph document: ") + e.what());
    }
}

}  // namespace rydwire
