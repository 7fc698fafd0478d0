// Copyright 2026 the vqsyn authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "vqsyn/circuit.hpp"

namespace vqsyn {

struct TopologyError : std::runtime_error {
    explicit TopologyError(const std::string& what) : std::runtime_error(what) {}
};

/// Undirected device connectivity: physical qubits are vertices, native
/// two-qubit connections are edges. Stored canonically (a < b, sorted).
struct CouplingGraph {
    int num_qubits = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<int>> adjacency;

    static CouplingGraph from_edges(int n, std::vector<std::pair<int, int>> raw_edges) {
        if (n <= 0) {
            throw TopologyError("coupling graph needs a positive qubit count");
        }
        CouplingGraph g;
        g.num_qubits = n;
        std::set<std::pair<int, int>> canon;
        for (auto [a, b] : raw_edges) {
            if (a == b) {
                throw TopologyError("coupling graph has a self-loop on qubit " + std::to_string(a));
            }
            if (a < 0 || b < 0 || a >= n || b >= n) {
                throw TopologyError("coupling graph edge references qubit outside [0, " +
                                    std::to_string(n) + ")");
            }
            canon.insert({std::min(a, b), std::max(a, b)});
        }
        g.edges.assign(canon.begin(), canon.end());
        g.adjacency.assign(static_cast<std::size_t>(n), {});
        for (auto [a, b] : g.edges) {
            g.adjacency[static_cast<std::size_t>(a)].push_back(b);
            g.adjacency[static_cast<std::size_t>(b)].push_back(a);
        }
        for (auto& nbrs : g.adjacency) {
            std::sort(nbrs.begin(), nbrs.end());
        }
        return g;
    }

    bool has_edge(int a, int b) const {
        const auto key = std::make_pair(std::min(a, b), std::max(a, b));
        return std::binary_search(edges.begin(), edges.end(), key);
    }

    bool connected() const {
        std::vector<int> all(static_cast<std::size_t>(num_qubits));
        std::iota(all.begin(), all.end(), 0);
        return connected_subset(all);
    }

    /// True iff the induced subgraph on `qubits` is connected (and nonempty).
    bool connected_subset(const std::vector<int>& qubits) const {
        if (qubits.empty()) {
            return false;
        }
        std::set<int> in(qubits.begin(), qubits.end());
        std::vector<int> stack{qubits.front()};
        std::set<int> seen{qubits.front()};
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int u : adjacency[static_cast<std::size_t>(v)]) {
                if (in.count(u) && !seen.count(u)) {
                    seen.insert(u);
                    stack.push_back(u);
                }
            }
        }
        return seen.size() == in.size();
    }
};

inline CouplingGraph line_topology(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) {
        e.push_back({i, i + 1});
    }
    return CouplingGraph::from_edges(n, std::move(e));
}

inline CouplingGraph grid_topology(int rows, int cols) {
    std::vector<std::pair<int, int>> e;
    auto id = [cols](int r, int c) { return r * cols + c; };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) {
                e.push_back({id(r, c), id(r, c + 1)});
            }
            if (r + 1 < rows) {
                e.push_back({id(r, c), id(r + 1, c)});
            }
        }
    }
    return CouplingGraph::from_edges(rows * cols, std::move(e));
}

/// 5-qubit T-shape (ibmq_quito-like): 0-1-2 with 1-3-4 hanging off.
inline CouplingGraph tshape5_topology() {
    return CouplingGraph::from_edges(5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}});
}

/// 65-qubit heavy-hex sample (72 connections): five rows of qubits joined
/// by three-qubit bridge columns, as on 65-qubit IBM devices.
inline CouplingGraph heavyhex65_topology() {
    std::vector<std::pair<int, int>> e;
    auto chain = [&e](int from, int to) {
        for (int i = from; i < to; ++i) {
            e.push_back({i, i + 1});
        }
    };
    chain(0, 9);    // row 0: 0..9
    chain(13, 23);  // row 1: 13..23
    chain(27, 37);  // row 2: 27..37
    chain(41, 51);  // row 3: 41..51
    chain(55, 64);  // row 4: 55..64
    const std::vector<std::pair<int, int>> bridges = {
        {0, 10},  {4, 11},  {8, 12},  {10, 13}, {11, 17}, {12, 21},
        {15, 24}, {19, 25}, {23, 26}, {24, 29}, {25, 33}, {26, 37},
        {27, 38}, {31, 39}, {35, 40}, {38, 41}, {39, 45}, {40, 49},
        {43, 52}, {47, 53}, {51, 54}, {52, 56}, {53, 60}, {54, 64}};
    e.insert(e.end(), bridges.begin(), bridges.end());
    return CouplingGraph::from_edges(65, std::move(e));
}

/// Parses topology text: JSON with fields `qubits` and `edges`.
inline CouplingGraph load_topology(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw TopologyError(std::string("topology parse error: ") + e.what());
    }
    try {
        const int n = j.at("qubits").get<int>();
        std::vector<std::pair<int, int>> edges;
        for (const auto& pair : j.at("edges")) {
            if (!pair.is_array() || pair.size() != 2) {
                throw TopologyError("topology edge entries must be [a, b] pairs");
            }
            edges.push_back({pair[0].get<int>(), pair[1].get<int>()});
        }
        return CouplingGraph::from_edges(n, std::move(edges));
    } catch (const nlohmann::json::exception& e) {
        throw TopologyError(std::string("topology schema error: ") + e.what());
    }
}

inline CouplingGraph load_topology_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw TopologyError("cannot open topology file '" + path + "'");
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_topology(text);
}

/// Resolves a named built-in ("line:4", "grid:2x3", "tshape5",
/// "heavyhex65"); anything else is treated as a file path.
inline CouplingGraph named_topology(const std::string& name) {
    if (name == "tshape5") {
        return tshape5_topology();
    }
    if (name == "heavyhex65") {
        return heavyhex65_topology();
    }
    if (name.rfind("line:", 0) == 0) {
        return line_topology(std::stoi(name.substr(5)));
    }
    if (name.rfind("grid:", 0) == 0) {
        const auto spec = name.substr(5);
        const auto x = spec.find('x');
        if (x == std::string::npos) {
            throw TopologyError("grid topology wants grid:RxC");
        }
        return grid_topology(std::stoi(spec.substr(0, x)), std::stoi(spec.substr(x + 1)));
    }
    return load_topology_file(name);
}

/// A connected induced piece of the device graph.
struct Subgraph {
    std::vector<int> qubits;                 // sorted device indices
    std::vector<std::pair<int, int>> edges;  // induced, device indices, canonical
};

inline Subgraph induced_subgraph(const CouplingGraph& g, std::vector<int> qubits) {
    std::sort(qubits.begin(), qubits.end());
    Subgraph s;
    s.qubits = std::move(qubits);
    for (std::size_t i = 0; i < s.qubits.size(); ++i) {
        for (std::size_t j = i + 1; j < s.qubits.size(); ++j) {
            if (g.has_edge(s.qubits[i], s.qubits[j])) {
                s.edges.push_back({s.qubits[i], s.qubits[j]});
            }
        }
    }
    return s;
}

/// All connected induced subgraphs with `size` vertices, one per qubit
/// set, sorted by qubit set. (ESU enumeration.)
inline std::vector<Subgraph> enumerate_subgraphs(const CouplingGraph& g, int size) {
    if (size < 1 || size > g.num_qubits) {
        throw std::invalid_argument("enumerate_subgraphs: bad size");
    }
    std::vector<std::vector<int>> found;

    // ESU: grow from each root v using only vertices > v; the extension set
    // only ever receives neighbors not already adjacent to the subgraph.
    std::vector<char> in_sub(static_cast<std::size_t>(g.num_qubits), 0);
    std::vector<int> sub;

    std::function<void(std::vector<int>, int)> extend = [&](std::vector<int> ext, int root) {
        if (static_cast<int>(sub.size()) == size) {
            found.push_back(sub);
            return;
        }
        while (!ext.empty()) {
            const int w = ext.back();
            ext.pop_back();
            std::vector<int> next_ext = ext;
            for (int u : g.adjacency[static_cast<std::size_t>(w)]) {
                if (u <= root || in_sub[static_cast<std::size_t>(u)]) {
                    continue;
                }
                bool neighbor_of_sub = false;
                for (int s : sub) {
                    if (g.has_edge(u, s)) {
                        neighbor_of_sub = true;
                        break;
                    }
                }
                if (!neighbor_of_sub && std::find(next_ext.begin(), next_ext.end(), u) == next_ext.end()) {
                    next_ext.push_back(u);
                }
            }
            sub.push_back(w);
            in_sub[static_cast<std::size_t>(w)] = 1;
            extend(std::move(next_ext), root);
            in_sub[static_cast<std::size_t>(w)] = 0;
            sub.pop_back();
        }
    };

    for (int v = 0; v < g.num_qubits; ++v) {
        sub = {v};
        in_sub[static_cast<std::size_t>(v)] = 1;
        std::vector<int> ext;
        for (int u : g.adjacency[static_cast<std::size_t>(v)]) {
            if (u > v) {
                ext.push_back(u);
            }
        }
        extend(std::move(ext), v);
        in_sub[static_cast<std::size_t>(v)] = 0;
    }

    for (auto& q : found) {
        std::sort(q.begin(), q.end());
    }
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());

    std::vector<Subgraph> out;
    out.reserve(found.size());
    for (auto& q : found) {
        out.push_back(induced_subgraph(g, q));
    }
    return out;
}

/// Shape pattern for sub-circuit bases: 2..4 local qubits plus required
/// internal edges.
struct SubgraphTemplate {
    std::string id;
    int qubit_count = 0;
    std::vector<std::pair<int, int>> edges; // local indices

    bool connected() const {
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(qubit_count));
        for (auto [a, b] : edges) {
            adj[static_cast<std::size_t>(a)].push_back(b);
            adj[static_cast<std::size_t>(b)].push_back(a);
        }
        std::vector<char> seen(static_cast<std::size_t>(qubit_count), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int u : adj[static_cast<std::size_t>(v)]) {
                if (!seen[static_cast<std::size_t>(u)]) {
                    seen[static_cast<std::size_t>(u)] = 1;
                    ++count;
                    stack.push_back(u);
                }
            }
        }
        return count == qubit_count;
    }
};

/// The four default bases: paths of length 2..4 and a 4-qubit star
/// (T-junction).
inline std::vector<SubgraphTemplate> default_templates() {
    return {
        {"path2", 2, {{0, 1}}},
        {"path3", 3, {{0, 1}, {1, 2}}},
        {"path4", 4, {{0, 1}, {1, 2}, {2, 3}}},
        {"star3", 4, {{0, 1}, {0, 2}, {0, 3}}},
    };
}

inline const SubgraphTemplate& template_by_id(const std::vector<SubgraphTemplate>& templates,
                                              const std::string& id) {
    for (const auto& t : templates) {
        if (t.id == id) {
            return t;
        }
    }
    throw std::invalid_argument("unknown subgraph template '" + id + "'");
}

/// Exact embedding of a template into an induced subgraph: returns the
/// lexicographically smallest map local index -> device qubit such that
/// every template edge lands on an induced edge, or nullopt.
inline std::optional<std::vector<int>> find_embedding(const SubgraphTemplate& t, const Subgraph& s) {
    if (t.qubit_count != static_cast<int>(s.qubits.size())) {
        return std::nullopt;
    }
    auto has_induced_edge = [&s](int a, int b) {
        const auto key = std::make_pair(std::min(a, b), std::max(a, b));
        return std::find(s.edges.begin(), s.edges.end(), key) != s.edges.end();
    };
    std::vector<int> perm(s.qubits.size());
    std::iota(perm.begin(), perm.end(), 0);
    // perm is iterated in lexicographic order, so the first hit is the
    // lexicographically smallest embedding.
    do {
        bool ok = true;
        for (auto [a, b] : t.edges) {
            const int pa = s.qubits[static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])];
            const int pb = s.qubits[static_cast<std::size_t>(perm[static_cast<std::size_t>(b)])];
            if (!has_induced_edge(pa, pb)) {
                ok = false;
                break;
            }
        }
        if (ok) {
            std::vector<int> map(s.qubits.size());
            for (std::size_t i = 0; i < map.size(); ++i) {
                map[i] = s.qubits[static_cast<std::size_t>(perm[i])];
            }
            return map;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::nullopt;
}

/// Injective assignment of logical circuit qubits to physical qubits.
struct PhysicalMapping {
    std::vector<int> to_physical; // index = logical qubit

    void check(int device_size) const {
        std::set<int> seen;
        for (int p : to_physical) {
            if (p < 0 || p >= device_size) {
                throw std::invalid_argument("PhysicalMapping: physical index out of range");
            }
            if (!seen.insert(p).second) {
                throw std::invalid_argument("PhysicalMapping: mapping is not injective");
            }
        }
    }
};

/// True iff every two-qubit gate lands on a device edge under the mapping.
inline bool is_compatible(const ParamCircuit& c, const PhysicalMapping& mapping,
                          const CouplingGraph& g) {
    if (mapping.to_physical.size() < static_cast<std::size_t>(c.num_qubits)) {
        throw std::invalid_argument("is_compatible: mapping does not cover all circuit qubits");
    }
    mapping.check(g.num_qubits);
    for (const auto& gate : c.gates) {
        if (gate.q1 < 0) {
            continue;
        }
        const int pa = mapping.to_physical[static_cast<std::size_t>(gate.q0)];
        const int pb = mapping.to_physical[static_cast<std::size_t>(gate.q1)];
        if (!g.has_edge(pa, pb)) {
            return false;
        }
    }
    return true;
}

struct PartitionError : std::runtime_error {
    explicit PartitionError(const std::string& what) : std::runtime_error(what) {}
};

/// Disjoint cover of the target qubits by connected parts with sizes drawn
/// from allowed_sizes. At most one leftover singleton is permitted; it is
/// reported separately (stitching connects it later).
struct Partition {
    std::vector<Subgraph> parts;
    std::optional<int> leftover;
};

namespace detail {

/// BFS chunk of `size` vertices from `start`, restricted to `remaining`;
/// neighbors visited in ascending order. Empty if fewer reachable.
inline std::vector<int> bfs_chunk(const CouplingGraph& g, const std::set<int>& remaining, int start,
                                  int size) {
    std::vector<int> chunk;
    std::set<int> seen{start};
    std::vector<int> queue{start};
    std::size_t head = 0;
    while (head < queue.size() && static_cast<int>(chunk.size()) < size) {
        const int v = queue[head++];
        chunk.push_back(v);
        for (int u : g.adjacency[static_cast<std::size_t>(v)]) {
            if (remaining.count(u) && !seen.count(u)) {
                seen.insert(u);
                queue.push_back(u);
            }
        }
    }
    if (static_cast<int>(chunk.size()) < size) {
        return {};
    }
    return chunk;
}

inline bool partition_solve(const CouplingGraph& g, std::set<int>& remaining,
                            const std::vector<int>& sizes, bool allow_leftover,
                            std::vector<std::vector<int>>& parts, std::optional<int>& leftover) {
    if (remaining.empty()) {
        return true;
    }
    const int v = *remaining.begin();
    for (int size : sizes) {
        const auto chunk = bfs_chunk(g, remaining, v, size);
        if (chunk.empty()) {
            continue;
        }
        for (int q : chunk) {
            remaining.erase(q);
        }
        parts.push_back(chunk);
        if (partition_solve(g, remaining, sizes, allow_leftover, parts, leftover)) {
            return true;
        }
        parts.pop_back();
        for (int q : chunk) {
            remaining.insert(q);
        }
    }
    if (allow_leftover && !leftover.has_value()) {
        leftover = v;
        remaining.erase(v);
        if (partition_solve(g, remaining, sizes, allow_leftover, parts, leftover)) {
            return true;
        }
        remaining.insert(v);
        leftover.reset();
    }
    return false;
}

} // namespace detail

/// Greedy BFS peeling with backtracking over chunk sizes (ascending).
/// Complete covers are preferred; a single flagged leftover singleton is
/// accepted only when no complete cover exists.
inline Partition partition_qubits(const CouplingGraph& g, std::vector<int> target_qubits,
                                  std::vector<int> allowed_sizes) {
    std::sort(target_qubits.begin(), target_qubits.end());
    target_qubits.erase(std::unique(target_qubits.begin(), target_qubits.end()), target_qubits.end());
    if (!g.connected_subset(target_qubits)) {
        throw std::invalid_argument("partition_qubits: target qubits must induce a connected subgraph");
    }
    std::sort(allowed_sizes.begin(), allowed_sizes.end());
    allowed_sizes.erase(std::unique(allowed_sizes.begin(), allowed_sizes.end()), allowed_sizes.end());
    if (allowed_sizes.empty()) {
        throw std::invalid_argument("partition_qubits: no allowed sizes");
    }

    for (const bool allow_leftover : {false, true}) {
        std::set<int> remaining(target_qubits.begin(), target_qubits.end());
        std::vector<std::vector<int>> parts;
        std::optional<int> leftover;
        if (detail::partition_solve(g, remaining, allowed_sizes, allow_leftover, parts, leftover)) {
            Partition out;
            for (auto& p : parts) {
                out.parts.push_back(induced_subgraph(g, p));
            }
            std::sort(out.parts.begin(), out.parts.end(),
                      [](const Subgraph& a, const Subgraph& b) { return a.qubits < b.qubits; });
            out.leftover = leftover;
            return out;
        }
    }

    // Report the residue the greedy-first pass gets stuck on.
    std::set<int> remaining(target_qubits.begin(), target_qubits.end());
    std::vector<std::vector<int>> parts;
    while (!remaining.empty()) {
        const int v = *remaining.begin();
        std::vector<int> best;
        for (auto it = allowed_sizes.rbegin(); it != allowed_sizes.rend(); ++it) {
            best = detail::bfs_chunk(g, remaining, v, *it);
            if (!best.empty()) {
                break;
            }
        }
        if (best.empty()) {
            break;
        }
        for (int q : best) {
            remaining.erase(q);
        }
    }
    std::string residue;
    for (int q : remaining) {
        residue += (residue.empty() ? "" : ",") + std::to_string(q);
    }
    throw PartitionError("partition_qubits: no feasible cover; stuck residue {" + residue + "}");
}

} // namespace vqsyn
