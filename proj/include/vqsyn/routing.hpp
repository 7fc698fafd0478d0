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

#include <deque>
#include <stdexcept>
#include <vector>

#include "vqsyn/circuit.hpp"
#include "vqsyn/topology.hpp"

namespace vqsyn {

/// Output of the greedy router. The routed circuit acts on physical
/// wires (width = device size). wire_permutation[p] is the final wire
/// holding the state that started on physical wire p, so
///   routed == permute(wire_permutation) . embed(original, initial map).
struct RouteResult {
    ParamCircuit circuit;
    int swap_count = 0;
    PhysicalMapping final_mapping;
    std::vector<int> wire_permutation;
};

namespace detail {

inline std::vector<int> bfs_distances(const CouplingGraph& g, int source) {
    std::vector<int> dist(static_cast<std::size_t>(g.num_qubits), -1);
    std::deque<int> queue{source};
    dist[static_cast<std::size_t>(source)] = 0;
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int u : g.adjacency[static_cast<std::size_t>(v)]) {
            if (dist[static_cast<std::size_t>(u)] < 0) {
                dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
                queue.push_back(u);
            }
        }
    }
    return dist;
}

} // namespace detail

/// Greedy shortest-path SWAP insertion with no lookahead: each off-edge
/// two-qubit gate walks its first endpoint along the lexicographically
/// smallest shortest path until the endpoints are adjacent. This is a
/// deterministic cost probe for baselines; production transpilers
/// (lookahead, SABRE-class) would do better, so overheads measured with
/// it are upper bounds.
inline RouteResult route(const ParamCircuit& c, const PhysicalMapping& initial,
                         const CouplingGraph& g) {
    if (initial.to_physical.size() < static_cast<std::size_t>(c.num_qubits)) {
        throw std::invalid_argument("route: mapping does not cover all circuit qubits");
    }
    initial.check(g.num_qubits);
    if (!g.connected()) {
        throw std::invalid_argument("route: coupling graph must be connected");
    }

    RouteResult out;
    out.circuit = ParamCircuit(g.num_qubits);
    out.circuit.num_params = c.num_params;
    out.final_mapping = initial;

    auto& cur = out.final_mapping.to_physical;
    // inverse_state[p] = physical wire whose initial state currently sits on p
    std::vector<int> inverse_state(static_cast<std::size_t>(g.num_qubits));
    for (int p = 0; p < g.num_qubits; ++p) {
        inverse_state[static_cast<std::size_t>(p)] = p;
    }
    // phys_to_logical[p] = logical qubit currently on p, or -1
    std::vector<int> phys_to_logical(static_cast<std::size_t>(g.num_qubits), -1);
    for (int l = 0; l < c.num_qubits; ++l) {
        phys_to_logical[static_cast<std::size_t>(cur[static_cast<std::size_t>(l)])] = l;
    }

    auto emit_swap = [&](int a, int b) {
        out.circuit.add(GateKind::SWAP, a, b);
        ++out.swap_count;
        std::swap(inverse_state[static_cast<std::size_t>(a)], inverse_state[static_cast<std::size_t>(b)]);
        const int la = phys_to_logical[static_cast<std::size_t>(a)];
        const int lb = phys_to_logical[static_cast<std::size_t>(b)];
        std::swap(phys_to_logical[static_cast<std::size_t>(a)], phys_to_logical[static_cast<std::size_t>(b)]);
        if (la >= 0) {
            cur[static_cast<std::size_t>(la)] = b;
        }
        if (lb >= 0) {
            cur[static_cast<std::size_t>(lb)] = a;
        }
    };

    for (const auto& gate : c.gates) {
        if (gate.q1 < 0) {
            GateInstance h = gate;
            h.q0 = cur[static_cast<std::size_t>(gate.q0)];
            out.circuit.gates.push_back(h);
            continue;
        }
        int pa = cur[static_cast<std::size_t>(gate.q0)];
        const int pb = cur[static_cast<std::size_t>(gate.q1)];
        while (!g.has_edge(pa, pb)) {
            const auto dist = detail::bfs_distances(g, pb);
            int step = -1;
            for (int u : g.adjacency[static_cast<std::size_t>(pa)]) {
                if (dist[static_cast<std::size_t>(u)] == dist[static_cast<std::size_t>(pa)] - 1) {
                    step = u; // adjacency is sorted: first hit is smallest
                    break;
                }
            }
            if (step < 0) {
                throw std::runtime_error("route: target unreachable (graph disconnected?)");
            }
            emit_swap(pa, step);
            pa = step;
        }
        GateInstance h = gate;
        h.q0 = pa;
        h.q1 = cur[static_cast<std::size_t>(gate.q1)];
        out.circuit.gates.push_back(h);
    }

    out.wire_permutation.assign(static_cast<std::size_t>(g.num_qubits), 0);
    for (int p = 0; p < g.num_qubits; ++p) {
        out.wire_permutation[static_cast<std::size_t>(inverse_state[static_cast<std::size_t>(p)])] = p;
    }
    out.circuit.check();
    return out;
}

/// Rewrites each SWAP as its 3-CNOT expansion.
inline ParamCircuit decompose_swaps(const ParamCircuit& c) {
    ParamCircuit out(c.num_qubits);
    out.num_params = c.num_params;
    for (const auto& g : c.gates) {
        if (g.kind == GateKind::SWAP) {
            out.add(GateKind::CNOT, g.q0, g.q1);
            out.add(GateKind::CNOT, g.q1, g.q0);
            out.add(GateKind::CNOT, g.q0, g.q1);
        } else {
            out.gates.push_back(g);
        }
    }
    return out;
}

/// Post-transpilation size figures: routed, SWAPs expanded to 3 CNOTs.
struct CompiledStats {
    int swap_count = 0;
    int compiled_depth = 0;
    int compiled_gate_count = 0;
    int compiled_cnot_count = 0;
};

inline CompiledStats compiled_stats(const ParamCircuit& c, const PhysicalMapping& mapping,
                                    const CouplingGraph& g) {
    const RouteResult routed = route(c, mapping, g);
    const ParamCircuit compiled = decompose_swaps(routed.circuit);
    CompiledStats s;
    s.swap_count = routed.swap_count;
    s.compiled_depth = depth(compiled);
    s.compiled_gate_count = static_cast<int>(compiled.gates.size());
    s.compiled_cnot_count = compiled.gate_count(GateKind::CNOT);
    return s;
}

} // namespace vqsyn
