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

#include <string>
#include <vector>

#include "vqsyn/ansatz.hpp"
#include "vqsyn/routing.hpp"

namespace vqsyn {

/// Topology-oblivious random circuit over all-to-all connectivity; the
/// transpilation cost baseline. Immediate repeats of the same gate on the
/// same wires are rejected so the gate count is not padded with pairs a
/// compiler would cancel for free.
inline ParamCircuit random_dense_circuit(int num_qubits, int num_gates, double cnot_fraction,
                                         Rng& rng) {
    if (num_qubits < 2) {
        throw std::invalid_argument("random_dense_circuit: needs at least 2 qubits");
    }
    ParamCircuit c(num_qubits);
    std::vector<int> last_on_wire(static_cast<std::size_t>(num_qubits), -1);
    const GateKind rotations[] = {GateKind::RX, GateKind::RY, GateKind::RZ};
    while (static_cast<int>(c.gates.size()) < num_gates) {
        GateInstance candidate;
        if (rng.coin(cnot_fraction)) {
            const int a = static_cast<int>(rng.integer(static_cast<std::size_t>(num_qubits)));
            int b = static_cast<int>(rng.integer(static_cast<std::size_t>(num_qubits - 1)));
            if (b >= a) {
                ++b;
            }
            candidate = {GateKind::CNOT, a, b, -1};
        } else {
            const GateKind kind = rotations[rng.integer(3)];
            const int q = static_cast<int>(rng.integer(static_cast<std::size_t>(num_qubits)));
            candidate = {kind, q, -1, 0};
        }
        bool repeat = false;
        for (int q : {candidate.q0, candidate.q1}) {
            if (q < 0) {
                continue;
            }
            const int last = last_on_wire[static_cast<std::size_t>(q)];
            if (last >= 0 && c.gates[static_cast<std::size_t>(last)].same_gate(candidate)) {
                repeat = true;
                break;
            }
        }
        if (repeat) {
            continue;
        }
        if (is_rotation(candidate.kind)) {
            c.add_rotation(candidate.kind, candidate.q0);
        } else {
            c.add(candidate.kind, candidate.q0, candidate.q1);
        }
        const int placed = static_cast<int>(c.gates.size()) - 1;
        last_on_wire[static_cast<std::size_t>(candidate.q0)] = placed;
        if (candidate.q1 >= 0) {
            last_on_wire[static_cast<std::size_t>(candidate.q1)] = placed;
        }
    }
    return c;
}

/// Hardware-efficient layered baseline: per layer, RY on every wire then a
/// CNOT chain 0-1, 1-2, ...
inline ParamCircuit layered_ansatz(int num_qubits, int layers) {
    ParamCircuit c(num_qubits);
    for (int l = 0; l < layers; ++l) {
        for (int q = 0; q < num_qubits; ++q) {
            c.add_rotation(GateKind::RY, q);
        }
        for (int q = 0; q + 1 < num_qubits; ++q) {
            c.add(GateKind::CNOT, q, q + 1);
        }
    }
    return c;
}

/// Non-optimal initial layout: a shuffled assignment of the ansatz onto
/// its own footprint, chosen so that at least one two-qubit gate falls off
/// an edge (when the circuit has two-qubit gates at all).
inline PhysicalMapping noil_mapping(const Ansatz& ansatz, const CouplingGraph& device, Rng& rng) {
    if (ansatz.circuit.num_qubits < 2) {
        throw std::invalid_argument("noil_mapping: needs at least 2 qubits to shuffle");
    }
    bool has_two_qubit = false;
    for (const auto& g : ansatz.circuit.gates) {
        has_two_qubit |= (g.q1 >= 0);
    }
    PhysicalMapping shuffled = ansatz.mapping;
    for (int attempt = 0; attempt < 200; ++attempt) {
        shuffle(shuffled.to_physical, rng);
        if (!has_two_qubit || !is_compatible(ansatz.circuit, shuffled, device)) {
            return shuffled;
        }
    }
    return shuffled; // densely connected device: every layout is compatible
}

/// One row of the transpilation-cost comparison table.
struct ComparisonRow {
    std::string variant;
    std::uint64_t seed = 0;
    int raw_depth = 0;
    int raw_gates = 0;
    int raw_cnots = 0;
    CompiledStats compiled;
};

inline ComparisonRow make_row(const std::string& variant, std::uint64_t seed,
                              const ParamCircuit& circuit, const PhysicalMapping& mapping,
                              const CouplingGraph& device) {
    ComparisonRow row;
    row.variant = variant;
    row.seed = seed;
    row.raw_depth = depth(circuit);
    row.raw_gates = static_cast<int>(circuit.gates.size());
    row.raw_cnots = circuit.gate_count(GateKind::CNOT);
    row.compiled = compiled_stats(circuit, mapping, device);
    return row;
}

/// Routing-cost comparison: the ansatz under its native mapping, under a
/// shuffled (NOIL) mapping, and size-matched random and layered baselines
/// (one random draw per seed).
inline std::vector<ComparisonRow> compare_ansatz(const Ansatz& ansatz, const CouplingGraph& device,
                                                 int random_seeds, std::uint64_t seed) {
    std::vector<ComparisonRow> rows;
    rows.push_back(make_row("native", seed, ansatz.circuit, ansatz.mapping, device));

    Rng noil_rng(derive_seed(seed, 0x4e4f494c));
    rows.push_back(make_row("noil", seed, ansatz.circuit, noil_mapping(ansatz, device, noil_rng),
                            device));

    const int gates = static_cast<int>(ansatz.circuit.gates.size());
    const int num_qubits = ansatz.circuit.num_qubits;
    for (int i = 0; i < random_seeds; ++i) {
        Rng rng(derive_seed(seed, 0x52414e44, static_cast<std::uint64_t>(i)));
        const ParamCircuit random = random_dense_circuit(num_qubits, gates, 0.35, rng);
        rows.push_back(make_row("random", static_cast<std::uint64_t>(i), random, ansatz.mapping,
                                device));
    }

    // layer count sized to roughly match the ansatz gate count
    const int gates_per_layer = 2 * num_qubits - 1;
    const int layers = std::max(1, (gates + gates_per_layer / 2) / gates_per_layer);
    rows.push_back(make_row("layered", seed, layered_ansatz(num_qubits, layers), ansatz.mapping,
                            device));
    return rows;
}

inline void save_comparison_csv(const std::vector<ComparisonRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write comparison file '" + path + "'");
    }
    out << "variant,seed,raw_depth,raw_gates,raw_cnots,swaps,compiled_depth,compiled_gates,"
           "compiled_cnots\n";
    for (const auto& r : rows) {
        out << r.variant << ',' << r.seed << ',' << r.raw_depth << ',' << r.raw_gates << ','
            << r.raw_cnots << ',' << r.compiled.swap_count << ',' << r.compiled.compiled_depth
            << ',' << r.compiled.compiled_gate_count << ',' << r.compiled.compiled_cnot_count
            << '\n';
    }
}

} // namespace vqsyn
