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
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vqsyn/gates.hpp"

namespace vqsyn {

/// One gate applied to concrete wires. Rotations reference a slot in the
/// circuit's parameter vector; all other gates carry param_index == -1.
struct GateInstance {
    GateKind kind = GateKind::RX;
    int q0 = 0;
    int q1 = -1;        // second wire for CNOT/SWAP, -1 otherwise
    int param_index = -1;

    bool touches(int q) const { return q0 == q || q1 == q; }

    bool same_gate(const GateInstance& o) const {
        return kind == o.kind && q0 == o.q0 && q1 == o.q1;
    }

    bool operator==(const GateInstance& o) const {
        return kind == o.kind && q0 == o.q0 && q1 == o.q1 && param_index == o.param_index;
    }
};

/// Ordered gate list over num_qubits wires with num_params free angles.
struct ParamCircuit {
    int num_qubits = 0;
    int num_params = 0;
    std::vector<GateInstance> gates;

    ParamCircuit() = default;
    explicit ParamCircuit(int n) : num_qubits(n) {}

    void add(GateKind kind, int q) {
        if (is_rotation(kind)) {
            throw std::invalid_argument("add: rotation gates need a parameter slot");
        }
        if (gate_arity(kind) != 1) {
            throw std::invalid_argument("add: two-qubit gate needs two wires");
        }
        check_wire(q);
        gates.push_back({kind, q, -1, -1});
    }

    void add(GateKind kind, int q0, int q1) {
        if (gate_arity(kind) != 2) {
            throw std::invalid_argument("add: single-qubit gate given two wires");
        }
        check_wire(q0);
        check_wire(q1);
        if (q0 == q1) {
            throw std::invalid_argument("add: two-qubit gate wires must differ");
        }
        gates.push_back({kind, q0, q1, -1});
    }

    /// Appends a rotation on a fresh parameter slot; returns the slot.
    int add_rotation(GateKind kind, int q) {
        const int slot = num_params++;
        add_rotation(kind, q, slot);
        return slot;
    }

    /// Appends a rotation bound to an existing slot.
    void add_rotation(GateKind kind, int q, int slot) {
        if (!is_rotation(kind)) {
            throw std::invalid_argument("add_rotation: not a rotation gate");
        }
        check_wire(q);
        if (slot < 0 || slot >= num_params) {
            throw std::invalid_argument("add_rotation: parameter slot out of range");
        }
        gates.push_back({kind, q, -1, slot});
    }

    /// Validates the representation invariants; throws on violation.
    void check() const {
        for (const auto& g : gates) {
            if (g.q0 < 0 || g.q0 >= num_qubits ||
                (gate_arity(g.kind) == 2 && (g.q1 < 0 || g.q1 >= num_qubits || g.q1 == g.q0)) ||
                (gate_arity(g.kind) == 1 && g.q1 != -1)) {
                throw std::invalid_argument("ParamCircuit: bad wire indices");
            }
            if (is_rotation(g.kind)) {
                if (g.param_index < 0 || g.param_index >= num_params) {
                    throw std::invalid_argument("ParamCircuit: rotation without valid parameter slot");
                }
            } else if (g.param_index != -1) {
                throw std::invalid_argument("ParamCircuit: parameter slot on non-rotation gate");
            }
        }
    }

    int gate_count(GateKind kind) const {
        int n = 0;
        for (const auto& g : gates) {
            n += (g.kind == kind) ? 1 : 0;
        }
        return n;
    }

  private:
    void check_wire(int q) const {
        if (q < 0 || q >= num_qubits) {
            throw std::invalid_argument("ParamCircuit: wire index out of range");
        }
    }
};

/// Circuit with all angles bound to concrete values (encoders, parsed
/// QASM). params[i] is the angle of slot i.
struct BoundCircuit {
    ParamCircuit circuit;
    std::vector<double> params;
};

/// Gate-layer depth: every gate costs one time step; gates sharing a wire
/// are ordered.
inline int depth(const ParamCircuit& c) {
    std::vector<int> wire(static_cast<std::size_t>(c.num_qubits), 0);
    int d = 0;
    for (const auto& g : c.gates) {
        int t = wire[static_cast<std::size_t>(g.q0)];
        if (g.q1 >= 0) {
            t = std::max(t, wire[static_cast<std::size_t>(g.q1)]);
        }
        ++t;
        wire[static_cast<std::size_t>(g.q0)] = t;
        if (g.q1 >= 0) {
            wire[static_cast<std::size_t>(g.q1)] = t;
        }
        d = std::max(d, t);
    }
    return d;
}

/// Rewrites wires through map (old wire -> new wire); slots unchanged.
inline ParamCircuit remap_qubits(const ParamCircuit& c, const std::vector<int>& map, int new_width) {
    if (map.size() != static_cast<std::size_t>(c.num_qubits)) {
        throw std::invalid_argument("remap_qubits: map size mismatch");
    }
    ParamCircuit out(new_width);
    out.num_params = c.num_params;
    out.gates.reserve(c.gates.size());
    for (const auto& g : c.gates) {
        GateInstance h = g;
        h.q0 = map[static_cast<std::size_t>(g.q0)];
        h.q1 = (g.q1 >= 0) ? map[static_cast<std::size_t>(g.q1)] : -1;
        out.gates.push_back(h);
    }
    out.check();
    return out;
}

/// Appends src (wires rewritten through qubit_map) to dst; src's parameter
/// slots are shifted past dst's existing slots.
inline void append_circuit(ParamCircuit& dst, const ParamCircuit& src, const std::vector<int>& qubit_map) {
    if (qubit_map.size() != static_cast<std::size_t>(src.num_qubits)) {
        throw std::invalid_argument("append_circuit: map size mismatch");
    }
    const int offset = dst.num_params;
    dst.num_params += src.num_params;
    for (const auto& g : src.gates) {
        GateInstance h = g;
        h.q0 = qubit_map[static_cast<std::size_t>(g.q0)];
        h.q1 = (g.q1 >= 0) ? qubit_map[static_cast<std::size_t>(g.q1)] : -1;
        if (h.param_index >= 0) {
            h.param_index += offset;
        }
        dst.gates.push_back(h);
    }
    dst.check();
}

/// Result of simplify(). Slot k of the simplified circuit equals the sum
/// of the original slots in param_merge[k] (repeats allowed).
struct SimplifyResult {
    ParamCircuit circuit;
    std::vector<std::vector<int>> param_merge;
};

/// Folds an original parameter vector through a simplification.
inline std::vector<double> fold_params(const SimplifyResult& s, std::span<const double> old_params) {
    std::vector<double> out;
    out.reserve(s.param_merge.size());
    for (const auto& merged : s.param_merge) {
        double v = 0.0;
        for (int idx : merged) {
            v += old_params[static_cast<std::size_t>(idx)];
        }
        out.push_back(v);
    }
    return out;
}

/// Peephole simplification run to a fixed point:
///   - adjacent identical rotations on one wire merge into a single slot
///     (angles add),
///   - adjacent identical CNOT pairs (same control and target, nothing in
///     between on either wire) cancel.
/// The unitary is preserved under fold_params substitution.
inline SimplifyResult simplify(const ParamCircuit& c) {
    struct Work {
        GateKind kind;
        int q0, q1;
        std::vector<int> slots; // original slots summed into this gate
    };
    std::vector<Work> work;
    work.reserve(c.gates.size());
    for (const auto& g : c.gates) {
        Work w{g.kind, g.q0, g.q1, {}};
        if (g.param_index >= 0) {
            w.slots.push_back(g.param_index);
        }
        work.push_back(std::move(w));
    }

    auto next_on_wire = [&](std::size_t i, int q) -> std::ptrdiff_t {
        for (std::size_t j = i + 1; j < work.size(); ++j) {
            if (work[j].q0 == q || work[j].q1 == q) {
                return static_cast<std::ptrdiff_t>(j);
            }
        }
        return -1;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < work.size() && !changed; ++i) {
            const Work& g = work[i];
            if (is_rotation(g.kind)) {
                const auto j = next_on_wire(i, g.q0);
                if (j >= 0 && work[static_cast<std::size_t>(j)].kind == g.kind &&
                    work[static_cast<std::size_t>(j)].q0 == g.q0) {
                    auto& a = work[i];
                    auto& b = work[static_cast<std::size_t>(j)];
                    a.slots.insert(a.slots.end(), b.slots.begin(), b.slots.end());
                    work.erase(work.begin() + j);
                    changed = true;
                }
            } else if (g.kind == GateKind::CNOT) {
                const auto j0 = next_on_wire(i, g.q0);
                const auto j1 = next_on_wire(i, g.q1);
                if (j0 >= 0 && j0 == j1) {
                    const Work& h = work[static_cast<std::size_t>(j0)];
                    if (h.kind == GateKind::CNOT && h.q0 == g.q0 && h.q1 == g.q1) {
                        work.erase(work.begin() + j0);
                        work.erase(work.begin() + static_cast<std::ptrdiff_t>(i));
                        changed = true;
                    }
                }
            }
        }
    }

    SimplifyResult out;
    out.circuit.num_qubits = c.num_qubits;
    for (const auto& w : work) {
        GateInstance g{w.kind, w.q0, w.q1, -1};
        if (is_rotation(w.kind)) {
            g.param_index = out.circuit.num_params++;
            out.param_merge.push_back(w.slots);
        }
        out.circuit.gates.push_back(g);
    }
    out.circuit.check();
    return out;
}

/// Canonical structural key (dedup and equality after simplify).
inline std::string circuit_key(const ParamCircuit& c) {
    std::ostringstream os;
    os << c.num_qubits << '|';
    for (const auto& g : c.gates) {
        os << gate_name(g.kind) << ':' << g.q0;
        if (g.q1 >= 0) {
            os << ',' << g.q1;
        }
        if (g.param_index >= 0) {
            os << '@' << g.param_index;
        }
        os << ';';
    }
    return os.str();
}

} // namespace vqsyn
