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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vqsyn/routing.hpp"
#include "vqsyn/subcircuit.hpp"

namespace vqsyn {

/// How library entries are picked while assembling the initial ansatz.
enum class SelectionPolicy { EXP, ENT, MIXED, RANDOM };

/// Where the next sub-circuit goes: the least-loaded block, or blocks in
/// decreasing size order.
enum class Placement { Balanced, DecreasingSize };

enum class StitchKind { CNOT, CRX, SWAP };

/// Idle targets the least-loaded crossing edge; BlockEnd adds one stitch
/// per adjacent block pair.
enum class StitchPlacement { Idle, BlockEnd };

inline SelectionPolicy policy_from_name(const std::string& s) {
    if (s == "exp") return SelectionPolicy::EXP;
    if (s == "ent") return SelectionPolicy::ENT;
    if (s == "mixed") return SelectionPolicy::MIXED;
    if (s == "random") return SelectionPolicy::RANDOM;
    throw std::invalid_argument("unknown selection policy '" + s + "'");
}

inline const char* policy_name(SelectionPolicy p) {
    switch (p) {
        case SelectionPolicy::EXP: return "exp";
        case SelectionPolicy::ENT: return "ent";
        case SelectionPolicy::MIXED: return "mixed";
        case SelectionPolicy::RANDOM: return "random";
    }
    return "?";
}

inline StitchKind stitch_kind_from_name(const std::string& s) {
    if (s == "cnot") return StitchKind::CNOT;
    if (s == "crx") return StitchKind::CRX;
    if (s == "swap") return StitchKind::SWAP;
    throw std::invalid_argument("unknown stitch kind '" + s + "'");
}

inline const char* stitch_kind_name(StitchKind k) {
    switch (k) {
        case StitchKind::CNOT: return "cnot";
        case StitchKind::CRX: return "crx";
        case StitchKind::SWAP: return "swap";
    }
    return "?";
}

/// One placed building block or stitch, enough to rebuild the circuit.
struct ProvenanceEntry {
    std::string stage;       // "initial" | "stitch" | "grow"
    int library_id = -1;     // entry index for initial/grow
    int block = -1;
    std::vector<int> qubits; // local index -> ansatz logical qubit
    int gate_offset = 0;
    int gate_count = 0;
    int param_offset = 0;
    int param_count = 0;
    std::string stitch_kind; // set for stage == "stitch"
};

/// Connected piece of the footprint that building blocks land on.
struct Block {
    std::vector<int> logical_qubits;         // ascending
    std::vector<std::pair<int, int>> edges;  // logical qubit pairs, canonical
};

/// Topology-certified parameterized circuit: the mapping witnesses that
/// every two-qubit gate sits on a device edge at every build stage.
struct Ansatz {
    ParamCircuit circuit;
    PhysicalMapping mapping;
    std::vector<Block> blocks;
    std::vector<ProvenanceEntry> provenance;
    int depth_threshold = 0;
    bool stitch_warning = false;
};

namespace detail {

inline Subgraph block_as_subgraph(const Block& b) {
    Subgraph s;
    s.qubits = b.logical_qubits;
    s.edges = b.edges;
    return s;
}

/// local index -> logical qubit for a template placed on a block, or
/// nullopt when the template does not embed.
inline std::optional<std::vector<int>> block_embedding(const SubgraphTemplate& t, const Block& b) {
    return find_embedding(t, block_as_subgraph(b));
}

inline int block_load(const Block& b, const std::vector<int>& gate_load) {
    int total = 0;
    for (int q : b.logical_qubits) {
        total += gate_load[static_cast<std::size_t>(q)];
    }
    return total;
}

inline void bump_load(std::vector<int>& gate_load, const ParamCircuit& c, std::size_t from_gate) {
    for (std::size_t i = from_gate; i < c.gates.size(); ++i) {
        ++gate_load[static_cast<std::size_t>(c.gates[i].q0)];
        if (c.gates[i].q1 >= 0) {
            ++gate_load[static_cast<std::size_t>(c.gates[i].q1)];
        }
    }
}

/// Emits stitch gates on logical wires (a, b); returns parameters added.
/// CRX is emitted pre-decomposed over {RZ, RY, CNOT} with independently
/// trainable angles; binding them to (pi/2, -t/2, t/2, -pi/2) reproduces
/// controlled-RX(t) exactly.
inline int append_stitch_gates(ParamCircuit& c, StitchKind kind, int a, int b) {
    switch (kind) {
        case StitchKind::CNOT:
            c.add(GateKind::CNOT, a, b);
            return 0;
        case StitchKind::SWAP:
            c.add(GateKind::CNOT, a, b);
            c.add(GateKind::CNOT, b, a);
            c.add(GateKind::CNOT, a, b);
            return 0;
        case StitchKind::CRX:
            c.add_rotation(GateKind::RZ, b);
            c.add(GateKind::CNOT, a, b);
            c.add_rotation(GateKind::RY, b);
            c.add(GateKind::CNOT, a, b);
            c.add_rotation(GateKind::RY, b);
            c.add_rotation(GateKind::RZ, b);
            return 4;
    }
    return 0;
}

inline int stitch_gate_count(StitchKind kind) {
    switch (kind) {
        case StitchKind::CNOT: return 1;
        case StitchKind::SWAP: return 3;
        case StitchKind::CRX: return 6;
    }
    return 0;
}

} // namespace detail

struct CombineOptions {
    SelectionPolicy policy = SelectionPolicy::EXP;
    Placement placement = Placement::Balanced;
    int depth_threshold = 6;
    double mixed_ratio = 0.5; // fraction of MIXED picks that come from the EXP order
    std::uint64_t seed = 0;
};

/// Assembles the initial ansatz: partitions the target qubits into blocks
/// matching the library's template sizes, then repeatedly appends ranked
/// sub-circuits onto blocks. A candidate is skipped when it would push the
/// circuit depth past depth_threshold; the loop stops when no block can
/// accept anything more.
inline Ansatz combine(const Library& lib, const CouplingGraph& device,
                      const std::vector<int>& target_qubits, const CombineOptions& opts) {
    if (opts.policy == SelectionPolicy::MIXED &&
        (opts.mixed_ratio <= 0.0 || opts.mixed_ratio >= 1.0)) {
        throw std::invalid_argument("combine: MIXED ratio must lie in (0, 1)");
    }
    std::vector<int> sizes;
    for (const auto& t : lib.templates) {
        if (t.qubit_count >= 2) {
            sizes.push_back(t.qubit_count);
        }
    }
    if (sizes.empty()) {
        throw std::invalid_argument("combine: library has no usable templates");
    }
    const Partition partition = partition_qubits(device, target_qubits, sizes);

    std::vector<int> sorted_targets = target_qubits;
    std::sort(sorted_targets.begin(), sorted_targets.end());
    sorted_targets.erase(std::unique(sorted_targets.begin(), sorted_targets.end()),
                         sorted_targets.end());
    std::vector<int> logical_of_physical(static_cast<std::size_t>(device.num_qubits), -1);
    for (std::size_t l = 0; l < sorted_targets.size(); ++l) {
        logical_of_physical[static_cast<std::size_t>(sorted_targets[l])] = static_cast<int>(l);
    }

    Ansatz ansatz;
    ansatz.circuit = ParamCircuit(static_cast<int>(sorted_targets.size()));
    ansatz.mapping.to_physical = sorted_targets;
    ansatz.depth_threshold = opts.depth_threshold;

    auto to_logical = [&](int phys) { return logical_of_physical[static_cast<std::size_t>(phys)]; };
    for (const auto& part : partition.parts) {
        Block b;
        for (int q : part.qubits) {
            b.logical_qubits.push_back(to_logical(q));
        }
        for (auto [a, c] : part.edges) {
            b.edges.push_back({std::min(to_logical(a), to_logical(c)),
                               std::max(to_logical(a), to_logical(c))});
        }
        ansatz.blocks.push_back(std::move(b));
    }
    if (partition.leftover) {
        ansatz.blocks.push_back(Block{{to_logical(*partition.leftover)}, {}});
    }

    // entry -> per-block embedding (or nullopt)
    const std::size_t num_blocks = ansatz.blocks.size();
    std::vector<std::vector<std::optional<std::vector<int>>>> fits(lib.entries.size());
    for (std::size_t e = 0; e < lib.entries.size(); ++e) {
        fits[e].resize(num_blocks);
        const auto& tmpl = lib.template_of(lib.entries[e]);
        for (std::size_t b = 0; b < num_blocks; ++b) {
            fits[e][b] = detail::block_embedding(tmpl, ansatz.blocks[b]);
        }
    }
    for (std::size_t b = 0; b < num_blocks; ++b) {
        if (ansatz.blocks[b].logical_qubits.size() < 2) {
            continue;
        }
        bool any = false;
        for (std::size_t e = 0; e < lib.entries.size() && !any; ++e) {
            any = fits[e][b].has_value();
        }
        if (!any) {
            throw std::invalid_argument("combine: library has no sub-circuit for a required block size");
        }
    }

    std::vector<int> gate_load(sorted_targets.size(), 0);
    std::vector<char> saturated(num_blocks, 0);
    std::size_t exp_ptr = 0;
    std::size_t ent_ptr = 0;
    int picks = 0;
    int exp_picks = 0;
    Rng rng(derive_seed(opts.seed, 0x434f4d42)); // combine stream
    std::vector<std::size_t> size_order(num_blocks);
    std::iota(size_order.begin(), size_order.end(), std::size_t{0});
    std::stable_sort(size_order.begin(), size_order.end(), [&](std::size_t a, std::size_t b) {
        return ansatz.blocks[a].logical_qubits.size() > ansatz.blocks[b].logical_qubits.size();
    });
    std::size_t size_cursor = 0;

    auto try_append = [&](std::size_t block, int entry_id) -> bool {
        const auto& emb = fits[static_cast<std::size_t>(entry_id)][block];
        if (!emb) {
            return false;
        }
        const auto& entry = lib.entries[static_cast<std::size_t>(entry_id)];
        const std::size_t gate_offset = ansatz.circuit.gates.size();
        const int param_offset = ansatz.circuit.num_params;
        append_circuit(ansatz.circuit, entry.circuit, *emb);
        if (depth(ansatz.circuit) > opts.depth_threshold) {
            ansatz.circuit.gates.resize(gate_offset);
            ansatz.circuit.num_params = param_offset;
            return false;
        }
        ProvenanceEntry prov;
        prov.stage = "initial";
        prov.library_id = entry_id;
        prov.block = static_cast<int>(block);
        prov.qubits = *emb;
        prov.gate_offset = static_cast<int>(gate_offset);
        prov.gate_count = static_cast<int>(entry.circuit.gates.size());
        prov.param_offset = param_offset;
        prov.param_count = entry.circuit.num_params;
        ansatz.provenance.push_back(std::move(prov));
        detail::bump_load(gate_load, ansatz.circuit, gate_offset);
        return true;
    };

    auto select_and_append = [&](std::size_t block) -> bool {
        SelectionPolicy policy = opts.policy;
        if (policy == SelectionPolicy::MIXED) {
            policy = (static_cast<double>(exp_picks) <= opts.mixed_ratio * picks)
                         ? SelectionPolicy::EXP
                         : SelectionPolicy::ENT;
        }
        if (policy == SelectionPolicy::RANDOM) {
            std::vector<int> options;
            for (std::size_t e = 0; e < lib.entries.size(); ++e) {
                if (fits[e][block]) {
                    options.push_back(static_cast<int>(e));
                }
            }
            // deterministic under seed: draw an order, take the first that fits the depth budget
            shuffle(options, rng);
            for (int id : options) {
                if (try_append(block, id)) {
                    ++picks;
                    return true;
                }
            }
            return false;
        }
        const auto& order = (policy == SelectionPolicy::EXP) ? lib.rank_by_expressibility
                                                             : lib.rank_by_entanglement;
        auto& ptr = (policy == SelectionPolicy::EXP) ? exp_ptr : ent_ptr;
        for (std::size_t step = 0; step < order.size(); ++step) {
            const std::size_t pos = (ptr + step) % order.size();
            if (try_append(block, order[pos])) {
                ptr = pos + 1;
                ++picks;
                if (policy == SelectionPolicy::EXP) {
                    ++exp_picks;
                }
                return true;
            }
        }
        return false;
    };

    while (true) {
        // choose the next block among the unsaturated ones
        std::ptrdiff_t chosen = -1;
        if (opts.placement == Placement::Balanced) {
            int best = 0;
            for (std::size_t b = 0; b < num_blocks; ++b) {
                if (saturated[b]) {
                    continue;
                }
                const int loadb = detail::block_load(ansatz.blocks[b], gate_load);
                if (chosen < 0 || loadb < best) {
                    chosen = static_cast<std::ptrdiff_t>(b);
                    best = loadb;
                }
            }
        } else {
            for (std::size_t step = 0; step < num_blocks; ++step) {
                const std::size_t b = size_order[(size_cursor + step) % num_blocks];
                if (!saturated[b]) {
                    chosen = static_cast<std::ptrdiff_t>(b);
                    size_cursor = (size_cursor + step + 1) % num_blocks;
                    break;
                }
            }
        }
        if (chosen < 0) {
            break;
        }
        if (!select_and_append(static_cast<std::size_t>(chosen))) {
            saturated[static_cast<std::size_t>(chosen)] = 1;
        }
    }

    ansatz.circuit.check();
    return ansatz;
}

/// Adds two-qubit stitches on device edges that cross block boundaries.
/// Returns the input unchanged (with stitch_warning set) when no crossing
/// edge exists.
inline Ansatz stitch(const Ansatz& input, const CouplingGraph& device, StitchKind kind,
                     StitchPlacement placement) {
    Ansatz out = input;
    const std::size_t width = out.mapping.to_physical.size();

    std::vector<int> block_of(width, -1);
    for (std::size_t b = 0; b < out.blocks.size(); ++b) {
        for (int q : out.blocks[b].logical_qubits) {
            block_of[static_cast<std::size_t>(q)] = static_cast<int>(b);
        }
    }
    std::vector<int> logical_of_physical(static_cast<std::size_t>(device.num_qubits), -1);
    for (std::size_t l = 0; l < width; ++l) {
        logical_of_physical[static_cast<std::size_t>(out.mapping.to_physical[l])] =
            static_cast<int>(l);
    }

    struct Crossing {
        int phys_a, phys_b; // canonical device edge
        int log_a, log_b;
        int block_a, block_b;
    };
    std::vector<Crossing> crossings;
    for (auto [pa, pb] : device.edges) {
        const int la = logical_of_physical[static_cast<std::size_t>(pa)];
        const int lb = logical_of_physical[static_cast<std::size_t>(pb)];
        if (la < 0 || lb < 0) {
            continue;
        }
        if (block_of[static_cast<std::size_t>(la)] != block_of[static_cast<std::size_t>(lb)]) {
            crossings.push_back({pa, pb, la, lb, block_of[static_cast<std::size_t>(la)],
                                 block_of[static_cast<std::size_t>(lb)]});
        }
    }
    if (crossings.empty()) {
        out.stitch_warning = true;
        return out;
    }

    std::vector<int> gate_load(width, 0);
    for (const auto& g : out.circuit.gates) {
        ++gate_load[static_cast<std::size_t>(g.q0)];
        if (g.q1 >= 0) {
            ++gate_load[static_cast<std::size_t>(g.q1)];
        }
    }

    std::vector<Crossing> chosen;
    if (placement == StitchPlacement::Idle) {
        // single stitch on the least-loaded crossing edge
        const auto best = std::min_element(
            crossings.begin(), crossings.end(), [&](const Crossing& x, const Crossing& y) {
                const int lx = gate_load[static_cast<std::size_t>(x.log_a)] +
                               gate_load[static_cast<std::size_t>(x.log_b)];
                const int ly = gate_load[static_cast<std::size_t>(y.log_a)] +
                               gate_load[static_cast<std::size_t>(y.log_b)];
                return std::tie(lx, x.phys_a, x.phys_b) < std::tie(ly, y.phys_a, y.phys_b);
            });
        chosen.push_back(*best);
    } else {
        // one stitch per adjacent block pair, on its smallest device edge
        std::set<std::pair<int, int>> pairs_done;
        for (const auto& c : crossings) { // crossings follow device edge order (sorted)
            const auto key = std::make_pair(std::min(c.block_a, c.block_b),
                                            std::max(c.block_a, c.block_b));
            if (pairs_done.insert(key).second) {
                chosen.push_back(c);
            }
        }
    }

    for (const auto& c : chosen) {
        // control on the smaller physical index
        const int a = (c.phys_a < c.phys_b) ? c.log_a : c.log_b;
        const int b = (c.phys_a < c.phys_b) ? c.log_b : c.log_a;
        ProvenanceEntry prov;
        prov.stage = "stitch";
        prov.stitch_kind = stitch_kind_name(kind);
        prov.qubits = {a, b};
        prov.gate_offset = static_cast<int>(out.circuit.gates.size());
        prov.gate_count = detail::stitch_gate_count(kind);
        prov.param_offset = out.circuit.num_params;
        prov.param_count = detail::append_stitch_gates(out.circuit, kind, a, b);
        out.provenance.push_back(std::move(prov));
    }
    out.circuit.check();
    return out;
}

/// Result of a single growth step.
struct GrowResult {
    Ansatz ansatz;
    int library_id = -1;
    int block = -1;
    int params_added = 0;
};

/// Appends one appendable (identity-at-zero) library entry to the end of
/// the least-loaded block it fits. The caller extends the parameter
/// vector with zeros, which leaves the forward pass unchanged.
inline GrowResult grow(const Ansatz& input, const Library& lib, Rng& rng) {
    std::vector<int> gate_load(input.mapping.to_physical.size(), 0);
    for (const auto& g : input.circuit.gates) {
        ++gate_load[static_cast<std::size_t>(g.q0)];
        if (g.q1 >= 0) {
            ++gate_load[static_cast<std::size_t>(g.q1)];
        }
    }

    struct Candidate {
        int entry;
        std::vector<int> embedding;
    };
    std::ptrdiff_t chosen_block = -1;
    int chosen_load = 0;
    std::vector<Candidate> chosen_candidates;
    for (std::size_t b = 0; b < input.blocks.size(); ++b) {
        std::vector<Candidate> candidates;
        for (std::size_t e = 0; e < lib.entries.size(); ++e) {
            if (!lib.entries[e].appendable) {
                continue;
            }
            const auto emb = detail::block_embedding(lib.template_of(lib.entries[e]), input.blocks[b]);
            if (emb) {
                candidates.push_back({static_cast<int>(e), *emb});
            }
        }
        if (candidates.empty()) {
            continue;
        }
        const int loadb = detail::block_load(input.blocks[b], gate_load);
        if (chosen_block < 0 || loadb < chosen_load) {
            chosen_block = static_cast<std::ptrdiff_t>(b);
            chosen_load = loadb;
            chosen_candidates = std::move(candidates);
        }
    }
    if (chosen_block < 0) {
        throw std::runtime_error("grow: library has no appendable sub-circuit fitting the ansatz");
    }

    const Candidate& pick = chosen_candidates[rng.integer(chosen_candidates.size())];
    GrowResult result;
    result.ansatz = input;
    result.library_id = pick.entry;
    result.block = static_cast<int>(chosen_block);
    result.params_added = lib.entries[static_cast<std::size_t>(pick.entry)].circuit.num_params;

    ProvenanceEntry prov;
    prov.stage = "grow";
    prov.library_id = pick.entry;
    prov.block = static_cast<int>(chosen_block);
    prov.qubits = pick.embedding;
    prov.gate_offset = static_cast<int>(result.ansatz.circuit.gates.size());
    prov.gate_count =
        static_cast<int>(lib.entries[static_cast<std::size_t>(pick.entry)].circuit.gates.size());
    prov.param_offset = result.ansatz.circuit.num_params;
    prov.param_count = result.params_added;
    append_circuit(result.ansatz.circuit, lib.entries[static_cast<std::size_t>(pick.entry)].circuit,
                   pick.embedding);
    result.ansatz.provenance.push_back(std::move(prov));
    return result;
}

struct PruneReport {
    struct RemovedGate {
        int gate_index;
        GateKind kind;
        int qubit;
        double theta;
    };
    std::vector<RemovedGate> removed;
};

/// Removes the given gate indices, compacts unused parameter slots, and
/// keeps provenance ranges consistent. Returns the surviving parameters.
inline std::pair<Ansatz, std::vector<double>> remove_gates(const Ansatz& input,
                                                           std::span<const double> params,
                                                           std::vector<int> gate_indices) {
    std::sort(gate_indices.begin(), gate_indices.end());
    gate_indices.erase(std::unique(gate_indices.begin(), gate_indices.end()), gate_indices.end());
    std::vector<char> removed(input.circuit.gates.size(), 0);
    for (int i : gate_indices) {
        removed.at(static_cast<std::size_t>(i)) = 1;
    }

    std::vector<char> slot_used(static_cast<std::size_t>(input.circuit.num_params), 0);
    for (std::size_t i = 0; i < input.circuit.gates.size(); ++i) {
        const auto& g = input.circuit.gates[i];
        if (!removed[i] && g.param_index >= 0) {
            slot_used[static_cast<std::size_t>(g.param_index)] = 1;
        }
    }
    std::vector<int> slot_map(static_cast<std::size_t>(input.circuit.num_params), -1);
    std::vector<double> new_params;
    for (int s = 0; s < input.circuit.num_params; ++s) {
        if (slot_used[static_cast<std::size_t>(s)]) {
            slot_map[static_cast<std::size_t>(s)] = static_cast<int>(new_params.size());
            new_params.push_back(params[static_cast<std::size_t>(s)]);
        }
    }

    Ansatz out = input;
    out.circuit.gates.clear();
    out.circuit.num_params = static_cast<int>(new_params.size());
    for (std::size_t i = 0; i < input.circuit.gates.size(); ++i) {
        if (removed[i]) {
            continue;
        }
        GateInstance g = input.circuit.gates[i];
        if (g.param_index >= 0) {
            g.param_index = slot_map[static_cast<std::size_t>(g.param_index)];
        }
        out.circuit.gates.push_back(g);
    }
    out.circuit.check();

    // shift provenance ranges past the removals
    out.provenance.clear();
    for (const auto& prov : input.provenance) {
        ProvenanceEntry p = prov;
        int removed_before = 0;
        int removed_inside = 0;
        for (int i : gate_indices) {
            if (i < prov.gate_offset) {
                ++removed_before;
            } else if (i < prov.gate_offset + prov.gate_count) {
                ++removed_inside;
            }
        }
        p.gate_offset -= removed_before;
        p.gate_count -= removed_inside;
        int params_before = 0;
        int params_inside = 0;
        for (int s = 0; s < input.circuit.num_params; ++s) {
            if (slot_used[static_cast<std::size_t>(s)]) {
                continue;
            }
            if (s < prov.param_offset) {
                ++params_before;
            } else if (s < prov.param_offset + prov.param_count) {
                ++params_inside;
            }
        }
        p.param_offset -= params_before;
        p.param_count -= params_inside;
        out.provenance.push_back(std::move(p));
    }
    return {std::move(out), std::move(new_params)};
}

/// Removes every rotation gate whose bound angle is below epsilon in
/// magnitude (CNOTs are never touched) and compacts the parameter vector.
inline std::pair<Ansatz, std::vector<double>> prune(const Ansatz& input,
                                                    std::span<const double> params, double epsilon,
                                                    PruneReport* report = nullptr) {
    if (epsilon <= 0.0) {
        throw std::invalid_argument("prune: epsilon must be positive");
    }
    if (params.size() != static_cast<std::size_t>(input.circuit.num_params)) {
        throw std::invalid_argument("prune: parameter count mismatch");
    }
    std::vector<int> doomed;
    for (std::size_t i = 0; i < input.circuit.gates.size(); ++i) {
        const auto& g = input.circuit.gates[i];
        if (g.param_index >= 0 &&
            std::abs(params[static_cast<std::size_t>(g.param_index)]) < epsilon) {
            doomed.push_back(static_cast<int>(i));
            if (report) {
                report->removed.push_back({static_cast<int>(i), g.kind, g.q0,
                                           params[static_cast<std::size_t>(g.param_index)]});
            }
        }
    }
    return remove_gates(input, params, doomed);
}

/// Replays the provenance log against the library; the result must equal
/// the stored circuit gate-for-gate (valid for unpruned ansatz).
inline ParamCircuit reconstruct_from_provenance(const Ansatz& ansatz, const Library& lib) {
    ParamCircuit rebuilt(ansatz.circuit.num_qubits);
    for (const auto& prov : ansatz.provenance) {
        if (prov.stage == "stitch") {
            detail::append_stitch_gates(rebuilt, stitch_kind_from_name(prov.stitch_kind),
                                        prov.qubits.at(0), prov.qubits.at(1));
        } else {
            const auto& entry = lib.entries.at(static_cast<std::size_t>(prov.library_id));
            append_circuit(rebuilt, entry.circuit, prov.qubits);
        }
    }
    return rebuilt;
}

// ---------------------------------------------------------------------------
// JSON persistence (schema 1)
// ---------------------------------------------------------------------------

inline nlohmann::json ansatz_to_json(const Ansatz& a,
                                     const std::vector<double>* params = nullptr) {
    nlohmann::json j;
    j["schema"] = 1;
    j["circuit"] = circuit_to_json(a.circuit);
    j["mapping"] = a.mapping.to_physical;
    j["depth_threshold"] = a.depth_threshold;
    j["stitch_warning"] = a.stitch_warning;
    j["blocks"] = nlohmann::json::array();
    for (const auto& b : a.blocks) {
        nlohmann::json bj;
        bj["qubits"] = b.logical_qubits;
        bj["edges"] = nlohmann::json::array();
        for (auto [x, y] : b.edges) {
            bj["edges"].push_back({x, y});
        }
        j["blocks"].push_back(std::move(bj));
    }
    j["provenance"] = nlohmann::json::array();
    for (const auto& p : a.provenance) {
        nlohmann::json pj;
        pj["stage"] = p.stage;
        pj["library_id"] = p.library_id;
        pj["block"] = p.block;
        pj["qubits"] = p.qubits;
        pj["gate_offset"] = p.gate_offset;
        pj["gate_count"] = p.gate_count;
        pj["param_offset"] = p.param_offset;
        pj["param_count"] = p.param_count;
        if (!p.stitch_kind.empty()) {
            pj["stitch_kind"] = p.stitch_kind;
        }
        j["provenance"].push_back(std::move(pj));
    }
    if (params) {
        j["params"] = *params;
    }
    return j;
}

struct AnsatzFile {
    Ansatz ansatz;
    std::optional<std::vector<double>> params;
};

inline AnsatzFile ansatz_from_json(const nlohmann::json& j) {
    AnsatzFile out;
    try {
        if (j.at("schema").get<int>() != 1) {
            throw SchemaError("ansatz schema version not supported");
        }
        out.ansatz.circuit = circuit_from_json(j.at("circuit"));
        out.ansatz.mapping.to_physical = j.at("mapping").get<std::vector<int>>();
        out.ansatz.depth_threshold = j.at("depth_threshold").get<int>();
        out.ansatz.stitch_warning = j.at("stitch_warning").get<bool>();
        for (const auto& bj : j.at("blocks")) {
            Block b;
            b.logical_qubits = bj.at("qubits").get<std::vector<int>>();
            for (const auto& e : bj.at("edges")) {
                b.edges.push_back({e[0].get<int>(), e[1].get<int>()});
            }
            out.ansatz.blocks.push_back(std::move(b));
        }
        for (const auto& pj : j.at("provenance")) {
            ProvenanceEntry p;
            p.stage = pj.at("stage").get<std::string>();
            p.library_id = pj.at("library_id").get<int>();
            p.block = pj.at("block").get<int>();
            p.qubits = pj.at("qubits").get<std::vector<int>>();
            p.gate_offset = pj.at("gate_offset").get<int>();
            p.gate_count = pj.at("gate_count").get<int>();
            p.param_offset = pj.at("param_offset").get<int>();
            p.param_count = pj.at("param_count").get<int>();
            if (pj.contains("stitch_kind")) {
                p.stitch_kind = pj.at("stitch_kind").get<std::string>();
            }
            out.ansatz.provenance.push_back(std::move(p));
        }
        if (j.contains("params")) {
            out.params = j.at("params").get<std::vector<double>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("ansatz schema error: ") + e.what());
    }
    return out;
}

inline void save_ansatz(const Ansatz& a, const std::string& path,
                        const std::vector<double>* params = nullptr) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write ansatz file '" + path + "'");
    }
    out << ansatz_to_json(a, params).dump(2) << '\n';
}

inline AnsatzFile load_ansatz(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open ansatz file '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("ansatz file is not valid JSON: ") + e.what());
    }
    return ansatz_from_json(j);
}

} // namespace vqsyn
