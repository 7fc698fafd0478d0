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

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "vqsyn/metrics.hpp"
#include "vqsyn/rng.hpp"
#include "vqsyn/topology.hpp"
#include "vqsyn/unitary.hpp"
#include "vqsyn/util.hpp"

namespace vqsyn {

struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

/// One candidate gate placement on a template.
struct GateCandidate {
    GateKind kind;
    int q0;
    int q1; // -1 for single-qubit kinds
};

/// Gates a template admits: every rotation on every local qubit, CNOT in
/// both directions on every template edge; optionally sqrt(X) and H.
inline std::vector<GateCandidate> compatible_gate_set(const SubgraphTemplate& t,
                                                      bool extended_set = false) {
    if (!t.connected()) {
        throw std::invalid_argument("compatible_gate_set: template must be connected");
    }
    std::vector<GateCandidate> out;
    for (int q = 0; q < t.qubit_count; ++q) {
        out.push_back({GateKind::RX, q, -1});
        out.push_back({GateKind::RY, q, -1});
        out.push_back({GateKind::RZ, q, -1});
        if (extended_set) {
            out.push_back({GateKind::SQRT_X, q, -1});
            out.push_back({GateKind::H, q, -1});
        }
    }
    for (auto [a, b] : t.edges) {
        out.push_back({GateKind::CNOT, a, b});
        out.push_back({GateKind::CNOT, b, a});
    }
    return out;
}

/// Generation knobs for one sub-circuit draw.
struct GenConfig {
    int depth_limit = 4;
    bool extended_gate_set = false;
};

/// Random topology-compatible sub-circuit: while depth <= depth_limit,
/// draw a gate kind uniformly, place it on the least-loaded valid wire
/// (rejecting a repeat of the previous gate on any of its wires), then
/// simplify. The result never exceeds depth_limit + 1 because the last
/// accepted gate may land when depth == depth_limit.
inline ParamCircuit generate_subcircuit_circuit(const SubgraphTemplate& t, const GenConfig& cfg,
                                                Rng& rng) {
    if (cfg.depth_limit < 1) {
        throw std::invalid_argument("generate_subcircuit: depth_limit must be >= 1");
    }
    const auto candidates = compatible_gate_set(t, cfg.extended_gate_set);
    std::vector<GateKind> kinds;
    for (const auto& c : candidates) {
        if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end()) {
            kinds.push_back(c.kind);
        }
    }

    ParamCircuit circuit(t.qubit_count);
    std::vector<int> load(static_cast<std::size_t>(t.qubit_count), 0);
    std::vector<int> last_on_wire(static_cast<std::size_t>(t.qubit_count), -1);

    int attempts = 0;
    const int max_attempts = 200 * cfg.depth_limit + 200;
    while (depth(circuit) <= cfg.depth_limit && attempts++ < max_attempts) {
        const GateKind kind = kinds[rng.integer(kinds.size())];
        std::vector<GateCandidate> valid;
        for (const auto& c : candidates) {
            if (c.kind != kind) {
                continue;
            }
            // "not the same gate as the last gate", checked per wire
            bool repeat = false;
            for (int q : {c.q0, c.q1}) {
                if (q < 0) {
                    continue;
                }
                const int last = last_on_wire[static_cast<std::size_t>(q)];
                if (last >= 0) {
                    const auto& prev = circuit.gates[static_cast<std::size_t>(last)];
                    if (prev.kind == c.kind && prev.q0 == c.q0 && prev.q1 == c.q1) {
                        repeat = true;
                        break;
                    }
                }
            }
            if (!repeat) {
                valid.push_back(c);
            }
        }
        if (valid.empty()) {
            continue;
        }
        // least-loaded placement; ties broken uniformly at random
        auto score = [&load](const GateCandidate& c) {
            int s = load[static_cast<std::size_t>(c.q0)];
            if (c.q1 >= 0) {
                s += load[static_cast<std::size_t>(c.q1)];
            }
            return s;
        };
        int best = score(valid.front());
        for (const auto& c : valid) {
            best = std::min(best, score(c));
        }
        std::vector<GateCandidate> ties;
        for (const auto& c : valid) {
            if (score(c) == best) {
                ties.push_back(c);
            }
        }
        const GateCandidate pick = ties[rng.integer(ties.size())];

        if (is_rotation(pick.kind)) {
            circuit.add_rotation(pick.kind, pick.q0);
        } else if (pick.q1 < 0) {
            circuit.add(pick.kind, pick.q0);
        } else {
            circuit.add(pick.kind, pick.q0, pick.q1);
        }
        const int placed = static_cast<int>(circuit.gates.size()) - 1;
        ++load[static_cast<std::size_t>(pick.q0)];
        last_on_wire[static_cast<std::size_t>(pick.q0)] = placed;
        if (pick.q1 >= 0) {
            ++load[static_cast<std::size_t>(pick.q1)];
            last_on_wire[static_cast<std::size_t>(pick.q1)] = placed;
        }
    }
    return simplify(circuit).circuit;
}

/// Scored sub-circuit plus the flags the ansatz builder needs.
struct SubCircuit {
    ParamCircuit circuit;
    std::string template_id;
    bool appendable = false;       // identity (up to phase) at zero parameters
    double expressibility = 0.0;   // KL vs Haar, lower is better
    double entanglement = 0.0;     // mean Meyer-Wallach
    int gate_count = 0;
    int depth = 0;
    int param_count = 0;
};

struct LibraryConfig {
    int count_per_template = 500;
    int depth_limit = 4;
    bool extended_gate_set = false;
    MetricConfig metrics;
    std::uint64_t seed = 0;
};

/// The generated, scored, deduplicated sub-circuit collection with both
/// rank orders.
struct Library {
    std::vector<SubgraphTemplate> templates;
    LibraryConfig config;
    std::vector<SubCircuit> entries;
    std::vector<int> rank_by_expressibility; // ascending score
    std::vector<int> rank_by_entanglement;   // descending score

    const SubgraphTemplate& template_of(const SubCircuit& e) const {
        return template_by_id(templates, e.template_id);
    }
};

inline void rank_library(Library& lib) {
    const auto n = static_cast<int>(lib.entries.size());
    lib.rank_by_expressibility.resize(static_cast<std::size_t>(n));
    lib.rank_by_entanglement.resize(static_cast<std::size_t>(n));
    std::iota(lib.rank_by_expressibility.begin(), lib.rank_by_expressibility.end(), 0);
    std::iota(lib.rank_by_entanglement.begin(), lib.rank_by_entanglement.end(), 0);
    std::stable_sort(lib.rank_by_expressibility.begin(), lib.rank_by_expressibility.end(),
                     [&](int a, int b) {
                         return lib.entries[static_cast<std::size_t>(a)].expressibility <
                                lib.entries[static_cast<std::size_t>(b)].expressibility;
                     });
    std::stable_sort(lib.rank_by_entanglement.begin(), lib.rank_by_entanglement.end(),
                     [&](int a, int b) {
                         return lib.entries[static_cast<std::size_t>(a)].entanglement >
                                lib.entries[static_cast<std::size_t>(b)].entanglement;
                     });
}

/// Generates count_per_template draws per template, deduplicates
/// structurally identical circuits within each template group, scores
/// everything, and ranks both ways. Draw (t, j) owns the stream derived
/// from (seed, t, j), so the library is schedule-independent.
inline Library build_library(const std::vector<SubgraphTemplate>& templates,
                             const LibraryConfig& config, unsigned threads = 1) {
    if (config.count_per_template < 1) {
        throw std::invalid_argument("build_library: count_per_template must be >= 1");
    }
    config.metrics.check();
    Library lib;
    lib.templates = templates;
    lib.config = config;

    GenConfig gen{config.depth_limit, config.extended_gate_set};
    for (std::size_t t = 0; t < templates.size(); ++t) {
        std::map<std::string, bool> seen;
        for (int j = 0; j < config.count_per_template; ++j) {
            Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(t),
                                static_cast<std::uint64_t>(j)));
            ParamCircuit c = generate_subcircuit_circuit(templates[t], gen, rng);
            const std::string key = circuit_key(c);
            if (seen.emplace(key, true).second) {
                SubCircuit e;
                e.gate_count = static_cast<int>(c.gates.size());
                e.depth = depth(c);
                e.param_count = c.num_params;
                e.template_id = templates[t].id;
                e.circuit = std::move(c);
                lib.entries.push_back(std::move(e));
            }
        }
    }

    std::exception_ptr failure;
    std::mutex failure_mutex;
    parallel_for(lib.entries.size(), threads, [&](std::size_t i) {
        auto& e = lib.entries[i];
        try {
            e.appendable = is_identity_at_zero(e.circuit);
            e.expressibility = expressibility(e.circuit, config.metrics);
            // single-qubit templates cannot entangle anything
            e.entanglement =
                (e.circuit.num_qubits >= 2) ? entangling_capability(e.circuit, config.metrics) : 0.0;
        } catch (...) {
            std::lock_guard<std::mutex> hold(failure_mutex);
            if (!failure) {
                try {
                    std::throw_with_nested(
                        std::runtime_error("build_library: scoring failed for entry " +
                                           std::to_string(i) + " (" + circuit_key(e.circuit) + ")"));
                } catch (...) {
                    failure = std::current_exception();
                }
            }
        }
    });
    if (failure) {
        std::rethrow_exception(failure);
    }

    rank_library(lib);
    return lib;
}

// ---------------------------------------------------------------------------
// JSON persistence (schema 1)
// ---------------------------------------------------------------------------

inline nlohmann::json gate_to_json(const GateInstance& g) {
    nlohmann::json j;
    j["kind"] = gate_name(g.kind);
    j["qubits"] = (g.q1 >= 0) ? nlohmann::json{g.q0, g.q1} : nlohmann::json{g.q0};
    if (g.param_index >= 0) {
        j["param"] = g.param_index;
    }
    return j;
}

inline GateInstance gate_from_json(const nlohmann::json& j) {
    const auto kind = gate_from_name(j.at("kind").get<std::string>());
    if (!kind) {
        throw SchemaError("unknown gate kind '" + j.at("kind").get<std::string>() + "'");
    }
    GateInstance g;
    g.kind = *kind;
    const auto& q = j.at("qubits");
    if (!q.is_array() || q.empty() || static_cast<int>(q.size()) != gate_arity(*kind)) {
        throw SchemaError("gate qubits do not match arity");
    }
    g.q0 = q[0].get<int>();
    g.q1 = (q.size() > 1) ? q[1].get<int>() : -1;
    g.param_index = j.contains("param") ? j.at("param").get<int>() : -1;
    return g;
}

inline nlohmann::json circuit_to_json(const ParamCircuit& c) {
    nlohmann::json j;
    j["num_qubits"] = c.num_qubits;
    j["num_params"] = c.num_params;
    j["gates"] = nlohmann::json::array();
    for (const auto& g : c.gates) {
        j["gates"].push_back(gate_to_json(g));
    }
    return j;
}

inline ParamCircuit circuit_from_json(const nlohmann::json& j) {
    ParamCircuit c;
    c.num_qubits = j.at("num_qubits").get<int>();
    c.num_params = j.at("num_params").get<int>();
    for (const auto& gj : j.at("gates")) {
        c.gates.push_back(gate_from_json(gj));
    }
    c.check();
    return c;
}

inline nlohmann::json template_to_json(const SubgraphTemplate& t) {
    nlohmann::json j;
    j["id"] = t.id;
    j["qubits"] = t.qubit_count;
    j["edges"] = nlohmann::json::array();
    for (auto [a, b] : t.edges) {
        j["edges"].push_back({a, b});
    }
    return j;
}

inline SubgraphTemplate template_from_json(const nlohmann::json& j) {
    SubgraphTemplate t;
    t.id = j.at("id").get<std::string>();
    t.qubit_count = j.at("qubits").get<int>();
    for (const auto& e : j.at("edges")) {
        t.edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    return t;
}

inline nlohmann::json library_to_json(const Library& lib) {
    nlohmann::json j;
    j["schema"] = 1;
    j["config"] = {
        {"count_per_template", lib.config.count_per_template},
        {"depth_limit", lib.config.depth_limit},
        {"extended_gate_set", lib.config.extended_gate_set},
        {"fidelity_pairs", lib.config.metrics.fidelity_pairs},
        {"bins", lib.config.metrics.bins},
        {"mw_samples", lib.config.metrics.mw_samples},
        {"metric_seed", lib.config.metrics.seed},
        {"seed", lib.config.seed},
    };
    j["templates"] = nlohmann::json::array();
    for (const auto& t : lib.templates) {
        j["templates"].push_back(template_to_json(t));
    }
    j["entries"] = nlohmann::json::array();
    for (const auto& e : lib.entries) {
        nlohmann::json ej;
        ej["template"] = e.template_id;
        ej["circuit"] = circuit_to_json(e.circuit);
        ej["appendable"] = e.appendable;
        ej["expressibility"] = e.expressibility;
        ej["entanglement"] = e.entanglement;
        ej["gate_count"] = e.gate_count;
        ej["depth"] = e.depth;
        ej["param_count"] = e.param_count;
        j["entries"].push_back(std::move(ej));
    }
    j["rank_by_expressibility"] = lib.rank_by_expressibility;
    j["rank_by_entanglement"] = lib.rank_by_entanglement;
    return j;
}

inline Library library_from_json(const nlohmann::json& j) {
    Library lib;
    try {
        if (j.at("schema").get<int>() != 1) {
            throw SchemaError("library schema version " + j.at("schema").dump() + " not supported");
        }
        const auto& cj = j.at("config");
        lib.config.count_per_template = cj.at("count_per_template").get<int>();
        lib.config.depth_limit = cj.at("depth_limit").get<int>();
        lib.config.extended_gate_set = cj.at("extended_gate_set").get<bool>();
        lib.config.metrics.fidelity_pairs = cj.at("fidelity_pairs").get<int>();
        lib.config.metrics.bins = cj.at("bins").get<int>();
        lib.config.metrics.mw_samples = cj.at("mw_samples").get<int>();
        lib.config.metrics.seed = cj.at("metric_seed").get<std::uint64_t>();
        lib.config.seed = cj.at("seed").get<std::uint64_t>();
        for (const auto& tj : j.at("templates")) {
            lib.templates.push_back(template_from_json(tj));
        }
        for (const auto& ej : j.at("entries")) {
            SubCircuit e;
            e.template_id = ej.at("template").get<std::string>();
            e.circuit = circuit_from_json(ej.at("circuit"));
            e.appendable = ej.at("appendable").get<bool>();
            e.expressibility = ej.at("expressibility").get<double>();
            e.entanglement = ej.at("entanglement").get<double>();
            e.gate_count = ej.at("gate_count").get<int>();
            e.depth = ej.at("depth").get<int>();
            e.param_count = ej.at("param_count").get<int>();
            lib.entries.push_back(std::move(e));
        }
        lib.rank_by_expressibility = j.at("rank_by_expressibility").get<std::vector<int>>();
        lib.rank_by_entanglement = j.at("rank_by_entanglement").get<std::vector<int>>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("library schema error: ") + e.what());
    }
    const auto n = static_cast<int>(lib.entries.size());
    auto is_perm = [n](const std::vector<int>& v) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        if (static_cast<int>(v.size()) != n) {
            return false;
        }
        for (int x : v) {
            if (x < 0 || x >= n || seen[static_cast<std::size_t>(x)]) {
                return false;
            }
            seen[static_cast<std::size_t>(x)] = 1;
        }
        return true;
    };
    if (!is_perm(lib.rank_by_expressibility) || !is_perm(lib.rank_by_entanglement)) {
        throw SchemaError("library rank orders are not permutations of the entries");
    }
    return lib;
}

inline void save_library(const Library& lib, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write library file '" + path + "'");
    }
    out << library_to_json(lib).dump(2) << '\n';
}

inline Library load_library(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open library file '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("library file is not valid JSON: ") + e.what());
    }
    return library_from_json(j);
}

} // namespace vqsyn
