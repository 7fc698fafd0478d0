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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "vqsyn/baselines.hpp"
#include "vqsyn/qasm.hpp"
#include "vqsyn/train.hpp"

namespace vqsyn::cli {

/// Exit codes: 0 success, 2 config error, 3 data error, 4 numerical
/// failure.
enum ExitCode { kOk = 0, kConfigError = 2, kDataError = 3, kNumericalError = 4 };

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Applies the output-root environment variable to relative paths.
inline std::string resolve_out(const std::string& path) {
    if (path.empty()) {
        return path;
    }
    const char* root = std::getenv("VQSYN_OUT");
    if (root == nullptr || *root == '\0' || std::filesystem::path(path).is_absolute()) {
        return path;
    }
    return (std::filesystem::path(root) / path).string();
}

inline std::string sibling_path(const std::string& primary, const std::string& suffix) {
    std::filesystem::path p(primary);
    return (p.parent_path() / (p.stem().string() + suffix)).string();
}

inline void ensure_parent_dir(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::filesystem::create_directories(parent);
    }
}

inline void write_run_config(const std::string& path, const std::string& command,
                             const nlohmann::json& args) {
    ensure_parent_dir(path);
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write run config '" + path + "'");
    }
    out << nlohmann::json{{"schema", 1}, {"command", command}, {"args", args}}.dump(2) << '\n';
}

inline std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (!tok.empty()) {
            out.push_back(std::stoi(tok));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenArgs {
    std::string topology = "tshape5";
    std::string templates = "auto"; // comma list or "auto"
    int count = 500;
    int depth_limit = 4;
    bool extended_gates = false;
    int pairs = 5000;
    int bins = 75;
    int mw_samples = 300;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out = "library.json";
};

inline nlohmann::json to_json(const GenArgs& a) {
    return {{"topology", a.topology}, {"templates", a.templates},   {"count", a.count},
            {"depth_limit", a.depth_limit}, {"extended_gates", a.extended_gates},
            {"pairs", a.pairs},        {"bins", a.bins},            {"mw_samples", a.mw_samples},
            {"seed", a.seed},          {"threads", a.threads},      {"out", a.out}};
}

inline GenArgs gen_args_from_json(const nlohmann::json& j) {
    GenArgs a;
    a.topology = j.at("topology").get<std::string>();
    a.templates = j.at("templates").get<std::string>();
    a.count = j.at("count").get<int>();
    a.depth_limit = j.at("depth_limit").get<int>();
    a.extended_gates = j.at("extended_gates").get<bool>();
    a.pairs = j.at("pairs").get<int>();
    a.bins = j.at("bins").get<int>();
    a.mw_samples = j.at("mw_samples").get<int>();
    a.seed = j.at("seed").get<std::uint64_t>();
    a.threads = j.at("threads").get<unsigned>();
    a.out = j.at("out").get<std::string>();
    return a;
}

inline void save_scores_csv(const Library& lib, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write scores file '" + path + "'");
    }
    out << "id,gates,depth,params,expressibility,entanglement,appendable\n";
    char buf[96];
    for (std::size_t i = 0; i < lib.entries.size(); ++i) {
        const auto& e = lib.entries[i];
        std::snprintf(buf, sizeof(buf), "%zu,%d,%d,%d,%.17g,%.17g,%d\n", i, e.gate_count, e.depth,
                      e.param_count, e.expressibility, e.entanglement, e.appendable ? 1 : 0);
        out << buf;
    }
}

/// Templates usable on a device: each must embed into at least one
/// connected subgraph of its size.
inline bool template_embeds_somewhere(const SubgraphTemplate& t, const CouplingGraph& g) {
    if (t.qubit_count > g.num_qubits) {
        return false;
    }
    for (const auto& sub : enumerate_subgraphs(g, t.qubit_count)) {
        if (find_embedding(t, sub)) {
            return true;
        }
    }
    return false;
}

inline std::vector<SubgraphTemplate> resolve_templates(const std::string& spec,
                                                       const CouplingGraph& device) {
    const auto all = default_templates();
    std::vector<SubgraphTemplate> chosen;
    if (spec == "auto") {
        for (const auto& t : all) {
            if (template_embeds_somewhere(t, device)) {
                chosen.push_back(t);
            }
        }
        if (chosen.empty()) {
            throw std::invalid_argument("no default template embeds into this topology");
        }
        return chosen;
    }
    std::istringstream in(spec);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        const auto& t = template_by_id(all, tok);
        if (!template_embeds_somewhere(t, device)) {
            throw std::invalid_argument("template '" + tok + "' does not embed into this topology");
        }
        chosen.push_back(t);
    }
    if (chosen.empty()) {
        throw std::invalid_argument("no templates requested");
    }
    return chosen;
}

inline int cmd_gen(GenArgs args) {
    args.out = resolve_out(args.out);
    const CouplingGraph device = named_topology(args.topology);
    const auto templates = resolve_templates(args.templates, device);

    LibraryConfig cfg;
    cfg.count_per_template = args.count;
    cfg.depth_limit = args.depth_limit;
    cfg.extended_gate_set = args.extended_gates;
    cfg.metrics.fidelity_pairs = args.pairs;
    cfg.metrics.bins = args.bins;
    cfg.metrics.mw_samples = args.mw_samples;
    cfg.metrics.seed = args.seed;
    cfg.seed = args.seed;

    const Library lib = build_library(templates, cfg, args.threads);
    ensure_parent_dir(args.out);
    save_library(lib, args.out);
    save_scores_csv(lib, sibling_path(args.out, ".scores.csv"));
    write_run_config(sibling_path(args.out, ".run.json"), "gen", to_json(args));
    std::cout << "library: " << lib.entries.size() << " entries -> " << args.out << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalArgs {
    std::string library;
    std::string out = "scores.csv";
    std::string histogram; // optional JSON dump
    int id = -1;           // entry for the histogram dump (-1 = all)
};

inline nlohmann::json to_json(const EvalArgs& a) {
    return {{"library", a.library}, {"out", a.out}, {"histogram", a.histogram}, {"id", a.id}};
}

inline EvalArgs eval_args_from_json(const nlohmann::json& j) {
    EvalArgs a;
    a.library = j.at("library").get<std::string>();
    a.out = j.at("out").get<std::string>();
    a.histogram = j.at("histogram").get<std::string>();
    a.id = j.at("id").get<int>();
    return a;
}

inline int cmd_eval(EvalArgs args) {
    args.out = resolve_out(args.out);
    const Library lib = load_library(args.library);
    ensure_parent_dir(args.out);
    save_scores_csv(lib, args.out);
    if (!args.histogram.empty()) {
        nlohmann::json dump = nlohmann::json::array();
        for (std::size_t i = 0; i < lib.entries.size(); ++i) {
            if (args.id >= 0 && static_cast<std::size_t>(args.id) != i) {
                continue;
            }
            const auto& e = lib.entries[i];
            const FidelityHistogram h = fidelity_histogram(e.circuit, lib.config.metrics);
            std::vector<double> haar(static_cast<std::size_t>(h.bin_count));
            for (int b = 0; b < h.bin_count; ++b) {
                haar[static_cast<std::size_t>(b)] =
                    haar_bin_mass(e.circuit.num_qubits, static_cast<double>(b) / h.bin_count,
                                  static_cast<double>(b + 1) / h.bin_count);
            }
            dump.push_back({{"id", i},
                            {"bins", h.bin_count},
                            {"sample_count", h.sample_count},
                            {"probabilities", h.probabilities},
                            {"haar_bin_mass", haar}});
        }
        const std::string hist_path = resolve_out(args.histogram);
        ensure_parent_dir(hist_path);
        std::ofstream hout(hist_path);
        if (!hout) {
            throw std::runtime_error("cannot write histogram file '" + hist_path + "'");
        }
        hout << dump.dump(2) << '\n';
    }
    write_run_config(sibling_path(args.out, ".run.json"), "eval", to_json(args));
    return kOk;
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

struct BuildArgs {
    std::string library;
    std::string topology = "tshape5";
    std::string qubits; // comma list; empty = all device qubits
    std::string policy = "exp";
    std::string placement = "balanced";
    int depth_threshold = 6;
    double mixed_ratio = 0.5;
    std::string stitch;                   // "", "cnot", "crx", "swap"
    std::string stitch_placement = "block_end"; // or "idle"
    std::uint64_t seed = 0;
    std::string out = "ansatz.json";
};

inline nlohmann::json to_json(const BuildArgs& a) {
    return {{"library", a.library},
            {"topology", a.topology},
            {"qubits", a.qubits},
            {"policy", a.policy},
            {"placement", a.placement},
            {"depth_threshold", a.depth_threshold},
            {"mixed_ratio", a.mixed_ratio},
            {"stitch", a.stitch},
            {"stitch_placement", a.stitch_placement},
            {"seed", a.seed},
            {"out", a.out}};
}

inline BuildArgs build_args_from_json(const nlohmann::json& j) {
    BuildArgs a;
    a.library = j.at("library").get<std::string>();
    a.topology = j.at("topology").get<std::string>();
    a.qubits = j.at("qubits").get<std::string>();
    a.policy = j.at("policy").get<std::string>();
    a.placement = j.at("placement").get<std::string>();
    a.depth_threshold = j.at("depth_threshold").get<int>();
    a.mixed_ratio = j.at("mixed_ratio").get<double>();
    a.stitch = j.at("stitch").get<std::string>();
    a.stitch_placement = j.at("stitch_placement").get<std::string>();
    a.seed = j.at("seed").get<std::uint64_t>();
    a.out = j.at("out").get<std::string>();
    return a;
}

inline StitchPlacement stitch_placement_from_name(const std::string& s) {
    if (s == "idle") {
        return StitchPlacement::Idle;
    }
    if (s == "block_end") {
        return StitchPlacement::BlockEnd;
    }
    throw std::invalid_argument("unknown stitch placement '" + s + "'");
}

inline int cmd_build(BuildArgs args) {
    args.out = resolve_out(args.out);
    const CouplingGraph device = named_topology(args.topology);
    const Library lib = load_library(args.library);

    std::vector<int> target;
    if (args.qubits.empty()) {
        target.resize(static_cast<std::size_t>(device.num_qubits));
        std::iota(target.begin(), target.end(), 0);
    } else {
        target = parse_int_list(args.qubits);
    }

    CombineOptions opts;
    opts.policy = policy_from_name(args.policy);
    if (args.placement == "balanced") {
        opts.placement = Placement::Balanced;
    } else if (args.placement == "decreasing_size") {
        opts.placement = Placement::DecreasingSize;
    } else {
        throw std::invalid_argument("unknown placement '" + args.placement + "'");
    }
    opts.depth_threshold = args.depth_threshold;
    opts.mixed_ratio = args.mixed_ratio;
    opts.seed = args.seed;

    Ansatz ansatz = combine(lib, device, target, opts);
    if (!args.stitch.empty()) {
        ansatz = stitch(ansatz, device, stitch_kind_from_name(args.stitch),
                        stitch_placement_from_name(args.stitch_placement));
        if (ansatz.stitch_warning) {
            std::cerr << "warning: no crossing edge between blocks; stitch skipped\n";
        }
    }

    ensure_parent_dir(args.out);
    save_ansatz(ansatz, args.out);
    {
        const std::vector<double> zeros(static_cast<std::size_t>(ansatz.circuit.num_params), 0.0);
        std::ofstream qasm_out(sibling_path(args.out, ".qasm"));
        qasm_out << export_qasm(ansatz.circuit, zeros);
    }
    write_run_config(sibling_path(args.out, ".run.json"), "build", to_json(args));
    std::cout << "ansatz: " << ansatz.circuit.gates.size() << " gates, depth "
              << depth(ansatz.circuit) << ", params " << ansatz.circuit.num_params << " -> "
              << args.out << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// stitch (standalone)
// ---------------------------------------------------------------------------

struct StitchArgs {
    std::string ansatz;
    std::string topology = "tshape5";
    std::string kind = "cnot";
    std::string placement = "block_end";
    std::string out = "stitched.json";
};

inline nlohmann::json to_json(const StitchArgs& a) {
    return {{"ansatz", a.ansatz},
            {"topology", a.topology},
            {"kind", a.kind},
            {"placement", a.placement},
            {"out", a.out}};
}

inline StitchArgs stitch_args_from_json(const nlohmann::json& j) {
    StitchArgs a;
    a.ansatz = j.at("ansatz").get<std::string>();
    a.topology = j.at("topology").get<std::string>();
    a.kind = j.at("kind").get<std::string>();
    a.placement = j.at("placement").get<std::string>();
    a.out = j.at("out").get<std::string>();
    return a;
}

inline int cmd_stitch(StitchArgs args) {
    args.out = resolve_out(args.out);
    const CouplingGraph device = named_topology(args.topology);
    const AnsatzFile file = load_ansatz(args.ansatz);
    const Ansatz stitched = stitch(file.ansatz, device, stitch_kind_from_name(args.kind),
                                   stitch_placement_from_name(args.placement));
    if (stitched.stitch_warning) {
        std::cerr << "warning: no crossing edge between blocks; ansatz unchanged\n";
    }
    ensure_parent_dir(args.out);
    save_ansatz(stitched, args.out);
    write_run_config(sibling_path(args.out, ".run.json"), "stitch", to_json(args));
    return kOk;
}

// ---------------------------------------------------------------------------
// prune (standalone)
// ---------------------------------------------------------------------------

struct PruneArgs {
    std::string ansatz; // must carry trained params
    double epsilon = 0.1;
    std::string out = "pruned.json";
};

inline nlohmann::json to_json(const PruneArgs& a) {
    return {{"ansatz", a.ansatz}, {"epsilon", a.epsilon}, {"out", a.out}};
}

inline PruneArgs prune_args_from_json(const nlohmann::json& j) {
    PruneArgs a;
    a.ansatz = j.at("ansatz").get<std::string>();
    a.epsilon = j.at("epsilon").get<double>();
    a.out = j.at("out").get<std::string>();
    return a;
}

inline int cmd_prune(PruneArgs args) {
    args.out = resolve_out(args.out);
    const AnsatzFile file = load_ansatz(args.ansatz);
    if (!file.params) {
        throw DataError("ansatz file '" + args.ansatz + "' carries no parameters to prune by");
    }
    PruneReport report;
    auto [pruned, params] = prune(file.ansatz, *file.params, args.epsilon, &report);
    ensure_parent_dir(args.out);
    save_ansatz(pruned, args.out, &params);
    write_run_config(sibling_path(args.out, ".run.json"), "prune", to_json(args));
    std::cout << "pruned " << report.removed.size() << " gate(s)\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
    std::string dataset = "blobs:1";
    std::string ansatz;
    std::string library; // growth source
    int classes = 0;     // 0 = from dataset
    int epochs = 30;
    int batch_size = 32;
    double lr = 0.05;
    std::uint64_t seed = 0;
    bool grow = false;
    int growth_cap = 4;
    int growth_patience = 3;
    double growth_min_improvement = 0.005;
    bool prune = false;
    double prune_epsilon = 0.1;
    double prune_accuracy_drop = 0.02;
    std::string out = "trainrun";
};

inline nlohmann::json to_json(const TrainArgs& a) {
    return {{"dataset", a.dataset},
            {"ansatz", a.ansatz},
            {"library", a.library},
            {"classes", a.classes},
            {"epochs", a.epochs},
            {"batch_size", a.batch_size},
            {"lr", a.lr},
            {"seed", a.seed},
            {"grow", a.grow},
            {"growth_cap", a.growth_cap},
            {"growth_patience", a.growth_patience},
            {"growth_min_improvement", a.growth_min_improvement},
            {"prune", a.prune},
            {"prune_epsilon", a.prune_epsilon},
            {"prune_accuracy_drop", a.prune_accuracy_drop},
            {"out", a.out}};
}

inline TrainArgs train_args_from_json(const nlohmann::json& j) {
    TrainArgs a;
    a.dataset = j.at("dataset").get<std::string>();
    a.ansatz = j.at("ansatz").get<std::string>();
    a.library = j.at("library").get<std::string>();
    a.classes = j.at("classes").get<int>();
    a.epochs = j.at("epochs").get<int>();
    a.batch_size = j.at("batch_size").get<int>();
    a.lr = j.at("lr").get<double>();
    a.seed = j.at("seed").get<std::uint64_t>();
    a.grow = j.at("grow").get<bool>();
    a.growth_cap = j.at("growth_cap").get<int>();
    a.growth_patience = j.at("growth_patience").get<int>();
    a.growth_min_improvement = j.at("growth_min_improvement").get<double>();
    a.prune = j.at("prune").get<bool>();
    a.prune_epsilon = j.at("prune_epsilon").get<double>();
    a.prune_accuracy_drop = j.at("prune_accuracy_drop").get<double>();
    a.out = j.at("out").get<std::string>();
    return a;
}

inline int cmd_train(TrainArgs args) {
    args.out = resolve_out(args.out);
    const Dataset data = load_dataset(args.dataset, args.seed);
    const AnsatzFile file = load_ansatz(args.ansatz);
    Library lib;
    if (args.grow) {
        if (args.library.empty()) {
            throw std::invalid_argument("--grow needs --library for appendable sub-circuits");
        }
        lib = load_library(args.library);
    }

    const int classes = (args.classes > 0) ? args.classes : data.num_classes;
    Model model = make_model(file.ansatz, data.num_features, classes);

    TrainConfig cfg;
    cfg.epochs = args.epochs;
    cfg.batch_size = args.batch_size;
    cfg.lr = args.lr;
    cfg.seed = args.seed;
    cfg.growth_cap = args.grow ? args.growth_cap : 0;
    cfg.growth_patience = args.growth_patience;
    cfg.growth_min_improvement = args.growth_min_improvement;
    cfg.prune_epsilon = args.prune_epsilon;
    cfg.prune_accuracy_drop = args.prune_accuracy_drop;

    if (file.params) {
        if (file.params->size() != model.params.size()) {
            throw DataError("ansatz parameter vector does not match the circuit");
        }
        model.params = *file.params;
    } else {
        init_params(model, cfg);
    }

    const TrainReport report =
        train_full(model, args.grow ? &lib : nullptr, data, cfg, args.grow, args.prune);

    std::filesystem::create_directories(args.out);
    save_report(report, args.out + "/report.json");
    save_metrics_csv(report, args.out + "/metrics.csv");
    save_ansatz(model.ansatz, args.out + "/ansatz.json", &model.params);
    write_run_config(args.out + "/run_config.json", "train", to_json(args));
    std::cout << "final test accuracy: " << report.final_test_accuracy << " (status "
              << report.status << ")\n";
    if (report.status != "ok") {
        throw NumericalError("training diverged (non-finite loss)");
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

struct CompareArgs {
    std::string ansatz;
    std::string topology = "tshape5";
    int seeds = 20;
    std::uint64_t seed = 0;
    std::string out = "compare.csv";
};

inline nlohmann::json to_json(const CompareArgs& a) {
    return {{"ansatz", a.ansatz},
            {"topology", a.topology},
            {"seeds", a.seeds},
            {"seed", a.seed},
            {"out", a.out}};
}

inline CompareArgs compare_args_from_json(const nlohmann::json& j) {
    CompareArgs a;
    a.ansatz = j.at("ansatz").get<std::string>();
    a.topology = j.at("topology").get<std::string>();
    a.seeds = j.at("seeds").get<int>();
    a.seed = j.at("seed").get<std::uint64_t>();
    a.out = j.at("out").get<std::string>();
    return a;
}

inline int cmd_compare(CompareArgs args) {
    args.out = resolve_out(args.out);
    const CouplingGraph device = named_topology(args.topology);
    const AnsatzFile file = load_ansatz(args.ansatz);
    const auto rows = compare_ansatz(file.ansatz, device, args.seeds, args.seed);
    ensure_parent_dir(args.out);
    save_comparison_csv(rows, args.out);
    write_run_config(sibling_path(args.out, ".run.json"), "compare", to_json(args));
    return kOk;
}

// ---------------------------------------------------------------------------
// rerun: replay a saved run config
// ---------------------------------------------------------------------------

inline int run_command(const std::string& command, const nlohmann::json& args) {
    if (command == "gen") {
        return cmd_gen(gen_args_from_json(args));
    }
    if (command == "eval") {
        return cmd_eval(eval_args_from_json(args));
    }
    if (command == "build") {
        return cmd_build(build_args_from_json(args));
    }
    if (command == "stitch") {
        return cmd_stitch(stitch_args_from_json(args));
    }
    if (command == "prune") {
        return cmd_prune(prune_args_from_json(args));
    }
    if (command == "train") {
        return cmd_train(train_args_from_json(args));
    }
    if (command == "compare") {
        return cmd_compare(compare_args_from_json(args));
    }
    throw std::invalid_argument("unknown command '" + command + "' in run config");
}

/// Re-executes a saved run config; out_override redirects the primary
/// output so results can be compared against the original.
inline int rerun(const std::string& config_path, const std::string& out_override = "") {
    std::ifstream in(config_path);
    if (!in) {
        throw DataError("cannot open run config '" + config_path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("run config is not valid JSON: ") + e.what());
    }
    nlohmann::json args = j.at("args");
    if (!out_override.empty()) {
        args["out"] = out_override;
    }
    return run_command(j.at("command").get<std::string>(), args);
}

/// Runs fn and maps exceptions onto the documented exit codes.
template <typename Fn>
int run_cli_action(Fn&& fn) {
    try {
        return fn();
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const QasmError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const TopologyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const PartitionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    }
}

} // namespace vqsyn::cli
