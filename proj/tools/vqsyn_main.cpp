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

#include <string>

#include "CLI11.hpp"

#include "vqsyn/cli.hpp"

int main(int argc, char** argv) {
    using namespace vqsyn::cli;

    CLI::App app{"vqsyn: topology-aware variational circuit synthesis toolkit"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "generate and score a sub-circuit library");
    gen_cmd->add_option("--topology", gen.topology, "device: line:N, grid:RxC, tshape5, heavyhex65, or a JSON file");
    gen_cmd->add_option("--templates", gen.templates, "comma list of path2,path3,path4,star3 or 'auto'");
    gen_cmd->add_option("--count", gen.count, "draws per template");
    gen_cmd->add_option("--depth-limit", gen.depth_limit, "sub-circuit depth limit");
    gen_cmd->add_flag("--extended-gates", gen.extended_gates, "also draw sqrt(X) and H gates");
    gen_cmd->add_option("--pairs", gen.pairs, "fidelity pairs per expressibility estimate");
    gen_cmd->add_option("--bins", gen.bins, "fidelity histogram bins");
    gen_cmd->add_option("--mw-samples", gen.mw_samples, "parameter draws per entanglement estimate");
    gen_cmd->add_option("--seed", gen.seed, "seed");
    gen_cmd->add_option("--threads", gen.threads, "scoring worker threads (0 = all cores)");
    gen_cmd->add_option("--out", gen.out, "library output path");

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "dump per-circuit scores from a library");
    eval_cmd->add_option("--library", eval.library, "library file")->required();
    eval_cmd->add_option("--out", eval.out, "scores CSV path");
    eval_cmd->add_option("--histogram", eval.histogram, "optional fidelity histogram JSON dump");
    eval_cmd->add_option("--id", eval.id, "restrict the histogram dump to one entry");

    BuildArgs build;
    auto* build_cmd = app.add_subcommand("build", "combine library sub-circuits into an ansatz");
    build_cmd->add_option("--library", build.library, "library file")->required();
    build_cmd->add_option("--topology", build.topology, "device topology");
    build_cmd->add_option("--qubits", build.qubits, "target qubits (comma list; default all)");
    build_cmd->add_option("--policy", build.policy, "exp | ent | mixed | random");
    build_cmd->add_option("--placement", build.placement, "balanced | decreasing_size");
    build_cmd->add_option("--depth-threshold", build.depth_threshold, "stop appending past this depth");
    build_cmd->add_option("--mixed-ratio", build.mixed_ratio, "EXP share for the mixed policy");
    build_cmd->add_option("--stitch", build.stitch, "optional stitch kind: cnot | crx | swap");
    build_cmd->add_option("--stitch-placement", build.stitch_placement, "idle | block_end");
    build_cmd->add_option("--seed", build.seed, "seed");
    build_cmd->add_option("--out", build.out, "ansatz output path");

    StitchArgs stitch;
    auto* stitch_cmd = app.add_subcommand("stitch", "insert cross-block two-qubit gates");
    stitch_cmd->add_option("--ansatz", stitch.ansatz, "ansatz file")->required();
    stitch_cmd->add_option("--topology", stitch.topology, "device topology");
    stitch_cmd->add_option("--kind", stitch.kind, "cnot | crx | swap");
    stitch_cmd->add_option("--placement", stitch.placement, "idle | block_end");
    stitch_cmd->add_option("--out", stitch.out, "output path");

    PruneArgs prune;
    auto* prune_cmd = app.add_subcommand("prune", "remove rotations with near-zero angles");
    prune_cmd->add_option("--ansatz", prune.ansatz, "trained ansatz file (with params)")->required();
    prune_cmd->add_option("--epsilon", prune.epsilon, "magnitude threshold (radians)");
    prune_cmd->add_option("--out", prune.out, "output path");

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "train a QNN on a dataset");
    train_cmd->add_option("--dataset", train.dataset,
                          "blobs:L | circles:L | moons:L | csv:PATH | images:DIR[:c0,c1]");
    train_cmd->add_option("--ansatz", train.ansatz, "ansatz file")->required();
    train_cmd->add_option("--library", train.library, "library file (required with --grow)");
    train_cmd->add_option("--classes", train.classes, "override class count");
    train_cmd->add_option("--epochs", train.epochs, "training epochs");
    train_cmd->add_option("--batch", train.batch_size, "mini-batch size");
    train_cmd->add_option("--lr", train.lr, "learning rate");
    train_cmd->add_option("--seed", train.seed, "seed");
    train_cmd->add_flag("--grow", train.grow, "grow the ansatz when validation accuracy stalls");
    train_cmd->add_option("--growth-cap", train.growth_cap, "max growth events");
    train_cmd->add_option("--growth-patience", train.growth_patience, "stall window (epochs)");
    train_cmd->add_option("--growth-min-improvement", train.growth_min_improvement,
                          "improvement below this counts as a stall");
    train_cmd->add_flag("--prune", train.prune, "prune small rotations after training");
    train_cmd->add_option("--prune-epsilon", train.prune_epsilon, "pruning threshold (radians)");
    train_cmd->add_option("--prune-accuracy-drop", train.prune_accuracy_drop,
                          "revert and stop past this validation accuracy drop");
    train_cmd->add_option("--out", train.out, "output directory");

    CompareArgs compare;
    auto* compare_cmd = app.add_subcommand("compare", "transpilation cost vs. baselines");
    compare_cmd->add_option("--ansatz", compare.ansatz, "ansatz file")->required();
    compare_cmd->add_option("--topology", compare.topology, "device topology");
    compare_cmd->add_option("--seeds", compare.seeds, "random baseline draws");
    compare_cmd->add_option("--seed", compare.seed, "seed");
    compare_cmd->add_option("--out", compare.out, "comparison CSV path");

    std::string rerun_config;
    std::string rerun_out;
    auto* rerun_cmd = app.add_subcommand("rerun", "replay a saved run config");
    rerun_cmd->add_option("--config", rerun_config, "run_config.json path")->required();
    rerun_cmd->add_option("--out", rerun_out, "redirect the primary output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    return run_cli_action([&]() -> int {
        if (gen_cmd->parsed()) {
            return cmd_gen(gen);
        }
        if (eval_cmd->parsed()) {
            return cmd_eval(eval);
        }
        if (build_cmd->parsed()) {
            return cmd_build(build);
        }
        if (stitch_cmd->parsed()) {
            return cmd_stitch(stitch);
        }
        if (prune_cmd->parsed()) {
            return cmd_prune(prune);
        }
        if (train_cmd->parsed()) {
            return cmd_train(train);
        }
        if (compare_cmd->parsed()) {
            return cmd_compare(compare);
        }
        if (rerun_cmd->parsed()) {
            return vqsyn::cli::rerun(rerun_config, rerun_out);
        }
        return kConfigError;
    });
}
