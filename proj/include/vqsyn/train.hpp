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

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "vqsyn/qnn.hpp"

namespace vqsyn {

struct TrainConfig {
    int epochs = 30;
    int batch_size = 32;
    double lr = 0.05;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 0;
    double init_range = kPi / 8.0; // parameter init, uniform [-r, r]

    // growth: grow when validation accuracy improved by less than
    // min_improvement over patience consecutive epochs
    int growth_patience = 3;
    double growth_min_improvement = 0.005;
    int growth_cap = 0;

    // pruning
    double prune_epsilon = 0.1;
    double prune_accuracy_drop = 0.02;
    int prune_finetune_epochs = 2;

    void check() const {
        if (epochs < 0 || batch_size <= 0 || growth_patience <= 0 || growth_cap < 0 ||
            growth_min_improvement < 0.0 || prune_epsilon <= 0.0 || prune_finetune_epochs < 0) {
            throw std::invalid_argument("TrainConfig: counts must be positive, deltas non-negative");
        }
    }
};

struct GrowthEvent {
    int epoch = 0;
    int library_id = -1;
    int block = -1;
    int params_added = 0;
    double forward_delta = 0.0; // max |probability change| over the probe batch
};

struct PruneEvent {
    int step = 0;
    int epoch = 0;
    std::string gate;
    double theta = 0.0;
    double val_accuracy_before = 0.0;
    double val_accuracy_after = 0.0;
    bool committed = false;
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double val_accuracy = 0.0;
    int gate_count = 0;
    int param_count = 0;
};

struct TrainReport {
    std::vector<EpochStats> epochs;
    std::vector<GrowthEvent> growth_events;
    std::vector<PruneEvent> prune_events;
    double final_test_accuracy = 0.0;
    std::string status = "ok"; // "ok" | "diverged"
};

namespace detail {

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;

    void resize(std::size_t n) {
        m.resize(n, 0.0);
        v.resize(n, 0.0);
    }
};

inline void adam_update(std::vector<double>& params, const std::vector<double>& grad,
                        AdamState& st, const TrainConfig& cfg) {
    ++st.step;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        st.m[i] = cfg.beta1 * st.m[i] + (1.0 - cfg.beta1) * grad[i];
        st.v[i] = cfg.beta2 * st.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        params[i] -= cfg.lr * (st.m[i] / bc1) / (std::sqrt(st.v[i] / bc2) + cfg.adam_eps);
    }
}

constexpr std::uint64_t kShuffleStream = 0x53485546;
constexpr std::uint64_t kGrowStream = 0x47524f57;
constexpr std::uint64_t kPruneStream = 0x50525545;
constexpr std::uint64_t kInitStream = 0x494e4954;

/// One pass over the train split in mini-batches; returns mean loss.
inline double train_epoch(Model& model, const Dataset& data, const TrainConfig& cfg,
                          AdamState& adam, int epoch) {
    std::vector<int> order = data.train_idx;
    Rng rng(derive_seed(cfg.seed, kShuffleStream, static_cast<std::uint64_t>(epoch)));
    shuffle(order, rng);
    double loss_total = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
        const std::size_t end = std::min(order.size(), start + cfg.batch_size);
        std::vector<double> losses;
        const auto grad = gradient(model, data,
                                   std::span<const int>(order.data() + start, end - start), &losses);
        adam_update(model.params, grad, adam, cfg);
        for (double l : losses) {
            loss_total += l;
        }
        loss_count += losses.size();
    }
    return loss_count ? loss_total / static_cast<double>(loss_count) : 0.0;
}

inline std::vector<int> probe_batch(const Dataset& data, std::size_t cap = 64) {
    std::vector<int> probe(data.val_idx.begin(),
                           data.val_idx.begin() +
                               std::min<std::size_t>(cap, data.val_idx.size()));
    return probe;
}

inline double max_forward_delta(const Model& m, const Dataset& data, const std::vector<int>& probe,
                                const std::vector<std::vector<double>>& before) {
    double delta = 0.0;
    for (std::size_t i = 0; i < probe.size(); ++i) {
        const auto after = forward(m, data.features[static_cast<std::size_t>(probe[i])]);
        for (std::size_t c = 0; c < after.size(); ++c) {
            delta = std::max(delta, std::abs(after[c] - before[i][c]));
        }
    }
    return delta;
}

inline TrainReport run_training(Model& model, const Library* lib, const Dataset& data,
                                const TrainConfig& cfg, bool allow_growth) {
    cfg.check();
    if (data.train_idx.empty()) {
        throw std::invalid_argument("train: empty train split");
    }
    TrainReport report;
    AdamState adam;
    adam.resize(model.params.size());
    Rng grow_rng(derive_seed(cfg.seed, kGrowStream));

    double best_val = -1.0;
    int last_improve_epoch = 0;
    int growth_events = 0;
    bool growth_enabled = allow_growth && lib != nullptr && cfg.growth_cap > 0;
    bool growth_pending_check = false;
    int growth_epoch = 0;
    double best_at_growth = 0.0;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const double train_loss = train_epoch(model, data, cfg, adam, epoch);
        if (!std::isfinite(train_loss)) {
            report.status = "diverged";
            break;
        }
        const double val_acc = data.val_idx.empty() ? 0.0 : evaluate(model, data, data.val_idx);
        report.epochs.push_back({epoch, train_loss, val_acc,
                                 static_cast<int>(model.ansatz.circuit.gates.size()),
                                 model.ansatz.circuit.num_params});

        if (val_acc > best_val + cfg.growth_min_improvement) {
            last_improve_epoch = epoch;
        }
        best_val = std::max(best_val, val_acc);

        if (growth_pending_check && epoch >= growth_epoch + cfg.growth_patience) {
            growth_pending_check = false;
            if (best_val <= best_at_growth + cfg.growth_min_improvement) {
                growth_enabled = false; // the last growth did not pay off
            }
        }

        if (growth_enabled && growth_events < cfg.growth_cap && epoch < cfg.epochs &&
            epoch - last_improve_epoch >= cfg.growth_patience) {
            const auto probe = probe_batch(data);
            std::vector<std::vector<double>> before;
            before.reserve(probe.size());
            for (int idx : probe) {
                before.push_back(forward(model, data.features[static_cast<std::size_t>(idx)]));
            }
            GrowResult grown = grow(model.ansatz, *lib, grow_rng);
            model.ansatz = std::move(grown.ansatz);
            model.params.resize(model.params.size() + grown.params_added, 0.0);
            adam.resize(model.params.size());
            const double delta = max_forward_delta(model, data, probe, before);
            report.growth_events.push_back(
                {epoch, grown.library_id, grown.block, grown.params_added, delta});
            ++growth_events;
            best_at_growth = best_val;
            growth_epoch = epoch;
            growth_pending_check = true;
            last_improve_epoch = epoch; // wait a full window before growing again
        }
    }
    if (!data.test_idx.empty()) {
        report.final_test_accuracy = evaluate(model, data, data.test_idx);
    }
    return report;
}

} // namespace detail

inline void init_params(Model& m, const TrainConfig& cfg) {
    Rng rng(derive_seed(cfg.seed, detail::kInitStream));
    init_params(m, rng, cfg.init_range);
}

/// Plain mini-batch training (Adam) for cfg.epochs; deterministic under
/// cfg.seed. Aborts with status "diverged" if the loss goes non-finite.
inline TrainReport train(Model& model, const Dataset& data, const TrainConfig& cfg) {
    return detail::run_training(model, nullptr, data, cfg, false);
}

/// Training with dynamic growth: whenever validation accuracy stalls for
/// growth_patience epochs, one appendable sub-circuit is appended with
/// zero-initialized parameters (the forward pass is unchanged at the
/// event, recorded per event as forward_delta). Growing stops when an
/// append fails to raise the best validation accuracy within the next
/// patience window, or at growth_cap events.
inline TrainReport train_with_growth(Model& model, const Library& lib, const Dataset& data,
                                     const TrainConfig& cfg) {
    return detail::run_training(model, &lib, data, cfg, true);
}

/// Magnitude pruning loop on a trained model: repeatedly removes the
/// rotation with the smallest |angle| below prune_epsilon, fine-tunes for
/// prune_finetune_epochs, and reverts + stops when validation accuracy
/// drops by more than prune_accuracy_drop.
inline void prune_phase(Model& model, const Dataset& data, const TrainConfig& cfg,
                        TrainReport& report) {
    cfg.check();
    int epoch_counter = report.epochs.empty() ? 0 : report.epochs.back().epoch;
    int step = 0;
    for (;;) {
        int doomed = -1;
        double doomed_theta = 0.0;
        for (std::size_t i = 0; i < model.ansatz.circuit.gates.size(); ++i) {
            const auto& g = model.ansatz.circuit.gates[i];
            if (g.param_index < 0) {
                continue;
            }
            const double theta = model.params[static_cast<std::size_t>(g.param_index)];
            if (std::abs(theta) < cfg.prune_epsilon &&
                (doomed < 0 || std::abs(theta) < std::abs(doomed_theta))) {
                doomed = static_cast<int>(i);
                doomed_theta = theta;
            }
        }
        if (doomed < 0) {
            break;
        }

        const Ansatz saved_ansatz = model.ansatz;
        const std::vector<double> saved_params = model.params;
        const double val_before = evaluate(model, data, data.val_idx);
        const auto& g = model.ansatz.circuit.gates[static_cast<std::size_t>(doomed)];
        const std::string desc = std::string(gate_name(g.kind)) + " q" + std::to_string(g.q0);

        auto [pruned, new_params] = remove_gates(model.ansatz, model.params, {doomed});
        model.ansatz = std::move(pruned);
        model.params = std::move(new_params);

        detail::AdamState adam;
        adam.resize(model.params.size());
        for (int e = 0; e < cfg.prune_finetune_epochs; ++e) {
            ++epoch_counter;
            const double loss = detail::train_epoch(model, data, cfg, adam, epoch_counter);
            const double val_acc = evaluate(model, data, data.val_idx);
            report.epochs.push_back({epoch_counter, loss, val_acc,
                                     static_cast<int>(model.ansatz.circuit.gates.size()),
                                     model.ansatz.circuit.num_params});
        }
        const double val_after = evaluate(model, data, data.val_idx);

        ++step;
        const bool keep = (val_before - val_after) <= cfg.prune_accuracy_drop;
        report.prune_events.push_back(
            {step, epoch_counter, desc, doomed_theta, val_before, val_after, keep});
        if (!keep) {
            model.ansatz = saved_ansatz;
            model.params = saved_params;
            break;
        }
    }
    if (!data.test_idx.empty()) {
        report.final_test_accuracy = evaluate(model, data, data.test_idx);
    }
}

/// Trains, then runs the pruning loop.
inline TrainReport train_with_pruning(Model& model, const Dataset& data, const TrainConfig& cfg) {
    TrainReport report = detail::run_training(model, nullptr, data, cfg, false);
    if (report.status == "ok") {
        prune_phase(model, data, cfg, report);
    }
    return report;
}

/// Full pipeline used by the CLI: optional growth, optional pruning.
inline TrainReport train_full(Model& model, const Library* lib, const Dataset& data,
                              const TrainConfig& cfg, bool with_growth, bool with_pruning) {
    TrainReport report = detail::run_training(model, lib, data, cfg, with_growth);
    if (with_pruning && report.status == "ok") {
        prune_phase(model, data, cfg, report);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline nlohmann::json report_to_json(const TrainReport& r) {
    nlohmann::json j;
    j["schema"] = 1;
    j["status"] = r.status;
    j["final_test_accuracy"] = r.final_test_accuracy;
    j["epochs"] = nlohmann::json::array();
    for (const auto& e : r.epochs) {
        j["epochs"].push_back({{"epoch", e.epoch},
                               {"train_loss", e.train_loss},
                               {"val_accuracy", e.val_accuracy},
                               {"gate_count", e.gate_count},
                               {"param_count", e.param_count}});
    }
    j["growth_events"] = nlohmann::json::array();
    for (const auto& e : r.growth_events) {
        j["growth_events"].push_back({{"epoch", e.epoch},
                                      {"library_id", e.library_id},
                                      {"block", e.block},
                                      {"params_added", e.params_added},
                                      {"forward_delta", e.forward_delta}});
    }
    j["prune_events"] = nlohmann::json::array();
    for (const auto& e : r.prune_events) {
        j["prune_events"].push_back({{"step", e.step},
                                     {"epoch", e.epoch},
                                     {"gate", e.gate},
                                     {"theta", e.theta},
                                     {"val_accuracy_before", e.val_accuracy_before},
                                     {"val_accuracy_after", e.val_accuracy_after},
                                     {"committed", e.committed}});
    }
    return j;
}

inline void save_report(const TrainReport& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write report file '" + path + "'");
    }
    out << report_to_json(r).dump(2) << '\n';
}

/// Flat per-epoch metrics for plotting.
inline void save_metrics_csv(const TrainReport& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write metrics file '" + path + "'");
    }
    out << "epoch,train_loss,val_accuracy,gate_count,param_count\n";
    char buf[64];
    for (const auto& e : r.epochs) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%d,%d\n", e.epoch, e.train_loss,
                      e.val_accuracy, e.gate_count, e.param_count);
        out << buf;
    }
}

} // namespace vqsyn
