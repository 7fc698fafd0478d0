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
#include <span>
#include <stdexcept>
#include <vector>

#include "vqsyn/ansatz.hpp"
#include "vqsyn/dataset.hpp"
#include "vqsyn/statevector.hpp"

namespace vqsyn {

/// Fixed (non-trainable) angle encoding layout. Feature f lands on qubit
/// assignment[f].first in layer assignment[f].second with rotation axis
/// axes[f]; the axis cycles per layer so stacked encoding rotations never
/// merge into each other.
struct EncoderSpec {
    int num_qubits = 0;
    std::vector<GateKind> axes;                 // per feature slot
    std::vector<std::pair<int, int>> assignment; // feature -> (qubit, layer)

    int num_features() const { return static_cast<int>(axes.size()); }
};

/// Round-robin layout: feature f -> qubit f % n, layer f / n, with axes
/// cycling RY, RZ, RX by layer.
inline EncoderSpec make_round_robin_encoder(int num_features, int num_qubits) {
    if (num_features <= 0 || num_qubits <= 0) {
        throw std::invalid_argument("make_round_robin_encoder: counts must be positive");
    }
    const GateKind cycle[] = {GateKind::RY, GateKind::RZ, GateKind::RX};
    EncoderSpec spec;
    spec.num_qubits = num_qubits;
    for (int f = 0; f < num_features; ++f) {
        const int layer = f / num_qubits;
        spec.axes.push_back(cycle[layer % 3]);
        spec.assignment.push_back({f % num_qubits, layer});
    }
    return spec;
}

/// Encoder circuit with the (rescaled) features bound as rotation angles.
/// All-zero features encode the identity on |0...0>.
inline BoundCircuit angle_encode(std::span<const double> features, const EncoderSpec& spec) {
    if (features.size() != static_cast<std::size_t>(spec.num_features())) {
        throw std::invalid_argument("angle_encode: feature count does not match encoder spec");
    }
    BoundCircuit bc;
    bc.circuit = ParamCircuit(spec.num_qubits);
    for (std::size_t f = 0; f < features.size(); ++f) {
        bc.circuit.add_rotation(spec.axes[f], spec.assignment[f].first);
        bc.params.push_back(features[f]);
    }
    return bc;
}

/// Readout head: qubits grouped per class; the class score is the mean
/// Pauli-Z expectation of its group.
struct Readout {
    int num_classes = 0;
    std::vector<std::vector<int>> groups;
};

inline Readout make_round_robin_readout(int num_qubits, int num_classes) {
    if (num_classes < 2 || num_qubits < num_classes) {
        throw std::invalid_argument("make_round_robin_readout: need at least one qubit per class");
    }
    Readout r;
    r.num_classes = num_classes;
    r.groups.resize(static_cast<std::size_t>(num_classes));
    for (int q = 0; q < num_qubits; ++q) {
        r.groups[static_cast<std::size_t>(q % num_classes)].push_back(q);
    }
    return r;
}

/// Trainable QNN: encoder, topology-certified ansatz, readout grouping,
/// and the current parameter vector. Encoder angles never appear in
/// `params`.
struct Model {
    EncoderSpec encoder;
    Ansatz ansatz;
    Readout readout;
    std::vector<double> params;

    int num_qubits() const { return ansatz.circuit.num_qubits; }
};

inline Model make_model(const Ansatz& ansatz, int num_features, int num_classes) {
    Model m;
    m.ansatz = ansatz;
    m.encoder = make_round_robin_encoder(num_features, ansatz.circuit.num_qubits);
    m.readout = make_round_robin_readout(ansatz.circuit.num_qubits, num_classes);
    m.params.assign(static_cast<std::size_t>(ansatz.circuit.num_params), 0.0);
    return m;
}

inline void init_params(Model& m, Rng& rng, double range = kPi / 8.0) {
    for (auto& p : m.params) {
        p = rng.uniform(-range, range);
    }
}

inline std::vector<double> softmax(std::span<const double> scores) {
    double mx = scores[0];
    for (double s : scores) {
        mx = std::max(mx, s);
    }
    double total = 0.0;
    std::vector<double> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = std::exp(scores[i] - mx);
        total += out[i];
    }
    for (auto& v : out) {
        v /= total;
    }
    return out;
}

namespace detail {

/// Encoded input state, cached while sweeping parameter shifts.
inline Statevector encode_state(const Model& m, std::span<const double> features) {
    const BoundCircuit enc = angle_encode(features, m.encoder);
    return simulate(enc, Statevector::zero(m.num_qubits()));
}

inline std::vector<double> expectations_from(const Model& m, const Statevector& encoded,
                                             std::span<const double> params) {
    const Statevector out = simulate(m.ansatz.circuit, params, encoded);
    std::vector<double> z(static_cast<std::size_t>(m.num_qubits()));
    for (int q = 0; q < m.num_qubits(); ++q) {
        z[static_cast<std::size_t>(q)] = expectation_pauli_z(out, q);
    }
    return z;
}

inline std::vector<double> group_scores(const Readout& r, std::span<const double> z) {
    std::vector<double> scores(static_cast<std::size_t>(r.num_classes), 0.0);
    for (int c = 0; c < r.num_classes; ++c) {
        const auto& grp = r.groups[static_cast<std::size_t>(c)];
        double total = 0.0;
        for (int q : grp) {
            total += z[static_cast<std::size_t>(q)];
        }
        scores[static_cast<std::size_t>(c)] = total / static_cast<double>(grp.size());
    }
    return scores;
}

} // namespace detail

/// Class probabilities for one sample: encoder state -> ansatz -> per-qubit
/// Pauli-Z expectations -> per-class mean -> softmax.
inline std::vector<double> forward(const Model& m, std::span<const double> features) {
    const Statevector enc = detail::encode_state(m, features);
    const auto z = detail::expectations_from(m, enc, m.params);
    return softmax(detail::group_scores(m.readout, z));
}

/// Cross-entropy -ln p[label]; probabilities are clamped at 1e-12.
inline double cross_entropy(std::span<const double> probs, int label) {
    if (label < 0 || label >= static_cast<int>(probs.size())) {
        throw std::out_of_range("cross_entropy: label out of range");
    }
    return -std::log(std::max(probs[static_cast<std::size_t>(label)], 1e-12));
}

/// Mean cross-entropy over a batch of dataset rows.
inline double batch_loss(const Model& m, const Dataset& d, std::span<const int> batch) {
    double total = 0.0;
    for (int idx : batch) {
        total += cross_entropy(forward(m, d.features[static_cast<std::size_t>(idx)]),
                               d.labels[static_cast<std::size_t>(idx)]);
    }
    return total / static_cast<double>(batch.size());
}

/// Mean cross-entropy gradient over a batch via the parameter-shift rule.
/// The shift is applied at the expectation level: dz/dtheta_j comes from
/// evaluating each qubit's <Z> at theta_j +- pi/2, and the cross-entropy
/// and softmax are differentiated classically on top. Requires every
/// trainable slot to feed exactly one rotation gate. If batch_losses is
/// given it receives the per-sample losses at the unshifted parameters.
inline std::vector<double> gradient(const Model& m, const Dataset& d, std::span<const int> batch,
                                    std::vector<double>* batch_losses = nullptr) {
    const int P = m.ansatz.circuit.num_params;
    std::vector<int> slot_users(static_cast<std::size_t>(P), 0);
    for (const auto& g : m.ansatz.circuit.gates) {
        if (g.param_index >= 0) {
            if (!is_rotation(g.kind)) {
                throw std::invalid_argument("gradient: trainable gate is not a rotation");
            }
            ++slot_users[static_cast<std::size_t>(g.param_index)];
        }
    }
    for (int users : slot_users) {
        if (users != 1) {
            throw std::invalid_argument(
                "gradient: parameter-shift rule needs each slot on exactly one rotation gate");
        }
    }

    std::vector<double> grad(static_cast<std::size_t>(P), 0.0);
    std::vector<double> shifted(m.params.begin(), m.params.end());
    for (int idx : batch) {
        const auto& features = d.features[static_cast<std::size_t>(idx)];
        const int label = d.labels[static_cast<std::size_t>(idx)];
        const Statevector enc = detail::encode_state(m, features);
        const auto z = detail::expectations_from(m, enc, m.params);
        const auto scores = detail::group_scores(m.readout, z);
        const auto probs = softmax(scores);
        if (batch_losses) {
            batch_losses->push_back(cross_entropy(probs, label));
        }

        // dL/dz_k through softmax + cross-entropy + group averaging
        std::vector<double> dLdz(static_cast<std::size_t>(m.num_qubits()), 0.0);
        for (int c = 0; c < m.readout.num_classes; ++c) {
            const auto& grp = m.readout.groups[static_cast<std::size_t>(c)];
            const double dLds = probs[static_cast<std::size_t>(c)] - ((c == label) ? 1.0 : 0.0);
            for (int q : grp) {
                dLdz[static_cast<std::size_t>(q)] = dLds / static_cast<double>(grp.size());
            }
        }

        for (int j = 0; j < P; ++j) {
            const double original = shifted[static_cast<std::size_t>(j)];
            shifted[static_cast<std::size_t>(j)] = original + kPi / 2.0;
            const auto z_plus = detail::expectations_from(m, enc, shifted);
            shifted[static_cast<std::size_t>(j)] = original - kPi / 2.0;
            const auto z_minus = detail::expectations_from(m, enc, shifted);
            shifted[static_cast<std::size_t>(j)] = original;
            double g = 0.0;
            for (int q = 0; q < m.num_qubits(); ++q) {
                g += dLdz[static_cast<std::size_t>(q)] *
                     (z_plus[static_cast<std::size_t>(q)] - z_minus[static_cast<std::size_t>(q)]) / 2.0;
            }
            grad[static_cast<std::size_t>(j)] += g;
        }
    }
    for (auto& g : grad) {
        g /= static_cast<double>(batch.size());
    }
    return grad;
}

/// Accuracy of argmax-forward on the given index set.
inline double evaluate(const Model& m, const Dataset& d, std::span<const int> indices) {
    if (indices.empty()) {
        throw std::invalid_argument("evaluate: empty split");
    }
    int hits = 0;
    for (int idx : indices) {
        const auto probs = forward(m, d.features[static_cast<std::size_t>(idx)]);
        int best = 0;
        for (int c = 1; c < static_cast<int>(probs.size()); ++c) {
            if (probs[static_cast<std::size_t>(c)] > probs[static_cast<std::size_t>(best)]) {
                best = c;
            }
        }
        hits += (best == d.labels[static_cast<std::size_t>(idx)]) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(indices.size());
}

} // namespace vqsyn
