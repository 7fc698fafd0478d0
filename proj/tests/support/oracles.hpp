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

// Test-only oracles. These rebuild circuit semantics through dense Eigen
// matrix algebra (Kronecker expansion + explicit products), independently
// of the statevector simulation path they are used to check.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "vqsyn/circuit.hpp"
#include "vqsyn/gates.hpp"
#include "vqsyn/rng.hpp"
#include "vqsyn/statevector.hpp"
#include "vqsyn/unitary.hpp"

namespace oracles {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using vqsyn::GateInstance;
using vqsyn::GateKind;
using vqsyn::ParamCircuit;

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
        }
    }
    return out;
}

inline Mat identity(int qubits) {
    const Eigen::Index dim = Eigen::Index(1) << qubits;
    return Mat::Identity(dim, dim);
}

inline Mat gate_matrix_2x2(GateKind kind, double theta) {
    const auto m = vqsyn::single_qubit_matrix(kind, theta);
    Mat out(2, 2);
    out << m.m00, m.m01, m.m10, m.m11;
    return out;
}

/// Expands a single-qubit operator to the full register. Qubit 0 is the
/// least-significant bit, so it sits in the rightmost Kronecker factor.
inline Mat expand_single(const Mat& m, int qubit, int num_qubits) {
    return kron(identity(num_qubits - 1 - qubit), kron(m, identity(qubit)));
}

/// CNOT via projectors: |0><0|_c (x) I + |1><1|_c (x) X_t.
inline Mat expand_cnot(int control, int target, int num_qubits) {
    Mat p0(2, 2), p1(2, 2), x(2, 2);
    p0 << 1, 0, 0, 0;
    p1 << 0, 0, 0, 1;
    x << 0, 1, 1, 0;
    return expand_single(p0, control, num_qubits) +
           expand_single(p1, control, num_qubits) * expand_single(x, target, num_qubits);
}

inline Mat expand_swap(int a, int b, int num_qubits) {
    return expand_cnot(a, b, num_qubits) * expand_cnot(b, a, num_qubits) *
           expand_cnot(a, b, num_qubits);
}

inline Mat gate_full_matrix(const GateInstance& g, std::span<const double> params, int num_qubits) {
    switch (g.kind) {
        case GateKind::CNOT:
            return expand_cnot(g.q0, g.q1, num_qubits);
        case GateKind::SWAP:
            return expand_swap(g.q0, g.q1, num_qubits);
        default: {
            const double theta =
                vqsyn::is_rotation(g.kind) ? params[static_cast<std::size_t>(g.param_index)] : 0.0;
            return expand_single(gate_matrix_2x2(g.kind, theta), g.q0, num_qubits);
        }
    }
}

/// Full circuit unitary as an explicit matrix product (later gates on the
/// left).
inline Mat circuit_matrix(const ParamCircuit& c, std::span<const double> params) {
    Mat u = identity(c.num_qubits);
    for (const auto& g : c.gates) {
        u = gate_full_matrix(g, params, c.num_qubits) * u;
    }
    return u;
}

inline Vec to_eigen(const vqsyn::Statevector& s) {
    Vec v(static_cast<Eigen::Index>(s.dim()));
    for (std::size_t i = 0; i < s.dim(); ++i) {
        v(static_cast<Eigen::Index>(i)) = s.amps[i];
    }
    return v;
}

inline Mat to_eigen(const vqsyn::UnitaryMatrix& u) {
    Mat m(static_cast<Eigen::Index>(u.dim), static_cast<Eigen::Index>(u.dim));
    for (std::size_t r = 0; r < u.dim; ++r) {
        for (std::size_t c = 0; c < u.dim; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = u.at(r, c);
        }
    }
    return m;
}

/// Random circuit over rotations + CNOTs, avoiding immediate repeats so
/// fixtures stay simplification-free unless a test wants otherwise.
inline ParamCircuit random_circuit(int num_qubits, int num_gates, vqsyn::Rng& rng,
                                   double cnot_fraction = 0.3) {
    ParamCircuit c(num_qubits);
    const GateKind rotations[] = {GateKind::RX, GateKind::RY, GateKind::RZ};
    while (static_cast<int>(c.gates.size()) < num_gates) {
        if (num_qubits >= 2 && rng.coin(cnot_fraction)) {
            const int a = static_cast<int>(rng.integer(static_cast<std::size_t>(num_qubits)));
            int b = static_cast<int>(rng.integer(static_cast<std::size_t>(num_qubits - 1)));
            if (b >= a) {
                ++b;
            }
            if (!c.gates.empty() && c.gates.back().kind == GateKind::CNOT &&
                c.gates.back().q0 == a && c.gates.back().q1 == b) {
                continue;
            }
            c.add(GateKind::CNOT, a, b);
        } else {
            const GateKind kind = rotations[rng.integer(3)];
            const int q = static_cast<int>(rng.integer(static_cast<std::size_t>(num_qubits)));
            if (!c.gates.empty() && c.gates.back().kind == kind && c.gates.back().q0 == q &&
                c.gates.back().q1 < 0) {
                continue;
            }
            c.add_rotation(kind, q);
        }
    }
    return c;
}

inline std::vector<double> random_params(int count, vqsyn::Rng& rng) {
    std::vector<double> p(static_cast<std::size_t>(count));
    for (auto& v : p) {
        v = rng.uniform(0.0, 2.0 * vqsyn::kPi);
    }
    return p;
}

} // namespace oracles
