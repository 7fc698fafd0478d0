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
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "vqsyn/circuit.hpp"
#include "vqsyn/gates.hpp"

namespace vqsyn {

/// Dense state over 2^n amplitudes. Qubit 0 is the least-significant bit
/// of the basis index, everywhere in this library.
struct Statevector {
    int num_qubits = 0;
    std::vector<cplx> amps;

    Statevector() = default;

    static Statevector zero(int n) { return basis(n, 0); }

    static Statevector basis(int n, std::size_t index) {
        if (n < 0 || n > 30) {
            throw std::invalid_argument("Statevector: unsupported width");
        }
        Statevector s;
        s.num_qubits = n;
        s.amps.assign(std::size_t{1} << n, cplx(0, 0));
        s.amps.at(index) = cplx(1, 0);
        return s;
    }

    std::size_t dim() const { return amps.size(); }

    double norm() const {
        double n2 = 0.0;
        for (const auto& a : amps) {
            n2 += std::norm(a);
        }
        return std::sqrt(n2);
    }
};

namespace detail {

inline void apply_single(std::vector<cplx>& a, int q, const Mat2& m) {
    const std::size_t step = std::size_t{1} << q;
    const std::size_t dim = a.size();
    for (std::size_t base = 0; base < dim; base += 2 * step) {
        for (std::size_t i = base; i < base + step; ++i) {
            const cplx a0 = a[i];
            const cplx a1 = a[i + step];
            a[i] = m.m00 * a0 + m.m01 * a1;
            a[i + step] = m.m10 * a0 + m.m11 * a1;
        }
    }
}

inline void apply_cnot(std::vector<cplx>& a, int control, int target) {
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    const std::size_t dim = a.size();
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cbit) && !(i & tbit)) {
            std::swap(a[i], a[i | tbit]);
        }
    }
}

inline void apply_swap(std::vector<cplx>& a, int q0, int q1) {
    const std::size_t b0 = std::size_t{1} << q0;
    const std::size_t b1 = std::size_t{1} << q1;
    const std::size_t dim = a.size();
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & b0) && !(i & b1)) {
            std::swap(a[i], a[i ^ (b0 | b1)]);
        }
    }
}

} // namespace detail

/// Applies one gate in place.
inline void apply_gate(Statevector& state, const GateInstance& g, std::span<const double> params) {
    switch (g.kind) {
        case GateKind::CNOT:
            detail::apply_cnot(state.amps, g.q0, g.q1);
            break;
        case GateKind::SWAP:
            detail::apply_swap(state.amps, g.q0, g.q1);
            break;
        default: {
            const double theta =
                is_rotation(g.kind) ? params[static_cast<std::size_t>(g.param_index)] : 0.0;
            detail::apply_single(state.amps, g.q0, single_qubit_matrix(g.kind, theta));
        }
    }
}

/// Applies the whole circuit to `state` in place.
inline void apply_circuit(Statevector& state, const ParamCircuit& c, std::span<const double> params) {
    if (state.num_qubits != c.num_qubits) {
        throw std::invalid_argument("simulate: state width does not match circuit");
    }
    if (params.size() != static_cast<std::size_t>(c.num_params)) {
        throw std::invalid_argument("simulate: parameter count mismatch");
    }
    for (const auto& g : c.gates) {
        apply_gate(state, g, params);
    }
}

inline Statevector simulate(const ParamCircuit& c, std::span<const double> params,
                            const Statevector& initial) {
    Statevector s = initial;
    apply_circuit(s, c, params);
    return s;
}

inline Statevector simulate(const ParamCircuit& c, std::span<const double> params) {
    return simulate(c, params, Statevector::zero(c.num_qubits));
}

inline Statevector simulate(const BoundCircuit& bc, const Statevector& initial) {
    return simulate(bc.circuit, bc.params, initial);
}

/// <Z> on one qubit: sum of |amp|^2 signed by the qubit's bit value.
inline double expectation_pauli_z(const Statevector& state, int qubit) {
    if (qubit < 0 || qubit >= state.num_qubits) {
        throw std::out_of_range("expectation_pauli_z: qubit index out of range");
    }
    const std::size_t bit = std::size_t{1} << qubit;
    double e = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        const double p = std::norm(state.amps[i]);
        e += (i & bit) ? -p : p;
    }
    return e;
}

/// Relabels wires: the state carried by qubit q moves to perm[q].
inline Statevector permute_qubits(const Statevector& state, const std::vector<int>& perm) {
    if (perm.size() != static_cast<std::size_t>(state.num_qubits)) {
        throw std::invalid_argument("permute_qubits: permutation size mismatch");
    }
    Statevector out;
    out.num_qubits = state.num_qubits;
    out.amps.assign(state.dim(), cplx(0, 0));
    for (std::size_t i = 0; i < state.dim(); ++i) {
        std::size_t j = 0;
        for (int q = 0; q < state.num_qubits; ++q) {
            if (i & (std::size_t{1} << q)) {
                j |= std::size_t{1} << perm[static_cast<std::size_t>(q)];
            }
        }
        out.amps[j] = state.amps[i];
    }
    return out;
}

} // namespace vqsyn
