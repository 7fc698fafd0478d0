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

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "vqsyn/statevector.hpp"

namespace vqsyn {

/// Width guard for dense unitary extraction (2^12 squared already costs
/// ~256 MB of complex doubles).
inline constexpr int kMaxUnitaryQubits = 12;

/// Dense 2^n x 2^n matrix, row-major.
struct UnitaryMatrix {
    int num_qubits = 0;
    std::size_t dim = 0;
    std::vector<cplx> data;

    static UnitaryMatrix identity(int n) {
        UnitaryMatrix u;
        u.num_qubits = n;
        u.dim = std::size_t{1} << n;
        u.data.assign(u.dim * u.dim, cplx(0, 0));
        for (std::size_t i = 0; i < u.dim; ++i) {
            u.at(i, i) = cplx(1, 0);
        }
        return u;
    }

    cplx& at(std::size_t r, std::size_t c) { return data[r * dim + c]; }
    const cplx& at(std::size_t r, std::size_t c) const { return data[r * dim + c]; }
};

/// Column k is the circuit applied to basis state k.
inline UnitaryMatrix circuit_unitary(const ParamCircuit& c, std::span<const double> params) {
    if (c.num_qubits > kMaxUnitaryQubits) {
        throw std::invalid_argument("circuit_unitary: circuit too wide for dense extraction");
    }
    UnitaryMatrix u;
    u.num_qubits = c.num_qubits;
    u.dim = std::size_t{1} << c.num_qubits;
    u.data.assign(u.dim * u.dim, cplx(0, 0));
    for (std::size_t k = 0; k < u.dim; ++k) {
        const Statevector col = simulate(c, params, Statevector::basis(c.num_qubits, k));
        for (std::size_t r = 0; r < u.dim; ++r) {
            u.at(r, k) = col.amps[r];
        }
    }
    return u;
}

/// Max |a - b| over entries.
inline double max_entry_distance(const UnitaryMatrix& a, const UnitaryMatrix& b) {
    if (a.dim != b.dim) {
        throw std::invalid_argument("max_entry_distance: dimension mismatch");
    }
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        m = std::max(m, std::abs(a.data[i] - b.data[i]));
    }
    return m;
}

/// True iff the circuit at all-zero parameters equals exp(i*phi) * I
/// within 1e-9 max-entry deviation; phi is read off the first nonzero
/// diagonal entry.
inline bool is_identity_at_zero(const ParamCircuit& c) {
    const std::vector<double> zeros(static_cast<std::size_t>(c.num_params), 0.0);
    const UnitaryMatrix u = circuit_unitary(c, zeros);
    cplx phase(0, 0);
    for (std::size_t i = 0; i < u.dim; ++i) {
        const cplx d = u.at(i, i);
        if (std::abs(d) > 1e-12) {
            phase = d / std::abs(d);
            break;
        }
    }
    if (phase == cplx(0, 0)) {
        return false;
    }
    for (std::size_t r = 0; r < u.dim; ++r) {
        for (std::size_t col = 0; col < u.dim; ++col) {
            const cplx want = (r == col) ? phase : cplx(0, 0);
            if (std::abs(u.at(r, col) - want) > 1e-9) {
                return false;
            }
        }
    }
    return true;
}

} // namespace vqsyn
