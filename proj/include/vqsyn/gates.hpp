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
#include <optional>
#include <stdexcept>
#include <string>

namespace vqsyn {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Supported gate set. Rotations carry one angle each; the rotation
/// convention is RP(theta) = exp(-i * theta * P / 2) for P in {X, Y, Z},
/// so e.g. RZ(theta) = diag(e^{-i theta/2}, e^{+i theta/2}).
enum class GateKind { RX, RY, RZ, CNOT, H, SQRT_X, SWAP };

inline constexpr bool is_rotation(GateKind k) {
    return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ;
}

inline constexpr int gate_arity(GateKind k) {
    return (k == GateKind::CNOT || k == GateKind::SWAP) ? 2 : 1;
}

/// OpenQASM 2.0 mnemonic for the gate.
inline const char* gate_name(GateKind k) {
    switch (k) {
        case GateKind::RX: return "rx";
        case GateKind::RY: return "ry";
        case GateKind::RZ: return "rz";
        case GateKind::CNOT: return "cx";
        case GateKind::H: return "h";
        case GateKind::SQRT_X: return "sx";
        case GateKind::SWAP: return "swap";
    }
    return "?";
}

inline std::optional<GateKind> gate_from_name(const std::string& name) {
    if (name == "rx") return GateKind::RX;
    if (name == "ry") return GateKind::RY;
    if (name == "rz") return GateKind::RZ;
    if (name == "cx") return GateKind::CNOT;
    if (name == "h") return GateKind::H;
    if (name == "sx") return GateKind::SQRT_X;
    if (name == "swap") return GateKind::SWAP;
    return std::nullopt;
}

/// Dense 2x2 single-qubit matrix.
struct Mat2 {
    cplx m00, m01, m10, m11;
};

inline Mat2 single_qubit_matrix(GateKind k, double theta = 0.0) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    switch (k) {
        case GateKind::RX:
            return {cplx(c, 0), cplx(0, -s), cplx(0, -s), cplx(c, 0)};
        case GateKind::RY:
            return {cplx(c, 0), cplx(-s, 0), cplx(s, 0), cplx(c, 0)};
        case GateKind::RZ:
            return {std::exp(cplx(0, -theta / 2.0)), 0, 0, std::exp(cplx(0, theta / 2.0))};
        case GateKind::H: {
            const double r = 1.0 / std::sqrt(2.0);
            return {cplx(r, 0), cplx(r, 0), cplx(r, 0), cplx(-r, 0)};
        }
        case GateKind::SQRT_X:
            return {cplx(0.5, 0.5), cplx(0.5, -0.5), cplx(0.5, -0.5), cplx(0.5, 0.5)};
        default:
            throw std::invalid_argument("single_qubit_matrix: not a single-qubit gate");
    }
}

} // namespace vqsyn
