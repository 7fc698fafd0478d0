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

#include <cctype>
#include <cstdio>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vqsyn/circuit.hpp"

namespace vqsyn {

struct QasmError : std::runtime_error {
    explicit QasmError(const std::string& what) : std::runtime_error(what) {}
};

/// OpenQASM 2.0 text for the circuit with all angles bound. Supported
/// gates: rx, ry, rz, cx, h, sx, swap; angles as decimal literals.
inline std::string export_qasm(const ParamCircuit& c, std::span<const double> params) {
    if (params.size() != static_cast<std::size_t>(c.num_params)) {
        throw std::invalid_argument("export_qasm: parameter count mismatch");
    }
    std::ostringstream os;
    os << "OPENQASM 2.0;\n";
    os << "include \"qelib1.inc\";\n";
    os << "qreg q[" << c.num_qubits << "];\n";
    char buf[64];
    for (const auto& g : c.gates) {
        if (is_rotation(g.kind)) {
            std::snprintf(buf, sizeof(buf), "%.17g", params[static_cast<std::size_t>(g.param_index)]);
            os << gate_name(g.kind) << '(' << buf << ") q[" << g.q0 << "];\n";
        } else if (gate_arity(g.kind) == 1) {
            os << gate_name(g.kind) << " q[" << g.q0 << "];\n";
        } else {
            os << gate_name(g.kind) << " q[" << g.q0 << "],q[" << g.q1 << "];\n";
        }
    }
    return os.str();
}

inline std::string export_qasm(const BoundCircuit& bc) {
    return export_qasm(bc.circuit, bc.params);
}

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline int parse_qubit_ref(const std::string& tok, int num_qubits, int line_no) {
    const std::string t = strip(tok);
    if (t.size() < 4 || t[0] != 'q' || t[1] != '[' || t.back() != ']') {
        throw QasmError("qasm line " + std::to_string(line_no) + ": bad qubit reference '" + t + "'");
    }
    int idx = 0;
    try {
        idx = std::stoi(t.substr(2, t.size() - 3));
    } catch (const std::exception&) {
        throw QasmError("qasm line " + std::to_string(line_no) + ": bad qubit index in '" + t + "'");
    }
    if (idx < 0 || idx >= num_qubits) {
        throw QasmError("qasm line " + std::to_string(line_no) + ": qubit index " +
                        std::to_string(idx) + " out of range");
    }
    return idx;
}

} // namespace detail

/// Parses the OpenQASM 2.0 subset produced by export_qasm. Each rotation
/// gets a fresh parameter slot; the bound angles are returned alongside.
inline BoundCircuit parse_qasm(const std::string& text) {
    BoundCircuit out;
    bool saw_header = false;
    bool saw_qreg = false;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find("//");
        if (comment != std::string::npos) {
            line = line.substr(0, comment);
        }
        std::string stmt = detail::strip(line);
        if (stmt.empty()) {
            continue;
        }
        if (stmt.back() != ';') {
            throw QasmError("qasm line " + std::to_string(line_no) + ": missing ';'");
        }
        stmt = detail::strip(stmt.substr(0, stmt.size() - 1));
        if (stmt.rfind("OPENQASM", 0) == 0) {
            if (detail::strip(stmt.substr(8)) != "2.0") {
                throw QasmError("qasm line " + std::to_string(line_no) + ": unsupported version");
            }
            saw_header = true;
            continue;
        }
        if (stmt.rfind("include", 0) == 0) {
            continue;
        }
        if (!saw_header) {
            throw QasmError("qasm line " + std::to_string(line_no) + ": missing OPENQASM 2.0 header");
        }
        if (stmt.rfind("qreg", 0) == 0) {
            if (saw_qreg) {
                throw QasmError("qasm line " + std::to_string(line_no) + ": multiple qreg declarations");
            }
            const auto lb = stmt.find('[');
            const auto rb = stmt.find(']');
            if (lb == std::string::npos || rb == std::string::npos || rb < lb) {
                throw QasmError("qasm line " + std::to_string(line_no) + ": malformed qreg");
            }
            int n = 0;
            try {
                n = std::stoi(stmt.substr(lb + 1, rb - lb - 1));
            } catch (const std::exception&) {
                throw QasmError("qasm line " + std::to_string(line_no) + ": malformed qreg size");
            }
            if (n <= 0) {
                throw QasmError("qasm line " + std::to_string(line_no) + ": qreg size must be positive");
            }
            out.circuit.num_qubits = n;
            saw_qreg = true;
            continue;
        }
        if (!saw_qreg) {
            throw QasmError("qasm line " + std::to_string(line_no) + ": gate before qreg declaration");
        }

        // gate statement: name[(angle)] operands
        std::size_t p = 0;
        while (p < stmt.size() && (std::isalnum(static_cast<unsigned char>(stmt[p])) || stmt[p] == '_')) {
            ++p;
        }
        const std::string name = stmt.substr(0, p);
        const auto kind = gate_from_name(name);
        if (!kind) {
            throw QasmError("qasm line " + std::to_string(line_no) + ": unsupported gate '" + name + "'");
        }
        double angle = 0.0;
        std::string rest = detail::strip(stmt.substr(p));
        if (is_rotation(*kind)) {
            if (rest.empty() || rest[0] != '(') {
                throw QasmError("qasm line " + std::to_string(line_no) + ": rotation gate needs an angle");
            }
            const auto close = rest.find(')');
            if (close == std::string::npos) {
                throw QasmError("qasm line " + std::to_string(line_no) + ": unterminated angle");
            }
            const std::string lit = detail::strip(rest.substr(1, close - 1));
            std::size_t used = 0;
            try {
                angle = std::stod(lit, &used);
            } catch (const std::exception&) {
                throw QasmError("qasm line " + std::to_string(line_no) + ": bad angle literal '" + lit + "'");
            }
            if (used != lit.size()) {
                throw QasmError("qasm line " + std::to_string(line_no) + ": bad angle literal '" + lit + "'");
            }
            rest = detail::strip(rest.substr(close + 1));
        } else if (!rest.empty() && rest[0] == '(') {
            throw QasmError("qasm line " + std::to_string(line_no) + ": gate '" + name + "' takes no angle");
        }

        std::vector<int> operands;
        std::size_t start = 0;
        while (start <= rest.size() && !rest.empty()) {
            const auto comma = rest.find(',', start);
            const std::string tok = rest.substr(start, comma == std::string::npos ? std::string::npos
                                                                                  : comma - start);
            operands.push_back(detail::parse_qubit_ref(tok, out.circuit.num_qubits, line_no));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        if (static_cast<int>(operands.size()) != gate_arity(*kind)) {
            throw QasmError("qasm line " + std::to_string(line_no) + ": gate '" + name + "' expects " +
                            std::to_string(gate_arity(*kind)) + " operand(s)");
        }

        if (is_rotation(*kind)) {
            out.circuit.add_rotation(*kind, operands[0]);
            out.params.push_back(angle);
        } else if (gate_arity(*kind) == 1) {
            out.circuit.add(*kind, operands[0]);
        } else {
            out.circuit.add(*kind, operands[0], operands[1]);
        }
    }
    if (!saw_header) {
        throw QasmError("qasm: missing OPENQASM 2.0 header");
    }
    if (!saw_qreg) {
        throw QasmError("qasm: missing qreg declaration");
    }
    out.circuit.check();
    return out;
}

} // namespace vqsyn
