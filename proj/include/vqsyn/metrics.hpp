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
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "vqsyn/rng.hpp"
#include "vqsyn/statevector.hpp"

namespace vqsyn {

/// Sampling configuration for the two circuit quality scores.
struct MetricConfig {
    int fidelity_pairs = 5000;
    int bins = 75;
    int mw_samples = 300;
    std::uint64_t seed = 0;

    void check() const {
        if (fidelity_pairs <= 0 || bins <= 0 || mw_samples <= 0) {
            throw std::invalid_argument("MetricConfig: all counts must be positive");
        }
    }
};

/// F = |<a|b>|^2.
inline double fidelity(const Statevector& a, const Statevector& b) {
    if (a.num_qubits != b.num_qubits) {
        throw std::invalid_argument("fidelity: width mismatch");
    }
    cplx inner(0, 0);
    for (std::size_t i = 0; i < a.dim(); ++i) {
        inner += std::conj(a.amps[i]) * b.amps[i];
    }
    return std::norm(inner);
}

/// Haar fidelity density (N-1)(1-F)^{N-2} with N = 2^n.
inline double haar_fidelity_pdf(int num_qubits, double F) {
    const double N = static_cast<double>(std::size_t{1} << num_qubits);
    return (N - 1.0) * std::pow(1.0 - F, N - 2.0);
}

/// Haar fidelity CDF 1 - (1-F)^{N-1}.
inline double haar_fidelity_cdf(int num_qubits, double F) {
    const double N = static_cast<double>(std::size_t{1} << num_qubits);
    return 1.0 - std::pow(1.0 - F, N - 1.0);
}

/// Exact Haar mass of the bin [lo, hi], computed from the survival
/// function (1-F)^{N-1} so bins near F = 1 do not cancel against 1.0.
inline double haar_bin_mass(int num_qubits, double lo, double hi) {
    const double N = static_cast<double>(std::size_t{1} << num_qubits);
    const double mass = std::pow(1.0 - lo, N - 1.0) - std::pow(1.0 - hi, N - 1.0);
    return std::max(mass, 1e-300); // keep KL finite even if the tail underflows
}

/// Empirical distribution of pairwise state fidelities over [0, 1].
struct FidelityHistogram {
    int bin_count = 0;
    std::vector<double> probabilities;
    long sample_count = 0;
};

namespace detail {

constexpr std::uint64_t kExprStream = 0x45585052; // fidelity-pair draws
constexpr std::uint64_t kMwStream = 0x4d574d57;   // MW parameter draws

inline std::vector<double> draw_params(Rng& rng, int count) {
    std::vector<double> p(static_cast<std::size_t>(count));
    for (auto& v : p) {
        v = rng.uniform(0.0, 2.0 * kPi);
    }
    return p;
}

} // namespace detail

/// Histogram of fidelities between states prepared with independently
/// drawn uniform parameter vectors. Pair i draws from a stream derived
/// from (seed, i), so the result is independent of evaluation order.
inline FidelityHistogram fidelity_histogram(const ParamCircuit& c, const MetricConfig& cfg) {
    cfg.check();
    FidelityHistogram h;
    h.bin_count = cfg.bins;
    h.sample_count = cfg.fidelity_pairs;
    std::vector<long> counts(static_cast<std::size_t>(cfg.bins), 0);
    for (int i = 0; i < cfg.fidelity_pairs; ++i) {
        Rng rng(derive_seed(cfg.seed, detail::kExprStream, static_cast<std::uint64_t>(i)));
        const auto theta = detail::draw_params(rng, c.num_params);
        const auto phi = detail::draw_params(rng, c.num_params);
        const double F = fidelity(simulate(c, theta), simulate(c, phi));
        int bin = static_cast<int>(F * cfg.bins);
        bin = std::min(std::max(bin, 0), cfg.bins - 1);
        ++counts[static_cast<std::size_t>(bin)];
    }
    h.probabilities.resize(static_cast<std::size_t>(cfg.bins));
    for (int b = 0; b < cfg.bins; ++b) {
        h.probabilities[static_cast<std::size_t>(b)] =
            static_cast<double>(counts[static_cast<std::size_t>(b)]) / cfg.fidelity_pairs;
    }
    return h;
}

/// KL divergence of an empirical fidelity histogram against the Haar
/// reference, with exact per-bin Haar masses from the CDF. Empty bins
/// contribute zero. Lower is better.
inline double expressibility_kl(const FidelityHistogram& h, int num_qubits) {
    double kl = 0.0;
    for (int b = 0; b < h.bin_count; ++b) {
        const double p = h.probabilities[static_cast<std::size_t>(b)];
        if (p <= 0.0) {
            continue;
        }
        const double lo = static_cast<double>(b) / h.bin_count;
        const double hi = static_cast<double>(b + 1) / h.bin_count;
        kl += p * std::log(p / haar_bin_mass(num_qubits, lo, hi));
    }
    return kl;
}

/// Expressibility score of a circuit (KL vs. Haar; lower = more expressive).
inline double expressibility(const ParamCircuit& c, const MetricConfig& cfg) {
    return expressibility_kl(fidelity_histogram(c, cfg), c.num_qubits);
}

/// Meyer-Wallach measure Q = 2 (1 - mean_k Tr[rho_k^2]) over the n
/// single-qubit reduced density matrices. 0 for product states, 1 for
/// e.g. Bell and GHZ states.
inline double mw_entanglement(const Statevector& state) {
    const int n = state.num_qubits;
    if (n < 2) {
        throw std::invalid_argument("mw_entanglement: needs at least 2 qubits");
    }
    double purity_sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const std::size_t bit = std::size_t{1} << k;
        double r00 = 0.0;
        double r11 = 0.0;
        cplx r01(0, 0);
        for (std::size_t i = 0; i < state.dim(); ++i) {
            if (i & bit) {
                r11 += std::norm(state.amps[i]);
            } else {
                r00 += std::norm(state.amps[i]);
                r01 += state.amps[i] * std::conj(state.amps[i | bit]);
            }
        }
        purity_sum += r00 * r00 + r11 * r11 + 2.0 * std::norm(r01);
    }
    return 2.0 * (1.0 - purity_sum / n);
}

/// Mean Meyer-Wallach measure over uniformly drawn parameter vectors,
/// from |0...0>. Exactly 0 when the circuit has no two-qubit gates.
inline double entangling_capability(const ParamCircuit& c, const MetricConfig& cfg) {
    cfg.check();
    if (c.num_qubits < 2) {
        throw std::invalid_argument("entangling_capability: needs at least 2 qubits");
    }
    double total = 0.0;
    for (int i = 0; i < cfg.mw_samples; ++i) {
        Rng rng(derive_seed(cfg.seed, detail::kMwStream, static_cast<std::uint64_t>(i)));
        const auto theta = detail::draw_params(rng, c.num_params);
        total += mw_entanglement(simulate(c, theta));
    }
    return total / cfg.mw_samples;
}

} // namespace vqsyn
