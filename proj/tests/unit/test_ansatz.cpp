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

#include <catch2/catch_amalgamated.hpp>
#include <filesystem>

#include "oracles.hpp"
#include "vqsyn/ansatz.hpp"
#include "vqsyn/metrics.hpp"

using namespace vqsyn;

namespace {

Library test_library(std::uint64_t seed = 5, int count = 40) {
    LibraryConfig cfg;
    cfg.count_per_template = count;
    cfg.depth_limit = 4;
    cfg.metrics.fidelity_pairs = 200;
    cfg.metrics.mw_samples = 40;
    cfg.metrics.seed = seed;
    cfg.seed = seed;
    return build_library(default_templates(), cfg);
}

const Library& shared_library() {
    static const Library lib = test_library();
    return lib;
}

bool routes_clean(const Ansatz& a, const CouplingGraph& device) {
    return route(a.circuit, a.mapping, device).swap_count == 0 &&
           is_compatible(a.circuit, a.mapping, device);
}

} // namespace

TEST_CASE("combine: depth threshold zero gives an empty ansatz") {
    CombineOptions opts;
    opts.depth_threshold = 0;
    const auto a = combine(shared_library(), line_topology(4), {0, 1, 2, 3}, opts);
    REQUIRE(a.circuit.gates.empty());
    REQUIRE(a.circuit.num_params == 0);
    REQUIRE(a.blocks.size() == 2);
}

TEST_CASE("combine: blocks stay disjoint before stitching (two pairs on line(4))") {
    CombineOptions opts;
    opts.depth_threshold = 6;
    const auto device = line_topology(4);
    const auto a = combine(shared_library(), device, {0, 1, 2, 3}, opts);
    REQUIRE(a.blocks.size() == 2);
    REQUIRE(!a.circuit.gates.empty());
    REQUIRE(depth(a.circuit) <= 6);
    // no gate crosses the block boundary yet
    for (const auto& g : a.circuit.gates) {
        if (g.q1 < 0) {
            continue;
        }
        const bool first_block = g.q0 <= 1;
        REQUIRE((g.q1 <= 1) == first_block);
    }
    REQUIRE(routes_clean(a, device));
}

TEST_CASE("combine: deterministic under (library, policy, placement, seed)") {
    for (const auto policy : {SelectionPolicy::EXP, SelectionPolicy::ENT, SelectionPolicy::MIXED,
                              SelectionPolicy::RANDOM}) {
        CombineOptions opts;
        opts.policy = policy;
        opts.seed = 77;
        const auto a = combine(shared_library(), tshape5_topology(), {0, 1, 2, 3}, opts);
        const auto b = combine(shared_library(), tshape5_topology(), {0, 1, 2, 3}, opts);
        REQUIRE(circuit_key(a.circuit) == circuit_key(b.circuit));
    }
}

TEST_CASE("combine: every policy and placement routes with zero SWAPs") {
    const auto devices = {line_topology(4), tshape5_topology(), grid_topology(2, 3)};
    for (const auto& device : devices) {
        std::vector<int> all(static_cast<std::size_t>(device.num_qubits));
        std::iota(all.begin(), all.end(), 0);
        for (const auto policy : {SelectionPolicy::EXP, SelectionPolicy::ENT,
                                  SelectionPolicy::MIXED, SelectionPolicy::RANDOM}) {
            for (const auto placement : {Placement::Balanced, Placement::DecreasingSize}) {
                CombineOptions opts;
                opts.policy = policy;
                opts.placement = placement;
                opts.seed = 13;
                const auto a = combine(shared_library(), device, all, opts);
                REQUIRE(routes_clean(a, device));
                REQUIRE(depth(a.circuit) <= opts.depth_threshold);
            }
        }
    }
}

TEST_CASE("combine: provenance reconstructs the circuit exactly") {
    CombineOptions opts;
    opts.seed = 3;
    const auto a = combine(shared_library(), tshape5_topology(), {0, 1, 2, 3, 4}, opts);
    const auto rebuilt = reconstruct_from_provenance(a, shared_library());
    REQUIRE(circuit_key(rebuilt) == circuit_key(a.circuit));
}

TEST_CASE("combine: mixed policy validates its ratio, empty library errors") {
    CombineOptions opts;
    opts.policy = SelectionPolicy::MIXED;
    opts.mixed_ratio = 1.5;
    REQUIRE_THROWS_AS(combine(shared_library(), line_topology(4), {0, 1, 2, 3}, opts),
                      std::invalid_argument);

    // a star3-only library cannot serve the path-shaped block on line(4)
    LibraryConfig cfg;
    cfg.count_per_template = 5;
    cfg.metrics.fidelity_pairs = 100;
    cfg.metrics.mw_samples = 20;
    const auto star_only = build_library({template_by_id(default_templates(), "star3")}, cfg);
    CombineOptions plain;
    REQUIRE_THROWS_AS(combine(star_only, line_topology(4), {0, 1, 2, 3}, plain),
                      std::invalid_argument);
}

TEST_CASE("stitch: single-block ansatz returns unchanged with a warning") {
    CombineOptions opts;
    const auto device = tshape5_topology();
    const auto a = combine(shared_library(), device, {0, 1, 2, 3}, opts); // one star block
    REQUIRE(a.blocks.size() == 1);
    const auto stitched = stitch(a, device, StitchKind::CNOT, StitchPlacement::BlockEnd);
    REQUIRE(stitched.stitch_warning);
    REQUIRE(stitched.circuit.gates.size() == a.circuit.gates.size());
}

TEST_CASE("stitch: CNOT adds one gate per adjacent block pair and keeps compatibility") {
    CombineOptions opts;
    const auto device = line_topology(4);
    const auto a = combine(shared_library(), device, {0, 1, 2, 3}, opts);
    REQUIRE(a.blocks.size() == 2);

    const auto stitched = stitch(a, device, StitchKind::CNOT, StitchPlacement::BlockEnd);
    REQUIRE_FALSE(stitched.stitch_warning);
    REQUIRE(stitched.circuit.gates.size() == a.circuit.gates.size() + 1);
    REQUIRE(stitched.circuit.num_params == a.circuit.num_params);
    REQUIRE(routes_clean(stitched, device));

    // entangling capability does not decrease when blocks get connected
    MetricConfig mc;
    mc.mw_samples = 150;
    mc.seed = 7;
    const double before = entangling_capability(a.circuit, mc);
    const double after = entangling_capability(stitched.circuit, mc);
    REQUIRE(after >= before - 0.02);

    // provenance still reconstructs exactly
    const auto rebuilt = reconstruct_from_provenance(stitched, shared_library());
    REQUIRE(circuit_key(rebuilt) == circuit_key(stitched.circuit));
}

TEST_CASE("stitch: idle placement picks the least-loaded crossing edge") {
    // pairs-only library on line(5): {0,1} {2,3} + flagged leftover qubit 4
    LibraryConfig cfg;
    cfg.count_per_template = 30;
    cfg.metrics.fidelity_pairs = 150;
    cfg.metrics.mw_samples = 30;
    cfg.seed = 8;
    cfg.metrics.seed = 8;
    const auto pairs_only = build_library({template_by_id(default_templates(), "path2")}, cfg);

    CombineOptions opts;
    const auto device = line_topology(5);
    const auto a = combine(pairs_only, device, {0, 1, 2, 3, 4}, opts);
    REQUIRE(a.blocks.size() == 3); // two pairs + flagged singleton block
    const auto stitched = stitch(a, device, StitchKind::CNOT, StitchPlacement::Idle);
    REQUIRE_FALSE(stitched.stitch_warning);
    REQUIRE(stitched.circuit.gates.size() == a.circuit.gates.size() + 1);
    // the idle stitch must touch the gateless leftover qubit 4
    const auto& g = stitched.circuit.gates.back();
    REQUIRE((g.q0 == 4 || g.q1 == 4));
    REQUIRE(routes_clean(stitched, device));
}

TEST_CASE("stitch: SWAP kind decomposes into three CNOTs") {
    CombineOptions opts;
    const auto device = line_topology(4);
    const auto a = combine(shared_library(), device, {0, 1, 2, 3}, opts);
    const auto stitched = stitch(a, device, StitchKind::SWAP, StitchPlacement::BlockEnd);
    REQUIRE(stitched.circuit.gates.size() == a.circuit.gates.size() + 3);
    REQUIRE(stitched.circuit.gate_count(GateKind::SWAP) == 0);
    REQUIRE(routes_clean(stitched, device));
}

TEST_CASE("stitch: CRX decomposition reproduces controlled-RX exactly") {
    for (double theta : {0.0, 0.7, -1.9, kPi / 3}) {
        ParamCircuit c(2);
        detail::append_stitch_gates(c, StitchKind::CRX, 0, 1);
        REQUIRE(c.num_params == 4);
        const std::vector<double> params{kPi / 2, -theta / 2, theta / 2, -kPi / 2};
        const auto u = oracles::to_eigen(circuit_unitary(c, params));

        // reference: |0><0| (x) I + |1><1| (x) RX(theta), control = qubit 0
        oracles::Mat p0(2, 2), p1(2, 2);
        p0 << 1, 0, 0, 0;
        p1 << 0, 0, 0, 1;
        const auto rx = oracles::gate_matrix_2x2(GateKind::RX, theta);
        const oracles::Mat reference = oracles::expand_single(p0, 0, 2) +
                                       oracles::expand_single(p1, 0, 2) *
                                           oracles::expand_single(rx, 1, 2);
        REQUIRE((u - reference).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("stitch: CRX at zero angles is the identity (safe trainable stitch)") {
    ParamCircuit c(2);
    detail::append_stitch_gates(c, StitchKind::CRX, 0, 1);
    REQUIRE(is_identity_at_zero(c));
}

TEST_CASE("grow: appends an identity block and preserves the state exactly") {
    CombineOptions opts;
    const auto device = tshape5_topology();
    const auto a = combine(shared_library(), device, {0, 1, 2, 3}, opts);
    auto params = oracles::random_params(a.circuit.num_params, *[] {
        static Rng rng(101);
        return &rng;
    }());

    Rng grow_rng(55);
    const auto grown = grow(a, shared_library(), grow_rng);
    REQUIRE(grown.params_added == grown.ansatz.circuit.num_params - a.circuit.num_params);
    REQUIRE(shared_library().entries[static_cast<std::size_t>(grown.library_id)].appendable);

    std::vector<double> grown_params = params;
    grown_params.resize(static_cast<std::size_t>(grown.ansatz.circuit.num_params), 0.0);
    const auto before = simulate(a.circuit, params);
    const auto after = simulate(grown.ansatz.circuit, grown_params);
    double delta = 0.0;
    for (std::size_t i = 0; i < before.dim(); ++i) {
        delta = std::max(delta, std::abs(before.amps[i] - after.amps[i]));
    }
    REQUIRE(delta < 1e-9);
}

TEST_CASE("grow: three times in a row stays compatible, provenance intact") {
    CombineOptions opts;
    const auto device = grid_topology(2, 3);
    std::vector<int> all{0, 1, 2, 3, 4, 5};
    Ansatz a = combine(shared_library(), device, all, opts);
    Rng rng(77);
    for (int i = 0; i < 3; ++i) {
        a = grow(a, shared_library(), rng).ansatz;
        REQUIRE(routes_clean(a, device));
    }
    const auto rebuilt = reconstruct_from_provenance(a, shared_library());
    REQUIRE(circuit_key(rebuilt) == circuit_key(a.circuit));
}

TEST_CASE("grow: errors when the library has no appendable fit") {
    Library lib = shared_library();
    for (auto& e : lib.entries) {
        e.appendable = false;
    }
    CombineOptions opts;
    const auto a = combine(shared_library(), line_topology(4), {0, 1, 2, 3}, opts);
    Rng rng(1);
    REQUIRE_THROWS_AS(grow(a, lib, rng), std::runtime_error);
}

TEST_CASE("prune: thresholds and exact removal") {
    CombineOptions opts;
    const auto device = line_topology(4);
    const auto a = combine(shared_library(), device, {0, 1, 2, 3}, opts);
    REQUIRE(a.circuit.num_params >= 2);

    SECTION("nothing below epsilon leaves the ansatz unchanged") {
        std::vector<double> params(static_cast<std::size_t>(a.circuit.num_params), 1.0);
        const auto [pruned, new_params] = prune(a, params, 0.1);
        REQUIRE(pruned.circuit.gates.size() == a.circuit.gates.size());
        REQUIRE(new_params == params);
    }

    SECTION("a zero-angle rotation is removed and the unitary is unchanged") {
        std::vector<double> params(static_cast<std::size_t>(a.circuit.num_params), 1.0);
        params[0] = 0.0;
        PruneReport report;
        const auto [pruned, new_params] = prune(a, params, 0.05, &report);
        REQUIRE(report.removed.size() == 1);
        REQUIRE(pruned.circuit.num_params == a.circuit.num_params - 1);
        REQUIRE(pruned.circuit.gate_count(GateKind::CNOT) == a.circuit.gate_count(GateKind::CNOT));

        const auto before = oracles::to_eigen(circuit_unitary(a.circuit, params));
        const auto after = oracles::to_eigen(circuit_unitary(pruned.circuit, new_params));
        REQUIRE((before - after).cwiseAbs().maxCoeff() < 1e-9);
        REQUIRE(routes_clean(pruned, device));
    }

    SECTION("epsilon -> 0 is the identity transformation") {
        Rng rng(9);
        const auto params = oracles::random_params(a.circuit.num_params, rng);
        const auto [pruned, new_params] = prune(a, params, 1e-15);
        REQUIRE(circuit_key(pruned.circuit) == circuit_key(a.circuit));
        REQUIRE(new_params == params);
    }

    SECTION("epsilon must be positive") {
        std::vector<double> params(static_cast<std::size_t>(a.circuit.num_params), 1.0);
        REQUIRE_THROWS_AS(prune(a, params, 0.0), std::invalid_argument);
    }
}

TEST_CASE("prune: unitary perturbation is bounded by k * epsilon") {
    Rng rng(121);
    const double epsilon = 0.08;
    for (int trial = 0; trial < 6; ++trial) {
        CombineOptions opts;
        opts.seed = static_cast<std::uint64_t>(trial);
        const auto a = combine(shared_library(), line_topology(4), {0, 1, 2, 3}, opts);
        std::vector<double> params = oracles::random_params(a.circuit.num_params, rng);
        // push a few params under the threshold
        for (std::size_t i = 0; i < params.size(); i += 3) {
            params[i] = rng.uniform(-epsilon, epsilon);
        }
        PruneReport report;
        const auto [pruned, new_params] = prune(a, params, epsilon, &report);
        const std::size_t k = report.removed.size();
        if (k == 0) {
            continue;
        }
        const auto before = oracles::to_eigen(circuit_unitary(a.circuit, params));
        const auto after = oracles::to_eigen(circuit_unitary(pruned.circuit, new_params));
        // spectral norm of the difference
        const Eigen::JacobiSVD<oracles::Mat> svd(before - after);
        REQUIRE(svd.singularValues()(0) <= static_cast<double>(k) * epsilon + 1e-9);
    }
}

TEST_CASE("ansatz JSON round-trip") {
    CombineOptions opts;
    opts.seed = 19;
    const auto device = tshape5_topology();
    auto a = combine(shared_library(), device, {0, 1, 2, 3, 4}, opts);
    a = stitch(a, device, StitchKind::CRX, StitchPlacement::BlockEnd);
    std::vector<double> params(static_cast<std::size_t>(a.circuit.num_params), 0.25);

    const auto path = (std::filesystem::temp_directory_path() / "vqsyn_ansatz_rt.json").string();
    save_ansatz(a, path, &params);
    const auto loaded = load_ansatz(path);
    REQUIRE(circuit_key(loaded.ansatz.circuit) == circuit_key(a.circuit));
    REQUIRE(loaded.ansatz.mapping.to_physical == a.mapping.to_physical);
    REQUIRE(loaded.ansatz.blocks.size() == a.blocks.size());
    REQUIRE(loaded.ansatz.provenance.size() == a.provenance.size());
    REQUIRE(loaded.params.has_value());
    REQUIRE(*loaded.params == params);
    std::filesystem::remove(path);
}
