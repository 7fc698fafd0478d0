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
#include <fstream>

#include "oracles.hpp"
#include "vqsyn/train.hpp"

using namespace vqsyn;

namespace {

Library small_library() {
    LibraryConfig cfg;
    cfg.count_per_template = 40;
    cfg.depth_limit = 4;
    cfg.metrics.fidelity_pairs = 200;
    cfg.metrics.mw_samples = 40;
    cfg.metrics.seed = 5;
    cfg.seed = 5;
    return build_library(default_templates(), cfg);
}

const Library& lib() {
    static const Library l = small_library();
    return l;
}

Ansatz star_ansatz(std::uint64_t seed = 0) {
    CombineOptions opts;
    opts.seed = seed;
    return combine(lib(), tshape5_topology(), {0, 1, 2, 3}, opts);
}

} // namespace

TEST_CASE("angle_encode layouts") {
    SECTION("all-zero features act as the identity") {
        const auto spec = make_round_robin_encoder(4, 4);
        const std::vector<double> zeros(4, 0.0);
        const auto s = simulate(angle_encode(zeros, spec), Statevector::zero(4));
        REQUIRE(std::abs(s.amps[0] - cplx(1, 0)) < 1e-12);
    }
    SECTION("4 features on 4 qubits: one RY layer") {
        const auto spec = make_round_robin_encoder(4, 4);
        const std::vector<double> f{0.1, 0.2, 0.3, 0.4};
        const auto bc = angle_encode(f, spec);
        REQUIRE(bc.circuit.gates.size() == 4);
        for (const auto& g : bc.circuit.gates) {
            REQUIRE(g.kind == GateKind::RY);
        }
        REQUIRE(depth(bc.circuit) == 1);
    }
    SECTION("16 features on 4 qubits: four layers, axes cycling") {
        const auto spec = make_round_robin_encoder(16, 4);
        const std::vector<double> f(16, 0.5);
        const auto bc = angle_encode(f, spec);
        REQUIRE(bc.circuit.gates.size() == 16);
        REQUIRE(depth(bc.circuit) == 4);
        REQUIRE(bc.circuit.gates[0].kind == GateKind::RY);
        REQUIRE(bc.circuit.gates[4].kind == GateKind::RZ);
        REQUIRE(bc.circuit.gates[8].kind == GateKind::RX);
        REQUIRE(bc.circuit.gates[12].kind == GateKind::RY);
        // feature f lands on qubit f % 4
        for (int f_idx = 0; f_idx < 16; ++f_idx) {
            REQUIRE(bc.circuit.gates[static_cast<std::size_t>(f_idx)].q0 == f_idx % 4);
        }
    }
    SECTION("feature count mismatch throws") {
        const auto spec = make_round_robin_encoder(4, 4);
        const std::vector<double> f(3, 0.0);
        REQUIRE_THROWS_AS(angle_encode(f, spec), std::invalid_argument);
    }
}

TEST_CASE("readout grouping is a round-robin partition") {
    const auto r = make_round_robin_readout(4, 2);
    REQUIRE(r.groups[0] == std::vector<int>{0, 2});
    REQUIRE(r.groups[1] == std::vector<int>{1, 3});
    const auto r4 = make_round_robin_readout(4, 4);
    for (int c = 0; c < 4; ++c) {
        REQUIRE(r4.groups[static_cast<std::size_t>(c)] == std::vector<int>{c});
    }
    REQUIRE_THROWS_AS(make_round_robin_readout(2, 3), std::invalid_argument);
}

TEST_CASE("forward: probabilities are a distribution") {
    Model m = make_model(star_ansatz(), 2, 2);
    Rng rng(3);
    init_params(m, rng);
    const std::vector<double> x{0.7, 2.1};
    const auto p = forward(m, x);
    REQUIRE(p.size() == 2);
    double total = 0.0;
    for (double v : p) {
        REQUIRE(v >= 0.0);
        total += v;
    }
    REQUIRE(total == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("forward: symmetric model with zero params splits 50/50") {
    Model m = make_model(star_ansatz(), 4, 2);
    std::fill(m.params.begin(), m.params.end(), 0.0);
    const std::vector<double> x(4, 0.8); // identical feature on every qubit, one RY layer
    const auto p = forward(m, x);
    REQUIRE(p[0] == Catch::Approx(0.5).margin(1e-9));
    REQUIRE(p[1] == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("forward matches a dense-matrix pipeline oracle") {
    Model m = make_model(star_ansatz(7), 4, 2);
    Rng rng(17);
    init_params(m, rng);
    const std::vector<double> x{0.3, 1.3, 2.2, 0.9};

    // independent route: full unitary product, explicit probability sums
    const auto enc = angle_encode(x, m.encoder);
    const auto u_enc = oracles::circuit_matrix(enc.circuit, enc.params);
    const auto u_ans = oracles::circuit_matrix(m.ansatz.circuit, m.params);
    oracles::Vec state = oracles::Vec::Zero(16);
    state(0) = 1.0;
    state = u_ans * (u_enc * state);
    std::vector<double> z(4, 0.0);
    for (int q = 0; q < 4; ++q) {
        for (int idx = 0; idx < 16; ++idx) {
            const double prob = std::norm(state(idx));
            z[static_cast<std::size_t>(q)] += (idx & (1 << q)) ? -prob : prob;
        }
    }
    std::vector<double> scores(2);
    scores[0] = (z[0] + z[2]) / 2.0;
    scores[1] = (z[1] + z[3]) / 2.0;
    const double e0 = std::exp(scores[0]);
    const double e1 = std::exp(scores[1]);

    const auto p = forward(m, x);
    REQUIRE(p[0] == Catch::Approx(e0 / (e0 + e1)).margin(1e-10));
    REQUIRE(p[1] == Catch::Approx(e1 / (e0 + e1)).margin(1e-10));
}

TEST_CASE("cross_entropy basics") {
    const std::vector<double> onehot{1.0, 0.0};
    REQUIRE(cross_entropy(onehot, 0) == Catch::Approx(0.0).margin(1e-12));
    const std::vector<double> uniform{0.5, 0.5};
    REQUIRE(cross_entropy(uniform, 1) == Catch::Approx(std::log(2.0)));
    REQUIRE(cross_entropy(onehot, 1) <= -std::log(1e-12) + 1e-9); // clamped, finite
    REQUIRE_THROWS_AS(cross_entropy(uniform, 2), std::out_of_range);
}

TEST_CASE("batch loss equals the mean of single losses") {
    Model m = make_model(star_ansatz(), 2, 2);
    Rng rng(23);
    init_params(m, rng);
    const auto data = make_blobs(1, 42, 60);
    const std::vector<int> batch{0, 1, 2, 3, 4, 5, 6, 7};
    double mean = 0.0;
    for (int idx : batch) {
        const std::vector<int> single{idx};
        mean += batch_loss(m, data, single);
    }
    mean /= static_cast<double>(batch.size());
    REQUIRE(batch_loss(m, data, batch) == Catch::Approx(mean).margin(1e-12));
}

TEST_CASE("gradient: parameterless model yields an empty gradient") {
    Library parameterless = lib();
    Ansatz a = star_ansatz();
    // strip to an unparameterized circuit
    a.circuit = ParamCircuit(4);
    a.circuit.add(GateKind::H, 0);
    a.circuit.add(GateKind::CNOT, 0, 1);
    a.provenance.clear();
    Model m = make_model(a, 2, 2);
    const auto data = make_blobs(1, 42, 60);
    const std::vector<int> batch{0, 1, 2};
    REQUIRE(gradient(m, data, batch).empty());
    (void)parameterless;
}

TEST_CASE("gradient matches central finite differences") {
    const auto data = make_blobs(2, 7, 80);
    Rng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        Model m = make_model(star_ansatz(static_cast<std::uint64_t>(trial)), 2, 2);
        init_params(m, rng);
        const std::vector<int> batch{0, 1, 2, 3};

        const auto grad = gradient(m, data, batch);
        const double h = 1e-4;
        for (int j = 0; j < m.ansatz.circuit.num_params; ++j) {
            Model shifted = m;
            shifted.params[static_cast<std::size_t>(j)] += h;
            const double up = batch_loss(shifted, data, batch);
            shifted.params[static_cast<std::size_t>(j)] -= 2 * h;
            const double down = batch_loss(shifted, data, batch);
            const double fd = (up - down) / (2 * h);
            REQUIRE(grad[static_cast<std::size_t>(j)] == Catch::Approx(fd).margin(1e-4));
        }
    }
}

TEST_CASE("gradient is finite on a freshly grown zero-init block") {
    Model m = make_model(star_ansatz(), 2, 2);
    Rng rng(37);
    init_params(m, rng);
    Rng grow_rng(5);
    const auto grown = grow(m.ansatz, lib(), grow_rng);
    m.ansatz = grown.ansatz;
    m.params.resize(m.params.size() + grown.params_added, 0.0);

    const auto data = make_blobs(1, 42, 60);
    const std::vector<int> batch{0, 1, 2, 3};
    const auto grad = gradient(m, data, batch);
    for (double g : grad) {
        REQUIRE(std::isfinite(g));
    }
}

TEST_CASE("gradient rejects shared parameter slots") {
    Ansatz a = star_ansatz();
    a.circuit = ParamCircuit(4);
    const int slot = a.circuit.add_rotation(GateKind::RY, 0);
    a.circuit.add_rotation(GateKind::RY, 1, slot); // shared slot
    Model m = make_model(a, 2, 2);
    m.params = {0.3};
    const auto data = make_blobs(1, 42, 60);
    const std::vector<int> batch{0};
    REQUIRE_THROWS_AS(gradient(m, data, batch), std::invalid_argument);
}

TEST_CASE("evaluate: perfect and coin-flip predictors") {
    // hand-built separable fixture: label 0 -> (0, pi), label 1 -> (pi, 0)
    Dataset d;
    d.num_features = 2;
    d.num_classes = 2;
    for (int i = 0; i < 40; ++i) {
        const int label = i % 2;
        d.features.push_back(label == 0 ? std::vector<double>{0.0, kPi}
                                        : std::vector<double>{kPi, 0.0});
        d.labels.push_back(label);
        d.test_idx.push_back(i);
    }
    Ansatz a;
    a.circuit = ParamCircuit(2);
    a.mapping.to_physical = {0, 1};
    Model m = make_model(a, 2, 2);
    REQUIRE(evaluate(m, d, d.test_idx) == Catch::Approx(1.0));

    // constant predictor vs balanced random labels: close to a coin flip
    Dataset r;
    r.num_features = 2;
    r.num_classes = 2;
    Rng rng(91);
    for (int i = 0; i < 1000; ++i) {
        r.features.push_back({0.0, 0.0});
        r.labels.push_back(static_cast<int>(rng.integer(2)));
        r.test_idx.push_back(i);
    }
    const double acc = evaluate(m, r, r.test_idx);
    REQUIRE(acc > 0.45);
    REQUIRE(acc < 0.55);

    REQUIRE_THROWS_AS(evaluate(m, d, std::vector<int>{}), std::invalid_argument);
}

TEST_CASE("datasets: generator contract") {
    const auto d = make_blobs(1, 9);
    REQUIRE(d.size() == 1500);
    REQUIRE(d.train_idx.size() == 1000);
    REQUIRE(d.val_idx.size() == 250);
    REQUIRE(d.test_idx.size() == 250);
    REQUIRE(d.num_classes == 2);
    // features rescaled into [0, pi]
    for (const auto& row : d.features) {
        for (double v : row) {
            REQUIRE(v >= 0.0);
            REQUIRE(v <= kPi);
        }
    }
    // splits are disjoint and cover everything
    std::vector<int> all;
    all.insert(all.end(), d.train_idx.begin(), d.train_idx.end());
    all.insert(all.end(), d.val_idx.begin(), d.val_idx.end());
    all.insert(all.end(), d.test_idx.begin(), d.test_idx.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) {
        REQUIRE(all[i] == static_cast<int>(i));
    }

    // determinism + distinctness across generators and levels
    REQUIRE(make_moons(2, 9).features == make_moons(2, 9).features);
    REQUIRE(make_circles(1, 9).features != make_circles(2, 9).features);
}

TEST_CASE("datasets: CSV loading") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto path = (dir / "vqsyn_test.csv").string();
    {
        std::ofstream out(path);
        out << "f0,f1,f2,f3,f4,f5,f6,f7,f8,f9,label\n";
        for (int i = 0; i < 30; ++i) {
            for (int f = 0; f < 10; ++f) {
                out << (0.1 * f + i) << ',';
            }
            out << (i % 4) << "\n";
        }
    }
    const auto d = load_csv_dataset(path, 1);
    REQUIRE(d.num_features == 10); // VOWEL-style shape
    REQUIRE(d.num_classes == 4);
    REQUIRE(d.size() == 30);
    std::filesystem::remove(path);

    REQUIRE_THROWS_AS(load_csv_dataset("/nonexistent/file.csv", 1), DataError);

    const auto bad = (dir / "vqsyn_bad.csv").string();
    std::ofstream(bad) << "f0,label\n1.0,-3\n";
    REQUIRE_THROWS_AS(load_csv_dataset(bad, 1), DataError);
    std::filesystem::remove(bad);
}

TEST_CASE("datasets: image pipeline crop + pool trace") {
    // 28x28 synthetic image whose 24x24 center crop splits into 6x6 blocks
    // with known means: block (r, c) filled with value 10*(4r + c).
    const auto dir = std::filesystem::temp_directory_path() / "vqsyn_img_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "img0.pgm");
        out << "P2\n28 28\n255\n";
        for (int r = 0; r < 28; ++r) {
            for (int c = 0; c < 28; ++c) {
                int v = 0;
                if (r >= 2 && r < 26 && c >= 2 && c < 26) {
                    v = 10 * (4 * ((r - 2) / 6) + ((c - 2) / 6));
                }
                out << v << ' ';
            }
            out << '\n';
        }
        std::ofstream labels(dir / "labels.csv");
        labels << "filename,label\nimg0.pgm,1\n";
    }
    const auto img = load_pgm((dir / "img0.pgm").string());
    const auto feats = image_features(img);
    REQUIRE(feats.size() == 16);
    for (int i = 0; i < 16; ++i) {
        REQUIRE(feats[static_cast<std::size_t>(i)] == Catch::Approx(10.0 * i).margin(1e-9));
    }

    const auto d = load_image_dataset(dir.string(), 1);
    REQUIRE(d.num_features == 16);
    REQUIRE(d.size() == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("datasets: spec strings and class filtering") {
    REQUIRE(load_dataset("blobs:1", 3).size() == 1500);
    REQUIRE_THROWS_AS(load_dataset("blobs:9", 3), std::invalid_argument);
    REQUIRE_THROWS_AS(load_dataset("nope:1", 3), DataError);
    REQUIRE_THROWS_AS(load_dataset("csv:/missing.csv", 3), DataError);

    // class filter remaps labels to 0..C-1
    const auto dir = std::filesystem::temp_directory_path() / "vqsyn_img_filter";
    std::filesystem::create_directories(dir);
    {
        std::ofstream labels(dir / "labels.csv");
        labels << "filename,label\n";
        for (int i = 0; i < 6; ++i) {
            const std::string name = "img" + std::to_string(i) + ".pgm";
            std::ofstream img(dir / name);
            img << "P2\n28 28\n255\n";
            for (int p = 0; p < 28 * 28; ++p) {
                img << (i * 7) % 200 << ' ';
            }
            labels << name << ',' << (i % 3 + 3) << "\n"; // labels 3, 4, 5
        }
    }
    const auto filtered = load_image_dataset(dir.string(), 1, std::vector<int>{3, 6, 5});
    REQUIRE(filtered.num_classes == 3); // classes {3,5,6} requested, 6 absent but mapped
    for (int label : filtered.labels) {
        REQUIRE((label == 0 || label == 1)); // 3 -> 0, 5 -> 1, 6 -> 2 (absent)
    }
    REQUIRE(filtered.size() == 4); // labels 3 and 5 occur twice each
    std::filesystem::remove_all(dir);
}

TEST_CASE("train: lr = 0 leaves parameters unchanged") {
    Model m = make_model(star_ansatz(), 2, 2);
    Rng rng(41);
    init_params(m, rng);
    const auto before = m.params;
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.lr = 0.0;
    const auto data = make_blobs(1, 11, 120);
    train(m, data, cfg);
    REQUIRE(m.params == before);
}

TEST_CASE("train: deterministic under a fixed seed") {
    const auto data = make_blobs(2, 13, 180);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.seed = 99;

    Model m1 = make_model(star_ansatz(), 2, 2);
    init_params(m1, cfg);
    const auto r1 = train(m1, data, cfg);

    Model m2 = make_model(star_ansatz(), 2, 2);
    init_params(m2, cfg);
    const auto r2 = train(m2, data, cfg);

    REQUIRE(m1.params == m2.params);
    REQUIRE(report_to_json(r1) == report_to_json(r2));
}

TEST_CASE("train: separable blobs reach high train accuracy quickly") {
    const auto data = make_blobs(1, 17, 600);
    Model m = make_model(star_ansatz(), 2, 2);
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.seed = 7;
    init_params(m, cfg);
    const auto report = train(m, data, cfg);
    REQUIRE(report.status == "ok");
    const double train_acc = evaluate(m, data, data.train_idx);
    REQUIRE(train_acc >= 0.95);
}

TEST_CASE("train_with_growth: cap 0 is identical to plain training") {
    const auto data = make_blobs(3, 19, 150);
    TrainConfig cfg;
    cfg.epochs = 4;
    cfg.seed = 21;
    cfg.growth_cap = 0;

    Model m1 = make_model(star_ansatz(), 2, 2);
    init_params(m1, cfg);
    const auto r1 = train_with_growth(m1, lib(), data, cfg);

    Model m2 = make_model(star_ansatz(), 2, 2);
    init_params(m2, cfg);
    const auto r2 = train(m2, data, cfg);

    REQUIRE(m1.params == m2.params);
    REQUIRE(report_to_json(r1) == report_to_json(r2));
    REQUIRE(r1.growth_events.empty());
}

TEST_CASE("train_with_growth: events preserve the forward pass exactly") {
    const auto data = make_moons(3, 23, 240); // hard task: growth triggers
    TrainConfig cfg;
    cfg.epochs = 10;
    cfg.seed = 3;
    cfg.growth_cap = 3;
    cfg.growth_patience = 2;
    cfg.growth_min_improvement = 0.5; // stall immediately: improvement is never this large

    Model m = make_model(star_ansatz(), 2, 2);
    init_params(m, cfg);
    const auto report = train_with_growth(m, lib(), data, cfg);
    REQUIRE(!report.growth_events.empty());
    for (const auto& e : report.growth_events) {
        REQUIRE(e.forward_delta < 1e-9);
        REQUIRE(e.params_added >= 0);
    }
    // circuit size trajectory is recorded
    REQUIRE(report.epochs.back().gate_count >=
            report.epochs.front().gate_count);
}

TEST_CASE("train_with_pruning: no candidates means no events") {
    const auto data = make_blobs(1, 29, 150);
    Model m = make_model(star_ansatz(), 2, 2);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.seed = 31;
    cfg.prune_epsilon = 1e-12; // nothing sits below this after init
    init_params(m, cfg);
    const auto report = train_with_pruning(m, data, cfg);
    REQUIRE(report.prune_events.empty());
}

TEST_CASE("train_with_pruning: a zero-angle gate is pruned for free") {
    const auto data = make_blobs(1, 37, 240);
    Model m = make_model(star_ansatz(), 2, 2);
    TrainConfig cfg;
    cfg.epochs = 0; // prune the initialized model directly
    cfg.seed = 41;
    cfg.prune_finetune_epochs = 0;
    cfg.prune_epsilon = 0.05;
    init_params(m, cfg);
    m.params[0] = 0.0; // guarantee one exact-zero rotation
    const double acc_before = evaluate(m, data, data.val_idx);
    const auto report = train_with_pruning(m, data, cfg);
    REQUIRE(!report.prune_events.empty());
    const auto& first = report.prune_events.front();
    REQUIRE(first.theta == 0.0);
    REQUIRE(first.val_accuracy_before == Catch::Approx(acc_before));
    REQUIRE(first.val_accuracy_after == Catch::Approx(acc_before)); // exact-zero gate is free
}

TEST_CASE("report serialization round-trips through JSON and CSV") {
    TrainReport r;
    r.epochs.push_back({1, 0.5, 0.75, 10, 6});
    r.epochs.push_back({2, 0.25, 0.8125, 12, 7});
    r.growth_events.push_back({2, 4, 0, 2, 1e-16});
    r.prune_events.push_back({1, 2, "ry q0", 0.01, 0.8, 0.79, true});
    r.final_test_accuracy = 0.77;

    const auto dir = std::filesystem::temp_directory_path();
    const auto jpath = (dir / "vqsyn_report.json").string();
    const auto cpath = (dir / "vqsyn_metrics.csv").string();
    save_report(r, jpath);
    save_metrics_csv(r, cpath);

    std::ifstream jin(jpath);
    nlohmann::json j;
    jin >> j;
    REQUIRE(j.at("final_test_accuracy").get<double>() == 0.77);
    REQUIRE(j.at("epochs").size() == 2);
    REQUIRE(j.at("growth_events")[0].at("params_added").get<int>() == 2);

    std::ifstream cin_file(cpath);
    std::string header;
    std::getline(cin_file, header);
    REQUIRE(header == "epoch,train_loss,val_accuracy,gate_count,param_count");
    std::filesystem::remove(jpath);
    std::filesystem::remove(cpath);
}
