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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#if defined(VQSYN_HAVE_PNG)
#include <png.h>
#endif

#include "vqsyn/gates.hpp"
#include "vqsyn/rng.hpp"

namespace vqsyn {

struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Labeled feature vectors with disjoint train/validation/test splits.
struct Dataset {
    int num_features = 0;
    int num_classes = 0;
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    std::vector<int> train_idx;
    std::vector<int> val_idx;
    std::vector<int> test_idx;

    std::size_t size() const { return features.size(); }
};

/// Deterministic shuffled split, 2/3 train and 1/6 each for validation
/// and test (1500 points -> 1000/250/250).
inline void split_dataset(Dataset& d, std::uint64_t seed) {
    std::vector<int> order(d.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, 0x53504c54)); // split stream
    shuffle(order, rng);
    const std::size_t n = order.size();
    const std::size_t n_train = (n * 2) / 3;
    const std::size_t n_val = n / 6;
    d.train_idx.assign(order.begin(), order.begin() + n_train);
    d.val_idx.assign(order.begin() + n_train, order.begin() + n_train + n_val);
    d.test_idx.assign(order.begin() + n_train + n_val, order.end());
}

/// Affine per-feature rescaling onto [lo, hi] (default [0, pi], so that
/// distinct values stay distinct under RY angle encoding). Constant
/// features map to the midpoint.
inline void rescale_features(Dataset& d, double lo = 0.0, double hi = kPi) {
    if (d.features.empty()) {
        return;
    }
    for (int f = 0; f < d.num_features; ++f) {
        double fmin = d.features[0][static_cast<std::size_t>(f)];
        double fmax = fmin;
        for (const auto& row : d.features) {
            fmin = std::min(fmin, row[static_cast<std::size_t>(f)]);
            fmax = std::max(fmax, row[static_cast<std::size_t>(f)]);
        }
        const double span = fmax - fmin;
        for (auto& row : d.features) {
            auto& v = row[static_cast<std::size_t>(f)];
            v = (span > 0.0) ? lo + (hi - lo) * (v - fmin) / span : 0.5 * (lo + hi);
        }
    }
}

namespace detail {

inline void finalize_dataset(Dataset& d, std::uint64_t seed) {
    rescale_features(d);
    split_dataset(d, seed);
}

} // namespace detail

/// Two gaussian blobs; higher level = closer centers.
inline Dataset make_blobs(int level, std::uint64_t seed, int count = 1500) {
    if (level < 1 || level > 3) {
        throw std::invalid_argument("make_blobs: level must be 1..3");
    }
    const double separation[] = {4.0, 1.6, 0.9};
    const double off = separation[level - 1] / 2.0;
    Dataset d;
    d.num_features = 2;
    d.num_classes = 2;
    for (int i = 0; i < count; ++i) {
        Rng rng(derive_seed(seed, 0x424c4f42, static_cast<std::uint64_t>(i)));
        const int label = i % 2;
        const double cx = (label == 0) ? -off : off;
        const double cy = (label == 0) ? -off : off;
        d.features.push_back({cx + rng.gaussian(), cy + rng.gaussian()});
        d.labels.push_back(label);
    }
    detail::finalize_dataset(d, seed);
    return d;
}

/// Two concentric circles; higher level = smaller radius gap and more noise.
inline Dataset make_circles(int level, std::uint64_t seed, int count = 1500) {
    if (level < 1 || level > 3) {
        throw std::invalid_argument("make_circles: level must be 1..3");
    }
    const double inner_radius[] = {0.35, 0.6, 0.72};
    const double noise[] = {0.06, 0.13, 0.18};
    Dataset d;
    d.num_features = 2;
    d.num_classes = 2;
    for (int i = 0; i < count; ++i) {
        Rng rng(derive_seed(seed, 0x43495243, static_cast<std::uint64_t>(i)));
        const int label = i % 2;
        const double r = (label == 0) ? 1.0 : inner_radius[level - 1];
        const double angle = rng.uniform(0.0, 2.0 * kPi);
        d.features.push_back({r * std::cos(angle) + noise[level - 1] * rng.gaussian(),
                              r * std::sin(angle) + noise[level - 1] * rng.gaussian()});
        d.labels.push_back(label);
    }
    detail::finalize_dataset(d, seed);
    return d;
}

/// Two interleaved half-moons; higher level = more noise.
inline Dataset make_moons(int level, std::uint64_t seed, int count = 1500) {
    if (level < 1 || level > 3) {
        throw std::invalid_argument("make_moons: level must be 1..3");
    }
    const double noise[] = {0.08, 0.24, 0.36};
    Dataset d;
    d.num_features = 2;
    d.num_classes = 2;
    for (int i = 0; i < count; ++i) {
        Rng rng(derive_seed(seed, 0x4d4f4f4e, static_cast<std::uint64_t>(i)));
        const int label = i % 2;
        const double t = rng.uniform(0.0, kPi);
        double x = std::cos(t);
        double y = std::sin(t);
        if (label == 1) {
            x = 1.0 - x;
            y = 0.5 - y;
        }
        d.features.push_back({x + noise[level - 1] * rng.gaussian(),
                              y + noise[level - 1] * rng.gaussian()});
        d.labels.push_back(label);
    }
    detail::finalize_dataset(d, seed);
    return d;
}

// ---------------------------------------------------------------------------
// CSV datasets: header row `f0,...,fk,label`.
// ---------------------------------------------------------------------------

inline Dataset load_csv_dataset(const std::string& path, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open dataset file '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("dataset file '" + path + "' is empty");
    }
    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) {
            header.push_back(cell);
        }
    }
    if (header.size() < 2 || header.back() != "label") {
        throw DataError("dataset CSV must end with a 'label' column");
    }
    Dataset d;
    d.num_features = static_cast<int>(header.size()) - 1;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw DataError("dataset CSV line " + std::to_string(line_no) + ": bad value '" +
                                cell + "'");
            }
        }
        if (static_cast<int>(row.size()) != d.num_features + 1) {
            throw DataError("dataset CSV line " + std::to_string(line_no) + ": expected " +
                            std::to_string(d.num_features + 1) + " columns");
        }
        const int label = static_cast<int>(row.back());
        if (label < 0 || std::abs(row.back() - label) > 1e-9) {
            throw DataError("dataset CSV line " + std::to_string(line_no) +
                            ": label must be a non-negative integer");
        }
        row.pop_back();
        d.features.push_back(std::move(row));
        d.labels.push_back(label);
    }
    if (d.features.empty()) {
        throw DataError("dataset file '" + path + "' has no rows");
    }
    d.num_classes = *std::max_element(d.labels.begin(), d.labels.end()) + 1;
    detail::finalize_dataset(d, seed);
    return d;
}

// ---------------------------------------------------------------------------
// Grayscale image datasets: a directory with labels.csv
// (`filename,label`) next to PGM (P2/P5) or PNG files. Images are center
// cropped to 24x24 and average pooled to 4x4 (16 features).
// ---------------------------------------------------------------------------

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels; // row-major, [0, 255]

    double at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * width + c]; }
};

inline GrayImage load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open image '" + path + "'");
    }
    std::string magic;
    in >> magic;
    if (magic != "P2" && magic != "P5") {
        throw DataError("image '" + path + "' is not a PGM file");
    }
    auto next_token = [&in, &path]() {
        std::string tok;
        for (;;) {
            if (!(in >> tok)) {
                throw DataError("image '" + path + "' has a truncated header");
            }
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return tok;
        }
    };
    GrayImage img;
    img.width = std::stoi(next_token());
    img.height = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (img.width <= 0 || img.height <= 0 || maxval <= 0 || maxval > 65535) {
        throw DataError("image '" + path + "' has a malformed header");
    }
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    img.pixels.resize(n);
    if (magic == "P2") {
        for (auto& p : img.pixels) {
            int v;
            if (!(in >> v)) {
                throw DataError("image '" + path + "' has truncated pixel data");
            }
            p = 255.0 * v / maxval;
        }
    } else {
        in.get(); // single whitespace after maxval
        const int bytes = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> raw(n * bytes);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
            throw DataError("image '" + path + "' has truncated pixel data");
        }
        for (std::size_t i = 0; i < n; ++i) {
            const int v = (bytes == 1) ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
            img.pixels[i] = 255.0 * v / maxval;
        }
    }
    return img;
}

#if defined(VQSYN_HAVE_PNG)
inline GrayImage load_png(const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) {
        throw DataError("cannot open image '" + path + "'");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        if (png) {
            png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        }
        std::fclose(fp);
        throw DataError("failed to decode PNG '" + path + "'");
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    // normalize to 8-bit grayscale
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    if (png_get_color_type(png, info) & PNG_COLOR_MASK_COLOR) {
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    }
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    }
    if (png_get_bit_depth(png, info) < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    png_read_update_info(png, info);
    GrayImage img;
    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    std::vector<unsigned char> row(png_get_rowbytes(png, info));
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
    for (int r = 0; r < img.height; ++r) {
        png_read_row(png, row.data(), nullptr);
        for (int c = 0; c < img.width; ++c) {
            img.pixels[static_cast<std::size_t>(r) * img.width + c] = row[static_cast<std::size_t>(c)];
        }
    }
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return img;
}
#endif

inline GrayImage load_gray_image(const std::string& path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".png") {
#if defined(VQSYN_HAVE_PNG)
        return load_png(path);
#else
        throw DataError("PNG support is not compiled in; convert '" + path + "' to PGM");
#endif
    }
    return load_pgm(path);
}

inline GrayImage center_crop(const GrayImage& img, int size) {
    if (img.width < size || img.height < size) {
        throw DataError("image is smaller than the " + std::to_string(size) + "x" +
                        std::to_string(size) + " crop window");
    }
    const int r0 = (img.height - size) / 2;
    const int c0 = (img.width - size) / 2;
    GrayImage out;
    out.width = size;
    out.height = size;
    out.pixels.resize(static_cast<std::size_t>(size) * size);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            out.pixels[static_cast<std::size_t>(r) * size + c] = img.at(r0 + r, c0 + c);
        }
    }
    return out;
}

/// Average pooling onto a target x target grid (source must divide evenly).
inline std::vector<double> average_pool(const GrayImage& img, int target) {
    if (img.width != img.height || img.width % target != 0) {
        throw DataError("average_pool: image side must be a multiple of the target size");
    }
    const int block = img.width / target;
    std::vector<double> out(static_cast<std::size_t>(target) * target, 0.0);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            out[static_cast<std::size_t>(r / block) * target + (c / block)] += img.at(r, c);
        }
    }
    for (auto& v : out) {
        v /= block * block;
    }
    return out;
}

/// 28x28-style grayscale image -> 16 features: center crop to 24x24, then
/// 4x4 average pooling.
inline std::vector<double> image_features(const GrayImage& img) {
    return average_pool(center_crop(img, 24), 4);
}

/// Loads `dir/labels.csv` (filename,label) plus the referenced images.
/// With a class filter, only those labels are kept and are remapped to
/// 0..C-1 in ascending original order.
inline Dataset load_image_dataset(const std::string& dir, std::uint64_t seed,
                                  const std::optional<std::vector<int>>& class_filter = std::nullopt) {
    const std::string labels_path = dir + "/labels.csv";
    std::ifstream in(labels_path);
    if (!in) {
        throw DataError("cannot open labels file '" + labels_path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("labels file '" + labels_path + "' is empty");
    }
    if (line.rfind("filename", 0) != 0) {
        throw DataError("labels file must start with a 'filename,label' header");
    }
    std::map<int, int> remap;
    if (class_filter) {
        std::vector<int> wanted = *class_filter;
        std::sort(wanted.begin(), wanted.end());
        wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
        for (std::size_t i = 0; i < wanted.size(); ++i) {
            remap[wanted[i]] = static_cast<int>(i);
        }
    }
    Dataset d;
    d.num_features = 16;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto comma = line.rfind(',');
        if (comma == std::string::npos) {
            throw DataError("labels file line " + std::to_string(line_no) + ": expected filename,label");
        }
        const std::string fname = line.substr(0, comma);
        int label = 0;
        try {
            label = std::stoi(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw DataError("labels file line " + std::to_string(line_no) + ": bad label");
        }
        if (label < 0) {
            throw DataError("labels file line " + std::to_string(line_no) + ": label out of range");
        }
        if (class_filter) {
            const auto it = remap.find(label);
            if (it == remap.end()) {
                continue;
            }
            label = it->second;
        }
        d.features.push_back(image_features(load_gray_image(dir + "/" + fname)));
        d.labels.push_back(label);
    }
    if (d.features.empty()) {
        throw DataError("image dataset '" + dir + "' has no usable samples");
    }
    d.num_classes = class_filter ? static_cast<int>(remap.size())
                                 : *std::max_element(d.labels.begin(), d.labels.end()) + 1;
    detail::finalize_dataset(d, seed);
    return d;
}

/// Dataset specifier grammar:
///   blobs:L | circles:L | moons:L   with difficulty level L in 1..3
///   csv:PATH
///   images:DIR[:c0,c1,...]          optional class filter
inline Dataset load_dataset(const std::string& spec, std::uint64_t seed) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string rest = (colon == std::string::npos) ? "" : spec.substr(colon + 1);
    if (kind == "blobs" || kind == "circles" || kind == "moons") {
        int level = 0;
        try {
            level = std::stoi(rest);
        } catch (const std::exception&) {
            throw DataError("dataset spec '" + spec + "' needs a difficulty level 1..3");
        }
        if (kind == "blobs") {
            return make_blobs(level, seed);
        }
        if (kind == "circles") {
            return make_circles(level, seed);
        }
        return make_moons(level, seed);
    }
    if (kind == "csv") {
        if (rest.empty()) {
            throw DataError("dataset spec 'csv:' needs a file path");
        }
        return load_csv_dataset(rest, seed);
    }
    if (kind == "images") {
        const auto second = rest.find(':');
        const std::string dir = rest.substr(0, second);
        if (dir.empty()) {
            throw DataError("dataset spec 'images:' needs a directory");
        }
        std::optional<std::vector<int>> filter;
        if (second != std::string::npos) {
            std::vector<int> classes;
            std::istringstream cs(rest.substr(second + 1));
            std::string tok;
            while (std::getline(cs, tok, ',')) {
                classes.push_back(std::stoi(tok));
            }
            filter = classes;
        }
        return load_image_dataset(dir, seed, filter);
    }
    throw DataError("unknown dataset spec '" + spec + "'");
}

} // namespace vqsyn
