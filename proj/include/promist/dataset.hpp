/*
 * Copyright (C) 2026 The Promist Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "promist/filter.hpp"
#include "promist/png_io.hpp"

namespace promist {

namespace fs = std::filesystem;

/// Lists the supported source images of a corpus directory (non-recursive),
/// sorted by file name so downstream splits do not depend on directory
/// enumeration order.
inline std::vector<fs::path> scan_corpus(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec) || ec)
        throw IoError("corpus is not a readable directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (ext == ".png") out.push_back(entry.path());
    }
    if (ec)
        throw IoError("failed to enumerate corpus: " + dir.string());
    if (out.empty())
        throw EmptyCorpusError("no supported images in " + dir.string());
    std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
        return a.filename().string() < b.filename().string();
    });
    return out;
}

/// Deterministic seeded partition of n items. The permutation is a
/// Fisher-Yates shuffle driven by std::mt19937_64 with j = next() % (i + 1);
/// the standard library shuffle is implementation-defined and would break
/// the cross-platform reproducibility contract. The first floor(ratio * n)
/// shuffled items form the train set.
struct SplitIndices {
    std::vector<std::size_t> train, test;
};

inline SplitIndices split_indices(std::size_t n, double ratio, std::uint64_t seed) {
    if (n == 0)
        throw ParameterError("cannot split an empty entry list");
    if (!(ratio > 0.0 && ratio < 1.0))
        throw ParameterError("split ratio must lie in (0, 1)");
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(order[i], order[j]);
    }
    const std::size_t ntrain = static_cast<std::size_t>(ratio * static_cast<double>(n));
    SplitIndices s;
    s.train.assign(order.begin(), order.begin() + ntrain);
    s.test.assign(order.begin() + ntrain, order.end());
    return s;
}

struct Split {
    std::vector<fs::path> train, test;
};

inline Split split(const std::vector<fs::path>& entries, double ratio, std::uint64_t seed) {
    const SplitIndices idx = split_indices(entries.size(), ratio, seed);
    Split s;
    s.train.reserve(idx.train.size());
    s.test.reserve(idx.test.size());
    for (std::size_t i : idx.train) s.train.push_back(entries[i]);
    for (std::size_t i : idx.test) s.test.push_back(entries[i]);
    return s;
}

/// One source image in the manifest. Paths are relative (source to the
/// corpus root, outputs to the output root) so the manifest is location
/// independent. A decode failure marks the entry skipped instead of
/// aborting the run.
struct ManifestEntry {
    std::string source_path;
    std::string split;
    std::vector<std::pair<std::string, std::string>> outputs; // label -> path
    std::string skip_reason; // nonempty means skipped
};

struct DatasetManifest {
    std::uint64_t seed = 0;
    double split_ratio = 0.9;
    std::vector<std::string> configs;
    std::vector<ManifestEntry> entries;
};

/// Manifest as JSON with a fixed key order, no timestamps, and no absolute
/// paths, so identical inputs serialize to identical bytes.
inline nlohmann::ordered_json manifest_json(const DatasetManifest& m) {
    nlohmann::ordered_json j;
    j["seed"] = m.seed;
    j["split_ratio"] = m.split_ratio;
    j["configs"] = m.configs;
    j["entries"] = nlohmann::ordered_json::array();
    for (const ManifestEntry& e : m.entries) {
        nlohmann::ordered_json je;
        je["source_path"] = e.source_path;
        je["split"] = e.split;
        if (!e.skip_reason.empty()) {
            je["skipped"] = true;
            je["reason"] = e.skip_reason;
        } else {
            nlohmann::ordered_json jo;
            for (const auto& [label, path] : e.outputs) jo[label] = path;
            je["outputs"] = jo;
        }
        j["entries"].push_back(std::move(je));
    }
    return j;
}

inline void write_manifest(const fs::path& path, const DatasetManifest& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write manifest: " + path.string());
    out << manifest_json(m).dump(2) << "\n";
    if (!out)
        throw IoError("failed writing manifest: " + path.string());
}

struct GenerateOptions {
    fs::path corpus;
    fs::path out;
    std::vector<FilterConfig> configs;
    std::uint64_t seed = 0;
    double split_ratio = 0.9;
    int jobs = 1;
};

/// Renders every (source image, config) pair into out/<label>/<split>/ with
/// the untouched original copied under out/original/<split>/, and writes
/// out/manifest.json. Image jobs run on a worker pool; the manifest is
/// assembled in source order afterwards, so its bytes do not depend on the
/// worker count.
inline DatasetManifest generate(const GenerateOptions& opt) {
    if (opt.configs.empty())
        throw ParameterError("generate needs at least one filter config");
    if (!(opt.split_ratio > 0.0 && opt.split_ratio < 1.0))
        throw ParameterError("split ratio must lie in (0, 1)");
    std::vector<std::string> labels;
    for (const FilterConfig& cfg : opt.configs) {
        validate(cfg);
        labels.push_back(label(cfg));
    }
    {
        std::vector<std::string> sorted = labels;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ParameterError("configs must have distinct labels");
    }

    const std::vector<fs::path> sources = scan_corpus(opt.corpus);
    const SplitIndices idx = split_indices(sources.size(), opt.split_ratio, opt.seed);
    std::vector<std::string> split_of(sources.size());
    for (std::size_t i : idx.train) split_of[i] = "train";
    for (std::size_t i : idx.test) split_of[i] = "test";

    std::error_code ec;
    for (const char* s : {"train", "test"}) {
        fs::create_directories(opt.out / "original" / s, ec);
        if (ec) throw IoError("cannot create output directory: " + (opt.out / "original" / s).string());
        for (const std::string& l : labels) {
            fs::create_directories(opt.out / l / s, ec);
            if (ec) throw IoError("cannot create output directory: " + (opt.out / l / s).string());
        }
    }

    struct JobResult {
        std::vector<std::pair<std::string, std::string>> outputs;
        std::string skip_reason;
        std::string fatal;
    };
    std::vector<JobResult> results(sources.size());
    std::atomic<std::size_t> cursor{0};

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= sources.size()) return;
            JobResult& res = results[i];
            const std::string name = sources[i].filename().string();
            const std::string sp = split_of[i];
            EncodedImage src;
            try {
                src = read_png(sources[i].string());
            } catch (const Error&) {
                res.skip_reason = "decode failed";
                continue;
            }
            try {
                const fs::path orig_rel = fs::path("original") / sp / name;
                fs::copy_file(sources[i], opt.out / orig_rel, fs::copy_options::overwrite_existing);
                res.outputs.emplace_back("original", orig_rel.generic_string());
                for (std::size_t c = 0; c < opt.configs.size(); ++c) {
                    const fs::path rel = fs::path(labels[c]) / sp / name;
                    write_png((opt.out / rel).string(), emulate(src, opt.configs[c]));
                    res.outputs.emplace_back(labels[c], rel.generic_string());
                }
            } catch (const std::exception& e) {
                res.fatal = e.what();
                return;
            }
        }
    };

    const int jobs = std::clamp(opt.jobs, 1, 64);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const JobResult& r : results)
        if (!r.fatal.empty())
            throw IoError("dataset generation failed: " + r.fatal);

    DatasetManifest m;
    m.seed = opt.seed;
    m.split_ratio = opt.split_ratio;
    m.configs = labels;
    m.entries.resize(sources.size());
    for (std::size_t i = 0; i < sources.size(); ++i) {
        ManifestEntry& e = m.entries[i];
        e.source_path = sources[i].filename().string();
        e.split = split_of[i];
        e.outputs = std::move(results[i].outputs);
        e.skip_reason = results[i].skip_reason;
    }
    write_manifest(opt.out / "manifest.json", m);
    return m;
}

} // namespace promist
