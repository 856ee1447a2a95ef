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

// promist: Pro-Mist diffusion filter emulator.
//
// Subcommands: apply one filter to one image, generate a paired dataset from
// a corpus, analyze original/filtered pairs, run the layer-count ablation,
// benchmark the blur engine, and run a quick self test.
//
// Exit codes: 0 success, 1 I/O failure, 2 invalid parameters.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <promist/promist.hpp>

namespace {

using nlohmann::ordered_json;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

// "inf" sentinel keeps reports machine-readable; JSON has no infinity.
ordered_json json_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

void echo_config(const promist::FilterConfig& cfg) {
    std::cout << "config: density=" << fmt(cfg.density) << " focal_mm=" << fmt(cfg.focal_mm)
              << " layer_count=" << cfg.layer_count << " base_sigma=" << fmt(cfg.base_sigma)
              << " reference_width=" << fmt(cfg.reference_width)
              << " tone_operator=" << promist::to_string(cfg.tone_op) << " weight_ratio=";
    if (cfg.weight_ratio)
        std::cout << fmt(*cfg.weight_ratio) << " (override)";
    else
        std::cout << fmt(promist::weight_ratio_for_density(cfg.density)) << " (derived)";
    std::cout << "\n";
}

void echo_stack(const promist::BlurStack& stack) {
    std::cout << "schedule: alpha=" << fmt(stack.alpha);
    for (std::size_t k = 0; k < stack.layers.size(); ++k)
        std::cout << " (sigma=" << fmt(stack.layers[k].sigma)
                  << ", w=" << fmt(stack.layers[k].weight) << ")";
    std::cout << "\n";
}

double parse_number_token(std::string tok, const std::string& label) {
    for (char& c : tok) {
        if (c == '-') c = '/';
        else if (c == 'p') c = '.';
    }
    try {
        if (tok.find('/') != std::string::npos) return promist::parse_density(tok);
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw promist::ParameterError("bad config label: " + label);
    }
}

promist::FilterConfig config_from_label(const std::string& label) {
    const auto fpos = label.find("_f");
    if (label.size() < 4 || label[0] != 'd' || fpos == std::string::npos || fpos < 2)
        throw promist::ParameterError("bad config label: " + label);
    promist::FilterConfig cfg;
    cfg.density = parse_number_token(label.substr(1, fpos - 1), label);
    cfg.focal_mm = parse_number_token(label.substr(fpos + 2), label);
    validate(cfg);
    return cfg;
}

ordered_json counts_json(const std::vector<long long>& counts) {
    return ordered_json(counts);
}

ordered_json report_json(const std::string& original_name, const std::string& filtered_name,
                         const promist::PairReport& r, const promist::HsvHistogram& ho,
                         const promist::HsvHistogram& hf) {
    ordered_json j;
    j["original"] = original_name;
    j["filtered"] = filtered_name;
    j["mean_value_delta"] = r.mean_value_delta;
    j["mean_sat_delta"] = r.mean_sat_delta;
    j["hue_histogram_l1"] = r.hue_histogram_l1;
    j["dynamic_range_original"] = r.dynamic_range_original;
    j["dynamic_range_filtered"] = r.dynamic_range_filtered;
    j["psnr_db"] = json_number(r.psnr_db);
    j["ssim"] = r.ssim;
    j["histograms"]["bins"] = ho.bins;
    j["histograms"]["original"]["hue"] = counts_json(ho.hue_counts);
    j["histograms"]["original"]["sat"] = counts_json(ho.sat_counts);
    j["histograms"]["original"]["val"] = counts_json(ho.val_counts);
    j["histograms"]["filtered"]["hue"] = counts_json(hf.hue_counts);
    j["histograms"]["filtered"]["sat"] = counts_json(hf.sat_counts);
    j["histograms"]["filtered"]["val"] = counts_json(hf.val_counts);
    return j;
}

std::string csv_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt(v);
}

struct AnalyzeArgs {
    std::string original, filtered, out;
    int bins = 64;
};

void run_analyze(const AnalyzeArgs& args) {
    namespace fs = std::filesystem;
    std::vector<std::pair<fs::path, fs::path>> pairs;
    if (fs::is_directory(args.original) != fs::is_directory(args.filtered))
        throw promist::ParameterError("--original and --filtered must both be files or both directories");
    if (fs::is_directory(args.original)) {
        std::map<std::string, fs::path> filtered;
        for (const fs::path& p : promist::scan_corpus(args.filtered))
            filtered[p.filename().string()] = p;
        for (const fs::path& p : promist::scan_corpus(args.original)) {
            const auto it = filtered.find(p.filename().string());
            if (it != filtered.end()) pairs.emplace_back(p, it->second);
        }
        if (pairs.empty())
            throw promist::EmptyCorpusError("no filename-matched pairs between the two directories");
    } else {
        pairs.emplace_back(args.original, args.filtered);
    }
    std::cout << "analyze: pairs=" << pairs.size() << " bins=" << args.bins << "\n";

    std::error_code ec;
    fs::create_directories(args.out, ec);
    if (ec) throw promist::IoError("cannot create report directory: " + args.out);

    std::ofstream csv(fs::path(args.out) / "report.csv", std::ios::binary);
    if (!csv) throw promist::IoError("cannot write report.csv");
    csv << "original,filtered,mean_value_delta,mean_sat_delta,hue_histogram_l1,"
           "dynamic_range_original,dynamic_range_filtered,psnr_db,ssim\n";

    for (const auto& [opath, fpath] : pairs) {
        const promist::LinearImage orig = promist::normalize(promist::read_png(opath.string()));
        const promist::LinearImage filt = promist::normalize(promist::read_png(fpath.string()));
        const promist::PairReport r = promist::pair_report(orig, filt, args.bins);
        const promist::HsvHistogram ho = promist::hsv_histograms(promist::rgb_to_hsv(orig), args.bins);
        const promist::HsvHistogram hf = promist::hsv_histograms(promist::rgb_to_hsv(filt), args.bins);

        const std::string oname = opath.filename().string();
        const std::string fname = fpath.filename().string();
        const fs::path jpath = fs::path(args.out) / (opath.stem().string() + ".json");
        std::ofstream jf(jpath, std::ios::binary);
        if (!jf) throw promist::IoError("cannot write " + jpath.string());
        jf << report_json(oname, fname, r, ho, hf).dump(2) << "\n";

        csv << oname << ',' << fname << ',' << csv_number(r.mean_value_delta) << ','
            << csv_number(r.mean_sat_delta) << ',' << csv_number(r.hue_histogram_l1) << ','
            << csv_number(r.dynamic_range_original) << ',' << csv_number(r.dynamic_range_filtered)
            << ',' << csv_number(r.psnr_db) << ',' << csv_number(r.ssim) << "\n";
    }
    if (!csv) throw promist::IoError("failed writing report.csv");
    std::cout << "wrote " << pairs.size() << " pair report(s) to " << args.out << "\n";
}

int run_selftest() {
    int failures = 0;
    const auto check = [&failures](const char* name, bool ok) {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
        if (!ok) ++failures;
    };

    const promist::Kernel1D k = promist::make_kernel(1.7);
    double ksum = 0.0;
    for (double t : k.taps) ksum += t;
    check("kernel taps sum to one", std::abs(ksum - 1.0) <= 1e-12);

    const promist::LinearImage noise = promist::uniform_random_image(7, 17, 13);
    const promist::LinearImage blurred = promist::blur(noise, 2.3);
    const double e0 = promist::total_energy(noise);
    const double e1 = promist::total_energy(blurred);
    check("blur conserves energy", std::abs(e1 - e0) <= 1e-6 * e0);

    bool roundtrip = true;
    {
        promist::EncodedImage ramp;
        ramp.width = 16;
        ramp.height = 16;
        ramp.bit_depth = 8;
        ramp.data.resize(ramp.sample_count());
        for (std::size_t i = 0; i < ramp.data.size(); ++i)
            ramp.data[i] = static_cast<std::uint16_t>(i % 256);
        const promist::EncodedImage back = promist::encode_srgb(promist::decode_srgb(ramp), 8);
        roundtrip = back.data == ramp.data;
    }
    check("8-bit encode/decode round trip", roundtrip);

    bool energy_ok = true;
    const promist::LinearImage field = promist::uniform_random_image(11, 32, 32);
    for (const promist::FilterConfig& cfg : promist::default_configs()) {
        const promist::BlurStack stack = promist::derive_params(cfg, field.width);
        const promist::LinearImage out = promist::apply_filter(field, stack);
        const double ein = promist::total_energy(field);
        const double eout = promist::total_energy(out);
        if (std::abs(eout - ein) > 1e-4 * ein) energy_ok = false;
    }
    check("apply_filter conserves energy for all default configs", energy_ok);

    const promist::LinearImage probe = promist::uniform_random_image(3, 24, 16);
    check("ssim(x, x) is exactly one", promist::ssim(probe, probe) == 1.0);

    const promist::LinearImage z = promist::make_linear(12, 12, 0.0f);
    const promist::LinearImage hbright = promist::make_linear(12, 12, 0.5f);
    check("psnr(0, 0.5) is 6.0206 dB", std::abs(promist::psnr(z, hbright) - 6.0206) <= 1e-3);

    const promist::SplitIndices s1 = promist::split_indices(20, 0.9, 0);
    const promist::SplitIndices s2 = promist::split_indices(20, 0.9, 0);
    check("split is deterministic and 18/2 at ratio 0.9",
          s1.train == s2.train && s1.test == s2.test && s1.train.size() == 18 && s1.test.size() == 2);

    std::cout << (failures == 0 ? "selftest passed" : "selftest FAILED") << "\n";
    return failures == 0 ? 0 : 1;
}

struct BenchArgs {
    std::string size = "1024x1024";
    int iters = 3;
};

void run_bench(const BenchArgs& args) {
    int w = 0, h = 0;
    if (std::sscanf(args.size.c_str(), "%dx%d", &w, &h) != 2 || w < 8 || h < 8)
        throw promist::ParameterError("--size must look like 1024x1024");
    if (args.iters < 1)
        throw promist::ParameterError("--iters must be >= 1");

    const promist::LinearImage img = promist::uniform_random_image(42, w, h);
    promist::FilterConfig cfg;
    const promist::BlurStack stack = promist::derive_params(cfg, w);
    const double mp = static_cast<double>(w) * h / 1e6;
    std::cout << "bench: size=" << w << "x" << h << " iters=" << args.iters << "\n";

    using clock = std::chrono::steady_clock;
    volatile float sink = 0.0f;
    for (const promist::BlurLayer& l : stack.layers) {
        const auto t0 = clock::now();
        for (int i = 0; i < args.iters; ++i) {
            const promist::LinearImage out = promist::blur(img, l.sigma);
            sink = sink + out.data[0];
        }
        const std::chrono::duration<double> dt = clock::now() - t0;
        std::cout << "sigma " << fmt(l.sigma) << ": "
                  << fmt(mp * args.iters / dt.count()) << " MP/s\n";
    }
    {
        const promist::EncodedImage enc = promist::encode_srgb(img, 8);
        const auto t0 = clock::now();
        for (int i = 0; i < args.iters; ++i) {
            const promist::EncodedImage out = promist::emulate(enc, cfg);
            sink = sink + static_cast<float>(out.data[0]);
        }
        const std::chrono::duration<double> dt = clock::now() - t0;
        std::cout << "pipeline: " << fmt(mp * args.iters / dt.count()) << " MP/s\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pro-Mist diffusion filter emulator"};
    app.require_subcommand(1);
    int exit_code = 0;

    // ---- apply ----
    auto* apply = app.add_subcommand("apply", "Apply one filter configuration to one image");
    struct {
        std::string input, output, density = "1/2", tone = "clamp", params;
        double focal = 20.0, base_sigma = 1.0, reference_width = 1024.0;
        int layers = 6, jobs = 1;
    } ap;
    apply->add_option("--input", ap.input, "Input PNG")->required();
    apply->add_option("--output", ap.output, "Output PNG")->required();
    apply->add_option("--density", ap.density, "Filter density, e.g. 1/2 or 1/8");
    apply->add_option("--focal", ap.focal, "Focal length in mm, e.g. 20 or 50");
    apply->add_option("--layers", ap.layers, "Number of blur layers");
    apply->add_option("--base-sigma", ap.base_sigma, "Base sigma in pixels at the reference width");
    apply->add_option("--reference-width", ap.reference_width, "Reference width in pixels");
    apply->add_option("--tone", ap.tone, "Tone operator: clamp or reinhard");
    apply->add_option("--params", ap.params, "Parameter file overriding the flags");
    apply->add_option("--jobs", ap.jobs, "Worker threads for the blur passes");
    apply->callback([&] {
        promist::FilterConfig cfg;
        cfg.density = promist::parse_density(ap.density);
        cfg.focal_mm = ap.focal;
        cfg.layer_count = ap.layers;
        cfg.base_sigma = ap.base_sigma;
        cfg.reference_width = ap.reference_width;
        cfg.tone_op = promist::parse_tone_operator(ap.tone);
        if (!ap.params.empty())
            cfg = promist::apply_params(cfg, promist::parse_params_file(ap.params));
        validate(cfg);
        echo_config(cfg);
        const promist::EncodedImage src = promist::read_png(ap.input);
        echo_stack(promist::derive_params(cfg, src.width));
        promist::write_png(ap.output, promist::emulate(src, cfg, ap.jobs));
        std::cout << "wrote " << ap.output << "\n";
    });

    // ---- generate ----
    auto* gen = app.add_subcommand("generate", "Generate a paired dataset from a corpus");
    struct {
        std::string corpus, out;
        std::vector<std::string> configs;
        std::uint64_t seed = 0;
        double ratio = 0.9;
        int jobs = 1;
    } gn;
    gen->add_option("--corpus", gn.corpus, "Directory of source PNGs")->required();
    gen->add_option("--out", gn.out, "Output directory")->required();
    gen->add_option("--seed", gn.seed, "Split seed");
    gen->add_option("--ratio", gn.ratio, "Train fraction in (0,1)");
    gen->add_option("--configs", gn.configs, "Config labels, e.g. d1-2_f20,d1-8_f50")
        ->delimiter(',');
    gen->add_option("--jobs", gn.jobs, "Parallel image jobs");
    gen->callback([&] {
        promist::GenerateOptions opt;
        opt.corpus = gn.corpus;
        opt.out = gn.out;
        opt.seed = gn.seed;
        opt.split_ratio = gn.ratio;
        opt.jobs = gn.jobs;
        if (gn.configs.empty()) {
            opt.configs = promist::default_configs();
        } else {
            for (const std::string& l : gn.configs) opt.configs.push_back(config_from_label(l));
        }
        std::cout << "generate: seed=" << opt.seed << " ratio=" << fmt(opt.split_ratio)
                  << " jobs=" << opt.jobs << " configs=";
        for (std::size_t i = 0; i < opt.configs.size(); ++i)
            std::cout << (i ? "," : "") << promist::label(opt.configs[i]);
        std::cout << "\n";
        for (const promist::FilterConfig& cfg : opt.configs) echo_config(cfg);

        const promist::DatasetManifest m = promist::generate(opt);
        std::size_t train = 0, test = 0, skipped = 0;
        for (const promist::ManifestEntry& e : m.entries) {
            if (!e.skip_reason.empty()) {
                ++skipped;
                continue;
            }
            (e.split == "train" ? train : test) += 1;
        }
        for (const std::string& l : m.configs)
            std::cout << l << ": train=" << train << " test=" << test << "\n";
        std::cout << "skipped=" << skipped << "\nwrote " << (opt.out / "manifest.json").string()
                  << "\n";
    });

    // ---- analyze ----
    auto* an = app.add_subcommand("analyze", "Compare original/filtered images or directories");
    AnalyzeArgs az;
    an->add_option("--original", az.original, "Original image or directory")->required();
    an->add_option("--filtered", az.filtered, "Filtered image or directory")->required();
    an->add_option("--out", az.out, "Report directory")->required();
    an->add_option("--bins", az.bins, "Histogram bins")->check(CLI::PositiveNumber);
    an->callback([&] { run_analyze(az); });

    // ---- ablate-layers ----
    auto* ab = app.add_subcommand("ablate-layers",
                                  "Compare layer counts against a dense 32-layer reference");
    struct {
        std::string input, out, density = "1/2";
        double focal = 20.0;
        std::vector<int> counts;
        int canvas = 257;
    } al;
    ab->add_option("--input", al.input, "Input PNG rendered once per layer count")->required();
    ab->add_option("--out", al.out, "Output directory")->required();
    ab->add_option("--layer-counts", al.counts, "Comma-separated layer counts, e.g. 1,2,4,6")
        ->delimiter(',')
        ->required();
    ab->add_option("--density", al.density, "Filter density");
    ab->add_option("--focal", al.focal, "Focal length in mm");
    ab->add_option("--canvas", al.canvas, "Odd impulse canvas size for the profiles");
    ab->callback([&] {
        if (al.counts.empty())
            throw promist::ParameterError("--layer-counts must not be empty");
        for (int c : al.counts)
            if (c < 1 || c > 12)
                throw promist::ParameterError("layer counts must lie in [1, 12]");
        promist::FilterConfig cfg;
        cfg.density = promist::parse_density(al.density);
        cfg.focal_mm = al.focal;
        echo_config(cfg);

        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(al.out, ec);
        if (ec) throw promist::IoError("cannot create output directory: " + al.out);

        const promist::EncodedImage src = promist::read_png(al.input);
        const std::vector<promist::AblationRow> rows =
            promist::ablate_layers(cfg, al.counts, al.canvas);

        std::ofstream csv(fs::path(al.out) / "ablation.csv", std::ios::binary);
        if (!csv) throw promist::IoError("cannot write ablation.csv");
        csv << "layer_count,l2_to_reference\n";
        for (const promist::AblationRow& row : rows) {
            promist::FilterConfig c = cfg;
            c.layer_count = row.layer_count;
            const std::string name = "layers_" + std::to_string(row.layer_count) + ".png";
            promist::write_png((fs::path(al.out) / name).string(), promist::emulate(src, c));
            csv << row.layer_count << ',' << fmt(row.l2_to_reference) << "\n";
            std::cout << "layers=" << row.layer_count
                      << " l2_to_reference=" << fmt(row.l2_to_reference) << "\n";
        }
        if (!csv) throw promist::IoError("failed writing ablation.csv");
        std::cout << "wrote " << al.out << "\n";
    });

    // ---- bench ----
    auto* be = app.add_subcommand("bench", "Throughput of each blur layer and the full pipeline");
    BenchArgs bn;
    be->add_option("--size", bn.size, "Image size WxH");
    be->add_option("--iters", bn.iters, "Iterations per measurement")->check(CLI::PositiveNumber);
    be->callback([&] { run_bench(bn); });

    // ---- selftest ----
    auto* st = app.add_subcommand("selftest", "Quick built-in checks; exit 1 on failure");
    st->callback([&] { exit_code = run_selftest(); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const promist::ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const promist::StructuralError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const promist::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
