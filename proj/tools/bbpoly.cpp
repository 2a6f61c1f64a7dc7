// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: verify, analyze, selfcheck, gen.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bbpoly/analyzer.hpp"
#include "bbpoly/dataset.hpp"
#include "bbpoly/errors.hpp"
#include "bbpoly/network_io.hpp"
#include "bbpoly/oracle.hpp"
#include "bbpoly/synthetic.hpp"
#include "bbpoly/verifier.hpp"

namespace fs = std::filesystem;
using namespace bbpoly;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitAnalysis = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const char* const kTauHelp =
    "Back-substitution steps per affine layer, or 'unbounded'. One step is one layer "
    "(affine or ReLU) or one jump over a block summary, so tau=4 reaches two affine+ReLU "
    "pairs back. End layers keep going until their block summary exists.";

struct AnalysisFlags {
    std::string mode = "blocksum";
    std::size_t sigma = 3;
    std::string tau = "unbounded";
    CLI::Option* sigma_opt = nullptr;
    CLI::Option* tau_opt = nullptr;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--mode", mode, "deeppoly, blocksum or inputsum")
            ->check(CLI::IsMember({"deeppoly", "blocksum", "inputsum"}))
            ->capture_default_str();
        sigma_opt = cmd.add_option("--sigma", sigma, "Affine layers per block")
                        ->check(CLI::PositiveNumber)
                        ->capture_default_str();
        tau_opt = cmd.add_option("--tau", tau, kTauHelp)->capture_default_str();
    }

    [[nodiscard]]
    AnalyzerConfig config() const {
        AnalyzerConfig cfg;
        cfg.mode = *parse_mode(mode);
        cfg.sigma = sigma;
        if (tau != "unbounded") {
            std::size_t pos = 0;
            long long v = 0;
            try {
                v = std::stoll(tau, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != tau.size() || v < 1) {
                throw UsageError("--tau must be a positive integer or 'unbounded', got '" + tau + "'");
            }
            cfg.tau = static_cast<std::size_t>(v);
        }
        if (cfg.mode == AnalysisMode::DeepPoly && (sigma_opt->count() > 0 || tau_opt->count() > 0)) {
            std::cerr << "warning: --mode deeppoly ignores --sigma and --tau\n";
        }
        if (cfg.mode == AnalysisMode::InputSummary && tau_opt->count() > 0) {
            std::cerr << "warning: --mode inputsum has no step bound, ignoring --tau\n";
        }
        if (const char* slack = std::getenv("BBPOLY_SLACK"); slack != nullptr && *slack != '\0') {
            char* end = nullptr;
            const double s = std::strtod(slack, &end);
            if (*end != '\0' || !(s >= 0)) {
                throw UsageError(fmt::format("BBPOLY_SLACK must be a non-negative number, got '{}'", slack));
            }
            cfg.outward_slack = s;
        }
        return cfg;
    }
};

std::vector<double> parse_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (item.empty() || pos != item.size() || !std::isfinite(v)) {
            throw UsageError(fmt::format("{}: '{}' is not a number", flag, item));
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw UsageError(fmt::format("{}: empty list", flag));
    }
    return out;
}

void print_bounds(const NetworkSpec& net, const AnalysisResult& r) {
    for (std::size_t k = 0; k < r.layer_bounds.size(); ++k) {
        fmt::print("layer {} ({})", k, to_string(net.layers[k].kind));
        for (const auto& b : r.layer_bounds[k]) {
            fmt::print(" [{:.9g}, {:.9g}]", b.lo, b.hi);
        }
        fmt::print("\n");
    }
    fmt::print("steps {} peak_live_constraints {} blocks {}\n", r.total_steps, r.peak_live_constraints,
               r.segmentation.blocks.size());
}

// --- verify ---------------------------------------------------------------

struct VerifyArgs {
    std::string net;
    std::string data;
    bool normalize = false;
    std::string eps;
    std::string profile;
    AnalysisFlags analysis;
    double timeout = 0;
    std::string out = "report.csv";
    std::string summary_out;
    std::string check = "difference";
    bool no_clip = false;
    std::size_t jobs = std::max(1U, std::thread::hardware_concurrency());
};

int run_verify(const VerifyArgs& a) {
    BenchmarkOptions opts;
    opts.config = a.analysis.config();
    opts.check = *parse_check(a.check);
    opts.clip = !a.no_clip;
    opts.timeout_s = a.timeout;
    opts.jobs = a.jobs;
    if (!a.profile.empty()) {
        opts.epsilons = *epsilon_profile(a.profile);
    } else {
        opts.epsilons = parse_list(a.eps, "--eps");
    }
    for (double e : opts.epsilons) {
        if (e < 0) {
            throw UsageError("--eps values must be non-negative");
        }
    }

    const NetworkSpec net = load_network(a.net);
    const auto data = load_dataset(a.data, a.normalize, net.input_width);
    const VerdictReport report = run_benchmark(net, data, opts);

    write_report_csv(report, a.out);
    fs::path summary_path = a.summary_out;
    if (summary_path.empty()) {
        summary_path = fs::path(a.out).replace_extension(".summary.json");
    }
    std::ofstream js(summary_path);
    if (!js) {
        throw std::runtime_error("cannot open " + summary_path.string() + " for writing");
    }
    nlohmann::json summary = report_summary_json(report);
    summary["check"] = std::string(to_string(opts.check));
    js << summary.dump(2) << "\n";

    fmt::print("mode {} sigma {} tau {} check {}\n", report.mode, report.sigma, report.tau, to_string(opts.check));
    fmt::print("{:>10} {:>10} {:>9} {:>9} {:>10} {:>12}\n", "epsilon", "candidates", "verified", "timeouts",
               "precision", "mean_time_s");
    for (const auto& s : report.summaries) {
        fmt::print("{:>10} {:>10} {:>9} {:>9} {:>10} {:>12.6f}\n", s.epsilon, s.candidates, s.verified, s.timeouts,
                   s.precision ? fmt::format("{:.4f}", *s.precision) : std::string("n/a"), s.mean_time_s);
    }
    fmt::print("report: {}\nsummary: {}\n", a.out, summary_path.string());
    return kExitOk;
}

// --- analyze --------------------------------------------------------------

struct AnalyzeArgs {
    std::string net;
    std::string input_bounds;
    std::string point;
    double eps = 0;
    AnalysisFlags analysis;
    bool no_clip = false;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::string json_out;
};

int run_analyze(const AnalyzeArgs& a) {
    const AnalyzerConfig cfg = a.analysis.config();
    const NetworkSpec net = load_network(a.net);
    BoundsVector region;
    if (!a.input_bounds.empty()) {
        const auto v = parse_list(a.input_bounds, "--input-bounds");
        if (v.size() != 2 * net.input_width) {
            throw UsageError(fmt::format("--input-bounds needs {} numbers (lo,hi per input), got {}",
                                         2 * net.input_width, v.size()));
        }
        for (std::size_t i = 0; i < net.input_width; ++i) {
            if (v[2 * i] > v[2 * i + 1]) {
                throw UsageError(fmt::format("--input-bounds: input {} has lo > hi", i));
            }
            region.push_back({v[2 * i], v[2 * i + 1]});
        }
    } else {
        const auto p = parse_list(a.point, "--point");
        if (p.size() != net.input_width) {
            throw UsageError(fmt::format("--point needs {} values, got {}", net.input_width, p.size()));
        }
        RobustnessQuery q;
        q.record.pixels = Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size()));
        q.epsilon = a.eps;
        q.clip = !a.no_clip;
        region = build_region(q, net);
    }

    const AnalysisResult r = analyze(net, region, cfg);
    fmt::print("mode {} sigma {} tau {}\n", to_string(cfg.mode), cfg.sigma, tau_to_string(cfg));
    print_bounds(net, r);
    int rc = kExitOk;
    if (a.samples > 0) {
        const SampleReport s = sample_check(net, region, r, a.samples, a.seed);
        if (s.passed) {
            fmt::print("sample check: {} points, no violations\n", s.points);
        } else {
            fmt::print("sample check: {} of {} points violate bounds, worst layer {} neuron {} value {} outside "
                       "[{}, {}]\n",
                       s.violations, s.points, s.worst->layer, s.worst->neuron, s.worst->value, s.worst->bounds.lo,
                       s.worst->bounds.hi);
            rc = kExitError;
        }
    }
    if (!a.json_out.empty()) {
        nlohmann::json doc;
        doc["mode"] = std::string(to_string(cfg.mode));
        doc["sigma"] = cfg.sigma;
        doc["tau"] = tau_to_string(cfg);
        doc["total_steps"] = r.total_steps;
        doc["peak_live_constraints"] = r.peak_live_constraints;
        nlohmann::json layers = nlohmann::json::array();
        for (const auto& lb : r.layer_bounds) {
            nlohmann::json l = nlohmann::json::array();
            for (const auto& b : lb) {
                l.push_back({b.lo, b.hi});
            }
            layers.push_back(l);
        }
        doc["layer_bounds"] = layers;
        std::ofstream out(a.json_out);
        if (!out) {
            throw std::runtime_error("cannot open " + a.json_out + " for writing");
        }
        out << doc.dump(2) << "\n";
    }
    return rc;
}

// --- selfcheck ------------------------------------------------------------

int run_selfcheck() {
    const NetworkSpec net = example_network();
    const BoundsVector region(2, Interval{-1, 1});
    int failures = 0;
    auto expect = [&](const char* name, const Interval& got, double lo, double hi) {
        const bool ok = std::abs(got.lo - lo) <= 1e-9 && std::abs(got.hi - hi) <= 1e-9;
        fmt::print("{:<34} [{:g}, {:g}] expected [{:g}, {:g}] {}\n", name, got.lo, got.hi, lo, hi,
                   ok ? "ok" : "MISMATCH");
        failures += ok ? 0 : 1;
    };

    AnalyzerConfig block;
    block.sigma = 2;
    const AnalysisResult b = analyze(net, region, block);
    expect("x3 (blocksum sigma=2)", b.layer_bounds[0][0], -2, 2);
    expect("x4 (blocksum sigma=2)", b.layer_bounds[0][1], -2, 2);
    expect("x5", b.layer_bounds[1][0], 0, 2);
    expect("x7", b.layer_bounds[2][0], 0, 3);
    expect("x8", b.layer_bounds[2][1], -2, 2);
    expect("x9", b.layer_bounds[3][0], 0, 3);
    expect("x10", b.layer_bounds[3][1], 0, 2);
    expect("x11 (blocksum sigma=2)", b.layer_bounds[4][0], 1, 6);
    expect("x12 (blocksum sigma=2)", b.layer_bounds[4][1], 0, 2);

    AnalyzerConfig input = block;
    input.mode = AnalysisMode::InputSummary;
    const AnalysisResult in = analyze(net, region, input);
    expect("x11 (inputsum sigma=2)", in.layer_bounds[4][0], 1, 6);

    AnalyzerConfig dp;
    dp.mode = AnalysisMode::DeepPoly;
    const AnalysisResult d = analyze(net, region, dp);
    expect("x11 (deeppoly)", d.layer_bounds[4][0], 1, 5.5);

    const auto iv = interval_propagate(net, region);
    expect("x7 (interval arithmetic)", iv[2][0], 0, 4);

    for (const auto* r : {&b, &in, &d}) {
        const SampleReport s = sample_check(net, region, *r, 1000, 7);
        fmt::print("{:<34} {} points, {} violations\n", "sample check", s.points, s.violations);
        failures += s.passed ? 0 : 1;
    }

    RobustnessQuery q;
    q.record.label = 0;
    q.record.pixels = Vector::Zero(2);
    q.epsilon = 1.0;
    q.clip = false;
    const Verdict bc = verify_robustness(net, q, block, CheckMethod::BoundCompare).verdict;
    const VerifyOutcome diff = verify_robustness(net, q, block, CheckMethod::Difference);
    fmt::print("{:<34} bound-compare {}, difference {} (margin {:g})\n", "robustness of class 0 on [-1,1]^2",
               to_string(bc), to_string(diff.verdict), diff.margins.at(0));
    if (bc != Verdict::Inconclusive || diff.verdict != Verdict::Verified || std::abs(diff.margins[0] - 1) > 1e-9) {
        ++failures;
    }

    fmt::print("{}\n", failures == 0 ? "selfcheck passed" : fmt::format("selfcheck FAILED ({} checks)", failures));
    return failures == 0 ? kExitOk : kExitError;
}

// --- gen ------------------------------------------------------------------

struct GenArgs {
    RandomNetOptions net;
    std::string out;
    std::string data_out;
    std::size_t data_rows = 10;
};

int run_gen(const GenArgs& a) {
    const NetworkSpec net = random_network(a.net);
    save_network(net, a.out);
    fmt::print("wrote {} ({} layers, {} affine, input {}, output {})\n", a.out, net.layers.size(),
               net.affine_layer_count(), net.input_width, net.output_width());
    if (!a.data_out.empty()) {
        std::mt19937_64 rng(a.net.seed ^ 0x9e3779b97f4a7c15ULL);
        std::uniform_real_distribution<double> unit(net.input_domain.lo, net.input_domain.hi);
        std::vector<DatasetRecord> rows;
        for (std::size_t i = 0; i < a.data_rows; ++i) {
            DatasetRecord r;
            r.pixels = Vector(static_cast<Eigen::Index>(net.input_width));
            for (Eigen::Index j = 0; j < r.pixels.size(); ++j) {
                r.pixels[j] = unit(rng);
            }
            r.label = classify(net, r.pixels);
            rows.push_back(std::move(r));
        }
        save_dataset(rows, a.data_out);
        fmt::print("wrote {} ({} rows labeled by the network)\n", a.data_out, rows.size());
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bbpoly: L-infinity robustness certification for ReLU networks"};
    app.require_subcommand(1);

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Verify every correctly classified image at each epsilon");
    verify->add_option("--net", va.net, "Network JSON")->required()->check(CLI::ExistingFile);
    verify->add_option("--data", va.data, "Dataset CSV: label,p1,...,pn per row")->required()->check(CLI::ExistingFile);
    verify->add_flag("--normalize", va.normalize, "Divide pixels by 255");
    auto* eps_opt = verify->add_option("--eps", va.eps, "Comma-separated epsilons");
    auto* profile_opt = verify->add_option("--profile", va.profile, "Epsilon preset")
                            ->check(CLI::IsMember({"mnist-fc", "mnist-conv", "cifar-fc", "cifar-conv"}));
    eps_opt->excludes(profile_opt);
    va.analysis.add_to(*verify);
    verify->add_option("--timeout", va.timeout, "Seconds per image and epsilon, 0 for none")
        ->check(CLI::NonNegativeNumber);
    verify->add_option("--out", va.out, "Report CSV")->capture_default_str();
    verify->add_option("--summary-out", va.summary_out, "Summary JSON (default: <out> with extension .summary.json)");
    verify->add_option("--check", va.check, "difference or bound-compare")
        ->check(CLI::IsMember({"difference", "bound-compare"}))
        ->capture_default_str();
    verify->add_flag("--no-clip", va.no_clip, "Do not clamp regions to the input domain");
    verify->add_option("--jobs", va.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

    AnalyzeArgs aa;
    auto* analyze_cmd = app.add_subcommand("analyze", "Print per-layer bounds for one input region");
    analyze_cmd->add_option("--net", aa.net, "Network JSON")->required()->check(CLI::ExistingFile);
    auto* bounds_opt = analyze_cmd->add_option("--input-bounds", aa.input_bounds, "lo0,hi0,lo1,hi1,...");
    auto* point_opt = analyze_cmd->add_option("--point", aa.point, "Center of an epsilon box");
    bounds_opt->excludes(point_opt);
    analyze_cmd->add_option("--eps", aa.eps, "Box radius around --point")->check(CLI::NonNegativeNumber);
    analyze_cmd->add_flag("--no-clip", aa.no_clip, "Do not clamp the --point box to the input domain");
    aa.analysis.add_to(*analyze_cmd);
    analyze_cmd->add_option("--samples", aa.samples, "Also check containment of this many random executions");
    analyze_cmd->add_option("--seed", aa.seed, "Sampling seed");
    analyze_cmd->add_option("--json", aa.json_out, "Write bounds as JSON");

    auto* selfcheck = app.add_subcommand("selfcheck", "Check the built-in two-input example end to end");

    GenArgs ga;
    auto* gen = app.add_subcommand("gen", "Write a seeded random network");
    gen->add_option("--seed", ga.net.seed, "Random seed")->capture_default_str();
    gen->add_option("--inputs", ga.net.input_width)->check(CLI::PositiveNumber)->capture_default_str();
    gen->add_option("--outputs", ga.net.output_width)->check(CLI::PositiveNumber)->capture_default_str();
    gen->add_option("--dense-layers", ga.net.dense_layers, "Dense layers, output included")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    gen->add_option("--min-width", ga.net.min_width)->check(CLI::PositiveNumber)->capture_default_str();
    gen->add_option("--max-width", ga.net.max_width)->check(CLI::PositiveNumber)->capture_default_str();
    gen->add_option("--residual", ga.net.residual_units, "Residual units")->capture_default_str();
    gen->add_flag("--conv", ga.net.conv_front, "Start with a 2x2 convolution over a 3x3 image");
    gen->add_option("--out", ga.out, "Network JSON")->required();
    gen->add_option("--data-out", ga.data_out, "Also write a dataset CSV labeled by the network");
    gen->add_option("--data-rows", ga.data_rows)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*verify) {
            if (va.eps.empty() && va.profile.empty()) {
                throw UsageError("verify needs --eps or --profile");
            }
            return run_verify(va);
        }
        if (*analyze_cmd) {
            if (aa.input_bounds.empty() && aa.point.empty()) {
                throw UsageError("analyze needs --input-bounds or --point");
            }
            return run_analyze(aa);
        }
        if (*selfcheck) {
            return run_selfcheck();
        }
        if (*gen) {
            if (ga.net.min_width > ga.net.max_width) {
                throw UsageError("--min-width exceeds --max-width");
            }
            return run_gen(ga);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\nRun with --help for usage.\n";
        return kExitUsage;
    } catch (const AnalysisError& e) {
        std::cerr << "analysis aborted: " << e.what() << "\n";
        return kExitAnalysis;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitUsage;
}
