// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bbpoly/analyzer.hpp"
#include "bbpoly/dataset.hpp"
#include "bbpoly/network.hpp"

namespace bbpoly {

struct RobustnessQuery {
    DatasetRecord record;
    double epsilon = 0.0;
    bool clip = true;
};

enum class Verdict { Verified, Inconclusive, Timeout, Skipped };
enum class CheckMethod { Difference, BoundCompare };

[[nodiscard]]
std::string_view to_string(Verdict v);
[[nodiscard]]
std::string_view to_string(CheckMethod m);
[[nodiscard]]
std::optional<CheckMethod> parse_check(std::string_view text);

/// The L-infinity ball of radius epsilon around the record's pixels,
/// optionally clamped to the network's input domain.
[[nodiscard]]
BoundsVector build_region(const RobustnessQuery& q, const NetworkSpec& net);

/// Argmax of the exact forward pass; ties go to the lowest index.
[[nodiscard]]
std::size_t classify(const NetworkSpec& net, const Vector& pixels);

/// `net` with (output_width - 1) rows appended to its output layer, row j
/// being out_target - out_j for every j != target in increasing order. The
/// original outputs keep their rows, so one analysis yields both checks.
[[nodiscard]]
NetworkSpec difference_network(const NetworkSpec& net, std::size_t target);

struct VerifyOutcome {
    Verdict verdict = Verdict::Inconclusive;
    double elapsed_s = 0.0;
    std::vector<double> margins; // per rival class: lower bound of target - rival (BoundCompare: l_t - u_j)
};

/// Runs the analysis on build_region(q) and decides robustness for
/// q.record.label. Does not filter candidates; see run_benchmark.
///
/// Difference: rival j is ruled out when the lower bound of out_t - out_j
/// is positive or when l_t > u_j. BoundCompare uses only the latter.
/// A positive timeout_s cancels the analysis between layers.
[[nodiscard]]
VerifyOutcome verify_robustness(const NetworkSpec& net, const RobustnessQuery& q, const AnalyzerConfig& cfg,
                                CheckMethod check = CheckMethod::Difference, double timeout_s = 0.0);

struct BenchmarkOptions {
    std::vector<double> epsilons;
    AnalyzerConfig config;
    CheckMethod check = CheckMethod::Difference;
    bool clip = true;
    double timeout_s = 0.0; // per image and epsilon; 0 disables
    std::size_t jobs = 1;
};

struct BenchmarkRow {
    std::size_t image_index = 0;
    std::size_t label = 0;
    bool candidate = false;
    double epsilon = 0.0;
    Verdict verdict = Verdict::Skipped;
    double elapsed_s = 0.0;
};

struct EpsilonSummary {
    double epsilon = 0.0;
    std::size_t candidates = 0;
    std::size_t verified = 0;
    std::size_t timeouts = 0;
    std::optional<double> precision; // verified / candidates; empty when there are no candidates
    double mean_time_s = 0.0;        // over candidates, analysis time only
};

struct VerdictReport {
    std::vector<BenchmarkRow> rows; // image-major, epsilons in the given order
    std::vector<EpsilonSummary> summaries;
    std::string mode;
    std::size_t sigma = 0;
    std::string tau;
};

/// Filters candidates with classify and verifies every candidate at every
/// epsilon on a pool of `jobs` worker threads. AnalysisError from any image
/// is rethrown after the pool drains.
[[nodiscard]]
VerdictReport run_benchmark(const NetworkSpec& net, const std::vector<DatasetRecord>& data,
                            const BenchmarkOptions& opts);

void write_report_csv(const VerdictReport& report, const std::filesystem::path& path);
[[nodiscard]]
nlohmann::json report_summary_json(const VerdictReport& report);

/// Named epsilon lists: mnist-fc, mnist-conv, cifar-fc, cifar-conv.
[[nodiscard]]
std::optional<std::vector<double>> epsilon_profile(std::string_view name);

[[nodiscard]]
std::string tau_to_string(const AnalyzerConfig& cfg);

} // namespace bbpoly
