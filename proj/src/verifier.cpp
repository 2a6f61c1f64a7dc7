// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#include "bbpoly/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "bbpoly/errors.hpp"

namespace bbpoly {

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::Verified: return "verified";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::Timeout: return "timeout";
    case Verdict::Skipped: return "skipped";
    }
    return "unknown";
}

std::string_view to_string(CheckMethod m) { return m == CheckMethod::Difference ? "difference" : "bound-compare"; }

std::optional<CheckMethod> parse_check(std::string_view text) {
    if (text == "difference") {
        return CheckMethod::Difference;
    }
    if (text == "bound-compare") {
        return CheckMethod::BoundCompare;
    }
    return std::nullopt;
}

BoundsVector build_region(const RobustnessQuery& q, const NetworkSpec& net) {
    BoundsVector region = box_around(q.record.pixels, q.epsilon);
    if (q.clip) {
        for (auto& b : region) {
            b.lo = std::clamp(b.lo, net.input_domain.lo, net.input_domain.hi);
            b.hi = std::clamp(b.hi, net.input_domain.lo, net.input_domain.hi);
        }
    }
    return region;
}

std::size_t classify(const NetworkSpec& net, const Vector& pixels) {
    const Vector out = forward(net, pixels).back();
    std::size_t best = 0;
    for (Eigen::Index i = 1; i < out.size(); ++i) {
        if (out[i] > out[static_cast<Eigen::Index>(best)]) {
            best = static_cast<std::size_t>(i);
        }
    }
    return best;
}

NetworkSpec difference_network(const NetworkSpec& net, std::size_t target) {
    const std::size_t m = net.output_width();
    if (target >= m) {
        throw ShapeError(fmt::format("difference_network: target {} but only {} outputs", target, m));
    }
    NetworkSpec out = net;
    LayerSpec& last = out.layers.back();
    const Matrix& w = net.layers.back().weights;
    const Vector& b = net.layers.back().bias;
    const auto rows = static_cast<Eigen::Index>(m);
    const auto t = static_cast<Eigen::Index>(target);
    last.weights.resize(2 * rows - 1, w.cols());
    last.bias.resize(2 * rows - 1);
    last.weights.topRows(rows) = w;
    last.bias.head(rows) = b;
    Eigen::Index r = rows;
    for (Eigen::Index j = 0; j < rows; ++j) {
        if (j == t) {
            continue;
        }
        last.weights.row(r) = w.row(t) - w.row(j);
        last.bias[r] = b[t] - b[j];
        ++r;
    }
    return out;
}

VerifyOutcome verify_robustness(const NetworkSpec& net, const RobustnessQuery& q, const AnalyzerConfig& cfg,
                                CheckMethod check, double timeout_s) {
    using Clock = std::chrono::steady_clock;
    const std::size_t m = net.output_width();
    const std::size_t target = q.record.label;
    if (target >= m) {
        throw ShapeError(fmt::format("verify_robustness: label {} but only {} outputs", target, m));
    }
    const BoundsVector region = build_region(q, net);

    const auto t0 = Clock::now();
    CancelCheck cancel;
    if (timeout_s > 0) {
        const auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(timeout_s));
        cancel = [deadline] { return Clock::now() >= deadline; };
    }

    VerifyOutcome outcome;
    AnalysisResult result;
    try {
        result = check == CheckMethod::Difference ? analyze(difference_network(net, target), region, cfg, cancel)
                                                  : analyze(net, region, cfg, cancel);
    } catch (const AnalysisCancelled&) {
        outcome.verdict = Verdict::Timeout;
        outcome.elapsed_s = std::chrono::duration<double>(Clock::now() - t0).count();
        return outcome;
    }
    outcome.elapsed_s = std::chrono::duration<double>(Clock::now() - t0).count();

    const BoundsVector& out = result.output_bounds();
    bool all = true;
    std::size_t diff_row = m;
    for (std::size_t j = 0; j < m; ++j) {
        if (j == target) {
            continue;
        }
        double margin = out[target].lo - out[j].hi;
        if (check == CheckMethod::Difference) {
            margin = std::max(margin, out[diff_row++].lo);
        }
        outcome.margins.push_back(margin);
        all = all && margin > 0;
    }
    outcome.verdict = all ? Verdict::Verified : Verdict::Inconclusive;
    return outcome;
}

namespace {

struct Task {
    std::size_t row;
    RobustnessQuery query;
};

} // namespace

VerdictReport run_benchmark(const NetworkSpec& net, const std::vector<DatasetRecord>& data,
                            const BenchmarkOptions& opts) {
    VerdictReport report;
    report.mode = std::string(to_string(opts.config.mode));
    report.sigma = opts.config.sigma;
    report.tau = tau_to_string(opts.config);

    std::vector<Task> tasks;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (static_cast<std::size_t>(data[i].pixels.size()) != net.input_width) {
            throw ShapeError(fmt::format("image {} has {} pixels, network expects {}", i, data[i].pixels.size(),
                                         net.input_width));
        }
        const bool candidate = data[i].label < net.output_width() && classify(net, data[i].pixels) == data[i].label;
        for (double eps : opts.epsilons) {
            if (candidate) {
                tasks.push_back({report.rows.size(), {data[i], eps, opts.clip}});
            }
            report.rows.push_back({i, data[i].label, candidate, eps, Verdict::Skipped, 0.0});
        }
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t t = next++; t < tasks.size() && !failed; t = next++) {
            try {
                const VerifyOutcome o =
                    verify_robustness(net, tasks[t].query, opts.config, opts.check, opts.timeout_s);
                BenchmarkRow& row = report.rows[tasks[t].row]; // each row is written by one task only
                row.verdict = o.verdict;
                row.elapsed_s = o.elapsed_s;
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                failed = true;
            }
        }
    };
    const std::size_t jobs = std::max<std::size_t>(1, std::min(opts.jobs, tasks.size()));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j) {
            pool.emplace_back(worker);
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }

    for (double eps : opts.epsilons) {
        EpsilonSummary s;
        s.epsilon = eps;
        double total = 0.0;
        for (const auto& row : report.rows) {
            if (row.epsilon != eps || !row.candidate) {
                continue;
            }
            ++s.candidates;
            s.verified += row.verdict == Verdict::Verified ? 1 : 0;
            s.timeouts += row.verdict == Verdict::Timeout ? 1 : 0;
            total += row.elapsed_s;
        }
        if (s.candidates > 0) {
            s.precision = static_cast<double>(s.verified) / static_cast<double>(s.candidates);
            s.mean_time_s = total / static_cast<double>(s.candidates);
        }
        report.summaries.push_back(s);
    }
    return report;
}

void write_report_csv(const VerdictReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << "image_index,label,candidate,epsilon,verdict,elapsed_s,mode,sigma,tau\n";
    for (const auto& r : report.rows) {
        out << fmt::format("{},{},{},{},{},{:.6f},{},{},{}\n", r.image_index, r.label, r.candidate ? 1 : 0, r.epsilon,
                           to_string(r.verdict), r.elapsed_s, report.mode, report.sigma, report.tau);
    }
    if (!out) {
        throw std::runtime_error("write to " + path.string() + " failed");
    }
}

nlohmann::json report_summary_json(const VerdictReport& report) {
    nlohmann::json eps = nlohmann::json::array();
    for (const auto& s : report.summaries) {
        eps.push_back({
            {"epsilon", s.epsilon},
            {"candidates", s.candidates},
            {"verified", s.verified},
            {"timeouts", s.timeouts},
            {"precision", s.precision ? nlohmann::json(*s.precision) : nlohmann::json(nullptr)},
            {"mean_time_s", s.mean_time_s},
        });
    }
    std::size_t images = 0;
    for (const auto& r : report.rows) {
        images = std::max(images, r.image_index + 1);
    }
    return {{"mode", report.mode}, {"sigma", report.sigma}, {"tau", report.tau}, {"images", images},
            {"epsilons", eps}};
}

std::optional<std::vector<double>> epsilon_profile(std::string_view name) {
    if (name == "mnist-fc") {
        return std::vector<double>{0.005, 0.01, 0.015, 0.02, 0.025, 0.03};
    }
    if (name == "mnist-conv") {
        return std::vector<double>{0.02, 0.04, 0.06, 0.08, 0.1, 0.12};
    }
    if (name == "cifar-fc") {
        return std::vector<double>{0.0002, 0.0004, 0.0006, 0.0008, 0.001, 0.0012};
    }
    if (name == "cifar-conv") {
        return std::vector<double>{0.002, 0.004, 0.006, 0.008, 0.01, 0.012};
    }
    return std::nullopt;
}

std::string tau_to_string(const AnalyzerConfig& cfg) {
    if (cfg.mode != AnalysisMode::BlockSummary || !cfg.tau) {
        return "unbounded";
    }
    return std::to_string(*cfg.tau);
}

} // namespace bbpoly
