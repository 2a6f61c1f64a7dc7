// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#include "bbpoly/analyzer.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "bbpoly/backsub.hpp"
#include "bbpoly/errors.hpp"
#include "bbpoly/state.hpp"
#include "bbpoly/summary.hpp"
#include "bbpoly/transformers.hpp"

namespace bbpoly {

std::string_view to_string(AnalysisMode mode) {
    switch (mode) {
    case AnalysisMode::DeepPoly: return "deeppoly";
    case AnalysisMode::BlockSummary: return "blocksum";
    case AnalysisMode::InputSummary: return "inputsum";
    }
    return "unknown";
}

std::optional<AnalysisMode> parse_mode(std::string_view text) {
    if (text == "deeppoly") {
        return AnalysisMode::DeepPoly;
    }
    if (text == "blocksum") {
        return AnalysisMode::BlockSummary;
    }
    if (text == "inputsum") {
        return AnalysisMode::InputSummary;
    }
    return std::nullopt;
}

namespace {

double gemm_flops(const Matrix& a, const Matrix& b) {
    return 2.0 * static_cast<double>(a.rows()) * static_cast<double>(a.cols()) * static_cast<double>(b.cols());
}

double step_flops(const ConstraintMatrix& cm, const ConstraintMatrix* substituted) {
    const double eval = 4.0 * static_cast<double>(cm.lower.rows()) * static_cast<double>(cm.lower.cols());
    if (substituted == nullptr) {
        return eval; // diagonal relu step costs about as much as an evaluation
    }
    return 2.0 * gemm_flops(cm.lower, substituted->lower) + eval;
}

} // namespace

AnalysisResult analyze(const NetworkSpec& net, const BoundsVector& input_bounds, const AnalyzerConfig& cfg,
                       const CancelCheck& cancel) {
    if (input_bounds.size() != net.input_width) {
        throw ShapeError(fmt::format("analyze: {} input intervals for an input of width {}", input_bounds.size(),
                                     net.input_width));
    }
    for (const auto& b : input_bounds) {
        if (!(b.lo <= b.hi)) {
            throw ShapeError("analyze: input interval with lo > hi");
        }
    }
    if (cfg.sigma == 0) {
        throw std::invalid_argument("analyze: sigma must be at least 1");
    }
    if (cfg.tau && *cfg.tau == 0) {
        throw std::invalid_argument("analyze: tau must be at least 1");
    }

    AnalysisResult result;
    result.input_bounds = input_bounds;
    result.segmentation =
        cfg.mode == AnalysisMode::DeepPoly ? single_block(net) : segment_network(net, cfg.sigma);
    const Segmentation& seg = result.segmentation;
    const SummaryScope scope = cfg.mode == AnalysisMode::InputSummary ? SummaryScope::Input : SummaryScope::BlockStart;
    std::size_t tau = std::numeric_limits<std::size_t>::max();
    if (cfg.mode == AnalysisMode::BlockSummary && cfg.tau) {
        tau = *cfg.tau;
    }

    const std::size_t layer_count = net.layers.size();
    AbstractState state(input_bounds, layer_count);
    const BoundsLookup bounds_of = state.bounds_lookup();
    result.steps_per_layer.assign(layer_count, 0);

    for (LayerIndex k = 0; k < static_cast<LayerIndex>(layer_count); ++k) {
        if (cancel && cancel()) {
            throw AnalysisCancelled();
        }
        if (net.layer(k).kind == LayerKind::Relu) {
            ReluAbstraction relu = relu_abstract(state.bounds(k - 1));
            state.store_relaxation(k, std::move(relu.relaxation));
            state.set_bounds(k, std::move(relu.bounds));
            result.peak_live_relaxations = std::max(result.peak_live_relaxations, state.live_relaxation_count());
            continue;
        }

        state.store_forms(k, layer_forms(net, k));
        ConstraintMatrix expr = state.forms(k);
        BoundsVector bounds = evaluate_concrete_bounds(expr, bounds_of, cfg.outward_slack);
        result.flops += step_flops(expr, nullptr);
        if (cfg.record_trace) {
            result.trace.push_back({k, 0, expr.reference, expr, bounds});
        }

        const std::size_t block_id = seg.block_id(k);
        const LayerIndex summary_ref = scope == SummaryScope::Input ? kInputLayer : seg.blocks[block_id].start;
        bool lacks_summary = seg.is_end_layer(k);
        auto maybe_store = [&] {
            if (lacks_summary && expr.reference == summary_ref && expr.side_terms.empty()) {
                store_summary(state, seg, block_id, expr, scope);
                if (cfg.record_trace) {
                    result.stored_summaries.push_back(*state.find_summary(k));
                }
                lacks_summary = false;
            }
        };
        // A one-layer block is already summarized by the layer's own forms.
        maybe_store();

        std::size_t counter = 0;
        while (expr.reference != kInputLayer) {
            const LayerIndex pre = expr.reference;
            if (seg.is_end_layer(pre)) {
                const BlockSummary& sum = read_summary(state, pre);
                result.flops += step_flops(expr, &sum.forms) + 2.0 * gemm_flops(expr.lower, sum.forms.lower);
                expr = backsub_summary(expr, sum);
            } else if (net.layer(pre).kind == LayerKind::Relu) {
                result.flops += step_flops(expr, nullptr);
                expr = backsub_relu(expr, state.relaxation(pre), pre);
            } else {
                const ConstraintMatrix& forms = state.forms(pre);
                result.flops += step_flops(expr, &forms);
                expr = backsub_affine(expr, forms);
            }
            ++counter;
            maybe_store();

            BoundsVector candidate = evaluate_concrete_bounds(expr, bounds_of, cfg.outward_slack);
            bounds = update_bounds(bounds, candidate);
            if (cfg.record_trace) {
                result.trace.push_back({k, counter, expr.reference, expr, std::move(candidate)});
            }
            if (counter >= tau && !lacks_summary) {
                break;
            }
        }
        if (lacks_summary) {
            throw AnalysisError(fmt::format("analyze: end layer {} finished without a summary", k));
        }
        state.set_bounds(k, std::move(bounds));
        if (cfg.step_budget_counters) {
            result.steps_per_layer[static_cast<std::size_t>(k)] = counter;
            result.total_steps += counter;
        }
        result.peak_retained_summaries = std::max(result.peak_retained_summaries, state.summaries().size());
        if (k == net.output_layer() && expr.reference == kInputLayer && expr.side_terms.empty()) {
            result.output_over_input = std::move(expr);
        }
    }

    result.layer_bounds.reserve(layer_count);
    for (LayerIndex k = 0; k < static_cast<LayerIndex>(layer_count); ++k) {
        result.layer_bounds.push_back(state.bounds(k));
    }
    result.peak_live_constraints = state.peak_live_constraints();
    return result;
}

AnalysisResult analyze_input_summary(const NetworkSpec& net, const BoundsVector& input_bounds, AnalyzerConfig cfg,
                                     const CancelCheck& cancel) {
    cfg.mode = AnalysisMode::InputSummary;
    return analyze(net, input_bounds, cfg, cancel);
}

} // namespace bbpoly
