// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "bbpoly/domain.hpp"
#include "bbpoly/network.hpp"
#include "bbpoly/segmentation.hpp"
#include "bbpoly/state.hpp"

namespace bbpoly {

enum class AnalysisMode {
    DeepPoly,     // one block, unbounded back-substitution to the input
    BlockSummary, // summaries over each block's start, bounded by tau
    InputSummary, // summaries over the network input, no tau
};

[[nodiscard]]
std::string_view to_string(AnalysisMode mode);
[[nodiscard]]
std::optional<AnalysisMode> parse_mode(std::string_view text);

struct AnalyzerConfig {
    AnalysisMode mode = AnalysisMode::BlockSummary;
    std::size_t sigma = 3;
    /// Back-substitution steps per affine layer; nullopt is unbounded. A step
    /// is one layer (affine or ReLU) or one summary jump.
    std::optional<std::size_t> tau;
    double outward_slack = 0.0;
    bool step_budget_counters = true;
    /// Keep every intermediate form, candidate bound and stored summary.
    bool record_trace = false;
};

/// One evaluation of a layer's forms during back-substitution.
struct TraceEntry {
    LayerIndex layer = 0;
    std::size_t step = 0;
    LayerIndex reference = kInputLayer;
    ConstraintMatrix forms;
    BoundsVector candidate;
};

struct AnalysisResult {
    BoundsVector input_bounds;
    std::vector<BoundsVector> layer_bounds;
    Segmentation segmentation;
    /// Final forms of the output layer when back-substitution reached the input.
    std::optional<ConstraintMatrix> output_over_input;
    std::vector<std::size_t> steps_per_layer;
    std::size_t total_steps = 0;
    double flops = 0.0;
    std::size_t peak_live_constraints = 0;
    std::size_t peak_live_relaxations = 0;
    std::size_t peak_retained_summaries = 0; // summaries alive between layers
    std::vector<TraceEntry> trace;
    std::vector<BlockSummary> stored_summaries; // filled only with record_trace

    [[nodiscard]]
    const BoundsVector& output_bounds() const { return layer_bounds.back(); }
};

/// Returns true when the analysis should stop; checked between layers.
using CancelCheck = std::function<bool()>;

/// Layer-by-layer abstract interpretation with block summaries and bounded
/// back-substitution. Every affine layer starts from its own forms over its
/// predecessor, then back-substitutes one step at a time (a summary jump when
/// the current reference is a block end), meeting the evaluated bounds after
/// every step. End layers store their block summary when the reference
/// reaches the block start (or the input, for InputSummary) and are exempt
/// from tau until then.
[[nodiscard]]
AnalysisResult analyze(const NetworkSpec& net, const BoundsVector& input_bounds, const AnalyzerConfig& cfg,
                       const CancelCheck& cancel = {});

/// analyze() with mode forced to InputSummary.
[[nodiscard]]
AnalysisResult analyze_input_summary(const NetworkSpec& net, const BoundsVector& input_bounds, AnalyzerConfig cfg,
                                     const CancelCheck& cancel = {});

} // namespace bbpoly
