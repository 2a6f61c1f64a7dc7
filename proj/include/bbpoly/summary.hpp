// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include <json.hpp>

#include "bbpoly/segmentation.hpp"
#include "bbpoly/state.hpp"

namespace bbpoly {

/// What a block summary is expressed over.
enum class SummaryScope {
    BlockStart, // the block's own start layer
    Input,      // the network input; earlier summaries become unreachable
};

/// Records `forms` as the summary of block `block_id`, then releases the
/// block's intermediates. Throws AnalysisError if the block already has a
/// summary or the forms reference the wrong layer.
void store_summary(AbstractState& state, const Segmentation& seg, std::size_t block_id, ConstraintMatrix forms,
                   SummaryScope scope);

/// Drops symbolic artifacts no later layer can reach. BlockStart scope keeps
/// the relaxation of the block's start layer, which later layers cross on
/// their way to the previous block. Input scope drops everything of the
/// block and every summary of earlier blocks. Bounds are always kept.
/// Calling it twice is a no-op.
void release_intermediates(AbstractState& state, const Segmentation& seg, std::size_t block_id, SummaryScope scope);

/// Throws AnalysisError when no summary ends at `end_layer`.
[[nodiscard]]
const BlockSummary& read_summary(const AbstractState& state, LayerIndex end_layer);

/// {"block_id", "end_layer", "start_layer", "lower": [{"coeffs", "constant"}], "upper": [...]}.
[[nodiscard]]
nlohmann::json summary_to_json(const BlockSummary& summary);

} // namespace bbpoly
