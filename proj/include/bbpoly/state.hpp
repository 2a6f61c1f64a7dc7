// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "bbpoly/domain.hpp"

namespace bbpoly {

/// Lower/upper forms of a block's end-layer neurons over the block's start
/// layer (or over the network input, for summaries over the input).
struct BlockSummary {
    std::size_t block_id = 0;
    LayerIndex end_layer = 0;
    LayerIndex start_layer = kInputLayer;
    ConstraintMatrix forms;
};

/// Everything one analysis keeps between layers.
///
/// Concrete bounds are kept for every finished layer. Symbolic artifacts
/// (affine forms, ReLU relaxations, block summaries) may be dropped once no
/// later layer can reach them; the live ConstraintMatrix count covers the
/// stored affine forms plus the stored summaries, and its maximum is
/// tracked for the memory checks.
class AbstractState {
  public:
    AbstractState(BoundsVector input_bounds, std::size_t layer_count);

    [[nodiscard]]
    const BoundsVector& bounds(LayerIndex layer) const;
    [[nodiscard]]
    bool has_bounds(LayerIndex layer) const;
    void set_bounds(LayerIndex layer, BoundsVector bounds);
    [[nodiscard]]
    BoundsLookup bounds_lookup() const;

    void store_forms(LayerIndex layer, ConstraintMatrix forms);
    [[nodiscard]]
    bool has_forms(LayerIndex layer) const;
    [[nodiscard]]
    const ConstraintMatrix& forms(LayerIndex layer) const;
    void release_forms(LayerIndex layer);

    void store_relaxation(LayerIndex layer, ReluRelaxation relaxation);
    [[nodiscard]]
    bool has_relaxation(LayerIndex layer) const;
    [[nodiscard]]
    const ReluRelaxation& relaxation(LayerIndex layer) const;
    void release_relaxation(LayerIndex layer);

    void insert_summary(BlockSummary summary);
    [[nodiscard]]
    const BlockSummary* find_summary(LayerIndex end_layer) const;
    void erase_summary(LayerIndex end_layer);
    [[nodiscard]]
    const std::map<LayerIndex, BlockSummary>& summaries() const { return summaries_; }

    [[nodiscard]]
    std::size_t live_constraint_count() const { return live_forms_ + summaries_.size(); }
    [[nodiscard]]
    std::size_t live_relaxation_count() const { return live_relaxations_; }
    [[nodiscard]]
    std::size_t peak_live_constraints() const { return peak_live_; }

    [[nodiscard]]
    std::size_t layer_count() const { return bounds_.size(); }

  private:
    void check_layer(LayerIndex layer, const char* what) const;
    void note_peak();

    BoundsVector input_bounds_;
    std::vector<std::optional<BoundsVector>> bounds_;
    std::vector<std::optional<ConstraintMatrix>> forms_;
    std::vector<std::optional<ReluRelaxation>> relaxations_;
    std::map<LayerIndex, BlockSummary> summaries_;
    std::size_t live_forms_ = 0;
    std::size_t live_relaxations_ = 0;
    std::size_t peak_live_ = 0;
};

} // namespace bbpoly
