// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "bbpoly/network.hpp"

namespace bbpoly {

/// A contiguous run of layers ending at an affine layer.
///
/// `start` is the layer the block summary is expressed over: kInputLayer for
/// the first block, otherwise the Relu layer right after the previous
/// block's end. The block's own layers are [first_layer(), end].
struct Block {
    LayerIndex start = kInputLayer;
    LayerIndex end = 0;

    [[nodiscard]]
    LayerIndex first_layer() const { return start == kInputLayer ? 0 : start; }
    [[nodiscard]]
    bool contains(LayerIndex layer) const { return layer >= first_layer() && layer <= end; }
};

struct Segmentation {
    std::vector<Block> blocks;
    std::size_t sigma = 1;
    std::vector<std::size_t> block_of_layer; // one entry per network layer

    [[nodiscard]]
    const Block& block_of(LayerIndex layer) const { return blocks[block_of_layer.at(static_cast<std::size_t>(layer))]; }
    [[nodiscard]]
    std::size_t block_id(LayerIndex layer) const { return block_of_layer.at(static_cast<std::size_t>(layer)); }
    [[nodiscard]]
    bool is_end_layer(LayerIndex layer) const;
    [[nodiscard]]
    LayerIndex start_of(LayerIndex layer) const { return block_of(layer).start; }
};

/// Greedily packs `sigma` affine layers (Dense or ResidualAdd) per block.
///
/// A block may only end at an affine layer that is the last layer or is
/// followed by a Relu, so that every later block starts at a Relu. A block
/// may not end anywhere in [skip_from, add) of a residual unit: both
/// branches of the unit, and the layer they fork from, stay in one block.
/// Blocks grow past sigma affine layers when no valid end is available.
[[nodiscard]]
Segmentation segment_network(const NetworkSpec& net, std::size_t sigma);

/// The whole network as one block whose start is the input layer.
[[nodiscard]]
Segmentation single_block(const NetworkSpec& net);

} // namespace bbpoly
