// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#include "bbpoly/segmentation.hpp"

#include <algorithm>
#include <stdexcept>

namespace bbpoly {

bool Segmentation::is_end_layer(LayerIndex layer) const {
    if (layer == kInputLayer) {
        return false;
    }
    return block_of(layer).end == layer;
}

namespace {

Segmentation finish(std::vector<Block> blocks, std::size_t sigma, std::size_t layer_count) {
    Segmentation seg;
    seg.sigma = sigma;
    seg.block_of_layer.assign(layer_count, 0);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (LayerIndex l = blocks[b].first_layer(); l <= blocks[b].end; ++l) {
            seg.block_of_layer[static_cast<std::size_t>(l)] = b;
        }
    }
    seg.blocks = std::move(blocks);
    return seg;
}

} // namespace

Segmentation segment_network(const NetworkSpec& net, std::size_t sigma) {
    if (sigma == 0) {
        throw std::invalid_argument("segment_network: sigma must be at least 1");
    }
    const auto n = static_cast<LayerIndex>(net.layers.size());

    std::vector<bool> can_end(net.layers.size(), false);
    for (LayerIndex i = 0; i < n; ++i) {
        can_end[static_cast<std::size_t>(i)] =
            net.layer(i).is_affine() && (i == n - 1 || net.layer(i + 1).kind == LayerKind::Relu);
    }
    for (LayerIndex i = 0; i < n; ++i) {
        const LayerSpec& l = net.layer(i);
        if (l.kind != LayerKind::ResidualAdd) {
            continue;
        }
        for (LayerIndex b = std::max<LayerIndex>(l.skip_from, 0); b < i; ++b) {
            can_end[static_cast<std::size_t>(b)] = false;
        }
    }

    std::vector<Block> blocks;
    LayerIndex start = kInputLayer;
    std::size_t affine = 0;
    for (LayerIndex i = 0; i < n; ++i) {
        if (!net.layer(i).is_affine()) {
            continue;
        }
        ++affine;
        if (i == n - 1 || (affine >= sigma && can_end[static_cast<std::size_t>(i)])) {
            blocks.push_back({start, i});
            start = i + 1;
            affine = 0;
        }
    }
    return finish(std::move(blocks), sigma, net.layers.size());
}

Segmentation single_block(const NetworkSpec& net) {
    return finish({Block{kInputLayer, net.output_layer()}}, net.affine_layer_count(), net.layers.size());
}

} // namespace bbpoly
