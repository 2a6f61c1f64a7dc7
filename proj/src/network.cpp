// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#include "bbpoly/network.hpp"

#include <string>

#include "bbpoly/errors.hpp"

namespace bbpoly {

std::string_view to_string(LayerKind kind) {
    switch (kind) {
    case LayerKind::Dense: return "dense";
    case LayerKind::Relu: return "relu";
    case LayerKind::ResidualAdd: return "residual_add";
    }
    return "unknown";
}

LayerSpec LayerSpec::dense(Matrix weights, Vector bias) {
    LayerSpec l;
    l.kind = LayerKind::Dense;
    l.weights = std::move(weights);
    l.bias = std::move(bias);
    return l;
}

LayerSpec LayerSpec::relu() {
    LayerSpec l;
    l.kind = LayerKind::Relu;
    return l;
}

LayerSpec LayerSpec::residual_add(LayerIndex skip_from) {
    LayerSpec l;
    l.kind = LayerKind::ResidualAdd;
    l.skip_from = skip_from;
    return l;
}

std::size_t NetworkSpec::width(LayerIndex index) const {
    // Relu and ResidualAdd inherit the width of their predecessor.
    while (index != kInputLayer) {
        const LayerSpec& l = layer(index);
        if (l.kind == LayerKind::Dense) {
            return static_cast<std::size_t>(l.weights.rows());
        }
        --index;
    }
    return input_width;
}

std::size_t NetworkSpec::affine_layer_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) {
        n += l.is_affine() ? 1 : 0;
    }
    return n;
}

void validate_network(const NetworkSpec& net) {
    auto fail = [](LayerIndex i, const std::string& what) {
        throw ShapeError("layer " + std::to_string(i) + ": " + what);
    };
    if (net.input_width == 0) {
        throw ShapeError("input_width must be positive");
    }
    if (!(net.input_domain.lo <= net.input_domain.hi)) {
        throw ShapeError("input_domain lower end exceeds upper end");
    }
    if (net.layers.empty()) {
        throw ShapeError("network has no layers");
    }
    for (LayerIndex i = 0; i <= net.output_layer(); ++i) {
        const LayerSpec& l = net.layer(i);
        const std::size_t pred_width = net.width(i - 1);
        switch (l.kind) {
        case LayerKind::Dense:
            if (l.weights.rows() == 0) {
                fail(i, "dense layer has no neurons");
            }
            if (l.weights.rows() != l.bias.size()) {
                fail(i, "bias length " + std::to_string(l.bias.size()) + " != weight rows " +
                            std::to_string(l.weights.rows()));
            }
            if (static_cast<std::size_t>(l.weights.cols()) != pred_width) {
                fail(i, "weight cols " + std::to_string(l.weights.cols()) + " != predecessor width " +
                            std::to_string(pred_width));
            }
            break;
        case LayerKind::Relu:
            if (i == 0 || !net.layer(i - 1).is_affine()) {
                fail(i, "relu must follow a dense or residual_add layer");
            }
            break;
        case LayerKind::ResidualAdd:
            if (l.skip_from < kInputLayer || l.skip_from >= i - 1) {
                fail(i, "skip_from must name an earlier layer than the predecessor");
            }
            if (net.width(l.skip_from) != pred_width) {
                fail(i, "skip branch width " + std::to_string(net.width(l.skip_from)) +
                            " != main branch width " + std::to_string(pred_width));
            }
            break;
        }
    }
    if (net.layers.back().kind != LayerKind::Dense) {
        throw ShapeError("final layer must be dense");
    }
}

std::vector<Vector> forward(const NetworkSpec& net, const Vector& input) {
    if (static_cast<std::size_t>(input.size()) != net.input_width) {
        throw ShapeError("forward: input has " + std::to_string(input.size()) + " values, expected " +
                         std::to_string(net.input_width));
    }
    std::vector<Vector> out;
    out.reserve(net.layers.size());
    auto value = [&](LayerIndex i) -> const Vector& {
        return i == kInputLayer ? input : out[static_cast<std::size_t>(i)];
    };
    for (LayerIndex i = 0; i <= net.output_layer(); ++i) {
        const LayerSpec& l = net.layer(i);
        switch (l.kind) {
        case LayerKind::Dense: out.push_back(l.weights * value(i - 1) + l.bias); break;
        case LayerKind::Relu: out.push_back(value(i - 1).cwiseMax(0.0)); break;
        case LayerKind::ResidualAdd: out.push_back(value(i - 1) + value(l.skip_from)); break;
        }
    }
    return out;
}

} // namespace bbpoly
