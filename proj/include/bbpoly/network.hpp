// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace bbpoly {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Position of a layer in NetworkSpec::layers. The network input is not a
/// member of that list and is addressed as kInputLayer.
using LayerIndex = int;
inline constexpr LayerIndex kInputLayer = -1;

enum class LayerKind { Dense, Relu, ResidualAdd };

[[nodiscard]]
std::string_view to_string(LayerKind kind);

struct LayerSpec {
    LayerKind kind = LayerKind::Dense;
    Matrix weights; // Dense: rows = own neurons, cols = predecessor neurons
    Vector bias;    // Dense
    LayerIndex skip_from = kInputLayer; // ResidualAdd: added to the predecessor

    static LayerSpec dense(Matrix weights, Vector bias);
    static LayerSpec relu();
    static LayerSpec residual_add(LayerIndex skip_from);

    [[nodiscard]]
    bool is_affine() const { return kind != LayerKind::Relu; }
};

struct InputDomain {
    double lo = 0.0;
    double hi = 1.0;
};

/// A feed-forward ReLU network. Dense and ResidualAdd layers are the affine
/// layers; every hidden affine layer is normally followed by a Relu layer and
/// the final layer is Dense.
struct NetworkSpec {
    std::size_t input_width = 0;
    InputDomain input_domain;
    std::vector<LayerSpec> layers;

    [[nodiscard]]
    std::size_t width(LayerIndex layer) const;
    [[nodiscard]]
    LayerIndex output_layer() const { return static_cast<LayerIndex>(layers.size()) - 1; }
    [[nodiscard]]
    std::size_t output_width() const { return width(output_layer()); }
    [[nodiscard]]
    std::size_t affine_layer_count() const;
    [[nodiscard]]
    const LayerSpec& layer(LayerIndex index) const { return layers.at(static_cast<std::size_t>(index)); }
};

/// Throws ShapeError unless the layer list chains consistently.
void validate_network(const NetworkSpec& net);

/// Exact forward pass. Entry i holds the output of layer i.
[[nodiscard]]
std::vector<Vector> forward(const NetworkSpec& net, const Vector& input);

} // namespace bbpoly
