// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#include "bbpoly/transformers.hpp"

#include <cmath>
#include <string>

#include "bbpoly/errors.hpp"

namespace bbpoly {

ConstraintMatrix affine_abstract(const LayerSpec& layer, LayerIndex index) {
    if (layer.kind != LayerKind::Dense) {
        throw ShapeError("affine_abstract: layer " + std::to_string(index) + " is not dense");
    }
    ConstraintMatrix cm;
    cm.reference = index - 1;
    cm.lower = layer.weights;
    cm.upper = layer.weights;
    cm.lower_const = layer.bias;
    cm.upper_const = layer.bias;
    return cm;
}

ReluAbstraction relu_abstract(const BoundsVector& src) {
    const auto n = static_cast<Eigen::Index>(src.size());
    ReluAbstraction out;
    ReluRelaxation& r = out.relaxation;
    r.mode.resize(src.size());
    r.lower_slope = Vector::Zero(n);
    r.upper_slope = Vector::Zero(n);
    r.upper_intercept = Vector::Zero(n);
    out.bounds.resize(src.size());

    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double l = src[k].lo;
        const double u = src[k].hi;
        if (u <= 0) {
            r.mode[k] = ReluMode::Zero;
            out.bounds[k] = {0.0, 0.0};
        } else if (l >= 0) {
            r.mode[k] = ReluMode::Identity;
            r.lower_slope[i] = 1.0;
            r.upper_slope[i] = 1.0;
            out.bounds[k] = {l, u};
        } else {
            r.mode[k] = ReluMode::Mixed;
            // ties go to c = 1
            r.lower_slope[i] = std::abs(l) > std::abs(u) ? 0.0 : 1.0;
            r.upper_slope[i] = u / (u - l);
            r.upper_intercept[i] = -u * l / (u - l);
            out.bounds[k] = {0.0, u};
        }
    }
    return out;
}

ConstraintMatrix residual_add_abstract(const NetworkSpec& net, LayerIndex index) {
    const LayerSpec& layer = net.layer(index);
    if (layer.kind != LayerKind::ResidualAdd) {
        throw ShapeError("residual_add_abstract: layer " + std::to_string(index) + " is not residual_add");
    }
    const std::size_t width = net.width(index - 1);
    if (net.width(layer.skip_from) != width) {
        throw ShapeError("residual_add_abstract: branch widths differ at layer " + std::to_string(index));
    }
    ConstraintMatrix cm = ConstraintMatrix::identity(index - 1, width);
    const auto n = static_cast<Eigen::Index>(width);
    cm.side_terms.push_back({layer.skip_from, Matrix::Identity(n, n), Matrix::Identity(n, n)});
    return cm;
}

ConstraintMatrix layer_forms(const NetworkSpec& net, LayerIndex index) {
    const LayerSpec& layer = net.layer(index);
    switch (layer.kind) {
    case LayerKind::Dense: return affine_abstract(layer, index);
    case LayerKind::ResidualAdd: return residual_add_abstract(net, index);
    case LayerKind::Relu: break;
    }
    throw ShapeError("layer_forms: layer " + std::to_string(index) + " is a relu");
}

} // namespace bbpoly
