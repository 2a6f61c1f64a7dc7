// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bbpoly/domain.hpp"
#include "bbpoly/network.hpp"

namespace bbpoly {

/// Exact forms of a Dense layer over its predecessor: lower = upper =
/// weights, constants = bias.
[[nodiscard]]
ConstraintMatrix affine_abstract(const LayerSpec& layer, LayerIndex index);

struct ReluAbstraction {
    ReluRelaxation relaxation;
    BoundsVector bounds;
};

/// Per neuron with source interval [l, u]:
///   u <= 0       Zero: both lines 0, output [0, 0]
///   l >= 0       Identity: both lines x, output [l, u]
///   otherwise    Mixed: lower c·x with c = 0 if |l| > |u| else 1,
///                upper u(x - l)/(u - l), output [0, u]
[[nodiscard]]
ReluAbstraction relu_abstract(const BoundsVector& src_bounds);

/// Exact forms x_out = x_pred + x_skip: identity over the predecessor plus
/// an identity side term on the skip layer.
[[nodiscard]]
ConstraintMatrix residual_add_abstract(const NetworkSpec& net, LayerIndex index);

/// The stored symbolic constraints of an affine layer (Dense or ResidualAdd).
[[nodiscard]]
ConstraintMatrix layer_forms(const NetworkSpec& net, LayerIndex index);

} // namespace bbpoly
