// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bbpoly/domain.hpp"
#include "bbpoly/network.hpp"
#include "bbpoly/state.hpp"

namespace bbpoly {

// Each step rewrites `cm`, currently over layer k, into forms over an
// earlier layer. In the matrix view the new coefficients are cm's
// coefficients multiplied on the right by the substituted layer's forms;
// constants are threaded through every step.

/// Substitutes the exact forms of affine layer k (Dense or ResidualAdd).
/// A ResidualAdd contributes a side term on its skip layer. The result is
/// exact, so lower and upper are composed independently.
[[nodiscard]]
ConstraintMatrix backsub_affine(const ConstraintMatrix& cm, const ConstraintMatrix& layer_forms);

/// Substitutes the relaxation of ReLU layer `relu_layer`: for the lower form
/// a positive coefficient takes the neuron's lower line and a negative one
/// its upper line; the upper form takes the opposite lines.
[[nodiscard]]
ConstraintMatrix backsub_relu(const ConstraintMatrix& cm, const ReluRelaxation& relaxation, LayerIndex relu_layer);

/// Jumps over a whole block with the same sign rule, using the summary's
/// dense lower/upper forms. The result references summary.start_layer.
[[nodiscard]]
ConstraintMatrix backsub_summary(const ConstraintMatrix& cm, const BlockSummary& summary);

/// Rewrites forms over a ResidualAdd layer into forms over the unit's entry
/// layer (its skip source) by walking the main branch layer by layer and
/// adding the skip contribution when the walk reaches the entry.
[[nodiscard]]
ConstraintMatrix backsub_residual(const ConstraintMatrix& cm, const NetworkSpec& net, const AbstractState& state);

/// Folds every side term that sits on cm.reference into the primary
/// coefficients.
void merge_side_terms(ConstraintMatrix& cm);

} // namespace bbpoly
