// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "bbpoly/network.hpp"

namespace bbpoly {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]]
    double width() const { return hi - lo; }
    [[nodiscard]]
    bool contains(double x) const { return lo <= x && x <= hi; }
    [[nodiscard]]
    bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Concrete per-neuron bounds of one layer.
using BoundsVector = std::vector<Interval>;

/// Interval ∏[center_i - radius, center_i + radius].
[[nodiscard]]
BoundsVector box_around(const Vector& center, double radius);

/// coeffs · x + constant over the neurons of a reference layer.
struct LinearForm {
    std::vector<double> coeffs;
    double constant = 0.0;

    [[nodiscard]]
    double evaluate(const Vector& x) const;
};

/// Contribution of a residual skip branch that has not yet been merged back
/// into the main reference layer. Always exact, so it is tracked with the
/// same lower/upper split as the primary coefficients.
struct SideTerm {
    LayerIndex layer = kInputLayer;
    Matrix lower;
    Matrix upper;
};

/// Symbolic lower and upper bounds of every neuron of a subject layer,
/// expressed over the neurons of `reference` (plus any pending side terms):
///
///   lower.row(i) · x_ref + lower_const[i] + Σ side.lower.row(i) · x_side
///     <= x_i <=
///   upper.row(i) · x_ref + upper_const[i] + Σ side.upper.row(i) · x_side
struct ConstraintMatrix {
    LayerIndex reference = kInputLayer;
    Matrix lower;
    Vector lower_const;
    Matrix upper;
    Vector upper_const;
    std::vector<SideTerm> side_terms;

    [[nodiscard]]
    std::size_t rows() const { return static_cast<std::size_t>(lower.rows()); }
    [[nodiscard]]
    std::size_t reference_width() const { return static_cast<std::size_t>(lower.cols()); }

    [[nodiscard]]
    LinearForm lower_form(std::size_t neuron) const;
    [[nodiscard]]
    LinearForm upper_form(std::size_t neuron) const;

    [[nodiscard]]
    static ConstraintMatrix from_forms(LayerIndex reference, const std::vector<LinearForm>& lower,
                                       const std::vector<LinearForm>& upper);
    /// Identity forms over `reference`, i.e. x_i <= x_i <= x_i.
    [[nodiscard]]
    static ConstraintMatrix identity(LayerIndex reference, std::size_t width);
};

/// Throws ShapeError unless the lower/upper parts have consistent shapes.
void check_shape(const ConstraintMatrix& cm);

enum class ReluMode { Zero, Identity, Mixed };

/// Per-neuron linear relaxation of x_out = max(0, x_in):
///   lower_slope * x_in <= x_out <= upper_slope * x_in + upper_intercept.
struct ReluRelaxation {
    std::vector<ReluMode> mode;
    Vector lower_slope;
    Vector upper_slope;
    Vector upper_intercept;

    [[nodiscard]]
    std::size_t size() const { return mode.size(); }
};

using BoundsLookup = std::function<const BoundsVector&(LayerIndex)>;

/// Sign-rule evaluation of the forms: positive coefficients take the lower
/// reference bound for the lower form and the upper reference bound for the
/// upper form, negative coefficients the opposite. A positive
/// `outward_slack` widens each result by that fraction of its magnitude.
[[nodiscard]]
BoundsVector evaluate_concrete_bounds(const ConstraintMatrix& cm, const BoundsVector& ref_bounds,
                                      double outward_slack = 0.0);

/// Same, but side terms are evaluated over their own layers' bounds.
[[nodiscard]]
BoundsVector evaluate_concrete_bounds(const ConstraintMatrix& cm, const BoundsLookup& bounds_of,
                                      double outward_slack = 0.0);

/// Elementwise meet: larger lower bound, smaller upper bound. Throws
/// AnalysisError on a crossing beyond floating-point noise; a crossing
/// within 1e-9 relative is resolved to the enclosing pair [hi, lo].
[[nodiscard]]
BoundsVector update_bounds(const BoundsVector& current, const BoundsVector& candidate);

} // namespace bbpoly
