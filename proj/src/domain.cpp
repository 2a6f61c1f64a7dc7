// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#include "bbpoly/domain.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bbpoly/errors.hpp"

namespace bbpoly {

BoundsVector box_around(const Vector& center, double radius) {
    BoundsVector out(static_cast<std::size_t>(center.size()));
    for (Eigen::Index i = 0; i < center.size(); ++i) {
        out[static_cast<std::size_t>(i)] = {center[i] - radius, center[i] + radius};
    }
    return out;
}

double LinearForm::evaluate(const Vector& x) const {
    double v = constant;
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        v += coeffs[j] * x[static_cast<Eigen::Index>(j)];
    }
    return v;
}

namespace {

LinearForm row_form(const Matrix& m, const Vector& c, std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    LinearForm f;
    f.coeffs.assign(m.row(r).begin(), m.row(r).end());
    f.constant = c[r];
    return f;
}

void load_forms(const std::vector<LinearForm>& forms, Matrix& m, Vector& c, std::size_t width) {
    m.resize(static_cast<Eigen::Index>(forms.size()), static_cast<Eigen::Index>(width));
    c.resize(static_cast<Eigen::Index>(forms.size()));
    for (std::size_t i = 0; i < forms.size(); ++i) {
        if (forms[i].coeffs.size() != width) {
            throw ShapeError("constraint forms over differing reference widths");
        }
        for (std::size_t j = 0; j < width; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = forms[i].coeffs[j];
        }
        c[static_cast<Eigen::Index>(i)] = forms[i].constant;
    }
}

// Accumulates the constant first, then the terms in column order. The
// interval oracle uses the same order so the two agree bit for bit.
void accumulate(const Matrix& lower, const Matrix& upper, const BoundsVector& ref, BoundsVector& out) {
    if (static_cast<std::size_t>(lower.cols()) != ref.size()) {
        throw ShapeError(fmt::format("evaluate_concrete_bounds: forms over {} neurons, bounds for {}", lower.cols(),
                                     ref.size()));
    }
    for (Eigen::Index i = 0; i < lower.rows(); ++i) {
        double lo = out[static_cast<std::size_t>(i)].lo;
        double hi = out[static_cast<std::size_t>(i)].hi;
        for (Eigen::Index j = 0; j < lower.cols(); ++j) {
            const Interval& b = ref[static_cast<std::size_t>(j)];
            const double wl = lower(i, j);
            if (wl > 0) {
                lo += wl * b.lo;
            } else if (wl < 0) {
                lo += wl * b.hi;
            }
            const double wu = upper(i, j);
            if (wu > 0) {
                hi += wu * b.hi;
            } else if (wu < 0) {
                hi += wu * b.lo;
            }
        }
        out[static_cast<std::size_t>(i)] = {lo, hi};
    }
}

BoundsVector seed_constants(const ConstraintMatrix& cm) {
    BoundsVector out(cm.rows());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = {cm.lower_const[static_cast<Eigen::Index>(i)], cm.upper_const[static_cast<Eigen::Index>(i)]};
    }
    return out;
}

void apply_slack(BoundsVector& out, double slack) {
    if (slack <= 0) {
        return;
    }
    for (auto& b : out) {
        b.lo -= slack * std::abs(b.lo);
        b.hi += slack * std::abs(b.hi);
    }
}

} // namespace

LinearForm ConstraintMatrix::lower_form(std::size_t neuron) const { return row_form(lower, lower_const, neuron); }

LinearForm ConstraintMatrix::upper_form(std::size_t neuron) const { return row_form(upper, upper_const, neuron); }

ConstraintMatrix ConstraintMatrix::from_forms(LayerIndex reference, const std::vector<LinearForm>& lower,
                                              const std::vector<LinearForm>& upper) {
    if (lower.size() != upper.size()) {
        throw ShapeError("constraint matrix: lower and upper form counts differ");
    }
    const std::size_t width = lower.empty() ? 0 : lower.front().coeffs.size();
    ConstraintMatrix cm;
    cm.reference = reference;
    load_forms(lower, cm.lower, cm.lower_const, width);
    load_forms(upper, cm.upper, cm.upper_const, width);
    return cm;
}

ConstraintMatrix ConstraintMatrix::identity(LayerIndex reference, std::size_t width) {
    const auto n = static_cast<Eigen::Index>(width);
    ConstraintMatrix cm;
    cm.reference = reference;
    cm.lower = Matrix::Identity(n, n);
    cm.upper = Matrix::Identity(n, n);
    cm.lower_const = Vector::Zero(n);
    cm.upper_const = Vector::Zero(n);
    return cm;
}

void check_shape(const ConstraintMatrix& cm) {
    if (cm.lower.rows() != cm.upper.rows() || cm.lower.cols() != cm.upper.cols() ||
        cm.lower_const.size() != cm.lower.rows() || cm.upper_const.size() != cm.upper.rows()) {
        throw ShapeError("constraint matrix: inconsistent lower/upper shapes");
    }
    for (const auto& s : cm.side_terms) {
        if (s.lower.rows() != cm.lower.rows() || s.upper.rows() != cm.lower.rows() ||
            s.lower.cols() != s.upper.cols()) {
            throw ShapeError("constraint matrix: inconsistent side term shape");
        }
    }
}

BoundsVector evaluate_concrete_bounds(const ConstraintMatrix& cm, const BoundsVector& ref_bounds,
                                      double outward_slack) {
    if (!cm.side_terms.empty()) {
        throw AnalysisError("evaluate_concrete_bounds: pending residual terms need per-layer bounds");
    }
    check_shape(cm);
    BoundsVector out = seed_constants(cm);
    accumulate(cm.lower, cm.upper, ref_bounds, out);
    apply_slack(out, outward_slack);
    return out;
}

BoundsVector evaluate_concrete_bounds(const ConstraintMatrix& cm, const BoundsLookup& bounds_of,
                                      double outward_slack) {
    check_shape(cm);
    BoundsVector out = seed_constants(cm);
    accumulate(cm.lower, cm.upper, bounds_of(cm.reference), out);
    for (const auto& s : cm.side_terms) {
        accumulate(s.lower, s.upper, bounds_of(s.layer), out);
    }
    apply_slack(out, outward_slack);
    return out;
}

BoundsVector update_bounds(const BoundsVector& current, const BoundsVector& candidate) {
    if (current.size() != candidate.size()) {
        throw ShapeError(fmt::format("update_bounds: widths {} and {} differ", current.size(), candidate.size()));
    }
    BoundsVector out(current.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (std::isnan(candidate[i].lo) || std::isnan(candidate[i].hi)) {
            throw AnalysisError(fmt::format("update_bounds: neuron {} has a NaN bound", i));
        }
        double lo = std::max(current[i].lo, candidate[i].lo);
        double hi = std::min(current[i].hi, candidate[i].hi);
        if (lo > hi) {
            const double tol = 1e-9 * std::max({1.0, std::abs(lo), std::abs(hi)});
            if (lo - hi > tol) {
                throw AnalysisError(fmt::format("update_bounds: neuron {} crossed: [{}, {}] meet [{}, {}]", i,
                                                current[i].lo, current[i].hi, candidate[i].lo, candidate[i].hi));
            }
            std::swap(lo, hi);
        }
        out[i] = {lo, hi};
    }
    return out;
}

} // namespace bbpoly
