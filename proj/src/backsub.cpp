// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#include "bbpoly/backsub.hpp"

#include <cassert>

#include <fmt/format.h>

#include "bbpoly/errors.hpp"
#include "bbpoly/transformers.hpp"

namespace bbpoly {

namespace {

void add_side_term(std::vector<SideTerm>& terms, SideTerm term) {
    for (auto& t : terms) {
        if (t.layer == term.layer) {
            t.lower += term.lower;
            t.upper += term.upper;
            return;
        }
    }
    terms.push_back(std::move(term));
}

void expect_reference(const ConstraintMatrix& cm, LayerIndex expected, const char* op) {
    if (cm.reference != expected) {
        throw AnalysisError(fmt::format("{}: forms reference layer {}, expected {}", op, cm.reference, expected));
    }
}

} // namespace

void merge_side_terms(ConstraintMatrix& cm) {
    for (auto it = cm.side_terms.begin(); it != cm.side_terms.end();) {
        if (it->layer == cm.reference) {
            cm.lower += it->lower;
            cm.upper += it->upper;
            it = cm.side_terms.erase(it);
        } else {
            if (it->layer > cm.reference) {
                throw AnalysisError(fmt::format("residual term on layer {} was skipped by back-substitution to {}",
                                                it->layer, cm.reference));
            }
            ++it;
        }
    }
}

ConstraintMatrix backsub_affine(const ConstraintMatrix& cm, const ConstraintMatrix& layer_forms) {
    expect_reference(cm, layer_forms.reference + 1, "backsub_affine");
    if (cm.reference_width() != layer_forms.rows()) {
        throw ShapeError(fmt::format("backsub_affine: forms over {} neurons, layer has {}", cm.reference_width(),
                                     layer_forms.rows()));
    }
    assert(layer_forms.lower == layer_forms.upper && layer_forms.lower_const == layer_forms.upper_const);

    ConstraintMatrix out;
    out.reference = layer_forms.reference;
    if (layer_forms.lower.isIdentity(0.0)) {
        out.lower = cm.lower;
        out.upper = cm.upper;
    } else {
        out.lower.noalias() = cm.lower * layer_forms.lower;
        out.upper.noalias() = cm.upper * layer_forms.upper;
    }
    out.lower_const = cm.lower_const + cm.lower * layer_forms.lower_const;
    out.upper_const = cm.upper_const + cm.upper * layer_forms.upper_const;
    out.side_terms = cm.side_terms;
    for (const auto& s : layer_forms.side_terms) {
        if (s.lower.isIdentity(0.0)) {
            add_side_term(out.side_terms, {s.layer, cm.lower, cm.upper});
        } else {
            add_side_term(out.side_terms, {s.layer, cm.lower * s.lower, cm.upper * s.upper});
        }
    }
    merge_side_terms(out);
    return out;
}

ConstraintMatrix backsub_relu(const ConstraintMatrix& cm, const ReluRelaxation& relax, LayerIndex relu_layer) {
    expect_reference(cm, relu_layer, "backsub_relu");
    if (cm.reference_width() != relax.size()) {
        throw ShapeError(fmt::format("backsub_relu: forms over {} neurons, relaxation has {}", cm.reference_width(),
                                     relax.size()));
    }
    ConstraintMatrix out;
    out.reference = relu_layer - 1;
    out.lower.resize(cm.lower.rows(), cm.lower.cols());
    out.upper.resize(cm.upper.rows(), cm.upper.cols());
    out.lower_const = cm.lower_const;
    out.upper_const = cm.upper_const;
    out.side_terms = cm.side_terms;

    for (Eigen::Index i = 0; i < cm.lower.rows(); ++i) {
        for (Eigen::Index j = 0; j < cm.lower.cols(); ++j) {
            const double c = relax.lower_slope[j];
            const double s = relax.upper_slope[j];
            const double t = relax.upper_intercept[j];
            const double wl = cm.lower(i, j);
            if (wl >= 0) {
                out.lower(i, j) = wl * c;
            } else {
                out.lower(i, j) = wl * s;
                out.lower_const[i] += wl * t;
            }
            const double wu = cm.upper(i, j);
            if (wu >= 0) {
                out.upper(i, j) = wu * s;
                out.upper_const[i] += wu * t;
            } else {
                out.upper(i, j) = wu * c;
            }
        }
    }
    merge_side_terms(out);
    return out;
}

ConstraintMatrix backsub_summary(const ConstraintMatrix& cm, const BlockSummary& summary) {
    expect_reference(cm, summary.end_layer, "backsub_summary");
    const ConstraintMatrix& s = summary.forms;
    if (cm.reference_width() != s.rows()) {
        throw ShapeError(fmt::format("backsub_summary: forms over {} neurons, summary has {}", cm.reference_width(),
                                     s.rows()));
    }
    for (const auto& t : cm.side_terms) {
        if (t.layer > summary.start_layer) {
            throw AnalysisError(fmt::format("backsub_summary: residual term on layer {} lies inside the block "
                                            "summarized from {} to {}",
                                            t.layer, summary.start_layer, summary.end_layer));
        }
    }
    const Matrix lower_pos = cm.lower.cwiseMax(0.0);
    const Matrix lower_neg = cm.lower.cwiseMin(0.0);
    const Matrix upper_pos = cm.upper.cwiseMax(0.0);
    const Matrix upper_neg = cm.upper.cwiseMin(0.0);

    ConstraintMatrix out;
    out.reference = summary.start_layer;
    out.lower.noalias() = lower_pos * s.lower + lower_neg * s.upper;
    out.upper.noalias() = upper_pos * s.upper + upper_neg * s.lower;
    out.lower_const = cm.lower_const + lower_pos * s.lower_const + lower_neg * s.upper_const;
    out.upper_const = cm.upper_const + upper_pos * s.upper_const + upper_neg * s.lower_const;
    out.side_terms = cm.side_terms;
    merge_side_terms(out);
    return out;
}

ConstraintMatrix backsub_residual(const ConstraintMatrix& cm, const NetworkSpec& net, const AbstractState& state) {
    const LayerIndex add = cm.reference;
    if (add == kInputLayer || net.layer(add).kind != LayerKind::ResidualAdd) {
        throw AnalysisError(fmt::format("backsub_residual: layer {} is not a residual_add", add));
    }
    const LayerIndex entry = net.layer(add).skip_from;
    ConstraintMatrix cur =
        backsub_affine(cm, state.has_forms(add) ? state.forms(add) : residual_add_abstract(net, add));
    while (cur.reference != entry) {
        const LayerIndex r = cur.reference;
        if (r < entry) {
            throw AnalysisError("backsub_residual: walked past the unit entry layer");
        }
        if (net.layer(r).kind == LayerKind::Relu) {
            cur = backsub_relu(cur, state.relaxation(r), r);
        } else {
            cur = backsub_affine(cur, state.forms(r));
        }
    }
    return cur;
}

} // namespace bbpoly
