// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#include "bbpoly/summary.hpp"

#include <string>
#include <vector>

#include "bbpoly/errors.hpp"
#include "bbpoly/network_io.hpp"

namespace bbpoly {

namespace {

void drop_earlier_summaries(AbstractState& state, std::size_t block_id) {
    std::vector<LayerIndex> stale;
    for (const auto& [end, s] : state.summaries()) {
        if (s.block_id < block_id) {
            stale.push_back(end);
        }
    }
    for (LayerIndex end : stale) {
        state.erase_summary(end);
    }
}

} // namespace

void store_summary(AbstractState& state, const Segmentation& seg, std::size_t block_id, ConstraintMatrix forms,
                   SummaryScope scope) {
    const Block& block = seg.blocks.at(block_id);
    if (state.find_summary(block.end) != nullptr) {
        throw AnalysisError("store_summary: block " + std::to_string(block_id) + " already summarized");
    }
    const LayerIndex start = scope == SummaryScope::Input ? kInputLayer : block.start;
    if (forms.reference != start || !forms.side_terms.empty()) {
        throw AnalysisError("store_summary: forms of block " + std::to_string(block_id) + " reference layer " +
                            std::to_string(forms.reference) + ", expected " + std::to_string(start));
    }
    if (scope == SummaryScope::Input) {
        drop_earlier_summaries(state, block_id); // the new summary replaces them, so never hold both
    }
    state.insert_summary(BlockSummary{block_id, block.end, start, std::move(forms)});
    release_intermediates(state, seg, block_id, scope);
}

void release_intermediates(AbstractState& state, const Segmentation& seg, std::size_t block_id, SummaryScope scope) {
    const Block& block = seg.blocks.at(block_id);
    for (LayerIndex l = block.first_layer(); l <= block.end; ++l) {
        state.release_forms(l);
        if (scope == SummaryScope::Input || l != block.start) {
            state.release_relaxation(l);
        }
    }
    if (scope == SummaryScope::Input) {
        drop_earlier_summaries(state, block_id);
    }
}

const BlockSummary& read_summary(const AbstractState& state, LayerIndex end_layer) {
    const BlockSummary* s = state.find_summary(end_layer);
    if (s == nullptr) {
        throw AnalysisError("read_summary: no summary ends at layer " + std::to_string(end_layer));
    }
    return *s;
}

nlohmann::json summary_to_json(const BlockSummary& summary) {
    auto forms = [](const Matrix& m, const Vector& c) {
        nlohmann::json out = nlohmann::json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            out.push_back({{"coeffs", vector_to_json(m.row(i).transpose())}, {"constant", c[i]}});
        }
        return out;
    };
    return {
        {"block_id", summary.block_id},
        {"end_layer", summary.end_layer},
        {"start_layer", summary.start_layer},
        {"lower", forms(summary.forms.lower, summary.forms.lower_const)},
        {"upper", forms(summary.forms.upper, summary.forms.upper_const)},
    };
}

} // namespace bbpoly
