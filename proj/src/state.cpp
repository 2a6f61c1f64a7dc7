// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#include "bbpoly/state.hpp"

#include <algorithm>
#include <string>

#include "bbpoly/errors.hpp"

namespace bbpoly {

AbstractState::AbstractState(BoundsVector input_bounds, std::size_t layer_count)
    : input_bounds_(std::move(input_bounds)), bounds_(layer_count), forms_(layer_count), relaxations_(layer_count) {}

void AbstractState::check_layer(LayerIndex layer, const char* what) const {
    if (layer < 0 || static_cast<std::size_t>(layer) >= bounds_.size()) {
        throw AnalysisError(std::string(what) + ": layer " + std::to_string(layer) + " out of range");
    }
}

const BoundsVector& AbstractState::bounds(LayerIndex layer) const {
    if (layer == kInputLayer) {
        return input_bounds_;
    }
    check_layer(layer, "bounds");
    const auto& b = bounds_[static_cast<std::size_t>(layer)];
    if (!b) {
        throw AnalysisError("bounds: layer " + std::to_string(layer) + " not analyzed yet");
    }
    return *b;
}

bool AbstractState::has_bounds(LayerIndex layer) const {
    if (layer == kInputLayer) {
        return true;
    }
    return layer >= 0 && static_cast<std::size_t>(layer) < bounds_.size() &&
           bounds_[static_cast<std::size_t>(layer)].has_value();
}

void AbstractState::set_bounds(LayerIndex layer, BoundsVector bounds) {
    check_layer(layer, "set_bounds");
    bounds_[static_cast<std::size_t>(layer)] = std::move(bounds);
}

BoundsLookup AbstractState::bounds_lookup() const {
    return [this](LayerIndex layer) -> const BoundsVector& { return bounds(layer); };
}

void AbstractState::store_forms(LayerIndex layer, ConstraintMatrix forms) {
    check_layer(layer, "store_forms");
    auto& slot = forms_[static_cast<std::size_t>(layer)];
    if (!slot) {
        ++live_forms_;
    }
    slot = std::move(forms);
    note_peak();
}

bool AbstractState::has_forms(LayerIndex layer) const {
    return layer >= 0 && static_cast<std::size_t>(layer) < forms_.size() &&
           forms_[static_cast<std::size_t>(layer)].has_value();
}

const ConstraintMatrix& AbstractState::forms(LayerIndex layer) const {
    if (!has_forms(layer)) {
        throw AnalysisError("symbolic constraints of layer " + std::to_string(layer) + " are not available");
    }
    return *forms_[static_cast<std::size_t>(layer)];
}

void AbstractState::release_forms(LayerIndex layer) {
    if (has_forms(layer)) {
        forms_[static_cast<std::size_t>(layer)].reset();
        --live_forms_;
    }
}

void AbstractState::store_relaxation(LayerIndex layer, ReluRelaxation relaxation) {
    check_layer(layer, "store_relaxation");
    auto& slot = relaxations_[static_cast<std::size_t>(layer)];
    if (!slot) {
        ++live_relaxations_;
    }
    slot = std::move(relaxation);
}

bool AbstractState::has_relaxation(LayerIndex layer) const {
    return layer >= 0 && static_cast<std::size_t>(layer) < relaxations_.size() &&
           relaxations_[static_cast<std::size_t>(layer)].has_value();
}

const ReluRelaxation& AbstractState::relaxation(LayerIndex layer) const {
    if (!has_relaxation(layer)) {
        throw AnalysisError("relaxation of layer " + std::to_string(layer) + " is not available");
    }
    return *relaxations_[static_cast<std::size_t>(layer)];
}

void AbstractState::release_relaxation(LayerIndex layer) {
    if (has_relaxation(layer)) {
        relaxations_[static_cast<std::size_t>(layer)].reset();
        --live_relaxations_;
    }
}

void AbstractState::insert_summary(BlockSummary summary) {
    const LayerIndex end = summary.end_layer;
    summaries_.insert_or_assign(end, std::move(summary));
    note_peak();
}

const BlockSummary* AbstractState::find_summary(LayerIndex end_layer) const {
    auto it = summaries_.find(end_layer);
    return it == summaries_.end() ? nullptr : &it->second;
}

void AbstractState::erase_summary(LayerIndex end_layer) { summaries_.erase(end_layer); }

void AbstractState::note_peak() { peak_live_ = std::max(peak_live_, live_constraint_count()); }

} // namespace bbpoly
