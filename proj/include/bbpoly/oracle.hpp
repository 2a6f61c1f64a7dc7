// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bbpoly/analyzer.hpp"
#include "bbpoly/domain.hpp"
#include "bbpoly/network.hpp"

namespace bbpoly {

/// Plain interval arithmetic through every layer, written independently of
/// the symbolic machinery. Sums run constant first, then columns in order,
/// skipping zero weights, like the domain's evaluation.
[[nodiscard]]
std::vector<BoundsVector> interval_propagate(const NetworkSpec& net, const BoundsVector& input_bounds);

constexpr double kSoundnessTolerance = 1e-6;

struct Violation {
    LayerIndex layer = 0;
    std::size_t neuron = 0;
    double value = 0.0;
    Interval bounds;
    double excess = 0.0; // distance outside the interval, relative to max(1, |bound|)
};

struct SampleReport {
    bool passed = true;
    std::size_t points = 0; // samples plus enumerated corners
    std::size_t violations = 0;
    std::optional<Violation> worst;
    std::string warning;
};

/// Worst containment violation of one concrete execution in `layer_bounds`,
/// or nullopt when every value lies within tolerance.
[[nodiscard]]
std::optional<Violation> check_point(const std::vector<Vector>& activations,
                                     const std::vector<BoundsVector>& layer_bounds,
                                     double tolerance = kSoundnessTolerance);

/// Points drawn uniformly from the box (seeded), plus every corner when the
/// box has at most `max_corner_inputs` inputs.
[[nodiscard]]
std::vector<Vector> sample_region(const BoundsVector& region, std::size_t n_samples, std::uint64_t seed,
                                  std::size_t max_corner_inputs = 12);

/// Runs the network on sample_region() points and checks containment in
/// every layer of `layer_bounds`.
[[nodiscard]]
SampleReport sample_check(const NetworkSpec& net, const BoundsVector& input_bounds,
                          const std::vector<BoundsVector>& layer_bounds, std::size_t n_samples,
                          std::uint64_t seed = 0);

[[nodiscard]]
SampleReport sample_check(const NetworkSpec& net, const BoundsVector& input_bounds, const AnalysisResult& result,
                          std::size_t n_samples, std::uint64_t seed = 0);

struct WidthComparison {
    std::vector<std::vector<double>> ratios; // width(a) / width(b) per layer and neuron; 0/0 is 1
    double mean = 1.0;
    double max = 1.0;
    double mean_width_a = 0.0;
    double mean_width_b = 0.0;
};

[[nodiscard]]
WidthComparison compare_widths(const std::vector<BoundsVector>& a, const std::vector<BoundsVector>& b);

[[nodiscard]]
WidthComparison compare_widths(const AnalysisResult& a, const AnalysisResult& b);

} // namespace bbpoly
