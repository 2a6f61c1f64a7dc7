// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>

#include "bbpoly/network.hpp"

namespace bbpoly {

/// Shape of a randomly generated ReLU network.
struct RandomNetOptions {
    std::size_t input_width = 4;
    std::size_t output_width = 3;
    std::size_t dense_layers = 4; // including the output layer
    std::size_t min_width = 2;
    std::size_t max_width = 8;
    std::size_t residual_units = 0; // each adds Dense, Relu, Dense, ResidualAdd, Relu
    bool conv_front = false;        // 3x3x1 input, 2x2 conv with 2 channels
    double weight_gain = 1.2;
    double bias_scale = 0.3;
    std::uint64_t seed = 0;
};

/// Deterministic for a given options value.
[[nodiscard]]
NetworkSpec random_network(const RandomNetOptions& options);

/// The 2-2-2-2 network of the running example: inputs x1,x2, hidden affine
/// x3,x4 / x7,x8, ReLU outputs x5,x6 / x9,x10, outputs x11,x12.
[[nodiscard]]
NetworkSpec example_network();

} // namespace bbpoly
