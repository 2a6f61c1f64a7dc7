// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "bbpoly/network.hpp"

namespace bbpoly {

/// A 2-D convolution with zero padding over an H x W x C tensor.
///
/// Tensors are flattened channel-last: element (h, w, c) sits at
/// (h * W + w) * C + c, both for the input and for the output.
/// `kernel` holds out_channels x kernel_h x kernel_w x in_channels values in
/// that order; `bias` holds one value per output channel.
struct Conv2dSpec {
    std::size_t in_height = 0;
    std::size_t in_width = 0;
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    std::size_t kernel_height = 0;
    std::size_t kernel_width = 0;
    std::size_t stride = 1;
    std::size_t padding = 0;
    std::vector<double> kernel;
    std::vector<double> bias;

    [[nodiscard]]
    std::size_t out_height() const;
    [[nodiscard]]
    std::size_t out_width() const;
    [[nodiscard]]
    std::size_t input_size() const { return in_height * in_width * in_channels; }
    [[nodiscard]]
    std::size_t output_size() const { return out_height() * out_width() * out_channels; }

    [[nodiscard]]
    double weight(std::size_t oc, std::size_t kh, std::size_t kw, std::size_t ic) const {
        return kernel[((oc * kernel_height + kh) * kernel_width + kw) * in_channels + ic];
    }
};

/// Throws GeometryError when the kernel does not fit the padded input or
/// the parameter arrays have the wrong length.
void check_geometry(const Conv2dSpec& conv);

/// Lowers the convolution to an equivalent Dense layer. Entry (o, i) of the
/// weight matrix is the kernel weight linking input element i to output
/// element o, zero where they are not connected.
[[nodiscard]]
LayerSpec lower_convolution(const Conv2dSpec& conv);

} // namespace bbpoly
