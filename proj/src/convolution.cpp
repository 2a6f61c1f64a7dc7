// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#include "bbpoly/convolution.hpp"

#include <string>

#include "bbpoly/errors.hpp"

namespace bbpoly {

std::size_t Conv2dSpec::out_height() const {
    return (in_height + 2 * padding - kernel_height) / stride + 1;
}

std::size_t Conv2dSpec::out_width() const {
    return (in_width + 2 * padding - kernel_width) / stride + 1;
}

void check_geometry(const Conv2dSpec& conv) {
    if (conv.in_height == 0 || conv.in_width == 0 || conv.in_channels == 0 || conv.out_channels == 0) {
        throw GeometryError("convolution: empty input shape or no output channels");
    }
    if (conv.kernel_height == 0 || conv.kernel_width == 0) {
        throw GeometryError("convolution: empty kernel");
    }
    if (conv.stride == 0) {
        throw GeometryError("convolution: stride must be positive");
    }
    if (conv.kernel_height > conv.in_height + 2 * conv.padding ||
        conv.kernel_width > conv.in_width + 2 * conv.padding) {
        throw GeometryError("convolution: kernel larger than padded input");
    }
    const std::size_t expected =
        conv.out_channels * conv.kernel_height * conv.kernel_width * conv.in_channels;
    if (conv.kernel.size() != expected) {
        throw GeometryError("convolution: kernel has " + std::to_string(conv.kernel.size()) +
                            " weights, expected " + std::to_string(expected));
    }
    if (conv.bias.size() != conv.out_channels) {
        throw GeometryError("convolution: bias length " + std::to_string(conv.bias.size()) +
                            " != out_channels " + std::to_string(conv.out_channels));
    }
}

LayerSpec lower_convolution(const Conv2dSpec& conv) {
    check_geometry(conv);
    const std::size_t oh = conv.out_height();
    const std::size_t ow = conv.out_width();
    Matrix w = Matrix::Zero(static_cast<Eigen::Index>(conv.output_size()),
                            static_cast<Eigen::Index>(conv.input_size()));
    Vector b(static_cast<Eigen::Index>(conv.output_size()));

    const auto pad = static_cast<long>(conv.padding);
    for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
            for (std::size_t oc = 0; oc < conv.out_channels; ++oc) {
                const auto row = static_cast<Eigen::Index>((y * ow + x) * conv.out_channels + oc);
                b[row] = conv.bias[oc];
                for (std::size_t kh = 0; kh < conv.kernel_height; ++kh) {
                    const long iy = static_cast<long>(y * conv.stride + kh) - pad;
                    if (iy < 0 || iy >= static_cast<long>(conv.in_height)) {
                        continue;
                    }
                    for (std::size_t kw = 0; kw < conv.kernel_width; ++kw) {
                        const long ix = static_cast<long>(x * conv.stride + kw) - pad;
                        if (ix < 0 || ix >= static_cast<long>(conv.in_width)) {
                            continue;
                        }
                        for (std::size_t ic = 0; ic < conv.in_channels; ++ic) {
                            const auto col = static_cast<Eigen::Index>(
                                (static_cast<std::size_t>(iy) * conv.in_width + static_cast<std::size_t>(ix)) *
                                    conv.in_channels +
                                ic);
                            w(row, col) += conv.weight(oc, kh, kw, ic);
                        }
                    }
                }
            }
        }
    }
    return LayerSpec::dense(std::move(w), std::move(b));
}

} // namespace bbpoly
