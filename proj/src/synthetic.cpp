// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#include "bbpoly/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "bbpoly/convolution.hpp"

namespace bbpoly {

namespace {

class LayerFactory {
  public:
    explicit LayerFactory(const RandomNetOptions& o) : opts_(o), rng_(o.seed) {}

    std::size_t width() {
        std::uniform_int_distribution<std::size_t> d(opts_.min_width, opts_.max_width);
        return d(rng_);
    }

    LayerSpec dense(std::size_t rows, std::size_t cols) {
        std::normal_distribution<double> w(0.0, opts_.weight_gain / std::sqrt(static_cast<double>(cols)));
        std::normal_distribution<double> b(0.0, opts_.bias_scale);
        Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        Vector v(static_cast<Eigen::Index>(rows));
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                m(r, c) = w(rng_);
            }
            v[r] = b(rng_);
        }
        return LayerSpec::dense(std::move(m), std::move(v));
    }

    LayerSpec conv() {
        Conv2dSpec c;
        c.in_height = 3;
        c.in_width = 3;
        c.in_channels = 1;
        c.out_channels = 2;
        c.kernel_height = 2;
        c.kernel_width = 2;
        std::normal_distribution<double> w(0.0, opts_.weight_gain / 2.0);
        std::normal_distribution<double> b(0.0, opts_.bias_scale);
        for (std::size_t i = 0; i < 8; ++i) {
            c.kernel.push_back(w(rng_));
        }
        c.bias = {b(rng_), b(rng_)};
        return lower_convolution(c);
    }

  private:
    const RandomNetOptions& opts_;
    std::mt19937_64 rng_;
};

} // namespace

NetworkSpec random_network(const RandomNetOptions& o) {
    if (o.dense_layers < 2 + 2 * o.residual_units) {
        throw std::invalid_argument("random_network: too few dense layers for the residual units");
    }
    if (o.min_width == 0 || o.min_width > o.max_width || o.output_width == 0) {
        throw std::invalid_argument("random_network: bad width range");
    }
    LayerFactory make(o);
    NetworkSpec net;
    net.input_width = o.conv_front ? 9 : o.input_width;
    net.input_domain = {0.0, 1.0};

    auto pred_width = [&net] { return net.width(net.output_layer()); };
    auto last = [&net] { return net.output_layer(); };

    if (o.conv_front) {
        net.layers.push_back(make.conv());
    } else {
        net.layers.push_back(make.dense(make.width(), net.input_width));
    }
    net.layers.push_back(LayerSpec::relu());
    std::size_t remaining = o.dense_layers - 1;

    for (std::size_t u = 0; u < o.residual_units; ++u) {
        const LayerIndex skip = last();
        const std::size_t w = pred_width();
        net.layers.push_back(make.dense(make.width(), w));
        net.layers.push_back(LayerSpec::relu());
        net.layers.push_back(make.dense(w, pred_width()));
        net.layers.push_back(LayerSpec::residual_add(skip));
        net.layers.push_back(LayerSpec::relu());
        remaining -= 2;
    }
    while (remaining > 1) {
        net.layers.push_back(make.dense(make.width(), pred_width()));
        net.layers.push_back(LayerSpec::relu());
        --remaining;
    }
    net.layers.push_back(make.dense(o.output_width, pred_width()));
    validate_network(net);
    return net;
}

NetworkSpec example_network() {
    NetworkSpec net;
    net.input_width = 2;
    net.input_domain = {-1.0, 1.0};
    Matrix w1(2, 2);
    w1 << 1, 1, 1, -1;
    Matrix w3(2, 2);
    w3 << 1, 1, 0, 1;
    net.layers.push_back(LayerSpec::dense(w1, Vector::Zero(2)));
    net.layers.push_back(LayerSpec::relu());
    net.layers.push_back(LayerSpec::dense(w1, Vector::Zero(2)));
    net.layers.push_back(LayerSpec::relu());
    net.layers.push_back(LayerSpec::dense(w3, (Vector(2) << 1, 0).finished()));
    validate_network(net);
    return net;
}

} // namespace bbpoly
