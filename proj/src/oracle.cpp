// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#include "bbpoly/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "bbpoly/errors.hpp"

namespace bbpoly {

namespace {

BoundsVector interval_dense(const LayerSpec& layer, const BoundsVector& in) {
    BoundsVector out(static_cast<std::size_t>(layer.weights.rows()));
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
        double lo = layer.bias[i];
        double hi = layer.bias[i];
        for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
            const double w = layer.weights(i, j);
            const Interval& x = in[static_cast<std::size_t>(j)];
            if (w > 0) {
                lo += w * x.lo;
                hi += w * x.hi;
            } else if (w < 0) {
                lo += w * x.hi;
                hi += w * x.lo;
            }
        }
        out[static_cast<std::size_t>(i)] = {lo, hi};
    }
    return out;
}

} // namespace

std::vector<BoundsVector> interval_propagate(const NetworkSpec& net, const BoundsVector& input_bounds) {
    if (input_bounds.size() != net.input_width) {
        throw ShapeError("interval_propagate: input bounds width mismatch");
    }
    std::vector<BoundsVector> out;
    out.reserve(net.layers.size());
    auto at = [&](LayerIndex l) -> const BoundsVector& {
        return l == kInputLayer ? input_bounds : out[static_cast<std::size_t>(l)];
    };
    for (LayerIndex k = 0; k < static_cast<LayerIndex>(net.layers.size()); ++k) {
        const LayerSpec& layer = net.layer(k);
        const BoundsVector& prev = at(k - 1);
        BoundsVector b;
        switch (layer.kind) {
        case LayerKind::Dense:
            b = interval_dense(layer, prev);
            break;
        case LayerKind::Relu:
            for (const auto& x : prev) {
                b.push_back({std::max(0.0, x.lo), std::max(0.0, x.hi)});
            }
            break;
        case LayerKind::ResidualAdd: {
            const BoundsVector& skip = at(layer.skip_from);
            for (std::size_t i = 0; i < prev.size(); ++i) {
                b.push_back({0.0 + prev[i].lo + skip[i].lo, 0.0 + prev[i].hi + skip[i].hi});
            }
            break;
        }
        }
        out.push_back(std::move(b));
    }
    return out;
}

std::optional<Violation> check_point(const std::vector<Vector>& activations,
                                     const std::vector<BoundsVector>& layer_bounds, double tolerance) {
    if (activations.size() != layer_bounds.size()) {
        throw ShapeError("check_point: layer count mismatch");
    }
    std::optional<Violation> worst;
    for (std::size_t l = 0; l < activations.size(); ++l) {
        const Vector& a = activations[l];
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            const Interval& b = layer_bounds[l][static_cast<std::size_t>(i)];
            const double v = a[i];
            double excess = 0.0;
            if (v < b.lo) {
                excess = (b.lo - v) / std::max(1.0, std::abs(b.lo));
            } else if (v > b.hi) {
                excess = (v - b.hi) / std::max(1.0, std::abs(b.hi));
            } else if (std::isnan(v)) {
                excess = std::numeric_limits<double>::infinity();
            }
            if (excess > tolerance && (!worst || excess > worst->excess)) {
                worst = Violation{static_cast<LayerIndex>(l), static_cast<std::size_t>(i), v, b, excess};
            }
        }
    }
    return worst;
}

std::vector<Vector> sample_region(const BoundsVector& region, std::size_t n_samples, std::uint64_t seed,
                                  std::size_t max_corner_inputs) {
    const auto n = static_cast<Eigen::Index>(region.size());
    std::vector<Vector> points;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t s = 0; s < n_samples; ++s) {
        Vector x(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Interval& b = region[static_cast<std::size_t>(i)];
            x[i] = std::min(b.hi, b.lo + unit(rng) * (b.hi - b.lo));
        }
        points.push_back(std::move(x));
    }
    if (n_samples > 0 && region.size() <= max_corner_inputs) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << region.size()); ++mask) {
            Vector x(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const Interval& b = region[static_cast<std::size_t>(i)];
                x[i] = (mask >> i) & 1U ? b.hi : b.lo;
            }
            points.push_back(std::move(x));
        }
    }
    return points;
}

SampleReport sample_check(const NetworkSpec& net, const BoundsVector& input_bounds,
                          const std::vector<BoundsVector>& layer_bounds, std::size_t n_samples, std::uint64_t seed) {
    SampleReport report;
    if (n_samples == 0) {
        report.warning = "sample_check: no samples requested, containment not tested";
        return report;
    }
    for (const Vector& x : sample_region(input_bounds, n_samples, seed)) {
        ++report.points;
        const auto v = check_point(forward(net, x), layer_bounds);
        if (!v) {
            continue;
        }
        ++report.violations;
        if (!report.worst || v->excess > report.worst->excess) {
            report.worst = v;
        }
    }
    report.passed = report.violations == 0;
    return report;
}

SampleReport sample_check(const NetworkSpec& net, const BoundsVector& input_bounds, const AnalysisResult& result,
                          std::size_t n_samples, std::uint64_t seed) {
    return sample_check(net, input_bounds, result.layer_bounds, n_samples, seed);
}

WidthComparison compare_widths(const std::vector<BoundsVector>& a, const std::vector<BoundsVector>& b) {
    if (a.size() != b.size()) {
        throw ShapeError("compare_widths: layer count mismatch");
    }
    WidthComparison cmp;
    double sum = 0.0;
    double sum_a = 0.0;
    double sum_b = 0.0;
    std::size_t count = 0;
    cmp.max = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l) {
        if (a[l].size() != b[l].size()) {
            throw ShapeError(fmt::format("compare_widths: layer {} widths differ", l));
        }
        std::vector<double> layer;
        for (std::size_t i = 0; i < a[l].size(); ++i) {
            const double wa = a[l][i].width();
            const double wb = b[l][i].width();
            const double r = wa == wb ? 1.0 : wa / wb; // x/0 is +inf
            layer.push_back(r);
            sum += r;
            sum_a += wa;
            sum_b += wb;
            cmp.max = std::max(cmp.max, r);
            ++count;
        }
        cmp.ratios.push_back(std::move(layer));
    }
    if (count > 0) {
        cmp.mean = sum / static_cast<double>(count);
        cmp.mean_width_a = sum_a / static_cast<double>(count);
        cmp.mean_width_b = sum_b / static_cast<double>(count);
    } else {
        cmp.max = 1.0;
    }
    return cmp;
}

WidthComparison compare_widths(const AnalysisResult& a, const AnalysisResult& b) {
    return compare_widths(a.layer_bounds, b.layer_bounds);
}

} // namespace bbpoly
