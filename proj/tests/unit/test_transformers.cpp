// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "bbpoly/analyzer.hpp"
#include "bbpoly/oracle.hpp"
#include "bbpoly/synthetic.hpp"
#include "bbpoly/transformers.hpp"
#include "helpers.hpp"

using namespace bbpoly;
using namespace bbpoly::test;

TEST_SUITE("transformers") {

TEST_CASE("first hidden layer of the example gives exact forms") {
    const NetworkSpec net = example_network();
    const ConstraintMatrix cm = affine_abstract(net.layers[0], 0);
    CHECK(cm.reference == kInputLayer);
    CHECK(cm.lower == mat(2, 2, {1, 1, 1, -1}));
    CHECK(cm.upper == cm.lower);
    CHECK(cm.lower_const == Vector::Zero(2));
    CHECK(cm.upper_const == Vector::Zero(2));
}

TEST_CASE("output layer forms are x9 + x10 + 1 and x10") {
    const NetworkSpec net = example_network();
    const ConstraintMatrix cm = affine_abstract(net.layers[4], 4);
    CHECK(cm.reference == 3);
    CHECK(cm.lower == mat(2, 2, {1, 1, 0, 1}));
    CHECK(cm.upper == cm.lower);
    CHECK(cm.lower_const == vec({1, 0}));
}

TEST_CASE("identity layer gives identity forms") {
    const LayerSpec id = LayerSpec::dense(Matrix::Identity(3, 3), Vector::Zero(3));
    const ConstraintMatrix cm = affine_abstract(id, 0);
    CHECK(cm.lower.isIdentity(0.0));
    CHECK(cm.upper.isIdentity(0.0));
}

TEST_CASE("relu cases") {
    const ReluAbstraction r = relu_abstract({{-2, 2}, {1, 3}, {-3, 1}, {-1, -0.5}});
    const ReluRelaxation& x = r.relaxation;
    CHECK(x.mode[0] == ReluMode::Mixed);
    CHECK(x.lower_slope[0] == 1.0); // tie goes to 1
    CHECK(x.upper_slope[0] == 0.5);
    CHECK(x.upper_intercept[0] == 1.0);
    CHECK(r.bounds[0].lo == 0.0);
    CHECK(r.bounds[0].hi == 2.0);

    CHECK(x.mode[1] == ReluMode::Identity);
    CHECK(x.lower_slope[1] == 1.0);
    CHECK(x.upper_slope[1] == 1.0);
    CHECK(x.upper_intercept[1] == 0.0);
    CHECK(r.bounds[1].lo == 1.0);
    CHECK(r.bounds[1].hi == 3.0);

    CHECK(x.mode[2] == ReluMode::Mixed);
    CHECK(x.lower_slope[2] == 0.0);
    CHECK(x.upper_slope[2] == 0.25);
    CHECK(x.upper_intercept[2] == 0.75);
    CHECK(r.bounds[2].lo == 0.0);
    CHECK(r.bounds[2].hi == 1.0);

    CHECK(x.mode[3] == ReluMode::Zero);
    CHECK(x.lower_slope[3] == 0.0);
    CHECK(x.upper_slope[3] == 0.0);
    CHECK(x.upper_intercept[3] == 0.0);
    CHECK(r.bounds[3].lo == 0.0);
    CHECK(r.bounds[3].hi == 0.0);
}

TEST_CASE("relu relaxation is sound and the chord passes through (l,0) and (u,u)") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> d(-3, 3);
    for (int t = 0; t < 200; ++t) {
        double l = d(rng);
        double u = d(rng);
        if (l > u) {
            std::swap(l, u);
        }
        const ReluAbstraction r = relu_abstract({{l, u}});
        const double c = r.relaxation.lower_slope[0];
        const double s = r.relaxation.upper_slope[0];
        const double b = r.relaxation.upper_intercept[0];
        if (r.relaxation.mode[0] == ReluMode::Mixed) {
            CHECK(std::abs(s * l + b) <= 1e-9);
            CHECK(std::abs(s * u + b - u) <= 1e-9);
            CHECK(s > 0);
            CHECK(b > 0);
        }
        std::uniform_real_distribution<double> in(l, u);
        for (int k = 0; k < 1000 / 200 + 5; ++k) {
            const double x = in(rng);
            const double y = std::max(0.0, x);
            const double lower = r.relaxation.mode[0] == ReluMode::Zero ? 0.0 : c * x;
            CHECK(lower <= y + 1e-9);
            CHECK(y <= s * x + b + 1e-9);
            CHECK(r.bounds[0].lo <= y);
            CHECK(y <= r.bounds[0].hi);
        }
    }
}

TEST_CASE("affine forms reproduce the forward pass") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 50; ++t) {
        const Matrix w = random_matrix(4, 3, rng);
        const Vector b = random_vector(4, rng);
        const ConstraintMatrix cm = affine_abstract(LayerSpec::dense(w, b), 0);
        const Vector x = random_vector(3, rng);
        CHECK(((cm.lower * x + cm.lower_const) - (w * x + b)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("residual add forms are p + s") {
    NetworkSpec net;
    net.input_width = 2;
    net.layers.push_back(LayerSpec::dense(Matrix::Identity(2, 2), Vector::Zero(2)));
    net.layers.push_back(LayerSpec::relu());
    net.layers.push_back(LayerSpec::dense(mat(2, 2, {2, 0, 0, 3}), vec({1, 1})));
    net.layers.push_back(LayerSpec::residual_add(1));
    net.layers.push_back(LayerSpec::relu());
    net.layers.push_back(LayerSpec::dense(Matrix::Identity(2, 2), Vector::Zero(2)));
    validate_network(net);
    const ConstraintMatrix cm = residual_add_abstract(net, 3);
    CHECK(cm.reference == 2);
    CHECK(cm.lower.isIdentity(0.0));
    REQUIRE(cm.side_terms.size() == 1);
    CHECK(cm.side_terms[0].layer == 1);
    CHECK(cm.side_terms[0].lower.isIdentity(0.0));
    const auto acts = forward(net, vec({0.5, 2}));
    CHECK(acts[3] == acts[2] + acts[1]);
}

TEST_CASE("random three-wide residual unit is bounded soundly end to end") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        RandomNetOptions o;
        o.seed = 100 + seed;
        o.input_width = 3;
        o.min_width = 3;
        o.max_width = 3;
        o.residual_units = 1;
        o.dense_layers = 4;
        const NetworkSpec net = random_network(o);
        const BoundsVector region(3, Interval{0.2, 0.8});
        for (AnalysisMode mode : {AnalysisMode::DeepPoly, AnalysisMode::BlockSummary, AnalysisMode::InputSummary}) {
            AnalyzerConfig cfg;
            cfg.mode = mode;
            cfg.sigma = 2;
            const auto r = analyze(net, region, cfg);
            CHECK(sample_check(net, region, r, 1000, seed).passed);
        }
    }
}

} // TEST_SUITE
