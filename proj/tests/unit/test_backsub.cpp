// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>
#include <vector>

#include "bbpoly/analyzer.hpp"
#include "bbpoly/backsub.hpp"
#include "bbpoly/errors.hpp"
#include "bbpoly/oracle.hpp"
#include "bbpoly/synthetic.hpp"
#include "bbpoly/transformers.hpp"
#include "helpers.hpp"

using namespace bbpoly;
using namespace bbpoly::test;

namespace {

struct ExampleSteps {
    NetworkSpec net = example_network();
    ReluAbstraction relu1 = relu_abstract({{-2, 2}, {-2, 2}});
    ConstraintMatrix layer0 = affine_abstract(net.layers[0], 0);
    ConstraintMatrix layer2 = affine_abstract(net.layers[2], 2);
    ConstraintMatrix over34 = backsub_relu(layer2, relu1.relaxation, 1);
    ConstraintMatrix over12 = backsub_affine(over34, layer0);
};

ReluRelaxation uniform_relaxation(std::size_t n, ReluMode mode) {
    ReluRelaxation r;
    r.mode.assign(n, mode);
    const double one = mode == ReluMode::Identity ? 1.0 : 0.0;
    r.lower_slope = Vector::Constant(static_cast<Eigen::Index>(n), one);
    r.upper_slope = Vector::Constant(static_cast<Eigen::Index>(n), one);
    r.upper_intercept = Vector::Zero(static_cast<Eigen::Index>(n));
    return r;
}

ConstraintMatrix random_forms(LayerIndex ref, Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    ConstraintMatrix cm;
    cm.reference = ref;
    cm.lower = random_matrix(rows, cols, rng);
    cm.upper = random_matrix(rows, cols, rng);
    cm.lower_const = random_vector(rows, rng);
    cm.upper_const = random_vector(rows, rng);
    return cm;
}

} // namespace

TEST_SUITE("backsub") {

TEST_CASE("relu step reproduces x7, x8 over x3, x4") {
    const ExampleSteps e;
    CHECK(e.over34.reference == 0);
    CHECK(e.over34.lower == mat(2, 2, {1, 1, 1, -0.5}));
    CHECK(e.over34.lower_const == vec({0, -1}));
    CHECK(e.over34.upper == mat(2, 2, {0.5, 0.5, 0.5, -1}));
    CHECK(e.over34.upper_const == vec({2, 1}));
}

TEST_CASE("affine step reproduces x7, x8 over x1, x2") {
    const ExampleSteps e;
    CHECK(e.over12.reference == kInputLayer);
    CHECK(e.over12.lower == mat(2, 2, {2, 0, 0.5, 1.5}));
    CHECK(e.over12.lower_const == vec({0, -1}));
    CHECK(e.over12.upper == mat(2, 2, {1, 0, -0.5, 1.5}));
    CHECK(e.over12.upper_const == vec({2, 1}));
}

TEST_CASE("x11 through relu and the block summary") {
    const ExampleSteps e;
    const BlockSummary sum{0, 2, kInputLayer, e.over12};
    const ReluAbstraction relu2 = relu_abstract({{0, 3}, {-2, 2}});
    const ConstraintMatrix x11 = affine_abstract(e.net.layers[4], 4);
    const ConstraintMatrix over_relu = backsub_relu(x11, relu2.relaxation, 3);
    const ConstraintMatrix over_in = backsub_summary(over_relu, sum);
    CHECK(over_in.reference == kInputLayer);
    CHECK(over_in.lower(0, 0) == 2.5);
    CHECK(over_in.lower(0, 1) == 1.5);
    CHECK(over_in.lower_const[0] == 0.0);
    CHECK(over_in.upper(0, 0) == 0.75);
    CHECK(over_in.upper(0, 1) == 0.75);
    CHECK(over_in.upper_const[0] == 4.5);
    const auto b = evaluate_concrete_bounds(over_in, BoundsVector{{-1, 1}, {-1, 1}});
    CHECK(b[0].hi == 6.0);
}

TEST_CASE("identity substitutions leave forms unchanged") {
    std::mt19937_64 rng(8);
    const ConstraintMatrix cm = random_forms(1, 3, 4, rng);
    const ConstraintMatrix id = ConstraintMatrix::identity(0, 4);
    const ConstraintMatrix a = backsub_affine(cm, id);
    CHECK(a.lower == cm.lower);
    CHECK(a.upper == cm.upper);
    CHECK(a.lower_const == cm.lower_const);
    CHECK(a.reference == 0);

    const ConstraintMatrix r = backsub_relu(cm, uniform_relaxation(4, ReluMode::Identity), 1);
    CHECK(r.lower == cm.lower);
    CHECK(r.upper == cm.upper);
    CHECK(r.upper_const == cm.upper_const);

    const BlockSummary sum{0, 1, kInputLayer, ConstraintMatrix::identity(kInputLayer, 4)};
    const ConstraintMatrix s = backsub_summary(cm, sum);
    CHECK(s.lower == cm.lower);
    CHECK(s.upper == cm.upper);
}

TEST_CASE("zero relaxation collapses forms to constants") {
    std::mt19937_64 rng(9);
    const ConstraintMatrix cm = random_forms(3, 2, 5, rng);
    const ConstraintMatrix r = backsub_relu(cm, uniform_relaxation(5, ReluMode::Zero), 3);
    CHECK(r.lower == Matrix::Zero(2, 5));
    CHECK(r.upper == Matrix::Zero(2, 5));
    CHECK(r.lower_const == cm.lower_const);
    CHECK(r.upper_const == cm.upper_const);
}

TEST_CASE("reference and width mismatches throw") {
    std::mt19937_64 rng(10);
    const ConstraintMatrix cm = random_forms(2, 2, 3, rng);
    CHECK_THROWS_AS((void)backsub_affine(cm, ConstraintMatrix::identity(0, 3)), AnalysisError);
    CHECK_THROWS_AS((void)backsub_affine(cm, ConstraintMatrix::identity(1, 4)), ShapeError);
    CHECK_THROWS_AS((void)backsub_relu(cm, uniform_relaxation(3, ReluMode::Identity), 1), AnalysisError);
    const BlockSummary sum{0, 1, kInputLayer, ConstraintMatrix::identity(kInputLayer, 3)};
    CHECK_THROWS_AS((void)backsub_summary(cm, sum), AnalysisError);
}

TEST_CASE("affine composition is exact") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 50; ++t) {
        const Matrix w1 = random_matrix(4, 3, rng);
        const Vector b1 = random_vector(4, rng);
        const Matrix w2 = random_matrix(2, 4, rng);
        const Vector b2 = random_vector(2, rng);
        const ConstraintMatrix composed =
            backsub_affine(affine_abstract(LayerSpec::dense(w2, b2), 1), affine_abstract(LayerSpec::dense(w1, b1), 0));
        const Vector x = random_vector(3, rng);
        const Vector direct = w2 * (w1 * x + b1) + b2;
        CHECK((composed.lower * x + composed.lower_const - direct).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((composed.upper * x + composed.upper_const - direct).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("identity relaxation commutes with affine composition") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 30; ++t) {
        const ConstraintMatrix top = random_forms(2, 3, 4, rng);
        const ConstraintMatrix mid = affine_abstract(LayerSpec::dense(random_matrix(4, 4, rng), random_vector(4, rng)), 1);
        const ConstraintMatrix via_relu = backsub_relu(top, uniform_relaxation(4, ReluMode::Identity), 2);
        ConstraintMatrix shifted = top;
        shifted.reference = 1;
        const ConstraintMatrix a = backsub_affine(via_relu, mid);
        const ConstraintMatrix b = backsub_affine(shifted, mid);
        CHECK(a.lower == b.lower);
        CHECK(a.upper == b.upper);
        CHECK(a.lower_const == b.lower_const);
    }
}

TEST_CASE("every intermediate form of a back-substitution is sound") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RandomNetOptions o;
        o.seed = 500 + seed;
        o.dense_layers = 2 + seed % 3;
        o.input_width = 2 + seed % 5;
        o.max_width = 6;
        const NetworkSpec net = random_network(o);
        std::mt19937_64 rng(seed);
        const BoundsVector region = random_box(net.input_width, rng);
        AnalyzerConfig cfg;
        cfg.mode = AnalysisMode::DeepPoly;
        cfg.record_trace = true;
        const AnalysisResult r = analyze(net, region, cfg);
        std::size_t violations = 0;
        for (const Vector& x : sample_region(region, 1000, seed)) {
            const auto acts = forward(net, x);
            for (const TraceEntry& t : r.trace) {
                const Vector& v = acts[static_cast<std::size_t>(t.layer)];
                for (Eigen::Index i = 0; i < v.size(); ++i) {
                    const Interval& b = t.candidate[static_cast<std::size_t>(i)];
                    violations += v[i] < b.lo - 1e-6 * std::max(1.0, std::abs(b.lo)) ||
                                          v[i] > b.hi + 1e-6 * std::max(1.0, std::abs(b.hi))
                                      ? 1
                                      : 0;
                }
            }
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("residual merges: doubled identity, zero main branch, sampling") {
    // entry relu (layer 1) -> identity dense (2) -> add(skip 1): x + x.
    NetworkSpec net;
    net.input_width = 2;
    net.layers.push_back(LayerSpec::dense(Matrix::Identity(2, 2), Vector::Zero(2)));
    net.layers.push_back(LayerSpec::relu());
    net.layers.push_back(LayerSpec::dense(Matrix::Identity(2, 2), Vector::Zero(2)));
    net.layers.push_back(LayerSpec::residual_add(1));
    net.layers.push_back(LayerSpec::relu());
    net.layers.push_back(LayerSpec::dense(Matrix::Identity(2, 2), Vector::Zero(2)));
    validate_network(net);

    AbstractState state(BoundsVector(2, Interval{0, 1}), net.layers.size());
    state.store_forms(2, affine_abstract(net.layers[2], 2));
    state.store_forms(3, residual_add_abstract(net, 3));
    ConstraintMatrix over_add = ConstraintMatrix::identity(3, 2);
    const ConstraintMatrix merged = backsub_residual(over_add, net, state);
    CHECK(merged.reference == 1);
    CHECK(merged.side_terms.empty());
    CHECK(merged.lower == 2.0 * Matrix::Identity(2, 2));
    CHECK(merged.upper == 2.0 * Matrix::Identity(2, 2));

    NetworkSpec zero = net;
    zero.layers[2] = LayerSpec::dense(Matrix::Zero(2, 2), Vector::Zero(2));
    AbstractState zs(BoundsVector(2, Interval{0, 1}), zero.layers.size());
    zs.store_forms(2, affine_abstract(zero.layers[2], 2));
    const ConstraintMatrix m0 = backsub_residual(over_add, zero, zs);
    CHECK(m0.lower.isIdentity(0.0));
    CHECK(m0.upper.isIdentity(0.0));

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        RandomNetOptions o;
        o.seed = 900 + seed;
        o.input_width = 3;
        o.residual_units = 1;
        o.dense_layers = 4;
        o.max_width = 4;
        const NetworkSpec rn = random_network(o);
        const BoundsVector region(3, Interval{0, 1});
        AnalyzerConfig cfg;
        cfg.sigma = 1;
        const auto r = analyze(rn, region, cfg);
        CHECK(sample_check(rn, region, r, 1000, seed).passed);
    }
}

TEST_CASE("a summary jump lands where the layerwise walk through the block lands") {
    RandomNetOptions o;
    o.seed = 42;
    o.dense_layers = 7;
    const NetworkSpec net = random_network(o);
    AnalyzerConfig cfg;
    cfg.sigma = 3;
    cfg.record_trace = true;
    const AnalysisResult r = analyze(net, BoundsVector(net.input_width, Interval{0, 1}), cfg);
    REQUIRE(r.segmentation.blocks.size() >= 2);
    const Block& b0 = r.segmentation.blocks[0];
    const Block& b1 = r.segmentation.blocks[1];
    // Block 1's end layer walks layer by layer to its start relu (2*sigma - 2
    // steps), through that relu to block 0's end, then jumps to block 0's start.
    std::vector<LayerIndex> refs;
    for (const TraceEntry& t : r.trace) {
        if (t.layer == b1.end && t.step > 0) {
            refs.push_back(t.reference);
        }
    }
    std::vector<LayerIndex> expected;
    for (LayerIndex l = b1.end - 2; l >= b1.start; --l) {
        expected.push_back(l);
    }
    CHECK(expected.size() == 2 * 3 - 2);
    expected.push_back(b0.end);
    expected.push_back(b0.start);
    CHECK(refs == expected);
}

} // TEST_SUITE
