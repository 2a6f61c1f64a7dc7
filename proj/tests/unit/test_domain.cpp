// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "bbpoly/domain.hpp"
#include "bbpoly/errors.hpp"
#include "helpers.hpp"

using namespace bbpoly;
using namespace bbpoly::test;

namespace {

ConstraintMatrix single(std::initializer_list<double> lo, double lo_c, std::initializer_list<double> hi,
                        double hi_c) {
    return ConstraintMatrix::from_forms(0, {LinearForm{lo, lo_c}}, {LinearForm{hi, hi_c}});
}

bool contains(const Interval& outer, const Interval& inner) { return outer.lo <= inner.lo && inner.hi <= outer.hi; }

} // namespace

TEST_SUITE("domain") {

TEST_CASE("evaluation over the inputs gives the upper bound 3 for x7") {
    const auto b = evaluate_concrete_bounds(single({2}, 0, {1}, 2), BoundsVector{{-1, 1}});
    CHECK(b[0].lo == -2.0);
    CHECK(b[0].hi == 3.0);
}

TEST_CASE("constant-only forms") {
    const auto b = evaluate_concrete_bounds(single({0, 0}, 5, {0, 0}, 5), BoundsVector{{-3, 1}, {2, 9}});
    CHECK(b[0].lo == 5.0);
    CHECK(b[0].hi == 5.0);
}

TEST_CASE("x7 forms over x3, x4 evaluate to [-4, 4]") {
    const auto b = evaluate_concrete_bounds(single({1, 1}, 0, {0.5, 0.5}, 2), BoundsVector{{-2, 2}, {-2, 2}});
    CHECK(b[0].lo == -4.0);
    CHECK(b[0].hi == 4.0);
}

TEST_CASE("evaluation rejects width mismatch and pending side terms") {
    CHECK_THROWS_AS((void)evaluate_concrete_bounds(single({1, 1}, 0, {1, 1}, 0), BoundsVector{{0, 1}}), ShapeError);
    ConstraintMatrix cm = single({1}, 0, {1}, 0);
    cm.side_terms.push_back({-1, Matrix::Ones(1, 1), Matrix::Ones(1, 1)});
    CHECK_THROWS((void)evaluate_concrete_bounds(cm, BoundsVector{{0, 1}}));
}

TEST_CASE("meet over the x7 candidates") {
    BoundsVector c{{0, 4}};
    c = update_bounds(c, {{-4, 4}});
    c = update_bounds(c, {{-2, 3}});
    CHECK(c[0].lo == 0.0);
    CHECK(c[0].hi == 3.0);
    CHECK(update_bounds({{0, 1}}, {{0, 1}})[0].hi == 1.0);
    const auto m = update_bounds({{0, 5}}, {{-1, 3}});
    CHECK(m[0].lo == 0.0);
    CHECK(m[0].hi == 3.0);
}

TEST_CASE("crossing bounds abort, NaN aborts, width mismatch throws") {
    CHECK_THROWS_AS((void)update_bounds({{0, 1}}, {{2, 3}}), AnalysisError);
    CHECK_THROWS_AS((void)update_bounds({{0, 1}}, {{std::nan(""), 3}}), AnalysisError);
    CHECK_THROWS_AS((void)update_bounds({{0, 1}}, {{0, 1}, {0, 1}}), ShapeError);
}

TEST_CASE("meet is commutative, associative and idempotent") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-1, 1);
    for (int t = 0; t < 500; ++t) {
        // Three intervals that all contain 0, so no meet crosses.
        BoundsVector a{{-std::abs(d(rng)), std::abs(d(rng))}};
        BoundsVector b{{-std::abs(d(rng)), std::abs(d(rng))}};
        BoundsVector c{{-std::abs(d(rng)), std::abs(d(rng))}};
        const auto ab = update_bounds(a, b);
        const auto ba = update_bounds(b, a);
        CHECK(ab[0].lo == ba[0].lo);
        CHECK(ab[0].hi == ba[0].hi);
        const auto l = update_bounds(ab, c);
        const auto r = update_bounds(a, update_bounds(b, c));
        CHECK(l[0].lo == r[0].lo);
        CHECK(l[0].hi == r[0].hi);
        const auto aa = update_bounds(a, a);
        CHECK(aa[0].lo == a[0].lo);
        CHECK(aa[0].hi == a[0].hi);
    }
}

TEST_CASE("evaluation is monotone in the reference bounds") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 300; ++t) {
        const Matrix lo = random_matrix(3, 4, rng);
        const Matrix hi = random_matrix(3, 4, rng);
        ConstraintMatrix cm;
        cm.reference = 0;
        cm.lower = lo;
        cm.upper = hi;
        cm.lower_const = random_vector(3, rng);
        cm.upper_const = random_vector(3, rng);
        const BoundsVector inner = random_box(4, rng);
        BoundsVector outer = inner;
        for (auto& b : outer) {
            b.lo -= 0.3;
            b.hi += 0.1;
        }
        const auto a = evaluate_concrete_bounds(cm, inner);
        const auto b = evaluate_concrete_bounds(cm, outer);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(b[i].lo <= a[i].lo);
            CHECK(a[i].hi <= b[i].hi);
        }
    }
}

TEST_CASE("a single exact form brackets its value at every point of the box") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 300; ++t) {
        const Matrix w = random_matrix(2, 5, rng);
        const Vector c = random_vector(2, rng);
        ConstraintMatrix cm;
        cm.reference = 0;
        cm.lower = w;
        cm.upper = w;
        cm.lower_const = c;
        cm.upper_const = c;
        const BoundsVector box = random_box(5, rng);
        const auto b = evaluate_concrete_bounds(cm, box);
        for (int s = 0; s < 20; ++s) {
            const Vector x = random_point(box, rng);
            const Vector v = w * x + c;
            for (Eigen::Index i = 0; i < 2; ++i) {
                CHECK(b[static_cast<std::size_t>(i)].lo <= v[i] + 1e-12);
                CHECK(v[i] <= b[static_cast<std::size_t>(i)].hi + 1e-12);
            }
        }
    }
}

TEST_CASE("outward slack widens relative to magnitude") {
    ConstraintMatrix cm = single({1}, 0, {1}, 0);
    const auto b = evaluate_concrete_bounds(cm, BoundsVector{{-2, 4}}, 0.5);
    CHECK(b[0].lo == -3.0);
    CHECK(b[0].hi == 6.0);
    CHECK(contains(b[0], evaluate_concrete_bounds(cm, BoundsVector{{-2, 4}})[0]));
}

TEST_CASE("linear forms and matrices agree") {
    const ConstraintMatrix cm = single({1, -0.5}, -1, {0.5, -1}, 1);
    const LinearForm lo = cm.lower_form(0);
    CHECK(lo.coeffs == std::vector<double>{1, -0.5});
    CHECK(lo.constant == -1.0);
    CHECK(lo.evaluate(vec({2, 2})) == 0.0);
    CHECK(cm.upper_form(0).evaluate(vec({2, 2})) == 0.0);
    CHECK(cm.rows() == 1);
    CHECK(cm.reference_width() == 2);
    CHECK_THROWS_AS((void)ConstraintMatrix::from_forms(0, {LinearForm{{1}, 0}}, {}), ShapeError);
}

} // TEST_SUITE
