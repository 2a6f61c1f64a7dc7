// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "bbpoly/domain.hpp"
#include "bbpoly/network.hpp"

namespace bbpoly::test {

inline Matrix mat(Eigen::Index rows, Eigen::Index cols, std::initializer_list<double> v) {
    Matrix m(rows, cols);
    auto it = v.begin();
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = *it++;
        }
    }
    return m;
}

inline Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) {
        out[i++] = x;
    }
    return out;
}

inline Vector random_point(const BoundsVector& box, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector x(static_cast<Eigen::Index>(box.size()));
    for (std::size_t i = 0; i < box.size(); ++i) {
        x[static_cast<Eigen::Index>(i)] = box[i].lo + unit(rng) * (box[i].hi - box[i].lo);
    }
    return x;
}

inline BoundsVector random_box(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    std::uniform_real_distribution<double> r(0.0, 1.0);
    BoundsVector out;
    for (std::size_t i = 0; i < n; ++i) {
        const double mid = c(rng);
        const double rad = r(rng);
        out.push_back({mid - rad, mid + rad});
    }
    return out;
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = n(rng);
        }
    }
    return m;
}

inline Vector random_vector(Eigen::Index n, std::mt19937_64& rng) { return random_matrix(n, 1, rng).col(0); }

inline std::filesystem::path temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "bbpoly_unit";
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace bbpoly::test
