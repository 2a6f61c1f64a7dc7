// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#include "bbpoly/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "bbpoly/errors.hpp"

namespace bbpoly {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_cell(std::string_view cell, std::size_t line_no) {
    cell = trim(cell);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ParseError(fmt::format("dataset line {}: non-numeric cell \"{}\"", line_no, cell));
    }
    return v;
}

} // namespace

std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path, bool normalize,
                                        std::size_t expected_width) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open dataset file " + path.string());
    }
    std::vector<DatasetRecord> records;
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> cells;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        cells.clear();
        std::string_view rest(line);
        while (true) {
            auto comma = rest.find(',');
            cells.push_back(parse_cell(rest.substr(0, comma), line_no));
            if (comma == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(comma + 1);
        }
        const double label = cells.front();
        if (label < 0 || label != static_cast<double>(static_cast<std::size_t>(label))) {
            throw ParseError(fmt::format("dataset line {}: label must be a non-negative integer", line_no));
        }
        const std::size_t width = cells.size() - 1;
        if (expected_width == 0) {
            expected_width = width;
        }
        if (width != expected_width || width == 0) {
            throw ShapeError(fmt::format("dataset line {}: {} pixels, expected {}", line_no, width, expected_width));
        }
        DatasetRecord r;
        r.label = static_cast<std::size_t>(label);
        r.pixels.resize(static_cast<Eigen::Index>(width));
        for (std::size_t i = 0; i < width; ++i) {
            double p = cells[i + 1];
            if (normalize) {
                p = std::clamp(p / 255.0, 0.0, 1.0);
            }
            r.pixels[static_cast<Eigen::Index>(i)] = p;
        }
        records.push_back(std::move(r));
    }
    return records;
}

void save_dataset(const std::vector<DatasetRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write dataset file " + path.string());
    }
    for (const auto& r : records) {
        out << r.label;
        for (Eigen::Index i = 0; i < r.pixels.size(); ++i) {
            out << ',' << fmt::format("{}", r.pixels[i]);
        }
        out << '\n';
    }
}

} // namespace bbpoly
