// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "bbpoly/network.hpp"

namespace bbpoly {

struct DatasetRecord {
    std::size_t label = 0;
    Vector pixels;
};

/// Reads `label,p1,...,pn` rows (no header). With `normalize`, pixels are
/// divided by 255 and clamped to [0, 1]. When `expected_width` is zero the
/// width of the first row is used; every row must match it.
[[nodiscard]]
std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path, bool normalize,
                                        std::size_t expected_width = 0);

void save_dataset(const std::vector<DatasetRecord>& records, const std::filesystem::path& path);

} // namespace bbpoly
