// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "bbpoly/network.hpp"

namespace bbpoly {

/// Network JSON:
///
///   {"input_width": n, "input_domain": [lo, hi], "layers": [
///      {"kind": "dense", "weights": [[...], ...], "bias": [...]},
///      {"kind": "relu"},
///      {"kind": "residual_add", "skip_from": k},
///      {"kind": "conv", "kernel": [...], "bias": [...], "stride": s,
///       "padding": p, "in_shape": [H, W, C], "out_channels": m}]}
///
/// A conv kernel is either nested as [m][kh][kw][C] or flat in that order
/// with an extra "kernel_size": [kh, kw]. Conv layers are lowered to dense
/// layers while loading. `input_domain` defaults to [0, 1].
[[nodiscard]]
NetworkSpec parse_network(const nlohmann::json& doc);

[[nodiscard]]
NetworkSpec load_network(const std::filesystem::path& path);

/// Inverse of parse_network for already-lowered networks. Doubles are
/// written in shortest round-trip form, so a reload is bit-identical.
[[nodiscard]]
nlohmann::json network_to_json(const NetworkSpec& net);

void save_network(const NetworkSpec& net, const std::filesystem::path& path);

[[nodiscard]]
nlohmann::json matrix_to_json(const Matrix& m);
[[nodiscard]]
nlohmann::json vector_to_json(const Vector& v);

} // namespace bbpoly
