// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace bbpoly {

/// Malformed input file (network JSON, dataset CSV).
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Layer widths or parameter shapes that do not chain.
class ShapeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class UnsupportedLayerError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Convolution parameters that do not fit the input tensor.
class GeometryError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An internal inconsistency during analysis: crossing bounds, a missing
/// summary, a reference-layer mismatch. These indicate a bug, never an
/// inconclusive verification result.
class AnalysisError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised when a cooperative cancellation check fires between layers.
class AnalysisCancelled : public std::runtime_error {
  public:
    AnalysisCancelled() : std::runtime_error("analysis cancelled") {}
};

} // namespace bbpoly
