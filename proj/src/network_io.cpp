// Copyright (c) bbpoly contributors.
// SPDX-License-Identifier: Apache-2.0
#include "bbpoly/network_io.hpp"

#include <fstream>
#include <sstream>

#include "bbpoly/convolution.hpp"
#include "bbpoly/errors.hpp"

namespace bbpoly {

using nlohmann::json;

namespace {

double as_real(const json& v, const std::string& what) {
    if (!v.is_number()) {
        throw ParseError(what + ": expected a number");
    }
    return v.get<double>();
}

std::size_t as_count(const json& v, const std::string& what) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ParseError(what + ": expected a non-negative integer");
    }
    return v.get<std::size_t>();
}

const json& member(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ParseError(where + ": missing \"" + key + "\"");
    }
    return *it;
}

Vector parse_vector(const json& v, const std::string& what) {
    if (!v.is_array()) {
        throw ParseError(what + ": expected an array");
    }
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[static_cast<Eigen::Index>(i)] = as_real(v[i], what);
    }
    return out;
}

Matrix parse_matrix(const json& v, const std::string& what) {
    if (!v.is_array() || v.empty()) {
        throw ParseError(what + ": expected a non-empty array of rows");
    }
    const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
    Matrix out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < v.size(); ++r) {
        if (!v[r].is_array()) {
            throw ParseError(what + ": row " + std::to_string(r) + " is not an array");
        }
        if (v[r].size() != cols) {
            throw ShapeError(what + ": ragged rows");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = as_real(v[r][c], what);
        }
    }
    return out;
}

void flatten_into(const json& v, std::vector<double>& out, const std::string& what) {
    if (v.is_array()) {
        for (const auto& e : v) {
            flatten_into(e, out, what);
        }
    } else {
        out.push_back(as_real(v, what));
    }
}

LayerSpec parse_conv(const json& l, const std::string& where, std::size_t pred_width) {
    Conv2dSpec conv;
    const json& shape = member(l, "in_shape", where);
    if (!shape.is_array() || shape.size() != 3) {
        throw ParseError(where + ": in_shape must be [H, W, C]");
    }
    conv.in_height = as_count(shape[0], where + ".in_shape");
    conv.in_width = as_count(shape[1], where + ".in_shape");
    conv.in_channels = as_count(shape[2], where + ".in_shape");
    conv.out_channels = as_count(member(l, "out_channels", where), where + ".out_channels");
    conv.stride = l.contains("stride") ? as_count(l["stride"], where + ".stride") : 1;
    conv.padding = l.contains("padding") ? as_count(l["padding"], where + ".padding") : 0;

    const json& kernel = member(l, "kernel", where);
    if (!kernel.is_array()) {
        throw ParseError(where + ": kernel must be an array");
    }
    if (l.contains("kernel_size")) {
        const json& ks = l["kernel_size"];
        if (!ks.is_array() || ks.size() != 2) {
            throw ParseError(where + ": kernel_size must be [kh, kw]");
        }
        conv.kernel_height = as_count(ks[0], where + ".kernel_size");
        conv.kernel_width = as_count(ks[1], where + ".kernel_size");
    } else {
        // nested [m][kh][kw][C]
        if (kernel.empty() || !kernel[0].is_array() || kernel[0].empty() || !kernel[0][0].is_array()) {
            throw ParseError(where + ": flat kernel requires kernel_size");
        }
        conv.kernel_height = kernel[0].size();
        conv.kernel_width = kernel[0][0].size();
    }
    flatten_into(kernel, conv.kernel, where + ".kernel");
    flatten_into(member(l, "bias", where), conv.bias, where + ".bias");

    if (conv.input_size() != pred_width) {
        throw ShapeError(where + ": in_shape holds " + std::to_string(conv.input_size()) +
                         " values but the predecessor has width " + std::to_string(pred_width));
    }
    return lower_convolution(conv);
}

} // namespace

NetworkSpec parse_network(const json& doc) {
    if (!doc.is_object()) {
        throw ParseError("network: top level must be an object");
    }
    NetworkSpec net;
    net.input_width = as_count(member(doc, "input_width", "network"), "input_width");
    if (doc.contains("input_domain")) {
        const json& d = doc["input_domain"];
        if (!d.is_array() || d.size() != 2) {
            throw ParseError("input_domain must be [lo, hi]");
        }
        net.input_domain = {as_real(d[0], "input_domain"), as_real(d[1], "input_domain")};
    }
    const json& layers = member(doc, "layers", "network");
    if (!layers.is_array()) {
        throw ParseError("layers must be an array");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const json& l = layers[i];
        const std::string where = "layers[" + std::to_string(i) + "]";
        if (!l.is_object()) {
            throw ParseError(where + ": expected an object");
        }
        const json& kind = member(l, "kind", where);
        if (!kind.is_string()) {
            throw ParseError(where + ": kind must be a string");
        }
        const auto k = kind.get<std::string>();
        if (k == "dense") {
            net.layers.push_back(LayerSpec::dense(parse_matrix(member(l, "weights", where), where + ".weights"),
                                                  parse_vector(member(l, "bias", where), where + ".bias")));
        } else if (k == "relu") {
            net.layers.push_back(LayerSpec::relu());
        } else if (k == "residual_add") {
            const json& s = member(l, "skip_from", where);
            if (!s.is_number_integer()) {
                throw ParseError(where + ": skip_from must be an integer");
            }
            net.layers.push_back(LayerSpec::residual_add(s.get<LayerIndex>()));
        } else if (k == "conv") {
            const auto pred = static_cast<LayerIndex>(net.layers.size()) - 1;
            net.layers.push_back(parse_conv(l, where, net.width(pred)));
        } else {
            throw UnsupportedLayerError(where + ": unsupported layer kind \"" + k + "\"");
        }
    }
    validate_network(net);
    return net;
}

NetworkSpec load_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open network file " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return parse_network(doc);
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v[i]);
    }
    return out;
}

json network_to_json(const NetworkSpec& net) {
    json doc;
    doc["input_width"] = net.input_width;
    doc["input_domain"] = {net.input_domain.lo, net.input_domain.hi};
    json layers = json::array();
    for (const auto& l : net.layers) {
        json j;
        j["kind"] = std::string(to_string(l.kind));
        if (l.kind == LayerKind::Dense) {
            j["weights"] = matrix_to_json(l.weights);
            j["bias"] = vector_to_json(l.bias);
        } else if (l.kind == LayerKind::ResidualAdd) {
            j["skip_from"] = l.skip_from;
        }
        layers.push_back(std::move(j));
    }
    doc["layers"] = std::move(layers);
    return doc;
}

void save_network(const NetworkSpec& net, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write network file " + path.string());
    }
    out << network_to_json(net).dump() << '\n';
}

} // namespace bbpoly
