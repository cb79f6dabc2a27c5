#pragma once

/// JSON serialization for model parameters: nested arrays for every tensor
/// plus a flat header with the dimensions and the seed they were drawn from.
/// Loading validates all shapes against the header and fails loudly on any
/// mismatch, so a truncated or hand-edited file cannot silently produce a
/// differently-shaped model.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mhgrn/baselines.hpp"
#include "mhgrn/encoder.hpp"
#include "mhgrn/error.hpp"
#include "mhgrn/matrix.hpp"
#include "mhgrn/mlp.hpp"

namespace mhgrn {

namespace detail {

inline nlohmann::json matrix_to_json(const DenseMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline DenseMatrix matrix_from_json(const nlohmann::json& j,
                                    std::size_t rows, std::size_t cols,
                                    const std::string& what) {
  if (!j.is_array() || j.size() != rows)
    throw ParseError(what + ": expected " + std::to_string(rows) + " rows");
  DenseMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != cols)
      throw ParseError(what + ": row " + std::to_string(r) + " expected " +
                       std::to_string(cols) + " columns");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number())
        throw ParseError(what + ": non-numeric entry");
      m(r, c) = row[c].get<double>();
    }
  }
  if (!is_finite(m)) throw NonFinite(what + ": non-finite entry");
  return m;
}

inline nlohmann::json vector_to_json(const std::vector<double>& v) {
  return nlohmann::json(v);
}

inline std::vector<double> vector_from_json(const nlohmann::json& j,
                                            std::size_t size,
                                            const std::string& what) {
  if (!j.is_array() || j.size() != size)
    throw ParseError(what + ": expected " + std::to_string(size) +
                     " entries");
  std::vector<double> v(size);
  for (std::size_t i = 0; i < size; ++i) {
    if (!j[i].is_number()) throw ParseError(what + ": non-numeric entry");
    v[i] = j[i].get<double>();
    if (!std::isfinite(v[i])) throw NonFinite(what + ": non-finite entry");
  }
  return v;
}

inline nlohmann::json mlp_to_json(const Mlp& mlp) {
  return {{"w1", matrix_to_json(mlp.w1)},
          {"b1", vector_to_json(mlp.b1)},
          {"w2", matrix_to_json(mlp.w2)},
          {"b2", vector_to_json(mlp.b2)}};
}

/// Reads a two-layer MLP whose input and output widths are fixed by the
/// header but whose hidden width is carried by the arrays themselves.
inline Mlp mlp_from_json(const nlohmann::json& j, std::size_t in,
                         std::size_t out, const std::string& what) {
  if (!j.is_object() || !j.contains("w1") || !j.contains("b1") ||
      !j.contains("w2") || !j.contains("b2"))
    throw ParseError(what + ": expected keys w1, b1, w2, b2");
  if (!j["w1"].is_array() || j["w1"].empty())
    throw ParseError(what + ": w1 must have at least one row");
  const std::size_t hidden = j["w1"].size();
  Mlp mlp;
  mlp.w1 = matrix_from_json(j["w1"], hidden, in, what + ".w1");
  mlp.b1 = vector_from_json(j["b1"], hidden, what + ".b1");
  mlp.w2 = matrix_from_json(j["w2"], out, hidden, what + ".w2");
  mlp.b2 = vector_from_json(j["b2"], out, what + ".b2");
  return mlp;
}

inline const nlohmann::json& require_key(const nlohmann::json& j,
                                         const std::string& key,
                                         const std::string& what) {
  if (!j.is_object() || !j.contains(key))
    throw ParseError(what + ": missing key \"" + key + "\"");
  return j[key];
}

inline int int_field(const nlohmann::json& j, const std::string& key,
                     const std::string& what) {
  const auto& v = require_key(j, key, what);
  if (!v.is_number_integer())
    throw ParseError(what + ": \"" + key + "\" must be an integer");
  return v.get<int>();
}

}  // namespace detail

inline nlohmann::json params_to_json(const ModelParams& p) {
  nlohmann::json j;
  j["d_in"] = p.dims.d_in;
  j["d"] = p.dims.d;
  j["d_out"] = p.dims.d_out;
  j["d_s"] = p.dims.d_s;
  j["K"] = p.dims.K;
  j["m"] = p.dims.m;
  j["h_att"] = p.dims.h_att;
  j["activation"] = p.dims.activation;
  j["seed"] = p.seed;
  nlohmann::json u = nlohmann::json::array();
  nlohmann::json b = nlohmann::json::array();
  for (int t = 0; t < 3; ++t) {
    u.push_back(detail::matrix_to_json(p.U[t]));
    b.push_back(detail::vector_to_json(p.b[t]));
  }
  j["U"] = std::move(u);
  j["b"] = std::move(b);
  nlohmann::json w = nlohmann::json::array();
  for (const auto& hop : p.W) {
    nlohmann::json per_rel = nlohmann::json::array();
    for (const auto& mat : hop) per_rel.push_back(detail::matrix_to_json(mat));
    w.push_back(std::move(per_rel));
  }
  j["W"] = std::move(w);
  j["V"] = detail::matrix_to_json(p.V);
  j["Vp"] = detail::matrix_to_json(p.Vp);
  j["att"] = {{"f_mlp", detail::mlp_to_json(p.att.f_mlp)},
              {"g_mlp", detail::mlp_to_json(p.att.g_mlp)},
              {"delta_mlp", detail::mlp_to_json(p.att.delta_mlp)},
              {"tau", detail::matrix_to_json(p.att.tau)}};
  j["B_hop"] = detail::matrix_to_json(p.B_hop);
  j["P_pool"] = detail::matrix_to_json(p.P_pool);
  j["rho"] = detail::mlp_to_json(p.rho);
  return j;
}

inline ModelParams params_from_json(const nlohmann::json& j) {
  const std::string what = "params_from_json";
  ModelDims dims;
  dims.d_in = detail::int_field(j, "d_in", what);
  dims.d = detail::int_field(j, "d", what);
  dims.d_out = detail::int_field(j, "d_out", what);
  dims.d_s = detail::int_field(j, "d_s", what);
  dims.K = detail::int_field(j, "K", what);
  dims.m = detail::int_field(j, "m", what);
  dims.h_att = detail::int_field(j, "h_att", what);
  const auto& act = detail::require_key(j, "activation", what);
  if (!act.is_string()) throw ParseError(what + ": activation must be string");
  dims.activation = act.get<std::string>();
  if (dims.d_in < 1 || dims.d < 1 || dims.d_out < 1 || dims.d_s < 1 ||
      dims.K < 1 || dims.m < 1 || dims.h_att < 1)
    throw ParseError(what + ": all dimensions must be >= 1");

  const std::size_t d_in = static_cast<std::size_t>(dims.d_in);
  const std::size_t d = static_cast<std::size_t>(dims.d);
  const std::size_t d_out = static_cast<std::size_t>(dims.d_out);
  const std::size_t d_s = static_cast<std::size_t>(dims.d_s);
  const std::size_t m = static_cast<std::size_t>(dims.m);

  ModelParams p;
  p.dims = dims;
  const auto& seed = detail::require_key(j, "seed", what);
  if (!seed.is_number_unsigned() && !seed.is_number_integer())
    throw ParseError(what + ": seed must be an integer");
  p.seed = seed.get<std::uint64_t>();

  const auto& u = detail::require_key(j, "U", what);
  const auto& bias = detail::require_key(j, "b", what);
  if (!u.is_array() || u.size() != 3 || !bias.is_array() || bias.size() != 3)
    throw ParseError(what + ": U and b must each hold 3 entries");
  for (int t = 0; t < 3; ++t) {
    p.U.push_back(detail::matrix_from_json(u[t], d, d_in, what + ".U"));
    p.b.push_back(detail::vector_from_json(bias[t], d, what + ".b"));
  }

  const auto& w = detail::require_key(j, "W", what);
  if (!w.is_array() || w.size() != static_cast<std::size_t>(dims.K))
    throw ParseError(what + ": W must hold K hop groups");
  for (const auto& hop : w) {
    if (!hop.is_array() || hop.size() != m + 1)
      throw ParseError(what + ": each W hop group must hold m+1 matrices");
    std::vector<DenseMatrix> per_rel;
    for (const auto& mat : hop)
      per_rel.push_back(detail::matrix_from_json(mat, d, d, what + ".W"));
    p.W.push_back(std::move(per_rel));
  }

  p.V = detail::matrix_from_json(detail::require_key(j, "V", what), d_out,
                                 d_in, what + ".V");
  p.Vp = detail::matrix_from_json(detail::require_key(j, "Vp", what), d_out, d,
                                  what + ".Vp");

  const auto& att = detail::require_key(j, "att", what);
  p.att.f_mlp = detail::mlp_from_json(
      detail::require_key(att, "f_mlp", what), 3 + d_s, 1, what + ".f_mlp");
  p.att.g_mlp = detail::mlp_from_json(
      detail::require_key(att, "g_mlp", what), 3 + d_s, 1, what + ".g_mlp");
  p.att.delta_mlp =
      detail::mlp_from_json(detail::require_key(att, "delta_mlp", what),
                            m + d_s, 1, what + ".delta_mlp");
  p.att.tau = detail::matrix_from_json(detail::require_key(att, "tau", what),
                                       m, m, what + ".tau");
  p.att.m = dims.m;
  p.att.d_s = dims.d_s;

  p.B_hop = detail::matrix_from_json(detail::require_key(j, "B_hop", what),
                                     d_s, d, what + ".B_hop");
  p.P_pool = detail::matrix_from_json(detail::require_key(j, "P_pool", what),
                                      d_s, d_out, what + ".P_pool");
  p.rho = detail::mlp_from_json(detail::require_key(j, "rho", what),
                                d_s + d_out, 1, what + ".rho");
  p.dims.rho_hidden = static_cast<int>(p.rho.hidden_dim());
  return p;
}

inline nlohmann::json rn_params_to_json(const RnParams& p) {
  return {{"W_tilde", detail::matrix_to_json(p.W_tilde)},
          {"E_tilde", detail::matrix_to_json(p.E_tilde)},
          {"H_tilde", detail::matrix_to_json(p.H_tilde)}};
}

inline RnParams rn_params_from_json(const nlohmann::json& j) {
  const std::string what = "rn_params_from_json";
  const auto& wt = detail::require_key(j, "W_tilde", what);
  const auto& et = detail::require_key(j, "E_tilde", what);
  const auto& ht = detail::require_key(j, "H_tilde", what);
  if (!wt.is_array() || wt.empty() || !wt[0].is_array())
    throw ParseError(what + ": W_tilde must be a non-empty 2-d array");
  if (!et.is_array() || !ht.is_array() || ht.empty() || !ht[0].is_array())
    throw ParseError(what + ": E_tilde and H_tilde must be 2-d arrays");
  const std::size_t d1 = ht[0].size();
  const std::size_t d2 = (et.empty() || !et[0].is_array()) ? 0 : et[0].size();
  const std::size_t d3 = wt.size();
  if (wt[0].size() != 2 * d1 + d2)
    throw ParseError(what + ": W_tilde width must equal 2*d1 + d2");
  RnParams p;
  p.W_tilde = detail::matrix_from_json(wt, d3, 2 * d1 + d2, what + ".W_tilde");
  p.E_tilde = detail::matrix_from_json(et, et.size(), d2, what + ".E_tilde");
  p.H_tilde = detail::matrix_from_json(ht, ht.size(), d1, what + ".H_tilde");
  return p;
}

namespace detail {

inline nlohmann::json parse_json_file(const std::string& path,
                                      const std::string& what) {
  std::ifstream in(path);
  if (!in) throw IoError(what + ": cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError(what + ": malformed JSON in " + path);
  return j;
}

}  // namespace detail

inline void write_params(const std::string& path, const ModelParams& p) {
  std::ofstream out(path);
  if (!out) throw IoError("write_params: cannot open " + path);
  out << params_to_json(p).dump(1) << "\n";
  if (!out) throw IoError("write_params: write failed for " + path);
}

inline ModelParams read_params(const std::string& path) {
  return params_from_json(detail::parse_json_file(path, "read_params"));
}

inline void write_rn_params(const std::string& path, const RnParams& p) {
  std::ofstream out(path);
  if (!out) throw IoError("write_rn_params: cannot open " + path);
  out << rn_params_to_json(p).dump(1) << "\n";
  if (!out) throw IoError("write_rn_params: write failed for " + path);
}

inline RnParams read_rn_params(const std::string& path) {
  return rn_params_from_json(detail::parse_json_file(path, "read_rn_params"));
}

}  // namespace mhgrn
