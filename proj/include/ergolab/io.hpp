// Copyright 2026 The ergolab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ergolab/state.hpp"
#include "ergolab/tensor_network.hpp"

namespace ergolab::io {

using nlohmann::json;

// Complex numbers travel as [re, im] pairs.

inline json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
  return out;
}

inline Vector vector_from_json(const json& j) {
  if (!j.is_array()) throw StructuralError("expected an array of [re, im] pairs");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw StructuralError("entry " + std::to_string(i) + " is not a [re, im] pair");
    v[static_cast<Eigen::Index>(i)] = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return v;
}

inline json state_to_json(const PureState& psi) {
  return json{{"num_sites", psi.lattice.num_sites},
              {"local_dim", psi.lattice.local_dim},
              {"geometry", to_string(psi.lattice.geometry)},
              {"amplitudes", to_json(psi.amplitudes)}};
}

inline PureState state_from_json(const json& j) {
  const LatticeSpec l = chain(j.at("num_sites").get<int>(), j.value("local_dim", 2),
                              geometry_from_string(j.value("geometry", std::string("chain-open"))));
  return PureState(l, vector_from_json(j.at("amplitudes")));
}

/// Binary state layout: magic "ERGS", int32 num_sites, int32 local_dim,
/// then d^N interleaved little-endian float64 (re, im) pairs.
inline void write_state_binary(const std::string& path, const PureState& psi) {
  static_assert(std::endian::native == std::endian::little, "binary state format assumes a little-endian host");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out.write("ERGS", 4);
  const std::int32_t n = psi.lattice.num_sites, d = psi.lattice.local_dim;
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&d), sizeof d);
  for (Eigen::Index i = 0; i < psi.amplitudes.size(); ++i) {
    const double re = psi.amplitudes[i].real(), im = psi.amplitudes[i].imag();
    out.write(reinterpret_cast<const char*>(&re), sizeof re);
    out.write(reinterpret_cast<const char*>(&im), sizeof im);
  }
}

inline PureState read_state_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "ERGS", 4) != 0) throw StructuralError(path + " is not a binary state file");
  std::int32_t n = 0, d = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&d), sizeof d);
  const LatticeSpec l = chain(n, d);
  l.validate();
  if (l.hilbert_dim() > kTol.dense_dim_guard) throw ResourceGuardError("state file exceeds the dense guard");
  Vector v(static_cast<Eigen::Index>(l.hilbert_dim()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double re = 0, im = 0;
    in.read(reinterpret_cast<char*>(&re), sizeof re);
    in.read(reinterpret_cast<char*>(&im), sizeof im);
    v[i] = Complex(re, im);
  }
  if (!in) throw StructuralError(path + " is truncated");
  return PureState(l, v);
}

/// MPS JSON: {"bond_dim": D, "tensors": [t_0, ..., t_{d-1}]}, each t_i a
/// row-major list of D*D [re, im] pairs.
inline MPSSpec mps_from_json(const json& j) {
  MPSSpec s;
  s.bond_dim = j.at("bond_dim").get<int>();
  s.label = j.value("label", std::string("file"));
  if (s.bond_dim < 1) throw StructuralError("bond_dim must be positive");
  for (const auto& t : j.at("tensors")) {
    const Vector flat = vector_from_json(t);
    if (flat.size() != static_cast<Eigen::Index>(s.bond_dim) * s.bond_dim)
      throw StructuralError("tensor does not hold bond_dim^2 entries");
    Matrix a(s.bond_dim, s.bond_dim);
    for (int r = 0; r < s.bond_dim; ++r)
      for (int c = 0; c < s.bond_dim; ++c) a(r, c) = flat[r * s.bond_dim + c];
    s.tensors.push_back(a);
  }
  s.validate();
  return s;
}

inline json mps_to_json(const MPSSpec& s) {
  json tensors = json::array();
  for (const auto& a : s.tensors) {
    Vector flat(a.size());
    for (int r = 0; r < s.bond_dim; ++r)
      for (int c = 0; c < s.bond_dim; ++c) flat[r * s.bond_dim + c] = a(r, c);
    tensors.push_back(to_json(flat));
  }
  return json{{"bond_dim", s.bond_dim}, {"label", s.label}, {"tensors", tensors}};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return json::parse(in);
}

inline MPSSpec read_mps_file(const std::string& path) { return mps_from_json(read_json_file(path)); }

/// Shortest round-trip representation of a double.
inline std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) {
    if (row.size() != header.size()) throw StructuralError("CSV row width does not match the header");
    rows.push_back(std::move(row));
  }

  std::string str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_number(r[i]);
      os << '\n';
    }
    return os.str();
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << str();
  }
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << text;
}

}  // namespace ergolab::io
