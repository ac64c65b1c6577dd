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

#include <cstdio>
#include <initializer_list>
#include <string>
#include <vector>

#include "ergolab/core.hpp"

namespace ergolab {

enum class Geometry { ChainOpen, ChainPeriodic };

inline std::string to_string(Geometry g) {
  return g == Geometry::ChainOpen ? "chain-open" : "chain-periodic";
}

inline Geometry geometry_from_string(const std::string& s) {
  if (s == "chain-open" || s == "open") return Geometry::ChainOpen;
  if (s == "chain-periodic" || s == "periodic") return Geometry::ChainPeriodic;
  throw StructuralError("unknown geometry '" + s + "'");
}

/// A finite lattice of `num_sites` sites, each carrying a `local_dim`-level
/// system. Basis index convention: site 0 is the most significant base-d
/// digit, so |s_0 s_1 ... s_{N-1}> has index sum_x s_x d^(N-1-x).
struct LatticeSpec {
  int num_sites = 2;
  int local_dim = 2;
  int dimensionality = 1;
  Geometry geometry = Geometry::ChainOpen;

  void validate() const {
    if (num_sites < 2) throw StructuralError("lattice needs at least two sites");
    if (local_dim < 1) throw StructuralError("local dimension must be positive");
    if (dimensionality != 1) throw UnsupportedError("only one-dimensional chains are supported");
    (void)checked_pow(static_cast<std::size_t>(local_dim), static_cast<std::size_t>(num_sites));
  }

  std::size_t hilbert_dim() const {
    return checked_pow(static_cast<std::size_t>(local_dim), static_cast<std::size_t>(num_sites));
  }

  /// Place value of site x in the computational index.
  std::size_t stride(int x) const {
    return checked_pow(static_cast<std::size_t>(local_dim), static_cast<std::size_t>(num_sites - 1 - x));
  }

  int digit(std::size_t index, int x) const {
    return static_cast<int>((index / stride(x)) % static_cast<std::size_t>(local_dim));
  }

  /// Lattice distance, with wrap-around on periodic chains.
  int distance(int a, int b) const {
    int r = a > b ? a - b : b - a;
    if (geometry == Geometry::ChainPeriodic) r = std::min(r, num_sites - r);
    return r;
  }

  bool operator==(const LatticeSpec&) const = default;
};

inline LatticeSpec chain(int n, int d = 2, Geometry g = Geometry::ChainOpen) {
  LatticeSpec l{n, d, 1, g};
  l.validate();
  return l;
}

/// Sorted, duplicate-free subset of lattice sites. May be non-contiguous.
class SiteSet {
 public:
  SiteSet() = default;

  SiteSet(const LatticeSpec& lattice, std::vector<int> sites) : lattice_(lattice), sites_(std::move(sites)) {
    std::sort(sites_.begin(), sites_.end());
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      if (sites_[i] < 0 || sites_[i] >= lattice_.num_sites)
        throw StructuralError("site index " + std::to_string(sites_[i]) + " outside lattice");
      if (i > 0 && sites_[i] == sites_[i - 1])
        throw StructuralError("duplicate site " + std::to_string(sites_[i]));
    }
  }

  SiteSet(const LatticeSpec& lattice, std::initializer_list<int> sites)
      : SiteSet(lattice, std::vector<int>(sites)) {}

  static SiteSet all(const LatticeSpec& lattice) {
    std::vector<int> s(static_cast<std::size_t>(lattice.num_sites));
    for (int i = 0; i < lattice.num_sites; ++i) s[static_cast<std::size_t>(i)] = i;
    return SiteSet(lattice, std::move(s));
  }

  /// `length` consecutive sites starting at `start`; wraps on periodic chains.
  static SiteSet contiguous(const LatticeSpec& lattice, int start, int length) {
    std::vector<int> s;
    for (int k = 0; k < length; ++k) {
      int x = start + k;
      if (lattice.geometry == Geometry::ChainPeriodic) x %= lattice.num_sites;
      s.push_back(x);
    }
    return SiteSet(lattice, std::move(s));
  }

  /// Sites offset, offset + spacing, ... that stay inside the lattice. On a
  /// periodic chain the last site also keeps `spacing` distance to the first.
  static SiteSet sublattice(const LatticeSpec& lattice, int offset, int spacing) {
    if (spacing < 1) throw StructuralError("sublattice spacing must be positive");
    std::vector<int> s;
    for (int x = offset; x < lattice.num_sites; x += spacing) s.push_back(x);
    if (lattice.geometry == Geometry::ChainPeriodic) {
      while (s.size() > 1 && lattice.distance(s.back(), s.front()) < spacing) s.pop_back();
    }
    return SiteSet(lattice, std::move(s));
  }

  static SiteSet from_mask(const LatticeSpec& lattice, std::uint64_t mask) {
    std::vector<int> s;
    for (int x = 0; x < lattice.num_sites; ++x)
      if (mask >> x & 1u) s.push_back(x);
    return SiteSet(lattice, std::move(s));
  }

  const LatticeSpec& lattice() const { return lattice_; }
  const std::vector<int>& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }

  bool contains(int x) const { return std::binary_search(sites_.begin(), sites_.end(), x); }

  SiteSet complement() const {
    std::vector<int> s;
    for (int x = 0; x < lattice_.num_sites; ++x)
      if (!contains(x)) s.push_back(x);
    return SiteSet(lattice_, std::move(s));
  }

  /// Hilbert-space dimension d^|A|.
  std::size_t dim() const { return checked_pow(static_cast<std::size_t>(lattice_.local_dim), sites_.size()); }

  /// Bit x set iff site x is in the set.
  std::uint64_t mask() const {
    std::uint64_t m = 0;
    for (int x : sites_) m |= std::uint64_t{1} << x;
    return m;
  }

  std::string mask_hex() const {
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(mask()));
    return buf;
  }

  /// Positions of this set's sites inside `parent`, as a set on the reduced
  /// lattice of |parent| sites.
  SiteSet relative_to(const SiteSet& parent) const {
    LatticeSpec sub{static_cast<int>(parent.size()), lattice_.local_dim, 1, Geometry::ChainOpen};
    std::vector<int> pos;
    for (int x : sites_) {
      auto it = std::lower_bound(parent.sites_.begin(), parent.sites_.end(), x);
      if (it == parent.sites_.end() || *it != x) throw StructuralError("site set is not contained in parent");
      pos.push_back(static_cast<int>(it - parent.sites_.begin()));
    }
    return SiteSet(sub, std::move(pos));
  }

  bool operator==(const SiteSet& o) const { return lattice_ == o.lattice_ && sites_ == o.sites_; }

 private:
  LatticeSpec lattice_{};
  std::vector<int> sites_;
};

/// Splits computational indices into (kept, rest) sub-indices. Both
/// sub-indices keep site-0-most-significant order within their part.
class IndexSplit {
 public:
  IndexSplit(const LatticeSpec& lattice, const SiteSet& keep) {
    const std::size_t dim = lattice.hilbert_dim();
    keep_.resize(dim);
    rest_.resize(dim);
    const auto d = static_cast<std::size_t>(lattice.local_dim);
    std::vector<std::size_t> keep_w(static_cast<std::size_t>(lattice.num_sites), 0);
    std::vector<std::size_t> rest_w(static_cast<std::size_t>(lattice.num_sites), 0);
    std::size_t kw = 1, rw = 1;
    for (int x = lattice.num_sites - 1; x >= 0; --x) {
      if (keep.contains(x)) {
        keep_w[static_cast<std::size_t>(x)] = kw;
        kw *= d;
      } else {
        rest_w[static_cast<std::size_t>(x)] = rw;
        rw *= d;
      }
    }
    keep_dim_ = kw;
    rest_dim_ = rw;
    // Digits are enumerated incrementally (odometer) to avoid divisions.
    std::vector<int> digits(static_cast<std::size_t>(lattice.num_sites), 0);
    std::size_t k = 0, r = 0;
    for (std::size_t i = 0; i < dim; ++i) {
      keep_[i] = k;
      rest_[i] = r;
      for (int x = lattice.num_sites - 1; x >= 0; --x) {
        auto ux = static_cast<std::size_t>(x);
        if (++digits[ux] < lattice.local_dim) {
          k += keep_w[ux];
          r += rest_w[ux];
          break;
        }
        digits[ux] = 0;
        k -= keep_w[ux] * (d - 1);
        r -= rest_w[ux] * (d - 1);
      }
    }
  }

  std::size_t keep_dim() const { return keep_dim_; }
  std::size_t rest_dim() const { return rest_dim_; }
  std::size_t keep(std::size_t i) const { return keep_[i]; }
  std::size_t rest(std::size_t i) const { return rest_[i]; }

 private:
  std::vector<std::size_t> keep_, rest_;
  std::size_t keep_dim_ = 1, rest_dim_ = 1;
};

}  // namespace ergolab
