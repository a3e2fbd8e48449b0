#pragma once

// Leg numbering for tensor products. An element of V_0 ⊗ ... ⊗ V_{k-1} is a
// coefficient vector in row-major order (leg 0 most significant). Every leg
// manipulation (x_12, x_13, flips) in the library goes through these maps.

#include "kacsub/errors.hpp"
#include "kacsub/linalg.hpp"

#include <numeric>
#include <vector>

namespace kacsub::legs {

using Dims = std::vector<Index>;
using Perm = std::vector<Index>;

inline Index total(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

inline Index flatten(const Dims& dims, const std::vector<Index>& multi) {
  Index flat = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) flat = flat * dims[k] + multi[k];
  return flat;
}

inline std::vector<Index> unflatten(const Dims& dims, Index flat) {
  std::vector<Index> multi(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    multi[k] = flat % dims[k];
    flat /= dims[k];
  }
  return multi;
}

inline void check_perm(const Dims& dims, const Perm& perm) {
  if (perm.size() != dims.size()) throw Error(ErrorKind::DimensionMismatch, "leg permutation size");
  std::vector<bool> seen(perm.size(), false);
  for (Index p : perm) {
    if (p < 0 || p >= static_cast<Index>(perm.size()) || seen[p])
      throw Error(ErrorKind::InvalidInput, "not a permutation of legs");
    seen[p] = true;
  }
}

inline Dims permuted_dims(const Dims& dims, const Perm& perm) {
  Dims out(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) out[k] = dims[perm[k]];
  return out;
}

/// source[n] = flat index in the original layout of the entry that lands at
/// flat index n after moving leg perm[k] to position k.
inline std::vector<Index> source_indices(const Dims& dims, const Perm& perm) {
  check_perm(dims, perm);
  const Dims out_dims = permuted_dims(dims, perm);
  const Index n = total(dims);
  std::vector<Index> source(n);
  std::vector<Index> old_multi(dims.size());
  for (Index flat = 0; flat < n; ++flat) {
    auto multi = unflatten(out_dims, flat);
    for (std::size_t k = 0; k < perm.size(); ++k) old_multi[perm[k]] = multi[k];
    source[flat] = flatten(dims, old_multi);
  }
  return source;
}

inline Vec permute(const Vec& x, const Dims& dims, const Perm& perm) {
  if (x.size() != total(dims)) throw Error(ErrorKind::DimensionMismatch, "leg permute: vector size");
  const auto src = source_indices(dims, perm);
  Vec out(x.size());
  for (Index n = 0; n < x.size(); ++n) out(n) = x(src[n]);
  return out;
}

/// Matrix P with P x = permute(x, dims, perm).
inline Mat permutation_matrix(const Dims& dims, const Perm& perm) {
  const auto src = source_indices(dims, perm);
  const Index n = static_cast<Index>(src.size());
  Mat p = Mat::Zero(n, n);
  for (Index i = 0; i < n; ++i) p(i, src[i]) = 1.0;
  return p;
}

/// Flip of a two-leg tensor product V_0 ⊗ V_1 -> V_1 ⊗ V_0.
inline Mat flip(Index d0, Index d1) { return permutation_matrix({d0, d1}, {1, 0}); }

/// Places the legs of `x` (dims `x_dims`) at positions `positions` inside a
/// product with `out_dims`; each remaining leg l receives `fillers[l]`
/// (typically the unit of that factor). `fillers` is indexed by output leg;
/// entries at occupied positions are ignored.
inline Vec place(const Vec& x, const Dims& x_dims, const Dims& out_dims,
                 const std::vector<Index>& positions, const std::vector<Vec>& fillers) {
  if (positions.size() != x_dims.size()) throw Error(ErrorKind::DimensionMismatch, "leg place: positions");
  std::vector<bool> used(out_dims.size(), false);
  for (std::size_t k = 0; k < positions.size(); ++k) {
    if (out_dims[positions[k]] != x_dims[k]) throw Error(ErrorKind::DimensionMismatch, "leg place: dims");
    used[positions[k]] = true;
  }
  // Build x ⊗ fillers (in increasing free-leg order), then permute into place.
  Vec y = x;
  Dims y_dims = x_dims;
  std::vector<Index> origin(positions.begin(), positions.end());
  for (std::size_t l = 0; l < out_dims.size(); ++l) {
    if (used[l]) continue;
    if (fillers.size() <= l || fillers[l].size() != out_dims[l])
      throw Error(ErrorKind::DimensionMismatch, "leg place: filler");
    y = kron(y, fillers[l]);
    y_dims.push_back(out_dims[l]);
    origin.push_back(static_cast<Index>(l));
  }
  // origin[m] = output position of y's leg m; invert to get the permutation.
  Perm perm(out_dims.size());
  for (std::size_t m = 0; m < origin.size(); ++m) perm[origin[m]] = static_cast<Index>(m);
  return permute(y, y_dims, perm);
}

}  // namespace kacsub::legs
