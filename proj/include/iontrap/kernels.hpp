#pragma once

#include <cstddef>
#include <string_view>

#include "iontrap/types.hpp"

namespace iontrap {

/// 2x2 complex matrix applied to an amplitude pair (first, second):
///   first'  = m00 * first + m01 * second
///   second' = m10 * first + m11 * second
struct PairMatrix {
  Complex m00, m01, m10, m11;

  /// Laser pulse rotation: cos(theta/2) on the diagonal,
  /// -i e^{-i phi} sin(theta/2) above and -i e^{i phi} sin(theta/2) below.
  static PairMatrix rotation(double theta, double phi);
};

/// Data-parallel inner loops of the state-vector engine. Every variant
/// performs the same floating point operations in the same order, so
/// all variants produce bit-identical results.
struct KernelSet {
  const char* name;

  /// Pairs (x[i], y[i]) for i < n, where x and y are disjoint runs.
  void (*rotate_runs)(Complex* x, Complex* y, std::size_t n, const PairMatrix& m);

  /// Pairs (v[2i], v[2i+1]) for i < npairs.
  void (*rotate_adjacent)(Complex* v, std::size_t npairs, const PairMatrix& m);

  void (*scale)(Complex* v, std::size_t n, double factor);

  /// Sum of |v[i]|^2 with four fixed accumulation lanes.
  double (*norm_sq)(const Complex* v, std::size_t n);

  /// Sum of conj(a[i]) * b[i] with fixed accumulation lanes.
  Complex (*dot)(const Complex* a, const Complex* b, std::size_t n);
};

const KernelSet& scalar_kernels();

/// nullptr when not compiled in or the CPU lacks the instructions.
const KernelSet* avx2_kernels();

/// Kernel set chosen at first use: `IONTRAP_KERNEL=scalar|avx2` forces a
/// variant, otherwise the widest supported one.
const KernelSet& active_kernels();

/// Looks up a variant by name ("scalar", "avx2", "auto").
const KernelSet* kernels_by_name(std::string_view name);

}  // namespace iontrap
