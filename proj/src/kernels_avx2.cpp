// AVX2 variants of the engine kernels. Compiled with -mavx2 only (no FMA), so
// every product and sum rounds exactly like the scalar reference.

#include <immintrin.h>

#include "iontrap/kernels.hpp"
#include "kernels_scalar_inl.hpp"

namespace iontrap::detail {

namespace {

// Two complex numbers per register: [re0, im0, re1, im1].
inline __m256d cmul2(__m256d re, __m256d im, __m256d v) {
  const __m256d swapped = _mm256_permute_pd(v, 0x5);
  return _mm256_addsub_pd(_mm256_mul_pd(re, v), _mm256_mul_pd(im, swapped));
}

void rotate_runs_avx2(Complex* x, Complex* y, std::size_t n, const PairMatrix& m) {
  const __m256d r00 = _mm256_set1_pd(m.m00.real()), i00 = _mm256_set1_pd(m.m00.imag());
  const __m256d r01 = _mm256_set1_pd(m.m01.real()), i01 = _mm256_set1_pd(m.m01.imag());
  const __m256d r10 = _mm256_set1_pd(m.m10.real()), i10 = _mm256_set1_pd(m.m10.imag());
  const __m256d r11 = _mm256_set1_pd(m.m11.real()), i11 = _mm256_set1_pd(m.m11.imag());
  double* xd = reinterpret_cast<double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    const __m256d nx = _mm256_add_pd(cmul2(r00, i00, xv), cmul2(r01, i01, yv));
    const __m256d ny = _mm256_add_pd(cmul2(r10, i10, xv), cmul2(r11, i11, yv));
    _mm256_storeu_pd(xd + 2 * i, nx);
    _mm256_storeu_pd(yd + 2 * i, ny);
  }
  for (; i < n; ++i) {
    rotate_pair(x[i], y[i], m);
  }
}

void rotate_adjacent_avx2(Complex* v, std::size_t npairs, const PairMatrix& m) {
  // register holds one pair [x, y]; produce [x', y'] = [m00 x + m01 y, m10 x + m11 y]
  const __m256d ra = _mm256_setr_pd(m.m00.real(), m.m00.real(), m.m10.real(), m.m10.real());
  const __m256d ia = _mm256_setr_pd(m.m00.imag(), m.m00.imag(), m.m10.imag(), m.m10.imag());
  const __m256d rb = _mm256_setr_pd(m.m01.real(), m.m01.real(), m.m11.real(), m.m11.real());
  const __m256d ib = _mm256_setr_pd(m.m01.imag(), m.m01.imag(), m.m11.imag(), m.m11.imag());
  double* d = reinterpret_cast<double*>(v);
  for (std::size_t i = 0; i < npairs; ++i) {
    const __m256d p = _mm256_loadu_pd(d + 4 * i);
    const __m256d xx = _mm256_permute2f128_pd(p, p, 0x00);
    const __m256d yy = _mm256_permute2f128_pd(p, p, 0x11);
    _mm256_storeu_pd(d + 4 * i, _mm256_add_pd(cmul2(ra, ia, xx), cmul2(rb, ib, yy)));
  }
}

void scale_avx2(Complex* v, std::size_t n, double factor) {
  const __m256d f = _mm256_set1_pd(factor);
  double* d = reinterpret_cast<double*>(v);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(d + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(d + 2 * i), f));
  }
  for (; i < n; ++i) {
    v[i] = Complex(v[i].real() * factor, v[i].imag() * factor);
  }
}

double norm_sq_avx2(const Complex* v, std::size_t n) {
  const double* d = reinterpret_cast<const double*>(v);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d x = _mm256_loadu_pd(d + 2 * i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(x, x));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  if (i < n) {
    lane[0] += v[i].real() * v[i].real();
    lane[1] += v[i].imag() * v[i].imag();
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

Complex dot_avx2(const Complex* a, const Complex* b, std::size_t n) {
  const double* ad = reinterpret_cast<const double*>(a);
  const double* bd = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d av = _mm256_loadu_pd(ad + 2 * i);
    const __m256d bv = _mm256_loadu_pd(bd + 2 * i);
    acc_re = _mm256_add_pd(acc_re, _mm256_mul_pd(av, bv));
    acc_im = _mm256_add_pd(acc_im, _mm256_mul_pd(av, _mm256_permute_pd(bv, 0x5)));
  }
  alignas(32) double re[4];
  alignas(32) double im[4];
  _mm256_store_pd(re, acc_re);
  _mm256_store_pd(im, acc_im);
  if (i < n) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re[0] += ar * br;
    re[1] += ai * bi;
    im[0] += ar * bi;
    im[1] += ai * br;
  }
  return Complex((re[0] + re[1]) + (re[2] + re[3]), (im[0] - im[1]) + (im[2] - im[3]));
}

}  // namespace

const KernelSet& avx2_kernel_set() {
  static const KernelSet set{"avx2", rotate_runs_avx2, rotate_adjacent_avx2, scale_avx2,
                             norm_sq_avx2, dot_avx2};
  return set;
}

}  // namespace iontrap::detail
