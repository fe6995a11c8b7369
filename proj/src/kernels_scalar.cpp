#include <cmath>

#include "iontrap/kernels.hpp"
#include "kernels_scalar_inl.hpp"

namespace iontrap {

PairMatrix PairMatrix::rotation(double theta, double phi) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const double sp = std::sin(phi);
  const double cp = std::cos(phi);
  // -i e^{-i phi} = -sin(phi) - i cos(phi);  -i e^{i phi} = sin(phi) - i cos(phi)
  return PairMatrix{Complex(c, 0.0), Complex(-s * sp, -s * cp), Complex(s * sp, -s * cp),
                    Complex(c, 0.0)};
}

namespace {

void rotate_runs_scalar(Complex* x, Complex* y, std::size_t n, const PairMatrix& m) {
  for (std::size_t i = 0; i < n; ++i) {
    detail::rotate_pair(x[i], y[i], m);
  }
}

void rotate_adjacent_scalar(Complex* v, std::size_t npairs, const PairMatrix& m) {
  for (std::size_t i = 0; i < npairs; ++i) {
    detail::rotate_pair(v[2 * i], v[2 * i + 1], m);
  }
}

void scale_scalar(Complex* v, std::size_t n, double factor) {
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = Complex(v[i].real() * factor, v[i].imag() * factor);
  }
}

double norm_sq_scalar(const Complex* v, std::size_t n) {
  // lane k accumulates double k of each 4-double block
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t full = n & ~std::size_t{1};
  for (std::size_t i = 0; i < full; i += 2) {
    lane[0] += v[i].real() * v[i].real();
    lane[1] += v[i].imag() * v[i].imag();
    lane[2] += v[i + 1].real() * v[i + 1].real();
    lane[3] += v[i + 1].imag() * v[i + 1].imag();
  }
  if (full != n) {
    lane[0] += v[full].real() * v[full].real();
    lane[1] += v[full].imag() * v[full].imag();
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

Complex dot_scalar(const Complex* a, const Complex* b, std::size_t n) {
  double re[4] = {0.0, 0.0, 0.0, 0.0};
  double im[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t full = n & ~std::size_t{1};
  for (std::size_t i = 0; i < full; i += 2) {
    for (std::size_t k = 0; k < 2; ++k) {
      const double ar = a[i + k].real(), ai = a[i + k].imag();
      const double br = b[i + k].real(), bi = b[i + k].imag();
      re[2 * k] += ar * br;
      re[2 * k + 1] += ai * bi;
      im[2 * k] += ar * bi;
      im[2 * k + 1] += ai * br;
    }
  }
  if (full != n) {
    const double ar = a[full].real(), ai = a[full].imag();
    const double br = b[full].real(), bi = b[full].imag();
    re[0] += ar * br;
    re[1] += ai * bi;
    im[0] += ar * bi;
    im[1] += ai * br;
  }
  return Complex((re[0] + re[1]) + (re[2] + re[3]), (im[0] - im[1]) + (im[2] - im[3]));
}

}  // namespace

const KernelSet& scalar_kernels() {
  static const KernelSet set{"scalar", rotate_runs_scalar, rotate_adjacent_scalar, scale_scalar,
                             norm_sq_scalar, dot_scalar};
  return set;
}

}  // namespace iontrap
