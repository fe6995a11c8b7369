#pragma once

// Scalar reference arithmetic shared by the scalar kernel set and the
// strided fallbacks. The SIMD kernels reproduce exactly this operation order.

#include "iontrap/kernels.hpp"

namespace iontrap::detail {

struct CMulParts {
  double re, im;
};

// (a.re*v.re - a.im*v.im, a.re*v.im + a.im*v.re), matching addsub lanes.
inline CMulParts cmul(const Complex& a, double vr, double vi) {
  const double ar = a.real();
  const double ai = a.imag();
  return {ar * vr - ai * vi, ar * vi + ai * vr};
}

inline void rotate_pair(Complex& x, Complex& y, const PairMatrix& m) {
  const double xr = x.real(), xi = x.imag();
  const double yr = y.real(), yi = y.imag();
  const CMulParts a = cmul(m.m00, xr, xi);
  const CMulParts b = cmul(m.m01, yr, yi);
  const CMulParts c = cmul(m.m10, xr, xi);
  const CMulParts d = cmul(m.m11, yr, yi);
  x = Complex(a.re + b.re, a.im + b.im);
  y = Complex(c.re + d.re, c.im + d.im);
}

}  // namespace iontrap::detail
