#pragma once

#include <complex>

namespace qdyn {

using cplx = std::complex<double>;

/// 2x2 complex matrix [[a, b], [c, d]]. Transfer matrices are unimodular.
struct Mat2 {
  cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

  static Mat2 identity() { return {}; }

  cplx det() const { return a * d - b * c; }
  cplx trace() const { return a + d; }

  /// Inverse assuming det = 1 (adjugate).
  Mat2 unimodular_inverse() const { return {d, -b, -c, a}; }
  Mat2 inverse() const;

  bool finite() const;
  double max_abs() const;

  Mat2& operator*=(const Mat2& rhs);
  Mat2& operator*=(cplx s);
  Mat2& operator+=(const Mat2& rhs);
  Mat2& operator-=(const Mat2& rhs);
};

Mat2 operator*(const Mat2& lhs, const Mat2& rhs);
Mat2 operator*(cplx s, Mat2 m);
Mat2 operator+(Mat2 lhs, const Mat2& rhs);
Mat2 operator-(Mat2 lhs, const Mat2& rhs);

/// Spectral (operator 2-) norm, closed form via the singular values.
double norm(const Mat2& m);

/// Smallest singular value.
double min_singular_value(const Mat2& m);

/// Product kept as exp(log_scale) * matrix with ||matrix|| ~ 1, for energies
/// where entries grow beyond double range.
struct ScaledMat2 {
  double log_scale = 0.0;
  Mat2 matrix{};

  /// this <- lhs * this
  void left_multiply(const Mat2& lhs);
  void renormalize();
  double log_norm() const;
  Mat2 value() const;  // throws ScaleOverflow when exp(log_scale) overflows
};

}  // namespace qdyn
