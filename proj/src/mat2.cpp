#include "qdyn/mat2.hpp"

#include <algorithm>
#include <cmath>

#include "qdyn/errors.hpp"

namespace qdyn {

Mat2 Mat2::inverse() const {
  const cplx det_value = det();
  if (det_value == cplx{0.0}) throw DomainError("singular 2x2 matrix");
  return {d / det_value, -b / det_value, -c / det_value, a / det_value};
}

bool Mat2::finite() const {
  auto ok = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
  return ok(a) && ok(b) && ok(c) && ok(d);
}

double Mat2::max_abs() const {
  return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

Mat2& Mat2::operator*=(const Mat2& rhs) {
  *this = *this * rhs;
  return *this;
}

Mat2& Mat2::operator*=(cplx s) {
  a *= s;
  b *= s;
  c *= s;
  d *= s;
  return *this;
}

Mat2& Mat2::operator+=(const Mat2& rhs) {
  a += rhs.a;
  b += rhs.b;
  c += rhs.c;
  d += rhs.d;
  return *this;
}

Mat2& Mat2::operator-=(const Mat2& rhs) {
  a -= rhs.a;
  b -= rhs.b;
  c -= rhs.c;
  d -= rhs.d;
  return *this;
}

Mat2 operator*(const Mat2& l, const Mat2& r) {
  return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d,
          l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
}

Mat2 operator*(cplx s, Mat2 m) { return m *= s; }
Mat2 operator+(Mat2 lhs, const Mat2& rhs) { return lhs += rhs; }
Mat2 operator-(Mat2 lhs, const Mat2& rhs) { return lhs -= rhs; }

namespace {

// Singular values of a 2x2 matrix: s^2 = (F +- sqrt(F^2 - 4|det|^2)) / 2,
// F the squared Frobenius norm. Entries are pre-scaled to avoid overflow.
std::pair<double, double> singular_values(const Mat2& m) {
  const double scale = m.max_abs();
  if (scale == 0.0) return {0.0, 0.0};
  if (!std::isfinite(scale)) throw ScaleOverflow("non-finite matrix entry");
  const Mat2 s = (1.0 / scale) * m;
  const double frob = std::norm(s.a) + std::norm(s.b) + std::norm(s.c) + std::norm(s.d);
  const double det_abs = std::abs(s.det());
  const double disc = std::sqrt(std::max(0.0, (frob - 2.0 * det_abs) * (frob + 2.0 * det_abs)));
  const double big = std::sqrt(0.5 * (frob + disc));
  // smallest via |det| = s_max * s_min (avoids cancellation)
  const double small = big > 0.0 ? det_abs / big : 0.0;
  return {scale * big, scale * small};
}

}  // namespace

double norm(const Mat2& m) { return singular_values(m).first; }

double min_singular_value(const Mat2& m) { return singular_values(m).second; }

void ScaledMat2::left_multiply(const Mat2& lhs) {
  matrix = lhs * matrix;
  const double mag = matrix.max_abs();
  if (mag > 1e100 || mag < 1e-100) renormalize();
}

void ScaledMat2::renormalize() {
  const double mag = matrix.max_abs();
  if (mag == 0.0) return;
  if (!std::isfinite(mag)) throw ScaleOverflow("non-finite entry in scaled product");
  matrix *= cplx{1.0 / mag};
  log_scale += std::log(mag);
}

double ScaledMat2::log_norm() const { return log_scale + std::log(norm(matrix)); }

Mat2 ScaledMat2::value() const {
  if (log_scale > 700.0) throw ScaleOverflow("transfer matrix entries exceed double range");
  return cplx{std::exp(log_scale)} * matrix;
}

}  // namespace qdyn
