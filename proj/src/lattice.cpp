#include "qdyn/lattice.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "qdyn/errors.hpp"

namespace qdyn {

std::string to_string(Model m) {
  switch (m) {
    case Model::Fibonacci: return "fib";
    case Model::PeriodDoubling: return "pd";
    case Model::ThueMorse: return "tm";
    case Model::ExplicitPeriodic: return "periodic";
    case Model::Free: return "free";
  }
  return "?";
}

std::string to_string(Geometry g) {
  return g == Geometry::WholeLine ? "whole" : "half";
}

Model parse_model(const std::string& s) {
  if (s == "fib" || s == "fibonacci") return Model::Fibonacci;
  if (s == "pd" || s == "period-doubling") return Model::PeriodDoubling;
  if (s == "tm" || s == "thue-morse") return Model::ThueMorse;
  if (s == "periodic") return Model::ExplicitPeriodic;
  if (s == "free") return Model::Free;
  throw DomainError("unknown model '" + s + "'");
}

Geometry parse_geometry(const std::string& s) {
  if (s == "whole") return Geometry::WholeLine;
  if (s == "half") return Geometry::HalfLineDirichlet;
  throw DomainError("unknown geometry '" + s + "'");
}

void LatticeWindow::validate() const {
  if (lo > hi) throw DomainError("lattice window with lo > hi");
  if (geometry == Geometry::HalfLineDirichlet && lo < 1)
    throw DomainError("half-line window must start at site >= 1");
}

LatticeWindow LatticeWindow::around_origin(Geometry g, long radius) {
  if (g == Geometry::HalfLineDirichlet) return {1, 1 + radius, g};
  return {1 - radius, 1 + radius, g};
}

namespace {

using u128 = unsigned __int128;

u128 isqrt(u128 x) {
  u128 r = static_cast<u128>(std::sqrt(static_cast<long double>(x)));
  while (r * r > x) --r;
  while ((r + 1) * (r + 1) <= x) ++r;
  return r;
}

long long floor_div2(long long v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

// Letter of the one-sided fixed point u = S^inf(0), sites n >= 1.
int pd_letter(long n) {  // 1 iff the 2-adic valuation of n is odd
  return std::countr_zero(static_cast<unsigned long>(n)) & 1;
}

int tm_letter(long n) { return std::popcount(static_cast<unsigned long>(n - 1)) & 1; }

int default_left_seed(Model m) { return m == Model::PeriodDoubling ? 1 : 0; }

}  // namespace

long long floor_n_omega(long long n) {
  if (n > 1'000'000'000'000'000LL || n < -1'000'000'000'000'000LL)
    throw DomainError("site index too large for exact Fibonacci evaluation");
  if (n == 0) return 0;
  const u128 mag = static_cast<u128>(n < 0 ? -n : n);
  const auto root = static_cast<long long>(isqrt(5 * mag * mag));  // floor(|n| sqrt5)
  const long long floor_n_sqrt5 = n > 0 ? root : -root - 1;      // n sqrt5 is irrational
  // n*omega = (n sqrt5 - n) / 2 and n sqrt5 has fractional part in (0, 1)
  return floor_div2(floor_n_sqrt5 - n);
}

int potential_letter(const PotentialSpec& spec, long n) {
  if (spec.geometry == Geometry::HalfLineDirichlet && n < 1)
    throw DomainError("site " + std::to_string(n) + " outside the half-line");
  switch (spec.model) {
    case Model::Free: return 0;
    case Model::Fibonacci:
      // chi_[1-omega,1)(n omega mod 1) = floor((n+1) omega) - floor(n omega)
      return static_cast<int>(floor_n_omega(n + 1) - floor_n_omega(n));
    case Model::PeriodDoubling: {
      if (n >= 1) return pd_letter(n);
      const int a = spec.left_seed < 0 ? default_left_seed(spec.model) : spec.left_seed;
      return n == 0 ? a : pd_letter(-n);
    }
    case Model::ThueMorse: {
      if (n >= 1) return tm_letter(n);
      const int a = spec.left_seed < 0 ? default_left_seed(spec.model) : spec.left_seed;
      return tm_letter(1 - n) ^ a;
    }
    case Model::ExplicitPeriodic: {
      if (spec.word.empty()) throw DomainError("explicit periodic potential with empty word");
      const long len = static_cast<long>(spec.word.size());
      const long r = ((n - 1) % len + len) % len;
      return spec.word[static_cast<std::size_t>(r)];
    }
  }
  return 0;
}

double potential_value(const PotentialSpec& spec, long n) {
  double v = spec.lambda * potential_letter(spec, n);
  if (!spec.perturbation.empty()) {
    if (auto it = spec.perturbation.find(n); it != spec.perturbation.end()) v += it->second;
  }
  return v;
}

std::vector<double> potential_on(const PotentialSpec& spec, const LatticeWindow& window) {
  window.validate();
  std::vector<double> v(window.size());
  for (long n = window.lo; n <= window.hi; ++n) v[window.index(n)] = potential_value(spec, n);
  return v;
}

std::string element_id(const PotentialSpec& spec) {
  std::ostringstream os;
  switch (spec.model) {
    case Model::Fibonacci: os << "fib:lambda*chi[1-w,1)(n*w mod 1),w=(sqrt5-1)/2"; break;
    case Model::PeriodDoubling:
    case Model::ThueMorse: {
      const int a = spec.left_seed < 0 ? default_left_seed(spec.model) : spec.left_seed;
      os << to_string(spec.model) << ":";
      if (spec.geometry == Geometry::WholeLine)
        os << "S^2-fixed-point " << a << ".0";
      else
        os << "S^inf(0)";
      break;
    }
    case Model::ExplicitPeriodic: {
      os << "periodic:";
      for (auto c : spec.word) os << int(c);
      break;
    }
    case Model::Free: os << "free"; break;
  }
  os << ";" << to_string(spec.geometry);
  if (!spec.perturbation.empty()) {
    os << ";perturbation{";
    bool first = true;
    for (const auto& [site, dv] : spec.perturbation) {
      if (!first) os << ",";
      os << site << ":" << dv;
      first = false;
    }
    os << "}";
  }
  return os.str();
}

Word substitute(Model model, const Word& w) {
  Word out;
  out.reserve(2 * w.size());
  for (auto c : w) {
    out.push_back(0);
    if (model == Model::PeriodDoubling)
      out.push_back(c == 0 ? 1 : 0);  // 0 -> 01, 1 -> 00
    else if (model == Model::ThueMorse) {
      out.back() = c;  // 0 -> 01, 1 -> 10
      out.push_back(c == 0 ? 1 : 0);
    } else
      throw DomainError("substitution defined only for period doubling and Thue-Morse");
  }
  return out;
}

Word substitution_word(Model model, int k, std::size_t max_length) {
  if (k < 0) throw DomainError("substitution iterate must be >= 0");
  if (k >= 62 || (std::size_t{1} << k) > max_length)
    throw ResourceError("substitution word of length 2^" + std::to_string(k) +
                        " exceeds the memory cap");
  Word w{0};
  for (int i = 0; i < k; ++i) w = substitute(model, w);
  return w;
}

Mat2 one_step_matrix(double v, cplx z) { return {z - v, -1.0, 1.0, 0.0}; }

Mat2 one_step_matrix(const PotentialSpec& spec, long n, cplx z) {
  return one_step_matrix(potential_value(spec, n), z);
}

ScaledMat2 transfer_matrix_scaled(const PotentialSpec& spec, long n, long m, cplx z) {
  if (n == m) return {};
  if (n < m) {
    ScaledMat2 fwd = transfer_matrix_scaled(spec, m, n, z);
    return {fwd.log_scale, fwd.matrix.unimodular_inverse()};
  }
  ScaledMat2 acc;
  for (long j = m + 1; j <= n; ++j) acc.left_multiply(one_step_matrix(spec, j, z));
  acc.renormalize();
  return acc;
}

Mat2 transfer_matrix(const PotentialSpec& spec, long n, long m, cplx z) {
  if (n == m) return Mat2::identity();
  if (n < m) return transfer_matrix(spec, m, n, z).unimodular_inverse();
  Mat2 acc;
  for (long j = m + 1; j <= n; ++j) {
    acc = one_step_matrix(spec, j, z) * acc;
    if ((j & 63) == 0 && !acc.finite()) break;
  }
  if (!acc.finite())
    throw ScaleOverflow("T(" + std::to_string(n) + "," + std::to_string(m) +
                        ") overflows; use transfer_matrix_scaled");
  return acc;
}

Mat2 word_product(std::span<const double> values, cplx z) {
  Mat2 acc;
  for (double v : values) acc = one_step_matrix(v, z) * acc;
  if (!acc.finite()) throw ScaleOverflow("word product overflows");
  return acc;
}

ScaledMat2 word_product_scaled(std::span<const double> values, cplx z) {
  ScaledMat2 acc;
  for (double v : values) acc.left_multiply(one_step_matrix(v, z));
  acc.renormalize();
  return acc;
}

void apply_hamiltonian(std::span<const double> potential, std::span<const cplx> v,
                       std::span<cplx> out) {
  const std::size_t n = potential.size();
  if (v.size() != n || out.size() != n) throw DomainError("dimension mismatch in H v");
  if (n == 0) return;
  if (n == 1) {
    out[0] = potential[0] * v[0];
    return;
  }
  out[0] = potential[0] * v[0] + v[1];
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = v[i - 1] + v[i + 1] + potential[i] * v[i];
  out[n - 1] = v[n - 2] + potential[n - 1] * v[n - 1];
}

std::vector<cplx> apply_hamiltonian(const PotentialSpec& spec, const LatticeWindow& window,
                                    std::span<const cplx> v) {
  const auto pot = potential_on(spec, window);
  if (v.size() != pot.size()) throw DomainError("dimension mismatch in H v");
  std::vector<cplx> out(v.size());
  apply_hamiltonian(pot, v, out);
  return out;
}

PotentialSpec perturb(const PotentialSpec& spec, const std::map<long, double>& overlay) {
  PotentialSpec out = spec;
  for (const auto& [site, dv] : overlay) out.perturbation[site] += dv;
  return out;
}

}  // namespace qdyn
