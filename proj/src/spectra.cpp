#include "qdyn/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qdyn/errors.hpp"
#include "qdyn/parallel.hpp"
#include "qdyn/traces.hpp"

namespace qdyn {

std::string to_string(BandKind kind) {
  switch (kind) {
    case BandKind::TypeA: return "A";
    case BandKind::TypeB: return "B";
    case BandKind::Unclassified: return "-";
  }
  return "?";
}

double BandSet::measure() const {
  std::vector<double> widths;
  widths.reserve(bands.size());
  for (const auto& b : bands) widths.push_back(b.width());
  return pairwise_sum(widths);
}

double BandSet::min_width() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& b : bands) w = std::min(w, b.width());
  return w;
}

bool BandSet::contains(double E, double tol) const {
  auto it = std::lower_bound(bands.begin(), bands.end(), E - tol,
                             [](const Band& b, double e) { return b.hi < e; });
  return it != bands.end() && it->contains(E, tol);
}

int BandSet::container_of(const Band& b, double tol) const {
  auto it = std::lower_bound(bands.begin(), bands.end(), b.lo - tol,
                             [](const Band& band, double e) { return band.hi < e; });
  for (; it != bands.end() && it->lo <= b.hi + tol; ++it)
    if (it->contains(b, tol)) return static_cast<int>(it - bands.begin());
  return -1;
}

BandSet merge_touching(const BandSet& set, double tol) {
  BandSet out = set;
  out.bands.clear();
  for (const auto& b : set.bands) {
    if (!out.bands.empty() && b.lo - out.bands.back().hi <= tol)
      out.bands.back().hi = std::max(out.bands.back().hi, b.hi);
    else
      out.bands.push_back(b);
  }
  return out;
}

double golden_log() { return std::log(0.5 * (1.0 + std::sqrt(5.0))); }

BoundParameters bound_parameters(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("bound parameters need lambda > 0");
  BoundParameters p;
  p.lambda = lambda;
  p.C_lambda = 2.0 + std::sqrt(8.0 + lambda * lambda);
  p.d = p.C_lambda * (2.0 * p.C_lambda + 1.0) * (2.0 * p.C_lambda + 1.0);
  p.alpha = 2.0 * std::log(p.d) / golden_log();
  p.gamma = std::log(2.0 * lambda + 22.0) / golden_log() - 1.0;
  p.gamma_in_regime = lambda > 4.0;
  return p;
}

namespace {

// Number of eigenvalues below E of the Dirichlet restriction to values[first..].
std::size_t sturm_count(const std::vector<double>& values, std::size_t first, double E) {
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = first; i < values.size(); ++i) {
    q = (values[i] - E) - (i == first ? 0.0 : 1.0 / q);
    if (q == 0.0) q = -1e-300;
    if (q < 0.0) ++count;
  }
  return count;
}

std::vector<double> dirichlet_eigenvalues(const std::vector<double>& values, std::size_t first,
                                          double lo, double hi) {
  const std::size_t n = values.size() > first ? values.size() - first : 0;
  std::vector<double> eig(n);
  parallel_for(n, [&](std::size_t j) {
    double a = lo, b = hi;  // count(a) <= j < count(b)
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (sturm_count(values, first, mid) <= j)
        a = mid;
      else
        b = mid;
    }
    eig[j] = 0.5 * (a + b);
  });
  return eig;
}

// Bisection for a sign change of f on [a, b]; the sign of f(a) is kept on the left.
template <class F>
double sign_change(F f, double a, double b, double tol) {
  const bool left_negative = f(a) < 0;
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if ((f(mid) < 0) == left_negative) a = mid;
    else b = mid;
  }
  return 0.5 * (a + b);
}

// The band between two gap separators: x_k has exactly one zero there and
// |x_k| >= 2 off the band, so locate the zero and bisect |x_k| - 2 outwards.
Band band_between(double lambda, int k, double a, double b, double tol, bool& proper) {
  auto x = [&](double E) { return fib_trace(lambda, E, k); };
  auto excess = [&](double E) { return std::abs(fib_trace(lambda, E, k)) - 2.0; };
  const double xa = x(a), xb = x(b);
  proper = (xa < 0) != (xb < 0) && std::abs(xa) >= 2.0 && std::abs(xb) >= 2.0;
  if ((xa < 0) == (xb < 0)) return Band{a, a, BandKind::Unclassified, k};
  const double centre = sign_change(x, a, b, 0.25 * tol);
  return Band{sign_change(excess, a, centre, tol), sign_change(excess, centre, b, tol), BandKind::Unclassified, k};
}

}  // namespace

BandSet approximant_spectrum(double lambda, int k, double edge_tol) {
  if (k < 0) throw DomainError("approximant index must be >= 0");
  if (!(edge_tol > 0.0)) throw DomainError("edge tolerance must be positive");
  const auto values = fibonacci_period_values(lambda, k);
  const double vmin = *std::min_element(values.begin(), values.end());
  const double vmax = *std::max_element(values.begin(), values.end());
  const double outer_lo = vmin - 2.25, outer_hi = vmax + 2.25;

  // One Dirichlet eigenvalue in (the closure of) every gap.
  std::vector<double> sep{outer_lo};
  // Symmetric words put the Dirichlet eigenvalues of some cuts exactly on band
  // edges; take the cut whose eigenvalues sit deepest inside the gaps.
  std::vector<double> mu;
  double best = -1e300;
  for (std::size_t shift = 0; shift < std::min<std::size_t>(values.size(), 4); ++shift) {
    std::vector<double> cut(values.begin() + static_cast<long>(shift), values.end());
    cut.insert(cut.end(), values.begin(), values.begin() + static_cast<long>(shift));
    auto cand = dirichlet_eigenvalues(cut, 1, vmin - 2.0 - 1e-9, vmax + 2.0 + 1e-9);
    double margin = 1e300;
    for (double e : cand) margin = std::min(margin, std::abs(fib_trace(lambda, e, k)) - 2.0);
    if (margin > best) {
      best = margin;
      mu = std::move(cand);
    }
  }
  sep.insert(sep.end(), mu.begin(), mu.end());
  sep.push_back(outer_hi);

  BandSet out;
  out.lambda = lambda;
  out.k = k;
  out.edge_tol = edge_tol;
  out.bands.resize(sep.size() - 1);
  std::vector<int> proper(sep.size() - 1, 1);
  parallel_for(sep.size() - 1, [&](std::size_t j) {
    bool ok = false;
    out.bands[j] = band_between(lambda, k, sep[j], sep[j + 1], edge_tol, ok);
    proper[j] = ok;
  });

  const bool strict = lambda > 4.0;
  const std::size_t expected = static_cast<std::size_t>(fibonacci_number(k));
  std::ostringstream issues;
  std::size_t improper = 0, closed = 0;
  for (std::size_t j = 0; j < out.bands.size(); ++j) {
    if (!proper[j] || !(out.bands[j].width() > 0.0)) ++improper;
    if (j + 1 < out.bands.size()) {
      const double gap_lo = out.bands[j].hi, gap_hi = out.bands[j + 1].lo;
      const bool open = gap_hi - gap_lo > edge_tol &&
                        std::abs(fib_trace(lambda, 0.5 * (gap_lo + gap_hi), k)) > 2.0;
      if (!open) ++closed;
    }
  }
  if (out.bands.size() != expected) issues << "band count " << out.bands.size() << " != F_k " << expected << "; ";
  if (improper) issues << improper << " band(s) without a full -2..2 crossing; ";
  if (closed) issues << closed << " gap(s) not resolved as open; ";
  const std::string msg = issues.str();
  if (!msg.empty()) {
    if (strict)
      throw ResolutionError("sigma_" + std::to_string(k) + " at lambda=" + std::to_string(lambda) +
                            ": " + msg);
    out.warnings.push_back(msg);
  }
  return out;
}

CheckReport covering_check(const BandSet& prev, const BandSet& cur, const BandSet& next) {
  const double tol = 10.0 * std::max({prev.edge_tol, cur.edge_tol, next.edge_tol});
  BandSet parents;
  parents.bands = prev.bands;
  parents.bands.insert(parents.bands.end(), cur.bands.begin(), cur.bands.end());
  std::sort(parents.bands.begin(), parents.bands.end(),
            [](const Band& a, const Band& b) { return a.lo < b.lo; });
  parents = merge_touching(parents, tol);

  CheckReport rep;
  for (const auto* set : {&cur, &next}) {
    for (const auto& b : set->bands) {
      ++rep.checked;
      if (parents.container_of(b, tol) < 0) {
        rep.ok = false;
        std::ostringstream os;
        os.precision(17);
        os << "band [" << b.lo << ", " << b.hi << "] of sigma_" << set->k << " not covered";
        rep.violations.push_back(os.str());
      }
    }
  }
  return rep;
}

CheckReport covering_check(double lambda, int m, double edge_tol) {
  if (m < 2) throw DomainError("covering check needs m >= 2");
  return covering_check(approximant_spectrum(lambda, m - 1, edge_tol),
                        approximant_spectrum(lambda, m, edge_tol),
                        approximant_spectrum(lambda, m + 1, edge_tol));
}

BandSet classify_bands(const BandSet& cur, const BandSet* prev, const BandSet* prev2) {
  BandSet out = cur;
  const double tol = 10.0 * cur.edge_tol;
  for (auto& b : out.bands) {
    const bool in_prev = prev && prev->container_of(b, tol) >= 0;
    const bool in_prev2 = prev2 == nullptr || prev2->container_of(b, tol) >= 0;  // sigma_{-1} = R
    if (in_prev == in_prev2) {
      std::ostringstream os;
      os.precision(17);
      os << "band [" << b.lo << ", " << b.hi << "] of sigma_" << cur.k
         << (in_prev ? " lies in both sigma_{k-1} and sigma_{k-2}" : " lies in neither sigma_{k-1} nor sigma_{k-2}");
      throw ClassificationError(os.str());
    }
    b.kind = in_prev ? BandKind::TypeA : BandKind::TypeB;
  }
  return out;
}

BandSet classify_bands(double lambda, int k, double edge_tol) {
  if (!(lambda > 4.0)) throw DomainError("band classification needs lambda > 4");
  if (k < 1) throw DomainError("band classification needs k >= 1");
  const BandSet cur = approximant_spectrum(lambda, k, edge_tol);
  const BandSet prev = approximant_spectrum(lambda, k - 1, edge_tol);
  if (k == 1) return classify_bands(cur, &prev, nullptr);
  const BandSet prev2 = approximant_spectrum(lambda, k - 2, edge_tol);
  return classify_bands(cur, &prev, &prev2);
}

GenealogyReport genealogy_check(double lambda, int kmax, double edge_tol) {
  if (!(lambda > 4.0)) throw DomainError("genealogy check needs lambda > 4");
  std::vector<BandSet> raw;
  for (int k = 0; k <= kmax; ++k) raw.push_back(approximant_spectrum(lambda, k, edge_tol));
  std::vector<BandSet> sets(kmax + 1);
  sets[0] = raw[0];
  for (int k = 1; k <= kmax; ++k)
    sets[k] = classify_bands(raw[k], &raw[k - 1], k >= 2 ? &raw[k - 2] : nullptr);

  GenealogyReport rep;
  const double tol = 10.0 * edge_tol;
  auto fail = [&](const std::string& s) {
    rep.ok = false;
    rep.violations.push_back(s);
  };
  for (int k = 1; k <= kmax; ++k) {
    std::size_t a = 0, b = 0;
    for (const auto& band : sets[k].bands) (band.kind == BandKind::TypeA ? a : b)++;
    rep.type_a.push_back(a);
    rep.type_b.push_back(b);
    if (a + b != fibonacci_number(k)) fail("level " + std::to_string(k) + ": A+B != F_k");
  }
  for (int k = 1; k + 2 <= kmax; ++k) {
    for (std::size_t i = 0; i < sets[k].bands.size(); ++i) {
      const Band& parent = sets[k].bands[i];
      std::vector<const Band*> kids1, kids2;
      for (const auto& c : sets[k + 1].bands)
        if (parent.contains(c, tol)) kids1.push_back(&c);
      for (const auto& c : sets[k + 2].bands)
        if (parent.contains(c, tol)) kids2.push_back(&c);
      ++rep.checked;
      const std::string where = "sigma_" + std::to_string(k) + " band " + std::to_string(i);
      if (parent.kind == BandKind::TypeA) {
        if (!kids1.empty()) fail(where + " (A) contains bands of sigma_{k+1}");
        if (kids2.size() != 1 || kids2[0]->kind != BandKind::TypeB)
          fail(where + " (A) does not contain exactly one B band of sigma_{k+2}");
      } else {
        if (kids1.size() != 1 || kids1[0]->kind != BandKind::TypeA) {
          fail(where + " (B) does not contain exactly one A band of sigma_{k+1}");
          continue;
        }
        const bool two_b = kids2.size() == 2 && kids2[0]->kind == BandKind::TypeB &&
                           kids2[1]->kind == BandKind::TypeB;
        if (!two_b) {
          fail(where + " (B) does not contain exactly two B bands of sigma_{k+2}");
          continue;
        }
        if (!(kids2[0]->hi < kids1[0]->lo && kids2[1]->lo > kids1[0]->hi))
          fail(where + " (B) children of sigma_{k+2} do not flank the sigma_{k+1} band");
      }
    }
  }
  return rep;
}

CheckReport three_traces_check(double lambda, const std::vector<double>& energies, int kmax) {
  CheckReport rep;
  for (double E : energies) {
    const auto orbit = fib_trace_orbit(lambda, E, kmax);
    for (int j = 0; j + 2 <= orbit.k_max(); ++j) {
      ++rep.checked;
      const double m = std::max({std::abs(orbit.xs[j]), std::abs(orbit.xs[j + 1]), std::abs(orbit.xs[j + 2])});
      if (!(m > 2.0)) {
        rep.ok = false;
        std::ostringstream os;
        os.precision(17);
        os << "E=" << E << ": |x_" << j << "|,|x_" << j + 1 << "|,|x_" << j + 2 << "| <= 2";
        rep.violations.push_back(os.str());
      }
    }
  }
  return rep;
}

double f_pm(double x, double y, double lambda, int sign) {
  const double r = 4.0 * lambda * lambda + (4.0 - x * x) * (4.0 - y * y);
  if (r < 0.0) throw DomainError("f_pm: negative radicand");
  return 0.5 * (x * y + (sign >= 0 ? 1.0 : -1.0) * std::sqrt(r));
}

Partials f_pm_partials(double x, double y, double lambda, int sign) {
  const double r = 4.0 * lambda * lambda + (4.0 - x * x) * (4.0 - y * y);
  if (!(r > 0.0)) throw DomainError("f_pm: non-positive radicand");
  const double s = (sign >= 0 ? 1.0 : -1.0) / (2.0 * std::sqrt(r));
  return {0.5 * y - s * x * (4.0 - y * y), 0.5 * x - s * y * (4.0 - x * x)};
}

std::pair<double, double> sobol_2d(std::uint32_t i) {
  // first coordinate: van der Corput; second: direction numbers of x + 1
  std::uint32_t a = 0, b = 0, m = 1;
  for (int bit = 0; bit < 32; ++bit, m ^= m << 1) {
    if (i >> bit & 1u) {
      a ^= 1u << (31 - bit);
      b ^= m << (31 - bit);
    }
  }
  return {a * 0x1p-32, b * 0x1p-32};
}

PartialBoundReport partial_bound_check(double lambda, std::size_t samples) {
  if (!(lambda > 4.0)) throw DomainError("partial bound check needs lambda > 4");
  PartialBoundReport rep;
  for (std::size_t i = 0; i < samples; ++i) {
    const auto [u, v] = sobol_2d(static_cast<std::uint32_t>(i));
    const double x = 4.0 * u - 2.0, y = 4.0 * v - 2.0;
    for (int sign : {1, -1}) {
      const auto d = f_pm_partials(x, y, lambda, sign);
      const double m = std::max(std::abs(d.dx), std::abs(d.dy));
      rep.max_partial = std::max(rep.max_partial, m);
      ++rep.checked;
      if (m > 1.0 + 1e-12) {
        rep.ok = false;
        std::ostringstream os;
        os.precision(17);
        os << "(x, y) = (" << x << ", " << y << "), sign " << sign << ": " << m;
        rep.violations.push_back(os.str());
      }
    }
  }
  return rep;
}

std::vector<double> chebyshev_points(double lo, double hi, int n) {
  std::vector<double> pts(n);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < n; ++i) {
    const double t = std::cos(pi * (2.0 * i + 1.0) / (2.0 * n));
    pts[n - 1 - i] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
  }
  return pts;
}

std::vector<double> sample_band_energies(const BandSet& set, int count) {
  std::vector<double> out;
  if (set.empty() || count <= 0) return out;
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 0; i < count; ++i) {
    const std::size_t band = static_cast<std::size_t>(i) * set.size() / static_cast<std::size_t>(count);
    const double frac = 0.05 + 0.9 * std::fmod(0.5 + golden * (i + 1), 1.0);
    const auto& b = set.bands[band];
    out.push_back(b.lo + frac * b.width());
  }
  return out;
}

DerivativeRatioReport derivative_ratio_check(double lambda, int k, double edge_tol, int samples_per_band) {
  if (!(lambda > 4.0)) throw DomainError("derivative ratio check needs lambda > 4");
  if (k < 1) throw DomainError("derivative ratio check needs k >= 1");
  std::vector<BandSet> raw;
  for (int j = std::max(0, k - 1); j <= k + 2; ++j) raw.push_back(approximant_spectrum(lambda, j, edge_tol));
  // raw[...] indices: level j is raw[j - base]
  const int base = std::max(0, k - 1);
  auto level = [&](int j) -> const BandSet& { return raw[j - base]; };
  const BandSet k1 = classify_bands(level(k + 1), &level(k), &level(k - 1 >= base ? k - 1 : k));
  const BandSet k2 = classify_bands(level(k + 2), &level(k + 1), &level(k));

  DerivativeRatioReport rep;
  rep.lambda = lambda;
  rep.k = k;
  rep.bound_a = lambda + 11.0;
  rep.bound_b = 2.0 * lambda + 22.0;
  const double tol = 10.0 * edge_tol;
  auto scan = [&](const BandSet& children, int level_up, double bound, double& max_ratio) {
    for (const auto& child : children.bands) {
      const BandKind wanted = level_up == 1 ? BandKind::TypeA : BandKind::TypeB;
      if (child.kind != wanted || level(k).container_of(child, tol) < 0) continue;
      for (double E : chebyshev_points(child.lo, child.hi, samples_per_band)) {
        const auto orbit = trace_derivative_orbit(lambda, E, k + level_up);
        ++rep.samples;
        const double denom = orbit.dxs[k];
        if (denom == 0.0) {
          ++rep.skipped;
          continue;
        }
        const double ratio = std::abs(orbit.dxs[k + level_up] / denom);
        max_ratio = std::max(max_ratio, ratio);
        if (ratio > bound * (1.0 + rep.tolerance)) {
          rep.ok = false;
          std::ostringstream os;
          os.precision(17);
          os << "E=" << E << " ratio " << ratio << " > " << bound;
          rep.violations.push_back(os.str());
        }
      }
      ++rep.checked;
    }
  };
  scan(k1, 1, rep.bound_a, rep.max_ratio_a);
  scan(k2, 2, rep.bound_b, rep.max_ratio_b);
  return rep;
}

MeasureReport measure_report(double lambda, int kmax, double edge_tol) {
  if (!(lambda > 4.0)) throw DomainError("measure report needs lambda > 4");
  MeasureReport rep;
  rep.lambda = lambda;
  rep.gamma = bound_parameters(lambda).gamma;
  rep.ratio_bound = 1.0 / (2.0 * lambda + 22.0);
  rep.min_width_ratio = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= kmax; ++k) {
    const BandSet set = approximant_spectrum(lambda, k, edge_tol);
    MeasureRow row{k, static_cast<double>(fibonacci_number(k)), set.size(), set.measure(), set.min_width()};
    for (const auto& b : set.bands) {
      for (double E : chebyshev_points(b.lo, b.hi, 33)) {
        const auto orbit = trace_derivative_orbit(lambda, E, std::max(k, 1));
        row.max_abs_derivative = std::max(row.max_abs_derivative, std::abs(orbit.dxs[k]));
      }
    }
    rep.C_estimate = std::max(rep.C_estimate, row.max_abs_derivative * std::pow(2.0 * lambda + 22.0, -k));
    if (!rep.rows.empty()) rep.min_width_ratio = std::min(rep.min_width_ratio, row.min_width / rep.rows.back().min_width);
    rep.rows.push_back(row);
  }
  // least-squares slope of log|sigma_k| against log F_k
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rep.rows.size());
  for (const auto& r : rep.rows) {
    const double x = std::log(r.F_k), y = std::log(r.measure);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  rep.decay_exponent = den > 0 ? (n * sxy - sx * sy) / den : 0.0;
  return rep;
}

TraceBoundReport trace_bound_check(double lambda, int k, int samples, double edge_tol) {
  if (k < 1) throw DomainError("trace bound check needs k >= 1");
  TraceBoundReport rep;
  rep.C_lambda = 2.0 + std::sqrt(8.0 + lambda * lambda);
  const BandSet set = approximant_spectrum(lambda, k, edge_tol);
  for (double E : sample_band_energies(set, samples)) {
    const auto orbit = fib_trace_orbit(lambda, E, k);
    double m = 0.0;
    for (double x : orbit.xs) m = std::max(m, std::abs(x));
    rep.max_trace = std::max(rep.max_trace, m);
    ++rep.checked;
    if (orbit.overflow || m > rep.C_lambda) {
      rep.ok = false;
      std::ostringstream os;
      os.precision(17);
      os << "E=" << E << " max|x_i|=" << m << " > C_lambda=" << rep.C_lambda;
      rep.violations.push_back(os.str());
    }
  }
  return rep;
}

}  // namespace qdyn
