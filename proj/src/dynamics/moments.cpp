#include <algorithm>
#include <cmath>
#include <limits>

#include "qdyn/dynamics.hpp"
#include "qdyn/errors.hpp"
#include "qdyn/parallel.hpp"

namespace qdyn {

double AmplitudeProfile::total() const { return pairwise_sum(a); }

double l1_distance(const AmplitudeProfile& x, const AmplitudeProfile& y) {
  const long lo = std::min(x.window.lo, y.window.lo);
  const long hi = std::max(x.window.hi, y.window.hi);
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (long n = lo; n <= hi; ++n) d.push_back(std::abs(x.at(n) - y.at(n)));
  return pairwise_sum(d);
}

double moments(const AmplitudeProfile& profile, double p) {
  if (!(p > 0.0)) throw DomainError("moments: p must be positive");
  std::vector<double> terms;
  bool any_mass = false;
  for (long n = profile.window.lo; n <= profile.window.hi; ++n) {
    const double a = profile.a[profile.window.index(n)];
    if (!(a > 0.0)) continue;
    any_mass = true;
    if (n != 0) terms.push_back(p * std::log(std::abs(static_cast<double>(n))) + std::log(a));
  }
  if (!any_mass) throw DomainError("moments: profile carries no mass");
  return pairwise_log_sum_exp(terms);
}

double outside_probability(const AmplitudeProfile& profile, double gamma) {
  if (!(gamma >= 0.0)) throw DomainError("outside_probability: gamma must be nonnegative");
  const double threshold = std::pow(profile.T, gamma) - 2.0;
  std::vector<double> mass;
  for (long n = profile.window.lo; n <= profile.window.hi; ++n)
    if (std::abs(static_cast<double>(n)) >= threshold) mass.push_back(profile.a[profile.window.index(n)]);
  return pairwise_sum(mass);
}

MomentSeries moment_series(const std::vector<AmplitudeProfile>& profiles, double p, const std::string& model) {
  MomentSeries s;
  s.p = p;
  s.model = model;
  for (const auto& prof : profiles) {
    s.T.push_back(prof.T);
    s.log_moment.push_back(moments(prof, p));
  }
  return s;
}

SlopeEstimate fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw DomainError("fit_line: need at least two paired points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_line: abscissae are all equal");
  SlopeEstimate e;
  e.slope = sxy / sxx;
  e.intercept = my - e.slope * mx;
  e.points_used = n;
  if (n > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - e.intercept - e.slope * x[i];
      rss += r * r;
    }
    e.confidence = 2.0 * std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return e;
}

SlopeEstimate growth_exponent(const MomentSeries& series) {
  const std::size_t n = series.T.size();
  if (n < 5 || series.log_moment.size() != n)
    throw DomainError("growth_exponent: need at least 5 points");
  for (std::size_t i = 0; i < n; ++i) {
    if (i && !(series.T[i] > series.T[i - 1])) throw DomainError("growth_exponent: T must increase");
    if (!std::isfinite(series.log_moment[i])) throw DomainError("growth_exponent: non-finite log moment");
  }
  if (std::log10(series.T.back() / series.T.front()) < 1.5 - 1e-12)
    throw DomainError("growth_exponent: T range spans less than 1.5 decades");
  const std::size_t first = n / 2;
  std::vector<double> x, y;
  for (std::size_t i = first; i < n; ++i) {
    x.push_back(std::log(series.T[i]));
    y.push_back(series.log_moment[i]);
  }
  return fit_line(x, y);
}

std::vector<double> log_ladder(double lo, double hi, int per_decade) {
  if (!(lo > 0.0) || !(hi > lo) || per_decade < 1) throw DomainError("log_ladder: bad range");
  const auto steps = static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade - 1e-9));
  std::vector<double> out;
  for (int i = 0; i <= steps; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / steps));
  out.back() = hi;
  return out;
}

}  // namespace qdyn
