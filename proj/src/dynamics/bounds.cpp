#include <algorithm>
#include <cmath>
#include <limits>

#include "qdyn/dynamics.hpp"
#include "qdyn/errors.hpp"
#include "qdyn/parallel.hpp"
#include "qdyn/traces.hpp"

namespace qdyn {

double MomentBoundInput::scale_length(double T, double alpha) { return std::pow(T, 1.0 / (1.0 + alpha)); }

BandSet MomentBoundInput::neighbourhood(double T) const {
  BandSet set = good_set(scale_length(T, alpha));
  for (auto& b : set.bands) {
    b.lo -= 1.0 / T;
    b.hi += 1.0 / T;
  }
  std::sort(set.bands.begin(), set.bands.end(), [](const Band& x, const Band& y) { return x.lo < y.lo; });
  return merge_touching(set, 0.0);
}

MomentBoundValue moment_bound(const MomentBoundInput& input, double T, double p) {
  if (!(input.alpha >= 0.0)) throw DomainError("moment_bound: alpha must be nonnegative");
  if (!(T > 1.0)) throw DomainError("moment_bound: T must exceed 1");
  MomentBoundValue v;
  v.N = MomentBoundInput::scale_length(T, input.alpha);
  v.measure_B = input.neighbourhood(T).measure();
  if (!(v.measure_B > 0.0)) throw DomainError("moment_bound: empty neighbourhood");
  const double base = std::log(v.measure_B) - std::log(T);
  v.log_moment_bound = base + (p + 1.0 - 2.0 * input.alpha) * std::log(v.N);
  v.log_outside_bound = base + (1.0 - 2.0 * input.alpha) * std::log(v.N);
  return v;
}

double moment_bound_slope(const MomentBoundInput& input, const std::vector<double>& Ts, double p) {
  std::vector<double> x, y;
  for (double T : Ts) {
    x.push_back(std::log(T));
    y.push_back(moment_bound(input, T, p).log_moment_bound);
  }
  return fit_line(x, y).slope;
}

PowerlawReport powerlaw_check(const PotentialSpec& spec, double E, double alpha, long m_max, double cap,
                              double d) {
  if (m_max < 2) throw DomainError("powerlaw_check: m_max must be >= 2");
  PowerlawReport rep;
  rep.E = E;
  rep.alpha = alpha;
  rep.m_max = m_max;
  rep.cap = cap > 0.0 ? cap : std::numeric_limits<double>::infinity();
  rep.d = d;
  rep.max_step_log_margin = -std::numeric_limits<double>::infinity();
  const double log_cap = std::log(rep.cap), log_d = d > 0.0 ? std::log(d) : 0.0;
  double best = -std::numeric_limits<double>::infinity();
  ScaledMat2 t;  // T(m, 1; E), identity at m = 1
  for (long m = 1; m <= m_max; ++m) {
    if (m > 1) t.left_multiply(one_step_matrix(spec, m, cplx{E}));
    const double log_norm = t.log_norm();
    const double log_ratio = log_norm - alpha * std::log(static_cast<double>(m));
    if (log_ratio > best) {
      best = log_ratio;
      rep.argmax = m;
    }
    rep.max_norm = std::max(rep.max_norm, std::exp(std::min(log_norm, 700.0)));
    if (log_ratio > log_cap + 1e-12) ++rep.violations;
    if (d > 0.0) {
      const int top = fibonacci_index_floor(static_cast<std::uint64_t>(m));
      const double margin = log_norm - top * log_d;
      rep.max_step_log_margin = std::max(rep.max_step_log_margin, margin);
      if (margin > 1e-12) ++rep.step_violations;
    }
  }
  rep.max_ratio = std::exp(std::min(best, 700.0));
  return rep;
}

std::vector<int> zeckendorf(std::uint64_t m) {
  if (m == 0) throw DomainError("zeckendorf: m must be positive");
  std::vector<int> idx;
  while (m > 0) {
    const int i = fibonacci_index_floor(m);
    idx.push_back(i);
    m -= fibonacci_number(i);
  }
  std::reverse(idx.begin(), idx.end());
  return idx;
}

namespace {

// T(n, origin; z) for n in [lo, hi] (lo <= origin <= hi), indexed by n - lo.
std::vector<Mat2> prefix_products(const PotentialSpec& spec, long origin, long lo, long hi, cplx z) {
  std::vector<Mat2> p(static_cast<std::size_t>(hi - lo + 1));
  p[origin - lo] = Mat2::identity();
  for (long n = origin + 1; n <= hi; ++n) p[n - lo] = one_step_matrix(spec, n, z) * p[n - 1 - lo];
  Mat2 back = Mat2::identity();  // T(origin, n; z)
  for (long n = origin - 1; n >= lo; --n) {
    back = back * one_step_matrix(spec, n + 1, z);
    p[n - lo] = back.unimodular_inverse();
  }
  return p;
}

}  // namespace

ComplexBoundReport complex_energy_bound_check(const PotentialSpec& spec, double E, long N,
                                              const std::vector<cplx>& deltas) {
  if (N < 1) throw DomainError("complex_energy_bound_check: N must be >= 1");
  const bool whole = spec.geometry == Geometry::WholeLine;
  const long lo = whole ? -N : 1, hi = N, origin = whole ? 0 : 1;
  ComplexBoundReport rep;
  rep.E = E;
  rep.N = N;
  // sup over the box of ||P(n) P(m)^{-1}||
  const auto p = prefix_products(spec, origin, lo, hi, cplx{E});
  std::vector<double> row_max(p.size(), 0.0);
  parallel_for(p.size(), [&](std::size_t i) {
    double best = 0.0;
    for (const auto& pm : p) best = std::max(best, norm(p[i] * pm.unimodular_inverse()));
    row_max[i] = best;
  });
  rep.K = *std::max_element(row_max.begin(), row_max.end());
  if (!std::isfinite(rep.K)) throw ScaleOverflow("complex_energy_bound_check: K(N) overflowed");
  const double log_k = std::log(rep.K);

  auto test = [&](double log_norm, long n, cplx delta) {
    ++rep.checked;
    const double margin = log_norm - (log_k + rep.K * std::abs(static_cast<double>(n)) * std::abs(delta));
    rep.max_log_margin = std::max(rep.max_log_margin, margin);
    if (margin > 1e-12) ++rep.violations;
  };
  for (const cplx delta : deltas) {
    const cplx z = E + delta;
    ScaledMat2 fwd;  // T(n, 1; z)
    for (long n = 1; n <= N; ++n) {
      if (n > 1) fwd.left_multiply(one_step_matrix(spec, n, z));
      test(fwd.log_norm(), n, delta);
    }
    if (!whole) continue;
    Mat2 back = Mat2::identity();  // T(0, n; z); ||T(n,0)|| = ||T(0,n)|| for unimodular matrices
    test(0.0, 0, delta);
    for (long n = -1; n >= -N; --n) {
      back = back * one_step_matrix(spec, n + 1, z);
      test(std::log(norm(back)), n, delta);
    }
  }
  return rep;
}

std::string to_string(BoundId id) {
  switch (id) {
    case BoundId::FibOneEnergy: return "fib_one_energy";
    case BoundId::FibBands: return "fib_bands";
    case BoundId::PeriodDoubling: return "period_doubling";
    case BoundId::ThueMorse: return "thue_morse";
    case BoundId::OneEnergyEta: return "one_energy_eta";
  }
  return "?";
}

BoundId parse_bound_id(const std::string& s) {
  for (auto id : {BoundId::FibOneEnergy, BoundId::FibBands, BoundId::PeriodDoubling, BoundId::ThueMorse,
                  BoundId::OneEnergyEta})
    if (s == to_string(id)) return id;
  throw DomainError("unknown bound id: " + s);
}

std::string bound_formula(BoundId id) {
  switch (id) {
    case BoundId::FibOneEnergy: return "(p-1-4*alpha)/(1+alpha)";
    case BoundId::FibBands: return "(p-gamma-3*alpha)/(1+alpha)";
    case BoundId::PeriodDoubling: return "(p-5)/2";
    case BoundId::ThueMorse: return "p-1";
    case BoundId::OneEnergyEta: return "(p-1-8*eta)/(1+2*eta)";
  }
  return "?";
}

BoundId default_bound(Model model) {
  switch (model) {
    case Model::Fibonacci: return BoundId::FibOneEnergy;
    case Model::PeriodDoubling: return BoundId::PeriodDoubling;
    case Model::ThueMorse: return BoundId::ThueMorse;
    default: return BoundId::OneEnergyEta;
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "Pass";
    case Verdict::SoftFail: return "SoftFail";
    case Verdict::OutOfRegime: return "OutOfRegime";
  }
  return "?";
}

double bound_slope(BoundId id, double lambda, double p, const BoundParams& params) {
  switch (id) {
    case BoundId::FibOneEnergy: {
      const double a = bound_parameters(lambda).alpha;
      return (p - 1.0 - 4.0 * a) / (1.0 + a);
    }
    case BoundId::FibBands: {
      const auto bp = bound_parameters(lambda);
      return (p - bp.gamma - 3.0 * bp.alpha) / (1.0 + bp.alpha);
    }
    case BoundId::PeriodDoubling: return 0.5 * (p - 5.0);
    case BoundId::ThueMorse: return p - 1.0;
    case BoundId::OneEnergyEta: return (p - 1.0 - 8.0 * params.eta) / (1.0 + 2.0 * params.eta);
  }
  return 0.0;
}

BoundReport judge(const MomentSeries& series, Model model, double lambda, BoundId id, const BoundParams& params) {
  BoundReport r;
  r.model = model;
  r.lambda = lambda;
  r.p = series.p;
  r.bound = id;
  r.formula = bound_formula(id);
  r.slope_tol = params.slope_tol;
  r.series = series;
  r.measured = growth_exponent(series);
  r.bound_slope = bound_slope(id, lambda, series.p, params);
  if (id == BoundId::FibBands && !(lambda > 4.0)) {
    r.verdict = Verdict::OutOfRegime;
    r.note = "band bound requires lambda > 4";
  } else if (!(r.bound_slope > 0.0)) {
    r.verdict = Verdict::OutOfRegime;
    r.note = "bound slope is not positive at this p; reported, not asserted";
  } else {
    r.verdict = r.measured.slope >= r.bound_slope - r.slope_tol ? Verdict::Pass : Verdict::SoftFail;
    r.note = "finite-time estimate over the largest-T half of the ladder";
  }
  return r;
}

std::vector<BoundReport> bound_report(const PotentialSpec& spec, const std::vector<double>& p_list,
                                      const std::vector<double>& T_list, BoundId id, const BoundParams& params) {
  const auto window = dynamics_window(spec.geometry, T_list.back());
  const auto profiles = profile_time_ladder(spec, T_list, window);
  std::vector<BoundReport> out;
  for (double p : p_list)
    out.push_back(judge(moment_series(profiles, p, to_string(spec.model)), spec.model, spec.lambda, id, params));
  return out;
}

StabilityReport perturbation_stability(const PotentialSpec& spec, const std::map<long, double>& overlay,
                                       double p, const std::vector<double>& T_list, double tolerance) {
  const auto window = dynamics_window(spec.geometry, T_list.back());
  StabilityReport r;
  r.tolerance = tolerance;
  r.base_slope = growth_exponent(moment_series(profile_time_ladder(spec, T_list, window), p)).slope;
  r.perturbed_slope =
      growth_exponent(moment_series(profile_time_ladder(perturb(spec, overlay), T_list, window), p)).slope;
  r.drop = r.base_slope - r.perturbed_slope;
  r.ok = r.drop < tolerance;
  return r;
}

double transfer_growth_exponent(const PotentialSpec& spec, double E, long m_max) {
  if (m_max < 100) throw DomainError("transfer_growth_exponent: m_max must be >= 100");
  const auto marks = log_ladder(10.0, static_cast<double>(m_max), 8);
  std::vector<double> x, y;
  ScaledMat2 t;
  double running = 0.0;
  std::size_t next = 0;
  for (long m = 1; m <= m_max && next < marks.size(); ++m) {
    if (m > 1) t.left_multiply(one_step_matrix(spec, m, cplx{E}));
    running = std::max(running, t.log_norm());
    if (static_cast<double>(m) >= marks[next]) {
      x.push_back(std::log(static_cast<double>(m)));
      y.push_back(running);
      while (next < marks.size() && marks[next] <= static_cast<double>(m)) ++next;
    }
  }
  return fit_line(x, y).slope;
}

TailScalingReport resolvent_tail_scaling(double lambda, const std::vector<double>& Ts, int energies_per_T) {
  PotentialSpec spec;
  spec.model = Model::Fibonacci;
  spec.lambda = lambda;
  TailScalingReport rep;
  rep.lambda = lambda;

  // alpha_eff: largest measured growth exponent over band energies of sigma_14.
  const int k_ref = 14;
  const auto ref = approximant_spectrum(lambda, k_ref);
  const auto ref_e = sample_band_energies(ref, 8);
  std::vector<double> slopes(ref_e.size());
  parallel_for(ref_e.size(), [&](std::size_t i) {
    slopes[i] = transfer_growth_exponent(spec, ref_e[i], static_cast<long>(fibonacci_number(k_ref)));
  });
  rep.alpha_eff = std::max(0.0, *std::max_element(slopes.begin(), slopes.end()));

  std::vector<double> logN, logS;
  rep.positive = true;
  for (double T : Ts) {
    TailRow row;
    row.T = T;
    row.N = MomentBoundInput::scale_length(T, rep.alpha_eff);
    int k = 1;
    while (static_cast<double>(fibonacci_number(k)) < row.N) ++k;
    row.k = k;
    const auto energies = sample_band_energies(approximant_spectrum(lambda, k), energies_per_T);
    row.energies = energies.size();
    const auto window = LatticeWindow::around_origin(Geometry::WholeLine, static_cast<long>(40.0 * T) + 64);
    std::vector<double> tails(energies.size());
    parallel_for(energies.size(), [&](std::size_t i) {
      const auto phi = resolvent_vector(spec, cplx{energies[i], 1.0 / T}, window);
      std::vector<double> part;
      for (long n = window.lo; n <= window.hi; ++n)
        if (std::abs(static_cast<double>(n)) >= 0.5 * row.N) part.push_back(std::norm(phi[window.index(n)]));
      tails[i] = pairwise_sum(part);
    });
    row.min_tail = *std::min_element(tails.begin(), tails.end());
    row.mean_tail = pairwise_sum(tails) / static_cast<double>(tails.size());
    row.shape_bound = std::pow(row.N, 1.0 - 2.0 * rep.alpha_eff);
    rep.positive = rep.positive && row.min_tail > 0.0;
    logN.push_back(std::log(row.N));
    logS.push_back(std::log(row.mean_tail));
    rep.rows.push_back(row);
  }
  if (logN.size() >= 2) rep.exponent = fit_line(logN, logS).slope;
  rep.ok = rep.positive && rep.exponent > 0.0;
  return rep;
}

}  // namespace qdyn
