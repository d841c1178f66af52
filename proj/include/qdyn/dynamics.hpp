#pragma once

// Wave-packet dynamics started from delta_1: resolvent vectors, Chebyshev time
// propagation, time-averaged site profiles a(n, T), moments and the lower-bound
// comparisons built on transfer-matrix growth.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qdyn/lattice.hpp"
#include "qdyn/spectra.hpp"

namespace qdyn {

enum class ProfileMethod { TimeAverage, Resolvent };
std::string to_string(ProfileMethod m);

/// a(n, T) = (2/T) int_0^inf e^{-2t/T} |psi(t, n)|^2 dt on a window. The
/// factor 2 makes the weight a probability density, so sum_n a(n, T) = 1.
struct AmplitudeProfile {
  double T = 0.0;
  LatticeWindow window;
  std::vector<double> a;  // a[window.index(n)]
  ProfileMethod method = ProfileMethod::TimeAverage;
  double cutoff_weight = 0.0;     // time average: e^{-2c} mass beyond t_max
  double quadrature_error = 0.0;  // resolvent: Richardson estimate (relative)

  double at(long n) const { return window.contains(n) ? a[window.index(n)] : 0.0; }
  double total() const;
};

/// l1 distance between two profiles over the union of their windows.
double l1_distance(const AmplitudeProfile& x, const AmplitudeProfile& y);

// ---------------------------------------------------------------------------
// Resolvent

struct ResolventOptions {
  double boundary_tol = 1e-8;  // max |phi| on the window edges relative to max |phi|
};

/// phi = (H - z)^{-1} delta_1 on the window (Dirichlet outside), Im z > 0.
/// Throws TruncationError when the solution has not decayed at the edges.
std::vector<cplx> resolvent_vector(const PotentialSpec& spec, cplx z, const LatticeWindow& window,
                                   const ResolventOptions& opt = {});

/// Same solve on precomputed potential values (window sites in order).
std::vector<cplx> resolvent_vector(std::span<const double> potential, std::size_t source, cplx z);

/// ||(H - z) phi - delta_1|| / ||phi||.
double resolvent_residual(const PotentialSpec& spec, cplx z, const LatticeWindow& window,
                          std::span<const cplx> phi);

struct EnergyGrid {
  double lo = 0.0;          // fine midpoint grid on [lo, hi]
  double hi = 0.0;
  double spacing = 0.0;     // <= eps / 4
  double tail_extent = 1e4; // geometric cells out to this distance past each end
  double tail_ratio = 1.08;
};

/// Fine grid over [Vmin - 3, Vmax + 3] at spacing eps / 4, eps = 1 / T.
EnergyGrid default_energy_grid(const PotentialSpec& spec, double T);

/// a(n, T) = (eps / pi) int |R(E + i eps) delta_1 (n)|^2 dE, eps = 1 / T.
/// Solves run on a window extended well beyond `window`; energies are split
/// into fixed chunks reduced in index order.
AmplitudeProfile profile_resolvent(const PotentialSpec& spec, double T, const LatticeWindow& window,
                                   const EnergyGrid& grid);
AmplitudeProfile profile_resolvent(const PotentialSpec& spec, double T, const LatticeWindow& window);

// ---------------------------------------------------------------------------
// Time evolution

struct EvolutionOptions {
  double max_step = 0.25;        // time step of the expansion
  double tail_tol = 1e-15;       // certified bound on the dropped Bessel tail
  int max_order = 4096;          // expansion order cap
  double boundary_tol = 1e-20;   // max |psi|^2 allowed on the window edges
  double trim_tol = 1e-34;       // amplitudes below this (squared) are dropped at the support edges
};

/// psi(t) = exp(-itH) delta_1 on the window.
std::vector<cplx> evolve_state(const PotentialSpec& spec, double t, const LatticeWindow& window,
                               const EvolutionOptions& opt = {});

inline constexpr double kTimeCutoff = 6.0;  // t_max = c T

/// Radius 2 c T + 64 around site 1.
LatticeWindow dynamics_window(Geometry g, double T_max, double cutoff = kTimeCutoff);

/// Trapezoid rule in t over [0, c T] from one trajectory.
AmplitudeProfile profile_time(const PotentialSpec& spec, double T, const LatticeWindow& window,
                              const EvolutionOptions& opt = {});

/// Profiles for every T of an increasing ladder from a single trajectory
/// run to c * max(T).
std::vector<AmplitudeProfile> profile_time_ladder(const PotentialSpec& spec,
                                                  const std::vector<double>& Ts,
                                                  const LatticeWindow& window,
                                                  const EvolutionOptions& opt = {});

// ---------------------------------------------------------------------------
// Moments and growth exponents

/// log sum_n |n|^p a(n, T), accumulated in the log domain. Throws DomainError
/// on p <= 0 or a profile without mass.
double moments(const AmplitudeProfile& profile, double p);

/// Sum of a(n, T) over |n| >= T^gamma - 2.
double outside_probability(const AmplitudeProfile& profile, double gamma);

struct MomentSeries {
  double p = 0.0;
  std::vector<double> T;
  std::vector<double> log_moment;
  std::string model;
};

MomentSeries moment_series(const std::vector<AmplitudeProfile>& profiles, double p,
                           const std::string& model = "");

struct SlopeEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double confidence = 0.0;  // 2 standard errors
  std::size_t points_used = 0;
};

/// Least-squares slope of log moment against log T over the largest-T half of
/// the series. Needs >= 5 points spanning >= 1.5 decades.
SlopeEstimate growth_exponent(const MomentSeries& series);

/// Generic least squares y = a + b x with 2-SE confidence.
SlopeEstimate fit_line(std::span<const double> x, std::span<const double> y);

/// Log-spaced ladder from lo to hi with `per_decade` points per decade.
std::vector<double> log_ladder(double lo, double hi, int per_decade);

// ---------------------------------------------------------------------------
// Lower bounds

struct MomentBoundInput {
  double alpha = 0.0;
  double K = 0.0;  // A(N) lies in [-K, K]
  std::function<BandSet(double)> good_set;  // N -> A(N)

  static double scale_length(double T, double alpha);  // T^{1/(1+alpha)}
  /// 1/T-neighbourhood of A(N(T)), overlapping pieces merged.
  BandSet neighbourhood(double T) const;
};

struct MomentBoundValue {
  double N = 0.0;
  double measure_B = 0.0;
  double log_moment_bound = 0.0;  // log((1/T)|B| N^{p+1-2 alpha})
  double log_outside_bound = 0.0; // log((1/T)|B| N^{1-2 alpha})
};

/// The moment and outside-mass bounds up to their unspecified constant.
MomentBoundValue moment_bound(const MomentBoundInput& input, double T, double p);

/// Log-log slope of the moment bound across the ladder.
double moment_bound_slope(const MomentBoundInput& input, const std::vector<double>& Ts, double p);

struct PowerlawReport {
  double E = 0.0;
  double alpha = 0.0;
  long m_max = 0;
  double max_ratio = 0.0;   // max ||T(m,1;E)|| / m^alpha
  long argmax = 0;
  double max_norm = 0.0;
  double cap = 0.0;         // allowed ratio (infinite when unset)
  std::size_t violations = 0;
  // Zeckendorf step bound ||T(m,1;E)|| <= d^{m_N}
  double d = 0.0;
  std::size_t step_violations = 0;
  double max_step_log_margin = 0.0;  // max log ||T|| - m_N log d (<= 0 when all hold)
};

/// Ratios ||T(m,1;E)||/m^alpha for 1 <= m <= m_max. `cap` bounds the ratio and
/// `d` enables the Zeckendorf step check when positive.
PowerlawReport powerlaw_check(const PotentialSpec& spec, double E, double alpha, long m_max,
                              double cap = 0.0, double d = 0.0);

/// Greedy coding m = sum F_{m_l}, indices ascending, gaps >= 2, indices >= 1.
std::vector<int> zeckendorf(std::uint64_t m);

struct ComplexBoundReport {
  double E = 0.0;
  long N = 0;
  double K = 0.0;  // sup of ||T(n,m;E)|| over the site box
  std::size_t checked = 0;
  std::size_t violations = 0;
  double max_log_margin = -1e300;  // log ||T|| - log(K exp(K|n||delta|)), <= 0 when holding
};

/// Perturbation bound ||T(n,1;E+delta)|| <= K exp(K |n| |delta|) for 1 <= n <= N
/// and, on the whole line, ||T(n,0;E+delta)|| with -N <= n <= 0.
ComplexBoundReport complex_energy_bound_check(const PotentialSpec& spec, double E, long N,
                                              const std::vector<cplx>& deltas);

enum class BoundId { FibOneEnergy, FibBands, PeriodDoubling, ThueMorse, OneEnergyEta };
std::string to_string(BoundId id);
BoundId parse_bound_id(const std::string& s);
std::string bound_formula(BoundId id);
BoundId default_bound(Model model);

enum class Verdict { Pass, SoftFail, OutOfRegime };
std::string to_string(Verdict v);

struct BoundReport {
  Model model = Model::Free;
  double lambda = 0.0;
  double p = 0.0;
  BoundId bound = BoundId::ThueMorse;
  std::string formula;
  SlopeEstimate measured;
  double bound_slope = 0.0;
  double slope_tol = 0.15;
  Verdict verdict = Verdict::OutOfRegime;
  std::string note;
  MomentSeries series;
};

struct BoundParams {
  double slope_tol = 0.15;
  double eta = 0.0;  // OneEnergyEta only
};

/// Theoretical slope of the selected lower bound at moment order p.
double bound_slope(BoundId id, double lambda, double p, const BoundParams& params = {});

/// Compares the measured finite-T slope with the selected bound.
BoundReport judge(const MomentSeries& series, Model model, double lambda, BoundId id,
                  const BoundParams& params = {});

/// Profiles over T_list from one trajectory, then one report per p.
std::vector<BoundReport> bound_report(const PotentialSpec& spec, const std::vector<double>& p_list,
                                      const std::vector<double>& T_list, BoundId id,
                                      const BoundParams& params = {});

struct StabilityReport {
  double base_slope = 0.0;
  double perturbed_slope = 0.0;
  double drop = 0.0;
  double tolerance = 0.15;
  bool ok = false;
};

/// Slope change of the p-th moment when the overlay is added.
StabilityReport perturbation_stability(const PotentialSpec& spec, const std::map<long, double>& overlay,
                                       double p, const std::vector<double>& T_list,
                                       double tolerance = 0.15);

/// Local growth exponent of max_{m' <= m} ||T(m',1;E)|| against m, fitted on log-spaced m up to m_max.
double transfer_growth_exponent(const PotentialSpec& spec, double E, long m_max);

struct TailRow {
  double T = 0.0;
  double N = 0.0;
  int k = 0;
  std::size_t energies = 0;
  double min_tail = 0.0;   // min over sampled E of sum_{|n| >= N/2} |phi(n)|^2
  double mean_tail = 0.0;
  double shape_bound = 0.0;  // N^{1 - 2 alpha_eff}
};

struct TailScalingReport {
  double lambda = 0.0;
  double alpha_eff = 0.0;
  std::vector<TailRow> rows;
  double exponent = 0.0;  // slope of log mean_tail against log N
  bool positive = false;
  bool ok = false;
};

/// Resolvent tail sums at energies of B(T) for A(N) = sigma_k, F_{k-1} < N <= F_k,
/// with N(T) = T^{1/(1+alpha_eff)} and alpha_eff measured from transfer matrices.
TailScalingReport resolvent_tail_scaling(double lambda, const std::vector<double>& Ts,
                                         int energies_per_T = 8);

}  // namespace qdyn
