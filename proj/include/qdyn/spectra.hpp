#pragma once

// Band spectra sigma_k = { E : |x_k(E)| <= 2 } of the periodic approximants of
// the Fibonacci Hamiltonian, band genealogy and the quantitative band estimates.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qdyn {

enum class BandKind { TypeA, TypeB, Unclassified };
std::string to_string(BandKind kind);

struct Band {
  double lo = 0.0;
  double hi = 0.0;
  BandKind kind = BandKind::Unclassified;
  int k = 0;

  double width() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
  bool contains(double E, double tol = 0.0) const { return E >= lo - tol && E <= hi + tol; }
  bool contains(const Band& other, double tol) const {
    return other.lo >= lo - tol && other.hi <= hi + tol;
  }
};

struct BandSet {
  double lambda = 0.0;
  int k = 0;
  double edge_tol = 1e-10;
  std::vector<Band> bands;            // sorted by lo, pairwise disjoint
  std::vector<std::string> warnings;  // count/gap issues outside the proven regime

  std::size_t size() const { return bands.size(); }
  bool empty() const { return bands.empty(); }
  double measure() const;
  double min_width() const;
  bool contains(double E, double tol = 0.0) const;
  /// Index of a band containing `b` within tol, or -1.
  int container_of(const Band& b, double tol) const;
};

/// Merge bands whose separation is at most tol.
BandSet merge_touching(const BandSet& set, double tol);

struct BoundParameters {
  double lambda = 0.0;
  double C_lambda = 0.0;  // 2 + sqrt(8 + lambda^2)
  double d = 0.0;         // C (2C + 1)^2
  double alpha = 0.0;     // 2 log d / log(omega^{-1})
  double gamma = 0.0;     // log(2 lambda + 22) / log(omega^{-1}) - 1
  bool gamma_in_regime = false;  // lambda > 4
};

double golden_log();  // log((1 + sqrt 5) / 2)
BoundParameters bound_parameters(double lambda);

/// All maximal intervals of sigma_k. Bands are bracketed by the Dirichlet
/// eigenvalues of the period word (one per gap) and their edges located by
/// bisection on x_k -+ 2 to edge_tol. For lambda > 4 a band count different
/// from F_k, or a gap that does not open, throws ResolutionError; otherwise
/// such issues are reported in `warnings`.
BandSet approximant_spectrum(double lambda, int k, double edge_tol = 1e-10);

struct CheckReport {
  bool ok = true;
  std::vector<std::string> violations;
  std::size_t checked = 0;
};

/// sigma_m u sigma_{m+1} contained in sigma_{m-1} u sigma_m, m >= 2.
CheckReport covering_check(double lambda, int m, double edge_tol = 1e-10);
CheckReport covering_check(const BandSet& prev, const BandSet& cur, const BandSet& next);

/// Labels bands of sigma_k (k >= 1) by containment in sigma_{k-1} (A) or
/// sigma_{k-2} (B); sigma_{-1} is the whole line. Requires lambda > 4.
BandSet classify_bands(double lambda, int k, double edge_tol = 1e-10);
BandSet classify_bands(const BandSet& cur, const BandSet* prev, const BandSet* prev2);

struct GenealogyReport : CheckReport {
  std::vector<std::size_t> type_a;  // per level 1..kmax
  std::vector<std::size_t> type_b;
};

/// Type A/B genealogy: every A band of sigma_k contains exactly one B band of
/// sigma_{k+2} and nothing from sigma_{k+1}; every B band contains exactly one A
/// band of sigma_{k+1} and two B bands of sigma_{k+2} on either side of it.
GenealogyReport genealogy_check(double lambda, int kmax, double edge_tol = 1e-10);

/// Three consecutive traces never all bounded by 2 (lambda > 4): returns the
/// largest min_j max(|x_j|,|x_{j+1}|,|x_{j+2}|) deficit over the given energies.
CheckReport three_traces_check(double lambda, const std::vector<double>& energies, int kmax);

/// f_+-(x, y, lambda) = (x y +- sqrt(4 lambda^2 + (4 - x^2)(4 - y^2))) / 2.
double f_pm(double x, double y, double lambda, int sign);

struct Partials {
  double dx = 0.0;
  double dy = 0.0;
};
Partials f_pm_partials(double x, double y, double lambda, int sign);

/// Point i of the two-dimensional Sobol sequence in [0, 1)^2 (i < 2^32).
std::pair<double, double> sobol_2d(std::uint32_t i);

struct PartialBoundReport : CheckReport {
  double max_partial = 0.0;  // max over samples and both signs of |df/dx|, |df/dy|
};

/// |df_+-/dx|, |df_+-/dy| <= 1 + 1e-12 on Sobol points of [-2, 2]^2.
PartialBoundReport partial_bound_check(double lambda, std::size_t samples);

struct DerivativeRatioReport : CheckReport {
  double lambda = 0.0;
  int k = 0;
  double max_ratio_a = 0.0;  // |x_{k+1}'/x_k'| over A bands of sigma_{k+1}
  double max_ratio_b = 0.0;  // |x_{k+2}'/x_k'| over B bands of sigma_{k+2}
  double bound_a = 0.0;      // lambda + 11
  double bound_b = 0.0;      // 2 lambda + 22
  double tolerance = 1e-6;   // relative
  std::size_t samples = 0;
  std::size_t skipped = 0;   // samples with x_k' = 0
};

/// Samples 33 Chebyshev points per band.
DerivativeRatioReport derivative_ratio_check(double lambda, int k, double edge_tol = 1e-10,
                                             int samples_per_band = 33);

struct MeasureRow {
  int k = 0;
  double F_k = 0.0;
  std::size_t bands = 0;
  double measure = 0.0;
  double min_width = 0.0;
  double max_abs_derivative = 0.0;  // max |x_k'| over band samples
};

struct MeasureReport {
  double lambda = 0.0;
  std::vector<MeasureRow> rows;
  double decay_exponent = 0.0;  // slope of log|sigma_k| vs log F_k
  double gamma = 0.0;
  double C_estimate = 0.0;      // max_k max|x_k'| (2 lambda + 22)^{-k}
  double min_width_ratio = 0.0; // min_k minwidth(k+1)/minwidth(k)
  double ratio_bound = 0.0;     // 1 / (2 lambda + 22)
};

MeasureReport measure_report(double lambda, int kmax, double edge_tol = 1e-10);

struct TraceBoundReport : CheckReport {
  double C_lambda = 0.0;
  double max_trace = 0.0;  // max_{samples} max_{0<=i<=k} |x_i|
};

TraceBoundReport trace_bound_check(double lambda, int k, int samples = 100,
                                   double edge_tol = 1e-10);

/// n Chebyshev-spaced interior points of [lo, hi].
std::vector<double> chebyshev_points(double lo, double hi, int n);

/// Deterministic band-interior sample energies spread over all bands.
std::vector<double> sample_band_energies(const BandSet& set, int count);

}  // namespace qdyn
