#pragma once

// Trace maps and substitution transfer-matrix recursions for the Fibonacci,
// period-doubling and Thue-Morse Hamiltonians, plus the special-energy finders.

#include <cstdint>
#include <string>
#include <vector>

#include "qdyn/lattice.hpp"

namespace qdyn {

/// F_0 = F_1 = 1, F_{k+1} = F_k + F_{k-1}.
std::uint64_t fibonacci_number(int k);

/// Largest k with F_k <= m (m >= 1).
int fibonacci_index_floor(std::uint64_t m);

// ---------------------------------------------------------------------------
// Indexing oracle

/// Candidate conventions for M_k: product over sites 1..F_k, i.e. T(F_k,0;E),
/// or over sites 2..F_k, i.e. the literal T(F_k,1;E).
enum class FibConvention { FromSite1, FromSite2 };

struct IndexingOracle {
  FibConvention adopted = FibConvention::FromSite1;
  bool from_site1_ok = false;
  bool from_site2_ok = false;
  double from_site1_error = 0.0;  // max relative ||D_k - D_{k-2} D_{k-1}|| over 3 <= k <= 8
  double from_site2_error = 0.0;
};

/// Multiplies one-step matrices under both conventions and keeps the one that
/// satisfies M_k = M_{k-2} M_{k-1} identically for 3 <= k <= 8.
IndexingOracle run_indexing_oracle(double lambda, cplx E);

/// Oracle result for the build, evaluated once on first use.
const IndexingOracle& fib_convention();

/// Identifier written into every output file.
std::string convention_id();

/// First site of the block whose product is M_k (1 or 2 depending on the convention).
long fib_block_first_site();

/// Potential values of the period word of the k-th approximant: the sites
/// multiplied into M_k (k >= 1), and the single letter-0 site for k = 0.
std::vector<double> fibonacci_period_values(double lambda, int k);

// ---------------------------------------------------------------------------
// Fibonacci

/// M_0..M_kmax. M_1, M_2 are multiplied directly, M_0 = M_2 M_1^{-1}, and
/// M_k = M_{k-2} M_{k-1} for k >= 3. Throws ScaleOverflow on overflow.
std::vector<Mat2> fib_matrices(double lambda, cplx E, int kmax);

inline constexpr double kTraceOverflow = 1e150;

struct FibTraceOrbit {
  double lambda = 0.0;
  double E = 0.0;
  std::vector<double> xs;  // x_0 .. x_K (K <= kmax, shorter when overflow)
  bool overflow = false;   // |x_k| exceeded kTraceOverflow; orbit stopped there

  int k_max() const { return static_cast<int>(xs.size()) - 1; }
};

/// x_{k+1} = x_k x_{k-1} - x_{k-2}, initial triple from the traces of M_0, M_1, M_2.
FibTraceOrbit fib_trace_orbit(double lambda, double E, int kmax);

/// x_next^2 + x_cur^2 + x_prev^2 - x_next x_cur x_prev  (= 4 + lambda^2 on orbits).
double fib_invariant(double x_prev, double x_cur, double x_next);

struct TraceDerivOrbit {
  double lambda = 0.0;
  double E = 0.0;
  std::vector<double> xs;
  std::vector<double> dxs;  // dx_k / dE
  bool overflow = false;
};

/// (x_k, x_k') by simultaneous recursion; base derivatives from the product rule
/// applied to the directly multiplied base matrices.
TraceDerivOrbit trace_derivative_orbit(double lambda, double E, int kmax);

/// x_k(E) for a single k, with overflow-safe sign: returns +-inf when the
/// trace leaves double range (sign taken from the log-scaled block product).
double fib_trace(double lambda, double E, int k);

// ---------------------------------------------------------------------------
// Period doubling / Thue-Morse

struct SubstTransfer {
  Mat2 t0;  // T^(0)_k = T(S^k(0); E)
  Mat2 t1;  // T^(1)_k = T(S^k(1); E)
};

/// Base A(0;E), A(1;E) and the model recursion up to level k. Throws ScaleOverflow.
SubstTransfer subst_transfer(Model model, double lambda, cplx E, int k);
std::vector<SubstTransfer> subst_transfer_levels(Model model, double lambda, cplx E, int kmax);

struct SubstTraceOrbit {
  Model model = Model::PeriodDoubling;
  double lambda = 0.0;
  double E = 0.0;
  std::vector<double> xs;   // tr T^(0)_k
  std::vector<double> ys;   // tr T^(1)_k
  std::vector<double> dxs;  // d/dE of xs
  bool overflow = false;
};

/// PD: x_{k+1} = x_k y_k - 2, y_{k+1} = x_k^2 - 2.
/// TM: x_k = y_k (k >= 1), x_{k+1} = x_{k-1}^2 (x_k - 2) + 2 (k >= 2); x_1, x_2
/// from directly multiplied matrices.
SubstTraceOrbit subst_trace_orbit(Model model, double lambda, double E, int kmax);

struct SpecialEnergies {
  std::vector<double> energies;     // ascending
  std::size_t expected_count = 0;   // PD: 2^k simple roots; TM: not fixed (0)
  bool count_ok = true;
  std::string diagnostics;
  double max_trace_residual = 0.0;  // PD: max |x_k(E)|; TM: max |x_k(E) - 2|
  double max_matrix_defect = 0.0;   // PD: max(|tr T0_{k+1} + 2|, ||T1_{k+1} + I||) at long double roots; TM: max ||T_k - I||
};

/// Real roots of E -> x_k(E, lambda) on [-2-lambda, 2+2*lambda].
SpecialEnergies pd_special_energies(double lambda, int k);

/// Real E with x_k(E) = 2 on [-2-lambda, 2+2*lambda] (simple and touching
/// roots), without removing E_2.
std::vector<double> tm_level_set(double lambda, int k);

/// tm_level_set(lambda, k) minus tm_level_set(lambda, 2); k >= 3.
SpecialEnergies tm_special_energies(double lambda, int k);

}  // namespace qdyn
