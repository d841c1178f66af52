#pragma once

// Potentials, the discrete Schrodinger operator
//   (H psi)(n) = psi(n-1) + psi(n+1) + V(n) psi(n)
// and its transfer matrices T(n, m; z).

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qdyn/mat2.hpp"

namespace qdyn {

enum class Model { Fibonacci, PeriodDoubling, ThueMorse, ExplicitPeriodic, Free };
enum class Geometry { WholeLine, HalfLineDirichlet };

std::string to_string(Model m);
std::string to_string(Geometry g);
Model parse_model(const std::string& s);  // fib | pd | tm | periodic | free
Geometry parse_geometry(const std::string& s);  // whole | half

using Word = std::vector<std::uint8_t>;

struct PotentialSpec {
  Model model = Model::Free;
  double lambda = 0.0;
  Geometry geometry = Geometry::WholeLine;
  // PD/TM on the whole line: left letter a of the two-sided S^2 fixed point
  // a.0 (sites <= 0 carry S^2k(a), sites >= 1 carry S^2k(0)). -1 selects the
  // model default (PD: 1, TM: 0).
  int left_seed = -1;
  // ExplicitPeriodic: one period, V(n) = lambda * word[(n - 1) mod |word|].
  Word word;
  // Finitely supported overlay added to the base potential.
  std::map<long, double> perturbation;
};

/// Inclusive range of sites [lo, hi].
struct LatticeWindow {
  long lo = 1;
  long hi = 1;
  Geometry geometry = Geometry::WholeLine;

  std::size_t size() const { return static_cast<std::size_t>(hi - lo + 1); }
  bool contains(long n) const { return n >= lo && n <= hi; }
  std::size_t index(long n) const { return static_cast<std::size_t>(n - lo); }
  void validate() const;  // lo <= hi; lo >= 1 on the half-line

  /// Window holding every site within `radius` of site 1 (clipped at 1 on the half-line).
  static LatticeWindow around_origin(Geometry g, long radius);
};

/// Letter (0/1) of the model at site n before scaling by lambda.
int potential_letter(const PotentialSpec& spec, long n);

/// lambda * letter + perturbation. Fibonacci uses exact integer evaluation of
/// floor(n*omega), omega = (sqrt(5)-1)/2.
double potential_value(const PotentialSpec& spec, long n);

/// Potential on every site of the window.
std::vector<double> potential_on(const PotentialSpec& spec, const LatticeWindow& window);

/// Short description of the subshift element, written to output metadata.
std::string element_id(const PotentialSpec& spec);

/// floor(n * omega) with omega the inverse golden mean, exact for |n| <= 1e15.
long long floor_n_omega(long long n);

/// S^k(0) for the period-doubling or Thue-Morse substitution. Throws
/// ResourceError when 2^k exceeds max_length.
Word substitution_word(Model model, int k, std::size_t max_length = std::size_t{1} << 28);
Word substitute(Model model, const Word& w);

/// A(n, z) = [[z - V(n), -1], [1, 0]].
Mat2 one_step_matrix(double v, cplx z);
Mat2 one_step_matrix(const PotentialSpec& spec, long n, cplx z);

/// T(n, m; z): A(n)...A(m+1) for n > m, I for n = m, T(m, n; z)^{-1} for n < m.
/// Throws ScaleOverflow if entries leave double range.
Mat2 transfer_matrix(const PotentialSpec& spec, long n, long m, cplx z);

/// Same product kept in log-scaled form; never overflows.
ScaledMat2 transfer_matrix_scaled(const PotentialSpec& spec, long n, long m, cplx z);

/// Product A(v[last]) ... A(v[0]) over a sequence of potential values.
Mat2 word_product(std::span<const double> values, cplx z);
ScaledMat2 word_product_scaled(std::span<const double> values, cplx z);

/// H v on the window, with zero (Dirichlet) values outside.
std::vector<cplx> apply_hamiltonian(const PotentialSpec& spec, const LatticeWindow& window,
                                    std::span<const cplx> v);
void apply_hamiltonian(std::span<const double> potential, std::span<const cplx> v,
                       std::span<cplx> out);

/// New spec whose potential is base + overlay; overlays add pointwise.
PotentialSpec perturb(const PotentialSpec& spec, const std::map<long, double>& overlay);

}  // namespace qdyn
