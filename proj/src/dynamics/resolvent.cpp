#include <algorithm>
#include <cmath>
#include <numbers>

#include "qdyn/dynamics.hpp"
#include "qdyn/errors.hpp"
#include "qdyn/parallel.hpp"

namespace qdyn {

std::string to_string(ProfileMethod m) {
  return m == ProfileMethod::TimeAverage ? "time_average" : "resolvent";
}

std::vector<cplx> resolvent_vector(std::span<const double> potential, std::size_t source, cplx z) {
  const std::size_t n = potential.size();
  if (n == 0 || source >= n) throw DomainError("resolvent: source site outside the window");
  if (!(z.imag() > 0.0)) throw DomainError("resolvent: Im z must be positive");
  // Thomas elimination for (H - z) phi = delta_source; unit off-diagonals.
  std::vector<cplx> inv_pivot(n), rhs(n, cplx{});
  cplx carried{};
  for (std::size_t i = 0; i < n; ++i) {
    const cplx pivot = (potential[i] - z) - (i ? inv_pivot[i - 1] : cplx{});
    inv_pivot[i] = 1.0 / pivot;
    const cplx r = (i == source ? 1.0 : 0.0) - (i ? carried : cplx{});
    carried = r * inv_pivot[i];
    rhs[i] = carried;
  }
  std::vector<cplx> phi(n);
  phi[n - 1] = rhs[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) phi[i] = rhs[i] - inv_pivot[i] * phi[i + 1];
  return phi;
}

std::vector<cplx> resolvent_vector(const PotentialSpec& spec, cplx z, const LatticeWindow& window,
                                   const ResolventOptions& opt) {
  window.validate();
  if (!window.contains(1)) throw DomainError("resolvent: window must contain site 1");
  const auto v = potential_on(spec, window);
  auto phi = resolvent_vector(v, window.index(1), z);
  double peak = 0.0;
  for (const auto& x : phi) peak = std::max(peak, std::abs(x));
  const bool open_left = window.geometry == Geometry::WholeLine || window.lo > 1;
  const double edge = std::max(open_left ? std::abs(phi.front()) : 0.0, std::abs(phi.back()));
  if (edge > opt.boundary_tol * peak)
    throw TruncationError("resolvent: window [" + std::to_string(window.lo) + ", " +
                          std::to_string(window.hi) + "] too small for Im z = " +
                          std::to_string(z.imag()));
  return phi;
}

double resolvent_residual(const PotentialSpec& spec, cplx z, const LatticeWindow& window,
                          std::span<const cplx> phi) {
  const auto v = potential_on(spec, window);
  std::vector<cplx> hphi(phi.size());
  apply_hamiltonian(v, phi, hphi);
  double res = 0.0, nrm = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const cplx r = hphi[i] - z * phi[i] - (window.lo + static_cast<long>(i) == 1 ? 1.0 : 0.0);
    res += std::norm(r);
    nrm += std::norm(phi[i]);
  }
  return std::sqrt(res / nrm);
}

EnergyGrid default_energy_grid(const PotentialSpec& spec, double T) {
  if (!(T > 0.0)) throw DomainError("energy grid: T must be positive");
  const auto w = LatticeWindow::around_origin(spec.geometry, 64);
  const auto v = potential_on(spec, w);
  EnergyGrid g;
  g.lo = std::min(0.0, *std::min_element(v.begin(), v.end())) - 3.0;
  g.hi = std::max(std::abs(spec.lambda), *std::max_element(v.begin(), v.end())) + 3.0;
  g.spacing = 0.25 / T;
  return g;
}

namespace {

struct Cell {
  double E;
  double weight;
};

std::vector<Cell> energy_cells(const EnergyGrid& g, std::vector<std::size_t>& fine_index) {
  std::vector<Cell> cells;
  const auto n_fine = static_cast<std::size_t>(std::ceil((g.hi - g.lo) / g.spacing));
  const double h = (g.hi - g.lo) / static_cast<double>(n_fine);
  // left tail, outermost first so that the cells stay in ascending order
  std::vector<Cell> left;
  for (double a = g.lo, w = h; g.lo - a < g.tail_extent; w *= g.tail_ratio) {
    left.push_back({a - 0.5 * w, w});
    a -= w;
  }
  cells.assign(left.rbegin(), left.rend());
  for (std::size_t j = 0; j < n_fine; ++j) {
    fine_index.push_back(cells.size());
    cells.push_back({g.lo + (static_cast<double>(j) + 0.5) * h, h});
  }
  for (double b = g.hi, w = h; b - g.hi < g.tail_extent; w *= g.tail_ratio) {
    cells.push_back({b + 0.5 * w, w});
    b += w;
  }
  return cells;
}

}  // namespace

AmplitudeProfile profile_resolvent(const PotentialSpec& spec, double T, const LatticeWindow& window,
                                   const EnergyGrid& grid) {
  if (!(T > 0.0)) throw DomainError("profile_resolvent: T must be positive");
  window.validate();
  const double eps = 1.0 / T;
  if (!(grid.spacing > 0.0) || grid.spacing > 0.25 * eps * (1.0 + 1e-12))
    throw DomainError("profile_resolvent: energy spacing must not exceed eps/4");
  if (!(grid.hi > grid.lo)) throw DomainError("profile_resolvent: empty energy range");

  // Solve on a much wider window: phi decays like exp(-eps |n| / 2) inside the spectrum.
  const long reach = static_cast<long>(std::ceil(40.0 * T)) + 64;
  LatticeWindow ext = window;
  ext.hi = std::max(window.hi, 1 + reach);
  ext.lo = spec.geometry == Geometry::HalfLineDirichlet ? 1 : std::min(window.lo, 1 - reach);
  const auto v = potential_on(spec, ext);
  const std::size_t source = ext.index(1);
  const std::size_t offset = ext.index(window.lo);
  const std::size_t out_n = window.size();

  std::vector<std::size_t> fine_index;
  const auto cells = energy_cells(grid, fine_index);
  constexpr std::size_t kChunk = 32;
  const std::size_t n_chunks = (cells.size() + kChunk - 1) / kChunk;
  std::vector<std::vector<double>> partial(n_chunks);
  ResolventOptions opt;

  auto solve = [&](double E) {
    auto phi = resolvent_vector(v, source, cplx{E, eps});
    double peak = 0.0;
    for (const auto& x : phi) peak = std::max(peak, std::abs(x));
    const double edge = std::max(spec.geometry == Geometry::WholeLine ? std::abs(phi.front()) : 0.0,
                                 std::abs(phi.back()));
    if (edge > opt.boundary_tol * peak)
      throw TruncationError("profile_resolvent: extended window too small at E = " + std::to_string(E));
    return phi;
  };

  parallel_for(n_chunks, [&](std::size_t c) {
    std::vector<double> acc(out_n, 0.0);
    const std::size_t end = std::min(cells.size(), (c + 1) * kChunk);
    for (std::size_t j = c * kChunk; j < end; ++j) {
      const auto phi = solve(cells[j].E);
      for (std::size_t i = 0; i < out_n; ++i) acc[i] += cells[j].weight * std::norm(phi[offset + i]);
    }
    partial[c] = std::move(acc);
  });

  AmplitudeProfile prof;
  prof.T = T;
  prof.window = window;
  prof.method = ProfileMethod::Resolvent;
  prof.a.assign(out_n, 0.0);
  for (const auto& acc : partial)
    for (std::size_t i = 0; i < out_n; ++i) prof.a[i] += acc[i];

  // Far tails: phi(1) ~ -1/E, so int_{|E| > L} |phi(1)|^2 dE ~ 1/(L - V(1)) on each side.
  const double left_end = cells.front().E - 0.5 * cells.front().weight;
  const double right_end = cells.back().E + 0.5 * cells.back().weight;
  const double v1 = v[source];
  const double scale = eps / std::numbers::pi;
  for (auto& x : prof.a) x *= scale;
  if (window.contains(1))
    prof.a[window.index(1)] += scale * (1.0 / (right_end - v1) + 1.0 / (v1 - left_end));

  // Richardson check: halve every 16th fine cell and compare the windowed mass.
  std::vector<std::size_t> probe;
  for (std::size_t j = 0; j < fine_index.size(); j += 16) probe.push_back(fine_index[j]);
  std::vector<double> diff(probe.size()), ref(probe.size());
  parallel_for(probe.size(), [&](std::size_t q) {
    const Cell& c = cells[probe[q]];
    auto mass = [&](double E) {
      const auto phi = solve(E);
      double s = 0.0;
      for (std::size_t i = 0; i < out_n; ++i) s += std::norm(phi[offset + i]);
      return s;
    };
    const double coarse = c.weight * mass(c.E);
    const double fine = 0.5 * c.weight * (mass(c.E - 0.25 * c.weight) + mass(c.E + 0.25 * c.weight));
    diff[q] = std::abs(coarse - fine);
    ref[q] = fine;
  });
  const double ref_sum = pairwise_sum(ref);
  prof.quadrature_error = ref_sum > 0.0 ? pairwise_sum(diff) / ref_sum : 0.0;
  return prof;
}

AmplitudeProfile profile_resolvent(const PotentialSpec& spec, double T, const LatticeWindow& window) {
  return profile_resolvent(spec, T, window, default_energy_grid(spec, T));
}

}  // namespace qdyn
