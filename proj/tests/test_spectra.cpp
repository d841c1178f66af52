#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "qdyn/errors.hpp"
#include "qdyn/spectra.hpp"
#include "qdyn/traces.hpp"

using namespace qdyn;

namespace {

// Band edges of the periodic operator with the given period word: the
// eigenvalues of the periodic and antiperiodic Bloch matrices, paired in order.
std::vector<std::pair<double, double>> floquet_bands(const std::vector<double>& word) {
  const auto L = static_cast<Eigen::Index>(word.size());
  std::vector<double> eig;
  for (double sign : {1.0, -1.0}) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(L, L);
    for (Eigen::Index i = 0; i < L; ++i) {
      h(i, i) += word[i];
      h(i, (i + 1) % L) += i + 1 == L ? sign : 1.0;
      h((i + 1) % L, i) += i + 1 == L ? sign : 1.0;
    }
    if (L == 1) h(0, 0) = word[0] + 2.0 * sign;  // both neighbours are the site itself
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    for (Eigen::Index i = 0; i < L; ++i) eig.push_back(es.eigenvalues()(i));
  }
  std::sort(eig.begin(), eig.end());
  std::vector<std::pair<double, double>> bands;
  for (std::size_t i = 0; i + 1 < eig.size(); i += 2) bands.emplace_back(eig[i], eig[i + 1]);
  return bands;
}

}  // namespace

TEST_CASE("band edges agree with Floquet eigenvalues") {
  for (double lambda : {1.0, 5.0}) {
    for (int k = 0; k <= 10; ++k) {
      const auto set = approximant_spectrum(lambda, k);
      const auto word = k == 0 ? std::vector<double>{0.0} : fibonacci_period_values(lambda, k);
      const auto ref = floquet_bands(word);
      INFO("lambda=" << lambda << " k=" << k);
      REQUIRE(set.size() == ref.size());
      for (std::size_t j = 0; j < ref.size(); ++j) {
        CHECK(set.bands[j].lo == doctest::Approx(ref[j].first).epsilon(1e-8));
        CHECK(set.bands[j].hi == doctest::Approx(ref[j].second).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("sigma_k has F_k bands at lambda = 5") {
  for (int k = 0; k <= 10; ++k) {
    const auto set = approximant_spectrum(5.0, k);
    CHECK(set.size() == fibonacci_number(k));
    CHECK(set.warnings.empty());
    for (const auto& b : set.bands) {
      CHECK(std::abs(fib_trace(5.0, b.center(), k)) <= 2.0);
    }
  }
}

TEST_CASE("covering sigma_m u sigma_{m+1} inside sigma_{m-1} u sigma_m") {
  for (int m = 2; m <= 9; ++m) {
    const auto rep = covering_check(5.0, m);
    INFO("m=" << m << (rep.violations.empty() ? "" : rep.violations.front()));
    CHECK(rep.ok);
  }
  CHECK(covering_check(1.0, 6).ok);
}

TEST_CASE("type A/B genealogy and counts") {
  const auto rep = genealogy_check(5.0, 10);
  INFO((rep.violations.empty() ? std::string() : rep.violations.front()));
  CHECK(rep.ok);
  // one A child per B band, one B grandchild per A band, two per B band
  for (std::size_t i = 0; i + 2 < rep.type_a.size(); ++i) {
    CHECK(rep.type_a[i + 1] == rep.type_b[i]);
    CHECK(rep.type_b[i + 2] == rep.type_a[i] + 2 * rep.type_b[i]);
  }
  CHECK_THROWS_AS(classify_bands(3.0, 4), DomainError);
}

TEST_CASE("derivative ratios stay below lambda + 11 and 2 lambda + 22") {
  for (int k = 1; k <= 8; ++k) {
    const auto rep = derivative_ratio_check(5.0, k);
    INFO("k=" << k << " A " << rep.max_ratio_a << " B " << rep.max_ratio_b);
    CHECK(rep.ok);
    CHECK(rep.samples > 0);
  }
}

TEST_CASE("f_pm partials match finite differences and obey the bound") {
  const double h = 1e-6;
  for (double lambda : {4.5, 5.0, 8.0}) {
    for (int sign : {1, -1}) {
      for (double x : {-1.9, -0.4, 0.7, 1.8})
        for (double y : {-1.5, 0.2, 1.95}) {
          const auto d = f_pm_partials(x, y, lambda, sign);
          CHECK(d.dx == doctest::Approx((f_pm(x + h, y, lambda, sign) - f_pm(x - h, y, lambda, sign)) / (2 * h)).epsilon(1e-6));
          CHECK(d.dy == doctest::Approx((f_pm(x, y + h, lambda, sign) - f_pm(x, y - h, lambda, sign)) / (2 * h)).epsilon(1e-6));
        }
    }
    const auto rep = partial_bound_check(lambda, 10000);
    CHECK(rep.ok);
    CHECK(rep.checked == 20000);
  }
}

TEST_CASE("sobol points") {
  CHECK(sobol_2d(0) == std::pair<double, double>{0.0, 0.0});
  CHECK(sobol_2d(1) == std::pair<double, double>{0.5, 0.5});
  CHECK(sobol_2d(2) == std::pair<double, double>{0.25, 0.75});
  CHECK(sobol_2d(3) == std::pair<double, double>{0.75, 0.25});
  // stratification: each dyadic 4x4 box holds one of the first 16 points
  int seen[4][4] = {};
  for (std::uint32_t i = 0; i < 16; ++i) {
    const auto [u, v] = sobol_2d(i);
    ++seen[static_cast<int>(u * 4)][static_cast<int>(v * 4)];
  }
  for (auto& row : seen)
    for (int c : row) CHECK(c == 1);
}

TEST_CASE("bound parameters") {
  const auto p1 = bound_parameters(1.0);
  CHECK(p1.C_lambda == doctest::Approx(5.0));
  CHECK(p1.d == doctest::Approx(605.0));
  CHECK(p1.alpha == doctest::Approx(26.6213).epsilon(1e-5));
  CHECK(bound_parameters(5.0).gamma == doctest::Approx(6.2021).epsilon(1e-4));
  CHECK_THROWS_AS(bound_parameters(0.0), DomainError);
}

TEST_CASE("measure decay is no faster than F_k^{-gamma}") {
  const auto rep = measure_report(5.0, 10);
  CHECK(rep.rows.size() == 10);
  CHECK(rep.decay_exponent < 0.0);
  CHECK(rep.decay_exponent >= -rep.gamma - 0.5);
}

TEST_CASE("traces along the orbit stay below C_lambda inside sigma_k") {
  for (double lambda : {1.0, 5.0}) {
    const auto rep = trace_bound_check(lambda, 12, 100);
    CHECK(rep.ok);
    CHECK(rep.max_trace <= rep.C_lambda);
  }
}

TEST_CASE("band set helpers") {
  BandSet s;
  s.bands = {{0.0, 1.0}, {1.0 + 1e-12, 2.0}, {3.0, 4.0}};
  const auto merged = merge_touching(s, 1e-9);
  CHECK(merged.size() == 2);
  CHECK(merged.bands[0].hi == 2.0);
  CHECK(merged.container_of(Band{3.2, 3.9}, 0.0) == 1);
  CHECK(merged.container_of(Band{2.5, 3.5}, 0.0) == -1);
  CHECK(merged.contains(3.5));
  CHECK_FALSE(merged.contains(2.5));
  const auto pts = chebyshev_points(-1.0, 1.0, 33);
  CHECK(pts.size() == 33);
  CHECK(pts.front() > -1.0);
  CHECK(pts.back() < 1.0);
  CHECK(std::is_sorted(pts.begin(), pts.end()));
}
