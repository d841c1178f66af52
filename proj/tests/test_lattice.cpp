#include <doctest.h>

#include <cmath>
#include <random>

#include "qdyn/errors.hpp"
#include "qdyn/lattice.hpp"

using namespace qdyn;

namespace {

PotentialSpec spec_of(Model m, double lambda, Geometry g = Geometry::WholeLine) {
  PotentialSpec s;
  s.model = m;
  s.lambda = lambda;
  s.geometry = g;
  return s;
}

}  // namespace

TEST_CASE("fibonacci letters match a long double evaluation of floor((n+1)w) - floor(nw)") {
  const long double w = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  const auto s = spec_of(Model::Fibonacci, 1.0);
  for (long n = -5000; n <= 5000; ++n) {
    const int expect = static_cast<int>(std::floor((n + 1) * w) - std::floor(n * w));
    REQUIRE(potential_letter(s, n) == expect);
  }
}

TEST_CASE("floor(n w) is exact far out and symmetric") {
  // n w + (-n) w = -1 for n != 0 since n w is irrational
  for (long long n : {1LL, 7LL, 123456789LL, 999999999999999LL})
    CHECK(floor_n_omega(n) + floor_n_omega(-n) == -1);
  CHECK(floor_n_omega(0) == 0);
  CHECK(floor_n_omega(1) == 0);
  CHECK(floor_n_omega(2) == 1);
  CHECK(floor_n_omega(10) == 6);
  CHECK_THROWS_AS(floor_n_omega(2'000'000'000'000'000LL), DomainError);
}

TEST_CASE("fibonacci potential is symmetric away from the origin") {
  const auto s = spec_of(Model::Fibonacci, 2.0);
  for (long n = 2; n < 2000; ++n) CHECK(potential_value(s, -n) == potential_value(s, n - 1));
  CHECK(potential_value(s, 0) == 0.0);
}

TEST_CASE("substitution words") {
  CHECK(substitution_word(Model::PeriodDoubling, 0) == Word{0});
  CHECK(substitution_word(Model::PeriodDoubling, 2) == Word{0, 1, 0, 0});
  CHECK(substitution_word(Model::ThueMorse, 3) == Word{0, 1, 1, 0, 1, 0, 0, 1});
  CHECK_THROWS_AS(substitution_word(Model::ThueMorse, 12, 1000), ResourceError);
  CHECK_THROWS_AS(substitute(Model::Fibonacci, Word{0}), DomainError);

  // the one-sided fixed point agrees with the letter formula
  for (Model m : {Model::PeriodDoubling, Model::ThueMorse}) {
    const auto w = substitution_word(m, 12);
    const auto s = spec_of(m, 1.0);
    for (std::size_t i = 0; i < w.size(); ++i) REQUIRE(potential_letter(s, static_cast<long>(i) + 1) == w[i]);
  }
}

TEST_CASE("two-sided elements are legal: every window appears in S^k(0)") {
  for (Model m : {Model::PeriodDoubling, Model::ThueMorse}) {
    const auto s = spec_of(m, 1.0);
    const auto big = substitution_word(m, 16);
    std::string hay(big.begin(), big.end());
    for (char& c : hay) c = static_cast<char>('0' + c);
    for (long start = -64; start <= 0; start += 4) {
      std::string win;
      for (long n = start; n < start + 24; ++n) win += static_cast<char>('0' + potential_letter(s, n));
      INFO(to_string(m) << " window at " << start << ": " << win);
      CHECK(hay.find(win) != std::string::npos);
    }
  }
}

TEST_CASE("explicit periodic words and overlays") {
  PotentialSpec s = spec_of(Model::ExplicitPeriodic, 3.0);
  s.word = {1, 0, 0};
  CHECK(potential_value(s, 1) == 3.0);
  CHECK(potential_value(s, 4) == 3.0);
  CHECK(potential_value(s, 0) == 0.0);
  CHECK(potential_value(s, -2) == 3.0);
  const auto p = perturb(s, {{2, 0.5}});
  CHECK(potential_value(p, 2) == 0.5);
  CHECK(potential_value(perturb(p, {{2, 0.25}}), 2) == 0.75);
}

TEST_CASE("half-line sites must be positive") {
  const auto s = spec_of(Model::Free, 0.0, Geometry::HalfLineDirichlet);
  CHECK_THROWS_AS(potential_value(s, 0), DomainError);
  const auto w = LatticeWindow::around_origin(Geometry::HalfLineDirichlet, 10);
  CHECK(w.lo == 1);
  CHECK(w.hi == 11);
  CHECK_THROWS_AS((LatticeWindow{0, 5, Geometry::HalfLineDirichlet}.validate()), DomainError);
}

TEST_CASE("transfer matrices: determinant one and cocycle") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> e(-3.0, 4.0);
  for (Model m : {Model::Fibonacci, Model::PeriodDoubling, Model::ThueMorse}) {
    const auto s = spec_of(m, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      const cplx z{e(rng), 0.0};
      std::uniform_int_distribution<long> site(-40, 40);
      const long a = site(rng), b = site(rng), c = site(rng);
      const Mat2 tab = transfer_matrix(s, a, b, z), tbc = transfer_matrix(s, b, c, z), tac = transfer_matrix(s, a, c, z);
      const double scale = std::max(1.0, norm(tac) * norm(tac));
      CHECK(std::abs(tac.det() - 1.0) <= 1e-12 * scale);
      CHECK(norm(tac - tab * tbc) <= 1e-10 * std::max(1.0, norm(tab) * norm(tbc)));
    }
  }
  const auto s = spec_of(Model::Free, 0.0);
  CHECK(norm(transfer_matrix(s, 5, 5, 0.3) - Mat2::identity()) == 0.0);
}

TEST_CASE("transfer matrices propagate eigenfunction solutions of H") {
  const auto s = spec_of(Model::Fibonacci, 1.5);
  const cplx z{0.7, 0.2};
  const LatticeWindow w{-30, 30, Geometry::WholeLine};
  std::vector<cplx> u(w.size());
  // u(n) from (u(n+1), u(n)) = T(n, -31; z) (u(-30), u(-31)), u(-31) = 0
  for (long n = w.lo; n <= w.hi; ++n) {
    const Mat2 t = transfer_matrix(s, n - 1, w.lo - 1, z);
    u[w.index(n)] = t.a * 1.0;
  }
  const auto hu = apply_hamiltonian(s, w, u);
  for (long n = w.lo; n < w.hi; ++n) CHECK(std::abs(hu[w.index(n)] - z * u[w.index(n)]) < 1e-9 * (1 + std::abs(u[w.index(n)])));
}

TEST_CASE("scaled products agree with plain products and survive overflow") {
  const auto s = spec_of(Model::Fibonacci, 5.0);
  const cplx z{1.234, 0.0};
  const Mat2 t = transfer_matrix(s, 60, 0, z);
  const ScaledMat2 st = transfer_matrix_scaled(s, 60, 0, z);
  CHECK(std::abs(st.log_norm() - std::log(norm(t))) < 1e-10);
  const ScaledMat2 huge = transfer_matrix_scaled(s, 100000, 0, z);
  CHECK(std::isfinite(huge.log_norm()));
  CHECK(huge.log_norm() > 700.0);
  CHECK_THROWS_AS(transfer_matrix(s, 100000, 0, z), ScaleOverflow);
}

TEST_CASE("model names round-trip") {
  for (Model m : {Model::Fibonacci, Model::PeriodDoubling, Model::ThueMorse, Model::ExplicitPeriodic, Model::Free})
    CHECK(parse_model(to_string(m)) == m);
  CHECK_THROWS_AS(parse_model("bogus"), DomainError);
  CHECK(parse_geometry("half") == Geometry::HalfLineDirichlet);
}
