#include <algorithm>
#include <cmath>
#include <numbers>

#include "qdyn/dynamics.hpp"
#include "qdyn/errors.hpp"

namespace qdyn {

namespace {

// One fixed step exp(-i h H) by the Chebyshev expansion of the rescaled
// operator (H - center) / half_width, applied on the active support only.
class ChebyshevStepper {
 public:
  ChebyshevStepper(std::vector<double> potential, double h, const EvolutionOptions& opt)
      : v_(std::move(potential)), n_(v_.size()) {
    const auto [lo, hi] = std::minmax_element(v_.begin(), v_.end());
    center_ = 0.5 * (*lo + *hi);
    half_ = (0.5 * (*hi - *lo) + 2.0) * (1.0 + 1e-9);
    const double a = half_ * h;
    order_ = certified_order(a, opt.tail_tol, opt.max_order);
    coef_.resize(order_ + 1);
    for (int k = 0; k <= order_; ++k) {
      static constexpr cplx kMinusI[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
      coef_[k] = (k == 0 ? 1.0 : 2.0) * kMinusI[k % 4] * std::cyl_bessel_j(static_cast<double>(k), a);
    }
    phase_ = std::exp(cplx{0.0, -center_ * h});
    for (auto& b : buf_) b.assign(n_, cplx{});
    out_.assign(n_, cplx{});
  }

  int order() const { return order_; }

  // psi is zero outside [lo, hi]; on return the same holds for the new support.
  void step(std::vector<cplx>& psi, std::size_t& lo, std::size_t& hi) {
    auto grow = [&](std::size_t k, std::size_t& a, std::size_t& b) {
      a = lo > k ? lo - k : 0;
      b = std::min(n_ - 1, hi + k);
    };
    std::size_t a = lo, b = hi;
    reset(out_, out_range_, a, b);
    cplx* prev = nullptr;
    std::vector<cplx>* cur = &psi;
    for (std::size_t i = a; i <= b; ++i) out_[i] = coef_[0] * psi[i];
    std::size_t ra = a, rb = b;
    for (int k = 1; k <= order_; ++k) {
      std::vector<cplx>& dst = buf_[k % 3];
      std::pair<std::size_t, std::size_t>& dst_range = range_[k % 3];
      grow(static_cast<std::size_t>(k), a, b);
      reset(dst, dst_range, a, b);
      const double s = k == 1 ? 1.0 : 2.0;
      const cplx* src = cur->data();
      for (std::size_t i = a; i <= b; ++i) {
        cplx hv = (v_[i] - center_) * src[i];
        if (i > 0) hv += src[i - 1];
        if (i + 1 < n_) hv += src[i + 1];
        cplx x = (s / half_) * hv;
        if (prev) x -= prev[i];
        dst[i] = x;
      }
      // out_ covers [ra, rb]; widen it to [a, b]
      for (std::size_t i = a; i < ra; ++i) out_[i] = 0.0;
      for (std::size_t i = rb + 1; i <= b; ++i) out_[i] = 0.0;
      ra = a;
      rb = b;
      for (std::size_t i = a; i <= b; ++i) out_[i] += coef_[k] * dst[i];
      prev = cur->data();
      cur = &dst;
    }
    out_range_ = {ra, rb};
    for (std::size_t i = lo; i <= hi; ++i) psi[i] = 0.0;
    for (std::size_t i = ra; i <= rb; ++i) psi[i] = phase_ * out_[i];
    lo = ra;
    hi = rb;
  }

 private:
  static int certified_order(double a, double tol, int cap) {
    // sum_{k > K} 2 |J_k(a)| <= 2 (a/2)^{K+1} / (K+1)! / (1 - a / (2 (K+2)))
    for (int K = std::max(1, static_cast<int>(std::ceil(a))); K <= cap; ++K) {
      const double ratio = a / (2.0 * (K + 2));
      if (ratio >= 1.0) continue;
      const double log_tail = std::log(2.0) + (K + 1) * std::log(a / 2.0) - std::lgamma(K + 2.0) -
                              std::log1p(-ratio);
      if (log_tail <= std::log(tol)) return K;
    }
    throw ResourceError("evolution: expansion order cap " + std::to_string(cap) + " reached");
  }

  // Clear the part of the previously written range of `v` that falls outside [a, b].
  static void reset(std::vector<cplx>& v, std::pair<std::size_t, std::size_t>& range, std::size_t a,
                    std::size_t b) {
    for (std::size_t i = range.first; i <= range.second && i < v.size(); ++i)
      if (i < a || i > b) v[i] = 0.0;
    range = {a, b};
  }

  std::vector<double> v_;
  std::size_t n_;
  double center_ = 0.0;
  double half_ = 1.0;
  int order_ = 0;
  std::vector<cplx> coef_;
  cplx phase_{1.0};
  std::vector<cplx> buf_[3];
  std::pair<std::size_t, std::size_t> range_[3] = {{0, 0}, {0, 0}, {0, 0}};
  std::vector<cplx> out_;
  std::pair<std::size_t, std::size_t> out_range_{0, 0};
};

void trim(const std::vector<cplx>& psi, std::size_t& lo, std::size_t& hi, double tol) {
  while (lo < hi && std::norm(psi[lo]) < tol) ++lo;
  while (hi > lo && std::norm(psi[hi]) < tol) --hi;
}

void check_edges(const std::vector<cplx>& psi, std::size_t lo, std::size_t hi, const LatticeWindow& w,
                 double tol) {
  const bool left_open = w.geometry == Geometry::WholeLine || w.lo > 1;
  const bool bad = (left_open && lo == 0 && std::norm(psi.front()) > tol) ||
                   (hi + 1 == psi.size() && std::norm(psi.back()) > tol);
  if (bad)
    throw TruncationError("evolution: wave packet reached the window edge [" + std::to_string(w.lo) +
                          ", " + std::to_string(w.hi) + "]");
}

double step_size(const std::vector<double>& v, double requested) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double half = 0.5 * (*hi - *lo) + 2.0;
  return std::min(requested, std::numbers::pi / (2.0 * half));
}

}  // namespace

std::vector<cplx> evolve_state(const PotentialSpec& spec, double t, const LatticeWindow& window,
                               const EvolutionOptions& opt) {
  window.validate();
  if (!window.contains(1)) throw DomainError("evolution: window must contain site 1");
  if (!(t >= 0.0)) throw DomainError("evolution: t must be nonnegative");
  std::vector<cplx> psi(window.size(), cplx{});
  std::size_t lo = window.index(1), hi = lo;
  psi[lo] = 1.0;
  if (t == 0.0) return psi;
  auto v = potential_on(spec, window);
  const double h_max = step_size(v, opt.max_step);
  const auto steps = static_cast<long>(std::ceil(t / h_max));
  ChebyshevStepper stepper(std::move(v), t / static_cast<double>(steps), opt);
  for (long s = 0; s < steps; ++s) {
    stepper.step(psi, lo, hi);
    trim(psi, lo, hi, opt.trim_tol);
    check_edges(psi, lo, hi, window, opt.boundary_tol);
  }
  return psi;
}

LatticeWindow dynamics_window(Geometry g, double T_max, double cutoff) {
  return LatticeWindow::around_origin(g, static_cast<long>(std::ceil(2.5 * cutoff * T_max)) + 64);
}

std::vector<AmplitudeProfile> profile_time_ladder(const PotentialSpec& spec, const std::vector<double>& Ts,
                                                  const LatticeWindow& window, const EvolutionOptions& opt) {
  window.validate();
  if (!window.contains(1)) throw DomainError("profile_time: window must contain site 1");
  if (Ts.empty()) throw DomainError("profile_time: empty T ladder");
  for (std::size_t j = 0; j < Ts.size(); ++j)
    if (!(Ts[j] > 0.0) || (j && !(Ts[j] > Ts[j - 1])))
      throw DomainError("profile_time: T ladder must be positive and increasing");

  auto v = potential_on(spec, window);
  const double t_max = kTimeCutoff * Ts.back();
  const double h_max = std::min(step_size(v, opt.max_step), Ts.front() / 8.0);
  const auto steps = static_cast<long>(std::ceil(t_max / h_max));
  const double h = t_max / static_cast<double>(steps);

  // Product trapezoid: |psi|^2 linear between nodes, weight (2/T) e^{-2t/T} exact.
  struct Slot {
    double beta;
    long last;  // last node index inside [0, c T]
    double w_first, w_inner, w_last;
  };
  std::vector<Slot> slots;
  std::vector<AmplitudeProfile> out(Ts.size());
  for (std::size_t j = 0; j < Ts.size(); ++j) {
    const double beta = 2.0 / Ts[j];
    const double x = beta * h;
    Slot s{beta, std::min(steps, static_cast<long>(std::floor(kTimeCutoff * Ts[j] / h + 1e-9))),
           (std::expm1(-x) + x) / x, 2.0 * (std::cosh(x) - 1.0) / x, (std::expm1(x) - x) / x};
    slots.push_back(s);
    out[j].T = Ts[j];
    out[j].window = window;
    out[j].method = ProfileMethod::TimeAverage;
    out[j].a.assign(window.size(), 0.0);
    out[j].cutoff_weight = std::exp(-beta * static_cast<double>(s.last) * h);
  }

  std::vector<cplx> psi(window.size(), cplx{});
  std::size_t lo = window.index(1), hi = lo;
  psi[lo] = 1.0;
  ChebyshevStepper stepper(std::move(v), h, opt);
  for (long i = 0;; ++i) {
    for (std::size_t j = 0; j < slots.size(); ++j) {
      const Slot& s = slots[j];
      if (i > s.last) continue;
      const double decay = std::exp(-s.beta * static_cast<double>(i) * h);
      const double w = decay * (i == 0 ? s.w_first : i == s.last ? s.w_last : s.w_inner);
      auto& a = out[j].a;
      for (std::size_t n = lo; n <= hi; ++n) a[n] += w * std::norm(psi[n]);
    }
    if (i == slots.back().last) break;
    stepper.step(psi, lo, hi);
    trim(psi, lo, hi, opt.trim_tol);
    check_edges(psi, lo, hi, window, opt.boundary_tol);
  }
  return out;
}

AmplitudeProfile profile_time(const PotentialSpec& spec, double T, const LatticeWindow& window,
                              const EvolutionOptions& opt) {
  return profile_time_ladder(spec, {T}, window, opt).front();
}

}  // namespace qdyn
