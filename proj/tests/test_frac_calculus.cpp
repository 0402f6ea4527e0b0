#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracbound/errors.hpp"
#include "fracbound/frac_calculus.hpp"
#include "fracbound/toeplitz.hpp"

using namespace fracbound;

namespace {

double max_rel(const SampledFunction& a, const SampledFunction& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k) {
    num = std::max(num, std::fabs(a.values()[k] - b.values()[k]));
    den = std::max(den, std::fabs(b.values()[k]));
  }
  return den == 0.0 ? num : num / den;
}

// Brute-force J^alpha g(t) by tanh-sinh quadrature in u = t - s, so the kernel
// singularity sits at u = 0 where abscissae carry full precision.
template <class G>
double brute_rl(G g, double alpha, double t0, double t) {
  if (t <= t0) return 0.0;
  boost::math::quadrature::tanh_sinh<double> ts;
  const double v = ts.integrate([&](double u) { return std::pow(u, alpha - 1.0) * g(t - u); }, 0.0, t - t0, 1e-14);
  return v / std::tgamma(alpha);
}

double slope(const std::vector<double>& ns, const std::vector<double>& errs) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double x = std::log(ns[i]), y = std::log(errs[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  return -(m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

TEST_CASE("gamma function") {
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
  CHECK(gamma_fn(1.5) == doctest::Approx(0.5 * std::sqrt(M_PI)).epsilon(1e-14));
  double fact = 1.0;
  for (int k = 1; k < 25; ++k) {
    CHECK(gamma_fn(k) == doctest::Approx(fact).epsilon(1e-13));
    fact *= k;
  }
  // Reflection formula spot checks on (0, 1).
  for (double x : {0.1, 0.25, 0.6, 0.9})
    CHECK(gamma_fn(x) * gamma_fn(1 - x) == doctest::Approx(M_PI / std::sin(M_PI * x)).epsilon(1e-13));
}

TEST_CASE("order ceiling conventions") {
  CHECK(order_ceiling(1.0) == 2);
  CHECK(order_ceiling(0.5) == 1);
  CHECK(order_ceiling(1.0, OrderConvention::ceil) == 1);
  CHECK(order_ceiling(1.5, OrderConvention::ceil) == 2);
  CHECK_THROWS_AS(order_ceiling(0.0), InvalidOrder);
  FracParams fp;
  fp.p = 1.0;
  CHECK(std::isinf(fp.p_prime()));
  fp.p = INFINITY;
  CHECK(fp.p_prime() == 1.0);
  fp.p = 4.0;
  CHECK(fp.p_prime() == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("rl_integral examples") {
  for (auto scheme : {QuadratureScheme::productTrapezoidNaive, QuadratureScheme::productTrapezoidFFT}) {
    const auto z = rl_integral(sample(AnalyticSpec::constant({0.0}), 64), 0.7, scheme);
    for (double v : z.values()) CHECK(v == 0.0);

    const auto one = rl_integral(sample(AnalyticSpec::constant({1.0}), 256), 0.5, scheme);
    CHECK(std::fabs(one.at(256)[0] - 1.1283791671) < 1e-10);
    CHECK(std::fabs(one.at(256)[0] - 1.0 / std::tgamma(1.5)) < 1e-12);
    CHECK(one.at(0)[0] == 0.0);

    const auto lin = rl_integral(sample(AnalyticSpec::power(1.0), 256), 0.5, scheme);
    CHECK(std::fabs(lin.at(256)[0] - 1.0 / std::tgamma(2.5)) < 1e-12);
  }
  CHECK_THROWS_AS(rl_integral(sample(AnalyticSpec::constant({1.0}), 8), 0.0), InvalidOrder);
  CHECK_THROWS_AS(rl_integral(sample(AnalyticSpec::constant({1.0}), 8), -1.0), InvalidOrder);
}

TEST_CASE("power oracle against brute-force Beta integrals") {
  CHECK(rl_integral_power_oracle(0.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  const double a = rl_integral_power_oracle(1.0, 0.5, 1.0);
  CHECK(std::fabs(a - 0.7522527781) < 1e-9);
  CHECK(std::fabs(a - brute_rl([](double s) { return s; }, 0.5, 0.0, 1.0)) < 1e-8);
  const double b = rl_integral_power_oracle(-0.4, 0.75, 1.0);
  CHECK(b == doctest::Approx(1.6711).epsilon(1e-4));
  CHECK(std::fabs(b - brute_rl([](double s) { return std::pow(s, -0.4); }, 0.75, 0.0, 1.0)) < 1e-8);
  CHECK_THROWS_AS(rl_integral_power_oracle(-1.0, 0.5, 1.0), InvalidExponent);
}

TEST_CASE("rl_integral of smooth non-polynomial data matches brute force") {
  const auto spec = AnalyticSpec::trig({1.0}, {2.0 * M_PI}, {0.3});
  const double alpha = 0.35;
  const auto f = sample(spec, 2048);
  const auto j = rl_integral(f, alpha);
  for (std::size_t i : {1u, 100u, 1024u, 2048u}) {
    const double ref = brute_rl([](double s) { return std::sin(2.0 * M_PI * s + 0.3); }, alpha, 0.0, f.node(i));
    CHECK(std::fabs(j.at(i)[0] - ref) < 1e-5);
  }
}

TEST_CASE("exact for piecewise-linear data") {
  // Arbitrary node values; the oracle integrates the kernel against the linear interpolant cell by cell.
  const std::size_t n = 12;
  const std::vector<double> v{0.3, -1.0, 2.0, 0.5, 0.5, 4.0, -2.0, 0.0, 1.0, 3.0, -0.7, 0.2, 1.1};
  SampledFunction f({0.0, 1.5}, n, v);
  const double h = 1.5 / n;
  for (double alpha : {0.3, 0.5, 1.0, 1.7}) {
    const auto j = rl_integral(f, alpha, QuadratureScheme::productTrapezoidNaive);
    for (std::size_t i = 1; i <= n; ++i) {
      const double t = h * i;
      boost::math::quadrature::tanh_sinh<double> ts;
      double ref = 0.0;
      for (std::size_t c = 0; c < i; ++c) {
        const double a = h * c, b = h * (c + 1);
        ref += ts.integrate(
            [&](double u) { return std::pow(u, alpha - 1.0) * (v[c] + (v[c + 1] - v[c]) * (t - u - a) / h); }, t - b,
            t - a, 1e-15);
      }
      ref /= std::tgamma(alpha);
      CHECK(std::fabs(j.at(i)[0] - ref) <= 1e-12 * std::max(1.0, std::fabs(ref)));
    }
  }
}

TEST_CASE("linearity") {
  const auto f = sample(AnalyticSpec::trig({1.0}, {5.0}, {0.0}), 500);
  const auto g = sample(AnalyticSpec::power(0.5), 500);
  for (double alpha : {0.25, 1.5}) {
    const auto lhs = rl_integral(combine(2.0, f, -3.0, g), alpha);
    const auto rhs = combine(2.0, rl_integral(f, alpha), -3.0, rl_integral(g, alpha));
    CHECK(max_rel(lhs, rhs) <= 1e-12);
  }
}

TEST_CASE("vector-valued data is integrated per component") {
  const auto f = sample(AnalyticSpec::polynomial({{1.0, 0.0, -1.0}, {0.0, 2.0, 0.0, -1.0}}), 64);
  const auto j = rl_integral(f, 0.5);
  const auto j0 = rl_integral(SampledFunction(f.interval(), 64, f.component(0)), 0.5);
  const auto j1 = rl_integral(SampledFunction(f.interval(), 64, f.component(1)), 0.5);
  for (std::size_t i = 0; i <= 64; ++i) {
    CHECK(j.at(i)[0] == doctest::Approx(j0.at(i)[0]).epsilon(1e-14));
    CHECK(j.at(i)[1] == doctest::Approx(j1.at(i)[0]).epsilon(1e-14));
  }
}

TEST_CASE("scheme equivalence") {
  const std::vector<AnalyticSpec> specs{AnalyticSpec::power(-0.4), AnalyticSpec::trig({1.0}, {2.0 * M_PI}, {0.0}),
                                        AnalyticSpec::step({0.5}, {{0.0}, {1.0}})};
  for (std::size_t n : {3u, 17u, 256u, 1000u, 4096u})
    for (const auto& s : specs)
      for (double alpha : {0.25, 0.75, 1.5}) {
        const auto f = sample(s, n);
        CHECK(max_rel(rl_integral(f, alpha, QuadratureScheme::productTrapezoidFFT),
                      rl_integral(f, alpha, QuadratureScheme::productTrapezoidNaive)) <= 1e-10);
      }
}

TEST_CASE("toeplitz products agree") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {1u, 2u, 5u, 64u, 333u}) {
    std::vector<double> c(n), x(n), y1(n), y2(n);
    for (auto& e : c) e = u(rng);
    for (auto& e : x) e = u(rng);
    lower_toeplitz_apply_naive(c, x, y1);
    LowerToeplitzFft op(c);
    CHECK(op.embedding_size() >= 2 * n);
    op.apply(x, y2);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::fabs(y1[k] - y2[k]) < 1e-12 * n);
  }
}

TEST_CASE("weights are nonnegative and match direct formulas") {
  for (double alpha : {0.1, 0.5, 1.0, 1.5, 2.5}) {
    const auto w = product_weights(alpha, 64);
    const long double a = alpha + 1.0L;
    for (std::size_t k = 0; k < 64; ++k) {
      CHECK(w->toeplitz[k] >= 0.0);
      if (k == 0) continue;
      const long double kd = k;
      const long double direct = std::pow(kd + 1, a) - 2 * std::pow(kd, a) + std::pow(kd - 1, a);
      CHECK(std::fabs(w->toeplitz[k] - static_cast<double>(direct)) <= 1e-9 * std::fabs(static_cast<double>(direct)) + 1e-15);
    }
    CHECK(w->boundary[0] == 0.0);
    for (std::size_t i = 1; i <= 64; ++i) {
      const long double id = i;
      const long double direct = std::pow(id - 1, a) - (id - 1 - alpha) * std::pow(id, static_cast<long double>(alpha));
      CHECK(w->boundary[i] >= 0.0);
      CHECK(std::fabs(w->boundary[i] - static_cast<double>(direct)) <= 1e-9 * std::fabs(static_cast<double>(direct)) + 1e-15);
    }
  }
}

TEST_CASE("nonnegative data gives nonnegative integrals") {
  for (const auto& s : {AnalyticSpec::power(-0.4), AnalyticSpec::step({0.5}, {{0.0}, {1.0}}),
                        AnalyticSpec::trig({1.0}, {3.0}, {0.0})})
    for (double alpha : {0.2, 0.9, 1.6}) {
      const auto f = sample(s, 300);
      const auto exact = rl_integral(f, alpha, QuadratureScheme::productTrapezoidNaive);
      for (double v : exact.values()) CHECK(v >= 0.0);
      // The FFT path may dip below zero by roundoff only.
      const auto fast = rl_integral(f, alpha, QuadratureScheme::productTrapezoidFFT);
      for (double v : fast.values()) CHECK(v >= -1e-14);
    }
}

TEST_CASE("convergence order for smooth data") {
  for (double alpha : {0.25, 0.5, 1.5}) {
    std::vector<double> ns, errs;
    for (int e = 8; e <= 13; ++e) {
      const std::size_t n = std::size_t{1} << e;
      const auto j = rl_integral(sample(AnalyticSpec::power(2.0), n), alpha);
      double err = 0.0;
      for (std::size_t i = 0; i <= n; ++i)
        err = std::max(err, std::fabs(j.at(i)[0] - rl_integral_power_oracle(2.0, alpha, j.node(i))));
      ns.push_back(n);
      errs.push_back(err);
    }
    CHECK(slope(ns, errs) >= 1.9);
  }
}

TEST_CASE("rl_derivative examples") {
  const std::size_t n = 2048;
  const auto lin = sample(AnalyticSpec::power(1.0), n);
  const auto d = rl_derivative(lin, 0.5);
  for (std::size_t i = n / 4; i <= n; i += n / 8)
    CHECK(std::fabs(d.at(i)[0] - 2.0 * std::sqrt(d.node(i) / M_PI)) < 1e-5);

  const auto z = rl_derivative(sample(AnalyticSpec::constant({0.0}), 32), 1.3);
  for (double v : z.values()) CHECK(v == 0.0);

  const auto s = rl_derivative(sample(AnalyticSpec::power(0.5), n), 0.5);
  for (std::size_t i = n / 4; i < n; i += n / 8) CHECK(std::fabs(s.at(i)[0] - std::tgamma(1.5)) < 1e-4);

  CHECK_THROWS_AS(rl_derivative(sample(AnalyticSpec::power(1.0), 3), 0.5), GridTooCoarse);
  CHECK_THROWS_AS(rl_derivative(sample(AnalyticSpec::power(1.0), 5), 1.5), GridTooCoarse);
  CHECK_NOTHROW(rl_derivative(sample(AnalyticSpec::power(1.0), 6), 1.5));

  // Integer order under the strict convention: d^2/dt^2 J^1 f = f'.
  const auto sq = rl_derivative(sample(AnalyticSpec::power(2.0), 256), 1.0);
  for (std::size_t i = 2; i <= 254; ++i) CHECK(std::fabs(sq.at(i)[0] - 2.0 * sq.node(i)) < 1e-10);
  const auto sq2 = rl_derivative(sample(AnalyticSpec::power(2.0), 256), 1.0, QuadratureScheme::productTrapezoidFFT,
                                 OrderConvention::ceil);
  for (std::size_t i = 0; i <= 256; ++i) CHECK(std::fabs(sq2.at(i)[0] - 2.0 * sq2.node(i)) < 1e-10);
}

TEST_CASE("semigroup examples") {
  const std::size_t n = 1024;
  auto [a, b] = semigroup_compose(sample(AnalyticSpec::constant({1.0}), n), 0.5, 0.5);
  for (std::size_t i = 0; i <= n; ++i) {
    CHECK(std::fabs(a.at(i)[0] - a.node(i)) < 5e-4);
    CHECK(std::fabs(b.at(i)[0] - b.node(i)) < 1e-12);
  }
  auto [c, d] = semigroup_compose(sample(AnalyticSpec::power(1.0), n), 1.0, 1.0);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = c.node(i);
    CHECK(std::fabs(c.at(i)[0] - t * t * t / 6) < 1e-6);
    CHECK(std::fabs(d.at(i)[0] - t * t * t / 6) < 1e-12);
  }
  auto [e, g] = semigroup_compose(sample(AnalyticSpec::power(0.5), n), 0.3, 0.7);
  for (std::size_t i = 0; i <= n; i += 64) {
    const double ref = rl_integral_power_oracle(0.5, 1.0, e.node(i));
    CHECK(std::fabs(e.at(i)[0] - ref) < 1e-4);
    CHECK(std::fabs(g.at(i)[0] - ref) < 1e-4);
  }
  std::vector<double> ns, errs;
  for (int k = 8; k <= 12; ++k) {
    const std::size_t m = std::size_t{1} << k;
    auto [x, y] = semigroup_compose(sample(AnalyticSpec::trig({1.0}, {2.0 * M_PI}, {0.0}), m), 0.3, 0.7);
    ns.push_back(m);
    errs.push_back(max_rel(x, y));
  }
  CHECK(slope(ns, errs) >= 1.0);
}
