#include "fracbound/frac_calculus.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <shared_mutex>

#include "fracbound/errors.hpp"
#include "fracbound/format.hpp"
#include "fracbound/toeplitz.hpp"

namespace fracbound {

namespace {

// Concurrent readers, one writer at a time. Entries handed out stay alive after eviction.
template <class Value>
class Memo {
 public:
  using Key = std::pair<std::uint64_t, std::size_t>;

  template <class Make>
  std::shared_ptr<const Value> get(Key key, Make&& make) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = table_.find(key); it != table_.end()) return it->second;
    }
    auto fresh = std::shared_ptr<const Value>(make());
    std::unique_lock lock(mutex_);
    if (table_.size() >= kMaxEntries) table_.clear();
    return table_.try_emplace(key, std::move(fresh)).first->second;
  }

 private:
  static constexpr std::size_t kMaxEntries = 256;
  std::shared_mutex mutex_;
  std::map<Key, std::shared_ptr<const Value>> table_;
};

Memo<ProductWeights>& weight_memo() {
  static Memo<ProductWeights> memo;
  return memo;
}

Memo<LowerToeplitzFft>& fft_memo() {
  static Memo<LowerToeplitzFft> memo;
  return memo;
}

void check_order(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InvalidOrder("order must be a positive finite number, got " + short_num(alpha));
}

constexpr std::size_t kSeriesThreshold = 8;

// (k+1)^a - 2 k^a + (k-1)^a. For large k the direct form cancels badly, so use
// 2 * sum_{m even >= 2} binom(a, m) k^{a-m}.
double second_difference(double a, std::size_t k) {
  const double kd = static_cast<double>(k);
  if (k == 0) return 1.0;
  if (k < kSeriesThreshold) return std::pow(kd + 1.0, a) - 2.0 * std::pow(kd, a) + std::pow(kd - 1.0, a);
  const double inv_k2 = 1.0 / (kd * kd);
  double binom = a * (a - 1.0) / 2.0;
  double power = std::pow(kd, a - 2.0);
  double sum = 0.0;
  for (int m = 2; m < 200; m += 2) {
    const double term = binom * power;
    sum += term;
    if (std::fabs(term) <= 1e-18 * std::fabs(sum) || binom == 0.0) break;
    binom *= (a - m) * (a - m - 1.0) / ((m + 1.0) * (m + 2.0));
    power *= inv_k2;
  }
  return 2.0 * sum;
}

// (i-1)^a - (i-1-alpha) i^alpha with a = alpha + 1; large-i form
// i^a * sum_{m >= 2} binom(a, m) (-1/i)^m.
double boundary_weight(double alpha, std::size_t i) {
  const double a = alpha + 1.0;
  const double id = static_cast<double>(i);
  if (i == 0) return 0.0;
  if (i < kSeriesThreshold) return std::pow(id - 1.0, a) - (id - 1.0 - alpha) * std::pow(id, alpha);
  double binom = a * (a - 1.0) / 2.0;
  double power = std::pow(id, a - 2.0);
  double sum = 0.0;
  for (int m = 2; m < 400; ++m) {
    const double term = binom * power;
    sum += (m % 2 == 0) ? term : -term;
    if (std::fabs(term) <= 1e-18 * std::fabs(sum) || binom == 0.0) break;
    binom *= (a - m) / (m + 1.0);
    power /= id;
  }
  return sum;
}

std::shared_ptr<const LowerToeplitzFft> fft_operator(double alpha, std::size_t n) {
  return fft_memo().get({std::bit_cast<std::uint64_t>(alpha), n}, [&] {
    const auto w = product_weights(alpha, n);
    return new LowerToeplitzFft(w->toeplitz);
  });
}

}  // namespace

std::string to_string(QuadratureScheme scheme) {
  return scheme == QuadratureScheme::productTrapezoidNaive ? "naive" : "fft";
}

QuadratureScheme scheme_from_string(const std::string& s) {
  if (s == "naive" || s == "productTrapezoidNaive") return QuadratureScheme::productTrapezoidNaive;
  if (s == "fft" || s == "productTrapezoidFFT") return QuadratureScheme::productTrapezoidFFT;
  throw InvalidArgument("unknown quadrature scheme '" + s + "' (use naive or fft)");
}

int order_ceiling(double alpha, OrderConvention convention) {
  check_order(alpha);
  const double fl = std::floor(alpha);
  if (convention == OrderConvention::ceil && fl == alpha) return static_cast<int>(fl);
  return static_cast<int>(fl) + 1;
}

double gamma_fn(double x) { return std::tgamma(x); }

double FracParams::p_prime() const {
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

std::string FracParams::describe() const {
  std::string out = alpha > 0.0 ? "alpha=" + short_num(alpha) + ";" : std::string();
  out += "p=" + (std::isinf(p) ? std::string("inf") : short_num(p));
  if (gamma) out += ";gamma=" + short_num(*gamma);
  if (q) out += ";q=" + short_num(*q);
  if (beta) out += ";beta=" + short_num(*beta);
  if (n) out += ";n=" + std::to_string(*n);
  if (interval.t0() != 0.0 || interval.t1() != 1.0)
    out += ";interval=" + short_num(interval.t0()) + ":" + short_num(interval.t1());
  return out;
}

std::shared_ptr<const ProductWeights> product_weights(double alpha, std::size_t n) {
  check_order(alpha);
  return weight_memo().get({std::bit_cast<std::uint64_t>(alpha), n}, [&] {
    auto* w = new ProductWeights{alpha, n, std::vector<double>(n), std::vector<double>(n + 1)};
    for (std::size_t k = 0; k < n; ++k) w->toeplitz[k] = second_difference(alpha + 1.0, k);
    for (std::size_t i = 0; i <= n; ++i) w->boundary[i] = boundary_weight(alpha, i);
    return w;
  });
}

SampledFunction rl_integral(const SampledFunction& f, double alpha, QuadratureScheme scheme) {
  check_order(alpha);
  const std::size_t n = f.intervals();
  const std::size_t d = f.dimension();
  const auto w = product_weights(alpha, n);
  const double scale = std::pow(f.step(), alpha) / gamma_fn(alpha + 2.0);

  std::shared_ptr<const LowerToeplitzFft> fft;
  if (scheme == QuadratureScheme::productTrapezoidFFT) fft = fft_operator(alpha, n);

  std::vector<double> out((n + 1) * d, 0.0);
  std::vector<double> x(n), y(n);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t j = 1; j <= n; ++j) x[j - 1] = f.values()[j * d + c];
    if (fft)
      fft->apply(x, y);
    else
      lower_toeplitz_apply_naive(w->toeplitz, x, y);
    const double f0 = f.values()[c];
    for (std::size_t i = 1; i <= n; ++i) out[i * d + c] = scale * (w->boundary[i] * f0 + y[i - 1]);
  }
  return f.with_values(std::move(out));
}

double rl_integral_power_oracle(double gamma, double alpha, double t) {
  check_order(alpha);
  if (!(gamma > -1.0)) throw InvalidExponent("power oracle needs gamma > -1, got " + short_num(gamma));
  if (t < 0.0) throw InvalidArgument("power oracle needs t >= 0");
  return gamma_fn(gamma + 1.0) / gamma_fn(gamma + alpha + 1.0) * std::pow(t, gamma + alpha);
}

SampledFunction finite_difference(const SampledFunction& g, int times) {
  const std::size_t n = g.intervals();
  const std::size_t d = g.dimension();
  if (n < 2) throw GridTooCoarse("finite differences need at least 2 intervals");
  const double inv2h = 1.0 / (2.0 * g.step());
  std::vector<double> cur(g.values().begin(), g.values().end());
  std::vector<double> next(cur.size());
  for (int rep = 0; rep < times; ++rep) {
    for (std::size_t c = 0; c < d; ++c) {
      auto v = [&](std::size_t i) { return cur[i * d + c]; };
      next[c] = (-3.0 * v(0) + 4.0 * v(1) - v(2)) * inv2h;
      for (std::size_t i = 1; i < n; ++i) next[i * d + c] = (v(i + 1) - v(i - 1)) * inv2h;
      next[n * d + c] = (3.0 * v(n) - 4.0 * v(n - 1) + v(n - 2)) * inv2h;
    }
    std::swap(cur, next);
  }
  return g.with_values(std::move(cur));
}

SampledFunction rl_derivative(const SampledFunction& f, double alpha, QuadratureScheme scheme,
                              OrderConvention convention) {
  const int m = order_ceiling(alpha, convention);
  if (f.intervals() < static_cast<std::size_t>(2 * m + 2))
    throw GridTooCoarse("D^" + short_num(alpha) + " needs n >= " + std::to_string(2 * m + 2) +
                        " intervals, got " + std::to_string(f.intervals()));
  const double inner = static_cast<double>(m) - alpha;
  SampledFunction g = inner > 0.0 ? rl_integral(f, inner, scheme)
                                  : f.with_values({f.values().begin(), f.values().end()});
  return finite_difference(g, m);
}

std::pair<SampledFunction, SampledFunction> semigroup_compose(const SampledFunction& f, double alpha,
                                                              double beta, QuadratureScheme scheme) {
  check_order(alpha);
  check_order(beta);
  auto composed = rl_integral(rl_integral(f, beta, scheme), alpha, scheme);
  auto direct = rl_integral(f, alpha + beta, scheme);
  return {std::move(composed), std::move(direct)};
}

}  // namespace fracbound
