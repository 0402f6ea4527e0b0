#include "fracbound/space_norms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "fracbound/errors.hpp"
#include "fracbound/format.hpp"

namespace fracbound {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string p_text(double p) { return std::isinf(p) ? std::string("inf") : short_num(p); }

void check_p(double p) {
  if (!(p >= 1.0)) throw InvalidArgument("Lebesgue exponent must be in [1, inf], got " + short_num(p));
}

void check_holder_exponent(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw InvalidArgument("Hoelder exponent must lie in (0, 1), got " + short_num(gamma));
}

// Trapezoid-weighted power mean, scaled by the maximum to stay finite for large p.
double lp_value(std::span<const double> norms, double h, double p) {
  const double m = *std::max_element(norms.begin(), norms.end());
  if (m == 0.0) return 0.0;
  if (std::isinf(p)) return m;
  double acc = 0.0;
  const std::size_t last = norms.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    const double w = (i == 0 || i == last) ? 0.5 : 1.0;
    acc += w * std::pow(norms[i] / m, p);
  }
  return m * std::pow(h * acc, 1.0 / p);
}

std::vector<double> midpoint_norms(const SampledFunction& f) {
  const std::size_t d = f.dimension();
  std::vector<double> mid(f.intervals());
  std::vector<double> tmp(d);
  for (std::size_t k = 0; k < f.intervals(); ++k) {
    auto a = f.at(k);
    auto b = f.at(k + 1);
    for (std::size_t c = 0; c < d; ++c) tmp[c] = 0.5 * (a[c] + b[c]);
    mid[k] = f.vnorm()(tmp);
  }
  return mid;
}

// Fenwick tree over value ranks holding counts and sums.
class RankTree {
 public:
  explicit RankTree(std::size_t n) : count_(n + 1), sum_(n + 1) {}

  void clear() {
    std::fill(count_.begin(), count_.end(), 0);
    std::fill(sum_.begin(), sum_.end(), 0.0);
  }
  void add(std::size_t rank, double value) {
    for (std::size_t i = rank + 1; i < count_.size(); i += i & (~i + 1)) {
      count_[i] += 1;
      sum_[i] += value;
    }
  }
  // Totals over ranks [0, end).
  std::pair<long, double> prefix(std::size_t end) const {
    long c = 0;
    double s = 0.0;
    for (std::size_t i = end; i > 0; i -= i & (~i + 1)) {
      c += count_[i];
      s += sum_[i];
    }
    return {c, s};
  }

 private:
  std::vector<long> count_;
  std::vector<double> sum_;
};

// Scalar BMO with order statistics: O(n^2 log n).
double bmo_scalar_fast(std::span<const double> v) {
  const std::size_t n = v.size() - 1;
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<std::size_t> rank(v.size());
  std::vector<double> sorted(v.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    rank[order[r]] = r;
    sorted[r] = v[order[r]];
  }
  std::vector<double> prefix(v.size() + 1, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) prefix[i + 1] = prefix[i] + v[i];

  RankTree tree(v.size());
  double best = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    tree.clear();
    tree.add(rank[a], v[a]);
    for (std::size_t b = a + 1; b <= n; ++b) {
      tree.add(rank[b], v[b]);
      const double len = static_cast<double>(b - a);
      const double total = prefix[b + 1] - prefix[a];
      const double avg = (total - 0.5 * (v[a] + v[b])) / len;
      const auto le_end = static_cast<std::size_t>(
          std::upper_bound(sorted.begin(), sorted.end(), avg) - sorted.begin());
      const auto [cnt_le, sum_le] = tree.prefix(le_end);
      const double cnt_all = static_cast<double>(b - a + 1);
      const double abs_sum = total - 2.0 * sum_le + avg * (2.0 * static_cast<double>(cnt_le) - cnt_all);
      const double osc = (abs_sum - 0.5 * (std::fabs(v[a] - avg) + std::fabs(v[b] - avg))) / len;
      best = std::max(best, osc);
    }
  }
  return best;
}

double bmo_naive(const SampledFunction& f, std::size_t stride) {
  const std::size_t d = f.dimension();
  const std::size_t m = f.intervals() / stride;
  std::vector<double> prefix((m + 2) * d, 0.0);
  for (std::size_t i = 0; i <= m; ++i)
    for (std::size_t c = 0; c < d; ++c)
      prefix[(i + 1) * d + c] = prefix[i * d + c] + f.at(i * stride)[c];
  std::vector<double> avg(d), diff(d);
  double best = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b <= m; ++b) {
      const double len = static_cast<double>(b - a);
      const auto fa = f.at(a * stride);
      const auto fb = f.at(b * stride);
      for (std::size_t c = 0; c < d; ++c)
        avg[c] = (prefix[(b + 1) * d + c] - prefix[a * d + c] - 0.5 * (fa[c] + fb[c])) / len;
      double acc = 0.0;
      for (std::size_t i = a; i <= b; ++i) {
        const auto fi = f.at(i * stride);
        for (std::size_t c = 0; c < d; ++c) diff[c] = fi[c] - avg[c];
        const double w = (i == a || i == b) ? 0.5 : 1.0;
        acc += w * f.vnorm()(diff);
      }
      best = std::max(best, acc / len);
    }
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------

SpaceDescriptor SpaceDescriptor::lp(double p) {
  check_p(p);
  return {Kind::Lp, p};
}
SpaceDescriptor SpaceDescriptor::lp_weak(double p) {
  check_p(p);
  if (std::isinf(p)) throw InvalidArgument("weak L^p needs p < inf");
  return {Kind::LpWeak, p};
}
SpaceDescriptor SpaceDescriptor::holder(int n, double gamma) {
  check_holder_exponent(gamma);
  if (n < 0) throw InvalidArgument("Hoelder order must be >= 0");
  return {Kind::Holder, 0.0, n, gamma};
}
SpaceDescriptor SpaceDescriptor::sobolev(int n, double p) {
  check_p(p);
  if (n < 0) throw InvalidArgument("Sobolev order must be >= 0");
  return {Kind::Sobolev, p, n};
}
SpaceDescriptor SpaceDescriptor::bmo() { return {Kind::BMO}; }
SpaceDescriptor SpaceDescriptor::kr(double gamma) {
  if (!(gamma > 0.0)) throw InvalidArgument("KR index must be > 0");
  return {Kind::KR, 0.0, 0, gamma};
}
SpaceDescriptor SpaceDescriptor::wrl(double alpha) {
  if (!(alpha > 0.0)) throw InvalidOrder("W_RL order must be > 0");
  return {Kind::WRL, 1.0, 0, 0.0, alpha};
}
SpaceDescriptor SpaceDescriptor::bk(int n, double p, double gamma) {
  check_p(p);
  if (n < 1) throw InvalidArgument("BK order must be >= 1");
  if (!(gamma > 0.0)) throw InvalidArgument("BK index must be > 0");
  return {Kind::BK, p, n, gamma};
}
SpaceDescriptor SpaceDescriptor::continuous() { return {Kind::Continuous}; }

std::string SpaceDescriptor::name() const {
  switch (kind) {
    case Kind::Lp: return "Lp";
    case Kind::LpWeak: return "LpWeak";
    case Kind::Holder: return "Holder";
    case Kind::Sobolev: return "Sobolev";
    case Kind::BMO: return "BMO";
    case Kind::KR: return "KR";
    case Kind::WRL: return "WRL";
    case Kind::BK: return "BK";
    case Kind::Continuous: return "Continuous";
  }
  return "?";
}

std::string SpaceDescriptor::params() const {
  switch (kind) {
    case Kind::Lp:
    case Kind::LpWeak: return "p=" + p_text(p);
    case Kind::Holder: return "n=" + std::to_string(n) + ";gamma=" + short_num(gamma);
    case Kind::Sobolev: return "n=" + std::to_string(n) + ";p=" + p_text(p);
    case Kind::KR: return "gamma=" + short_num(gamma);
    case Kind::WRL: return "alpha=" + short_num(alpha);
    case Kind::BK: return "n=" + std::to_string(n) + ";p=" + p_text(p) + ";gamma=" + short_num(gamma);
    case Kind::BMO:
    case Kind::Continuous: return "";
  }
  return "";
}

std::string NormReport::csv_header() { return "space,params,n,value,candidates,seconds"; }

std::string NormReport::csv_row() const {
  return space.name() + "," + space.params() + "," + std::to_string(n) + "," +
         (infinite ? std::string("inf") : exact_num(value)) + "," + std::to_string(candidates) + "," +
         short_num(seconds);
}

// ---------------------------------------------------------------------------

std::vector<SampledFunction> derivative_samples(const SampledFunction& f, int order) {
  if (order < 0) throw InvalidArgument("derivative order must be >= 0");
  std::vector<SampledFunction> out{f};
  if (order == 0) return out;
  if (const auto& src = f.source()) {
    for (int j = 1; j <= order; ++j)
      out.push_back(sample(analytic_derivative(*src, j), f.intervals(), f.vnorm().tag));
    return out;
  }
  if (f.intervals() < 16)
    throw GridTooCoarse("finite-difference derivatives need at least 16 intervals");
  for (int j = 1; j <= order; ++j) out.push_back(finite_difference(out.back(), 1));
  return out;
}

NormReport lp_norm(const SampledFunction& f, double p) {
  const auto start = Clock::now();
  NormReport r;
  r.space = SpaceDescriptor::lp(p);
  const auto norms = pointwise_norm(f);
  r.value = lp_value(norms, f.step(), p);
  r.n = f.intervals();
  r.candidates = std::isinf(p) ? f.nodes() : 0;
  r.method = std::isinf(p) ? "node maximum" : "composite trapezoid";
  r.seconds = since(start);
  return r;
}

double distribution_function(const SampledFunction& f, double r) {
  if (!(r > 0.0)) throw InvalidArgument("distribution function needs r > 0");
  const auto mid = midpoint_norms(f);
  const auto count = std::count_if(mid.begin(), mid.end(), [r](double m) { return m > r; });
  return f.step() * static_cast<double>(count);
}

NormReport weak_lp_seminorm(const SampledFunction& f, double p) {
  const auto start = Clock::now();
  NormReport r;
  r.space = SpaceDescriptor::lp_weak(p);
  auto mid = midpoint_norms(f);
  std::sort(mid.begin(), mid.end(), std::greater<>());
  // For r just below a distinct value v, lambda(r) = h * #{cells with midpoint >= v}.
  double best = 0.0;
  std::size_t candidates = 0;
  const double h = f.step();
  for (std::size_t k = 0; k < mid.size(); ++k) {
    if (mid[k] <= 0.0) break;
    if (k + 1 < mid.size() && mid[k + 1] == mid[k]) continue;
    ++candidates;
    best = std::max(best, mid[k] * std::pow(h * static_cast<double>(k + 1), 1.0 / p));
  }
  r.value = best;
  r.n = f.intervals();
  r.candidates = candidates;
  r.method = "left limits at distinct midpoint values";
  r.seconds = since(start);
  return r;
}

NormReport holder_seminorm_of(const SampledFunction& g, double gamma) {
  check_holder_exponent(gamma);
  const auto start = Clock::now();
  const std::size_t n = g.intervals();
  const std::size_t d = g.dimension();
  std::vector<double> inv(n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k) inv[k] = std::pow(static_cast<double>(k) * g.step(), -gamma);
  double best = 0.0;
  if (d == 1) {
    const auto v = g.values();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j <= n; ++j) best = std::max(best, std::fabs(v[j] - v[i]) * inv[j - i]);
  } else {
    std::vector<double> diff(d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j <= n; ++j) {
        for (std::size_t c = 0; c < d; ++c) diff[c] = g.at(j)[c] - g.at(i)[c];
        best = std::max(best, g.vnorm()(diff) * inv[j - i]);
      }
  }
  NormReport r;
  r.space = SpaceDescriptor::holder(0, gamma);
  r.value = best;
  r.n = n;
  r.candidates = n * (n + 1) / 2;
  r.method = "all node pairs";
  r.seconds = since(start);
  return r;
}

NormReport holder_seminorm(const SampledFunction& f, int n, double gamma) {
  const auto start = Clock::now();
  const auto derivs = derivative_samples(f, n);
  NormReport r = holder_seminorm_of(derivs.back(), gamma);
  r.space = SpaceDescriptor::holder(n, gamma);
  if (n > 0) r.method += f.source() ? ", analytic derivative" : ", finite-difference derivative";
  r.seconds = since(start);
  return r;
}

NormReport sobolev_norm_of(std::span<const SampledFunction> derivatives, double p) {
  if (derivatives.empty()) throw InvalidArgument("empty derivative list");
  const auto start = Clock::now();
  NormReport r;
  r.space = SpaceDescriptor::sobolev(static_cast<int>(derivatives.size()) - 1, p);
  for (const auto& g : derivatives) r.value += lp_norm(g, p).value;
  r.n = derivatives.front().intervals();
  r.method = "sum of L^p norms of derivatives";
  r.seconds = since(start);
  return r;
}

NormReport sobolev_norm(const SampledFunction& f, int n, double p) {
  const auto start = Clock::now();
  const auto derivs = derivative_samples(f, n);
  NormReport r = sobolev_norm_of(derivs, p);
  if (n > 0) r.method += f.source() ? " (analytic)" : " (finite differences)";
  r.seconds = since(start);
  return r;
}

NormReport bmo_seminorm(const SampledFunction& f, const BmoOptions& options) {
  const auto start = Clock::now();
  NormReport r;
  r.space = SpaceDescriptor::bmo();
  const std::size_t n = f.intervals();
  r.n = n;
  if (f.dimension() == 1 && !options.force_naive) {
    r.value = bmo_scalar_fast(f.values());
    r.candidates = n * (n + 1) / 2;
    r.method = "grid-aligned subintervals, rank tree";
  } else {
    std::size_t stride = 1;
    while (n / stride > options.naive_max_intervals || n % stride != 0) {
      ++stride;
      if (stride > n) throw InvalidArgument("cannot coarsen grid for naive BMO");
    }
    const std::size_t m = n / stride;
    r.value = bmo_naive(f, stride);
    r.candidates = m * (m + 1) / 2;
    r.method = "grid-aligned subintervals, direct";
    if (stride > 1) r.method += ", coarsened stride " + std::to_string(stride);
  }
  r.seconds = since(start);
  return r;
}

NormReport kr_norm(const SampledFunction& f, double gamma) {
  const auto start = Clock::now();
  NormReport r;
  r.space = SpaceDescriptor::kr(gamma);
  r.n = f.intervals();
  r.method = "64 log-spaced r per decade, early exit";
  const auto norms = pointwise_norm(f);
  const double m = *std::max_element(norms.begin(), norms.end());
  if (m == 0.0) {
    r.seconds = since(start);
    return r;
  }
  // For r' >= r: r'^-gamma ||f||_r' <= r^-gamma * max|f| * max(1, T)^(1/r).
  const double tail_base = std::max(1.0, f.interval().length());
  constexpr int kPerDecade = 64;
  constexpr int kMaxSteps = 12 * kPerDecade;
  double best = 0.0;
  int k = 0;
  for (; k <= kMaxSteps; ++k) {
    const double rr = std::pow(10.0, static_cast<double>(k) / kPerDecade);
    best = std::max(best, std::pow(rr, -gamma) * lp_value(norms, f.step(), rr));
    if (std::pow(rr, -gamma) * m * std::pow(tail_base, 1.0 / rr) <= best) break;
  }
  r.value = best;
  r.candidates = static_cast<std::size_t>(std::min(k, kMaxSteps) + 1);
  r.seconds = since(start);
  return r;
}

NormReport wrl_norm(const SampledFunction& f, double alpha, OrderConvention convention,
                    QuadratureScheme scheme) {
  const auto start = Clock::now();
  const int m = order_ceiling(alpha, convention);
  const auto derivs = derivative_samples(f, m);
  std::span<const SampledFunction> lower(derivs.data(), static_cast<std::size_t>(m));
  NormReport r;
  r.space = SpaceDescriptor::wrl(alpha);
  r.value = sobolev_norm_of(lower, 1.0).value;
  const bool integer_order = static_cast<double>(m) == alpha;
  // D^alpha is the plain m-th derivative when no fractional integral is involved.
  const SampledFunction frac = integer_order ? derivs.back() : rl_derivative(f, alpha, scheme, convention);
  r.value += lp_norm(frac, 1.0).value;
  r.n = f.intervals();
  r.method = std::string(convention == OrderConvention::strictCeil ? "strict" : "ceil") +
             " order convention, [alpha]=" + std::to_string(m);
  r.seconds = since(start);
  return r;
}

NormReport bk_norm_of(std::span<const SampledFunction> derivatives, double p, double gamma) {
  const auto start = Clock::now();
  if (derivatives.size() < 2) throw InvalidArgument("BK norm needs derivatives up to order >= 1");
  const int n = static_cast<int>(derivatives.size()) - 1;
  NormReport r;
  r.space = SpaceDescriptor::bk(n, p, gamma);
  const auto sob = sobolev_norm_of(derivatives, p);
  const auto bmo = bmo_seminorm(derivatives.back());
  const auto kr = kr_norm(derivatives.back(), gamma);
  r.value = sob.value + bmo.value + kr.value;
  r.n = derivatives.front().intervals();
  r.candidates = bmo.candidates + kr.candidates;
  r.method = "W^{n,p} + BMO + KR of f^(n)";
  r.seconds = since(start);
  return r;
}

NormReport bk_norm(const SampledFunction& f, int n, double p, double gamma) {
  if (n < 1) throw InvalidArgument("BK order must be >= 1");
  const auto derivs = derivative_samples(f, n);
  return bk_norm_of(derivs, p, gamma);
}

}  // namespace fracbound
