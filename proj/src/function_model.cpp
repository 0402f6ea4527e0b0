#include "fracbound/function_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "fracbound/errors.hpp"
#include "fracbound/format.hpp"

namespace fracbound {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_integer(double x) { return std::isfinite(x) && std::floor(x) == x; }

std::size_t form_dimension(const AnalyticSpec::Form& form) {
  return std::visit(
      overloaded{
          [](const Power& p) { return p.coeff.size(); },
          [](const LogPower& p) { return p.coeff.size(); },
          [](const Polynomial& p) { return p.coeffs.size(); },
          [](const Trig& p) { return p.amplitude.size(); },
          [](const Step& p) { return p.values.empty() ? std::size_t{0} : p.values.front().size(); },
          [](const Constant& p) { return p.value.size(); },
          [](const Sum& p) {
            return p.terms.empty() ? std::size_t{0} : p.terms.front().dimension();
          },
      },
      form);
}

// Limit behaviour of t^beta * log(1/t)^sigma as t -> 0+.
bool log_power_singular_at_zero(const LogPower& p) {
  return p.beta < 0.0 || (p.beta == 0.0 && p.sigma > 0.0);
}

// Integral of s^beta * log(1/s)^sigma over (0, x], 0 < x < 1.
double log_power_head_integral(double beta, double sigma, double x) {
  const double u0 = std::log(1.0 / x);
  if (beta == -1.0) return std::pow(u0, sigma + 1.0) / (-(sigma + 1.0));
  const double a = beta + 1.0;
  // s = exp(-v/a): integral = a^{-sigma-1} * Gamma(sigma+1, a*u0)
  boost::math::quadrature::exp_sinh<double> integrator;
  auto integrand = [sigma](double v) { return std::exp(-v) * std::pow(v, sigma); };
  const double tail = integrator.integrate(integrand, a * u0, std::numeric_limits<double>::infinity(),
                                           1e-14);
  return std::pow(a, -sigma - 1.0) * tail;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw NonIntegrableSpec(what);
}

std::vector<double> zeros(std::size_t d) { return std::vector<double>(d, 0.0); }

}  // namespace

Interval::Interval(double t0, double t1) : t0_(t0), t1_(t1) {
  if (!(t0 < t1) || !std::isfinite(t0) || !std::isfinite(t1))
    throw InvalidInterval("need finite t0 < t1, got [" + short_num(t0) + ", " + short_num(t1) + "]");
}

double VectorNorm::operator()(std::span<const double> v) const {
  if (v.size() == 1) return std::fabs(v[0]);
  double acc = 0.0;
  switch (tag) {
    case NormTag::ell1:
      for (double x : v) acc += std::fabs(x);
      return acc;
    case NormTag::ell2:
      for (double x : v) acc += x * x;
      return std::sqrt(acc);
    case NormTag::ellInf:
      for (double x : v) acc = std::max(acc, std::fabs(x));
      return acc;
  }
  return acc;
}

std::string to_string(NormTag tag) {
  switch (tag) {
    case NormTag::ell1: return "ell1";
    case NormTag::ell2: return "ell2";
    case NormTag::ellInf: return "ellInf";
  }
  return "ell2";
}

NormTag norm_tag_from_string(const std::string& s) {
  if (s == "ell1") return NormTag::ell1;
  if (s == "ell2") return NormTag::ell2;
  if (s == "ellInf") return NormTag::ellInf;
  throw InvalidArgument("unknown vector norm '" + s + "'");
}

// ---------------------------------------------------------------------------
// AnalyticSpec

AnalyticSpec::AnalyticSpec(Form form, Interval interval)
    : form_(std::move(form)), interval_(interval) {}

std::size_t AnalyticSpec::dimension() const { return form_dimension(form_); }

std::string AnalyticSpec::label() const {
  auto with_coeff = [](const std::vector<double>& c, std::string body) {
    if (c.size() == 1 && c[0] == 1.0) return body;
    return short_vec(c) + "*" + body;
  };
  return std::visit(
      overloaded{
          [&](const Power& p) { return with_coeff(p.coeff, "t^" + short_num(p.exponent)); },
          [&](const LogPower& p) {
            return with_coeff(p.coeff, "t^" + short_num(p.beta) + "*log(1/t)^" + short_num(p.sigma));
          },
          [](const Polynomial& p) {
            std::string out = "poly(";
            for (std::size_t c = 0; c < p.coeffs.size(); ++c) {
              if (c) out += ";";
              out += short_vec(p.coeffs[c]);
            }
            return out + ")";
          },
          [](const Trig& p) {
            return short_vec(p.amplitude) + "*sin(" + short_vec(p.frequency) + "*t+" +
                   short_vec(p.phase) + ")";
          },
          [](const Step& p) {
            std::string out = "step(";
            for (std::size_t k = 0; k < p.values.size(); ++k) {
              if (k) out += "|" + short_num(p.breakpoints[k - 1]) + "|";
              out += short_vec(p.values[k]);
            }
            return out + ")";
          },
          [](const Constant& p) { return "const(" + short_vec(p.value) + ")"; },
          [](const Sum& p) {
            std::string out;
            for (std::size_t k = 0; k < p.terms.size(); ++k) {
              if (k) out += "+";
              out += p.terms[k].label();
            }
            return out;
          },
      },
      form_);
}

AnalyticSpec AnalyticSpec::power(double exponent, Interval iv, std::vector<double> coeff) {
  return {Power{exponent, std::move(coeff)}, iv};
}
AnalyticSpec AnalyticSpec::log_power(double beta, double sigma, Interval iv,
                                     std::vector<double> coeff) {
  return {LogPower{beta, sigma, std::move(coeff)}, iv};
}
AnalyticSpec AnalyticSpec::polynomial(std::vector<std::vector<double>> coeffs, Interval iv) {
  return {Polynomial{std::move(coeffs)}, iv};
}
AnalyticSpec AnalyticSpec::trig(std::vector<double> amplitude, std::vector<double> frequency,
                                std::vector<double> phase, Interval iv) {
  return {Trig{std::move(amplitude), std::move(frequency), std::move(phase)}, iv};
}
AnalyticSpec AnalyticSpec::step(std::vector<double> breakpoints,
                                std::vector<std::vector<double>> values, Interval iv) {
  return {Step{std::move(breakpoints), std::move(values)}, iv};
}
AnalyticSpec AnalyticSpec::constant(std::vector<double> value, Interval iv) {
  return {Constant{std::move(value)}, iv};
}
AnalyticSpec AnalyticSpec::sum(std::vector<AnalyticSpec> terms) {
  if (terms.empty()) throw NonIntegrableSpec("sum needs at least one term");
  const Interval iv = terms.front().interval();
  return {Sum{std::move(terms)}, iv};
}

// ---------------------------------------------------------------------------
// Validation and metadata

void validate(const AnalyticSpec& spec) {
  const Interval& iv = spec.interval();
  const std::size_t d = spec.dimension();
  require(d >= 1, "spec has no components");
  std::visit(
      overloaded{
          [&](const Power& p) {
            require(std::isfinite(p.exponent), "power exponent must be finite");
            if (!is_integer(p.exponent))
              require(iv.t0() >= 0.0, "non-integer power needs t0 >= 0");
            if (iv.t0() == 0.0)
              require(p.exponent > -1.0, "power t^" + short_num(p.exponent) +
                                             " is not integrable at t0 = 0");
            if (p.exponent < 0.0 && iv.t0() < 0.0)
              require(iv.t1() < 0.0, "negative power has a pole inside the interval");
          },
          [&](const LogPower& p) {
            require(iv.t0() == 0.0, "log-power needs t0 = 0");
            require(iv.t1() <= 1.0, "log-power needs t1 <= 1");
            if (p.sigma < 0.0) require(iv.t1() < 1.0, "log-power with sigma < 0 needs t1 < 1");
            require(p.beta >= -1.0, "log-power needs beta >= -1");
            if (p.beta == -1.0)
              require(p.sigma < -1.0, "t^-1 log(1/t)^sigma is integrable only for sigma < -1");
          },
          [&](const Polynomial& p) {
            for (const auto& c : p.coeffs) require(!c.empty(), "empty polynomial component");
          },
          [&](const Trig& p) {
            require(p.frequency.size() == d && p.phase.size() == d,
                    "trig amplitude/frequency/phase sizes differ");
          },
          [&](const Step& p) {
            require(p.values.size() == p.breakpoints.size() + 1,
                    "step needs one more plateau than breakpoints");
            for (const auto& v : p.values) require(v.size() == d, "step plateaus differ in size");
            for (std::size_t k = 0; k < p.breakpoints.size(); ++k) {
              require(p.breakpoints[k] > iv.t0() && p.breakpoints[k] < iv.t1(),
                      "step breakpoint outside (t0, t1)");
              if (k) require(p.breakpoints[k] > p.breakpoints[k - 1], "breakpoints not increasing");
            }
          },
          [&](const Constant&) {},
          [&](const Sum& p) {
            for (const auto& term : p.terms) {
              require(term.interval() == iv, "sum terms live on different intervals");
              require(term.dimension() == d, "sum terms differ in dimension");
              validate(term);
            }
          },
      },
      spec.form());
}

bool singular_at_start(const AnalyticSpec& spec) {
  const double t0 = spec.interval().t0();
  return std::visit(overloaded{
                        [&](const Power& p) { return t0 == 0.0 && p.exponent < 0.0; },
                        [&](const LogPower& p) { return log_power_singular_at_zero(p); },
                        [](const Sum& p) {
                          return std::any_of(p.terms.begin(), p.terms.end(),
                                             [](const auto& t) { return singular_at_start(t); });
                        },
                        [](const auto&) { return false; },
                    },
                    spec.form());
}

bool in_lp(const AnalyticSpec& spec, double p) {
  if (std::isinf(p)) return !singular_at_start(spec);
  const double t0 = spec.interval().t0();
  return std::visit(overloaded{
                        [&](const Power& f) { return t0 > 0.0 || f.exponent >= 0.0 || f.exponent * p > -1.0; },
                        [&](const LogPower& f) {
                          if (f.beta * p > -1.0) return true;
                          return f.beta * p == -1.0 && f.sigma * p < -1.0;
                        },
                        [&](const Sum& f) {
                          return std::all_of(f.terms.begin(), f.terms.end(),
                                             [&](const auto& t) { return in_lp(t, p); });
                        },
                        [](const auto&) { return true; },
                    },
                    spec.form());
}

bool in_weak_lp(const AnalyticSpec& spec, double p) {
  const double t0 = spec.interval().t0();
  return std::visit(overloaded{
                        [&](const Power& f) { return t0 > 0.0 || f.exponent >= -1.0 / p; },
                        [&](const LogPower& f) {
                          if (f.beta > -1.0 / p) return true;
                          return f.beta == -1.0 / p && f.sigma <= 0.0;
                        },
                        [&](const Sum& f) {
                          return std::all_of(f.terms.begin(), f.terms.end(),
                                             [&](const auto& t) { return in_weak_lp(t, p); });
                        },
                        [](const auto&) { return true; },
                    },
                    spec.form());
}

bool is_continuous(const AnalyticSpec& spec) {
  if (singular_at_start(spec)) return false;
  return std::visit(overloaded{
                        [](const Step& f) { return f.breakpoints.empty(); },
                        [](const Sum& f) {
                          return std::all_of(f.terms.begin(), f.terms.end(),
                                             [](const auto& t) { return is_continuous(t); });
                        },
                        [](const auto&) { return true; },
                    },
                    spec.form());
}

bool is_smooth(const AnalyticSpec& spec) {
  const double t0 = spec.interval().t0();
  return std::visit(overloaded{
                        [&](const Power& f) {
                          return t0 > 0.0 || (is_integer(f.exponent) && f.exponent >= 0.0);
                        },
                        [](const LogPower&) { return false; },
                        [](const Step& f) { return f.breakpoints.empty(); },
                        [](const Sum& f) {
                          return std::all_of(f.terms.begin(), f.terms.end(),
                                             [](const auto& t) { return is_smooth(t); });
                        },
                        [](const auto&) { return true; },
                    },
                    spec.form());
}

bool vanishes_at_start(const AnalyticSpec& spec) {
  if (singular_at_start(spec)) return false;
  const auto v = evaluate(spec, spec.interval().t0());
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

// ---------------------------------------------------------------------------
// Evaluation and differentiation

std::vector<double> evaluate(const AnalyticSpec& spec, double t) {
  const Interval& iv = spec.interval();
  if (!iv.contains(t))
    throw InvalidArgument("t = " + short_num(t) + " outside [" + short_num(iv.t0()) + ", " +
                          short_num(iv.t1()) + "]");
  const std::size_t d = spec.dimension();
  return std::visit(
      overloaded{
          [&](const Power& p) {
            if (t == 0.0 && p.exponent < 0.0)
              throw EvalAtSingularity("t^" + short_num(p.exponent) + " at t = 0");
            const double base = std::pow(t, p.exponent);
            std::vector<double> out(d);
            for (std::size_t c = 0; c < d; ++c) out[c] = p.coeff[c] * base;
            return out;
          },
          [&](const LogPower& p) {
            double base = 0.0;
            if (t == 0.0) {
              if (log_power_singular_at_zero(p))
                throw EvalAtSingularity(spec.label() + " at t = 0");
              base = (p.beta == 0.0 && p.sigma == 0.0) ? 1.0 : 0.0;
            } else {
              const double lg = std::log(1.0 / t);
              if (lg == 0.0 && p.sigma < 0.0) throw EvalAtSingularity(spec.label() + " at t = 1");
              base = std::pow(t, p.beta) * std::pow(lg, p.sigma);
            }
            std::vector<double> out(d);
            for (std::size_t c = 0; c < d; ++c) out[c] = p.coeff[c] * base;
            return out;
          },
          [&](const Polynomial& p) {
            std::vector<double> out(d, 0.0);
            for (std::size_t c = 0; c < d; ++c) {
              double acc = 0.0;
              for (auto it = p.coeffs[c].rbegin(); it != p.coeffs[c].rend(); ++it) acc = acc * t + *it;
              out[c] = acc;
            }
            return out;
          },
          [&](const Trig& p) {
            std::vector<double> out(d);
            for (std::size_t c = 0; c < d; ++c)
              out[c] = p.amplitude[c] * std::sin(p.frequency[c] * t + p.phase[c]);
            return out;
          },
          [&](const Step& p) {
            const auto k = static_cast<std::size_t>(
                std::upper_bound(p.breakpoints.begin(), p.breakpoints.end(), t) -
                p.breakpoints.begin());
            return p.values[k];
          },
          [&](const Constant& p) { return p.value; },
          [&](const Sum& p) {
            std::vector<double> out(d, 0.0);
            for (const auto& term : p.terms) {
              const auto v = evaluate(term, t);
              for (std::size_t c = 0; c < d; ++c) out[c] += v[c];
            }
            return out;
          },
      },
      spec.form());
}

namespace {

AnalyticSpec derivative_once(const AnalyticSpec& spec) {
  const Interval iv = spec.interval();
  const std::size_t d = spec.dimension();
  return std::visit(
      overloaded{
          [&](const Power& p) -> AnalyticSpec {
            if (p.exponent == 0.0) return AnalyticSpec::constant(zeros(d), iv);
            std::vector<double> c(d);
            for (std::size_t k = 0; k < d; ++k) c[k] = p.exponent * p.coeff[k];
            return AnalyticSpec::power(p.exponent - 1.0, iv, std::move(c));
          },
          [&](const LogPower& p) -> AnalyticSpec {
            // t^{b-1} [ b L^s - s L^{s-1} ],  L = log(1/t)
            std::vector<AnalyticSpec> terms;
            if (p.beta != 0.0) {
              std::vector<double> c(d);
              for (std::size_t k = 0; k < d; ++k) c[k] = p.beta * p.coeff[k];
              terms.push_back(AnalyticSpec::log_power(p.beta - 1.0, p.sigma, iv, std::move(c)));
            }
            if (p.sigma != 0.0) {
              std::vector<double> c(d);
              for (std::size_t k = 0; k < d; ++k) c[k] = -p.sigma * p.coeff[k];
              terms.push_back(AnalyticSpec::log_power(p.beta - 1.0, p.sigma - 1.0, iv, std::move(c)));
            }
            if (terms.empty()) return AnalyticSpec::constant(zeros(d), iv);
            if (terms.size() == 1) return terms.front();
            return AnalyticSpec::sum(std::move(terms));
          },
          [&](const Polynomial& p) -> AnalyticSpec {
            std::vector<std::vector<double>> out(d);
            for (std::size_t c = 0; c < d; ++c) {
              for (std::size_t k = 1; k < p.coeffs[c].size(); ++k)
                out[c].push_back(static_cast<double>(k) * p.coeffs[c][k]);
              if (out[c].empty()) out[c].push_back(0.0);
            }
            return AnalyticSpec::polynomial(std::move(out), iv);
          },
          [&](const Trig& p) -> AnalyticSpec {
            Trig out = p;
            for (std::size_t c = 0; c < d; ++c) {
              out.amplitude[c] = p.amplitude[c] * p.frequency[c];
              out.phase[c] = p.phase[c] + std::numbers::pi / 2.0;
            }
            return {out, iv};
          },
          [&](const Step&) -> AnalyticSpec {
            throw NotDifferentiable("step functions have no classical derivative");
          },
          [&](const Constant&) -> AnalyticSpec { return AnalyticSpec::constant(zeros(d), iv); },
          [&](const Sum& p) -> AnalyticSpec {
            std::vector<AnalyticSpec> terms;
            for (const auto& term : p.terms) terms.push_back(derivative_once(term));
            return AnalyticSpec::sum(std::move(terms));
          },
      },
      spec.form());
}

// Value of a single singular term at node 0: (1/h) * integral over [t0, t0 + h/2].
double head_surrogate_scale(const AnalyticSpec::Form& form, double h) {
  if (const auto* p = std::get_if<Power>(&form)) {
    const double a = p->exponent + 1.0;
    return std::pow(0.5 * h, a) / (a * h);
  }
  const auto& lp = std::get<LogPower>(form);
  return log_power_head_integral(lp.beta, lp.sigma, 0.5 * h) / h;
}

std::vector<double> form_coeff(const AnalyticSpec::Form& form) {
  if (const auto* p = std::get_if<Power>(&form)) return p->coeff;
  return std::get<LogPower>(form).coeff;
}

void sample_into(const AnalyticSpec& spec, std::size_t n, std::vector<double>& out) {
  const std::size_t d = spec.dimension();
  const Interval& iv = spec.interval();
  const double h = iv.length() / static_cast<double>(n);
  if (const auto* s = std::get_if<Sum>(&spec.form())) {
    // Term by term, so every singular term carries its own surrogate.
    std::vector<double> part(out.size());
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& term : s->terms) {
      sample_into(term, n, part);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += part[k];
    }
    return;
  }
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = (i == n) ? iv.t1() : iv.t0() + static_cast<double>(i) * h;
    std::vector<double> v;
    if (i == 0 && singular_at_start(spec)) {
      const double scale = head_surrogate_scale(spec.form(), h);
      v = form_coeff(spec.form());
      for (double& x : v) x *= scale;
    } else {
      v = evaluate(spec, t);
    }
    std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
}

}  // namespace

AnalyticSpec analytic_derivative(const AnalyticSpec& spec, int k) {
  if (k < 0) throw InvalidArgument("derivative order must be nonnegative");
  AnalyticSpec out = spec;
  for (int j = 0; j < k; ++j) out = derivative_once(out);
  return out;
}

// ---------------------------------------------------------------------------
// SampledFunction

SampledFunction::SampledFunction(Interval interval, std::size_t intervals,
                                 std::vector<double> values, VectorNorm vnorm,
                                 std::optional<AnalyticSpec> source, bool singular_start)
    : interval_(interval),
      intervals_(intervals),
      values_(std::move(values)),
      vnorm_(vnorm),
      source_(std::move(source)),
      singular_start_(singular_start) {
  if (intervals_ < 1) throw InvalidArgument("a grid needs at least one interval");
  if (vnorm_.dim < 1) throw InvalidArgument("value dimension must be >= 1");
  if (values_.size() != (intervals_ + 1) * vnorm_.dim)
    throw InvalidArgument("expected " + std::to_string((intervals_ + 1) * vnorm_.dim) +
                          " values, got " + std::to_string(values_.size()));
}

double SampledFunction::node(std::size_t i) const {
  if (i == intervals_) return interval_.t1();
  return interval_.t0() + static_cast<double>(i) * step();
}

std::span<const double> SampledFunction::at(std::size_t i) const {
  return std::span<const double>(values_).subspan(i * vnorm_.dim, vnorm_.dim);
}

std::vector<double> SampledFunction::component(std::size_t c) const {
  std::vector<double> out(nodes());
  for (std::size_t i = 0; i < nodes(); ++i) out[i] = values_[i * vnorm_.dim + c];
  return out;
}

SampledFunction SampledFunction::with_values(std::vector<double> values) const {
  return SampledFunction(interval_, intervals_, std::move(values), vnorm_);
}

SampledFunction SampledFunction::scaled(double c) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= c;
  return with_values(std::move(v));
}

SampledFunction combine(double a, const SampledFunction& f, double b, const SampledFunction& g) {
  if (f.interval() != g.interval() || f.intervals() != g.intervals() ||
      f.dimension() != g.dimension())
    throw InvalidArgument("combine needs identical grids");
  std::vector<double> v(f.values().size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = a * f.values()[k] + b * g.values()[k];
  return f.with_values(std::move(v));
}

SampledFunction sample(const AnalyticSpec& spec, std::size_t n, NormTag tag) {
  validate(spec);
  if (n < 2) throw InvalidArgument("sampling needs n >= 2 intervals");
  const std::size_t d = spec.dimension();
  std::vector<double> values((n + 1) * d);
  sample_into(spec, n, values);
  return SampledFunction(spec.interval(), n, std::move(values), VectorNorm{tag, d}, spec,
                         singular_at_start(spec));
}

std::vector<double> pointwise_norm(const SampledFunction& f) {
  std::vector<double> out(f.nodes());
  for (std::size_t i = 0; i < f.nodes(); ++i) out[i] = f.vnorm()(f.at(i));
  return out;
}

}  // namespace fracbound
