#pragma once

// Analytic test functions f: [t0,t1] -> R^d and their uniform-grid samplings.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fracbound {

/// Closed interval [t0, t1] with t0 < t1.
class Interval {
 public:
  Interval(double t0, double t1);

  double t0() const { return t0_; }
  double t1() const { return t1_; }
  double length() const { return t1_ - t0_; }
  bool contains(double t) const { return t >= t0_ && t <= t1_; }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double t0_;
  double t1_;
};

enum class NormTag { ell1, ell2, ellInf };

/// Norm on the value space X = R^d.
struct VectorNorm {
  NormTag tag = NormTag::ell2;
  std::size_t dim = 1;

  double operator()(std::span<const double> v) const;
  friend bool operator==(const VectorNorm&, const VectorNorm&) = default;
};

std::string to_string(NormTag tag);
NormTag norm_tag_from_string(const std::string& s);

class AnalyticSpec;

/// coeff * t^exponent, one coefficient per component.
struct Power {
  double exponent = 0.0;
  std::vector<double> coeff{1.0};
};

/// coeff * t^beta * (log(1/t))^sigma on an interval inside [0, 1].
struct LogPower {
  double beta = 0.0;
  double sigma = 0.0;
  std::vector<double> coeff{1.0};
};

/// coeffs[c][k] is the t^k coefficient of component c.
struct Polynomial {
  std::vector<std::vector<double>> coeffs;
};

/// amplitude * sin(frequency * t + phase), per component.
struct Trig {
  std::vector<double> amplitude;
  std::vector<double> frequency;
  std::vector<double> phase;
};

/// Right-continuous piecewise constant: values[k] on [breakpoints[k-1], breakpoints[k]).
struct Step {
  std::vector<double> breakpoints;
  std::vector<std::vector<double>> values;
};

struct Constant {
  std::vector<double> value{1.0};
};

struct Sum {
  std::vector<AnalyticSpec> terms;
};

/// Symbolic description of a test function together with its interval.
class AnalyticSpec {
 public:
  using Form = std::variant<Power, LogPower, Polynomial, Trig, Step, Constant, Sum>;

  AnalyticSpec(Form form, Interval interval);

  const Form& form() const { return form_; }
  const Interval& interval() const { return interval_; }
  std::size_t dimension() const;

  /// Short human-readable label, e.g. "t^0.5" or "const(1)".
  std::string label() const;

  static AnalyticSpec power(double exponent, Interval iv = {0.0, 1.0},
                            std::vector<double> coeff = {1.0});
  static AnalyticSpec log_power(double beta, double sigma, Interval iv,
                                std::vector<double> coeff = {1.0});
  static AnalyticSpec polynomial(std::vector<std::vector<double>> coeffs,
                                 Interval iv = {0.0, 1.0});
  static AnalyticSpec trig(std::vector<double> amplitude, std::vector<double> frequency,
                           std::vector<double> phase, Interval iv = {0.0, 1.0});
  static AnalyticSpec step(std::vector<double> breakpoints,
                           std::vector<std::vector<double>> values,
                           Interval iv = {0.0, 1.0});
  static AnalyticSpec constant(std::vector<double> value, Interval iv = {0.0, 1.0});
  static AnalyticSpec sum(std::vector<AnalyticSpec> terms);

 private:
  Form form_;
  Interval interval_;
};

/// Throws NonIntegrableSpec when the spec is malformed or not locally integrable.
void validate(const AnalyticSpec& spec);

/// True when the spec diverges at t0 (negative power or log blow-up at the origin).
bool singular_at_start(const AnalyticSpec& spec);

// Closed-form membership metadata used to decide theorem hypotheses.
bool in_lp(const AnalyticSpec& spec, double p);       // p may be +inf
bool in_weak_lp(const AnalyticSpec& spec, double p);  // p < inf
bool is_continuous(const AnalyticSpec& spec);         // continuous on the closed interval
bool is_smooth(const AnalyticSpec& spec);             // C^infinity on the closed interval
bool vanishes_at_start(const AnalyticSpec& spec);     // f(t0) = 0 (and finite)

std::vector<double> evaluate(const AnalyticSpec& spec, double t);
AnalyticSpec analytic_derivative(const AnalyticSpec& spec, int k);

/// Values of f on the uniform grid t_i = t0 + i h, i = 0..n, stored node-major.
class SampledFunction {
 public:
  SampledFunction(Interval interval, std::size_t intervals, std::vector<double> values,
                  VectorNorm vnorm = {}, std::optional<AnalyticSpec> source = std::nullopt,
                  bool singular_start = false);

  const Interval& interval() const { return interval_; }
  std::size_t intervals() const { return intervals_; }
  std::size_t nodes() const { return intervals_ + 1; }
  std::size_t dimension() const { return vnorm_.dim; }
  double step() const { return interval_.length() / static_cast<double>(intervals_); }
  double node(std::size_t i) const;

  std::span<const double> at(std::size_t i) const;
  std::span<const double> values() const { return values_; }
  std::vector<double> component(std::size_t c) const;

  const VectorNorm& vnorm() const { return vnorm_; }
  const std::optional<AnalyticSpec>& source() const { return source_; }
  bool singular_start() const { return singular_start_; }

  /// Same grid, new values; drops the source spec.
  SampledFunction with_values(std::vector<double> values) const;
  SampledFunction scaled(double c) const;

 private:
  Interval interval_;
  std::size_t intervals_;
  std::vector<double> values_;
  VectorNorm vnorm_;
  std::optional<AnalyticSpec> source_;
  bool singular_start_;
};

/// Node-wise a*f + b*g on a common grid.
SampledFunction combine(double a, const SampledFunction& f, double b, const SampledFunction& g);

/// Uniform sampling with n intervals. A node where the spec diverges carries the
/// analytic average over [t0, t0 + h/2] in place of the (infinite) value.
SampledFunction sample(const AnalyticSpec& spec, std::size_t n, NormTag tag = NormTag::ell2);

std::vector<double> pointwise_norm(const SampledFunction& f);

}  // namespace fracbound
