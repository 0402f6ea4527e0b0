#pragma once

// Riemann-Liouville fractional integral J^alpha and derivative D^alpha on uniform grids.
//
//   J^alpha f(t) = 1/Gamma(alpha) * int_{t0}^{t} (t - s)^{alpha - 1} f(s) ds
//   D^alpha f    = d^m/dt^m J^{m - alpha} f,   m = least integer strictly above alpha
//
// J^alpha is discretised by product integration: the kernel is integrated exactly
// against the piecewise-linear interpolant of the samples. On a uniform grid
//
//   J^alpha f(t_i) = h^alpha / Gamma(alpha + 2) * ( b_i f_0 + sum_{j=1}^{i} c_{i-j} f_j )
//
// with c_0 = 1, c_k = (k+1)^{alpha+1} - 2 k^{alpha+1} + (k-1)^{alpha+1} and
// b_i = (i-1)^{alpha+1} - (i-1-alpha) i^alpha. The sum is a lower-triangular Toeplitz
// product, evaluated directly or through an FFT circulant embedding.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracbound/function_model.hpp"

namespace fracbound {

enum class QuadratureScheme { productTrapezoidNaive, productTrapezoidFFT };

std::string to_string(QuadratureScheme scheme);
/// Accepts "naive" / "fft" as well as the full enumerator names.
QuadratureScheme scheme_from_string(const std::string& s);

/// How [alpha] is read for integer alpha. strictCeil: least integer > alpha (so [1] = 2).
/// ceil: least integer >= alpha (so [1] = 1); identical for non-integer alpha.
enum class OrderConvention { strictCeil, ceil };

int order_ceiling(double alpha, OrderConvention convention = OrderConvention::strictCeil);

/// Gamma function; relative accuracy well below 1e-12 on (0, 30).
double gamma_fn(double x);

/// Scalar parameters a theorem or operator instance needs.
struct FracParams {
  double alpha = 0.5;
  double p = 2.0;  // may be +inf
  std::optional<double> gamma;
  std::optional<double> q;
  std::optional<double> beta;  // second order in compositions
  std::optional<int> n;
  Interval interval{0.0, 1.0};

  /// Hoelder conjugate p/(p-1): +inf for p = 1 and 1 for p = inf.
  double p_prime() const;
  /// "alpha=0.5;p=2;..." with only the populated fields (alpha <= 0 means none).
  std::string describe() const;
};

/// Kernel weights for n intervals, without the h^alpha / Gamma(alpha+2) factor.
struct ProductWeights {
  double alpha;
  std::size_t n;
  std::vector<double> toeplitz;  // c_0 .. c_{n-1}
  std::vector<double> boundary;  // b_0 .. b_n, b_0 = 0
};

/// Memoised per (alpha, n); safe for concurrent callers.
std::shared_ptr<const ProductWeights> product_weights(double alpha, std::size_t n);

SampledFunction rl_integral(const SampledFunction& f, double alpha,
                            QuadratureScheme scheme = QuadratureScheme::productTrapezoidFFT);

/// J^alpha t^gamma = Gamma(gamma+1)/Gamma(gamma+alpha+1) * t^{gamma+alpha} (t0 = 0).
double rl_integral_power_oracle(double gamma, double alpha, double t);

/// m successive second-order differences: central inside, one-sided at both ends.
SampledFunction finite_difference(const SampledFunction& g, int times = 1);

SampledFunction rl_derivative(const SampledFunction& f, double alpha,
                              QuadratureScheme scheme = QuadratureScheme::productTrapezoidFFT,
                              OrderConvention convention = OrderConvention::strictCeil);

/// (J^alpha J^beta f, J^{alpha+beta} f) on the grid of f.
std::pair<SampledFunction, SampledFunction> semigroup_compose(
    const SampledFunction& f, double alpha, double beta,
    QuadratureScheme scheme = QuadratureScheme::productTrapezoidFFT);

}  // namespace fracbound
