#pragma once

// Norm and seminorm estimators on sampled functions. Every supremum over a continuum
// is replaced by a maximum over a finite candidate set whose size is reported.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fracbound/frac_calculus.hpp"
#include "fracbound/function_model.hpp"

namespace fracbound {

struct SpaceDescriptor {
  enum class Kind { Lp, LpWeak, Holder, Sobolev, BMO, KR, WRL, BK, Continuous };

  Kind kind = Kind::Continuous;
  double p = 0.0;
  int n = 0;
  double gamma = 0.0;
  double alpha = 0.0;

  static SpaceDescriptor lp(double p);
  static SpaceDescriptor lp_weak(double p);
  static SpaceDescriptor holder(int n, double gamma);
  static SpaceDescriptor sobolev(int n, double p);
  static SpaceDescriptor bmo();
  static SpaceDescriptor kr(double gamma);
  static SpaceDescriptor wrl(double alpha);
  static SpaceDescriptor bk(int n, double p, double gamma);
  static SpaceDescriptor continuous();

  std::string name() const;
  std::string params() const;
};

struct NormReport {
  SpaceDescriptor space;
  double value = 0.0;
  bool infinite = false;
  std::size_t n = 0;
  std::size_t candidates = 0;
  std::string method;
  double seconds = 0.0;

  /// "space,params,n,value,candidates,seconds"
  std::string csv_row() const;
  static std::string csv_header();
};

/// [f, f', ..., f^(order)]: analytic when f carries its source spec, otherwise
/// second-order finite differences (needs at least 16 intervals).
std::vector<SampledFunction> derivative_samples(const SampledFunction& f, int order);

NormReport lp_norm(const SampledFunction& f, double p);

/// Measure of {t : |f(t)| > r}, counting cells whose midpoint value exceeds r.
double distribution_function(const SampledFunction& f, double r);

NormReport weak_lp_seminorm(const SampledFunction& f, double p);

NormReport holder_seminorm(const SampledFunction& f, int n, double gamma);
/// Seminorm of the given samples themselves (n = 0 without derivative handling).
NormReport holder_seminorm_of(const SampledFunction& g, double gamma);

NormReport sobolev_norm(const SampledFunction& f, int n, double p);
/// Sum of L^p norms of a precomputed derivative list [f, f', ..., f^(n)].
NormReport sobolev_norm_of(std::span<const SampledFunction> derivatives, double p);

struct BmoOptions {
  bool force_naive = false;
  /// Above this many intervals the naive path runs on a coarsened subgrid.
  std::size_t naive_max_intervals = 1024;
};

NormReport bmo_seminorm(const SampledFunction& f, const BmoOptions& options = {});

NormReport kr_norm(const SampledFunction& f, double gamma);

NormReport wrl_norm(const SampledFunction& f, double alpha,
                    OrderConvention convention = OrderConvention::strictCeil,
                    QuadratureScheme scheme = QuadratureScheme::productTrapezoidFFT);

NormReport bk_norm(const SampledFunction& f, int n, double p, double gamma);
NormReport bk_norm_of(std::span<const SampledFunction> derivatives, double p, double gamma);

}  // namespace fracbound
