#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fracbound/errors.hpp"
#include "fracbound/frac_calculus.hpp"
#include "fracbound/space_norms.hpp"
#include "fracbound/theorem_bench.hpp"

using namespace fracbound;

namespace {

const AnalyticSpec kOne = AnalyticSpec::constant({1.0});
const AnalyticSpec kZero = AnalyticSpec::constant({0.0});
const AnalyticSpec kT = AnalyticSpec::power(1.0);
const AnalyticSpec kSin = AnalyticSpec::trig({1.0}, {2.0 * M_PI}, {0.0});

BenchOptions at(std::size_t n) {
  BenchOptions o;
  o.n = n;
  return o;
}

}  // namespace

TEST_CASE("estimate_rate on synthetic sequences") {
  const auto grids = dyadic_grids(6, 11);
  std::vector<double> grow, flat, decay, zeros(grids.size(), 0.0);
  for (auto n : grids) {
    grow.push_back(3.0 * std::pow(double(n), 0.15));
    flat.push_back(2.5);
    decay.push_back(7.0 * std::pow(double(n), -2.0));
  }
  auto s = estimate_rate(grids, grow);
  CHECK(s.exponent == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(s.verdict == Verdict::diverging);
  CHECK(s.min_growth == doctest::Approx(std::pow(2.0, 0.15)));

  s = estimate_rate(grids, flat);
  CHECK(std::fabs(s.exponent) < 1e-12);
  CHECK(s.verdict == Verdict::bounded);
  CHECK(s.monotone);

  s = estimate_rate(grids, decay);
  CHECK(s.exponent == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(s.verdict == Verdict::bounded);

  s = estimate_rate(grids, zeros);
  CHECK(s.degenerate);
  CHECK(s.exponent == 0.0);
  CHECK(s.verdict == Verdict::bounded);

  CHECK_THROWS_AS(estimate_rate({8, 16, 32}, {1.0, 1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(estimate_rate({8, 16, 16, 32}, {1.0, 1.0, 1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(estimate_rate({8, 16, 32, 64}, {1.0, -1.0, 1.0, 1.0}), InvalidArgument);
}

TEST_CASE("study pass combines verdict and extra requirements") {
  auto s = estimate_rate(dyadic_grids(6, 9), {1.0, 1.1, 1.21, 1.331});
  s.expected = Verdict::diverging;
  CHECK(s.pass());
  s.required_growth = 1.2;
  CHECK_FALSE(s.pass());
  s = estimate_rate(dyadic_grids(6, 9), {1.0, 0.5, 0.6, 0.1});
  s.require_monotone = true;
  CHECK_FALSE(s.pass());
}

TEST_CASE("default corpus") {
  const auto corpus = default_corpus();
  CHECK(corpus.size() == 8);
  CHECK(corpus.back().dimension() == 2);
}

TEST_CASE("supercritical continuity constant and check") {
  CHECK(supercritical_constant(0.75, 2.0, 1.0) == doctest::Approx(1.0 / (std::sqrt(0.5) * std::tgamma(0.75))));
  CHECK(supercritical_constant(0.75, 2.0, 1.0) == doctest::Approx(1.15407).epsilon(1e-5));
  // alpha >= 1 goes through sigma = (p+1)/(2p) = 0.75 for p = 2.
  CHECK(supercritical_constant(1.5, 2.0, 1.0) ==
        doctest::Approx(1.0 / (std::sqrt(0.5) * std::tgamma(0.75)) / std::tgamma(1.75)));
  // Interval length enters as T^{alpha - 1/p}.
  CHECK(supercritical_constant(0.75, 2.0, 2.0) ==
        doctest::Approx(std::pow(2.0, 0.25) * supercritical_constant(0.75, 2.0, 1.0)));

  auto c = check_supercritical_sup(kT, 0.75, 2.0);
  CHECK(c.tag == "supercritical-continuity");
  CHECK(c.n == 4096);
  CHECK(c.lhs == doctest::Approx(1.0 / std::tgamma(2.75)).epsilon(1e-6));
  CHECK(c.rhs == doctest::Approx(1.15407 / std::sqrt(3.0)).epsilon(1e-5));
  CHECK(c.margin == doctest::Approx(c.rhs - c.lhs));
  CHECK(c.pass);

  c = check_supercritical_sup(kZero, 0.75, 2.0, at(256));
  CHECK(c.lhs == 0.0);
  CHECK(c.rhs == 0.0);
  CHECK(c.pass);

  // Singular input: J^0.6 t^-0.4 = Gamma(0.6)/Gamma(1.2) t^0.2, ||t^-0.4||_2 = sqrt(5).
  c = check_supercritical_sup(AnalyticSpec::power(-0.4), 0.6, 2.0);
  CHECK(c.lhs == doctest::Approx(std::tgamma(0.6) / std::tgamma(1.2)).epsilon(0.05));
  // The trapezoid misses at most int_0^h t^-0.8 = 5 h^0.2 of the squared norm.
  const double exact = std::sqrt(5.0) / (std::sqrt(0.2) * std::tgamma(0.6));
  CHECK(c.rhs <= exact);
  CHECK(c.rhs >= exact * std::sqrt(1.0 - std::pow(4096.0, -0.2)));
  CHECK(c.pass);

  for (const auto& f : default_corpus()) {
    if (!in_lp(f, 4.0)) continue;
    CHECK(check_supercritical_sup(f, 1.5, 4.0, at(1024)).pass);
  }

  CHECK_THROWS_AS(check_supercritical_sup(kT, 0.4, 2.0), ParamsOutOfScope);
  CHECK_THROWS_AS(check_supercritical_sup(kT, 0.75, 1.0), ParamsOutOfScope);
  CHECK_THROWS_AS(check_supercritical_sup(AnalyticSpec::power(-0.4), 0.75, 4.0), ParamsOutOfScope);
}

TEST_CASE("W_RL bound") {
  BenchOptions o = at(2048);
  o.convention = OrderConvention::ceil;
  CHECK(wrl_constant(1.0, 1.0, 1.0, OrderConvention::ceil) == doctest::Approx(2.0));
  auto c = check_wrl_bound(kT, 1.0, 1.0, o);
  CHECK(c.lhs == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  CHECK(c.rhs == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(c.pass);

  // Strict ceiling counts one more integer derivative at gamma = 1.
  o.convention = OrderConvention::strictCeil;
  CHECK(wrl_constant(1.0, 1.0, 1.0) == doctest::Approx(3.0));
  c = check_wrl_bound(kT, 1.0, 1.0, o);
  CHECK(c.lhs == doctest::Approx(1.0 / 6.0 + 1.0).epsilon(1e-6));
  CHECK(c.rhs == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(c.pass);

  // ||J^1.5 1||_1 = 1/(2.5 Gamma(2.5)), ||J^1 1||_1 = 1/2.
  c = check_wrl_bound(kOne, 1.5, 0.5, o);
  CHECK(c.lhs == doctest::Approx(1.0 / (2.5 * std::tgamma(2.5)) + 0.5).epsilon(1e-6));
  CHECK(c.rhs == doctest::Approx(1.0 / std::tgamma(2.5) + 1.0).epsilon(1e-12));
  CHECK(c.pass);

  c = check_wrl_bound(kZero, 2.0, 2.0, at(256));
  CHECK(c.lhs == 0.0);
  CHECK(c.pass);

  CHECK_THROWS_AS(check_wrl_bound(kT, 0.5, 0.5), ParamsOutOfScope);
  CHECK_THROWS_AS(check_wrl_bound(kT, 1.5, 2.0), ParamsOutOfScope);
}

TEST_CASE("L^inf to Hoelder per-pair bound") {
  // The pair (1, 1/4) for f = 1, alpha = 1/2.
  const auto g = rl_integral(sample(kOne, 1024), 0.5);
  const double lhs = g.at(1024)[0] - g.at(256)[0];
  CHECK(lhs == doctest::Approx(0.5 / std::tgamma(1.5)).epsilon(1e-9));
  CHECK(lhs == doctest::Approx(0.56419).epsilon(1e-5));
  const double rhs = (2.0 * std::sqrt(0.75) + 0.5 - 1.0) / std::tgamma(1.5);
  CHECK(rhs == doctest::Approx(1.39022).epsilon(1e-5));
  CHECK(lhs <= rhs);

  // For f = 1 the bound is attained on pairs (t, t0): the tightest ratio is 1.
  auto c = check_linf_holder(kOne, 0.5, at(1024));
  CHECK(c.lhs == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(c.rhs == 1.0);
  CHECK(c.pass);

  for (double a : {0.25, 0.75}) CHECK(check_linf_holder(kSin, a, at(512)).pass);
  c = check_linf_holder(kZero, 0.5, at(128));
  CHECK(c.lhs == 0.0);
  CHECK(c.pass);

  CHECK_THROWS_AS(check_linf_holder(kOne, 1.0), ParamsOutOfScope);
  CHECK_THROWS_AS(check_linf_holder(AnalyticSpec::power(-0.4), 0.5), ParamsOutOfScope);
}

TEST_CASE("constant function is not in the next Hoelder space") {
  auto s = check_linf_holder_sharpness(0.5, 0.75);
  CHECK(s.verdict == Verdict::diverging);
  CHECK(s.exponent == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(s.min_growth == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-3));
  CHECK(s.pass());
  CHECK_THROWS_AS(check_linf_holder_sharpness(0.5, 0.4), ParamsOutOfScope);
}

TEST_CASE("embedding inequalities on images") {
  CHECK(check_chebyshev(kT, 2.0, 0.5, at(1024)).pass);
  CHECK(check_chebyshev(AnalyticSpec::power(-0.4), 2.0, 0.0, at(1024)).pass);
  auto c = check_weak_embedding(AnalyticSpec::power(-0.4), 1.0, 2.0, 0.0, at(1024));
  CHECK(c.tag == "embedding");
  CHECK(c.pass);
  CHECK(check_weak_embedding(kSin, 1.5, 4.0, 0.75, at(1024)).pass);
  CHECK_THROWS_AS(check_weak_embedding(kT, 2.0, 1.0), ParamsOutOfScope);
  CHECK_THROWS_AS(check_chebyshev(AnalyticSpec::power(-0.6), 2.0), ParamsOutOfScope);
}

TEST_CASE("oracle and scheme checks") {
  auto c = check_power_oracle(2.0, 0.5);
  CHECK(c.lhs < 1e-6);
  CHECK(c.pass);
  auto s = study_power_oracle(2.0, 0.75);
  CHECK(s.exponent == doctest::Approx(-2.0).epsilon(0.02));
  CHECK(s.pass());
  s = study_power_oracle(1.0, 0.25);
  CHECK(s.degenerate);
  CHECK(s.pass());
  CHECK_THROWS_AS(check_power_oracle(-0.5, 0.5), ParamsOutOfScope);

  c = check_scheme_equivalence(kSin, 0.5, 4096);
  CHECK(c.lhs <= 1e-10);
  CHECK(c.pass);
}

TEST_CASE("Hoelder regularity ratio is stable") {
  // J^0.75 1 = t^0.75 / Gamma(1.75); its H^{0,1/4} seminorm is 1/Gamma(1.75), attained at (0, 1).
  auto s = check_holder_regularity(kOne, 0.75, 2.0);
  CHECK(s.grids.front() == 256);
  CHECK(s.grids.back() == 4096);
  for (double v : s.values) CHECK(v == doctest::Approx(1.0 / std::tgamma(1.75)).epsilon(1e-6));
  CHECK(s.verdict == Verdict::bounded);
  CHECK(s.pass());

  s = check_holder_regularity(kT, 1.2, 2.0);
  CHECK(*s.params.q == doctest::Approx(0.7));
  CHECK(*s.params.n == 0);
  CHECK(s.pass());

  s = check_holder_regularity(kT, 1.75, 2.0);
  CHECK(*s.params.n == 1);
  CHECK(*s.params.q == doctest::Approx(0.25));
  CHECK(s.pass());

  s = check_holder_regularity(kZero, 0.75, 2.0);
  CHECK(s.degenerate);
  CHECK(s.pass());

  CHECK_THROWS_AS(check_holder_regularity(kT, 0.4, 2.0), ParamsOutOfScope);
  CHECK_THROWS_AS(check_holder_regularity(kT, 1.5, 2.0), ParamsOutOfScope);
}

TEST_CASE("Hoelder sharpness counterexample") {
  // J^0.75 t^-0.4 = Gamma(0.6)/Gamma(1.35) t^0.35; the pair (0, h) gives c h^{-0.15}.
  auto s = check_holder_sharpness(2.0, 0.75, 0.5, -0.4);
  CHECK(s.verdict == Verdict::diverging);
  CHECK(s.exponent == doctest::Approx(0.15).epsilon(0.02));
  CHECK(s.min_growth >= 1.05);
  CHECK(s.pass());

  s = check_holder_sharpness(2.0, 0.75, 0.5);
  CHECK(*s.params.gamma == doctest::Approx(-0.375));
  CHECK(s.exponent == doctest::Approx(0.125).epsilon(0.02));
  CHECK(s.pass());

  s = check_holder_sharpness(4.0, 0.5, 0.4);
  CHECK(*s.params.gamma == doctest::Approx(-0.175));
  CHECK(s.exponent == doctest::Approx(0.075).epsilon(0.02));
  CHECK(s.verdict == Verdict::diverging);

  CHECK_THROWS_AS(check_holder_sharpness(2.0, 0.75, 0.2), ParamsOutOfScope);
  CHECK_THROWS_AS(check_holder_sharpness(2.0, 0.75, 0.5, -0.2), ParamsOutOfScope);
  CHECK_THROWS_AS(check_holder_sharpness(2.0, 0.4, 0.5), ParamsOutOfScope);
}

TEST_CASE("L^inf to higher Hoelder and Sobolev spaces") {
  // alpha = 1.5: derivative t^0.5 / Gamma(1.5), H^{0,1/2} seminorm 1/Gamma(1.5).
  auto s = check_linf_general(kOne, 1.5);
  CHECK(*s.params.n == 1);
  CHECK(*s.params.q == doctest::Approx(0.5));
  CHECK(s.values.back() == doctest::Approx(1.12838).epsilon(1e-5));
  CHECK(s.pass());

  // alpha = 2: t^2/2, t, 1 on [0,1].
  s = check_linf_general(kOne, 2.0);
  CHECK(s.values.back() == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(s.pass());

  s = check_linf_general(kZero, 1.5);
  CHECK(s.values.back() == 0.0);
  CHECK(s.pass());

  CHECK_THROWS_AS(check_linf_general(kOne, 0.5), ParamsOutOfScope);
  CHECK_THROWS_AS(check_linf_general(AnalyticSpec::power(-0.4), 1.5), ParamsOutOfScope);
}

TEST_CASE("critical case alpha = n + 1/p") {
  auto r = check_critical_bk(kT, 2.0, 1);
  CHECK(*r.ratio.params.gamma == doctest::Approx(0.5));
  CHECK(r.ratio.params.alpha == doctest::Approx(1.5));
  CHECK(r.ratio.verdict == Verdict::bounded);
  CHECK(r.ratio.pass());
  // d/dt J^1.5 t against J^0.5 t: second-order differences.
  CHECK(r.derivative.exponent == doctest::Approx(-2.0).epsilon(0.05));
  CHECK(r.derivative.pass());

  r = check_critical_bk(kOne, 2.0, 1);
  CHECK(std::isfinite(r.ratio.values.back()));
  CHECK(r.ratio.pass());

  r = check_critical_bk(kZero, 2.0, 1);
  CHECK(r.ratio.values.back() == 0.0);
  CHECK(r.ratio.pass());

  CHECK_THROWS_AS(check_critical_bk(kT, 2.0, 0), ParamsOutOfScope);
  CHECK_THROWS_AS(check_critical_bk(kT, 2.0, 1, 0.25), ParamsOutOfScope);
}

TEST_CASE("weak non-inclusion family") {
  const auto f = log_damped_family();
  CHECK(f.interval().t1() == 0.5);
  CHECK(in_lp(f, 1.0));

  auto s = check_weak_noninclusion(0.5, 3.0);
  CHECK(s.expected == Verdict::diverging);
  CHECK(s.grids.back() == 16384);
  for (std::size_t k = 1; k < s.values.size(); ++k) CHECK(s.values[k] > s.values[k - 1]);

  s = check_weak_noninclusion(0.5, 2.0);
  CHECK(s.expected == Verdict::bounded);
  CHECK(s.pass());

  s = check_weak_noninclusion(0.5, 3.0, kOne);
  CHECK(s.expected == Verdict::bounded);
  CHECK(s.pass());

  CHECK_THROWS_AS(check_weak_noninclusion(0.5, 1.5), ParamsOutOfScope);
  CHECK_THROWS_AS(check_weak_noninclusion(1.5, 3.0), ParamsOutOfScope);
}

TEST_CASE("identities") {
  // D^0.5 t^0.5 = Gamma(1.5), J^0.5 of that gives back t^0.5.
  auto r = check_identities(AnalyticSpec::power(0.5), 0.5, IdentityVariant::inversion);
  CHECK(r.interior.tag == "inversion");
  CHECK(r.full.tag == "inversion-full");
  CHECK(-r.interior.exponent >= 1.0);
  CHECK(r.interior.pass());

  r = check_identities(AnalyticSpec::power(2.0), 0.5, IdentityVariant::commutation);
  CHECK(r.interior.exponent == doctest::Approx(-2.0).epsilon(0.05));
  CHECK(r.interior.pass());

  for (const auto& f : default_corpus()) {
    if (!is_smooth(f)) continue;
    r = check_identities(f, 0.3, IdentityVariant::semigroup);
    CAPTURE(f.label());
    CHECK(*r.interior.params.beta == doctest::Approx(0.7));
    CHECK(r.interior.pass());
    CHECK(r.full.values.back() <= 1e-4);
  }

  CHECK_THROWS_AS(check_identities(kOne, 0.5, IdentityVariant::commutation), ParamsOutOfScope);
  CHECK_THROWS_AS(check_identities(AnalyticSpec::step({0.5}, {{0.0}, {1.0}}), 0.5, IdentityVariant::commutation),
                  ParamsOutOfScope);
  CHECK_THROWS_AS(check_identities(AnalyticSpec::step({0.5}, {{0.0}, {1.0}}), 0.5, IdentityVariant::inversion),
                  ParamsOutOfScope);
  CHECK_THROWS_AS(check_identities(kT, 1.5, IdentityVariant::inversion), ParamsOutOfScope);
  CHECK(identity_from_string("semigroup") == IdentityVariant::semigroup);
  CHECK_THROWS_AS(identity_from_string("nope"), InvalidArgument);
}
