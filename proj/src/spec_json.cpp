#include "fracbound/spec_json.hpp"

#include <variant>

#include "fracbound/errors.hpp"

namespace fracbound {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigParseError(where + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) fail(where, "expected a number or an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k)
    out.push_back(number(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

std::vector<std::vector<double>> number_rows(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  std::vector<std::vector<double>> out;
  for (std::size_t k = 0; k < j.size(); ++k)
    out.push_back(numbers(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

Interval interval_of(const json& j, const std::string& where) {
  if (!j.contains("interval")) return {0.0, 1.0};
  const auto iv = numbers(j.at("interval"), where + ".interval");
  if (iv.size() != 2) fail(where + ".interval", "expected [t0, t1]");
  try {
    return {iv[0], iv[1]};
  } catch (const Error& e) {
    fail(where + ".interval", e.what());
  }
}

}  // namespace

json to_json(const AnalyticSpec& spec) {
  json j = std::visit(
      overloaded{
          [](const Power& p) { return json{{"kind", "power"}, {"gamma", p.exponent}, {"coeff", p.coeff}}; },
          [](const LogPower& p) {
            return json{{"kind", "logpower"}, {"beta", p.beta}, {"sigma", p.sigma}, {"coeff", p.coeff}};
          },
          [](const Polynomial& p) { return json{{"kind", "polynomial"}, {"coeffs", p.coeffs}}; },
          [](const Trig& p) {
            return json{{"kind", "trig"},
                        {"amplitude", p.amplitude},
                        {"frequency", p.frequency},
                        {"phase", p.phase}};
          },
          [](const Step& p) {
            return json{{"kind", "step"}, {"breakpoints", p.breakpoints}, {"values", p.values}};
          },
          [](const Constant& p) { return json{{"kind", "constant"}, {"value", p.value}}; },
          [](const Sum& p) {
            json terms = json::array();
            for (const auto& t : p.terms) terms.push_back(to_json(t));
            return json{{"kind", "sum"}, {"terms", terms}};
          },
      },
      spec.form());
  j["interval"] = {spec.interval().t0(), spec.interval().t1()};
  return j;
}

AnalyticSpec spec_from_json(const json& j, const std::string& where) {
  const json& kind_j = field(j, "kind", where);
  if (!kind_j.is_string()) fail(where + ".kind", "expected a string");
  const std::string kind = kind_j.get<std::string>();
  const Interval iv = interval_of(j, where);
  auto num = [&](const char* key) { return number(field(j, key, where), where + "." + key); };
  auto vec = [&](const char* key, std::vector<double> fallback) {
    if (!j.contains(key)) return fallback;
    return numbers(j.at(key), where + "." + key);
  };

  if (kind == "power") return AnalyticSpec::power(num("gamma"), iv, vec("coeff", {1.0}));
  if (kind == "logpower")
    return AnalyticSpec::log_power(num("beta"), num("sigma"), iv, vec("coeff", {1.0}));
  if (kind == "polynomial")
    return AnalyticSpec::polynomial(number_rows(field(j, "coeffs", where), where + ".coeffs"), iv);
  if (kind == "trig") {
    auto freq = numbers(field(j, "frequency", where), where + ".frequency");
    auto phase = vec("phase", std::vector<double>(freq.size(), 0.0));
    auto amp = vec("amplitude", std::vector<double>(freq.size(), 1.0));
    return AnalyticSpec::trig(std::move(amp), std::move(freq), std::move(phase), iv);
  }
  if (kind == "step")
    return AnalyticSpec::step(numbers(field(j, "breakpoints", where), where + ".breakpoints"),
                              number_rows(field(j, "values", where), where + ".values"), iv);
  if (kind == "constant") return AnalyticSpec::constant(vec("value", {1.0}), iv);
  if (kind == "sum") {
    const json& terms_j = field(j, "terms", where);
    if (!terms_j.is_array() || terms_j.empty()) fail(where + ".terms", "expected a non-empty array");
    std::vector<AnalyticSpec> terms;
    for (std::size_t k = 0; k < terms_j.size(); ++k) {
      json term = terms_j[k];
      if (!term.contains("interval")) term["interval"] = {iv.t0(), iv.t1()};
      terms.push_back(spec_from_json(term, where + ".terms[" + std::to_string(k) + "]"));
    }
    return AnalyticSpec::sum(std::move(terms));
  }
  fail(where + ".kind", "unknown kind '" + kind + "'");
}

}  // namespace fracbound
