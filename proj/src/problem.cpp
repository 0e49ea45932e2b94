#include "skorohod/problem.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "skorohod/errors.hpp"

namespace skorohod::problem {

using nlohmann::json;
using chaos::Coefficient;
using chaos::PiecewisePolynomial;
using chaos::Polynomial;

double constant_tail(const Problem& p) {
  return p.drift_tail_bound ? std::sqrt(*p.drift_tail_bound / 12.0) : 0.0;
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"square", "linear_drift", "wick_square_terminal", "sine", "tau_linear"};
  return names;
}

Problem builtin(std::string_view name, int truncation) {
  using chaos::ChaosExpansion;
  using chaos::ChaosTerm;
  const auto s = Coefficient::polynomial({0.0, 1.0});
  const auto one = Coefficient::constant(1.0);
  if (name == "square") {
    // W_s^2 = W_s^{<>2} + s
    return {"square", ChaosExpansion(1, {}, {{s, {0}}, {one, {2}}}), std::nullopt};
  }
  if (name == "linear_drift") return {"linear_drift", ChaosExpansion(1, {}, {{s, {0}}}), std::nullopt};
  if (name == "wick_square_terminal") {
    return {"wick_square_terminal", ChaosExpansion(2, {1.0}, {{one, {0, 1}}}), std::nullopt};
  }
  if (name == "tau_linear") return {"tau_linear", ChaosExpansion(2, {0.5}, {{s, {0, 1}}}), std::nullopt};
  if (name == "sine") {
    if (truncation < 1) throw DomainError("sine truncation degree must be at least 1");
    auto t = chaos::wick_sine_expansion({0.5}, truncation);
    return {"sine", std::move(t.expansion), t.drift_tail_bound};
  }
  std::string known;
  for (const auto& n : builtin_names()) known += (known.empty() ? "" : ", ") + n;
  throw ParseError("unknown builtin '" + std::string(name) + "' (known: " + known + ")");
}

// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ParseError("field '" + path + "': " + what);
}

const json& member(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) field_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) field_error(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }
std::string join(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double number(const json& v, const std::string& path) {
  if (!v.is_number()) field_error(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) field_error(path, "must be finite");
  return x;
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) field_error(path, "expected an integer");
  return v.get<int>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) field_error(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], join(path, i)));
  return out;
}

PiecewisePolynomial piecewise(const json& v, const std::string& path) {
  if (v.is_array()) return PiecewisePolynomial({0.0, 1.0}, {Polynomial(numbers(v, path))});
  auto bp = numbers(member(v, path, "breakpoints"), join(path, "breakpoints"));
  const json& pieces = member(v, path, "pieces");
  const std::string pp = join(path, "pieces");
  if (!pieces.is_array()) field_error(pp, "expected an array of coefficient lists");
  std::vector<Polynomial> polys;
  for (std::size_t i = 0; i < pieces.size(); ++i) polys.emplace_back(numbers(pieces[i], join(pp, i)));
  try {
    return PiecewisePolynomial(std::move(bp), std::move(polys));
  } catch (const DomainError& e) {
    field_error(path, e.what());
  }
}

Coefficient coefficient(const json& v, const std::string& path) {
  const json& kind = member(v, path, "kind");
  if (!kind.is_string()) field_error(join(path, "kind"), "expected a string");
  const auto k = kind.get<std::string>();
  const json& data = member(v, path, "data");
  const std::string dp = join(path, "data");
  if (k == "polynomial") return Coefficient::polynomial(numbers(data, dp));
  if (k == "exppoly") {
    return Coefficient::exp_poly(piecewise(member(data, dp, "prefactor"), join(dp, "prefactor")),
                                 piecewise(member(data, dp, "exponent"), join(dp, "exponent")));
  }
  if (k == "userpair") field_error(join(path, "kind"), "user coefficients cannot be read from a file");
  field_error(join(path, "kind"), "unknown kind '" + k + "' (expected polynomial or exppoly)");
}

Problem from_json(const json& doc, int truncation) {
  if (!doc.is_object()) throw ParseError("problem document must be an object");
  if (auto it = doc.find("builtin"); it != doc.end()) {
    if (!it->is_string()) field_error("builtin", "expected a string");
    int m = truncation;
    if (auto t = doc.find("truncation"); t != doc.end()) m = integer(*t, "truncation");
    return builtin(it->get<std::string>(), m);
  }
  const int k = integer(member(doc, "", "K"), "K");
  if (k < 1) field_error("K", "must be at least 1");
  std::vector<double> taus;
  if (auto it = doc.find("taus"); it != doc.end()) taus = numbers(*it, "taus");
  if (taus.size() != static_cast<std::size_t>(k - 1)) {
    field_error("taus", "expected " + std::to_string(k - 1) + " entries for K = " + std::to_string(k));
  }
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (taus[i] < 0.0 || taus[i] > 1.0) field_error(join("taus", i), "must lie in [0, 1]");
  }
  const json& terms = member(doc, "", "terms");
  if (!terms.is_array()) field_error("terms", "expected an array");
  std::vector<chaos::ChaosTerm> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string tp = join("terms", i);
    Coefficient c = coefficient(member(terms[i], tp, "coeff"), join(tp, "coeff"));
    const json& ex = member(terms[i], tp, "exponents");
    const std::string ep = join(tp, "exponents");
    if (!ex.is_array()) field_error(ep, "expected an array of integers");
    std::vector<int> e;
    for (std::size_t j = 0; j < ex.size(); ++j) {
      const int v = integer(ex[j], join(ep, j));
      if (v < 0) field_error(join(ep, j), "must be non-negative");
      e.push_back(v);
    }
    if (e.size() != static_cast<std::size_t>(k)) field_error(ep, "expected " + std::to_string(k) + " exponents");
    out.push_back({std::move(c), wick::MultiIndex(std::move(e))});
  }
  return {"file", chaos::ChaosExpansion(k, std::move(taus), std::move(out)), std::nullopt};
}

json piecewise_json(const PiecewisePolynomial& p) {
  json pieces = json::array();
  for (const auto& poly : p.pieces()) pieces.push_back(std::vector<double>(poly.coeffs().begin(), poly.coeffs().end()));
  return {{"breakpoints", std::vector<double>(p.breakpoints().begin(), p.breakpoints().end())}, {"pieces", pieces}};
}

}  // namespace

Problem parse(std::string_view text, int truncation) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // locate the byte offset as line:column
    const std::size_t pos = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    if (auto p = msg.find("; "); p != std::string::npos) msg = msg.substr(p + 2);
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
  }
  return from_json(doc, truncation);
}

Problem load_file(const std::string& path, int truncation) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open problem file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    auto p = parse(ss.str(), truncation);
    if (p.name == "file") p.name = path;
    return p;
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string serialize(const chaos::ChaosExpansion& u) {
  json terms = json::array();
  for (const auto& t : u.terms()) {
    json coeff;
    switch (t.coeff.kind()) {
      case chaos::CoefficientKind::Polynomial: {
        const auto c = t.coeff.poly().coeffs();
        coeff = {{"kind", "polynomial"}, {"data", std::vector<double>(c.begin(), c.end())}};
        break;
      }
      case chaos::CoefficientKind::ExpPoly:
        coeff = {{"kind", "exppoly"},
                 {"data", {{"prefactor", piecewise_json(t.coeff.prefactor())},
                           {"exponent", piecewise_json(t.coeff.exponent())}}}};
        break;
      case chaos::CoefficientKind::UserPair:
        throw UnsupportedError("user coefficients cannot be serialized");
    }
    terms.push_back({{"coeff", coeff}, {"exponents", std::vector<int>(t.mi.exponents().begin(), t.mi.exponents().end())}});
  }
  json doc = {{"K", u.slots()}, {"taus", std::vector<double>(u.taus().begin(), u.taus().end())}, {"terms", terms}};
  return doc.dump(2) + "\n";
}

}  // namespace skorohod::problem
