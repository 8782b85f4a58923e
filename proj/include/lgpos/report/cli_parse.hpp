#pragma once

// Parsers for the command-line value syntaxes: grids, complex numbers,
// superpotential and density specifications, flat key-value config files.

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lgpos/multivariate/poly.hpp"

namespace lgpos::report {

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& s) {
  std::size_t pos = 0;
  double v = std::stod(trim(s), &pos);
  if (pos != trim(s).size()) throw std::invalid_argument("not a number: " + s);
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

}  // namespace detail

/// "log:a..b:n" (n log-spaced points), "lin:a..b:n", a comma list, or a single number.
inline std::vector<double> parse_grid(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) {
    std::vector<double> out;
    for (const auto& tok : detail::split(spec, ',')) out.push_back(detail::to_double(tok));
    if (out.empty()) throw std::invalid_argument("empty grid");
    return out;
  }
  std::string kind = spec.substr(0, colon);
  std::string rest = spec.substr(colon + 1);
  auto dots = rest.find("..");
  auto colon2 = rest.rfind(':');
  if (dots == std::string::npos || colon2 == std::string::npos || colon2 < dots)
    throw std::invalid_argument("grid syntax is kind:a..b:n, got " + spec);
  double a = detail::to_double(rest.substr(0, dots));
  double b = detail::to_double(rest.substr(dots + 2, colon2 - dots - 2));
  long n = std::stol(rest.substr(colon2 + 1));
  if (n < 1) throw std::invalid_argument("grid needs n >= 1");
  std::vector<double> out;
  for (long i = 0; i < n; ++i) {
    double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    if (kind == "lin") {
      out.push_back(a + (b - a) * f);
    } else if (kind == "log") {
      if (!(a > 0 && b > 0)) throw std::invalid_argument("log grid needs positive end points");
      out.push_back(std::exp(std::log(a) + (std::log(b) - std::log(a)) * f));
    } else {
      throw std::invalid_argument("unknown grid kind: " + kind);
    }
  }
  if (n > 1) out.back() = b;
  return out;
}

/// "1.5", "-2i", "1+2i", "0.5-0.25i".
inline std::complex<double> parse_complex(const std::string& in) {
  std::string s = detail::trim(in);
  if (s.empty()) throw std::invalid_argument("empty complex number");
  if (s.back() != 'i') return {detail::to_double(s), 0.0};
  std::string body = s.substr(0, s.size() - 1);
  // Split at the last sign that is not part of an exponent.
  std::size_t cut = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      cut = i;
      break;
    }
  }
  auto imag_of = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return detail::to_double(t);
  };
  if (cut == std::string::npos) return {0.0, imag_of(body)};
  return {detail::to_double(body.substr(0, cut)), imag_of(body.substr(cut))};
}

/// Polynomial file: one term per line, "re im e_1 ... e_n"; '#' starts a comment.
inline mv::HomogeneousPoly read_poly_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open polynomial file " + path);
  std::vector<std::pair<std::vector<int>, mv::cplx>> terms;
  std::string line;
  while (std::getline(f, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream is(line);
    double re, im;
    if (!(is >> re)) continue;
    if (!(is >> im)) throw std::invalid_argument("polynomial file: expected 're im e_1 ... e_n'");
    std::vector<int> e;
    for (int k; is >> k;) e.push_back(k);
    if (e.empty()) throw std::invalid_argument("polynomial file: missing exponents");
    terms.push_back({e, {re, im}});
  }
  if (terms.empty()) throw std::invalid_argument("polynomial file " + path + " has no terms");
  int n = static_cast<int>(terms.front().first.size());
  int deg = 0;
  for (int k : terms.front().first) deg += k;
  mv::HomogeneousPoly P(n, deg);
  for (const auto& [e, c] : terms) P.add_term(e, c);
  return P;
}

/// zero | random:SEED | separable:a1,...,an | monomial:e1,...,en | path to a polynomial file.
/// n is only needed where the spec does not determine it.
inline mv::HomogeneousPoly parse_poly_spec(const std::string& spec, int n, int d) {
  auto colon = spec.find(':');
  std::string kind = colon == std::string::npos ? spec : spec.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "zero") return mv::HomogeneousPoly::zero(n, d);
  if (kind == "random") return mv::HomogeneousPoly::random(n, d, std::stoull(arg));
  if (kind == "separable") {
    std::vector<mv::cplx> a;
    for (const auto& tok : detail::split(arg, ',')) a.push_back(parse_complex(tok));
    return mv::HomogeneousPoly::separable(a, d);
  }
  if (kind == "monomial") {
    std::vector<int> e;
    for (const auto& tok : detail::split(arg, ',')) e.push_back(std::stoi(tok));
    return mv::HomogeneousPoly::monomial(e);
  }
  return read_poly_file(spec);
}

/// one | abs2:<poly spec>.
inline mv::Density parse_density(const std::string& spec, int n) {
  if (spec == "one" || spec == "1") return mv::Density::one();
  if (spec.rfind("abs2:", 0) == 0) {
    std::string inner = spec.substr(5);
    if (inner.rfind("random:", 0) == 0 || inner.rfind("zero", 0) == 0)
      throw std::invalid_argument("abs2 density needs monomial:..., separable:... or a polynomial file");
    mv::HomogeneousPoly P = parse_poly_spec(inner, n, 1);
    return mv::Density::abs_square(std::move(P));
  }
  throw std::invalid_argument("unknown density: " + spec);
}

/// Flat "key = value" lines; '#' comments and blank lines are ignored.
inline std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (detail::trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = detail::trim(line.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    out[key] = detail::trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace lgpos::report
