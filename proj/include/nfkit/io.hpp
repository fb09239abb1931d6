#pragma once
// Problem files and report serialization.
//
// A problem is one JSON document:
//   {"field": "Q" | "Q(i)" | {"minpoly": [c0, ..., 1], "root": [re, im], "conj_pow": e},
//    "lambda": [...], "order": N,
//    "terms": [{"coeff": s, "monomial": [m1, ..., mn], "component": k}, ...],
//    "family": [{"lambda": [...], "terms": [...]}, ...],
//    "decomposition": {"parts": [[...], ...], "gamma": [...]} | "A2" | "cyclic",
//    "options": {...}}
// Scalars are "a/b" strings, integers, or coefficient lists in the basis 1, t, t^2, ...
// (t = i for Q(i)). Components are 1-based.

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nfkit/commuting.hpp"
#include "nfkit/integrability.hpp"

namespace nfkit::io {

using json = nlohmann::ordered_json;

// malformed problem file; `where` is a JSON pointer or a byte offset
struct SpecError : InvalidInput {
  std::string where;
  SpecError(const std::string &w, const std::string &msg) : InvalidInput(w + ": " + msg), where(w) {}
};

struct Problem {
  const Field *field = Field::rationals();
  int N = 1;
  std::optional<BrunoField> F;
  std::vector<BrunoField> family;
  std::optional<Decomposition> D;
  json options = json::object();
};

namespace detail {

inline auto ptr(const std::string &base, const std::string &key) -> std::string { return base + "/" + key; }
inline auto ptr(const std::string &base, std::size_t i) -> std::string { return base + "/" + std::to_string(i); }

inline auto rational_of(const json &j, const std::string &at) -> Rational {
  try {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
  } catch (const InvalidInput &e) {
    throw SpecError(at, e.what());
  }
  throw SpecError(at, "expected a rational (\"a/b\" string or integer)");
}

inline auto field_of(const json &j, const std::string &at) -> const Field * {
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "Q") return Field::rationals();
    if (s == "Q(i)") return Field::gaussian();
    throw SpecError(at, "unknown field '" + s + "' (use \"Q\", \"Q(i)\" or a minpoly object)");
  }
  if (!j.is_object() || !j.contains("minpoly") || !j.contains("root"))
    throw SpecError(at, "field object needs \"minpoly\" and \"root\"");
  std::vector<Rational> mp;
  const json &m = j.at("minpoly");
  if (!m.is_array()) throw SpecError(ptr(at, "minpoly"), "expected an array");
  for (std::size_t i = 0; i < m.size(); ++i) mp.push_back(rational_of(m[i], ptr(ptr(at, "minpoly"), i)));
  const json &r = j.at("root");
  if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
    throw SpecError(ptr(at, "root"), "expected [re, im]");
  std::optional<int> cp;
  if (j.contains("conj_pow")) {
    if (!j.at("conj_pow").is_number_integer()) throw SpecError(ptr(at, "conj_pow"), "expected an integer");
    cp = j.at("conj_pow").get<int>();
  }
  try {
    return Field::number_field(mp, {r[0].get<double>(), r[1].get<double>()}, cp);
  } catch (const Error &e) {
    throw SpecError(at, e.what());
  }
}

inline auto scalar_of(const json &j, const Field *f, const std::string &at) -> Scalar {
  if (!j.is_array()) return Scalar(f, rational_of(j, at));
  if (static_cast<int>(j.size()) > f->degree())
    throw SpecError(at, "coefficient list longer than the field degree " + std::to_string(f->degree()));
  std::vector<Rational> c(f->degree());
  for (std::size_t i = 0; i < j.size(); ++i) c[i] = rational_of(j[i], ptr(at, i));
  return Scalar(f, c);
}

inline auto vector_of(const json &j, const Field *f, const std::string &at) -> std::vector<Scalar> {
  if (!j.is_array() || j.empty()) throw SpecError(at, "expected a nonempty array of scalars");
  std::vector<Scalar> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(scalar_of(j[i], f, ptr(at, i)));
  return v;
}

inline auto field_from(const json &doc, const Field *f, int N, const std::string &at) -> BrunoField {
  if (!doc.contains("lambda")) throw SpecError(at, "missing \"lambda\"");
  auto lambda = vector_of(doc.at("lambda"), f, ptr(at, "lambda"));
  const int n = static_cast<int>(lambda.size());
  std::vector<MonomialEntry> entries;
  if (doc.contains("terms")) {
    const json &t = doc.at("terms");
    if (!t.is_array()) throw SpecError(ptr(at, "terms"), "expected an array");
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::string p = ptr(ptr(at, "terms"), i);
      const json &e = t[i];
      if (!e.is_object() || !e.contains("coeff") || !e.contains("monomial") || !e.contains("component"))
        throw SpecError(p, "term needs \"coeff\", \"monomial\" and \"component\"");
      const json &m = e.at("monomial");
      if (!m.is_array() || static_cast<int>(m.size()) != n)
        throw SpecError(ptr(p, "monomial"), "expected " + std::to_string(n) + " exponents");
      std::vector<int> mv;
      for (auto &x : m) {
        if (!x.is_number_integer()) throw SpecError(ptr(p, "monomial"), "exponents must be integers");
        mv.push_back(x.get<int>());
      }
      if (!e.at("component").is_number_integer()) throw SpecError(ptr(p, "component"), "expected an integer");
      int k = e.at("component").get<int>();
      if (k < 1 || k > n) throw SpecError(ptr(p, "component"), "must be in 1.." + std::to_string(n));
      entries.push_back({scalar_of(e.at("coeff"), f, ptr(p, "coeff")), mv, k - 1});
    }
  }
  try {
    return from_monomials(f, n, N, lambda, entries);
  } catch (const Error &e) {
    throw SpecError(at, e.what());
  }
}

}  // namespace detail

inline auto parse_problem(const std::string &text) -> Problem {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw SpecError("byte " + std::to_string(e.byte), e.what());
  }
  if (!doc.is_object()) throw SpecError("", "top level must be an object");
  Problem p;
  if (doc.contains("field")) p.field = detail::field_of(doc.at("field"), "/field");
  if (!doc.contains("order") || !doc.at("order").is_number_integer()) throw SpecError("/order", "missing integer order");
  p.N = doc.at("order").get<int>();
  if (p.N < 1 || p.N > 64) throw SpecError("/order", "must be in 1..64");
  if (doc.contains("lambda")) p.F = detail::field_from(doc, p.field, p.N, "");
  if (doc.contains("family")) {
    const json &fam = doc.at("family");
    if (!fam.is_array() || fam.empty()) throw SpecError("/family", "expected a nonempty array");
    for (std::size_t i = 0; i < fam.size(); ++i)
      p.family.push_back(detail::field_from(fam[i], p.field, p.N, detail::ptr("/family", i)));
  }
  if (!p.F && p.family.empty()) throw SpecError("", "need \"lambda\" or \"family\"");
  if (doc.contains("decomposition")) {
    const json &d = doc.at("decomposition");
    if (!p.F) throw SpecError("/decomposition", "a decomposition needs a single field");
    try {
      if (d == "A2") {
        p.D = a2_decomposition(p.F->lambda());
      } else if (d == "cyclic") {
        p.D = cyclotomic_decomposition(p.F->lambda());
      } else {
        if (!d.is_object() || !d.contains("parts") || !d.contains("gamma"))
          throw SpecError("/decomposition", "expected \"A2\", \"cyclic\" or {\"parts\", \"gamma\"}");
        Decomposition D;
        const json &parts = d.at("parts");
        if (!parts.is_array()) throw SpecError("/decomposition/parts", "expected an array");
        for (std::size_t j = 0; j < parts.size(); ++j)
          D.parts.push_back(detail::vector_of(parts[j], p.field, detail::ptr("/decomposition/parts", j)));
        D.gamma = detail::vector_of(d.at("gamma"), p.field, "/decomposition/gamma");
        validate_decomposition(p.F->lambda(), D);
        p.D = D;
      }
    } catch (const SpecError &) {
      throw;
    } catch (const Error &e) {
      throw SpecError("/decomposition", e.what());
    }
  }
  if (doc.contains("options")) {
    if (!doc.at("options").is_object()) throw SpecError("/options", "expected an object");
    p.options = doc.at("options");
  }
  return p;
}

// ---------------------------------------------------------------- output

inline auto to_json(const Rational &q) -> json { return q.get_str(); }

inline auto to_json(const Scalar &s) -> json {
  if (s.is_rational()) return s.rational_value().get_str();
  json a = json::array();
  for (int j = 0; j < s.field()->degree(); ++j) a.push_back(s.coeff(j).get_str());
  return a;
}

inline auto to_json(const std::vector<Scalar> &v) -> json {
  json a = json::array();
  for (auto &s : v) a.push_back(to_json(s));
  return a;
}

inline auto to_json(const Exponent &q) -> json { return q.to_vector(); }

inline auto field_json(const Field *f) -> json {
  if (f == Field::rationals()) return "Q";
  if (f == Field::gaussian()) return "Q(i)";
  json o;
  json mp = json::array();
  for (auto &c : f->minpoly()) mp.push_back(c.get_str());
  o["minpoly"] = mp;
  o["root"] = {f->selector().real(), f->selector().imag()};
  if (f->conj_pow()) o["conj_pow"] = *f->conj_pow();
  return o;
}

// monomial form c x^m e_k, the input format
inline auto terms_json(const TermMap &t) -> json {
  json a = json::array();
  for (auto &[q, c] : t)
    for (int k = 0; k < t.dim(); ++k) {
      if (c[k].is_zero()) continue;
      auto m = q.to_vector();
      m[k] += 1;
      a.push_back({{"coeff", to_json(c[k])}, {"monomial", m}, {"component", k + 1}});
    }
  return a;
}

// Bruno form (x.F_Q) x^Q
inline auto bruno_json(const TermMap &t) -> json {
  json a = json::array();
  for (auto &[q, c] : t) a.push_back({{"Q", to_json(q)}, {"F", to_json(c)}});
  return a;
}

// a problem document that parses back to the same field
inline auto field_document(const BrunoField &F) -> json {
  json o;
  o["field"] = field_json(F.field());
  o["order"] = F.trunc_order();
  o["lambda"] = to_json(F.lambda());
  o["terms"] = terms_json(F.terms());
  return o;
}

namespace detail {

// 17 significant digits, rounded toward +inf (up) or -inf
inline auto decimal17(const Rational &q, bool up) -> std::string {
  if (sgn(q) == 0) return "0";
  Rational a = abs(q);
  bool neg = sgn(q) < 0;
  bool away = up != neg;  // round the magnitude away from zero
  int e = static_cast<int>(std::floor(std::log10(a.get_d())));
  auto digits = [&](int ex) {
    Rational scaled = a;
    Integer ten(10);
    Integer p;
    mpz_pow_ui(p.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(std::abs(16 - ex)));
    if (16 - ex >= 0)
      scaled *= Rational(p);
    else
      scaled /= Rational(p);
    Integer r;
    if (away)
      mpz_cdiv_q(r.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    else
      mpz_fdiv_q(r.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    return r.get_str();
  };
  std::string d = digits(e);
  if (d.size() > 17) {
    ++e;
    d = digits(e);
  } else if (d.size() < 17) {
    --e;
    d = digits(e);
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "e%+03d", e);
  return std::string(neg ? "-" : "") + d.substr(0, 1) + "." + d.substr(1) + buf;
}

}  // namespace detail

inline auto upper(const Rational &q) -> json { return "<= " + detail::decimal17(q, true); }
inline auto lower(const Rational &q) -> json { return ">= " + detail::decimal17(q, false); }
inline auto upper(double x) -> json {
  char buf[40];
  std::snprintf(buf, sizeof buf, "<= %.17g", x);
  return std::string(buf);
}
inline auto interval_json(const Interval &v) -> json { return {{"lo", lower(v.lo)}, {"hi", upper(v.hi)}}; }

// indented text rendering of a report tree
inline void render_text(const json &j, std::string &out, int indent = 0) {
  std::string pad(indent, ' ');
  auto scalar_line = [](const json &v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  auto flat = [](const json &v) {
    if (!v.is_array()) return false;
    for (auto &x : v)
      if (x.is_object() || (x.is_array() && !x.empty() && x[0].is_structured())) return false;
    return true;
  };
  if (j.is_object()) {
    for (auto &[k, v] : j.items()) {
      if (v.is_structured() && !flat(v) && !v.empty()) {
        out += pad + k + ":\n";
        render_text(v, out, indent + 2);
      } else {
        out += pad + k + ": " + (v.is_structured() ? v.dump() : scalar_line(v)) + "\n";
      }
    }
  } else if (j.is_array()) {
    for (auto &v : j) {
      if (v.is_object()) {
        std::string sub;
        render_text(v, sub, indent + 2);
        sub.replace(indent, 2, "- ");
        out += sub;
      } else {
        out += pad + "- " + (v.is_structured() ? v.dump() : scalar_line(v)) + "\n";
      }
    }
  } else {
    out += pad + scalar_line(j) + "\n";
  }
}

}  // namespace nfkit::io
