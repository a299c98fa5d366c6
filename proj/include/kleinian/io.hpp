#pragma once

#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <boost/version.hpp>
#include <json.hpp>

#include "kleinian/error.hpp"
#include "kleinian/group.hpp"
#include "kleinian/limit_set.hpp"
#include "kleinian/recognition.hpp"
#include "kleinian/toral.hpp"

namespace kleinian {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";

/// Library versions for the metadata block of every output.
inline Json versions() {
  return Json{{"kleinian", kVersion},
              {"boost", BOOST_LIB_VERSION},
              {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

namespace io {

[[noreturn]] inline void bad(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

inline Json integer(const Integer& v) {
  if (v >= INT64_MIN && v <= INT64_MAX) return v.convert_to<std::int64_t>();
  return v.str();
}

inline Integer integer_from(const Json& j, const std::string& what) {
  if (j.is_number_integer()) return Integer(j.get<std::int64_t>());
  if (j.is_string()) {
    Rational r = parse_rational(j.get<std::string>());
    if (!is_integral(r)) bad(what + ": '" + j.get<std::string>() + "' is not an integer");
    return numerator(r);
  }
  bad(what + ": expected an integer");
}

inline std::int64_t int64_from(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) bad(what + ": expected an integer");
  return j.get<std::int64_t>();
}

/// Rationals travel as strings "p/q"; plain JSON integers are accepted on input.
inline Rational rational_from(const Json& j, const std::string& what) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  bad(what + ": expected a rational string");
}

inline QuadExt quadext_from(const Json& j, const std::string& what) {
  if (j.is_number_integer()) return QuadExt(Rational(j.get<std::int64_t>()));
  if (j.is_string()) return parse_quadext(j.get<std::string>());
  bad(what + ": expected a number string");
}

}  // namespace io

inline Json to_json(const RationalVec2& v) { return Json::array({to_string(v.x), to_string(v.y)}); }

inline RationalVec2 vec2_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) io::bad(what + ": expected two entries");
  return {io::rational_from(j[0], what), io::rational_from(j[1], what)};
}

inline Json to_json(const IntMatrix2& m) {
  return Json::array({Json::array({io::integer(m.a()), io::integer(m.b())}),
                      Json::array({io::integer(m.c()), io::integer(m.d())})});
}

inline IntMatrix2 int_matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || !j[1].is_array() || j[0].size() != 2 ||
      j[1].size() != 2)
    io::bad(what + ": expected a 2×2 integer matrix");
  return IntMatrix2(io::integer_from(j[0][0], what), io::integer_from(j[0][1], what), io::integer_from(j[1][0], what),
                    io::integer_from(j[1][1], what));
}

template <class S>
Json to_json(const Mat3<S>& m) {
  Json rows = Json::array();
  for (const auto& r : m) rows.push_back(Json::array({to_string(r[0]), to_string(r[1]), to_string(r[2])}));
  return rows;
}

inline Mat3<QuadExt> mat3_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) io::bad(what + ": expected a 3×3 matrix");
  Mat3<QuadExt> m;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j[i].is_array() || j[i].size() != 3) io::bad(what + ": expected a 3×3 matrix");
    for (std::size_t k = 0; k < 3; ++k) m[i][k] = io::quadext_from(j[i][k], what);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Specs and elements

inline Json to_json(const ToralGroupSpec& s) {
  Json j{{"family", std::string(to_string(s.family))}, {"A", to_json(s.A)}};
  if (s.family == ToralFamily::GammaABnu) {
    j["B"] = to_json(s.B);
    j["nu"] = to_json(s.nu);
    j["verified_word_bound"] = s.verified_word_bound;
  }
  return j;
}

/// Parses and validates {"family", "A", "B", "nu"}. Validation errors keep their
/// own codes (NotHyperbolic, NonCommuting, InvalidSpec, NotUnimodular).
inline ToralGroupSpec spec_from_json(const Json& j) {
  if (!j.is_object()) io::bad("spec: expected an object");
  if (!j.contains("A")) io::bad("spec: missing \"A\"");
  std::string family = j.value("family", j.contains("B") ? "gamma_ab_nu" : "gamma_a");
  IntMatrix2 A = int_matrix_from_json(j["A"], "A");
  if (family == "gamma_a") return ToralGroupSpec::gamma_a(A);
  if (family != "gamma_ab_nu") io::bad("spec: unknown family '" + family + "'");
  if (!j.contains("B") || !j.contains("nu")) io::bad("spec: gamma_ab_nu needs \"B\" and \"nu\"");
  int bound = ToralGroupSpec::kDefaultWordBound;
  if (j.contains("verified_word_bound")) bound = static_cast<int>(io::int64_from(j["verified_word_bound"], "bound"));
  return ToralGroupSpec::gamma_ab_nu(A, int_matrix_from_json(j["B"], "B"), vec2_from_json(j["nu"], "nu"), bound);
}

inline Json to_json(const ToralElement& g) {
  return Json{{"k", g.k()}, {"l", g.l()}, {"b", to_json(g.b())}};
}

inline ToralElement element_from_json(std::shared_ptr<const ToralGroupSpec> spec, const Json& j) {
  if (!j.is_object()) io::bad("element: expected an object");
  return ToralElement(std::move(spec), io::int64_from(j.value("k", Json(0)), "k"),
                      io::int64_from(j.value("l", Json(0)), "l"), vec2_from_json(j.at("b"), "b"));
}

/// A generator file is either a bare list of 3×3 matrices or an object with a
/// "generators" list.
inline std::vector<Mat3<QuadExt>> generators_from_json(const Json& j) {
  const Json& list = j.is_object() ? j.value("generators", Json()) : j;
  if (!list.is_array() || list.empty()) io::bad("generators: expected a non-empty list of 3×3 matrices");
  std::vector<Mat3<QuadExt>> out;
  for (std::size_t i = 0; i < list.size(); ++i) out.push_back(mat3_from_json(list[i], "generator " + std::to_string(i + 1)));
  return out;
}

// ---------------------------------------------------------------------------
// Verification witnesses

inline Json to_json(const DeltaWitness& w) {
  Json deltas = Json::array();
  for (const auto& d : w.delta) deltas.push_back(to_json(d));
  return Json{{"B", to_json(w.B)}, {"nu", to_json(w.nu)}, {"l", w.l},       {"s", w.s},
              {"per", w.per},      {"S", io::integer(w.S)}, {"K", w.K},     {"r", w.r},
              {"n_tilde", w.n_tilde}, {"t", w.t},          {"delta", deltas}};
}

// ---------------------------------------------------------------------------
// Recognition

inline Json to_json(const AffineDiag& g) {
  return Json{{"m1", to_string(g.m1)}, {"m2", to_string(g.m2)}, {"x", to_string(g.x)}, {"y", to_string(g.y)}};
}

inline Json to_json(const FoundWord& w) {
  return Json{{"word", word_to_string(w.word)}, {"element", to_json(w.element)}};
}

inline Json to_json(const RecognitionResult& r) {
  Json j{{"verdict", std::string(to_string(r.verdict))}};
  if (!r.reason.empty()) j["reason"] = r.reason;
  if (r.spec) j["spec"] = to_json(*r.spec);
  j["index_bound"] = r.index_bound;
  if (r.T) j["T"] = to_json(*r.T);
  if (r.p1) j["p1"] = r.p1->to_string();
  if (r.p2) j["p2"] = r.p2->to_string();
  if (r.lox) j["loxodromic"] = to_json(*r.lox);
  if (r.par) j["parabolic"] = to_json(*r.par);
  if (r.par_witness) {
    const auto& p = *r.par_witness;
    j["par_lattice"] = Json{{"words", Json::array({to_json(p.words[0]), to_json(p.words[1])})},
                            {"basis", Json::array({Json::array({to_string(p.basis[0][0]), to_string(p.basis[0][1])}),
                                                   Json::array({to_string(p.basis[1][0]), to_string(p.basis[1][1])})})},
                            {"par_elements_seen", p.par_elements_seen},
                            {"closure_rounds", p.closure_rounds}};
  }
  if (r.elat) {
    const auto& e = *r.elat;
    auto gens = [](const std::vector<ELatGenerator>& v) {
      Json a = Json::array();
      for (const auto& g : v) a.push_back(Json{{"word", word_to_string(g.word.word)}, {"signs", g.signs}});
      return a;
    };
    Json signs = Json::array();
    for (const auto& s : e.sign_group) signs.push_back(s);
    j["elat"] = Json{{"rank", e.rank},
                     {"generators", gens(e.generators)},
                     {"positive", gens(e.positive)},
                     {"sign_group", signs}};
  }
  if (r.elat) {
    j["notes"] = Json::array(
        {"index discrepancy: two published bounds for this index differ (at most 4 and at most 8); index_bound is "
         "the certified value, counting the sign group of eLat with no factor for swapping the fixed lines",
         "eLat is generated by the diagonal parts of the input generators, which is complete because the "
         "diagonal map is a homomorphism"});
  }
  j["word_bound"] = r.word_bound;
  j["elements_explored"] = r.elements_explored;
  j["truncated"] = r.truncated;
  return j;
}

// ---------------------------------------------------------------------------
// Limit sets

inline Json to_json(const Box& b) { return Json::array({b.k, b.l, b.b}); }

inline std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

inline Json to_json(const LimitSetApprox& a, const OmegaModel& model) {
  Json pts = Json::array();
  for (const auto& p : a.points) {
    const auto& v = p.point.coords();
    Json coords = Json::array();
    for (const auto& c : v) coords.push_back(Json::array({c.real(), c.imag()}));
    pts.push_back(Json{{"coords", coords},
                       {"provenance", std::string(to_string(p.provenance))},
                       {"witness", p.witness},
                       {"source", p.source},
                       {"hits", p.hits},
                       {"lambda_distance", predicted_lambda_distance(p.point, model)}});
  }
  return Json{{"parameters",
               {{"box", to_json(a.params.box)},
                {"samples", a.params.samples},
                {"disks", a.params.disks},
                {"disk_radius", a.params.disk_radius},
                {"cluster", a.params.cluster},
                {"cluster_hits", a.params.cluster_hits},
                {"elements", a.elements}}},
              {"l0_note", a.l0_note},
              {"counts", {{"L0", a.count(Provenance::L0)}, {"L1", a.count(Provenance::L1)}, {"L2", a.count(Provenance::L2)}}},
              {"points", pts}};
}

/// CSV rows: Re z, Im z, Re w, Im w in the chart [z : w : 1] (inf at infinity),
/// provenance, witness. Header lines starting with '#' carry the metadata.
inline std::string to_csv(const LimitSetApprox& a, const Json& metadata, const Tolerances& tol = default_tolerances()) {
  std::ostringstream os;
  os << "# " << metadata.dump() << "\n";
  os << "re_z,im_z,re_w,im_w,provenance,witness\n";
  for (const auto& p : a.points) {
    const auto& v = p.point.coords();
    if (std::abs(v[2]) < tol.infinity) {
      os << "inf,inf,inf,inf";
    } else {
      Complex z = v[0] / v[2], w = v[1] / v[2];
      os << format_double(z.real()) << "," << format_double(z.imag()) << "," << format_double(w.real()) << ","
         << format_double(w.imag());
    }
    os << "," << to_string(p.provenance) << ",\"" << p.witness << "\"\n";
  }
  return os.str();
}

inline Json to_json(const ProbeReport& r) {
  const auto& c = r.probe.center.coords();
  Json centre = Json::array();
  for (const auto& x : c) centre.push_back(Json::array({x.real(), x.imag()}));
  return Json{{"center", centre},
              {"radius", r.probe.radius},
              {"verdict", std::string(to_string(r.verdict))},
              {"max_ratio", r.max_ratio},
              {"worst", r.worst},
              {"profile", r.profile}};
}

}  // namespace kleinian
