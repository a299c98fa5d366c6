#pragma once

#include <fstream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kleinian/io.hpp"
#include "kleinian/limit_set.hpp"
#include "kleinian/recognition.hpp"
#include "kleinian/verify.hpp"

namespace kleinian::cli {

enum Exit : int { kOk = 0, kVerificationFailed = 1, kInputError = 2, kNegativeVerdict = 3 };

struct RunConfig {
  std::string subcommand;
  std::string spec_path;  // spec, generator list or limit-set export, depending on the subcommand
  std::string out_path;   // empty: stdout
  Box box{8, 0, 20};
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  double tol = 1e-3;
  std::optional<std::pair<std::size_t, std::size_t>> render;  // width × height
  std::string format = "json";
  bool inject_phi_sign_fault = false;  // test hook for verify-lemmas
};

/// What a command produced. `files` are (path, bytes) pairs still to be written.
struct Outcome {
  int exit_code = kOk;
  std::string output;  // main document; goes to out_path or stdout
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<std::string> warnings;
  bool to_stdout = false;  // output ignores out_path (which then names a file above)
};

inline Json config_echo(const RunConfig& c, const std::optional<Json>& input) {
  Json j{{"subcommand", c.subcommand},
         {"spec", c.spec_path},
         {"out", c.out_path},
         {"box", to_json(c.box)},
         {"trials", c.trials},
         {"seed", c.seed},
         {"tol", c.tol},
         {"format", c.format}};
  j["render"] = c.render ? Json::array({c.render->first, c.render->second}) : Json();
  if (c.inject_phi_sign_fault) j["inject_phi_sign_fault"] = true;
  if (input) j["input"] = *input;
  return Json{{"config", j}, {"versions", versions()}};
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline Json error_json(const Error& e) {
  return Json{{"code", std::string(to_string(e.code()))}, {"message", e.detail()}};
}

inline Json read_json_file(const std::string& path) {
  if (path.empty()) throw Error(ErrorCode::ParseError, "no input file (use --spec)");
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

inline Outcome input_error(const RunConfig& c, const std::optional<Json>& input, const Error& e) {
  Json doc = config_echo(c, input);
  doc["error"] = error_json(e);
  return {kInputError, dump(doc), {}, {}};
}

inline std::shared_ptr<const ToralGroupSpec> load_spec(const Json& j) {
  return std::make_shared<const ToralGroupSpec>(spec_from_json(j.contains("spec") ? j["spec"] : j));
}

// ---------------------------------------------------------------------------

/// Validates a spec and writes it back normalized, with its exact generators.
inline Outcome cmd_construct(const RunConfig& c) {
  std::optional<Json> input;
  try {
    input = read_json_file(c.spec_path);
    auto spec = load_spec(*input);
    Json doc = config_echo(c, input);
    doc["spec"] = to_json(*spec);
    Json gens = Json::array();
    for (const auto& g : standard_generators(spec)) gens.push_back(to_json(g));
    doc["generators"] = gens;
    EigenData e = eigen_data(spec->A);
    doc["sanity"] = Json{{"hyperbolic", true},
                         {"trace", io::integer(spec->A.trace())},
                         {"lambda", to_string(e.lambda)},
                         {"commuting", spec->A * spec->B == spec->B * spec->A},
                         {"verified_word_bound", spec->verified_word_bound}};
    return {kOk, dump(doc), {}, {}};
  } catch (const Error& e) {
    return input_error(c, input, e);
  }
}

/// tec1 identities, normal-form round trips and closure against matrix products.
inline Outcome cmd_verify_lemmas(const RunConfig& c) {
  std::optional<Json> input;
  std::shared_ptr<const ToralGroupSpec> spec;
  try {
    if (c.spec_path.empty()) {
      spec = std::make_shared<const ToralGroupSpec>(ToralGroupSpec::gamma_a(IntMatrix2(2, 1, 1, 1)));
    } else {
      input = read_json_file(c.spec_path);
      spec = load_spec(*input);
    }
  } catch (const Error& e) {
    return input_error(c, input, e);
  }
  Outcome out;
  if (c.trials == 0) out.warnings.push_back("zero trials: every check passes vacuously");
  // Γ_A has no B of its own; its normal form is taken over A with a random ν.
  const bool own_b = spec->family == ToralFamily::GammaABnu;
  Rng pick(c.seed + 3);
  const IntMatrix2& B = own_b ? spec->B : spec->A;
  const RationalVec2 nu = own_b ? spec->nu : random_rational_point(pick);
  std::vector<CheckTally> checks{check_tec1(c.seed, c.trials, c.inject_phi_sign_fault ? phi_with_sign_fault : phi),
                                 check_normal_form(c.seed, c.trials, B, nu), check_closure(c.seed, c.trials, spec)};
  Json doc = config_echo(c, input);
  doc["spec"] = to_json(*spec);
  Json list = Json::array();
  bool all = true;
  std::optional<Json> first;
  for (const auto& t : checks) {
    list.push_back(to_json(t));
    all = all && t.ok();
    if (!first && t.counterexample) first = Json{{"check", t.name}, {"example", *t.counterexample}};
  }
  doc["checks"] = list;
  doc["status"] = all ? "pass" : "fail";
  if (first) doc["first_counterexample"] = *first;
  if (!out.warnings.empty()) doc["warnings"] = out.warnings;
  out.exit_code = all ? kOk : kVerificationFailed;
  out.output = dump(doc);
  return out;
}

/// The interior probes used for the separation statistic: each component of Ω
/// at imaginary heights 0.1, 0.5 and 1, so at chart distance ≥ 0.1 from Λ.
inline std::vector<ProjectivePoint<Complex>> separation_probes() {
  std::vector<ProjectivePoint<Complex>> out;
  for (double h : {0.1, 0.5, 1.0})
    for (int e1 : {1, -1})
      for (int e2 : {1, -1}) out.emplace_back(Complex(0, e1 * h), Complex(0, e2 * h), Complex(1.0));
  return out;
}

inline constexpr double kSeparationRadius = 0.05;

inline Json limit_set_summary(const LimitSetApprox& approx, const OmegaModel& model, double tol) {
  SoundnessReport s = soundness(approx, model, tol);
  std::size_t near = 0;
  for (const auto& p : separation_probes()) near += points_near(approx, p, kSeparationRadius);
  return Json{{"accumulation_points", s.total},
              {"within_tolerance", s.within},
              {"fraction_within_tolerance", s.fraction()},
              {"tolerance", tol},
              {"worst_distance", s.worst},
              {"separation_probes", separation_probes().size()},
              {"separation_radius", kSeparationRadius},
              {"points_near_probes", near}};
}

inline SliceSpec slice_for(const RunConfig& c) {
  SliceSpec s;
  s.width = c.render->first;
  s.height = c.render->second;
  return s;
}

inline std::string empty_slice_warning(const SliceSpec& s) {
  std::ostringstream o;
  o << "no accumulation points on the slice |Im w - " << s.im_w << "| <= " << s.band
    << "; the raster is blank (try a larger box)";
  return o.str();
}

inline std::string ppm_path(const RunConfig& c) {
  if (c.out_path.empty()) return c.subcommand == "render" ? "render.ppm" : "limit_set.ppm";
  if (c.subcommand == "render") return c.out_path;
  return c.out_path + ".ppm";
}

inline Outcome cmd_limit_set(const RunConfig& c) {
  std::optional<Json> input;
  std::shared_ptr<const ToralGroupSpec> spec;
  try {
    input = read_json_file(c.spec_path);
    spec = load_spec(*input);
    if (!(c.tol > 0)) throw Error(ErrorCode::ParseError, "tolerance must be positive");
  } catch (const Error& e) {
    return input_error(c, input, e);
  }
  Json meta = config_echo(c, input);
  LimitSetApprox approx;
  try {
    approx = accumulate_orbit(spec, c.box, omega_samples(c.seed));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyEnumeration) throw;
    meta["error"] = error_json(e);
    return {kVerificationFailed, dump(meta), {}, {}};
  }
  OmegaModel model = OmegaModel::for_spec(spec);
  meta["summary"] = limit_set_summary(approx, model, c.tol);
  Outcome out;
  if (c.format == "csv") {
    out.output = to_csv(approx, meta);
  } else {
    Json doc = meta;
    doc["limit_set"] = to_json(approx, model);
    out.output = dump(doc);
  }
  if (c.render) {
    Image img = render_slice(approx, slice_for(c));
    if (img.plotted == 0) out.warnings.push_back(empty_slice_warning(slice_for(c)));
    out.files.emplace_back(ppm_path(c), img.to_ppm());
  }
  return out;
}

/// Rebuilds the cloud from a limit-set JSON export (or recomputes it from a spec)
/// and rasterizes the slice Im w = 0.5.
inline Outcome cmd_render(const RunConfig& c) {
  std::optional<Json> input;
  LimitSetApprox approx;
  RunConfig rc = c;
  if (!rc.render) rc.render = std::pair<std::size_t, std::size_t>{256, 256};
  try {
    input = read_json_file(c.spec_path);
    if (input->contains("limit_set")) {
      for (const auto& p : (*input)["limit_set"].at("points")) {
        Vec3<Complex> v;
        for (std::size_t i = 0; i < 3; ++i) v[i] = Complex(p["coords"][i][0].get<double>(), p["coords"][i][1].get<double>());
        auto prov = p["provenance"].get<std::string>();
        approx.points.push_back({ProjectivePoint<Complex>(v),
                                 prov == "L0" ? Provenance::L0 : prov == "L1" ? Provenance::L1 : Provenance::L2,
                                 p["witness"].get<std::string>(), p["source"].get<int>(), p["hits"].get<std::size_t>()});
      }
    } else {
      approx = accumulate_orbit(load_spec(*input), c.box, omega_samples(c.seed));
    }
  } catch (const nlohmann::json::exception& e) {
    return input_error(c, input, Error(ErrorCode::ParseError, e.what()));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EmptyEnumeration) {
      Json meta = config_echo(rc, std::nullopt);
      meta["error"] = error_json(e);
      return {kVerificationFailed, dump(meta), {}, {}};
    }
    return input_error(c, input, e);
  }
  Image img = render_slice(approx, slice_for(rc));
  Json meta = config_echo(rc, std::nullopt);
  const SliceSpec slice = slice_for(rc);
  meta["image"] = Json{{"path", ppm_path(rc)},
                       {"width", img.width},
                       {"height", img.height},
                       {"slice", Json{{"im_w", slice.im_w}, {"band", slice.band}}},
                       {"points", approx.points.size()},
                       {"plotted", img.plotted}};
  Outcome out{kOk, "", {{ppm_path(rc), img.to_ppm()}}, {}};
  if (img.plotted == 0) out.warnings.push_back(empty_slice_warning(slice));
  out.output = dump(meta);
  out.to_stdout = true;
  return out;
}

/// Runs the recognition pipeline on a generator list.
inline Outcome cmd_recognize(const RunConfig& c, const RecognitionOptions& opt = {}) {
  std::optional<Json> input;
  std::vector<Mat3<QuadExt>> gens;
  try {
    input = read_json_file(c.spec_path);
    gens = generators_from_json(*input);
  } catch (const Error& e) {
    return input_error(c, input, e);
  }
  Json doc = config_echo(c, input);
  try {
    RecognitionResult r = recognize(gens, opt);
    doc["result"] = to_json(r);
    return {r.verdict == Verdict::NotToral ? kNegativeVerdict : kOk, dump(doc), {}, {}};
  } catch (const Error& e) {
    doc["error"] = error_json(e);
    return {kInputError, dump(doc), {}, {}};
  }
}

inline Outcome run(const RunConfig& c) {
  if (c.subcommand == "construct") return cmd_construct(c);
  if (c.subcommand == "verify-lemmas") return cmd_verify_lemmas(c);
  if (c.subcommand == "limit-set") return cmd_limit_set(c);
  if (c.subcommand == "render") return cmd_render(c);
  if (c.subcommand == "recognize") return cmd_recognize(c);
  return input_error(c, std::nullopt, Error(ErrorCode::ParseError, "unknown subcommand '" + c.subcommand + "'"));
}

}  // namespace kleinian::cli
