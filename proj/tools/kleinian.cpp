#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kleinian/cli.hpp"

namespace {

bool parse_box(const std::string& text, kleinian::Box& box) {
  std::istringstream in(text);
  char c1 = 0, c2 = 0;
  long long k = 0, l = 0, b = 0;
  if (!(in >> k >> c1 >> l >> c2 >> b) || c1 != ',' || c2 != ',' || k < 0 || l < 0 || b < 0) return false;
  box = {k, l, b};
  return in.peek() == EOF;
}

bool parse_size(const std::string& text, std::pair<std::size_t, std::size_t>& size) {
  auto x = text.find_first_of("xX");
  if (x == std::string::npos) return false;
  try {
    std::size_t used = 0;
    long long w = std::stoll(text.substr(0, x), &used);
    if (used != x) return false;
    long long h = std::stoll(text.substr(x + 1), &used);
    if (used != text.size() - x - 1 || w <= 0 || h <= 0) return false;
    size = {static_cast<std::size_t>(w), static_cast<std::size_t>(h)};
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

bool write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out << bytes;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace kleinian;
  CLI::App app{"Hyperbolic toral groups in PSL(3,C): construction, verification, limit sets, recognition"};
  app.require_subcommand(1);

  cli::RunConfig cfg;
  std::string box_text = "8,0,20", render_text;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spec", cfg.spec_path, "Input JSON: group spec, generator list or limit-set export");
    sub->add_option("--out", cfg.out_path, "Output path (default: stdout)");
    sub->add_option("--seed", cfg.seed, "Seed for all randomness")->capture_default_str();
    sub->add_option("--tol", cfg.tol, "Distance tolerance for the limit-set summary")->capture_default_str();
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  };
  auto add_box = [&](CLI::App* sub) {
    sub->add_option("--box", box_text, "Enumeration box K,L,B: |k| <= K, |l| <= L, |b_i| <= B")->capture_default_str();
    sub->add_option("--render", render_text, "Also write a PPM raster of size WxH");
  };

  auto* construct = app.add_subcommand("construct", "Validate a spec and export its generators");
  add_common(construct);
  auto* verify = app.add_subcommand("verify-lemmas", "Check the period calculus identities on seeded random inputs");
  add_common(verify);
  verify->add_option("--trials", cfg.trials, "Random trials per check")->capture_default_str();
  verify->add_flag("--inject-phi-sign-fault", cfg.inject_phi_sign_fault)->group("");
  auto* limit = app.add_subcommand("limit-set", "Approximate the limit set by orbit accumulation");
  add_common(limit);
  add_box(limit);
  auto* recognize = app.add_subcommand("recognize", "Decide whether generators define a hyperbolic toral group");
  add_common(recognize);
  auto* render = app.add_subcommand("render", "Rasterize a limit-set slice");
  add_common(render);
  add_box(render);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : cli::kInputError;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();

  auto usage_error = [&](const std::string& what) {
    std::cerr << "error: " << what << "\n";
    return cli::kInputError;
  };
  if (!parse_box(box_text, cfg.box)) return usage_error("--box expects K,L,B with non-negative integers");
  if (!render_text.empty()) {
    std::pair<std::size_t, std::size_t> size;
    if (!parse_size(render_text, size)) return usage_error("--render expects WxH");
    cfg.render = size;
  }
  if (!(cfg.tol > 0)) return usage_error("--tol must be positive");

  cli::Outcome out;
  try {
    out = cli::run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kVerificationFailed;
  }
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& [path, bytes] : out.files)
    if (!write_file(path, bytes)) return usage_error("cannot write '" + path + "'");
  if (!out.output.empty()) {
    if (cfg.out_path.empty() || out.to_stdout)
      std::cout << out.output;
    else if (!write_file(cfg.out_path, out.output))
      return usage_error("cannot write '" + cfg.out_path + "'");
  }
  return out.exit_code;
}
