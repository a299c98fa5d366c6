#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "kleinian/group.hpp"
#include "kleinian/io.hpp"
#include "kleinian/toral.hpp"

namespace kleinian {

/// Seeded draws that do not depend on the standard library's distributions, so
/// a seed gives the same stream with every toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  /// Uniform in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(gen_() % span);
  }
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

/// Hyperbolic B ∈ SL(2,ℤ) with 2 < |tr B| ≤ max_trace.
inline IntMatrix2 random_hyperbolic(Rng& rng, std::int64_t max_trace = 10) {
  while (true) {
    std::int64_t a = rng.uniform(-max_trace, max_trace), b = rng.uniform(-max_trace, max_trace);
    std::int64_t c = rng.uniform(-max_trace, max_trace);
    if (a == 0 || (1 + b * c) % a != 0) continue;
    std::int64_t d = (1 + b * c) / a;
    std::int64_t tr = a + d;
    if (std::abs(tr) <= 2 || std::abs(tr) > max_trace) continue;
    return IntMatrix2(a, b, c, d);
  }
}

/// ν with denominator order S(ν) ≤ max_order.
inline RationalVec2 random_rational_point(Rng& rng, std::int64_t max_order = 6) {
  std::int64_t S = rng.uniform(1, max_order);
  return {Rational(rng.uniform(0, S - 1), S), Rational(rng.uniform(0, S - 1), S)};
}

struct Tec1Instance {
  IntMatrix2 B;
  RationalVec2 nu;
  std::int64_t l = 0, s = 0;
};

/// A random input to tec1_witness admitting the non-degenerate decomposition:
/// Per(B,ν) ≥ 2, 0 < l ≤ max_l with l ≢ 0 mod Per, and 0 < s < Per.
inline Tec1Instance random_tec1_instance(Rng& rng, std::int64_t max_trace = 10, std::int64_t max_order = 6,
                                         std::int64_t max_l = 200) {
  while (true) {
    Tec1Instance in{random_hyperbolic(rng, max_trace), random_rational_point(rng, max_order), 0, 0};
    const std::int64_t P = period(in.B, in.nu);
    if (P < 2) continue;
    do in.l = rng.uniform(1, max_l);
    while (in.l % P == 0);
    in.s = rng.uniform(1, P - 1);
    return in;
  }
}

inline ToralElement random_element(Rng& rng, const std::shared_ptr<const ToralGroupSpec>& spec, std::int64_t kmax = 6,
                                   std::int64_t bmax = 50) {
  std::int64_t l = spec->family == ToralFamily::GammaA ? 0 : rng.uniform(-kmax, kmax);
  return ToralElement(spec, rng.uniform(-kmax, kmax), l,
                      RationalVec2(Rational(rng.uniform(-bmax, bmax)), Rational(rng.uniform(-bmax, bmax))));
}

/// Outcome of one family of checks; the first failure is kept as a counterexample.
struct CheckTally {
  std::string name;
  std::size_t passed = 0, failed = 0;
  std::optional<Json> counterexample;

  void fail(Json example) {
    ++failed;
    if (!counterexample) counterexample = std::move(example);
  }
  bool ok() const { return failed == 0; }
};

inline Json to_json(const CheckTally& t) {
  Json j{{"name", t.name}, {"passed", t.passed}, {"failed", t.failed}, {"status", t.ok() ? "pass" : "fail"}};
  if (t.counterexample) j["counterexample"] = *t.counterexample;
  return j;
}

/// δ₁..δ₇ integral and the three identities, on seeded random instances.
inline CheckTally check_tec1(std::uint64_t seed, std::size_t trials, PhiFn phi_fn = phi) {
  CheckTally t;
  t.name = "tec1";
  Rng rng(seed);
  for (std::size_t i = 0; i < trials; ++i) {
    Tec1Instance in = random_tec1_instance(rng);
    try {
      tec1_witness(in.B, in.nu, in.l, in.s, phi_fn);
      ++t.passed;
    } catch (const Error& e) {
      t.fail(Json{{"trial", i}, {"B", to_json(in.B)}, {"nu", to_json(in.nu)}, {"l", in.l}, {"s", in.s},
                  {"error", e.what()}});
    }
  }
  return t;
}

/// b + φ(B,ν,l) = β + Σ m_j Bʲν with the normal form recomputed independently.
inline CheckTally check_normal_form(std::uint64_t seed, std::size_t trials, const IntMatrix2& B, const RationalVec2& nu) {
  CheckTally t;
  t.name = "normal_form";
  Rng rng(seed + 1);
  const Integer S = denominator_order(nu);
  for (std::size_t i = 0; i < trials; ++i) {
    std::int64_t l = rng.uniform(-60, 60);
    RationalVec2 b(Rational(rng.uniform(-50, 50)), Rational(rng.uniform(-50, 50)));
    Json ex{{"trial", i}, {"B", to_json(B)}, {"nu", to_json(nu)}, {"l", l}, {"b", to_json(b)}};
    try {
      NormalForm nf = normal_form(B, l, b, nu);
      RationalVec2 sum = nf.beta;
      RationalVec2 term = nu;
      bool in_range = true;
      for (const auto& m : nf.m) {
        in_range = in_range && m >= 0 && m < S;
        sum += Rational(m) * term;
        term = B * term;
      }
      if (!in_range || !nf.beta.is_integral() || sum != b + phi(B, nu, l)) {
        ex["normal_form_beta"] = to_json(nf.beta);
        t.fail(ex);
      } else {
        ++t.passed;
      }
    } catch (const Error& e) {
      ex["error"] = e.what();
      t.fail(ex);
    }
  }
  return t;
}

/// Closed-form a·c and a·c⁻¹ against the 3×3 matrix products, with b₃, b₄ integral.
inline CheckTally check_closure(std::uint64_t seed, std::size_t trials, const std::shared_ptr<const ToralGroupSpec>& spec) {
  CheckTally t;
  t.name = "closure";
  Rng rng(seed + 2);
  for (std::size_t i = 0; i < trials; ++i) {
    ToralElement a = random_element(rng, spec), c = random_element(rng, spec);
    Json ex{{"trial", i}, {"a", to_json(a)}, {"c", to_json(c)}};
    try {
      QuotientTerms q = quotient_terms(a, c);
      bool ok = q.b3.is_integral() && q.b4.is_integral();
      ok = ok && compose(a, c, true).matrix() == a.matrix() * kleinian::inverse(c.matrix());
      ok = ok && compose(a, c, false).matrix() == a.matrix() * c.matrix();
      if (ok) {
        ++t.passed;
      } else {
        ex["b3"] = to_json(q.b3);
        ex["b4"] = to_json(q.b4);
        t.fail(ex);
      }
    } catch (const Error& e) {
      ex["error"] = e.what();
      t.fail(ex);
    }
  }
  return t;
}

}  // namespace kleinian
