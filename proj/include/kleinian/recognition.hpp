#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kleinian/config.hpp"
#include "kleinian/error.hpp"
#include "kleinian/group.hpp"
#include "kleinian/linalg.hpp"
#include "kleinian/matrix.hpp"
#include "kleinian/projective.hpp"
#include "kleinian/scalar.hpp"
#include "kleinian/toral.hpp"

namespace kleinian {

// ---------------------------------------------------------------------------
// Words

/// A group word. Letter 2i stands for generator g_{i+1}, letter 2i+1 for its inverse.
using Word = std::vector<int>;

inline Word word_inverse(const Word& w) {
  Word r(w.rbegin(), w.rend());
  for (auto& a : r) a ^= 1;
  return r;
}

/// Concatenation with free cancellation at the seam.
inline Word word_concat(Word a, const Word& b) {
  for (int letter : b) {
    if (!a.empty() && a.back() == (letter ^ 1))
      a.pop_back();
    else
      a.push_back(letter);
  }
  return a;
}

inline Word word_power(const Word& w, const Integer& n) {
  Word base = n < 0 ? word_inverse(w) : w;
  Word out;
  for (Integer i = 0; i < abs(n); ++i) out = word_concat(out, base);
  return out;
}

/// "g1 g2^-1 g3^2"; the empty word is "e".
inline std::string word_to_string(const Word& w) {
  if (w.empty()) return "e";
  std::string out;
  for (std::size_t i = 0; i < w.size();) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    long run = static_cast<long>(j - i) * ((w[i] & 1) ? -1 : 1);
    if (!out.empty()) out += ' ';
    out += "g" + std::to_string(w[i] / 2 + 1);
    if (run != 1) out += "^" + std::to_string(run);
    i = j;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Elements in normalized coordinates

/// [[m₁, 0, x], [0, m₂, y], [0, 0, 1]]: the shape of every map fixing e₁ and e₂,
/// scaled so the corner entry is 1.
struct AffineDiag {
  QuadExt m1{1}, m2{1}, x{0}, y{0};

  static AffineDiag identity() { return {}; }

  friend AffineDiag operator*(const AffineDiag& a, const AffineDiag& b) {
    return {a.m1 * b.m1, a.m2 * b.m2, a.m1 * b.x + a.x, a.m2 * b.y + a.y};
  }
  AffineDiag inverse() const {
    QuadExt i1 = QuadExt(1) / m1, i2 = QuadExt(1) / m2;
    return {i1, i2, QuadExt(0) - i1 * x, QuadExt(0) - i2 * y};
  }
  AffineDiag pow(const Integer& n) const {
    AffineDiag base = n < 0 ? inverse() : *this;
    Integer e = abs(n);
    AffineDiag acc;
    while (e > 0) {
      if ((e & 1) != 0) acc = acc * base;
      base = base * base;
      e >>= 1;
    }
    return acc;
  }
  friend bool operator==(const AffineDiag& a, const AffineDiag& b) {
    return a.m1 == b.m1 && a.m2 == b.m2 && a.x == b.x && a.y == b.y;
  }

  bool is_translation() const { return m1 == QuadExt(1) && m2 == QuadExt(1); }
  bool is_identity() const { return is_translation() && x == QuadExt(0) && y == QuadExt(0); }

  Mat3<QuadExt> matrix() const {
    return Mat3<QuadExt>{{{m1, QuadExt(0), x}, {QuadExt(0), m2, y}, {QuadExt(0), QuadExt(0), QuadExt(1)}}};
  }
  /// Π₁: induced map on ℓ₁ = {w₁ = 0} in the frame (e₂, e₃).
  MoebiusMap<QuadExt> pi1() const { return MoebiusMap<QuadExt>(m2, y, QuadExt(0), QuadExt(1)); }
  /// Π₂: induced map on ℓ₂ = {w₂ = 0} in the frame (e₁, e₃).
  MoebiusMap<QuadExt> pi2() const { return MoebiusMap<QuadExt>(m1, x, QuadExt(0), QuadExt(1)); }

  std::string key() const {
    return to_string(m1) + "|" + to_string(m2) + "|" + to_string(x) + "|" + to_string(y);
  }
};

// ---------------------------------------------------------------------------
// Normalization

/// Generators conjugated so that the common fixed pair becomes (e₁, e₂).
struct StabilizedGroup {
  std::vector<Mat3<QuadExt>> input;
  std::vector<AffineDiag> generators;
  ProjectivePoint<QuadExt> p1 = ProjectivePoint<QuadExt>::basis(0);
  ProjectivePoint<QuadExt> p2 = ProjectivePoint<QuadExt>::basis(1);
  ProjectivePoint<QuadExt> p3 = ProjectivePoint<QuadExt>::basis(2);
  Mat3<QuadExt> C = identity3<QuadExt>();      // columns p₁, p₂, p₃
  Mat3<QuadExt> C_inv = identity3<QuadExt>();  // normalized = C⁻¹ g C
};

namespace detail {

inline bool point_precedes(const ProjectivePoint<QuadExt>& a, const ProjectivePoint<QuadExt>& b) {
  auto last = [](const ProjectivePoint<QuadExt>& p) {
    for (std::size_t i = 3; i-- > 0;)
      if (p[i] != QuadExt(0)) return i;
    return std::size_t{0};
  };
  std::size_t la = last(a), lb = last(b);
  if (la != lb) return la < lb;
  for (std::size_t i = 0; i < 3; ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

inline Mat3<QuadExt> lift(const Mat3<Rational>& m) {
  Mat3<QuadExt> r{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r[i][j] = QuadExt(m[i][j]);
  return r;
}

}  // namespace detail

inline StabilizedGroup normalize_stabilizer(const std::vector<Mat3<QuadExt>>& gens) {
  if (gens.empty()) throw Error(ErrorCode::NoCommonFixedPair, "no generators");
  std::vector<Subspace<QuadExt>> common{Subspace<QuadExt>{{{QuadExt(1), QuadExt(0), QuadExt(0)},
                                                            {QuadExt(0), QuadExt(1), QuadExt(0)},
                                                            {QuadExt(0), QuadExt(0), QuadExt(1)}}}};
  for (std::size_t g = 0; g < gens.size(); ++g) {
    if (det(gens[g]) == QuadExt(0)) throw Error(ErrorCode::Singular, "generator g" + std::to_string(g + 1));
    auto own = fixed_subspaces(gens[g]);
    std::vector<Subspace<QuadExt>> next;
    for (const auto& u : common)
      for (const auto& w : own)
        if (auto s = intersect_subspaces(u, w)) next.push_back(*s);
    common = simplify_union(next);
    std::size_t points = 0;
    bool infinite = false;
    for (const auto& s : common) {
      if (s.dim() >= 2) infinite = true;
      else ++points;
    }
    if (!infinite && points < 2)
      throw Error(ErrorCode::NoCommonFixedPair, "fixed pair lost at generator g" + std::to_string(g + 1));
  }

  std::vector<ProjectivePoint<QuadExt>> candidates;
  auto consider = [&](const ProjectivePoint<QuadExt>& p) {
    for (const auto& q : candidates)
      if (q == p) return;
    candidates.push_back(p);
  };
  for (const auto& s : common) {
    if (s.dim() == 1) {
      consider(ProjectivePoint<QuadExt>(s.basis[0]));
    } else if (s.dim() == 2) {
      for (const auto& p : line_basis(ProjectiveLine<QuadExt>(s.normal()))) consider(p);
    } else {
      consider(ProjectivePoint<QuadExt>::basis(0));
      consider(ProjectivePoint<QuadExt>::basis(1));
    }
  }
  std::sort(candidates.begin(), candidates.end(), detail::point_precedes);

  StabilizedGroup G;
  G.input = gens;
  G.p1 = candidates[0];
  G.p2 = candidates[1];
  for (std::size_t i = 0; i < 3; ++i) {
    auto e = ProjectivePoint<QuadExt>::basis(i);
    if (det(from_columns(G.p1.coords(), G.p2.coords(), e.coords())) != QuadExt(0)) {
      G.p3 = e;
      break;
    }
  }
  G.C = from_columns(G.p1.coords(), G.p2.coords(), G.p3.coords());
  G.C_inv = inverse(G.C);
  for (std::size_t g = 0; g < gens.size(); ++g) {
    Mat3<QuadExt> n = G.C_inv * gens[g] * G.C;
    QuadExt s = n[2][2];
    for (auto& row : n)
      for (auto& v : row) v = v / s;
    if (n[1][0] != QuadExt(0) || n[2][0] != QuadExt(0) || n[0][1] != QuadExt(0) || n[2][1] != QuadExt(0))
      throw Error(ErrorCode::NoCommonFixedPair, "generator g" + std::to_string(g + 1) + " moves the fixed pair");
    G.generators.push_back({n[0][0], n[1][1], n[0][2], n[1][2]});
  }
  return G;
}

inline StabilizedGroup normalize_stabilizer(const std::vector<Mat3<Rational>>& gens) {
  std::vector<Mat3<QuadExt>> lifted;
  for (const auto& g : gens) lifted.push_back(detail::lift(g));
  return normalize_stabilizer(lifted);
}

// ---------------------------------------------------------------------------
// Word search

/// The ball of the Cayley graph, grown one layer at a time. Each element is
/// stored once, under its shortlex-least word.
class WordBall {
 public:
  explicit WordBall(const StabilizedGroup& G, std::size_t max_elements = 200000)
      : G_(&G), max_elements_(max_elements) {
    elements_.push_back(AffineDiag::identity());
    parent_.push_back(-1);
    letter_.push_back(-1);
    index_.emplace(elements_[0].key(), 0);
    layer_start_ = {0, 1};
    for (const auto& g : G.generators) {
      letters_.push_back(g);
      letters_.push_back(g.inverse());
    }
  }

  int radius() const { return static_cast<int>(layer_start_.size()) - 2; }
  bool truncated() const { return truncated_; }
  std::size_t size() const { return elements_.size(); }
  const AffineDiag& element(std::size_t i) const { return elements_[i]; }
  const AffineDiag& letter_element(int letter) const { return letters_[static_cast<std::size_t>(letter)]; }
  const StabilizedGroup& group() const { return *G_; }

  /// Elements of word length exactly r occupy [layer_begin(r), layer_end(r)).
  std::size_t layer_begin(int r) const { return layer_start_[static_cast<std::size_t>(r)]; }
  std::size_t layer_end(int r) const { return layer_start_[static_cast<std::size_t>(r) + 1]; }

  Word word(std::size_t i) const {
    Word w;
    for (auto j = static_cast<std::ptrdiff_t>(i); parent_[static_cast<std::size_t>(j)] >= 0;
         j = parent_[static_cast<std::size_t>(j)])
      w.push_back(letter_[static_cast<std::size_t>(j)]);
    std::reverse(w.begin(), w.end());
    return w;
  }

  /// Adds the next layer; returns false when the element cap stops growth.
  bool grow() {
    if (truncated_) return false;
    std::size_t begin = layer_start_[layer_start_.size() - 2], end = layer_start_.back();
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t a = 0; a < letters_.size(); ++a) {
        AffineDiag e = elements_[i] * letters_[a];
        auto key = e.key();
        if (index_.count(key)) continue;
        if (elements_.size() >= max_elements_) {
          truncated_ = true;
          layer_start_.push_back(elements_.size());
          return false;
        }
        index_.emplace(std::move(key), elements_.size());
        elements_.push_back(std::move(e));
        parent_.push_back(static_cast<std::ptrdiff_t>(i));
        letter_.push_back(static_cast<int>(a));
      }
    }
    layer_start_.push_back(elements_.size());
    return true;
  }

  void grow_to(int r) {
    while (radius() < r && grow()) {
    }
  }

  AffineDiag evaluate(const Word& w) const {
    AffineDiag acc;
    for (int a : w) acc = acc * letters_[static_cast<std::size_t>(a)];
    return acc;
  }

 private:
  const StabilizedGroup* G_;
  std::size_t max_elements_;
  std::vector<AffineDiag> letters_;
  std::vector<AffineDiag> elements_;
  std::vector<std::ptrdiff_t> parent_;
  std::vector<int> letter_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> layer_start_;
  bool truncated_ = false;
};

struct FoundWord {
  Word word;
  AffineDiag element;
};

inline bool is_double_loxodromic(const AffineDiag& g) {
  return classify_moebius(g.pi1()) == MoebiusClass::Loxodromic &&
         classify_moebius(g.pi2()) == MoebiusClass::Loxodromic;
}
inline bool is_double_parabolic(const AffineDiag& g) {
  return classify_moebius(g.pi1()) == MoebiusClass::Parabolic &&
         classify_moebius(g.pi2()) == MoebiusClass::Parabolic;
}
/// Member of Par(Γ₀): both restrictions parabolic or the identity.
inline bool is_par(const AffineDiag& g) {
  auto ok = [](MoebiusClass c) { return c == MoebiusClass::Identity || c == MoebiusClass::Parabolic; };
  return ok(classify_moebius(g.pi1())) && ok(classify_moebius(g.pi2()));
}

/// First word in shortlex order whose two restrictions are loxodromic. If the
/// ball has none, products of one-sided loxodromics are tried.
inline FoundWord find_double_loxodromic(WordBall& ball, int word_bound) {
  if (word_bound < 1) throw Error(ErrorCode::NotFoundWithinBound, "word bound must be ≥ 1");
  std::optional<FoundWord> side1, side2;
  for (int r = 1; r <= word_bound; ++r) {
    ball.grow_to(r);
    if (ball.radius() < r) break;
    for (std::size_t i = ball.layer_begin(r); i < ball.layer_end(r); ++i) {
      const auto& g = ball.element(i);
      if (is_double_loxodromic(g)) return {ball.word(i), g};
      bool l1 = classify_moebius(g.pi1()) == MoebiusClass::Loxodromic;
      bool l2 = classify_moebius(g.pi2()) == MoebiusClass::Loxodromic;
      if (l1 && !side1) side1 = FoundWord{ball.word(i), g};
      if (l2 && !side2) side2 = FoundWord{ball.word(i), g};
    }
  }
  if (side1 && side2) {
    for (int a = 1; a <= 2; ++a)
      for (int b = 1; b <= 2; ++b) {
        AffineDiag g = side1->element.pow(a) * side2->element.pow(b);
        if (is_double_loxodromic(g))
          return {word_concat(word_power(side1->word, a), word_power(side2->word, b)), g};
      }
  }
  throw Error(ErrorCode::NotFoundWithinBound,
              "no element with both restrictions loxodromic up to word length " + std::to_string(word_bound));
}

inline FoundWord find_double_loxodromic(const StabilizedGroup& G, int word_bound) {
  WordBall ball(G);
  return find_double_loxodromic(ball, word_bound);
}

/// First word in shortlex order whose two restrictions are parabolic; failing
/// that, the commutators κ_j = γ_L γ_j γ_L⁻¹ γ_j⁻¹ and their pairwise products.
inline FoundWord find_double_parabolic(WordBall& ball, const FoundWord& lox, int word_bound) {
  bool any_par = false;
  for (int r = 1; r <= word_bound; ++r) {
    ball.grow_to(r);
    if (ball.radius() < r) break;
    for (std::size_t i = ball.layer_begin(r); i < ball.layer_end(r); ++i) {
      const auto& g = ball.element(i);
      if (g.is_translation()) any_par = true;
      if (is_double_parabolic(g)) return {ball.word(i), g};
    }
  }
  std::vector<FoundWord> kappas;
  const auto n = static_cast<int>(ball.group().generators.size());
  for (int j = 0; j < n; ++j) {
    Word gj{2 * j};
    Word w = word_concat(word_concat(word_concat(lox.word, gj), word_inverse(lox.word)), word_inverse(gj));
    AffineDiag k = lox.element * ball.letter_element(2 * j) * lox.element.inverse() * ball.letter_element(2 * j + 1);
    if (k.is_identity()) continue;
    any_par = true;
    if (is_double_parabolic(k)) return {w, k};
    kappas.push_back({w, k});
  }
  for (std::size_t a = 0; a < kappas.size(); ++a)
    for (std::size_t b = a + 1; b < kappas.size(); ++b) {
      AffineDiag k = kappas[a].element * kappas[b].element;
      if (is_double_parabolic(k)) return {word_concat(kappas[a].word, kappas[b].word), k};
    }
  throw Error(ErrorCode::NotFoundWithinBound,
              std::string(any_par ? "" : "Par rank deficient: ") +
                  "no element with both restrictions parabolic up to word length " + std::to_string(word_bound));
}

inline FoundWord find_double_parabolic(const StabilizedGroup& G, const FoundWord& lox, int word_bound) {
  WordBall ball(G);
  return find_double_parabolic(ball, lox, word_bound);
}

// ---------------------------------------------------------------------------
// Lattices with word bookkeeping

namespace detail {

/// A lattice vector in rational frame coordinates, together with a group
/// element realizing it and a word for that element.
struct LatticeVec {
  std::array<Rational, 2> c;
  FoundWord w;
};

inline LatticeVec combine(const LatticeVec& a, const LatticeVec& b, const Integer& q) {
  // a − q·b
  LatticeVec r;
  r.c = {a.c[0] - Rational(q) * b.c[0], a.c[1] - Rational(q) * b.c[1]};
  r.w.word = word_concat(a.w.word, word_power(b.w.word, -q));
  r.w.element = a.w.element * b.w.element.pow(-q);
  return r;
}

/// A subgroup of ℚ² kept in echelon form: row r1 has c[0] ≠ 0, row r2 has c[0] = 0.
/// Vectors reduced to zero are reported to `on_zero` (they are kernel elements).
class EchelonLattice {
 public:
  template <class OnZero>
  bool insert(LatticeVec v, OnZero&& on_zero) {
    if (contains(v.c)) {
      if (v.c[0] == 0 && v.c[1] == 0) on_zero(v);
      return false;
    }
    if (v.c[0] != 0) {
      if (!r1_) {
        r1_ = std::move(v);
        return true;
      }
      LatticeVec a = *r1_;
      while (v.c[0] != 0) {
        Integer q = floor(a.c[0] / v.c[0]);
        a = combine(a, v, q);
        std::swap(a, v);
      }
      r1_ = std::move(a);
    }
    if (v.c[1] == 0) {
      on_zero(v);
      return true;
    }
    if (!r2_) {
      r2_ = std::move(v);
      return true;
    }
    LatticeVec a = *r2_;
    while (v.c[1] != 0) {
      Integer q = floor(a.c[1] / v.c[1]);
      a = combine(a, v, q);
      std::swap(a, v);
    }
    r2_ = std::move(a);
    on_zero(v);
    return true;
  }

  bool contains(const std::array<Rational, 2>& c) const {
    Rational x = c[0], y = c[1];
    if (x != 0) {
      if (!r1_) return false;
      Rational t = x / r1_->c[0];
      if (!is_integral(t)) return false;
      y -= t * r1_->c[1];
    }
    if (y == 0) return true;
    if (!r2_) return false;
    return is_integral(y / r2_->c[1]);
  }

  std::vector<LatticeVec> basis() const {
    std::vector<LatticeVec> b;
    if (r1_) b.push_back(*r1_);
    if (r2_) b.push_back(*r2_);
    return b;
  }

 private:
  std::optional<LatticeVec> r1_, r2_;
};

inline QuadExt round_nearest(const QuadExt& q) { return QuadExt(Rational(floor(q + QuadExt(Rational(1, 2))))); }

}  // namespace detail

/// Reduced basis of the translation lattice Lat(Par(Γ₀)) together with words.
struct ParWitness {
  std::array<FoundWord, 2> words;
  std::array<std::array<QuadExt, 2>, 2> lat;  // Lat images (γ₁₃, γ₂₃) of the two words
  Mat2<QuadExt> basis;                        // columns = lat[0], lat[1]
  std::size_t par_elements_seen = 0;
  std::size_t closure_rounds = 0;
};

/// Lat images of every Par element in the ball, closed under conjugation by the
/// generators, reduced to a basis (echelon form, then Gauss reduction).
inline ParWitness extract_par_lattice(WordBall& ball, int word_bound) {
  ball.grow_to(word_bound);
  const auto& G = ball.group();
  ParWitness out;

  // Frame: the first two ℝ-independent Lat images.
  std::vector<std::array<QuadExt, 2>> frame;
  auto coords = [&](const std::array<QuadExt, 2>& v) -> std::optional<std::array<Rational, 2>> {
    std::array<QuadExt, 2> c;
    if (frame.size() == 2) {
      QuadExt d = frame[0][0] * frame[1][1] - frame[1][0] * frame[0][1];
      c[0] = (v[0] * frame[1][1] - v[1] * frame[1][0]) / d;
      c[1] = (frame[0][0] * v[1] - frame[0][1] * v[0]) / d;
    } else {
      // v must be a multiple of frame[0]
      const auto& f = frame[0];
      if (v[0] * f[1] - v[1] * f[0] != QuadExt(0)) return std::nullopt;
      c[0] = f[0] != QuadExt(0) ? v[0] / f[0] : v[1] / f[1];
      c[1] = QuadExt(0);
    }
    if (!c[0].is_rational() || !c[1].is_rational())
      throw Error(ErrorCode::CertificationFailed, "Par lattice not discrete: irrational frame coordinates");
    return std::array<Rational, 2>{c[0].rational_part(), c[1].rational_part()};
  };

  detail::EchelonLattice lattice;
  auto ignore = [](const detail::LatticeVec&) {};
  auto add = [&](const FoundWord& fw) {
    std::array<QuadExt, 2> v{fw.element.x, fw.element.y};
    if (frame.empty()) frame.push_back(v);
    auto c = coords(v);
    if (!c) {
      frame.push_back(v);
      c = coords(v);
    }
    return lattice.insert(detail::LatticeVec{*c, fw}, ignore);
  };

  for (std::size_t i = 1; i < ball.size(); ++i) {
    const auto& g = ball.element(i);
    if (!g.is_translation()) continue;
    ++out.par_elements_seen;
    add({ball.word(i), g});
  }
  if (frame.empty())
    throw Error(ErrorCode::RankDeficient, "Par rank deficient: no parabolic elements up to word length " +
                                              std::to_string(word_bound));

  // Par is normal: conjugating by a generator multiplies Lat by its diagonal.
  for (int round = 0; round < 16; ++round) {
    bool grew = false;
    for (const auto& b : lattice.basis())
      for (std::size_t a = 0; a < 2 * G.generators.size(); ++a) {
        const AffineDiag& g = ball.letter_element(static_cast<int>(a));
        Word gw{static_cast<int>(a)};
        FoundWord conj{word_concat(word_concat(gw, b.w.word), word_inverse(gw)), g * b.w.element * g.inverse()};
        grew = add(conj) || grew;
      }
    out.closure_rounds = static_cast<std::size_t>(round) + 1;
    if (!grew) break;
    if (round == 15) throw Error(ErrorCode::CertificationFailed, "Par lattice not closed under conjugation");
  }
  auto basis = lattice.basis();
  if (basis.size() < 2)
    throw Error(ErrorCode::RankDeficient, "Par rank deficient: all Lat images collinear up to word length " +
                                              std::to_string(word_bound));

  // Gauss reduction in the Euclidean norm of Lat images.
  auto real = [&](const detail::LatticeVec& v) {
    return std::array<QuadExt, 2>{frame[0][0] * QuadExt(v.c[0]) + frame[1][0] * QuadExt(v.c[1]),
                                  frame[0][1] * QuadExt(v.c[0]) + frame[1][1] * QuadExt(v.c[1])};
  };
  auto dot = [&](const detail::LatticeVec& a, const detail::LatticeVec& b) {
    auto u = real(a), v = real(b);
    return u[0] * v[0] + u[1] * v[1];
  };
  auto lex_less = [&](const detail::LatticeVec& a, const detail::LatticeVec& b) {
    auto u = real(a), v = real(b);
    return u[0] != v[0] ? u[0] < v[0] : u[1] < v[1];
  };
  detail::LatticeVec b1 = basis[0], b2 = basis[1];
  for (;;) {
    QuadExt n1 = dot(b1, b1), n2 = dot(b2, b2);
    if (n2 < n1 || (n2 == n1 && lex_less(b2, b1))) std::swap(b1, b2);
    QuadExt mu = detail::round_nearest(dot(b1, b2) / dot(b1, b1));
    if (mu == QuadExt(0)) break;
    b2 = detail::combine(b2, b1, numerator(mu.rational_part()));
  }
  auto flip = [](detail::LatticeVec& v) {
    v.c = {-v.c[0], -v.c[1]};
    v.w.word = word_inverse(v.w.word);
    v.w.element = v.w.element.inverse();
  };
  auto r1 = real(b1);
  if (r1[0] < QuadExt(0) || (r1[0] == QuadExt(0) && r1[1] < QuadExt(0))) flip(b1);
  r1 = real(b1);
  auto r2 = real(b2);
  if (r1[0] * r2[1] - r1[1] * r2[0] < QuadExt(0)) flip(b2);

  out.words = {b1.w, b2.w};
  out.lat = {real(b1), real(b2)};
  out.basis = Mat2<QuadExt>{{{out.lat[0][0], out.lat[1][0]}, {out.lat[0][1], out.lat[1][1]}}};
  return out;
}

inline ParWitness extract_par_lattice(const StabilizedGroup& G, int word_bound) {
  WordBall ball(G);
  return extract_par_lattice(ball, word_bound);
}

// ---------------------------------------------------------------------------
// eLat

struct ELatGenerator {
  FoundWord word;
  std::array<int, 2> signs{1, 1};
  std::array<double, 2> log{0, 0};
};

struct ELatResult {
  std::vector<ELatGenerator> generators;  // basis of the log-image lattice
  std::vector<ELatGenerator> positive;    // basis of the subgroup with positive diagonal
  std::vector<std::array<int, 2>> sign_group;
  int rank = 0;
  int index_bound = 1;
};

namespace detail {

inline std::array<int, 2> signs_of(const AffineDiag& g) { return {g.m1.sign(), g.m2.sign()}; }
inline std::array<double, 2> log_of(const AffineDiag& g) {
  return {std::log(std::abs(g.m1.to_double())), std::log(std::abs(g.m2.to_double()))};
}
inline bool is_unit_diag(const AffineDiag& g) {
  auto one = [](const QuadExt& m) { return m == QuadExt(1) || m == QuadExt(-1); };
  return one(g.m1) && one(g.m2);
}

}  // namespace detail

/// eLat(Γ₀) is generated by the diagonals of the generators (eLat is a
/// homomorphism). Their log-images are reduced to a lattice basis; a relation
/// found in floating point is accepted only after exact verification.
inline ELatResult extract_elat(const StabilizedGroup& G, const ParWitness& /*par*/,
                               const Tolerances& tol = default_tolerances()) {
  ELatResult out;
  std::vector<std::array<double, 2>> frame;
  std::vector<AffineDiag> frame_elements;
  // torsion elements (log-image zero), keyed by sign pattern
  std::vector<std::pair<std::array<int, 2>, FoundWord>> torsion{{{1, 1}, FoundWord{{}, AffineDiag{}}}};
  auto add_torsion = [&](const FoundWord& t) {
    auto s = detail::signs_of(t.element);
    std::vector<std::pair<std::array<int, 2>, FoundWord>> grown = torsion;
    auto have = [&](const std::array<int, 2>& p) {
      for (const auto& e : grown)
        if (e.first == p) return true;
      return false;
    };
    bool changed = true;
    if (!have(s)) grown.push_back({s, t});
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < grown.size(); ++i)
        for (std::size_t j = 0; j < grown.size(); ++j) {
          std::array<int, 2> p{grown[i].first[0] * grown[j].first[0], grown[i].first[1] * grown[j].first[1]};
          if (have(p)) continue;
          grown.push_back({p, {word_concat(grown[i].second.word, grown[j].second.word),
                               grown[i].second.element * grown[j].second.element}});
          changed = true;
        }
    }
    torsion = grown;
  };

  // Sign group of all of Γ₀.
  std::vector<std::array<int, 2>> signs{{1, 1}};
  auto close_signs = [&](std::array<int, 2> s) {
    bool changed = true;
    if (std::find(signs.begin(), signs.end(), s) == signs.end()) signs.push_back(s);
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < signs.size(); ++i)
        for (std::size_t j = 0; j < signs.size(); ++j) {
          std::array<int, 2> p{signs[i][0] * signs[j][0], signs[i][1] * signs[j][1]};
          if (std::find(signs.begin(), signs.end(), p) == signs.end()) {
            signs.push_back(p);
            changed = true;
          }
        }
    }
  };

  auto frame_coords = [&](const std::array<double, 2>& v) -> std::optional<std::array<double, 2>> {
    if (frame.size() == 2) {
      double d = frame[0][0] * frame[1][1] - frame[1][0] * frame[0][1];
      return std::array<double, 2>{(v[0] * frame[1][1] - v[1] * frame[1][0]) / d,
                                   (frame[0][0] * v[1] - frame[0][1] * v[0]) / d};
    }
    const auto& f = frame[0];
    double nf = std::hypot(f[0], f[1]), nv = std::hypot(v[0], v[1]);
    if (std::abs(v[0] * f[1] - v[1] * f[0]) > 1e-9 * nf * nv) return std::nullopt;
    return std::array<double, 2>{(v[0] * f[0] + v[1] * f[1]) / (nf * nf), 0.0};
  };

  detail::EchelonLattice lattice;
  auto on_zero = [&](const detail::LatticeVec& v) {
    if (!detail::is_unit_diag(v.w.element))
      throw Error(ErrorCode::NonDiscreteELat, "log relation does not hold exactly for " + word_to_string(v.w.word));
    add_torsion(v.w);
  };

  std::optional<std::array<double, 2>> first_log;
  for (std::size_t i = 0; i < G.generators.size(); ++i) {
    const AffineDiag& g = G.generators[i];
    FoundWord fw{{static_cast<int>(2 * i)}, g};
    close_signs(detail::signs_of(g));
    if (detail::is_unit_diag(g)) {
      add_torsion(fw);
      continue;
    }
    auto lg = detail::log_of(g);
    if (std::hypot(lg[0], lg[1]) < tol.discreteness)
      throw Error(ErrorCode::NonDiscreteELat, "log-image of g" + std::to_string(i + 1) + " within τ_disc of 0");
    if (!first_log) first_log = lg;
    if (frame.empty()) {
      frame.push_back(lg);
      frame_elements.push_back(g);
    }
    auto fc = frame_coords(lg);
    if (!fc) {
      frame.push_back(lg);
      frame_elements.push_back(g);
      fc = frame_coords(lg);
    }
    std::array<Rational, 2> c;
    for (std::size_t k = 0; k < 2; ++k) {
      auto q = rational_approx((*fc)[k], 1000, 1e-9);
      if (!q) throw Error(ErrorCode::NonDiscreteELat, "log-image of g" + std::to_string(i + 1) +
                                                          " has no small rational frame coordinates");
      c[k] = *q;
    }
    // exact check: g^q = f₁^{q c₀} f₂^{q c₁} up to signs
    Integer q = denominator(c[0]) * denominator(c[1]) / boost::multiprecision::gcd(denominator(c[0]), denominator(c[1]));
    AffineDiag lhs = g.pow(q);
    AffineDiag rhs = frame_elements[0].pow(numerator(c[0] * Rational(q)));
    if (frame_elements.size() > 1) rhs = rhs * frame_elements[1].pow(numerator(c[1] * Rational(q)));
    auto sq = [](const QuadExt& m) { return m * m; };
    if (sq(lhs.m1) != sq(rhs.m1) || sq(lhs.m2) != sq(rhs.m2))
      throw Error(ErrorCode::NonDiscreteELat, "log relation for g" + std::to_string(i + 1) + " not exact");
    lattice.insert(detail::LatticeVec{c, fw}, on_zero);
  }

  auto basis = lattice.basis();
  out.rank = static_cast<int>(basis.size());
  auto logv = [&](const detail::LatticeVec& v) {
    std::array<double, 2> r{0, 0};
    for (std::size_t k = 0; k < frame.size(); ++k) {
      r[0] += frame[k][0] * to_double(v.c[k]);
      r[1] += frame[k][1] * to_double(v.c[k]);
    }
    return r;
  };
  auto norm2 = [&](const detail::LatticeVec& v) {
    auto l = logv(v);
    return l[0] * l[0] + l[1] * l[1];
  };
  if (basis.size() == 2) {
    auto& b1 = basis[0];
    auto& b2 = basis[1];
    for (int it = 0; it < 1000; ++it) {
      if (norm2(b2) < norm2(b1)) std::swap(b1, b2);
      auto l1 = logv(b1), l2 = logv(b2);
      double mu = std::round((l1[0] * l2[0] + l1[1] * l2[1]) / norm2(b1));
      if (mu == 0) break;
      b2 = detail::combine(b2, b1, Integer(static_cast<long long>(mu)));
    }
  }
  for (auto& b : basis) {
    auto l = logv(b);
    if (std::hypot(l[0], l[1]) < tol.discreteness)
      throw Error(ErrorCode::NonDiscreteELat, "log-images accumulate within τ_disc of 0");
    double orient = first_log ? l[0] * (*first_log)[0] + l[1] * (*first_log)[1] : l[0];
    if (orient < 0 || (orient == 0 && l[0] < 0)) {
      b.c = {-b.c[0], -b.c[1]};
      b.w.word = word_inverse(b.w.word);
      b.w.element = b.w.element.inverse();
    }
    out.generators.push_back({b.w, detail::signs_of(b.w.element), logv(b)});
  }

  // Positive part: kernel of the sign map on ⟨basis⟩·torsion.
  auto torsion_for = [&](const std::array<int, 2>& s) -> const FoundWord* {
    for (const auto& t : torsion)
      if (t.first == s) return &t.second;
    return nullptr;
  };
  detail::EchelonLattice kernel;
  auto exponent_vec = [&](long a0, long a1) {
    FoundWord fw{{}, AffineDiag{}};
    if (a0) {
      fw.word = word_concat(fw.word, word_power(basis[0].w.word, a0));
      fw.element = fw.element * basis[0].w.element.pow(a0);
    }
    if (a1) {
      fw.word = word_concat(fw.word, word_power(basis[1].w.word, a1));
      fw.element = fw.element * basis[1].w.element.pow(a1);
    }
    if (const FoundWord* t = torsion_for(detail::signs_of(fw.element))) {
      fw.word = word_concat(fw.word, t->word);
      fw.element = fw.element * t->element;
      return std::optional<detail::LatticeVec>(detail::LatticeVec{{Rational(a0), Rational(a1)}, fw});
    }
    return std::optional<detail::LatticeVec>();
  };
  auto discard = [](const detail::LatticeVec&) {};
  for (long a0 = 0; a0 <= (basis.size() > 0 ? 2 : 0); ++a0)
    for (long a1 = 0; a1 <= (basis.size() > 1 ? 2 : 0); ++a1) {
      if (a0 == 0 && a1 == 0) continue;
      if (auto v = exponent_vec(a0, a1)) kernel.insert(*v, discard);
    }
  for (const auto& b : kernel.basis())
    out.positive.push_back({b.w, detail::signs_of(b.w.element), detail::log_of(b.w.element)});
  out.sign_group = signs;
  out.index_bound = static_cast<int>(signs.size());  // the two fixed points are never swapped
  return out;
}

// ---------------------------------------------------------------------------
// Certification

enum class Verdict { GammaALike, GammaABnuLike, NotToral };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::GammaALike: return "GammaA-like";
    case Verdict::GammaABnuLike: return "GammaABnu-like";
    case Verdict::NotToral: return "NotToral";
  }
  return "?";
}

struct RecognitionOptions {
  int word_bound = 8;
  std::size_t max_elements = 200000;
  Tolerances tol = default_tolerances();
};

struct RecognitionResult {
  Verdict verdict = Verdict::NotToral;
  std::string reason;
  std::optional<FoundWord> lox;
  std::optional<FoundWord> par;
  std::optional<ParWitness> par_witness;
  std::optional<ELatResult> elat;
  std::optional<Mat3<QuadExt>> T;  // input coordinates → toral coordinates
  std::optional<ToralGroupSpec> spec;
  int index_bound = 0;
  int word_bound = 0;
  bool truncated = false;
  std::size_t elements_explored = 0;
  std::optional<ProjectivePoint<QuadExt>> p1, p2;
};

namespace detail {

inline std::optional<Integer> as_integer(const QuadExt& q) {
  if (!q.is_rational() || !is_integral(q.rational_part())) return std::nullopt;
  return numerator(q.rational_part());
}

}  // namespace detail

inline RecognitionResult certify_toral(const StabilizedGroup& G, const FoundWord& lox, const FoundWord& par_word,
                                       const ParWitness& par, const ELatResult& elat) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::CertificationFailed, what); };
  QuadExt basis_det = det(par.basis);
  if (basis_det == QuadExt(0)) fail("lattice rank");
  if (elat.positive.empty()) fail("eLat rank 0");
  const AffineDiag& sigma = elat.positive[0].word.element;
  if (sigma.m1 == QuadExt(1) || sigma.m2 == QuadExt(1)) fail("eLat generator not doubly loxodromic");

  // origin at the fixed point of σ, frame = Lat basis
  std::array<QuadExt, 2> o{QuadExt(0) - sigma.x / (sigma.m1 - QuadExt(1)),
                           QuadExt(0) - sigma.y / (sigma.m2 - QuadExt(1))};
  Mat2<QuadExt> Vinv = inverse(par.basis);
  Mat3<QuadExt> R{{{Vinv[0][0], Vinv[0][1], QuadExt(0) - (Vinv[0][0] * o[0] + Vinv[0][1] * o[1])},
                   {Vinv[1][0], Vinv[1][1], QuadExt(0) - (Vinv[1][0] * o[0] + Vinv[1][1] * o[1])},
                   {QuadExt(0), QuadExt(0), QuadExt(1)}}};
  Mat3<QuadExt> R_inv = inverse(R);
  auto conj = [&](const AffineDiag& g) { return R * g.matrix() * R_inv; };

  struct Integral {
    IntMatrix2 linear;
    RationalVec2 translation;
  };
  auto read = [&](const AffineDiag& g, const std::string& name) -> Integral {
    Mat3<QuadExt> m = conj(g);
    std::array<Integer, 4> e;
    std::array<std::pair<std::size_t, std::size_t>, 4> at{{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};
    for (std::size_t k = 0; k < 4; ++k) {
      auto v = detail::as_integer(m[at[k].first][at[k].second]);
      if (!v) fail(name + ": linear part not integral in the lattice frame");
      e[k] = *v;
    }
    if (!m[0][2].is_rational() || !m[1][2].is_rational()) fail(name + ": translation not rational");
    if (e[0] * e[3] - e[1] * e[2] != 1) fail(name + ": linear part not in SL(2,ℤ)");
    return {IntMatrix2(e[0], e[1], e[2], e[3]), RationalVec2(m[0][2].rational_part(), m[1][2].rational_part())};
  };

  // Par basis → unit translations
  for (std::size_t i = 0; i < 2; ++i) {
    Mat3<QuadExt> m = conj(par.words[i].element);
    Mat3<QuadExt> want = identity3<QuadExt>();
    want[i][2] = QuadExt(1);
    if (m != want) fail("Par basis element " + std::to_string(i + 1) + " is not a unit translation");
  }

  Integral a = read(sigma, "eLat generator 1");
  if (!is_hyperbolic_toral(a.linear)) fail("reconstructed A not hyperbolic");
  RecognitionResult res;
  try {
    if (elat.positive.size() == 1) {
      res.spec = ToralGroupSpec::gamma_a(a.linear);
      res.verdict = Verdict::GammaALike;
    } else {
      Integral b = read(elat.positive[1].word.element, "eLat generator 2");
      if (!(a.linear * b.translation - b.translation).is_integral()) fail("ν-compatibility: Aν − ν not integral");
      res.spec = ToralGroupSpec::gamma_ab_nu(a.linear, b.linear, b.translation);
      res.verdict = Verdict::GammaABnuLike;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CertificationFailed) throw;
    fail(std::string("reconstructed spec invalid: ") + e.what());
  }

  // Every input generator (squared when its diagonal has a negative sign) must
  // be an element ⟨k : l : b : ν⟩ of the reconstructed group.
  const auto& spec = *res.spec;
  auto exponents = [&](const AffineDiag& g) {
    std::array<double, 2> lg = detail::log_of(g);
    std::array<std::int64_t, 2> kl{0, 0};
    const auto& P = elat.positive;
    if (P.size() == 1) {
      double n = P[0].log[0] * P[0].log[0] + P[0].log[1] * P[0].log[1];
      kl[0] = std::llround((lg[0] * P[0].log[0] + lg[1] * P[0].log[1]) / n);
    } else {
      double d = P[0].log[0] * P[1].log[1] - P[1].log[0] * P[0].log[1];
      kl[0] = std::llround((lg[0] * P[1].log[1] - lg[1] * P[1].log[0]) / d);
      kl[1] = std::llround((P[0].log[0] * lg[1] - P[0].log[1] * lg[0]) / d);
    }
    return kl;
  };
  for (std::size_t i = 0; i < G.generators.size(); ++i) {
    AffineDiag g = G.generators[i];
    std::string name = "g" + std::to_string(i + 1);
    if (g.m1.sign() < 0 || g.m2.sign() < 0) {
      read(g, name);
      g = g * g;
      name += "^2";
    }
    Integral r = read(g, name);
    auto kl = exponents(g);
    if (r.linear != spec.A.pow(kl[0]) * spec.B.pow(kl[1])) fail(name + ": linear part is not AᵏBˡ");
    if (!(r.translation - phi(spec.B, spec.nu, kl[1])).is_integral())
      fail(name + ": translation outside b + φ(B,ν,l) with b integral");
  }

  res.T = R * G.C_inv;
  res.lox = lox;
  res.par = par_word;
  res.par_witness = par;
  res.elat = elat;
  res.index_bound = elat.index_bound;
  return res;
}

/// The full pipeline: normalize, find γ_L and τ₀, extract Par and eLat, certify.
/// NoCommonFixedPair (and Singular) propagate; every later failure becomes a
/// NotToral verdict with the failing check as reason.
inline RecognitionResult recognize(const std::vector<Mat3<QuadExt>>& gens,
                                   const RecognitionOptions& opt = RecognitionOptions{}) {
  StabilizedGroup G = normalize_stabilizer(gens);
  WordBall ball(G, opt.max_elements);
  RecognitionResult res;
  std::optional<FoundWord> lox, par;
  try {
    lox = find_double_loxodromic(ball, opt.word_bound);
    par = find_double_parabolic(ball, *lox, opt.word_bound);
    ParWitness pw = extract_par_lattice(ball, opt.word_bound);
    ELatResult el = extract_elat(G, pw, opt.tol);
    res = certify_toral(G, *lox, *par, pw, el);
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::NotFoundWithinBound:
      case ErrorCode::RankDeficient:
      case ErrorCode::NonDiscreteELat:
      case ErrorCode::CertificationFailed:
        res = RecognitionResult{};
        res.verdict = Verdict::NotToral;
        res.reason = e.what();
        res.lox = lox;
        res.par = par;
        break;
      default:
        throw;
    }
  }
  res.word_bound = opt.word_bound;
  res.truncated = ball.truncated();
  res.elements_explored = ball.size();
  res.p1 = G.p1;
  res.p2 = G.p2;
  return res;
}

inline RecognitionResult recognize(const std::vector<Mat3<Rational>>& gens,
                                   const RecognitionOptions& opt = RecognitionOptions{}) {
  std::vector<Mat3<QuadExt>> lifted;
  for (const auto& g : gens) lifted.push_back(detail::lift(g));
  return recognize(lifted, opt);
}

/// Some P ∈ GL(2,ℤ) with entries in [−bound, bound] and P·A·P⁻¹ = B, if one exists.
inline std::optional<std::array<long long, 4>> gl2z_conjugator(const IntMatrix2& A, const IntMatrix2& B,
                                                               long long bound = 12) {
  if (A == B) return std::array<long long, 4>{1, 0, 0, 1};
  if (A.trace() != B.trace()) return std::nullopt;
  auto ll = [](const Integer& v) { return v.convert_to<long long>(); };
  long long a = ll(A.a()), b = ll(A.b()), c = ll(A.c()), d = ll(A.d());
  long long e = ll(B.a()), f = ll(B.b()), g = ll(B.c()), h = ll(B.d());
  for (long long p = -bound; p <= bound; ++p)
    for (long long q = -bound; q <= bound; ++q)
      for (long long r = -bound; r <= bound; ++r)
        for (long long s = -bound; s <= bound; ++s) {
          long long dt = p * s - q * r;
          if (dt != 1 && dt != -1) continue;
          // P·A == B·P
          if (p * a + q * c != e * p + f * r) continue;
          if (p * b + q * d != e * q + f * s) continue;
          if (r * a + s * c != g * p + h * r) continue;
          if (r * b + s * d != g * q + h * s) continue;
          return std::array<long long, 4>{p, q, r, s};
        }
  return std::nullopt;
}

}  // namespace kleinian
