#include <gtest/gtest.h>

#include "kleinian/verify.hpp"
#include "kleinian/recognition.hpp"

using namespace kleinian;

namespace {

const IntMatrix2 kCat(2, 1, 1, 1);

std::shared_ptr<const ToralGroupSpec> cat_group() {
  return std::make_shared<const ToralGroupSpec>(ToralGroupSpec::gamma_a(kCat));
}

Mat3<Rational> affine(Rational m1, Rational m2, Rational x, Rational y) {
  return {{{m1, 0, x}, {0, m2, y}, {0, 0, 1}}};
}

Mat3<Rational> upper(Rng& rng) {
  while (true) {
    Mat3<Rational> u{};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i; j < 3; ++j) u[i][j] = Rational(rng.uniform(-6, 6), rng.uniform(1, 4));
    if (det(u) != 0) return u;
  }
}

std::vector<Mat3<Rational>> conjugate_all(const std::vector<Mat3<Rational>>& gens, const Mat3<Rational>& u) {
  std::vector<Mat3<Rational>> out;
  Mat3<Rational> ui = inverse(u);
  for (const auto& g : gens) out.push_back(u * g * ui);
  return out;
}

bool gl2z_equivalent(const IntMatrix2& a, const IntMatrix2& b) {
  return gl2z_conjugator(a, b).has_value() || gl2z_conjugator(a, b.inverse()).has_value();
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Inconclusive;
}

}  // namespace

TEST(Recognition, Words) {
  Word w{0, 0, 3};
  EXPECT_EQ(word_to_string(w), "g1^2 g2^-1");
  EXPECT_EQ(word_to_string({}), "e");
  EXPECT_TRUE(word_concat(w, word_inverse(w)).empty());
  EXPECT_EQ(word_to_string(word_power(Word{2}, -3)), "g2^-3");
}

TEST(Recognition, NormalizeAlreadyNormal) {
  auto gens = std::vector<Mat3<Rational>>{affine(4, Rational(1, 4), 0, 0), affine(1, 1, 1, 0), affine(1, 1, 0, 1)};
  StabilizedGroup G = normalize_stabilizer(gens);
  EXPECT_TRUE(G.p1.equals(ProjectivePoint<QuadExt>::basis(0)));
  EXPECT_TRUE(G.p2.equals(ProjectivePoint<QuadExt>::basis(1)));
  ASSERT_EQ(G.generators.size(), gens.size());
  // Normalized form equals the input up to scale.
  for (std::size_t i = 0; i < gens.size(); ++i)
    EXPECT_TRUE(ProjectiveMap<QuadExt>(G.generators[i].matrix()).equals(ProjectiveMap<QuadExt>(detail::lift(gens[i]))));
}

TEST(Recognition, NormalizeCatFindsEigenlines) {
  // The fixed pair of the standard cat generators is the pair of eigenvectors of A.
  StabilizedGroup G = normalize_stabilizer(standard_generators(cat_group()));
  EigenData e = eigen_data(kCat);
  std::vector<ProjectivePoint<QuadExt>> eig{ProjectivePoint<QuadExt>(e.v_plus[0], e.v_plus[1], QuadExt(0)),
                                            ProjectivePoint<QuadExt>(e.v_minus[0], e.v_minus[1], QuadExt(0))};
  EXPECT_TRUE((G.p1.equals(eig[0]) && G.p2.equals(eig[1])) || (G.p1.equals(eig[1]) && G.p2.equals(eig[0])));
  for (const auto& g : G.generators) EXPECT_FALSE(g.m1 == QuadExt(0));
}

TEST(Recognition, NormalizeRoundTrip) {
  Rng rng(1);
  Mat3<Rational> d = affine(Rational(3), Rational(1, 3), Rational(1), Rational(2));
  Mat3<Rational> t = affine(Rational(1), Rational(1), Rational(5), Rational(-1));
  for (int i = 0; i < 5; ++i) {
    Mat3<Rational> u = upper(rng);
    auto conj = conjugate_all({d, t}, u);
    StabilizedGroup G = normalize_stabilizer(conj);
    for (std::size_t j = 0; j < conj.size(); ++j) {
      Mat3<QuadExt> back = G.C * G.generators[j].matrix() * G.C_inv;
      EXPECT_TRUE(ProjectiveMap<QuadExt>(back).equals(ProjectiveMap<QuadExt>(detail::lift(conj[j]))));
    }
  }
}

TEST(Recognition, NormalizeRejectsMissingPair) {
  Mat3<Rational> rot{{{0, -1, 0}, {1, 0, 0}, {0, 0, 1}}};
  Mat3<Rational> shear{{{1, 0, 0}, {0, 1, 0}, {1, 1, 1}}};
  EXPECT_EQ(code_of([&] { normalize_stabilizer(std::vector<Mat3<Rational>>{rot, shear}); }),
            ErrorCode::NoCommonFixedPair);
}

TEST(Recognition, DoubleLoxodromicIsFirstGenerator) {
  StabilizedGroup G = normalize_stabilizer(standard_generators(cat_group()));
  EXPECT_EQ(word_to_string(find_double_loxodromic(G, 4).word), "g1");
}

TEST(Recognition, NoLoxodromicInParabolicGroup) {
  auto gens = std::vector<Mat3<Rational>>{affine(1, 1, 1, 0), affine(1, 1, 0, 1)};
  StabilizedGroup G = normalize_stabilizer(gens);
  EXPECT_EQ(code_of([&] { find_double_loxodromic(G, 4); }), ErrorCode::NotFoundWithinBound);
}

TEST(Recognition, OneSidedLoxodromicsCombine) {
  // g is loxodromic on ℓ₂ only, h on ℓ₁ only; g·h is doubly loxodromic.
  auto gens = std::vector<Mat3<Rational>>{affine(2, 1, 0, 1), affine(1, 3, 1, 0)};
  StabilizedGroup G = normalize_stabilizer(gens);
  FoundWord f = find_double_loxodromic(G, 4);
  EXPECT_TRUE(is_double_loxodromic(f.element));
  EXPECT_EQ(f.word.size(), 2u);
  EXPECT_EQ(WordBall(G).evaluate(f.word), f.element);
}

TEST(Recognition, DoubleParabolicIsTranslation) {
  StabilizedGroup G = normalize_stabilizer(standard_generators(cat_group()));
  FoundWord lox = find_double_loxodromic(G, 4);
  FoundWord par = find_double_parabolic(G, lox, 4);
  EXPECT_TRUE(par.element.is_translation());
  EXPECT_TRUE(is_double_parabolic(par.element));
}

TEST(Recognition, CommutatorOfDiagonalAndTranslation) {
  // γ_L diagonal, γ_j a translation with both components: κ = γ_L γ_j γ_L⁻¹ γ_j⁻¹
  AffineDiag L{QuadExt(4), QuadExt(Rational(1, 4)), QuadExt(0), QuadExt(0)};
  AffineDiag t{QuadExt(1), QuadExt(1), QuadExt(1), QuadExt(1)};
  AffineDiag k = L * t * L.inverse() * t.inverse();
  EXPECT_EQ(k.x, QuadExt(3));
  EXPECT_EQ(k.y, QuadExt(Rational(-3, 4)));
  EXPECT_TRUE(is_double_parabolic(k));
}

TEST(Recognition, DiagonalGroupHasNoParabolic) {
  auto gens = std::vector<Mat3<Rational>>{affine(2, Rational(1, 2), 0, 0), affine(3, Rational(1, 3), 0, 0)};
  StabilizedGroup G = normalize_stabilizer(gens);
  FoundWord lox = find_double_loxodromic(G, 4);
  try {
    find_double_parabolic(G, lox, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotFoundWithinBound);
    EXPECT_NE(std::string(e.what()).find("Par rank deficient"), std::string::npos);
  }
}

TEST(Recognition, ParLatticeStandard) {
  // Par of the cat group is ℤ², so the reduced basis spans the same lattice as
  // the two unit translations g2, g3.
  StabilizedGroup G = normalize_stabilizer(standard_generators(cat_group()));
  ParWitness p = extract_par_lattice(G, 6);
  Mat2<QuadExt> unit{{{G.generators[1].x, G.generators[2].x}, {G.generators[1].y, G.generators[2].y}}};
  QuadExt ratio = det(p.basis) / det(unit);
  EXPECT_TRUE(ratio == QuadExt(1) || ratio == QuadExt(-1));
  for (const auto& w : p.words) EXPECT_TRUE(is_par(w.element));
  EXPECT_EQ(WordBall(G).evaluate(p.words[0].word), p.words[0].element);
}

TEST(Recognition, ParLatticeRankDeficient) {
  auto gens = std::vector<Mat3<Rational>>{affine(1, 2, 0, 0), affine(1, 1, 1, 0)};
  StabilizedGroup G = normalize_stabilizer(gens);
  EXPECT_EQ(code_of([&] { extract_par_lattice(G, 4); }), ErrorCode::RankDeficient);
}

TEST(Recognition, ParLatticeNotDiscrete) {
  // diag(2, 1/2) conjugates the translation by 1 to translations by 2ⁿ: ℤ[1/2], not a lattice.
  auto gens = std::vector<Mat3<Rational>>{affine(2, Rational(1, 2), 0, 0), affine(1, 1, 1, 0)};
  StabilizedGroup G = normalize_stabilizer(gens);
  EXPECT_EQ(code_of([&] { extract_par_lattice(G, 4); }), ErrorCode::CertificationFailed);
}

TEST(Recognition, LatIsHomomorphismOnPar) {
  StabilizedGroup G = normalize_stabilizer(standard_generators(cat_group()));
  WordBall ball(G);
  ball.grow_to(4);
  std::vector<std::size_t> par;
  for (std::size_t i = 0; i < ball.size() && par.size() < 40; ++i)
    if (is_par(ball.element(i))) par.push_back(i);
  for (auto i : par)
    for (auto j : par) {
      AffineDiag u = ball.element(i), v = ball.element(j);
      AffineDiag uv = u * v;
      EXPECT_EQ(uv.x, u.x + v.x);
      EXPECT_EQ(uv.y, u.y + v.y);
    }
}

TEST(Recognition, ELatKernelIsPar) {
  // eLat(g) trivial exactly when both restrictions are identity or parabolic.
  for (auto gens : {standard_generators(cat_group()),
                    standard_generators(std::make_shared<const ToralGroupSpec>(ToralGroupSpec::gamma_ab_nu(
                        kCat.pow(2), kCat, {Rational(-1, 5), Rational(3, 5)})))}) {
    StabilizedGroup G = normalize_stabilizer(gens);
    WordBall ball(G);
    ball.grow_to(3);
    for (std::size_t i = 0; i < ball.size(); ++i) {
      const AffineDiag& g = ball.element(i);
      EXPECT_EQ(is_par(g), g.m1 == QuadExt(1) && g.m2 == QuadExt(1)) << word_to_string(ball.word(i));
    }
  }
}

TEST(Recognition, ELatCat) {
  StabilizedGroup G = normalize_stabilizer(standard_generators(cat_group()));
  ParWitness p = extract_par_lattice(G, 6);
  ELatResult e = extract_elat(G, p, default_tolerances());
  EXPECT_EQ(e.rank, 1);
  ASSERT_EQ(e.generators.size(), 1u);
  EXPECT_LE(e.index_bound, 4);
  // the generator's diagonal is λ^{±1}, λ = (3+√5)/2
  const auto& m = e.generators[0].word.element;
  QuadExt lam = eigen_data(kCat).lambda;
  EXPECT_TRUE((m.m1 == lam && m.m2 == QuadExt(1) / lam) || (m.m1 == QuadExt(1) / lam && m.m2 == lam));
}

TEST(Recognition, ELatPureTranslations) {
  auto gens = std::vector<Mat3<Rational>>{affine(1, 1, 1, 0), affine(1, 1, 0, 1)};
  StabilizedGroup G = normalize_stabilizer(gens);
  ParWitness p = extract_par_lattice(G, 4);
  ELatResult e = extract_elat(G, p, default_tolerances());
  EXPECT_EQ(e.rank, 0);
  EXPECT_TRUE(e.generators.empty());
}

TEST(Recognition, ELatGeneratorsPreserveLattice) {
  StabilizedGroup G = normalize_stabilizer(standard_generators(cat_group()));
  ParWitness p = extract_par_lattice(G, 6);
  ELatResult e = extract_elat(G, p, default_tolerances());
  Mat2<QuadExt> Vinv = inverse(p.basis);
  for (const auto& g : e.generators)
    for (const auto& w : p.words) {
      AffineDiag conj = g.word.element * w.element * g.word.element.inverse();
      // coordinates of the conjugated translation in the lattice basis are integers
      QuadExt a = Vinv[0][0] * conj.x + Vinv[0][1] * conj.y, b = Vinv[1][0] * conj.x + Vinv[1][1] * conj.y;
      EXPECT_TRUE(a.is_rational() && is_integral(a.rational_part()));
      EXPECT_TRUE(b.is_rational() && is_integral(b.rational_part()));
    }
}

TEST(Recognition, RecognizeCat) {
  RecognitionResult r = recognize(standard_generators(cat_group()));
  ASSERT_EQ(r.verdict, Verdict::GammaALike) << r.reason;
  ASSERT_TRUE(r.spec.has_value());
  EXPECT_TRUE(gl2z_equivalent(r.spec->A, kCat));
  EXPECT_LE(r.index_bound, 8);
  EXPECT_EQ(word_to_string(r.lox->word), "g1");
}

TEST(Recognition, RecognizeConjugatedCat) {
  Rng rng(5);
  for (int i = 0; i < 3; ++i) {
    RecognitionResult r = recognize(conjugate_all(standard_generators(cat_group()), upper(rng)));
    ASSERT_EQ(r.verdict, Verdict::GammaALike) << r.reason;
    EXPECT_TRUE(gl2z_equivalent(r.spec->A, kCat));
  }
}

TEST(Recognition, RecognizeGammaABnu) {
  auto spec = std::make_shared<const ToralGroupSpec>(
      ToralGroupSpec::gamma_ab_nu(kCat.pow(2), kCat, {Rational(-1, 5), Rational(3, 5)}));
  RecognitionResult r = recognize(standard_generators(spec));
  // A = cat², B = cat: the diagonal parts form a rank-1 group generated by cat.
  ASSERT_NE(r.verdict, Verdict::NotToral) << r.reason;
  EXPECT_TRUE(gl2z_equivalent(r.spec->A, kCat));
}

TEST(Recognition, DiagonalOnlyIsNotToral) {
  auto gens = std::vector<Mat3<Rational>>{affine(2, Rational(1, 2), 0, 0)};
  RecognitionResult r = recognize(gens);
  EXPECT_EQ(r.verdict, Verdict::NotToral);
  EXPECT_NE(r.reason.find("Par rank deficient"), std::string::npos);
}

TEST(Recognition, CertifyRejectsRankOneLattice) {
  StabilizedGroup G = normalize_stabilizer(standard_generators(cat_group()));
  FoundWord lox = find_double_loxodromic(G, 4);
  FoundWord par = find_double_parabolic(G, lox, 4);
  ParWitness p = extract_par_lattice(G, 6);
  ELatResult e = extract_elat(G, p, default_tolerances());
  p.basis[0][1] = p.basis[0][0];
  p.basis[1][1] = p.basis[1][0];
  try {
    certify_toral(G, lox, par, p, e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::CertificationFailed);
    EXPECT_NE(std::string(err.what()).find("lattice rank"), std::string::npos);
  }
}

TEST(Recognition, Gl2zConjugator) {
  auto p = gl2z_conjugator(kCat, IntMatrix2(1, 1, 1, 2));
  ASSERT_TRUE(p.has_value());
  EXPECT_FALSE(gl2z_conjugator(kCat, IntMatrix2(3, 1, 2, 1)).has_value());  // trace 4
}
