#include <gtest/gtest.h>

#include <string>

#include "derivkit/error.hpp"
#include "derivkit/io.hpp"
#include "derivkit/random.hpp"

using namespace derivkit;

namespace {

const std::string data = DERIVKIT_TEST_DATA;

std::string error_of(const std::string& path) {
  try {
    load_file(path);
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Io, HandWrittenDiagramMatchesBuiltinShape) {
  const FinCat d = load_diagram(data + "/delta1.json");
  EXPECT_TRUE(d == delta(1));
  const FinCat sq = load_diagram(data + "/square_relation.json");
  EXPECT_EQ(sq.num_objects(), 4u);
  EXPECT_EQ(sq.num_arrows(), 9u);  // 4 identities, 4 edges, 1 diagonal
  EXPECT_TRUE(sq.is_thin());
}

TEST(Io, SimplesAndProjective) {
  const Presheaf s0 = load_presheaf(data + "/S0.json");
  EXPECT_EQ(s0.dims(), (std::vector<std::size_t>{1, 0}));
  const Presheaf p0 = load_presheaf(data + "/P0.json");
  EXPECT_TRUE(p0 == Presheaf::constant(Field::f2(), delta(1), 1));
  EXPECT_EQ(load_complex(data + "/S1.json").lo(), 0);
}

TEST(Io, Functors) {
  const DiagFunctor u = load_functor(data + "/point0.json");
  EXPECT_TRUE(u == point_inclusion(delta(1), 0));
  EXPECT_TRUE(load_functor(data + "/terminal.json") == terminal_functor(delta(1)));
}

TEST(Io, ErrorsCarryLocation) {
  EXPECT_NE(error_of(data + "/bad_syntax.json").find("bad_syntax.json:5:"), std::string::npos);
  const std::string e = error_of(data + "/not_functorial.json");
  EXPECT_NE(e.find("/actions/2->0"), std::string::npos) << e;
  EXPECT_THROW(load_functor(data + "/S0.json"), InvalidInput);
  EXPECT_NE(error_of(data + "/missing.json").find("cannot open"), std::string::npos);
}

TEST(Io, RoundTripRandomValues) {
  for (std::uint64_t c = 0; c < 30; ++c) {
    Rng r(11, c);
    const Field k = c % 3 == 0 ? Field::rationals() : (c % 3 == 1 ? Field::f2() : Field::prime(5));
    const FinCat cat = random_category(r, 4);
    const Loaded lc = parse_document(to_json(cat));
    EXPECT_TRUE(std::get<FinCat>(lc.value) == cat);
    const Complex x = random_complex(r, k, cat, 2);
    const Loaded lx = parse_document(to_json(x));
    EXPECT_TRUE(std::get<Complex>(lx.value) == x);
    EXPECT_TRUE(*lx.field == k);
    const DiagFunctor u = random_functor(r);
    EXPECT_TRUE(std::get<DiagFunctor>(parse_document(to_json(u)).value) == u);
  }
}

TEST(Io, RoundTripProjectiveKeepsDecoration) {
  const ProjectiveModel m = proj_resolution(Complex::stalk(Presheaf::constant(Field::rationals(), delta(2), 2)));
  const Complex back = std::get<Complex>(parse_document(to_json(m.object)).value);
  EXPECT_TRUE(back.is_projective());
  EXPECT_TRUE(back == m.object);
}

TEST(Io, RoundTripIncoherent) {
  Rng r(12, 0);
  const IncoherentDiagram d = random_toda_diagram(r, Field::f2(), delta(2), delta(1));
  const IncoherentDiagram back = std::get<IncoherentDiagram>(parse_document(to_json(d)).value);
  ASSERT_EQ(back.objects.size(), d.objects.size());
  for (std::size_t i = 0; i < d.objects.size(); ++i) EXPECT_TRUE(back.objects[i] == d.objects[i]);
  for (std::size_t a = 0; a < d.arrows.size(); ++a) EXPECT_TRUE(back.arrows[a] == d.arrows[a]);
  EXPECT_EQ(back.composites.size(), d.composites.size());
}
