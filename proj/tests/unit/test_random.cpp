#include <gtest/gtest.h>

#include "derivkit/random.hpp"

using namespace derivkit;

namespace {

const Field k2 = Field::f2();

}  // namespace

TEST(Random, SameSeedSameInstance) {
  for (std::uint64_t c = 0; c < 20; ++c) {
    Rng a(7, c), b(7, c);
    const FinCat ca = random_category(a), cb = random_category(b);
    ASSERT_TRUE(ca == cb);
    EXPECT_TRUE(random_presheaf(a, k2, ca) == random_presheaf(b, k2, cb));
  }
}

TEST(Random, CategoriesAreDirectedAndSmall) {
  for (std::uint64_t c = 0; c < 50; ++c) {
    Rng r(1, c);
    const FinCat cat = random_category(r);
    EXPECT_GE(cat.num_objects(), 1u);
    EXPECT_LE(cat.num_objects(), 5u);
    EXPECT_NO_THROW(cat.validate());
  }
}

TEST(Random, PresheavesAreFunctorial) {
  for (std::uint64_t c = 0; c < 50; ++c) {
    Rng r(2, c);
    const FinCat cat = random_category(r);
    const Presheaf f = random_presheaf(r, c % 2 ? k2 : Field::prime(3), cat);
    EXPECT_NO_THROW(f.validate());
    for (ObjId x = 0; x < cat.num_objects(); ++x) EXPECT_LE(f.dim(x), 3u);
  }
}

TEST(Random, ComplexesAndChainMapsAreValid) {
  for (std::uint64_t c = 0; c < 30; ++c) {
    Rng r(3, c);
    const FinCat cat = random_category(r, 3);
    const Complex x = random_complex(r, k2, cat, 2);
    const Complex y = random_complex(r, k2, cat, 2);
    EXPECT_NO_THROW(x.validate());
    if (!x.empty_range()) {
      EXPECT_GE(x.lo(), -2);
      EXPECT_LE(x.hi(), 2);
    }
    EXPECT_NO_THROW(random_chain_map(r, x, y).validate());
  }
}

TEST(Random, ConflationsAreConflations) {
  for (std::uint64_t c = 0; c < 30; ++c) {
    Rng r(4, c);
    const FinCat cat = random_category(r, 4);
    const RandomConflation cf = random_conflation(r, k2, cat);
    EXPECT_TRUE(is_conflation(cf.inflation, cf.deflation));
  }
}

TEST(Random, BicartesianSquaresAreBicartesian) {
  for (std::uint64_t c = 0; c < 20; ++c) {
    Rng r(5, c);
    const SquareObject s = random_bicartesian_square(r, k2, delta(1));
    EXPECT_TRUE(is_acyclic(s.corner(1, 0)));
    EXPECT_TRUE(is_cocartesian(s).holds);
    EXPECT_TRUE(is_cartesian(s).holds);
  }
}

TEST(Random, TodaDiagramsPassToda) {
  for (std::uint64_t c = 0; c < 10; ++c) {
    Rng r(6, c);
    const IncoherentDiagram d = random_toda_diagram(r, k2, delta(2), delta(1));
    EXPECT_NO_THROW(d.validate());
    EXPECT_TRUE(toda_check(d, d).pass);
  }
}
