#include <gtest/gtest.h>

#include "derivkit/diagram.hpp"
#include "derivkit/error.hpp"

using namespace derivkit;

namespace {

std::size_t non_identity_arrows(const FinCat& c) { return c.num_arrows() - c.num_objects(); }

}  // namespace

TEST(FromQuiver, DeltaOne) {
  const FinCat d = FinCat::from_quiver("d1", {"0", "1"}, {{"a", "1", "0"}}, {});
  EXPECT_EQ(d.num_objects(), 2u);
  EXPECT_EQ(non_identity_arrows(d), 1u);
  EXPECT_EQ(d.summary(), "2 objects, 1 non-identity arrow, acyclic");
  EXPECT_TRUE(d == delta(1));
}

TEST(FromQuiver, EmptyAndSquare) {
  const FinCat e = FinCat::from_quiver("empty", {}, {}, {});
  EXPECT_EQ(e.num_objects(), 0u);
  EXPECT_EQ(e.num_arrows(), 0u);

  // x: 01→00, y: 10→00, z: 11→01, w: 11→10 and x∘z = y∘w
  const FinCat sq = FinCat::from_quiver(
      "sq", {"00", "01", "10", "11"},
      {{"x", "01", "00"}, {"y", "10", "00"}, {"z", "11", "01"}, {"w", "11", "10"}},
      {{{"x", "z"}, {"y", "w"}}});
  EXPECT_EQ(sq.num_objects(), 4u);
  EXPECT_EQ(non_identity_arrows(sq), 5u);
  // without the relation the two diagonals stay distinct
  const FinCat free = FinCat::from_quiver(
      "free", {"00", "01", "10", "11"},
      {{"x", "01", "00"}, {"y", "10", "00"}, {"z", "11", "01"}, {"w", "11", "10"}}, {});
  EXPECT_EQ(non_identity_arrows(free), 6u);
  EXPECT_FALSE(free.is_thin());
  EXPECT_EQ(free.hom(free.object("11"), free.object("00")).size(), 2u);
}

TEST(FromQuiver, Errors) {
  EXPECT_THROW(FinCat::from_quiver("c", {"0", "1"}, {{"a", "0", "1"}, {"b", "1", "0"}}, {}),
               InvalidInput);
  EXPECT_THROW(FinCat::from_quiver("c", {"0", "1", "2"}, {{"a", "1", "0"}, {"b", "2", "1"}},
                                   {{{"a"}, {"b"}}}),
               InvalidInput);
}

TEST(Shapes, NamedCounts) {
  EXPECT_EQ(square().num_objects(), 4u);
  EXPECT_EQ(non_identity_arrows(square()), 5u);
  EXPECT_EQ(lefthalfcap().num_objects(), 3u);
  EXPECT_EQ(righthalfcup().num_objects(), 3u);
  EXPECT_EQ(twosquare().num_objects(), 6u);
  EXPECT_EQ(squarearrow().num_objects(), 5u);
  EXPECT_EQ(point_category().num_objects(), 1u);
  EXPECT_EQ(cube(3).num_objects(), 8u);
  for (const char* n : {"e", "empty", "delta1", "delta2", "square", "lefthalfcap", "righthalfcup",
                        "squarearrow", "twosquare", "cube_2"})
    EXPECT_TRUE(named_shape(n).has_value()) << n;
  EXPECT_FALSE(named_shape("pentagon").has_value());
}

TEST(Product, Examples) {
  const FinCat sq = product(delta(1), delta(1));
  EXPECT_EQ(sq.num_objects(), 4u);
  EXPECT_EQ(non_identity_arrows(sq), 5u);
  const FinCat ie = product(delta(2), point_category());
  EXPECT_EQ(ie.num_objects(), delta(2).num_objects());
  EXPECT_EQ(ie.num_arrows(), delta(2).num_arrows());
  // Δ2 × Δ1 has 6 objects; hom counts multiply
  const FinCat ts = product(delta(1), delta(2));
  EXPECT_EQ(ts.num_objects(), 6u);
  EXPECT_EQ(ts.num_arrows(), delta(1).num_arrows() * delta(2).num_arrows());
  EXPECT_EQ(product(identity_functor(delta(1)), identity_functor(delta(2))),
            identity_functor(product(delta(1), delta(2))));
}

TEST(MaxChain, Examples) {
  EXPECT_EQ(point_category().max_chain_length(), 0u);
  EXPECT_EQ(delta(1).max_chain_length(), 1u);
  for (std::size_t n = 0; n <= 4; ++n) EXPECT_EQ(cube(n).max_chain_length(), n);
  EXPECT_EQ(delta(4).max_chain_length(), 4u);
}

TEST(Comma, Examples) {
  const FinCat d = delta(1);
  const ObjId o0 = d.object("0"), o1 = d.object("1");
  const CommaCategory c = comma_over(identity_functor(d), o0);
  EXPECT_EQ(c.category.num_objects(), 2u);
  EXPECT_EQ(non_identity_arrows(c.category), 1u);
  const CommaCategory t = comma_over(terminal_functor(d), 0);
  EXPECT_EQ(t.category.num_objects(), d.num_objects());
  EXPECT_EQ(t.category.num_arrows(), d.num_arrows());
  const CommaCategory p = comma_over(point_inclusion(d, o1), o0);
  ASSERT_EQ(p.category.num_objects(), 1u);
  EXPECT_EQ(d.arrow(p.entries[0].second).name, "a");
  EXPECT_EQ(comma_over(point_inclusion(d, o0), o1).category.num_objects(), 0u);
  EXPECT_THROW(comma_over(identity_functor(d), 7), InvalidInput);
}

TEST(Immersions, Examples) {
  const FinCat d = delta(1);
  const DiagFunctor i1 = point_inclusion(d, d.object("1"));
  const DiagFunctor i0 = point_inclusion(d, d.object("0"));
  EXPECT_TRUE(is_open_immersion(i1));
  EXPECT_FALSE(is_closed_immersion(i1));
  EXPECT_FALSE(is_open_immersion(i0));
  EXPECT_TRUE(is_closed_immersion(i0));
  EXPECT_TRUE(is_open_immersion(identity_functor(square())));
  EXPECT_TRUE(is_closed_immersion(identity_functor(square())));
  for (const DiagFunctor& u : {i0, i1, inclusion_lefthalfcap(), inclusion_righthalfcup(),
                               left_square(), inclusion_squarearrow(), terminal_functor(d)})
    EXPECT_EQ(is_open_immersion(u), is_closed_immersion(opposite(u)));
}

TEST(NamedInclusions, AreFunctorsOfTheRightShape) {
  EXPECT_EQ(inclusion_lefthalfcap().target().num_objects(), 4u);
  EXPECT_EQ(inclusion_square_arrow().target().num_objects(), 5u);
  for (const DiagFunctor& u : {left_square(), right_square(), outer_square()}) {
    EXPECT_EQ(u.target().num_objects(), 6u);
    EXPECT_TRUE(u.is_fully_faithful());
  }
}

TEST(Opposite, Involution) {
  const FinCat c = twosquare();
  EXPECT_TRUE(opposite(opposite(c)) == c);
  EXPECT_EQ(opposite(c).num_arrows(), c.num_arrows());
}

TEST(NatTrans, WhiskerAndCompose) {
  const FinCat d = delta(1);
  const DiagFunctor i0 = point_inclusion(d, 0), i1 = point_inclusion(d, 1);
  // the arrow a : 1 → 0 is a 2-cell i_1 ⇒ i_0
  const ArrId a = *d.find_arrow("a");
  const NatTrans alpha(i1, i0, {a});
  const NatTrans id = identity_transformation(i0);
  EXPECT_EQ(vertical_compose(id, alpha).components(), alpha.components());
  const NatTrans w = whisker_left(identity_functor(d), alpha);
  EXPECT_EQ(w.component(0), a);
  EXPECT_THROW(NatTrans(i0, i1, {a}), InvalidInput);
}
