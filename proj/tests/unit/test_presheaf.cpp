#include <gtest/gtest.h>

#include "derivkit/error.hpp"
#include "derivkit/presheaf.hpp"

using namespace derivkit;

namespace {

// Over Δ1 = {0 ← 1} a presheaf is a representation F_0 → F_1 of the quiver 0 → 1.
struct Delta1 {
  Field k = Field::f2();
  FinCat d = delta(1);
  Presheaf rep(std::size_t d0, std::size_t d1, Matrix m) const {
    return Presheaf::from_generators(k, d, {d0, d1}, {std::move(m)});
  }
  Presheaf s0() const { return rep(1, 0, Matrix(k, 0, 1)); }
  Presheaf s1() const { return rep(0, 1, Matrix(k, 1, 0)); }
  Presheaf p0() const { return free_at(k, d, 1, 0); }
  Presheaf p1() const { return free_at(k, d, 1, 1); }
};

}  // namespace

TEST(Presheaf, FunctorialityIsChecked) {
  const Field k = Field::rationals();
  const FinCat c = delta(2);
  // arrows 1→0 and 2→1; the composite acts by the product
  const auto irr = c.irreducible_arrows();
  ASSERT_EQ(irr.size(), 2u);
  const Presheaf f = Presheaf::from_generators(k, c, {1, 1, 1}, {Matrix::from_rows(k, {{2}}),
                                                                Matrix::from_rows(k, {{3}})});
  const ArrId long_arrow = c.hom(2, 0)[0];
  EXPECT_EQ(f.action(long_arrow), Matrix::from_rows(k, {{6}}));
  EXPECT_THROW(Presheaf::from_generators(k, c, {1, 1, 1}, {Matrix(k, 2, 1), Matrix(k, 1, 1)}),
               InvalidInput);
}

TEST(FreeAt, Examples) {
  const Delta1 D;
  EXPECT_EQ(D.p0().dims(), (std::vector<std::size_t>{1, 1}));
  EXPECT_TRUE(D.p0().action(*D.d.find_arrow("a")).is_identity());
  EXPECT_EQ(D.p1().dims(), (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(D.p1() == D.s1());
  EXPECT_EQ(free_at(D.k, point_category(), 4, 0).dims(), (std::vector<std::size_t>{4}));
  EXPECT_THROW(free_at(D.k, D.d, 1, 5), InvalidInput);
  // (V ⊗ i)_j has one block per arrow j → i
  const FinCat sq = square();
  const Presheaf p = free_at(D.k, sq, 2, sq.object("(0,0)"));
  for (ObjId j = 0; j < sq.num_objects(); ++j) EXPECT_EQ(p.dim(j), 2u);
}

TEST(Kernel, Examples) {
  const Delta1 D;
  const Presheaf p0 = D.p0();
  EXPECT_TRUE(kernel(PresheafMap::identity(p0)).object.is_zero());
  EXPECT_TRUE(kernel(PresheafMap::zero(p0, D.s0())).object == p0);
  // the projection P_0 ↠ S_0 at object 0 has kernel S_1 (the sub-representation 0 → k)
  const PresheafMap proj(p0, D.s0(), {Matrix::identity(D.k, 1), Matrix(D.k, 0, 1)});
  EXPECT_TRUE(kernel(proj).object == D.s1());
  EXPECT_TRUE(cokernel(proj).object.is_zero());
  // there is no nonzero natural map P_0 → S_1
  EXPECT_THROW(PresheafMap(p0, D.s1(), {Matrix(D.k, 0, 1), Matrix::identity(D.k, 1)}), InvalidInput);
  EXPECT_EQ(hom_dim(p0, D.s1()), 0u);
}

TEST(Pushout, Examples) {
  const Delta1 D;
  const Presheaf p0 = D.p0(), s1 = D.s1();
  const PresheafMap i(s1, p0, {Matrix(D.k, 1, 0), Matrix::identity(D.k, 1)});
  EXPECT_TRUE(i.is_injective());
  const Pushout a = pushout(i, PresheafMap::identity(s1));
  EXPECT_TRUE(a.object == p0);
  EXPECT_TRUE(a.inflation.is_injective());
  // zero source: the pushout is the coproduct
  const Presheaf z = Presheaf::zero(D.k, D.d);
  const Pushout c = pushout(PresheafMap::zero(z, p0), PresheafMap::zero(z, D.s0()));
  EXPECT_EQ(c.object.dims(), (std::vector<std::size_t>{2, 1}));
  EXPECT_THROW(pushout(PresheafMap::zero(p0, p0), PresheafMap::identity(p0)), PreconditionFailed);
}

TEST(Resolve, Examples) {
  const Delta1 D;
  EXPECT_EQ(resolve(D.p0()).length(), 0u);
  const Resolution r = resolve(D.s0());
  ASSERT_EQ(r.length(), 1u);
  EXPECT_TRUE(r.terms[0] == D.p0());
  EXPECT_TRUE(r.terms[1] == D.p1());
  EXPECT_TRUE(r.kernels.back().is_zero());
  // Euler characteristic at every object
  const FinCat c = cube(2);
  const Field k = Field::prime(3);
  const Presheaf f = Presheaf::constant(k, c, 2);
  const Resolution rc = resolve(f);
  EXPECT_LE(rc.length(), c.max_chain_length());
  for (ObjId x = 0; x < c.num_objects(); ++x) {
    long chi = 0;
    for (std::size_t t = 0; t < rc.terms.size(); ++t)
      chi += (t % 2 == 0 ? 1 : -1) * static_cast<long>(rc.terms[t].dim(x));
    EXPECT_EQ(chi, static_cast<long>(f.dim(x)));
  }
  for (std::size_t t = 1; t < rc.differentials.size(); ++t)
    EXPECT_TRUE(compose(rc.differentials[t - 1], rc.differentials[t]).is_zero());
}

TEST(HomSpace, Examples) {
  const Delta1 D;
  const auto e = hom_space(D.p0(), D.p0());
  EXPECT_EQ(e.size(), 1u);
  EXPECT_EQ(hom_dim(D.s0(), D.s1()), 0u);
  EXPECT_EQ(hom_dim(D.p0(), D.s0()), 1u);
  EXPECT_EQ(hom_dim(D.s1(), D.p0()), 1u);
  // dim hom(V ⊗ i, G) = v · dim G_i, here against a non-free target
  const FinCat sq = square();
  const Presheaf g = Presheaf::constant(D.k, sq, 2);
  for (ObjId i = 0; i < sq.num_objects(); ++i)
    EXPECT_EQ(hom_dim(free_at(D.k, sq, 3, i), g), 3u * g.dim(i));
  EXPECT_THROW(hom_space(D.p0(), Presheaf::zero(D.k, square())), InvalidInput);
}

TEST(Restrict, Examples) {
  const Delta1 D;
  EXPECT_TRUE(restrict(identity_functor(D.d), D.p0()) == D.p0());
  EXPECT_EQ(restrict(point_inclusion(D.d, 0), D.p0()).dims(), (std::vector<std::size_t>{1}));
  const Presheaf v = free_at(D.k, point_category(), 2, 0);
  const Presheaf c = restrict(terminal_functor(D.d), v);
  EXPECT_TRUE(c == Presheaf::constant(D.k, D.d, 2));
}

TEST(Dualize, InvolutionAndExchange) {
  const Delta1 D;
  const Presheaf p0 = D.p0();
  EXPECT_TRUE(dualize(dualize(p0)) == p0);
  const PresheafMap proj(p0, D.s0(), {Matrix::identity(D.k, 1), Matrix(D.k, 0, 1)});
  // kernel of f dualizes to the cokernel of D f
  EXPECT_EQ(cokernel(dualize(proj)).object.dims(), kernel(proj).object.dims());
}

TEST(Kan, PointwiseAgreesWithFreeFormula) {
  const Field k = Field::rationals();
  const FinCat c = delta(2);
  const DiagFunctor u = full_inclusion(c, {0, 2});
  for (ObjId i = 0; i < u.source().num_objects(); ++i) {
    const Presheaf p = free_at(k, u.source(), 2, i);
    const Presheaf a = lan_pointwise(u, p);
    const Presheaf b = lan_free(u, p);
    EXPECT_EQ(a.dims(), b.dims());
    EXPECT_EQ(a.dims(), free_at(k, c, 2, u(i)).dims());
  }
}

TEST(ExtendByZero, OpenAndClosedPoints) {
  const Delta1 D;
  const Presheaf k1 = free_at(D.k, point_category(), 1, 0);
  EXPECT_TRUE(extend_by_zero(point_inclusion(D.d, 1), k1) == D.s1());
  EXPECT_TRUE(extend_by_zero(point_inclusion(D.d, 0), k1) == D.s0());
}
