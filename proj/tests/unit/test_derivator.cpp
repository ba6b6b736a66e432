#include <gtest/gtest.h>

#include "derivkit/derivator.hpp"
#include "derivkit/error.hpp"

using namespace derivkit;

namespace {

struct Delta1 {
  Field k = Field::f2();
  FinCat d = delta(1);
  Presheaf s0() const { return Presheaf::from_generators(k, d, {1, 0}, {Matrix(k, 0, 1)}); }
  Presheaf s1() const { return Presheaf::from_generators(k, d, {0, 1}, {Matrix(k, 1, 0)}); }
  Presheaf p0() const { return free_at(k, d, 1, 0); }
  Presheaf constant() const { return Presheaf::constant(k, d, 1); }
};

std::vector<std::size_t> hdims(const Complex& x, int p) { return homology_dims(x, p); }

// Total homology per degree, as a map-free fingerprint.
std::vector<std::vector<std::size_t>> homology_profile(const Complex& x, int lo, int hi) {
  std::vector<std::vector<std::size_t>> out;
  for (int p = lo; p <= hi; ++p) out.push_back(homology_dims(x, p));
  return out;
}

ChainMap stalk_map(const PresheafMap& f, int degree = 0) {
  return ChainMap(Complex::stalk(f.source(), degree), Complex::stalk(f.target(), degree), {f});
}

}  // namespace

TEST(Lan, AlongPointInclusionGivesFree) {
  const Delta1 D;
  const Presheaf k1 = free_at(D.k, point_category(), 1, 0);
  for (ObjId i : {ObjId{0}, ObjId{1}}) {
    const KanResult r = lan(point_inclusion(D.d, i), Complex::stalk(k1));
    // (i_!k)_j = k[hom(j, i)]: (1,1) at 0 and (0,1) at 1
    const std::vector<std::size_t> want = i == 0 ? std::vector<std::size_t>{1, 1} : std::vector<std::size_t>{0, 1};
    EXPECT_EQ(r.object.lo(), 0);
    EXPECT_EQ(r.object.hi(), 0);
    EXPECT_EQ(r.object.term(0).dims(), want);
    EXPECT_TRUE(r.certificate.verify());
  }
}

TEST(Lan, AlongIdentityIsQuasiIsomorphic) {
  const Delta1 D;
  const Complex x = Complex::stalk(D.s0());
  const KanResult r = lan(identity_functor(D.d), x);
  EXPECT_TRUE(r.certificate.verify());
  EXPECT_EQ(homology_profile(r.object, -2, 1), homology_profile(x, -2, 1));
  EXPECT_TRUE(is_quasi_iso(r.certificate.model.map));
}

TEST(Hocolim, Examples) {
  const Delta1 D;
  // colim of F_0 → F_1 is F_1: P_0 ↦ k, S_1 ↦ k, S_0 ↦ 0 (derived: k → k iso)
  EXPECT_EQ(hdims(hocolim(Complex::stalk(D.p0())), 0), std::vector<std::size_t>{1});
  EXPECT_EQ(hdims(hocolim(Complex::stalk(D.s1())), 0), std::vector<std::size_t>{1});
  EXPECT_TRUE(is_acyclic(hocolim(Complex::stalk(D.s0()))));
  EXPECT_EQ(hdims(hocolim(Complex::stalk(D.constant())), 0), std::vector<std::size_t>{1});
  // the empty diagram
  const Complex z = Complex::zero(D.k, empty_category());
  EXPECT_TRUE(is_acyclic(hocolim(z)));
  EXPECT_TRUE(is_acyclic(holim(z)));
}

TEST(Holim, Examples) {
  const Delta1 D;
  // lim of F_0 → F_1 is F_0; constant diagrams are projective (P_0)
  EXPECT_EQ(hdims(holim(Complex::stalk(D.constant())), 0), std::vector<std::size_t>{1});
  EXPECT_EQ(hdims(holim(Complex::stalk(D.s0())), 0), std::vector<std::size_t>{1});
  EXPECT_TRUE(is_acyclic(holim(Complex::stalk(D.s1()))));
}

TEST(Ran, AlongPointInclusionGivesInjective) {
  const Delta1 D;
  const Presheaf k1 = free_at(D.k, point_category(), 1, 0);
  // (i_*k)_j = k[hom(i, j)]^*: i = 0 gives S_0, i = 1 gives (1,1)
  const KanResult r0 = ran(point_inclusion(D.d, 0), Complex::stalk(k1));
  EXPECT_EQ(hdims(r0.object, 0), (std::vector<std::size_t>{1, 0}));
  EXPECT_TRUE(r0.certificate.verify());
  const KanResult r1 = ran(point_inclusion(D.d, 1), Complex::stalk(k1));
  EXPECT_EQ(hdims(r1.object, 0), (std::vector<std::size_t>{1, 1}));
  for (int p : {-2, -1, 1}) EXPECT_EQ(hdims(r1.object, p), (std::vector<std::size_t>{0, 0}));
  EXPECT_TRUE(r1.certificate.verify());
}

TEST(Kan, AdjunctionDimensions) {
  const Field k = Field::prime(3);
  const DiagFunctor u = inclusion_lefthalfcap();
  const FinCat cap = u.source();
  const FinCat sq = u.target();
  std::vector<Complex> xs;
  for (ObjId i = 0; i < cap.num_objects(); ++i) xs.push_back(Complex::stalk(free_at(k, cap, 1, i)));
  xs.push_back(Complex::stalk(Presheaf::constant(k, cap, 1)));
  xs.push_back(Complex::stalk(Presheaf::constant(k, cap, 1), 1));
  std::vector<Complex> ys;
  for (ObjId i = 0; i < sq.num_objects(); ++i) ys.push_back(Complex::stalk(free_at(k, sq, 1, i)));
  ys.push_back(Complex::stalk(Presheaf::constant(k, sq, 2)));
  for (const auto& x : xs)
    for (const auto& y : ys)
      for (int n = -1; n <= 2; ++n) EXPECT_EQ(ext_dim(lan_object(u, x), y, n), ext_dim(x, restrict(u, y), n));
  // dually for ran along the cup inclusion
  const DiagFunctor v = inclusion_righthalfcup();
  for (const auto& y : ys)
    for (ObjId i = 0; i < v.source().num_objects(); ++i) {
      const Complex x = Complex::stalk(free_at(k, v.source(), 1, i));
      for (int n = -1; n <= 2; ++n) EXPECT_EQ(ext_dim(y, ran_object(v, x), n), ext_dim(restrict(v, y), x, n));
    }
}

TEST(BaseChange, Examples) {
  const Delta1 D;
  const Complex s0 = Complex::stalk(D.s0()), s1 = Complex::stalk(D.s1()), p0 = Complex::stalk(D.p0());
  for (const Complex& x : {s0, s1, p0}) {
    for (ObjId y = 0; y < 2; ++y) {
      EXPECT_TRUE(base_change(identity_functor(D.d), y, x).quasi_iso);
      EXPECT_TRUE(base_change_left(identity_functor(D.d), y, x).quasi_iso);
    }
    EXPECT_TRUE(base_change(terminal_functor(D.d), 0, x).quasi_iso);
    EXPECT_TRUE(base_change_left(terminal_functor(D.d), 0, x).quasi_iso);
  }
  const Complex k1 = Complex::stalk(Presheaf::constant(D.k, point_category(), 2));
  for (ObjId y = 0; y < 2; ++y) {
    EXPECT_TRUE(base_change(point_inclusion(D.d, 1), y, k1).quasi_iso);
    EXPECT_TRUE(base_change_left(point_inclusion(D.d, 1), y, k1).quasi_iso);
  }
  // a functor with nontrivial comma categories
  const Field q = Field::rationals();
  const DiagFunctor u = inclusion_lefthalfcap();
  const Complex x = Complex::stalk(Presheaf::constant(q, u.source(), 1));
  for (ObjId y = 0; y < 4; ++y) {
    EXPECT_TRUE(base_change(u, y, x).quasi_iso);
    EXPECT_TRUE(base_change_left(u, y, x).quasi_iso);
  }
  EXPECT_THROW(base_change(u, 7, x), InvalidInput);
}

TEST(Recollement, ExtensionsByZero) {
  const Delta1 D;
  const Recollement r(point_inclusion(D.d, 1), point_inclusion(D.d, 0));
  const Complex k = Complex::stalk(Presheaf::constant(D.k, point_category(), 1));
  EXPECT_TRUE(r.j_lower_shriek(k).term(0) == D.s1());
  EXPECT_TRUE(r.i_lower_star(k).term(0) == D.s0());
  // i*j_! = 0 exactly
  EXPECT_TRUE(r.i_upper_star(r.j_lower_shriek(k)).is_zero());
  EXPECT_THROW(Recollement(point_inclusion(D.d, 0), point_inclusion(D.d, 1)), InvalidInput);
  EXPECT_THROW(Recollement(point_inclusion(D.d, 1), point_inclusion(D.d, 1)), InvalidInput);
}

TEST(Recollement, GluingFunctors) {
  const Delta1 D;
  const Recollement r(point_inclusion(D.d, 1), point_inclusion(D.d, 0));
  // i*P_0 = k, i_!k = P_0, ε_i an iso: j^?P_0 ≃ 0
  EXPECT_TRUE(is_acyclic(r.j_upper_query(Complex::stalk(D.p0()))));
  // i*S_1 = 0 so j^?S_1 = j*S_1 = k
  EXPECT_EQ(hdims(r.j_upper_query(Complex::stalk(D.s1())), 0), std::vector<std::size_t>{1});
  // i_!i*S_0 = P_0 → S_0 has cone ΣS_1: j^?S_0 = k[1]
  EXPECT_EQ(hdims(r.j_upper_query(Complex::stalk(D.s0())), -1), std::vector<std::size_t>{1});
  // j*S_0 = 0 so i^!S_0 = i*S_0 = k. For S_1, η_j : S_1 → j_*k = P_0 is the
  // socle with cokernel S_0, so the fiber has k at 0 in degree 1.
  EXPECT_EQ(hdims(r.i_upper_shriek(Complex::stalk(D.s0())), 0), std::vector<std::size_t>{1});
  EXPECT_EQ(hdims(r.i_upper_shriek(Complex::stalk(D.s1())), 1), std::vector<std::size_t>{1});
  EXPECT_EQ(hdims(r.i_upper_shriek(Complex::stalk(D.s1())), 0), std::vector<std::size_t>{0});
}

TEST(Recollement, Triangles) {
  const Field q = Field::rationals();
  const Recollement r = arrow_recollement(delta(1));
  EXPECT_EQ(r.open().target().num_objects(), 4u);
  std::vector<Complex> xs;
  for (ObjId i = 0; i < 4; ++i) xs.push_back(Complex::stalk(free_at(q, r.open().target(), 1, i)));
  xs.push_back(Complex::stalk(Presheaf::constant(q, r.open().target(), 1), 2));
  for (const auto& x : xs) {
    const TriangleCertificate a = r.first_triangle(x);
    const TriangleCertificate b = r.second_triangle(x);
    EXPECT_TRUE(a.quasi_iso);
    EXPECT_TRUE(b.quasi_iso);
    EXPECT_EQ(r.connecting_ambiguity(x), 0u);
    // supported on the open part: i_!i*X = 0 and ε_j is the identity
    const Complex o = r.j_lower_shriek(r.j_upper_star(x));
    EXPECT_TRUE(is_acyclic(r.i_lower_shriek(r.i_upper_star(o))));
    EXPECT_TRUE(r.open_counit(o) == ChainMap::identity(o));
  }
}

TEST(Suspension, ViaRecollement) {
  const Delta1 D;
  const Complex k = Complex::stalk(Presheaf::constant(D.k, point_category(), 1));
  const Suspension s = suspension_via_recollement(k);
  EXPECT_EQ(hdims(s.object, -1), std::vector<std::size_t>{1});
  EXPECT_EQ(hdims(s.object, 0), std::vector<std::size_t>{0});
  EXPECT_TRUE(is_quasi_iso(s.witness));

  for (const Complex& x : {Complex::stalk(D.s0()), Complex::stalk(D.s1()), Complex::stalk(D.p0(), 2),
                           cone(stalk_map(PresheafMap(D.s1(), D.p0(), {Matrix(D.k, 1, 0), Matrix::identity(D.k, 1)}))).object}) {
    const Suspension sx = suspension_via_recollement(x);
    EXPECT_TRUE(sx.witness.target() == shift(x, 1));
    EXPECT_TRUE(is_quasi_iso(sx.witness));
    const Suspension lx = loop_via_recollement(x);
    EXPECT_TRUE(lx.witness.source() == shift(x, -1));
    EXPECT_TRUE(is_quasi_iso(lx.witness));
    // Ω Σ x ≃ x
    const Suspension back = loop_via_recollement(sx.object);
    EXPECT_EQ(homology_profile(back.object, -4, 4), homology_profile(x, -4, 4));
  }
  const Complex acyclic = cone(ChainMap::identity(Complex::stalk(D.p0()))).object;
  EXPECT_TRUE(is_acyclic(suspension_via_recollement(acyclic).object));
}

TEST(Squares, CartesianExamples) {
  const Field q = Field::rationals();
  const FinCat e = point_category();
  const Complex k = Complex::stalk(Presheaf::constant(q, e, 1));
  const Complex z = Complex::zero(q, e);
  const ChainMap id = ChainMap::identity(k);
  // equal rows, identity verticals
  const SquareObject eq = square_from_maps(id, id, id, id);
  EXPECT_TRUE(is_cocartesian(eq).holds);
  EXPECT_TRUE(is_cartesian(eq).holds);
  // k = k over 0 → 0
  const SquareObject kz = square_from_maps(id, ChainMap::zero(k, z), ChainMap::zero(k, z), ChainMap::zero(z, z));
  EXPECT_TRUE(is_cocartesian(kz).holds);
  EXPECT_TRUE(is_cartesian(kz).holds);
  // k → 0, k → 0, 0 → 0: the pushout is Σk and the pullback 0
  const SquareObject bad =
      square_from_maps(ChainMap::zero(k, z), ChainMap::zero(k, z), ChainMap::zero(z, z), ChainMap::zero(z, z));
  EXPECT_FALSE(is_cocartesian(bad).holds);
  EXPECT_FALSE(is_cartesian(bad).holds);
  EXPECT_THROW(standard_triangle(bad), PreconditionFailed);
  EXPECT_THROW(square_from_maps(id, id, id, ChainMap::zero(k, k)), InvalidInput);
}

TEST(Squares, ConflationSquareOverDeltaOne) {
  const Delta1 D;
  const Complex s1 = Complex::stalk(D.s1()), p0 = Complex::stalk(D.p0()), s0 = Complex::stalk(D.s0());
  const Complex z = Complex::zero(D.k, D.d);
  const ChainMap i = stalk_map(PresheafMap(D.s1(), D.p0(), {Matrix(D.k, 1, 0), Matrix::identity(D.k, 1)}));
  const ChainMap p = stalk_map(PresheafMap(D.p0(), D.s0(), {Matrix::identity(D.k, 1), Matrix(D.k, 0, 1)}));
  const SquareObject s = square_from_maps(i, ChainMap::zero(s1, z), p, ChainMap::zero(z, s0));
  EXPECT_TRUE(is_cocartesian(s).holds);
  EXPECT_TRUE(is_cartesian(s).holds);
  EXPECT_TRUE(s.corner(0, 1) == p0);
  EXPECT_TRUE(s.edge(0, 1, 0, 0) == i);

  // the connecting map of S_1 ↣ P_0 ↠ S_0 is the nonzero class in Ext¹(S_0, S_1) = k
  const StandardTriangle t = standard_triangle(s);
  EXPECT_EQ(t.subsquares_bicartesian, (std::vector<bool>{true, true, true}));
  EXPECT_EQ(t.ext_basis.dimension, 1u);
  EXPECT_FALSE(t.delta_class.is_zero());
  EXPECT_TRUE(t.classes_agree());
  EXPECT_TRUE(is_quasi_iso(t.theta.comparison));
}

TEST(Squares, SplitTrianglesHaveZeroDelta) {
  const Field q = Field::rationals();
  const FinCat e = point_category();
  const Presheaf k1 = Presheaf::constant(q, e, 1), k2 = Presheaf::constant(q, e, 2);
  const Complex a = Complex::stalk(k1), b = Complex::stalk(k2), z = Complex::zero(q, e);
  {
    // k ↣ k ↠ 0
    const ChainMap id = ChainMap::identity(a);
    const StandardTriangle t =
        standard_triangle(square_from_maps(id, ChainMap::zero(a, z), ChainMap::zero(a, z), ChainMap::zero(z, z)));
    EXPECT_TRUE(t.delta_class.is_zero() || t.ext_basis.dimension == 0);
    EXPECT_TRUE(t.classes_agree());
  }
  {
    // k ↣ k² ↠ k
    const ChainMap inc = stalk_map(PresheafMap(k1, k2, {Matrix::from_rows(q, {{1}, {0}})}));
    const ChainMap pr = stalk_map(PresheafMap(k2, k1, {Matrix::from_rows(q, {{0, 1}})}));
    const StandardTriangle t =
        standard_triangle(square_from_maps(inc, ChainMap::zero(a, z), pr, ChainMap::zero(z, a)));
    EXPECT_EQ(t.ext_basis.dimension, 0u);
    EXPECT_TRUE(t.classes_agree());
    EXPECT_EQ(t.subsquares_bicartesian, (std::vector<bool>{true, true, true}));
  }
}
