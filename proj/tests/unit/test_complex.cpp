#include <gtest/gtest.h>

#include "derivkit/complex.hpp"
#include "derivkit/error.hpp"

using namespace derivkit;

namespace {

struct Delta1 {
  Field k = Field::f2();
  FinCat d = delta(1);
  Presheaf s0() const { return Presheaf::from_generators(k, d, {1, 0}, {Matrix(k, 0, 1)}); }
  Presheaf s1() const { return Presheaf::from_generators(k, d, {0, 1}, {Matrix(k, 1, 0)}); }
  Presheaf p0() const { return free_at(k, d, 1, 0); }
  Presheaf p1() const { return free_at(k, d, 1, 1); }
  Presheaf simple(int i) const { return i == 0 ? s0() : s1(); }
  // socle inclusion P_1 ↪ P_0
  ChainMap socle() const {
    const Complex a = Complex::stalk(p1()), b = Complex::stalk(p0());
    return ChainMap(a, b, {PresheafMap(p1(), p0(), {Matrix(k, 1, 0), Matrix::identity(k, 1)})});
  }
};

std::vector<std::size_t> zeros(std::size_t n) { return std::vector<std::size_t>(n, 0); }

// Σ_n (−1)^n dim Hom(x, Σ^n y) from dimension vectors alone: write [x] in the
// basis of projectives via the Cartan matrix C[j][i] = |hom(j, i)|; then
// ⟨P_i, y⟩ = dim y_i.
long euler_form(const Complex& x, const Complex& y) {
  const FinCat& c = x.shape();
  const Field q = Field::rationals();
  const std::size_t n = c.num_objects();
  Matrix cartan(q, n, n), dx(q, n, 1), dy(q, n, 1);
  for (ObjId j = 0; j < n; ++j)
    for (ObjId i = 0; i < n; ++i) cartan.set(j, i, static_cast<long>(c.hom(j, i).size()));
  for (int p = x.lo(); p <= x.hi(); ++p)
    for (ObjId j = 0; j < n; ++j)
      dx.set(j, 0, dx.at(j, 0) + (p % 2 == 0 ? 1 : -1) * static_cast<long>(x.term(p).dim(j)));
  for (int p = y.lo(); p <= y.hi(); ++p)
    for (ObjId j = 0; j < n; ++j)
      dy.set(j, 0, dy.at(j, 0) + (p % 2 == 0 ? 1 : -1) * static_cast<long>(y.term(p).dim(j)));
  const Matrix a = *solve(cartan, dx);
  const mpq_class v = (a.transpose() * dy).at(0, 0);
  return v.get_num().get_si();
}

}  // namespace

TEST(Shift, Examples) {
  const Delta1 D;
  const Complex x = Complex::stalk(D.p0());
  const Complex s = shift(x, 1);
  EXPECT_EQ(s.lo(), -1);
  EXPECT_EQ(s.hi(), -1);
  EXPECT_TRUE(s.term(-1) == D.p0());
  EXPECT_TRUE(shift(x, 0) == x);
  const Complex c = cone(D.socle()).object;
  EXPECT_TRUE(shift(shift(c, 1), -1) == c);
  // differential picks up the sign (visible over Q)
  const Field q = Field::rationals();
  const Presheaf k1 = free_at(q, point_category(), 1, 0);
  const Complex two(0, {k1, k1}, {PresheafMap::identity(k1)});
  EXPECT_EQ(shift(two, 1).differential(-1).component(0), Matrix::from_rows(q, {{-1}}));
  EXPECT_EQ(shift(two, 2).differential(-2).component(0), Matrix::from_rows(q, {{1}}));
}

TEST(Complex, RejectsNonComplexes) {
  const Field q = Field::rationals();
  const Presheaf k1 = free_at(q, point_category(), 1, 0);
  EXPECT_THROW(Complex(0, {k1, k1, k1}, {PresheafMap::identity(k1), PresheafMap::identity(k1)}),
               InvalidInput);
}

TEST(Cone, Examples) {
  const Delta1 D;
  const Complex x = Complex::stalk(D.s0());
  EXPECT_TRUE(is_acyclic(cone(ChainMap::identity(x)).object));
  // f = 0 : X → Y gives ΣX ⊕ Y
  const Complex y = Complex::stalk(D.p0(), 1);
  const Cone z = cone(ChainMap::zero(x, y));
  EXPECT_EQ(z.object.term(-1).dims(), D.s0().dims());
  EXPECT_EQ(z.object.term(1).dims(), D.p0().dims());
  EXPECT_TRUE(z.object.differential(-1).is_zero());
  // socle inclusion: the cone is S_0 up to quasi-isomorphism
  const Cone c = cone(D.socle());
  EXPECT_EQ(homology_dims(c.object, 0), (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(homology_dims(c.object, -1), zeros(2));
  EXPECT_TRUE(homology(c.object, 0) == D.s0());
  c.inclusion.validate();
  c.projection.validate();
}

TEST(Homology, Examples) {
  const Delta1 D;
  const Complex x = Complex::stalk(D.s1(), 3);
  EXPECT_TRUE(homology(x, 3) == D.s1());
  EXPECT_TRUE(homology(x, 2).is_zero());
  const Field k = Field::prime(5);
  const Presheaf k1 = free_at(k, point_category(), 1, 0);
  const Complex z(0, {k1, k1}, {PresheafMap::zero(k1, k1)});
  EXPECT_EQ(homology_dims(z, 0), (std::vector<std::size_t>{1}));
  EXPECT_EQ(homology_dims(z, 1), (std::vector<std::size_t>{1}));
}

TEST(ProjResolution, Examples) {
  const Delta1 D;
  const Complex p = Complex::stalk(D.p0());
  const ProjectiveModel m = proj_resolution(p);
  EXPECT_TRUE(m.object == p);
  EXPECT_TRUE(m.map == ChainMap::identity(p));

  const ProjectiveModel r = proj_resolution(Complex::stalk(D.s0()));
  EXPECT_EQ(r.object.lo(), -1);
  EXPECT_EQ(r.object.hi(), 0);
  EXPECT_TRUE(r.object.term(-1) == D.p1());
  EXPECT_TRUE(r.object.term(0) == D.p0());
  EXPECT_TRUE(r.object.is_projective());
  r.map.validate();
  EXPECT_TRUE(is_quasi_iso(r.map));
}

TEST(ProjResolution, WidthBoundOnASquare) {
  const Field k = Field::rationals();
  const FinCat c = square();
  // two-term complex of constants with a scalar differential
  const Presheaf a = Presheaf::constant(k, c, 1);
  const Presheaf b = Presheaf::constant(k, c, 2);
  std::vector<Matrix> comps(c.num_objects(), Matrix::from_rows(k, {{1}, {2}}));
  const Complex x(0, {a, b}, {PresheafMap(a, b, comps)});
  const ProjectiveModel m = proj_resolution(x);
  EXPECT_TRUE(is_quasi_iso(m.map));
  EXPECT_LE(m.object.hi() - m.object.lo(), (x.hi() - x.lo()) + static_cast<int>(c.max_chain_length()));
}

TEST(Ext, SimplesOverDeltaOne) {
  const Delta1 D;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int n = -2; n <= 3; ++n) {
        const std::size_t expect = (n == 0 && i == j) || (n == 1 && i == 0 && j == 1) ? 1 : 0;
        EXPECT_EQ(ext_dim(Complex::stalk(D.simple(i)), Complex::stalk(D.simple(j)), n), expect)
            << i << " " << j << " " << n;
      }
  const ExtResult e = ext(Complex::stalk(D.s0()), Complex::stalk(D.s1()), 1);
  ASSERT_EQ(e.representatives.size(), 1u);
  e.representatives[0].validate();
  EXPECT_FALSE(e.representatives[0].is_zero());
  EXPECT_EQ(ext_coordinates(e, e.representatives[0]), Matrix::from_rows(D.k, {{1}}));
}

TEST(Ext, VanishesAboveChainLength) {
  const Field k = Field::prime(3);
  const FinCat c = cube(2);
  const Presheaf f = Presheaf::constant(k, c, 1);
  for (ObjId i = 0; i < c.num_objects(); ++i) {
    const Presheaf s = extend_by_zero(point_inclusion(c, i), free_at(k, point_category(), 1, 0));
    for (int n = 3; n <= 4; ++n) {
      EXPECT_EQ(ext_dim(Complex::stalk(s), Complex::stalk(f), n), 0u);
      EXPECT_EQ(ext_dim(Complex::stalk(f), Complex::stalk(s), n), 0u);
    }
  }
  // S_(1,1) has Ext^2 into S_(0,0) over the commutative square
  const auto simple = [&](const char* name) {
    return Complex::stalk(extend_by_zero(point_inclusion(c, c.object(name)), free_at(k, point_category(), 1, 0)));
  };
  EXPECT_EQ(ext_dim(simple("(0,0)"), simple("(1,1)"), 2), 1u);
  EXPECT_EQ(ext_dim(simple("(0,0)"), simple("(0,1)"), 1), 1u);
}

TEST(Ext, ProjectiveSourceOnlyInDegreeZero) {
  const Field k = Field::f2();
  const FinCat c = delta(2);
  const Presheaf y = Presheaf::constant(k, c, 2);
  for (ObjId i = 0; i < c.num_objects(); ++i)
    for (int n = -2; n <= 2; ++n)
      EXPECT_EQ(ext_dim(Complex::stalk(free_at(k, c, 2, i)), Complex::stalk(y), n), n == 0 ? 4u : 0u);
}

TEST(Ext, EulerForm) {
  const Delta1 D;
  const std::vector<Complex> xs = {Complex::stalk(D.s0()), Complex::stalk(D.s1(), 1),
                                   cone(D.socle()).object, Complex::stalk(D.p0(), -1)};
  for (const auto& x : xs)
    for (const auto& y : xs) {
      long chi = 0;
      for (int n = -6; n <= 6; ++n) chi += (n % 2 == 0 ? 1 : -1) * static_cast<long>(ext_dim(x, y, n));
      EXPECT_EQ(chi, euler_form(x, y));
    }
}

TEST(Ext, InvariantUnderQuasiIso) {
  const Delta1 D;
  const Complex x = Complex::stalk(D.s0());
  const Complex c = cone(D.socle()).object;  // ≃ S_0
  for (int n = -1; n <= 2; ++n) {
    EXPECT_EQ(ext_dim(x, Complex::stalk(D.s1()), n), ext_dim(c, Complex::stalk(D.s1()), n));
    EXPECT_EQ(ext_dim(Complex::stalk(D.p0()), x, n), ext_dim(Complex::stalk(D.p0()), c, n));
  }
}

TEST(HomotopySolve, Examples) {
  const Delta1 D;
  const Complex x = Complex::stalk(D.s0());
  const ChainMap id = ChainMap::identity(x);
  const auto h0 = homotopy_solve(id, id);
  ASSERT_TRUE(h0);
  EXPECT_TRUE(h0->boundary().is_zero());

  for (const Complex& base : {x, Complex::stalk(D.p0())}) {
    const Complex c = cone(ChainMap::identity(base)).object;
    const auto h = homotopy_solve(ChainMap::identity(c), ChainMap::zero(c, c));
    ASSERT_TRUE(h);
    EXPECT_TRUE(h->boundary() == ChainMap::identity(c));
  }
  const Complex k = Complex::stalk(free_at(D.k, point_category(), 1, 0));
  EXPECT_FALSE(homotopy_solve(ChainMap::identity(k), ChainMap::zero(k, k)));
  EXPECT_FALSE(homotopy_solve(id, ChainMap::zero(x, x)));
}

TEST(QuasiIso, Examples) {
  const Delta1 D;
  const Complex x = Complex::stalk(D.s0());
  EXPECT_TRUE(is_quasi_iso(ChainMap::identity(x)));
  const Complex a = cone(ChainMap::identity(x)).object;
  EXPECT_TRUE(is_quasi_iso(ChainMap::zero(a, a)));
  EXPECT_FALSE(is_quasi_iso(D.socle()));
}

TEST(QuasiIso, PointwiseDetection) {
  const Delta1 D;
  const ChainMap f = D.socle();
  bool all = true;
  for (ObjId i = 0; i < D.d.num_objects(); ++i) all = all && is_quasi_iso(restrict(point_inclusion(D.d, i), f));
  EXPECT_EQ(all, is_quasi_iso(f));
}

TEST(Lift, ThroughResolution) {
  const Delta1 D;
  const Complex x = Complex::stalk(D.s0());
  const ProjectiveModel m = proj_resolution(x);
  const auto l = lift_through(m.map, m.map);
  ASSERT_TRUE(l);
  EXPECT_TRUE(m.map - compose(m.map, l->map) == l->homotopy.boundary());
  // no lift of the resolution through the zero map
  EXPECT_FALSE(lift_through(m.map, ChainMap::zero(x, x)));
}

TEST(Dualize, ComplexInvolution) {
  const Delta1 D;
  const Complex c = cone(D.socle()).object;
  const Complex dd = dualize(dualize(c));
  EXPECT_TRUE(dd == c);
  EXPECT_EQ(dualize(c).lo(), -c.hi());
}
