#include <algorithm>
#include <sstream>

#include "derivkit/derivator.hpp"
#include "derivkit/error.hpp"

namespace derivkit {

DiagFunctor with_base(const DiagFunctor& u, const FinCat& base) {
  return product(u, identity_functor(base));
}

SquareObject::SquareObject(Complex x, FinCat base) : x_(std::move(x)), base_(std::move(base)) {
  if (!(x_.shape() == product(square(), base_)))
    throw InvalidInput("square object: shape is not □ × " + base_.name());
}

SquareObject SquareObject::plain(const Complex& x) {
  if (!(x.shape() == square())) throw InvalidInput("square object: shape is not □");
  const FinCat e = point_category();
  return SquareObject(restrict(projection_left(square(), e), x), e);
}

Complex SquareObject::corner(int r, int c) const {
  return slice(x_, square(), base_, static_cast<ObjId>(2 * r + c));
}

Complex SquareObject::cap() const { return restrict(with_base(inclusion_lefthalfcap(), base_), x_); }
Complex SquareObject::cup() const { return restrict(with_base(inclusion_righthalfcup(), base_), x_); }

ChainMap SquareObject::edge(int r, int c, int r2, int c2) const {
  const FinCat sq = square();
  const auto& h = sq.hom(static_cast<ObjId>(2 * r + c), static_cast<ObjId>(2 * r2 + c2));
  if (h.empty()) throw InvalidInput("square: no arrow between these corners");
  return slice_map(x_, sq, base_, h.front());
}

SquareCheck is_cocartesian(const SquareObject& s) {
  ChainMap e = counit(with_base(inclusion_lefthalfcap(), s.base()), s.complex());
  const bool q = is_quasi_iso(e);
  return {q, std::move(e)};
}

SquareCheck is_cartesian(const SquareObject& s) {
  ChainMap e = right_unit(with_base(inclusion_righthalfcup(), s.base()), s.complex());
  const bool q = is_quasi_iso(e);
  return {q, std::move(e)};
}

HomotopyPushout homotopy_pushout(const SquareObject& s) {
  const Complex x = s.corner(0, 0), a = s.corner(0, 1), b = s.corner(1, 0), d = s.corner(1, 1);
  const ChainMap alpha = s.edge(0, 1, 0, 0), beta = s.edge(1, 0, 0, 0);
  const ChainMap gamma = s.edge(1, 1, 0, 1), delta = s.edge(1, 1, 1, 0);
  const ComplexSum ab = direct_sum(std::vector<Complex>{a, b});
  const ChainMap col = compose(ab.inclusions[0], alpha) - compose(ab.inclusions[1], beta);
  Cone c = cone(col);
  const ChainMap row = compose(gamma, ab.projections[0]) + compose(delta, ab.projections[1]);
  ChainMap cmp = ChainMap::from_degrees(c.object, d, [&](int p) {
    const DirectSum ds = direct_sum(std::vector<Presheaf>{x.term(p + 1), ab.object.term(p)});
    return compose(row.component(p).retyped(ab.object.term(p), d.term(p)),
                   ds.projections[1].retyped(c.object.term(p), ab.object.term(p)));
  });
  return {std::move(c), std::move(cmp)};
}


SquareObject square_from_maps(const ChainMap& alpha, const ChainMap& beta, const ChainMap& gamma,
                              const ChainMap& delta) {
  const Complex& x = alpha.source();
  const Complex& d = gamma.target();
  if (!(beta.source() == x) || !(gamma.source() == alpha.target()) ||
      !(delta.source() == beta.target()) || !(delta.target() == d))
    throw InvalidInput("square: maps do not form a square");
  const ChainMap diag = compose(gamma, alpha);
  if (!(diag == compose(delta, beta))) throw InvalidInput("square: does not commute");
  const FinCat sq = square();
  const FinCat& base = x.shape();
  const FinCat shape = product(sq, base);
  const Field& k = x.field();
  const std::vector<Complex> corners{x, alpha.target(), beta.target(), d};
  // M_s : corner(target s) → corner(source s) for each arrow s of □.
  auto edge_map = [&](ArrId s) -> const ChainMap* {
    const ObjId a = sq.arrow(s).source, b = sq.arrow(s).target;
    if (a == b) return nullptr;
    if (a == 1 && b == 0) return &alpha;
    if (a == 2 && b == 0) return &beta;
    if (a == 3 && b == 1) return &gamma;
    if (a == 3 && b == 2) return &delta;
    return &diag;
  };
  int lo = 0, hi = -1;
  bool any = false;
  for (const auto& c : corners) {
    if (c.empty_range()) continue;
    lo = any ? std::min(lo, c.lo()) : c.lo();
    hi = any ? std::max(hi, c.hi()) : c.hi();
    any = true;
  }
  if (!any) return SquareObject(Complex::zero(k, shape), base);
  const std::size_t nj = base.num_objects(), aj = base.num_arrows();
  std::vector<Presheaf> terms;
  for (int p = lo; p <= hi; ++p) {
    std::vector<std::size_t> dims;
    for (ObjId c = 0; c < 4; ++c)
      for (ObjId j = 0; j < nj; ++j) dims.push_back(corners[c].term(p).dim(j));
    std::vector<Matrix> actions;
    for (ArrId a = 0; a < shape.num_arrows(); ++a) {
      const ArrId s = a / aj, g = a % aj;
      const ObjId c1 = sq.arrow(s).source;
      const ObjId j2 = base.arrow(g).target;
      const Matrix& act = corners[c1].term(p).action(g);
      const ChainMap* m = edge_map(s);
      actions.push_back(m ? act * m->component(p).component(j2) : act);
    }
    terms.push_back(Presheaf::from_all_actions(k, shape, std::move(dims), std::move(actions)));
  }
  std::vector<PresheafMap> diffs;
  for (int p = lo; p < hi; ++p) {
    std::vector<Matrix> comps;
    for (ObjId c = 0; c < 4; ++c)
      for (ObjId j = 0; j < nj; ++j) comps.push_back(corners[c].differential(p).component(j));
    diffs.emplace_back(terms[static_cast<std::size_t>(p - lo)], terms[static_cast<std::size_t>(p - lo + 1)],
                       std::move(comps), false);
  }
  return SquareObject(Complex(lo, std::move(terms), std::move(diffs)), base);
}

SquareObject triangle_square(const ChainMap& f, const ChainMap& g, const Homotopy& h) {
  const Complex& x = f.source();
  const ChainMap gf = compose(g, f);
  if (!(h.boundary() == gf)) throw InvalidInput("triangle square: h does not bound g∘f");
  const ChainMap id = ChainMap::identity(x);
  const Cone c = cone(id);
  const ChainMap delta = ChainMap::from_degrees(c.object, g.target(), [&](int p) {
    const DirectSum s = direct_sum(std::vector<Presheaf>{x.term(p + 1), x.term(p)});
    return compose(h.component(p + 1), s.projections[0].retyped(c.object.term(p), x.term(p + 1))) +
           compose(gf.component(p), s.projections[1].retyped(c.object.term(p), x.term(p)));
  });
  return square_from_maps(f, c.inclusion, g, delta);
}

namespace {

std::string homology_report(const Complex& c) {
  std::ostringstream os;
  for (int p = c.lo(); p <= c.hi(); ++p) {
    const auto h = homology_dims(c, p);
    std::size_t tot = 0;
    for (auto v : h) tot += v;
    if (tot == 0) continue;
    os << " H^" << p << " dims (";
    for (std::size_t i = 0; i < h.size(); ++i) os << (i ? "," : "") << h[i];
    os << ")";
  }
  return os.str();
}

bool bicartesian(const SquareObject& s) { return is_cocartesian(s).holds && is_cartesian(s).holds; }

}  // namespace

StandardTriangle standard_triangle(const SquareObject& s) {
  const FinCat& base = s.base();
  {
    const SquareCheck co = is_cocartesian(s);
    if (!co.holds)
      throw PreconditionFailed("square is not cocartesian: cone of the counit has" +
                               homology_report(cone(co.map).object));
    const SquareCheck ca = is_cartesian(s);
    if (!ca.holds)
      throw PreconditionFailed("square is not cartesian: cone of the unit has" +
                               homology_report(cone(ca.map).object));
    const Complex b = s.corner(1, 0);
    if (!is_acyclic(b)) throw PreconditionFailed("corner (1,0) is not acyclic:" + homology_report(b));
  }

  StandardTriangle t;
  const Complex r = ran_object(with_base(inclusion_square_arrow(), base), s.complex());
  t.polycartesian = lan_object(with_base(inclusion_squarearrow(), base), r);
  const Complex& p = t.polycartesian;
  const FinCat tw = twosquare();
  auto corner = [&](int row, int col) { return slice(p, tw, base, static_cast<ObjId>(3 * row + col)); };
  auto edge = [&](int r1, int c1, int r2, int c2) {
    return slice_map(p, tw, base, tw.hom(static_cast<ObjId>(3 * r1 + c1), static_cast<ObjId>(3 * r2 + c2)).front());
  };
  t.x = corner(0, 0);
  t.y = corner(0, 1);
  t.z = corner(1, 1);
  t.p12 = corner(1, 2);
  t.f = edge(0, 1, 0, 0);
  t.g = edge(1, 1, 0, 1);
  t.to_p12 = edge(1, 2, 1, 1);

  const SquareObject left(restrict(with_base(left_square(), base), p), base);
  const SquareObject right(restrict(with_base(right_square(), base), p), base);
  const SquareObject outer(restrict(with_base(outer_square(), base), p), base);
  t.subsquares_bicartesian = {bicartesian(left), bicartesian(right), bicartesian(outer)};

  // θ : P_12 ≃ H → ΣX with H the homotopy pushout of X → P_02, X → P_10.
  t.theta = homotopy_pushout(outer);
  const HomotopyPushout hl = homotopy_pushout(left);
  t.z_model = proj_resolution(t.z);
  const Complex sx = shift(t.x, 1);

  const ChainMap to_p12 = compose(t.to_p12, t.z_model.map);
  const ChainMap theta_cmp = t.theta.comparison.retyped(t.theta.comparison.source(), t.p12);
  const auto l1 = lift_through(to_p12, theta_cmp);
  const ChainMap hl_cmp = hl.comparison.retyped(hl.comparison.source(), t.z);
  const auto l2 = lift_through(t.z_model.map, hl_cmp);
  if (!l1 || !l2) throw InvariantViolation("standard triangle: comparison maps are not quasi-isomorphisms");
  t.delta = compose(t.theta.cone.projection, l1->map);
  t.delta = t.delta.retyped(t.delta.source(), sx);
  // Cone(X → Y ⊕ P_10) → Cone(f) forgets P_10 and keeps the projection to ΣX.
  t.cone_delta = compose(hl.cone.projection, l2->map);
  t.cone_delta = t.cone_delta.retyped(t.cone_delta.source(), sx);

  t.ext_basis = ext(t.z_model, t.x, 1);
  t.delta_class = ext_coordinates(t.ext_basis, t.delta);
  t.cone_class = ext_coordinates(t.ext_basis, t.cone_delta);
  return t;
}

}  // namespace derivkit
