#include "derivkit/derivator.hpp"

#include "derivkit/error.hpp"

namespace derivkit {

namespace {

ChainMap lan_free_map(const DiagFunctor& u, const ChainMap& g, const Complex& ls, const Complex& lt) {
  return ChainMap::from_degrees(
      ls, lt,
      [&](int p) {
        return lan_free(u, g.component(p).retyped(g.source().term(p), g.target().term(p)),
                        ls.term(p), lt.term(p));
      },
      false);
}

// ε : u_!Q → y for a model q : Q → u*y.
struct CounitData {
  ProjectiveModel model;
  Complex lan;
  ChainMap map;
};

CounitData counit_data(const DiagFunctor& u, const Complex& y) {
  ProjectiveModel m = proj_resolution(restrict(u, y));
  Complex l = lan_free(u, m.object);
  ChainMap e = adjunct(u, m.map, l, y);
  return {std::move(m), std::move(l), std::move(e)};
}

// Slot `slot` of the cone term C^p = X^{p+1} ⊕ Y^p of f, as a map of presheaves.
PresheafMap cone_slot(const ChainMap& f, const Complex& c, int p, int slot) {
  const DirectSum s = direct_sum(std::vector<Presheaf>{f.source().term(p + 1), f.target().term(p)});
  const Presheaf& part = slot == 0 ? f.source().term(p + 1) : f.target().term(p);
  return s.projections[static_cast<std::size_t>(slot)].retyped(c.term(p), part);
}

}  // namespace

// Free building blocks ---------------------------------------------------------------

Complex lan_free(const DiagFunctor& u, const Complex& p) {
  if (!(p.shape() == u.source())) throw InvalidInput("lan: shape mismatch");
  if (p.empty_range()) return Complex::zero(p.field(), u.target());
  if (!p.is_projective()) throw PreconditionFailed("lan_free: complex is not projective");
  std::vector<Presheaf> terms;
  std::vector<PresheafMap> diffs;
  for (int q = p.lo(); q <= p.hi(); ++q) terms.push_back(lan_free(u, p.term(q)));
  for (int q = p.lo(); q < p.hi(); ++q) {
    const auto k = static_cast<std::size_t>(q - p.lo());
    diffs.push_back(lan_free(u, p.differential(q), terms[k], terms[k + 1]));
  }
  return Complex(p.lo(), std::move(terms), std::move(diffs), false);
}

ChainMap unit_free(const DiagFunctor& u, const Complex& p, const Complex& lan_p) {
  const Complex target = restrict(u, lan_p);
  return ChainMap::from_degrees(
      p, target,
      [&](int q) {
        const Presheaf& pq = p.term(q);
        const Presheaf& lq = lan_p.term(q);
        std::vector<Matrix> images;
        const auto& sums = pq.free_summands();
        for (std::size_t t = 0; t < sums.size(); ++t) {
          const ObjId ut = u(sums[t].object);
          Matrix g(p.field(), lq.dim(ut), sums[t].multiplicity);
          g.set_block(lq.block_offset(t, u.target().identity(ut)), 0,
                      Matrix::identity(p.field(), sums[t].multiplicity));
          images.push_back(std::move(g));
        }
        return map_from_free(pq, target.term(q), images);
      },
      false);
}

ChainMap adjunct(const DiagFunctor& u, const ChainMap& phi, const Complex& lan_q, const Complex& y) {
  return ChainMap::from_degrees(
      lan_q, y,
      [&](int q) {
        const Presheaf& src = phi.source().term(q);
        const PresheafMap c = phi.component(q).retyped(src, restrict(u, y.term(q)));
        return map_from_free(lan_q.term(q), y.term(q), generator_images(c));
      },
      false);
}

// Kan extensions ---------------------------------------------------------------------

bool KanCertificate::verify() const {
  try {
    unit.validate();
    counit.validate();
    unit_lift.validate();
    model.map.validate();
    restricted.map.validate();
    if (!is_quasi_iso(model.map) || !is_quasi_iso(restricted.map)) return false;
    const DiagFunctor& u = left ? functor : opposite(functor);
    if (!(unit_lift_homotopy.boundary() == unit - compose(restricted.map, unit_lift))) return false;
    const Complex lq = counit.source();
    const ChainMap lifted = lan_free_map(u, unit_lift, output, lq);
    if (!(triangle_left.boundary() == ChainMap::identity(output) - compose(counit, lifted))) return false;
    const ChainMap eta_q = unit_free(u, restricted.object, lq);
    return triangle_right.boundary() == restricted.map - compose(restrict(u, counit), eta_q);
  } catch (const std::exception&) {
    return false;
  }
}

KanResult lan(const DiagFunctor& u, const Complex& x) {
  if (!(x.shape() == u.source())) throw InvalidInput("lan: shape mismatch");
  KanCertificate c;
  c.functor = u;
  c.left = true;
  c.input = x;
  c.model = proj_resolution(x);
  c.output = lan_free(u, c.model.object);
  c.unit = unit_free(u, c.model.object, c.output);
  c.restricted = proj_resolution(restrict(u, c.output));
  const Complex lq = lan_free(u, c.restricted.object);
  c.counit = adjunct(u, c.restricted.map, lq, c.output);

  auto lift = lift_through(c.unit, c.restricted.map);
  if (!lift) throw InvariantViolation("lan: unit does not lift through a quasi-isomorphism");
  c.unit_lift = lift->map;
  c.unit_lift_homotopy = lift->homotopy;

  const ChainMap lifted = lan_free_map(u, c.unit_lift, c.output, lq);
  auto tl = homotopy_solve(ChainMap::identity(c.output), compose(c.counit, lifted));
  const ChainMap eta_q = unit_free(u, c.restricted.object, lq);
  auto tr = homotopy_solve(c.restricted.map, compose(restrict(u, c.counit), eta_q));
  if (!tl || !tr) throw InvariantViolation("lan: triangle identity fails up to homotopy");
  c.triangle_left = *tl;
  c.triangle_right = *tr;
  Complex out = c.output;
  return {std::move(out), std::move(c)};
}

KanResult ran(const DiagFunctor& u, const Complex& x) {
  if (!(x.shape() == u.source())) throw InvalidInput("ran: shape mismatch");
  KanResult d = lan(opposite(u), dualize(x));
  d.certificate.functor = u;
  d.certificate.left = false;
  d.certificate.input = x;
  return {dualize(d.object), std::move(d.certificate)};
}

Complex lan_object(const DiagFunctor& u, const Complex& x) {
  if (!(x.shape() == u.source())) throw InvalidInput("lan: shape mismatch");
  return lan_free(u, proj_resolution(x).object);
}

Complex ran_object(const DiagFunctor& u, const Complex& x) {
  if (!(x.shape() == u.source())) throw InvalidInput("ran: shape mismatch");
  return dualize(lan_object(opposite(u), dualize(x)));
}

Complex hocolim(const Complex& x) { return lan_object(terminal_functor(x.shape()), x); }
Complex holim(const Complex& x) { return ran_object(terminal_functor(x.shape()), x); }

ChainMap counit(const DiagFunctor& u, const Complex& y) {
  if (!(y.shape() == u.target())) throw InvalidInput("counit: shape mismatch");
  return counit_data(u, y).map;
}

ChainMap right_unit(const DiagFunctor& u, const Complex& y) {
  if (!(y.shape() == u.target())) throw InvalidInput("unit: shape mismatch");
  const ChainMap e = counit(opposite(u), dualize(y));
  const ChainMap d = dualize(e);
  return d.retyped(y, d.target());
}

// Base change ------------------------------------------------------------------------

// A generator t of Q^p at the comma object (a, f : y → u(a)) goes to
// L(f) η_a q(t) ∈ (u_!P)_y: the chain-level composite of the unit, the comma
// 2-cell and the counit of the comma square.
BaseChange base_change_left(const DiagFunctor& u, ObjId y, const Complex& x) {
  if (!(x.shape() == u.source())) throw InvalidInput("base change: shape mismatch");
  if (y >= u.target().num_objects()) throw InvalidInput("base change: unknown object");
  const ProjectiveModel px = proj_resolution(x);
  const Complex& p = px.object;
  const Complex l = lan_free(u, p);
  const ChainMap eta = unit_free(u, p, l);
  const Complex ly = restrict(point_inclusion(u.target(), y), l);

  const CommaCategory cc = comma_under(u, y);
  const ProjectiveModel q = proj_resolution(restrict(cc.forget, p));
  const DiagFunctor to_point = terminal_functor(cc.category);
  const Complex h = lan_free(to_point, q.object);

  ChainMap m = ChainMap::from_degrees(h, ly, [&](int deg) {
    const Presheaf& qd = q.object.term(deg);
    std::vector<Matrix> images;
    if (qd.total_dim() > 0) {
      const auto& sums = qd.free_summands();
      for (std::size_t t = 0; t < sums.size(); ++t) {
        const ObjId c = sums[t].object;
        const auto [a, f] = cc.entries[c];
        const Matrix gens = q.map.component(deg).component(c).block(
            0, qd.generator_offset(t), p.term(deg).dim(a), sums[t].multiplicity);
        images.push_back(l.term(deg).action(f) * eta.component(deg).component(a) * gens);
      }
    }
    return map_from_free(h.term(deg), ly.term(deg), images);
  });
  const bool qi = is_quasi_iso(m);
  return {std::move(m), qi};
}

BaseChange base_change(const DiagFunctor& u, ObjId y, const Complex& x) {
  if (!(x.shape() == u.source())) throw InvalidInput("base change: shape mismatch");
  const BaseChange d = base_change_left(opposite(u), y, dualize(x));
  return {dualize(d.map), d.quasi_iso};
}

// Slices -----------------------------------------------------------------------------

ArrId product_arrow(const FinCat& i_shape, const FinCat& j_shape, ArrId b, ObjId j) {
  (void)i_shape;
  return b * j_shape.num_arrows() + j_shape.identity(j);
}

Complex slice(const Complex& x, const FinCat& i_shape, const FinCat& j_shape, ObjId i) {
  return restrict(slice_inclusion(i_shape, j_shape, i), x);
}

ChainMap slice_map(const Complex& x, const FinCat& i_shape, const FinCat& j_shape, ArrId b) {
  const Complex src = slice(x, i_shape, j_shape, i_shape.arrow(b).target);
  const Complex tgt = slice(x, i_shape, j_shape, i_shape.arrow(b).source);
  return ChainMap::from_degrees(src, tgt, [&](int p) {
    std::vector<Matrix> c;
    for (ObjId j = 0; j < j_shape.num_objects(); ++j)
      c.push_back(x.term(p).action(product_arrow(i_shape, j_shape, b, j)));
    return PresheafMap(src.term(p), tgt.term(p), std::move(c), false);
  });
}

// Recollement ------------------------------------------------------------------------

Recollement::Recollement(DiagFunctor j, DiagFunctor i) : j_(std::move(j)), i_(std::move(i)) {
  if (!(j_.target() == i_.target())) throw InvalidInput("recollement: different ambient shapes");
  if (!is_open_immersion(j_)) throw InvalidInput("recollement: j is not an open immersion");
  if (!is_closed_immersion(i_)) throw InvalidInput("recollement: i is not a closed immersion");
  std::vector<int> hits(j_.target().num_objects(), 0);
  for (ObjId x : j_.object_map()) ++hits[x];
  for (ObjId x : i_.object_map()) ++hits[x];
  for (int h : hits)
    if (h != 1) throw InvalidInput("recollement: images do not partition the objects");
}

Complex Recollement::j_lower_shriek(const Complex& x) const { return extend_by_zero(j_, x); }
Complex Recollement::j_upper_star(const Complex& x) const { return restrict(j_, x); }
Complex Recollement::i_lower_star(const Complex& x) const { return extend_by_zero(i_, x); }
Complex Recollement::i_upper_star(const Complex& x) const { return restrict(i_, x); }
Complex Recollement::i_lower_shriek(const Complex& x) const { return lan_object(i_, x); }
Complex Recollement::j_lower_star(const Complex& x) const { return ran_object(j_, x); }

Complex Recollement::j_upper_query(const Complex& x) const {
  return restrict(j_, cone(counit(i_, x)).object);
}

Complex Recollement::i_upper_shriek(const Complex& x) const {
  return restrict(i_, shift(cone(right_unit(j_, x)).object, -1));
}

namespace {

ChainMap support_map(const DiagFunctor& u, const Complex& s, const Complex& t) {
  std::vector<bool> in(u.target().num_objects(), false);
  for (ObjId x : u.object_map()) in[x] = true;
  return ChainMap::from_degrees(s, t, [&](int p) {
    std::vector<Matrix> c;
    for (ObjId y = 0; y < in.size(); ++y)
      c.push_back(in[y] ? Matrix::identity(s.field(), s.term(p).dim(y))
                        : Matrix(s.field(), t.term(p).dim(y), s.term(p).dim(y)));
    return PresheafMap(s.term(p), t.term(p), std::move(c), false);
  });
}

}  // namespace

ChainMap Recollement::open_counit(const Complex& x) const {
  return support_map(j_, j_lower_shriek(j_upper_star(x)), x);
}

ChainMap Recollement::closed_unit(const Complex& x) const {
  return support_map(i_, x, i_lower_star(i_upper_star(x)));
}

TriangleCertificate Recollement::first_triangle(const Complex& x) const {
  TriangleCertificate t;
  t.first = counit(i_, x);
  t.cone = cone(t.first);
  t.third = j_lower_shriek(restrict(j_, t.cone.object));
  // j_!j*C → C is the identity on the open part; i*C is acyclic.
  t.comparison = support_map(j_, t.third, t.cone.object);
  t.comparison_into_cone = true;
  t.quasi_iso = is_quasi_iso(t.comparison);
  return t;
}

TriangleCertificate Recollement::second_triangle(const Complex& x) const {
  TriangleCertificate t;
  t.first = open_counit(x);
  t.cone = cone(t.first);
  t.third = i_lower_star(i_upper_star(x));
  const ChainMap eta = closed_unit(x);
  // (0, η_i) : A^{p+1} ⊕ X^p → i_*i*X^p; η_i ε_j = 0 makes it a chain map.
  t.comparison = ChainMap::from_degrees(t.cone.object, t.third, [&](int p) {
    return compose(eta.component(p), cone_slot(t.first, t.cone.object, p, 1))
        .retyped(t.cone.object.term(p), t.third.term(p));
  });
  t.comparison_into_cone = false;
  t.quasi_iso = is_quasi_iso(t.comparison);
  return t;
}

std::size_t Recollement::connecting_ambiguity(const Complex& x) const {
  const ChainMap e = counit(i_, x);
  return ext_dim(e.source(), j_lower_shriek(j_upper_query(x)), -1);
}

Recollement arrow_recollement(const FinCat& i_shape) {
  const FinCat d1 = delta(1);
  const FinCat t = product(i_shape, d1);
  auto at = [&](ObjId level) {
    std::vector<ObjId> o;
    std::vector<ArrId> a;
    for (ObjId x = 0; x < i_shape.num_objects(); ++x) o.push_back(x * 2 + level);
    for (ArrId b = 0; b < i_shape.num_arrows(); ++b) a.push_back(product_arrow(i_shape, d1, b, level));
    return DiagFunctor(i_shape, t, std::move(o), std::move(a), level ? "j" : "i");
  };
  return Recollement(at(1), at(0));
}

// Suspension and loop ----------------------------------------------------------------

// With Y = i_*x and ε : i_!Q → Y, j^?Y = j*Cone(ε) has terms j*(i_!Q)^{p+1}
// (Y vanishes on the open part), and j*i_!Q ≅ Q blockwise since the arrows
// (b,1) → (a,0) of I × Δ1 are the arrows b → a of I.
Suspension suspension_via_recollement(const Complex& x) {
  const FinCat& s = x.shape();
  const Recollement r = arrow_recollement(s);
  const Complex y = r.i_lower_star(x);
  const CounitData e = counit_data(r.closed(), y);
  const Cone c = cone(e.map);
  Complex obj = restrict(r.open(), c.object);
  const Complex sx = shift(x, 1);
  const ChainMap& q = e.model.map;
  ChainMap w = ChainMap::from_degrees(obj, sx, [&](int p) {
    const Presheaf& qt = e.model.object.term(p + 1);
    const Presheaf& lt = e.lan.term(p + 1);
    std::vector<Matrix> comps;
    for (ObjId b = 0; b < s.num_objects(); ++b) {
      // j*L at b = L at (b,1); the (b,1) → (a,0) arrows are (h, a).
      Matrix perm(x.field(), qt.dim(b), lt.dim(r.open()(b)));
      if (qt.total_dim() > 0) {
        const auto& sums = qt.free_summands();
        const DiagFunctor pr = projection_left(s, delta(1));
        for (std::size_t t = 0; t < sums.size(); ++t)
          for (ArrId hh : lt.shape().hom(r.open()(b), r.closed()(sums[t].object))) {
            const std::size_t r0 = qt.block_offset(t, pr.map_arrow(hh));
            const std::size_t c0 = lt.block_offset(t, hh);
            for (std::size_t k = 0; k < sums[t].multiplicity; ++k) perm.set(r0 + k, c0 + k, 1L);
          }
      }
      Matrix m = q.component(p + 1).component(b) * perm;
      comps.push_back(Matrix::hstack({m, Matrix(x.field(), m.rows(), obj.term(p).dim(b) - perm.cols())},
                                     x.field(), m.rows()));
    }
    return PresheafMap(obj.term(p), sx.term(p), std::move(comps), false);
  });
  return {std::move(obj), std::move(w)};
}

// Dually, with Y = j_!x, η : Y → j_*x is D of ε' : (j°)_!Q' → DY, and
// i^!Y = i*Σ^{-1}Cone(η) has terms i*(D L')^{p-1}; the blocks of L' at (b,0)
// are those of Q' at b, and Q' → Dx transposes to x → DQ'.
Suspension loop_via_recollement(const Complex& x) {
  const FinCat& s = x.shape();
  const Recollement r = arrow_recollement(s);
  const Complex y = r.j_lower_shriek(x);
  const CounitData e = counit_data(opposite(r.open()), dualize(y));
  const ChainMap eta = dualize(e.map).retyped(y, dualize(e.lan));
  const Cone c = cone(eta);
  Complex obj = restrict(r.closed(), shift(c.object, -1));
  const Complex ox = shift(x, -1);
  const FinCat to = opposite(y.shape());
  const DiagFunctor pr = projection_left(s, delta(1));
  ChainMap w = ChainMap::from_degrees(ox, obj, [&](int p) {
    const Presheaf& qt = e.model.object.term(1 - p);
    const Presheaf& lt = e.lan.term(1 - p);
    std::vector<Matrix> comps;
    for (ObjId b = 0; b < s.num_objects(); ++b) {
      const ObjId ib = r.closed()(b);
      Matrix perm(x.field(), qt.dim(b), lt.dim(ib));
      if (qt.total_dim() > 0) {
        const auto& sums = qt.free_summands();
        for (std::size_t t = 0; t < sums.size(); ++t)
          for (ArrId hh : to.hom(ib, r.open()(sums[t].object))) {
            const std::size_t r0 = qt.block_offset(t, pr.map_arrow(hh));
            const std::size_t c0 = lt.block_offset(t, hh);
            for (std::size_t k = 0; k < sums[t].multiplicity; ++k) perm.set(r0 + k, c0 + k, 1L);
          }
      }
      const Matrix m = perm.transpose() * e.model.map.component(1 - p).component(b).transpose();
      // (Σ^{-1}C)^p = Y^p ⊕ R^{p-1}; Y vanishes on the closed part.
      comps.push_back(Matrix::vstack({Matrix(x.field(), obj.term(p).dim(b) - m.rows(), m.cols()), m},
                                     x.field(), m.cols()));
    }
    return PresheafMap(ox.term(p), obj.term(p), std::move(comps), false);
  });
  return {std::move(obj), std::move(w)};
}

}  // namespace derivkit
