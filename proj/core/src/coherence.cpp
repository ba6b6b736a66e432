#include "derivkit/coherence.hpp"

#include <algorithm>
#include <sstream>

#include "derivkit/error.hpp"

namespace derivkit {

namespace {

template <class F>
void for_composable(const FinCat& c, F f) {
  for (ArrId a = 0; a < c.num_arrows(); ++a) {
    if (c.is_identity(a)) continue;
    for (ArrId b = 0; b < c.num_arrows(); ++b)
      if (!c.is_identity(b) && c.arrow(b).source == c.arrow(a).target) f(b, a);
  }
}

std::string arrow_label(const FinCat& c, ArrId a) {
  return c.arrow(a).name.empty() ? std::to_string(a) : c.arrow(a).name;
}

PresheafMap cone_slot(const ChainMap& f, const Complex& c, int p, int slot) {
  const DirectSum s = direct_sum(std::vector<Presheaf>{f.source().term(p + 1), f.target().term(p)});
  const Presheaf& part = slot == 0 ? f.source().term(p + 1) : f.target().term(p);
  return s.projections[static_cast<std::size_t>(slot)].retyped(c.term(p), part);
}

// (x, y) ↦ h x + g y on Cone(w), for g w = dh + hd.
ChainMap from_cone(const Cone& c, const ChainMap& w, const Homotopy& h, const ChainMap& g) {
  return ChainMap::from_degrees(c.object, g.target(), [&](int p) {
    return compose(h.component(p + 1), cone_slot(w, c.object, p, 0)) +
           compose(g.component(p), cone_slot(w, c.object, p, 1));
  });
}

// Strictly functorial up to homotopy: objects and arrow maps only.
struct ProjDiagram {
  std::vector<Complex> obj;
  std::vector<ChainMap> arr;
};

bool all_zero(const ProjDiagram& d) {
  for (const auto& c : d.obj)
    if (!c.is_zero()) return false;
  return true;
}

// K(D)_j = ⊕_{i ≠ j} ⊕_{h ∈ I(j,i)} D_i, blocks ordered by i and then h.
struct KStage {
  ProjDiagram d;
  std::vector<std::vector<std::pair<ObjId, ArrId>>> blocks;
  std::vector<ComplexSum> sums;
};

KStage k_construction(const FinCat& ic, const Field& k, const FinCat& base, const ProjDiagram& d) {
  KStage s;
  const std::size_t n = ic.num_objects();
  s.blocks.resize(n);
  for (ObjId j = 0; j < n; ++j) {
    std::vector<Complex> parts;
    for (ObjId i = 0; i < n; ++i) {
      if (i == j) continue;
      for (ArrId h : ic.hom(j, i)) {
        s.blocks[j].push_back({i, h});
        parts.push_back(d.obj[i]);
      }
    }
    if (parts.empty()) {
      ComplexSum z;
      z.object = Complex::zero(k, base);
      s.sums.push_back(std::move(z));
    } else {
      s.sums.push_back(direct_sum(parts));
    }
    s.d.obj.push_back(s.sums.back().object);
  }
  auto find = [&](ObjId x, ObjId i, ArrId h) -> std::size_t {
    const auto& bl = s.blocks[x];
    for (std::size_t t = 0; t < bl.size(); ++t)
      if (bl[t].first == i && bl[t].second == h) return t;
    throw InvariantViolation("K-construction: the index category has a cycle");
  };
  for (ArrId a = 0; a < ic.num_arrows(); ++a) {
    const ObjId x = ic.arrow(a).source, y = ic.arrow(a).target;
    if (ic.is_identity(a)) {
      s.d.arr.push_back(ChainMap::identity(s.d.obj[x]));
      continue;
    }
    ChainMap m = ChainMap::zero(s.d.obj[y], s.d.obj[x]);
    const std::size_t ya = find(x, y, a);
    for (std::size_t t = 0; t < s.blocks[y].size(); ++t) {
      const auto [i, h] = s.blocks[y][t];
      const ChainMap& pr = s.sums[y].projections[t];
      m = m + compose(s.sums[x].inclusions[find(x, i, ic.compose(h, a))], pr) -
          compose(s.sums[x].inclusions[ya], compose(d.arr[h], pr));
    }
    s.d.arr.push_back(std::move(m));
  }
  return s;
}

// Q(D) = ⊕_i D_i ⊗ i over I × J.
struct FreeStage {
  std::vector<Complex> parts;  ///< E_i = lan along {i} × J
  ComplexSum sum;
};

FreeStage free_stage(const FinCat& ic, const FinCat& base, const ProjDiagram& d) {
  FreeStage f;
  for (ObjId i = 0; i < ic.num_objects(); ++i)
    f.parts.push_back(lan_free(slice_inclusion(ic, base, i), d.obj[i]));
  f.sum = direct_sum(f.parts);
  return f;
}

// The block of slice(E, i) indexed by h ∈ I(i, i'), E = D_{i'} ⊗ i': D_{i'} → slice(E, i),
// or its transpose (the projection onto that block).
ChainMap block_map(const Complex& m, const Complex& e, const Complex& se, ArrId h, const FinCat& base,
                   bool transpose) {
  const Field& k = m.field();
  const std::size_t aj = base.num_arrows();
  auto comps = [&](int p) {
    const Presheaf& mp = m.term(p);
    const Presheaf& ep = e.term(p);
    std::vector<Matrix> c;
    for (ObjId b = 0; b < base.num_objects(); ++b) {
      Matrix x(k, se.term(p).dim(b), mp.dim(b));
      const auto& sums = mp.free_summands();
      for (std::size_t t = 0; t < sums.size(); ++t)
        for (ArrId beta : base.hom(b, sums[t].object))
          x.set_block(ep.block_offset(t, h * aj + beta), mp.block_offset(t, beta),
                      Matrix::identity(k, sums[t].multiplicity));
      c.push_back(transpose ? x.transpose() : x);
    }
    return c;
  };
  if (transpose)
    return ChainMap::from_degrees(se, m, [&](int p) { return PresheafMap(se.term(p), m.term(p), comps(p), false); },
                                  false);
  return ChainMap::from_degrees(m, se, [&](int p) { return PresheafMap(m.term(p), se.term(p), comps(p), false); },
                                false);
}

// Lift of K(D) ↣ PD ↠ … : Q(KD) → Q(D).
ChainMap stage_map(const FinCat& ic, const FinCat& base, const ProjDiagram& d, const FreeStage& qd,
                   const KStage& ks, const FreeStage& qk) {
  ChainMap u = ChainMap::zero(qk.sum.object, qd.sum.object);
  for (ObjId i = 0; i < ic.num_objects(); ++i) {
    if (ks.blocks[i].empty()) continue;
    const DiagFunctor si = slice_inclusion(ic, base, i);
    const Complex target = restrict(si, qd.sum.object);
    auto into = [&](ObjId i2, ArrId h) {
      const Complex se = restrict(si, qd.parts[i2]);
      return compose(restrict(si, qd.sum.inclusions[i2]), block_map(d.obj[i2], qd.parts[i2], se, h, base, false));
    };
    const ChainMap self = into(i, ic.identity(i));
    ChainMap phi = ChainMap::zero(ks.d.obj[i], target);
    for (std::size_t t = 0; t < ks.blocks[i].size(); ++t) {
      const auto [i2, h] = ks.blocks[i][t];
      const ChainMap& pr = ks.sums[i].projections[t];
      phi = phi + compose(into(i2, h), pr) - compose(self, compose(d.arr[h], pr));
    }
    const ChainMap adj = adjunct(si, phi, qk.parts[i], qd.sum.object);
    u = u + compose(adj, qk.sum.projections[i]);
  }
  return u;
}

// slice(Q(D), j) → D_j, the counit of Q(D) → D at j.
ChainMap stage_counit(const FinCat& ic, const FinCat& base, const ProjDiagram& d, const FreeStage& qd, ObjId j) {
  const DiagFunctor sj = slice_inclusion(ic, base, j);
  const Complex src = restrict(sj, qd.sum.object);
  ChainMap out = ChainMap::zero(src, d.obj[j]);
  for (ObjId i = 0; i < ic.num_objects(); ++i) {
    const Complex se = restrict(sj, qd.parts[i]);
    const ChainMap pr = restrict(sj, qd.sum.projections[i]);
    for (ArrId h : ic.hom(j, i))
      out = out + compose(d.arr[h], compose(block_map(d.obj[i], qd.parts[i], se, h, base, true), pr));
  }
  return out;
}

std::size_t total(const Complex& c) { return c.total_dim(); }

}  // namespace

// Incoherent diagrams ------------------------------------------------------------------

const Field& IncoherentDiagram::default_field() {
  static const Field f = Field::rationals();
  return f;
}

std::size_t IncoherentDiagram::num_composable_pairs() const {
  std::size_t n = 0;
  for_composable(index, [&](ArrId, ArrId) { ++n; });
  return n;
}

void IncoherentDiagram::validate() const {
  if (objects.size() != index.num_objects())
    throw InvalidInput("incoherent diagram: expected " + std::to_string(index.num_objects()) + " objects");
  if (arrows.size() != index.num_arrows())
    throw InvalidInput("incoherent diagram: expected " + std::to_string(index.num_arrows()) + " arrow maps");
  for (ObjId i = 0; i < objects.size(); ++i) {
    if (!(objects[i].shape() == base)) throw InvalidInput("incoherent diagram: object " + index.object_name(i) + " is not over the base");
    if (!(objects[i].field() == field())) throw InvalidInput("incoherent diagram: mixed fields");
  }
  for (ArrId a = 0; a < arrows.size(); ++a) {
    const ObjId x = index.arrow(a).source, y = index.arrow(a).target;
    if (!(arrows[a].source() == objects[y]) || !(arrows[a].target() == objects[x]))
      throw InvalidInput("incoherent diagram: map of arrow " + arrow_label(index, a) + " has the wrong ends");
    arrows[a].validate();
    if (index.is_identity(a) && !(arrows[a] == ChainMap::identity(objects[x])))
      throw InvalidInput("incoherent diagram: identity arrow " + arrow_label(index, a) + " is not sent to an identity");
  }
  for (const auto& [key, h] : composites) {
    const auto [b, a] = key;
    if (b >= index.num_arrows() || a >= index.num_arrows() || index.is_identity(a) || index.is_identity(b) ||
        index.arrow(b).source != index.arrow(a).target)
      throw InvalidInput("incoherent diagram: witness for a pair that is not composable");
    const ChainMap lhs = compose(arrows[a], arrows[b]) - arrows[index.compose(b, a)];
    if (!(h.boundary() == lhs))
      throw InvalidInput("incoherent diagram: witness for (" + arrow_label(index, b) + ", " + arrow_label(index, a) +
                         ") does not bound F(a)F(b) − F(ba)");
  }
}

void IncoherentDiagram::complete_witnesses() {
  for_composable(index, [&](ArrId b, ArrId a) {
    if (composites.count({b, a})) return;
    auto h = homotopy_solve(compose(arrows[a], arrows[b]), arrows[index.compose(b, a)]);
    if (!h)
      throw PreconditionFailed("incoherent diagram: F(" + arrow_label(index, a) + ")F(" + arrow_label(index, b) +
                               ") is not homotopic to F of the composite");
    composites.emplace(std::make_pair(b, a), std::move(*h));
  });
}

IncoherentDiagram dia(const Complex& x, const FinCat& index, const FinCat& base) {
  if (!(x.shape() == product(index, base))) throw InvalidInput("dia: complex is not over index × base");
  IncoherentDiagram f{index, base, {}, {}, {}};
  for (ObjId i = 0; i < index.num_objects(); ++i) f.objects.push_back(slice(x, index, base, i));
  for (ArrId a = 0; a < index.num_arrows(); ++a)
    f.arrows.push_back(index.is_identity(a) ? ChainMap::identity(f.objects[index.arrow(a).source])
                                            : slice_map(x, index, base, a));
  for_composable(index, [&](ArrId b, ArrId a) {
    f.composites.emplace(std::make_pair(b, a),
                         Homotopy::zero(f.objects[index.arrow(b).target], f.objects[index.arrow(a).source]));
  });
  return f;
}

Complex projective_slice(const Complex& x, const FinCat& index, const FinCat& base, ObjId i) {
  const Complex s = slice(x, index, base, i);
  if (s.empty_range() || !x.is_projective()) return s;
  const std::size_t nj = base.num_objects();
  std::vector<Presheaf> terms;
  for (int p = s.lo(); p <= s.hi(); ++p) {
    std::vector<FreeSummand> sums;
    for (const auto& t : x.term(p).free_summands()) {
      const ObjId a = t.object / nj, b = t.object % nj;
      for (std::size_t h = 0; h < index.hom(i, a).size(); ++h) sums.push_back({b, t.multiplicity});
    }
    Presheaf f = free_sum(x.field(), base, sums);
    if (!(f == s.term(p))) throw InvariantViolation("projective slice: layout differs from the restriction");
    terms.push_back(std::move(f));
  }
  std::vector<PresheafMap> diffs;
  for (int p = s.lo(); p < s.hi(); ++p) {
    const auto k = static_cast<std::size_t>(p - s.lo());
    diffs.push_back(s.differential(p).retyped(terms[k], terms[k + 1]));
  }
  return Complex(s.lo(), std::move(terms), std::move(diffs), false);
}

// Toda ---------------------------------------------------------------------------------

TodaReport toda_check(const std::vector<Complex>& f, const std::vector<Complex>& g) {
  TodaReport r;
  for (ObjId i = 0; i < f.size(); ++i) {
    const Complex fi = f[i].trimmed();
    if (fi.empty_range()) continue;
    std::optional<ProjectiveModel> model;
    for (ObjId j = 0; j < g.size(); ++j) {
      const Complex gj = g[j].trimmed();
      if (gj.empty_range()) continue;
      for (int n = 1; n <= fi.hi() - gj.lo(); ++n) {
        if (!model) model = proj_resolution(fi);
        const TodaEntry e{n, i, j, ext(*model, gj, -n).dimension};
        r.entries.push_back(e);
        if (e.dim != 0 && !r.witness) {
          r.pass = false;
          r.witness = e;
        }
      }
    }
  }
  return r;
}

TodaReport toda_check(const IncoherentDiagram& f, const IncoherentDiagram& g) {
  return toda_check(f.objects, g.objects);
}

// Lifting ------------------------------------------------------------------------------

bool LiftCertificate::verify(const IncoherentDiagram& f, const Complex& lift) const {
  try {
    const FinCat& ic = f.index;
    if (slices.size() != ic.num_objects() || comparisons.size() != ic.num_objects() ||
        arrow_homotopies.size() != ic.num_arrows())
      return false;
    for (ObjId i = 0; i < ic.num_objects(); ++i) {
      comparisons[i].validate();
      if (!(comparisons[i].source() == slice(lift, ic, f.base, i)) || !(comparisons[i].target() == f.objects[i]))
        return false;
      if (!is_quasi_iso(comparisons[i])) return false;
    }
    for (ArrId a = 0; a < ic.num_arrows(); ++a) {
      const ObjId x = ic.arrow(a).source, y = ic.arrow(a).target;
      const ChainMap la = slice_map(lift, ic, f.base, a).retyped(comparisons[y].source(), comparisons[x].source());
      if (!(arrow_homotopies[a].boundary() ==
            compose(f.arrows[a], comparisons[y]) - compose(comparisons[x], la)))
        return false;
    }
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

LiftResult lift_object(const IncoherentDiagram& f) {
  f.validate();
  const FinCat& ic = f.index;
  const FinCat& base = f.base;
  const Field& k = f.field();
  const FinCat shape = product(ic, base);
  const std::size_t n = ic.num_objects();
  {
    const TodaReport t = toda_check(f, f);
    if (!t.pass) {
      std::ostringstream os;
      os << "Toda condition fails: dim Hom(Σ^" << t.witness->n << " F_" << ic.object_name(t.witness->i) << ", F_"
         << ic.object_name(t.witness->j) << ") = " << t.witness->dim;
      throw PreconditionFailed(os.str());
    }
  }
  LiftResult out;
  if (n == 0) {
    out.object = Complex::zero(k, shape);
    return out;
  }
  if (n == 1) {
    // A single object is its own lift.
    out.object = restrict(projection_right(ic, base), f.objects[0]);
    const Complex s = slice(out.object, ic, base, 0);
    out.certificate.slices.push_back(s);
    out.certificate.comparisons.push_back(ChainMap::identity(s).retyped(s, f.objects[0]));
    out.certificate.arrow_homotopies.push_back(Homotopy::zero(s, f.objects[0]));
    return out;
  }

  // Projective models with lifted arrow maps.
  std::vector<ProjectiveModel> models;
  ProjDiagram d0;
  for (ObjId i = 0; i < n; ++i) {
    models.push_back(proj_resolution(f.objects[i]));
    d0.obj.push_back(models.back().object);
  }
  for (ArrId a = 0; a < ic.num_arrows(); ++a) {
    const ObjId x = ic.arrow(a).source, y = ic.arrow(a).target;
    if (ic.is_identity(a)) {
      d0.arr.push_back(ChainMap::identity(d0.obj[x]));
      continue;
    }
    auto l = lift_through(compose(f.arrows[a], models[y].map), models[x].map);
    if (!l) throw InvariantViolation("lift: arrow map does not lift to projective models");
    d0.arr.push_back(l->map);
  }

  // D, KD, K²D, … until it vanishes.
  std::vector<ProjDiagram> ds{d0};
  std::vector<KStage> ks;
  for (;;) {
    KStage s = k_construction(ic, k, base, ds.back());
    if (all_zero(s.d)) break;
    if (ks.size() > ic.max_chain_length()) throw InvariantViolation("lift: K-construction does not terminate");
    ds.push_back(s.d);
    ks.push_back(std::move(s));
  }
  const std::size_t m = ks.size();
  std::vector<FreeStage> qs;
  for (const auto& d : ds) qs.push_back(free_stage(ic, base, d));
  std::vector<ChainMap> us(m + 1);  // us[l] : Q_l → Q_{l−1}
  for (std::size_t l = 1; l <= m; ++l) us[l] = stage_map(ic, base, ds[l - 1], qs[l - 1], ks[l - 1], qs[l]);
  for (const auto& q : qs) out.certificate.stage_dims.push_back(total(q.sum.object));
  out.certificate.tower_height = m;

  // K̃^m = Q_m, K̃^l = Cone(w^{l+1}), w^l = (H, ũ^l).
  Complex top = qs[m].sum.object;
  ChainMap w = m > 0 ? us[m] : ChainMap();
  for (std::size_t l = m; l-- > 1;) {
    const Cone c = cone(w);
    auto h = homotopy_solve(compose(us[l], w), ChainMap::zero(w.source(), us[l].target()));
    if (!h) throw InvariantViolation("lift: stage composite is not nullhomotopic");
    w = from_cone(c, w, *h, us[l]);
  }
  std::optional<Cone> final_cone;
  if (m > 0) {
    final_cone = cone(w);
    out.object = final_cone->object;
  } else {
    out.object = top;
  }

  // Comparisons F̃_j → F_j.
  LiftCertificate& cert = out.certificate;
  for (ObjId j = 0; j < n; ++j) {
    const Complex fj = projective_slice(out.object, ic, base, j);
    const DiagFunctor sj = slice_inclusion(ic, base, j);
    const ChainMap proj = compose(models[j].map, stage_counit(ic, base, ds[0], qs[0], j));
    ChainMap c;
    if (m == 0) {
      c = proj.retyped(fj, f.objects[j]);
    } else {
      const Complex wsrc = projective_slice(w.source(), ic, base, j);
      const ChainMap wj = restrict(sj, w).retyped(wsrc, proj.source());
      auto h = homotopy_solve(compose(proj, wj), ChainMap::zero(wsrc, f.objects[j]));
      if (!h) throw InvariantViolation("lift: comparison at " + ic.object_name(j) + " does not extend over the cone");
      const Cone cj = cone(wj);
      c = from_cone(cj, wj, *h, proj).retyped(fj, f.objects[j]);
    }
    cert.slices.push_back(fj);
    cert.comparisons.push_back(std::move(c));
  }
  for (ArrId a = 0; a < ic.num_arrows(); ++a) {
    const ObjId x = ic.arrow(a).source, y = ic.arrow(a).target;
    const ChainMap la = slice_map(out.object, ic, base, a).retyped(cert.slices[y], cert.slices[x]);
    auto h = homotopy_solve(compose(f.arrows[a], cert.comparisons[y]), compose(cert.comparisons[x], la));
    if (!h) throw InvariantViolation("lift: arrow " + arrow_label(ic, a) + " is not preserved up to homotopy");
    cert.arrow_homotopies.push_back(std::move(*h));
  }
  return out;
}

std::optional<ObjectwiseLift> solve_lift(const Complex& src, const std::vector<ChainMap>& c_src, const Complex& tgt,
                                         const std::vector<ChainMap>& c_tgt, const std::vector<ChainMap>& phi,
                                         const FinCat& index, const FinCat& base) {
  const std::size_t n = index.num_objects();
  if (c_src.size() != n || c_tgt.size() != n || phi.size() != n) throw InvalidInput("solve_lift: family sizes");
  if (!src.is_projective()) {
    // Work from a projective model; the map then starts at the model.
    const ProjectiveModel m = proj_resolution(src);
    std::vector<ChainMap> c;
    for (ObjId i = 0; i < n; ++i) {
      const ChainMap mi = restrict(slice_inclusion(index, base, i), m.map);
      c.push_back(compose(c_src[i].retyped(mi.target(), c_src[i].target()), mi));
    }
    return solve_lift(m.object, c, tgt, c_tgt, phi, index, base);
  }
  const Field& k = src.field();
  const ExtResult e = ext(ProjectiveModel{src, ChainMap::identity(src)}, tgt, 0);
  std::vector<ChainMap> basis;
  for (const auto& r : e.representatives) basis.push_back(r.retyped(src, tgt));
  const std::size_t nb = basis.size();

  std::vector<Complex> ps;
  std::vector<ProjectiveHom> homs;
  std::size_t rows = 0, cols = nb;
  for (ObjId i = 0; i < n; ++i) {
    ps.push_back(projective_slice(src, index, base, i));
    homs.emplace_back(ps.back(), c_tgt[i].target());
    rows += homs.back().dim(0);
    cols += homs.back().dim(-1);
  }
  Matrix a(k, rows, cols), b(k, rows, 1);
  std::size_t r0 = 0, c0 = nb;
  for (ObjId i = 0; i < n; ++i) {
    const DiagFunctor si = slice_inclusion(index, base, i);
    const ProjectiveHom& hom = homs[i];
    const ChainMap ci = c_tgt[i];
    for (std::size_t t = 0; t < nb; ++t)
      a.set_block(r0, t, hom.vectorize(compose(ci, restrict(si, basis[t]).retyped(ps[i], ci.source()))));
    b.set_block(r0, 0, hom.vectorize(compose(phi[i], c_src[i].retyped(ps[i], c_src[i].target()))));
    const Matrix dm = hom.differential(-1);
    a.set_block(r0, c0, dm);
    r0 += hom.dim(0);
    c0 += hom.dim(-1);
  }
  const auto sol = solve(a, b);
  if (!sol) return std::nullopt;
  ObjectwiseLift out;
  out.map = ChainMap::zero(src, tgt);
  for (std::size_t t = 0; t < nb; ++t)
    if (sol->is_nonzero_at(t, 0)) out.map = out.map + basis[t].scaled(sol->at(t, 0));
  for (ObjId i = 0; i < n; ++i) {
    const DiagFunctor si = slice_inclusion(index, base, i);
    const ChainMap lhs = compose(c_tgt[i], restrict(si, out.map).retyped(ps[i], c_tgt[i].source()));
    auto h = homotopy_solve(lhs, compose(phi[i], c_src[i].retyped(ps[i], c_src[i].target())));
    if (!h) throw InvariantViolation("solve_lift: solution fails at " + index.object_name(i));
    out.witnesses.push_back(std::move(*h));
  }
  return out;
}

MorphismLift lift_morphism(const IncoherentDiagram& f, const IncoherentDiagram& g, const std::vector<ChainMap>& phi) {
  const FinCat& ic = f.index;
  if (!(g.index == ic) || !(g.base == f.base)) throw InvalidInput("lift_morphism: diagrams have different shapes");
  if (phi.size() != ic.num_objects()) throw InvalidInput("lift_morphism: one map per object expected");
  for (ObjId i = 0; i < phi.size(); ++i)
    if (!(phi[i].source() == f.objects[i]) || !(phi[i].target() == g.objects[i]))
      throw InvalidInput("lift_morphism: map at " + ic.object_name(i) + " has the wrong ends");
  const TodaReport tfg = toda_check(f, g);
  if (!tfg.pass) {
    std::ostringstream os;
    os << "Toda condition fails between source and target: dim Hom(Σ^" << tfg.witness->n << " F_"
       << ic.object_name(tfg.witness->i) << ", G_" << ic.object_name(tfg.witness->j) << ") = " << tfg.witness->dim;
    throw PreconditionFailed(os.str());
  }
  for (ArrId a = 0; a < ic.num_arrows(); ++a) {
    if (ic.is_identity(a)) continue;
    const ObjId x = ic.arrow(a).source, y = ic.arrow(a).target;
    const ProjectiveModel my = proj_resolution(f.objects[y]);
    if (!homotopy_solve(compose(g.arrows[a], compose(phi[y], my.map)),
                        compose(phi[x], compose(f.arrows[a], my.map))))
      throw PreconditionFailed("lift_morphism: family is not natural up to homotopy at arrow " + arrow_label(ic, a));
  }
  MorphismLift out;
  out.source = lift_object(f);
  out.target = lift_object(g);
  if (ic.num_objects() == 1) {
    const DiagFunctor pr = projection_right(ic, f.base);
    out.map = restrict(pr, phi[0]).retyped(out.source.object, out.target.object);
    out.witnesses.push_back(Homotopy::zero(out.source.certificate.slices[0], g.objects[0]));
    return out;
  }
  auto s = solve_lift(out.source.object, out.source.certificate.comparisons, out.target.object,
                      out.target.certificate.comparisons, phi, ic, f.base);
  if (!s) throw InvariantViolation("lift_morphism: no lift although the Toda conditions hold");
  out.map = std::move(s->map);
  out.witnesses = std::move(s->witnesses);
  return out;
}

// Hom comparison -----------------------------------------------------------------------

Complex point_tensor(const Complex& m, const FinCat& index, ObjId i) {
  const FinCat& base = m.shape();
  const FinCat shape = product(index, base);
  const Field& k = m.field();
  if (m.empty_range()) return Complex::zero(k, shape);
  const std::size_t nj = base.num_objects(), aj = base.num_arrows();
  auto term = [&](const Presheaf& f) {
    std::vector<std::size_t> dims;
    for (ObjId j = 0; j < index.num_objects(); ++j)
      for (ObjId b = 0; b < nj; ++b) dims.push_back(index.hom(j, i).size() * f.dim(b));
    std::vector<Matrix> acts;
    for (ArrId g = 0; g < index.num_arrows(); ++g)
      for (ArrId beta = 0; beta < aj; ++beta) {
        const ObjId j2 = index.arrow(g).source, j = index.arrow(g).target;
        const ObjId b2 = base.arrow(beta).source, b = base.arrow(beta).target;
        Matrix x(k, dims[j2 * nj + b2], dims[j * nj + b]);
        const auto& hs = index.hom(j, i);
        const auto& hs2 = index.hom(j2, i);
        for (std::size_t t = 0; t < hs.size(); ++t) {
          const ArrId hg = index.compose(hs[t], g);
          const auto pos = static_cast<std::size_t>(std::find(hs2.begin(), hs2.end(), hg) - hs2.begin());
          x.set_block(pos * f.dim(b2), t * f.dim(b), f.action(beta));
        }
        acts.push_back(std::move(x));
      }
    return Presheaf::from_all_actions(k, shape, std::move(dims), std::move(acts));
  };
  std::vector<Presheaf> terms;
  for (int p = m.lo(); p <= m.hi(); ++p) terms.push_back(term(m.term(p)));
  std::vector<PresheafMap> diffs;
  for (int p = m.lo(); p < m.hi(); ++p) {
    const auto q = static_cast<std::size_t>(p - m.lo());
    std::vector<Matrix> c;
    const PresheafMap d = m.differential(p);
    for (ObjId j = 0; j < index.num_objects(); ++j)
      for (ObjId b = 0; b < nj; ++b)
        c.push_back(Matrix::kronecker(Matrix::identity(k, index.hom(j, i).size()), d.component(b)));
    diffs.emplace_back(terms[q], terms[q + 1], std::move(c), false);
  }
  return Complex(m.lo(), std::move(terms), std::move(diffs), false);
}

namespace {

// The counit i_!i*Y → Y of the abelian left extension by M ⊗ i.
ChainMap point_counit(const Complex& y, const Complex& t, const FinCat& index, const FinCat& base, ObjId i) {
  const std::size_t nj = base.num_objects(), aj = base.num_arrows();
  return ChainMap::from_degrees(t, y, [&](int p) {
    std::vector<Matrix> c;
    const Presheaf& yp = y.term(p);
    for (ObjId j = 0; j < index.num_objects(); ++j)
      for (ObjId b = 0; b < nj; ++b) {
        const auto& hs = index.hom(j, i);
        const std::size_t src = yp.dim(i * nj + b);
        Matrix x(y.field(), yp.dim(j * nj + b), hs.size() * src);
        for (std::size_t t2 = 0; t2 < hs.size(); ++t2)
          x.set_block(0, t2 * src, yp.action(hs[t2] * aj + base.identity(b)));
        c.push_back(std::move(x));
      }
    return PresheafMap(t.term(p), yp, std::move(c), false);
  });
}

struct KernelComplex {
  Complex object;
  ChainMap inclusion;
};

KernelComplex kernel_complex(const ChainMap& f) {
  const Complex& s = f.source();
  if (s.empty_range()) return {s, ChainMap::identity(s)};
  std::vector<SubObject> subs;
  for (int p = s.lo(); p <= s.hi(); ++p) subs.push_back(kernel(f.component(p)));
  std::vector<Presheaf> terms;
  for (const auto& sub : subs) terms.push_back(sub.object);
  std::vector<PresheafMap> diffs;
  for (int p = s.lo(); p < s.hi(); ++p) {
    const auto q = static_cast<std::size_t>(p - s.lo());
    const PresheafMap dc = compose(s.differential(p), subs[q].inclusion);
    std::vector<Matrix> c;
    for (ObjId o = 0; o < s.shape().num_objects(); ++o) {
      auto x = solve(subs[q + 1].inclusion.component(o), dc.component(o));
      if (!x) throw InvariantViolation("kernel complex: differential leaves the kernel");
      c.push_back(std::move(*x));
    }
    diffs.emplace_back(terms[q], terms[q + 1], std::move(c), false);
  }
  Complex k(s.lo(), std::move(terms), std::move(diffs), false);
  ChainMap inc = ChainMap::from_degrees(k, s, [&](int p) {
    return subs[static_cast<std::size_t>(p - s.lo())].inclusion;
  }, false);
  return {std::move(k), std::move(inc)};
}

}  // namespace

CanonicalResolution canonical_resolution(const Complex& x, const FinCat& index, const FinCat& base) {
  if (!(x.shape() == product(index, base))) throw InvalidInput("canonical resolution: complex is not over index × base");
  CanonicalResolution r;
  const std::size_t nj = base.num_objects();
  Complex y = x.trimmed();
  while (!y.is_zero()) {
    if (r.steps > index.max_chain_length() + 1) {
      r.fiber_formula_holds = false;
      break;
    }
    std::vector<Complex> parts;
    for (ObjId i = 0; i < index.num_objects(); ++i) parts.push_back(point_tensor(slice(y, index, base, i), index, i));
    const ComplexSum q = direct_sum(parts);
    ChainMap eps = ChainMap::zero(q.object, y);
    for (ObjId i = 0; i < index.num_objects(); ++i)
      eps = eps + compose(point_counit(y, parts[i], index, base, i), q.projections[i]);
    KernelComplex l = kernel_complex(eps);
    for (int p = y.lo(); p <= y.hi(); ++p) {
      if (!eps.component(p).is_surjective()) r.fiber_formula_holds = false;
      for (ObjId j = 0; j < index.num_objects(); ++j)
        for (ObjId b = 0; b < nj; ++b) {
          std::size_t expect = 0;
          for (ObjId i = 0; i < index.num_objects(); ++i)
            if (i != j) expect += index.hom(j, i).size() * y.term(p).dim(i * nj + b);
          if (l.object.term(p).dim(j * nj + b) != expect) r.fiber_formula_holds = false;
        }
    }
    r.q_terms.push_back(q.object);
    r.counits.push_back(eps);
    r.l_terms.push_back(l.object);
    y = l.object.trimmed();
    ++r.steps;
  }
  return r;
}

HomComparison hom_compare(const Complex& x, const Complex& z, const FinCat& index, const FinCat& base) {
  const FinCat shape = product(index, base);
  if (!(x.shape() == shape) || !(z.shape() == shape)) throw InvalidInput("hom_compare: complexes are not over index × base");
  const Field& k = x.field();
  const std::size_t n = index.num_objects();
  HomComparison out;
  std::vector<Complex> xs, zs;
  for (ObjId i = 0; i < n; ++i) {
    xs.push_back(slice(x, index, base, i));
    zs.push_back(slice(z, index, base, i));
  }
  out.toda = toda_check(xs, zs);
  out.resolution = canonical_resolution(x, index, base);

  const ProjectiveModel px = proj_resolution(x);
  const ExtResult e = ext(px, z, 0);
  out.coherent_dim = e.dimension;

  std::vector<ProjectiveModel> models;
  std::vector<ExtResult> es;
  std::vector<std::size_t> off{0};
  for (ObjId i = 0; i < n; ++i) {
    const Complex ps = projective_slice(px.object, index, base, i);
    models.push_back({ps, restrict(slice_inclusion(index, base, i), px.map).retyped(ps, xs[i])});
    es.push_back(ext(models.back(), zs[i], 0));
    off.push_back(off.back() + es.back().dimension);
  }
  const std::size_t vdim = off.back();

  // dia on Hom(x, z).
  Matrix canon(k, vdim, e.dimension);
  for (std::size_t t = 0; t < e.dimension; ++t)
    for (ObjId i = 0; i < n; ++i) {
      const ChainMap r = restrict(slice_inclusion(index, base, i), e.representatives[t]).retyped(models[i].object, zs[i]);
      canon.set_block(off[i], t, ext_coordinates(es[i], r));
    }

  // φ ↦ (z(a)φ_y − φ_x x(a))_a on ⊕_i Hom(x_i, z_i).
  std::vector<Matrix> blocks;
  for (ArrId a = 0; a < index.num_arrows(); ++a) {
    if (index.is_identity(a)) continue;
    const ObjId s = index.arrow(a).source, t = index.arrow(a).target;
    const ExtResult ea = ext(models[t], zs[s], 0);
    Matrix c(k, ea.dimension, vdim);
    const ChainMap za = slice_map(z, index, base, a);
    const ChainMap xa = slice_map(px.object, index, base, a).retyped(models[t].object, models[s].object);
    for (std::size_t r = 0; r < es[t].dimension; ++r) {
      const ChainMap rho = es[t].representatives[r].retyped(models[t].object, zs[t]);
      c.add_block(0, off[t] + r, ext_coordinates(ea, compose(za, rho)));
    }
    for (std::size_t r = 0; r < es[s].dimension; ++r) {
      const ChainMap sigma = es[s].representatives[r].retyped(models[s].object, zs[s]);
      c.add_block(0, off[s] + r, -ext_coordinates(ea, compose(sigma, xa)));
    }
    blocks.push_back(std::move(c));
  }
  const Matrix constraints = Matrix::vstack(blocks, k, vdim);
  out.incoherent_dim = vdim - rank(constraints);
  out.canonical_rank = rank(canon);
  out.lands_in_natural = (constraints * canon).is_zero();
  return out;
}

}  // namespace derivkit
