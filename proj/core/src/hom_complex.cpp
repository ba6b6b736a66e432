#include "derivkit/complex.hpp"
#include "derivkit/error.hpp"

namespace derivkit {

namespace {

mpq_class sign(int n) { return (n % 2 == 0) ? mpq_class(1) : mpq_class(-1); }

void require_free(const Presheaf& p, const char* what) {
  if (!p.is_free()) throw InvalidInput(std::string(what) + ": source must be a free presheaf");
}

}  // namespace

// Maps out of free presheaves ---------------------------------------------------------

std::size_t free_hom_dim(const Presheaf& p, const Presheaf& g) {
  require_free(p, "free_hom_dim");
  std::size_t n = 0;
  for (const auto& s : p.free_summands()) n += g.dim(s.object) * s.multiplicity;
  return n;
}

Matrix free_hom_coords(const PresheafMap& phi) {
  require_free(phi.source(), "free_hom_coords");
  const auto imgs = generator_images(phi);
  Matrix out(phi.source().field(), free_hom_dim(phi.source(), phi.target()), 1);
  std::size_t off = 0;
  for (const auto& m : imgs)
    for (std::size_t c = 0; c < m.cols(); ++c)
      for (std::size_t r = 0; r < m.rows(); ++r, ++off)
        if (m.is_nonzero_at(r, c)) out.set(off, 0, m.at(r, c));
  return out;
}

PresheafMap free_hom_map(const Presheaf& p, const Presheaf& g, const Matrix& coords,
                         std::size_t offset) {
  require_free(p, "free_hom_map");
  std::vector<Matrix> imgs;
  std::size_t off = offset;
  for (const auto& s : p.free_summands()) {
    Matrix m(p.field(), g.dim(s.object), s.multiplicity);
    for (std::size_t c = 0; c < m.cols(); ++c)
      for (std::size_t r = 0; r < m.rows(); ++r, ++off)
        if (coords.is_nonzero_at(off, 0)) m.set(r, c, coords.at(off, 0));
    imgs.push_back(std::move(m));
  }
  return map_from_free(p, g, imgs);
}

// f ∘ φ has generator images Σ_{s,h} G(h) F_s C_{s,h}, where C_{s,h} is the
// (s, h) block of φ on the generators of P'; vec(G(h) F C) = (C^T ⊗ G(h)) vec F.
Matrix free_precompose(const PresheafMap& phi, const Presheaf& g) {
  const Presheaf& pp = phi.source();
  const Presheaf& p = phi.target();
  require_free(pp, "free_precompose");
  require_free(p, "free_precompose");
  const FinCat& s = p.shape();
  const Field& k = p.field();
  const auto& src = pp.free_summands();
  const auto& tgt = p.free_summands();
  std::vector<std::size_t> coff(tgt.size()), roff(src.size());
  std::size_t n = 0;
  for (std::size_t t = 0; t < tgt.size(); ++t) coff[t] = n, n += g.dim(tgt[t].object) * tgt[t].multiplicity;
  std::size_t m = 0;
  for (std::size_t t = 0; t < src.size(); ++t) roff[t] = m, m += g.dim(src[t].object) * src[t].multiplicity;
  Matrix out(k, m, n);
  for (std::size_t t = 0; t < src.size(); ++t) {
    const ObjId i = src[t].object;
    const std::size_t v = src[t].multiplicity;
    const Matrix& comp = phi.component(i);
    for (std::size_t u = 0; u < tgt.size(); ++u) {
      const ObjId j = tgt[u].object;
      const std::size_t w = tgt[u].multiplicity;
      for (ArrId h : s.hom(i, j)) {
        const Matrix c = comp.block(p.block_offset(u, h), pp.generator_offset(t), w, v);
        if (c.is_zero()) continue;
        out.add_block(roff[t], coff[u], Matrix::kronecker(c.transpose(), g.action(h)));
      }
    }
  }
  return out;
}

Matrix free_postcompose(const Presheaf& p, const PresheafMap& psi) {
  require_free(p, "free_postcompose");
  const Presheaf& g = psi.source();
  const Presheaf& g2 = psi.target();
  Matrix out(p.field(), free_hom_dim(p, g2), free_hom_dim(p, g));
  std::size_t r = 0, c = 0;
  for (const auto& s : p.free_summands()) {
    out.set_block(r, c, Matrix::kronecker(Matrix::identity(p.field(), s.multiplicity), psi.component(s.object)));
    r += g2.dim(s.object) * s.multiplicity;
    c += g.dim(s.object) * s.multiplicity;
  }
  return out;
}

// Hom complex -------------------------------------------------------------------------

ProjectiveHom::ProjectiveHom(Complex p, Complex y) : p_(std::move(p)), y_(std::move(y)) {
  if (!p_.is_projective()) throw InvalidInput("Hom complex: source must be a complex of free presheaves");
  if (!(p_.shape() == y_.shape()) || !(p_.field() == y_.field()))
    throw InvalidInput("Hom complex: shape or field mismatch");
}

std::size_t ProjectiveHom::offset(int n, int p) const {
  std::size_t off = 0;
  for (int q = p_.lo(); q < p && q <= p_.hi(); ++q) off += free_hom_dim(p_.term(q), y_.term(q + n));
  return off;
}

std::size_t ProjectiveHom::dim(int n) const { return offset(n, p_.hi() + 1); }

Matrix ProjectiveHom::differential(int n) const {
  Matrix out(p_.field(), dim(n + 1), dim(n));
  const mpq_class c = -sign(n);
  for (int p = p_.lo(); p <= p_.hi(); ++p) {
    const Presheaf& pp = p_.term(p);
    out.set_block(offset(n + 1, p), offset(n, p), free_postcompose(pp, y_.differential(p + n)));
    if (p < p_.hi()) {
      const Matrix pre = free_precompose(p_.differential(p), y_.term(p + 1 + n));
      out.add_block(offset(n + 1, p), offset(n, p + 1), pre.scaled(c));
    }
  }
  return out;
}

Matrix ProjectiveHom::vectorize(const std::vector<PresheafMap>& family, int n) const {
  const std::size_t count = p_.empty_range() ? 0 : static_cast<std::size_t>(p_.hi() - p_.lo() + 1);
  if (family.size() != count) throw InvalidInput("vectorize: one map per degree of the source is required");
  Matrix out(p_.field(), dim(n), 1);
  for (int p = p_.lo(); p <= p_.hi(); ++p) {
    const PresheafMap& f = family[static_cast<std::size_t>(p - p_.lo())];
    if (f.target().dims() != y_.term(p + n).dims()) throw InvalidInput("vectorize: wrong target");
    out.set_block(offset(n, p), 0, free_hom_coords(f.retyped(p_.term(p), f.target())));
  }
  return out;
}

Matrix ProjectiveHom::vectorize(const ChainMap& f) const { return vectorize(f.components(), 0); }

std::vector<PresheafMap> ProjectiveHom::unvectorize(const Matrix& column, int n) const {
  if (column.rows() != dim(n) || column.cols() != 1) throw InvalidInput("unvectorize: wrong length");
  std::vector<PresheafMap> out;
  for (int p = p_.lo(); p <= p_.hi(); ++p)
    out.push_back(free_hom_map(p_.term(p), y_.term(p + n), column, offset(n, p)));
  return out;
}

ChainMap ProjectiveHom::to_chain_map(const Matrix& column, int n) const {
  const Complex t = shift(y_, n);
  auto comps = unvectorize(column, n);
  for (int p = p_.lo(); p <= p_.hi(); ++p) {
    auto& c = comps[static_cast<std::size_t>(p - p_.lo())];
    c = c.retyped(p_.term(p), t.term(p));
  }
  return ChainMap(p_, t, std::move(comps), false);
}

Homotopy ProjectiveHom::to_homotopy(const Matrix& column) const {
  return Homotopy{p_, y_, unvectorize(column, -1)};
}

Matrix ProjectiveHom::postcompose(const ChainMap& s, const ProjectiveHom& other, int n) const {
  Matrix out(p_.field(), other.dim(n), dim(n));
  for (int p = p_.lo(); p <= p_.hi(); ++p)
    out.set_block(other.offset(n, p), offset(n, p), free_postcompose(p_.term(p), s.component(p + n)));
  return out;
}

// Ext ---------------------------------------------------------------------------------

ExtResult ext(const ProjectiveModel& px, const Complex& y, int n) {
  const ProjectiveHom h(px.object, y);
  const Matrix dn = h.differential(n);
  const Matrix dm = h.differential(n - 1);
  const Matrix z = kernel_basis(dn);
  const Matrix b = image_basis(dm);
  const auto idx = complement_columns(b, z);
  ExtResult out;
  out.model = px;
  out.dimension = idx.size();
  out.representative_columns = z.select_columns(idx);
  out.coboundaries = b;
  for (std::size_t k = 0; k < idx.size(); ++k)
    out.representatives.push_back(h.to_chain_map(out.representative_columns.select_columns({k}), n));
  return out;
}

ExtResult ext(const Complex& x, const Complex& y, int n) { return ext(proj_resolution(x), y, n); }

std::size_t ext_dim(const Complex& x, const Complex& y, int n) {
  const ProjectiveHom h(proj_resolution(x).object, y);
  return h.dim(n) - rank(h.differential(n)) - rank(h.differential(n - 1));
}

Matrix ext_coordinates(const ExtResult& e, const ChainMap& f) {
  const Complex& p = e.model.object;
  const Field& k = p.field();
  std::vector<Matrix> parts;
  for (int q = p.lo(); q <= p.hi(); ++q)
    parts.push_back(free_hom_coords(f.component(q).retyped(p.term(q), f.component(q).target())));
  const Matrix v = Matrix::vstack(parts, k, 1);
  const Matrix& r = e.representative_columns;
  if (v.rows() != r.rows()) throw InvalidInput("ext_coordinates: map does not match the model");
  const Matrix a = Matrix::hstack({e.coboundaries, r}, k, r.rows());
  auto sol = solve(a, v);
  if (!sol) throw InvalidInput("ext_coordinates: not a cocycle");
  return sol->block(e.coboundaries.cols(), 0, r.cols(), 1);
}

// Homotopies and lifts ----------------------------------------------------------------

namespace {

// h^p : X^p → Y^{p−1} for arbitrary X, solved objectwise with naturality
// imposed on the irreducible arrows.
std::optional<Homotopy> general_homotopy(const ChainMap& diff) {
  const Complex& x = diff.source();
  const Complex& y = diff.target();
  const FinCat& s = x.shape();
  const Field& k = x.field();
  const std::size_t no = s.num_objects();
  if (x.empty_range()) return Homotopy::zero(x, y);
  const int lo = x.lo(), hi = x.hi();
  // unknown offsets
  std::vector<std::vector<std::size_t>> uoff(static_cast<std::size_t>(hi - lo + 2), std::vector<std::size_t>(no));
  std::size_t nu = 0;
  for (int p = lo; p <= hi; ++p)
    for (ObjId o = 0; o < no; ++o) {
      uoff[static_cast<std::size_t>(p - lo)][o] = nu;
      nu += y.term(p - 1).dim(o) * x.term(p).dim(o);
    }
  auto var = [&](int p, ObjId o, std::size_t r, std::size_t c) {
    return uoff[static_cast<std::size_t>(p - lo)][o] + r * x.term(p).dim(o) + c;
  };
  std::size_t ne = 0;
  for (int p = lo; p <= hi; ++p) {
    for (ArrId a : s.irreducible_arrows())
      ne += y.term(p - 1).dim(s.arrow(a).source) * x.term(p).dim(s.arrow(a).target);
    for (ObjId o = 0; o < no; ++o) ne += y.term(p).dim(o) * x.term(p).dim(o);
  }
  Matrix m(k, ne, nu), rhs(k, ne, 1);
  auto add = [&](std::size_t r, std::size_t c, const mpq_class& v) { m.set(r, c, m.at(r, c) + v); };
  std::size_t row = 0;
  for (int p = lo; p <= hi; ++p) {
    const Presheaf& xp = x.term(p);
    const Presheaf& yq = y.term(p - 1);
    for (ArrId a : s.irreducible_arrows()) {
      const ObjId src = s.arrow(a).source, tgt = s.arrow(a).target;
      const Matrix& ya = yq.action(a);
      const Matrix& xa = xp.action(a);
      for (std::size_t r = 0; r < yq.dim(src); ++r)
        for (std::size_t c = 0; c < xp.dim(tgt); ++c, ++row) {
          for (std::size_t j = 0; j < yq.dim(tgt); ++j)
            if (ya.is_nonzero_at(r, j)) add(row, var(p, tgt, j, c), ya.at(r, j));
          for (std::size_t j = 0; j < xp.dim(src); ++j)
            if (xa.is_nonzero_at(j, c)) add(row, var(p, src, r, j), -xa.at(j, c));
        }
    }
    const PresheafMap dy = y.differential(p - 1);
    const PresheafMap dx = x.differential(p);
    const PresheafMap target = diff.component(p);
    for (ObjId o = 0; o < no; ++o) {
      const Matrix& dyo = dy.component(o);
      const Matrix& dxo = dx.component(o);
      for (std::size_t r = 0; r < y.term(p).dim(o); ++r)
        for (std::size_t c = 0; c < xp.dim(o); ++c, ++row) {
          for (std::size_t j = 0; j < yq.dim(o); ++j)
            if (dyo.is_nonzero_at(r, j)) add(row, var(p, o, j, c), dyo.at(r, j));
          if (p < hi)
            for (std::size_t j = 0; j < x.term(p + 1).dim(o); ++j)
              if (dxo.is_nonzero_at(j, c)) add(row, var(p + 1, o, r, j), dxo.at(j, c));
          if (target.component(o).is_nonzero_at(r, c)) rhs.set(row, 0, target.component(o).at(r, c));
        }
    }
  }
  auto sol = solve(m, rhs);
  if (!sol) return std::nullopt;
  Homotopy h{x, y, {}};
  for (int p = lo; p <= hi; ++p) {
    std::vector<Matrix> comps;
    for (ObjId o = 0; o < no; ++o) {
      Matrix c(k, y.term(p - 1).dim(o), x.term(p).dim(o));
      for (std::size_t r = 0; r < c.rows(); ++r)
        for (std::size_t j = 0; j < c.cols(); ++j)
          if (sol->is_nonzero_at(var(p, o, r, j), 0)) c.set(r, j, sol->at(var(p, o, r, j), 0));
      comps.push_back(std::move(c));
    }
    h.components.emplace_back(x.term(p), y.term(p - 1), std::move(comps), false);
  }
  return h;
}

}  // namespace

std::optional<Homotopy> homotopy_solve(const ChainMap& f, const ChainMap& g) {
  if (!(f.source() == g.source()) || !(f.target() == g.target()))
    throw InvalidInput("homotopy_solve: maps are not parallel");
  const ChainMap diff = f - g.retyped(f.source(), f.target());
  if (!f.source().is_projective()) return general_homotopy(diff);
  const ProjectiveHom h(f.source(), f.target());
  auto sol = solve(h.differential(-1), h.vectorize(diff));
  if (!sol) return std::nullopt;
  return h.to_homotopy(*sol);
}

std::optional<Lift> lift_through(const ChainMap& f, const ChainMap& s) {
  if (!(s.target() == f.target())) throw InvalidInput("lift_through: targets differ");
  const Complex& p = f.source();
  const ProjectiveHom hx(p, s.source());
  const ProjectiveHom hy(p, f.target());
  const Field& k = p.field();
  const Matrix d0 = hx.differential(0);
  const Matrix sm = hx.postcompose(s.retyped(s.source(), f.target()), hy, 0);
  const Matrix dm = hy.differential(-1);
  const std::size_t ng = hx.dim(0), nh = hy.dim(-1);
  Matrix m(k, d0.rows() + sm.rows(), ng + nh);
  m.set_block(0, 0, d0);
  m.set_block(d0.rows(), 0, sm);
  m.set_block(d0.rows(), ng, dm);
  Matrix rhs(k, m.rows(), 1);
  rhs.set_block(d0.rows(), 0, hy.vectorize(f));
  auto sol = solve(m, rhs);
  if (!sol) return std::nullopt;
  ChainMap g = hx.to_chain_map(sol->block(0, 0, ng, 1), 0).retyped(p, s.source());
  Homotopy h = hy.to_homotopy(sol->block(ng, 0, nh, 1));
  return Lift{std::move(g), std::move(h)};
}

}  // namespace derivkit
