#include "derivkit/random.hpp"

#include <algorithm>
#include <numeric>

#include "derivkit/error.hpp"

namespace derivkit {

Rng::Rng(std::uint64_t seed, std::uint64_t case_index) {
  std::seed_seq s{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                  static_cast<std::uint32_t>(case_index), static_cast<std::uint32_t>(case_index >> 32)};
  eng_.seed(s);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) return 0;
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(eng_);
}

bool Rng::coin(double p) { return std::bernoulli_distribution(p)(eng_); }

mpq_class Rng::scalar(const Field& k) {
  if (k.is_prime()) return mpq_class(static_cast<unsigned long>(below(k.characteristic())));
  return mpq_class(static_cast<long>(below(5)) - 2);
}

Matrix Rng::matrix(const Field& k, std::size_t rows, std::size_t cols) {
  Matrix m(k, rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m.set(i, j, scalar(k));
  return m;
}

FinCat random_category(Rng& r, std::size_t max_objects) {
  const std::size_t n = 1 + r.below(std::max<std::size_t>(max_objects, 1));
  std::vector<std::size_t> rank(n);
  std::iota(rank.begin(), rank.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(rank[i - 1], rank[r.below(i)]);
  std::vector<std::string> objects;
  for (std::size_t i = 0; i < n; ++i) objects.push_back("o" + std::to_string(i));
  std::vector<FinCat::Generator> gens;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (rank[x] > rank[y] && r.coin())
        gens.push_back({"g" + std::to_string(x) + "_" + std::to_string(y), objects[x], objects[y]});
  const bool commutative = !r.coin(0.25);
  return FinCat::from_quiver(commutative ? "random-poset" : "random-free", objects, gens, {}, commutative);
}

Presheaf random_presheaf(Rng& r, const Field& k, const FinCat& c, std::size_t max_dim) {
  const std::size_t n = c.num_objects();
  std::vector<std::size_t> dims(n);
  for (auto& d : dims) d = r.below(max_dim + 1);
  std::vector<Matrix> actions(c.num_arrows());
  for (ObjId x = 0; x < n; ++x) actions[c.identity(x)] = Matrix::identity(k, dims[x]);
  for (ObjId x : c.topological_order()) {
    // Latching space ⊕_{a : x → y} F_y modulo F(b∘a)v ~ F(a)F(b)v.
    std::vector<ArrId> outs;
    std::vector<std::size_t> off;
    std::size_t v = 0;
    for (ArrId a = 0; a < c.num_arrows(); ++a)
      if (c.arrow(a).source == x && !c.is_identity(a)) {
        outs.push_back(a);
        off.push_back(v);
        v += dims[c.arrow(a).target];
      }
    if (outs.empty()) continue;
    auto block = [&](ArrId a) {
      return off[static_cast<std::size_t>(std::find(outs.begin(), outs.end(), a) - outs.begin())];
    };
    std::vector<Matrix> rels;
    for (ArrId a : outs) {
      const ObjId y = c.arrow(a).target;
      for (ArrId b = 0; b < c.num_arrows(); ++b) {
        if (c.is_identity(b) || c.arrow(b).source != y) continue;
        const std::size_t dz = dims[c.arrow(b).target];
        Matrix m(k, v, dz);
        m.add_block(block(c.compose(b, a)), 0, Matrix::identity(k, dz));
        m.add_block(block(a), 0, -actions[b]);
        rels.push_back(std::move(m));
      }
    }
    const Matrix rel = Matrix::hstack(rels, k, v);
    const Matrix q = rel.cols() == 0 ? Matrix::identity(k, v) : cokernel_projection(rel);
    const Matrix g = r.matrix(k, dims[x], q.rows()) * q;
    for (ArrId a : outs) actions[a] = g.block(0, block(a), dims[x], dims[c.arrow(a).target]);
  }
  return Presheaf::from_all_actions(k, c, std::move(dims), std::move(actions));
}

PresheafMap random_hom(Rng& r, const Presheaf& f, const Presheaf& g) {
  PresheafMap out = PresheafMap::zero(f, g);
  for (const auto& b : hom_space(f, g)) {
    const mpq_class s = r.scalar(f.field());
    if (s != 0) out = out + b.scaled(s);
  }
  return out;
}

Complex random_complex(Rng& r, const Field& k, const FinCat& c, std::size_t max_dim, int lo, int hi) {
  if (hi < lo) return Complex::zero(k, c);
  const auto width = static_cast<std::size_t>(hi - lo + 1);
  const std::size_t len = std::min<std::size_t>(1 + r.below(3), width);
  const int start = lo + static_cast<int>(r.below(width - len + 1));
  std::vector<Presheaf> terms{random_presheaf(r, k, c, max_dim)};
  std::vector<PresheafMap> diffs;
  for (std::size_t t = 1; t < len; ++t) {
    terms.push_back(random_presheaf(r, k, c, max_dim));
    if (diffs.empty()) {
      diffs.push_back(random_hom(r, terms[t - 1], terms[t]));
    } else {
      const QuotientObject q = cokernel(diffs.back());
      diffs.push_back(compose(random_hom(r, q.object, terms[t]), q.projection));
    }
  }
  return Complex(start, std::move(terms), std::move(diffs));
}

namespace {

Matrix flatten(const PresheafMap& f) {
  std::size_t n = 0;
  for (const auto& m : f.components()) n += m.rows() * m.cols();
  Matrix v(f.source().field(), n, 1);
  std::size_t i = 0;
  for (const auto& m : f.components())
    for (std::size_t c = 0; c < m.cols(); ++c)
      for (std::size_t rr = 0; rr < m.rows(); ++rr) v.set(i++, 0, m.at(rr, c));
  return v;
}

}  // namespace

ChainMap random_chain_map(Rng& r, const Complex& x, const Complex& y) {
  const Field& k = x.field();
  if (x.empty_range()) return ChainMap::zero(x, y);
  // Unknowns: coefficients in hom(x^p, y^p) for each p; equations d f^p = f^{p+1} d.
  std::vector<std::vector<PresheafMap>> bases;
  std::vector<std::size_t> off{0};
  for (int p = x.lo(); p <= x.hi(); ++p) {
    bases.push_back(hom_space(x.term(p), y.term(p)));
    off.push_back(off.back() + bases.back().size());
  }
  const std::size_t unknowns = off.back();
  std::vector<Matrix> eqs;
  for (int p = x.lo() - 1; p <= x.hi(); ++p) {
    const PresheafMap probe = PresheafMap::zero(x.term(p), y.term(p + 1));
    const std::size_t rows = flatten(probe).rows();
    if (rows == 0) continue;
    Matrix e(k, rows, unknowns);
    if (p >= x.lo()) {
      const auto q = static_cast<std::size_t>(p - x.lo());
      for (std::size_t t = 0; t < bases[q].size(); ++t)
        e.set_block(0, off[q] + t, flatten(compose(y.differential(p), bases[q][t])));
    }
    if (p + 1 <= x.hi()) {
      const auto q = static_cast<std::size_t>(p + 1 - x.lo());
      for (std::size_t t = 0; t < bases[q].size(); ++t)
        e.add_block(0, off[q] + t, -flatten(compose(bases[q][t], x.differential(p))));
    }
    eqs.push_back(std::move(e));
  }
  const Matrix sys = Matrix::vstack(eqs, k, unknowns);
  const Matrix ker = kernel_basis(sys);
  const Matrix coeff = ker * r.matrix(k, ker.cols(), 1);
  return ChainMap::from_degrees(x, y, [&](int p) {
    const auto q = static_cast<std::size_t>(p - x.lo());
    PresheafMap f = PresheafMap::zero(x.term(p), y.term(p));
    for (std::size_t t = 0; t < bases[q].size(); ++t)
      if (coeff.is_nonzero_at(off[q] + t, 0)) f = f + bases[q][t].scaled(coeff.at(off[q] + t, 0));
    return f;
  });
}

DiagFunctor random_functor(Rng& r, std::size_t max_objects) {
  const FinCat c = random_category(r, max_objects);
  const std::size_t n = c.num_objects();
  switch (r.below(6)) {
    case 0:
      return identity_functor(c);
    case 1:
      return point_inclusion(c, static_cast<ObjId>(r.below(n)));
    case 2: {
      std::vector<ObjId> keep;
      for (ObjId x = 0; x < n; ++x)
        if (r.coin()) keep.push_back(x);
      if (keep.empty()) keep.push_back(static_cast<ObjId>(r.below(n)));
      return full_inclusion(c, keep);
    }
    case 3:
      return terminal_functor(c);
    case 4: {
      const FinCat j = random_category(r, 3);
      return constant_functor(random_category(r, 3), j, static_cast<ObjId>(r.below(j.num_objects())));
    }
    default: {
      const FinCat a = random_category(r, 2);
      return r.coin() ? projection_left(a, delta(1)) : projection_right(delta(1), a);
    }
  }
}

RandomConflation random_conflation(Rng& r, const Field& k, const FinCat& c, std::size_t max_dim) {
  const Presheaf b = random_presheaf(r, k, c, max_dim);
  const Presheaf a0 = random_presheaf(r, k, c, max_dim);
  const ImageObject im = image(random_hom(r, a0, b));
  const QuotientObject q = cokernel(im.inclusion);
  return {im.inclusion, q.projection};
}

SquareObject random_square(Rng& r, const Field& k, const FinCat& base, std::size_t max_dim) {
  return SquareObject(Complex::stalk(random_presheaf(r, k, product(square(), base), max_dim)), base);
}

SquareObject random_bicartesian_square(Rng& r, const Field& k, const FinCat& base, std::size_t max_dim) {
  if (r.coin()) {
    const RandomConflation cf = random_conflation(r, k, base, max_dim);
    const ChainMap i(Complex::stalk(cf.inflation.source()), Complex::stalk(cf.inflation.target()), {cf.inflation});
    const ChainMap p(Complex::stalk(cf.deflation.source()), Complex::stalk(cf.deflation.target()), {cf.deflation});
    return triangle_square(i, p, Homotopy::zero(i.source(), p.target()));
  }
  const Complex x = random_complex(r, k, base, max_dim, -1, 1);
  const Complex y = random_complex(r, k, base, max_dim, -1, 1);
  const ChainMap f = random_chain_map(r, x, y);
  const Cone c = cone(f);
  // h(x) = (x, 0) bounds the composite X → Y → Cone(f).
  Homotopy h{x, c.object, {}};
  for (int p = x.lo(); p <= x.hi(); ++p) {
    const DirectSum s = direct_sum(std::vector<Presheaf>{x.term(p), y.term(p - 1)});
    h.components.push_back(s.inclusions[0].retyped(x.term(p), c.object.term(p - 1)));
  }
  return triangle_square(f, c.inclusion, h);
}

namespace {

Homotopy random_homotopy(Rng& r, const Complex& p, const Complex& q) {
  Homotopy h{p, q, {}};
  for (int d = p.lo(); d <= p.hi(); ++d) {
    const Presheaf& src = p.term(d);
    const Presheaf& tgt = q.term(d - 1);
    std::vector<Matrix> images;
    for (const auto& s : src.free_summands()) images.push_back(r.matrix(p.field(), tgt.dim(s.object), s.multiplicity));
    h.components.push_back(map_from_free(src, tgt, images));
  }
  return h;
}

}  // namespace

IncoherentDiagram random_toda_diagram(Rng& r, const Field& k, const FinCat& index, const FinCat& base,
                                      std::size_t max_dim) {
  const int degree = static_cast<int>(r.below(3)) - 1;
  const Complex x = Complex::stalk(random_presheaf(r, k, product(index, base), max_dim), degree);
  const IncoherentDiagram d = dia(x, index, base);
  IncoherentDiagram f{index, base, {}, {}, {}};
  std::vector<ProjectiveModel> models;
  for (const auto& o : d.objects) {
    models.push_back(proj_resolution(o));
    f.objects.push_back(models.back().object);
  }
  for (ArrId a = 0; a < index.num_arrows(); ++a) {
    const ObjId s = index.arrow(a).source, t = index.arrow(a).target;
    if (index.is_identity(a)) {
      f.arrows.push_back(ChainMap::identity(f.objects[s]));
      continue;
    }
    auto l = lift_through(compose(d.arrows[a], models[t].map), models[s].map);
    if (!l) throw InvariantViolation("random diagram: arrow does not lift");
    f.arrows.push_back(l->map + random_homotopy(r, f.objects[t], f.objects[s]).boundary());
  }
  f.complete_witnesses();
  return f;
}

}  // namespace derivkit
