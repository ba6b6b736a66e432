#include <sstream>

#include "derivkit/coherence.hpp"
#include "derivkit/error.hpp"

namespace derivkit {

namespace {

bool is_point(const FinCat& c) { return c.num_objects() == 1 && c.num_arrows() == 1; }

// Degree n of A ⊗ K: pieces A^p ⊗ K^{n−p}, each a dim A^p-fold sum of K^{n−p}.
struct TensorLayout {
  Complex object;
  std::vector<DirectSum> sums;           // per degree, from object.lo()
  std::vector<std::vector<int>> pieces;  // the p of each summand

  std::optional<std::size_t> find(int n, int p) const {
    if (object.empty_range() || n < object.lo() || n > object.hi()) return std::nullopt;
    const auto& ps = pieces[static_cast<std::size_t>(n - object.lo())];
    for (std::size_t t = 0; t < ps.size(); ++t)
      if (ps[t] == p) return t;
    return std::nullopt;
  }
  const DirectSum& at(int n) const { return sums[static_cast<std::size_t>(n - object.lo())]; }
};

Presheaf power(const Presheaf& f, std::size_t a) {
  if (a == 0) return Presheaf::zero(f.field(), f.shape());
  return direct_sum(std::vector<Presheaf>(a, f)).object;
}

// f ⊗ 1 : A^p ⊗ K^q → B^p ⊗ K^q.
PresheafMap left_factor(const Matrix& f, const Presheaf& kq, const Presheaf& src, const Presheaf& tgt) {
  std::vector<Matrix> c;
  for (ObjId b = 0; b < kq.shape().num_objects(); ++b)
    c.push_back(Matrix::kronecker(f, Matrix::identity(kq.field(), kq.dim(b))));
  return PresheafMap(src, tgt, std::move(c), false);
}

// 1 ⊗ g : A^p ⊗ K^q → A^p ⊗ K^{q+1}.
PresheafMap right_factor(std::size_t a, const PresheafMap& g, const Presheaf& src, const Presheaf& tgt) {
  std::vector<Matrix> c;
  for (ObjId b = 0; b < g.source().shape().num_objects(); ++b)
    c.push_back(Matrix::kronecker(Matrix::identity(g.source().field(), a), g.component(b)));
  return PresheafMap(src, tgt, std::move(c), false);
}

TensorLayout tensor_layout(const Complex& a0, const Complex& k0) {
  const Complex a = a0.trimmed(), kk = k0.trimmed();
  TensorLayout t;
  if (a.empty_range() || kk.empty_range()) {
    t.object = Complex::zero(k0.field(), k0.shape());
    return t;
  }
  const int lo = a.lo() + kk.lo(), hi = a.hi() + kk.hi();
  std::vector<Presheaf> terms;
  for (int n = lo; n <= hi; ++n) {
    std::vector<Presheaf> parts;
    std::vector<int> ps;
    for (int p = a.lo(); p <= a.hi(); ++p) {
      const int q = n - p;
      if (q < kk.lo() || q > kk.hi()) continue;
      parts.push_back(power(kk.term(q), a.term(p).dim(0)));
      ps.push_back(p);
    }
    t.sums.push_back(direct_sum(parts));
    t.pieces.push_back(std::move(ps));
    terms.push_back(t.sums.back().object);
  }
  std::vector<PresheafMap> diffs;
  for (int n = lo; n < hi; ++n) {
    const DirectSum& s = t.sums[static_cast<std::size_t>(n - lo)];
    const DirectSum& s1 = t.sums[static_cast<std::size_t>(n + 1 - lo)];
    const auto& ps = t.pieces[static_cast<std::size_t>(n - lo)];
    const auto& ps1 = t.pieces[static_cast<std::size_t>(n + 1 - lo)];
    PresheafMap d = PresheafMap::zero(s.object, s1.object);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const int p = ps[i], q = n - p;
      const Presheaf& src = s.projections[i].target();
      for (std::size_t j = 0; j < ps1.size(); ++j) {
        const Presheaf& tgt = s1.inclusions[j].source();
        PresheafMap piece;
        if (ps1[j] == p + 1) {
          piece = left_factor(a.differential(p).component(0), kk.term(q), src, tgt);
        } else if (ps1[j] == p) {
          piece = right_factor(a.term(p).dim(0), kk.differential(q), src, tgt);
          if (p % 2 != 0) piece = -piece;
        } else {
          continue;
        }
        d = d + compose(s1.inclusions[j], compose(piece, s.projections[i]));
      }
    }
    diffs.push_back(std::move(d));
  }
  t.object = Complex(lo, std::move(terms), std::move(diffs));
  return t;
}

PresheafMap degree_zero(const ChainMap& f) {
  const Complex& s = f.source();
  if (s.empty_range() || s.lo() > 0 || s.hi() < 0) return PresheafMap::zero(s.term(0), f.target().term(0));
  return f.component(0);
}

bool is_stalk_at_zero(const Complex& c) {
  const Complex t = c.trimmed();
  return t.empty_range() || (t.lo() == 0 && t.hi() == 0);
}

}  // namespace

Complex tensor(const Complex& a, const Complex& kernel) {
  if (!is_point(a.shape())) throw InvalidInput("tensor: left factor must live over e");
  return tensor_layout(a, kernel).object;
}

ChainMap tensor(const ChainMap& f, const Complex& kernel) {
  if (!is_point(f.source().shape())) throw InvalidInput("tensor: map must live over e");
  const TensorLayout s = tensor_layout(f.source(), kernel), t = tensor_layout(f.target(), kernel);
  const Complex kk = kernel.trimmed();
  return ChainMap::from_degrees(s.object, t.object, [&](int n) {
    const DirectSum& ss = s.at(n);
    PresheafMap m = PresheafMap::zero(ss.object, t.object.term(n));
    const auto& ps = s.pieces[static_cast<std::size_t>(n - s.object.lo())];
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const auto j = t.find(n, ps[i]);
      if (!j) continue;
      const DirectSum& ts = t.at(n);
      const PresheafMap piece = left_factor(f.component(ps[i]).component(0), kk.term(n - ps[i]),
                                            ss.projections[i].target(), ts.inclusions[*j].source());
      m = m + compose(ts.inclusions[*j], compose(piece, ss.projections[i]));
    }
    return m;
  });
}

TodaReport kernel_toda(const Complex& kernel) { return toda_check({kernel}, {kernel}); }

Extension extend_functor(const Complex& kernel, const Complex& x, const FinCat& index) {
  const FinCat e = point_category();
  if (!(x.shape() == product(index, e))) throw InvalidInput("extend: input is not over index × e");
  const TodaReport kt = kernel_toda(kernel);
  if (!kt.pass) {
    std::ostringstream os;
    os << "extend: kernel fails the Toda condition, dim Hom(Σ^" << kt.witness->n << " K, K) = " << kt.witness->dim;
    throw PreconditionFailed(os.str());
  }
  const IncoherentDiagram d = dia(x, index, e);
  Extension out;
  out.image.index = index;
  out.image.base = kernel.shape();
  for (const auto& c : d.objects) out.image.objects.push_back(tensor(c, kernel));
  for (ArrId a = 0; a < index.num_arrows(); ++a) {
    const ObjId s = index.arrow(a).source, t = index.arrow(a).target;
    out.image.arrows.push_back(
        tensor(d.arrows[a], kernel).retyped(out.image.objects[t], out.image.objects[s]));
  }
  for (const auto& [key, h] : d.composites)
    out.image.composites.emplace(key, Homotopy::zero(out.image.objects[index.arrow(key.first).target],
                                                     out.image.objects[index.arrow(key.second).source]));
  out.lift = lift_object(out.image);
  return out;
}

ExtensionSquare extend_conflation(const Complex& kernel, const ChainMap& i, const ChainMap& p, const FinCat& index,
                                  bool with_triangle) {
  const FinCat e = point_category();
  if (!(i.target() == p.source())) throw InvalidInput("extend: maps are not composable");
  for (const Complex* c : {&i.source(), &i.target(), &p.target()})
    if (!is_stalk_at_zero(*c)) throw InvalidInput("extend: conflation terms must sit in degree 0");
  if (!is_conflation(degree_zero(i), degree_zero(p))) throw PreconditionFailed("extend: not a conflation");

  const Extension ea = extend_functor(kernel, i.source(), index);
  const Extension eb = extend_functor(kernel, i.target(), index);
  const Extension ec = extend_functor(kernel, p.target(), index);
  auto image = [&](const ChainMap& f, const Extension& s, const Extension& t) {
    std::vector<ChainMap> phi;
    for (ObjId x = 0; x < index.num_objects(); ++x)
      phi.push_back(tensor(restrict(slice_inclusion(index, e, x), f), kernel)
                        .retyped(s.image.objects[x], t.image.objects[x]));
    auto l = solve_lift(s.lift.object, s.lift.certificate.comparisons, t.lift.object, t.lift.certificate.comparisons,
                        phi, index, kernel.shape());
    if (!l) throw InvariantViolation("extend: map does not lift");
    return l->map;
  };
  const ChainMap ti = image(i, ea, eb);
  const ChainMap tp = image(p, eb, ec);
  const ChainMap pi = compose(tp, ti);
  auto h = homotopy_solve(pi, ChainMap::zero(pi.source(), pi.target()));
  if (!h) throw InvariantViolation("extend: lifted composite is not nullhomotopic");
  ExtensionSquare out{triangle_square(ti, tp, *h), false, false, std::nullopt};
  out.cocartesian = is_cocartesian(out.square).holds;
  out.cartesian = is_cartesian(out.square).holds;
  if (with_triangle && out.cocartesian && out.cartesian) out.triangle = standard_triangle(out.square);
  return out;
}

CompatReport verify_extension_compat(const DiagFunctor& u, const Complex& kernel, const Complex& x) {
  const FinCat e = point_category();
  const FinCat& big = u.target();
  const FinCat& small = u.source();
  const Extension whole = extend_functor(kernel, x, big);
  const Extension part = extend_functor(kernel, restrict(product(u, identity_functor(e)), x), small);
  const Complex r = restrict(product(u, identity_functor(kernel.shape())), whole.lift.object);
  std::vector<ChainMap> c_tgt, phi;
  for (ObjId i = 0; i < small.num_objects(); ++i) {
    const ChainMap& c = whole.lift.certificate.comparisons[u(i)];
    c_tgt.push_back(c.retyped(slice(r, small, kernel.shape(), i), part.image.objects[i]));
    phi.push_back(ChainMap::identity(part.image.objects[i]));
  }
  CompatReport out;
  auto l = solve_lift(part.lift.object, part.lift.certificate.comparisons, r, c_tgt, phi, small, kernel.shape());
  if (!l) return out;
  out.holds = is_quasi_iso(l->map);
  out.witness = std::move(l->map);
  return out;
}

}  // namespace derivkit
