#include <map>

#include "derivkit/complex.hpp"
#include "derivkit/error.hpp"

namespace derivkit {

// Top-down construction. Having built P^{>p} and φ^{>p}, the cocycles of the
// cone of φ in degree p − 1 are
//   Z^p = ker( X^p ⊕ P^{p+1} → X^{p+1} ⊕ P^{p+2},  (x, y) ↦ (d x − φ y, d y) ),
// and a projective cover π : P^p ↠ Z^p gives φ^p and d_P^p as its two
// coordinates. Each step makes the cone exact one degree further down; below
// lo the kernel shrinks until it vanishes, at the latest after as many steps
// as the longest chain in the shape.
ProjectiveModel proj_resolution(const Complex& x) {
  if (x.is_projective()) return {x, ChainMap::identity(x)};
  const Complex xt = x.trimmed();
  if (xt.empty_range()) {
    const Complex z = Complex::zero(x.field(), x.shape());
    return {z, ChainMap::zero(z, x)};
  }
  const Field& k = x.field();
  const FinCat& s = x.shape();
  const Presheaf zero = free_sum(k, s, {});
  std::map<int, Presheaf> P;
  std::map<int, PresheafMap> phi, dP;
  auto Pt = [&](int p) -> const Presheaf& {
    auto it = P.find(p);
    return it == P.end() ? zero : it->second;
  };
  auto phi_at = [&](int p) {
    auto it = phi.find(p);
    return it == phi.end() ? PresheafMap::zero(Pt(p), xt.term(p)) : it->second;
  };
  auto d_at = [&](int p) {
    auto it = dP.find(p);
    return it == dP.end() ? PresheafMap::zero(Pt(p), Pt(p + 1)) : it->second;
  };

  const int floor = xt.lo() - static_cast<int>(s.max_chain_length()) - 2;
  int p = xt.hi();
  for (;; --p) {
    if (p < floor) throw InvariantViolation("projective resolution did not terminate");
    const DirectSum a = direct_sum(std::vector<Presheaf>{xt.term(p), Pt(p + 1)});
    const DirectSum b = direct_sum(std::vector<Presheaf>{xt.term(p + 1), Pt(p + 2)});
    const PresheafMap& qx = a.projections[0];
    const PresheafMap& qp = a.projections[1];
    const PresheafMap psi =
        compose(b.inclusions[0], compose(xt.differential(p), qx) - compose(phi_at(p + 1), qp)) +
        compose(b.inclusions[1], compose(d_at(p + 1), qp));
    const SubObject z = kernel(psi);
    if (p < xt.lo() && z.object.is_zero()) break;
    const CanonicalCover cov = minimal_cover(z.object);
    const PresheafMap to_a = compose(z.inclusion, cov.counit);
    P[p] = cov.cover;
    phi[p] = compose(qx, to_a).retyped(cov.cover, xt.term(p));
    dP[p] = compose(qp, to_a).retyped(cov.cover, Pt(p + 1));
  }

  const int lo = p + 1, hi = xt.hi();
  std::vector<Presheaf> terms;
  std::vector<PresheafMap> diffs;
  for (int q = lo; q <= hi; ++q) {
    terms.push_back(Pt(q));
    if (q < hi) diffs.push_back(d_at(q).retyped(Pt(q), Pt(q + 1)));
  }
  const Complex pc(lo, std::move(terms), std::move(diffs), false);
  const ChainMap m = ChainMap::from_degrees(
      pc, x, [&](int q) { return phi_at(q).retyped(pc.term(q), x.term(q)); }, false);
  return {pc, m};
}

}  // namespace derivkit
