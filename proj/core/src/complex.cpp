#include "derivkit/complex.hpp"

#include <algorithm>
#include <sstream>

#include "derivkit/error.hpp"

namespace derivkit {

namespace {

bool same_matrices(const PresheafMap& a, const PresheafMap& b) {
  return a.components() == b.components();
}

PresheafMap zero_map(const Presheaf& s, const Presheaf& t) { return PresheafMap::zero(s, t); }

mpq_class sign(int n) { return (n % 2 == 0) ? mpq_class(1) : mpq_class(-1); }

}  // namespace

// Complex ---------------------------------------------------------------------------

Complex::Complex() : Complex(std::make_shared<const Data>()) {}

Complex::Complex(int lo, std::vector<Presheaf> terms, std::vector<PresheafMap> differentials,
                 bool check) {
  if (terms.empty()) throw InvalidInput("complex needs at least one term (use Complex::zero)");
  if (differentials.size() + 1 != terms.size())
    throw InvalidInput("complex: need exactly one differential between consecutive terms");
  auto d = std::make_shared<Data>();
  d->lo = lo;
  d->hi = lo + static_cast<int>(terms.size()) - 1;
  d->zero = Presheaf::zero(terms.front().field(), terms.front().shape());
  for (const auto& t : terms)
    if (!(t.field() == d->zero.field()) || !t.same_shape(d->zero))
      throw InvalidInput("complex: terms live on different shapes or fields");
  d->terms = std::move(terms);
  d->diffs = std::move(differentials);
  d_ = std::move(d);
  if (check) validate();
}

Complex Complex::zero(Field field, FinCat shape) {
  auto d = std::make_shared<Data>();
  d->zero = Presheaf::zero(std::move(field), std::move(shape));
  return Complex(std::shared_ptr<const Data>(std::move(d)));
}

Complex Complex::stalk(const Presheaf& f, int degree) { return Complex(degree, {f}, {}, false); }

const Presheaf& Complex::term(int p) const {
  if (p < d_->lo || p > d_->hi) return d_->zero;
  return d_->terms[static_cast<std::size_t>(p - d_->lo)];
}

PresheafMap Complex::differential(int p) const {
  if (p >= d_->lo && p < d_->hi) return d_->diffs[static_cast<std::size_t>(p - d_->lo)];
  return zero_map(term(p), term(p + 1));
}

bool Complex::is_projective() const {
  return std::all_of(d_->terms.begin(), d_->terms.end(), [](const Presheaf& t) { return t.is_free(); });
}

bool Complex::is_zero() const {
  return std::all_of(d_->terms.begin(), d_->terms.end(), [](const Presheaf& t) { return t.is_zero(); });
}

Complex Complex::trimmed() const {
  int a = lo(), b = hi();
  while (a <= b && term(a).is_zero()) ++a;
  while (b >= a && term(b).is_zero()) --b;
  if (a > b) return zero(field(), shape());
  return with_range(a, b);
}

Complex Complex::with_range(int a, int b) const {
  if (b < a) {
    if (!is_zero()) throw InvalidInput("with_range: cannot drop nonzero terms");
    return zero(field(), shape());
  }
  for (int p = lo(); p <= hi(); ++p)
    if ((p < a || p > b) && !term(p).is_zero())
      throw InvalidInput("with_range: cannot drop nonzero terms");
  std::vector<Presheaf> terms;
  std::vector<PresheafMap> diffs;
  for (int p = a; p <= b; ++p) {
    terms.push_back(term(p));
    if (p < b) diffs.push_back(differential(p));
  }
  // outside the old range the zero term is shared, which keeps the maps well typed
  return Complex(a, std::move(terms), std::move(diffs), false);
}

std::size_t Complex::total_dim() const {
  std::size_t n = 0;
  for (const auto& t : d_->terms) n += t.total_dim();
  return n;
}

void Complex::validate() const {
  for (int p = lo(); p < hi(); ++p) {
    const PresheafMap& d = d_->diffs[static_cast<std::size_t>(p - lo())];
    if (!(d.source() == term(p)) || !(d.target() == term(p + 1)))
      throw InvalidInput("complex: differential " + std::to_string(p) + " has the wrong endpoints");
  }
  for (int p = lo(); p + 1 < hi(); ++p)
    if (!compose(differential(p + 1), differential(p)).is_zero())
      throw InvalidInput("complex: d^" + std::to_string(p + 1) + " d^" + std::to_string(p) + " != 0");
}

bool operator==(const Complex& a, const Complex& b) {
  if (!(a.field() == b.field()) || !(a.shape() == b.shape())) return false;
  const int lo = std::min(a.lo(), b.lo()), hi = std::max(a.hi(), b.hi());
  for (int p = lo; p <= hi; ++p) {
    if (!(a.term(p) == b.term(p))) return false;
    if (p < hi && !same_matrices(a.differential(p), b.differential(p))) return false;
  }
  return true;
}

std::string Complex::summary() const {
  std::ostringstream os;
  if (empty_range()) {
    os << "zero complex";
    return os.str();
  }
  os << "complex in degrees [" << lo() << ", " << hi() << "]:";
  for (int p = lo(); p <= hi(); ++p) {
    os << " " << p << ":(";
    for (std::size_t x = 0; x < term(p).dims().size(); ++x) os << (x ? "," : "") << term(p).dim(x);
    os << ")";
  }
  return os.str();
}

// Chain maps ------------------------------------------------------------------------

ChainMap::ChainMap(Complex source, Complex target, std::vector<PresheafMap> components, bool check)
    : source_(std::move(source)), target_(std::move(target)), components_(std::move(components)) {
  const int n = source_.empty_range() ? 0 : source_.hi() - source_.lo() + 1;
  if (static_cast<int>(components_.size()) != n)
    throw InvalidInput("chain map: one component per degree of the source is required");
  if (!(source_.field() == target_.field()) || !(source_.shape() == target_.shape()))
    throw InvalidInput("chain map: source and target live on different shapes");
  if (check) validate();
}

ChainMap ChainMap::zero(const Complex& source, const Complex& target) {
  return from_degrees(source, target, [&](int p) { return zero_map(source.term(p), target.term(p)); },
                      false);
}

ChainMap ChainMap::identity(const Complex& x) {
  return from_degrees(x, x, [&](int p) { return PresheafMap::identity(x.term(p)); }, false);
}

PresheafMap ChainMap::component(int p) const {
  if (p < source_.lo() || p > source_.hi()) return zero_map(source_.term(p), target_.term(p));
  return components_[static_cast<std::size_t>(p - source_.lo())];
}

bool ChainMap::is_zero() const {
  return std::all_of(components_.begin(), components_.end(), [](const PresheafMap& m) { return m.is_zero(); });
}

ChainMap ChainMap::operator+(const ChainMap& o) const {
  std::vector<PresheafMap> c;
  for (int p = source_.lo(); p <= source_.hi(); ++p) c.push_back(component(p) + o.component(p));
  return ChainMap(source_, target_, std::move(c), false);
}

ChainMap ChainMap::operator-(const ChainMap& o) const { return *this + (-o); }

ChainMap ChainMap::operator-() const { return scaled(-1); }

ChainMap ChainMap::scaled(const mpq_class& c) const {
  std::vector<PresheafMap> out;
  for (const auto& m : components_) out.push_back(m.scaled(c));
  return ChainMap(source_, target_, std::move(out), false);
}

ChainMap ChainMap::retyped(const Complex& source, const Complex& target) const {
  return from_degrees(source, target,
                      [&](int p) { return component(p).retyped(source.term(p), target.term(p)); },
                      false);
}

void ChainMap::validate() const {
  for (int p = source_.lo(); p <= source_.hi(); ++p) {
    const PresheafMap& f = components_[static_cast<std::size_t>(p - source_.lo())];
    if (!(f.source() == source_.term(p)) || !(f.target() == target_.term(p)))
      throw InvalidInput("chain map: component " + std::to_string(p) + " has the wrong endpoints");
  }
  if (source_.empty_range()) return;
  for (int p = source_.lo() - 1; p <= source_.hi(); ++p) {
    const PresheafMap lhs = compose(target_.differential(p), component(p));
    const PresheafMap rhs = compose(component(p + 1), source_.differential(p));
    if (!same_matrices(lhs, rhs))
      throw InvalidInput("chain map: fails to commute with the differential in degree " +
                         std::to_string(p));
  }
}

bool operator==(const ChainMap& a, const ChainMap& b) {
  if (!(a.source() == b.source()) || !(a.target() == b.target())) return false;
  const int lo = std::min(a.source().lo(), b.source().lo());
  const int hi = std::max(a.source().hi(), b.source().hi());
  for (int p = lo; p <= hi; ++p)
    if (!same_matrices(a.component(p), b.component(p))) return false;
  return true;
}

ChainMap compose(const ChainMap& g, const ChainMap& f) {
  if (!(f.target() == g.source())) throw InvalidInput("compose: chain maps are not composable");
  return ChainMap::from_degrees(
      f.source(), g.target(),
      [&](int p) {
        return compose(g.component(p).retyped(f.target().term(p), g.target().term(p)), f.component(p));
      },
      false);
}

PresheafMap Homotopy::component(int p) const {
  if (p < source.lo() || p > source.hi()) return zero_map(source.term(p), target.term(p - 1));
  return components[static_cast<std::size_t>(p - source.lo())];
}

ChainMap Homotopy::boundary() const {
  return ChainMap::from_degrees(
      source, target,
      [&](int p) {
        return compose(target.differential(p - 1), component(p)) +
               compose(component(p + 1), source.differential(p));
      },
      false);
}

Homotopy Homotopy::zero(const Complex& source, const Complex& target) {
  Homotopy h{source, target, {}};
  for (int p = source.lo(); p <= source.hi(); ++p)
    h.components.push_back(zero_map(source.term(p), target.term(p - 1)));
  return h;
}

// Shift and cone --------------------------------------------------------------------

Complex shift(const Complex& x, int n) {
  if (x.empty_range()) return x;
  std::vector<Presheaf> terms;
  std::vector<PresheafMap> diffs;
  for (int p = x.lo(); p <= x.hi(); ++p) {
    terms.push_back(x.term(p));
    if (p < x.hi()) diffs.push_back(x.differential(p).scaled(sign(n)));
  }
  return Complex(x.lo() - n, std::move(terms), std::move(diffs), false);
}

ChainMap shift(const ChainMap& f, int n) {
  const Complex s = shift(f.source(), n), t = shift(f.target(), n);
  return ChainMap::from_degrees(s, t, [&](int p) { return f.component(p + n); }, false);
}

Cone cone(const ChainMap& f) {
  const Complex& x = f.source();
  const Complex& y = f.target();
  const Complex sx = shift(x, 1);
  if (x.empty_range() && y.empty_range()) {
    Complex z = Complex::zero(y.field(), y.shape());
    return {z, ChainMap::zero(y, z), ChainMap::zero(z, sx)};
  }
  int lo = 0, hi = -1;
  bool any = false;
  auto widen = [&](int a, int b) {
    if (b < a) return;
    lo = any ? std::min(lo, a) : a;
    hi = any ? std::max(hi, b) : b;
    any = true;
  };
  widen(x.lo() - 1, x.hi() - 1);
  widen(y.lo(), y.hi());
  std::vector<DirectSum> sums;
  for (int p = lo; p <= hi + 1; ++p) sums.push_back(direct_sum(std::vector<Presheaf>{x.term(p + 1), y.term(p)}));
  auto at = [&](int p) -> const DirectSum& { return sums[static_cast<std::size_t>(p - lo)]; };
  std::vector<Presheaf> terms;
  std::vector<PresheafMap> diffs;
  for (int p = lo; p <= hi; ++p) {
    terms.push_back(at(p).object);
    if (p == hi) break;
    const DirectSum& a = at(p);
    const DirectSum& b = at(p + 1);
    const PresheafMap q1 = a.projections[0], q2 = a.projections[1];
    PresheafMap top = compose(b.inclusions[0], compose(-x.differential(p + 1), q1));
    PresheafMap bottom =
        compose(b.inclusions[1], compose(f.component(p + 1), q1) + compose(y.differential(p), q2));
    diffs.push_back(top + bottom);
  }
  Complex c(lo, std::move(terms), std::move(diffs), false);
  ChainMap inc = ChainMap::from_degrees(y, c, [&](int p) { return at(p).inclusions[1].retyped(y.term(p), c.term(p)); }, false);
  ChainMap proj = ChainMap::from_degrees(c, sx, [&](int p) { return at(p).projections[0].retyped(c.term(p), sx.term(p)); }, false);
  return {std::move(c), std::move(inc), std::move(proj)};
}

// Homology --------------------------------------------------------------------------

Presheaf homology(const Complex& x, int p) {
  const SubObject z = kernel(x.differential(p));
  const PresheafMap d = x.differential(p - 1);
  std::vector<Matrix> comps;
  for (ObjId o = 0; o < x.shape().num_objects(); ++o) {
    auto s = solve(z.inclusion.component(o), d.component(o));
    if (!s) throw InvariantViolation("homology: boundaries are not cycles");
    comps.push_back(std::move(*s));
  }
  const PresheafMap into(x.term(p - 1), z.object, std::move(comps), false);
  return cokernel(into).object;
}

std::vector<std::size_t> homology_dims(const Complex& x, int p) {
  std::vector<std::size_t> out;
  const PresheafMap d = x.differential(p), e = x.differential(p - 1);
  for (ObjId o = 0; o < x.shape().num_objects(); ++o)
    out.push_back(x.term(p).dim(o) - rank(d.component(o)) - rank(e.component(o)));
  return out;
}

bool is_acyclic(const Complex& x) {
  for (int p = x.lo(); p <= x.hi(); ++p)
    for (std::size_t v : homology_dims(x, p))
      if (v != 0) return false;
  return true;
}

bool is_quasi_iso(const ChainMap& f) { return is_acyclic(cone(f).object); }

// Direct sums -----------------------------------------------------------------------

ComplexSum direct_sum(const std::vector<Complex>& parts) {
  if (parts.empty()) throw InvalidInput("direct sum of no complexes needs a shape");
  int lo = 0, hi = -1;
  bool any = false;
  for (const auto& c : parts) {
    if (!(c.shape() == parts.front().shape()) || !(c.field() == parts.front().field()))
      throw InvalidInput("direct sum: complexes live on different shapes");
    if (c.empty_range()) continue;
    lo = any ? std::min(lo, c.lo()) : c.lo();
    hi = any ? std::max(hi, c.hi()) : c.hi();
    any = true;
  }
  ComplexSum out;
  if (!any) {
    out.object = Complex::zero(parts.front().field(), parts.front().shape());
    for (const auto& c : parts) {
      out.inclusions.push_back(ChainMap::zero(c, out.object));
      out.projections.push_back(ChainMap::zero(out.object, c));
    }
    return out;
  }
  std::vector<DirectSum> sums;
  for (int p = lo; p <= hi; ++p) {
    std::vector<Presheaf> ts;
    for (const auto& c : parts) ts.push_back(c.term(p));
    sums.push_back(direct_sum(ts));
  }
  auto at = [&](int p) -> const DirectSum& { return sums[static_cast<std::size_t>(p - lo)]; };
  std::vector<Presheaf> terms;
  std::vector<PresheafMap> diffs;
  for (int p = lo; p <= hi; ++p) {
    terms.push_back(at(p).object);
    if (p == hi) break;
    std::vector<PresheafMap> ds;
    for (const auto& c : parts) ds.push_back(c.differential(p));
    diffs.push_back(direct_sum(ds, at(p).object, at(p + 1).object));
  }
  out.object = Complex(lo, std::move(terms), std::move(diffs), false);
  const Complex& s = out.object;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Complex& c = parts[k];
    out.inclusions.push_back(ChainMap::from_degrees(
        c, s, [&](int p) { return at(p).inclusions[k].retyped(c.term(p), s.term(p)); }, false));
    out.projections.push_back(ChainMap::from_degrees(
        s, c, [&](int p) { return at(p).projections[k].retyped(s.term(p), c.term(p)); }, false));
  }
  return out;
}

Complex direct_sum(const Complex& a, const Complex& b) { return direct_sum(std::vector<Complex>{a, b}).object; }

// Restriction, duality, extension by zero -------------------------------------------

Complex restrict(const DiagFunctor& u, const Complex& x) {
  if (!(u.target() == x.shape())) throw InvalidInput("restrict: shape mismatch");
  if (x.empty_range()) return Complex::zero(x.field(), u.source());
  std::vector<Presheaf> terms;
  std::vector<PresheafMap> diffs;
  for (int p = x.lo(); p <= x.hi(); ++p) {
    terms.push_back(restrict(u, x.term(p)));
    if (p < x.hi()) diffs.push_back(restrict(u, x.differential(p)));
  }
  for (std::size_t k = 0; k < diffs.size(); ++k) diffs[k] = diffs[k].retyped(terms[k], terms[k + 1]);
  return Complex(x.lo(), std::move(terms), std::move(diffs), false);
}

ChainMap restrict(const DiagFunctor& u, const ChainMap& f) {
  const Complex s = restrict(u, f.source()), t = restrict(u, f.target());
  return ChainMap::from_degrees(
      s, t, [&](int p) { return restrict(u, f.component(p)).retyped(s.term(p), t.term(p)); }, false);
}

Complex dualize(const Complex& x) {
  if (x.empty_range()) return Complex::zero(x.field(), opposite(x.shape()));
  std::vector<Presheaf> terms;
  std::vector<PresheafMap> diffs;
  for (int p = -x.hi(); p <= -x.lo(); ++p) terms.push_back(dualize(x.term(-p)));
  for (int p = -x.hi(); p < -x.lo(); ++p) {
    const std::size_t k = static_cast<std::size_t>(p + x.hi());
    diffs.push_back(dualize(x.differential(-p - 1)).retyped(terms[k], terms[k + 1]));
  }
  return Complex(-x.hi(), std::move(terms), std::move(diffs), false);
}

ChainMap dualize(const ChainMap& f) {
  const Complex s = dualize(f.target()), t = dualize(f.source());
  return ChainMap::from_degrees(
      s, t, [&](int p) { return dualize(f.component(-p)).retyped(s.term(p), t.term(p)); }, false);
}

Complex extend_by_zero(const DiagFunctor& u, const Complex& x) {
  if (x.empty_range()) return Complex::zero(x.field(), u.target());
  std::vector<Presheaf> terms;
  std::vector<PresheafMap> diffs;
  for (int p = x.lo(); p <= x.hi(); ++p) terms.push_back(extend_by_zero(u, x.term(p)));
  for (int p = x.lo(); p < x.hi(); ++p) {
    const std::size_t k = static_cast<std::size_t>(p - x.lo());
    diffs.push_back(extend_by_zero(u, x.differential(p), terms[k], terms[k + 1]));
  }
  return Complex(x.lo(), std::move(terms), std::move(diffs), false);
}

ChainMap extend_by_zero(const DiagFunctor& u, const ChainMap& f, const Complex& source,
                        const Complex& target) {
  return ChainMap::from_degrees(
      source, target,
      [&](int p) { return extend_by_zero(u, f.component(p), source.term(p), target.term(p)); }, false);
}

}  // namespace derivkit
