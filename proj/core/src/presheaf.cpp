#include "derivkit/presheaf.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "derivkit/error.hpp"

namespace derivkit {

namespace {

void require_same_shape(const Presheaf& a, const Presheaf& b, const char* what) {
  if (!(a.field() == b.field())) throw InvalidInput(std::string(what) + ": field mismatch");
  if (!a.same_shape(b)) throw InvalidInput(std::string(what) + ": shape mismatch");
}

std::size_t position_in(const std::vector<ArrId>& v, ArrId a) {
  for (std::size_t k = 0; k < v.size(); ++k)
    if (v[k] == a) return k;
  throw InvariantViolation("arrow missing from its hom-set");
}

// Quotient coordinates of k^n by the span of `span` (independent columns):
// the quotient basis is the set of standard vectors completing the span.
struct QuotientSpace {
  Matrix projection;  // k × n
  Matrix section;     // n × k, selected standard vectors
};

QuotientSpace quotient_space(const Field& field, const Matrix& span, std::size_t n) {
  const Matrix id = Matrix::identity(field, n);
  const auto extra = complement_columns(span, id);
  const Matrix e = id.select_columns(extra);
  const Matrix m = Matrix::hstack({span, e}, field, n);
  const Matrix inv = inverse(m);
  return {inv.block(span.cols(), 0, extra.size(), n), e};
}

}  // namespace

// Presheaf ---------------------------------------------------------------------

Presheaf::Presheaf() : Presheaf(zero(Field::f2(), FinCat())) {}

Presheaf Presheaf::from_all_actions(Field field, FinCat shape, std::vector<std::size_t> dims,
                                    std::vector<Matrix> actions,
                                    std::optional<std::vector<FreeSummand>> free) {
  auto d = std::make_shared<Data>();
  d->field = field;
  d->shape = std::move(shape);
  d->dims = std::move(dims);
  d->actions = std::move(actions);
  if (d->dims.size() != d->shape.num_objects())
    throw InvalidInput("presheaf: wrong number of fiber dimensions");
  if (d->actions.size() != d->shape.num_arrows())
    throw InvalidInput("presheaf: wrong number of actions");
  for (ArrId a = 0; a < d->actions.size(); ++a) {
    const auto& ar = d->shape.arrow(a);
    const Matrix& m = d->actions[a];
    if (!(m.field() == field) || m.rows() != d->dims[ar.source] ||
        m.cols() != d->dims[ar.target])
      throw InvalidInput("presheaf: action of '" + ar.name + "' has the wrong shape");
  }
  if (free) {
    const FinCat& s = d->shape;
    d->free_offsets.assign(s.num_objects(), std::vector<std::size_t>(free->size(), 0));
    for (ObjId j = 0; j < s.num_objects(); ++j) {
      std::size_t off = 0;
      for (std::size_t t = 0; t < free->size(); ++t) {
        d->free_offsets[j][t] = off;
        off += s.hom(j, (*free)[t].object).size() * (*free)[t].multiplicity;
      }
      if (off != d->dims[j]) throw InvariantViolation("free decoration does not match fibers");
    }
  }
  d->free = std::move(free);
  return Presheaf(std::shared_ptr<const Data>(std::move(d)));
}

Presheaf Presheaf::from_generators(Field field, FinCat shape, std::vector<std::size_t> dims,
                                   std::vector<Matrix> irreducible_actions, bool check) {
  const auto& irr = shape.irreducible_arrows();
  if (irreducible_actions.size() != irr.size())
    throw InvalidInput("presheaf: expected one matrix per irreducible arrow");
  if (dims.size() != shape.num_objects())
    throw InvalidInput("presheaf: wrong number of fiber dimensions");
  std::vector<std::size_t> slot(shape.num_arrows(), npos);
  for (std::size_t k = 0; k < irr.size(); ++k) {
    slot[irr[k]] = k;
    const auto& ar = shape.arrow(irr[k]);
    const Matrix& m = irreducible_actions[k];
    if (!(m.field() == field) || m.rows() != dims[ar.source] || m.cols() != dims[ar.target])
      throw InvalidInput("presheaf: action of '" + ar.name + "' has the wrong shape");
  }
  std::vector<Matrix> actions(shape.num_arrows());
  for (ArrId a = 0; a < shape.num_arrows(); ++a) {
    const auto& ar = shape.arrow(a);
    if (shape.is_identity(a)) {
      actions[a] = Matrix::identity(field, dims[ar.source]);
      continue;
    }
    // a = f_k ∘ … ∘ f_1 acts by F(f_1)·…·F(f_k).
    const auto& fac = shape.factorization(a);
    Matrix m = irreducible_actions[slot[fac.front()]];
    for (std::size_t k = 1; k < fac.size(); ++k) m = m * irreducible_actions[slot[fac[k]]];
    actions[a] = std::move(m);
  }
  Presheaf p = from_all_actions(field, std::move(shape), std::move(dims), std::move(actions));
  if (check) p.validate();
  return p;
}

Presheaf Presheaf::zero(Field field, FinCat shape) {
  const std::size_t n = shape.num_objects();
  std::vector<Matrix> actions(shape.num_arrows(), Matrix(field, 0, 0));
  return from_all_actions(field, std::move(shape), std::vector<std::size_t>(n, 0),
                          std::move(actions), std::vector<FreeSummand>{});
}

Presheaf Presheaf::constant(Field field, FinCat shape, std::size_t dim) {
  std::vector<Matrix> actions(shape.num_arrows(), Matrix::identity(field, dim));
  const std::size_t n = shape.num_objects();
  return from_all_actions(field, std::move(shape), std::vector<std::size_t>(n, dim),
                          std::move(actions));
}

std::size_t Presheaf::total_dim() const {
  return std::accumulate(d_->dims.begin(), d_->dims.end(), std::size_t{0});
}

std::vector<Matrix> Presheaf::irreducible_actions() const {
  std::vector<Matrix> out;
  for (ArrId a : shape().irreducible_arrows()) out.push_back(action(a));
  return out;
}

const std::vector<FreeSummand>& Presheaf::free_summands() const {
  if (!d_->free) throw InvalidInput("presheaf carries no free decoration");
  return *d_->free;
}

std::size_t Presheaf::generator_offset(std::size_t t) const {
  const ObjId i = free_summands().at(t).object;
  return block_offset(t, shape().identity(i));
}

std::size_t Presheaf::block_offset(std::size_t t, ArrId h) const {
  const auto& s = free_summands().at(t);
  const ObjId j = shape().arrow(h).source;
  return d_->free_offsets[j][t] + position_in(shape().hom(j, s.object), h) * s.multiplicity;
}

Presheaf Presheaf::without_decoration() const {
  if (!d_->free) return *this;
  return from_all_actions(field(), shape(), dims(), d_->actions);
}

void Presheaf::validate() const {
  const FinCat& s = shape();
  for (ObjId x = 0; x < s.num_objects(); ++x)
    if (!action(s.identity(x)).is_identity())
      throw InvalidInput("presheaf: identity of '" + s.object_name(x) + "' does not act trivially");
  for (ArrId g = 0; g < s.num_arrows(); ++g)
    for (ArrId f = 0; f < s.num_arrows(); ++f) {
      const ArrId c = s.compose_or_npos(g, f);
      if (c == npos || s.is_identity(f) || s.is_identity(g)) continue;
      if (!(action(c) == action(f) * action(g)))
        throw InvalidInput("presheaf is not functorial: " + s.arrow(g).name + " after " +
                           s.arrow(f).name);
    }
}

bool Presheaf::same_shape(const Presheaf& other) const { return shape() == other.shape(); }

bool operator==(const Presheaf& a, const Presheaf& b) {
  if (a.d_ == b.d_) return true;
  return a.field() == b.field() && a.same_shape(b) && a.dims() == b.dims() &&
         a.d_->actions == b.d_->actions;
}

std::string Presheaf::summary() const {
  std::ostringstream os;
  os << "dims (";
  for (std::size_t x = 0; x < dims().size(); ++x) os << (x ? "," : "") << dims()[x];
  os << ")";
  return os.str();
}

// PresheafMap --------------------------------------------------------------------

PresheafMap::PresheafMap(Presheaf source, Presheaf target, std::vector<Matrix> components,
                         bool check)
    : source_(std::move(source)), target_(std::move(target)), components_(std::move(components)) {
  require_same_shape(source_, target_, "presheaf map");
  const FinCat& s = source_.shape();
  if (components_.size() != s.num_objects())
    throw InvalidInput("presheaf map: wrong number of components");
  for (ObjId x = 0; x < s.num_objects(); ++x) {
    const Matrix& m = components_[x];
    if (!(m.field() == source_.field()) || m.rows() != target_.dim(x) || m.cols() != source_.dim(x))
      throw InvalidInput("presheaf map: component at '" + s.object_name(x) +
                         "' has the wrong shape");
  }
  if (!check) return;
  for (ArrId a : s.irreducible_arrows()) {
    const ObjId x = s.arrow(a).source, y = s.arrow(a).target;
    if (!(target_.action(a) * components_[y] == components_[x] * source_.action(a)))
      throw InvalidInput("presheaf map is not natural at arrow '" + s.arrow(a).name + "'");
  }
}

PresheafMap PresheafMap::zero(const Presheaf& source, const Presheaf& target) {
  std::vector<Matrix> c;
  for (ObjId x = 0; x < source.shape().num_objects(); ++x)
    c.emplace_back(source.field(), target.dim(x), source.dim(x));
  return PresheafMap(source, target, std::move(c), false);
}

PresheafMap PresheafMap::identity(const Presheaf& f) {
  std::vector<Matrix> c;
  for (ObjId x = 0; x < f.shape().num_objects(); ++x)
    c.push_back(Matrix::identity(f.field(), f.dim(x)));
  return PresheafMap(f, f, std::move(c), false);
}

bool PresheafMap::is_zero() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const Matrix& m) { return m.is_zero(); });
}

bool PresheafMap::is_injective() const {
  for (const auto& m : components_)
    if (rank(m) != m.cols()) return false;
  return true;
}

bool PresheafMap::is_surjective() const {
  for (const auto& m : components_)
    if (rank(m) != m.rows()) return false;
  return true;
}

bool PresheafMap::is_iso() const { return is_injective() && is_surjective(); }

PresheafMap PresheafMap::operator+(const PresheafMap& o) const {
  std::vector<Matrix> c;
  for (std::size_t x = 0; x < components_.size(); ++x) c.push_back(components_[x] + o.components_.at(x));
  return PresheafMap(source_, target_, std::move(c), false);
}

PresheafMap PresheafMap::operator-(const PresheafMap& o) const {
  std::vector<Matrix> c;
  for (std::size_t x = 0; x < components_.size(); ++x) c.push_back(components_[x] - o.components_.at(x));
  return PresheafMap(source_, target_, std::move(c), false);
}

PresheafMap PresheafMap::operator-() const {
  std::vector<Matrix> c;
  for (const auto& m : components_) c.push_back(-m);
  return PresheafMap(source_, target_, std::move(c), false);
}

PresheafMap PresheafMap::scaled(const mpq_class& k) const {
  std::vector<Matrix> c;
  for (const auto& m : components_) c.push_back(m.scaled(k));
  return PresheafMap(source_, target_, std::move(c), false);
}

PresheafMap PresheafMap::retyped(const Presheaf& source, const Presheaf& target) const {
  return PresheafMap(source, target, components_, false);
}

bool operator==(const PresheafMap& a, const PresheafMap& b) {
  return a.source_ == b.source_ && a.target_ == b.target_ && a.components_ == b.components_;
}

PresheafMap compose(const PresheafMap& g, const PresheafMap& f) {
  if (!(f.target().dims() == g.source().dims()))
    throw InvalidInput("presheaf maps are not composable");
  std::vector<Matrix> c;
  for (std::size_t x = 0; x < f.components().size(); ++x)
    c.push_back(g.component(x) * f.component(x));
  return PresheafMap(f.source(), g.target(), std::move(c), false);
}

// Kernels, images, quotients ---------------------------------------------------------

SubObject subpresheaf(const Presheaf& g, const std::vector<Matrix>& bases) {
  const FinCat& s = g.shape();
  std::vector<std::size_t> dims;
  for (const auto& b : bases) dims.push_back(b.cols());
  std::vector<Matrix> irr;
  for (ArrId a : s.irreducible_arrows()) {
    const ObjId x = s.arrow(a).source, y = s.arrow(a).target;
    auto m = solve(bases[x], g.action(a) * bases[y]);
    if (!m) throw InvalidInput("subspaces are not stable under the action");
    irr.push_back(std::move(*m));
  }
  Presheaf k = Presheaf::from_generators(g.field(), s, std::move(dims), std::move(irr), false);
  PresheafMap inc(k, g, bases, false);
  return {std::move(k), std::move(inc)};
}

QuotientObject quotient(const Presheaf& g, const std::vector<Matrix>& bases) {
  const FinCat& s = g.shape();
  std::vector<QuotientSpace> q;
  std::vector<std::size_t> dims;
  for (ObjId x = 0; x < s.num_objects(); ++x) {
    q.push_back(quotient_space(g.field(), bases[x], g.dim(x)));
    dims.push_back(q.back().projection.rows());
  }
  std::vector<Matrix> irr;
  for (ArrId a : s.irreducible_arrows()) {
    const ObjId x = s.arrow(a).source, y = s.arrow(a).target;
    irr.push_back(q[x].projection * g.action(a) * q[y].section);
  }
  Presheaf c = Presheaf::from_generators(g.field(), s, std::move(dims), std::move(irr), false);
  std::vector<Matrix> proj;
  for (auto& e : q) proj.push_back(std::move(e.projection));
  PresheafMap p(g, c, std::move(proj), false);
  return {std::move(c), std::move(p)};
}

SubObject kernel(const PresheafMap& f) {
  std::vector<Matrix> bases;
  for (const auto& m : f.components()) bases.push_back(kernel_basis(m));
  return subpresheaf(f.source(), bases);
}

ImageObject image(const PresheafMap& f) {
  std::vector<Matrix> bases;
  for (const auto& m : f.components()) bases.push_back(image_basis(m));
  SubObject sub = subpresheaf(f.target(), bases);
  std::vector<Matrix> fac;
  for (std::size_t x = 0; x < bases.size(); ++x) fac.push_back(*solve(bases[x], f.component(x)));
  PresheafMap factor(f.source(), sub.object, std::move(fac), false);
  return {sub.object, sub.inclusion, std::move(factor)};
}

QuotientObject cokernel(const PresheafMap& f) {
  std::vector<Matrix> bases;
  for (const auto& m : f.components()) bases.push_back(image_basis(m));
  return quotient(f.target(), bases);
}

// Direct sums -------------------------------------------------------------------------

DirectSum direct_sum(const std::vector<Presheaf>& parts) {
  if (parts.empty()) throw InvalidInput("direct sum of no presheaves needs a shape");
  const Presheaf& first = parts.front();
  for (const auto& p : parts) require_same_shape(first, p, "direct sum");
  const FinCat& s = first.shape();
  const Field& k = first.field();
  std::vector<std::size_t> dims(s.num_objects(), 0);
  for (const auto& p : parts)
    for (ObjId x = 0; x < dims.size(); ++x) dims[x] += p.dim(x);
  std::vector<Matrix> actions;
  for (ArrId a = 0; a < s.num_arrows(); ++a) {
    const ObjId x = s.arrow(a).source, y = s.arrow(a).target;
    Matrix m(k, dims[x], dims[y]);
    std::size_t r = 0, c = 0;
    for (const auto& p : parts) {
      m.set_block(r, c, p.action(a));
      r += p.dim(x);
      c += p.dim(y);
    }
    actions.push_back(std::move(m));
  }
  std::optional<std::vector<FreeSummand>> free;
  if (std::all_of(parts.begin(), parts.end(), [](const Presheaf& p) { return p.is_free(); })) {
    free.emplace();
    for (const auto& p : parts)
      free->insert(free->end(), p.free_summands().begin(), p.free_summands().end());
  }
  Presheaf sum = Presheaf::from_all_actions(k, s, dims, std::move(actions), std::move(free));
  DirectSum out{sum, {}, {}};
  std::vector<std::size_t> off(s.num_objects(), 0);
  for (const auto& p : parts) {
    std::vector<Matrix> inc, proj;
    for (ObjId x = 0; x < s.num_objects(); ++x) {
      Matrix i(k, dims[x], p.dim(x));
      for (std::size_t r = 0; r < p.dim(x); ++r) i.set(off[x] + r, r, 1L);
      proj.push_back(i.transpose());
      inc.push_back(std::move(i));
      off[x] += p.dim(x);
    }
    out.inclusions.emplace_back(p, sum, std::move(inc), false);
    out.projections.emplace_back(sum, p, std::move(proj), false);
  }
  return out;
}

Presheaf direct_sum(const Presheaf& a, const Presheaf& b) { return direct_sum({a, b}).object; }

PresheafMap direct_sum(const std::vector<PresheafMap>& maps, const Presheaf& source,
                       const Presheaf& target) {
  const FinCat& s = source.shape();
  std::vector<Matrix> c;
  for (ObjId x = 0; x < s.num_objects(); ++x) {
    Matrix m(source.field(), target.dim(x), source.dim(x));
    std::size_t r = 0, col = 0;
    for (const auto& f : maps) {
      m.set_block(r, col, f.component(x));
      r += f.target().dim(x);
      col += f.source().dim(x);
    }
    c.push_back(std::move(m));
  }
  return PresheafMap(source, target, std::move(c), false);
}

PresheafMap row_map(const std::vector<PresheafMap>& maps, const Presheaf& source) {
  const Presheaf& target = maps.front().target();
  std::vector<Matrix> c;
  for (ObjId x = 0; x < source.shape().num_objects(); ++x) {
    std::vector<Matrix> parts;
    for (const auto& f : maps) parts.push_back(f.component(x));
    c.push_back(Matrix::hstack(parts, source.field(), target.dim(x)));
  }
  return PresheafMap(source, target, std::move(c), false);
}

PresheafMap column_map(const std::vector<PresheafMap>& maps, const Presheaf& target) {
  const Presheaf& source = maps.front().source();
  std::vector<Matrix> c;
  for (ObjId x = 0; x < source.shape().num_objects(); ++x) {
    std::vector<Matrix> parts;
    for (const auto& f : maps) parts.push_back(f.component(x));
    c.push_back(Matrix::vstack(parts, source.field(), source.dim(x)));
  }
  return PresheafMap(source, target, std::move(c), false);
}

// Exact structure ---------------------------------------------------------------------

bool is_conflation(const PresheafMap& i, const PresheafMap& p) {
  if (!(i.target().dims() == p.source().dims())) return false;
  if (!compose(p, i).is_zero()) return false;
  for (ObjId x = 0; x < i.source().shape().num_objects(); ++x) {
    const std::size_t ri = rank(i.component(x)), rp = rank(p.component(x));
    if (ri != i.source().dim(x) || rp != p.target().dim(x)) return false;
    if (ri + rp != i.target().dim(x)) return false;
  }
  return true;
}

Pushout pushout(const PresheafMap& i, const PresheafMap& f) {
  if (!i.is_injective()) throw PreconditionFailed("pushout: the map is not an inflation");
  const DirectSum s = direct_sum({i.target(), f.target()});
  const PresheafMap rel = column_map({i, -f}, s.object);
  const QuotientObject q = cokernel(rel);
  return {q.object, compose(q.projection, s.inclusions[1]), compose(q.projection, s.inclusions[0])};
}

Pullback pullback(const PresheafMap& p, const PresheafMap& g) {
  if (!p.is_surjective()) throw PreconditionFailed("pullback: the map is not a deflation");
  const DirectSum s = direct_sum({p.source(), g.source()});
  const PresheafMap rel = row_map({p, -g}, s.object);
  const SubObject k = kernel(rel);
  return {k.object, compose(s.projections[1], k.inclusion), compose(s.projections[0], k.inclusion)};
}

// Projectives --------------------------------------------------------------------------

Presheaf free_sum(Field field, const FinCat& shape, const std::vector<FreeSummand>& summands) {
  for (const auto& s : summands)
    if (s.object >= shape.num_objects()) throw InvalidInput("free summand at unknown object");
  const std::size_t n = shape.num_objects();
  std::vector<std::size_t> dims(n, 0);
  std::vector<std::vector<std::size_t>> off(n, std::vector<std::size_t>(summands.size()));
  for (ObjId j = 0; j < n; ++j)
    for (std::size_t t = 0; t < summands.size(); ++t) {
      off[j][t] = dims[j];
      dims[j] += shape.hom(j, summands[t].object).size() * summands[t].multiplicity;
    }
  std::vector<Matrix> actions;
  for (ArrId a = 0; a < shape.num_arrows(); ++a) {
    const ObjId x = shape.arrow(a).source, y = shape.arrow(a).target;
    Matrix m(field, dims[x], dims[y]);
    for (std::size_t t = 0; t < summands.size(); ++t) {
      const ObjId i = summands[t].object;
      const std::size_t v = summands[t].multiplicity;
      const auto& hy = shape.hom(y, i);
      const auto& hx = shape.hom(x, i);
      for (std::size_t k = 0; k < hy.size(); ++k) {
        const std::size_t pos = position_in(hx, shape.compose(hy[k], a));
        for (std::size_t r = 0; r < v; ++r) m.set(off[x][t] + pos * v + r, off[y][t] + k * v + r, 1L);
      }
    }
    actions.push_back(std::move(m));
  }
  return Presheaf::from_all_actions(field, shape, std::move(dims), std::move(actions), summands);
}

Presheaf free_at(Field field, const FinCat& shape, std::size_t v, ObjId i) {
  if (i >= shape.num_objects()) throw InvalidInput("free_at: unknown object");
  return free_sum(field, shape, {{i, v}});
}

PresheafMap map_from_free(const Presheaf& p, const Presheaf& g, const std::vector<Matrix>& images) {
  require_same_shape(p, g, "map from free");
  const auto& sums = p.free_summands();
  if (images.size() != sums.size()) throw InvalidInput("map from free: wrong number of images");
  const FinCat& s = p.shape();
  std::vector<Matrix> c;
  for (ObjId j = 0; j < s.num_objects(); ++j) c.emplace_back(p.field(), g.dim(j), p.dim(j));
  for (std::size_t t = 0; t < sums.size(); ++t) {
    const ObjId i = sums[t].object;
    if (images[t].rows() != g.dim(i) || images[t].cols() != sums[t].multiplicity)
      throw InvalidInput("map from free: generator image has the wrong shape");
    for (ObjId j = 0; j < s.num_objects(); ++j)
      for (ArrId h : s.hom(j, i)) c[j].set_block(0, p.block_offset(t, h), g.action(h) * images[t]);
  }
  return PresheafMap(p, g, std::move(c), false);
}

std::vector<Matrix> generator_images(const PresheafMap& phi) {
  const Presheaf& p = phi.source();
  std::vector<Matrix> out;
  const auto& sums = p.free_summands();
  for (std::size_t t = 0; t < sums.size(); ++t) {
    const ObjId i = sums[t].object;
    out.push_back(phi.component(i).block(0, p.generator_offset(t), phi.target().dim(i),
                                         sums[t].multiplicity));
  }
  return out;
}

CanonicalCover canonical_cover(const Presheaf& f) {
  std::vector<FreeSummand> sums;
  std::vector<Matrix> images;
  for (ObjId i = 0; i < f.shape().num_objects(); ++i)
    if (f.dim(i) > 0) {
      sums.push_back({i, f.dim(i)});
      images.push_back(Matrix::identity(f.field(), f.dim(i)));
    }
  Presheaf p = free_sum(f.field(), f.shape(), sums);
  PresheafMap e = map_from_free(p, f, images);
  return {std::move(p), std::move(e)};
}

CanonicalCover minimal_cover(const Presheaf& f) {
  const FinCat& s = f.shape();
  std::vector<FreeSummand> sums;
  std::vector<Matrix> images;
  for (ObjId x = 0; x < s.num_objects(); ++x) {
    if (f.dim(x) == 0) continue;
    std::vector<Matrix> rad;
    for (ArrId a : s.irreducible_arrows())
      if (s.arrow(a).source == x) rad.push_back(f.action(a));
    const Matrix radical = rad.empty() ? Matrix(f.field(), f.dim(x), 0)
                                       : Matrix::hstack(rad, f.field(), f.dim(x));
    const Matrix id = Matrix::identity(f.field(), f.dim(x));
    const auto gens = complement_columns(image_basis(radical), id);
    if (gens.empty()) continue;
    sums.push_back({x, gens.size()});
    images.push_back(id.select_columns(gens));
  }
  Presheaf p = free_sum(f.field(), s, sums);
  PresheafMap e = map_from_free(p, f, images);
  return {std::move(p), std::move(e)};
}

Resolution resolve(const Presheaf& f) {
  Resolution r;
  r.input = f;
  if (f.is_free()) {  // already projective: nothing to resolve
    r.terms.push_back(f);
    r.augmentation = PresheafMap::identity(f);
    r.kernels.push_back(Presheaf::zero(f.field(), f.shape()));
    return r;
  }
  CanonicalCover c = canonical_cover(f);
  r.terms.push_back(c.cover);
  r.augmentation = c.counit;
  SubObject k = kernel(c.counit);
  r.kernels.push_back(k.object);
  const std::size_t bound = f.shape().max_chain_length();
  while (!k.object.is_zero()) {
    if (r.terms.size() > bound)
      throw InvariantViolation("resolution does not terminate within the chain-length bound");
    CanonicalCover ck = canonical_cover(k.object);
    r.terms.push_back(ck.cover);
    r.differentials.push_back(compose(k.inclusion, ck.counit));
    k = kernel(ck.counit);
    r.kernels.push_back(k.object);
  }
  return r;
}

// Hom spaces -----------------------------------------------------------------------------

std::vector<PresheafMap> hom_space(const Presheaf& f, const Presheaf& g) {
  require_same_shape(f, g, "hom_space");
  const Field& k = f.field();
  std::vector<PresheafMap> out;
  if (f.is_free()) {
    const auto& sums = f.free_summands();
    for (std::size_t t = 0; t < sums.size(); ++t) {
      const std::size_t rows = g.dim(sums[t].object), cols = sums[t].multiplicity;
      for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r) {
          std::vector<Matrix> images;
          for (const auto& s : sums) images.emplace_back(k, g.dim(s.object), s.multiplicity);
          images[t].set(r, c, 1L);
          out.push_back(map_from_free(f, g, images));
        }
    }
    return out;
  }
  const FinCat& s = f.shape();
  std::vector<std::size_t> off(s.num_objects() + 1, 0);
  for (ObjId x = 0; x < s.num_objects(); ++x) off[x + 1] = off[x] + g.dim(x) * f.dim(x);
  std::size_t eqs = 0;
  for (ArrId a : s.irreducible_arrows()) eqs += g.dim(s.arrow(a).source) * f.dim(s.arrow(a).target);
  Matrix sys(k, eqs, off.back());
  std::size_t row = 0;
  for (ArrId a : s.irreducible_arrows()) {
    const ObjId x = s.arrow(a).source, y = s.arrow(a).target;
    const Matrix& ga = g.action(a);  // G_x × G_y
    const Matrix& fa = f.action(a);  // F_x × F_y
    // (G(a) φ_y − φ_x F(a))[r, c] = 0
    for (std::size_t r = 0; r < g.dim(x); ++r)
      for (std::size_t c = 0; c < f.dim(y); ++c, ++row) {
        for (std::size_t q = 0; q < g.dim(y); ++q)
          if (ga.is_nonzero_at(r, q)) sys.add_block(row, off[y] + q * f.dim(y) + c, ga.block(r, q, 1, 1));
        for (std::size_t q = 0; q < f.dim(x); ++q)
          if (fa.is_nonzero_at(q, c))
            sys.add_block(row, off[x] + r * f.dim(x) + q, -fa.block(q, c, 1, 1));
      }
  }
  const Matrix ker = kernel_basis(sys);
  for (std::size_t j = 0; j < ker.cols(); ++j) {
    std::vector<Matrix> comps;
    for (ObjId x = 0; x < s.num_objects(); ++x) {
      Matrix m(k, g.dim(x), f.dim(x));
      for (std::size_t r = 0; r < g.dim(x); ++r)
        for (std::size_t c = 0; c < f.dim(x); ++c)
          if (ker.is_nonzero_at(off[x] + r * f.dim(x) + c, j))
            m.set(r, c, ker.at(off[x] + r * f.dim(x) + c, j));
      comps.push_back(std::move(m));
    }
    out.emplace_back(f, g, std::move(comps), false);
  }
  return out;
}

std::size_t hom_dim(const Presheaf& f, const Presheaf& g) {
  if (f.is_free()) {
    std::size_t d = 0;
    for (const auto& s : f.free_summands()) d += g.dim(s.object) * s.multiplicity;
    return d;
  }
  return hom_space(f, g).size();
}

// Restriction, duality ------------------------------------------------------------------

Presheaf restrict(const DiagFunctor& u, const Presheaf& g) {
  if (!(u.target() == g.shape())) throw InvalidInput("restrict: shape mismatch");
  std::vector<std::size_t> dims;
  for (ObjId x = 0; x < u.source().num_objects(); ++x) dims.push_back(g.dim(u(x)));
  std::vector<Matrix> actions;
  for (ArrId a = 0; a < u.source().num_arrows(); ++a) actions.push_back(g.action(u.map_arrow(a)));
  return Presheaf::from_all_actions(g.field(), u.source(), std::move(dims), std::move(actions));
}

PresheafMap restrict(const DiagFunctor& u, const PresheafMap& phi) {
  std::vector<Matrix> c;
  for (ObjId x = 0; x < u.source().num_objects(); ++x) c.push_back(phi.component(u(x)));
  return PresheafMap(restrict(u, phi.source()), restrict(u, phi.target()), std::move(c), false);
}

Presheaf dualize(const Presheaf& f) {
  std::vector<Matrix> actions;
  for (ArrId a = 0; a < f.shape().num_arrows(); ++a) actions.push_back(f.action(a).transpose());
  return Presheaf::from_all_actions(f.field(), opposite(f.shape()), f.dims(), std::move(actions));
}

PresheafMap dualize(const PresheafMap& phi) {
  std::vector<Matrix> c;
  for (const auto& m : phi.components()) c.push_back(m.transpose());
  return PresheafMap(dualize(phi.target()), dualize(phi.source()), std::move(c), false);
}

// Kan extensions ---------------------------------------------------------------------------

Presheaf lan_pointwise(const DiagFunctor& u, const Presheaf& f) {
  if (!(u.source() == f.shape())) throw InvalidInput("lan: shape mismatch");
  const FinCat& j = u.target();
  const Field& k = f.field();
  struct Fiber {
    CommaCategory comma;
    std::vector<std::size_t> offset;
    QuotientSpace q;
  };
  std::vector<Fiber> fib;
  std::vector<std::size_t> dims;
  for (ObjId y = 0; y < j.num_objects(); ++y) {
    CommaCategory c = comma_under(u, y);
    std::vector<std::size_t> off(c.entries.size() + 1, 0);
    for (std::size_t e = 0; e < c.entries.size(); ++e)
      off[e + 1] = off[e] + f.dim(c.entries[e].first);
    std::vector<Matrix> rels;
    for (ArrId g = 0; g < c.category.num_arrows(); ++g) {
      if (c.category.is_identity(g)) continue;
      const std::size_t e = c.category.arrow(g).source, e2 = c.category.arrow(g).target;
      const ArrId base = c.forget.map_arrow(g);
      // v ∈ F at e2 is identified with F(base)v at e.
      Matrix r(k, off.back(), f.dim(c.entries[e2].first));
      r.set_block(off[e2], 0, Matrix::identity(k, f.dim(c.entries[e2].first)));
      r.add_block(off[e], 0, -f.action(base));
      rels.push_back(std::move(r));
    }
    const Matrix span = rels.empty() ? Matrix(k, off.back(), 0)
                                     : image_basis(Matrix::hstack(rels, k, off.back()));
    QuotientSpace q = quotient_space(k, span, off.back());
    dims.push_back(q.projection.rows());
    fib.push_back({std::move(c), std::move(off), std::move(q)});
  }
  std::vector<Matrix> actions;
  for (ArrId b = 0; b < j.num_arrows(); ++b) {
    const ObjId y = j.arrow(b).source, y2 = j.arrow(b).target;
    // Summand (a, f' : y2 → u a) goes to (a, f'∘b).
    Matrix move(k, fib[y].offset.back(), fib[y2].offset.back());
    const auto& src = fib[y2].comma.entries;
    const auto& dst = fib[y].comma.entries;
    for (std::size_t e = 0; e < src.size(); ++e) {
      const ArrId fb = j.compose(src[e].second, b);
      std::size_t target = npos;
      for (std::size_t e2 = 0; e2 < dst.size(); ++e2)
        if (dst[e2].first == src[e].first && dst[e2].second == fb) target = e2;
      move.set_block(fib[y].offset[target], fib[y2].offset[e],
                     Matrix::identity(k, f.dim(src[e].first)));
    }
    actions.push_back(fib[y].q.projection * move * fib[y2].q.section);
  }
  return Presheaf::from_all_actions(k, j, std::move(dims), std::move(actions));
}

Presheaf lan_free(const DiagFunctor& u, const Presheaf& p) {
  std::vector<FreeSummand> sums;
  for (const auto& s : p.free_summands()) sums.push_back({u(s.object), s.multiplicity});
  return free_sum(p.field(), u.target(), sums);
}

PresheafMap lan_free(const DiagFunctor& u, const PresheafMap& phi, const Presheaf& source,
                     const Presheaf& target) {
  const Presheaf& p = phi.source();
  const Presheaf& q = phi.target();
  const auto& ps = p.free_summands();
  const auto& qs = q.free_summands();
  const FinCat& i = p.shape();
  std::vector<Matrix> images;
  for (std::size_t t = 0; t < ps.size(); ++t) {
    const ObjId it = ps[t].object;
    const Matrix& img = phi.component(it);
    const std::size_t col0 = p.generator_offset(t);
    Matrix out(p.field(), target.dim(u(it)), ps[t].multiplicity);
    for (std::size_t s = 0; s < qs.size(); ++s)
      for (ArrId h : i.hom(it, qs[s].object))
        out.add_block(target.block_offset(s, u.map_arrow(h)), 0,
                      img.block(q.block_offset(s, h), col0, qs[s].multiplicity, ps[t].multiplicity));
    images.push_back(std::move(out));
  }
  return map_from_free(source, target, images);
}

Presheaf extend_by_zero(const DiagFunctor& u, const Presheaf& f) {
  const FinCat& j = u.target();
  std::vector<std::size_t> where(j.num_objects(), npos);
  for (ObjId x = 0; x < u.source().num_objects(); ++x) where[u(x)] = x;
  std::vector<std::size_t> dims;
  for (ObjId y = 0; y < j.num_objects(); ++y) dims.push_back(where[y] == npos ? 0 : f.dim(where[y]));
  std::vector<ArrId> preimage(j.num_arrows(), npos);
  for (ArrId a = 0; a < u.source().num_arrows(); ++a) preimage[u.map_arrow(a)] = a;
  std::vector<Matrix> actions;
  for (ArrId b = 0; b < j.num_arrows(); ++b) {
    const ObjId x = j.arrow(b).source, y = j.arrow(b).target;
    if (where[x] != npos && where[y] != npos) {
      if (preimage[b] == npos) throw InvalidInput("extension by zero needs a full inclusion");
      actions.push_back(f.action(preimage[b]));
    } else {
      actions.emplace_back(f.field(), dims[x], dims[y]);
    }
  }
  return Presheaf::from_all_actions(f.field(), j, std::move(dims), std::move(actions));
}

PresheafMap extend_by_zero(const DiagFunctor& u, const PresheafMap& phi, const Presheaf& source,
                           const Presheaf& target) {
  const FinCat& j = u.target();
  std::vector<std::size_t> where(j.num_objects(), npos);
  for (ObjId x = 0; x < u.source().num_objects(); ++x) where[u(x)] = x;
  std::vector<Matrix> c;
  for (ObjId y = 0; y < j.num_objects(); ++y)
    c.push_back(where[y] == npos ? Matrix(phi.source().field(), 0, 0) : phi.component(where[y]));
  return PresheafMap(source, target, std::move(c), false);
}

}  // namespace derivkit
