#include "derivkit/diagram.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include "derivkit/error.hpp"

namespace derivkit {

FinCat::FinCat() : FinCat(finish(std::make_shared<Data>())) {}

std::shared_ptr<FinCat::Data> FinCat::finish(std::shared_ptr<Data> d) {
  const std::size_t n = d->objects.size();
  const std::size_t na = d->arrows.size();
  if (d->identities.size() != n) throw InvalidInput("identity table has wrong size");
  if (d->compose.size() != na * na) throw InvalidInput("composition table has wrong size");

  d->homs.assign(n * n, {});
  for (ArrId a = 0; a < na; ++a) {
    const auto& ar = d->arrows[a];
    if (ar.source >= n || ar.target >= n) throw InvalidInput("arrow endpoint out of range");
    d->homs[ar.source * n + ar.target].push_back(a);
  }
  d->thin = std::all_of(d->homs.begin(), d->homs.end(),
                        [](const auto& h) { return h.size() <= 1; });

  auto is_id = [&](ArrId a) { return d->identities[d->arrows[a].source] == a; };

  // Irreducibles and factorizations.
  std::vector<std::pair<ArrId, ArrId>> split(na, {npos, npos});
  for (ArrId g = 0; g < na; ++g) {
    if (is_id(g)) continue;
    for (ArrId f = 0; f < na; ++f) {
      if (is_id(f)) continue;
      const ArrId c = d->compose[g * na + f];
      if (c != npos && split[c].first == npos) split[c] = {g, f};
    }
  }
  d->irreducible.clear();
  for (ArrId a = 0; a < na; ++a)
    if (!is_id(a) && split[a].first == npos) d->irreducible.push_back(a);

  // Topological order: sinks first, smallest index among the ready objects.
  std::vector<std::size_t> out_degree(n, 0);
  std::vector<std::vector<ObjId>> preds(n);
  for (ObjId x = 0; x < n; ++x)
    for (ObjId y = 0; y < n; ++y) {
      if (x == y) continue;
      if (!d->homs[x * n + y].empty()) {
        ++out_degree[x];
        preds[y].push_back(x);
      }
    }
  for (ObjId x = 0; x < n; ++x)
    if (d->homs[x * n + x].size() != 1)
      throw InvalidInput("object '" + d->objects[x] + "' has non-identity endomorphisms");
  d->topo.clear();
  std::vector<bool> done(n, false);
  while (d->topo.size() < n) {
    ObjId next = npos;
    for (ObjId x = 0; x < n; ++x)
      if (!done[x] && out_degree[x] == 0) {
        next = x;
        break;
      }
    if (next == npos) throw InvalidInput("category '" + d->name + "' has an oriented cycle");
    done[next] = true;
    d->topo.push_back(next);
    for (ObjId x : preds[next]) --out_degree[x];
  }

  std::vector<std::size_t> chain(n, 0);
  d->max_chain = 0;
  for (ObjId x : d->topo) {
    for (ObjId y = 0; y < n; ++y)
      if (y != x && !d->homs[x * n + y].empty()) chain[x] = std::max(chain[x], chain[y] + 1);
    d->max_chain = std::max(d->max_chain, chain[x]);
  }

  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) { h = (h ^ v) * 1099511628211ull; };
  mix(n);
  mix(na);
  for (const auto& o : d->objects)
    for (char ch : o) mix(static_cast<unsigned char>(ch));
  for (const auto& ar : d->arrows) {
    mix(ar.source);
    mix(ar.target);
  }
  for (ArrId c : d->compose) mix(c);
  d->fingerprint = h;

  d->factorization.assign(na, {});
  std::vector<bool> known(na, false);
  std::function<void(ArrId)> factor = [&](ArrId a) {
    if (known[a]) return;
    if (!is_id(a)) {
      if (split[a].first == npos) {
        d->factorization[a] = {a};
      } else {
        const auto [g, f] = split[a];
        factor(f);
        factor(g);
        auto v = d->factorization[f];
        v.insert(v.end(), d->factorization[g].begin(), d->factorization[g].end());
        d->factorization[a] = std::move(v);
      }
    }
    known[a] = true;
  };
  for (ArrId a = 0; a < na; ++a) factor(a);
  return d;
}

FinCat FinCat::from_table(std::string name, std::vector<std::string> objects,
                          std::vector<Arrow> arrows, std::vector<ArrId> identities,
                          std::vector<ArrId> compose, bool check) {
  auto d = std::make_shared<Data>();
  d->name = std::move(name);
  d->objects = std::move(objects);
  d->arrows = std::move(arrows);
  d->identities = std::move(identities);
  d->compose = std::move(compose);
  FinCat c(finish(std::move(d)));
  if (check) c.validate();
  return c;
}

void FinCat::validate() const {
  const std::size_t n = num_objects(), na = num_arrows();
  {
    std::vector<std::string> names = d_->objects;
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end())
      throw InvalidInput("duplicate object names in '" + name() + "'");
  }
  for (ObjId x = 0; x < n; ++x) {
    const ArrId i = d_->identities[x];
    if (i >= na || d_->arrows[i].source != x || d_->arrows[i].target != x)
      throw InvalidInput("bad identity for object '" + d_->objects[x] + "'");
  }
  std::vector<std::vector<ArrId>> out(n);
  for (ArrId a = 0; a < na; ++a) out[d_->arrows[a].source].push_back(a);
  for (ArrId f = 0; f < na; ++f)
    for (ArrId g = 0; g < na; ++g) {
      const ArrId c = d_->compose[g * na + f];
      const bool composable = d_->arrows[f].target == d_->arrows[g].source;
      if (!composable) {
        if (c != npos) throw InvalidInput("composite recorded for non-composable arrows");
        continue;
      }
      if (c == npos || c >= na)
        throw InvalidInput("missing composite " + d_->arrows[g].name + "∘" + d_->arrows[f].name);
      if (d_->arrows[c].source != d_->arrows[f].source ||
          d_->arrows[c].target != d_->arrows[g].target)
        throw InvalidInput("composite has wrong endpoints");
    }
  for (ArrId a = 0; a < na; ++a) {
    const auto& ar = d_->arrows[a];
    if (compose(a, identity(ar.source)) != a || compose(identity(ar.target), a) != a)
      throw InvalidInput("identity law fails at arrow '" + ar.name + "'");
  }
  for (ArrId f = 0; f < na; ++f)
    for (ArrId g : out[d_->arrows[f].target])
      for (ArrId h : out[d_->arrows[g].target])
        if (compose(h, compose(g, f)) != compose(compose(h, g), f))
          throw InvalidInput("composition is not associative");
}

ArrId FinCat::compose(ArrId g, ArrId f) const {
  const ArrId c = compose_or_npos(g, f);
  if (c == npos)
    throw InvalidInput("arrows '" + arrow(g).name + "' and '" + arrow(f).name +
                       "' are not composable");
  return c;
}

std::optional<ObjId> FinCat::find_object(const std::string& name) const {
  for (ObjId x = 0; x < num_objects(); ++x)
    if (d_->objects[x] == name) return x;
  return std::nullopt;
}

ObjId FinCat::object(const std::string& name) const {
  if (auto x = find_object(name)) return *x;
  throw InvalidInput("unknown object '" + name + "' in '" + this->name() + "'");
}

std::optional<ArrId> FinCat::find_arrow(const std::string& name) const {
  for (ArrId a = 0; a < num_arrows(); ++a)
    if (d_->arrows[a].name == name) return a;
  return std::nullopt;
}

bool operator==(const FinCat& a, const FinCat& b) {
  if (a.d_ == b.d_) return true;
  if (a.d_->fingerprint != b.d_->fingerprint) return false;
  const auto& x = *a.d_;
  const auto& y = *b.d_;
  if (x.objects != y.objects || x.identities != y.identities || x.compose != y.compose ||
      x.arrows.size() != y.arrows.size())
    return false;
  for (std::size_t i = 0; i < x.arrows.size(); ++i)
    if (x.arrows[i].source != y.arrows[i].source || x.arrows[i].target != y.arrows[i].target)
      return false;
  return true;
}

std::string FinCat::summary() const {
  std::ostringstream os;
  const std::size_t nonid = num_arrows() - num_objects();
  os << num_objects() << (num_objects() == 1 ? " object, " : " objects, ") << nonid
     << (nonid == 1 ? " non-identity arrow" : " non-identity arrows") << ", acyclic";
  return os.str();
}

FinCat FinCat::renamed(std::string name) const {
  auto d = std::make_shared<Data>(*d_);
  d->name = std::move(name);
  return FinCat(std::shared_ptr<const Data>(std::move(d)));
}

// ---------------------------------------------------------------------------

FinCat FinCat::from_quiver(std::string name, const std::vector<std::string>& objects,
                           const std::vector<Generator>& generators,
                           const std::vector<Relation>& relations, bool commutative) {
  const std::size_t n = objects.size();
  std::map<std::string, ObjId> obj_index;
  for (ObjId x = 0; x < n; ++x)
    if (!obj_index.emplace(objects[x], x).second)
      throw InvalidInput("duplicate object '" + objects[x] + "'");
  struct Gen {
    ObjId s, t;
  };
  std::vector<Gen> gens;
  std::map<std::string, std::size_t> gen_index;
  for (const auto& g : generators) {
    auto s = obj_index.find(g.source), t = obj_index.find(g.target);
    if (s == obj_index.end() || t == obj_index.end())
      throw InvalidInput("arrow '" + g.name + "' has an unknown endpoint");
    if (s->second == t->second) throw InvalidInput("cycle detected: loop '" + g.name + "'");
    if (g.name.empty() || g.name.rfind("id_", 0) == 0)
      throw InvalidInput("invalid arrow name '" + g.name + "'");
    if (!gen_index.emplace(g.name, gens.size()).second)
      throw InvalidInput("duplicate arrow name '" + g.name + "'");
    gens.push_back({s->second, t->second});
  }

  // Enumerate all paths (application order); detect cycles by depth.
  struct P {
    ObjId s, t;
    std::vector<std::size_t> steps;
  };
  std::vector<P> paths;
  std::vector<std::vector<std::size_t>> out(n);
  for (std::size_t g = 0; g < gens.size(); ++g) out[gens[g].s].push_back(g);
  constexpr std::size_t kMaxPaths = 200000;
  std::function<void(ObjId, ObjId, std::vector<std::size_t>&)> walk =
      [&](ObjId start, ObjId at, std::vector<std::size_t>& steps) {
        if (steps.size() > n) throw InvalidInput("cycle detected in quiver '" + name + "'");
        paths.push_back({start, at, steps});
        if (paths.size() > kMaxPaths) throw InvalidInput("quiver has too many paths");
        for (std::size_t g : out[at]) {
          steps.push_back(g);
          walk(start, gens[g].t, steps);
          steps.pop_back();
        }
      };
  for (ObjId x = 0; x < n; ++x) {
    std::vector<std::size_t> steps;
    walk(x, x, steps);
  }
  std::sort(paths.begin(), paths.end(), [](const P& a, const P& b) {
    if (a.s != b.s) return a.s < b.s;
    if (a.t != b.t) return a.t < b.t;
    if (a.steps.size() != b.steps.size()) return a.steps.size() < b.steps.size();
    return a.steps < b.steps;
  });
  std::map<std::vector<std::size_t>, std::size_t> path_index;  // nonempty paths only
  std::vector<std::size_t> empty_index(n);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (paths[i].steps.empty())
      empty_index[paths[i].s] = i;
    else
      path_index[paths[i].steps] = i;
  }
  auto index_of = [&](ObjId s, const std::vector<std::size_t>& steps) {
    return steps.empty() ? empty_index[s] : path_index.at(steps);
  };

  std::vector<std::size_t> parent(paths.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto unite = [&](std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };

  if (commutative) {
    for (std::size_t i = 1; i < paths.size(); ++i)
      if (paths[i].s == paths[i - 1].s && paths[i].t == paths[i - 1].t) unite(i, i - 1);
  }
  for (const auto& rel : relations) {
    auto parse = [&](const Path& p) {
      if (p.empty()) throw InvalidInput("empty path in relation");
      std::vector<std::size_t> steps;
      for (auto it = p.rbegin(); it != p.rend(); ++it) {
        auto g = gen_index.find(*it);
        if (g == gen_index.end()) throw InvalidInput("relation uses unknown arrow '" + *it + "'");
        if (!steps.empty() && gens[steps.back()].t != gens[g->second].s)
          throw InvalidInput("relation path is not composable");
        steps.push_back(g->second);
      }
      return steps;
    };
    const auto l = parse(rel.lhs), r = parse(rel.rhs);
    const ObjId s = gens[l.front()].s, t = gens[l.back()].t;
    if (gens[r.front()].s != s || gens[r.back()].t != t)
      throw InvalidInput("relation between non-parallel paths");
    for (const auto& pre : paths) {
      if (pre.t != s) continue;
      for (const auto& post : paths) {
        if (post.s != t) continue;
        auto a = pre.steps, b = pre.steps;
        a.insert(a.end(), l.begin(), l.end());
        b.insert(b.end(), r.begin(), r.end());
        a.insert(a.end(), post.steps.begin(), post.steps.end());
        b.insert(b.end(), post.steps.begin(), post.steps.end());
        unite(index_of(pre.s, a), index_of(pre.s, b));
      }
    }
  }

  // Classes become arrows, ordered by their least representative.
  std::vector<std::size_t> class_arrow(paths.size(), npos);
  std::vector<Arrow> arrows;
  std::vector<std::size_t> rep;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const std::size_t root = find(i);
    if (class_arrow[root] != npos) continue;
    class_arrow[root] = arrows.size();
    rep.push_back(root);
    std::string nm;
    if (paths[root].steps.empty()) {
      nm = "id_" + objects[paths[root].s];
    } else {
      for (auto it = paths[root].steps.rbegin(); it != paths[root].steps.rend(); ++it)
        nm += (nm.empty() ? "" : ".") + generators[*it].name;
    }
    arrows.push_back({paths[root].s, paths[root].t, nm});
  }
  for (std::size_t i = 0; i < paths.size(); ++i)
    if (!paths[i].steps.empty() && find(i) == find(empty_index[paths[i].s]))
      throw InvalidInput("relations identify a non-identity path with an identity");
  std::vector<ArrId> ids(n);
  for (ObjId x = 0; x < n; ++x) ids[x] = class_arrow[find(empty_index[x])];
  const std::size_t na = arrows.size();
  std::vector<ArrId> comp(na * na, npos);
  for (ArrId f = 0; f < na; ++f)
    for (ArrId g = 0; g < na; ++g) {
      if (arrows[f].target != arrows[g].source) continue;
      auto steps = paths[rep[f]].steps;
      steps.insert(steps.end(), paths[rep[g]].steps.begin(), paths[rep[g]].steps.end());
      comp[g * na + f] = class_arrow[find(index_of(arrows[f].source, steps))];
    }
  return from_table(std::move(name), objects, std::move(arrows), std::move(ids),
                    std::move(comp), true);
}

// Functors --------------------------------------------------------------------

DiagFunctor::DiagFunctor(FinCat source, FinCat target, std::vector<ObjId> object_map,
                         std::vector<ArrId> arrow_map, std::string name)
    : source_(std::move(source)),
      target_(std::move(target)),
      objects_(std::move(object_map)),
      arrows_(std::move(arrow_map)),
      name_(std::move(name)) {
  if (objects_.size() != source_.num_objects() || arrows_.size() != source_.num_arrows())
    throw InvalidInput("functor map sizes do not match the source category");
  for (ObjId x : objects_)
    if (x >= target_.num_objects()) throw InvalidInput("functor object image out of range");
  for (ArrId a = 0; a < arrows_.size(); ++a) {
    const ArrId b = arrows_[a];
    if (b >= target_.num_arrows()) throw InvalidInput("functor arrow image out of range");
    const auto& ar = source_.arrow(a);
    const auto& br = target_.arrow(b);
    if (br.source != objects_[ar.source] || br.target != objects_[ar.target])
      throw InvalidInput("functor does not respect endpoints of '" + ar.name + "'");
  }
  for (ObjId x = 0; x < source_.num_objects(); ++x)
    if (arrows_[source_.identity(x)] != target_.identity(objects_[x]))
      throw InvalidInput("functor does not preserve identities");
  const std::size_t na = source_.num_arrows();
  for (ArrId g = 0; g < na; ++g)
    for (ArrId f = 0; f < na; ++f) {
      const ArrId c = source_.compose_or_npos(g, f);
      if (c == npos) continue;
      if (arrows_[c] != target_.compose(arrows_[g], arrows_[f]))
        throw InvalidInput("functor does not preserve composition");
    }
}

DiagFunctor DiagFunctor::from_object_map(FinCat source, FinCat target,
                                         std::vector<ObjId> object_map, std::string name) {
  if (object_map.size() != source.num_objects())
    throw InvalidInput("object map size does not match the source category");
  std::vector<ArrId> arrows(source.num_arrows());
  for (ArrId a = 0; a < source.num_arrows(); ++a) {
    const auto& ar = source.arrow(a);
    if (source.is_identity(a)) {
      arrows[a] = target.identity(object_map.at(ar.source));
      continue;
    }
    const auto& h = target.hom(object_map.at(ar.source), object_map.at(ar.target));
    if (h.size() != 1)
      throw InvalidInput("object map does not determine the image of arrow '" + ar.name + "'");
    arrows[a] = h.front();
  }
  return DiagFunctor(std::move(source), std::move(target), std::move(object_map),
                     std::move(arrows), std::move(name));
}

bool DiagFunctor::is_injective_on_objects() const {
  std::vector<ObjId> v = objects_;
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) == v.end();
}

bool DiagFunctor::is_fully_faithful() const {
  for (ObjId x = 0; x < source_.num_objects(); ++x)
    for (ObjId y = 0; y < source_.num_objects(); ++y) {
      const auto& h = source_.hom(x, y);
      const auto& k = target_.hom(objects_[x], objects_[y]);
      if (h.size() != k.size()) return false;
      std::vector<ArrId> img;
      for (ArrId a : h) img.push_back(arrows_[a]);
      std::sort(img.begin(), img.end());
      if (std::adjacent_find(img.begin(), img.end()) != img.end()) return false;
    }
  return true;
}

DiagFunctor identity_functor(const FinCat& i) {
  std::vector<ObjId> o(i.num_objects());
  std::iota(o.begin(), o.end(), 0);
  std::vector<ArrId> a(i.num_arrows());
  std::iota(a.begin(), a.end(), 0);
  return DiagFunctor(i, i, std::move(o), std::move(a), "id");
}

DiagFunctor terminal_functor(const FinCat& i) {
  const FinCat e = point_category();
  return DiagFunctor(i, e, std::vector<ObjId>(i.num_objects(), 0),
                     std::vector<ArrId>(i.num_arrows(), e.identity(0)), "p");
}

DiagFunctor constant_functor(const FinCat& i, const FinCat& j, ObjId y) {
  return DiagFunctor(i, j, std::vector<ObjId>(i.num_objects(), y),
                     std::vector<ArrId>(i.num_arrows(), j.identity(y)), "const");
}

DiagFunctor point_inclusion(const FinCat& i, ObjId x) {
  return DiagFunctor(point_category(), i, {x}, {i.identity(x)}, "i_" + i.object_name(x));
}

DiagFunctor compose(const DiagFunctor& v, const DiagFunctor& u) {
  if (!(u.target() == v.source())) throw InvalidInput("functors are not composable");
  std::vector<ObjId> o(u.source().num_objects());
  for (ObjId x = 0; x < o.size(); ++x) o[x] = v(u(x));
  std::vector<ArrId> a(u.source().num_arrows());
  for (ArrId f = 0; f < a.size(); ++f) a[f] = v.map_arrow(u.map_arrow(f));
  return DiagFunctor(u.source(), v.target(), std::move(o), std::move(a),
                     v.name().empty() || u.name().empty() ? "" : v.name() + "." + u.name());
}

DiagFunctor opposite(const DiagFunctor& u) {
  return DiagFunctor(opposite(u.source()), opposite(u.target()), u.object_map(), u.arrow_map(),
                     u.name().empty() ? "" : u.name() + "^op");
}

DiagFunctor full_inclusion(const FinCat& i, const std::vector<ObjId>& objects, std::string name) {
  const FinCat sub = full_subcategory(i, objects);
  // Arrows of the full subcategory are the arrows of i between chosen
  // objects, in i's order.
  std::vector<ArrId> arrows;
  std::vector<bool> chosen(i.num_objects(), false);
  for (ObjId x : objects) chosen[x] = true;
  for (ArrId a = 0; a < i.num_arrows(); ++a)
    if (chosen[i.arrow(a).source] && chosen[i.arrow(a).target]) arrows.push_back(a);
  return DiagFunctor(sub, i, objects, std::move(arrows), std::move(name));
}

DiagFunctor product(const DiagFunctor& u, const DiagFunctor& v) {
  const FinCat s = product(u.source(), v.source());
  const FinCat t = product(u.target(), v.target());
  const std::size_t nj = v.source().num_objects(), nt = v.target().num_objects();
  const std::size_t aj = v.source().num_arrows(), at = v.target().num_arrows();
  std::vector<ObjId> o(s.num_objects());
  for (ObjId x = 0; x < u.source().num_objects(); ++x)
    for (ObjId y = 0; y < nj; ++y) o[x * nj + y] = u(x) * nt + v(y);
  std::vector<ArrId> a(s.num_arrows());
  for (ArrId f = 0; f < u.source().num_arrows(); ++f)
    for (ArrId g = 0; g < aj; ++g) a[f * aj + g] = u.map_arrow(f) * at + v.map_arrow(g);
  return DiagFunctor(s, t, std::move(o), std::move(a));
}

DiagFunctor projection_left(const FinCat& i, const FinCat& j) {
  const FinCat s = product(i, j);
  std::vector<ObjId> o(s.num_objects());
  std::vector<ArrId> a(s.num_arrows());
  for (ObjId x = 0; x < o.size(); ++x) o[x] = x / j.num_objects();
  for (ArrId f = 0; f < a.size(); ++f) a[f] = f / j.num_arrows();
  return DiagFunctor(s, i, std::move(o), std::move(a), "pr1");
}

DiagFunctor projection_right(const FinCat& i, const FinCat& j) {
  const FinCat s = product(i, j);
  std::vector<ObjId> o(s.num_objects());
  std::vector<ArrId> a(s.num_arrows());
  for (ObjId x = 0; x < o.size(); ++x) o[x] = x % j.num_objects();
  for (ArrId f = 0; f < a.size(); ++f) a[f] = f % j.num_arrows();
  return DiagFunctor(s, j, std::move(o), std::move(a), "pr2");
}

DiagFunctor slice_inclusion(const FinCat& i, const FinCat& j, ObjId x) {
  const FinCat t = product(i, j);
  std::vector<ObjId> o(j.num_objects());
  std::vector<ArrId> a(j.num_arrows());
  for (ObjId y = 0; y < o.size(); ++y) o[y] = x * j.num_objects() + y;
  for (ArrId g = 0; g < a.size(); ++g) a[g] = i.identity(x) * j.num_arrows() + g;
  return DiagFunctor(j, t, std::move(o), std::move(a), "x_" + i.object_name(x));
}

bool is_open_immersion(const DiagFunctor& u) {
  if (!u.is_injective_on_objects() || !u.is_fully_faithful()) return false;
  const FinCat& t = u.target();
  std::vector<bool> in_image(t.num_objects(), false);
  for (ObjId x : u.object_map()) in_image[x] = true;
  for (ArrId a = 0; a < t.num_arrows(); ++a)
    if (in_image[t.arrow(a).target] && !in_image[t.arrow(a).source]) return false;
  return true;
}

bool is_closed_immersion(const DiagFunctor& u) {
  if (!u.is_injective_on_objects() || !u.is_fully_faithful()) return false;
  const FinCat& t = u.target();
  std::vector<bool> in_image(t.num_objects(), false);
  for (ObjId x : u.object_map()) in_image[x] = true;
  for (ArrId a = 0; a < t.num_arrows(); ++a)
    if (in_image[t.arrow(a).source] && !in_image[t.arrow(a).target]) return false;
  return true;
}

// Natural transformations -----------------------------------------------------

NatTrans::NatTrans(DiagFunctor source, DiagFunctor target, std::vector<ArrId> components)
    : source_(std::move(source)), target_(std::move(target)), components_(std::move(components)) {
  if (!(source_.source() == target_.source()) || !(source_.target() == target_.target()))
    throw InvalidInput("natural transformation between functors with different endpoints");
  const FinCat& i = source_.source();
  const FinCat& j = source_.target();
  if (components_.size() != i.num_objects())
    throw InvalidInput("natural transformation has the wrong number of components");
  for (ObjId x = 0; x < i.num_objects(); ++x) {
    const auto& c = j.arrow(components_[x]);
    if (c.source != source_(x) || c.target != target_(x))
      throw InvalidInput("component at '" + i.object_name(x) + "' has wrong endpoints");
  }
  for (ArrId f = 0; f < i.num_arrows(); ++f) {
    const ObjId x = i.arrow(f).source, y = i.arrow(f).target;
    if (j.compose(target_.map_arrow(f), components_[x]) !=
        j.compose(components_[y], source_.map_arrow(f)))
      throw InvalidInput("naturality fails at arrow '" + i.arrow(f).name + "'");
  }
}

NatTrans identity_transformation(const DiagFunctor& u) {
  std::vector<ArrId> c(u.source().num_objects());
  for (ObjId x = 0; x < c.size(); ++x) c[x] = u.target().identity(u(x));
  return NatTrans(u, u, std::move(c));
}

NatTrans vertical_compose(const NatTrans& beta, const NatTrans& alpha) {
  if (!(alpha.target() == beta.source()))
    throw InvalidInput("natural transformations are not composable");
  std::vector<ArrId> c(alpha.components().size());
  for (ObjId x = 0; x < c.size(); ++x)
    c[x] = alpha.source().target().compose(beta.component(x), alpha.component(x));
  return NatTrans(alpha.source(), beta.target(), std::move(c));
}

NatTrans whisker_left(const DiagFunctor& w, const NatTrans& alpha) {
  std::vector<ArrId> c(alpha.components().size());
  for (ObjId x = 0; x < c.size(); ++x) c[x] = w.map_arrow(alpha.component(x));
  return NatTrans(compose(w, alpha.source()), compose(w, alpha.target()), std::move(c));
}

NatTrans whisker_right(const NatTrans& alpha, const DiagFunctor& w) {
  std::vector<ArrId> c(w.source().num_objects());
  for (ObjId x = 0; x < c.size(); ++x) c[x] = alpha.component(w(x));
  return NatTrans(compose(alpha.source(), w), compose(alpha.target(), w), std::move(c));
}

namespace {

// Shared construction of I/y and y\I. `over` selects the direction.
CommaCategory make_comma(const DiagFunctor& u, ObjId y, bool over) {
  const FinCat& i = u.source();
  const FinCat& j = u.target();
  if (y >= j.num_objects()) throw InvalidInput("unknown object in comma category");
  std::vector<std::pair<ObjId, ArrId>> entries;
  std::vector<std::string> names;
  for (ObjId a = 0; a < i.num_objects(); ++a) {
    const auto& h = over ? j.hom(u(a), y) : j.hom(y, u(a));
    for (ArrId f : h) {
      entries.emplace_back(a, f);
      names.push_back("(" + i.object_name(a) + "," + j.arrow(f).name + ")");
    }
  }
  const std::size_t ne = entries.size();
  std::vector<Arrow> arrows;
  std::vector<ArrId> base;  // underlying arrow of I
  std::vector<std::vector<std::pair<ArrId, ArrId>>> by_pair(ne * ne);  // (g, arrow id)
  std::vector<ArrId> ids(ne);
  for (std::size_t e = 0; e < ne; ++e)
    for (std::size_t e2 = 0; e2 < ne; ++e2) {
      const auto [a, f] = entries[e];
      const auto [a2, f2] = entries[e2];
      for (ArrId g : i.hom(a, a2)) {
        const bool ok = over ? j.compose(f2, u.map_arrow(g)) == f
                             : j.compose(u.map_arrow(g), f) == f2;
        if (!ok) continue;
        if (e == e2 && i.is_identity(g)) ids[e] = arrows.size();
        by_pair[e * ne + e2].emplace_back(g, arrows.size());
        arrows.push_back({e, e2, i.is_identity(g) ? "id_" + names[e] : i.arrow(g).name});
        base.push_back(g);
      }
    }
  const std::size_t na = arrows.size();
  std::vector<ArrId> comp(na * na, npos);
  for (ArrId p = 0; p < na; ++p)
    for (ArrId q = 0; q < na; ++q) {
      if (arrows[p].target != arrows[q].source) continue;
      const ArrId g = i.compose(base[q], base[p]);
      for (const auto& [h, id] : by_pair[arrows[p].source * ne + arrows[q].target])
        if (h == g) comp[q * na + p] = id;
    }
  std::string nm = over ? u.source().name() + "/" + j.object_name(y)
                        : j.object_name(y) + "\\" + u.source().name();
  FinCat c = FinCat::from_table(nm, names, std::move(arrows), std::move(ids), std::move(comp),
                                false);
  std::vector<ObjId> fo(ne);
  for (std::size_t e = 0; e < ne; ++e) fo[e] = entries[e].first;
  DiagFunctor forget(c, i, std::move(fo), base, "j");
  DiagFunctor uj = compose(u, forget);
  DiagFunctor cst = constant_functor(c, j, y);
  std::vector<ArrId> comps(ne);
  for (std::size_t e = 0; e < ne; ++e) comps[e] = entries[e].second;
  NatTrans cell = over ? NatTrans(uj, cst, std::move(comps)) : NatTrans(cst, uj, std::move(comps));
  return {std::move(c), std::move(forget), std::move(cell), std::move(entries)};
}

}  // namespace

CommaCategory comma_over(const DiagFunctor& u, ObjId y) { return make_comma(u, y, true); }
CommaCategory comma_under(const DiagFunctor& u, ObjId y) { return make_comma(u, y, false); }

}  // namespace derivkit
