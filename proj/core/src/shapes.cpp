#include <algorithm>
#include <charconv>
#include <map>
#include <mutex>
#include <numeric>

#include "derivkit/diagram.hpp"
#include "derivkit/error.hpp"

namespace derivkit {

namespace {

struct Table {
  std::vector<std::string> objects;
  std::vector<Arrow> arrows;
  std::vector<ArrId> ids;
  std::vector<ArrId> comp;
};

Table table_of(const FinCat& c) {
  Table t;
  t.objects = c.objects();
  for (ArrId a = 0; a < c.num_arrows(); ++a) t.arrows.push_back(c.arrow(a));
  for (ObjId x = 0; x < c.num_objects(); ++x) t.ids.push_back(c.identity(x));
  const std::size_t na = c.num_arrows();
  t.comp.resize(na * na);
  for (ArrId g = 0; g < na; ++g)
    for (ArrId f = 0; f < na; ++f) t.comp[g * na + f] = c.compose_or_npos(g, f);
  return t;
}

FinCat from(std::string name, Table t) {
  return FinCat::from_table(std::move(name), std::move(t.objects), std::move(t.arrows),
                            std::move(t.ids), std::move(t.comp), false);
}

std::optional<std::size_t> parse_size(std::string_view s) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

FinCat point_category() {
  static const FinCat e = FinCat::from_table("e", {"*"}, {{0, 0, "id_*"}}, {0}, {0}, false);
  return e;
}

FinCat empty_category() {
  static const FinCat c = FinCat().renamed("empty");
  return c;
}

namespace {
FinCat build_delta(std::size_t n);
}

FinCat delta(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, FinCat> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  FinCat d = build_delta(n);
  cache.emplace(n, d);
  return d;
}

namespace {
FinCat build_delta(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i <= n; ++i) names.push_back(std::to_string(i));
  FinCat d = FinCat::poset("delta" + std::to_string(n), names,
                           [](ObjId x, ObjId y) { return x > y; });
  if (n != 1) return d;
  Table t = table_of(d);
  for (auto& a : t.arrows)
    if (a.source == 1 && a.target == 0) a.name = "a";
  return from("delta1", std::move(t));
}
}  // namespace

FinCat cube(std::size_t n) {
  if (n > 10) throw InvalidInput("cube dimension too large");
  std::vector<std::string> names;
  const std::size_t count = std::size_t{1} << n;
  for (std::size_t v = 0; v < count; ++v) {
    std::string s = "(";
    for (std::size_t k = 0; k < n; ++k) {
      s += ((v >> (n - 1 - k)) & 1) ? "1" : "0";
      if (k + 1 < n) s += ",";
    }
    names.push_back(s + ")");
  }
  if (n == 0) names = {"*"};
  return FinCat::poset("cube_" + std::to_string(n), names, [](ObjId x, ObjId y) {
    return x != y && (x & y) == y;  // componentwise x ≥ y
  });
}

namespace {

FinCat build_product(const FinCat& i, const FinCat& j);

// Products are rebuilt constantly (functor products, projections); caching
// them keeps shape comparisons at pointer equality.
FinCat cached_product(const FinCat& i, const FinCat& j) {
  static std::mutex mu;
  static std::map<std::pair<const void*, const void*>, std::pair<std::pair<FinCat, FinCat>, FinCat>> cache;
  const auto key = std::make_pair(i.identity_key(), j.identity_key());
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second.second;
  }
  FinCat p = build_product(i, j);
  std::lock_guard<std::mutex> lock(mu);
  if (cache.size() > 4096) cache.clear();
  auto [it, inserted] = cache.emplace(key, std::make_pair(std::make_pair(i, j), p));
  return it->second.second;
}

}  // namespace

FinCat product(const FinCat& i, const FinCat& j) { return cached_product(i, j); }

namespace {

FinCat build_product(const FinCat& i, const FinCat& j) {
  const std::size_t ni = i.num_objects(), nj = j.num_objects();
  const std::size_t ai = i.num_arrows(), aj = j.num_arrows();
  Table t;
  for (ObjId x = 0; x < ni; ++x)
    for (ObjId y = 0; y < nj; ++y)
      t.objects.push_back("(" + i.object_name(x) + "," + j.object_name(y) + ")");
  for (ArrId f = 0; f < ai; ++f)
    for (ArrId g = 0; g < aj; ++g) {
      const auto& af = i.arrow(f);
      const auto& ag = j.arrow(g);
      const bool id = i.is_identity(f) && j.is_identity(g);
      t.arrows.push_back({af.source * nj + ag.source, af.target * nj + ag.target,
                          id ? "id_" + t.objects[af.source * nj + ag.source]
                             : "(" + af.name + "," + ag.name + ")"});
    }
  for (ObjId x = 0; x < ni; ++x)
    for (ObjId y = 0; y < nj; ++y) t.ids.push_back(i.identity(x) * aj + j.identity(y));
  const std::size_t na = ai * aj;
  t.comp.assign(na * na, npos);
  for (ArrId g1 = 0; g1 < ai; ++g1)
    for (ArrId f1 = 0; f1 < ai; ++f1) {
      const ArrId c1 = i.compose_or_npos(g1, f1);
      if (c1 == npos) continue;
      for (ArrId g2 = 0; g2 < aj; ++g2)
        for (ArrId f2 = 0; f2 < aj; ++f2) {
          const ArrId c2 = j.compose_or_npos(g2, f2);
          if (c2 == npos) continue;
          t.comp[(g1 * aj + g2) * na + f1 * aj + f2] = c1 * aj + c2;
        }
    }
  return from(i.name() + "x" + j.name(), std::move(t));
}

}  // namespace

namespace {
FinCat build_opposite(const FinCat& i);
}

FinCat opposite(const FinCat& i) {
  // Cached in both directions so that opposite(opposite(I)) is I itself.
  static std::mutex mu;
  static std::map<const void*, std::pair<FinCat, FinCat>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(i.identity_key()); it != cache.end()) return it->second.second;
  }
  FinCat o = build_opposite(i);
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(i.identity_key()); it != cache.end()) return it->second.second;
  if (cache.size() > 4096) cache.clear();
  cache.emplace(i.identity_key(), std::make_pair(i, o));
  cache.emplace(o.identity_key(), std::make_pair(o, i));
  return o;
}

namespace {
FinCat build_opposite(const FinCat& i) {
  Table t = table_of(i);
  for (auto& a : t.arrows) std::swap(a.source, a.target);
  const std::size_t na = i.num_arrows();
  for (ArrId g = 0; g < na; ++g)
    for (ArrId f = 0; f < na; ++f) t.comp[g * na + f] = i.compose_or_npos(f, g);
  std::string name = i.name();
  if (name.size() > 4 && name.rfind("op(", 0) == 0 && name.back() == ')')
    name = name.substr(3, name.size() - 4);
  else
    name = "op(" + name + ")";
  return from(std::move(name), std::move(t));
}
}  // namespace

FinCat disjoint_union(const FinCat& i, const FinCat& j) {
  Table t;
  const std::size_t ni = i.num_objects();
  const std::size_t ai = i.num_arrows(), aj = j.num_arrows();
  bool clash = false;
  for (const auto& s : j.objects())
    if (i.find_object(s)) clash = true;
  for (ArrId a = 0; a < aj; ++a)
    if (i.find_arrow(j.arrow(a).name)) clash = true;
  for (const auto& s : i.objects()) t.objects.push_back(clash ? "L." + s : s);
  for (const auto& s : j.objects()) t.objects.push_back(clash ? "R." + s : s);
  for (ArrId a = 0; a < ai; ++a) {
    Arrow b = i.arrow(a);
    if (clash) b.name = "L." + b.name;
    t.arrows.push_back(b);
  }
  for (ArrId a = 0; a < aj; ++a) {
    Arrow b = j.arrow(a);
    b.source += ni;
    b.target += ni;
    if (clash) b.name = "R." + b.name;
    t.arrows.push_back(b);
  }
  for (ObjId x = 0; x < ni; ++x) t.ids.push_back(i.identity(x));
  for (ObjId x = 0; x < j.num_objects(); ++x) t.ids.push_back(ai + j.identity(x));
  const std::size_t na = ai + aj;
  t.comp.assign(na * na, npos);
  for (ArrId g = 0; g < ai; ++g)
    for (ArrId f = 0; f < ai; ++f) t.comp[g * na + f] = i.compose_or_npos(g, f);
  for (ArrId g = 0; g < aj; ++g)
    for (ArrId f = 0; f < aj; ++f) {
      const ArrId c = j.compose_or_npos(g, f);
      t.comp[(ai + g) * na + ai + f] = c == npos ? npos : ai + c;
    }
  return from(i.name() + "+" + j.name(), std::move(t));
}

FinCat full_subcategory(const FinCat& i, const std::vector<ObjId>& objects, std::string name) {
  std::vector<std::size_t> pos(i.num_objects(), npos);
  for (std::size_t k = 0; k < objects.size(); ++k) {
    if (objects[k] >= i.num_objects()) throw InvalidInput("subcategory object out of range");
    if (pos[objects[k]] != npos) throw InvalidInput("repeated object in subcategory");
    pos[objects[k]] = k;
  }
  Table t;
  for (ObjId x : objects) t.objects.push_back(i.object_name(x));
  std::vector<ArrId> new_id(i.num_arrows(), npos);
  std::vector<ArrId> old_id;
  for (ArrId a = 0; a < i.num_arrows(); ++a) {
    const auto& ar = i.arrow(a);
    if (pos[ar.source] == npos || pos[ar.target] == npos) continue;
    new_id[a] = t.arrows.size();
    old_id.push_back(a);
    t.arrows.push_back({pos[ar.source], pos[ar.target], ar.name});
  }
  for (ObjId x : objects) t.ids.push_back(new_id[i.identity(x)]);
  const std::size_t na = t.arrows.size();
  t.comp.assign(na * na, npos);
  for (ArrId g = 0; g < na; ++g)
    for (ArrId f = 0; f < na; ++f) {
      const ArrId c = i.compose_or_npos(old_id[g], old_id[f]);
      if (c != npos) t.comp[g * na + f] = new_id[c];
    }
  return from(name.empty() ? i.name() + "|sub" : std::move(name), std::move(t));
}

FinCat square() {
  static const FinCat c = product(delta(1), delta(1)).renamed("square");
  return c;
}

FinCat lefthalfcap() {
  static const FinCat c = full_subcategory(square(), {0, 1, 2}, "lefthalfcap");
  return c;
}

FinCat righthalfcup() {
  static const FinCat c = full_subcategory(square(), {1, 2, 3}, "righthalfcup");
  return c;
}

FinCat twosquare() {
  static const FinCat c = product(delta(1), delta(2)).renamed("twosquare");
  return c;
}

FinCat squarearrow() {
  static const FinCat c = full_subcategory(twosquare(), {0, 1, 2, 3, 4}, "squarearrow");
  return c;
}

std::optional<FinCat> named_shape(const std::string& name) {
  if (name == "e" || name == "point") return point_category();
  if (name == "empty") return empty_category();
  if (name == "square") return square();
  if (name == "lefthalfcap") return lefthalfcap();
  if (name == "righthalfcup") return righthalfcup();
  if (name == "squarearrow") return squarearrow();
  if (name == "twosquare") return twosquare();
  if (name.rfind("delta", 0) == 0) {
    std::string_view rest(name);
    rest.remove_prefix(5);
    if (!rest.empty() && rest.front() == '_') rest.remove_prefix(1);
    if (auto n = parse_size(rest)) return delta(*n);
  }
  if (name.rfind("cube_", 0) == 0)
    if (auto n = parse_size(std::string_view(name).substr(5))) return cube(*n);
  return std::nullopt;
}

// Named inclusions -------------------------------------------------------------

DiagFunctor inclusion_lefthalfcap() {
  return DiagFunctor::from_object_map(lefthalfcap(), square(), {0, 1, 2}, "i_cap");
}

DiagFunctor inclusion_righthalfcup() {
  return DiagFunctor::from_object_map(righthalfcup(), square(), {1, 2, 3}, "i_cup");
}

DiagFunctor inclusion_square_arrow() {
  // (r,c) of the square ↦ (r,c) of squarearrow = [(0,0),(0,1),(0,2),(1,0),(1,1)].
  return DiagFunctor::from_object_map(square(), squarearrow(), {0, 1, 3, 4}, "i_square");
}

DiagFunctor inclusion_squarearrow() {
  return DiagFunctor::from_object_map(squarearrow(), twosquare(), {0, 1, 2, 3, 4},
                                      "i_squarearrow");
}

DiagFunctor left_square() {
  return DiagFunctor::from_object_map(square(), twosquare(), {0, 1, 3, 4}, "l_square");
}

DiagFunctor right_square() {
  return DiagFunctor::from_object_map(square(), twosquare(), {1, 2, 4, 5}, "r_square");
}

DiagFunctor outer_square() {
  return DiagFunctor::from_object_map(square(), twosquare(), {0, 2, 3, 5}, "g_square");
}

DiagFunctor cap_into_squarearrow() {
  return DiagFunctor::from_object_map(lefthalfcap(), squarearrow(), {1, 2, 4}, "i_cap_sa");
}

}  // namespace derivkit
