#include "derivkit/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "derivkit/error.hpp"

namespace derivkit {

namespace {

using json = nlohmann::ordered_json;

// Where we are inside a document, for error messages.
struct Ctx {
  const std::string& origin;
  std::string ptr;
  Ctx at(const std::string& key) const { return {origin, ptr + "/" + key}; }
  Ctx at(std::size_t i) const { return at(std::to_string(i)); }
  [[noreturn]] void fail(const std::string& msg) const {
    throw InvalidInput(origin + ": " + (ptr.empty() ? "/" : ptr) + ": " + msg);
  }
};

const json& member(const json& j, const char* key, const Ctx& c) {
  if (!j.is_object()) c.fail("expected an object");
  auto it = j.find(key);
  if (it == j.end()) c.fail(std::string("missing \"") + key + "\"");
  return *it;
}

std::string str(const json& j, const Ctx& c) {
  if (!j.is_string()) c.fail("expected a string");
  return j.get<std::string>();
}

std::size_t count(const json& j, const Ctx& c) {
  if (!j.is_number_integer() || j.get<long long>() < 0) c.fail("expected a non-negative integer");
  return j.get<std::size_t>();
}

const json& array(const json& j, const Ctx& c) {
  if (!j.is_array()) c.fail("expected an array");
  return j;
}

// Re-throws library validation errors with document context.
template <class F>
auto guarded(const Ctx& c, F f) -> decltype(f()) {
  try {
    return f();
  } catch (const InvalidInput& e) {
    c.fail(e.what());
  } catch (const PreconditionFailed& e) {
    c.fail(e.what());
  }
}

ObjId object_named(const FinCat& cat, const json& j, const Ctx& c) {
  auto x = cat.find_object(str(j, c));
  if (!x) c.fail("unknown object \"" + j.get<std::string>() + "\"");
  return *x;
}

ArrId arrow_named(const FinCat& cat, const json& j, const Ctx& c) {
  auto a = cat.find_arrow(str(j, c));
  if (!a) c.fail("unknown arrow \"" + j.get<std::string>() + "\"");
  return *a;
}

// Diagrams ---------------------------------------------------------------------------

FinCat read_diagram(const json& j, const Ctx& c) {
  if (j.is_string()) {
    auto s = named_shape(j.get<std::string>());
    if (!s) c.fail("unknown shape \"" + j.get<std::string>() + "\"");
    return *s;
  }
  if (!j.is_object()) c.fail("expected a diagram");
  if (j.contains("shape")) return read_diagram(j["shape"], c.at("shape"));
  if (j.contains("product")) {
    const json& p = array(j["product"], c.at("product"));
    if (p.size() != 2) c.at("product").fail("expected two factors");
    return product(read_diagram(p[0], c.at("product").at(0)), read_diagram(p[1], c.at("product").at(1)));
  }
  const std::string name = j.contains("name") ? str(j["name"], c.at("name")) : std::string("diagram");
  std::vector<std::string> objects;
  const json& objs = array(member(j, "objects", c), c.at("objects"));
  for (std::size_t i = 0; i < objs.size(); ++i) objects.push_back(str(objs[i], c.at("objects").at(i)));

  if (j.contains("arrows")) {
    const Ctx ca = c.at("arrows");
    const json& arr = array(j["arrows"], ca);
    auto index_of = [&](const json& v, const Ctx& cc) {
      const std::string s = str(v, cc);
      auto it = std::find(objects.begin(), objects.end(), s);
      if (it == objects.end()) cc.fail("unknown object \"" + s + "\"");
      return static_cast<ObjId>(it - objects.begin());
    };
    std::vector<Arrow> arrows;
    std::vector<ArrId> ids(objects.size(), npos);
    for (std::size_t a = 0; a < arr.size(); ++a) {
      const Ctx ci = ca.at(a);
      Arrow ar{index_of(member(arr[a], "source", ci), ci.at("source")),
               index_of(member(arr[a], "target", ci), ci.at("target")), str(member(arr[a], "name", ci), ci.at("name"))};
      if (ar.source == ar.target) {
        if (ids[ar.source] != npos) ci.fail("second endomorphism of \"" + objects[ar.source] + "\"");
        ids[ar.source] = a;
      }
      arrows.push_back(std::move(ar));
    }
    for (ObjId x = 0; x < objects.size(); ++x)
      if (ids[x] == npos) ca.fail("no identity arrow for \"" + objects[x] + "\"");
    const std::size_t n = arrows.size();
    std::vector<ArrId> comp(n * n, npos);
    for (ArrId f = 0; f < n; ++f) {
      comp[ids[arrows[f].target] * n + f] = f;
      comp[f * n + ids[arrows[f].source]] = f;
    }
    auto arrow_index = [&](const json& v, const Ctx& cc) {
      const std::string s = str(v, cc);
      for (ArrId a = 0; a < n; ++a)
        if (arrows[a].name == s) return a;
      cc.fail("unknown arrow \"" + s + "\"");
    };
    if (j.contains("composition")) {
      const Ctx cc = c.at("composition");
      const json& tbl = array(j["composition"], cc);
      for (std::size_t t = 0; t < tbl.size(); ++t) {
        const json& row = array(tbl[t], cc.at(t));
        if (row.size() != 3) cc.at(t).fail("expected [g, f, g∘f]");
        const ArrId g = arrow_index(row[0], cc.at(t).at(0)), f = arrow_index(row[1], cc.at(t).at(1));
        comp[g * n + f] = arrow_index(row[2], cc.at(t).at(2));
      }
    }
    return guarded(c, [&] { return FinCat::from_table(name, objects, arrows, ids, comp, true); });
  }

  std::vector<FinCat::Generator> gens;
  if (j.contains("generators")) {
    const Ctx cg = c.at("generators");
    const json& g = array(j["generators"], cg);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Ctx ci = cg.at(i);
      gens.push_back({str(member(g[i], "name", ci), ci.at("name")), str(member(g[i], "source", ci), ci.at("source")),
                      str(member(g[i], "target", ci), ci.at("target"))});
    }
  }
  std::vector<FinCat::Relation> rels;
  if (j.contains("relations")) {
    const Ctx cr = c.at("relations");
    const json& r = array(j["relations"], cr);
    auto path = [&](const json& v, const Ctx& cc) {
      FinCat::Path p;
      const json& a = array(v, cc);
      for (std::size_t i = 0; i < a.size(); ++i) p.push_back(str(a[i], cc.at(i)));
      return p;
    };
    for (std::size_t i = 0; i < r.size(); ++i) {
      const Ctx ci = cr.at(i);
      rels.push_back({path(member(r[i], "lhs", ci), ci.at("lhs")), path(member(r[i], "rhs", ci), ci.at("rhs"))});
    }
  }
  const bool commutative = j.contains("commutative") && j["commutative"].is_boolean() && j["commutative"].get<bool>();
  return guarded(c, [&] { return FinCat::from_quiver(name, objects, gens, rels, commutative); });
}

json write_diagram(const FinCat& cat) {
  if (auto s = named_shape(cat.name()); s && *s == cat) return json{{"shape", cat.name()}};
  json objs = json::array(), arrows = json::array(), comp = json::array();
  for (const auto& o : cat.objects()) objs.push_back(o);
  for (ArrId a = 0; a < cat.num_arrows(); ++a) {
    const Arrow& ar = cat.arrow(a);
    arrows.push_back({{"name", ar.name}, {"source", cat.object_name(ar.source)}, {"target", cat.object_name(ar.target)}});
  }
  for (ArrId g = 0; g < cat.num_arrows(); ++g)
    for (ArrId f = 0; f < cat.num_arrows(); ++f) {
      if (cat.is_identity(g) || cat.is_identity(f)) continue;
      const ArrId gf = cat.compose_or_npos(g, f);
      if (gf != npos) comp.push_back({cat.arrow(g).name, cat.arrow(f).name, cat.arrow(gf).name});
    }
  return json{{"name", cat.name()}, {"objects", objs}, {"arrows", arrows}, {"composition", comp}};
}

// Functors ---------------------------------------------------------------------------

DiagFunctor read_functor(const json& j, const Ctx& c) {
  if (j.contains("builtin")) {
    const std::string b = str(j["builtin"], c.at("builtin"));
    auto shape = [&](const char* key) { return read_diagram(member(j, key, c), c.at(key)); };
    return guarded(c, [&]() -> DiagFunctor {
      if (b == "identity") return identity_functor(shape("source"));
      if (b == "terminal") return terminal_functor(shape("source"));
      if (b == "point_inclusion") {
        const FinCat t = shape("target");
        return point_inclusion(t, object_named(t, member(j, "object", c), c.at("object")));
      }
      if (b == "full_inclusion") {
        const FinCat t = shape("target");
        std::vector<ObjId> keep;
        const json& o = array(member(j, "objects", c), c.at("objects"));
        for (std::size_t i = 0; i < o.size(); ++i) keep.push_back(object_named(t, o[i], c.at("objects").at(i)));
        return full_inclusion(t, keep);
      }
      if (b == "projection_left") return projection_left(shape("left"), shape("right"));
      if (b == "projection_right") return projection_right(shape("left"), shape("right"));
      c.at("builtin").fail("unknown builtin functor \"" + b + "\"");
    });
  }
  const FinCat s = read_diagram(member(j, "source", c), c.at("source"));
  const FinCat t = read_diagram(member(j, "target", c), c.at("target"));
  const Ctx co = c.at("objects");
  const json& objs = array(member(j, "objects", c), co);
  if (objs.size() != s.num_objects()) co.fail("expected one target object per source object");
  std::vector<ObjId> om;
  for (std::size_t i = 0; i < objs.size(); ++i) om.push_back(object_named(t, objs[i], co.at(i)));
  const std::string name = j.contains("name") ? str(j["name"], c.at("name")) : std::string();
  if (!j.contains("arrows")) return guarded(c, [&] { return DiagFunctor::from_object_map(s, t, om, name); });
  const Ctx ca = c.at("arrows");
  const json& arr = array(j["arrows"], ca);
  if (arr.size() != s.num_arrows()) ca.fail("expected one target arrow per source arrow");
  std::vector<ArrId> am;
  for (std::size_t i = 0; i < arr.size(); ++i) am.push_back(arrow_named(t, arr[i], ca.at(i)));
  return guarded(c, [&] { return DiagFunctor(s, t, om, am, name); });
}

json write_functor(const DiagFunctor& u) {
  json objs = json::array(), arrows = json::array();
  for (ObjId x = 0; x < u.source().num_objects(); ++x) objs.push_back(u.target().object_name(u(x)));
  for (ArrId a = 0; a < u.source().num_arrows(); ++a) arrows.push_back(u.target().arrow(u.map_arrow(a)).name);
  json j{{"kind", "functor"}};
  if (!u.name().empty()) j["name"] = u.name();
  j["source"] = write_diagram(u.source());
  j["target"] = write_diagram(u.target());
  j["objects"] = objs;
  j["arrows"] = arrows;
  return j;
}

// Matrices and presheaves ------------------------------------------------------------

Matrix read_matrix(const json& j, const Field& k, std::size_t rows, std::size_t cols, const Ctx& c) {
  array(j, c);
  Matrix m(k, rows, cols);
  if (rows == 0) {
    if (!j.empty() && !(j.size() == 1 && j[0].is_array() && j[0].empty() && cols == 0))
      c.fail("expected an empty matrix");
    return m;
  }
  if (j.size() != rows) c.fail("expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = array(j[r], c.at(r));
    if (row.size() != cols)
      c.at(r).fail("expected " + std::to_string(cols) + " entries, got " + std::to_string(row.size()));
    for (std::size_t q = 0; q < cols; ++q) {
      const json& v = row[q];
      if (v.is_number_integer()) {
        m.set(r, q, k.reduce(mpq_class(v.get<long>())));
      } else if (v.is_string()) {
        try {
          m.set(r, q, k.parse_scalar(v.get<std::string>()));
        } catch (const std::exception& e) {
          c.at(r).at(q).fail(std::string("bad scalar: ") + e.what());
        }
      } else {
        c.at(r).at(q).fail("expected a scalar string");
      }
    }
  }
  return m;
}

json write_matrix(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t q = 0; q < m.cols(); ++q) row.push_back(m.entry_string(r, q));
    rows.push_back(std::move(row));
  }
  return rows;
}

Presheaf read_presheaf_body(const json& j, const Field& k, const FinCat& shape, const Ctx& c) {
  const Ctx cd = c.at("dims");
  const json& dj = member(j, "dims", c);
  std::vector<std::size_t> dims(shape.num_objects(), 0);
  if (dj.is_array()) {
    if (dj.size() != shape.num_objects()) cd.fail("expected one dimension per object");
    for (std::size_t i = 0; i < dj.size(); ++i) dims[i] = count(dj[i], cd.at(i));
  } else if (dj.is_object()) {
    for (auto it = dj.begin(); it != dj.end(); ++it) dims[object_named(shape, it.key(), cd)] = count(it.value(), cd.at(it.key()));
  } else {
    cd.fail("expected an array or an object");
  }
  const Ctx ca = c.at("actions");
  std::vector<std::optional<Matrix>> given(shape.num_arrows());
  if (j.contains("actions")) {
    if (!j["actions"].is_object()) ca.fail("expected an object keyed by arrow name");
    for (auto it = j["actions"].begin(); it != j["actions"].end(); ++it) {
      const ArrId a = arrow_named(shape, it.key(), ca);
      const Arrow& ar = shape.arrow(a);
      given[a] = read_matrix(it.value(), k, dims[ar.source], dims[ar.target], ca.at(it.key()));
    }
  }
  std::vector<Matrix> irr;
  for (ArrId a : shape.irreducible_arrows()) {
    const Arrow& ar = shape.arrow(a);
    if (given[a]) {
      irr.push_back(*given[a]);
    } else if (dims[ar.source] == 0 || dims[ar.target] == 0) {
      irr.emplace_back(k, dims[ar.source], dims[ar.target]);
    } else {
      ca.fail("missing action of arrow \"" + ar.name + "\"");
    }
  }
  Presheaf f = guarded(c, [&] { return Presheaf::from_generators(k, shape, dims, irr, true); });
  for (ArrId a = 0; a < shape.num_arrows(); ++a)
    if (given[a] && !(*given[a] == f.action(a)))
      ca.at(shape.arrow(a).name).fail("action is not the composite of the generating actions");
  if (j.contains("free")) {
    const Ctx cf = c.at("free");
    const json& fr = array(j["free"], cf);
    std::vector<FreeSummand> s;
    for (std::size_t t = 0; t < fr.size(); ++t)
      s.push_back({object_named(shape, member(fr[t], "object", cf.at(t)), cf.at(t).at("object")),
                   count(member(fr[t], "multiplicity", cf.at(t)), cf.at(t).at("multiplicity"))});
    Presheaf p = free_sum(k, shape, s);
    if (!(p == f)) cf.fail("data does not match the standard free layout of these summands");
    return p;
  }
  return f;
}

json write_presheaf_body(const Presheaf& f) {
  json j{{"dims", f.dims()}};
  json acts = json::object();
  const FinCat& s = f.shape();
  for (ArrId a : s.irreducible_arrows())
    if (!f.action(a).empty()) acts[s.arrow(a).name] = write_matrix(f.action(a));
  j["actions"] = acts;
  if (f.is_free()) {
    json fr = json::array();
    for (const auto& t : f.free_summands())
      fr.push_back({{"object", s.object_name(t.object)}, {"multiplicity", t.multiplicity}});
    j["free"] = fr;
  }
  return j;
}

// Complexes and maps -----------------------------------------------------------------

std::vector<Matrix> read_components(const json& j, const Presheaf& src, const Presheaf& tgt, const Ctx& c) {
  const json& a = array(j, c);
  const FinCat& s = src.shape();
  if (a.size() != s.num_objects()) c.fail("expected one matrix per object");
  std::vector<Matrix> out;
  for (ObjId x = 0; x < s.num_objects(); ++x) out.push_back(read_matrix(a[x], src.field(), tgt.dim(x), src.dim(x), c.at(x)));
  return out;
}

json write_components(const PresheafMap& f) {
  json a = json::array();
  for (const auto& m : f.components()) a.push_back(write_matrix(m));
  return a;
}

Complex read_complex_body(const json& j, const Field& k, const FinCat& shape, const Ctx& c) {
  if (j.contains("dims") && !j.contains("terms")) return Complex::stalk(read_presheaf_body(j, k, shape, c));
  const int lo = j.contains("lo") ? j["lo"].get<int>() : 0;
  const Ctx ct = c.at("terms");
  const json& tj = array(member(j, "terms", c), ct);
  std::vector<Presheaf> terms;
  for (std::size_t t = 0; t < tj.size(); ++t) terms.push_back(read_presheaf_body(tj[t], k, shape, ct.at(t)));
  const Ctx cd = c.at("differentials");
  std::vector<PresheafMap> diffs;
  const std::size_t nd = terms.empty() ? 0 : terms.size() - 1;
  const json empty = json::array();
  const json& dj = j.contains("differentials") ? array(j["differentials"], cd) : empty;
  if (dj.size() != nd) cd.fail("expected " + std::to_string(nd) + " differentials");
  for (std::size_t t = 0; t < nd; ++t) {
    auto comps = read_components(dj[t], terms[t], terms[t + 1], cd.at(t));
    diffs.push_back(guarded(cd.at(t), [&] { return PresheafMap(terms[t], terms[t + 1], comps, true); }));
  }
  if (terms.empty()) return Complex::zero(k, shape);
  return guarded(c, [&] { return Complex(lo, terms, diffs, true); });
}

json write_complex_body(const Complex& x) {
  json terms = json::array(), diffs = json::array();
  for (int p = x.lo(); p <= x.hi(); ++p) {
    terms.push_back(write_presheaf_body(x.term(p)));
    if (p < x.hi()) diffs.push_back(write_components(x.differential(p)));
  }
  return json{{"lo", x.empty_range() ? 0 : x.lo()}, {"terms", terms}, {"differentials", diffs}};
}

ChainMap read_chain_map(const json& j, const Complex& s, const Complex& t, const Ctx& c) {
  const json& a = array(j, c);
  const std::size_t n = s.empty_range() ? 0 : static_cast<std::size_t>(s.hi() - s.lo() + 1);
  if (a.size() != n) c.fail("expected one entry per source degree");
  std::vector<PresheafMap> comps;
  for (std::size_t i = 0; i < n; ++i) {
    const int p = s.lo() + static_cast<int>(i);
    auto m = read_components(a[i], s.term(p), t.term(p), c.at(i));
    comps.push_back(guarded(c.at(i), [&] { return PresheafMap(s.term(p), t.term(p), m, true); }));
  }
  return guarded(c, [&] { return ChainMap(s, t, comps, true); });
}

Homotopy read_homotopy(const json& j, const Complex& s, const Complex& t, const Ctx& c) {
  const json& a = array(j, c);
  const std::size_t n = s.empty_range() ? 0 : static_cast<std::size_t>(s.hi() - s.lo() + 1);
  if (a.size() != n) c.fail("expected one entry per source degree");
  Homotopy h{s, t, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const int p = s.lo() + static_cast<int>(i);
    auto m = read_components(a[i], s.term(p), t.term(p - 1), c.at(i));
    h.components.push_back(guarded(c.at(i), [&] { return PresheafMap(s.term(p), t.term(p - 1), m, true); }));
  }
  return h;
}

json write_family(const std::vector<PresheafMap>& comps) {
  json a = json::array();
  for (const auto& m : comps) a.push_back(write_components(m));
  return a;
}

// Documents --------------------------------------------------------------------------

Field read_field(const json& j, const Ctx& c) {
  const Ctx cf = c.at("field");
  try {
    return Field::parse(str(member(j, "field", c), cf));
  } catch (const InvalidInput&) {
    throw;
  } catch (const std::exception& e) {
    cf.fail(e.what());
  }
}

IncoherentDiagram read_incoherent(const json& j, const Field& k, const Ctx& c) {
  IncoherentDiagram d;
  d.index = read_diagram(member(j, "index", c), c.at("index"));
  d.base = read_diagram(member(j, "base", c), c.at("base"));
  const Ctx co = c.at("objects");
  const json& oj = array(member(j, "objects", c), co);
  if (oj.size() != d.index.num_objects()) co.fail("expected one complex per index object");
  for (std::size_t i = 0; i < oj.size(); ++i) d.objects.push_back(read_complex_body(oj[i], k, d.base, co.at(i)));
  std::vector<std::optional<ChainMap>> arrows(d.index.num_arrows());
  const Ctx ca = c.at("arrows");
  if (j.contains("arrows")) {
    const json& aj = array(j["arrows"], ca);
    for (std::size_t i = 0; i < aj.size(); ++i) {
      const Ctx ci = ca.at(i);
      const ArrId a = arrow_named(d.index, member(aj[i], "arrow", ci), ci.at("arrow"));
      const Arrow& ar = d.index.arrow(a);
      arrows[a] = read_chain_map(member(aj[i], "components", ci), d.objects[ar.target], d.objects[ar.source],
                                 ci.at("components"));
    }
  }
  for (ArrId a = 0; a < d.index.num_arrows(); ++a) {
    if (d.index.is_identity(a)) {
      if (arrows[a] && !(*arrows[a] == ChainMap::identity(d.objects[d.index.arrow(a).source])))
        ca.fail("identity arrow \"" + d.index.arrow(a).name + "\" must act by the identity");
      d.arrows.push_back(ChainMap::identity(d.objects[d.index.arrow(a).source]));
    } else {
      if (!arrows[a]) ca.fail("missing map for arrow \"" + d.index.arrow(a).name + "\"");
      d.arrows.push_back(*arrows[a]);
    }
  }
  if (j.contains("composites")) {
    const Ctx cc = c.at("composites");
    const json& hj = array(j["composites"], cc);
    for (std::size_t i = 0; i < hj.size(); ++i) {
      const Ctx ci = cc.at(i);
      const ArrId b = arrow_named(d.index, member(hj[i], "outer", ci), ci.at("outer"));
      const ArrId a = arrow_named(d.index, member(hj[i], "inner", ci), ci.at("inner"));
      if (d.index.compose_or_npos(b, a) == npos) ci.fail("arrows are not composable");
      const Complex& s = d.objects[d.index.arrow(b).target];
      const Complex& t = d.objects[d.index.arrow(a).source];
      d.composites.emplace(std::make_pair(b, a), read_homotopy(member(hj[i], "components", ci), s, t, ci.at("components")));
    }
  }
  guarded(c, [&] {
    d.validate();
    d.complete_witnesses();
    return 0;
  });
  return d;
}

json write_incoherent(const IncoherentDiagram& d) {
  json objs = json::array(), arrows = json::array(), comps = json::array();
  for (const auto& o : d.objects) objs.push_back(write_complex_body(o));
  for (ArrId a = 0; a < d.index.num_arrows(); ++a)
    if (!d.index.is_identity(a))
      arrows.push_back({{"arrow", d.index.arrow(a).name}, {"components", write_family(d.arrows[a].components())}});
  for (const auto& [key, h] : d.composites)
    comps.push_back({{"outer", d.index.arrow(key.first).name},
                     {"inner", d.index.arrow(key.second).name},
                     {"components", write_family(h.components)}});
  return json{{"kind", "incoherent"}, {"field", d.field().name()}, {"index", write_diagram(d.index)},
              {"base", write_diagram(d.base)}, {"objects", objs}, {"arrows", arrows}, {"composites", comps}};
}

std::string dump(const json& j) { return j.dump(1); }

}  // namespace

Loaded parse_document(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InvalidInput(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error");
  }
  const Ctx c{origin, ""};
  try {
    const std::string kind = str(member(j, "kind", c), c.at("kind"));
    if (kind == "diagram") return {kind, std::nullopt, read_diagram(j, c)};
    if (kind == "functor") return {kind, std::nullopt, read_functor(j, c)};
    if (kind == "presheaf") {
      const Field k = read_field(j, c);
      return {kind, k, read_presheaf_body(j, k, read_diagram(member(j, "diagram", c), c.at("diagram")), c)};
    }
    if (kind == "complex") {
      const Field k = read_field(j, c);
      return {kind, k, read_complex_body(j, k, read_diagram(member(j, "diagram", c), c.at("diagram")), c)};
    }
    if (kind == "incoherent") {
      const Field k = read_field(j, c);
      return {kind, k, read_incoherent(j, k, c)};
    }
    c.at("kind").fail("unknown kind \"" + kind + "\"");
  } catch (const json::exception& e) {
    c.fail(e.what());
  }
}

Loaded load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str(), path);
}

namespace {

template <class T>
T expect(const std::string& path, const char* what) {
  Loaded l = load_file(path);
  if (auto* v = std::get_if<T>(&l.value)) return *v;
  throw InvalidInput(path + ": expected a " + what + ", found kind \"" + l.kind + "\"");
}

}  // namespace

FinCat load_diagram(const std::string& path) { return expect<FinCat>(path, "diagram"); }

DiagFunctor load_functor(const std::string& path) { return expect<DiagFunctor>(path, "functor"); }

Presheaf load_presheaf(const std::string& path) {
  Loaded l = load_file(path);
  if (auto* v = std::get_if<Presheaf>(&l.value)) return *v;
  if (auto* x = std::get_if<Complex>(&l.value)) {
    const Complex t = x->trimmed();
    if (t.empty_range()) return x->zero_term();
    if (t.lo() == 0 && t.hi() == 0) return t.term(0);
  }
  throw InvalidInput(path + ": expected a presheaf, found kind \"" + l.kind + "\"");
}

Complex load_complex(const std::string& path) {
  Loaded l = load_file(path);
  if (auto* v = std::get_if<Complex>(&l.value)) return *v;
  if (auto* f = std::get_if<Presheaf>(&l.value)) return Complex::stalk(*f);
  throw InvalidInput(path + ": expected a complex, found kind \"" + l.kind + "\"");
}

IncoherentDiagram load_incoherent(const std::string& path) { return expect<IncoherentDiagram>(path, "incoherent diagram"); }

std::string to_json(const FinCat& c) {
  json j{{"kind", "diagram"}};
  j.update(write_diagram(c));
  return dump(j);
}

std::string to_json(const DiagFunctor& u) { return dump(write_functor(u)); }

std::string to_json(const Presheaf& f) {
  json j{{"kind", "presheaf"}, {"field", f.field().name()}, {"diagram", write_diagram(f.shape())}};
  j.update(write_presheaf_body(f));
  return dump(j);
}

std::string to_json(const Complex& x) {
  json j{{"kind", "complex"}, {"field", x.field().name()}, {"diagram", write_diagram(x.shape())}};
  j.update(write_complex_body(x));
  return dump(j);
}

std::string to_json(const IncoherentDiagram& d) { return dump(write_incoherent(d)); }

std::string to_json(const Value& v) {
  return std::visit([](const auto& x) { return to_json(x); }, v);
}

void save_file(const std::string& path, const Value& v) {
  std::ofstream out(path);
  if (!out) throw InvalidInput(path + ": cannot write file");
  out << to_json(v) << '\n';
}

}  // namespace derivkit
