#include "suites.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <thread>

#include "derivkit/error.hpp"
#include "derivkit/random.hpp"

namespace derivkit::cli {

namespace {

// What one case produced; merged into the report in case order.
struct CaseLog {
  std::size_t index = 0;
  std::vector<std::pair<std::string, bool>> checks;
  std::vector<CaseFailure> failures;
  std::vector<Counterexample> inputs;

  void input(std::string label, Value v) { inputs.push_back({std::move(label), std::move(v)}); }
  void input(std::string label, const ChainMap& f) { input(std::move(label), Value(as_arrow(f))); }
  void input(std::string label, const PresheafMap& f) {
    input(std::move(label), ChainMap(Complex::stalk(f.source()), Complex::stalk(f.target()), {f}));
  }
  bool check(const std::string& name, bool ok, const std::string& msg = {}) {
    checks.emplace_back(name, ok);
    if (!ok) failures.push_back({index, name, msg, inputs});
    return ok;
  }
};

using CaseFn = std::function<void(Rng&, const Field&, CaseLog&)>;

// Sizes: diagrams ≤ 5 objects, fibers ≤ 3, degrees in [−2, 2], trimmed
// further where a case builds many derived objects.
constexpr std::size_t kObjects = 5;
constexpr std::size_t kDim = 3;

// An index with at least two objects, so the lift is not short-circuited.
FinCat random_index(Rng& r, std::size_t max_objects) {
  FinCat c = random_category(r, max_objects);
  while (c.num_objects() < 2) c = random_category(r, max_objects);
  return c;
}

Complex over_e(const Presheaf& f, const FinCat& index) {
  return Complex::stalk(restrict(projection_left(index, point_category()), f));
}

// -- exact-axioms --------------------------------------------------------------------

void exact_axioms(Rng& r, const Field& k, CaseLog& log) {
  const FinCat c = random_category(r, kObjects);
  const RandomConflation cf = random_conflation(r, k, c, kDim);
  const PresheafMap& i = cf.inflation;
  const PresheafMap& p = cf.deflation;
  log.input("inflation", i);
  log.input("deflation", p);
  log.check("conflation", is_conflation(i, p));

  const Presheaf& b = i.target();
  log.check("ex0-identity", is_conflation(PresheafMap::identity(b), PresheafMap::zero(b, Presheaf::zero(k, c))));

  const DirectSum bd = direct_sum(std::vector<Presheaf>{b, random_presheaf(r, k, c, kDim)});
  const PresheafMap ji = compose(bd.inclusions[0], i);
  log.check("ex1-inflations-compose", is_conflation(ji, cokernel(ji).projection));
  const PresheafMap sub = image(random_hom(r, random_presheaf(r, k, c, kDim), p.target())).inclusion;
  const PresheafMap qp = compose(cokernel(sub).projection, p);
  log.check("ex1-deflations-compose", is_conflation(kernel(qp).inclusion, qp));

  const PresheafMap f = random_hom(r, i.source(), random_presheaf(r, k, c, kDim));
  const Pushout po = pushout(i, f);
  const QuotientObject qo = cokernel(po.inflation);
  log.check("ex2-pushout", is_conflation(po.inflation, qo.projection) && qo.object.dims() == p.target().dims() &&
                               compose(po.map, i) == compose(po.inflation, f));

  const PresheafMap g = random_hom(r, random_presheaf(r, k, c, kDim), p.target());
  const Pullback pb = pullback(p, g);
  const SubObject ko = kernel(pb.deflation);
  log.check("ex2op-pullback", is_conflation(ko.inclusion, pb.deflation) && ko.object.dims() == i.source().dims() &&
                                  compose(p, pb.map) == compose(g, pb.deflation));
}

// -- resolution ----------------------------------------------------------------------

void resolution(Rng& r, const Field& k, CaseLog& log) {
  const FinCat c = random_category(r, kObjects);
  const Presheaf f = random_presheaf(r, k, c, kDim);
  log.input("presheaf", f);
  const Resolution res = resolve(f);
  const std::size_t n = c.max_chain_length();
  log.check("terminates", !res.kernels.empty() && res.kernels.back().is_zero());
  log.check("length-bound", res.length() <= n && (res.kernels.size() <= n || res.kernels[n].is_zero()),
            "length " + std::to_string(res.length()) + " > max chain length " + std::to_string(n));

  const std::size_t m = res.length();
  std::vector<Presheaf> terms;
  std::vector<PresheafMap> diffs;
  for (std::size_t t = 0; t <= m; ++t) terms.push_back(res.terms[m - t]);
  for (std::size_t t = 0; t < m; ++t) diffs.push_back(res.differentials[m - t - 1]);
  const Complex p(-static_cast<int>(m), terms, diffs);
  bool exact = res.augmentation.is_surjective() && homology_dims(p, 0) == f.dims() &&
               (m == 0 || compose(res.augmentation, res.differentials[0]).is_zero());
  for (int d = -static_cast<int>(m); d < 0; ++d) {
    const auto h = homology_dims(p, d);
    exact = exact && std::all_of(h.begin(), h.end(), [](auto v) { return v == 0; });
  }
  log.check("exact", exact);

  const Complex x = random_complex(r, k, c, kDim);
  log.input("complex", x);
  const ProjectiveModel pm = proj_resolution(x);
  log.check("projective-model", pm.object.is_projective() && is_quasi_iso(pm.map));
}

// -- adjunction (Der 3) --------------------------------------------------------------

void adjunction(Rng& r, const Field& k, CaseLog& log) {
  const DiagFunctor u = random_functor(r);
  const Complex x = random_complex(r, k, u.source(), 2);
  const Complex y = random_complex(r, k, u.target(), 2);
  log.input("functor", u);
  log.input("x", x);
  log.input("y", y);
  const KanResult l = lan(u, x);
  const std::size_t a = ext_dim(l.object, y, 0), b = ext_dim(x, restrict(u, y), 0);
  log.check("lan", a == b, "dim Hom(u_!x, y) = " + std::to_string(a) + " but dim Hom(x, u*y) = " + std::to_string(b));
  const KanResult rr = ran(u, x);
  const std::size_t c = ext_dim(y, rr.object, 0), d = ext_dim(restrict(u, y), x, 0);
  log.check("ran", c == d, "dim Hom(y, u_*x) = " + std::to_string(c) + " but dim Hom(u*y, x) = " + std::to_string(d));
  log.check("certificates", l.certificate.verify() && rr.certificate.verify());
}

// -- Der 1: D(I ⊔ J) splits -----------------------------------------------------------

void der1(Rng& r, const Field& k, CaseLog& log) {
  const FinCat i = random_category(r, 3), j = random_category(r, 3);
  const FinCat s = disjoint_union(i, j);
  std::vector<ObjId> left, right;
  for (ObjId x = 0; x < s.num_objects(); ++x) (x < i.num_objects() ? left : right).push_back(x);
  const DiagFunctor ul = full_inclusion(s, left), ur = full_inclusion(s, right);
  const Complex x = random_complex(r, k, s, 2), z = random_complex(r, k, s, 2);
  log.input("x", x);
  log.input("z", z);
  bool ok = true;
  for (int n = -1; n <= 1; ++n)
    ok = ok && ext_dim(x, z, n) ==
                   ext_dim(restrict(ul, x), restrict(ul, z), n) + ext_dim(restrict(ur, x), restrict(ur, z), n);
  log.check("hom-splits", ok);
  // x is recovered from its two restrictions: the counits sum to a quasi-iso.
  const ChainMap el = counit(ul, x), er = counit(ur, x);
  const ComplexSum sum = direct_sum(std::vector<Complex>{el.source(), er.source()});
  log.check("objects-split", is_quasi_iso(compose(el, sum.projections[0]) + compose(er, sum.projections[1])));
}

// -- Der 2: conservativity ----------------------------------------------------------

void der2(Rng& r, const Field& k, CaseLog& log) {
  const FinCat c = random_category(r, kObjects);
  const Complex x = random_complex(r, k, c, kDim), y = random_complex(r, k, c, kDim);
  const ChainMap f = random_chain_map(r, x, y);
  const ChainMap q = proj_resolution(x).map;
  log.input("map", f);
  for (const ChainMap* m : {&f, &q}) {
    bool pointwise = true;
    for (ObjId o = 0; o < c.num_objects(); ++o) pointwise = pointwise && is_quasi_iso(restrict(point_inclusion(c, o), *m));
    log.check("conservative", is_quasi_iso(*m) == pointwise);
  }
  log.check("model-is-quasi-iso", is_quasi_iso(q));
}

// -- Der 4: base change --------------------------------------------------------------

void der4(Rng& r, const Field& k, CaseLog& log) {
  const DiagFunctor u = random_functor(r);
  const Complex x = random_complex(r, k, u.source(), 2);
  const ObjId y = static_cast<ObjId>(r.below(u.target().num_objects()));
  log.input("functor", u);
  log.input("x", x);
  log.check("right", base_change(u, y, x).quasi_iso, "at object " + u.target().object_name(y));
  log.check("left", base_change_left(u, y, x).quasi_iso, "at object " + u.target().object_name(y));
}

// -- Der 7 ---------------------------------------------------------------------------

void der7(Rng& r, const Field& k, CaseLog& log) {
  const FinCat base = random_category(r, 2);
  const SquareObject s = random_square(r, k, base, 2);
  log.input("square", s.complex());
  const bool co = is_cocartesian(s).holds, ca = is_cartesian(s).holds;
  log.check("predicates-agree", co == ca,
            std::string("cocartesian ") + (co ? "yes" : "no") + ", cartesian " + (ca ? "yes" : "no"));
  const SquareObject b = random_bicartesian_square(r, k, base, 2);
  log.input("bicartesian", b.complex());
  if (!log.check("bicartesian-detected", is_cocartesian(b).holds && is_cartesian(b).holds)) return;
  const StandardTriangle t = standard_triangle(b);
  log.check("triangle-vs-cone", t.classes_agree(), "delta class and cone class differ in Hom(z, Σx)");
}

// -- shift lemma ---------------------------------------------------------------------

void shift_lemma(Rng& r, const Field& k, CaseLog& log) {
  const FinCat c = random_category(r, 4);
  const Complex x = random_complex(r, k, c, kDim);
  log.input("x", x);
  const Suspension s = suspension_via_recollement(x);
  log.check("suspension", s.witness.source() == s.object && s.witness.target() == shift(x, 1) &&
                              is_quasi_iso(s.witness));
  const Suspension l = loop_via_recollement(x);
  log.check("loop", l.witness.source() == shift(x, -1) && l.witness.target() == l.object && is_quasi_iso(l.witness));
}

// -- lift round trip -----------------------------------------------------------------

bool lift_matches(const LiftResult& l, const Complex& x, const FinCat& index, const FinCat& base) {
  std::vector<ChainMap> c, phi;
  for (ObjId i = 0; i < index.num_objects(); ++i) {
    const Complex xi = slice(x, index, base, i);
    c.push_back(ChainMap::identity(xi).retyped(xi, l.certificate.comparisons[i].target()));
    phi.push_back(ChainMap::identity(l.certificate.comparisons[i].target()));
  }
  auto s = solve_lift(l.object, l.certificate.comparisons, x, c, phi, index, base);
  return s && is_quasi_iso(s->map);
}

void lift_roundtrip(Rng& r, const Field& k, CaseLog& log) {
  const FinCat index = random_index(r, 4), base = random_category(r, 2);
  const IncoherentDiagram f = random_toda_diagram(r, k, index, base, 2);
  log.input("diagram", f);
  const LiftResult l = lift_object(f);
  log.check("incoherent", l.certificate.verify(f, l.object));
  log.check("deterministic", lift_object(f).object == l.object);

  const Complex x = Complex::stalk(random_presheaf(r, k, product(index, base), 2), static_cast<int>(r.below(5)) - 2);
  log.input("honest", x);
  const IncoherentDiagram d = dia(x, index, base);
  const LiftResult lx = lift_object(d);
  log.check("honest", lx.certificate.verify(d, lx.object) && lift_matches(lx, x, index, base));
}

// -- hom bijection -------------------------------------------------------------------

void hom_bijection(Rng& r, const Field& k, CaseLog& log) {
  const FinCat index = random_index(r, 4), base = random_category(r, 2);
  const FinCat c = product(index, base);
  auto slices = [&](const Complex& x) {
    std::vector<Complex> s;
    for (ObjId i = 0; i < index.num_objects(); ++i) s.push_back(slice(x, index, base, i));
    return s;
  };
  // Complexes first; stalks (which always pass) if no drawn pair does.
  Complex x, z;
  bool found = false;
  for (int attempt = 0; attempt < 8 && !found; ++attempt) {
    x = random_complex(r, k, c, 2, -1, 1);
    z = random_complex(r, k, c, 2, -1, 1);
    found = toda_check(slices(x), slices(z)).pass;
  }
  if (!found) {
    x = Complex::stalk(random_presheaf(r, k, c, 2));
    z = Complex::stalk(random_presheaf(r, k, c, 2), static_cast<int>(r.below(2)));
  }
  log.input("x", x);
  log.input("z", z);
  const HomComparison h = hom_compare(x, z, index, base);
  log.check("toda", h.toda.pass);
  log.check("dims-agree", h.coherent_dim == h.incoherent_dim,
            "coherent " + std::to_string(h.coherent_dim) + ", incoherent " + std::to_string(h.incoherent_dim));
  log.check("full-rank", h.lands_in_natural && h.canonical_rank == h.coherent_dim);
  log.check("resolution-audit", h.resolution.fiber_formula_holds && h.resolution.steps <= index.max_chain_length() + 1);
}

// -- extension exactness -------------------------------------------------------------

std::vector<Complex> standard_kernels(const Field& k) {
  const FinCat e = point_category(), d1 = delta(1);
  const Presheaf unit = Presheaf::constant(k, e, 1);
  const Presheaf p0 = Presheaf::constant(k, d1, 1);
  const Presheaf s1 = Presheaf::from_generators(k, d1, {0, 1}, {Matrix(k, 1, 0)});
  // P_1 ↣ P_0 over Δ1, a two-term projective complex with homology S_0.
  const Presheaf f1 = free_at(k, d1, 1, 1), f0 = free_at(k, d1, 1, 0);
  const PresheafMap inc = map_from_free(f1, f0, {Matrix::identity(k, 1)});
  return {Complex::stalk(unit), Complex::stalk(p0), Complex::stalk(s1),
          shift(Complex::stalk(direct_sum(unit, unit)), 1), Complex(-1, {f1, f0}, {inc})};
}

void extension_exactness(Rng& r, const Field& k, CaseLog& log) {
  const FinCat index = random_index(r, 3);
  const FinCat e = point_category();
  const RandomConflation cf = random_conflation(r, k, index, 2);
  log.input("inflation", cf.inflation);
  log.input("deflation", cf.deflation);
  const DiagFunctor lift_e = projection_left(index, e);
  auto stalk_map = [&](const PresheafMap& f) {
    const Presheaf s = restrict(lift_e, f.source()), t = restrict(lift_e, f.target());
    return ChainMap(Complex::stalk(s), Complex::stalk(t), {restrict(lift_e, f)});
  };
  const ChainMap i = stalk_map(cf.inflation), p = stalk_map(cf.deflation);
  const Complex b = i.target();
  const ObjId o = static_cast<ObjId>(r.below(index.num_objects()));
  const Complex fiber = over_e(restrict(point_inclusion(index, o), cf.inflation.target()), e);

  for (const Complex& kernel : standard_kernels(k)) {
    if (!log.check("kernel-toda", kernel_toda(kernel).pass)) continue;
    const ExtensionSquare sq = extend_conflation(kernel, i, p, index, false);
    log.check("bicartesian", sq.cocartesian && sq.cartesian,
              std::string("cocartesian ") + (sq.cocartesian ? "yes" : "no") + ", cartesian " + (sq.cartesian ? "yes" : "no"));
    log.check("compat-identity", verify_extension_compat(identity_functor(index), kernel, b).holds);
    bool points = true;
    for (ObjId x = 0; x < index.num_objects(); ++x)
      points = points && verify_extension_compat(point_inclusion(index, x), kernel, b).holds;
    log.check("compat-points", points);
    log.check("compat-terminal", verify_extension_compat(terminal_functor(index), kernel, fiber).holds);
  }
}

void der_axioms(Rng& r, const Field& k, CaseLog& log) {
  der1(r, k, log);
  der2(r, k, log);
  adjunction(r, k, log);
  der4(r, k, log);
  der7(r, k, log);
}

const std::vector<std::pair<std::string, CaseFn>>& registry() {
  static const std::vector<std::pair<std::string, CaseFn>> r{
      {"exact-axioms", exact_axioms}, {"resolution", resolution},
      {"adjunction", adjunction},     {"der1", der1},
      {"der2", der2},                 {"der4", der4},
      {"der7", der7},                 {"shift-lemma", shift_lemma},
      {"lift-roundtrip", lift_roundtrip}, {"hom-bijection", hom_bijection},
      {"extension-exactness", extension_exactness}, {"der-axioms", der_axioms}};
  return r;
}

}  // namespace

const CheckCount* SuiteReport::find(const std::string& check) const {
  for (const auto& c : checks)
    if (c.name == check) return &c;
  return nullptr;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : registry()) n.push_back(name);
    return n;
  }();
  return names;
}

IncoherentDiagram as_arrow(const ChainMap& f) {
  const FinCat d1 = delta(1);
  IncoherentDiagram d{d1, f.source().shape(), {f.source(), f.target()}, {}, {}};
  for (ArrId a = 0; a < d1.num_arrows(); ++a)
    d.arrows.push_back(d1.is_identity(a) ? ChainMap::identity(d.objects[d1.arrow(a).source]) : f);
  return d;
}

SuiteReport run_suite(const std::string& name, const SuiteOptions& opt) {
  const auto& reg = registry();
  auto it = std::find_if(reg.begin(), reg.end(), [&](const auto& e) { return e.first == name; });
  if (it == reg.end()) throw InvalidInput("unknown suite \"" + name + "\"");
  const CaseFn& fn = it->second;

  const auto start = std::chrono::steady_clock::now();
  std::vector<CaseLog> logs(opt.cases);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < opt.cases; c = next++) {
      CaseLog& log = logs[c];
      log.index = c;
      Rng rng(opt.seed, c);
      try {
        fn(rng, opt.field, log);
      } catch (const std::exception& e) {
        log.check("no-exception", false, e.what());
      }
    }
  };
  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(opt.cases, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SuiteReport rep;
  rep.suite = name;
  rep.seed = opt.seed;
  rep.cases = opt.cases;
  rep.field = opt.field;
  std::map<std::string, std::size_t> slot;
  for (auto& log : logs) {
    for (const auto& [check, ok] : log.checks) {
      auto [s, fresh] = slot.emplace(check, rep.checks.size());
      if (fresh) rep.checks.push_back({check, 0, 0});
      (ok ? rep.checks[s->second].passed : rep.checks[s->second].failed) += 1;
    }
    for (auto& f : log.failures) rep.failures.push_back(std::move(f));
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::vector<std::string> write_counterexamples(const SuiteReport& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> paths;
  for (const auto& f : r.failures)
    for (const auto& c : f.inputs) {
      const std::string path =
          dir + "/" + r.suite + "-case" + std::to_string(f.case_index) + "-" + f.check + "-" + c.label + ".json";
      save_file(path, c.value);
      paths.push_back(path);
    }
  return paths;
}

}  // namespace derivkit::cli
