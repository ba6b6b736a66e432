#include "cli.hpp"

#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "derivkit/error.hpp"
#include "derivkit/io.hpp"
#include "suites.hpp"

namespace derivkit::cli {

namespace {

using json = nlohmann::ordered_json;

// Loaded values share one field: the --field switch when given, otherwise
// the field of the first file that declares one.
class Workspace {
 public:
  explicit Workspace(std::optional<Field> forced) : field_(forced), forced_(forced.has_value()) {}

  Loaded load(const std::string& path) {
    Loaded l = load_file(path);
    if (l.field) {
      if (!field_) {
        field_ = l.field;
      } else if (!(*field_ == *l.field)) {
        throw InvalidInput(path + ": field " + l.field->name() + " does not match the " +
                           (forced_ ? "requested" : "workspace") + " field " + field_->name());
      }
    }
    values_.emplace(path, l.value);
    return l;
  }
  Complex complex(const std::string& path) {
    Loaded l = load(path);
    if (auto* x = std::get_if<Complex>(&l.value)) return *x;
    if (auto* f = std::get_if<Presheaf>(&l.value)) return Complex::stalk(*f);
    throw InvalidInput(path + ": expected a presheaf or complex, found kind \"" + l.kind + "\"");
  }
  IncoherentDiagram incoherent(const std::string& path) {
    Loaded l = load(path);
    if (auto* d = std::get_if<IncoherentDiagram>(&l.value)) return *d;
    throw InvalidInput(path + ": expected an incoherent diagram, found kind \"" + l.kind + "\"");
  }
  DiagFunctor functor(const std::string& path) {
    Loaded l = load(path);
    if (auto* u = std::get_if<DiagFunctor>(&l.value)) return *u;
    throw InvalidInput(path + ": expected a functor, found kind \"" + l.kind + "\"");
  }
  Field field() const { return field_.value_or(Field::f2()); }

 private:
  std::optional<Field> field_;
  bool forced_;
  std::map<std::string, Value> values_;
};

// "delta1", "delta1*square", or a diagram file.
FinCat shape_arg(const std::string& s) {
  if (auto star = s.find('*'); star != std::string::npos)
    return product(shape_arg(s.substr(0, star)), shape_arg(s.substr(star + 1)));
  if (auto n = named_shape(s)) return *n;
  return load_diagram(s);
}

std::string plural(std::size_t n, const std::string& word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (auto d : v) s += (s.empty() ? "" : " ") + std::to_string(d);
  return "(" + s + ")";
}

std::string summands(const Presheaf& p) {
  if (!p.is_free()) return join(p.dims());
  if (p.free_summands().empty()) return "0";
  std::string s;
  for (const auto& t : p.free_summands())
    s += (s.empty() ? "" : " + ") + std::to_string(t.multiplicity) + "*P(" + p.shape().object_name(t.object) + ")";
  return s;
}

json homology_json(const Complex& x) {
  json h = json::object();
  const Complex t = x.trimmed();
  for (int p = t.lo(); p <= t.hi(); ++p) {
    auto d = homology_dims(t, p);
    if (std::any_of(d.begin(), d.end(), [](auto v) { return v != 0; })) h[std::to_string(p)] = d;
  }
  return h;
}

void homology_text(std::ostream& o, const Complex& x, const std::string& label) {
  const json h = homology_json(x);
  if (h.empty()) {
    o << label << ": acyclic\n";
    return;
  }
  o << label << ":";
  for (auto it = h.begin(); it != h.end(); ++it) o << " H^" << it.key() << " = " << join(it.value().get<std::vector<std::size_t>>());
  o << "\n";
}

std::string matrix_row(const Matrix& m) {
  std::string s;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) s += (s.empty() ? "" : " ") + m.entry_string(r, c);
  return "[" + s + "]";
}

json matrix_json(const Matrix& m) {
  json a = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) a.push_back(m.entry_string(r, c));
  return a;
}

// Pieces of a morphism of incoherent diagrams written as one diagram over I × Δ1.
struct MapData {
  IncoherentDiagram source, target;
  std::vector<ChainMap> phi;
};

MapData split_arrow_diagram(const IncoherentDiagram& d, const std::string& path) {
  const FinCat& big = d.index;
  const auto bad = [&] { return InvalidInput(path + ": index is not of the form I × delta1"); };
  if (big.num_objects() % 2 != 0) throw bad();
  std::vector<ObjId> zeros;
  for (ObjId x = 0; x < big.num_objects(); x += 2) zeros.push_back(x);
  // I × {0}; the full subcategory keeps the arrow names of I × Δ1.
  const FinCat i = full_subcategory(big, zeros, "I");
  if (!(product(i, delta(1)) == big)) throw bad();
  auto part = [&](ObjId y) {
    IncoherentDiagram p{i, d.base, {}, {}, {}};
    for (ObjId x = 0; x < i.num_objects(); ++x) p.objects.push_back(d.objects[2 * x + y]);
    for (ArrId a = 0; a < i.num_arrows(); ++a)
      p.arrows.push_back(d.arrows[product_arrow(i, delta(1), a, y)]);
    p.complete_witnesses();
    return p;
  };
  MapData m{part(0), part(1), {}};
  for (ObjId x = 0; x < i.num_objects(); ++x) {
    const auto& h = big.hom(2 * x + 1, 2 * x);
    if (h.size() != 1) throw bad();
    m.phi.push_back(d.arrows[h.front()]);
  }
  return m;
}

struct Context {
  Workspace ws;
  bool as_json = false;
  std::ostream& out;
  json report = json::object();
  std::ostringstream text;
};

int finish(Context& c, bool ok) {
  c.report["ok"] = ok;
  if (c.as_json)
    c.out << c.report.dump(2) << "\n";
  else
    c.out << c.text.str();
  return ok ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"derivkit: exact derived-category computations over finite diagrams", "derivkit"};
  app.require_subcommand(1);
  app.fallthrough();
  bool as_json = false;
  std::string field_text;
  app.add_flag("--json", as_json, "Machine-readable report");
  app.add_option("--field", field_text, "Coefficient field: f2 (default), q, fp:<p>");

  std::function<int(Context&)> action;
  auto sub = [&](const char* name, const char* help) { return app.add_subcommand(name, help); };

  // --- diagrams and presheaves -------------------------------------------------------
  std::string file, file2, out_path, functor_path, dir = "left", object, base_name = "e", index_name, kernel_path;
  std::string open_path, closed_path, suite, out_dir = "counterexamples";
  int n = 0;
  bool left = false, loop = false, compat = false;
  std::uint64_t seed = 0;
  std::size_t cases = 20;
  unsigned threads = 0;

  auto* c_diag = sub("check-diagram", "Validate a diagram file");
  c_diag->add_option("file", file)->required();
  c_diag->callback([&] {
    action = [&](Context& c) {
      const FinCat d = load_diagram(file);
      const std::size_t arrows = d.num_arrows() - d.num_objects();
      c.text << "ok: " << plural(d.num_objects(), "object") << ", " << plural(arrows, "non-identity arrow")
             << ", acyclic\n";
      c.report["objects"] = d.num_objects();
      c.report["non_identity_arrows"] = arrows;
      c.report["acyclic"] = true;
      c.report["max_chain_length"] = d.max_chain_length();
      c.report["thin"] = d.is_thin();
      return finish(c, true);
    };
  });

  auto* c_pre = sub("check-presheaf", "Validate a presheaf, complex or incoherent diagram file");
  c_pre->add_option("file", file)->required();
  c_pre->callback([&] {
    action = [&](Context& c) {
      const Loaded l = c.ws.load(file);
      c.report["kind"] = l.kind;
      if (auto* f = std::get_if<Presheaf>(&l.value)) {
        c.text << "ok: presheaf over " << f->shape().name() << " with dims " << join(f->dims()) << ", functorial\n";
        c.report["dims"] = f->dims();
      } else if (auto* x = std::get_if<Complex>(&l.value)) {
        c.text << "ok: complex over " << x->shape().name() << " in degrees " << x->lo() << ".." << x->hi()
               << ", d^2 = 0\n";
        c.report["lo"] = x->lo();
        c.report["hi"] = x->hi();
      } else if (auto* d = std::get_if<IncoherentDiagram>(&l.value)) {
        c.text << "ok: incoherent diagram over " << d->index.name() << " with base " << d->base.name() << ", "
               << plural(d->composites.size(), "composite witness") << "\n";
        c.report["composites"] = d->composites.size();
      } else {
        throw InvalidInput(file + ": expected a presheaf, complex or incoherent diagram");
      }
      return finish(c, true);
    };
  });

  // --- resolutions and Ext -----------------------------------------------------------
  auto* c_res = sub("resolve", "Projective resolution of a presheaf (or model of a complex)");
  c_res->add_option("file", file)->required();
  c_res->add_option("--out", out_path, "Write the projective complex here");
  c_res->callback([&] {
    action = [&](Context& c) {
      const Loaded l = c.ws.load(file);
      Complex model;
      bool ok = true;
      if (auto* f = std::get_if<Presheaf>(&l.value)) {
        const Resolution r = resolve(*f);
        const std::size_t bound = f->shape().max_chain_length();
        const std::size_t m = r.length();
        c.text << "resolution of length " << m << " (max chain length " << bound << ")\n";
        json terms = json::array();
        for (std::size_t k = 0; k <= m; ++k) {
          c.text << "  P_" << k << " = " << summands(r.terms[k]) << "\n";
          terms.push_back(summands(r.terms[k]));
        }
        ok = r.kernels.back().is_zero() && m <= bound;
        c.text << (ok ? "K^" + std::to_string(bound + 1) + "F = 0\n" : "resolution exceeds the chain-length bound\n");
        c.report["length"] = m;
        c.report["max_chain_length"] = bound;
        c.report["terms"] = terms;
        std::vector<Presheaf> ts;
        std::vector<PresheafMap> ds;
        for (std::size_t k = 0; k <= m; ++k) ts.push_back(r.terms[m - k]);
        for (std::size_t k = 0; k < m; ++k) ds.push_back(r.differentials[m - k - 1]);
        model = Complex(-static_cast<int>(m), ts, ds);
      } else if (auto* x = std::get_if<Complex>(&l.value)) {
        const ProjectiveModel pm = proj_resolution(*x);
        model = pm.object;
        ok = is_quasi_iso(pm.map);
        json terms = json::object();
        for (int p = model.lo(); p <= model.hi(); ++p) {
          c.text << "  degree " << p << ": " << summands(model.term(p)) << "\n";
          terms[std::to_string(p)] = summands(model.term(p));
        }
        c.text << (ok ? "comparison is a quasi-isomorphism\n" : "comparison is NOT a quasi-isomorphism\n");
        c.report["terms"] = terms;
      } else {
        throw InvalidInput(file + ": expected a presheaf or complex");
      }
      if (!out_path.empty()) save_file(out_path, model);
      return finish(c, ok);
    };
  });

  auto* c_ext = sub("ext", "dim Hom(x, Σ^n y) in the derived category");
  c_ext->add_option("--source", file, "Complex or presheaf x")->required();
  c_ext->add_option("--target", file2, "Complex or presheaf y")->required();
  c_ext->add_option("--n", n, "Degree");
  c_ext->callback([&] {
    action = [&](Context& c) {
      const Complex x = c.ws.complex(file), y = c.ws.complex(file2);
      if (!(x.shape() == y.shape())) throw InvalidInput("ext: source and target live over different shapes");
      const std::size_t d = ext_dim(x, y, n);
      c.text << "dim Ext^" << n << " = " << d << "\n";
      c.report["n"] = n;
      c.report["dim"] = d;
      return finish(c, true);
    };
  });

  // --- Kan extensions ----------------------------------------------------------------
  auto* c_kan = sub("kan", "Derived Kan extension along a functor");
  c_kan->add_option("file", file)->required();
  c_kan->add_option("--dir", dir, "left or right")->check(CLI::IsMember({"left", "right"}));
  c_kan->add_option("--functor", functor_path)->required();
  c_kan->add_option("--out", out_path);
  c_kan->callback([&] {
    action = [&](Context& c) {
      const DiagFunctor u = c.ws.functor(functor_path);
      const Complex x = c.ws.complex(file);
      if (!(x.shape() == u.source())) throw InvalidInput(file + ": input does not live over the functor's source");
      const KanResult r = dir == "left" ? lan(u, x) : ran(u, x);
      const bool ok = r.certificate.verify();
      homology_text(c.text, r.object, dir == "left" ? "u_! x" : "u_* x");
      c.text << "unit/counit certificate: " << (ok ? "verified" : "FAILED") << "\n";
      c.report["direction"] = dir;
      c.report["homology"] = homology_json(r.object);
      c.report["certificate"] = ok;
      if (!out_path.empty()) save_file(out_path, r.object);
      return finish(c, ok);
    };
  });

  for (const char* which : {"holim", "hocolim"}) {
    auto* c_h = sub(which, which == std::string("holim") ? "Homotopy limit" : "Homotopy colimit");
    c_h->add_option("file", file)->required();
    c_h->add_option("--out", out_path);
    c_h->callback([&, which] {
      action = [&, which](Context& c) {
        const Complex x = c.ws.complex(file);
        const Complex r = which == std::string("holim") ? holim(x) : hocolim(x);
        homology_text(c.text, r, which);
        c.report["homology"] = homology_json(r);
        if (!out_path.empty()) save_file(out_path, r);
        return finish(c, true);
      };
    });
  }

  auto* c_bc = sub("base-change", "Base-change comparison at an object of the functor's target");
  c_bc->add_option("file", file)->required();
  c_bc->add_option("--functor", functor_path)->required();
  c_bc->add_option("--object", object)->required();
  c_bc->add_flag("--left", left, "Left version: hocolim over y\\I → (u_!x)_y");
  c_bc->callback([&] {
    action = [&](Context& c) {
      const DiagFunctor u = c.ws.functor(functor_path);
      const Complex x = c.ws.complex(file);
      if (!(x.shape() == u.source())) throw InvalidInput(file + ": input does not live over the functor's source");
      const ObjId y = u.target().object(object);
      const BaseChange b = left ? base_change_left(u, y, x) : base_change(u, y, x);
      c.text << "base change at " << object << ": " << (b.quasi_iso ? "quasi-isomorphism" : "NOT a quasi-isomorphism")
             << "\n";
      c.report["quasi_iso"] = b.quasi_iso;
      return finish(c, b.quasi_iso);
    };
  });

  // --- squares, triangles, recollement -------------------------------------------------
  auto square_of = [&](Context& c) {
    const FinCat base = shape_arg(base_name);
    const Complex x = c.ws.complex(file);
    if (!(x.shape() == product(square(), base)))
      throw InvalidInput(file + ": expected a complex over square × " + base.name());
    return SquareObject(x, base);
  };

  auto* c_sq = sub("square-check", "Homotopy cartesian / cocartesian predicates");
  c_sq->add_option("file", file)->required();
  c_sq->add_option("--base", base_name, "Shape J of a square over square × J (default e)");
  c_sq->callback([&] {
    action = [&](Context& c) {
      const SquareObject s = square_of(c);
      const bool co = is_cocartesian(s).holds, ca = is_cartesian(s).holds;
      c.text << "cocartesian: " << (co ? "yes" : "no") << "\ncartesian: " << (ca ? "yes" : "no") << "\n";
      if (co != ca) c.text << "predicates disagree\n";
      c.report["cocartesian"] = co;
      c.report["cartesian"] = ca;
      return finish(c, co == ca);
    };
  });

  auto* c_tri = sub("triangle", "Standard triangle of a bicartesian square with acyclic corner");
  c_tri->add_option("file", file)->required();
  c_tri->add_option("--base", base_name);
  c_tri->callback([&] {
    action = [&](Context& c) {
      const StandardTriangle t = standard_triangle(square_of(c));
      c.text << "dim Hom(z, Σx) = " << t.ext_basis.dimension << "\n"
             << "delta class: " << matrix_row(t.delta_class) << "\n"
             << "cone class:  " << matrix_row(t.cone_class) << "\n"
             << (t.classes_agree() ? "classes agree\n" : "classes DISAGREE\n");
      c.report["ext_dim"] = t.ext_basis.dimension;
      c.report["delta_class"] = matrix_json(t.delta_class);
      c.report["cone_class"] = matrix_json(t.cone_class);
      c.report["agree"] = t.classes_agree();
      return finish(c, t.classes_agree());
    };
  });

  auto* c_rec = sub("recollement", "Recollement functors and triangles of x over I × delta1 (or given inclusions)");
  c_rec->add_option("file", file)->required();
  c_rec->add_option("--index", index_name, "I, for the standard recollement of I × delta1");
  c_rec->add_option("--open", open_path, "Functor file for the open inclusion j");
  c_rec->add_option("--closed", closed_path, "Functor file for the closed inclusion i");
  c_rec->callback([&] {
    action = [&](Context& c) {
      std::optional<Recollement> r;
      if (!open_path.empty() || !closed_path.empty()) {
        if (open_path.empty() || closed_path.empty()) throw InvalidInput("recollement: give both --open and --closed");
        r.emplace(c.ws.functor(open_path), c.ws.functor(closed_path));
      } else {
        if (index_name.empty()) throw InvalidInput("recollement: give --index or --open/--closed");
        r.emplace(arrow_recollement(shape_arg(index_name)));
      }
      const Complex x = c.ws.complex(file);
      if (!(x.shape() == r->open().target())) throw InvalidInput(file + ": input does not live over the recollement's shape");
      homology_text(c.text, r->j_upper_star(x), "j* x");
      homology_text(c.text, r->i_upper_star(x), "i* x");
      homology_text(c.text, r->j_upper_query(x), "j^? x");
      homology_text(c.text, r->i_upper_shriek(x), "i^! x");
      const TriangleCertificate t1 = r->first_triangle(x), t2 = r->second_triangle(x);
      const std::size_t amb = r->connecting_ambiguity(x);
      c.text << "i_!i*x -> x -> j_!j^?x: " << (t1.quasi_iso ? "triangle" : "NOT a triangle") << "\n"
             << "j_!j*x -> x -> i_*i*x: " << (t2.quasi_iso ? "triangle" : "NOT a triangle") << "\n"
             << "connecting-map ambiguity: " << amb << "\n";
      c.report["j_upper_star"] = homology_json(r->j_upper_star(x));
      c.report["i_upper_star"] = homology_json(r->i_upper_star(x));
      c.report["j_upper_query"] = homology_json(r->j_upper_query(x));
      c.report["i_upper_shriek"] = homology_json(r->i_upper_shriek(x));
      c.report["first_triangle"] = t1.quasi_iso;
      c.report["second_triangle"] = t2.quasi_iso;
      c.report["connecting_ambiguity"] = amb;
      return finish(c, t1.quasi_iso && t2.quasi_iso);
    };
  });

  auto* c_sus = sub("suspend", "Σx computed as j^? i_* x (or Ωx as i^! j_! x with --loop)");
  c_sus->add_option("file", file)->required();
  c_sus->add_flag("--loop", loop);
  c_sus->add_option("--out", out_path);
  c_sus->callback([&] {
    action = [&](Context& c) {
      const Complex x = c.ws.complex(file);
      const Suspension s = loop ? loop_via_recollement(x) : suspension_via_recollement(x);
      const bool ok = is_quasi_iso(s.witness);
      homology_text(c.text, s.object, loop ? "i^! j_! x" : "j^? i_* x");
      c.text << "witness " << (loop ? "shift(x, -1) -> i^! j_! x" : "j^? i_* x -> shift(x, 1)") << ": "
             << (ok ? "quasi-isomorphism" : "NOT a quasi-isomorphism") << "\n";
      c.report["homology"] = homology_json(s.object);
      c.report["witness_quasi_iso"] = ok;
      if (!out_path.empty()) save_file(out_path, s.object);
      return finish(c, ok);
    };
  });

  // --- coherence -----------------------------------------------------------------------
  auto* c_dia = sub("dia", "Underlying incoherent diagram of x over I × J");
  c_dia->add_option("file", file)->required();
  c_dia->add_option("--index", index_name)->required();
  c_dia->add_option("--base", base_name);
  c_dia->add_option("--out", out_path);
  c_dia->callback([&] {
    action = [&](Context& c) {
      const FinCat i = shape_arg(index_name), j = shape_arg(base_name);
      const Complex x = c.ws.complex(file);
      if (!(x.shape() == product(i, j))) throw InvalidInput(file + ": input does not live over index × base");
      const IncoherentDiagram d = dia(x, i, j);
      if (!out_path.empty()) save_file(out_path, d);
      for (ObjId o = 0; o < i.num_objects(); ++o) homology_text(c.text, d.objects[o], "F_" + i.object_name(o));
      c.report["objects"] = i.num_objects();
      if (out_path.empty() && c.as_json) c.report["diagram"] = json::parse(to_json(d));
      return finish(c, true);
    };
  });

  auto* c_lift = sub("lift", "Coherent lift of an incoherent diagram satisfying the Toda condition");
  c_lift->add_option("file", file)->required();
  c_lift->add_option("--out", out_path);
  c_lift->callback([&] {
    action = [&](Context& c) {
      const IncoherentDiagram f = c.ws.incoherent(file);
      const TodaReport toda = toda_check(f, f);
      c.report["toda"] = toda.pass;
      if (!toda.pass) {
        const TodaEntry& w = *toda.witness;
        c.text << "Toda condition fails: dim Hom(Sigma^" << w.n << " F_" << f.index.object_name(w.i) << ", F_"
               << f.index.object_name(w.j) << ") = " << w.dim << "\n";
        c.report["witness"] = {{"n", w.n}, {"i", f.index.object_name(w.i)}, {"j", f.index.object_name(w.j)}, {"dim", w.dim}};
        return finish(c, false);
      }
      const LiftResult l = lift_object(f);
      const bool ok = l.certificate.verify(f, l.object);
      c.text << "tower height " << l.certificate.tower_height << ", stage dims " << join(l.certificate.stage_dims) << "\n";
      homology_text(c.text, l.object, "lift");
      c.text << "objectwise comparisons and arrow homotopies: " << (ok ? "verified" : "FAILED") << "\n";
      c.report["tower_height"] = l.certificate.tower_height;
      c.report["stage_dims"] = l.certificate.stage_dims;
      c.report["homology"] = homology_json(l.object);
      c.report["certificate"] = ok;
      if (!out_path.empty()) save_file(out_path, l.object);
      return finish(c, ok);
    };
  });

  auto* c_lm = sub("lift-map", "Lift a morphism of incoherent diagrams, given as one diagram over I × delta1");
  c_lm->add_option("file", file)->required();
  c_lm->callback([&] {
    action = [&](Context& c) {
      const MapData m = split_arrow_diagram(c.ws.incoherent(file), file);
      const MorphismLift l = lift_morphism(m.source, m.target, m.phi);
      const bool qi = is_quasi_iso(l.map);
      c.text << "lifted map found, " << plural(l.witnesses.size(), "objectwise homotopy") << "\n"
             << "lifted map is " << (qi ? "" : "not ") << "a quasi-isomorphism\n";
      c.report["witnesses"] = l.witnesses.size();
      c.report["quasi_iso"] = qi;
      return finish(c, true);
    };
  });

  auto* c_hc = sub("hom-compare", "Compare Hom(x, z) over I × J with Hom(dia x, dia z)");
  c_hc->add_option("x", file)->required();
  c_hc->add_option("z", file2)->required();
  c_hc->add_option("--index", index_name)->required();
  c_hc->add_option("--base", base_name);
  c_hc->callback([&] {
    action = [&](Context& c) {
      const FinCat i = shape_arg(index_name), j = shape_arg(base_name);
      const Complex x = c.ws.complex(file), z = c.ws.complex(file2);
      if (!(x.shape() == product(i, j)) || !(z.shape() == product(i, j)))
        throw InvalidInput("hom-compare: inputs do not live over index × base");
      const HomComparison h = hom_compare(x, z, i, j);
      c.text << "Toda: " << (h.toda.pass ? "passes" : "fails") << "\n"
             << "dim Hom(x, z) = " << h.coherent_dim << "\n"
             << "dim Hom(dia x, dia z) = " << h.incoherent_dim << "\n"
             << "rank of dia = " << h.canonical_rank << "\n"
             << (h.bijective() ? "bijection\n" : "not a bijection\n");
      c.report["toda"] = h.toda.pass;
      c.report["coherent_dim"] = h.coherent_dim;
      c.report["incoherent_dim"] = h.incoherent_dim;
      c.report["canonical_rank"] = h.canonical_rank;
      c.report["bijective"] = h.bijective();
      // Without Toda there is no claim to check.
      return finish(c, !h.toda.pass || h.bijective());
    };
  });

  auto* c_ext2 = sub("extend", "Extend the exact functor - ⊗ K to x over I × e");
  c_ext2->add_option("file", file)->required();
  c_ext2->add_option("--kernel", kernel_path)->required();
  c_ext2->add_option("--index", index_name)->required();
  c_ext2->add_flag("--compat", compat, "Also check compatibility with restriction to every object");
  c_ext2->add_option("--out", out_path);
  c_ext2->callback([&] {
    action = [&](Context& c) {
      const FinCat i = shape_arg(index_name);
      const Complex kernel = c.ws.complex(kernel_path);
      const Complex x = c.ws.complex(file);
      const Extension e = extend_functor(kernel, x, i);
      bool ok = e.lift.certificate.verify(e.image, e.lift.object);
      homology_text(c.text, e.lift.object, "F(x)");
      c.text << "lift certificate: " << (ok ? "verified" : "FAILED") << "\n";
      c.report["homology"] = homology_json(e.lift.object);
      c.report["certificate"] = ok;
      if (compat) {
        bool all = verify_extension_compat(identity_functor(i), kernel, x).holds;
        for (ObjId o = 0; o < i.num_objects(); ++o) all = all && verify_extension_compat(point_inclusion(i, o), kernel, x).holds;
        c.text << "compatible with restriction: " << (all ? "yes" : "NO") << "\n";
        c.report["compat"] = all;
        ok = ok && all;
      }
      if (!out_path.empty()) save_file(out_path, e.lift.object);
      return finish(c, ok);
    };
  });

  // --- property suites ------------------------------------------------------------------
  auto* c_ver = sub("verify", "Run a seeded property suite");
  c_ver->add_option("--suite", suite)->required()->check(CLI::IsMember(suite_names()));
  c_ver->add_option("--seed", seed);
  c_ver->add_option("--cases", cases);
  c_ver->add_option("--threads", threads, "Worker threads (default: all cores)");
  c_ver->add_option("--out", out_dir, "Directory for counterexample files");
  c_ver->callback([&] {
    action = [&](Context& c) {
      SuiteOptions o;
      o.seed = seed;
      o.cases = cases;
      o.field = c.ws.field();
      o.threads = threads;
      const SuiteReport r = run_suite(suite, o);
      c.text << "suite " << suite << ", seed " << seed << ", " << plural(cases, "case") << " over " << o.field.name()
             << "\n";
      json checks = json::array();
      for (const auto& k : r.checks) {
        c.text << "  " << k.name << ": " << k.passed << "/" << (k.passed + k.failed) << " passed\n";
        checks.push_back({{"name", k.name}, {"passed", k.passed}, {"failed", k.failed}});
      }
      json fails = json::array();
      const auto paths = write_counterexamples(r, out_dir);
      std::size_t next = 0;
      for (const auto& f : r.failures) {
        c.text << "FAIL case " << f.case_index << " " << f.check << (f.message.empty() ? "" : ": " + f.message) << "\n";
        json files = json::array();
        for (std::size_t q = 0; q < f.inputs.size(); ++q) {
          c.text << "  counterexample: " << paths[next] << "\n";
          files.push_back(paths[next++]);
        }
        fails.push_back({{"case", f.case_index}, {"check", f.check}, {"message", f.message}, {"files", files}});
      }
      c.report["suite"] = suite;
      c.report["seed"] = seed;
      c.report["cases"] = cases;
      c.report["field"] = o.field.name();
      c.report["checks"] = checks;
      c.report["failures"] = fails;
      c.report["seconds"] = r.seconds;
      return finish(c, r.ok());
    };
  });

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? 0 : 2;
  }
  try {
    std::optional<Field> forced;
    if (!field_text.empty()) {
      try {
        forced = Field::parse(field_text);
      } catch (const std::exception& e) {
        throw InvalidInput("--field: " + std::string(e.what()));
      }
    }
    Context c{Workspace(forced), as_json, out, json::object(), {}};
    return action(c);
  } catch (const InvalidInput& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionFailed& e) {
    err << "check failed: " << e.what() << "\n";
    return 1;
  } catch (const InvariantViolation& e) {
    err << "internal invariant violated: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace derivkit::cli
