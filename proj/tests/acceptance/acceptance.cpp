// One PASS/FAIL line per acceptance criterion. With an argument N only
// criterion N runs. Exit status is nonzero when any selected criterion fails.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "derivkit/random.hpp"
#include "suites.hpp"

using namespace derivkit;
using namespace derivkit::cli;

namespace {

constexpr std::uint64_t kSeed = 20240917;

struct Outcome {
  bool pass = false;
  std::string detail;
};

SuiteReport suite(const std::string& name, std::size_t cases, const Field& k = Field::f2()) {
  SuiteOptions o;
  o.seed = kSeed;
  o.cases = cases;
  o.field = k;
  return run_suite(name, o);
}

// Every listed check ran `expected` times without a failure.
bool all_passed(const SuiteReport& r, const std::vector<std::string>& checks, std::size_t expected, std::string& why) {
  bool ok = true;
  for (const auto& name : checks) {
    const CheckCount* c = r.find(name);
    const std::size_t passed = c ? c->passed : 0, failed = c ? c->failed : 0;
    if (failed != 0 || passed != expected) {
      ok = false;
      why += " " + name + " " + std::to_string(passed) + "/" + std::to_string(passed + failed);
    }
  }
  for (const auto& f : r.failures)
    if (f.check == "no-exception") {
      ok = false;
      why += " case " + std::to_string(f.case_index) + " threw: " + f.message;
    }
  return ok;
}

std::string secs(double s) {
  std::ostringstream o;
  o.precision(2);
  o << std::fixed << s << " s";
  return o.str();
}

Outcome resolution_bound() {
  const SuiteReport r = suite("resolution", 200);
  std::string why;
  const bool ok = all_passed(r, {"terminates", "length-bound", "exact"}, 200, why);
  return {ok && r.seconds < 10, "200 presheaves, K^{n+1}F = 0 with n = max chain length, " + secs(r.seconds) + why};
}

Presheaf simple(const Field& k, ObjId x) {
  const FinCat d1 = delta(1);
  return Presheaf::from_generators(k, d1, {x == 0 ? 1u : 0u, x == 1 ? 1u : 0u}, {Matrix(k, x == 1, x == 0)});
}

Outcome ext_table() {
  // Hand table for Δ1 (arrow a : 1 → 0). S_0 has the resolution
  // 0 → P(1) → P(0) → S_0 with P(1) = S_1, so Ext^1(S_0, S_1) = Hom(S_1, S_1) = k;
  // S_1 = P(1) is projective, so Ext^n(S_1, -) = 0 for n > 0.
  auto expected = [](ObjId x, ObjId y, int n) -> std::size_t {
    if (n == 0) return x == y ? 1 : 0;
    return n == 1 && x == 0 && y == 1 ? 1 : 0;
  };
  std::size_t mismatches = 0, entries = 0;
  for (const Field& k : {Field::f2(), Field::rationals(), Field::prime(3)})
    for (ObjId x = 0; x < 2; ++x)
      for (ObjId y = 0; y < 2; ++y)
        for (int n = -1; n <= 3; ++n) {
          ++entries;
          if (ext_dim(Complex::stalk(simple(k, x)), Complex::stalk(simple(k, y)), n) != expected(x, y, n)) ++mismatches;
        }
  return {mismatches == 0, std::to_string(entries) + " entries over F2, Q, F3 (n = -1..3), " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome adjunction() {
  const SuiteReport r = suite("adjunction", 100);
  std::string why;
  const bool ok = all_passed(r, {"lan", "ran"}, 100, why);
  return {ok, "100 triples, dim Hom(u_!x, y) = dim Hom(x, u*y) and dim Hom(y, u_*x) = dim Hom(u*y, x)" + why};
}

Outcome base_change_iso() {
  const SuiteReport r = suite("der4", 100);
  std::string why;
  const bool ok = all_passed(r, {"right", "left"}, 100, why);
  return {ok, "100 cases, right and left base-change maps are quasi-isomorphisms" + why};
}

Outcome der7() {
  const SuiteReport r = suite("der7", 200);
  std::string why;
  const bool ok = all_passed(r, {"predicates-agree"}, 200, why);
  const CheckCount* b = r.find("bicartesian-detected");
  return {ok, "200 random squares, zero disagreements; " + std::to_string(b ? b->passed : 0) +
                  " known-bicartesian squares detected" + why};
}

Outcome shift_lemma() {
  const SuiteReport r = suite("shift-lemma", 100);
  std::string why;
  const bool ok = all_passed(r, {"suspension"}, 100, why);
  return {ok, "100 complexes, the cofiber of x over the pushout shape is quasi-isomorphic to shift(x, 1)" + why};
}

Outcome triangle_vs_cone() {
  const SuiteReport r = suite("der7", 50);
  std::string why;
  bool ok = all_passed(r, {"bicartesian-detected", "triangle-vs-cone"}, 50, why);

  // S_1 ↣ P_0 ↠ S_0 over Δ1: does not split, so its class spans Ext^1(S_0, S_1) = k.
  const Field k = Field::f2();
  const FinCat d1 = delta(1);
  const Presheaf s0 = simple(k, 0), s1 = simple(k, 1), p0 = Presheaf::constant(k, d1, 1);
  const PresheafMap i(s1, p0, {Matrix(k, 1, 0), Matrix::identity(k, 1)});
  const PresheafMap p(p0, s0, {Matrix::identity(k, 1), Matrix(k, 0, 1)});
  const ChainMap ci(Complex::stalk(s1), Complex::stalk(p0), {i});
  const ChainMap cp(Complex::stalk(p0), Complex::stalk(s0), {p});
  const StandardTriangle t = standard_triangle(triangle_square(ci, cp, Homotopy::zero(ci.source(), cp.target())));
  const bool nonsplit = t.ext_basis.dimension == 1 && !t.delta_class.is_zero() && t.classes_agree();
  if (!nonsplit) why += " non-split case: dim " + std::to_string(t.ext_basis.dimension);
  ok = ok && nonsplit;
  return {ok, "50 bicartesian squares, delta class = cone class; S_1 -> P_0 -> S_0 gives a nonzero class in a "
              "1-dimensional Ext^1" + why};
}

Outcome lift_roundtrip() {
  const SuiteReport r = suite("lift-roundtrip", 100);
  std::string why;
  const bool ok = all_passed(r, {"incoherent", "honest"}, 100, why);
  return {ok && r.seconds < 60,
          "100 Toda diagrams and 100 honest objects round-trip, " + secs(r.seconds) + why};
}

Outcome hom_bijection() {
  const SuiteReport r = suite("hom-bijection", 100);
  std::string why;
  const bool ok = all_passed(r, {"toda", "dims-agree", "full-rank"}, 100, why);
  return {ok, "100 Toda pairs, equal Hom dimensions and full-rank comparison" + why};
}

Outcome extension_exactness() {
  const SuiteReport r = suite("extension-exactness", 50);
  std::string why;
  const bool ok = all_passed(
      r, {"kernel-toda", "bicartesian", "compat-identity", "compat-points", "compat-terminal"}, 250, why);
  return {ok, "50 conflations x 5 kernels: bicartesian images, compatible with id, points and p_I" + why};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{resolution_bound, ext_table,      adjunction,     base_change_iso,
                                                       der7,             shift_lemma,    triangle_vs_cone, lift_roundtrip,
                                                       hom_bijection,    extension_exactness};
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  bool all = true;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    if (only != 0 && static_cast<std::size_t>(only) != c + 1) continue;
    Outcome o;
    try {
      o = criteria[c]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << "criterion " << c + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
