#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "derivkit/derivator.hpp"

namespace derivkit {

/// A diagram I° → D(J) that is functorial only up to homotopy: F_i over J for
/// each object, F(a) : F_y → F_x for each arrow a : x → y (identities map to
/// identities), and for each composable pair of non-identity arrows
/// (b : y → z, a : x → y) a homotopy h with F(a)F(b) − F(b∘a) = dh + hd.
struct IncoherentDiagram {
  FinCat index;
  FinCat base;
  std::vector<Complex> objects;
  std::vector<ChainMap> arrows;
  std::map<std::pair<ArrId, ArrId>, Homotopy> composites;  ///< keyed by (b, a)

  const Field& field() const { return objects.empty() ? default_field() : objects.front().field(); }
  /// Shapes, identities, and every recorded witness (throws InvalidInput).
  void validate() const;
  /// Computes the missing composite witnesses; throws PreconditionFailed when
  /// some F(a)F(b) is not homotopic to F(b∘a).
  void complete_witnesses();
  std::size_t num_composable_pairs() const;

 private:
  static const Field& default_field();
};

/// Fibers and arrow maps of x over index × base; strictly functorial.
IncoherentDiagram dia(const Complex& x, const FinCat& index, const FinCat& base);

/// x restricted to {i} × J, with the free decoration restored when x is projective.
Complex projective_slice(const Complex& x, const FinCat& index, const FinCat& base, ObjId i);

// Toda condition -----------------------------------------------------------------------

struct TodaEntry {
  int n = 0;
  ObjId i = 0;
  ObjId j = 0;
  std::size_t dim = 0;  ///< dim Hom(Σ^n f_i, g_j)
};
struct TodaReport {
  bool pass = true;
  std::vector<TodaEntry> entries;     ///< every pair and n that was computed
  std::optional<TodaEntry> witness;   ///< first nonzero entry
};
/// dim Hom(Σ^n f_i, g_j) for 0 < n ≤ hi(f_i) − lo(g_j) (larger n vanish for degree reasons).
TodaReport toda_check(const std::vector<Complex>& f, const std::vector<Complex>& g);
TodaReport toda_check(const IncoherentDiagram& f, const IncoherentDiagram& g);

// Lifting ------------------------------------------------------------------------------

struct LiftCertificate {
  std::vector<Complex> slices;               ///< F̃_i (projective, over J)
  std::vector<ChainMap> comparisons;         ///< F̃_i → F_i
  std::vector<Homotopy> arrow_homotopies;    ///< per arrow a : x → y, F(a)c_y − c_x F̃(a)
  std::size_t tower_height = 0;              ///< number of nonzero K-stages
  std::vector<std::size_t> stage_dims;       ///< total dimension of each lifted free stage
  /// Re-checks quasi-isomorphisms and homotopies.
  bool verify(const IncoherentDiagram& f, const Complex& lift) const;
};
struct LiftResult {
  Complex object;  ///< over index × base; projective unless the index has one object
  LiftCertificate certificate;
};
/// The coherent lift of a Toda-passing incoherent diagram (throws
/// PreconditionFailed with the offending (n, i, j) otherwise).
LiftResult lift_object(const IncoherentDiagram& f);

/// A chain map ψ : src → tgt with c_tgt,i ∘ ψ_i ≃ φ_i ∘ c_src,i for all i,
/// When src is not projective, ψ starts at its projective model instead.
struct ObjectwiseLift {
  ChainMap map;
  std::vector<Homotopy> witnesses;  ///< c_tgt ψ_i − φ_i c_src = dh + hd
};
std::optional<ObjectwiseLift> solve_lift(const Complex& src, const std::vector<ChainMap>& c_src,
                                         const Complex& tgt, const std::vector<ChainMap>& c_tgt,
                                         const std::vector<ChainMap>& phi, const FinCat& index,
                                         const FinCat& base);

struct MorphismLift {
  LiftResult source;
  LiftResult target;
  ChainMap map;
  std::vector<Homotopy> witnesses;
};
/// Lifts a family φ_i : f_i → g_i that is natural up to homotopy.
MorphismLift lift_morphism(const IncoherentDiagram& f, const IncoherentDiagram& g,
                           const std::vector<ChainMap>& phi);

// Hom comparison -----------------------------------------------------------------------

/// QX = ⊕_i i_!i*X → X and its kernel LX, iterated until it vanishes.
struct CanonicalResolution {
  std::vector<Complex> q_terms;    ///< Q L^s X
  std::vector<ChainMap> counits;   ///< Q L^s X → L^s X
  std::vector<Complex> l_terms;    ///< L^{s+1} X
  bool fiber_formula_holds = true; ///< j*(LY) = ⊕_{i≠j} ⊕_{I(j,i)} i*Y at every stage
  std::size_t steps = 0;           ///< first s with L^s X = 0
};
CanonicalResolution canonical_resolution(const Complex& x, const FinCat& index, const FinCat& base);

/// M ⊗ i over I × J: fiber ⊕_{h ∈ I(j,i)} M_b at (j, b).
Complex point_tensor(const Complex& m, const FinCat& index, ObjId i);

struct HomComparison {
  TodaReport toda;
  std::size_t coherent_dim = 0;    ///< dim Hom_{D(I×J)}(x, z)
  std::size_t incoherent_dim = 0;  ///< dim Hom(dia x, dia z)
  std::size_t canonical_rank = 0;  ///< rank of dia on Hom(x, z)
  bool lands_in_natural = true;    ///< dia(ψ) satisfies the arrow constraints
  bool bijective() const {
    return toda.pass && lands_in_natural && coherent_dim == incoherent_dim && canonical_rank == coherent_dim;
  }
  CanonicalResolution resolution;
};
HomComparison hom_compare(const Complex& x, const Complex& z, const FinCat& index, const FinCat& base);

// Extension of exact functors ----------------------------------------------------------

/// A ⊗ K for A over e and K over J′ (total complex, sign (−1)^p on 1 ⊗ d_K).
Complex tensor(const Complex& a, const Complex& kernel);
ChainMap tensor(const ChainMap& f, const Complex& kernel);

/// dim Hom(Σ^n K, K) for the n that can be nonzero; passes when all vanish.
TodaReport kernel_toda(const Complex& kernel);

struct Extension {
  IncoherentDiagram image;  ///< F applied to dia(x)
  LiftResult lift;
};
/// F̃_I(x) for F = − ⊗ kernel, x over I × e.
Extension extend_functor(const Complex& kernel, const Complex& x, const FinCat& index);

struct ExtensionSquare {
  SquareObject square;  ///< Ã → B̃ → C̃ with Cone(id_Ã) in the lower-left corner
  bool cocartesian = false;
  bool cartesian = false;
  std::optional<StandardTriangle> triangle;
};
/// Images of a conflation a ↣ b ↠ c of presheaves over I (stalks in degree 0).
ExtensionSquare extend_conflation(const Complex& kernel, const ChainMap& i, const ChainMap& p,
                                  const FinCat& index, bool with_triangle = true);

struct CompatReport {
  bool holds = false;
  std::optional<ChainMap> witness;  ///< F̃(u*x) → u*F̃(x)
};
/// restrict(u, F̃(x)) ≃ F̃(restrict(u, x)) for x over u.target() × e.
CompatReport verify_extension_compat(const DiagFunctor& u, const Complex& kernel, const Complex& x);

}  // namespace derivkit
