#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "derivkit/presheaf.hpp"

namespace derivkit {

/// Bounded cochain complex of presheaves, d^p : X^p → X^{p+1}. Terms outside
/// [lo, hi] are zero; an empty range (hi < lo) is the zero complex.
class Complex {
 public:
  Complex();
  /// terms[k] sits in degree lo + k; differentials[k] : X^{lo+k} → X^{lo+k+1}.
  Complex(int lo, std::vector<Presheaf> terms, std::vector<PresheafMap> differentials,
          bool check = true);
  static Complex zero(Field field, FinCat shape);
  static Complex stalk(const Presheaf& f, int degree = 0);

  const Field& field() const { return d_->zero.field(); }
  const FinCat& shape() const { return d_->zero.shape(); }
  int lo() const { return d_->lo; }
  int hi() const { return d_->hi; }
  bool empty_range() const { return d_->hi < d_->lo; }
  const Presheaf& term(int p) const;
  /// d^p (zero outside the range).
  PresheafMap differential(int p) const;
  const Presheaf& zero_term() const { return d_->zero; }

  /// Every term carries a free decoration.
  bool is_projective() const;
  bool is_zero() const;
  /// Drops zero terms at both ends.
  Complex trimmed() const;
  /// Same data with a wider (or narrower, zero-padded) degree range.
  Complex with_range(int lo, int hi) const;
  std::size_t total_dim() const;

  void validate() const;
  friend bool operator==(const Complex& a, const Complex& b);
  std::string summary() const;

 private:
  struct Data {
    int lo = 0;
    int hi = -1;
    std::vector<Presheaf> terms;
    std::vector<PresheafMap> diffs;
    Presheaf zero;
  };
  explicit Complex(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
};

/// f^p : X^p → Y^p, stored for p in the source range.
class ChainMap {
 public:
  ChainMap() = default;
  ChainMap(Complex source, Complex target, std::vector<PresheafMap> components,
           bool check = true);
  static ChainMap zero(const Complex& source, const Complex& target);
  static ChainMap identity(const Complex& x);
  /// Build from a per-degree callback; components outside the source range
  /// are not requested.
  template <class F>
  static ChainMap from_degrees(const Complex& source, const Complex& target, F f, bool check = true) {
    std::vector<PresheafMap> c;
    for (int p = source.lo(); p <= source.hi(); ++p) c.push_back(f(p));
    return ChainMap(source, target, std::move(c), check);
  }

  const Complex& source() const { return source_; }
  const Complex& target() const { return target_; }
  PresheafMap component(int p) const;
  const std::vector<PresheafMap>& components() const { return components_; }

  bool is_zero() const;
  ChainMap operator+(const ChainMap& o) const;
  ChainMap operator-(const ChainMap& o) const;
  ChainMap operator-() const;
  ChainMap scaled(const mpq_class& c) const;
  /// Same components between complexes with identical terms.
  ChainMap retyped(const Complex& source, const Complex& target) const;
  void validate() const;
  friend bool operator==(const ChainMap& a, const ChainMap& b);

 private:
  Complex source_;
  Complex target_;
  std::vector<PresheafMap> components_;
};

/// g ∘ f.
ChainMap compose(const ChainMap& g, const ChainMap& f);

/// h^p : X^p → Y^{p−1}, stored for p in the source range.
struct Homotopy {
  Complex source;
  Complex target;
  std::vector<PresheafMap> components;
  PresheafMap component(int p) const;
  /// d·h + h·d, the chain map this homotopy witnesses as nullhomotopic.
  ChainMap boundary() const;
  static Homotopy zero(const Complex& source, const Complex& target);
};

// Shift, cone, homology ----------------------------------------------------------

/// Σ^n x: (Σ^n x)^p = x^{p+n}, differential (−1)^n d.
Complex shift(const Complex& x, int n);
/// Σ^n f (components reindexed, no sign).
ChainMap shift(const ChainMap& f, int n);

struct Cone {
  Complex object;
  ChainMap inclusion;   ///< Y → C(f)
  ChainMap projection;  ///< C(f) → ΣX
};
/// C(f)^p = X^{p+1} ⊕ Y^p with d = [[−d_X, 0], [f, d_Y]].
Cone cone(const ChainMap& f);

Presheaf homology(const Complex& x, int p);
/// dim H^p(x) at every object, from ranks only.
std::vector<std::size_t> homology_dims(const Complex& x, int p);
bool is_acyclic(const Complex& x);
bool is_quasi_iso(const ChainMap& f);

Complex direct_sum(const Complex& a, const Complex& b);
struct ComplexSum {
  Complex object;
  std::vector<ChainMap> inclusions;
  std::vector<ChainMap> projections;
};
ComplexSum direct_sum(const std::vector<Complex>& parts);

Complex restrict(const DiagFunctor& u, const Complex& x);
ChainMap restrict(const DiagFunctor& u, const ChainMap& f);
/// (Dx)^p = (x^{−p})^* over the opposite shape, d^p = (d^{−p−1})^T.
Complex dualize(const Complex& x);
/// D(f) : D(target) → D(source).
ChainMap dualize(const ChainMap& f);
/// Extension by zero of a complex (see extend_by_zero for presheaves).
Complex extend_by_zero(const DiagFunctor& u, const Complex& x);
ChainMap extend_by_zero(const DiagFunctor& u, const ChainMap& f, const Complex& source,
                        const Complex& target);

// Projective models -----------------------------------------------------------------

struct ProjectiveModel {
  Complex object;  ///< complex of free presheaves
  ChainMap map;    ///< quasi-isomorphism object → x
};
/// Complex of projectives with a quasi-isomorphism onto x, built from the top
/// degree down by covering the cocycles of the mapping cone. Projectives are
/// returned unchanged.
ProjectiveModel proj_resolution(const Complex& x);

/// The Hom complex Hom^•(P, Y) for a complex P of free presheaves, in
/// generator coordinates: a degree-n element is a family f^p : P^p → Y^{p+n},
/// each recorded by its generator images (column-major).
class ProjectiveHom {
 public:
  ProjectiveHom(Complex p, Complex y);
  const Complex& source() const { return p_; }
  const Complex& target() const { return y_; }

  std::size_t dim(int n) const;
  /// D^n : Hom^n → Hom^{n+1}, (Df)^p = d_Y f^p − (−1)^n f^{p+1} d_P.
  Matrix differential(int n) const;
  /// Coordinates of a family of maps f^p : P^p → Y^{p+n} (indexed from P.lo()).
  Matrix vectorize(const std::vector<PresheafMap>& family, int n) const;
  Matrix vectorize(const ChainMap& f) const;  // n = 0
  std::vector<PresheafMap> unvectorize(const Matrix& column, int n) const;
  /// Chain map P → Σ^n Y from a cocycle.
  ChainMap to_chain_map(const Matrix& column, int n) const;
  /// Homotopy P → Y from a degree −1 element.
  Homotopy to_homotopy(const Matrix& column) const;
  /// Post-composition with s : Y → Y' as a map Hom^n(P, Y) → Hom^n(P, Y').
  Matrix postcompose(const ChainMap& s, const ProjectiveHom& other, int n) const;

  /// Offset of the block for degree p (of P) in Hom^n.
  std::size_t offset(int n, int p) const;

 private:
  Complex p_;
  Complex y_;
};

/// Coordinates of maps from a free presheaf: dim Hom(P, G) = Σ_t dim G_{i_t} v_t.
std::size_t free_hom_dim(const Presheaf& p, const Presheaf& g);
/// Column-major generator coordinates of φ : P → G.
Matrix free_hom_coords(const PresheafMap& phi);
PresheafMap free_hom_map(const Presheaf& p, const Presheaf& g, const Matrix& coords,
                         std::size_t offset = 0);
/// Matrix of f ↦ f ∘ φ, Hom(P, G) → Hom(P', G) for φ : P' → P between free presheaves.
Matrix free_precompose(const PresheafMap& phi, const Presheaf& g);
/// Matrix of f ↦ ψ ∘ f, Hom(P, G) → Hom(P, G') for ψ : G → G'.
Matrix free_postcompose(const Presheaf& p, const PresheafMap& psi);

struct ExtResult {
  std::size_t dimension = 0;
  ProjectiveModel model;                 ///< resolution of the source
  std::vector<ChainMap> representatives; ///< chain maps P → Σ^n y
  Matrix representative_columns;         ///< their Hom-complex coordinates
  Matrix coboundaries;                   ///< basis of the image of D^{n−1}
};
/// Hom_{D^b}(x, Σ^n y), computed as H^n Hom^•(P(x), y).
ExtResult ext(const Complex& x, const Complex& y, int n);
std::size_t ext_dim(const Complex& x, const Complex& y, int n);
/// Same with a precomputed projective model of x.
ExtResult ext(const ProjectiveModel& px, const Complex& y, int n);
/// Coordinates of a chain map P → Σ^n y in the basis of representatives,
/// modulo coboundaries.
Matrix ext_coordinates(const ExtResult& e, const ChainMap& f);

/// h with f − g = d·h + h·d, if one exists.
std::optional<Homotopy> homotopy_solve(const ChainMap& f, const ChainMap& g);
/// For f : P → Y with P projective and s : X → Y: some g : P → X with
/// f − s∘g = dh + hd. Absent if none exists (never when s is a quasi-iso).
struct Lift {
  ChainMap map;
  Homotopy homotopy;
};
std::optional<Lift> lift_through(const ChainMap& f, const ChainMap& s);

}  // namespace derivkit
