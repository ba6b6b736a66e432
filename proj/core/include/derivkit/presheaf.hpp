#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "derivkit/diagram.hpp"
#include "derivkit/field.hpp"
#include "derivkit/matrix.hpp"

namespace derivkit {

/// One summand V ⊗ i of a free presheaf: `multiplicity` copies of the
/// representable at `object`.
struct FreeSummand {
  ObjId object;
  std::size_t multiplicity;
  friend bool operator==(const FreeSummand&, const FreeSummand&) = default;
};

/// A presheaf of finite-dimensional vector spaces on a FinCat: an arrow
/// a : x → y acts by F(a) : F_y → F_x (a dim F_x × dim F_y matrix), with
/// F(g∘f) = F(f)·F(g). Cheap to copy.
///
/// A presheaf may carry a free decoration: a list of summands (i_t, v_t)
/// certifying F = ⊕_t V_t ⊗ i_t in the standard layout, where the fiber at j
/// concatenates, over t and then over h ∈ hom(j, i_t) in arrow order, blocks
/// of size v_t.
class Presheaf {
 public:
  Presheaf();  // zero presheaf on the empty category over F_2

  /// Actions of the irreducible arrows (in FinCat::irreducible_arrows order)
  /// determine everything else. With `check` functoriality is verified
  /// against the whole composition table.
  static Presheaf from_generators(Field field, FinCat shape, std::vector<std::size_t> dims,
                                  std::vector<Matrix> irreducible_actions, bool check = true);
  static Presheaf zero(Field field, FinCat shape);
  /// Constant presheaf with fiber k^dim and identity actions.
  static Presheaf constant(Field field, FinCat shape, std::size_t dim);

  const Field& field() const { return d_->field; }
  const FinCat& shape() const { return d_->shape; }
  std::size_t dim(ObjId x) const { return d_->dims.at(x); }
  const std::vector<std::size_t>& dims() const { return d_->dims; }
  std::size_t total_dim() const;
  bool is_zero() const { return total_dim() == 0; }
  /// F(a) : F_target(a) → F_source(a).
  const Matrix& action(ArrId a) const { return d_->actions.at(a); }
  std::vector<Matrix> irreducible_actions() const;

  bool is_free() const { return d_->free.has_value(); }
  const std::vector<FreeSummand>& free_summands() const;
  /// Row offset of the generator of summand t inside the fiber at its object.
  std::size_t generator_offset(std::size_t t) const;
  /// Row offset of the block (t, h) inside the fiber at source(h).
  std::size_t block_offset(std::size_t t, ArrId h) const;
  Presheaf without_decoration() const;

  /// Exhaustive functoriality check (throws InvalidInput).
  void validate() const;

  /// Same shape, dims and actions (decorations ignored).
  friend bool operator==(const Presheaf& a, const Presheaf& b);
  bool same_shape(const Presheaf& other) const;

  std::string summary() const;

  // Low-level constructor for modules that already know all actions.
  static Presheaf from_all_actions(Field field, FinCat shape, std::vector<std::size_t> dims,
                                   std::vector<Matrix> actions,
                                   std::optional<std::vector<FreeSummand>> free = {});

 private:
  struct Data {
    Field field = Field::f2();
    FinCat shape;
    std::vector<std::size_t> dims;
    std::vector<Matrix> actions;  // per arrow of shape
    std::optional<std::vector<FreeSummand>> free;
    std::vector<std::vector<std::size_t>> free_offsets;  // [object][summand] start row
  };
  explicit Presheaf(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
};

/// A natural transformation φ : F → G, components φ_x : F_x → G_x.
class PresheafMap {
 public:
  PresheafMap() = default;
  /// Checks naturality on irreducible arrows (throws InvalidInput).
  PresheafMap(Presheaf source, Presheaf target, std::vector<Matrix> components,
              bool check = true);

  static PresheafMap zero(const Presheaf& source, const Presheaf& target);
  static PresheafMap identity(const Presheaf& f);

  const Presheaf& source() const { return source_; }
  const Presheaf& target() const { return target_; }
  const Matrix& component(ObjId x) const { return components_.at(x); }
  const std::vector<Matrix>& components() const { return components_; }

  bool is_zero() const;
  bool is_injective() const;
  bool is_surjective() const;
  bool is_iso() const;

  PresheafMap operator+(const PresheafMap& o) const;
  PresheafMap operator-(const PresheafMap& o) const;
  PresheafMap operator-() const;
  PresheafMap scaled(const mpq_class& c) const;
  /// Same data, reinterpreted between presheaves with identical fibers and
  /// actions (e.g. to attach or drop a decoration).
  PresheafMap retyped(const Presheaf& source, const Presheaf& target) const;

  friend bool operator==(const PresheafMap& a, const PresheafMap& b);

 private:
  Presheaf source_;
  Presheaf target_;
  std::vector<Matrix> components_;
};

/// g ∘ f.
PresheafMap compose(const PresheafMap& g, const PresheafMap& f);

struct SubObject {
  Presheaf object;
  PresheafMap inclusion;
};
struct QuotientObject {
  Presheaf object;
  PresheafMap projection;
};

SubObject kernel(const PresheafMap& f);
QuotientObject cokernel(const PresheafMap& f);
/// Image with its inclusion into the target; `factor` is the corestriction.
struct ImageObject {
  Presheaf object;
  PresheafMap inclusion;
  PresheafMap factor;
};
ImageObject image(const PresheafMap& f);

/// Subpresheaf spanned objectwise by the columns of `bases` (must be stable
/// under the action; throws InvalidInput otherwise).
SubObject subpresheaf(const Presheaf& g, const std::vector<Matrix>& bases);
/// Quotient by the subpresheaf spanned by `bases`. The quotient basis is the
/// set of standard basis vectors completing a basis of the span, chosen left
/// to right.
QuotientObject quotient(const Presheaf& g, const std::vector<Matrix>& bases);

struct DirectSum {
  Presheaf object;
  std::vector<PresheafMap> inclusions;
  std::vector<PresheafMap> projections;
};
DirectSum direct_sum(const std::vector<Presheaf>& parts);
Presheaf direct_sum(const Presheaf& a, const Presheaf& b);
/// Block-diagonal map ⊕ f_k : ⊕ source_k → ⊕ target_k.
PresheafMap direct_sum(const std::vector<PresheafMap>& maps, const Presheaf& source,
                       const Presheaf& target);
/// Map [f_1 … f_k] : ⊕ sources → target, or column (f_1; …; f_k) : source → ⊕ targets.
PresheafMap row_map(const std::vector<PresheafMap>& maps, const Presheaf& source);
PresheafMap column_map(const std::vector<PresheafMap>& maps, const Presheaf& target);

struct Conflation {
  PresheafMap inflation;
  PresheafMap deflation;
};
bool is_conflation(const PresheafMap& i, const PresheafMap& p);

/// Cocartesian square on an inflation i : X ↣ Y and f : X → X'.
struct Pushout {
  Presheaf object;
  PresheafMap inflation;  ///< i' : X' ↣ Y'
  PresheafMap map;        ///< f' : Y → Y'
};
Pushout pushout(const PresheafMap& i, const PresheafMap& f);
/// Cartesian square on a deflation p : Y ↠ Z and g : Z' → Z.
struct Pullback {
  Presheaf object;
  PresheafMap deflation;  ///< p' : W ↠ Z'
  PresheafMap map;        ///< g' : W → Y
};
Pullback pullback(const PresheafMap& p, const PresheafMap& g);

// Projectives ---------------------------------------------------------------

/// V ⊗ i with dim V = v.
Presheaf free_at(Field field, const FinCat& shape, std::size_t v, ObjId i);
/// ⊕_t V_t ⊗ i_t (decorated).
Presheaf free_sum(Field field, const FinCat& shape, const std::vector<FreeSummand>& summands);
/// The map P → G sending the generators of summand t to the columns of
/// images[t] (a dim G_{i_t} × v_t matrix).
PresheafMap map_from_free(const Presheaf& p, const Presheaf& g, const std::vector<Matrix>& images);
/// Inverse of map_from_free: the generator images of φ : P → G.
std::vector<Matrix> generator_images(const PresheafMap& phi);

/// Σ_i F_i ⊗ i with its counit (generators map to themselves).
struct CanonicalCover {
  Presheaf cover;
  PresheafMap counit;
};
CanonicalCover canonical_cover(const Presheaf& f);
/// Projective cover: top = F / rad F, generators lifted to F.
CanonicalCover minimal_cover(const Presheaf& f);

/// 0 → P_m → … → P_1 → P_0 ↠ F built from canonical covers.
struct Resolution {
  Presheaf input;
  std::vector<Presheaf> terms;             ///< P_k, decorated
  std::vector<PresheafMap> differentials;  ///< P_k → P_{k−1}, k ≥ 1 (index k−1)
  PresheafMap augmentation;                ///< P_0 ↠ F
  std::vector<Presheaf> kernels;           ///< K^{k}F for k = 1..m+1 (last is zero)
  std::size_t length() const { return terms.empty() ? 0 : terms.size() - 1; }
};
Resolution resolve(const Presheaf& f);

// Hom, restriction, duality, Kan extension -----------------------------------

std::vector<PresheafMap> hom_space(const Presheaf& f, const Presheaf& g);
std::size_t hom_dim(const Presheaf& f, const Presheaf& g);

Presheaf restrict(const DiagFunctor& u, const Presheaf& g);
PresheafMap restrict(const DiagFunctor& u, const PresheafMap& phi);

/// The dual over the opposite shape: fibers F_x^*, actions transposed.
Presheaf dualize(const Presheaf& f);
/// D(φ) : D(target) → D(source).
PresheafMap dualize(const PresheafMap& phi);

/// Abelian left Kan extension by the pointwise colimit over y\I.
Presheaf lan_pointwise(const DiagFunctor& u, const Presheaf& f);
/// Abelian left Kan extension of a free presheaf: V ⊗ i ↦ V ⊗ u(i).
Presheaf lan_free(const DiagFunctor& u, const Presheaf& p);
/// Image of a map between free presheaves under lan_free.
PresheafMap lan_free(const DiagFunctor& u, const PresheafMap& phi, const Presheaf& source,
                     const Presheaf& target);

/// Extension by zero along a full inclusion whose image is a sieve or a
/// cosieve (fibers outside the image vanish).
Presheaf extend_by_zero(const DiagFunctor& u, const Presheaf& f);
PresheafMap extend_by_zero(const DiagFunctor& u, const PresheafMap& phi, const Presheaf& source,
                           const Presheaf& target);

}  // namespace derivkit
