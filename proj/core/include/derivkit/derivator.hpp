#pragma once

#include <optional>
#include <string>
#include <vector>

#include "derivkit/complex.hpp"

namespace derivkit {

// Free building blocks ---------------------------------------------------------------

/// u_! on a complex of free presheaves: V ⊗ i ↦ V ⊗ u(i), termwise.
Complex lan_free(const DiagFunctor& u, const Complex& p);
/// Unit P → u*u_!P for P free: each generator goes to its own copy at u(i).
ChainMap unit_free(const DiagFunctor& u, const Complex& p, const Complex& lan_p);
/// The adjunct u_!Q → Y of φ : Q → u*Y (Q free): same generator images.
ChainMap adjunct(const DiagFunctor& u, const ChainMap& phi, const Complex& lan_q, const Complex& y);

// Kan extensions ---------------------------------------------------------------------

/// Left: everything lives over u's shapes. Right: the certificate is the one of
/// the dual left extension along u° applied to Dx, and every map below lives
/// over the opposite shapes.
struct KanCertificate {
  DiagFunctor functor;
  bool left = true;
  Complex input;
  ProjectiveModel model;         ///< P → x
  Complex output;                ///< L = u_!P
  ChainMap unit;                 ///< η : P → u*L
  ProjectiveModel restricted;    ///< q : Q → u*L
  ChainMap counit;               ///< ε : u_!Q → L
  ChainMap unit_lift;            ///< η̃ : P → Q with q∘η̃ ≃ η
  Homotopy unit_lift_homotopy;   ///< η − q∘η̃ = dh + hd
  Homotopy triangle_left;        ///< id_L − ε∘u_!(η̃) = dh + hd
  Homotopy triangle_right;       ///< q − u*(ε)∘η_Q = dh + hd
  /// Re-checks every chain map and homotopy.
  bool verify() const;
};

struct KanResult {
  Complex object;
  KanCertificate certificate;
};

/// Derived u_!, with unit/counit and triangle-identity witnesses.
KanResult lan(const DiagFunctor& u, const Complex& x);
/// Derived u_* = D ∘ (u°)_! ∘ D.
KanResult ran(const DiagFunctor& u, const Complex& x);
/// Same objects without certificates.
Complex lan_object(const DiagFunctor& u, const Complex& x);
Complex ran_object(const DiagFunctor& u, const Complex& x);

Complex hocolim(const Complex& x);
Complex holim(const Complex& x);

/// ε : u_!u*y → y on a projective model of u*y (derived counit).
ChainMap counit(const DiagFunctor& u, const Complex& y);
/// η : y → u_*u*y (derived unit of the right extension), by duality.
ChainMap right_unit(const DiagFunctor& u, const Complex& y);

// Base change ------------------------------------------------------------------------

struct BaseChange {
  ChainMap map;
  bool quasi_iso = false;
};
/// (u_*x)_y → holim_{I/y} x|_{I/y}.
BaseChange base_change(const DiagFunctor& u, ObjId y, const Complex& x);
/// hocolim_{y\I} x|_{y\I} → (u_!x)_y.
BaseChange base_change_left(const DiagFunctor& u, ObjId y, const Complex& x);

// Fibers of complexes over products --------------------------------------------------

/// x restricted to {i} × J.
Complex slice(const Complex& x, const FinCat& i_shape, const FinCat& j_shape, ObjId i);
/// For b : i → i' in I, the map x_{i'} → x_i induced on slices.
ChainMap slice_map(const Complex& x, const FinCat& i_shape, const FinCat& j_shape, ArrId b);
/// The arrow (b, id_j) of I × J.
ArrId product_arrow(const FinCat& i_shape, const FinCat& j_shape, ArrId b, ObjId j);

// Recollement ------------------------------------------------------------------------

/// A → X → C → ΣA, certified by a quasi-isomorphism between C and Cone(A → X).
struct TriangleCertificate {
  ChainMap first;       ///< A → X
  Cone cone;            ///< of `first`
  Complex third;        ///< C
  ChainMap comparison;  ///< C → cone, or cone → C
  bool comparison_into_cone = true;
  bool quasi_iso = false;
};

class Recollement {
 public:
  /// j open, i closed, images partition the objects.
  Recollement(DiagFunctor j, DiagFunctor i);
  const DiagFunctor& open() const { return j_; }
  const DiagFunctor& closed() const { return i_; }

  Complex j_lower_shriek(const Complex& x) const;  ///< j_!: extension by zero
  Complex j_upper_star(const Complex& x) const;    ///< j*
  Complex i_lower_star(const Complex& x) const;    ///< i_*: extension by zero
  Complex i_upper_star(const Complex& x) const;    ///< i*
  Complex i_lower_shriek(const Complex& x) const;  ///< i_!: derived left extension
  Complex j_lower_star(const Complex& x) const;    ///< j_*: derived right extension
  /// j^?X = j* Cone(ε_i : i_!i*X → X).
  Complex j_upper_query(const Complex& x) const;
  /// i^!X = i* Fib(η_j : X → j_*j*X).
  Complex i_upper_shriek(const Complex& x) const;

  /// ε_j : j_!j*X → X and η_i : X → i_*i*X (honest maps of complexes).
  ChainMap open_counit(const Complex& x) const;
  ChainMap closed_unit(const Complex& x) const;

  /// i_!i*X → X → j_!j^?X → Σ i_!i*X, with j_!j^?X → Cone(ε_i) a quasi-iso.
  TriangleCertificate first_triangle(const Complex& x) const;
  /// j_!j*X → X → i_*i*X → Σ j_!j*X, with Cone(ε_j) → i_*i*X a quasi-iso.
  TriangleCertificate second_triangle(const Complex& x) const;
  /// dim Hom(Σ i_!i*X, j_!j^?X); zero makes the connecting map unique.
  std::size_t connecting_ambiguity(const Complex& x) const;

 private:
  DiagFunctor j_;
  DiagFunctor i_;
};

/// The open j : I × {1} and closed i : I × {0} inclusions into I × Δ1.
Recollement arrow_recollement(const FinCat& i_shape);

struct Suspension {
  Complex object;
  ChainMap witness;  ///< suspension: object → Σx; loop: Ω x → object
};
/// j^? i_* x, with a quasi-isomorphism to shift(x, 1).
Suspension suspension_via_recollement(const Complex& x);
/// i^! j_! x, with a quasi-isomorphism from shift(x, −1).
Suspension loop_via_recollement(const Complex& x);

// Squares ----------------------------------------------------------------------------

/// A complex over □ × J (J = e for plain squares). Objects of □ are (r,c),
/// index 2r + c; (0,0) is the source corner and (1,1) the target.
class SquareObject {
 public:
  SquareObject(Complex x, FinCat base);
  /// A plain square over □.
  static SquareObject plain(const Complex& x_over_square);

  const Complex& complex() const { return x_; }
  const FinCat& base() const { return base_; }
  Complex corner(int r, int c) const;
  /// Restrictions to ⌐ × J and ⌙ × J.
  Complex cap() const;
  Complex cup() const;
  /// The map along a non-identity arrow of □ between corners:
  /// (r,c) → (r',c') gives corner(r',c') → corner(r,c).
  ChainMap edge(int r, int c, int r2, int c2) const;

 private:
  Complex x_;
  FinCat base_;
};

DiagFunctor with_base(const DiagFunctor& u, const FinCat& base);

/// The square X → A, X → B, A → D, B → D of complexes over J (α, β, γ, δ);
/// throws InvalidInput unless γα = δβ.
SquareObject square_from_maps(const ChainMap& alpha, const ChainMap& beta, const ChainMap& gamma,
                              const ChainMap& delta);

/// For f : X → Y, g : Y → Z and gf = dh + hd: the strictly commuting square
/// X → Y, X → Cone(id_X), Y → Z, Cone(id_X) → Z, (x, x') ↦ h x + g f x'.
/// Its lower-left corner is acyclic; it is bicartesian iff X → Y → Z is a triangle.
SquareObject triangle_square(const ChainMap& f, const ChainMap& g, const Homotopy& h);

struct SquareCheck {
  bool holds = false;
  ChainMap map;  ///< ε^F : (i_⌐)_!(i_⌐)*F → F, resp. η^F : F → (i_⌙)_*(i_⌙)*F
};
SquareCheck is_cocartesian(const SquareObject& s);
SquareCheck is_cartesian(const SquareObject& s);

/// Homotopy pushout H = Cone(X → A ⊕ B, x ↦ (αx, −βx)) of the cap of a
/// strictly commuting square with its comparison H → D.
struct HomotopyPushout {
  Cone cone;
  ChainMap comparison;  ///< H → corner (1,1)
};
HomotopyPushout homotopy_pushout(const SquareObject& s);

struct StandardTriangle {
  Complex polycartesian;   ///< P over twosquare × J
  Complex x, y, z;         ///< P at (0,0), (0,1), (1,1)
  Complex p12;             ///< P at (1,2)
  ChainMap f, g;           ///< x → y → z
  ChainMap to_p12;         ///< z → p12
  HomotopyPushout theta;   ///< outer square: p12 ≃ H → Σx
  std::vector<bool> subsquares_bicartesian;  ///< left, right, outer
  ProjectiveModel z_model;
  ChainMap delta;          ///< z_model → Σx (standard triangle)
  ChainMap cone_delta;     ///< z_model → Σx via Cone(f) → Σx
  ExtResult ext_basis;     ///< Hom(z, Σx) with representatives
  Matrix delta_class;      ///< coordinates of delta
  Matrix cone_class;       ///< coordinates of cone_delta
  bool classes_agree() const { return delta_class == cone_class; }
};
/// For a bicartesian square with acyclic (1,0) corner. Throws
/// PreconditionFailed (with the homology of the offending cone) otherwise.
StandardTriangle standard_triangle(const SquareObject& s);

}  // namespace derivkit
