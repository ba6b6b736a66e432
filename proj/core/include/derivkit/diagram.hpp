#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace derivkit {

using ObjId = std::size_t;
using ArrId = std::size_t;
inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

struct Arrow {
  ObjId source;
  ObjId target;
  std::string name;
};

/// A finite directed category with fully enumerated hom-sets.
///
/// Arrows are numbered 0..num_arrows()-1; the numbering fixes the order of
/// every hom-set (and so of every direct sum indexed by one). Composition is
/// stored as a dense table. The only endomorphisms are identities and the
/// relation "x has a non-identity arrow to y" is acyclic.
class FinCat {
 public:
  /// The empty category.
  FinCat();

  /// Builds a category from explicit data. `compose[g * n + f]` is g∘f for
  /// composable (f : x → y, g : y → z) and npos otherwise. With
  /// `check = true` the category axioms and directedness are verified
  /// exhaustively (throws InvalidInput).
  static FinCat from_table(std::string name, std::vector<std::string> objects,
                           std::vector<Arrow> arrows, std::vector<ArrId> identities,
                           std::vector<ArrId> compose, bool check = true);

  struct Generator {
    std::string name;
    std::string source;
    std::string target;
  };
  /// A path is written in composition order: {"b", "a"} means b∘a.
  using Path = std::vector<std::string>;
  struct Relation {
    Path lhs;
    Path rhs;
  };
  /// Paths of an acyclic quiver modulo the congruence generated by the
  /// relations. With `commutative` all parallel paths are identified
  /// (a poset given by covering relations).
  static FinCat from_quiver(std::string name, const std::vector<std::string>& objects,
                            const std::vector<Generator>& generators,
                            const std::vector<Relation>& relations, bool commutative = false);

  /// Poset on `objects` with an arrow x → y iff leq(x, y); leq must be a
  /// partial order.
  template <class Leq>
  static FinCat poset(std::string name, std::vector<std::string> objects, Leq leq);

  const std::string& name() const { return d_->name; }
  std::size_t num_objects() const { return d_->objects.size(); }
  std::size_t num_arrows() const { return d_->arrows.size(); }
  const std::vector<std::string>& objects() const { return d_->objects; }
  const std::string& object_name(ObjId x) const { return d_->objects.at(x); }
  std::optional<ObjId> find_object(const std::string& name) const;
  ObjId object(const std::string& name) const;  // throws InvalidInput

  const Arrow& arrow(ArrId a) const { return d_->arrows.at(a); }
  ArrId identity(ObjId x) const { return d_->identities.at(x); }
  bool is_identity(ArrId a) const { return d_->identities[d_->arrows[a].source] == a; }
  /// Arrows x → y in arrow order.
  const std::vector<ArrId>& hom(ObjId x, ObjId y) const {
    return d_->homs[x * num_objects() + y];
  }
  /// g∘f; throws InvalidInput when not composable.
  ArrId compose(ArrId g, ArrId f) const;
  ArrId compose_or_npos(ArrId g, ArrId f) const {
    return d_->compose[g * num_arrows() + f];
  }
  std::optional<ArrId> find_arrow(const std::string& name) const;

  /// Non-identity arrows that are not composites of two non-identity arrows.
  const std::vector<ArrId>& irreducible_arrows() const { return d_->irreducible; }
  /// Irreducible factors of a in application order (a = f_k ∘ … ∘ f_1 gives
  /// {f_1, …, f_k}); empty for identities.
  const std::vector<ArrId>& factorization(ArrId a) const { return d_->factorization.at(a); }
  /// Objects ordered so that every non-identity arrow x → y has y before x.
  const std::vector<ObjId>& topological_order() const { return d_->topo; }
  std::size_t max_chain_length() const { return d_->max_chain; }
  /// True when every hom-set has at most one element.
  bool is_thin() const { return d_->thin; }

  /// Exhaustive associativity/identity/directedness check (throws InvalidInput).
  void validate() const;

  /// Pointer equality or identical structure (names, arrows, composition).
  friend bool operator==(const FinCat& a, const FinCat& b);

  std::string summary() const;
  FinCat renamed(std::string name) const;
  /// Structural hash (ignores the category name).
  std::uint64_t fingerprint() const { return d_->fingerprint; }
  /// Address of the shared representation; equal keys imply equal categories.
  const void* identity_key() const { return d_.get(); }

 private:
  struct Data {
    std::string name;
    std::vector<std::string> objects;
    std::vector<Arrow> arrows;
    std::vector<ArrId> identities;
    std::vector<ArrId> compose;
    std::vector<std::vector<ArrId>> homs;
    std::vector<ArrId> irreducible;
    std::vector<std::vector<ArrId>> factorization;
    std::vector<ObjId> topo;
    std::size_t max_chain = 0;
    bool thin = true;
    std::uint64_t fingerprint = 0;
  };
  explicit FinCat(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  static std::shared_ptr<Data> finish(std::shared_ptr<Data> d);
  std::shared_ptr<const Data> d_;
};

// Standard shapes ------------------------------------------------------------

FinCat point_category();                 ///< e: one object "*"
FinCat empty_category();                 ///< ∅
FinCat delta(std::size_t n);             ///< {0 ← 1 ← … ← n}; Δ1 has the arrow a : 1 → 0
FinCat cube(std::size_t n);              ///< Δ1^n, objects "(b1,…,bn)"
FinCat square();                         ///< Δ1 × Δ1
FinCat lefthalfcap();                    ///< ⌐: (0,0), (0,1), (1,0)
FinCat righthalfcup();                   ///< ⌙: (0,1), (1,0), (1,1)
FinCat twosquare();                      ///< Δ1 × Δ2, objects (r,c)
FinCat squarearrow();                    ///< twosquare without (1,2)
FinCat product(const FinCat& i, const FinCat& j);
FinCat opposite(const FinCat& i);
FinCat disjoint_union(const FinCat& i, const FinCat& j);
/// Full subcategory on the listed objects (kept in the given order).
FinCat full_subcategory(const FinCat& i, const std::vector<ObjId>& objects,
                        std::string name = {});

/// Looks up a named shape: e, empty, delta<n>, square, lefthalfcap,
/// righthalfcup, squarearrow, twosquare, cube_<n>.
std::optional<FinCat> named_shape(const std::string& name);

// Functors --------------------------------------------------------------------

class DiagFunctor {
 public:
  DiagFunctor() = default;
  /// Validates functoriality exhaustively (throws InvalidInput).
  DiagFunctor(FinCat source, FinCat target, std::vector<ObjId> object_map,
              std::vector<ArrId> arrow_map, std::string name = {});
  /// For thin targets (or thin images) the arrow map is determined by the
  /// object map.
  static DiagFunctor from_object_map(FinCat source, FinCat target,
                                     std::vector<ObjId> object_map, std::string name = {});

  const FinCat& source() const { return source_; }
  const FinCat& target() const { return target_; }
  const std::string& name() const { return name_; }
  ObjId operator()(ObjId x) const { return objects_.at(x); }
  ArrId map_arrow(ArrId a) const { return arrows_.at(a); }
  const std::vector<ObjId>& object_map() const { return objects_; }
  const std::vector<ArrId>& arrow_map() const { return arrows_; }

  bool is_injective_on_objects() const;
  bool is_fully_faithful() const;

  friend bool operator==(const DiagFunctor& a, const DiagFunctor& b) {
    return a.source_ == b.source_ && a.target_ == b.target_ && a.objects_ == b.objects_ &&
           a.arrows_ == b.arrows_;
  }

 private:
  FinCat source_;
  FinCat target_;
  std::vector<ObjId> objects_;
  std::vector<ArrId> arrows_;
  std::string name_;
};

DiagFunctor identity_functor(const FinCat& i);
/// p_I : I → e.
DiagFunctor terminal_functor(const FinCat& i);
/// I → e → J, constant at y.
DiagFunctor constant_functor(const FinCat& i, const FinCat& j, ObjId y);
/// i_x : e → I.
DiagFunctor point_inclusion(const FinCat& i, ObjId x);
/// v ∘ u.
DiagFunctor compose(const DiagFunctor& v, const DiagFunctor& u);
DiagFunctor opposite(const DiagFunctor& u);
/// Inclusion of full_subcategory(i, objects).
DiagFunctor full_inclusion(const FinCat& i, const std::vector<ObjId>& objects,
                           std::string name = {});
/// u × v : I × J → I' × J'.
DiagFunctor product(const DiagFunctor& u, const DiagFunctor& v);
/// The projections I × J → I and I × J → J.
DiagFunctor projection_left(const FinCat& i, const FinCat& j);
DiagFunctor projection_right(const FinCat& i, const FinCat& j);
/// The canonical functor J → I × J, y ↦ (x, y).
DiagFunctor slice_inclusion(const FinCat& i, const FinCat& j, ObjId x);

bool is_open_immersion(const DiagFunctor& u);
bool is_closed_immersion(const DiagFunctor& u);

// Named inclusions around the square (used by the standard triangle).
DiagFunctor inclusion_lefthalfcap();   ///< i_⌐ : ⌐ → □
DiagFunctor inclusion_righthalfcup();  ///< i_⌙ : ⌙ → □
DiagFunctor inclusion_square_arrow();  ///< i_□ : □ → squarearrow
DiagFunctor inclusion_squarearrow();   ///< i_squarearrow : squarearrow → twosquare
DiagFunctor left_square();             ///< l_□ : □ → twosquare, (r,c) ↦ (r,c)
DiagFunctor right_square();            ///< r_□ : □ → twosquare, (r,c) ↦ (r,c+1)
DiagFunctor outer_square();            ///< g_□ : □ → twosquare, (r,c) ↦ (r,2c)
DiagFunctor cap_into_squarearrow();    ///< i_{⌐↪squarearrow}

// Natural transformations -----------------------------------------------------

class NatTrans {
 public:
  NatTrans() = default;
  /// Checks naturality (throws InvalidInput).
  NatTrans(DiagFunctor source, DiagFunctor target, std::vector<ArrId> components);
  const DiagFunctor& source() const { return source_; }
  const DiagFunctor& target() const { return target_; }
  ArrId component(ObjId x) const { return components_.at(x); }
  const std::vector<ArrId>& components() const { return components_; }

 private:
  DiagFunctor source_;
  DiagFunctor target_;
  std::vector<ArrId> components_;
};

NatTrans identity_transformation(const DiagFunctor& u);
/// β ∘ α.
NatTrans vertical_compose(const NatTrans& beta, const NatTrans& alpha);
/// w ⋆ α : w∘u ⇒ w∘v.
NatTrans whisker_left(const DiagFunctor& w, const NatTrans& alpha);
/// α ⋆ w : u∘w ⇒ v∘w.
NatTrans whisker_right(const NatTrans& alpha, const DiagFunctor& w);

/// I/y: objects (a, f : u(a) → y), the forgetful functor and the 2-cell
/// u∘j ⇒ const_y with components f.
struct CommaCategory {
  FinCat category;
  DiagFunctor forget;
  NatTrans cell;
  /// For each comma object: the source object a and the arrow f.
  std::vector<std::pair<ObjId, ArrId>> entries;
};
CommaCategory comma_over(const DiagFunctor& u, ObjId y);
/// y\I: objects (a, f : y → u(a)); the 2-cell const_y ⇒ u∘j.
CommaCategory comma_under(const DiagFunctor& u, ObjId y);

// ---------------------------------------------------------------------------

template <class Leq>
FinCat FinCat::poset(std::string name, std::vector<std::string> objects, Leq leq) {
  const std::size_t n = objects.size();
  std::vector<Arrow> arrows;
  std::vector<ArrId> ids(n, npos);
  std::vector<ArrId> by_pair(n * n, npos);
  for (ObjId x = 0; x < n; ++x)
    for (ObjId y = 0; y < n; ++y)
      if (x == y || leq(x, y)) {
        by_pair[x * n + y] = arrows.size();
        if (x == y) ids[x] = arrows.size();
        arrows.push_back({x, y,
                          x == y ? "id_" + objects[x] : objects[x] + "->" + objects[y]});
      }
  std::vector<ArrId> comp(arrows.size() * arrows.size(), npos);
  for (ArrId g = 0; g < arrows.size(); ++g)
    for (ArrId f = 0; f < arrows.size(); ++f)
      if (arrows[f].target == arrows[g].source)
        comp[g * arrows.size() + f] = by_pair[arrows[f].source * n + arrows[g].target];
  return from_table(std::move(name), std::move(objects), std::move(arrows), std::move(ids),
                    std::move(comp), true);
}

}  // namespace derivkit
