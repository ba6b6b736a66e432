#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include "derivkit/coherence.hpp"

namespace derivkit {

/// Deterministic per (seed, case index).
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t case_index = 0);
  std::uint64_t below(std::uint64_t n);  ///< uniform in [0, n)
  bool coin(double p = 0.5);
  mpq_class scalar(const Field& k);      ///< uniform over F_p; small integers over Q
  Matrix matrix(const Field& k, std::size_t rows, std::size_t cols);

 private:
  std::mt19937_64 eng_;
};

/// A finite directed category on 1..max_objects objects: covering arrows
/// between ordered pairs with probability 1/2; mostly posets, sometimes free
/// path categories (so parallel arrows occur).
FinCat random_category(Rng& r, std::size_t max_objects = 5);

/// Fiber dims in [0, max_dim]; arrow actions chosen object by object along the
/// topological order as random maps out of the latching space, which makes
/// the result functorial by construction.
Presheaf random_presheaf(Rng& r, const Field& k, const FinCat& c, std::size_t max_dim = 3);
/// A uniformly random element of hom(f, g).
PresheafMap random_hom(Rng& r, const Presheaf& f, const Presheaf& g);
/// 1–3 nonzero-capable terms inside [lo, hi]; d^{p+1} factors through coker d^p.
Complex random_complex(Rng& r, const Field& k, const FinCat& c, std::size_t max_dim = 3, int lo = -2, int hi = 2);
/// A random chain map x → y built from random homs that commute with d
/// (solved degree by degree; may be zero).
ChainMap random_chain_map(Rng& r, const Complex& x, const Complex& y);

/// A functor from a small catalog (identity, point and full inclusions, p_I,
/// constants, projections) with randomly chosen shapes.
DiagFunctor random_functor(Rng& r, std::size_t max_objects = 4);

struct RandomConflation {
  PresheafMap inflation;  ///< A ↣ B
  PresheafMap deflation;  ///< B ↠ C
};
/// B random, A the image of a random map into B, C the cokernel.
RandomConflation random_conflation(Rng& r, const Field& k, const FinCat& c, std::size_t max_dim = 3);

/// A random presheaf over □ × base, as a square of stalks.
SquareObject random_square(Rng& r, const Field& k, const FinCat& base, std::size_t max_dim = 2);
/// A bicartesian square with acyclic (1,0) corner: either a conflation or
/// X → Y → Cone(f) for a random chain map f.
SquareObject random_bicartesian_square(Rng& r, const Field& k, const FinCat& base, std::size_t max_dim = 2);

/// dia of a random honest stalk diagram, with objects replaced by projective
/// models, arrows by lifts perturbed by random nullhomotopic maps, and
/// composite witnesses solved for; Toda holds since homology sits in one degree.
IncoherentDiagram random_toda_diagram(Rng& r, const Field& k, const FinCat& index, const FinCat& base,
                                      std::size_t max_dim = 2);

}  // namespace derivkit
