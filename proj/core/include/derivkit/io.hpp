#pragma once

#include <optional>
#include <string>
#include <variant>

#include "derivkit/coherence.hpp"

namespace derivkit {

// One JSON document per value, with a top-level "kind" among diagram, functor,
// presheaf, complex, incoherent. Matrices are row-major arrays of scalar
// strings ("num/den" over Q, decimal residues over F_p); every file that holds
// matrices declares its field.
//
// A diagram is written as one of
//   {"shape": "delta1"}                                  a named shape
//   {"product": [D1, D2]}                                I × J
//   {"objects": [...], "generators": [{name, source, target}],
//    "relations": [{"lhs": [...], "rhs": [...]}], "commutative": false}
//   {"objects": [...], "arrows": [{name, source, target}], "composition": [[g, f, g∘f]]}
// The last form (full arrow list in numbering order, identities included) is
// what the writers emit unless the category is a named shape.

/// Errors carry the file name and a JSON pointer or line number.
using Value = std::variant<FinCat, DiagFunctor, Presheaf, Complex, IncoherentDiagram>;

struct Loaded {
  std::string kind;
  std::optional<Field> field;  ///< absent for diagrams and functors
  Value value;
};

/// Parses a document; `origin` names it in error messages. Throws InvalidInput.
Loaded parse_document(const std::string& text, const std::string& origin = "<input>");
Loaded load_file(const std::string& path);

FinCat load_diagram(const std::string& path);
DiagFunctor load_functor(const std::string& path);
/// A presheaf file also loads as a complex (a stalk in degree 0).
Presheaf load_presheaf(const std::string& path);
Complex load_complex(const std::string& path);
IncoherentDiagram load_incoherent(const std::string& path);

std::string to_json(const FinCat& c);
std::string to_json(const DiagFunctor& u);
std::string to_json(const Presheaf& f);
std::string to_json(const Complex& x);
std::string to_json(const IncoherentDiagram& d);
std::string to_json(const Value& v);

/// Writes to_json(v) followed by a newline.
void save_file(const std::string& path, const Value& v);

}  // namespace derivkit
