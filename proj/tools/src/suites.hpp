#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "derivkit/io.hpp"

namespace derivkit::cli {

struct CheckCount {
  std::string name;
  std::size_t passed = 0;
  std::size_t failed = 0;
};

struct Counterexample {
  std::string label;
  Value value;
};

struct CaseFailure {
  std::size_t case_index = 0;
  std::string check;
  std::string message;
  std::vector<Counterexample> inputs;  ///< enough to replay the case standalone
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::size_t cases = 0;
  Field field = Field::f2();
  std::vector<CheckCount> checks;  ///< in first-seen order
  std::vector<CaseFailure> failures;
  double seconds = 0;
  bool ok() const { return failures.empty(); }
  const CheckCount* find(const std::string& check) const;
};

struct SuiteOptions {
  std::uint64_t seed = 0;
  std::size_t cases = 20;
  Field field = Field::f2();
  unsigned threads = 0;  ///< 0: hardware concurrency
};

const std::vector<std::string>& suite_names();
/// Runs `cases` instances generated from (seed, case index); results are
/// merged in case order whatever the thread count. Throws InvalidInput for an
/// unknown suite.
SuiteReport run_suite(const std::string& name, const SuiteOptions& opt);

/// A chain map f : X → Y as a diagram over Δ1 (X at 0, Y at 1), so that it
/// can be written as an "incoherent" document.
IncoherentDiagram as_arrow(const ChainMap& f);

/// Writes every counterexample as <dir>/<suite>-case<i>-<label>.json and
/// returns the paths.
std::vector<std::string> write_counterexamples(const SuiteReport& r, const std::string& dir);

}  // namespace derivkit::cli
