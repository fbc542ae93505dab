#pragma once

#include "cpt/errors.hpp"
#include "cpt/linalg.hpp"

#include <string>
#include <vector>

namespace cpt {

/// A non-negative combination of processes sharing source and target.
template <typename Process>
class LinearCombination {
 public:
  struct Term {
    Real coefficient;
    Process process;
  };

  LinearCombination() = default;
  explicit LinearCombination(std::vector<Term> terms) : terms_(std::move(terms)) {
    for (const auto& t : terms_) {
      if (!(t.coefficient >= 0))
        throw InvariantViolation("LinearCombination: coefficients must be non-negative");
      if (!(t.process.source() == terms_.front().process.source()) ||
          !(t.process.target() == terms_.front().process.target()))
        throw DimensionMismatch("LinearCombination: terms disagree on type, " +
                                terms_.front().process.source().to_string() + " -> " +
                                terms_.front().process.target().to_string() + " vs " +
                                t.process.source().to_string() + " -> " +
                                t.process.target().to_string());
    }
  }

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

 private:
  std::vector<Term> terms_;
};

}  // namespace cpt
