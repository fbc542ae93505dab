#pragma once

// The capabilities shared by every process model, and the algorithms written
// once against them.

#include "cpt/classical.hpp"
#include "cpt/linear_combination.hpp"
#include "cpt/quantum.hpp"
#include "cpt/system_type.hpp"

#include <concepts>
#include <optional>

namespace cpt {

template <typename P>
concept ProcessModel = requires(const P& f, const P& g, const SystemType& s, Real w, Real tol) {
  { f.source() } -> std::convertible_to<SystemType>;
  { f.target() } -> std::convertible_to<SystemType>;
  { P::identity(s) } -> std::same_as<P>;
  { P::discard(s) } -> std::same_as<P>;
  { compose(f, g) } -> std::same_as<P>;
  { tensor(f, g) } -> std::same_as<P>;
  { dagger(f) } -> std::same_as<P>;
  { f + g } -> std::same_as<P>;
  { w * f } -> std::same_as<P>;
  { max_norm_distance(f, g) } -> std::convertible_to<Real>;
  { is_normalised(f, tol) } -> std::same_as<bool>;
  { is_pure(f, tol) } -> std::same_as<bool>;
  { impurity_witness(f) } -> std::same_as<std::optional<LinearCombination<P>>>;
};

static_assert(ProcessModel<ClassicalProcess<Real>>);
static_assert(ProcessModel<HybridProcess>);

template <ProcessModel P>
P identity(const SystemType& s) {
  return P::identity(s);
}

template <ProcessModel P>
P discard(const SystemType& s) {
  return P::discard(s);
}

/// The reverse of the discarding effect: all-ones vector classically, the
/// identity (unnormalised maximally mixed state) on quantum systems.
template <ProcessModel P>
P reversed_discard(const SystemType& s) {
  return dagger(P::discard(s));
}

/// Its time-reverse is normalised.
template <ProcessModel P>
bool is_unital(const P& f, Real tol) {
  return is_normalised(dagger(f), tol);
}

template <ProcessModel P>
bool approx_equal(const P& f, const P& g, Real tol = kDefaultTolerance) {
  return f.source() == g.source() && f.target() == g.target() &&
         max_norm_distance(f, g) <= tol;
}

template <ProcessModel P>
P linear_combine(const LinearCombination<P>& c) {
  if (c.empty()) throw InvariantViolation("linear_combine: empty combination");
  const auto& terms = c.terms();
  P sum = terms.front().coefficient * terms.front().process;
  for (std::size_t k = 1; k < terms.size(); ++k)
    sum = sum + terms[k].coefficient * terms[k].process;
  return sum;
}

}  // namespace cpt
