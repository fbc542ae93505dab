#pragma once

#include "cpt/linalg.hpp"

#include <initializer_list>
#include <string>
#include <vector>

namespace cpt {

enum class WireKind { Classical, Quantum };

/// One wire: a finite set of `size` elements, or a Hilbert space of dimension `size`.
struct Factor {
  WireKind kind;
  Index size;

  friend bool operator==(const Factor&, const Factor&) = default;
};

inline Factor classical(Index size) { return {WireKind::Classical, size}; }
inline Factor quantum(Index dim) { return {WireKind::Quantum, dim}; }

/// An ordered list of wire factors. The empty list is the monoidal unit.
///
/// Processes store classical wires as component indices and quantum wires as
/// one joint Hilbert space, so two types are equal when their classical sizes
/// agree in order and their quantum dimensions agree in order. Size-1 factors
/// are the unit and are ignored; the relative order of a classical and a
/// quantum factor is a symmetry isomorphism that the representation absorbs.
class SystemType {
 public:
  SystemType() = default;
  SystemType(std::initializer_list<Factor> factors);
  explicit SystemType(std::vector<Factor> factors);

  static SystemType classical_only(std::span<const Index> sizes);
  static SystemType quantum_only(std::span<const Index> dims);

  const std::vector<Factor>& factors() const { return factors_; }
  std::vector<Index> classical_sizes() const;
  std::vector<Index> quantum_dims() const;
  Index classical_size() const;
  Index quantum_dim() const;
  bool is_classical() const { return quantum_dim() == 1; }
  bool is_unit() const { return classical_size() == 1 && quantum_dim() == 1; }

  std::string to_string() const;

  /// Concatenation of factor lists (the monoidal product on objects).
  friend SystemType operator*(const SystemType& a, const SystemType& b);
  friend bool operator==(const SystemType& a, const SystemType& b);

 private:
  std::vector<Factor> factors_;
};

}  // namespace cpt
