#include "cpt/system_type.hpp"

#include "cpt/errors.hpp"

#include <sstream>

namespace cpt {

namespace {

void check_factors(const std::vector<Factor>& factors) {
  for (const auto& f : factors)
    if (f.size < 1) throw InvariantViolation("SystemType: factor sizes must be >= 1");
}

std::vector<Index> sizes_of(const std::vector<Factor>& factors, WireKind kind) {
  std::vector<Index> out;
  for (const auto& f : factors)
    if (f.kind == kind && f.size != 1) out.push_back(f.size);
  return out;
}

}  // namespace

SystemType::SystemType(std::initializer_list<Factor> factors) : factors_(factors) {
  check_factors(factors_);
}

SystemType::SystemType(std::vector<Factor> factors) : factors_(std::move(factors)) {
  check_factors(factors_);
}

SystemType SystemType::classical_only(std::span<const Index> sizes) {
  std::vector<Factor> f;
  for (Index s : sizes) f.push_back(classical(s));
  return SystemType(std::move(f));
}

SystemType SystemType::quantum_only(std::span<const Index> dims) {
  std::vector<Factor> f;
  for (Index d : dims) f.push_back(quantum(d));
  return SystemType(std::move(f));
}

std::vector<Index> SystemType::classical_sizes() const {
  return sizes_of(factors_, WireKind::Classical);
}

std::vector<Index> SystemType::quantum_dims() const {
  return sizes_of(factors_, WireKind::Quantum);
}

Index SystemType::classical_size() const {
  auto s = classical_sizes();
  return product_of(s);
}

Index SystemType::quantum_dim() const {
  auto d = quantum_dims();
  return product_of(d);
}

std::string SystemType::to_string() const {
  if (factors_.empty()) return "I";
  std::ostringstream os;
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    if (k) os << " x ";
    os << (factors_[k].kind == WireKind::Classical ? "C" : "Q") << factors_[k].size;
  }
  return os.str();
}

SystemType operator*(const SystemType& a, const SystemType& b) {
  std::vector<Factor> f = a.factors_;
  f.insert(f.end(), b.factors_.begin(), b.factors_.end());
  return SystemType(std::move(f));
}

bool operator==(const SystemType& a, const SystemType& b) {
  return a.classical_sizes() == b.classical_sizes() &&
         a.quantum_dims() == b.quantum_dims();
}

}  // namespace cpt
