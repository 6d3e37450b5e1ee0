#include "iss/types.hpp"

#include <sstream>

namespace iss {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownState: return "UnknownState";
    case ErrorCode::UnknownAgent: return "UnknownAgent";
    case ErrorCode::UnknownAction: return "UnknownAction";
    case ErrorCode::IllegalJointAction: return "IllegalJointAction";
    case ErrorCode::IllegalAction: return "IllegalAction";
    case ErrorCode::IllegalTriple: return "IllegalTriple";
    case ErrorCode::IncompleteProfile: return "IncompleteProfile";
    case ErrorCode::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::InvalidTrace: return "InvalidTrace";
    case ErrorCode::InvalidLasso: return "InvalidLasso";
    case ErrorCode::InvalidPolicy: return "InvalidPolicy";
    case ErrorCode::NormUnenforceable: return "NormUnenforceable";
    case ErrorCode::Deadlock: return "Deadlock";
    case ErrorCode::BudgetDimensionMismatch: return "BudgetDimensionMismatch";
    case ErrorCode::NegativeQuantity: return "NegativeQuantity";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::QuerySyntax: return "QuerySyntax";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

ResourceVector::ResourceVector(std::initializer_list<std::int64_t> values)
    : ResourceVector(std::vector<std::int64_t>(values)) {}

ResourceVector::ResourceVector(std::vector<std::int64_t> values) : q_(std::move(values)) {
  for (auto v : q_)
    if (v < 0) throw Error(ErrorCode::NegativeQuantity, "resource quantities must be non-negative");
}

bool ResourceVector::is_zero() const {
  for (auto v : q_)
    if (v != 0) return false;
  return true;
}

bool ResourceVector::fits_within(const ResourceVector& bound) const {
  return !first_excess(bound).has_value();
}

std::optional<std::size_t> ResourceVector::first_excess(const ResourceVector& bound) const {
  if (bound.size() != size())
    throw Error(ErrorCode::BudgetDimensionMismatch, "resource vectors of different length");
  for (std::size_t i = 0; i < q_.size(); ++i)
    if (q_[i] > bound.q_[i]) return i;
  return std::nullopt;
}

ResourceVector& ResourceVector::operator+=(const ResourceVector& other) {
  if (other.size() != size())
    throw Error(ErrorCode::BudgetDimensionMismatch, "resource vectors of different length");
  for (std::size_t i = 0; i < q_.size(); ++i) q_[i] += other.q_[i];
  return *this;
}

ResourceVector ResourceVector::minus(const ResourceVector& other) const {
  if (!other.fits_within(*this))
    throw Error(ErrorCode::NegativeQuantity, "subtraction would make a resource negative");
  ResourceVector out = *this;
  for (std::size_t i = 0; i < q_.size(); ++i) out.q_[i] -= other.q_[i];
  return out;
}

ResourceVector ResourceVector::with_added(std::size_t i, std::int64_t amount) const {
  ResourceVector out = *this;
  out.q_.at(i) += amount;
  if (out.q_[i] < 0) throw Error(ErrorCode::NegativeQuantity, "resource quantity would become negative");
  return out;
}

std::uint64_t ResourceVector::lattice_size() const {
  std::uint64_t n = 1;
  for (auto v : q_) n *= static_cast<std::uint64_t>(v) + 1;
  return n;
}

std::string ResourceVector::str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < q_.size(); ++i) {
    if (i) os << ',';
    os << q_[i];
  }
  os << ']';
  return os.str();
}

}  // namespace iss
