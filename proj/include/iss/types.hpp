#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace iss {

/// Dense integer handle into one of the model's interned catalogs.
template <class Tag>
struct Index {
  std::uint32_t value = 0;

  constexpr Index() = default;
  constexpr explicit Index(std::uint32_t v) : value(v) {}
  constexpr explicit Index(std::size_t v) : value(static_cast<std::uint32_t>(v)) {}
  constexpr explicit Index(int v) : value(static_cast<std::uint32_t>(v)) {}

  constexpr std::size_t index() const { return value; }
  constexpr auto operator<=>(const Index&) const = default;
};

using AgentId = Index<struct AgentTag>;
using StateId = Index<struct StateTag>;
using ActionId = Index<struct ActionTag>;
using ResourceId = Index<struct ResourceTag>;
using MonitorStateId = Index<struct MonitorStateTag>;

enum class ErrorCode {
  UnknownState,
  UnknownAgent,
  UnknownAction,
  IllegalJointAction,
  IllegalAction,
  IllegalTriple,
  IncompleteProfile,
  AlphabetMismatch,
  InvalidTrace,
  InvalidLasso,
  InvalidPolicy,
  NormUnenforceable,
  Deadlock,
  BudgetDimensionMismatch,
  NegativeQuantity,
  ValidationFailed,
  QuerySyntax,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

/// Non-negative integer quantities, one per resource type.
class ResourceVector {
public:
  ResourceVector() = default;
  explicit ResourceVector(std::size_t dims) : q_(dims, 0) {}
  ResourceVector(std::initializer_list<std::int64_t> values);
  explicit ResourceVector(std::vector<std::int64_t> values);

  static ResourceVector zero(std::size_t dims) { return ResourceVector(dims); }

  std::size_t size() const { return q_.size(); }
  std::int64_t operator[](std::size_t i) const { return q_[i]; }
  const std::vector<std::int64_t>& values() const { return q_; }

  bool is_zero() const;
  /// Componentwise <=. Dimensions must agree.
  bool fits_within(const ResourceVector& bound) const;
  /// Index of the first component exceeding `bound`, if any.
  std::optional<std::size_t> first_excess(const ResourceVector& bound) const;

  ResourceVector& operator+=(const ResourceVector& other);
  friend ResourceVector operator+(ResourceVector a, const ResourceVector& b) { return a += b; }
  /// this - other; requires other.fits_within(*this).
  ResourceVector minus(const ResourceVector& other) const;
  ResourceVector with_added(std::size_t i, std::int64_t amount) const;

  /// Product of (entry + 1): the number of vectors componentwise below this one.
  std::uint64_t lattice_size() const;

  std::string str() const;

  bool operator==(const ResourceVector&) const = default;
  auto operator<=>(const ResourceVector&) const = default;

private:
  std::vector<std::int64_t> q_;
};

/// Location inside a source text. Lines and columns are 1-based.
struct SourceSpan {
  std::string file;
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t length = 0;
  std::size_t offset = 0;
};

/// A value with the place it was written. Equality ignores the location so
/// that documents compare structurally.
template <class T>
struct Spanned {
  T value{};
  SourceSpan span{};

  bool operator==(const Spanned& other) const { return value == other.value; }
};

}  // namespace iss

template <class Tag>
struct std::hash<iss::Index<Tag>> {
  std::size_t operator()(const iss::Index<Tag>& i) const noexcept { return i.value; }
};
