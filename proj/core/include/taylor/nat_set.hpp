#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace taylor {

/// A Borel subset of the natural numbers in one of three closed forms:
/// a finite list, the complement of a finite list, or all of N.
class NatSet {
 public:
  enum class Kind { Finite, CoFinite, All };

  /// The empty set.
  NatSet() = default;

  static NatSet finite(std::vector<std::size_t> elements);
  static NatSet finite(std::initializer_list<std::size_t> elements);
  /// Normalized to All when `excluded` is empty.
  static NatSet cofinite(std::vector<std::size_t> excluded);
  static NatSet all();
  static NatSet empty() { return {}; }
  /// {first, ..., last}
  static NatSet range(std::size_t first, std::size_t last);

  Kind kind() const noexcept { return kind_; }
  bool is_finite() const noexcept { return kind_ == Kind::Finite; }
  bool is_empty() const noexcept { return kind_ == Kind::Finite && elements_.empty(); }

  /// Sorted, unique. Members for Finite, excluded points for CoFinite.
  const std::vector<std::size_t>& elements() const noexcept { return elements_; }

  bool contains(std::size_t n) const;

  /// Members of the set that are <= N, in increasing order.
  std::vector<std::size_t> members_up_to(std::size_t N) const;

  friend bool operator==(const NatSet&, const NatSet&) = default;

 private:
  NatSet(Kind kind, std::vector<std::size_t> elements);

  Kind kind_ = Kind::Finite;
  std::vector<std::size_t> elements_;
};

NatSet set_union(const NatSet& a, const NatSet& b);
NatSet set_intersection(const NatSet& a, const NatSet& b);
NatSet set_complement(const NatSet& a);
std::string to_string(const NatSet& s);

}  // namespace taylor
