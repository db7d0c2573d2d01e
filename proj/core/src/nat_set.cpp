#include "taylor/nat_set.hpp"

#include <algorithm>
#include <iterator>
#include <sstream>

namespace taylor {

namespace {

std::vector<std::size_t> normalized(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<std::size_t> merge_union(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::size_t> merge_intersection(const std::vector<std::size_t>& a,
                                            const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::size_t> merge_difference(const std::vector<std::size_t>& a,
                                          const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

NatSet::NatSet(Kind kind, std::vector<std::size_t> elements) : kind_(kind), elements_(std::move(elements)) {}

NatSet NatSet::finite(std::vector<std::size_t> elements) { return {Kind::Finite, normalized(std::move(elements))}; }

NatSet NatSet::finite(std::initializer_list<std::size_t> elements) {
  return finite(std::vector<std::size_t>(elements));
}

NatSet NatSet::cofinite(std::vector<std::size_t> excluded) {
  auto e = normalized(std::move(excluded));
  if (e.empty()) {
    return all();
  }
  return {Kind::CoFinite, std::move(e)};
}

NatSet NatSet::all() { return {Kind::All, {}}; }

NatSet NatSet::range(std::size_t first, std::size_t last) {
  std::vector<std::size_t> v;
  if (last >= first) {
    v.reserve(last - first + 1);
    for (std::size_t n = first; n <= last; ++n) {
      v.push_back(n);
    }
  }
  return {Kind::Finite, std::move(v)};
}

bool NatSet::contains(std::size_t n) const {
  switch (kind_) {
    case Kind::All:
      return true;
    case Kind::Finite:
      return std::binary_search(elements_.begin(), elements_.end(), n);
    case Kind::CoFinite:
      return !std::binary_search(elements_.begin(), elements_.end(), n);
  }
  return false;
}

std::vector<std::size_t> NatSet::members_up_to(std::size_t N) const {
  std::vector<std::size_t> out;
  if (kind_ == Kind::Finite) {
    auto end = std::upper_bound(elements_.begin(), elements_.end(), N);
    out.assign(elements_.begin(), end);
    return out;
  }
  out.reserve(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    if (contains(n)) {
      out.push_back(n);
    }
  }
  return out;
}

NatSet set_union(const NatSet& a, const NatSet& b) {
  using K = NatSet::Kind;
  if (a.kind() == K::All || b.kind() == K::All) {
    return NatSet::all();
  }
  if (a.kind() == K::Finite && b.kind() == K::Finite) {
    return NatSet::finite(merge_union(a.elements(), b.elements()));
  }
  if (a.kind() == K::CoFinite && b.kind() == K::CoFinite) {
    return NatSet::cofinite(merge_intersection(a.elements(), b.elements()));
  }
  const NatSet& co = a.kind() == K::CoFinite ? a : b;
  const NatSet& fin = a.kind() == K::CoFinite ? b : a;
  return NatSet::cofinite(merge_difference(co.elements(), fin.elements()));
}

NatSet set_complement(const NatSet& a) {
  switch (a.kind()) {
    case NatSet::Kind::All:
      return NatSet::empty();
    case NatSet::Kind::Finite:
      return NatSet::cofinite(a.elements());
    case NatSet::Kind::CoFinite:
      return NatSet::finite(a.elements());
  }
  return NatSet::empty();
}

NatSet set_intersection(const NatSet& a, const NatSet& b) {
  return set_complement(set_union(set_complement(a), set_complement(b)));
}

std::string to_string(const NatSet& s) {
  std::ostringstream os;
  auto list = [&os](const std::vector<std::size_t>& v) {
    os << '{';
    for (std::size_t i = 0; i < v.size(); ++i) {
      os << (i ? "," : "") << v[i];
    }
    os << '}';
  };
  switch (s.kind()) {
    case NatSet::Kind::All:
      os << "N";
      break;
    case NatSet::Kind::Finite:
      list(s.elements());
      break;
    case NatSet::Kind::CoFinite:
      os << "N\\";
      list(s.elements());
      break;
  }
  return os.str();
}

}  // namespace taylor
