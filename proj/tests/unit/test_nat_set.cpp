#include <gtest/gtest.h>

#include "taylor/nat_set.hpp"

namespace taylor {
namespace {

TEST(NatSet, FiniteIsSortedUnique) {
  const NatSet s = NatSet::finite({5, 1, 3, 1, 5});
  EXPECT_EQ(s.elements(), (std::vector<std::size_t>{1, 3, 5}));
  EXPECT_TRUE(s.contains(3));
  EXPECT_FALSE(s.contains(2));
}

TEST(NatSet, EmptyCofiniteIsAll) {
  EXPECT_EQ(NatSet::cofinite({}), NatSet::all());
  EXPECT_EQ(NatSet::cofinite({}).kind(), NatSet::Kind::All);
}

TEST(NatSet, DefaultIsEmpty) {
  EXPECT_TRUE(NatSet().is_empty());
  EXPECT_FALSE(NatSet().contains(0));
}

TEST(NatSet, CofiniteMembership) {
  const NatSet s = NatSet::cofinite({0, 4});
  EXPECT_FALSE(s.contains(0));
  EXPECT_TRUE(s.contains(1));
  EXPECT_FALSE(s.contains(4));
  EXPECT_TRUE(s.contains(1000000));
  EXPECT_EQ(s.members_up_to(5), (std::vector<std::size_t>{1, 2, 3, 5}));
}

TEST(NatSet, Range) {
  EXPECT_EQ(NatSet::range(2, 4).elements(), (std::vector<std::size_t>{2, 3, 4}));
}

TEST(NatSet, Algebra) {
  const NatSet a = NatSet::finite({1, 2, 3});
  const NatSet b = NatSet::cofinite({2, 7});
  EXPECT_EQ(set_union(a, b), NatSet::cofinite({7}));
  EXPECT_EQ(set_intersection(a, b), NatSet::finite({1, 3}));
  EXPECT_EQ(set_complement(a), NatSet::cofinite({1, 2, 3}));
  EXPECT_EQ(set_complement(NatSet::all()), NatSet::empty());
  EXPECT_EQ(set_complement(set_complement(b)), b);
  EXPECT_EQ(set_intersection(b, NatSet::cofinite({0})), NatSet::cofinite({0, 2, 7}));
}

}  // namespace
}  // namespace taylor
