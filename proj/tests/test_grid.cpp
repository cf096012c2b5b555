// Copyright 2026 The hetsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetsim/grid.hpp"

#include <algorithm>
#include <set>

#include "doctest.h"

using namespace hetsim;
using namespace hetsim::grid;

namespace {

// Enumeration oracle: list coordinates in the declared fixed order (tp
// fastest, then cp, then dp, then pp) and index into the list.
std::vector<GridCoord> enumerate_coords(const ModuleLayout& l) {
  std::vector<GridCoord> out;
  for (int p = 0; p < l.pp; ++p)
    for (int d = 0; d < l.dp; ++d)
      for (int c = 0; c < l.cp; ++c)
        for (int t = 0; t < l.tp; ++t) out.push_back(GridCoord{t, c, p, d});
  return out;
}

}  // namespace

TEST_CASE("coord_of_rank singleton grid") {
  ModuleLayout l{"m", 1, 1, 1, 1, 0};
  CHECK(coord_of_rank(l, 0) == GridCoord{0, 0, 0, 0});
}

TEST_CASE("coord_of_rank matches exhaustive enumeration") {
  ModuleLayout l{"m", 2, 1, 2, 2, 0};
  auto coords = enumerate_coords(l);
  REQUIRE(coords.size() == 8);
  CHECK(coord_of_rank(l, 5) == coords[5]);
  for (int r = 0; r < 8; ++r) CHECK(coord_of_rank(l, r) == coords[r]);
}

TEST_CASE("coord_of_rank rejects ranks outside the module") {
  ModuleLayout l{"enc", 4, 1, 1, 2, 8};
  CHECK_THROWS_WITH_AS(coord_of_rank(l, 7), doctest::Contains("outside module"),
                       SimError);
  try {
    coord_of_rank(l, 7);
  } catch (const SimError& e) {
    CHECK(e.code() == ErrorCode::RankOutOfModule);
  }
  CHECK_NOTHROW(coord_of_rank(l, 8));
  CHECK_NOTHROW(coord_of_rank(l, 15));
  CHECK_THROWS_AS(coord_of_rank(l, 16), SimError);
}

TEST_CASE("rank_of_coord is a bijection with no collisions") {
  ModuleLayout l{"m", 2, 1, 1, 4, 0};
  std::set<int> seen;
  for (const auto& c : enumerate_coords(l)) seen.insert(rank_of_coord(l, c));
  CHECK(seen.size() == 8);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 7);
}

TEST_CASE("rank_of_coord singleton returns the offset") {
  ModuleLayout l{"m", 1, 1, 1, 1, 13};
  CHECK(rank_of_coord(l, GridCoord{0, 0, 0, 0}) == 13);
}

TEST_CASE("rank_of_coord rejects out-of-bounds coordinates") {
  ModuleLayout l{"m", 2, 1, 1, 1, 0};
  try {
    rank_of_coord(l, GridCoord{2, 0, 0, 0});
    FAIL("expected throw");
  } catch (const SimError& e) {
    CHECK(e.code() == ErrorCode::CoordOutOfBounds);
  }
}

TEST_CASE("rank/coord mutual inverse over assorted layouts up to world 64") {
  std::vector<ModuleLayout> layouts = {
      {"a", 1, 1, 1, 1, 0},  {"b", 2, 2, 2, 2, 0},  {"c", 4, 1, 2, 8, 0},
      {"d", 2, 4, 1, 4, 16}, {"e", 8, 1, 1, 8, 3},  {"f", 1, 2, 4, 2, 5},
      {"g", 4, 2, 2, 4, 0},  {"h", 1, 1, 8, 8, 0},
  };
  for (const auto& l : layouts) {
    REQUIRE(l.world_size() <= 64);
    for (int r = l.rank_begin(); r < l.rank_end(); ++r)
      CHECK(rank_of_coord(l, coord_of_rank(l, r)) == r);
    for (const auto& c : enumerate_coords(l)) {
      auto back = coord_of_rank(l, rank_of_coord(l, c));
      CHECK(back == c);
    }
  }
}

TEST_CASE("partition_batch identity and equal split") {
  auto one = partition_batch(8, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == BatchInterval{0, 8});

  auto four = partition_batch(8, 4);
  REQUIRE(four.size() == 4);
  CHECK(four[0] == BatchInterval{0, 2});
  CHECK(four[1] == BatchInterval{2, 2});
  CHECK(four[2] == BatchInterval{4, 2});
  CHECK(four[3] == BatchInterval{6, 2});
}

TEST_CASE("partition_batch assigns sample j to shard floor(j*dp/B)") {
  for (int B : {8, 12, 24, 64}) {
    for (int dp : {1, 2, 4, 8}) {
      if (B % dp != 0) continue;
      auto parts = partition_batch(B, dp);
      int covered = 0;
      for (int j = 0; j < B; ++j) {
        int shard = static_cast<int>(static_cast<long>(j) * dp / B);
        CHECK(j >= parts[shard].start);
        CHECK(j < parts[shard].end());
      }
      for (size_t i = 0; i < parts.size(); ++i) {
        covered += parts[i].length;
        if (i > 0) CHECK(parts[i].start == parts[i - 1].end());
      }
      CHECK(covered == B);
    }
  }
}

TEST_CASE("partition_batch rejects indivisible batch") {
  try {
    partition_batch(10, 4);
    FAIL("expected throw");
  } catch (const SimError& e) {
    CHECK(e.code() == ErrorCode::IndivisibleBatch);
  }
}

TEST_CASE("leader_rank is canonical tp=0 cp=0 and unique per dp shard") {
  ModuleLayout l{"m", 2, 2, 1, 2, 0};
  auto coords = enumerate_coords(l);
  for (int d = 0; d < l.dp; ++d) {
    int lead = leader_rank(l, 0, d);
    auto c = coord_of_rank(l, lead);
    CHECK(c.tp_idx == 0);
    CHECK(c.cp_idx == 0);
    CHECK(c.dp_idx == d);
    // enumeration oracle: first coordinate in order with tp=0, cp=0, dp=d
    for (size_t i = 0; i < coords.size(); ++i) {
      if (coords[i].tp_idx == 0 && coords[i].cp_idx == 0 && coords[i].pp_idx == 0 &&
          coords[i].dp_idx == d) {
        CHECK(lead == static_cast<int>(i));
        break;
      }
    }
  }
  std::set<int> leaders;
  for (int d = 0; d < l.dp; ++d) leaders.insert(leader_rank(l, 0, d));
  CHECK(static_cast<int>(leaders.size()) == l.dp);
}

TEST_CASE("leader_rank with tp=cp=1 makes every cell its own leader") {
  ModuleLayout l{"m", 1, 1, 2, 3, 0};
  for (int p = 0; p < l.pp; ++p)
    for (int d = 0; d < l.dp; ++d)
      CHECK(leader_rank(l, p, d) == rank_of_coord(l, GridCoord{0, 0, p, d}));
}

TEST_CASE("leader_rank translates with the module offset") {
  ModuleLayout base{"m", 2, 2, 1, 2, 0};
  ModuleLayout moved = base;
  moved.rank_offset = 8;
  for (int d = 0; d < base.dp; ++d)
    CHECK(leader_rank(moved, 0, d) == leader_rank(base, 0, d) + 8);
}

TEST_CASE("placement_of_edge classifies shared, disjoint and partial ranges") {
  ModuleLayout llm{"language", 2, 1, 2, 2, 0};   // ranks [0, 8)
  ModuleLayout enc{"images", 1, 1, 1, 8, 0};     // ranks [0, 8)
  CHECK(placement_of_edge({enc, llm, 8, 3}) == Placement::Colocated);

  ModuleLayout llm4{"language", 2, 1, 2, 1, 0};  // ranks [0, 4)
  ModuleLayout enc4{"images", 1, 1, 1, 4, 4};    // ranks [4, 8)
  CHECK(placement_of_edge({enc4, llm4, 8, 3}) == Placement::NonColocated);

  ModuleLayout a{"a", 1, 1, 1, 6, 0};  // [0, 6)
  ModuleLayout b{"b", 1, 1, 1, 4, 4};  // [4, 8)
  try {
    placement_of_edge({a, b, 8, 3});
    FAIL("expected throw");
  } catch (const SimError& e) {
    CHECK(e.code() == ErrorCode::PartialOverlap);
  }
}

TEST_CASE("placement_of_edge is symmetric") {
  ModuleLayout a{"a", 2, 1, 1, 2, 0};
  ModuleLayout b{"b", 1, 1, 1, 4, 4};
  CHECK(placement_of_edge({a, b, 8, 1}) == placement_of_edge({b, a, 8, 1}));
  ModuleLayout c{"c", 4, 1, 1, 1, 0};
  CHECK(placement_of_edge({a, c, 8, 1}) == placement_of_edge({c, a, 8, 1}));
}

TEST_CASE("ranks_of_stage and replica_group are ordered and consistent") {
  ModuleLayout l{"m", 2, 2, 2, 2, 4};
  auto stage0 = ranks_of_stage(l, 0);
  CHECK(stage0.size() == 8);
  CHECK(std::is_sorted(stage0.begin(), stage0.end()));
  for (int r : stage0) CHECK(coord_of_rank(l, r).pp_idx == 0);

  auto grp = replica_group(l, 1, 1);
  CHECK(grp.size() == 4);
  CHECK(grp.front() == leader_rank(l, 1, 1));
  for (int r : grp) {
    auto c = coord_of_rank(l, r);
    CHECK(c.pp_idx == 1);
    CHECK(c.dp_idx == 1);
  }
}
