#include <cmath>
#include <vector>

#include "doctest.h"

#include "aid/constructors.hpp"
#include "aid/errors.hpp"
#include "aid/info_structure.hpp"
#include "helpers.hpp"

using namespace aid;
using testutil::make_p1;
using testutil::thrown_code;

namespace {

// Two bidders, both observing their own coin flip.
InfoStructure revealing_p1() { return build_fully_revealing(make_p1()); }

}  // namespace

TEST_CASE("grid find matches value and tag exactly") {
  SignalGrid g;
  g.atoms = {{0.0, 0}, {0.5, 0}, {0.5, 1}, {1.0, 0}};
  CHECK(g.find({0.5, 0}) == 1);
  CHECK(g.find({0.5, 1}) == 2);
  CHECK(g.find({0.5, 2}) == -1);
  CHECK(g.find({0.25, 0}) == -1);
}

TEST_CASE("signal ranking is mixed radix with bidder 0 least significant") {
  InfoStructure I;
  I.prior = make_p1();
  SignalGrid g2, g3;
  g2.atoms = {{0.0, 0}, {1.0, 0}};
  g3.atoms = {{0.0, 0}, {0.5, 0}, {1.0, 0}};
  I.grids = {g2, g3};

  CHECK(I.signal_rank({1, 2}) == 5);
  CHECK(I.signal_unrank(5) == std::vector<int>{1, 2});
  for (int64_t id = 0; id < 6; ++id) CHECK(I.signal_rank(I.signal_unrank(id)) == id);
}

TEST_CASE("joint builder merges duplicates and drops zero mass") {
  InfoStructure I;
  I.prior = make_p1();
  SignalGrid g;
  g.atoms = {{0.0, 0}, {1.0, 0}};
  I.grids = {g, g};

  JointBuilder b(I);
  b.add({0, 0}, 0, 0.1);
  b.add({0, 0}, 0, 0.15);
  b.add({1, 0}, 1, 0.0);
  b.add({0, 1}, 2, 0.75);
  auto joint = b.finish();

  REQUIRE(joint.size() == 2);
  CHECK(joint[0].s_id == 0);
  CHECK(joint[0].v_id == 0);
  CHECK(joint[0].p == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(joint[1].s_id == 2);

  // entries come out sorted by (s_id, v_id)
  JointBuilder b2(I);
  b2.add({1, 1}, 3, 0.5);
  b2.add({0, 0}, 1, 0.25);
  b2.add({0, 0}, 0, 0.25);
  auto sorted = b2.finish();
  REQUIRE(sorted.size() == 3);
  CHECK(sorted[0].s_id == 0);
  CHECK(sorted[0].v_id == 0);
  CHECK(sorted[1].v_id == 1);
  CHECK(sorted[2].s_id == 3);
}

TEST_CASE("validate_structure spots inconsistent joints") {
  auto I = revealing_p1();
  CHECK_NOTHROW(validate_structure(I));

  SUBCASE("grid count mismatch") {
    auto broken = I;
    broken.grids.pop_back();
    CHECK(thrown_code([&] { validate_structure(broken); }) == ErrorCode::InvalidArgument);
  }
  SUBCASE("negative mass") {
    auto broken = I;
    broken.joint[0].p = -broken.joint[0].p;
    CHECK(thrown_code([&] { validate_structure(broken); }) == ErrorCode::NotNormalized);
  }
  SUBCASE("mass must track the prior row by row") {
    auto broken = I;
    broken.joint[0].p += 0.1;
    broken.joint[1].p -= 0.1;
    CHECK(thrown_code([&] { validate_structure(broken); }) == ErrorCode::NotNormalized);
  }
  SUBCASE("total off by more than the tolerance") {
    auto broken = I;
    broken.joint[0].p += 0.1;
    CHECK(thrown_code([&] { validate_structure(broken); }) == ErrorCode::NotNormalized);
  }
  SUBCASE("unsorted entries") {
    auto broken = I;
    std::swap(broken.joint[0], broken.joint[1]);
    CHECK(thrown_code([&] { validate_structure(broken); }) == ErrorCode::InvalidArgument);
  }
  SUBCASE("dangling prior row") {
    auto broken = I;
    broken.joint[0].v_id = 17;
    CHECK(thrown_code([&] { validate_structure(broken); }) == ErrorCode::InvalidArgument);
  }
  SUBCASE("empty grid") {
    auto broken = I;
    broken.grids[1].atoms.clear();
    CHECK(thrown_code([&] { validate_structure(broken); }) == ErrorCode::EmptySupport);
  }
}

TEST_CASE("signal marginals") {
  auto I = revealing_p1();
  auto m0 = signal_marginal(I, 0);
  REQUIRE(m0.size() == 2);
  CHECK(m0[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m0[1] == doctest::Approx(0.5).epsilon(1e-12));

  // the extraction window is drawn uniformly: every atom carries 1/K
  auto X = build_full_extraction(make_p1(), 16, 0.25);
  for (int i = 0; i < 2; ++i) {
    auto m = signal_marginal(X, i);
    REQUIRE(m.size() == 16);
    for (double p : m) CHECK(std::fabs(p - 1.0 / 16) <= 1e-12);
  }

  CHECK(thrown_code([&] { signal_marginal(I, 2); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("independence gap separates product joints from correlated ones") {
  // own-value signals of independent coin flips stay independent
  CHECK(independence_gap(revealing_p1()) <= 1e-12);

  // perfectly correlated flips revealed: P(0,0) = 1/2 vs product 1/4
  auto C = build_fully_revealing(testutil::make_prodbad());
  CHECK(independence_gap(C) == doctest::Approx(0.25).epsilon(1e-12));

  // the extraction signals are iid by construction
  CHECK(independence_gap(build_full_extraction(make_p1(), 16, 0.25)) <= 1e-10);
}

TEST_CASE("symmetry gap vanishes on exchangeable structures") {
  auto rep = symmetry_gap(revealing_p1());
  CHECK(rep.joint_gap <= 1e-12);
  CHECK(rep.marginal_gap <= 1e-12);

  InfoStructure I;
  I.prior = make_p1();
  SignalGrid a, b;
  a.atoms = {{0.0, 0}, {1.0, 0}};
  b.atoms = {{0.0, 0}, {0.5, 0}};
  I.grids = {a, b};
  JointBuilder bld(I);
  bld.add({0, 0}, 0, 0.25);
  bld.add({1, 0}, 1, 0.25);
  bld.add({0, 1}, 2, 0.25);
  bld.add({1, 1}, 3, 0.25);
  I.joint = bld.finish();
  CHECK(thrown_code([&] { symmetry_gap(I); }) == ErrorCode::GridsDiffer);
}

TEST_CASE("posterior conditions the prior on a signal profile") {
  auto I = revealing_p1();
  auto post = posterior(I, {1, 0});
  REQUIRE(post.dist.size() == 1);
  CHECK(post.dist[0].first == 1);  // the (1, 0) support row
  CHECK(post.dist[0].second == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(interim_value(I, {1, 0}, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(interim_value(I, {1, 0}, 1) == doctest::Approx(0.0).epsilon(1e-12));

  SUBCASE("zero-probability profiles are rejected") {
    auto C = build_fully_revealing(testutil::make_prodbad());
    CHECK(thrown_code([&] { posterior(C, {1, 0}); }) == ErrorCode::ZeroProbabilitySignal);
  }
  SUBCASE("malformed profiles are rejected") {
    CHECK(thrown_code([&] { posterior(I, {1}); }) == ErrorCode::InvalidArgument);
    CHECK(thrown_code([&] { posterior(I, {1, 9}); }) == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("extraction posteriors put the winner exactly on the second signal") {
  auto I = build_full_extraction(make_p1(), 16, 0.25);
  int checked = 0;
  for (int a = 0; a < 16; ++a) {
    for (int b = 0; b < 16; ++b) {
      if (a == b) continue;
      int winner = a > b ? 0 : 1;
      double sec = I.grids[0].atoms[static_cast<size_t>(std::min(a, b))].value;
      CHECK(std::fabs(interim_value(I, {a, b}, winner) - sec) <= 1e-9);
      ++checked;
    }
  }
  CHECK(checked == 240);
}

TEST_CASE("structural predicates on extraction and revealing joints") {
  auto X = build_full_extraction(make_p1(), 16, 0.25);

  auto wd = check_winner_dominance(X);
  CHECK(wd.ok_no_tie());
  CHECK(wd.no_tie_checked > 0);

  auto nr = check_no_rent_winner(X, 1e-9);
  CHECK(nr.ok_no_tie());

  auto lb = check_loser_bound(X, 1e-9);
  CHECK(lb.ok_no_tie());

  // revealing the coin flip leaves the winner a rent of 1 on split profiles
  auto R = revealing_p1();
  auto rent = check_no_rent_winner(R, 1e-9);
  CHECK_FALSE(rent.ok_no_tie());
  REQUIRE(rent.no_tie_violations.size() == 2);
  CHECK(rent.no_tie_violations[0].detail == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(check_winner_dominance(R).ok_no_tie());
}
