#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"

#include "aid/errors.hpp"
#include "aid/prior.hpp"
#include "helpers.hpp"

using namespace aid;
using testutil::make_p1;
using testutil::thrown_code;

TEST_CASE("validate accepts the iid coin-flip prior") {
  CHECK_NOTHROW(validate(make_p1()));
}

TEST_CASE("validate rejects malformed priors with the right codes") {
  SUBCASE("asymmetric mass is not exchangeable") {
    auto p = make_p1();
    p.pmf[1].second = 0.3;  // P(1,0) = 0.3
    p.pmf[2].second = 0.2;  // P(0,1) = 0.2
    CHECK(thrown_code([&] { validate(p); }) == ErrorCode::NotExchangeable);
  }
  SUBCASE("mass must sum to one") {
    auto p = make_p1();
    p.pmf[3].second = 0.3;  // total 1.05
    CHECK(thrown_code([&] { validate(p); }) == ErrorCode::NotNormalized);
  }
  SUBCASE("negative mass") {
    auto p = make_p1();
    p.pmf[0].second = -0.25;
    CHECK(thrown_code([&] { validate(p); }) == ErrorCode::NotNormalized);
  }
  SUBCASE("empty value set") {
    SymmetricPrior p;
    p.n_bidders = 2;
    p.pmf = {{{0, 0}, 1.0}};
    CHECK(thrown_code([&] { validate(p); }) == ErrorCode::EmptySupport);
  }
  SUBCASE("empty support") {
    SymmetricPrior p;
    p.n_bidders = 2;
    p.values = {0.5};
    CHECK(thrown_code([&] { validate(p); }) == ErrorCode::EmptySupport);
  }
  SUBCASE("one bidder is not an auction") {
    SymmetricPrior p;
    p.n_bidders = 1;
    p.values = {0.5};
    p.pmf = {{{0}, 1.0}};
    CHECK(thrown_code([&] { validate(p); }) == ErrorCode::InvalidArgument);
  }
  SUBCASE("values outside the unit interval") {
    auto p = make_p1();
    p.values = {0.0, 1.5};
    CHECK(thrown_code([&] { validate(p); }) == ErrorCode::InvalidArgument);
  }
  SUBCASE("values must ascend strictly") {
    auto p = make_p1();
    p.values = {1.0, 1.0};
    CHECK(thrown_code([&] { validate(p); }) == ErrorCode::InvalidArgument);
  }
  SUBCASE("profile length must match the bidder count") {
    auto p = make_p1();
    p.pmf[0].first = {0};
    CHECK(thrown_code([&] { validate(p); }) == ErrorCode::InvalidArgument);
  }
  SUBCASE("profile index out of range") {
    auto p = make_p1();
    p.pmf[0].first = {0, 7};
    CHECK(thrown_code([&] { validate(p); }) == ErrorCode::InvalidArgument);
  }
  SUBCASE("duplicate support profile") {
    auto p = make_p1();
    p.pmf[2].first = {1, 0};
    p.pmf[1].second = 0.25;
    CHECK(thrown_code([&] { validate(p); }) == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("tie_count counts maximizers") {
  CHECK(tie_count({1.0, 1.0}) == 2);
  CHECK(tie_count({1.0, 0.0}) == 1);
  CHECK(tie_count({0.5, 0.5, 0.5}) == 3);
  CHECK(tie_count_indices({2, 0, 2}) == 2);
}

TEST_CASE("stats of the coin-flip prior") {
  auto stats = compute_stats(make_p1());

  // E[max] = 3/4 over four equally likely profiles, E[min] = 1/4.
  CHECK(stats.wel_max == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(stats.wel_min == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(stats.v_hat == doctest::Approx(0.75).epsilon(1e-12));

  // P(max = 0) = 1/4, P(max = 1) = 3/4.
  REQUIRE(stats.modified_prior.size() == 2);
  CHECK(stats.modified_prior[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(stats.modified_prior[1] == doctest::Approx(0.75).epsilon(1e-12));

  // Winner-designated weights n*p/m: (0,0) -> 1/4, (1,0) -> 1/2, (1,1) -> 1/4.
  std::map<std::vector<int>, double> tw;
  for (const auto& [profile, w] : stats.tie_weighted) tw[profile] += w;
  REQUIRE(tw.size() == 3);
  CHECK(tw[{0, 0}] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(tw[{1, 0}] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(tw[{1, 1}] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("stats of a degenerate prior collapse") {
  SymmetricPrior p;
  p.n_bidders = 3;
  p.values = {1.0};
  p.pmf = {{{0, 0, 0}, 1.0}};
  auto stats = compute_stats(p);
  CHECK(stats.wel_max == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(stats.wel_min == doctest::Approx(1.0).epsilon(1e-15));
  REQUIRE(stats.modified_prior.size() == 1);
  CHECK(stats.modified_prior[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("modified prior inherits the welfare mean and the winner marginal") {
  for (const auto& p : {make_p1(), testutil::make_iid3(), testutil::make_uniform4(),
                        testutil::make_degenmax2()}) {
    auto stats = compute_stats(p);

    double mean = 0.0, total = 0.0;
    for (size_t k = 0; k < stats.modified_prior.size(); ++k) {
      mean += p.values[k] * stats.modified_prior[k];
      total += stats.modified_prior[k];
    }
    CHECK(std::fabs(mean - stats.wel_max) <= 1e-10);
    CHECK(std::fabs(total - 1.0) <= 1e-12);

    // Coordinate-0 marginal of the tie-weighted law equals the modified prior.
    std::vector<double> marg(p.values.size(), 0.0);
    double tw_total = 0.0;
    for (const auto& [profile, w] : stats.tie_weighted) {
      marg[static_cast<size_t>(profile[0])] += w;
      tw_total += w;
    }
    CHECK(std::fabs(tw_total - 1.0) <= 1e-12);
    for (size_t k = 0; k < marg.size(); ++k) {
      CHECK(std::fabs(marg[k] - stats.modified_prior[k]) <= 1e-12);
    }
  }
}

TEST_CASE("tie_conditional gives the loser law of a designated winner") {
  auto stats = compute_stats(make_p1());

  // Given the winner holds 1: losers are (0) w.p. (1/2)/(3/4) and (1) w.p. (1/4)/(3/4).
  auto losers = tie_conditional(stats, 1);
  std::map<std::vector<int>, double> law;
  for (const auto& [profile, w] : losers) law[profile] += w;
  REQUIRE(law.size() == 2);
  CHECK(law[{0}] == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(law[{1}] == doctest::Approx(1.0 / 3).epsilon(1e-12));

  // Winner at 0 forces the loser to 0.
  auto low = tie_conditional(stats, 0);
  REQUIRE(low.size() == 1);
  CHECK(low[0].first == std::vector<int>{0});
  CHECK(low[0].second == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tie_conditional rejects a valueless winner") {
  SymmetricPrior p;
  p.n_bidders = 2;
  p.values = {0.0, 0.5, 1.0};
  p.pmf = {{{0, 0}, 0.25}, {{2, 0}, 0.25}, {{0, 2}, 0.25}, {{2, 2}, 0.25}};
  auto stats = compute_stats(p);
  // 0.5 is never the maximum, so conditioning on it is undefined.
  CHECK(thrown_code([&] { tie_conditional(stats, 1); }) == ErrorCode::ZeroProbabilitySignal);
}

TEST_CASE("prior classification") {
  CHECK(classify_prior(make_p1()) == PriorClass::BidderSurplusFriendly);
  CHECK(classify_prior(testutil::make_iid3()) == PriorClass::General);
  CHECK(classify_prior(testutil::make_uniform4()) == PriorClass::General);
  CHECK(classify_prior(testutil::make_degenmax2()) == PriorClass::DegenerateMax);
  // All-constant profiles count as bidder-surplus friendly, even a point mass.
  CHECK(classify_prior(testutil::make_delta1()) == PriorClass::BidderSurplusFriendly);
  CHECK(classify_prior(testutil::make_prodbad()) == PriorClass::BidderSurplusFriendly);
}

TEST_CASE("classification ignores support row order") {
  auto p = make_p1();
  std::swap(p.pmf[0], p.pmf[3]);
  std::swap(p.pmf[1], p.pmf[2]);
  CHECK(classify_prior(p) == PriorClass::BidderSurplusFriendly);

  auto d = testutil::make_degenmax2();
  std::swap(d.pmf[0], d.pmf[2]);
  CHECK(classify_prior(d) == PriorClass::DegenerateMax);
}

TEST_CASE("ProfileIndex finds support rows") {
  auto p = make_p1();
  ProfileIndex idx(p);
  CHECK(idx.find({0, 0}) == 0);
  CHECK(idx.find({1, 0}) == 1);
  CHECK(idx.find({0, 1}) == 2);
  CHECK(idx.find({1, 1}) == 3);

  SymmetricPrior sparse;
  sparse.n_bidders = 2;
  sparse.values = {0.0, 1.0};
  sparse.pmf = {{{0, 0}, 0.5}, {{1, 1}, 0.5}};
  ProfileIndex sidx(sparse);
  CHECK(sidx.find({1, 0}) == -1);
}
