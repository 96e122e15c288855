#pragma once

#include <vector>

#include "aid/info_structure.hpp"

namespace aid {

struct StrategyProfile {
  std::vector<std::vector<double>> bids;  // [bidder][atom index]
};

// Bid-your-signal-value, ignoring tags and any stored strategy map.
StrategyProfile truthful_strategy(const InfoStructure& I);

// The strategy the structure was built for: the stored map when present,
// otherwise truthful with labeled atoms resolved (inner tag 2 bids v_bar,
// everything else bids its atom value).
StrategyProfile attached_strategy(const InfoStructure& I);

struct StrategyViolation {
  int bidder = 0;
  int atom = 0;
  double bid = 0.0;
  double max_support_value = 0.0;
};

// The no-overbid restriction: a bid must not strictly exceed the largest own
// valuation in the bidder's posterior support at that signal. Reported, not
// enforced; the verifier audits equilibria regardless.
std::vector<StrategyViolation> validate_strategy(const InfoStructure& I,
                                                 const StrategyProfile& sigma);

struct PayoffPoint {
  double revenue = 0.0;
  double bidder_surplus = 0.0;
  std::vector<double> bs_per_bidder;
  double welfare = 0.0;
  double efficiency_gap = 0.0;  // wel_max - welfare
  double tie_mass = 0.0;        // probability the top bid is shared
};

PayoffPoint evaluate(const InfoStructure& I, const StrategyProfile& sigma);

// {0} plus every opponent bid reachable with positive probability, plus the
// midpoints between consecutive atoms of (reachable bids plus v_bar), plus
// v_bar. Exhaustive over allocation-distinct outcomes.
std::vector<double> deviation_bid_set(const InfoStructure& I, int bidder,
                                      const StrategyProfile& sigma);

struct Witness {
  int bidder = 0;
  int atom = 0;
  double eq_bid = 0.0;
  double dev_bid = 0.0;
  double gain = 0.0;
};

struct EquilibriumReport {
  bool is_bne = false;
  bool is_strict = false;
  // Interim units: per (bidder, signal) payoffs conditional on the signal.
  // Clean means tie events (opponent max hitting either compared bid) are
  // excluded; their contribution is reported as a separate slack.
  double worst_gain = 0.0;
  double worst_gain_with_ties = 0.0;
  double tie_gain_slack = 0.0;
  double strict_margin = 0.0;
  double tol = 0.0;
  std::vector<Witness> witnesses;
  // Ex-ante truthful-play surplus per bidder off tie events; sums below.
  std::vector<double> clean_surplus;
  double total_clean_surplus = 0.0;
};

EquilibriumReport verify_bne(const InfoStructure& I, const StrategyProfile& sigma,
                             double tol = 1e-9);
EquilibriumReport verify_strict(const InfoStructure& I, const StrategyProfile& sigma,
                                double tol = 1e-9);

struct BestResponse {
  double bid = 0.0;
  double payoff = 0.0;  // interim, tie events included
};

BestResponse best_response(const InfoStructure& I, int bidder, int atom,
                           const StrategyProfile& sigma);

}  // namespace aid
