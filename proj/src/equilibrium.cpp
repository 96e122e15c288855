#include "aid/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "aid/errors.hpp"

namespace aid {

namespace {

constexpr double kMassEps = 1e-15;

void require_defined(const InfoStructure& I, const StrategyProfile& sigma) {
  if (static_cast<int>(sigma.bids.size()) != I.n()) {
    raise(ErrorCode::UndefinedSignal, "strategy must cover every bidder");
  }
  for (int i = 0; i < I.n(); ++i) {
    if (sigma.bids[static_cast<size_t>(i)].size() !=
        I.grids[static_cast<size_t>(i)].atoms.size()) {
      raise(ErrorCode::UndefinedSignal,
            "strategy for bidder " + std::to_string(i) + " must cover every atom");
    }
    for (double b : sigma.bids[static_cast<size_t>(i)]) {
      if (std::isnan(b)) raise(ErrorCode::UndefinedSignal, "NaN bid");
    }
  }
}

// Events seen by one bidder holding one signal atom, keyed by the highest
// opponent bid y and the number k of opponents bidding exactly y.
struct Bucket {
  double y = 0.0;
  int k = 0;
  double mass = 0.0;    // joint probability
  double vmass = 0.0;   // probability-weighted own valuation
};

struct BidderTable {
  std::vector<std::vector<Bucket>> per_atom;  // buckets sorted by (y, k)
  std::vector<double> atom_mass;
};

std::vector<BidderTable> build_tables(const InfoStructure& I, const StrategyProfile& sigma) {
  std::vector<std::vector<std::map<std::pair<double, int>, std::pair<double, double>>>> acc(
      static_cast<size_t>(I.n()));
  for (int i = 0; i < I.n(); ++i) {
    acc[static_cast<size_t>(i)].resize(I.grids[static_cast<size_t>(i)].atoms.size());
  }

  size_t idx = 0;
  std::vector<double> bids(static_cast<size_t>(I.n()));
  std::vector<double> y(static_cast<size_t>(I.n()));
  std::vector<int> k(static_cast<size_t>(I.n()));
  while (idx < I.joint.size()) {
    int64_t s_id = I.joint[idx].s_id;
    std::vector<int> s = I.signal_unrank(s_id);
    for (int i = 0; i < I.n(); ++i) {
      bids[static_cast<size_t>(i)] =
          sigma.bids[static_cast<size_t>(i)][static_cast<size_t>(s[static_cast<size_t>(i)])];
    }
    for (int i = 0; i < I.n(); ++i) {
      double top = -1.0;
      int count = 0;
      for (int j = 0; j < I.n(); ++j) {
        if (j == i) continue;
        double b = bids[static_cast<size_t>(j)];
        if (b > top) {
          top = b;
          count = 1;
        } else if (b == top) {
          ++count;
        }
      }
      y[static_cast<size_t>(i)] = top;
      k[static_cast<size_t>(i)] = count;
    }
    while (idx < I.joint.size() && I.joint[idx].s_id == s_id) {
      const auto& e = I.joint[idx];
      const auto& v = I.prior.pmf[static_cast<size_t>(e.v_id)].first;
      for (int i = 0; i < I.n(); ++i) {
        auto& cell = acc[static_cast<size_t>(i)][static_cast<size_t>(s[static_cast<size_t>(i)])]
                        [{y[static_cast<size_t>(i)], k[static_cast<size_t>(i)]}];
        cell.first += e.p;
        cell.second += e.p * I.prior.value_at(v, i);
      }
      ++idx;
    }
  }

  std::vector<BidderTable> tables(static_cast<size_t>(I.n()));
  for (int i = 0; i < I.n(); ++i) {
    auto& table = tables[static_cast<size_t>(i)];
    table.per_atom.resize(acc[static_cast<size_t>(i)].size());
    table.atom_mass.assign(acc[static_cast<size_t>(i)].size(), 0.0);
    for (size_t a = 0; a < acc[static_cast<size_t>(i)].size(); ++a) {
      for (const auto& [key, sums] : acc[static_cast<size_t>(i)][a]) {
        table.per_atom[a].push_back({key.first, key.second, sums.first, sums.second});
        table.atom_mass[a] += sums.first;
      }
    }
  }
  return tables;
}

// Ex-ante payoff of bidding b against the bucket list, ties split uniformly.
double payoff_full(const std::vector<Bucket>& buckets, double b) {
  double acc = 0.0;
  for (const auto& bu : buckets) {
    if (bu.y < b) {
      acc += bu.vmass - bu.mass * bu.y;
    } else if (bu.y == b) {
      acc += (bu.vmass - bu.mass * bu.y) / (bu.k + 1);
    }
  }
  return acc;
}

// Same, excluding events at the two compared bids (the tie-contaminated ones).
double payoff_clean(const std::vector<Bucket>& buckets, double b, double e1, double e2) {
  double acc = 0.0;
  for (const auto& bu : buckets) {
    if (bu.y >= b) break;
    if (bu.y == e1 || bu.y == e2) continue;
    acc += bu.vmass - bu.mass * bu.y;
  }
  return acc;
}

double mass_strictly_between(const std::vector<Bucket>& buckets, double lo, double hi) {
  double acc = 0.0;
  for (const auto& bu : buckets) {
    if (bu.y >= hi) break;
    if (bu.y > lo) acc += bu.mass;
  }
  return acc;
}

}  // namespace

StrategyProfile truthful_strategy(const InfoStructure& I) {
  StrategyProfile sigma;
  sigma.bids.resize(static_cast<size_t>(I.n()));
  for (int i = 0; i < I.n(); ++i) {
    for (const auto& atom : I.grids[static_cast<size_t>(i)].atoms) {
      sigma.bids[static_cast<size_t>(i)].push_back(atom.value);
    }
  }
  return sigma;
}

StrategyProfile attached_strategy(const InfoStructure& I) {
  if (!I.strategy.empty()) return {I.strategy};
  StrategyProfile sigma;
  double v_bar = I.prior.top_value();
  sigma.bids.resize(static_cast<size_t>(I.n()));
  for (int i = 0; i < I.n(); ++i) {
    for (const auto& atom : I.grids[static_cast<size_t>(i)].atoms) {
      sigma.bids[static_cast<size_t>(i)].push_back((atom.tag & 0xF) == 2 ? v_bar : atom.value);
    }
  }
  return sigma;
}

std::vector<StrategyViolation> validate_strategy(const InfoStructure& I,
                                                 const StrategyProfile& sigma) {
  require_defined(I, sigma);
  std::vector<std::vector<double>> max_val(static_cast<size_t>(I.n()));
  for (int i = 0; i < I.n(); ++i) {
    max_val[static_cast<size_t>(i)].assign(I.grids[static_cast<size_t>(i)].atoms.size(), -1.0);
  }
  for (const auto& e : I.joint) {
    if (e.p <= 0.0) continue;
    std::vector<int> s = I.signal_unrank(e.s_id);
    const auto& v = I.prior.pmf[static_cast<size_t>(e.v_id)].first;
    for (int i = 0; i < I.n(); ++i) {
      auto& slot = max_val[static_cast<size_t>(i)][static_cast<size_t>(s[static_cast<size_t>(i)])];
      slot = std::max(slot, I.prior.value_at(v, i));
    }
  }
  std::vector<StrategyViolation> violations;
  for (int i = 0; i < I.n(); ++i) {
    for (size_t a = 0; a < max_val[static_cast<size_t>(i)].size(); ++a) {
      double cap = max_val[static_cast<size_t>(i)][a];
      if (cap < 0.0) continue;  // zero-probability atom
      double bid = sigma.bids[static_cast<size_t>(i)][a];
      if (bid > cap + 1e-12) {
        violations.push_back({i, static_cast<int>(a), bid, cap});
      }
    }
  }
  return violations;
}

PayoffPoint evaluate(const InfoStructure& I, const StrategyProfile& sigma) {
  require_defined(I, sigma);
  PayoffPoint point;
  point.bs_per_bidder.assign(static_cast<size_t>(I.n()), 0.0);

  PriorStats stats = compute_stats(I.prior);
  std::vector<double> bids(static_cast<size_t>(I.n()));
  size_t idx = 0;
  while (idx < I.joint.size()) {
    int64_t s_id = I.joint[idx].s_id;
    std::vector<int> s = I.signal_unrank(s_id);
    for (int i = 0; i < I.n(); ++i) {
      bids[static_cast<size_t>(i)] =
          sigma.bids[static_cast<size_t>(i)][static_cast<size_t>(s[static_cast<size_t>(i)])];
    }
    double top = bids[0];
    double second = -1.0;
    for (size_t i = 1; i < bids.size(); ++i) {
      if (bids[i] > top) {
        second = top;
        top = bids[i];
      } else if (bids[i] > second) {
        second = bids[i];
      }
    }
    int m = static_cast<int>(std::count(bids.begin(), bids.end(), top));
    double price = m > 1 ? top : second;
    double run_mass = 0.0;
    while (idx < I.joint.size() && I.joint[idx].s_id == s_id) {
      const auto& e = I.joint[idx];
      const auto& v = I.prior.pmf[static_cast<size_t>(e.v_id)].first;
      run_mass += e.p;
      point.revenue += e.p * price;
      for (int i = 0; i < I.n(); ++i) {
        if (bids[static_cast<size_t>(i)] != top) continue;
        double share = e.p / m;
        double value = I.prior.value_at(v, i);
        point.welfare += share * value;
        point.bs_per_bidder[static_cast<size_t>(i)] += share * (value - price);
      }
      ++idx;
    }
    if (m > 1) point.tie_mass += run_mass;
  }
  for (double b : point.bs_per_bidder) point.bidder_surplus += b;
  point.efficiency_gap = stats.wel_max - point.welfare;
  return point;
}

std::vector<double> deviation_bid_set(const InfoStructure& I, int bidder,
                                      const StrategyProfile& sigma) {
  require_defined(I, sigma);
  if (bidder < 0 || bidder >= I.n()) raise(ErrorCode::InvalidArgument, "bidder out of range");
  double v_bar = I.prior.top_value();
  std::vector<double> reachable;
  for (int j = 0; j < I.n(); ++j) {
    if (j == bidder) continue;
    std::vector<double> marginal = signal_marginal(I, j);
    for (size_t a = 0; a < marginal.size(); ++a) {
      if (marginal[a] > 0.0) reachable.push_back(sigma.bids[static_cast<size_t>(j)][a]);
    }
  }
  std::sort(reachable.begin(), reachable.end());
  reachable.erase(std::unique(reachable.begin(), reachable.end()), reachable.end());

  std::vector<double> with_top = reachable;
  if (with_top.empty() || with_top.back() != v_bar) with_top.push_back(v_bar);

  std::vector<double> bids;
  bids.push_back(0.0);
  bids.insert(bids.end(), reachable.begin(), reachable.end());
  for (size_t i = 0; i + 1 < with_top.size(); ++i) {
    bids.push_back(0.5 * (with_top[i] + with_top[i + 1]));
  }
  bids.push_back(v_bar);
  std::sort(bids.begin(), bids.end());
  bids.erase(std::unique(bids.begin(), bids.end()), bids.end());
  return bids;
}

namespace {

EquilibriumReport verify_impl(const InfoStructure& I, const StrategyProfile& sigma, double tol) {
  require_defined(I, sigma);
  EquilibriumReport report;
  report.tol = tol;
  report.clean_surplus.assign(static_cast<size_t>(I.n()), 0.0);
  report.strict_margin = std::numeric_limits<double>::infinity();

  std::vector<BidderTable> tables = build_tables(I, sigma);
  for (int i = 0; i < I.n(); ++i) {
    std::vector<double> devs = deviation_bid_set(I, i, sigma);
    const auto& table = tables[static_cast<size_t>(i)];
    for (size_t a = 0; a < table.per_atom.size(); ++a) {
      double p_atom = table.atom_mass[a];
      if (p_atom <= 0.0) continue;
      const auto& buckets = table.per_atom[a];
      double be = sigma.bids[static_cast<size_t>(i)][a];
      report.clean_surplus[static_cast<size_t>(i)] += payoff_clean(buckets, be, be, be);

      double eq_full = payoff_full(buckets, be);
      double row_margin = std::numeric_limits<double>::infinity();
      bool row_has_alloc_dev = false;
      for (double c : devs) {
        if (c == be) continue;
        double gain_clean =
            (payoff_clean(buckets, c, be, c) - payoff_clean(buckets, be, be, c)) / p_atom;
        double gain_full = (payoff_full(buckets, c) - eq_full) / p_atom;
        report.worst_gain = std::max(report.worst_gain, gain_clean);
        report.worst_gain_with_ties = std::max(report.worst_gain_with_ties, gain_full);
        report.tie_gain_slack =
            std::max(report.tie_gain_slack, std::abs(gain_full - gain_clean));
        if (gain_clean > tol) {
          report.witnesses.push_back({i, static_cast<int>(a), be, c, gain_clean});
        }
        double lo = std::min(be, c);
        double hi = std::max(be, c);
        if (mass_strictly_between(buckets, lo, hi) > kMassEps) {
          row_has_alloc_dev = true;
          row_margin = std::min(row_margin, -gain_clean);
        }
      }
      if (!row_has_alloc_dev) row_margin = 0.0;
      report.strict_margin = std::min(report.strict_margin, row_margin);
    }
  }
  if (!std::isfinite(report.strict_margin)) report.strict_margin = 0.0;
  for (double b : report.clean_surplus) report.total_clean_surplus += b;
  report.is_bne = report.worst_gain <= tol;
  report.is_strict = report.is_bne && report.strict_margin >= tol;
  return report;
}

}  // namespace

EquilibriumReport verify_bne(const InfoStructure& I, const StrategyProfile& sigma, double tol) {
  return verify_impl(I, sigma, tol);
}

EquilibriumReport verify_strict(const InfoStructure& I, const StrategyProfile& sigma,
                                double tol) {
  return verify_impl(I, sigma, tol);
}

BestResponse best_response(const InfoStructure& I, int bidder, int atom,
                           const StrategyProfile& sigma) {
  require_defined(I, sigma);
  if (bidder < 0 || bidder >= I.n()) raise(ErrorCode::InvalidArgument, "bidder out of range");
  if (atom < 0 ||
      atom >= static_cast<int>(I.grids[static_cast<size_t>(bidder)].atoms.size())) {
    raise(ErrorCode::InvalidArgument, "atom out of range");
  }
  std::vector<BidderTable> tables = build_tables(I, sigma);
  const auto& table = tables[static_cast<size_t>(bidder)];
  double p_atom = table.atom_mass[static_cast<size_t>(atom)];
  if (p_atom <= 0.0) {
    raise(ErrorCode::ZeroProbabilitySignal,
          "signal atom " + std::to_string(atom) + " has no mass for bidder " +
              std::to_string(bidder));
  }
  const auto& buckets = table.per_atom[static_cast<size_t>(atom)];
  double prescribed = sigma.bids[static_cast<size_t>(bidder)][static_cast<size_t>(atom)];

  std::vector<double> candidates = deviation_bid_set(I, bidder, sigma);
  if (std::find(candidates.begin(), candidates.end(), prescribed) == candidates.end()) {
    candidates.push_back(prescribed);
    std::sort(candidates.begin(), candidates.end());
  }
  BestResponse best;
  bool first = true;
  for (double c : candidates) {
    double payoff = payoff_full(buckets, c) / p_atom;
    bool better = first || payoff > best.payoff + 1e-15;
    bool equal_pref = !first && std::abs(payoff - best.payoff) <= 1e-15 && c == prescribed &&
                      best.bid != prescribed;
    if (better || equal_pref) {
      best.bid = c;
      best.payoff = payoff;
      first = false;
    }
  }
  return best;
}

}  // namespace aid
