#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

namespace aid {

// Exchangeable prior over valuation profiles drawn from a common finite value
// set. Profiles are stored as index vectors into `values`.
struct SymmetricPrior {
  int n_bidders = 0;
  std::vector<double> values;  // strictly ascending, all within [0, 1]
  std::vector<std::pair<std::vector<int>, double>> pmf;

  double value_at(const std::vector<int>& profile, int bidder) const {
    return values[static_cast<size_t>(profile[static_cast<size_t>(bidder)])];
  }
  double top_value() const { return values.back(); }
};

enum class PriorClass { BidderSurplusFriendly, DegenerateMax, General };

inline const char* to_string(PriorClass c) {
  switch (c) {
    case PriorClass::BidderSurplusFriendly: return "bidder-surplus-friendly";
    case PriorClass::DegenerateMax: return "degenerate-max";
    case PriorClass::General: return "general";
  }
  return "general";
}

// Hash lookup from a value-index profile to its row in prior.pmf.
class ProfileIndex {
 public:
  explicit ProfileIndex(const SymmetricPrior& prior);

  // Returns the support row, or -1 when the profile carries no prior mass.
  int find(const std::vector<int>& profile) const;

 private:
  uint64_t key(const std::vector<int>& profile) const;
  size_t radix_ = 0;
  std::unordered_map<uint64_t, int> rows_;
};

struct PriorStats {
  double wel_max = 0;  // E[max v], the efficient welfare benchmark
  double wel_min = 0;  // E[min v]
  double v_hat = 0;    // mean of the modified prior; equals wel_max

  // modified_prior[k] = P(max(v) = values[k]); this is also the winner's
  // conditional value distribution under uniform tie-broken designation.
  std::vector<double> modified_prior;

  // Tie-weighted winner events for designated bidder 0: profiles v with
  // v_0 = max(v), carrying weight n * prior(v) / tie_count(v). Sums to 1.
  std::vector<std::pair<std::vector<int>, double>> tie_weighted;
};

void validate(const SymmetricPrior& prior);

// Number of coordinates achieving the maximum of the profile.
int tie_count(const std::vector<double>& profile);
int tie_count_indices(const std::vector<int>& profile);

PriorStats compute_stats(const SymmetricPrior& prior);

// Loser-value distribution given the designated winner holds values[value_index]:
// profiles over the remaining n-1 coordinates with their conditional weights.
// Weights sum to 1. Errors with ZeroProbabilitySignal when the modified prior
// puts no mass on that value.
std::vector<std::pair<std::vector<int>, double>> tie_conditional(const PriorStats& stats,
                                                                 int value_index);

PriorClass classify_prior(const SymmetricPrior& prior);

}  // namespace aid
