#include "aid/prior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "aid/errors.hpp"

namespace aid {

namespace {

constexpr double kMassTol = 1e-12;

std::string profile_str(const SymmetricPrior& prior, const std::vector<int>& profile) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < profile.size(); ++i) {
    if (i > 0) os << ", ";
    os << prior.values[static_cast<size_t>(profile[i])];
  }
  os << ")";
  return os.str();
}

}  // namespace

ProfileIndex::ProfileIndex(const SymmetricPrior& prior) : radix_(prior.values.size()) {
  rows_.reserve(prior.pmf.size() * 2);
  for (size_t row = 0; row < prior.pmf.size(); ++row) {
    rows_.emplace(key(prior.pmf[row].first), static_cast<int>(row));
  }
}

uint64_t ProfileIndex::key(const std::vector<int>& profile) const {
  uint64_t k = 0;
  for (int idx : profile) k = k * radix_ + static_cast<uint64_t>(idx);
  return k;
}

int ProfileIndex::find(const std::vector<int>& profile) const {
  auto it = rows_.find(key(profile));
  return it == rows_.end() ? -1 : it->second;
}

void validate(const SymmetricPrior& prior) {
  if (prior.n_bidders < 2) raise(ErrorCode::InvalidArgument, "need at least two bidders");
  if (prior.values.empty()) raise(ErrorCode::EmptySupport, "value set is empty");
  for (size_t i = 0; i < prior.values.size(); ++i) {
    double v = prior.values[i];
    if (!(v >= 0.0 && v <= 1.0)) raise(ErrorCode::InvalidArgument, "values must lie in [0, 1]");
    if (i > 0 && !(prior.values[i - 1] < v)) {
      raise(ErrorCode::InvalidArgument, "values must be strictly ascending");
    }
  }
  if (prior.pmf.empty()) raise(ErrorCode::EmptySupport, "prior has no support profiles");

  double total = 0.0;
  for (const auto& [profile, p] : prior.pmf) {
    if (static_cast<int>(profile.size()) != prior.n_bidders) {
      raise(ErrorCode::InvalidArgument, "profile length does not match bidder count");
    }
    for (int idx : profile) {
      if (idx < 0 || idx >= static_cast<int>(prior.values.size())) {
        raise(ErrorCode::InvalidArgument, "profile references a value outside the value set");
      }
    }
    if (p < 0.0) raise(ErrorCode::NotNormalized, "negative probability mass");
    total += p;
  }
  if (std::abs(total - 1.0) > kMassTol) {
    raise(ErrorCode::NotNormalized,
          "probabilities sum to " + std::to_string(total) + ", expected 1");
  }

  ProfileIndex index(prior);
  {
    std::unordered_map<uint64_t, int> seen;
    for (size_t row = 0; row < prior.pmf.size(); ++row) {
      uint64_t k = 0;
      for (int idx : prior.pmf[row].first) {
        k = k * prior.values.size() + static_cast<uint64_t>(idx);
      }
      auto [it, inserted] = seen.emplace(k, static_cast<int>(row));
      if (!inserted) {
        raise(ErrorCode::InvalidArgument,
              "duplicate support profile " + profile_str(prior, prior.pmf[row].first));
      }
    }
  }

  // Exchangeability: every permutation of a support profile must carry the
  // same mass. Permutations are enumerated explicitly; bidder counts stay
  // small enough that n! lookups are cheap.
  std::vector<int> perm(static_cast<size_t>(prior.n_bidders));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> permuted(static_cast<size_t>(prior.n_bidders));
  do {
    for (const auto& [profile, p] : prior.pmf) {
      for (int i = 0; i < prior.n_bidders; ++i) {
        permuted[static_cast<size_t>(perm[static_cast<size_t>(i)])] =
            profile[static_cast<size_t>(i)];
      }
      int row = index.find(permuted);
      double q = row < 0 ? 0.0 : prior.pmf[static_cast<size_t>(row)].second;
      if (std::abs(p - q) > kMassTol) {
        raise(ErrorCode::NotExchangeable,
              "mass " + std::to_string(p) + " at " + profile_str(prior, profile) +
                  " but " + std::to_string(q) + " at permuted " + profile_str(prior, permuted));
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
}

int tie_count(const std::vector<double>& profile) {
  double top = *std::max_element(profile.begin(), profile.end());
  return static_cast<int>(std::count(profile.begin(), profile.end(), top));
}

int tie_count_indices(const std::vector<int>& profile) {
  int top = *std::max_element(profile.begin(), profile.end());
  return static_cast<int>(std::count(profile.begin(), profile.end(), top));
}

PriorStats compute_stats(const SymmetricPrior& prior) {
  PriorStats stats;
  stats.modified_prior.assign(prior.values.size(), 0.0);
  double n = static_cast<double>(prior.n_bidders);
  for (const auto& [profile, p] : prior.pmf) {
    int max_idx = *std::max_element(profile.begin(), profile.end());
    int min_idx = *std::min_element(profile.begin(), profile.end());
    int m = tie_count_indices(profile);
    stats.wel_max += p * prior.values[static_cast<size_t>(max_idx)];
    stats.wel_min += p * prior.values[static_cast<size_t>(min_idx)];
    stats.modified_prior[static_cast<size_t>(max_idx)] += p;
    if (profile[0] == max_idx) {
      stats.tie_weighted.emplace_back(profile, n * p / static_cast<double>(m));
    }
  }
  for (size_t k = 0; k < prior.values.size(); ++k) {
    stats.v_hat += prior.values[k] * stats.modified_prior[k];
  }
  return stats;
}

std::vector<std::pair<std::vector<int>, double>> tie_conditional(const PriorStats& stats,
                                                                 int value_index) {
  double denom = stats.modified_prior[static_cast<size_t>(value_index)];
  if (denom <= 0.0) {
    raise(ErrorCode::ZeroProbabilitySignal,
          "modified prior puts no mass on value index " + std::to_string(value_index));
  }
  std::vector<std::pair<std::vector<int>, double>> cond;
  for (const auto& [profile, w] : stats.tie_weighted) {
    if (profile[0] != value_index) continue;
    std::vector<int> losers(profile.begin() + 1, profile.end());
    cond.emplace_back(std::move(losers), w / denom);
  }
  return cond;
}

PriorClass classify_prior(const SymmetricPrior& prior) {
  bool all_friendly = true;
  bool all_constant = true;
  bool max_constant = true;
  int common_max = *std::max_element(prior.pmf.front().first.begin(),
                                     prior.pmf.front().first.end());
  for (const auto& [profile, p] : prior.pmf) {
    (void)p;
    int max_idx = *std::max_element(profile.begin(), profile.end());
    bool constant = std::all_of(profile.begin(), profile.end(),
                                [&](int idx) { return idx == profile[0]; });
    int positives = 0;
    for (int idx : profile) {
      if (prior.values[static_cast<size_t>(idx)] > 0.0) ++positives;
    }
    if (!constant && positives > 1) all_friendly = false;
    if (!constant) all_constant = false;
    if (max_idx != common_max) max_constant = false;
  }
  if (all_friendly) return PriorClass::BidderSurplusFriendly;
  if (max_constant && !all_constant) return PriorClass::DegenerateMax;
  return PriorClass::General;
}

}  // namespace aid
