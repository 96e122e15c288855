#pragma once

#include "aid/info_structure.hpp"
#include "aid/prior.hpp"

namespace aid {

inline constexpr int kDefaultGridSize = 64;
inline constexpr double kDefaultWindowCap = 0.25;

// Knobs for the one-parameter families. `alpha` drives the revenue frontier,
// (`t`, `q`) the independent-private-values hybrid. `eps` is the signal gap
// used when spreading the frontier alphabets; the low-information window of
// the hybrid uses its own grid size and cap because it nests a full
// extraction kernel on the losers' sub-prior.
struct FrontierParams {
  double alpha = 0.0;
  double eps = 0.02;
  double t = 0.0;
  double q = 0.0;
  int k_low = 16;
  double eps_cap_low = 0.05;
};

// Every builder returns a validated InfoStructure whose construction block
// records the kind plus the numeric parameters that shaped it. Structures
// that are played with a non-truthful strategy (point D and mixtures) carry
// the strategy map explicitly; everything else is truthful-by-atom-value.

InfoStructure build_fully_revealing(const SymmetricPrior& prior);

InfoStructure build_full_extraction(const SymmetricPrior& prior,
                                    int k = kDefaultGridSize,
                                    double eps_cap = kDefaultWindowCap);

InfoStructure build_strict_eps(const SymmetricPrior& prior, double eps,
                               int k = kDefaultGridSize);

InfoStructure build_degenerate_max(const SymmetricPrior& prior, double eps);

InfoStructure build_bidder_surplus(const SymmetricPrior& prior, double eps);

InfoStructure build_frontier_alpha(const SymmetricPrior& prior,
                                   const FrontierParams& params);

InfoStructure build_ipv_hybrid(const SymmetricPrior& prior,
                               const FrontierParams& params);

InfoStructure build_point_A(const SymmetricPrior& prior);
InfoStructure build_point_C(const SymmetricPrior& prior);
InfoStructure build_point_D(const SymmetricPrior& prior);

InfoStructure build_target_payoff(const SymmetricPrior& prior, double revenue,
                                  double bidder_surplus,
                                  int k = kDefaultGridSize);

}  // namespace aid
