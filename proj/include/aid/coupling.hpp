#pragma once

#include <utility>
#include <vector>

#include "aid/prior.hpp"

namespace aid {

// Finite distribution on strictly ascending real atoms.
struct Dist {
  std::vector<double> atoms;
  std::vector<double> pmf;

  double mean() const;
  double total() const;
};

// Signal window: K equally spaced atoms interior to (s_hat, s_hat + length),
// at s_hat + r*length/(K+1) for r = 1..K.
struct SignalWindow {
  double s_hat = 0.0;
  double length = 0.0;
  int k = 0;
  std::vector<double> atoms;
};

SignalWindow make_window(double s_hat, double length, int k);

// Distribution of the second-highest of n iid uniform draws from the window
// grid. Conditioning on a uniformly tie-broken designated winner leaves this
// law unchanged, which is what the extraction construction relies on.
Dist secmax_dist_uniform(int n, const SignalWindow& window);

// E[secmax] - s_hat for the same law; depends only on (n, length, k).
double mean_offset(int n, double length, int k);

struct MpcReport {
  bool ok = false;
  double mean_gap = 0.0;         // mean(g) - mean(f)
  double worst_violation = 0.0;  // max over x of E_g[(x-X)+] - E_f[(x-X)+]
};

// Checks that g is dominated by f in the convex order (a mean-preserving
// contraction of it). Equal means plus pointwise lower-tail dominance is
// exactly the martingale-coupling feasibility condition.
MpcReport mpc_check(const Dist& f, const Dist& g);

// Largest window of the requested shape that the modified prior can support:
// starts from length = eps_cap and halves until the secmax law fits inside
// the prior's convex order, centering so the window's secmax mean equals the
// modified prior's mean. Errors with WindowUnderflow after 40 halvings.
SignalWindow solve_signal_window(const PriorStats& stats, const std::vector<double>& values,
                                 int n, double eps_cap, int k);

struct MartingaleCoupling {
  std::vector<double> signal_atoms;
  std::vector<double> signal_pmf;
  std::vector<double> value_atoms;
  // q[t][v] joint mass: rows sum to signal_pmf[t] with conditional mean
  // signal_atoms[t]; columns sum to the value marginal.
  std::vector<std::vector<double>> q;

  // Conditional value law at signal row t, normalized.
  std::vector<double> row_conditional(int t) const;
};

// Joint law of (signal, value) with the given marginals whose conditional
// value mean at every signal atom equals that atom. Errors with
// CouplingInfeasible when no such coupling exists.
MartingaleCoupling martingale_coupling(const Dist& value_marginal, const Dist& signal_marginal);

// Boundary between the downward and upward branches of the strict target.
double kink(double s_i, double s_hat);

// The strict construction's posterior-mean target for a winner holding signal
// s_i facing second-highest signal y: pulled slightly below y on the lower
// branch, pushed slightly above on the upper branch, so that truthful bidding
// earns a strictly positive margin in both directions.
double strict_value_target(double s_i, double y, double s_hat, double eps, int n);

// Pushforward of the strict target under the window's (winner signal, secmax)
// law with uniformly tie-broken designation; tie events map to the winner's
// own signal value.
Dist strict_target_distribution(int n, const SignalWindow& window, double eps);

// Splits a point mass at `mean` across the two bracketing atoms of `anchors`
// so the mean is preserved exactly. Returns (index, weight) pairs; the second
// weight is zero when `mean` hits an anchor exactly.
std::pair<std::pair<int, double>, std::pair<int, double>> two_point_split(
    double mean, const std::vector<double>& anchors);

// Modified prior as a distribution on its positively weighted atoms.
Dist modified_prior_dist(const std::vector<double>& values, const PriorStats& stats);

}  // namespace aid
