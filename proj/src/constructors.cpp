#include "aid/constructors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aid/coupling.hpp"
#include "aid/equilibrium.hpp"
#include "aid/errors.hpp"
#include "aid/log.hpp"
#include "lp_feasibility.hpp"

namespace aid {
namespace {

SignalGrid window_grid(const SignalWindow& window) {
  SignalGrid g;
  g.atoms.reserve(window.atoms.size());
  for (double v : window.atoms) g.atoms.push_back({v, 0});
  return g;
}

void push_param(InfoStructure& I, const std::string& name, double value) {
  I.construction.params.emplace_back(name, value);
}

double support_top(const SymmetricPrior& prior) {
  double top = 0.0;
  for (const auto& [profile, p] : prior.pmf) {
    for (int idx : profile) top = std::max(top, prior.values[static_cast<size_t>(idx)]);
  }
  return top;
}

double min_positive_value(const SymmetricPrior& prior) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [profile, p] : prior.pmf) {
    for (int idx : profile) {
      double v = prior.values[static_cast<size_t>(idx)];
      if (v > 0.0) best = std::min(best, v);
    }
  }
  return best;
}

std::vector<double> own_marginal(const SymmetricPrior& prior) {
  std::vector<double> mu(prior.values.size(), 0.0);
  for (const auto& [profile, p] : prior.pmf) mu[static_cast<size_t>(profile[0])] += p;
  return mu;
}

// Value side of an extraction coupling: the modified prior on its positive
// atoms, those atoms resolved back to value indices, and the loser-profile
// law per winner value.
struct ValueSide {
  Dist lambda;
  std::vector<int> value_idx;
  std::vector<std::vector<std::pair<std::vector<int>, double>>> losers;
};

ValueSide make_value_side(const SymmetricPrior& prior, const PriorStats& stats) {
  ValueSide side;
  side.lambda = modified_prior_dist(prior.values, stats);
  for (double a : side.lambda.atoms) {
    auto it = std::lower_bound(prior.values.begin(), prior.values.end(), a);
    side.value_idx.push_back(static_cast<int>(it - prior.values.begin()));
  }
  side.losers.reserve(side.value_idx.size());
  for (int idx : side.value_idx) side.losers.push_back(tie_conditional(stats, idx));
  return side;
}

struct ExtractionKernel {
  ValueSide side;
  SignalWindow window;
  MartingaleCoupling coupling;
};

ExtractionKernel make_extraction_kernel(const SymmetricPrior& prior, const PriorStats& stats,
                                        double eps_cap, int k) {
  ExtractionKernel kernel;
  kernel.side = make_value_side(prior, stats);
  kernel.window = solve_signal_window(stats, prior.values, prior.n_bidders, eps_cap, k);
  Dist g = secmax_dist_uniform(prior.n_bidders, kernel.window);
  kernel.coupling = martingale_coupling(kernel.side.lambda, g);
  return kernel;
}

// Scans an index profile for its maximum, the tie count at the top, and the
// second-highest entry (equal to the top on ties).
void top_stats(const std::vector<int>& sig, int& jmax, int& m, int& jsec) {
  jmax = sig[0];
  m = 1;
  int second = -1;
  for (size_t i = 1; i < sig.size(); ++i) {
    int j = sig[i];
    if (j > jmax) {
      second = jmax;
      jmax = j;
      m = 1;
    } else if (j == jmax) {
      ++m;
    } else if (j > second) {
      second = j;
    }
  }
  jsec = (m > 1) ? jmax : second;
}

// Signals are iid uniform on the window; a designated winner is drawn
// uniformly from the argmax, its value from the coupling row of the realized
// second-highest signal, and the losers from the tie-conditional law. The
// uniform tie split is what keeps the assembled value marginal exact.
void assemble_extraction(const ExtractionKernel& kernel, const ProfileIndex& rows, int n,
                         const std::vector<int>& atom_pos, double scale, JointBuilder& builder) {
  const int k = kernel.window.k;
  const int nv = static_cast<int>(kernel.side.lambda.atoms.size());
  std::vector<std::vector<double>> rowq(static_cast<size_t>(k));
  for (int t = 0; t < k; ++t) rowq[static_cast<size_t>(t)] = kernel.coupling.row_conditional(t);

  double cell = scale;
  for (int i = 0; i < n; ++i) cell /= k;

  std::vector<int> sig(static_cast<size_t>(n), 0);
  std::vector<int> s(static_cast<size_t>(n), 0);
  std::vector<int> profile(static_cast<size_t>(n), 0);
  while (true) {
    int jmax = 0, m = 0, jsec = 0;
    top_stats(sig, jmax, m, jsec);
    for (int i = 0; i < n; ++i) s[static_cast<size_t>(i)] = atom_pos[static_cast<size_t>(sig[static_cast<size_t>(i)])];
    const auto& q = rowq[static_cast<size_t>(jsec)];
    for (int w = 0; w < n; ++w) {
      if (sig[static_cast<size_t>(w)] != jmax) continue;
      for (int a = 0; a < nv; ++a) {
        double qa = q[static_cast<size_t>(a)];
        if (qa <= 0.0) continue;
        profile[static_cast<size_t>(w)] = kernel.side.value_idx[static_cast<size_t>(a)];
        for (const auto& [loser_profile, lw] : kernel.side.losers[static_cast<size_t>(a)]) {
          int pos = 0;
          for (int i = 0; i < n; ++i) {
            if (i == w) continue;
            profile[static_cast<size_t>(i)] = loser_profile[static_cast<size_t>(pos++)];
          }
          int row = rows.find(profile);
          if (row < 0) {
            raise(ErrorCode::InvalidArgument, "extraction assembly left the prior support");
          }
          builder.add(s, row, cell * qa * lw / m);
        }
      }
    }
    int d = 0;
    while (d < n && ++sig[static_cast<size_t>(d)] == k) {
      sig[static_cast<size_t>(d)] = 0;
      ++d;
    }
    if (d == n) break;
  }
}

// Anchor list for the strict target law. Small supports are used as-is;
// large ones are bucketed onto a fixed lattice with an exact two-point mean
// split, which keeps every posterior-mean identity intact.
struct AnchorSet {
  std::vector<double> anchors;
  std::vector<double> mass;
  Dist used;                    // positive-mass anchors, the LP's marginal
  std::vector<int> used_index;  // full anchor index -> used row, or -1
  bool bucketed = false;
};

AnchorSet anchor_target(const Dist& target) {
  AnchorSet as;
  if (target.atoms.size() <= 300) {
    as.anchors = target.atoms;
    as.mass = target.pmf;
  } else {
    const int m = 256;
    double lo = target.atoms.front();
    double hi = target.atoms.back();
    as.anchors.resize(m);
    for (int i = 0; i < m; ++i) {
      as.anchors[static_cast<size_t>(i)] = lo + (hi - lo) * i / (m - 1);
    }
    as.mass.assign(m, 0.0);
    for (size_t i = 0; i < target.atoms.size(); ++i) {
      auto [u, v] = two_point_split(target.atoms[i], as.anchors);
      as.mass[static_cast<size_t>(u.first)] += target.pmf[i] * u.second;
      if (v.second > 0.0) as.mass[static_cast<size_t>(v.first)] += target.pmf[i] * v.second;
    }
    as.bucketed = true;
  }
  as.used_index.assign(as.anchors.size(), -1);
  for (size_t i = 0; i < as.anchors.size(); ++i) {
    if (as.mass[i] > 0.0) {
      as.used_index[i] = static_cast<int>(as.used.atoms.size());
      as.used.atoms.push_back(as.anchors[i]);
      as.used.pmf.push_back(as.mass[i]);
    }
  }
  return as;
}

// Shape of a bidder-surplus-friendly profile: common value, or exactly one
// bidder with a positive value.
struct ProfileShape {
  bool constant = false;
  int active = -1;
};

ProfileShape classify_profile(const SymmetricPrior& prior, const std::vector<int>& profile) {
  ProfileShape shape;
  shape.constant = std::all_of(profile.begin(), profile.end(),
                               [&](int idx) { return idx == profile[0]; });
  if (shape.constant) return shape;
  int positives = 0;
  for (size_t i = 0; i < profile.size(); ++i) {
    if (prior.values[static_cast<size_t>(profile[i])] > 0.0) {
      ++positives;
      shape.active = static_cast<int>(i);
    }
  }
  if (positives != 1) {
    raise(ErrorCode::WrongPriorClass,
          "profile is neither constant nor single-active; prior misclassified");
  }
  return shape;
}

}  // namespace

InfoStructure build_fully_revealing(const SymmetricPrior& prior) {
  validate(prior);
  const int n = prior.n_bidders;
  std::vector<double> mu = own_marginal(prior);
  SignalGrid grid;
  std::vector<int> atom_of(prior.values.size(), -1);
  for (size_t i = 0; i < prior.values.size(); ++i) {
    if (mu[i] > 0.0) {
      atom_of[i] = grid.size();
      grid.atoms.push_back({prior.values[i], 0});
    }
  }
  InfoStructure I;
  I.prior = prior;
  I.grids.assign(static_cast<size_t>(n), grid);
  JointBuilder builder(I);
  std::vector<int> s(static_cast<size_t>(n), 0);
  for (size_t row = 0; row < prior.pmf.size(); ++row) {
    const auto& [profile, p] = prior.pmf[row];
    for (int i = 0; i < n; ++i) s[static_cast<size_t>(i)] = atom_of[static_cast<size_t>(profile[static_cast<size_t>(i)])];
    builder.add(s, static_cast<int>(row), p);
  }
  I.joint = builder.finish();
  I.construction.kind = "fully-revealing";
  validate_structure(I);
  return I;
}

InfoStructure build_full_extraction(const SymmetricPrior& prior, int k, double eps_cap) {
  validate(prior);
  if (k < 2) raise(ErrorCode::InvalidArgument, "grid size must be at least 2");
  if (!(eps_cap > 0.0)) raise(ErrorCode::InvalidArgument, "eps_cap must be positive");
  PriorStats stats = compute_stats(prior);
  const int n = prior.n_bidders;
  ExtractionKernel kernel = make_extraction_kernel(prior, stats, eps_cap, k);

  InfoStructure I;
  I.prior = prior;
  I.grids.assign(static_cast<size_t>(n), window_grid(kernel.window));
  JointBuilder builder(I);
  ProfileIndex rows(prior);
  std::vector<int> atom_pos(static_cast<size_t>(k));
  std::iota(atom_pos.begin(), atom_pos.end(), 0);
  assemble_extraction(kernel, rows, n, atom_pos, 1.0, builder);
  I.joint = builder.finish();
  I.construction.kind = "full-extraction";
  push_param(I, "K", k);
  push_param(I, "eps_cap", eps_cap);
  push_param(I, "s_hat", kernel.window.s_hat);
  push_param(I, "length", kernel.window.length);
  validate_structure(I);
  return I;
}

InfoStructure build_strict_eps(const SymmetricPrior& prior, double eps, int k) {
  validate(prior);
  if (!(eps > 0.0) || eps >= 1.0) raise(ErrorCode::InvalidArgument, "eps must lie in (0, 1)");
  if (k < 2) raise(ErrorCode::InvalidArgument, "grid size must be at least 2");
  PriorStats stats = compute_stats(prior);
  const int n = prior.n_bidders;
  ValueSide side = make_value_side(prior, stats);
  if (side.lambda.atoms.size() < 2) {
    raise(ErrorCode::WindowUnderflow, "modified prior is a point mass; no informative window exists");
  }
  const double top = side.lambda.atoms.back();

  // The window is recentered each trial so the anchored target's mean lands
  // on v_hat; the target map is translation-equivariant, so the offset can be
  // measured once per length on a window starting at zero.
  double length = eps;
  SignalWindow window;
  AnchorSet anchors;
  bool ok = false;
  for (int iter = 0; iter < 40 && !ok; ++iter) {
    Dist base = strict_target_distribution(n, make_window(0.0, length, k), eps);
    double s_hat = stats.v_hat - base.mean();
    if (s_hat >= -1e-15 && s_hat + length <= top + 1e-12) {
      window = make_window(s_hat, length, k);
      anchors = anchor_target(strict_target_distribution(n, window, eps));
      if (mpc_check(side.lambda, anchors.used).ok) ok = true;
    }
    if (!ok) length *= 0.5;
  }
  if (!ok) {
    raise(ErrorCode::WindowUnderflow, "no window length admits the strict target law");
  }

  MartingaleCoupling coupling = martingale_coupling(side.lambda, anchors.used);
  const int nv = static_cast<int>(side.lambda.atoms.size());
  std::vector<std::vector<double>> rowq(anchors.used.atoms.size());
  for (size_t t = 0; t < rowq.size(); ++t) rowq[t] = coupling.row_conditional(static_cast<int>(t));

  InfoStructure I;
  I.prior = prior;
  I.grids.assign(static_cast<size_t>(n), window_grid(window));
  JointBuilder builder(I);
  ProfileIndex rows(prior);

  double cell = 1.0;
  for (int i = 0; i < n; ++i) cell /= k;
  std::vector<int> sig(static_cast<size_t>(n), 0);
  std::vector<int> profile(static_cast<size_t>(n), 0);
  std::vector<std::pair<int, double>> refs;
  while (true) {
    int jmax = 0, m = 0, jsec = 0;
    top_stats(sig, jmax, m, jsec);
    for (int w = 0; w < n; ++w) {
      if (sig[static_cast<size_t>(w)] != jmax) continue;
      double y = (m == 1) ? strict_value_target(window.atoms[static_cast<size_t>(jmax)],
                                                window.atoms[static_cast<size_t>(jsec)],
                                                window.s_hat, eps, n)
                          : window.atoms[static_cast<size_t>(jmax)];
      refs.clear();
      if (!anchors.bucketed) {
        auto it = std::lower_bound(anchors.anchors.begin(), anchors.anchors.end(), y);
        if (it == anchors.anchors.end() || *it != y) {
          raise(ErrorCode::InvalidArgument, "strict target atom missing from its own pushforward");
        }
        refs.emplace_back(anchors.used_index[static_cast<size_t>(it - anchors.anchors.begin())], 1.0);
      } else {
        auto [u, v] = two_point_split(y, anchors.anchors);
        refs.emplace_back(anchors.used_index[static_cast<size_t>(u.first)], u.second);
        if (v.second > 0.0) refs.emplace_back(anchors.used_index[static_cast<size_t>(v.first)], v.second);
      }
      for (const auto& [rid, wt] : refs) {
        if (rid < 0 || wt <= 0.0) continue;
        const auto& q = rowq[static_cast<size_t>(rid)];
        for (int a = 0; a < nv; ++a) {
          double qa = q[static_cast<size_t>(a)];
          if (qa <= 0.0) continue;
          profile[static_cast<size_t>(w)] = side.value_idx[static_cast<size_t>(a)];
          for (const auto& [loser_profile, lw] : side.losers[static_cast<size_t>(a)]) {
            int pos = 0;
            for (int i = 0; i < n; ++i) {
              if (i == w) continue;
              profile[static_cast<size_t>(i)] = loser_profile[static_cast<size_t>(pos++)];
            }
            int row = rows.find(profile);
            if (row < 0) raise(ErrorCode::InvalidArgument, "strict assembly left the prior support");
            builder.add(sig, row, cell * wt * qa * lw / m);
          }
        }
      }
    }
    int d = 0;
    while (d < n && ++sig[static_cast<size_t>(d)] == k) {
      sig[static_cast<size_t>(d)] = 0;
      ++d;
    }
    if (d == n) break;
  }

  I.joint = builder.finish();
  I.construction.kind = "strict";
  push_param(I, "eps", eps);
  push_param(I, "K", k);
  push_param(I, "s_hat", window.s_hat);
  push_param(I, "length", window.length);
  push_param(I, "anchors", static_cast<double>(anchors.used.atoms.size()));
  validate_structure(I);
  return I;
}

InfoStructure build_degenerate_max(const SymmetricPrior& prior, double eps) {
  validate(prior);
  if (!(eps > 0.0)) raise(ErrorCode::InvalidArgument, "eps must be positive");
  if (classify_prior(prior) != PriorClass::DegenerateMax) {
    raise(ErrorCode::WrongPriorClass, "prior does not have a degenerate maximum");
  }
  const int n = prior.n_bidders;
  const double v_top = support_top(prior);

  // Winner shares and cross conditional means, keyed by the lowest-indexed
  // argmax bidder.
  std::vector<double> w(static_cast<size_t>(n), 0.0);
  std::vector<std::vector<double>> cross(static_cast<size_t>(n),
                                         std::vector<double>(static_cast<size_t>(n), 0.0));
  for (const auto& [profile, p] : prior.pmf) {
    int istar = 0;
    for (int i = 1; i < n; ++i) {
      if (profile[static_cast<size_t>(i)] > profile[static_cast<size_t>(istar)]) istar = i;
    }
    w[static_cast<size_t>(istar)] += p;
    for (int j = 0; j < n; ++j) {
      cross[static_cast<size_t>(j)][static_cast<size_t>(istar)] += p * prior.value_at(profile, j);
    }
  }

  double lo = v_top - eps;
  for (int i = 1; i < n; ++i) {
    if (w[static_cast<size_t>(i)] <= 0.0) continue;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      lo = std::max(lo, cross[static_cast<size_t>(j)][static_cast<size_t>(i)] / w[static_cast<size_t>(i)]);
    }
  }
  if (lo >= v_top - 1e-15) {
    raise(ErrorCode::WrongPriorClass,
          "conditional winner means leave no room below the common peak");
  }
  const double span = v_top - lo;

  std::vector<double> high(static_cast<size_t>(n)), low(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    high[static_cast<size_t>(i)] = (i == 0) ? v_top : v_top - i * span / (2.0 * n);
    low[static_cast<size_t>(i)] = v_top - (n + i) * span / (2.0 * n);
  }

  // Draw probabilities that make the hierarchical signal law a product law.
  // Both branch probabilities are formed as ratios against the same suffix
  // sum, so a branch is exactly zero precisely when no event can use it, and
  // atom presence below matches event usage with no tolerance in between.
  std::vector<double> suffix(static_cast<size_t>(n) + 1, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    suffix[static_cast<size_t>(i)] = w[static_cast<size_t>(i)] + suffix[static_cast<size_t>(i) + 1];
  }
  std::vector<double> p_high(static_cast<size_t>(n), 0.0), p_low(static_cast<size_t>(n), 1.0);
  for (int i = 0; i < n; ++i) {
    double denom = suffix[static_cast<size_t>(i)];
    if (denom > 0.0) {
      p_high[static_cast<size_t>(i)] = w[static_cast<size_t>(i)] / denom;
      p_low[static_cast<size_t>(i)] = suffix[static_cast<size_t>(i) + 1] / denom;
    }
  }

  std::vector<double> mass_high(static_cast<size_t>(n), 0.0), mass_low(static_cast<size_t>(n), 0.0);
  double prefix = 0.0;
  for (int i = 0; i < n; ++i) {
    mass_high[static_cast<size_t>(i)] =
        w[static_cast<size_t>(i)] + prefix * p_high[static_cast<size_t>(i)];
    mass_low[static_cast<size_t>(i)] =
        suffix[static_cast<size_t>(i) + 1] + prefix * p_low[static_cast<size_t>(i)];
    prefix += w[static_cast<size_t>(i)];
  }

  InfoStructure I;
  I.prior = prior;
  I.grids.resize(static_cast<size_t>(n));
  std::vector<int> idx_low(static_cast<size_t>(n), -1), idx_high(static_cast<size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    auto& grid = I.grids[static_cast<size_t>(i)];
    if (mass_low[static_cast<size_t>(i)] > 0.0) {
      idx_low[static_cast<size_t>(i)] = grid.size();
      grid.atoms.push_back({low[static_cast<size_t>(i)], 0});
    }
    if (mass_high[static_cast<size_t>(i)] > 0.0) {
      idx_high[static_cast<size_t>(i)] = grid.size();
      grid.atoms.push_back({high[static_cast<size_t>(i)], 0});
    }
  }

  JointBuilder builder(I);
  std::vector<int> s(static_cast<size_t>(n), 0);
  std::vector<int> drawers;
  for (size_t row = 0; row < prior.pmf.size(); ++row) {
    const auto& [profile, p] = prior.pmf[row];
    int istar = 0;
    for (int i = 1; i < n; ++i) {
      if (profile[static_cast<size_t>(i)] > profile[static_cast<size_t>(istar)]) istar = i;
    }
    for (int j = 0; j < istar; ++j) s[static_cast<size_t>(j)] = idx_low[static_cast<size_t>(j)];
    s[static_cast<size_t>(istar)] = idx_high[static_cast<size_t>(istar)];
    drawers.clear();
    for (int j = istar + 1; j < n; ++j) drawers.push_back(j);
    const uint32_t patterns = 1u << drawers.size();
    for (uint32_t mask = 0; mask < patterns; ++mask) {
      double wgt = p;
      for (size_t b = 0; b < drawers.size(); ++b) {
        int j = drawers[b];
        bool hi = (mask >> b) & 1u;
        wgt *= hi ? p_high[static_cast<size_t>(j)] : p_low[static_cast<size_t>(j)];
        s[static_cast<size_t>(j)] = hi ? idx_high[static_cast<size_t>(j)] : idx_low[static_cast<size_t>(j)];
      }
      if (wgt <= 0.0) continue;
      builder.add(s, static_cast<int>(row), wgt);
    }
  }
  I.joint = builder.finish();
  I.construction.kind = "degenerate-max";
  push_param(I, "eps", eps);
  push_param(I, "span", span);
  push_param(I, "floor", lo);
  push_param(I, "v_top", v_top);
  validate_structure(I);
  return I;
}

InfoStructure build_bidder_surplus(const SymmetricPrior& prior, double eps) {
  validate(prior);
  if (!(eps > 0.0)) raise(ErrorCode::InvalidArgument, "eps must be positive");
  if (classify_prior(prior) != PriorClass::BidderSurplusFriendly) {
    raise(ErrorCode::WrongPriorClass, "prior is not bidder-surplus friendly");
  }
  const int n = prior.n_bidders;
  const double v_top = support_top(prior);
  InfoStructure I;
  I.prior = prior;
  I.construction.kind = "bidder-surplus";
  push_param(I, "eps", eps);

  if (v_top <= 0.0) {
    // Everything is worthless; a silent structure is as good as any.
    SignalGrid grid;
    grid.atoms.push_back({0.0, 0});
    I.grids.assign(static_cast<size_t>(n), grid);
    JointBuilder builder(I);
    std::vector<int> s(static_cast<size_t>(n), 0);
    for (size_t row = 0; row < prior.pmf.size(); ++row) builder.add(s, static_cast<int>(row), prior.pmf[row].second);
    I.joint = builder.finish();
    validate_structure(I);
    return I;
  }
  double minpos = min_positive_value(prior);
  if (eps >= minpos) {
    raise(ErrorCode::EpsilonTooLarge, "eps must stay below the smallest positive valuation");
  }

  if (n == 2) {
    // One bidder learns its value; the other receives uniform noise below
    // every positive bid, so it wins exactly the events where the informed
    // bidder is worthless and pays nothing there.
    std::vector<double> mu = own_marginal(prior);
    SignalGrid grid0;
    std::vector<int> atom_of(prior.values.size(), -1);
    for (size_t i = 0; i < prior.values.size(); ++i) {
      if (mu[i] > 0.0) {
        atom_of[i] = grid0.size();
        grid0.atoms.push_back({prior.values[i], 0});
      }
    }
    const int noise = 8;
    SignalGrid grid1;
    for (int j = 0; j < noise; ++j) grid1.atoms.push_back({eps * (j + 0.5) / noise, 0});
    I.grids = {grid0, grid1};
    JointBuilder builder(I);
    std::vector<int> s(2, 0);
    for (size_t row = 0; row < prior.pmf.size(); ++row) {
      const auto& [profile, p] = prior.pmf[row];
      s[0] = atom_of[static_cast<size_t>(profile[0])];
      for (int j = 0; j < noise; ++j) {
        s[1] = j;
        builder.add(s, static_cast<int>(row), p / noise);
      }
    }
    I.joint = builder.finish();
    validate_structure(I);
    return I;
  }

  // n >= 3: hierarchical tiers below eps. Bidder 0 signals the common peak on
  // correlated events; bidder i's positive tier sits at (n - i) eps / n; the
  // last bidder's alphabet is a single tier that every other tier dominates.
  double q2 = 0.0;
  for (const auto& [profile, p] : prior.pmf) {
    if (!classify_profile(prior, profile).constant) q2 += p;
  }
  std::vector<double> tier(static_cast<size_t>(n), 0.0);
  for (int i = 1; i < n; ++i) tier[static_cast<size_t>(i)] = (n - i) * eps / n;

  I.grids.resize(static_cast<size_t>(n));
  std::vector<int> idx_low(static_cast<size_t>(n), -1), idx_high(static_cast<size_t>(n), -1);
  {
    auto& g0 = I.grids[0];
    if (q2 > 0.0) {
      idx_low[0] = 0;
      g0.atoms.push_back({0.0, 0});
    }
    idx_high[0] = g0.size();
    g0.atoms.push_back({v_top, 0});
    for (int i = 1; i + 1 < n; ++i) {
      auto& g = I.grids[static_cast<size_t>(i)];
      idx_low[static_cast<size_t>(i)] = 0;
      g.atoms.push_back({0.0, 0});
      idx_high[static_cast<size_t>(i)] = 1;
      g.atoms.push_back({tier[static_cast<size_t>(i)], 0});
    }
    auto& gl = I.grids[static_cast<size_t>(n - 1)];
    idx_high[static_cast<size_t>(n - 1)] = 0;
    gl.atoms.push_back({tier[static_cast<size_t>(n - 1)], 0});
  }

  JointBuilder builder(I);
  std::vector<int> s(static_cast<size_t>(n), 0);
  std::vector<int> drawers;
  for (size_t row = 0; row < prior.pmf.size(); ++row) {
    const auto& [profile, p] = prior.pmf[row];
    ProfileShape shape = classify_profile(prior, profile);
    int anchor = shape.constant ? 0 : shape.active;
    for (int j = 0; j < anchor; ++j) s[static_cast<size_t>(j)] = idx_low[static_cast<size_t>(j)];
    s[static_cast<size_t>(anchor)] = idx_high[static_cast<size_t>(anchor)];
    s[static_cast<size_t>(n - 1)] = idx_high[static_cast<size_t>(n - 1)];
    drawers.clear();
    for (int j = anchor + 1; j + 1 < n; ++j) drawers.push_back(j);
    const uint32_t patterns = 1u << drawers.size();
    for (uint32_t mask = 0; mask < patterns; ++mask) {
      double wgt = p;
      for (size_t b = 0; b < drawers.size(); ++b) {
        int j = drawers[b];
        bool hi = (mask >> b) & 1u;
        double ph = 1.0 / (n - j);
        wgt *= hi ? ph : (1.0 - ph);
        s[static_cast<size_t>(j)] = hi ? idx_high[static_cast<size_t>(j)] : idx_low[static_cast<size_t>(j)];
      }
      if (wgt <= 0.0) continue;
      builder.add(s, static_cast<int>(row), wgt);
    }
  }
  I.joint = builder.finish();
  validate_structure(I);
  return I;
}

InfoStructure build_frontier_alpha(const SymmetricPrior& prior, const FrontierParams& params) {
  validate(prior);
  const int n = prior.n_bidders;
  const double alpha_max = static_cast<double>(n - 1) / n;
  double alpha = params.alpha;
  if (alpha < -1e-12 || alpha > alpha_max + 1e-12) {
    raise(ErrorCode::AlphaOutOfRange, "alpha must lie in [0, (n-1)/n]");
  }
  alpha = std::clamp(alpha, 0.0, alpha_max);
  if (!(params.eps > 0.0)) raise(ErrorCode::InvalidArgument, "eps must be positive");
  if (classify_prior(prior) != PriorClass::BidderSurplusFriendly) {
    raise(ErrorCode::WrongPriorClass, "prior is not bidder-surplus friendly");
  }
  const double v_top = support_top(prior);

  InfoStructure I;
  I.prior = prior;
  I.construction.kind = "alpha";
  push_param(I, "alpha", alpha);
  push_param(I, "eps", params.eps);

  if (v_top <= 0.0) {
    SignalGrid grid;
    grid.atoms.push_back({0.0, 0});
    I.grids.assign(static_cast<size_t>(n), grid);
    JointBuilder builder(I);
    std::vector<int> s(static_cast<size_t>(n), 0);
    for (size_t row = 0; row < prior.pmf.size(); ++row) builder.add(s, static_cast<int>(row), prior.pmf[row].second);
    I.joint = builder.finish();
    validate_structure(I);
    return I;
  }

  double q1 = 0.0, q2 = 0.0, common_sum = 0.0, active_sum = 0.0;
  for (const auto& [profile, p] : prior.pmf) {
    ProfileShape shape = classify_profile(prior, profile);
    if (shape.constant) {
      q1 += p;
      common_sum += p * prior.value_at(profile, 0);
    } else {
      q2 += p;
      active_sum += p * prior.value_at(profile, shape.active);
    }
  }
  const double v_common = (q1 > 0.0) ? common_sum / q1 : 0.0;
  const double v_active = (q2 > 0.0) ? active_sum / q2 : 0.0;

  // Posterior weight of correlated events at a winning mid-tier signal; the
  // hierarchy makes it the same for every such tier.
  double theta_num = q1 * alpha / (n - 1);
  double theta_den = theta_num + q2 / n;
  double theta = (theta_den <= 0.0) ? 0.0 : theta_num / theta_den;

  double lo = theta * v_common;
  double den1 = q1 * (1.0 - alpha) + q2 / n;
  double vwin1 = (den1 > 0.0) ? ((q2 / n) * v_active + q1 * (1.0 - alpha) * v_common) / den1 : v_top;
  double hi = vwin1;
  if (theta_den > 0.0) hi = std::min(hi, (1.0 - theta) * v_active + theta * v_common);
  if (hi - lo <= 1e-12) {
    raise(ErrorCode::NoFeasibleSignalGap, "no signal gap fits between the posterior bounds");
  }

  const double gap = std::min(params.eps, (hi - lo) / 2.0);
  const double tfrac = (alpha_max > 0.0) ? alpha / alpha_max : 0.0;
  const double s_low = lo + tfrac * (hi - lo - gap);
  std::vector<double> s_high(static_cast<size_t>(n), 0.0);
  for (int i = 1; i < n; ++i) {
    s_high[static_cast<size_t>(i)] = s_low + gap * (n - i) / (n - 1);
  }
  if (!(s_low >= 0.0) || s_high[1] >= v_top) {
    raise(ErrorCode::NoFeasibleSignalGap, "signal tiers collide with the value range");
  }

  I.grids.resize(static_cast<size_t>(n));
  std::vector<int> idx_low(static_cast<size_t>(n), -1), idx_high(static_cast<size_t>(n), -1);
  {
    auto& g0 = I.grids[0];
    if (q1 * alpha + q2 * (n - 1) / n > 1e-15) {
      idx_low[0] = 0;
      g0.atoms.push_back({s_low, 0});
    }
    idx_high[0] = g0.size();
    g0.atoms.push_back({v_top, 0});
    for (int i = 1; i + 1 < n; ++i) {
      auto& g = I.grids[static_cast<size_t>(i)];
      idx_low[static_cast<size_t>(i)] = 0;
      g.atoms.push_back({s_low, 0});
      idx_high[static_cast<size_t>(i)] = 1;
      g.atoms.push_back({s_high[static_cast<size_t>(i)], 0});
    }
    auto& gl = I.grids[static_cast<size_t>(n - 1)];
    idx_high[static_cast<size_t>(n - 1)] = 0;
    gl.atoms.push_back({s_high[static_cast<size_t>(n - 1)], 0});
  }

  JointBuilder builder(I);
  std::vector<int> s(static_cast<size_t>(n), 0);
  std::vector<int> drawers;
  for (size_t row = 0; row < prior.pmf.size(); ++row) {
    const auto& [profile, p] = prior.pmf[row];
    ProfileShape shape = classify_profile(prior, profile);
    int anchor = shape.constant ? 0 : shape.active;
    for (int j = 0; j < anchor; ++j) s[static_cast<size_t>(j)] = idx_low[static_cast<size_t>(j)];
    s[static_cast<size_t>(n - 1)] = idx_high[static_cast<size_t>(n - 1)];
    drawers.clear();
    for (int j = anchor + 1; j + 1 < n; ++j) drawers.push_back(j);
    const uint32_t patterns = 1u << drawers.size();
    // Correlated events split bidder 0's signal between the peak and the
    // low tier; active events pin the anchor bidder to its own tier.
    const int branches = shape.constant ? 2 : 1;
    for (int br = 0; br < branches; ++br) {
      double base = p;
      if (shape.constant) {
        base *= (br == 0) ? (1.0 - alpha) : alpha;
        s[0] = (br == 0) ? idx_high[0] : idx_low[0];
      } else {
        s[static_cast<size_t>(anchor)] = idx_high[static_cast<size_t>(anchor)];
      }
      if (base <= 0.0) continue;
      for (uint32_t mask = 0; mask < patterns; ++mask) {
        double wgt = base;
        for (size_t b = 0; b < drawers.size(); ++b) {
          int j = drawers[b];
          bool hi_draw = (mask >> b) & 1u;
          double ph = 1.0 / (n - j);
          wgt *= hi_draw ? ph : (1.0 - ph);
          s[static_cast<size_t>(j)] = hi_draw ? idx_high[static_cast<size_t>(j)] : idx_low[static_cast<size_t>(j)];
        }
        if (wgt <= 0.0) continue;
        builder.add(s, static_cast<int>(row), wgt);
      }
    }
  }
  I.joint = builder.finish();
  push_param(I, "s_low", s_low);
  push_param(I, "gap", gap);
  push_param(I, "theta", theta);
  push_param(I, "floor", lo);
  push_param(I, "ceiling", hi);
  validate_structure(I);
  return I;
}

InfoStructure build_ipv_hybrid(const SymmetricPrior& prior, const FrontierParams& params) {
  validate(prior);
  const double t = params.t;
  const double q = params.q;
  if (q < 0.0 || q > 1.0) raise(ErrorCode::InvalidArgument, "q must lie in [0, 1]");
  if (t < 0.0 || t > 1.0) raise(ErrorCode::InvalidArgument, "t must lie in [0, 1]");
  if (params.k_low < 2) raise(ErrorCode::InvalidArgument, "grid size must be at least 2");
  const int n = prior.n_bidders;

  std::vector<double> mu = own_marginal(prior);
  std::vector<int> positive;
  for (size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] > 0.0) positive.push_back(static_cast<int>(i));
  }
  {
    // The construction needs value independence across bidders; check the
    // full product table against the support.
    ProfileIndex rows(prior);
    std::vector<int> pick(static_cast<size_t>(n), 0);
    std::vector<int> profile(static_cast<size_t>(n), 0);
    while (true) {
      double expected = 1.0;
      for (int i = 0; i < n; ++i) {
        profile[static_cast<size_t>(i)] = positive[static_cast<size_t>(pick[static_cast<size_t>(i)])];
        expected *= mu[static_cast<size_t>(profile[static_cast<size_t>(i)])];
      }
      int row = rows.find(profile);
      double actual = (row >= 0) ? prior.pmf[static_cast<size_t>(row)].second : 0.0;
      if (std::abs(actual - expected) > 1e-9) {
        raise(ErrorCode::NotProductPrior, "prior is not a product of its own marginal");
      }
      int d = 0;
      while (d < n && ++pick[static_cast<size_t>(d)] == static_cast<int>(positive.size())) {
        pick[static_cast<size_t>(d)] = 0;
        ++d;
      }
      if (d == n) break;
    }
  }

  // Split each bidder's value law at the threshold; mass exactly at t goes
  // high with probability q.
  int t_idx = -1;
  for (size_t i = 0; i < prior.values.size(); ++i) {
    if (std::abs(prior.values[i] - t) <= 1e-12 && mu[i] > 0.0) t_idx = static_cast<int>(i);
  }
  std::vector<std::pair<int, double>> high_mass, low_mass;  // (value index, probability)
  for (int idx : positive) {
    double v = prior.values[static_cast<size_t>(idx)];
    if (idx == t_idx) {
      if (q > 0.0) high_mass.emplace_back(idx, q * mu[static_cast<size_t>(idx)]);
      if (q < 1.0) low_mass.emplace_back(idx, (1.0 - q) * mu[static_cast<size_t>(idx)]);
    } else if (v > t) {
      high_mass.emplace_back(idx, mu[static_cast<size_t>(idx)]);
    } else {
      low_mass.emplace_back(idx, mu[static_cast<size_t>(idx)]);
    }
  }
  double p_high = 0.0;
  for (const auto& [idx, p] : high_mass) p_high += p;
  double p_low = 1.0 - p_high;

  if (p_high <= 1e-15) {
    InfoStructure I = build_full_extraction(prior, params.k_low, params.eps_cap_low);
    I.construction.kind = "ipv";
    I.construction.params.emplace(I.construction.params.begin(), "q", q);
    I.construction.params.emplace(I.construction.params.begin(), "t", t);
    return I;
  }

  InfoStructure I;
  I.prior = prior;
  I.construction.kind = "ipv";
  push_param(I, "t", t);
  push_param(I, "q", q);
  push_param(I, "p_high", p_high);

  if (p_low <= 1e-15) {
    // Everyone reveals; this is the fully-informed benchmark.
    InfoStructure R = build_fully_revealing(prior);
    R.construction = I.construction;
    return R;
  }

  double min_high = std::numeric_limits<double>::infinity();
  for (const auto& [idx, p] : high_mass) min_high = std::min(min_high, prior.values[static_cast<size_t>(idx)]);

  // Low side: either a single revealed atom, or an extraction kernel on the
  // conditional product prior, squeezed strictly below every high bid.
  bool low_degenerate = low_mass.size() == 1;
  SymmetricPrior low_prior;
  PriorStats low_stats;
  ExtractionKernel kernel;
  if (!low_degenerate) {
    low_prior.n_bidders = n;
    low_prior.values = prior.values;
    std::vector<int> pick(static_cast<size_t>(n), 0);
    std::vector<int> profile(static_cast<size_t>(n), 0);
    while (true) {
      double mass = 1.0;
      for (int i = 0; i < n; ++i) {
        profile[static_cast<size_t>(i)] = low_mass[static_cast<size_t>(pick[static_cast<size_t>(i)])].first;
        mass *= low_mass[static_cast<size_t>(pick[static_cast<size_t>(i)])].second / p_low;
      }
      low_prior.pmf.emplace_back(profile, mass);
      int d = 0;
      while (d < n && ++pick[static_cast<size_t>(d)] == static_cast<int>(low_mass.size())) {
        pick[static_cast<size_t>(d)] = 0;
        ++d;
      }
      if (d == n) break;
    }
    validate(low_prior);
    low_stats = compute_stats(low_prior);
    double cap = std::min(params.eps_cap_low, (min_high - low_stats.v_hat) / 2.0);
    if (!(cap > 0.0)) {
      raise(ErrorCode::WindowUnderflow, "no room for a low window under the first high bid");
    }
    kernel = make_extraction_kernel(low_prior, low_stats, cap, params.k_low);
    push_param(I, "s_hat", kernel.window.s_hat);
    push_param(I, "length", kernel.window.length);
  }

  // Common grid: low atoms first (window or single reveal), then the high
  // values revealed verbatim. The window sits strictly below min_high, so
  // the merged grid stays strictly ascending, except in the corner where the
  // single low atom is the boundary value itself and merges with its reveal.
  std::set<SignalAtom> atom_set;
  if (low_degenerate) {
    atom_set.insert({prior.values[static_cast<size_t>(low_mass[0].first)], 0});
  } else {
    for (double v : kernel.window.atoms) atom_set.insert({v, 0});
  }
  for (const auto& [idx, p] : high_mass) atom_set.insert({prior.values[static_cast<size_t>(idx)], 0});
  SignalGrid grid;
  grid.atoms.assign(atom_set.begin(), atom_set.end());
  I.grids.assign(static_cast<size_t>(n), grid);

  std::vector<int> low_pos;
  if (low_degenerate) {
    low_pos.push_back(grid.find({prior.values[static_cast<size_t>(low_mass[0].first)], 0}));
  } else {
    for (double v : kernel.window.atoms) low_pos.push_back(grid.find({v, 0}));
  }
  std::vector<int> high_pos(prior.values.size(), -1);
  for (const auto& [idx, p] : high_mass) {
    high_pos[static_cast<size_t>(idx)] = grid.find({prior.values[static_cast<size_t>(idx)], 0});
  }

  JointBuilder builder(I);
  ProfileIndex rows(prior);

  // All-low block: the extraction kernel, scaled by the block probability.
  double p_all_low = 1.0;
  for (int i = 0; i < n; ++i) p_all_low *= p_low;
  if (low_degenerate) {
    std::vector<int> s(static_cast<size_t>(n), low_pos[0]);
    std::vector<int> profile(static_cast<size_t>(n), low_mass[0].first);
    int row = rows.find(profile);
    if (row < 0) raise(ErrorCode::InvalidArgument, "all-low profile missing from the support");
    builder.add(s, row, p_all_low);
  } else {
    ProfileIndex full_rows(prior);
    assemble_extraction(kernel, full_rows, n, low_pos, p_all_low, builder);
  }

  // Mixed blocks: highs reveal their value; lows draw a uniform window atom
  // (or the single low atom) independently of their value, which is exactly
  // the value-independent signal remap that keeps the window shared.
  struct Choice {
    int value_idx;
    int atom_pos;
    double p;
  };
  std::vector<Choice> high_menu, low_menu;
  for (const auto& [idx, p] : high_mass) {
    high_menu.push_back({idx, high_pos[static_cast<size_t>(idx)], p});
  }
  for (const auto& [idx, p] : low_mass) {
    if (low_degenerate) {
      low_menu.push_back({idx, low_pos[0], p});
    } else {
      for (int j = 0; j < kernel.window.k; ++j) {
        low_menu.push_back({idx, low_pos[static_cast<size_t>(j)], p / kernel.window.k});
      }
    }
  }

  std::vector<int> s(static_cast<size_t>(n), 0);
  std::vector<int> profile(static_cast<size_t>(n), 0);
  for (uint32_t pattern = 1; pattern < (1u << n); ++pattern) {
    std::vector<const std::vector<Choice>*> menu(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      menu[static_cast<size_t>(i)] = ((pattern >> i) & 1u) ? &high_menu : &low_menu;
    }
    std::vector<int> pick(static_cast<size_t>(n), 0);
    while (true) {
      double mass = 1.0;
      for (int i = 0; i < n; ++i) {
        const Choice& c = (*menu[static_cast<size_t>(i)])[static_cast<size_t>(pick[static_cast<size_t>(i)])];
        profile[static_cast<size_t>(i)] = c.value_idx;
        s[static_cast<size_t>(i)] = c.atom_pos;
        mass *= c.p;
      }
      if (mass > 0.0) {
        int row = rows.find(profile);
        if (row < 0) raise(ErrorCode::InvalidArgument, "mixed block left the prior support");
        builder.add(s, row, mass);
      }
      int d = 0;
      while (d < n && ++pick[static_cast<size_t>(d)] ==
                          static_cast<int>(menu[static_cast<size_t>(d)]->size())) {
        pick[static_cast<size_t>(d)] = 0;
        ++d;
      }
      if (d == n) break;
    }
  }

  I.joint = builder.finish();
  push_param(I, "k_low", params.k_low);
  validate_structure(I);
  return I;
}

InfoStructure build_point_A(const SymmetricPrior& prior) {
  validate(prior);
  PriorStats stats = compute_stats(prior);
  const int n = prior.n_bidders;
  std::set<double> atom_values{0.0};
  for (size_t i = 0; i < prior.values.size(); ++i) {
    if (stats.modified_prior[i] > 0.0) atom_values.insert(prior.values[i]);
  }
  InfoStructure I;
  I.prior = prior;
  SignalGrid grid;
  for (double v : atom_values) grid.atoms.push_back({v, 0});
  I.grids.assign(static_cast<size_t>(n), grid);
  const int null_atom = grid.find({0.0, 0});

  JointBuilder builder(I);
  std::vector<int> s(static_cast<size_t>(n), 0);
  for (size_t row = 0; row < prior.pmf.size(); ++row) {
    const auto& [profile, p] = prior.pmf[row];
    int top_idx = *std::max_element(profile.begin(), profile.end());
    int top_atom = grid.find({prior.values[static_cast<size_t>(top_idx)], 0});
    int m = tie_count_indices(profile);
    for (int w = 0; w < n; ++w) {
      if (profile[static_cast<size_t>(w)] != top_idx) continue;
      std::fill(s.begin(), s.end(), null_atom);
      s[static_cast<size_t>(w)] = top_atom;
      builder.add(s, static_cast<int>(row), p / m);
    }
  }
  I.joint = builder.finish();
  I.construction.kind = "point-A";
  validate_structure(I);
  return I;
}

InfoStructure build_point_C(const SymmetricPrior& prior) {
  validate(prior);
  const int n = prior.n_bidders;
  const double v_top = support_top(prior);
  InfoStructure I;
  I.prior = prior;
  SignalGrid grid;
  grid.atoms.push_back({0.0, 0});
  if (v_top > 0.0) grid.atoms.push_back({v_top, 0});
  I.grids.assign(static_cast<size_t>(n), grid);
  const int flag_atom = grid.size() - 1;

  JointBuilder builder(I);
  std::vector<int> s(static_cast<size_t>(n), 0);
  for (size_t row = 0; row < prior.pmf.size(); ++row) {
    const auto& [profile, p] = prior.pmf[row];
    int low_idx = *std::min_element(profile.begin(), profile.end());
    int m = 0;
    for (int idx : profile) m += (idx == low_idx);
    for (int w = 0; w < n; ++w) {
      if (profile[static_cast<size_t>(w)] != low_idx) continue;
      std::fill(s.begin(), s.end(), 0);
      s[static_cast<size_t>(w)] = flag_atom;
      builder.add(s, static_cast<int>(row), p / m);
    }
  }
  I.joint = builder.finish();
  I.construction.kind = "point-C";
  validate_structure(I);
  return I;
}

InfoStructure build_point_D(const SymmetricPrior& prior) {
  validate(prior);
  const int n = prior.n_bidders;
  const double v_top = support_top(prior);

  // Atom roles by tag: 0 = bystander, 1 = price-setter carrying the profile
  // minimum, 2 = designated winner bidding the peak.
  std::set<SignalAtom> atom_set;
  if (n >= 3) atom_set.insert({0.0, 0});
  for (const auto& [profile, p] : prior.pmf) {
    int low_idx = *std::min_element(profile.begin(), profile.end());
    atom_set.insert({prior.values[static_cast<size_t>(low_idx)], 1});
  }
  atom_set.insert({v_top, 2});
  InfoStructure I;
  I.prior = prior;
  SignalGrid grid;
  grid.atoms.assign(atom_set.begin(), atom_set.end());
  I.grids.assign(static_cast<size_t>(n), grid);
  const int null_atom = grid.find({0.0, 0});
  const int win_atom = grid.find({v_top, 2});

  JointBuilder builder(I);
  std::vector<int> s(static_cast<size_t>(n), 0);
  for (size_t row = 0; row < prior.pmf.size(); ++row) {
    const auto& [profile, p] = prior.pmf[row];
    int low_idx = *std::min_element(profile.begin(), profile.end());
    int top_idx = *std::max_element(profile.begin(), profile.end());
    int price_atom = grid.find({prior.values[static_cast<size_t>(low_idx)], 1});
    if (low_idx == top_idx) {
      double wgt = p / (n * (n - 1));
      for (int ws = 0; ws < n; ++ws) {
        for (int ps = 0; ps < n; ++ps) {
          if (ps == ws) continue;
          if (n >= 3) std::fill(s.begin(), s.end(), null_atom);
          s[static_cast<size_t>(ws)] = win_atom;
          s[static_cast<size_t>(ps)] = price_atom;
          builder.add(s, static_cast<int>(row), wgt);
        }
      }
    } else {
      int m_low = 0, m_top = 0;
      for (int idx : profile) {
        m_low += (idx == low_idx);
        m_top += (idx == top_idx);
      }
      double wgt = p / (m_low * m_top);
      for (int ws = 0; ws < n; ++ws) {
        if (profile[static_cast<size_t>(ws)] != low_idx) continue;
        for (int ps = 0; ps < n; ++ps) {
          if (profile[static_cast<size_t>(ps)] != top_idx) continue;
          if (n >= 3) std::fill(s.begin(), s.end(), null_atom);
          s[static_cast<size_t>(ws)] = win_atom;
          s[static_cast<size_t>(ps)] = price_atom;
          builder.add(s, static_cast<int>(row), wgt);
        }
      }
    }
  }
  I.joint = builder.finish();
  I.construction.kind = "point-D";
  I.strategy.assign(static_cast<size_t>(n), {});
  for (int i = 0; i < n; ++i) {
    auto& bids = I.strategy[static_cast<size_t>(i)];
    for (const SignalAtom& atom : grid.atoms) {
      bids.push_back(atom.tag == 2 ? v_top : (atom.tag == 1 ? atom.value : 0.0));
    }
  }
  validate_structure(I);
  return I;
}

InfoStructure build_target_payoff(const SymmetricPrior& prior, double revenue,
                                  double bidder_surplus, int k) {
  validate(prior);
  PriorStats stats = compute_stats(prior);
  double total = revenue + bidder_surplus;
  if (revenue < -1e-12 || bidder_surplus < -1e-12 || total < stats.wel_min - 1e-9 ||
      total > stats.wel_max + 1e-9) {
    raise(ErrorCode::OutsideTrapezoid, "target payoff lies outside the feasible trapezoid");
  }

  std::vector<InfoStructure> comps;
  comps.push_back(build_point_A(prior));
  comps.push_back(build_full_extraction(prior, k, kDefaultWindowCap));
  comps.push_back(build_point_C(prior));
  comps.push_back(build_point_D(prior));
  const int nc = static_cast<int>(comps.size());

  std::vector<PayoffPoint> pay;
  pay.reserve(comps.size());
  for (const auto& comp : comps) pay.push_back(evaluate(comp, attached_strategy(comp)));

  // Solve for mixture weights against the measured component payoffs: the
  // discretized extraction corner misses the ideal vertex by its tie mass,
  // so nominal vertex algebra would miss the target by the same amount.
  std::vector<double> a;
  for (int c = 0; c < nc; ++c) a.push_back(1.0);
  for (int c = 0; c < nc; ++c) a.push_back(pay[static_cast<size_t>(c)].bidder_surplus);
  for (int c = 0; c < nc; ++c) a.push_back(pay[static_cast<size_t>(c)].revenue);
  detail::LpResult lp = detail::solve_equality_feasibility(3, nc, a, {1.0, bidder_surplus, revenue});
  if (!lp.feasible) {
    raise(ErrorCode::OutsideTrapezoid, "target payoff lies outside the achievable hull");
  }

  const int n = prior.n_bidders;
  const double v_top = support_top(prior);
  InfoStructure I;
  I.prior = prior;

  std::vector<bool> used(static_cast<size_t>(nc), false);
  for (int c = 0; c < nc; ++c) used[static_cast<size_t>(c)] = lp.x[static_cast<size_t>(c)] > 1e-14;

  // Component atoms are kept disjoint by stamping the component id into the
  // tag's high bits; the low nibble keeps the atom's role.
  auto remap = [](const SignalAtom& atom, int c) {
    return SignalAtom{atom.value, (atom.tag & 0xF) | (c << 4)};
  };
  I.grids.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::set<SignalAtom> merged;
    for (int c = 0; c < nc; ++c) {
      if (!used[static_cast<size_t>(c)]) continue;
      for (const SignalAtom& atom : comps[static_cast<size_t>(c)].grids[static_cast<size_t>(i)].atoms) {
        merged.insert(remap(atom, c));
      }
    }
    I.grids[static_cast<size_t>(i)].atoms.assign(merged.begin(), merged.end());
  }

  JointBuilder builder(I);
  std::vector<int> s(static_cast<size_t>(n), 0);
  for (int c = 0; c < nc; ++c) {
    if (!used[static_cast<size_t>(c)]) continue;
    const InfoStructure& comp = comps[static_cast<size_t>(c)];
    double wc = lp.x[static_cast<size_t>(c)];
    for (const JointEntry& e : comp.joint) {
      std::vector<int> cs = comp.signal_unrank(e.s_id);
      for (int i = 0; i < n; ++i) {
        const SignalAtom& atom = comp.grids[static_cast<size_t>(i)].atoms[static_cast<size_t>(cs[static_cast<size_t>(i)])];
        s[static_cast<size_t>(i)] = I.grids[static_cast<size_t>(i)].find(remap(atom, c));
      }
      builder.add(s, e.v_id, wc * e.p);
    }
  }
  I.joint = builder.finish();
  I.construction.kind = "mixture";
  push_param(I, "w_A", lp.x[0]);
  push_param(I, "w_extraction", lp.x[1]);
  push_param(I, "w_C", lp.x[2]);
  push_param(I, "w_D", lp.x[3]);
  push_param(I, "target_B", bidder_surplus);
  push_param(I, "target_R", revenue);
  push_param(I, "K", k);

  I.strategy.assign(static_cast<size_t>(n), {});
  for (int i = 0; i < n; ++i) {
    auto& bids = I.strategy[static_cast<size_t>(i)];
    for (const SignalAtom& atom : I.grids[static_cast<size_t>(i)].atoms) {
      bids.push_back((atom.tag & 0xF) == 2 ? v_top : atom.value);
    }
  }
  validate_structure(I);
  return I;
}

}  // namespace aid
