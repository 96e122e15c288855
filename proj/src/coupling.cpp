#include "aid/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include "aid/errors.hpp"
#include "aid/log.hpp"
#include "lp_feasibility.hpp"

namespace aid {

namespace {

constexpr double kFeasTol = 1e-9;

double lower_tail_integral(const Dist& d, double x) {
  double acc = 0.0;
  for (size_t i = 0; i < d.atoms.size(); ++i) {
    if (d.atoms[i] >= x) break;
    acc += d.pmf[i] * (x - d.atoms[i]);
  }
  return acc;
}

}  // namespace

double Dist::mean() const {
  double acc = 0.0;
  for (size_t i = 0; i < atoms.size(); ++i) acc += atoms[i] * pmf[i];
  return acc;
}

double Dist::total() const {
  double acc = 0.0;
  for (double p : pmf) acc += p;
  return acc;
}

SignalWindow make_window(double s_hat, double length, int k) {
  if (k < 1) raise(ErrorCode::InvalidArgument, "window needs at least one atom");
  if (!(length > 0.0)) raise(ErrorCode::InvalidArgument, "window length must be positive");
  SignalWindow w;
  w.s_hat = s_hat;
  w.length = length;
  w.k = k;
  w.atoms.resize(static_cast<size_t>(k));
  // Interior layout: atom r sits at s_hat + r·L/(k+1), so the kink of an
  // even-position winner lands exactly on an atom and takes the upper branch.
  // Midpoint layouts leave the bottom winner with a single lower-branch event
  // whose negative surplus a zero bid would shed, breaking strictness.
  for (int j = 0; j < k; ++j) {
    w.atoms[static_cast<size_t>(j)] = s_hat + length * (j + 1) / (k + 1);
  }
  return w;
}

Dist secmax_dist_uniform(int n, const SignalWindow& window) {
  if (n < 2) raise(ErrorCode::InvalidArgument, "secmax needs at least two draws");
  const int k = window.k;
  Dist d;
  d.atoms = window.atoms;
  d.pmf.resize(static_cast<size_t>(k));
  double prev_cdf = 0.0;
  for (int j = 0; j < k; ++j) {
    double p = static_cast<double>(j + 1) / k;
    double cdf = n * std::pow(p, n - 1) * (1.0 - p) + std::pow(p, n);
    d.pmf[static_cast<size_t>(j)] = cdf - prev_cdf;
    prev_cdf = cdf;
  }
  return d;
}

double mean_offset(int n, double length, int k) {
  if (length == 0.0) return 0.0;
  SignalWindow w = make_window(0.0, length, k);
  return secmax_dist_uniform(n, w).mean();
}

MpcReport mpc_check(const Dist& f, const Dist& g) {
  MpcReport report;
  report.mean_gap = g.mean() - f.mean();
  std::vector<double> xs;
  xs.reserve(f.atoms.size() + g.atoms.size());
  xs.insert(xs.end(), f.atoms.begin(), f.atoms.end());
  xs.insert(xs.end(), g.atoms.begin(), g.atoms.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  // With equal means, lower-tail dominance at every kink point is the whole
  // convex-order condition; the upper tails then agree automatically.
  for (double x : xs) {
    double excess = lower_tail_integral(g, x) - lower_tail_integral(f, x);
    report.worst_violation = std::max(report.worst_violation, excess);
  }
  report.ok = std::abs(report.mean_gap) <= kFeasTol && report.worst_violation <= kFeasTol;
  return report;
}

Dist modified_prior_dist(const std::vector<double>& values, const PriorStats& stats) {
  Dist d;
  for (size_t i = 0; i < values.size(); ++i) {
    if (stats.modified_prior[i] > 0.0) {
      d.atoms.push_back(values[i]);
      d.pmf.push_back(stats.modified_prior[i]);
    }
  }
  return d;
}

SignalWindow solve_signal_window(const PriorStats& stats, const std::vector<double>& values,
                                 int n, double eps_cap, int k) {
  if (!(eps_cap > 0.0)) raise(ErrorCode::InvalidArgument, "eps_cap must be positive");
  if (k < 2) raise(ErrorCode::InvalidArgument, "window grid needs at least two atoms");
  Dist lambda_hat = modified_prior_dist(values, stats);
  if (lambda_hat.atoms.size() < 2) {
    raise(ErrorCode::WindowUnderflow,
          "modified prior is degenerate, no window of positive length fits");
  }
  double top = lambda_hat.atoms.back();
  double length = eps_cap;
  for (int attempt = 0; attempt < 40; ++attempt, length *= 0.5) {
    double offset = mean_offset(n, length, k);
    double s_hat = stats.v_hat - offset;
    if (s_hat < -1e-15 || s_hat + length > top + 1e-12) continue;
    SignalWindow window = make_window(s_hat, length, k);
    Dist g = secmax_dist_uniform(n, window);
    MpcReport mpc = mpc_check(lambda_hat, g);
    if (mpc.ok) {
      log::debug("signal window accepted at length " + std::to_string(length));
      return window;
    }
  }
  raise(ErrorCode::WindowUnderflow,
        "no admissible window length found above eps_cap / 2^40");
}

MartingaleCoupling martingale_coupling(const Dist& value_marginal, const Dist& signal_marginal) {
  const int nv = static_cast<int>(value_marginal.atoms.size());
  const int nt = static_cast<int>(signal_marginal.atoms.size());
  if (nv == 0 || nt == 0) raise(ErrorCode::EmptySupport, "coupling marginals must be nonempty");

  // Feasibility system over q[t][v] >= 0: per-signal mass and mean rows, plus
  // per-value column rows.
  const int rows = 2 * nt + nv;
  const int cols = nt * nv;
  std::vector<double> a(static_cast<size_t>(rows) * cols, 0.0);
  std::vector<double> b(static_cast<size_t>(rows), 0.0);
  auto var = [nv](int t, int v) { return t * nv + v; };
  for (int t = 0; t < nt; ++t) {
    for (int v = 0; v < nv; ++v) {
      a[static_cast<size_t>(2 * t) * cols + var(t, v)] = 1.0;
      a[static_cast<size_t>(2 * t + 1) * cols + var(t, v)] = value_marginal.atoms[static_cast<size_t>(v)];
    }
    b[static_cast<size_t>(2 * t)] = signal_marginal.pmf[static_cast<size_t>(t)];
    b[static_cast<size_t>(2 * t + 1)] =
        signal_marginal.atoms[static_cast<size_t>(t)] * signal_marginal.pmf[static_cast<size_t>(t)];
  }
  for (int v = 0; v < nv; ++v) {
    for (int t = 0; t < nt; ++t) {
      a[static_cast<size_t>(2 * nt + v) * cols + var(t, v)] = 1.0;
    }
    b[static_cast<size_t>(2 * nt + v)] = value_marginal.pmf[static_cast<size_t>(v)];
  }

  detail::LpResult lp = detail::solve_equality_feasibility(rows, cols, a, b);
  if (!lp.feasible) {
    std::ostringstream os;
    os << "no martingale coupling: phase-1 residual " << lp.residual;
    raise(ErrorCode::CouplingInfeasible, os.str());
  }

  MartingaleCoupling mc;
  mc.signal_atoms = signal_marginal.atoms;
  mc.signal_pmf = signal_marginal.pmf;
  mc.value_atoms = value_marginal.atoms;
  mc.q.assign(static_cast<size_t>(nt), std::vector<double>(static_cast<size_t>(nv), 0.0));
  for (int t = 0; t < nt; ++t) {
    for (int v = 0; v < nv; ++v) {
      mc.q[static_cast<size_t>(t)][static_cast<size_t>(v)] = lp.x[static_cast<size_t>(var(t, v))];
    }
  }
  // Snap row sums onto the signal marginal exactly. Scaling a row leaves its
  // conditional mean unchanged, so the martingale constraint survives while
  // the assembled joints inherit fp-exact marginals.
  for (int t = 0; t < nt; ++t) {
    auto& row = mc.q[static_cast<size_t>(t)];
    double sum = 0.0;
    for (double p : row) sum += p;
    double target = signal_marginal.pmf[static_cast<size_t>(t)];
    if (target <= 0.0) {
      std::fill(row.begin(), row.end(), 0.0);
    } else if (sum > 0.0) {
      double scale = target / sum;
      for (double& p : row) p *= scale;
    }
  }
  return mc;
}

std::vector<double> MartingaleCoupling::row_conditional(int t) const {
  const auto& row = q[static_cast<size_t>(t)];
  double mass = 0.0;
  for (double p : row) mass += p;
  std::vector<double> cond(row.size(), 0.0);
  if (mass <= 0.0) return cond;
  for (size_t v = 0; v < row.size(); ++v) cond[v] = row[v] / mass;
  return cond;
}

double kink(double s_i, double s_hat) { return 0.5 * (s_i + s_hat); }

double strict_value_target(double s_i, double y, double s_hat, double eps, int n) {
  if (n < 2) raise(ErrorCode::InvalidArgument, "need at least two bidders");
  if (!(eps >= 0.0 && eps < 1.0)) raise(ErrorCode::InvalidArgument, "eps must lie in [0, 1)");
  if (!(y > s_hat && y <= s_i)) {
    raise(ErrorCode::OutOfWindow, "secmax must lie in (s_hat, s_i]");
  }
  // The boundary y == kink belongs to the upper branch; the slack keeps
  // fp-rounded grid atoms that land exactly on the kink from flipping down.
  constexpr double kKinkSlack = 1e-12;
  if (y < kink(s_i, s_hat) - kKinkSlack) {
    return y - (y - s_hat) * eps / (2.0 * n);
  }
  return y + (s_i - y) * eps / n;
}

Dist strict_target_distribution(int n, const SignalWindow& window, double eps) {
  if (n < 2) raise(ErrorCode::InvalidArgument, "need at least two bidders");
  const int k = window.k;
  const double kd = static_cast<double>(k);

  // Binomial row for the tie weights.
  std::vector<double> choose(static_cast<size_t>(n), 0.0);
  choose[0] = 1.0;
  for (int t = 1; t < n; ++t) {
    choose[static_cast<size_t>(t)] =
        choose[static_cast<size_t>(t - 1)] * (n - t) / static_cast<double>(t);
  }

  std::map<double, double> mass_by_target;
  for (int jw = 0; jw < k; ++jw) {
    double sw = window.atoms[static_cast<size_t>(jw)];
    // Clean wins: all n-1 opponents at or below js < jw with max exactly js.
    for (int js = 0; js < jw; ++js) {
      double hi = static_cast<double>(js + 1) / kd;
      double lo = static_cast<double>(js) / kd;
      double p_event = std::pow(hi, n - 1) - std::pow(lo, n - 1);
      double y = strict_value_target(sw, window.atoms[static_cast<size_t>(js)], window.s_hat,
                                     eps, n);
      mass_by_target[y] += p_event / kd;
    }
    // Ties at the winner's own atom, weighted by the designation share.
    double tie_mass = 0.0;
    double below = static_cast<double>(jw) / kd;
    for (int t = 1; t <= n - 1; ++t) {
      tie_mass += choose[static_cast<size_t>(t)] * std::pow(1.0 / kd, t) *
                  std::pow(below, n - 1 - t) / (t + 1);
    }
    mass_by_target[sw] += tie_mass / kd;
  }

  Dist d;
  d.atoms.reserve(mass_by_target.size());
  d.pmf.reserve(mass_by_target.size());
  for (const auto& [y, p] : mass_by_target) {
    d.atoms.push_back(y);
    d.pmf.push_back(p * n);  // designation mass totals 1/n before scaling
  }
  return d;
}

std::pair<std::pair<int, double>, std::pair<int, double>> two_point_split(
    double mean, const std::vector<double>& anchors) {
  auto it = std::lower_bound(anchors.begin(), anchors.end(), mean);
  if (it != anchors.end() && *it == mean) {
    int idx = static_cast<int>(it - anchors.begin());
    return {{idx, 1.0}, {idx, 0.0}};
  }
  if (it == anchors.begin() || it == anchors.end()) {
    raise(ErrorCode::InvalidArgument, "mean lies outside the anchor range");
  }
  int hi = static_cast<int>(it - anchors.begin());
  int lo = hi - 1;
  double span = anchors[static_cast<size_t>(hi)] - anchors[static_cast<size_t>(lo)];
  double w_lo = (anchors[static_cast<size_t>(hi)] - mean) / span;
  return {{lo, w_lo}, {hi, 1.0 - w_lo}};
}

}  // namespace aid
