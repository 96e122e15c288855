#include "aid/info_structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "aid/errors.hpp"

namespace aid {

namespace {

constexpr double kStructTol = 1e-10;
constexpr int64_t kProductEnumCap = 1 << 22;

std::string signal_str(const std::vector<int>& s) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i > 0) os << ", ";
    os << s[i];
  }
  os << ")";
  return os.str();
}

// Runs of entries sharing one signal profile; entries are sorted by s_id.
struct Run {
  int64_t s_id;
  size_t begin;
  size_t end;
  double mass;
};

std::vector<Run> collect_runs(const InfoStructure& I) {
  std::vector<Run> runs;
  size_t i = 0;
  while (i < I.joint.size()) {
    size_t j = i;
    double mass = 0.0;
    while (j < I.joint.size() && I.joint[j].s_id == I.joint[i].s_id) {
      mass += I.joint[j].p;
      ++j;
    }
    runs.push_back({I.joint[i].s_id, i, j, mass});
    i = j;
  }
  return runs;
}

int64_t total_profile_count(const InfoStructure& I) {
  int64_t total = 1;
  for (const auto& g : I.grids) {
    total *= g.size();
    if (total > (int64_t{1} << 40)) return int64_t{1} << 40;
  }
  return total;
}

}  // namespace

int SignalGrid::find(const SignalAtom& atom) const {
  auto it = std::lower_bound(atoms.begin(), atoms.end(), atom);
  if (it != atoms.end() && *it == atom) return static_cast<int>(it - atoms.begin());
  return -1;
}

int64_t InfoStructure::signal_rank(const std::vector<int>& s) const {
  int64_t rank = 0;
  int64_t radix = 1;
  for (size_t i = 0; i < s.size(); ++i) {
    rank += radix * s[i];
    radix *= grids[i].size();
  }
  return rank;
}

std::vector<int> InfoStructure::signal_unrank(int64_t s_id) const {
  std::vector<int> s(grids.size());
  for (size_t i = 0; i < grids.size(); ++i) {
    int64_t size = grids[i].size();
    s[i] = static_cast<int>(s_id % size);
    s_id /= size;
  }
  return s;
}

JointBuilder::JointBuilder(const InfoStructure& target)
    : target_(target), support_size_(static_cast<int64_t>(target.prior.pmf.size())) {}

void JointBuilder::add(const std::vector<int>& s, int v_row, double p) {
  add_ranked(target_.signal_rank(s), v_row, p);
}

void JointBuilder::add_ranked(int64_t s_id, int v_row, double p) {
  if (p == 0.0) return;
  cells_[s_id * support_size_ + v_row] += p;
}

std::vector<JointEntry> JointBuilder::finish() {
  std::vector<std::pair<int64_t, double>> flat(cells_.begin(), cells_.end());
  std::sort(flat.begin(), flat.end());
  std::vector<JointEntry> entries;
  entries.reserve(flat.size());
  for (const auto& [key, p] : flat) {
    if (p <= 0.0) continue;
    JointEntry e;
    e.v_id = static_cast<int32_t>(key % support_size_);
    e.s_id = key / support_size_;
    e.p = p;
    entries.push_back(e);
  }
  return entries;
}

void validate_structure(const InfoStructure& I) {
  validate(I.prior);
  if (static_cast<int>(I.grids.size()) != I.n()) {
    raise(ErrorCode::InvalidArgument, "grid count does not match bidder count");
  }
  double v_bar = I.prior.top_value();
  for (const auto& grid : I.grids) {
    if (grid.atoms.empty()) raise(ErrorCode::EmptySupport, "empty signal grid");
    for (size_t i = 0; i < grid.atoms.size(); ++i) {
      const auto& a = grid.atoms[i];
      if (!(a.value >= 0.0 && a.value <= v_bar + 1e-12)) {
        raise(ErrorCode::InvalidArgument, "signal atom outside [0, v_bar]");
      }
      if (i > 0 && !(grid.atoms[i - 1] < a)) {
        raise(ErrorCode::InvalidArgument, "grid atoms must be strictly ascending");
      }
    }
  }
  if (!I.strategy.empty()) {
    if (static_cast<int>(I.strategy.size()) != I.n()) {
      raise(ErrorCode::UndefinedSignal, "strategy must cover every bidder");
    }
    for (int i = 0; i < I.n(); ++i) {
      if (I.strategy[static_cast<size_t>(i)].size() != I.grids[static_cast<size_t>(i)].atoms.size()) {
        raise(ErrorCode::UndefinedSignal, "strategy must cover every grid atom");
      }
    }
  }

  int64_t profile_count = total_profile_count(I);
  double total = 0.0;
  std::vector<double> value_marginal(I.prior.pmf.size(), 0.0);
  int64_t prev_key = -1;
  for (const auto& e : I.joint) {
    if (e.v_id < 0 || e.v_id >= static_cast<int32_t>(I.prior.pmf.size())) {
      raise(ErrorCode::InvalidArgument, "joint entry references a missing prior row");
    }
    if (e.s_id < 0 || e.s_id >= profile_count) {
      raise(ErrorCode::InvalidArgument, "joint entry references a missing signal profile");
    }
    if (e.p < 0.0) raise(ErrorCode::NotNormalized, "negative joint mass");
    int64_t key = e.s_id * static_cast<int64_t>(I.prior.pmf.size()) + e.v_id;
    if (key <= prev_key) {
      raise(ErrorCode::InvalidArgument, "joint entries must be sorted by (s_id, v_id)");
    }
    prev_key = key;
    total += e.p;
    value_marginal[static_cast<size_t>(e.v_id)] += e.p;
  }
  if (std::abs(total - 1.0) > kStructTol) {
    raise(ErrorCode::NotNormalized, "joint sums to " + std::to_string(total));
  }
  for (size_t row = 0; row < I.prior.pmf.size(); ++row) {
    if (std::abs(value_marginal[row] - I.prior.pmf[row].second) > kStructTol) {
      raise(ErrorCode::NotNormalized,
            "value marginal deviates from the prior at support row " + std::to_string(row));
    }
  }
}

std::vector<double> signal_marginal(const InfoStructure& I, int bidder) {
  if (bidder < 0 || bidder >= I.n()) raise(ErrorCode::InvalidArgument, "bidder out of range");
  int64_t radix = 1;
  for (int j = 0; j < bidder; ++j) radix *= I.grids[static_cast<size_t>(j)].size();
  int64_t size = I.grids[static_cast<size_t>(bidder)].size();
  std::vector<double> marginal(static_cast<size_t>(size), 0.0);
  for (const auto& e : I.joint) {
    marginal[static_cast<size_t>((e.s_id / radix) % size)] += e.p;
  }
  return marginal;
}

double independence_gap(const InfoStructure& I) {
  std::vector<std::vector<double>> marginals;
  marginals.reserve(static_cast<size_t>(I.n()));
  for (int i = 0; i < I.n(); ++i) marginals.push_back(signal_marginal(I, i));

  std::unordered_map<int64_t, double> observed;
  for (const auto& e : I.joint) observed[e.s_id] += e.p;

  double gap = 0.0;
  int64_t total = total_profile_count(I);
  if (total <= kProductEnumCap) {
    std::vector<int> s(static_cast<size_t>(I.n()), 0);
    for (int64_t rank = 0; rank < total; ++rank) {
      double prod = 1.0;
      for (int i = 0; i < I.n(); ++i) {
        prod *= marginals[static_cast<size_t>(i)][static_cast<size_t>(s[static_cast<size_t>(i)])];
      }
      auto it = observed.find(rank);
      double p = it == observed.end() ? 0.0 : it->second;
      gap = std::max(gap, std::abs(p - prod));
      for (int i = 0; i < I.n(); ++i) {
        if (++s[static_cast<size_t>(i)] < I.grids[static_cast<size_t>(i)].size()) break;
        s[static_cast<size_t>(i)] = 0;
      }
    }
  } else {
    for (const auto& [rank, p] : observed) {
      std::vector<int> s = I.signal_unrank(rank);
      double prod = 1.0;
      for (int i = 0; i < I.n(); ++i) {
        prod *= marginals[static_cast<size_t>(i)][static_cast<size_t>(s[static_cast<size_t>(i)])];
      }
      gap = std::max(gap, std::abs(p - prod));
    }
  }
  return gap;
}

SymmetryReport symmetry_gap(const InfoStructure& I) {
  for (int i = 1; i < I.n(); ++i) {
    if (!(I.grids[static_cast<size_t>(i)].atoms == I.grids[0].atoms)) {
      raise(ErrorCode::GridsDiffer, "bidder " + std::to_string(i) + " uses a different grid");
    }
  }
  SymmetryReport report;

  double uniform = 1.0 / I.grids[0].size();
  for (int i = 0; i < I.n(); ++i) {
    for (double p : signal_marginal(I, i)) {
      report.marginal_gap = std::max(report.marginal_gap, std::abs(p - uniform));
    }
  }

  ProfileIndex support(I.prior);
  auto mass_at = [&](int64_t s_id, int32_t v_id) {
    JointEntry probe{v_id, s_id, 0.0};
    auto it = std::lower_bound(I.joint.begin(), I.joint.end(), probe,
                               [](const JointEntry& a, const JointEntry& b) {
                                 if (a.s_id != b.s_id) return a.s_id < b.s_id;
                                 return a.v_id < b.v_id;
                               });
    if (it != I.joint.end() && it->s_id == s_id && it->v_id == v_id) return it->p;
    return 0.0;
  };

  std::vector<int> perm(static_cast<size_t>(I.n()));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> ps(static_cast<size_t>(I.n()));
  std::vector<int> pv(static_cast<size_t>(I.n()));
  do {
    for (const auto& e : I.joint) {
      std::vector<int> s = I.signal_unrank(e.s_id);
      const auto& v = I.prior.pmf[static_cast<size_t>(e.v_id)].first;
      for (int i = 0; i < I.n(); ++i) {
        ps[static_cast<size_t>(perm[static_cast<size_t>(i)])] = s[static_cast<size_t>(i)];
        pv[static_cast<size_t>(perm[static_cast<size_t>(i)])] = v[static_cast<size_t>(i)];
      }
      int row = support.find(pv);
      double q = row < 0 ? 0.0 : mass_at(I.signal_rank(ps), static_cast<int32_t>(row));
      report.joint_gap = std::max(report.joint_gap, std::abs(e.p - q));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return report;
}

PosteriorBelief posterior(const InfoStructure& I, const std::vector<int>& s) {
  if (static_cast<int>(s.size()) != I.n()) {
    raise(ErrorCode::InvalidArgument, "signal profile length mismatch");
  }
  for (int i = 0; i < I.n(); ++i) {
    if (s[static_cast<size_t>(i)] < 0 ||
        s[static_cast<size_t>(i)] >= I.grids[static_cast<size_t>(i)].size()) {
      raise(ErrorCode::InvalidArgument, "signal atom index out of range");
    }
  }
  int64_t rank = I.signal_rank(s);
  JointEntry probe{0, rank, 0.0};
  auto lo = std::lower_bound(I.joint.begin(), I.joint.end(), probe,
                             [](const JointEntry& a, const JointEntry& b) {
                               return a.s_id < b.s_id;
                             });
  PosteriorBelief belief;
  belief.signal = s;
  double mass = 0.0;
  for (auto it = lo; it != I.joint.end() && it->s_id == rank; ++it) {
    belief.dist.emplace_back(it->v_id, it->p);
    mass += it->p;
  }
  if (mass <= 0.0) {
    raise(ErrorCode::ZeroProbabilitySignal, "signal profile " + signal_str(s) + " has no mass");
  }
  for (auto& [row, p] : belief.dist) p /= mass;
  return belief;
}

double interim_value(const InfoStructure& I, const std::vector<int>& s, int bidder) {
  if (bidder < 0 || bidder >= I.n()) raise(ErrorCode::InvalidArgument, "bidder out of range");
  PosteriorBelief belief = posterior(I, s);
  double acc = 0.0;
  for (const auto& [row, p] : belief.dist) {
    acc += p * I.prior.value_at(I.prior.pmf[static_cast<size_t>(row)].first, bidder);
  }
  return acc;
}

namespace {

// Shared sweep over positive-mass signal profiles for the three predicates.
template <typename Fn>
CheckReport sweep_profiles(const InfoStructure& I, Fn&& check) {
  CheckReport report;
  std::vector<Run> runs = collect_runs(I);
  for (const auto& run : runs) {
    if (run.mass <= 0.0) continue;
    std::vector<int> s = I.signal_unrank(run.s_id);
    std::vector<double> sigvals(static_cast<size_t>(I.n()));
    for (int i = 0; i < I.n(); ++i) {
      sigvals[static_cast<size_t>(i)] =
          I.grids[static_cast<size_t>(i)].atoms[static_cast<size_t>(s[static_cast<size_t>(i)])].value;
    }
    int m = tie_count(sigvals);
    bool tie = m > 1;
    if (tie) {
      ++report.tie_checked;
    } else {
      ++report.no_tie_checked;
    }
    double detail = check(run, s, sigvals, tie);
    if (detail > 0.0) {
      (tie ? report.tie_violations : report.no_tie_violations).push_back({s, detail});
    }
  }
  return report;
}

double second_highest(const std::vector<double>& xs) {
  double top = xs[0];
  double second = -1.0;
  for (size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] > top) {
      second = top;
      top = xs[i];
    } else if (xs[i] > second) {
      second = xs[i];
    }
  }
  return second;
}

}  // namespace

CheckReport check_winner_dominance(const InfoStructure& I) {
  return sweep_profiles(I, [&](const Run& run, const std::vector<int>&,
                               const std::vector<double>& sigvals, bool) {
    size_t top_bidder = 0;
    for (size_t i = 1; i < sigvals.size(); ++i) {
      if (sigvals[i] > sigvals[top_bidder]) top_bidder = i;
    }
    double top_signal = sigvals[top_bidder];
    double worst = 0.0;
    for (size_t k = run.begin; k < run.end; ++k) {
      const auto& e = I.joint[k];
      if (e.p <= 0.0) continue;
      const auto& v = I.prior.pmf[static_cast<size_t>(e.v_id)].first;
      // Some top-signal bidder must hold the top valuation of the state.
      int max_idx = *std::max_element(v.begin(), v.end());
      int best_top = -1;
      for (size_t i = 0; i < v.size(); ++i) {
        if (sigvals[i] == top_signal) best_top = std::max(best_top, v[i]);
      }
      if (best_top < max_idx) {
        worst = std::max(worst, I.prior.values[static_cast<size_t>(max_idx)] -
                                    I.prior.values[static_cast<size_t>(best_top)]);
      }
    }
    return worst;
  });
}

CheckReport check_no_rent_winner(const InfoStructure& I, double tol) {
  return sweep_profiles(I, [&](const Run& run, const std::vector<int>&,
                               const std::vector<double>& sigvals, bool tie) {
    size_t winner = 0;
    for (size_t i = 1; i < sigvals.size(); ++i) {
      if (sigvals[i] > sigvals[winner]) winner = i;
    }
    double price = tie ? sigvals[winner] : second_highest(sigvals);
    double mean = 0.0;
    for (size_t k = run.begin; k < run.end; ++k) {
      const auto& e = I.joint[k];
      mean += e.p * I.prior.value_at(I.prior.pmf[static_cast<size_t>(e.v_id)].first,
                                     static_cast<int>(winner));
    }
    mean /= run.mass;
    double gap = std::abs(mean - price);
    return gap > tol ? gap : 0.0;
  });
}

CheckReport check_loser_bound(const InfoStructure& I, double tol) {
  return sweep_profiles(I, [&](const Run& run, const std::vector<int>&,
                               const std::vector<double>& sigvals, bool tie) {
    double top = *std::max_element(sigvals.begin(), sigvals.end());
    double price = tie ? top : second_highest(sigvals);
    double worst = 0.0;
    for (size_t i = 0; i < sigvals.size(); ++i) {
      if (sigvals[i] >= top) continue;
      double mean = 0.0;
      for (size_t k = run.begin; k < run.end; ++k) {
        const auto& e = I.joint[k];
        mean += e.p * I.prior.value_at(I.prior.pmf[static_cast<size_t>(e.v_id)].first,
                                       static_cast<int>(i));
      }
      mean /= run.mass;
      if (mean > price + tol) worst = std::max(worst, mean - price);
    }
    return worst;
  });
}

}  // namespace aid
