#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aid/prior.hpp"

namespace aid {

// A signal atom is a real value plus a small integer tag. Numeric
// constructions use tag 0; tagged atoms encode labeled alphabets (the W/P
// labels, mixture components) while keeping the grid totally ordered and the
// signal values usable as bids.
struct SignalAtom {
  double value = 0.0;
  int tag = 0;

  friend bool operator==(const SignalAtom&, const SignalAtom&) = default;
  friend bool operator<(const SignalAtom& a, const SignalAtom& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.tag < b.tag;
  }
};

struct SignalGrid {
  std::vector<SignalAtom> atoms;  // strictly ascending by (value, tag)

  int size() const { return static_cast<int>(atoms.size()); }
  // Index of an exactly matching atom, or -1.
  int find(const SignalAtom& atom) const;
};

// One sparse cell of the joint law. v_id indexes the prior support row;
// s_id ranks the per-bidder atom indices in mixed radix, bidder 0 least
// significant.
struct JointEntry {
  int32_t v_id = 0;
  int64_t s_id = 0;
  double p = 0.0;
};

struct ConstructionInfo {
  std::string kind;
  std::vector<std::pair<std::string, double>> params;
};

struct InfoStructure {
  SymmetricPrior prior;
  std::vector<SignalGrid> grids;
  std::vector<JointEntry> joint;  // sorted by (s_id, v_id), duplicates merged
  ConstructionInfo construction;
  // Bids per (bidder, atom) for structures whose equilibrium is not truthful;
  // empty means bid-your-signal-value.
  std::vector<std::vector<double>> strategy;

  int n() const { return prior.n_bidders; }
  int64_t signal_rank(const std::vector<int>& s) const;
  std::vector<int> signal_unrank(int64_t s_id) const;
};

// Accumulates joint mass cell by cell, merging duplicates, then emits the
// sorted entry vector. Grids must be final before adding.
class JointBuilder {
 public:
  explicit JointBuilder(const InfoStructure& target);
  void add(const std::vector<int>& s, int v_row, double p);
  void add_ranked(int64_t s_id, int v_row, double p);
  std::vector<JointEntry> finish();

 private:
  const InfoStructure& target_;
  int64_t support_size_;
  std::unordered_map<int64_t, double> cells_;
};

void validate_structure(const InfoStructure& I);

std::vector<double> signal_marginal(const InfoStructure& I, int bidder);

// Max over signal profiles of |P(s) - prod_i P(s_i)|. Enumerates the full
// product space up to 2^22 profiles, observed profiles only beyond that.
double independence_gap(const InfoStructure& I);

struct SymmetryReport {
  double joint_gap = 0.0;      // max over (s, v, permutation) mass mismatch
  double marginal_gap = 0.0;   // max deviation of any marginal from uniform
};

// Requires identical grids across bidders (GridsDiffer otherwise).
SymmetryReport symmetry_gap(const InfoStructure& I);

struct PosteriorBelief {
  std::vector<int> signal;                    // atom index per bidder
  std::vector<std::pair<int, double>> dist;   // (prior support row, probability)
};

PosteriorBelief posterior(const InfoStructure& I, const std::vector<int>& s);
double interim_value(const InfoStructure& I, const std::vector<int>& s, int bidder);

struct ProfileCheck {
  std::vector<int> signal;
  double detail = 0.0;  // violation magnitude
};

struct CheckReport {
  int no_tie_checked = 0;
  int tie_checked = 0;
  std::vector<ProfileCheck> no_tie_violations;
  std::vector<ProfileCheck> tie_violations;

  bool ok_no_tie() const { return no_tie_violations.empty(); }
};

// The three structural predicates, asserted on no-tie signal profiles; tie
// profiles are swept too but reported separately.
CheckReport check_winner_dominance(const InfoStructure& I);
CheckReport check_no_rent_winner(const InfoStructure& I, double tol);
CheckReport check_loser_bound(const InfoStructure& I, double tol);

}  // namespace aid
