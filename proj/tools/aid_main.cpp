#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "aid/constructors.hpp"
#include "aid/equilibrium.hpp"
#include "aid/errors.hpp"
#include "aid/info_structure.hpp"
#include "aid/json_io.hpp"
#include "aid/log.hpp"
#include "aid/prior.hpp"

namespace {

using nlohmann::json;

int exit_code_for(aid::ErrorCode code) {
  switch (code) {
    case aid::ErrorCode::WindowUnderflow:
    case aid::ErrorCode::CouplingInfeasible:
    case aid::ErrorCode::NoFeasibleSignalGap:
      return 3;
    default:
      return 2;
  }
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) aid::raise(aid::ErrorCode::IoError, "cannot open " + path + " for writing");
  out << text;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

double param_or(const aid::InfoStructure& I, const std::string& name, double fallback) {
  for (const auto& [key, value] : I.construction.params) {
    if (key == name) return value;
  }
  return fallback;
}

json payoff_json(const aid::PayoffPoint& p) {
  return json{{"bidder_surplus", p.bidder_surplus},
              {"revenue", p.revenue},
              {"welfare", p.welfare},
              {"efficiency_gap", p.efficiency_gap},
              {"tie_mass", p.tie_mass},
              {"bs_per_bidder", p.bs_per_bidder}};
}

json equilibrium_json(const aid::EquilibriumReport& r) {
  json witnesses = json::array();
  for (size_t i = 0; i < r.witnesses.size() && i < 8; ++i) {
    const auto& w = r.witnesses[i];
    witnesses.push_back(json{{"bidder", w.bidder},
                             {"atom", w.atom},
                             {"eq_bid", w.eq_bid},
                             {"dev_bid", w.dev_bid},
                             {"gain", w.gain}});
  }
  return json{{"is_bne", r.is_bne},
              {"is_strict", r.is_strict},
              {"worst_gain", r.worst_gain},
              {"worst_gain_with_ties", r.worst_gain_with_ties},
              {"tie_gain_slack", r.tie_gain_slack},
              {"strict_margin", r.strict_margin},
              {"tol", r.tol},
              {"total_clean_surplus", r.total_clean_surplus},
              {"clean_surplus", r.clean_surplus},
              {"witnesses", witnesses}};
}

struct BuildOptions {
  std::string prior_path;
  std::string kind;
  std::string out = "-";
  int k = aid::kDefaultGridSize;
  bool k_given = false;
  double eps = 0.0;
  bool eps_given = false;
  double alpha = 0.0;
  double t = 0.0;
  bool t_given = false;
  double q = 0.0;
  double revenue = 0.0;
  bool revenue_given = false;
  double bidder_surplus = 0.0;
  bool bidder_surplus_given = false;
};

aid::InfoStructure dispatch_build(const aid::SymmetricPrior& prior, const BuildOptions& o) {
  auto eps_or = [&](double fallback) { return o.eps_given ? o.eps : fallback; };
  if (o.kind == "fully-revealing") return aid::build_fully_revealing(prior);
  if (o.kind == "full-extraction")
    return aid::build_full_extraction(prior, o.k, eps_or(aid::kDefaultWindowCap));
  if (o.kind == "strict") return aid::build_strict_eps(prior, eps_or(0.1), o.k);
  if (o.kind == "degenerate-max") return aid::build_degenerate_max(prior, eps_or(0.05));
  if (o.kind == "bidder-surplus") return aid::build_bidder_surplus(prior, eps_or(0.1));
  if (o.kind == "alpha") {
    aid::FrontierParams params;
    params.alpha = o.alpha;
    params.eps = eps_or(params.eps);
    return aid::build_frontier_alpha(prior, params);
  }
  if (o.kind == "ipv") {
    aid::FrontierParams params;
    params.t = o.t_given ? o.t : prior.top_value();
    params.q = o.q;
    if (o.k_given) params.k_low = o.k;
    return aid::build_ipv_hybrid(prior, params);
  }
  if (o.kind == "point-A") return aid::build_point_A(prior);
  if (o.kind == "point-C") return aid::build_point_C(prior);
  if (o.kind == "point-D") return aid::build_point_D(prior);
  if (o.kind == "target") {
    if (!o.revenue_given || !o.bidder_surplus_given) {
      aid::raise(aid::ErrorCode::InvalidArgument, "kind target needs both --R and --B");
    }
    return aid::build_target_payoff(prior, o.revenue, o.bidder_surplus, o.k);
  }
  aid::raise(aid::ErrorCode::InvalidArgument, "unknown construction kind: " + o.kind);
}

int cmd_build(const BuildOptions& o) {
  aid::SymmetricPrior prior = aid::load_prior(o.prior_path);
  aid::InfoStructure I = dispatch_build(prior, o);
  aid::save_json(aid::structure_to_json(I), o.out);
  aid::log::info("built " + I.construction.kind + " with " + std::to_string(I.joint.size()) +
                 " joint entries");
  return 0;
}

int cmd_verify(const std::string& path, double tol, const std::string& out) {
  aid::InfoStructure I = aid::load_structure(path);
  aid::StrategyProfile sigma = aid::attached_strategy(I);
  aid::EquilibriumReport bne = aid::verify_bne(I, sigma, tol);
  aid::EquilibriumReport strict = aid::verify_strict(I, sigma, tol);
  json report{{"construction", I.construction.kind},
              {"bne", equilibrium_json(bne)},
              {"strict", equilibrium_json(strict)},
              {"independence_gap", aid::independence_gap(I)},
              {"strategy_overbids", aid::validate_strategy(I, sigma).size()},
              {"payoffs", payoff_json(aid::evaluate(I, sigma))}};
  aid::save_json(report, out);
  return bne.is_bne ? 0 : 4;
}

int cmd_evaluate(const std::string& path, const std::string& out) {
  aid::InfoStructure I = aid::load_structure(path);
  aid::PayoffPoint p = aid::evaluate(I, aid::attached_strategy(I));
  json body = payoff_json(p);
  body["construction"] = I.construction.kind;
  aid::save_json(body, out);
  return 0;
}

struct FrontierOptions {
  std::string prior_path;
  std::string kind = "alpha";
  std::string out = "-";
  int steps = 11;
  double eps = 0.0;
  bool eps_given = false;
  double t = 0.0;
  bool t_given = false;
  int k = 16;
  bool k_given = false;
};

int cmd_frontier(const FrontierOptions& o) {
  if (o.steps < 2) aid::raise(aid::ErrorCode::InvalidArgument, "--steps must be at least 2");
  aid::SymmetricPrior prior = aid::load_prior(o.prior_path);
  std::ostringstream csv;
  if (o.kind == "alpha") {
    const double alpha_max = static_cast<double>(prior.n_bidders - 1) / prior.n_bidders;
    csv << "alpha,s_low,s_high,bidder_surplus,revenue,welfare,efficiency_gap,is_bne\n";
    for (int i = 0; i < o.steps; ++i) {
      aid::FrontierParams params;
      params.alpha = alpha_max * i / (o.steps - 1);
      if (o.eps_given) params.eps = o.eps;
      aid::InfoStructure I = aid::build_frontier_alpha(prior, params);
      aid::StrategyProfile sigma = aid::attached_strategy(I);
      aid::PayoffPoint p = aid::evaluate(I, sigma);
      aid::EquilibriumReport r = aid::verify_bne(I, sigma);
      double s_low = param_or(I, "s_low", 0.0);
      double s_high = s_low + param_or(I, "gap", 0.0);
      csv << fmt(params.alpha) << ',' << fmt(s_low) << ',' << fmt(s_high) << ','
          << fmt(p.bidder_surplus) << ',' << fmt(p.revenue) << ',' << fmt(p.welfare) << ','
          << fmt(p.efficiency_gap) << ',' << (r.is_bne ? 1 : 0) << '\n';
    }
  } else if (o.kind == "ipv") {
    csv << "t,q,bidder_surplus,revenue,welfare,efficiency_gap,is_bne\n";
    for (int i = 0; i < o.steps; ++i) {
      aid::FrontierParams params;
      params.t = o.t_given ? o.t : prior.top_value();
      params.q = static_cast<double>(i) / (o.steps - 1);
      if (o.k_given) params.k_low = o.k;
      aid::InfoStructure I = aid::build_ipv_hybrid(prior, params);
      aid::StrategyProfile sigma = aid::attached_strategy(I);
      aid::PayoffPoint p = aid::evaluate(I, sigma);
      aid::EquilibriumReport r = aid::verify_bne(I, sigma);
      csv << fmt(params.t) << ',' << fmt(params.q) << ',' << fmt(p.bidder_surplus) << ','
          << fmt(p.revenue) << ',' << fmt(p.welfare) << ',' << fmt(p.efficiency_gap) << ','
          << (r.is_bne ? 1 : 0) << '\n';
    }
  } else {
    aid::raise(aid::ErrorCode::InvalidArgument, "frontier kind must be alpha or ipv");
  }
  write_text(csv.str(), o.out);
  return 0;
}

int cmd_region(const std::string& prior_path, const std::string& out) {
  aid::SymmetricPrior prior = aid::load_prior(prior_path);
  aid::PriorStats stats = aid::compute_stats(prior);
  struct Vertex {
    const char* label;
    double bs;
    double rev;
    const char* achieved_by;
  };
  // Perimeter order: efficient frontier endpoints first, then the minimal-
  // welfare edge, so consecutive rows share an edge of the trapezoid.
  const Vertex vertices[4] = {{"A", stats.wel_max, 0.0, "point-A"},
                              {"B", 0.0, stats.wel_max, "full-extraction"},
                              {"D", 0.0, stats.wel_min, "point-D"},
                              {"C", stats.wel_min, 0.0, "point-C"}};
  std::ostringstream csv;
  csv << "label,bidder_surplus,revenue,achieved_by\n";
  for (const auto& v : vertices) {
    csv << v.label << ',' << fmt(v.bs) << ',' << fmt(v.rev) << ',' << v.achieved_by << '\n';
  }
  for (int e = 0; e < 4; ++e) {
    const Vertex& a = vertices[e];
    const Vertex& b = vertices[(e + 1) % 4];
    if (std::abs(a.bs - b.bs) + std::abs(a.rev - b.rev) <= 1e-12) continue;
    for (int s = 1; s <= 3; ++s) {
      double w = s / 4.0;
      csv << a.label << b.label << '-' << s << ','
          << fmt(a.bs + w * (b.bs - a.bs)) << ',' << fmt(a.rev + w * (b.rev - a.rev))
          << ",mixture\n";
    }
  }
  write_text(csv.str(), out);
  return 0;
}

struct OracleOptions {
  std::string structure_path;
  std::string out = "-";
  uint64_t seed = 12345;
  int samples = 200000;
  double tol = 0.0;
  bool tol_given = false;
};

// Uniform double in [0, 1) from the top 53 bits, pinned bit-exact so runs
// with the same seed agree everywhere.
double unit_draw(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

int cmd_oracle(const OracleOptions& o) {
  aid::InfoStructure I = aid::load_structure(o.structure_path);
  aid::StrategyProfile sigma = aid::attached_strategy(I);
  aid::PayoffPoint exact = aid::evaluate(I, sigma);
  const int n = I.n();

  std::vector<double> cdf(I.joint.size(), 0.0);
  double total = 0.0;
  for (size_t e = 0; e < I.joint.size(); ++e) {
    total += I.joint[e].p;
    cdf[e] = total;
  }
  if (!(total > 0.0)) aid::raise(aid::ErrorCode::EmptySupport, "structure carries no mass");

  std::mt19937_64 rng(o.seed);
  double rev_sum = 0.0, rev_sq = 0.0, bs_sum = 0.0, bs_sq = 0.0;
  for (int it = 0; it < o.samples; ++it) {
    double u = unit_draw(rng) * total;
    size_t e = static_cast<size_t>(
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (e >= I.joint.size()) e = I.joint.size() - 1;
    const auto& entry = I.joint[e];
    std::vector<int> atoms = I.signal_unrank(entry.s_id);
    const auto& profile = I.prior.pmf[static_cast<size_t>(entry.v_id)].first;

    double top = -1.0;
    int ties = 0;
    for (int i = 0; i < n; ++i) {
      double bid = sigma.bids[static_cast<size_t>(i)][static_cast<size_t>(atoms[static_cast<size_t>(i)])];
      if (bid > top) {
        top = bid;
        ties = 1;
      } else if (bid == top) {
        ++ties;
      }
    }
    int pick = (ties == 1) ? 0 : static_cast<int>(rng() % static_cast<uint64_t>(ties));
    int winner = -1;
    double second = 0.0;
    int seen = 0;
    for (int i = 0; i < n; ++i) {
      double bid = sigma.bids[static_cast<size_t>(i)][static_cast<size_t>(atoms[static_cast<size_t>(i)])];
      if (bid == top && winner < 0) {
        if (seen == pick) {
          winner = i;
          continue;
        }
        ++seen;
      }
      second = std::max(second, bid);
    }
    double value = I.prior.value_at(profile, winner);
    rev_sum += second;
    rev_sq += second * second;
    bs_sum += value - second;
    bs_sq += (value - second) * (value - second);
  }

  const double m = static_cast<double>(o.samples);
  double rev_mc = rev_sum / m;
  double bs_mc = bs_sum / m;
  double rev_se = std::sqrt(std::max(0.0, rev_sq / m - rev_mc * rev_mc) / m);
  double bs_se = std::sqrt(std::max(0.0, bs_sq / m - bs_mc * bs_mc) / m);
  double rev_thr = o.tol_given ? o.tol : 5.0 * rev_se + 1e-6;
  double bs_thr = o.tol_given ? o.tol : 5.0 * bs_se + 1e-6;
  bool ok = std::abs(rev_mc - exact.revenue) <= rev_thr &&
            std::abs(bs_mc - exact.bidder_surplus) <= bs_thr;

  json body{{"seed", o.seed},
            {"samples", o.samples},
            {"revenue_mc", rev_mc},
            {"bidder_surplus_mc", bs_mc},
            {"revenue_exact", exact.revenue},
            {"bidder_surplus_exact", exact.bidder_surplus},
            {"revenue_stderr", rev_se},
            {"bidder_surplus_stderr", bs_se},
            {"ok", ok}};
  std::ostringstream text;
  text << "# seed=" << o.seed << " samples=" << o.samples << "\n" << body.dump(2) << "\n";
  write_text(text.str(), o.out);
  return ok ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information structures for second-price auctions: builders, "
               "equilibrium verification, payoff sweeps, and plot data."};
  app.require_subcommand(1);

  BuildOptions build;
  auto* b = app.add_subcommand("build", "Build an information structure and write it as JSON");
  b->add_option("--prior", build.prior_path, "prior JSON path")->required();
  b->add_option("--kind", build.kind,
                "fully-revealing | full-extraction | strict | degenerate-max | bidder-surplus"
                " | alpha | ipv | point-A | point-C | point-D | target")
      ->required();
  auto* bk = b->add_option("--K", build.k, "signal grid size");
  auto* be = b->add_option("--eps", build.eps, "window cap / surplus bound / signal gap");
  b->add_option("--alpha", build.alpha, "frontier position in [0,(n-1)/n]");
  auto* bt = b->add_option("--t", build.t, "ipv threshold value");
  b->add_option("--q", build.q, "ipv high-region mass split in [0,1]");
  auto* br = b->add_option("--R", build.revenue, "target revenue (kind target)");
  auto* bb = b->add_option("--B", build.bidder_surplus, "target bidder surplus (kind target)");
  b->add_option("-o,--out", build.out, "output path, - for stdout");

  std::string verify_path, verify_out = "-";
  double verify_tol = 1e-9;
  auto* v = app.add_subcommand("verify", "Verify the attached strategy as a (strict) BNE");
  v->add_option("structure", verify_path, "structure JSON path")->required();
  v->add_option("--tol", verify_tol, "gain tolerance");
  v->add_option("-o,--out", verify_out, "report path, - for stdout");

  std::string eval_path, eval_out = "-";
  auto* ev = app.add_subcommand("evaluate", "Payoffs of the attached strategy");
  ev->add_option("structure", eval_path, "structure JSON path")->required();
  ev->add_option("-o,--out", eval_out, "output path, - for stdout");

  FrontierOptions frontier;
  auto* f = app.add_subcommand("frontier", "Sweep a one-parameter family; emit CSV");
  f->add_option("--prior", frontier.prior_path, "prior JSON path")->required();
  f->add_option("--kind", frontier.kind, "alpha | ipv");
  f->add_option("--steps", frontier.steps, "rows in the sweep");
  auto* fe = f->add_option("--eps", frontier.eps, "signal gap (alpha sweeps)");
  auto* ft = f->add_option("--t", frontier.t, "ipv threshold value");
  auto* fk = f->add_option("--K", frontier.k, "ipv low-window grid size");
  f->add_option("-o,--out", frontier.out, "CSV path, - for stdout");

  std::string region_prior, region_out = "-";
  auto* rg = app.add_subcommand("region", "Feasible (BS, Rev) trapezoid as CSV");
  rg->add_option("--prior", region_prior, "prior JSON path")->required();
  rg->add_option("-o,--out", region_out, "CSV path, - for stdout");

  OracleOptions oracle;
  auto* orc = app.add_subcommand("oracle", "Monte-Carlo spot check of exact payoffs");
  orc->add_option("structure", oracle.structure_path, "structure JSON path")->required();
  orc->add_option("--seed", oracle.seed, "RNG seed (printed in the output header)");
  orc->add_option("--steps", oracle.samples, "sample count");
  auto* ot = orc->add_option("--tol", oracle.tol, "override the 5-sigma acceptance band");
  orc->add_option("-o,--out", oracle.out, "output path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    json err{{"error", "InvalidArgument"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  }

  build.k_given = bk->count() > 0;
  build.eps_given = be->count() > 0;
  build.t_given = bt->count() > 0;
  build.revenue_given = br->count() > 0;
  build.bidder_surplus_given = bb->count() > 0;
  frontier.eps_given = fe->count() > 0;
  frontier.t_given = ft->count() > 0;
  frontier.k_given = fk->count() > 0;
  oracle.tol_given = ot->count() > 0;

  try {
    if (app.got_subcommand(b)) return cmd_build(build);
    if (app.got_subcommand(v)) return cmd_verify(verify_path, verify_tol, verify_out);
    if (app.got_subcommand(ev)) return cmd_evaluate(eval_path, eval_out);
    if (app.got_subcommand(f)) return cmd_frontier(frontier);
    if (app.got_subcommand(rg)) return cmd_region(region_prior, region_out);
    if (app.got_subcommand(orc)) return cmd_oracle(oracle);
  } catch (const aid::Error& e) {
    std::string message = e.what();
    std::string prefix = std::string(aid::to_string(e.code())) + ": ";
    if (message.rfind(prefix, 0) == 0) message = message.substr(prefix.size());
    json err{{"error", aid::to_string(e.code())}, {"message", message}};
    std::cerr << err.dump() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    json err{{"error", "Internal"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  }
  return 0;
}
