#include "aid/json_io.hpp"

#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "aid/errors.hpp"

namespace aid {
namespace {

void require(bool cond, const std::string& message) {
  if (!cond) raise(ErrorCode::InvalidArgument, message);
}

std::vector<int> int_vector(const nlohmann::json& j, const std::string& what) {
  require(j.is_array(), what + " must be an array");
  std::vector<int> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    require(e.is_number_integer(), what + " entries must be integers");
    out.push_back(e.get<int>());
  }
  return out;
}

}  // namespace

nlohmann::json prior_to_json(const SymmetricPrior& prior) {
  nlohmann::json j;
  j["n"] = prior.n_bidders;
  j["values"] = prior.values;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [profile, p] : prior.pmf) {
    rows.push_back({{"profile", profile}, {"p", p}});
  }
  j["pmf"] = rows;
  return j;
}

SymmetricPrior prior_from_json(const nlohmann::json& j) {
  require(j.is_object(), "prior must be an object");
  require(j.contains("n") && j["n"].is_number_integer(), "prior needs an integer field n");
  require(j.contains("values") && j["values"].is_array(), "prior needs a values array");
  require(j.contains("pmf") && j["pmf"].is_array(), "prior needs a pmf array");
  SymmetricPrior prior;
  prior.n_bidders = j["n"].get<int>();
  for (const auto& v : j["values"]) {
    require(v.is_number(), "values must be numbers");
    prior.values.push_back(v.get<double>());
  }
  for (const auto& row : j["pmf"]) {
    require(row.is_object() && row.contains("profile") && row.contains("p"),
            "pmf rows need profile and p");
    require(row["p"].is_number(), "pmf mass must be a number");
    prior.pmf.emplace_back(int_vector(row["profile"], "profile"), row["p"].get<double>());
  }
  validate(prior);
  return prior;
}

nlohmann::json structure_to_json(const InfoStructure& I) {
  nlohmann::json j;
  j["prior"] = prior_to_json(I.prior);
  nlohmann::json grids = nlohmann::json::array();
  for (const SignalGrid& grid : I.grids) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const SignalAtom& atom : grid.atoms) {
      if (atom.tag == 0) {
        atoms.push_back(atom.value);
      } else {
        atoms.push_back({{"v", atom.value}, {"tag", atom.tag}});
      }
    }
    grids.push_back(std::move(atoms));
  }
  j["grids"] = std::move(grids);
  nlohmann::json joint = nlohmann::json::array();
  for (const JointEntry& e : I.joint) {
    joint.push_back({{"v", I.prior.pmf[static_cast<size_t>(e.v_id)].first},
                     {"s", I.signal_unrank(e.s_id)},
                     {"p", e.p}});
  }
  j["joint"] = std::move(joint);
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [name, value] : I.construction.params) params[name] = value;
  j["construction"] = {{"kind", I.construction.kind}, {"params", std::move(params)}};
  if (!I.strategy.empty()) j["strategy"] = I.strategy;
  return j;
}

InfoStructure structure_from_json(const nlohmann::json& j) {
  require(j.is_object(), "structure must be an object");
  require(j.contains("prior"), "structure needs a prior");
  require(j.contains("grids") && j["grids"].is_array(), "structure needs a grids array");
  require(j.contains("joint") && j["joint"].is_array(), "structure needs a joint array");
  InfoStructure I;
  I.prior = prior_from_json(j["prior"]);
  for (const auto& grid_json : j["grids"]) {
    require(grid_json.is_array(), "each grid must be an array");
    SignalGrid grid;
    for (const auto& atom : grid_json) {
      if (atom.is_number()) {
        grid.atoms.push_back({atom.get<double>(), 0});
      } else {
        require(atom.is_object() && atom.contains("v") && atom.contains("tag"),
                "tagged atoms need v and tag");
        grid.atoms.push_back({atom["v"].get<double>(), atom["tag"].get<int>()});
      }
    }
    I.grids.push_back(std::move(grid));
  }
  require(static_cast<int>(I.grids.size()) == I.prior.n_bidders,
          "structure needs one grid per bidder");

  ProfileIndex rows(I.prior);
  JointBuilder builder(I);
  for (const auto& cell : j["joint"]) {
    require(cell.is_object() && cell.contains("v") && cell.contains("s") && cell.contains("p"),
            "joint cells need v, s, p");
    std::vector<int> profile = int_vector(cell["v"], "joint value profile");
    int row = rows.find(profile);
    require(row >= 0, "joint cell sits on a value profile with no prior mass");
    std::vector<int> s = int_vector(cell["s"], "joint signal profile");
    require(static_cast<int>(s.size()) == I.prior.n_bidders, "signal profile has wrong length");
    for (size_t i = 0; i < s.size(); ++i) {
      require(s[i] >= 0 && s[i] < I.grids[i].size(), "signal index out of range");
    }
    require(cell["p"].is_number(), "joint mass must be a number");
    builder.add(s, row, cell["p"].get<double>());
  }
  I.joint = builder.finish();

  if (j.contains("construction")) {
    const auto& c = j["construction"];
    require(c.is_object() && c.contains("kind"), "construction needs a kind");
    I.construction.kind = c["kind"].get<std::string>();
    if (c.contains("params")) {
      require(c["params"].is_object(), "construction params must be an object");
      for (const auto& [name, value] : c["params"].items()) {
        require(value.is_number(), "construction params must be numbers");
        I.construction.params.emplace_back(name, value.get<double>());
      }
    }
  }
  if (j.contains("strategy")) {
    require(j["strategy"].is_array(), "strategy must be an array");
    for (const auto& bids : j["strategy"]) {
      require(bids.is_array(), "strategy rows must be arrays");
      std::vector<double> row;
      for (const auto& b : bids) {
        require(b.is_number(), "bids must be numbers");
        row.push_back(b.get<double>());
      }
      I.strategy.push_back(std::move(row));
    }
    require(I.strategy.size() == I.grids.size(), "strategy needs one row per bidder");
    for (size_t i = 0; i < I.strategy.size(); ++i) {
      require(static_cast<int>(I.strategy[i].size()) == I.grids[i].size(),
              "strategy rows must match grid sizes");
    }
  }
  validate_structure(I);
  return I;
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) raise(ErrorCode::IoError, "malformed JSON in " + path);
  return j;
}

SymmetricPrior load_prior(const std::string& path) { return prior_from_json(load_json(path)); }

InfoStructure load_structure(const std::string& path) {
  return structure_from_json(load_json(path));
}

void save_json(const nlohmann::json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) raise(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace aid
