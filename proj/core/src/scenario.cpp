#include "ldsnoma/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ldsnoma/keyvalue.hpp"
#include "ldsnoma/textio.hpp"
#include "ldsnoma/units.hpp"

namespace ldsnoma {

Eigen::VectorXd Scenario::pathloss_gains() const {
  Eigen::VectorXd a2(num_ues());
  for (int k = 0; k < num_ues(); ++k) a2[k] = ues[k].pathloss_gain;
  return a2;
}

Eigen::VectorXd Scenario::power_budgets() const {
  Eigen::VectorXd p(num_ues());
  for (int k = 0; k < num_ues(); ++k) p[k] = ues[k].power_budget;
  return p;
}

std::vector<int> Scenario::sparsities() const {
  std::vector<int> d(ues.size());
  for (std::size_t k = 0; k < ues.size(); ++k) d[k] = ues[k].sparsity;
  return d;
}

void Scenario::validate() const {
  std::string problems;
  const auto complain = [&problems](const std::string& msg) {
    if (!problems.empty()) problems += "; ";
    problems += msg;
  };
  if (num_subchannels < 1) complain("F must be >= 1");
  if (!(noise_power > 0.0)) complain("noise power must be positive");
  if (ues.empty()) complain("need at least one UE");
  for (std::size_t k = 0; k < ues.size(); ++k) {
    const UeRecord& ue = ues[k];
    if (!(ue.pathloss_gain > 0.0))
      complain("UE " + std::to_string(k) + ": pathloss gain must be positive");
    if (!(ue.power_budget > 0.0))
      complain("UE " + std::to_string(k) + ": power budget must be positive");
    if (ue.sparsity < 1 || ue.sparsity > num_subchannels)
      complain("UE " + std::to_string(k) + ": sparsity must be in [1, F]");
  }
  if (!problems.empty())
    throw std::invalid_argument("invalid scenario: " + problems);
}

Scenario make_drop(int num_subchannels, int num_ues, int sparsity,
                   RandomStream rng) {
  if (num_subchannels < 1 || num_ues < 1 || sparsity < 1 ||
      sparsity > num_subchannels)
    throw std::invalid_argument(
        "make_drop: need F >= 1, K >= 1 and 1 <= d <= F (got F=" +
        std::to_string(num_subchannels) + ", K=" + std::to_string(num_ues) +
        ", d=" + std::to_string(sparsity) + ")");
  Scenario scn;
  scn.num_subchannels = num_subchannels;
  scn.noise_power = db_to_linear(-120.0);  // -120 dBW
  scn.ues.resize(num_ues);
  for (UeRecord& ue : scn.ues) {
    ue.pathloss_gain = db_to_linear(rng.uniform(-150.0, -60.0));
    ue.power_budget = 1.0;
    ue.sparsity = sparsity;
  }
  return scn;
}

void save_scenario(const Scenario& scn, std::ostream& out) {
  scn.validate();
  KeyValueDoc doc;
  doc.set_scalar("F", std::to_string(scn.num_subchannels));
  doc.set_scalar("K", std::to_string(scn.num_ues()));
  doc.set_scalar("sigma2_dBW", format_double(linear_to_db(scn.noise_power)));
  std::vector<std::string> pl, pw, sp;
  for (const UeRecord& ue : scn.ues) {
    pl.push_back(format_double(linear_to_db(ue.pathloss_gain)));
    pw.push_back(format_double(ue.power_budget));
    sp.push_back(std::to_string(ue.sparsity));
  }
  doc.set("pathloss_dB", std::move(pl));
  doc.set("power_W", std::move(pw));
  doc.set("sparsity", std::move(sp));
  doc.write(out);
}

void save_scenario(const Scenario& scn, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  save_scenario(scn, out);
}

Scenario load_scenario(std::istream& in) {
  const KeyValueDoc doc = KeyValueDoc::parse(in);
  for (const auto& key : doc.keys()) {
    if (key != "F" && key != "K" && key != "sigma2_dBW" && key != "pathloss_dB" &&
        key != "power_W" && key != "sparsity")
      throw std::invalid_argument("scenario: unknown key '" + key + "'");
  }
  Scenario scn;
  scn.num_subchannels = static_cast<int>(doc.get_int("F"));
  const auto num_ues = doc.get_int("K");
  scn.noise_power = db_to_linear(doc.get_double("sigma2_dBW"));
  const auto pl = doc.get_doubles("pathloss_dB");
  const auto pw = doc.get_doubles("power_W");
  const auto sp = doc.get_ints("sparsity");
  if (static_cast<long long>(pl.size()) != num_ues ||
      static_cast<long long>(pw.size()) != num_ues ||
      static_cast<long long>(sp.size()) != num_ues)
    throw std::invalid_argument(
        "scenario: pathloss_dB, power_W and sparsity must each list K=" +
        std::to_string(num_ues) + " values");
  scn.ues.resize(pl.size());
  for (std::size_t k = 0; k < pl.size(); ++k) {
    scn.ues[k].pathloss_gain = db_to_linear(pl[k]);
    scn.ues[k].power_budget = pw[k];
    scn.ues[k].sparsity = static_cast<int>(sp[k]);
  }
  scn.validate();
  return scn;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load_scenario(in);
}

}  // namespace ldsnoma
