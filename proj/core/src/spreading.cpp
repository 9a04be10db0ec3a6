#include "ldsnoma/spreading.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ldsnoma/parallel.hpp"
#include "ldsnoma/textio.hpp"

namespace ldsnoma {

SpreadingMatrix::SpreadingMatrix(Eigen::MatrixXd values)
    : values_(std::move(values)) {
  for (Eigen::Index k = 0; k < values_.cols(); ++k)
    for (Eigen::Index f = 0; f < values_.rows(); ++f)
      if (!(values_(f, k) >= 0.0))
        throw std::invalid_argument(
            "spreading matrix: entry (" + std::to_string(f) + ", " +
            std::to_string(k) + ") = " + format_double(values_(f, k)) +
            " must be nonnegative");
  support_.resize(values_.cols());
  for (Eigen::Index k = 0; k < values_.cols(); ++k)
    for (Eigen::Index f = 0; f < values_.rows(); ++f)
      if (values_(f, k) > 0.0) support_[k].push_back(static_cast<int>(f));
}

double SpreadingMatrix::column_power(int k) const {
  const Eigen::VectorXd col = values_.col(k);
  return pairwise_sum(std::span<const double>(col.data(), col.size()));
}

void check_conforms(const Scenario& scn, const SpreadingMatrix& v,
                    bool require_sparsity, double tol) {
  if (v.num_subchannels() != scn.num_subchannels ||
      v.num_ues() != scn.num_ues())
    throw std::invalid_argument(
        "spreading matrix is " + std::to_string(v.num_subchannels()) + "x" +
        std::to_string(v.num_ues()) + " but scenario is " +
        std::to_string(scn.num_subchannels) + "x" +
        std::to_string(scn.num_ues()));
  for (int k = 0; k < scn.num_ues(); ++k) {
    const double spent = v.column_power(k);
    if (spent > scn.ues[k].power_budget + tol)
      throw std::invalid_argument(
          "UE " + std::to_string(k) + " spends " + format_double(spent) +
          " W, above its budget " + format_double(scn.ues[k].power_budget));
    if (require_sparsity && v.support_size(k) != scn.ues[k].sparsity)
      throw std::invalid_argument(
          "UE " + std::to_string(k) + " occupies " +
          std::to_string(v.support_size(k)) + " sub-channels, expected " +
          std::to_string(scn.ues[k].sparsity));
  }
}

void save_spreading(const SpreadingMatrix& v, std::ostream& out) {
  out << v.num_subchannels() << ' ' << v.num_ues() << '\n';
  for (int k = 0; k < v.num_ues(); ++k)
    for (const int f : v.support(k))
      out << f << ' ' << k << ' ' << format_double(v(f, k)) << '\n';
}

void save_spreading(const SpreadingMatrix& v, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  save_spreading(v, out);
}

SpreadingMatrix load_spreading(std::istream& in) {
  int num_subchannels = 0;
  int num_ues = 0;
  if (!(in >> num_subchannels >> num_ues))
    throw std::invalid_argument("spreading matrix: missing 'F K' header");
  if (num_subchannels < 1 || num_ues < 1)
    throw std::invalid_argument("spreading matrix: header dimensions must be positive");
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(num_subchannels, num_ues);
  int f = 0;
  int k = 0;
  double value = 0.0;
  while (in >> f) {
    // A sub-channel index alone is not a triplet; catch truncation instead
    // of letting the eof-terminated loop swallow it.
    if (!(in >> k >> value))
      throw std::invalid_argument("spreading matrix: truncated triplet after '" +
                                  std::to_string(f) + "'");
    if (f < 0 || f >= num_subchannels || k < 0 || k >= num_ues)
      throw std::invalid_argument("spreading matrix: entry (" + std::to_string(f) +
                                  ", " + std::to_string(k) + ") out of range");
    values(f, k) = value;
  }
  if (!in.eof()) {
    in.clear();
    std::string tail;
    std::getline(in, tail);
    throw std::invalid_argument("spreading matrix: malformed triplet near '" + tail + "'");
  }
  return SpreadingMatrix(std::move(values));
}

SpreadingMatrix load_spreading(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load_spreading(in);
}

}  // namespace ldsnoma
