#include "ldsnoma/channel.hpp"

#include <cmath>

namespace ldsnoma {

Eigen::MatrixXcd sample_channel(const Scenario& scn, const SpreadingMatrix& v,
                                RandomStream rng) {
  check_conforms(scn, v);
  const int num_f = scn.num_subchannels;
  const int num_k = scn.num_ues();
  Eigen::MatrixXcd h(num_f, num_k);
  for (int k = 0; k < num_k; ++k) {
    const double a = std::sqrt(scn.ues[k].pathloss_gain);
    for (int f = 0; f < num_f; ++f)
      h(f, k) = a * std::sqrt(v(f, k)) * rng.complex_gaussian();
  }
  return h;
}

}  // namespace ldsnoma
