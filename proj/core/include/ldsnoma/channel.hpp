#pragma once

#include <Eigen/Core>

#include "ldsnoma/random.hpp"
#include "ldsnoma/scenario.hpp"
#include "ldsnoma/spreading.hpp"

namespace ldsnoma {

/// Draws one small-scale fading realization of the F x K uplink channel:
///   h_{f,k} = a_k * sqrt(v_{f,k}) * g_{f,k},  g_{f,k} ~ CN(0, 1) i.i.d.
/// so E|h_{f,k}|^2 = a_k^2 v_{f,k}. One complex Gaussian is consumed per
/// (f, k) entry in column-major order, including entries with v_{f,k} = 0;
/// that keeps draws aligned across different matrices on the same stream,
/// which is what makes common-random-number comparisons work.
Eigen::MatrixXcd sample_channel(const Scenario& scn, const SpreadingMatrix& v,
                                RandomStream rng);

}  // namespace ldsnoma
