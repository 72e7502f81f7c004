// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

namespace ckm {

enum class PathKind { kLineOfSight, kReflected };

// One resolved propagation path. Angles are boresight-relative at the
// respective array (departure at tx, arrival at rx), in degrees.
struct PathComponent {
  PathKind kind = PathKind::kLineOfSight;
  int reflector_id = -1;  // index into Scene::reflectors for kReflected
  std::complex<double> gain;
  double aod_deg = 0.0;
  double aoa_deg = 0.0;
  double length_m = 0.0;
};

struct ChannelPaths {
  std::vector<PathComponent> paths;

  bool empty() const { return paths.empty(); }
};

}  // namespace ckm
