// SPDX-License-Identifier: Apache-2.0
//
// 16-element uniform linear array model and its 64-beam codebook: steering
// vectors, beam index <-> pointing angle mapping, and beam-pair gain over a
// resolved multipath channel.

#pragma once

#include <compare>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "ckm/channel_paths.hpp"
#include "ckm/geometry.hpp"
#include "ckm/rng.hpp"

namespace ckm {

// 1-based index into the codebook.
struct BeamIndex {
  int value = 1;

  friend constexpr auto operator<=>(const BeamIndex&, const BeamIndex&) = default;
};

// Per-element complex weights, unit Euclidean norm.
struct BeamVector {
  std::vector<std::complex<double>> weights;

  int num_elements() const { return static_cast<int>(weights.size()); }
};

struct Codebook {
  std::vector<double> angles_deg;  // strictly increasing, boresight-relative
  int num_elements = 16;
  double element_spacing = 0.5;  // wavelengths

  int num_beams() const { return static_cast<int>(angles_deg.size()); }

  double angle_of(BeamIndex m) const {
    if (m.value < 1 || m.value > num_beams()) {
      throw std::out_of_range("beam index out of codebook");
    }
    return angles_deg[static_cast<std::size_t>(m.value - 1)];
  }

  bool contains(BeamIndex m) const { return m.value >= 1 && m.value <= num_beams(); }

  // Uniformly spaced pointing angles over [first, last]. Default matches the
  // device profile: 64 beams over -56..+56 degrees, 16 elements at half a
  // wavelength.
  static Codebook uniform(int num_beams = 64, double first_deg = -56.0, double last_deg = 56.0,
                          int num_elements = 16, double element_spacing = 0.5) {
    if (num_beams < 2) {
      throw std::invalid_argument("codebook needs at least two beams");
    }
    Codebook cb;
    cb.num_elements = num_elements;
    cb.element_spacing = element_spacing;
    cb.angles_deg.resize(static_cast<std::size_t>(num_beams));
    const double span = last_deg - first_deg;
    for (int i = 0; i < num_beams; ++i) {
      cb.angles_deg[static_cast<std::size_t>(i)] =
          first_deg + span * (static_cast<double>(i) / static_cast<double>(num_beams - 1));
    }
    return cb;
  }
};

inline void validate_codebook(const Codebook& cb) {
  if (cb.num_beams() < 2) {
    throw std::invalid_argument("codebook needs at least two beams");
  }
  if (cb.num_elements < 1) {
    throw std::invalid_argument("codebook needs at least one element");
  }
  if (!(cb.element_spacing > 0.0)) {
    throw std::invalid_argument("element spacing must be positive");
  }
  for (std::size_t i = 1; i < cb.angles_deg.size(); ++i) {
    if (!(cb.angles_deg[i] > cb.angles_deg[i - 1])) {
      throw std::invalid_argument("codebook angles must be strictly increasing");
    }
  }
}

// Array response / steering vector for a ULA. Element n (0-based) carries
// phase 2*pi*spacing*n*sin(theta); per-element magnitude 1/sqrt(N). Positive
// phase progression for positive angles, element 0 as reference.
inline BeamVector steering_vector(double theta_deg, int num_elements, double spacing_wl) {
  if (!(std::abs(theta_deg) < 90.0)) {
    throw std::domain_error("behind array plane");
  }
  if (num_elements < 1) {
    throw std::invalid_argument("array needs at least one element");
  }
  BeamVector v;
  v.weights.resize(static_cast<std::size_t>(num_elements));
  const double step = 2.0 * kPi * spacing_wl * std::sin(deg_to_rad(theta_deg));
  const double amp = 1.0 / std::sqrt(static_cast<double>(num_elements));
  for (int n = 0; n < num_elements; ++n) {
    const double phase = step * static_cast<double>(n);
    v.weights[static_cast<std::size_t>(n)] = std::polar(amp, phase);
  }
  return v;
}

// Pre-set beamforming vector for beam index m.
inline BeamVector beam_vector(const Codebook& cb, BeamIndex m) {
  return steering_vector(cb.angle_of(m), cb.num_elements, cb.element_spacing);
}

// argmin over m of |target - angle(m)|; ties break toward the lower index.
// Targets beyond the codebook range clamp to the nearest edge beam.
inline BeamIndex nearest_beam(const Codebook& cb, double target_deg) {
  int best = 1;
  double best_err = std::abs(target_deg - cb.angles_deg[0]);
  for (int m = 2; m <= cb.num_beams(); ++m) {
    const double err = std::abs(target_deg - cb.angles_deg[static_cast<std::size_t>(m - 1)]);
    if (err < best_err) {
      best_err = err;
      best = m;
    }
  }
  return BeamIndex{best};
}

// x^H y
inline std::complex<double> cdot(const BeamVector& x, const BeamVector& y) {
  if (x.weights.size() != y.weights.size()) {
    throw std::invalid_argument("beam vector dimension mismatch");
  }
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t n = 0; n < x.weights.size(); ++n) {
    acc += std::conj(x.weights[n]) * y.weights[n];
  }
  return acc;
}

// Received beam-pair power gain |w^H H f|^2 with
// H = sqrt(Mr*Mt) * sum_p gain_p * a_r(aoa_p) * a_t(aod_p)^H.
inline double pair_gain(const BeamVector& f, const BeamVector& w, const ChannelPaths& paths,
                        double spacing_wl = 0.5) {
  if (f.weights.empty() || w.weights.empty()) {
    throw std::invalid_argument("beam vector dimension mismatch");
  }
  std::complex<double> acc{0.0, 0.0};
  for (const PathComponent& p : paths.paths) {
    const BeamVector at = steering_vector(p.aod_deg, f.num_elements(), spacing_wl);
    const BeamVector ar = steering_vector(p.aoa_deg, w.num_elements(), spacing_wl);
    acc += p.gain * cdot(w, ar) * cdot(at, f);
  }
  const double scale = static_cast<double>(f.num_elements()) * static_cast<double>(w.num_elements());
  return scale * std::norm(acc);
}

// Stable hash of the device profile, used to pin BIM files to the codebook
// they were built with.
inline std::uint64_t profile_hash(const Codebook& cb) {
  std::string canon;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "elements:%d;spacing:%.17g;beams:%d;", cb.num_elements,
                cb.element_spacing, cb.num_beams());
  canon += buf;
  for (double a : cb.angles_deg) {
    std::snprintf(buf, sizeof(buf), "%.17g,", a);
    canon += buf;
  }
  return fnv1a64(canon);
}

}  // namespace ckm
