#pragma once

#include <cstdint>
#include <vector>

#include "irsnoma/linalg.hpp"
#include "irsnoma/rng.hpp"

namespace irsnoma {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance(const Vec3& a, const Vec3& b);

/// Base-station, reflecting-surface and user positions, in meters.
struct NetworkGeometry {
  Vec3 bs{0.0, 0.0, 25.0};
  Vec3 irs{50.0, 50.0, 40.0};
  std::vector<Vec3> users;
};

/// Distance-power-law path loss: L(d) = 10^(-t0_db/10) * (d/d0)^(-alpha).
struct PathLossParams {
  double t0_db = 30.0;   // reference loss at d0, in dB
  double d0 = 1.0;       // reference distance, meters
  double alpha_bu = 3.5; // BS-user exponent
  double alpha_bi = 2.2; // BS-IRS exponent
  double alpha_iu = 2.8; // IRS-user exponent
};

/// One fading draw for a network instance: direct links h_d (K vectors of
/// dim M), reflected links h_r (K vectors of dim N), BS-to-surface matrix
/// g (N x M), and the common noise power.
struct ChannelRealization {
  std::vector<ComplexVector> h_d;
  std::vector<ComplexVector> h_r;
  ComplexMatrix g;
  double sigma2 = 0.01;

  int users() const { return static_cast<int>(h_d.size()); }
  int antennas() const { return h_d.empty() ? 0 : static_cast<int>(h_d[0].size()); }
  int elements() const { return static_cast<int>(g.rows()); }
};

/// Per-element phase shifts theta_n in [0, 2pi). The surface applies
/// diag(e^{j theta_1}, ..., e^{j theta_N}); the associated optimization
/// vector has entries v_n = e^{-j theta_n}.
struct PhaseShiftVector {
  std::vector<double> theta;

  static PhaseShiftVector zeros(int n);
  static PhaseShiftVector random(int n, Rng& rng);

  int size() const { return static_cast<int>(theta.size()); }
  /// v with v_n = e^{-j theta_n}.
  ComplexVector unit_modulus() const;
  /// diag entries e^{+j theta_n} of the phase-shift matrix.
  ComplexVector shift_diagonal() const;
};

double wrap_angle(double theta);  // into [0, 2pi)

/// Linear power gain at link distance d.
double path_loss(double d, double alpha, const PathLossParams& p);

/// Rayleigh-fading draw: every entry i.i.d. CN(0,1) scaled by the square
/// root of the link path loss. Draw order (h_d per user, then h_r per
/// user, then g column-major) is fixed, so a seed pins the realization
/// bit-exactly. n = 0 (no reflecting surface) is allowed.
ChannelRealization sample_channels(const NetworkGeometry& geom,
                                   const PathLossParams& p, int m, int n,
                                   Rng& rng);

/// Permutation sorting users by ascending direct-link norm ||h_d||_2,
/// ties broken by original index.
std::vector<int> order_users(const ChannelRealization& r);

/// Relabel users so that index 0 is the weakest direct link.
ChannelRealization reorder_users(const ChannelRealization& r,
                                 const std::vector<int>& perm);

/// Composite channel h_l with h_l^H = h_{r,l}^H diag(e^{j theta}) G + h_{d,l}^H.
ComplexVector effective_channel(const ChannelRealization& r,
                                const PhaseShiftVector& phases, int l);

/// FNV-1a digest over the raw channel bytes; used to verify that paired
/// runs consumed identical realizations.
std::uint64_t channel_digest(const ChannelRealization& r);

}  // namespace irsnoma
