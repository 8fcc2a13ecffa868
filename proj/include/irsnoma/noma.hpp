#pragma once

#include <vector>

#include "irsnoma/linalg.hpp"

namespace irsnoma {

/// How the multi-signal interference term entering each SINR is formed.
/// PerTermPower sums |h^H w_j|^2 over the not-yet-decoded signals, which is
/// the form the lifted trace constraints encode and the optimizer enforces;
/// CoherentSum applies |h^H sum_j w_j|^2 instead.
enum class InterferenceModel { PerTermPower, CoherentSum };

/// Downlink beamformers, one per user; ||w_k||^2 is the power spent on
/// signal k.
struct BeamformerSet {
  std::vector<ComplexVector> w;

  int users() const { return static_cast<int>(w.size()); }
  int antennas() const { return w.empty() ? 0 : static_cast<int>(w[0].size()); }
};

/// Per-user rate floors and the equivalent linear SINR floors.
struct QosSpec {
  std::vector<double> r_min;      // bits/s/Hz
  std::vector<double> gamma_min;  // 2^r_min - 1

  static QosSpec uniform_rate(int users, double rate);
  int users() const { return static_cast<int>(r_min.size()); }
};

/// Minimum SINR needed to decode at rate r: 2^r - 1.
double gamma_from_rate(double r);

/// SINR of signal k when decoded at user l (0-based, k <= l), given the
/// effective channels of all users.
double sinr(const std::vector<ComplexVector>& h, const BeamformerSet& w, int k,
            int l, double sigma2,
            InterferenceModel model = InterferenceModel::PerTermPower);

/// log2(1 + min over decoding users l in [k, K-1] of sinr(k, l)).
double achievable_rate(const std::vector<ComplexVector>& h,
                       const BeamformerSet& w, int k, double sigma2,
                       InterferenceModel model = InterferenceModel::PerTermPower);

struct QosReport {
  bool satisfied = false;
  /// min over (k, l) pairs of |h_l^H w_k|^2 / (gamma_k (I + sigma2)) - 1;
  /// +inf when every pair has a zero SINR floor.
  double worst_margin = 0.0;
  int worst_k = -1;
  int worst_l = -1;
};

/// Checks every decoding constraint gamma_k (I_{k,l} + sigma2) <= |h_l^H w_k|^2
/// with multiplicative slack (1 - slack) on the right-hand side floor.
QosReport qos_satisfied(const std::vector<ComplexVector>& h,
                        const BeamformerSet& w, const QosSpec& q, double sigma2,
                        double slack = 1e-4,
                        InterferenceModel model = InterferenceModel::PerTermPower);

/// Total transmit power sum_k ||w_k||^2.
double total_power(const BeamformerSet& w);

}  // namespace irsnoma
