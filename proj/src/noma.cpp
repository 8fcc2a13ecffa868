#include "irsnoma/noma.hpp"

#include <cmath>
#include <limits>

namespace irsnoma {

QosSpec QosSpec::uniform_rate(int users, double rate) {
  QosSpec q;
  q.r_min.assign(static_cast<std::size_t>(users), rate);
  q.gamma_min.assign(static_cast<std::size_t>(users), gamma_from_rate(rate));
  return q;
}

double gamma_from_rate(double r) {
  if (r < 0.0) {
    throw InvalidInputError("gamma_from_rate: rate must be nonnegative");
  }
  return std::exp2(r) - 1.0;
}

namespace {

double interference_power(const ComplexVector& h_l, const BeamformerSet& w,
                          int k, InterferenceModel model) {
  const int users = w.users();
  if (model == InterferenceModel::CoherentSum) {
    Complex acc = 0.0;
    for (int j = k + 1; j < users; ++j) {
      acc += h_l.dot(w.w[static_cast<std::size_t>(j)]);
    }
    return std::norm(acc);
  }
  double acc = 0.0;
  for (int j = k + 1; j < users; ++j) {
    acc += std::norm(h_l.dot(w.w[static_cast<std::size_t>(j)]));
  }
  return acc;
}

}  // namespace

double sinr(const std::vector<ComplexVector>& h, const BeamformerSet& w, int k,
            int l, double sigma2, InterferenceModel model) {
  if (k < 0 || l < k || l >= static_cast<int>(h.size())) {
    throw InvalidInputError("sinr: need 0 <= k <= l < K");
  }
  const ComplexVector& h_l = h[static_cast<std::size_t>(l)];
  // Eigen's dot conjugates the first argument, so h_l.dot(w) = h_l^H w.
  const double signal = std::norm(h_l.dot(w.w[static_cast<std::size_t>(k)]));
  return signal / (interference_power(h_l, w, k, model) + sigma2);
}

double achievable_rate(const std::vector<ComplexVector>& h,
                       const BeamformerSet& w, int k, double sigma2,
                       InterferenceModel model) {
  double worst = std::numeric_limits<double>::infinity();
  for (int l = k; l < static_cast<int>(h.size()); ++l) {
    worst = std::min(worst, sinr(h, w, k, l, sigma2, model));
  }
  return std::log2(1.0 + worst);
}

QosReport qos_satisfied(const std::vector<ComplexVector>& h,
                        const BeamformerSet& w, const QosSpec& q, double sigma2,
                        double slack, InterferenceModel model) {
  if (slack < 0.0) {
    throw InvalidInputError("qos_satisfied: slack must be nonnegative");
  }
  const int users = w.users();
  QosReport report;
  report.satisfied = true;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < users; ++k) {
    const double gamma = q.gamma_min[static_cast<std::size_t>(k)];
    for (int l = k; l < users; ++l) {
      const ComplexVector& h_l = h[static_cast<std::size_t>(l)];
      const double lhs = std::norm(h_l.dot(w.w[static_cast<std::size_t>(k)]));
      const double rhs = gamma * (interference_power(h_l, w, k, model) + sigma2);
      if (rhs <= 0.0) continue;  // zero SINR floor, trivially met
      const double margin = lhs / rhs - 1.0;
      if (margin < report.worst_margin) {
        report.worst_margin = margin;
        report.worst_k = k;
        report.worst_l = l;
      }
      if (lhs < (1.0 - slack) * rhs) report.satisfied = false;
    }
  }
  return report;
}

double total_power(const BeamformerSet& w) {
  double acc = 0.0;
  for (const auto& wk : w.w) acc += wk.squaredNorm();
  return acc;
}

}  // namespace irsnoma
