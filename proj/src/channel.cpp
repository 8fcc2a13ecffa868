#include "irsnoma/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace irsnoma {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

PhaseShiftVector PhaseShiftVector::zeros(int n) {
  return PhaseShiftVector{std::vector<double>(static_cast<std::size_t>(n), 0.0)};
}

PhaseShiftVector PhaseShiftVector::random(int n, Rng& rng) {
  PhaseShiftVector out;
  out.theta.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.theta.push_back(rng.uniform(0.0, kTwoPi));
  return out;
}

ComplexVector PhaseShiftVector::unit_modulus() const {
  ComplexVector v(size());
  for (int i = 0; i < size(); ++i) {
    v(i) = std::polar(1.0, -theta[static_cast<std::size_t>(i)]);
  }
  return v;
}

ComplexVector PhaseShiftVector::shift_diagonal() const {
  ComplexVector d(size());
  for (int i = 0; i < size(); ++i) {
    d(i) = std::polar(1.0, theta[static_cast<std::size_t>(i)]);
  }
  return d;
}

double path_loss(double d, double alpha, const PathLossParams& p) {
  if (!(d > 0.0)) {
    throw InvalidInputError("path_loss: distance must be positive");
  }
  if (!(p.d0 > 0.0) || alpha < 0.0) {
    throw InvalidInputError("path_loss: d0 must be positive and alpha >= 0");
  }
  return std::pow(10.0, -p.t0_db / 10.0) * std::pow(d / p.d0, -alpha);
}

ChannelRealization sample_channels(const NetworkGeometry& geom,
                                   const PathLossParams& p, int m, int n,
                                   Rng& rng) {
  if (m < 1 || n < 0) {
    throw InvalidInputError("sample_channels: need m >= 1 and n >= 0");
  }
  const int k = static_cast<int>(geom.users.size());
  if (k < 1) {
    throw InvalidInputError("sample_channels: need at least one user");
  }
  if (n > 0 && !(distance(geom.bs, geom.irs) > 0.0)) {
    throw InvalidInputError("sample_channels: BS and IRS positions coincide");
  }

  ChannelRealization r;
  r.h_d.resize(static_cast<std::size_t>(k));
  r.h_r.resize(static_cast<std::size_t>(k));

  // One substream per vector / matrix column, all derived from a single
  // draw of the caller's generator. Entry i of a given object is then the
  // same number regardless of the requested dimensions, so sweeps over
  // antennas or elements extend channels instead of redrawing them, and
  // dimension trends are not washed out by fresh fading noise.
  const std::uint64_t root = rng.next_u64();
  constexpr std::uint64_t kReflectedStream = 1000;
  constexpr std::uint64_t kSurfaceStream = 2000;

  for (int u = 0; u < k; ++u) {
    const double gain = path_loss(distance(geom.bs, geom.users[u]), p.alpha_bu, p);
    const double scale = std::sqrt(gain);
    Rng stream = Rng::derived(root, static_cast<std::uint64_t>(u));
    ComplexVector h(m);
    for (int i = 0; i < m; ++i) h(i) = scale * stream.complex_gaussian();
    r.h_d[static_cast<std::size_t>(u)] = std::move(h);
  }
  for (int u = 0; u < k; ++u) {
    ComplexVector h(n);
    if (n > 0) {
      const double gain = path_loss(distance(geom.irs, geom.users[u]), p.alpha_iu, p);
      const double scale = std::sqrt(gain);
      Rng stream = Rng::derived(root, kReflectedStream + static_cast<std::uint64_t>(u));
      for (int i = 0; i < n; ++i) h(i) = scale * stream.complex_gaussian();
    }
    r.h_r[static_cast<std::size_t>(u)] = std::move(h);
  }
  r.g.resize(n, m);
  if (n > 0) {
    const double gain = path_loss(distance(geom.bs, geom.irs), p.alpha_bi, p);
    const double scale = std::sqrt(gain);
    for (int col = 0; col < m; ++col) {
      Rng stream = Rng::derived(root, kSurfaceStream + static_cast<std::uint64_t>(col));
      for (int row = 0; row < n; ++row) r.g(row, col) = scale * stream.complex_gaussian();
    }
  }
  return r;
}

std::vector<int> order_users(const ChannelRealization& r) {
  std::vector<int> perm(static_cast<std::size_t>(r.users()));
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    return r.h_d[static_cast<std::size_t>(a)].norm() <
           r.h_d[static_cast<std::size_t>(b)].norm();
  });
  return perm;
}

ChannelRealization reorder_users(const ChannelRealization& r,
                                 const std::vector<int>& perm) {
  if (perm.size() != r.h_d.size()) {
    throw InvalidInputError("reorder_users: permutation size mismatch");
  }
  ChannelRealization out;
  out.g = r.g;
  out.sigma2 = r.sigma2;
  out.h_d.reserve(perm.size());
  out.h_r.reserve(perm.size());
  for (int idx : perm) {
    out.h_d.push_back(r.h_d[static_cast<std::size_t>(idx)]);
    out.h_r.push_back(r.h_r[static_cast<std::size_t>(idx)]);
  }
  return out;
}

ComplexVector effective_channel(const ChannelRealization& r,
                                const PhaseShiftVector& phases, int l) {
  if (l < 0 || l >= r.users()) {
    throw InvalidInputError("effective_channel: user index out of range");
  }
  if (phases.size() != r.elements()) {
    throw InvalidInputError("effective_channel: phase vector dimension mismatch");
  }
  const auto& h_r = r.h_r[static_cast<std::size_t>(l)];
  const auto& h_d = r.h_d[static_cast<std::size_t>(l)];
  if (r.elements() == 0) return h_d;
  const Eigen::RowVectorXcd row =
      h_r.adjoint() * phases.shift_diagonal().asDiagonal() * r.g;
  return row.adjoint() + h_d;
}

std::uint64_t channel_digest(const ChannelRealization& r) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  auto mix_bytes = [&hash](const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      hash ^= bytes[i];
      hash *= 0x100000001B3ULL;
    }
  };
  auto mix_vector = [&](const ComplexVector& v) {
    mix_bytes(v.data(), sizeof(Complex) * static_cast<std::size_t>(v.size()));
  };
  for (const auto& h : r.h_d) mix_vector(h);
  for (const auto& h : r.h_r) mix_vector(h);
  mix_bytes(r.g.data(), sizeof(Complex) * static_cast<std::size_t>(r.g.size()));
  mix_bytes(&r.sigma2, sizeof(double));
  return hash;
}

}  // namespace irsnoma
