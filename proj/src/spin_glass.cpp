#include "anticonc/spin_glass.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "anticonc/coupling.hpp"
#include "anticonc/densities.hpp"
#include "anticonc/errors.hpp"

namespace anticonc {

SKDisorder::SKDisorder(int n, std::span<const double> upper) : n_(n) {
  if (n < 1) throw SizeError("SKDisorder needs n >= 1");
  if (upper.size() != pair_count()) {
    throw ShapeError("SKDisorder: expected " + std::to_string(pair_count()) + " couplings, got " +
                     std::to_string(upper.size()));
  }
  couplings_ = Eigen::MatrixXd::Zero(n, n);
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++k) {
      if (!std::isfinite(upper[k])) throw DomainError("SKDisorder: non-finite coupling");
      couplings_(i, j) = couplings_(j, i) = upper[k];
    }
  }
}

SKDisorder SKDisorder::gaussian(int n, const SeedStream& streams) {
  if (n < 1) throw SizeError("SKDisorder needs n >= 1");
  std::vector<double> upper(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (std::size_t k = 0; k < upper.size(); ++k) {
    CounterRng rng = streams.stream(k);
    upper[k] = rng.normal();
  }
  return SKDisorder(n, upper);
}

Eigen::VectorXd SKDisorder::upper() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(pair_count()));
  Eigen::Index k = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) out[k++] = couplings_(i, j);
  return out;
}

SKDisorder SKDisorder::scaled(double factor) const {
  SKDisorder out;
  out.n_ = n_;
  out.couplings_ = couplings_ * factor;
  return out;
}

double hamiltonian(const SKDisorder& dis, std::span<const int> sigma) {
  const int n = dis.n();
  if (static_cast<int>(sigma.size()) != n) {
    throw ShapeError("hamiltonian: spin vector has length " + std::to_string(sigma.size()) + ", expected " +
                     std::to_string(n));
  }
  double h = 0.0;
  for (int i = 0; i < n; ++i) {
    if (sigma[i] != 1 && sigma[i] != -1) throw DomainError("hamiltonian: spins must be +1 or -1");
    for (int j = i + 1; j < n; ++j) h += dis.g(i, j) * sigma[i] * sigma[j];
  }
  return h / std::sqrt(static_cast<double>(n));
}

SKResult free_energy(const SKDisorder& dis, double beta) {
  const int n = dis.n();
  if (n < 2 || n > kSkMaxSpins) {
    throw SizeError("free_energy enumerates 2 <= n <= 20 spins (got " + std::to_string(n) + ")");
  }
  const Eigen::MatrixXd& G = dis.couplings();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));

  Eigen::VectorXd sigma = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd field = G * sigma;
  double H = 0.5 * sigma.dot(field) * inv_sqrt_n;

  // Streaming log-sum-exp of beta*H with weighted first and second moments.
  double shift = beta * H;
  double z = 1.0, zh = H, zh2 = H * H;
  double h_max = H, h_min = H;
  std::uint64_t arg_max = 0, arg_min = 0;

  const std::uint64_t total = std::uint64_t{1} << n;
  constexpr std::uint64_t kRefresh = 4096;
  for (std::uint64_t k = 1; k < total; ++k) {
    const int b = std::countr_zero(k);
    const double s_old = sigma[b];
    H -= 2.0 * s_old * field[b] * inv_sqrt_n;
    field.noalias() -= (2.0 * s_old) * G.col(b);
    sigma[b] = -s_old;
    if (k % kRefresh == 0) {
      field.noalias() = G * sigma;
      H = 0.5 * sigma.dot(field) * inv_sqrt_n;
    }
    const double v = beta * H;
    if (v > shift) {
      const double r = std::exp(shift - v);
      z = z * r + 1.0;
      zh = zh * r + H;
      zh2 = zh2 * r + H * H;
      shift = v;
    } else {
      const double w = std::exp(v - shift);
      z += w;
      zh += w * H;
      zh2 += w * H * H;
    }
    if (H > h_max) {
      h_max = H;
      arg_max = k ^ (k >> 1);
    }
    if (H < h_min) {
      h_min = H;
      arg_min = k ^ (k >> 1);
    }
  }
  auto exact = [&](std::uint64_t code) {
    std::vector<int> s(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) s[i] = (code >> i) & 1 ? -1 : 1;
    return hamiltonian(dis, s);
  };
  SKResult out;
  out.beta = beta;
  out.free_energy = shift + std::log(z);
  out.gibbs_energy = zh / z;
  out.gibbs_variance = std::max(0.0, zh2 / z - out.gibbs_energy * out.gibbs_energy);
  out.ground_state = exact(arg_max);
  out.min_energy = exact(arg_min);
  return out;
}

ScaledDisorder scale_disorder(const SKDisorder& dis, double alpha) {
  const double ratio = alpha / static_cast<double>(dis.n());
  if (!(ratio > -0.5 && ratio < 0.5)) throw DomainError("scale_disorder: alpha/n outside (-1/2, 1/2)");
  ScaledDisorder out{dis.scaled(1.0 / (1.0 - ratio))};
  out.factor = 1.0 / (1.0 - ratio);
  out.eps = out.factor - 1.0;
  out.coordinate_count = static_cast<double>(dis.pair_count());
  if (alpha != 0.0) {
    static const Density1D gaussian = standard_density(kStdGaussian);
    out.per_coordinate_affinity = scaled_affinity(gaussian, out.eps).rho;
  }
  out.tv_bound = uniform_product_tv_bound(out.per_coordinate_affinity, out.coordinate_count);
  return out;
}

JensenCheck jensen_gap_check(const SKDisorder& dis, double alpha, double beta) {
  const double n = dis.n();
  if (!(alpha / n > -0.5 && alpha / n < 0.5)) throw DomainError("jensen_gap_check: alpha/n outside (-1/2, 1/2)");
  JensenCheck out;
  out.base = free_energy(dis, beta);
  out.scaled = free_energy(dis.scaled(1.0 / (1.0 - alpha / n)), beta);
  out.lhs = out.scaled.free_energy - out.base.free_energy;
  out.rhs = beta * alpha * out.base.gibbs_energy / (n * (1.0 - alpha / n));
  out.holds = out.lhs >= out.rhs - 1e-10;
  return out;
}

DerivativeCheck derivative_check(const SKDisorder& dis, double beta) {
  if (!(beta > 0.0)) throw DomainError("derivative_check requires beta > 0");
  constexpr double h = 1e-4;
  constexpr double h2 = 1e-2;
  DerivativeCheck out;
  const SKResult mid = free_energy(dis, beta);
  out.gibbs_energy = mid.gibbs_energy;
  out.fd_derivative = (free_energy(dis, beta + h).free_energy - free_energy(dis, beta - h).free_energy) / (2.0 * h);
  out.agree = std::abs(out.fd_derivative - out.gibbs_energy) <= 1e-5 * std::max(1.0, std::abs(out.gibbs_energy));
  out.fd_second_derivative =
      (free_energy(dis, beta + h2).free_energy - 2.0 * mid.free_energy + free_energy(dis, beta - h2).free_energy) /
      (h2 * h2);
  return out;
}

}  // namespace anticonc
