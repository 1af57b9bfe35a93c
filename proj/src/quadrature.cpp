#include "iongate/quadrature.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "iongate/error.hpp"

namespace iongate::quadrature {

Rule gauss_hermite(int order) {
  if (order < 1) throw DomainError("quadrature order must be >= 1");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) jacobi(k - 1, k) = jacobi(k, k - 1) = std::sqrt(k / 2.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  Rule r;
  const double mass = std::sqrt(std::numbers::pi);
  for (int k = 0; k < order; ++k) {
    const double v0 = es.eigenvectors()(0, k);
    r.nodes.push_back(es.eigenvalues()(k));
    r.weights.push_back(mass * v0 * v0);
  }
  // Symmetrize: the odd-order middle node is exactly zero.
  for (int k = 0; k < order / 2; ++k) {
    const int m = order - 1 - k;
    const double x = 0.5 * (r.nodes[m] - r.nodes[k]);
    const double w = 0.5 * (r.weights[m] + r.weights[k]);
    r.nodes[k] = -x;
    r.nodes[m] = x;
    r.weights[k] = r.weights[m] = w;
  }
  if (order % 2 == 1) r.nodes[order / 2] = 0.0;
  return r;
}

Rule normal_rule(double sigma, int order, double cutoff) {
  if (!(sigma >= 0.0)) throw DomainError("noise width must be >= 0");
  if (sigma == 0.0) return Rule{{0.0}, {1.0}};
  const Rule gh = gauss_hermite(order);
  Rule r;
  double total = 0.0;
  for (std::size_t k = 0; k < gh.nodes.size(); ++k) {
    const double z = std::numbers::sqrt2 * gh.nodes[k];
    if (std::abs(z) > cutoff) continue;
    r.nodes.push_back(sigma * z);
    r.weights.push_back(gh.weights[k] / std::sqrt(std::numbers::pi));
    total += r.weights.back();
  }
  for (double& w : r.weights) w /= total;
  return r;
}

}  // namespace iongate::quadrature
