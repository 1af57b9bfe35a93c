#pragma once

#include <vector>

namespace iongate::quadrature {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the weight exp(-x^2) (Golub-Welsch).
Rule gauss_hermite(int order);

/// Expectation rule for a zero-mean normal with standard deviation `sigma`:
/// nodes beyond `cutoff` standard deviations are dropped and the remaining
/// weights renormalized to sum to one. sigma == 0 yields the single node 0.
Rule normal_rule(double sigma, int order, double cutoff = 6.0);

}  // namespace iongate::quadrature
