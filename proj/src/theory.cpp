#include "mtsim/theory.hpp"

#include <cmath>

#include "mtsim/errors.hpp"

namespace mtsim::theory {

double detection_boundary(double beta) {
  if (!(beta > 0.5 && beta < 1.0)) {
    throw DomainError("detection boundary is defined for beta in (1/2,1)");
  }
  if (beta <= 0.75) return beta - 0.5;
  const double root = 1.0 - std::sqrt(1.0 - beta);
  return root * root;
}

double multiple_testing_boundary(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must be in (0,1)");
  return beta;
}

}  // namespace mtsim::theory
