#pragma once

namespace mtsim::theory {

/// Global-null detection boundary rho(beta) on the sparse range (1/2, 1):
/// beta - 1/2 up to beta = 3/4, (1 - sqrt(1 - beta))^2 above.
double detection_boundary(double beta);

/// Multiple-testing boundary on the r axis: risk -> 1 for r < beta and
/// -> 0 for r > beta. Defined for beta in (0, 1).
double multiple_testing_boundary(double beta);

}  // namespace mtsim::theory
