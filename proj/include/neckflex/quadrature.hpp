#pragma once

#include <functional>
#include <vector>

namespace neckflex {

// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
// Computed once per order via Newton iteration on the Legendre recurrence.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

// Integral of f over [a, b] with one n-point Gauss-Legendre panel.
double gauss_panel(const std::function<double(double)>& f, double a, double b, int order);

// Composite Gauss-Legendre with panel doubling until two successive
// estimates agree to rel_tol. Intended for smooth integrands; throws
// NumericError if the doubling never settles.
double integrate_smooth(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-9);

}  // namespace neckflex
