#include "neckflex/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "neckflex/errors.hpp"

namespace neckflex {

namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration on P_n, symmetric nodes filled in pairs.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
  return it->second;
}

double gauss_panel(const std::function<double(double)>& f, double a, double b, int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0;
  for (int i = 0; i < order; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

double integrate_smooth(const std::function<double(double)>& f, double a, double b,
                        double rel_tol) {
  constexpr int kOrder = 20;
  double prev = gauss_panel(f, a, b, kOrder);
  for (int panels = 2; panels <= (1 << 15); panels *= 2) {
    double sum = 0;
    const double h = (b - a) / panels;
    for (int i = 0; i < panels; ++i) sum += gauss_panel(f, a + i * h, a + (i + 1) * h, kOrder);
    if (std::abs(sum - prev) <= rel_tol * std::max(std::abs(sum), 1e-300)) return sum;
    prev = sum;
  }
  throw NumericError("composite quadrature did not converge");
}

}  // namespace neckflex
