#include <slowbond/pde.hpp>

#include <cmath>

int main() {
  const auto rho = slowbond::solve_discrete_heat(std::vector<double>{0.8, 0.2}, 1.0, 0.0);
  return std::abs(rho[0] - 0.8) < 1e-12 ? 0 : 1;
}
