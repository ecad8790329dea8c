#include "zrp/kinematics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace zrp {

Kinematics kinematics_from_energy(double energy)
{
    if (!(energy > -1.0 && energy < 1.0))
        throw std::domain_error("kinematics_from_energy: energy " +
                                std::to_string(energy) +
                                " outside the bound-state window (-1, 1)");
    Kinematics kin;
    kin.energy = energy;
    kin.k = std::sqrt((1.0 - energy) * (1.0 + energy));
    kin.eps = std::sqrt((1.0 - energy) / (1.0 + energy));
    return kin;
}

double energy_from_epsilon(double eps)
{
    if (!(eps > 0.0))
        throw std::domain_error("energy_from_epsilon: eps must be positive");
    return (1.0 - eps) * (1.0 + eps) / (1.0 + eps * eps);
}

double epsilon_from_k(double k, bool negative_energy_branch)
{
    if (!(k > 0.0 && k <= 1.0))
        throw std::domain_error("epsilon_from_k: k must lie in (0, 1]");
    const double root = std::sqrt((1.0 - k) * (1.0 + k));
    return negative_energy_branch ? (1.0 + root) / k : k / (1.0 + root);
}

double f_kernel(double z)
{
    if (!(z > 0.0))
        throw std::domain_error("f_kernel: argument must be positive");
    return std::exp(-z) / z;
}

double g_kernel(double z)
{
    if (!(z > 0.0))
        throw std::domain_error("g_kernel: argument must be positive");
    return std::exp(-z) * (1.0 + 1.0 / z) / z;
}

} // namespace zrp
