#include "zrp/centers.hpp"
#include "zrp/dirac.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace zrp {

Eigen::Matrix2cd interaction_matrix(const Center& c)
{
    return c.varkappa * Eigen::Matrix2cd::Identity() + sigma_dot(c.kappa);
}

Couplings decompose_interaction(const Eigen::Matrix2cd& K)
{
    const double scale = std::max(K.cwiseAbs().maxCoeff(), 1.0);
    if ((K - K.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("decompose_interaction: matrix is not Hermitian");
    Couplings c;
    c.varkappa = 0.5 * K.trace().real();
    for (int i = 0; i < 3; ++i)
        c.kappa[i] = 0.5 * (pauli(i) * K).trace().real();
    return c;
}

void validate_centers(const std::vector<Center>& centers)
{
    if (centers.empty())
        throw std::invalid_argument("validate_centers: need at least one center");
    for (const auto& c : centers) {
        if (!std::isfinite(c.varkappa) || !c.kappa.allFinite() || !c.position.allFinite())
            throw std::invalid_argument("validate_centers: non-finite center data");
    }
    for (std::size_t n = 0; n < centers.size(); ++n)
        for (std::size_t m = n + 1; m < centers.size(); ++m)
            if ((centers[n].position - centers[m].position).norm() <= 1e-9)
                throw std::invalid_argument(
                    "validate_centers: centers " + std::to_string(n) + " and " +
                    std::to_string(m) + " coincide");
}

} // namespace zrp
