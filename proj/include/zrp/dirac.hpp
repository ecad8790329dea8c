#ifndef ZRP_DIRAC_HPP
#define ZRP_DIRAC_HPP

// Pauli and Dirac matrices in the standard (Dirac) representation, plus the
// projector combinations used by the contact-interaction boundary conditions.

#include <complex>
#include <Eigen/Dense>

namespace zrp {

using complex = std::complex<double>;

/// Pauli matrix sigma_i, i in {0, 1, 2} for x, y, z.
inline Eigen::Matrix2cd pauli(int i)
{
    const complex I(0.0, 1.0);
    Eigen::Matrix2cd s;
    switch (i) {
    case 0: s << 0, 1, 1, 0; break;
    case 1: s << 0, -I, I, 0; break;
    case 2: s << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli: index must be 0, 1 or 2");
    }
    return s;
}

/// v . sigma for a real 3-vector v.
inline Eigen::Matrix2cd sigma_dot(const Eigen::Vector3d& v)
{
    const complex I(0.0, 1.0);
    Eigen::Matrix2cd s;
    s << v.z(), v.x() - I * v.y(),
         v.x() + I * v.y(), -v.z();
    return s;
}

/// Dirac alpha_i = offdiag(sigma_i, sigma_i).
inline Eigen::Matrix4cd alpha(int i)
{
    Eigen::Matrix4cd a = Eigen::Matrix4cd::Zero();
    a.block<2, 2>(0, 2) = pauli(i);
    a.block<2, 2>(2, 0) = pauli(i);
    return a;
}

/// Dirac beta = diag(1, 1, -1, -1).
inline Eigen::Matrix4cd beta()
{
    Eigen::Vector4cd d;
    d << 1, 1, -1, -1;
    return d.asDiagonal();
}

/// Projectors beta^(+-) = (1 +- beta)/2 onto upper/lower bispinor components.
inline Eigen::Matrix4cd beta_pm(int sign)
{
    return 0.5 * (Eigen::Matrix4cd::Identity() + double(sign) * beta());
}

/// alpha_i^(+-) = beta^(+-) alpha_i (equivalently alpha_i beta^(-+)).
inline Eigen::Matrix4cd alpha_pm(int i, int sign)
{
    return beta_pm(sign) * alpha(i);
}

/// v . alpha for a real 3-vector v.
inline Eigen::Matrix4cd alpha_dot(const Eigen::Vector3d& v)
{
    Eigen::Matrix4cd a = Eigen::Matrix4cd::Zero();
    a.block<2, 2>(0, 2) = sigma_dot(v);
    a.block<2, 2>(2, 0) = sigma_dot(v);
    return a;
}

/// v . alpha^(+-) = beta^(+-) (v . alpha).
inline Eigen::Matrix4cd alpha_pm_dot(const Eigen::Vector3d& v, int sign)
{
    return beta_pm(sign) * alpha_dot(v);
}

} // namespace zrp

#endif
