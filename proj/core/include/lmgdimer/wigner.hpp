// wigner.hpp: SU(2) Wigner quasiprobability of a single spin on a sphere grid.
//
// The kernel is Delta(theta, phi) = c * sum_{l,m} Y*_{lm}(theta, phi) T_{lm}
// with c = sqrt((2S+1) / (4 pi)), chosen so that the integral of W over the
// sphere is 1. Relative to the Stratonovich-Weyl kernel normalized to
// Tr Delta = 1 this kernel is larger by (2S+1) / (4 pi).

#pragma once

#include <vector>

#include <Eigen/Core>

#include "lmgdimer/spin_ops.hpp"

namespace lmgdimer {

/// Y_lm(theta, phi), physics convention with the Condon-Shortley phase.
/// Throws std::domain_error unless l >= 0 and |m| <= l.
cplx spherical_harmonic(int l, int m, double theta, double phi);

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

ComplexMatrix wigner_kernel(SpinLength s, double theta, double phi);

struct GridSpec {
    int n_theta{64};
    int n_phi{128};
};

struct WignerGrid {
    std::vector<double> thetas;         // ascending, from Gauss-Legendre nodes in cos(theta)
    std::vector<double> theta_weights;  // quadrature weights in cos(theta)
    std::vector<double> phis;           // 2 pi j / n_phi
    Eigen::MatrixXd values;             // values(i, j) = W(thetas[i], phis[j])
    double max_imaginary{0.0};          // largest discarded imaginary part

    /// Quadrature of W over the sphere.
    double integral() const;
    /// Quadrature of the product of two grids sampled on the same nodes.
    double overlap(const WignerGrid& other) const;
};

/// Throws std::domain_error if rho is not square with dimension >= 2, or is
/// not Hermitian (imaginary part of W above 1e-10).
WignerGrid wigner_function(const ComplexMatrix& rho, const GridSpec& grid = {});

/// Wigner value at one point.
double wigner_value(const ComplexMatrix& rho, double theta, double phi);

struct GridPeak {
    int i_theta{0};
    int i_phi{0};
    double theta{0.0};
    double phi{0.0};
    double value{0.0};
};

/// Local maxima of the grid with value above `threshold`. Neighbourhoods wrap
/// in phi and each row adjacent to a pole is treated as one ring; connected
/// plateaus of equal maxima count once.
std::vector<GridPeak> local_maxima(const WignerGrid& w, double threshold);

}  // namespace lmgdimer
