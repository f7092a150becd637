#include "lmgdimer/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lmgdimer {

namespace {

// Normalized associated Legendre values p[l] = N_lm P_l^m(cos theta) for
// l = m..l_max, Condon-Shortley phase included; m >= 0.
void normalized_legendre(int l_max, int m, double theta, std::vector<double>& p)
{
    const double x = std::cos(theta);
    const double s = std::sin(theta);
    p.assign(static_cast<std::size_t>(l_max + 1), 0.0);
    if (m > l_max) return;
    double pmm = std::sqrt(1.0 / (4.0 * std::numbers::pi));
    for (int k = 1; k <= m; ++k) pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
    p[static_cast<std::size_t>(m)] = pmm;
    if (m == l_max) return;
    p[static_cast<std::size_t>(m + 1)] = x * std::sqrt(2.0 * m + 3.0) * pmm;
    for (int l = m + 2; l <= l_max; ++l) {
        const double ll = static_cast<double>(l) * l, mm = static_cast<double>(m) * m;
        const double a = std::sqrt((4.0 * ll - 1.0) / (ll - mm));
        const double lp = static_cast<double>(l - 1) * (l - 1);
        const double b = std::sqrt((lp - mm) / (4.0 * lp - 1.0));
        p[static_cast<std::size_t>(l)] =
            a * (x * p[static_cast<std::size_t>(l - 1)] - b * p[static_cast<std::size_t>(l - 2)]);
    }
}

// All Y_lm for l <= l_max, stored at index l*l + l + m.
void all_harmonics(int l_max, double theta, double phi, std::vector<cplx>& y)
{
    y.assign(static_cast<std::size_t>((l_max + 1) * (l_max + 1)), cplx(0.0));
    std::vector<double> p;
    for (int m = 0; m <= l_max; ++m) {
        normalized_legendre(l_max, m, theta, p);
        const cplx e = std::polar(1.0, m * phi);
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        for (int l = m; l <= l_max; ++l) {
            const cplx v = p[static_cast<std::size_t>(l)] * e;
            y[static_cast<std::size_t>(l * l + l + m)] = v;
            if (m > 0) y[static_cast<std::size_t>(l * l + l - m)] = sign * std::conj(v);
        }
    }
}

int spin_twice_from_dim(Eigen::Index dim)
{
    if (dim < 2) throw std::domain_error("Wigner function needs a matrix of dimension >= 2");
    return static_cast<int>(dim) - 1;
}

// c * Tr[rho T_lm] at index l*l + l + m.
std::vector<cplx> multipole_coefficients(const ComplexMatrix& rho, SpinLength s)
{
    const int l_max = s.twice();
    const double c = std::sqrt(s.dim() / (4.0 * std::numbers::pi));
    std::vector<cplx> coeff(static_cast<std::size_t>((l_max + 1) * (l_max + 1)));
    for (int l = 0; l <= l_max; ++l) {
        for (int m = -l; m <= l; ++m) {
            coeff[static_cast<std::size_t>(l * l + l + m)] =
                c * (rho * tensor_operator(s, l, m)).trace();
        }
    }
    return coeff;
}

cplx evaluate(const std::vector<cplx>& coeff, int l_max, double theta, double phi,
              std::vector<cplx>& scratch)
{
    all_harmonics(l_max, theta, phi, scratch);
    cplx w(0.0);
    for (std::size_t k = 0; k < coeff.size(); ++k) w += std::conj(scratch[k]) * coeff[k];
    return w;
}

}  // namespace

cplx spherical_harmonic(int l, int m, double theta, double phi)
{
    if (l < 0 || std::abs(m) > l) throw std::domain_error("spherical_harmonic: need l >= 0, |m| <= l");
    std::vector<double> p;
    normalized_legendre(l, std::abs(m), theta, p);
    const cplx v = p[static_cast<std::size_t>(l)] * std::polar(1.0, std::abs(m) * phi);
    if (m >= 0) return v;
    return ((m % 2 == 0) ? 1.0 : -1.0) * std::conj(v);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[static_cast<std::size_t>(i)] = -x;
        nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        weights[static_cast<std::size_t>(i)] = w;
        weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
}

ComplexMatrix wigner_kernel(SpinLength s, double theta, double phi)
{
    const int l_max = s.twice();
    const double c = std::sqrt(s.dim() / (4.0 * std::numbers::pi));
    std::vector<cplx> y;
    all_harmonics(l_max, theta, phi, y);
    ComplexMatrix k = ComplexMatrix::Zero(s.dim(), s.dim());
    for (int l = 0; l <= l_max; ++l) {
        for (int m = -l; m <= l; ++m) {
            k += std::conj(y[static_cast<std::size_t>(l * l + l + m)]) * tensor_operator(s, l, m);
        }
    }
    return c * k;
}

double WignerGrid::integral() const
{
    const double dphi = 2.0 * std::numbers::pi / static_cast<double>(phis.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        sum += theta_weights[i] * values.row(static_cast<Eigen::Index>(i)).sum();
    }
    return sum * dphi;
}

double WignerGrid::overlap(const WignerGrid& other) const
{
    if (other.values.rows() != values.rows() || other.values.cols() != values.cols()) {
        throw std::domain_error("overlap: grids differ in shape");
    }
    const double dphi = 2.0 * std::numbers::pi / static_cast<double>(phis.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        sum += theta_weights[i] * values.row(r).dot(other.values.row(r));
    }
    return sum * dphi;
}

WignerGrid wigner_function(const ComplexMatrix& rho, const GridSpec& grid)
{
    if (rho.rows() != rho.cols()) throw std::domain_error("wigner_function: matrix must be square");
    if (grid.n_theta < 1 || grid.n_phi < 1) throw std::invalid_argument("wigner_function: empty grid");
    const SpinLength s = SpinLength::from_twice(spin_twice_from_dim(rho.rows()));
    const int l_max = s.twice();
    const auto coeff = multipole_coefficients(rho, s);

    WignerGrid out;
    std::vector<double> x;
    gauss_legendre(grid.n_theta, x, out.theta_weights);
    // Ascending theta means descending cos(theta).
    std::reverse(x.begin(), x.end());
    std::reverse(out.theta_weights.begin(), out.theta_weights.end());
    for (double xi : x) out.thetas.push_back(std::acos(xi));
    for (int j = 0; j < grid.n_phi; ++j) out.phis.push_back(2.0 * std::numbers::pi * j / grid.n_phi);

    out.values.resize(grid.n_theta, grid.n_phi);
    std::vector<cplx> scratch;
    for (int i = 0; i < grid.n_theta; ++i) {
        for (int j = 0; j < grid.n_phi; ++j) {
            const cplx w = evaluate(coeff, l_max, out.thetas[static_cast<std::size_t>(i)],
                                    out.phis[static_cast<std::size_t>(j)], scratch);
            out.values(i, j) = w.real();
            out.max_imaginary = std::max(out.max_imaginary, std::abs(w.imag()));
        }
    }
    if (out.max_imaginary > 1e-10) {
        throw std::domain_error("wigner_function: density matrix is not Hermitian");
    }
    return out;
}

double wigner_value(const ComplexMatrix& rho, double theta, double phi)
{
    if (rho.rows() != rho.cols()) throw std::domain_error("wigner_value: matrix must be square");
    const SpinLength s = SpinLength::from_twice(spin_twice_from_dim(rho.rows()));
    std::vector<cplx> scratch;
    return evaluate(multipole_coefficients(rho, s), s.twice(), theta, phi, scratch).real();
}

std::vector<GridPeak> local_maxima(const WignerGrid& w, double threshold)
{
    const int nt = static_cast<int>(w.values.rows());
    const int np = static_cast<int>(w.values.cols());
    const double eps = 1e-12 * std::max(1.0, w.values.cwiseAbs().maxCoeff());

    auto for_neighbours = [&](int i, int j, auto&& fn) {
        for (int di = -1; di <= 1; ++di) {
            const int ii = i + di;
            if (ii < 0 || ii >= nt) continue;
            for (int dj = -1; dj <= 1; ++dj) {
                if (di == 0 && dj == 0) continue;
                fn(ii, (j + dj + np) % np);
            }
        }
        // Rows next to a pole close up into a ring around it.
        if (i == 0 || i == nt - 1) {
            for (int jj = 0; jj < np; ++jj) {
                if (jj != j) fn(i, jj);
            }
        }
    };

    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> candidate(nt, np);
    for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < np; ++j) {
            bool top = w.values(i, j) > threshold;
            for_neighbours(i, j, [&](int ii, int jj) {
                if (w.values(ii, jj) > w.values(i, j) + eps) top = false;
            });
            candidate(i, j) = top;
        }
    }

    // Merge touching candidates (plateaus and pole rings) into one peak.
    Eigen::MatrixXi label = Eigen::MatrixXi::Constant(nt, np, -1);
    std::vector<GridPeak> peaks;
    std::vector<std::pair<int, int>> stack;
    for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < np; ++j) {
            if (!candidate(i, j) || label(i, j) >= 0) continue;
            const int id = static_cast<int>(peaks.size());
            GridPeak best{i, j, w.thetas[static_cast<std::size_t>(i)], w.phis[static_cast<std::size_t>(j)],
                          w.values(i, j)};
            label(i, j) = id;
            stack.assign(1, {i, j});
            while (!stack.empty()) {
                const auto [ci, cj] = stack.back();
                stack.pop_back();
                if (w.values(ci, cj) > best.value) {
                    best = GridPeak{ci, cj, w.thetas[static_cast<std::size_t>(ci)],
                                    w.phis[static_cast<std::size_t>(cj)], w.values(ci, cj)};
                }
                for_neighbours(ci, cj, [&](int ii, int jj) {
                    if (candidate(ii, jj) && label(ii, jj) < 0) {
                        label(ii, jj) = id;
                        stack.emplace_back(ii, jj);
                    }
                });
            }
            peaks.push_back(best);
        }
    }
    return peaks;
}

}  // namespace lmgdimer
