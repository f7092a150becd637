#include "lmgdimer/spin_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lmgdimer {

SpinLength SpinLength::from_twice(int twice_s)
{
    if (twice_s < 1) {
        throw std::invalid_argument("spin length must satisfy 2S >= 1, got 2S = " +
                                    std::to_string(twice_s));
    }
    return SpinLength(twice_s);
}

SpinLength SpinLength::from_value(double s)
{
    const double twice = 2.0 * s;
    const double rounded = std::round(twice);
    if (!std::isfinite(s) || std::abs(twice - rounded) > 1e-9 || rounded < 1.0) {
        throw std::invalid_argument("spin length must be a positive half-integer");
    }
    return SpinLength(static_cast<int>(rounded));
}

SpinMatrices spin_matrices(SpinLength s)
{
    const int d = s.dim();
    const double S = s.value();
    SpinMatrices out;
    out.plus = ComplexMatrix::Zero(d, d);
    out.z = ComplexMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        const double m = s.m_of_index(i);
        out.z(i, i) = m;
        if (i > 0) {
            out.plus(i - 1, i) = std::sqrt(S * (S + 1.0) - m * (m + 1.0));
        }
    }
    out.minus = out.plus.adjoint();
    out.x = 0.5 * (out.plus + out.minus);
    out.y = (out.plus - out.minus) / cplx(0.0, 2.0);
    return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b)
{
    const Eigen::Index ra = a.rows(), ca = a.cols();
    const Eigen::Index rb = b.rows(), cb = b.cols();
    ComplexMatrix out(ra * rb, ca * cb);
    for (Eigen::Index i = 0; i < ra; ++i) {
        for (Eigen::Index j = 0; j < ca; ++j) {
            out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
        }
    }
    return out;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b)
{
    return a * b - b * a;
}

namespace {

int doubled(double x, const char* name)
{
    const double t = 2.0 * x;
    const double r = std::round(t);
    if (!std::isfinite(x) || std::abs(t - r) > 1e-9) {
        throw std::domain_error(std::string("clebsch_gordan: ") + name + " is not a half-integer");
    }
    return static_cast<int>(r);
}

void check_pair(int two_j, int two_m, const char* name)
{
    if (two_j < 0) {
        throw std::domain_error(std::string("clebsch_gordan: negative ") + name);
    }
    if (std::abs(two_m) > two_j) {
        throw std::domain_error(std::string("clebsch_gordan: |m| > j for ") + name);
    }
    if ((two_j - two_m) % 2 != 0) {
        throw std::domain_error(std::string("clebsch_gordan: j - m not integer for ") + name);
    }
}

double log_factorial(int n)
{
    return std::lgamma(static_cast<double>(n) + 1.0);
}

}  // namespace

double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M)
{
    const int a = doubled(j1, "j1"), am = doubled(m1, "m1");
    const int b = doubled(j2, "j2"), bm = doubled(m2, "m2");
    const int c = doubled(J, "J"), cm = doubled(M, "M");
    check_pair(a, am, "j1");
    check_pair(b, bm, "j2");
    check_pair(c, cm, "J");

    if (cm != am + bm) return 0.0;
    if (c < std::abs(a - b) || c > a + b) return 0.0;
    if ((a + b + c) % 2 != 0) return 0.0;

    // Everything below is an integer once halved.
    const int jpj_J = (a + b - c) / 2;    // j1 + j2 - J
    const int J_j1j2 = (c + a - b) / 2;   // J + j1 - j2
    const int J_j2j1 = (c - a + b) / 2;   // J - j1 + j2
    const int sum_all = (a + b + c) / 2;  // j1 + j2 + J
    const int j1_m1 = (a - am) / 2, j1p_m1 = (a + am) / 2;
    const int j2_m2 = (b - bm) / 2, j2p_m2 = (b + bm) / 2;
    const int J_M = (c - cm) / 2, Jp_M = (c + cm) / 2;
    const int s1 = (c - b + am) / 2;      // J - j2 + m1
    const int s2 = (c - a - bm) / 2;      // J - j1 - m2

    const double log_pre =
        0.5 * (std::log(c + 1.0) + log_factorial(J_j1j2) + log_factorial(J_j2j1) +
               log_factorial(jpj_J) - log_factorial(sum_all + 1) + log_factorial(Jp_M) +
               log_factorial(J_M) + log_factorial(j1_m1) + log_factorial(j1p_m1) +
               log_factorial(j2_m2) + log_factorial(j2p_m2));

    const int k_min = std::max({0, -s1, -s2});
    const int k_max = std::min({jpj_J, j1_m1, j2p_m2});
    double sum = 0.0;
    for (int k = k_min; k <= k_max; ++k) {
        const double log_den = log_factorial(k) + log_factorial(jpj_J - k) +
                               log_factorial(j1_m1 - k) + log_factorial(j2p_m2 - k) +
                               log_factorial(s1 + k) + log_factorial(s2 + k);
        const double term = std::exp(log_pre - log_den);
        sum += (k % 2 == 0) ? term : -term;
    }
    return sum;
}

ComplexMatrix tensor_operator(SpinLength s, int l, int m)
{
    if (l < 0 || l > s.twice()) {
        throw std::domain_error("tensor_operator: l must satisfy 0 <= l <= 2S");
    }
    if (std::abs(m) > l) {
        throw std::domain_error("tensor_operator: |m| must not exceed l");
    }
    const int d = s.dim();
    const double S = s.value();
    const double norm = std::sqrt((2.0 * l + 1.0) / (2.0 * S + 1.0));
    ComplexMatrix t = ComplexMatrix::Zero(d, d);
    for (int row = 0; row < d; ++row) {
        const double m_row = s.m_of_index(row);
        // Only m'' = m' - m contributes.
        const double m_col = m_row - m;
        if (std::abs(m_col) > S + 1e-12) continue;
        const int col = static_cast<int>(std::lround(S - m_col));
        t(row, col) = norm * clebsch_gordan(S, m_col, l, m, S, m_row);
    }
    return t;
}

}  // namespace lmgdimer
