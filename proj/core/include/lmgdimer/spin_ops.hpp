// spin_ops.hpp: collective spin operators, Kronecker products and the
// multipole (irreducible tensor) operator basis.
//
// Every matrix is written in the Sz eigenbasis ordered m = S, S-1, ..., -S,
// so row 0 is the fully polarized "up" state.

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace lmgdimer {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Spin length S, stored as the integer 2S so half-integers stay exact.
class SpinLength {
public:
    /// Throws std::invalid_argument unless twice_s >= 1.
    static SpinLength from_twice(int twice_s);
    /// Accepts 0.5, 1, 1.5, ...; throws std::invalid_argument otherwise.
    static SpinLength from_value(double s);

    int twice() const { return twice_s_; }
    double value() const { return 0.5 * twice_s_; }
    int dim() const { return twice_s_ + 1; }

    /// m value carried by basis index i (0 <= i < dim()).
    double m_of_index(int i) const { return value() - i; }

    friend bool operator==(SpinLength a, SpinLength b) { return a.twice_s_ == b.twice_s_; }

private:
    explicit SpinLength(int twice_s) : twice_s_(twice_s) {}
    int twice_s_;
};

struct SpinMatrices {
    ComplexMatrix plus;
    ComplexMatrix minus;
    ComplexMatrix x;
    ComplexMatrix y;
    ComplexMatrix z;
};

SpinMatrices spin_matrices(SpinLength s);

/// Kronecker product; `a` acts on the left (site A) factor.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M> in the Condon-Shortley
/// convention, evaluated with the Racah sum.
///
/// Arguments are half-integers. Returns 0 when M != m1 + m2 or J violates the
/// triangle rule. Throws std::domain_error for arguments that are not
/// half-integers, negative j, |m| > j, or j - m not an integer.
double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M);

/// Irreducible tensor operator T_{lm} with
///   (T_{lm})_{m', m''} = sqrt((2l+1)/(2S+1)) <S m''; l m | S m'>.
/// The family {T_{lm}} is orthonormal under Tr[A^dagger B].
/// Throws std::domain_error unless 0 <= l <= 2S and |m| <= l.
ComplexMatrix tensor_operator(SpinLength s, int l, int m);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace lmgdimer
