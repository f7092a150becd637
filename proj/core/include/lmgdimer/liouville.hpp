// liouville.hpp: vectorized Lindblad generator, exact steady states, time
// evolution and observables.
//
// Vectorization stacks columns: vec(rho)[i + d*j] = rho(i, j), so that
// vec(A rho B) = (B^T (x) A) vec(rho).

#pragma once

#include <string>

#include <Eigen/SparseCore>

#include "lmgdimer/models.hpp"
#include "lmgdimer/ode.hpp"

namespace lmgdimer {

using SparseComplex = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;

/// Numbers behind the density-matrix invariants.
struct DensityChecks {
    double hermiticity{0.0};     // max |rho - rho^dagger|
    double trace_error{0.0};     // |Tr rho - 1|
    double min_eigenvalue{0.0};

    bool ok(double herm_tol = 1e-10, double trace_tol = 1e-10, double pos_tol = -1e-8) const
    {
        return hermiticity <= herm_tol && trace_error <= trace_tol && min_eigenvalue >= pos_tol;
    }
};

DensityChecks check_density(const ComplexMatrix& rho);

/// A Hermitian, unit-trace, numerically positive matrix.
class DensityMatrix {
public:
    /// Throws std::invalid_argument if `rho` fails the invariants.
    explicit DensityMatrix(ComplexMatrix rho);

    const ComplexMatrix& matrix() const { return rho_; }
    int dim() const { return static_cast<int>(rho_.rows()); }

    static DensityMatrix maximally_mixed(int dim);
    /// |psi><psi| for a normalized (or normalizable) vector.
    static DensityMatrix pure(const Eigen::VectorXcd& psi);

private:
    ComplexMatrix rho_;
};

struct Liouvillian {
    int hilbert_dim{0};
    SparseComplex matrix;  // hilbert_dim^2 square

    ComplexMatrix dense() const { return ComplexMatrix(matrix); }
};

/// Throws std::invalid_argument for an invalid spec.
Liouvillian build_liouvillian(const LindbladSpec& spec);

/// Direct evaluation of -i[H, rho] + sum r (O rho O^dagger - {O^dagger O, rho}/2).
ComplexMatrix lindblad_rhs(const LindbladSpec& spec, const ComplexMatrix& rho);

Eigen::VectorXcd vectorize(const ComplexMatrix& m);
ComplexMatrix unvectorize(const Eigen::VectorXcd& v, int dim);

enum class SteadyStatus { ok, degenerate, solver_failed };

const char* to_string(SteadyStatus s);

struct SteadyState {
    ComplexMatrix rho;            // Hermitized
    double residual{0.0};         // max |L vec(rho)|
    double sigma_min{0.0};        // smallest singular value estimate of the bordered system
    SteadyStatus status{SteadyStatus::ok};

    bool ok() const { return status == SteadyStatus::ok; }
};

/// Null vector of L with unit trace from the bordered system in which the
/// first equation is replaced by the trace condition. A (near) singular
/// bordered system means the null space is not one dimensional and is
/// reported as degenerate.
SteadyState steady_state(const Liouvillian& L, double degeneracy_tol = 1e-8);

struct Evolution {
    ComplexMatrix rho;
    ode::Status status{ode::Status::ok};
    bool ok() const { return status == ode::Status::ok; }
};

/// Integrates d vec(rho)/dt = L vec(rho). t_final = 0 returns rho0.
Evolution evolve(const Liouvillian& L, const DensityMatrix& rho0, double t_final,
                 const ode::Options& opts = {1e-10, 1e-12});

struct Observables {
    double za{0.0}, zb{0.0};
    double xa{0.0}, xb{0.0};
    double ya{0.0}, yb{0.0};
    double purity{0.0};
};

/// Magnetizations Tr[S_k rho] / S per site and Tr[rho^2].
/// Throws std::domain_error if rho is not (2S+1)^2 square.
Observables observables(const ComplexMatrix& rho, SpinLength s);

enum class Site { A, B };

/// Reduced state of one site. Throws std::domain_error on a dimension mismatch.
ComplexMatrix partial_trace(const ComplexMatrix& rho, Site keep, SpinLength s);

/// Rough memory footprint of one steady-state solve, used by sweep schedulers.
std::size_t steady_state_bytes(SpinLength s);

}  // namespace lmgdimer
