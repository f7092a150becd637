#include "lmgdimer/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>

namespace lmgdimer {

DensityChecks check_density(const ComplexMatrix& rho)
{
    if (rho.rows() != rho.cols() || rho.rows() < 1) {
        throw std::invalid_argument("density matrix must be square and non-empty");
    }
    DensityChecks c;
    c.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    c.trace_error = std::abs(rho.trace() - cplx(1.0, 0.0));
    const ComplexMatrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
    c.min_eigenvalue = es.eigenvalues().minCoeff();
    return c;
}

DensityMatrix::DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho))
{
    const auto c = check_density(rho_);
    if (!c.ok()) {
        throw std::invalid_argument("not a density matrix: hermiticity " + std::to_string(c.hermiticity) +
                                    ", trace error " + std::to_string(c.trace_error) +
                                    ", min eigenvalue " + std::to_string(c.min_eigenvalue));
    }
}

DensityMatrix DensityMatrix::maximally_mixed(int dim)
{
    if (dim < 1) throw std::invalid_argument("dimension must be positive");
    return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi)
{
    const double n = psi.norm();
    if (!(n > 0.0)) throw std::invalid_argument("state vector must be non-zero");
    const Eigen::VectorXcd u = psi / n;
    return DensityMatrix(u * u.adjoint());
}

namespace {

SparseComplex to_sparse(const ComplexMatrix& m)
{
    return m.sparseView(cplx(0.0), 0.0);
}

}  // namespace

Liouvillian build_liouvillian(const LindbladSpec& spec)
{
    validate(spec);
    const int d = spec.dim();
    SparseComplex id(d, d);
    id.setIdentity();
    const SparseComplex h = to_sparse(spec.hamiltonian);
    const SparseComplex ht = to_sparse(spec.hamiltonian.transpose());

    const cplx mi(0.0, -1.0);
    SparseComplex L = mi * (SparseComplex(Eigen::kroneckerProduct(id, h)) -
                            SparseComplex(Eigen::kroneckerProduct(ht, id)));
    for (const auto& jump : spec.jumps) {
        if (jump.rate == 0.0) continue;
        const ComplexMatrix odo = jump.op.adjoint() * jump.op;
        const SparseComplex sandwich = Eigen::kroneckerProduct(to_sparse(jump.op.conjugate()),
                                                               to_sparse(jump.op));
        const SparseComplex left = Eigen::kroneckerProduct(id, to_sparse(odo));
        const SparseComplex right = Eigen::kroneckerProduct(to_sparse(odo.transpose()), id);
        L += jump.rate * (sandwich - 0.5 * left - 0.5 * right);
    }
    L.prune(cplx(0.0), 0.0);
    L.makeCompressed();
    return Liouvillian{d, std::move(L)};
}

ComplexMatrix lindblad_rhs(const LindbladSpec& spec, const ComplexMatrix& rho)
{
    const auto& h = spec.hamiltonian;
    ComplexMatrix out = cplx(0.0, -1.0) * (h * rho - rho * h);
    for (const auto& jump : spec.jumps) {
        const ComplexMatrix odo = jump.op.adjoint() * jump.op;
        out += jump.rate * (jump.op * rho * jump.op.adjoint() - 0.5 * (odo * rho + rho * odo));
    }
    return out;
}

Eigen::VectorXcd vectorize(const ComplexMatrix& m)
{
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

ComplexMatrix unvectorize(const Eigen::VectorXcd& v, int dim)
{
    if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
        throw std::domain_error("unvectorize: length is not dim^2");
    }
    return Eigen::Map<const ComplexMatrix>(v.data(), dim, dim);
}

const char* to_string(SteadyStatus s)
{
    switch (s) {
    case SteadyStatus::ok: return "ok";
    case SteadyStatus::degenerate: return "degenerate";
    case SteadyStatus::solver_failed: return "solver_failed";
    }
    return "unknown";
}

SteadyState steady_state(const Liouvillian& L, double degeneracy_tol)
{
    const int d = L.hilbert_dim;
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    if (L.matrix.rows() != n || L.matrix.cols() != n) {
        throw std::domain_error("steady_state: Liouvillian has inconsistent dimensions");
    }

    std::vector<Eigen::Triplet<cplx>> triplets;
    triplets.reserve(static_cast<std::size_t>(L.matrix.nonZeros()) + static_cast<std::size_t>(d));
    for (Eigen::Index col = 0; col < L.matrix.outerSize(); ++col) {
        for (SparseComplex::InnerIterator it(L.matrix, col); it; ++it) {
            if (it.row() != 0) triplets.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (int i = 0; i < d; ++i) triplets.emplace_back(0, i + static_cast<Eigen::Index>(d) * i, 1.0);
    SparseComplex bordered(n, n);
    bordered.setFromTriplets(triplets.begin(), triplets.end());

    SteadyState out;
    Eigen::SparseLU<SparseComplex, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(bordered);
    lu.factorize(bordered);
    if (lu.info() != Eigen::Success) {
        out.status = SteadyStatus::degenerate;
        out.rho = ComplexMatrix::Zero(d, d);
        out.residual = std::numeric_limits<double>::infinity();
        return out;
    }

    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    rhs[0] = 1.0;
    const Eigen::VectorXcd x = lu.solve(rhs);
    if (!x.allFinite()) {
        out.status = SteadyStatus::solver_failed;
        out.rho = ComplexMatrix::Zero(d, d);
        out.residual = std::numeric_limits<double>::infinity();
        return out;
    }

    ComplexMatrix rho = unvectorize(x, d);
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace().real();
    out.rho = rho;
    out.residual = (L.matrix * vectorize(rho)).cwiseAbs().maxCoeff();

    // Inverse iteration on B^dagger B for the smallest singular value.
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = cplx(std::cos(0.7 * i + 0.1), std::sin(1.3 * i + 0.2));
    }
    v.normalize();
    double grow = 0.0;
    for (int it = 0; it < 8; ++it) {
        const Eigen::VectorXcd w = lu.adjoint().solve(v);
        const Eigen::VectorXcd u = lu.solve(w);
        grow = u.norm();
        if (!std::isfinite(grow) || grow == 0.0) break;
        v = u / grow;
    }
    out.sigma_min = (std::isfinite(grow) && grow > 0.0) ? 1.0 / std::sqrt(grow) : 0.0;
    if (out.sigma_min < degeneracy_tol) out.status = SteadyStatus::degenerate;
    return out;
}

Evolution evolve(const Liouvillian& L, const DensityMatrix& rho0, double t_final,
                 const ode::Options& opts)
{
    if (rho0.dim() != L.hilbert_dim) throw std::domain_error("evolve: dimension mismatch");
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
        throw std::invalid_argument("evolve: t_final must be finite and non-negative");
    }
    Evolution out;
    if (t_final == 0.0) {
        out.rho = rho0.matrix();
        return out;
    }
    const SparseComplex& m = L.matrix;
    auto rhs = [&m](double, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) { dy.noalias() = m * y; };
    auto stepper = ode::make_stepper<Eigen::VectorXcd>(rhs, opts);
    stepper.reset(0.0, vectorize(rho0.matrix()));
    out.status = ode::advance(stepper, t_final);
    out.rho = unvectorize(stepper.y(), L.hilbert_dim);
    return out;
}

Observables observables(const ComplexMatrix& rho, SpinLength s)
{
    const int d = s.dim();
    if (rho.rows() != d * d || rho.cols() != d * d) {
        throw std::domain_error("observables: density matrix is not on the dimer space");
    }
    const auto sm = spin_matrices(s);
    const double S = s.value();
    const ComplexMatrix ra = partial_trace(rho, Site::A, s);
    const ComplexMatrix rb = partial_trace(rho, Site::B, s);
    auto expect = [S](const ComplexMatrix& op, const ComplexMatrix& r) {
        return (op * r).trace().real() / S;
    };
    Observables o;
    o.za = expect(sm.z, ra);
    o.zb = expect(sm.z, rb);
    o.xa = expect(sm.x, ra);
    o.xb = expect(sm.x, rb);
    o.ya = expect(sm.y, ra);
    o.yb = expect(sm.y, rb);
    o.purity = (rho * rho).trace().real();
    return o;
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, Site keep, SpinLength s)
{
    const int d = s.dim();
    if (rho.rows() != d * d || rho.cols() != d * d) {
        throw std::domain_error("partial_trace: density matrix is not on the dimer space");
    }
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            cplx sum(0.0);
            for (int k = 0; k < d; ++k) {
                // Row index is a * d + b with a on site A.
                sum += keep == Site::A ? rho(i * d + k, j * d + k) : rho(k * d + i, k * d + j);
            }
            out(i, j) = sum;
        }
    }
    return out;
}

std::size_t steady_state_bytes(SpinLength s)
{
    // Dense superoperator on the two-site space: (d^2)^2 x (d^2)^2 entries.
    const std::size_t n = static_cast<std::size_t>(s.dim()) * static_cast<std::size_t>(s.dim());
    return n * n * n * n * sizeof(cplx);
}

}  // namespace lmgdimer
