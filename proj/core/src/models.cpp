#include "lmgdimer/models.hpp"

#include <cmath>
#include <stdexcept>

namespace lmgdimer {

void validate(const ModelParams& params)
{
    if (!std::isfinite(params.g) || !std::isfinite(params.J) ||
        !std::isfinite(params.lambda) || !std::isfinite(params.gamma)) {
        throw std::invalid_argument("model parameters must be finite");
    }
    if (params.g < 0.0) throw std::invalid_argument("field strength g must be non-negative");
    if (params.gamma < 0.0) throw std::invalid_argument("gamma must be non-negative");
}

void validate(const LindbladSpec& spec)
{
    const auto& h = spec.hamiltonian;
    if (h.rows() != h.cols() || h.rows() < 1) {
        throw std::invalid_argument("Hamiltonian must be a non-empty square matrix");
    }
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("Hamiltonian is not Hermitian");
    }
    for (const auto& jump : spec.jumps) {
        if (jump.op.rows() != h.rows() || jump.op.cols() != h.cols()) {
            throw std::invalid_argument("jump operator dimension does not match the Hamiltonian");
        }
        if (!(jump.rate >= 0.0) || !std::isfinite(jump.rate)) {
            throw std::invalid_argument("jump rates must be finite and non-negative");
        }
    }
}

ComplexMatrix on_site_a(const ComplexMatrix& op)
{
    return kron(op, ComplexMatrix::Identity(op.rows(), op.cols()));
}

ComplexMatrix on_site_b(const ComplexMatrix& op)
{
    return kron(ComplexMatrix::Identity(op.rows(), op.cols()), op);
}

namespace {

void require_rate(double gamma)
{
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("gamma must be finite and non-negative");
    }
}

ComplexMatrix pt_hamiltonian(const SpinMatrices& sm, double lambda, double S)
{
    return lambda * (kron(sm.plus, sm.minus) + kron(sm.minus, sm.plus)) / (2.0 * S);
}

ComplexMatrix lmg_hamiltonian(const SpinMatrices& sm, double J, double g, double S)
{
    return -J * (sm.x * sm.x) / S - g * sm.z;
}

std::vector<JumpTerm> gain_loss_jumps(const SpinMatrices& sm, double gamma, double S)
{
    return {JumpTerm{on_site_a(sm.minus), gamma / S}, JumpTerm{on_site_b(sm.plus), gamma / S}};
}

}  // namespace

LindbladSpec build_pt_model(double lambda, double gamma, SpinLength s)
{
    require_rate(gamma);
    const auto sm = spin_matrices(s);
    const double S = s.value();
    return LindbladSpec{pt_hamiltonian(sm, lambda, S), gain_loss_jumps(sm, gamma, S)};
}

LindbladSpec build_lmg_model(double J, double g, double gamma, SpinLength s)
{
    require_rate(gamma);
    const auto sm = spin_matrices(s);
    const double S = s.value();
    return LindbladSpec{lmg_hamiltonian(sm, J, g, S), {JumpTerm{sm.minus, gamma / S}}};
}

LindbladSpec build_dimer_model(const ModelParams& params)
{
    validate(params);
    const auto sm = spin_matrices(params.spin);
    const double S = params.spin.value();
    const ComplexMatrix h_site = lmg_hamiltonian(sm, params.J, params.g, S);
    ComplexMatrix h = on_site_a(h_site) + on_site_b(h_site) + pt_hamiltonian(sm, params.lambda, S);
    return LindbladSpec{std::move(h), gain_loss_jumps(sm, params.gamma, S)};
}

}  // namespace lmgdimer
