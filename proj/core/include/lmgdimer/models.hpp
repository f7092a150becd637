// models.hpp: Hamiltonians and jump operators for the PT dimer, the single
// dissipative LMG spin and the coupled LMG dimer.

#pragma once

#include <vector>

#include "lmgdimer/spin_ops.hpp"

namespace lmgdimer {

/// Physical couplings. Energies are in units of the field g; the dimer
/// builders and the CLI keep g = 1.
struct ModelParams {
    double g{1.0};       // field strength
    double J{0.0};       // LMG nonlinearity
    double lambda{0.0};  // inter-spin exchange
    double gamma{0.5};   // gain / loss rate
    SpinLength spin{SpinLength::from_twice(1)};
};

/// Throws std::invalid_argument for non-finite couplings, g < 0 or gamma < 0.
/// g = 0 is accepted so the dimer builder can reproduce the bare PT model.
void validate(const ModelParams& params);

/// One dissipator term rate * D[op]. The rate is kept apart from the
/// operator so it is never folded in twice.
struct JumpTerm {
    ComplexMatrix op;
    double rate{0.0};
};

struct LindbladSpec {
    ComplexMatrix hamiltonian;
    std::vector<JumpTerm> jumps;

    int dim() const { return static_cast<int>(hamiltonian.rows()); }
};

/// Throws std::invalid_argument when H is not square/Hermitian (1e-12), a
/// jump operator has the wrong shape, or a rate is negative.
void validate(const LindbladSpec& spec);

/// H = lambda (S+_A S-_B + S-_A S+_B) / (2S); jumps S-_A and S+_B at gamma/S.
LindbladSpec build_pt_model(double lambda, double gamma, SpinLength s);

/// H = -J Sx^2 / S - g Sz; jump S- at gamma/S.
LindbladSpec build_lmg_model(double J, double g, double gamma, SpinLength s);

/// H = H_LMG (x) I + I (x) H_LMG + H_PT, both sites sharing (J, g);
/// jumps S-_A and S+_B at gamma/S.
LindbladSpec build_dimer_model(const ModelParams& params);

/// Site operators embedded in the dimer space (site A is the left factor).
ComplexMatrix on_site_a(const ComplexMatrix& op);
ComplexMatrix on_site_b(const ComplexMatrix& op);

}  // namespace lmgdimer
