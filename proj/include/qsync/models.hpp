#pragma once

#include "qsync/lindblad.hpp"

namespace qsync {

// Two coupled Van der Pol resonators. Frequencies and rates are usually
// quoted in units of kappa1.
struct VdpParams {
    double omega1 = 1.0;
    double omega2 = 1.0;
    double g = 0.0;       // coherent hopping
    double kappa1 = 1.0;  // one-phonon gain channel (a^dag)
    double kappa2 = 1.0;  // two-phonon loss channel (a^2)
    int cutoff = 6;       // Fock dimension per mode

    double detuning() const { return omega2 - omega1; }
    void validate() const;
};

// H = w1 n1 + w2 n2 + g(a1^dag a2 + a2^dag a1), per-mode gain (a_i^dag, k1)
// and two-phonon loss (a_i^2, k2).
ModelSpec build_vdp_pair(const VdpParams& p);

// Two driven/coupled cavities, each hosting a qubit. Site order is
// (cavity1, cavity2, qubit1, qubit2); qubit energy enters as omega_i
// sigma_z (no 1/2), so the level splitting is 2*omega_i.
struct CavityQubitParams {
    double omega1 = 10.0;
    double omega2 = 10.0;
    double g = 0.0;      // inter-cavity photon hopping
    double mu = 1.0;     // qubit-field coupling
    double drive = 0.0;  // static drive amplitude on cavity 1
    double kappa = 0.05; // decay of both cavities; qubits are not damped
    int cutoff = 5;      // Fock dimension per cavity

    double detuning() const { return omega2 - omega1; }
    void validate() const;
};

ModelSpec build_cavity_qubit_pair(const CavityQubitParams& p);

// Site indices of the qubit pair in the cavity-qubit layout.
inline constexpr int kQubitSite1 = 2;
inline constexpr int kQubitSite2 = 3;

}  // namespace qsync
