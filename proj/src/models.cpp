#include "qsync/models.hpp"

#include <cmath>
#include <stdexcept>

namespace qsync {

void VdpParams::validate() const {
    if (kappa1 <= 0.0 || kappa2 <= 0.0)
        throw std::invalid_argument("VdpParams: rates must be positive");
    if (cutoff < 3) throw std::invalid_argument("VdpParams: cutoff must be >= 3");
    if (!std::isfinite(omega1) || !std::isfinite(omega2) || !std::isfinite(g))
        throw std::invalid_argument("VdpParams: non-finite parameter");
}

ModelSpec build_vdp_pair(const VdpParams& p) {
    p.validate();
    const HilbertStructure structure({p.cutoff, p.cutoff});
    const Operator a1 = embed(annihilation_op(p.cutoff), 0, structure);
    const Operator a2 = embed(annihilation_op(p.cutoff), 1, structure);

    Operator h = p.omega1 * (a1.adjoint() * a1) + p.omega2 * (a2.adjoint() * a2) +
                 p.g * (a1.adjoint() * a2 + a2.adjoint() * a1);

    ModelSpec model{std::move(h),
                    {{a1.adjoint(), p.kappa1},
                     {a2.adjoint(), p.kappa1},
                     {a1 * a1, p.kappa2},
                     {a2 * a2, p.kappa2}}};
    model.validate();
    return model;
}

void CavityQubitParams::validate() const {
    if (kappa <= 0.0) throw std::invalid_argument("CavityQubitParams: kappa must be positive");
    if (cutoff < 3) throw std::invalid_argument("CavityQubitParams: cutoff must be >= 3");
    if (!std::isfinite(mu) || !std::isfinite(drive) || !std::isfinite(omega1) ||
        !std::isfinite(omega2) || !std::isfinite(g))
        throw std::invalid_argument("CavityQubitParams: non-finite parameter");
}

ModelSpec build_cavity_qubit_pair(const CavityQubitParams& p) {
    p.validate();
    const HilbertStructure structure({p.cutoff, p.cutoff, 2, 2});
    const Operator a1 = embed(annihilation_op(p.cutoff), 0, structure);
    const Operator a2 = embed(annihilation_op(p.cutoff), 1, structure);
    const Operator sz1 = embed(pauli(PauliKind::Z), kQubitSite1, structure);
    const Operator sz2 = embed(pauli(PauliKind::Z), kQubitSite2, structure);
    const Operator sx1 = embed(pauli(PauliKind::X), kQubitSite1, structure);
    const Operator sx2 = embed(pauli(PauliKind::X), kQubitSite2, structure);

    Operator h = p.omega1 * (a1.adjoint() * a1) + p.omega2 * (a2.adjoint() * a2) +
                 p.omega1 * sz1 + p.omega2 * sz2 + p.drive * (a1 + a1.adjoint()) +
                 p.g * (a1.adjoint() * a2 + a2.adjoint() * a1) +
                 p.mu * ((a1 + a1.adjoint()) * sx1) + p.mu * ((a2 + a2.adjoint()) * sx2);

    ModelSpec model{std::move(h), {{a1, p.kappa}, {a2, p.kappa}}};
    model.validate();
    return model;
}

}  // namespace qsync
