use std::sync::Arc;

use super::{sphere, KernelFamily, PhaseSpace, PhaseSpaceFunction, SpaceKind};
use crate::error::{Error, Result};
use crate::operator::{Operator, C64};

/// Husimi (Q) and Glauber–Sudarshan (P) kernels on the sphere, built from spin
/// coherent states `|n̂⟩ = U(θ, φ)|j, j⟩`. They satisfy
/// `c Σ w Q_A P_B = Tr(AB)` and `A = c Σ w P_A |n̂⟩⟨n̂|`.
#[derive(Clone, Debug)]
pub struct CoherentKernels {
    pub q: KernelFamily,
    pub p: KernelFamily,
}

pub fn coherent_kernels(space: &PhaseSpace) -> Result<CoherentKernels> {
    let SpaceKind::Sphere { two_j, .. } = space.kind() else {
        return Err(Error::UnsupportedSpace("Q and P symbols are only available on the sphere".into()));
    };
    let shared = Arc::new(space.clone());
    let family = |coeffs: Vec<f64>| -> Result<KernelFamily> {
        Ok(KernelFamily {
            space: shared.clone(),
            deltas: sphere::rotated_kernels(space, &coeffs)?,
            pairing_constant: space.pairing_constant(),
        })
    };
    Ok(CoherentKernels { q: family(sphere::q_coefficients(two_j))?, p: family(sphere::p_coefficients(two_j))? })
}

/// Spin coherent state at node `k`.
pub fn coherent_state(space: &PhaseSpace, k: usize) -> Result<Vec<C64>> {
    let SpaceKind::Sphere { two_j, .. } = space.kind() else {
        return Err(Error::UnsupportedSpace("coherent states are only available on the sphere".into()));
    };
    let [theta, phi] = space.nodes()[k];
    let u = sphere::rotation(two_j, theta, phi)?;
    Ok(u.column(0).iter().copied().collect())
}

/// `Q_A(n̂) = ⟨n̂|A|n̂⟩`.
pub fn q_symbol(k: &CoherentKernels, a: &Operator) -> Result<PhaseSpaceFunction> {
    super::wigner_symbol(&k.q, a)
}

/// `P_A` with `A = c Σ w P_A(n̂) |n̂⟩⟨n̂|`.
pub fn p_symbol(k: &CoherentKernels, a: &Operator) -> Result<PhaseSpaceFunction> {
    super::wigner_symbol(&k.p, a)
}
