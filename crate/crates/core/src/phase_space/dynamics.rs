use super::{wigner_symbol, KernelFamily, PhaseSpaceFunction};
use crate::coherence::SystemModel;
use crate::error::{Error, Result};
use crate::operator::{heisenberg_filter, Operator, C64, TAU_H};

/// `{{F, G}}`: the symbol of `(AB − BA)/i` for the operators `A`, `B` whose
/// symbols are `F`, `G`.
pub fn moyal_bracket(k: &KernelFamily, f: &PhaseSpaceFunction, g: &PhaseSpaceFunction) -> Result<PhaseSpaceFunction> {
    let a = k.reconstruct(f)?;
    let b = k.reconstruct(g)?;
    let comm = a.commutator(&b)?.scale(C64::new(0.0, -1.0));
    wigner_symbol(k, &comm)?.with_times(f.times().to_vec())
}

/// Symbol of `e^{iHt} A e^{−iHt}`, labelled with time `t`.
pub fn heisenberg_flow(k: &KernelFamily, model: &SystemModel, a: &Operator, t: f64) -> Result<PhaseSpaceFunction> {
    if !a.is_hermitian(TAU_H) {
        return Err(Error::InvalidObservable("flow needs a hermitian observable".into()));
    }
    let at = heisenberg_filter(a, model.hamiltonian(), t)?;
    wigner_symbol(k, &at)?.with_times(vec![t])
}

/// `max |(F(t+δt) − F(t))/δt − {{F(t), F_H}}|` over the nodes.
pub fn flow_residual(k: &KernelFamily, model: &SystemModel, a: &Operator, t: f64, dt: f64) -> Result<f64> {
    let f0 = heisenberg_flow(k, model, a, t)?;
    let f1 = heisenberg_flow(k, model, a, t + dt)?;
    let fh = wigner_symbol(k, model.hamiltonian())?.with_times(vec![t])?;
    let bracket = moyal_bracket(k, &f0, &fh)?;
    Ok(f1
        .values()
        .iter()
        .zip(f0.values())
        .zip(bracket.values())
        .map(|((x1, x0), b)| ((x1 - x0) / dt - b).norm())
        .fold(0.0, f64::max))
}
