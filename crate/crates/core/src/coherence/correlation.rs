use serde::Serialize;

use super::{complex_json, SystemModel};
use crate::error::{Error, Result};
use crate::histories::FilterHistory;
use crate::operator::ObservableSpec;
use crate::operator::{heisenberg_filter, trace_of_product, Operator, C64, TAU_H};

/// Closed-time-path correlator of one observable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationTensor {
    pub orders: (usize, usize),
    pub times_fwd: Vec<f64>,
    pub times_bwd: Vec<f64>,
    #[serde(with = "complex_json")]
    pub value: C64,
}

/// `Σᵢⱼ λᵢλⱼ d(αᵢⱼ, αᵢⱼ)` with `αᵢⱼ = {t₁: Pᵢ, t₂: Pⱼ}`.
pub fn statistical_correlation(model: &SystemModel, obs: &ObservableSpec, t1: f64, t2: f64) -> Result<f64> {
    let f = model.functional();
    let grid = model.grid();
    let (i1, i2) = (grid.index_of(t1)?, grid.index_of(t2)?);
    let pairs = obs.eigenvalues().iter().zip(obs.filters());
    let mut total = 0.0;
    if i1 == i2 {
        for (l, p) in pairs {
            total += l * l * f.intensity(&FilterHistory::new(grid, [(i1, p.clone())])?)?;
        }
        return Ok(total);
    }
    for (li, pi) in pairs.clone() {
        for (lj, pj) in pairs.clone() {
            let alpha = FilterHistory::new(grid, [(i1, pi.clone()), (i2, pj.clone())])?;
            total += li * lj * f.intensity(&alpha)?;
        }
    }
    Ok(total)
}

/// `Tr(ρ Ã(t₁)⋯Ã(t_r) Ã(t′_s)⋯Ã(t′₁))` with `Ã(t) = e^{iHt}Ae^{−iHt}`, i.e.
/// `d` evaluated on the operator strings `A_{t₁}⋯A_{t_r}` and `A_{t′₁}⋯A_{t′_s}`.
/// Times need not lie on the model grid.
pub fn quantum_correlation(model: &SystemModel, a: &Operator, times_fwd: &[f64], times_bwd: &[f64]) -> Result<CorrelationTensor> {
    if !a.is_hermitian(TAU_H) {
        return Err(Error::InvalidObservable("correlation observable must be hermitian".into()));
    }
    if a.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), actual: a.dim() });
    }
    let string = |times: &[f64]| -> Result<Operator> {
        let mut acc = Operator::identity(model.dim());
        for &t in times {
            acc = acc.mul(&heisenberg_filter(a, model.hamiltonian(), t)?)?;
        }
        Ok(acc)
    };
    let fwd = string(times_fwd)?;
    let bwd = string(times_bwd)?;
    let value = trace_of_product(&(model.rho().matrix() * fwd.matrix()), &bwd.matrix().adjoint());
    Ok(CorrelationTensor {
        orders: (times_fwd.len(), times_bwd.len()),
        times_fwd: times_fwd.to_vec(),
        times_bwd: times_bwd.to_vec(),
        value,
    })
}
