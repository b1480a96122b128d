use serde::Serialize;

use super::{wigner_symbol, KernelFamily};
use crate::error::{Error, Result};
use crate::operator::{Operator, Role, TAU_H};

/// How far the symbol of a projector is from a sharp phase-space filter.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub min: f64,
    pub max: f64,
    /// Extremes multiplied by the pairing constant.
    pub min_scaled: f64,
    pub max_scaled: f64,
    /// Weighted measure of nodes with a negative symbol over the total measure.
    pub negativity_fraction: f64,
    /// Level at which the best-fit characteristic function switches on.
    pub threshold: f64,
    /// `sqrt(c Σ w (F − χ)²)` for the best-fit characteristic function `χ`.
    pub l2_distance: f64,
    /// `max |F² − F|` over the nodes.
    pub idempotency_defect: f64,
}

/// Compares the symbol of `p` with the characteristic function of the level
/// set holding the fraction `Tr P / dim` of the total measure.
pub fn sharpness_report(k: &KernelFamily, p: &Operator) -> Result<SharpnessReport> {
    if !p.is_projector(TAU_H) {
        return Err(Error::RoleViolation { role: Role::Projector, detail: "sharpness needs a projector".into() });
    }
    let f = wigner_symbol(k, p)?;
    let space = k.space();
    let vals: Vec<f64> = f.values().iter().map(|v| v.re).collect();
    let w = space.weights();
    let total = space.total_weight();
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let negative: f64 = vals.iter().zip(w).filter(|(v, _)| **v < 0.0).map(|(_, w)| w).sum();

    let target = p.trace().re / space.dim() as f64 * total;
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    let mut acc = 0.0;
    let mut threshold = f64::INFINITY;
    for &i in &order {
        if acc >= target - 1e-12 * total {
            break;
        }
        acc += w[i];
        threshold = vals[i];
    }
    let c = k.pairing_constant();
    let l2 = vals
        .iter()
        .zip(w)
        .map(|(v, w)| {
            let chi = if *v >= threshold { 1.0 } else { 0.0 };
            w * (v - chi).powi(2)
        })
        .sum::<f64>()
        * c;
    let defect = vals.iter().map(|v| (v * v - v).abs()).fold(0.0, f64::max);
    Ok(SharpnessReport {
        min,
        max,
        min_scaled: min * c,
        max_scaled: max * c,
        negativity_fraction: negative / total,
        threshold,
        l2_distance: l2.sqrt(),
        idempotency_defect: defect,
    })
}

/// True when the symbol of `p` takes only the values 0 and 1 (within `tol`).
pub fn is_characteristic(k: &KernelFamily, p: &Operator, tol: f64) -> Result<bool> {
    let f = wigner_symbol(k, p)?;
    Ok(f.values().iter().all(|v| v.im.abs() <= tol && (v.re.abs() <= tol || (v.re - 1.0).abs() <= tol)))
}
