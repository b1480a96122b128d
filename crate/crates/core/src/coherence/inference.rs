use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::{Functional, SystemModel};
use crate::error::{Error, Result};
use crate::histories::{FilterHistory, HistoryProposition, TemporalGrid};
use crate::operator::{Operator, C64};

/// Three disjoint alternatives whose sum is the trivial proposition.
#[derive(Clone, Debug, PartialEq)]
pub struct InferencePartition {
    pub alpha: HistoryProposition,
    pub beta: HistoryProposition,
    pub gamma: HistoryProposition,
}

impl InferencePartition {
    pub fn new(alpha: HistoryProposition, beta: HistoryProposition, gamma: HistoryProposition) -> Result<Self> {
        alpha.join(&beta)?.join(&gamma)?;
        Ok(InferencePartition { alpha, beta, gamma })
    }

    /// Random partition of the two-time histories built from one random
    /// projective basis per time, grouped into three non-empty alternatives.
    pub fn random(rng: &mut impl Rng, grid: &TemporalGrid, dim: usize) -> Result<Self> {
        if grid.len() < 2 || dim < 2 {
            return Err(Error::Malformed("random partitions need two grid times and dim >= 2".into()));
        }
        let first = crate::random::projective_basis(rng, dim);
        let second = crate::random::projective_basis(rng, dim);
        let mut atoms = Vec::new();
        for p in &first {
            for q in &second {
                atoms.push(FilterHistory::new(grid, [(0, p.clone()), (1, q.clone())])?);
            }
        }
        atoms.shuffle(rng);
        let n = atoms.len();
        let cut1 = rng.random_range(1..n - 1);
        let cut2 = rng.random_range(cut1 + 1..n);
        let gamma = atoms.split_off(cut2);
        let beta = atoms.split_off(cut1);
        InferencePartition::new(
            HistoryProposition::new(grid, atoms)?,
            HistoryProposition::new(grid, beta)?,
            HistoryProposition::new(grid, gamma)?,
        )
    }
}

/// A partition in which `α` is predicted in `{α, β+γ}` and `γ` in `{α+β, γ}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InferenceHit {
    pub partition: usize,
    /// Both hosting sets are also consistent with `d = 0` off the diagonal.
    pub full_consistency: bool,
    pub d_alpha_alpha: f64,
    pub d_beta_beta: f64,
    pub d_gamma_gamma: f64,
    pub re_d_alpha_beta: f64,
    pub re_d_alpha_gamma: f64,
    pub re_d_beta_gamma: f64,
    /// `Re d(α, γ) ≤ −1/2 + tol`.
    pub stated_bound_holds: bool,
    /// `Re d(α, β) ≤ −1/2 + tol`, which every hit satisfies.
    pub corrected_bound_holds: bool,
    /// `|d(β+γ, β+γ) + 2 Re d(α, β+γ)|`.
    pub identity_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InferenceReport {
    pub tolerance: f64,
    pub scanned: usize,
    pub hits: Vec<InferenceHit>,
}

impl InferenceReport {
    /// Every hit satisfies `Re d(α, γ) ≤ −1/2 + tol`.
    pub fn stated_bound_holds(&self) -> bool {
        self.hits.iter().all(|h| h.stated_bound_holds)
    }

    pub fn corrected_bound_holds(&self) -> bool {
        self.hits.iter().all(|h| h.corrected_bound_holds)
    }

    pub fn identity_holds(&self, tol: f64) -> bool {
        self.hits.iter().all(|h| h.identity_residual <= tol)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("scanned {}  hits {}  tolerance {:e}\n", self.scanned, self.hits.len(), self.tolerance);
        if self.hits.is_empty() {
            out.push_str("none found\n");
        }
        for h in &self.hits {
            let _ = writeln!(
                out,
                "partition {:>4}  Re d(a,g) {:>+.6}  Re d(a,b) {:>+.6}  d(b,b) {:.6}  stated {}  corrected {}  full {}",
                h.partition,
                h.re_d_alpha_gamma,
                h.re_d_alpha_beta,
                h.d_beta_beta,
                h.stated_bound_holds,
                h.corrected_bound_holds,
                h.full_consistency
            );
        }
        out
    }
}

/// Looks for incompatible predictions across the two coarse-grainings of each partition.
pub fn inference_scan(f: &Functional, partitions: &[InferencePartition], tol: f64) -> Result<InferenceReport> {
    let dim = f.model().dim();
    let mut hits = Vec::new();
    for (k, part) in partitions.iter().enumerate() {
        let ca = f.class_operator(&part.alpha)?;
        let cb = f.class_operator(&part.beta)?;
        let cg = f.class_operator(&part.gamma)?;
        let residual = ca.add(&cb)?.add(&cg)?.max_abs_diff(&Operator::identity(dim));
        if residual > 1e-9 {
            return Err(Error::NotExhaustive { residual });
        }
        let d = |x: &Operator, y: &Operator| f.pair(x, y);
        let bg = cb.add(&cg)?;
        let ab = ca.add(&cb)?;
        let (d_aa, d_gg) = (d(&ca, &ca)?.re, d(&cg, &cg)?.re);
        let cross1 = d(&ca, &bg)?;
        let cross2 = d(&ab, &cg)?;
        let predicted = (d_aa - 1.0).abs() <= tol && (d_gg - 1.0).abs() <= tol;
        let weak = cross1.re.abs() <= tol && cross2.re.abs() <= tol;
        if !(predicted && weak) {
            continue;
        }
        let full = cross1.norm() <= tol && cross2.norm() <= tol;
        let re_ag = d(&ca, &cg)?.re;
        let re_ab = d(&ca, &cb)?.re;
        hits.push(InferenceHit {
            partition: k,
            full_consistency: full,
            d_alpha_alpha: d_aa,
            d_beta_beta: d(&cb, &cb)?.re,
            d_gamma_gamma: d_gg,
            re_d_alpha_beta: re_ab,
            re_d_alpha_gamma: re_ag,
            re_d_beta_gamma: d(&cb, &cg)?.re,
            stated_bound_holds: re_ag <= -0.5 + tol,
            corrected_bound_holds: re_ab <= -0.5 + tol,
            identity_residual: (d(&bg, &bg)?.re + 2.0 * cross1.re).abs(),
        });
    }
    Ok(InferenceReport { tolerance: tol, scanned: partitions.len(), hits })
}

/// Qutrit pre-selected on `(1,1,1)/√3` and post-selected on `(1,1,−1)/√3`,
/// with the three basis projectors at one time as `α = P₁`, `β = P₃`, `γ = P₂`.
pub fn three_box_witness() -> Result<(Functional, InferencePartition)> {
    let s = 1.0 / 3.0_f64.sqrt();
    let psi = [C64::new(s, 0.0), C64::new(s, 0.0), C64::new(s, 0.0)];
    let phi = [C64::new(s, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0)];
    let grid = TemporalGrid::new(vec![0.0])?;
    let model = SystemModel::new(Operator::pure_state(&psi)?, crate::operator::standard::zero_hamiltonian(3), grid.clone())?;
    let f = Functional::postselected(&model, &Operator::projector_onto(&phi)?, 1.0)?;
    let box_at = |k: usize| -> Result<HistoryProposition> {
        Ok(FilterHistory::new(&grid, [(0, crate::operator::standard::basis_projector(3, k))])?.into())
    };
    let part = InferencePartition::new(box_at(0)?, box_at(2)?, box_at(1)?)?;
    Ok((f, part))
}
