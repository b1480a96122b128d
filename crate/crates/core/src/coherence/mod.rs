//! The coherence functional `d(α, β)` and the analyses built on it.
//!
//! With class operators `C = F(t₁)⋯F(tₙ)` (earliest factor leftmost,
//! `F(t) = e^{iHt}Pe^{−iHt}`) the functional is
//!
//! ```text
//! d(α, β) = Tr(ρ C_α C_β†)
//! ```
//!
//! which makes `d(α, α)` the probability of passing the filters of `α` in
//! temporal order and `d(A_{t₁}, A_{t₂}) = Tr(ρ A(t₁) A(t₂))`.

mod axioms;
mod correlation;
mod inference;
mod report;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::histories::{class_operator, disjoint, meet, Alternative, FilterHistory, Meet, TemporalGrid};
use crate::operator::ObservableSpec;
use crate::operator::{heisenberg_filter, trace_of_product, Operator, Role, C64};

pub use axioms::{axiom_suite, axiom_suite_for, AxiomOutcome, AxiomReport};
pub use correlation::{quantum_correlation, statistical_correlation, CorrelationTensor};
pub use inference::{inference_scan, three_box_witness, InferenceHit, InferencePartition, InferenceReport};
pub use report::{complex_json, ConsistencyReport};

/// Smallest denominator accepted by conditioning and post-selection.
pub const TOL_DIV: f64 = 1e-12;

/// Initial state, Hamiltonian and temporal grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemModel {
    rho: Operator,
    hamiltonian: Operator,
    grid: TemporalGrid,
}

impl SystemModel {
    pub fn new(rho: Operator, hamiltonian: Operator, grid: TemporalGrid) -> Result<Self> {
        let rho = if rho.role() == Role::Density { rho } else { rho.retag(Role::Density)? };
        let hamiltonian = if hamiltonian.role().is_hermitian() { hamiltonian } else { hamiltonian.retag(Role::Hermitian)? };
        if rho.dim() != hamiltonian.dim() {
            return Err(Error::DimensionMismatch { expected: rho.dim(), actual: hamiltonian.dim() });
        }
        Ok(SystemModel { rho, hamiltonian, grid })
    }

    /// Skips validation of `rho`. Only for negative controls.
    pub fn from_parts_unchecked(rho: DMatrix<C64>, hamiltonian: Operator, grid: TemporalGrid) -> Self {
        SystemModel { rho: Operator::trusted(rho, Role::Generic), hamiltonian, grid }
    }

    pub fn rho(&self) -> &Operator {
        &self.rho
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn grid(&self) -> &TemporalGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn functional(&self) -> Functional {
        Functional { model: self.clone(), post: None }
    }

    /// Class operator of any alternative under this model's dynamics.
    pub fn class_operator(&self, a: &impl Alternative) -> Result<Operator> {
        self.check_alternative(a)?;
        a.class_operator(&self.hamiltonian)
    }

    fn check_alternative(&self, a: &impl Alternative) -> Result<()> {
        if a.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

/// `d(α, β)` together with both intensities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoherenceValue {
    #[serde(with = "complex_json")]
    pub value: C64,
    pub intensity_a: f64,
    pub intensity_b: f64,
}

impl CoherenceValue {
    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }

    /// Relative phase `arg d(α, β)`.
    pub fn phase(&self) -> f64 {
        self.value.arg()
    }
}

#[derive(Clone, Debug, PartialEq)]
struct PostSelection {
    rho_f: DMatrix<C64>,
    overlap: f64,
    t_final: f64,
}

/// A coherence functional, possibly post-selected on a final filter.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional {
    model: SystemModel,
    post: Option<PostSelection>,
}

impl Functional {
    /// `d(α, β) = Tr(ρ C_α ρ_f C_β†) / Tr(ρ ρ_f)` with
    /// `ρ_f = e^{iHt_f} P e^{−iHt_f} / Tr P`.
    pub fn postselected(model: &SystemModel, p: &Operator, t_final: f64) -> Result<Self> {
        let p = if p.role() == Role::Projector || p.role() == Role::Effect {
            p.clone()
        } else {
            p.clone().retag(Role::Effect)?
        };
        if p.dim() != model.dim() {
            return Err(Error::DimensionMismatch { expected: model.dim(), actual: p.dim() });
        }
        let tr = p.trace().re;
        if tr.abs() <= TOL_DIV {
            return Err(Error::VanishingDenominator { value: tr, guard: TOL_DIV });
        }
        let rotated = heisenberg_filter(&p, &model.hamiltonian, t_final)?;
        let rho_f = rotated.matrix() / C64::new(tr, 0.0);
        let overlap = trace_of_product(model.rho.matrix(), &rho_f).re;
        if overlap.abs() <= TOL_DIV {
            return Err(Error::VanishingDenominator { value: overlap, guard: TOL_DIV });
        }
        Ok(Functional { model: model.clone(), post: Some(PostSelection { rho_f, overlap, t_final }) })
    }

    pub fn model(&self) -> &SystemModel {
        &self.model
    }

    pub fn is_postselected(&self) -> bool {
        self.post.is_some()
    }

    /// Evaluates the functional on two class operators.
    pub fn pair(&self, ca: &Operator, cb: &Operator) -> Result<C64> {
        let dim = self.model.dim();
        for c in [ca, cb] {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: c.dim() });
            }
        }
        let rho = self.model.rho.matrix();
        Ok(match &self.post {
            None => trace_of_product(&(rho * ca.matrix()), &cb.matrix().adjoint()),
            Some(post) => {
                let left = rho * ca.matrix() * &post.rho_f;
                trace_of_product(&left, &cb.matrix().adjoint()) / post.overlap
            }
        })
    }

    /// Class operator of `a`, checking that `a` fits this functional.
    pub fn class_operator(&self, a: &impl Alternative) -> Result<Operator> {
        self.model.check_alternative(a)?;
        if let (Some(post), Some(t)) = (&self.post, a.latest_time()) {
            if t > post.t_final + 1e-12 * post.t_final.abs().max(1.0) {
                return Err(Error::PostSelectionNotFinal { t_final: post.t_final, t_history: t });
            }
        }
        a.class_operator(&self.model.hamiltonian)
    }

    pub fn evaluate(&self, a: &impl Alternative, b: &impl Alternative) -> Result<C64> {
        self.pair(&self.class_operator(a)?, &self.class_operator(b)?)
    }

    pub fn intensity(&self, a: &impl Alternative) -> Result<f64> {
        let c = self.class_operator(a)?;
        Ok(self.pair(&c, &c)?.re)
    }

    pub fn value(&self, a: &impl Alternative, b: &impl Alternative) -> Result<CoherenceValue> {
        let (ca, cb) = (self.class_operator(a)?, self.class_operator(b)?);
        Ok(CoherenceValue {
            value: self.pair(&ca, &cb)?,
            intensity_a: self.pair(&ca, &ca)?.re,
            intensity_b: self.pair(&cb, &cb)?.re,
        })
    }

    /// The d-matrix of a partition and its consistency verdict. The partition
    /// must be exclusive and its class operators must sum to the identity.
    pub fn consistency<A: Alternative>(&self, partition: &[A], mode: ConsistencyMode, tol: f64) -> Result<ConsistencyReport> {
        let ops = partition.iter().map(|a| self.class_operator(a)).collect::<Result<Vec<_>>>()?;
        let dim = self.model.dim();
        let mut sum = Operator::zeros(dim);
        for c in &ops {
            sum = sum.add(c)?;
        }
        let residual = sum.max_abs_diff(&Operator::identity(dim));
        if residual > 1e-9 {
            return Err(Error::NotExhaustive { residual });
        }
        let n = ops.len();
        let mut matrix = vec![vec![C64::new(0.0, 0.0); n]; n];
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let v = self.pair(&ops[i], &ops[j])?;
                matrix[i][j] = v;
                if i != j {
                    worst = worst.max(match mode {
                        ConsistencyMode::Weak => v.re.abs(),
                        ConsistencyMode::Full => v.norm(),
                    });
                }
            }
        }
        Ok(ConsistencyReport { mode, tolerance: tol, consistent: worst <= tol, worst_off_diagonal: worst, matrix })
    }
}

/// Which off-diagonal part must vanish.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConsistencyMode {
    /// `Re d(α, β) = 0`.
    Weak,
    /// `d(α, β) = 0`.
    Full,
}

pub fn coherence(model: &SystemModel, a: &FilterHistory, b: &FilterHistory) -> Result<CoherenceValue> {
    model.functional().value(a, b)
}

/// `2 Re d(a, b)` for disjoint histories.
pub fn interference(model: &SystemModel, a: &FilterHistory, b: &FilterHistory) -> Result<f64> {
    if !disjoint(a, b)? {
        return Err(Error::NotDisjoint);
    }
    Ok(2.0 * model.functional().evaluate(a, b)?.re)
}

/// `Σᵢ d(αᵢ, αᵢ) − d(β, β)` with `αᵢ = {t₁: Pᵢ, t₂: Q}` and `β = {t₂: Q}`.
pub fn additivity_gap(model: &SystemModel, partition: &ObservableSpec, t1: f64, q: &Operator, t2: f64) -> Result<f64> {
    if partition.filters().len() != 2 {
        return Err(Error::PartitionSize { expected: 2, actual: partition.filters().len() });
    }
    let f = model.functional();
    let grid = model.grid();
    let mut total = 0.0;
    for p in partition.filters() {
        let alpha = FilterHistory::at_times(grid, [(t1, p.clone()), (t2, q.clone())])?;
        total += f.intensity(&alpha)?;
    }
    let beta = FilterHistory::at_times(grid, [(t2, q.clone())])?;
    Ok(total - f.intensity(&beta)?)
}

pub fn is_consistent(
    model: &SystemModel,
    partition: &[FilterHistory],
    mode: ConsistencyMode,
    tol: f64,
) -> Result<ConsistencyReport> {
    for (i, a) in partition.iter().enumerate() {
        for b in &partition[i + 1..] {
            if !disjoint(a, b)? {
                return Err(Error::NotDisjoint);
            }
        }
    }
    model.functional().consistency(partition, mode, tol)
}

fn meet_operator(model: &SystemModel, e: &FilterHistory, a: &FilterHistory) -> Result<Operator> {
    match meet(e, a)? {
        Meet::History(h) => class_operator(&h, model.hamiltonian()),
        Meet::Opaque => Ok(Operator::zeros(model.dim())),
        Meet::Undefined => Err(Error::IncompatibleEvidence),
    }
}

/// `d(e∘a, e∘b) / d(e, e)`.
pub fn condition(model: &SystemModel, evidence: &FilterHistory, a: &FilterHistory, b: &FilterHistory) -> Result<CoherenceValue> {
    let f = model.functional();
    let norm = f.intensity(evidence)?;
    if norm <= TOL_DIV {
        return Err(Error::VanishingDenominator { value: norm, guard: TOL_DIV });
    }
    f.class_operator(a)?;
    f.class_operator(b)?;
    let ca = meet_operator(model, evidence, a)?;
    let cb = meet_operator(model, evidence, b)?;
    Ok(CoherenceValue {
        value: f.pair(&ca, &cb)? / norm,
        intensity_a: f.pair(&ca, &ca)?.re / norm,
        intensity_b: f.pair(&cb, &cb)?.re / norm,
    })
}

/// Model with `ρ → P̃ρP̃ / Tr(ρP̃)`, `P̃ = e^{iHt₀}Pe^{−iHt₀}`.
pub fn preselect(model: &SystemModel, p: &Operator, t0: f64) -> Result<SystemModel> {
    let pt = heisenberg_filter(p, model.hamiltonian(), t0)?;
    let m = pt.matrix() * model.rho().matrix() * pt.matrix();
    let tr = m.trace().re;
    if tr <= TOL_DIV {
        return Err(Error::VanishingDenominator { value: tr, guard: TOL_DIV });
    }
    let m = m / C64::new(tr, 0.0);
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    SystemModel::new(Operator::with_role(m, Role::Density)?, model.hamiltonian().clone(), model.grid().clone())
}

pub fn postselect(model: &SystemModel, p: &Operator, t_final: f64, a: &FilterHistory, b: &FilterHistory) -> Result<CoherenceValue> {
    Functional::postselected(model, p, t_final)?.value(a, b)
}
