use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::function::tuple_count;
use super::{KernelFamily, PhaseSpace, PhaseSpaceFunction};
use crate::coherence::SystemModel;
use crate::error::{Error, Result};
use crate::histories::FilterHistory;
use crate::operator::{matrix_exponential, trace_of_product, Operator, C64};

/// Largest number of entries a W array may hold.
pub const W_ENTRY_CAP: u128 = 1 << 24;

/// `Δ(q, p) = (1/d) Σ_{a,b} ω^{2̄ab + pa − qb} XᵃZᵇ`, using
/// `(XᵃZᵇ)[r, s] = δ_{r, s+a} ω^{bs}`.
pub(super) fn torus_kernels(d: usize) -> Vec<DMatrix<C64>> {
    let roots: Vec<C64> = (0..d).map(|e| C64::from_polar(1.0, 2.0 * PI * e as f64 / d as f64)).collect();
    let two_inv = d.div_ceil(2);
    let mut out = Vec::with_capacity(d * d);
    for q in 0..d {
        for p in 0..d {
            let m = DMatrix::from_fn(d, d, |r, s| {
                let a = (r + d - s) % d;
                let mut acc = C64::new(0.0, 0.0);
                for b in 0..d {
                    let e = (two_inv * a * b + p * a + (d - q) * b + b * s) % d;
                    acc += roots[e];
                }
                acc / d as f64
            });
            out.push((&m + m.adjoint()) * C64::new(0.5, 0.0));
        }
    }
    out
}

/// Symbol of the product operator `A₁ ⊗ ⋯ ⊗ Aₙ`: the outer product of the
/// single-time symbols.
pub fn multitime_symbol(k: &KernelFamily, ops: &[Operator], times: &[f64]) -> Result<PhaseSpaceFunction> {
    if ops.len() != times.len() {
        return Err(Error::ShapeMismatch(format!("{} operators for {} times", ops.len(), times.len())));
    }
    tuple_count(k.node_count(), ops.len())?;
    let mut values = vec![C64::new(1.0, 0.0)];
    for a in ops {
        k.check_dim(a)?;
        let f = k.symbol_values(a.matrix());
        values = values.iter().flat_map(|x| f.iter().map(move |y| x * y)).collect();
    }
    PhaseSpaceFunction::new(k.space_arc().clone(), times.to_vec(), values)
}

/// `Tr(A (Δ(x₁) ⊗ ⋯ ⊗ Δ(xₙ)))` for an arbitrary operator on the n-fold tensor space.
pub fn multitime_symbol_dense(k: &KernelFamily, a: &Operator, times: &[f64]) -> Result<PhaseSpaceFunction> {
    let n = times.len();
    let expected = tuple_count(k.dim(), n)?;
    if a.dim() != expected {
        return Err(Error::DimensionMismatch { expected, actual: a.dim() });
    }
    let nodes = k.node_count();
    let count = tuple_count(nodes, n)?;
    if (count as u128) * (expected as u128).pow(2) > W_ENTRY_CAP * 16 {
        return Err(Error::CapExceeded { entries: (count as u128) * (expected as u128).pow(2), cap: W_ENTRY_CAP * 16 });
    }
    let values: Vec<C64> = (0..count)
        .into_par_iter()
        .map(|flat| {
            let mut idx = vec![0; n];
            let mut r = flat;
            for slot in idx.iter_mut().rev() {
                *slot = r % nodes;
                r /= nodes;
            }
            let mut kron = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
            for &i in &idx {
                kron = kron.kronecker(k.delta_matrix(i));
            }
            trace_of_product(a.matrix(), &kron)
        })
        .collect();
    PhaseSpaceFunction::new(k.space_arc().clone(), times.to_vec(), values)
}

/// Symbol of a filter history: its filters at its support times.
pub fn history_symbol(k: &KernelFamily, h: &FilterHistory) -> Result<PhaseSpaceFunction> {
    let ops: Vec<Operator> = h.filters().map(|(_, p)| p.clone()).collect();
    multitime_symbol(k, &ops, &h.support_times())
}

/// `W[x | y] = Tr(ρ Ĉ(x) Ĉ′(y)†)` with `Ĉ(x) = Δ̃(x₁, t₁) ⋯ Δ̃(xₙ, tₙ)` and
/// `Δ̃(k, t) = e^{iHt} Δ(k) e^{−iHt}`. Stored row-major with the forward
/// indices first.
#[derive(Clone, Debug)]
pub struct MultiTimeSymbol {
    space: Arc<PhaseSpace>,
    pairing_constant: f64,
    times_fwd: Vec<f64>,
    times_bwd: Vec<f64>,
    values: Vec<C64>,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    format: &'static str,
    order: &'static str,
    shape: Vec<usize>,
    entries: usize,
    times_fwd: &'a [f64],
    times_bwd: &'a [f64],
    pairing_constant: f64,
    space: &'a PhaseSpace,
}

impl MultiTimeSymbol {
    pub fn space(&self) -> &PhaseSpace {
        &self.space
    }

    pub fn times_fwd(&self) -> &[f64] {
        &self.times_fwd
    }

    pub fn times_bwd(&self) -> &[f64] {
        &self.times_bwd
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn pairing_constant(&self) -> f64 {
        self.pairing_constant
    }

    fn cols(&self) -> usize {
        self.space.node_count().pow(self.times_bwd.len() as u32)
    }

    /// Entry at forward tuple `x` and backward tuple `y` (flat indices).
    pub fn get(&self, x: usize, y: usize) -> C64 {
        self.values[x * self.cols() + y]
    }

    /// `max |W[x | y] − conj(W′[y | x])|` for `W′` built with the time lists swapped.
    pub fn hermiticity_residual(&self, swapped: &MultiTimeSymbol) -> Result<f64> {
        if self.times_fwd != swapped.times_bwd || self.times_bwd != swapped.times_fwd || self.space() != swapped.space() {
            return Err(Error::ShapeMismatch("W arrays are not transposes of each other".into()));
        }
        let (rows, cols) = (self.values.len() / self.cols(), self.cols());
        let mut worst = 0.0_f64;
        for x in 0..rows {
            for y in 0..cols {
                worst = worst.max((self.get(x, y) - swapped.get(y, x).conj()).norm());
            }
        }
        Ok(worst)
    }

    /// Interleaved little-endian `f64` pairs `(re, im)`.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.values.len() * 16);
        for v in &self.values {
            out.extend_from_slice(&v.re.to_le_bytes());
            out.extend_from_slice(&v.im.to_le_bytes());
        }
        out
    }

    /// JSON sidecar describing the binary layout.
    pub fn sidecar(&self) -> serde_json::Value {
        let n = self.space.node_count();
        serde_json::to_value(Sidecar {
            format: "f64le re,im interleaved",
            order: "row-major; forward node indices then backward node indices, earliest time slowest",
            shape: vec![n; self.times_fwd.len() + self.times_bwd.len()],
            entries: self.values.len(),
            times_fwd: &self.times_fwd,
            times_bwd: &self.times_bwd,
            pairing_constant: self.pairing_constant,
            space: &self.space,
        })
        .expect("sidecar serializes")
    }

    /// Inverse of [`MultiTimeSymbol::to_le_bytes`] for the given shape.
    pub fn from_le_bytes(k: &KernelFamily, times_fwd: &[f64], times_bwd: &[f64], bytes: &[u8]) -> Result<Self> {
        let entries = tuple_count(k.node_count(), times_fwd.len() + times_bwd.len())?;
        if bytes.len() != entries * 16 {
            return Err(Error::ShapeMismatch(format!("{} bytes for {} complex entries", bytes.len(), entries)));
        }
        let values = bytes
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
                C64::new(re, im)
            })
            .collect();
        Ok(MultiTimeSymbol {
            space: k.space_arc().clone(),
            pairing_constant: k.pairing_constant(),
            times_fwd: times_fwd.to_vec(),
            times_bwd: times_bwd.to_vec(),
            values,
        })
    }
}

impl PartialEq for MultiTimeSymbol {
    fn eq(&self, other: &Self) -> bool {
        self.space() == other.space()
            && self.times_fwd == other.times_fwd
            && self.times_bwd == other.times_bwd
            && self.values == other.values
    }
}

fn rotated_kernels(k: &KernelFamily, h: &Operator, t: f64) -> Result<Vec<DMatrix<C64>>> {
    let u = matrix_exponential(h, C64::new(0.0, -t))?.into_matrix();
    let ud = u.adjoint();
    Ok((0..k.node_count()).map(|i| &ud * k.delta_matrix(i) * &u).collect())
}

fn chain(k: &KernelFamily, h: &Operator, times: &[f64], start: DMatrix<C64>) -> Result<Vec<DMatrix<C64>>> {
    let mut acc = vec![start];
    for &t in times {
        let rotated = rotated_kernels(k, h, t)?;
        acc = acc.iter().flat_map(|m| rotated.iter().map(move |d| m * d)).collect();
    }
    Ok(acc)
}

/// Fills `W` for the given forward and backward time lists. Times must lie
/// within the span of the model grid.
pub fn build_w(model: &SystemModel, k: &KernelFamily, times_fwd: &[f64], times_bwd: &[f64]) -> Result<MultiTimeSymbol> {
    k.check_dim(model.rho())?;
    let grid = model.grid().times();
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let slack = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
    for &t in times_fwd.iter().chain(times_bwd) {
        if t < lo - slack || t > hi + slack {
            return Err(Error::TimeNotOnGrid { time: t });
        }
    }
    let nodes = k.node_count() as u128;
    let entries = nodes.checked_pow((times_fwd.len() + times_bwd.len()) as u32).unwrap_or(u128::MAX);
    if entries > W_ENTRY_CAP {
        return Err(Error::CapExceeded { entries, cap: W_ENTRY_CAP });
    }
    let h = model.hamiltonian();
    let left = chain(k, h, times_fwd, model.rho().matrix().clone())?;
    let right = chain(k, h, times_bwd, DMatrix::identity(k.dim(), k.dim()))?;
    let cols = right.len();
    let mut values = vec![C64::new(0.0, 0.0); left.len() * cols];
    values.par_chunks_mut(cols).zip(left.par_iter()).for_each(|(row, l)| {
        for (slot, r) in row.iter_mut().zip(&right) {
            *slot = l.iter().zip(r.iter()).map(|(a, b)| a * b.conj()).sum();
        }
    });
    Ok(MultiTimeSymbol {
        space: k.space_arc().clone(),
        pairing_constant: k.pairing_constant(),
        times_fwd: times_fwd.to_vec(),
        times_bwd: times_bwd.to_vec(),
        values,
    })
}

fn same_times(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs().max(1.0))
}

/// `c^{n+m} Σ_{x,y} w(x) w(y) A(x) B(y) W[x | y]`. Both functions enter
/// unconjugated; symbols of hermitian filters are real.
pub fn phase_space_coherence(w: &MultiTimeSymbol, a: &PhaseSpaceFunction, b: &PhaseSpaceFunction) -> Result<C64> {
    if a.space() != w.space() || b.space() != w.space() {
        return Err(Error::ShapeMismatch("function and W live on different spaces".into()));
    }
    if !same_times(a.times(), &w.times_fwd) || !same_times(b.times(), &w.times_bwd) {
        return Err(Error::ShapeMismatch(format!(
            "function times {:?} / {:?} do not match W times {:?} / {:?}",
            a.times(),
            b.times(),
            w.times_fwd,
            w.times_bwd
        )));
    }
    let c = w.pairing_constant;
    let u: Vec<C64> =
        (0..a.values().len()).map(|x| a.values()[x] * a.tuple_weight(x) * c.powi(a.order() as i32)).collect();
    let v: Vec<C64> =
        (0..b.values().len()).map(|y| b.values()[y] * b.tuple_weight(y) * c.powi(b.order() as i32)).collect();
    let cols = v.len();
    let total: C64 = w
        .values
        .par_chunks(cols)
        .zip(u.par_iter())
        .map(|(row, ux)| ux * row.iter().zip(&v).map(|(wy, vy)| wy * vy).sum::<C64>())
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(total)
}

/// `d(a, b)` computed entirely on phase space.
pub fn phase_space_value(model: &SystemModel, k: &KernelFamily, a: &FilterHistory, b: &FilterHistory) -> Result<C64> {
    let fa = history_symbol(k, a)?;
    let fb = history_symbol(k, b)?;
    let w = build_w(model, k, fa.times(), fb.times())?;
    phase_space_coherence(&w, &fa, &fb)
}
