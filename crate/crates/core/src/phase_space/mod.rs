//! Weyl-type kernels and phase-space symbols on the discrete qudit torus and
//! the spin-j sphere.
//!
//! Kernels are unit-trace hermitian operators `Δ(k)` with an explicit pairing
//! constant `c`, so that on every space
//!
//! ```text
//! F_A(k) = Tr(A Δ(k)),   c Σₖ wₖ F_A(k) F_B(k) = Tr(AB),   A = c Σₖ wₖ F_A(k) Δ(k).
//! ```

mod coherent;
mod diagnostics;
mod dynamics;
mod function;
mod sphere;
mod weyl;

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{trace_of_product, Operator, Role, C64};

pub use coherent::{coherent_kernels, coherent_state, p_symbol, q_symbol, CoherentKernels};
pub use diagnostics::{is_characteristic, sharpness_report, SharpnessReport};
pub use dynamics::{flow_residual, heisenberg_flow, moyal_bracket};
pub use function::PhaseSpaceFunction;
pub(crate) use function::fmt_float;
pub use weyl::{
    build_w, history_symbol, multitime_symbol, multitime_symbol_dense, phase_space_coherence, phase_space_value,
    MultiTimeSymbol, W_ENTRY_CAP,
};

/// Largest supported spin, as `2j`.
pub const MAX_TWO_J: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceKind {
    /// `d × d` discrete torus, `d` odd.
    QuditTorus { d: usize },
    /// Two-sphere carrying spin `j = two_j / 2`.
    Sphere { two_j: usize, n_theta: usize, n_phi: usize },
}

/// Nodes and quadrature weights of a phase space.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpace {
    kind: SpaceKind,
    nodes: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

impl PhaseSpace {
    /// Nodes `(q, p)` in row-major order, all weights 1.
    pub fn qudit_torus(d: usize) -> Result<Self> {
        if d < 3 || d.is_multiple_of(2) {
            return Err(Error::UnsupportedSpace(format!("qudit torus needs an odd dimension >= 3, got {d}")));
        }
        let nodes = (0..d).flat_map(|q| (0..d).map(move |p| [q as f64, p as f64])).collect();
        Ok(PhaseSpace { kind: SpaceKind::QuditTorus { d }, nodes, weights: vec![1.0; d * d] })
    }

    /// Sphere with the default quadrature `N_θ = 2j + 2`, `N_φ = 4j + 3`.
    pub fn sphere(two_j: usize) -> Result<Self> {
        PhaseSpace::sphere_with_quadrature(two_j, two_j + 2, 2 * two_j + 3)
    }

    /// Gauss–Legendre nodes in `cos θ` times a uniform grid in `φ`. Exact for
    /// products of two spin-j symbols when `N_θ ≥ 2j + 1` and `N_φ ≥ 4j + 1`.
    pub fn sphere_with_quadrature(two_j: usize, n_theta: usize, n_phi: usize) -> Result<Self> {
        if two_j == 0 || two_j > MAX_TWO_J {
            return Err(Error::UnsupportedSpace(format!("spin j = {} outside 1/2..=4", two_j as f64 / 2.0)));
        }
        if n_theta < two_j + 1 || n_phi < 2 * two_j + 1 {
            return Err(Error::UnsupportedSpace(format!(
                "quadrature {n_theta}x{n_phi} too coarse for j = {}",
                two_j as f64 / 2.0
            )));
        }
        let (nodes, weights) = sphere::quadrature(n_theta, n_phi)?;
        Ok(PhaseSpace { kind: SpaceKind::Sphere { two_j, n_theta, n_phi }, nodes, weights })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    /// Hilbert-space dimension carried by this phase space.
    pub fn dim(&self) -> usize {
        match self.kind {
            SpaceKind::QuditTorus { d } => d,
            SpaceKind::Sphere { two_j, .. } => two_j + 1,
        }
    }

    /// `(q, p)` on the torus, `(θ, φ)` on the sphere.
    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self.kind, SpaceKind::Sphere { .. })
    }

    pub(crate) fn coordinate_names(&self) -> [&'static str; 2] {
        match self.kind {
            SpaceKind::QuditTorus { .. } => ["q", "p"],
            SpaceKind::Sphere { .. } => ["theta", "phi"],
        }
    }

    /// Unit vector of a sphere node.
    pub fn direction(&self, k: usize) -> Option<[f64; 3]> {
        match self.kind {
            SpaceKind::Sphere { .. } => {
                let [t, p] = self.nodes[k];
                Some([t.sin() * p.cos(), t.sin() * p.sin(), t.cos()])
            }
            SpaceKind::QuditTorus { .. } => None,
        }
    }

    /// Natural constant `c` pairing symbols on this space.
    pub fn pairing_constant(&self) -> f64 {
        match self.kind {
            SpaceKind::QuditTorus { d } => 1.0 / d as f64,
            SpaceKind::Sphere { two_j, .. } => (two_j + 1) as f64 / (4.0 * PI),
        }
    }
}

/// JSON grid descriptor.
impl Serialize for PhaseSpace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Descriptor<'a> {
            #[serde(flatten)]
            kind: SpaceKind,
            dim: usize,
            coordinates: [&'static str; 2],
            pairing_constant: f64,
            node_count: usize,
            nodes: &'a [[f64; 2]],
            weights: &'a [f64],
        }
        Descriptor {
            kind: self.kind,
            dim: self.dim(),
            coordinates: self.coordinate_names(),
            pairing_constant: self.pairing_constant(),
            node_count: self.node_count(),
            nodes: &self.nodes,
            weights: &self.weights,
        }
        .serialize(s)
    }
}

/// One operator per node plus the pairing constant.
#[derive(Clone, Debug)]
pub struct KernelFamily {
    space: Arc<PhaseSpace>,
    deltas: Vec<DMatrix<C64>>,
    pairing_constant: f64,
}

/// Stratonovich–Weyl kernels of the space.
pub fn build_kernels(space: &PhaseSpace) -> Result<KernelFamily> {
    let deltas = match space.kind {
        SpaceKind::QuditTorus { d } => weyl::torus_kernels(d),
        SpaceKind::Sphere { two_j, .. } => {
            let coeffs = sphere::wigner_coefficients(two_j);
            sphere::rotated_kernels(space, &coeffs)?
        }
    };
    Ok(KernelFamily { space: Arc::new(space.clone()), deltas, pairing_constant: space.pairing_constant() })
}

impl KernelFamily {
    pub fn space(&self) -> &PhaseSpace {
        &self.space
    }

    pub(crate) fn space_arc(&self) -> &Arc<PhaseSpace> {
        &self.space
    }

    pub fn pairing_constant(&self) -> f64 {
        self.pairing_constant
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn node_count(&self) -> usize {
        self.deltas.len()
    }

    pub fn delta(&self, k: usize) -> Operator {
        Operator::trusted(self.deltas[k].clone(), Role::Hermitian)
    }

    pub(crate) fn delta_matrix(&self, k: usize) -> &DMatrix<C64> {
        &self.deltas[k]
    }

    pub(crate) fn check_dim(&self, a: &Operator) -> Result<()> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: a.dim() });
        }
        Ok(())
    }

    /// `Tr(A Δ(k))` at every node.
    pub(crate) fn symbol_values(&self, a: &DMatrix<C64>) -> Vec<C64> {
        self.deltas.iter().map(|d| trace_of_product(a, d)).collect()
    }

    /// `c Σₖ wₖ F(k) Δ(k)`.
    pub(crate) fn reconstruct_values(&self, values: &[C64]) -> DMatrix<C64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for ((d, &f), &w) in self.deltas.iter().zip(values).zip(self.space.weights()) {
            out += d * (f * (w * self.pairing_constant));
        }
        out
    }

    /// Operator whose symbol is `f`; the round trip must reproduce `f`.
    pub fn reconstruct(&self, f: &PhaseSpaceFunction) -> Result<Operator> {
        if f.order() != 1 || f.space() != self.space() {
            return Err(Error::ShapeMismatch("reconstruction needs a single-time symbol on the kernel space".into()));
        }
        let a = self.reconstruct_values(f.values());
        let back = self.symbol_values(&a);
        let residual = back.iter().zip(f.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        if residual > 1e-8 {
            return Err(Error::NotReconstructible { residual });
        }
        Ok(Operator::trusted(a, Role::Generic))
    }

    /// JSON grid descriptor including the pairing constant.
    pub fn descriptor(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self.space.as_ref()).expect("descriptor serializes");
        v["pairing_constant"] = serde_json::json!(self.pairing_constant);
        v
    }
}

/// Single-time symbol `F_A(k) = Tr(A Δ(k))`, labelled with time 0.
pub fn wigner_symbol(k: &KernelFamily, a: &Operator) -> Result<PhaseSpaceFunction> {
    k.check_dim(a)?;
    PhaseSpaceFunction::new(k.space_arc().clone(), vec![0.0], k.symbol_values(a.matrix()))
}

/// Sphere symbol `Tr(A Δ(θ, φ))` at any direction, not only at quadrature nodes.
pub fn sphere_symbol_at(two_j: usize, a: &Operator, theta: f64, phi: f64) -> Result<C64> {
    if two_j == 0 || two_j > MAX_TWO_J {
        return Err(Error::UnsupportedSpace(format!("spin j = {} outside 1/2..=4", two_j as f64 / 2.0)));
    }
    if a.dim() != two_j + 1 {
        return Err(Error::DimensionMismatch { expected: two_j + 1, actual: a.dim() });
    }
    let k = sphere::wigner_kernel_at(two_j, theta, phi)?;
    Ok((a.matrix() * k).trace())
}
