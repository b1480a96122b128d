//! Dense complex operators on finite-dimensional Hilbert spaces.
//!
//! An [`Operator`] is a square complex matrix carrying a [`Role`] tag. Tagged
//! roles are validated at construction against the tolerance [`TAU_H`], so a
//! value of role `Projector` is known to be hermitian and idempotent, a
//! `Density` to be positive with unit trace, and so on. Operators are
//! immutable; every operation returns a new value.

mod json;
mod observable;
pub mod standard;

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use json::OperatorJson;
pub use observable::ObservableSpec;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Tolerance used by every role-validation predicate.
pub const TAU_H: f64 = 1e-9;

/// Default soft cap on operator dimension.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Relative limit on the eigendecomposition reconstruction residual.
const EIGEN_RESIDUAL_LIMIT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Generic,
    Hermitian,
    Projector,
    Effect,
    Density,
    Unitary,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Role::Generic => "generic",
            Role::Hermitian => "hermitian",
            Role::Projector => "projector",
            Role::Effect => "effect",
            Role::Density => "density",
            Role::Unitary => "unitary",
        };
        f.write_str(name)
    }
}

impl Role {
    /// Roles whose validation includes hermiticity.
    pub fn is_hermitian(self) -> bool {
        matches!(self, Role::Hermitian | Role::Projector | Role::Effect | Role::Density)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: DMatrix<C64>,
    role: Role,
}

impl Operator {
    /// Wraps a square matrix with the `Generic` role.
    pub fn generic(matrix: DMatrix<C64>) -> Result<Self> {
        Self::with_role(matrix, Role::Generic)
    }

    /// Wraps a square matrix and validates it against `role`.
    pub fn with_role(matrix: DMatrix<C64>, role: Role) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        if matrix.nrows() == 0 {
            return Err(Error::Malformed("operator dimension must be positive".into()));
        }
        check_role(&matrix, role)?;
        Ok(Operator { matrix, role })
    }

    /// Skips validation. Callers guarantee the invariant holds by construction.
    pub(crate) fn trusted(matrix: DMatrix<C64>, role: Role) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        Operator { matrix, role }
    }

    pub fn identity(dim: usize) -> Self {
        Operator::trusted(DMatrix::identity(dim, dim), Role::Projector)
    }

    /// The zero operator, which is the opaque filter.
    pub fn zeros(dim: usize) -> Self {
        Operator::trusted(DMatrix::zeros(dim, dim), Role::Projector)
    }

    /// Builds from row-major real and imaginary parts.
    pub fn from_parts(dim: usize, re: &[f64], im: &[f64], role: Role) -> Result<Self> {
        if re.len() != dim * dim || im.len() != dim * dim {
            return Err(Error::Malformed(format!(
                "expected {} entries per part, got re={} im={}",
                dim * dim,
                re.len(),
                im.len()
            )));
        }
        let m = DMatrix::from_fn(dim, dim, |i, j| C64::new(re[i * dim + j], im[i * dim + j]));
        Operator::with_role(m, role)
    }

    pub fn from_real_rows(rows: &[&[f64]], role: Role) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::NotSquare { rows: dim, cols: rows.first().map_or(0, |r| r.len()) });
        }
        let m = DMatrix::from_fn(dim, dim, |i, j| C64::new(rows[i][j], 0.0));
        Operator::with_role(m, role)
    }

    pub fn diagonal(values: &[C64]) -> Result<Self> {
        let n = values.len();
        let m = DMatrix::from_fn(n, n, |i, j| if i == j { values[i] } else { C64::new(0.0, 0.0) });
        Operator::generic(m)
    }

    /// Rank-one projector |v⟩⟨v| onto the normalized vector `v`.
    pub fn projector_onto(v: &[C64]) -> Result<Self> {
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm < TAU_H {
            return Err(Error::Malformed("cannot project onto the zero vector".into()));
        }
        let n = v.len();
        let m = DMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj() / (norm * norm));
        Operator::with_role(m, Role::Projector)
    }

    /// Density matrix |v⟩⟨v| of a pure state.
    pub fn pure_state(v: &[C64]) -> Result<Self> {
        Self::projector_onto(v)?.retag(Role::Density)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    /// Re-validates under a different role.
    pub fn retag(self, role: Role) -> Result<Self> {
        Operator::with_role(self.matrix, role)
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn adjoint(&self) -> Operator {
        Operator::trusted(self.matrix.adjoint(), self.role)
    }

    /// Matrix product; the result is generic.
    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.same_dim(other)?;
        Ok(Operator::trusted(&self.matrix * &other.matrix, Role::Generic))
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.same_dim(other)?;
        Ok(Operator::trusted(&self.matrix + &other.matrix, Role::Generic))
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.same_dim(other)?;
        Ok(Operator::trusted(&self.matrix - &other.matrix, Role::Generic))
    }

    pub fn scale(&self, s: C64) -> Operator {
        Operator::trusted(&self.matrix * s, Role::Generic)
    }

    /// `A·B − B·A`.
    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.same_dim(other)?;
        let ab = &self.matrix * &other.matrix;
        let ba = &other.matrix * &self.matrix;
        Ok(Operator::trusted(ab - ba, Role::Generic))
    }

    /// Tr(A·B) without forming the product.
    pub fn trace_product(&self, other: &Operator) -> Result<C64> {
        self.same_dim(other)?;
        Ok(trace_of_product(&self.matrix, &other.matrix))
    }

    /// Largest entry-wise modulus of `A − B`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs(&(&self.matrix - &other.matrix))
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        hermitian_residual(&self.matrix) <= tol
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && idempotency_residual(&self.matrix) <= tol
    }

    /// True when the operator is within `tol` of zero.
    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    pub fn commutes_with(&self, other: &Operator, tol: f64) -> bool {
        self.commutator(other).map(|c| c.is_zero(tol)).unwrap_or(false)
    }

    /// Eigenvalues (ascending) and orthonormal eigenvectors of a hermitian operator.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, DMatrix<C64>)> {
        if !self.is_hermitian(TAU_H) {
            return Err(Error::RoleViolation {
                role: Role::Hermitian,
                detail: format!("|A - A†| = {:e}", hermitian_residual(&self.matrix)),
            });
        }
        let (values, vectors) = hermitian_eigen(&self.matrix)?;
        Ok((values, vectors))
    }

    fn same_dim(&self, other: &Operator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: other.dim() });
        }
        Ok(())
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub(crate) fn trace_of_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

fn hermitian_residual(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn idempotency_residual(m: &DMatrix<C64>) -> f64 {
    max_abs(&(m * m - m))
}

/// Sorted eigenpairs of a hermitian matrix, with a reconstruction check.
pub(crate) fn hermitian_eigen(m: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    // Symmetrize first so round-off asymmetry never reaches the solver.
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);

    let recon = &vectors
        * DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { C64::new(0.0, 0.0) })
        * vectors.adjoint();
    let residual = max_abs(&(recon - &sym));
    let limit = EIGEN_RESIDUAL_LIMIT * max_abs(&sym).max(1.0);
    if !(residual <= limit) {
        return Err(Error::Diagnostics { residual, limit });
    }
    Ok((values, vectors))
}

fn check_role(m: &DMatrix<C64>, role: Role) -> Result<()> {
    let fail = |detail: String| Err(Error::RoleViolation { role, detail });
    if role == Role::Generic {
        return Ok(());
    }
    if role == Role::Unitary {
        let n = m.nrows();
        let r = max_abs(&(m * m.adjoint() - DMatrix::<C64>::identity(n, n)));
        if r > TAU_H {
            return fail(format!("|U U† - 1| = {r:e}"));
        }
        return Ok(());
    }
    let h = hermitian_residual(m);
    if h > TAU_H {
        return fail(format!("not hermitian: |A - A†| = {h:e}"));
    }
    match role {
        Role::Projector => {
            let r = idempotency_residual(m);
            if r > TAU_H {
                return fail(format!("not idempotent: |A² - A| = {r:e}"));
            }
        }
        Role::Effect => {
            let (values, _) = hermitian_eigen(m)?;
            let lo = values.first().copied().unwrap_or(0.0);
            let hi = values.last().copied().unwrap_or(0.0);
            if lo < -TAU_H || hi > 1.0 + TAU_H {
                return fail(format!("spectrum [{lo}, {hi}] not inside [0, 1]"));
            }
        }
        Role::Density => {
            let tr = m.trace();
            if (tr.re - 1.0).abs() > TAU_H || tr.im.abs() > TAU_H {
                return fail(format!("trace is {}, expected 1", tr.re));
            }
            let (values, _) = hermitian_eigen(m)?;
            let lo = values.first().copied().unwrap_or(0.0);
            if lo < -TAU_H {
                return fail(format!("not positive semidefinite: smallest eigenvalue {lo}"));
            }
        }
        _ => {}
    }
    Ok(())
}

/// Kronecker product `A ⊗ B` under the default dimension cap.
pub fn tensor_product(a: &Operator, b: &Operator) -> Result<Operator> {
    tensor_product_with_cap(a, b, DEFAULT_DIM_CAP)
}

pub fn tensor_product_with_cap(a: &Operator, b: &Operator, cap: usize) -> Result<Operator> {
    let dim = a.dim() * b.dim();
    if dim > cap {
        return Err(Error::DimensionTooLarge { dim, cap });
    }
    let role = match (a.role, b.role) {
        (Role::Projector, Role::Projector) => Role::Projector,
        (Role::Density, Role::Density) => Role::Density,
        (Role::Unitary, Role::Unitary) => Role::Unitary,
        (x, y) if x.is_hermitian() && y.is_hermitian() => Role::Hermitian,
        _ => Role::Generic,
    };
    Ok(Operator::trusted(a.matrix.kronecker(&b.matrix), role))
}

/// `exp(scalar · A)`.
///
/// Hermitian inputs go through the eigendecomposition, which keeps
/// `exp(-iHt)` unitary to machine precision; anything else uses nalgebra's
/// scaling-and-squaring Padé routine.
pub fn matrix_exponential(a: &Operator, scalar: C64) -> Result<Operator> {
    if a.role.is_hermitian() || a.is_hermitian(TAU_H) {
        let (values, vectors) = hermitian_eigen(&a.matrix)?;
        let n = a.dim();
        let mut scaled = vectors.clone();
        for (c, &lambda) in values.iter().enumerate() {
            let f = (scalar * lambda).exp();
            for r in 0..n {
                scaled[(r, c)] *= f;
            }
        }
        let out = scaled * vectors.adjoint();
        let role = if scalar.re == 0.0 {
            Role::Unitary
        } else if scalar.im == 0.0 {
            Role::Hermitian
        } else {
            Role::Generic
        };
        return Ok(Operator::trusted(out, role));
    }
    let out = (&a.matrix * scalar).exp();
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Diagnostics { residual: f64::INFINITY, limit: EIGEN_RESIDUAL_LIMIT });
    }
    Ok(Operator::trusted(out, Role::Generic))
}

/// Heisenberg-picture filter `e^{iHt} P e^{-iHt}`. The role of `p` is preserved.
pub fn heisenberg_filter(p: &Operator, h: &Operator, t: f64) -> Result<Operator> {
    p.same_dim(h)?;
    if t == 0.0 {
        return Ok(p.clone());
    }
    let u = matrix_exponential(h, C64::new(0.0, -t))?;
    Ok(conjugate_by(p, &u))
}

/// `U† A U`, keeping the role of `A`.
pub(crate) fn conjugate_by(a: &Operator, u: &Operator) -> Operator {
    let m = u.matrix.adjoint() * &a.matrix * &u.matrix;
    let role = if a.role.is_hermitian() { a.role } else { Role::Generic };
    let m = if role.is_hermitian() { (&m + m.adjoint()) * C64::new(0.5, 0.0) } else { m };
    Operator::trusted(m, role)
}

#[cfg(test)]
mod tests {
    use super::standard::*;
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_tensor_identity() {
        let i4 = tensor_product(&Operator::identity(2), &Operator::identity(2)).unwrap();
        assert!(i4.approx_eq(&Operator::identity(4), 0.0));
        assert_eq!(i4.role(), Role::Projector);
    }

    #[test]
    fn basis_projector_composition() {
        let p = tensor_product(&ket0_projector(), &ket1_projector()).unwrap();
        let expected = Operator::diagonal(&[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]).unwrap();
        assert!(p.approx_eq(&expected, 0.0));
        assert_eq!(p.role(), Role::Projector);
    }

    #[test]
    fn sigma_z_tensor_sigma_z() {
        let zz = tensor_product(&sigma_z(), &sigma_z()).unwrap();
        let expected = Operator::diagonal(&[c(1., 0.), c(-1., 0.), c(-1., 0.), c(1., 0.)]).unwrap();
        assert!(zz.approx_eq(&expected, 0.0));
    }

    #[test]
    fn tensor_cap_enforced() {
        let a = Operator::identity(8);
        assert!(matches!(
            tensor_product_with_cap(&a, &a, 32),
            Err(Error::DimensionTooLarge { dim: 64, cap: 32 })
        ));
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let h = sigma_x();
        let u = matrix_exponential(&h, c(0.0, 0.0)).unwrap();
        assert!(u.approx_eq(&Operator::identity(2), 1e-14));
    }

    #[test]
    fn half_turn_about_x() {
        // exp(-iθσx/2) = cos(θ/2) - i sin(θ/2) σx, θ = π.
        let u = matrix_exponential(&sigma_x(), c(0.0, -PI / 2.0)).unwrap();
        let expected = sigma_x().scale(c(0.0, -1.0));
        assert!(u.approx_eq(&expected, 1e-14));
        assert_eq!(u.role(), Role::Unitary);
    }

    #[test]
    fn diagonal_exponential() {
        let (t, w) = (1.0, 2.0);
        let h = Operator::diagonal(&[c(0., 0.), c(w, 0.)]).unwrap().retag(Role::Hermitian).unwrap();
        let u = matrix_exponential(&h, c(0.0, -t)).unwrap();
        let expected = Operator::diagonal(&[c(1.0, 0.0), c(0.0, -w * t).exp()]).unwrap();
        assert!(u.approx_eq(&expected, 1e-14));
    }

    #[test]
    fn non_hermitian_exponential_uses_pade() {
        // Nilpotent: exp(N) = 1 + N.
        let n = Operator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]], Role::Generic).unwrap();
        let e = matrix_exponential(&n, c(1.0, 0.0)).unwrap();
        let expected = Operator::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]], Role::Generic).unwrap();
        assert!(e.approx_eq(&expected, 1e-13));
        assert_eq!(e.role(), Role::Generic);
    }

    #[test]
    fn heisenberg_at_zero_is_identity_map() {
        let p = plus_projector();
        let out = heisenberg_filter(&p, &sigma_z(), 0.0).unwrap();
        assert_eq!(out, p);
    }

    #[test]
    fn half_rabi_period_flips_spin() {
        let w = 1.7;
        let h = sigma_x().scale(c(w / 2.0, 0.0)).retag(Role::Hermitian).unwrap();
        let out = heisenberg_filter(&ket0_projector(), &h, PI / w).unwrap();
        assert!(out.approx_eq(&ket1_projector(), 1e-12));
        assert_eq!(out.role(), Role::Projector);
    }

    #[test]
    fn commuting_filter_is_static() {
        let h = sigma_z().scale(c(0.8, 0.0)).retag(Role::Hermitian).unwrap();
        let out = heisenberg_filter(&ket1_projector(), &h, 2.3).unwrap();
        assert!(out.approx_eq(&ket1_projector(), 1e-12));
    }

    #[test]
    fn density_validation_names_invariant() {
        let m = DMatrix::from_fn(2, 2, |i, j| if i == j { c(0.45, 0.0) } else { c(0.0, 0.0) });
        let err = Operator::with_role(m, Role::Density).unwrap_err();
        match err {
            Error::RoleViolation { role: Role::Density, detail } => assert!(detail.contains("trace")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn projector_validation_rejects_non_idempotent() {
        let m = DMatrix::from_fn(2, 2, |i, j| if i == j { c(0.5, 0.0) } else { c(0.0, 0.0) });
        assert!(Operator::with_role(m.clone(), Role::Projector).is_err());
        assert!(Operator::with_role(m, Role::Effect).is_ok());
    }

    #[test]
    fn unitary_validation() {
        assert!(sigma_y().retag(Role::Unitary).is_ok());
        assert!(sigma_z().scale(c(2.0, 0.0)).retag(Role::Unitary).is_err());
    }
}
