//! Frequently used operators and states.

use nalgebra::DMatrix;

use super::{Operator, Role, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn sigma_x() -> Operator {
    Operator::trusted(DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]), Role::Hermitian)
}

pub fn sigma_y() -> Operator {
    Operator::trusted(
        DMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]),
        Role::Hermitian,
    )
}

pub fn sigma_z() -> Operator {
    Operator::trusted(DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(-1.0, 0.0)]), Role::Hermitian)
}

/// Computational basis vector |k⟩ of a `dim`-level system.
pub fn basis_ket(dim: usize, k: usize) -> Vec<C64> {
    (0..dim).map(|i| if i == k { ONE } else { ZERO }).collect()
}

pub fn plus_ket() -> Vec<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![c(s, 0.0), c(s, 0.0)]
}

pub fn minus_ket() -> Vec<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![c(s, 0.0), c(-s, 0.0)]
}

/// |k⟩⟨k| in dimension `dim`.
pub fn basis_projector(dim: usize, k: usize) -> Operator {
    let m = DMatrix::from_fn(dim, dim, |i, j| if i == k && j == k { ONE } else { ZERO });
    Operator::trusted(m, Role::Projector)
}

pub fn ket0_projector() -> Operator {
    basis_projector(2, 0)
}

pub fn ket1_projector() -> Operator {
    basis_projector(2, 1)
}

pub fn plus_projector() -> Operator {
    Operator::trusted(
        DMatrix::from_element(2, 2, c(0.5, 0.0)),
        Role::Projector,
    )
}

pub fn minus_projector() -> Operator {
    Operator::trusted(
        DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0)]),
        Role::Projector,
    )
}

/// Maximally mixed state 1/dim.
pub fn maximally_mixed(dim: usize) -> Operator {
    let m = DMatrix::from_fn(dim, dim, |i, j| if i == j { c(1.0 / dim as f64, 0.0) } else { ZERO });
    Operator::trusted(m, Role::Density)
}

/// Density matrix of the computational basis state |k⟩.
pub fn basis_state(dim: usize, k: usize) -> Operator {
    Operator::trusted(basis_projector(dim, k).into_matrix(), Role::Density)
}

pub fn zero_hamiltonian(dim: usize) -> Operator {
    Operator::trusted(DMatrix::zeros(dim, dim), Role::Hermitian)
}

/// `hx σx + hy σy + hz σz`.
pub fn pauli_hamiltonian(hx: f64, hy: f64, hz: f64) -> Operator {
    let m = sigma_x().matrix() * c(hx, 0.0) + sigma_y().matrix() * c(hy, 0.0) + sigma_z().matrix() * c(hz, 0.0);
    Operator::trusted(m, Role::Hermitian)
}

/// Spin-j angular momentum operators (J_x, J_y, J_z) in the basis
/// |j, j⟩, |j, j−1⟩, …, |j, −j⟩, with ħ = 1.
pub fn spin_operators(two_j: usize) -> (Operator, Operator, Operator) {
    let dim = two_j + 1;
    let j = two_j as f64 / 2.0;
    let m_of = |k: usize| j - k as f64;
    let mut jp = DMatrix::<C64>::zeros(dim, dim);
    let mut jz = DMatrix::<C64>::zeros(dim, dim);
    for k in 0..dim {
        jz[(k, k)] = c(m_of(k), 0.0);
        if k > 0 {
            // J+ |j, m⟩ = sqrt(j(j+1) − m(m+1)) |j, m+1⟩
            let m = m_of(k);
            jp[(k - 1, k)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * c(0.5, 0.0);
    let jy = (&jp - &jm) * c(0.0, -0.5);
    (
        Operator::trusted(jx, Role::Hermitian),
        Operator::trusted(jy, Role::Hermitian),
        Operator::trusted(jz, Role::Hermitian),
    )
}

/// Generalized Pauli shift `X|k⟩ = |k+1 mod d⟩`.
pub fn shift(dim: usize) -> Operator {
    let m = DMatrix::from_fn(dim, dim, |i, j| if i == (j + 1) % dim { ONE } else { ZERO });
    Operator::trusted(m, Role::Unitary)
}

/// Generalized Pauli clock `Z|k⟩ = ω^k |k⟩`, ω = e^{2πi/d}.
pub fn clock(dim: usize) -> Operator {
    let w = 2.0 * std::f64::consts::PI / dim as f64;
    let m = DMatrix::from_fn(dim, dim, |i, j| if i == j { C64::from_polar(1.0, w * i as f64) } else { ZERO });
    Operator::trusted(m, Role::Unitary)
}
