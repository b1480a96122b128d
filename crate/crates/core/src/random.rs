//! Seeded generators for random states, Hamiltonians and projectors.
//!
//! All draws come from a ChaCha8 stream so that a seed fully determines the
//! fixture on every platform.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::operator::{Operator, Role, C64};

pub type FixtureRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FixtureRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Columns of a Haar-ish random unitary, orthonormalized by Gram–Schmidt.
pub fn unitary(rng: &mut impl Rng, dim: usize) -> DMatrix<C64> {
    let mut m = ginibre(rng, dim, dim);
    for c in 0..dim {
        for p in 0..c {
            let proj: C64 = (0..dim).map(|r| m[(r, p)].conj() * m[(r, c)]).sum();
            for r in 0..dim {
                let v = m[(r, p)];
                m[(r, c)] -= proj * v;
            }
        }
        let norm = (0..dim).map(|r| m[(r, c)].norm_sqr()).sum::<f64>().sqrt();
        for r in 0..dim {
            m[(r, c)] /= norm;
        }
    }
    m
}

pub fn pure_vector(rng: &mut impl Rng, dim: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Random density matrix `G G† / Tr(G G†)`.
pub fn density(rng: &mut impl Rng, dim: usize) -> Operator {
    let g = ginibre(rng, dim, dim);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = m / C64::new(tr, 0.0);
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    Operator::trusted(m, Role::Density)
}

pub fn pure_density(rng: &mut impl Rng, dim: usize) -> Operator {
    Operator::pure_state(&pure_vector(rng, dim)).expect("normalized vector")
}

/// Random hermitian matrix with entries of order `scale`.
pub fn hamiltonian(rng: &mut impl Rng, dim: usize, scale: f64) -> Operator {
    let g = ginibre(rng, dim, dim);
    let m = (&g + g.adjoint()) * C64::new(0.5 * scale, 0.0);
    Operator::trusted(m, Role::Hermitian)
}

/// Random orthonormal basis as a list of rank-one projectors.
pub fn projective_basis(rng: &mut impl Rng, dim: usize) -> Vec<Operator> {
    let u = unitary(rng, dim);
    (0..dim)
        .map(|c| {
            let col = u.column(c);
            Operator::trusted(col * col.adjoint(), Role::Projector)
        })
        .collect()
}

/// Random projector of the given rank.
pub fn projector(rng: &mut impl Rng, dim: usize, rank: usize) -> Operator {
    let u = unitary(rng, dim);
    let block = u.columns(0, rank);
    Operator::trusted(block * block.adjoint(), Role::Projector)
}
