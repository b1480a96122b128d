use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use nalgebra::DMatrix;

use super::{PhaseSpace, SpaceKind};
use crate::error::{Error, Result};
use crate::operator::standard::spin_operators;
use crate::operator::{matrix_exponential, C64};

/// Nodes `(θ, φ)` with θ increasing and φ varying fastest.
pub(super) fn quadrature(n_theta: usize, n_phi: usize) -> Result<(Vec<[f64; 2]>, Vec<f64>)> {
    let degree = n_theta.try_into().map_err(|_| Error::UnsupportedSpace(format!("bad Gauss-Legendre order {n_theta}")))?;
    let gl = GaussLegendre::new(degree);
    let mut rings: Vec<(f64, f64)> = gl.iter().map(|(x, w)| (*x, *w)).collect();
    rings.sort_by(|a, b| b.0.total_cmp(&a.0));
    let dphi = 2.0 * PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(n_theta * n_phi);
    let mut weights = Vec::with_capacity(n_theta * n_phi);
    for (x, w) in rings {
        let theta = x.clamp(-1.0, 1.0).acos();
        for k in 0..n_phi {
            nodes.push([theta, k as f64 * dphi]);
            weights.push(w * dphi);
        }
    }
    Ok((nodes, weights))
}

/// Diagonals of the orthonormal tensor operators `T_{l0}`, l = 0..=2j, in the
/// basis `|j, j⟩, …, |j, −j⟩`: Gram–Schmidt of `1, J_z, …, J_z^{2j}` under the
/// trace inner product.
pub(super) fn tensor_diagonals(two_j: usize) -> Vec<Vec<f64>> {
    let dim = two_j + 1;
    let j = two_j as f64 / 2.0;
    let m: Vec<f64> = (0..dim).map(|k| j - k as f64).collect();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(dim);
    for l in 0..dim {
        let mut v: Vec<f64> = m.iter().map(|x| x.powi(l as i32)).collect();
        for _ in 0..2 {
            for u in &out {
                let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                for (a, b) in v.iter_mut().zip(u) {
                    *a -= dot * b;
                }
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        out.push(v.into_iter().map(|a| a / norm).collect());
    }
    out
}

/// `sqrt((2l+1)/(2j+1))`.
pub(super) fn wigner_coefficients(two_j: usize) -> Vec<f64> {
    let dim = (two_j + 1) as f64;
    (0..=two_j).map(|l| ((2 * l + 1) as f64 / dim).sqrt()).collect()
}

/// `⟨j, j| T_{l0} |j, j⟩`.
pub(super) fn q_coefficients(two_j: usize) -> Vec<f64> {
    tensor_diagonals(two_j).iter().map(|t| t[0]).collect()
}

/// `(2l+1) / ((2j+1) b_l)`, dual to the Q coefficients.
pub(super) fn p_coefficients(two_j: usize) -> Vec<f64> {
    let dim = (two_j + 1) as f64;
    q_coefficients(two_j).iter().enumerate().map(|(l, b)| (2 * l + 1) as f64 / (dim * b)).collect()
}

/// `U(θ, φ) = e^{−iφJ_z} e^{−iθJ_y}`, which carries ẑ to the node direction.
pub(super) fn rotation(two_j: usize, theta: f64, phi: f64) -> Result<DMatrix<C64>> {
    let (_, jy, _) = spin_operators(two_j);
    let j = two_j as f64 / 2.0;
    let ry = matrix_exponential(&jy, C64::new(0.0, -theta))?.into_matrix();
    let rz = DMatrix::from_fn(two_j + 1, two_j + 1, |r, c| {
        if r == c {
            C64::from_polar(1.0, -phi * (j - r as f64))
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(rz * ry)
}

/// `U K(ẑ) U†` at every node, with `K(ẑ) = Σ_l x_l T_{l0}`.
pub(super) fn rotated_kernels(space: &PhaseSpace, coeffs: &[f64]) -> Result<Vec<DMatrix<C64>>> {
    let SpaceKind::Sphere { two_j, .. } = space.kind() else {
        return Err(Error::UnsupportedSpace("rotated kernels live on the sphere".into()));
    };
    let pole = pole_kernel(two_j, coeffs);
    space.nodes().iter().map(|&[theta, phi]| rotate(two_j, &pole, theta, phi)).collect()
}

fn pole_kernel(two_j: usize, coeffs: &[f64]) -> DMatrix<C64> {
    let tensors = tensor_diagonals(two_j);
    let dim = two_j + 1;
    let diag: Vec<f64> = (0..dim).map(|i| coeffs.iter().zip(&tensors).map(|(x, t)| x * t[i]).sum()).collect();
    DMatrix::from_fn(dim, dim, |r, c| if r == c { C64::new(diag[r], 0.0) } else { C64::new(0.0, 0.0) })
}

fn rotate(two_j: usize, pole: &DMatrix<C64>, theta: f64, phi: f64) -> Result<DMatrix<C64>> {
    let u = rotation(two_j, theta, phi)?;
    let k = &u * pole * u.adjoint();
    Ok((&k + k.adjoint()) * C64::new(0.5, 0.0))
}

/// Stratonovich–Weyl kernel at an arbitrary direction.
pub(super) fn wigner_kernel_at(two_j: usize, theta: f64, phi: f64) -> Result<DMatrix<C64>> {
    rotate(two_j, &pole_kernel(two_j, &wigner_coefficients(two_j)), theta, phi)
}
