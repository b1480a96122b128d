#![allow(dead_code)]

use nalgebra::DMatrix;
use relphase::histories::FilterHistory;
use relphase::operator::{Operator, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `e^{-iHt}` from the spectral decomposition of `H`.
pub fn evolution(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let eig = h.clone().symmetric_eigen();
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::from_polar(1.0, -l * t)));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

pub fn heisenberg(p: &DMatrix<C64>, h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let u = evolution(h, t);
    u.adjoint() * p * u
}

/// Time-ordered product of Heisenberg filters, earliest on the left.
pub fn class_operator(history: &FilterHistory, h: &DMatrix<C64>) -> DMatrix<C64> {
    let dim = h.nrows();
    let grid = history.grid();
    let mut acc = DMatrix::identity(dim, dim);
    for (i, p) in history.filters() {
        acc *= heisenberg(p.matrix(), h, grid.time(i).unwrap());
    }
    acc
}

/// `Tr(ρ A B†)`.
pub fn pair(rho: &DMatrix<C64>, a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    (rho * a * b.adjoint()).trace()
}

pub fn d(rho: &Operator, h: &Operator, a: &FilterHistory, b: &FilterHistory) -> C64 {
    pair(rho.matrix(), &class_operator(a, h.matrix()), &class_operator(b, h.matrix()))
}
