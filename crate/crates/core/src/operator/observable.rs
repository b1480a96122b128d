use super::{Operator, Role, C64, TAU_H};
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// A sharp observable `A = Σ λᵢ Pᵢ` given by its spectral filters.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSpec {
    eigenvalues: Vec<f64>,
    filters: Vec<Operator>,
}

impl ObservableSpec {
    /// Validates that the filters are orthogonal projectors summing to 1.
    pub fn new(eigenvalues: Vec<f64>, filters: Vec<Operator>) -> Result<Self> {
        if eigenvalues.len() != filters.len() || filters.is_empty() {
            return Err(Error::InvalidObservable(format!(
                "{} eigenvalues for {} filters",
                eigenvalues.len(),
                filters.len()
            )));
        }
        let dim = filters[0].dim();
        let mut sum = DMatrix::<C64>::zeros(dim, dim);
        for (i, p) in filters.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: p.dim() });
            }
            if !p.is_projector(TAU_H) {
                return Err(Error::InvalidObservable(format!("filter {i} is not a projector")));
            }
            for (j, q) in filters.iter().enumerate().skip(i + 1) {
                let r = p.mul(q)?.max_abs();
                if r > TAU_H {
                    return Err(Error::InvalidObservable(format!("|P{i} P{j}| = {r:e}")));
                }
            }
            sum += p.matrix();
        }
        let residual = super::max_abs(&(sum - DMatrix::identity(dim, dim)));
        if residual > TAU_H {
            return Err(Error::InvalidObservable(format!("|Σ P - 1| = {residual:e}")));
        }
        let filters = filters
            .into_iter()
            .map(|p| if p.role() == Role::Projector { Ok(p) } else { p.retag(Role::Projector) })
            .collect::<Result<Vec<_>>>()?;
        Ok(ObservableSpec { eigenvalues, filters })
    }

    /// Spectral decomposition of a hermitian operator, merging eigenvalues
    /// closer than `TAU_H`-scaled tolerance into one filter.
    pub fn from_hermitian(a: &Operator) -> Result<Self> {
        let (values, vectors) = a.hermitian_eigen()?;
        let n = a.dim();
        let mut eigenvalues = Vec::new();
        let mut filters = Vec::new();
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && (values[end] - values[start]).abs() <= 1e-8 {
                end += 1;
            }
            let block = vectors.columns(start, end - start);
            let p = block * block.adjoint();
            let lambda = values[start..end].iter().sum::<f64>() / (end - start) as f64;
            eigenvalues.push(lambda);
            filters.push(Operator::trusted((&p + p.adjoint()) * C64::new(0.5, 0.0), Role::Projector));
            start = end;
        }
        ObservableSpec::new(eigenvalues, filters)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn filters(&self) -> &[Operator] {
        &self.filters
    }

    pub fn dim(&self) -> usize {
        self.filters[0].dim()
    }

    /// `Σ λᵢ Pᵢ`.
    pub fn operator(&self) -> Operator {
        let dim = self.dim();
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for (l, p) in self.eigenvalues.iter().zip(&self.filters) {
            m += p.matrix() * C64::new(*l, 0.0);
        }
        Operator::trusted(m, Role::Hermitian)
    }
}
