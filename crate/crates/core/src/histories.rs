//! Filter histories on a finite temporal grid.
//!
//! A [`FilterHistory`] assigns a filter (projector or effect) to some of the
//! grid times; every unassigned time carries the trivial filter `1`, which is
//! never stored. Histories are kept in the Schrödinger picture: the dynamics
//! only enters through [`class_operator`].

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{heisenberg_filter, Operator, Role, TAU_H};

/// Strictly increasing, non-empty list of time stamps.
#[derive(Clone, Debug, PartialEq)]
pub struct TemporalGrid {
    times: Arc<[f64]>,
}

impl TemporalGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid);
        }
        Ok(TemporalGrid { times: times.into() })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn time(&self, index: usize) -> Result<f64> {
        self.times.get(index).copied().ok_or(Error::GridIndex { index, len: self.len() })
    }

    /// Index of `t`, matched to within 1e-12.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= 1e-12 * s.abs().max(1.0))
            .ok_or(Error::TimeNotOnGrid { time: t })
    }
}

/// Anything carrying a class operator: a single history or a sum of disjoint ones.
pub trait Alternative {
    fn grid(&self) -> &TemporalGrid;
    fn class_operator(&self, hamiltonian: &Operator) -> Result<Operator>;
    /// Latest time carrying a nontrivial filter.
    fn latest_time(&self) -> Option<f64>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilterHistory {
    grid: TemporalGrid,
    filters: BTreeMap<usize, Operator>,
}

impl FilterHistory {
    /// The history with no filters, i.e. `1` at every time.
    pub fn trivial(grid: &TemporalGrid) -> Self {
        FilterHistory { grid: grid.clone(), filters: BTreeMap::new() }
    }

    /// History with the zero filter at the first grid time.
    pub fn opaque(grid: &TemporalGrid, dim: usize) -> Self {
        let mut filters = BTreeMap::new();
        filters.insert(0, Operator::zeros(dim));
        FilterHistory { grid: grid.clone(), filters }
    }

    /// Builds from `(grid index, filter)` pairs. Filters equal to the identity
    /// are dropped; every other filter must validate as a projector or effect.
    pub fn new(grid: &TemporalGrid, assignments: impl IntoIterator<Item = (usize, Operator)>) -> Result<Self> {
        let mut filters = BTreeMap::new();
        let mut dim = None;
        for (index, op) in assignments {
            grid.time(index)?;
            let op = as_filter(op)?;
            match dim {
                None => dim = Some(op.dim()),
                Some(d) if d != op.dim() => return Err(Error::DimensionMismatch { expected: d, actual: op.dim() }),
                _ => {}
            }
            if filters.contains_key(&index) {
                return Err(Error::Malformed(format!("grid index {index} assigned twice")));
            }
            if !op.approx_eq(&Operator::identity(op.dim()), TAU_H) {
                filters.insert(index, op);
            }
        }
        Ok(FilterHistory { grid: grid.clone(), filters })
    }

    /// Builds from `(time, filter)` pairs; each time must lie on the grid.
    pub fn at_times(grid: &TemporalGrid, assignments: impl IntoIterator<Item = (f64, Operator)>) -> Result<Self> {
        let pairs = assignments
            .into_iter()
            .map(|(t, op)| Ok((grid.index_of(t)?, op)))
            .collect::<Result<Vec<_>>>()?;
        FilterHistory::new(grid, pairs)
    }

    pub fn grid(&self) -> &TemporalGrid {
        &self.grid
    }

    /// Temporal support as grid indices.
    pub fn support(&self) -> BTreeSet<usize> {
        self.filters.keys().copied().collect()
    }

    pub fn support_times(&self) -> Vec<f64> {
        self.filters.keys().map(|&i| self.grid.times[i]).collect()
    }

    pub fn filter(&self, index: usize) -> Option<&Operator> {
        self.filters.get(&index)
    }

    /// Filters in time order.
    pub fn filters(&self) -> impl Iterator<Item = (usize, &Operator)> {
        self.filters.iter().map(|(&i, op)| (i, op))
    }

    pub fn len(&self) -> usize {
        self.filters.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.filters.is_empty()
    }

    /// Single-time dimension, when any filter is present.
    pub fn dim(&self) -> Option<usize> {
        self.filters.values().next().map(Operator::dim)
    }

    pub fn is_projector_history(&self) -> bool {
        self.filters.values().all(|p| p.role() == Role::Projector)
    }

    pub fn is_opaque(&self) -> bool {
        self.filters.values().any(|p| p.is_zero(TAU_H))
    }

    /// Same support and filters within `tol`.
    pub fn approx_eq(&self, other: &FilterHistory, tol: f64) -> bool {
        self.grid == other.grid
            && self.support() == other.support()
            && self.filters.iter().all(|(i, p)| p.approx_eq(&other.filters[i], tol))
    }

    fn check_grid(&self, other: &FilterHistory) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    fn union_support(&self, other: &FilterHistory) -> BTreeSet<usize> {
        self.filters.keys().chain(other.filters.keys()).copied().collect()
    }

    fn supports_disjoint(&self, other: &FilterHistory) -> bool {
        self.filters.keys().all(|i| !other.filters.contains_key(i))
    }
}

impl Alternative for FilterHistory {
    fn grid(&self) -> &TemporalGrid {
        &self.grid
    }

    fn class_operator(&self, hamiltonian: &Operator) -> Result<Operator> {
        class_operator(self, hamiltonian)
    }

    fn latest_time(&self) -> Option<f64> {
        self.filters.keys().next_back().map(|&i| self.grid.times[i])
    }
}

fn as_filter(op: Operator) -> Result<Operator> {
    match op.role() {
        Role::Projector | Role::Effect => Ok(op),
        _ => {
            if op.is_projector(TAU_H) {
                op.retag(Role::Projector)
            } else {
                op.retag(Role::Effect)
            }
        }
    }
}

/// `a ≤ b`: at every time of the union support, `filter(a)·filter(b) = filter(a)`.
pub fn finer_than(a: &FilterHistory, b: &FilterHistory) -> Result<bool> {
    a.check_grid(b)?;
    for i in a.union_support(b) {
        let ok = match (a.filters.get(&i), b.filters.get(&i)) {
            (_, None) => true,
            // 1·Q = 1 only when Q is the identity, which is never stored.
            (None, Some(q)) => q.approx_eq(&Operator::identity(q.dim()), TAU_H),
            (Some(p), Some(q)) => p.mul(q)?.approx_eq(p, TAU_H),
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True when some common time carries filters whose product vanishes.
pub fn incompatible(a: &FilterHistory, b: &FilterHistory) -> Result<bool> {
    a.check_grid(b)?;
    for (i, p) in &a.filters {
        if let Some(q) = b.filters.get(i) {
            if p.mul(q)?.is_zero(TAU_H) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Incompatible, or with disjoint temporal supports.
pub fn disjoint(a: &FilterHistory, b: &FilterHistory) -> Result<bool> {
    Ok(a.supports_disjoint(b) || incompatible(a, b)?)
}

/// The sum `a + b` when it is again a filter history.
///
/// Two shapes qualify: equal supports whose filters agree everywhere except at
/// one time, where they are orthogonal and get replaced by their sum; and
/// disjoint supports, which concatenate.
pub fn operationally_additive(a: &FilterHistory, b: &FilterHistory) -> Result<Option<FilterHistory>> {
    a.check_grid(b)?;
    if !disjoint(a, b)? {
        return Err(Error::NotDisjoint);
    }
    if a.supports_disjoint(b) {
        let mut filters = a.filters.clone();
        filters.extend(b.filters.iter().map(|(i, p)| (*i, p.clone())));
        return Ok(Some(FilterHistory { grid: a.grid.clone(), filters }));
    }
    if a.support() != b.support() {
        return Ok(None);
    }
    let differing: Vec<usize> =
        a.filters.iter().filter(|(i, p)| !p.approx_eq(&b.filters[*i], TAU_H)).map(|(i, _)| *i).collect();
    let [slot] = differing[..] else {
        return Ok(None);
    };
    let (p, q) = (&a.filters[&slot], &b.filters[&slot]);
    if !p.mul(q)?.is_zero(TAU_H) {
        return Ok(None);
    }
    let role = if p.role() == Role::Projector && q.role() == Role::Projector { Role::Projector } else { Role::Effect };
    let sum = p.add(q)?.retag(role)?;
    let mut filters = a.filters.clone();
    if sum.approx_eq(&Operator::identity(sum.dim()), TAU_H) {
        filters.remove(&slot);
    } else {
        filters.insert(slot, sum);
    }
    Ok(Some(FilterHistory { grid: a.grid.clone(), filters }))
}

/// Outcome of [`meet`].
#[derive(Clone, Debug, PartialEq)]
pub enum Meet {
    History(FilterHistory),
    /// The meet is the zero filter history.
    Opaque,
    /// Some common-time pair does not commute (or involves an effect).
    Undefined,
}

impl Meet {
    pub fn history(&self) -> Option<&FilterHistory> {
        match self {
            Meet::History(h) => Some(h),
            _ => None,
        }
    }
}

/// `a ∘ b`, the coarsest filter history finer than both.
pub fn meet(a: &FilterHistory, b: &FilterHistory) -> Result<Meet> {
    a.check_grid(b)?;
    if !a.is_projector_history() || !b.is_projector_history() {
        return Ok(Meet::Undefined);
    }
    let mut filters = BTreeMap::new();
    for i in a.union_support(b) {
        let f = match (a.filters.get(&i), b.filters.get(&i)) {
            (Some(p), None) | (None, Some(p)) => p.clone(),
            (Some(p), Some(q)) => {
                if !p.commutes_with(q, TAU_H) {
                    return Ok(Meet::Undefined);
                }
                let pq = p.mul(q)?;
                if !pq.is_projector(TAU_H) {
                    return Ok(Meet::Undefined);
                }
                pq.retag(Role::Projector)?
            }
            (None, None) => unreachable!(),
        };
        if f.is_zero(TAU_H) {
            return Ok(Meet::Opaque);
        }
        filters.insert(i, f);
    }
    Ok(Meet::History(FilterHistory { grid: a.grid.clone(), filters }))
}

/// Class operator `C = e^{iHt₁}P₁e^{−iHt₁} ⋯ e^{iHtₙ}Pₙe^{−iHtₙ}`, earliest
/// factor leftmost. The trivial history maps to the identity.
pub fn class_operator(a: &FilterHistory, hamiltonian: &Operator) -> Result<Operator> {
    let dim = hamiltonian.dim();
    let mut acc = Operator::identity(dim);
    for (&i, p) in &a.filters {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: p.dim() });
        }
        let rotated = heisenberg_filter(p, hamiltonian, a.grid.times[i])?;
        acc = acc.mul(&rotated)?;
    }
    Ok(acc)
}

/// Sum of pairwise disjoint filter histories.
#[derive(Clone, Debug, PartialEq)]
pub struct HistoryProposition {
    grid: TemporalGrid,
    terms: Vec<FilterHistory>,
}

impl HistoryProposition {
    pub fn new(grid: &TemporalGrid, terms: Vec<FilterHistory>) -> Result<Self> {
        for t in &terms {
            if t.grid() != grid {
                return Err(Error::GridMismatch);
            }
        }
        for (i, a) in terms.iter().enumerate() {
            for b in &terms[i + 1..] {
                if !disjoint(a, b)? {
                    return Err(Error::NotDisjoint);
                }
            }
        }
        Ok(HistoryProposition { grid: grid.clone(), terms })
    }

    pub fn single(history: FilterHistory) -> Self {
        HistoryProposition { grid: history.grid.clone(), terms: vec![history] }
    }

    pub fn terms(&self) -> &[FilterHistory] {
        &self.terms
    }

    /// Joins two propositions whose terms are mutually disjoint.
    pub fn join(&self, other: &HistoryProposition) -> Result<Self> {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        HistoryProposition::new(&self.grid, terms)
    }
}

impl Alternative for HistoryProposition {
    fn grid(&self) -> &TemporalGrid {
        &self.grid
    }

    fn class_operator(&self, hamiltonian: &Operator) -> Result<Operator> {
        let mut acc = Operator::zeros(hamiltonian.dim());
        for t in &self.terms {
            acc = acc.add(&class_operator(t, hamiltonian)?)?;
        }
        Ok(acc)
    }

    fn latest_time(&self) -> Option<f64> {
        self.terms.iter().filter_map(|t| t.latest_time()).reduce(f64::max)
    }
}

impl From<FilterHistory> for HistoryProposition {
    fn from(h: FilterHistory) -> Self {
        HistoryProposition::single(h)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HistoryJson {
    grid: Vec<f64>,
    filters: BTreeMap<usize, Operator>,
}

impl Serialize for FilterHistory {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HistoryJson { grid: self.grid.times.to_vec(), filters: self.filters.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FilterHistory {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = HistoryJson::deserialize(d)?;
        let grid = TemporalGrid::new(j.grid).map_err(serde::de::Error::custom)?;
        FilterHistory::new(&grid, j.filters).map_err(serde::de::Error::custom)
    }
}
