use std::fmt::Write as _;
use std::sync::Arc;

use super::PhaseSpace;
use crate::error::{Error, Result};
use crate::operator::C64;

/// Values over `nodesⁿ`, one node index per time stamp, first time slowest.
#[derive(Clone, Debug)]
pub struct PhaseSpaceFunction {
    space: Arc<PhaseSpace>,
    times: Vec<f64>,
    values: Vec<C64>,
}

impl PartialEq for PhaseSpaceFunction {
    fn eq(&self, other: &Self) -> bool {
        self.space() == other.space() && self.times == other.times && self.values == other.values
    }
}

pub(crate) fn tuple_count(nodes: usize, order: usize) -> Result<usize> {
    u32::try_from(order)
        .ok()
        .and_then(|o| nodes.checked_pow(o))
        .ok_or_else(|| Error::ShapeMismatch(format!("{nodes}^{order} overflows")))
}

impl PhaseSpaceFunction {
    pub fn new(space: Arc<PhaseSpace>, times: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        let expected = tuple_count(space.node_count(), times.len())?;
        if values.len() != expected {
            return Err(Error::ShapeMismatch(format!("{} values for {} node tuples", values.len(), expected)));
        }
        Ok(PhaseSpaceFunction { space, times, values })
    }

    /// The same constant at every node tuple.
    pub fn constant(space: &PhaseSpace, times: Vec<f64>, value: C64) -> Result<Self> {
        let n = tuple_count(space.node_count(), times.len())?;
        PhaseSpaceFunction::new(Arc::new(space.clone()), times, vec![value; n])
    }

    /// Characteristic function of the node set selected by `inside(node)`,
    /// a classical sharp filter.
    pub fn characteristic(space: &PhaseSpace, time: f64, inside: impl Fn(&[f64; 2]) -> bool) -> Self {
        let values = space.nodes().iter().map(|x| C64::new(if inside(x) { 1.0 } else { 0.0 }, 0.0)).collect();
        PhaseSpaceFunction { space: Arc::new(space.clone()), times: vec![time], values }
    }

    pub fn space(&self) -> &PhaseSpace {
        &self.space
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Number of time stamps.
    pub fn order(&self) -> usize {
        self.times.len()
    }

    /// Relabels the time stamps, keeping the values.
    pub fn with_times(self, times: Vec<f64>) -> Result<Self> {
        if times.len() != self.times.len() {
            return Err(Error::ShapeMismatch(format!("{} times for an order-{} function", times.len(), self.order())));
        }
        Ok(PhaseSpaceFunction { times, ..self })
    }

    pub fn scale(&self, s: f64) -> Self {
        PhaseSpaceFunction { values: self.values.iter().map(|v| v * s).collect(), ..self.clone() }
    }

    /// `f(x) g(y)` over the concatenated node tuple.
    pub fn outer(&self, other: &PhaseSpaceFunction) -> Result<Self> {
        if self.space() != other.space() {
            return Err(Error::ShapeMismatch("functions live on different spaces".into()));
        }
        let mut values = Vec::with_capacity(self.values.len() * other.values.len());
        for a in &self.values {
            values.extend(other.values.iter().map(|b| a * b));
        }
        let mut times = self.times.clone();
        times.extend_from_slice(&other.times);
        PhaseSpaceFunction::new(self.space.clone(), times, values)
    }

    pub fn max_abs_diff(&self, other: &PhaseSpaceFunction) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Node indices of tuple `flat`, first time first.
    pub fn tuple(&self, flat: usize) -> Vec<usize> {
        let n = self.space.node_count();
        let mut idx = vec![0; self.order()];
        let mut r = flat;
        for slot in idx.iter_mut().rev() {
            *slot = r % n;
            r /= n;
        }
        idx
    }

    /// Product of node weights of tuple `flat`.
    pub fn tuple_weight(&self, flat: usize) -> f64 {
        self.tuple(flat).iter().map(|&k| self.space.weights()[k]).product()
    }

    /// Columns: coordinates per time slot, weight, re, im.
    pub fn to_csv(&self) -> String {
        let [a, b] = self.space.coordinate_names();
        let mut header: Vec<String> = Vec::new();
        for s in 1..=self.order() {
            if self.order() == 1 {
                header.push(a.into());
                header.push(b.into());
            } else {
                header.push(format!("{a}_{s}"));
                header.push(format!("{b}_{s}"));
            }
        }
        header.extend(["weight", "re", "im"].map(String::from));
        let mut out = header.join(",");
        out.push('\n');
        for (flat, v) in self.values.iter().enumerate() {
            for k in self.tuple(flat) {
                let [x, y] = self.space.nodes()[k];
                let _ = write!(out, "{},{},", fmt_float(x), fmt_float(y));
            }
            let _ = writeln!(out, "{},{},{}", fmt_float(self.tuple_weight(flat)), fmt_float(v.re), fmt_float(v.im));
        }
        out
    }
}

/// Fixed 17 significant digits.
pub(crate) fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}
