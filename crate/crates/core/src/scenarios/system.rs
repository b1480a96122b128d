use rand::Rng;
use serde_json::{json, Value};

use crate::coherence::SystemModel;
use crate::error::{Error, Result};
use crate::histories::TemporalGrid;
use crate::operator::standard::{basis_ket, maximally_mixed, spin_operators, zero_hamiltonian};
use crate::operator::{Operator, OperatorJson, Role, C64};

/// Initial state of a scenario.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    /// `zero`, `one`, `up`, `down`, `plus`, `minus`, `mixed` or `basis:k`.
    Named(String),
    /// A fresh random density matrix per fixture.
    Random,
    /// A fresh random pure state per fixture.
    RandomPure,
    /// Normalized on use.
    Ket(Vec<C64>),
    Matrix(Operator),
}

/// Hamiltonian of a scenario.
#[derive(Clone, Debug, PartialEq)]
pub enum HamiltonianSpec {
    Zero,
    /// `hx σx + hy σy + hz σz` (qubits only).
    Pauli([f64; 3]),
    /// `hx Jx + hy Jy + hz Jz` in the spin-`(dim−1)/2` representation.
    Spin([f64; 3]),
    /// A fresh random hermitian matrix with this scale per fixture.
    Random(f64),
    Matrix(Operator),
}

/// `dim`, `ρ`, `H` and the temporal grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub dim: usize,
    pub rho: StateSpec,
    pub hamiltonian: HamiltonianSpec,
    pub grid: Vec<f64>,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// State vector for a name, if the name is known in `dim` dimensions.
pub(crate) fn named_ket(name: &str, dim: usize) -> std::result::Result<Vec<C64>, String> {
    let s = 1.0 / (dim as f64).sqrt();
    match name {
        "zero" | "up" => Ok(basis_ket(dim, 0)),
        "one" if dim >= 2 => Ok(basis_ket(dim, 1)),
        "down" => Ok(basis_ket(dim, dim - 1)),
        "plus" => Ok(vec![c(s, 0.0); dim]),
        "minus" if dim == 2 => Ok(vec![c(s, 0.0), c(-s, 0.0)]),
        _ => {
            if let Some(k) = name.strip_prefix("basis:") {
                let k: usize = k.parse().map_err(|_| format!("bad basis index in {name:?}"))?;
                if k < dim {
                    return Ok(basis_ket(dim, k));
                }
                return Err(format!("basis index {k} out of range for dim {dim}"));
            }
            Err(format!("unknown state name {name:?} for dim {dim}"))
        }
    }
}

fn parse_ket(items: &[Value]) -> std::result::Result<Vec<C64>, String> {
    items
        .iter()
        .map(|v| match v {
            Value::Number(n) => Ok(c(n.as_f64().unwrap_or(f64::NAN), 0.0)),
            Value::Array(pair) if pair.len() == 2 => match (pair[0].as_f64(), pair[1].as_f64()) {
                (Some(re), Some(im)) => Ok(c(re, im)),
                _ => Err("ket entries must be numbers or [re, im] pairs".to_string()),
            },
            _ => Err("ket entries must be numbers or [re, im] pairs".to_string()),
        })
        .collect()
}

fn ket_to_value(v: &[C64]) -> Value {
    Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}

fn normalized(v: &[C64]) -> std::result::Result<Vec<C64>, String> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(n > 1e-12) || !n.is_finite() {
        return Err("ket has zero or non-finite norm".into());
    }
    Ok(v.iter().map(|z| z / n).collect())
}

fn matrix_from(v: &Value, role: Role) -> std::result::Result<Operator, String> {
    let j: OperatorJson = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
    let op = Operator::try_from(OperatorJson { role: Role::Generic, ..j }).map_err(|e| e.to_string())?;
    op.retag(role).map_err(|e| e.to_string())
}

impl StateSpec {
    pub fn from_value(v: &Value) -> std::result::Result<Self, String> {
        match v {
            Value::String(s) if s == "random" => Ok(StateSpec::Random),
            Value::String(s) if s == "random_pure" => Ok(StateSpec::RandomPure),
            Value::String(s) => Ok(StateSpec::Named(s.clone())),
            Value::Array(items) => Ok(StateSpec::Ket(parse_ket(items)?)),
            Value::Object(_) => Ok(StateSpec::Matrix(matrix_from(v, Role::Density)?)),
            _ => Err("rho must be a name, a ket array or an operator object".into()),
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            StateSpec::Named(s) => Value::from(s.as_str()),
            StateSpec::Random => Value::from("random"),
            StateSpec::RandomPure => Value::from("random_pure"),
            StateSpec::Ket(v) => ket_to_value(v),
            StateSpec::Matrix(op) => serde_json::to_value(op).expect("operator serializes"),
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, StateSpec::Random | StateSpec::RandomPure)
    }

    /// Checks the state against `dim` without drawing random numbers.
    pub fn check(&self, dim: usize) -> std::result::Result<(), String> {
        match self {
            StateSpec::Random | StateSpec::RandomPure => Ok(()),
            _ => self.resolve(dim, &mut crate::random::rng(0)).map(|_| ()).map_err(|e| e.to_string()),
        }
    }

    pub fn resolve(&self, dim: usize, rng: &mut impl Rng) -> Result<Operator> {
        match self {
            StateSpec::Named(s) if s == "mixed" => Ok(maximally_mixed(dim)),
            StateSpec::Named(s) => Operator::pure_state(&named_ket(s, dim).map_err(Error::Malformed)?),
            StateSpec::Random => Ok(crate::random::density(rng, dim)),
            StateSpec::RandomPure => Ok(crate::random::pure_density(rng, dim)),
            StateSpec::Ket(v) => {
                if v.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, actual: v.len() });
                }
                Operator::pure_state(&normalized(v).map_err(Error::Malformed)?)
            }
            StateSpec::Matrix(op) => {
                if op.dim() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, actual: op.dim() });
                }
                Ok(op.clone())
            }
        }
    }
}

fn triple(v: &Value) -> Option<[f64; 3]> {
    let a = v.as_array()?;
    if a.len() != 3 {
        return None;
    }
    Some([a[0].as_f64()?, a[1].as_f64()?, a[2].as_f64()?])
}

impl HamiltonianSpec {
    pub fn from_value(v: &Value) -> std::result::Result<Self, String> {
        match v {
            Value::String(s) if s == "zero" => Ok(HamiltonianSpec::Zero),
            Value::Object(map) if map.len() == 1 && map.contains_key("pauli") => {
                triple(&map["pauli"]).map(HamiltonianSpec::Pauli).ok_or_else(|| "pauli needs [hx, hy, hz]".into())
            }
            Value::Object(map) if map.len() == 1 && map.contains_key("spin") => {
                triple(&map["spin"]).map(HamiltonianSpec::Spin).ok_or_else(|| "spin needs [hx, hy, hz]".into())
            }
            Value::Object(map) if map.len() == 1 && map.contains_key("random") => match map["random"].as_f64() {
                Some(s) if s.is_finite() && s >= 0.0 => Ok(HamiltonianSpec::Random(s)),
                _ => Err("random needs a non-negative scale".into()),
            },
            Value::Object(_) => Ok(HamiltonianSpec::Matrix(matrix_from(v, Role::Hermitian)?)),
            _ => Err("hamiltonian must be \"zero\", {\"pauli\": [..]}, {\"spin\": [..]}, {\"random\": s} or an operator".into()),
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            HamiltonianSpec::Zero => Value::from("zero"),
            HamiltonianSpec::Pauli(h) => json!({ "pauli": h }),
            HamiltonianSpec::Spin(h) => json!({ "spin": h }),
            HamiltonianSpec::Random(s) => json!({ "random": s }),
            HamiltonianSpec::Matrix(op) => serde_json::to_value(op).expect("operator serializes"),
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, HamiltonianSpec::Random(_))
    }

    pub fn check(&self, dim: usize) -> std::result::Result<(), String> {
        match self {
            HamiltonianSpec::Random(_) => Ok(()),
            _ => self.resolve(dim, &mut crate::random::rng(0)).map(|_| ()).map_err(|e| e.to_string()),
        }
    }

    pub fn resolve(&self, dim: usize, rng: &mut impl Rng) -> Result<Operator> {
        match self {
            HamiltonianSpec::Zero => Ok(zero_hamiltonian(dim)),
            HamiltonianSpec::Pauli(h) => {
                if dim != 2 {
                    return Err(Error::DimensionMismatch { expected: 2, actual: dim });
                }
                Ok(crate::operator::standard::pauli_hamiltonian(h[0], h[1], h[2]))
            }
            HamiltonianSpec::Spin(h) => {
                let (jx, jy, jz) = spin_operators(dim - 1);
                jx.scale(c(h[0], 0.0)).add(&jy.scale(c(h[1], 0.0)))?.add(&jz.scale(c(h[2], 0.0)))?.retag(Role::Hermitian)
            }
            HamiltonianSpec::Random(s) => Ok(crate::random::hamiltonian(rng, dim, *s)),
            HamiltonianSpec::Matrix(op) => {
                if op.dim() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, actual: op.dim() });
                }
                Ok(op.clone())
            }
        }
    }
}

impl SystemSpec {
    pub fn is_random(&self) -> bool {
        self.rho.is_random() || self.hamiltonian.is_random()
    }

    pub fn temporal_grid(&self) -> Result<TemporalGrid> {
        TemporalGrid::new(self.grid.clone())
    }

    /// Draws the random parts (if any) from `rng`; fixed parts are reused.
    pub fn model(&self, rng: &mut impl Rng) -> Result<SystemModel> {
        self.model_in(self.dim, rng)
    }

    /// The same recipe in another dimension.
    pub fn model_in(&self, dim: usize, rng: &mut impl Rng) -> Result<SystemModel> {
        let rho = self.rho.resolve(dim, rng)?;
        let h = self.hamiltonian.resolve(dim, rng)?;
        SystemModel::new(rho, h, self.temporal_grid()?)
    }
}

/// Projector from a state name, a ket array or an operator object.
pub(crate) fn projector_from(v: &Value, dim: usize) -> std::result::Result<Operator, String> {
    match v {
        Value::String(s) => Operator::projector_onto(&named_ket(s, dim)?).map_err(|e| e.to_string()),
        Value::Array(items) => {
            let ket = parse_ket(items)?;
            if ket.len() != dim {
                return Err(format!("ket has {} entries, expected {dim}", ket.len()));
            }
            Operator::projector_onto(&normalized(&ket)?).map_err(|e| e.to_string())
        }
        Value::Object(_) => {
            let op = matrix_from(v, Role::Projector)?;
            if op.dim() != dim {
                return Err(format!("projector has dim {}, expected {dim}", op.dim()));
            }
            Ok(op)
        }
        _ => Err("expected a state name, a ket array or an operator object".into()),
    }
}

/// Rank-one projectors of an orthonormal basis: `z` computational, `x` Fourier
/// (`|±⟩` for a qubit), `y` the σy eigenbasis of a qubit.
pub(crate) fn basis_projectors(name: &str, dim: usize) -> std::result::Result<Vec<Operator>, String> {
    let kets: Vec<Vec<C64>> = match name {
        "z" => (0..dim).map(|k| basis_ket(dim, k)).collect(),
        "x" => {
            let s = 1.0 / (dim as f64).sqrt();
            (0..dim)
                .map(|k| {
                    (0..dim)
                        .map(|j| C64::from_polar(s, std::f64::consts::TAU * (j * k) as f64 / dim as f64))
                        .collect()
                })
                .collect()
        }
        "y" if dim == 2 => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            vec![vec![c(s, 0.0), c(0.0, s)], vec![c(s, 0.0), c(0.0, -s)]]
        }
        _ => return Err(format!("basis {name:?} is not available in dim {dim}")),
    };
    kets.iter().map(|k| Operator::projector_onto(k).map_err(|e| e.to_string())).collect()
}
