use serde::{Deserialize, Serialize};

use super::{Operator, Role};
use crate::error::Error;

/// Wire form of an [`Operator`]: row-major real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    #[serde(default = "generic_role")]
    pub role: Role,
}

fn generic_role() -> Role {
    Role::Generic
}

impl From<&Operator> for OperatorJson {
    fn from(op: &Operator) -> Self {
        let n = op.dim();
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let z = op.entry(i, j);
                re.push(z.re);
                im.push(z.im);
            }
        }
        OperatorJson { dim: n, re, im, role: op.role() }
    }
}

impl TryFrom<OperatorJson> for Operator {
    type Error = Error;

    fn try_from(j: OperatorJson) -> Result<Self, Self::Error> {
        Operator::from_parts(j.dim, &j.re, &j.im, j.role)
    }
}

impl Serialize for Operator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        OperatorJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = OperatorJson::deserialize(d)?;
        Operator::try_from(j).map_err(serde::de::Error::custom)
    }
}
