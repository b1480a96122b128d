use std::fmt::Write as _;

use serde::Serialize;

use super::ConsistencyMode;
use crate::operator::C64;

/// Serializes a complex number as `{"re": .., "im": ..}`.
pub mod complex_json {
    use serde::ser::SerializeStruct;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::operator::C64;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Complex", 2)?;
        st.serialize_field("re", &z.re)?;
        st.serialize_field("im", &z.im)?;
        st.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        #[derive(Deserialize)]
        struct Parts {
            re: f64,
            im: f64,
        }
        let p = Parts::deserialize(d)?;
        Ok(C64::new(p.re, p.im))
    }

    pub(crate) struct Wrap<'a>(pub &'a C64);

    impl serde::Serialize for Wrap<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            serialize(self.0, s)
        }
    }
}

fn serialize_matrix<S: serde::Serializer>(m: &[Vec<C64>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for row in m {
        let wrapped: Vec<_> = row.iter().map(complex_json::Wrap).collect();
        seq.serialize_element(&wrapped)?;
    }
    seq.end()
}

/// d-matrix of a partition plus the consistency verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub mode: ConsistencyMode,
    pub tolerance: f64,
    pub consistent: bool,
    pub worst_off_diagonal: f64,
    #[serde(serialize_with = "serialize_matrix")]
    pub matrix: Vec<Vec<C64>>,
}

impl ConsistencyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per history, columns `re_j,im_j`.
    pub fn to_csv(&self) -> String {
        let n = self.matrix.len();
        let mut out = String::from("row");
        for j in 0..n {
            let _ = write!(out, ",re_{j},im_{j}");
        }
        out.push('\n');
        for (i, row) in self.matrix.iter().enumerate() {
            let _ = write!(out, "{i}");
            for z in row {
                let _ = write!(out, ",{:.16e},{:.16e}", z.re, z.im);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mode = match self.mode {
            ConsistencyMode::Weak => "weak",
            ConsistencyMode::Full => "full",
        };
        let mut out = format!(
            "mode        {mode}\ntolerance   {:e}\nconsistent  {}\nworst       {:.6e}\n",
            self.tolerance, self.consistent, self.worst_off_diagonal
        );
        for row in &self.matrix {
            let cells: Vec<String> = row.iter().map(|z| format!("{:>12.6} {:>+12.6}i", z.re, z.im)).collect();
            out.push_str(&cells.join("  "));
            out.push('\n');
        }
        out
    }
}
