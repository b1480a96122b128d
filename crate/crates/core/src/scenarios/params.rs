use serde_json::{json, Value};

use super::system::{basis_projectors, projector_from};
use super::ScenarioKind;

/// Accepted shape of a parameter or assertion value.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Check {
    Count { min: u64 },
    Number,
    Tolerance,
    Bool,
    OptBool,
    OptNumber,
    Choice(&'static [&'static str]),
    Basis,
    Projector,
    OptOddDim,
    OptDimList,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Key {
    pub name: &'static str,
    pub default: fn() -> Value,
    pub check: Check,
    pub doc: &'static str,
}

macro_rules! key {
    ($name:literal, $default:tt, $check:expr, $doc:literal) => {
        Key { name: $name, default: || json!($default), check: $check, doc: $doc }
    };
}

pub(crate) fn param_keys(kind: ScenarioKind) -> &'static [Key] {
    use Check::*;
    match kind {
        ScenarioKind::TwoSlit => &[
            key!("slit_basis", "z", Basis, "slit filters: first basis projector and its complement"),
            key!("slit_time", 0.0, Number, "grid time of the slits"),
            key!("screen", "plus", Projector, "screen filter"),
            key!("screen_time", 1.0, Number, "grid time of the screen"),
        ],
        ScenarioKind::PrecessionConsistency => {
            &[key!("basis", "x", Basis, "filter basis used at every grid time")]
        }
        ScenarioKind::ReproductionSweep => &[
            key!("histories", 100, Count { min: 1 }, "history pairs per phase space"),
            key!("max_order", 4, Count { min: 2 }, "largest n + m"),
            key!("sphere", true, Bool, "sweep the sphere of spin (dim - 1)/2"),
            key!("torus_dim", 3, OptOddDim, "sweep the odd-d qudit torus (null to skip)"),
            key!("write_kernel", true, Bool, "write W of the first pair as binary plus sidecar"),
        ],
        ScenarioKind::NegativityMap => &[
            key!("projector", "up", Projector, "projector whose symbol is mapped"),
            key!("n_theta_plot", 33, Count { min: 2 }, "polar samples from 0 to pi inclusive"),
            key!("n_phi_plot", 64, Count { min: 1 }, "azimuthal samples"),
        ],
        ScenarioKind::ConditioningDemo => &[key!("fixtures", 100, Count { min: 1 }, "random fixtures")],
        ScenarioKind::InferenceSearch => &[
            key!("partitions", 200, Count { min: 0 }, "random two-time partitions"),
            key!("include_witness", true, Bool, "also scan the pre- and post-selected qutrit witness"),
            key!("bound", "stated", Choice(&["stated", "corrected"]), "which bound the assertion checks"),
        ],
        ScenarioKind::AxiomAudit => &[
            key!("fixtures", 200, Count { min: 1 }, "random fixtures"),
            key!("dims", null, OptDimList, "dimensions cycled over fixtures (null: system dim)"),
        ],
    }
}

pub(crate) fn assert_keys(kind: ScenarioKind) -> &'static [Key] {
    use Check::*;
    match kind {
        ScenarioKind::TwoSlit => &[
            key!("expected_gap", null, OptNumber, "expected additivity gap (null: report only)"),
            key!("tolerance", 1e-12, Tolerance, "allowed deviation from expected_gap"),
        ],
        ScenarioKind::PrecessionConsistency => &[
            key!("expect_weak", null, OptBool, "expected weak consistency"),
            key!("expect_full", null, OptBool, "expected full consistency"),
            key!("tolerance", 1e-12, Tolerance, "off-diagonal threshold"),
        ],
        ScenarioKind::ReproductionSweep => &[
            key!("tolerance", 1e-9, Tolerance, "max |Hilbert - phase space| on the sphere"),
            key!("torus_tolerance", 1e-12, Tolerance, "max |Hilbert - phase space| on the torus"),
        ],
        ScenarioKind::NegativityMap => &[
            key!("expected_min", null, OptNumber, "expected minimum of the map (null: report only)"),
            key!("tolerance", 1e-12, Tolerance, "allowed deviation from expected_min"),
            key!("require_negativity", true, Bool, "fail when the symbol is nowhere negative"),
        ],
        ScenarioKind::ConditioningDemo => &[
            key!("preselect_tolerance", 1e-10, Tolerance, "evidence conditioning vs state reduction"),
            key!("postselect_tolerance", 1e-12, Tolerance, "identity post-selection vs unconditioned"),
        ],
        ScenarioKind::InferenceSearch => &[
            key!("bound_tolerance", 1e-9, Tolerance, "slack on the -1/2 bound"),
            key!("identity_tolerance", 1e-10, Tolerance, "complement identity residual"),
        ],
        ScenarioKind::AxiomAudit => &[
            key!("tolerance", 1e-10, Tolerance, "worst violation allowed per axiom"),
            key!("interference_tolerance", 1e-12, Tolerance, "interference identity residual"),
        ],
    }
}

/// Checks `v` against `check`; `dim` is the system dimension.
pub(crate) fn validate(check: Check, v: &Value, dim: usize) -> Result<(), String> {
    let finite = |v: &Value| v.as_f64().filter(|x| x.is_finite());
    match check {
        Check::Count { min } => match v.as_u64() {
            Some(n) if n >= min => Ok(()),
            _ => Err(format!("expected an integer >= {min}")),
        },
        Check::Number => finite(v).map(|_| ()).ok_or_else(|| "expected a finite number".into()),
        Check::Tolerance => match finite(v) {
            Some(x) if x >= 0.0 => Ok(()),
            _ => Err("expected a non-negative number".into()),
        },
        Check::Bool => v.as_bool().map(|_| ()).ok_or_else(|| "expected true or false".into()),
        Check::OptBool => {
            if v.is_null() || v.is_boolean() {
                Ok(())
            } else {
                Err("expected true, false or null".into())
            }
        }
        Check::OptNumber => {
            if v.is_null() || finite(v).is_some() {
                Ok(())
            } else {
                Err("expected a finite number or null".into())
            }
        }
        Check::Choice(options) => match v.as_str() {
            Some(s) if options.contains(&s) => Ok(()),
            _ => Err(format!("expected one of {}", options.join(", "))),
        },
        Check::Basis => match v.as_str() {
            Some(s) => basis_projectors(s, dim).map(|_| ()),
            None => Err("expected a basis name (z, x or y)".into()),
        },
        Check::Projector => projector_from(v, dim).map(|_| ()),
        Check::OptOddDim => match v {
            Value::Null => Ok(()),
            _ => match v.as_u64() {
                Some(d) if d >= 3 && d % 2 == 1 && d <= 15 => Ok(()),
                _ => Err("expected an odd dimension between 3 and 15, or null".into()),
            },
        },
        Check::OptDimList => match v {
            Value::Null => Ok(()),
            Value::Array(items) if !items.is_empty() => {
                if items.iter().all(|d| matches!(d.as_u64(), Some(2..=9))) {
                    Ok(())
                } else {
                    Err("dimensions must be integers between 2 and 9".into())
                }
            }
            _ => Err("expected a non-empty list of dimensions or null".into()),
        },
    }
}
