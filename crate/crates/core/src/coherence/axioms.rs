use std::fmt::Write as _;

use serde::Serialize;

use super::{Functional, SystemModel};
use crate::error::Result;
use crate::histories::{disjoint, operationally_additive, FilterHistory, HistoryProposition};
use crate::operator::{Operator, C64};

/// Result of one axiom over every applicable input.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomOutcome {
    pub id: u8,
    pub name: String,
    pub checks: usize,
    pub worst_violation: f64,
    pub passed: bool,
    /// Description of the input that produced the worst violation.
    pub witness: Option<String>,
}

impl AxiomOutcome {
    fn new(id: u8, name: &str) -> Self {
        AxiomOutcome { id, name: name.into(), checks: 0, worst_violation: 0.0, passed: true, witness: None }
    }

    fn record(&mut self, violation: f64, witness: impl FnOnce() -> String) {
        self.checks += 1;
        if violation > self.worst_violation {
            self.worst_violation = violation;
            self.witness = Some(witness());
        }
    }

    fn finish(mut self, tol: f64) -> Self {
        self.passed = self.worst_violation <= tol;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub tolerance: f64,
    /// Axioms 1 to 7 in order.
    pub axioms: Vec<AxiomOutcome>,
    /// Subadditivity restricted to sums that merge the filters at the
    /// latest support time.
    pub subadditivity_final_slot: AxiomOutcome,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.axioms.iter().all(|a| a.passed)
    }

    pub fn axiom(&self, id: u8) -> &AxiomOutcome {
        &self.axioms[usize::from(id) - 1]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("tolerance {:e}\n", self.tolerance);
        for a in self.axioms.iter().chain(std::iter::once(&self.subadditivity_final_slot)) {
            let _ = writeln!(
                out,
                "{} {:<28} {:>6} checks  worst {:.3e}  {}",
                a.id,
                a.name,
                a.checks,
                a.worst_violation,
                if a.passed { "pass" } else { "FAIL" }
            );
        }
        out
    }
}

/// Runs the seven axioms against the model's functional.
pub fn axiom_suite(
    model: &SystemModel,
    histories: &[FilterHistory],
    propositions: &[HistoryProposition],
    tol: f64,
) -> Result<AxiomReport> {
    axiom_suite_for(&model.functional(), histories, propositions, tol)
}

/// [`axiom_suite`] for an arbitrary (possibly post-selected) functional.
pub fn axiom_suite_for(
    f: &Functional,
    histories: &[FilterHistory],
    propositions: &[HistoryProposition],
    tol: f64,
) -> Result<AxiomReport> {
    let grid = f.model().grid();
    let dim = f.model().dim();
    let h_ops = histories.iter().map(|h| f.class_operator(h)).collect::<Result<Vec<_>>>()?;
    let p_ops = propositions.iter().map(|p| f.class_operator(p)).collect::<Result<Vec<_>>>()?;
    let label = |i: usize| if i < histories.len() { format!("history {i}") } else { format!("proposition {}", i - histories.len()) };
    let all: Vec<&Operator> = h_ops.iter().chain(&p_ops).collect();
    let n = all.len();
    let mut d = vec![vec![C64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            d[i][j] = f.pair(all[i], all[j])?;
        }
    }

    let mut ax1 = AxiomOutcome::new(1, "positivity");
    for i in 0..n {
        ax1.record((-d[i][i].re).max(0.0), || label(i));
    }

    let mut ax2 = AxiomOutcome::new(2, "normalisation");
    let one = f.class_operator(&FilterHistory::trivial(grid))?;
    ax2.record((f.pair(&one, &one)? - 1.0).norm(), || "trivial history".into());

    let mut ax3 = AxiomOutcome::new(3, "hermiticity");
    for i in 0..n {
        for j in i..n {
            ax3.record((d[i][j] - d[j][i].conj()).norm(), || format!("{} / {}", label(i), label(j)));
        }
    }

    let mut ax4 = AxiomOutcome::new(4, "additivity");
    for i in 0..histories.len() {
        for j in i + 1..histories.len() {
            if !disjoint(&histories[i], &histories[j])? {
                continue;
            }
            let sum = h_ops[i].add(&h_ops[j])?;
            let merged = operationally_additive(&histories[i], &histories[j])?
                .filter(|s| s.support() == histories[i].support())
                .map(|s| f.class_operator(&s))
                .transpose()?;
            for (g, cg) in all.iter().enumerate() {
                let v = (f.pair(&sum, cg)? - d[i][g] - d[j][g]).norm();
                ax4.record(v, || format!("{} + {} against {}", label(i), label(j), label(g)));
                if let Some(cm) = &merged {
                    let v = (f.pair(cm, cg)? - d[i][g] - d[j][g]).norm();
                    ax4.record(v, || format!("merged {} + {} against {}", label(i), label(j), label(g)));
                }
            }
        }
    }
    for (k, p) in propositions.iter().enumerate() {
        let terms = p.terms().iter().map(|t| f.class_operator(t)).collect::<Result<Vec<_>>>()?;
        for (g, cg) in all.iter().enumerate() {
            let mut parts = C64::new(0.0, 0.0);
            for t in &terms {
                parts += f.pair(t, cg)?;
            }
            let i = histories.len() + k;
            ax4.record((d[i][g] - parts).norm(), || format!("{} split into terms against {}", label(i), label(g)));
        }
    }

    let mut ax5 = AxiomOutcome::new(5, "triviality");
    let zero = f.class_operator(&FilterHistory::opaque(grid, dim))?;
    for (i, c) in all.iter().enumerate() {
        ax5.record(f.pair(&zero, c)?.norm(), || format!("opaque against {}", label(i)));
    }

    let mut ax6 = AxiomOutcome::new(6, "boundedness");
    for i in 0..histories.len() {
        for j in 0..histories.len() {
            ax6.record((d[i][j].norm() - 1.0).max(0.0), || format!("{} / {}", label(i), label(j)));
        }
    }

    let mut ax7 = AxiomOutcome::new(7, "subadditivity");
    let mut ax7_final = AxiomOutcome::new(7, "subadditivity (final slot)");
    for i in 0..histories.len() {
        for j in 0..histories.len() {
            if i == j || !disjoint(&histories[i], &histories[j])? {
                continue;
            }
            let Some(sum) = operationally_additive(&histories[i], &histories[j])? else {
                continue;
            };
            let cs = f.class_operator(&sum)?;
            let big = f.pair(&cs, &cs)?.norm();
            let v = (d[i][i].norm() - big).max(0.0);
            let witness = || format!("|d| of {} = {:.6} exceeds |d| of its sum with {} = {:.6}", label(i), d[i][i].norm(), label(j), big);
            ax7.record(v, witness);
            if merges_final_slot(&histories[i], &sum) {
                ax7_final.record(v, witness);
            }
        }
    }

    Ok(AxiomReport {
        tolerance: tol,
        axioms: vec![
            ax1.finish(tol),
            ax2.finish(tol),
            ax3.finish(tol),
            ax4.finish(tol),
            ax5.finish(tol),
            ax6.finish(tol),
            ax7.finish(tol),
        ],
        subadditivity_final_slot: ax7_final.finish(tol),
    })
}

/// The sum keeps the support of `a` and differs from it only at the latest time.
fn merges_final_slot(a: &FilterHistory, sum: &FilterHistory) -> bool {
    let support = a.support();
    let Some(&last) = support.iter().next_back() else {
        return false;
    };
    sum.support().is_subset(&support)
        && support.iter().filter(|&&i| i != last).all(|&i| match (a.filter(i), sum.filter(i)) {
            (Some(p), Some(q)) => p.approx_eq(q, crate::operator::TAU_H),
            _ => false,
        })
}
