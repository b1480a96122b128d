//! Weak versus full consistency of a precessing spin observed along x.

use std::f64::consts::FRAC_PI_2;

use relphase::coherence::{is_consistent, ConsistencyMode, SystemModel};
use relphase::histories::{FilterHistory, TemporalGrid};
use relphase::operator::standard::{basis_state, minus_projector, pauli_hamiltonian, plus_projector};

fn main() -> relphase::Result<()> {
    let grid = TemporalGrid::new(vec![0.0, FRAC_PI_2])?;
    let model = SystemModel::new(basis_state(2, 0), pauli_hamiltonian(0.0, 0.0, 0.5), grid.clone())?;
    let x = [plus_projector(), minus_projector()];
    let mut set = Vec::new();
    for p in &x {
        for q in &x {
            set.push(FilterHistory::new(&grid, [(0, p.clone()), (1, q.clone())])?);
        }
    }
    for mode in [ConsistencyMode::Weak, ConsistencyMode::Full] {
        let report = is_consistent(&model, &set, mode, 1e-12)?;
        println!("{mode:?}: consistent {} (worst off-diagonal {:.3e})", report.consistent, report.worst_off_diagonal);
    }
    print!("{}", is_consistent(&model, &set, ConsistencyMode::Full, 1e-12)?.to_text());
    Ok(())
}
