//! Statistical (filter-based) against closed-time-path correlations.

use relphase::coherence::{quantum_correlation, statistical_correlation, SystemModel};
use relphase::histories::TemporalGrid;
use relphase::operator::standard::{basis_state, pauli_hamiltonian, sigma_z, spin_operators};
use relphase::operator::ObservableSpec;
use relphase::random;

fn main() -> relphase::Result<()> {
    let sz = sigma_z();
    for dt in [0.5, 1.0, 2.0] {
        let grid = TemporalGrid::new(vec![0.0, dt])?;
        let model = SystemModel::new(basis_state(2, 0), pauli_hamiltonian(0.5, 0.0, 0.0), grid)?;
        let s = statistical_correlation(&model, &ObservableSpec::from_hermitian(&sz)?, 0.0, dt)?;
        let q = quantum_correlation(&model, &sz, &[0.0], &[dt])?.value;
        println!("qubit sz, dt {dt}: statistical {s:+.6}  quantum {:+.6} {:+.6}i  cos {:+.6}", q.re, q.im, dt.cos());
    }

    let mut rng = random::rng(4);
    let (jx, _, jz) = spin_operators(2);
    let grid = TemporalGrid::new(vec![0.0, 0.7])?;
    let model = SystemModel::new(random::density(&mut rng, 3), jx, grid)?;
    let s = statistical_correlation(&model, &ObservableSpec::from_hermitian(&jz)?, 0.0, 0.7)?;
    let q = quantum_correlation(&model, &jz, &[0.0], &[0.7])?.value;
    println!("spin-1 Jz: statistical {s:+.6}  quantum {:+.6} {:+.6}i", q.re, q.im);
    Ok(())
}
