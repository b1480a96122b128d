//! Moyal bracket of spin symbols and the Heisenberg flow on the sphere.

use relphase::coherence::SystemModel;
use relphase::histories::TemporalGrid;
use relphase::operator::standard::{maximally_mixed, spin_operators};
use relphase::phase_space::{build_kernels, flow_residual, moyal_bracket, wigner_symbol, PhaseSpace};

fn main() -> relphase::Result<()> {
    let two_j = 2;
    let k = build_kernels(&PhaseSpace::sphere(two_j)?)?;
    let (jx, jy, jz) = spin_operators(two_j);
    let bracket = moyal_bracket(&k, &wigner_symbol(&k, &jx)?, &wigner_symbol(&k, &jy)?)?;
    println!("max |{{Jx, Jy}} - F_Jz| = {:.2e}", bracket.max_abs_diff(&wigner_symbol(&k, &jz)?));

    let model = SystemModel::new(maximally_mixed(3), jx.clone(), TemporalGrid::new(vec![0.0])?)?;
    for dt in [1e-2, 1e-3, 1e-4, 1e-5] {
        println!("dt {dt:.0e}: flow residual {:.3e}", flow_residual(&k, &model, &jz, 0.3, dt)?);
    }
    Ok(())
}
