//! Slit intensities, their interference term and the additivity gap.

use relphase::coherence::{additivity_gap, interference, SystemModel};
use relphase::histories::{FilterHistory, TemporalGrid};
use relphase::operator::standard::{ket0_projector, ket1_projector, plus_projector, zero_hamiltonian};
use relphase::operator::{ObservableSpec, Operator, Role};

fn main() -> relphase::Result<()> {
    let grid = TemporalGrid::new(vec![0.0, 1.0])?;
    let rho = Operator::with_role(plus_projector().into_matrix(), Role::Density)?;
    let model = SystemModel::new(rho, zero_hamiltonian(2), grid.clone())?;
    let screen = plus_projector();

    let upper = FilterHistory::at_times(&grid, [(0.0, ket0_projector()), (1.0, screen.clone())])?;
    let lower = FilterHistory::at_times(&grid, [(0.0, ket1_projector()), (1.0, screen.clone())])?;
    let both = FilterHistory::at_times(&grid, [(1.0, screen.clone())])?;
    let f = model.functional();
    println!("upper slit  {:.6}", f.intensity(&upper)?);
    println!("lower slit  {:.6}", f.intensity(&lower)?);
    println!("both open   {:.6}", f.intensity(&both)?);
    println!("2 Re d      {:.6}", interference(&model, &upper, &lower)?);

    let slits = ObservableSpec::new(vec![0.0, 1.0], vec![ket0_projector(), ket1_projector()])?;
    println!("gap         {:.6}", additivity_gap(&model, &slits, 0.0, &screen, 1.0)?);
    Ok(())
}
