//! Conditioning on initial evidence, state reduction and post-selection.

use relphase::coherence::{condition, postselect, preselect, SystemModel};
use relphase::histories::{FilterHistory, TemporalGrid};
use relphase::operator::Operator;
use relphase::random;

fn main() -> relphase::Result<()> {
    let mut rng = random::rng(9);
    let grid = TemporalGrid::new(vec![0.0, 0.5, 1.0])?;
    let model = SystemModel::new(random::density(&mut rng, 3), random::hamiltonian(&mut rng, 3, 1.0), grid.clone())?;
    let p = random::projector(&mut rng, 3, 2);
    let evidence = FilterHistory::new(&grid, [(0, p.clone())])?;
    let a = FilterHistory::new(&grid, [(1, random::projector(&mut rng, 3, 1))])?;
    let b = FilterHistory::new(&grid, [(2, random::projector(&mut rng, 3, 1))])?;

    let conditioned = condition(&model, &evidence, &a, &b)?.value;
    let reduced = preselect(&model, &p, 0.0)?.functional().evaluate(&a, &b)?;
    println!("conditioned on evidence  {conditioned:.12}");
    println!("reduced state            {reduced:.12}");

    let plain = model.functional().evaluate(&a, &b)?;
    let neutral = postselect(&model, &Operator::identity(3), 1.0, &a, &b)?.value;
    let q = random::projector(&mut rng, 3, 1);
    println!("unconditioned            {plain:.12}");
    println!("post-selected on 1       {neutral:.12}");
    println!("post-selected on Q       {:.12}", postselect(&model, &q, 1.0, &a, &b)?.value);
    Ok(())
}
