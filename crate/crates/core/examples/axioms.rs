//! The seven coherence axioms on a random qutrit fixture.

use relphase::coherence::{axiom_suite, SystemModel};
use relphase::histories::{FilterHistory, HistoryProposition, TemporalGrid};
use relphase::random;

fn main() -> relphase::Result<()> {
    let mut rng = random::rng(3);
    let grid = TemporalGrid::new(vec![0.0, 0.5, 1.0])?;
    let model = SystemModel::new(random::density(&mut rng, 3), random::hamiltonian(&mut rng, 3, 1.0), grid.clone())?;
    let first = random::projective_basis(&mut rng, 3);
    let second = random::projective_basis(&mut rng, 3);
    let mut hs = Vec::new();
    for p in &first {
        for q in &second {
            hs.push(FilterHistory::new(&grid, [(0, p.clone()), (2, q.clone())])?);
        }
    }
    hs.push(FilterHistory::new(&grid, [(1, random::projector(&mut rng, 3, 1))])?);
    let props = vec![HistoryProposition::new(&grid, hs[..3].to_vec())?];
    let report = axiom_suite(&model, &hs, &props, 1e-10)?;
    print!("{}", report.to_text());
    Ok(())
}
