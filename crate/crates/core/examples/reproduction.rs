//! The same coherence computed in Hilbert space and as a phase-space integral.

use relphase::coherence::SystemModel;
use relphase::histories::{FilterHistory, TemporalGrid};
use relphase::phase_space::{build_kernels, build_w, history_symbol, phase_space_coherence, PhaseSpace};
use relphase::random;

fn main() -> relphase::Result<()> {
    let mut rng = random::rng(5);
    let grid = TemporalGrid::new(vec![0.0, 0.6, 1.1])?;
    for space in [PhaseSpace::sphere(1)?, PhaseSpace::sphere(2)?, PhaseSpace::qudit_torus(3)?] {
        let dim = space.dim();
        let k = build_kernels(&space)?;
        let model = SystemModel::new(random::density(&mut rng, dim), random::hamiltonian(&mut rng, dim, 1.0), grid.clone())?;
        let a = FilterHistory::new(&grid, [(0, random::projector(&mut rng, dim, 1)), (2, random::projector(&mut rng, dim, 1))])?;
        let b = FilterHistory::new(&grid, [(1, random::projector(&mut rng, dim, 1))])?;

        let (fa, fb) = (history_symbol(&k, &a)?, history_symbol(&k, &b)?);
        let w = build_w(&model, &k, fa.times(), fb.times())?;
        let ps = phase_space_coherence(&w, &fa, &fb)?;
        let hilbert = model.functional().evaluate(&a, &b)?;
        println!(
            "{:?} ({} nodes): Hilbert {:+.12} {:+.12}i   phase space {:+.12} {:+.12}i   |diff| {:.1e}",
            space.kind(),
            space.node_count(),
            hilbert.re,
            hilbert.im,
            ps.re,
            ps.im,
            (ps - hilbert).norm()
        );
    }
    Ok(())
}
