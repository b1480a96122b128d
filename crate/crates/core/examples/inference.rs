//! Scanning partitions for incompatible inferences, including the three-box case.

use relphase::coherence::{inference_scan, three_box_witness, InferencePartition, SystemModel};
use relphase::histories::TemporalGrid;
use relphase::random;

fn main() -> relphase::Result<()> {
    let mut rng = random::rng(2);
    let grid = TemporalGrid::new(vec![0.0, 1.0])?;
    let model = SystemModel::new(random::pure_density(&mut rng, 3), random::hamiltonian(&mut rng, 3, 1.0), grid.clone())?;
    let parts = (0..50).map(|_| InferencePartition::random(&mut rng, &grid, 3)).collect::<Result<Vec<_>, _>>()?;
    print!("random partitions: {}", inference_scan(&model.functional(), &parts, 1e-9)?.to_text());

    let (f, witness) = three_box_witness()?;
    let report = inference_scan(&f, &[witness], 1e-9)?;
    print!("three-box witness: {}", report.to_text());
    println!("stated bound holds {}  corrected bound holds {}", report.stated_bound_holds(), report.corrected_bound_holds());
    Ok(())
}
