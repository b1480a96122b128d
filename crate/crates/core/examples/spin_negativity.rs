//! Wigner symbol of the spin-up projector: pole values, negativity and sharpness.

use std::f64::consts::PI;

use relphase::operator::standard::basis_projector;
use relphase::phase_space::{build_kernels, sharpness_report, sphere_symbol_at, PhaseSpace};

fn main() -> relphase::Result<()> {
    for two_j in 1..=4 {
        let up = basis_projector(two_j + 1, 0);
        let c = (two_j + 1) as f64 / (4.0 * PI);
        let north = sphere_symbol_at(two_j, &up, 0.0, 0.0)?.re;
        let south = sphere_symbol_at(two_j, &up, PI, 0.0)?.re;
        let k = build_kernels(&PhaseSpace::sphere(two_j)?)?;
        let s = sharpness_report(&k, &up)?;
        println!(
            "j = {}/2  north {north:+.6} ({:+.6} scaled)  south {south:+.6} ({:+.6} scaled)  negative fraction {:.3}  |F^2 - F| {:.3}",
            two_j,
            c * north,
            c * south,
            s.negativity_fraction,
            s.idempotency_defect
        );
    }
    println!("(1 +- sqrt 3)/(4 pi) = {:+.6} / {:+.6}", (1.0 + 3f64.sqrt()) / (4.0 * PI), (1.0 - 3f64.sqrt()) / (4.0 * PI));
    Ok(())
}
