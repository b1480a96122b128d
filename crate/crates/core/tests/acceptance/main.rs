//! Integration suite. `acceptance_criteria` prints one PASS/FAIL line per
//! acceptance criterion; run with `--nocapture` to see them.

mod cli;
mod common;
mod properties;

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;

use common::{c, class_operator, d, heisenberg, pair};
use nalgebra::DMatrix;
use rand::Rng;
use relphase::coherence::{
    additivity_gap, condition, inference_scan, preselect, quantum_correlation, statistical_correlation,
    three_box_witness, Functional, InferencePartition, SystemModel,
};
use relphase::histories::{FilterHistory, TemporalGrid};
use relphase::operator::standard::{basis_projector, pauli_hamiltonian, plus_projector, sigma_z, spin_operators};
use relphase::operator::{ObservableSpec, Operator, Role, C64};
use relphase::phase_space::{
    build_kernels, flow_residual, moyal_bracket, phase_space_value, sharpness_report, sphere_symbol_at, wigner_symbol,
    PhaseSpace,
};
use relphase::random::{self, FixtureRng};
use relphase::scenarios::{execute, parse_config};

struct Line {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn line(name: &'static str, passed: bool, detail: String) -> Line {
    Line { name, passed, detail }
}

fn random_history(rng: &mut FixtureRng, grid: &TemporalGrid, dim: usize, slots: &[usize], order: usize) -> FilterHistory {
    let mut chosen: Vec<usize> = slots.to_vec();
    while chosen.len() > order {
        chosen.remove(rng.random_range(0..chosen.len()));
    }
    let filters = chosen.into_iter().map(|t| {
        let rank = rng.random_range(1..dim);
        (t, random::projector(rng, dim, rank))
    });
    FilterHistory::new(grid, filters.collect::<Vec<_>>()).unwrap()
}

fn axiom_suite() -> Line {
    let cfg = parse_config("scenario = \"axiom_audit\"\nseed = 1\n[params]\nfixtures = 200\ndims = [2, 3]\n").unwrap();
    let report = execute(&cfg).unwrap();
    let axioms = report.detail["axioms"].as_array().unwrap();
    let worst: Vec<String> = axioms
        .iter()
        .map(|a| format!("{}:{:.1e}", a["id"].as_str().unwrap(), a["worst_violation"].as_f64().unwrap()))
        .collect();
    let all_below = axioms.iter().all(|a| a["worst_violation"].as_f64().unwrap() < 1e-10);
    let ident = report.summary["worst_interference_identity"].as_f64().unwrap();
    let final_slot = report.summary["worst_axiom_7f"].as_f64().unwrap();
    line(
        "axiom suite (200 fixtures, dims 2 and 3)",
        all_below && ident <= 1e-12,
        format!("worst per axiom [{}], final-slot subadditivity {final_slot:.1e}, interference identity {ident:.1e}", worst.join(" ")),
    )
}

fn two_slit() -> Line {
    // rho = |+><+|, H = 0, slits |k><k| at t = 0, screen |+><+| at t = 1:
    // d(slit_k, slit_k) = |<+|k>|^2 |<k|+>|^2 = 1/4, d(screen, screen) = 1.
    let oracle_slit = 0.5 * 0.5;
    let oracle_screen = 1.0;
    let oracle_gap = 2.0 * oracle_slit - oracle_screen;

    let grid = TemporalGrid::new(vec![0.0, 1.0]).unwrap();
    let plus = Operator::with_role(plus_projector().into_matrix(), Role::Density).unwrap();
    let model = SystemModel::new(plus, Operator::zeros(2), grid).unwrap();
    let slits = ObservableSpec::new(vec![0.0, 1.0], vec![basis_projector(2, 0), basis_projector(2, 1)]).unwrap();
    let gap = additivity_gap(&model, &slits, 0.0, &plus_projector(), 1.0).unwrap();
    let cfg = parse_config("scenario = \"two_slit\"\n").unwrap();
    let scenario_gap = execute(&cfg).unwrap().summary["additivity_gap"].as_f64().unwrap();
    let err = (gap - oracle_gap).abs().max((scenario_gap - oracle_gap).abs());
    line("two-slit additivity gap", err <= 1e-12, format!("gap {gap}, scenario {scenario_gap}, oracle {oracle_gap}"))
}

fn reproduction() -> Line {
    let mut rng = random::rng(20);
    let grid = TemporalGrid::new(vec![0.0, 0.4, 0.9]).unwrap();
    let slots = [0, 1, 2];
    let mut worst = [0.0_f64; 2];
    let mut oracle_worst = 0.0_f64;
    let spaces = [PhaseSpace::sphere(1).unwrap(), PhaseSpace::qudit_torus(3).unwrap()];
    for (s, space) in spaces.iter().enumerate() {
        let k = build_kernels(space).unwrap();
        let dim = space.dim();
        for _ in 0..100 {
            let model = SystemModel::new(random::density(&mut rng, dim), random::hamiltonian(&mut rng, dim, 1.0), grid.clone()).unwrap();
            let (n, m) = (rng.random_range(1..=2), rng.random_range(1..=2));
            let a = random_history(&mut rng, &grid, dim, &slots, n);
            let b = random_history(&mut rng, &grid, dim, &slots, m);
            let hilbert = model.functional().evaluate(&a, &b).unwrap();
            let ps = phase_space_value(&model, &k, &a, &b).unwrap();
            let dense = d(model.rho(), model.hamiltonian(), &a, &b);
            worst[s] = worst[s].max((ps - hilbert).norm());
            oracle_worst = oracle_worst.max((dense - hilbert).norm());
        }
    }
    line(
        "phase-space reproduction (100 pairs each, sphere j=1/2 and torus d=3)",
        worst[0] < 1e-9 && worst[1] < 1e-12 && oracle_worst < 1e-12,
        format!("sphere {:.1e}, torus {:.1e}, Hilbert vs dense oracle {oracle_worst:.1e}", worst[0], worst[1]),
    )
}

fn kernel_identities() -> Line {
    let mut rng = random::rng(21);
    let mut trace_err = 0.0_f64;
    let mut pairing_err = 0.0_f64;
    for two_j in 1..=8 {
        let space = PhaseSpace::sphere(two_j).unwrap();
        let k = build_kernels(&space).unwrap();
        let dim = two_j + 1;
        let cst = k.pairing_constant();
        let mut sum = DMatrix::<C64>::zeros(dim, dim);
        for (x, w) in space.weights().iter().enumerate() {
            let delta = k.delta(x);
            trace_err = trace_err.max((delta.trace() - 1.0).norm());
            sum += delta.matrix() * c(cst * w, 0.0);
        }
        trace_err = trace_err.max((sum - DMatrix::identity(dim, dim)).iter().map(|z| z.norm()).fold(0.0, f64::max));
        let a = random::hamiltonian(&mut rng, dim, 1.0);
        let b = random::hamiltonian(&mut rng, dim, 1.0);
        let (fa, fb) = (wigner_symbol(&k, &a).unwrap(), wigner_symbol(&k, &b).unwrap());
        let integral: C64 = fa.values().iter().zip(fb.values()).zip(space.weights()).map(|((x, y), w)| x * y * *w).sum::<C64>() * cst;
        pairing_err = pairing_err.max((integral - a.trace_product(&b).unwrap()).norm());
    }
    let mut torus_err = 0.0_f64;
    for dq in [3, 5, 7] {
        let space = PhaseSpace::qudit_torus(dq).unwrap();
        let k = build_kernels(&space).unwrap();
        for x in 0..k.node_count() {
            let dx = k.delta(x);
            torus_err = torus_err.max((dx.trace() - 1.0).norm());
            for y in 0..k.node_count() {
                let expected = if x == y { dq as f64 } else { 0.0 };
                torus_err = torus_err.max((dx.trace_product(&k.delta(y)).unwrap() - expected).norm());
            }
        }
        let a = random::hamiltonian(&mut rng, dq, 1.0);
        let b = random::hamiltonian(&mut rng, dq, 1.0);
        let (fa, fb) = (wigner_symbol(&k, &a).unwrap(), wigner_symbol(&k, &b).unwrap());
        let integral: C64 = fa.values().iter().zip(fb.values()).map(|(x, y)| x * y).sum::<C64>() * k.pairing_constant();
        pairing_err = pairing_err.max((integral - a.trace_product(&b).unwrap()).norm());
    }
    line(
        "kernel identities (spin 1/2 to 4, torus 3, 5, 7)",
        trace_err <= 1e-10 && pairing_err <= 1e-10 && torus_err <= 1e-12,
        format!("trace {trace_err:.1e}, pairing {pairing_err:.1e}, torus Tr and Tr(DD') {torus_err:.1e}"),
    )
}

fn spin_symbol() -> Line {
    let up = basis_projector(2, 0);
    let cst = 2.0 / (4.0 * PI);
    let north = sphere_symbol_at(1, &up, 0.0, 0.0).unwrap().re * cst;
    let south = sphere_symbol_at(1, &up, PI, 0.0).unwrap().re * cst;
    let s3 = 3.0_f64.sqrt();
    let err = (north - (1.0 + s3) / (4.0 * PI)).abs().max((south - (1.0 - s3) / (4.0 * PI)).abs());
    let k = build_kernels(&PhaseSpace::sphere(1).unwrap()).unwrap();
    let neg = sharpness_report(&k, &up).unwrap().negativity_fraction;
    line("spin-up symbol at the poles", err <= 1e-12 && neg > 0.0, format!("north {north:.15}, south {south:.15}, negative measure fraction {neg:.3}"))
}

fn conditioning() -> Line {
    let mut rng = random::rng(22);
    let grid = TemporalGrid::new(vec![0.0, 0.5, 1.0]).unwrap();
    let mut pre = 0.0_f64;
    let mut via_model = 0.0_f64;
    let mut post = 0.0_f64;
    let mut done = 0;
    while done < 100 {
        let dim = 2 + done % 2;
        let model = SystemModel::new(random::density(&mut rng, dim), random::hamiltonian(&mut rng, dim, 1.0), grid.clone()).unwrap();
        let p = random::projector(&mut rng, dim, 1);
        let evidence = FilterHistory::new(&grid, [(0, p.clone())]).unwrap();
        let a = random_history(&mut rng, &grid, dim, &[1, 2], 2);
        let b = random_history(&mut rng, &grid, dim, &[1, 2], 1);
        let tr = (model.rho().matrix() * p.matrix()).trace().re;
        if tr < 1e-6 {
            continue;
        }
        let reduced = p.matrix() * model.rho().matrix() * p.matrix() / c(tr, 0.0);
        let h = model.hamiltonian().matrix();
        let oracle = pair(&reduced, &class_operator(&a, h), &class_operator(&b, h));
        let conditioned = condition(&model, &evidence, &a, &b).unwrap().value;
        let reduced_model = preselect(&model, &p, 0.0).unwrap();
        pre = pre.max((conditioned - oracle).norm());
        via_model = via_model.max((reduced_model.functional().evaluate(&a, &b).unwrap() - oracle).norm());
        let identity = Functional::postselected(&model, &Operator::identity(dim), 1.0).unwrap();
        post = post.max((identity.evaluate(&a, &b).unwrap() - model.functional().evaluate(&a, &b).unwrap()).norm());
        done += 1;
    }
    line(
        "conditioning and post-selection (100 fixtures)",
        pre <= 1e-10 && via_model <= 1e-10 && post <= 1e-12,
        format!("evidence vs reduction {pre:.1e}, reduced model {via_model:.1e}, identity post-selection {post:.1e}"),
    )
}

fn correlations() -> Line {
    let sz = sigma_z();
    let obs = ObservableSpec::from_hermitian(&sz).unwrap();
    let h = pauli_hamiltonian(0.5, 0.0, 0.0);
    let zero = Operator::with_role(basis_projector(2, 0).into_matrix(), Role::Density).unwrap();
    let mut stat_err = 0.0_f64;
    let mut imag = 0.0_f64;
    for dt in [0.3, 1.0, 2.5] {
        let grid = TemporalGrid::new(vec![0.0, dt]).unwrap();
        let model = SystemModel::new(zero.clone(), h.clone(), grid.clone()).unwrap();
        let s = statistical_correlation(&model, &obs, 0.0, dt).unwrap();
        let mut brute = c(0.0, 0.0);
        for (li, pi) in obs.eigenvalues().iter().zip(obs.filters()) {
            for (lj, pj) in obs.eigenvalues().iter().zip(obs.filters()) {
                let alpha = FilterHistory::new(&grid, [(0, pi.clone()), (1, pj.clone())]).unwrap();
                brute += d(model.rho(), model.hamiltonian(), &alpha, &alpha) * (li * lj);
                imag = imag.max(model.functional().evaluate(&alpha, &alpha).unwrap().im.abs());
            }
        }
        stat_err = stat_err.max((s - dt.cos()).abs()).max((brute - s).norm());
        imag = imag.max(brute.im.abs());
    }

    let mut rng = random::rng(23);
    let mut ctp = 0.0_f64;
    for n in 0..50 {
        let dim = 2 + n % 3;
        let grid = TemporalGrid::new(vec![0.0]).unwrap();
        let model = SystemModel::new(random::density(&mut rng, dim), random::hamiltonian(&mut rng, dim, 1.0), grid).unwrap();
        let a = random::hamiltonian(&mut rng, dim, 1.0);
        let (t1, t2) = (rng.random_range(0.0..2.0), rng.random_range(0.0..2.0));
        let q = quantum_correlation(&model, &a, &[t1], &[t2]).unwrap().value;
        let hm = model.hamiltonian().matrix();
        let oracle = (model.rho().matrix() * heisenberg(a.matrix(), hm, t1) * heisenberg(a.matrix(), hm, t2)).trace();
        ctp = ctp.max((q - oracle).norm());
    }

    let (jx, _, jz) = spin_operators(2);
    let grid = TemporalGrid::new(vec![0.0, 0.7]).unwrap();
    let rho = random::density(&mut rng, 3);
    let model = SystemModel::new(rho, jx, grid).unwrap();
    let s = statistical_correlation(&model, &ObservableSpec::from_hermitian(&jz).unwrap(), 0.0, 0.7).unwrap();
    let q = quantum_correlation(&model, &jz, &[0.0], &[0.7]).unwrap().value.re;
    let split = (q - s).abs();
    line(
        "statistical vs quantum correlation",
        stat_err <= 1e-10 && imag <= 1e-12 && ctp <= 1e-12 && split > 1e-6,
        format!("precession vs cos {stat_err:.1e}, max |Im| {imag:.1e}, CTP vs dense {ctp:.1e}, spin-1 Jz split {split:.3e}"),
    )
}

fn moyal() -> Line {
    let mut algebra = 0.0_f64;
    let mut flow = 0.0_f64;
    for two_j in 1..=4 {
        let space = PhaseSpace::sphere(two_j).unwrap();
        let k = build_kernels(&space).unwrap();
        let (jx, jy, jz) = spin_operators(two_j);
        let j = two_j as f64 / 2.0;
        let fx = wigner_symbol(&k, &jx).unwrap();
        let fy = wigner_symbol(&k, &jy).unwrap();
        let bracket = moyal_bracket(&k, &fx, &fy).unwrap();
        for (x, v) in bracket.values().iter().enumerate() {
            let n = space.direction(x).unwrap();
            algebra = algebra.max((v - (j * (j + 1.0)).sqrt() * n[2]).norm());
        }
        let grid = TemporalGrid::new(vec![0.0]).unwrap();
        let rho = Operator::with_role(Operator::identity(two_j + 1).scale(c(1.0 / (two_j + 1) as f64, 0.0)).into_matrix(), Role::Density).unwrap();
        let model = SystemModel::new(rho, jx.add(&jz.scale(c(0.3, 0.0))).unwrap(), grid).unwrap();
        flow = flow.max(flow_residual(&k, &model, &jz, 0.4, 1e-5).unwrap());
    }
    line(
        "Moyal bracket and Heisenberg flow (spin 1/2 to 2)",
        algebra <= 1e-12 && flow <= 1e-4,
        format!("{{Jx, Jy}} vs sqrt(j(j+1)) n_z {algebra:.1e}, flow residual at dt 1e-5 {flow:.1e}"),
    )
}

fn inference() -> Line {
    let mut rng = random::rng(24);
    let grid = TemporalGrid::new(vec![0.0, 1.0]).unwrap();
    let mut hits = Vec::new();
    let mut scanned = 0;
    for n in 0..200 {
        let dim = 2 + n % 3;
        let model = SystemModel::new(random::pure_density(&mut rng, dim), random::hamiltonian(&mut rng, dim, 1.0), grid.clone()).unwrap();
        let part = InferencePartition::random(&mut rng, &grid, dim).unwrap();
        let report = inference_scan(&model.functional(), &[part], 1e-9).unwrap();
        scanned += report.scanned;
        hits.extend(report.hits);
    }
    let (witness_f, witness_part) = three_box_witness().unwrap();
    let report = inference_scan(&witness_f, &[witness_part], 1e-9).unwrap();
    scanned += report.scanned;
    hits.extend(report.hits);
    let worst_gamma = hits.iter().map(|h| h.re_d_alpha_gamma).fold(f64::NEG_INFINITY, f64::max);
    let worst_beta = hits.iter().map(|h| h.re_d_alpha_beta).fold(f64::NEG_INFINITY, f64::max);
    let ident = hits.iter().map(|h| h.identity_residual).fold(0.0, f64::max);
    let bound = hits.iter().all(|h| h.re_d_alpha_gamma <= -0.5 + 1e-9);
    line(
        "inference bound Re d(alpha, gamma) <= -1/2",
        bound && ident <= 1e-10,
        format!(
            "{scanned} partitions, {} hits, largest Re d(a,g) {worst_gamma:+.6}, largest Re d(a,b) {worst_beta:+.6}, identity residual {ident:.1e}",
            hits.len()
        ),
    )
}

fn run_cli(config: &Path, out: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_relphase"))
        .arg("run")
        .arg(config)
        .arg("--output-dir")
        .arg(out)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

fn without_timings(path: &Path) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_slice(&fs::read(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("timings");
    v
}

fn determinism() -> Line {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut paths: Vec<_> = fs::read_dir(&configs).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    let (one, two) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for p in &paths {
        let codes = (run_cli(p, one.path()), run_cli(p, two.path()));
        if codes.0 != codes.1 || codes.0 == 1 {
            mismatches.push(format!("{} exit {:?}", p.display(), codes));
        }
    }
    for dir in fs::read_dir(one.path()).unwrap() {
        let dir = dir.unwrap().path();
        let twin = two.path().join(dir.file_name().unwrap());
        for f in fs::read_dir(&dir).unwrap() {
            let f = f.unwrap().path();
            let g = twin.join(f.file_name().unwrap());
            let same = if f.file_name().unwrap() == "manifest.json" {
                without_timings(&f) == without_timings(&g)
            } else {
                fs::read(&f).unwrap() == fs::read(&g).unwrap()
            };
            compared += 1;
            if !same {
                mismatches.push(f.display().to_string());
            }
        }
    }
    line(
        "CLI determinism (every shipped config, two runs)",
        mismatches.is_empty() && compared > 0,
        format!("{} configs, {compared} files compared, mismatches {mismatches:?}", paths.len()),
    )
}

#[test]
fn acceptance_criteria() {
    let lines = [
        axiom_suite(),
        two_slit(),
        reproduction(),
        kernel_identities(),
        spin_symbol(),
        conditioning(),
        correlations(),
        moyal(),
        inference(),
        determinism(),
    ];
    println!();
    for l in &lines {
        println!("{} {}: {}", if l.passed { "PASS" } else { "FAIL" }, l.name, l.detail);
    }
    let failed: Vec<&str> = lines.iter().filter(|l| !l.passed).map(|l| l.name).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
