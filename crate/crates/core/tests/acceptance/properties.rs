use proptest::prelude::*;
use rand::Rng;
use relphase::coherence::{condition, quantum_correlation, statistical_correlation, SystemModel};
use relphase::histories::{finer_than, meet, operationally_additive, FilterHistory, TemporalGrid};
use relphase::operator::{heisenberg_filter, matrix_exponential, tensor_product, ObservableSpec, Operator, Role, C64};
use relphase::phase_space::{build_kernels, build_w, phase_space_value, wigner_symbol, PhaseSpace};
use relphase::random::{self, FixtureRng};
use relphase::scenarios::{emit_config, parse_config, ScenarioKind};

use crate::common::{c, class_operator, pair};

fn cfg() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

fn grid3() -> TemporalGrid {
    TemporalGrid::new(vec![0.0, 0.5, 1.2]).unwrap()
}

fn model(rng: &mut FixtureRng, dim: usize, grid: &TemporalGrid) -> SystemModel {
    SystemModel::new(random::density(rng, dim), random::hamiltonian(rng, dim, 1.0), grid.clone()).unwrap()
}

/// Random history with a random nonempty support and random projectors.
fn history(rng: &mut FixtureRng, grid: &TemporalGrid, dim: usize) -> FilterHistory {
    let mut filters = Vec::new();
    while filters.is_empty() {
        for t in 0..grid.len() {
            if rng.random_bool(0.6) {
                let rank = rng.random_range(1..dim);
                filters.push((t, random::projector(rng, dim, rank)));
            }
        }
    }
    FilterHistory::new(grid, filters).unwrap()
}

/// Histories whose filters are sums of a fixed basis per slot, so order relations occur.
fn lattice_history(rng: &mut FixtureRng, grid: &TemporalGrid, bases: &[Vec<Operator>]) -> FilterHistory {
    let dim = bases[0].len();
    let mut filters = Vec::new();
    for (t, basis) in bases.iter().enumerate() {
        let mask: u32 = rng.random_range(1..(1 << dim));
        if mask == (1 << dim) - 1 {
            continue;
        }
        let mut p = Operator::zeros(dim);
        for (k, q) in basis.iter().enumerate() {
            if mask & (1 << k) != 0 {
                p = p.add(q).unwrap();
            }
        }
        filters.push((t, p.retag(Role::Projector).unwrap()));
    }
    FilterHistory::new(grid, filters).unwrap()
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn tensor_trace_factorizes(seed: u64, da in 2usize..=4, db in 2usize..=4) {
        let mut rng = random::rng(seed);
        let a = Operator::generic(random::unitary(&mut rng, da)).unwrap();
        let b = random::hamiltonian(&mut rng, db, 1.0);
        let t = tensor_product(&a, &b).unwrap();
        prop_assert!((t.trace() - a.trace() * b.trace()).norm() < 1e-12);
    }

    #[test]
    fn heisenberg_filter_keeps_projectors(seed: u64, dim in 2usize..=5, t in -3.0f64..3.0) {
        let mut rng = random::rng(seed);
        let rank = rng.random_range(1..dim);
        let p = random::projector(&mut rng, dim, rank);
        let h = random::hamiltonian(&mut rng, dim, 1.0);
        let pt = heisenberg_filter(&p, &h, t).unwrap();
        prop_assert!(pt.mul(&pt).unwrap().max_abs_diff(&pt) < 1e-10);
    }

    #[test]
    fn exponential_inverts(seed: u64, dim in 2usize..=5, s in -4.0f64..4.0) {
        let mut rng = random::rng(seed);
        let a = random::hamiltonian(&mut rng, dim, 1.0);
        let fwd = matrix_exponential(&a, c(0.0, s)).unwrap();
        let bwd = matrix_exponential(&a, c(0.0, -s)).unwrap();
        prop_assert!(fwd.mul(&bwd).unwrap().max_abs_diff(&Operator::identity(dim)) < 1e-10);
    }

    #[test]
    fn finer_than_is_a_partial_order(seed: u64, dim in 2usize..=3) {
        let mut rng = random::rng(seed);
        let grid = grid3();
        let bases: Vec<_> = (0..grid.len()).map(|_| random::projective_basis(&mut rng, dim)).collect();
        let hs: Vec<_> = (0..6).map(|_| lattice_history(&mut rng, &grid, &bases)).collect();
        let le = |a: &FilterHistory, b: &FilterHistory| finer_than(a, b).unwrap();
        for a in &hs {
            prop_assert!(le(a, a));
            for b in &hs {
                if le(a, b) && le(b, a) {
                    prop_assert!(a.approx_eq(b, 1e-9));
                }
                for x in &hs {
                    if le(a, b) && le(b, x) {
                        prop_assert!(le(a, x));
                    }
                }
            }
        }
    }

    #[test]
    fn meet_is_finer_than_both(seed: u64, dim in 2usize..=3) {
        let mut rng = random::rng(seed);
        let grid = grid3();
        let bases: Vec<_> = (0..grid.len()).map(|_| random::projective_basis(&mut rng, dim)).collect();
        let a = lattice_history(&mut rng, &grid, &bases);
        let b = lattice_history(&mut rng, &grid, &bases);
        if let Some(m) = meet(&a, &b).unwrap().history() {
            prop_assert!(finer_than(m, &a).unwrap());
            prop_assert!(finer_than(m, &b).unwrap());
        }
    }

    #[test]
    fn additive_sums_have_summed_class_operators(seed: u64, dim in 2usize..=4) {
        let mut rng = random::rng(seed);
        let grid = grid3();
        let m = model(&mut rng, dim, &grid);
        let basis = random::projective_basis(&mut rng, dim);
        let shared = random::projector(&mut rng, dim, 1);
        let slot = rng.random_range(0..grid.len());
        let other = (slot + 1) % grid.len();
        let a = FilterHistory::new(&grid, [(slot, basis[0].clone()), (other, shared.clone())]).unwrap();
        let b = FilterHistory::new(&grid, [(slot, basis[1].clone()), (other, shared)]).unwrap();
        let sum = operationally_additive(&a, &b).unwrap().expect("single differing slot");
        let f = m.functional();
        let lhs = f.class_operator(&sum).unwrap();
        let rhs = f.class_operator(&a).unwrap().add(&f.class_operator(&b).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        let ident = f.intensity(&sum).unwrap() - f.intensity(&a).unwrap() - f.intensity(&b).unwrap()
            - 2.0 * f.evaluate(&a, &b).unwrap().re;
        prop_assert!(ident.abs() < 1e-12);
    }

    #[test]
    fn coherence_is_hermitian_real_and_bounded(seed: u64, dim in 2usize..=4) {
        let mut rng = random::rng(seed);
        let grid = grid3();
        let m = model(&mut rng, dim, &grid);
        let a = history(&mut rng, &grid, dim);
        let b = history(&mut rng, &grid, dim);
        let f = m.functional();
        let (ab, ba, aa) = (f.evaluate(&a, &b).unwrap(), f.evaluate(&b, &a).unwrap(), f.evaluate(&a, &a).unwrap());
        prop_assert!((ab - ba.conj()).norm() < 1e-12);
        prop_assert!(aa.im.abs() < 1e-12);
        prop_assert!(ab.norm() <= 1.0 + 1e-10);
        let h = m.hamiltonian().matrix();
        prop_assert!((ab - pair(m.rho().matrix(), &class_operator(&a, h), &class_operator(&b, h))).norm() < 1e-12);
    }

    #[test]
    fn initial_evidence_reduces_the_state(seed: u64, dim in 2usize..=4) {
        let mut rng = random::rng(seed);
        let grid = grid3();
        let m = model(&mut rng, dim, &grid);
        let p = random::projector(&mut rng, dim, 1);
        let tr = (m.rho().matrix() * p.matrix()).trace().re;
        prop_assume!(tr > 1e-6);
        let evidence = FilterHistory::new(&grid, [(0, p.clone())]).unwrap();
        let later = FilterHistory::new(&grid, [(2, random::projector(&mut rng, dim, 1))]).unwrap();
        let other = FilterHistory::new(&grid, [(1, random::projector(&mut rng, dim, 1))]).unwrap();
        let reduced = p.matrix() * m.rho().matrix() * p.matrix() / c(tr, 0.0);
        let h = m.hamiltonian().matrix();
        let oracle = pair(&reduced, &class_operator(&later, h), &class_operator(&other, h));
        prop_assert!((condition(&m, &evidence, &later, &other).unwrap().value - oracle).norm() < 1e-10);
    }

    #[test]
    fn correlations_agree_when_filters_commute_with_h(seed: u64, dim in 2usize..=4, dt in 0.1f64..3.0) {
        let mut rng = random::rng(seed);
        let u = random::unitary(&mut rng, dim);
        let diag = |vals: Vec<f64>| {
            let d = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vals.into_iter().map(|x| c(x, 0.0)).collect()));
            let m = &u * d * u.adjoint();
            Operator::with_role((&m + m.adjoint()) * c(0.5, 0.0), Role::Hermitian).unwrap()
        };
        let eig: Vec<f64> = (0..dim).map(|k| k as f64 - 0.7).collect();
        let a = diag(eig);
        let h = diag((0..dim).map(|_| rng.random_range(-1.0..1.0)).collect());
        let grid = TemporalGrid::new(vec![0.0, dt]).unwrap();
        let m = SystemModel::new(random::density(&mut rng, dim), h, grid).unwrap();
        let s = statistical_correlation(&m, &ObservableSpec::from_hermitian(&a).unwrap(), 0.0, dt).unwrap();
        let q = quantum_correlation(&m, &a, &[0.0], &[dt]).unwrap().value;
        prop_assert!((s - q.re).abs() < 1e-10);
    }

    #[test]
    fn phase_space_identities_hold(seed: u64, torus in any::<bool>(), size in 1usize..=4) {
        let mut rng = random::rng(seed);
        let space = if torus { PhaseSpace::qudit_torus(2 * size + 1).unwrap() } else { PhaseSpace::sphere(size).unwrap() };
        let k = build_kernels(&space).unwrap();
        let dim = space.dim();
        let a = random::hamiltonian(&mut rng, dim, 1.0);
        let b = random::hamiltonian(&mut rng, dim, 1.0);
        let (fa, fb) = (wigner_symbol(&k, &a).unwrap(), wigner_symbol(&k, &b).unwrap());
        let cst = k.pairing_constant();
        let w = space.weights();
        let integral: C64 = fa.values().iter().zip(w).map(|(x, w)| x * *w).sum::<C64>() * cst;
        let paired: C64 = fa.values().iter().zip(fb.values()).zip(w).map(|((x, y), w)| x * y * *w).sum::<C64>() * cst;
        prop_assert!((integral - a.trace()).norm() < 1e-10);
        prop_assert!((paired - a.trace_product(&b).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn sphere_projectors_are_never_characteristic(seed: u64, two_j in 1usize..=4) {
        let mut rng = random::rng(seed);
        let dim = two_j + 1;
        let k = build_kernels(&PhaseSpace::sphere(two_j).unwrap()).unwrap();
        let rank = rng.random_range(1..dim);
        let f = wigner_symbol(&k, &random::projector(&mut rng, dim, rank)).unwrap();
        let defect = f.values().iter().map(|v| (v * v - v).norm()).fold(0.0, f64::max);
        prop_assert!(defect > 0.01);
    }

    #[test]
    fn pure_qubit_wigner_is_somewhere_negative(seed: u64) {
        let mut rng = random::rng(seed);
        let k = build_kernels(&PhaseSpace::sphere(1).unwrap()).unwrap();
        let f = wigner_symbol(&k, &random::pure_density(&mut rng, 2)).unwrap();
        prop_assert!(f.values().iter().any(|v| v.re < 0.0));
    }

    #[test]
    fn phase_space_reproduces_coherence(seed: u64, torus in any::<bool>()) {
        let mut rng = random::rng(seed);
        let space = if torus { PhaseSpace::qudit_torus(3).unwrap() } else { PhaseSpace::sphere(1 + (seed % 2) as usize).unwrap() };
        let k = build_kernels(&space).unwrap();
        let dim = space.dim();
        let grid = TemporalGrid::new(vec![0.0, 0.8]).unwrap();
        let m = model(&mut rng, dim, &grid);
        let a = history(&mut rng, &grid, dim);
        let b = history(&mut rng, &grid, dim);
        let ps = phase_space_value(&m, &k, &a, &b).unwrap();
        prop_assert!((ps - m.functional().evaluate(&a, &b).unwrap()).norm() < 1e-9);
    }

    #[test]
    fn w_is_hermitian_under_swap(seed: u64, torus in any::<bool>()) {
        let mut rng = random::rng(seed);
        let space = if torus { PhaseSpace::qudit_torus(3).unwrap() } else { PhaseSpace::sphere(1).unwrap() };
        let k = build_kernels(&space).unwrap();
        let grid = TemporalGrid::new(vec![0.0, 1.0]).unwrap();
        let m = model(&mut rng, space.dim(), &grid);
        let (fwd, bwd) = (vec![0.0, 0.6], vec![0.3]);
        let w = build_w(&m, &k, &fwd, &bwd).unwrap();
        let swapped = build_w(&m, &k, &bwd, &fwd).unwrap();
        prop_assert!(w.hermiticity_residual(&swapped).unwrap() < 1e-10);
    }

    #[test]
    fn configs_round_trip(
        kind in 0usize..ScenarioKind::ALL.len(),
        seed: u64,
        dim in 2usize..=3,
        rho in 0usize..4,
        ham in 0usize..3,
        coeffs in proptest::array::uniform3(-5.0f64..5.0),
        extra in proptest::collection::vec(0.01f64..0.99, 0..2),
        tol in 1e-15f64..1e-3,
        format in 0usize..3,
    ) {
        let kind = ScenarioKind::ALL[kind];
        let rho = ["\"mixed\"", "\"random\"", "\"basis:1\"", if dim == 2 { "[1, [0, 1]]" } else { "[1, [0, 1], 0.5]" }][rho];
        let ham = match ham {
            0 => "\"zero\"".to_string(),
            1 => format!("{{\"spin\": [{}, {}, {}]}}", coeffs[0], coeffs[1], coeffs[2]),
            _ => format!("{{\"random\": {}}}", coeffs[0].abs() + 0.1),
        };
        let mut grid = vec![0.0, 1.0];
        grid.extend(extra.iter().map(|x| x + 1.0));
        let grid: Vec<String> = grid.iter().map(f64::to_string).collect();
        let tol_key = match kind {
            ScenarioKind::ConditioningDemo => "preselect_tolerance",
            ScenarioKind::InferenceSearch => "bound_tolerance",
            _ => "tolerance",
        };
        let torus = if kind == ScenarioKind::ReproductionSweep { format!("[params]\ntorus_dim = {}\n", if dim == 3 { "3" } else { "null" }) } else { String::new() };
        let text = format!(
            "scenario = \"{}\"\nseed = {seed}\n[system]\ndim = {dim}\nrho = {rho}\nhamiltonian = {ham}\ngrid = [{}]\n{torus}[assert]\n{tol_key} = {tol}\n[output]\nformat = \"{}\"\n",
            kind.name(),
            grid.join(", "),
            ["json", "csv", "text"][format],
        );
        let parsed = parse_config(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        let emitted = emit_config(&parsed);
        let reparsed = parse_config(&emitted).map_err(|e| TestCaseError::fail(format!("{e}\n{emitted}")))?;
        prop_assert_eq!(&reparsed, &parsed);
        prop_assert_eq!(emit_config(&reparsed), emitted);
    }
}

#[test]
fn lattice_histories_do_produce_order_relations() {
    let mut rng = random::rng(1);
    let grid = grid3();
    let bases: Vec<_> = (0..grid.len()).map(|_| random::projective_basis(&mut rng, 2)).collect();
    let hs: Vec<_> = (0..12).map(|_| lattice_history(&mut rng, &grid, &bases)).collect();
    let strict = hs.iter().flat_map(|a| hs.iter().map(move |b| (a, b))).filter(|(a, b)| finer_than(a, b).unwrap() && !a.approx_eq(b, 1e-9)).count();
    assert!(strict > 0);
}
