use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use super::system::{basis_projectors, projector_from};
use super::{Normalization, ScenarioConfig, ScenarioKind};
use crate::coherence::{
    additivity_gap, axiom_suite, coherence, condition, inference_scan, interference, is_consistent, postselect,
    preselect, three_box_witness, ConsistencyMode, InferenceHit, InferencePartition, InferenceReport,
};
use crate::error::{Error, Result};
use crate::histories::{disjoint, operationally_additive, FilterHistory, HistoryProposition, TemporalGrid};
use crate::operator::{ObservableSpec, Operator, Role};
use crate::phase_space::{
    build_kernels, build_w, fmt_float as f, history_symbol, phase_space_value, sharpness_report, sphere_symbol_at,
    PhaseSpace,
};
use crate::random::{self, FixtureRng};

/// One pass/fail assertion of a scenario.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// An extra output file, written next to the main result.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// Everything a scenario produced, before anything touches the disk.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioReport {
    pub scenario: ScenarioKind,
    pub seed: u64,
    /// Headline numbers, copied into the manifest.
    pub summary: Map<String, Value>,
    pub checks: Vec<CheckOutcome>,
    /// Full machine-readable result.
    pub detail: Value,
    /// Plot-ready table (CSV with a header row).
    pub table: String,
    /// Human-readable result.
    pub text: String,
    pub artifacts: Vec<Artifact>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        let doc = json!({
            "scenario": self.scenario,
            "seed": self.seed,
            "passed": self.passed(),
            "summary": self.summary,
            "checks": self.checks,
            "result": self.detail,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("scenario  {}\nseed      {}\n\n", self.scenario, self.seed);
        out.push_str(&self.text);
        out.push('\n');
        for c in &self.checks {
            let _ = writeln!(out, "{:<4} {}  {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        if self.checks.is_empty() {
            out.push_str("no assertions configured\n");
        }
        out
    }
}

struct Builder {
    summary: Map<String, Value>,
    checks: Vec<CheckOutcome>,
}

impl Builder {
    fn new() -> Self {
        Builder { summary: Map::new(), checks: Vec::new() }
    }

    fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.insert(key.to_string(), v.into());
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(CheckOutcome { name: name.to_string(), passed, detail });
    }

    fn within(&mut self, name: &str, value: f64, limit: f64) {
        self.check(name, value <= limit, format!("{value:e} <= {limit:e}"));
    }

    fn finish(self, cfg: &ScenarioConfig, detail: Value, table: String, text: String, artifacts: Vec<Artifact>) -> ScenarioReport {
        ScenarioReport {
            scenario: cfg.scenario,
            seed: cfg.seed,
            summary: self.summary,
            checks: self.checks,
            detail,
            table,
            text,
            artifacts,
        }
    }
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn count(v: &Value) -> usize {
    v.as_u64().unwrap_or(0) as usize
}

fn cfg_err(m: String) -> Error {
    Error::Malformed(m)
}

/// Runs a validated configuration in memory.
pub fn execute(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    match cfg.scenario {
        ScenarioKind::TwoSlit => two_slit(cfg),
        ScenarioKind::PrecessionConsistency => precession(cfg),
        ScenarioKind::ReproductionSweep => reproduction(cfg),
        ScenarioKind::NegativityMap => negativity(cfg),
        ScenarioKind::ConditioningDemo => conditioning(cfg),
        ScenarioKind::InferenceSearch => inference(cfg),
        ScenarioKind::AxiomAudit => axioms(cfg),
    }
}

fn two_slit(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let mut rng = random::rng(cfg.seed);
    let model = cfg.system.model(&mut rng)?;
    let dim = model.dim();
    let basis = basis_projectors(cfg.param("slit_basis").as_str().unwrap_or("z"), dim).map_err(cfg_err)?;
    let p0 = basis[0].clone();
    let p1 = Operator::identity(dim).sub(&p0)?.retag(Role::Projector)?;
    let screen = projector_from(cfg.param("screen"), dim).map_err(cfg_err)?;
    let (t1, t2) = (num(cfg.param("slit_time")), num(cfg.param("screen_time")));
    let grid = model.grid();
    let a = FilterHistory::at_times(grid, [(t1, p0.clone()), (t2, screen.clone())])?;
    let b = FilterHistory::at_times(grid, [(t1, p1.clone()), (t2, screen.clone())])?;
    let open = FilterHistory::at_times(grid, [(t2, screen.clone())])?;
    let fun = model.functional();
    let dab = fun.evaluate(&a, &b)?;
    let (ia, ib, io) = (fun.intensity(&a)?, fun.intensity(&b)?, fun.intensity(&open)?);
    let gap = additivity_gap(&model, &ObservableSpec::new(vec![0.0, 1.0], vec![p0, p1])?, t1, &screen, t2)?;
    let inter = interference(&model, &a, &b)?;

    let mut out = Builder::new();
    out.put("additivity_gap", gap);
    out.put("interference", inter);
    out.put("re_d_slits", dab.re);
    out.put("im_d_slits", dab.im);
    out.put("intensity_slit_0", ia);
    out.put("intensity_slit_1", ib);
    out.put("intensity_both_open", io);
    if let Some(expected) = cfg.assertion("expected_gap").as_f64() {
        let tol = num(cfg.assertion("tolerance"));
        let dev = (gap - expected).abs();
        out.check("additivity_gap", dev <= tol, format!("gap {gap:e}, expected {expected:e}, |diff| {dev:e} <= {tol:e}"));
    }

    let rows = [("slit_0", ia, dab.re), ("slit_1", ib, dab.re), ("both", io, inter)];
    let mut table = String::from("branch,intensity,re_interference\n");
    let mut text = String::from("branch   intensity              re_interference\n");
    for (name, i, r) in rows {
        let _ = writeln!(table, "{name},{},{}", f(i), f(r));
        let _ = writeln!(text, "{name:<8} {i:<22.15} {r:.15}");
    }
    let _ = writeln!(text, "\nadditivity gap  {gap:.15}\nd(slit_0, slit_1)  {:.15} {:+.15}i", dab.re, dab.im);
    let detail = json!({
        "branches": rows.iter().map(|(n, i, r)| json!({"branch": n, "intensity": i, "re_interference": r})).collect::<Vec<_>>(),
        "d_slits": {"re": dab.re, "im": dab.im},
        "additivity_gap": gap,
    });
    Ok(out.finish(cfg, detail, table, text, Vec::new()))
}

/// Every product of basis projectors over the grid, labelled by basis indices.
fn product_histories(grid: &TemporalGrid, basis: &[Operator]) -> Result<(Vec<FilterHistory>, Vec<String>)> {
    let n = grid.len();
    let d = basis.len();
    let total = d.pow(n as u32);
    let mut hs = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    for flat in 0..total {
        let mut idx = vec![0; n];
        let mut r = flat;
        for slot in idx.iter_mut().rev() {
            *slot = r % d;
            r /= d;
        }
        hs.push(FilterHistory::new(grid, idx.iter().enumerate().map(|(t, &k)| (t, basis[k].clone())))?);
        labels.push(idx.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(""));
    }
    Ok((hs, labels))
}

fn precession(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let mut rng = random::rng(cfg.seed);
    let model = cfg.system.model(&mut rng)?;
    let basis = basis_projectors(cfg.param("basis").as_str().unwrap_or("x"), model.dim()).map_err(cfg_err)?;
    let (hs, labels) = product_histories(model.grid(), &basis)?;
    let tol = num(cfg.assertion("tolerance"));
    let weak = is_consistent(&model, &hs, ConsistencyMode::Weak, tol)?;
    let full = is_consistent(&model, &hs, ConsistencyMode::Full, tol)?;

    let mut out = Builder::new();
    out.put("histories", hs.len());
    out.put("weak_consistent", weak.consistent);
    out.put("full_consistent", full.consistent);
    out.put("worst_re_off_diagonal", weak.worst_off_diagonal);
    out.put("worst_abs_off_diagonal", full.worst_off_diagonal);
    for (key, report) in [("expect_weak", &weak), ("expect_full", &full)] {
        if let Some(expected) = cfg.assertion(key).as_bool() {
            out.check(
                key,
                report.consistent == expected,
                format!("consistent {}, expected {expected}, worst {:e}", report.consistent, report.worst_off_diagonal),
            );
        }
    }

    let mut table = String::from("row,col,label_row,label_col,re,im\n");
    for (i, row) in full.matrix.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            let _ = writeln!(table, "{i},{j},{},{},{},{}", labels[i], labels[j], f(z.re), f(z.im));
        }
    }
    let text = format!("histories {}\n\n{}\n{}", labels.join(" "), weak.to_text(), full.to_text());
    let detail = json!({ "labels": labels, "weak": weak, "full": full });
    Ok(out.finish(cfg, detail, table, text, Vec::new()))
}

/// Filters at `order` distinct grid indices drawn from `pool`, random ranks.
fn random_history(rng: &mut FixtureRng, grid: &TemporalGrid, dim: usize, pool: &[usize], order: usize) -> Result<FilterHistory> {
    let mut slots: Vec<usize> = sample(rng, pool.len(), order).into_iter().map(|i| pool[i]).collect();
    slots.sort_unstable();
    let mut assignments = Vec::with_capacity(order);
    for t in slots {
        let rank = rng.random_range(1..dim);
        assignments.push((t, random::projector(rng, dim, rank)));
    }
    FilterHistory::new(grid, assignments)
}

fn reproduction(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let mut rng = random::rng(cfg.seed);
    let pairs = count(cfg.param("histories"));
    let max_order = count(cfg.param("max_order"));
    let write_kernel = cfg.param("write_kernel").as_bool().unwrap_or(false);
    let mut spaces = Vec::new();
    if cfg.param("sphere").as_bool() == Some(true) {
        spaces.push(("sphere", PhaseSpace::sphere(cfg.system.dim - 1)?, num(cfg.assertion("tolerance"))));
    }
    if let Some(d) = cfg.param("torus_dim").as_u64() {
        spaces.push(("torus", PhaseSpace::qudit_torus(d as usize)?, num(cfg.assertion("torus_tolerance"))));
    }

    let mut out = Builder::new();
    let mut table = String::from("space,pair,n,m,hilbert_re,hilbert_im,phase_space_re,phase_space_im,abs_diff\n");
    let mut text = String::new();
    let mut artifacts = Vec::new();
    let mut details = Vec::new();
    let mut overall: f64 = 0.0;
    for (name, space, tol) in spaces {
        let k = build_kernels(&space)?;
        let dim = space.dim();
        let mut worst: f64 = 0.0;
        let mut rows = Vec::with_capacity(pairs);
        for i in 0..pairs {
            let model = cfg.system.model_in(dim, &mut rng)?;
            let grid = model.grid();
            let len = grid.len();
            let pool: Vec<usize> = (0..len).collect();
            let n = rng.random_range(1..=len.min(max_order - 1));
            let m = rng.random_range(1..=len.min(max_order - n));
            let a = random_history(&mut rng, grid, dim, &pool, n)?;
            let b = random_history(&mut rng, grid, dim, &pool, m)?;
            let hilbert = coherence(&model, &a, &b)?.value;
            let phase = phase_space_value(&model, &k, &a, &b)?;
            let diff = (hilbert - phase).norm();
            worst = worst.max(diff);
            let _ = writeln!(
                table,
                "{name},{i},{n},{m},{},{},{},{},{}",
                f(hilbert.re),
                f(hilbert.im),
                f(phase.re),
                f(phase.im),
                f(diff)
            );
            rows.push(json!({"pair": i, "n": n, "m": m,
                "hilbert": {"re": hilbert.re, "im": hilbert.im},
                "phase_space": {"re": phase.re, "im": phase.im},
                "abs_diff": diff}));
            if i == 0 && write_kernel {
                let (fa, fb) = (history_symbol(&k, &a)?, history_symbol(&k, &b)?);
                let w = build_w(&model, &k, fa.times(), fb.times())?;
                artifacts.push(Artifact { name: format!("w_{name}.bin"), bytes: w.to_le_bytes() });
                let mut side = serde_json::to_string_pretty(&w.sidecar()).expect("sidecar serializes");
                side.push('\n');
                artifacts.push(Artifact { name: format!("w_{name}.json"), bytes: side.into_bytes() });
            }
        }
        overall = overall.max(worst);
        out.put(&format!("max_abs_diff_{name}"), worst);
        out.put(&format!("pairs_{name}"), pairs);
        out.within(&format!("reproduction_{name}"), worst, tol);
        let _ = writeln!(text, "{name:<7} pairs {pairs:>5}  max |hilbert - phase space| {worst:.3e}  (limit {tol:e})");
        details.push(json!({"space": name, "kernels": k.descriptor(), "max_abs_diff": worst, "pairs": rows}));
    }
    out.put("max_abs_diff", overall);
    Ok(out.finish(cfg, json!({ "spaces": details }), table, text, artifacts))
}

fn negativity(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let dim = cfg.system.dim;
    let two_j = dim - 1;
    let p = projector_from(cfg.param("projector"), dim).map_err(cfg_err)?;
    let space = PhaseSpace::sphere(two_j)?;
    let k = build_kernels(&space)?;
    let factor = match cfg.output.normalization {
        Normalization::UnitTrace => 1.0,
        Normalization::Paper42 => space.pairing_constant(),
    };
    let (nt, np) = (count(cfg.param("n_theta_plot")), count(cfg.param("n_phi_plot")));
    let thetas: Vec<f64> = (0..nt).map(|i| PI * i as f64 / (nt - 1) as f64).collect();
    let phis: Vec<f64> = (0..np).map(|j| 2.0 * PI * j as f64 / np as f64).collect();
    let mut values = Vec::with_capacity(nt);
    let mut table = String::from("theta,phi,value\n");
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut argmin = [0.0, 0.0];
    for &th in &thetas {
        let mut row = Vec::with_capacity(np);
        for &ph in &phis {
            let v = sphere_symbol_at(two_j, &p, th, ph)?.re * factor;
            if v < lo {
                lo = v;
                argmin = [th, ph];
            }
            hi = hi.max(v);
            let _ = writeln!(table, "{},{},{}", f(th), f(ph), f(v));
            row.push(v);
        }
        values.push(row);
    }
    let north = sphere_symbol_at(two_j, &p, 0.0, 0.0)?.re * factor;
    let south = sphere_symbol_at(two_j, &p, PI, 0.0)?.re * factor;
    let sharp = sharpness_report(&k, &p)?;

    let mut out = Builder::new();
    out.put("normalization", cfg.output.normalization.name());
    out.put("scale_factor", factor);
    out.put("map_min", lo);
    out.put("map_max", hi);
    out.put("argmin_theta", argmin[0]);
    out.put("argmin_phi", argmin[1]);
    out.put("north_pole", north);
    out.put("south_pole", south);
    out.put("negativity_fraction", sharp.negativity_fraction);
    out.put("l2_distance_to_characteristic", sharp.l2_distance);
    out.put("idempotency_defect", sharp.idempotency_defect);
    if let Some(expected) = cfg.assertion("expected_min").as_f64() {
        let tol = num(cfg.assertion("tolerance"));
        let dev = (lo - expected).abs();
        out.check("map_min", dev <= tol, format!("min {lo:e}, expected {expected:e}, |diff| {dev:e} <= {tol:e}"));
    }
    if cfg.assertion("require_negativity").as_bool() == Some(true) {
        out.check("negativity_region_nonempty", lo < 0.0, format!("min {lo:e} < 0"));
    }
    let text = format!(
        "spin j = {}  normalization {}  factor {factor:.15}\nnorth pole  {north:.15}\nsouth pole  {south:.15}\nmap min     {lo:.15}  at theta {:.6} phi {:.6}\nmap max     {hi:.15}\nnegative measure fraction  {:.6}\ndistance to best characteristic function  {:.6}\nmax |F^2 - F|  {:.6}\n",
        two_j as f64 / 2.0,
        cfg.output.normalization.name(),
        argmin[0],
        argmin[1],
        sharp.negativity_fraction,
        sharp.l2_distance,
        sharp.idempotency_defect
    );
    let detail = json!({
        "two_j": two_j,
        "normalization": cfg.output.normalization,
        "scale_factor": factor,
        "theta": thetas,
        "phi": phis,
        "values": values,
        "sharpness": sharp,
    });
    Ok(out.finish(cfg, detail, table, text, Vec::new()))
}

fn conditioning(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let mut rng = random::rng(cfg.seed);
    let fixtures = count(cfg.param("fixtures"));
    let mut table = String::from(
        "fixture,conditioned_re,conditioned_im,preselected_re,preselected_im,preselect_residual,postselect_residual\n",
    );
    let (mut worst_pre, mut worst_post): (f64, f64) = (0.0, 0.0);
    let mut skipped = 0usize;
    let mut rows = Vec::new();
    for i in 0..fixtures {
        let model = cfg.system.model(&mut rng)?;
        let dim = model.dim();
        let grid = model.grid().clone();
        let len = grid.len();
        let later: Vec<usize> = (1..len).collect();
        let rank = rng.random_range(1..dim);
        let p = random::projector(&mut rng, dim, rank);
        let order_a = rng.random_range(1..=later.len());
        let order_b = rng.random_range(1..=later.len());
        let a = random_history(&mut rng, &grid, dim, &later, order_a)?;
        let b = random_history(&mut rng, &grid, dim, &later, order_b)?;
        let evidence = FilterHistory::new(&grid, [(0, p.clone())])?;
        let (cond, pre) = match (condition(&model, &evidence, &a, &b), preselect(&model, &p, grid.times()[0])) {
            (Ok(c), Ok(m)) => (c.value, coherence(&m, &a, &b)?.value),
            (Err(Error::VanishingDenominator { .. }), _) | (_, Err(Error::VanishingDenominator { .. })) => {
                skipped += 1;
                continue;
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        let plain = coherence(&model, &a, &b)?.value;
        let post = postselect(&model, &Operator::identity(dim), grid.times()[len - 1], &a, &b)?.value;
        let (r1, r2) = ((cond - pre).norm(), (post - plain).norm());
        worst_pre = worst_pre.max(r1);
        worst_post = worst_post.max(r2);
        let _ = writeln!(table, "{i},{},{},{},{},{},{}", f(cond.re), f(cond.im), f(pre.re), f(pre.im), f(r1), f(r2));
        rows.push(json!({"fixture": i, "conditioned": {"re": cond.re, "im": cond.im},
            "preselected": {"re": pre.re, "im": pre.im}, "preselect_residual": r1, "postselect_residual": r2}));
    }
    let mut out = Builder::new();
    out.put("fixtures", fixtures);
    out.put("skipped_vanishing_evidence", skipped);
    out.put("max_preselect_residual", worst_pre);
    out.put("max_postselect_residual", worst_post);
    out.within("conditioning_equals_reduction", worst_pre, num(cfg.assertion("preselect_tolerance")));
    out.within("identity_postselection_is_neutral", worst_post, num(cfg.assertion("postselect_tolerance")));
    let text = format!(
        "fixtures {fixtures}  skipped {skipped}\nmax |conditioned - reduced state|       {worst_pre:.3e}\nmax |post-selected on 1 - unconditioned|  {worst_post:.3e}\n"
    );
    Ok(out.finish(cfg, json!({ "fixtures": rows }), table, text, Vec::new()))
}

#[derive(Serialize)]
struct SourcedHit {
    source: &'static str,
    #[serde(flatten)]
    hit: InferenceHit,
}

fn inference(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let mut rng = random::rng(cfg.seed);
    let partitions = count(cfg.param("partitions"));
    let tol = num(cfg.assertion("bound_tolerance"));
    let mut hits = Vec::new();
    for i in 0..partitions {
        let model = cfg.system.model(&mut rng)?;
        let part = InferencePartition::random(&mut rng, model.grid(), model.dim())?;
        for mut h in inference_scan(&model.functional(), &[part], tol)?.hits {
            h.partition = i;
            hits.push(SourcedHit { source: "random", hit: h });
        }
    }
    let mut scanned = partitions;
    if cfg.param("include_witness").as_bool() == Some(true) {
        let (fun, part) = three_box_witness()?;
        for mut h in inference_scan(&fun, &[part], tol)?.hits {
            h.partition = scanned;
            hits.push(SourcedHit { source: "witness", hit: h });
        }
        scanned += 1;
    }
    let report = InferenceReport { tolerance: tol, scanned, hits: hits.iter().map(|h| h.hit.clone()).collect() };
    let id_tol = num(cfg.assertion("identity_tolerance"));

    let mut out = Builder::new();
    out.put("scanned", scanned);
    out.put("hits", hits.len());
    out.put("random_hits", hits.iter().filter(|h| h.source == "random").count());
    out.put("stated_bound_holds", report.stated_bound_holds());
    out.put("corrected_bound_holds", report.corrected_bound_holds());
    let worst_identity = report.hits.iter().map(|h| h.identity_residual).fold(0.0, f64::max);
    out.put("max_identity_residual", worst_identity);
    let describe = |pick: fn(&InferenceHit) -> f64| -> String {
        match report.hits.iter().map(pick).reduce(f64::max) {
            Some(v) => format!("{} hits, largest value {v:+.6}", report.hits.len()),
            None => "none found".to_string(),
        }
    };
    match cfg.param("bound").as_str() {
        Some("corrected") => {
            out.check("re_d_alpha_beta_bound", report.corrected_bound_holds(), describe(|h| h.re_d_alpha_beta))
        }
        _ => out.check("re_d_alpha_gamma_bound", report.stated_bound_holds(), describe(|h| h.re_d_alpha_gamma)),
    }
    out.within("complement_identity", worst_identity, id_tol);

    let mut table = String::from(
        "source,partition,full_consistency,d_alpha_alpha,d_beta_beta,d_gamma_gamma,re_d_alpha_beta,re_d_alpha_gamma,re_d_beta_gamma,stated_bound_holds,corrected_bound_holds,identity_residual\n",
    );
    for s in &hits {
        let h = &s.hit;
        let _ = writeln!(
            table,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            s.source,
            h.partition,
            h.full_consistency,
            f(h.d_alpha_alpha),
            f(h.d_beta_beta),
            f(h.d_gamma_gamma),
            f(h.re_d_alpha_beta),
            f(h.re_d_alpha_gamma),
            f(h.re_d_beta_gamma),
            h.stated_bound_holds,
            h.corrected_bound_holds,
            f(h.identity_residual)
        );
    }
    let detail = json!({ "tolerance": tol, "scanned": scanned, "hits": hits });
    Ok(out.finish(cfg, detail, table, report.to_text(), Vec::new()))
}

/// Basis products over the first two grid times, two random histories over
/// the whole grid, and two propositions.
fn axiom_fixture(rng: &mut FixtureRng, grid: &TemporalGrid, dim: usize) -> Result<(Vec<FilterHistory>, Vec<HistoryProposition>)> {
    let slots = grid.len().min(2);
    let bases: Vec<Vec<Operator>> = (0..slots).map(|_| random::projective_basis(rng, dim)).collect();
    let mut hs = Vec::new();
    for flat in 0..dim.pow(slots as u32) {
        let mut r = flat;
        let mut assignments = Vec::with_capacity(slots);
        for t in (0..slots).rev() {
            assignments.push((t, bases[t][r % dim].clone()));
            r /= dim;
        }
        hs.push(FilterHistory::new(grid, assignments)?);
    }
    let pool: Vec<usize> = (0..grid.len()).collect();
    for _ in 0..2 {
        let order = rng.random_range(1..=grid.len());
        hs.push(random_history(rng, grid, dim, &pool, order)?);
    }
    let last = dim.pow(slots as u32) - 1;
    let props = vec![
        HistoryProposition::new(grid, vec![hs[0].clone(), hs[last].clone()])?,
        HistoryProposition::new(grid, hs[..dim].to_vec())?,
    ];
    Ok((hs, props))
}

struct Aggregate {
    id: String,
    name: String,
    checks: usize,
    worst: f64,
    fixture: Option<usize>,
    witness: Option<String>,
}

impl Aggregate {
    fn new(id: String, name: &str) -> Self {
        Aggregate { id, name: name.to_string(), checks: 0, worst: 0.0, fixture: None, witness: None }
    }

    fn add(&mut self, fixture: usize, checks: usize, worst: f64, witness: Option<&String>) {
        self.checks += checks;
        if worst > self.worst {
            self.worst = worst;
            self.fixture = Some(fixture);
            self.witness = witness.cloned();
        }
    }

    fn to_json(&self, tol: f64) -> Value {
        json!({"id": self.id, "name": self.name, "checks": self.checks, "worst_violation": self.worst,
            "passed": self.worst <= tol, "worst_fixture": self.fixture, "witness": self.witness})
    }
}

fn axioms(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let mut rng = random::rng(cfg.seed);
    let fixtures = count(cfg.param("fixtures"));
    let dims = cfg.audit_dims();
    let tol = num(cfg.assertion("tolerance"));
    let itol = num(cfg.assertion("interference_tolerance"));
    let mut aggs: Vec<Aggregate> = Vec::new();
    let mut final_slot = Aggregate::new("7f".into(), "subadditivity (final slot)");
    let mut ident = Aggregate::new("i".into(), "interference identity");
    let mut table = String::from("fixture,dim");
    let mut header_done = false;
    for i in 0..fixtures {
        let dim = dims[i % dims.len()];
        let model = cfg.system.model_in(dim, &mut rng)?;
        let (hs, props) = axiom_fixture(&mut rng, model.grid(), dim)?;
        let r = axiom_suite(&model, &hs, &props, tol)?;
        if !header_done {
            aggs = r.axioms.iter().map(|a| Aggregate::new(a.id.to_string(), &a.name)).collect();
            for a in &r.axioms {
                let _ = write!(table, ",axiom_{}", a.id);
            }
            table.push_str(",final_slot,interference_identity\n");
            header_done = true;
        }
        let fun = model.functional();
        let mut worst_ident: f64 = 0.0;
        let mut ident_checks = 0;
        let mut ident_witness = None;
        for (x, a) in hs.iter().enumerate() {
            for (y, b) in hs.iter().enumerate().skip(x + 1) {
                if a.support() != b.support() || !disjoint(a, b)? {
                    continue;
                }
                if let Some(sum) = operationally_additive(a, b)? {
                    let lhs = 2.0 * fun.evaluate(a, b)?.re;
                    let rhs = fun.intensity(&sum)? - fun.intensity(a)? - fun.intensity(b)?;
                    ident_checks += 1;
                    let v = (lhs - rhs).abs();
                    if v > worst_ident {
                        worst_ident = v;
                        ident_witness = Some(format!("history {x} / history {y}"));
                    }
                }
            }
        }
        let _ = write!(table, "{i},{dim}");
        for (agg, a) in aggs.iter_mut().zip(&r.axioms) {
            agg.add(i, a.checks, a.worst_violation, a.witness.as_ref());
            let _ = write!(table, ",{}", f(a.worst_violation));
        }
        let fs = &r.subadditivity_final_slot;
        final_slot.add(i, fs.checks, fs.worst_violation, fs.witness.as_ref());
        ident.add(i, ident_checks, worst_ident, ident_witness.as_ref());
        let _ = writeln!(table, ",{},{}", f(fs.worst_violation), f(worst_ident));
    }

    let mut out = Builder::new();
    out.put("fixtures", fixtures);
    out.put("dims", dims.clone());
    let mut text = format!("fixtures {fixtures}  dims {dims:?}  tolerance {tol:e}\n\n");
    for a in aggs.iter().chain([&final_slot]) {
        out.put(&format!("worst_axiom_{}", a.id), a.worst);
        out.check(
            &format!("axiom_{}", a.id),
            a.worst <= tol,
            format!("{}: worst {:e} over {} checks <= {tol:e}", a.name, a.worst, a.checks),
        );
        let _ = writeln!(
            text,
            "{:<3} {:<28} checks {:>7}  worst {:.3e}  {}{}",
            a.id,
            a.name,
            a.checks,
            a.worst,
            if a.worst <= tol { "ok" } else { "VIOLATED" },
            match (&a.fixture, &a.witness) {
                (Some(fx), Some(w)) if a.worst > tol => format!("  (fixture {fx}, {w})"),
                _ => String::new(),
            }
        );
    }
    out.put("worst_interference_identity", ident.worst);
    out.within("interference_identity", ident.worst, itol);
    let _ = writeln!(text, "    interference identity        checks {:>7}  worst {:.3e}", ident.checks, ident.worst);
    let detail = json!({
        "fixtures": fixtures,
        "dims": dims,
        "tolerance": tol,
        "axioms": aggs.iter().map(|a| a.to_json(tol)).collect::<Vec<_>>(),
        "subadditivity_final_slot": final_slot.to_json(tol),
        "interference_identity": ident.to_json(itol),
    });
    Ok(out.finish(cfg, detail, table, text, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::parse_config;

    fn run(text: &str) -> ScenarioReport {
        execute(&parse_config(text).unwrap()).unwrap()
    }

    fn summary(r: &ScenarioReport, key: &str) -> f64 {
        r.summary[key].as_f64().unwrap()
    }

    #[test]
    fn two_slit_default() {
        let r = run("scenario = \"two_slit\"\n[assert]\nexpected_gap = -0.5\n");
        assert!((summary(&r, "additivity_gap") + 0.5).abs() < 1e-15);
        assert!((summary(&r, "re_d_slits") - 0.25).abs() < 1e-15);
        assert!(r.passed());
        assert!(r.table.starts_with("branch,intensity,re_interference\nslit_0,2.5"));
        let wrong = run("scenario = \"two_slit\"\n[assert]\nexpected_gap = 0.5\n");
        assert!(!wrong.passed());
    }

    #[test]
    fn precession_quarter_turn() {
        let r = run("scenario = \"precession_consistency\"\n[assert]\nexpect_weak = true\nexpect_full = false\n");
        assert!(r.passed(), "{}", r.to_text());
        assert!((summary(&r, "worst_abs_off_diagonal") - 0.25).abs() < 1e-12);
        let half = run("scenario = \"precession_consistency\"\n[system]\ngrid = [0, 3.141592653589793]\n[assert]\nexpect_full = true\n");
        assert!(half.passed(), "{}", half.to_text());
    }

    #[test]
    fn reproduction_small_sweep() {
        let r = run("scenario = \"reproduction_sweep\"\nseed = 3\n[params]\nhistories = 12\n");
        assert!(r.passed(), "{}", r.to_text());
        assert!(summary(&r, "max_abs_diff_torus") < 1e-12);
        let names: Vec<&str> = r.artifacts.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, ["w_sphere.bin", "w_sphere.json", "w_torus.bin", "w_torus.json"]);
        assert_eq!(r.table.lines().count(), 25);
    }

    #[test]
    fn negativity_scaled_normalization() {
        let r = run("scenario = \"negativity_map\"\n[output]\nnormalization = \"paper_4_2\"\n");
        let s3 = 3.0_f64.sqrt();
        assert!((summary(&r, "map_min") - (1.0 - s3) / (4.0 * PI)).abs() < 1e-12);
        assert!((summary(&r, "north_pole") - (1.0 + s3) / (4.0 * PI)).abs() < 1e-12);
        assert!(r.passed());
        let unit = run("scenario = \"negativity_map\"\n");
        assert!((summary(&unit, "south_pole") - (1.0 - s3) / 2.0).abs() < 1e-12);
        let mixed = run("scenario = \"negativity_map\"\n[system]\nj = 1\n[params]\nprojector = \"basis:1\"\n");
        assert!(summary(&mixed, "map_min") < 0.0);
    }

    #[test]
    fn conditioning_matches_reduction() {
        let r = run("scenario = \"conditioning_demo\"\nseed = 5\n[params]\nfixtures = 20\n");
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn inference_witness_breaks_stated_bound() {
        let r = run("scenario = \"inference_search\"\n[params]\npartitions = 10\n");
        assert!(!r.passed());
        assert_eq!(r.failed_checks().map(|c| c.name.as_str()).collect::<Vec<_>>(), ["re_d_alpha_gamma_bound"]);
        let c = run("scenario = \"inference_search\"\n[params]\npartitions = 10\nbound = \"corrected\"\n");
        assert!(c.passed(), "{}", c.to_text());
        let none = run("scenario = \"inference_search\"\n[params]\npartitions = 10\ninclude_witness = false\n");
        assert!(none.passed());
        assert!(none.text.contains("none found"));
    }

    #[test]
    fn axiom_audit_flags_only_subadditivity() {
        let r = run("scenario = \"axiom_audit\"\n[params]\nfixtures = 6\ndims = [2, 3]\n");
        let failed: Vec<&str> = r.failed_checks().map(|c| c.name.as_str()).collect();
        assert_eq!(failed, ["axiom_7"], "{}", r.to_text());
    }
}
