//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance`; pass criterion numbers to run a
//! subset (`cargo test --test acceptance -- 1 2 11`). Setting
//! `WEYL_ARC_REGENERATE=1` rewrites the frozen far-field snapshot instead of
//! comparing against it.

use std::f64::consts::{E, FRAC_PI_2, FRAC_PI_4, PI};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use weyl_arc_sim::analysis::{
    bloch_map, column_integrate, cross_correlation, far_field, interpolate_periodic, momentum_distribution, separability_defect, Axis,
    BlochPopulation, FarFieldSpec, Map2d, MomentumGrid, J12_AGREEMENT, SURFACE_PERIODS,
};
use weyl_arc_sim::cli::{BinaryGrid, GridData};
use weyl_arc_sim::dynamics::{assemble, concurrence_of, evolve, EmitterSpec, EvolveOptions, SystemState};
use weyl_arc_sim::lattice::{build_finite, FiniteLattice, Geometry, ModelParams, SlabSpec, Sublattice};
use weyl_arc_sim::linalg::{eigh, C64};
use weyl_arc_sim::scan::{concurrence_scan, exchange, ExchangeRun};
use weyl_arc_sim::scenario::{chern_path, reference_slab, Configuration, EmitterArray, HingePair, SingleEmitter};
use weyl_arc_sim::topology::{
    analytic_phase, berry_flux, chern_closed_form, chern_reduced_with, classify_phase, curvature_from_eigensystem, fermi_arcs,
    find_weyl_points, hot_line_stats, linspace, surface_berry_map, FermiArcs, HamiltonianFamily, KGrid, PhaseLabel, SurfaceGrid,
    CHARGE_RADIUS, CHERN_GRID,
};
use weyl_arc_sim::Result;

// Frozen regression thresholds (derived on the first full run, see the
// README for the measured values).
const ARC_WEIGHT_FRACTION: f64 = 0.55;
const ARC_ENERGY_WINDOW: f64 = 0.25;
const ARC_DISTANCE_CELLS: f64 = 3.5;
const TOF_CORRELATION: f64 = 0.9;
const HOT_LINE_RATIO: f64 = 100.0;
const FARFIELD_REGRESSION_TOL: f64 = 1e-10;
const FARFIELD_TIMES: [f64; 3] = [5.0, 10.0, 15.0];
const CAVITY_CONCURRENCE: f64 = 0.95;
const J12_SPREAD: f64 = 0.10;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Outcome {
        Outcome { passed, detail: detail.into() }
    }
}

/// Concurrence values seen by the dynamical criteria, checked by the
/// property criterion.
static CONCURRENCES: Mutex<Vec<f64>> = Mutex::new(Vec::new());

fn record_concurrences(values: impl IntoIterator<Item = f64>) {
    CONCURRENCES.lock().unwrap().extend(values);
}

fn minutes(d: Duration) -> f64 {
    d.as_secs_f64() / 60.0
}

fn chern_quantization() -> Result<Outcome> {
    let start = Instant::now();
    let cells: Vec<(f64, f64)> = linspace(0.0, 1.0, 41).into_iter().flat_map(|s| linspace(-PI, PI, 41).into_iter().map(move |k| (s, k))).collect();
    let results: Vec<Option<(i32, i32)>> = cells
        .par_iter()
        .map(|&(s, kz)| {
            let (jp, m) = (1.5 * s, 3.5 * (1.0 - s));
            // off the phase boundaries: both reduced masses clearly non-zero
            let base = -m - 2.0 * kz.cos();
            let w = 2.0 * std::f64::consts::SQRT_2 * jp;
            if (base + w).abs() < 1e-3 || (base - w).abs() < 1e-3 {
                return None;
            }
            let c = chern_reduced_with(&chern_path(s), kz, CHERN_GRID).map_or(i32::MIN, |r| r.0);
            Some((c, chern_closed_form(1.0, jp, m, kz)))
        })
        .collect();
    let checked = results.iter().flatten().count();
    let mismatches = results.iter().flatten().filter(|(c, cf)| c != cf).count();
    let ends = |s: f64, want: i32| {
        cells.iter().zip(&results).filter(|((si, _), _)| *si == s).all(|(_, r)| r.map_or(true, |(c, _)| c == want))
    };
    let (bi, qhi) = (ends(0.0, 0), ends(1.0, 1));
    let elapsed = start.elapsed();
    Ok(Outcome::new(
        mismatches == 0 && bi && qhi && checked > 0 && minutes(elapsed) < 1.0,
        format!("{checked} points, {mismatches} mismatches, BI end C=0: {bi}, QHI end C=1: {qhi}, {:.1} s", elapsed.as_secs_f64()),
    ))
}

fn weyl_nodes() -> Result<Outcome> {
    let start = Instant::now();
    let p = ModelParams::simplified(1.0, 0.0, 0.0, 0.0);
    let nodes = find_weyl_points(&p, 1e-10)?;
    let mut expected: Vec<[f64; 3]> = Vec::new();
    for sy in [-1.0, 1.0] {
        for sz in [-1.0, 1.0] {
            expected.push([-FRAC_PI_4, sy * FRAC_PI_2, sz * FRAC_PI_2]);
        }
    }
    let matched = expected
        .iter()
        .all(|e| nodes.iter().any(|n| (n.k.x - e[0]).abs() < 1e-3 && (n.k.y - e[1]).abs() < 1e-3 && (n.k.z - e[2]).abs() < 1e-3));
    let total: i32 = nodes.iter().map(|n| n.chirality).sum();
    let mut worst_flux = 0.0f64;
    for n in &nodes {
        let flux = berry_flux(&p, &n.k, CHARGE_RADIUS, 48)?;
        worst_flux = worst_flux.max((flux - n.chirality as f64).abs());
    }
    let elapsed = start.elapsed();
    Ok(Outcome::new(
        nodes.len() == 4 && matched && total == 0 && worst_flux < 1e-2 && minutes(elapsed) < 1.0,
        format!("{} nodes, positions matched: {matched}, total charge {total}, max |flux - charge| {worst_flux:.2e}, {:.1} s", nodes.len(), elapsed.as_secs_f64()),
    ))
}

fn phase_boundaries() -> Result<Outcome> {
    let start = Instant::now();
    let grid: Vec<(f64, f64)> = linspace(-4.0, 4.0, 21).into_iter().flat_map(|m| linspace(0.0, 1.5, 21).into_iter().map(move |jp| (m, jp))).collect();
    let rows: Vec<Option<(bool, bool)>> = grid
        .par_iter()
        .map(|&(m, jp)| {
            let want = analytic_phase(1.0, jp, m, 1e-6)?;
            let p = ModelParams::simplified(1.0, jp, m, 0.0);
            let label = classify_phase(&p).ok();
            let nodes = find_weyl_points(&p, 1e-10).map(|n| n.len()).unwrap_or(usize::MAX);
            let oracle = match want {
                PhaseLabel::WSM2 => nodes == 4,
                PhaseLabel::WSM1 => nodes == 2,
                PhaseLabel::BI | PhaseLabel::QHI => nodes == 0,
            };
            Some((label == Some(want), oracle))
        })
        .collect();
    let checked = rows.iter().flatten().count();
    let wrong = rows.iter().flatten().filter(|r| !r.0).count();
    let oracle_wrong = rows.iter().flatten().filter(|r| !r.1).count();
    let elapsed = start.elapsed();
    Ok(Outcome::new(
        wrong == 0 && oracle_wrong == 0 && minutes(elapsed) < 5.0,
        format!("{checked} off-boundary cells, {wrong} label mismatches, {oracle_wrong} node-count mismatches, {:.1} s", elapsed.as_secs_f64()),
    ))
}

fn hot_lines() -> Result<Outcome> {
    let start = Instant::now();
    let grid = KGrid::surface(201, 201);
    let stats = |c: Configuration| {
        let spec = reference_slab(c.params());
        hot_line_stats(&surface_berry_map(&spec, &grid, spec.edge_band()))
    };
    let (max_i, _) = stats(Configuration::I);
    let ratio = |(max, median): (f64, f64)| if median > 0.0 { max / median } else { f64::INFINITY };
    let r2 = ratio(stats(Configuration::II));
    let r3 = ratio(stats(Configuration::III));
    let elapsed = start.elapsed();
    Ok(Outcome::new(
        max_i < 1e-10 && r2 >= HOT_LINE_RATIO && r3 >= HOT_LINE_RATIO && minutes(elapsed) < 5.0,
        format!("(I) max |Omega| {max_i:.1e}; max/median (II) {r2:.1}, (III) {r3:.1}; {:.1} s", elapsed.as_secs_f64()),
    ))
}

/// The imaging run shared by the conservation and Fermi-arc criteria.
struct Imaging {
    lattice: FiniteLattice,
    sites: Vec<C64>,
    norm_drift: f64,
    energy_drift: f64,
    elapsed: Duration,
}

fn imaging_run() -> Result<Imaging> {
    let start = Instant::now();
    let (lattice, system, _) = SingleEmitter::imaging().build()?;
    let initial = SystemState::single_excited(&system, 0)?;
    let options = EvolveOptions { snapshot_times: vec![10.0], ..Default::default() }.with_samples(0.0, 10.0, 51);
    let traj = evolve(&system, &initial, 10.0, &options)?;
    let norm_drift = traj.norm.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
    let energy_drift = traj.energy.iter().map(|e| (e - traj.energy[0]).abs()).fold(0.0, f64::max);
    let sites = traj.snapshots[0].sites().to_vec();
    Ok(Imaging { lattice, sites, norm_drift, energy_drift, elapsed: start.elapsed() })
}

fn conservation(run: &Imaging) -> Outcome {
    let mut mirror = 0.0f64;
    for i in 0..run.lattice.len() {
        if let Some(j) = run.lattice.z_mirror(i) {
            mirror = mirror.max((run.sites[i].norm_sqr() - run.sites[j].norm_sqr()).abs());
        }
    }
    Outcome::new(
        run.norm_drift < 1e-6 && run.energy_drift < 1e-6 && mirror < 1e-10 && minutes(run.elapsed) < 10.0,
        format!(
            "{} sites, norm drift {:.1e}, energy drift {:.1e}, mirror defect {mirror:.1e}, {:.1} s",
            run.lattice.len(),
            run.norm_drift,
            run.energy_drift,
            run.elapsed.as_secs_f64()
        ),
    )
}

fn imaging_map(run: &Imaging) -> Result<BlochPopulation> {
    bloch_map(&run.lattice, &run.sites, 10.0, &reference_slab(Configuration::II.params()))
}

fn fermi_arc_imaging(map: &BlochPopulation) -> Result<Outcome> {
    let spec = reference_slab(Configuration::II.params());
    let omega = Configuration::II.params().weyl_frequency();
    let fraction = map.fraction_near(omega, ARC_ENERGY_WINDOW);
    let arcs = fermi_arcs(&spec, omega, map.grid.n_par, map.grid.n_z)?;
    let summed = map.band_summed();
    let mut order: Vec<usize> = (0..summed.len()).collect();
    order.sort_by(|a, b| summed[*b].total_cmp(&summed[*a]));
    let cell = map.grid.d_par().max(map.grid.d_z());
    let worst = order[..summed.len() / 10]
        .iter()
        .map(|&k| FermiArcs::distance_to(&arcs.contours, &map.grid.point(k / map.grid.n_z, k % map.grid.n_z)) / cell)
        .fold(0.0, f64::max);
    Ok(Outcome::new(
        fraction >= ARC_WEIGHT_FRACTION && worst <= ARC_DISTANCE_CELLS,
        format!(
            "weight within {ARC_ENERGY_WINDOW} J of the Weyl frequency {fraction:.3} (>= {ARC_WEIGHT_FRACTION}); top-decile distance {worst:.2} cells (<= {ARC_DISTANCE_CELLS})"
        ),
    ))
}

fn tof_consistency(map: &BlochPopulation) -> Result<Outcome> {
    let (lattice, system, _) = SingleEmitter::time_of_flight().build()?;
    let initial = SystemState::single_excited(&system, 0)?;
    let options = EvolveOptions { snapshot_times: vec![6.0], ..Default::default() }.with_samples(0.0, 6.0, 11);
    let traj = evolve(&system, &initial, 6.0, &options)?;
    let snap = &traj.snapshots[0];
    let [n_par, _, n_z] = lattice.geometry().extents();
    let g = SurfaceGrid::new(n_par, n_z);
    let k_par: Vec<f64> = (0..g.n_par).map(|i| g.point(i, 0).par).collect();
    let k_z: Vec<f64> = (0..g.n_z).map(|j| g.point(0, j).z).collect();
    let grid = MomentumGrid::with_surface_axes(&lattice, k_par.clone(), g.d_par(), k_z.clone(), g.d_z());
    let n_perp = column_integrate(&momentum_distribution(&lattice, snap.sites(), &grid)?, Axis::Perp);
    let full = momentum_distribution(&lattice, snap.sites(), &MomentumGrid::full_cell(&lattice))?;
    let plancherel = (full.mean() - snap.photonic_population()).abs();
    let reference = Map2d {
        axes: [
            (0..map.grid.n_par).map(|i| map.grid.point(i, 0).par).collect(),
            (0..map.grid.n_z).map(|j| map.grid.point(0, j).z).collect(),
        ],
        values: map.band_summed(),
    };
    let resampled: Vec<f64> =
        k_par.iter().flat_map(|&p| k_z.iter().map(move |&z| (p, z))).map(|(p, z)| interpolate_periodic(&reference, SURFACE_PERIODS, p, z)).collect();
    let corr = cross_correlation(&n_perp.values, &resampled)?;
    Ok(Outcome::new(
        corr >= TOF_CORRELATION && plancherel < 1e-8,
        format!("correlation {corr:.3} (>= {TOF_CORRELATION}); Plancherel defect {plancherel:.1e}"),
    ))
}

fn regression_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/farfield_regression.warc")
}

fn far_field_criterion() -> Result<Outcome> {
    let array = EmitterArray::reference();
    let (lattice, system, sites, center) = array.build()?;
    let spec = FarFieldSpec::new([0.0, 0.0, 1.0], 1.0, 61, 120)?;
    let (nt, np) = (spec.theta.len(), spec.phi.len());
    let positions: Vec<[f64; 3]> = sites.iter().map(|&s| lattice.site(s).frame_position()).collect();
    let initial = SystemState::single_excited(&system, center)?;
    let f0 = far_field(initial.emitters(), &positions, &spec)?;
    let mut dipole_dev = 0.0f64;
    for (i, th) in spec.theta.iter().enumerate() {
        for j in 0..np {
            dipole_dev = dipole_dev.max((f0[i * np + j] - th.cos().powi(2)).abs());
        }
    }
    let options = EvolveOptions { snapshot_times: FARFIELD_TIMES.to_vec(), ..Default::default() }.with_samples(0.0, 15.0, 31);
    let traj = evolve(&system, &initial, 15.0, &options)?;
    let mut patterns = Vec::new();
    let mut min_defect = f64::INFINITY;
    for t in FARFIELD_TIMES {
        let f = far_field(traj.snapshot_at(t).expect("snapshot requested").emitters(), &positions, &spec)?;
        min_defect = min_defect.min(separability_defect(&f, nt, np));
        patterns.extend(f);
    }
    let path = regression_path();
    if std::env::var_os("WEYL_ARC_REGENERATE").is_some() {
        std::fs::create_dir_all(path.parent().unwrap())?;
        std::fs::write(&path, BinaryGrid::real(&[FARFIELD_TIMES.len(), nt, np], patterns.clone())?.encode())?;
    }
    let frozen = BinaryGrid::read(&path)?;
    let GridData::Real(frozen) = frozen.data else {
        return Ok(Outcome::new(false, "regression snapshot is not a real grid"));
    };
    let regression = if frozen.len() == patterns.len() {
        frozen.iter().zip(&patterns).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Ok(Outcome::new(
        dipole_dev < 1e-12 && min_defect > 1e-3 && regression < FARFIELD_REGRESSION_TOL,
        format!("t=0 deviation from cos^2 {dipole_dev:.1e}; min separability defect {min_defect:.3}; regression deviation {regression:.1e}"),
    ))
}

fn chiral_channel() -> Result<Outcome> {
    let base = HingePair::chiral_channel(1, 0.3);
    let cells: Vec<(usize, f64)> = [1, 3, 5].into_iter().flat_map(|d| [0.2, 0.3, 0.4].into_iter().map(move |g| (d, g))).collect();
    let runs: Vec<(usize, f64, Option<f64>, Duration)> = cells
        .par_iter()
        .map(|&(d, g)| {
            let start = Instant::now();
            let map = concurrence_scan(&base, &[d], &[g], None);
            (d, g, map.cells[0].c_max, start.elapsed())
        })
        .collect();
    record_concurrences(runs.iter().filter_map(|r| r.2));
    let target = 2.0 / E;
    let near: Vec<String> = runs.iter().filter(|r| r.2.is_some_and(|c| (c - target).abs() <= 0.05)).map(|r| format!("(d={}, g={})", r.0, r.1)).collect();
    let d_min = runs.iter().map(|r| r.0).min().unwrap_or(0);
    let best_small = runs.iter().filter(|r| r.0 == d_min).filter_map(|r| r.2).fold(0.0, f64::max);
    let slowest = runs.iter().map(|r| r.3).max().unwrap_or_default();
    let holes = runs.iter().filter(|r| r.2.is_none()).count();
    Ok(Outcome::new(
        !near.is_empty() && best_small > target && minutes(slowest) < 5.0,
        format!(
            "cells within 2/e +- 0.05: {}; best C_max at d={d_min}: {best_small:.3} (2/e = {target:.3}); {holes} holes; slowest cell {:.0} s",
            if near.is_empty() { "none".to_string() } else { near.join(" ") },
            slowest.as_secs_f64()
        ),
    ))
}

fn effective_cavity() -> Result<Outcome> {
    let start = Instant::now();
    let g = 0.1;
    let cases = [(11, 3), (21, 8), (31, 8), (31, 16), (31, 23)];
    let runs: Vec<ExchangeRun> = cases.par_iter().map(|&(n, d)| exchange(&HingePair::cavity(n, d, g), None, None)).collect::<Result<_>>()?;
    record_concurrences(runs.iter().map(|r| r.c_max));
    let j12 = |n: usize, d: usize| runs.iter().find(|r| r.n_side == n && r.d == d).map(|r| r.estimate.j12).expect("case was run");
    let reference = &runs[0];
    let plateau: Vec<f64> = [8, 16, 23].iter().map(|&d| j12(31, d)).collect();
    let mean = plateau.iter().sum::<f64>() / plateau.len() as f64;
    let spread = (plateau.iter().copied().fold(f64::MIN, f64::max) - plateau.iter().copied().fold(f64::MAX, f64::min)) / mean;
    let (a, b) = (j12(21, 8), j12(31, 8));
    let size_gap = (a - b).abs() / (0.5 * (a + b));
    let disagreeing = runs.iter().filter(|r| !r.estimate.ambiguous && (r.estimate.j12 - r.estimate.spectral).abs() > J12_AGREEMENT * r.estimate.j12).count();
    let c_min = runs.iter().map(|r| r.c_max).fold(f64::INFINITY, f64::min);
    let elapsed = start.elapsed();
    let table: Vec<String> = runs.iter().map(|r| format!("L{} d{}: J12 {:.5} C {:.3}", r.n_side, r.d, r.estimate.j12, r.c_max)).collect();
    Ok(Outcome::new(
        reference.c_max >= CAVITY_CONCURRENCE && spread < J12_SPREAD && size_gap < J12_SPREAD && disagreeing == 0 && minutes(elapsed) < 30.0,
        format!(
            "C_max (L=11, d=3) {:.3}, lowest over all boxes {c_min:.3}; plateau spread at L=31 {:.1}%; L=21 vs L=31 {:.1}%; {disagreeing} estimator disagreements; {:.1} min [{}]",
            reference.c_max,
            100.0 * spread,
            100.0 * size_gap,
            minutes(elapsed),
            table.join(", ")
        ),
    ))
}

fn property_suite() -> Result<Outcome> {
    // Rabi oscillation of one emitter on one site
    let lattice = build_finite(&ModelParams::simplified(1.0, 0.0, 0.0, 0.0), &Geometry::cubic(1, 1, 1))?;
    let g = 0.5;
    let rabi = assemble(&lattice, &[EmitterSpec::new(0, 0.0, g)])?;
    let psi0 = SystemState::single_excited(&rabi, 0)?;
    let traj = evolve(&rabi, &psi0, 20.0, &EvolveOptions::default())?;
    let rabi_err = traj.times.iter().zip(traj.emitter_population(0)).map(|(t, p)| (p - (g * t).cos().powi(2)).abs()).fold(0.0, f64::max);

    // convergence order of the integrator on the same problem (g = 1)
    let unit = assemble(&lattice, &[EmitterSpec::new(0, 0.0, 1.0)])?;
    let start = SystemState::single_excited(&unit, 0)?;
    let err = |dt: f64| -> Result<f64> {
        let o = EvolveOptions { dt, sample_times: vec![10.0], ..Default::default() };
        let t = evolve(&unit, &start, 10.0, &o)?;
        Ok((t.emitter_amplitudes[0][0] - C64::new(10f64.cos(), 0.0)).norm())
    };
    let order = (err(0.1)? / err(0.05)?).log2();

    // curvature unchanged by arbitrary eigenvector phases
    let spec = SlabSpec::new(ModelParams::simplified(1.0, 0.5, 1.0, 0.0), 9, Sublattice::A)?;
    let family = HamiltonianFamily::Slab(spec);
    let mut gauge = 0.0f64;
    for k in [[0.7, -1.3], [-2.1, 0.4], [1.9, 2.6]] {
        let (e, mut u) = eigh(&family.matrix(&k));
        let (da, db) = (family.derivative(&k, 0), family.derivative(&k, 1));
        let before: Vec<f64> = (0..e.len()).map(|n| curvature_from_eigensystem(&e, &u, &da, &db, n)).collect::<Result<_>>()?;
        for (j, mut col) in u.column_iter_mut().enumerate() {
            let phase = C64::from_polar(1.0, 1.7 * j as f64 + 0.3);
            col.iter_mut().for_each(|z| *z *= phase);
        }
        for (n, b) in before.iter().enumerate() {
            gauge = gauge.max((curvature_from_eigensystem(&e, &u, &da, &db, n)? - b).abs());
        }
    }

    // the Bloch mapping preserves the norm of an arbitrary state
    let params = Configuration::II.params();
    let block = build_finite(&params, &Geometry::slab_block(7, 5, 9))?;
    let slab = SlabSpec::new(params, 5, Sublattice::A)?;
    let state: Vec<C64> = (0..block.len()).map(|i| C64::new((i as f64 * 0.71).sin(), (i as f64 * 1.3).cos())).collect();
    let total: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    let unitarity = (bloch_map(&block, &state, 1.0, &slab)?.total() - total).abs() / total;

    // concurrences from the dynamical criteria plus a sweep of amplitudes
    let mut values = CONCURRENCES.lock().unwrap().clone();
    for i in 0..200 {
        let x = i as f64 * 0.173;
        let (a, b) = (x.sin() * 0.7, x.cos() * 0.7);
        values.push(concurrence_of(C64::from_polar(a, 2.0 * x), C64::from_polar(b, -x)));
    }
    let in_range = values.iter().all(|c| (0.0..=1.0).contains(c));

    Ok(Outcome::new(
        rabi_err < 1e-8 && order >= 3.8 && gauge < 1e-9 && unitarity < 1e-10 && in_range,
        format!(
            "Rabi error {rabi_err:.1e}; order {order:.2}; gauge defect {gauge:.1e}; mapping defect {unitarity:.1e}; {} concurrences in [0, 1]: {in_range}",
            values.len()
        ),
    ))
}

/// Whether a criterion passed; its line is printed as soon as it is known.
type Line = bool;

fn report(n: usize, name: &str, outcome: std::result::Result<Outcome, String>) -> Line {
    let (passed, detail) = match outcome {
        Ok(o) => (o.passed, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    println!("{} criterion {n:>2} ({name}): {detail}", if passed { "PASS" } else { "FAIL" });
    passed
}

fn line(n: usize, name: &'static str, outcome: Result<Outcome>) -> Line {
    report(n, name, outcome.map_err(|e| e.to_string()))
}

fn main() -> ExitCode {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |n: usize| selected.is_empty() || selected.contains(&n);
    let mut lines: Vec<Line> = Vec::new();

    if wanted(1) {
        lines.push(line(1, "Chern quantization", chern_quantization()));
    }
    if wanted(2) {
        lines.push(line(2, "Weyl nodes", weyl_nodes()));
    }
    if wanted(3) {
        lines.push(line(3, "phase boundaries", phase_boundaries()));
    }
    if wanted(4) {
        lines.push(line(4, "surface hot lines", hot_lines()));
    }
    if wanted(5) || wanted(6) || wanted(7) {
        let imaging = [(5, "dynamics conservation"), (6, "Fermi-arc imaging"), (7, "time-of-flight consistency")];
        match imaging_run().and_then(|run| imaging_map(&run).map(|map| (run, map))) {
            Ok((run, map)) => {
                if wanted(5) {
                    lines.push(line(5, imaging[0].1, Ok(conservation(&run))));
                }
                if wanted(6) {
                    lines.push(line(6, imaging[1].1, fermi_arc_imaging(&map)));
                }
                if wanted(7) {
                    lines.push(line(7, imaging[2].1, tof_consistency(&map)));
                }
            }
            Err(e) => {
                let message = e.to_string();
                lines.extend(imaging.iter().filter(|(n, _)| wanted(*n)).map(|&(n, name)| report(n, name, Err(message.clone()))));
            }
        }
    }
    if wanted(8) {
        lines.push(line(8, "far field", far_field_criterion()));
    }
    if wanted(9) {
        lines.push(line(9, "chiral channel", chiral_channel()));
    }
    if wanted(10) {
        lines.push(line(10, "effective cavity", effective_cavity()));
    }
    if wanted(11) {
        lines.push(line(11, "property suite", property_suite()));
    }

    let failed = lines.iter().filter(|passed| !**passed).count();
    println!("{} of {} criteria passed", lines.len() - failed, lines.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
