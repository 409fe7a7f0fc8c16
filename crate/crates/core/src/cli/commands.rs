//! One function per command. Each reads its experiment keys (falling back
//! to the reference-figure defaults), runs the computation and writes its
//! outputs into the run directory.

use std::f64::consts::PI;

use crate::analysis::{
    bloch_map, column_integrate, far_field, momentum_distribution, separability_defect, Axis, FarFieldSpec, MomentumGrid, J12_WINDOW,
};
use crate::dynamics::{assemble, evolve, CoupledSystem, EmitterSpec, EvolveOptions, SystemState, Trajectory, DEFAULT_DT};
use crate::error::{Error, Result};
use crate::lattice::{apply_absorbers, build_finite, Facet, FiniteLattice, Geometry, SlabSpec, SURFACE_PAR_HALF};
use crate::scan::{cavity_horizon, chiral_horizon, concurrence_scan, j12_scan, max_concurrence};
use crate::scenario::{chern_path, EmitterArray, HingePair, SingleEmitter};
use crate::topology::{
    analytic_phase, band_structure, chern_closed_form, chern_reduced_with, classify_phase_detailed, fermi_arcs, find_weyl_points,
    hot_line_stats, linspace, surface_berry_map, weyl_charge, HamiltonianFamily, KGrid, PhaseLabel, SurfaceGrid, ARC_LOCALIZATION,
    BOUNDARY_TOL, CHERN_GRID,
};

use super::config::{Command, RunConfig, SiteRef};
use super::io::{BinaryGrid, Columnar, OutputDir};

pub fn run(config: &RunConfig, out: &mut OutputDir) -> Result<()> {
    match config.command {
        Command::Bands => bands(config, out),
        Command::PhaseDiagram => phase_diagram(config, out),
        Command::FermiArcs => fermi_arcs_cmd(config, out),
        Command::BerrySurface => berry_surface(config, out),
        Command::Evolve => evolve_cmd(config, out),
        Command::BlochMap => bloch_map_cmd(config, out),
        Command::Tof => tof(config, out),
        Command::Farfield => farfield(config, out),
        Command::ChiralChannel => chiral_channel(config, out),
        Command::ConcurrenceScan => concurrence_scan_cmd(config, out),
        Command::Cavity => cavity(config, out),
        Command::J12Scan => j12_scan_cmd(config, out),
        Command::Chern => chern(config, out),
        Command::WeylPoints => weyl_points(config, out),
    }
}

/// Compact label for a time in file names, e.g. `6` or `2.5`.
fn time_tag(t: f64) -> String {
    format!("{t}")
}

fn phase_code(label: PhaseLabel) -> f64 {
    match label {
        PhaseLabel::BI => 0.0,
        PhaseLabel::QHI => 1.0,
        PhaseLabel::WSM1 => 2.0,
        PhaseLabel::WSM2 => 3.0,
    }
}

const PHASE_CODES: &str = "0:BI 1:QHI 2:WSM1 3:WSM2 -1:boundary";

fn facet_code(f: Facet) -> f64 {
    Facet::ALL.iter().position(|&g| g == f).expect("listed facet") as f64
}

fn facet_codes() -> String {
    Facet::ALL.iter().enumerate().map(|(i, f)| format!("{i}:{}", f.label())).collect::<Vec<_>>().join(" ")
}

fn slab_spec(config: &RunConfig) -> Result<SlabSpec> {
    SlabSpec::new(config.model.clone(), config.slab.n_s, config.slab.termination)
}

fn bands(config: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let kind = config.str_or("kind", "bulk");
    let per = config.usize_or("points_per_segment", 100);
    let (family, default_path): (HamiltonianFamily, Vec<Vec<f64>>) = if kind == "slab" {
        let h = SURFACE_PAR_HALF / PI;
        (HamiltonianFamily::Slab(slab_spec(config)?), vec![vec![-h, 0.5], vec![0.0, 0.5], vec![h, 0.5]])
    } else {
        (
            HamiltonianFamily::Bulk(config.model.clone()),
            vec![vec![0.0, 0.0, 0.0], vec![0.5, 0.5, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]],
        )
    };
    let corners = config.points("path_pi_units").unwrap_or(default_path);
    if corners.iter().any(|c| c.len() != family.k_dim()) {
        return Err(Error::InvalidParameter(format!("{kind} momenta have {} components", family.k_dim())));
    }
    let corners: Vec<Vec<f64>> = corners.iter().map(|c| c.iter().map(|x| x * PI).collect()).collect();
    let grid = KGrid::path(&corners, per);
    let bs = band_structure(&family, &grid);
    let k_names: &[&str] = if family.k_dim() == 3 { &["kx", "ky", "kz"] } else { &["k_par", "k_z"] };
    let mut columns: Vec<String> = vec!["s".into()];
    columns.extend(k_names.iter().map(|s| s.to_string()));
    columns.extend((0..bs.n_bands).map(|n| format!("E{n}")));
    let mut table = Columnar::new(&columns).meta("kind", kind).meta("n_bands", bs.n_bands);
    let mut s = 0.0;
    for (i, k) in grid.points.iter().enumerate() {
        if i > 0 {
            s += k.iter().zip(&grid.points[i - 1]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        }
        let mut row = vec![s];
        row.extend_from_slice(k);
        row.extend_from_slice(&bs.energies[i]);
        table.push(row);
    }
    out.table("bands.csv", &table)?;
    Ok(())
}

fn phase_diagram(config: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let [j, _, _, phi] = config.reduced.ok_or_else(|| Error::InvalidParameter("phase-diagram needs a simplified model (J, phi)".into()))?;
    let ms = linspace(config.f64_or("m_min_J", -4.0), config.f64_or("m_max_J", 4.0), config.usize_or("n_m", 81));
    let jps = linspace(config.f64_or("Jprime_min_J", 0.0), config.f64_or("Jprime_max_J", 1.5), config.usize_or("n_Jprime", 61));
    let cells: Vec<(f64, f64)> = ms.iter().flat_map(|&m| jps.iter().map(move |&jp| (m, jp))).collect();
    use rayon::prelude::*;
    let rows: Vec<Vec<f64>> = cells
        .par_iter()
        .map(|&(m, jp)| {
            let p = crate::lattice::ModelParams::simplified(j, jp, m, phi);
            let (code, chern, margin) = match classify_phase_detailed(&p, BOUNDARY_TOL) {
                Ok(info) => (phase_code(info.label), info.chern.map_or(f64::NAN, f64::from), info.margin),
                Err(_) => (-1.0, f64::NAN, 0.0),
            };
            let analytic = if phi == 0.0 { analytic_phase(j, jp, m, BOUNDARY_TOL).map_or(-1.0, phase_code) } else { f64::NAN };
            vec![m, jp, code, chern, margin, analytic]
        })
        .collect();
    let mut table = Columnar::new(&["m_J", "Jprime_J", "phase", "chern", "margin", "analytic_phase"])
        .meta("J", j)
        .meta("phi", phi)
        .meta("phase_codes", PHASE_CODES);
    for r in rows {
        table.push(r);
    }
    out.table("phase_diagram.csv", &table)?;
    Ok(())
}

fn fermi_arcs_cmd(config: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let spec = slab_spec(config)?;
    let omega = config.model.weyl_frequency() + config.f64_or("omega_offset_J", 0.0);
    let (n_par, n_z) = (config.usize_or("n_par", 201), config.usize_or("n_z", 201));
    let threshold = config.f64_or("localization", ARC_LOCALIZATION);
    let arcs = fermi_arcs(&spec, omega, n_par, n_z)?;
    let header = |t: Columnar| t.meta("omega", omega).meta("band", arcs.band).meta("n_s", spec.n_s()).meta("facet_codes", facet_codes());
    let mut contours = header(Columnar::new(&["contour", "point", "k_par", "k_z", "facet", "localization"]));
    for (c, line) in arcs.contours.iter().enumerate() {
        for (i, p) in line.iter().enumerate() {
            contours.push(vec![c as f64, i as f64, p.k.par, p.k.z, facet_code(p.facet), p.localization]);
        }
    }
    out.table("contours.csv", &contours)?;
    let mut pieces = header(Columnar::new(&["arc", "point", "k_par", "k_z", "facet", "localization"])).meta("localization_threshold", threshold);
    for (c, line) in arcs.arcs(threshold).iter().enumerate() {
        for (i, p) in line.iter().enumerate() {
            pieces.push(vec![c as f64, i as f64, p.k.par, p.k.z, facet_code(p.facet), p.localization]);
        }
    }
    out.table("arcs.csv", &pieces)?;
    Ok(())
}

fn berry_surface(config: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let spec = slab_spec(config)?;
    let band = match config.experiment.get("band").and_then(toml::Value::as_integer) {
        Some(b) => b as usize,
        None => spec.edge_band(),
    };
    if band >= spec.n_s() {
        return Err(Error::InvalidParameter(format!("band {band} does not exist ({} bands)", spec.n_s())));
    }
    let (n_par, n_z) = (config.usize_or("n_par", 201), config.usize_or("n_z", 201));
    let grid = KGrid::surface(n_par, n_z);
    let omega = surface_berry_map(&spec, &grid, band);
    out.grid("berry_curvature.warc", &BinaryGrid::real(&[n_par, n_z], omega.clone())?)?;
    let (max, median) = hot_line_stats(&omega);
    let mut stats = Columnar::new(&["band", "max_abs", "median_abs", "ratio", "degenerate_points"]).meta("n_par", n_par).meta("n_z", n_z);
    let ratio = if median > 0.0 { max / median } else { f64::INFINITY };
    stats.push(vec![band as f64, max, median, ratio, omega.iter().filter(|v| !v.is_finite()).count() as f64]);
    out.table("berry_stats.csv", &stats)?;
    Ok(())
}

/// Lattice, coupled system and initial state of the lattice commands.
struct Setup {
    lattice: FiniteLattice,
    system: CoupledSystem,
    initial: SystemState,
}

fn emitter_setup(config: &RunConfig, default_geometry: Geometry) -> Result<Setup> {
    let geometry = config.geometry.clone().unwrap_or(default_geometry);
    let mut lattice = build_finite(&config.model, &geometry)?;
    if let Some(a) = &config.absorbers {
        lattice = apply_absorbers(&lattice, &a.facets, a.gamma, a.layers)?;
    }
    let omega_w = config.model.weyl_frequency();
    let reference = SingleEmitter::imaging();
    let specs = if config.emitters.is_empty() {
        vec![EmitterSpec::new(lattice.facet_center(reference.facet)?, omega_w + reference.detuning, reference.g)]
    } else {
        config
            .emitters
            .iter()
            .map(|e| {
                let site = match e.site {
                    SiteRef::FacetCenter(f) => lattice.facet_center(f)?,
                    SiteRef::Id(i) => i,
                };
                Ok(EmitterSpec::new(site, omega_w + e.omega_offset, e.g).with_decay(e.gamma0))
            })
            .collect::<Result<Vec<_>>>()?
    };
    let system = assemble(&lattice, &specs)?;
    let initial = SystemState::single_excited(&system, 0)?;
    Ok(Setup { lattice, system, initial })
}

fn observables_table(traj: &Trajectory) -> Columnar {
    let n = traj.n_emitters();
    let mut columns: Vec<String> = vec!["t".into(), "norm".into(), "energy".into(), "photonic".into()];
    columns.extend((0..n).map(|j| format!("P{j}")));
    let mut table = Columnar::new(&columns).meta("dt", traj.dt);
    if let Some(h) = traj.halving_deviation {
        table = table.meta("halving_deviation", h);
    }
    for i in 0..traj.times.len() {
        let mut row = vec![traj.times[i], traj.norm[i], traj.energy[i], traj.photonic[i]];
        row.extend(traj.emitter_amplitudes[i].iter().map(|c| c.norm_sqr()));
        table.push(row);
    }
    table
}

fn snapshot_grid(state: &SystemState) -> Result<BinaryGrid> {
    BinaryGrid::complex(&[state.amplitudes().len()], state.amplitudes().to_vec())
}

fn evolve_cmd(config: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let setup = emitter_setup(config, SingleEmitter::imaging().geometry)?;
    let t_final = config.f64_or("t_final_J", 10.0);
    let snapshots = config.f64_list_or("snapshot_times_J", &[t_final]);
    if let Some(t) = snapshots.iter().find(|&&t| t > t_final) {
        return Err(Error::InvalidParameter(format!("snapshot time {t} lies beyond t_final_J = {t_final}")));
    }
    let mut options = EvolveOptions::default().with_samples(0.0, t_final, config.usize_or("n_samples", 201));
    options.dt = config.f64_or("dt_J", DEFAULT_DT);
    options.snapshot_times = snapshots;
    options.check_halving = config.bool_or("check_halving", false);
    let traj = evolve(&setup.system, &setup.initial, t_final, &options)?;
    out.table("observables.csv", &observables_table(&traj))?;
    let mut sites = Columnar::new(&["id", "perp", "par", "z", "sublattice"]);
    for (i, s) in setup.lattice.sites().iter().enumerate() {
        let [p, q, z] = s.frame_position();
        sites.push(vec![i as f64, p, q, z, if s.sublattice == crate::lattice::Sublattice::A { 0.0 } else { 1.0 }]);
    }
    out.table("sites.csv", &sites.meta("n_emitters", setup.system.n_emitters()).meta("sublattice_codes", "0:A 1:B"))?;
    for snap in &traj.snapshots {
        out.grid(&format!("snapshot_t{}.warc", time_tag(snap.t)), &snapshot_grid(snap)?)?;
    }
    Ok(())
}

fn bloch_map_cmd(config: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let setup = emitter_setup(config, SingleEmitter::imaging().geometry)?;
    let Geometry::Block { n_perp, terminations, .. } = *setup.lattice.geometry() else {
        return Err(Error::GridMismatch("bloch-map needs a slab_block or rect_block geometry".into()));
    };
    let spec = SlabSpec::with_terminations(config.model.clone(), n_perp, terminations)?;
    let t = config.f64_or("t_J", 10.0);
    let mut options = EvolveOptions::default().with_samples(0.0, t, 101);
    options.dt = config.f64_or("dt_J", DEFAULT_DT);
    options.snapshot_times = vec![t];
    let traj = evolve(&setup.system, &setup.initial, t, &options)?;
    let snap = traj.snapshot_at(t).ok_or(Error::NonFinite(t))?;
    let map = bloch_map(&setup.lattice, snap.sites(), t, &spec)?;
    let dims = [map.grid.n_par, map.grid.n_z, map.n_bands];
    out.grid("bloch_populations.warc", &BinaryGrid::real(&dims, map.populations.clone())?)?;
    out.grid("bloch_energies.warc", &BinaryGrid::real(&dims, map.energies.clone())?)?;
    out.grid("bloch_band_summed.warc", &BinaryGrid::real(&dims[..2], map.band_summed())?)?;
    let window = config.f64_or("energy_window_J", 0.25);
    let omega = config.model.weyl_frequency();
    let mut summary = Columnar::new(&["t", "photonic", "mapped", "fraction_near_omega"]).meta("energy_window", window).meta("omega", omega);
    summary.push(vec![t, snap.photonic_population(), map.total(), map.fraction_near(omega, window)]);
    out.table("bloch_summary.csv", &summary)?;
    out.table("observables.csv", &observables_table(&traj))?;
    Ok(())
}

fn tof(config: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let setup = emitter_setup(config, SingleEmitter::time_of_flight().geometry)?;
    let times = config.f64_list_or("times_J", &[6.0]);
    let axis: Axis = config.str_or("axis", "perp").parse()?;
    let t_final = times.iter().copied().fold(0.0, f64::max);
    let mut options = EvolveOptions::default().with_samples(0.0, t_final, 101);
    options.dt = config.f64_or("dt_J", DEFAULT_DT);
    options.snapshot_times = times.clone();
    let traj = evolve(&setup.system, &setup.initial, t_final, &options)?;
    let grid = match config.str_or("grid", "surface") {
        "full" => MomentumGrid::full_cell(&setup.lattice),
        _ => {
            let [n_par, _, n_z] = setup.lattice.geometry().extents();
            let g = SurfaceGrid::new(n_par, n_z);
            let par = (0..g.n_par).map(|i| g.point(i, 0).par).collect();
            let z = (0..g.n_z).map(|j| g.point(0, j).z).collect();
            MomentumGrid::with_surface_axes(&setup.lattice, par, g.d_par(), z, g.d_z())
        }
    };
    let mut summary = Columnar::new(&["t", "photonic", "mean_nk"]).meta("axis", config.str_or("axis", "perp")).meta("grid", config.str_or("grid", "surface"));
    for t in &times {
        let snap = traj.snapshot_at(*t).ok_or(Error::NonFinite(*t))?;
        let nk = momentum_distribution(&setup.lattice, snap.sites(), &grid)?;
        let tag = time_tag(*t);
        out.grid(&format!("nk_t{tag}.warc"), &BinaryGrid::real(&grid.shape(), nk.values.clone())?)?;
        let col = column_integrate(&nk, axis);
        out.grid(&format!("column_t{tag}.warc"), &BinaryGrid::real(&col.shape(), col.values.clone())?)?;
        summary.push(vec![*t, snap.photonic_population(), nk.mean()]);
    }
    let mut axes = Columnar::new(&["axis", "index", "k"]);
    for (a, ks) in grid.axes.iter().enumerate() {
        for (i, k) in ks.iter().enumerate() {
            axes.push(vec![a as f64, i as f64, *k]);
        }
    }
    out.table("momentum_axes.csv", &axes.meta("axis_codes", "0:perp 1:par 2:z"))?;
    out.table("tof_summary.csv", &summary)?;
    Ok(())
}

fn farfield(config: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let mut array = EmitterArray::reference();
    array.params = config.model.clone();
    if let Some(g) = &config.geometry {
        array.geometry = g.clone();
    }
    if config.has("array_facet") {
        array.facet = config.str_or("array_facet", "0-10").parse().map_err(Error::InvalidParameter)?;
    }
    array.g = config.f64_or("g_over_J", array.g);
    let (lattice, system, sites, center) = array.build()?;
    let dipole = config.f64_list_or("dipole", &[0.0, 0.0, 1.0]);
    let spec = FarFieldSpec::new([dipole[0], dipole[1], dipole[2]], config.f64_or("wavelength_a", 1.0), config.usize_or("n_theta", 61), config.usize_or("n_phi", 120))?;
    let times = config.f64_list_or("times_J", &[0.0, 5.0, 10.0, 15.0]);
    let t_final = times.iter().copied().fold(0.0, f64::max);
    let initial = SystemState::single_excited(&system, center)?;
    let mut options = EvolveOptions::default().with_samples(0.0, t_final, 101);
    options.dt = config.f64_or("dt_J", DEFAULT_DT);
    options.snapshot_times = times.clone();
    let traj = evolve(&system, &initial, t_final, &options)?;
    let positions: Vec<[f64; 3]> = sites.iter().map(|&s| lattice.site(s).frame_position()).collect();
    let mut summary = Columnar::new(&["t", "emitter_population", "max_f", "separability_defect"])
        .meta("n_emitters", sites.len())
        .meta("wavelength", spec.wavelength)
        .meta("dipole", format!("{:?}", spec.dipole));
    for t in &times {
        let snap = if *t == 0.0 { &initial } else { traj.snapshot_at(*t).ok_or(Error::NonFinite(*t))? };
        let f = far_field(snap.emitters(), &positions, &spec)?;
        let (nt, np) = (spec.theta.len(), spec.phi.len());
        out.grid(&format!("farfield_t{}.warc", time_tag(*t)), &BinaryGrid::real(&[nt, np], f.clone())?)?;
        let pop: f64 = snap.emitter_populations().iter().sum();
        summary.push(vec![*t, pop, f.iter().copied().fold(0.0, f64::max), separability_defect(&f, nt, np)]);
    }
    out.table("farfield_summary.csv", &summary)?;
    Ok(())
}

fn hinge_pair(config: &RunConfig, base: HingePair) -> HingePair {
    HingePair {
        params: config.model.clone(),
        n_side: config.usize_or("n_side", base.n_side),
        n_z: config.usize_or("n_z", base.n_z),
        d: config.usize_or("d", base.d),
        g: config.f64_or("g_over_J", base.g),
        gamma: config.f64_or("absorber_gamma_over_J", base.gamma),
        absorber_layers: config.usize_or("absorber_layers", base.absorber_layers),
    }
}

fn pair_table(traj: &Trajectory) -> Result<Columnar> {
    let c = traj.concurrence()?;
    let mut table = Columnar::new(&["t", "P1", "P2", "concurrence", "photonic", "norm"]);
    for i in 0..traj.times.len() {
        let a = &traj.emitter_amplitudes[i];
        table.push(vec![traj.times[i], a[0].norm_sqr(), a[1].norm_sqr(), c[i], traj.photonic[i], traj.norm[i]]);
    }
    Ok(table)
}

fn samples(config: &RunConfig, t_final: f64) -> usize {
    config.usize_or("n_samples", (5.0 * t_final).ceil() as usize + 1)
}

fn chiral_channel(config: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let pair = hinge_pair(config, HingePair::chiral_channel(1, 0.3));
    let t_final = config.f64_or("t_final_J", chiral_horizon(pair.g));
    let traj = pair.trajectory(t_final, samples(config, t_final))?;
    let (c_max, t_peak) = max_concurrence(&traj)?;
    out.table("trajectory.csv", &pair_table(&traj)?.meta("d", pair.d).meta("g", pair.g).meta("n_side", pair.n_side))?;
    let mut s = Columnar::new(&["d", "g", "c_max", "t_peak"]).meta("reference", 2.0 / std::f64::consts::E);
    s.push(vec![pair.d as f64, pair.g, c_max, t_peak]);
    out.table("summary.csv", &s)?;
    Ok(())
}

fn concurrence_scan_cmd(config: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let base = hinge_pair(config, HingePair::chiral_channel(1, 0.3));
    let ds = config.usize_list_or("d_values", &[1, 3, 5, 8]);
    let gs = config.f64_list_or("g_values_J", &[0.0, 0.2, 0.3, 0.4]);
    let horizon = config.has("t_final_J").then(|| config.f64_or("t_final_J", 0.0));
    let map = concurrence_scan(&base, &ds, &gs, horizon);
    let mut table = Columnar::new(&["d", "g", "c_max", "t_peak"]).meta("n_side", base.n_side).meta("n_z", base.n_z);
    for c in &map.cells {
        table.push(vec![c.d as f64, c.g, c.c_max.unwrap_or(f64::NAN), c.t_peak.unwrap_or(f64::NAN)]);
        if let Some(e) = &c.error {
            table = table.meta(&format!("hole_d{}_g{}", c.d, c.g), e);
        }
    }
    out.table("concurrence_map.csv", &table)?;
    let values = map.cells.iter().map(|c| c.c_max.unwrap_or(f64::NAN)).collect();
    out.grid("concurrence_map.warc", &BinaryGrid::real(&[ds.len(), gs.len()], values)?)?;
    Ok(())
}

fn cavity(config: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let pair = hinge_pair(config, HingePair::cavity(21, 3, 0.1));
    let t_final = config.f64_or("t_final_J", cavity_horizon(pair.g));
    let window = config.has("window_J").then(|| config.f64_or("window_J", J12_WINDOW));
    let traj = pair.trajectory(t_final, samples(config, t_final))?;
    out.table("trajectory.csv", &pair_table(&traj)?.meta("d", pair.d).meta("g", pair.g).meta("n_side", pair.n_side))?;
    let estimate = match window {
        Some(w) => crate::analysis::extract_j12_trajectory(&traj, w)?,
        None => crate::analysis::extract_j12_trajectory_adaptive(&traj, crate::scan::cavity_window(pair.n_side, pair.g))?,
    };
    let (c_max, t_peak) = max_concurrence(&traj)?;
    let mut s = Columnar::new(&["n_side", "d", "g", "j12", "t_max", "j12_spectral", "ambiguous", "c_max", "t_c_max"]);
    s.push(vec![pair.n_side as f64, pair.d as f64, pair.g, estimate.j12, estimate.t_max, estimate.spectral, f64::from(u8::from(estimate.ambiguous)), c_max, t_peak]);
    out.table("summary.csv", &s)?;
    Ok(())
}

fn j12_scan_cmd(config: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let sizes = config.usize_list_or("sizes", &[11, 21, 31]);
    let ds = config.usize_list_or("d_values", &[3, 6, 9]);
    let g = config.f64_or("g_over_J", 0.1);
    let horizon = config.has("t_final_J").then(|| config.f64_or("t_final_J", 0.0));
    let window = config.has("window_J").then(|| config.f64_or("window_J", J12_WINDOW));
    let points = j12_scan(&sizes, &ds, g, horizon, window);
    let mut table = Columnar::new(&["n_side", "d", "j12", "j12_spectral", "ambiguous", "c_max"]).meta("g", g);
    for p in &points {
        match &p.run {
            Some(r) => table.push(vec![p.n_side as f64, p.d as f64, r.estimate.j12, r.estimate.spectral, f64::from(u8::from(r.estimate.ambiguous)), r.c_max]),
            None => table.push(vec![p.n_side as f64, p.d as f64, f64::NAN, f64::NAN, f64::NAN, f64::NAN]),
        }
        if let Some(e) = &p.error {
            table = table.meta(&format!("hole_L{}_d{}", p.n_side, p.d), e);
        }
    }
    out.table("j12_scan.csv", &table)?;
    Ok(())
}

fn chern(config: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let n_path = config.usize_or("n_path", 41);
    let n_kz = config.usize_or("n_kz", 41);
    let grid = config.usize_or("grid", CHERN_GRID);
    let cells: Vec<(f64, f64)> = linspace(0.0, 1.0, n_path).into_iter().flat_map(|s| linspace(-PI, PI, n_kz).into_iter().map(move |k| (s, k))).collect();
    use rayon::prelude::*;
    let rows: Vec<Vec<f64>> = cells
        .par_iter()
        .map(|&(s, kz)| {
            let p = chern_path(s);
            let closed = chern_closed_form(1.0, 1.5 * s, 3.5 * (1.0 - s), kz) as f64;
            match chern_reduced_with(&p, kz, grid) {
                Ok((c, residual)) => vec![s, 1.5 * s, 3.5 * (1.0 - s), kz, c as f64, closed, residual],
                Err(_) => vec![s, 1.5 * s, 3.5 * (1.0 - s), kz, f64::NAN, closed, f64::NAN],
            }
        })
        .collect();
    let mut table = Columnar::new(&["s", "Jprime_J", "m_J", "k_z", "chern", "closed_form", "residual"]).meta("grid", grid).meta("path", "(m, J') = (3.5 (1 - s), 1.5 s)");
    for r in rows {
        table.push(r);
    }
    out.table("chern.csv", &table)?;
    Ok(())
}

fn weyl_points(config: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let nodes = find_weyl_points(&config.model, config.f64_or("tol", 1e-10))?;
    let mut table = Columnar::new(&["kx", "ky", "kz", "chirality", "frequency", "residual", "flux_charge", "near_boundary"]);
    for n in &nodes {
        let flux = weyl_charge(&config.model, n).map_or(f64::NAN, f64::from);
        table.push(vec![n.k.x, n.k.y, n.k.z, n.chirality as f64, n.frequency, n.residual, flux, f64::from(u8::from(n.near_boundary))]);
    }
    let total: i32 = nodes.iter().map(|n| n.chirality).sum();
    out.table("weyl_points.csv", &table.meta("n_nodes", nodes.len()).meta("total_charge", total))?;
    Ok(())
}
