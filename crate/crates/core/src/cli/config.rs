//! TOML run configuration: parsing, validation and `--override` handling.
//!
//! Every problem found is reported at once. Keys that are not understood —
//! misspellings, or keys that belong to another command — are errors.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::lattice::{Facet, Geometry, Hopping, ModelParams, Sublattice};
use crate::scenario::Configuration;

/// Commands understood by the front end, one per reproduced figure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Bands,
    PhaseDiagram,
    FermiArcs,
    BerrySurface,
    Evolve,
    BlochMap,
    Tof,
    Farfield,
    ChiralChannel,
    ConcurrenceScan,
    Cavity,
    J12Scan,
    Chern,
    WeylPoints,
}

impl Command {
    pub const ALL: [Command; 14] = [
        Command::Bands,
        Command::PhaseDiagram,
        Command::FermiArcs,
        Command::BerrySurface,
        Command::Evolve,
        Command::BlochMap,
        Command::Tof,
        Command::Farfield,
        Command::ChiralChannel,
        Command::ConcurrenceScan,
        Command::Cavity,
        Command::J12Scan,
        Command::Chern,
        Command::WeylPoints,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Bands => "bands",
            Command::PhaseDiagram => "phase-diagram",
            Command::FermiArcs => "fermi-arcs",
            Command::BerrySurface => "berry-surface",
            Command::Evolve => "evolve",
            Command::BlochMap => "bloch-map",
            Command::Tof => "tof",
            Command::Farfield => "farfield",
            Command::ChiralChannel => "chiral-channel",
            Command::ConcurrenceScan => "concurrence-scan",
            Command::Cavity => "cavity",
            Command::J12Scan => "j12-scan",
            Command::Chern => "chern",
            Command::WeylPoints => "weyl-points",
        }
    }

    /// Model used when the configuration has no `[model]` section.
    pub fn default_model(self) -> Configuration {
        match self {
            Command::ChiralChannel | Command::ConcurrenceScan | Command::Cavity | Command::J12Scan => Configuration::Chiral,
            Command::WeylPoints | Command::Chern => Configuration::I,
            _ => Configuration::II,
        }
    }

    /// Whether the command runs on a user-described finite lattice.
    pub fn uses_lattice(self) -> bool {
        matches!(self, Command::Evolve | Command::BlochMap | Command::Tof | Command::Farfield)
    }

    /// Experiment keys accepted by the command (besides `command`).
    fn keys(self) -> &'static [&'static str] {
        match self {
            Command::Bands => &["kind", "path_pi_units", "points_per_segment"],
            Command::PhaseDiagram => &["m_min_J", "m_max_J", "n_m", "Jprime_min_J", "Jprime_max_J", "n_Jprime"],
            Command::FermiArcs => &["omega_offset_J", "n_par", "n_z", "localization"],
            Command::BerrySurface => &["band", "n_par", "n_z"],
            Command::Evolve => &["t_final_J", "dt_J", "n_samples", "snapshot_times_J", "check_halving"],
            Command::BlochMap => &["t_J", "dt_J", "energy_window_J"],
            Command::Tof => &["times_J", "dt_J", "axis", "grid"],
            Command::Farfield => &["times_J", "dt_J", "array_facet", "g_over_J", "wavelength_a", "dipole", "n_theta", "n_phi"],
            Command::ChiralChannel => &["n_side", "n_z", "d", "g_over_J", "absorber_gamma_over_J", "absorber_layers", "t_final_J", "n_samples"],
            Command::ConcurrenceScan => {
                &["n_side", "n_z", "d_values", "g_values_J", "absorber_gamma_over_J", "absorber_layers", "t_final_J"]
            }
            Command::Cavity => &["n_side", "n_z", "d", "g_over_J", "t_final_J", "n_samples", "window_J"],
            Command::J12Scan => &["sizes", "d_values", "g_over_J", "t_final_J", "window_J"],
            Command::Chern => &["n_path", "n_kz", "grid"],
            Command::WeylPoints => &["tol"],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command '{s}' (expected one of {})", Command::ALL.map(Command::name).join(", ")))
    }
}

/// Slab used by the reciprocal-space commands.
#[derive(Clone, Debug, PartialEq)]
pub struct SlabSection {
    pub n_s: usize,
    pub termination: Sublattice,
}

/// Optional absorbing layers on some facets.
#[derive(Clone, Debug, PartialEq)]
pub struct Absorbers {
    pub facets: Vec<Facet>,
    pub gamma: f64,
    pub layers: usize,
}

/// Where an emitter sits.
#[derive(Clone, Debug, PartialEq)]
pub enum SiteRef {
    FacetCenter(Facet),
    Id(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmitterEntry {
    pub site: SiteRef,
    /// Detuning from the Weyl frequency.
    pub omega_offset: f64,
    pub g: f64,
    pub gamma0: f64,
}

/// Validated run configuration. Experiment keys are kept as a checked table
/// and read through the typed accessors below.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub threads: Option<usize>,
    pub model: ModelParams,
    /// `(J, J', m, phi)` when the model is a simplified one.
    pub reduced: Option<[f64; 4]>,
    pub slab: SlabSection,
    pub geometry: Option<Geometry>,
    pub absorbers: Option<Absorbers>,
    pub emitters: Vec<EmitterEntry>,
    pub experiment: Table,
}

impl RunConfig {
    pub fn f64_or(&self, key: &str, default: f64) -> f64 {
        self.experiment.get(key).and_then(as_f64).unwrap_or(default)
    }

    pub fn usize_or(&self, key: &str, default: usize) -> usize {
        self.experiment.get(key).and_then(Value::as_integer).map_or(default, |v| v as usize)
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.experiment.get(key).and_then(Value::as_str).unwrap_or(default)
    }

    pub fn bool_or(&self, key: &str, default: bool) -> bool {
        self.experiment.get(key).and_then(Value::as_bool).unwrap_or(default)
    }

    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> Vec<f64> {
        match self.experiment.get(key).and_then(Value::as_array) {
            Some(a) => a.iter().filter_map(as_f64).collect(),
            None => default.to_vec(),
        }
    }

    pub fn usize_list_or(&self, key: &str, default: &[usize]) -> Vec<usize> {
        match self.experiment.get(key).and_then(Value::as_array) {
            Some(a) => a.iter().filter_map(Value::as_integer).map(|v| v as usize).collect(),
            None => default.to_vec(),
        }
    }

    pub fn has(&self, key: &str) -> bool {
        self.experiment.contains_key(key)
    }

    /// Nested numeric lists, e.g. a k-path.
    pub fn points(&self, key: &str) -> Option<Vec<Vec<f64>>> {
        let a = self.experiment.get(key)?.as_array()?;
        Some(a.iter().filter_map(Value::as_array).map(|p| p.iter().filter_map(as_f64).collect()).collect())
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::String(_) => "a string",
        Value::Integer(_) => "an integer",
        Value::Float(_) => "a float",
        Value::Boolean(_) => "a boolean",
        Value::Datetime(_) => "a datetime",
        Value::Array(_) => "an array",
        Value::Table(_) => "a table",
    }
}

/// Reads one table, remembering which keys were used and collecting errors.
struct Section<'a> {
    path: String,
    table: Option<&'a Table>,
    used: BTreeSet<String>,
    errors: &'a mut Vec<String>,
}

impl<'a> Section<'a> {
    fn new(path: &str, table: Option<&'a Table>, errors: &'a mut Vec<String>) -> Self {
        Section { path: path.to_string(), table, used: BTreeSet::new(), errors }
    }

    fn key(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn raw(&mut self, key: &str) -> Option<&'a Value> {
        self.used.insert(key.to_string());
        self.table?.get(key)
    }

    fn error(&mut self, msg: String) {
        self.errors.push(msg);
    }

    fn f64(&mut self, key: &str) -> Option<f64> {
        let v = self.raw(key)?;
        match as_f64(v) {
            Some(x) if x.is_finite() => Some(x),
            Some(_) => {
                let k = self.key(key);
                self.error(format!("{k} must be finite"));
                None
            }
            None => {
                let k = self.key(key);
                self.error(format!("{k} must be a number, got {}", type_name(v)));
                None
            }
        }
    }

    fn f64_in(&mut self, key: &str, lo: f64, hi: f64) -> Option<f64> {
        let x = self.f64(key)?;
        if x < lo || x > hi {
            let k = self.key(key);
            self.error(format!("{k} = {x} is outside [{lo}, {hi}]"));
            return None;
        }
        Some(x)
    }

    fn positive(&mut self, key: &str) -> Option<f64> {
        let x = self.f64(key)?;
        if !(x > 0.0) {
            let k = self.key(key);
            self.error(format!("{k} must be positive, got {x}"));
            return None;
        }
        Some(x)
    }

    fn uint(&mut self, key: &str, min: usize) -> Option<usize> {
        let v = self.raw(key)?;
        match v.as_integer() {
            Some(i) if i >= min as i64 => Some(i as usize),
            Some(i) => {
                let k = self.key(key);
                self.error(format!("{k} must be at least {min}, got {i}"));
                None
            }
            None => {
                let k = self.key(key);
                self.error(format!("{k} must be an integer, got {}", type_name(v)));
                None
            }
        }
    }

    fn string(&mut self, key: &str) -> Option<&'a str> {
        let v = self.raw(key)?;
        match v.as_str() {
            Some(s) => Some(s),
            None => {
                let k = self.key(key);
                self.error(format!("{k} must be a string, got {}", type_name(v)));
                None
            }
        }
    }

    fn boolean(&mut self, key: &str) -> Option<bool> {
        let v = self.raw(key)?;
        match v.as_bool() {
            Some(b) => Some(b),
            None => {
                let k = self.key(key);
                self.error(format!("{k} must be true or false, got {}", type_name(v)));
                None
            }
        }
    }

    fn parsed<T: FromStr<Err = E>, E: fmt::Display>(&mut self, key: &str) -> Option<T> {
        let s = self.string(key)?;
        match s.parse::<T>() {
            Ok(t) => Some(t),
            Err(e) => {
                let k = self.key(key);
                self.error(format!("{k}: {e}"));
                None
            }
        }
    }

    fn array(&mut self, key: &str) -> Option<&'a Vec<Value>> {
        let v = self.raw(key)?;
        match v.as_array() {
            Some(a) => Some(a),
            None => {
                let k = self.key(key);
                self.error(format!("{k} must be an array, got {}", type_name(v)));
                None
            }
        }
    }

    fn f64_list(&mut self, key: &str) -> Option<Vec<f64>> {
        let a = self.array(key)?;
        let out: Vec<f64> = a.iter().filter_map(as_f64).filter(|x| x.is_finite()).collect();
        if out.len() != a.len() {
            let k = self.key(key);
            self.error(format!("{k} must contain only finite numbers"));
            return None;
        }
        Some(out)
    }

    fn uint_list(&mut self, key: &str, min: usize) -> Option<Vec<usize>> {
        let a = self.array(key)?;
        let out: Vec<usize> = a.iter().filter_map(Value::as_integer).filter(|&i| i >= min as i64).map(|i| i as usize).collect();
        if out.len() != a.len() || out.is_empty() {
            let k = self.key(key);
            self.error(format!("{k} must be a non-empty list of integers >= {min}"));
            return None;
        }
        Some(out)
    }

    /// Report keys present in the table but never asked for.
    fn finish(self) {
        if let Some(t) = self.table {
            for k in t.keys() {
                if !self.used.contains(k) {
                    let full = if self.path.is_empty() { k.clone() } else { format!("{}.{k}", self.path) };
                    self.errors.push(format!("unknown key '{full}'"));
                }
            }
        }
    }
}

fn sub_table<'a>(root: &'a Table, key: &str, errors: &mut Vec<String>) -> Option<&'a Table> {
    match root.get(key) {
        None => None,
        Some(Value::Table(t)) => Some(t),
        Some(v) => {
            errors.push(format!("'{key}' must be a table, got {}", type_name(v)));
            None
        }
    }
}

fn parse_model(table: Option<&Table>, default: Configuration, errors: &mut Vec<String>) -> (ModelParams, Option<[f64; 4]>) {
    let Some(t) = table else { return (default.params(), Some(default.reduced())) };
    let mut s = Section::new("model", Some(t), errors);
    let preset = s.parsed::<Configuration, _>("config");
    let j = s.positive("J");
    let jp = s.f64("Jprime");
    let m = s.f64("m");
    let phi = s.f64("phi_pi_units");
    let eps = s.f64("epsilon");
    let table_given = t.contains_key("t");
    let hoppings = if table_given {
        let mut out = None;
        if let Some(rows) = s.array("t") {
            let parsed: Vec<Hopping> = rows
                .iter()
                .filter_map(|r| {
                    let r = r.as_array()?;
                    match (r.first().and_then(as_f64), r.get(1).and_then(as_f64), r.len()) {
                        (Some(a), Some(p), 2) if a >= 0.0 && a.is_finite() && p.is_finite() => Some(Hopping::new(a, p * PI)),
                        _ => None,
                    }
                })
                .collect();
            if parsed.len() == 10 && rows.len() == 10 {
                out = Some(parsed);
            } else {
                s.error("model.t must list 10 pairs [amplitude_J, phase_pi_units] with non-negative amplitudes".into());
            }
        }
        out
    } else {
        None
    };
    let reduced = [j.is_some(), jp.is_some(), phi.is_some()].iter().any(|&b| b);
    if preset.is_some() && (reduced || table_given || m.is_some()) {
        s.error("model.config cannot be combined with explicit model parameters".into());
    }
    if table_given && reduced {
        s.error("model.t cannot be combined with J / Jprime / phi_pi_units".into());
    }
    s.finish();
    let (base, red) = if let Some(p) = preset {
        (p.params(), Some(p.reduced()))
    } else if let Some(h) = hoppings {
        let arr: [Hopping; 10] = h.try_into().expect("ten hoppings");
        match ModelParams::new(arr, m.unwrap_or(0.0), 0.0) {
            Ok(p) => (p, None),
            Err(e) => {
                errors.push(format!("model: {e}"));
                (default.params(), None)
            }
        }
    } else if reduced || m.is_some() {
        let r = [j.unwrap_or(1.0), jp.unwrap_or(0.0), m.unwrap_or(0.0), phi.unwrap_or(0.0) * PI];
        (ModelParams::simplified(r[0], r[1], r[2], r[3]), Some(r))
    } else {
        (default.params(), Some(default.reduced()))
    };
    match eps {
        Some(e) => (base.with_onsite(e), red),
        None => (base, red),
    }
}

fn parse_slab(table: Option<&Table>, errors: &mut Vec<String>) -> SlabSection {
    let mut s = Section::new("slab", table, errors);
    let n_s = s.uint("N_s", 1).unwrap_or(crate::scenario::SLAB_ROWS);
    let termination = s.parsed::<Sublattice, _>("termination").unwrap_or(Sublattice::A);
    if n_s % 2 == 0 {
        s.error(format!("slab.N_s must be odd (got {n_s})"));
    }
    s.finish();
    SlabSection { n_s, termination }
}

fn parse_geometry(table: Option<&Table>, command: Command, errors: &mut Vec<String>) -> (Option<Geometry>, Option<Absorbers>) {
    let Some(t) = table else { return (None, None) };
    let mut s = Section::new("geometry", Some(t), errors);
    let builder = s.string("builder");
    let geometry = match builder {
        None => {
            s.error("geometry.builder is required (slab_block, rect_block, braid_box or cubic)".into());
            None
        }
        Some("slab_block") => match (s.uint("n_par", 1), s.uint("N_s", 1), s.uint("n_z", 1)) {
            (_, Some(n), _) if n % 2 == 0 => {
                s.error(format!("geometry.N_s must be odd (got {n})"));
                None
            }
            (Some(p), Some(n), Some(z)) => Some(Geometry::slab_block(p, n, z)),
            _ => None,
        },
        Some("rect_block") => {
            let (p, n, z) = (s.uint("n_par", 1), s.uint("n_perp", 1), s.uint("n_z", 1));
            let terms = s.array("terminations").map(|a| a.iter().filter_map(Value::as_str).map(str::parse::<Sublattice>).collect::<Vec<_>>());
            let terms = match terms {
                Some(v) if v.len() == 2 && v.iter().all(|r| r.is_ok()) => {
                    let v: Vec<Sublattice> = v.into_iter().map(|r| r.expect("checked")).collect();
                    Some([v[0], v[1]])
                }
                Some(_) => {
                    s.error("geometry.terminations must be two of \"A\" / \"B\"".into());
                    None
                }
                None => Some([Sublattice::A, Sublattice::A]),
            };
            match (p, n, z, terms) {
                (Some(p), Some(n), Some(z), Some(t)) => {
                    if (t[0] == t[1]) != (n % 2 == 1) {
                        s.error(format!("geometry.n_perp = {n} is inconsistent with terminations {:?}/{:?}", t[0], t[1]));
                        None
                    } else {
                        Some(Geometry::rect_block(p, n, z, t))
                    }
                }
                _ => None,
            }
        }
        Some("braid_box") => match (s.uint("n_side", 1), s.uint("n_z", 1)) {
            (Some(n), Some(z)) => Some(Geometry::braid_box(n, z)),
            _ => None,
        },
        Some("cubic") => match (s.uint("nx", 1), s.uint("ny", 1), s.uint("nz", 1)) {
            (Some(x), Some(y), Some(z)) => Some(Geometry::cubic(x, y, z)),
            _ => None,
        },
        Some(other) => {
            s.error(format!("geometry.builder '{other}' is not one of slab_block, rect_block, braid_box, cubic"));
            None
        }
    };
    let absorbers = if t.contains_key("absorber_facets") {
        let facets = s.array("absorber_facets").map(|a| a.iter().map(|v| v.as_str().unwrap_or("").parse::<Facet>()).collect::<Vec<_>>());
        let gamma = s.f64_in("absorber_gamma_over_J", 0.0, f64::MAX).unwrap_or(1.0);
        let layers = s.uint("absorber_layers", 1).unwrap_or(1);
        match facets {
            Some(f) if f.iter().all(|r| r.is_ok()) => Some(Absorbers { facets: f.into_iter().map(|r| r.expect("checked")).collect(), gamma, layers }),
            Some(f) => {
                for e in f.into_iter().filter_map(|r| r.err()) {
                    s.error(format!("geometry.absorber_facets: {e}"));
                }
                None
            }
            None => None,
        }
    } else {
        None
    };
    s.finish();
    if geometry.is_some() && !command.uses_lattice() {
        errors.push(format!("command '{command}' does not use a [geometry] section"));
    }
    (geometry, absorbers)
}

fn parse_emitters(root: &Table, command: Command, errors: &mut Vec<String>) -> Vec<EmitterEntry> {
    let Some(v) = root.get("emitters") else { return Vec::new() };
    let Some(list) = v.as_array() else {
        errors.push("'emitters' must be an array of tables ([[emitters]])".into());
        return Vec::new();
    };
    if !list.is_empty() && !matches!(command, Command::Evolve | Command::BlochMap | Command::Tof) {
        errors.push(format!("command '{command}' does not use an [[emitters]] list"));
    }
    let mut out = Vec::new();
    for (i, item) in list.iter().enumerate() {
        let path = format!("emitters[{i}]");
        let Some(t) = item.as_table() else {
            errors.push(format!("{path} must be a table"));
            continue;
        };
        let mut s = Section::new(&path, Some(t), errors);
        let facet = s.parsed::<Facet, _>("facet_center");
        let id = s.uint("site_id", 0);
        let g = s.f64_in("g_over_J", 0.0, f64::MAX);
        let omega_offset = s.f64("omega_offset_J").unwrap_or(0.0);
        let gamma0 = s.f64_in("gamma0_over_J", 0.0, f64::MAX).unwrap_or(0.0);
        let site = match (facet, id) {
            (Some(f), None) => Some(SiteRef::FacetCenter(f)),
            (None, Some(i)) => Some(SiteRef::Id(i)),
            (Some(_), Some(_)) => {
                s.error(format!("{path}: give either facet_center or site_id, not both"));
                None
            }
            (None, None) => {
                if !t.contains_key("facet_center") && !t.contains_key("site_id") {
                    s.error(format!("{path}: missing facet_center or site_id"));
                }
                None
            }
        };
        if g.is_none() && !t.contains_key("g_over_J") {
            s.error(format!("{path}: missing g_over_J"));
        }
        s.finish();
        if let (Some(site), Some(g)) = (site, g) {
            out.push(EmitterEntry { site, omega_offset, g, gamma0 });
        }
    }
    out
}

/// Type and range checks of the experiment keys of each command.
fn check_experiment(command: Command, table: &Table, errors: &mut Vec<String>) {
    let mut s = Section::new("experiment", Some(table), errors);
    s.raw("command");
    for key in command.keys() {
        if !table.contains_key(*key) {
            s.raw(key);
            continue;
        }
        match *key {
            "kind" => {
                if let Some(k) = s.string(key) {
                    if k != "bulk" && k != "slab" {
                        s.error(format!("experiment.kind must be \"bulk\" or \"slab\", got '{k}'"));
                    }
                }
            }
            "band" => {
                let v = s.raw(key).expect("present");
                if v.as_str() != Some("edge") && !v.as_integer().is_some_and(|i| i >= 0) {
                    s.error("experiment.band must be \"edge\" or a non-negative band index".into());
                }
            }
            "axis" => {
                if let Some(a) = s.string(key) {
                    if a.parse::<crate::analysis::Axis>().is_err() {
                        s.error(format!("experiment.axis must be perp, par or z, got '{a}'"));
                    }
                }
            }
            "grid" if command == Command::Tof => {
                if let Some(g) = s.string(key) {
                    if g != "surface" && g != "full" {
                        s.error(format!("experiment.grid must be \"surface\" or \"full\", got '{g}'"));
                    }
                }
            }
            "array_facet" => {
                s.parsed::<Facet, _>(key);
            }
            "check_halving" => {
                s.boolean(key);
            }
            "path_pi_units" => {
                if let Some(a) = s.array(key) {
                    let ok = a.len() >= 2 && a.iter().all(|p| p.as_array().is_some_and(|p| p.iter().all(|x| as_f64(x).is_some())));
                    if !ok {
                        s.error("experiment.path_pi_units must list at least two momentum points".into());
                    }
                }
            }
            "dipole" => {
                if let Some(d) = s.f64_list(key) {
                    if d.len() != 3 || d.iter().all(|&x| x == 0.0) {
                        s.error("experiment.dipole must be a non-zero 3-vector".into());
                    }
                }
            }
            "snapshot_times_J" | "times_J" | "g_values_J" => {
                if let Some(v) = s.f64_list(key) {
                    if v.iter().any(|&x| x < 0.0) {
                        s.error(format!("experiment.{key} must be non-negative"));
                    }
                }
            }
            "d_values" | "sizes" => {
                s.uint_list(key, 1);
            }
            "omega_offset_J" | "m_min_J" | "m_max_J" | "Jprime_min_J" | "Jprime_max_J" => {
                s.f64(key);
            }
            "localization" => {
                s.f64_in(key, 0.0, 1.0);
            }
            "absorber_gamma_over_J" | "g_over_J" => {
                s.f64_in(key, 0.0, f64::MAX);
            }
            "t_final_J" | "dt_J" | "t_J" | "energy_window_J" | "wavelength_a" | "window_J" | "tol" => {
                s.positive(key);
            }
            "n_samples" | "n_theta" => {
                s.uint(key, 2);
            }
            _ => {
                s.uint(key, 1);
            }
        }
    }
    s.finish();
}

/// Set `root[parts...] = value`, creating intermediate tables. Fails with
/// the offending key when a non-table lies on the path.
fn assign(root: &mut Table, parts: &[&str], value: Value) -> std::result::Result<(), String> {
    match parts {
        [] => Ok(()),
        [last] => {
            root.insert(last.to_string(), value);
            Ok(())
        }
        [head, rest @ ..] => match root.entry(head.to_string()).or_insert_with(|| Value::Table(Table::new())) {
            Value::Table(t) => assign(t, rest, value),
            _ => Err(head.to_string()),
        },
    }
}

/// Apply `key=value` overrides (dotted paths; the value is parsed as a TOML
/// value, falling back to a bare string).
pub fn apply_overrides(root: &mut Table, overrides: &[String]) -> Result<()> {
    let mut errors = Vec::new();
    for o in overrides {
        let Some((path, raw)) = o.split_once('=') else {
            errors.push(format!("override '{o}' is not of the form key=value"));
            continue;
        };
        let value = match format!("v = {raw}").parse::<Table>() {
            Ok(mut t) => t.remove("v").expect("parsed key"),
            Err(_) => Value::String(raw.trim().to_string()),
        };
        let parts: Vec<&str> = path.trim().split('.').collect();
        if let Err(p) = assign(root, &parts, value) {
            errors.push(format!("override '{o}': '{p}' is not a table"));
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Error::Config(errors))
    }
}

/// Parse and validate a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, &[])
}

/// [`parse_config`] after applying `--override` assignments.
pub fn parse_config_with(text: &str, overrides: &[String]) -> Result<RunConfig> {
    let mut root: Table = text.parse().map_err(|e: toml::de::Error| Error::Config(vec![format!("malformed TOML: {}", e.message())]))?;
    apply_overrides(&mut root, overrides)?;
    let mut errors = Vec::new();

    let experiment = match sub_table(&root, "experiment", &mut errors) {
        Some(t) => t.clone(),
        None => {
            if !root.contains_key("experiment") {
                errors.push("missing [experiment] section".into());
            }
            Table::new()
        }
    };
    let command = match experiment.get("command") {
        None => {
            errors.push("experiment.command is missing".into());
            None
        }
        Some(Value::String(s)) => match s.parse::<Command>() {
            Ok(c) => Some(c),
            Err(e) => {
                errors.push(format!("experiment.command: {e}"));
                None
            }
        },
        Some(v) => {
            errors.push(format!("experiment.command must be a string, got {}", type_name(v)));
            None
        }
    };

    let mut top = Section::new("", Some(&root), &mut errors);
    let threads = top.uint("threads", 1);
    for k in ["model", "slab", "geometry", "emitters", "experiment"] {
        top.raw(k);
    }
    top.finish();

    let Some(command) = command else {
        return Err(Error::Config(errors));
    };
    let model_table = sub_table(&root, "model", &mut errors);
    if model_table.is_some() && command == Command::Chern {
        errors.push("command 'chern' follows a fixed parameter path and does not use a [model] section".into());
    }
    let (model, reduced) = parse_model(model_table, command.default_model(), &mut errors);
    let slab = parse_slab(sub_table(&root, "slab", &mut errors), &mut errors);
    let (geometry, absorbers) = parse_geometry(sub_table(&root, "geometry", &mut errors), command, &mut errors);
    let emitters = parse_emitters(&root, command, &mut errors);
    check_experiment(command, &experiment, &mut errors);

    if errors.is_empty() {
        Ok(RunConfig { command, threads, model, reduced, slab, geometry, absorbers, emitters, experiment })
    } else {
        Err(Error::Config(errors))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn messages(r: Result<RunConfig>) -> Vec<String> {
        match r {
            Err(Error::Config(m)) => m,
            other => panic!("expected a configuration error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_reduced_model() {
        let c = parse_config("[model]\nJ = 1\nJprime = 0.4\nm = 0\nphi_pi_units = 0.5\n[experiment]\ncommand = \"weyl-points\"\n").unwrap();
        assert_eq!(c.model, ModelParams::simplified(1.0, 0.4, 0.0, FRAC_PI_2));
        assert_eq!(c.command, Command::WeylPoints);
    }

    #[test]
    fn even_slab_is_rejected() {
        let m = messages(parse_config("[slab]\nN_s = 4\n[experiment]\ncommand = \"fermi-arcs\"\n"));
        assert!(m.iter().any(|e| e.contains("N_s must be odd")), "{m:?}");
    }

    #[test]
    fn missing_command_is_listed() {
        let m = messages(parse_config("[experiment]\n"));
        assert!(m.iter().any(|e| e.contains("experiment.command is missing")), "{m:?}");
    }

    #[test]
    fn all_errors_are_reported() {
        let text = "thread = 3\n[model]\nJ = -1\nJprmie = 2\n[slab]\nN_s = 6\n[experiment]\ncommand = \"fermi-arcs\"\nn_par = \"many\"\nt_final_J = 3\n";
        let m = messages(parse_config(text));
        for needle in ["unknown key 'thread'", "model.J must be positive", "unknown key 'model.Jprmie'", "N_s must be odd", "experiment.n_par must be an integer", "unknown key 'experiment.t_final_J'"] {
            assert!(m.iter().any(|e| e.contains(needle)), "missing '{needle}' in {m:?}");
        }
    }

    #[test]
    fn overrides_replace_and_create_keys() {
        let base = "[experiment]\ncommand = \"evolve\"\nt_final_J = 10\n";
        let c = parse_config_with(base, &["experiment.t_final_J=2.5".into(), "model.config=III".into(), "threads=2".into()]).unwrap();
        assert_eq!(c.f64_or("t_final_J", 0.0), 2.5);
        assert_eq!(c.model, Configuration::III.params());
        assert_eq!(c.threads, Some(2));
        assert!(matches!(parse_config_with(base, &["nonsense".into()]), Err(Error::Config(_))));
    }

    #[test]
    fn full_hopping_table() {
        let mut rows = String::new();
        for j in 0..10 {
            rows.push_str(&format!("[{}, {}],", 1.0 + j as f64 * 0.1, 0.25 * j as f64));
        }
        let c = parse_config(&format!("[model]\nt = [{rows}]\nm = 0.3\nepsilon = 0.1\n[experiment]\ncommand = \"bands\"\n")).unwrap();
        assert!((c.model.hopping(3).amplitude - 1.2).abs() < 1e-15);
        assert!((c.model.hopping(5).phase.cos() + 1.0).abs() < 1e-15);
        assert_eq!((c.model.mass, c.model.onsite), (0.3, 0.1));
        let bad = messages(parse_config("[model]\nt = [[1, 0]]\n[experiment]\ncommand = \"bands\"\n"));
        assert!(bad.iter().any(|e| e.contains("10 pairs")));
    }

    #[test]
    fn geometry_and_emitters() {
        let text = "[geometry]\nbuilder = \"rect_block\"\nn_par = 5\nn_perp = 4\nn_z = 3\nterminations = [\"A\", \"B\"]\nabsorber_facets = [\"010\"]\nabsorber_gamma_over_J = 0.5\n\
                    [[emitters]]\nfacet_center = \"0-10\"\ng_over_J = 0.5\n[experiment]\ncommand = \"evolve\"\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.geometry, Some(Geometry::rect_block(5, 4, 3, [Sublattice::A, Sublattice::B])));
        assert_eq!(c.absorbers.as_ref().unwrap().facets, vec![Facet::PlusPerp]);
        assert_eq!(c.emitters[0].site, SiteRef::FacetCenter(Facet::MinusPerp));
        let bad = "[geometry]\nbuilder = \"rect_block\"\nn_par = 5\nn_perp = 4\nn_z = 3\n[[emitters]]\ng_over_J = 0.5\n[experiment]\ncommand = \"evolve\"\n";
        let m = messages(parse_config(bad));
        assert!(m.iter().any(|e| e.contains("inconsistent")) && m.iter().any(|e| e.contains("missing facet_center")), "{m:?}");
    }

    #[test]
    fn keys_of_other_commands_are_rejected() {
        let m = messages(parse_config("[experiment]\ncommand = \"chern\"\ng_over_J = 0.3\n"));
        assert!(m.iter().any(|e| e.contains("unknown key 'experiment.g_over_J'")));
        let m = messages(parse_config("[experiment]\ncommand = \"fly\"\n"));
        assert!(m.iter().any(|e| e.contains("unknown command 'fly'")));
    }
}
