//! Scenario configuration: TOML file layered under command-line overrides,
//! resolved against presets and defaults.
//!
//! Precedence is flags > file > preset > built-in defaults. Both the file and
//! the flags are first turned into TOML tables and merged key by key, so any
//! file key can be overridden from the command line.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use super::ScenarioError;
use crate::inequality::Variant;
use crate::lhv::SearchBounds;

type Result<T> = std::result::Result<T, ScenarioError>;

fn config_err(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Config(msg.into())
}

fn missing(field: &str) -> ScenarioError {
    config_err(format!("missing field `{field}`"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Evaluate,
    Sweep,
    LhvSearch,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Evaluate => "evaluate",
            ScenarioKind::Sweep => "sweep",
            ScenarioKind::LhvSearch => "lhv-search",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(config_err(format!(
                "unknown output format `{other}` (expected csv or json)"
            ))),
        }
    }
}

/// Named starting points covering the standard scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Vacuum,
    /// `(|01⟩ + |10⟩)/√2`
    SinglePhoton,
    /// `|11⟩`
    TwinPhoton,
    Tmsv,
    /// Unconstrained LHV search, where `X = Y = 1, N = 0` is feasible.
    CsCounterModel,
    /// Constrained LHV search.
    ConstrainedSampler,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Vacuum,
        Preset::SinglePhoton,
        Preset::TwinPhoton,
        Preset::Tmsv,
        Preset::CsCounterModel,
        Preset::ConstrainedSampler,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Vacuum => "vacuum",
            Preset::SinglePhoton => "single-photon",
            Preset::TwinPhoton => "twin-photon",
            Preset::Tmsv => "tmsv",
            Preset::CsCounterModel => "cs-counter-model",
            Preset::ConstrainedSampler => "constrained-sampler",
        }
    }

    fn is_lhv(self) -> bool {
        matches!(self, Preset::CsCounterModel | Preset::ConstrainedSampler)
    }

    fn state(self) -> Option<StateSpec> {
        match self {
            Preset::Vacuum => Some(StateSpec::Vacuum),
            Preset::SinglePhoton => Some(StateSpec::SinglePhoton),
            Preset::TwinPhoton => Some(StateSpec::TwinPhoton),
            Preset::Tmsv => Some(StateSpec::Tmsv { r: 0.5 }),
            Preset::CsCounterModel | Preset::ConstrainedSampler => None,
        }
    }

    fn dims(self) -> Option<Vec<usize>> {
        match self {
            Preset::Tmsv => Some(vec![20, 20]),
            p if p.is_lhv() => None,
            _ => Some(vec![2, 2]),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
            config_err(format!("unknown preset `{s}` (expected one of {})", names.join(", ")))
        })
    }
}

/// Which two-mode state a quantum scenario evaluates.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Vacuum,
    SinglePhoton,
    TwinPhoton,
    Tmsv {
        r: f64,
    },
    /// Explicit amplitudes over the row-major product basis.
    Custom {
        amplitudes: Vec<[f64; 2]>,
    },
    /// Seeded random mixed state of the given rank.
    Random {
        rank: usize,
    },
}

impl StateSpec {
    pub fn family(&self) -> &'static str {
        match self {
            StateSpec::Vacuum => "vacuum",
            StateSpec::SinglePhoton => "single-photon",
            StateSpec::TwinPhoton => "twin-photon",
            StateSpec::Tmsv { .. } => "tmsv",
            StateSpec::Custom { .. } => "custom",
            StateSpec::Random { .. } => "random",
        }
    }

    pub fn r(&self) -> Option<f64> {
        match self {
            StateSpec::Tmsv { r } => Some(*r),
            _ => None,
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, StateSpec::Random { .. })
    }
}

/// Parameter axes of a sweep, expanded lexicographically in the order
/// r, η₁, η₂, d, k.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    /// Only meaningful for the TMSV family; `None` elsewhere.
    pub r: Vec<Option<f64>>,
    /// `(η₁, η₂)` pairs, already expanded.
    pub efficiencies: Vec<(f64, f64)>,
    /// Per-mode dimension; `None` keeps the base `dims`.
    pub d: Vec<Option<usize>>,
    pub k: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct GridPoint {
    pub r_index: usize,
    pub eta_index: usize,
    pub d_index: usize,
    pub k_index: usize,
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        self.r.len() * self.efficiencies.len() * self.d.len() * self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::with_capacity(self.len());
        for r_index in 0..self.r.len() {
            for eta_index in 0..self.efficiencies.len() {
                for d_index in 0..self.d.len() {
                    for k_index in 0..self.k.len() {
                        out.push(GridPoint {
                            r_index,
                            eta_index,
                            d_index,
                            k_index,
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LhvSettings {
    pub constrained: bool,
    pub variant: Variant,
    pub budget: u64,
    pub bounds: SearchBounds,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    /// `None` writes to standard output.
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

/// Fully resolved scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub label: String,
    /// `None` for LHV searches.
    pub state: Option<StateSpec>,
    pub dims: Vec<usize>,
    pub order_k: u32,
    pub variants: Vec<Variant>,
    pub eta1: f64,
    pub eta2: f64,
    pub sweep: Option<SweepGrid>,
    pub lhv: Option<LhvSettings>,
    pub seed: Option<u64>,
    pub output: OutputSpec,
}

// Raw layer as read from TOML; every key optional.

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: Option<ScenarioKind>,
    label: Option<String>,
    preset: Option<String>,
    dims: Option<Vec<usize>>,
    order_k: Option<u32>,
    variants: Option<Vec<String>>,
    seed: Option<u64>,
    #[serde(default)]
    state: RawState,
    #[serde(default)]
    efficiency: RawEfficiency,
    sweep: Option<RawSweep>,
    #[serde(default)]
    lhv: RawLhv,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    family: Option<String>,
    r: Option<f64>,
    amplitudes: Option<Vec<[f64; 2]>>,
    rank: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEfficiency {
    eta1: Option<f64>,
    eta2: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    r: Option<Vec<f64>>,
    /// Symmetric axis: `η₁ = η₂`.
    eta: Option<Vec<f64>>,
    eta1: Option<Vec<f64>>,
    eta2: Option<Vec<f64>>,
    d: Option<Vec<usize>>,
    k: Option<Vec<u32>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLhv {
    constrained: Option<bool>,
    variant: Option<String>,
    budget: Option<u64>,
    amplitude_bound: Option<f64>,
    intensity_max: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    format: Option<OutputFormat>,
}

/// Recursively overlays `top` onto `base`; tables merge, everything else
/// is replaced.
pub fn merge_tables(base: &mut Table, top: Table) {
    for (key, value) in top {
        match (base.get_mut(&key), value) {
            (Some(Value::Table(b)), Value::Table(t)) => merge_tables(b, t),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

/// Inserts `value` at a dotted key path such as `lhv.budget`.
pub fn set_path(table: &mut Table, dotted: &str, value: Value) -> Result<()> {
    let mut parts: Vec<&str> = dotted.split('.').collect();
    let last = parts
        .pop()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| config_err(format!("empty key in `{dotted}`")))?;
    let mut cursor = table;
    for part in parts {
        let entry = cursor
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cursor = entry
            .as_table_mut()
            .ok_or_else(|| config_err(format!("`{part}` in `{dotted}` is not a table")))?;
    }
    cursor.insert(last.to_string(), value);
    Ok(())
}

/// Parses a `key=value` override; the value is read as a TOML literal and
/// falls back to a bare string.
pub fn parse_assignment(table: &mut Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| config_err(format!("override `{assignment}` is not of the form key=value")))?;
    let value = format!("v = {}", raw.trim())
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.trim().to_string()));
    set_path(table, key.trim(), value)
}

pub fn read_config_file(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    text.parse::<Table>()
        .map_err(|e| config_err(format!("{}: {e}", path.display())))
}

impl ScenarioConfig {
    /// Resolves the merged file-and-flags table for the given subcommand.
    pub fn from_table(kind: ScenarioKind, table: Table) -> Result<Self> {
        let raw: RawConfig = Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| config_err(e.message().to_string()))?;
        raw.resolve(kind)
    }

    pub fn load(kind: ScenarioKind, file: Option<&Path>, overrides: Table) -> Result<Self> {
        let mut table = match file {
            Some(p) => read_config_file(p)?,
            None => Table::new(),
        };
        merge_tables(&mut table, overrides);
        Self::from_table(kind, table)
    }

    /// Per-mode dimensions for a given sweep `d` (or the base dims).
    pub fn dims_for(&self, d: Option<usize>) -> Vec<usize> {
        match d {
            Some(d) => vec![d; self.dims.len()],
            None => self.dims.clone(),
        }
    }
}

fn check_eta(name: &str, eta: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&eta) {
        Ok(eta)
    } else {
        Err(config_err(format!("`{name}` must lie in [0, 1], got {eta}")))
    }
}

fn nonempty<T>(name: &str, v: Vec<T>) -> Result<Vec<T>> {
    if v.is_empty() {
        Err(config_err(format!("grid `{name}` is empty")))
    } else {
        Ok(v)
    }
}

fn check_dims(dims: &[usize], k: u32) -> Result<()> {
    if dims.len() != 2 {
        return Err(config_err(format!("`dims` must list two modes, got {dims:?}")));
    }
    let min = k as usize + 1;
    if let Some(d) = dims.iter().find(|&&d| d < min) {
        return Err(config_err(format!(
            "`dims` entries must be at least {min} for order k={k}, got {d}"
        )));
    }
    Ok(())
}

impl RawConfig {
    fn resolve(self, kind: ScenarioKind) -> Result<ScenarioConfig> {
        if let Some(file_kind) = self.kind {
            if file_kind != kind {
                return Err(config_err(format!(
                    "config declares kind `{}` but `{}` was requested",
                    file_kind.as_str(),
                    kind.as_str()
                )));
            }
        }
        let preset = self.preset.as_deref().map(Preset::from_str).transpose()?;
        let output = OutputSpec {
            format: self
                .output
                .format
                .or_else(|| {
                    let ext = self.output.path.as_ref()?.extension()?.to_str()?;
                    ext.parse().ok()
                })
                .unwrap_or_default(),
            path: self.output.path,
        };
        let variants = match self.variants {
            Some(v) => v
                .iter()
                .map(|s| s.parse::<Variant>())
                .collect::<std::result::Result<Vec<_>, _>>()?,
            None => Variant::DEFAULT.to_vec(),
        };
        if variants.is_empty() {
            return Err(config_err("`variants` is empty"));
        }
        let order_k = self.order_k.unwrap_or(1);
        if order_k == 0 {
            return Err(config_err("`order_k` must be at least 1"));
        }

        if kind == ScenarioKind::LhvSearch {
            return resolve_lhv(self.lhv, preset, self.label, self.seed, variants, output);
        }

        if let Some(p) = preset.filter(|p| p.is_lhv()) {
            return Err(config_err(format!(
                "preset `{p}` describes a hidden-variable search; use the lhv-search subcommand"
            )));
        }
        let state = resolve_state(self.state, preset)?;
        let dims = self
            .dims
            .or_else(|| preset.and_then(Preset::dims))
            .ok_or_else(|| missing("dims"))?;
        check_dims(&dims, order_k)?;
        if state.is_stochastic() && self.seed.is_none() {
            return Err(missing("seed"));
        }
        let eta1 = check_eta("efficiency.eta1", self.efficiency.eta1.unwrap_or(1.0))?;
        let eta2 = check_eta("efficiency.eta2", self.efficiency.eta2.unwrap_or(1.0))?;

        let sweep = match kind {
            ScenarioKind::Sweep => Some(resolve_sweep(
                self.sweep.unwrap_or_default(),
                &state,
                &dims,
                order_k,
                (eta1, eta2),
            )?),
            _ => None,
        };
        let label = self
            .label
            .or_else(|| preset.map(|p| p.name().to_string()))
            .unwrap_or_else(|| state.family().to_string());

        Ok(ScenarioConfig {
            kind,
            label,
            state: Some(state),
            dims,
            order_k,
            variants,
            eta1,
            eta2,
            sweep,
            lhv: None,
            seed: self.seed,
            output,
        })
    }
}

fn resolve_state(raw: RawState, preset: Option<Preset>) -> Result<StateSpec> {
    let from_preset = preset.and_then(Preset::state);
    let family = match (raw.family.as_deref(), &from_preset) {
        (Some(f), _) => f.to_string(),
        (None, Some(s)) => s.family().to_string(),
        (None, None) => return Err(missing("state.family")),
    };
    let spec = match family.as_str() {
        "vacuum" => StateSpec::Vacuum,
        "single-photon" => StateSpec::SinglePhoton,
        "twin-photon" => StateSpec::TwinPhoton,
        "tmsv" => {
            let r = raw
                .r
                .or_else(|| from_preset.as_ref().and_then(StateSpec::r))
                .ok_or_else(|| missing("state.r"))?;
            if !r.is_finite() || r < 0.0 {
                return Err(config_err(format!("`state.r` must be finite and >= 0, got {r}")));
            }
            StateSpec::Tmsv { r }
        }
        "custom" => StateSpec::Custom {
            amplitudes: raw.amplitudes.ok_or_else(|| missing("state.amplitudes"))?,
        },
        "random" => StateSpec::Random {
            rank: raw.rank.unwrap_or(1).max(1),
        },
        other => {
            return Err(config_err(format!(
                "unknown state family `{other}` (expected vacuum, single-photon, twin-photon, tmsv, custom or random)"
            )))
        }
    };
    Ok(spec)
}

fn resolve_sweep(
    raw: RawSweep,
    state: &StateSpec,
    dims: &[usize],
    order_k: u32,
    base_eta: (f64, f64),
) -> Result<SweepGrid> {
    let r = match raw.r {
        Some(grid) => {
            if !matches!(state, StateSpec::Tmsv { .. }) {
                return Err(config_err("`sweep.r` applies only to the tmsv state family"));
            }
            let grid = nonempty("sweep.r", grid)?;
            if let Some(bad) = grid.iter().find(|r| !r.is_finite() || **r < 0.0) {
                return Err(config_err(format!(
                    "`sweep.r` entries must be finite and >= 0, got {bad}"
                )));
            }
            grid.into_iter().map(Some).collect()
        }
        None => vec![state.r()],
    };

    let efficiencies = if let Some(eta) = raw.eta {
        if raw.eta1.is_some() || raw.eta2.is_some() {
            return Err(config_err(
                "`sweep.eta` cannot be combined with `sweep.eta1`/`sweep.eta2`",
            ));
        }
        nonempty("sweep.eta", eta)?
            .into_iter()
            .map(|e| check_eta("sweep.eta", e).map(|e| (e, e)))
            .collect::<Result<Vec<_>>>()?
    } else {
        let e1 = nonempty("sweep.eta1", raw.eta1.unwrap_or(vec![base_eta.0]))?;
        let e2 = nonempty("sweep.eta2", raw.eta2.unwrap_or(vec![base_eta.1]))?;
        let mut pairs = Vec::with_capacity(e1.len() * e2.len());
        for &a in &e1 {
            for &b in &e2 {
                pairs.push((check_eta("sweep.eta1", a)?, check_eta("sweep.eta2", b)?));
            }
        }
        pairs
    };

    let k = nonempty("sweep.k", raw.k.unwrap_or(vec![order_k]))?;
    if k.contains(&0) {
        return Err(config_err("`sweep.k` entries must be at least 1"));
    }
    let d = match raw.d {
        Some(d) => {
            let d = nonempty("sweep.d", d)?;
            for &dd in &d {
                for &kk in &k {
                    check_dims(&[dd, dd], kk)?;
                }
            }
            d
        }
        None => {
            for &kk in &k {
                check_dims(dims, kk)?;
            }
            Vec::new()
        }
    };

    Ok(SweepGrid {
        r,
        efficiencies,
        d: if d.is_empty() {
            vec![None]
        } else {
            d.into_iter().map(Some).collect()
        },
        k,
    })
}

fn resolve_lhv(
    raw: RawLhv,
    preset: Option<Preset>,
    label: Option<String>,
    seed: Option<u64>,
    variants: Vec<Variant>,
    output: OutputSpec,
) -> Result<ScenarioConfig> {
    if let Some(p) = preset.filter(|p| !p.is_lhv()) {
        return Err(config_err(format!(
            "preset `{p}` is a quantum state; lhv-search needs cs-counter-model or constrained-sampler"
        )));
    }
    let constrained = raw
        .constrained
        .or(preset.map(|p| p == Preset::ConstrainedSampler))
        .ok_or_else(|| missing("lhv.constrained"))?;
    let variant = match raw.variant {
        Some(v) => v.parse()?,
        None => Variant::R1,
    };
    let budget = raw
        .budget
        .or(preset.map(|_| 100_000))
        .ok_or_else(|| missing("lhv.budget"))?;
    if budget == 0 {
        return Err(config_err("`lhv.budget` must be at least 1"));
    }
    let defaults = SearchBounds::default();
    let bounds = SearchBounds {
        amplitude: raw.amplitude_bound.unwrap_or(defaults.amplitude),
        intensity_max: raw.intensity_max.unwrap_or(defaults.intensity_max),
    };
    if !bounds.amplitude.is_finite() || bounds.amplitude <= 0.0 {
        return Err(config_err("`lhv.amplitude_bound` must be positive and finite"));
    }
    if !bounds.intensity_max.is_finite() || bounds.intensity_max < 0.0 {
        return Err(config_err("`lhv.intensity_max` must be nonnegative and finite"));
    }
    let seed = seed.ok_or_else(|| missing("seed"))?;
    let label = label
        .or_else(|| preset.map(|p| p.name().to_string()))
        .unwrap_or_else(|| {
            if constrained {
                "lhv-constrained"
            } else {
                "lhv-unconstrained"
            }
            .to_string()
        });
    Ok(ScenarioConfig {
        kind: ScenarioKind::LhvSearch,
        label,
        state: None,
        dims: Vec::new(),
        order_k: 1,
        variants,
        eta1: 1.0,
        eta2: 1.0,
        sweep: None,
        lhv: Some(LhvSettings {
            constrained,
            variant,
            budget,
            bounds,
        }),
        seed: Some(seed),
        output,
    })
}
