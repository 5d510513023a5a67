//! Scenario configuration: flat `[map]`, `[run]` and `[output]` sections of
//! `key = value` lines.
//!
//! ```text
//! [map]
//! n_q = 10
//! K = 1.41421356
//! M = 1000
//!
//! [run]
//! scenario = "custom"
//! steps = 2000
//! pair = [1, 3]
//!
//! [output]
//! dir = "out"
//! ```

use std::path::{Path, PathBuf};

use toml::{Table, Value};

use crate::dynamics::MapParams;
use crate::error::{Error, Result};

/// Default `M` values for the time-series scenario, expected ordering bottom to top.
pub const FIG1_MS: [u64; 7] = [10_000, 5_000, 300, 2_000, 500, 1_000, 700];
/// Initial momentum for entropy scenarios: alternating bits `…010101`
/// below the sign bit (341 for ten qubits).
///
/// A momentum eigenstate at 0 straddles the wraparound between slot 0 and
/// slot N-1, so the most significant qubit stays maximally mixed for any
/// spreading state. Alternating bits keep the start far from every carry
/// boundary.
pub fn entropy_n0(n_q: usize) -> i64 {
    (0..n_q.saturating_sub(1)).step_by(2).map(|b| 1i64 << b).sum()
}
pub const DEFAULT_STEPS: usize = 2000;
pub const DEFAULT_SWEEP_M: u64 = 300;

const MAP_KEYS: &[(&str, &str)] = &[
    ("n_q", "qubit count, 2..=26 (required)"),
    ("K", "chaos parameter K > 0 (default 1.4142135623730951)"),
    ("M", "integer or list; T = 2πM/2^n_q (default per scenario)"),
];

const RUN_KEYS: &[(&str, &str)] = &[
    ("scenario", "fig1_timeseries | fig2_pairs | fig3_saturation_vs_ell | fig4_adjacent_pairs | fig5_block_entropy | fig6_single_qubit_entropy | custom (default custom)"),
    ("steps", "Floquet steps per run; sweeps use at least 2t*+200 (default 2000)"),
    ("pair", "one pair [i, j] or \"i,j\""),
    ("pairs", "list of pairs (default per scenario)"),
    ("block", "one block \"a..b\""),
    ("blocks", "list of blocks"),
    ("initial", "eigenstate | flat (default eigenstate)"),
    ("n0", "initial momentum, or left edge of a flat state (default 0; 341 for entropy scenarios)"),
    ("flat_width", "width of a flat random-phase state (default 1)"),
    ("seed", "seed for flat random-phase states; ignored for eigenstates (default 0)"),
    ("ell_min", "smallest nominal ℓ of a sweep (default 0.01)"),
    ("ell_max", "largest nominal ℓ of a sweep (default 512)"),
    ("points_per_decade", "sweep grid density (default 10)"),
    ("ells", "explicit list of nominal ℓ, overrides the grid (entropy default 16, 32, 64, 128, 256)"),
    ("entropy_threshold", "S_c for counting entangled qubits (default 1; 0.5 for single-qubit entropy)"),
    ("track_ell", "record the windowed ℓ fit every step (default false)"),
    ("workers", "sweep worker threads (default: all cores)"),
    ("max_degraded_fraction", "fraction of failed data points tolerated before exit 3 (default 0.05)"),
];

const OUTPUT_KEYS: &[(&str, &str)] = &[("dir", "output directory (required)")];

/// One line per key with its meaning and default, for `--help`.
pub fn documented_keys() -> String {
    let mut out = String::new();
    for (section, keys) in [("map", MAP_KEYS), ("run", RUN_KEYS), ("output", OUTPUT_KEYS)] {
        out.push_str(&format!("[{section}]\n"));
        for (k, doc) in keys {
            out.push_str(&format!("  {k:<22} {doc}\n"));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Fig1Timeseries,
    Fig2Pairs,
    Fig3SaturationVsEll,
    Fig4AdjacentPairs,
    Fig5BlockEntropy,
    Fig6SingleQubitEntropy,
    Custom,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        ScenarioKind::Fig1Timeseries,
        ScenarioKind::Fig2Pairs,
        ScenarioKind::Fig3SaturationVsEll,
        ScenarioKind::Fig4AdjacentPairs,
        ScenarioKind::Fig5BlockEntropy,
        ScenarioKind::Fig6SingleQubitEntropy,
        ScenarioKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Fig1Timeseries => "fig1_timeseries",
            ScenarioKind::Fig2Pairs => "fig2_pairs",
            ScenarioKind::Fig3SaturationVsEll => "fig3_saturation_vs_ell",
            ScenarioKind::Fig4AdjacentPairs => "fig4_adjacent_pairs",
            ScenarioKind::Fig5BlockEntropy => "fig5_block_entropy",
            ScenarioKind::Fig6SingleQubitEntropy => "fig6_single_qubit_entropy",
            ScenarioKind::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn is_sweep(self) -> bool {
        matches!(
            self,
            ScenarioKind::Fig3SaturationVsEll | ScenarioKind::Fig4AdjacentPairs
        )
    }

    pub fn is_entropy(self) -> bool {
        matches!(
            self,
            ScenarioKind::Fig5BlockEntropy | ScenarioKind::Fig6SingleQubitEntropy
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    Eigenstate { n0: i64 },
    Flat { left: i64, width: f64, seed: u64 },
}

/// Geometric grid of nominal localization lengths.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub enum EllGrid {
    Geometric { min: f64, max: f64, per_decade: usize },
    Explicit(Vec<f64>),
}

impl EllGrid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            EllGrid::Explicit(v) => v.clone(),
            EllGrid::Geometric { min, max, per_decade } => {
                let decades = (max / min).log10();
                let count = (decades * *per_decade as f64 + 1e-9).floor() as usize;
                (0..=count)
                    .map(|k| min * 10f64.powf(k as f64 / *per_decade as f64))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub n_q: usize,
    pub big_k: f64,
    pub ms: Vec<u64>,
    pub steps: usize,
    pub initial: InitialState,
    pub pairs: Vec<(usize, usize)>,
    pub blocks: Vec<Vec<usize>>,
    pub grid: EllGrid,
    pub entropy_threshold: f64,
    pub track_ell: bool,
    pub workers: Option<usize>,
    pub max_degraded_fraction: f64,
    pub output_dir: PathBuf,
}

impl Scenario {
    /// Defaults of `kind` with the given register size and output directory.
    pub fn preset(kind: ScenarioKind, n_q: usize, output_dir: impl Into<PathBuf>) -> Self {
        let pairs = match kind {
            ScenarioKind::Fig1Timeseries | ScenarioKind::Custom => vec![(1, 3)],
            ScenarioKind::Fig2Pairs | ScenarioKind::Fig3SaturationVsEll => (2..=5).map(|j| (1, j)).collect(),
            ScenarioKind::Fig4AdjacentPairs => (1..=5).map(|i| (i, i + 1)).collect(),
            _ => Vec::new(),
        };
        let pairs = pairs.into_iter().filter(|&(_, j)| j <= n_q).collect();
        let ms = match kind {
            ScenarioKind::Fig1Timeseries => FIG1_MS.to_vec(),
            ScenarioKind::Fig2Pairs => vec![800],
            _ => vec![DEFAULT_SWEEP_M],
        };
        let grid = if kind.is_entropy() {
            EllGrid::Explicit((4..=8).map(|k| 2f64.powi(k)).collect())
        } else {
            EllGrid::Geometric {
                min: 0.01,
                max: 512.0,
                per_decade: 10,
            }
        };
        let n0 = if kind.is_entropy() { entropy_n0(n_q) } else { 0 };
        Self {
            kind,
            n_q,
            big_k: std::f64::consts::SQRT_2,
            ms,
            steps: DEFAULT_STEPS,
            initial: InitialState::Eigenstate { n0 },
            pairs,
            blocks: Vec::new(),
            grid,
            // a single qubit never exceeds one bit
            entropy_threshold: if kind == ScenarioKind::Fig6SingleQubitEntropy {
                0.5
            } else {
                1.0
            },
            track_ell: false,
            workers: None,
            max_degraded_fraction: 0.05,
            output_dir: output_dir.into(),
        }
    }

    /// Map parameters for every non-sweep run, in configured order.
    pub fn map_params(&self) -> Result<Vec<MapParams>> {
        self.ms
            .iter()
            .map(|&m| MapParams::new(self.n_q, self.big_k, m))
            .collect()
    }
}

fn hint(key: &str) -> Option<&'static str> {
    match key {
        "kick_strength" | "k" | "kick" => Some("k is derived; set K and M"),
        "T" | "t" | "hbar" | "planck" => Some("T is derived; set M and n_q"),
        "nq" | "qubits" | "num_qubits" | "n" => Some("did you mean n_q?"),
        "ell" | "l" | "localization_length" => Some("set ell_min/ell_max or ells under [run]"),
        "m" => Some("did you mean M?"),
        "output" | "out" | "path" => Some("set dir under [output]"),
        _ => None,
    }
}

fn check_keys(section: &str, table: &Table, allowed: &[(&str, &str)]) -> Result<()> {
    for key in table.keys() {
        if !allowed.iter().any(|(k, _)| k == key) {
            let names: Vec<&str> = allowed.iter().map(|(k, _)| *k).collect();
            let tail = match hint(key) {
                Some(h) => format!("; {h}"),
                None => format!("; allowed keys: {}", names.join(", ")),
            };
            return Err(Error::Config(format!("unknown key {section}.{key}{tail}")));
        }
    }
    Ok(())
}

fn type_error(key: &str, expected: &str, v: &Value) -> Error {
    Error::Config(format!("{key}: expected {expected}, found {}", v.type_str()))
}

fn as_f64(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(type_error(key, "a number", v)),
    }
}

fn as_uint(key: &str, v: &Value) -> Result<u64> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        Value::Integer(i) => Err(Error::Config(format!("{key}: must be non-negative, got {i}"))),
        _ => Err(type_error(key, "an integer", v)),
    }
}

fn as_int(key: &str, v: &Value) -> Result<i64> {
    match v {
        Value::Integer(i) => Ok(*i),
        _ => Err(type_error(key, "an integer", v)),
    }
}

fn as_str<'a>(key: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str().ok_or_else(|| type_error(key, "a string", v))
}

/// `"i,j"` or `[i, j]`.
pub fn parse_pair(key: &str, v: &Value) -> Result<(usize, usize)> {
    let parts: Vec<u64> = match v {
        Value::String(s) => s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Config(format!("{key}: bad pair {s:?}")))
            })
            .collect::<Result<_>>()?,
        Value::Array(a) => a.iter().map(|x| as_uint(key, x)).collect::<Result<_>>()?,
        _ => return Err(type_error(key, "a pair like [1, 3] or \"1,3\"", v)),
    };
    match parts[..] {
        [i, j] if i >= 1 && i < j => Ok((i as usize, j as usize)),
        _ => Err(Error::Config(format!("{key}: a pair needs 1 <= i < j, got {parts:?}"))),
    }
}

/// `"a..b"` (inclusive) or an explicit ascending list.
pub fn parse_block(key: &str, v: &Value) -> Result<Vec<usize>> {
    let labels: Vec<usize> = match v {
        Value::String(s) => {
            let (a, b) = s
                .split_once("..")
                .ok_or_else(|| Error::Config(format!("{key}: expected \"a..b\", got {s:?}")))?;
            let a: usize = a
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{key}: bad block {s:?}")))?;
            let b: usize = b
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{key}: bad block {s:?}")))?;
            (a..=b).collect()
        }
        Value::Array(a) => a
            .iter()
            .map(|x| as_uint(key, x).map(|u| u as usize))
            .collect::<Result<_>>()?,
        _ => return Err(type_error(key, "a block like \"1..5\"", v)),
    };
    if labels.is_empty() || labels[0] == 0 || labels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!(
            "{key}: block labels must be ascending and >= 1, got {labels:?}"
        )));
    }
    Ok(labels)
}

fn list<'a>(key: &str, v: &'a Value) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| type_error(key, "a list", v))
}

pub fn parse_config(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<Scenario> {
    let root: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
    let mut sections = [Table::new(), Table::new(), Table::new()];
    for (name, value) in &root {
        let slot = match name.as_str() {
            "map" => 0,
            "run" => 1,
            "output" => 2,
            other => {
                let tail = hint(other).map(|h| format!("; {h}")).unwrap_or_default();
                return Err(Error::Config(format!(
                    "unknown section or top-level key {other:?}; expected [map], [run] and [output]{tail}"
                )));
            }
        };
        sections[slot] = value
            .as_table()
            .cloned()
            .ok_or_else(|| Error::Config(format!("{name} must be a section")))?;
    }
    let [map, run, output] = sections;
    check_keys("map", &map, MAP_KEYS)?;
    check_keys("run", &run, RUN_KEYS)?;
    check_keys("output", &output, OUTPUT_KEYS)?;

    let kind = match run.get("scenario") {
        Some(v) => {
            let s = as_str("run.scenario", v)?;
            ScenarioKind::parse(s).ok_or_else(|| {
                let names: Vec<_> = ScenarioKind::ALL.iter().map(|k| k.name()).collect();
                Error::Config(format!(
                    "run.scenario: unknown scenario {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })?
        }
        None => ScenarioKind::Custom,
    };
    let n_q = match map.get("n_q") {
        Some(v) => as_uint("map.n_q", v)? as usize,
        None => return Err(Error::Config("missing required key map.n_q".into())),
    };
    crate::statevec::check_qubits(n_q).map_err(|e| Error::Config(format!("map.n_q: {e}")))?;
    let dir = match output.get("dir") {
        Some(v) => PathBuf::from(as_str("output.dir", v)?),
        None => return Err(Error::Config("missing required key output.dir".into())),
    };
    let mut sc = Scenario::preset(kind, n_q, dir);

    if let Some(v) = map.get("K") {
        sc.big_k = as_f64("map.K", v)?;
        if !(sc.big_k > 0.0) || !sc.big_k.is_finite() {
            return Err(Error::Config(format!(
                "map.K: must be positive (chaotic regime), got {}",
                sc.big_k
            )));
        }
    }
    if let Some(v) = map.get("M") {
        sc.ms = match v {
            Value::Array(a) => a.iter().map(|x| as_uint("map.M", x)).collect::<Result<_>>()?,
            _ => vec![as_uint("map.M", v)?],
        };
        if sc.ms.is_empty() || sc.ms.contains(&0) {
            return Err(Error::Config("map.M: values must be positive integers".into()));
        }
        if (kind.is_sweep() || kind.is_entropy()) && sc.ms.len() != 1 {
            return Err(Error::Config(format!("map.M: {} sweeps K at one fixed M", kind.name())));
        }
    }
    if let Some(v) = run.get("steps") {
        sc.steps = as_uint("run.steps", v)? as usize;
    }
    if run.contains_key("pair") && run.contains_key("pairs") {
        return Err(Error::Config("run.pair and run.pairs are mutually exclusive".into()));
    }
    if let Some(v) = run.get("pair") {
        sc.pairs = vec![parse_pair("run.pair", v)?];
    }
    if let Some(v) = run.get("pairs") {
        sc.pairs = list("run.pairs", v)?
            .iter()
            .map(|p| parse_pair("run.pairs", p))
            .collect::<Result<_>>()?;
    }
    if run.contains_key("block") && run.contains_key("blocks") {
        return Err(Error::Config("run.block and run.blocks are mutually exclusive".into()));
    }
    if let Some(v) = run.get("block") {
        sc.blocks = vec![parse_block("run.block", v)?];
    }
    if let Some(v) = run.get("blocks") {
        sc.blocks = list("run.blocks", v)?
            .iter()
            .map(|b| parse_block("run.blocks", b))
            .collect::<Result<_>>()?;
    }
    for &(i, j) in &sc.pairs {
        if j > n_q {
            return Err(Error::Config(format!("pair ({i}, {j}) exceeds n_q = {n_q}")));
        }
    }
    for b in &sc.blocks {
        if *b.last().unwrap() > n_q || b.len() >= n_q {
            return Err(Error::Config(format!(
                "block {b:?} must be a proper subset of 1..={n_q}"
            )));
        }
    }

    let n0 = match run.get("n0") {
        Some(v) => as_int("run.n0", v)?,
        None => match sc.initial {
            InitialState::Eigenstate { n0 } => n0,
            InitialState::Flat { left, .. } => left,
        },
    };
    let initial = match run.get("initial").map(|v| as_str("run.initial", v)).transpose()? {
        None | Some("eigenstate") => {
            if run.contains_key("flat_width") {
                return Err(Error::Config(
                    "run.flat_width only applies with initial = \"flat\"".into(),
                ));
            }
            InitialState::Eigenstate { n0 }
        }
        Some("flat") => InitialState::Flat {
            left: n0,
            width: run
                .get("flat_width")
                .map(|v| as_f64("run.flat_width", v))
                .transpose()?
                .unwrap_or(1.0),
            seed: run
                .get("seed")
                .map(|v| as_uint("run.seed", v))
                .transpose()?
                .unwrap_or(0),
        },
        Some(other) => {
            return Err(Error::Config(format!(
                "run.initial: expected \"eigenstate\" or \"flat\", got {other:?}"
            )))
        }
    };
    sc.initial = initial;

    if let Some(v) = run.get("ells") {
        let ells: Vec<f64> = list("run.ells", v)?
            .iter()
            .map(|x| as_f64("run.ells", x))
            .collect::<Result<_>>()?;
        if ells.is_empty() || ells.iter().any(|l| !(*l > 0.0)) {
            return Err(Error::Config("run.ells: values must be positive".into()));
        }
        for key in ["ell_min", "ell_max", "points_per_decade"] {
            if run.contains_key(key) {
                return Err(Error::Config(format!("run.{key} conflicts with run.ells")));
            }
        }
        sc.grid = EllGrid::Explicit(ells);
    } else if ["ell_min", "ell_max", "points_per_decade"]
        .iter()
        .any(|k| run.contains_key(*k))
    {
        let (mut min, mut max, mut per_decade) = (0.01, 512.0, 10);
        if let EllGrid::Geometric {
            min: a,
            max: b,
            per_decade: c,
        } = sc.grid
        {
            (min, max, per_decade) = (a, b, c);
        }
        if let Some(v) = run.get("ell_min") {
            min = as_f64("run.ell_min", v)?;
        }
        if let Some(v) = run.get("ell_max") {
            max = as_f64("run.ell_max", v)?;
        }
        if let Some(v) = run.get("points_per_decade") {
            per_decade = as_uint("run.points_per_decade", v)? as usize;
        }
        sc.grid = geometric_grid(min, max, per_decade)?;
    }
    if let Some(v) = run.get("entropy_threshold") {
        sc.entropy_threshold = as_f64("run.entropy_threshold", v)?;
    }
    if let Some(v) = run.get("track_ell") {
        sc.track_ell = v.as_bool().ok_or_else(|| type_error("run.track_ell", "a boolean", v))?;
    }
    if let Some(v) = run.get("workers") {
        let w = as_uint("run.workers", v)? as usize;
        if w == 0 {
            return Err(Error::Config("run.workers: must be at least 1".into()));
        }
        sc.workers = Some(w);
    }
    if let Some(v) = run.get("max_degraded_fraction") {
        sc.max_degraded_fraction = as_f64("run.max_degraded_fraction", v)?;
        if !(0.0..=1.0).contains(&sc.max_degraded_fraction) {
            return Err(Error::Config("run.max_degraded_fraction: must lie in [0, 1]".into()));
        }
    }
    sc.map_params().map_err(|e| Error::Config(format!("map: {e}")))?;
    Ok(sc)
}

/// Validated geometric grid.
pub fn geometric_grid(min: f64, max: f64, per_decade: usize) -> Result<EllGrid> {
    if !(min > 0.0) || !(max >= min) || !max.is_finite() {
        return Err(Error::Config(format!(
            "ell grid needs 0 < ell_min <= ell_max, got [{min}, {max}]"
        )));
    }
    if per_decade == 0 {
        return Err(Error::Config("points_per_decade must be at least 1".into()));
    }
    Ok(EllGrid::Geometric { min, max, per_decade })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        "[map]\nn_q = 10\nK = 1.41421356\nM = 1000\n[run]\nsteps = 2000\npair = [1, 3]\n[output]\ndir = \"out\"\n";

    #[test]
    fn minimal_config() {
        let sc = parse_config_str(MINIMAL).unwrap();
        assert_eq!(sc.kind, ScenarioKind::Custom);
        assert_eq!(sc.n_q, 10);
        assert_eq!(sc.ms, vec![1000]);
        assert_eq!(sc.pairs, vec![(1, 3)]);
        assert_eq!(sc.steps, 2000);
        assert_eq!(sc.output_dir, PathBuf::from("out"));
    }

    #[test]
    fn rejects_non_positive_k() {
        for k in ["0", "-1.0"] {
            let text = MINIMAL.replace("K = 1.41421356", &format!("K = {k}"));
            let err = parse_config_str(&text).unwrap_err().to_string();
            assert!(err.contains("map.K"), "{err}");
        }
    }

    #[test]
    fn unknown_key_suggestion() {
        let text = MINIMAL.replace("M = 1000", "M = 1000\nkick_strength = 3.0");
        let err = parse_config_str(&text).unwrap_err().to_string();
        assert!(err.contains("kick_strength"), "{err}");
        assert!(err.contains("k is derived; set K and M"), "{err}");

        let text = MINIMAL.replace("steps = 2000", "steps = 2000\nfoo = 1");
        let err = parse_config_str(&text).unwrap_err().to_string();
        assert!(err.contains("run.foo") && err.contains("allowed keys"), "{err}");

        let text = format!("{MINIMAL}[extra]\nx = 1\n");
        assert!(parse_config_str(&text).is_err());
    }

    #[test]
    fn missing_and_mistyped() {
        let err = parse_config_str("[map]\nK = 1.0\n[output]\ndir = \"o\"\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("map.n_q"), "{err}");
        let err = parse_config_str("[map]\nn_q = 10\n").unwrap_err().to_string();
        assert!(err.contains("output.dir"), "{err}");
        let err = parse_config_str(&MINIMAL.replace("steps = 2000", "steps = \"many\""))
            .unwrap_err()
            .to_string();
        assert!(err.contains("run.steps"), "{err}");
        let err = parse_config_str(&MINIMAL.replace("pair = [1, 3]", "pair = [3, 1]"))
            .unwrap_err()
            .to_string();
        assert!(err.contains("run.pair"), "{err}");
    }

    #[test]
    fn presets() {
        let sc = parse_config_str("[map]\nn_q = 10\n[run]\nscenario = \"fig1_timeseries\"\n[output]\ndir = \"o\"\n")
            .unwrap();
        assert_eq!(sc.ms, FIG1_MS.to_vec());
        assert_eq!(sc.pairs, vec![(1, 3)]);

        let sc = parse_config_str("[map]\nn_q = 10\n[run]\nscenario = \"fig5_block_entropy\"\n[output]\ndir = \"o\"\n")
            .unwrap();
        assert_eq!(sc.initial, InitialState::Eigenstate { n0: 341 });
        assert_eq!(sc.grid.points(), vec![16.0, 32.0, 64.0, 128.0, 256.0]);
    }

    #[test]
    fn entropy_start() {
        assert_eq!(entropy_n0(10), 341);
        assert_eq!(entropy_n0(8), 85);
        assert_eq!(entropy_n0(3), 1);
    }

    #[test]
    fn grid_points() {
        let g = geometric_grid(0.01, 512.0, 10).unwrap().points();
        assert_eq!(g.len(), 48);
        assert_eq!(g[0], 0.01);
        assert!(*g.last().unwrap() <= 512.0);
        let g = geometric_grid(1.0, 100.0, 2).unwrap().points();
        assert_eq!(g.len(), 5);
        assert!((g[4] - 100.0).abs() < 1e-9);
        assert!(geometric_grid(0.0, 1.0, 2).is_err());
        assert!(geometric_grid(1.0, 0.5, 2).is_err());
    }

    #[test]
    fn blocks_and_flat_state() {
        let text = MINIMAL.replace(
            "pair = [1, 3]",
            "blocks = [\"1..3\", [2, 5]]\ninitial = \"flat\"\nflat_width = 4.0\nseed = 9\nn0 = 10",
        );
        let sc = parse_config_str(&text).unwrap();
        assert_eq!(sc.blocks, vec![vec![1, 2, 3], vec![2, 5]]);
        assert_eq!(
            sc.initial,
            InitialState::Flat {
                left: 10,
                width: 4.0,
                seed: 9
            }
        );
        let text = MINIMAL.replace("pair = [1, 3]", "flat_width = 9.0");
        assert!(parse_config_str(&text).is_err());
    }
}
