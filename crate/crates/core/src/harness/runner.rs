//! Scenario execution: per-point simulation, parallel sweeps, tables and summaries.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::analysis::{
    self, estimate_ell_from_profile, localization_time, mean_with_ci, momentum_period, peak_location, theoretical_ell,
    FitReport, LocalizationEstimate, ProfileAverage, Saturation, PROFILE_AVERAGE_STEPS, SATURATION_WINDOW,
};
use crate::dynamics::{FloquetOperator, MapParams};
use crate::entanglement::{block_entropy, concurrence, reduce_to_pair};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::harness::config::{InitialState, Scenario, ScenarioKind};
use crate::harness::output::{self, format_float, SaturationRow, Table, TimeSeries};
use crate::statevec::{flat_phase_localized_state, momentum_eigenstate, StateVector};

/// What to measure while evolving one parameter point.
#[derive(Debug, Clone, Default)]
pub struct Probes {
    pub pairs: Vec<(usize, usize)>,
    pub blocks: Vec<Vec<usize>>,
    /// First step at which block entropies are recorded.
    pub blocks_from: usize,
    pub track_ell: bool,
}

/// A data point that could not be computed.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Degraded {
    pub m: u64,
    pub big_k: f64,
    pub step: usize,
    pub observable: String,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct PointResult {
    pub params: MapParams,
    pub steps: usize,
    /// Observable name and `(step, value)` samples, in probe order.
    pub observables: Vec<(String, Vec<(usize, f64)>)>,
    /// Windowed fit of the profile averaged over the final steps.
    pub profile: std::result::Result<LocalizationEstimate, String>,
    pub degraded: Vec<Degraded>,
    pub attempted: usize,
}

impl PointResult {
    pub fn values(&self, name: &str) -> Vec<f64> {
        self.observables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.iter().map(|s| s.1).collect())
            .unwrap_or_default()
    }
}

pub fn pair_name(i: usize, j: usize) -> String {
    format!("C({i},{j})")
}

pub fn block_name(block: &[usize]) -> String {
    let contiguous = block.windows(2).all(|w| w[1] == w[0] + 1);
    match block {
        [q] => format!("S({q})"),
        [a, .., b] if contiguous => format!("S({a}..{b})"),
        _ => format!(
            "S({})",
            block.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")
        ),
    }
}

pub const ELL_FIT: &str = "ell_fit";

pub fn initial_state(n_q: usize, init: &InitialState) -> Result<StateVector> {
    match *init {
        InitialState::Eigenstate { n0 } => momentum_eigenstate(n_q, n0),
        InitialState::Flat { left, width, seed } => flat_phase_localized_state(n_q, width, left, seed),
    }
}

/// Evolves one parameter point and samples the probes after every step.
pub fn simulate_point(
    params: &MapParams,
    init: &InitialState,
    steps: usize,
    probes: &Probes,
    exec: Execution,
) -> Result<PointResult> {
    let op = FloquetOperator::new(params).with_execution(exec);
    let mut psi = initial_state(params.n_q(), init)?;
    let window = momentum_period(params) / 2;
    let avg_from = steps.saturating_sub(PROFILE_AVERAGE_STEPS) + 1;
    let mut avg = ProfileAverage::new(params.dim());

    let names: Vec<String> = probes
        .pairs
        .iter()
        .map(|&(i, j)| pair_name(i, j))
        .chain(probes.blocks.iter().map(|b| block_name(b)))
        .chain(probes.track_ell.then(|| ELL_FIT.to_string()))
        .collect();
    let mut samples: Vec<Vec<(usize, f64)>> = vec![Vec::new(); names.len()];
    let mut degraded = Vec::new();
    let mut attempted = 0;
    let fail = |step: usize, name: &str, e: Error, degraded: &mut Vec<Degraded>| -> Result<()> {
        match e {
            Error::Numerical(_) | Error::InsufficientSupport(_) | Error::Domain(_) => {
                degraded.push(Degraded {
                    m: params.m(),
                    big_k: params.big_k(),
                    step,
                    observable: name.to_string(),
                    message: e.to_string(),
                });
                Ok(())
            }
            other => Err(other),
        }
    };

    for step in 1..=steps {
        op.apply(&mut psi)?;
        let mut slot = 0;
        for &(i, j) in &probes.pairs {
            attempted += 1;
            match reduce_to_pair(&psi, i, j).and_then(|rho| concurrence(&rho)) {
                Ok(c) => samples[slot].push((step, c.value)),
                Err(e) => fail(step, &names[slot], e, &mut degraded)?,
            }
            slot += 1;
        }
        for block in &probes.blocks {
            if step >= probes.blocks_from {
                attempted += 1;
                match block_entropy(&psi, block) {
                    Ok(s) => samples[slot].push((step, s)),
                    Err(e) => fail(step, &names[slot], e, &mut degraded)?,
                }
            }
            slot += 1;
        }
        if probes.track_ell {
            attempted += 1;
            match estimate_ell_from_profile(&psi.probabilities(), window) {
                Ok(est) => samples[slot].push((step, est.ell)),
                Err(e) => fail(step, ELL_FIT, e, &mut degraded)?,
            }
        }
        if step >= avg_from {
            avg.add(&psi);
        }
    }
    let profile = if avg.count() > 0 {
        estimate_ell_from_profile(&avg.mean(), window).map_err(|e| e.to_string())
    } else {
        Err("no steps evolved".to_string())
    };
    Ok(PointResult {
        params: *params,
        steps,
        observables: names.into_iter().zip(samples).collect(),
        profile,
        degraded,
        attempted,
    })
}

/// Runs `f` over `0..n`, in parallel when requested, preserving index order.
pub fn map_points<T, F>(n: usize, exec: Execution, workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel && n > 1 {
        use rayon::prelude::*;
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(w) = workers {
            builder = builder.num_threads(w);
        }
        let pool = builder
            .build()
            .map_err(|e| Error::Argument(format!("cannot start worker pool: {e}")))?;
        return pool.install(|| (0..n).into_par_iter().map(&f).collect());
    }
    let _ = (exec, workers);
    (0..n).map(f).collect()
}

/// Everything a scenario produces, before it touches the filesystem.
#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub scenario: Scenario,
    pub tables: Vec<(String, Table)>,
    pub time_series: Option<TimeSeries>,
    pub saturation: Vec<SaturationRow>,
    pub points: Vec<PointResult>,
    pub summary: Value,
    pub degraded: Vec<Degraded>,
    pub attempted: usize,
}

impl ScenarioOutput {
    pub fn degraded_fraction(&self) -> f64 {
        if self.attempted == 0 {
            0.0
        } else {
            self.degraded.len() as f64 / self.attempted as f64
        }
    }

    pub fn exceeds_degradation(&self) -> bool {
        self.degraded_fraction() > self.scenario.max_degraded_fraction
    }
}

/// Steps for a sweep point: the configured count, stretched to `2t* + 200`.
pub fn sweep_steps(configured: usize, ell: f64) -> usize {
    configured.max(2 * localization_time(ell) + SATURATION_WINDOW)
}

pub fn compute_scenario(sc: &Scenario) -> Result<ScenarioOutput> {
    compute_scenario_with(sc, Execution::default())
}

/// Like [`compute_scenario`], with an explicit executor for parameter points.
pub fn compute_scenario_with(sc: &Scenario, exec: Execution) -> Result<ScenarioOutput> {
    match sc.kind {
        ScenarioKind::Fig3SaturationVsEll | ScenarioKind::Fig4AdjacentPairs => sweep(sc, exec),
        ScenarioKind::Fig5BlockEntropy | ScenarioKind::Fig6SingleQubitEntropy => entropy(sc, exec),
        ScenarioKind::Fig1Timeseries | ScenarioKind::Fig2Pairs | ScenarioKind::Custom => timeseries(sc, exec),
    }
}

fn inner_exec(points: usize, exec: Execution) -> Execution {
    if points > 1 {
        Execution::Sequential
    } else {
        exec
    }
}

fn collect_degraded(points: &[PointResult]) -> (Vec<Degraded>, usize) {
    let degraded = points.iter().flat_map(|p| p.degraded.iter().cloned()).collect();
    (degraded, points.iter().map(|p| p.attempted).sum())
}

fn localization_table(points: &[PointResult]) -> Table {
    let mut t = Table::new(&[
        "M",
        "K",
        "nominal_ell",
        "theory_ell",
        "ell_fit",
        "r_squared",
        "residual",
        "momentum_period",
    ]);
    for p in points {
        let (fit, r2, res) = match &p.profile {
            Ok(e) => (format_float(e.ell), format_float(e.r_squared), format_float(e.residual)),
            Err(_) => ("nan".into(), "nan".into(), "nan".into()),
        };
        t.push(vec![
            p.params.m().to_string(),
            format_float(p.params.big_k()),
            format_float(p.params.nominal_ell()),
            format_float(theoretical_ell(p.params.k())),
            fit,
            r2,
            res,
            momentum_period(&p.params).to_string(),
        ]);
    }
    t
}

fn point_json(p: &PointResult) -> Value {
    json!({
        "M": p.params.m(),
        "K": p.params.big_k(),
        "T": p.params.t(),
        "k": p.params.k(),
        "nominal_ell": p.params.nominal_ell(),
        "theory_ell": theoretical_ell(p.params.k()),
        "steps": p.steps,
        "profile_fit": match &p.profile {
            Ok(e) => serde_json::to_value(e).unwrap_or(Value::Null),
            Err(msg) => json!({ "error": msg }),
        },
    })
}

fn saturation_rows(p: &PointResult, pairs: &[(usize, usize)], ell_axis: f64) -> Vec<SaturationRow> {
    let t_star_ell = p.params.nominal_ell();
    pairs
        .iter()
        .filter_map(|&(i, j)| {
            let values = p.values(&pair_name(i, j));
            analysis::saturation_stats(&values, t_star_ell)
                .ok()
                .map(|s| SaturationRow {
                    ell: ell_axis,
                    pair_i: i,
                    pair_j: j,
                    concurrence_sat: s.mean,
                    ci_halfwidth: s.ci_halfwidth,
                })
        })
        .collect()
}

fn timeseries(sc: &Scenario, exec: Execution) -> Result<ScenarioOutput> {
    let params = sc.map_params()?;
    let probes = Probes {
        pairs: sc.pairs.clone(),
        blocks: sc.blocks.clone(),
        blocks_from: 1,
        track_ell: sc.track_ell,
    };
    let inner = inner_exec(params.len(), exec);
    let points = map_points(params.len(), exec, sc.workers, |k| {
        simulate_point(&params[k], &sc.initial, sc.steps, &probes, inner)
    })?;

    let multi = points.len() > 1;
    let mut series = TimeSeries::new();
    for p in &points {
        for (name, samples) in &p.observables {
            let label = if multi {
                format!("M={}:{name}", p.params.m())
            } else {
                name.clone()
            };
            for &(step, v) in samples {
                series.push(step, &label, v)?;
            }
        }
    }
    let saturation: Vec<SaturationRow> = points
        .iter()
        .flat_map(|p| saturation_rows(p, &sc.pairs, p.params.nominal_ell()))
        .collect();

    let mut summary = json!({
        "scenario": sc.kind.name(),
        "points": points.iter().map(|p| {
            let mut v = point_json(p);
            v["saturation"] = json!(saturation_rows(p, &sc.pairs, p.params.nominal_ell()));
            v
        }).collect::<Vec<_>>(),
    });
    if sc.kind == ScenarioKind::Fig1Timeseries {
        if let Some(&(i, j)) = sc.pairs.first() {
            let mut order: Vec<(u64, f64)> = saturation
                .iter()
                .filter(|r| (r.pair_i, r.pair_j) == (i, j))
                .zip(&points)
                .map(|(r, p)| (p.params.m(), r.concurrence_sat))
                .collect();
            order.sort_by(|a, b| a.1.total_cmp(&b.1));
            let ordered: Vec<u64> = order.iter().map(|o| o.0).collect();
            summary["ordering_bottom_to_top"] = json!(ordered);
            summary["matches_configured_order"] = json!(ordered == sc.ms);
        }
    }
    let (degraded, attempted) = collect_degraded(&points);
    let mut tables = vec![("localization.csv".to_string(), localization_table(&points))];
    if !saturation.is_empty() {
        tables.push(("saturation.csv".into(), Table::from(saturation.as_slice())));
    }
    Ok(ScenarioOutput {
        scenario: sc.clone(),
        tables,
        time_series: Some(series),
        saturation,
        points,
        summary,
        degraded,
        attempted,
    })
}

/// Saturation values of one pair as `(ℓ, C)` points, optionally restricted.
pub fn pair_curve(rows: &[SaturationRow], pair: (usize, usize), lo: f64, hi: f64) -> Vec<(f64, f64)> {
    rows.iter()
        .filter(|r| (r.pair_i, r.pair_j) == pair && r.ell >= lo && r.ell <= hi)
        .map(|r| (r.ell, r.concurrence_sat))
        .collect()
}

fn fit_json(fit: Result<FitReport>) -> Value {
    match fit {
        Ok(f) => serde_json::to_value(f).unwrap_or(Value::Null),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

/// Power-law fit on the small-ℓ branch of pair (1,2).
pub fn small_ell_fit(rows: &[SaturationRow]) -> Result<FitReport> {
    let pts: Vec<_> = pair_curve(rows, (1, 2), 0.03, 1.0)
        .into_iter()
        .filter(|p| p.1 > 0.0)
        .collect();
    analysis::fit_power_law(&pts)
}

/// Exponential fit on pair (1,3) over `4 <= ℓ <= 30`, zero points excluded.
pub fn large_ell_fit(rows: &[SaturationRow]) -> Result<FitReport> {
    let pts: Vec<_> = pair_curve(rows, (1, 3), 4.0, 30.0)
        .into_iter()
        .filter(|p| p.1 > 0.0)
        .collect();
    analysis::fit_exponential(&pts)
}

/// `C(1,j+1)/C(1,j)` at the grid point nearest `ell`, for consecutive outer labels present.
pub fn coding_ratios(rows: &[SaturationRow], ell: f64) -> Option<(f64, Vec<(usize, f64)>)> {
    let nearest = rows
        .iter()
        .map(|r| r.ell)
        .min_by(|a, b| (a.ln() - ell.ln()).abs().total_cmp(&(b.ln() - ell.ln()).abs()))?;
    let at = |j: usize| {
        rows.iter()
            .find(|r| r.ell == nearest && r.pair_i == 1 && r.pair_j == j)
            .map(|r| r.concurrence_sat)
    };
    let ratios = (2..)
        .map_while(|j| Some((j, at(j)?, at(j + 1)?)))
        .map(|(j, a, b)| (j, b / a))
        .collect();
    Some((nearest, ratios))
}

fn sweep(sc: &Scenario, exec: Execution) -> Result<ScenarioOutput> {
    let ells = sc.grid.points();
    let m = sc.ms[0];
    let params: Vec<MapParams> = ells
        .iter()
        .map(|&l| MapParams::from_nominal_ell(sc.n_q, m, l))
        .collect::<Result<_>>()?;
    let probes = Probes {
        pairs: sc.pairs.clone(),
        blocks: Vec::new(),
        blocks_from: 1,
        track_ell: false,
    };
    let inner = inner_exec(params.len(), exec);
    let points = map_points(params.len(), exec, sc.workers, |k| {
        let steps = sweep_steps(sc.steps, ells[k]);
        simulate_point(&params[k], &sc.initial, steps, &probes, inner)
    })?;
    let saturation: Vec<SaturationRow> = points
        .iter()
        .zip(&ells)
        .flat_map(|(p, &l)| saturation_rows(p, &sc.pairs, l))
        .collect();

    let mut summary = json!({
        "scenario": sc.kind.name(),
        "M": m,
        "ell_axis": "nominal",
        "points": points.iter().map(point_json).collect::<Vec<_>>(),
    });
    match sc.kind {
        ScenarioKind::Fig3SaturationVsEll => {
            summary["small_ell_power_law"] = fit_json(small_ell_fit(&saturation));
            summary["large_ell_exponential"] = fit_json(large_ell_fit(&saturation));
            if let Some((at, ratios)) = coding_ratios(&saturation, 2.8) {
                summary["coding_ratios"] = json!({ "ell": at, "ratios": ratios });
            }
            let tail: Vec<f64> = pair_curve(&saturation, (1, 3), 0.0, f64::INFINITY)
                .iter()
                .rev()
                .take(3)
                .map(|p| p.1)
                .collect();
            summary["largest_ell_c13"] = json!(tail);
        }
        ScenarioKind::Fig4AdjacentPairs => {
            let peaks: Vec<Value> = sc
                .pairs
                .iter()
                .map(|&(i, j)| {
                    let peak = peak_location(&pair_curve(&saturation, (i, j), 0.0, f64::INFINITY));
                    json!({ "pair": [i, j], "peak_ell": peak.map(|p| p.0), "peak_c": peak.map(|p| p.1), "predicted": analysis::critical_ell(i) })
                })
                .collect();
            summary["peaks"] = json!(peaks);
        }
        _ => {}
    }
    let (degraded, attempted) = collect_degraded(&points);
    Ok(ScenarioOutput {
        scenario: sc.clone(),
        tables: vec![
            ("saturation.csv".into(), Table::from(saturation.as_slice())),
            ("localization.csv".into(), localization_table(&points)),
        ],
        time_series: None,
        saturation,
        points,
        summary,
        degraded,
        attempted,
    })
}

/// Mean block entropies over the saturation window, one per block.
pub fn entropy_profile(p: &PointResult, blocks: &[Vec<usize>]) -> Vec<Saturation> {
    blocks.iter().map(|b| mean_with_ci(&p.values(&block_name(b)))).collect()
}

/// Largest `m` whose prefix-block mean entropy exceeds `s_c`.
pub fn count_from_profile(prefix_entropies: &[f64], s_c: f64) -> usize {
    prefix_entropies
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > s_c)
        .map(|(k, _)| k + 1)
        .max()
        .unwrap_or(0)
}

fn entropy(sc: &Scenario, exec: Execution) -> Result<ScenarioOutput> {
    let ells = sc.grid.points();
    let m = sc.ms[0];
    let params: Vec<MapParams> = ells
        .iter()
        .map(|&l| MapParams::from_nominal_ell(sc.n_q, m, l))
        .collect::<Result<_>>()?;
    let prefix = sc.kind == ScenarioKind::Fig5BlockEntropy;
    let blocks: Vec<Vec<usize>> = if prefix {
        (1..sc.n_q).map(|m| (1..=m).collect()).collect()
    } else {
        (1..=sc.n_q).map(|q| vec![q]).collect()
    };
    let inner = inner_exec(params.len(), exec);
    let points = map_points(params.len(), exec, sc.workers, |k| {
        let steps = sweep_steps(sc.steps, ells[k]);
        let probes = Probes {
            pairs: Vec::new(),
            blocks: blocks.clone(),
            blocks_from: steps + 1 - SATURATION_WINDOW.min(steps),
            track_ell: false,
        };
        simulate_point(&params[k], &sc.initial, steps, &probes, inner)
    })?;

    let col = if prefix { "m" } else { "qubit" };
    let mut table = Table::new(&["ell", col, "entropy", "ci_halfwidth"]);
    let mut curves = Vec::new();
    for (p, &l) in points.iter().zip(&ells) {
        let prof = entropy_profile(p, &blocks);
        for (b, s) in blocks.iter().zip(&prof) {
            let label = if prefix { b.len() } else { b[0] };
            table.push(vec![
                format_float(l),
                label.to_string(),
                format_float(s.mean),
                format_float(s.ci_halfwidth),
            ]);
        }
        curves.push(prof.iter().map(|s| s.mean).collect::<Vec<f64>>());
    }
    let counts: Vec<usize> = curves
        .iter()
        .map(|c| {
            if prefix {
                count_from_profile(c, sc.entropy_threshold)
            } else {
                c.iter().filter(|s| **s > sc.entropy_threshold).count()
            }
        })
        .collect();
    // curves ordered in ℓ at every block size
    let ordered = curves.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| b >= a));
    let summary = json!({
        "scenario": sc.kind.name(),
        "M": m,
        "entropy_threshold": sc.entropy_threshold,
        "initial": sc.initial,
        "points": points.iter().zip(&curves).zip(&counts).map(|((p, c), n)| {
            let mut v = point_json(p);
            v["entropies"] = json!(c);
            v["entangled_count"] = json!(n);
            v
        }).collect::<Vec<_>>(),
        "counts": counts,
        "curves_ordered_in_ell": ordered,
        "counts_nondecreasing": counts.windows(2).all(|w| w[1] >= w[0]),
    });
    let (degraded, attempted) = collect_degraded(&points);
    Ok(ScenarioOutput {
        scenario: sc.clone(),
        tables: vec![
            ("entropy.csv".into(), table),
            ("localization.csv".into(), localization_table(&points)),
        ],
        time_series: None,
        saturation: Vec::new(),
        points,
        summary,
        degraded,
        attempted,
    })
}

/// Files written by [`write_outputs`].
#[derive(Debug, Clone)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub degraded_fraction: f64,
    pub exceeds_degradation: bool,
}

/// Writes every table, the time series (if any) and `summary.json` under `dir`.
pub fn write_outputs(out: &ScenarioOutput, dir: &Path) -> Result<RunReport> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    if let Some(series) = &out.time_series {
        if !series.is_empty() {
            let path = dir.join("timeseries.csv");
            output::emit_time_series(series, &path)?;
            files.push(path);
        }
    }
    for (name, table) in &out.tables {
        let path = dir.join(name);
        output::emit_csv(table, &path)?;
        files.push(path);
    }
    let mut summary = out.summary.clone();
    summary["config"] = serde_json::to_value(&out.scenario).unwrap_or(Value::Null);
    summary["degraded"] = json!(out.degraded);
    summary["degraded_fraction"] = json!(out.degraded_fraction());
    let path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Argument(e.to_string()))?;
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    files.push(path);
    Ok(RunReport {
        files,
        degraded_fraction: out.degraded_fraction(),
        exceeds_degradation: out.exceeds_degradation(),
    })
}

/// Computes a scenario and writes it to its configured output directory.
pub fn run_scenario(sc: &Scenario) -> Result<RunReport> {
    let out = compute_scenario(sc)?;
    write_outputs(&out, &sc.output_dir)
}
