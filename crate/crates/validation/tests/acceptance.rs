//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qsm_core::dynamics::{FloquetOperator, MapParams};
use qsm_core::entanglement::{concurrence, reduce_to_block, reduce_to_pair, von_neumann_entropy, DensityMatrix};
use qsm_core::fft::Dft;
use qsm_core::harness::config::{InitialState, Scenario, ScenarioKind, FIG1_MS};
use qsm_core::harness::runner::{self, Probes};
use qsm_core::harness::{compute_scenario, write_outputs, ScenarioOutput};
use qsm_core::oracle;
use qsm_core::statevec::{momentum_eigenstate, random_state, Basis, StateVector};
use qsm_core::{Execution, Result};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn max_entry_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn unitarity() -> Result<Outcome> {
    let params = MapParams::new(10, std::f64::consts::SQRT_2, 300)?;
    let op = FloquetOperator::new(&params);
    let mut psi = momentum_eigenstate(10, 0)?;
    let start = Instant::now();
    let mut drift: f64 = 0.0;
    for _ in 0..10_000 {
        op.apply(&mut psi)?;
        drift = drift.max((psi.norm_sqr() - 1.0).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(outcome(
        drift < 1e-9 && secs < 10.0,
        format!("10^4 steps at n_q=10: max |norm-1| = {drift:.3e} (< 1e-9), {secs:.2} s (< 10 s)"),
    ))
}

fn dft_oracle() -> Result<Outcome> {
    let mut err: f64 = 0.0;
    for n_q in 2..=6 {
        for seed in 0..4 {
            let psi = random_state(n_q, 1000 + seed)?;
            let n = psi.dim();
            let scale = 1.0 / (n as f64).sqrt();
            let dft = Dft::new(n);
            let mut fwd = psi.amplitudes().to_vec();
            dft.forward(&mut fwd, Execution::Sequential);
            let mut inv = psi.amplitudes().to_vec();
            dft.inverse(&mut inv, Execution::Sequential);
            let slow_fwd = oracle::direct_dft(psi.amplitudes(), 1.0);
            let slow_inv = oracle::direct_dft(psi.amplitudes(), -1.0);
            for (fast, slow) in [(&fwd, &slow_fwd), (&inv, &slow_inv)] {
                for (a, b) in fast.iter().zip(slow) {
                    err = err.max((a - b * scale).norm());
                }
            }
        }
    }
    Ok(outcome(
        err < 1e-10,
        format!("n_q=2..6, both directions: max amplitude error {err:.3e} (< 1e-10)"),
    ))
}

fn partial_trace_oracle() -> Result<Outcome> {
    let mut err: f64 = 0.0;
    let mut cases = 0;
    for n_q in 2..=6 {
        let psi = random_state(n_q, 2000 + n_q as u64)?;
        for i in 1..=n_q {
            for j in i + 1..=n_q {
                let fast = reduce_to_pair(&psi, i, j)?;
                let slow = oracle::dense_pair(psi.amplitudes(), i, j);
                let slow = DMatrix::from_fn(4, 4, |r, c| slow[(r, c)]);
                err = err.max(max_entry_diff(fast.entries(), &slow));
                cases += 1;
            }
        }
        // proper blocks only; the full register is not a partial trace
        for a in 1..=n_q {
            for b in a..=n_q {
                if b - a + 1 == n_q {
                    continue;
                }
                let block: Vec<usize> = (a..=b).collect();
                let fast = reduce_to_block(&psi, &block)?;
                let slow = oracle::dense_partial_trace(psi.amplitudes(), &block);
                err = err.max(max_entry_diff(fast.entries(), &slow));
                cases += 1;
            }
        }
    }
    Ok(outcome(
        err < 1e-12,
        format!("{cases} pairs and contiguous blocks at n_q=2..6: max entry error {err:.3e} (< 1e-12)"),
    ))
}

fn two_qubit(amps: [Complex64; 4]) -> Result<DensityMatrix> {
    let psi = StateVector::from_amplitudes(amps.to_vec(), Basis::Momentum)?;
    reduce_to_pair(&psi, 1, 2)
}

fn concurrence_suite() -> Result<Outcome> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell = concurrence(&two_qubit([c(h), c(0.0), c(0.0), c(h)])?)?.value;
    let product = concurrence(&two_qubit([c(0.5), c(0.5), c(0.5), c(0.5)])?)?.value;
    let w = oracle::werner(0.8);
    let werner_oracle = oracle::concurrence(&w)?;
    let werner_rho = DensityMatrix::new(DMatrix::from_fn(4, 4, |r, c| w[(r, c)]), vec![1, 2])?;
    let werner = concurrence(&werner_rho)?.value;
    let passed = (bell - 1.0).abs() <= 1e-9
        && product.abs() <= 1e-9
        && (werner_oracle - 0.7).abs() <= 1e-9
        && (werner - 0.7).abs() <= 1e-9;
    Ok(outcome(
        passed,
        format!(
            "Bell {bell:.12}, product {product:.3e}, Werner p=0.8 {werner:.12} (oracle {werner_oracle:.12}); target 1, 0, 0.7 within 1e-9"
        ),
    ))
}

fn entropy_suite() -> Result<Outcome> {
    // marginal of a product state is pure
    let product = StateVector::from_amplitudes(vec![c(0.6), c(0.8), c(0.0), c(0.0)], Basis::Momentum)?;
    let pure = von_neumann_entropy(&reduce_to_block(&product, &[1])?);
    let mixed = von_neumann_entropy(&DensityMatrix::new(DMatrix::identity(2, 2) * c(0.5), vec![1])?);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for s in 0..100 {
        let psi = random_state(8, 3000 + s)?;
        let mut labels: Vec<usize> = (1..=8).collect();
        labels.shuffle(&mut rng);
        let cut = 1 + (s as usize % 7);
        let mut a = labels[..cut].to_vec();
        let mut b = labels[cut..].to_vec();
        a.sort_unstable();
        b.sort_unstable();
        let sa = von_neumann_entropy(&reduce_to_block(&psi, &a)?);
        let sb = von_neumann_entropy(&reduce_to_block(&psi, &b)?);
        worst = worst.max((sa - sb).abs());
    }
    let passed = pure.abs() <= 1e-12 && (mixed - 1.0).abs() <= 1e-12 && worst <= 1e-9;
    Ok(outcome(
        passed,
        format!("pure {pure:.3e}, I/2 {mixed:.15}, 100 random bipartitions at n_q=8: max |S_A-S_B| {worst:.3e}"),
    ))
}

fn localization_profile() -> Result<Outcome> {
    let params = MapParams::new(10, std::f64::consts::SQRT_2, 300)?;
    let probes = Probes {
        pairs: Vec::new(),
        blocks: Vec::new(),
        blocks_from: 0,
        track_ell: false,
    };
    let start = Instant::now();
    let point = runner::simulate_point(
        &params,
        &InitialState::Eigenstate { n0: 0 },
        2000,
        &probes,
        Execution::default(),
    )?;
    let secs = start.elapsed().as_secs_f64();
    Ok(match point.profile {
        Ok(est) => outcome(
            est.r_squared > 0.9 && (15.5..=62.0).contains(&est.ell) && secs < 60.0,
            format!(
                "M=300 time-averaged profile: ell_fit {:.3} (15.5..62), r^2 {:.4} (> 0.9), {secs:.2} s (< 60 s)",
                est.ell, est.r_squared
            ),
        ),
        Err(e) => outcome(false, format!("profile fit failed: {e}")),
    })
}

fn fig1_ordering(out: &ScenarioOutput) -> Outcome {
    let got: Vec<u64> = out.summary["ordering_bottom_to_top"]
        .as_array()
        .map(|a| a.iter().filter_map(|v| v.as_u64()).collect())
        .unwrap_or_default();
    outcome(
        got == FIG1_MS,
        format!("C(1,3) saturation ordering bottom to top {got:?}, expected {FIG1_MS:?}"),
    )
}

fn small_ell_scaling(out: &ScenarioOutput) -> Outcome {
    match runner::small_ell_fit(&out.saturation) {
        Ok(f) => outcome(
            (f.exponent_or_rate - 0.5).abs() <= 0.15 && f.r_squared > 0.9,
            format!(
                "pair (1,2), ell in [0.03, 1]: exponent {:.4} (0.50 +/- 0.15), r^2 {:.4} (> 0.9), {} points",
                f.exponent_or_rate, f.r_squared, f.points_used
            ),
        ),
        Err(e) => outcome(false, format!("power-law fit failed: {e}")),
    }
}

fn coding_scaling(out: &ScenarioOutput) -> Outcome {
    match runner::coding_ratios(&out.saturation, 2.8) {
        Some((ell, ratios)) if !ratios.is_empty() => {
            let ok = ratios.iter().all(|(_, r)| (0.125..=0.5).contains(r));
            let shown: Vec<String> = ratios
                .iter()
                .map(|(j, r)| format!("C(1,{})/C(1,{j}) = {r:.4}", j + 1))
                .collect();
            outcome(
                ok,
                format!("at ell = {ell:.3}: {} (each in [1/8, 1/2])", shown.join(", ")),
            )
        }
        _ => outcome(false, "no consecutive (1,j) pairs near ell = 2.8".into()),
    }
}

fn large_ell_sensitivity(out: &ScenarioOutput) -> Outcome {
    let curve = runner::pair_curve(&out.saturation, (1, 3), 0.0, f64::INFINITY);
    let tail: Vec<f64> = curve.iter().rev().take(3).map(|p| p.1).collect();
    let zero_tail = tail.len() == 3 && tail.iter().all(|&v| v == 0.0);
    match runner::large_ell_fit(&out.saturation) {
        Ok(f) => outcome(
            f.exponent_or_rate > 0.0 && f.r_squared > 0.8 && zero_tail,
            format!(
                "pair (1,3), ell in [4, 30]: A {:.4} (> 0), r^2 {:.4} (> 0.8), {} points; last three C(1,3) {tail:?} (all exactly 0)",
                f.exponent_or_rate, f.r_squared, f.points_used
            ),
        ),
        Err(e) => outcome(false, format!("exponential fit failed: {e}; last three C(1,3) {tail:?}")),
    }
}

fn critical_doubling(out: &ScenarioOutput) -> Outcome {
    let peaks: Vec<f64> = (1..=4)
        .map(|i| {
            let curve = runner::pair_curve(&out.saturation, (i, i + 1), 0.0, f64::INFINITY);
            qsm_core::analysis::peak_location(&curve).map_or(f64::NAN, |p| p.0)
        })
        .collect();
    let ratios: Vec<f64> = peaks.windows(2).map(|w| w[1] / w[0]).collect();
    let ok = ratios.iter().all(|r| (1.3..=3.0).contains(r));
    let peaks_s: Vec<String> = peaks.iter().map(|p| format!("{p:.3}")).collect();
    let ratios_s: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    outcome(
        ok,
        format!(
            "peaks of (i,i+1), i=1..4 at ell [{}]; ratios [{}] (each in [1.3, 3.0])",
            peaks_s.join(", "),
            ratios_s.join(", ")
        ),
    )
}

fn entropy_scaling(out: &ScenarioOutput) -> Outcome {
    let counts: Vec<i64> = out.summary["counts"]
        .as_array()
        .map(|a| a.iter().filter_map(|v| v.as_i64()).collect())
        .unwrap_or_default();
    let steps: Vec<i64> = counts.windows(2).map(|w| w[1] - w[0]).collect();
    let ok = counts.len() == 5 && steps.iter().all(|d| (0..=2).contains(d));
    outcome(
        ok,
        format!("S_c = 1, ell = 2^4..2^8: counts {counts:?}, increments {steps:?} (each 1 +/- 1)"),
    )
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(|e| e.ok())
                .filter(|e| e.path().extension().is_some_and(|x| x == "csv"))
                .map(|e| {
                    (
                        e.file_name().to_string_lossy().into_owned(),
                        std::fs::read(e.path()).unwrap_or_default(),
                    )
                })
                .collect()
        })
        .unwrap_or_default();
    files.sort();
    files
}

fn determinism(reference: &[(&str, &ScenarioOutput)]) -> Result<Outcome> {
    let tmp = tempfile::tempdir().map_err(|e| qsm_core::Error::Argument(e.to_string()))?;
    let mut compared = 0;
    let mut mismatched = Vec::new();
    for (name, out) in reference {
        let base = tmp.path().join(format!("{name}-ref"));
        write_outputs(out, &base)?;
        let expected = read_dir_bytes(&base);
        for workers in [1, 3] {
            let mut sc = out.scenario.clone();
            sc.workers = Some(workers);
            let dir = tmp.path().join(format!("{name}-w{workers}"));
            write_outputs(&compute_scenario(&sc)?, &dir)?;
            compared += expected.len();
            if read_dir_bytes(&dir) != expected || expected.is_empty() {
                mismatched.push(format!("{name} workers={workers}"));
            }
        }
    }
    Ok(outcome(
        mismatched.is_empty(),
        format!("{compared} CSV files re-run with 1 and 3 workers; mismatches {mismatched:?}"),
    ))
}

fn scenario(kind: ScenarioKind) -> Result<ScenarioOutput> {
    compute_scenario(&Scenario::preset(kind, 10, "unused"))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, r: Result<Outcome>| {
        let o = r.unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        if !o.passed {
            failed += 1;
        }
        println!(
            "{} criterion {n:>2} {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    };

    report(1, "unitarity", unitarity());
    report(2, "transform oracle", dft_oracle());
    report(3, "partial-trace oracle", partial_trace_oracle());
    report(4, "concurrence analytic", concurrence_suite());
    report(5, "entropy analytic", entropy_suite());
    report(6, "localization profile", localization_profile());

    let fig1 = scenario(ScenarioKind::Fig1Timeseries);
    let fig3 = scenario(ScenarioKind::Fig3SaturationVsEll);
    let fig4 = scenario(ScenarioKind::Fig4AdjacentPairs);
    let fig5 = scenario(ScenarioKind::Fig5BlockEntropy);
    let with = |out: &Result<ScenarioOutput>, f: fn(&ScenarioOutput) -> Outcome| match out {
        Ok(o) => Ok(f(o)),
        Err(e) => Err(qsm_core::Error::Argument(format!("scenario failed: {e}"))),
    };
    report(7, "time-series ordering", with(&fig1, fig1_ordering));
    report(8, "small-ell power law", with(&fig3, small_ell_scaling));
    report(9, "coding ratios", with(&fig3, coding_scaling));
    report(10, "large-ell decay", with(&fig3, large_ell_sensitivity));
    report(11, "critical-ell doubling", with(&fig4, critical_doubling));
    report(12, "entropy scaling", with(&fig5, entropy_scaling));
    let det = match (&fig1, &fig3) {
        (Ok(a), Ok(b)) => determinism(&[("timeseries", a), ("sweep", b)]),
        _ => Err(qsm_core::Error::Argument("reference scenario failed".into())),
    };
    report(13, "determinism", det);

    println!("{} of 13 criteria passed", 13 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
