//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed. `ACCEPTANCE_ONLY=5,7` restricts the run.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use affect_drift::drift::{analyze_drift, cross_period_cases, shape_correlation, Case, CasesConfig, DriftConfig};
use affect_drift::ebm::{fit_ebm_traced, Dataset, EbmConfig, EnsembleConfig};
use affect_drift::features::{hrv_freq_features, hrv_time_features, poincare_axes, FeatureName, SpectralConfig};
use affect_drift::preprocess::{
    beats_to_ibi, design_butterworth_lowpass, detect_beats, filter_zero_phase, BeatDetectorConfig, IbiRange, IbiSeries,
};
use affect_drift::selection::{sequential_forward_select, SelectionConfig};
use affect_drift::signal::Period;
use affect_drift::synth::{render_bvp, sample_dataset, FeatureTruth, Marginal, PulseTemplate, Shape, TruthSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    if b == 0.0 {
        a.abs() < 1e-12
    } else {
        ((a - b) / b).abs() <= rel
    }
}

// ---------------------------------------------------------------- 1

fn oracle_time_features(x: &[f64]) -> [f64; 7] {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let sd = (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let d: Vec<f64> = (1..x.len()).map(|i| x[i] - x[i - 1]).collect();
    let rmssd = (d.iter().map(|v| v * v).sum::<f64>() / d.len() as f64).sqrt();
    let pnn50 = 100.0 * d.iter().filter(|v| v.abs() > 50.0).count() as f64 / d.len() as f64;
    // Poincaré dispersions from the variances of successive differences and sums.
    let var = |v: &[f64]| {
        let k = v.len() as f64;
        let mu = v.iter().sum::<f64>() / k;
        v.iter().map(|a| (a - mu).powi(2)).sum::<f64>() / (k - 1.0)
    };
    let s: Vec<f64> = (1..x.len()).map(|i| x[i] + x[i - 1]).collect();
    let sd1 = (var(&d) / 2.0).sqrt();
    let sd2 = (var(&s) / 2.0).sqrt();
    [sd, sd / m, rmssd, pnn50, 60_000.0 / m, 4.0 * sd2, 4.0 * sd1]
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let len = rng.gen_range(10..=100);
        let x: Vec<f64> = (0..len).map(|_| rng.gen_range(400.0..1400.0)).collect();
        let ibi = IbiSeries::from_intervals(&x);
        let t = hrv_time_features(&ibi);
        let p = poincare_axes(&ibi, 4.0);
        let got = [t.sd, t.cv, t.rmssd, t.pnn50, t.hr, p.l, p.t].map(|v| v.expect("defined"));
        let want = oracle_time_features(&x);
        for (g, w) in got.iter().zip(want) {
            if !rel_close(*g, w, 1e-9) {
                return Err(format!("mismatch {g} vs {w}"));
            }
            if w != 0.0 {
                worst = worst.max(((g - w) / w).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 1.0, format!("max relative error {worst:.2e}, {secs:.3} s"))
}

// ---------------------------------------------------------------- 2

fn pipeline_beats(samples: &[f64]) -> Vec<f64> {
    let c = design_butterworth_lowpass(4, 3.0, 64.0).unwrap();
    let f = filter_zero_phase(&c, samples).unwrap();
    detect_beats(&f, 64.0, &BeatDetectorConfig::default())
}

fn render_and_detect(intervals: &[f64], template: &PulseTemplate) -> Result<(f64, Option<f64>), String> {
    let r = render_bvp(intervals, 64.0, template);
    let beats = pipeline_beats(&r.samples);
    if beats.len() != r.beat_times.len() {
        return Err(format!("{} beats detected, {} rendered", beats.len(), r.beat_times.len()));
    }
    let detected = beats_to_ibi(&beats, &IbiRange::default());
    let err = detected.intervals.iter().zip(intervals).map(|(d, w)| (d - w).abs()).fold(0.0, f64::max);
    let truth = hrv_time_features(&IbiSeries::from_intervals(intervals)).rmssd.unwrap();
    let rel = hrv_time_features(&detected).rmssd.map(|g| ((g - truth) / truth).abs());
    Ok((err, rel))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let template = PulseTemplate::default();
    let mut worst_ibi: f64 = 0.0;
    let mut worst_rmssd: f64 = 0.0;
    let mut segments = 0;
    // Constant rates across the whole span.
    for bpm in 50..=150 {
        let ibi = 60_000.0 / bpm as f64;
        let n = ((49.0 - template.lead_secs) * 1000.0 / ibi) as usize;
        let (err, _) = render_and_detect(&vec![ibi; n], &template).map_err(|e| format!("{bpm} bpm: {e}"))?;
        worst_ibi = worst_ibi.max(err);
        segments += 1;
    }
    // Respiratory modulation: 0.25 Hz, 50 ms around 800 ms, at 20 phases.
    for k in 0..20 {
        let phase = k as f64 * std::f64::consts::TAU / 20.0;
        let mut intervals = Vec::new();
        let mut t = template.lead_secs;
        while t + 0.85 < 49.5 {
            let ibi = 800.0 + 50.0 * (std::f64::consts::TAU * 0.25 * t + phase).sin();
            intervals.push(ibi);
            t += ibi / 1000.0;
        }
        let (err, rel) = render_and_detect(&intervals, &template).map_err(|e| format!("phase {k}: {e}"))?;
        worst_ibi = worst_ibi.max(err);
        worst_rmssd = worst_rmssd.max(rel.ok_or("RMSSD undefined")?);
        segments += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst_ibi <= 15.625 && worst_rmssd < 0.10 && secs < 5.0,
        format!(
            "{segments} segments, all beat counts exact, max IBI error {worst_ibi:.3} ms, \
             max RMSSD error {:.1}%, {secs:.2} s",
            100.0 * worst_rmssd
        ),
    )
}

// ---------------------------------------------------------------- 3

fn criterion_3() -> Outcome {
    let c = design_butterworth_lowpass(4, 3.0, 64.0).unwrap();
    // Analytic response of the prewarped bilinear Butterworth design.
    let analytic = |f: f64| {
        let w = (std::f64::consts::PI * f / 64.0).tan() / (std::f64::consts::PI * 3.0 / 64.0).tan();
        1.0 / (1.0 + w.powi(8)).sqrt()
    };
    let mut worst: f64 = 0.0;
    for k in 1..320 {
        let f = k as f64 * 0.1;
        worst = worst.max((c.gain(f) - analytic(f)).abs());
    }
    let g3 = 20.0 * c.gain(3.0).log10();
    let g10 = 20.0 * c.gain(10.0).log10();
    check(
        (g3 + 3.01).abs() <= 0.1 && g10 <= -40.0 && worst < 1e-9,
        format!("{g3:.3} dB at 3 Hz, {g10:.1} dB at 10 Hz, max deviation from analytic {worst:.1e}"),
    )
}

// ---------------------------------------------------------------- 4

fn modulated_ibi(freq: f64) -> IbiSeries {
    let mut x = Vec::new();
    let mut t = 0.0;
    while t < 50.0 {
        let ibi = 800.0 + 50.0 * (2.0 * std::f64::consts::PI * freq * t).sin();
        x.push(ibi);
        t += ibi / 1000.0;
    }
    IbiSeries::from_intervals(&x)
}

fn criterion_4() -> Outcome {
    let cfg = SpectralConfig::default();
    let lf = hrv_freq_features(&modulated_ibi(0.10), &cfg).lf_hf.ok_or("LF/HF missing at 0.10 Hz")?;
    let hf = hrv_freq_features(&modulated_ibi(0.25), &cfg).lf_hf.ok_or("LF/HF missing at 0.25 Hz")?;
    check(lf > 10.0 && hf < 0.1, format!("LF/HF = {lf:.2} at 0.10 Hz, {hf:.4} at 0.25 Hz"))
}

// ---------------------------------------------------------------- 5

fn grid_of(lo: f64, hi: f64) -> Vec<f64> {
    (0..64).map(|k| lo + (hi - lo) * k as f64 / 63.0).collect()
}

fn criterion_5() -> Outcome {
    let spec = TruthSpec {
        n_per_period: 2000,
        seed: 5,
        ..TruthSpec::preset("null").unwrap()
    };
    let features = spec.feature_names();
    let rows: Vec<_> = sample_dataset(&spec).into_iter().map(|r| r.vector).collect();
    let (data, _) = Dataset::from_vectors(&rows, &features);
    let start = Instant::now();
    let (model, trace) = fit_ebm_traced(&data, &EbmConfig::default()).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();

    let mut rs = Vec::new();
    for (j, t) in spec.features.iter().enumerate() {
        let (lo, hi) = data.range(j).unwrap();
        let grid = grid_of(lo, hi);
        let truth: Vec<f64> = grid.iter().map(|x| t.f_com(*x)).collect();
        rs.push((t.feature, shape_correlation(&model.f_com[j].curve(&grid), &truth).unwrap_or(f64::NAN)));
    }
    let monotone = trace.loss_history.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    let mut worst_decomp: f64 = 0.0;
    for i in 0..data.len() {
        let x = data.row(i);
        let p = data.periods()[i];
        let mut s = model.intercept;
        for j in 0..x.len() {
            s += model.f_com[j].eval(x[j]);
            if p == Period::P2 {
                s += model.f_int[j].eval(x[j]);
            }
        }
        if p == Period::P2 {
            s += model.period2_offset;
        }
        worst_decomp = worst_decomp.max((model.predict_logit(&x, p).unwrap() - s).abs());
    }
    let min_r = rs.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let detail = format!(
        "r = [{}], loss monotone = {monotone}, decomposition error {worst_decomp:.1e}, fit {secs:.1} s",
        rs.iter().map(|(f, r)| format!("{f} {r:.3}")).collect::<Vec<_>>().join(", ")
    );
    check(min_r >= 0.95 && monotone && worst_decomp <= 1e-12 && secs < 60.0, detail)
}

// ---------------------------------------------------------------- 6, 7

fn drift_on(preset: &str, seed: u64) -> Result<affect_drift::drift::DriftReport, String> {
    let spec = TruthSpec {
        seed,
        ..TruthSpec::preset(preset).unwrap()
    };
    let rows: Vec<_> = sample_dataset(&spec).into_iter().map(|r| r.vector).collect();
    let cfg = DriftConfig {
        ensemble: EnsembleConfig {
            seed,
            ..EnsembleConfig::default()
        },
        cases: None,
    };
    analyze_drift(&rows, &spec.feature_names(), &cfg)
        .map(|a| a.report)
        .map_err(|e| e.to_string())
}

fn criterion_6() -> Outcome {
    let report = drift_on("null", 6)?;
    let p = &report.participants[0];
    let mut ok = true;
    let mut parts = Vec::new();
    for f in &p.features {
        let overlap = 1.0 - f.ci_nonoverlap_fraction;
        let r = f.r.unwrap_or(f64::NAN);
        ok &= overlap >= 0.95 && r >= 0.9;
        parts.push(format!("{} overlap {:.2} r {r:.3}", f.feature, overlap));
    }
    check(ok, parts.join(", "))
}

fn criterion_7() -> Outcome {
    let report = drift_on("x_shift", 7)?;
    let p = &report.participants[0];
    let r_of = |f: FeatureName| p.features.iter().find(|x| x.feature == f).and_then(|x| x.r).unwrap_or(f64::NAN);
    let drifted = r_of(FeatureName::EdaMin);
    let others: Vec<(FeatureName, f64)> = p
        .features
        .iter()
        .filter(|f| f.feature != FeatureName::EdaMin)
        .map(|f| (f.feature, r_of(f.feature)))
        .collect();
    let strictly_min = others.iter().all(|(_, r)| drifted < *r);
    let stable_ok = others.iter().all(|(_, r)| *r >= 0.95);

    // Pure y-scale drift: r between the true period-invariant and period-2
    // curves, and between the learned ensemble-mean curves.
    let spec = TruthSpec::preset("y_scale").unwrap();
    let hr: &FeatureTruth = spec.truth(FeatureName::Hr).unwrap();
    let Marginal::Uniform { lo, hi } = hr.marginal else {
        return Err("unexpected marginal".into());
    };
    let grid = grid_of(lo, hi);
    let com: Vec<f64> = grid.iter().map(|x| hr.f_com(*x)).collect();
    let total: Vec<f64> = grid.iter().map(|x| hr.f_total(*x)).collect();
    let r_true = shape_correlation(&com, &total).unwrap_or(f64::NAN);
    let y_report = drift_on("y_scale", 71)?;
    let r_learned = y_report.participants[0]
        .features
        .iter()
        .find(|f| f.feature == FeatureName::Hr)
        .and_then(|f| f.r)
        .unwrap_or(f64::NAN);

    let detail = format!(
        "x-shift: EDA_min r {drifted:.3}, others [{}]; y-scale: true-curve r {r_true:.9}, learned HR r {r_learned:.3}",
        others.iter().map(|(f, r)| format!("{f} {r:.3}")).collect::<Vec<_>>().join(", ")
    );
    check(
        drifted < 0.8 && strictly_min && stable_ok && (r_true - 1.0).abs() <= 1e-6 && r_learned >= 0.95,
        detail,
    )
}

// ---------------------------------------------------------------- 8

fn criterion_8() -> Outcome {
    let spec = TruthSpec {
        seed: 8,
        ..TruthSpec::preset("calibrated").unwrap()
    };
    let rows: Vec<_> = sample_dataset(&spec).into_iter().map(|r| r.vector).collect();
    let (data, _) = Dataset::from_vectors(&rows, &spec.feature_names());
    let start = Instant::now();
    let table = cross_period_cases(
        &data,
        &CasesConfig {
            seed: 8,
            ..CasesConfig::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let acc = |c| table.get(c).accuracy;
    let (a, b, c, d) = (acc(Case::A), acc(Case::B), acc(Case::C), acc(Case::D));
    check(
        a - b >= 0.03 && d - b >= 0.01 && a > c && c >= b && secs < 600.0,
        format!("acc a {a:.3} b {b:.3} c {c:.3} d {d:.3}, {secs:.1} s"),
    )
}

// ---------------------------------------------------------------- 9

fn sfs_spec(seed: u64) -> TruthSpec {
    let mut spec = TruthSpec::preset("null").unwrap();
    spec.n_per_period = 1000;
    spec.seed = seed;
    for f in FeatureName::ALL {
        if spec.truth(f).is_none() {
            spec.features.push(FeatureTruth {
                feature: f,
                marginal: Marginal::Normal { mean: 0.0, sd: 1.0 },
                shape: Shape::Zero,
                drift: Default::default(),
            });
        }
    }
    spec
}

fn criterion_9() -> Outcome {
    let informative = FeatureName::MODEL_DEFAULT;
    let mut hits = Vec::new();
    for seed in 0..10u64 {
        let spec = sfs_spec(900 + seed);
        let rows: Vec<_> = sample_dataset(&spec).into_iter().map(|r| r.vector).collect();
        let cfg = SelectionConfig {
            seed,
            ..SelectionConfig::default()
        };
        let r = sequential_forward_select(&rows, &cfg).map_err(|e| e.to_string())?;
        hits.push(r.selected.iter().filter(|f| informative.contains(f)).count());
    }
    let good = hits.iter().filter(|h| **h >= 4).count();
    check(good >= 9, format!("informative features selected per seed {hits:?}; {good}/10 seeds with >= 4"))
}

// ---------------------------------------------------------------- 10

fn run_chain(out: &Path) -> Result<(), String> {
    let bin = env!("CARGO_BIN_EXE_affect-drift");
    let steps: [&[&str]; 8] = [
        &["synth", "--preset", "small"],
        &["ingest"],
        &["features"],
        &["select"],
        &["fit"],
        &["eval"],
        &["drift"],
        &["report"],
    ];
    for args in steps {
        let status = Command::new(bin)
            .args(args.iter())
            .args(["--out", out.to_str().unwrap(), "--seed", "10"])
            .env_remove("RUST_LOG")
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&status.stderr)));
        }
    }
    Ok(())
}

fn snapshot(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn criterion_10() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_chain(a.path())?;
    run_chain(b.path())?;
    let (sa, sb) = (snapshot(a.path()), snapshot(b.path()));
    let differing: Vec<&String> = sa.keys().filter(|k| sa.get(*k) != sb.get(*k)).collect();
    check(
        sa.len() == sb.len() && differing.is_empty() && sa.len() > 10,
        format!("{} files compared, {} differ {differing:?}", sa.len(), differing.len()),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "feature oracle equivalence", criterion_1),
        (2, "end-to-end beat recovery", criterion_2),
        (3, "filter specification", criterion_3),
        (4, "spectral band discrimination", criterion_4),
        (5, "EBM shape recovery", criterion_5),
        (6, "null-drift control", criterion_6),
        (7, "drift detection", criterion_7),
        (8, "cross-period degradation", criterion_8),
        (9, "SFS sanity", criterion_9),
        (10, "determinism", criterion_10),
    ];
    let only: Option<Vec<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = 0;
    for (id, name, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed: Duration = start.elapsed();
        match result {
            Ok(detail) => println!("PASS criterion {id} ({name}): {detail} [{:.1} s]", elapsed.as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id} ({name}): {detail} [{:.1} s]", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
