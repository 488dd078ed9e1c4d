use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sample::{annotation_time, draw_label, rng_for, true_logit};
use super::{Marginal, SyntheticRow, TruthSpec};
use crate::error::{Error, Result};
use crate::features::{FeatureName, FeatureVector};
use crate::signal::{
    ArousalLabel, ChannelKind, EmotionAnnotation, EmotionCategory, Period, RecordingSession, SampledChannel, Samples,
};

/// Raised-cosine pulse placed at each beat.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseTemplate {
    pub width_ms: f64,
    pub amplitude: f64,
    /// Time of the first beat after the start of the rendering.
    pub lead_secs: f64,
    /// Signal kept after the last beat.
    pub tail_secs: f64,
}

impl Default for PulseTemplate {
    fn default() -> Self {
        Self {
            width_ms: 250.0,
            amplitude: 100.0,
            lead_secs: 0.3,
            tail_secs: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedBvp {
    pub samples: Vec<f64>,
    /// Seconds from the first sample.
    pub beat_times: Vec<f64>,
}

/// Sums one pulse per beat into `samples`, where sample `i` sits at
/// `t0 + i / rate`.
pub fn add_pulses(samples: &mut [f64], t0: f64, rate: f64, beat_times: &[f64], template: &PulseTemplate) {
    let half = template.width_ms / 2000.0;
    for &b in beat_times {
        let lo = (((b - half - t0) * rate).floor().max(0.0)) as usize;
        let hi = ((((b + half - t0) * rate).ceil()) as usize + 1).min(samples.len());
        for (i, s) in samples.iter_mut().enumerate().take(hi).skip(lo) {
            let dt = t0 + i as f64 / rate - b;
            if dt.abs() < half {
                *s += template.amplitude * 0.5 * (1.0 + (std::f64::consts::PI * dt / half).cos());
            }
        }
    }
}

/// Noiseless BVP for a sequence of inter-beat intervals in milliseconds.
pub fn render_bvp(intervals_ms: &[f64], rate: f64, template: &PulseTemplate) -> RenderedBvp {
    let mut beat_times = vec![template.lead_secs];
    for ibi in intervals_ms {
        let last = *beat_times.last().expect("non-empty");
        beat_times.push(last + ibi / 1000.0);
    }
    let duration = beat_times.last().expect("non-empty") + template.tail_secs;
    let mut samples = vec![0.0; (duration * rate).ceil() as usize];
    add_pulses(&mut samples, 0.0, rate, &beat_times, template);
    RenderedBvp { samples, beat_times }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedSession {
    pub session: RecordingSession,
    /// Per annotation: feature values realized in the rendered signals,
    /// with the label drawn from them.
    pub truth: Vec<SyntheticRow>,
}

const RENDERABLE: [FeatureName; 5] = [
    FeatureName::Hr,
    FeatureName::EdaMin,
    FeatureName::EdaMax,
    FeatureName::TempAve,
    FeatureName::AccAve,
];

fn default_marginal(f: FeatureName) -> Marginal {
    match f {
        FeatureName::Hr => Marginal::Uniform { lo: 60.0, hi: 90.0 },
        FeatureName::EdaMin => Marginal::Uniform { lo: 0.5, hi: 1.5 },
        FeatureName::EdaMax => Marginal::Uniform { lo: 2.0, hi: 3.0 },
        FeatureName::TempAve => Marginal::Uniform { lo: 32.0, hi: 34.0 },
        _ => Marginal::Uniform { lo: 1.0, hi: 1.1 },
    }
}

fn quantize(x: f64, step: f64) -> f64 {
    (x / step).round() * step
}

struct Targets {
    ibi_ms: f64,
    eda_min: f64,
    eda_max: f64,
    temp: f64,
    acc_raw: f64,
}

/// Renders one participant-period session with `n_per_period` annotations.
pub fn render_session(spec: &TruthSpec, participant: &str, period: Period) -> Result<RenderedSession> {
    spec.validate()?;
    if let Some(f) = spec.features.iter().find(|t| !RENDERABLE.contains(&t.feature)) {
        return Err(Error::Config(format!("feature {} cannot be rendered into signals", f.feature)));
    }
    let layout = &spec.session;
    let n = spec.n_per_period;
    let mut rng = rng_for(spec, participant, period, 1);
    let marginal = |f| spec.truth(f).map_or(default_marginal(f), |t| t.marginal);
    let targets: Vec<Targets> = (0..n)
        .map(|_| {
            let hr = marginal(FeatureName::Hr).sample(&mut rng);
            let eda_min = quantize(marginal(FeatureName::EdaMin).sample(&mut rng).max(0.01), 1e-4);
            let eda_max = quantize(marginal(FeatureName::EdaMax).sample(&mut rng), 1e-4).max(eda_min + 0.01);
            Targets {
                ibi_ms: (60_000.0 / hr).clamp(400.0, 1900.0),
                eda_min,
                eda_max,
                temp: quantize(marginal(FeatureName::TempAve).sample(&mut rng), 0.01),
                acc_raw: (marginal(FeatureName::AccAve).sample(&mut rng) * crate::signal::ACC_UNITS_PER_G).round().max(1.0),
            }
        })
        .collect();

    let start = layout.start_time;
    let times: Vec<f64> = (0..n).map(|i| annotation_time(spec, i)).collect();
    let end = times.last().map_or(start + layout.lead_secs, |t| t + 2.0);
    let duration = end - start;

    // BVP: baseline beats outside the physiological windows, target rate inside.
    let template = PulseTemplate {
        amplitude: layout.bvp_amplitude,
        ..PulseTemplate::default()
    };
    let baseline_ibi = 60.0 / layout.baseline_hr;
    let mut beats = Vec::new();
    let mut cursor = start + template.lead_secs;
    for (t, tg) in times.iter().zip(&targets) {
        let w0 = t - 50.0;
        while cursor < w0 - 0.2 {
            beats.push(cursor);
            cursor += baseline_ibi;
        }
        let mut b = w0 + template.lead_secs;
        while b < t - 0.2 {
            beats.push(b);
            b += tg.ibi_ms / 1000.0;
        }
        cursor = t + template.lead_secs;
    }
    while cursor < end - 0.2 {
        beats.push(cursor);
        cursor += baseline_ibi;
    }
    let bvp_rate = ChannelKind::Bvp.nominal_rate();
    let mut bvp = vec![0.0; (duration * bvp_rate).round() as usize];
    add_pulses(&mut bvp, start, bvp_rate, &beats, &template);
    for v in &mut bvp {
        *v = quantize(*v, 1e-3);
    }

    // EDA and TEMP: triangle min→max→min and a constant inside each window;
    // outside, the most recent window's level.
    let slow_rate = ChannelKind::Eda.nominal_rate();
    let slow_len = (duration * slow_rate).round() as usize;
    let first = targets.first();
    let mut eda = vec![first.map_or(1.0, |t| t.eda_min); slow_len];
    let mut temp = vec![first.map_or(33.0, |t| t.temp); slow_len];
    for (t, tg) in times.iter().zip(&targets) {
        let i0 = ((t - 50.0 - start) * slow_rate).floor() as usize;
        let i1 = ((t - start) * slow_rate).floor() as usize;
        let half = (i1 - i0) / 2;
        for i in i0..slow_len {
            let k = i - i0;
            let (e, tv) = if i < i1 {
                let frac = 1.0 - (k as f64 - half as f64).abs() / half as f64;
                (tg.eda_min + (tg.eda_max - tg.eda_min) * frac, tg.temp)
            } else {
                (tg.eda_min, tg.temp)
            };
            eda[i] = quantize(e, 1e-4);
            temp[i] = tv;
        }
    }

    // ACC: each annotation's movement window at its own level; the earliest
    // annotation wins where windows overlap.
    let acc_rate = ChannelKind::Acc.nominal_rate();
    let acc_len = (duration * acc_rate).round() as usize;
    let mut acc_raw: Vec<Option<f64>> = vec![None; acc_len];
    for (t, tg) in times.iter().zip(&targets) {
        let i0 = ((t - 240.0 - start) * acc_rate).floor() as usize;
        let i1 = (((t - 50.0 - start) * acc_rate).floor() as usize).min(acc_len);
        for slot in &mut acc_raw[i0..i1] {
            slot.get_or_insert(tg.acc_raw);
        }
    }
    let acc: Vec<[f64; 3]> = acc_raw
        .iter()
        .map(|z| [0.0, 0.0, z.unwrap_or(crate::signal::ACC_UNITS_PER_G) / crate::signal::ACC_UNITS_PER_G])
        .collect();

    let channels = [
        SampledChannel::new(ChannelKind::Bvp, start, bvp_rate, Samples::Scalar(bvp))?,
        SampledChannel::new(ChannelKind::Eda, start, slow_rate, Samples::Scalar(eda))?,
        SampledChannel::new(ChannelKind::Temp, start, slow_rate, Samples::Scalar(temp))?,
        SampledChannel::new(ChannelKind::Acc, start, acc_rate, Samples::Vector(acc))?,
    ];

    let mut label_rng = rng_for(spec, participant, period, 2);
    let mut truth = Vec::with_capacity(n);
    let mut annotations = Vec::with_capacity(n);
    for (t, tg) in times.iter().zip(&targets) {
        let mut v = FeatureVector::new(participant, period, *t, ArousalLabel::Low);
        v.set(FeatureName::Hr, Some(60_000.0 / tg.ibi_ms));
        realized_slow(&channels[1], &channels[2], *t, &mut v);
        realized_acc(&channels[3], *t, &mut v);
        let logit = true_logit(spec, &v);
        v.label = draw_label(&mut label_rng, logit);
        let category = match (v.label, label_rng.gen_bool(0.5)) {
            (ArousalLabel::High, true) => EmotionCategory::Happy,
            (ArousalLabel::High, false) => EmotionCategory::Nervous,
            (ArousalLabel::Low, true) => EmotionCategory::Sad,
            (ArousalLabel::Low, false) => EmotionCategory::Relaxed,
        };
        annotations.push(EmotionAnnotation {
            timestamp: *t,
            category,
            sublabel: None,
        });
        truth.push(SyntheticRow { vector: v, true_logit: logit });
    }
    let session = RecordingSession::new(participant, period, channels, annotations)?;
    Ok(RenderedSession { session, truth })
}

fn realized_slow(eda: &SampledChannel, temp: &SampledChannel, t: f64, v: &mut FeatureVector) {
    let slice = |ch: &SampledChannel| {
        let r = ch.index_range(t - 50.0, t).expect("window inside recording");
        ch.samples().as_scalar().expect("scalar")[r].to_vec()
    };
    let e = slice(eda);
    let max = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = e.iter().copied().fold(f64::INFINITY, f64::min);
    v.set(FeatureName::EdaMin, Some(min));
    v.set(FeatureName::EdaMax, Some(max));
    v.set(FeatureName::EdaDiff, Some(max - min));
    v.set(FeatureName::EdaAve, Some(e.iter().sum::<f64>() / e.len() as f64));
    let tv = slice(temp);
    v.set(FeatureName::TempAve, Some(tv.iter().sum::<f64>() / tv.len() as f64));
}

fn realized_acc(acc: &SampledChannel, t: f64, v: &mut FeatureVector) {
    let r = acc.index_range(t - 240.0, t - 50.0).expect("window inside recording");
    let mags: Vec<f64> = acc.samples().as_vector().expect("vector")[r]
        .iter()
        .map(|[x, y, z]| (x * x + y * y + z * z).sqrt())
        .collect();
    v.set(FeatureName::AccAve, Some(mags.iter().sum::<f64>() / mags.len() as f64));
    v.set(FeatureName::AccMax, Some(mags.iter().copied().fold(0.0, f64::max)));
}
