use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeatDetectorConfig {
    /// Centered window for the rolling mean / SD threshold, seconds.
    pub window_secs: f64,
    /// Threshold = rolling mean + `sd_factor` * rolling SD.
    pub sd_factor: f64,
    /// Minimum spacing between accepted beats, seconds.
    pub refractory_secs: f64,
}

impl Default for BeatDetectorConfig {
    fn default() -> Self {
        Self {
            window_secs: 5.0,
            sd_factor: 0.5,
            refractory_secs: 0.33,
        }
    }
}

/// Beat times (seconds from the first sample) of a low-pass filtered BVP
/// trace: strict local maxima above an adaptive threshold, thinned by a
/// refractory period that keeps the taller of two close peaks.
pub fn detect_beats(bvp: &[f64], rate: f64, config: &BeatDetectorConfig) -> Vec<f64> {
    let n = bvp.len();
    if n < 3 {
        return Vec::new();
    }

    let mut sum = vec![0.0; n + 1];
    let mut sum_sq = vec![0.0; n + 1];
    for (i, &x) in bvp.iter().enumerate() {
        sum[i + 1] = sum[i] + x;
        sum_sq[i + 1] = sum_sq[i] + x * x;
    }
    let half = ((config.window_secs * rate) / 2.0).round().max(1.0) as usize;
    let threshold = |i: usize| {
        let lo = i.saturating_sub(half);
        let hi = (i + half + 1).min(n);
        let m = (hi - lo) as f64;
        let mean = (sum[hi] - sum[lo]) / m;
        let var = ((sum_sq[hi] - sum_sq[lo]) / m - mean * mean).max(0.0);
        mean + config.sd_factor * var.sqrt()
    };

    // Beat times are whole samples, so the refractory period is too.
    let refractory = (config.refractory_secs * rate + 1e-9).floor();
    let mut peaks: Vec<usize> = Vec::new();
    for i in 1..n - 1 {
        let x = bvp[i];
        if !(x > bvp[i - 1] && x >= bvp[i + 1] && x > threshold(i)) {
            continue;
        }
        match peaks.last_mut() {
            Some(last) if ((i - *last) as f64) < refractory => {
                if x > bvp[*last] {
                    *last = i;
                }
            }
            _ => peaks.push(i),
        }
    }
    peaks.into_iter().map(|i| i as f64 / rate).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IbiRange {
    pub min_ms: f64,
    pub max_ms: f64,
}

impl Default for IbiRange {
    fn default() -> Self {
        Self {
            min_ms: 300.0,
            max_ms: 2000.0,
        }
    }
}

/// Inter-beat intervals derived from a beat sequence. Intervals outside the
/// plausible range are dropped and counted; `interval_times` holds the time of
/// the beat closing each retained interval.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IbiSeries {
    pub beat_times: Vec<f64>,
    pub intervals: Vec<f64>,
    pub interval_times: Vec<f64>,
    pub dropped: usize,
}

impl IbiSeries {
    /// Builds a series directly from intervals, placing the first beat at 0.
    pub fn from_intervals(intervals_ms: &[f64]) -> Self {
        let mut t = 0.0;
        let mut beat_times = vec![0.0];
        for &ms in intervals_ms {
            t += ms / 1000.0;
            beat_times.push(t);
        }
        Self {
            interval_times: beat_times[1..].to_vec(),
            beat_times,
            intervals: intervals_ms.to_vec(),
            dropped: 0,
        }
    }

    pub fn beat_count(&self) -> usize {
        self.beat_times.len()
    }

    pub fn insufficient_beats(&self) -> bool {
        self.beat_times.len() < 2
    }

    /// Fraction of raw intervals removed by the range rule.
    pub fn drop_fraction(&self) -> f64 {
        let total = self.intervals.len() + self.dropped;
        if total == 0 {
            0.0
        } else {
            self.dropped as f64 / total as f64
        }
    }

    /// Sub-series of the beats falling in `[from, to)` seconds.
    pub fn restrict(&self, from: f64, to: f64, range: &IbiRange) -> IbiSeries {
        let beats: Vec<f64> = self.beat_times.iter().copied().filter(|&t| t >= from && t < to).collect();
        beats_to_ibi(&beats, range)
    }
}

pub fn beats_to_ibi(beat_times: &[f64], range: &IbiRange) -> IbiSeries {
    let mut series = IbiSeries {
        beat_times: beat_times.to_vec(),
        ..Default::default()
    };
    for w in beat_times.windows(2) {
        let ms = (w[1] - w[0]) * 1000.0;
        if ms >= range.min_ms && ms <= range.max_ms {
            series.intervals.push(ms);
            series.interval_times.push(w[1]);
        } else {
            series.dropped += 1;
        }
    }
    series
}
