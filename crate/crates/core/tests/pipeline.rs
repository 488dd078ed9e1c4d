//! Rendered sessions through the on-disk format and the feature extractor,
//! checked against the generator's ground truth.

use affect_drift::features::{extract_features, FeatureConfig, FeatureName};
use affect_drift::preprocess::{beats_to_ibi, detect_beats, BeatDetectorConfig, IbiRange};
use affect_drift::signal::{
    extract_labeled_segments_detailed, load_session, write_session, ArousalMapping, Period, SegmentTiming,
    ACC_UNITS_PER_G,
};
use affect_drift::synth::{render_bvp, render_session, PulseTemplate, TruthSpec};
use proptest::prelude::*;

fn spec(n: usize) -> TruthSpec {
    TruthSpec {
        n_per_period: n,
        seed: 21,
        ..TruthSpec::preset("calibrated").unwrap()
    }
}

#[test]
fn rendered_session_features_match_truth() {
    let spec = spec(20);
    let dir = tempfile::tempdir().unwrap();
    for period in [Period::P1, Period::P2] {
        let rendered = render_session(&spec, "S01", period).unwrap();
        let path = dir.path().join(format!("S01_{period}"));
        write_session(&path, &rendered.session, ACC_UNITS_PER_G).unwrap();
        let session = load_session(&path, ACC_UNITS_PER_G).unwrap();
        assert_eq!(session.annotations.len(), 20);

        let (segments, skipped) =
            extract_labeled_segments_detailed(&session, &ArousalMapping::default(), SegmentTiming::default());
        assert!(skipped.is_empty());
        let out = extract_features(&segments, &FeatureConfig::default()).unwrap();
        assert!(out.rejected.is_empty(), "{:?}", out.rejected);
        assert_eq!(out.vectors.len(), 20);

        for (got, truth) in out.vectors.iter().zip(&rendered.truth) {
            let t = &truth.vector;
            assert_eq!(got.timestamp, t.timestamp);
            assert_eq!(got.label, t.label);
            assert_eq!(got.period, period);
            let hr = got.get(FeatureName::Hr).unwrap();
            let want = t.get(FeatureName::Hr).unwrap();
            assert!((hr - want).abs() / want < 0.01, "HR {hr} vs {want}");
            for f in [FeatureName::EdaMin, FeatureName::EdaMax, FeatureName::TempAve, FeatureName::AccAve] {
                let (g, w) = (got.get(f).unwrap(), t.get(f).unwrap());
                assert!((g - w).abs() < 1e-6, "{f}: {g} vs {w}");
            }
        }
    }
}

#[test]
fn session_round_trip_is_lossless() {
    let rendered = render_session(&spec(3), "S02", Period::P2).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_session(dir.path(), &rendered.session, ACC_UNITS_PER_G).unwrap();
    let back = load_session(dir.path(), ACC_UNITS_PER_G).unwrap();
    assert_eq!(back, rendered.session);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Noiseless rendering at 40-180 bpm: exact beat count and every interval
    // within one 64 Hz sample.
    #[test]
    fn detect_recovers_rendered_intervals(
        bpm in 40.0f64..=180.0,
        depth in 0.0f64..1.0,
        freq in 0.05f64..0.4,
    ) {
        let base = 60_000.0 / bpm;
        // Keep every interval clear of the 330 ms refractory period.
        let amp = depth * (base - 340.0).clamp(0.0, 60.0);
        let mut intervals = Vec::new();
        let mut t = 0.0;
        while t < 45.0 {
            let ibi = base + amp * (std::f64::consts::TAU * freq * t).sin();
            intervals.push(ibi);
            t += ibi / 1000.0;
        }
        let r = render_bvp(&intervals, 64.0, &PulseTemplate::default());
        let beats = detect_beats(&r.samples, 64.0, &BeatDetectorConfig::default());
        prop_assert_eq!(beats.len(), r.beat_times.len());
        let ibi = beats_to_ibi(&beats, &IbiRange::default());
        prop_assert_eq!(ibi.intervals.len(), intervals.len());
        for (d, w) in ibi.intervals.iter().zip(&intervals) {
            prop_assert!((d - w).abs() <= 15.625, "{} vs {}", d, w);
        }
    }
}
