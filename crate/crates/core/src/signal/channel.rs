//! E4-style channel files: row 1 holds the start epoch, row 2 the sample
//! rate, every following row one sample. ACC files repeat the header values
//! across three columns and store raw integer units.

use std::fmt::Write as _;

use super::{ChannelKind, SampledChannel, Samples};
use crate::error::{Error, Result};

/// Raw accelerometer counts per g.
pub const ACC_UNITS_PER_G: f64 = 64.0;

pub fn parse_channel_csv(text: &str, kind: ChannelKind) -> Result<SampledChannel> {
    parse_channel_csv_with(text, kind, ACC_UNITS_PER_G)
}

pub fn parse_channel_csv_with(text: &str, kind: ChannelKind, acc_units_per_g: f64) -> Result<SampledChannel> {
    let arity = if kind.is_vector() { 3 } else { 1 };
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (row, start_line) = rows.next().ok_or_else(|| Error::parse(1, "missing start-time row"))?;
    let start = parse_fields(start_line, row, arity)?[0];
    let (row, rate_line) = rows.next().ok_or_else(|| Error::parse(2, "missing sample-rate row"))?;
    let rate = parse_fields(rate_line, row, arity)?[0];
    if !(rate > 0.0) {
        return Err(Error::Validation(format!("{kind} sample rate must be positive, got {rate}")));
    }

    let samples = if kind.is_vector() {
        let mut v = Vec::new();
        for (row, line) in rows {
            let f = parse_fields(line, row, 3)?;
            v.push([f[0] / acc_units_per_g, f[1] / acc_units_per_g, f[2] / acc_units_per_g]);
        }
        Samples::Vector(v)
    } else {
        let mut v = Vec::new();
        for (row, line) in rows {
            v.push(parse_fields(line, row, 1)?[0]);
        }
        Samples::Scalar(v)
    };
    SampledChannel::new(kind, start, rate, samples)
}

fn parse_fields(line: &str, row: usize, arity: usize) -> Result<Vec<f64>> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != arity {
        return Err(Error::parse(row, format!("expected {arity} column(s), found {}", fields.len())));
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(row, format!("invalid number `{f}`")))
        })
        .collect()
}

/// Serializes a channel in the same layout [`parse_channel_csv`] reads.
/// ACC values are written back in raw units.
pub fn write_channel_csv(channel: &SampledChannel) -> String {
    write_channel_csv_with(channel, ACC_UNITS_PER_G)
}

pub fn write_channel_csv_with(channel: &SampledChannel, acc_units_per_g: f64) -> String {
    let mut out = String::with_capacity(channel.len() * 10);
    match channel.samples() {
        Samples::Scalar(v) => {
            let _ = writeln!(out, "{}", channel.start_time());
            let _ = writeln!(out, "{}", channel.rate());
            for x in v {
                let _ = writeln!(out, "{x}");
            }
        }
        Samples::Vector(v) => {
            let s = channel.start_time();
            let r = channel.rate();
            let _ = writeln!(out, "{s},{s},{s}");
            let _ = writeln!(out, "{r},{r},{r}");
            for [x, y, z] in v {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    x * acc_units_per_g,
                    y * acc_units_per_g,
                    z * acc_units_per_g
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_eda_example() {
        let ch = parse_channel_csv("1700000000\n4.0\n0.1\n0.2\n", ChannelKind::Eda).unwrap();
        assert_eq!(ch.start_time(), 1_700_000_000.0);
        assert_eq!(ch.rate(), 4.0);
        assert_eq!(ch.samples().as_scalar().unwrap(), &[0.1, 0.2]);
    }

    #[test]
    fn acc_raw_units_scale_to_g() {
        let text = "1700000000,1700000000,1700000000\n32,32,32\n64,0,0\n-32,16,64\n";
        let ch = parse_channel_csv(text, ChannelKind::Acc).unwrap();
        let v = ch.samples().as_vector().unwrap();
        assert_eq!(v[0], [1.0, 0.0, 0.0]);
        assert_eq!(v[1], [-0.5, 0.25, 1.0]);
    }

    #[test]
    fn zero_rate_is_validation_error() {
        let err = parse_channel_csv("1700000000\n0\n0.1\n", ChannelKind::Eda).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn arity_errors_carry_row_number() {
        let err = parse_channel_csv("0,0,0\n32,32,32\n1,2,3\n1,2\n", ChannelKind::Acc).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 4, .. }), "{err:?}");
        let err = parse_channel_csv("0\n4\nabc\n", ChannelKind::Temp).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 3, .. }), "{err:?}");
        assert!(matches!(parse_channel_csv("0\n", ChannelKind::Temp), Err(Error::Parse { row: 2, .. })));
    }

    proptest! {
        #[test]
        fn scalar_round_trip(start in 1.0e9f64..2.0e9, rate in 0.5f64..128.0,
                             samples in prop::collection::vec(-1.0e3f64..1.0e3, 1..64)) {
            let ch = SampledChannel::new(ChannelKind::Bvp, start, rate, Samples::Scalar(samples)).unwrap();
            let back = parse_channel_csv(&write_channel_csv(&ch), ChannelKind::Bvp).unwrap();
            prop_assert_eq!(back, ch);
        }

        #[test]
        fn acc_round_trip(start in 1.0e9f64..2.0e9,
                          samples in prop::collection::vec(prop::array::uniform3(-4.0f64..4.0), 1..64)) {
            let ch = SampledChannel::new(ChannelKind::Acc, start, 32.0, Samples::Vector(samples)).unwrap();
            let back = parse_channel_csv(&write_channel_csv(&ch), ChannelKind::Acc).unwrap();
            prop_assert_eq!(back, ch);
        }
    }
}
