//! Feature table CSV. Missing values are empty fields; an optional leading
//! `# config_hash=<hex>` comment records the producing configuration.

use std::fmt::Write as _;

use super::{FeatureName, FeatureVector};
use crate::error::{Error, Result};
use crate::signal::ArousalLabel;

pub const FEATURE_TABLE_HEADER: &str = "participant,period,timestamp,label,SD,CV,RMSSD,pNN50,HR,L,T,LF,HF,LF_HF,EDA_ave,EDA_max,EDA_min,EDA_diff,Temp_ave,Acc_ave,Acc_max";

pub fn write_feature_table(rows: &[FeatureVector], config_hash: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(h) = config_hash {
        let _ = writeln!(out, "# config_hash={h}");
    }
    out.push_str(FEATURE_TABLE_HEADER);
    out.push('\n');
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in rows {
        let mut rec = vec![
            r.participant_id.clone(),
            r.period.to_string(),
            r.timestamp.to_string(),
            r.label.value().to_string(),
        ];
        rec.extend(FeatureName::ALL.iter().map(|f| r.get(*f).map(|v| v.to_string()).unwrap_or_default()));
        w.write_record(&rec).expect("in-memory csv write");
    }
    out.push_str(std::str::from_utf8(&w.into_inner().expect("in-memory csv flush")).expect("utf-8"));
    out
}

/// Parses a feature table; returns the rows and the embedded config hash.
pub fn read_feature_table(text: &str) -> Result<(Vec<FeatureVector>, Option<String>)> {
    let mut hash = None;
    let mut body_start = 0;
    let mut header_row = 1;
    for line in text.split_inclusive('\n') {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix('#') {
            if let Some(h) = rest.trim().strip_prefix("config_hash=") {
                hash = Some(h.trim().to_string());
            }
            body_start += line.len();
            header_row += 1;
        } else {
            break;
        }
    }
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text[body_start..].as_bytes());
    let headers = reader.headers().map_err(|e| Error::parse(header_row, e.to_string()))?;
    if headers.iter().collect::<Vec<_>>().join(",") != FEATURE_TABLE_HEADER {
        return Err(Error::parse(header_row, "unexpected feature table header"));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = header_row + 1 + i;
        let rec = rec.map_err(|e| Error::parse(row, e.to_string()))?;
        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::parse(row, format!("invalid number `{s}`")));
        let label: u8 = rec[3].parse().map_err(|_| Error::parse(row, "label must be 0 or 1"))?;
        let mut v = FeatureVector::new(
            &rec[0],
            rec[1].parse().map_err(|e: Error| Error::parse(row, e.to_string()))?,
            num(&rec[2])?,
            ArousalLabel::try_from(label).map_err(|e| Error::parse(row, e.to_string()))?,
        );
        for (j, f) in FeatureName::ALL.iter().enumerate() {
            let field = &rec[4 + j];
            if !field.is_empty() {
                v.set(*f, Some(num(field)?));
            }
        }
        rows.push(v);
    }
    Ok((rows, hash))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Period;
    use proptest::prelude::*;

    #[test]
    fn empty_table_has_header_only() {
        let text = write_feature_table(&[], Some("abc"));
        assert_eq!(text, format!("# config_hash=abc\n{FEATURE_TABLE_HEADER}\n"));
        let (rows, hash) = read_feature_table(&text).unwrap();
        assert!(rows.is_empty());
        assert_eq!(hash.as_deref(), Some("abc"));
    }

    #[test]
    fn bad_header_rejected() {
        assert!(read_feature_table("participant,period\n").is_err());
    }

    proptest! {
        #[test]
        fn table_round_trip(values in prop::collection::vec(prop::option::of(-1.0e6f64..1.0e6), 17),
                            ts in 1.0e9f64..2.0e9, label in 0u8..2, p2 in any::<bool>()) {
            let period = if p2 { Period::P2 } else { Period::P1 };
            let mut v = FeatureVector::new("G", period, ts, ArousalLabel::try_from(label).unwrap());
            for (f, x) in FeatureName::ALL.iter().zip(&values) {
                v.set(*f, *x);
            }
            let (back, hash) = read_feature_table(&write_feature_table(&[v.clone()], None)).unwrap();
            prop_assert_eq!(hash, None);
            prop_assert_eq!(back, vec![v]);
        }
    }
}
