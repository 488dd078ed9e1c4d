//! Session directories: one CSV per channel, `annotations.csv` and a
//! `session.json` manifest naming the participant and collection period.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    channel::{parse_channel_csv_with, write_channel_csv_with},
    ChannelKind, EmotionAnnotation, EmotionCategory, Period, RecordingSession,
};
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "session.json";
pub const ANNOTATIONS_FILE: &str = "annotations.csv";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionManifest {
    pub participant_id: String,
    pub period: Period,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::MissingInput {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

pub fn load_session(dir: &Path, acc_units_per_g: f64) -> Result<RecordingSession> {
    let manifest: SessionManifest = serde_json::from_str(&read(&dir.join(MANIFEST_FILE))?)?;
    let load = |kind: ChannelKind| -> Result<_> {
        let path = dir.join(kind.file_name());
        parse_channel_csv_with(&read(&path)?, kind, acc_units_per_g).map_err(|e| match e {
            Error::Parse { row, message } => Error::Parse {
                row,
                message: format!("{}: {message}", path.display()),
            },
            other => other,
        })
    };
    let channels = [
        load(ChannelKind::Bvp)?,
        load(ChannelKind::Eda)?,
        load(ChannelKind::Temp)?,
        load(ChannelKind::Acc)?,
    ];
    let annotations = parse_annotations_csv(&read(&dir.join(ANNOTATIONS_FILE))?)?;
    RecordingSession::new(manifest.participant_id, manifest.period, channels, annotations)
}

pub fn write_session(dir: &Path, session: &RecordingSession, acc_units_per_g: f64) -> Result<()> {
    fs::create_dir_all(dir)?;
    let manifest = SessionManifest {
        participant_id: session.participant_id.clone(),
        period: session.period,
    };
    fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)? + "\n")?;
    for kind in ChannelKind::ALL {
        fs::write(dir.join(kind.file_name()), write_channel_csv_with(session.channel(kind), acc_units_per_g))?;
    }
    fs::write(dir.join(ANNOTATIONS_FILE), write_annotations_csv(&session.annotations)?)?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct AnnotationRow {
    timestamp: f64,
    category: String,
    #[serde(default)]
    sublabel: Option<String>,
}

pub fn parse_annotations_csv(text: &str) -> Result<Vec<EmotionAnnotation>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::parse(1, e.to_string()))?.clone();
    if headers.iter().take(2).collect::<Vec<_>>() != ["timestamp", "category"] {
        return Err(Error::parse(1, "annotation header must start with `timestamp,category`"));
    }
    let mut out = Vec::new();
    for (i, rec) in reader.deserialize::<AnnotationRow>().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::parse(row, e.to_string()))?;
        let category: EmotionCategory = rec.category.parse().map_err(|_| Error::parse(row, format!("unknown category `{}`", rec.category)))?;
        out.push(EmotionAnnotation {
            timestamp: rec.timestamp,
            category,
            sublabel: rec.sublabel.filter(|s| !s.is_empty()),
        });
    }
    Ok(out)
}

pub fn write_annotations_csv(annotations: &[EmotionAnnotation]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for a in annotations {
        w.serialize(AnnotationRow {
            timestamp: a.timestamp,
            category: a.category.to_string(),
            sublabel: a.sublabel.clone(),
        })
        .map_err(|e| Error::Validation(e.to_string()))?;
    }
    if annotations.is_empty() {
        w.write_record(["timestamp", "category", "sublabel"]).map_err(|e| Error::Validation(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Validation(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Every directory under `root` (inclusive) that carries a session manifest,
/// in sorted path order.
pub fn discover_sessions(root: &Path) -> Result<Vec<PathBuf>> {
    if !root.is_dir() {
        return Err(Error::MissingInput {
            path: root.to_path_buf(),
            reason: "sessions root is not a directory".into(),
        });
    }
    let mut found = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        if dir.join(MANIFEST_FILE).is_file() {
            found.push(dir.clone());
        }
        for entry in fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.is_dir() {
                stack.push(path);
            }
        }
    }
    found.sort();
    Ok(found)
}
