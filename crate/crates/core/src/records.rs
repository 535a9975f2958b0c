//! Persisted tracking output: one CSV row per processed frame, plus the
//! ground-truth CSV the scene generator writes. All reals carry six decimal
//! places; lines end in LF.

use thiserror::Error;

use crate::fusion::StepOutput;
use crate::observation::FeatureKind;
use crate::types::{Region, StateVector};

pub const TRACK_CSV_HEADER: &str = "frame,x,y,vx,vy,hx,hy,pi_color,pi_texture,\
template_updated_color,template_updated_texture,ess";

pub const TRUTH_CSV_HEADER: &str = "frame,cx,cy,w,h";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CsvError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: frame index {got} does not increase over {prev}")]
    NonMonotonicFrame { line: usize, prev: u32, got: u32 },
    #[error("missing header line")]
    MissingHeader,
    #[error("unexpected header `{0}`")]
    WrongHeader(String),
}

/// One processed frame: state estimate, per-feature model posterior,
/// template refresh flags, and the effective sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackRecord {
    pub frame: u32,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub hx: f64,
    pub hy: f64,
    pub pi_color: f64,
    pub pi_texture: f64,
    pub template_updated_color: bool,
    pub template_updated_texture: bool,
    pub ess: f64,
}

impl TrackRecord {
    /// Maps a step result onto the fixed two-feature schema. Modes running a
    /// single model report zero posterior for the absent feature.
    pub fn from_step(frame: u32, out: &StepOutput, models: &[FeatureKind]) -> Self {
        let mut rec = Self::from_state(frame, &out.estimate, models);
        rec.ess = out.ess;
        for (m, kind) in models.iter().enumerate() {
            match kind {
                FeatureKind::Color => {
                    rec.pi_color = out.model_posterior[m];
                    rec.template_updated_color = out.template_updated[m];
                }
                FeatureKind::Texture => {
                    rec.pi_texture = out.model_posterior[m];
                    rec.template_updated_texture = out.template_updated[m];
                }
            }
        }
        rec
    }

    /// The record written for the initialization frame, before any filter
    /// step has run: the supplied state, a uniform posterior, full ESS.
    pub fn from_init(frame: u32, state: &StateVector, models: &[FeatureKind], n: usize) -> Self {
        let mut rec = Self::from_state(frame, state, models);
        let share = 1.0 / models.len() as f64;
        for kind in models {
            match kind {
                FeatureKind::Color => rec.pi_color = share,
                FeatureKind::Texture => rec.pi_texture = share,
            }
        }
        rec.ess = n as f64;
        rec
    }

    fn from_state(frame: u32, state: &StateVector, _models: &[FeatureKind]) -> Self {
        Self {
            frame,
            x: state.x,
            y: state.y,
            vx: state.vx,
            vy: state.vy,
            hx: state.hx,
            hy: state.hy,
            pi_color: 0.0,
            pi_texture: 0.0,
            template_updated_color: false,
            template_updated_texture: false,
            ess: 0.0,
        }
    }
}

/// Serializes records under [`TRACK_CSV_HEADER`]; flags are written as 0/1.
pub fn write_track_csv(records: &[TrackRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(TRACK_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{},{:.6}\n",
            r.frame,
            r.x,
            r.y,
            r.vx,
            r.vy,
            r.hx,
            r.hy,
            r.pi_color,
            r.pi_texture,
            u8::from(r.template_updated_color),
            u8::from(r.template_updated_texture),
            r.ess,
        ));
    }
    out
}

/// Parses what [`write_track_csv`] wrote, checking the header and that
/// frame indices strictly increase.
pub fn parse_track_csv(text: &str) -> Result<Vec<TrackRecord>, CsvError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(CsvError::MissingHeader)?;
    if header != TRACK_CSV_HEADER {
        return Err(CsvError::WrongHeader(header.into()));
    }
    let mut records: Vec<TrackRecord> = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = i + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(CsvError::Malformed {
                line: lineno,
                msg: format!("expected 12 fields, got {}", fields.len()),
            });
        }
        let num = |idx: usize| -> Result<f64, CsvError> {
            fields[idx].parse().map_err(|_| CsvError::Malformed {
                line: lineno,
                msg: format!("field {} is not a number", idx + 1),
            })
        };
        let flag = |idx: usize| -> Result<bool, CsvError> {
            match fields[idx] {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(CsvError::Malformed {
                    line: lineno,
                    msg: format!("field {} is not a 0/1 flag (`{other}`)", idx + 1),
                }),
            }
        };
        let frame: u32 = fields[0].parse().map_err(|_| CsvError::Malformed {
            line: lineno,
            msg: "frame index is not an integer".into(),
        })?;
        if let Some(prev) = records.last() {
            if frame <= prev.frame {
                return Err(CsvError::NonMonotonicFrame { line: lineno, prev: prev.frame, got: frame });
            }
        }
        records.push(TrackRecord {
            frame,
            x: num(1)?,
            y: num(2)?,
            vx: num(3)?,
            vy: num(4)?,
            hx: num(5)?,
            hy: num(6)?,
            pi_color: num(7)?,
            pi_texture: num(8)?,
            template_updated_color: flag(9)?,
            template_updated_texture: flag(10)?,
            ess: num(11)?,
        });
    }
    Ok(records)
}

/// Ground-truth boxes as `frame,cx,cy,w,h` with implicit indices 0..n.
pub fn write_truth_csv(truth: &[Region]) -> String {
    let mut out = String::with_capacity(32 * (truth.len() + 1));
    out.push_str(TRUTH_CSV_HEADER);
    out.push('\n');
    for (t, r) in truth.iter().enumerate() {
        out.push_str(&format!("{},{:.6},{:.6},{:.6},{:.6}\n", t, r.cx, r.cy, r.w, r.h));
    }
    out
}

pub fn parse_truth_csv(text: &str) -> Result<Vec<(u32, Region)>, CsvError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(CsvError::MissingHeader)?;
    if header != TRUTH_CSV_HEADER {
        return Err(CsvError::WrongHeader(header.into()));
    }
    let mut rows: Vec<(u32, Region)> = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = i + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(CsvError::Malformed {
                line: lineno,
                msg: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        let frame: u32 = fields[0].parse().map_err(|_| CsvError::Malformed {
            line: lineno,
            msg: "frame index is not an integer".into(),
        })?;
        if let Some((prev, _)) = rows.last() {
            if frame <= *prev {
                return Err(CsvError::NonMonotonicFrame { line: lineno, prev: *prev, got: frame });
            }
        }
        let mut vals = [0.0f64; 4];
        for (k, v) in vals.iter_mut().enumerate() {
            *v = fields[k + 1].parse().map_err(|_| CsvError::Malformed {
                line: lineno,
                msg: format!("field {} is not a number", k + 2),
            })?;
        }
        rows.push((frame, Region::new(vals[0], vals[1], vals[2], vals[3])));
    }
    Ok(rows)
}
