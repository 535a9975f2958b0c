//! Tracking accuracy metrics: per-frame center error against ground truth
//! and multi-run aggregation.

use thiserror::Error;

use crate::records::TrackRecord;
use crate::types::Region;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("prediction has {pred} frames but truth has {truth}")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("frame indices disagree at row {row}: prediction {pred}, truth {truth}")]
    FrameMismatch { row: usize, pred: u32, truth: u32 },
}

/// Per-frame Euclidean center errors and their mean.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSummary {
    pub per_frame: Vec<f64>,
    pub mean: f64,
}

/// Euclidean distance between each predicted centroid and the ground-truth
/// centroid, frame by frame, plus the mean over the sequence. Lengths and
/// frame indices must line up.
pub fn mean_center_error(
    pred: &[TrackRecord],
    truth: &[(u32, Region)],
) -> Result<ErrorSummary, EvalError> {
    if pred.len() != truth.len() {
        return Err(EvalError::LengthMismatch { pred: pred.len(), truth: truth.len() });
    }
    let mut per_frame = Vec::with_capacity(pred.len());
    for (row, (p, (tf, treg))) in pred.iter().zip(truth).enumerate() {
        if p.frame != *tf {
            return Err(EvalError::FrameMismatch { row, pred: p.frame, truth: *tf });
        }
        per_frame.push(((p.x - treg.cx).powi(2) + (p.y - treg.cy).powi(2)).sqrt());
    }
    let mean = if per_frame.is_empty() {
        0.0
    } else {
        per_frame.iter().sum::<f64>() / per_frame.len() as f64
    };
    Ok(ErrorSummary { per_frame, mean })
}

/// Averages per-frame error curves across runs: element `t` of the result is
/// the mean over runs of each run's error at frame `t`. All runs must have
/// the same length.
pub fn aggregate_runs(per_run: &[Vec<f64>]) -> Vec<f64> {
    let Some(first) = per_run.first() else {
        return Vec::new();
    };
    let frames = first.len();
    let mut acc = vec![0.0f64; frames];
    for run in per_run {
        assert_eq!(run.len(), frames, "runs must cover the same frames");
        for (a, e) in acc.iter_mut().zip(run) {
            *a += e;
        }
    }
    for a in &mut acc {
        *a /= per_run.len() as f64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record_at(frame: u32, x: f64, y: f64) -> TrackRecord {
        TrackRecord {
            frame,
            x,
            y,
            vx: 0.0,
            vy: 0.0,
            hx: 40.0,
            hy: 30.0,
            pi_color: 0.5,
            pi_texture: 0.5,
            template_updated_color: false,
            template_updated_texture: false,
            ess: 200.0,
        }
    }

    fn truth_at(frame: u32, cx: f64, cy: f64) -> (u32, Region) {
        (frame, Region::new(cx, cy, 40.0, 30.0))
    }

    #[test]
    fn identical_tracks_have_zero_error() {
        let pred = vec![record_at(0, 60.0, 120.0), record_at(1, 62.0, 120.0)];
        let truth = vec![truth_at(0, 60.0, 120.0), truth_at(1, 62.0, 120.0)];
        let s = mean_center_error(&pred, &truth).unwrap();
        assert_eq!(s.per_frame, vec![0.0, 0.0]);
        assert_eq!(s.mean, 0.0);
    }

    #[test]
    fn constant_offset_is_a_345_triangle() {
        let pred = vec![record_at(0, 63.0, 124.0), record_at(1, 65.0, 124.0)];
        let truth = vec![truth_at(0, 60.0, 120.0), truth_at(1, 62.0, 120.0)];
        let s = mean_center_error(&pred, &truth).unwrap();
        assert!(s.per_frame.iter().all(|e| (e - 5.0).abs() < 1e-12));
        assert!((s.mean - 5.0).abs() < 1e-12);
    }

    #[test]
    fn three_frame_hand_case() {
        let pred = vec![
            record_at(0, 1.0, 0.0),
            record_at(1, 0.0, 2.0),
            record_at(2, 6.0, 8.0),
        ];
        let truth = vec![truth_at(0, 0.0, 0.0), truth_at(1, 0.0, 0.0), truth_at(2, 0.0, 0.0)];
        let s = mean_center_error(&pred, &truth).unwrap();
        assert_eq!(s.per_frame, vec![1.0, 2.0, 10.0]);
        assert!((s.mean - 13.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let pred = vec![record_at(0, 0.0, 0.0)];
        let truth = vec![truth_at(0, 0.0, 0.0), truth_at(1, 0.0, 0.0)];
        assert_eq!(
            mean_center_error(&pred, &truth).unwrap_err(),
            EvalError::LengthMismatch { pred: 1, truth: 2 }
        );
    }

    #[test]
    fn misaligned_frames_are_rejected() {
        let pred = vec![record_at(3, 0.0, 0.0)];
        let truth = vec![truth_at(4, 0.0, 0.0)];
        assert!(matches!(
            mean_center_error(&pred, &truth),
            Err(EvalError::FrameMismatch { row: 0, pred: 3, truth: 4 })
        ));
    }

    #[test]
    fn aggregation_averages_per_frame() {
        let runs = vec![vec![1.0, 3.0], vec![3.0, 5.0]];
        assert_eq!(aggregate_runs(&runs), vec![2.0, 4.0]);
        assert!(aggregate_runs(&[]).is_empty());
    }
}
