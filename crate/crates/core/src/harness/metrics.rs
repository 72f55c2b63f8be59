use std::fmt;

use crate::error::{Error, Result};

/// Floor applied to misalignment values so an exact match stays finite.
pub const MISALIGNMENT_FLOOR_DB: f64 = -300.0;

/// Normalized misalignment `20 log10(||h - w|| / ||h||)` in dB.
pub fn misalignment(h: &[f64], w: &[f64]) -> Result<f64> {
    if h.len() != w.len() {
        return Err(Error::mismatch("misalignment", h.len(), w.len()));
    }
    let h_norm = h.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(h_norm > 0.0) {
        return Err(Error::InvalidParameter(
            "reference response has zero norm".into(),
        ));
    }
    let err_norm = h
        .iter()
        .zip(w)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    if err_norm == 0.0 {
        return Ok(MISALIGNMENT_FLOOR_DB);
    }
    Ok((20.0 * (err_norm / h_norm).log10()).max(MISALIGNMENT_FLOOR_DB))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Realization {
    Index(usize),
    /// Ensemble mean over all realizations.
    Mean,
}

impl fmt::Display for Realization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Realization::Index(i) => write!(f, "{i}"),
            Realization::Mean => f.write_str("mean"),
        }
    }
}

/// Per-iteration misalignment of one algorithm; entry `k` is measured on
/// `w(k)`, before the update at sample `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MisalignmentCurve {
    pub algorithm: String,
    pub realization: Realization,
    pub values_db: Vec<f64>,
}

impl MisalignmentCurve {
    pub fn len(&self) -> usize {
        self.values_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values_db.is_empty()
    }

    /// First iteration at which the curve is at or below `threshold_db`.
    pub fn iterations_to_reach(&self, threshold_db: f64) -> Option<usize> {
        self.values_db.iter().position(|&v| v <= threshold_db)
    }

    pub fn final_db(&self) -> f64 {
        *self.values_db.last().expect("non-empty curve")
    }

    /// Mean over the samples in `range`.
    pub fn mean_over(&self, range: std::ops::Range<usize>) -> f64 {
        let s = &self.values_db[range];
        s.iter().sum::<f64>() / s.len() as f64
    }

    /// Sample variance (n - 1 denominator) of the last `n` values.
    pub fn tail_variance(&self, n: usize) -> f64 {
        let n = n.min(self.values_db.len());
        let tail = &self.values_db[self.values_db.len() - n..];
        if n < 2 {
            return 0.0;
        }
        let mean = tail.iter().sum::<f64>() / n as f64;
        tail.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
    }

    /// Pointwise mean of equally long curves, accumulated in slice order.
    pub fn ensemble_mean(members: &[MisalignmentCurve]) -> Result<MisalignmentCurve> {
        let first = members
            .first()
            .ok_or_else(|| Error::InvalidParameter("no curves to average".into()))?;
        let n = first.len();
        if let Some(bad) = members.iter().find(|c| c.len() != n) {
            return Err(Error::mismatch("ensemble curve", n, bad.len()));
        }
        let count = members.len() as f64;
        let mut acc = vec![0.0; n];
        for c in members {
            for (a, v) in acc.iter_mut().zip(&c.values_db) {
                *a += v;
            }
        }
        acc.iter_mut().for_each(|a| *a /= count);
        Ok(MisalignmentCurve {
            algorithm: first.algorithm.clone(),
            realization: Realization::Mean,
            values_db: acc,
        })
    }
}
