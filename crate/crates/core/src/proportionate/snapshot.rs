use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Two coefficient registers refreshed every `period` samples.
///
/// At every sample index `k` that is a multiple of the period, `previous`
/// takes the old `current` and `current` takes `w(k)`; otherwise both hold.
/// `previous` is the delayed copy the derivative is measured against: once
/// `k >= 2 * period` its age lies in `[period, 2 * period - 1]`.
///
/// Memory cost is two coefficient vectors regardless of the period.
#[derive(Debug, Clone)]
pub struct SnapshotStore<T> {
    current: Vec<T>,
    previous: Vec<T>,
    period: usize,
    ticks: u64,
    current_taken_at: u64,
    previous_taken_at: u64,
}

impl<T: Scalar> SnapshotStore<T> {
    /// Both registers start as `initial`, which is taken to be `w(0)`.
    pub fn new(initial: &[T], period: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidParameter(
                "snapshot period must be at least 1".into(),
            ));
        }
        if initial.is_empty() {
            return Err(Error::InvalidParameter(
                "filter length must be at least 1".into(),
            ));
        }
        Ok(Self {
            current: initial.to_vec(),
            previous: initial.to_vec(),
            period,
            ticks: 0,
            current_taken_at: 0,
            previous_taken_at: 0,
        })
    }

    /// Period `round(multiplier * L)`, at least one sample.
    pub fn with_multiplier(initial: &[T], multiplier: f64) -> Result<Self> {
        Self::new(initial, Self::period_for(initial.len(), multiplier)?)
    }

    pub fn period_for(taps: usize, multiplier: f64) -> Result<usize> {
        if !(multiplier > 0.0) || !multiplier.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "snapshot multiplier {multiplier} must be > 0"
            )));
        }
        Ok(((multiplier * taps as f64).round() as usize).max(1))
    }

    /// Advances the store to the next sample given the coefficients `w(k)`
    /// at that sample. Returns whether a refresh happened.
    pub fn tick(&mut self, w: &[T]) -> Result<bool> {
        if w.len() != self.current.len() {
            return Err(Error::mismatch(
                "snapshot store",
                self.current.len(),
                w.len(),
            ));
        }
        let k = self.ticks;
        self.ticks += 1;
        if k % self.period as u64 != 0 {
            return Ok(false);
        }
        std::mem::swap(&mut self.previous, &mut self.current);
        self.current.copy_from_slice(w);
        self.previous_taken_at = self.current_taken_at;
        self.current_taken_at = k;
        Ok(true)
    }

    pub fn current(&self) -> &[T] {
        &self.current
    }

    pub fn previous(&self) -> &[T] {
        &self.previous
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// Number of samples ticked so far.
    pub fn ticks(&self) -> u64 {
        self.ticks
    }

    /// Sample index whose coefficients `previous` holds.
    pub fn previous_taken_at(&self) -> u64 {
        self.previous_taken_at
    }

    /// Distance in samples between the last ticked sample and `previous`.
    pub fn previous_age(&self) -> Option<u64> {
        self.ticks
            .checked_sub(1)
            .map(|k| k - self.previous_taken_at)
    }

    pub fn len(&self) -> usize {
        self.current.len()
    }

    pub fn is_empty(&self) -> bool {
        self.current.is_empty()
    }
}

/// Per-coefficient approximate time derivative `|w_l - previous_l|`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeVector<T>(Vec<T>);

impl<T: Scalar> DerivativeVector<T> {
    /// Wraps precomputed magnitudes; negative entries are folded to their
    /// absolute value.
    pub fn new(values: Vec<T>) -> Self {
        Self(values.into_iter().map(|v| v.abs()).collect())
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn derivative_vector<T: Scalar>(
    w: &[T],
    store: &SnapshotStore<T>,
) -> Result<DerivativeVector<T>> {
    let mut out = vec![T::zero(); w.len()];
    derivative_into(w, store, &mut out)?;
    Ok(DerivativeVector(out))
}

pub(crate) fn derivative_into<T: Scalar>(
    w: &[T],
    store: &SnapshotStore<T>,
    out: &mut [T],
) -> Result<()> {
    if w.len() != store.len() {
        return Err(Error::mismatch("snapshot store", store.len(), w.len()));
    }
    for ((d, &wl), &pl) in out.iter_mut().zip(w).zip(store.previous()) {
        *d = (wl - pl).abs();
    }
    Ok(())
}
