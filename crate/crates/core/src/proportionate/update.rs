use crate::error::{Error, Result};
use crate::filter::{affine_step, ApaParams, ErrorVector, FilterState, RegressorBuffer};
use crate::scalar::Scalar;

use super::gains::{
    db_gains_into, ipapa_gains_into, DbNormalization, GainParams, ProportionateVector,
};
use super::snapshot::{derivative_into, SnapshotStore};

/// Proportionate affine projection update
/// `w += mu G X (X^T G X + delta I)^-1 e` with `G = diag(gains)`.
pub fn proportionate_apa_update<T: Scalar>(
    w: &mut FilterState<T>,
    gains: &ProportionateVector<T>,
    buf: &RegressorBuffer<T>,
    y: &[T],
    params: &ApaParams<T>,
) -> Result<ErrorVector<T>> {
    if params.order != buf.order() {
        return Err(Error::mismatch(
            "projection order",
            buf.order(),
            params.order,
        ));
    }
    if gains
        .gains()
        .iter()
        .any(|g| !g.is_finite() || *g < T::zero())
    {
        return Err(Error::InvalidParameter(
            "proportionate gains must be finite and non-negative".into(),
        ));
    }
    affine_step(w, buf, y, params.mu, params.delta, Some(gains.gains()))
}

/// IPAPA: gains proportional to coefficient magnitudes plus a uniform floor.
#[derive(Debug, Clone)]
pub struct Ipapa<T> {
    apa: ApaParams<T>,
    gain: GainParams<T>,
    gains: Vec<T>,
}

impl<T: Scalar> Ipapa<T> {
    pub fn new(taps: usize, apa: ApaParams<T>, gain: GainParams<T>) -> Self {
        Self {
            apa,
            gain,
            gains: vec![T::zero(); taps],
        }
    }

    pub fn step(
        &mut self,
        w: &mut FilterState<T>,
        buf: &RegressorBuffer<T>,
        y: &[T],
    ) -> Result<ErrorVector<T>> {
        if w.len() != self.gains.len() {
            return Err(Error::mismatch("filter length", self.gains.len(), w.len()));
        }
        if self.apa.order != buf.order() {
            return Err(Error::mismatch(
                "projection order",
                buf.order(),
                self.apa.order,
            ));
        }
        ipapa_gains_into(w.coefficients(), &self.gain, &mut self.gains);
        affine_step(w, buf, y, self.apa.mu, self.apa.delta, Some(&self.gains))
    }

    /// Gains used by the most recent step.
    pub fn gains(&self) -> &[T] {
        &self.gains
    }
}

/// Derivative-based IPAPA.
///
/// Per sample: refresh the snapshots if due, take the derivative against the
/// delayed snapshot, normalize, compute gains, then run the proportionate
/// update.
#[derive(Debug, Clone)]
pub struct DbIpapa<T> {
    apa: ApaParams<T>,
    gain: GainParams<T>,
    store: SnapshotStore<T>,
    derivatives: Vec<T>,
    gains: Vec<T>,
    norm: DbNormalization<T>,
}

impl<T: Scalar> DbIpapa<T> {
    /// `w0` is the filter's starting point; both snapshots are seeded with it.
    pub fn new(w0: &[T], period: usize, apa: ApaParams<T>, gain: GainParams<T>) -> Result<Self> {
        Ok(Self {
            apa,
            gain,
            store: SnapshotStore::new(w0, period)?,
            derivatives: vec![T::zero(); w0.len()],
            gains: vec![T::zero(); w0.len()],
            norm: DbNormalization::from_peaks(T::zero(), T::zero()),
        })
    }

    pub fn with_multiplier(
        w0: &[T],
        multiplier: f64,
        apa: ApaParams<T>,
        gain: GainParams<T>,
    ) -> Result<Self> {
        let period = SnapshotStore::<T>::period_for(w0.len(), multiplier)?;
        Self::new(w0, period, apa, gain)
    }

    pub fn step(
        &mut self,
        w: &mut FilterState<T>,
        buf: &RegressorBuffer<T>,
        y: &[T],
    ) -> Result<ErrorVector<T>> {
        if self.apa.order != buf.order() {
            return Err(Error::mismatch(
                "projection order",
                buf.order(),
                self.apa.order,
            ));
        }
        let coeffs = w.coefficients();
        self.store.tick(coeffs)?;
        derivative_into(coeffs, &self.store, &mut self.derivatives)?;
        let w_mx = coeffs.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let d_mx = self.derivatives.iter().fold(T::zero(), |m, &v| m.max(v));
        self.norm = DbNormalization::from_peaks(w_mx, d_mx);
        db_gains_into(&self.derivatives, &self.norm, &self.gain, &mut self.gains);
        affine_step(w, buf, y, self.apa.mu, self.apa.delta, Some(&self.gains))
    }

    pub fn store(&self) -> &SnapshotStore<T> {
        &self.store
    }

    pub fn gains(&self) -> &[T] {
        &self.gains
    }

    pub fn derivatives(&self) -> &[T] {
        &self.derivatives
    }

    pub fn normalization(&self) -> DbNormalization<T> {
        self.norm
    }
}
