use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::snapshot::DerivativeVector;

/// Mixing parameter `alpha` in `[-1, 1]` and denominator guard `epsilon`.
///
/// `alpha = -1` yields uniform gains `1/L`; `alpha = 1` drops the uniform
/// floor entirely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainParams<T> {
    pub alpha: T,
    pub epsilon: T,
}

impl<T: Scalar> GainParams<T> {
    pub fn new(alpha: T, epsilon: T) -> Result<Self> {
        if !(alpha >= -T::one() && alpha <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "alpha {alpha} outside [-1, 1]"
            )));
        }
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "epsilon {epsilon} must be > 0"
            )));
        }
        Ok(Self { alpha, epsilon })
    }

    /// Uniform term `(1 - alpha) / (2L)` shared by both gain rules.
    #[inline]
    pub fn floor(&self, taps: usize) -> T {
        (T::one() - self.alpha) / (T::lit(2.0) * T::from_count(taps))
    }
}

/// Diagonal of the proportionate matrix `G(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProportionateVector<T>(pub(crate) Vec<T>);

impl<T: Scalar> ProportionateVector<T> {
    pub fn new(gains: Vec<T>) -> Result<Self> {
        if gains.iter().any(|g| !g.is_finite() || *g < T::zero()) {
            return Err(Error::InvalidParameter(
                "proportionate gains must be finite and non-negative".into(),
            ));
        }
        Ok(Self(gains))
    }

    pub fn uniform(taps: usize, value: T) -> Result<Self> {
        Self::new(vec![value; taps])
    }

    pub fn gains(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> T {
        self.0.iter().copied().sum()
    }
}

/// `num / den`, reading `0 / 0` as zero.
#[inline]
fn ratio<T: Scalar>(num: T, den: T) -> T {
    if den == T::zero() && num == T::zero() {
        T::zero()
    } else {
        num / den
    }
}

/// IPAPA gains
/// `g_l = (1 - alpha)/(2L) + (1 + alpha)|w_l| / (2 sum_i |w_i| + epsilon)`.
pub fn ipapa_gains<T: Scalar>(w: &[T], params: &GainParams<T>) -> ProportionateVector<T> {
    let mut out = vec![T::zero(); w.len()];
    ipapa_gains_into(w, params, &mut out);
    ProportionateVector(out)
}

pub(crate) fn ipapa_gains_into<T: Scalar>(w: &[T], params: &GainParams<T>, out: &mut [T]) {
    let floor = params.floor(w.len());
    let l1: T = w.iter().map(|v| v.abs()).sum();
    let den = T::lit(2.0) * l1 + params.epsilon;
    let weight = T::one() + params.alpha;
    for (g, &wl) in out.iter_mut().zip(w) {
        *g = floor + ratio(weight * wl.abs(), den);
    }
}

/// Normalization of the derivative-based rule.
///
/// `k_mx = (d_mx^2 + w_mx^2) / (d_mx + w_mx)` always lies between `w_mx`
/// and `d_mx`: it tracks the coefficient peak once the derivatives fade and
/// the derivative peak while they dominate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbNormalization<T> {
    /// Largest coefficient magnitude.
    pub w_mx: T,
    /// Largest derivative.
    pub d_mx: T,
    pub k_mx: T,
}

impl<T: Scalar> DbNormalization<T> {
    pub fn from_peaks(w_mx: T, d_mx: T) -> Self {
        let den = d_mx + w_mx;
        let k_mx = if den == T::zero() {
            T::zero()
        } else {
            (d_mx * d_mx + w_mx * w_mx) / den
        };
        Self { w_mx, d_mx, k_mx }
    }
}

pub fn db_normalization<T: Scalar>(w: &[T], d: &DerivativeVector<T>) -> Result<DbNormalization<T>> {
    if w.len() != d.len() {
        return Err(Error::mismatch("derivative vector", w.len(), d.len()));
    }
    let w_mx = w.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let d_mx = d.values().iter().fold(T::zero(), |m, &v| m.max(v));
    Ok(DbNormalization::from_peaks(w_mx, d_mx))
}

/// Derivative-based gains
/// `g_l = (1 - alpha)/(2L) + (1 + alpha) delta_l / (k_mx + epsilon)`.
///
/// The gains are not renormalized to a unit sum.
pub fn db_gains<T: Scalar>(
    d: &DerivativeVector<T>,
    norm: &DbNormalization<T>,
    params: &GainParams<T>,
) -> ProportionateVector<T> {
    let mut out = vec![T::zero(); d.len()];
    db_gains_into(d.values(), norm, params, &mut out);
    ProportionateVector(out)
}

pub(crate) fn db_gains_into<T: Scalar>(
    d: &[T],
    norm: &DbNormalization<T>,
    params: &GainParams<T>,
    out: &mut [T],
) {
    let floor = params.floor(d.len());
    let den = norm.k_mx + params.epsilon;
    let weight = T::one() + params.alpha;
    for (g, &dl) in out.iter_mut().zip(d) {
        *g = floor + ratio(weight * dl, den);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn raw(alpha: f64, epsilon: f64) -> GainParams<f64> {
        GainParams { alpha, epsilon }
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn ipapa_nlms_limit() {
        let g = ipapa_gains(&[0.3, -2.0, 0.0, 5.0, 1e-9], &raw(-1.0, 0.01));
        assert!(g.gains().iter().all(|&v| v == 0.2));
    }

    #[test]
    fn ipapa_direct_evaluation() {
        let g = ipapa_gains(&[1.0, -1.0, 0.0, 0.0], &raw(0.0, 0.0));
        assert!(close(g.gains(), &[0.375, 0.375, 0.125, 0.125], 1e-15));
        assert!((g.sum() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ipapa_pnlms_limit() {
        let g = ipapa_gains(&[2.0, 0.0, 0.0, 0.0], &raw(1.0, 0.0));
        assert!(close(g.gains(), &[1.0, 0.0, 0.0, 0.0], 1e-15));
    }

    #[test]
    fn ipapa_cold_start_is_floor() {
        let g = ipapa_gains(&[0.0; 8], &raw(0.0, 0.0));
        assert!(g.gains().iter().all(|&v| v == 1.0 / 16.0));
    }

    #[test]
    fn normalization_examples() {
        let n = DbNormalization::from_peaks(0.7f64, 0.7);
        assert!((n.k_mx - 0.7).abs() < 1e-15);
        let n = DbNormalization::from_peaks(0.4f64, 0.0);
        assert!((n.k_mx - 0.4).abs() < 1e-15);
        let n = DbNormalization::from_peaks(0.1f64, 0.3);
        assert!((n.k_mx - 0.25).abs() < 1e-15);
        assert_eq!(DbNormalization::from_peaks(0.0f64, 0.0).k_mx, 0.0);
    }

    #[test]
    fn db_floor_only_when_static() {
        let d = DerivativeVector::new(vec![0.0; 5]);
        let n = db_normalization(&[0.1, 0.2, 0.0, 0.0, 0.0], &d).unwrap();
        let g = db_gains(&d, &n, &raw(0.0, 0.01));
        assert!(g.gains().iter().all(|&v| v == 0.1));
    }

    #[test]
    fn db_nlms_limit() {
        let d = DerivativeVector::new(vec![0.5, 0.0, 3.0, 0.1]);
        let n = db_normalization(&[1.0, 0.0, 0.0, 0.0], &d).unwrap();
        let g = db_gains(&d, &n, &raw(-1.0, 0.01));
        assert!(g.gains().iter().all(|&v| v == 0.25));
    }

    #[test]
    fn db_direct_evaluation() {
        let d = DerivativeVector::new(vec![0.2f64, 0.0, 0.0, 0.0]);
        let n = db_normalization(&[0.2, 0.0, 0.0, 0.0], &d).unwrap();
        assert!((n.k_mx - 0.2).abs() < 1e-15);
        let g = db_gains(&d, &n, &raw(0.0, 0.0));
        assert!(close(g.gains(), &[1.125, 0.125, 0.125, 0.125], 1e-15));
    }

    #[test]
    fn db_normalization_length_mismatch() {
        let d = DerivativeVector::new(vec![0.0; 3]);
        assert!(db_normalization(&[0.0; 4], &d).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(GainParams::new(1.5, 0.01).is_err());
        assert!(GainParams::new(-1.01, 0.01).is_err());
        assert!(GainParams::new(0.0, 0.0).is_err());
        assert!(GainParams::new(0.0, 0.01).is_ok());
        assert!(ProportionateVector::new(vec![0.1, -0.1]).is_err());
    }

    proptest! {
        #[test]
        fn ipapa_floor_and_sum(
            w in prop::collection::vec(-10.0f64..10.0, 1..40),
            alpha in -1.0f64..=1.0,
            eps in 0.0f64..1.0,
        ) {
            let p = raw(alpha, eps);
            let g = ipapa_gains(&w, &p);
            let floor = p.floor(w.len());
            prop_assert!(g.gains().iter().all(|&v| v >= floor));
            prop_assert!(g.sum() <= 1.0 + 1e-12);
            if eps == 0.0 && w.iter().any(|&v| v != 0.0) {
                prop_assert!((g.sum() - 1.0).abs() <= 1e-12);
            }
        }

        #[test]
        fn ipapa_scale_invariant(
            w in prop::collection::vec(-10.0f64..10.0, 1..40),
            c in prop_oneof![-100.0f64..-0.01, 0.01f64..100.0],
            alpha in -1.0f64..=1.0,
        ) {
            prop_assume!(w.iter().any(|&v| v != 0.0));
            let p = raw(alpha, 0.0);
            let a = ipapa_gains(&w, &p);
            let scaled: Vec<f64> = w.iter().map(|v| v * c).collect();
            let b = ipapa_gains(&scaled, &p);
            prop_assert!(close(a.gains(), b.gains(), 1e-12));
        }

        #[test]
        fn db_floor_and_joint_scaling(
            d in prop::collection::vec(0.0f64..5.0, 1..40),
            w_mx in 0.0f64..5.0,
            c in 0.01f64..100.0,
            alpha in -1.0f64..=1.0,
        ) {
            let p = raw(alpha, 0.0);
            let dv = DerivativeVector::new(d.clone());
            let d_mx = d.iter().cloned().fold(0.0, f64::max);
            let n = DbNormalization::from_peaks(w_mx, d_mx);
            let g = db_gains(&dv, &n, &p);
            let floor = p.floor(d.len());
            prop_assert!(g.gains().iter().all(|&v| v >= floor && v.is_finite()));

            let ds = DerivativeVector::new(d.iter().map(|v| v * c).collect());
            let ns = DbNormalization::from_peaks(w_mx * c, d_mx * c);
            let gs = db_gains(&ds, &ns, &p);
            prop_assert!(close(g.gains(), gs.gains(), 1e-12 * (1.0 + g.sum())));
        }

        #[test]
        fn k_mx_between_peaks(w_mx in 0.0f64..10.0, d_mx in 0.0f64..10.0) {
            let n = DbNormalization::from_peaks(w_mx, d_mx);
            if w_mx + d_mx > 0.0 {
                let lo = w_mx.min(d_mx);
                let hi = w_mx.max(d_mx);
                prop_assert!(n.k_mx >= lo * (1.0 - 1e-15) && n.k_mx <= hi * (1.0 + 1e-15));
            } else {
                prop_assert_eq!(n.k_mx, 0.0);
            }
        }
    }
}
