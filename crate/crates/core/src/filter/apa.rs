use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

use super::buffer::RegressorBuffer;
use super::solve::solve_regularized_normal;

/// Step-size, regularization and projection order of an affine projection
/// update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApaParams<T> {
    pub mu: T,
    pub delta: T,
    pub order: usize,
}

impl<T: Scalar> ApaParams<T> {
    pub fn new(mu: T, delta: T, order: usize) -> Result<Self> {
        if !(mu > T::zero()) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "step-size {mu} must be > 0"
            )));
        }
        if !(delta >= T::zero()) || !delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "regularization {delta} must be >= 0"
            )));
        }
        if order == 0 {
            return Err(Error::InvalidParameter(
                "projection order must be at least 1".into(),
            ));
        }
        Ok(Self { mu, delta, order })
    }
}

/// A priori error vector `e(k) = y(k) - X^T(k) w(k)`, one entry per
/// projection column.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorVector<T>(Vec<T>);

impl<T: Scalar> ErrorVector<T> {
    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

/// Adaptive coefficient vector `w(k)` and its sample counter.
#[derive(Debug, Clone)]
pub struct FilterState<T> {
    coefficients: Vec<T>,
    scratch: Vec<T>,
    iteration: u64,
}

impl<T: Scalar> FilterState<T> {
    pub fn zeros(taps: usize) -> Result<Self> {
        if taps == 0 {
            return Err(Error::InvalidParameter(
                "filter length must be at least 1".into(),
            ));
        }
        Ok(Self {
            coefficients: vec![T::zero(); taps],
            scratch: vec![T::zero(); taps],
            iteration: 0,
        })
    }

    pub fn from_coefficients(coefficients: Vec<T>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidParameter(
                "filter length must be at least 1".into(),
            ));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("filter coefficients"));
        }
        let taps = coefficients.len();
        Ok(Self {
            coefficients,
            scratch: vec![T::zero(); taps],
            iteration: 0,
        })
    }

    #[inline]
    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Number of updates applied so far.
    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// Filter output `x(k)^T w(k)` for the newest window.
    pub fn output(&self, buf: &RegressorBuffer<T>) -> Result<T> {
        self.check_taps(buf)?;
        Ok(dot(buf.window(), &self.coefficients))
    }

    /// `e_j = y_j - <x(k-j), w>` for every projection column `j`.
    pub fn compute_error(&self, buf: &RegressorBuffer<T>, y: &[T]) -> Result<ErrorVector<T>> {
        self.check_taps(buf)?;
        if y.len() != buf.order() {
            return Err(Error::mismatch("desired vector", buf.order(), y.len()));
        }
        Ok(ErrorVector(
            buf.columns()
                .zip(y)
                .map(|(col, &yj)| yj - dot(col, &self.coefficients))
                .collect(),
        ))
    }

    /// Affine projection update `w += mu X (X^T X + delta I)^-1 e`.
    ///
    /// Returns the a priori error used for the step.
    pub fn apa_update(
        &mut self,
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
        affine_step(self, buf, y, params.mu, params.delta, None)
    }

    /// Scalar NLMS update `w += mu x e / (x^T x + delta)` on the newest
    /// window. The projection order in `params` is ignored.
    ///
    /// Returns the a priori error.
    pub fn nlms_update(
        &mut self,
        buf: &RegressorBuffer<T>,
        y: T,
        params: &ApaParams<T>,
    ) -> Result<T> {
        self.check_taps(buf)?;
        let x = buf.window();
        let e = y - dot(x, &self.coefficients);
        let denom = dot(x, x) + params.delta;
        if !(denom > T::zero()) {
            return Err(Error::Singular { pivot: 0 });
        }
        let step = params.mu * (e / denom);
        for ((dst, &w), &xl) in self.scratch.iter_mut().zip(&self.coefficients).zip(x) {
            *dst = w + step * xl;
        }
        self.commit()?;
        Ok(e)
    }

    fn check_taps(&self, buf: &RegressorBuffer<T>) -> Result<()> {
        if buf.taps() != self.len() {
            return Err(Error::mismatch("filter length", self.len(), buf.taps()));
        }
        Ok(())
    }

    /// Swaps the staged coefficients in, refusing non-finite results.
    fn commit(&mut self) -> Result<()> {
        if self.scratch.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("updated filter coefficients"));
        }
        std::mem::swap(&mut self.coefficients, &mut self.scratch);
        self.iteration += 1;
        Ok(())
    }
}

/// Shared kernel of the plain and proportionate affine projection updates:
/// `w += mu G X (X^T G X + delta I)^-1 e`, with `G = I` when `gains` is
/// `None`. `G X` is applied as a row scaling.
pub(crate) fn affine_step<T: Scalar>(
    w: &mut FilterState<T>,
    buf: &RegressorBuffer<T>,
    y: &[T],
    mu: T,
    delta: T,
    gains: Option<&[T]>,
) -> Result<ErrorVector<T>> {
    let e = w.compute_error(buf, y)?;
    let m = buf.order();
    if let Some(g) = gains {
        if g.len() != w.len() {
            return Err(Error::mismatch("proportionate vector", w.len(), g.len()));
        }
    }

    let mut normal = vec![T::zero(); m * m];
    for i in 0..m {
        let xi = buf.column(i);
        for j in i..m {
            let xj = buf.column(j);
            let v = match gains {
                None => dot(xi, xj),
                Some(g) => g
                    .iter()
                    .zip(xi)
                    .zip(xj)
                    .fold(T::zero(), |acc, ((&gl, &a), &b)| acc + gl * a * b),
            };
            normal[i * m + j] = v;
            normal[j * m + i] = v;
        }
    }

    let s = solve_regularized_normal(&normal, delta, e.values())?;
    let coef: Vec<T> = s.iter().map(|&sj| mu * sj).collect();

    let history = buf.history();
    for (l, (dst, &wl)) in w.scratch.iter_mut().zip(&w.coefficients).enumerate() {
        // x(k-j)[l] == history[l + j]
        let mut acc = T::zero();
        for (j, &c) in coef.iter().enumerate() {
            acc += c * history[l + j];
        }
        *dst = match gains {
            None => wl + acc,
            Some(g) => wl + g[l] * acc,
        };
    }
    w.commit()?;
    Ok(e)
}
