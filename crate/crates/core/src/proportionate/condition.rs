use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Whether one proportionate-NLMS step shrinks a coefficient error:
/// `|h_err - mu g x e / sigma_gx2| < |h_err|`.
pub fn monotone_error_holds<T: Scalar>(h_err: T, g: T, x: T, e: T, mu: T, sigma_gx2: T) -> bool {
    (h_err - mu * g * x * e / sigma_gx2).abs() < h_err.abs()
}

/// Upper bound on a single gain that a monotone coefficient-error step
/// requires: `g < 2 sigma_gx2 |h_err| / (mu |x| |e|)`.
///
/// The bound is infinite (so the check passes) when `x` or `e` is zero.
pub fn necessary_condition_check<T: Scalar>(
    h_err: T,
    g: T,
    x: T,
    e: T,
    mu: T,
    sigma_gx2: T,
) -> Result<bool> {
    if !(sigma_gx2 > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "sigma_gx2 {sigma_gx2} must be > 0"
        )));
    }
    if !(mu > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "step-size {mu} must be > 0"
        )));
    }
    let drive = mu * x.abs() * e.abs();
    if drive == T::zero() {
        return Ok(true);
    }
    Ok(g < T::lit(2.0) * sigma_gx2 * h_err.abs() / drive)
}
