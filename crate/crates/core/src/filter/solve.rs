use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solves `(A + delta I) s = rhs` for a small symmetric positive
/// (semi-)definite `A` stored row-major, via a dense `L D L^T` factorization.
///
/// A 1x1 system is solved by a single division.
pub fn solve_regularized_normal<T: Scalar>(a: &[T], delta: T, rhs: &[T]) -> Result<Vec<T>> {
    let m = rhs.len();
    if m == 0 {
        return Err(Error::InvalidParameter("empty right-hand side".into()));
    }
    if a.len() != m * m {
        return Err(Error::mismatch("normal matrix", m * m, a.len()));
    }
    if !(delta >= T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "regularization {delta} must be >= 0"
        )));
    }
    if a.iter().chain(rhs).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("normal equations"));
    }

    let scale = a.iter().fold(T::zero(), |acc, v| acc.max(v.abs())) + delta;
    let sym_tol = T::lit(1e-10).max(T::epsilon() * T::lit(8.0)) * scale.max(T::one());
    for i in 0..m {
        for j in 0..i {
            if (a[i * m + j] - a[j * m + i]).abs() > sym_tol {
                return Err(Error::InvalidParameter(format!(
                    "normal matrix not symmetric at ({i},{j})"
                )));
            }
        }
    }

    if m == 1 {
        let d = a[0] + delta;
        if !(d > T::zero()) {
            return Err(Error::Singular { pivot: 0 });
        }
        return Ok(vec![rhs[0] / d]);
    }

    let pivot_floor = T::epsilon() * T::from_count(m) * scale;
    // A + delta I = L D L^T with unit lower-triangular L (row-major, strict
    // lower half used) and diagonal D.
    let mut l = vec![T::zero(); m * m];
    let mut d = vec![T::zero(); m];
    for j in 0..m {
        let mut dj = a[j * m + j] + delta;
        for k in 0..j {
            dj -= l[j * m + k] * l[j * m + k] * d[k];
        }
        if !(dj > pivot_floor) {
            return Err(Error::Singular { pivot: j });
        }
        d[j] = dj;
        for i in j + 1..m {
            let mut s = a[i * m + j];
            for k in 0..j {
                s -= l[i * m + k] * l[j * m + k] * d[k];
            }
            l[i * m + j] = s / dj;
        }
    }

    let mut z = rhs.to_vec();
    for i in 0..m {
        for k in 0..i {
            let t = l[i * m + k] * z[k];
            z[i] -= t;
        }
    }
    for (zi, &di) in z.iter_mut().zip(&d) {
        *zi = *zi / di;
    }
    for i in (0..m).rev() {
        for k in i + 1..m {
            let t = l[k * m + i] * z[k];
            z[i] -= t;
        }
    }
    Ok(z)
}
