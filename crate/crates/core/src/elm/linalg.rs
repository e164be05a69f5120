//! SVD-based Moore–Penrose pseudoinverse and least-squares solve.

use faer::Mat;
use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Default relative cutoff: singular values at or below `rcond * sigma_max` are dropped.
pub const DEFAULT_RCOND: f64 = 1e-10;


fn check_inputs(a: &DMatrix<f64>, rcond: f64) -> Result<()> {
    if !(rcond > 0.0 && rcond.is_finite()) {
        return Err(Error::invalid(format!("rcond must be positive and finite, got {rcond}")));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("matrix contains non-finite entries"));
    }
    Ok(())
}

/// Returns `V Σ⁺ Uᵀ` with `Σ⁺` built from the singular values above the cutoff.
pub fn pseudo_inverse(a: &DMatrix<f64>, rcond: f64) -> Result<DMatrix<f64>> {
    check_inputs(a, rcond)?;
    let (m, k) = a.shape();
    if m == 0 || k == 0 {
        return Ok(DMatrix::zeros(k, m));
    }
    // faer's SVD: nalgebra's returns wrong factors for some rank-deficient inputs.
    let svd = Mat::<f64>::from_fn(m, k, |i, j| a[(i, j)])
        .thin_svd()
        .map_err(|e| Error::NumericFailure(format!("SVD of {m}x{k} matrix did not converge: {e:?}")))?;
    let (u, v) = (svd.U(), svd.V());
    let sigma: Vec<f64> = svd.S().column_vector().iter().copied().collect();

    let sigma_max = sigma.iter().copied().fold(0.0_f64, f64::max);
    let cutoff = rcond * sigma_max;

    let inv: Vec<f64> = sigma
        .iter()
        .map(|&s| if s > cutoff && s > 0.0 { 1.0 / s } else { 0.0 })
        .collect();
    // V Σ⁺ Uᵀ with Σ⁺ folded into the columns of V.
    let scaled_v = DMatrix::from_fn(k, inv.len(), |i, j| v[(i, j)] * inv[j]);
    let u_t = DMatrix::from_fn(inv.len(), m, |i, j| u[(j, i)]);
    let pinv = scaled_v * u_t;
    Ok(pinv)
}

/// Minimum-norm least-squares solution `A⁺ B`.
///
/// Tall systems are first reduced with a Householder QR so the SVD only runs
/// on the square `R` factor, which has the same singular values as `A`.
pub fn solve_least_squares(a: &DMatrix<f64>, b: &DMatrix<f64>, rcond: f64) -> Result<DMatrix<f64>> {
    check_inputs(a, rcond)?;
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            actual: b.nrows(),
        });
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("right-hand side contains non-finite entries"));
    }
    let (m, k) = a.shape();
    if m > 2 * k && k > 0 {
        let qr = a.clone().qr();
        let mut qtb = b.clone();
        qr.q_tr_mul(&mut qtb);
        let r = qr.r();
        let top = qtb.rows(0, k).into_owned();
        return Ok(pseudo_inverse(&r, rcond)? * top);
    }
    Ok(pseudo_inverse(a, rcond)? * b)
}

/// Relative Frobenius residuals of the four Penrose conditions for `pinv` as `A⁺`.
pub fn penrose_residuals(a: &DMatrix<f64>, pinv: &DMatrix<f64>) -> [f64; 4] {
    fn rel(diff: DMatrix<f64>, scale: f64) -> f64 {
        let d = diff.norm();
        if scale == 0.0 {
            d
        } else {
            d / scale
        }
    }
    let a_p = a * pinv;
    let p_a = pinv * a;
    [
        rel(&a_p * a - a, a.norm()),
        rel(&p_a * pinv - pinv, pinv.norm()),
        rel(a_p.transpose() - &a_p, a_p.norm()),
        rel(p_a.transpose() - &p_a, p_a.norm()),
    ]
}
