//! The squared cascaded magnitude `|g|^2 = X Y` with X, Y ~ Exp(1) independent,
//! integrated directly over the exponential mixture.
//!
//! `P(XY <= y) = ∫ e^{-x} (1 - e^{-y/x}) dx` and the density is
//! `∫ e^{-x} e^{-y/x} / x dx`. Both are computed in `s = ln x`.

use crate::quadrature::Adaptive;
use crate::{OracleError, Result};

const REL_TOL: f64 = 1e-11;

fn bounds(y: f64) -> (f64, f64) {
    let lo = y.ln() - 45.0;
    let hi = 800f64.ln().max(lo + 1.0);
    (lo, hi)
}

/// CDF of the squared double-Rayleigh magnitude.
pub fn gsq_cdf(y: f64) -> Result<f64> {
    if y.is_nan() || y < 0.0 {
        return Err(OracleError::Domain(format!(
            "cdf argument must be >= 0, got {y}"
        )));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    if y.is_infinite() {
        return Ok(1.0);
    }
    let (lo, hi) = bounds(y);
    let q = Adaptive::new(REL_TOL, 1e-300);
    let r = q.integrate(
        |s: f64| {
            let x = s.exp();
            (-x).exp() * (-(-y / x).exp_m1()) * x
        },
        lo,
        hi,
        &[y.ln(), 0.0],
    )?;
    Ok(r.value.min(1.0))
}

/// Density of the squared double-Rayleigh magnitude (equals `2 K0(2 sqrt(y))`).
pub fn gsq_pdf(y: f64) -> Result<f64> {
    if y.is_nan() || y <= 0.0 || y.is_infinite() {
        return Err(OracleError::Domain(format!(
            "pdf argument must be positive, got {y}"
        )));
    }
    let (lo, hi) = bounds(y);
    let q = Adaptive::new(REL_TOL, 1e-300);
    let r = q.integrate(
        |s: f64| {
            let x = s.exp();
            (-x - y / x).exp()
        },
        lo,
        hi,
        &[0.5 * y.ln(), 0.0],
    )?;
    Ok(r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle_k0;
    use crate::oracle_k1;

    #[test]
    fn agrees_with_bessel_quadrature() {
        for &y in &[1e-6f64, 1e-3, 0.1, 1.0, 4.0, 25.0] {
            let s = y.sqrt();
            let k1 = oracle_k1(2.0 * s).unwrap().computed_value;
            let want = 1.0 - 2.0 * s * k1;
            let got = gsq_cdf(y).unwrap();
            assert!(
                (got - want).abs() < 1e-12 + 1e-10 * want,
                "y={y} got={got} want={want}"
            );
            let k0 = oracle_k0(2.0 * s).unwrap().computed_value;
            let pdf = gsq_pdf(y).unwrap();
            assert!(((pdf - 2.0 * k0) / (2.0 * k0)).abs() < 1e-10, "pdf y={y}");
        }
    }

    #[test]
    fn edge_values() {
        assert_eq!(gsq_cdf(0.0).unwrap(), 0.0);
        assert!(gsq_cdf(-1.0).is_err());
        assert!(gsq_cdf(400.0).unwrap() > 0.999_999);
    }
}
