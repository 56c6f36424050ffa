//! Special functions behind the double-Rayleigh law.
//!
//! `K1` is evaluated from the ascending series of `x K1(x)` for `x <= 2` and from
//! Steed's continued fraction (Temme's CF2 with order 0) above that. The same
//! ascending series also gives `d/dx [x K1(x)]` term by term, and the CDF of
//! `|g|^2`, `F(y) = 1 - 2 sqrt(y) K1(2 sqrt(y))`, is summed directly as the series
//! tail so that it keeps full relative precision for small `y`.
//!
//! With `u = x/2` and `A(k) = (psi(k+1) + psi(k+2)) / 2`:
//!
//! ```text
//! x K1(x) = 1 - sum_k 2 u^(2k+2) (A(k) - ln u) / (k! (k+1)!)
//! ```

use crate::error::{domain, Error, Result};

/// Euler-Mascheroni constant to 20 significant digits.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Arguments at or below this use the ascending series.
pub const SERIES_CROSSOVER: f64 = 2.0;

/// Largest argument accepted by [`tilde_k1_derivative`].
pub const DERIVATIVE_MAX_ARG: f64 = 4.0;

/// Below this `F(y)` is smaller than the smallest normal double.
const CDF_ZERO_CUTOFF: f64 = 1e-300;

const CF_MAX_ITER: usize = 100_000;

/// Truncation control for the ascending series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesAccuracy {
    pub relative_tolerance: f64,
    pub max_terms: usize,
}

impl Default for SeriesAccuracy {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-12,
            max_terms: 60,
        }
    }
}

impl SeriesAccuracy {
    pub fn new(relative_tolerance: f64, max_terms: usize) -> Result<Self> {
        if !(relative_tolerance > 0.0 && relative_tolerance.is_finite()) {
            return domain(format!(
                "relative tolerance must be positive, got {relative_tolerance}"
            ));
        }
        if max_terms == 0 {
            return domain("max_terms must be at least 1");
        }
        Ok(Self {
            relative_tolerance,
            max_terms,
        })
    }
}

/// `psi(n)` for a positive integer `n`, by `psi(k+1) = psi(k) + 1/k`.
pub fn digamma_int(n: u32) -> f64 {
    assert!(n >= 1, "digamma is only tabulated for positive integers");
    (1..n).fold(-EULER_GAMMA, |acc, k| acc + 1.0 / k as f64)
}

/// Series coefficient `A(k) = psi(k+1)/2 + psi(k+2)/2`.
pub fn series_coefficient(k: u32) -> f64 {
    0.5 * digamma_int(k + 1) + 0.5 * digamma_int(k + 2)
}

fn check_positive(x: f64, what: &str) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!(
            "{what} requires a positive finite argument, got {x}"
        ));
    }
    Ok(())
}

/// `1 - x K1(x)` from the ascending series.
fn series_tail(x: f64, acc: &SeriesAccuracy) -> Result<f64> {
    let u = 0.5 * x;
    let u2 = u * u;
    let ln_u = u.ln();
    let mut psi_lo = -EULER_GAMMA; // psi(k+1)
    let mut psi_hi = 1.0 - EULER_GAMMA; // psi(k+2)
    let mut c = u2; // u^(2k+2) / (k! (k+1)!)
    let mut sum = 0.0;
    for k in 0..acc.max_terms {
        let a = 0.5 * (psi_lo + psi_hi);
        sum += 2.0 * c * (a - ln_u);
        let bound = 2.0 * c * (a.abs() + ln_u.abs());
        if bound <= acc.relative_tolerance * sum.abs() {
            return Ok(sum);
        }
        let kf = k as f64;
        psi_lo = psi_hi;
        psi_hi += 1.0 / (kf + 2.0);
        c *= u2 / ((kf + 1.0) * (kf + 2.0));
    }
    Err(Error::Accuracy {
        x,
        tolerance: acc.relative_tolerance,
        terms: acc.max_terms,
    })
}

/// `x K1(x)` from the ascending series alone, for any `x > 0` where it converges
/// within `acc.max_terms`.
pub fn tilde_k1_series(x: f64, acc: &SeriesAccuracy) -> Result<f64> {
    check_positive(x, "tilde_k1_series")?;
    Ok(1.0 - series_tail(x, acc)?)
}

/// `(K0(x), K1(x))` by Steed's method on Temme's second continued fraction.
fn k0_k1_steed(x: f64) -> Result<(f64, f64)> {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let (mut q1, mut q2) = (0.0, 1.0);
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    let mut converged = false;
    for i in 2..CF_MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let q_next = (q1 - b * q2) / a;
        q1 = q2;
        q2 = q_next;
        q += c * q_next;
        // c grows factorially while q1, q2 decay; c * q is invariant under this rescale
        if c.abs() > 1e100 {
            c *= 1e-100;
            q1 *= 1e100;
            q2 *= 1e100;
        }
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Accuracy {
            x,
            tolerance: f64::EPSILON,
            terms: CF_MAX_ITER,
        });
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    Ok((k0, k1))
}

/// `K1(x)` from the continued fraction alone. Accurate everywhere but slow to
/// converge for small `x`; exposed for cross-checking the series branch.
pub fn k1_continued_fraction(x: f64) -> Result<f64> {
    check_positive(x, "k1_continued_fraction")?;
    Ok(k0_k1_steed(x)?.1)
}

/// Modified Bessel function of the second kind, order one.
pub fn bessel_k1(x: f64) -> Result<f64> {
    check_positive(x, "bessel_k1")?;
    if x <= SERIES_CROSSOVER {
        Ok(tilde_k1_series(x, &SeriesAccuracy::default())? / x)
    } else {
        k1_continued_fraction(x)
    }
}

/// `x K1(x)`, which falls from 1 at the origin towards 0.
pub fn tilde_k1(x: f64) -> Result<f64> {
    check_positive(x, "tilde_k1")?;
    if x <= SERIES_CROSSOVER {
        tilde_k1_series(x, &SeriesAccuracy::default())
    } else {
        Ok(x * k1_continued_fraction(x)?)
    }
}

/// `d/dx [x K1(x)]` from the differentiated series (equal to `-x K0(x)`).
pub fn tilde_k1_derivative(x: f64) -> Result<f64> {
    tilde_k1_derivative_with(x, &SeriesAccuracy::default())
}

pub fn tilde_k1_derivative_with(x: f64, acc: &SeriesAccuracy) -> Result<f64> {
    check_positive(x, "tilde_k1_derivative")?;
    if x > DERIVATIVE_MAX_ARG {
        return domain(format!(
            "tilde_k1_derivative series is limited to x <= {DERIVATIVE_MAX_ARG}, got {x}"
        ));
    }
    let u = 0.5 * x;
    let u2 = u * u;
    let ln_u = u.ln();
    let mut psi_lo = -EULER_GAMMA;
    let mut psi_hi = 1.0 - EULER_GAMMA;
    let mut c = u; // u^(2k+1) / (k! (k+1)!)
    let mut sum = 0.0;
    for k in 0..acc.max_terms {
        let kf = k as f64;
        let a = 0.5 * (psi_lo + psi_hi);
        sum += c * (2.0 * (kf + 1.0) * (a - ln_u) - 1.0);
        let bound = c * (2.0 * (kf + 1.0) * (a.abs() + ln_u.abs()) + 1.0);
        if bound <= acc.relative_tolerance * sum.abs() {
            return Ok(-sum);
        }
        psi_lo = psi_hi;
        psi_hi += 1.0 / (kf + 2.0);
        c *= u2 / ((kf + 1.0) * (kf + 2.0));
    }
    Err(Error::Accuracy {
        x,
        tolerance: acc.relative_tolerance,
        terms: acc.max_terms,
    })
}

/// CDF of the normalized squared cascaded gain `|g|^2`:
/// `F(y) = 1 - 2 sqrt(y) K1(2 sqrt(y))`.
pub fn cdf_gsq(y: f64) -> Result<f64> {
    if y.is_nan() || y < 0.0 {
        return domain(format!("cdf_gsq requires y >= 0, got {y}"));
    }
    if y < CDF_ZERO_CUTOFF {
        return Ok(0.0);
    }
    if y.is_infinite() {
        return Ok(1.0);
    }
    let z = 2.0 * y.sqrt();
    if z <= SERIES_CROSSOVER {
        series_tail(z, &SeriesAccuracy::default())
    } else {
        Ok(1.0 - z * k1_continued_fraction(z)?)
    }
}

/// The small-argument approximation `-y ln y` of [`cdf_gsq`].
pub fn cdf_gsq_small_arg(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else {
        -y * y.ln()
    }
}
