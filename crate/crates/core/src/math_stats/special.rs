//! Log-gamma, the beta density and the regularized incomplete beta function.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const CF_MAX_ITER: usize = 1000;
const CF_EPS: f64 = 1e-15;
const CF_TINY: f64 = 1e-300;

const QUANTILE_MAX_ITER: usize = 200;
const QUANTILE_X_TOL: f64 = 1e-12;

/// Shape parameters of a beta distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaShape {
    alpha: f64,
    beta: f64,
}

impl BetaShape {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidShape {
                alpha,
                beta,
                reason: "shape parameters must be finite",
            });
        }
        if alpha <= 0.0 || beta <= 0.0 {
            return Err(Error::InvalidShape {
                alpha,
                beta,
                reason: "shape parameters must be positive",
            });
        }
        Ok(Self { alpha, beta })
    }

    pub fn symmetric(alpha: f64) -> Result<Self> {
        Self::new(alpha, alpha)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Rejects shapes with either parameter below one. Such shapes put
    /// unbounded weight at the endpoints of `[0, 1]`.
    pub fn ensure_acquisition_shape(&self) -> Result<()> {
        if self.alpha < 1.0 || self.beta < 1.0 {
            return Err(Error::InvalidShape {
                alpha: self.alpha,
                beta: self.beta,
                reason: "acquisition weights require alpha >= 1 and beta >= 1",
            });
        }
        Ok(())
    }
}

/// Closed interval `[lower, upper]` inside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_positive(x))
}

fn ln_gamma_positive(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        return (PI / (PI * x).sin()).ln() - ln_gamma_positive(1.0 - x);
    }
    let z = x - 1.0;
    let mut series = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + series.ln()
}

/// `ln B(alpha, beta)`.
pub fn log_beta_fn(shape: BetaShape) -> f64 {
    let (a, b) = (shape.alpha, shape.beta);
    // B(1, b) = 1 / b
    if a == 1.0 {
        return -b.ln();
    }
    if b == 1.0 {
        return -a.ln();
    }
    ln_gamma_positive(a) + ln_gamma_positive(b) - ln_gamma_positive(a + b)
}

fn check_unit(x: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("{what} must lie in [0, 1], got {x}")));
    }
    Ok(())
}

/// Natural log of the beta density. May be `-inf` (zero density at an
/// endpoint) or `+inf` (a shape parameter below one at an endpoint).
pub fn log_beta_pdf(p: f64, shape: BetaShape) -> Result<f64> {
    check_unit(p, "p")?;
    let (a, b) = (shape.alpha, shape.beta);
    let log_norm = -log_beta_fn(shape);
    let endpoint = |exponent: f64| {
        if exponent > 0.0 {
            f64::NEG_INFINITY
        } else if exponent < 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    };
    let left = if p == 0.0 {
        endpoint(a - 1.0)
    } else if a == 1.0 {
        0.0
    } else {
        (a - 1.0) * p.ln()
    };
    let right = if p == 1.0 {
        endpoint(b - 1.0)
    } else if b == 1.0 {
        0.0
    } else {
        (b - 1.0) * (-p).ln_1p()
    };
    // +inf and -inf can only meet when p is both 0 and 1, which is impossible
    Ok(left + right + log_norm)
}

/// Beta density `p^(α-1) (1-p)^(β-1) / B(α, β)`, evaluated in log space.
pub fn beta_pdf(p: f64, shape: BetaShape) -> Result<f64> {
    log_beta_pdf(p, shape).map(f64::exp)
}

/// Regularized incomplete beta `I_x(α, β)`, i.e. the beta CDF.
pub fn regularized_incomplete_beta(x: f64, shape: BetaShape) -> Result<f64> {
    check_unit(x, "x")?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let (a, b) = (shape.alpha, shape.beta);
    let log_front = a * x.ln() + b * (-x).ln_1p() - log_beta_fn(shape);
    let value = if x < (a + 1.0) / (a + b + 2.0) {
        log_front.exp() * continued_fraction(a, b, x) / a
    } else {
        1.0 - log_front.exp() * continued_fraction(b, a, 1.0 - x) / b
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Continued fraction for the incomplete beta, modified Lentz evaluation.
fn continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let guard = |v: f64| if v.abs() < CF_TINY { CF_TINY } else { v };

    let mut c = 1.0;
    let mut d = 1.0 / guard(1.0 - qab * x / qap);
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 / guard(1.0 + aa * d);
        c = guard(1.0 + aa / c);
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 / guard(1.0 + aa * d);
        c = guard(1.0 + aa / c);
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// Quantile of the beta distribution found by bisection on the CDF.
pub fn beta_quantile(t: f64, shape: BetaShape) -> Result<f64> {
    check_unit(t, "probability")?;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..QUANTILE_MAX_ITER {
        if hi - lo <= QUANTILE_X_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if regularized_incomplete_beta(mid, shape)? < t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Equal-tailed interval holding `mass` of the distribution.
pub fn beta_central_interval(shape: BetaShape, mass: f64) -> Result<Interval> {
    if !(mass > 0.0 && mass < 1.0) {
        return Err(Error::Domain(format!(
            "mass must lie in (0, 1), got {mass}"
        )));
    }
    let tail = 0.5 * (1.0 - mass);
    Ok(Interval {
        lower: beta_quantile(tail, shape)?,
        upper: beta_quantile(1.0 - tail, shape)?,
    })
}
