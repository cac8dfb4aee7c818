//! Real branches of the Lambert W function, the inverse of `w -> w exp(w)`.
//!
//! The principal branch `L0` maps `[-1/e, inf)` onto `[-1, inf)`; the lower
//! branch `L-1` maps `[-1/e, 0)` onto `(-inf, -1]`. Both are evaluated by a
//! regime-dependent initial guess refined with Halley iteration; near the
//! branch point `-1/e` the square-root expansion in `p = sqrt(2(ez+1))` is
//! used. Residuals land at machine precision, which matters because these
//! values feed closed-form optimizers where 1e-6 noise is visible.

use crate::error::{Error, Result};

const INV_E: f64 = 1.0 / std::f64::consts::E;
/// Inputs within this distance below -1/e are treated as the branch point.
const BRANCH_SLACK: f64 = 1e-15;

/// Real branch selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambertBranch {
    /// `L0`, defined on `[-1/e, inf)` with range `[-1, inf)`.
    Principal,
    /// `L-1`, defined on `[-1/e, 0)` with range `(-inf, -1]`.
    Lower,
}

impl LambertBranch {
    pub fn eval(self, z: f64) -> Result<f64> {
        match self {
            LambertBranch::Principal => lambert_w0(z),
            LambertBranch::Lower => lambert_wm1(z),
        }
    }
}

/// Principal branch `L0(z)` for `z >= -1/e`.
pub fn lambert_w0(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("lambert_w0 needs finite z, got {z}")));
    }
    if z < -INV_E - BRANCH_SLACK {
        return Err(Error::Domain(format!(
            "lambert_w0 defined on [-1/e, inf), got z = {z}"
        )));
    }
    let z = z.max(-INV_E);
    if z == 0.0 {
        return Ok(0.0);
    }
    let q = z + INV_E;
    if q <= 1e-14 {
        return Ok(-1.0);
    }
    let w0 = if q < 0.04 {
        // branch-point expansion in p = sqrt(2(1 + e z))
        let p = (2.0 * std::f64::consts::E * q).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if z < 3.0 {
        // ln(1+z) matches W at 0 and tracks it well on the mid range
        (1.0 + z).ln()
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    Ok(halley(z, w0))
}

/// Lower branch `L-1(z)` for `z in [-1/e, 0)`.
pub fn lambert_wm1(z: f64) -> Result<f64> {
    if !z.is_finite() || z >= 0.0 || z < -INV_E - BRANCH_SLACK {
        return Err(Error::Domain(format!(
            "lambert_wm1 defined on [-1/e, 0), got z = {z}"
        )));
    }
    let z = z.max(-INV_E);
    let q = z + INV_E;
    if q <= 1e-14 {
        return Ok(-1.0);
    }
    let w0 = if q < 0.12 {
        let p = (2.0 * std::f64::consts::E * q).sqrt();
        -1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p * p * p
    } else {
        // asymptotic form near 0-: w ~ ln(-z) - ln(-ln(-z))
        let l1 = (-z).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    Ok(halley(z, w0))
}

/// `L0(exp(y))` evaluated from the exponent, safe for arguments far beyond
/// the overflow range of `exp`. Solves `w + ln w = y` by Newton.
pub fn lambert_w0_of_exp(y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::Domain(format!(
            "lambert_w0_of_exp needs finite exponent, got {y}"
        )));
    }
    if y < 500.0 {
        return lambert_w0(y.exp());
    }
    let mut w = y - y.ln() + y.ln() / y;
    for _ in 0..40 {
        let f = w + w.ln() - y;
        let step = f / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 1e-15 * w {
            break;
        }
    }
    Ok(w)
}

/// Halley iteration on `f(w) = w e^w - z`; cubic convergence from the guesses
/// above, so a handful of steps reaches machine precision.
fn halley(z: f64, mut w: f64) -> f64 {
    for _ in 0..24 {
        let ew = w.exp();
        let f = w * ew - z;
        if f.abs() <= 1e-16 * z.abs().max(1e-300) {
            break;
        }
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-12 {
            // at the branch point the Newton/Halley denominators vanish
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= f64::EPSILON * w.abs().max(1.0) {
            break;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Independent oracle: bisect w e^w = z over a bracketing interval.
    fn bisect_wew(z: f64, mut lo: f64, mut hi: f64) -> f64 {
        let f = |w: f64| w * w.exp() - z;
        assert!(f(lo) * f(hi) <= 0.0, "oracle bracket invalid");
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn principal_trivial_points() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert_relative_eq!(
            lambert_w0(std::f64::consts::E).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        assert_relative_eq!(lambert_w0(-INV_E).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn principal_matches_bisection_oracle() {
        // frozen from bisection on w e^w = 1 over [0, 1]
        let w = lambert_w0(1.0).unwrap();
        assert_relative_eq!(w, 0.567_143_290_409_783_8, epsilon = 1e-12);
        assert_relative_eq!(w, bisect_wew(1.0, 0.0, 1.0), epsilon = 1e-12);
    }

    #[test]
    fn lower_trivial_points() {
        assert_relative_eq!(lambert_wm1(-INV_E).unwrap(), -1.0, epsilon = 1e-12);
        let z = -2.0 * (-2.0_f64).exp();
        assert_relative_eq!(lambert_wm1(z).unwrap(), -2.0, epsilon = 1e-13);
    }

    #[test]
    fn lower_matches_bisection_oracle() {
        let w = lambert_wm1(-0.1).unwrap();
        assert_relative_eq!(w, bisect_wew(-0.1, -40.0, -1.0), epsilon = 1e-12);
        assert_relative_eq!(w, -3.577_152_063_957_297, epsilon = 1e-9);
    }

    #[test]
    fn domain_errors() {
        assert!(lambert_w0(-INV_E - 1e-9).is_err());
        assert!(lambert_wm1(0.0).is_err());
        assert!(lambert_wm1(1.0).is_err());
        assert!(lambert_wm1(-1.0).is_err());
    }

    #[test]
    fn round_trip_log_spaced_grid() {
        // 10^4 points spanning [-1/e + 1e-12, 1e10]
        let n = 10_000;
        for i in 0..n {
            let t = i as f64 / (n - 1) as f64;
            // map t through a log scale on the positive side, linear near the
            // branch point on the negative side
            let z = if t < 0.2 {
                -INV_E + 1e-12 + (t / 0.2) * (INV_E - 1e-12)
            } else {
                let u = (t - 0.2) / 0.8;
                10f64.powf(-8.0 + 18.0 * u)
            };
            let w = lambert_w0(z).unwrap();
            let resid = (w * w.exp() - z).abs();
            assert!(
                resid <= 1e-12 * z.abs().max(1.0),
                "residual {resid} at z = {z}"
            );
        }
    }

    #[test]
    fn lower_branch_round_trip() {
        let n = 2_000;
        for i in 0..n {
            let t = (i as f64 + 0.5) / n as f64;
            let z = -INV_E * (1.0 - t) - 1e-300;
            if z >= 0.0 {
                continue;
            }
            let w = lambert_wm1(z).unwrap();
            assert!(w <= -1.0 + 1e-12);
            let resid = (w * w.exp() - z).abs();
            assert!(
                resid <= 1e-12 * z.abs().max(1.0),
                "residual {resid} at z = {z}"
            );
        }
    }

    #[test]
    fn monotonicity_on_sampled_grids() {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..500 {
            let z = -INV_E + 1e-10 + i as f64 * 0.02;
            let w = lambert_w0(z).unwrap();
            assert!(w > prev, "L0 not increasing at z = {z}");
            prev = w;
        }
        let mut prev = -1.0 + 1e-12;
        for i in 1..500 {
            let z = -INV_E + i as f64 * (INV_E - 1e-6) / 500.0;
            let w = lambert_wm1(z).unwrap();
            assert!(w < prev, "L-1 not decreasing at z = {z}");
            prev = w;
        }
    }

    #[test]
    fn exponent_form_agrees_and_extends() {
        for y in [-2.0f64, 0.0, 3.0, 50.0, 400.0] {
            let direct = lambert_w0(y.exp()).unwrap();
            let via_exp = lambert_w0_of_exp(y).unwrap();
            assert_relative_eq!(direct, via_exp, epsilon = 1e-12);
        }
        // far beyond exp overflow: w + ln w = y must hold
        let y = 5.0e6;
        let w = lambert_w0_of_exp(y).unwrap();
        assert_relative_eq!(w + w.ln(), y, epsilon = 1e-12);
    }

    #[test]
    fn inverse_composition() {
        for i in 0..=400 {
            let w = -1.0 + i as f64 * 21.0 / 400.0;
            let z = w * w.exp();
            let back = lambert_w0(z).unwrap();
            assert!(
                (back - w).abs() <= 1e-12 * w.abs().max(1.0),
                "L0(w e^w) != w at w = {w}: {back}"
            );
        }
    }
}
