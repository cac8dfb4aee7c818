//! q-scale functions of the surplus process, built from partial fractions of
//! `1 / (kappa(s) - q)`.
//!
//! For claims with rational transform `f^ = N/D`, the reciprocal
//! `1/(kappa(s) - q)` is `D(s) / p(s)` with
//! `p = (sigma_tilde s^2 + c s - lambda - q) D + lambda N`, so the first
//! scale function is the exponential sum `W_q(x) = sum_j A_j exp(gamma_j x)`
//! over the (simple) roots of `p`, with `A_j = 1/kappa'(gamma_j)`. Complex
//! roots come in conjugate pairs and are evaluated as damped cosines so every
//! result is real by construction.

use num_complex::Complex64;

use crate::claims::RiskModel;
use crate::error::{Error, Result};
use crate::numeric;
use crate::poly::Poly;

/// Laplace exponent `kappa(s) = sigma_tilde s^2 + c s - lambda (1 - f^(s))`.
pub fn laplace_exponent(model: &RiskModel, s: Complex64) -> Result<Complex64> {
    let transform = model.claims.laplace_transform(s)?;
    Ok(model.sigma_tilde * s * s + model.premium_rate * s
        - model.claim_intensity * (Complex64::new(1.0, 0.0) - transform))
}

/// Numerator and denominator polynomials of `kappa(s) - q`.
pub fn characteristic_fraction(model: &RiskModel, q: f64) -> (Poly, Poly) {
    let (num, den) = model.claims.transform_fraction();
    let drift = Poly::new(vec![
        -(model.claim_intensity + q),
        model.premium_rate,
        model.sigma_tilde,
    ]);
    let p = drift.mul(&den).add(&num.scale(model.claim_intensity));
    (p, den)
}

/// All roots of `kappa(s) = q`: degree `n + 1` for `sigma_tilde = 0`, `n + 2`
/// otherwise. Returned in increasing real part, so the dominant root comes
/// last. Fails when two roots (numerically) coincide.
pub fn cl_roots(model: &RiskModel, q: f64) -> Result<Vec<Complex64>> {
    if !(q > 0.0) {
        return Err(Error::Domain(format!("discount rate must be positive, got {q}")));
    }
    let (p, den) = characteristic_fraction(model, q);
    let roots = p.roots()?;
    check_simple_roots(&roots)?;
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    // each root must actually solve kappa(s) = q
    for &r in &roots {
        let resid = (laplace_exponent(model, r)? - q).norm();
        if resid > 1e-9 * (1.0 + q.abs()) {
            return Err(Error::Numeric(format!(
                "characteristic root {r} has residual {resid:.3e}"
            )));
        }
        // a root colliding with a transform pole would break partial fractions
        if den.eval_complex(r).norm() < 1e-10 * (1.0 + scale) {
            return Err(Error::Numeric(format!(
                "characteristic root {r} collides with a transform pole"
            )));
        }
    }
    Ok(roots)
}

/// Partial fractions require simple poles; a (numerically) repeated root is
/// rejected with advice to perturb `q`.
fn check_simple_roots(roots: &[Complex64]) -> Result<()> {
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            let sep = (roots[i] - roots[j]).norm();
            if sep < 1e-8 * scale {
                return Err(Error::RepeatedRoots { separation: sep });
            }
        }
    }
    Ok(())
}

/// One exponential term of a scale function; conjugate pairs are stored once
/// with `factor = 2` and evaluated through their real part.
#[derive(Debug, Clone, Copy)]
struct Term {
    root: Complex64,
    coeff: Complex64,
    factor: f64,
}

/// Partial-fraction representation of `W_q`, `Z_q` and the expected scale
/// after a jump `C`, with derivatives. Immutable after construction.
#[derive(Debug, Clone)]
pub struct ScaleBasis {
    model: RiskModel,
    q: f64,
    roots: Vec<Complex64>,
    coeffs: Vec<Complex64>,
    terms: Vec<Term>,
    phi_q: f64,
    rho_minus: Option<f64>,
    x_max: f64,
}

impl ScaleBasis {
    /// Build the basis for discount rate `q > 0`.
    pub fn build(model: &RiskModel, q: f64) -> Result<Self> {
        let roots = cl_roots(model, q)?;
        let (p, den) = characteristic_fraction(model, q);
        let dp = p.derivative();
        let coeffs: Vec<Complex64> = roots
            .iter()
            .map(|&r| den.eval_complex(r) / dp.eval_complex(r))
            .collect();

        let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
        let im_tol = 1e-9 * scale;
        let phi = *roots.last().expect("nonempty root set");
        if phi.im.abs() > im_tol || phi.re <= 0.0 {
            return Err(Error::Numeric(format!(
                "dominant characteristic root {phi} is not real positive"
            )));
        }
        if roots.len() >= 2 && roots[roots.len() - 2].re >= phi.re - 1e-12 * scale {
            return Err(Error::Numeric(
                "dominant characteristic root is not unique".into(),
            ));
        }

        let mut terms = Vec::new();
        for (&r, &a) in roots.iter().zip(&coeffs) {
            if r.im.abs() <= im_tol {
                terms.push(Term {
                    root: Complex64::new(r.re, 0.0),
                    coeff: Complex64::new(a.re, 0.0),
                    factor: 1.0,
                });
            } else if r.im > 0.0 {
                terms.push(Term {
                    root: r,
                    coeff: a,
                    factor: 2.0,
                });
            }
        }

        let rho_minus = if matches!(
            model.claims,
            crate::claims::ClaimDistribution::Exponential { .. }
        ) {
            Some(roots[0].re)
        } else {
            None
        };

        Ok(ScaleBasis {
            model: model.clone(),
            q,
            phi_q: phi.re,
            rho_minus,
            x_max: 5.0 / phi.re,
            roots,
            coeffs,
            terms,
        })
    }

    /// Override the default search horizon `5 / Phi_q`.
    pub fn with_x_max(mut self, x_max: f64) -> Self {
        self.x_max = x_max;
        self
    }

    pub fn model(&self) -> &RiskModel {
        &self.model
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn phi_q(&self) -> f64 {
        self.phi_q
    }

    /// Most negative real root; populated for exponential claims.
    pub fn rho_minus(&self) -> Option<f64> {
        self.rho_minus
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Roots `gamma_j` paired with coefficients `A_j = 1/kappa'(gamma_j)`.
    pub fn components(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        self.roots.iter().copied().zip(self.coeffs.iter().copied())
    }

    fn sum<F: Fn(Complex64, Complex64) -> Complex64>(&self, x: f64, weight: F) -> f64 {
        self.terms
            .iter()
            .map(|t| t.factor * (weight(t.root, t.coeff) * (t.root * x).exp()).re)
            .sum()
    }

    /// `k`-th derivative of `W_q` at `x >= 0`.
    pub fn w_deriv(&self, x: f64, k: u32) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.sum(x, |r, a| a * r.powu(k))
    }

    /// `W_q(x)`.
    pub fn w(&self, x: f64) -> f64 {
        self.w_deriv(x, 0)
    }

    /// `W_q(x) e^{-Phi_q x}`, stable for large `x`.
    pub fn w_scaled(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.factor * (t.coeff * ((t.root - self.phi_q) * x).exp()).re)
            .sum()
    }

    /// `Z_q(x) = 1 + q int_0^x W_q`.
    pub fn z(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 1.0;
        }
        let at_x = self.sum(x, |r, a| a / r);
        let at_0 = self.sum(0.0, |r, a| a / r);
        1.0 + self.q * (at_x - at_0)
    }

    /// Expected scale after a jump: `C = c W_q - Z_q + sigma_tilde W_q'`.
    pub fn c(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.model.premium_rate * self.w(x) - self.z(x) + self.model.sigma_tilde * self.w_deriv(x, 1)
    }

    /// `C'(x) = c W_q' - q W_q + sigma_tilde W_q''`.
    pub fn c1(&self, x: f64) -> f64 {
        self.model.premium_rate * self.w_deriv(x, 1) - self.q * self.w(x)
            + self.model.sigma_tilde * self.w_deriv(x, 2)
    }

    /// `C''(x)`.
    pub fn c2(&self, x: f64) -> f64 {
        self.model.premium_rate * self.w_deriv(x, 2) - self.q * self.w_deriv(x, 1)
            + self.model.sigma_tilde * self.w_deriv(x, 3)
    }

    /// Global minimizer of `W_q'` on `[0, x_max]`: the dividend barrier of the
    /// classical problem. Exponential claims use the closed form (including
    /// its zero branch); otherwise every sign change of `W_q''` is refined by
    /// bracketed root finding and the minimum over `{0} U interior minima` is
    /// returned.
    pub fn de_finetti_barrier(&self) -> f64 {
        if self.model.sigma_tilde == 0.0 {
            if let crate::claims::ClaimDistribution::Exponential { rate } = self.model.claims {
                let (c, lambda, q) = (self.model.premium_rate, self.model.claim_intensity, self.q);
                if (q + lambda).powi(2) - c * lambda * rate >= 0.0 {
                    return 0.0;
                }
                let g1 = self.phi_q;
                let g2 = self.rho_minus.expect("exponential basis has rho_minus");
                let ratio = (g2 * g2 * (rate + g2)) / (g1 * g1 * (rate + g1));
                return ratio.ln() / (g1 - g2);
            }
        }
        // numeric: local minima of W' are up-crossings of W''
        let n = 4000;
        let mut candidates = vec![0.0];
        let mut prev_x = 0.0;
        let mut prev = self.w_deriv(prev_x, 2);
        for i in 1..=n {
            let x = self.x_max * i as f64 / n as f64;
            let cur = self.w_deriv(x, 2);
            if prev < 0.0 && cur >= 0.0 {
                if let Ok(root) =
                    numeric::brent_root(|t| self.w_deriv(t, 2), prev_x, x, 1e-10, 200)
                {
                    candidates.push(root);
                }
            }
            prev_x = x;
            prev = cur;
        }
        let mut best = candidates[0];
        let mut best_val = self.w_deriv(best, 1);
        for &cand in &candidates[1..] {
            let val = self.w_deriv(cand, 1);
            if val < best_val {
                best = cand;
                best_val = val;
            }
        }
        best
    }
}

/// Closed-form initial values `(W_q(0), W_q'(0), W_q''(0))` for models without
/// diffusion, independent of any root finding.
pub fn initial_values(model: &RiskModel, q: f64) -> Result<(f64, f64, f64)> {
    if model.sigma_tilde != 0.0 {
        return Err(Error::DiffusionUnsupported {
            sigma_tilde: model.sigma_tilde,
        });
    }
    let c = model.premium_rate;
    let lambda = model.claim_intensity;
    let f0 = model.claims.density(0.0);
    Ok((
        1.0 / c,
        (q + lambda) / (c * c),
        ((lambda + q).powi(2) - c * lambda * f0) / (c * c * c),
    ))
}
