//! Closed-form policy machinery for exponential claims.
//!
//! With claim rate `mu`, the stationarity conditions of `J0(a, b)` reduce to
//! one-dimensional equations whose solutions are Lambert-W expressions: the
//! optimal buffer at a fixed barrier is
//!
//! ```text
//! a(b) = (-h(b) + L0(exp(h(b)) / (q theta(b)))) / mu,
//! h(b) = 1/(q theta(b)) - (mu/k) (gamma(b)/(q theta(b)) + P)
//! ```
//!
//! and interior barriers are roots of `eta(b) = 0` on `(0, b_bar]`, where
//! `b_bar` is the unique root of `C'' = 0`. The critical cost `k_c` separates
//! the zero-barrier and positive-barrier regimes.

use crate::claims::{ClaimDistribution, RiskModel};
use crate::error::{Error, Result};
use crate::lambertw::{lambert_w0, lambert_w0_of_exp};
use crate::numeric;
use crate::scale::ScaleBasis;

use super::{Candidate, PolicyIngredients, PolicyMethod, PolicyParams, PolicySolution};

/// Number of scan cells used to locate sign changes of `eta` on `(0, b_bar]`.
const ETA_SCAN_CELLS: usize = 2000;

fn exponential_rate(model: &RiskModel) -> Result<f64> {
    match model.claims {
        ClaimDistribution::Exponential { rate } => Ok(rate),
        _ => Err(Error::InvalidModel(
            "operation requires exponential claims".into(),
        )),
    }
}

/// Barrier `b_bar` capping the stationary region: the (last) root of
/// `C''(x) = 0`. Closed form for exponential claims without diffusion;
/// numeric scan otherwise. `None` when `C''` never changes sign, i.e. the
/// stationary region is empty.
pub fn b_bar(basis: &ScaleBasis) -> Option<f64> {
    let model = basis.model();
    if model.sigma_tilde == 0.0 {
        if let ClaimDistribution::Exponential { .. } = model.claims {
            let phi = basis.phi_q();
            let rho = basis.rho_minus().expect("exponential basis has rho_minus");
            let value = ((rho * rho) / (phi * phi)).ln() / (phi - rho);
            return if value > 0.0 { Some(value) } else { None };
        }
    }
    let n = 4000;
    let mut last = None;
    let mut prev_x = 0.0;
    let mut prev = basis.c2(prev_x);
    for i in 1..=n {
        let x = basis.x_max() * i as f64 / n as f64;
        let cur = basis.c2(x);
        if prev.signum() != cur.signum() {
            if let Ok(root) = numeric::brent_root(|t| basis.c2(t), prev_x, x, 1e-10, 200) {
                last = Some(root);
            }
        }
        prev_x = x;
        prev = cur;
    }
    last
}

/// Two-argument stationarity function
/// `eta(b, a) = 1/W_q(b) - (k/(mu theta(b))) F(a) - q (k a - P)`;
/// its zero in `a` marks the smooth-fit buffer for the barrier `b`.
pub fn eta_at(ingredients: &PolicyIngredients, params: &PolicyParams, b: f64, a: f64) -> Result<f64> {
    let mu = exponential_rate(ingredients.model())?;
    let cdf = 1.0 - (-mu * a).exp();
    Ok(1.0 / ingredients.basis().w(b) - params.k / (mu * ingredients.theta(b)) * cdf
        - params.q * (params.k * a - params.penalty))
}

/// Optimal buffer for a fixed barrier, via the principal Lambert branch.
pub fn a_of_b(ingredients: &PolicyIngredients, params: &PolicyParams, b: f64) -> Result<f64> {
    let model = ingredients.model();
    let mu = exponential_rate(model)?;
    params.validate_for(model)?;
    let qtheta = params.q * ingredients.theta(b);
    let h = 1.0 / qtheta - (mu / params.k) * (ingredients.gamma(b) / qtheta + params.penalty);
    let w = lambert_w0_of_exp(h - qtheta.ln())?;
    let a = (w - h) / mu;
    if !(a > 0.0) {
        return Err(Error::InfeasibleBuffer { b });
    }
    Ok(a)
}

/// One-argument stationarity function `eta(b) = eta(b, s(b))` whose roots on
/// `(0, b_bar]` are the interior barrier candidates.
pub fn eta(ingredients: &PolicyIngredients, params: &PolicyParams, b: f64) -> Result<f64> {
    let s = ingredients.buffer_for_barrier(params, b);
    eta_at(ingredients, params, b, s)
}

/// `delta_{k,P}`: the sign of `eta(0)` up to the factor `lambda`, in closed
/// form. Negative exactly when `k > k_c(P)`.
pub fn delta_kp(model: &RiskModel, params: &PolicyParams) -> Result<f64> {
    let mu = exponential_rate(model)?;
    let lambda = model.claim_intensity;
    let c_eff = params.effective_premium(model);
    let expo = (c_eff * mu - lambda - params.q) / (params.q * params.k);
    Ok((lambda + params.q - lambda * params.k * (1.0 - (-expo).exp())) / mu)
}

/// Critical injection cost `k_c(P)`; defined when
/// `f = lambda (c~ mu - lambda - q) / ((q + lambda) q) > 1`, equivalently
/// `P > P_l`. The error carries the threshold `P_l`.
pub fn k_critical(model: &RiskModel, q: f64, penalty: f64) -> Result<f64> {
    let mu = exponential_rate(model)?;
    let lambda = model.claim_intensity;
    let c_eff = model.premium_rate + q * penalty;
    let f = lambda / (q + lambda) * (c_eff * mu - (lambda + q)) / q;
    if f <= 1.0 {
        let p_lower = ((lambda + q).powi(2) / (mu * lambda) - model.premium_rate) / q;
        return Err(Error::CriticalCostUndefined {
            penalty,
            p_lower,
        });
    }
    let w = lambert_w0(-f * (-f).exp())?;
    Ok((q + lambda) / lambda * f / (f + w))
}

/// Inverse problem: the penalty making `b` a root of `eta`. Round-trips with
/// [`eta`] by construction.
pub fn penalty_for_barrier_root(
    ingredients: &PolicyIngredients,
    params: &PolicyParams,
    b: f64,
) -> Result<f64> {
    let mu = exponential_rate(ingredients.model())?;
    let k_over_mu = params.k / mu;
    let j = ingredients.j(b);
    let argument =
        1.0 + (params.q * ingredients.theta(b) * j - ingredients.gamma(b)) / k_over_mu;
    if argument <= 0.0 {
        return Err(Error::NoPenaltyExists { b, argument });
    }
    Ok(-k_over_mu * argument.ln() - j)
}

/// Buffer at the zero barrier, from the reduced equation
/// `mu a = -g + L0((lambda/q) exp(g))`, `g = lambda/q - mu c~/(k q)`.
fn zero_barrier_buffer(model: &RiskModel, params: &PolicyParams) -> Result<f64> {
    let mu = exponential_rate(model)?;
    let lambda = model.claim_intensity;
    let g = lambda / params.q - mu * params.effective_premium(model) / (params.k * params.q);
    let w = lambert_w0_of_exp(g + (lambda / params.q).ln())?;
    Ok((w - g) / mu)
}

/// Exact optimizer for exponential claims: compares the zero-barrier
/// candidate against every root of `eta` on `(0, b_bar]`, each paired with
/// its smooth-fit buffer `s(b) = (j(b) + P)/k`.
pub fn optimize_exponential(model: &RiskModel, params: &PolicyParams) -> Result<PolicySolution> {
    exponential_rate(model)?;
    if model.sigma_tilde != 0.0 {
        return Err(Error::DiffusionUnsupported {
            sigma_tilde: model.sigma_tilde,
        });
    }
    params.validate_for(model)?;
    let ingredients = PolicyIngredients::for_model(model, params.q)?;

    let mut candidates = Vec::new();
    let a0 = zero_barrier_buffer(model, params)?;
    candidates.push(Candidate {
        a: a0,
        b: 0.0,
        j0: ingredients.j0_value(params, a0, 0.0)?,
    });

    if let Some(cap) = b_bar(ingredients.basis()) {
        let eta_fn = |b: f64| eta(&ingredients, params, b).unwrap_or(f64::NAN);
        let lo = cap / ETA_SCAN_CELLS as f64;
        for root in numeric::scan_roots(eta_fn, lo, cap, ETA_SCAN_CELLS, 1e-10) {
            let a = ingredients.buffer_for_barrier(params, root);
            if a <= 0.0 {
                continue;
            }
            candidates.push(Candidate {
                a,
                b: root,
                j0: ingredients.j0_value(params, a, root)?,
            });
        }
    }
    PolicySolution::from_candidates(candidates, PolicyMethod::ExactExponential)
}
