//! Valuation and optimization of bounded-buffer dividend/injection policies.
//!
//! A `(-a, 0, b)` policy pays dividends above the barrier `b`, injects
//! capital (at proportional cost `k >= 1`) to cover shortfalls of size at
//! most `a`, and declares bankruptcy, paying the penalty `P`, on any deeper
//! overshoot. The value at zero reserves is
//!
//! ```text
//! J0(a, b) = (1 - C'(b) (k m(a) + P F(a))) / (F(a) C'(b) + q W_q(b))
//! ```
//!
//! which is exact for exponential claims and serves as the
//! "correct-ingredients" surrogate otherwise; the matrix-exponential exact
//! value replaces the scalar products by their `(beta, B)` vector versions.

mod exponential;
mod hjb;
mod matrix;

pub use exponential::{
    a_of_b, b_bar, delta_kp, eta, eta_at, k_critical, optimize_exponential,
    penalty_for_barrier_root,
};
pub use hjb::{hjb_residual, HjbGrid};
pub use matrix::{
    expo_ci, expo_pure, j0_matrix, matrix_ingredients, optimize_matrix, MatrixIngredients,
};

use crate::claims::RiskModel;
use crate::error::{Error, Result};
use crate::scale::ScaleBasis;

/// Discount rate, proportional injection cost and bankruptcy penalty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyParams {
    pub q: f64,
    pub k: f64,
    pub penalty: f64,
}

impl PolicyParams {
    /// `q > 0`, `k >= 1`; the penalty bound `P > -c/q` is model-dependent and
    /// checked by [`PolicyParams::validate_for`].
    pub fn new(q: f64, k: f64, penalty: f64) -> Result<Self> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::InvalidModel(format!("discount q must be positive, got {q}")));
        }
        if !(k >= 1.0) || !k.is_finite() {
            return Err(Error::InvalidModel(format!("injection cost k must be >= 1, got {k}")));
        }
        if !penalty.is_finite() {
            return Err(Error::InvalidModel(format!("penalty must be finite, got {penalty}")));
        }
        Ok(PolicyParams { q, k, penalty })
    }

    pub fn validate_for(&self, model: &RiskModel) -> Result<()> {
        let bound = -model.premium_rate / self.q;
        if self.penalty <= bound {
            return Err(Error::InvalidModel(format!(
                "penalty {} must exceed -c/q = {bound}",
                self.penalty
            )));
        }
        Ok(())
    }

    /// `c~ = c + q P`, the penalty-adjusted premium rate.
    pub fn effective_premium(&self, model: &RiskModel) -> f64 {
        model.premium_rate + self.q * self.penalty
    }
}

/// Which engine produced a [`PolicySolution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyMethod {
    ExactExponential,
    ExpoPure,
    ExpoCI,
    MatrixExact,
}

impl PolicyMethod {
    pub fn label(self) -> &'static str {
        match self {
            PolicyMethod::ExactExponential => "exact-exponential",
            PolicyMethod::ExpoPure => "expo-pure",
            PolicyMethod::ExpoCI => "expo-ci",
            PolicyMethod::MatrixExact => "matrix",
        }
    }
}

/// Whether the optimal dividend barrier is interior or collapsed to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    PositiveBarrier,
    ZeroBarrier,
}

/// One evaluated `(a, b)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub a: f64,
    pub b: f64,
    pub j0: f64,
}

/// Optimization outcome: the best candidate plus the ledger of everything
/// that was compared against it.
#[derive(Debug, Clone)]
pub struct PolicySolution {
    pub a_star: f64,
    pub b_star: f64,
    pub j0: f64,
    pub regime: Regime,
    pub candidates: Vec<Candidate>,
    pub method: PolicyMethod,
}

impl PolicySolution {
    fn from_candidates(candidates: Vec<Candidate>, method: PolicyMethod) -> Result<Self> {
        let best = candidates
            .iter()
            .copied()
            .filter(|c| c.j0.is_finite())
            .max_by(|x, y| x.j0.partial_cmp(&y.j0).unwrap())
            .ok_or_else(|| Error::Numeric("no feasible policy candidate".into()))?;
        let regime = if best.b > 0.0 {
            Regime::PositiveBarrier
        } else {
            Regime::ZeroBarrier
        };
        Ok(PolicySolution {
            a_star: best.a,
            b_star: best.b,
            j0: best.j0,
            regime,
            candidates,
            method,
        })
    }
}

/// Scale-function curves entering the policy formulas, plus the claim
/// survival and truncated-mean functions of the underlying model. Requires a
/// driftless model (`sigma_tilde = 0`).
#[derive(Debug, Clone)]
pub struct PolicyIngredients {
    basis: ScaleBasis,
}

impl PolicyIngredients {
    pub fn new(basis: ScaleBasis) -> Result<Self> {
        let sigma = basis.model().sigma_tilde;
        if sigma != 0.0 {
            return Err(Error::DiffusionUnsupported { sigma_tilde: sigma });
        }
        Ok(PolicyIngredients { basis })
    }

    pub fn for_model(model: &RiskModel, q: f64) -> Result<Self> {
        Self::new(ScaleBasis::build(model, q)?)
    }

    pub fn basis(&self) -> &ScaleBasis {
        &self.basis
    }

    pub fn model(&self) -> &RiskModel {
        self.basis.model()
    }

    /// `gamma(b) = 1 / C'(b)`.
    pub fn gamma(&self, b: f64) -> f64 {
        1.0 / self.basis.c1(b)
    }

    /// `theta(b) = W_q(b) / C'(b)`; increases from `1/lambda` to
    /// `1/(c Phi_q - q)`.
    pub fn theta(&self, b: f64) -> f64 {
        self.basis.w(b) / self.basis.c1(b)
    }

    /// Limit of `theta` at infinity.
    pub fn theta_infinity(&self) -> f64 {
        1.0 / (self.model().premium_rate * self.basis.phi_q() - self.basis.q())
    }

    /// Marginal trade-off `j(b) = gamma'(b) / (q theta'(b))`, reduced to the
    /// scale curves: `-C'' / (q (W' C' - W C''))`.
    pub fn j(&self, b: f64) -> f64 {
        let c1 = self.basis.c1(b);
        let c2 = self.basis.c2(b);
        let w = self.basis.w(b);
        let w1 = self.basis.w_deriv(b, 1);
        -c2 / (self.basis.q() * (w1 * c1 - w * c2))
    }

    /// Buffer associated with a stationary barrier: `s(b) = (j(b) + P)/k`.
    pub fn buffer_for_barrier(&self, params: &PolicyParams, b: f64) -> f64 {
        (self.j(b) + params.penalty) / params.k
    }

    /// Policy value at zero reserves. Exact for exponential claims; the
    /// correct-ingredients surrogate for any other law.
    pub fn j0_value(&self, params: &PolicyParams, a: f64, b: f64) -> Result<f64> {
        let c1 = self.basis.c1(b);
        let survival = self.model().claims.survival(a);
        let mean_trunc = self.model().claims.mean_function(a);
        let denom = survival * c1 + params.q * self.basis.w(b);
        if denom <= 0.0 {
            return Err(Error::DegeneratePolicy {
                a,
                b,
                denominator: denom,
            });
        }
        let numer = 1.0 - c1 * (params.k * mean_trunc + params.penalty * survival);
        Ok(numer / denom)
    }

    /// Classical barrier-only value `W_q(0) / W_q'(b)` (no injections).
    pub fn de_finetti_value(&self, b: f64) -> f64 {
        self.basis.w(0.0) / self.basis.w_deriv(b, 1)
    }

    /// Candidate value function of a computed solution:
    /// `G_a(x) + J0 S_a(x)` on `[0, b]`, `kx + J0` on `[-a, 0]`, `-P` below
    /// `-a`, and linear payout `x - b + V(b)` above `b`.
    pub fn value_function(&self, params: &PolicyParams, solution: &PolicySolution, x: f64) -> f64 {
        let (a, b, j0) = (solution.a_star, solution.b_star, solution.j0);
        if x < -a {
            return -params.penalty;
        }
        if x <= 0.0 {
            return params.k * x + j0;
        }
        let model = self.model();
        let inner = |y: f64| {
            let g_weight = params.k * model.claims.mean_function(a)
                + (params.penalty + j0) * model.claims.survival(a);
            // the diffusion Gerber-Shiu term k sigma~ W_q vanishes here since
            // ingredients require sigma~ = 0
            g_weight * self.basis.c(y)
                + params.k * model.sigma_tilde * self.basis.w(y)
                + j0 * self.basis.z(y)
        };
        if x <= b {
            inner(x)
        } else {
            (x - b) + inner(b)
        }
    }
}
