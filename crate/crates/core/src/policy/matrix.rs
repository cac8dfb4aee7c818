//! Exact policy valuation for matrix-exponential claims, and the numeric
//! optimizers shared by the matrix path and the correct-ingredients
//! approximation.
//!
//! The scalar products of the exponential case become vector products: with
//! `vecC(x) = lambda beta int_0^x W_q(x-y) exp(yB) dy`, each exponential term
//! of `W_q` integrates in closed form through the resolvent
//! `(gamma_j I - B)^{-1}`, giving
//!
//! ```text
//! vecC(x) = sum_j r_j exp(gamma_j x) - t exp(xB),
//! r_j = lambda A_j beta (gamma_j I - B)^{-1},  t = sum_j r_j
//! ```
//!
//! and `J0(a,b) = (1 - vecC'(b) (k M(a) + P e^{aB}) 1) /
//! (q W_q(b) + vecC'(b) e^{aB} 1)`. A root of `W_q` colliding with an
//! eigenvalue of `B` breaks the resolvent form; those terms fall back to
//! adaptive quadrature of the defining convolution.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::approx::{fit_exponential_model, ApproxKind};
use crate::claims::{truncated_mean_matrix, RiskModel};
use crate::error::{Error, Result};
use crate::numeric;
use crate::scale::ScaleBasis;

use super::{
    optimize_exponential, Candidate, PolicyIngredients, PolicyMethod, PolicyParams, PolicySolution,
};

/// Grid geometry of the coarse (a, b) scan.
const GRID_POINTS: usize = 60;
/// Rounds of coordinate-wise refinement after the scan.
const REFINE_ROUNDS: usize = 40;

struct ResolventRow {
    gamma: Complex64,
    row: DVector<Complex64>,
    factor: f64,
}

/// Precomputed vector ingredients of a `(beta, B)` claim law under a given
/// scale basis. Immutable and evaluation-only after construction.
pub struct MatrixIngredients {
    basis: ScaleBasis,
    beta: DVector<f64>,
    generator: DMatrix<f64>,
    generator_sq: DMatrix<f64>,
    rows: Vec<ResolventRow>,
    t0: DVector<f64>,
    slowest_decay: f64,
    quadrature_fallback: bool,
}

impl MatrixIngredients {
    pub fn new(model: &RiskModel, basis: &ScaleBasis) -> Result<Self> {
        if model.sigma_tilde != 0.0 {
            return Err(Error::DiffusionUnsupported {
                sigma_tilde: model.sigma_tilde,
            });
        }
        let (beta, generator) = model.claims.to_matrix_form();
        let n = beta.len();
        let eigs = generator.complex_eigenvalues();
        let scale = eigs.iter().map(|e| e.norm()).fold(1.0, f64::max);
        let slowest_decay = eigs.iter().map(|e| -e.re).fold(f64::INFINITY, f64::min);

        let mut quadrature_fallback = false;
        for (root, _) in basis.components() {
            if eigs.iter().any(|&e| (root - e).norm() < 1e-8 * scale) {
                quadrature_fallback = true;
            }
        }

        let lambda = model.claim_intensity;
        let beta_c = beta.map(|v| Complex64::new(v, 0.0));
        let mut rows = Vec::new();
        let mut t0 = DVector::zeros(n);
        if !quadrature_fallback {
            for (root, coeff) in basis.components() {
                let factor = if root.im.abs() <= 1e-9 * scale.max(1.0) {
                    if root.im < 0.0 {
                        continue; // handled via its conjugate
                    }
                    1.0
                } else if root.im > 0.0 {
                    2.0
                } else {
                    continue;
                };
                // r = lambda A beta (gamma I - B)^{-1}: solve the transposed system
                let mut m = generator.map(|v| Complex64::new(-v, 0.0));
                for i in 0..n {
                    m[(i, i)] += root;
                }
                let row = m
                    .transpose()
                    .lu()
                    .solve(&beta_c)
                    .ok_or_else(|| Error::Numeric("resolvent solve failed".into()))?
                    * (coeff * lambda);
                for i in 0..n {
                    t0[i] += factor * row[i].re;
                }
                rows.push(ResolventRow {
                    gamma: root,
                    row,
                    factor,
                });
            }
        }
        Ok(MatrixIngredients {
            basis: basis.clone(),
            generator_sq: &generator * &generator,
            beta,
            generator,
            rows,
            t0,
            slowest_decay,
            quadrature_fallback,
        })
    }

    pub fn basis(&self) -> &ScaleBasis {
        &self.basis
    }

    fn model(&self) -> &RiskModel {
        self.basis.model()
    }

    /// `exp(aB)`, short-circuited to zero once every mode has decayed below
    /// the double-precision floor.
    pub fn exp_generator(&self, a: f64) -> DMatrix<f64> {
        let n = self.beta.len();
        if a * self.slowest_decay > 1500.0 {
            return DMatrix::zeros(n, n);
        }
        (&self.generator * a).exp()
    }

    /// `M(a) = -B^{-1} - exp(aB)(aI - B^{-1})`.
    pub fn truncation_matrix(&self, a: f64) -> DMatrix<f64> {
        if a * self.slowest_decay > 1500.0 {
            return -self
                .generator
                .clone()
                .try_inverse()
                .expect("generator invertible");
        }
        truncated_mean_matrix(&self.generator, a)
    }

    /// Row vector `d^m/dx^m vecC(x)` as a column-stored `DVector`.
    pub fn vec_c(&self, x: f64, order: u32) -> DVector<f64> {
        if self.quadrature_fallback {
            return self.vec_c_quadrature(x, order);
        }
        let n = self.beta.len();
        let mut out = DVector::zeros(n);
        for r in &self.rows {
            let phase = r.gamma.powu(order) * (r.gamma * x).exp() * r.factor;
            for i in 0..n {
                out[i] += (r.row[i] * phase).re;
            }
        }
        let e = self.exp_generator(x);
        let t_row = match order {
            0 => self.t0.clone(),
            1 => self.generator.transpose() * &self.t0,
            2 => self.generator_sq.transpose() * &self.t0,
            _ => unreachable!("vecC derivatives above 2 are not used"),
        };
        out - e.transpose() * t_row
    }

    /// Defining-convolution fallback, used when a scale root collides with a
    /// generator eigenvalue.
    fn vec_c_quadrature(&self, x: f64, order: u32) -> DVector<f64> {
        let n = self.beta.len();
        let lambda = self.model().claim_intensity;
        let survival_row = |y: f64| -> DVector<f64> {
            self.exp_generator(y).transpose() * &self.beta
        };
        let mut out = DVector::zeros(n);
        for i in 0..n {
            out[i] = lambda
                * numeric::integrate(
                    &|y: f64| self.basis.w_deriv(x - y, order) * survival_row(y)[i],
                    0.0,
                    x,
                    1e-11,
                );
        }
        // boundary terms of differentiating the convolution
        if order >= 1 {
            let e = self.exp_generator(x).transpose() * &self.beta;
            out += e * (lambda * self.basis.w(0.0));
        }
        if order >= 2 {
            let e = self.exp_generator(x);
            let term1 = (&self.generator * &e).transpose() * &self.beta * (lambda * self.basis.w(0.0));
            let term2 = e.transpose() * &self.beta * (lambda * self.basis.w_deriv(0.0, 1));
            out += term1 + term2;
            // measure the w(0) B-term against w'(0): ordering of the two
            // boundary contributions matches d/dx [W(0) beta e^{xB}]
        }
        out
    }

    /// `C_a(x) = vecC(x) e^{aB} 1`.
    pub fn c_a(&self, a: f64, x: f64) -> f64 {
        let ones = DVector::from_element(self.beta.len(), 1.0);
        self.vec_c(x, 0).dot(&(self.exp_generator(a) * ones))
    }

    /// `G_a(x) = vecC(x) (k M(a) + P e^{aB}) 1`.
    pub fn g_a(&self, params: &PolicyParams, a: f64, x: f64) -> f64 {
        let ones = DVector::from_element(self.beta.len(), 1.0);
        let weight = self.truncation_matrix(a) * params.k + self.exp_generator(a) * params.penalty;
        self.vec_c(x, 0).dot(&(weight * ones))
    }

    /// `S_a(x) = Z_q(x) + C_a(x)`.
    pub fn s_a(&self, a: f64, x: f64) -> f64 {
        self.basis.z(x) + self.c_a(a, x)
    }

    /// Exact policy value at zero reserves.
    pub fn j0(&self, params: &PolicyParams, a: f64, b: f64) -> Result<f64> {
        let ones = DVector::from_element(self.beta.len(), 1.0);
        let vc1 = self.vec_c(b, 1);
        let e_a = self.exp_generator(a);
        let weight = self.truncation_matrix(a) * params.k + &e_a * params.penalty;
        let denom = params.q * self.basis.w(b) + vc1.dot(&(&e_a * &ones));
        if denom <= 0.0 {
            return Err(Error::DegeneratePolicy {
                a,
                b,
                denominator: denom,
            });
        }
        Ok((1.0 - vc1.dot(&(weight * &ones))) / denom)
    }

    /// Value that `J0` must equal at an interior stationary barrier (the
    /// ratio of the b-derivatives of numerator and denominator).
    pub fn barrier_stationarity_value(&self, params: &PolicyParams, a: f64, b: f64) -> Option<f64> {
        let ones = DVector::from_element(self.beta.len(), 1.0);
        let vc2 = self.vec_c(b, 2);
        let e_a = self.exp_generator(a);
        let weight = self.truncation_matrix(a) * params.k + &e_a * params.penalty;
        let denom = params.q * self.basis.w_deriv(b, 1) + vc2.dot(&(&e_a * &ones));
        if denom == 0.0 {
            return None;
        }
        Some(-vc2.dot(&(weight * &ones)) / denom)
    }

    /// Candidate value function of a computed solution (same shape as the
    /// scalar case, with vector ingredients).
    pub fn value_function(&self, params: &PolicyParams, solution: &PolicySolution, x: f64) -> f64 {
        let (a, b, j0) = (solution.a_star, solution.b_star, solution.j0);
        if x < -a {
            return -params.penalty;
        }
        if x <= 0.0 {
            return params.k * x + j0;
        }
        let inner = |y: f64| self.g_a(params, a, y) + j0 * self.s_a(a, y);
        if x <= b {
            inner(x)
        } else {
            (x - b) + inner(b)
        }
    }
}

/// The triple `(C_a(x), G_a(x), S_a(x))` of vector ingredients.
pub fn matrix_ingredients(
    model: &RiskModel,
    basis: &ScaleBasis,
    params: &PolicyParams,
    a: f64,
    x: f64,
) -> Result<(f64, f64, f64)> {
    let mi = MatrixIngredients::new(model, basis)?;
    Ok((mi.c_a(a, x), mi.g_a(params, a, x), mi.s_a(a, x)))
}

/// One-shot exact value at `(a, b)` for matrix-exponential claims.
pub fn j0_matrix(model: &RiskModel, params: &PolicyParams, a: f64, b: f64) -> Result<f64> {
    params.validate_for(model)?;
    let basis = ScaleBasis::build(model, params.q)?;
    MatrixIngredients::new(model, &basis)?.j0(params, a, b)
}

/// Search caps shared by the numeric optimizers: `a` up to `8 m1 k`, `b` up
/// to the last root of `C'' = 0` (or `5/Phi_q` when there is none).
fn search_caps(model: &RiskModel, params: &PolicyParams, basis: &ScaleBasis) -> (f64, f64) {
    let a_max = 8.0 * model.claims.mean() * params.k;
    let b_cap = super::b_bar(basis).unwrap_or(basis.x_max());
    (a_max, b_cap)
}

/// `{0} U geometric(lo, hi)` grid with `GRID_POINTS` entries.
fn geometric_grid(hi: f64, decades_down: f64) -> Vec<f64> {
    let mut grid = vec![0.0];
    if hi <= 0.0 {
        return grid;
    }
    let lo = hi * 10f64.powf(-decades_down);
    let n = GRID_POINTS - 1;
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        grid.push(lo * (hi / lo).powf(t));
    }
    grid
}

/// Solve the buffer stationarity `J0(a, b) = k a - P` in `a` at fixed `b`.
fn solve_buffer(
    objective: &dyn Fn(f64, f64) -> Option<f64>,
    params: &PolicyParams,
    b: f64,
    hint: f64,
) -> Option<f64> {
    let phi = |a: f64| objective(a, b).map(|j| j - (params.k * a - params.penalty));
    let mut lo = 0.0;
    let mut phi_lo = phi(lo)?;
    if phi_lo < 0.0 {
        return None;
    }
    let mut hi = hint.max(1e-6);
    for _ in 0..200 {
        match phi(hi) {
            Some(v) if v < 0.0 => {
                let root =
                    numeric::brent_root(|a| phi(a).unwrap_or(f64::NAN), lo, hi, 1e-13, 300).ok()?;
                return Some(root);
            }
            Some(v) => {
                lo = hi;
                phi_lo = v;
                hi *= 2.0;
            }
            None => return None,
        }
    }
    let _ = phi_lo;
    None
}

/// Deterministic coarse-grid scan plus coordinate-wise bracketed refinement.
/// `b_condition` supplies the value `J0` must match at an interior stationary
/// barrier; when present it is used to polish `b` to root-finder precision.
fn optimize_grid_refine(
    objective: &dyn Fn(f64, f64) -> Option<f64>,
    b_condition: Option<&dyn Fn(f64, f64) -> Option<f64>>,
    params: &PolicyParams,
    a_max: f64,
    b_cap: f64,
    method: PolicyMethod,
) -> Result<PolicySolution> {
    let a_grid = geometric_grid(a_max, 9.0);
    let b_grid = geometric_grid(b_cap, 6.0);

    let mut best: Option<Candidate> = None;
    for &b in &b_grid {
        for &a in &a_grid {
            if let Some(j0) = objective(a, b) {
                if j0.is_finite() && best.as_ref().is_none_or(|c| j0 > c.j0) {
                    best = Some(Candidate { a, b, j0 });
                }
            }
        }
    }
    let grid_best = best.ok_or_else(|| Error::Numeric("objective undefined on the whole grid".into()))?;

    let refine_b = |a: f64, b_seed: f64| -> f64 {
        // fresh uniform scan in b at this a, then golden within the best cell
        let cells: usize = 240;
        let mut best_idx: usize = 0;
        let mut best_val = f64::NEG_INFINITY;
        for i in 0..=cells {
            let b = b_cap * i as f64 / cells as f64;
            if let Some(v) = objective(a, b) {
                if v > best_val {
                    best_val = v;
                    best_idx = i;
                }
            }
        }
        let lo = b_cap * best_idx.saturating_sub(1) as f64 / cells as f64;
        let hi = b_cap * (best_idx + 1).min(cells) as f64 / cells as f64;
        let (mut b_new, _) = numeric::golden_max(
            |b| objective(a, b).unwrap_or(f64::NEG_INFINITY),
            lo,
            hi,
            1e-12,
        );
        // polish against the stationarity condition when available
        if let Some(cond) = b_condition {
            if b_new > 1e-9 && b_new < b_cap - 1e-9 {
                let g = |b: f64| match (objective(a, b), cond(a, b)) {
                    (Some(j), Some(c)) => j - c,
                    _ => f64::NAN,
                };
                let delta = (b_new * 1e-3).max(1e-6);
                let (mut lo_b, mut hi_b) = (b_new - delta, b_new + delta);
                for _ in 0..20 {
                    if lo_b <= 0.0 || hi_b >= b_cap {
                        break;
                    }
                    let (glo, ghi) = (g(lo_b), g(hi_b));
                    if glo.is_finite() && ghi.is_finite() && glo.signum() != ghi.signum() {
                        if let Ok(root) = numeric::brent_root(g, lo_b, hi_b, 1e-13, 300) {
                            if objective(a, root).unwrap_or(f64::NEG_INFINITY)
                                >= objective(a, b_new).unwrap_or(f64::NEG_INFINITY) - 1e-10
                            {
                                b_new = root;
                            }
                        }
                        break;
                    }
                    lo_b -= delta;
                    hi_b += delta;
                }
            }
        }
        let _ = b_seed;
        b_new
    };

    let refine_a = |b: f64, a_seed: f64| -> f64 {
        if let Some(root) = solve_buffer(objective, params, b, a_seed.max(1e-3)) {
            return root;
        }
        let hi = a_max.max(a_seed * 4.0);
        let (a_new, _) = numeric::golden_max(
            |a| objective(a, b).unwrap_or(f64::NEG_INFINITY),
            0.0,
            hi,
            1e-12,
        );
        a_new
    };

    let (mut a, mut b) = (grid_best.a, grid_best.b);
    let mut j_prev = grid_best.j0;
    for _ in 0..REFINE_ROUNDS {
        a = refine_a(b, a);
        b = refine_b(a, b);
        let j_now = objective(a, b).unwrap_or(f64::NEG_INFINITY);
        if (j_now - j_prev).abs() <= 1e-13 * (1.0 + j_now.abs()) {
            j_prev = j_now;
            break;
        }
        j_prev = j_now;
    }
    let interior = Candidate { a, b, j0: j_prev };

    // explicit zero-barrier candidate
    let a_zero = refine_a(0.0, a.max(1.0));
    let zero = objective(a_zero, 0.0).map(|j0| Candidate {
        a: a_zero,
        b: 0.0,
        j0,
    });

    let mut candidates = vec![grid_best, interior];
    if let Some(c) = zero {
        candidates.push(c);
    }
    PolicySolution::from_candidates(candidates, method)
}

/// Exact numeric optimizer for matrix-exponential (or any rational) claims.
pub fn optimize_matrix(model: &RiskModel, params: &PolicyParams) -> Result<PolicySolution> {
    params.validate_for(model)?;
    let basis = ScaleBasis::build(model, params.q)?;
    let mi = MatrixIngredients::new(model, &basis)?;
    let (a_max, b_cap) = search_caps(model, params, &basis);
    let objective = |a: f64, b: f64| mi.j0(params, a, b).ok();
    let condition = |a: f64, b: f64| mi.barrier_stationarity_value(params, a, b);
    let solution = optimize_grid_refine(
        &objective,
        Some(&condition),
        params,
        a_max,
        b_cap,
        PolicyMethod::MatrixExact,
    )?;
    if solution.a_star > 1e-9 {
        let fit = solution.j0 - (params.k * solution.a_star - params.penalty);
        if fit.abs() > 1e-6 * (1.0 + solution.j0.abs()) {
            log::warn!("smooth-fit residual {fit:.3e} at the matrix optimum");
        }
    }
    Ok(solution)
}

/// Replace the claims by an exponential law with the same mean and run the
/// closed-form optimizer on the surrogate model.
pub fn expo_pure(model: &RiskModel, params: &PolicyParams) -> Result<PolicySolution> {
    let surrogate = fit_exponential_model(model, ApproxKind::Naive)?;
    let mut solution = optimize_exponential(&surrogate, params)?;
    solution.method = PolicyMethod::ExpoPure;
    Ok(solution)
}

/// Correct-ingredients approximation: maximize the exponential-form value
/// with the true scale, survival and truncated-mean functions plugged in.
pub fn expo_ci(model: &RiskModel, params: &PolicyParams) -> Result<PolicySolution> {
    params.validate_for(model)?;
    let ingredients = PolicyIngredients::for_model(model, params.q)?;
    let (a_max, b_cap) = search_caps(model, params, ingredients.basis());
    let objective = |a: f64, b: f64| ingredients.j0_value(params, a, b).ok();
    // at an interior stationary barrier the value equals j(b)
    let condition = |_a: f64, b: f64| Some(ingredients.j(b));
    optimize_grid_refine(
        &objective,
        Some(&condition),
        params,
        a_max,
        b_cap,
        PolicyMethod::ExpoCI,
    )
}
