//! Claim-size distributions with rational Laplace transforms, and the
//! compound-Poisson surplus model built on them.
//!
//! Three families are supported: exponential, hyperexponential (finite
//! mixtures of exponentials) and general matrix-exponential laws with
//! survival `F(x) = beta exp(xB) 1`. The first two are stored in scalar form
//! and canonicalize into the `(beta, B)` representation on demand.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Relative separation under which two hyperexponential rates are merged.
const RATE_MERGE_TOL: f64 = 1e-12;
/// Default nonnegativity grid for matrix-exponential densities: `[0, 50 m1]`
/// sampled at this many points.
const DENSITY_GRID_POINTS: usize = 10_000;

/// A claim-size law with rational Laplace transform.
#[derive(Debug, Clone, PartialEq)]
pub enum ClaimDistribution {
    Exponential {
        rate: f64,
    },
    Hyperexponential {
        weights: Vec<f64>,
        rates: Vec<f64>,
    },
    MatrixExponential {
        initial: DVector<f64>,
        generator: DMatrix<f64>,
    },
}

impl ClaimDistribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "exponential rate must be positive, got {rate}"
            )));
        }
        Ok(ClaimDistribution::Exponential { rate })
    }

    /// Mixture of exponentials from mixing weights and rates. Duplicate rates
    /// are merged by summing their weights; weights are normalized to sum 1.
    pub fn hyperexponential(weights: &[f64], rates: &[f64]) -> Result<Self> {
        if weights.len() != rates.len() || weights.is_empty() {
            return Err(Error::InvalidDistribution(
                "hyperexponential needs matching, nonempty weights and rates".into(),
            ));
        }
        for (&w, &r) in weights.iter().zip(rates) {
            if !(w > 0.0) || !(r > 0.0) || !w.is_finite() || !r.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "hyperexponential weights and rates must be positive (got w={w}, rate={r})"
                )));
            }
        }
        let mut pairs: Vec<(f64, f64)> = rates.iter().copied().zip(weights.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
        for (rate, weight) in pairs {
            match merged.last_mut() {
                Some((r, w)) if (rate - *r).abs() <= RATE_MERGE_TOL * rate.max(*r) => *w += weight,
                _ => merged.push((rate, weight)),
            }
        }
        let total: f64 = merged.iter().map(|&(_, w)| w).sum();
        let (rates, weights): (Vec<f64>, Vec<f64>) =
            merged.into_iter().map(|(r, w)| (r, w / total)).unzip();
        if rates.len() == 1 {
            return ClaimDistribution::exponential(rates[0]);
        }
        Ok(ClaimDistribution::Hyperexponential { weights, rates })
    }

    /// Mixture from raw density coefficients `f(x) = sum k_j exp(-mu_j x)`;
    /// the mixing weights are `k_j / mu_j`, normalized.
    pub fn hyperexponential_from_density(coefficients: &[f64], rates: &[f64]) -> Result<Self> {
        if coefficients.len() != rates.len() || coefficients.is_empty() {
            return Err(Error::InvalidDistribution(
                "density coefficients and rates must match and be nonempty".into(),
            ));
        }
        let weights: Vec<f64> = coefficients
            .iter()
            .zip(rates)
            .map(|(&k, &r)| k / r)
            .collect();
        ClaimDistribution::hyperexponential(&weights, rates)
    }

    /// Matrix-exponential law with survival `beta exp(xB) 1`, validated on the
    /// default density grid `[0, 50 m1]`.
    pub fn matrix_exponential(initial: DVector<f64>, generator: DMatrix<f64>) -> Result<Self> {
        Self::matrix_exponential_with_grid(initial, generator, None)
    }

    /// As `matrix_exponential`, with an explicit `(upper, points)` grid for
    /// the pointwise density nonnegativity check.
    pub fn matrix_exponential_with_grid(
        initial: DVector<f64>,
        generator: DMatrix<f64>,
        grid: Option<(f64, usize)>,
    ) -> Result<Self> {
        let n = initial.len();
        if n == 0 || generator.nrows() != n || generator.ncols() != n {
            return Err(Error::InvalidDistribution(format!(
                "generator must be square of the initial vector's order {n}"
            )));
        }
        let total: f64 = initial.sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidDistribution(format!(
                "initial vector must sum to 1 (got {total})"
            )));
        }
        let initial = &initial / total;
        let eigs = generator.complex_eigenvalues();
        let scale = generator.amax().max(1.0);
        for e in eigs.iter() {
            if e.re >= -1e-12 * scale {
                return Err(Error::InvalidDistribution(format!(
                    "generator eigenvalue {e} has nonnegative real part; claims would not integrate"
                )));
            }
        }
        let dist = ClaimDistribution::MatrixExponential {
            initial,
            generator,
        };
        let m1 = dist.moment(1)?;
        let (upper, points) = grid.unwrap_or((50.0 * m1, DENSITY_GRID_POINTS));
        let floor = -1e-9 * dist.density(0.0).abs().max(1.0);
        for i in 0..points {
            let x = upper * i as f64 / (points - 1) as f64;
            let f = dist.density(x);
            if f < floor {
                return Err(Error::InvalidDistribution(format!(
                    "density negative at x = {x}: {f}"
                )));
            }
        }
        Ok(dist)
    }

    /// Matrix-exponential law with density proportional to
    /// `exp(-decay x) (1 + cos(frequency x + phase))`.
    pub fn damped_cosine(decay: f64, phase: f64, frequency: f64) -> Result<Self> {
        if !(decay > 0.0) || !(frequency != 0.0) {
            return Err(Error::InvalidDistribution(
                "damped cosine needs decay > 0 and frequency != 0".into(),
            ));
        }
        let (a, w) = (decay, frequency);
        let a2w2 = a * a + w * w;
        let denom = a2w2 + a * a * phase.cos() - a * w * phase.sin();
        if denom <= 0.0 {
            return Err(Error::InvalidDistribution(
                "damped cosine parameters do not normalize to a density".into(),
            ));
        }
        let u = a * a2w2 / denom;
        // f(x) = e^{-ax} (u + g cos(wx) + d sin(wx))
        let g = u * phase.cos();
        let d = -u * phase.sin();
        // survival F(x) = e^{-ax} (p + r cos(wx) + t sin(wx)) with -F' = f
        let p = u / a;
        let r = (a * g + w * d) / a2w2;
        let t = (a * d - w * g) / a2w2;
        let initial = DVector::from_vec(vec![p, 0.5 * (r + t), 0.5 * (r - t)]);
        let generator = DMatrix::from_row_slice(
            3,
            3,
            &[-a, 0.0, 0.0, 0.0, -a, w, 0.0, -w, -a],
        );
        Self::matrix_exponential(initial, generator)
    }

    /// Number of phases of the `(beta, B)` representation.
    pub fn order(&self) -> usize {
        match self {
            ClaimDistribution::Exponential { .. } => 1,
            ClaimDistribution::Hyperexponential { rates, .. } => rates.len(),
            ClaimDistribution::MatrixExponential { initial, .. } => initial.len(),
        }
    }

    /// Raw moment `m_i = int x^i f(x) dx`, in closed form.
    pub fn moment(&self, i: u32) -> Result<f64> {
        if i == 0 {
            return Err(Error::Domain("moment order must be >= 1".into()));
        }
        let fact: f64 = (1..=i).map(|k| k as f64).product();
        match self {
            ClaimDistribution::Exponential { rate } => Ok(fact / rate.powi(i as i32)),
            ClaimDistribution::Hyperexponential { weights, rates } => Ok(fact
                * weights
                    .iter()
                    .zip(rates)
                    .map(|(&p, &mu)| p / mu.powi(i as i32))
                    .sum::<f64>()),
            ClaimDistribution::MatrixExponential { initial, generator } => {
                // m_i = i! beta (-B)^{-i} 1 via repeated solves
                let neg_b = -generator.clone();
                let lu = neg_b.lu();
                let mut v = DVector::from_element(initial.len(), 1.0);
                for _ in 0..i {
                    v = lu.solve(&v).ok_or_else(|| {
                        Error::InvalidDistribution("generator is singular".into())
                    })?;
                }
                Ok(fact * initial.dot(&v))
            }
        }
    }

    /// Normalized moment `m_i / (i m_{i-1})`; order 1 returns the mean.
    pub fn normalized_moment(&self, i: u32) -> Result<f64> {
        if i == 0 {
            return Err(Error::Domain("normalized moment order must be >= 1".into()));
        }
        if i == 1 {
            return self.moment(1);
        }
        Ok(self.moment(i)? / (i as f64 * self.moment(i - 1)?))
    }

    pub fn mean(&self) -> f64 {
        self.moment(1).expect("first moment of a valid distribution")
    }

    /// Survival function `P(claim > x)`.
    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        match self {
            ClaimDistribution::Exponential { rate } => (-rate * x).exp(),
            ClaimDistribution::Hyperexponential { weights, rates } => weights
                .iter()
                .zip(rates)
                .map(|(&p, &mu)| p * (-mu * x).exp())
                .sum(),
            ClaimDistribution::MatrixExponential { initial, generator } => {
                let e = (generator * x).exp();
                (initial.transpose() * e).sum()
            }
        }
    }

    /// Density `f(x)`.
    pub fn density(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match self {
            ClaimDistribution::Exponential { rate } => rate * (-rate * x).exp(),
            ClaimDistribution::Hyperexponential { weights, rates } => weights
                .iter()
                .zip(rates)
                .map(|(&p, &mu)| p * mu * (-mu * x).exp())
                .sum(),
            ClaimDistribution::MatrixExponential { initial, generator } => {
                let e = (generator * x).exp();
                let exit = -generator * DVector::from_element(initial.len(), 1.0);
                (initial.transpose() * e * exit)[(0, 0)]
            }
        }
    }

    /// Poles of the Laplace transform (eigenvalues of the generator).
    pub fn transform_poles(&self) -> Vec<Complex64> {
        match self {
            ClaimDistribution::Exponential { rate } => vec![Complex64::new(-rate, 0.0)],
            ClaimDistribution::Hyperexponential { rates, .. } => {
                rates.iter().map(|&mu| Complex64::new(-mu, 0.0)).collect()
            }
            ClaimDistribution::MatrixExponential { generator, .. } => {
                generator.complex_eigenvalues().iter().copied().collect()
            }
        }
    }

    /// Laplace transform `f^(s) = E[exp(-s claim)]` at a complex point.
    pub fn laplace_transform(&self, s: Complex64) -> Result<Complex64> {
        let scale = self
            .transform_poles()
            .iter()
            .map(|p| p.norm())
            .fold(1.0, f64::max);
        for pole in self.transform_poles() {
            if (s - pole).norm() <= 1e-12 * scale {
                return Err(Error::TransformPole);
            }
        }
        let (num, den) = self.transform_fraction();
        Ok(num.eval_complex(s) / den.eval_complex(s))
    }

    /// The transform as a ratio of real polynomials `f^(s) = N(s) / D(s)`
    /// with `D` the characteristic polynomial of `-B`.
    pub fn transform_fraction(&self) -> (Poly, Poly) {
        match self {
            ClaimDistribution::Exponential { rate } => {
                (Poly::constant(*rate), Poly::linear(*rate))
            }
            ClaimDistribution::Hyperexponential { weights, rates } => {
                let den = rates
                    .iter()
                    .fold(Poly::constant(1.0), |acc, &mu| acc.mul(&Poly::linear(mu)));
                let mut num = Poly::zero();
                for (j, (&p, &mu)) in weights.iter().zip(rates).enumerate() {
                    let mut term = Poly::constant(p * mu);
                    for (i, &other) in rates.iter().enumerate() {
                        if i != j {
                            term = term.mul(&Poly::linear(other));
                        }
                    }
                    num = num.add(&term);
                }
                (num, den)
            }
            ClaimDistribution::MatrixExponential { initial, generator } => {
                let (char_poly, adjugate) = faddeev_leverrier(generator);
                let exit = -generator * DVector::from_element(initial.len(), 1.0);
                // numerator coefficient of s^k is beta M_{n-k} exit
                let n = initial.len();
                let mut num = vec![0.0; n];
                for (k, slot) in num.iter_mut().enumerate() {
                    let m = &adjugate[n - 1 - k];
                    *slot = (initial.transpose() * m * &exit)[(0, 0)];
                }
                (Poly::new(num), char_poly)
            }
        }
    }

    /// Truncated mean `m(a) = int_0^a y f(y) dy`.
    pub fn mean_function(&self, a: f64) -> f64 {
        if a <= 0.0 {
            return 0.0;
        }
        if a.is_infinite() {
            return self.mean();
        }
        match self {
            ClaimDistribution::Exponential { rate } => {
                (1.0 - (-rate * a).exp()) / rate - a * (-rate * a).exp()
            }
            ClaimDistribution::Hyperexponential { weights, rates } => weights
                .iter()
                .zip(rates)
                .map(|(&p, &mu)| p * ((1.0 - (-mu * a).exp()) / mu - a * (-mu * a).exp()))
                .sum(),
            ClaimDistribution::MatrixExponential { initial, generator } => {
                let m = truncated_mean_matrix(generator, a);
                (initial.transpose() * m).sum()
            }
        }
    }

    /// Canonical `(beta, B)` representation.
    pub fn to_matrix_form(&self) -> (DVector<f64>, DMatrix<f64>) {
        match self {
            ClaimDistribution::Exponential { rate } => (
                DVector::from_element(1, 1.0),
                DMatrix::from_element(1, 1, -rate),
            ),
            ClaimDistribution::Hyperexponential { weights, rates } => {
                let n = rates.len();
                let mut b = DMatrix::zeros(n, n);
                for (i, &mu) in rates.iter().enumerate() {
                    b[(i, i)] = -mu;
                }
                (DVector::from_vec(weights.clone()), b)
            }
            ClaimDistribution::MatrixExponential { initial, generator } => {
                (initial.clone(), generator.clone())
            }
        }
    }
}

/// `M(a) = -B^{-1} - exp(aB) (aI - B^{-1})`, so `beta M(a) 1` is the
/// truncated mean of the law.
pub(crate) fn truncated_mean_matrix(generator: &DMatrix<f64>, a: f64) -> DMatrix<f64> {
    let n = generator.nrows();
    let b_inv = generator
        .clone()
        .try_inverse()
        .expect("generator invertible by construction");
    let e = (generator * a).exp();
    -&b_inv - e * (DMatrix::identity(n, n) * a - b_inv)
}

/// Faddeev-LeVerrier: characteristic polynomial of `A` (monic, in `s`) and
/// the matrix coefficients `M_1..M_n` of `adj(sI - A) = sum M_{k+1} s^{n-1-k}`.
fn faddeev_leverrier(a: &DMatrix<f64>) -> (Poly, Vec<DMatrix<f64>>) {
    let n = a.nrows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut mats = Vec::with_capacity(n);
    let mut m = DMatrix::identity(n, n);
    for k in 1..=n {
        if k > 1 {
            m = a * &m + DMatrix::identity(n, n) * coeffs[n - k + 1];
        }
        let c = -(a * &m).trace() / k as f64;
        coeffs[n - k] = c;
        mats.push(m.clone());
    }
    (Poly::new(coeffs), mats)
}

/// Compound-Poisson surplus model: premium income at rate `c`, claims arriving
/// at Poisson rate `lambda`, optional Brownian part with `sigma_tilde` equal
/// to half the variance coefficient (so the characteristic exponent reads
/// `sigma_tilde s^2 + c s - lambda (1 - f^(s))`).
#[derive(Debug, Clone)]
pub struct RiskModel {
    pub premium_rate: f64,
    pub claim_intensity: f64,
    pub claims: ClaimDistribution,
    pub sigma_tilde: f64,
}

impl RiskModel {
    pub fn new(premium_rate: f64, claim_intensity: f64, claims: ClaimDistribution) -> Result<Self> {
        Self::with_diffusion(premium_rate, claim_intensity, claims, 0.0)
    }

    pub fn with_diffusion(
        premium_rate: f64,
        claim_intensity: f64,
        claims: ClaimDistribution,
        sigma_tilde: f64,
    ) -> Result<Self> {
        if !(premium_rate > 0.0) || !premium_rate.is_finite() {
            return Err(Error::InvalidModel(format!(
                "premium rate must be positive, got {premium_rate}"
            )));
        }
        if !(claim_intensity > 0.0) || !claim_intensity.is_finite() {
            return Err(Error::InvalidModel(format!(
                "claim intensity must be positive, got {claim_intensity}"
            )));
        }
        if !(sigma_tilde >= 0.0) || !sigma_tilde.is_finite() {
            return Err(Error::InvalidModel(format!(
                "sigma_tilde must be nonnegative, got {sigma_tilde}"
            )));
        }
        let model = RiskModel {
            premium_rate,
            claim_intensity,
            claims,
            sigma_tilde,
        };
        if model.loading() <= 0.0 {
            log::warn!(
                "safety loading is not positive (theta = {:.6}); ruin is certain without control",
                model.loading()
            );
        }
        Ok(model)
    }

    /// Build from a relative safety loading: `c = lambda m1 (1 + theta)`.
    pub fn from_loading(theta: f64, claim_intensity: f64, claims: ClaimDistribution) -> Result<Self> {
        let m1 = claims.mean();
        Self::new(claim_intensity * m1 * (1.0 + theta), claim_intensity, claims)
    }

    /// Relative safety loading `theta = (c - lambda m1) / (lambda m1)`.
    pub fn loading(&self) -> f64 {
        let lm = self.claim_intensity * self.claims.mean();
        (self.premium_rate - lm) / lm
    }

    /// Traffic intensity `rho = lambda m1 / c`.
    pub fn rho(&self) -> f64 {
        self.claim_intensity * self.claims.mean() / self.premium_rate
    }

    pub fn mean_claim(&self) -> f64 {
        self.claims.mean()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::integrate;
    use approx::assert_relative_eq;

    pub(crate) fn hyperexp2() -> ClaimDistribution {
        // f(x) = (2/3) e^{-x} + (2/3) e^{-2x}
        ClaimDistribution::hyperexponential_from_density(&[2.0 / 3.0, 2.0 / 3.0], &[1.0, 2.0])
            .unwrap()
    }

    fn hyperexp3() -> ClaimDistribution {
        ClaimDistribution::hyperexponential_from_density(
            &[12.0 / 83.0, 42.0 / 83.0, 150.0 / 83.0],
            &[1.0, 2.0, 3.0],
        )
        .unwrap()
    }

    #[test]
    fn exponential_moments() {
        let d = ClaimDistribution::exponential(2.0).unwrap();
        assert_relative_eq!(d.moment(1).unwrap(), 0.5);
        assert_relative_eq!(d.moment(2).unwrap(), 0.5);
        assert_relative_eq!(d.moment(3).unwrap(), 0.75);
        for i in 1..=4 {
            assert_relative_eq!(d.normalized_moment(i).unwrap(), 0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn hyperexp2_moments_match_mixture_formula_and_quadrature() {
        let d = hyperexp2();
        assert_relative_eq!(d.moment(1).unwrap(), 5.0 / 6.0, epsilon = 1e-14);
        assert_relative_eq!(d.moment(2).unwrap(), 1.5, epsilon = 1e-14);
        assert_relative_eq!(d.moment(3).unwrap(), 17.0 / 4.0, epsilon = 1e-14);
        assert_relative_eq!(d.normalized_moment(2).unwrap(), 0.9, epsilon = 1e-14);
        assert_relative_eq!(d.normalized_moment(3).unwrap(), 17.0 / 18.0, epsilon = 1e-14);
        // quadrature oracle
        for i in 1..=3u32 {
            let oracle = integrate(&|x: f64| x.powi(i as i32) * d.density(x), 0.0, 80.0, 1e-12);
            assert_relative_eq!(d.moment(i).unwrap(), oracle, epsilon = 1e-9);
        }
    }

    #[test]
    fn hyperexp3_mean_matches_quoted_value() {
        let d = hyperexp3();
        assert_relative_eq!(d.moment(1).unwrap(), 235.0 / 498.0, epsilon = 1e-14);
    }

    #[test]
    fn survival_and_transform_basics() {
        let d = ClaimDistribution::exponential(2.0).unwrap();
        assert_eq!(d.survival(0.0), 1.0);
        let f = d.laplace_transform(Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(f.re, 2.0 / 3.0, epsilon = 1e-14);
        assert!(f.im.abs() < 1e-15);

        let h = hyperexp2();
        assert_relative_eq!(h.survival(0.0), 1.0, epsilon = 1e-14);
        assert_relative_eq!(
            h.survival(1.0),
            (2.0 / 3.0) * (-1.0f64).exp() + (1.0 / 3.0) * (-2.0f64).exp(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn transform_pole_detected() {
        let d = ClaimDistribution::exponential(2.0).unwrap();
        assert!(matches!(
            d.laplace_transform(Complex64::new(-2.0, 0.0)),
            Err(Error::TransformPole)
        ));
    }

    #[test]
    fn mean_function_closed_forms() {
        let d = ClaimDistribution::exponential(2.0).unwrap();
        assert_eq!(d.mean_function(0.0), 0.0);
        let expect = (1.0 - (-2.0f64).exp()) / 2.0 - (-2.0f64).exp();
        assert_relative_eq!(d.mean_function(1.0), expect, epsilon = 1e-14);
        // adaptive quadrature oracle for int_0^1 y 2 e^{-2y} dy
        let oracle = integrate(&|y: f64| y * d.density(y), 0.0, 1.0, 1e-13);
        assert_relative_eq!(d.mean_function(1.0), oracle, epsilon = 1e-11);
        assert_relative_eq!(oracle, 0.296_997, epsilon = 1e-6);

        let e1 = ClaimDistribution::exponential(1.0).unwrap();
        assert_relative_eq!(e1.mean_function(1e9), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mean_function_matrix_path_matches_scalar() {
        let d = hyperexp2();
        let (beta, b) = d.to_matrix_form();
        let me = ClaimDistribution::MatrixExponential {
            initial: beta,
            generator: b,
        };
        for a in [0.3, 1.0, 2.5, 10.0] {
            assert_relative_eq!(d.mean_function(a), me.mean_function(a), epsilon = 1e-12);
            assert_relative_eq!(d.survival(a), me.survival(a), epsilon = 1e-12);
            assert_relative_eq!(d.density(a), me.density(a), epsilon = 1e-12);
        }
        for i in 1..=3 {
            assert_relative_eq!(
                d.moment(i).unwrap(),
                me.moment(i).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn to_matrix_form_round_trip() {
        let d = ClaimDistribution::exponential(2.0).unwrap();
        let (beta, b) = d.to_matrix_form();
        assert_eq!(beta.as_slice(), &[1.0]);
        assert_eq!(b[(0, 0)], -2.0);

        let h = hyperexp2();
        let (beta, b) = h.to_matrix_form();
        assert_relative_eq!(beta[0], 2.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(beta[1], 1.0 / 3.0, epsilon = 1e-14);
        assert_eq!(b[(0, 0)], -1.0);
        assert_eq!(b[(1, 1)], -2.0);
        // survival from (beta, B) at x = 1 equals the mixture value
        let me = ClaimDistribution::MatrixExponential {
            initial: beta,
            generator: b,
        };
        assert_relative_eq!(
            me.survival(1.0),
            (2.0 / 3.0) * (-1.0f64).exp() + (1.0 / 3.0) * (-2.0f64).exp(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn duplicate_rates_merge() {
        let d = ClaimDistribution::hyperexponential(&[0.25, 0.25, 0.5], &[1.0, 1.0, 2.0]).unwrap();
        match &d {
            ClaimDistribution::Hyperexponential { weights, rates } => {
                assert_eq!(rates.len(), 2);
                assert_relative_eq!(weights[0], 0.5);
            }
            _ => panic!("expected hyperexponential"),
        }
    }

    #[test]
    fn damped_cosine_is_valid_and_normalized() {
        let d = ClaimDistribution::damped_cosine(1.0, 2.0, 20.0).unwrap();
        assert_relative_eq!(d.survival(0.0), 1.0, epsilon = 1e-12);
        assert_relative_eq!(d.moment(1).unwrap(), 1.049_491_6, epsilon = 1e-6);
        // density matches the closed trigonometric form
        let u = 1.0486459f64;
        for x in [0.0f64, 0.1, 0.37, 1.0, 2.4] {
            let expect = u * (-x).exp() * 2.0 * ((20.0 * x + 2.0) / 2.0).cos().powi(2);
            assert_relative_eq!(d.density(x), expect, epsilon = 1e-6);
        }
    }

    #[test]
    fn matrix_exponential_rejects_unstable_generator() {
        let beta = DVector::from_vec(vec![1.0]);
        let b = DMatrix::from_element(1, 1, 0.5);
        assert!(ClaimDistribution::matrix_exponential(beta, b).is_err());
    }

    #[test]
    fn matrix_exponential_rejects_negative_density() {
        // beta e^{xB} 1 with an oscillation too strong to stay a density
        let beta = DVector::from_vec(vec![0.2, 0.4, 0.4]);
        let b = DMatrix::from_row_slice(
            3,
            3,
            &[-1.0, 0.0, 0.0, 0.0, -1.0, 8.0, 0.0, -8.0, -1.0],
        );
        assert!(ClaimDistribution::matrix_exponential(beta, b).is_err());
    }

    #[test]
    fn density_integrates_to_survival_complement() {
        for d in [hyperexp2(), hyperexp3(), ClaimDistribution::damped_cosine(1.0, 2.0, 20.0).unwrap()] {
            for upper in [1.0, 5.0, 20.0] {
                let mass = integrate(&|x| d.density(x), 0.0, upper, 1e-11);
                assert!(
                    (mass - (1.0 - d.survival(upper))).abs() <= 1e-8,
                    "mass mismatch at X = {upper}"
                );
            }
        }
    }

    #[test]
    fn mean_function_tail_identity() {
        // m(a) = m1 - int_a^inf survival - a survival(a)
        for d in [hyperexp2(), hyperexp3()] {
            let m1 = d.mean();
            for a in [0.5, 1.0, 3.0] {
                let tail = integrate(&|x| d.survival(x), a, 120.0, 1e-11);
                let expect = m1 - tail - a * d.survival(a);
                assert!((d.mean_function(a) - expect).abs() <= 1e-8);
                assert!(d.mean_function(a) + a * d.survival(a) <= m1 + 1e-12);
            }
        }
    }

    #[test]
    fn transform_fraction_agrees_with_direct_transform() {
        let d = ClaimDistribution::damped_cosine(1.0, 2.0, 20.0).unwrap();
        let (num, den) = d.transform_fraction();
        // f^(0) = 1
        assert_relative_eq!(num.eval(0.0) / den.eval(0.0), 1.0, epsilon = 1e-10);
        // matches quadrature at a couple of real points
        for s in [0.5f64, 2.0] {
            let oracle = integrate(&|x: f64| (-s * x).exp() * d.density(x), 0.0, 120.0, 1e-11);
            assert_relative_eq!(num.eval(s) / den.eval(s), oracle, epsilon = 1e-8);
        }
    }

    #[test]
    fn transform_real_axis_shape() {
        let d = hyperexp3();
        let mut prev = 1.0;
        for i in 1..40 {
            let s = i as f64 * 0.25;
            let v = d
                .laplace_transform(Complex64::new(s, 0.0))
                .unwrap()
                .re;
            assert!(v > 0.0 && v <= 1.0);
            assert!(v < prev, "transform must decrease along the real axis");
            prev = v;
        }
    }

    #[test]
    fn model_loading_and_rho() {
        let model = RiskModel::from_loading(1.0, 1.0, hyperexp2()).unwrap();
        assert_relative_eq!(model.premium_rate, 5.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(model.loading(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(model.rho(), 0.5, epsilon = 1e-12);
        // negative loading still constructs
        let m2 = RiskModel::new(0.1, 1.0, hyperexp2()).unwrap();
        assert!(m2.loading() < 0.0);
    }
}
