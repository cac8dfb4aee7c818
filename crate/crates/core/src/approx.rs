//! Exponential surrogate models fit from the first claim moments, and the
//! closed-form ruin probabilities they induce.
//!
//! All three surrogates replace the claim law by an exponential one and are
//! two-point Pade approximations of the scale-function transform:
//!
//! * naive — rate `1/m1`, `lambda` and `c` unchanged; pins `W_q(0)` and
//!   `W_q'(0)`;
//! * Renyi — rate `1/hm2` with `hm2 = m2/(2 m1)`, intensity rescaled to
//!   `lambda m1/hm2`; pins `W_q(0)` and conserves `rho` and the loading;
//! * de Vylder — rate `1/hm3` with `hm3 = m3/(3 m2)`, intensity
//!   `lambda 9 m2^3 / (2 m3^2)` and premium `c - lambda m1 + lambda~ hm3`;
//!   matches the first three cumulants of the surplus process.
//!
//! Approximate scale functions come from feeding the surrogate model into
//! [`crate::scale::ScaleBasis::build`]; there is no separate evaluation path.

use crate::claims::{ClaimDistribution, RiskModel};
use crate::error::{Error, Result};

/// The three exponential surrogate families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxKind {
    Naive,
    Renyi,
    DeVylder,
}

impl ApproxKind {
    pub const ALL: [ApproxKind; 3] = [ApproxKind::Naive, ApproxKind::Renyi, ApproxKind::DeVylder];

    pub fn label(self) -> &'static str {
        match self {
            ApproxKind::Naive => "naive",
            ApproxKind::Renyi => "renyi",
            ApproxKind::DeVylder => "devylder",
        }
    }
}

/// Replace the claims of `model` by an exponential law per `kind`, adjusting
/// `lambda` and `c` as the kind prescribes. Exact (parameter-identical) when
/// the claims are already exponential.
pub fn fit_exponential_model(model: &RiskModel, kind: ApproxKind) -> Result<RiskModel> {
    if model.sigma_tilde != 0.0 {
        return Err(Error::InvalidApproximation(format!(
            "surrogates are defined for sigma_tilde = 0, got {}",
            model.sigma_tilde
        )));
    }
    let m1 = model.claims.moment(1)?;
    let (rate, lambda, premium) = match kind {
        ApproxKind::Naive => (1.0 / m1, model.claim_intensity, model.premium_rate),
        ApproxKind::Renyi => {
            let hm2 = model.claims.normalized_moment(2)?;
            (
                1.0 / hm2,
                model.claim_intensity * m1 / hm2,
                model.premium_rate,
            )
        }
        ApproxKind::DeVylder => {
            let m2 = model.claims.moment(2)?;
            let m3 = model.claims.moment(3)?;
            let hm3 = model.claims.normalized_moment(3)?;
            let lambda = model.claim_intensity * 9.0 * m2.powi(3) / (2.0 * m3 * m3);
            let premium = model.premium_rate - model.claim_intensity * m1 + lambda * hm3;
            (1.0 / hm3, lambda, premium)
        }
    };
    if !(rate > 0.0) || !(lambda > 0.0) || !(premium > 0.0) {
        return Err(Error::InvalidApproximation(format!(
            "{} surrogate produced a nonpositive parameter (rate={rate}, lambda={lambda}, c={premium})",
            kind.label()
        )));
    }
    RiskModel::new(premium, lambda, ClaimDistribution::exponential(rate)?)
}

/// How to evaluate a ruin probability: the exact exponential formula (claims
/// must be exponential) or one of the surrogate fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuinMethod {
    ExactExponential,
    Approx(ApproxKind),
}

/// `Psi(x) = exp(-x theta r / (1 + theta)) / (1 + theta)` evaluated on the
/// (transformed) model with claim rate `r` and loading `theta`.
pub fn ruin_probability(model: &RiskModel, x: f64, method: RuinMethod) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("ruin probability needs x >= 0, got {x}")));
    }
    let eval = match method {
        RuinMethod::ExactExponential => match model.claims {
            ClaimDistribution::Exponential { .. } => model.clone(),
            _ => {
                return Err(Error::InvalidApproximation(
                    "exact ruin formula requires exponential claims".into(),
                ))
            }
        },
        RuinMethod::Approx(kind) => fit_exponential_model(model, kind)?,
    };
    let theta = eval.loading();
    if theta <= 0.0 {
        return Err(Error::NoRuinFormula { theta });
    }
    let rate = match eval.claims {
        ClaimDistribution::Exponential { rate } => rate,
        _ => unreachable!("surrogates always carry exponential claims"),
    };
    Ok((1.0 / (1.0 + theta)) * (-x * theta * rate / (1.0 + theta)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::integrate;
    use approx::assert_relative_eq;

    fn hyperexp2_model() -> RiskModel {
        let claims =
            ClaimDistribution::hyperexponential_from_density(&[2.0 / 3.0, 2.0 / 3.0], &[1.0, 2.0])
                .unwrap();
        RiskModel::from_loading(1.0, 1.0, claims).unwrap()
    }

    fn rate_of(model: &RiskModel) -> f64 {
        match model.claims {
            ClaimDistribution::Exponential { rate } => rate,
            _ => panic!("expected exponential claims"),
        }
    }

    #[test]
    fn exponential_input_is_fixed_point() {
        let model =
            RiskModel::new(0.75, 0.5, ClaimDistribution::exponential(2.0).unwrap()).unwrap();
        for kind in ApproxKind::ALL {
            let fitted = fit_exponential_model(&model, kind).unwrap();
            assert!((rate_of(&fitted) - 2.0).abs() <= 1e-14);
            assert!((fitted.claim_intensity - 0.5).abs() <= 1e-14);
            assert!((fitted.premium_rate - 0.75).abs() <= 1e-14);
        }
    }

    #[test]
    fn renyi_parameters_from_normalized_moments() {
        let fitted = fit_exponential_model(&hyperexp2_model(), ApproxKind::Renyi).unwrap();
        assert_relative_eq!(rate_of(&fitted), 10.0 / 9.0, epsilon = 1e-14);
        assert_relative_eq!(fitted.claim_intensity, 25.0 / 27.0, epsilon = 1e-14);
        assert_relative_eq!(fitted.premium_rate, 5.0 / 3.0, epsilon = 1e-14);
        // rho and theta conserved
        let original = hyperexp2_model();
        assert_relative_eq!(fitted.rho(), original.rho(), epsilon = 1e-14);
        assert_relative_eq!(fitted.loading(), original.loading(), epsilon = 1e-14);
    }

    #[test]
    fn devylder_parameters_from_moment_arithmetic() {
        // m2 = 3/2, m3 = 17/4 for the order-2 mixture
        let fitted = fit_exponential_model(&hyperexp2_model(), ApproxKind::DeVylder).unwrap();
        assert_relative_eq!(rate_of(&fitted), 18.0 / 17.0, epsilon = 1e-14);
        let lambda_expect = 9.0 * 1.5f64.powi(3) / (2.0 * 4.25 * 4.25);
        assert_relative_eq!(fitted.claim_intensity, lambda_expect, epsilon = 1e-14);
        assert_relative_eq!(fitted.claim_intensity, 0.840_830_4, epsilon = 1e-7);
        let c_expect = 5.0 / 3.0 - 5.0 / 6.0 + lambda_expect * 17.0 / 18.0;
        assert_relative_eq!(fitted.premium_rate, c_expect, epsilon = 1e-14);
    }

    #[test]
    fn devylder_preserves_first_three_cumulants() {
        let original = hyperexp2_model();
        let fitted = fit_exponential_model(&original, ApproxKind::DeVylder).unwrap();
        let mu = rate_of(&fitted);
        let (l0, l1) = (original.claim_intensity, fitted.claim_intensity);
        let drift0 = original.premium_rate - l0 * original.claims.moment(1).unwrap();
        let drift1 = fitted.premium_rate - l1 / mu;
        assert_relative_eq!(drift0, drift1, epsilon = 1e-12);
        assert_relative_eq!(
            l1 * 2.0 / (mu * mu),
            l0 * original.claims.moment(2).unwrap(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            l1 * 6.0 / (mu * mu * mu),
            l0 * original.claims.moment(3).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn surrogate_scale_functions_pin_initial_values() {
        let original = hyperexp2_model();
        let q = 0.1;
        let exact = crate::scale::initial_values(&original, q).unwrap();
        for kind in ApproxKind::ALL {
            let fitted = fit_exponential_model(&original, kind).unwrap();
            let basis = crate::scale::ScaleBasis::build(&fitted, q).unwrap();
            match kind {
                ApproxKind::Naive => {
                    assert_relative_eq!(basis.w(0.0), exact.0, epsilon = 1e-12);
                    assert_relative_eq!(basis.w_deriv(0.0, 1), exact.1, epsilon = 1e-10);
                }
                ApproxKind::Renyi => {
                    assert_relative_eq!(basis.w(0.0), exact.0, epsilon = 1e-12);
                }
                ApproxKind::DeVylder => {
                    assert!((basis.w(0.0) - exact.0).abs() > 1e-3);
                }
            }
        }
    }

    #[test]
    fn ruin_probability_exponential_is_exact() {
        // mu = 2, theta = 1 => Psi(x) = e^{-x}/2; verify against the
        // Pollaczek-Khinchine integral of the exact survival at x = 0
        let model = RiskModel::from_loading(
            1.0,
            1.0,
            ClaimDistribution::exponential(2.0).unwrap(),
        )
        .unwrap();
        for x in [0.0, 0.5, 1.0, 4.0] {
            let psi = ruin_probability(&model, x, RuinMethod::ExactExponential).unwrap();
            assert_relative_eq!(psi, 0.5 * (-x).exp(), epsilon = 1e-14);
            for kind in ApproxKind::ALL {
                assert_relative_eq!(
                    ruin_probability(&model, x, RuinMethod::Approx(kind)).unwrap(),
                    psi,
                    epsilon = 1e-14
                );
            }
        }
    }

    #[test]
    fn ruin_probability_boundary_and_decay() {
        let model = hyperexp2_model();
        let at_zero = ruin_probability(&model, 0.0, RuinMethod::Approx(ApproxKind::Naive)).unwrap();
        assert_relative_eq!(at_zero, 1.0 / (1.0 + model.loading()), epsilon = 1e-14);
        let far = ruin_probability(&model, 1e4, RuinMethod::Approx(ApproxKind::Naive)).unwrap();
        assert!(far < 1e-300 || far == 0.0);
        let mid = ruin_probability(&model, 3.0, RuinMethod::Approx(ApproxKind::Renyi)).unwrap();
        assert!(mid > 0.0 && mid < at_zero);
    }

    #[test]
    fn ruin_requires_positive_loading() {
        let model = RiskModel::new(
            0.4,
            1.0,
            ClaimDistribution::exponential(2.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            ruin_probability(&model, 1.0, RuinMethod::ExactExponential),
            Err(Error::NoRuinFormula { .. })
        ));
    }

    #[test]
    fn renyi_rate_is_excess_mean_reciprocal() {
        // the Renyi rate targets the mean of the excess density
        // f_e = survival / m1, computed here by quadrature
        let model = hyperexp2_model();
        let m1 = model.claims.moment(1).unwrap();
        let excess_mean =
            integrate(&|x: f64| x * model.claims.survival(x) / m1, 0.0, 120.0, 1e-11);
        let fitted = fit_exponential_model(&model, ApproxKind::Renyi).unwrap();
        assert_relative_eq!(1.0 / rate_of(&fitted), excess_mean, epsilon = 1e-8);
    }
}
