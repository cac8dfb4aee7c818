//! Scale functions, dividend/capital-injection policies and exponential
//! approximations for compound-Poisson surplus processes with rational-transform
//! claims.
//!
//! The crate is organized around five layers:
//!
//! * [`claims`] — claim-size laws (exponential, hyperexponential,
//!   matrix-exponential) and the surplus [`claims::RiskModel`];
//! * [`lambertw`] — real branches of the Lambert W function;
//! * [`scale`] — the q-scale functions `W_q`, `Z_q` and the expected scale
//!   after a jump `C`, via partial fractions of `1/(kappa(s) - q)`;
//! * [`approx`] — exponential surrogate models (naive / Renyi / de Vylder)
//!   and closed-form ruin probabilities;
//! * [`policy`] — valuation and optimization of bounded-buffer
//!   dividend/injection policies with a bankruptcy penalty.
//!
//! The [`cli`] module carries the command-line front end used by the
//! `riskscale` binary.

pub mod approx;
pub mod claims;
pub mod error;
pub mod lambertw;
pub mod numeric;
pub mod poly;
pub mod policy;
pub mod scale;

pub use approx::{fit_exponential_model, ruin_probability, ApproxKind, RuinMethod};
pub use claims::{ClaimDistribution, RiskModel};
pub use error::{Error, Result};
pub use lambertw::{lambert_w0, lambert_wm1, LambertBranch};
pub use policy::{
    optimize_exponential, optimize_matrix, PolicyIngredients, PolicyMethod, PolicyParams,
    PolicySolution, Regime,
};
pub use scale::{cl_roots, initial_values, laplace_exponent, ScaleBasis};
