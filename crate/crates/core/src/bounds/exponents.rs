//! Runtime exponents `c` of `O*(2^{cn})` for the sampling algorithm and the
//! comparison algorithms.

use std::fmt;

use super::entropy::entropy;
use super::search::DeltaSearch;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Best known polynomial-time approximation ratio for MAX-SAT used by the
/// Escoffier–Paschos–Tourniaire exponent.
pub const DEFAULT_ALPHA: f64 = 0.796;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExponentMethod {
    /// Weighted MAX-CSP, minimized over δ.
    OursCsp,
    /// MAX-E-k-SAT with the `(2^k − 1)/2^k · m` lower bound, minimized over δ.
    OursEksat,
    /// MAX-k-SAT with `m/2` and δ = 2.
    OursKsatDelta2,
    Hirsch1,
    Hirsch2,
    Ept,
}

impl ExponentMethod {
    pub fn name(self) -> &'static str {
        match self {
            ExponentMethod::OursCsp => "ours_csp",
            ExponentMethod::OursEksat => "ours_eksat",
            ExponentMethod::OursKsatDelta2 => "ours_ksat_delta2",
            ExponentMethod::Hirsch1 => "hirsch1",
            ExponentMethod::Hirsch2 => "hirsch2",
            ExponentMethod::Ept => "ept",
        }
    }
}

impl fmt::Display for ExponentMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentReport<F> {
    pub method: ExponentMethod,
    pub k: Option<u32>,
    pub epsilon: F,
    pub alpha: Option<F>,
    /// Minimizing δ for the sampling exponents.
    pub delta_star: Option<F>,
    pub exponent: F,
}

impl<F: Scalar> ExponentReport<F> {
    /// `x` such that the running time is `(2 − x)^n`.
    pub fn base_gap(&self) -> F {
        F::lit(2.0) - self.exponent.exp2()
    }
}

fn check_epsilon<F: Scalar>(epsilon: F) -> Result<()> {
    if !(epsilon > F::zero() && epsilon <= F::one()) {
        return Err(Error::domain(format!("epsilon {epsilon} outside (0, 1]")));
    }
    Ok(())
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    Ok(())
}

/// MAX-CSP exponent `min_δ 1 − H(ε·w̄/((δ−1)ℓ))·(δ−1)/δ` over `δ ≥ 1 + εw/ℓ`,
/// with `w̄ = w` when no lower bound on the optimum is supplied.
pub fn exponent_ours_csp<F: Scalar>(
    total_weight: F,
    weighted_length: F,
    epsilon: F,
    w_bar: Option<F>,
) -> Result<ExponentReport<F>> {
    exponent_ours_csp_with(
        &DeltaSearch::default(),
        total_weight,
        weighted_length,
        epsilon,
        w_bar,
    )
}

pub fn exponent_ours_csp_with<F: Scalar>(
    search: &DeltaSearch,
    total_weight: F,
    weighted_length: F,
    epsilon: F,
    w_bar: Option<F>,
) -> Result<ExponentReport<F>> {
    check_epsilon(epsilon)?;
    if !(total_weight > F::zero() && weighted_length >= total_weight && weighted_length.is_finite())
    {
        return Err(Error::domain(format!(
            "need 0 < w <= l, got w={total_weight}, l={weighted_length}"
        )));
    }
    if let Some(wb) = w_bar {
        if !(wb > F::zero() && wb <= total_weight) {
            return Err(Error::domain(format!("w_bar {wb} outside (0, w]")));
        }
    }
    let (delta, exponent) = minimize_csp(
        search,
        epsilon * total_weight / weighted_length,
        epsilon * w_bar.unwrap_or(total_weight) / weighted_length,
    );
    Ok(ExponentReport {
        method: ExponentMethod::OursCsp,
        k: None,
        epsilon,
        alpha: None,
        delta_star: Some(delta),
        exponent,
    })
}

/// Minimizes `1 − H(slack/(δ−1))·(δ−1)/δ` over `δ ≥ 1 + offset`.
fn minimize_csp<F: Scalar>(search: &DeltaSearch, offset: F, slack: F) -> (F, F) {
    let g = |delta: F| {
        let spread = delta - F::one();
        let p = (slack / spread).min(F::one());
        F::one() - entropy(p) * spread / delta
    };
    let (delta, value) = search.minimize(offset, g);
    (delta, value.max(F::zero()).min(F::one()))
}

/// MAX-E-k-SAT exponent, minimized over `δ ≥ 1 + ε/k`.
pub fn exponent_ours_eksat<F: Scalar>(k: u32, epsilon: F) -> Result<ExponentReport<F>> {
    exponent_ours_eksat_with(&DeltaSearch::default(), k, epsilon)
}

pub fn exponent_ours_eksat_with<F: Scalar>(
    search: &DeltaSearch,
    k: u32,
    epsilon: F,
) -> Result<ExponentReport<F>> {
    check_k(k)?;
    check_epsilon(epsilon)?;
    let kf = F::from_u32(k).expect("k representable");
    let sat_fraction = F::one() - F::lit(2.0).powi(-(k as i32));
    let offset = epsilon / kf;
    let (delta, exponent) = minimize_csp(search, offset, offset * sat_fraction);
    Ok(ExponentReport {
        method: ExponentMethod::OursEksat,
        k: Some(k),
        epsilon,
        alpha: None,
        delta_star: Some(delta),
        exponent,
    })
}

/// MAX-k-SAT exponent at δ = 2 with the `m/2` bound: `1 − H(ε/(2k))/2`.
pub fn exponent_ours_ksat_delta2<F: Scalar>(k: u32, epsilon: F) -> Result<ExponentReport<F>> {
    check_k(k)?;
    check_epsilon(epsilon)?;
    let kf = F::from_u32(k).expect("k representable");
    let exponent = F::one() - entropy(epsilon / (F::lit(2.0) * kf)) / F::lit(2.0);
    Ok(ExponentReport {
        method: ExponentMethod::OursKsatDelta2,
        k: Some(k),
        epsilon,
        alpha: None,
        delta_star: Some(F::lit(2.0)),
        exponent,
    })
}

/// Hirsch's random-walk algorithm: `1 + log₂(1 − ε/(ε + k + εk))`.
pub fn exponent_hirsch1<F: Scalar>(k: u32, epsilon: F) -> Result<ExponentReport<F>> {
    check_k(k)?;
    check_epsilon(epsilon)?;
    let kf = F::from_u32(k).expect("k representable");
    let exponent = F::one() + (F::one() - epsilon / (epsilon + kf + epsilon * kf)).log2();
    Ok(closed_form(
        ExponentMethod::Hirsch1,
        Some(k),
        epsilon,
        None,
        exponent,
    ))
}

/// Hirsch's combination with Schöning's algorithm: `1 + log₂(1 − ε/(k(1+ε)))`.
pub fn exponent_hirsch2<F: Scalar>(k: u32, epsilon: F) -> Result<ExponentReport<F>> {
    check_k(k)?;
    check_epsilon(epsilon)?;
    let kf = F::from_u32(k).expect("k representable");
    let exponent = F::one() + (F::one() - epsilon / (kf * (F::one() + epsilon))).log2();
    Ok(closed_form(
        ExponentMethod::Hirsch2,
        Some(k),
        epsilon,
        None,
        exponent,
    ))
}

/// Escoffier–Paschos–Tourniaire: `1 − ε/(1 − α)`, defined for `ε < 1 − α`.
pub fn exponent_ept<F: Scalar>(epsilon: F, alpha: F) -> Result<ExponentReport<F>> {
    check_epsilon(epsilon)?;
    if !(alpha > F::zero() && alpha < F::one()) {
        return Err(Error::domain(format!("alpha {alpha} outside (0, 1)")));
    }
    if epsilon >= F::one() - alpha {
        return Err(Error::domain(format!(
            "epsilon {epsilon} >= 1 - alpha = {}; exponent would be <= 0",
            F::one() - alpha
        )));
    }
    let exponent = F::one() - epsilon / (F::one() - alpha);
    Ok(closed_form(
        ExponentMethod::Ept,
        None,
        epsilon,
        Some(alpha),
        exponent,
    ))
}

fn closed_form<F>(
    method: ExponentMethod,
    k: Option<u32>,
    epsilon: F,
    alpha: Option<F>,
    exponent: F,
) -> ExponentReport<F> {
    ExponentReport {
        method,
        k,
        epsilon,
        alpha,
        delta_star: None,
        exponent,
    }
}
