//! Constructive lower bound on the number of near-optimal assignments.
//!
//! For a threshold `t = δℓ/n`, let `S` be the variables whose contribution is
//! at most `t`. Flipping any `r = ⌊ε·w/t⌋` of them away from an optimum loses
//! at most `t·r ≤ ε·w` weight, so at least `Σ_{i≤r} C(|S|, i)` assignments
//! reach `w* − ε·w`. The bound is evaluated at every threshold where `|S|`
//! changes inside the feasible region `δ ≥ 1 + ε·w/ℓ`.

use super::entropy::{binomial_sum_exact, log2_binomial_sum};
use super::exponents::exponent_ours_csp_with;
use super::search::DeltaSearch;
use crate::error::{Error, Result};
use crate::instance::CspInstance;
use crate::scalar::Scalar;

/// Which δ values [`counting_bound`] evaluates.
#[derive(Debug, Clone, PartialEq)]
pub enum DeltaGrid<F> {
    /// Lower feasible endpoint, every contribution breakpoint above it, and
    /// the continuous optimum of the runtime exponent.
    Breakpoints,
    /// Caller-chosen δ values; infeasible ones are dropped.
    Explicit(Vec<F>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaRecord<F> {
    pub delta: F,
    /// Contribution cutoff `δℓ/n` defining `S_δ`.
    pub threshold: F,
    pub s_size: usize,
    pub r: usize,
    /// `log₂ Σ_{i=0}^{r} C(|S_δ|, i)`.
    pub log2_count: F,
    /// The same sum as an integer when `|S_δ| ≤ 64`.
    pub exact_count: Option<u128>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountingBound<F> {
    pub epsilon: F,
    /// `ε·w̄/w` when a lower bound `w̄` was supplied, else `ε`.
    pub effective_epsilon: F,
    /// Sorted by increasing δ.
    pub per_delta: Vec<DeltaRecord<F>>,
    pub best: usize,
}

impl<F: Scalar> CountingBound<F> {
    pub fn best_record(&self) -> &DeltaRecord<F> {
        &self.per_delta[self.best]
    }

    /// Guaranteed `log₂ D(f, ε_eff)` lower bound.
    pub fn log2_count(&self) -> F {
        self.best_record().log2_count
    }
}

pub fn counting_bound<F: Scalar>(
    inst: &CspInstance<F>,
    epsilon: F,
    w_bar: Option<F>,
    grid: &DeltaGrid<F>,
) -> Result<CountingBound<F>> {
    counting_bound_with(&DeltaSearch::default(), inst, epsilon, w_bar, grid)
}

pub fn counting_bound_with<F: Scalar>(
    search: &DeltaSearch,
    inst: &CspInstance<F>,
    epsilon: F,
    w_bar: Option<F>,
    grid: &DeltaGrid<F>,
) -> Result<CountingBound<F>> {
    if !(epsilon > F::zero() && epsilon <= F::one()) {
        return Err(Error::domain(format!("epsilon {epsilon} outside (0, 1]")));
    }
    let w = inst.total_weight();
    let l = inst.weighted_length();
    let n = F::of_usize(inst.num_vars());
    let effective_epsilon = match w_bar {
        Some(wb) if !(wb > F::zero() && wb <= w) => {
            return Err(Error::domain(format!("w_bar {wb} outside (0, w = {w}]")));
        }
        Some(wb) => epsilon * wb / w,
        None => epsilon,
    };
    let slack = effective_epsilon * w;
    let delta_min = F::one() + slack / l;

    // Thresholds t = δℓ/n; breakpoints use the contributions themselves.
    let mut thresholds: Vec<F> = match grid {
        DeltaGrid::Breakpoints => {
            let mut ts = vec![(l + slack) / n];
            ts.extend(
                inst.contributions()
                    .iter()
                    .copied()
                    .filter(|&c| n * c / l > delta_min),
            );
            let star = exponent_ours_csp_with(search, w, l, effective_epsilon, None)?
                .delta_star
                .expect("optimized exponent carries delta");
            ts.push(star * l / n);
            ts
        }
        DeltaGrid::Explicit(deltas) => deltas
            .iter()
            .copied()
            .filter(|&d| d >= delta_min && d.is_finite())
            .map(|d| d * l / n)
            .collect(),
    };
    thresholds.sort_by(|a, b| a.partial_cmp(b).expect("finite thresholds"));
    thresholds.dedup();
    if thresholds.is_empty() {
        return Err(Error::domain(format!(
            "no grid point satisfies delta >= {delta_min}"
        )));
    }

    let per_delta: Vec<DeltaRecord<F>> = thresholds
        .into_iter()
        .map(|t| {
            let s_size = inst.contributions().iter().filter(|&&c| c <= t).count();
            let r = (slack / t).floor().to_usize().unwrap_or(usize::MAX);
            DeltaRecord {
                delta: n * t / l,
                threshold: t,
                s_size,
                r,
                log2_count: log2_binomial_sum(s_size, r),
                exact_count: binomial_sum_exact(s_size, r),
            }
        })
        .collect();

    let best = per_delta.iter().enumerate().fold(0, |best, (i, rec)| {
        if rec.log2_count > per_delta[best].log2_count {
            i
        } else {
            best
        }
    });

    Ok(CountingBound {
        epsilon,
        effective_epsilon,
        per_delta,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::entropy::entropy;
    use proptest::prelude::*;

    fn two_clauses() -> CspInstance<f64> {
        CspInstance::from_clauses(4, &[(vec![1, 2, 3], 1.0), (vec![1, 2, 4], 1.0)]).unwrap()
    }

    #[test]
    fn radius_zero_at_delta_two() {
        let cb =
            counting_bound(&two_clauses(), 0.5, None, &DeltaGrid::Explicit(vec![2.0])).unwrap();
        let rec = cb.best_record();
        // r = floor(4 * 0.5 * 2 / (2 * 6)) = 0
        assert_eq!(rec.r, 0);
        assert_eq!(rec.exact_count, Some(1));
        assert_eq!(rec.log2_count, 0.0);
    }

    #[test]
    fn s_delta_at_one_and_a_half() {
        let cb =
            counting_bound(&two_clauses(), 1.0, None, &DeltaGrid::Explicit(vec![1.5])).unwrap();
        let rec = cb.best_record();
        assert_eq!(rec.threshold, 2.25);
        assert_eq!(rec.s_size, 4);
    }

    #[test]
    fn never_exceeds_all_assignments() {
        let inst = CspInstance::from_clauses(1, &[(vec![1], 1.0), (vec![-1], 1.0)]).unwrap();
        for eps in [0.01, 0.5, 1.0] {
            let cb = counting_bound(&inst, eps, None, &DeltaGrid::Breakpoints).unwrap();
            assert!(cb.per_delta.iter().all(|r| r.log2_count <= 1.0));
        }
    }

    #[test]
    fn domain_errors() {
        let inst = two_clauses();
        assert!(counting_bound(&inst, 0.0, None, &DeltaGrid::Breakpoints).is_err());
        assert!(counting_bound(&inst, 1.1, None, &DeltaGrid::Breakpoints).is_err());
        assert!(counting_bound(&inst, 0.5, Some(3.0), &DeltaGrid::Breakpoints).is_err());
        // delta_min = 1 + 0.5 * 2 / 6
        assert!(counting_bound(&inst, 0.5, None, &DeltaGrid::Explicit(vec![1.1])).is_err());
    }

    #[test]
    fn w_bar_substitution_is_identity() {
        let inst = two_clauses();
        let (eps, wb) = (0.7, 1.3);
        let with = counting_bound(&inst, eps, Some(wb), &DeltaGrid::Breakpoints).unwrap();
        let without = counting_bound(&inst, eps * wb / 2.0, None, &DeltaGrid::Breakpoints).unwrap();
        assert_eq!(with.effective_epsilon, without.effective_epsilon);
        assert_eq!(with.per_delta, without.per_delta);
        assert_eq!(with.best, without.best);
    }

    fn arb_instance() -> impl Strategy<Value = CspInstance<f64>> {
        (2usize..20, 1usize..40, any::<u64>(), any::<bool>()).prop_map(|(n, m, seed, weighted)| {
            crate::generate::random_weighted_cnf(n, m, n.min(3), weighted, seed)
        })
    }

    proptest! {
        #[test]
        fn proof_chain_invariants(inst in arb_instance(), eps in 0.001f64..=1.0) {
            let cb = counting_bound(&inst, eps, None, &DeltaGrid::Breakpoints).unwrap();
            let n = inst.num_vars() as f64;
            let q = eps * inst.total_weight() / inst.weighted_length();
            for rec in &cb.per_delta {
                prop_assert!(rec.delta >= 1.0 + q - 1e-12);
                prop_assert!(rec.r <= rec.s_size);
                let floor = ((rec.delta - 1.0) * n / rec.delta - 1e-9).ceil().max(0.0) as usize;
                prop_assert!(rec.s_size >= floor);
                prop_assert!(rec.log2_count >= 0.0 && rec.log2_count <= n + 1e-9);
                let s = rec.s_size as f64;
                if rec.s_size > 0 && 2 * rec.r <= rec.s_size {
                    let ent = entropy(rec.r as f64 / s) * s - (s + 1.0).log2();
                    prop_assert!(rec.log2_count >= ent - 1e-9);
                }
            }
            let best = cb.best_record().log2_count;
            prop_assert!(cb.per_delta.iter().all(|r| r.log2_count <= best));
        }
    }
}
