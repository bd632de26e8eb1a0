use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest set size for which binomial sums are computed in exact integers.
pub const EXACT_BINOMIAL_LIMIT: usize = 64;

/// Binary entropy in bits, with `0·log 0 = 0`.
pub fn binary_entropy<F: Scalar>(p: F) -> Result<F> {
    if !(p >= F::zero() && p <= F::one()) {
        return Err(Error::domain(format!(
            "entropy argument {p} outside [0, 1]"
        )));
    }
    Ok(entropy(p))
}

#[inline]
pub(crate) fn entropy<F: Scalar>(p: F) -> F {
    let term = |x: F| {
        if x > F::zero() {
            -x * x.log2()
        } else {
            F::zero()
        }
    };
    term(p) + term(F::one() - p)
}

/// `H(r/x)·x − H(r/y)·y`, nonnegative whenever `x ≥ y > 0` and `0 ≤ r ≤ y`.
pub fn lemma_gap<F: Scalar>(x: F, y: F, r: F) -> Result<F> {
    if !(y > F::zero() && x >= y && r >= F::zero() && r <= y) {
        return Err(Error::domain(format!(
            "need x >= y > 0 and 0 <= r <= y, got x={x}, y={y}, r={r}"
        )));
    }
    Ok(entropy(r / x) * x - entropy(r / y) * y)
}

/// `Σ_{i=0}^{r} C(s, i)` exactly, for `s ≤ 64`.
pub fn binomial_sum_exact(s: usize, r: usize) -> Option<u128> {
    if s > EXACT_BINOMIAL_LIMIT {
        return None;
    }
    let r = r.min(s);
    let mut term: u128 = 1;
    let mut sum: u128 = 1;
    for i in 1..=r {
        term = term * (s - i + 1) as u128 / i as u128;
        sum += term;
    }
    Some(sum)
}

/// `log₂ Σ_{i=0}^{r} C(s, i)`. Exact integers up to [`EXACT_BINOMIAL_LIMIT`],
/// log-domain accumulation above it.
pub fn log2_binomial_sum<F: Scalar>(s: usize, r: usize) -> F {
    if let Some(exact) = binomial_sum_exact(s, r) {
        return F::from_u128(exact).expect("u128 fits a float").log2();
    }
    let r = r.min(s);
    // log2 C(s, i) by running ratios, Kahan-compensated.
    let mut terms = Vec::with_capacity(r + 1);
    let (mut acc, mut comp) = (F::zero(), F::zero());
    terms.push(F::zero());
    for i in 1..=r {
        let step = F::of_usize(s - i + 1).log2() - F::of_usize(i).log2();
        let y = step - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        terms.push(acc);
    }
    let peak = terms.iter().copied().fold(F::neg_infinity(), F::max);
    let (mut sum, mut comp) = (F::zero(), F::zero());
    for &t in &terms {
        let y = (t - peak).exp2() - comp;
        let next = sum + y;
        comp = (next - sum) - y;
        sum = next;
    }
    peak + sum.log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.0f64).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0f64).unwrap(), 0.0);
        assert_eq!(binary_entropy(0.5f64).unwrap(), 1.0);
        // 2 - (3/4) log2 3
        let expected = 2.0 - 0.75 * 3f64.log2();
        assert_abs_diff_eq!(binary_entropy(0.25f64).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 0.811_278_124_459_132_8, epsilon = 1e-12);
        assert!(binary_entropy(-0.1f64).is_err());
        assert!(binary_entropy(1.1f64).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
        assert_abs_diff_eq!(
            binary_entropy(0.25f32).unwrap(),
            0.811_278_1,
            epsilon = 1e-6
        );
    }

    #[test]
    fn lemma_gap_examples() {
        assert_eq!(lemma_gap(3.0f64, 3.0, 1.7).unwrap(), 0.0);
        assert_eq!(lemma_gap(5.0f64, 2.0, 0.0).unwrap(), 0.0);
        assert_eq!(lemma_gap(2.0f64, 2.0, 2.0).unwrap(), 0.0);
        let g = lemma_gap(4.0f64, 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(g, 4.0 * (2.0 - 0.75 * 3f64.log2()) - 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g, 1.245_112_497_836_531, epsilon = 1e-12);
        assert!(lemma_gap(1.0f64, 2.0, 1.0).is_err());
        assert!(lemma_gap(3.0f64, 2.0, 2.5).is_err());
        assert!(lemma_gap(3.0f64, 0.0, 0.0).is_err());
    }

    fn pascal_sum(s: usize, r: usize) -> u128 {
        let mut row = vec![1u128];
        for _ in 0..s {
            let mut next = vec![1u128; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        row.iter().take(r + 1).sum()
    }

    #[test]
    fn exact_sum_matches_pascal() {
        for s in 0..=64 {
            for r in [0, 1, 2, s / 3, s / 2, s, s + 3] {
                assert_eq!(
                    binomial_sum_exact(s, r).unwrap(),
                    pascal_sum(s, r),
                    "s={s} r={r}"
                );
            }
        }
        assert_eq!(binomial_sum_exact(64, 64).unwrap(), 1u128 << 64);
        assert!(binomial_sum_exact(65, 1).is_none());
    }

    #[test]
    fn log_domain_matches_pascal_above_limit() {
        for s in [65usize, 80, 100, 127] {
            for r in [0, 1, 5, s / 4, s / 2, s] {
                let exact = (pascal_sum(s, r) as f64).log2();
                let got: f64 = log2_binomial_sum(s, r);
                assert_abs_diff_eq!(got, exact, epsilon = 1e-10);
            }
        }
        assert_abs_diff_eq!(log2_binomial_sum::<f64>(1000, 1000), 1000.0, epsilon = 1e-9);
    }

    proptest! {
        #[test]
        fn lemma_gap_nonnegative(y in 1e-6f64..100.0, dx in 0.0f64..100.0, frac in 0.0f64..=1.0) {
            let gap = lemma_gap(y + dx, y, y * frac).unwrap();
            prop_assert!(gap >= -1e-12);
        }
    }
}
