//! Seeded random instance generators.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Constraint, CspInstance, TruthTable};
use crate::scalar::Scalar;

/// Uniform random E-k-CNF: each clause takes `k` distinct variables sampled
/// without replacement, each negated with probability 1/2. Unit weights.
pub fn random_ekcnf<W: Scalar>(n: usize, m: usize, k: usize, seed: u64) -> Result<CspInstance<W>> {
    if k == 0 || k > n {
        return Err(Error::domain(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    if m == 0 {
        return Err(Error::domain("need at least one clause"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses: Vec<(Vec<i64>, W)> = (0..m)
        .map(|_| (random_clause(&mut rng, n, k), W::one()))
        .collect();
    CspInstance::from_clauses(n, &clauses)
}

/// Random CNF with clause lengths uniform in `1..=max_len`; weights uniform in
/// `[0.1, 5)` when `weighted`, else 1.
pub fn random_weighted_cnf<W: Scalar>(
    n: usize,
    m: usize,
    max_len: usize,
    weighted: bool,
    seed: u64,
) -> CspInstance<W> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses: Vec<(Vec<i64>, W)> = (0..m.max(1))
        .map(|_| {
            let len = rng.random_range(1..=max_len.clamp(1, n));
            let weight = if weighted {
                W::lit(rng.random_range(0.1..5.0))
            } else {
                W::one()
            };
            (random_clause(&mut rng, n, len), weight)
        })
        .collect();
    CspInstance::from_clauses(n, &clauses).expect("generated clauses are valid")
}

/// Random general constraints with arity uniform in `1..=max_arity` and
/// uniformly random truth tables.
pub fn random_csp<W: Scalar>(n: usize, m: usize, max_arity: usize, seed: u64) -> CspInstance<W> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let constraints = (0..m.max(1))
        .map(|_| {
            let arity = rng.random_range(1..=max_arity.clamp(1, n));
            let vars: Vec<usize> = sample(&mut rng, n, arity)
                .into_iter()
                .map(|v| v + 1)
                .collect();
            let bits: Vec<bool> = (0..1usize << arity).map(|_| rng.random()).collect();
            let weight = W::lit(rng.random_range(0.1..5.0));
            Constraint::new(weight, &vars, TruthTable::from_bools(&bits)).expect("valid constraint")
        })
        .collect();
    CspInstance::new(n, constraints).expect("generated constraints are valid")
}

fn random_clause(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<i64> {
    sample(rng, n, k)
        .into_iter()
        .map(|v| {
            let lit = v as i64 + 1;
            if rng.random_bool(0.5) {
                -lit
            } else {
                lit
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ekcnf_shape_and_determinism() {
        let a: CspInstance<f64> = random_ekcnf(5, 3, 3, 1).unwrap();
        let b: CspInstance<f64> = random_ekcnf(5, 3, 3, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.num_constraints(), 3);
        assert!(a.constraints().iter().all(|c| c.arity() == 3));
        assert_eq!(a.clause_length_histogram().unwrap().len(), 1);
        assert!(random_ekcnf::<f64>(2, 1, 3, 0).is_err());
    }

    #[test]
    fn other_generators_are_valid() {
        let c: CspInstance<f64> = random_csp(6, 10, 4, 3);
        assert!(!c.is_clausal());
        assert!(c.max_arity() <= 4);
        let w: CspInstance<f64> = random_weighted_cnf(6, 10, 3, true, 3);
        assert!(w.is_clausal());
        assert!(w
            .constraints()
            .iter()
            .all(|c| c.weight() >= 0.1 && c.weight() < 5.0));
    }
}
