//! Repeated uniform sampling with an iteration budget backed by the
//! constructive counting bound.
//!
//! Sample `i` is read from a ChaCha8 keystream seeded by `seed`, starting at
//! word offset `i · ⌈n/64⌉ · 2`, so its bits depend only on `(seed, i)`.
//! Workers seek to the start of their own index range and read sequentially;
//! the result is identical for every degree of parallelism.

use std::thread;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{counting_bound, DeltaGrid};
use crate::error::{Error, Result};
use crate::instance::{Assignment, CspInstance};
use crate::scalar::Scalar;

pub const DEFAULT_FAIL_PROB: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig<F> {
    pub epsilon: F,
    /// Known lower bound on the optimum; switches the target to `(1 − ε)·w*`.
    pub w_bar: Option<F>,
    pub fail_prob: F,
    pub seed: u64,
    pub max_iterations: Option<u64>,
    pub parallelism: usize,
}

impl<F: Scalar> SamplerConfig<F> {
    pub fn new(epsilon: F) -> Self {
        SamplerConfig {
            epsilon,
            w_bar: None,
            fail_prob: F::lit(DEFAULT_FAIL_PROB),
            seed: 0,
            max_iterations: None,
            parallelism: 1,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_fail_prob(mut self, fail_prob: F) -> Self {
        self.fail_prob = fail_prob;
        self
    }

    pub fn with_w_bar(mut self, w_bar: F) -> Self {
        self.w_bar = Some(w_bar);
        self
    }

    pub fn with_max_iterations(mut self, cap: u64) -> Self {
        self.max_iterations = Some(cap);
        self
    }

    pub fn with_parallelism(mut self, parallelism: usize) -> Self {
        self.parallelism = parallelism;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.fail_prob > F::zero() && self.fail_prob < F::one()) {
            return Err(Error::domain(format!(
                "fail_prob {} outside (0, 1)",
                self.fail_prob
            )));
        }
        if self.parallelism == 0 {
            return Err(Error::domain("parallelism must be positive"));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::domain("max_iterations must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    /// `w* − ε·w`.
    Additive,
    /// `(1 − ε)·w*`, available when a lower bound on `w*` is known.
    Multiplicative,
}

impl TargetKind {
    pub fn name(self) -> &'static str {
        match self {
            TargetKind::Additive => "additive",
            TargetKind::Multiplicative => "multiplicative",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationBudget<F> {
    pub effective_epsilon: F,
    /// `log₂` of the guaranteed number of target assignments.
    pub log2_count: F,
    /// `log₂ (ln(1/fail_prob) · 2^{n − log2_count})`.
    pub log2_required: F,
    /// `⌈ln(1/fail_prob) · 2^{n − log2_count}⌉`, `None` above `2^63`.
    pub required: Option<u64>,
    /// Iterations that will actually run (`required` capped by `max_iterations`).
    pub iterations: u64,
    pub clamped: bool,
    /// `exp(−iterations · 2^{log2_count − n})`.
    pub achieved_fail_bound: F,
}

pub fn iteration_budget<F: Scalar>(
    inst: &CspInstance<F>,
    cfg: &SamplerConfig<F>,
) -> Result<IterationBudget<F>> {
    cfg.validate()?;
    let bound = counting_bound(inst, cfg.epsilon, cfg.w_bar, &DeltaGrid::Breakpoints)?;
    let n = F::of_usize(inst.num_vars());
    let log2_count = bound.log2_count();
    let ln_inv = (F::one() / cfg.fail_prob).ln();
    let shortfall = n - log2_count;
    let log2_required = ln_inv.log2() + shortfall;
    let raw = (ln_inv * shortfall.exp2()).ceil();
    let limit = F::lit(9_223_372_036_854_775_808.0); // 2^63
    let required = if raw.is_finite() && raw < limit {
        Some(raw.to_u64().expect("below 2^63").max(1))
    } else {
        None
    };
    let (iterations, clamped) = match (required, cfg.max_iterations) {
        (Some(t), Some(cap)) if t > cap => (cap, true),
        (Some(t), _) => (t, false),
        (None, Some(cap)) => (cap, true),
        (None, None) => {
            return Err(Error::BudgetOverflow {
                log2_budget: log2_required.to_f64().unwrap_or(f64::INFINITY),
            })
        }
    };
    let hit = (log2_count - n).exp2();
    let achieved_fail_bound = (-F::from_u64(iterations).expect("u64 fits") * hit).exp();
    Ok(IterationBudget {
        effective_epsilon: bound.effective_epsilon,
        log2_count,
        log2_required,
        required,
        iterations,
        clamped,
        achieved_fail_bound,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerResult<F> {
    pub best_assignment: Assignment,
    pub best_weight: F,
    /// Sample index that produced the best assignment.
    pub best_index: u64,
    /// Samples examined in index order. Less than the budget only when a
    /// sample satisfied every constraint.
    pub iterations_used: u64,
    pub iterations_budget: u64,
    pub target_kind: TargetKind,
    pub seed: u64,
    pub effective_epsilon: F,
    pub log2_count: F,
    pub log2_budget: F,
    pub achieved_fail_bound: F,
    pub warnings: Vec<String>,
}

/// One examined sample, reported by [`solve_traced`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep<F> {
    pub index: u64,
    pub weight: F,
    pub best_weight: F,
}

pub fn solve<F: Scalar>(inst: &CspInstance<F>, cfg: &SamplerConfig<F>) -> Result<SamplerResult<F>> {
    let budget = iteration_budget(inst, cfg)?;
    let total = budget.iterations;
    let workers = (cfg.parallelism as u64).min(total).max(1);
    let chunk = total.div_ceil(workers);

    let locals: Vec<LocalBest<F>> = if workers == 1 {
        vec![scan(inst, cfg.seed, 0, total, &mut |_| {})]
    } else {
        thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|wkr| {
                    let start = wkr * chunk;
                    let end = (start + chunk).min(total);
                    s.spawn(move || scan(inst, cfg.seed, start, end, &mut |_| {}))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sampler worker panicked"))
                .collect()
        })
    };
    Ok(finish(inst, cfg, &budget, merge(locals)))
}

/// Sequential [`solve`] that reports every sample to `trace`.
pub fn solve_traced<F: Scalar>(
    inst: &CspInstance<F>,
    cfg: &SamplerConfig<F>,
    mut trace: impl FnMut(TraceStep<F>),
) -> Result<SamplerResult<F>> {
    let budget = iteration_budget(inst, cfg)?;
    let best = scan(inst, cfg.seed, 0, budget.iterations, &mut trace);
    Ok(finish(inst, cfg, &budget, best))
}

/// MAX-k-SAT entry point: uses `w̄ = max(w/2, Σ (1 − 2^{−aᵢ})·wᵢ)` so the
/// target is `(1 − ε)·w*`. Overwrites `cfg.w_bar`.
pub fn solve_ksat<F: Scalar>(
    inst: &CspInstance<F>,
    k: usize,
    cfg: &SamplerConfig<F>,
) -> Result<SamplerResult<F>> {
    let w_bar = ksat_w_bar(inst, k)?;
    let cfg = SamplerConfig {
        w_bar: Some(w_bar),
        ..cfg.clone()
    };
    solve(inst, &cfg)
}

/// The lower bound [`solve_ksat`] plugs in.
pub fn ksat_w_bar<F: Scalar>(inst: &CspInstance<F>, k: usize) -> Result<F> {
    let by_length = inst.clause_lower_bound()?;
    if inst.max_arity() > k {
        return Err(Error::domain(format!(
            "clause of length {} exceeds k = {k}",
            inst.max_arity()
        )));
    }
    let half = inst.total_weight() / F::lit(2.0);
    Ok(by_length.max(half).min(inst.total_weight()))
}

struct LocalBest<F> {
    index: u64,
    weight: F,
    bits: Vec<bool>,
    /// The scan stopped at a sample satisfying every constraint.
    saturated: bool,
}

fn words_per_sample(n: usize) -> u64 {
    n.div_ceil(64) as u64
}

fn scan<F: Scalar>(
    inst: &CspInstance<F>,
    seed: u64,
    start: u64,
    end: u64,
    trace: &mut dyn FnMut(TraceStep<F>),
) -> LocalBest<F> {
    let n = inst.num_vars();
    let words = words_per_sample(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(start as u128 * words as u128 * 2);
    let total = inst.total_weight();

    let mut bits = vec![false; n];
    let mut best = LocalBest {
        index: start,
        weight: F::neg_infinity(),
        bits: vec![false; n],
        saturated: false,
    };
    for index in start..end {
        for w in 0..words as usize {
            let word = rng.next_u64();
            let lo = w * 64;
            for (j, b) in bits[lo..(lo + 64).min(n)].iter_mut().enumerate() {
                *b = (word >> j) & 1 == 1;
            }
        }
        let weight = inst.weight_of_bits(&bits);
        if weight > best.weight {
            best.index = index;
            best.weight = weight;
            best.bits.copy_from_slice(&bits);
        }
        trace(TraceStep {
            index,
            weight,
            best_weight: best.weight,
        });
        if weight == total {
            best.saturated = true;
            break;
        }
    }
    best
}

fn merge<F: Scalar>(locals: Vec<LocalBest<F>>) -> LocalBest<F> {
    // Ranges are in index order: a later range only wins on strictly larger weight.
    locals
        .into_iter()
        .reduce(|acc, next| if next.weight > acc.weight { next } else { acc })
        .expect("at least one worker")
}

fn finish<F: Scalar>(
    inst: &CspInstance<F>,
    cfg: &SamplerConfig<F>,
    budget: &IterationBudget<F>,
    best: LocalBest<F>,
) -> SamplerResult<F> {
    let iterations_used = if best.saturated {
        best.index + 1
    } else {
        budget.iterations
    };
    let mut warnings = Vec::new();
    if budget.clamped {
        warnings.push(format!(
            "budget clamped to max_iterations = {}; failure bound weakened to {}",
            budget.iterations, budget.achieved_fail_bound
        ));
    }
    let achieved_fail_bound = if best.saturated {
        F::zero()
    } else {
        budget.achieved_fail_bound
    };
    debug_assert_eq!(best.weight, inst.weight_of_bits(&best.bits));
    SamplerResult {
        best_assignment: Assignment::from_bits(best.bits),
        best_weight: best.weight,
        best_index: best.index,
        iterations_used,
        iterations_budget: budget.iterations,
        target_kind: if cfg.w_bar.is_some() {
            TargetKind::Multiplicative
        } else {
            TargetKind::Additive
        },
        seed: cfg.seed,
        effective_epsilon: budget.effective_epsilon,
        log2_count: budget.log2_count,
        log2_budget: budget.log2_required,
        achieved_fail_bound,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_ekcnf, random_weighted_cnf};

    fn cnf(n: usize, clauses: &[&[i64]]) -> CspInstance<f64> {
        let cl: Vec<(Vec<i64>, f64)> = clauses.iter().map(|c| (c.to_vec(), 1.0)).collect();
        CspInstance::from_clauses(n, &cl).unwrap()
    }

    #[test]
    fn budget_with_unit_fail_log() {
        // n = 4 with r = 0 everywhere: log2_count = 0.
        let inst = cnf(4, &[&[1, 2, 3], &[1, 2, 4]]);
        let cfg = SamplerConfig::new(0.01).with_fail_prob((-1.0f64).exp());
        let b = iteration_budget(&inst, &cfg).unwrap();
        assert_eq!(b.log2_count, 0.0);
        assert_eq!(b.required, Some(16));
        assert_eq!(b.iterations, 16);
    }

    #[test]
    fn budget_ceil_after_product() {
        let inst = cnf(4, &[&[1, 2, 3], &[1, 2, 4]]);
        let b = iteration_budget(&inst, &SamplerConfig::new(0.01)).unwrap();
        // ceil(ln(1000) * 16) = ceil(110.52...) = 111, not 7 * 16.
        assert_eq!(b.required, Some((1000f64.ln() * 16.0).ceil() as u64));
        assert_eq!(b.required, Some(111));
    }

    #[test]
    fn budget_clamp_and_overflow() {
        let inst: CspInstance<f64> = random_ekcnf(80, 20, 3, 5).unwrap();
        let cfg = SamplerConfig::new(0.001);
        assert!(matches!(
            iteration_budget(&inst, &cfg),
            Err(Error::BudgetOverflow { .. })
        ));
        let b = iteration_budget(&inst, &cfg.clone().with_max_iterations(100)).unwrap();
        assert!(b.clamped);
        assert_eq!(b.iterations, 100);
        assert!(b.required.is_none());
        assert!(b.achieved_fail_bound > 0.99);
        let res = solve(&inst, &cfg.with_max_iterations(100)).unwrap();
        assert_eq!(res.warnings.len(), 1);
        assert!(res.iterations_budget <= 100);
    }

    #[test]
    fn config_validation() {
        let inst = cnf(2, &[&[1, 2]]);
        assert!(iteration_budget(&inst, &SamplerConfig::new(0.1).with_fail_prob(0.0)).is_err());
        assert!(iteration_budget(&inst, &SamplerConfig::new(0.1).with_fail_prob(1.0)).is_err());
        assert!(iteration_budget(&inst, &SamplerConfig::new(0.0)).is_err());
        assert!(iteration_budget(&inst, &SamplerConfig::new(0.1).with_parallelism(0)).is_err());
        assert!(iteration_budget(&inst, &SamplerConfig::new(0.1).with_w_bar(2.0)).is_err());
    }

    #[test]
    fn single_clause_is_satisfied() {
        let inst = cnf(2, &[&[1, 2]]);
        for seed in 0..200 {
            let res = solve(&inst, &SamplerConfig::new(0.1).with_seed(seed)).unwrap();
            assert_eq!(res.best_weight, 1.0);
            assert_eq!(res.target_kind, TargetKind::Additive);
            assert_eq!(
                res.best_weight,
                inst.weight_of(&res.best_assignment).unwrap()
            );
        }
    }

    #[test]
    fn complementary_units_hit_optimum_immediately() {
        let inst = cnf(1, &[&[1], &[-1]]);
        let res = solve(&inst, &SamplerConfig::new(0.5).with_seed(3)).unwrap();
        assert_eq!(res.best_weight, 1.0);
        assert!(res.iterations_used <= res.iterations_budget);
    }

    #[test]
    fn parallelism_does_not_change_result() {
        let inst: CspInstance<f64> = random_weighted_cnf(70, 300, 3, true, 11);
        let base = SamplerConfig::new(0.05)
            .with_seed(42)
            .with_max_iterations(5000);
        let one = solve(&inst, &base).unwrap();
        for p in [2, 3, 8] {
            let other = solve(&inst, &base.clone().with_parallelism(p)).unwrap();
            assert_eq!(one, other, "parallelism {p}");
        }
        // A trace run sees the same stream.
        let traced = solve_traced(&inst, &base, |_| {}).unwrap();
        assert_eq!(one, traced);
    }

    #[test]
    fn sample_bits_depend_on_index_only() {
        // (x1) and (-x1) can never both hold, so no run stops early.
        let inst = cnf(9, &[&[1], &[-1], &[2, 3], &[-4, 5, 6], &[7, -8, 9]]);
        let cfg = SamplerConfig::new(0.1).with_seed(9).with_max_iterations(64);
        let mut full = Vec::new();
        solve_traced(&inst, &cfg, |s| full.push(s.weight)).unwrap();
        assert_eq!(full.len(), 64);
        for i in [0u64, 17, 40, 63] {
            let single = scan(&inst, 9, i, i + 1, &mut |_| {});
            assert_eq!(single.weight, full[i as usize]);
        }
    }

    #[test]
    fn best_weight_is_monotone() {
        let inst: CspInstance<f64> = random_ekcnf(30, 200, 3, 4).unwrap();
        let cfg = SamplerConfig::new(0.1)
            .with_seed(1)
            .with_max_iterations(2000);
        let mut prev = f64::NEG_INFINITY;
        let mut steps = 0;
        let res = solve_traced(&inst, &cfg, |s| {
            assert!(s.best_weight >= prev);
            assert!(s.best_weight >= s.weight);
            prev = s.best_weight;
            steps += 1;
        })
        .unwrap();
        assert_eq!(steps, res.iterations_used);
        assert_eq!(prev, res.best_weight);
    }

    #[test]
    fn w_bar_budget_identity() {
        for seed in 0..20 {
            let inst: CspInstance<f64> = random_weighted_cnf(10, 25, 3, seed % 2 == 0, seed);
            let w = inst.total_weight();
            let (eps, wb) = (0.3, 0.6 * w);
            let with = iteration_budget(&inst, &SamplerConfig::new(eps).with_w_bar(wb)).unwrap();
            let without = iteration_budget(&inst, &SamplerConfig::new(eps * wb / w)).unwrap();
            assert_eq!(with, without);
        }
    }

    #[test]
    fn ksat_lower_bounds() {
        let e3: CspInstance<f64> = random_ekcnf(6, 8, 3, 1).unwrap();
        assert_eq!(ksat_w_bar(&e3, 3).unwrap(), 7.0);
        let mixed = cnf(3, &[&[1], &[-2], &[1, 2, 3]]);
        assert_eq!(ksat_w_bar(&mixed, 3).unwrap(), 1.875);
        assert!(ksat_w_bar(&mixed, 2).is_err());
        for seed in 0..10 {
            let inst: CspInstance<f64> = random_weighted_cnf(8, 12, 4, false, seed);
            assert!(ksat_w_bar(&inst, 4).unwrap() >= 6.0);
        }
        let res = solve_ksat(&e3, 3, &SamplerConfig::new(0.125)).unwrap();
        assert_eq!(res.target_kind, TargetKind::Multiplicative);
        assert_eq!(res.effective_epsilon, 0.125 * 7.0 / 8.0);
    }

    #[test]
    fn ksat_rejects_general_constraints() {
        let (xor, _) = crate::formats::parse_csp::<f64>("csp 2\nt 1 2 1 2 0110\n").unwrap();
        assert!(matches!(
            solve_ksat(&xor, 2, &SamplerConfig::new(0.1)),
            Err(Error::Unsupported(_))
        ));
    }
}
