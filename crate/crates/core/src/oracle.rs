//! Exhaustive ground truth for small instances.
//!
//! Assignments are enumerated in Gray-code order: consecutive assignments
//! differ in one variable, and only the constraints mentioning it are
//! re-evaluated. The space can be split by the values of the highest
//! variables and walked on several threads.

use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::lemma_gap;
use crate::error::{Error, Result};
use crate::instance::{Assignment, CspInstance};
use crate::scalar::Scalar;

pub const DEFAULT_MAX_VARS: usize = 24;

/// Recompute the running weight from scratch this often to bound drift.
const RESYNC_INTERVAL: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Oracle {
    pub max_vars: usize,
    pub parallelism: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            max_vars: DEFAULT_MAX_VARS,
            parallelism: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaCheck<F> {
    pub delta: F,
    pub threshold: F,
    pub s_size: usize,
    pub r: usize,
    /// Members of the flip set, counted by enumeration.
    pub sigma_count: u64,
    /// `d_exact ≥ sigma_count`.
    pub pass: bool,
    /// Every member reaches `w* − t·r` and `t·r ≤ ε·w`.
    pub members_pass: bool,
    /// Lowest weight among the members.
    pub min_member_weight: F,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<F> {
    pub n: usize,
    pub m: usize,
    pub epsilon: F,
    pub effective_epsilon: F,
    pub w_star: F,
    pub argmax: Assignment,
    pub d_exact: u64,
    pub per_delta_checks: Vec<SigmaCheck<F>>,
    pub all_pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCheck {
    pub samples: usize,
    pub worst_gap: f64,
    /// `(x, y, r)` attaining `worst_gap`.
    pub worst_triple: (f64, f64, f64),
    pub pass: bool,
}

pub fn brute_force_optimum<F: Scalar>(inst: &CspInstance<F>) -> Result<(F, Assignment)> {
    Oracle::default().optimum(inst)
}

pub fn count_near_optimal<F: Scalar>(inst: &CspInstance<F>, epsilon: F) -> Result<u64> {
    Oracle::default().count_near_optimal(inst, epsilon)
}

pub fn verify_theorem_lb<F: Scalar>(
    inst: &CspInstance<F>,
    epsilon: F,
    w_bar: Option<F>,
) -> Result<VerificationReport<F>> {
    Oracle::default().verify_theorem_lb(inst, epsilon, w_bar)
}

/// Weight of every assignment in index order, where bit `i` of the index is
/// variable `i + 1`. Plain evaluation without incremental updates.
pub fn enumerate_naive<F: Scalar>(inst: &CspInstance<F>) -> Result<Vec<F>> {
    let n = inst.num_vars();
    if n > DEFAULT_MAX_VARS {
        return Err(Error::Size {
            num_vars: n,
            cap: DEFAULT_MAX_VARS,
        });
    }
    let mut bits = vec![false; n];
    Ok((0..1u64 << n)
        .map(|idx| {
            for (i, b) in bits.iter_mut().enumerate() {
                *b = (idx >> i) & 1 == 1;
            }
            inst.weight_of_bits(&bits)
        })
        .collect())
}

/// Random valid `(x, y, r)` triples for `H(r/x)·x ≥ H(r/y)·y`; passes when the
/// smallest gap is at least `−1e-12`.
pub fn verify_lemma22(samples: usize, seed: u64) -> LemmaCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (f64::INFINITY, (0.0, 0.0, 0.0));
    for i in 0..samples {
        let y: f64 = rng.random_range(1e-6..=100.0);
        let x = match i % 8 {
            0 => y,
            _ => y + rng.random_range(0.0..=100.0),
        };
        let r = match i % 16 {
            1 => 0.0,
            3 => y,
            _ => y * rng.random_range(0.0..=1.0),
        };
        let gap = lemma_gap(x, y, r).expect("triple is valid by construction");
        if gap < worst.0 {
            worst = (gap, (x, y, r));
        }
    }
    LemmaCheck {
        samples,
        worst_gap: worst.0,
        worst_triple: worst.1,
        pass: worst.0 >= -1e-12,
    }
}

/// Walks all `2^free.len()` settings of the `free` variables starting from
/// `bits`, in Gray-code order. `visit` receives the flip mask (bit `j` set
/// when `free[j]` differs from the start), the assignment and its weight.
/// Leaves `bits` as the last visited assignment.
fn gray_walk<F: Scalar>(
    inst: &CspInstance<F>,
    bits: &mut [bool],
    free: &[usize],
    mut visit: impl FnMut(u64, &[bool], F),
) {
    let constraints = inst.constraints();
    let mut rows: Vec<usize> = constraints.iter().map(|c| c.row(bits)).collect();
    let mut weight = resync(inst, &rows);
    // (constraint, position of the variable in it) for each free variable.
    let touches: Vec<Vec<(usize, usize)>> = free
        .iter()
        .map(|&v| {
            inst.incidence()[v]
                .iter()
                .map(|&c| {
                    let pos = constraints[c]
                        .var_indices()
                        .iter()
                        .position(|&u| u == v)
                        .unwrap();
                    (c, pos)
                })
                .collect()
        })
        .collect();

    let mut mask = 0u64;
    visit(mask, bits, weight);
    for step in 1..(1u64 << free.len()) {
        let j = step.trailing_zeros() as usize;
        let v = free[j];
        bits[v] = !bits[v];
        mask ^= 1 << j;
        for &(c, pos) in &touches[j] {
            let before = constraints[c].truth_table().get(rows[c]);
            rows[c] ^= 1 << pos;
            let after = constraints[c].truth_table().get(rows[c]);
            if before != after {
                let w = constraints[c].weight();
                weight = if after { weight + w } else { weight - w };
            }
        }
        if step % RESYNC_INTERVAL == 0 {
            weight = resync(inst, &rows);
        }
        visit(mask, bits, weight);
    }
}

fn resync<F: Scalar>(inst: &CspInstance<F>, rows: &[usize]) -> F {
    inst.constraints()
        .iter()
        .zip(rows)
        .fold(F::zero(), |acc, (c, &row)| {
            if c.truth_table().get(row) {
                acc + c.weight()
            } else {
                acc
            }
        })
}

struct Best<F> {
    weight: F,
    argmax: Vec<bool>,
}

impl<F: Scalar> Best<F> {
    fn offer(&mut self, bits: &[bool], weight: F, tol: F) {
        if weight > self.weight + tol {
            self.weight = weight;
            self.argmax.copy_from_slice(bits);
        } else if weight >= self.weight - tol && bits < self.argmax.as_slice() {
            self.weight = self.weight.max(weight);
            self.argmax.copy_from_slice(bits);
        }
    }
}

impl Oracle {
    pub fn with_parallelism(mut self, parallelism: usize) -> Self {
        self.parallelism = parallelism.max(1);
        self
    }

    pub fn with_max_vars(mut self, max_vars: usize) -> Self {
        self.max_vars = max_vars;
        self
    }

    fn check_size<F: Copy>(&self, inst: &CspInstance<F>) -> Result<()> {
        if inst.num_vars() > self.max_vars || inst.num_vars() > 63 {
            return Err(Error::Size {
                num_vars: inst.num_vars(),
                cap: self.max_vars.min(63),
            });
        }
        Ok(())
    }

    /// Runs `visit` over every assignment, one state per block of fixed
    /// high-variable values; blocks run concurrently.
    fn enumerate<F, T, I, V>(&self, inst: &CspInstance<F>, init: I, visit: V) -> Vec<T>
    where
        F: Scalar,
        T: Send,
        I: Fn() -> T + Sync,
        V: Fn(&mut T, &[bool], F) + Sync,
    {
        let n = inst.num_vars();
        let mut split = 0;
        while split < n.saturating_sub(4) && (1usize << split) < self.parallelism {
            split += 1;
        }
        let low: Vec<usize> = (0..n - split).collect();
        let run_block = |prefix: u64| {
            let mut bits = vec![false; n];
            for h in 0..split {
                bits[n - split + h] = (prefix >> h) & 1 == 1;
            }
            let mut state = init();
            gray_walk(inst, &mut bits, &low, |_, b, w| visit(&mut state, b, w));
            state
        };
        if split == 0 {
            return vec![run_block(0)];
        }
        let blocks = 1u64 << split;
        let workers = (self.parallelism as u64).min(blocks);
        thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|wkr| {
                    let run_block = &run_block;
                    s.spawn(move || {
                        (wkr..blocks)
                            .step_by(workers as usize)
                            .map(|b| (b, run_block(b)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            let mut all: Vec<(u64, T)> = handles
                .into_iter()
                .flat_map(|h| h.join().expect("oracle worker panicked"))
                .collect();
            all.sort_by_key(|(b, _)| *b);
            all.into_iter().map(|(_, t)| t).collect()
        })
    }

    /// Exact `w*` and the lexicographically smallest maximizer (variable 1
    /// most significant).
    pub fn optimum<F: Scalar>(&self, inst: &CspInstance<F>) -> Result<(F, Assignment)> {
        self.check_size(inst)?;
        let n = inst.num_vars();
        let tol = F::weight_tolerance(inst.total_weight());
        let blocks = self.enumerate(
            inst,
            || Best {
                weight: F::neg_infinity(),
                argmax: vec![true; n],
            },
            |best, bits, w| best.offer(bits, w, tol),
        );
        let mut merged = Best {
            weight: F::neg_infinity(),
            argmax: vec![true; n],
        };
        for b in blocks {
            merged.offer(&b.argmax, b.weight, tol);
        }
        let argmax = Assignment::from_bits(merged.argmax);
        let w_star = inst.weight_of_bits(argmax.bits());
        Ok((w_star, argmax))
    }

    /// `|{z : 𝒲(f, z) ≥ w* − εw}|`.
    pub fn count_near_optimal<F: Scalar>(&self, inst: &CspInstance<F>, epsilon: F) -> Result<u64> {
        check_epsilon(epsilon)?;
        let (w_star, _) = self.optimum(inst)?;
        Ok(self.count_at_least(inst, w_star - epsilon * inst.total_weight()))
    }

    fn count_at_least<F: Scalar>(&self, inst: &CspInstance<F>, threshold: F) -> u64 {
        let cutoff = threshold - F::weight_tolerance(inst.total_weight());
        self.enumerate(
            inst,
            || 0u64,
            |count, _, w| {
                if w >= cutoff {
                    *count += 1;
                }
            },
        )
        .into_iter()
        .sum()
    }

    /// Checks `D(f, ε) ≥ |Σ|` at the lower feasible δ and every contribution
    /// breakpoint above it, and that every member of each flip set `Σ`
    /// reaches the threshold.
    pub fn verify_theorem_lb<F: Scalar>(
        &self,
        inst: &CspInstance<F>,
        epsilon: F,
        w_bar: Option<F>,
    ) -> Result<VerificationReport<F>> {
        check_epsilon(epsilon)?;
        self.check_size(inst)?;
        let w = inst.total_weight();
        let l = inst.weighted_length();
        let n = inst.num_vars();
        let nf = F::of_usize(n);
        let effective_epsilon = match w_bar {
            Some(wb) if !(wb > F::zero() && wb <= w) => {
                return Err(Error::domain(format!("w_bar {wb} outside (0, w = {w}]")));
            }
            Some(wb) => epsilon * wb / w,
            None => epsilon,
        };
        let slack = effective_epsilon * w;
        let tol = F::weight_tolerance(w);

        let (w_star, argmax) = self.optimum(inst)?;
        let d_exact = self.count_at_least(inst, w_star - slack);

        let delta_min = F::one() + slack / l;
        let mut thresholds = vec![(l + slack) / nf];
        thresholds.extend(
            inst.contributions()
                .iter()
                .copied()
                .filter(|&c| nf * c / l > delta_min),
        );
        thresholds.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        thresholds.dedup();

        let mut checks = Vec::with_capacity(thresholds.len());
        for t in thresholds {
            let s_vars: Vec<usize> = (0..n).filter(|&i| inst.contributions()[i] <= t).collect();
            let r = (slack / t).floor().to_usize().unwrap_or(usize::MAX);
            let per_flip = t * F::of_usize(r.min(s_vars.len()));
            let mut bits = argmax.bits().to_vec();
            let mut sigma_count = 0u64;
            let mut min_member = F::infinity();
            let mut members_pass = per_flip <= slack + tol;
            gray_walk(inst, &mut bits, &s_vars, |mask, _, weight| {
                if mask.count_ones() as usize <= r {
                    sigma_count += 1;
                    min_member = min_member.min(weight);
                    if weight < w_star - per_flip - tol || weight < w_star - slack - tol {
                        members_pass = false;
                    }
                }
            });
            checks.push(SigmaCheck {
                delta: nf * t / l,
                threshold: t,
                s_size: s_vars.len(),
                r,
                sigma_count,
                pass: d_exact >= sigma_count,
                members_pass,
                min_member_weight: min_member,
            });
        }
        let all_pass = checks.iter().all(|c| c.pass && c.members_pass);
        Ok(VerificationReport {
            n,
            m: inst.num_constraints(),
            epsilon,
            effective_epsilon,
            w_star,
            argmax,
            d_exact,
            per_delta_checks: checks,
            all_pass,
        })
    }
}

fn check_epsilon<F: Scalar>(epsilon: F) -> Result<()> {
    if !(epsilon > F::zero() && epsilon <= F::one()) {
        return Err(Error::domain(format!("epsilon {epsilon} outside (0, 1]")));
    }
    Ok(())
}
