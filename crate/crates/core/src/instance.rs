//! Weighted MAX-CSP instances with explicit truth-table constraints.
//!
//! Variables are 1-based at every public boundary (constructors, file
//! formats, [`CspInstance::contribution`]) and 0-based internally. Truth
//! tables use a fixed row convention shared by every module: row `t` of a
//! constraint over `vars = [v0, v1, ...]` is the assignment where `vj` takes
//! bit `j` of `t`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest supported constraint arity (truth tables of at most 2^20 rows).
pub const MAX_ARITY: usize = 20;

/// Packed bit sequence of length `2^arity`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    words: Vec<u64>,
    len: usize,
}

impl TruthTable {
    pub fn from_bools(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        TruthTable {
            words,
            len: bits.len(),
        }
    }

    /// All rows set except `falsifier`.
    fn all_but(len: usize, falsifier: usize) -> Self {
        let mut words = vec![u64::MAX; len.div_ceil(64)];
        let tail = len % 64;
        if tail != 0 {
            *words.last_mut().unwrap() = (1u64 << tail) - 1;
        }
        words[falsifier / 64] &= !(1 << (falsifier % 64));
        TruthTable { words, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, row: usize) -> bool {
        (self.words[row / 64] >> (row % 64)) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Rows whose bit is 0.
    pub fn zero_rows(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&t| !self.get(t))
    }
}

/// Leftmost character is row 0.
impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len)
            .map(|t| if self.get(t) { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl FromStr for TruthTable {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("invalid truth-table character {other:?}")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(TruthTable::from_bools(&bits))
    }
}

/// A weighted Boolean predicate over a few distinct variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<W> {
    weight: W,
    vars: Vec<usize>,
    table: TruthTable,
}

impl<W: Scalar> Constraint<W> {
    /// `vars` are 1-based and must be pairwise distinct.
    pub fn new(weight: W, vars: &[usize], table: TruthTable) -> Result<Self> {
        check_weight(weight)?;
        check_arity(vars.len())?;
        if vars.contains(&0) {
            return Err(Error::domain("variable indices are 1-based; got 0"));
        }
        if let Some(v) = first_duplicate(vars) {
            return Err(Error::domain(format!(
                "variable {v} appears twice in one constraint"
            )));
        }
        if table.len() != 1 << vars.len() {
            return Err(Error::domain(format!(
                "truth table has {} rows, arity {} needs {}",
                table.len(),
                vars.len(),
                1usize << vars.len()
            )));
        }
        Ok(Constraint {
            weight,
            vars: vars.iter().map(|v| v - 1).collect(),
            table,
        })
    }

    /// Disjunction of signed 1-based literals: the table is 0 only on the row
    /// where every literal is false.
    pub fn clause(literals: &[i64], weight: W) -> Result<Self> {
        check_weight(weight)?;
        if literals.is_empty() {
            return Err(Error::domain("empty clause"));
        }
        check_arity(literals.len())?;
        if literals.contains(&0) {
            return Err(Error::domain("literal 0 is not a variable"));
        }
        let vars: Vec<usize> = literals.iter().map(|l| l.unsigned_abs() as usize).collect();
        if let Some(v) = first_duplicate(&vars) {
            return Err(Error::domain(format!(
                "variable {v} appears twice in clause"
            )));
        }
        // A negative literal is false when its variable is 1.
        let falsifier = literals
            .iter()
            .enumerate()
            .filter(|(_, &l)| l < 0)
            .fold(0usize, |acc, (j, _)| acc | (1 << j));
        Ok(Constraint {
            weight,
            vars: vars.iter().map(|v| v - 1).collect(),
            table: TruthTable::all_but(1 << vars.len(), falsifier),
        })
    }
}

impl<W: Copy> Constraint<W> {
    pub fn weight(&self) -> W {
        self.weight
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    /// 0-based variable indices in table-row order.
    pub fn var_indices(&self) -> &[usize] {
        &self.vars
    }

    /// 1-based variable indices in table-row order.
    pub fn variables(&self) -> Vec<usize> {
        self.vars.iter().map(|v| v + 1).collect()
    }

    pub fn truth_table(&self) -> &TruthTable {
        &self.table
    }

    /// Table row selected by `bits`.
    #[inline]
    pub fn row(&self, bits: &[bool]) -> usize {
        self.vars
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &v)| acc | ((bits[v] as usize) << j))
    }

    #[inline]
    pub fn is_satisfied(&self, bits: &[bool]) -> bool {
        self.table.get(self.row(bits))
    }

    /// Signed 1-based literals if the table has exactly one falsifying row.
    pub fn clause_literals(&self) -> Option<Vec<i64>> {
        let mut zeros = self.table.zero_rows();
        let falsifier = zeros.next()?;
        if zeros.next().is_some() {
            return None;
        }
        Some(
            self.vars
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    let var = (v + 1) as i64;
                    if (falsifier >> j) & 1 == 1 {
                        -var
                    } else {
                        var
                    }
                })
                .collect(),
        )
    }
}

fn check_weight<W: Scalar>(weight: W) -> Result<()> {
    if !(weight.is_finite() && weight > W::zero()) {
        return Err(Error::domain(format!(
            "constraint weight must be a positive finite real, got {weight}"
        )));
    }
    Ok(())
}

fn check_arity(arity: usize) -> Result<()> {
    if arity == 0 || arity > MAX_ARITY {
        return Err(Error::domain(format!(
            "constraint arity {arity} outside 1..={MAX_ARITY}"
        )));
    }
    Ok(())
}

fn first_duplicate(vars: &[usize]) -> Option<usize> {
    let mut seen = std::collections::HashSet::new();
    vars.iter().copied().find(|v| !seen.insert(*v))
}

/// A point of `{0,1}^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Assignment(vec![false; n])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Assignment(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Value of the 0-based variable `i`.
    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|&b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl FromStr for Assignment {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("invalid assignment character {other:?}")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Assignment)
    }
}

/// Immutable weighted MAX-CSP instance with cached aggregate quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct CspInstance<W> {
    num_vars: usize,
    constraints: Vec<Constraint<W>>,
    clausal: bool,
    total_weight: W,
    weighted_length: W,
    contributions: Vec<W>,
    incidence: Vec<Vec<usize>>,
}

impl<W: Scalar> CspInstance<W> {
    pub fn new(num_vars: usize, constraints: Vec<Constraint<W>>) -> Result<Self> {
        Self::build(num_vars, constraints, false)
    }

    /// Instance of weighted clauses; enables the clause-only operations.
    pub fn from_clauses<L: AsRef<[i64]>>(num_vars: usize, clauses: &[(L, W)]) -> Result<Self> {
        let constraints = clauses
            .iter()
            .map(|(lits, w)| Constraint::clause(lits.as_ref(), *w))
            .collect::<Result<Vec<_>>>()?;
        Self::build(num_vars, constraints, true)
    }

    /// `clausal` asserts every constraint was built by [`Constraint::clause`].
    pub(crate) fn build(
        num_vars: usize,
        constraints: Vec<Constraint<W>>,
        clausal: bool,
    ) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::domain("instance needs at least one variable"));
        }
        if constraints.is_empty() {
            return Err(Error::domain("instance needs at least one constraint"));
        }
        let mut total_weight = W::zero();
        let mut weighted_length = W::zero();
        let mut contributions = vec![W::zero(); num_vars];
        let mut incidence = vec![Vec::new(); num_vars];
        for (c, constraint) in constraints.iter().enumerate() {
            for &v in &constraint.vars {
                if v >= num_vars {
                    return Err(Error::IndexOutOfRange {
                        index: v + 1,
                        num_vars,
                    });
                }
                contributions[v] = contributions[v] + constraint.weight;
                incidence[v].push(c);
            }
            total_weight = total_weight + constraint.weight;
            weighted_length = weighted_length + W::of_usize(constraint.arity()) * constraint.weight;
        }
        debug_assert!(!clausal || constraints.iter().all(|c| c.clause_literals().is_some()));
        Ok(CspInstance {
            num_vars,
            constraints,
            clausal,
            total_weight,
            weighted_length,
            contributions,
            incidence,
        })
    }

    /// Weight 𝒲(f, z) of the satisfied constraints.
    pub fn weight_of(&self, z: &Assignment) -> Result<W> {
        if z.len() != self.num_vars {
            return Err(Error::Dimension {
                expected: self.num_vars,
                actual: z.len(),
            });
        }
        Ok(self.weight_of_bits(z.bits()))
    }

    /// Unchecked variant of [`weight_of`](Self::weight_of); `bits.len()` must be `n`.
    #[inline]
    pub fn weight_of_bits(&self, bits: &[bool]) -> W {
        debug_assert_eq!(bits.len(), self.num_vars);
        let mut acc = W::zero();
        for c in &self.constraints {
            if c.is_satisfied(bits) {
                acc = acc + c.weight;
            }
        }
        acc
    }

    /// Contribution ℓᵢ of the 1-based variable `i`.
    pub fn contribution(&self, i: usize) -> Result<W> {
        if i == 0 || i > self.num_vars {
            return Err(Error::IndexOutOfRange {
                index: i,
                num_vars: self.num_vars,
            });
        }
        Ok(self.contributions[i - 1])
    }

    /// Number of clauses of each length.
    pub fn clause_length_histogram(&self) -> Result<BTreeMap<usize, usize>> {
        self.require_clausal("clause length histogram")?;
        let mut hist = BTreeMap::new();
        for c in &self.constraints {
            *hist.entry(c.arity()).or_insert(0) += 1;
        }
        Ok(hist)
    }

    /// Expected satisfied weight of a uniform assignment, Σ (1 − 2^{−aᵢ})·wᵢ.
    /// Equals Σᵢ (2ⁱ−1)/2ⁱ·mᵢ for unit weights, and is a lower bound on w*.
    pub fn clause_lower_bound(&self) -> Result<W> {
        self.require_clausal("clause lower bound")?;
        Ok(self.constraints.iter().fold(W::zero(), |acc, c| {
            let falsified = W::one() / W::of_usize(1 << c.arity());
            acc + (W::one() - falsified) * c.weight
        }))
    }

    fn require_clausal(&self, what: &str) -> Result<()> {
        if !self.clausal {
            return Err(Error::Unsupported(format!(
                "{what} needs a clause-built instance"
            )));
        }
        Ok(())
    }
}

impl<W: Copy> CspInstance<W> {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraints(&self) -> &[Constraint<W>] {
        &self.constraints
    }

    pub fn is_clausal(&self) -> bool {
        self.clausal
    }

    /// Total weight w.
    pub fn total_weight(&self) -> W {
        self.total_weight
    }

    /// Weighted length ℓ = Σ aᵢ·wᵢ.
    pub fn weighted_length(&self) -> W {
        self.weighted_length
    }

    /// ℓ₁..ℓₙ indexed by 0-based variable.
    pub fn contributions(&self) -> &[W] {
        &self.contributions
    }

    /// Constraint indices mentioning each 0-based variable.
    pub fn incidence(&self) -> &[Vec<usize>] {
        &self.incidence
    }

    pub fn max_arity(&self) -> usize {
        self.constraints
            .iter()
            .map(|c| c.arity())
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_clauses() -> CspInstance<f64> {
        CspInstance::from_clauses(4, &[(vec![1, 2, 3], 1.0), (vec![1, 2, 4], 1.0)]).unwrap()
    }

    #[test]
    fn complementary_units() {
        let inst = CspInstance::from_clauses(1, &[(vec![1], 1.0), (vec![-1], 1.0)]).unwrap();
        let z: Assignment = "1".parse().unwrap();
        assert_eq!(inst.weight_of(&z).unwrap(), 1.0);
    }

    #[test]
    fn only_falsifier_of_binary_clause() {
        let inst = CspInstance::from_clauses(2, &[(vec![1, 2], 1.0)]).unwrap();
        assert_eq!(inst.weight_of(&"00".parse().unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn hand_evaluated_pair() {
        let inst = two_clauses();
        assert_eq!(inst.weight_of(&"1000".parse().unwrap()).unwrap(), 2.0);
        assert_eq!(inst.weight_of(&"0000".parse().unwrap()).unwrap(), 0.0);
        assert_eq!(inst.weight_of(&"0001".parse().unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn weight_of_rejects_wrong_length() {
        let inst = two_clauses();
        assert!(matches!(
            inst.weight_of(&"101".parse().unwrap()),
            Err(Error::Dimension {
                expected: 4,
                actual: 3
            })
        ));
    }

    #[test]
    fn contributions_from_definition() {
        let inst = two_clauses();
        assert_eq!(inst.contribution(1).unwrap(), 2.0);
        assert_eq!(inst.contribution(3).unwrap(), 1.0);
        assert_eq!(inst.contributions(), &[2.0, 2.0, 1.0, 1.0]);
        assert_eq!(inst.weighted_length(), 6.0);
        assert!(matches!(
            inst.contribution(0),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            inst.contribution(5),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn unused_variable_contributes_nothing() {
        let inst = CspInstance::from_clauses(3, &[(vec![1, 2], 1.0)]).unwrap();
        assert_eq!(inst.contribution(3).unwrap(), 0.0);
    }

    #[test]
    fn fractional_weight_contribution() {
        let c = Constraint::new(2.5, &[1], "01".parse().unwrap()).unwrap();
        let inst = CspInstance::new(1, vec![c]).unwrap();
        assert_eq!(inst.contribution(1).unwrap(), 2.5);
    }

    #[test]
    fn clause_tables() {
        let c = Constraint::clause(&[1], 1.0).unwrap();
        assert_eq!(c.truth_table().to_string(), "01");

        let c = Constraint::clause(&[-1, 2], 1.0).unwrap();
        let zeros: Vec<_> = c.truth_table().zero_rows().collect();
        // x1 = 1 (bit 0), x2 = 0 (bit 1)
        assert_eq!(zeros, vec![0b01]);

        let c = Constraint::clause(&[1, 2, 3], 1.0).unwrap();
        assert_eq!(c.truth_table().count_ones(), 7);
        assert!(!c.truth_table().get(0));
        assert_eq!(c.clause_literals().unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn bad_clauses() {
        assert!(Constraint::<f64>::clause(&[], 1.0).is_err());
        assert!(Constraint::<f64>::clause(&[1, 1], 1.0).is_err());
        assert!(Constraint::<f64>::clause(&[1, -1], 1.0).is_err());
        assert!(Constraint::<f64>::clause(&[1], 0.0).is_err());
        assert!(Constraint::<f64>::clause(&[1], -1.0).is_err());
        assert!(Constraint::<f64>::clause(&[1], f64::NAN).is_err());
        let wide: Vec<i64> = (1..=21).collect();
        assert!(Constraint::<f64>::clause(&wide, 1.0).is_err());
    }

    #[test]
    fn bad_constraints() {
        assert!(Constraint::new(1.0, &[1, 2], "011".parse().unwrap()).is_err());
        assert!(Constraint::new(1.0, &[1, 1], "0110".parse().unwrap()).is_err());
        assert!(Constraint::new(1.0, &[0], "01".parse().unwrap()).is_err());
        let c = Constraint::new(1.0, &[3], "01".parse().unwrap()).unwrap();
        assert!(matches!(
            CspInstance::new(2, vec![c]),
            Err(Error::IndexOutOfRange {
                index: 3,
                num_vars: 2
            })
        ));
        assert!(CspInstance::<f64>::new(2, vec![]).is_err());
    }

    #[test]
    fn histogram_and_lower_bound() {
        let inst =
            CspInstance::from_clauses(3, &[(vec![1], 1.0), (vec![-2], 1.0), (vec![1, 2, 3], 1.0)])
                .unwrap();
        let hist = inst.clause_length_histogram().unwrap();
        assert_eq!(hist, BTreeMap::from([(1, 2), (3, 1)]));
        assert_eq!(inst.clause_lower_bound().unwrap(), 1.875);

        let e3: Vec<(Vec<i64>, f64)> = (0..5).map(|_| (vec![1, -2, 3], 1.0)).collect();
        let inst = CspInstance::from_clauses(3, &e3).unwrap();
        assert_eq!(
            inst.clause_length_histogram().unwrap(),
            BTreeMap::from([(3, 5)])
        );
    }

    #[test]
    fn histogram_needs_clauses() {
        let c = Constraint::new(1.0, &[1, 2], "0110".parse().unwrap()).unwrap();
        let inst = CspInstance::new(2, vec![c]).unwrap();
        assert!(matches!(
            inst.clause_length_histogram(),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn works_in_f32() {
        let inst =
            CspInstance::<f32>::from_clauses(2, &[(vec![1, 2], 0.5f32), (vec![-1], 0.25)]).unwrap();
        assert_eq!(inst.total_weight(), 0.75);
        assert_eq!(inst.weight_of(&"10".parse().unwrap()).unwrap(), 0.5);
    }

    fn arb_clause_instance() -> impl Strategy<Value = CspInstance<f64>> {
        (1usize..8)
            .prop_flat_map(|n| {
                let clause = (1usize..=n.min(4)).prop_flat_map(move |a| {
                    (
                        Just(()).prop_perturb(move |_, mut rng| {
                            let vars = rand::seq::index::sample(&mut rng, n, a).into_vec();
                            vars.into_iter()
                                .map(|v| {
                                    let lit = v as i64 + 1;
                                    if rng.random_bool(0.5) {
                                        -lit
                                    } else {
                                        lit
                                    }
                                })
                                .collect::<Vec<i64>>()
                        }),
                        0.01f64..10.0,
                    )
                });
                (Just(n), prop::collection::vec(clause, 1..12))
            })
            .prop_map(|(n, clauses)| CspInstance::from_clauses(n, &clauses).unwrap())
    }

    proptest! {
        #[test]
        fn contribution_identity(inst in arb_clause_instance()) {
            let by_var: f64 = (1..=inst.num_vars()).map(|i| inst.contribution(i).unwrap()).sum();
            let l = inst.weighted_length();
            prop_assert!((by_var - l).abs() <= 1e-12 * l.max(1.0));
            prop_assert!(l >= inst.total_weight());
        }

        #[test]
        fn weight_within_bounds(inst in arb_clause_instance(), seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let z = Assignment::from_bits((0..inst.num_vars()).map(|_| rng.random()).collect());
            let wz = inst.weight_of(&z).unwrap();
            prop_assert!(wz >= 0.0 && wz <= inst.total_weight());
        }

        #[test]
        fn clause_table_matches_disjunction(
            lits in prop::sample::subsequence((1i64..=6).collect::<Vec<_>>(), 1..=6),
            signs in prop::collection::vec(any::<bool>(), 6),
        ) {
            let lits: Vec<i64> = lits.iter().zip(&signs).map(|(&v, &s)| if s { -v } else { v }).collect();
            let c = Constraint::clause(&lits, 1.0f64).unwrap();
            for row in 0..(1usize << lits.len()) {
                let disj = lits.iter().enumerate().any(|(j, &l)| {
                    let val = (row >> j) & 1 == 1;
                    if l > 0 { val } else { !val }
                });
                prop_assert_eq!(c.truth_table().get(row), disj);
            }
            prop_assert_eq!(c.clause_literals().unwrap(), lits);
        }
    }
}
