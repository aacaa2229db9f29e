//! Recurrences for the unbounded count `P(b)`.
//!
//! * Flat: `Σ_{k=0}^{A−n} l'ₖ · P(b − k) = C(b + n − 1, n − 1)`, where `l'ₖ` counts the
//!   vectors with `0 ≤ tᵢ < aᵢ` and `Σ tᵢ = k`. Solving for the `k = 0` term gives
//!   `P(b)` from the previous `A − n` values.
//! * Decimation: `P(b) = Σ_{k=0}^{s*} l*ₖ · P(⌊b/m⌋ − k)` where `l*ₖ` counts the vectors
//!   with `0 ≤ tᵢ < m` and `Σ aᵢtᵢ = (b mod m) + k·m`. Each step divides the argument
//!   by `m`, so a query touches `O(log_m b)` levels.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::bounded::box_counts;
use crate::combinatorics::{alternating_subset_sums, compositions_row, BigCount};
use crate::equation::{guarded_index, table_guard, Equation};
use crate::error::{Error, Result};

/// Weights `l'₀ … l'_{A−n}` of the flat recurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatRecurrenceCoeffs {
    lprime: Vec<BigInt>,
}

impl FlatRecurrenceCoeffs {
    pub fn values(&self) -> &[BigInt] {
        &self.lprime
    }

    pub fn is_palindromic(&self) -> bool {
        self.lprime.iter().eq(self.lprime.iter().rev())
    }
}

/// `l'ₖ = Σ_{S ⊆ {1..n}} (-1)^|S| · C̄(n − 1 + k − Σ_{i∈S} aᵢ, n − 1)` for `k = 0..=A−n`.
pub fn lprime_coeffs(eq: &Equation) -> FlatRecurrenceCoeffs {
    let len = (eq.sum() - eq.n() as u64 + 1) as usize;
    let n1 = eq.n() as u64 - 1;
    // C(j + n - 1, n - 1) for j = 0..len; negative j contribute 0.
    let row = compositions_row(n1, len);
    let parts: Vec<u128> = eq.coeffs().iter().map(|&a| a as u128).collect();
    let signs = alternating_subset_sums(&parts);
    let lprime = (0..len)
        .map(|k| {
            signs
                .iter()
                .take_while(|(shift, _)| *shift <= k as u128)
                .map(|(shift, w)| {
                    w * BigInt::from_biguint(Sign::Plus, row[k - *shift as usize].clone())
                })
                .sum()
        })
        .collect();
    FlatRecurrenceCoeffs { lprime }
}

/// Returns the first `b` in `table` for which `Σ l'ₖ · table[b − k] ≠ C(b + n − 1, n − 1)`.
pub fn flat_identity_violation(eq: &Equation, table: &[BigUint]) -> Option<usize> {
    let lprime = lprime_coeffs(eq);
    let binoms = compositions_row(eq.n() as u64 - 1, table.len());
    (0..table.len()).find(|&b| {
        let lhs: BigInt = lprime
            .values()
            .iter()
            .enumerate()
            .take(b + 1)
            .map(|(k, l)| l * BigInt::from_biguint(Sign::Plus, table[b - k].clone()))
            .sum();
        lhs != BigInt::from_biguint(Sign::Plus, binoms[b].clone())
    })
}

/// A growable table `P(0), P(1), …` filled by the flat recurrence.
#[derive(Clone, Debug)]
pub struct FlatTable {
    eq: Equation,
    lprime: Vec<BigInt>,
    values: Vec<BigUint>,
    /// `C(t + n − 1, n − 1)` for the next `t = values.len()`.
    next_binom: BigUint,
}

impl FlatTable {
    pub fn new(eq: &Equation) -> Self {
        FlatTable {
            eq: eq.clone(),
            lprime: lprime_coeffs(eq).lprime,
            values: Vec::new(),
            next_binom: BigUint::one(),
        }
    }

    /// Starts from previously computed values `P(0), …, P(B)`. Every seeded value is
    /// checked against the recurrence; a mismatch is reported as invalid input.
    pub fn with_seed(eq: &Equation, seed: Vec<BigUint>) -> Result<Self> {
        let mut table = FlatTable::new(eq);
        table.extend_to(seed.len().saturating_sub(1));
        if seed.is_empty() {
            table.values.clear();
            table.next_binom = BigUint::one();
        }
        if let Some(b) = table.values.iter().zip(&seed).position(|(x, y)| x != y) {
            return Err(Error::InvalidInput(format!(
                "seeded value P({b}) = {} disagrees with the recurrence",
                seed[b]
            )));
        }
        Ok(table)
    }

    pub fn eq(&self) -> &Equation {
        &self.eq
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    pub fn extend_to(&mut self, b: usize) {
        let n1 = self.eq.n() as u64 - 1;
        self.values
            .reserve((b + 1).saturating_sub(self.values.len()));
        while self.values.len() <= b {
            let t = self.values.len();
            let mut acc = BigInt::from_biguint(Sign::Plus, self.next_binom.clone());
            for (k, l) in self.lprime.iter().enumerate().skip(1).take(t) {
                acc -= l * BigInt::from_biguint(Sign::Plus, self.values[t - k].clone());
            }
            let value = acc
                .to_biguint()
                .expect("flat recurrence produced a negative count");
            self.values.push(value);
            let t = t as u64 + 1;
            self.next_binom = &self.next_binom * BigUint::from(t + n1) / BigUint::from(t);
        }
    }

    pub fn get(&mut self, b: usize) -> &BigUint {
        self.extend_to(b);
        &self.values[b]
    }
}

/// `P(b)` by the flat recurrence, materializing `P(0..=b)` (subject to the table guard).
pub fn count_flat(eq: &Equation, b: &BigUint) -> Result<BigCount> {
    count_flat_with_guard(eq, b, table_guard())
}

pub fn count_flat_with_guard(eq: &Equation, b: &BigUint, guard: u64) -> Result<BigCount> {
    let Some(b) = eq.reduce_argument(b) else {
        return Ok(BigCount::zero());
    };
    let idx = guarded_index(&b, guard)?;
    let mut table = FlatTable::new(&eq.reduced());
    Ok(BigCount::from(table.get(idx).clone()))
}

/// Per-residue weights `l*ₖ` of the base-`m` decimation recurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecimationCoeffs {
    m: u64,
    rows: Vec<Vec<BigUint>>,
}

impl DecimationCoeffs {
    pub fn m(&self) -> u64 {
        self.m
    }

    /// `l*₀ … l*_{s*}` for residue `r` of the argument modulo `m`.
    pub fn row(&self, r: u64) -> &[BigUint] {
        &self.rows[r as usize]
    }

    pub fn rows(&self) -> &[Vec<BigUint>] {
        &self.rows
    }
}

/// `s* = ⌊((m − 1)A − r) / m⌋`.
pub fn decimation_span(eq: &Equation, m: u64, r: u64) -> u64 {
    ((m - 1) * eq.sum() - r) / m
}

pub fn decimation_coeffs(eq: &Equation, m: u64) -> Result<DecimationCoeffs> {
    if m < 2 {
        return Err(Error::InvalidInput(format!(
            "decimation base must be at least 2, got {m}"
        )));
    }
    let counts = box_counts(eq, m);
    let rows = (0..m)
        .map(|r| {
            (0..=decimation_span(eq, m, r))
                .map(|k| counts[(r + k * m) as usize].clone())
                .collect()
        })
        .collect();
    Ok(DecimationCoeffs { m, rows })
}

/// Query context for the decimation recurrence. Answers any number of `P(b)` queries
/// on one equation, sharing the memo table between them.
#[derive(Debug)]
pub struct Decimator {
    source: Equation,
    coeffs: DecimationCoeffs,
    base_limit: u64,
    base: FlatTable,
    memo: HashMap<BigUint, BigUint>,
}

impl Decimator {
    pub fn new(eq: &Equation, m: u64) -> Result<Self> {
        let reduced = eq.reduced();
        let coeffs = decimation_coeffs(&reduced, m)?;
        let base_limit = reduced
            .sum()
            .saturating_mul(reduced.sum())
            .max(1_000)
            .min(table_guard());
        Ok(Decimator {
            source: eq.clone(),
            coeffs,
            base_limit,
            base: FlatTable::new(&reduced),
            memo: HashMap::new(),
        })
    }

    pub fn count(&mut self, b: &BigUint) -> BigCount {
        match self.source.reduce_argument(b) {
            Some(b) => BigCount::from(self.eval(&b)),
            None => BigCount::zero(),
        }
    }

    fn eval(&mut self, b: &BigUint) -> BigUint {
        if let Some(small) = b.to_u64().filter(|&v| v <= self.base_limit) {
            return self.base.get(small as usize).clone();
        }
        if let Some(v) = self.memo.get(b) {
            return v.clone();
        }
        let (quot, r) = b.div_rem(&BigUint::from(self.coeffs.m));
        let r = r.to_u64().expect("remainder below m");
        let row = self.coeffs.row(r).to_vec();
        let mut total = BigUint::zero();
        for (k, weight) in row.iter().enumerate() {
            if weight.is_zero() {
                continue;
            }
            let k = BigUint::from(k);
            if k > quot {
                break;
            }
            total += weight * self.eval(&(&quot - k));
        }
        self.memo.insert(b.clone(), total.clone());
        total
    }
}

/// `P(b)` by base-`m` decimation; the result does not depend on `m`.
pub fn count_decimated(eq: &Equation, b: &BigUint, m: u64) -> Result<BigCount> {
    Ok(Decimator::new(eq, m)?.count(b))
}
