//! Solutions with box constraints `0 ≤ xᵢ ≤ dᵢ − 1`.
//!
//! [`bounded_count`] reduces the box-bounded count to unbounded counts by
//! inclusion–exclusion over the "overflowing" variables:
//!
//! ```text
//! P'(b) = Σ_{β ∈ {0,1}ⁿ} (-1)^|β| · P(b − Σ βᵢ aᵢ dᵢ),   P(negative) = 0
//! ```
//!
//! [`pstar_table`] is the special case `dᵢ = 2` (0/1 variables) computed instead by
//! adding one coefficient at a time: `P*ₙ(d) = P*ₙ₋₁(d) + P*ₙ₋₁(d − aₙ)`.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};

use crate::combinatorics::{alternating_subset_sums, BigCount};
use crate::equation::{oracle_table, Equation};
use crate::error::{Error, Result};
use crate::recurrences::Decimator;

/// Inclusion–exclusion walks every subset of the variables.
pub const MAX_BOUNDED_VARIABLES: usize = 30;

/// Arguments up to this size take the unbounded count from the oracle table.
const ORACLE_THRESHOLD: u64 = 10_000;

/// An equation whose `i`-th variable ranges over `0..bounds[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedSystem {
    eq: Equation,
    bounds: Vec<u64>,
}

impl BoundedSystem {
    pub fn new(eq: Equation, bounds: Vec<u64>) -> Result<Self> {
        if bounds.len() != eq.n() {
            return Err(Error::InvalidInput(format!(
                "{} bounds given for {} coefficients",
                bounds.len(),
                eq.n()
            )));
        }
        if bounds.contains(&0) {
            return Err(Error::InvalidInput("bounds must be positive".into()));
        }
        Ok(BoundedSystem { eq, bounds })
    }

    /// Every variable restricted to `0..bound`.
    pub fn uniform(eq: Equation, bound: u64) -> Result<Self> {
        let n = eq.n();
        Self::new(eq, vec![bound; n])
    }

    pub fn eq(&self) -> &Equation {
        &self.eq
    }

    pub fn bounds(&self) -> &[u64] {
        &self.bounds
    }

    /// Largest reachable right-hand side, `Σ aᵢ(dᵢ − 1)`.
    pub fn max_sum(&self) -> u128 {
        self.eq
            .coeffs()
            .iter()
            .zip(&self.bounds)
            .map(|(&a, &d)| a as u128 * (d as u128 - 1))
            .sum()
    }
}

/// Number of solutions of `Σ aᵢxᵢ = b` with `0 ≤ xᵢ < dᵢ`, by inclusion–exclusion over
/// unbounded counts.
pub fn bounded_count(sys: &BoundedSystem, b: &BigUint) -> Result<BigCount> {
    if sys.eq.n() > MAX_BOUNDED_VARIABLES {
        return Err(Error::InvalidInput(format!(
            "inclusion-exclusion supports at most {MAX_BOUNDED_VARIABLES} variables"
        )));
    }
    if b > &BigUint::from(sys.max_sum()) {
        return Ok(BigCount::zero());
    }
    let parts: Vec<u128> = sys
        .eq
        .coeffs()
        .iter()
        .zip(&sys.bounds)
        .map(|(&a, &d)| a as u128 * d as u128)
        .collect();
    let terms: Vec<(BigUint, BigInt)> = alternating_subset_sums(&parts)
        .into_iter()
        .filter_map(|(shift, w)| {
            let shift = BigUint::from(shift);
            (shift <= *b).then(|| (b - shift, w))
        })
        .collect();

    let mut total = BigInt::zero();
    match b.to_u64().filter(|&v| v <= ORACLE_THRESHOLD) {
        Some(small) => {
            let table = oracle_table(&sys.eq, small as usize);
            for (arg, w) in terms {
                let idx = arg.to_usize().expect("argument below b");
                total += w * BigInt::from_biguint(Sign::Plus, table[idx].clone());
            }
        }
        None => {
            let mut unbounded = Decimator::new(&sys.eq, 2)?;
            for (arg, w) in terms {
                total += w * unbounded.count(&arg).to_bigint();
            }
        }
    }
    BigCount::from_signed(total)
}

/// Counts for every target `0..=(bound − 1)·A` of `Σ aᵢtᵢ = target` with
/// `0 ≤ tᵢ < bound`, built one coefficient at a time.
pub(crate) fn box_counts(eq: &Equation, bound: u64) -> Vec<BigUint> {
    let top = ((bound - 1) * eq.sum()) as usize;
    let mut row = vec![BigUint::zero(); top + 1];
    row[0] = BigUint::from(1u8);
    let mut reach = 0usize;
    for &a in eq.coeffs() {
        let a = a as usize;
        let span = a * (bound as usize);
        reach += a * (bound as usize - 1);
        let mut next = vec![BigUint::zero(); top + 1];
        // next[d] = Σ_{t<bound} row[d - t·a] = row[d] + next[d - a] - row[d - bound·a]
        for d in 0..=reach {
            let mut v = row[d].clone();
            if d >= a {
                v += &next[d - a];
            }
            if d >= span {
                v -= &row[d - span];
            }
            next[d] = v;
        }
        row = next;
    }
    row
}

/// `P*(0), …, P*(A)`: the number of 0/1 vectors `t` with `Σ aᵢtᵢ = d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PStarTable {
    values: Vec<BigUint>,
}

impl PStarTable {
    /// `P*(d)`; zero outside `0..=A`.
    pub fn get(&self, d: i64) -> BigCount {
        usize::try_from(d)
            .ok()
            .and_then(|i| self.values.get(i))
            .map(|v| BigCount::from(v.clone()))
            .unwrap_or_default()
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }
}

pub fn pstar_table(eq: &Equation) -> PStarTable {
    let total = eq.sum() as usize;
    let mut row = vec![BigUint::zero(); total + 1];
    row[0] = BigUint::from(1u8);
    let mut prefix_sum = 0usize;
    for &a in eq.coeffs() {
        let a = a as usize;
        prefix_sum += a;
        // descending d so row[d - a] is still the previous prefix's value
        for d in (a..=prefix_sum).rev() {
            let (lo, hi) = row.split_at_mut(d);
            hi[0] += &lo[d - a];
        }
    }
    PStarTable { values: row }
}

/// Single value of [`pstar_table`].
pub fn pstar(eq: &Equation, d: i64) -> BigCount {
    if d < 0 || d as u64 > eq.sum() {
        return BigCount::zero();
    }
    pstar_table(eq).get(d)
}
