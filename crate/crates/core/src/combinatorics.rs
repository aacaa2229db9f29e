//! Arbitrary-precision helpers: gcd/lcm of coefficient vectors, binomials, and the
//! non-negative count type.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A non-negative, unbounded count.
///
/// Signed intermediate sums are carried as [`BigInt`] and converted with
/// [`BigCount::from_signed`], which rejects negative values.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigCount(BigUint);

impl BigCount {
    pub fn zero() -> Self {
        BigCount(BigUint::zero())
    }

    pub fn one() -> Self {
        BigCount(BigUint::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn into_biguint(self) -> BigUint {
        self.0
    }

    pub fn to_bigint(&self) -> BigInt {
        BigInt::from_biguint(Sign::Plus, self.0.clone())
    }

    /// Converts a signed accumulator into a count. A negative value means an
    /// alternating sum went wrong, so it is reported as an internal error.
    pub fn from_signed(value: BigInt) -> Result<Self> {
        value
            .to_biguint()
            .map(BigCount)
            .ok_or_else(|| Error::Internal(format!("negative count {value}")))
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        BigCount(v)
    }
}

impl From<BigCount> for BigUint {
    fn from(v: BigCount) -> Self {
        v.0
    }
}

impl PartialEq<u64> for BigCount {
    fn eq(&self, other: &u64) -> bool {
        self.0.to_u64() == Some(*other)
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for BigCount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BigUint::from_str(s.trim())
            .map(BigCount)
            .map_err(|_| Error::InvalidInput(format!("not a non-negative integer: {s:?}")))
    }
}

impl Add for BigCount {
    type Output = BigCount;
    fn add(self, rhs: BigCount) -> BigCount {
        BigCount(self.0 + rhs.0)
    }
}

impl AddAssign<&BigCount> for BigCount {
    fn add_assign(&mut self, rhs: &BigCount) {
        self.0 += &rhs.0;
    }
}

impl Mul<&BigCount> for &BigCount {
    type Output = BigCount;
    fn mul(self, rhs: &BigCount) -> BigCount {
        BigCount(&self.0 * &rhs.0)
    }
}

impl std::iter::Sum for BigCount {
    fn sum<I: Iterator<Item = BigCount>>(iter: I) -> BigCount {
        iter.fold(BigCount::zero(), |acc, x| acc + x)
    }
}

fn check_coeffs(coeffs: &[u64]) -> Result<()> {
    if coeffs.is_empty() {
        return Err(Error::InvalidInput("coefficient list is empty".into()));
    }
    if coeffs.contains(&0) {
        return Err(Error::InvalidInput("coefficients must be positive".into()));
    }
    Ok(())
}

/// Greatest common divisor of a non-empty list of positive integers.
pub fn gcd_all(coeffs: &[u64]) -> Result<u64> {
    check_coeffs(coeffs)?;
    Ok(coeffs.iter().fold(0u64, |g, &a| g.gcd(&a)))
}

/// Least common multiple of a non-empty list of positive integers.
///
/// Fails with [`Error::InvalidInput`] if the result does not fit in 64 bits.
pub fn lcm_all(coeffs: &[u64]) -> Result<u64> {
    check_coeffs(coeffs)?;
    coeffs.iter().try_fold(1u64, |acc, &a| {
        (acc / acc.gcd(&a))
            .checked_mul(a)
            .ok_or_else(|| Error::InvalidInput("lcm of the coefficients exceeds 64 bits".into()))
    })
}

/// `C(k, m)` for `k ≥ m ≥ 0`, computed as a running product with an exact division
/// at every step, so no factorial larger than the result is ever formed.
pub fn binomial(k: &BigUint, m: u64) -> Result<BigCount> {
    let m_big = BigUint::from(m);
    if &m_big > k {
        return Err(Error::InvalidInput(format!(
            "binomial C({k}, {m}) needs k >= m"
        )));
    }
    // C(k, m) = C(k, k - m); only worth it when k - m is the smaller one.
    let rest = k - &m_big;
    let steps = match rest.to_u64() {
        Some(r) if r < m => r,
        _ => m,
    };
    let base = k - BigUint::from(steps);
    let mut acc = BigUint::one();
    for i in 1..=steps {
        acc *= &base + BigUint::from(i);
        acc /= BigUint::from(i);
    }
    Ok(BigCount(acc))
}

/// `C(k, m)` when `k ≥ m`, and 0 otherwise (including every negative `k`).
pub fn barred_binomial(k: &BigInt, m: u64) -> BigCount {
    match k.to_biguint() {
        Some(k) if k >= BigUint::from(m) => binomial(&k, m).expect("k >= m checked"),
        _ => BigCount::zero(),
    }
}

/// `C(t + d, d)` for `t = 0..len`: the number of ways to write `t` as an ordered sum
/// of `d + 1` non-negative parts.
pub(crate) fn compositions_row(d: u64, len: usize) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(len);
    let mut cur = BigUint::one();
    for t in 0..len as u64 {
        if t > 0 {
            cur = cur * BigUint::from(t + d) / BigUint::from(t);
        }
        row.push(cur.clone());
    }
    row
}

/// Groups the terms `(-1)^|S|` over all subsets `S` of `parts` by the subset sum
/// `Σ_{i∈S} parts[i]`. Zero-weight sums are dropped.
///
/// This is the sign pattern of every inclusion–exclusion sum in the crate; merging
/// equal shifts keeps the work proportional to the number of distinct sums rather
/// than `2ⁿ`.
pub(crate) fn alternating_subset_sums(parts: &[u128]) -> Vec<(u128, BigInt)> {
    let mut acc: BTreeMap<u128, BigInt> = BTreeMap::new();
    acc.insert(0, BigInt::one());
    for &p in parts {
        let mut next = acc.clone();
        for (sum, w) in &acc {
            let e = next.entry(sum + p).or_insert_with(BigInt::zero);
            *e -= w;
        }
        next.retain(|_, w| !w.is_zero());
        acc = next;
    }
    acc.into_iter().collect()
}
