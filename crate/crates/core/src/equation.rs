//! The equation `a₁x₁ + … + aₙxₙ = b` and the brute-force counting oracle.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::combinatorics::{gcd_all, lcm_all, BigCount};
use crate::error::{Error, Result};

/// Largest argument a table-based method (oracle, flat recurrence) will materialize.
pub const DEFAULT_TABLE_GUARD: u64 = 10_000_000;

/// Environment variable overriding [`DEFAULT_TABLE_GUARD`].
pub const GUARD_ENV: &str = "DENUMERANT_ORACLE_GUARD";

/// The active table guard: `DENUMERANT_ORACLE_GUARD` if set to a decimal integer,
/// otherwise [`DEFAULT_TABLE_GUARD`].
pub fn table_guard() -> u64 {
    std::env::var(GUARD_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_TABLE_GUARD)
}

/// Returns `b` as a table index, or a resource-limit error when `b > guard`.
pub(crate) fn guarded_index(b: &BigUint, guard: u64) -> Result<usize> {
    match b.to_u64() {
        Some(v) if v <= guard => Ok(v as usize),
        _ => Err(Error::ResourceLimit {
            value: b.to_string(),
            guard,
        }),
    }
}

/// Positive coefficients `a₁…aₙ` together with their lcm `M`, sum `A` and gcd `g`.
///
/// Coefficients keep the caller's order; duplicates are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Equation {
    coeffs: Vec<u64>,
    lcm: u64,
    sum: u64,
    gcd: u64,
}

impl Equation {
    pub fn new(coeffs: Vec<u64>) -> Result<Self> {
        let lcm = lcm_all(&coeffs)?;
        let gcd = gcd_all(&coeffs)?;
        let sum = coeffs
            .iter()
            .try_fold(0u64, |s, &a| s.checked_add(a))
            .ok_or_else(|| Error::InvalidInput("sum of the coefficients exceeds 64 bits".into()))?;
        Ok(Equation {
            coeffs,
            lcm,
            sum,
            gcd,
        })
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    /// `M`, the least common multiple of the coefficients.
    pub fn lcm(&self) -> u64 {
        self.lcm
    }

    /// `A = a₁ + … + aₙ`.
    pub fn sum(&self) -> u64 {
        self.sum
    }

    pub fn gcd(&self) -> u64 {
        self.gcd
    }

    pub fn is_coprime(&self) -> bool {
        self.gcd == 1
    }

    /// `a₁a₂…aₙ`.
    pub fn product(&self) -> BigUint {
        self.coeffs.iter().map(|&a| BigUint::from(a)).product()
    }

    /// Remainder of `b` modulo `M`.
    pub fn residue(&self, b: &BigUint) -> Residue {
        let r = (b % self.lcm)
            .to_u64()
            .expect("remainder below a u64 modulus");
        Residue(r)
    }

    /// Checked residue constructor: fails unless `r < M`.
    pub fn residue_of(&self, r: u64) -> Result<Residue> {
        if r < self.lcm {
            Ok(Residue(r))
        } else {
            Err(Error::InvalidInput(format!(
                "residue {r} out of range 0..{}",
                self.lcm
            )))
        }
    }

    /// The equation with every coefficient divided by `g`.
    pub fn reduced(&self) -> Equation {
        if self.gcd == 1 {
            return self.clone();
        }
        Equation::new(self.coeffs.iter().map(|a| a / self.gcd).collect())
            .expect("dividing by the gcd keeps coefficients positive")
    }

    /// `Some(b / g)` when `g | b`, else `None` (and then `P(b) = 0`).
    pub fn reduce_argument(&self, b: &BigUint) -> Option<BigUint> {
        let (q, rem) = b.div_rem(&BigUint::from(self.gcd));
        rem.is_zero().then_some(q)
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{a}·x{}", i + 1)?;
        }
        f.write_str(" = b")
    }
}

/// A remainder modulo the lcm `M` of some equation; always `< M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Residue(pub(crate) u64);

impl Residue {
    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The coin-change table `P(0), …, P(b_max)`: start from `[1, 0, 0, …]` and, for each
/// coefficient `a`, add `table[t - a]` into `table[t]` in increasing `t`.
pub fn oracle_table(eq: &Equation, b_max: usize) -> Vec<BigUint> {
    let mut table = vec![BigUint::zero(); b_max + 1];
    table[0] = BigUint::from(1u8);
    for &a in eq.coeffs() {
        let a = a as usize;
        for t in a..=b_max {
            let (lo, hi) = table.split_at_mut(t);
            hi[0] += &lo[t - a];
        }
    }
    table
}

/// Brute-force `P(b)` with the active [`table_guard`].
pub fn count_oracle(eq: &Equation, b: &BigUint) -> Result<BigCount> {
    count_oracle_with_guard(eq, b, table_guard())
}

pub fn count_oracle_with_guard(eq: &Equation, b: &BigUint, guard: u64) -> Result<BigCount> {
    let b = guarded_index(b, guard)?;
    let mut table = oracle_table(eq, b);
    Ok(BigCount::from(table.swap_remove(b)))
}
