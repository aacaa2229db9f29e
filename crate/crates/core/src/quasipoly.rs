//! The quasi-polynomial form of `P(b)`.
//!
//! For every residue `r = b mod M` there are integers `l₀ … l_s` such that
//!
//! ```text
//! P(b) = Σ_{k=0}^{s} lₖ · C̄(⌊b/M⌋ + n − 1 − k, n − 1),   s = ⌊n − (A + r)/M⌋
//! lₖ   = Σ_{j=0}^{k} (-1)^j · C(n, j) · P(r + (k − j)M)
//! ```
//!
//! so once the `s + 1 ≤ n` base values `P(r), P(r + M), …` are known, any `P(b)` in
//! that residue class costs `O(n)` big-integer operations regardless of the size of
//! `b`. Expanding the binomials gives a degree `n − 1` polynomial in `⌊b/M⌋`
//! ([`PolynomialForm`]).
//!
//! Equations with `g = gcd(aᵢ) > 1` are reduced first: `P(b) = 0` unless `g | b`, and
//! then `P(b)` equals the count for `aᵢ/g` at `b/g`. Residues, `M` and `s` of a
//! [`QuasiPolynomial`] refer to the reduced equation.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::combinatorics::{barred_binomial, binomial, BigCount};
use crate::equation::{table_guard, Equation, Residue};
use crate::error::{Error, Result};
use crate::recurrences::{Decimator, FlatTable};

/// `s = ⌊n − (A + r)/M⌋`, never negative.
pub fn s_of_residue(eq: &Equation, r: Residue) -> u64 {
    let m = eq.lcm() as i128;
    let num = eq.n() as i128 * m - eq.sum() as i128 - r.value() as i128;
    Integer::div_floor(&num, &m).max(0) as u64
}

/// Source of exact base values `P(t)` for one equation.
enum BaseValues {
    Table(FlatTable),
    Recursive(Decimator),
}

impl BaseValues {
    fn for_max(eq: &Equation, max: &BigUint) -> Result<Self> {
        Ok(match max.to_u64().filter(|&v| v <= table_guard()) {
            Some(_) => BaseValues::Table(FlatTable::new(eq)),
            None => BaseValues::Recursive(Decimator::new(eq, 2)?),
        })
    }

    fn get(&mut self, t: &BigUint) -> BigUint {
        match self {
            BaseValues::Table(table) => table.get(t.to_usize().expect("checked size")).clone(),
            BaseValues::Recursive(dec) => dec.count(t).into_biguint(),
        }
    }
}

/// `M^{n−1} / (a₁⋯aₙ)`, or `None` when the division is not exact.
fn lattice_scalar(eq: &Equation) -> Option<BigUint> {
    let top = BigUint::from(eq.lcm()).pow(eq.n() as u32 - 1);
    let (q, rem) = top.div_rem(&eq.product());
    rem.is_zero().then_some(q)
}

fn to_signed(v: &BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, v.clone())
}

/// Coefficients `l₀ … l_s` for one residue class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResiduePlan {
    r: Residue,
    s: u64,
    l: Vec<BigInt>,
}

impl ResiduePlan {
    pub fn residue(&self) -> Residue {
        self.r
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn l(&self) -> &[BigInt] {
        &self.l
    }

    /// `Σ lₖ · C̄(q + n − 1 − k, n − 1)` for `q = ⌊b/M⌋`.
    pub fn evaluate(&self, n: usize, q: &BigUint) -> Result<BigCount> {
        let n1 = n as u64 - 1;
        let top = BigInt::from_biguint(Sign::Plus, q.clone()) + BigInt::from(n1);
        let total: BigInt = self
            .l
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.is_zero())
            .map(|(k, l)| l * barred_binomial(&(&top - k), n1).to_bigint())
            .sum();
        BigCount::from_signed(total)
    }

    /// Builds the plan for residue `r` of a coprime equation, taking base values from
    /// `base`. The coefficient-sum identities are checked before returning.
    fn build(eq: &Equation, r: Residue, base: &mut BaseValues) -> Result<Self> {
        let n = eq.n() as u64;
        let s = s_of_residue(eq, r);
        if s > n - 1 {
            return Err(Error::Internal(format!(
                "s = {s} exceeds n - 1 for r = {r}"
            )));
        }
        let m = BigUint::from(eq.lcm());
        let values: Vec<BigInt> = (0..=s)
            .map(|k| to_signed(&base.get(&(BigUint::from(r.value()) + &m * k))))
            .collect();
        let choose_n: Vec<BigInt> = (0..=s)
            .map(|j| {
                binomial(&BigUint::from(n), j)
                    .expect("j <= s < n")
                    .to_bigint()
            })
            .collect();
        let l: Vec<BigInt> = (0..=s as usize)
            .map(|k| {
                (0..=k)
                    .map(|j| {
                        let term = &choose_n[j] * &values[k - j];
                        if j % 2 == 0 {
                            term
                        } else {
                            -term
                        }
                    })
                    .sum()
            })
            .collect();
        let plan = ResiduePlan { r, s, l };
        plan.check_identities(eq, &values)?;
        Ok(plan)
    }

    fn check_identities(&self, eq: &Equation, values: &[BigInt]) -> Result<()> {
        if self.l[0].is_negative() {
            return Err(Error::Internal(format!("l0 < 0 for r = {}", self.r)));
        }
        let scalar = lattice_scalar(eq)
            .ok_or_else(|| Error::Internal(format!("{} does not divide M^(n-1)", eq.product())))?;
        let scalar = to_signed(&scalar);
        let sum: BigInt = self.l.iter().sum();
        if sum != scalar {
            return Err(Error::Internal(format!(
                "sum of l for r = {} is {sum}, expected {scalar}",
                self.r
            )));
        }
        // P(r + sM) − C(n−1,1)P(r + (s−1)M) + … + (−1)^s C(n−1,s)P(r)
        let n1 = BigUint::from(eq.n() as u64 - 1);
        let s = self.s as usize;
        let alternating: BigInt = (0..=s)
            .map(|j| {
                let c = binomial(&n1, j as u64)
                    .expect("j <= s <= n - 1")
                    .to_bigint();
                let term = c * &values[s - j];
                if j % 2 == 0 {
                    term
                } else {
                    -term
                }
            })
            .sum();
        if alternating != scalar {
            return Err(Error::Internal(format!(
                "alternating base-value sum for r = {} is {alternating}, expected {scalar}",
                self.r
            )));
        }
        Ok(())
    }
}

/// One [`ResiduePlan`] per residue class of the reduced equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiPolynomial {
    source: Equation,
    reduced: Equation,
    plans: Vec<ResiduePlan>,
}

impl QuasiPolynomial {
    pub fn source(&self) -> &Equation {
        &self.source
    }

    /// The coprime equation the plans are built for.
    pub fn reduced(&self) -> &Equation {
        &self.reduced
    }

    pub fn plans(&self) -> &[ResiduePlan] {
        &self.plans
    }

    pub fn plan(&self, r: Residue) -> &ResiduePlan {
        &self.plans[r.value() as usize]
    }

    /// Residue of the reduced equation, checked against its `M`.
    pub fn residue_of(&self, r: u64) -> Result<Residue> {
        self.reduced.residue_of(r)
    }
}

/// Builds the full table of `M` plans.
///
/// Materializes `P(0), …, P(max(n, 3)·M)` with the flat recurrence, so `M·n` must
/// stay within the table guard. The table also serves as a self-check: the built
/// quasi-polynomial must reproduce it for every `b ≤ 3M`.
pub fn build_quasipoly(eq: &Equation) -> Result<QuasiPolynomial> {
    let reduced = eq.reduced();
    let m = reduced.lcm();
    let span = (reduced.n() as u64).max(3).checked_mul(m);
    let guard = table_guard();
    let span = match span {
        Some(v) if v <= guard => v as usize,
        _ => {
            return Err(Error::ResourceLimit {
                value: format!("{}·{m}", reduced.n().max(3)),
                guard,
            })
        }
    };
    let mut base = BaseValues::Table(FlatTable::new(&reduced));
    let plans = (0..m)
        .map(|r| ResiduePlan::build(&reduced, Residue(r), &mut base))
        .collect::<Result<Vec<_>>>()?;
    let qp = QuasiPolynomial {
        source: eq.clone(),
        reduced,
        plans,
    };
    let BaseValues::Table(mut table) = base else {
        unreachable!("full builds always use the flat table")
    };
    table.extend_to(span);
    for (b, want) in table.values().iter().enumerate().take(3 * m as usize + 1) {
        let b_big = BigUint::from(b);
        let plan = qp.plan(qp.reduced.residue(&b_big));
        let got = plan.evaluate(qp.reduced.n(), &(b_big / m))?;
        if got.as_biguint() != want {
            return Err(Error::Internal(format!(
                "quasi-polynomial gives P({b}) = {got}, flat recurrence gives {want}"
            )));
        }
    }
    Ok(qp)
}

/// Builds the plan of a single residue of the reduced equation without touching the
/// other `M − 1` classes. Base values come from the decimation recurrence when they
/// are too large for a table.
pub fn build_residue_plan(eq: &Equation, r: Residue) -> Result<ResiduePlan> {
    let reduced = eq.reduced();
    let r = reduced.residue_of(r.value())?;
    let s = s_of_residue(&reduced, r);
    let max = BigUint::from(r.value()) + BigUint::from(reduced.lcm()) * s;
    let mut base = BaseValues::for_max(&reduced, &max)?;
    ResiduePlan::build(&reduced, r, &mut base)
}

/// `P(b)` from a built quasi-polynomial.
pub fn eval_quasipoly(qp: &QuasiPolynomial, b: &BigUint) -> Result<BigCount> {
    let Some(b) = qp.source.reduce_argument(b) else {
        return Ok(BigCount::zero());
    };
    let r = qp.reduced.residue(&b);
    let q = b / qp.reduced.lcm();
    qp.plan(r).evaluate(qp.reduced.n(), &q)
}

/// `P(b)` through a single-residue plan: no `O(M)` work, no size limit on `b`.
pub fn count_quasipoly(eq: &Equation, b: &BigUint) -> Result<BigCount> {
    let Some(b) = eq.reduce_argument(b) else {
        return Ok(BigCount::zero());
    };
    let reduced = eq.reduced();
    let plan = build_residue_plan(&reduced, reduced.residue(&b))?;
    plan.evaluate(reduced.n(), &(b / reduced.lcm()))
}

/// `P(qM + r) = c₀q^{n−1} + c₁q^{n−2} + … + c_{n−1}` for one residue `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialForm {
    r: Residue,
    coeffs: Vec<BigRational>,
}

impl PolynomialForm {
    pub fn residue(&self) -> Residue {
        self.r
    }

    /// `c₀ … c_{n−1}`, leading coefficient first.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation at `q = ⌊b/M⌋`.
    pub fn eval(&self, q: &BigInt) -> BigRational {
        let q = BigRational::from_integer(q.clone());
        self.coeffs
            .iter()
            .fold(BigRational::zero(), |acc, c| acc * &q + c)
    }
}

impl fmt::Display for PolynomialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let deg = self.degree();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() && !(first && i == deg) {
                continue;
            }
            let power = deg - i;
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            let unit = mag.is_one() && power > 0;
            if !unit {
                if mag.is_integer() {
                    write!(f, "{}", mag.numer())?;
                } else {
                    write!(f, "{}/{}", mag.numer(), mag.denom())?;
                }
            }
            match power {
                0 => {}
                1 => f.write_str("q")?,
                p => write!(f, "q^{p}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// Expands `Σ lₖ · C(q + n − 1 − k, n − 1)` into powers of `q`.
///
/// Since `k ≤ s ≤ n − 1`, every argument `q + n − 1 − k` is non-negative for `q ≥ 0`,
/// where the polynomial `x(x−1)⋯(x−n+2)/(n−1)!` coincides with the clamped binomial.
/// The form is therefore exact for every `q ≥ 0`.
pub fn polynomial_form(qp: &QuasiPolynomial, r: Residue) -> Result<PolynomialForm> {
    let r = qp.reduced.residue_of(r.value())?;
    polynomial_form_of_plan(&qp.reduced, qp.plan(r))
}

/// [`polynomial_form`] for a single plan of the coprime equation `eq`.
pub fn polynomial_form_of_plan(eq: &Equation, plan: &ResiduePlan) -> Result<PolynomialForm> {
    let r = plan.r;
    let n1 = eq.n() - 1;
    // ascending powers of q, integer numerators over (n-1)!
    let mut total = vec![BigInt::zero(); n1 + 1];
    for (k, l) in plan.l.iter().enumerate() {
        let mut poly = vec![BigInt::one()];
        for j in 0..n1 {
            let shift = BigInt::from(n1 as i64 - k as i64 - j as i64);
            let mut next = vec![BigInt::zero(); poly.len() + 1];
            for (p, c) in poly.iter().enumerate() {
                next[p + 1] += c;
                next[p] += c * &shift;
            }
            poly = next;
        }
        for (acc, c) in total.iter_mut().zip(&poly) {
            *acc += l * c;
        }
    }
    let fact: BigInt = (1..=n1 as u64).map(BigInt::from).product();
    let coeffs: Vec<BigRational> = total
        .into_iter()
        .rev()
        .map(|c| BigRational::new(c, fact.clone()))
        .collect();
    let form = PolynomialForm { r, coeffs };

    let free = form.coeffs[n1].clone();
    if free != BigRational::from_integer(plan.l[0].clone()) {
        return Err(Error::Internal(format!(
            "free coefficient {free} differs from P({r}) = {}",
            plan.l[0]
        )));
    }
    let expected_lead = BigRational::new(
        to_signed(&BigUint::from(eq.lcm()).pow(n1 as u32)),
        to_signed(&eq.product()) * &fact,
    );
    if form.coeffs[0] != expected_lead {
        return Err(Error::Internal(format!(
            "leading coefficient {} differs from M^(n-1)/(a1⋯an (n-1)!) = {expected_lead}",
            form.coeffs[0]
        )));
    }
    Ok(form)
}

/// `P(b) = (M^{n−1}/a₁⋯aₙ) · C(⌊b/M⌋ + n − 1, n − 1)`, valid when the coefficients are
/// coprime and `s = 0` for the residue of `b`.
///
/// The scalar is computed both as `M^{n−1}/a₁⋯aₙ` and as `P(r)`; the two must agree.
pub fn closed_form_count(eq: &Equation, b: &BigUint) -> Result<BigCount> {
    if !eq.is_coprime() {
        return Err(Error::PreconditionUnmet(format!(
            "closed form needs coprime coefficients (gcd is {})",
            eq.gcd()
        )));
    }
    let r = eq.residue(b);
    let s = s_of_residue(eq, r);
    if s != 0 {
        return Err(Error::PreconditionUnmet(format!(
            "closed form needs s = 0, but s = {s} for residue {r}"
        )));
    }
    let scalar = lattice_scalar(eq)
        .ok_or_else(|| Error::Internal(format!("{} does not divide M^(n-1)", eq.product())))?;
    let r_big = BigUint::from(r.value());
    let direct = BaseValues::for_max(eq, &r_big)?.get(&r_big);
    if direct != scalar {
        return Err(Error::Internal(format!(
            "P({r}) = {direct} but M^(n-1)/(a1⋯an) = {scalar}"
        )));
    }
    let n1 = eq.n() as u64 - 1;
    let c = binomial(&(b / eq.lcm() + BigUint::from(n1)), n1)?;
    Ok(BigCount::from(scalar * c.into_biguint()))
}

/// Whether [`closed_form_count`] applies to `b`.
pub fn closed_form_applies(eq: &Equation, b: &BigUint) -> bool {
    eq.is_coprime() && s_of_residue(eq, eq.residue(b)) == 0
}

fn check_pair(a1: u64, a2: u64) -> Result<u64> {
    if a1 == 0 || a2 == 0 {
        return Err(Error::InvalidInput("coefficients must be positive".into()));
    }
    if a1.gcd(&a2) != 1 {
        return Err(Error::PreconditionUnmet(format!(
            "two-variable formula needs coprime coefficients, got {a1} and {a2}"
        )));
    }
    a1.checked_mul(a2)
        .ok_or_else(|| Error::InvalidInput("a1·a2 exceeds 64 bits".into()))
}

/// `P(r) ∈ {0, 1}` for `a1·x + a2·y = r`, `r < a1·a2`, by scanning `y`.
pub fn two_var_residue_count(a1: u64, a2: u64, r: u64) -> u64 {
    u64::from((0..=r / a2).any(|y| (r - a2 * y).is_multiple_of(a1)))
}

/// The classification of `P(r)` that needs no scan, when it applies: every `r` above
/// `a1a2 − a1 − a2` is representable, as is `a1 + a2` and every multiple of `a1` or
/// `a2`; anything else below `a1 + a2` is not.
pub fn two_var_fast_path(a1: u64, a2: u64, r: u64) -> Option<u64> {
    let m = a1 * a2;
    if r + a1 + a2 > m || r == a1 + a2 || r.is_multiple_of(a1) || r.is_multiple_of(a2) {
        Some(1)
    } else if r < a1 + a2 {
        Some(0)
    } else {
        None
    }
}

/// `P(a1·x + a2·y = b) = ⌊b/(a1a2)⌋ + P(r)` for coprime `a1, a2`.
pub fn two_var_count(a1: u64, a2: u64, b: &BigUint) -> Result<BigCount> {
    let m = check_pair(a1, a2)?;
    let (q, r) = b.div_rem(&BigUint::from(m));
    let r = r.to_u64().expect("remainder below a u64 modulus");
    let scanned = two_var_residue_count(a1, a2, r);
    if let Some(fast) = two_var_fast_path(a1, a2, r) {
        if fast != scanned {
            return Err(Error::Internal(format!(
                "P({r}) for ({a1}, {a2}): fast path {fast}, scan {scanned}"
            )));
        }
    }
    Ok(BigCount::from(q + scanned))
}

/// Whether the stated range of the two-variable piecewise rule covers `(a1, a2)`:
/// coprime, `1 < a1 < a2`, and `a1 = 2` or (`a1 = 3` and `a2 < 6`).
pub fn piecewise_two_var_applies(a1: u64, a2: u64) -> bool {
    a1.gcd(&a2) == 1 && 1 < a1 && a1 < a2 && (a1 == 2 || (a1 == 3 && a2 < 6))
}

/// The two-variable piecewise rule: `⌊b/(a1a2)⌋ + 1` when `r > a1a2 − (a1 + a2)`,
/// `r = a1 + a2`, `a1 | r` or `a2 | r`; `⌊b/(a1a2)⌋` otherwise. Evaluated for any
/// coprime pair; it is exact inside [`piecewise_two_var_applies`].
pub fn piecewise_two_var(a1: u64, a2: u64, b: &BigUint) -> Result<BigCount> {
    let m = check_pair(a1, a2)?;
    let (q, r) = b.div_rem(&BigUint::from(m));
    let r = r.to_u64().expect("remainder below a u64 modulus");
    let hit = r + a1 + a2 > m || r == a1 + a2 || r % a1 == 0 || r % a2 == 0;
    Ok(BigCount::from(q + u64::from(hit)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::{count_oracle, oracle_table};
    use crate::recurrences::count_flat;
    use proptest::prelude::*;

    fn eq(c: &[u64]) -> Equation {
        Equation::new(c.to_vec()).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn ls(qp: &QuasiPolynomial, r: u64) -> Vec<i64> {
        let plan = qp.plan(qp.residue_of(r).unwrap());
        plan.l().iter().map(|v| v.to_i64().unwrap()).collect()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn s_examples() {
        let e = eq(&[2, 4, 5]);
        assert_eq!(s_of_residue(&e, Residue(7)), 2);
        assert_eq!(s_of_residue(&e, Residue(14)), 1);
        let e = eq(&[2, 3, 3, 3, 6, 6, 6, 6, 6, 6]);
        assert_eq!(s_of_residue(&e, Residue(5)), 1);
        let e = eq(&[1, 5, 10, 10]);
        assert_eq!(s_of_residue(&e, Residue(5)), 0);
    }

    #[test]
    fn plans_of_first_fixture() {
        let qp = build_quasipoly(&eq(&[2, 4, 5])).unwrap();
        assert_eq!(ls(&qp, 14), vec![6, 4]);
        assert_eq!(ls(&qp, 0), vec![1, 7, 2]);
    }

    #[test]
    fn plans_with_repeated_coefficients() {
        let qp = build_quasipoly(&eq(&[2, 2, 3, 3, 3, 6, 6])).unwrap();
        assert_eq!(ls(&qp, 1), vec![0, 9, 3]);
        let qp = build_quasipoly(&eq(&[1])).unwrap();
        assert_eq!(ls(&qp, 0), vec![1]);
    }

    #[test]
    fn eval_examples() {
        let qp = build_quasipoly(&eq(&[2, 4, 5])).unwrap();
        assert_eq!(eval_quasipoly(&qp, &big(214)).unwrap(), 616);
        let qp = build_quasipoly(&eq(&[2, 3, 4, 6])).unwrap();
        assert_eq!(eval_quasipoly(&qp, &big(826)).unwrap(), 673_785);
        let qp = build_quasipoly(&eq(&[2, 2, 3, 3, 3, 6, 6])).unwrap();
        assert_eq!(eval_quasipoly(&qp, &big(49)).unwrap(), 18216);
        let qp = build_quasipoly(&eq(&[5, 7, 9])).unwrap();
        for b in 1..5 {
            assert_eq!(eval_quasipoly(&qp, &big(b)).unwrap(), 0);
        }
    }

    #[test]
    fn single_residue_path() {
        let e = eq(&[2, 4, 5]);
        assert_eq!(count_quasipoly(&e, &big(214)).unwrap(), 616);
        assert_eq!(count_quasipoly(&eq(&[4, 8, 10]), &big(428)).unwrap(), 616);
        assert_eq!(count_quasipoly(&eq(&[4, 8, 10]), &big(427)).unwrap(), 0);
        let e = eq(&[3, 7, 11, 13]);
        let b = big(123_456);
        assert_eq!(
            count_quasipoly(&e, &b).unwrap(),
            count_oracle(&e, &b).unwrap()
        );
    }

    #[test]
    fn full_build_is_guarded() {
        let e = eq(&[1_000_003, 1_000_033]);
        assert!(matches!(
            build_quasipoly(&e),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn gcd_reduction() {
        let qp = build_quasipoly(&eq(&[4, 6, 8])).unwrap();
        assert_eq!(qp.reduced().coeffs(), &[2, 3, 4]);
        let table = oracle_table(qp.source(), 300);
        for (b, want) in table.iter().enumerate() {
            assert_eq!(
                eval_quasipoly(&qp, &big(b as u64)).unwrap().as_biguint(),
                want
            );
        }
    }

    #[test]
    fn polynomial_examples() {
        let qp = build_quasipoly(&eq(&[2, 4, 5])).unwrap();
        let form = polynomial_form(&qp, Residue(0)).unwrap();
        assert_eq!(form.coeffs()[2], rat(1, 1));
        for r in 0..20 {
            let form = polynomial_form(&qp, Residue(r)).unwrap();
            assert_eq!(form.degree(), 2);
            assert_eq!(form.coeffs()[0], rat(5, 1));
        }
        let qp = build_quasipoly(&eq(&[1, 1])).unwrap();
        let form = polynomial_form(&qp, Residue(0)).unwrap();
        assert_eq!(form.coeffs(), &[rat(1, 1), rat(1, 1)]);
        assert_eq!(form.to_string(), "q + 1");
        assert!(polynomial_form(&qp, Residue(1)).is_err());
    }

    #[test]
    fn polynomial_display() {
        let form = PolynomialForm {
            r: Residue(0),
            coeffs: vec![rat(1, 6), rat(0, 1), rat(-3, 2), rat(2, 1)],
        };
        assert_eq!(form.to_string(), "1/6q^3 - 3/2q + 2");
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(
            closed_form_count(&eq(&[1, 5, 10, 10]), &big(9005)).unwrap(),
            244_623_302
        );
        assert_eq!(closed_form_count(&eq(&[1, 3, 3, 3]), &big(17)).unwrap(), 56);
        assert_eq!(count_oracle(&eq(&[1, 3, 3, 3]), &big(17)).unwrap(), 56);
        assert!(matches!(
            closed_form_count(&eq(&[2, 4, 5]), &big(214)),
            Err(Error::PreconditionUnmet(_))
        ));
        assert!(matches!(
            closed_form_count(&eq(&[2, 4]), &big(8)),
            Err(Error::PreconditionUnmet(_))
        ));
    }

    #[test]
    fn two_var_examples() {
        assert_eq!(two_var_count(2, 5, &big(13)).unwrap(), 1);
        assert_eq!(two_var_count(3, 7, &big(21)).unwrap(), 2);
        assert_eq!(two_var_count(4, 9, &big(0)).unwrap(), 1);
        assert!(matches!(
            two_var_count(4, 6, &big(12)),
            Err(Error::PreconditionUnmet(_))
        ));
        for b in 0..=100 {
            assert_eq!(
                piecewise_two_var(2, 3, &big(b)).unwrap(),
                count_oracle(&eq(&[2, 3]), &big(b)).unwrap(),
                "b = {b}"
            );
        }
    }

    #[test]
    fn two_var_exhaustive_small_pairs() {
        for a2 in 2..=12u64 {
            for a1 in 1..a2 {
                if a1.gcd(&a2) != 1 {
                    continue;
                }
                let table = oracle_table(&eq(&[a1, a2]), 500);
                for (b, want) in table.iter().enumerate() {
                    let got = two_var_count(a1, a2, &big(b as u64)).unwrap();
                    assert_eq!(got.as_biguint(), want, "({a1}, {a2}) at {b}");
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn matches_oracle(coeffs in prop::collection::vec(1u64..=12, 1..=5)) {
            let e = eq(&coeffs);
            let qp = build_quasipoly(&e).unwrap();
            let top = 3 * qp.reduced().lcm() as usize + 200;
            let table = oracle_table(&e, top);
            for (b, want) in table.iter().enumerate() {
                let got = eval_quasipoly(&qp, &big(b as u64)).unwrap();
                prop_assert_eq!(got.as_biguint(), want);
            }
        }

        #[test]
        fn polynomial_matches_eval(coeffs in prop::collection::vec(1u64..=10, 1..=4)) {
            let qp = build_quasipoly(&eq(&coeffs)).unwrap();
            let m = qp.reduced().lcm();
            let g = qp.source().gcd();
            for r in 0..m.min(30) {
                let form = polynomial_form(&qp, Residue(r)).unwrap();
                for q in 0..=50u64 {
                    let v = eval_quasipoly(&qp, &big(g * (q * m + r))).unwrap();
                    let p = form.eval(&BigInt::from(q));
                    prop_assert!(p.is_integer());
                    prop_assert_eq!(p.to_integer(), v.to_bigint());
                }
            }
        }

        #[test]
        fn closed_form_agrees(coeffs in prop::collection::vec(1u64..=12, 1..=5), b in 0u64..3000) {
            let e = eq(&coeffs);
            if closed_form_applies(&e, &big(b)) {
                prop_assert_eq!(
                    closed_form_count(&e, &big(b)).unwrap(),
                    count_flat(&e, &big(b)).unwrap()
                );
            }
        }

        #[test]
        fn gcd_normalization(coeffs in prop::collection::vec(1u64..=6, 1..=4), g in 2u64..=4, b in 0u64..400) {
            let scaled: Vec<u64> = coeffs.iter().map(|a| a * g).collect();
            let e = eq(&scaled);
            let want = count_oracle(&e, &big(b)).unwrap();
            prop_assert_eq!(count_quasipoly(&e, &big(b)).unwrap(), want.clone());
            if b % e.gcd() == 0 {
                prop_assert_eq!(want, count_oracle(&e.reduced(), &big(b / e.gcd())).unwrap());
            }
        }
    }
}
