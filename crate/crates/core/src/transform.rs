//! Counting one equation through another with the same number of variables.
//!
//! For any positive `c₁ … cₙ`,
//!
//! ```text
//! P_a(b) = Σ_{k=0}^{s̄} mₖ · P_c(⌊b/M⌋ − k),    s̄ = ⌊Σcᵢ − (A + r)/M⌋
//! ```
//!
//! where `P_a` counts `Σ aᵢxᵢ = b`, `P_c` counts `Σ cᵢxᵢ`, and `mₖ` is the number of
//! `t` with `Σ aᵢtᵢ = r + kM` and `0 ≤ tᵢ < (M/aᵢ)·cᵢ`. Taking every `cᵢ = 1` gives the
//! quasi-polynomial coefficients.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::bounded::{bounded_count, BoundedSystem};
use crate::combinatorics::{alternating_subset_sums, BigCount};
use crate::equation::{table_guard, Equation, Residue};
use crate::error::{Error, Result};
use crate::quasipoly::{build_quasipoly, eval_quasipoly, QuasiPolynomial};
use crate::recurrences::{Decimator, FlatTable};

/// Target equations with `M·n` up to this size are evaluated through a full
/// quasi-polynomial; larger ones through decimation.
const TARGET_QUASIPOLY_LIMIT: u64 = 10_000;

/// The weights `m₀ … m_{s̄}` relating a source equation to a target, for one residue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformPlan {
    source: Equation,
    target: Equation,
    r: Residue,
    sbar: u64,
    m: Vec<BigInt>,
}

impl TransformPlan {
    pub fn source(&self) -> &Equation {
        &self.source
    }

    pub fn target(&self) -> &Equation {
        &self.target
    }

    pub fn residue(&self) -> Residue {
        self.r
    }

    pub fn sbar(&self) -> u64 {
        self.sbar
    }

    pub fn weights(&self) -> &[BigInt] {
        &self.m
    }

    /// Box bounds `dᵢ = (M/aᵢ)·cᵢ` whose solution counts are the weights.
    pub fn bounds(&self) -> Vec<u64> {
        box_bounds(&self.source, self.target.coeffs())
    }
}

fn box_bounds(source: &Equation, target: &[u64]) -> Vec<u64> {
    let m = source.lcm();
    source
        .coeffs()
        .iter()
        .zip(target)
        .map(|(&a, &c)| {
            debug_assert_eq!(m % a, 0);
            (m / a) * c
        })
        .collect()
}

/// `s̄ = ⌊Σcᵢ − (A + r)/M⌋`, clamped at 0. When the floor is negative no `t` in the box
/// reaches `r`, so the single weight `m₀ = P(r)` is then 0.
pub fn transform_span(source: &Equation, target: &Equation, r: Residue) -> u64 {
    let m = source.lcm() as i128;
    let num = m * target.sum() as i128 - source.sum() as i128 - r.value() as i128;
    Integer::div_floor(&num, &m).max(0) as u64
}

pub fn build_transform(
    source: &Equation,
    target_coeffs: &[u64],
    r: Residue,
) -> Result<TransformPlan> {
    if target_coeffs.len() != source.n() {
        return Err(Error::InvalidInput(format!(
            "target has {} coefficients, source has {}",
            target_coeffs.len(),
            source.n()
        )));
    }
    let target = Equation::new(target_coeffs.to_vec())?;
    let r = source.residue_of(r.value())?;
    let sbar = transform_span(source, &target, r);
    let m = source.lcm() as u128;

    let top = r.value() as u128 + sbar as u128 * m;
    let guard = table_guard();
    if top > guard as u128 {
        return Err(Error::ResourceLimit {
            value: top.to_string(),
            guard,
        });
    }
    let mut table = FlatTable::new(source);
    table.extend_to(top as usize);
    let p = table.values();

    let shifts: Vec<u128> = target_coeffs.iter().map(|&c| m * c as u128).collect();
    let signs = alternating_subset_sums(&shifts);
    let sys = BoundedSystem::new(source.clone(), box_bounds(source, target_coeffs))?;
    let mut weights = Vec::with_capacity(sbar as usize + 1);
    for k in 0..=sbar as u128 {
        let arg = r.value() as u128 + k * m;
        let weight: BigInt = signs
            .iter()
            .take_while(|(shift, _)| *shift <= arg)
            .map(|(shift, w)| {
                w * BigInt::from_biguint(Sign::Plus, p[(arg - shift) as usize].clone())
            })
            .sum();
        let boxed = bounded_count(&sys, &BigUint::from(arg))?;
        if weight != boxed.to_bigint() {
            return Err(Error::Internal(format!(
                "weight m{k} = {weight} but the box count is {boxed}"
            )));
        }
        weights.push(weight);
    }
    if weights[0] != BigInt::from_biguint(Sign::Plus, p[r.value() as usize].clone()) {
        return Err(Error::Internal("m0 differs from P(r)".into()));
    }
    Ok(TransformPlan {
        source: source.clone(),
        target,
        r,
        sbar,
        m: weights,
    })
}

enum TargetSolver {
    Quasi(QuasiPolynomial),
    Decimate(Decimator),
}

impl TargetSolver {
    fn new(target: &Equation) -> Result<Self> {
        let reduced = target.reduced();
        let size = reduced.lcm().checked_mul(reduced.n() as u64);
        Ok(match size {
            Some(s) if s <= TARGET_QUASIPOLY_LIMIT => TargetSolver::Quasi(build_quasipoly(target)?),
            _ => TargetSolver::Decimate(Decimator::new(target, 2)?),
        })
    }

    fn count(&mut self, b: &BigUint) -> Result<BigCount> {
        match self {
            TargetSolver::Quasi(qp) => eval_quasipoly(qp, b),
            TargetSolver::Decimate(dec) => Ok(dec.count(b)),
        }
    }
}

/// `P_source(b) = Σₖ mₖ · P_target(⌊b/M⌋ − k)`; `b` must lie in the plan's residue class.
pub fn transform_count(plan: &TransformPlan, b: &BigUint) -> Result<BigCount> {
    let (q, rem) = b.div_rem(&BigUint::from(plan.source.lcm()));
    if rem.to_u64() != Some(plan.r.value()) {
        return Err(Error::InvalidInput(format!(
            "{b} is not congruent to {} modulo {}",
            plan.r,
            plan.source.lcm()
        )));
    }
    let mut solver = TargetSolver::new(&plan.target)?;
    let mut total = BigInt::zero();
    for (k, w) in plan.m.iter().enumerate() {
        let k = BigUint::from(k);
        if k > q {
            break;
        }
        if w.is_zero() {
            continue;
        }
        total += w * solver.count(&(&q - k))?.to_bigint();
    }
    BigCount::from_signed(total)
}
