//! Reduction of admissible values to the basis
//! `ζ^C_{m₁…m_s}(1,…,1,2)`, `m₁ + ⋯ + m_s` equal to the depth.
//!
//! Every term is a shifted value `ζ^C_m(k)`. Let `p` be the first index
//! with `k_p ≥ 2`. Integrating by parts in `x_p` gives derivative terms of
//! the same depth with `k_p` lowered, plus a boundary term at `x_p = m_p` of
//! lower depth. For `p > 1` the boundary integrand carries
//! `S^{−1}(S+m_p)^{1−k_p}` in the partial sum `S = x₁+⋯+x_{p−1}`. This is
//! split by partial fractions and each piece becomes a shifted value again
//! after moving `m_p` into a neighbouring bound. Every rewrite preserves the
//! sum of the bounds.

pub mod genterm;
pub mod partial_fractions;
pub mod symbolic;

use std::collections::BTreeMap;

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

pub use genterm::{Factor, GenTerm};
pub use partial_fractions::{integrate_tail, partial_fractions, PartialFraction};
pub use symbolic::{basis_label, basis_value, BasisId, SymbolicConstant};

use crate::compositions::Composition;
use crate::error::{Error, Result};
use crate::quad::ShiftedCmzv;
use crate::rational::{int, pow, to_fraction_string, Rational};

pub const DEFAULT_STEP_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReduceConfig {
    /// Maximum number of generated terms.
    pub step_budget: usize,
    pub depth_cap: usize,
}

impl Default for ReduceConfig {
    fn default() -> Self {
        ReduceConfig { step_budget: DEFAULT_STEP_BUDGET, depth_cap: 6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reduction {
    pub value: SymbolicConstant,
    /// Depth 1 and 2 basis elements met on the way, keyed by their bounds,
    /// with their closed forms.
    pub resolved: BTreeMap<String, SymbolicConstant>,
    /// Opaque basis ids of the result.
    #[serde(skip)]
    pub basis_ids: Vec<BasisId>,
    pub steps: usize,
}

fn bounds_label(bounds: &[Rational]) -> String {
    bounds.iter().map(to_fraction_string).collect::<Vec<_>>().join(",")
}

/// `ζ^C_{m₁,m₂}(1,2) = ∫_{m₁}^∞ du / (u(u+m₂)) = (1/m₂)·log((m₁+m₂)/m₁)`.
pub fn depth_two_closed_form(m1: &Rational, m2: &Rational) -> Result<SymbolicConstant> {
    integrate_tail(&partial_fractions(&[(Rational::zero(), 1), (m2.clone(), 1)]), m1)
}

/// `ζ^C_m(k) = m^{1−k}/(k−1)`.
pub fn depth_one_closed_form(m: &Rational, k: u32) -> Result<Rational> {
    if k < 2 {
        return Err(Error::Divergent(format!("({k})")));
    }
    Ok(pow(m, 1 - k as i64) / int(k as i64 - 1))
}

fn is_basis_shape(parts: &[u32]) -> bool {
    match parts.split_last() {
        Some((&2, init)) => init.iter().all(|&k| k == 1),
        _ => false,
    }
}

type Key = (usize, Vec<u32>, Vec<Rational>);

/// One rewrite of a non-terminal `ζ^C_m(k)` (depth ≥ 2, not of basis
/// shape) into a combination of smaller shifted values.
pub fn rewrite_step(v: &ShiftedCmzv) -> Result<Vec<(Rational, ShiftedCmzv)>> {
    let k = v.exponents().parts();
    let m = v.bounds();
    let r = k.len();
    if r < 2 || is_basis_shape(k) {
        return Err(Error::Rewrite(format!("{v} is terminal")));
    }
    let p = k.iter().position(|&x| x >= 2).expect("admissible values have a part ≥ 2");
    let kp = k[p];
    let denominator = int(kp as i64 - 1);
    let mut out: Vec<(Rational, Vec<u32>, Vec<Rational>)> = Vec::new();

    for j in p + 1..r {
        let mut parts = k.to_vec();
        parts[p] -= 1;
        parts[j] += 1;
        out.push((-int(k[j] as i64) / &denominator, parts, m.to_vec()));
    }

    if p == 0 {
        let mut bounds = m[1..].to_vec();
        bounds[0] += &m[0];
        out.push((pow(&m[0], 1 - kp as i64) / &denominator, k[1..].to_vec(), bounds));
    } else {
        let mp = &m[p];
        let expansion = partial_fractions(&[(Rational::zero(), 1), (mp.clone(), kp - 1)]);
        for t in expansion {
            let coeff = &t.coeff / &denominator;
            if p == r - 1 {
                // A/u − A/(u+m) = A·m/(u(u+m)), the integrand of (1,…,1,2)
                match (t.shift.is_zero(), t.exponent) {
                    (true, _) => {
                        let mut parts = vec![1; r];
                        parts[r - 1] = 2;
                        out.push((coeff * mp, parts, m.to_vec()));
                    }
                    (false, 1) => {}
                    (false, e) => {
                        let mut parts = vec![1; r - 1];
                        parts[r - 2] = e;
                        let mut bounds = m[..r - 1].to_vec();
                        bounds[r - 2] += mp;
                        out.push((coeff, parts, bounds));
                    }
                }
            } else if t.shift.is_zero() {
                let mut parts = vec![1; p];
                parts.extend_from_slice(&k[p + 1..]);
                let mut bounds = m[..p].to_vec();
                bounds.push(mp + &m[p + 1]);
                bounds.extend_from_slice(&m[p + 2..]);
                out.push((coeff, parts, bounds));
            } else {
                let mut parts = vec![1; p - 1];
                parts.push(t.exponent);
                parts.extend_from_slice(&k[p + 1..]);
                let mut bounds = m[..p].to_vec();
                bounds[p - 1] += mp;
                bounds.extend_from_slice(&m[p + 1..]);
                out.push((coeff, parts, bounds));
            }
        }
    }
    out.into_iter()
        .map(|(c, parts, bounds)| Ok((c, ShiftedCmzv::new(bounds, Composition::new(parts)?)?)))
        .collect()
}

/// Reduces `ζ^C(c)` to rationals, logarithms of primes and opaque basis
/// symbols of depth ≥ 3.
pub fn reduce_to_basis(c: &Composition, cfg: &ReduceConfig) -> Result<Reduction> {
    reduce_shifted(&ShiftedCmzv::unshifted(c.clone()), cfg)
}

/// As [`reduce_to_basis`] for shifted values. Opaque symbols need integer
/// bounds; every emitted id must have `s ≤ r` and bounds summing to the
/// input's bound sum, otherwise the reduction fails.
pub fn reduce_shifted(v: &ShiftedCmzv, cfg: &ReduceConfig) -> Result<Reduction> {
    if !v.exponents().is_admissible() {
        return Err(Error::Divergent(v.exponents().to_string()));
    }
    if v.depth() > cfg.depth_cap {
        return Err(Error::Capacity(format!("depth {} exceeds the configured cap {}", v.depth(), cfg.depth_cap)));
    }
    let depth = v.depth();
    let bound_sum: Rational = v.bounds().iter().sum();
    let mut work: BTreeMap<Key, Rational> = BTreeMap::new();
    work.insert((depth, v.exponents().parts().to_vec(), v.bounds().to_vec()), Rational::one());
    let mut value = SymbolicConstant::zero();
    let mut resolved = BTreeMap::new();
    let mut steps = 1usize;

    while let Some(((s, parts, bounds), coeff)) = work.pop_last() {
        if coeff.is_zero() {
            continue;
        }
        let sum: Rational = bounds.iter().sum();
        if sum != bound_sum || s > depth {
            return Err(Error::Rewrite(format!(
                "term ({}) with bounds ({}) breaks the bound-sum invariant {bound_sum}",
                parts.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
                bounds_label(&bounds)
            )));
        }
        if s == 1 {
            value.add_rational(&(&coeff * depth_one_closed_form(&bounds[0], parts[0])?));
            if parts[0] == 2 {
                resolved.insert(bounds_label(&bounds), SymbolicConstant::from_rational(pow(&bounds[0], -1)));
            }
            continue;
        }
        if is_basis_shape(&parts) {
            if s == 2 {
                let closed = depth_two_closed_form(&bounds[0], &bounds[1])?;
                value.add_scaled(&closed, &coeff);
                resolved.insert(bounds_label(&bounds), closed);
            } else {
                let id = bounds
                    .iter()
                    .map(|b| b.is_integer().then(|| b.to_integer().to_u64()).flatten())
                    .collect::<Option<Vec<u64>>>()
                    .ok_or_else(|| Error::Rewrite(format!("basis bounds ({}) are not integers", bounds_label(&bounds))))?;
                value.add_basis(id, &coeff)?;
            }
            continue;
        }
        let term = ShiftedCmzv::new(bounds, Composition::new(parts)?)?;
        let next = rewrite_step(&term)?;
        steps += next.len();
        if steps > cfg.step_budget {
            return Err(Error::Capacity(format!("step budget {} exhausted", cfg.step_budget)));
        }
        for (c, t) in next {
            let key = (t.depth(), t.exponents().parts().to_vec(), t.bounds().to_vec());
            *work.entry(key).or_insert_with(Rational::zero) += &coeff * c;
        }
    }
    let basis_ids = value.basis().keys().cloned().collect();
    Ok(Reduction { value, resolved, basis_ids, steps })
}

/// `(k₁,…,k_r) ↦ ((k₁,…,k_r − 1, 2), (k₁,…,k_r, 2))`; the value of the
/// input is the sum of the two.
pub fn depth_embedding(c: &Composition) -> Result<(Composition, Composition)> {
    if !c.is_admissible() {
        return Err(Error::Divergent(c.to_string()));
    }
    let mut lowered = c.parts().to_vec();
    *lowered.last_mut().expect("compositions are nonempty") -= 1;
    lowered.push(2);
    let mut extended = c.parts().to_vec();
    extended.push(2);
    Ok((Composition::new(lowered)?, Composition::new(extended)?))
}

/// All bounds `(m₁,…,m_s)` of positive integers summing to `r`.
pub fn basis_ids(r: u32) -> Vec<BasisId> {
    (1..=r as usize)
        .flat_map(|s| Composition::all_of(r, s))
        .map(|c| c.parts().iter().map(|&m| m as u64).collect())
        .collect()
}
