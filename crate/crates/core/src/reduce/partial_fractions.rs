//! One-variable rational functions `Π 1/(u+cᵢ)^{aᵢ}` and their tails
//! `∫_m^∞`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::symbolic::SymbolicConstant;
use crate::error::{Error, Result};
use crate::rational::{int, pow, Rational};

/// `coeff / (u + shift)^exponent`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialFraction {
    #[serde(with = "crate::rational::serde_fraction")]
    pub shift: Rational,
    pub exponent: u32,
    #[serde(with = "crate::rational::serde_fraction")]
    pub coeff: Rational,
}

impl PartialFraction {
    pub fn new(shift: Rational, exponent: u32, coeff: Rational) -> Self {
        PartialFraction { shift, exponent, coeff }
    }

    pub fn eval(&self, u: &Rational) -> Rational {
        &self.coeff / pow(&(u + &self.shift), self.exponent as i64)
    }
}

/// Expands `Π 1/(u+cᵢ)^{aᵢ}` into `Σ coeff/(u+c)^e`, sorted by shift then
/// exponent. Repeated shifts are merged first. Zero exponents are ignored.
pub fn partial_fractions(factors: &[(Rational, u32)]) -> Vec<PartialFraction> {
    let mut poles: BTreeMap<Rational, u32> = BTreeMap::new();
    for (c, a) in factors {
        if *a > 0 {
            *poles.entry(c.clone()).or_insert(0) += a;
        }
    }
    let mut out = Vec::new();
    for (c, &a) in &poles {
        // Taylor coefficients in t = u + c of Π_{j≠i} (t + d_j)^{-a_j}
        let order = a as usize;
        let mut series = vec![Rational::zero(); order];
        series[0] = Rational::one();
        for (cj, &aj) in &poles {
            if cj == c {
                continue;
            }
            let d = cj - c;
            // (t+d)^{-a} = Σ_n (−1)^n C(a+n−1, n) d^{−a−n} t^n
            let mut factor = Vec::with_capacity(order);
            let mut binom = Rational::one();
            for n in 0..order {
                if n > 0 {
                    binom = binom * int((aj as i64) + n as i64 - 1) / int(n as i64);
                }
                let sign = if n % 2 == 0 { int(1) } else { int(-1) };
                factor.push(sign * &binom * pow(&d, -(aj as i64) - n as i64));
            }
            let mut product = vec![Rational::zero(); order];
            for (i, s) in series.iter().enumerate() {
                if s.is_zero() {
                    continue;
                }
                for (j, f) in factor.iter().enumerate().take(order - i) {
                    product[i + j] += s * f;
                }
            }
            series = product;
        }
        for e in (1..=a).rev() {
            let coeff = series[(a - e) as usize].clone();
            if !coeff.is_zero() {
                out.push(PartialFraction::new(c.clone(), e, coeff));
            }
        }
    }
    out.sort_by(|x, y| (&x.shift, x.exponent).cmp(&(&y.shift, y.exponent)));
    out
}

/// Exact `∫_m^∞ Σ coeff/(u+c)^e du`. Exponent-1 terms must have zero total
/// coefficient; they contribute `−Σ coeff·log(m+c)`.
pub fn integrate_tail(expansion: &[PartialFraction], m: &Rational) -> Result<SymbolicConstant> {
    let log_total: Rational = expansion.iter().filter(|t| t.exponent == 1).map(|t| t.coeff.clone()).sum();
    if !log_total.is_zero() {
        return Err(Error::Divergent(format!("logarithmic coefficients sum to {log_total}, not 0")));
    }
    let mut out = SymbolicConstant::zero();
    for t in expansion {
        let at = m + &t.shift;
        if !at.is_positive() {
            return Err(Error::Domain(format!("pole at u = {} inside [{m}, ∞)", -&t.shift)));
        }
        match t.exponent {
            0 => return Err(Error::Divergent("constant term has no finite tail integral".into())),
            1 => out.add_log(&at, &-&t.coeff)?,
            e => out.add_rational(&(&t.coeff * pow(&at, 1 - e as i64) / int(e as i64 - 1))),
        }
    }
    Ok(out)
}
