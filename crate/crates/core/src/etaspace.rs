//! The space `V` spanned by `1/(x+n)^l`, the η operator on it, and both
//! sides of the weighted sum formula
//!
//! ```text
//! Σ_{k₁+⋯+k_r=k} f(k₁,…,k_r) ζ^C(k₁,…,k_{r−1},1+k_r) = η^{r−1}(1/x^{k−2(r−1)}) |_{x=1}
//! ```
//!
//! with `f(k₁,…,k_r) = k_r (k_{r−1}+k_r−2) ⋯ (k₂+⋯+k_r−2(r−2)) (k−2(r−1))`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::compositions::Composition;
use crate::error::{Error, Result};
use crate::rational::{int, parse_fraction, pow, to_fraction_string, Rational};

/// `Σ c_{n,l} / (x+n)^l` with shifts `n ≥ 0` and exponents `l ≥ 1`. Keys are
/// ordered by `(shift, exponent)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VElement {
    terms: BTreeMap<(u64, u32), Rational>,
}

impl VElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `1/(x+shift)^exponent`.
    pub fn basis(shift: u64, exponent: u32) -> Self {
        let mut v = Self::zero();
        v.add_term(shift, exponent, Rational::one());
        v
    }

    pub fn add_term(&mut self, shift: u64, exponent: u32, coeff: Rational) {
        assert!(exponent >= 1, "exponents in V are positive");
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry((shift, exponent)) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, shift: u64, exponent: u32) -> Rational {
        self.terms.get(&(shift, exponent)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u32, &Rational)> {
        self.terms.iter().map(|(&(n, l), c)| (n, l, c))
    }

    pub fn scale(&self, a: &Rational) -> Self {
        let mut out = Self::zero();
        for (n, l, c) in self.iter() {
            out.add_term(n, l, c * a);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, l, c) in other.iter() {
            out.add_term(n, l, c.clone());
        }
        out
    }
}

impl fmt::Display for VElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (n, l, c)) in self.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i > 0 {
                write!(f, " {sign} ")?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            let base = if n == 0 { "x".to_string() } else { format!("(x+{n})") };
            let den = if l == 1 { base } else { format!("{base}^{l}") };
            let mag = c.abs();
            if mag.is_one() {
                write!(f, "1/{den}")?;
            } else {
                write!(f, "({})/{den}", to_fraction_string(&mag))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct VTerm {
    n: u64,
    l: u32,
    coeff: String,
}

impl Serialize for VElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let list: Vec<VTerm> = self
            .iter()
            .map(|(n, l, c)| VTerm { n, l, coeff: to_fraction_string(c) })
            .collect();
        list.serialize(s)
    }
}

impl<'de> Deserialize<'de> for VElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let list = Vec::<VTerm>::deserialize(d)?;
        let mut out = VElement::zero();
        for t in list {
            if t.l == 0 {
                return Err(serde::de::Error::custom("exponent l must be at least 1"));
            }
            let c = parse_fraction(&t.coeff).map_err(serde::de::Error::custom)?;
            out.add_term(t.n, t.l, c);
        }
        Ok(out)
    }
}

/// `η(1/(x+n)^l) = (1/(n+1)) (1/x^l − 1/(x+n+1)^l)`, extended linearly.
pub fn eta(v: &VElement) -> VElement {
    let mut out = VElement::zero();
    for (n, l, c) in v.iter() {
        let a = c / int(n as i64 + 1);
        out.add_term(0, l, a.clone());
        out.add_term(n + 1, l, -a);
    }
    out
}

pub fn eta_power(v: &VElement, times: usize) -> VElement {
    (0..times).fold(v.clone(), |acc, _| eta(&acc))
}

/// Exact value at a positive rational point.
pub fn eval_at(v: &VElement, t: &Rational) -> Result<Rational> {
    if !t.is_positive() {
        return Err(Error::Domain(format!("evaluation point {t} must be positive")));
    }
    Ok(v.iter().fold(Rational::zero(), |acc, (n, l, c)| {
        acc + c * pow(&(t + int(n as i64)), -(l as i64))
    }))
}

fn check_sum_formula_range(r: usize, k: u32) -> Result<()> {
    if r < 2 {
        return Err(Error::Domain(format!("sum formula needs depth r >= 2, got {r}")));
    }
    if (k as usize) <= 2 * (r - 1) {
        return Err(Error::Domain(format!("sum formula needs k > 2(r-1) = {}, got k = {k}", 2 * (r - 1))));
    }
    Ok(())
}

/// `η^{r−1}(1/x^{k−2(r−1)})` evaluated at `x = 1`.
pub fn sum_formula_rhs(r: usize, k: u32) -> Result<Rational> {
    check_sum_formula_range(r, k)?;
    let l = k - 2 * (r as u32 - 1);
    eval_at(&eta_power(&VElement::basis(0, l), r - 1), &Rational::one())
}

/// One summand of the weighted sum formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SumFormulaTerm {
    /// `(k₁,…,k_r)` with `Σ kᵢ = k`.
    pub parts: Composition,
    /// `(k₁,…,k_{r−1}, 1+k_r)`, the argument of ζ^C.
    pub composition: Composition,
    #[serde(with = "crate::rational::serde_fraction")]
    pub weight: Rational,
}

/// `f(k₁,…,k_r) = k_r (k_{r−1}+k_r−2) ⋯ (k₂+⋯+k_r−2(r−2)) · (k₁+⋯+k_r−2(r−1))`.
pub fn sum_formula_weight(parts: &[u32]) -> BigInt {
    let r = parts.len();
    let mut suffix: i64 = 0;
    let mut weight = BigInt::one();
    // j runs from r down to 1 (1-based); factor is suffix − 2(r − j)
    for j in (1..=r).rev() {
        suffix += parts[j - 1] as i64;
        weight *= BigInt::from(suffix - 2 * (r - j) as i64);
    }
    weight
}

/// Every composition of `k` into `r` parts with its weight, zero weights
/// included, in lexicographic order of `(k₁,…,k_r)`.
pub fn sum_formula_lhs_terms(r: usize, k: u32) -> Result<Vec<SumFormulaTerm>> {
    check_sum_formula_range(r, k)?;
    Ok(Composition::all_of(k, r)
        .into_iter()
        .map(|parts| {
            let mut shifted = parts.parts().to_vec();
            *shifted.last_mut().expect("r >= 2") += 1;
            SumFormulaTerm {
                weight: Rational::from_integer(sum_formula_weight(parts.parts())),
                composition: Composition::new(shifted).expect("parts stay positive"),
                parts,
            }
        })
        .collect())
}

/// Both sides of the telescoping identity
/// `Σ_{n₁+n₂=K} 1/(x^{n₁}(x+c)^{n₂}) = (1/c)(1/x^{K−1} − 1/(x+c)^{K−1})`
/// at a positive rational `x`, for `K ≥ 2` and a positive integer `c`.
pub fn telescoping_sides(big_k: u32, c: u64, x: &Rational) -> Result<(Rational, Rational)> {
    if big_k < 2 || c == 0 {
        return Err(Error::Domain(format!("telescoping identity needs K >= 2 and c >= 1, got K={big_k}, c={c}")));
    }
    let mut lhs_value = Rational::zero();
    for n1 in 1..big_k {
        let n2 = big_k - n1;
        lhs_value += pow(x, -(n1 as i64)) * pow(&(x + int(c as i64)), -(n2 as i64));
    }
    let mut rhs = VElement::zero();
    rhs.add_term(0, big_k - 1, Rational::one() / int(c as i64));
    rhs.add_term(c, big_k - 1, -Rational::one() / int(c as i64));
    let rhs_value = eval_at(&rhs, x)?;
    Ok((lhs_value, rhs_value))
}
