//! Exact linear combinations `q₀ + Σ q_p·log p + Σ q_m·B(m)`, where `p` runs
//! over primes and `B(m₁,…,m_s) = ζ^C_{m₁…m_s}(1,…,1,2)` for `s ≥ 3`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::compositions::Composition;
use crate::error::{Error, Result};
use crate::quad::{eval_numeric, NumericResult, QuadConfig, ShiftedCmzv};
use crate::rational::{parse_fraction, to_f64, to_fraction_string, Rational};

/// Lower bounds `(m₁,…,m_s)` of a basis element.
pub type BasisId = Vec<u64>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolicConstant {
    rational: Rational,
    logs: BTreeMap<u64, Rational>,
    basis: BTreeMap<BasisId, Rational>,
}

/// Prime factorization of `n ≥ 1` by trial division.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn bump<K: Ord>(map: &mut BTreeMap<K, Rational>, key: K, coeff: &Rational) {
    *map.entry(key).or_insert_with(Rational::zero) += coeff;
}

fn prune<K: Ord>(map: &mut BTreeMap<K, Rational>) {
    map.retain(|_, v| !v.is_zero());
}

pub fn basis_label(id: &[u64]) -> String {
    id.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

impl SymbolicConstant {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_rational(q: Rational) -> Self {
        SymbolicConstant { rational: q, ..Default::default() }
    }

    pub fn basis_element(id: BasisId) -> Result<Self> {
        let mut out = Self::zero();
        out.add_basis(id, &Rational::one())?;
        Ok(out)
    }

    pub fn rational(&self) -> &Rational {
        &self.rational
    }

    pub fn logs(&self) -> &BTreeMap<u64, Rational> {
        &self.logs
    }

    pub fn basis(&self) -> &BTreeMap<BasisId, Rational> {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.logs.is_empty() && self.basis.is_empty()
    }

    pub fn add_rational(&mut self, q: &Rational) {
        self.rational += q;
    }

    /// Adds `coeff·log(arg)` with `arg` split over its prime factors.
    pub fn add_log(&mut self, arg: &Rational, coeff: &Rational) -> Result<()> {
        if !arg.is_positive() {
            return Err(Error::Domain(format!("log of non-positive {arg}")));
        }
        let too_big = || Error::Capacity(format!("cannot factor {arg}"));
        let numer = arg.numer().to_u64().ok_or_else(too_big)?;
        let denom = arg.denom().to_u64().ok_or_else(too_big)?;
        for (p, e) in factor(numer) {
            bump(&mut self.logs, p, &(coeff * Rational::from_integer(e.into())));
        }
        for (p, e) in factor(denom) {
            bump(&mut self.logs, p, &(-coeff * Rational::from_integer(e.into())));
        }
        prune(&mut self.logs);
        Ok(())
    }

    /// Adds `coeff·B(id)`; ids need depth at least 3 and positive entries.
    pub fn add_basis(&mut self, id: BasisId, coeff: &Rational) -> Result<()> {
        if id.len() < 3 || id.contains(&0) {
            return Err(Error::Rewrite(format!("invalid opaque basis id ({})", basis_label(&id))));
        }
        bump(&mut self.basis, id, coeff);
        prune(&mut self.basis);
        Ok(())
    }

    pub fn add(&mut self, other: &SymbolicConstant) {
        self.add_scaled(other, &Rational::one());
    }

    pub fn add_scaled(&mut self, other: &SymbolicConstant, c: &Rational) {
        self.rational += &other.rational * c;
        for (p, q) in &other.logs {
            bump(&mut self.logs, *p, &(q * c));
        }
        for (id, q) in &other.basis {
            bump(&mut self.basis, id.clone(), &(q * c));
        }
        prune(&mut self.logs);
        prune(&mut self.basis);
    }

    pub fn scale(&self, c: &Rational) -> SymbolicConstant {
        let mut out = SymbolicConstant::zero();
        out.add_scaled(self, c);
        out
    }

    /// Value of the rational and logarithmic parts in double precision.
    pub fn rational_and_logs_f64(&self) -> f64 {
        to_f64(&self.rational) + self.logs.iter().map(|(p, q)| to_f64(q) * (*p as f64).ln()).sum::<f64>()
    }

    /// Numeric value, with basis symbols evaluated by quadrature.
    pub fn eval(&self, cfg: &QuadConfig) -> Result<NumericResult> {
        let mut out = NumericResult {
            value: self.rational_and_logs_f64(),
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        };
        for (id, q) in &self.basis {
            let r = eval_numeric(&basis_value(id)?, cfg)?;
            let q = to_f64(q);
            out.value += q * r.value;
            out.error_estimate += q.abs() * r.error_estimate;
            out.evaluations += r.evaluations;
            out.converged &= r.converged;
        }
        Ok(out)
    }
}

/// `ζ^C_{m₁…m_s}(1,…,1,2)` for a basis id.
pub fn basis_value(id: &[u64]) -> Result<ShiftedCmzv> {
    let mut parts = vec![1; id.len()];
    if let Some(last) = parts.last_mut() {
        *last = 2;
    }
    ShiftedCmzv::new(
        id.iter().map(|&m| Rational::from_integer(m.into())).collect(),
        Composition::new(parts)?,
    )
}

fn write_term(f: &mut fmt::Formatter<'_>, first: &mut bool, coeff: &Rational, symbol: Option<&str>) -> fmt::Result {
    let negative = coeff.is_negative();
    let magnitude = coeff.abs();
    match (*first, negative) {
        (true, true) => write!(f, "−")?,
        (true, false) => {}
        (false, true) => write!(f, " − ")?,
        (false, false) => write!(f, " + ")?,
    }
    *first = false;
    match symbol {
        None => write!(f, "{}", to_fraction_string(&magnitude)),
        Some(s) if magnitude.is_one() => write!(f, "{s}"),
        Some(s) if magnitude.is_integer() => write!(f, "{}·{s}", magnitude),
        Some(s) => write!(f, "({})·{s}", to_fraction_string(&magnitude)),
    }
}

impl fmt::Display for SymbolicConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        if !self.rational.is_zero() {
            write_term(f, &mut first, &self.rational, None)?;
        }
        for (p, q) in &self.logs {
            write_term(f, &mut first, q, Some(&format!("log {p}")))?;
        }
        for (id, q) in &self.basis {
            write_term(f, &mut first, q, Some(&format!("B({})", basis_label(id))))?;
        }
        Ok(())
    }
}

struct FractionMap<'a, K>(&'a BTreeMap<K, Rational>, fn(&K) -> String);

impl<K> Serialize for FractionMap<'_, K> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(&(self.1)(k), &to_fraction_string(v))?;
        }
        map.end()
    }
}

impl Serialize for SymbolicConstant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(3))?;
        map.serialize_entry("rational", &to_fraction_string(&self.rational))?;
        map.serialize_entry("logs", &FractionMap(&self.logs, |p| p.to_string()))?;
        map.serialize_entry("basis", &FractionMap(&self.basis, |id| basis_label(id)))?;
        map.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    rational: String,
    #[serde(default)]
    logs: BTreeMap<String, String>,
    #[serde(default)]
    basis: BTreeMap<String, String>,
}

impl TryFrom<Raw> for SymbolicConstant {
    type Error = Error;

    fn try_from(raw: Raw) -> Result<Self> {
        let mut out = SymbolicConstant::from_rational(parse_fraction(&raw.rational)?);
        for (p, q) in &raw.logs {
            let p: u64 = p.parse().map_err(|_| Error::Parse(format!("log key {p:?}")))?;
            if p < 2 || factor(p) != vec![(p, 1)] {
                return Err(Error::Parse(format!("log key {p} is not prime")));
            }
            out.add_log(&Rational::from_integer(p.into()), &parse_fraction(q)?)?;
        }
        for (id, q) in &raw.basis {
            let id = id
                .split(',')
                .map(|m| m.trim().parse::<u64>().map_err(|_| Error::Parse(format!("basis id {id:?}"))))
                .collect::<Result<Vec<_>>>()?;
            out.add_basis(id, &parse_fraction(q)?)?;
        }
        Ok(out)
    }
}

impl<'de> Deserialize<'de> for SymbolicConstant {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SymbolicConstant::try_from(Raw::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn factorization() {
        assert_eq!(factor(1), vec![]);
        assert_eq!(factor(12), vec![(2, 2), (3, 1)]);
        assert_eq!(factor(97), vec![(97, 1)]);
        assert_eq!(factor(2 * 2 * 5 * 49), vec![(2, 2), (5, 1), (7, 2)]);
    }

    #[test]
    fn logs_are_canonical() {
        let mut a = SymbolicConstant::zero();
        a.add_log(&int(4), &int(1)).unwrap();
        let mut b = SymbolicConstant::zero();
        b.add_log(&int(2), &int(2)).unwrap();
        assert_eq!(a, b);
        let mut c = SymbolicConstant::zero();
        c.add_log(&frac(3, 2), &int(1)).unwrap();
        c.add_log(&int(2), &int(1)).unwrap();
        assert_eq!(c.to_string(), "log 3");
        c.add_log(&int(3), &int(-1)).unwrap();
        assert!(c.is_zero());
        assert!(c.add_log(&int(0), &int(1)).is_err());
    }

    #[test]
    fn display() {
        let mut v = SymbolicConstant::from_rational(int(1));
        v.add_log(&int(2), &int(-1)).unwrap();
        assert_eq!(v.to_string(), "1 − log 2");
        assert_eq!(SymbolicConstant::basis_element(vec![1, 1, 1]).unwrap().to_string(), "B(1,1,1)");
        let mut w = SymbolicConstant::from_rational(frac(-1, 4));
        w.add_log(&int(2), &frac(1, 2)).unwrap();
        w.add_basis(vec![2, 1, 1], &int(-3)).unwrap();
        assert_eq!(w.to_string(), "−1/4 + (1/2)·log 2 − 3·B(2,1,1)");
        assert_eq!(SymbolicConstant::zero().to_string(), "0");
    }

    #[test]
    fn basis_ids_are_validated() {
        assert!(SymbolicConstant::basis_element(vec![1, 2]).is_err());
        assert!(SymbolicConstant::basis_element(vec![1, 0, 2]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut v = SymbolicConstant::from_rational(frac(1, 2));
        v.add_log(&int(6), &frac(-2, 3)).unwrap();
        v.add_basis(vec![1, 1, 2], &int(5)).unwrap();
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, r#"{"rational":"1/2","logs":{"2":"-2/3","3":"-2/3"},"basis":{"1,1,2":"5"}}"#);
        assert_eq!(serde_json::from_str::<SymbolicConstant>(&json).unwrap(), v);
        assert!(serde_json::from_str::<SymbolicConstant>(r#"{"rational":"0","logs":{"4":"1"}}"#).is_err());
    }

    #[test]
    fn numeric_value() {
        let v = SymbolicConstant::basis_element(vec![1, 1, 1]).unwrap();
        let r = v.eval(&QuadConfig::default()).unwrap();
        assert!(r.converged && (r.value - 0.6142793334595678).abs() < 1e-8);
    }
}
