//! Iterated integrals with shifted partial-sum denominators:
//!
//! ```text
//! coeff · ∫_{v₁≥m₁} ⋯ ∫_{v_s≥m_s} Π_f (c_f + v₁ + ⋯ + v_{i_f})^{−a_f} dv
//! ```

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::compositions::Composition;
use crate::error::{Error, Result};
use crate::quad::ShiftedCmzv;
use crate::rational::{int, pow, Rational};

/// `(shift + v₁ + ⋯ + v_index)^{−exponent}`, `index` counted from 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Factor {
    pub index: usize,
    #[serde(with = "crate::rational::serde_fraction")]
    pub shift: Rational,
    pub exponent: u32,
}

impl Factor {
    pub fn new(index: usize, shift: Rational, exponent: u32) -> Self {
        Factor { index, shift, exponent }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenTerm {
    #[serde(with = "crate::rational::serde_fraction")]
    coeff: Rational,
    #[serde(serialize_with = "serialize_bounds")]
    bounds: Vec<Rational>,
    factors: Vec<Factor>,
}

fn serialize_bounds<S: serde::Serializer>(b: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(b.iter().map(crate::rational::to_fraction_string))
}

impl GenTerm {
    /// Validates bounds, factor indices and convergence: for every `j` the
    /// factors involving `v_j` must carry total exponent above `s − j + 1`.
    pub fn new(coeff: Rational, bounds: Vec<Rational>, mut factors: Vec<Factor>) -> Result<Self> {
        let s = bounds.len();
        if let Some(b) = bounds.iter().find(|b| !b.is_positive()) {
            return Err(Error::Domain(format!("lower bound {b} must be positive")));
        }
        for f in &factors {
            if f.index == 0 || f.index > s || f.exponent == 0 || f.shift.is_negative() {
                return Err(Error::Rewrite(format!("malformed factor {f:?} for {s} variables")));
            }
        }
        for j in 1..=s {
            let weight: u32 = factors.iter().filter(|f| f.index >= j).map(|f| f.exponent).sum();
            if weight as usize <= s - j + 1 {
                return Err(Error::Divergent(format!("variable {j} has total exponent {weight}")));
            }
        }
        factors.sort();
        Ok(GenTerm { coeff, bounds, factors })
    }

    pub fn constant(coeff: Rational) -> Self {
        GenTerm { coeff, bounds: Vec::new(), factors: Vec::new() }
    }

    pub fn from_shifted(v: &ShiftedCmzv, coeff: Rational) -> Self {
        let factors = v
            .exponents()
            .parts()
            .iter()
            .enumerate()
            .map(|(i, &k)| Factor::new(i + 1, Rational::zero(), k))
            .collect();
        GenTerm { coeff, bounds: v.bounds().to_vec(), factors }
    }

    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    pub fn bounds(&self) -> &[Rational] {
        &self.bounds
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn depth(&self) -> usize {
        self.bounds.len()
    }

    pub fn weight(&self) -> u32 {
        self.factors.iter().map(|f| f.exponent).sum()
    }

    /// Integration by parts in `v₁`, whose only factor must be `v₁^{−a}` with
    /// `a ≥ 2`. Returns the boundary term (`v₁ = m₁` substituted, so every
    /// remaining shift grows by `m₁`) followed by one derivative term per
    /// remaining factor.
    pub fn ibp_step(&self) -> Result<Vec<GenTerm>> {
        let first: Vec<&Factor> = self.factors.iter().filter(|f| f.index == 1).collect();
        let a1 = match first.as_slice() {
            [f] if f.shift.is_zero() && f.exponent >= 2 => f.exponent,
            _ => {
                return Err(Error::Rewrite(format!(
                    "integration by parts needs a single unshifted factor of exponent ≥ 2 on the first variable, found {first:?}"
                )))
            }
        };
        let m1 = &self.bounds[0];
        let denominator = int(a1 as i64 - 1);
        let mut out = Vec::with_capacity(self.factors.len());

        let boundary_coeff = &self.coeff * pow(m1, 1 - a1 as i64) / &denominator;
        let rest: Vec<Factor> = self
            .factors
            .iter()
            .filter(|f| f.index > 1)
            .map(|f| Factor::new(f.index - 1, &f.shift + m1, f.exponent))
            .collect();
        out.push(GenTerm::new(boundary_coeff, self.bounds[1..].to_vec(), rest)?);

        for (j, f) in self.factors.iter().enumerate() {
            if f.index == 1 {
                continue;
            }
            let mut factors = self.factors.clone();
            for g in factors.iter_mut() {
                if g.index == 1 {
                    g.exponent -= 1;
                }
            }
            factors[j].exponent += 1;
            let coeff = -&self.coeff * int(f.exponent as i64) / &denominator;
            out.push(GenTerm::new(coeff, self.bounds.clone(), factors)?);
        }
        Ok(out)
    }

    /// Substitutes `v_i ↦ v_i − c_i` level by level, with `c_i` the smallest
    /// shift among factors involving `v_i`. Bounds grow by the absorbed
    /// shifts.
    pub fn absorb_shifts(&self) -> GenTerm {
        let mut out = self.clone();
        for i in 1..=out.depth() {
            let c = out.factors.iter().filter(|f| f.index >= i).map(|f| f.shift.clone()).min();
            let Some(c) = c.filter(|c| !c.is_zero()) else { continue };
            out.bounds[i - 1] += &c;
            for f in out.factors.iter_mut().filter(|f| f.index >= i) {
                f.shift -= &c;
            }
        }
        out.factors.sort();
        out
    }

    /// The term as `coeff · ζ^C_m(k)` when every index carries exactly one
    /// unshifted factor.
    pub fn to_shifted(&self) -> Option<(Rational, ShiftedCmzv)> {
        let s = self.depth();
        if self.factors.len() != s {
            return None;
        }
        let mut parts = Vec::with_capacity(s);
        for (i, f) in self.factors.iter().enumerate() {
            if f.index != i + 1 || !f.shift.is_zero() {
                return None;
            }
            parts.push(f.exponent);
        }
        if s == 0 {
            return None;
        }
        let v = ShiftedCmzv::new(self.bounds.clone(), Composition::new(parts).ok()?).ok()?;
        Some((self.coeff.clone(), v))
    }

    /// The coefficient of a term with no variables left.
    pub fn as_constant(&self) -> Option<&Rational> {
        (self.depth() == 0).then_some(&self.coeff)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{eval_numeric, QuadConfig};
    use crate::rational::{frac, to_f64};

    fn z(bounds: &[u64], parts: &[u32]) -> ShiftedCmzv {
        ShiftedCmzv::from_integers(bounds, parts).unwrap()
    }

    #[test]
    fn ibp_on_two_two() {
        let t = GenTerm::from_shifted(&z(&[1, 1], &[2, 2]), int(1));
        let out = t.ibp_step().unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].factors(), &[Factor::new(1, int(1), 2)]);
        let (c, v) = out[0].absorb_shifts().to_shifted().unwrap();
        assert_eq!((c, v), (int(1), z(&[2], &[2])));
        let (c, v) = out[1].to_shifted().unwrap();
        assert_eq!((c, v), (int(-2), z(&[1, 1], &[1, 3])));
        // 1/2 − 2·((log 2)/2 − 1/4) = 1 − log 2
        let cfg = QuadConfig::with_tol(1e-10);
        let value = 0.5 - 2.0 * eval_numeric(&z(&[1, 1], &[1, 3]), &cfg).unwrap().value;
        assert!((value - (1.0 - 2f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn ibp_depth_one_is_the_closed_form() {
        let out = GenTerm::from_shifted(&z(&[1], &[3]), int(1)).ibp_step().unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].as_constant(), Some(&frac(1, 2)));
        let out = GenTerm::from_shifted(&z(&[2], &[4]), int(3)).ibp_step().unwrap();
        assert_eq!(out[0].as_constant(), Some(&frac(1, 8)));
    }

    #[test]
    fn ibp_preconditions() {
        assert!(GenTerm::from_shifted(&z(&[1, 1], &[1, 2]), int(1)).ibp_step().is_err());
        let shifted = GenTerm::new(int(1), vec![int(1)], vec![Factor::new(1, int(1), 3)]).unwrap();
        assert!(shifted.ibp_step().is_err());
    }

    #[test]
    fn construction_checks_convergence() {
        assert!(GenTerm::new(int(1), vec![int(1), int(1)], vec![Factor::new(2, int(0), 2)]).is_err());
        assert!(GenTerm::new(int(1), vec![int(1)], vec![Factor::new(1, int(0), 1)]).is_err());
        assert!(GenTerm::new(int(1), vec![int(1)], vec![Factor::new(2, int(0), 2)]).is_err());
        assert!(GenTerm::new(int(1), vec![int(1), int(1)], vec![Factor::new(2, int(0), 3)]).is_ok());
    }

    #[test]
    fn weight_is_conserved_and_values_match() {
        let cfg = QuadConfig::with_tol(1e-10);
        for parts in [vec![2, 2], vec![3, 2], vec![2, 1, 2], vec![3, 1, 3], vec![4, 3]] {
            let v = ShiftedCmzv::new(vec![frac(3, 2), int(1), int(2)][..parts.len()].to_vec(), Composition::new(parts.clone()).unwrap()).unwrap();
            let t = GenTerm::from_shifted(&v, int(1));
            let mut total = 0.0;
            for out in t.ibp_step().unwrap() {
                if let Some(c) = out.as_constant() {
                    total += to_f64(c);
                    continue;
                }
                let (c, s) = out.absorb_shifts().to_shifted().unwrap();
                if out.depth() == t.depth() {
                    assert_eq!(out.weight(), t.weight());
                } else {
                    assert_eq!(out.weight(), t.weight() - parts[0]);
                }
                total += to_f64(&c) * eval_numeric(&s, &cfg).unwrap().value;
            }
            let want = eval_numeric(&v, &cfg).unwrap().value;
            assert!((total - want).abs() < 1e-8, "{parts:?}: {total} vs {want}");
        }
    }

    #[test]
    fn absorption_moves_shifts_into_bounds() {
        let t = GenTerm::new(
            int(1),
            vec![int(1), int(1), int(1)],
            vec![Factor::new(1, int(0), 1), Factor::new(2, int(2), 1), Factor::new(3, int(2), 2)],
        )
        .unwrap();
        let a = t.absorb_shifts();
        assert_eq!(a.bounds(), &[int(1), int(3), int(1)]);
        assert!(a.factors().iter().all(|f| f.shift.is_zero()));
    }
}
