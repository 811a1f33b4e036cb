//! Index types for continuous multiple zeta values and the word encoding
//! used by the shuffle algebra.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A tuple `(k₁,…,k_r)` of positive integers, `r ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Composition(Vec<u32>);

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidComposition("a composition needs at least one part".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidComposition(format!("{parts:?} has a zero part")));
        }
        Ok(Composition(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    /// The last part is at least 2.
    pub fn is_admissible(&self) -> bool {
        is_admissible(self)
    }

    pub fn to_real_tuple(&self) -> RealTuple {
        RealTuple::new(self.0.iter().map(|&k| k as f64).collect())
    }

    /// All compositions of `weight` into `depth` positive parts, in
    /// lexicographic order.
    pub fn all_of(weight: u32, depth: usize) -> Vec<Composition> {
        let mut out = Vec::new();
        if depth == 0 || (weight as usize) < depth {
            return out;
        }
        let mut parts = vec![1u32; depth];
        fn rec(i: usize, left: u32, parts: &mut Vec<u32>, out: &mut Vec<Composition>) {
            let depth = parts.len();
            if i + 1 == depth {
                parts[i] = left;
                out.push(Composition(parts.clone()));
                return;
            }
            let rest = (depth - i - 1) as u32;
            for k in 1..=(left - rest) {
                parts[i] = k;
                rec(i + 1, left - k, parts, out);
            }
        }
        rec(0, weight, &mut parts, &mut out);
        out
    }

    /// Every admissible composition with weight in `2..=max_weight`,
    /// ordered by weight, then depth, then lexicographically.
    pub fn admissible_up_to(max_weight: u32) -> Vec<Composition> {
        let mut out = Vec::new();
        for w in 2..=max_weight {
            for d in 1..w as usize {
                out.extend(Composition::all_of(w, d).into_iter().filter(|c| c.is_admissible()));
            }
        }
        out
    }
}

impl TryFrom<Vec<u32>> for Composition {
    type Error = Error;

    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Composition::new(parts)
    }
}

impl From<Composition> for Vec<u32> {
    fn from(c: Composition) -> Self {
        c.0
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// Parses comma-separated parts, e.g. `"1,2"`; surrounding parentheses are
/// tolerated.
impl FromStr for Composition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts = inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad composition part {p:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Composition::new(parts)
    }
}

/// Real parts `(σ₁,…,σ_r)` of a complex argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RealTuple(Vec<f64>);

impl RealTuple {
    pub fn new(sigma: Vec<f64>) -> Self {
        RealTuple(sigma)
    }

    pub fn sigma(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Suffix sums `σ_j + … + σ_r` for `j = 1..r`.
    fn suffix_sums(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out: Vec<f64> = self
            .0
            .iter()
            .rev()
            .map(|s| {
                acc += s;
                acc
            })
            .collect();
        out.reverse();
        out
    }
}

pub fn is_admissible(c: &Composition) -> bool {
    c.0.last().is_some_and(|&k| k >= 2)
}

/// `σ_j + … + σ_r > r − j + 1` for every `j`. The domain is open, so the
/// boundary is rejected.
pub fn in_convergence_domain(s: &RealTuple) -> bool {
    if s.is_empty() || s.0.iter().any(|x| !x.is_finite()) {
        return false;
    }
    let r = s.len();
    s.suffix_sums()
        .iter()
        .enumerate()
        .all(|(j, &sum)| sum > (r - j) as f64)
}

/// `Π_j 1 / (σ_j + … + σ_r − (r − j + 1))`, a strict upper bound for the
/// absolute value of the integral.
pub fn convergence_bound(s: &RealTuple) -> Result<f64> {
    if !in_convergence_domain(s) {
        return Err(Error::Domain(format!("{:?} violates the suffix-sum conditions", s.0)));
    }
    let r = s.len();
    Ok(s.suffix_sums()
        .iter()
        .enumerate()
        .map(|(j, &sum)| 1.0 / (sum - (r - j) as f64))
        .product())
}

/// A word over `{x, y}`, stored as ASCII bytes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word(Vec<u8>);

impl Word {
    pub const X: u8 = b'x';
    pub const Y: u8 = b'y';

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<u8>) -> Result<Self> {
        if letters.iter().any(|&b| b != Self::X && b != Self::Y) {
            return Err(Error::InvalidWord(String::from_utf8_lossy(&letters).into_owned()));
        }
        Ok(Word(letters))
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Empty, or starts with `y` and ends with `x`.
    pub fn is_admissible(&self) -> bool {
        self.is_empty() || (self.0.first() == Some(&Self::Y) && self.0.last() == Some(&Self::X))
    }

    pub fn count_y(&self) -> usize {
        self.0.iter().filter(|&&b| b == Self::Y).count()
    }

    pub fn as_str(&self) -> &str {
        // only ASCII 'x'/'y' are ever stored
        std::str::from_utf8(&self.0).expect("ascii word")
    }

    /// All words of length `n`, in lexicographic order.
    pub fn all_of_length(n: usize) -> Vec<Word> {
        (0..1usize << n)
            .map(|bits| {
                Word((0..n)
                    .map(|i| if bits >> (n - 1 - i) & 1 == 1 { Self::Y } else { Self::X })
                    .collect())
            })
            .collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Word::from_letters(s.as_bytes().to_vec())
    }
}

impl TryFrom<String> for Word {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Word> for String {
    fn from(w: Word) -> Self {
        w.as_str().to_owned()
    }
}

/// `(k₁,…,k_r) ↦ y x^{k₁−1} ⋯ y x^{k_r−1}`; defined for every composition.
pub fn word_from_composition(c: &Composition) -> Word {
    let mut letters = Vec::with_capacity(c.weight() as usize);
    for &k in c.parts() {
        letters.push(Word::Y);
        letters.extend(std::iter::repeat_n(Word::X, k as usize - 1));
    }
    Word(letters)
}

/// Inverse of [`word_from_composition`] on nonempty admissible words.
pub fn composition_from_word(w: &Word) -> Result<Composition> {
    if w.is_empty() || !w.is_admissible() {
        return Err(Error::NonAdmissibleWord(w.to_string()));
    }
    composition_from_word_extended(w)
}

/// Inverse of [`word_from_composition`] on every word that starts with `y`,
/// admissible or not.
pub fn composition_from_word_extended(w: &Word) -> Result<Composition> {
    if w.letters().first() != Some(&Word::Y) {
        return Err(Error::NonAdmissibleWord(w.to_string()));
    }
    let mut parts = Vec::new();
    for &b in w.letters() {
        if b == Word::Y {
            parts.push(1);
        } else {
            *parts.last_mut().expect("word starts with y") += 1;
        }
    }
    Composition::new(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn comp(parts: &[u32]) -> Composition {
        Composition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn admissibility() {
        assert!(comp(&[2]).is_admissible());
        assert!(comp(&[1, 2]).is_admissible());
        assert!(!comp(&[2, 1]).is_admissible());
    }

    #[test]
    fn rejects_bad_compositions() {
        assert!(Composition::new(vec![]).is_err());
        assert!(Composition::new(vec![1, 0]).is_err());
        assert!("1,x".parse::<Composition>().is_err());
        assert_eq!("(1, 2)".parse::<Composition>().unwrap(), comp(&[1, 2]));
    }

    #[test]
    fn convergence_domain() {
        assert!(in_convergence_domain(&RealTuple::new(vec![1.5])));
        assert!(in_convergence_domain(&RealTuple::new(vec![1.0, 2.0])));
        assert!(!in_convergence_domain(&RealTuple::new(vec![5.0, 0.5])));
        // boundary: σ_r = 1 exactly
        assert!(!in_convergence_domain(&RealTuple::new(vec![1.0])));
        // suffix sum 0.5 + 1.5 = 2 is on the boundary for j = 1
        assert!(!in_convergence_domain(&RealTuple::new(vec![0.5, 1.5])));
        assert!(!in_convergence_domain(&RealTuple::new(vec![])));
        assert!(!in_convergence_domain(&RealTuple::new(vec![f64::NAN])));
    }

    #[test]
    fn convergence_bounds() {
        assert_eq!(convergence_bound(&RealTuple::new(vec![2.0])).unwrap(), 1.0);
        assert_eq!(convergence_bound(&RealTuple::new(vec![2.0, 2.0])).unwrap(), 0.5);
        assert_eq!(convergence_bound(&RealTuple::new(vec![1.0, 2.0])).unwrap(), 1.0);
        assert!(matches!(
            convergence_bound(&RealTuple::new(vec![5.0, 0.5])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn word_encoding() {
        assert_eq!(word_from_composition(&comp(&[2])).as_str(), "yx");
        assert_eq!(word_from_composition(&comp(&[1, 2])).as_str(), "yyx");
        assert_eq!(word_from_composition(&comp(&[2, 3])).as_str(), "yxyxx");
        assert_eq!(composition_from_word(&"yxyxx".parse().unwrap()).unwrap(), comp(&[2, 3]));
        assert!(matches!(
            composition_from_word(&"xy".parse().unwrap()),
            Err(Error::NonAdmissibleWord(_))
        ));
        assert!(composition_from_word(&"yxy".parse().unwrap()).is_err());
        assert!(composition_from_word(&Word::empty()).is_err());
        assert_eq!(
            composition_from_word_extended(&"yxy".parse().unwrap()).unwrap(),
            comp(&[2, 1])
        );
        assert!("xz".parse::<Word>().is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(Composition::all_of(5, 3).len(), 6);
        assert_eq!(Composition::all_of(2, 3).len(), 0);
        // admissible of weight w: 2^(w-2)
        for w in 2..=8u32 {
            let n = Composition::admissible_up_to(w).iter().filter(|c| c.weight() == w).count();
            assert_eq!(n, 1 << (w - 2));
        }
        assert_eq!(Word::all_of_length(3).len(), 8);
    }

    #[test]
    fn json_shapes() {
        assert_eq!(serde_json::to_string(&comp(&[1, 2])).unwrap(), "[1,2]");
        assert!(serde_json::from_str::<Composition>("[0]").is_err());
        assert_eq!(serde_json::to_string(&"yyx".parse::<Word>().unwrap()).unwrap(), "\"yyx\"");
    }

    fn any_composition() -> impl Strategy<Value = Composition> {
        prop::collection::vec(1u32..6, 1..6).prop_map(|p| Composition::new(p).unwrap())
    }

    proptest! {
        #[test]
        fn round_trip(c in any_composition()) {
            let w = word_from_composition(&c);
            prop_assert_eq!(w.len() as u32, c.weight());
            prop_assert_eq!(w.count_y(), c.depth());
            prop_assert_eq!(composition_from_word_extended(&w).unwrap(), c.clone());
            if c.is_admissible() {
                prop_assert!(w.is_admissible());
                prop_assert_eq!(composition_from_word(&w).unwrap(), c);
            }
        }

        #[test]
        fn admissible_integers_converge(c in any_composition()) {
            if c.is_admissible() {
                prop_assert!(in_convergence_domain(&c.to_real_tuple()));
            }
        }
    }
}
