//! The shuffle algebra `Q⟨x,y⟩` and the map `Z` onto continuous multiple
//! zeta values.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::compositions::{composition_from_word, Composition, Word};
use crate::error::{Error, Result};
use crate::rational::{parse_fraction, to_fraction_string, Rational};

/// A finite `Q`-linear combination of words. Zero coefficients are never
/// stored, and terms iterate in lexicographic word order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FormalWordSum {
    terms: BTreeMap<Word, Rational>,
}

impl FormalWordSum {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The unit `1·ε`.
    pub fn one() -> Self {
        Self::word(Word::empty())
    }

    pub fn word(w: Word) -> Self {
        Self::term(w, Rational::one())
    }

    pub fn term(w: Word, coeff: Rational) -> Self {
        let mut s = Self::zero();
        s.add_term(w, coeff);
        s
    }

    pub fn add_term(&mut self, w: Word, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(w) {
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

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, a: &Rational) -> Self {
        if a.is_zero() {
            return Self::zero();
        }
        FormalWordSum {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c * a)).collect(),
        }
    }

    /// Sum of all coefficients.
    pub fn coefficient_mass(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |acc, c| acc + c)
    }
}

impl Add for &FormalWordSum {
    type Output = FormalWordSum;

    fn add(self, rhs: &FormalWordSum) -> FormalWordSum {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Mul for &FormalWordSum {
    type Output = FormalWordSum;

    /// The shuffle product.
    fn mul(self, rhs: &FormalWordSum) -> FormalWordSum {
        shuffle_sum(self, rhs)
    }
}

impl fmt::Display for FormalWordSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let magnitude = c.abs();
            match (i, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let word = if w.is_empty() { "1" } else { w.as_str() };
            if magnitude.is_one() {
                f.write_str(word)?;
            } else if w.is_empty() {
                f.write_str(&to_fraction_string(&magnitude))?;
            } else {
                write!(f, "{}·{}", to_fraction_string(&magnitude), word)?;
            }
        }
        Ok(())
    }
}

impl Serialize for FormalWordSum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<&str, String> =
            self.terms.iter().map(|(w, c)| (w.as_str(), to_fraction_string(c))).collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FormalWordSum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<String, String>::deserialize(d)?;
        let mut out = FormalWordSum::zero();
        for (w, c) in map {
            let w: Word = w.parse().map_err(serde::de::Error::custom)?;
            let c = parse_fraction(&c).map_err(serde::de::Error::custom)?;
            out.add_term(w, c);
        }
        Ok(out)
    }
}

/// Full shuffle expansion of two words, following
/// `1 ⧢ w = w ⧢ 1 = w` and `uw₁ ⧢ vw₂ = u(w₁ ⧢ vw₂) + v(uw₁ ⧢ w₂)`.
pub fn shuffle(w1: &Word, w2: &Word) -> FormalWordSum {
    let a = w1.letters();
    let b = w2.letters();
    // memo over suffix pairs (a[i..], b[j..]); each entry is a word -> count map
    let mut memo: HashMap<(usize, usize), BTreeMap<Vec<u8>, Rational>> = HashMap::new();
    let expanded = shuffle_suffixes(a, b, 0, 0, &mut memo);
    let mut out = FormalWordSum::zero();
    for (letters, c) in expanded {
        out.add_term(Word::from_letters(letters).expect("letters come from words"), c);
    }
    out
}

fn shuffle_suffixes(
    a: &[u8],
    b: &[u8],
    i: usize,
    j: usize,
    memo: &mut HashMap<(usize, usize), BTreeMap<Vec<u8>, Rational>>,
) -> BTreeMap<Vec<u8>, Rational> {
    if i == a.len() || j == b.len() {
        let rest = if i == a.len() { &b[j..] } else { &a[i..] };
        return BTreeMap::from([(rest.to_vec(), Rational::one())]);
    }
    if let Some(hit) = memo.get(&(i, j)) {
        return hit.clone();
    }
    let mut out: BTreeMap<Vec<u8>, Rational> = BTreeMap::new();
    for (letter, next) in [(a[i], (i + 1, j)), (b[j], (i, j + 1))] {
        for (tail, c) in shuffle_suffixes(a, b, next.0, next.1, memo) {
            let mut word = Vec::with_capacity(tail.len() + 1);
            word.push(letter);
            word.extend_from_slice(&tail);
            *out.entry(word).or_insert_with(Rational::zero) += c;
        }
    }
    memo.insert((i, j), out.clone());
    out
}

/// Bilinear extension of [`shuffle`].
pub fn shuffle_sum(a: &FormalWordSum, b: &FormalWordSum) -> FormalWordSum {
    let mut out = FormalWordSum::zero();
    for (w1, c1) in a.iter() {
        for (w2, c2) in b.iter() {
            let coeff = c1 * c2;
            for (w, c) in shuffle(w1, w2).iter() {
                out.add_term(w.clone(), c * &coeff);
            }
        }
    }
    out
}

/// Image of an element of `𝔥⁰ = Q + y𝔥x` under `Z`: a rational constant
/// (from the empty word) plus a combination of admissible compositions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ZImage {
    pub constant: Rational,
    pub terms: Vec<(Composition, Rational)>,
}

/// Applies `Z(y x^{k₁−1} ⋯ y x^{k_r−1}) = ζ^C(k₁,…,k_r)` and `Z(1) = 1`
/// term by term.
pub fn z_map(a: &FormalWordSum) -> Result<ZImage> {
    let mut image = ZImage { constant: Rational::zero(), terms: Vec::new() };
    for (w, c) in a.iter() {
        if w.is_empty() {
            image.constant += c;
            continue;
        }
        let composition = composition_from_word(w).map_err(|_| Error::NonAdmissibleWord(w.to_string()))?;
        image.terms.push((composition, c.clone()));
    }
    Ok(image)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{binomial, int};
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    /// Every order-preserving interleaving, enumerated by choosing which
    /// output positions take letters from the first word.
    fn brute_force(a: &Word, b: &Word) -> BTreeMap<Word, u64> {
        let n = a.len() + b.len();
        let mut out = BTreeMap::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != a.len() {
                continue;
            }
            let (mut i, mut j) = (0, 0);
            let mut letters = Vec::with_capacity(n);
            for pos in 0..n {
                if mask >> pos & 1 == 1 {
                    letters.push(a.letters()[i]);
                    i += 1;
                } else {
                    letters.push(b.letters()[j]);
                    j += 1;
                }
            }
            *out.entry(Word::from_letters(letters).unwrap()).or_insert(0) += 1;
        }
        out
    }

    #[test]
    fn unit_law() {
        assert_eq!(shuffle(&Word::empty(), &w("yx")), FormalWordSum::word(w("yx")));
        assert_eq!(shuffle(&w("yx"), &Word::empty()), FormalWordSum::word(w("yx")));
        assert_eq!(shuffle(&Word::empty(), &Word::empty()), FormalWordSum::one());
    }

    #[test]
    fn small_expansions() {
        let xy = shuffle(&w("x"), &w("y"));
        assert_eq!(xy.to_string(), "xy + yx");
        let sq = shuffle(&w("yx"), &w("yx"));
        assert_eq!(sq.coefficient(&w("yxyx")), int(2));
        assert_eq!(sq.coefficient(&w("yyxx")), int(4));
        assert_eq!(sq.len(), 2);
        assert_eq!(sq.to_string(), "2·yxyx + 4·yyxx");
    }

    #[test]
    fn bilinear_extension() {
        let zero = FormalWordSum::zero();
        let b = FormalWordSum::term(w("yx"), int(3));
        assert!(shuffle_sum(&zero, &b).is_zero());
        assert_eq!(shuffle_sum(&FormalWordSum::one(), &b), b);
        let two_x = FormalWordSum::term(w("x"), int(2));
        let three_y = FormalWordSum::term(w("y"), int(3));
        let expected = &FormalWordSum::term(w("xy"), int(6)) + &FormalWordSum::term(w("yx"), int(6));
        assert_eq!(&two_x * &three_y, expected);
    }

    #[test]
    fn z_map_terms() {
        let img = z_map(&FormalWordSum::word(w("yx"))).unwrap();
        assert_eq!(img.terms, vec![(Composition::new(vec![2]).unwrap(), int(1))]);
        let img = z_map(&shuffle(&w("yx"), &w("yx"))).unwrap();
        assert_eq!(
            img.terms,
            vec![
                (Composition::new(vec![2, 2]).unwrap(), int(2)),
                (Composition::new(vec![1, 3]).unwrap(), int(4)),
            ]
        );
        let with_unit = &FormalWordSum::one() + &FormalWordSum::word(w("yyx"));
        let img = z_map(&with_unit).unwrap();
        assert_eq!(img.constant, int(1));
        assert_eq!(img.terms.len(), 1);
        match z_map(&FormalWordSum::word(w("xy"))) {
            Err(Error::NonAdmissibleWord(s)) => assert_eq!(s, "xy"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cancellation_drops_terms() {
        let mut s = FormalWordSum::term(w("yx"), int(2));
        s.add_term(w("yx"), int(-2));
        assert!(s.is_zero());
        assert_eq!(s.to_string(), "0");
    }

    #[test]
    fn json_round_trip() {
        let s = &shuffle(&w("yx"), &w("yx")).scale(&crate::rational::frac(1, 3)) + &FormalWordSum::one();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"":"1","yxyx":"2/3","yyxx":"4/3"}"#);
        let back: FormalWordSum = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn matches_brute_force_up_to_length_8() {
        for total in 0..=8usize {
            for la in 0..=total {
                for a in Word::all_of_length(la) {
                    for b in Word::all_of_length(total - la) {
                        let got = shuffle(&a, &b);
                        let want = brute_force(&a, &b);
                        assert_eq!(got.len(), want.len(), "{a} ⧢ {b}");
                        for (word, count) in want {
                            assert_eq!(got.coefficient(&word), int(count as i64), "{a} ⧢ {b}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn commutative_up_to_length_6() {
        for la in 0..=6usize {
            for lb in 0..=(6 - la) {
                for a in Word::all_of_length(la) {
                    for b in Word::all_of_length(lb) {
                        assert_eq!(shuffle(&a, &b), shuffle(&b, &a));
                    }
                }
            }
        }
    }

    #[test]
    fn associative_up_to_length_7() {
        for la in 1..=3usize {
            for lb in 1..=3usize {
                for lc in 1..=(7 - la - lb).min(3) {
                    for a in Word::all_of_length(la) {
                        for b in Word::all_of_length(lb) {
                            for c in Word::all_of_length(lc) {
                                let left = shuffle_sum(&shuffle(&a, &b), &FormalWordSum::word(c.clone()));
                                let right = shuffle_sum(&FormalWordSum::word(a.clone()), &shuffle(&b, &c));
                                assert_eq!(left, right);
                            }
                        }
                    }
                }
            }
        }
    }

    fn any_word(max: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec(prop_oneof![Just(b'x'), Just(b'y')], 0..=max)
            .prop_map(|l| Word::from_letters(l).unwrap())
    }

    fn admissible_word(max_middle: usize) -> impl Strategy<Value = Word> {
        any_word(max_middle).prop_map(|w| {
            let mut letters = vec![b'y'];
            letters.extend(w.letters());
            letters.push(b'x');
            Word::from_letters(letters).unwrap()
        })
    }

    proptest! {
        #[test]
        fn mass_and_lengths(a in any_word(6), b in any_word(6)) {
            let s = shuffle(&a, &b);
            let n = (a.len() + b.len()) as u64;
            prop_assert_eq!(s.coefficient_mass(), Rational::from_integer(binomial(n, a.len() as u64)));
            for (word, _) in s.iter() {
                prop_assert_eq!(word.len(), a.len() + b.len());
            }
        }

        #[test]
        fn admissible_words_stay_admissible(a in admissible_word(4), b in admissible_word(4)) {
            for (word, _) in shuffle(&a, &b).iter() {
                prop_assert!(word.is_admissible());
            }
        }
    }
}
