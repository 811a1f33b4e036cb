//! Candidate pole hyperplanes of the meromorphic continuation.
//!
//! Splitting `[1,∞)^r` by the ordering of the inverted variables gives one
//! integral `I_σ` per permutation `σ ∈ S_r`. With `m_i = min(σ(1),…,σ(i))`,
//! `I_σ` can only have poles on `m₁s₁ + ⋯ + m_i s_i = (i+1) − k_i`,
//! `k_i ≥ 1`.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::compositions::{in_convergence_domain, RealTuple};
use crate::error::{Error, Result};

pub const PERMUTATION_CAP: usize = 8;

/// `coeffs · (s₁,…,s_i) = constant`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Hyperplane {
    pub coeffs: Vec<u64>,
    pub constant: i64,
}

impl Hyperplane {
    /// `coeffs · s − constant`, with missing coordinates of `s` read as 0.
    pub fn eval(&self, s: &[f64]) -> f64 {
        self.coeffs.iter().zip(s).map(|(&m, &x)| m as f64 * x).sum::<f64>() - self.constant as f64
    }
}

impl fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lhs: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &m)| if m == 1 { format!("s{}", i + 1) } else { format!("{m}·s{}", i + 1) })
            .collect();
        write!(f, "{} = {}", lhs.join(" + "), self.constant)
    }
}

/// Running minima `m_i = min(σ(1),…,σ(i))` of a permutation of `1..=r`.
pub fn perm_min_sequence(sigma: &[usize]) -> Result<Vec<usize>> {
    let r = sigma.len();
    let mut seen = vec![false; r + 1];
    for &v in sigma {
        if v == 0 || v > r || std::mem::replace(&mut seen[v], true) {
            return Err(Error::Domain(format!("{sigma:?} is not a permutation of 1..={r}")));
        }
    }
    Ok(sigma
        .iter()
        .scan(usize::MAX, |min, &v| {
            *min = (*min).min(v);
            Some(*min)
        })
        .collect())
}

/// Union over `σ ∈ S_r` of the candidate hyperplanes with `1 ≤ k_i ≤ k_max`.
pub fn pole_hyperplanes(r: usize, k_max: u32) -> Result<BTreeSet<Hyperplane>> {
    if r == 0 || k_max == 0 {
        return Err(Error::Domain(format!("need r ≥ 1 and k_max ≥ 1, got r={r}, k_max={k_max}")));
    }
    if r > PERMUTATION_CAP {
        return Err(Error::Capacity(format!("r={r} exceeds the permutation cap {PERMUTATION_CAP}")));
    }
    let mut out = BTreeSet::new();
    for sigma in (1..=r).permutations(r) {
        let m = perm_min_sequence(&sigma)?;
        for i in 1..=r {
            let coeffs: Vec<u64> = m[..i].iter().map(|&x| x as u64).collect();
            for k in 1..=k_max {
                out.insert(Hyperplane { coeffs: coeffs.clone(), constant: (i as i64 + 1) - k as i64 });
            }
        }
    }
    Ok(out)
}

/// `ζ^C(s) = 1/(s−1)` for real `s > 1`.
pub fn depth1_value(s: f64) -> Result<f64> {
    if s.is_nan() || s <= 1.0 {
        return Err(Error::Domain(format!("depth-one value needs s > 1, got {s}")));
    }
    Ok(1.0 / (s - 1.0))
}

/// Whether the hyperplane separates or touches sample points of the open
/// convergence domain drawn from `grid^r`.
pub fn meets_convergence_domain(h: &Hyperplane, r: usize, grid: &[f64]) -> bool {
    let mut signs = (false, false);
    for point in std::iter::repeat_n(grid.iter().copied(), r).multi_cartesian_product() {
        if !in_convergence_domain(&RealTuple::new(point.clone())) {
            continue;
        }
        let v = h.eval(&point);
        if v == 0.0 {
            return true;
        }
        if v > 0.0 {
            signs.0 = true;
        } else {
            signs.1 = true;
        }
        if signs.0 && signs.1 {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{eval_real, QuadConfig};

    fn hp(coeffs: &[u64], constant: i64) -> Hyperplane {
        Hyperplane { coeffs: coeffs.to_vec(), constant }
    }

    #[test]
    fn running_minima() {
        assert_eq!(perm_min_sequence(&[1, 2, 3]).unwrap(), vec![1, 1, 1]);
        assert_eq!(perm_min_sequence(&[2, 1]).unwrap(), vec![2, 1]);
        assert_eq!(perm_min_sequence(&[3, 1, 2]).unwrap(), vec![3, 1, 1]);
        assert!(perm_min_sequence(&[1, 1]).is_err());
        assert!(perm_min_sequence(&[0, 1]).is_err());
        assert!(perm_min_sequence(&[1, 3]).is_err());
    }

    #[test]
    fn running_minima_exhaustive() {
        for r in 1..=6 {
            for sigma in (1..=r).permutations(r) {
                let m = perm_min_sequence(&sigma).unwrap();
                assert_eq!(m[0], sigma[0]);
                assert_eq!(*m.last().unwrap(), 1);
                assert!(m.windows(2).all(|w| w[0] >= w[1]));
                assert!(m.iter().all(|&x| x <= r));
            }
        }
    }

    #[test]
    fn depth_one_family() {
        let got = pole_hyperplanes(1, 3).unwrap();
        let want: BTreeSet<_> = [hp(&[1], 1), hp(&[1], 0), hp(&[1], -1)].into_iter().collect();
        assert_eq!(got, want);
        for k_max in 1..=10 {
            let want: BTreeSet<_> = (0..k_max as i64).map(|j| hp(&[1], 1 - j)).collect();
            assert_eq!(pole_hyperplanes(1, k_max).unwrap(), want);
        }
    }

    #[test]
    fn depth_two_contains_both_permutations() {
        let got = pole_hyperplanes(2, 4).unwrap();
        for k in 1..=4 {
            assert!(got.contains(&hp(&[1], 2 - k)));
            assert!(got.contains(&hp(&[2], 2 - k)));
            assert!(got.contains(&hp(&[1, 1], 3 - k)));
            assert!(got.contains(&hp(&[2, 1], 3 - k)));
        }
        assert_eq!(got.len(), 16);
    }

    #[test]
    fn deduplicated() {
        // (1,2,3) and (1,3,2) share all running minima
        let got = pole_hyperplanes(3, 2).unwrap();
        assert!(got.len() < 6 * 3 * 2);
    }

    #[test]
    fn caps_and_domain() {
        assert!(matches!(pole_hyperplanes(9, 1), Err(Error::Capacity(_))));
        assert!(pole_hyperplanes(0, 1).is_err());
        assert!(pole_hyperplanes(2, 0).is_err());
        assert!(depth1_value(1.0).is_err());
        assert!(depth1_value(f64::NAN).is_err());
    }

    #[test]
    fn depth_one_values() {
        assert_eq!(depth1_value(2.0).unwrap(), 1.0);
        assert_eq!(depth1_value(3.0).unwrap(), 0.5);
        let q = eval_real(&[1.0], &[4.5], &QuadConfig::default()).unwrap();
        assert!((depth1_value(4.5).unwrap() - q.value).abs() < 1e-9);
        assert!(pole_hyperplanes(1, 1).unwrap().contains(&hp(&[1], 1)));
    }

    fn grid() -> Vec<f64> {
        (-8..=12).map(|i| i as f64 * 0.5 + 0.25).collect()
    }

    #[test]
    fn depth_one_candidates_avoid_the_convergence_domain() {
        for h in pole_hyperplanes(1, 6).unwrap() {
            assert!(!meets_convergence_domain(&h, 1, &grid()), "{h}");
        }
    }

    #[test]
    fn some_depth_two_candidates_meet_the_convergence_domain() {
        // s₁ = 1 passes through (1, 3/2), where the integral converges
        let h = hp(&[1], 1);
        assert!(in_convergence_domain(&RealTuple::new(vec![1.0, 1.5])));
        assert_eq!(h.eval(&[1.0, 1.5]), 0.0);
        assert!(meets_convergence_domain(&h, 2, &grid()));
        let q = eval_real(&[1.0, 1.0], &[1.0, 1.5], &QuadConfig::with_tol(1e-9)).unwrap();
        assert!(q.converged && q.value.is_finite());
        // s₁ + s₂ = 3 − k stays clear of it, 2s₁ + s₂ = 2 does not
        for k in 1..=4 {
            assert!(!meets_convergence_domain(&hp(&[1, 1], 3 - k), 2, &grid()));
        }
        assert!(meets_convergence_domain(&hp(&[2, 1], 2), 2, &grid()));
    }

    #[test]
    fn json_shape() {
        assert_eq!(serde_json::to_string(&hp(&[2, 1], -1)).unwrap(), r#"{"coeffs":[2,1],"constant":-1}"#);
        assert_eq!(hp(&[2, 1], -1).to_string(), "2·s1 + s2 = -1");
    }
}
