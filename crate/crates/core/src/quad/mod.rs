//! Numerical evaluation of shifted continuous multiple zeta values
//!
//! ```text
//! ζ^C_{m₁…m_r}(k₁,…,k_r) = ∫_{x₁≥m₁} ⋯ ∫_{x_r≥m_r} Π_i (x₁+⋯+x_i)^{−k_i} dx
//! ```
//!
//! The innermost variable is integrated in closed form,
//! `∫_{m_r}^∞ (T+x)^{−k} dx = (T+m_r)^{1−k}/(k−1)`, and the remaining `r−1`
//! variables by nested tanh-sinh quadrature after the map
//! `x = m + (T+m)·t/(1−t)`, where `T` is the partial sum of the outer
//! variables. Each nested value depends on `T` only, so level `i` is a
//! one-dimensional integral of level `i+1`.

pub mod gauss_kronrod;
pub mod tanh_sinh;

use std::cell::Cell;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::compositions::{in_convergence_domain, Composition, RealTuple};
use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};

/// Accept an error `e` for a value `v` when `e ≤ max(abs, rel·|v|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Tolerance { abs, rel: 0.0 }
    }

    pub fn accepts(&self, error: f64, value: f64) -> bool {
        error <= self.abs.max(self.rel * value.abs())
    }
}

/// Raw output of a one-dimensional rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: u64,
    pub converged: bool,
}

/// Result of a full evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadConfig {
    /// Absolute target; `None` selects [`QuadConfig::default_tolerance`].
    pub tol: Option<f64>,
    pub depth_cap: usize,
    pub min_level: usize,
    pub max_level: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { tol: None, depth_cap: 6, min_level: 2, max_level: 8 }
    }
}

impl QuadConfig {
    pub fn with_tol(tol: f64) -> Self {
        QuadConfig { tol: Some(tol), ..Default::default() }
    }

    /// `1e-8` up to depth 3, `1e-5` beyond.
    pub fn default_tolerance(depth: usize) -> f64 {
        if depth <= 3 {
            1e-8
        } else {
            1e-5
        }
    }

    pub fn tolerance(&self, depth: usize) -> f64 {
        self.tol.unwrap_or_else(|| Self::default_tolerance(depth))
    }

    fn check_depth(&self, depth: usize) -> Result<()> {
        if depth > self.depth_cap {
            return Err(Error::Capacity(format!(
                "depth {depth} exceeds the configured cap {}",
                self.depth_cap
            )));
        }
        Ok(())
    }
}

/// `ζ^C_{m₁…m_r}(k₁,…,k_r)` with positive rational lower bounds.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ShiftedCmzv {
    #[serde(with = "fraction_list")]
    bounds: Vec<Rational>,
    exponents: Composition,
}

mod fraction_list {
    use crate::rational::{parse_fraction, to_fraction_string, Rational};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(to_fraction_string).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_fraction(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl ShiftedCmzv {
    pub fn new(bounds: Vec<Rational>, exponents: Composition) -> Result<Self> {
        if bounds.len() != exponents.depth() {
            return Err(Error::InvalidComposition(format!(
                "{} bounds for depth {}",
                bounds.len(),
                exponents.depth()
            )));
        }
        if let Some(b) = bounds.iter().find(|b| !b.is_positive()) {
            return Err(Error::Domain(format!("lower bound {b} must be positive")));
        }
        Ok(ShiftedCmzv { bounds, exponents })
    }

    /// The unshifted value `ζ^C(k₁,…,k_r)`, all bounds 1.
    pub fn unshifted(exponents: Composition) -> Self {
        ShiftedCmzv { bounds: vec![Rational::one(); exponents.depth()], exponents }
    }

    pub fn from_integers(bounds: &[u64], exponents: &[u32]) -> Result<Self> {
        let bounds = bounds.iter().map(|&b| Rational::from_integer(b.into())).collect();
        ShiftedCmzv::new(bounds, Composition::new(exponents.to_vec())?)
    }

    pub fn bounds(&self) -> &[Rational] {
        &self.bounds
    }

    pub fn exponents(&self) -> &Composition {
        &self.exponents
    }

    pub fn depth(&self) -> usize {
        self.exponents.depth()
    }
}

impl fmt::Display for ShiftedCmzv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bounds.iter().all(|b| b.is_one()) {
            write!(f, "ζ^C{}", self.exponents)
        } else {
            let bounds: Vec<String> = self.bounds.iter().map(crate::rational::to_fraction_string).collect();
            write!(f, "ζ^C_{{{}}}{}", bounds.join(","), self.exponents)
        }
    }
}

/// Evaluates `ζ^C_{m}(k)` for admissible integer exponents.
pub fn eval_numeric(v: &ShiftedCmzv, cfg: &QuadConfig) -> Result<NumericResult> {
    if !v.exponents.is_admissible() {
        return Err(Error::Divergent(v.exponents.to_string()));
    }
    let bounds: Vec<f64> = v.bounds.iter().map(to_f64).collect();
    let exponents: Vec<f64> = v.exponents.parts().iter().map(|&k| k as f64).collect();
    eval_real(&bounds, &exponents, cfg)
}

/// Evaluates the shifted integral for real exponents inside the
/// convergence domain (`σ_j + ⋯ + σ_r > r − j + 1` for all `j`).
pub fn eval_real(bounds: &[f64], exponents: &[f64], cfg: &QuadConfig) -> Result<NumericResult> {
    if bounds.len() != exponents.len() || bounds.is_empty() {
        return Err(Error::InvalidComposition(format!(
            "{} bounds for {} exponents",
            bounds.len(),
            exponents.len()
        )));
    }
    if bounds.iter().any(|&b| !(b > 0.0 && b.is_finite())) {
        return Err(Error::Domain(format!("lower bounds {bounds:?} must be positive")));
    }
    if !in_convergence_domain(&RealTuple::new(exponents.to_vec())) {
        return Err(Error::Domain(format!("exponents {exponents:?} lie outside the convergence domain")));
    }
    let depth = exponents.len();
    cfg.check_depth(depth)?;
    let tol = cfg.tolerance(depth);
    let nested = Nested {
        bounds,
        exponents,
        integer_exponents: exponents
            .iter()
            .map(|&k| (k.fract() == 0.0 && k.abs() < 64.0).then_some(k as i32))
            .collect(),
        outer: Tolerance::absolute(tol / 2.0),
        inner: Tolerance { abs: f64::MIN_POSITIVE, rel: tol / (2.0 * depth as f64) },
        min_level: cfg.min_level,
        max_level: cfg.max_level,
        evaluations: Cell::new(0),
    };
    let (value, error) = nested.level(0, 0.0);
    let evaluations = nested.evaluations.get();
    Ok(NumericResult { value, error_estimate: error, evaluations, converged: error <= tol })
}

struct Nested<'a> {
    bounds: &'a [f64],
    exponents: &'a [f64],
    integer_exponents: Vec<Option<i32>>,
    outer: Tolerance,
    inner: Tolerance,
    min_level: usize,
    max_level: usize,
    evaluations: Cell<u64>,
}

impl Nested<'_> {
    fn power(&self, base: f64, i: usize) -> f64 {
        match self.integer_exponents[i] {
            Some(k) => base.powi(-k),
            None => base.powf(-self.exponents[i]),
        }
    }

    /// Level `i` as a function of the partial sum `x₁ + ⋯ + x_i` of the
    /// outer variables; returns the value and its error bound.
    fn level(&self, i: usize, partial: f64) -> (f64, f64) {
        let last = self.exponents.len() - 1;
        if i == last {
            self.evaluations.set(self.evaluations.get() + 1);
            let k = self.exponents[i];
            // (T+m)^{1-k}/(k-1)
            let base = partial + self.bounds[i];
            let value = match self.integer_exponents[i] {
                Some(k) => base.powi(1 - k),
                None => base.powf(1.0 - k),
            } / (k - 1.0);
            return (value, 0.0);
        }
        // x = m + c·t/(1−t) with c = T + m, so that T + x = c/(1−t)
        let c = partial + self.bounds[i];
        let tol = if i == 0 { self.outer } else { self.inner };
        let estimate = tanh_sinh::integrate_unit(
            |_, tc| {
                let s = c / tc;
                let jacobian = c / (tc * tc);
                let weight = self.power(s, i) * jacobian;
                let (g, ge) = self.level(i + 1, s);
                (weight * g, weight * ge)
            },
            tol,
            self.min_level,
            self.max_level,
        );
        (estimate.value, estimate.error)
    }
}

/// `∫_{[0,1]^{r−1}} dy / (1 + y₁ + y₁y₂ + ⋯ + y₁⋯y_{r−1})`, the unit-cube
/// form of `ζ^C(1,…,1,2)` of depth `r`, by nested adaptive Gauss–Kronrod.
pub fn eval_unit_cube_ones(r: usize, cfg: &QuadConfig) -> Result<NumericResult> {
    if r < 2 {
        return Err(Error::Domain(format!("unit-cube form needs r >= 2, got {r}")));
    }
    let dims = r - 1;
    cfg.check_depth(dims)?;
    let tol = cfg.tolerance(r);
    let evaluations = Cell::new(0u64);
    let outer = Tolerance::absolute(tol / 2.0);
    let inner = Tolerance { abs: f64::MIN_POSITIVE, rel: tol / (2.0 * dims as f64) };
    let (value, error) = unit_cube_level(dims, 0, 1.0, 1.0, outer, inner, &evaluations);
    Ok(NumericResult { value, error_estimate: error, evaluations: evaluations.get(), converged: error <= tol })
}

/// `sum = 1 + y₁ + ⋯ + y₁⋯y_j`, `product = y₁⋯y_j` after `j` levels.
fn unit_cube_level(
    dims: usize,
    j: usize,
    sum: f64,
    product: f64,
    outer: Tolerance,
    inner: Tolerance,
    evaluations: &Cell<u64>,
) -> (f64, f64) {
    if j == dims {
        evaluations.set(evaluations.get() + 1);
        return (1.0 / sum, 0.0);
    }
    let tol = if j == 0 { outer } else { inner };
    let e = gauss_kronrod::integrate(
        |y| {
            let p = product * y;
            unit_cube_level(dims, j + 1, sum + p, p, outer, inner, evaluations)
        },
        0.0,
        1.0,
        tol,
        200,
    );
    (e.value, e.error)
}

/// `∫_{[m,∞)^d} f(x) dx` by fully numeric nested tanh-sinh quadrature. Used
/// for integrands without the partial-sum structure.
pub fn eval_semi_infinite<F>(lower: &[f64], f: F, cfg: &QuadConfig) -> Result<NumericResult>
where
    F: Fn(&[f64]) -> f64,
{
    let dims = lower.len();
    if dims == 0 {
        return Err(Error::Domain("need at least one dimension".into()));
    }
    cfg.check_depth(dims)?;
    let tol = cfg.tolerance(dims);
    let evaluations = Cell::new(0u64);
    let mut point = vec![0.0; dims];
    let ctx = SemiInfinite {
        lower,
        f: &f,
        outer: Tolerance::absolute(tol / 2.0),
        inner: Tolerance { abs: f64::MIN_POSITIVE, rel: tol / (2.0 * dims as f64) },
        cfg,
        evaluations: &evaluations,
    };
    let (value, error) = ctx.level(0, &mut point);
    Ok(NumericResult { value, error_estimate: error, evaluations: evaluations.get(), converged: error <= tol })
}

struct SemiInfinite<'a, F> {
    lower: &'a [f64],
    f: &'a F,
    outer: Tolerance,
    inner: Tolerance,
    cfg: &'a QuadConfig,
    evaluations: &'a Cell<u64>,
}

impl<F: Fn(&[f64]) -> f64> SemiInfinite<'_, F> {
    fn level(&self, i: usize, point: &mut Vec<f64>) -> (f64, f64) {
        if i == point.len() {
            self.evaluations.set(self.evaluations.get() + 1);
            return ((self.f)(point), 0.0);
        }
        let tol = if i == 0 { self.outer } else { self.inner };
        let m = self.lower[i];
        let e = tanh_sinh::integrate_unit(
            |t, tc| {
                point[i] = m + t / tc;
                let jacobian = 1.0 / (tc * tc);
                let (v, err) = self.level(i + 1, point);
                (v * jacobian, err * jacobian)
            },
            tol,
            self.cfg.min_level,
            self.cfg.max_level,
        );
        (e.value, e.error)
    }
}

/// `r!·ζ^C(1,…,1,2)` written as the symmetric integral
/// `∫_{[1,∞)^r} dx / (x₁⋯x_r (x₁+⋯+x_r))`.
pub fn eval_symmetric_ones(r: usize, cfg: &QuadConfig) -> Result<NumericResult> {
    let lower = vec![1.0; r];
    eval_semi_infinite(
        &lower,
        |x| {
            let product: f64 = x.iter().product();
            let sum: f64 = x.iter().sum();
            1.0 / (product * sum)
        },
        cfg,
    )
}

/// Outcome of a numeric check of `Σ aᵢ·lhsᵢ = Σ bⱼ·rhsⱼ + c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub lhs_value: f64,
    pub rhs_value: f64,
    pub lhs_error: f64,
    pub rhs_error: f64,
    pub discrepancy: f64,
    pub tolerance: f64,
    pub converged: bool,
    pub passed: bool,
}

pub type LinearCombination = [(ShiftedCmzv, Rational)];

/// Evaluates both sides of a linear identity numerically. The check passes
/// when every evaluation converged and the absolute discrepancy is at most
/// `tol`.
pub fn verify_identity(
    lhs: &LinearCombination,
    rhs: &LinearCombination,
    rhs_constant: &Rational,
    tol: f64,
    cfg: &QuadConfig,
) -> Result<IdentityReport> {
    let side = |terms: &LinearCombination| -> Result<(f64, f64, bool)> {
        let mut value = 0.0;
        let mut error = 0.0;
        let mut converged = true;
        for (v, c) in terms {
            if c.is_zero() {
                continue;
            }
            let r = eval_numeric(v, cfg)?;
            let c = to_f64(c);
            value += c * r.value;
            error += c.abs() * r.error_estimate;
            converged &= r.converged;
        }
        Ok((value, error, converged))
    };
    let (lhs_value, lhs_error, lc) = side(lhs)?;
    let (rhs_terms, rhs_error, rc) = side(rhs)?;
    let rhs_value = rhs_terms + to_f64(rhs_constant);
    let discrepancy = (lhs_value - rhs_value).abs();
    let converged = lc && rc;
    Ok(IdentityReport {
        lhs_value,
        rhs_value,
        lhs_error,
        rhs_error,
        discrepancy,
        tolerance: tol,
        converged,
        passed: converged && discrepancy <= tol,
    })
}
