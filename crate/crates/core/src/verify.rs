//! Numerical verification suites.
//!
//! Each suite expands into a list of independent checks. Distinct values are
//! evaluated once, concurrently on a pool of `jobs` threads, and the checks
//! are reported in a fixed order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::compositions::{composition_from_word, convergence_bound, Composition, Word};
use crate::error::{Error, Result};
use crate::etaspace::{sum_formula_lhs_terms, sum_formula_rhs, telescoping_sides};
use crate::poles::{depth1_value, perm_min_sequence, pole_hyperplanes};
use crate::quad::{eval_numeric, eval_symmetric_ones, eval_unit_cube_ones, NumericResult, QuadConfig, ShiftedCmzv};
use crate::rational::{frac, int, to_f64, Rational};
use crate::reduce::{basis_ids, depth_embedding, depth_two_closed_form, reduce_to_basis, ReduceConfig, SymbolicConstant};
use crate::shuffle::{shuffle, z_map};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    ClosedForms,
    Shuffle,
    Embedding,
    UnitCube,
    Bounds,
    Reduction,
    SumFormula,
    Poles,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::ClosedForms,
        Suite::Shuffle,
        Suite::Embedding,
        Suite::UnitCube,
        Suite::Bounds,
        Suite::Reduction,
        Suite::SumFormula,
        Suite::Poles,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ClosedForms => "closedforms",
            Suite::Shuffle => "shuffle",
            Suite::Embedding => "embedding",
            Suite::UnitCube => "unitcube",
            Suite::Bounds => "bounds",
            Suite::Reduction => "reduction",
            Suite::SumFormula => "sumformula",
            Suite::Poles => "poles",
        }
    }

    /// Weight limit used when none is configured.
    pub fn default_max_weight(self) -> u32 {
        match self {
            Suite::Shuffle => 7,
            Suite::Embedding => 5,
            Suite::UnitCube => 4,
            Suite::Bounds | Suite::Reduction => 6,
            Suite::ClosedForms | Suite::SumFormula | Suite::Poles => 0,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a suite name; `all` expands to every suite.
pub fn parse_suites(name: &str) -> Result<Vec<Suite>> {
    if name == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    Ok(vec![Suite::from_str(name)?])
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub quad: QuadConfig,
    pub reduce: ReduceConfig,
    /// Overrides [`Suite::default_max_weight`].
    pub max_weight: Option<u32>,
    pub jobs: usize,
    pub seed: u64,
    /// Corrupts the reference value of `log 2` so that checks relying on it
    /// fail.
    pub inject_fault: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            quad: QuadConfig::with_tol(1e-9),
            reduce: ReduceConfig::default(),
            max_weight: None,
            jobs: 1,
            seed: 0,
            inject_fault: false,
        }
    }
}

impl VerifyConfig {
    fn ln2(&self) -> f64 {
        if self.inject_fault {
            std::f64::consts::LN_2 + 1e-3
        } else {
            std::f64::consts::LN_2
        }
    }

    fn max_weight(&self, suite: Suite) -> u32 {
        self.max_weight.unwrap_or_else(|| suite.default_max_weight())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub discrepancy: f64,
    pub tolerance: f64,
    pub converged: bool,
    pub passed: bool,
}

impl Check {
    fn numeric(suite: Suite, name: String, lhs: f64, rhs: f64, tolerance: f64, converged: bool) -> Self {
        let discrepancy = (lhs - rhs).abs();
        Check { suite, name, lhs, rhs, discrepancy, tolerance, converged, passed: converged && discrepancy <= tolerance }
    }

    /// A check of an exact statement; `lhs`/`rhs` are informative.
    fn exact(suite: Suite, name: String, holds: bool, lhs: f64, rhs: f64) -> Self {
        Check {
            suite,
            name,
            lhs,
            rhs,
            discrepancy: (lhs - rhs).abs(),
            tolerance: 0.0,
            converged: true,
            passed: holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.len() - self.passed()
    }

    /// Failures where every evaluation converged.
    pub fn genuine_failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed && c.converged).count()
    }

    pub fn non_converged(&self) -> usize {
        self.checks.iter().filter(|c| !c.converged).count()
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Memo of numeric values keyed by the shifted value.
pub struct ValueTable(BTreeMap<ShiftedCmzv, NumericResult>);

impl ValueTable {
    /// Evaluates all `values` concurrently.
    pub fn compute(values: BTreeSet<ShiftedCmzv>, cfg: &QuadConfig) -> Result<Self> {
        let list: Vec<ShiftedCmzv> = values.into_iter().collect();
        let results: Vec<Result<NumericResult>> = list.par_iter().map(|v| eval_numeric(v, cfg)).collect();
        let mut map = BTreeMap::new();
        for (v, r) in list.into_iter().zip(results) {
            map.insert(v, r?);
        }
        Ok(ValueTable(map))
    }

    pub fn get(&self, v: &ShiftedCmzv) -> NumericResult {
        self.0[v]
    }

    fn of(&self, c: &Composition) -> NumericResult {
        self.get(&ShiftedCmzv::unshifted(c.clone()))
    }

    /// `Σ coeff·ζ^C(c)` with its error bound and convergence flag.
    fn combination(&self, terms: &[(Composition, Rational)]) -> (f64, f64, bool) {
        terms.iter().fold((0.0, 0.0, true), |(v, e, ok), (c, q)| {
            let r = self.of(c);
            let q = to_f64(q);
            (v + q * r.value, e + q.abs() * r.error_estimate, ok && r.converged)
        })
    }
}

fn unshifted_set<'a>(cs: impl IntoIterator<Item = &'a Composition>) -> BTreeSet<ShiftedCmzv> {
    cs.into_iter().map(|c| ShiftedCmzv::unshifted(c.clone())).collect()
}

/// Nonempty admissible words of length at most `n`.
pub fn admissible_words(n: usize) -> Vec<Word> {
    (2..=n).flat_map(Word::all_of_length).filter(|w| w.is_admissible()).collect()
}

/// Runs the suites on a pool of `cfg.jobs` threads.
pub fn run(suites: &[Suite], cfg: &VerifyConfig) -> Result<Report> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| Error::Capacity(e.to_string()))?;
    pool.install(|| {
        let mut checks = Vec::new();
        for &suite in suites {
            checks.extend(run_suite(suite, cfg)?);
        }
        Ok(Report { checks })
    })
}

fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    match suite {
        Suite::ClosedForms => closed_forms(cfg),
        Suite::Shuffle => shuffle_suite(cfg),
        Suite::Embedding => embedding_suite(cfg),
        Suite::UnitCube => unit_cube_suite(cfg),
        Suite::Bounds => bounds_suite(cfg),
        Suite::Reduction => reduction_suite(cfg),
        Suite::SumFormula => sum_formula_suite(cfg),
        Suite::Poles => poles_suite(),
    }
}

fn closed_forms(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let s = Suite::ClosedForms;
    let mut values = BTreeSet::new();
    for k in 1..=8u64 {
        values.insert(ShiftedCmzv::from_integers(&[1], &[1 + k as u32])?);
    }
    for m1 in 1..6u64 {
        for m2 in 1..=(6 - m1) {
            values.insert(ShiftedCmzv::from_integers(&[m1, m2], &[1, 2])?);
        }
    }
    values.insert(ShiftedCmzv::from_integers(&[1, 1], &[2, 2])?);
    values.insert(ShiftedCmzv::from_integers(&[1, 1], &[1, 3])?);
    let table = ValueTable::compute(values, &cfg.quad)?;
    let ln2 = cfg.ln2();
    let mut out = Vec::new();
    for k in 1..=8u32 {
        let r = table.get(&ShiftedCmzv::from_integers(&[1], &[1 + k])?);
        out.push(Check::numeric(s, format!("ζ^C({}) = 1/{k}", 1 + k), r.value, 1.0 / k as f64, 1e-9, r.converged));
    }
    let r = table.get(&ShiftedCmzv::from_integers(&[1, 1], &[1, 2])?);
    out.push(Check::numeric(s, "ζ^C(1,2) = log 2".into(), r.value, ln2, 1e-8, r.converged));
    let r = table.get(&ShiftedCmzv::from_integers(&[1, 1], &[2, 2])?);
    out.push(Check::numeric(s, "ζ^C(2,2) = 1 − log 2".into(), r.value, 1.0 - ln2, 1e-8, r.converged));
    let r = table.get(&ShiftedCmzv::from_integers(&[1, 1], &[1, 3])?);
    out.push(Check::numeric(s, "ζ^C(1,3) = (log 2)/2 − 1/4".into(), r.value, ln2 / 2.0 - 0.25, 1e-8, r.converged));
    for m1 in 1..6u64 {
        for m2 in 1..=(6 - m1) {
            let r = table.get(&ShiftedCmzv::from_integers(&[m1, m2], &[1, 2])?);
            let want = (((m1 + m2) as f64) / m1 as f64).ln() / m2 as f64;
            out.push(Check::numeric(
                s,
                format!("ζ^C_{{{m1},{m2}}}(1,2) = (1/{m2})·log({}/{m1})", m1 + m2),
                r.value,
                want,
                1e-8,
                r.converged,
            ));
        }
    }
    Ok(out)
}

fn shuffle_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let s = Suite::Shuffle;
    let max = cfg.max_weight(s) as usize;
    let words = admissible_words(max);
    let mut pairs = Vec::new();
    for (i, a) in words.iter().enumerate() {
        for b in &words[i..] {
            if a.len() + b.len() <= max {
                pairs.push((a.clone(), b.clone()));
            }
        }
    }
    let mut needed = BTreeSet::new();
    let mut products = Vec::with_capacity(pairs.len());
    for (a, b) in &pairs {
        let image = z_map(&shuffle(a, b))?;
        needed.extend(unshifted_set(image.terms.iter().map(|(c, _)| c)));
        needed.extend(unshifted_set([&composition_from_word(a)?, &composition_from_word(b)?]));
        products.push(image);
    }
    let table = ValueTable::compute(needed, &cfg.quad)?;

    let mut out = Vec::new();
    for ((a, b), image) in pairs.iter().zip(&products) {
        let (lhs, lhs_err, lhs_ok) = table.combination(&image.terms);
        let lhs = lhs + to_f64(&image.constant);
        let za = table.of(&composition_from_word(a)?);
        let zb = table.of(&composition_from_word(b)?);
        let rhs = za.value * zb.value;
        let converged = lhs_ok && za.converged && zb.converged && lhs_err.is_finite();
        out.push(Check::numeric(s, format!("Z({a} ⧢ {b}) = Z({a})·Z({b})"), lhs, rhs, 1e-5, converged));
    }

    // exact form wherever both factors reduce to rationals
    for ((a, b), image) in pairs.iter().zip(&products) {
        let ra = reduce_to_basis(&composition_from_word(a)?, &cfg.reduce)?.value;
        let rb = reduce_to_basis(&composition_from_word(b)?, &cfg.reduce)?.value;
        if !(ra.logs().is_empty() && ra.basis().is_empty() && rb.logs().is_empty() && rb.basis().is_empty()) {
            continue;
        }
        let mut lhs = SymbolicConstant::from_rational(image.constant.clone());
        for (c, q) in &image.terms {
            lhs.add_scaled(&reduce_to_basis(c, &cfg.reduce)?.value, q);
        }
        let rhs = SymbolicConstant::from_rational(ra.rational() * rb.rational());
        out.push(Check::exact(
            s,
            format!("exact Z({a} ⧢ {b}) = {lhs} = {rhs}"),
            lhs == rhs,
            lhs.rational_and_logs_f64(),
            rhs.rational_and_logs_f64(),
        ));
    }
    Ok(out)
}

fn embedding_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let s = Suite::Embedding;
    let cs = Composition::admissible_up_to(cfg.max_weight(s));
    let mut triples = Vec::new();
    for c in &cs {
        let (a, b) = depth_embedding(c)?;
        triples.push((c.clone(), a, b));
    }
    let table = ValueTable::compute(unshifted_set(triples.iter().flat_map(|(c, a, b)| [c, a, b])), &cfg.quad)?;
    Ok(triples
        .iter()
        .map(|(c, a, b)| {
            let (zc, za, zb) = (table.of(c), table.of(a), table.of(b));
            Check::numeric(
                s,
                format!("ζ^C{c} = ζ^C{a} + ζ^C{b}"),
                zc.value,
                za.value + zb.value,
                1e-6,
                zc.converged && za.converged && zb.converged,
            )
        })
        .collect())
}

fn unit_cube_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let s = Suite::UnitCube;
    let max = cfg.max_weight(s).max(2) as usize;
    let rows: Vec<Result<Check>> = (2..=max)
        .into_par_iter()
        .map(|r| {
            let mut parts = vec![1; r];
            parts[r - 1] = 2;
            let direct = eval_numeric(&ShiftedCmzv::unshifted(Composition::new(parts)?), &cfg.quad)?;
            let cube = eval_unit_cube_ones(r, &cfg.quad)?;
            Ok(Check::numeric(
                s,
                format!("unit cube r={r}"),
                cube.value,
                direct.value,
                1e-6,
                cube.converged && direct.converged,
            ))
        })
        .collect();
    let mut out = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let cube = eval_unit_cube_ones(2, &cfg.quad)?;
    out.push(Check::numeric(s, "unit cube r=2 = log 2".into(), cube.value, cfg.ln2(), 1e-8, cube.converged));
    let sym = eval_symmetric_ones(2, &cfg.quad)?;
    let direct = eval_numeric(&ShiftedCmzv::from_integers(&[1, 1], &[1, 2])?, &cfg.quad)?;
    out.push(Check::numeric(
        s,
        "symmetric integral r=2 = 2·ζ^C(1,2)".into(),
        sym.value,
        2.0 * direct.value,
        1e-6,
        sym.converged && direct.converged,
    ));
    Ok(out)
}

fn bounds_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let s = Suite::Bounds;
    let cs = Composition::admissible_up_to(cfg.max_weight(s));
    let table = ValueTable::compute(unshifted_set(&cs), &cfg.quad)?;
    cs.iter()
        .map(|c| {
            let r = table.of(c);
            let bound = convergence_bound(&c.to_real_tuple())?;
            // at depth one the bound is the value itself
            let (holds, name) = if c.depth() == 1 {
                ((r.value - bound).abs() <= 1e-15 * bound, format!("ζ^C{c} = {bound:.6}"))
            } else {
                (r.value > 0.0 && r.value + r.error_estimate < bound, format!("0 < ζ^C{c} < {bound:.6}"))
            };
            let mut check = Check::exact(s, name, holds, r.value, bound);
            check.converged = r.converged;
            check.passed &= r.converged;
            Ok(check)
        })
        .collect()
}

fn reduction_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let s = Suite::Reduction;
    let cs = Composition::admissible_up_to(cfg.max_weight(s));
    let reductions: Vec<Result<_>> = cs.par_iter().map(|c| reduce_to_basis(c, &cfg.reduce)).collect();
    let reductions = reductions.into_iter().collect::<Result<Vec<_>>>()?;
    let mut needed = unshifted_set(&cs);
    for r in &reductions {
        for id in r.value.basis().keys() {
            needed.insert(crate::reduce::basis_value(id)?);
        }
    }
    let table = ValueTable::compute(needed, &cfg.quad)?;
    let ln2 = cfg.ln2();
    let mut out = Vec::new();
    for (c, r) in cs.iter().zip(&reductions) {
        let direct = table.of(c);
        let mut value = to_f64(r.value.rational())
            + r.value.logs().iter().map(|(p, q)| to_f64(q) * if *p == 2 { ln2 } else { (*p as f64).ln() }).sum::<f64>();
        let mut converged = direct.converged;
        for (id, q) in r.value.basis() {
            let b = table.get(&crate::reduce::basis_value(id)?);
            value += to_f64(q) * b.value;
            converged &= b.converged;
        }
        out.push(Check::numeric(s, format!("ζ^C{c} = {}", r.value), value, direct.value, 1e-6, converged));
        let depth = c.depth() as u64;
        let ids_ok = r.value.basis().keys().all(|id| id.len() <= c.depth() && id.iter().sum::<u64>() == depth);
        out.push(Check::exact(s, format!("basis ids of ζ^C{c} sum to {depth}"), ids_ok, 0.0, 0.0));
    }
    for r in 1..=10u32 {
        let n = basis_ids(r).len();
        out.push(Check::exact(s, format!("basis count r={r} is 2^{}", r - 1), n == 1 << (r - 1), n as f64, (1u64 << (r - 1)) as f64));
    }
    for m1 in 1..6u64 {
        for m2 in 1..=(6 - m1) {
            let closed = depth_two_closed_form(&int(m1 as i64), &int(m2 as i64))?;
            let want = (((m1 + m2) as f64) / m1 as f64).ln() / m2 as f64;
            let got = closed.rational_and_logs_f64();
            out.push(Check::numeric(s, format!("ζ^C_{{{m1},{m2}}}(1,2) = {closed}"), got, want, 1e-12, true));
        }
    }
    Ok(out)
}

/// `(r, k, tolerance)` pairs checked numerically.
pub const SUM_FORMULA_CASES: [(usize, u32, f64); 5] = [(2, 4, 1e-6), (2, 6, 1e-6), (3, 7, 1e-6), (3, 9, 1e-6), (4, 9, 1e-3)];

fn nonzero_lhs_terms(r: usize, k: u32) -> Result<Vec<(Composition, Rational)>> {
    Ok(sum_formula_lhs_terms(r, k)?
        .into_iter()
        .filter(|t| !t.weight.is_zero())
        .map(|t| (t.composition, t.weight))
        .collect())
}

/// Numeric left-hand side of the weighted sum formula with its error bound.
pub fn sum_formula_lhs(r: usize, k: u32, cfg: &QuadConfig) -> Result<NumericResult> {
    let terms = nonzero_lhs_terms(r, k)?;
    let table = ValueTable::compute(unshifted_set(terms.iter().map(|(c, _)| c)), cfg)?;
    let (value, error_estimate, converged) = table.combination(&terms);
    let evaluations = table.0.values().map(|v| v.evaluations).sum();
    Ok(NumericResult { value, error_estimate, evaluations, converged })
}

fn sum_formula_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let s = Suite::SumFormula;
    let mut out = Vec::new();
    let inv_pow = |b: i64, e: u32| Rational::one() / Rational::from_integer(b.pow(e).into());
    for k in 3..=12u32 {
        let rhs = sum_formula_rhs(2, k)?;
        let want = int(1) - inv_pow(2, k - 2);
        out.push(Check::exact(s, format!("rhs(2,{k}) = 1 − 1/2^{}", k - 2), rhs == want, to_f64(&rhs), to_f64(&want)));
    }
    for k in 5..=12u32 {
        let rhs = sum_formula_rhs(3, k)?;
        let want = frac(1, 2) - inv_pow(2, k - 4) + frac(1, 2) * inv_pow(3, k - 4);
        out.push(Check::exact(s, format!("rhs(3,{k}) closed form"), rhs == want, to_f64(&rhs), to_f64(&want)));
    }
    for k in 7..=12u32 {
        let rhs = sum_formula_rhs(4, k)?;
        let want = frac(1, 6) - frac(1, 2) * inv_pow(2, k - 6) + frac(1, 2) * inv_pow(3, k - 6) - frac(1, 6) * inv_pow(4, k - 6);
        out.push(Check::exact(s, format!("rhs(4,{k}) closed form"), rhs == want, to_f64(&rhs), to_f64(&want)));
    }

    let mut lhs_terms = Vec::new();
    let mut needed = BTreeSet::new();
    for &(r, k, _) in &SUM_FORMULA_CASES {
        let terms = nonzero_lhs_terms(r, k)?;
        needed.extend(unshifted_set(terms.iter().map(|(c, _)| c)));
        lhs_terms.push(terms);
    }
    let table = ValueTable::compute(needed, &cfg.quad)?;
    for (&(r, k, tol), terms) in SUM_FORMULA_CASES.iter().zip(&lhs_terms) {
        let (lhs, _, converged) = table.combination(terms);
        let rhs = sum_formula_rhs(r, k)?;
        out.push(Check::numeric(s, format!("sum formula r={r} k={k}"), lhs, to_f64(&rhs), tol, converged));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..20 {
        let big_k = rng.gen_range(2..=8);
        let c = rng.gen_range(1..=6u64);
        let x = frac(rng.gen_range(1..=40), rng.gen_range(1..=7));
        let (l, r) = telescoping_sides(big_k, c, &x)?;
        out.push(Check::exact(s, format!("telescoping K={big_k} c={c} x={x}"), l == r, to_f64(&l), to_f64(&r)));
    }
    Ok(out)
}

fn poles_suite() -> Result<Vec<Check>> {
    let s = Suite::Poles;
    let mut out = Vec::new();
    for k_max in 1..=6u32 {
        let got = pole_hyperplanes(1, k_max)?;
        let holds = got.len() == k_max as usize
            && got.iter().all(|h| h.coeffs == [1] && h.constant <= 1 && h.constant > 1 - k_max as i64);
        out.push(Check::exact(s, format!("depth-one candidates k_max={k_max}"), holds, got.len() as f64, k_max as f64));
    }
    for r in 1..=6usize {
        let mut holds = true;
        for sigma in (1..=r).permutations(r) {
            let m = perm_min_sequence(&sigma)?;
            holds &= m.last() == Some(&1) && m.windows(2).all(|w| w[0] >= w[1]) && m[0] == sigma[0];
        }
        out.push(Check::exact(s, format!("running minima r={r}"), holds, 0.0, 0.0));
    }
    for s_val in [2.0, 3.0, 4.5] {
        let v = depth1_value(s_val)?;
        out.push(Check::numeric(s, format!("ζ^C({s_val}) = 1/({s_val} − 1)"), v, 1.0 / (s_val - 1.0), 0.0, true));
    }
    Ok(out)
}
