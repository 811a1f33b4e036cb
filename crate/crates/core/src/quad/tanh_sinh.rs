//! Tanh-sinh (double exponential) quadrature on `[0, 1)`.
//!
//! Nodes are `t = (1 + tanh(π/2·sinh u)) / 2` with weight
//! `dt/du = π cosh(u) t (1−t)`. Both `t` and `1−t` are tabulated so callers
//! can map `t ↦ m + t/(1−t)` without cancellation near `t = 1`; no node is
//! ever placed at either endpoint.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::{Estimate, Tolerance};

/// Nodes whose weight falls below this are dropped from the table.
const MIN_WEIGHT: f64 = 1e-20;
/// Finest refinement level kept in the table (step `2^-MAX_LEVEL`).
pub const MAX_LEVEL: usize = 10;

#[derive(Debug, Clone, Copy)]
struct Node {
    t: f64,
    t_complement: f64,
    weight: f64,
}

struct Table {
    /// `levels[0]` holds the nodes `u = 0, ±1, ±2, …`; `levels[j]` holds the
    /// odd multiples of `2^-j` added by refinement `j`.
    levels: Vec<Vec<Node>>,
}

fn node(u: f64) -> Node {
    let s = PI / 2.0 * u.sinh();
    // t = 1/(1+e^{-2s}), 1-t = 1/(1+e^{2s})
    let t = 1.0 / (1.0 + (-2.0 * s).exp());
    let t_complement = 1.0 / (1.0 + (2.0 * s).exp());
    Node { t, t_complement, weight: PI * u.cosh() * t * t_complement }
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut levels = Vec::with_capacity(MAX_LEVEL + 1);
        for level in 0..=MAX_LEVEL {
            let h = 0.5f64.powi(level as i32);
            let mut nodes = Vec::new();
            let (start, stride) = if level == 0 { (0usize, 1usize) } else { (1, 2) };
            if level == 0 {
                nodes.push(node(0.0));
            }
            let mut i = start.max(1);
            loop {
                let u = i as f64 * h;
                let n = node(u);
                if n.weight < MIN_WEIGHT {
                    break;
                }
                nodes.push(n);
                nodes.push(node(-u));
                i += stride;
            }
            levels.push(nodes);
        }
        Table { levels }
    })
}

/// Integrates `f` over `[0, 1)`. The integrand receives `(t, 1−t)` and
/// returns its value together with an error bound on that value (zero for
/// closed-form integrands, nonzero when the value is itself a quadrature).
///
/// Refinement stops at the first level `≥ min_level` where the change from
/// the previous level plus the propagated integrand error meets `tol`.
pub fn integrate_unit<F>(mut f: F, tol: Tolerance, min_level: usize, max_level: usize) -> Estimate
where
    F: FnMut(f64, f64) -> (f64, f64),
{
    let table = table();
    let max_level = max_level.min(MAX_LEVEL);
    let mut sum = 0.0;
    let mut propagated = 0.0;
    let mut evaluations = 0u64;
    let mut previous = f64::NAN;
    let mut estimate = Estimate { value: 0.0, error: f64::INFINITY, evaluations: 0, converged: false };

    for (level, nodes) in table.levels.iter().enumerate().take(max_level + 1) {
        for n in nodes {
            let (v, e) = f(n.t, n.t_complement);
            sum += n.weight * v;
            propagated += n.weight * e.abs();
            evaluations += 1;
        }
        let h = 0.5f64.powi(level as i32);
        let value = h * sum;
        let inner = h * propagated;
        let diff = if previous.is_nan() { f64::INFINITY } else { (value - previous).abs() };
        estimate = Estimate { value, error: diff + inner, evaluations, converged: false };
        if level >= min_level && level >= 1 && tol.accepts(estimate.error, value) {
            estimate.converged = true;
            return estimate;
        }
        previous = value;
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;

    const TIGHT: Tolerance = Tolerance { abs: 1e-13, rel: 0.0 };

    #[test]
    fn polynomial() {
        let e = integrate_unit(|t, _| (t * t, 0.0), TIGHT, 2, MAX_LEVEL);
        assert!(e.converged);
        assert!((e.value - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn endpoint_singularities() {
        // ∫ log(1-t) dt = -1, ∫ t^{-1/2} dt = 2
        let e = integrate_unit(|_, tc| (tc.ln(), 0.0), TIGHT, 2, MAX_LEVEL);
        assert!((e.value + 1.0).abs() < 1e-12, "{e:?}");
        let e = integrate_unit(|t, _| (t.powf(-0.5), 0.0), Tolerance { abs: 1e-10, rel: 0.0 }, 2, MAX_LEVEL);
        assert!((e.value - 2.0).abs() < 1e-9, "{e:?}");
    }

    #[test]
    fn complement_is_accurate_near_one() {
        let table = table();
        for nodes in &table.levels {
            for n in nodes {
                assert!(n.t > 0.0 && n.t <= 1.0);
                assert!(n.t_complement > 0.0 && n.t_complement <= 1.0);
                assert!((n.t + n.t_complement - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn propagated_error_is_reported() {
        let e = integrate_unit(|_, _| (1.0, 1e-3), TIGHT, 2, 4);
        assert!(!e.converged);
        assert!((e.error - 1e-3).abs() < 1e-6, "{e:?}");
    }
}
