//! Gauss-Legendre panel rules, adaptive 1-D/2-D quadrature, and a small
//! LU determinant.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// computed once by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("poisoned GL cache");
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(compute_gauss_legendre(n)))
        .clone()
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Value and error estimate of an adaptive quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub err: f64,
}

/// Panel integral and integral of `|f|` (the latter scales the roundoff
/// escape hatch).
fn gl_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for (x, w) in rule.0.iter().zip(rule.1.iter()) {
        let v = f(mid + half * x);
        sum += w * v;
        abs_sum += w * v.abs();
    }
    (half * sum, half.abs() * abs_sum)
}

fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    rule: &(Vec<f64>, Vec<f64>),
) -> Quad {
    let mid = 0.5 * (a + b);
    let (left, labs) = gl_panel(f, a, mid, rule);
    let (right, rabs) = gl_panel(f, mid, b, rule);
    let s2 = left + right;
    let err = (s2 - whole).abs();
    // second escape: refinement has hit roundoff relative to the mass present
    if err <= tol || err <= 1e-15 * (labs + rabs) || depth == 0 {
        return Quad { value: s2, err };
    }
    let l = adapt(f, a, mid, left, 0.5 * tol, depth - 1, rule);
    let r = adapt(f, mid, b, right, 0.5 * tol, depth - 1, rule);
    Quad { value: l.value + r.value, err: l.err + r.err }
}

/// Adaptive Gauss-Legendre integration of `f` on `[a, b]`.
pub fn integrate_1d<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_depth: u32,
    order: usize,
) -> Quad {
    if a == b {
        return Quad { value: 0.0, err: 0.0 };
    }
    let rule = gauss_legendre(order);
    let (whole, whole_abs) = gl_panel(f, a, b, &rule);
    let tol = rel_tol * whole.abs().max(1e-3 * whole_abs).max(1e-280);
    adapt(f, a, b, whole, tol, max_depth, &rule)
}

/// Adaptive 2-D integration over a rectangle by nesting: the inner (`y`)
/// integral runs at a quarter of the requested tolerance.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: &F,
    ax: f64,
    bx: f64,
    ay: f64,
    by: f64,
    rel_tol: f64,
    max_depth: u32,
    order: usize,
) -> Quad {
    let inner_err = std::cell::Cell::new(0.0f64);
    let g = |x: f64| {
        let inner = integrate_1d(&|y| f(x, y), ay, by, 0.25 * rel_tol, max_depth, order);
        inner_err.set(inner_err.get().max(inner.err));
        inner.value
    };
    let outer = integrate_1d(&g, ax, bx, rel_tol, max_depth, order);
    Quad { value: outer.value, err: outer.err + inner_err.get() * (bx - ax).abs() }
}

/// Determinant by LU with partial pivoting; 0 on a singular pivot column.
pub fn det_lu(matrix: &[Vec<f64>]) -> f64 {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut det = 1.0;
    for k in 0..n {
        let pivot = (k..n).max_by(|&i, &j| {
            a[i][k].abs().partial_cmp(&a[j][k].abs()).expect("no NaN in det")
        });
        let p = pivot.expect("nonempty range");
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let mu = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= mu * a[k][j];
            }
        }
    }
    det
}
