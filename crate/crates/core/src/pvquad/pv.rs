//! Cauchy principal-value double integrals
//! `pv int (x-y)/(x+y) f(x) g(y) rho(x) rho(y) dx dy`.
//!
//! Default route: rotate to `u = x + y`, `v = x - y` (Jacobian 1/2) and fold
//! the odd kernel, `int_{u>0} (v/u) [W(u,v) - W(-u,v)] du dv`; the bracket is
//! `O(u)`, so the folded integrand is smooth and ordinary adaptive panels
//! converge at full order.
//!
//! Oracle route: cut out `|x + y| < eps` in the original coordinates and
//! Richardson-extrapolate `eps -> 0` (the cutoff error expands in odd powers
//! of `eps`). Kept deliberately independent of the fold for cross-checks.

use super::gauss::{integrate_1d, integrate_2d};
use super::{PvError, QuadConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PvResult {
    pub value: f64,
    pub err: f64,
}

/// Principal value by the route selected in `cfg` (`pv_fold`).
pub fn pv_double_integral<F, G, R>(
    f: F,
    g: G,
    rho: R,
    cfg: &QuadConfig,
) -> Result<PvResult, PvError>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
    R: Fn(f64) -> f64,
{
    cfg.validate()?;
    if cfg.pv_fold {
        pv_fold(&f, &g, &rho, cfg)
    } else {
        pv_double_integral_eps(&f, &g, &rho, cfg)
    }
}

fn pv_fold<F, G, R>(f: &F, g: &G, rho: &R, cfg: &QuadConfig) -> Result<PvResult, PvError>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
    R: Fn(f64) -> f64,
{
    let l = 2.0 * cfg.x_max;
    // W(u, v) = f(x) g(y) rho(x) rho(y) at x = (u+v)/2, y = (u-v)/2
    let w = |u: f64, v: f64| {
        let x = 0.5 * (u + v);
        let y = 0.5 * (u - v);
        f(x) * g(y) * rho(x) * rho(y)
    };
    // phi(u) = (1/2) int dv (v/u) [W(u,v) - W(-u,v)]
    let phi = |u: f64| {
        let inner = integrate_1d(
            &|v: f64| v * (w(u, v) - w(-u, v)),
            -l,
            l,
            0.25 * cfg.rel_tol,
            cfg.max_depth,
            cfg.panel_points,
        );
        0.5 * inner.value / u
    };
    let outer = integrate_1d(&phi, 0.0, l, cfg.rel_tol, cfg.max_depth, cfg.panel_points);
    Ok(PvResult { value: outer.value, err: outer.err })
}

/// Epsilon-cutoff evaluation `int_{|x+y| >= eps}` in the original
/// coordinates: for each `x`, the `y` integral runs over
/// `[-x_max, -x-eps] U [-x+eps, x_max]` (clamped).
fn pv_eps_cutoff<F, G, R>(f: &F, g: &G, rho: &R, cfg: &QuadConfig, eps: f64) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
    R: Fn(f64) -> f64,
{
    let xm = cfg.x_max;
    let integrand = |x: f64, y: f64| (x - y) / (x + y) * f(x) * g(y) * rho(x) * rho(y);
    let outer = integrate_1d(
        &|x: f64| {
            let mut total = 0.0;
            let hi_end = -x - eps;
            if hi_end > -xm {
                total += integrate_1d(
                    &|y: f64| integrand(x, y),
                    -xm,
                    hi_end,
                    0.2 * cfg.rel_tol,
                    cfg.max_depth,
                    cfg.panel_points,
                )
                .value;
            }
            let lo_start = -x + eps;
            if lo_start < xm {
                total += integrate_1d(
                    &|y: f64| integrand(x, y),
                    lo_start,
                    xm,
                    0.2 * cfg.rel_tol,
                    cfg.max_depth,
                    cfg.panel_points,
                )
                .value;
            }
            total
        },
        -xm,
        xm,
        cfg.rel_tol,
        cfg.max_depth,
        cfg.panel_points,
    );
    outer.value
}

/// Richardson extrapolation through the odd-power error ladder
/// `I_eps = I + a1 eps + a3 eps^3 + a5 eps^5 + ...` on a halving sequence.
fn richardson_odd(values: &[f64]) -> (f64, f64) {
    let mut v = values.to_vec();
    let mut power = 1i32;
    while v.len() > 1 {
        let f = 2f64.powi(power);
        let mut next = Vec::with_capacity(v.len() - 1);
        for i in 0..v.len() - 1 {
            // v[i] at eps, v[i+1] at eps/2
            next.push((f * v[i + 1] - v[i]) / (f - 1.0));
        }
        v = next;
        power += 2;
    }
    // the last elimination step size doubles as an error estimate
    (v[0], f64::EPSILON)
}

/// The epsilon-cutoff + Richardson oracle (independent of the fold route).
pub fn pv_double_integral_eps<F, G, R>(
    f: &F,
    g: &G,
    rho: &R,
    cfg: &QuadConfig,
) -> Result<PvResult, PvError>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
    R: Fn(f64) -> f64,
{
    cfg.validate()?;
    let eps0 = 0.4337f64; // deliberately unround so the cutoff never sits on a panel edge
    let levels = 5;
    let mut values = Vec::with_capacity(levels);
    let mut eps = eps0;
    for _ in 0..levels {
        values.push(pv_eps_cutoff(f, g, rho, cfg, eps));
        eps *= 0.5;
    }
    let (value, _) = richardson_odd(&values);
    // spread of the last two extrapolants as an error proxy
    let (prev, _) = richardson_odd(&values[..levels - 1]);
    let err = (value - prev).abs();
    Ok(PvResult { value, err })
}
