//! Numerical layer: Cauchy principal-value double integrals, the basis
//! functions and Taylor remainder of the Pfaffian partition-function formula,
//! floating-point Pfaffians, the direct eigenvalue integral at `N = 2`, the
//! singular de Bruijn check, and a Monte Carlo cross-estimator.
//!
//! Everything here is 64-bit floating point; stated tolerances are contracts
//! enforced by the acceptance suite.

mod gauss;
mod kernels;
mod montecarlo;
mod pfaffian;
mod pv;
mod zeval;

use std::fmt;

pub use gauss::{det_lu, integrate_1d, integrate_2d, Quad};
pub use kernels::{
    basis_f, basis_f_det_exp, basis_f_det_remainder, basis_f_remainder_correction, remainder_rn,
};
pub use montecarlo::{mc_z_estimate, McEstimate};
pub use pfaffian::{pfaffian, schur_pfaffian_check, SchurPfaffian, SkewMatrix};
pub use pv::{pv_double_integral, pv_double_integral_eps, PvResult};
pub use zeval::{debruijn_pv_check, z_direct, z_theorem1, DebruijnOutcome, ZOutcome};

#[derive(Clone, Debug, PartialEq)]
pub enum PvError {
    OddDimension(usize),
    NotSkew { i: usize, j: usize },
    /// The formulas invert a Vandermonde in the spectrum; (nearly) equal
    /// entries are rejected outright.
    CoincidentSpectrum { i: usize, j: usize },
    InvalidConfig(&'static str),
    NonIntegrable(&'static str),
    ToleranceNotReached { err: f64, requested: f64 },
    UnsupportedDimension { n: usize, supported: &'static str },
    BadArgument(&'static str),
}

impl fmt::Display for PvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PvError::OddDimension(n) => write!(f, "Pfaffian needs even dimension, got {n}"),
            PvError::NotSkew { i, j } => write!(f, "matrix is not skew-symmetric at ({i},{j})"),
            PvError::CoincidentSpectrum { i, j } => {
                write!(f, "coincident spectrum: lambda[{i}] and lambda[{j}] too close")
            }
            PvError::InvalidConfig(s) => write!(f, "invalid quadrature config: {s}"),
            PvError::NonIntegrable(s) => write!(f, "non-integrable kernel: {s}"),
            PvError::ToleranceNotReached { err, requested } => {
                write!(f, "quadrature tolerance not reached: estimated {err:e}, requested {requested:e}")
            }
            PvError::UnsupportedDimension { n, supported } => {
                write!(f, "unsupported dimension N = {n} (supported: {supported})")
            }
            PvError::BadArgument(s) => write!(f, "bad argument: {s}"),
        }
    }
}

impl std::error::Error for PvError {}

/// Discretization parameters for the principal-value and plain quadratures.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadConfig {
    /// Half-width of the integration domain in the original variables.
    pub x_max: f64,
    /// Gauss-Legendre points per panel.
    pub panel_points: usize,
    /// Maximum bisection depth of the adaptive scheme.
    pub max_depth: u32,
    /// Target relative tolerance, in (0, 1e-2].
    pub rel_tol: f64,
    /// Principal value via the analytic odd fold in `u = x + y`; when false,
    /// the epsilon-cutoff + Richardson-extrapolation route is used instead.
    pub pv_fold: bool,
}

impl QuadConfig {
    pub fn new(x_max: f64, rel_tol: f64) -> Result<Self, PvError> {
        let cfg = QuadConfig { x_max, rel_tol, ..QuadConfig::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PvError> {
        if !(self.x_max > 0.0) {
            return Err(PvError::InvalidConfig("x_max must be positive"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(PvError::InvalidConfig("rel_tol must lie in (0, 1e-2]"));
        }
        if self.panel_points < 3 || self.panel_points > 64 {
            return Err(PvError::InvalidConfig("panel_points must lie in [3, 64]"));
        }
        if self.max_depth == 0 || self.max_depth > 40 {
            return Err(PvError::InvalidConfig("max_depth must lie in [1, 40]"));
        }
        Ok(())
    }
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { x_max: 10.0, panel_points: 15, max_depth: 22, rel_tol: 1e-9, pv_fold: true }
    }
}

/// Numeric kernel data: the external field, the potential `V_0` (coefficient
/// of `x^d` at index `d`) and finitely many nonzero odd times.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSpec {
    lambdas: Vec<f64>,
    v0: Vec<f64>,
    t: Vec<(u32, f64)>,
}

/// Relative gap below which two field entries count as coincident.
const SPECTRAL_GAP: f64 = 1e-8;

impl KernelSpec {
    pub fn new(lambdas: Vec<f64>, v0: Vec<f64>, t: Vec<(u32, f64)>) -> Result<Self, PvError> {
        if lambdas.is_empty() {
            return Err(PvError::BadArgument("empty spectrum"));
        }
        if lambdas.iter().any(|l| !(*l > 0.0)) {
            return Err(PvError::BadArgument("spectrum entries must be positive"));
        }
        for i in 0..lambdas.len() {
            for j in i + 1..lambdas.len() {
                let gap = (lambdas[i] - lambdas[j]).abs();
                if gap <= SPECTRAL_GAP * lambdas[i].abs().max(lambdas[j].abs()) {
                    return Err(PvError::CoincidentSpectrum { i, j });
                }
            }
        }
        if t.iter().any(|(k, _)| k % 2 == 0) {
            return Err(PvError::BadArgument("time indices must be odd"));
        }
        let spec = KernelSpec { lambdas, v0, t };
        spec.check_integrable()?;
        Ok(spec)
    }

    pub fn gaussian(lambdas: Vec<f64>) -> Result<Self, PvError> {
        Self::new(lambdas, Vec::new(), Vec::new())
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambdas.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Combined deformed potential `V_t(x) = V_0(x) + sum_j t_j x^j`.
    pub fn v_t(&self, x: f64) -> f64 {
        let mut v = 0.0;
        // Horner over the dense part
        for &c in self.v0.iter().rev() {
            v = v * x + c;
        }
        for &(k, tk) in &self.t {
            v += tk * x.powi(k as i32);
        }
        v
    }

    /// Dense coefficient list of `V_t` (index = degree).
    fn v_t_coeffs(&self) -> Vec<f64> {
        let deg_t = self.t.iter().map(|&(k, _)| k as usize).max().unwrap_or(0);
        let mut coeffs = vec![0.0; self.v0.len().max(deg_t + 1).max(1)];
        for (d, &c) in self.v0.iter().enumerate() {
            coeffs[d] = c;
        }
        for &(k, tk) in &self.t {
            coeffs[k as usize] += tk;
        }
        coeffs
    }

    /// The weight `exp(-lambda_min x^2/2 + V_t(x))` must be integrable:
    /// either the combined potential is dominated by the Gaussian (degree at
    /// most 2 with a small enough quadratic coefficient) or it has even top
    /// degree with a negative coefficient.
    fn check_integrable(&self) -> Result<(), PvError> {
        let coeffs = self.v_t_coeffs();
        let top = coeffs.iter().rposition(|c| *c != 0.0);
        match top {
            None | Some(0) | Some(1) => Ok(()),
            Some(2) => {
                if coeffs[2] < self.lambda_min() / 2.0 {
                    Ok(())
                } else {
                    Err(PvError::NonIntegrable("quadratic coefficient beats the Gaussian"))
                }
            }
            Some(d) if d % 2 == 0 && coeffs[d] < 0.0 => Ok(()),
            _ => Err(PvError::NonIntegrable(
                "top degree must be even with negative coefficient",
            )),
        }
    }

    /// A domain half-width such that the weight has decayed below `1e-18`
    /// times its peak (then typically doubled by callers for convergence
    /// checks).
    pub fn suggest_x_max(&self) -> f64 {
        let weight_log = |x: f64| -0.5 * self.lambda_min() * x * x + self.v_t(x);
        let mut peak: f64 = weight_log(0.0);
        let mut x = 0.0;
        while x < 50.0 {
            x += 0.25;
            peak = peak.max(weight_log(x)).max(weight_log(-x));
            if weight_log(x) < peak - 18.0 * std::f64::consts::LN_10
                && weight_log(-x) < peak - 18.0 * std::f64::consts::LN_10
            {
                return x;
            }
        }
        50.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(QuadConfig::new(8.0, 1e-9).is_ok());
        assert!(QuadConfig::new(0.0, 1e-9).is_err());
        assert!(QuadConfig::new(8.0, 0.5).is_err());
        assert!(QuadConfig::new(8.0, 0.0).is_err());
    }

    #[test]
    fn kernel_spec_validation() {
        assert!(KernelSpec::gaussian(vec![1.0, 2.0]).is_ok());
        assert!(matches!(
            KernelSpec::gaussian(vec![1.0, 1.0]),
            Err(PvError::CoincidentSpectrum { .. })
        ));
        assert!(KernelSpec::gaussian(vec![1.0, -2.0]).is_err());
        // quartic with negative top coefficient is fine
        assert!(KernelSpec::new(vec![1.0, 2.0], vec![0.0, 0.0, 0.0, 0.0, -0.25], vec![]).is_ok());
        // cubic top degree is rejected
        assert!(matches!(
            KernelSpec::new(vec![1.0, 2.0], vec![0.0, 0.0, 0.0, 0.1], vec![]),
            Err(PvError::NonIntegrable(_))
        ));
        // odd time on top of a quartic is fine
        assert!(KernelSpec::new(
            vec![1.0, 2.0],
            vec![0.0, 0.0, 0.0, 0.0, -0.25],
            vec![(1, 0.1)]
        )
        .is_ok());
        // bare t3 alone makes the weight blow up
        assert!(KernelSpec::new(vec![1.0, 2.0], vec![], vec![(3, 0.1)]).is_err());
        // even time index is malformed
        assert!(KernelSpec::new(vec![1.0, 2.0], vec![], vec![(2, 0.1)]).is_err());
    }

    #[test]
    fn x_max_suggestion_is_reasonable() {
        let spec = KernelSpec::gaussian(vec![1.0, 2.0]).unwrap();
        let xm = spec.suggest_x_max();
        assert!(xm > 8.0 && xm < 12.0, "xm = {xm}");
        let quartic =
            KernelSpec::new(vec![1.0, 2.0], vec![0.0, 0.0, 0.0, 0.0, -0.25], vec![]).unwrap();
        let xq = quartic.suggest_x_max();
        assert!(xq > 2.5 && xq < 6.0, "xq = {xq}");
    }
}
