//! Taylor remainder `R_N` and the basis functions `F_{N;n}` in their three
//! equivalent forms.

use super::gauss::det_lu;
use super::PvError;

/// `R_N(xi) = e^xi - sum_{k<N} xi^k/k!`, the N-th Taylor remainder of the
/// exponential, evaluated stably:
/// - tail series `sum_{k>=N} xi^k/k!` for `xi >= -N` (all-positive terms for
///   positive `xi`; immediately decreasing alternating terms otherwise),
/// - the direct formula with compensated summation of the Taylor polynomial
///   for `xi < -N`, where `e^xi` is negligible and no cancellation occurs.
pub fn remainder_rn(n: u32, xi: f64) -> f64 {
    assert!(n >= 1, "remainder order must be at least 1");
    if xi == 0.0 {
        return 0.0;
    }
    if xi >= -(n as f64) {
        // tail series
        let mut term = 1.0;
        for k in 1..=n {
            term *= xi / k as f64;
        }
        let mut sum = term;
        let mut k = n;
        loop {
            k += 1;
            term *= xi / k as f64;
            let prev = sum;
            sum += term;
            if sum == prev || k > n + 700 {
                return sum;
            }
        }
    }
    // direct formula, Neumaier-compensated partial sum
    let mut partial = 0.0f64;
    let mut comp = 0.0f64;
    let mut term = 1.0f64;
    for k in 0..n {
        if k > 0 {
            term *= xi / k as f64;
        }
        let t = partial + term;
        if partial.abs() >= term.abs() {
            comp += (partial - t) + term;
        } else {
            comp += (term - t) + partial;
        }
        partial = t;
    }
    xi.exp() - (partial + comp)
}

fn validate_lambdas(lambdas: &[f64]) -> Result<(), PvError> {
    for i in 0..lambdas.len() {
        for j in i + 1..lambdas.len() {
            if (lambdas[i] - lambdas[j]).abs()
                <= 1e-8 * lambdas[i].abs().max(lambdas[j].abs())
            {
                return Err(PvError::CoincidentSpectrum { i, j });
            }
        }
    }
    Ok(())
}

/// Elementary symmetric polynomials `e_0, .., e_{N-1}` of the spectrum with
/// entry `skip` removed.
fn elem_sym_excluding(lambdas: &[f64], skip: usize) -> Vec<f64> {
    let mut e = vec![0.0; lambdas.len()];
    e[0] = 1.0;
    let mut count = 0;
    for (i, &l) in lambdas.iter().enumerate() {
        if i == skip {
            continue;
        }
        count += 1;
        for k in (1..=count).rev() {
            e[k] += l * e[k - 1];
        }
    }
    e
}

/// `v_n = (-1)^n / (2^n n!)`, the normalization making `F_{N;n} = x^{2n} + O(x^{2N})`.
fn v_norm(n: usize) -> f64 {
    let mut f = 1.0;
    for k in 1..=n {
        f *= k as f64;
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign / (2f64.powi(n as i32) * f)
}

/// Lagrange coefficients `c_{i,n}` with
/// `F_{N;n}(x) = (1/v_n) sum_i c_{i,n} exp(-lambda_i x^2/2)`:
/// `c_{i,n}` is the `xi^n` coefficient of the interpolating polynomial through
/// `(lambda_i, delta_i)`, i.e. the transposed inverse Vandermonde.
pub(crate) fn lagrange_coefficients(lambdas: &[f64]) -> Vec<Vec<f64>> {
    let n_dim = lambdas.len();
    let mut c = vec![vec![0.0; n_dim]; n_dim];
    for i in 0..n_dim {
        let e = elem_sym_excluding(lambdas, i);
        let mut denom = 1.0;
        for (j, &l) in lambdas.iter().enumerate() {
            if j != i {
                denom *= lambdas[i] - l;
            }
        }
        for n in 0..n_dim {
            let k = n_dim - 1 - n;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            c[i][n] = sign * e[k] / denom;
        }
    }
    c
}

/// `F_{N;n}(x)` by the inverse-Vandermonde representation (the default,
/// well-conditioned form). `N = lambdas.len()`, `0 <= n <= N-1`.
pub fn basis_f(lambdas: &[f64], n: usize, x: f64) -> Result<f64, PvError> {
    if n >= lambdas.len() {
        return Err(PvError::BadArgument("basis index must be below the dimension"));
    }
    validate_lambdas(lambdas)?;
    let c = lagrange_coefficients(lambdas);
    Ok(basis_f_from_coefficients(lambdas, &c, n, x))
}

pub(crate) fn basis_f_from_coefficients(
    lambdas: &[f64],
    coeffs: &[Vec<f64>],
    n: usize,
    x: f64,
) -> f64 {
    let mut sum = 0.0;
    for (i, &l) in lambdas.iter().enumerate() {
        sum += coeffs[i][n] * (-0.5 * l * x * x).exp();
    }
    sum / v_norm(n)
}

/// Determinant minor of the Vandermonde columns `{0..N-1} \ {n}` with row `i`
/// removed.
fn vandermonde_minor(lambdas: &[f64], skip_row: usize, skip_power: usize) -> f64 {
    let n_dim = lambdas.len();
    let rows: Vec<usize> = (0..n_dim).filter(|&r| r != skip_row).collect();
    let powers: Vec<usize> = (0..n_dim).filter(|&p| p != skip_power).collect();
    let m: Vec<Vec<f64>> = rows
        .iter()
        .map(|&r| powers.iter().map(|&p| lambdas[r].powi(p as i32)).collect())
        .collect();
    det_lu(&m)
}

fn vandermonde_det(lambdas: &[f64]) -> f64 {
    let mut d = 1.0;
    for i in 0..lambdas.len() {
        for j in i + 1..lambdas.len() {
            d *= lambdas[j] - lambdas[i];
        }
    }
    d
}

/// Column-replacement determinant `det(l^0 | .. | b | .. | l^{N-1}) / (v_n Delta)`
/// expanded along the replaced column `n` (entries `b_i`).
fn column_replacement_det(lambdas: &[f64], b: &[f64], n: usize) -> f64 {
    let mut det = 0.0;
    for i in 0..lambdas.len() {
        let sign = if (i + n) % 2 == 0 { 1.0 } else { -1.0 };
        det += sign * b[i] * vandermonde_minor(lambdas, i, n);
    }
    det
}

/// `F_{N;n}(x)` by the all-exponential determinant form.
pub fn basis_f_det_exp(lambdas: &[f64], n: usize, x: f64) -> Result<f64, PvError> {
    if n >= lambdas.len() {
        return Err(PvError::BadArgument("basis index must be below the dimension"));
    }
    validate_lambdas(lambdas)?;
    let b: Vec<f64> = lambdas.iter().map(|&l| (-0.5 * l * x * x).exp()).collect();
    let det = column_replacement_det(lambdas, &b, n);
    Ok(det / (v_norm(n) * vandermonde_det(lambdas)))
}

/// The correction term of the Taylor-remainder form,
/// `F_{N;n}(x) - x^{2n}`, computed without cancellation against `x^{2n}`
/// (used by the small-x order probe).
pub fn basis_f_remainder_correction(lambdas: &[f64], n: usize, x: f64) -> Result<f64, PvError> {
    if n >= lambdas.len() {
        return Err(PvError::BadArgument("basis index must be below the dimension"));
    }
    validate_lambdas(lambdas)?;
    let n_dim = lambdas.len() as u32;
    let b: Vec<f64> = lambdas
        .iter()
        .map(|&l| remainder_rn(n_dim, -0.5 * l * x * x))
        .collect();
    let det = column_replacement_det(lambdas, &b, n);
    Ok(det / (v_norm(n) * vandermonde_det(lambdas)))
}

/// `F_{N;n}(x)` by the Taylor-remainder determinant form,
/// `x^{2n} + det(.. R_N ..) / (v_n Delta)`.
pub fn basis_f_det_remainder(lambdas: &[f64], n: usize, x: f64) -> Result<f64, PvError> {
    Ok(x.powi(2 * n as i32) + basis_f_remainder_correction(lambdas, n, x)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn remainder_trivia() {
        for n in 1..=6 {
            assert_eq!(remainder_rn(n, 0.0), 0.0);
        }
        // R_1 = e^xi - 1
        for xi in [-3.0, -0.5, 0.25, 2.0] {
            assert!(rel(remainder_rn(1, xi), xi.exp_m1()) < 1e-14);
        }
        // R_2(1) = e - 2
        assert!(rel(remainder_rn(2, 1.0), std::f64::consts::E - 2.0) < 1e-14);
    }

    /// Independent oracle: the integral representation
    /// `xi^N/(N-1)! int_0^1 (1-u)^{N-1} e^{xi u} du` by high-order quadrature.
    fn remainder_by_quadrature(n: u32, xi: f64) -> f64 {
        let rule = super::super::gauss::gauss_legendre(48);
        let mut sum = 0.0;
        for (t, w) in rule.0.iter().zip(rule.1.iter()) {
            let u = 0.5 * (t + 1.0);
            sum += 0.5 * w * (1.0 - u).powi(n as i32 - 1) * (xi * u).exp();
        }
        let mut fact = 1.0;
        for k in 1..n {
            fact *= k as f64;
        }
        xi.powi(n as i32) / fact * sum
    }

    #[test]
    fn remainder_matches_integral_oracle() {
        for n in [1u32, 2, 3, 4, 6] {
            for xi in [-20.0, -8.0, -3.0, -1.0, -1e-3, 1e-3, 0.5, 1.0, 5.0, 20.0] {
                let got = remainder_rn(n, xi);
                let oracle = remainder_by_quadrature(n, xi);
                assert!(
                    rel(got, oracle) < 1e-12,
                    "R_{n}({xi}): got {got:e}, oracle {oracle:e}"
                );
            }
        }
    }

    #[test]
    fn remainder_matches_naive_formula_where_stable() {
        // |xi| >= 1: the naive f64 formula is accurate enough to compare at 1e-12
        for n in [2u32, 4] {
            for xi in [-20.0, -10.0, -2.0, -1.0, 1.0, 3.0, 10.0, 20.0] {
                let mut partial = 0.0;
                let mut term = 1.0;
                for k in 0..n {
                    if k > 0 {
                        term *= xi / k as f64;
                    }
                    partial += term;
                }
                let naive = xi.exp() - partial;
                assert!(rel(remainder_rn(n, xi), naive) < 1e-12, "n={n} xi={xi}");
            }
        }
    }

    #[test]
    fn basis_f_two_dim_closed_forms() {
        let lam = [1.0, 2.0];
        let (l1, l2) = (lam[0], lam[1]);
        for x in [-2.5, -1.0, -0.3, 0.0, 0.7, 1.9, 3.0] {
            let e1 = (-0.5 * l1 * x * x).exp();
            let e2 = (-0.5 * l2 * x * x).exp();
            let f0 = (e1 * l2 - e2 * l1) / (l2 - l1);
            let f1 = 2.0 * (e1 - e2) / (l2 - l1);
            assert!(rel(basis_f(&lam, 0, x).unwrap(), f0) < 1e-13, "F_2;0 at {x}");
            assert!(rel(basis_f(&lam, 1, x).unwrap(), f1) < 1e-13, "F_2;1 at {x}");
        }
        assert_eq!(basis_f(&lam, 1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn basis_forms_agree() {
        // Well-conditioned region: plain relative comparison at 1e-10.
        for lam in [vec![1.0, 2.0], vec![1.0, 2.0, 3.0, 4.0]] {
            for n in 0..lam.len() {
                for x in [-2.0f64, -0.9, 0.35, 1.4, 2.0] {
                    let a = basis_f(&lam, n, x).unwrap();
                    let b = basis_f_det_exp(&lam, n, x).unwrap();
                    let c = basis_f_det_remainder(&lam, n, x).unwrap();
                    assert!(rel(a, b) < 1e-10, "lagrange vs exp-det N={} n={n} x={x}", lam.len());
                    assert!(rel(a, c) < 1e-10, "lagrange vs remainder N={} n={n} x={x}", lam.len());
                }
            }
        }
    }

    #[test]
    fn basis_forms_agree_at_large_x_scale_relative() {
        // At |x| up to 6 the remainder form reconstructs a tiny value from
        // O(x^{2n})-sized terms, so agreement is measured relative to the
        // dominant internal scale max(|F|, x^{2n}).
        for lam in [vec![1.0, 2.0], vec![1.0, 2.0, 3.0, 4.0]] {
            for n in 0..lam.len() {
                for x in [-6.0f64, -4.5, 3.8, 6.0] {
                    let a = basis_f(&lam, n, x).unwrap();
                    let b = basis_f_det_exp(&lam, n, x).unwrap();
                    let c = basis_f_det_remainder(&lam, n, x).unwrap();
                    let scale = a.abs().max(x.powi(2 * n as i32).abs()).max(1.0);
                    assert!((a - b).abs() / scale < 1e-9, "exp-det N={} n={n} x={x}", lam.len());
                    assert!((a - c).abs() / scale < 1e-9, "remainder N={} n={n} x={x}", lam.len());
                }
            }
        }
    }

    #[test]
    fn small_x_probe_reports_bounded_correction() {
        // (F_{N;n}(x) - x^{2n}) / x^{2n+2} stays bounded as x -> 0; estimate
        // the leading order of the correction and require at least 2N.
        for lam in [vec![1.0, 2.0], vec![1.0, 2.0, 3.0, 4.0]] {
            let n_dim = lam.len() as i32;
            for n in 0..lam.len() {
                let g = |x: f64| basis_f_remainder_correction(&lam, n, x).unwrap().abs();
                let (x1, x2) = (1e-2, 1e-3);
                let order = (g(x1) / g(x2)).log10();
                assert!(
                    order >= 2.0 * n_dim as f64 - 0.1,
                    "observed correction order {order} below 2N = {} for n={n}",
                    2 * n_dim
                );
                // bounded ratio at the probe points
                for x in [x1, x2] {
                    let ratio = g(x) / x.powi(2 * n as i32 + 2);
                    assert!(ratio.is_finite());
                }
            }
        }
    }

    #[test]
    fn coincident_spectrum_rejected() {
        assert!(matches!(
            basis_f(&[1.0, 1.0 + 1e-12], 0, 1.0),
            Err(PvError::CoincidentSpectrum { .. })
        ));
    }
}
