//! Schur Q-functions as polynomials in the odd times, in the convention
//! pinned by the Cauchy identity
//! `exp(2 sum_k (2k+1) t_{2k+1} p_{2k+1}) = sum_λ 2^{-l(λ)} Q_λ(t) Q_λ(p)`.
//!
//! The one-row function `q_a` is the coefficient of `z^a` in
//! `exp(sum_k 2 t_{2k+1} z^{2k+1})`; two-row functions follow the classical
//! correction sum, and general `Q_λ` is the Pfaffian of the two-row matrix,
//! padding odd-length partitions with a zero part. [`verify_cauchy`] is the
//! enforcement test for the convention; everything downstream (hook ratios,
//! Gaussian averages, the Q-expansion of the tau-function) relies on it.

pub mod cache;

use num_traits::{One, Zero};
use std::fmt;

use crate::algebra::partitions::{strict_partitions, StrictPartition};
use crate::algebra::pfaffian::pfaffian_generic;
use crate::algebra::poly::{OddPolynomial, Var, VarFamily};
use crate::algebra::rational::{double_factorial, rat_int, Rational};
use crate::gaussmoments::SpectralData;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QError {
    CutoffTooSmall { needed: u32, got: u32 },
    CostGuard { what: &'static str, value: u32, max: u32 },
    EmptyPartition,
    /// The specialisation of `Q_{2λ}` at `(1,0,0,..)` is provably nonzero;
    /// hitting zero means the implementation is broken.
    ZeroSpecialization,
    Cache(String),
}

impl fmt::Display for QError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QError::CutoffTooSmall { needed, got } => {
                write!(f, "cutoff {got} is smaller than the partition weight {needed}")
            }
            QError::CostGuard { what, value, max } => {
                write!(f, "{what} = {value} exceeds the cost guard {max}")
            }
            QError::EmptyPartition => write!(f, "operation requires a nonempty partition"),
            QError::ZeroSpecialization => {
                write!(f, "specialisation of Q_2λ vanished; implementation bug")
            }
            QError::Cache(s) => write!(f, "cache error: {s}"),
        }
    }
}

impl std::error::Error for QError {}

/// A Schur Q-function together with the partition indexing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QFunction {
    pub partition: StrictPartition,
    pub polynomial: OddPolynomial,
}

impl QFunction {
    pub fn cutoff(&self) -> u32 {
        self.polynomial.cutoff()
    }
}

/// One-row functions `q_0, .., q_max` from the generating function
/// `sum_a q_a z^a = exp(sum_k 2 t_{2k+1} z^{2k+1})`, via the logarithmic
/// derivative recurrence `m q_m = sum_{odd j <= m} 2 j t_j q_{m-j}`.
fn q_rows(max: u32, cutoff: u32) -> Vec<OddPolynomial> {
    let mut q = vec![OddPolynomial::one(cutoff)];
    for m in 1..=max {
        let mut acc = OddPolynomial::zero(cutoff);
        let mut j = 1;
        while j <= m {
            let tj = OddPolynomial::var(VarFamily::T, j, cutoff);
            let term = tj
                .scalar_mul(&rat_int(2 * j as i64))
                .poly_mul(&q[(m - j) as usize])
                .expect("uniform cutoff");
            acc = &acc + &term;
            j += 2;
        }
        q.push(acc.scalar_mul(&(Rational::one() / rat_int(m as i64))));
    }
    q
}

/// `q_a(t)`, truncated at `cutoff` (zero when `a > cutoff`).
pub fn q_one_row(a: u32, cutoff: u32) -> OddPolynomial {
    q_rows(a, cutoff).pop().expect("nonempty table")
}

fn q_two_row_from_table(table: &[OddPolynomial], a: u32, b: u32) -> OddPolynomial {
    let cutoff = table[0].cutoff();
    if a == b {
        return OddPolynomial::zero(cutoff);
    }
    if a < b {
        return -&q_two_row_from_table(table, b, a);
    }
    if b == 0 {
        return table[a as usize].clone();
    }
    let mut acc = table[a as usize]
        .poly_mul(&table[b as usize])
        .expect("uniform cutoff");
    for i in 1..=b {
        let prod = table[(a + i) as usize]
            .poly_mul(&table[(b - i) as usize])
            .expect("uniform cutoff");
        let signed = if i % 2 == 1 { rat_int(-2) } else { rat_int(2) };
        acc = &acc + &prod.scalar_mul(&signed);
    }
    acc
}

/// Two-row function `Q_(a,b) = q_a q_b + 2 sum_{i=1}^{b} (-1)^i q_{a+i} q_{b-i}`
/// for `a > b >= 0`, extended antisymmetrically (`Q_(a,a) = 0`).
pub fn q_two_row(a: u32, b: u32, cutoff: u32) -> OddPolynomial {
    let table = q_rows(a + b, cutoff);
    q_two_row_from_table(&table, a, b)
}

/// `Q_λ` as the Pfaffian of the two-row matrix over the padded part list.
///
/// `extra_zeros` beyond the parity padding are allowed and must not change
/// the result; a pair of padded zeros meets the regularised entry
/// `Q_(0,0) := 1` (the constant term of the two-row generating kernel), which
/// is exactly what makes the Pfaffian stable under padding.
pub fn q_schur_padded(
    lam: &StrictPartition,
    extra_zeros: usize,
    cutoff: u32,
) -> Result<QFunction, QError> {
    if cutoff < lam.weight() {
        return Err(QError::CutoffTooSmall { needed: lam.weight(), got: cutoff });
    }
    let mut parts: Vec<u32> = lam.parts().to_vec();
    parts.extend(std::iter::repeat(0).take(extra_zeros));
    if parts.len() % 2 != 0 {
        parts.push(0);
    }
    let max_pair = if parts.len() >= 2 { parts[0] + parts[1] } else { 0 };
    let table = q_rows(max_pair, cutoff);
    let entry = |i: usize, j: usize| -> OddPolynomial {
        if parts[i] == 0 && parts[j] == 0 {
            OddPolynomial::one(cutoff)
        } else {
            q_two_row_from_table(&table, parts[i], parts[j])
        }
    };
    let polynomial = pfaffian_generic(parts.len(), OddPolynomial::one(cutoff), &entry);
    Ok(QFunction { partition: lam.clone(), polynomial })
}

/// `Q_λ(t)` truncated at `cutoff >= |λ|`; weight-homogeneous of weight `|λ|`.
pub fn q_schur(lam: &StrictPartition, cutoff: u32) -> Result<QFunction, QError> {
    q_schur_padded(lam, 0, cutoff)
}

/// `Q_λ(1, 0, 0, ..)`: the exact specialisation at `t_1 = 1`, higher times 0.
pub fn q_specialize_unit(lam: &StrictPartition) -> Rational {
    let q = q_schur(lam, lam.weight()).expect("cutoff = weight is always enough");
    q.polynomial
        .eval(|v: Var| if v.index == 1 { Rational::one() } else { Rational::zero() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HookRatio {
    pub lhs: Rational,
    pub rhs: Rational,
    pub equal: bool,
}

/// Checks the hook-length analogue
/// `Q_λ(1,0,..) / Q_{2λ}(1,0,..) = prod_j (2 λ_j - 1)!!` exactly.
pub fn hook_ratio_check(lam: &StrictPartition) -> Result<HookRatio, QError> {
    if lam.is_empty() {
        return Err(QError::EmptyPartition);
    }
    let num = q_specialize_unit(lam);
    let den = q_specialize_unit(&lam.doubled());
    if den.is_zero() {
        return Err(QError::ZeroSpecialization);
    }
    let lhs = num / den;
    let mut rhs = Rational::one();
    for &p in lam.parts() {
        rhs *= Rational::from_integer(double_factorial(2 * p as u64 - 1));
    }
    let equal = lhs == rhs;
    Ok(HookRatio { lhs, rhs, equal })
}

pub const MAX_CAUCHY_CUTOFF: u32 = 12;

/// Expands both sides of the Cauchy identity in the `t`- and `p`-families,
/// truncated at total weight `cutoff` in each family, and returns the largest
/// absolute coefficient of their difference (exactly zero on success).
pub fn verify_cauchy(cutoff: u32) -> Result<Rational, QError> {
    if cutoff > MAX_CAUCHY_CUTOFF {
        return Err(QError::CostGuard { what: "cauchy cutoff", value: cutoff, max: MAX_CAUCHY_CUTOFF });
    }
    // Every monomial on either side has equal t- and p-weight, so a joint
    // cutoff of 2*cutoff captures exactly the per-family truncations.
    let joint = 2 * cutoff;

    let mut arg = OddPolynomial::zero(joint);
    let mut j = 1;
    while j <= cutoff {
        let tj = OddPolynomial::var(VarFamily::T, j, joint);
        let pj = OddPolynomial::var(VarFamily::P, j, joint);
        let prod = tj.poly_mul(&pj).expect("uniform cutoff");
        arg = &arg + &prod.scalar_mul(&rat_int(2 * j as i64));
        j += 2;
    }
    let lhs = arg.exp().expect("zero constant term");

    let mut rhs = OddPolynomial::zero(joint);
    for lam in strict_partitions(cutoff) {
        let q_t = q_schur(&lam, joint)?.polynomial;
        let q_p = q_t.retag_family(VarFamily::T, VarFamily::P);
        let half_pow = Rational::one() / rat_int(1i64 << lam.len());
        rhs = &rhs + &q_t.poly_mul(&q_p).expect("uniform cutoff").scalar_mul(&half_pow);
    }

    Ok((&lhs - &rhs).max_abs_coeff())
}

/// Gaussian average of `Q_{2λ}` over the external-field measure:
/// `Q_λ(s) * Q_λ(1,0,..) / Q_{2λ}(1,0,..)` with `s_k = Tr Λ^{-k} / k`,
/// evaluated exactly via the hook ratio.
pub fn gaussian_average_q(lam: &StrictPartition, spectral: &SpectralData) -> Rational {
    if lam.is_empty() {
        return Rational::one();
    }
    let q = q_schur(lam, lam.weight()).expect("cutoff = weight is always enough");
    let q_at_s = q.polynomial.eval(|v: Var| spectral.time_value(v.index));
    let hook = hook_ratio_check(lam).expect("nonempty partition").rhs;
    q_at_s * hook
}

/// Gaussian average of `Q_μ` for arbitrary strict `μ`: vanishes unless every
/// part is even, in which case it is [`gaussian_average_q`] of `μ/2`.
pub fn gaussian_average_q_general(mu: &StrictPartition, spectral: &SpectralData) -> Rational {
    match mu.halved() {
        Some(half) => gaussian_average_q(&half, spectral),
        None => Rational::zero(),
    }
}
