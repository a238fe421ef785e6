//! Exact Wick calculus for the Gaussian unitary-invariant-breaking measure
//! with external field: moments of products of traces, perturbative moments
//! for a polynomial potential, and cumulants via the set-partition Moebius
//! formula.
//!
//! The measure has density proportional to `exp(-Tr(Lambda H^2) / 2)` on
//! Hermitian `N x N` matrices, `Lambda = diag(lambda_1, .., lambda_N)` with
//! positive pairwise-distinct entries. The entry covariance is
//! `<H_ab H_cd> = delta_ad delta_bc * 2 / (lambda_a + lambda_b)`; its
//! normalization is pinned by the test reproducing `<(Tr H)^2> = p_1`.

mod wick;

use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::partitions::set_partitions;
use crate::algebra::rational::Rational;

pub use wick::{trace_moment, trace_moment_naive};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MomentError {
    InvalidSpectrum(&'static str),
    InvalidRequest(&'static str),
    IndexOutOfRange { index: usize, n: usize },
    BudgetExceeded { work: u128, budget: u128 },
    MissingSubMoment(MomentRequest),
    OrderTooLarge { order: u32, max: u32 },
}

impl fmt::Display for MomentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomentError::InvalidSpectrum(s) => write!(f, "invalid spectrum: {s}"),
            MomentError::InvalidRequest(s) => write!(f, "invalid moment request: {s}"),
            MomentError::IndexOutOfRange { index, n } => {
                write!(f, "matrix index {index} out of range for N = {n}")
            }
            MomentError::BudgetExceeded { work, budget } => {
                write!(f, "work estimate {work} exceeds budget {budget}")
            }
            MomentError::MissingSubMoment(req) => write!(f, "missing sub-moment {req}"),
            MomentError::OrderTooLarge { order, max } => {
                write!(f, "perturbative order {order} exceeds maximum {max}")
            }
        }
    }
}

impl std::error::Error for MomentError {}

/// The external field: positive, pairwise-distinct eigenvalues of `Lambda`,
/// kept exact. Power sums are `p_k = Tr Lambda^{-k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralData {
    lambdas: Vec<Rational>,
}

impl SpectralData {
    pub fn new(lambdas: Vec<Rational>) -> Result<Self, MomentError> {
        if lambdas.is_empty() {
            return Err(MomentError::InvalidSpectrum("N must be at least 1"));
        }
        if lambdas.iter().any(|l| *l <= Rational::zero()) {
            return Err(MomentError::InvalidSpectrum("entries must be positive"));
        }
        for i in 0..lambdas.len() {
            for j in i + 1..lambdas.len() {
                if lambdas[i] == lambdas[j] {
                    return Err(MomentError::InvalidSpectrum("entries must be pairwise distinct"));
                }
            }
        }
        Ok(SpectralData { lambdas })
    }

    pub fn from_ints(lambdas: &[i64]) -> Result<Self, MomentError> {
        Self::new(lambdas.iter().map(|&l| crate::algebra::rational::rat_int(l)).collect())
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[Rational] {
        &self.lambdas
    }

    /// `p_k = sum_i lambda_i^{-k}` for `k >= 1`.
    pub fn power_sum(&self, k: u32) -> Rational {
        let mut acc = Rational::zero();
        for l in &self.lambdas {
            let mut invpow = Rational::one();
            for _ in 0..k {
                invpow /= l;
            }
            acc += invpow;
        }
        acc
    }

    /// `s_{k} = p_k / k` for odd `k`, the time values of the `Q`-expansion.
    pub fn time_value(&self, k: u32) -> Rational {
        self.power_sum(k) / Rational::from_integer(num_bigint::BigInt::from(k))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.lambdas.iter().map(crate::algebra::rational::to_f64).collect()
    }

    /// Entrywise scaling `Lambda -> c * Lambda` (used by the homogeneity test).
    pub fn scaled(&self, c: &Rational) -> Result<Self, MomentError> {
        Self::new(self.lambdas.iter().map(|l| l * c).collect())
    }
}

/// A multiset of positive trace exponents `(k_1, .., k_n)`, stored sorted
/// descending so equal multisets compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MomentRequest {
    exponents: Vec<u32>,
}

impl MomentRequest {
    pub fn new(mut exponents: Vec<u32>) -> Result<Self, MomentError> {
        if exponents.is_empty() {
            return Err(MomentError::InvalidRequest("request must be nonempty"));
        }
        if exponents.iter().any(|&k| k == 0) {
            return Err(MomentError::InvalidRequest("exponents must be positive"));
        }
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        Ok(MomentRequest { exponents })
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn total_degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

impl fmt::Display for MomentRequest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M_(")?;
        for (i, k) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// A polynomial potential `V_0(x) = sum_d c_d x^d` with the expansion order
/// used for its perturbative treatment. The constant term cancels in every
/// normalized moment and is ignored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialSpec {
    coeffs: BTreeMap<u32, Rational>,
    order: u32,
}

pub const MAX_PERTURBATIVE_ORDER: u32 = 3;

impl PotentialSpec {
    pub fn new(coeffs: BTreeMap<u32, Rational>, order: u32) -> Result<Self, MomentError> {
        if order > MAX_PERTURBATIVE_ORDER {
            return Err(MomentError::OrderTooLarge { order, max: MAX_PERTURBATIVE_ORDER });
        }
        let coeffs = coeffs
            .into_iter()
            .filter(|(d, c)| *d >= 1 && !c.is_zero())
            .collect();
        Ok(PotentialSpec { coeffs, order })
    }

    pub fn zero() -> Self {
        PotentialSpec { coeffs: BTreeMap::new(), order: 0 }
    }

    /// Single monomial `c x^d` at the given expansion order.
    pub fn monomial(degree: u32, coeff: Rational, order: u32) -> Result<Self, MomentError> {
        let mut m = BTreeMap::new();
        m.insert(degree, coeff);
        Self::new(m, order)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, Rational> {
        &self.coeffs
    }

    /// True when only even powers occur.
    pub fn is_even(&self) -> bool {
        self.coeffs.keys().all(|d| d % 2 == 0)
    }
}

/// Entry covariance `<H_ab H_ba> = 2 / (lambda_a + lambda_b)` (0-based
/// indices). This is the only place the normalization of the measure enters.
pub fn covariance(a: usize, b: usize, spectral: &SpectralData) -> Result<Rational, MomentError> {
    let n = spectral.n();
    if a >= n || b >= n {
        return Err(MomentError::IndexOutOfRange { index: a.max(b), n });
    }
    let sum = &spectral.lambdas[a] + &spectral.lambdas[b];
    Ok(Rational::from_integer(num_bigint::BigInt::from(2)) / sum)
}

/// Normalized moment of the measure with potential, as a series in the number
/// of potential insertions: `orders[i]` is the order-`i` contribution with the
/// concrete coupling values already substituted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbativeSeries {
    orders: Vec<Rational>,
}

impl PerturbativeSeries {
    pub fn orders(&self) -> &[Rational] {
        &self.orders
    }

    pub fn order(&self, i: usize) -> Rational {
        self.orders.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    /// Value of the truncated series (couplings are already inside).
    pub fn eval_sum(&self) -> Rational {
        let mut acc = Rational::zero();
        for o in &self.orders {
            acc += o;
        }
        acc
    }
}

/// Multisets of `count` insertions drawn from the potential's monomials,
/// together with the symmetry-weighted coupling factor
/// `prod_d c_d^{m_d} / m_d!`.
fn insertion_multisets(
    degrees: &[(u32, Rational)],
    count: u32,
) -> Vec<(Vec<u32>, Rational)> {
    let mut out = Vec::new();
    fn recurse(
        degrees: &[(u32, Rational)],
        pos: usize,
        left: u32,
        acc_degrees: &mut Vec<u32>,
        acc_factor: Rational,
        out: &mut Vec<(Vec<u32>, Rational)>,
    ) {
        if pos == degrees.len() {
            if left == 0 {
                out.push((acc_degrees.clone(), acc_factor));
            }
            return;
        }
        let (d, c) = &degrees[pos];
        let mut factor = acc_factor.clone();
        for m in 0..=left {
            if m > 0 {
                factor = factor * c / Rational::from_integer(num_bigint::BigInt::from(m));
                acc_degrees.push(*d);
            }
            recurse(degrees, pos + 1, left - m, acc_degrees, factor.clone(), out);
        }
        for _ in 0..left {
            if acc_degrees.last() == Some(d) {
                acc_degrees.pop();
            }
        }
    }
    recurse(degrees, 0, count, &mut Vec::new(), Rational::one(), &mut out);
    out
}

/// Gaussian average of `prod_i Tr H^{k_i} * prod insertions`, where an empty
/// combined request means the constant 1.
fn wick_average(
    spectral: &SpectralData,
    base: &[u32],
    insertions: &[u32],
) -> Result<Rational, MomentError> {
    let mut exps: Vec<u32> = base.to_vec();
    exps.extend_from_slice(insertions);
    if exps.is_empty() {
        return Ok(Rational::one());
    }
    trace_moment(spectral, &MomentRequest::new(exps)?)
}

/// Normalized moment of the potential-deformed measure, order by order in the
/// number of potential insertions:
/// `M = <prod Tr H^{k_i} e^{Tr V_0}> / <e^{Tr V_0}>`, both sides expanded and
/// the ratio taken as a formal series.
pub fn moment_perturbative(
    spectral: &SpectralData,
    req: &MomentRequest,
    v0: &PotentialSpec,
) -> Result<PerturbativeSeries, MomentError> {
    let degrees: Vec<(u32, Rational)> =
        v0.coeffs.iter().map(|(d, c)| (*d, c.clone())).collect();
    let p = if v0.is_zero() { 0 } else { v0.order };

    let mut numerator = Vec::with_capacity(p as usize + 1);
    let mut denominator = Vec::with_capacity(p as usize + 1);
    for i in 0..=p {
        let mut num_i = Rational::zero();
        let mut den_i = Rational::zero();
        for (ins, factor) in insertion_multisets(&degrees, i) {
            num_i += factor.clone() * wick_average(spectral, req.exponents(), &ins)?;
            den_i += factor * wick_average(spectral, &[], &ins)?;
        }
        numerator.push(num_i);
        denominator.push(den_i);
    }

    // Series division: M_i = Num_i - sum_{j=1..i} Den_j M_{i-j} (Den_0 = 1).
    let mut orders: Vec<Rational> = Vec::with_capacity(p as usize + 1);
    for i in 0..=(p as usize) {
        let mut m_i = numerator[i].clone();
        for j in 1..=i {
            m_i -= &denominator[j] * &orders[i - j];
        }
        orders.push(m_i);
    }
    Ok(PerturbativeSeries { orders })
}

/// Cumulant via the Moebius sum over set partitions,
/// `K = sum_I (-1)^{|I|-1} (|I|-1)! prod_{B in I} M_B`,
/// with all needed sub-moments supplied by the caller.
pub fn cumulants(
    moments: &BTreeMap<MomentRequest, Rational>,
    req: &MomentRequest,
) -> Result<Rational, MomentError> {
    let exps = req.exponents();
    let n = exps.len();
    let mut acc = Rational::zero();
    for partition in set_partitions(n).map_err(|_| {
        MomentError::InvalidRequest("cumulants support at most 10 trace factors")
    })? {
        let blocks = partition.num_blocks();
        let mut term = sign_factorial(blocks);
        for block in partition.blocks() {
            let sub = MomentRequest::new(block.iter().map(|&i| exps[i]).collect())?;
            let m = moments
                .get(&sub)
                .ok_or_else(|| MomentError::MissingSubMoment(sub.clone()))?;
            term *= m;
        }
        acc += term;
    }
    Ok(acc)
}

/// `(-1)^{b-1} (b-1)!` as a rational.
fn sign_factorial(blocks: usize) -> Rational {
    let f = crate::algebra::rational::factorial(blocks as u64 - 1);
    let signed = if blocks % 2 == 1 { f } else { -f };
    Rational::from_integer(signed)
}

/// Cumulant of the `V_0 = 0` measure, building every needed sub-moment from
/// the Wick oracle.
pub fn cumulant_v0_zero(
    spectral: &SpectralData,
    req: &MomentRequest,
) -> Result<Rational, MomentError> {
    let exps = req.exponents();
    let mut moments = BTreeMap::new();
    for partition in set_partitions(exps.len()).map_err(|_| {
        MomentError::InvalidRequest("cumulants support at most 10 trace factors")
    })? {
        for block in partition.blocks() {
            let sub = MomentRequest::new(block.iter().map(|&i| exps[i]).collect())?;
            if !moments.contains_key(&sub) {
                let m = trace_moment(spectral, &sub)?;
                moments.insert(sub, m);
            }
        }
    }
    cumulants(&moments, req)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{rat, rat_int};

    fn spectral(ls: &[i64]) -> SpectralData {
        SpectralData::from_ints(ls).unwrap()
    }

    fn req(ks: &[u32]) -> MomentRequest {
        MomentRequest::new(ks.to_vec()).unwrap()
    }

    #[test]
    fn spectrum_validation() {
        assert!(SpectralData::from_ints(&[]).is_err());
        assert!(SpectralData::from_ints(&[1, 1]).is_err());
        assert!(SpectralData::from_ints(&[0, 1]).is_err());
        assert!(SpectralData::from_ints(&[-1, 2]).is_err());
        assert!(SpectralData::from_ints(&[1, 2, 3]).is_ok());
    }

    #[test]
    fn covariance_basics() {
        let s1 = spectral(&[1]);
        assert_eq!(covariance(0, 0, &s1).unwrap(), rat_int(1));
        let s = spectral(&[2, 5]);
        assert_eq!(covariance(0, 1, &s).unwrap(), covariance(1, 0, &s).unwrap());
        assert_eq!(covariance(0, 1, &s).unwrap(), rat(2, 7));
        assert!(covariance(0, 2, &s).is_err());
    }

    #[test]
    fn covariance_normalization_reproduces_p1() {
        // <(Tr H)^2> = p_1 pins the factor 2/(lambda_a + lambda_b).
        for ls in [vec![1i64], vec![1, 2], vec![2, 3, 7]] {
            let s = spectral(&ls);
            let m = trace_moment(&s, &req(&[1, 1])).unwrap();
            assert_eq!(m, s.power_sum(1));
        }
    }

    #[test]
    fn odd_moments_vanish() {
        let s = spectral(&[1, 2]);
        assert_eq!(trace_moment(&s, &req(&[1])).unwrap(), rat_int(0));
        assert_eq!(trace_moment(&s, &req(&[3])).unwrap(), rat_int(0));
        assert_eq!(trace_moment(&s, &req(&[3, 1, 1])).unwrap(), rat_int(0));
    }

    #[test]
    fn moment_table_for_one_spectrum() {
        let s = spectral(&[1, 2, 3]);
        let p1 = s.power_sum(1);
        let p3 = s.power_sum(3);
        let three = rat_int(3);
        assert_eq!(trace_moment(&s, &req(&[1, 1])).unwrap(), p1.clone());
        assert_eq!(trace_moment(&s, &req(&[3, 1])).unwrap(), &three * &p1 * &p1);
        assert_eq!(trace_moment(&s, &req(&[1, 1, 1, 1])).unwrap(), &three * &p1 * &p1);
        assert_eq!(
            trace_moment(&s, &req(&[1, 1, 1, 1, 1, 1])).unwrap(),
            rat_int(15) * &p1 * &p1 * &p1
        );
        assert_eq!(
            trace_moment(&s, &req(&[3, 1, 1, 1])).unwrap(),
            rat_int(6) * &p3 + rat_int(9) * &p1 * &p1 * &p1
        );
        assert_eq!(
            trace_moment(&s, &req(&[3, 3])).unwrap(),
            rat_int(3) * &p3 + rat_int(12) * &p1 * &p1 * &p1
        );
        assert_eq!(
            trace_moment(&s, &req(&[5, 1])).unwrap(),
            rat_int(5) * &p3 + rat_int(10) * &p1 * &p1 * &p1
        );
    }

    #[test]
    fn one_dimensional_brute_force() {
        // At N = 1 the moment is the scalar Gaussian moment
        // <x^{2m}> = (2m-1)!! lambda^{-m} under exp(-lambda x^2 / 2).
        for lambda in [1i64, 3] {
            let s = spectral(&[lambda]);
            for (exps, m) in [(vec![2u32], 1u64), (vec![4], 2), (vec![3, 1], 2), (vec![2, 2, 2], 3)] {
                let expect = Rational::from_integer(crate::algebra::rational::double_factorial(
                    2 * m - 1,
                )) / rat_int(lambda).pow(m as i32);
                assert_eq!(trace_moment(&s, &req(&exps)).unwrap(), expect);
            }
        }
    }

    #[test]
    fn naive_and_fast_paths_agree() {
        let s2 = spectral(&[1, 2]);
        let s3 = spectral(&[2, 3, 7]);
        for r in [
            req(&[1, 1]),
            req(&[2, 2]),
            req(&[4, 2]),
            req(&[3, 1]),
            req(&[2, 1, 1]),
            req(&[3, 3]),
            req(&[5, 1]),
        ] {
            assert_eq!(
                trace_moment(&s2, &r).unwrap(),
                trace_moment_naive(&s2, &r).unwrap(),
                "mismatch at N=2 for {r}"
            );
            assert_eq!(
                trace_moment(&s3, &r).unwrap(),
                trace_moment_naive(&s3, &r).unwrap(),
                "mismatch at N=3 for {r}"
            );
        }
    }

    #[test]
    fn permutation_invariance_by_construction() {
        let s = spectral(&[1, 4]);
        assert_eq!(req(&[1, 3, 1]), req(&[3, 1, 1]));
        assert_eq!(
            trace_moment(&s, &req(&[1, 3, 1])).unwrap(),
            trace_moment(&s, &req(&[3, 1, 1])).unwrap()
        );
    }

    #[test]
    fn homogeneity_under_spectral_scaling() {
        // Scaling Lambda -> c Lambda multiplies a degree-D moment by c^{-D/2}.
        let s = spectral(&[1, 2, 5]);
        let c = rat_int(4);
        let scaled = s.scaled(&c).unwrap();
        for r in [req(&[1, 1]), req(&[3, 1]), req(&[3, 3])] {
            let d = r.total_degree();
            let lhs = trace_moment(&scaled, &r).unwrap();
            let mut factor = Rational::one();
            for _ in 0..d / 2 {
                factor /= &c;
            }
            let rhs = trace_moment(&s, &r).unwrap() * factor;
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn budget_guard_trips() {
        let s = spectral(&[1, 2]);
        assert!(matches!(
            trace_moment(&s, &req(&[13, 1])),
            Err(MomentError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn perturbative_reduces_to_wick_for_zero_potential() {
        let s = spectral(&[1, 2]);
        let series = moment_perturbative(&s, &req(&[1, 1]), &PotentialSpec::zero()).unwrap();
        assert_eq!(series.orders().len(), 1);
        assert_eq!(series.order(0), s.power_sum(1));
    }

    #[test]
    fn perturbative_quadratic_matches_shifted_spectrum_expansion() {
        // V_0 = c x^2 shifts Lambda -> Lambda - 2c, so
        // <(Tr H)^2> = p_1(Lambda - 2c) = p_1 + 2 p_2 c + O(c^2),
        // the geometric series expanded independently of the Wick machinery.
        let s = spectral(&[1, 2, 3]);
        for c in [rat(1, 10), rat(-1, 7)] {
            let v0 = PotentialSpec::monomial(2, c.clone(), 1).unwrap();
            let series = moment_perturbative(&s, &req(&[1, 1]), &v0).unwrap();
            assert_eq!(series.order(0), s.power_sum(1));
            assert_eq!(series.order(1), rat_int(2) * s.power_sum(2) * &c);
        }
    }

    #[test]
    fn perturbative_parity_kills_odd_requests() {
        let s = spectral(&[1, 2]);
        let v0 = PotentialSpec::monomial(4, rat(-1, 4), 3).unwrap();
        let series = moment_perturbative(&s, &req(&[1]), &v0).unwrap();
        assert!(series.orders().iter().all(|o| o.is_zero()));
    }

    #[test]
    fn cumulant_examples() {
        let s = spectral(&[1, 2]);
        // single block: K_k = M_k
        assert_eq!(
            cumulant_v0_zero(&s, &req(&[2])).unwrap(),
            trace_moment(&s, &req(&[2])).unwrap()
        );
        // K_{1,1} = M_{1,1} since odd moments vanish
        assert_eq!(cumulant_v0_zero(&s, &req(&[1, 1])).unwrap(), s.power_sum(1));
        // K_{3,1} = M_{3,1} - M_3 M_1 = 3 p_1^2
        let p1 = s.power_sum(1);
        assert_eq!(cumulant_v0_zero(&s, &req(&[3, 1])).unwrap(), rat_int(3) * &p1 * &p1);
    }

    #[test]
    fn cumulants_report_missing_submoments() {
        let moments = BTreeMap::new();
        assert!(matches!(
            cumulants(&moments, &req(&[1, 1])),
            Err(MomentError::MissingSubMoment(_))
        ));
    }
}
