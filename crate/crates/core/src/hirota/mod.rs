//! BKP bilinear calculus on truncated tau-functions.
//!
//! A [`TauSeries`] is a weight-truncated polynomial in the `t`-family whose
//! coefficients encode the moments of the matrix model:
//! `tau = sum 1/(prod e_j!) M_{multiset} prod t_j^{e_j}`. Two independent
//! builders produce it — the Wick oracle ([`tau_from_moments`]) and the
//! Schur-Q expansion ([`tau_from_q_expansion`]) — and the whole point of the
//! module is to check bilinear identities on the result: Hirota-operator
//! polynomials, the explicit degree-6/8 BKP equations in operator, moment and
//! cumulant form, and the residue form of the bilinear identity.

use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::laurent::LaurentInZ;
use crate::algebra::partitions::strict_partitions;
use crate::algebra::poly::{Monomial, OddPolynomial, Var, VarFamily};
use crate::algebra::rational::{binomial, rat, rat_int, Rational};
use crate::gaussmoments::{
    cumulants, moment_perturbative, trace_moment, MomentError, MomentRequest, PotentialSpec,
    SpectralData,
};
use crate::qschur::{gaussian_average_q, q_schur, QError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HirotaError {
    InsufficientCutoff { needed: u32, got: u32 },
    CostGuard { what: &'static str, value: u32, max: u32 },
    WindowOverflow { needed: i64, bound: i64 },
    ZeroConstantTerm,
    Moment(MomentError),
    Q(QError),
}

impl fmt::Display for HirotaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HirotaError::InsufficientCutoff { needed, got } => {
                write!(f, "tau cutoff {got} is insufficient, need at least {needed}")
            }
            HirotaError::CostGuard { what, value, max } => {
                write!(f, "{what} = {value} exceeds the supported maximum {max}")
            }
            HirotaError::WindowOverflow { needed, bound } => {
                write!(f, "z-window overflow: need exponent {needed}, bound {bound}")
            }
            HirotaError::ZeroConstantTerm => write!(f, "tau must have a nonzero constant term"),
            HirotaError::Moment(e) => write!(f, "moment oracle: {e}"),
            HirotaError::Q(e) => write!(f, "Q-function layer: {e}"),
        }
    }
}

impl std::error::Error for HirotaError {}

impl From<MomentError> for HirotaError {
    fn from(e: MomentError) -> Self {
        HirotaError::Moment(e)
    }
}

impl From<QError> for HirotaError {
    fn from(e: QError) -> Self {
        HirotaError::Q(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TauProvenance {
    FromMoments,
    FromQExpansion,
    Synthetic,
}

/// A truncation of the tau-function, always in the `t`-family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauSeries {
    poly: OddPolynomial,
    provenance: TauProvenance,
    /// True when the normalization constant `Z_N(0)` has been factored out,
    /// i.e. the constant term is exactly 1.
    normalized: bool,
}

impl TauSeries {
    /// Wrap an arbitrary polynomial (synthetic tau for tests and corruption
    /// experiments); the constant term must be nonzero.
    pub fn from_polynomial(poly: OddPolynomial) -> Result<Self, HirotaError> {
        if poly.constant_term().is_zero() {
            return Err(HirotaError::ZeroConstantTerm);
        }
        let normalized = poly.constant_term().is_one();
        Ok(TauSeries { poly, provenance: TauProvenance::Synthetic, normalized })
    }

    pub fn poly(&self) -> &OddPolynomial {
        &self.poly
    }

    pub fn cutoff(&self) -> u32 {
        self.poly.cutoff()
    }

    pub fn provenance(&self) -> TauProvenance {
        self.provenance
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Normalized moment `M_(parts) = (d/dt)... tau(0) / tau(0)` read off the
    /// coefficients.
    pub fn moment(&self, parts: &[u32]) -> Rational {
        let factors: Vec<(Var, u32)> = group_parts(parts)
            .into_iter()
            .map(|(idx, e)| (Var::t(idx), e))
            .collect();
        let m = Monomial::from_factors(&factors);
        self.poly.coeff(&m) * m.exponent_factorial() / self.poly.constant_term()
    }
}

/// Group a part list into `(index, multiplicity)` pairs.
fn group_parts(parts: &[u32]) -> Vec<(u32, u32)> {
    let mut sorted = parts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut out: Vec<(u32, u32)> = Vec::new();
    for p in sorted {
        match out.last_mut() {
            Some((idx, e)) if *idx == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Partitions of `w` into odd parts, as descending part lists.
fn odd_partitions(w: u32) -> Vec<Vec<u32>> {
    fn recurse(left: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        let mut part = max_part.min(left);
        if part % 2 == 0 {
            part -= 1;
        }
        while part >= 1 {
            prefix.push(part);
            recurse(left - part, part, prefix, out);
            prefix.pop();
            part = part.saturating_sub(2);
        }
    }
    let mut out = Vec::new();
    recurse(w, w, &mut Vec::new(), &mut out);
    out
}

pub const MAX_TAU_MOMENTS_CUTOFF: u32 = 8;

/// Tau truncation from the Wick oracle: the coefficient of
/// `prod t_j^{e_j}` is `M_{(j^{e_j})} / prod e_j!`, with moments of the
/// `V_0`-deformed measure treated perturbatively (exact for `V_0 = 0`).
pub fn tau_from_moments(
    spectral: &SpectralData,
    v0: &PotentialSpec,
    cutoff: u32,
) -> Result<TauSeries, HirotaError> {
    if cutoff > MAX_TAU_MOMENTS_CUTOFF {
        return Err(HirotaError::CostGuard {
            what: "tau_from_moments cutoff",
            value: cutoff,
            max: MAX_TAU_MOMENTS_CUTOFF,
        });
    }
    let mut poly = OddPolynomial::one(cutoff);
    for w in 1..=cutoff {
        for parts in odd_partitions(w) {
            let req = MomentRequest::new(parts.clone()).expect("parts are positive");
            let m = if v0.is_zero() {
                trace_moment(spectral, &req)?
            } else {
                moment_perturbative(spectral, &req, v0)?.eval_sum()
            };
            if m.is_zero() {
                continue;
            }
            let factors: Vec<(Var, u32)> = group_parts(&parts)
                .into_iter()
                .map(|(idx, e)| (Var::t(idx), e))
                .collect();
            let mono = Monomial::from_factors(&factors);
            let sym = mono.exponent_factorial();
            poly.add_term(mono, m / sym);
        }
    }
    Ok(TauSeries { poly, provenance: TauProvenance::FromMoments, normalized: true })
}

pub const MAX_TAU_Q_CUTOFF: u32 = 10;

/// Tau truncation from the Schur-Q expansion
/// `Z_N(t) = sum_{λ strict} 2^{-l(λ)} Q_{2λ}(t/2) * <Q_{2λ}>_Gauss`,
/// summed over `2|λ| <= cutoff`.
pub fn tau_from_q_expansion(
    spectral: &SpectralData,
    cutoff: u32,
) -> Result<TauSeries, HirotaError> {
    tau_from_q_expansion_with(spectral, cutoff, |lam, c| q_schur(lam, c).map(|q| q.polynomial))
}

/// Same as [`tau_from_q_expansion`] with a pluggable `Q_{2λ}` source, so a
/// disk cache can be used.
pub fn tau_from_q_expansion_with<F>(
    spectral: &SpectralData,
    cutoff: u32,
    mut q_source: F,
) -> Result<TauSeries, HirotaError>
where
    F: FnMut(&crate::algebra::partitions::StrictPartition, u32) -> Result<OddPolynomial, QError>,
{
    if cutoff > MAX_TAU_Q_CUTOFF {
        return Err(HirotaError::CostGuard {
            what: "tau_from_q_expansion cutoff",
            value: cutoff,
            max: MAX_TAU_Q_CUTOFF,
        });
    }
    let mut poly = OddPolynomial::zero(cutoff);
    for lam in strict_partitions(cutoff / 2) {
        let avg = gaussian_average_q(&lam, spectral);
        if avg.is_zero() {
            continue;
        }
        let doubled = lam.doubled();
        let q2l = q_source(&doubled, cutoff.max(doubled.weight()))?.with_cutoff(cutoff);
        // Q_{2λ}(t/2): every variable occurrence picks up 1/2.
        let halved = q2l.scale_variables(|_| rat(1, 2));
        let weight = Rational::one() / rat_int(1i64 << lam.len());
        poly = &poly + &halved.scalar_mul(&(avg * weight));
    }
    Ok(TauSeries { poly, provenance: TauProvenance::FromQExpansion, normalized: true })
}

/// A polynomial in the Hirota operators `D_1, D_3, D_5, ...`; each term maps
/// the descending multiset of odd indices to its coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HirotaPolynomial {
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl HirotaPolynomial {
    pub fn new() -> Self {
        HirotaPolynomial { terms: BTreeMap::new() }
    }

    /// Add `coeff * D_{indices[0]} D_{indices[1]} ...` (indices odd).
    pub fn add_term(&mut self, indices: &[u32], coeff: Rational) {
        assert!(indices.iter().all(|i| i % 2 == 1), "only odd Hirota operators exist");
        let mut key = indices.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        let entry = self.terms.entry(key).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn from_terms(terms: &[(&[u32], i64)]) -> Self {
        let mut p = HirotaPolynomial::new();
        for (idx, c) in terms {
            p.add_term(idx, rat_int(*c));
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    /// Largest total weight (sum of indices) over the terms.
    pub fn max_weight(&self) -> u32 {
        self.terms.keys().map(|k| k.iter().sum()).max().unwrap_or(0)
    }

    /// `D1^6 - 5 D1^3 D3 - 5 D3^2 + 9 D1 D5`, the first BKP equation.
    pub fn bkp_degree6() -> Self {
        Self::from_terms(&[
            (&[1, 1, 1, 1, 1, 1], 1),
            (&[1, 1, 1, 3], -5),
            (&[3, 3], -5),
            (&[1, 5], 9),
        ])
    }

    /// `D1^8 + 7 D1^5 D3 - 35 D1^2 D3^2 - 21 D1^3 D5 - 42 D3 D5 + 90 D1 D7`,
    /// the second BKP equation.
    pub fn bkp_degree8() -> Self {
        Self::from_terms(&[
            (&[1, 1, 1, 1, 1, 1, 1, 1], 1),
            (&[1, 1, 1, 1, 1, 3], 7),
            (&[1, 1, 3, 3], -35),
            (&[1, 1, 1, 5], -21),
            (&[3, 5], -42),
            (&[1, 7], 90),
        ])
    }
}

impl Default for HirotaPolynomial {
    fn default() -> Self {
        Self::new()
    }
}

/// Raw mixed partial `(d/dt)^parts tau (0)` (not normalized by `tau(0)`).
fn tau_partial_at_zero(tau: &TauSeries, grouped: &[(u32, u32)]) -> Rational {
    let factors: Vec<(Var, u32)> = grouped.iter().map(|&(idx, e)| (Var::t(idx), e)).collect();
    let m = Monomial::from_factors(&factors);
    tau.poly.coeff(&m) * m.exponent_factorial()
}

/// Evaluates `P(D)(tau, tau)` at `t = 0` by expanding every
/// `(d - d~)`-monomial into signed products of partial derivatives of `tau`.
pub fn hirota_eval(p: &HirotaPolynomial, tau: &TauSeries) -> Result<Rational, HirotaError> {
    let needed = p.max_weight();
    if tau.cutoff() < needed {
        return Err(HirotaError::InsufficientCutoff { needed, got: tau.cutoff() });
    }
    let mut total = Rational::zero();
    for (indices, coeff) in &p.terms {
        let grouped = group_parts(indices);
        let split_count: usize = grouped.iter().map(|&(_, m)| m as usize + 1).product();
        let mut term_acc = Rational::zero();
        for code in 0..split_count {
            // decode the per-index split j_k in 0..=m_k
            let mut rem = code;
            let mut comb = Rational::one();
            let mut parity = 0u32;
            let mut left: Vec<(u32, u32)> = Vec::new();
            let mut right: Vec<(u32, u32)> = Vec::new();
            for &(idx, m) in &grouped {
                let j = (rem % (m as usize + 1)) as u32;
                rem /= m as usize + 1;
                comb *= Rational::from_integer(binomial(m as u64, j as u64));
                parity += m - j;
                if j > 0 {
                    left.push((idx, j));
                }
                if m - j > 0 {
                    right.push((idx, m - j));
                }
            }
            let mut contribution =
                comb * tau_partial_at_zero(tau, &left) * tau_partial_at_zero(tau, &right);
            if parity % 2 == 1 {
                contribution = -contribution;
            }
            term_acc += contribution;
        }
        total += coeff * &term_acc;
    }
    Ok(total)
}

/// The six checked residuals: the degree-6/8 Hirota-operator equations on
/// `(tau, tau)` and their moment- and cumulant-form reductions (the latter
/// two are the even-potential forms: they assume odd moments vanish).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BkpResiduals {
    pub hirota6: Rational,
    pub hirota8: Rational,
    pub moment6: Rational,
    pub moment8: Rational,
    pub cumulant6: Rational,
    pub cumulant8: Rational,
}

impl BkpResiduals {
    pub fn all_zero(&self) -> bool {
        self.as_list().iter().all(|(_, r)| r.is_zero())
    }

    pub fn as_list(&self) -> Vec<(&'static str, Rational)> {
        vec![
            ("hirota-degree-6", self.hirota6.clone()),
            ("hirota-degree-8", self.hirota8.clone()),
            ("moment-degree-6", self.moment6.clone()),
            ("moment-degree-8", self.moment8.clone()),
            ("cumulant-degree-6", self.cumulant6.clone()),
            ("cumulant-degree-8", self.cumulant8.clone()),
        ]
    }
}

/// Degree-6/8 BKP residuals of a tau truncation; all six vanish exactly for
/// valid tau data from an even potential.
pub fn bkp_equation_residuals(tau: &TauSeries) -> Result<BkpResiduals, HirotaError> {
    if tau.cutoff() < 8 {
        return Err(HirotaError::InsufficientCutoff { needed: 8, got: tau.cutoff() });
    }
    let hirota6 = hirota_eval(&HirotaPolynomial::bkp_degree6(), tau)?;
    let hirota8 = hirota_eval(&HirotaPolynomial::bkp_degree8(), tau)?;

    let m = |parts: &[u32]| tau.moment(parts);
    let moment6 = m(&[1; 6]) + rat_int(15) * m(&[1; 4]) * m(&[1, 1])
        - rat_int(5) * m(&[3, 1, 1, 1])
        - rat_int(15) * m(&[3, 1]) * m(&[1, 1])
        - rat_int(5) * m(&[3, 3])
        + rat_int(9) * m(&[5, 1]);
    let moment8 = m(&[1; 8])
        + rat_int(28) * m(&[1; 6]) * m(&[1, 1])
        + rat_int(35) * m(&[1; 4]) * m(&[1; 4])
        + rat_int(7) * m(&[3, 1, 1, 1, 1, 1])
        + rat_int(70) * m(&[3, 1, 1, 1]) * m(&[1, 1])
        + rat_int(35) * m(&[3, 1]) * m(&[1; 4])
        - rat_int(35) * m(&[3, 3]) * m(&[1, 1])
        - rat_int(70) * m(&[3, 1]) * m(&[3, 1])
        - rat_int(21) * m(&[5, 1, 1, 1])
        - rat_int(63) * m(&[5, 1]) * m(&[1, 1])
        - rat_int(42) * m(&[5, 3])
        + rat_int(90) * m(&[7, 1]);

    // Cumulants via the set-partition Moebius formula, with every sub-moment
    // read off the tau coefficients.
    let mut moments = BTreeMap::new();
    for w in 1..=8u32 {
        for parts in odd_partitions(w) {
            let req = MomentRequest::new(parts.clone()).expect("positive parts");
            moments.insert(req, m(&parts));
        }
    }
    let k = |parts: &[u32]| -> Result<Rational, HirotaError> {
        let req = MomentRequest::new(parts.to_vec()).expect("positive parts");
        Ok(cumulants(&moments, &req)?)
    };
    let k11 = k(&[1, 1])?;
    let k14 = k(&[1; 4])?;
    let k16 = k(&[1; 6])?;
    let k18 = k(&[1; 8])?;
    let k31 = k(&[3, 1])?;
    let k313 = k(&[3, 1, 1, 1])?;
    let k315 = k(&[3, 1, 1, 1, 1, 1])?;
    let k33 = k(&[3, 3])?;
    let k51 = k(&[5, 1])?;
    let k513 = k(&[5, 1, 1, 1])?;
    let k53 = k(&[5, 3])?;
    let k71 = k(&[7, 1])?;

    let cumulant6 = &k16 + rat_int(30) * &k14 * &k11 + rat_int(60) * &k11 * &k11 * &k11
        - rat_int(5) * &k313
        - rat_int(5) * &k33
        - rat_int(30) * &k31 * &k11
        + rat_int(9) * &k51;
    let cumulant8 = &k18
        + rat_int(56) * &k16 * &k11
        + rat_int(70) * &k14 * &k14
        + rat_int(840) * &k14 * &k11 * &k11
        + rat_int(840) * &k11 * &k11 * &k11 * &k11
        + rat_int(7) * &k315
        + rat_int(70) * &k31 * &k14
        + rat_int(420) * &k31 * &k11 * &k11
        + rat_int(140) * &k313 * &k11
        - rat_int(35) * &k33 * &k11
        - rat_int(70) * &k31 * &k31
        - rat_int(21) * &k513
        - rat_int(126) * &k51 * &k11
        - rat_int(42) * &k53
        + rat_int(90) * &k71;

    Ok(BkpResiduals { hirota6, hirota8, moment6, moment8, cumulant6, cumulant8 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftSign {
    Plus,
    Minus,
}

impl ShiftSign {
    fn factor(self, index: u32) -> Rational {
        let base = rat(2, index as i64);
        match self {
            ShiftSign::Plus => base,
            ShiftSign::Minus => -base,
        }
    }
}

/// Substitute `t_j -> t_j ± 2/(j z^j)` in the given family, producing a
/// Laurent polynomial in `z`.
fn expand_shift(
    poly: &OddPolynomial,
    family: VarFamily,
    sign: ShiftSign,
) -> LaurentInZ {
    let cutoff = poly.cutoff();
    let mut out = LaurentInZ::zero(cutoff);
    for (mono, coeff) in poly.terms() {
        // (z_exponent, remaining monomial, accumulated factor)
        let mut acc: Vec<(i64, Monomial, Rational)> =
            vec![(0, Monomial::unit(), coeff.clone())];
        for &(v, e) in mono.factors() {
            if v.family != family {
                for entry in &mut acc {
                    entry.1 = entry.1.mul(&Monomial::from_factors(&[(v, e)]));
                }
                continue;
            }
            let mut next = Vec::with_capacity(acc.len() * (e as usize + 1));
            for (zexp, m, c) in &acc {
                let mut shift_pow = Rational::one();
                for r in 0..=e {
                    let keep = e - r;
                    let mut factors = m.factors().to_vec();
                    if keep > 0 {
                        factors.push((v, keep));
                    }
                    let comb = Rational::from_integer(binomial(e as u64, r as u64));
                    next.push((
                        zexp - (v.index as i64) * r as i64,
                        Monomial::from_factors(&factors),
                        c * &comb * &shift_pow,
                    ));
                    shift_pow *= sign.factor(v.index);
                }
            }
            acc = next;
        }
        for (zexp, m, c) in acc {
            let mut p = OddPolynomial::zero(cutoff);
            p.add_term(m, c);
            out.add_term(zexp, p);
        }
    }
    out
}

/// `tau(t ± 2[z^{-1}])` as a Laurent polynomial in `z`; errors when the
/// needed window (the maximal term weight) exceeds `z_window`.
pub fn shift_times(
    tau: &TauSeries,
    sign: ShiftSign,
    z_window: i64,
) -> Result<LaurentInZ, HirotaError> {
    let needed = tau.poly.terms().map(|(m, _)| m.weight()).max().unwrap_or(0) as i64;
    if needed > z_window {
        return Err(HirotaError::WindowOverflow { needed: -needed, bound: z_window });
    }
    Ok(expand_shift(&tau.poly, VarFamily::T, sign))
}

/// Exponential prefactor `exp(sum_j z^j (t_j - t~_j))` (odd `j`) as a Laurent
/// series, truncated at `z`-degree (equivalently weight) `cutoff`.
fn bilinear_exp_factor(cutoff: u32) -> LaurentInZ {
    // m E_m = sum_{odd j <= m} j u_j E_{m-j}, u_j = t_j - t~_j.
    let mut coeffs: Vec<OddPolynomial> = vec![OddPolynomial::one(cutoff)];
    for m in 1..=cutoff {
        let mut acc = OddPolynomial::zero(cutoff);
        let mut j = 1;
        while j <= m {
            let u = &OddPolynomial::var(VarFamily::T, j, cutoff)
                - &OddPolynomial::var(VarFamily::TTilde, j, cutoff);
            let term = u
                .scalar_mul(&rat_int(j as i64))
                .poly_mul(&coeffs[(m - j) as usize])
                .expect("uniform cutoff");
            acc = &acc + &term;
            j += 2;
        }
        coeffs.push(acc.scalar_mul(&(Rational::one() / rat_int(m as i64))));
    }
    let mut out = LaurentInZ::zero(cutoff);
    for (m, p) in coeffs.into_iter().enumerate() {
        out.add_term(m as i64, p);
    }
    out
}

pub const MAX_RESIDUE_CUTOFF: u32 = 8;

/// Defect of the BKP bilinear residue identity on a tau truncation:
///
/// `Res_{z=0} dz/z exp(sum z^j (t_j - t~_j)) tau(t - 2[z^-1]) tau(t~ + 2[z^-1])
///  - tau(t) tau(t~)`
///
/// as a polynomial in `(t, t~)` truncated at joint weight `cutoff`. The
/// residue is the `z^0` coefficient of the integrand divided by `z`. Exactly
/// zero iff the truncated identity holds to this order.
pub fn bkp_residue_defect(tau: &TauSeries, cutoff: u32) -> Result<OddPolynomial, HirotaError> {
    if cutoff > MAX_RESIDUE_CUTOFF {
        return Err(HirotaError::CostGuard {
            what: "residue cutoff",
            value: cutoff,
            max: MAX_RESIDUE_CUTOFF,
        });
    }
    if tau.cutoff() < cutoff {
        return Err(HirotaError::InsufficientCutoff { needed: cutoff, got: tau.cutoff() });
    }
    let tau_t = tau.poly.with_cutoff(cutoff);
    let tau_tt = tau_t.retag_family(VarFamily::T, VarFamily::TTilde);

    let shifted_minus = expand_shift(&tau_t, VarFamily::T, ShiftSign::Minus);
    let shifted_plus = expand_shift(&tau_tt, VarFamily::TTilde, ShiftSign::Plus);
    let exp_factor = bilinear_exp_factor(cutoff);

    let product = exp_factor
        .mul(&shifted_minus)
        .expect("uniform cutoff")
        .mul(&shifted_plus)
        .expect("uniform cutoff");
    let residue = product.coeff(0);

    let direct = tau_t.poly_mul(&tau_tt).expect("uniform cutoff");
    Ok(&residue - &direct)
}
