//! Wick expansion of `<prod_i Tr H^{k_i}>` over perfect matchings.
//!
//! Each trace word `Tr H^k` contributes `k` matrix-entry letters
//! `H_{i_p i_{p+1}}` with cyclic index positions. A perfect matching of all
//! letters contributes the product of pair covariances, with the two index
//! deltas of each pair identifying index positions.
//!
//! Two evaluation paths:
//! - `trace_moment` (default): per matching, contract the deltas with a
//!   union-find over index positions, then sum the covariance product over
//!   assignments of the surviving index classes (`N^classes` terms).
//! - `trace_moment_naive`: sum over all `N^D` raw index assignments and all
//!   matchings, evaluating the deltas literally. Exponentially slower; kept
//!   as an independent cross-check of the contraction logic.

use num_traits::Zero;
use rayon::prelude::*;

use super::{covariance, MomentError, MomentRequest, SpectralData};
use crate::algebra::partitions::perfect_matchings;
use crate::algebra::rational::Rational;

/// Total-degree guard; matchings grow as `(D-1)!!`.
pub const MAX_TOTAL_DEGREE: u32 = 12;
/// Budget on `sum over matchings of N^{index classes}`.
const CLASS_WORK_BUDGET: u128 = 100_000_000;
/// Budget on `N^D * (D-1)!!` for the naive path.
const NAIVE_WORK_BUDGET: u128 = 50_000_000;

/// Letters of the trace product: `(row_position, col_position)` per letter,
/// where positions index the cyclic word indices globally.
fn letters_of(req: &MomentRequest) -> (Vec<(usize, usize)>, usize) {
    let mut letters = Vec::new();
    let mut base = 0usize;
    for &k in req.exponents() {
        let k = k as usize;
        for p in 0..k {
            letters.push((base + p, base + (p + 1) % k));
        }
        base += k;
    }
    (letters, base)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Per matching: the list of `(row_class, col_class)` covariance slots after
/// delta contraction, over `num_classes` free index classes.
struct ContractedMatching {
    pair_classes: Vec<(usize, usize)>,
    num_classes: usize,
}

fn contract(letters: &[(usize, usize)], positions: usize, matching: &[(usize, usize)]) -> ContractedMatching {
    let mut uf = UnionFind::new(positions);
    for &(u, v) in matching {
        let (ru, cu) = letters[u];
        let (rv, cv) = letters[v];
        // <H_ab H_cd> = delta_ad delta_bc * cov: identify a~d and b~c.
        uf.union(ru, cv);
        uf.union(cu, rv);
    }
    let mut class_of_root = std::collections::HashMap::new();
    let mut class_of_pos = vec![0usize; positions];
    for pos in 0..positions {
        let root = uf.find(pos);
        let next = class_of_root.len();
        let id = *class_of_root.entry(root).or_insert(next);
        class_of_pos[pos] = id;
    }
    let pair_classes = matching
        .iter()
        .map(|&(u, _)| {
            let (ru, cu) = letters[u];
            (class_of_pos[ru], class_of_pos[cu])
        })
        .collect();
    ContractedMatching { pair_classes, num_classes: class_of_root.len() }
}

fn covariance_table(spectral: &SpectralData) -> Vec<Vec<Rational>> {
    let n = spectral.n();
    (0..n)
        .map(|a| (0..n).map(|b| covariance(a, b, spectral).expect("indices in range")).collect())
        .collect()
}

fn guard_degree(req: &MomentRequest) -> Result<u32, MomentError> {
    let d = req.total_degree();
    if d > MAX_TOTAL_DEGREE {
        return Err(MomentError::BudgetExceeded {
            work: d as u128,
            budget: MAX_TOTAL_DEGREE as u128,
        });
    }
    Ok(d)
}

/// Exact Gaussian expectation `<prod_i Tr H^{k_i}>` under the external-field
/// measure; zero for odd total degree.
pub fn trace_moment(spectral: &SpectralData, req: &MomentRequest) -> Result<Rational, MomentError> {
    let d = guard_degree(req)?;
    if d % 2 == 1 {
        return Ok(Rational::zero());
    }
    let (letters, positions) = letters_of(req);
    let matchings = perfect_matchings(letters.len()).expect("even degree within guard");
    let contracted: Vec<ContractedMatching> = matchings
        .iter()
        .map(|m| contract(&letters, positions, m))
        .collect();

    let n = spectral.n() as u128;
    let work: u128 = contracted
        .iter()
        .map(|c| n.saturating_pow(c.num_classes as u32))
        .sum();
    if work > CLASS_WORK_BUDGET {
        return Err(MomentError::BudgetExceeded { work, budget: CLASS_WORK_BUDGET });
    }

    let cov = covariance_table(spectral);
    let n = spectral.n();
    let total = contracted
        .par_iter()
        .map(|c| {
            let mut acc = Rational::zero();
            let mut assignment = vec![0usize; c.num_classes];
            loop {
                let mut term: Option<Rational> = None;
                for &(ra, ca) in &c.pair_classes {
                    let f = &cov[assignment[ra]][assignment[ca]];
                    term = Some(match term {
                        None => f.clone(),
                        Some(t) => t * f,
                    });
                }
                acc += term.expect("at least one pair");
                // increment mixed-radix counter over class assignments
                let mut i = 0;
                loop {
                    if i == c.num_classes {
                        return acc;
                    }
                    assignment[i] += 1;
                    if assignment[i] < n {
                        break;
                    }
                    assignment[i] = 0;
                    i += 1;
                }
            }
        })
        .reduce(Rational::zero, |a, b| a + b);
    Ok(total)
}

/// Same expectation by brute force over all `N^D` index assignments.
pub fn trace_moment_naive(
    spectral: &SpectralData,
    req: &MomentRequest,
) -> Result<Rational, MomentError> {
    let d = guard_degree(req)?;
    if d % 2 == 1 {
        return Ok(Rational::zero());
    }
    let (letters, positions) = letters_of(req);
    let matchings = perfect_matchings(letters.len()).expect("even degree within guard");

    let n = spectral.n();
    let work = (n as u128).saturating_pow(positions as u32) * matchings.len() as u128;
    if work > NAIVE_WORK_BUDGET {
        return Err(MomentError::BudgetExceeded { work, budget: NAIVE_WORK_BUDGET });
    }

    let cov = covariance_table(spectral);
    let mut total = Rational::zero();
    let mut idx = vec![0usize; positions];
    loop {
        for matching in &matchings {
            let mut term: Option<Rational> = None;
            for &(u, v) in matching {
                let (ru, cu) = letters[u];
                let (rv, cv) = letters[v];
                // delta_{a d} delta_{b c}
                if idx[ru] != idx[cv] || idx[cu] != idx[rv] {
                    term = None;
                    break;
                }
                let f = &cov[idx[ru]][idx[cu]];
                term = Some(match term {
                    None => f.clone(),
                    Some(t) => t * f,
                });
            }
            if let Some(t) = term {
                total += t;
            }
        }
        let mut i = 0;
        loop {
            if i == positions {
                return Ok(total);
            }
            idx[i] += 1;
            if idx[i] < n {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}
