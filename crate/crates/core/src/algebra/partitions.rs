//! Strict partitions, set partitions and perfect matchings.

use std::fmt;

use super::AlgebraError;

/// A partition into strictly decreasing positive parts. The empty partition
/// is allowed and prints as `()`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StrictPartition {
    parts: Vec<u32>,
}

impl StrictPartition {
    pub fn new(parts: Vec<u32>) -> Result<Self, AlgebraError> {
        for w in parts.windows(2) {
            if w[0] <= w[1] {
                return Err(AlgebraError::NotStrictlyDecreasing);
            }
        }
        if parts.last().is_some_and(|&p| p == 0) {
            return Err(AlgebraError::NotStrictlyDecreasing);
        }
        Ok(StrictPartition { parts })
    }

    pub fn empty() -> Self {
        StrictPartition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `2λ`: every part doubled (still strict).
    pub fn doubled(&self) -> StrictPartition {
        StrictPartition { parts: self.parts.iter().map(|&p| 2 * p).collect() }
    }

    /// `λ/2` when every part is even.
    pub fn halved(&self) -> Option<StrictPartition> {
        if self.parts.iter().all(|&p| p % 2 == 0) {
            Some(StrictPartition { parts: self.parts.iter().map(|&p| p / 2).collect() })
        } else {
            None
        }
    }

    pub fn has_odd_part(&self) -> bool {
        self.parts.iter().any(|&p| p % 2 == 1)
    }
}

impl fmt::Display for StrictPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All strict partitions of weight exactly `weight`, first part at most
/// `max_part`, in decreasing lexicographic order.
fn strict_of_weight(weight: u32, max_part: u32, out: &mut Vec<StrictPartition>, prefix: &mut Vec<u32>) {
    if weight == 0 {
        out.push(StrictPartition { parts: prefix.clone() });
        return;
    }
    let hi = weight.min(max_part);
    for first in (1..=hi).rev() {
        // remaining parts are distinct and < first, so they sum to at most
        // first*(first-1)/2
        if weight - first > first * (first - 1) / 2 {
            continue;
        }
        prefix.push(first);
        strict_of_weight(weight - first, first - 1, out, prefix);
        prefix.pop();
    }
}

/// All strict partitions of weight exactly `weight` in canonical
/// (decreasing lexicographic) order.
pub fn strict_partitions_of(weight: u32) -> Vec<StrictPartition> {
    let mut out = Vec::new();
    strict_of_weight(weight, weight, &mut out, &mut Vec::new());
    out
}

/// All strict partitions of weight at most `max_weight`, each exactly once.
///
/// Canonical order: by weight ascending, then decreasing lexicographic, e.g.
/// `(), (1), (2), (3), (2,1), (4), (3,1), ...`
pub fn strict_partitions(max_weight: u32) -> Vec<StrictPartition> {
    let mut out = Vec::new();
    for w in 0..=max_weight {
        out.extend(strict_partitions_of(w));
    }
    out
}

/// A partition of `{0, .., n-1}` into disjoint nonempty blocks. Blocks are
/// stored with ascending elements and sorted by their minimum.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }
}

const MAX_SET_PARTITION_N: usize = 10;

/// All set partitions of `{0, .., n-1}` for `1 <= n <= 10`.
pub fn set_partitions(n: usize) -> Result<Vec<SetPartition>, AlgebraError> {
    if n == 0 || n > MAX_SET_PARTITION_N {
        return Err(AlgebraError::OutOfRange {
            what: "set partition size",
            value: n,
            max: MAX_SET_PARTITION_N,
        });
    }
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    fn recurse(k: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<SetPartition>) {
        if k == n {
            out.push(SetPartition { blocks: blocks.clone() });
            return;
        }
        for i in 0..blocks.len() {
            blocks[i].push(k);
            recurse(k + 1, n, blocks, out);
            blocks[i].pop();
        }
        blocks.push(vec![k]);
        recurse(k + 1, n, blocks, out);
        blocks.pop();
    }
    recurse(0, n, &mut blocks, &mut out);
    Ok(out)
}

const MAX_MATCHING_N: usize = 12;

/// All perfect matchings of `{0, .., n-1}` (n even, n <= 12); each matching
/// is a list of pairs `(i, j)` with `i < j`, ordered by `i`.
pub fn perfect_matchings(n: usize) -> Result<Vec<Vec<(usize, usize)>>, AlgebraError> {
    if n % 2 != 0 {
        return Err(AlgebraError::OddMatchingSize(n));
    }
    if n > MAX_MATCHING_N {
        return Err(AlgebraError::OutOfRange { what: "matching size", value: n, max: MAX_MATCHING_N });
    }
    let mut out = Vec::new();
    let mut used = vec![false; n];
    let mut pairs = Vec::new();
    fn recurse(
        n: usize,
        used: &mut Vec<bool>,
        pairs: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        let first = match (0..n).find(|&i| !used[i]) {
            Some(i) => i,
            None => {
                out.push(pairs.clone());
                return;
            }
        };
        used[first] = true;
        for j in first + 1..n {
            if used[j] {
                continue;
            }
            used[j] = true;
            pairs.push((first, j));
            recurse(n, used, pairs, out);
            pairs.pop();
            used[j] = false;
        }
        used[first] = false;
    }
    recurse(n, &mut used, &mut pairs, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use std::collections::HashSet;

    #[test]
    fn strict_partition_rejects_bad_parts() {
        assert!(StrictPartition::new(vec![3, 3]).is_err());
        assert!(StrictPartition::new(vec![2, 3]).is_err());
        assert!(StrictPartition::new(vec![2, 0]).is_err());
        assert!(StrictPartition::new(vec![5, 3, 1]).is_ok());
    }

    #[test]
    fn enumeration_matches_documented_order() {
        let got: Vec<String> = strict_partitions(4).iter().map(|p| p.to_string()).collect();
        assert_eq!(got, vec!["()", "(1)", "(2)", "(3)", "(2,1)", "(4)", "(3,1)"]);
    }

    #[test]
    fn weight_eight_count_and_content() {
        let got: Vec<String> = strict_partitions_of(8).iter().map(|p| p.to_string()).collect();
        assert_eq!(
            got,
            vec!["(8)", "(7,1)", "(6,2)", "(5,3)", "(5,2,1)", "(4,3,1)"]
        );
    }

    #[test]
    fn enumeration_is_duplicate_free_and_valid() {
        let all = strict_partitions(12);
        let mut seen = HashSet::new();
        for p in &all {
            assert!(seen.insert(p.clone()), "duplicate {p}");
            assert!(StrictPartition::new(p.parts().to_vec()).is_ok());
            assert!(p.weight() <= 12);
        }
        // Independent count: q(n) by the distinct-parts generating function
        // prod (1 + x^k), expanded with plain integer DP.
        let max = 12usize;
        let mut gf = vec![0i64; max + 1];
        gf[0] = 1;
        for k in 1..=max {
            for w in (k..=max).rev() {
                gf[w] += gf[w - k];
            }
        }
        let total: i64 = gf.iter().sum();
        assert_eq!(all.len() as i64, total);
    }

    /// Bell triangle recurrence, independent of the enumerator.
    fn bell_number(n: usize) -> BigInt {
        let mut row = vec![BigInt::from(1)];
        for _ in 1..n {
            let mut next = vec![row.last().unwrap().clone()];
            for v in &row {
                let last = next.last().unwrap().clone();
                next.push(last + v);
            }
            row = next;
        }
        row[0].clone()
    }

    #[test]
    fn set_partition_counts_are_bell_numbers() {
        assert_eq!(set_partitions(1).unwrap().len(), 1);
        assert_eq!(set_partitions(3).unwrap().len(), 5);
        assert_eq!(set_partitions(4).unwrap().len(), 15);
        for n in 1..=8 {
            let count = BigInt::from(set_partitions(n).unwrap().len());
            assert_eq!(count, bell_number(n), "Bell number mismatch at n={n}");
        }
        assert!(set_partitions(0).is_err());
        assert!(set_partitions(11).is_err());
    }

    #[test]
    fn set_partitions_cover_everything() {
        for sp in set_partitions(4).unwrap() {
            let mut seen = vec![false; 4];
            for b in sp.blocks() {
                assert!(!b.is_empty());
                for &x in b {
                    assert!(!seen[x], "element {x} in two blocks");
                    seen[x] = true;
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn matching_counts_are_double_factorials() {
        assert_eq!(perfect_matchings(2).unwrap().len(), 1);
        assert_eq!(perfect_matchings(4).unwrap().len(), 3);
        assert_eq!(perfect_matchings(8).unwrap().len(), 105);
        assert!(perfect_matchings(3).is_err());
        assert!(perfect_matchings(14).is_err());
    }
}
