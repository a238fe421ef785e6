//! Exact Pfaffian of a skew-symmetric matrix over a commutative ring, by
//! Laplace-style expansion along the first active row. Exponential in the
//! dimension, which is fine for the small matrices the symbolic layer needs.
//!
//! Sign convention: `Pf [[0, a], [-a, 0]] = a`.

/// Pfaffian from the strict upper triangle `entry(i, j)` (`i < j`) of a
/// `2m x 2m` skew matrix. `one` is the ring unit, returned for `n == 0`.
pub fn pfaffian_generic<T, E>(n: usize, one: T, entry: &E) -> T
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<Output = T>,
    E: Fn(usize, usize) -> T,
{
    assert!(n % 2 == 0, "Pfaffian needs even dimension, got {n}");
    let active: Vec<usize> = (0..n).collect();
    pf_rec(&active, &one, entry)
}

fn pf_rec<T, E>(active: &[usize], one: &T, entry: &E) -> T
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<Output = T>,
    E: Fn(usize, usize) -> T,
{
    if active.is_empty() {
        return one.clone();
    }
    if active.len() == 2 {
        return entry(active[0], active[1]);
    }
    let i0 = active[0];
    let mut acc: Option<T> = None;
    for (pos, &j) in active.iter().enumerate().skip(1) {
        let rest: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&k| k != i0 && k != j)
            .collect();
        let term = entry(i0, j) * pf_rec(&rest, one, entry);
        acc = Some(match acc {
            None => term,
            // expansion signs alternate: +, -, +, ...
            Some(a) => {
                if pos % 2 == 1 {
                    a + term
                } else {
                    a - term
                }
            }
        });
    }
    acc.expect("nonempty active set")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{rat_int, Rational};

    #[test]
    fn two_by_two_is_the_top_entry() {
        let pf = pfaffian_generic(2, rat_int(1), &|i, j| rat_int((10 * (i + 1) + j + 1) as i64));
        assert_eq!(pf, rat_int(12));
    }

    #[test]
    fn four_by_four_classical_expansion() {
        // a12 a34 - a13 a24 + a14 a23 with aij = 10(i+1) + (j+1)
        let a = |i: usize, j: usize| rat_int((10 * (i + 1) + j + 1) as i64);
        let pf = pfaffian_generic(4, rat_int(1), &a);
        let expected: Rational =
            a(0, 1) * a(2, 3) - a(0, 2) * a(1, 3) + a(0, 3) * a(1, 2);
        assert_eq!(pf, expected);
    }

    #[test]
    fn empty_matrix_gives_one() {
        assert_eq!(pfaffian_generic(0, rat_int(1), &|_, _| rat_int(0)), rat_int(1));
    }
}
