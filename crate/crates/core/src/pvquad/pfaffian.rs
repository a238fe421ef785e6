//! Floating-point Pfaffian by Parlett-Reid tridiagonalization with pivoting,
//! and Schur's Pfaffian identity check.
//!
//! Sign convention: `Pf [[0, a], [-a, 0]] = a`.

use super::PvError;

/// Even-dimensional antisymmetric matrix of floats.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix {
    n: usize,
    a: Vec<f64>, // row-major
}

impl SkewMatrix {
    /// Validates evenness, zero diagonal and exact antisymmetry.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, PvError> {
        let n = rows.len();
        if n % 2 != 0 {
            return Err(PvError::OddDimension(n));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(PvError::BadArgument("matrix is not square"));
            }
            for j in 0..n {
                if rows[i][j] != -rows[j][i] {
                    return Err(PvError::NotSkew { i, j });
                }
            }
            if row[i] != 0.0 {
                return Err(PvError::NotSkew { i, j: i });
            }
        }
        let a = rows.into_iter().flatten().collect();
        Ok(SkewMatrix { n, a })
    }

    /// Builds the skew matrix from its strict upper triangle.
    pub fn from_upper<F: Fn(usize, usize) -> f64>(n: usize, entry: F) -> Result<Self, PvError> {
        if n % 2 != 0 {
            return Err(PvError::OddDimension(n));
        }
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = entry(i, j);
                a[i * n + j] = v;
                a[j * n + i] = -v;
            }
        }
        Ok(SkewMatrix { n, a })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.a[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    /// Pfaffian by Parlett-Reid: congruence transformations with partial
    /// pivoting reduce to skew tridiagonal form, whose Pfaffian is the
    /// product of the odd superdiagonal entries.
    pub fn pfaffian(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 1.0;
        }
        let mut a = self.a.clone();
        let idx = |i: usize, j: usize| i * n + j;
        let mut sign = 1.0f64;
        for k in 0..n.saturating_sub(2) {
            // pivot: largest |a[i][k]| for i > k
            let mut p = k + 1;
            for i in k + 2..n {
                if a[idx(i, k)].abs() > a[idx(p, k)].abs() {
                    p = i;
                }
            }
            if a[idx(p, k)] == 0.0 {
                // Column k vanishes below the diagonal. The tridiagonal entry
                // a[k][k+1] is frozen at 0; it enters the Pfaffian product
                // only for even k. For odd k the block is already reduced.
                if k % 2 == 0 {
                    return 0.0;
                }
                continue;
            }
            if p != k + 1 {
                for j in 0..n {
                    a.swap(idx(p, j), idx(k + 1, j));
                }
                for i in 0..n {
                    a.swap(idx(i, p), idx(i, k + 1));
                }
                sign = -sign;
            }
            let pivot = a[idx(k + 1, k)];
            for i in k + 2..n {
                let mu = a[idx(i, k)] / pivot;
                if mu == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let t = a[idx(k + 1, j)];
                    a[idx(i, j)] -= mu * t;
                }
                for r in 0..n {
                    let t = a[idx(r, k + 1)];
                    a[idx(r, i)] -= mu * t;
                }
            }
        }
        let mut pf = sign;
        let mut k = 0;
        while k + 1 < n {
            pf *= a[idx(k, k + 1)];
            k += 2;
        }
        pf
    }
}

/// Free-function form of [`SkewMatrix::pfaffian`].
pub fn pfaffian(a: &SkewMatrix) -> f64 {
    a.pfaffian()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchurPfaffian {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

/// Schur's identity `prod_{i<j} (x_j - x_i)/(x_j + x_i) = Pf((x_j - x_i)/(x_j + x_i))`
/// for an even number of points with `x_i + x_j != 0`.
pub fn schur_pfaffian_check(xs: &[f64]) -> Result<SchurPfaffian, PvError> {
    let n = xs.len();
    if n % 2 != 0 {
        return Err(PvError::OddDimension(n));
    }
    for i in 0..n {
        for j in i + 1..n {
            if xs[i] + xs[j] == 0.0 {
                return Err(PvError::BadArgument("antidiagonal collision: x_i + x_j = 0"));
            }
        }
    }
    let mut lhs = 1.0;
    for i in 0..n {
        for j in i + 1..n {
            lhs *= (xs[j] - xs[i]) / (xs[j] + xs[i]);
        }
    }
    let m = SkewMatrix::from_upper(n, |i, j| (xs[j] - xs[i]) / (xs[j] + xs[i]))?;
    let rhs = m.pfaffian();
    let rel_err = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-300);
    Ok(SchurPfaffian { lhs, rhs, rel_err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pvquad::gauss::det_lu;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn defining_two_by_two() {
        let m = SkewMatrix::from_upper(2, |_, _| 3.5).unwrap();
        assert_eq!(m.pfaffian(), 3.5);
    }

    #[test]
    fn four_by_four_classical() {
        // Pf = a12 a34 - a13 a24 + a14 a23
        let vals = [(0usize, 1usize, 1.3), (0, 2, -0.7), (0, 3, 2.1), (1, 2, 0.9), (1, 3, -1.1), (2, 3, 0.4)];
        let entry = |i: usize, j: usize| {
            vals.iter().find(|&&(a, b, _)| a == i && b == j).map(|&(_, _, v)| v).unwrap()
        };
        let m = SkewMatrix::from_upper(4, entry).unwrap();
        let expect = 1.3 * 0.4 - (-0.7) * (-1.1) + 2.1 * 0.9;
        assert!((m.pfaffian() - expect).abs() < 1e-14);
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        assert!(matches!(
            SkewMatrix::new(vec![vec![0.0; 3]; 3]),
            Err(PvError::OddDimension(3))
        ));
        let bad = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(matches!(SkewMatrix::new(bad), Err(PvError::NotSkew { .. })));
    }

    #[test]
    fn pfaffian_squared_is_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 4, 6, 8] {
            for _ in 0..25 {
                let m = SkewMatrix::from_upper(n, |_, _| 0.0).unwrap();
                let mut rows = m.to_rows();
                for i in 0..n {
                    for j in i + 1..n {
                        let v = rng.gen_range(-1.0..1.0);
                        rows[i][j] = v;
                        rows[j][i] = -v;
                    }
                }
                let m = SkewMatrix::new(rows.clone()).unwrap();
                let pf = m.pfaffian();
                let det = det_lu(&rows);
                let scale = det.abs().max(pf * pf).max(1e-300);
                assert!(
                    (pf * pf - det).abs() / scale < 1e-10,
                    "Pf^2 = {} vs det = {} at n = {n}",
                    pf * pf,
                    det
                );
            }
        }
    }

    #[test]
    fn zero_column_matrix_has_zero_pfaffian() {
        let mut rows = vec![vec![0.0; 4]; 4];
        rows[2][3] = 1.0;
        rows[3][2] = -1.0;
        let m = SkewMatrix::new(rows).unwrap();
        assert_eq!(m.pfaffian(), 0.0);
    }

    #[test]
    fn block_diagonal_pfaffian() {
        // zero pivot column at odd stage must not zero the result
        let mut rows = vec![vec![0.0; 4]; 4];
        rows[0][1] = 2.0;
        rows[1][0] = -2.0;
        rows[2][3] = 3.0;
        rows[3][2] = -3.0;
        let m = SkewMatrix::new(rows).unwrap();
        assert!((m.pfaffian() - 6.0).abs() < 1e-15);
    }

    #[test]
    fn schur_identity_small() {
        let r = schur_pfaffian_check(&[1.0, 2.0]).unwrap();
        assert_eq!(r.rel_err, 0.0);

        let r = schur_pfaffian_check(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(r.rel_err < 1e-12, "rel_err {}", r.rel_err);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let xs: Vec<f64> = (0..6).map(|_| rng.gen_range(0.1..5.0)).collect();
            let r = schur_pfaffian_check(&xs).unwrap();
            assert!(r.rel_err < 1e-10, "rel_err {} for {xs:?}", r.rel_err);
        }

        assert!(schur_pfaffian_check(&[1.0, -1.0]).is_err());
        assert!(schur_pfaffian_check(&[1.0, 2.0, 3.0]).is_err());
    }
}
