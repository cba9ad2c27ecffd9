//! Banded LU factorization with row partial pivoting.
//!
//! The five-point polar stencil couples each node to its angular neighbours
//! (including the wrap within a ring and the reflection pairing on the
//! innermost ring) and to the adjacent rings, so in ring-major ordering the
//! Jacobian has bandwidth n_t on both sides. Storage follows the usual band
//! layout with kl extra super-diagonal rows to absorb pivoting fill-in:
//! entry (i, j) lives at data[j·ldab + (kl + ku + i - j)].

/// Linear algebra failures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinAlgError {
    #[error("matrix is singular: zero pivot at column {0}")]
    Singular(usize),
}

/// Square banded matrix with kl sub- and ku super-diagonals.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zero(n: usize, kl: usize, ku: usize) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        let ldab = 2 * kl + ku + 1;
        Self { n, kl, ku, ldab, data: vec![0.0; ldab * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn offset(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = (i as isize, j as isize);
        let d = i - j + (self.kl + self.ku) as isize;
        // The top kl rows of each storage column are pivoting workspace;
        // assembly writes stay within the declared band.
        if i - j > self.kl as isize || j - i > self.ku as isize {
            return None;
        }
        Some(j as usize * self.ldab + d as usize)
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let off = self.offset(i, j).unwrap_or_else(|| {
            panic!("entry ({i}, {j}) outside band kl={}, ku={}", self.kl, self.ku)
        });
        self.data[off] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let off = self.offset(i, j).unwrap_or_else(|| {
            panic!("entry ({i}, {j}) outside band kl={}, ku={}", self.kl, self.ku)
        });
        self.data[off] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.offset(i, j).map_or(0.0, |off| self.data[off])
    }

    /// In-place LU with row equilibration and partial pivoting; returns a
    /// reusable solver. Rows are pre-scaled by a power of two near the
    /// reciprocal of their largest entry, which keeps the elimination's
    /// backward error proportional to each row's own magnitude. The polar
    /// stencil's innermost rows exceed the outer ones by ~1e7, so without
    /// this the solve noise scales with the worst row globally.
    pub fn factor(mut self) -> Result<BandedLu, LinAlgError> {
        let (n, kl, ku, ldab) = (self.n, self.kl, self.ku, self.ldab);
        let kv = kl + ku;
        let mut scales = vec![1.0f64; n];
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku).min(n - 1);
            let mut rowmax = 0.0f64;
            for j in lo..=hi {
                if let Some(off) = self.offset(i, j) {
                    rowmax = rowmax.max(self.data[off].abs());
                }
            }
            if rowmax == 0.0 {
                return Err(LinAlgError::Singular(i));
            }
            // Power-of-two scale: exact, introduces no rounding of entries.
            let s = (-rowmax.log2().round()).exp2();
            scales[i] = s;
            for j in lo..=hi {
                if let Some(off) = self.offset(i, j) {
                    self.data[off] *= s;
                }
            }
        }
        let mut ipiv = vec![0usize; n];
        // raw(i, j) with the expanded bandwidth kl + ku used during
        // elimination; bounds are maintained by the loop ranges.
        let at = |j: usize, i: usize| j * ldab + kv + i - j;
        for j in 0..n {
            let pmax = (j + kl).min(n - 1);
            let mut piv = j;
            let mut best = self.data[at(j, j)].abs();
            for i in j + 1..=pmax {
                let v = self.data[at(j, i)].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == 0.0 {
                return Err(LinAlgError::Singular(j));
            }
            ipiv[j] = piv;
            let cmax = (j + kv).min(n - 1);
            if piv != j {
                for k in j..=cmax {
                    self.data.swap(at(k, j), at(k, piv));
                }
            }
            let d = self.data[at(j, j)];
            for i in j + 1..=pmax {
                self.data[at(j, i)] /= d;
            }
            for k in j + 1..=cmax {
                let ajk = self.data[at(k, j)];
                if ajk == 0.0 {
                    continue;
                }
                let base = k * ldab + kv - k;
                for i in j + 1..=pmax {
                    self.data[base + i] -= self.data[at(j, i)] * ajk;
                }
            }
        }
        Ok(BandedLu { n, kl, ku, ldab, data: self.data, ipiv, scales })
    }
}

/// Factored banded system ready for repeated solves.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<f64>,
    ipiv: Vec<usize>,
    scales: Vec<f64>,
}

impl BandedLu {
    /// Solve A x = b in place.
    pub fn solve(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n, "rhs length {} vs dimension {}", b.len(), self.n);
        let (n, kl, ldab) = (self.n, self.kl, self.ldab);
        let kv = kl + self.ku;
        let at = |j: usize, i: usize| j * ldab + kv + i - j;
        // The factorization holds D·A, so solve D·A x = D·b.
        for (v, &s) in b.iter_mut().zip(&self.scales) {
            *v *= s;
        }
        // Forward: apply the recorded swaps and the unit-lower factor.
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let bj = b[j];
            if bj != 0.0 {
                let pmax = (j + kl).min(n - 1);
                for i in j + 1..=pmax {
                    b[i] -= self.data[at(j, i)] * bj;
                }
            }
        }
        // Back substitution through the upper factor of width kl + ku.
        for i in (0..n).rev() {
            let jmax = (i + kv).min(n - 1);
            let mut s = b[i];
            for j in i + 1..=jmax {
                s -= self.data[at(j, i)] * b[j];
            }
            b[i] = s / self.data[at(i, i)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense reference solve by Gaussian elimination with partial pivoting.
    fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut m: Vec<Vec<f64>> = a.iter().map(|row| row.clone()).collect();
        let mut x = b.to_vec();
        for j in 0..n {
            let piv = (j..n).max_by(|&p, &q| m[p][j].abs().total_cmp(&m[q][j].abs())).unwrap();
            m.swap(j, piv);
            x.swap(j, piv);
            for i in j + 1..n {
                let f = m[i][j] / m[j][j];
                for k in j..n {
                    m[i][k] -= f * m[j][k];
                }
                x[i] -= f * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let xj = x[j];
                x[i] -= m[i][j] * xj;
            }
            x[i] /= m[i][i];
        }
        x
    }

    #[test]
    fn tridiagonal_system_solves_exactly() {
        // -u'' = 1 on a 1D grid: A = tridiag(-1, 2, -1), closed-form inverse.
        let n = 12;
        let mut a = BandedMatrix::zero(n, 1, 1);
        for i in 0..n {
            a.set(i, i, 2.0);
            if i > 0 {
                a.set(i, i - 1, -1.0);
            }
            if i + 1 < n {
                a.set(i, i + 1, -1.0);
            }
        }
        let lu = a.factor().unwrap();
        let mut b = vec![1.0; n];
        lu.solve(&mut b);
        let m = n as f64;
        for (i, &x) in b.iter().enumerate() {
            let t = (i + 1) as f64;
            let want = t * (m + 1.0 - t) / 2.0;
            assert!((x - want).abs() < 1e-10 * want, "x[{i}] = {x}, want {want}");
        }
    }

    #[test]
    fn matches_dense_solver_on_random_bands() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for &(n, kl, ku) in &[(24usize, 3usize, 2usize), (40, 5, 5), (17, 1, 4)] {
            let mut band = BandedMatrix::zero(n, kl, ku);
            let mut dense = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    if j + kl >= i && i + ku >= j {
                        let v = rng.random::<f64>() * 2.0 - 1.0;
                        // Dominant diagonal keeps the reference solve stable.
                        let v = if i == j { v + 4.0 } else { v };
                        band.set(i, j, v);
                        dense[i][j] = v;
                    }
                }
            }
            let b: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let want = dense_solve(&dense, &b);
            let lu = band.factor().unwrap();
            let mut got = b.clone();
            lu.solve(&mut got);
            for i in 0..n {
                assert!(
                    (got[i] - want[i]).abs() < 1e-9 * (1.0 + want[i].abs()),
                    "n={n} kl={kl} ku={ku}: x[{i}] = {} vs dense {}",
                    got[i],
                    want[i]
                );
            }
        }
    }

    #[test]
    fn pivoting_handles_zero_leading_diagonal() {
        // Requires a row swap at the first column.
        let mut a = BandedMatrix::zero(3, 1, 1);
        a.set(0, 0, 0.0);
        a.set(0, 1, 1.0);
        a.set(1, 0, 2.0);
        a.set(1, 1, 1.0);
        a.set(1, 2, 1.0);
        a.set(2, 1, 1.0);
        a.set(2, 2, 3.0);
        let lu = a.factor().unwrap();
        // Solution of [[0,1,0],[2,1,1],[0,1,3]] x = [1, 5, 7].
        let mut b = vec![1.0, 5.0, 7.0];
        lu.solve(&mut b);
        let want = [1.0, 1.0, 2.0];
        for i in 0..3 {
            assert!((b[i] - want[i]).abs() < 1e-12, "x[{i}] = {}, want {}", b[i], want[i]);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut a = BandedMatrix::zero(4, 1, 1);
        for i in 0..4 {
            a.set(i, i, 1.0);
        }
        a.set(2, 2, 0.0);
        a.set(2, 1, 0.0);
        a.set(2, 3, 0.0);
        a.set(3, 2, 0.0);
        a.set(1, 2, 0.0);
        match a.factor() {
            Err(LinAlgError::Singular(2)) => {}
            other => panic!("expected singular at column 2, got {other:?}"),
        }
    }

    #[test]
    fn out_of_band_writes_panic() {
        let result = std::panic::catch_unwind(|| {
            let mut a = BandedMatrix::zero(8, 1, 1);
            a.set(0, 5, 1.0);
        });
        assert!(result.is_err(), "writing far outside the band must panic");
    }
}
