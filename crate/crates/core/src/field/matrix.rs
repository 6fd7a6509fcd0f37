//! Dense matrices over GF(p) with rank, nullspace and determinant.
//!
//! Elimination is plain Gauss-Jordan on row-major storage, `O(rows * cols *
//! rank)` field operations. Interpolation matrices at the sizes this crate
//! targets (a few thousand columns at most) stay well inside that budget.

use super::PrimeField;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl DenseMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows of equal length. Entries are reduced mod p.
    pub fn from_rows(field: PrimeField, cols: usize, rows: Vec<Vec<u64>>) -> Self {
        let p = field.modulus();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in &rows {
            assert_eq!(row.len(), cols, "ragged matrix row");
            data.extend(row.iter().map(|&v| v % p));
        }
        Self {
            field,
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.field.modulus();
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn push_row(&mut self, row: &[u64]) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        let p = self.field.modulus();
        self.data.extend(row.iter().map(|&v| v % p));
        self.rows += 1;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        let f = self.field;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let f = self.field;
        let mut out = DenseMatrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, other.get(k, j)));
                }
            }
        }
        out
    }

    /// Reduces in place to reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let f = self.field;
        let p = f.modulus();
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.data[r * cols + c]);
            for j in c..cols {
                let idx = r * cols + j;
                self.data[idx] = f.mul(self.data[idx], inv);
            }
            let (head, tail) = self.data.split_at_mut(r * cols);
            let (pivot_row, below) = tail.split_at_mut(cols);
            let pivot_row = &*pivot_row;
            for other in head.chunks_exact_mut(cols).chain(below.chunks_exact_mut(cols)) {
                let factor = other[c];
                if factor == 0 {
                    continue;
                }
                let nf = p - factor;
                for j in c..cols {
                    if pivot_row[j] != 0 {
                        other[j] = (other[j] + nf * pivot_row[j]) % p;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of `{v : M v = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<u64>> {
        let f = self.field;
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u64; self.cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(m.get(r, free));
            }
            basis.push(v);
        }
        basis
    }

    /// Determinant of a square matrix.
    pub fn determinant(&self) -> u64 {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let f = self.field;
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1u64;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| a[i * n + c] != 0) else {
                return 0;
            };
            if pr != c {
                for j in 0..n {
                    a.swap(pr * n + j, c * n + j);
                }
                det = f.neg(det);
            }
            let piv = a[c * n + c];
            det = f.mul(det, piv);
            let inv = f.inv(piv);
            for i in c + 1..n {
                let factor = f.mul(a[i * n + c], inv);
                if factor == 0 {
                    continue;
                }
                for j in c..n {
                    a[i * n + j] = f.sub(a[i * n + j], f.mul(factor, a[c * n + j]));
                }
            }
        }
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    fn random(rng: &mut ChaCha8Rng, rows: usize, cols: usize, p: u64) -> DenseMatrix {
        let rows = (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_range(0..p)).collect())
            .collect();
        DenseMatrix::from_rows(PrimeField::new(p).unwrap(), cols, rows)
    }

    #[test]
    fn identity_and_zero() {
        assert_eq!(DenseMatrix::identity(field(), 5).rank(), 5);
        assert_eq!(DenseMatrix::zeros(field(), 3, 7).rank(), 0);
        assert!(DenseMatrix::identity(field(), 4).nullspace().is_empty());
        assert_eq!(DenseMatrix::zeros(field(), 1, 6).nullspace().len(), 6);
    }

    #[test]
    fn duplicated_row_drops_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut m = random(&mut rng, 4, 4, 101);
        let r0 = m.row(0).to_vec();
        for j in 0..4 {
            m.set(3, j, r0[j]);
        }
        assert!(m.rank() <= 3);
        assert_eq!(m.determinant(), 0);
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let rows = rng.gen_range(1..9);
            let cols = rng.gen_range(1..9);
            // low-rank products to get interesting kernels
            let k = rng.gen_range(1..5);
            let a = random(&mut rng, rows, k, 13);
            let b = random(&mut rng, k, cols, 13);
            let m = a.mul(&b);
            let basis = m.nullspace();
            assert_eq!(basis.len() + m.rank(), cols);
            for v in &basis {
                assert!(m.mul_vec(v).iter().all(|&x| x == 0));
            }
            assert_eq!(m.rank(), m.transpose().rank());
        }
    }

    #[test]
    fn determinant_matches_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let n = rng.gen_range(1..7);
            let m = random(&mut rng, n, n, 7);
            assert_eq!(m.determinant() != 0, m.rank() == n);
        }
        let m = DenseMatrix::from_rows(field(), 2, vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(m.determinant(), field().from_i64(-2));
    }
}
