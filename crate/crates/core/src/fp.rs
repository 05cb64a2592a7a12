//! Arithmetic and dense linear algebra over the prime field `F_p`.
//!
//! Everything here is exact; matrices are small (a handful of rows per
//! isomorphism class), so plain Gaussian elimination is all we need.

/// The prime field `F_p` as an arithmetic context. Values are `u64`
/// representatives in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fp {
    pub p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Self {
        assert!(is_prime(p), "{p} is not prime");
        Fp { p }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b % self.p) % self.p
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        (self.p - a % self.p) % self.p
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.p != 0, "division by zero in F_{}", self.p);
        // Fermat: a^(p-2)
        self.pow(a, self.p - 2)
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        base %= self.p;
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Dense matrix over `F_p`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    pub field: Fp,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl FpMatrix {
    pub fn zero(field: Fp, rows: usize, cols: usize) -> Self {
        FpMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: Fp, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: Fp, rows: Vec<Vec<u64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            for v in row {
                data.push(v % field.p);
            }
        }
        FpMatrix { field, rows: r, cols: c, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.field.p;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn add(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.field.add(a, b))
            .collect();
        FpMatrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.field.sub(a, b))
            .collect();
        FpMatrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = FpMatrix::zero(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = self.field.add(out.get(i, j), self.field.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut out = FpMatrix::zero(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn is_idempotent(&self) -> bool {
        self.rows == self.cols && self.mul(self) == *self
    }

    /// Row echelon form in place; returns the pivot columns.
    fn echelon(&mut self) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            for j in 0..self.cols {
                let tmp = self.get(row, j);
                let v = self.get(pr, j);
                self.set(row, j, v);
                self.set(pr, j, tmp);
            }
            let inv = f.inv(self.get(row, col));
            for j in 0..self.cols {
                let v = f.mul(self.get(row, j), inv);
                self.set(row, j, v);
            }
            for r in 0..self.rows {
                if r != row && self.get(r, col) != 0 {
                    let factor = self.get(r, col);
                    for j in 0..self.cols {
                        let v = f.sub(self.get(r, j), f.mul(factor, self.get(row, j)));
                        self.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.echelon().len()
    }

    /// Pivot column indices; the corresponding columns of `self` form a basis
    /// of the column space.
    pub fn pivot_columns(&self) -> Vec<usize> {
        let mut m = self.clone();
        m.echelon()
    }

    /// One solution of `self * x = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = FpMatrix::zero(self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i]);
        }
        let pivots = aug.echelon();
        if pivots.contains(&self.cols) {
            return None; // pivot in the constant column
        }
        let mut x = vec![0u64; self.cols];
        for (row, &col) in pivots.iter().enumerate() {
            x[col] = aug.get(row, self.cols);
        }
        Some(x)
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<FpMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = FpMatrix::zero(self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let pivots = aug.echelon();
        if pivots.len() < n || pivots.iter().any(|&c| c >= n) {
            return None;
        }
        let mut out = FpMatrix::zero(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, aug.get(i, n + j));
            }
        }
        Some(out)
    }

    /// Basis of the column space, as a `rows x rank` matrix.
    pub fn column_space_basis(&self) -> FpMatrix {
        let mut m = self.clone();
        let pivots = m.echelon();
        let mut out = FpMatrix::zero(self.field, self.rows, pivots.len());
        for (k, &col) in pivots.iter().enumerate() {
            for i in 0..self.rows {
                out.set(i, k, self.get(i, col));
            }
        }
        out
    }

    /// Basis of the null space `{x : self * x = 0}`, one vector per row of
    /// the returned matrix.
    pub fn null_space(&self) -> Vec<Vec<u64>> {
        let f = self.field;
        let mut m = self.clone();
        let pivots = m.echelon();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![0u64; self.cols];
            v[free] = 1;
            for (row, &col) in pivots.iter().enumerate() {
                v[col] = f.neg(m.get(row, free));
            }
            basis.push(v);
        }
        basis
    }

    /// Write an idempotent `P` as an orthogonal sum of rank-one idempotents.
    ///
    /// Uses a column-space factorization `P = A B` with `B A = I`; the pieces
    /// are `A E_ii B`. For `P = I` this returns the matrix units `E_ii`.
    pub fn primitive_decomposition(&self) -> Vec<FpMatrix> {
        assert!(self.is_idempotent());
        let a = self.column_space_basis();
        let r = a.cols;
        if r == 0 {
            return Vec::new();
        }
        // Solve A * B = P column by column; solutions exist because the
        // columns of P lie in the column space of A.
        let mut b = FpMatrix::zero(self.field, r, self.cols);
        for j in 0..self.cols {
            let col: Vec<u64> = (0..self.rows).map(|i| self.get(i, j)).collect();
            let x = a.solve(&col).expect("column of idempotent outside its column space");
            for i in 0..r {
                b.set(i, j, x[i]);
            }
        }
        debug_assert_eq!(b.mul(&a), FpMatrix::identity(self.field, r));
        (0..r)
            .map(|i| {
                let mut e = FpMatrix::zero(self.field, r, r);
                e.set(i, i, 1);
                a.mul(&e).mul(&b)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Fp {
        Fp::new(2)
    }

    #[test]
    fn solve_and_inverse() {
        let m = FpMatrix::from_rows(f2(), vec![vec![1, 1], vec![0, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), FpMatrix::identity(f2(), 2));
        let x = m.solve(&[1, 1]).unwrap();
        assert_eq!(x, vec![0, 1]);
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = FpMatrix::from_rows(f2(), vec![vec![1, 1], vec![1, 1]]);
        assert!(m.inverse().is_none());
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn primitive_decomposition_of_identity_is_matrix_units() {
        let p = FpMatrix::identity(Fp::new(3), 3);
        let parts = p.primitive_decomposition();
        assert_eq!(parts.len(), 3);
        for (i, e) in parts.iter().enumerate() {
            let mut unit = FpMatrix::zero(Fp::new(3), 3, 3);
            unit.set(i, i, 1);
            assert_eq!(*e, unit);
        }
    }

    #[test]
    fn primitive_decomposition_sums_back() {
        let field = Fp::new(5);
        // A rank-2 idempotent over F_5.
        let p = FpMatrix::from_rows(field, vec![vec![1, 0, 2], vec![0, 1, 3], vec![0, 0, 0]]);
        assert!(p.is_idempotent());
        let parts = p.primitive_decomposition();
        assert_eq!(parts.len(), 2);
        let mut sum = FpMatrix::zero(field, 3, 3);
        for e in &parts {
            assert!(e.is_idempotent());
            assert_eq!(e.rank(), 1);
            sum = sum.add(e);
        }
        assert_eq!(sum, p);
        assert!(parts[0].mul(&parts[1]).is_zero());
        assert!(parts[1].mul(&parts[0]).is_zero());
    }
}
