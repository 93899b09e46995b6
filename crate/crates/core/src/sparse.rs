//! Compressed sparse row matrices over real or complex scalars.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::exec::Exec;

/// Field used by operators and states: `f64` or `Complex64`.
pub trait Scalar: ComplexField<RealField = f64> + Copy + Send + Sync + 'static {
    const IS_COMPLEX: bool;
    fn to_c64(self) -> Complex64;
    /// `None` when `z` has an imaginary part and `Self` is real.
    fn try_from_c64(z: Complex64) -> Option<Self>;
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;
    fn to_c64(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn try_from_c64(z: Complex64) -> Option<Self> {
        (z.im == 0.0).then_some(z.re)
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;
    fn to_c64(self) -> Complex64 {
        self
    }
    fn try_from_c64(z: Complex64) -> Option<Self> {
        Some(z)
    }
}

/// Hermitian inner product <a|b>.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.conjugate() * *y)
}

pub fn norm<T: Scalar>(a: &[T]) -> f64 {
    a.iter().map(|x| x.modulus_squared()).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<T>,
}

impl<T: Scalar> CsrMatrix<T> {
    /// Square matrix from per-row `(column, value)` lists. Duplicates are
    /// summed and exact zeros dropped.
    pub fn from_rows(n: usize, rows: Vec<Vec<(u32, T)>>) -> Result<Self> {
        if rows.len() != n {
            return domain(format!("expected {n} rows, got {}", rows.len()));
        }
        if n > u32::MAX as usize {
            return domain("matrix dimension exceeds u32 indexing");
        }
        let mut indptr = Vec::with_capacity(n + 1);
        indptr.push(0);
        let nnz: usize = rows.iter().map(|r| r.len()).sum();
        let mut indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for mut row in rows {
            row.sort_unstable_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                if c as usize >= n {
                    return domain(format!("column {c} out of range for dimension {n}"));
                }
                let mut v = row[k].1;
                k += 1;
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                if v != T::zero() {
                    indices.push(c);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Ok(Self { n, indptr, indices, values })
    }

    pub fn from_triplets(n: usize, triplets: &[(usize, usize, T)]) -> Result<Self> {
        let mut rows = vec![Vec::new(); n];
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return domain(format!("entry ({i}, {j}) out of range for dimension {n}"));
            }
            rows[i].push((j as u32, v));
        }
        Self::from_rows(n, rows)
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, indptr: vec![0; n + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![T::one(); n])
    }

    pub fn from_diagonal(d: &[T]) -> Self {
        let rows = d.iter().enumerate().map(|(i, &v)| vec![(i as u32, v)]).collect();
        Self::from_rows(d.len(), rows).expect("diagonal is always valid")
    }

    pub fn from_dense(m: &DMatrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return domain("matrix must be square");
        }
        let n = m.nrows();
        let rows = (0..n)
            .map(|i| (0..n).filter(|&j| m[(i, j)] != T::zero()).map(|j| (j as u32, m[(i, j)])).collect())
            .collect();
        Self::from_rows(n, rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[a..b].iter().zip(&self.values[a..b]).map(|(&c, &v)| (c as usize, v))
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        match self.indices[a..b].binary_search(&(j as u32)) {
            Ok(k) => self.values[a + k],
            Err(_) => T::zero(),
        }
    }

    pub fn raw_parts(&self) -> (&[usize], &[u32], &[T]) {
        (&self.indptr, &self.indices, &self.values)
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, _)| j == i))
    }

    fn row_dot(&self, i: usize, x: &[T]) -> T {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        let mut s = T::zero();
        for k in a..b {
            s += self.values[k] * x[self.indices[k] as usize];
        }
        s
    }

    /// y = A x under the given execution policy.
    pub fn matvec_into(&self, exec: Exec, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        exec.fill(y, |i| self.row_dot(i, x));
    }

    pub fn matvec_seq(&self, x: &[T], y: &mut [T]) {
        self.matvec_into(Exec::Sequential, x, y)
    }

    pub fn matvec_par(&self, x: &[T], y: &mut [T]) {
        self.matvec_into(Exec::Parallel, x, y)
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        self.matvec_into(Exec::default(), x, &mut y);
        y
    }

    /// Re <x|A|x>.
    pub fn expectation(&self, x: &[T]) -> f64 {
        dot(x, &self.matvec(x)).real()
    }

    pub fn conj_transpose(&self) -> Self {
        let mut rows = vec![Vec::new(); self.n];
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                rows[j].push((i as u32, v.conjugate()));
            }
        }
        Self::from_rows(self.n, rows).expect("transpose of a valid matrix")
    }

    /// max |A_ij - conj(A_ji)|
    pub fn hermiticity_defect(&self) -> f64 {
        let h = self.conj_transpose();
        self.sub(&h).max_abs()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }

    /// Largest absolute row sum, an upper bound on the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n).map(|i| self.row(i).map(|(_, v)| v.modulus()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    fn combine(&self, other: &Self, s: T) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let rows = (0..self.n)
            .map(|i| {
                self.row(i)
                    .map(|(j, v)| (j as u32, v))
                    .chain(other.row(i).map(|(j, v)| (j as u32, v * s)))
                    .collect()
            })
            .collect();
        Self::from_rows(self.n, rows).expect("sum of valid matrices")
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, T::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -T::one())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let rows = (0..self.n)
            .map(|i| {
                let mut acc = Vec::new();
                for (k, a) in self.row(i) {
                    for (j, b) in other.row(k) {
                        acc.push((j as u32, a * b));
                    }
                }
                acc
            })
            .collect();
        Self::from_rows(self.n, rows).expect("product of valid matrices")
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> CsrMatrix<U> {
        CsrMatrix {
            n: self.n,
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn to_complex(&self) -> CsrMatrix<Complex64> {
        self.map(|v| v.to_c64())
    }

    /// Principal submatrix on the given (ascending) basis indices.
    pub fn restrict(&self, idx: &[usize]) -> Self {
        let mut pos = vec![u32::MAX; self.n];
        for (k, &i) in idx.iter().enumerate() {
            pos[i] = k as u32;
        }
        let rows = idx
            .iter()
            .map(|&i| self.row(i).filter(|&(j, _)| pos[j] != u32::MAX).map(|(j, v)| (pos[j], v)).collect())
            .collect();
        Self::from_rows(idx.len(), rows).expect("submatrix of a valid matrix")
    }
}
