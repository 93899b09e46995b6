//! Operators as sums of tensor products of local register matrices, and
//! their row-parallel assembly into CSR form.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::basis::MixedRadix;
use crate::error::{domain, LgtError, Result};
use crate::exec::Exec;
use crate::sparse::{CsrMatrix, Scalar};

/// Square matrix acting on one register, stored by rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOp<T> {
    dim: usize,
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> LocalOp<T> {
    pub fn from_dense(m: &DMatrix<T>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "local operator must be square");
        let dim = m.nrows();
        let rows = (0..dim)
            .map(|i| (0..dim).filter(|&j| m[(i, j)] != T::zero()).map(|j| (j, m[(i, j)])).collect())
            .collect();
        Self { dim, rows }
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] += v;
            }
        }
        m
    }

    pub fn diagonal(d: &[T]) -> Self {
        let rows = d.iter().enumerate().map(|(i, &v)| if v == T::zero() { vec![] } else { vec![(i, v)] }).collect();
        Self { dim: d.len(), rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[(usize, T)] {
        &self.rows[i]
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_dense(&self.to_dense().adjoint())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_dense(&(self.to_dense() * other.to_dense()))
    }
}

pub type DiagFn<T> = Arc<dyn Fn(&[usize]) -> T + Send + Sync>;

/// `coeff * (A_{r1} (x) B_{r2} (x) ...)` on distinct registers.
#[derive(Clone)]
pub struct ProductTerm<T> {
    pub coeff: T,
    pub factors: Vec<(usize, Arc<LocalOp<T>>)>,
}

impl<T: Scalar> fmt::Debug for ProductTerm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let regs: Vec<usize> = self.factors.iter().map(|x| x.0).collect();
        write!(f, "ProductTerm({:?} on {:?})", self.coeff, regs)
    }
}

/// Sum of product terms and diagonal functions over a mixed-radix basis.
#[derive(Clone)]
pub struct OperatorSum<T> {
    layout: MixedRadix,
    terms: Vec<ProductTerm<T>>,
    diagonals: Vec<DiagFn<T>>,
}

impl<T: Scalar> OperatorSum<T> {
    pub fn new(layout: MixedRadix) -> Self {
        Self { layout, terms: Vec::new(), diagonals: Vec::new() }
    }

    pub fn layout(&self) -> &MixedRadix {
        &self.layout
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len() + self.diagonals.len()
    }

    /// Adds `coeff * prod_k factors[k]`. Factors sharing a register are
    /// multiplied in the given order.
    pub fn push_product(&mut self, coeff: T, factors: Vec<(usize, Arc<LocalOp<T>>)>) -> Result<()> {
        let mut merged: Vec<(usize, Arc<LocalOp<T>>)> = Vec::new();
        for (reg, op) in factors {
            if reg >= self.layout.n_registers() {
                return domain(format!("register {reg} out of range"));
            }
            if op.dim() != self.layout.radices()[reg] {
                return domain(format!(
                    "local operator of dimension {} on register {reg} of radix {}",
                    op.dim(),
                    self.layout.radices()[reg]
                ));
            }
            if let Some(slot) = merged.iter_mut().find(|(r, _)| *r == reg) {
                slot.1 = Arc::new(slot.1.mul(&op));
            } else {
                merged.push((reg, op));
            }
        }
        if coeff == T::zero() || merged.iter().any(|(_, op)| op.is_zero()) {
            return Ok(());
        }
        self.terms.push(ProductTerm { coeff, factors: merged });
        Ok(())
    }

    pub fn push_diagonal(&mut self, f: impl Fn(&[usize]) -> T + Send + Sync + 'static) {
        self.diagonals.push(Arc::new(f));
    }

    pub fn extend(&mut self, other: OperatorSum<T>) -> Result<()> {
        if other.layout != self.layout {
            return domain("operator sums live on different bases");
        }
        self.terms.extend(other.terms);
        self.diagonals.extend(other.diagonals);
        Ok(())
    }

    fn row_entries(&self, i: usize, digits: &mut [usize]) -> Vec<(u32, T)> {
        self.layout.digits_into(i, digits);
        let strides = self.layout.strides();
        let mut out = Vec::new();
        if !self.diagonals.is_empty() {
            let d = self.diagonals.iter().fold(T::zero(), |acc, f| acc + f(digits));
            out.push((i as u32, d));
        }
        let mut cur: Vec<(isize, T)> = Vec::new();
        let mut next: Vec<(isize, T)> = Vec::new();
        for term in &self.terms {
            cur.clear();
            cur.push((i as isize, term.coeff));
            for (reg, op) in &term.factors {
                let dr = digits[*reg];
                let s = strides[*reg] as isize;
                next.clear();
                for &(col, val) in &cur {
                    for &(c, v) in op.row(dr) {
                        next.push((col + (c as isize - dr as isize) * s, val * v));
                    }
                }
                std::mem::swap(&mut cur, &mut next);
                if cur.is_empty() {
                    break;
                }
            }
            out.extend(cur.iter().map(|&(c, v)| (c as u32, v)));
        }
        out
    }

    /// Assembles the operator; rows are built independently.
    pub fn assemble(&self, exec: Exec) -> Result<CsrMatrix<T>> {
        let n = self.layout.dim();
        let nreg = self.layout.n_registers();
        let rows = exec.map_range(n, |i| {
            let mut digits = vec![0usize; nreg];
            self.row_entries(i, &mut digits)
        });
        CsrMatrix::from_rows(n, rows)
    }
}

/// Refuses to build operators above `cap` basis states.
pub fn check_cap(dim: usize, cap: Option<usize>) -> Result<()> {
    match cap {
        Some(c) if dim > c => Err(LgtError::Resource { dim, cap: c }),
        _ => Ok(()),
    }
}
