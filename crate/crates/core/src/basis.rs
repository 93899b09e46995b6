//! Mixed-radix bookkeeping for tensor-product bases.
//!
//! Register 0 is the most significant digit. Gauge registers store values
//! r in [-l, l] at digit r + l; fermion registers store occupations 0/1.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixedRadix {
    radices: Vec<usize>,
    strides: Vec<usize>,
    dim: usize,
}

impl MixedRadix {
    pub fn new(radices: Vec<usize>) -> Result<Self> {
        if radices.contains(&0) {
            return domain("register radix must be positive");
        }
        let mut strides = vec![1usize; radices.len()];
        let mut dim = 1usize;
        for k in (0..radices.len()).rev() {
            strides[k] = dim;
            dim = dim
                .checked_mul(radices[k])
                .ok_or_else(|| crate::LgtError::Domain("basis dimension overflows usize".into()))?;
        }
        Ok(Self { radices, strides, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_registers(&self) -> usize {
        self.radices.len()
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Digits of linear index `i`, most significant first.
    pub fn digits_into(&self, mut i: usize, out: &mut [usize]) {
        for k in (0..self.radices.len()).rev() {
            out[k] = i % self.radices[k];
            i /= self.radices[k];
        }
    }

    pub fn digits(&self, i: usize) -> Vec<usize> {
        let mut d = vec![0; self.radices.len()];
        self.digits_into(i, &mut d);
        d
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }
}

/// `n_rotators` gauge registers, each truncated to [-l, l].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotatorBasis {
    pub n_rotators: usize,
    pub l: usize,
    layout: MixedRadix,
}

impl RotatorBasis {
    pub fn new(n_rotators: usize, l: usize) -> Result<Self> {
        if n_rotators == 0 {
            return domain("need at least one rotator");
        }
        let layout = MixedRadix::new(vec![2 * l + 1; n_rotators])?;
        Ok(Self { n_rotators, l, layout })
    }

    /// The three-rotator basis of the single periodic plaquette.
    pub fn plaquette(l: usize) -> Result<Self> {
        Self::new(3, l)
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn layout(&self) -> &MixedRadix {
        &self.layout
    }

    pub fn index_of(&self, r: &[i64]) -> Result<usize> {
        if r.len() != self.n_rotators {
            return domain(format!("expected {} components, got {}", self.n_rotators, r.len()));
        }
        let l = self.l as i64;
        let mut idx = 0usize;
        for (k, &rk) in r.iter().enumerate() {
            if rk < -l || rk > l {
                return domain(format!("component {k} = {rk} outside [-{l}, {l}]"));
            }
            idx += (rk + l) as usize * self.layout.strides()[k];
        }
        Ok(idx)
    }

    pub fn vector_of(&self, i: usize) -> Result<Vec<i64>> {
        if i >= self.dim() {
            return domain(format!("index {i} outside basis of dimension {}", self.dim()));
        }
        Ok(self.values(i))
    }

    /// Register values of index `i` without bounds checking.
    pub fn values(&self, i: usize) -> Vec<i64> {
        let l = self.l as i64;
        self.layout.digits(i).into_iter().map(|d| d as i64 - l).collect()
    }
}

/// Applies `block` to register `reg` of a state on `layout`, identity elsewhere.
pub fn apply_register_block(
    layout: &MixedRadix,
    reg: usize,
    block: &nalgebra::DMatrix<num_complex::Complex64>,
    x: &[num_complex::Complex64],
) -> Vec<num_complex::Complex64> {
    let d = layout.radices()[reg];
    assert_eq!(block.nrows(), d);
    assert_eq!(block.ncols(), d);
    assert_eq!(x.len(), layout.dim());
    let stride = layout.strides()[reg];
    let mut y = vec![num_complex::Complex64::new(0.0, 0.0); x.len()];
    for i in 0..x.len() {
        if !(i / stride).is_multiple_of(d) {
            continue;
        }
        for a in 0..d {
            let mut s = num_complex::Complex64::new(0.0, 0.0);
            for b in 0..d {
                s += block[(a, b)] * x[i + b * stride];
            }
            y[i + a * stride] = s;
        }
    }
    y
}

/// Register positions in the single-plaquette matter basis.
pub mod matter_reg {
    /// Fermion sites in Jordan-Wigner order (0,0), (0,1), (1,1), (1,0).
    pub const SITES: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 1), (1, 0)];
    pub const R1: usize = 4;
    pub const R2: usize = 5;
    pub const R3: usize = 6;
    pub const RX: usize = 7;
    pub const RY: usize = 8;

    /// Register of site (nx, ny).
    pub fn site(nx: usize, ny: usize) -> usize {
        SITES.iter().position(|&s| s == (nx, ny)).expect("site on the 2x2 plaquette")
    }
}

/// Four fermion occupations, three rotators and two strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatterBasis {
    pub l: usize,
    layout: MixedRadix,
}

impl MatterBasis {
    pub fn new(l: usize) -> Result<Self> {
        let d = 2 * l + 1;
        let layout = MixedRadix::new(vec![2, 2, 2, 2, d, d, d, d, d])?;
        Ok(Self { l, layout })
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn layout(&self) -> &MixedRadix {
        &self.layout
    }

    /// Index from occupations (JW order) and gauge values (R1, R2, R3, Rx, Ry).
    pub fn index_of(&self, occ: [u8; 4], gauge: [i64; 5]) -> Result<usize> {
        let l = self.l as i64;
        let mut digits = [0usize; 9];
        for k in 0..4 {
            if occ[k] > 1 {
                return domain("fermion occupation must be 0 or 1");
            }
            digits[k] = occ[k] as usize;
        }
        for k in 0..5 {
            if gauge[k].abs() > l {
                return domain(format!("gauge register {k} = {} outside [-{l}, {l}]", gauge[k]));
            }
            digits[4 + k] = (gauge[k] + l) as usize;
        }
        Ok(self.layout.index(&digits))
    }

    pub fn state_of(&self, i: usize) -> Result<([u8; 4], [i64; 5])> {
        if i >= self.dim() {
            return domain(format!("index {i} outside basis of dimension {}", self.dim()));
        }
        let d = self.layout.digits(i);
        let l = self.l as i64;
        let mut occ = [0u8; 4];
        let mut gauge = [0i64; 5];
        for k in 0..4 {
            occ[k] = d[k] as u8;
        }
        for k in 0..5 {
            gauge[k] = d[4 + k] as i64 - l;
        }
        Ok((occ, gauge))
    }
}
