//! Lowering operators, replacement blocks and pure-gauge single-plaquette
//! Hamiltonians in both representations.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::coefficients::replacement_coefficients;
use crate::error::{domain, Result};
use crate::exec::Exec;
use crate::model::{AssemblyOptions, LatticeModel, LinearForm, Monomial};
use crate::params::{CouplingParams, GroupParams, Representation};
use crate::sparse::CsrMatrix;

/// P|r> = |r-1> on [-l, l]; the cyclic variant also maps |-l> to |l>.
#[derive(Debug, Clone, PartialEq)]
pub struct LoweringOperator {
    pub l: usize,
    pub cyclic: bool,
    pub matrix: CsrMatrix<f64>,
}

pub fn lowering_operator(l: usize, cyclic: bool) -> LoweringOperator {
    LoweringOperator { l, cyclic, matrix: CsrMatrix::from_dense(&lowering_dense(l, cyclic)).expect("square") }
}

/// Dense lowering matrix, rows and columns indexed by r + l.
pub fn lowering_dense(l: usize, cyclic: bool) -> DMatrix<f64> {
    let d = 2 * l + 1;
    let mut p = DMatrix::zeros(d, d);
    for c in 1..d {
        p[(c - 1, c)] = 1.0;
    }
    if cyclic {
        p[(d - 1, 0)] += 1.0;
    }
    p
}

/// How powers P^nu enter the magnetic electric term when l < L.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerScheme {
    /// Window [-l, l] cut out of the cyclic Z_{2L+1} power.
    #[default]
    WindowProjected,
    /// Powers of the truncated band operator; vanish for nu > 2l.
    BandTruncated,
}

/// P^nu on the [-l, l] register of Z_{2L+1}.
pub fn lowering_power(l: usize, big_l: usize, nu: usize, scheme: PowerScheme) -> DMatrix<f64> {
    let d = 2 * l + 1;
    match scheme {
        PowerScheme::BandTruncated => {
            let mut p = DMatrix::zeros(d, d);
            for c in nu..d {
                p[(c - nu, c)] = 1.0;
            }
            p
        }
        PowerScheme::WindowProjected => {
            let n = 2 * big_l + 1;
            let off = big_l - l;
            let mut p = DMatrix::zeros(d, d);
            for c in 0..d {
                let row = (c + off + n - nu % n) % n;
                if row >= off && row < off + d {
                    p[(row - off, c)] = 1.0;
                }
            }
            p
        }
    }
}

/// Images of R^2 - L(L+1)/3 and R under the Fourier map:
/// `K = sum_nu f^c_nu (P^nu + P^nu^T)`, `A = sum_nu f^s_nu (P^nu - P^nu^T)`,
/// with R^2 -> K/2 + L(L+1)/3 and R -> -(i/2) A.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplacementBlocks {
    pub group: GroupParams,
    pub scheme: PowerScheme,
    pub k: DMatrix<f64>,
    pub a: DMatrix<f64>,
}

impl ReplacementBlocks {
    pub fn new(group: GroupParams, scheme: PowerScheme) -> Result<Self> {
        let c = replacement_coefficients(group.big_l)?;
        let d = group.local_dim();
        let mut k = DMatrix::zeros(d, d);
        let mut a = DMatrix::zeros(d, d);
        for nu in 1..=2 * group.big_l {
            if scheme == PowerScheme::BandTruncated && nu >= d {
                break;
            }
            let p = lowering_power(group.l, group.big_l, nu, scheme);
            let pt = p.transpose();
            k += (&p + &pt) * c.cosine[nu - 1];
            a += (&p - &pt) * c.sine[nu - 1];
        }
        Ok(Self { group, scheme, k, a })
    }
}

/// Options shared by the plaquette builders.
#[derive(Debug, Clone, Copy, PartialEq)]
#[derive(Default)]
pub struct BuildOptions {
    /// Electric representation only: wrap the lowering operators (Z_{2l+1}).
    pub cyclic: bool,
    pub scheme: PowerScheme,
    pub exec: Exec,
    pub cap: Option<usize>,
}


#[derive(Debug, Clone)]
pub struct GaugeHamiltonian {
    pub representation: Representation,
    pub group: GroupParams,
    pub coupling: CouplingParams,
    pub h_e: CsrMatrix<f64>,
    pub h_b: CsrMatrix<f64>,
    pub total: CsrMatrix<f64>,
}

/// Electric fields of the single plaquette in terms of rotators, with
/// strings frozen to zero (registers R1, R2, R3).
pub fn pure_gauge_plaquette_model() -> LatticeModel {
    let f = |g: &[(usize, f64)]| LinearForm { gauge: g.to_vec(), charges: vec![], constant: 0.0 };
    LatticeModel {
        sites: vec![],
        n_gauge: 3,
        fields: vec![
            f(&[(0, 1.0)]),
            f(&[(1, 1.0), (2, -1.0)]),
            f(&[(0, 1.0), (1, -1.0)]),
            f(&[(2, -1.0)]),
            f(&[(0, -1.0)]),
            f(&[(2, 1.0), (1, -1.0)]),
            f(&[(1, 1.0), (0, -1.0)]),
            f(&[(2, 1.0)]),
        ],
        plaquettes: vec![
            Monomial::new(&[(0, 1)]),
            Monomial::new(&[(1, 1)]),
            Monomial::new(&[(2, 1)]),
            Monomial::new(&[(0, 1), (1, 1), (2, 1)]),
        ],
        hops: vec![],
        plaquette_sign: -1.0,
    }
}

fn build(
    rep: Representation,
    group: GroupParams,
    coupling: &CouplingParams,
    opts: &BuildOptions,
) -> Result<GaugeHamiltonian> {
    let model = pure_gauge_plaquette_model();
    let aopts = AssemblyOptions { rep, group, cyclic: opts.cyclic, scheme: opts.scheme, exec: opts.exec, cap: opts.cap };
    let parts = model.assemble::<f64>(coupling, &aopts)?;
    let total = parts.h_e.add(&parts.h_b);
    Ok(GaugeHamiltonian { representation: rep, group, coupling: *coupling, h_e: parts.h_e, h_b: parts.h_b, total })
}

/// H_E = 2g^2[r1^2+r2^2+r3^2 - r2(r1+r3)], H_B = -(P1+P2+P3+P1P2P3+h.c.)/(2g^2a^2).
/// Depends only on `l`; `opts.cyclic` selects Z_{2l+1} lowering operators.
pub fn build_pure_gauge_electric(l: usize, coupling: &CouplingParams, opts: &BuildOptions) -> Result<GaugeHamiltonian> {
    let group = GroupParams::new(l, l.max(1))?;
    build(Representation::Electric, group, coupling, opts)
}

/// Fourier-dual build: H_B diagonal in cosines of 2 pi r/(2L+1), H_E from
/// the replacement blocks.
pub fn build_pure_gauge_magnetic(
    group: GroupParams,
    coupling: &CouplingParams,
    opts: &BuildOptions,
) -> Result<GaugeHamiltonian> {
    build(Representation::Magnetic, group, coupling, opts)
}

pub fn build_pure_gauge(
    rep: Representation,
    group: GroupParams,
    coupling: &CouplingParams,
    opts: &BuildOptions,
) -> Result<GaugeHamiltonian> {
    match rep {
        Representation::Electric => build_pure_gauge_electric(group.l, coupling, opts),
        Representation::Magnetic => build_pure_gauge_magnetic(group, coupling, opts),
    }
}

/// Unitary single-register Fourier block on Z_{2l+1} used for the
/// duality map: F_{jk} = e^{i 2 pi jk/(2l+1)}/sqrt(2l+1).
pub fn dft_block(l: usize, big_l: usize) -> DMatrix<num_complex::Complex64> {
    let n = (2 * big_l + 1) as f64;
    let d = 2 * l + 1;
    let li = l as i64;
    DMatrix::from_fn(d, d, |a, b| {
        let j = a as i64 - li;
        let k = b as i64 - li;
        num_complex::Complex64::from_polar(1.0 / n.sqrt(), 2.0 * PI * (j * k) as f64 / n)
    })
}

pub(crate) fn check_l(group: &GroupParams) -> Result<()> {
    if group.l > group.big_l {
        return domain("l must not exceed L");
    }
    Ok(())
}
