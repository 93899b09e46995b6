//! Single periodic plaquette with staggered fermions on its four sites.
//!
//! Registers: fermions (0,0), (0,1), (1,1), (1,0) in Jordan-Wigner order,
//! then rotators R1, R2, R3 and strings Rx, Ry.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{matter_reg, MatterBasis};
use crate::builder::BuildOptions;
use crate::error::{domain, Result};
use crate::model::{AssemblyOptions, Hop, LatticeModel, LinearForm, Monomial, SiteSpec, Statistics};
use crate::params::{CouplingParams, GroupParams, Representation};
use crate::sparse::CsrMatrix;

const S00: usize = 0;
const S01: usize = 1;
const S11: usize = 2;
const S10: usize = 3;
const R1: usize = 0;
const R2: usize = 1;
const R3: usize = 2;
const RX: usize = 3;
const RY: usize = 4;

/// Matter options on top of the plaquette build options.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MatterOptions {
    pub build: BuildOptions,
    /// Static background charge per site, in Jordan-Wigner order.
    pub static_charges: [f64; 4],
}

/// Gauge-fixed plaquette with dynamical fermions.
pub fn plaquette_matter_model(static_charges: [f64; 4]) -> LatticeModel {
    let sites = matter_reg::SITES
        .iter()
        .zip(static_charges)
        .map(|(&(nx, ny), q)| SiteSpec {
            pos: (nx, ny),
            stats: Statistics::Fermion,
            stagger: if (nx + ny) % 2 == 0 { 1.0 } else { -1.0 },
            static_charge: q,
        })
        .collect();
    let f = |g: &[(usize, f64)], q: &[(usize, f64)]| LinearForm { gauge: g.to_vec(), charges: q.to_vec(), constant: 0.0 };
    let hop = |to, from, g: &[(usize, i32)]| Hop { to, from, gauge: Monomial::new(g) };
    LatticeModel {
        sites,
        n_gauge: 5,
        fields: vec![
            f(&[(R1, 1.0), (RX, 1.0)], &[(S10, -1.0), (S11, -1.0)]),
            f(&[(R2, 1.0), (R3, -1.0), (RX, 1.0)], &[]),
            f(&[(R1, 1.0), (R2, -1.0)], &[(S11, -1.0)]),
            f(&[(R3, -1.0)], &[]),
            f(&[(R1, -1.0)], &[]),
            f(&[(R3, 1.0), (R2, -1.0)], &[]),
            f(&[(R2, 1.0), (R1, -1.0), (RY, 1.0)], &[(S01, -1.0)]),
            f(&[(R3, 1.0), (RY, 1.0)], &[]),
        ],
        plaquettes: vec![
            Monomial::new(&[(R1, 1)]),
            Monomial::new(&[(R2, 1)]),
            Monomial::new(&[(R3, 1)]),
            Monomial::new(&[(R1, 1), (R2, 1), (R3, 1)]),
        ],
        hops: vec![
            hop(S00, S10, &[]),
            hop(S00, S10, &[(RX, 1)]),
            hop(S01, S11, &[(R1, 1)]),
            hop(S01, S11, &[(R2, -1), (RX, 1)]),
            hop(S00, S01, &[]),
            hop(S00, S01, &[(RY, 1)]),
            hop(S10, S11, &[]),
            hop(S10, S11, &[(R2, -1), (R3, -1), (RY, 1)]),
        ],
        plaquette_sign: -1.0,
    }
}

/// Jordan-Wigner encoding of the four plaquette fermions on 16 states:
/// psi_n = Z_0 ... Z_{n-1} a_n with a = |0><1|.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionMapping {
    pub order: [(usize, usize); 4],
}

impl Default for FermionMapping {
    fn default() -> Self {
        Self { order: matter_reg::SITES }
    }
}

impl FermionMapping {
    pub fn position(&self, site: (usize, usize)) -> Result<usize> {
        self.order.iter().position(|&s| s == site).ok_or_else(|| crate::LgtError::Domain(format!("no site {site:?}")))
    }

    /// Annihilation operator of the fermion at JW position `k`.
    pub fn annihilation(&self, k: usize) -> DMatrix<f64> {
        assert!(k < 4);
        let z = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0]));
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let id = DMatrix::<f64>::identity(2, 2);
        let mut out = DMatrix::<f64>::identity(1, 1);
        for j in 0..4 {
            let f = match j.cmp(&k) {
                std::cmp::Ordering::Less => &z,
                std::cmp::Ordering::Equal => &a,
                std::cmp::Ordering::Greater => &id,
            };
            out = out.kronecker(f);
        }
        out
    }

    /// Number operator with the stagger-dependent offset removed:
    /// q_n = n_n - (1 - (-1)^(nx+ny))/2.
    pub fn charge(&self, k: usize) -> DMatrix<f64> {
        let a = self.annihilation(k);
        let (nx, ny) = self.order[k];
        let off = if (nx + ny) % 2 == 0 { 0.0 } else { 1.0 };
        a.transpose() * &a - DMatrix::identity(16, 16) * off
    }
}

/// q_n for `site` on the full matter basis, static charge included.
pub fn charge_operator(site: (usize, usize), l: usize, static_charges: [f64; 4]) -> Result<CsrMatrix<f64>> {
    let k = FermionMapping::default().position(site)?;
    plaquette_matter_model(static_charges).charge_operator(k, l)
}

pub fn total_charge(l: usize, static_charges: [f64; 4]) -> Result<CsrMatrix<f64>> {
    plaquette_matter_model(static_charges).total_charge(l)
}

/// m sum_n (-1)^(nx+ny) n_n on the 16 fermion states.
pub fn mass_hamiltonian(m: f64) -> CsrMatrix<f64> {
    let fm = FermionMapping::default();
    let mut h = DMatrix::zeros(16, 16);
    for k in 0..4 {
        let a = fm.annihilation(k);
        let (nx, ny) = fm.order[k];
        let s = if (nx + ny) % 2 == 0 { 1.0 } else { -1.0 };
        h += a.transpose() * &a * (m * s);
    }
    CsrMatrix::from_dense(&h).expect("square")
}

/// Pauli form (m/2)(Z1 - Z2 + Z3 - Z4) with Z = 2n - 1. The constant
/// (m/2) sum_n s_n separating it from the number form vanishes.
pub fn mass_hamiltonian_pauli(m: f64) -> CsrMatrix<f64> {
    let mut h = DMatrix::zeros(16, 16);
    for i in 0..16usize {
        let mut e = 0.0;
        for (k, s) in [1.0, -1.0, 1.0, -1.0].iter().enumerate() {
            let occ = (i >> (3 - k)) & 1;
            let z = 2.0 * occ as f64 - 1.0;
            e += 0.5 * m * s * z;
        }
        h[(i, i)] = e;
    }
    CsrMatrix::from_dense(&h).expect("square")
}

#[derive(Debug, Clone)]
pub struct MatterHamiltonian {
    pub representation: Representation,
    pub group: GroupParams,
    pub coupling: CouplingParams,
    pub basis: MatterBasis,
    pub h_e: CsrMatrix<Complex64>,
    pub h_b: CsrMatrix<Complex64>,
    pub h_k: CsrMatrix<Complex64>,
    pub h_m: CsrMatrix<Complex64>,
    pub total: CsrMatrix<Complex64>,
    /// Constant dropped from the magnetic electric term (zero in the electric basis).
    pub energy_shift: f64,
    pub static_charges: [f64; 4],
}

impl MatterHamiltonian {
    /// Basis states of total charge `q` (physical states have q = 0).
    pub fn charge_sector(&self, q: f64) -> Vec<usize> {
        let model = plaquette_matter_model(self.static_charges);
        let lay = self.basis.layout();
        (0..lay.dim())
            .filter(|&i| {
                let d = lay.digits(i);
                let tot: f64 = (0..4).map(|n| model.sites[n].charge(d[n])).sum();
                (tot - q).abs() < 1e-9
            })
            .collect()
    }
}

fn assemble(rep: Representation, group: GroupParams, coupling: &CouplingParams, opts: &MatterOptions) -> Result<(LatticeModel, crate::model::ModelOperators<Complex64>)> {
    if rep == Representation::Magnetic && opts.build.cyclic {
        return domain("the cyclic flag applies to the electric representation only");
    }
    let model = plaquette_matter_model(opts.static_charges);
    let aopts = AssemblyOptions {
        rep,
        group,
        cyclic: opts.build.cyclic,
        scheme: opts.build.scheme,
        exec: opts.build.exec,
        cap: opts.build.cap,
    };
    let ops = model.assemble::<Complex64>(coupling, &aopts)?;
    Ok((model, ops))
}

/// Hopping terms with gauge insertions; zero when kappa = 0.
pub fn kinetic_hamiltonian(
    rep: Representation,
    group: GroupParams,
    coupling: &CouplingParams,
    opts: &MatterOptions,
) -> Result<CsrMatrix<Complex64>> {
    Ok(assemble(rep, group, coupling, opts)?.1.h_k)
}

/// Electric energy including rotator-string, charge-gauge and charge-charge terms.
pub fn electric_hamiltonian_with_charges(
    rep: Representation,
    group: GroupParams,
    coupling: &CouplingParams,
    opts: &MatterOptions,
) -> Result<CsrMatrix<Complex64>> {
    Ok(assemble(rep, group, coupling, opts)?.1.h_e)
}

/// H = H_E + H_B + H_K + H_M on 2^4 (2l+1)^5 states.
pub fn build_matter_system(
    rep: Representation,
    group: GroupParams,
    coupling: &CouplingParams,
    opts: &MatterOptions,
) -> Result<MatterHamiltonian> {
    let (model, ops) = assemble(rep, group, coupling, opts)?;
    let total = ops.total();
    let energy_shift = match rep {
        Representation::Electric => 0.0,
        Representation::Magnetic => model.magnetic_shift(coupling.g2, group.big_l),
    };
    Ok(MatterHamiltonian {
        representation: rep,
        group,
        coupling: *coupling,
        basis: MatterBasis::new(group.l)?,
        h_e: ops.h_e,
        h_b: ops.h_b,
        h_k: ops.h_k,
        h_m: ops.h_m,
        total,
        energy_shift,
        static_charges: opts.static_charges,
    })
}
