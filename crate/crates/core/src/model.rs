//! Gauge-fixed lattice models: electric fields as linear forms in rotator,
//! string and charge operators, plaquette monomials, hopping terms with
//! gauge insertions, and a staggered or uniform mass.
//!
//! The same description assembles into the electric representation (field
//! values diagonal) or into the magnetic one (plaquettes diagonal).

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::MixedRadix;
use crate::builder::{check_l, lowering_dense, PowerScheme, ReplacementBlocks};
use crate::error::{domain, Result};
use crate::exec::Exec;
use crate::operator::{check_cap, LocalOp, OperatorSum};
use crate::params::{CouplingParams, GroupParams, Representation};
use crate::sparse::{CsrMatrix, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Statistics {
    Fermion,
    Boson { max_occ: usize },
}

impl Statistics {
    pub fn radix(&self) -> usize {
        match self {
            Statistics::Fermion => 2,
            Statistics::Boson { max_occ } => max_occ + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteSpec {
    pub pos: (usize, usize),
    pub stats: Statistics,
    /// Mass sign: (-1)^(nx+ny) for staggered fermions, +1 for bosons.
    pub stagger: f64,
    #[serde(default)]
    pub static_charge: f64,
}

impl SiteSpec {
    /// Charge of occupation `n`, including the static background.
    pub fn charge(&self, n: usize) -> f64 {
        let offset = match self.stats {
            Statistics::Fermion => 0.5 * (1.0 - self.stagger),
            Statistics::Boson { .. } => 0.0,
        };
        n as f64 - offset + self.static_charge
    }
}

/// `sum_j c_j R_j + sum_n d_n q_n + constant`
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LinearForm {
    pub gauge: Vec<(usize, f64)>,
    pub charges: Vec<(usize, f64)>,
    #[serde(default)]
    pub constant: f64,
}

impl LinearForm {
    pub fn eval(&self, r: &[i64], q: &[f64]) -> f64 {
        self.gauge.iter().map(|&(j, c)| c * r[j] as f64).sum::<f64>()
            + self.charges.iter().map(|&(n, d)| d * q[n]).sum::<f64>()
            + self.constant
    }
}

/// `prod_j P_j^{e_j}` with negative exponents meaning powers of P^dag.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Monomial {
    pub factors: Vec<(usize, i32)>,
}

impl Monomial {
    pub fn new(f: &[(usize, i32)]) -> Self {
        Self { factors: f.iter().copied().filter(|&(_, e)| e != 0).collect() }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn adjoint(&self) -> Self {
        Self { factors: self.factors.iter().map(|&(j, e)| (j, -e)).collect() }
    }

    pub fn len(&self) -> usize {
        self.factors.iter().map(|f| f.1.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

/// `psi_to^dag G psi_from` (its conjugate is added on assembly).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hop {
    pub to: usize,
    pub from: usize,
    pub gauge: Monomial,
}

/// H = g^2/2 sum_f E_f^2 + sign/(2 g^2 a^2) sum_p (U_p + h.c.)
///   + kappa sum_h (psi^dag G psi + h.c.) + m sum_n s_n n_n
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeModel {
    pub sites: Vec<SiteSpec>,
    pub n_gauge: usize,
    pub fields: Vec<LinearForm>,
    pub plaquettes: Vec<Monomial>,
    pub hops: Vec<Hop>,
    /// Sign of the plaquette sum; the standard Hamiltonian uses -1.
    #[serde(default = "minus_one")]
    pub plaquette_sign: f64,
}

fn minus_one() -> f64 {
    -1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyOptions {
    pub rep: Representation,
    pub group: GroupParams,
    pub cyclic: bool,
    pub scheme: PowerScheme,
    pub exec: Exec,
    pub cap: Option<usize>,
}

impl AssemblyOptions {
    pub fn new(rep: Representation, group: GroupParams) -> Self {
        Self { rep, group, cyclic: false, scheme: PowerScheme::default(), exec: Exec::default(), cap: None }
    }
}

#[derive(Debug, Clone)]
pub struct ModelOperators<T> {
    pub layout: MixedRadix,
    pub h_e: CsrMatrix<T>,
    pub h_b: CsrMatrix<T>,
    pub h_k: CsrMatrix<T>,
    pub h_m: CsrMatrix<T>,
}

impl<T: Scalar> ModelOperators<T> {
    pub fn total(&self) -> CsrMatrix<T> {
        self.h_e.add(&self.h_b).add(&self.h_k).add(&self.h_m)
    }
}

fn cast<T: Scalar>(z: Complex64) -> Result<T> {
    T::try_from_c64(z).ok_or_else(|| crate::LgtError::Domain("complex entries need a complex scalar type".into()))
}

fn local<T: Scalar>(m: &DMatrix<f64>) -> Arc<LocalOp<T>> {
    Arc::new(LocalOp::from_dense(&m.map(|x| T::from_real(x))))
}

fn local_c<T: Scalar>(m: &DMatrix<Complex64>) -> Result<Arc<LocalOp<T>>> {
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for (o, &z) in out.iter_mut().zip(m.iter()) {
        *o = cast::<T>(z)?;
    }
    Ok(Arc::new(LocalOp::from_dense(&out)))
}

struct SiteOps<T> {
    a: Arc<LocalOp<T>>,
    ad: Arc<LocalOp<T>>,
    z: Option<Arc<LocalOp<T>>>,
    q: Arc<LocalOp<T>>,
}

impl LatticeModel {
    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn layout(&self, l: usize) -> Result<MixedRadix> {
        let mut r: Vec<usize> = self.sites.iter().map(|s| s.stats.radix()).collect();
        r.extend(std::iter::repeat_n(2 * l + 1, self.n_gauge));
        MixedRadix::new(r)
    }

    pub fn validate(&self) -> Result<()> {
        let ns = self.n_sites();
        let ok_gauge = |j: usize| j < self.n_gauge;
        for f in &self.fields {
            if !f.gauge.iter().all(|&(j, _)| ok_gauge(j)) || !f.charges.iter().all(|&(n, _)| n < ns) {
                return domain("field references an unknown register");
            }
        }
        for m in self.plaquettes.iter().chain(self.hops.iter().map(|h| &h.gauge)) {
            if !m.factors.iter().all(|&(j, _)| ok_gauge(j)) {
                return domain("monomial references an unknown gauge register");
            }
        }
        for h in &self.hops {
            if h.to >= ns || h.from >= ns || h.to == h.from {
                return domain("hop must connect two distinct sites");
            }
        }
        Ok(())
    }

    /// Split digits into occupations and gauge values.
    fn decode(&self, l: usize, digits: &[usize], q: &mut [f64], r: &mut [i64]) {
        let ns = self.n_sites();
        for n in 0..ns {
            q[n] = self.sites[n].charge(digits[n]);
        }
        for j in 0..self.n_gauge {
            r[j] = digits[ns + j] as i64 - l as i64;
        }
    }

    fn site_ops<T: Scalar>(&self, n: usize) -> SiteOps<T> {
        let s = &self.sites[n];
        let d = s.stats.radix();
        let mut a = DMatrix::zeros(d, d);
        for k in 1..d {
            a[(k - 1, k)] = (k as f64).sqrt();
        }
        let q = DMatrix::from_fn(d, d, |i, j| if i == j { s.charge(i) } else { 0.0 });
        let z = match s.stats {
            Statistics::Fermion => Some(local(&DMatrix::from_fn(2, 2, |i, j| match (i, j) {
                (0, 0) => 1.0,
                (1, 1) => -1.0,
                _ => 0.0,
            }))),
            Statistics::Boson { .. } => None,
        };
        SiteOps { a: local(&a), ad: local(&a.transpose()), z, q: local(&q) }
    }

    /// Charge operator q_n (including static charge) on the full basis.
    pub fn charge_operator<T: Scalar>(&self, n: usize, l: usize) -> Result<CsrMatrix<T>> {
        if n >= self.n_sites() {
            return domain(format!("site {n} out of range"));
        }
        let layout = self.layout(l)?;
        let site = self.sites[n].clone();
        let mut op = OperatorSum::<T>::new(layout);
        op.push_diagonal(move |d| T::from_real(site.charge(d[n])));
        op.assemble(Exec::default())
    }

    pub fn total_charge<T: Scalar>(&self, l: usize) -> Result<CsrMatrix<T>> {
        let layout = self.layout(l)?;
        let sites = self.sites.clone();
        let mut op = OperatorSum::<T>::new(layout);
        op.push_diagonal(move |d| T::from_real(sites.iter().enumerate().map(|(n, s)| s.charge(d[n])).sum()));
        op.assemble(Exec::default())
    }

    /// Constant dropped from the magnetic electric term, sum_j (g^2/2) M_jj L(L+1)/3.
    pub fn magnetic_shift(&self, g2: f64, big_l: usize) -> f64 {
        let lf = big_l as f64;
        let m = self.gauge_quadratic_form();
        0.5 * g2 * (0..self.n_gauge).map(|j| m[(j, j)]).sum::<f64>() * lf * (lf + 1.0) / 3.0
    }

    /// M_jk = sum_f c_fj c_fk
    pub fn gauge_quadratic_form(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n_gauge, self.n_gauge);
        for f in &self.fields {
            for &(j, cj) in &f.gauge {
                for &(k, ck) in &f.gauge {
                    m[(j, k)] += cj * ck;
                }
            }
        }
        m
    }

    fn push_hop<T: Scalar>(
        &self,
        op: &mut OperatorSum<T>,
        coeff: T,
        hop: &Hop,
        gauge_factors: Vec<(usize, Arc<LocalOp<T>>)>,
        ops: &[SiteOps<T>],
    ) -> Result<()> {
        // psi_n = (prod_{k<n} Z_k) a_n in Jordan-Wigner order.
        let mut f: Vec<(usize, Arc<LocalOp<T>>)> = vec![(hop.to, ops[hop.to].ad.clone())];
        for k in 0..hop.to {
            if let Some(z) = &ops[k].z {
                f.push((k, z.clone()));
            }
        }
        f.extend(gauge_factors);
        for k in 0..hop.from {
            if let Some(z) = &ops[k].z {
                f.push((k, z.clone()));
            }
        }
        f.push((hop.from, ops[hop.from].a.clone()));
        let adj: Vec<(usize, Arc<LocalOp<T>>)> =
            f.iter().rev().map(|(r, o)| (*r, Arc::new(o.adjoint()))).collect();
        op.push_product(coeff, f)?;
        op.push_product(coeff.conjugate(), adj)
    }

    pub fn assemble<T: Scalar>(&self, coupling: &CouplingParams, opts: &AssemblyOptions) -> Result<ModelOperators<T>> {
        self.validate()?;
        check_l(&opts.group)?;
        let l = opts.group.l;
        let layout = self.layout(l)?;
        check_cap(layout.dim(), opts.cap)?;
        let ns = self.n_sites();
        let g2 = coupling.g2;
        let mb = self.plaquette_sign / (2.0 * g2 * coupling.a * coupling.a);
        let ops: Vec<SiteOps<T>> = (0..ns).map(|n| self.site_ops(n)).collect();

        let mut he = OperatorSum::<T>::new(layout.clone());
        let mut hb = OperatorSum::<T>::new(layout.clone());
        let mut hk = OperatorSum::<T>::new(layout.clone());
        let mut hm = OperatorSum::<T>::new(layout.clone());

        if coupling.m != 0.0 && ns > 0 {
            let sites = self.sites.clone();
            let m = coupling.m;
            hm.push_diagonal(move |d| {
                T::from_real(m * sites.iter().enumerate().map(|(n, s)| s.stagger * d[n] as f64).sum::<f64>())
            });
        }

        let gauge_reg = |j: usize| ns + j;
        let theta = 2.0 * PI / opts.group.n() as f64;

        match opts.rep {
            Representation::Electric => {
                let model = self.clone();
                he.push_diagonal(move |d| {
                    let mut q = vec![0.0; model.n_sites()];
                    let mut r = vec![0i64; model.n_gauge];
                    model.decode(l, d, &mut q, &mut r);
                    T::from_real(0.5 * g2 * model.fields.iter().map(|f| f.eval(&r, &q).powi(2)).sum::<f64>())
                });
                let p = lowering_dense(l, opts.cyclic);
                let pt = p.transpose();
                let factors = |m: &Monomial| -> Vec<(usize, Arc<LocalOp<T>>)> {
                    m.factors
                        .iter()
                        .map(|&(j, e)| {
                            let base = if e > 0 { &p } else { &pt };
                            (gauge_reg(j), local(&base.pow(e.unsigned_abs())))
                        })
                        .collect()
                };
                for mono in &self.plaquettes {
                    hb.push_product(T::from_real(mb), factors(mono))?;
                    hb.push_product(T::from_real(mb), factors(&mono.adjoint()))?;
                }
                if coupling.kappa != 0.0 {
                    for hop in &self.hops {
                        self.push_hop(&mut hk, T::from_real(coupling.kappa), hop, factors(&hop.gauge), &ops)?;
                    }
                }
            }
            Representation::Magnetic => {
                let plaqs = self.plaquettes.clone();
                hb.push_diagonal(move |d| {
                    let s: f64 = plaqs
                        .iter()
                        .map(|m| {
                            let arg: i64 = m.factors.iter().map(|&(j, e)| e as i64 * (d[ns + j] as i64 - l as i64)).sum();
                            2.0 * (theta * arg as f64).cos()
                        })
                        .sum();
                    T::from_real(mb * s)
                });

                let blocks = ReplacementBlocks::new(opts.group, opts.scheme)?;
                let kop = local::<T>(&blocks.k);
                let aop = local::<T>(&blocks.a);
                let mq = self.gauge_quadratic_form();
                for j in 0..self.n_gauge {
                    if mq[(j, j)] != 0.0 {
                        he.push_product(T::from_real(0.25 * g2 * mq[(j, j)]), vec![(gauge_reg(j), kop.clone())])?;
                    }
                    for k in (j + 1)..self.n_gauge {
                        if mq[(j, k)] != 0.0 {
                            he.push_product(
                                T::from_real(-0.25 * g2 * mq[(j, k)]),
                                vec![(gauge_reg(j), aop.clone()), (gauge_reg(k), aop.clone())],
                            )?;
                        }
                    }
                }
                // Cross terms 2 c_j R_j Q_f -> -i c_j A_j Q_f, times g^2/2.
                for f in &self.fields {
                    for &(j, cj) in &f.gauge {
                        let base = Complex64::new(0.0, -0.5 * g2 * cj);
                        for &(n, dn) in &f.charges {
                            he.push_product(cast(base * dn)?, vec![(gauge_reg(j), aop.clone()), (n, ops[n].q.clone())])?;
                        }
                        if f.constant != 0.0 {
                            he.push_product(cast(base * f.constant)?, vec![(gauge_reg(j), aop.clone())])?;
                        }
                    }
                }
                if self.fields.iter().any(|f| !f.charges.is_empty() || f.constant != 0.0) {
                    let model = self.clone();
                    he.push_diagonal(move |d| {
                        let mut q = vec![0.0; model.n_sites()];
                        let mut r = vec![0i64; model.n_gauge];
                        model.decode(l, d, &mut q, &mut r);
                        let s: f64 = model
                            .fields
                            .iter()
                            .map(|f| {
                                let qf = LinearForm { gauge: vec![], charges: f.charges.clone(), constant: f.constant };
                                qf.eval(&r, &q).powi(2)
                            })
                            .sum();
                        T::from_real(0.5 * g2 * s)
                    });
                }
                if coupling.kappa != 0.0 {
                    let d = 2 * l + 1;
                    for hop in &self.hops {
                        let mut gf = Vec::new();
                        for &(j, e) in &hop.gauge.factors {
                            let ph = DMatrix::from_fn(d, d, |a, b| {
                                if a == b {
                                    Complex64::from_polar(1.0, -theta * e as f64 * (a as f64 - l as f64))
                                } else {
                                    Complex64::new(0.0, 0.0)
                                }
                            });
                            gf.push((gauge_reg(j), local_c::<T>(&ph)?));
                        }
                        self.push_hop(&mut hk, T::from_real(coupling.kappa), hop, gf, &ops)?;
                    }
                }
            }
        }

        Ok(ModelOperators {
            h_e: he.assemble(opts.exec)?,
            h_b: hb.assemble(opts.exec)?,
            h_k: hk.assemble(opts.exec)?,
            h_m: hm.assemble(opts.exec)?,
            layout,
        })
    }
}
