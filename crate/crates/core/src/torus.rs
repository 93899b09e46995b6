//! Gauge-fixed Hamiltonian on an Nx x Ny periodic lattice with dynamical
//! matter, as a `LatticeModel` and as a serializable term list.
//!
//! Gauge registers: rotators R_n for all plaquettes except n = (0, Ny-1),
//! ordered by (nx, ny), then the strings Rx and Ry. Sites follow a
//! column snake, (0,0), (0,1), ..., (1,Ny-1), (1,Ny-2), ..., which reduces
//! to the plaquette order (0,0), (0,1), (1,1), (1,0) on the 2x2 torus.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, LgtError, Result};
use crate::model::{AssemblyOptions, Hop, LatticeModel, LinearForm, Monomial, SiteSpec, Statistics};
use crate::params::{CouplingParams, GroupParams, Representation};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusSpec {
    pub nx: usize,
    pub ny: usize,
    pub statistics: Statistics,
    /// Static charge per site, indexed by nx * ny_len + ny; empty means none.
    #[serde(default)]
    pub static_charges: Vec<i64>,
}

impl TorusSpec {
    pub fn new(nx: usize, ny: usize, statistics: Statistics) -> Result<Self> {
        let s = Self { nx, ny, statistics, static_charges: vec![] };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return domain("torus sides must be positive");
        }
        if self.nx * self.ny < 2 {
            return domain("torus needs at least two sites");
        }
        if !self.static_charges.is_empty() && self.static_charges.len() != self.nx * self.ny {
            return domain(format!("expected {} static charges", self.nx * self.ny));
        }
        if let Statistics::Boson { max_occ } = self.statistics {
            if max_occ == 0 {
                return domain("bosonic cutoff must be at least 1");
            }
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.nx * self.ny
    }

    /// The eliminated rotator.
    pub fn fixed_rotator(&self) -> (usize, usize) {
        (0, self.ny - 1)
    }

    pub fn n_rotators(&self) -> usize {
        self.n_sites() - 1
    }

    pub fn rotator_register(&self, n: (usize, usize)) -> Option<usize> {
        if n == self.fixed_rotator() {
            return None;
        }
        let k = n.0 * self.ny + n.1;
        Some(if k > self.fixed_rotator().1 { k - 1 } else { k })
    }

    pub fn string_register(&self, d: Dir) -> usize {
        self.n_rotators() + if d == Dir::X { 0 } else { 1 }
    }

    pub fn n_gauge(&self) -> usize {
        self.n_rotators() + 2
    }

    /// Sites in Jordan-Wigner order.
    pub fn site_order(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n_sites());
        for x in 0..self.nx {
            for k in 0..self.ny {
                let y = if x % 2 == 0 { k } else { self.ny - 1 - k };
                out.push((x, y));
            }
        }
        out
    }

    pub fn site_index(&self, n: (usize, usize)) -> usize {
        let y = if n.0.is_multiple_of(2) { n.1 } else { self.ny - 1 - n.1 };
        n.0 * self.ny + y
    }

    fn static_charge(&self, n: (usize, usize)) -> i64 {
        self.static_charges.get(n.0 * self.ny + n.1).copied().unwrap_or(0)
    }

    fn shift(&self, n: (usize, usize), d: Dir, step: isize) -> (usize, usize) {
        let wrap = |v: usize, len: usize| ((v as isize + step).rem_euclid(len as isize)) as usize;
        match d {
            Dir::X => (wrap(n.0, self.nx), n.1),
            Dir::Y => (n.0, wrap(n.1, self.ny)),
        }
    }

    fn check_site(&self, n: (usize, usize)) -> Result<()> {
        if n.0 >= self.nx || n.1 >= self.ny {
            return domain(format!("site {n:?} outside the {}x{} torus", self.nx, self.ny));
        }
        Ok(())
    }
}

/// Linear combination of rotators, strings and charges, keyed by register.
#[derive(Debug, Clone, PartialEq, Default)]
struct Acc {
    gauge: BTreeMap<usize, f64>,
    charges: BTreeMap<usize, f64>,
}

impl Acc {
    fn g(&mut self, r: Option<usize>, c: f64) {
        if let Some(r) = r {
            *self.gauge.entry(r).or_default() += c;
        }
    }

    fn q(&mut self, n: usize, c: f64) {
        *self.charges.entry(n).or_default() += c;
    }

    fn finish(self) -> LinearForm {
        LinearForm {
            gauge: self.gauge.into_iter().filter(|e| e.1 != 0.0).collect(),
            charges: self.charges.into_iter().filter(|e| e.1 != 0.0).collect(),
            constant: 0.0,
        }
    }
}

/// E_{n,x} = d(ny,0) Rx + R_n - R_{n-ey} + q_{n,x},
/// E_{n,y} = d(nx,0) Ry + R_{n-ex} - R_n + q_{n,y}; charges indexed by
/// Jordan-Wigner position.
pub fn electric_field_expression(spec: &TorusSpec, n: (usize, usize), dir: Dir) -> Result<LinearForm> {
    spec.validate()?;
    spec.check_site(n)?;
    let mut a = Acc::default();
    match dir {
        Dir::X => {
            if n.1 == 0 {
                a.g(Some(spec.string_register(Dir::X)), 1.0);
                for rx in n.0 + 1..spec.nx {
                    for ry in 0..spec.ny {
                        a.q(spec.site_index((rx, ry)), -1.0);
                    }
                }
            }
            a.g(spec.rotator_register(n), 1.0);
            a.g(spec.rotator_register(spec.shift(n, Dir::Y, -1)), -1.0);
        }
        Dir::Y => {
            if n.0 == 0 {
                a.g(Some(spec.string_register(Dir::Y)), 1.0);
            }
            a.g(spec.rotator_register(spec.shift(n, Dir::X, -1)), 1.0);
            a.g(spec.rotator_register(n), -1.0);
            for ry in n.1 + 1..spec.ny {
                a.q(spec.site_index((n.0, ry)), -1.0);
            }
        }
    }
    Ok(a.finish())
}

/// Gauge insertion G in psi_n^dag G psi_{n+e}. The eliminated rotator's
/// lowering operator acts as the inverse product of all other rotators.
pub fn kinetic_replacement(spec: &TorusSpec, n: (usize, usize), dir: Dir) -> Result<Monomial> {
    spec.validate()?;
    spec.check_site(n)?;
    let mut pw: BTreeMap<usize, i32> = BTreeMap::new();
    let lower = |r: (usize, usize), e: i32, pw: &mut BTreeMap<usize, i32>| match spec.rotator_register(r) {
        Some(k) => *pw.entry(k).or_default() += e,
        None => {
            for x in 0..spec.nx {
                for y in 0..spec.ny {
                    if let Some(k) = spec.rotator_register((x, y)) {
                        *pw.entry(k).or_default() -= e;
                    }
                }
            }
        }
    };
    match dir {
        Dir::X => {
            if n.0 == spec.nx - 1 {
                *pw.entry(spec.string_register(Dir::X)).or_default() -= 1;
            }
            for ry in 0..n.1 {
                lower((n.0, ry), 1, &mut pw);
            }
        }
        Dir::Y => {
            if n.1 == spec.ny - 1 {
                *pw.entry(spec.string_register(Dir::Y)).or_default() -= 1;
                for rx in n.0..spec.nx {
                    for ry in 0..spec.ny {
                        lower((rx, ry), 1, &mut pw);
                    }
                }
            }
        }
    }
    let f: Vec<(usize, i32)> = pw.into_iter().collect();
    Ok(Monomial::new(&f))
}

/// Torus Hamiltonian as a lattice model (fields, plaquettes, hops, mass signs).
pub fn torus_model(spec: &TorusSpec) -> Result<LatticeModel> {
    spec.validate()?;
    let order = spec.site_order();
    let sites = order
        .iter()
        .map(|&(x, y)| SiteSpec {
            pos: (x, y),
            stats: spec.statistics,
            stagger: match spec.statistics {
                Statistics::Fermion if (x + y) % 2 == 1 => -1.0,
                _ => 1.0,
            },
            static_charge: spec.static_charge((x, y)) as f64,
        })
        .collect();
    let mut fields = Vec::new();
    let mut hops = Vec::new();
    for x in 0..spec.nx {
        for y in 0..spec.ny {
            for d in [Dir::X, Dir::Y] {
                fields.push(electric_field_expression(spec, (x, y), d)?);
                let to = spec.site_index((x, y));
                let from = spec.site_index(spec.shift((x, y), d, 1));
                if to != from {
                    hops.push(Hop { to, from, gauge: kinetic_replacement(spec, (x, y), d)? });
                }
            }
        }
    }
    let nr = spec.n_rotators();
    let mut plaquettes: Vec<Monomial> = (0..nr).map(|k| Monomial::new(&[(k, 1)])).collect();
    let all: Vec<(usize, i32)> = (0..nr).map(|k| (k, 1)).collect();
    plaquettes.push(Monomial::new(&all));
    Ok(LatticeModel { sites, n_gauge: spec.n_gauge(), fields, plaquettes, hops, plaquette_sign: -1.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Factor {
    /// P_n^power; negative powers are powers of P_n^dag.
    Plaquette { site: (usize, usize), power: i32 },
    StringLowering { axis: Dir, power: i32 },
    Create { site: (usize, usize) },
    Annihilate { site: (usize, usize) },
    Number { site: (usize, usize) },
    /// Squared electric field on a link; its expression is listed in `fields`.
    FieldSquared { site: (usize, usize), dir: Dir },
}

impl Factor {
    fn is_gauge(&self) -> bool {
        matches!(self, Factor::Plaquette { .. } | Factor::StringLowering { .. })
    }

    fn adjoint(self) -> Self {
        match self {
            Factor::Plaquette { site, power } => Factor::Plaquette { site, power: -power },
            Factor::StringLowering { axis, power } => Factor::StringLowering { axis, power: -power },
            Factor::Create { site } => Factor::Annihilate { site },
            Factor::Annihilate { site } => Factor::Create { site },
            f => f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TermKind {
    #[serde(rename = "H_E")]
    Electric,
    #[serde(rename = "H_B")]
    Magnetic,
    #[serde(rename = "H_K")]
    Kinetic,
    #[serde(rename = "H_M")]
    Mass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub kind: TermKind,
    /// (re, im)
    pub coeff: (f64, f64),
    pub factors: Vec<Factor>,
}

impl Term {
    /// Hermitian conjugate. Gauge factors commute with everything, so each
    /// run of them keeps its order; matter operators are reversed.
    pub fn adjoint(&self) -> Term {
        let mut factors: Vec<Factor> = Vec::with_capacity(self.factors.len());
        let mut run: Vec<Factor> = Vec::new();
        for f in self.factors.iter().rev().map(|f| f.adjoint()) {
            if f.is_gauge() {
                run.push(f);
            } else {
                factors.extend(run.drain(..).rev());
                factors.push(f);
            }
        }
        factors.extend(run.drain(..).rev());
        Term { kind: self.kind, coeff: (self.coeff.0, -self.coeff.1), factors }
    }

}

/// Symbolic electric field: named rotator/string/charge coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldExpression {
    pub site: (usize, usize),
    pub dir: Dir,
    pub rotators: Vec<((usize, usize), f64)>,
    pub strings: Vec<(Dir, f64)>,
    pub charges: Vec<((usize, usize), f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermList {
    pub schema: String,
    pub nx: usize,
    pub ny: usize,
    pub statistics: Statistics,
    pub fixed_rotator: (usize, usize),
    /// Jordan-Wigner order of the fermionic operators.
    pub site_order: Vec<(usize, usize)>,
    pub coupling: CouplingParams,
    pub fields: Vec<FieldExpression>,
    pub terms: Vec<Term>,
}

pub const TERM_LIST_SCHEMA: &str = "lgt-term-list/1";

impl TermList {
    /// Every term has its Hermitian partner with the conjugate coefficient.
    pub fn is_closed_under_adjoint(&self) -> bool {
        self.terms.iter().all(|t| {
            let a = t.adjoint();
            self.terms.iter().any(|u| u.kind == a.kind && u.factors == a.factors && close(u.coeff, a.coeff))
        })
    }

    pub fn longest_kinetic_string(&self) -> usize {
        self.terms
            .iter()
            .filter(|t| t.kind == TermKind::Kinetic)
            .map(|t| t.factors.iter().filter(|f| f.is_gauge()).count())
            .max()
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("term list serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let t: TermList = serde_json::from_str(s).map_err(|e| LgtError::Parse(e.to_string()))?;
        t.validate()?;
        Ok(t)
    }

    /// Structural checks against the schema.
    pub fn validate(&self) -> Result<()> {
        if self.schema != TERM_LIST_SCHEMA {
            return Err(LgtError::Parse(format!("unknown schema {:?}", self.schema)));
        }
        let on = |s: (usize, usize)| s.0 < self.nx && s.1 < self.ny;
        if self.site_order.len() != self.nx * self.ny || !self.site_order.iter().all(|&s| on(s)) {
            return Err(LgtError::Parse("site_order does not cover the lattice".into()));
        }
        for t in &self.terms {
            if !t.coeff.0.is_finite() || !t.coeff.1.is_finite() {
                return Err(LgtError::Parse("non-finite coefficient".into()));
            }
            for f in &t.factors {
                let site = match *f {
                    Factor::Plaquette { site, .. } => {
                        if site == self.fixed_rotator {
                            return Err(LgtError::Parse("term uses the eliminated rotator".into()));
                        }
                        site
                    }
                    Factor::Create { site }
                    | Factor::Annihilate { site }
                    | Factor::Number { site }
                    | Factor::FieldSquared { site, .. } => site,
                    Factor::StringLowering { .. } => continue,
                };
                if !on(site) {
                    return Err(LgtError::Parse(format!("site {site:?} outside the lattice")));
                }
            }
        }
        if !self.is_closed_under_adjoint() {
            return Err(LgtError::Parse("term list is not closed under Hermitian conjugation".into()));
        }
        Ok(())
    }
}

fn close(a: (f64, f64), b: (f64, f64)) -> bool {
    (a.0 - b.0).abs() <= 1e-14 * (1.0 + a.0.abs()) && (a.1 - b.1).abs() <= 1e-14 * (1.0 + a.1.abs())
}

fn gauge_factors(spec: &TorusSpec, m: &Monomial) -> Vec<Factor> {
    let mut site_of = BTreeMap::new();
    for x in 0..spec.nx {
        for y in 0..spec.ny {
            if let Some(k) = spec.rotator_register((x, y)) {
                site_of.insert(k, (x, y));
            }
        }
    }
    m.factors
        .iter()
        .map(|&(k, e)| match site_of.get(&k) {
            Some(&site) => Factor::Plaquette { site, power: e },
            None => Factor::StringLowering { axis: if k == spec.string_register(Dir::X) { Dir::X } else { Dir::Y }, power: e },
        })
        .collect()
}

/// Symbolic Hamiltonian. H_E and H_M terms are their own adjoints.
pub fn term_list(spec: &TorusSpec, coupling: &CouplingParams) -> Result<TermList> {
    let model = torus_model(spec)?;
    let order = spec.site_order();
    let mut fields = Vec::new();
    let mut terms = Vec::new();
    let mut site_of = BTreeMap::new();
    for x in 0..spec.nx {
        for y in 0..spec.ny {
            if let Some(k) = spec.rotator_register((x, y)) {
                site_of.insert(k, (x, y));
            }
        }
    }
    for x in 0..spec.nx {
        for y in 0..spec.ny {
            for dir in [Dir::X, Dir::Y] {
                let f = electric_field_expression(spec, (x, y), dir)?;
                let mut rotators = Vec::new();
                let mut strings = Vec::new();
                for &(k, c) in &f.gauge {
                    match site_of.get(&k) {
                        Some(&s) => rotators.push((s, c)),
                        None => strings.push((if k == spec.string_register(Dir::X) { Dir::X } else { Dir::Y }, c)),
                    }
                }
                let charges = f.charges.iter().map(|&(n, c)| (order[n], c)).collect();
                fields.push(FieldExpression { site: (x, y), dir, rotators, strings, charges });
                terms.push(Term {
                    kind: TermKind::Electric,
                    coeff: (0.5 * coupling.g2, 0.0),
                    factors: vec![Factor::FieldSquared { site: (x, y), dir }],
                });
            }
        }
    }
    let mb = -1.0 / (2.0 * coupling.g2 * coupling.a * coupling.a);
    for p in &model.plaquettes {
        for m in [p.clone(), p.adjoint()] {
            terms.push(Term { kind: TermKind::Magnetic, coeff: (mb, 0.0), factors: gauge_factors(spec, &m) });
        }
    }
    for h in &model.hops {
        let mut f = vec![Factor::Create { site: order[h.to] }];
        f.extend(gauge_factors(spec, &h.gauge));
        f.push(Factor::Annihilate { site: order[h.from] });
        let t = Term { kind: TermKind::Kinetic, coeff: (coupling.kappa, 0.0), factors: f };
        let a = t.adjoint();
        terms.push(t);
        terms.push(a);
    }
    for s in &model.sites {
        terms.push(Term { kind: TermKind::Mass, coeff: (coupling.m * s.stagger, 0.0), factors: vec![Factor::Number { site: s.pos }] });
    }
    Ok(TermList {
        schema: TERM_LIST_SCHEMA.into(),
        nx: spec.nx,
        ny: spec.ny,
        statistics: spec.statistics,
        fixed_rotator: spec.fixed_rotator(),
        site_order: order,
        coupling: *coupling,
        fields,
        terms,
    })
}

#[derive(Debug)]
pub struct TorusHamiltonian {
    pub terms: TermList,
    pub model: LatticeModel,
    /// Absent when the dimension exceeds the cap; `matrix_error` says why.
    pub matrix: Option<CsrMatrix<Complex64>>,
    pub matrix_error: Option<LgtError>,
}

/// Term list plus, when it fits under `cap`, the assembled matrix.
pub fn build_torus_hamiltonian(
    spec: &TorusSpec,
    group: GroupParams,
    coupling: &CouplingParams,
    rep: Representation,
    cap: Option<usize>,
) -> Result<TorusHamiltonian> {
    let terms = term_list(spec, coupling)?;
    let model = torus_model(spec)?;
    let mut opts = AssemblyOptions::new(rep, group);
    opts.cap = cap;
    let (matrix, matrix_error) = match model.assemble::<Complex64>(coupling, &opts) {
        Ok(ops) => (Some(ops.total()), None),
        Err(e @ LgtError::Resource { .. }) => (None, Some(e)),
        Err(e) => return Err(e),
    };
    Ok(TorusHamiltonian { terms, model, matrix, matrix_error })
}

/// Divergence of the field expressions at `n` minus q_n, as a linear form.
/// Zero everywhere except the origin, where it equals -sum_n q_n.
pub fn gauss_residual(spec: &TorusSpec, n: (usize, usize)) -> Result<LinearForm> {
    let mut acc = Acc::default();
    let mut add = |f: LinearForm, s: f64| {
        for (k, c) in f.gauge {
            acc.g(Some(k), s * c);
        }
        for (k, c) in f.charges {
            acc.q(k, s * c);
        }
    };
    add(electric_field_expression(spec, n, Dir::X)?, 1.0);
    add(electric_field_expression(spec, n, Dir::Y)?, 1.0);
    add(electric_field_expression(spec, spec.shift(n, Dir::X, -1), Dir::X)?, -1.0);
    add(electric_field_expression(spec, spec.shift(n, Dir::Y, -1), Dir::Y)?, -1.0);
    acc.q(spec.site_index(n), -1.0);
    Ok(acc.finish())
}

/// Change of every link field produced by psi_n^dag G psi_{n+e}: rotator
/// shifts from G plus the charge strings' response to q_n += 1,
/// q_{n+e} -= 1. Indexed like the model's `fields`.
pub fn hop_field_changes(spec: &TorusSpec, n: (usize, usize), dir: Dir) -> Result<Vec<f64>> {
    let g = kinetic_replacement(spec, n, dir)?;
    let to = spec.site_index(n);
    let from = spec.site_index(spec.shift(n, dir, 1));
    let mut out = Vec::new();
    for x in 0..spec.nx {
        for y in 0..spec.ny {
            for d in [Dir::X, Dir::Y] {
                let f = electric_field_expression(spec, (x, y), d)?;
                let mut delta = 0.0;
                for &(k, e) in &g.factors {
                    // P lowers its register by one.
                    delta -= e as f64 * f.gauge.iter().filter(|c| c.0 == k).map(|c| c.1).sum::<f64>();
                }
                for &(k, c) in &f.charges {
                    if k == to {
                        delta += c;
                    }
                    if k == from {
                        delta -= c;
                    }
                }
                out.push(delta);
            }
        }
    }
    Ok(out)
}

/// Position of link (n, dir) in the model's field list.
pub fn field_index(spec: &TorusSpec, n: (usize, usize), dir: Dir) -> usize {
    2 * (n.0 * spec.ny + n.1) + if dir == Dir::X { 0 } else { 1 }
}
