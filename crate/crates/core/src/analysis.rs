//! Observables and diagnostics on pure-gauge plaquette ground states:
//! the plaquette expectation, Fourier and sequence fidelities, the choice of
//! group resolution L, the crossover coupling g_m and the effect of
//! truncating the cyclic lowering operators.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{apply_register_block, MixedRadix, RotatorBasis};
use crate::builder::{build_pure_gauge, dft_block, BuildOptions, PowerScheme};
use crate::eigen::{ground_space, GroundSpace, SolverConfig};
use crate::error::{domain, Result};
use crate::matter::{build_matter_system, MatterOptions};
use crate::params::{CouplingParams, GroupParams, Representation};
use crate::sparse::{CsrMatrix, Scalar};

/// Plaquettes on the periodic 2x2 lattice.
pub const PLAQUETTE_VOLUME: usize = 4;

/// <box> = -(g^2 a^2 / V) <psi|H_B|psi>.
pub fn plaquette_expectation<T: Scalar>(state: &[T], h_b: &CsrMatrix<T>, coupling: &CouplingParams, volume: usize) -> f64 {
    -coupling.g2 * coupling.a * coupling.a / volume as f64 * h_b.expectation(state)
}

/// Plaquette expectation averaged over a (possibly degenerate) ground space.
pub fn plaquette_of_space<T: Scalar>(
    space: &GroundSpace<T>,
    h_b: &CsrMatrix<T>,
    coupling: &CouplingParams,
    volume: usize,
) -> f64 {
    -coupling.g2 * coupling.a * coupling.a / volume as f64 * space.expectation(h_b)
}

/// Upper bound cos(pi/(2l+2)) on the electric-representation plaquette at
/// truncation l, from the top eigenvalue of one truncated P + P^dagger.
/// The P1P2P3 term cannot reach it together with the single-rotator terms,
/// so the g -> 0 value lies strictly below.
pub fn electric_weak_coupling_bound(l: usize) -> f64 {
    (PI / (2 * l + 2) as f64).cos()
}

/// g -> 0 limit of the electric-representation plaquette: the top
/// eigenvalue of the coupling-free magnetic term, normalized per plaquette.
pub fn electric_weak_coupling_limit(l: usize, pipe: &Pipeline) -> Result<f64> {
    let c = CouplingParams::new(1.0, 1.0, 0.0, 0.0)?;
    let h = build_pure_gauge(Representation::Electric, electric_group(l)?, &c, &pipe.build)?;
    // With g = a = 1 the plaquette of a state is -<H_B>/V.
    let r = crate::eigen::ground_state(&h.h_b, &pipe.solver)?;
    Ok(-r.eigenvalues[0] / PLAQUETTE_VOLUME as f64)
}

/// Tensor power of the (2l+1)x(2l+1) corner of the (2L+1)-point DFT.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedDft {
    pub l: usize,
    pub big_l: usize,
    pub n_registers: usize,
    pub block: DMatrix<Complex64>,
}

impl TruncatedDft {
    pub fn new(l: usize, big_l: usize, n_registers: usize) -> Result<Self> {
        GroupParams::new(l, big_l)?;
        if n_registers == 0 {
            return domain("at least one register is required");
        }
        Ok(Self { l, big_l, n_registers, block: dft_block(l, big_l) })
    }

    pub fn dim(&self) -> usize {
        (2 * self.l + 1).pow(self.n_registers as u32)
    }

    pub fn apply<T: Scalar>(&self, x: &[T]) -> Vec<Complex64> {
        let d = 2 * self.l + 1;
        let layout = MixedRadix::new(vec![d; self.n_registers]).expect("valid radices");
        let mut y: Vec<Complex64> = x.iter().map(|v| v.to_c64()).collect();
        for reg in 0..self.n_registers {
            y = apply_register_block(&layout, reg, &self.block, &y);
        }
        y
    }

    /// Explicit matrix; only sensible for small l.
    pub fn dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        for _ in 0..self.n_registers {
            m = m.kronecker(&self.block);
        }
        m
    }
}

/// F(L, l) on the three rotators of the plaquette.
pub fn truncated_dft(l: usize, big_l: usize) -> Result<TruncatedDft> {
    TruncatedDft::new(l, big_l, 3)
}

/// Largest singular value of the overlap matrix <a_i|b_j>, i.e. the cosine
/// of the smallest principal angle between the spans. For single vectors
/// this is |<a|b>|.
pub fn subspace_overlap(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let o = DMatrix::from_fn(a.len(), b.len(), |i, j| {
        a[i].iter().zip(&b[j]).map(|(x, y)| x.conj() * y).sum::<Complex64>()
    });
    if o.len() == 1 {
        return o[(0, 0)].norm();
    }
    o.singular_values().iter().copied().fold(0.0, f64::max)
}

fn complexify<T: Scalar>(vs: &[Vec<T>]) -> Vec<Vec<Complex64>> {
    vs.iter().map(|v| v.iter().map(|x| x.to_c64()).collect()).collect()
}

/// |<psi_b| F(L,l) |psi_e>|^2, generalized to ground spaces.
pub fn fourier_fidelity<T: Scalar>(electric: &[Vec<T>], magnetic: &[Vec<T>], dft: &TruncatedDft) -> f64 {
    let mapped: Vec<Vec<Complex64>> = electric.iter().map(|v| dft.apply(v)).collect();
    subspace_overlap(&complexify(magnetic), &mapped).powi(2)
}

/// Zero-pads a state on [-l_small, l_small]^n into [-l_big, l_big]^n.
pub fn embed<T: Scalar>(v: &[T], l_small: usize, l_big: usize, n_registers: usize) -> Vec<T> {
    assert!(l_small <= l_big);
    let small = RotatorBasis::new(n_registers, l_small).expect("valid basis");
    let big = RotatorBasis::new(n_registers, l_big).expect("valid basis");
    assert_eq!(v.len(), small.dim());
    let mut out = vec![T::zero(); big.dim()];
    for (i, &x) in v.iter().enumerate() {
        let j = big.index_of(&small.values(i)).expect("inside the larger window");
        out[j] = x;
    }
    out
}

/// Overlap modulus of the l-1 state with the l state on the common
/// [-(l-1), l-1]^3 window.
pub fn sequence_fidelity<T: Scalar>(previous: &[Vec<T>], current: &[Vec<T>], l: usize) -> Result<f64> {
    if l == 0 {
        return domain("sequence fidelity needs l >= 1");
    }
    let prev: Vec<Vec<T>> = previous.iter().map(|v| embed(v, l - 1, l, 3)).collect();
    Ok(subspace_overlap(&complexify(&prev), &complexify(current)))
}

/// Build and solver settings used by the pipelines below.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pipeline {
    pub build: BuildOptions,
    pub solver: SolverConfig,
}

/// Solved pure-gauge plaquette.
#[derive(Debug, Clone)]
pub struct PureGaugeState {
    pub representation: Representation,
    pub group: GroupParams,
    pub coupling: CouplingParams,
    pub space: GroundSpace<f64>,
    pub plaquette: f64,
}

impl PureGaugeState {
    /// Ground-space weight on |0,0,0>.
    pub fn zero_population(&self) -> f64 {
        let i = RotatorBasis::plaquette(self.group.l).expect("valid basis").index_of(&[0, 0, 0]).expect("origin");
        self.space.vectors.iter().map(|v| v[i] * v[i]).sum::<f64>() / self.space.vectors.len() as f64
    }

    /// Ground-space population as a function of r1^2 + r2^2 + r3^2.
    pub fn shell_profile(&self) -> ShellProfile {
        let n = self.space.vectors.len() as f64;
        let dim = self.space.vectors[0].len();
        let p: Vec<f64> = (0..dim).map(|i| self.space.vectors.iter().map(|v| v[i] * v[i]).sum::<f64>() / n).collect();
        ShellProfile::from_populations(&p, self.group.l)
    }
}

pub fn solve_pure_gauge(
    rep: Representation,
    group: GroupParams,
    coupling: &CouplingParams,
    pipe: &Pipeline,
) -> Result<PureGaugeState> {
    let h = build_pure_gauge(rep, group, coupling, &pipe.build)?;
    let space = ground_space(&h.total, &pipe.solver)?;
    let plaquette = plaquette_of_space(&space, &h.h_b, coupling, PLAQUETTE_VOLUME);
    Ok(PureGaugeState { representation: rep, group, coupling: *coupling, space, plaquette })
}

fn electric_group(l: usize) -> Result<GroupParams> {
    GroupParams::new(l, l.max(1))
}

/// Default L grid {l+1, ..., l+64}.
pub fn default_l_grid(l: usize) -> Vec<usize> {
    (l + 1..=l + 64).collect()
}

fn check_grid(l: usize, grid: &[usize]) -> Result<()> {
    if grid.is_empty() {
        return domain("empty L grid");
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return domain("L grid must be strictly ascending");
    }
    if grid[0] <= l {
        return domain(format!("L grid must start above l={l}"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierScan {
    pub l: usize,
    pub g2: f64,
    /// (L, fidelity) over the grid.
    pub points: Vec<(usize, f64)>,
    pub best: f64,
    /// Every L attaining the maximum (within 1e-12).
    pub argmax: Vec<usize>,
}

/// Fourier fidelity between the electric ground state and the magnetic
/// ground states at each L of the grid.
pub fn fourier_fidelity_scan(l: usize, coupling: &CouplingParams, grid: &[usize], pipe: &Pipeline) -> Result<FourierScan> {
    check_grid(l, grid)?;
    let e = solve_pure_gauge(Representation::Electric, electric_group(l)?, coupling, pipe)?;
    let points = grid
        .iter()
        .map(|&big_l| {
            let group = GroupParams::new(l, big_l)?;
            let b = solve_pure_gauge(Representation::Magnetic, group, coupling, pipe)?;
            Ok((big_l, fourier_fidelity(&e.space.vectors, &b.space.vectors, &truncated_dft(l, big_l)?)))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let argmax = points.iter().filter(|p| best - p.1 <= 1e-12).map(|p| p.0).collect();
    Ok(FourierScan { l, g2: coupling.g2, points, best, argmax })
}

/// 1 - F_s between truncations l-1 and l at fixed (rep, g, L).
pub fn sequence_infidelity(
    rep: Representation,
    l: usize,
    big_l: usize,
    coupling: &CouplingParams,
    pipe: &Pipeline,
) -> Result<f64> {
    if l == 0 {
        return domain("sequence fidelity needs l >= 1");
    }
    let group = |l| match rep {
        Representation::Electric => electric_group(l),
        Representation::Magnetic => GroupParams::new(l, big_l),
    };
    let a = solve_pure_gauge(rep, group(l - 1)?, coupling, pipe)?;
    let b = solve_pure_gauge(rep, group(l)?, coupling, pipe)?;
    Ok(1.0 - sequence_fidelity(&a.space.vectors, &b.space.vectors, l)?)
}

/// How the optimal L was picked from the sequence-infidelity curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LOptMethod {
    /// First interior local minimum.
    LocalMinimum,
    /// Sharpest upward bend of log(1 - F_s) on a monotone curve.
    Shoulder,
    /// Curve still falling at the end of the grid.
    GridEnd,
    /// Curve rising from the first grid point.
    GridStart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LOptPoint {
    pub l: usize,
    pub g2: f64,
    pub l_opt: usize,
    pub method: LOptMethod,
    /// (L, 1 - F_s) for every L evaluated.
    pub curve: Vec<(usize, f64)>,
    /// Optimum at the grid start with the ground state collapsed onto |0,0,0>.
    pub frozen: bool,
    pub zero_population: f64,
    pub warning: Option<String>,
}

/// Second difference of log(1 - F_s) required at a local minimum. Shallower
/// minima show up on the flat strong-coupling plateau.
pub const KINK_CURVATURE: f64 = 0.05;
/// Minimum second difference of log(1 - F_s) for a shoulder.
pub const SHOULDER_CURVATURE: f64 = 0.5;
/// |0,0,0> population above which an optimum at the grid start means freezing.
pub const FREEZING_POPULATION: f64 = 0.5;

fn is_kink(prev: f64, cur: f64, next: f64) -> bool {
    let ln = |v: f64| v.max(1e-300).ln();
    cur < prev && cur <= next && ln(prev) + ln(next) - 2.0 * ln(cur) >= KINK_CURVATURE
}

/// Picks L_opt from a sampled curve; returns the index into `curve`.
pub fn pick_l_opt(curve: &[(usize, f64)]) -> (usize, LOptMethod) {
    let c: Vec<f64> = curve.iter().map(|p| p.1).collect();
    for i in 1..c.len().saturating_sub(1) {
        if is_kink(c[i - 1], c[i], c[i + 1]) {
            return (i, LOptMethod::LocalMinimum);
        }
    }
    let y: Vec<f64> = c.iter().map(|v| v.max(1e-300).ln()).collect();
    let mut best: Option<(usize, f64)> = None;
    for i in 1..y.len().saturating_sub(1) {
        let k = (y[i + 1] - y[i]) - (y[i] - y[i - 1]);
        if k > SHOULDER_CURVATURE && best.is_none_or(|b| k > b.1) {
            best = Some((i, k));
        }
    }
    if let Some((i, _)) = best {
        return (i, LOptMethod::Shoulder);
    }
    let n = c.len();
    if n >= 2 && c[n - 1] < c[n - 2] {
        (n - 1, LOptMethod::GridEnd)
    } else {
        (0, LOptMethod::GridStart)
    }
}

/// Greedy search for the optimal group resolution at truncation l, using
/// the magnetic sequence infidelity. Stops at the first local minimum;
/// otherwise scans the whole grid and falls back to the shoulder rule.
pub fn find_l_opt(l: usize, coupling: &CouplingParams, grid: &[usize], pipe: &Pipeline) -> Result<LOptPoint> {
    check_grid(l, grid)?;
    if l == 0 {
        return domain("L_opt needs l >= 1");
    }
    let mut curve: Vec<(usize, f64)> = Vec::new();
    for &big_l in grid {
        curve.push((big_l, sequence_infidelity(Representation::Magnetic, l, big_l, coupling, pipe)?));
        let n = curve.len();
        if n >= 3
            && is_kink(curve[n - 3].1, curve[n - 2].1, curve[n - 1].1) {
                break;
            }
    }
    l_opt_from_curve(l, coupling, curve, pipe)
}

/// Same as [`find_l_opt`] but evaluates every grid point first.
pub fn find_l_opt_exhaustive(l: usize, coupling: &CouplingParams, grid: &[usize], pipe: &Pipeline) -> Result<LOptPoint> {
    check_grid(l, grid)?;
    if l == 0 {
        return domain("L_opt needs l >= 1");
    }
    let curve = grid
        .iter()
        .map(|&big_l| Ok((big_l, sequence_infidelity(Representation::Magnetic, l, big_l, coupling, pipe)?)))
        .collect::<Result<Vec<_>>>()?;
    l_opt_from_curve(l, coupling, curve, pipe)
}

fn l_opt_from_curve(l: usize, coupling: &CouplingParams, curve: Vec<(usize, f64)>, pipe: &Pipeline) -> Result<LOptPoint> {
    let (i, method) = pick_l_opt(&curve);
    let l_opt = curve[i].0;
    let state = solve_pure_gauge(Representation::Magnetic, GroupParams::new(l, l_opt)?, coupling, pipe)?;
    let zero_population = state.zero_population();
    let frozen = method == LOptMethod::GridStart && zero_population >= FREEZING_POPULATION;
    let warning = (method == LOptMethod::GridEnd)
        .then(|| format!("no minimum of the sequence infidelity up to L={l_opt}; returning the grid end"));
    Ok(LOptPoint { l, g2: coupling.g2, l_opt, method, curve, frozen, zero_population, warning })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmPoint {
    pub g2: f64,
    pub fidelity: f64,
    pub argmax: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmResult {
    pub l: usize,
    /// Coupling g (not g^2) of the fidelity peak.
    pub g_m: f64,
    pub points: Vec<GmPoint>,
    pub warning: Option<String>,
}

impl GmResult {
    /// Electric for g >= g_m, magnetic below.
    pub fn preferred_representation(&self, g: f64) -> Representation {
        if g >= self.g_m {
            Representation::Electric
        } else {
            Representation::Magnetic
        }
    }
}

/// Spread of the max-over-L fidelity below which the peak is ambiguous.
pub const GM_FLATNESS: f64 = 1e-9;

/// Coupling at which the max-over-L Fourier fidelity peaks, over a grid of g^2.
pub fn find_gm(l: usize, g2_grid: &[f64], l_grid: &[usize], pipe: &Pipeline) -> Result<GmResult> {
    if g2_grid.is_empty() {
        return domain("empty coupling grid");
    }
    let points = g2_grid
        .iter()
        .map(|&g2| {
            let s = fourier_fidelity_scan(l, &CouplingParams::new(g2, 1.0, 0.0, 0.0)?, l_grid, pipe)?;
            Ok(GmPoint { g2, fidelity: s.best, argmax: s.argmax })
        })
        .collect::<Result<Vec<_>>>()?;
    gm_from_points(l, points)
}

/// Peak of an already computed fidelity curve.
pub fn gm_from_points(l: usize, points: Vec<GmPoint>) -> Result<GmResult> {
    if points.is_empty() {
        return domain("empty coupling grid");
    }
    let (mut best, mut lo, mut hi) = (0, f64::INFINITY, f64::NEG_INFINITY);
    for (i, p) in points.iter().enumerate() {
        if p.fidelity > points[best].fidelity {
            best = i;
        }
        lo = lo.min(p.fidelity);
        hi = hi.max(p.fidelity);
    }
    let warning = if points.len() == 1 {
        Some("single coupling point; g_m is that point".to_string())
    } else if hi - lo < GM_FLATNESS {
        Some(format!("fidelity varies by less than {GM_FLATNESS:e} over the grid; g_m is ambiguous"))
    } else {
        None
    };
    Ok(GmResult { l, g_m: points[best].g2.sqrt(), points, warning })
}

/// Ground-state population over shells s = r1^2 + r2^2 + r3^2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellProfile {
    /// (s, total population, number of basis states) in ascending s.
    pub shells: Vec<(u64, f64, usize)>,
}

impl ShellProfile {
    pub fn from_populations(p: &[f64], l: usize) -> Self {
        let basis = RotatorBasis::new(3, l).expect("valid basis");
        assert_eq!(p.len(), basis.dim());
        let mut map = std::collections::BTreeMap::<u64, (f64, usize)>::new();
        for (i, &x) in p.iter().enumerate() {
            let s = basis.values(i).iter().map(|r| (r * r) as u64).sum();
            let e = map.entry(s).or_insert((0.0, 0));
            e.0 += x;
            e.1 += 1;
        }
        Self { shells: map.into_iter().map(|(s, (x, n))| (s, x, n)).collect() }
    }

    /// Population with s <= `s_max`.
    pub fn cumulative(&self, s_max: u64) -> f64 {
        self.shells.iter().take_while(|x| x.0 <= s_max).map(|x| x.1).sum()
    }

    /// Mean population per basis state in shell `s` (0 when absent).
    pub fn mean(&self, s: u64) -> f64 {
        self.shells.iter().find(|x| x.0 == s).map_or(0.0, |x| x.1 / x.2 as f64)
    }

    /// Total-variation distance from the uniform distribution on the same states.
    pub fn distance_from_uniform(&self) -> f64 {
        let n: usize = self.shells.iter().map(|x| x.2).sum();
        let u = 1.0 / n as f64;
        // Within a shell only the total is kept, so this is a lower bound.
        0.5 * self.shells.iter().map(|x| (x.1 - u * x.2 as f64).abs()).sum::<f64>()
    }
}

/// P = V' + P' for the cyclic lowering operator of Z_{2L+1}, on the full
/// (2L+1)-dimensional register: P' keeps |r-1><r| for r in [1-l, l].
#[derive(Debug, Clone, PartialEq)]
pub struct LoweringSplit {
    pub l: usize,
    pub big_l: usize,
    pub p_prime: DMatrix<f64>,
    pub v_prime: DMatrix<f64>,
}

pub fn split_lowering(l: usize, big_l: usize) -> Result<LoweringSplit> {
    GroupParams::new(l, big_l)?;
    let n = 2 * big_l + 1;
    let bl = big_l as i64;
    let idx = |r: i64| (r + bl) as usize;
    let mut p_prime = DMatrix::zeros(n, n);
    let mut v_prime = DMatrix::zeros(n, n);
    for r in -bl..=bl {
        let target = if r == -bl { bl } else { r - 1 };
        let inside = r >= 1 - l as i64 && r <= l as i64;
        let m = if inside { &mut p_prime } else { &mut v_prime };
        m[(idx(target), idx(r))] = 1.0;
    }
    Ok(LoweringSplit { l, big_l, p_prime, v_prime })
}

/// Ground states of the magnetic electric term alone at (l, L): truncated
/// to the window, untruncated on Z_{2L+1}, and with only the cyclic wrap
/// removed. Profiles of the first are over the window, the others over
/// the full group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationDecomposition {
    pub l: usize,
    pub big_l: usize,
    pub truncated: ShellProfile,
    pub untruncated: ShellProfile,
    pub cyclic_removed: ShellProfile,
}

pub fn truncation_decomposition(l: usize, big_l: usize, pipe: &Pipeline) -> Result<TruncationDecomposition> {
    GroupParams::new(l, big_l)?;
    let coupling = CouplingParams::new(1.0, 1.0, 0.0, 0.0)?;
    let profile = |group: GroupParams, scheme: PowerScheme| -> Result<ShellProfile> {
        let opts = BuildOptions { scheme, ..pipe.build };
        let h = build_pure_gauge(Representation::Magnetic, group, &coupling, &opts)?;
        let space = ground_space(&h.h_e, &pipe.solver)?;
        let n = space.vectors.len() as f64;
        let p: Vec<f64> = (0..h.h_e.dim()).map(|i| space.vectors.iter().map(|v| v[i] * v[i]).sum::<f64>() / n).collect();
        Ok(ShellProfile::from_populations(&p, group.l))
    };
    let full = GroupParams::new(big_l, big_l)?;
    Ok(TruncationDecomposition {
        l,
        big_l,
        truncated: profile(GroupParams::new(l, big_l)?, PowerScheme::BandTruncated)?,
        untruncated: profile(full, PowerScheme::WindowProjected)?,
        cyclic_removed: profile(full, PowerScheme::BandTruncated)?,
    })
}

/// Population of the untruncated (l = L) magnetic ground state outside
/// the window [-l, l]^3.
pub fn window_leakage(l: usize, big_l: usize, coupling: &CouplingParams, pipe: &Pipeline) -> Result<f64> {
    GroupParams::new(l, big_l)?;
    let state = solve_pure_gauge(Representation::Magnetic, GroupParams::new(big_l, big_l)?, coupling, pipe)?;
    let basis = RotatorBasis::plaquette(big_l)?;
    let n = state.space.vectors.len() as f64;
    let li = l as i64;
    Ok((0..basis.dim())
        .filter(|&i| basis.values(i).iter().any(|r| r.abs() > li))
        .map(|i| state.space.vectors.iter().map(|v| v[i] * v[i]).sum::<f64>() / n)
        .sum())
}

/// Ground state of the plaquette with dynamical fermions, restricted to
/// total charge zero.
#[derive(Debug, Clone)]
pub struct MatterState {
    pub representation: Representation,
    pub group: GroupParams,
    pub coupling: CouplingParams,
    /// Energy including the constant dropped from the magnetic build.
    pub energy: f64,
    pub plaquette: f64,
    pub sector_dim: usize,
}

pub fn solve_matter(
    rep: Representation,
    group: GroupParams,
    coupling: &CouplingParams,
    static_charges: [f64; 4],
    pipe: &Pipeline,
) -> Result<MatterState> {
    let opts = MatterOptions { build: pipe.build, static_charges };
    let h = build_matter_system(rep, group, coupling, &opts)?;
    let sector = h.charge_sector(0.0);
    if sector.is_empty() {
        return domain("no neutral states for these static charges");
    }
    let space = ground_space(&h.total.restrict(&sector), &pipe.solver)?;
    let plaquette = plaquette_of_space(&space, &h.h_b.restrict(&sector), coupling, PLAQUETTE_VOLUME);
    Ok(MatterState {
        representation: rep,
        group,
        coupling: *coupling,
        energy: space.energy + h.energy_shift,
        plaquette,
        sector_dim: sector.len(),
    })
}
