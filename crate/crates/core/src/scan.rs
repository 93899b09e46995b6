//! Parameter scans over (g^2, l, L) and the resource comparison between
//! group-resolution strategies.
//!
//! Points are evaluated independently, in parallel when enabled, and
//! returned sorted by grid key so output does not depend on scheduling.

use serde::{Deserialize, Serialize};

use crate::analysis::{find_l_opt, fourier_fidelity_scan, sequence_infidelity, solve_pure_gauge, Pipeline};
use crate::error::{domain, Result};
use crate::params::{CouplingParams, GroupParams, Representation};

pub const SCAN_SCHEMA: &str = "lgt-scan/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    Plaquette,
    Energy,
    /// 1 - F_s between l-1 and l.
    SequenceInfidelity,
    /// Max over the L grid of the Fourier fidelity; representation is ignored.
    FourierFidelity,
    /// Optimal L from the sequence infidelity; representation is ignored.
    LOpt,
}

/// Group resolution used at each magnetic point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LChoice {
    /// Every listed L (values not above l are skipped).
    Fixed(Vec<usize>),
    /// L_opt(l, g) searched over l+1 ..= l+`span`.
    Optimal { span: usize },
}

impl Default for LChoice {
    fn default() -> Self {
        LChoice::Optimal { span: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub observable: Observable,
    pub representation: Representation,
    pub inv_g2: Vec<f64>,
    pub l: Vec<usize>,
    #[serde(default)]
    pub big_l: LChoice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub observable: Observable,
    pub representation: Representation,
    pub inv_g2: f64,
    pub l: usize,
    /// Group resolution; absent for electric points.
    pub big_l: Option<usize>,
    pub value: Option<f64>,
    pub error: Option<String>,
}

impl ScanRecord {
    /// Sort and deduplication key.
    pub fn key(&self) -> (u64, usize, usize) {
        (self.inv_g2.to_bits(), self.l, self.big_l.unwrap_or(0))
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// One point of a grid before evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Point {
    inv_g2: f64,
    l: usize,
    big_l: Option<usize>,
}

fn points(grid: &ScanGrid) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for &ig in &grid.inv_g2 {
        if !(ig > 0.0 && ig.is_finite()) {
            return domain(format!("g^-2 must be positive and finite, got {ig}"));
        }
        for &l in &grid.l {
            let magnetic_l = grid.representation == Representation::Magnetic
                && matches!(grid.observable, Observable::Plaquette | Observable::Energy | Observable::SequenceInfidelity);
            match (&grid.big_l, magnetic_l) {
                (LChoice::Fixed(ls), true) => {
                    out.extend(ls.iter().filter(|&&bl| bl >= l.max(1)).map(|&bl| Point { inv_g2: ig, l, big_l: Some(bl) }))
                }
                _ => out.push(Point { inv_g2: ig, l, big_l: None }),
            }
        }
    }
    Ok(out)
}

fn l_grid(l: usize, choice: &LChoice) -> Vec<usize> {
    match choice {
        LChoice::Fixed(ls) => ls.iter().copied().filter(|&bl| bl > l).collect(),
        LChoice::Optimal { span } => (l + 1..=l + span.max(&1)).collect(),
    }
}

fn evaluate(grid: &ScanGrid, p: Point, pipe: &Pipeline) -> Result<(Option<usize>, f64)> {
    let c = CouplingParams::pure_gauge(p.inv_g2)?;
    let rep = grid.representation;
    let resolve = |l: usize| -> Result<usize> {
        match (rep, p.big_l) {
            (Representation::Electric, _) => Ok(l.max(1)),
            (Representation::Magnetic, Some(bl)) => Ok(bl),
            (Representation::Magnetic, None) => Ok(find_l_opt(l.max(1), &c, &l_grid(l.max(1), &grid.big_l), pipe)?.l_opt),
        }
    };
    let tag = |bl: usize| (rep == Representation::Magnetic).then_some(bl);
    match grid.observable {
        Observable::Plaquette | Observable::Energy => {
            let bl = resolve(p.l)?;
            let s = solve_pure_gauge(rep, GroupParams::new(p.l, bl)?, &c, pipe)?;
            let v = if grid.observable == Observable::Plaquette { s.plaquette } else { s.space.energy };
            Ok((tag(bl), v))
        }
        Observable::SequenceInfidelity => {
            let bl = resolve(p.l)?;
            Ok((tag(bl), sequence_infidelity(rep, p.l, bl, &c, pipe)?))
        }
        Observable::FourierFidelity => {
            let s = fourier_fidelity_scan(p.l, &c, &l_grid(p.l, &grid.big_l), pipe)?;
            Ok((s.argmax.first().copied(), s.best))
        }
        Observable::LOpt => {
            let r = find_l_opt(p.l, &c, &l_grid(p.l, &grid.big_l), pipe)?;
            Ok((Some(r.l_opt), r.l_opt as f64))
        }
    }
}

fn record(grid: &ScanGrid, p: Point, pipe: &Pipeline) -> ScanRecord {
    let (big_l, value, error) = match evaluate(grid, p, pipe) {
        Ok((bl, v)) => (bl.or(p.big_l), Some(v), None),
        Err(e) => (p.big_l, None, Some(e.to_string())),
    };
    ScanRecord { observable: grid.observable, representation: grid.representation, inv_g2: p.inv_g2, l: p.l, big_l, value, error }
}

/// Evaluates every grid point. Failures are recorded per point.
pub fn scan(grid: &ScanGrid, pipe: &Pipeline) -> Result<Vec<ScanRecord>> {
    scan_resume(grid, &[], pipe)
}

/// Like [`scan`], reusing successful records from an earlier run of the
/// same grid.
pub fn scan_resume(grid: &ScanGrid, done: &[ScanRecord], pipe: &Pipeline) -> Result<Vec<ScanRecord>> {
    let pts = points(grid)?;
    let reusable = |p: &Point| {
        done.iter().find(|r| {
            r.is_ok()
                && r.observable == grid.observable
                && r.representation == grid.representation
                && r.inv_g2.to_bits() == p.inv_g2.to_bits()
                && r.l == p.l
                && (p.big_l.is_none() || r.big_l == p.big_l)
        })
    };
    // Solver-level parallelism would oversubscribe; points run in parallel instead.
    let inner = Pipeline {
        build: crate::builder::BuildOptions { exec: crate::exec::Exec::Sequential, ..pipe.build },
        solver: crate::eigen::SolverConfig { exec: crate::exec::Exec::Sequential, ..pipe.solver },
    };
    let mut out: Vec<ScanRecord> =
        pipe.build.exec.map_slice(&pts, |p| reusable(p).cloned().unwrap_or_else(|| record(grid, *p, &inner)));
    out.sort_by_key(|r| r.key());
    Ok(out)
}

/// How the group resolution is chosen as l grows in the resource comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Electric basis; no group resolution.
    Electric,
    /// Magnetic basis with one L for every l.
    FixedL(usize),
    /// Magnetic basis with L = L_opt(l, g') tuned once at a fixed coupling
    /// g'^-2 = `.0`, whatever the target coupling.
    TunedAt(f64),
    /// Magnetic basis with L = L_opt(l, g).
    GScaled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyRow {
    pub strategy: Strategy,
    /// (l, L, <box>, relative deviation) for every l tried.
    pub trials: Vec<(usize, Option<usize>, f64, f64)>,
    /// Smallest l within tolerance.
    pub l_needed: Option<usize>,
    /// (2l+1)^3 at `l_needed`.
    pub states: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceComparison {
    pub inv_g2: f64,
    pub reference_l: usize,
    pub reference_big_l: usize,
    pub reference: f64,
    pub tolerance: f64,
    pub rows: Vec<StrategyRow>,
}

/// States each strategy needs to bring <box> within `tolerance` (relative)
/// of the magnetic value at `reference_l` with its optimal L. Truncations
/// 1 ..= `l_max` are tried in order.
pub fn resource_comparison(
    inv_g2: f64,
    reference_l: usize,
    strategies: &[Strategy],
    tolerance: f64,
    l_max: usize,
    pipe: &Pipeline,
) -> Result<ResourceComparison> {
    let c = CouplingParams::pure_gauge(inv_g2)?;
    let span = |l: usize| (l + 1..=l + 64).collect::<Vec<_>>();
    let reference_big_l = find_l_opt(reference_l, &c, &span(reference_l), pipe)?.l_opt;
    let reference =
        solve_pure_gauge(Representation::Magnetic, GroupParams::new(reference_l, reference_big_l)?, &c, pipe)?.plaquette;
    let rows = strategies
        .iter()
        .map(|&strategy| {
            let mut trials = Vec::new();
            let mut l_needed = None;
            for l in 1..=l_max {
                let (rep, bl) = match strategy {
                    Strategy::Electric => (Representation::Electric, None),
                    Strategy::FixedL(bl) if bl < l => break,
                    Strategy::FixedL(bl) => (Representation::Magnetic, Some(bl)),
                    Strategy::TunedAt(ig) => {
                        let at = CouplingParams::pure_gauge(ig)?;
                        (Representation::Magnetic, Some(find_l_opt(l, &at, &span(l), pipe)?.l_opt))
                    }
                    Strategy::GScaled => (Representation::Magnetic, Some(find_l_opt(l, &c, &span(l), pipe)?.l_opt)),
                };
                let group = GroupParams::new(l, bl.unwrap_or(l))?;
                let v = solve_pure_gauge(rep, group, &c, pipe)?.plaquette;
                let dev = ((v - reference) / reference).abs();
                trials.push((l, bl, v, dev));
                if dev <= tolerance {
                    l_needed = Some(l);
                    break;
                }
            }
            Ok(StrategyRow { strategy, trials, l_needed, states: l_needed.map(|l| (2 * l + 1).pow(3)) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResourceComparison { inv_g2, reference_l, reference_big_l, reference, tolerance, rows })
}
