use anyhow::{bail, Context, Result};
use lgt_core::analysis::*;
use lgt_core::builder::{build_pure_gauge, BuildOptions};
use lgt_core::exec::Exec;
use lgt_core::matter::{build_matter_system, MatterOptions};
use lgt_core::mtx::{read_matrix_market, write_matrix_market};
use lgt_core::scan::{scan, scan_resume, LChoice, Observable, ScanGrid, ScanRecord};
use lgt_core::sparse::CsrMatrix;
use lgt_core::torus::{build_torus_hamiltonian, term_list, TorusSpec};
use lgt_core::{Complex64, CouplingParams, GroupParams, Representation};
use serde::{Deserialize, Serialize};

use crate::config::{Command, Part, RunConfig, SystemKind};
use crate::output::Artifact;

pub const RECORDS_SCHEMA: &str = "lgt-records/1";

/// JSON document written next to every CSV table.
#[derive(Debug, Serialize, Deserialize)]
pub struct Records<T> {
    pub schema: String,
    pub command: String,
    pub records: Vec<T>,
}

/// Files a command will write, so existing outputs are caught before any
/// work starts.
pub fn planned_outputs(c: &RunConfig) -> Vec<String> {
    let cmd = c.command.expect("validated config");
    let name = cmd.name();
    match cmd {
        Command::ExportOperator => vec!["operator.mtx".into()],
        Command::TorusGen if c.torus.matrix => vec!["terms.json".into(), "torus.mtx".into()],
        Command::TorusGen => vec!["terms.json".into()],
        _ => vec![format!("{name}.csv"), format!("{name}.json")],
    }
}

pub fn pipeline(c: &RunConfig) -> Pipeline {
    let exec = if c.threads > 1 { Exec::Parallel } else { Exec::Sequential };
    Pipeline {
        build: BuildOptions { exec, cap: Some(c.cap), ..Default::default() },
        solver: lgt_core::eigen::SolverConfig { exec, ..c.solver },
    }
}

/// Runs the configured command. `previous` is the earlier JSON output,
/// used by `--resume`.
pub fn run(c: &RunConfig, previous: Option<&str>) -> Result<Vec<Artifact>> {
    let pipe = pipeline(c);
    let cmd = c.command.expect("validated config");
    match cmd {
        Command::ScanPlaquette => scan_plaquette(c, &pipe, previous),
        Command::FourierFidelity => fourier(c, &pipe),
        Command::SequenceFidelity => sequence(c, &pipe),
        Command::LOpt => l_opt(c, &pipe),
        Command::GM => g_m(c, &pipe),
        Command::MatterScan => matter_scan(c, &pipe),
        Command::TorusGen => torus_gen(c),
        Command::ExportOperator => export_operator(c, &pipe),
        Command::TruncationAnalysis => truncation(c, &pipe),
    }
}

fn table<R: Serialize, J: Serialize>(cmd: Command, rows: &[R], json: Vec<J>) -> Result<Vec<Artifact>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let csv = w.into_inner().context("flushing CSV")?;
    let doc = Records { schema: RECORDS_SCHEMA.into(), command: cmd.name().into(), records: json };
    let mut js = serde_json::to_vec_pretty(&doc)?;
    js.push(b'\n');
    Ok(vec![
        Artifact { name: format!("{}.csv", cmd.name()), bytes: csv },
        Artifact { name: format!("{}.json", cmd.name()), bytes: js },
    ])
}

/// Every (1/g^2, l) pair of the grid, in grid order.
fn points(c: &RunConfig) -> Vec<(f64, usize)> {
    c.grid.inv_g2.iter().flat_map(|&g| c.grid.l.iter().map(move |&l| (g, l))).collect()
}

fn exec(c: &RunConfig) -> Exec {
    pipeline(c).build.exec
}

/// Solves inside a parallel map run sequentially.
fn inner(pipe: &Pipeline) -> Pipeline {
    let mut p = *pipe;
    p.build.exec = Exec::Sequential;
    p.solver.exec = Exec::Sequential;
    p
}

fn scan_plaquette(c: &RunConfig, pipe: &Pipeline, previous: Option<&str>) -> Result<Vec<Artifact>> {
    let grid = ScanGrid {
        observable: Observable::Plaquette,
        representation: c.grid.representation,
        inv_g2: c.grid.inv_g2.clone(),
        l: c.grid.l.clone(),
        big_l: if c.grid.big_l.is_empty() {
            LChoice::Optimal { span: c.grid.l_span }
        } else {
            LChoice::Fixed(c.grid.big_l.clone())
        },
    };
    let records = match previous {
        Some(text) => {
            let done: Records<ScanRecord> = serde_json::from_str(text).context("reading the previous scan output")?;
            scan_resume(&grid, &done.records, pipe)?
        }
        None => scan(&grid, pipe)?,
    };
    table(Command::ScanPlaquette, &records, records.clone())
}

#[derive(Serialize)]
struct FidelityRow {
    inv_g2: f64,
    l: usize,
    big_l: usize,
    fidelity: f64,
    is_max: bool,
}

fn fourier(c: &RunConfig, pipe: &Pipeline) -> Result<Vec<Artifact>> {
    let p = inner(pipe);
    let scans = exec(c)
        .map_slice(&points(c), |&(ig, l)| fourier_fidelity_scan(l, &CouplingParams::pure_gauge(ig)?, &c.grid.big_l_for(l), &p))
        .into_iter()
        .collect::<lgt_core::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (s, &(ig, _)) in scans.iter().zip(&points(c)) {
        for &(big_l, f) in &s.points {
            rows.push(FidelityRow { inv_g2: ig, l: s.l, big_l, fidelity: f, is_max: s.argmax.contains(&big_l) });
        }
    }
    table(Command::FourierFidelity, &rows, scans)
}

#[derive(Serialize)]
struct InfidelityRow {
    representation: Representation,
    inv_g2: f64,
    l: usize,
    big_l: Option<usize>,
    infidelity: f64,
}

fn sequence(c: &RunConfig, pipe: &Pipeline) -> Result<Vec<Artifact>> {
    let rep = c.grid.representation;
    let mut jobs = Vec::new();
    for (ig, l) in points(c) {
        match rep {
            Representation::Electric => jobs.push((ig, l, None)),
            Representation::Magnetic => jobs.extend(c.grid.big_l_for(l).into_iter().map(|b| (ig, l, Some(b)))),
        }
    }
    let p = inner(pipe);
    let rows = exec(c)
        .map_slice(&jobs, |&(ig, l, big_l)| {
            let inf = sequence_infidelity(rep, l, big_l.unwrap_or(l), &CouplingParams::pure_gauge(ig)?, &p)?;
            Ok(InfidelityRow { representation: rep, inv_g2: ig, l, big_l, infidelity: inf })
        })
        .into_iter()
        .collect::<lgt_core::Result<Vec<_>>>()?;
    table(Command::SequenceFidelity, &rows, rows.iter().collect())
}

#[derive(Serialize)]
struct LOptRow {
    inv_g2: f64,
    l: usize,
    l_opt: usize,
    method: LOptMethod,
    frozen: bool,
    zero_population: f64,
    warning: Option<String>,
}

fn l_opt(c: &RunConfig, pipe: &Pipeline) -> Result<Vec<Artifact>> {
    let p = inner(pipe);
    let pts = exec(c)
        .map_slice(&points(c), |&(ig, l)| find_l_opt(l, &CouplingParams::pure_gauge(ig)?, &c.grid.big_l_for(l), &p))
        .into_iter()
        .collect::<lgt_core::Result<Vec<_>>>()?;
    let rows: Vec<LOptRow> = pts
        .iter()
        .map(|x| LOptRow {
            inv_g2: 1.0 / x.g2,
            l: x.l,
            l_opt: x.l_opt,
            method: x.method,
            frozen: x.frozen,
            zero_population: x.zero_population,
            warning: x.warning.clone(),
        })
        .collect();
    table(Command::LOpt, &rows, pts)
}

#[derive(Serialize)]
struct GmRow {
    l: usize,
    inv_g2: f64,
    g: f64,
    fidelity: f64,
    /// Maximizing L values separated by ';'.
    argmax: String,
    g_m: f64,
}

fn g_m(c: &RunConfig, pipe: &Pipeline) -> Result<Vec<Artifact>> {
    let g2: Vec<f64> = c.grid.inv_g2.iter().map(|x| 1.0 / x).collect();
    let p = inner(pipe);
    let results = exec(c)
        .map_slice(&c.grid.l, |&l| find_gm(l, &g2, &c.grid.big_l_for(l), &p))
        .into_iter()
        .collect::<lgt_core::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for r in &results {
        for pt in &r.points {
            rows.push(GmRow {
                l: r.l,
                inv_g2: 1.0 / pt.g2,
                g: pt.g2.sqrt(),
                fidelity: pt.fidelity,
                argmax: pt.argmax.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"),
                g_m: r.g_m,
            });
        }
    }
    table(Command::GM, &rows, results)
}

#[derive(Serialize)]
struct MatterRow {
    representation: Representation,
    inv_g2: f64,
    l: usize,
    big_l: Option<usize>,
    m: f64,
    kappa: f64,
    energy: f64,
    plaquette: f64,
    sector_dim: usize,
}

fn matter_scan(c: &RunConfig, pipe: &Pipeline) -> Result<Vec<Artifact>> {
    let rep = c.grid.representation;
    let p = inner(pipe);
    let mut jobs = Vec::new();
    for (ig, l) in points(c) {
        match rep {
            Representation::Electric => jobs.push((ig, l, None)),
            Representation::Magnetic if c.grid.big_l.is_empty() => jobs.push((ig, l, Some(0))),
            Representation::Magnetic => jobs.extend(c.grid.big_l_for(l).into_iter().map(|b| (ig, l, Some(b)))),
        }
    }
    let rows = exec(c)
        .map_slice(&jobs, |&(ig, l, big_l)| -> Result<MatterRow> {
            let coupling = CouplingParams::new(1.0 / ig, 1.0, c.matter.m, c.matter.kappa)?;
            // Magnetic points without an explicit L use the pure-gauge L_opt.
            let big_l = match big_l {
                Some(0) => Some(find_l_opt(l, &CouplingParams::pure_gauge(ig)?, &c.grid.big_l_for(l), &p)?.l_opt),
                other => other,
            };
            let group = GroupParams::new(l, big_l.unwrap_or(l))?;
            let s = solve_matter(rep, group, &coupling, c.matter.static_charges, &p)?;
            Ok(MatterRow {
                representation: rep,
                inv_g2: ig,
                l,
                big_l,
                m: c.matter.m,
                kappa: c.matter.kappa,
                energy: s.energy,
                plaquette: s.plaquette,
                sector_dim: s.sector_dim,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    table(Command::MatterScan, &rows, rows.iter().collect())
}

fn torus_gen(c: &RunConfig) -> Result<Vec<Artifact>> {
    let mut spec = TorusSpec::new(c.torus.nx, c.torus.ny, c.torus.statistics)?;
    if !c.torus.static_charges.is_empty() {
        spec.static_charges = c.torus.static_charges.clone();
        spec.validate()?;
    }
    let coupling = CouplingParams::new(1.0 / c.grid.inv_g2[0], 1.0, c.matter.m, c.matter.kappa)?;
    let terms = term_list(&spec, &coupling)?;
    let mut out = vec![Artifact { name: "terms.json".into(), bytes: (terms.to_json() + "\n").into_bytes() }];
    if c.torus.matrix {
        let l = c.grid.l[0];
        let group = GroupParams::new(l, c.grid.big_l.first().copied().unwrap_or(l))?;
        let h = build_torus_hamiltonian(&spec, group, &coupling, c.grid.representation, Some(c.cap))?;
        match (h.matrix, h.matrix_error) {
            (Some(m), _) => out.push(Artifact { name: "torus.mtx".into(), bytes: write_matrix_market(&m).into_bytes() }),
            (None, Some(e)) => return Err(e.into()),
            (None, None) => bail!("torus matrix was not assembled"),
        }
    }
    Ok(out)
}

/// The requested operator as a complex matrix.
pub fn build_operator(c: &RunConfig, pipe: &Pipeline) -> Result<CsrMatrix<Complex64>> {
    let o = &c.operator;
    let group = GroupParams::new(o.l, o.big_l.unwrap_or(o.l))?;
    let build = BuildOptions { cyclic: o.cyclic, scheme: o.scheme, ..pipe.build };
    let rep = c.grid.representation;
    Ok(match o.system {
        SystemKind::PureGauge => {
            let h = build_pure_gauge(rep, group, &CouplingParams::pure_gauge(o.inv_g2)?, &build)?;
            match o.part {
                Part::Total => h.total,
                Part::Electric => h.h_e,
                Part::Magnetic => h.h_b,
                Part::Kinetic | Part::Mass => bail!("the pure-gauge plaquette has no {:?} term", o.part),
            }
            .to_complex()
        }
        SystemKind::Matter => {
            let coupling = CouplingParams::new(1.0 / o.inv_g2, 1.0, c.matter.m, c.matter.kappa)?;
            let h = build_matter_system(rep, group, &coupling, &MatterOptions { build, static_charges: c.matter.static_charges })?;
            match o.part {
                Part::Total => h.total,
                Part::Electric => h.h_e,
                Part::Magnetic => h.h_b,
                Part::Kinetic => h.h_k,
                Part::Mass => h.h_m,
            }
        }
    })
}

fn export_operator(c: &RunConfig, pipe: &Pipeline) -> Result<Vec<Artifact>> {
    let m = build_operator(c, pipe)?;
    let text = write_matrix_market(&m);
    if read_matrix_market(&text)? != m {
        bail!("Matrix Market round trip changed the operator");
    }
    Ok(vec![Artifact { name: "operator.mtx".into(), bytes: text.into_bytes() }])
}

#[derive(Serialize)]
struct ShellRow {
    l: usize,
    big_l: usize,
    variant: &'static str,
    shell: u64,
    population: f64,
    states: usize,
    cumulative: f64,
}

fn truncation(c: &RunConfig, pipe: &Pipeline) -> Result<Vec<Artifact>> {
    let mut jobs = Vec::new();
    for &l in &c.grid.l {
        if c.grid.big_l.is_empty() {
            jobs.push((l, l + 1));
        } else {
            jobs.extend(c.grid.big_l_for(l).into_iter().map(|b| (l, b)));
        }
    }
    let p = inner(pipe);
    let ds = exec(c)
        .map_slice(&jobs, |&(l, b)| truncation_decomposition(l, b, &p))
        .into_iter()
        .collect::<lgt_core::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for d in &ds {
        for (variant, prof) in [("truncated", &d.truncated), ("untruncated", &d.untruncated), ("cyclic-removed", &d.cyclic_removed)] {
            let mut cum = 0.0;
            for &(shell, population, states) in &prof.shells {
                cum += population;
                rows.push(ShellRow { l: d.l, big_l: d.big_l, variant, shell, population, states, cumulative: cum });
            }
        }
    }
    table(Command::TruncationAnalysis, &rows, ds)
}
