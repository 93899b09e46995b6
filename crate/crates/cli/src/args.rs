use std::path::PathBuf;

use clap::Parser;
use lgt_core::builder::PowerScheme;
use lgt_core::eigen::Method;
use lgt_core::Representation;

use crate::config::{Command, Part, RunConfig, SystemKind, UsageError};

/// Hamiltonian lattice QED on a periodic plaquette and small tori.
///
/// Settings are read from built-in defaults, then `--config`, then the
/// flags below; a flag always wins over the config file.
#[derive(Debug, Parser)]
#[command(name = "lgt", version)]
pub struct Cli {
    /// Command to run; may instead come from the config file.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// TOML run configuration.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Overwrite existing output files.
    #[arg(long)]
    pub force: bool,
    /// Continue an interrupted scan-plaquette run from its JSON output.
    #[arg(long)]
    pub resume: bool,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    pub print_config: bool,
    /// Largest Hilbert-space dimension allowed.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Worker threads.
    #[arg(long, short = 'j')]
    pub threads: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Solver residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_parser = parse_method)]
    pub method: Option<Method>,
    /// electric | magnetic
    #[arg(long)]
    pub rep: Option<Representation>,
    /// Couplings 1/g^2, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub inv_g2: Vec<f64>,
    /// Truncations l, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub l: Vec<usize>,
    /// Group resolutions L, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub big_l: Vec<usize>,
    /// Width of the default L window above l.
    #[arg(long)]
    pub l_span: Option<usize>,
    /// Fermion mass.
    #[arg(long)]
    pub m: Option<f64>,
    /// Hopping strength.
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    /// Operator family for export-operator.
    #[arg(long, value_enum)]
    pub system: Option<SystemKind>,
    /// Hamiltonian term for export-operator.
    #[arg(long, value_enum)]
    pub part: Option<Part>,
    /// Wrap the electric lowering operators (export-operator).
    #[arg(long)]
    pub cyclic: bool,
    /// window-projected | band-truncated
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Option<PowerScheme>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    match s {
        "auto" => Ok(Method::Auto),
        "lanczos" => Ok(Method::Lanczos),
        "dense" => Ok(Method::Dense),
        _ => Err(format!("unknown method '{s}' (auto, lanczos, dense)")),
    }
}

fn parse_scheme(s: &str) -> Result<PowerScheme, String> {
    match s {
        "window-projected" => Ok(PowerScheme::WindowProjected),
        "band-truncated" => Ok(PowerScheme::BandTruncated),
        _ => Err(format!("unknown scheme '{s}' (window-projected, band-truncated)")),
    }
}

impl Cli {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<RunConfig, UsageError> {
        let mut c = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| UsageError { field: String::new(), message: format!("{}: {e}", p.display()) })?;
                RunConfig::from_toml(&text)?
            }
            None => RunConfig::default(),
        };
        self.apply(&mut c);
        c.validate()?;
        Ok(c)
    }

    pub fn apply(&self, c: &mut RunConfig) {
        fn set<T: Clone>(dst: &mut T, v: &Option<T>) {
            if let Some(v) = v {
                *dst = v.clone();
            }
        }
        if self.command.is_some() {
            c.command = self.command;
        }
        set(&mut c.output, &self.out);
        c.force |= self.force;
        c.resume |= self.resume;
        set(&mut c.cap, &self.cap);
        set(&mut c.threads, &self.threads);
        set(&mut c.solver.seed, &self.seed);
        set(&mut c.solver.tol, &self.tol);
        set(&mut c.solver.method, &self.method);
        set(&mut c.grid.representation, &self.rep);
        set(&mut c.grid.l_span, &self.l_span);
        set(&mut c.matter.m, &self.m);
        set(&mut c.matter.kappa, &self.kappa);
        set(&mut c.torus.nx, &self.nx);
        set(&mut c.torus.ny, &self.ny);
        set(&mut c.operator.system, &self.system);
        set(&mut c.operator.part, &self.part);
        set(&mut c.operator.scheme, &self.scheme);
        c.operator.cyclic |= self.cyclic;
        if !self.inv_g2.is_empty() {
            c.grid.inv_g2 = self.inv_g2.clone();
            c.operator.inv_g2 = self.inv_g2[0];
        }
        if !self.l.is_empty() {
            c.grid.l = self.l.clone();
            c.operator.l = self.l[0];
        }
        if !self.big_l.is_empty() {
            c.grid.big_l = self.big_l.clone();
            c.operator.big_l = Some(self.big_l[0]);
        }
    }
}
