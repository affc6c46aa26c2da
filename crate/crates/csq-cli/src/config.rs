//! Run configuration: CLI flags merged over an optional key-value config
//! file, with defaults resolved per command.

use std::path::PathBuf;

use clap::Args;
use serde::Deserialize;

/// Flat option set shared by every subcommand. Flags win over config-file
/// values, which win over defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// Model kind: sphere | plane | halfplane | podles | quartic
    #[arg(long)]
    pub model: Option<String>,
    /// Sphere level (also the twice-spin for the SU(2) check)
    #[arg(long)]
    pub n: Option<u32>,
    /// Planck parameter for plane / podles / quartic
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Half-plane integer weight k = 2/hbar
    #[arg(long)]
    pub k: Option<u32>,
    /// Icosphere subdivision level (chern)
    #[arg(long)]
    pub mesh: Option<u32>,
    /// Comma-separated list of levels / partition sizes
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<u64>>,
    /// Sample-point count for verification suites
    #[arg(long)]
    pub samples: Option<usize>,
    /// Seed for sample-set generation
    #[arg(long)]
    pub seed: Option<u64>,
    /// Quadrature tolerance override
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output path stem: writes <out>.json and <out>_<table>.csv
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Closed loop spec for `slice`, e.g. latitude:0.7
    #[arg(long = "loop")]
    pub loop_spec: Option<String>,
    /// Named check selection for `star`: pauli | identities | semiclassical | all
    #[arg(long)]
    pub check: Option<String>,
}

/// The same keys, readable from a TOML config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileOpts {
    pub model: Option<String>,
    pub n: Option<u32>,
    pub hbar: Option<f64>,
    pub k: Option<u32>,
    pub mesh: Option<u32>,
    pub levels: Option<Vec<u64>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    #[serde(rename = "loop")]
    pub loop_spec: Option<String>,
    pub check: Option<String>,
    pub threads: Option<usize>,
}

impl Opts {
    pub fn merge_file(&mut self, file: &FileOpts) {
        macro_rules! fill {
            ($($f:ident),*) => {
                $(if self.$f.is_none() { self.$f = file.$f.clone(); })*
            };
        }
        fill!(model, n, hbar, k, mesh, levels, samples, seed, tol, out, loop_spec, check);
    }
}

/// A fully resolved configuration, echoed verbatim into reports.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Resolved {
    pub command: String,
    pub model: String,
    pub n: u32,
    pub hbar: f64,
    pub k: u32,
    pub mesh: u32,
    pub levels: Vec<u64>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub loop_spec: String,
    pub check: String,
    pub threads: usize,
}

impl Resolved {
    pub fn from(command: &str, o: &Opts, threads: usize) -> Self {
        let default_levels: Vec<u64> = match command {
            "slice" => vec![16, 32, 64, 128],
            _ => vec![4, 8, 16],
        };
        Resolved {
            command: command.into(),
            model: o.model.clone().unwrap_or_else(|| "sphere".into()),
            n: o.n.unwrap_or(match command {
                "star" => 1,
                "slice" => 2,
                _ => 3,
            }),
            hbar: o.hbar.unwrap_or(0.5),
            k: o.k.unwrap_or(2),
            mesh: o.mesh.unwrap_or(3),
            levels: o.levels.clone().unwrap_or(default_levels),
            samples: o.samples.unwrap_or(8),
            seed: o.seed.unwrap_or(0),
            tol: o.tol.unwrap_or(0.0),
            loop_spec: o.loop_spec.clone().unwrap_or_else(|| "latitude:0.7".into()),
            check: o.check.clone().unwrap_or_else(|| "all".into()),
            threads,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
