use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "mlr", version, about = "Build, run and audit measurement-feedback protocols")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a protocol instance and write its circuit JSON.
    Build(BuildArgs),
    /// Build (or load) an instance, check its task and audit its bounds.
    Run(RunArgs),
    /// Run a parameter grid; one row per grid point.
    Sweep(SweepArgs),
    /// Evaluate one bound formula.
    Bound(BoundArgs),
    /// Walk the final logicals back to the start, layer by layer.
    Lightcone(LightconeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProtocolName {
    Stp,
    Estp,
    Bell,
    Ghz,
    W,
    MultiEstp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Stabilizer,
    Dense,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Trajectory,
    Enumerate,
    ExplicitDilation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum WModeArg {
    Unitary,
    #[default]
    Estp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SabotageArg {
    StripFeedback,
    StretchRegions(usize),
    ShareMeasurement,
}

impl FromStr for SabotageArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "strip-feedback" => Ok(Self::StripFeedback),
            "share-measurement" => Ok(Self::ShareMeasurement),
            "stretch-regions" => Ok(Self::StretchRegions(1)),
            _ => match s.strip_prefix("stretch-regions:") {
                Some(k) => k.parse().map(Self::StretchRegions).map_err(|e| format!("bad stretch amount {k:?}: {e}")),
                None => Err(format!(
                    "unknown sabotage {s:?} (strip-feedback, stretch-regions[:k], share-measurement)"
                )),
            },
        }
    }
}

/// Parameters of a single protocol instance.
#[derive(Args, Debug, Clone, Default)]
pub struct InstanceArgs {
    /// Number of measured regions.
    #[arg(long)]
    pub m: Option<usize>,
    /// Depth budget.
    #[arg(long)]
    pub t: Option<usize>,
    /// GHZ patch size.
    #[arg(long)]
    pub ell: Option<usize>,
    /// Number of lanes.
    #[arg(long)]
    pub q: Option<usize>,
    /// W state on 2^n sites.
    #[arg(long)]
    pub n: Option<usize>,
    /// ESTP measuring in the Bell basis.
    #[arg(long)]
    pub bell_basis: bool,
    /// Extra sites between ESTP regions, schedule unchanged.
    #[arg(long, default_value_t = 0)]
    pub extra_spacing: usize,
    /// Bell distillation with the Z correction on even parity.
    #[arg(long)]
    pub flip: bool,
    #[arg(long, value_enum, default_value_t = WModeArg::Estp)]
    pub w_mode: WModeArg,
    #[arg(long)]
    pub sabotage: Option<SabotageArg>,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[arg(value_enum)]
    pub protocol: ProtocolName,
    #[command(flatten)]
    pub inst: InstanceArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// How an instance is executed and audited.
#[derive(Args, Debug, Clone)]
pub struct ExecArgs {
    /// Defaults to stabilizer, or dense for explicit dilation.
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    #[arg(long, value_enum, default_value_t = ModeArg::Enumerate)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Enumeration cap.
    #[arg(long, default_value_t = 1 << 16)]
    pub max_branches: usize,
    /// Qubit cap for explicit dilation, registers included.
    #[arg(long, default_value_t = mlr_core::dense::DEFAULT_QUBIT_BUDGET)]
    pub qubit_budget: usize,
    /// Lieb-Robinson velocity used by the audit.
    #[arg(long, default_value_t = 1.0)]
    pub v: f64,
    /// Constant of the Dicke bound.
    #[arg(long, default_value_t = 0.0)]
    pub c: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Omit when loading `--circuit`.
    #[arg(value_enum, required_unless_present = "circuit")]
    pub protocol: Option<ProtocolName>,
    #[command(flatten)]
    pub inst: InstanceArgs,
    /// Instance JSON written by `build`.
    #[arg(long, conflicts_with = "protocol")]
    pub circuit: Option<PathBuf>,
    #[command(flatten)]
    pub exec: ExecArgs,
}

/// Inclusive range `a..b`, a list `a,b,c` or a single value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid(pub Vec<usize>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("bad grid value {x:?}: {e}"));
        let v = match s.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b.trim_start_matches('=')).map_err(|e| e.to_string())?);
                if a > b {
                    return Err(format!("empty range {s:?}"));
                }
                (a..=b).collect()
            }
            None => s.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        };
        Ok(Self(v))
    }
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub protocol: ProtocolName,
    #[arg(long)]
    pub m: Option<Grid>,
    #[arg(long)]
    pub t: Option<Grid>,
    #[arg(long)]
    pub ell: Option<Grid>,
    #[arg(long)]
    pub q: Option<Grid>,
    #[arg(long)]
    pub n: Option<Grid>,
    /// W modes to sweep.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "estp")]
    pub w_mode: Vec<WModeArg>,
    #[arg(long)]
    pub bell_basis: bool,
    #[arg(long, default_value_t = 0)]
    pub extra_spacing: usize,
    #[arg(long)]
    pub flip: bool,
    #[arg(long)]
    pub sabotage: Option<SabotageArg>,
    #[command(flatten)]
    pub exec: ExecArgs,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    /// Bound name, e.g. main, estp, ghz, w, multiq-adaptive.
    pub kind: String,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub m0: Option<i64>,
    #[arg(long)]
    pub t: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<i64>,
    #[arg(long)]
    pub v: Option<f64>,
    #[arg(long)]
    pub d: Option<u64>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub n_obs: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub n_obs0: Option<i64>,
    #[arg(long)]
    pub dim: Option<u64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub d_x: Option<u64>,
    #[arg(long)]
    pub d_z: Option<u64>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub m0_prime: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t0_prime: Option<i64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LightconeArgs {
    #[arg(value_enum, required_unless_present = "circuit")]
    pub protocol: Option<ProtocolName>,
    #[command(flatten)]
    pub inst: InstanceArgs,
    #[arg(long, conflicts_with = "protocol")]
    pub circuit: Option<PathBuf>,
    /// Lane whose logicals are tracked (0-based).
    #[arg(long, default_value_t = 0)]
    pub lane: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!("0..4".parse::<Grid>().unwrap(), Grid(vec![0, 1, 2, 3, 4]));
        assert_eq!("0..=2".parse::<Grid>().unwrap(), Grid(vec![0, 1, 2]));
        assert_eq!("2,4,6".parse::<Grid>().unwrap(), Grid(vec![2, 4, 6]));
        assert_eq!("3".parse::<Grid>().unwrap(), Grid(vec![3]));
        assert!("4..1".parse::<Grid>().is_err());
        assert!("a".parse::<Grid>().is_err());
    }

    #[test]
    fn sabotage_names() {
        assert_eq!("stretch-regions".parse::<SabotageArg>().unwrap(), SabotageArg::StretchRegions(1));
        assert_eq!("stretch-regions:3".parse::<SabotageArg>().unwrap(), SabotageArg::StretchRegions(3));
        assert!("melt".parse::<SabotageArg>().is_err());
    }

    #[test]
    fn cli_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
