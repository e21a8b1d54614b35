//! Run configuration: TOML file schema plus flag overrides, resolved into
//! the gate parameters and coupling table the library consumes.
//!
//! Angles in config files and on the command line are in units of pi to
//! avoid transcribing decimal multiples of pi; they are converted to
//! radians here.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Deserialize;

use cugate::device::{coupling_g, parse_device_toml, CavityParams, DeviceParams, TABLE1_TOML};
use cugate::schedule::{CouplingTable, DispersivePair, GateParams, Mode};

/// Built-in uniform coupling used when neither a coupling section nor a
/// device file is given.
pub const DEFAULT_G: f64 = 5.8e9;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub mode: Option<String>,
    pub fock_cutoff: Option<usize>,
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub gate: GateSection,
    pub couplings: Option<CouplingSection>,
    #[serde(default)]
    pub timing: TimingSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Gate angles in units of pi.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSection {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    /// Uniform resonant coupling (rad/s).
    pub g_rad_s: f64,
    /// Atom mode: the target's 1 <-> 2 resonant coupling as a multiple of
    /// `g_rad_s`.
    pub target_swap_scale: Option<f64>,
    /// Off-resonant coupling as a fraction of `g_rad_s` (default 0.5).
    pub offres_ratio: Option<f64>,
    /// Detuning as a multiple of the off-resonant coupling (default 10).
    pub detuning_ratio: Option<f64>,
}

/// Wall-clock annotations used by `timing` and sweep duration columns.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingSection {
    pub tau_a_ns: Option<f64>,
    pub tau_uw_ns: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub report: Option<PathBuf>,
    pub schedule: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text)
            .with_context(|| format!("cannot parse config file {}", path.display()))
    }
}

/// Flag-level overrides shared by the gate-running subcommands.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct GateFlags {
    /// Run configuration file (TOML).
    #[arg(long, value_name = "PATH", global = true)]
    pub config: Option<PathBuf>,

    /// Device parameter file (TOML); defaults to the bundled reference set.
    #[arg(long, value_name = "PATH", global = true)]
    pub device: Option<PathBuf>,

    /// Number of qubits.
    #[arg(long, global = true)]
    pub n: Option<usize>,

    /// Gate angle alpha in units of pi.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,

    /// Gate angle beta in units of pi.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta: Option<f64>,

    /// Gate angle gamma in units of pi.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma: Option<f64>,

    /// Gate angle delta in units of pi.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub delta: Option<f64>,

    /// Hardware mode: squid or atom.
    #[arg(long, global = true)]
    pub mode: Option<String>,

    /// Cavity Fock-space cutoff (highest representable photon number).
    #[arg(long, value_name = "N", global = true)]
    pub fock_cutoff: Option<usize>,

    /// Pass/fail tolerance on the max amplitude error.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    /// Write the report to this file instead of stdout.
    #[arg(long, value_name = "PATH", global = true)]
    pub out: Option<PathBuf>,

    /// Write CSV output to this file instead of stdout.
    #[arg(long, value_name = "PATH", global = true)]
    pub csv: Option<PathBuf>,
}

/// Everything a gate run needs, after merging flags, config file and
/// device file.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub n: usize,
    pub params: GateParams,
    pub mode: Mode,
    pub fock_cutoff: usize,
    pub tolerance: f64,
    pub couplings: CouplingTable,
    /// Coupling actually used for the uniform table (rad/s).
    pub g: f64,
    /// Set when the coupling came from an explicit `[couplings]` section
    /// rather than a device file or the default.
    pub explicit_coupling: bool,
    /// Knobs needed to rebuild the table at a different g or n.
    pub offres_ratio: f64,
    pub detuning_ratio: f64,
    pub swap_scale: f64,
    pub tau_a_ns: Option<f64>,
    pub tau_uw_ns: Option<f64>,
    pub device: Option<(DeviceParams, CavityParams)>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub schedule_out: Option<PathBuf>,
}

/// Uniform coupling table for `n` systems at rate `g`.
pub fn build_couplings(
    n: usize,
    g: f64,
    mode: Mode,
    swap_scale: f64,
    offres_ratio: f64,
    detuning_ratio: f64,
) -> anyhow::Result<CouplingTable> {
    if !(g > 0.0) {
        bail!("coupling must be positive, got {g}");
    }
    let pair = DispersivePair::new(offres_ratio * g, detuning_ratio * offres_ratio * g);
    Ok(match mode {
        Mode::Squid => {
            if (swap_scale - 1.0).abs() > 1e-12 {
                bail!("target_swap_scale != 1 requires atom mode");
            }
            CouplingTable::squid(vec![g; n], pair, pair, pair)
        }
        Mode::Atom => {
            let mut resonant_12 = vec![g; n];
            resonant_12[n - 1] = swap_scale * g;
            CouplingTable::atom(vec![g; n], resonant_12, pair, pair, pair)
        }
    })
}

pub fn resolve(flags: &GateFlags) -> anyhow::Result<ResolvedRun> {
    let config = match &flags.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };

    let device = match &flags.device {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read device file {}", path.display()))?;
            Some(parse_device_toml(&text).context("device file rejected")?)
        }
        None => None,
    };

    let n = flags.n.or(config.n).unwrap_or(2);
    if n < 2 {
        bail!("need at least 2 qubits, got {n}");
    }

    let angle = |flag: Option<f64>, cfg: Option<f64>| flag.or(cfg).unwrap_or(0.0) * PI;
    let params = GateParams::new(
        angle(flags.alpha, config.gate.alpha),
        angle(flags.beta, config.gate.beta),
        angle(flags.gamma, config.gate.gamma),
        angle(flags.delta, config.gate.delta),
    );

    let mode: Mode = flags
        .mode
        .clone()
        .or(config.mode)
        .unwrap_or_else(|| "squid".into())
        .parse()?;

    // Coupling precedence: explicit coupling section, then a device file
    // (rate from the standing-wave formula at the first antinode), then
    // the built-in default.
    let section = config.couplings;
    let g = match (&section, &device) {
        (Some(c), _) => c.g_rad_s,
        (None, Some((dev, cav))) => coupling_g(dev, cav, cav.antinode(0)).abs(),
        (None, None) => DEFAULT_G,
    };
    if !(g > 0.0) {
        bail!("resolved coupling must be positive, got {g}");
    }
    let offres_ratio = section.as_ref().and_then(|c| c.offres_ratio).unwrap_or(0.5);
    let detuning_ratio = section
        .as_ref()
        .and_then(|c| c.detuning_ratio)
        .unwrap_or(10.0);
    let swap_scale = section
        .as_ref()
        .and_then(|c| c.target_swap_scale)
        .unwrap_or(1.0);

    let couplings = build_couplings(n, g, mode, swap_scale, offres_ratio, detuning_ratio)?;

    Ok(ResolvedRun {
        n,
        params,
        mode,
        fock_cutoff: flags.fock_cutoff.or(config.fock_cutoff).unwrap_or(2),
        tolerance: flags.tolerance.or(config.tolerance).unwrap_or(1e-9),
        couplings,
        g,
        explicit_coupling: section.is_some(),
        offres_ratio,
        detuning_ratio,
        swap_scale,
        tau_a_ns: config.timing.tau_a_ns,
        tau_uw_ns: config.timing.tau_uw_ns,
        device,
        out: flags.out.clone().or(config.output.report),
        csv: flags.csv.clone(),
        schedule_out: config.output.schedule,
    })
}

/// Device parameters for `timing`: the flagged file or the bundled set.
pub fn resolve_device(resolved: &ResolvedRun) -> anyhow::Result<(DeviceParams, CavityParams)> {
    match &resolved.device {
        Some(pair) => Ok(pair.clone()),
        None => Ok(parse_device_toml(TABLE1_TOML).expect("bundled device file is valid")),
    }
}
