//! Command-line front end: compile, simulate and verify controlled-U
//! pulse schedules, evaluate device feasibility, compare step counts and
//! sweep parameters.
//!
//! Exit status: 0 = pass, 1 = verification failure, 2 = usage or
//! configuration error.

// Validation guards use `!(x > 0.0)` so NaN is rejected along with
// non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use cugate::compiler::{compile_controlled_u, replay_trace};
use cugate::device::{
    coupling_g, crossover, decoherence_margin, leakage_estimate, mutual_inductance_dipole,
    step_counts, total_time, LoopGeometry, TimingParams,
};
use cugate::hilbert::HilbertLayout;
use cugate::verifier::verify_controlled_u;

use config::{resolve, resolve_device, GateFlags, ResolvedRun};
use report::{fmt_float, fmt_state, Report};

#[derive(Parser)]
#[command(
    name = "cugate",
    version,
    about = "Pulse-level compiler, simulator and feasibility analyzer for cavity-mediated n-qubit controlled-U gates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile the gate, simulate the schedule and compare with the ideal unitary.
    Verify {
        #[command(flatten)]
        flags: GateFlags,
        /// Also print the grouped-operator snapshot table (3 qubits only).
        #[arg(long)]
        trace: bool,
    },
    /// Device feasibility: coupling rate, characteristic times, operation-time budget, margins.
    Timing {
        #[command(flatten)]
        flags: GateFlags,
    },
    /// Step-count table versus network decompositions, for n in [N_MIN, N_MAX].
    Counts {
        /// Smallest qubit count (>= 3).
        n_min: usize,
        /// Largest qubit count.
        n_max: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Sweep one parameter; one CSV row per point.
    Sweep {
        #[command(flatten)]
        flags: GateFlags,
        /// One of: alpha, beta, gamma, delta (units of pi), g (rad/s), n, fock-cutoff.
        #[arg(long)]
        param: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        /// Number of sweep points; 0 emits a header-only CSV.
        #[arg(long, default_value_t = 0)]
        points: usize,
    },
    /// Grouped-operator snapshot table for the 3-qubit gate.
    Trace {
        #[command(flatten)]
        flags: GateFlags,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Verify { flags, trace } => cmd_verify(&flags, trace),
        Command::Timing { flags } => cmd_timing(&flags),
        Command::Counts { n_min, n_max, csv } => cmd_counts(n_min, n_max, csv.as_deref()),
        Command::Sweep {
            flags,
            param,
            from,
            to,
            points,
        } => cmd_sweep(&flags, &param, from, to, points),
        Command::Trace { mut flags } => {
            flags.n = Some(flags.n.unwrap_or(3));
            cmd_trace(&flags)
        }
    }
}

fn emit(text: &str, path: Option<&std::path::Path>) -> anyhow::Result<()> {
    match path {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn cmd_verify(flags: &GateFlags, trace: bool) -> anyhow::Result<ExitCode> {
    let run = resolve(flags)?;
    if trace && run.n != 3 {
        bail!("--trace requires a 3-qubit gate, got n = {}", run.n);
    }

    let result = verify_controlled_u(
        run.n,
        &run.params,
        &run.couplings,
        run.mode,
        run.fock_cutoff,
        run.tolerance,
    )?;

    let mut rep = Report::new("verify");
    rep.field("n", run.n.to_string())
        .field("mode", run.mode.to_string())
        .field("steps", result.steps.to_string())
        .field("fock_cutoff", run.fock_cutoff.to_string())
        .field("coupling_rad_s", fmt_float(run.g))
        .field("tolerance", fmt_float(run.tolerance))
        .field("max_entry_error", fmt_float(result.max_entry_error))
        .field("fidelity", fmt_float(result.fidelity))
        .field("leakage", fmt_float(result.leakage))
        .field("vacuum_residual", fmt_float(result.vacuum_residual))
        .field("level2_residue", fmt_float(result.level2_residue));
    rep.nested("per_state_max_error");
    for (bits, err) in result.per_state_error.iter().enumerate() {
        let label: String = (0..run.n)
            .map(|i| {
                if (bits >> (run.n - 1 - i)) & 1 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect();
        rep.nested_field(&format!("|{label}>"), fmt_float(*err));
    }
    rep.field("status", if result.pass { "pass" } else { "fail" });

    let mut text = rep.render();
    if trace {
        text.push_str(&render_trace(&run)?);
    }
    emit(&text, run.out.as_deref())?;

    if let Some(path) = &run.schedule_out {
        let schedule = compile_controlled_u(run.n, &run.params, &run.couplings, run.mode)?
            .with_timing(run.tau_a_ns.unwrap_or(0.0), run.tau_uw_ns.unwrap_or(0.0));
        std::fs::write(path, schedule.to_text())
            .with_context(|| format!("cannot write {}", path.display()))?;
    }

    Ok(if result.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_timing(flags: &GateFlags) -> anyhow::Result<ExitCode> {
    let run = resolve(flags)?;
    let (device, cavity) = resolve_device(&run)?;

    // An explicit [couplings] section pins the rate; otherwise it comes
    // from the standing-wave formula at the first antinode.
    let g_device = coupling_g(&device, &cavity, cavity.antinode(0)).abs();
    let g = if run.explicit_coupling {
        run.g
    } else {
        g_device
    };
    let mut timing = TimingParams::squid_defaults(g);
    if let Some(tau_a_ns) = run.tau_a_ns {
        timing.tau_a = tau_a_ns * 1e-9;
    }
    if let Some(tau_uw_ns) = run.tau_uw_ns {
        timing.tau_uw = tau_uw_ns * 1e-9;
    }

    let n = run.n;
    let params = run.params;
    let tau = total_time(n, &params, &timing)?;
    let margin = decoherence_margin(tau, &device, &cavity);
    let kappa_inv = cavity.kappa_inv();

    let separation = cavity.wavelength / 2.0;
    let m_ss = mutual_inductance_dipole(
        device.loop_area,
        device.loop_area,
        separation,
        LoopGeometry::Coplanar,
    )?;
    let m_ratio = m_ss / cavity.mutual_inductance;

    // Worst idle-system leakage for a transition parked at the dispersive
    // detuning used by the schedule.
    let g_off = run.offres_ratio * g;
    let idle_leakage = leakage_estimate(g_off, run.detuning_ratio * g_off);

    let ns = 1e-9;
    let mut rep = Report::new("timing");
    rep.field("n", n.to_string())
        .field("alpha_rad", fmt_float(params.alpha))
        .field("beta_rad", fmt_float(params.beta))
        .field("gamma_rad", fmt_float(params.gamma))
        .field("delta_rad", fmt_float(params.delta))
        .field("coupling_rad_s", fmt_float(g))
        .field("coupling_from_device_rad_s", fmt_float(g_device))
        .field("tau_c1_ns", fmt_float(timing.tau_c1 / ns))
        .field("tau_c2_ns", fmt_float(timing.tau_c2 / ns))
        .field("tau_c3_ns", fmt_float(timing.tau_c3 / ns))
        .field("tau_a_ns", fmt_float(timing.tau_a / ns))
        .field("tau_uw_ns", fmt_float(timing.tau_uw / ns));
    rep.nested("budget_ns");
    let resonant = (2.0 * n as f64 + params.gamma / std::f64::consts::TAU) * timing.tau_c1;
    let phase = 2.0 * params.alpha.abs() * timing.tau_c2;
    let zrot = (params.beta.abs() + params.delta.abs()) * timing.tau_c3;
    let adjust = (2 * n + 9) as f64 * timing.tau_a;
    let pulses = 4.0 * timing.tau_uw;
    rep.nested_field("resonant", fmt_float(resonant / ns))
        .nested_field("common_phase", fmt_float(phase / ns))
        .nested_field("z_rotations", fmt_float(zrot / ns))
        .nested_field("adjustments", fmt_float(adjust / ns))
        .nested_field("pulses", fmt_float(pulses / ns))
        .nested_field("total", fmt_float(tau / ns));
    rep.field("kappa_inv_us", fmt_float(kappa_inv / 1e-6))
        .field("gamma2_inv_us", fmt_float(device.gamma2_inv / 1e-6));
    rep.nested("margins");
    rep.nested_field("tau_times_gamma2", fmt_float(margin.ratio_gamma2))
        .nested_field("tau_times_kappa", fmt_float(margin.ratio_kappa))
        .nested_field("pass", if margin.pass { "true" } else { "false" });
    rep.nested("neighbor_coupling");
    rep.nested_field("separation_mm", fmt_float(separation / 1e-3))
        .nested_field("m_ss_dipole_h", fmt_float(m_ss))
        .nested_field("m_ss_over_m_sc", fmt_float(m_ratio))
        .nested_field("negligible", if m_ratio < 1e-3 { "true" } else { "false" });
    rep.field("idle_leakage_estimate", fmt_float(idle_leakage));

    emit(&rep.render(), run.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_counts(
    n_min: usize,
    n_max: usize,
    csv: Option<&std::path::Path>,
) -> anyhow::Result<ExitCode> {
    if n_min < 3 {
        bail!("counts needs n_min >= 3 (the network formulas start there), got {n_min}");
    }
    if n_min > n_max {
        bail!("empty range: n_min {n_min} > n_max {n_max}");
    }
    let mut out = String::from("n,this_work,barenco,bergholm\n");
    for n in n_min..=n_max {
        let c = step_counts(n)?;
        out.push_str(&format!(
            "{},{},{},{}\n",
            c.n, c.this_work, c.barenco, c.bergholm
        ));
    }
    match crossover(n_min, n_max)? {
        Some(n) => out.push_str(&format!("# crossover: this protocol wins from n = {n}\n")),
        None => out.push_str("# crossover: not reached in this range\n"),
    }
    emit(&out, csv)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(
    flags: &GateFlags,
    param: &str,
    from: f64,
    to: f64,
    points: usize,
) -> anyhow::Result<ExitCode> {
    let base = resolve(flags)?;
    let values: Vec<f64> = if points == 0 {
        Vec::new()
    } else if points == 1 {
        vec![from]
    } else {
        (0..points)
            .map(|i| from + (to - from) * i as f64 / (points - 1) as f64)
            .collect()
    };

    let mut out = String::from(
        "param,value,steps,fidelity,max_entry_error,leakage,vacuum_residual,level2_residue,duration_ns\n",
    );
    for value in values {
        let (run, printed) = sweep_point(&base, param, value)?;
        let result = verify_controlled_u(
            run.n,
            &run.params,
            &run.couplings,
            run.mode,
            run.fock_cutoff,
            run.tolerance,
        )?;
        let schedule = compile_controlled_u(run.n, &run.params, &run.couplings, run.mode)?
            .with_timing(run.tau_a_ns.unwrap_or(0.0), run.tau_uw_ns.unwrap_or(0.0));
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            param,
            printed,
            result.steps,
            fmt_float(result.fidelity),
            fmt_float(result.max_entry_error),
            fmt_float(result.leakage),
            fmt_float(result.vacuum_residual),
            fmt_float(result.level2_residue),
            fmt_float(schedule.total_duration_ns()),
        ));
    }
    emit(&out, base.csv.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

/// One sweep point: the base run with a single parameter replaced.
fn sweep_point(
    base: &ResolvedRun,
    param: &str,
    value: f64,
) -> anyhow::Result<(ResolvedRun, String)> {
    use std::f64::consts::PI;
    let mut run = base.clone();
    let printed;
    match param {
        "alpha" | "beta" | "gamma" | "delta" => {
            let radians = value * PI;
            match param {
                "alpha" => run.params.alpha = radians,
                "beta" => run.params.beta = radians,
                "gamma" => run.params.gamma = radians,
                _ => run.params.delta = radians,
            }
            printed = fmt_float(value);
        }
        "g" => {
            run.g = value;
            run.couplings = config::build_couplings(
                run.n,
                value,
                run.mode,
                run.swap_scale,
                run.offres_ratio,
                run.detuning_ratio,
            )?;
            printed = fmt_float(value);
        }
        "n" => {
            let n = value.round() as usize;
            if n < 2 {
                bail!("swept n must be >= 2, got {n}");
            }
            run.n = n;
            run.couplings = config::build_couplings(
                n,
                run.g,
                run.mode,
                run.swap_scale,
                run.offres_ratio,
                run.detuning_ratio,
            )?;
            printed = n.to_string();
        }
        "fock-cutoff" | "fock_cutoff" => {
            let cutoff = value.round() as usize;
            if cutoff < 1 {
                bail!("swept fock cutoff must be >= 1, got {cutoff}");
            }
            run.fock_cutoff = cutoff;
            printed = cutoff.to_string();
        }
        other => bail!(
            "'{other}' is not sweepable; choose alpha, beta, gamma, delta, g, n or fock-cutoff"
        ),
    }
    Ok((run, printed))
}

fn render_trace(run: &ResolvedRun) -> anyhow::Result<String> {
    let layout = HilbertLayout::new(3, run.fock_cutoff)?;
    let rows = replay_trace(&run.params, &run.couplings, run.mode, &layout)?;
    let mut rep = Report::new("trace");
    for row in &rows {
        let digits: String = row.initial.iter().map(|b| char::from(b'0' + b)).collect();
        rep.nested(&format!("initial |{digits}>|0>c"));
        for (label, state) in &row.snapshots {
            rep.nested_field(label, fmt_state(state));
        }
    }
    Ok(rep.render())
}

fn cmd_trace(flags: &GateFlags) -> anyhow::Result<ExitCode> {
    let run = resolve(flags)?;
    if run.n != 3 {
        bail!("trace replay is defined for 3 qubits, got n = {}", run.n);
    }
    let text = render_trace(&run)?;
    emit(&text, run.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}
