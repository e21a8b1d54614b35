//! Gate parameters, coupling tables and the compiled pulse schedule,
//! including its flat text serialization.
//!
//! Step durations are stored canonically in nanoseconds. The text format
//! round-trips byte-exactly: serializing, parsing and serializing again
//! yields the identical byte string (float fields are printed with the
//! shortest representation that parses back to the same value).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::propagators::{DispersiveSpec, DriveSpec, PulseSpec, ResonantSpec, Transition};

/// Hardware realization of the protocol. The schedule structure is the
/// same in both modes; atom mode allows the target's 1 <-> 2 resonant
/// coupling to differ from its 0 <-> 2 coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Squid,
    Atom,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Squid => write!(f, "squid"),
            Mode::Atom => write!(f, "atom"),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squid" => Ok(Mode::Squid),
            "atom" => Ok(Mode::Atom),
            other => Err(Error::InvalidSpec(format!("unknown mode '{other}'"))),
        }
    }
}

/// Euler angles of the target single-qubit unitary
/// `U = e^{i alpha} R_z(beta) R_y(gamma) R_z(delta)`, in radians.
///
/// Allowed ranges: `gamma/2` in `[0, 2 pi]`, `alpha`, `beta/2`, `delta/2`
/// in `[-pi, pi]`. Negative `alpha`, `beta`, `delta` compile to
/// opposite-sign detunings on the corresponding dispersive steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl GateParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        use std::f64::consts::PI;
        let eps = 1e-12;
        if self.alpha.abs() > PI + eps {
            return Err(Error::InvalidAngle(format!(
                "alpha = {} outside [-pi, pi]",
                self.alpha
            )));
        }
        if self.beta.abs() > 2.0 * PI + eps {
            return Err(Error::InvalidAngle(format!(
                "beta = {} outside [-2 pi, 2 pi]",
                self.beta
            )));
        }
        if self.delta.abs() > 2.0 * PI + eps {
            return Err(Error::InvalidAngle(format!(
                "delta = {} outside [-2 pi, 2 pi]",
                self.delta
            )));
        }
        if !(-eps..=4.0 * PI + eps).contains(&self.gamma) {
            return Err(Error::InvalidAngle(format!(
                "gamma = {} outside [0, 4 pi]",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// An off-resonant coupling and its detuning magnitude (both rad/s).
/// The compiler picks the detuning sign per step from the angle signs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersivePair {
    pub g: f64,
    pub detuning: f64,
}

impl DispersivePair {
    pub fn new(g: f64, detuning: f64) -> Self {
        Self { g, detuning }
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !(self.g > 0.0) || !(self.detuning > 0.0) {
            return Err(Error::IncompleteCouplings(format!(
                "{what}: coupling and detuning magnitude must be positive (g = {}, detuning = {})",
                self.g, self.detuning
            )));
        }
        let ratio = self.detuning / self.g;
        if ratio < crate::propagators::DISPERSIVE_GUARD_RATIO {
            return Err(Error::DispersiveGuard {
                ratio,
                min: crate::propagators::DISPERSIVE_GUARD_RATIO,
            });
        }
        Ok(())
    }
}

/// All coupling rates the compiler needs for an n-system gate.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTable {
    /// Resonant 0 <-> 2 coupling g_l per system (rad/s).
    pub resonant_02: Vec<f64>,
    /// Resonant 1 <-> 2 coupling per system; equals `resonant_02` in SQUID
    /// mode, independently specified in atom mode.
    pub resonant_12: Vec<f64>,
    /// Dispersive pair for the target's z-rotation phase steps (0 <-> 2,
    /// nominally blue-detuned).
    pub zrot: DispersivePair,
    /// Dispersive pair for the common-phase step on 0 <-> 2.
    pub phase_02: DispersivePair,
    /// Dispersive pair for the common-phase step on 1 <-> 2.
    pub phase_12: DispersivePair,
    /// Whether negative angles may flip detuning signs. Devices that pin
    /// the detuning sign reject negative alpha/beta/delta at compile time.
    pub allow_detuning_flip: bool,
}

impl CouplingTable {
    /// SQUID-mode table: the 1 <-> 2 resonant coupling equals the 0 <-> 2
    /// one for every system.
    pub fn squid(
        resonant: Vec<f64>,
        zrot: DispersivePair,
        phase_02: DispersivePair,
        phase_12: DispersivePair,
    ) -> Self {
        Self {
            resonant_12: resonant.clone(),
            resonant_02: resonant,
            zrot,
            phase_02,
            phase_12,
            allow_detuning_flip: true,
        }
    }

    /// Atom-mode table with independent 1 <-> 2 resonant couplings.
    pub fn atom(
        resonant_02: Vec<f64>,
        resonant_12: Vec<f64>,
        zrot: DispersivePair,
        phase_02: DispersivePair,
        phase_12: DispersivePair,
    ) -> Self {
        Self {
            resonant_02,
            resonant_12,
            zrot,
            phase_02,
            phase_12,
            allow_detuning_flip: true,
        }
    }

    /// Identical couplings everywhere with the usual rough dispersive
    /// choices: off-resonant coupling 0.5 g, detuning 10x that.
    pub fn uniform_squid(n: usize, g: f64) -> Self {
        let pair = DispersivePair::new(0.5 * g, 5.0 * g);
        Self::squid(vec![g; n], pair, pair, pair)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.resonant_02.len() != n {
            return Err(Error::IncompleteCouplings(format!(
                "need {n} resonant 0-2 couplings, got {}",
                self.resonant_02.len()
            )));
        }
        if self.resonant_12.len() != n {
            return Err(Error::IncompleteCouplings(format!(
                "need {n} resonant 1-2 couplings, got {}",
                self.resonant_12.len()
            )));
        }
        for (i, &g) in self
            .resonant_02
            .iter()
            .chain(self.resonant_12.iter())
            .enumerate()
        {
            if !(g > 0.0) {
                return Err(Error::IncompleteCouplings(format!(
                    "resonant coupling entry {i} must be positive, got {g}"
                )));
            }
        }
        self.zrot.validate("zrot pair")?;
        self.phase_02.validate("phase_02 pair")?;
        self.phase_12.validate("phase_12 pair")?;
        Ok(())
    }
}

/// One scheduled elementary operation.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseOp {
    /// Human-readable step label, e.g. `U_1`, `U_2c`, `U_nc.05_ry_gamma`.
    pub label: String,
    pub spec: PulseSpec,
    /// Wall-clock duration in nanoseconds (canonical representation).
    pub duration_ns: f64,
}

/// Ordered pulse schedule realizing one controlled-U gate, with timing
/// annotations for the level-spacing (or cavity-frequency) adjustments
/// between steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub mode: Mode,
    pub n_qubits: usize,
    pub steps: Vec<PulseOp>,
    /// Number of adjustment intervals, `2n + 9`.
    pub adjustment_count: usize,
    /// Duration of one adjustment (ns); zero until timing is attached.
    pub adjustment_time_ns: f64,
    /// Nominal microwave pi-pulse duration (ns) applied to drive steps.
    pub drive_time_ns: f64,
}

impl Schedule {
    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// Sum of step durations plus the adjustment annotations, in ns.
    pub fn total_duration_ns(&self) -> f64 {
        let steps: f64 = self.steps.iter().map(|s| s.duration_ns).sum();
        steps + self.adjustment_count as f64 * self.adjustment_time_ns
    }

    /// Attach wall-clock timing: every adjustment interval takes
    /// `tau_a_ns`, every drive step `tau_uw_ns`.
    pub fn with_timing(mut self, tau_a_ns: f64, tau_uw_ns: f64) -> Self {
        self.adjustment_time_ns = tau_a_ns;
        self.drive_time_ns = tau_uw_ns;
        for step in &mut self.steps {
            if matches!(step.spec, PulseSpec::Drive(_)) {
                step.duration_ns = tau_uw_ns;
            }
        }
        self
    }

    /// Serialize to the flat text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("cugate-schedule v1\n");
        out.push_str(&format!("mode {}\n", self.mode));
        out.push_str(&format!("qubits {}\n", self.n_qubits));
        out.push_str(&format!("adjustments {}\n", self.adjustment_count));
        out.push_str(&format!("adjustment-ns {}\n", self.adjustment_time_ns));
        out.push_str(&format!("drive-ns {}\n", self.drive_time_ns));
        for step in &self.steps {
            out.push_str(&step_line(step));
            out.push('\n');
        }
        out
    }

    /// Parse the flat text format produced by [`Schedule::to_text`].
    pub fn parse(text: &str) -> Result<Schedule> {
        let mut lines = text.lines().enumerate();
        let mut header = |expected: &str| -> Result<String> {
            let (n, line) = lines.next().ok_or_else(|| Error::ScheduleParse {
                line: 0,
                message: format!("missing '{expected}' header"),
            })?;
            let (key, value) = line.split_once(' ').ok_or_else(|| Error::ScheduleParse {
                line: n + 1,
                message: format!("expected '{expected} <value>'"),
            })?;
            if key != expected {
                return Err(Error::ScheduleParse {
                    line: n + 1,
                    message: format!("expected '{expected}', found '{key}'"),
                });
            }
            Ok(value.to_string())
        };

        let version = header("cugate-schedule")?;
        if version != "v1" {
            return Err(Error::ScheduleParse {
                line: 1,
                message: format!("unsupported version '{version}'"),
            });
        }
        let mode: Mode = header("mode")?.parse()?;
        let n_qubits = parse_field::<usize>(&header("qubits")?, 3, "qubits")?;
        let adjustment_count = parse_field::<usize>(&header("adjustments")?, 4, "adjustments")?;
        let adjustment_time_ns = parse_field::<f64>(&header("adjustment-ns")?, 5, "adjustment-ns")?;
        let drive_time_ns = parse_field::<f64>(&header("drive-ns")?, 6, "drive-ns")?;

        let mut steps = Vec::new();
        for (n, line) in lines {
            if line.is_empty() {
                continue;
            }
            steps.push(parse_step_line(line, n + 1)?);
        }
        Ok(Schedule {
            mode,
            n_qubits,
            steps,
            adjustment_count,
            adjustment_time_ns,
            drive_time_ns,
        })
    }
}

fn transition_token(t: Transition) -> &'static str {
    match t {
        Transition::ZeroTwo => "0-2",
        Transition::OneTwo => "1-2",
    }
}

fn step_line(step: &PulseOp) -> String {
    // Systems are printed 1-based to match the step labels.
    match &step.spec {
        PulseSpec::Resonant(s) => format!(
            "step label={} kind=resonant system={} transition={} g={} duration-ns={}",
            step.label,
            s.system + 1,
            transition_token(s.transition),
            s.g,
            step.duration_ns
        ),
        PulseSpec::Dispersive(s) => format!(
            "step label={} kind=dispersive system={} transition={} g={} detuning={} duration-ns={}",
            step.label,
            s.system + 1,
            transition_token(s.transition),
            s.g,
            s.detuning,
            step.duration_ns
        ),
        PulseSpec::Drive(s) => format!(
            "step label={} kind=drive system={} transition={} phase={} area={} duration-ns={}",
            step.label,
            s.system + 1,
            transition_token(s.transition),
            s.phase,
            s.area,
            step.duration_ns
        ),
    }
}

fn parse_field<T: FromStr>(value: &str, line: usize, key: &str) -> Result<T> {
    value.parse::<T>().map_err(|_| Error::ScheduleParse {
        line,
        message: format!("cannot parse {key} value '{value}'"),
    })
}

fn parse_step_line(line: &str, lineno: usize) -> Result<PulseOp> {
    let mut tokens = line.split(' ');
    if tokens.next() != Some("step") {
        return Err(Error::ScheduleParse {
            line: lineno,
            message: "expected 'step' record".into(),
        });
    }
    let mut label = None;
    let mut kind = None;
    let mut system = None;
    let mut transition = None;
    let mut g = None;
    let mut detuning = None;
    let mut phase = None;
    let mut area = None;
    let mut duration_ns = None;

    for token in tokens {
        let (key, value) = token.split_once('=').ok_or_else(|| Error::ScheduleParse {
            line: lineno,
            message: format!("malformed token '{token}'"),
        })?;
        match key {
            "label" => label = Some(value.to_string()),
            "kind" => kind = Some(value.to_string()),
            "system" => system = Some(parse_field::<usize>(value, lineno, "system")?),
            "transition" => {
                transition = Some(match value {
                    "0-2" => Transition::ZeroTwo,
                    "1-2" => Transition::OneTwo,
                    other => {
                        return Err(Error::ScheduleParse {
                            line: lineno,
                            message: format!("unknown transition '{other}'"),
                        })
                    }
                })
            }
            "g" => g = Some(parse_field::<f64>(value, lineno, "g")?),
            "detuning" => detuning = Some(parse_field::<f64>(value, lineno, "detuning")?),
            "phase" => phase = Some(parse_field::<f64>(value, lineno, "phase")?),
            "area" => area = Some(parse_field::<f64>(value, lineno, "area")?),
            "duration-ns" => duration_ns = Some(parse_field::<f64>(value, lineno, "duration-ns")?),
            other => {
                return Err(Error::ScheduleParse {
                    line: lineno,
                    message: format!("unknown field '{other}'"),
                })
            }
        }
    }

    let missing = |what: &str| Error::ScheduleParse {
        line: lineno,
        message: format!("missing field '{what}'"),
    };
    let label = label.ok_or_else(|| missing("label"))?;
    let kind = kind.ok_or_else(|| missing("kind"))?;
    let system_1based = system.ok_or_else(|| missing("system"))?;
    if system_1based == 0 {
        return Err(Error::ScheduleParse {
            line: lineno,
            message: "system indices are 1-based".into(),
        });
    }
    let system = system_1based - 1;
    let transition = transition.ok_or_else(|| missing("transition"))?;
    let duration_ns = duration_ns.ok_or_else(|| missing("duration-ns"))?;
    let t = duration_ns * 1e-9;

    let spec = match kind.as_str() {
        "resonant" => PulseSpec::Resonant(ResonantSpec {
            system,
            transition,
            g: g.ok_or_else(|| missing("g"))?,
            t,
        }),
        "dispersive" => PulseSpec::Dispersive(DispersiveSpec {
            system,
            transition,
            g: g.ok_or_else(|| missing("g"))?,
            detuning: detuning.ok_or_else(|| missing("detuning"))?,
            t,
        }),
        "drive" => PulseSpec::Drive(DriveSpec {
            system,
            transition,
            phase: phase.ok_or_else(|| missing("phase"))?,
            area: area.ok_or_else(|| missing("area"))?,
        }),
        other => {
            return Err(Error::ScheduleParse {
                line: lineno,
                message: format!("unknown step kind '{other}'"),
            })
        }
    };

    Ok(PulseOp {
        label,
        spec,
        duration_ns,
    })
}
