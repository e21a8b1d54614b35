//! Exact time-evolution operators for the three elementary interactions:
//! resonant exchange with the cavity mode, dispersive (photon-number
//! dependent) phase accumulation, and a resonant classical drive.
//!
//! Each propagator is available in closed form (as a dense matrix or as a
//! fast structured application to a state) and through a matrix-exponential
//! oracle of the underlying interaction-picture Hamiltonian. Rates are in
//! rad/s, times in seconds, hbar = 1.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expm::matrix_exp;
use crate::hilbert::{HilbertLayout, OperatorMatrix, StateVector};

/// Minimum |detuning| / g ratio accepted by the dispersive propagator.
pub const DISPERSIVE_GUARD_RATIO: f64 = 5.0;

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

/// One of the two allowed transitions of a Lambda-type three-level system.
/// The 0 <-> 1 transition is never driven; it is not representable here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    /// |0> <-> |2>
    ZeroTwo,
    /// |1> <-> |2>
    OneTwo,
}

impl Transition {
    /// The lower level of the transition (the upper level is always |2>).
    pub fn lower(self) -> u8 {
        match self {
            Transition::ZeroTwo => 0,
            Transition::OneTwo => 1,
        }
    }

    /// The level not involved in the transition.
    pub fn spectator(self) -> u8 {
        match self {
            Transition::ZeroTwo => 1,
            Transition::OneTwo => 0,
        }
    }
}

/// Resonant cavity coupling of one system's transition for a fixed time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantSpec {
    /// Addressed system, 0-based.
    pub system: usize,
    pub transition: Transition,
    /// Coupling rate g (rad/s), > 0.
    pub g: f64,
    /// Interaction time (s), >= 0.
    pub t: f64,
}

impl ResonantSpec {
    fn validate(&self, layout: HilbertLayout) -> Result<()> {
        check_system(layout, self.system)?;
        if !(self.g > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "resonant coupling must be positive, got {}",
                self.g
            )));
        }
        if self.t < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "interaction time must be non-negative, got {}",
                self.t
            )));
        }
        Ok(())
    }
}

/// Off-resonant (dispersive) cavity coupling of one system's transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersiveSpec {
    pub system: usize,
    pub transition: Transition,
    /// Off-resonant coupling rate (rad/s), > 0.
    pub g: f64,
    /// Signed detuning, omega_transition - omega_cavity (rad/s).
    pub detuning: f64,
    /// Interaction time (s), >= 0.
    pub t: f64,
}

impl DispersiveSpec {
    fn validate(&self, layout: HilbertLayout, min_ratio: f64) -> Result<()> {
        check_system(layout, self.system)?;
        if !(self.g > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "dispersive coupling must be positive, got {}",
                self.g
            )));
        }
        if self.t < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "interaction time must be non-negative, got {}",
                self.t
            )));
        }
        let ratio = self.detuning.abs() / self.g;
        if ratio < min_ratio {
            return Err(Error::DispersiveGuard {
                ratio,
                min: min_ratio,
            });
        }
        Ok(())
    }

    /// Photon-number phase rate g^2 / detuning (rad/s), sign included.
    pub fn shift_rate(&self) -> f64 {
        self.g * self.g / self.detuning
    }
}

/// Resonant classical pulse on one system's transition, parameterized by
/// its area Omega * t and carrier phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    pub system: usize,
    /// Always 1 <-> 2 in the compiled protocol; kept general here.
    pub transition: Transition,
    /// Carrier phase phi (rad).
    pub phase: f64,
    /// Pulse area Omega * t (rad), >= 0.
    pub area: f64,
}

impl DriveSpec {
    fn validate(&self, layout: HilbertLayout) -> Result<()> {
        check_system(layout, self.system)?;
        if self.area < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "pulse area must be non-negative, got {}",
                self.area
            )));
        }
        Ok(())
    }
}

/// Any of the three elementary operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseSpec {
    Resonant(ResonantSpec),
    Dispersive(DispersiveSpec),
    Drive(DriveSpec),
}

impl PulseSpec {
    pub fn system(&self) -> usize {
        match self {
            PulseSpec::Resonant(s) => s.system,
            PulseSpec::Dispersive(s) => s.system,
            PulseSpec::Drive(s) => s.system,
        }
    }

    pub fn transition(&self) -> Transition {
        match self {
            PulseSpec::Resonant(s) => s.transition,
            PulseSpec::Dispersive(s) => s.transition,
            PulseSpec::Drive(s) => s.transition,
        }
    }
}

fn check_system(layout: HilbertLayout, system: usize) -> Result<()> {
    if system >= layout.n_systems() {
        return Err(Error::SystemOutOfRange {
            system,
            n_systems: layout.n_systems(),
        });
    }
    Ok(())
}

/// Closed-form propagator of the resonant exchange interaction.
///
/// On each invariant pair {|lower>|n>, |2>|n-1>} the action is a rotation
/// by angle sqrt(n) g t with the usual -i quadrature. |lower>|0> has no
/// partner and is left alone, as is the truncation edge |2>|N_max> whose
/// partner lies outside the space; the compiled protocol never populates
/// that edge state.
pub fn resonant_propagator(layout: HilbertLayout, spec: &ResonantSpec) -> Result<OperatorMatrix> {
    spec.validate(layout)?;
    let dim = layout.dim();
    let mut entries = Array2::zeros((dim, dim));
    let lower = spec.transition.lower();
    for col in 0..dim {
        for (row, amp) in resonant_images(layout, spec, lower, col) {
            entries[(row, col)] = amp;
        }
    }
    Ok(OperatorMatrix { layout, entries })
}

/// Images of one basis state under the resonant propagator: at most two
/// (index, amplitude) pairs.
fn resonant_images(
    layout: HilbertLayout,
    spec: &ResonantSpec,
    lower: u8,
    col: usize,
) -> impl Iterator<Item = (usize, Complex64)> {
    let level = layout.level_at(col, spec.system);
    let photons = layout.photons_at(col);
    let mut out = [(col, Complex64::new(1.0, 0.0)), (0, Complex64::default())];
    let mut count = 1usize;
    if level == lower && photons >= 1 {
        let theta = (photons as f64).sqrt() * spec.g * spec.t;
        let partner = layout.with_photons(layout.with_level(col, spec.system, 2), photons - 1);
        out[0] = (col, Complex64::new(theta.cos(), 0.0));
        out[1] = (partner, MINUS_I * theta.sin());
        count = 2;
    } else if level == 2 && photons < layout.fock_cutoff() {
        let theta = ((photons + 1) as f64).sqrt() * spec.g * spec.t;
        let partner = layout.with_photons(layout.with_level(col, spec.system, lower), photons + 1);
        out[0] = (col, Complex64::new(theta.cos(), 0.0));
        out[1] = (partner, MINUS_I * theta.sin());
        count = 2;
    }
    out.into_iter().take(count)
}

/// Closed-form dispersive propagator with the default validity guard
/// |detuning| >= 5 g.
pub fn dispersive_propagator(
    layout: HilbertLayout,
    spec: &DispersiveSpec,
) -> Result<OperatorMatrix> {
    dispersive_propagator_with_guard(layout, spec, DISPERSIVE_GUARD_RATIO)
}

/// Dispersive propagator with an explicit guard ratio (use a smaller ratio
/// only to deliberately probe the effective model outside its validity).
///
/// Diagonal in the level (x) Fock basis: the transition's lower level gains
/// exp(+i (g^2/detuning) n t) in the n-photon sector, level |2> the opposite
/// phase, the spectator level nothing. Negating the detuning conjugates
/// every phase.
pub fn dispersive_propagator_with_guard(
    layout: HilbertLayout,
    spec: &DispersiveSpec,
    min_ratio: f64,
) -> Result<OperatorMatrix> {
    spec.validate(layout, min_ratio)?;
    let dim = layout.dim();
    let mut entries = Array2::zeros((dim, dim));
    for idx in 0..dim {
        entries[(idx, idx)] = dispersive_phase(layout, spec, idx);
    }
    Ok(OperatorMatrix { layout, entries })
}

fn dispersive_phase(layout: HilbertLayout, spec: &DispersiveSpec, idx: usize) -> Complex64 {
    let level = layout.level_at(idx, spec.system);
    let photons = layout.photons_at(idx) as f64;
    let lower = spec.transition.lower();
    let angle = spec.shift_rate() * photons * spec.t;
    if level == lower {
        Complex64::from_polar(1.0, angle)
    } else if level == 2 {
        Complex64::from_polar(1.0, -angle)
    } else {
        Complex64::new(1.0, 0.0)
    }
}

/// Closed-form propagator of the classical drive: a rotation on the
/// {|lower>, |2>} pair of the addressed system, identical in every photon
/// sector, identity elsewhere.
pub fn drive_propagator(layout: HilbertLayout, spec: &DriveSpec) -> Result<OperatorMatrix> {
    spec.validate(layout)?;
    let dim = layout.dim();
    let mut entries = Array2::zeros((dim, dim));
    for col in 0..dim {
        for (row, amp) in drive_images(layout, spec, col) {
            entries[(row, col)] = amp;
        }
    }
    Ok(OperatorMatrix { layout, entries })
}

fn drive_images(
    layout: HilbertLayout,
    spec: &DriveSpec,
    col: usize,
) -> impl Iterator<Item = (usize, Complex64)> {
    let lower = spec.transition.lower();
    let level = layout.level_at(col, spec.system);
    let half = spec.area / 2.0;
    let cos = Complex64::new(half.cos(), 0.0);
    let sin = half.sin();
    let mut out = [(col, Complex64::new(1.0, 0.0)), (0, Complex64::default())];
    let mut count = 1usize;
    if level == lower {
        let partner = layout.with_level(col, spec.system, 2);
        out[0] = (col, cos);
        out[1] = (
            partner,
            MINUS_I * Complex64::from_polar(1.0, -spec.phase) * sin,
        );
        count = 2;
    } else if level == 2 {
        let partner = layout.with_level(col, spec.system, lower);
        out[0] = (col, cos);
        out[1] = (
            partner,
            MINUS_I * Complex64::from_polar(1.0, spec.phase) * sin,
        );
        count = 2;
    }
    out.into_iter().take(count)
}

/// Apply a pulse to a state without materializing the full matrix.
/// Agrees with the dense propagators entry for entry.
pub fn apply_pulse(
    layout: HilbertLayout,
    spec: &PulseSpec,
    state: &StateVector,
) -> Result<StateVector> {
    if state.layout != layout {
        return Err(Error::LayoutMismatch);
    }
    let mut out = StateVector::zeros(layout);
    match spec {
        PulseSpec::Resonant(s) => {
            s.validate(layout)?;
            let lower = s.transition.lower();
            for (col, &amp) in state.amplitudes.iter().enumerate() {
                if amp == Complex64::default() {
                    continue;
                }
                for (row, weight) in resonant_images(layout, s, lower, col) {
                    out.amplitudes[row] += weight * amp;
                }
            }
        }
        PulseSpec::Dispersive(s) => {
            s.validate(layout, DISPERSIVE_GUARD_RATIO)?;
            for (idx, &amp) in state.amplitudes.iter().enumerate() {
                if amp == Complex64::default() {
                    continue;
                }
                out.amplitudes[idx] = dispersive_phase(layout, s, idx) * amp;
            }
        }
        PulseSpec::Drive(s) => {
            s.validate(layout)?;
            for (col, &amp) in state.amplitudes.iter().enumerate() {
                if amp == Complex64::default() {
                    continue;
                }
                for (row, weight) in drive_images(layout, s, col) {
                    out.amplitudes[row] += weight * amp;
                }
            }
        }
    }
    Ok(out)
}

/// The Hermitian interaction-picture Hamiltonian of a pulse spec
/// (entries in rad/s, hbar = 1).
///
/// For a drive the rate is normalized to a one-second pulse
/// (Omega = area / 1 s); only the product Omega * t is physical, and
/// [`oracle_propagator`] rescales it for the requested duration.
pub fn hamiltonian(layout: HilbertLayout, spec: &PulseSpec) -> Result<OperatorMatrix> {
    match spec {
        PulseSpec::Resonant(s) => {
            s.validate(layout)?;
            Ok(resonant_hamiltonian(layout, s))
        }
        PulseSpec::Dispersive(s) => {
            s.validate(layout, DISPERSIVE_GUARD_RATIO)?;
            let dim = layout.dim();
            let mut entries = Array2::zeros((dim, dim));
            let lower = s.transition.lower();
            for idx in 0..dim {
                let level = layout.level_at(idx, s.system);
                let photons = layout.photons_at(idx) as f64;
                let rate = s.shift_rate() * photons;
                if level == lower {
                    entries[(idx, idx)] = Complex64::new(-rate, 0.0);
                } else if level == 2 {
                    entries[(idx, idx)] = Complex64::new(rate, 0.0);
                }
            }
            Ok(OperatorMatrix { layout, entries })
        }
        PulseSpec::Drive(s) => {
            s.validate(layout)?;
            Ok(drive_hamiltonian(layout, s, s.area))
        }
    }
}

fn resonant_hamiltonian(layout: HilbertLayout, spec: &ResonantSpec) -> OperatorMatrix {
    let dim = layout.dim();
    let mut entries = Array2::zeros((dim, dim));
    let lower = spec.transition.lower();
    for idx in 0..dim {
        let level = layout.level_at(idx, spec.system);
        let photons = layout.photons_at(idx);
        if level == lower && photons >= 1 {
            let partner = layout.with_photons(layout.with_level(idx, spec.system, 2), photons - 1);
            let coupling = Complex64::new(spec.g * (photons as f64).sqrt(), 0.0);
            entries[(partner, idx)] = coupling;
            entries[(idx, partner)] = coupling;
        }
    }
    OperatorMatrix { layout, entries }
}

fn drive_hamiltonian(layout: HilbertLayout, spec: &DriveSpec, rabi: f64) -> OperatorMatrix {
    let dim = layout.dim();
    let mut entries = Array2::zeros((dim, dim));
    let lower = spec.transition.lower();
    // H = (rabi/2)(e^{i phase} |lower><2| + h.c.)
    let coupling = Complex64::from_polar(rabi / 2.0, spec.phase);
    for idx in 0..dim {
        if layout.level_at(idx, spec.system) == 2 {
            let partner = layout.with_level(idx, spec.system, lower);
            entries[(partner, idx)] = coupling;
            entries[(idx, partner)] = coupling.conj();
        }
    }
    OperatorMatrix { layout, entries }
}

/// Verification oracle: exp(-i H t) for the pulse's interaction
/// Hamiltonian, computed by scaling-and-squaring, independent of the
/// closed-form constructions.
///
/// For resonant and dispersive specs, `t` is the evolution time and the
/// result matches the closed form when `t == spec.t`. For a drive, the Rabi
/// rate is area / t so the full rotation completes at time `t`; the result
/// is independent of any t > 0, and t = 0 yields the identity.
pub fn oracle_propagator(
    layout: HilbertLayout,
    spec: &PulseSpec,
    t: f64,
) -> Result<OperatorMatrix> {
    if t < 0.0 {
        return Err(Error::InvalidSpec(format!(
            "oracle evolution time must be non-negative, got {t}"
        )));
    }
    if t == 0.0 {
        match spec {
            PulseSpec::Resonant(s) => s.validate(layout)?,
            PulseSpec::Dispersive(s) => s.validate(layout, DISPERSIVE_GUARD_RATIO)?,
            PulseSpec::Drive(s) => s.validate(layout)?,
        }
        return Ok(OperatorMatrix::identity(layout));
    }
    let h = match spec {
        PulseSpec::Drive(s) => {
            s.validate(layout)?;
            drive_hamiltonian(layout, s, s.area / t)
        }
        other => hamiltonian(layout, other)?,
    };
    let generator = h.entries.mapv(|z| z * MINUS_I * t);
    Ok(OperatorMatrix {
        layout,
        entries: matrix_exp(&generator),
    })
}

/// Photon count plus |2>-occupancy of the addressed system; conserved by the
/// resonant interaction.
pub fn excitation_number(layout: HilbertLayout, system: usize, index: usize) -> usize {
    layout.photons_at(index) + usize::from(layout.level_at(index, system) == 2)
}
