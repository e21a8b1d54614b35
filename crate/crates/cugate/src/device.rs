//! Engineering quantities for a concrete device: the SQUID-cavity
//! coupling constant, Rabi frequency, timing budget, gate-count
//! comparison against network decompositions, off-resonant leakage, the
//! SQUID-SQUID mutual-inductance condition and decoherence margins.
//!
//! Device and cavity parameters are ingested from a TOML file whose field
//! names carry explicit units; a reference parameter set ships with the
//! crate as [`TABLE1_TOML`].

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::schedule::GateParams;

/// Planck constant (J s).
pub const PLANCK: f64 = 6.62607015e-34;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = PLANCK / std::f64::consts::TAU;
/// Magnetic flux quantum h / 2e (Wb).
pub const FLUX_QUANTUM: f64 = 2.067833848461929e-15;
/// Vacuum permeability (H/m).
pub const MU_0: f64 = 4.0e-7 * std::f64::consts::PI;

/// Bundled reference device file (see `data/table1.toml`).
pub const TABLE1_TOML: &str = include_str!("../data/table1.toml");

/// SQUID parameters in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceParams {
    /// Junction capacitance (F).
    pub capacitance: f64,
    /// Loop inductance (H).
    pub inductance: f64,
    /// Potential shape parameter (dimensionless).
    pub beta_l: f64,
    /// External flux bias in units of the flux quantum.
    pub flux_bias: f64,
    /// Effective damping resistance (Ohm).
    pub damping_resistance: f64,
    /// Loop area (m^2).
    pub loop_area: f64,
    /// |0> <-> |2> transition frequency (Hz).
    pub nu_20: f64,
    /// |1> <-> |2> transition frequency (Hz).
    pub nu_21: f64,
    /// Dimensionless flux matrix elements <i|Phi|j> / Phi_0.
    pub phi_10: f64,
    pub phi_20: f64,
    pub phi_21: f64,
    /// Energy relaxation time of level |2> (s).
    pub gamma2_inv: f64,
    /// Energy relaxation time of level |1> (s).
    pub gamma1_inv: f64,
}

impl DeviceParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("capacitance", self.capacitance),
            ("inductance", self.inductance),
            ("beta_l", self.beta_l),
            ("flux_bias", self.flux_bias),
            ("damping_resistance", self.damping_resistance),
            ("loop_area", self.loop_area),
            ("nu_20", self.nu_20),
            ("nu_21", self.nu_21),
            ("phi_10", self.phi_10),
            ("phi_20", self.phi_20),
            ("phi_21", self.phi_21),
            ("gamma2_inv", self.gamma2_inv),
            ("gamma1_inv", self.gamma1_inv),
        ];
        for (name, value) in fields {
            if !(value > 0.0) {
                return Err(Error::DeviceFile(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if self.nu_20 <= self.nu_21 {
            return Err(Error::DeviceFile(format!(
                "Lambda configuration requires nu_20 > nu_21 (got {} <= {})",
                self.nu_20, self.nu_21
            )));
        }
        Ok(())
    }
}

/// Transmission-line cavity parameters in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityParams {
    /// Mode frequency (Hz).
    pub nu_c: f64,
    /// Mode wavelength (m).
    pub wavelength: f64,
    /// Cavity length (m).
    pub length: f64,
    /// Inductance per unit length (H/m).
    pub inductance_per_length: f64,
    /// SQUID-cavity mutual inductance (H).
    pub mutual_inductance: f64,
    /// Loaded quality factor (dimensionless).
    pub quality_factor: f64,
    /// Geometry / dielectric descriptors, carried for documentation.
    pub epsilon_e: Option<f64>,
    pub gap: Option<f64>,
    pub center_width: Option<f64>,
}

impl CavityParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("nu_c", self.nu_c),
            ("wavelength", self.wavelength),
            ("length", self.length),
            ("inductance_per_length", self.inductance_per_length),
            ("mutual_inductance", self.mutual_inductance),
            ("quality_factor", self.quality_factor),
        ];
        for (name, value) in fields {
            if !(value > 0.0) {
                return Err(Error::DeviceFile(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Cavity photon lifetime Q / (2 pi nu_c) in seconds.
    pub fn kappa_inv(&self) -> f64 {
        self.quality_factor / (std::f64::consts::TAU * self.nu_c)
    }

    /// Position of the k-th field antinode: lambda/4 + k lambda/2.
    pub fn antinode(&self, k: usize) -> f64 {
        self.wavelength * (0.25 + 0.5 * k as f64)
    }
}

/// SQUID-cavity coupling rate (rad/s) at position `x` along the cavity:
///
/// `g = (M_sc / L) sqrt(h nu_c / (L0 l)) phi_20 Phi_0 sin(2 pi x / lambda) / hbar`
///
/// The energy quantum under the radical is `h nu_c` (one photon); the sign
/// follows the standing-wave field, so take the magnitude when only the
/// rate matters.
pub fn coupling_g(device: &DeviceParams, cavity: &CavityParams, x: f64) -> f64 {
    let current_scale =
        (PLANCK * cavity.nu_c / (cavity.inductance_per_length * cavity.length)).sqrt();
    let standing_wave = (std::f64::consts::TAU * x / cavity.wavelength).sin();
    (cavity.mutual_inductance / device.inductance)
        * current_scale
        * (device.phi_20 * FLUX_QUANTUM)
        * standing_wave
        / HBAR
}

/// Rabi frequency (rad/s) of a classical pulse with the given surface
/// integral of its magnetic field over the loop (Wb):
///
/// `Omega = (phi_21 Phi_0 / (L hbar)) * integrated_flux`
pub fn rabi_frequency(device: &DeviceParams, integrated_flux: f64) -> f64 {
    device.phi_21 * FLUX_QUANTUM / (device.inductance * HBAR) * integrated_flux
}

/// Characteristic times of the protocol (all seconds).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingParams {
    /// pi / g: one full resonant exchange cycle.
    pub tau_c1: f64,
    /// detuning / g^2 of the common-phase dispersive pair: phase unit time.
    pub tau_c2: f64,
    /// detuning / g^2 of the z-rotation dispersive pair.
    pub tau_c3: f64,
    /// Level-spacing (or cavity-frequency) adjustment time.
    pub tau_a: f64,
    /// Microwave pi-pulse duration.
    pub tau_uw: f64,
}

impl TimingParams {
    /// Characteristic times from explicit rates.
    pub fn from_rates(
        g: f64,
        phase_g: f64,
        phase_detuning: f64,
        zrot_g: f64,
        zrot_detuning: f64,
        tau_a: f64,
        tau_uw: f64,
    ) -> Self {
        Self {
            tau_c1: std::f64::consts::PI / g,
            tau_c2: phase_detuning / (phase_g * phase_g),
            tau_c3: zrot_detuning / (zrot_g * zrot_g),
            tau_a,
            tau_uw,
        }
    }

    /// The usual rough estimate for identical SQUIDs at antinodes:
    /// off-resonant coupling 0.5 g, detunings 10x that, adjustment and
    /// pulse times equal to tau_c1.
    pub fn squid_defaults(g: f64) -> Self {
        let g_off = 0.5 * g;
        let detuning = 10.0 * g_off;
        let tau_c1 = std::f64::consts::PI / g;
        Self::from_rates(g, g_off, detuning, g_off, detuning, tau_c1, tau_c1)
    }
}

/// Closed-form operation-time budget for the n-qubit gate with identical
/// couplings:
///
/// `tau = [2n + gamma/(2 pi)] tau_c1 + 2|alpha| tau_c2 +
///        (|beta| + |delta|) tau_c3 + (2n + 9) tau_a + 4 tau_uw`
///
/// Negative angles enter through their absolute values; sign lives in the
/// detunings. Note the budget's conventions: it counts the two z-rotation
/// phase steps at full angle and four microwave pulses. A compiled
/// schedule realizes the same gate with half-angle phase steps and six pi
/// pulses, so its summed duration is smaller by exactly
/// `(|beta| + |delta|)/2 * tau_c3 - 2 tau_uw`.
pub fn total_time(n: usize, params: &GateParams, timing: &TimingParams) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooFewQubits(n, 2));
    }
    let resonant = (2.0 * n as f64 + params.gamma / std::f64::consts::TAU) * timing.tau_c1;
    let common_phase = 2.0 * params.alpha.abs() * timing.tau_c2;
    let zrot = (params.beta.abs() + params.delta.abs()) * timing.tau_c3;
    let adjustments = (2 * n + 9) as f64 * timing.tau_a;
    let pulses = 4.0 * timing.tau_uw;
    Ok(resonant + common_phase + zrot + adjustments + pulses)
}

/// Step counts of this protocol versus the standard network
/// decompositions of an n-qubit controlled-U gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepCounts {
    pub n: usize,
    /// This protocol: 2n + 11 pulse steps.
    pub this_work: u64,
    /// Controlled-V network: 2^n - 3 two-qubit gates.
    pub barenco: u64,
    /// Uniformly-controlled-rotation network: 2^n operations.
    pub bergholm: u64,
}

/// Evaluate the three counts; the network formulas hold for n >= 3.
pub fn step_counts(n: usize) -> Result<StepCounts> {
    if n < 3 {
        return Err(Error::TooFewQubits(n, 3));
    }
    if n > 60 {
        return Err(Error::InvalidRange(format!(
            "n = {n} overflows the 2^n counts"
        )));
    }
    Ok(StepCounts {
        n,
        this_work: 2 * n as u64 + 11,
        barenco: (1u64 << n) - 3,
        bergholm: 1u64 << n,
    })
}

/// Smallest n in `[n_min, n_max]` where this protocol needs fewer steps
/// than the controlled-V network.
pub fn crossover(n_min: usize, n_max: usize) -> Result<Option<usize>> {
    if n_min < 3 || n_min > n_max {
        return Err(Error::InvalidRange(format!(
            "need 3 <= n_min <= n_max, got [{n_min}, {n_max}]"
        )));
    }
    for n in n_min..=n_max {
        let counts = step_counts(n)?;
        if counts.this_work < counts.barenco {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Population leaked into level |j> of an idle system whose i <-> j
/// transition sits a detuning `delta` away from the cavity at coupling
/// `g`: `p = g^2 / (g^2 + delta^2)`.
pub fn leakage_estimate(g: f64, delta: f64) -> f64 {
    assert!(g > 0.0, "coupling must be positive");
    let g2 = g * g;
    g2 / (g2 + delta * delta)
}

/// Relative placement of two coupled loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopGeometry {
    /// Loops in a common plane (field at the second loop is halved
    /// relative to the axial case).
    Coplanar,
    Coaxial,
}

/// Magnetic-dipole estimate of the mutual inductance between two small
/// loops of areas `s1`, `s2` (m^2) separated by `d` (m):
/// `mu_0 s1 s2 / (4 pi d^3)` coplanar, twice that coaxial.
///
/// Valid only in the far field; rejects `d^2 < 10 max(s1, s2)`.
pub fn mutual_inductance_dipole(s1: f64, s2: f64, d: f64, geometry: LoopGeometry) -> Result<f64> {
    if !(s1 > 0.0 && s2 > 0.0 && d > 0.0) {
        return Err(Error::InvalidRange(
            "loop areas and separation must be positive".into(),
        ));
    }
    let max_area = s1.max(s2);
    if d * d < 10.0 * max_area {
        return Err(Error::NearFieldViolation {
            separation_sq: d * d,
            max_area,
        });
    }
    let base = MU_0 * s1 * s2 / (4.0 * std::f64::consts::PI * d.powi(3));
    Ok(match geometry {
        LoopGeometry::Coplanar => base,
        LoopGeometry::Coaxial => 2.0 * base,
    })
}

/// Default pass threshold for the decoherence ratios.
pub const MARGIN_THRESHOLD: f64 = 0.1;

/// Operation time compared against the |2>-level relaxation time and the
/// cavity photon lifetime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceMargin {
    /// tau * gamma_2 (operation time over |2> relaxation time).
    pub ratio_gamma2: f64,
    /// tau * kappa (operation time over cavity lifetime).
    pub ratio_kappa: f64,
    pub pass: bool,
}

pub fn decoherence_margin(
    tau: f64,
    device: &DeviceParams,
    cavity: &CavityParams,
) -> DecoherenceMargin {
    decoherence_margin_with_threshold(tau, device, cavity, MARGIN_THRESHOLD)
}

pub fn decoherence_margin_with_threshold(
    tau: f64,
    device: &DeviceParams,
    cavity: &CavityParams,
    threshold: f64,
) -> DecoherenceMargin {
    let ratio_gamma2 = tau / device.gamma2_inv;
    let ratio_kappa = tau / cavity.kappa_inv();
    DecoherenceMargin {
        ratio_gamma2,
        ratio_kappa,
        pass: ratio_gamma2 < threshold && ratio_kappa < threshold,
    }
}

#[derive(Debug, Deserialize)]
struct RawDeviceFile {
    squid: Option<RawSquid>,
    cavity: Option<RawCavity>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSquid {
    junction_capacitance_ff: Option<f64>,
    loop_inductance_ph: Option<f64>,
    beta_l: Option<f64>,
    flux_bias_phi0: Option<f64>,
    damping_resistance_mohm: Option<f64>,
    loop_width_um: Option<f64>,
    loop_length_um: Option<f64>,
    nu_20_ghz: Option<f64>,
    nu_21_ghz: Option<f64>,
    phi_10: Option<f64>,
    phi_20: Option<f64>,
    phi_21: Option<f64>,
    gamma2_inv_us: Option<f64>,
    gamma1_inv_ms: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCavity {
    nu_c_ghz: Option<f64>,
    wavelength_mm: Option<f64>,
    length_wavelengths: Option<f64>,
    inductance_per_length_ph_per_um: Option<f64>,
    mutual_inductance_ph: Option<f64>,
    quality_factor: Option<f64>,
    epsilon_e: Option<f64>,
    gap_um: Option<f64>,
    center_width_um: Option<f64>,
}

/// Parse a device file, reporting every missing required field at once.
pub fn parse_device_toml(text: &str) -> Result<(DeviceParams, CavityParams)> {
    let raw: RawDeviceFile = toml::from_str(text).map_err(|e| Error::DeviceFile(e.to_string()))?;
    let squid = raw.squid.unwrap_or_default();
    let cavity = raw.cavity.unwrap_or_default();

    let mut missing: Vec<&str> = Vec::new();
    let mut need = |name: &'static str, value: Option<f64>| -> f64 {
        match value {
            Some(v) => v,
            None => {
                missing.push(name);
                f64::NAN
            }
        }
    };

    let capacitance = need(
        "squid.junction_capacitance_ff",
        squid.junction_capacitance_ff,
    ) * 1e-15;
    let inductance = need("squid.loop_inductance_ph", squid.loop_inductance_ph) * 1e-12;
    let beta_l = need("squid.beta_l", squid.beta_l);
    let flux_bias = need("squid.flux_bias_phi0", squid.flux_bias_phi0);
    let damping_resistance = need(
        "squid.damping_resistance_mohm",
        squid.damping_resistance_mohm,
    ) * 1e6;
    let loop_width = need("squid.loop_width_um", squid.loop_width_um) * 1e-6;
    let loop_length = need("squid.loop_length_um", squid.loop_length_um) * 1e-6;
    let nu_20 = need("squid.nu_20_ghz", squid.nu_20_ghz) * 1e9;
    let nu_21 = need("squid.nu_21_ghz", squid.nu_21_ghz) * 1e9;
    let phi_10 = need("squid.phi_10", squid.phi_10);
    let phi_20 = need("squid.phi_20", squid.phi_20);
    let phi_21 = need("squid.phi_21", squid.phi_21);
    let gamma2_inv = need("squid.gamma2_inv_us", squid.gamma2_inv_us) * 1e-6;
    let gamma1_inv = need("squid.gamma1_inv_ms", squid.gamma1_inv_ms) * 1e-3;

    let nu_c = need("cavity.nu_c_ghz", cavity.nu_c_ghz) * 1e9;
    let wavelength = need("cavity.wavelength_mm", cavity.wavelength_mm) * 1e-3;
    let length_wavelengths = need("cavity.length_wavelengths", cavity.length_wavelengths);
    let inductance_per_length = need(
        "cavity.inductance_per_length_ph_per_um",
        cavity.inductance_per_length_ph_per_um,
    ) * 1e-6;
    let mutual_inductance =
        need("cavity.mutual_inductance_ph", cavity.mutual_inductance_ph) * 1e-12;
    let quality_factor = need("cavity.quality_factor", cavity.quality_factor);

    if !missing.is_empty() {
        return Err(Error::DeviceFile(format!(
            "missing required fields: {}",
            missing.join(", ")
        )));
    }

    let device = DeviceParams {
        capacitance,
        inductance,
        beta_l,
        flux_bias,
        damping_resistance,
        loop_area: loop_width * loop_length,
        nu_20,
        nu_21,
        phi_10,
        phi_20,
        phi_21,
        gamma2_inv,
        gamma1_inv,
    };
    let cavity = CavityParams {
        nu_c,
        wavelength,
        length: length_wavelengths * wavelength,
        inductance_per_length,
        mutual_inductance,
        quality_factor,
        epsilon_e: cavity.epsilon_e,
        gap: cavity.gap_um.map(|v| v * 1e-6),
        center_width: cavity.center_width_um.map(|v| v * 1e-6),
    };
    device.validate()?;
    cavity.validate()?;
    Ok((device, cavity))
}

/// The bundled reference parameter set, parsed.
pub fn table1() -> (DeviceParams, CavityParams) {
    parse_device_toml(TABLE1_TOML).expect("bundled device file is valid")
}
