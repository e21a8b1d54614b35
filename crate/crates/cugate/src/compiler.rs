//! Compilation of an n-qubit controlled-U gate into its ordered pulse
//! schedule, plus simulation helpers that run a schedule on states.
//!
//! The schedule always has `2n + 11` steps: a pi pulse moving control 1
//! out of the computational subspace, `n - 1` resonant steps that relay a
//! single photon down the control line, an 11-step block performing the
//! target rotation conditioned on the photon, and the mirror-image steps
//! that retrieve the photon and restore control 1. Phase bookkeeping is
//! exact: the -i acquired when the photon is emitted cancels the +i
//! acquired when it is retrieved.

use std::f64::consts::{FRAC_PI_2, PI};

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{HilbertLayout, OperatorMatrix, StateVector};
use crate::propagators::{
    apply_pulse, dispersive_propagator, drive_propagator, resonant_propagator, DispersiveSpec,
    DriveSpec, PulseSpec, ResonantSpec, Transition,
};
use crate::schedule::{CouplingTable, DispersivePair, GateParams, Mode, PulseOp, Schedule};

/// Compile the controlled-U gate on `n >= 2` qubits (target = system n)
/// into its `2n + 11`-step schedule.
///
/// Zero angles compile to zero-duration steps that stay in the schedule,
/// so the step-count law holds unconditionally. Negative `alpha`, `beta`,
/// `delta` keep durations positive and flip the detuning sign of the
/// corresponding dispersive step instead.
pub fn compile_controlled_u(
    n: usize,
    params: &GateParams,
    couplings: &CouplingTable,
    mode: Mode,
) -> Result<Schedule> {
    if n < 2 {
        return Err(Error::TooFewQubits(n, 2));
    }
    params.validate()?;
    couplings.validate(n)?;
    if !couplings.allow_detuning_flip
        && (params.alpha < 0.0 || params.beta < 0.0 || params.delta < 0.0)
    {
        return Err(Error::DetuningSignFixed(format!(
            "alpha = {}, beta = {}, delta = {}",
            params.alpha, params.beta, params.delta
        )));
    }
    if mode == Mode::Squid && couplings.resonant_02 != couplings.resonant_12 {
        return Err(Error::IncompleteCouplings(
            "squid mode requires equal 0-2 and 1-2 resonant couplings".into(),
        ));
    }

    let target = n - 1;
    let mut steps = Vec::with_capacity(2 * n + 11);

    steps.push(drive_op(0, -FRAC_PI_2, "U_1".into()));
    for l in 0..(n - 1) {
        steps.push(resonant_op(
            l,
            Transition::ZeroTwo,
            couplings.resonant_02[l],
            FRAC_PI_2 / couplings.resonant_02[l],
            format!("U_{}c", l + 1),
        ));
    }

    // Target block: R_z(delta), R_y(gamma), R_z(beta), then the common
    // phase e^{i alpha}. The z rotations apply the half-angle as a
    // photon-conditioned phase; the pi-pulse pair maps |1> through |2> so
    // the phase lands on the right level.
    let g12 = couplings.resonant_12[target];
    let g02 = couplings.resonant_02[target];
    steps.push(drive_op(target, -FRAC_PI_2, "U_nc.01_flip12".into()));
    steps.push(zrot_op(
        target,
        &couplings.zrot,
        params.delta,
        "U_nc.02_rz_delta".into(),
    ));
    steps.push(drive_op(target, FRAC_PI_2, "U_nc.03_unflip12".into()));
    steps.push(resonant_op(
        target,
        Transition::OneTwo,
        g12,
        FRAC_PI_2 / g12,
        "U_nc.04_swap12".into(),
    ));
    steps.push(resonant_op(
        target,
        Transition::ZeroTwo,
        g02,
        params.gamma / (2.0 * g02),
        "U_nc.05_ry_gamma".into(),
    ));
    steps.push(resonant_op(
        target,
        Transition::OneTwo,
        g12,
        1.5 * PI / g12,
        "U_nc.06_unswap12".into(),
    ));
    steps.push(drive_op(target, -FRAC_PI_2, "U_nc.07_flip12".into()));
    steps.push(zrot_op(
        target,
        &couplings.zrot,
        params.beta,
        "U_nc.08_rz_beta".into(),
    ));
    steps.push(drive_op(target, FRAC_PI_2, "U_nc.09_unflip12".into()));
    steps.push(phase_op(
        target,
        Transition::ZeroTwo,
        &couplings.phase_02,
        params.alpha,
        "U_nc.10_phase02".into(),
    ));
    steps.push(phase_op(
        target,
        Transition::OneTwo,
        &couplings.phase_12,
        params.alpha,
        "U_nc.11_phase12".into(),
    ));

    for l in (0..(n - 1)).rev() {
        steps.push(resonant_op(
            l,
            Transition::ZeroTwo,
            couplings.resonant_02[l],
            1.5 * PI / couplings.resonant_02[l],
            format!("U_{}c+", l + 1),
        ));
    }
    steps.push(drive_op(0, FRAC_PI_2, "U_1+".into()));

    debug_assert_eq!(steps.len(), 2 * n + 11);
    Ok(Schedule {
        mode,
        n_qubits: n,
        steps,
        adjustment_count: 2 * n + 9,
        adjustment_time_ns: 0.0,
        drive_time_ns: 0.0,
    })
}

fn resonant_op(system: usize, transition: Transition, g: f64, t: f64, label: String) -> PulseOp {
    let duration_ns = t * 1e9;
    PulseOp {
        label,
        spec: PulseSpec::Resonant(ResonantSpec {
            system,
            transition,
            g,
            t: duration_ns * 1e-9,
        }),
        duration_ns,
    }
}

fn drive_op(system: usize, phase: f64, label: String) -> PulseOp {
    PulseOp {
        label,
        spec: PulseSpec::Drive(DriveSpec {
            system,
            transition: Transition::OneTwo,
            phase,
            area: PI,
        }),
        duration_ns: 0.0,
    }
}

/// z-rotation phase step: applies exp(-i angle/2) to the transition's
/// lower level in the one-photon sector (blue detuning for positive
/// angles, red for negative).
fn zrot_op(system: usize, pair: &DispersivePair, angle: f64, label: String) -> PulseOp {
    let sign = if angle < 0.0 { -1.0 } else { 1.0 };
    let t = (angle.abs() / 2.0) * pair.detuning / (pair.g * pair.g);
    dispersive_op(
        system,
        Transition::ZeroTwo,
        pair,
        -sign * pair.detuning,
        t,
        label,
    )
}

/// Common-phase step: applies exp(+i angle) to the transition's lower
/// level in the one-photon sector (red detuning for positive angles).
fn phase_op(
    system: usize,
    transition: Transition,
    pair: &DispersivePair,
    angle: f64,
    label: String,
) -> PulseOp {
    let sign = if angle < 0.0 { -1.0 } else { 1.0 };
    let t = angle.abs() * pair.detuning / (pair.g * pair.g);
    dispersive_op(system, transition, pair, sign * pair.detuning, t, label)
}

fn dispersive_op(
    system: usize,
    transition: Transition,
    pair: &DispersivePair,
    detuning: f64,
    t: f64,
    label: String,
) -> PulseOp {
    let duration_ns = t * 1e9;
    PulseOp {
        label,
        spec: PulseSpec::Dispersive(DispersiveSpec {
            system,
            transition,
            g: pair.g,
            detuning,
            t: duration_ns * 1e-9,
        }),
        duration_ns,
    }
}

/// Dense propagator matrix of every step, in execution order.
pub fn step_matrices(schedule: &Schedule, layout: &HilbertLayout) -> Result<Vec<OperatorMatrix>> {
    check_layout(schedule, layout)?;
    schedule
        .steps
        .iter()
        .map(|step| match &step.spec {
            PulseSpec::Resonant(s) => resonant_propagator(*layout, s),
            PulseSpec::Dispersive(s) => dispersive_propagator(*layout, s),
            PulseSpec::Drive(s) => drive_propagator(*layout, s),
        })
        .collect()
}

/// Run the whole schedule on a state using the structured per-step
/// application (no dense matrices).
pub fn apply_schedule(
    schedule: &Schedule,
    layout: &HilbertLayout,
    state: &StateVector,
) -> Result<StateVector> {
    check_layout(schedule, layout)?;
    let mut current = state.clone();
    for step in &schedule.steps {
        current = apply_pulse(*layout, &step.spec, &current)?;
    }
    Ok(current)
}

fn check_layout(schedule: &Schedule, layout: &HilbertLayout) -> Result<()> {
    if layout.n_systems() != schedule.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: schedule.n_qubits,
            got: layout.n_systems(),
        });
    }
    Ok(())
}

/// The schedule's action on the computational (x) vacuum subspace, with
/// the out-of-subspace residues that certify the protocol disentangles the
/// cavity and empties level |2>.
#[derive(Debug, Clone)]
pub struct ScheduleAction {
    /// `2^n x 2^n` block of the product unitary on computational states
    /// with the cavity in vacuum.
    pub block: Array2<Complex64>,
    /// `1 - min` column norm of the block (population escaping the
    /// subspace).
    pub leakage: f64,
    /// Largest per-column amplitude norm outside the zero-photon sector.
    pub vacuum_residual: f64,
    /// Largest per-column amplitude norm on any level-|2> state.
    pub level2_residue: f64,
}

/// Apply the schedule to each computational basis state (x) vacuum and
/// collect the resulting block plus residues.
pub fn computational_action(schedule: &Schedule, layout: &HilbertLayout) -> Result<ScheduleAction> {
    check_layout(schedule, layout)?;
    let n = schedule.n_qubits;
    let size = 1usize << n;
    let mut block = Array2::zeros((size, size));
    let mut leakage: f64 = 0.0;
    let mut vacuum_residual: f64 = 0.0;
    let mut level2_residue: f64 = 0.0;

    for col in 0..size {
        let levels = bits_to_levels(col, n);
        let input = StateVector::basis(*layout, &levels, 0)?;
        let output = apply_schedule(schedule, layout, &input)?;

        let mut kept = 0.0f64;
        let mut nonvacuum = 0.0f64;
        let mut level2 = 0.0f64;
        for (idx, amp) in output.amplitudes.iter().enumerate() {
            let p = amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            if layout.photons_at(idx) != 0 {
                nonvacuum += p;
            }
            let (levels, photons) = layout.split_index(idx);
            if levels.contains(&2) {
                level2 += p;
            } else if photons == 0 {
                kept += p;
                block[(levels_to_bits(&levels), col)] = *amp;
            }
        }
        leakage = leakage.max(1.0 - kept.sqrt());
        vacuum_residual = vacuum_residual.max(nonvacuum.sqrt());
        level2_residue = level2_residue.max(level2.sqrt());
    }

    Ok(ScheduleAction {
        block,
        leakage,
        vacuum_residual,
        level2_residue,
    })
}

/// Map a computational index (qubit 1 most significant) to level labels.
pub fn bits_to_levels(bits: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((bits >> (n - 1 - i)) & 1) as u8).collect()
}

/// Inverse of [`bits_to_levels`] for level strings without any |2>.
pub fn levels_to_bits(levels: &[u8]) -> usize {
    levels
        .iter()
        .fold(0usize, |acc, &l| (acc << 1) | l as usize)
}

/// One grouped operator of the schedule (for trace replay): the initial
/// pi pulse, each photon-relay step, the whole 11-step target block, each
/// retrieval step, and the final pi pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceGroup {
    pub label: String,
    /// Step index range within the schedule.
    pub range: std::ops::Range<usize>,
}

/// Group boundaries of a compiled schedule: `2n + 1` groups.
pub fn grouped_steps(schedule: &Schedule) -> Vec<TraceGroup> {
    let n = schedule.n_qubits;
    let mut groups = Vec::with_capacity(2 * n + 1);
    groups.push(TraceGroup {
        label: "U_1".into(),
        range: 0..1,
    });
    for l in 0..(n - 1) {
        groups.push(TraceGroup {
            label: format!("U_{}c", l + 1),
            range: (1 + l)..(2 + l),
        });
    }
    groups.push(TraceGroup {
        label: "U_nc".into(),
        range: n..(n + 11),
    });
    for l in (0..(n - 1)).rev() {
        let start = n + 11 + (n - 2 - l);
        groups.push(TraceGroup {
            label: format!("U_{}c+", l + 1),
            range: start..(start + 1),
        });
    }
    groups.push(TraceGroup {
        label: "U_1+".into(),
        range: (2 * n + 10)..(2 * n + 11),
    });
    groups
}

/// Snapshots of one initial computational state after each grouped
/// operator.
#[derive(Debug, Clone)]
pub struct TraceRow {
    /// Initial qubit values, most significant first.
    pub initial: Vec<u8>,
    /// `(group label, state after that group)` in execution order.
    pub snapshots: Vec<(String, StateVector)>,
}

/// Replay the three-qubit gate on all 8 computational initial states,
/// recording the state after each grouped operator.
pub fn replay_trace(
    params: &GateParams,
    couplings: &CouplingTable,
    mode: Mode,
    layout: &HilbertLayout,
) -> Result<Vec<TraceRow>> {
    if layout.n_systems() != 3 {
        return Err(Error::InvalidSpec(format!(
            "trace replay is defined for 3 qubits, layout has {}",
            layout.n_systems()
        )));
    }
    let schedule = compile_controlled_u(3, params, couplings, mode)?;
    let groups = grouped_steps(&schedule);

    let mut rows = Vec::with_capacity(8);
    for bits in 0..8usize {
        let initial = bits_to_levels(bits, 3);
        let mut state = StateVector::basis(*layout, &initial, 0)?;
        let mut snapshots = Vec::with_capacity(groups.len());
        for group in &groups {
            for step in &schedule.steps[group.range.clone()] {
                state = apply_pulse(*layout, &step.spec, &state)?;
            }
            snapshots.push((group.label.clone(), state.clone()));
        }
        rows.push(TraceRow { initial, snapshots });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::single_qubit_u;
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_PI_2, PI};

    const G: f64 = 5.8e9;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn step_count_law() {
        let params = GateParams::new(0.3, -1.2, 2.0, 0.7);
        for n in 2..=8 {
            let couplings = CouplingTable::uniform_squid(n, G);
            let schedule = compile_controlled_u(n, &params, &couplings, Mode::Squid).unwrap();
            assert_eq!(schedule.step_count(), 2 * n + 11);
            assert_eq!(schedule.adjustment_count, 2 * n + 9);
        }
    }

    #[test]
    fn two_qubit_schedule_matches_expected_order() {
        let params = GateParams::new(0.5, 0.4, 1.0, -0.3);
        let couplings = CouplingTable::uniform_squid(2, G);
        let schedule = compile_controlled_u(2, &params, &couplings, Mode::Squid).unwrap();
        let labels: Vec<&str> = schedule.steps.iter().map(|s| s.label.as_str()).collect();
        assert_eq!(
            labels,
            vec![
                "U_1",
                "U_1c",
                "U_nc.01_flip12",
                "U_nc.02_rz_delta",
                "U_nc.03_unflip12",
                "U_nc.04_swap12",
                "U_nc.05_ry_gamma",
                "U_nc.06_unswap12",
                "U_nc.07_flip12",
                "U_nc.08_rz_beta",
                "U_nc.09_unflip12",
                "U_nc.10_phase02",
                "U_nc.11_phase12",
                "U_1c+",
                "U_1+",
            ]
        );
    }

    #[test]
    fn zero_angles_compile_to_zero_durations() {
        let params = GateParams::new(0.0, 0.0, 0.0, 0.0);
        let couplings = CouplingTable::uniform_squid(2, G);
        let schedule = compile_controlled_u(2, &params, &couplings, Mode::Squid).unwrap();
        assert_eq!(schedule.step_count(), 15);
        for step in &schedule.steps {
            match &step.spec {
                PulseSpec::Dispersive(s) => {
                    assert_eq!(s.t, 0.0, "step {}", step.label);
                }
                PulseSpec::Resonant(s) if step.label == "U_nc.05_ry_gamma" => {
                    assert_eq!(s.t, 0.0);
                }
                _ => {}
            }
        }
    }

    #[test]
    fn resonant_durations_follow_the_couplings() {
        let params = GateParams::new(0.1, 0.2, 1.5, 0.3);
        let mut resonant = vec![G; 3];
        resonant[1] = 2.0 * G;
        let pair = DispersivePair::new(0.5 * G, 5.0 * G);
        let couplings = CouplingTable::squid(resonant, pair, pair, pair);
        let schedule = compile_controlled_u(3, &params, &couplings, Mode::Squid).unwrap();

        let by_label = |label: &str| {
            schedule
                .steps
                .iter()
                .find(|s| s.label == label)
                .unwrap_or_else(|| panic!("missing {label}"))
        };
        match &by_label("U_2c").spec {
            PulseSpec::Resonant(s) => assert!((s.t - FRAC_PI_2 / (2.0 * G)).abs() < 1e-22),
            other => panic!("unexpected spec {other:?}"),
        }
        match &by_label("U_2c+").spec {
            PulseSpec::Resonant(s) => assert!((s.t - 1.5 * PI / (2.0 * G)).abs() < 1e-22),
            other => panic!("unexpected spec {other:?}"),
        }
        match &by_label("U_nc.05_ry_gamma").spec {
            PulseSpec::Resonant(s) => assert!((s.t - params.gamma / (2.0 * G)).abs() < 1e-22),
            other => panic!("unexpected spec {other:?}"),
        }
    }

    #[test]
    fn negative_angles_flip_detuning_signs() {
        let params = GateParams::new(-0.5, 1.0, 0.0, -2.0);
        let couplings = CouplingTable::uniform_squid(2, G);
        let schedule = compile_controlled_u(2, &params, &couplings, Mode::Squid).unwrap();
        let spec_of = |label: &str| match &schedule
            .steps
            .iter()
            .find(|s| s.label == label)
            .unwrap()
            .spec
        {
            PulseSpec::Dispersive(s) => *s,
            other => panic!("unexpected spec {other:?}"),
        };
        // delta < 0: z-rotation detuning flips to positive (red)
        assert!(spec_of("U_nc.02_rz_delta").detuning > 0.0);
        // beta > 0: blue
        assert!(spec_of("U_nc.08_rz_beta").detuning < 0.0);
        // alpha < 0: common phase flips to blue
        assert!(spec_of("U_nc.10_phase02").detuning < 0.0);
        assert!(spec_of("U_nc.11_phase12").detuning < 0.0);
        // durations stay non-negative
        for step in &schedule.steps {
            assert!(step.duration_ns >= 0.0);
        }
    }

    #[test]
    fn fixed_sign_tables_reject_negative_angles() {
        let params = GateParams::new(-0.5, 0.0, 0.0, 0.0);
        let mut couplings = CouplingTable::uniform_squid(2, G);
        couplings.allow_detuning_flip = false;
        assert!(matches!(
            compile_controlled_u(2, &params, &couplings, Mode::Squid),
            Err(Error::DetuningSignFixed(_))
        ));
    }

    #[test]
    fn incomplete_couplings_rejected() {
        let params = GateParams::new(0.0, 0.0, 0.0, 0.0);
        let couplings = CouplingTable::uniform_squid(2, G);
        assert!(matches!(
            compile_controlled_u(4, &params, &couplings, Mode::Squid),
            Err(Error::IncompleteCouplings(_))
        ));
        assert!(matches!(
            compile_controlled_u(1, &params, &couplings, Mode::Squid),
            Err(Error::TooFewQubits(1, 2))
        ));
    }

    #[test]
    fn control_pulse_restriction_is_the_expected_rotation() {
        // U_1 on the {|2>_1, |1>_1} pair: [[0, 1], [-1, 0]].
        let params = GateParams::new(0.2, 0.4, 1.1, 0.9);
        let couplings = CouplingTable::uniform_squid(2, G);
        let schedule = compile_controlled_u(2, &params, &couplings, Mode::Squid).unwrap();
        let layout = HilbertLayout::new(2, 2).unwrap();
        let mats = step_matrices(&schedule, &layout).unwrap();

        let two = layout.index_of(&[2, 0], 0).unwrap();
        let one = layout.index_of(&[1, 0], 0).unwrap();
        let u1 = &mats[0].entries;
        assert!((u1[(two, two)]).norm() < 1e-14);
        assert!((u1[(two, one)] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((u1[(one, two)] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((u1[(one, one)]).norm() < 1e-14);
    }

    #[test]
    fn photon_relay_restriction_is_minus_i_swap() {
        // U_1c on the {|2>_1|0>_c, |0>_1|1>_c} pair: [[0, -i], [-i, 0]].
        let params = GateParams::new(0.2, 0.4, 1.1, 0.9);
        let couplings = CouplingTable::uniform_squid(2, G);
        let schedule = compile_controlled_u(2, &params, &couplings, Mode::Squid).unwrap();
        let layout = HilbertLayout::new(2, 2).unwrap();
        let mats = step_matrices(&schedule, &layout).unwrap();

        let emitted = layout.index_of(&[0, 1], 1).unwrap();
        let excited = layout.index_of(&[2, 1], 0).unwrap();
        let u1c = &mats[1].entries;
        assert!((u1c[(excited, excited)]).norm() < 1e-12);
        assert!((u1c[(emitted, excited)] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((u1c[(excited, emitted)] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((u1c[(emitted, emitted)]).norm() < 1e-12);
    }

    #[test]
    fn target_block_product_is_the_single_qubit_unitary() {
        // Product of the 11 target steps, restricted to the target's
        // {|0>, |1>} pair in the one-photon sector, equals
        // e^{i alpha} R_z(beta) R_y(gamma) R_z(delta); the zero-photon
        // sector is untouched.
        let params = GateParams::new(0.37, -1.1, 2.4, 1.9);
        let couplings = CouplingTable::uniform_squid(2, G);
        let schedule = compile_controlled_u(2, &params, &couplings, Mode::Squid).unwrap();
        let layout = HilbertLayout::new(2, 2).unwrap();
        let mats = step_matrices(&schedule, &layout).unwrap();

        let mut product = OperatorMatrix::identity(layout);
        for m in &mats[2..13] {
            product = m.compose(&product).unwrap();
        }

        let u = single_qubit_u(&params);
        for photon in [0usize, 1] {
            for (col_bit, col_level) in [(0usize, 0u8), (1, 1)] {
                let col = layout.index_of(&[1, col_level], photon).unwrap();
                for (row_bit, row_level) in [(0usize, 0u8), (1, 1)] {
                    let row = layout.index_of(&[1, row_level], photon).unwrap();
                    let expected = if photon == 1 {
                        u[(row_bit, col_bit)]
                    } else if row_bit == col_bit {
                        c(1.0, 0.0)
                    } else {
                        c(0.0, 0.0)
                    };
                    assert!(
                        (product.entries[(row, col)] - expected).norm() < 1e-10,
                        "photon {photon}, entry ({row_bit},{col_bit})"
                    );
                }
            }
        }
    }

    #[test]
    fn trace_matches_printed_three_qubit_evolution() {
        let params = GateParams::new(0.81, 0.62, 2.75, -0.94);
        let couplings = CouplingTable::uniform_squid(3, G);
        let layout = HilbertLayout::new(3, 2).unwrap();
        let rows = replay_trace(&params, &couplings, Mode::Squid, &layout).unwrap();

        let ket = |levels: &[u8], photons: usize, amp: Complex64| {
            let mut s = StateVector::basis(layout, levels, photons).unwrap();
            s.amplitudes.mapv_inplace(|z| z * amp);
            s
        };

        // |110> row: photon survives the idle control and returns.
        let row = &rows[0b110];
        assert!(
            row.snapshots[0]
                .1
                .max_amp_diff(&ket(&[2, 1, 0], 0, c(1.0, 0.0)))
                < 1e-12
        );
        assert!(
            row.snapshots[1]
                .1
                .max_amp_diff(&ket(&[0, 1, 0], 1, c(0.0, -1.0)))
                < 1e-12
        );
        assert!(
            row.snapshots[2]
                .1
                .max_amp_diff(&ket(&[0, 1, 0], 1, c(0.0, -1.0)))
                < 1e-12
        );

        // |100> row: the photon is parked in control 2 and later retrieved.
        let row = &rows[0b100];
        assert!(
            row.snapshots[1]
                .1
                .max_amp_diff(&ket(&[0, 0, 0], 1, c(0.0, -1.0)))
                < 1e-12
        );
        assert!(
            row.snapshots[2]
                .1
                .max_amp_diff(&ket(&[0, 2, 0], 0, c(-1.0, 0.0)))
                < 1e-12
        );
        assert!(
            row.snapshots[3]
                .1
                .max_amp_diff(&ket(&[0, 2, 0], 0, c(-1.0, 0.0)))
                < 1e-12
        );
        assert!(
            row.snapshots[4]
                .1
                .max_amp_diff(&ket(&[0, 0, 0], 1, c(0.0, -1.0)))
                < 1e-12
        );
        assert!(
            row.snapshots[5]
                .1
                .max_amp_diff(&ket(&[2, 0, 0], 0, c(1.0, 0.0)))
                < 1e-12
        );
        assert!(
            row.snapshots[6]
                .1
                .max_amp_diff(&ket(&[1, 0, 0], 0, c(1.0, 0.0)))
                < 1e-12
        );

        // |000> row: nothing ever happens.
        let row = &rows[0b000];
        let unchanged = ket(&[0, 0, 0], 0, c(1.0, 0.0));
        for (_, snap) in &row.snapshots {
            assert!(snap.max_amp_diff(&unchanged) < 1e-12);
        }
    }

    #[test]
    fn atom_mode_with_distinct_swap_coupling_is_still_exact() {
        let params = GateParams::new(0.4, 1.3, 2.2, -1.7);
        let g = G;
        let pair = DispersivePair::new(0.5 * g, 5.0 * g);
        let couplings = CouplingTable::atom(vec![g, g, g], vec![g, g, 1.3 * g], pair, pair, pair);
        let layout = HilbertLayout::new(3, 2).unwrap();
        let schedule = compile_controlled_u(3, &params, &couplings, Mode::Atom).unwrap();
        let action = computational_action(&schedule, &layout).unwrap();
        assert!(action.leakage < 1e-10);
        assert!(action.vacuum_residual < 1e-10);
        assert!(action.level2_residue < 1e-10);
    }

    #[test]
    fn squid_mode_rejects_split_resonant_couplings() {
        let params = GateParams::new(0.0, 0.0, 1.0, 0.0);
        let pair = DispersivePair::new(0.5 * G, 5.0 * G);
        let couplings = CouplingTable::atom(vec![G, G], vec![G, 1.1 * G], pair, pair, pair);
        assert!(compile_controlled_u(2, &params, &couplings, Mode::Squid).is_err());
    }

    #[test]
    fn dense_and_structured_application_agree() {
        let params = GateParams::new(0.9, -0.8, 1.9, 0.25);
        let couplings = CouplingTable::uniform_squid(2, G);
        let schedule = compile_controlled_u(2, &params, &couplings, Mode::Squid).unwrap();
        let layout = HilbertLayout::new(2, 2).unwrap();
        let mats = step_matrices(&schedule, &layout).unwrap();

        let input = StateVector::basis(layout, &[1, 1], 0).unwrap();
        let mut dense = input.clone();
        for m in &mats {
            dense = m.apply(&dense).unwrap();
        }
        let fast = apply_schedule(&schedule, &layout, &input).unwrap();
        assert!(dense.max_amp_diff(&fast) < 1e-12);
    }
}
