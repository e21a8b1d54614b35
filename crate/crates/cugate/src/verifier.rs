//! Ideal controlled-U construction and distance measures between the
//! simulated and ideal gates on the computational subspace.

use ndarray::Array2;
use num_complex::Complex64;

use crate::compiler::{compile_controlled_u, computational_action};
use crate::error::{Error, Result};
use crate::hilbert::{HilbertLayout, OperatorMatrix};
use crate::schedule::{CouplingTable, GateParams, Mode};

/// `R_y(gamma)` in the qubit basis |0> = (1, 0)^T, |1> = (0, 1)^T.
fn rotation_y(gamma: f64) -> Array2<Complex64> {
    let c = Complex64::new((gamma / 2.0).cos(), 0.0);
    let s = Complex64::new((gamma / 2.0).sin(), 0.0);
    ndarray::array![[c, -s], [s, c]]
}

/// `R_z(theta)` = diag(e^{-i theta/2}, e^{+i theta/2}).
fn rotation_z(theta: f64) -> Array2<Complex64> {
    ndarray::array![
        [
            Complex64::from_polar(1.0, -theta / 2.0),
            Complex64::default()
        ],
        [
            Complex64::default(),
            Complex64::from_polar(1.0, theta / 2.0)
        ]
    ]
}

/// The target single-qubit unitary
/// `U = e^{i alpha} R_z(beta) R_y(gamma) R_z(delta)`.
pub fn single_qubit_u(params: &GateParams) -> Array2<Complex64> {
    let phase = Complex64::from_polar(1.0, params.alpha);
    let u = rotation_z(params.beta)
        .dot(&rotation_y(params.gamma))
        .dot(&rotation_z(params.delta));
    u.mapv(|z| z * phase)
}

/// Ideal n-qubit controlled-U: identity except for the 2x2 block of
/// `single_qubit_u` on the last two computational indices
/// |1...10> and |1...11>.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealGate {
    pub n: usize,
    pub matrix: Array2<Complex64>,
}

pub fn ideal_controlled_u(n: usize, params: &GateParams) -> Result<IdealGate> {
    if n < 2 {
        return Err(Error::TooFewQubits(n, 2));
    }
    let size = 1usize << n;
    let mut matrix = Array2::eye(size);
    let u = single_qubit_u(params);
    let base = size - 2;
    for row in 0..2 {
        for col in 0..2 {
            matrix[(base + row, base + col)] = u[(row, col)];
        }
    }
    Ok(IdealGate { n, matrix })
}

/// Projection of a full-space unitary onto the computational (x) vacuum
/// subspace, with the associated leakage scalar
/// (`1 - min` column norm of the projected block).
pub fn extract_computational_gate(full: &OperatorMatrix) -> (Array2<Complex64>, f64) {
    let layout = full.layout;
    let n = layout.n_systems();
    let size = 1usize << n;
    let indices: Vec<usize> = (0..size)
        .map(|bits| {
            let levels = crate::compiler::bits_to_levels(bits, n);
            layout
                .index_of(&levels, 0)
                .expect("computational index within layout")
        })
        .collect();

    let mut block = Array2::zeros((size, size));
    let mut min_norm = f64::INFINITY;
    for (col_bits, &col_idx) in indices.iter().enumerate() {
        let mut norm_sq = 0.0f64;
        for (row_bits, &row_idx) in indices.iter().enumerate() {
            let v = full.entries[(row_idx, col_idx)];
            block[(row_bits, col_bits)] = v;
            norm_sq += v.norm_sqr();
        }
        min_norm = min_norm.min(norm_sq.sqrt());
    }
    (block, 1.0 - min_norm)
}

/// Phase-sensitive distance measures between a simulated block and the
/// ideal gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateDistance {
    /// Largest entrywise deviation, with no global-phase alignment: the
    /// compiled protocol cancels its bookkeeping phases exactly, so
    /// literal equality is the contract.
    pub max_entry_error: f64,
    /// |trace(ideal^dag sim)| / 2^n, insensitive to a global phase.
    pub fidelity: f64,
}

pub fn gate_distance(sim: &Array2<Complex64>, ideal: &IdealGate) -> Result<GateDistance> {
    let size = 1usize << ideal.n;
    if sim.nrows() != size || sim.ncols() != size {
        return Err(Error::DimensionMismatch {
            expected: size,
            got: sim.nrows().max(sim.ncols()),
        });
    }
    let mut max_entry_error = 0.0f64;
    let mut trace = Complex64::default();
    for col in 0..size {
        for row in 0..size {
            let s = sim[(row, col)];
            let i = ideal.matrix[(row, col)];
            max_entry_error = max_entry_error.max((s - i).norm());
            trace += i.conj() * s;
        }
    }
    Ok(GateDistance {
        max_entry_error,
        fidelity: trace.norm() / size as f64,
    })
}

/// End-to-end check of one gate: compile, simulate on the computational
/// basis and compare against the ideal matrix.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub n: usize,
    pub mode: Mode,
    pub steps: usize,
    pub max_entry_error: f64,
    pub fidelity: f64,
    pub leakage: f64,
    pub vacuum_residual: f64,
    pub level2_residue: f64,
    /// Largest amplitude error per initial computational basis state.
    pub per_state_error: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn verify_controlled_u(
    n: usize,
    params: &GateParams,
    couplings: &CouplingTable,
    mode: Mode,
    fock_cutoff: usize,
    tolerance: f64,
) -> Result<VerifyReport> {
    let layout = HilbertLayout::new(n, fock_cutoff)?;
    let schedule = compile_controlled_u(n, params, couplings, mode)?;
    let action = computational_action(&schedule, &layout)?;
    let ideal = ideal_controlled_u(n, params)?;
    let distance = gate_distance(&action.block, &ideal)?;

    let size = 1usize << n;
    let per_state_error: Vec<f64> = (0..size)
        .map(|col| {
            (0..size)
                .map(|row| (action.block[(row, col)] - ideal.matrix[(row, col)]).norm())
                .fold(0.0, f64::max)
        })
        .collect();

    let pass = distance.max_entry_error <= tolerance
        && action.leakage <= tolerance
        && action.vacuum_residual <= tolerance
        && action.level2_residue <= tolerance;

    Ok(VerifyReport {
        n,
        mode,
        steps: schedule.step_count(),
        max_entry_error: distance.max_entry_error,
        fidelity: distance.fidelity,
        leakage: action.leakage,
        vacuum_residual: action.vacuum_residual,
        level2_residue: action.level2_residue,
        per_state_error,
        tolerance,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::step_matrices;
    use crate::hilbert::StateVector;
    use crate::propagators::apply_pulse;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_mat_close(a: &Array2<Complex64>, b: &Array2<Complex64>, tol: f64) {
        assert_eq!(a.shape(), b.shape());
        for ((i, j), v) in a.indexed_iter() {
            assert!(
                (v - b[(i, j)]).norm() < tol,
                "entry ({i},{j}): {v} vs {}",
                b[(i, j)]
            );
        }
    }

    #[test]
    fn trivial_angles_give_identity() {
        let u = single_qubit_u(&GateParams::new(0.0, 0.0, 0.0, 0.0));
        assert_mat_close(&u, &Array2::eye(2), 1e-15);
    }

    #[test]
    fn not_gate_parameters() {
        let u = single_qubit_u(&GateParams::new(FRAC_PI_2, 0.0, PI, PI));
        let x = ndarray::array![[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
        assert_mat_close(&u, &x, 1e-14);
    }

    #[test]
    fn y_gate_parameters() {
        let u = single_qubit_u(&GateParams::new(FRAC_PI_2, 0.0, PI, 0.0));
        let y = ndarray::array![[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]];
        assert_mat_close(&u, &y, 1e-14);
    }

    #[test]
    fn single_qubit_u_is_unitary_with_det_phase() {
        // det(U) = e^{2 i alpha}: the rotation factors are special unitary.
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let params = GateParams::new(
                (next() - 0.5) * 2.0 * PI,
                (next() - 0.5) * 4.0 * PI,
                next() * 4.0 * PI,
                (next() - 0.5) * 4.0 * PI,
            );
            let u = single_qubit_u(&params);
            let udag_u = u.t().mapv(|z| z.conj()).dot(&u);
            assert_mat_close(&udag_u, &Array2::eye(2), 1e-13);
            let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
            assert!((det - Complex64::from_polar(1.0, 2.0 * params.alpha)).norm() < 1e-12);
        }
    }

    #[test]
    fn controlled_not_matrix() {
        let gate = ideal_controlled_u(2, &GateParams::new(FRAC_PI_2, 0.0, PI, PI)).unwrap();
        let mut cnot = Array2::eye(4);
        cnot[(2, 2)] = c(0.0, 0.0);
        cnot[(3, 3)] = c(0.0, 0.0);
        cnot[(2, 3)] = c(1.0, 0.0);
        cnot[(3, 2)] = c(1.0, 0.0);
        assert_mat_close(&gate.matrix, &cnot, 1e-14);
    }

    #[test]
    fn zero_angles_give_identity_gate() {
        let gate = ideal_controlled_u(2, &GateParams::new(0.0, 0.0, 0.0, 0.0)).unwrap();
        assert_mat_close(&gate.matrix, &Array2::eye(4), 1e-15);
        assert!(ideal_controlled_u(1, &GateParams::new(0.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn ideal_gate_differs_from_identity_only_in_last_block() {
        let mut seed = 7u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let params = GateParams::new(
                (next() - 0.5) * 2.0 * PI,
                (next() - 0.5) * 4.0 * PI,
                next() * 4.0 * PI,
                (next() - 0.5) * 4.0 * PI,
            );
            let gate = ideal_controlled_u(3, &params).unwrap();
            for row in 0..8 {
                for col in 0..8 {
                    if row < 6 || col < 6 {
                        let expected = if row == col { 1.0 } else { 0.0 };
                        assert!((gate.matrix[(row, col)] - c(expected, 0.0)).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn extract_from_identity_has_zero_leakage() {
        let layout = HilbertLayout::new(2, 1).unwrap();
        let full = OperatorMatrix::identity(layout);
        let (block, leakage) = extract_computational_gate(&full);
        assert_mat_close(&block, &Array2::eye(4), 1e-15);
        assert!(leakage.abs() < 1e-15);
    }

    #[test]
    fn extract_after_single_control_pulse_sees_full_leakage() {
        // One pi pulse on system 1 moves every control-|1> column out of
        // the computational subspace entirely.
        let params = GateParams::new(0.1, 0.2, 0.3, 0.4);
        let couplings = CouplingTable::uniform_squid(2, 5.8e9);
        let schedule = compile_controlled_u(2, &params, &couplings, Mode::Squid).unwrap();
        let layout = HilbertLayout::new(2, 1).unwrap();
        let u1 = step_matrices(&schedule, &layout).unwrap().remove(0);
        let (block, leakage) = extract_computational_gate(&u1);
        assert!((leakage - 1.0).abs() < 1e-12);
        // columns with the control in |0> are untouched
        for col in 0..2 {
            assert!((block[(col, col)] - c(1.0, 0.0)).norm() < 1e-14);
        }
        // columns with the control in |1> lose all computational weight
        for col in 2..4 {
            let col_norm: f64 = (0..4).map(|row| block[(row, col)].norm_sqr()).sum();
            assert!(col_norm < 1e-24);
        }
    }

    #[test]
    fn distances_on_simple_cases() {
        let ideal = ideal_controlled_u(2, &GateParams::new(0.3, 0.1, 1.0, -0.4)).unwrap();
        let same = gate_distance(&ideal.matrix, &ideal).unwrap();
        assert!(same.max_entry_error < 1e-15);
        assert!((same.fidelity - 1.0).abs() < 1e-15);

        let negated = ideal.matrix.mapv(|z| -z);
        let flipped = gate_distance(&negated, &ideal).unwrap();
        assert!((flipped.fidelity - 1.0).abs() < 1e-15);
        let max_abs = ideal.matrix.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        assert!((flipped.max_entry_error - 2.0 * max_abs).abs() < 1e-12);

        let mut zeroed = ideal.matrix.clone();
        for row in 0..4 {
            zeroed[(row, 1)] = c(0.0, 0.0);
        }
        let partial = gate_distance(&zeroed, &ideal).unwrap();
        assert!((partial.fidelity - (1.0 - 0.25)).abs() < 1e-12);
    }

    #[test]
    fn gate_distance_rejects_mismatched_dimensions() {
        let ideal = ideal_controlled_u(2, &GateParams::new(0.0, 0.0, 0.0, 0.0)).unwrap();
        let sim = Array2::<Complex64>::eye(8);
        assert!(gate_distance(&sim, &ideal).is_err());
    }

    #[test]
    fn end_to_end_controlled_not() {
        let params = GateParams::new(FRAC_PI_2, 0.0, PI, PI);
        let couplings = CouplingTable::uniform_squid(2, 5.8e9);
        let report = verify_controlled_u(2, &params, &couplings, Mode::Squid, 2, 1e-9).unwrap();
        assert!(report.pass, "report: {report:?}");
        assert!(report.max_entry_error < 1e-11);
        assert!((report.fidelity - 1.0).abs() < 1e-11);
        assert_eq!(report.steps, 15);
    }

    #[test]
    fn verify_report_flags_a_detuned_schedule() {
        // Sabotage one step duration; the report must fail.
        let params = GateParams::new(0.0, 0.0, PI, 0.0);
        let couplings = CouplingTable::uniform_squid(2, 5.8e9);
        let mut schedule = compile_controlled_u(2, &params, &couplings, Mode::Squid).unwrap();
        if let crate::propagators::PulseSpec::Resonant(ref mut s) = schedule.steps[6].spec {
            s.t *= 1.02;
        } else {
            panic!("expected resonant step at index 6");
        }
        let layout = HilbertLayout::new(2, 2).unwrap();
        let action = crate::compiler::computational_action(&schedule, &layout).unwrap();
        let ideal = ideal_controlled_u(2, &params).unwrap();
        let d = gate_distance(&action.block, &ideal).unwrap();
        assert!(d.max_entry_error > 1e-3);
        assert!(d.fidelity < 1.0 - 1e-6);
    }

    #[test]
    fn schedule_product_preserves_norm() {
        let params = GateParams::new(0.4, -0.9, 2.0, 1.1);
        let couplings = CouplingTable::uniform_squid(2, 5.8e9);
        let schedule = compile_controlled_u(2, &params, &couplings, Mode::Squid).unwrap();
        let layout = HilbertLayout::new(2, 2).unwrap();
        let mut state = StateVector::basis(layout, &[1, 1], 0).unwrap();
        for step in &schedule.steps {
            state = apply_pulse(layout, &step.spec, &state).unwrap();
            assert!((state.norm() - 1.0).abs() < 1e-12);
        }
    }
}
