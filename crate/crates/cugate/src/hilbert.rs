//! States and operators on the composite space of `n` three-level systems
//! and one truncated cavity mode.
//!
//! The tensor ordering is fixed: system 1 is the most significant factor,
//! the cavity is the least significant. A basis index therefore decomposes
//! as `index = (level string, base 3) * (N_max + 1) + photons`, which makes
//! index arithmetic cheap and reproducible.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dimensional bookkeeping for `n` three-level systems plus one cavity mode
/// truncated at `fock_cutoff` photons (cavity dimension `fock_cutoff + 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertLayout {
    n_systems: usize,
    fock_cutoff: usize,
}

impl HilbertLayout {
    /// Build a layout. Rejects `n_systems = 0` and `fock_cutoff = 0`
    /// (at least one photon must be representable).
    pub fn new(n_systems: usize, fock_cutoff: usize) -> Result<Self> {
        if n_systems == 0 || fock_cutoff == 0 {
            return Err(Error::InvalidLayout {
                n_systems,
                fock_cutoff,
            });
        }
        Ok(Self {
            n_systems,
            fock_cutoff,
        })
    }

    pub fn n_systems(&self) -> usize {
        self.n_systems
    }

    /// Highest representable photon number N_max.
    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    /// Cavity dimension, `N_max + 1`.
    pub fn cavity_dim(&self) -> usize {
        self.fock_cutoff + 1
    }

    /// Total dimension `3^n * (N_max + 1)`.
    pub fn dim(&self) -> usize {
        3usize.pow(self.n_systems as u32) * self.cavity_dim()
    }

    /// Index stride of one level step on `system` (0-based).
    fn system_stride(&self, system: usize) -> usize {
        3usize.pow((self.n_systems - 1 - system) as u32) * self.cavity_dim()
    }

    /// Basis index of `|levels...>|photons>_c`.
    pub fn index_of(&self, levels: &[u8], photons: usize) -> Result<usize> {
        if levels.len() != self.n_systems {
            return Err(Error::WrongLevelCount {
                expected: self.n_systems,
                got: levels.len(),
            });
        }
        if photons > self.fock_cutoff {
            return Err(Error::PhotonOverflow {
                photons,
                max: self.fock_cutoff,
            });
        }
        let mut idx = 0usize;
        for &l in levels {
            if l > 2 {
                return Err(Error::LevelOutOfRange(l));
            }
            idx = idx * 3 + l as usize;
        }
        Ok(idx * self.cavity_dim() + photons)
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn split_index(&self, index: usize) -> (Vec<u8>, usize) {
        let photons = index % self.cavity_dim();
        let mut rest = index / self.cavity_dim();
        let mut levels = vec![0u8; self.n_systems];
        for slot in levels.iter_mut().rev() {
            *slot = (rest % 3) as u8;
            rest /= 3;
        }
        (levels, photons)
    }

    /// Level of one system in basis state `index`, without allocating.
    pub fn level_at(&self, index: usize, system: usize) -> u8 {
        ((index / self.system_stride(system)) % 3) as u8
    }

    /// Photon number of basis state `index`.
    pub fn photons_at(&self, index: usize) -> usize {
        index % self.cavity_dim()
    }

    /// Basis index equal to `index` except for the level of `system`.
    pub fn with_level(&self, index: usize, system: usize, level: u8) -> usize {
        let stride = self.system_stride(system);
        let old = (index / stride) % 3;
        index - old * stride + level as usize * stride
    }

    /// Basis index equal to `index` except for the photon number.
    pub fn with_photons(&self, index: usize, photons: usize) -> usize {
        index - self.photons_at(index) + photons
    }

    fn check_system(&self, system: usize) -> Result<()> {
        if system >= self.n_systems {
            return Err(Error::SystemOutOfRange {
                system,
                n_systems: self.n_systems,
            });
        }
        Ok(())
    }
}

/// Normalized state on a [`HilbertLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub layout: HilbertLayout,
    pub amplitudes: Array1<Complex64>,
}

impl StateVector {
    /// Zero state (all amplitudes zero); mostly a building block.
    pub fn zeros(layout: HilbertLayout) -> Self {
        Self {
            layout,
            amplitudes: Array1::zeros(layout.dim()),
        }
    }

    /// Computational basis ket `|levels...>|photons>_c`.
    pub fn basis(layout: HilbertLayout, levels: &[u8], photons: usize) -> Result<Self> {
        let idx = layout.index_of(levels, photons)?;
        let mut amplitudes = Array1::zeros(layout.dim());
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(Self { layout, amplitudes })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest per-amplitude deviation from `other`.
    pub fn max_amp_diff(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Dense operator on a [`HilbertLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub layout: HilbertLayout,
    pub entries: Array2<Complex64>,
}

impl OperatorMatrix {
    pub fn identity(layout: HilbertLayout) -> Self {
        Self {
            layout,
            entries: Array2::eye(layout.dim()),
        }
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    /// Matrix-vector application; preserves the norm for unitary operators.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.layout != self.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(StateVector {
            layout: self.layout,
            amplitudes: self.entries.dot(&state.amplitudes),
        })
    }

    /// Matrix product `self * rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &OperatorMatrix) -> Result<OperatorMatrix> {
        if rhs.layout != self.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(OperatorMatrix {
            layout: self.layout,
            entries: self.entries.dot(&rhs.entries),
        })
    }

    pub fn dagger(&self) -> OperatorMatrix {
        OperatorMatrix {
            layout: self.layout,
            entries: self.entries.t().mapv(|z| z.conj()),
        }
    }

    /// Largest entry of `U^dag U - I`.
    pub fn unitarity_defect(&self) -> f64 {
        let product = self.dagger().entries.dot(&self.entries);
        let mut worst = 0.0f64;
        for ((i, j), v) in product.indexed_iter() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - Complex64::new(target, 0.0)).norm());
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() < tol
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_entry_diff(&self, other: &OperatorMatrix) -> f64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Site addressed by a local operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    /// One of the three-level systems, 0-based.
    System(usize),
    Cavity,
}

/// Embed a local operator as `I (x) ... (x) op (x) ... (x) I` in the fixed
/// tensor ordering. `local_op` must be 3x3 for a system site and
/// `(N_max + 1) x (N_max + 1)` for the cavity.
pub fn embed_local(
    layout: HilbertLayout,
    site: Site,
    local_op: &Array2<Complex64>,
) -> Result<OperatorMatrix> {
    let site_dim = match site {
        Site::System(s) => {
            layout.check_system(s)?;
            3
        }
        Site::Cavity => layout.cavity_dim(),
    };
    if local_op.nrows() != site_dim || local_op.ncols() != site_dim {
        return Err(Error::DimensionMismatch {
            expected: site_dim,
            got: local_op.nrows().max(local_op.ncols()),
        });
    }

    let stride = match site {
        Site::System(s) => layout.system_stride(s),
        Site::Cavity => 1,
    };
    let dim = layout.dim();
    let mut entries = Array2::zeros((dim, dim));
    for col in 0..dim {
        let a = (col / stride) % site_dim;
        let base = col - a * stride;
        for b in 0..site_dim {
            let v = local_op[(b, a)];
            if v != Complex64::new(0.0, 0.0) {
                entries[(base + b * stride, col)] = v;
            }
        }
    }
    Ok(OperatorMatrix { layout, entries })
}

/// Annihilation operator on the truncated cavity space:
/// `a|n> = sqrt(n)|n-1>`, `a|0> = 0`.
pub fn annihilation(cavity_dim: usize) -> Array2<Complex64> {
    let mut a = Array2::zeros((cavity_dim, cavity_dim));
    for n in 1..cavity_dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// `|bra><ket|` on a single three-level system.
pub fn level_projector(bra: u8, ket: u8) -> Array2<Complex64> {
    let mut p = Array2::zeros((3, 3));
    p[(bra as usize, ket as usize)] = Complex64::new(1.0, 0.0);
    p
}
