//! Numeric tolerances shared by every validation in the crate.
//!
//! All comparisons are relative Frobenius-norm comparisons except the
//! Hermitian positivity floor, which is absolute. The defaults can be
//! replaced process-wide with [`set_policy`].

use std::sync::atomic::{AtomicU64, Ordering};

/// Tolerance for algebraic identities (symplecticity, compositions).
pub const ALGEBRAIC_TOL: f64 = 1e-10;
/// Tolerance for results that pass through an eigen-decomposition.
pub const EIGEN_TOL: f64 = 1e-9;
/// Absolute floor on the minimum eigenvalue of a Hermitian positivity test.
pub const PSD_FLOOR: f64 = 1e-10;
/// Largest mode count accepted by the validators.
pub const MAX_MODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    pub algebraic: f64,
    pub eigen: f64,
    pub psd_floor: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        NumericPolicy {
            algebraic: ALGEBRAIC_TOL,
            eigen: EIGEN_TOL,
            psd_floor: PSD_FLOOR,
        }
    }
}

impl NumericPolicy {
    /// Policy with every tolerance scaled so that `algebraic == tol`.
    pub fn scaled(tol: f64) -> Self {
        let k = tol / ALGEBRAIC_TOL;
        NumericPolicy {
            algebraic: tol,
            eigen: EIGEN_TOL * k,
            psd_floor: PSD_FLOOR * k,
        }
    }
}

static ALGEBRAIC: AtomicU64 = AtomicU64::new(0);
static EIGEN: AtomicU64 = AtomicU64::new(0);
static FLOOR: AtomicU64 = AtomicU64::new(0);

fn load(cell: &AtomicU64, default: f64) -> f64 {
    match cell.load(Ordering::Relaxed) {
        0 => default,
        bits => f64::from_bits(bits),
    }
}

/// The policy currently in force.
pub fn policy() -> NumericPolicy {
    NumericPolicy {
        algebraic: load(&ALGEBRAIC, ALGEBRAIC_TOL),
        eigen: load(&EIGEN, EIGEN_TOL),
        psd_floor: load(&FLOOR, PSD_FLOOR),
    }
}

/// Install a process-wide policy. Intended to be called once at startup.
pub fn set_policy(p: NumericPolicy) {
    ALGEBRAIC.store(p.algebraic.to_bits(), Ordering::Relaxed);
    EIGEN.store(p.eigen.to_bits(), Ordering::Relaxed);
    FLOOR.store(p.psd_floor.to_bits(), Ordering::Relaxed);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_without_override() {
        let p = NumericPolicy::default();
        assert_eq!(p.algebraic, 1e-10);
        assert_eq!(p.eigen, 1e-9);
        assert_eq!(p.psd_floor, 1e-10);
    }

    #[test]
    fn scaled_keeps_ratios() {
        let p = NumericPolicy::scaled(1e-8);
        assert!((p.eigen / p.algebraic - 10.0).abs() < 1e-12);
        assert!((p.psd_floor - 1e-8).abs() < 1e-20);
    }
}
