//! Named channel constructors.

use serde::{Deserialize, Serialize};

use crate::channel::GaussianChannel;
use crate::error::{Error, Result};
use crate::linalg::{Mat, Vector};
use crate::symplectic::{check_modes, rotation, squeezer_angled};

fn finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::out_of_range(field, v, "a finite number"))
    }
}

/// Pure loss of transmittance `eta ∈ (0, 1]` on `n` modes:
/// `(√η·I, 0, (1−η)/2·I)`.
pub fn loss(eta: f64, n: usize) -> Result<GaussianChannel> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::out_of_range("eta", eta, "0 < eta <= 1"));
    }
    check_modes(n)?;
    let id = Mat::identity(2 * n, 2 * n);
    Ok(GaussianChannel::from_trusted(
        &id * eta.sqrt(),
        Vector::zeros(2 * n),
        id * ((1.0 - eta) / 2.0),
    ))
}

/// Phase-insensitive channel `(√κ·I, 0, (|1−κ|/2 + N)·I)`.
pub fn pic(kappa: f64, noise: f64) -> Result<GaussianChannel> {
    finite("kappa", kappa)?;
    finite("noise", noise)?;
    if kappa < 0.0 {
        return Err(Error::out_of_range("kappa", kappa, "kappa >= 0"));
    }
    if noise < 0.0 {
        return Err(Error::out_of_range("noise", noise, "N >= 0"));
    }
    let id = Mat::identity(2, 2);
    Ok(GaussianChannel::from_trusted(
        &id * kappa.sqrt(),
        Vector::zeros(2),
        id * ((1.0 - kappa).abs() / 2.0 + noise),
    ))
}

/// Additive noise channel `(I, 0, ½·diag(0, ε))`.
pub fn anc(epsilon: f64) -> Result<GaussianChannel> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::out_of_range("epsilon", epsilon, "epsilon > 0"));
    }
    let mut alpha = Mat::zeros(2, 2);
    alpha[(1, 1)] = epsilon / 2.0;
    Ok(GaussianChannel::from_trusted(Mat::identity(2, 2), Vector::zeros(2), alpha))
}

/// Quantum-limited phase-sensitive amplifier: the unitary channel of
/// `squeezer_angled(G, θ')`.
pub fn psa(gain: f64, angle: f64) -> Result<GaussianChannel> {
    finite("angle", angle)?;
    Ok(GaussianChannel::unitary(&squeezer_angled(gain, angle)?))
}

/// Quantum-limited phase-insensitive amplifier, `pic(g, 0)` for `g ≥ 1`.
pub fn pia(gain: f64) -> Result<GaussianChannel> {
    if !(gain >= 1.0 && gain.is_finite()) {
        return Err(Error::out_of_range("gain", gain, "g >= 1"));
    }
    pic(gain, 0.0)
}

pub fn rotation_channel(theta: f64) -> GaussianChannel {
    GaussianChannel::unitary(&rotation(theta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StationKind {
    Loss,
    Pic,
    Anc,
    Psa,
    Pia,
    Rotation,
}

impl StationKind {
    pub const ALL: [StationKind; 6] = [
        StationKind::Loss,
        StationKind::Pic,
        StationKind::Anc,
        StationKind::Psa,
        StationKind::Pia,
        StationKind::Rotation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StationKind::Loss => "loss",
            StationKind::Pic => "pic",
            StationKind::Anc => "anc",
            StationKind::Psa => "psa",
            StationKind::Pia => "pia",
            StationKind::Rotation => "rotation",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Parameter keys in canonical order.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            StationKind::Loss => &["eta"],
            StationKind::Pic => &["kappa", "noise"],
            StationKind::Anc => &["epsilon"],
            StationKind::Psa => &["gain", "angle"],
            StationKind::Pia => &["gain"],
            StationKind::Rotation => &["theta"],
        }
    }

    /// Defaults for optional keys; `None` marks a required key.
    pub fn default_for(self, key: &str) -> Option<f64> {
        match (self, key) {
            (StationKind::Psa, "angle") => Some(0.0),
            (StationKind::Pic, "noise") => Some(0.0),
            _ => None,
        }
    }
}

/// One named station with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StationSpec {
    Loss { eta: f64 },
    Pic { kappa: f64, noise: f64 },
    Anc { epsilon: f64 },
    Psa { gain: f64, angle: f64 },
    Pia { gain: f64 },
    Rotation { theta: f64 },
}

impl StationSpec {
    pub fn kind(&self) -> StationKind {
        match self {
            StationSpec::Loss { .. } => StationKind::Loss,
            StationSpec::Pic { .. } => StationKind::Pic,
            StationSpec::Anc { .. } => StationKind::Anc,
            StationSpec::Psa { .. } => StationKind::Psa,
            StationSpec::Pia { .. } => StationKind::Pia,
            StationSpec::Rotation { .. } => StationKind::Rotation,
        }
    }

    /// Parameters in the order of [`StationKind::keys`].
    pub fn params(&self) -> Vec<f64> {
        match *self {
            StationSpec::Loss { eta } => vec![eta],
            StationSpec::Pic { kappa, noise } => vec![kappa, noise],
            StationSpec::Anc { epsilon } => vec![epsilon],
            StationSpec::Psa { gain, angle } => vec![gain, angle],
            StationSpec::Pia { gain } => vec![gain],
            StationSpec::Rotation { theta } => vec![theta],
        }
    }

    pub fn from_params(kind: StationKind, p: &[f64]) -> Result<Self> {
        if p.len() != kind.keys().len() {
            return Err(Error::Dimension(format!(
                "{} takes {} parameters, got {}",
                kind.name(),
                kind.keys().len(),
                p.len()
            )));
        }
        Ok(match kind {
            StationKind::Loss => StationSpec::Loss { eta: p[0] },
            StationKind::Pic => StationSpec::Pic { kappa: p[0], noise: p[1] },
            StationKind::Anc => StationSpec::Anc { epsilon: p[0] },
            StationKind::Psa => StationSpec::Psa { gain: p[0], angle: p[1] },
            StationKind::Pia => StationSpec::Pia { gain: p[0] },
            StationKind::Rotation => StationSpec::Rotation { theta: p[0] },
        })
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        let i = self.kind().keys().iter().position(|k| *k == key)?;
        Some(self.params()[i])
    }

    pub fn with(&self, key: &str, value: f64) -> Option<Self> {
        let kind = self.kind();
        let i = kind.keys().iter().position(|k| *k == key)?;
        let mut p = self.params();
        p[i] = value;
        Self::from_params(kind, &p).ok()
    }

    /// Gain-like parameter used in sweep tables (κ, G or g).
    pub fn gain(&self) -> Option<f64> {
        match *self {
            StationSpec::Pic { kappa, .. } => Some(kappa),
            StationSpec::Psa { gain, .. } | StationSpec::Pia { gain } => Some(gain),
            _ => None,
        }
    }

    /// Builds the channel. Only `loss` supports more than one mode.
    pub fn build(&self, modes: usize) -> Result<GaussianChannel> {
        if modes != 1 && !matches!(self, StationSpec::Loss { .. }) {
            return Err(Error::Dimension(format!(
                "{} is a single-mode station, scenario has {modes} modes",
                self.kind().name()
            )));
        }
        match *self {
            StationSpec::Loss { eta } => loss(eta, modes),
            StationSpec::Pic { kappa, noise } => pic(kappa, noise),
            StationSpec::Anc { epsilon } => anc(epsilon),
            StationSpec::Psa { gain, angle } => psa(gain, angle),
            StationSpec::Pia { gain } => pia(gain),
            StationSpec::Rotation { theta } => {
                finite("theta", theta)?;
                Ok(rotation_channel(theta))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply, channel_is_physical, compose, GaussianState};
    use crate::linalg::rel_frobenius;
    use crate::symplectic::symplectic_residual;

    #[test]
    fn loss_examples() {
        let one = loss(1.0, 2).unwrap();
        assert_eq!(one, GaussianChannel::identity(2));
        let q = loss(0.25, 1).unwrap();
        assert_eq!(q.k(), &(Mat::identity(2, 2) * 0.5));
        assert_eq!(q.alpha(), &(Mat::identity(2, 2) * 0.375));
        for bad in [0.0, -0.1, 1.2, f64::NAN] {
            assert!(matches!(loss(bad, 1), Err(Error::OutOfRange { .. })), "{bad}");
        }
        assert!(loss(0.5, 0).is_err());
    }

    #[test]
    fn pic_examples() {
        assert_eq!(pic(1.0, 0.0).unwrap(), GaussianChannel::identity(1));
        let half = pic(0.5, 0.0).unwrap();
        let l = loss(0.5, 1).unwrap();
        assert!(rel_frobenius(half.k(), l.k()) < 1e-16);
        assert!(rel_frobenius(half.alpha(), l.alpha()) < 1e-16);
        assert_eq!(pic(2.0, 0.0).unwrap().alpha(), &(Mat::identity(2, 2) * 0.5));
        assert!(pic(-1.0, 0.0).is_err());
        assert!(pic(1.0, -0.1).is_err());
    }

    #[test]
    fn anc_examples() {
        let a = anc(1.0).unwrap();
        assert_eq!(a.alpha(), &Mat::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 0.5]));
        let out = apply(&a, &GaussianState::vacuum(1)).unwrap();
        assert_eq!(out.gamma(), &Mat::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 1.0]));
        assert!(channel_is_physical(&anc(10.0).unwrap()).physical);
        assert!(anc(0.0).is_err());
    }

    #[test]
    fn psa_examples() {
        assert!(rel_frobenius(psa(1.0, 0.3).unwrap().k(), &Mat::identity(2, 2)) < 1e-15);
        let p = psa(3.0, 0.0).unwrap();
        let (a, b) = (3f64.sqrt(), 2f64.sqrt());
        assert!((p.k()[(0, 0)] - (a + b)).abs() < 1e-15);
        assert!((p.k()[(1, 1)] - (a - b)).abs() < 1e-14);
        assert!(p.is_unitary());
        assert!(channel_is_physical(&p).min_eigenvalue.abs() < 1e-12);
        assert!(psa(0.9, 0.0).is_err());
    }

    #[test]
    fn pia_examples() {
        assert_eq!(pia(1.0).unwrap(), GaussianChannel::identity(1));
        assert_eq!(pia(2.0).unwrap().alpha(), &(Mat::identity(2, 2) * 0.5));
        let ph = channel_is_physical(&pia(7.5).unwrap());
        assert!(ph.min_eigenvalue.abs() < 1e-12);
        assert!(pia(0.5).is_err());
    }

    #[test]
    fn rotation_channel_examples() {
        assert_eq!(rotation_channel(0.0), GaussianChannel::identity(1));
        let back = compose(&rotation_channel(0.7), &rotation_channel(-0.7)).unwrap();
        assert!(rel_frobenius(back.k(), &Mat::identity(2, 2)) < 1e-15);
        assert!(symplectic_residual(rotation_channel(1.3).k()) < 1e-15);
    }

    #[test]
    fn rotation_commutes_with_pic() {
        let r = rotation_channel(0.9);
        let p = pic(1.7, 0.2).unwrap();
        let a = compose(&r, &p).unwrap();
        let b = compose(&p, &r).unwrap();
        assert!(rel_frobenius(a.k(), b.k()) < 1e-15);
        assert!(rel_frobenius(a.alpha(), b.alpha()) < 1e-15);
    }

    #[test]
    fn spec_param_access() {
        let s = StationSpec::Psa { gain: 2.0, angle: 0.1 };
        assert_eq!(s.get("gain"), Some(2.0));
        assert_eq!(s.with("gain", 3.0), Some(StationSpec::Psa { gain: 3.0, angle: 0.1 }));
        assert_eq!(s.get("eta"), None);
        assert!(StationSpec::Pia { gain: 2.0 }.build(2).is_err());
        assert_eq!(StationKind::from_name("anc"), Some(StationKind::Anc));
        assert_eq!(StationKind::from_name("amp"), None);
    }
}
