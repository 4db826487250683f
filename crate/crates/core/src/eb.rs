//! Entanglement-breaking tests for single-mode channels.
//!
//! A single-mode channel `(K, 0, α)` with `det K > 0` is unitarily
//! equivalent to the phase-insensitive channel
//! `(√η_s·I, 0, √det α·I)`, `η_s = det K`, and is entanglement breaking iff
//! `√det α ≥ (1 + η_s)/2`. The Choi-state oracle here checks the same
//! property independently through the partial transpose of a two-mode
//! squeezed vacuum sent through the channel.

use serde::Serialize;

use crate::channel::{channel_is_physical, GaussianChannel};
use crate::error::{Error, Result};
use crate::linalg::{direct_sum, sym_eigen_desc, Mat};
use crate::relay::{sandwich_total, SandwichInput};
use crate::stations::{pia, psa};
use crate::symplectic::{symplectic_spectrum_direct, SymplecticMatrix};

/// Margins within this distance of zero count as on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Symplectic eigenvalues below `1/2 − NPT_TOL` mark an NPT state.
pub const NPT_TOL: f64 = 1e-10;

/// Default oracle squeezing schedule, as values of `cosh 2r`.
pub const DEFAULT_SCHEDULE: [f64; 4] = [1e1, 1e2, 1e3, 1e4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EbMethod {
    ClosedForm,
    ChoiPptOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EbVerdict {
    pub eb: bool,
    /// Signed distance to the boundary. For the closed form this is
    /// `√det α − (1 + det K)/2`; for the oracle, `min ν₋ − 1/2`.
    pub margin: f64,
    pub method: EbMethod,
    /// `|margin| ≤ BOUNDARY_TOL` (closed form only).
    pub boundary: bool,
    /// An oracle `eb = true` only says the state stayed PPT on the schedule.
    pub schedule_limited: bool,
    /// Smallest partially transposed symplectic eigenvalue seen by the oracle.
    pub min_nu: Option<f64>,
}

impl EbVerdict {
    fn closed_form(margin: f64) -> Self {
        EbVerdict {
            eb: margin >= -BOUNDARY_TOL,
            margin,
            method: EbMethod::ClosedForm,
            boundary: margin.abs() <= BOUNDARY_TOL,
            schedule_limited: false,
            min_nu: None,
        }
    }
}

/// `(√κ·I, 0, (|1−κ|/2 + N)·I)` is EB iff `N ≥ min(1, κ)`.
pub fn pic_is_eb(kappa: f64, noise: f64) -> Result<EbVerdict> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::out_of_range("kappa", kappa, "kappa >= 0"));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::out_of_range("noise", noise, "N >= 0"));
    }
    Ok(EbVerdict::closed_form(noise - kappa.min(1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// Phase-insensitive standard form (unitaries included).
    Pic,
    /// Rank-one noise: an additive-noise channel up to unitaries.
    Anc,
}

/// `Φ = U_V⁻¹ ∘ Φ_s ∘ U_W⁻¹` with `Φ_s = (√η_s·I, 0, √det α·I)`, i.e.
/// `V·K·W = √η_s·I` and `Wᵀ α W = √det α·I`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardForm {
    pub eta_s: f64,
    /// `√det α − |1 − η_s|/2`.
    pub noise: f64,
    pub v: SymplecticMatrix,
    pub w: SymplecticMatrix,
    pub branch: Branch,
    /// `det α = 0`: no squeezer makes α isotropic, `W` only rotates.
    pub regularized: bool,
}

fn det2(m: &Mat) -> f64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

fn single_mode_check(ch: &GaussianChannel) -> Result<f64> {
    if ch.modes() != 1 {
        return Err(Error::Unsupported(format!(
            "entanglement-breaking analysis is single-mode; channel has {} modes",
            ch.modes()
        )));
    }
    let det_k = det2(ch.k());
    if !(det_k > 0.0) {
        return Err(Error::Unsupported(format!(
            "det K = {det_k:.6e} <= 0 is outside the phase-insensitive/additive-noise classes"
        )));
    }
    Ok(det_k)
}

pub fn reduce_standard_form(ch: &GaussianChannel) -> Result<StandardForm> {
    let eta_s = single_mode_check(ch)?;
    if ch.m().iter().any(|&x| x != 0.0) {
        return Err(Error::Unsupported("standard form needs m = 0".into()));
    }
    let (lam, mut w0) = sym_eigen_desc(ch.alpha());
    if det2(&w0) < 0.0 {
        w0.column_mut(1).neg_mut();
    }
    let (l1, l2) = (lam[0], lam[1].max(0.0));
    let regularized = l2 <= 1e-14 * l1.max(1.0);
    let w = if regularized {
        w0
    } else {
        let c = (l1 * l2).powf(-0.25);
        &w0 * Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![c * l2.sqrt(), c * l1.sqrt()]))
    };
    let w = SymplecticMatrix::from_trusted(w);
    let k_inv = ch.k().clone().try_inverse().ok_or_else(|| Error::Numerical("singular K".into()))?;
    let v = SymplecticMatrix::from_trusted(w.inverse().matrix() * k_inv * eta_s.sqrt());
    let root = if regularized { 0.0 } else { det2(ch.alpha()).max(0.0).sqrt() };
    let branch = if regularized && l1 > 1e-14 { Branch::Anc } else { Branch::Pic };
    Ok(StandardForm {
        eta_s,
        noise: root - (1.0 - eta_s).abs() / 2.0,
        v,
        w,
        branch,
        regularized,
    })
}

/// Closed-form verdict for a single-mode channel with `det K > 0`.
pub fn classify(ch: &GaussianChannel) -> Result<EbVerdict> {
    let det_k = single_mode_check(ch)?;
    let root = det2(ch.alpha()).max(0.0).sqrt();
    Ok(EbVerdict::closed_form(root - (1.0 + det_k) / 2.0))
}

/// Verdict for `loss(η₂) ∘ station ∘ loss(η₁)`.
pub fn sandwich_is_eb(input: &SandwichInput) -> Result<EbVerdict> {
    if input.modes() != 1 {
        return Err(Error::Unsupported("sandwich EB test is single-mode".into()));
    }
    classify(&sandwich_total(input))
}

pub fn psa_sandwich_margin(eta1: f64, eta2: f64, gain: f64) -> Result<f64> {
    Ok(sandwich_is_eb(&SandwichInput::new(eta1, eta2, psa(gain, 0.0)?)?)?.margin)
}

pub fn pia_sandwich_margin(eta1: f64, eta2: f64, gain: f64) -> Result<f64> {
    Ok(sandwich_is_eb(&SandwichInput::new(eta1, eta2, pia(gain)?)?)?.margin)
}

/// Gain threshold of a sandwich; diverges when the relevant segment is lossless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Threshold {
    Finite(f64),
    Divergent,
}

impl Threshold {
    pub fn value(self) -> f64 {
        match self {
            Threshold::Finite(v) => v,
            Threshold::Divergent => f64::INFINITY,
        }
    }
}

fn check_eta(field: &str, eta: f64) -> Result<()> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(Error::out_of_range(field, eta, "0 < eta <= 1"))
    }
}

/// `G ≥ 1 + η₁/((1−η₁)(1−η₂))`.
pub fn psa_threshold(eta1: f64, eta2: f64) -> Result<Threshold> {
    check_eta("eta1", eta1)?;
    check_eta("eta2", eta2)?;
    if eta1 == 1.0 || eta2 == 1.0 {
        return Ok(Threshold::Divergent);
    }
    Ok(Threshold::Finite(1.0 + eta1 / ((1.0 - eta1) * (1.0 - eta2))))
}

/// `g ≥ 1/(1−η₁)`, independent of the second segment.
pub fn pia_threshold(eta1: f64) -> Result<Threshold> {
    check_eta("eta1", eta1)?;
    if eta1 == 1.0 {
        return Ok(Threshold::Divergent);
    }
    Ok(Threshold::Finite(1.0 / (1.0 - eta1)))
}

/// Bisection for the sign change of `f` on `[lo, hi]`, with `f(lo) < 0 ≤ f(hi)`.
pub fn bisect_flip(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    if f(lo)? >= 0.0 || f(hi)? < 0.0 {
        return Err(Error::Numerical(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Locates the gain at which `margin(gain)` crosses zero, starting at
/// `G = 1` and doubling the upper end until the margin is nonnegative.
pub fn locate_gain_flip(margin: impl Fn(f64) -> Result<f64>) -> Result<Threshold> {
    if margin(1.0)? >= 0.0 {
        return Ok(Threshold::Finite(1.0));
    }
    let mut hi = 2.0;
    while margin(hi)? < 0.0 {
        hi *= 2.0;
        if hi > 1e15 {
            return Ok(Threshold::Divergent);
        }
    }
    Ok(Threshold::Finite(bisect_flip(margin, hi / 2.0, hi)?))
}

/// Parameters of `A_η₂ ∘ S_{G₂,θ} ∘ A_g^N ∘ S_{G₁} ∘ A_η₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PicFamilyParams {
    pub g: f64,
    pub noise: f64,
    pub g1: f64,
    pub g2: f64,
    pub theta: f64,
    pub eta1: f64,
    pub eta2: f64,
}

impl PicFamilyParams {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [("g", self.g), ("G1", self.g1), ("G2", self.g2)] {
            if !(v >= 1.0 && v.is_finite()) {
                return Err(Error::out_of_range(field, v, ">= 1"));
            }
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::out_of_range("noise", self.noise, "N >= 0"));
        }
        if !self.theta.is_finite() {
            return Err(Error::out_of_range("theta", self.theta, "a finite angle"));
        }
        check_eta("eta1", self.eta1)?;
        check_eta("eta2", self.eta2)
    }
}

fn squeeze_diag(gain: f64) -> Mat {
    let up = gain.sqrt() + (gain - 1.0).sqrt();
    Mat::from_row_slice(2, 2, &[up, 0.0, 0.0, 1.0 / up])
}

/// `(K, α)` of the family, assembled matrix by matrix.
pub fn assemble_pic_family(p: &PicFamilyParams) -> Result<(Mat, Mat)> {
    p.validate()?;
    let (s, c) = p.theta.sin_cos();
    let r = Mat::from_row_slice(2, 2, &[c, s, -s, c]);
    let s1 = squeeze_diag(p.g1);
    let k_theta = &r * squeeze_diag(p.g2) * r.transpose();
    let k = &s1 * &k_theta * (p.g * p.eta1 * p.eta2).sqrt();
    let kt = k_theta.transpose();
    let alpha = (&kt * &s1 * &s1 * &k_theta * (p.eta2 * (1.0 - p.eta1) * p.g)
        + &kt * &k_theta * (p.eta2 * ((p.g - 1.0).abs() + 2.0 * p.noise))
        + Mat::identity(2, 2) * (1.0 - p.eta2))
        * 0.5;
    Ok((k, alpha))
}

pub fn det_alpha_direct(p: &PicFamilyParams) -> Result<f64> {
    Ok(det2(&assemble_pic_family(p)?.1))
}

/// Closed form of `det α` for `N = 0`, `g ≥ 1`.
pub fn det_alpha_closed_form(p: &PicFamilyParams) -> Result<f64> {
    p.validate()?;
    if p.noise != 0.0 {
        return Err(Error::Unsupported("closed-form det α needs N = 0".into()));
    }
    let PicFamilyParams { g, g1, g2, theta, eta1: e1, eta2: e2, .. } = *p;
    let root = (g1 * g2).sqrt();
    let cross = root + ((g1 - 1.0) * (g2 - 1.0)).sqrt() * (2.0 * theta).cos();
    let bracket = g2 * (1.0 - g * e1) * (1.0 - e2) + g * g1 * (1.0 - e1) * (1.0 - g * e2)
        - 2.0 * g * root * (1.0 - e1) * (1.0 - e2) * cross;
    Ok(((1.0 - g * e1 * e2).powi(2) - 4.0 * e2 * bracket) / 4.0)
}

/// Closed form when `N = 0`, direct determinant otherwise.
pub fn det_alpha_general(p: &PicFamilyParams) -> Result<f64> {
    if p.noise == 0.0 {
        det_alpha_closed_form(p)
    } else {
        det_alpha_direct(p)
    }
}

/// Covariance matrix, in `(x₁, x₂, p₁, p₂)` order, of a two-mode squeezed
/// vacuum with `cosh 2r = c` after `ch` acts on mode 2 and `p₂ → −p₂`.
pub fn tmsv_choi_pt(ch: &GaussianChannel, c: f64) -> Result<Mat> {
    single_mode_check(ch)?;
    if !(c >= 1.0 && c.is_finite()) {
        return Err(Error::out_of_range("cosh2r", c, ">= 1"));
    }
    let s = (c * c - 1.0).sqrt();
    let z = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    // Mode blocks in (x, p) order per mode.
    let a = Mat::identity(2, 2) * (c / 2.0);
    let cross = &z * (s / 2.0);
    let mut blocks = Mat::zeros(4, 4);
    blocks.view_mut((0, 0), (2, 2)).copy_from(&a);
    blocks.view_mut((2, 2), (2, 2)).copy_from(&a);
    blocks.view_mut((0, 2), (2, 2)).copy_from(&cross);
    blocks.view_mut((2, 0), (2, 2)).copy_from(&cross);
    let big_k = direct_sum(&Mat::identity(2, 2), ch.k());
    let big_a = direct_sum(&Mat::zeros(2, 2), ch.alpha());
    let mut out = big_k.transpose() * blocks * big_k + big_a;
    // Partial transpose on mode 2.
    for i in 0..4 {
        out[(3, i)] = -out[(3, i)];
        out[(i, 3)] = -out[(i, 3)];
    }
    // Per-mode (x₁, p₁, x₂, p₂) to (x₁, x₂, p₁, p₂).
    let perm = [0usize, 2, 1, 3];
    Ok(Mat::from_fn(4, 4, |i, j| out[(perm[i], perm[j])]))
}

/// Smallest partially transposed symplectic eigenvalue, from the two-mode
/// invariants `det γ` and `Δ̃`, arranged so that no large terms cancel at
/// strong squeezing.
pub fn tmsv_min_nu(ch: &GaussianChannel, c: f64) -> Result<f64> {
    let det_k = single_mode_check(ch)?;
    if !(c >= 1.0 && c.is_finite()) {
        return Err(Error::out_of_range("cosh2r", c, ">= 1"));
    }
    let k = ch.k();
    let alpha = ch.alpha();
    let ktk = k.transpose() * k;
    let det = c * c / 4.0 * det2(&(alpha + &ktk / (2.0 * c)));
    // tr(adj(KᵀK)·α)
    let adj_tr = ktk[(1, 1)] * alpha[(0, 0)] + ktk[(0, 0)] * alpha[(1, 1)]
        - ktk[(0, 1)] * alpha[(1, 0)]
        - ktk[(1, 0)] * alpha[(0, 1)];
    let delta =
        c * c / 4.0 * (1.0 + det_k).powi(2) - det_k / 2.0 + c / 2.0 * adj_tr + det2(alpha);
    let disc = (delta * delta - 4.0 * det).max(0.0).sqrt();
    Ok((2.0 * det.max(0.0) / (delta + disc)).sqrt())
}

/// PPT test of the channel's action on two-mode squeezed vacua.
pub fn choi_ppt_oracle(ch: &GaussianChannel, schedule: &[f64]) -> Result<EbVerdict> {
    if schedule.is_empty() {
        return Err(Error::out_of_range("schedule", 0.0, "at least one squeezing strength"));
    }
    let ph = channel_is_physical(ch);
    if !ph.physical {
        return Err(Error::Unphysical {
            what: "channel",
            min_eigenvalue: ph.min_eigenvalue,
        });
    }
    let mut min_nu = f64::INFINITY;
    for &c in schedule {
        min_nu = min_nu.min(tmsv_min_nu(ch, c)?);
    }
    let eb = min_nu >= 0.5 - NPT_TOL;
    Ok(EbVerdict {
        eb,
        margin: min_nu - 0.5,
        method: EbMethod::ChoiPptOracle,
        boundary: false,
        schedule_limited: eb,
        min_nu: Some(min_nu),
    })
}

/// Same as `tmsv_min_nu`, from the explicit 4×4 matrix.
pub fn tmsv_min_nu_explicit(ch: &GaussianChannel, c: f64) -> Result<f64> {
    let spectrum = symplectic_spectrum_direct(&tmsv_choi_pt(ch, c)?)?;
    Ok(spectrum.iter().copied().fold(f64::INFINITY, f64::min))
}

/// `log₂((1+η)/(1−η))` bits per mode; infinite for a lossless line.
pub fn rate_upper_bound(eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::out_of_range("eta", eta, "0 < eta <= 1"));
    }
    if eta == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok((eta.ln_1p() - (-eta).ln_1p()) / std::f64::consts::LN_2)
}
