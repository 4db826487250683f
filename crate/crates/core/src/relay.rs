//! Collecting all loss of a relay chain into one segment.
//!
//! A station `(K, 0, α)` between losses `η₁` (before) and `η₂` (after) is
//! rewritten as `back ∘ loss(η₁η₂) ∘ front` where `back = (M⁻¹, 0, 0)` is a
//! Gaussian unitary. `M` brings the covariance matrix
//! `γ′ = p·(KᵀK + 2α)/2 + (1−p)·I/2`, `p = η₂(1−η₁)/(1−η₁η₂)`, to its
//! Williamson form, and the front channel is
//! `(K·M, 0, (Mᵀ α_t M − (1−η₁η₂)/2·I)/(η₁η₂))`.

use crate::channel::{channel_is_physical, compose, ChannelChain, GaussianChannel};
use crate::error::{Error, Result};
use crate::linalg::{rel_frobenius, symmetrize, Mat, Vector};
use crate::stations::{loss, pic, psa};
use crate::symplectic::{squeezer, williamson, SymplecticMatrix};

fn check_eta(field: &str, eta: f64) -> Result<()> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(Error::out_of_range(field, eta, "0 < eta <= 1"))
    }
}

/// A station between two loss segments.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichInput {
    eta1: f64,
    eta2: f64,
    station: GaussianChannel,
}

impl SandwichInput {
    pub fn new(eta1: f64, eta2: f64, station: GaussianChannel) -> Result<Self> {
        check_eta("eta1", eta1)?;
        check_eta("eta2", eta2)?;
        if station.m().iter().any(|&x| x != 0.0) {
            return Err(Error::Unsupported(
                "station carries a displacement; extract displacements before decomposing".into(),
            ));
        }
        let ph = channel_is_physical(&station);
        if !ph.physical {
            return Err(Error::Unphysical {
                what: "station",
                min_eigenvalue: ph.min_eigenvalue,
            });
        }
        Ok(SandwichInput { eta1, eta2, station })
    }

    pub fn eta1(&self) -> f64 {
        self.eta1
    }

    pub fn eta2(&self) -> f64 {
        self.eta2
    }

    pub fn station(&self) -> &GaussianChannel {
        &self.station
    }

    pub fn modes(&self) -> usize {
        self.station.modes()
    }
}

/// `(√(η₁η₂)·K, 0, η₂((1−η₁)/2·KᵀK + α) + (1−η₂)/2·I)`.
pub fn sandwich_total(input: &SandwichInput) -> GaussianChannel {
    let (e1, e2) = (input.eta1, input.eta2);
    let k = input.station.k();
    let n2 = 2 * input.modes();
    let ktk = k.transpose() * k;
    let alpha = (ktk * ((1.0 - e1) / 2.0) + input.station.alpha()) * e2 + Mat::identity(n2, n2) * ((1.0 - e2) / 2.0);
    GaussianChannel::from_trusted(k * (e1 * e2).sqrt(), Vector::zeros(n2), symmetrize(&alpha))
}

/// Intermediate objects of the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Witnesses {
    /// `(KᵀK + 2α)/2`, a valid covariance matrix for any physical station.
    pub gamma: Mat,
    /// `p·γ + (1−p)·I/2`.
    pub gamma_prime: Mat,
    pub mixing: f64,
    /// Williamson transform of `γ′`.
    pub transform: SymplecticMatrix,
    pub spectrum: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichDecomposition {
    pub front: GaussianChannel,
    pub loss: GaussianChannel,
    pub back: GaussianChannel,
    /// `None` for the lossless `(1, 1)` case.
    pub witnesses: Option<Witnesses>,
}

impl SandwichDecomposition {
    pub fn recompose(&self) -> GaussianChannel {
        let fl = compose(&self.front, &self.loss).expect("uniform modes");
        compose(&fl, &self.back).expect("uniform modes")
    }
}

/// Relative Frobenius errors `(on K, on α)` between two channels.
pub fn channel_error(a: &GaussianChannel, b: &GaussianChannel) -> (f64, f64) {
    (rel_frobenius(a.k(), b.k()), rel_frobenius(a.alpha(), b.alpha()))
}

pub fn decompose_sandwich(input: &SandwichInput) -> Result<SandwichDecomposition> {
    let n = input.modes();
    let (e1, e2) = (input.eta1, input.eta2);
    let eta = e1 * e2;
    if eta == 1.0 {
        return Ok(SandwichDecomposition {
            front: input.station.clone(),
            loss: GaussianChannel::identity(n),
            back: GaussianChannel::identity(n),
            witnesses: None,
        });
    }
    let id = Mat::identity(2 * n, 2 * n);
    let k = input.station.k();
    let alpha = input.station.alpha();
    let gamma = symmetrize(&((k.transpose() * k + alpha * 2.0) * 0.5));
    let p = e2 * (1.0 - e1) / (1.0 - eta);
    let gamma_prime = symmetrize(&(&gamma * p + &id * ((1.0 - p) * 0.5)));
    let w = williamson(&gamma_prime)?;
    let m = w.transform.matrix();

    let total = sandwich_total(input);
    let k_front = k * m;
    let alpha_front = (m.transpose() * total.alpha() * m - &id * ((1.0 - eta) / 2.0)) / eta;
    Ok(SandwichDecomposition {
        front: GaussianChannel::from_trusted(k_front, Vector::zeros(2 * n), symmetrize(&alpha_front)),
        loss: loss(eta, n)?,
        back: GaussianChannel::unitary(&w.transform.inverse()),
        witnesses: Some(Witnesses {
            gamma,
            gamma_prime,
            mixing: p,
            transform: w.transform,
            spectrum: w.spectrum,
        }),
    })
}

/// One element of an alternating loss/station chain.
#[derive(Debug, Clone, PartialEq)]
pub enum RelayElement {
    Loss(f64),
    Station(GaussianChannel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollapsedChain {
    pub front: GaussianChannel,
    pub loss: GaussianChannel,
    pub back: GaussianChannel,
    /// Product of all segment transmittances.
    pub eta: f64,
}

impl CollapsedChain {
    pub fn recompose(&self) -> GaussianChannel {
        let fl = compose(&self.front, &self.loss).expect("uniform modes");
        compose(&fl, &self.back).expect("uniform modes")
    }
}

/// Losses and stations split out of a validated alternating chain.
pub fn split_alternating(elements: &[RelayElement]) -> Result<(Vec<f64>, Vec<GaussianChannel>)> {
    if elements.len() < 3 || elements.len().is_multiple_of(2) {
        return Err(Error::InvalidChain(format!(
            "expected loss, station, loss, ... ending in a loss; got {} elements",
            elements.len()
        )));
    }
    let mut losses = Vec::new();
    let mut stations = Vec::new();
    for (i, el) in elements.iter().enumerate() {
        match (i % 2, el) {
            (0, RelayElement::Loss(eta)) => {
                check_eta("eta", *eta)?;
                losses.push(*eta);
            }
            (1, RelayElement::Station(ch)) => stations.push(ch.clone()),
            (0, _) => return Err(Error::InvalidChain(format!("element {} must be a loss segment", i + 1))),
            _ => return Err(Error::InvalidChain(format!("element {} must be a station", i + 1))),
        }
    }
    let n = stations[0].modes();
    if stations.iter().any(|s| s.modes() != n) {
        return Err(Error::InvalidChain("stations act on different mode counts".into()));
    }
    Ok((losses, stations))
}

/// The chain as plain channels in application order.
pub fn chain_channels(elements: &[RelayElement]) -> Result<ChannelChain> {
    let (losses, stations) = split_alternating(elements)?;
    let n = stations[0].modes();
    let mut links = Vec::with_capacity(elements.len());
    for (i, eta) in losses.iter().enumerate() {
        links.push(loss(*eta, n)?);
        if let Some(s) = stations.get(i) {
            links.push(s.clone());
        }
    }
    ChannelChain::new(links)
}

/// Pushes every station of `loss, station, loss, …, loss` out of the lossy
/// line, working from the receiver end: each front factor is absorbed into
/// the next station upstream and the unitary back factors accumulate at the
/// output.
pub fn collapse_chain(elements: &[RelayElement]) -> Result<CollapsedChain> {
    let (losses, stations) = split_alternating(elements)?;
    let n = stations[0].modes();
    let mut eta_after = *losses.last().expect("validated");
    let mut front: Option<GaussianChannel> = None;
    let mut backs = Vec::with_capacity(stations.len());
    for i in (0..stations.len()).rev() {
        let station = match &front {
            None => stations[i].clone(),
            Some(f) => compose(&stations[i], f)?,
        };
        let dec = decompose_sandwich(&SandwichInput::new(losses[i], eta_after, station)?)?;
        eta_after *= losses[i];
        backs.push(dec.back);
        front = Some(dec.front);
    }
    let back = backs
        .into_iter()
        .rev()
        .reduce(|acc, b| compose(&acc, &b).expect("uniform modes"))
        .expect("at least one station");
    // Same product order as a plain left-to-right fold over the segments.
    let eta: f64 = losses.iter().product();
    Ok(CollapsedChain {
        front: front.expect("at least one station"),
        loss: loss(eta, n)?,
        back,
        eta,
    })
}

/// `η₁ → PSA(G₁) → η₂ → … → PSA(G_k) → η_{k+1}`, single mode, zero squeezing
/// angle.
#[derive(Debug, Clone, PartialEq)]
pub struct PsaChainSpec {
    transmittances: Vec<f64>,
    gains: Vec<f64>,
}

impl PsaChainSpec {
    pub fn new(transmittances: Vec<f64>, gains: Vec<f64>) -> Result<Self> {
        if gains.is_empty() || transmittances.len() != gains.len() + 1 {
            return Err(Error::InvalidChain(format!(
                "a chain of k >= 1 amplifiers needs k+1 segments; got {} gains and {} transmittances",
                gains.len(),
                transmittances.len()
            )));
        }
        for &e in &transmittances {
            check_eta("eta", e)?;
        }
        for &g in &gains {
            if !(g >= 1.0 && g.is_finite()) {
                return Err(Error::out_of_range("gain", g, "G >= 1"));
            }
        }
        Ok(PsaChainSpec { transmittances, gains })
    }

    pub fn transmittances(&self) -> &[f64] {
        &self.transmittances
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn stations(&self) -> usize {
        self.gains.len()
    }

    pub fn elements(&self) -> Vec<RelayElement> {
        let mut out = Vec::with_capacity(2 * self.gains.len() + 1);
        for (i, &eta) in self.transmittances.iter().enumerate() {
            out.push(RelayElement::Loss(eta));
            if let Some(&g) = self.gains.get(i) {
                out.push(RelayElement::Station(psa(g, 0.0).expect("validated gain")));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsaChainAlpha {
    pub k: Mat,
    pub alpha: Mat,
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    /// `S₁S₂⋯S_k`.
    pub s0: SymplecticMatrix,
    pub eta: f64,
}

/// Closed-form `(K, α)` of a PSA chain:
/// `α^(±) = ½[η̄_{k+1} + η_{k+1} Σ_{n<k} (η̄_{k−n}/η_{k−n}) Π_{j≤n} η_{k−j}(√G_{k−j} ± √(G_{k−j}−1))²]`.
pub fn psa_chain_alpha(spec: &PsaChainSpec) -> PsaChainAlpha {
    let k = spec.stations();
    let eta_at = |i: usize| spec.transmittances[i - 1];
    let gain_at = |i: usize| spec.gains[i - 1];
    let branch = |sign: f64| {
        let mut sum = 0.0;
        for n in 0..k {
            let mut prod = 1.0;
            for j in 0..=n {
                let g = gain_at(k - j);
                prod *= eta_at(k - j) * (g.sqrt() + sign * (g - 1.0).sqrt()).powi(2);
            }
            sum += (1.0 - eta_at(k - n)) / eta_at(k - n) * prod;
        }
        0.5 * ((1.0 - eta_at(k + 1)) + eta_at(k + 1) * sum)
    };
    let alpha_plus = branch(1.0);
    let alpha_minus = branch(-1.0);
    let eta: f64 = spec.transmittances.iter().product();
    let s0 = spec
        .gains
        .iter()
        .map(|&g| squeezer(g).expect("validated gain"))
        .reduce(|a, b| &a * &b)
        .expect("k >= 1");
    PsaChainAlpha {
        k: s0.matrix() * eta.sqrt(),
        alpha: Mat::from_row_slice(2, 2, &[alpha_plus, 0.0, 0.0, alpha_minus]),
        alpha_plus,
        alpha_minus,
        s0,
        eta,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsaChainSandwich {
    /// `pic(1, N/η)` after the unitary `S₀·W`.
    pub front: GaussianChannel,
    pub loss: GaussianChannel,
    /// The unitary `W⁻¹`.
    pub back: GaussianChannel,
    /// Symmetrizing squeezer `W = (α⁺α⁻)^{-1/4}·√diag(α⁻, α⁺)`.
    pub w: SymplecticMatrix,
    /// Excess noise `N = √(α⁺α⁻) − (1−η)/2` of the standard form.
    pub noise: f64,
    pub eta: f64,
    /// `√(α⁺α⁻) − (1+η)/2`; the chain is entanglement breaking when ≥ 0.
    pub eb_margin: f64,
}

impl PsaChainSandwich {
    pub fn recompose(&self) -> GaussianChannel {
        let fl = compose(&self.front, &self.loss).expect("single mode");
        compose(&fl, &self.back).expect("single mode")
    }

    pub fn is_eb(&self) -> bool {
        self.eb_margin >= -1e-12
    }
}

pub fn psa_chain_sandwich(spec: &PsaChainSpec) -> Result<PsaChainSandwich> {
    let a = psa_chain_alpha(spec);
    let det = a.alpha_plus * a.alpha_minus;
    let root = det.sqrt();
    let w = if det > 0.0 {
        let c = det.powf(-0.25);
        Mat::from_row_slice(2, 2, &[c * a.alpha_minus.sqrt(), 0.0, 0.0, c * a.alpha_plus.sqrt()])
    } else {
        Mat::identity(2, 2)
    };
    let w = SymplecticMatrix::from_trusted(w);
    let noise = root - (1.0 - a.eta) / 2.0;
    if noise < -1e-12 {
        return Err(Error::Numerical(format!("negative standard-form noise {noise:.3e}")));
    }
    let noise = noise.max(0.0);
    let unitary_in = GaussianChannel::unitary(&(&a.s0 * &w));
    let front = if a.eta < 1.0 || noise > 0.0 {
        compose(&unitary_in, &pic(1.0, noise / a.eta)?)?
    } else {
        unitary_in
    };
    Ok(PsaChainSandwich {
        front,
        loss: loss(a.eta, 1)?,
        back: GaussianChannel::unitary(&w.inverse()),
        w,
        noise,
        eta: a.eta,
        eb_margin: root - (1.0 + a.eta) / 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::compose_chain;
    use crate::stations::{pia, psa};

    fn input(e1: f64, e2: f64, st: GaussianChannel) -> SandwichInput {
        SandwichInput::new(e1, e2, st).unwrap()
    }

    #[test]
    fn total_matches_fold() {
        let st = pia(2.0).unwrap();
        let inp = input(0.5, 0.5, st.clone());
        let t = sandwich_total(&inp);
        assert!(rel_frobenius(t.alpha(), &(Mat::identity(2, 2) * 0.75)) < 1e-15);
        assert!(rel_frobenius(t.k(), &(Mat::identity(2, 2) * 0.5f64.sqrt())) < 1e-15);
        let chain = ChannelChain::new(vec![loss(0.5, 1).unwrap(), st, loss(0.5, 1).unwrap()]).unwrap();
        let (ek, ea) = channel_error(&t, &compose_chain(&chain));
        assert!(ek < 1e-15 && ea < 1e-15);
    }

    #[test]
    fn total_trivial_cases() {
        let t = sandwich_total(&input(0.6, 0.7, GaussianChannel::identity(1)));
        let (ek, ea) = channel_error(&t, &loss(0.42, 1).unwrap());
        assert!(ek < 1e-15 && ea < 1e-15);
        let st = psa(2.0, 0.4).unwrap();
        let t = sandwich_total(&input(1.0, 1.0, st.clone()));
        assert_eq!(t.k(), st.k());
        assert_eq!(t.alpha(), st.alpha());
    }

    #[test]
    fn identity_station_decomposes_trivially() {
        let d = decompose_sandwich(&input(0.3, 0.8, GaussianChannel::identity(1))).unwrap();
        let w = d.witnesses.as_ref().unwrap();
        assert!(rel_frobenius(w.transform.matrix(), &Mat::identity(2, 2)) < 1e-14);
        assert!(rel_frobenius(d.front.k(), &Mat::identity(2, 2)) < 1e-14);
        assert!(d.front.alpha().norm() < 1e-14);
        assert!(rel_frobenius(d.back.k(), &Mat::identity(2, 2)) < 1e-14);
    }

    #[test]
    fn pia_sandwich_recomposes() {
        let inp = input(0.5, 0.5, pia(3.0).unwrap());
        let d = decompose_sandwich(&inp).unwrap();
        let (ek, ea) = channel_error(&d.recompose(), &sandwich_total(&inp));
        assert!(ek < 1e-10 && ea < 1e-10, "{ek} {ea}");
        assert!(channel_is_physical(&d.front).physical);
        assert!(d.back.is_unitary());
    }

    #[test]
    fn witness_identity_holds() {
        let inp = input(0.3, 0.6, psa(2.5, 0.7).unwrap());
        let d = decompose_sandwich(&inp).unwrap();
        let w = d.witnesses.unwrap();
        let eta = 0.18;
        let lhs = sandwich_total(&inp).alpha() - inp.station().alpha() * eta - &w.gamma_prime * (1.0 - eta);
        assert!(lhs.norm() < 1e-12);
    }

    #[test]
    fn lossless_sandwich_is_degenerate() {
        let st = pia(2.0).unwrap();
        let d = decompose_sandwich(&input(1.0, 1.0, st.clone())).unwrap();
        assert!(d.witnesses.is_none());
        assert_eq!(d.front, st);
        assert_eq!(d.recompose(), st);
    }

    #[test]
    fn unit_first_segment_needs_no_branch() {
        let inp = input(1.0, 0.5, psa(3.0, 0.0).unwrap());
        let d = decompose_sandwich(&inp).unwrap();
        let w = d.witnesses.as_ref().unwrap();
        assert_eq!(w.mixing, 0.0);
        assert!(rel_frobenius(w.transform.matrix(), &Mat::identity(2, 2)) < 1e-14);
        let (ek, ea) = channel_error(&d.recompose(), &sandwich_total(&inp));
        assert!(ek < 1e-12 && ea < 1e-12);
    }

    #[test]
    fn sandwich_input_validation() {
        assert!(SandwichInput::new(0.0, 0.5, GaussianChannel::identity(1)).is_err());
        assert!(SandwichInput::new(0.5, 1.5, GaussianChannel::identity(1)).is_err());
        let displaced = GaussianChannel::identity(1).with_displacement(Vector::from_vec(vec![1.0, 0.0])).unwrap();
        assert!(matches!(SandwichInput::new(0.5, 0.5, displaced), Err(Error::Unsupported(_))));
        let bad = GaussianChannel::from_parts(Mat::identity(2, 2) * 2.0, Vector::zeros(2), Mat::zeros(2, 2)).unwrap();
        assert!(matches!(SandwichInput::new(0.5, 0.5, bad), Err(Error::Unphysical { .. })));
    }

    #[test]
    fn collapse_two_psa() {
        let s = || RelayElement::Station(psa(2.0, 0.0).unwrap());
        let els = vec![RelayElement::Loss(0.8), s(), RelayElement::Loss(0.8), s(), RelayElement::Loss(0.8)];
        let c = collapse_chain(&els).unwrap();
        assert!((c.eta - 0.512).abs() < 1e-15);
        let direct = compose_chain(&chain_channels(&els).unwrap());
        let (ek, ea) = channel_error(&c.recompose(), &direct);
        assert!(ek < 1e-8 && ea < 1e-8, "{ek} {ea}");
        assert!(c.back.is_unitary() || c.back.alpha().norm() == 0.0);
    }

    #[test]
    fn collapse_identity_stations() {
        let s = || RelayElement::Station(GaussianChannel::identity(1));
        let els = vec![RelayElement::Loss(0.9), s(), RelayElement::Loss(0.5), s(), RelayElement::Loss(0.4)];
        let c = collapse_chain(&els).unwrap();
        let l = loss(0.18, 1).unwrap();
        let (ek, ea) = channel_error(&c.loss, &l);
        assert!(ek < 1e-15 && ea < 1e-15);
        assert!(rel_frobenius(c.front.k(), &Mat::identity(2, 2)) < 1e-14);
        assert!(c.front.alpha().norm() < 1e-14);
        assert!(rel_frobenius(c.back.k(), &Mat::identity(2, 2)) < 1e-14);
    }

    #[test]
    fn collapse_single_station_is_decompose() {
        let st = pia(1.5).unwrap();
        let els = vec![RelayElement::Loss(0.6), RelayElement::Station(st.clone()), RelayElement::Loss(0.7)];
        let c = collapse_chain(&els).unwrap();
        let d = decompose_sandwich(&input(0.6, 0.7, st)).unwrap();
        assert_eq!(c.front, d.front);
        assert_eq!(c.back, d.back);
    }

    #[test]
    fn collapse_rejects_bad_alternation() {
        let st = RelayElement::Station(GaussianChannel::identity(1));
        assert!(collapse_chain(&[RelayElement::Loss(0.5)]).is_err());
        assert!(collapse_chain(&[st.clone(), RelayElement::Loss(0.5), st.clone()]).is_err());
        assert!(collapse_chain(&[RelayElement::Loss(0.5), st.clone(), st]).is_err());
    }

    #[test]
    fn psa_chain_unit_gain() {
        let spec = PsaChainSpec::new(vec![0.6, 0.5], vec![1.0]).unwrap();
        let a = psa_chain_alpha(&spec);
        assert!((a.eta - 0.3).abs() < 1e-15);
        assert!((a.alpha_plus - 0.35).abs() < 1e-15);
        assert!((a.alpha_minus - 0.35).abs() < 1e-15);
        let s = psa_chain_sandwich(&spec).unwrap();
        assert!(rel_frobenius(s.w.matrix(), &Mat::identity(2, 2)) < 1e-15);
        assert!(s.noise.abs() < 1e-15);
        assert!(rel_frobenius(s.front.k(), &Mat::identity(2, 2)) < 1e-15);
        assert!(s.front.alpha().norm() < 1e-15);
    }

    #[test]
    fn psa_chain_k1_closed_form() {
        let spec = PsaChainSpec::new(vec![0.5, 0.5], vec![2.0]).unwrap();
        let a = psa_chain_alpha(&spec);
        let sp = 2f64.sqrt() + 1.0;
        let sm = 2f64.sqrt() - 1.0;
        assert!((a.alpha_plus - 0.5 * (0.5 + 0.25 * sp * sp)).abs() < 1e-15);
        assert!((a.alpha_minus - 0.5 * (0.5 + 0.25 * sm * sm)).abs() < 1e-15);
        let fold = compose_chain(&chain_channels(&spec.elements()).unwrap());
        assert!(rel_frobenius(&a.alpha, fold.alpha()) < 1e-15);
        assert!(rel_frobenius(&a.k, fold.k()) < 1e-15);
    }

    #[test]
    fn psa_chain_sandwich_recomposes() {
        let spec = PsaChainSpec::new(vec![0.5, 0.5], vec![3.0]).unwrap();
        let s = psa_chain_sandwich(&spec).unwrap();
        let fold = compose_chain(&chain_channels(&spec.elements()).unwrap());
        let (ek, ea) = channel_error(&s.recompose(), &fold);
        assert!(ek < 1e-9 && ea < 1e-9);
        assert!(s.w.residual() < 1e-14);
        let wa = s.w.matrix().transpose() * fold.alpha() * s.w.matrix();
        assert!((wa[(0, 0)] - wa[(1, 1)]).abs() < 1e-14 && wa[(0, 1)].abs() < 1e-15);
    }

    #[test]
    fn psa_chain_spec_validation() {
        assert!(PsaChainSpec::new(vec![0.5], vec![]).is_err());
        assert!(PsaChainSpec::new(vec![0.5, 0.5, 0.5], vec![2.0]).is_err());
        assert!(PsaChainSpec::new(vec![0.5, 0.5], vec![0.5]).is_err());
        assert!(PsaChainSpec::new(vec![0.5, 0.0], vec![2.0]).is_err());
    }
}
