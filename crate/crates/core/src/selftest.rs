//! The bundled acceptance suite.
//!
//! Each check draws from its own fixed seed (offset by the caller's base
//! seed), so results do not depend on execution order or worker count.

use std::time::{Duration, Instant};

use rand::Rng;

use crate::channel::{
    apply, channel_is_physical, compose, compose_chain, extract_displacements, ChannelChain, GaussianChannel,
};
use crate::eb::{
    choi_ppt_oracle, classify, det_alpha_closed_form, det_alpha_direct, locate_gain_flip, pia_sandwich_margin,
    pia_threshold, pic_is_eb, psa_sandwich_margin, psa_threshold, rate_upper_bound, PicFamilyParams,
    DEFAULT_SCHEDULE,
};
use crate::exec::{par_map, Execution};
use crate::linalg::{rel_frobenius, rel_vec, Mat};
use crate::relay::{
    channel_error, chain_channels, collapse_chain, decompose_sandwich, psa_chain_alpha, psa_chain_sandwich,
    sandwich_total, PsaChainSpec, RelayElement, SandwichInput,
};
use crate::sampling::{random_displacement, random_physical_channel, random_state, random_symplectic, rng};
use crate::stations::{loss, pia, psa};
use crate::symplectic::{euler_decompose, symplectic_spectrum_direct, williamson};
use crate::Result;

pub const DEFAULT_SEED: u64 = 0x5eed_2013;

/// Deliberate defects for checking that the suite notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Recompose with `α₂ + K₂ α₁ K₂ᵀ` in place of `α₂ + K₂ᵀ α₁ K₂`.
    TransposedNoiseTransport,
}

#[derive(Debug, Clone, Copy)]
pub struct SelftestOptions {
    pub seed: u64,
    pub execution: Execution,
    pub workers: Option<usize>,
    pub fault: Option<Fault>,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions {
            seed: DEFAULT_SEED,
            execution: Execution::default(),
            workers: None,
            fault: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2}. {} ({:.2} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

pub const CHECKS: [(u8, &str); 10] = [
    (1, "sandwich recomposition"),
    (2, "PSA threshold"),
    (3, "PIA threshold"),
    (4, "det alpha closed form"),
    (5, "Choi oracle concordance"),
    (6, "PSA chain"),
    (7, "displacement extraction"),
    (8, "rate bound"),
    (9, "Euler and Williamson"),
    (10, "PIC EB boundary"),
];

pub fn run_all(opts: &SelftestOptions) -> Vec<CheckOutcome> {
    CHECKS.iter().map(|&(id, _)| run_check(id, opts)).collect()
}

pub fn run_check(id: u8, opts: &SelftestOptions) -> CheckOutcome {
    let name = CHECKS.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
    let start = Instant::now();
    let res = match id {
        1 => check_recomposition(opts),
        2 => check_psa_threshold(),
        3 => check_pia_threshold(),
        4 => check_det_alpha(opts),
        5 => check_concordance(opts),
        6 => check_psa_chain(opts),
        7 => check_displacements(opts),
        8 => check_rate_bound(opts),
        9 => check_symplectic(opts),
        10 => check_pic_boundary(),
        _ => Ok((false, format!("no check with id {id}"))),
    };
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = res.unwrap_or_else(|e| (false, format!("error: {e}")));
    let limit = match id {
        1 => Some(Duration::from_secs(30)),
        5 => Some(Duration::from_secs(120)),
        _ => None,
    };
    if let Some(limit) = limit {
        if elapsed > limit {
            passed = false;
            detail.push_str(&format!("; runtime {:.1} s over {} s", elapsed.as_secs_f64(), limit.as_secs()));
        }
    }
    CheckOutcome { id, name, passed, detail, elapsed }
}

type Check = Result<(bool, String)>;

fn seed_for(opts: &SelftestOptions, id: u64) -> u64 {
    opts.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(id)
}

/// Uniform grid of `steps` points strictly inside `(lo, hi)`.
fn interior(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (1..=steps).map(|i| lo + (hi - lo) * i as f64 / (steps + 1) as f64).collect()
}

/// Uniform grid of `steps` points including both ends.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()
}

fn faulty_compose(first: &GaussianChannel, second: &GaussianChannel) -> GaussianChannel {
    let (k1, k2) = (first.k(), second.k());
    let k = k1 * k2;
    let m = k2.transpose() * first.m() + second.m();
    let alpha = k2 * first.alpha() * k2.transpose() + second.alpha();
    GaussianChannel::from_parts(k, m, alpha).expect("shapes match")
}

fn recompose_with(front: &GaussianChannel, mid: &GaussianChannel, back: &GaussianChannel, fault: Option<Fault>) -> GaussianChannel {
    match fault {
        None => compose(&compose(front, mid).expect("modes"), back).expect("modes"),
        Some(Fault::TransposedNoiseTransport) => faulty_compose(&faulty_compose(front, mid), back),
    }
}

struct SandwichCase {
    eta1: f64,
    eta2: f64,
    station: GaussianChannel,
}

fn check_recomposition(opts: &SelftestOptions) -> Check {
    let mut r = rng(seed_for(opts, 1));
    let cases: Vec<SandwichCase> = (0..250)
        .map(|i| SandwichCase {
            eta1: r.random_range(0.05..0.95),
            eta2: r.random_range(0.05..0.95),
            station: random_physical_channel(&mut r, if i < 200 { 1 } else { 2 }),
        })
        .collect();
    let results = par_map(&cases, opts.execution, opts.workers, |c| -> Result<(f64, f64, f64)> {
        let input = SandwichInput::new(c.eta1, c.eta2, c.station.clone())?;
        let n = input.modes();
        let direct = compose_chain(&ChannelChain::new(vec![
            loss(c.eta1, n)?,
            c.station.clone(),
            loss(c.eta2, n)?,
        ])?);
        let d = decompose_sandwich(&input)?;
        let re = recompose_with(&d.front, &d.loss, &d.back, opts.fault);
        let (ek, ea) = channel_error(&re, &direct);
        let front_min = channel_is_physical(&d.front).min_eigenvalue;
        let back_res = if d.back.alpha().iter().all(|&x| x == 0.0) {
            crate::symplectic::symplectic_residual(d.back.k())
        } else {
            f64::INFINITY
        };
        Ok((ek.max(ea), front_min, back_res))
    });
    let mut worst_err = 0.0f64;
    let mut worst_front = f64::INFINITY;
    let mut worst_back = 0.0f64;
    for res in results {
        let (e, f, b) = res?;
        worst_err = worst_err.max(e);
        worst_front = worst_front.min(f);
        worst_back = worst_back.max(b);
    }
    let ok = worst_err < 1e-9 && worst_front >= -1e-10 && worst_back < 1e-9;
    Ok((
        ok,
        format!(
            "250 stations: max recomposition error {worst_err:.2e}, min front eigenvalue {worst_front:.2e}, max back residual {worst_back:.2e}"
        ),
    ))
}

fn check_psa_threshold() -> Check {
    let grid = interior(0.1, 0.9, 15);
    let mut worst = 0.0f64;
    for &e1 in &grid {
        for &e2 in &grid {
            let closed = psa_threshold(e1, e2)?.value();
            let flip = locate_gain_flip(|g| psa_sandwich_margin(e1, e2, g))?.value();
            worst = worst.max((flip - closed).abs());
        }
    }
    let spot = psa_threshold(0.5, 0.5)?.value();
    let ok = worst <= 1e-9 && (spot - 3.0).abs() <= 1e-12;
    Ok((ok, format!("15x15 grid: max |flip - closed form| {worst:.2e}; threshold(0.5, 0.5) = {spot}")))
}

fn check_pia_threshold() -> Check {
    let eta2s: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let mut worst = 0.0f64;
    let mut spread = 0.0f64;
    for &e1 in &interior(0.1, 0.9, 15) {
        let closed = pia_threshold(e1)?.value();
        let mut flips = Vec::with_capacity(eta2s.len());
        for &e2 in &eta2s {
            let flip = locate_gain_flip(|g| pia_sandwich_margin(e1, e2, g))?.value();
            worst = worst.max((flip - closed).abs());
            flips.push(flip);
        }
        let hi = flips.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = flips.iter().copied().fold(f64::INFINITY, f64::min);
        spread = spread.max(hi - lo);
    }
    let spot = pia_threshold(0.5)?.value();
    let ok = worst <= 1e-9 && spread <= 1e-9 && spot == 2.0;
    Ok((
        ok,
        format!("max |flip - closed form| {worst:.2e}, max spread over eta2 {spread:.2e}, threshold(0.5) = {spot}"),
    ))
}

fn random_family<R: Rng>(r: &mut R) -> PicFamilyParams {
    PicFamilyParams {
        g: r.random_range(1.0..5.0),
        noise: 0.0,
        g1: r.random_range(1.0..5.0),
        g2: r.random_range(1.0..5.0),
        theta: r.random_range(0.0..std::f64::consts::PI),
        eta1: r.random_range(0.05..0.95),
        eta2: r.random_range(0.05..0.95),
    }
}

fn check_det_alpha(opts: &SelftestOptions) -> Check {
    let mut r = rng(seed_for(opts, 4));
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = random_family(&mut r);
        let a = det_alpha_closed_form(&p)?;
        let b = det_alpha_direct(&p)?;
        worst = worst.max((a - b).abs() / b.abs());
    }
    let mut worst_spec = 0.0f64;
    for _ in 0..100 {
        let p = random_family(&mut r);
        let (e1, e2) = (p.eta1, p.eta2);
        let psa_case = PicFamilyParams { g: 1.0, g2: 1.0, ..p };
        let want = (1.0 - e1 * e2).powi(2) / 4.0 + e2 * (p.g1 - 1.0) * (1.0 - e1) * (1.0 - e2);
        worst_spec = worst_spec.max((det_alpha_closed_form(&psa_case)? - want).abs());
        let pia_case = PicFamilyParams { g1: 1.0, g2: 1.0, ..p };
        let want = (1.0 + 2.0 * (p.g - 1.0) * e2 - p.g * e1 * e2).powi(2) / 4.0;
        worst_spec = worst_spec.max((det_alpha_closed_form(&pia_case)? - want).abs());
    }
    let ok = worst < 1e-10 && worst_spec <= 1e-12;
    Ok((
        ok,
        format!("1000 tuples: max relative error {worst:.2e}; specializations max deviation {worst_spec:.2e}"),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Amplifier {
    Psa,
    Pia,
}

/// One `(η₁, η₂, gain)` point of the concordance grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcordancePoint {
    pub closed_eb: bool,
    pub closed_margin: f64,
    pub oracle_eb: bool,
    pub oracle_min_nu: f64,
}

pub fn concordance_point(amp: Amplifier, eta1: f64, eta2: f64, gain: f64) -> Result<ConcordancePoint> {
    let station = match amp {
        Amplifier::Psa => psa(gain, 0.0)?,
        Amplifier::Pia => pia(gain)?,
    };
    let total = sandwich_total(&SandwichInput::new(eta1, eta2, station)?);
    let closed = classify(&total)?;
    let oracle = choi_ppt_oracle(&total, &DEFAULT_SCHEDULE)?;
    Ok(ConcordancePoint {
        closed_eb: closed.eb,
        closed_margin: closed.margin,
        oracle_eb: oracle.eb,
        oracle_min_nu: oracle.min_nu.unwrap_or(f64::NAN),
    })
}

fn check_concordance(opts: &SelftestOptions) -> Check {
    let etas = linspace(0.05, 0.95, 20);
    let mut detail = Vec::new();
    let mut ok = true;
    for (amp, gains) in [(Amplifier::Psa, linspace(1.0, 40.0, 20)), (Amplifier::Pia, linspace(1.0, 20.0, 20))] {
        let mut points = Vec::with_capacity(8000);
        for &e1 in &etas {
            for &e2 in &etas {
                for &g in &gains {
                    points.push((e1, e2, g));
                }
            }
        }
        let results = par_map(&points, opts.execution, opts.workers, |&(e1, e2, g)| concordance_point(amp, e1, e2, g));
        let mut disagree = 0usize;
        let mut banded = 0usize;
        let mut eb_count = 0usize;
        for res in results {
            let p = res?;
            eb_count += usize::from(p.closed_eb);
            if p.closed_margin.abs() < 1e-6 {
                banded += 1;
            } else if p.closed_eb != p.oracle_eb {
                disagree += 1;
            }
        }
        ok &= disagree == 0;
        detail.push(format!(
            "{amp:?}: {disagree} disagreements over {} points ({eb_count} EB, {banded} in boundary band)",
            points.len()
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn check_psa_chain(opts: &SelftestOptions) -> Check {
    let mut r = rng(seed_for(opts, 6));
    let mut specs = Vec::with_capacity(50);
    for i in 0..50 {
        let k = 1 + i % 5;
        let etas = (0..=k).map(|_| r.random_range(0.05..0.95)).collect();
        let gains = (0..k).map(|_| r.random_range(1.0..5.0)).collect();
        specs.push(PsaChainSpec::new(etas, gains)?);
    }
    let mut closed_err = 0.0f64;
    let mut recomp_err = 0.0f64;
    let mut margin_err = 0.0f64;
    let mut flip_err = 0.0f64;
    let mut verdicts_agree = true;
    let mut flips = 0usize;
    for spec in &specs {
        let a = psa_chain_alpha(spec);
        let fold = compose_chain(&chain_channels(&spec.elements())?);
        closed_err = closed_err.max(rel_frobenius(&a.k, fold.k())).max(rel_frobenius(&a.alpha, fold.alpha()));
        let s = psa_chain_sandwich(spec)?;
        let (ek, ea) = channel_error(&s.recompose(), &fold);
        recomp_err = recomp_err.max(ek).max(ea);
        let v = classify(&fold)?;
        margin_err = margin_err.max((v.margin - s.eb_margin).abs());
        verdicts_agree &= v.eb == s.is_eb();

        // Sweep the first gain through the flip of the fold-based verdict and
        // evaluate the closed-form condition there.
        let with_first = |g: f64| -> Result<PsaChainSpec> {
            let mut gains = spec.gains().to_vec();
            gains[0] = g;
            PsaChainSpec::new(spec.transmittances().to_vec(), gains)
        };
        let margin_at = |g: f64| -> Result<f64> {
            let sp = with_first(g)?;
            Ok(classify(&compose_chain(&chain_channels(&sp.elements())?))?.margin)
        };
        if margin_at(1.0)? >= 0.0 {
            continue;
        }
        if let crate::eb::Threshold::Finite(g) = locate_gain_flip(margin_at)? {
            flips += 1;
            let a = psa_chain_alpha(&with_first(g)?);
            let lhs = (a.alpha_plus * a.alpha_minus).sqrt();
            flip_err = flip_err.max((lhs - (1.0 + a.eta) / 2.0).abs());
        }
    }
    let ok = closed_err <= 1e-10 && recomp_err <= 1e-9 && margin_err <= 1e-9 && flip_err <= 1e-9 && verdicts_agree;
    Ok((
        ok,
        format!(
            "50 specs: closed vs fold {closed_err:.2e}, recomposition {recomp_err:.2e}, margin gap {margin_err:.2e}, flip offset {flip_err:.2e} over {flips} flips"
        ),
    ))
}

fn check_displacements(opts: &SelftestOptions) -> Check {
    let mut r = rng(seed_for(opts, 7));
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = 1 + i % 2;
        let links = (0..3)
            .map(|_| {
                let m = random_displacement(&mut r, n);
                random_physical_channel(&mut r, n).with_displacement(m)
            })
            .collect::<Result<Vec<_>>>()?;
        let chain = ChannelChain::new(links)?;
        let (extracted, _) = extract_displacements(&chain);
        for _ in 0..20 {
            let st = random_state(&mut r, n, 0.8, 1.0);
            let mut a = st.clone();
            let mut b = st;
            for (l, e) in chain.links().iter().zip(extracted.links()) {
                a = apply(l, &a)?;
                b = apply(e, &b)?;
            }
            worst = worst.max(rel_frobenius(a.gamma(), b.gamma())).max(rel_vec(a.displacement(), b.displacement()));
        }
    }
    Ok((worst <= 1e-12, format!("100 chains x 20 states: max deviation {worst:.2e}")))
}

fn check_rate_bound(opts: &SelftestOptions) -> Check {
    let half = rate_upper_bound(0.5)?;
    let ratio = rate_upper_bound(0.01)? / 0.01;
    let mut r = rng(seed_for(opts, 8));
    let mut exact = true;
    for _ in 0..20 {
        let k = r.random_range(1..=4usize);
        let mut els = vec![RelayElement::Loss(r.random_range(0.05..0.95))];
        for _ in 0..k {
            els.push(RelayElement::Station(psa(r.random_range(1.0..4.0), r.random_range(0.0..3.0))?));
            els.push(RelayElement::Loss(r.random_range(0.05..0.95)));
        }
        let product: f64 = els
            .iter()
            .filter_map(|e| match e {
                RelayElement::Loss(eta) => Some(*eta),
                RelayElement::Station(_) => None,
            })
            .product();
        let c = collapse_chain(&els)?;
        exact &= rate_upper_bound(c.eta)? == rate_upper_bound(product)?;
    }
    let ok = (half - 3f64.log2()).abs() <= 1e-12 && (2.88..=2.89).contains(&ratio) && exact;
    Ok((
        ok,
        format!("R_UB(0.5) = {half:.12}, R_UB(0.01)/0.01 = {ratio:.5}, collapsed chains bit-exact: {exact}"),
    ))
}

fn check_symplectic(opts: &SelftestOptions) -> Check {
    let mut r = rng(seed_for(opts, 9));
    let mut euler_err = 0.0f64;
    for i in 0..100 {
        let m = random_symplectic(&mut r, 1 + i % 3, 1.0);
        let f = euler_decompose(&m);
        euler_err = euler_err
            .max(rel_frobenius(&f.reconstruct(), m.matrix()))
            .max(f.left.residual())
            .max(f.right.residual());
        let id = Mat::identity(m.matrix().nrows(), m.matrix().nrows());
        euler_err = euler_err
            .max(rel_frobenius(&(f.left.matrix().transpose() * f.left.matrix()), &id))
            .max(rel_frobenius(&(f.right.matrix().transpose() * f.right.matrix()), &id));
    }
    let mut will_err = 0.0f64;
    let mut min_nu = f64::INFINITY;
    for i in 0..100 {
        let st = random_state(&mut r, 1 + i % 3, 1.0, 2.0);
        let w = williamson(st.gamma())?;
        let m = w.transform.matrix();
        will_err = will_err
            .max(rel_frobenius(&(m.transpose() * st.gamma() * m), &w.diagonal()))
            .max(w.transform.residual());
        let direct = symplectic_spectrum_direct(st.gamma())?;
        for (a, b) in w.spectrum.iter().zip(&direct) {
            will_err = will_err.max((a - b).abs() / b);
        }
        min_nu = w.spectrum.iter().chain(&direct).copied().fold(min_nu, f64::min);
    }
    let ok = euler_err <= 1e-9 && will_err <= 1e-9 && min_nu >= 0.5 - 1e-10;
    Ok((
        ok,
        format!("Euler max error {euler_err:.2e}, Williamson max error {will_err:.2e}, min symplectic eigenvalue {min_nu:.12}"),
    ))
}

fn check_pic_boundary() -> Check {
    let kappas: [f64; 10] = [0.0, 0.1, 0.5, 0.9, 0.999, 1.0, 1.001, 1.5, 3.0, 10.0];
    let mut ok = true;
    let mut bad = Vec::new();
    for &k in &kappas {
        let edge = k.min(1.0);
        let at = pic_is_eb(k, edge)?;
        let above = pic_is_eb(k, edge + 1e-9)?;
        let below = if edge > 0.0 { Some(pic_is_eb(k, edge - 1e-9)?) } else { None };
        let flips = at.eb && at.boundary && above.eb && below.is_none_or(|v| !v.eb);
        if !flips {
            bad.push(k);
        }
        ok &= flips;
    }
    Ok((ok, format!("{} kappa values, wrong flips at {bad:?}", kappas.len())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(linspace(1.0, 5.0, 81).len(), 81);
        assert_eq!(linspace(1.0, 5.0, 5), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        let g = interior(0.0, 1.0, 3);
        assert_eq!(g, vec![0.25, 0.5, 0.75]);
    }

    #[test]
    fn fault_is_caught() {
        let opts = SelftestOptions {
            fault: Some(Fault::TransposedNoiseTransport),
            ..Default::default()
        };
        assert!(!run_check(1, &opts).passed);
    }
}
