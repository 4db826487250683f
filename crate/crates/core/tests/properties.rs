use gaussrelay::channel::{
    apply, channel_is_physical, compose, compose_chain, extract_displacements, ChannelChain, GaussianChannel,
};
use gaussrelay::eb::{choi_ppt_oracle, classify, rate_upper_bound, reduce_standard_form, DEFAULT_SCHEDULE};
use gaussrelay::linalg::{rel_frobenius, Mat};
use gaussrelay::relay::{
    chain_channels, channel_error, collapse_chain, decompose_sandwich, psa_chain_alpha, psa_chain_sandwich,
    sandwich_total, PsaChainSpec, RelayElement, SandwichInput,
};
use gaussrelay::sampling::{random_displacement, random_physical_channel, random_state, random_symplectic, rng};
use gaussrelay::scenario::{parse_scenario, Output, Scenario, Segment, Sweep};
use gaussrelay::stations::{loss, pic, StationSpec};
use gaussrelay::symplectic::{euler_decompose, williamson};
use proptest::prelude::*;

fn eta() -> impl Strategy<Value = f64> {
    0.05f64..0.95
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_associative(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let (a, b, c) = (
            random_physical_channel(&mut r, n),
            random_physical_channel(&mut r, n),
            random_physical_channel(&mut r, n),
        );
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        prop_assert!(rel_frobenius(left.k(), right.k()) < 1e-12);
        prop_assert!(rel_frobenius(left.alpha(), right.alpha()) < 1e-12);
    }

    #[test]
    fn composition_keeps_physicality(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let a = random_physical_channel(&mut r, n);
        let b = random_physical_channel(&mut r, n);
        prop_assert!(channel_is_physical(&compose(&a, &b).unwrap()).physical);
    }

    #[test]
    fn channels_map_states_to_states(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let ch = random_physical_channel(&mut r, n);
        let st = random_state(&mut r, n, 1.0, 1.0);
        prop_assert!(apply(&ch, &st).unwrap().physicality().physical);
    }

    #[test]
    fn sandwich_recomposes(seed in any::<u64>(), n in 1usize..=2, e1 in eta(), e2 in eta()) {
        let mut r = rng(seed);
        let input = SandwichInput::new(e1, e2, random_physical_channel(&mut r, n)).unwrap();
        let d = decompose_sandwich(&input).unwrap();
        let (ek, ea) = channel_error(&d.recompose(), &sandwich_total(&input));
        prop_assert!(ek < 1e-9 && ea < 1e-9, "{} {}", ek, ea);
        prop_assert!(channel_is_physical(&d.front).min_eigenvalue >= -1e-10);
        prop_assert!(d.back.is_unitary());
        prop_assert!(d.back.m().iter().all(|&x| x == 0.0));
        let w = d.witnesses.unwrap();
        let eta = e1 * e2;
        let gap = sandwich_total(&input).alpha() - input.station().alpha() * eta - &w.gamma_prime * (1.0 - eta);
        prop_assert!(gap.norm() < 1e-12);
        // Mᵀ γ′ M ≥ I/2
        let m = w.transform.matrix();
        let g = m.transpose() * &w.gamma_prime * m - Mat::identity(2 * n, 2 * n) * 0.5;
        prop_assert!(g.symmetric_eigenvalues().min() >= -1e-9);
    }

    #[test]
    fn total_matches_fold(seed in any::<u64>(), e1 in eta(), e2 in eta()) {
        let mut r = rng(seed);
        let st = random_physical_channel(&mut r, 1);
        let input = SandwichInput::new(e1, e2, st.clone()).unwrap();
        let fold = compose_chain(&ChannelChain::new(vec![loss(e1, 1).unwrap(), st, loss(e2, 1).unwrap()]).unwrap());
        let (ek, ea) = channel_error(&sandwich_total(&input), &fold);
        prop_assert!(ek < 1e-14 && ea < 1e-14);
    }

    #[test]
    fn chains_collapse(seed in any::<u64>(), k in 1usize..=4) {
        let mut r = rng(seed);
        let mut els = Vec::new();
        for _ in 0..k {
            els.push(RelayElement::Loss(rand::Rng::random_range(&mut r, 0.05..0.95)));
            els.push(RelayElement::Station(random_physical_channel(&mut r, 1)));
        }
        els.push(RelayElement::Loss(0.7));
        let c = collapse_chain(&els).unwrap();
        let direct = compose_chain(&chain_channels(&els).unwrap());
        let (ek, ea) = channel_error(&c.recompose(), &direct);
        prop_assert!(ek < 1e-8 && ea < 1e-8, "{} {}", ek, ea);
        prop_assert!(c.back.is_unitary());
        let product: f64 = els
            .iter()
            .filter_map(|e| if let RelayElement::Loss(t) = e { Some(*t) } else { None })
            .product();
        prop_assert_eq!(c.eta, product);
    }

    #[test]
    fn euler_round_trip(seed in any::<u64>(), n in 1usize..=3) {
        let m = random_symplectic(&mut rng(seed), n, 1.5);
        let f = euler_decompose(&m);
        prop_assert!(rel_frobenius(&f.reconstruct(), m.matrix()) < 1e-9);
        prop_assert!(f.left.is_orthogonal() && f.right.is_orthogonal());
        prop_assert!(f.squeezing.iter().all(|&s| s >= 1.0 - 1e-12));
    }

    #[test]
    fn williamson_round_trip(seed in any::<u64>(), n in 1usize..=3) {
        let st = random_state(&mut rng(seed), n, 1.0, 3.0);
        let w = williamson(st.gamma()).unwrap();
        let m = w.transform.matrix();
        prop_assert!(rel_frobenius(&(m.transpose() * st.gamma() * m), &w.diagonal()) < 1e-9);
        prop_assert!(w.transform.residual() < 1e-9);
        prop_assert!(w.spectrum.iter().all(|&nu| nu >= 0.5 - 1e-10));
    }

    #[test]
    fn standard_form_is_unitary_equivalent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ch = loop {
            let c = random_physical_channel(&mut r, 1);
            if c.k().determinant() > 0.05 && c.alpha().determinant() > 1e-6 {
                break c;
            }
        };
        let sf = reduce_standard_form(&ch).unwrap();
        prop_assert!(sf.v.residual() < 1e-9 && sf.w.residual() < 1e-9);
        let vkw = sf.v.matrix() * ch.k() * sf.w.matrix();
        prop_assert!(rel_frobenius(&vkw, &(Mat::identity(2, 2) * sf.eta_s.sqrt())) < 1e-10);
        let wa = sf.w.matrix().transpose() * ch.alpha() * sf.w.matrix();
        let iso = Mat::identity(2, 2) * ch.alpha().determinant().sqrt();
        prop_assert!(rel_frobenius(&wa, &iso) < 1e-10);
        prop_assert!(sf.noise >= -1e-10);
    }

    #[test]
    fn eb_survives_concatenation(seed in any::<u64>(), kappa in 0.05f64..3.0, extra in 0.0f64..1.0) {
        let eb = pic(kappa, kappa.min(1.0) + extra + 1e-6).unwrap();
        let mut r = rng(seed);
        let other = loop {
            let c = random_physical_channel(&mut r, 1);
            if c.k().determinant() > 0.05 {
                break c;
            }
        };
        for ch in [compose(&eb, &other).unwrap(), compose(&other, &eb).unwrap()] {
            prop_assert!(classify(&ch).unwrap().eb);
            prop_assert!(choi_ppt_oracle(&ch, &DEFAULT_SCHEDULE).unwrap().eb);
        }
    }

    #[test]
    fn psa_chain_closed_form(seed in any::<u64>(), k in 1usize..=6) {
        let mut r = rng(seed);
        let etas = (0..=k).map(|_| rand::Rng::random_range(&mut r, 0.05..1.0)).collect();
        let gains = (0..k).map(|_| rand::Rng::random_range(&mut r, 1.0..6.0)).collect();
        let spec = PsaChainSpec::new(etas, gains).unwrap();
        let a = psa_chain_alpha(&spec);
        let fold = compose_chain(&chain_channels(&spec.elements()).unwrap());
        prop_assert!(rel_frobenius(&a.k, fold.k()) < 1e-10);
        prop_assert!(rel_frobenius(&a.alpha, fold.alpha()) < 1e-10);
        let s = psa_chain_sandwich(&spec).unwrap();
        let (ek, ea) = channel_error(&s.recompose(), &fold);
        prop_assert!(ek < 1e-9 && ea < 1e-9);
        prop_assert_eq!(classify(&fold).unwrap().eb, s.is_eb());
    }

    #[test]
    fn displacements_extract(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let links: Vec<GaussianChannel> = (0..3)
            .map(|_| {
                let m = random_displacement(&mut r, n);
                random_physical_channel(&mut r, n).with_displacement(m).unwrap()
            })
            .collect();
        let chain = ChannelChain::new(links).unwrap();
        let (extracted, total) = extract_displacements(&chain);
        let a = compose_chain(&chain);
        let b = compose_chain(&extracted);
        prop_assert_eq!(a.m(), b.m());
        prop_assert_eq!(a.m(), &total);
        prop_assert_eq!(a.k(), b.k());
        prop_assert_eq!(a.alpha(), b.alpha());
    }

    #[test]
    fn losses_compose_to_product(a in eta(), b in eta()) {
        let c = compose(&loss(a, 1).unwrap(), &loss(b, 1).unwrap()).unwrap();
        let (ek, ea) = channel_error(&c, &loss(a * b, 1).unwrap());
        prop_assert!(ek < 1e-15 && ea < 1e-15);
    }

    #[test]
    fn rate_bound_is_monotone(a in 0.001f64..0.999, b in 0.001f64..0.999) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(rate_upper_bound(lo).unwrap() <= rate_upper_bound(hi).unwrap());
    }

    #[test]
    fn scenarios_round_trip(
        e1 in eta(),
        gain in 1.0f64..50.0,
        angle in -3.0f64..3.0,
        steps in 1usize..100,
        hi in 1.0f64..10.0,
    ) {
        let sc = Scenario {
            name: "rt".into(),
            modes: 1,
            chain: vec![
                Segment::Station(StationSpec::Loss { eta: e1 }),
                Segment::Station(StationSpec::Psa { gain, angle }),
                Segment::Station(StationSpec::Loss { eta: 1.0 - e1 / 2.0 }),
            ],
            sweep: Some(Sweep { segment: 2, key: "gain".into(), min: 1.0, max: 1.0 + hi, steps }),
            outputs: vec![Output::Eb, Output::Bound],
            state: None,
        };
        prop_assert_eq!(parse_scenario(&sc.render()).unwrap(), sc);
    }
}
