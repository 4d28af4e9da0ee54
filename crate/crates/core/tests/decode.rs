use verdec::decode::{
    brute_force_reconstruct, decode_bec_peeling, decode_lm1, decode_lm2_mb, decode_lm2_nb, Decoder, DecoderState, Tolerances,
};
use verdec::graph::{assign_edge_weights, sample_regular_graph_with, EnsembleParams, SamplerOptions, SamplingMode, TannerGraph, WeightModel};
use verdec::harness::{success_count, TrialSetup};
use verdec::rng::derive_seed;
use verdec::signal::{sample_erasures, sample_signal, ErasurePattern, SignalModel};
use verdec::Error;

const VERIFIERS: [Decoder; 3] = [Decoder::Lm1, Decoder::Lm2Mb, Decoder::Lm2Nb];

fn rate(decoder: Decoder, frac: f64) -> f64 {
    let setup = TrialSetup::new(3, 6, 10_000).unwrap();
    let nnz = (frac * 10_000.0).round() as usize;
    success_count(&setup, decoder, nnz, 100, 31).unwrap() as f64 / 100.0
}

fn small_graph(n: usize, seed: u64, weights: WeightModel) -> TannerGraph {
    let opts = SamplerOptions { mode: SamplingMode::Simple, ..SamplerOptions::default() };
    let g = sample_regular_graph_with(EnsembleParams::new(3, 6, n, seed).unwrap(), opts).unwrap();
    assign_edge_weights(g, weights, seed ^ 0xabc)
}

#[test]
fn zero_signal_decodes_in_one_round() {
    let g = small_graph(120, 1, WeightModel::Gaussian);
    let y = vec![0.0; g.m()];
    for d in VERIFIERS {
        let r = d.decode(&g, &y, &Tolerances::default()).unwrap();
        assert!(r.is_success(), "{d}");
        assert_eq!(r.iterations, 1, "{d}");
        assert!(r.recovered.values().iter().all(|&v| v == 0.0));
    }
}

#[test]
fn wrong_measurement_length() {
    let g = small_graph(12, 1, WeightModel::Unit);
    assert!(matches!(decode_lm1(&g, &[0.0; 5], &Tolerances::default()), Err(Error::DimensionMismatch { .. })));
    assert!(decode_lm2_mb(&g, &[0.0; 7], &Tolerances::default()).is_err());
    assert!(Decoder::Bec.decode(&g, &[0.0; 6], &Tolerances::default()).is_err());
}

#[test]
fn lm1_rates_around_threshold() {
    let below = rate(Decoder::Lm1, 0.15);
    let above = rate(Decoder::Lm1, 0.19);
    assert!(below >= 0.95, "{below}");
    assert!(above <= 0.05, "{above}");
}

#[test]
fn lm2nb_rates_around_threshold() {
    let below = rate(Decoder::Lm2Nb, 0.24);
    let above = rate(Decoder::Lm2Nb, 0.28);
    assert!(below >= 0.9, "{below}");
    assert!(above <= 0.1, "{above}");
}

#[test]
fn lm2mb_rates_around_threshold() {
    let below = rate(Decoder::Lm2Mb, 0.19);
    let above = rate(Decoder::Lm2Mb, 0.23);
    assert!(below >= 0.9, "{below}");
    assert!(above <= 0.1, "{above}");
}

#[test]
fn peeling_rates_around_threshold() {
    let below = rate(Decoder::Bec, 0.40);
    let above = rate(Decoder::Bec, 0.46);
    assert!(below >= 0.9, "{below}");
    assert!(above <= 0.1, "{above}");
}

#[test]
fn peeling_trivial_patterns() {
    let g = small_graph(120, 2, WeightModel::Unit);
    let r = decode_bec_peeling(&g, &ErasurePattern::new(120, vec![]).unwrap()).unwrap();
    assert!(r.is_success());
    assert_eq!(r.iterations, 0);
    for v in [0, 57, 119] {
        let r = decode_bec_peeling(&g, &ErasurePattern::new(120, vec![v]).unwrap()).unwrap();
        assert!(r.is_success());
        assert_eq!(r.iterations, 1);
    }
}

#[test]
fn peeling_matches_rank_of_erased_columns() {
    // Peeling success implies the erased columns are linearly independent.
    for seed in 0..200u64 {
        let g = small_graph(24, seed, WeightModel::Unit);
        let e = sample_erasures(24, 6, seed).unwrap();
        let r = decode_bec_peeling(&g, &e).unwrap();
        let a = g.to_dense();
        let cols: Vec<_> = e.erased().iter().map(|&v| a.column(v).into_owned()).collect();
        let sub = nalgebra::DMatrix::from_columns(&cols);
        if r.is_success() {
            assert_eq!(sub.rank(1e-9), e.len(), "seed {seed}");
        }
        assert_eq!(r.unverified_count + r.verified.iter().filter(|&&b| b).count(), 24);
    }
}

// Checks c0={0,1,2}, c1={2,3,4}, c2={0,3,5}, c3={1,4,5}; every check pair
// shares one variable.
fn toy_graph() -> TannerGraph {
    let p = EnsembleParams::new(2, 3, 6, 0).unwrap();
    let checks = [[0, 1, 2], [2, 3, 4], [0, 3, 5], [1, 4, 5]];
    let edges = checks.iter().enumerate().flat_map(|(c, vs)| vs.iter().map(move |&v| (v, c, 1.0))).collect();
    TannerGraph::from_edges(p, edges).unwrap()
}

#[test]
fn overlap_rule_on_toy_instance() {
    let g = toy_graph();
    let x = [0.0, 0.0, 1.0, 0.0, 0.0, 2.0];
    let y = g.measure(&x).unwrap();
    assert_eq!(y, vec![1.0, 1.0, 2.0, 2.0]);

    let lm1 = decode_lm1(&g, &y, &Tolerances::default()).unwrap();
    assert!(!lm1.is_success());
    assert_eq!(lm1.unverified_count, 6);

    let nb = decode_lm2_nb(&g, &y, &Tolerances::default()).unwrap();
    assert!(nb.is_success());
    assert_eq!(nb.recovered.values(), &x);
    assert_eq!(nb.iterations, 1);

    let shared_only = Tolerances { zero_other_neighbors: false, ..Tolerances::default() };
    let r = decode_lm2_nb(&g, &y, &shared_only).unwrap();
    assert!(r.is_success());
    assert!(r.iterations >= 2);

    let oracle = brute_force_reconstruct(&g, &y, 3).unwrap().unwrap();
    assert_eq!(oracle.signal.values(), &x);
}

#[test]
fn mismatched_overlap_is_left_alone() {
    let g = toy_graph();
    let x = [0.0, 0.0, 1.0, 0.0, 0.5, 2.0];
    let y = g.measure(&x).unwrap();
    let mut r = decode_lm2_nb(&g, &y, &Tolerances::default()).unwrap();
    assert_eq!(r.unverified_count, 6);
    assert!(!r.check_against(&x));
}

#[test]
fn oracle_agrees_with_lm1_successes() {
    let mut successes = 0;
    for seed in 0..200u64 {
        let g = small_graph(20, seed, WeightModel::Gaussian);
        let x = sample_signal(20, 1 + (seed as usize % 3), SignalModel::Gaussian, seed).unwrap();
        let y = g.measure(x.values()).unwrap();
        let r = decode_lm1(&g, &y, &Tolerances::default()).unwrap();
        if !r.is_success() {
            continue;
        }
        successes += 1;
        let sol = brute_force_reconstruct(&g, &y, 4).unwrap().expect("oracle finds the signal");
        for (a, b) in sol.signal.values().iter().zip(r.recovered.values()) {
            assert!((a - b).abs() <= 1e-7, "seed {seed}");
        }
    }
    assert!(successes > 100, "{successes}");
}

#[test]
fn oracle_rejects_denser_supports() {
    for seed in 0..20u64 {
        let g = small_graph(20, seed, WeightModel::Gaussian);
        let x = sample_signal(20, 4, SignalModel::Gaussian, seed).unwrap();
        let y = g.measure(x.values()).unwrap();
        assert!(brute_force_reconstruct(&g, &y, 3).unwrap().is_none(), "seed {seed}");
    }
    let g = small_graph(20, 0, WeightModel::Gaussian);
    let zero = brute_force_reconstruct(&g, &vec![0.0; g.m()], 3).unwrap().unwrap();
    assert!(zero.signal.support().is_empty());
    let big = small_graph(30, 0, WeightModel::Gaussian);
    assert!(matches!(brute_force_reconstruct(&big, &vec![0.0; big.m()], 1), Err(Error::TooLarge(_))));
}

#[test]
fn progress_is_monotone_and_residuals_consistent() {
    let setup = TrialSetup::new(3, 6, 2000).unwrap();
    for t in 0..60u64 {
        let seed = derive_seed(5, &[t]);
        let g = setup.sample_graph(seed).unwrap();
        let x = sample_signal(2000, 200 + 5 * t as usize, SignalModel::Gaussian, seed).unwrap();
        let y = g.measure(x.values()).unwrap();
        for d in VERIFIERS {
            let r = d.decode(&g, &y, &Tolerances::default()).unwrap();
            assert!(r.unverified_history.windows(2).all(|w| w[1] <= w[0]), "{d}");
            assert_eq!(r.unverified_history.last().copied().unwrap_or(2000), r.unverified_count);
            assert!(r.iterations <= 2000);
            assert_eq!(r.is_success(), r.unverified_count == 0);
            if r.is_success() {
                let back = g.measure(r.recovered.values()).unwrap();
                let scale = y.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1.0);
                assert!(back.iter().zip(&y).all(|(a, b)| (a - b).abs() <= 1e-7 * scale), "{d}");
            }
        }
    }
}

#[test]
fn state_residual_tracks_verified_values() {
    let g = small_graph(240, 4, WeightModel::Gaussian);
    let x = sample_signal(240, 40, SignalModel::Gaussian, 4).unwrap();
    let y = g.measure(x.values()).unwrap();
    let mut st = DecoderState::new(&g, &y).unwrap();
    for v in (0..240).step_by(3) {
        assert!(st.verify(&g, v, x.values()[v]));
    }
    assert!(!st.verify(&g, 0, 1.0));
    let partial: Vec<f64> = (0..240).map(|v| st.verified_value[v].unwrap_or(0.0)).collect();
    let known = g.measure(&partial).unwrap();
    let ymax = y.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    for c in 0..g.m() {
        assert!((st.residual[c] - (y[c] - known[c])).abs() <= 1e-9 * ymax);
        let active = g.check_edges(c).iter().filter(|&&e| st.verified_value[g.edge(e).var].is_none()).count();
        assert_eq!(st.active_edges[c], active);
    }
    assert_eq!(st.unverified_count(), 160);
}

#[test]
fn stronger_decoders_dominate_on_paired_instances() {
    let setup = TrialSetup::new(3, 6, 1000).unwrap();
    for t in 0..500u64 {
        let seed = derive_seed(17, &[t]);
        let g = setup.sample_graph(seed).unwrap();
        let nnz = 150 + (t as usize % 120);
        let ok: Vec<bool> = VERIFIERS.iter().map(|&d| setup.run_on(&g, d, nnz, seed).unwrap().is_success()).collect();
        assert!(!ok[0] || ok[1], "lm1 beat lm2mb at trial {t}");
        assert!(!ok[1] || ok[2], "lm2mb beat lm2nb at trial {t}");
    }
}

#[test]
fn non_negative_signals_with_unit_weights() {
    let mut setup = TrialSetup::new(3, 6, 1000).unwrap();
    setup.signal_model = SignalModel::NonNegativeGaussian;
    setup.weight_model = WeightModel::Unit;
    for t in 0..300u64 {
        let seed = derive_seed(23, &[t]);
        let g = setup.sample_graph(seed).unwrap();
        for d in VERIFIERS {
            let r = setup.run_on(&g, d, 100 + t as usize, seed).unwrap();
            assert_eq!(r.false_verification, Some(false), "{d} trial {t}");
        }
    }
}

#[test]
fn no_false_verification_with_gaussian_weights() {
    let setup = TrialSetup::new(3, 6, 500).unwrap();
    for t in 0..1000u64 {
        let seed = derive_seed(41, &[t]);
        let g = setup.sample_graph(seed).unwrap();
        for d in VERIFIERS {
            let r = setup.run_on(&g, d, 50 + (t as usize % 200), seed).unwrap();
            assert_eq!(r.false_verification, Some(false), "{d} trial {t}");
        }
    }
}

#[test]
fn decoder_names_round_trip() {
    for d in [Decoder::Lm1, Decoder::Lm2Mb, Decoder::Lm2Nb, Decoder::Bec] {
        assert_eq!(d.name().parse::<Decoder>().unwrap(), d);
        assert_eq!(serde_json::to_string(&d).unwrap(), format!("\"{}\"", d.name()));
    }
    assert_eq!(serde_json::from_str::<Decoder>("\"lm2_mb\"").unwrap(), Decoder::Lm2Mb);
    assert!("lm3".parse::<Decoder>().is_err());
}
