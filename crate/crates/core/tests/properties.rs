use proptest::prelude::*;

use verdec::de::{de_bec_step, de_lm1_step, de_lm2mb_step, DegreeDistribution};
use verdec::decode::{Decoder, Tolerances};
use verdec::graph::{assign_edge_weights, default_sampling_mode, sample_regular_graph_with, EnsembleParams, SamplerOptions, SamplingMode, WeightModel};
use verdec::rng::derive_seed;
use verdec::signal::{sample_erasures, sample_signal, SignalModel};
use verdec::stopping::multinomial_ratio_bounds;
use verdec::thresholds::{lambert_w_minus1, poisson_tail_bound, poisson_tail_exact};

fn graph(n: usize, seed: u64) -> verdec::graph::TannerGraph {
    let opts = SamplerOptions { mode: default_sampling_mode(3, 6, n), ..SamplerOptions::default() };
    sample_regular_graph_with(EnsembleParams::new(3, 6, n, seed).unwrap(), opts).unwrap()
}

fn jk() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((3usize, 6usize)), Just((3, 12)), Just((4, 8)), Just((2, 4)), Just((5, 10))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn graphs_are_biregular((j, k) in jk(), blocks in 1usize..40, seed in any::<u64>(), simple in any::<bool>()) {
        let n = k * blocks;
        let mode = if simple && n * j / k >= k { SamplingMode::Simple } else { SamplingMode::ConfigurationModel };
        let g = sample_regular_graph_with(EnsembleParams::new(j, k, n, seed).unwrap(), SamplerOptions { mode, ..SamplerOptions::default() }).unwrap();
        prop_assert_eq!(g.edges().len(), n * j);
        let mut check_deg = vec![0usize; g.m()];
        for v in 0..n {
            prop_assert_eq!(g.var_edges(v).len(), j);
            for e in g.var_edges(v) {
                prop_assert_eq!(g.edge(e).var, v);
                check_deg[g.edge(e).check] += 1;
            }
        }
        prop_assert!(check_deg.iter().all(|&d| d == k));
        for c in 0..g.m() {
            prop_assert!(g.check_edges(c).iter().all(|&e| g.edge(e).check == c));
        }
        if mode == SamplingMode::Simple {
            prop_assert!(!g.has_parallel_edges());
        }
    }

    #[test]
    fn verifiers_never_verify_wrong_values(
        blocks in 2usize..40,
        frac in 0.0f64..0.6,
        seed in any::<u64>(),
        model in prop_oneof![Just(SignalModel::Gaussian), Just(SignalModel::ZeroOne), Just(SignalModel::NonNegativeGaussian)],
    ) {
        let n = 6 * blocks;
        let g = graph(n, seed);
        let g = assign_edge_weights(g, WeightModel::Gaussian, derive_seed(seed, &[1]));
        let x = sample_signal(n, (frac * n as f64) as usize, model, derive_seed(seed, &[2])).unwrap();
        let y = g.measure(x.values()).unwrap();
        for d in [Decoder::Lm1, Decoder::Lm2Mb, Decoder::Lm2Nb] {
            let mut r = d.decode(&g, &y, &Tolerances::default()).unwrap();
            prop_assert!(!r.check_against(x.values()), "{}", d);
            prop_assert_eq!(r.verified.iter().filter(|&&b| !b).count(), r.unverified_count);
            if d == Decoder::Lm2Mb {
                prop_assert!(r.unverified_history.windows(2).all(|w| w[1] <= w[0]));
            } else {
                prop_assert!(r.unverified_history.windows(2).all(|w| w[1] < w[0]));
            }
            prop_assert_eq!(r.unverified_history.last().copied().unwrap_or(n), r.unverified_count);
            prop_assert_eq!(r.is_success(), r.unverified_count == 0);
        }
    }

    #[test]
    fn peeling_recovers_a_superset_of_smaller_patterns(blocks in 2usize..30, frac in 0.0f64..0.8, seed in any::<u64>()) {
        let n = 6 * blocks;
        let g = graph(n, seed);
        let big = sample_erasures(n, (frac * n as f64) as usize, seed).unwrap();
        let small = verdec::signal::ErasurePattern::new(n, big.erased()[..big.len() / 2].to_vec()).unwrap();
        let rb = verdec::decode::decode_bec_peeling(&g, &big).unwrap();
        let rs = verdec::decode::decode_bec_peeling(&g, &small).unwrap();
        prop_assert!(rs.unverified_count <= rb.unverified_count);
        prop_assert!(rs.verified.iter().zip(&rb.verified).all(|(&s, &b)| s || !b));
    }

    #[test]
    fn density_evolution_maps_stay_in_the_unit_interval((j, k) in jk(), delta in 0.0f64..=1.0, x in 0.0f64..=1.0, h in 0.0f64..0.5) {
        let dd = DegreeDistribution::regular(j, k).unwrap();
        let x2 = (x + h).min(1.0);
        let bec = (de_bec_step(&dd, delta, x), de_bec_step(&dd, delta, x2));
        prop_assert!((0.0..=1.0).contains(&bec.0) && bec.0 <= bec.1 + 1e-15);
        if j >= 3 {
            for step in [de_lm1_step as fn(usize, usize, f64, f64) -> f64, de_lm2mb_step] {
                let (a, b) = (step(j, k, delta, x), step(j, k, delta, x2));
                prop_assert!((0.0..=1.0).contains(&a));
                prop_assert!(a <= b + 1e-12, "x={} -> {}, x={} -> {}", x, a, x2, b);
            }
            prop_assert_eq!(de_lm1_step(j, k, delta, 0.0), 0.0);
            prop_assert_eq!(de_lm2mb_step(j, k, delta, 0.0), 0.0);
        }
        prop_assert_eq!(de_bec_step(&dd, delta, 0.0), 0.0);
    }

    #[test]
    fn lambert_branch_inverts(t in 1e-300f64..1.0) {
        let z = -t * (-1.0f64).exp();
        let w = lambert_w_minus1(z).unwrap();
        prop_assert!(w <= -1.0);
        prop_assert!(((w * w.exp() - z) / z).abs() <= 1e-13);
    }

    #[test]
    fn poisson_bound_dominates_exact_tail(lambda in 0.01f64..50.0, ratio in 1.0f64..10.0) {
        let x0 = lambda * ratio;
        let exact = poisson_tail_exact(lambda, x0).unwrap();
        let bound = poisson_tail_bound(lambda, x0).unwrap();
        prop_assert!(exact <= bound * (1.0 + 1e-12), "{} > {}", exact, bound);
    }

    #[test]
    fn multinomial_ratio_is_below_upper_bound(n in 10usize..2000, fa in 0.0f64..0.5, fb in 0.0f64..0.5, j in 2usize..6) {
        let (a, b) = ((fa * n as f64) as usize, (fb * n as f64) as usize);
        let m = multinomial_ratio_bounds(n, a, b, j).unwrap();
        prop_assert!(m.ln_exact <= m.ln_upper + 1e-12);
        prop_assert!(m.ln_exact <= 0.0);
    }

    #[test]
    fn seed_derivation_is_stable(base in any::<u64>(), a in any::<u64>(), b in any::<u64>()) {
        prop_assert_eq!(derive_seed(base, &[a, b]), derive_seed(base, &[a, b]));
        if a != b {
            prop_assert_ne!(derive_seed(base, &[a, b]), derive_seed(base, &[b, a]));
        }
        prop_assert_ne!(derive_seed(base, &[a]), derive_seed(base, &[a, 0]));
    }
}
