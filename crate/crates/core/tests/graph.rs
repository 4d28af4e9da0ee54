use verdec::graph::{
    assign_edge_weights, sample_regular_graph, sample_regular_graph_with, EnsembleParams, GraphJson, SamplerOptions, SamplingMode,
    TannerGraph, WeightModel,
};
use verdec::signal::{sample_signal, SignalModel};
use verdec::Error;

fn degrees(g: &TannerGraph) -> (Vec<usize>, Vec<usize>) {
    let mut dv = vec![0; g.n()];
    let mut dc = vec![0; g.m()];
    for e in g.edges() {
        dv[e.var] += 1;
        dc[e.check] += 1;
    }
    (dv, dc)
}

fn simple(j: usize, k: usize, n: usize, seed: u64) -> TannerGraph {
    let opts = SamplerOptions { mode: SamplingMode::Simple, ..SamplerOptions::default() };
    sample_regular_graph_with(EnsembleParams::new(j, k, n, seed).unwrap(), opts).unwrap()
}

#[test]
fn twelve_variable_graph_has_exact_degrees() {
    let g = simple(3, 6, 12, 7);
    assert_eq!((g.n(), g.m(), g.edges().len()), (12, 6, 36));
    let (dv, dc) = degrees(&g);
    assert!(dv.iter().all(|&d| d == 3));
    assert!(dc.iter().all(|&d| d == 6));
    assert!(!g.has_parallel_edges());
}

#[test]
fn girth_six_is_infeasible_at_twelve_variables() {
    // 12 variables each use 3 check pairs, but 6 checks only have 15 pairs.
    let err = sample_regular_graph(EnsembleParams::new(3, 6, 12, 7).unwrap()).unwrap_err();
    assert!(matches!(err, Error::ConstraintUnsatisfiable { .. }), "{err}");
}

#[test]
fn length_256_graph() {
    let g = sample_regular_graph(EnsembleParams::new(3, 6, 256, 1).unwrap()).unwrap();
    assert_eq!(g.m(), 128);
    assert_eq!(g.edges().len(), 768);
    assert!(g.max_check_overlap() <= 1);
}

#[test]
fn indivisible_length_is_rejected() {
    assert!(matches!(EnsembleParams::new(3, 6, 5, 0), Err(Error::InvalidParams(_))));
    assert!(EnsembleParams::new(1, 6, 12, 0).is_err());
    assert!(EnsembleParams::new(3, 3, 12, 0).is_err());
}

#[test]
fn same_seed_same_graph() {
    let p = EnsembleParams::new(4, 8, 512, 99).unwrap();
    assert_eq!(sample_regular_graph(p).unwrap(), sample_regular_graph(p).unwrap());
    let q = EnsembleParams { seed: 100, ..p };
    assert_ne!(sample_regular_graph(p).unwrap(), sample_regular_graph(q).unwrap());
}

#[test]
fn degrees_exact_over_many_samples() {
    for seed in 0..100u64 {
        let g = sample_regular_graph(EnsembleParams::new(3, 6, 240, seed).unwrap()).unwrap();
        let (dv, dc) = degrees(&g);
        assert!(dv.iter().all(|&d| d == 3) && dc.iter().all(|&d| d == 6), "seed {seed}");
        for v in 0..g.n() {
            assert!(g.var_edges(v).all(|e| g.edge(e).var == v));
        }
        for c in 0..g.m() {
            assert!(g.check_edges(c).iter().all(|&e| g.edge(e).check == c));
        }
    }
}

fn brute_overlap(g: &TannerGraph) -> usize {
    let a = g.to_dense();
    let mut best = 0;
    for c1 in 0..g.m() {
        for c2 in c1 + 1..g.m() {
            let shared = (0..g.n()).filter(|&v| a[(c1, v)] != 0.0 && a[(c2, v)] != 0.0).count();
            best = best.max(shared);
        }
    }
    best
}

#[test]
fn no_four_cycles_up_to_512() {
    for (j, k, n) in [(3, 6, 64), (3, 6, 512), (4, 8, 256), (5, 10, 512), (3, 12, 512)] {
        for seed in 0..3u64 {
            let g = sample_regular_graph(EnsembleParams::new(j, k, n, seed).unwrap()).unwrap();
            assert!(brute_overlap(&g) <= 1, "({j},{k},{n}) seed {seed}");
            assert_eq!(g.max_check_overlap(), brute_overlap(&g));
        }
    }
}

#[test]
fn configuration_model_can_repeat_edges() {
    let opts = SamplerOptions { mode: SamplingMode::ConfigurationModel, ..SamplerOptions::default() };
    let parallel = (0..200u64)
        .filter(|&s| sample_regular_graph_with(EnsembleParams::new(3, 6, 12, s).unwrap(), opts).unwrap().has_parallel_edges())
        .count();
    assert!(parallel > 0);
}

#[test]
fn unit_and_gaussian_weights() {
    let g = sample_regular_graph(EnsembleParams::new(3, 6, 120, 3).unwrap()).unwrap();
    assert!(assign_edge_weights(g.clone(), WeightModel::Unit, 0).edges().iter().all(|e| e.weight == 1.0));

    let small = simple(3, 6, 12, 7);
    let a = assign_edge_weights(small.clone(), WeightModel::Gaussian, 1);
    let b = assign_edge_weights(small.clone(), WeightModel::Gaussian, 1);
    let c = assign_edge_weights(small, WeightModel::Gaussian, 2);
    assert_eq!(a.edges().len(), 36);
    assert!(a.edges().iter().all(|e| e.weight.is_finite() && e.weight != 0.0));
    assert_eq!(a, b);
    assert!(a.edges().iter().zip(c.edges()).any(|(x, y)| x.weight != y.weight));
}

#[test]
fn gaussian_weights_have_unit_variance() {
    let g = sample_regular_graph(EnsembleParams::new(3, 6, 20_000, 5).unwrap()).unwrap();
    let g = assign_edge_weights(g, WeightModel::Gaussian, 8);
    let w: Vec<f64> = g.edges().iter().map(|e| e.weight).collect();
    let n = w.len() as f64;
    let mean = w.iter().sum::<f64>() / n;
    let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    assert!(mean.abs() < 4.0 / n.sqrt(), "mean {mean}");
    assert!((var - 1.0).abs() < 4.0 * (2.0 / n).sqrt(), "var {var}");
}

#[test]
fn measure_examples() {
    let g = simple(3, 6, 12, 7);
    assert!(g.measure(&[0.0; 12]).unwrap().iter().all(|&y| y == 0.0));
    for v in 0..12 {
        let mut x = vec![0.0; 12];
        x[v] = 1.0;
        let y = g.measure(&x).unwrap();
        let checks: Vec<usize> = g.var_edges(v).map(|e| g.edge(e).check).collect();
        for (c, &yc) in y.iter().enumerate() {
            assert_eq!(yc, if checks.contains(&c) { 1.0 } else { 0.0 });
        }
    }
    assert!(matches!(g.measure(&[0.0; 11]), Err(Error::DimensionMismatch { expected: 12, got: 11 })));
}

#[test]
fn measure_matches_dense_product() {
    for seed in 0..50u64 {
        let g = sample_regular_graph(EnsembleParams::new(3, 6, 200, seed).unwrap()).unwrap();
        let g = assign_edge_weights(g, WeightModel::Gaussian, seed + 1000);
        let x = sample_signal(200, 40, SignalModel::Gaussian, seed).unwrap();
        let y = g.measure(x.values()).unwrap();
        let dense = g.to_dense() * nalgebra::DVector::from_column_slice(x.values());
        let scale = dense.amax().max(1e-300);
        for (a, b) in y.iter().zip(dense.iter()) {
            assert!((a - b).abs() <= 1e-12 * scale, "seed {seed}: {a} vs {b}");
        }
    }
}

#[test]
fn json_round_trip() {
    let g = assign_edge_weights(simple(3, 6, 12, 7), WeightModel::Gaussian, 4);
    let text = serde_json::to_string(&g.to_json()).unwrap();
    let parsed: GraphJson = serde_json::from_str(&text).unwrap();
    assert_eq!(TannerGraph::from_json(&parsed).unwrap(), g);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for field in ["j", "k", "n", "m", "seed", "edges"] {
        assert!(v.get(field).is_some(), "missing {field}");
    }
}

#[test]
fn from_edges_rejects_bad_input() {
    let p = EnsembleParams::new(2, 4, 4, 0).unwrap();
    let good = vec![(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0), (2, 0, 1.0), (2, 1, 1.0), (3, 0, 1.0), (3, 1, 1.0)];
    assert!(TannerGraph::from_edges(p, good.clone()).is_ok());
    let mut zero = good.clone();
    zero[0].2 = 0.0;
    assert!(TannerGraph::from_edges(p, zero).is_err());
    let mut skew = good;
    skew[0].1 = 1;
    assert!(TannerGraph::from_edges(p, skew).is_err());
}
