use proptest::prelude::*;
use trendrank::predictors::{predict, rank};
use trendrank::{EdgeList, PredictorSpec, TemporalGraph, Variant};

type Triples = Vec<(String, String, f64)>;

fn triples() -> impl Strategy<Value = Triples> {
    prop::collection::vec((0u8..25, 0u8..25, 0u32..2000), 1..120).prop_map(|raw| {
        raw.into_iter()
            .filter(|(s, t, _)| s != t)
            .map(|(s, t, time)| (format!("v{s}"), format!("v{t}"), f64::from(time) / 10.0))
            .collect()
    })
}

fn build(edges: &Triples) -> TemporalGraph {
    TemporalGraph::build(EdgeList::from_named(
        edges.iter().map(|(s, t, d)| (s.as_str(), t.as_str(), *d)),
    ))
    .unwrap()
}

/// In-degree per node id from a plain scan over the edges.
fn degree(graph: &TemporalGraph, edges: &Triples, from: f64, to: f64) -> Vec<f64> {
    let mut k = vec![0.0; graph.nodes_before(to)];
    for (_, target, day) in edges {
        if *day >= from && *day < to {
            let i = graph.index_of(target).unwrap();
            if i < k.len() {
                k[i] += 1.0;
            }
        }
    }
    k
}

fn scores(graph: &TemporalGraph, t: f64, past: f64, variant: Variant) -> Vec<f64> {
    predict(graph, t, past, &PredictorSpec::new(variant, 0.3))
        .unwrap()
        .scores
}

fn full_rank(scores: &[f64]) -> Vec<usize> {
    rank(scores, scores.len())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reduction_identities(edges in triples(), t_frac in 0.05f64..1.0, past in 1.0f64..100.0) {
        prop_assume!(!edges.is_empty());
        let g = build(&edges);
        let t = g.start_time() + t_frac * (g.end_time() - g.start_time() + 1.0);
        let n = g.nodes_before(t);
        prop_assume!(n > 0);

        let pr = scores(&g, t, past, Variant::PageRankOnly);
        let pr_rank = full_rank(&pr);
        prop_assert_eq!(full_rank(&scores(&g, t, past, Variant::M3 { gamma: 0.1, delta: 1.0 })), pr_rank.clone());

        let gain = degree(&g, &edges, t - past, t);
        let total = degree(&g, &edges, f64::NEG_INFINITY, t);
        prop_assert_eq!(full_rank(&scores(&g, t, past, Variant::Pbp { lambda: 1.0 })), full_rank(&gain));
        prop_assert_eq!(full_rank(&scores(&g, t, past, Variant::Pbp { lambda: 0.0 })), full_rank(&total));

        let product: Vec<f64> = pr.iter().zip(&gain).map(|(p, k)| p * k).collect();
        let m1 = predict(&g, t, past, &PredictorSpec::new(Variant::M1 { gamma: 0.0 }, 0.3)).unwrap();
        if !m1.degenerate {
            prop_assert_eq!(full_rank(&m1.scores), full_rank(&product));
        }

        let decayed: Vec<f64> = (0..n)
            .map(|i| {
                edges
                    .iter()
                    .filter(|(_, target, day)| g.index_of(target) == Some(i) && *day >= t - past && *day < t)
                    .map(|(_, _, day)| (0.1 * (day - t)).exp())
                    .sum()
            })
            .collect();
        let m3_activity = scores(&g, t, past, Variant::M3 { gamma: 0.1, delta: 0.0 });
        if decayed.iter().any(|&a| a > 0.0) {
            prop_assert_eq!(full_rank(&m3_activity), full_rank(&decayed));
        }

        if gain.iter().all(|&k| k == 0.0) {
            prop_assert_eq!(full_rank(&scores(&g, t, past, Variant::M2 { gamma: 0.1 })), pr_rank);
        }
    }

    #[test]
    fn normalized_scores_sum_to_one(edges in triples(), t_frac in 0.05f64..1.0, past in 1.0f64..100.0, gamma in 0.0f64..1.0, delta in 0.0f64..=1.0) {
        let g = build(&edges);
        let t = g.start_time() + t_frac * (g.end_time() - g.start_time() + 1.0);
        prop_assume!(g.nodes_before(t) > 0);
        for variant in [Variant::M1 { gamma }, Variant::M2 { gamma }, Variant::M3 { gamma, delta }, Variant::PageRankOnly] {
            let s = predict(&g, t, past, &PredictorSpec::new(variant, 0.5)).unwrap();
            prop_assert!(s.scores.iter().all(|x| x.is_finite() && *x >= 0.0));
            if !s.degenerate {
                prop_assert!((s.scores.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn future_edges_never_leak(
        edges in triples(),
        extra in prop::collection::vec((0u8..30, 0u8..30, 0.0f64..1.0), 0..30),
        drop_mask in prop::collection::vec(any::<bool>(), 120),
        t_frac in 0.05f64..0.95,
        past in 1.0f64..100.0,
        future in 1.0f64..100.0,
    ) {
        let g = build(&edges);
        let t = g.start_time() + t_frac * (g.end_time() - g.start_time() + 1.0);
        prop_assume!(g.nodes_before(t) > 0);

        let mut changed: Triples = edges
            .iter()
            .zip(&drop_mask)
            .filter(|((_, _, day), drop)| !(**drop && *day >= t && *day < t + future))
            .map(|(e, _)| e.clone())
            .collect();
        changed.extend(
            extra
                .into_iter()
                .filter(|(s, d, _)| s != d)
                .map(|(s, d, f)| (format!("v{s}"), format!("v{d}"), t + f * future * 0.999)),
        );
        let h = build(&changed);
        prop_assert_eq!(g.nodes_before(t), h.nodes_before(t));
        prop_assert_eq!(&g.ids()[..g.nodes_before(t)], &h.ids()[..h.nodes_before(t)]);

        for variant in [
            Variant::M1 { gamma: 0.1 },
            Variant::M2 { gamma: 0.1 },
            Variant::M3 { gamma: 0.1, delta: 0.4 },
            Variant::Pbp { lambda: 0.5 },
            Variant::PageRankOnly,
            Variant::RecentDegree,
        ] {
            let a: Vec<u64> = scores(&g, t, past, variant).iter().map(|x| x.to_bits()).collect();
            let b: Vec<u64> = scores(&h, t, past, variant).iter().map(|x| x.to_bits()).collect();
            prop_assert_eq!(a, b);
        }
    }
}
