use std::collections::BTreeMap;

use irspace::diagnostics::{compare_environments, roughness, RoughnessOptions};
use irspace::geometry::{
    christoffel, curve_energy, curve_length, Grid, Interpolation, MetricField, Trajectory,
};
use irspace::logmodel::{extract_clickstreams, ClickEvent, SessionParams};
use irspace::metricspace::{
    bm25_score, build_prespace, click_distance, Bm25Params, CorpusStats, DistanceMethod, DistanceModel, Layer,
    LayeredPreSpace, PointId, ThreadEdge,
};
use irspace::skeleton::mds::{majorize, MdsOptions};
use irspace::skeleton::{embed_layers, form_simplices, link_nearest_neighbors, EmbedOptions, EmbeddedSpace};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn event(user: usize, ts: u64) -> ClickEvent {
    ClickEvent::new(format!("u{user}"), ts, "q", "d", "")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sessionization_partitions_and_respects_gaps(
        raw in prop::collection::vec((0usize..5, 0u64..10_000), 0..200),
        gap in 1u64..2_000,
    ) {
        let events: Vec<ClickEvent> = raw.iter().map(|&(u, t)| event(u, t)).collect();
        let streams = extract_clickstreams(events.clone(), SessionParams::new(gap, 1).unwrap()).unwrap();

        let mut want: Vec<(String, u64)> = events.iter().map(|e| (e.user_key.clone(), e.timestamp_ms)).collect();
        let mut got: Vec<(String, u64)> = streams
            .iter()
            .flat_map(|s| s.events.iter().map(|e| (e.user_key.clone(), e.timestamp_ms)))
            .collect();
        want.sort();
        got.sort();
        prop_assert_eq!(want, got);

        let mut last_end: BTreeMap<&str, u64> = BTreeMap::new();
        for s in &streams {
            prop_assert!(s.events.iter().all(|e| e.user_key == s.user_key));
            for w in s.events.windows(2) {
                prop_assert!(w[0].timestamp_ms <= w[1].timestamp_ms);
                prop_assert!(w[1].timestamp_ms - w[0].timestamp_ms <= gap);
            }
            if let Some(end) = last_end.get(s.user_key.as_str()) {
                prop_assert!(s.events[0].timestamp_ms - end > gap);
            }
            last_end.insert(&s.user_key, s.events.last().unwrap().timestamp_ms);
        }
    }

    #[test]
    fn sessionization_drops_only_short_streams(
        raw in prop::collection::vec((0usize..4, 0u64..5_000), 0..120),
        min_length in 1usize..5,
    ) {
        let events: Vec<ClickEvent> = raw.iter().map(|&(u, t)| event(u, t)).collect();
        let all = extract_clickstreams(events.clone(), SessionParams::new(500, 1).unwrap()).unwrap();
        let kept = extract_clickstreams(events, SessionParams::new(500, min_length).unwrap()).unwrap();
        let expected: Vec<_> = all.into_iter().filter(|s| s.events.len() >= min_length).collect();
        prop_assert_eq!(kept, expected);
    }

    #[test]
    fn bm25_monotone_in_frequency_and_antitone_in_length(
        num_docs in 1usize..1000,
        df_frac in 0.0f64..1.0,
        avg in 0.5f64..100.0,
        len in 1usize..300,
        extra in 1usize..50,
        tf in 1usize..40,
        k1 in 0.0f64..3.0,
        b in 0.0f64..=1.0,
    ) {
        let df = 1 + ((num_docs - 1) as f64 * df_frac) as usize;
        let stats = CorpusStats::new(
            num_docs,
            BTreeMap::from([("t".to_string(), df)]),
            avg,
            BTreeMap::from([("short".to_string(), len), ("long".to_string(), len + extra)]),
        )
        .unwrap();
        let params = Bm25Params::new(k1, b).unwrap();
        let q = vec!["t".to_string()];
        let score = |doc: &str, f: usize| {
            bm25_score(&q, doc, &BTreeMap::from([("t".to_string(), f)]), &stats, params).unwrap()
        };
        prop_assert!(score("short", tf + 1) >= score("short", tf));
        prop_assert!(score("long", tf) <= score("short", tf));
        prop_assert!(score("short", tf) >= 0.0);
    }

    #[test]
    fn click_distances_are_bounded_and_symmetric(
        qa in prop::collection::vec(0usize..12, 1..5),
        qb in prop::collection::vec(0usize..12, 1..5),
        da in prop::collection::vec(0usize..12, 0..8),
        db in prop::collection::vec(0usize..12, 0..8),
    ) {
        let text = |v: &[usize]| v.iter().map(|i| format!("w{i}")).collect::<Vec<_>>().join(" ");
        let a = ClickEvent::new("u", 0, &text(&qa), "da", &text(&da));
        let b = ClickEvent::new("u", 1, &text(&qb), "db", &text(&db));
        let stats = CorpusStats::from_events(&[a.clone(), b.clone()]).unwrap();
        for method in [DistanceMethod::TfidfCosine, DistanceMethod::Bm25Sym] {
            let ab = click_distance(&a, &b, method, &stats, Bm25Params::default()).unwrap();
            let ba = click_distance(&b, &a, method, &stats, Bm25Params::default()).unwrap();
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(ab, ba);
        }
    }

    #[test]
    fn majorization_never_raises_stress(
        n in 3usize..15,
        seed in 0u64..1000,
        dists in prop::collection::vec(0.05f64..3.0, 105),
        start in prop::collection::vec(-1.0f64..1.0, 30),
    ) {
        let mut d = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                d[i * n + j] = dists[k];
                d[j * n + i] = dists[k];
                k += 1;
            }
        }
        let r = majorize(&d, n, 2, start[..2 * n].to_vec(), &MdsOptions { seed, ..MdsOptions::default() });
        prop_assert!(r.stress_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn length_squared_bounded_by_span_times_energy(
        pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..12),
    ) {
        let grid = Grid::uniform(&[-3.0, -3.0], &[3.0, 3.0], &[13, 13]).unwrap();
        let field = MetricField::from_fn(grid, Interpolation::Cubic, |x| {
            DMatrix::from_row_slice(2, 2, &[1.0 + 0.1 * x[0] * x[0], 0.05 * x[1], 0.05 * x[1], 1.5])
        })
        .unwrap();
        let points: Vec<Vec<f64>> = pts.iter().map(|&(a, b)| vec![a, b]).collect();
        let curve = Trajectory::observed(&points).unwrap();
        let span = (points.len() - 1) as f64;
        let e = curve_energy(&field, &curve).unwrap();
        let l = curve_length(&field, &curve).unwrap();
        // trapezoidal sums obey the same Cauchy-Schwarz bound exactly
        prop_assert!(l * l <= span * e * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn christoffel_lower_indices_symmetric(x in -0.9f64..0.9, y in -0.9f64..0.9) {
        let grid = Grid::uniform(&[-2.0, -2.0], &[2.0, 2.0], &[17, 17]).unwrap();
        let field = MetricField::from_fn(grid, Interpolation::Cubic, |p| {
            DMatrix::from_row_slice(2, 2, &[2.0 + p[0].sin(), 0.3 * p[0] * p[1], 0.3 * p[0] * p[1], 1.0 + p[1] * p[1]])
        })
        .unwrap();
        let c = christoffel(&field, &[x, y]).unwrap();
        for j in 0..2 {
            prop_assert_eq!(c.get(j, 0, 1), c.get(j, 1, 0));
        }
    }
}

/// Small embedded space from random 2D layers with Euclidean distances.
fn random_space(coords: &[Vec<[f64; 2]>]) -> EmbeddedSpace {
    let streams = coords[0].len();
    let mut layers = Vec::new();
    for layer in coords {
        let n = layer.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = ((layer[i][0] - layer[j][0]).powi(2) + (layer[i][1] - layer[j][1]).powi(2)).sqrt();
            }
        }
        layers.push(Layer {
            points: (0..n).map(|s| PointId::new(s, layers.len())).collect(),
            dist,
        });
    }
    let mut thread_edges = Vec::new();
    for s in 0..streams {
        for t in 0..coords.len() - 1 {
            let (a, b) = (coords[t][s], coords[t + 1][s]);
            thread_edges.push(ThreadEdge {
                from: PointId::new(s, t),
                to: PointId::new(s, t + 1),
                dist: ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt(),
            });
        }
    }
    let ps = LayeredPreSpace {
        stream_ids: (0..streams).map(|s| format!("s{s}")).collect(),
        layers,
        thread_edges,
    };
    let sk = form_simplices(link_nearest_neighbors(&ps, 3), 2);
    embed_layers(&ps, &sk, 2, &EmbedOptions::default()).unwrap()
}

fn layers_strategy() -> impl Strategy<Value = Vec<Vec<[f64; 2]>>> {
    (4usize..9, 2usize..5).prop_flat_map(|(streams, layers)| {
        prop::collection::vec(
            prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| [a, b]), streams),
            layers,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn jump_stats_invariant_under_rigid_motion(coords in layers_strategy(), angle in 0.0f64..std::f64::consts::TAU, dx in -5.0f64..5.0) {
        let space = random_space(&coords);
        let (c, s) = (angle.cos(), angle.sin());
        let moved = space.map_spatial(|x| vec![c * x[0] - s * x[1] + dx, s * x[0] + c * x[1] - dx]);
        let grid = Grid::uniform(&[-20.0, -20.0, -1.0], &[20.0, 20.0, 6.0], &[5, 5, 8]).unwrap();
        let field = MetricField::constant(grid, &DMatrix::identity(3, 3), Interpolation::Cubic).unwrap();
        let a = roughness(&space, &field, &RoughnessOptions::default()).jump_stats;
        let b = roughness(&moved, &field, &RoughnessOptions::default()).jump_stats;
        prop_assert!((a.mean - b.mean).abs() < 1e-9 && (a.p95 - b.p95).abs() < 1e-9 && (a.max - b.max).abs() < 1e-9);
    }

    #[test]
    fn comparison_residual_symmetric_under_swap(
        coords in layers_strategy(),
        noise in prop::collection::vec(-0.1f64..0.1, 80),
    ) {
        let a = random_space(&coords);
        let mut b = a.clone();
        for (p, e) in b.points.iter_mut().zip(noise.iter().cycle()) {
            p.coords[0] += e;
            p.coords[1] -= 0.5 * e;
        }
        b.reindex();
        let ids: Vec<String> = a.threads.iter().map(|t| t.stream_id.clone()).collect();
        let fwd: Vec<(String, String)> = ids.iter().zip(ids.iter().rev()).map(|(x, y)| (x.clone(), y.clone())).collect();
        let back: Vec<(String, String)> = fwd.iter().map(|(x, y)| (y.clone(), x.clone())).collect();
        let r1 = compare_environments(&a, &b, &fwd).unwrap().procrustes_residual;
        let r2 = compare_environments(&b, &a, &back).unwrap().procrustes_residual;
        prop_assert!((r1 - r2).abs() < 1e-10, "{} vs {}", r1, r2);
    }

    #[test]
    fn prespace_matrices_equal_direct_distances(
        lens in prop::collection::vec(2usize..5, 1..5),
        words in prop::collection::vec(0usize..6, 40),
    ) {
        let mut k = 0;
        let mut next = || { k += 1; words[k % words.len()] };
        let streams: Vec<_> = lens
            .iter()
            .enumerate()
            .map(|(s, &len)| {
                let events: Vec<ClickEvent> = (0..len)
                    .map(|t| ClickEvent::new(format!("u{s}"), t as u64, &format!("w{} w{}", next(), next()), format!("d{}", next()), &format!("w{}", next())))
                    .collect();
                irspace::logmodel::Clickstream { stream_id: format!("u{s}#0"), user_key: format!("u{s}"), events }
            })
            .collect();
        let all: Vec<ClickEvent> = streams.iter().flat_map(|s: &irspace::logmodel::Clickstream| s.events.clone()).collect();
        let stats = CorpusStats::from_events(&all).unwrap();
        for method in [DistanceMethod::TfidfCosine, DistanceMethod::Bm25Sym] {
            let model = DistanceModel::new(method, &stats, Bm25Params::default());
            let ps = build_prespace(&streams, &model).unwrap();
            for layer in &ps.layers {
                let n = layer.len();
                for i in 0..n {
                    for j in 0..n {
                        let (p, q) = (layer.points[i], layer.points[j]);
                        let a = &streams[p.stream as usize].events[p.pos as usize];
                        let b = &streams[q.stream as usize].events[q.pos as usize];
                        let want = if i == j { 0.0 } else { click_distance(a, b, method, &stats, Bm25Params::default()).unwrap() };
                        prop_assert_eq!(layer.dist[i * n + j], want);
                    }
                }
            }
        }
    }
}
