//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use irspace::diagnostics::{compare_environments, RoughnessReport};
use irspace::geometry::{
    christoffel, curve_length, integrate_geodesic, Grid, Interpolation, MetricField, Sample, StopReason,
};
use irspace::logmodel::{extract_clickstreams, ClickEvent, Clickstream, SessionParams};
use irspace::metricspace::{bm25_score, Bm25Params, CorpusStats};
use irspace::pipeline::{run_stages, PipelineConfig, Stage};
use irspace::skeleton::mds::{embed_distance_matrix, majorize, normalized_stress, MdsOptions};
use irspace::skeleton::{procrustes_residual, EmbeddedSpace};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// 1

fn flat_geodesics() -> Outcome {
    let start = Instant::now();
    let grid = Grid::uniform(&[-4.0; 3], &[4.0; 3], &[32; 3]).unwrap();
    let field = MetricField::constant(grid, &DMatrix::identity(3, 3), Interpolation::Cubic).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let x0: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
        let v0: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let run = integrate_geodesic(&field, &x0, &v0, 1.0, 1e-3).map_err(|e| e.to_string())?;
        if run.stop != StopReason::Completed {
            return Err("run stopped at the boundary".into());
        }
        let end = run.trajectory.last().unwrap();
        for i in 0..3 {
            worst = worst.max((end.x[i] - (x0[i] + v0[i])).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst < 1e-8 && secs < 5.0,
        format!("max endpoint error {worst:.2e}, {secs:.2} s"),
    )
}

// 2, 3

fn sphere(theta: (f64, f64), phi: (f64, f64), n: usize) -> MetricField {
    let grid = Grid::uniform(&[theta.0, phi.0], &[theta.1, phi.1], &[n, n]).unwrap();
    MetricField::from_fn(grid, Interpolation::Cubic, |x| {
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, x[0].sin().powi(2)])
    })
    .unwrap()
}

/// Largest deviation from the closed-form symbols at 100 quasi-random
/// interior points.
fn christoffel_error(field: &MetricField) -> f64 {
    let g = field.grid();
    let (nt, np) = (g.nodes[0], g.nodes[1]);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let u = (k as f64 * 0.618_033_988_7).fract();
        let v = (k as f64 * 0.414_213_562_4).fract();
        let th = g.axis_coord(0, 1) + u * (g.axis_coord(0, nt - 2) - g.axis_coord(0, 1));
        let ph = g.axis_coord(1, 1) + v * (g.axis_coord(1, np - 2) - g.axis_coord(1, 1));
        let c = christoffel(field, &[th, ph]).unwrap();
        worst = worst
            .max((c.get(0, 1, 1) + th.sin() * th.cos()).abs())
            .max((c.get(1, 0, 1) - th.cos() / th.sin()).abs())
            .max((c.get(1, 1, 0) - th.cos() / th.sin()).abs());
    }
    worst
}

fn sphere_oracle() -> Outcome {
    let band = (0.4, PI - 0.4);
    let full_turn = (0.0, 2.0 * PI);
    let e1 = christoffel_error(&sphere(band, full_turn, 256));
    let e2 = christoffel_error(&sphere(band, full_turn, 511));
    let ratio = e1 / e2;

    let eq = sphere((PI / 2.0 - 1.0, PI / 2.0 + 1.0), (-0.5, 2.0 * PI + 0.5), 256);
    let run = integrate_geodesic(&eq, &[PI / 2.0, 0.0], &[0.0, 1.0], 1.0, 1e-3).map_err(|e| e.to_string())?;
    let eq_dev = run
        .trajectory
        .samples
        .iter()
        .map(|s| (s.x[0] - PI / 2.0).abs())
        .fold(0.0, f64::max);

    let mer = sphere((-PI / 2.0 - 0.1, 1.5 * PI + 0.1), (-1.0, 1.0), 256);
    let run = integrate_geodesic(&mer, &[PI / 2.0, 0.0], &[1.0, 0.0], PI, 1e-3).map_err(|e| e.to_string())?;
    let len_err = (curve_length(&mer, &run.trajectory).map_err(|e| e.to_string())? - PI).abs();

    check(
        e1 < 5e-4 && (3.5..=4.5).contains(&ratio) && eq_dev < 1e-6 && len_err < 1e-4,
        format!("max error {e1:.2e}, ratio {ratio:.3}, equator drift {eq_dev:.1e}, meridian length error {len_err:.1e}"),
    )
}

fn speed_conservation() -> Outcome {
    let f = sphere((0.2, PI - 0.2), (-0.5, 2.0 * PI + 0.5), 256);
    let th0: f64 = 1.0;
    let v0 = [0.6, 0.8 / th0.sin()];
    let run = integrate_geodesic(&f, &[th0, 0.5], &v0, 1.0, 1e-3).map_err(|e| e.to_string())?;
    if run.stop != StopReason::Completed {
        return Err("run stopped at the boundary".into());
    }
    let speed = |s: &Sample| {
        let g = f.metric_at(&s.x).unwrap();
        let v = nalgebra::DVector::from_column_slice(&s.v);
        (v.transpose() * &g * &v)[(0, 0)]
    };
    let s0 = speed(&run.trajectory.samples[0]);
    let drift = run
        .trajectory
        .samples
        .iter()
        .map(|s| (speed(s) - s0).abs() / s0)
        .fold(0.0, f64::max);
    check(drift < 1e-6, format!("relative speed drift {drift:.2e}"))
}

// 4

fn distances(pts: &[[f64; 2]]) -> Vec<f64> {
    let n = pts.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = ((pts[i][0] - pts[j][0]).powi(2) + (pts[i][1] - pts[j][1]).powi(2)).sqrt();
        }
    }
    d
}

/// Plain gradient descent on raw stress from many random starts.
fn brute_force_stress(d: &[f64], n: usize, starts: u64) -> f64 {
    let mut best = f64::INFINITY;
    for seed in 0..starts {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let mut x: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        for _ in 0..4000 {
            let mut grad = vec![0.0; 2 * n];
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let dx = x[2 * i] - x[2 * j];
                    let dy = x[2 * i + 1] - x[2 * j + 1];
                    let r = (dx * dx + dy * dy).sqrt().max(1e-12);
                    let c = 2.0 * (r - d[i * n + j]) / r;
                    grad[2 * i] += c * dx;
                    grad[2 * i + 1] += c * dy;
                }
            }
            for (xi, gi) in x.iter_mut().zip(&grad) {
                *xi -= 0.01 * gi;
            }
        }
        best = best.min(normalized_stress(d, &x, 2));
    }
    best
}

fn embedding() -> Outcome {
    let opts = MdsOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst_stress, mut worst_rel): (f64, f64) = (0.0, 0.0);
    for &n in &[10usize, 25, 50, 100, 200] {
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|_| [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)])
            .collect();
        let d = distances(&pts);
        let r = embed_distance_matrix(&d, n, 2, &opts);
        worst_stress = worst_stress.max(r.stress());
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (r.point(i), r.point(j));
                let got = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                worst_rel = worst_rel.max((got - d[i * n + j]).abs() / d[i * n + j]);
            }
        }
    }

    let mut increases = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(5..30);
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = rng.random_range(0.1..2.0);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        let start: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = majorize(&d, n, 2, start, &MdsOptions { seed, ..opts });
        increases += r.stress_history.windows(2).filter(|w| w[1] > w[0]).count();
    }

    let tetra: Vec<f64> = (0..16).map(|k| if k / 4 == k % 4 { 0.0 } else { 1.0 }).collect();
    let ours = embed_distance_matrix(&tetra, 4, 2, &opts).stress();
    let brute = brute_force_stress(&tetra, 4, 50);

    check(
        worst_stress < 1e-6 && worst_rel < 1e-4 && increases == 0 && (ours - brute).abs() < 1e-3,
        format!(
            "recovery stress {worst_stress:.1e}, distance error {worst_rel:.1e}, stress increases {increases}, \
             tetrahedron {ours:.6} vs brute force {brute:.6}"
        ),
    )
}

// 5

fn bm25() -> Outcome {
    // (N, avgdl, |D|, k1, b, [(df, tf)], expected)
    #[allow(clippy::type_complexity)]
    let cases: [(usize, f64, usize, f64, f64, &[(usize, usize)], f64); 10] = [
        (100, 10.0, 10, 1.2, 0.75, &[(10, 1)], 2.2637452596777816),
        (100, 10.0, 10, 1.2, 0.75, &[(10, 3)], 3.5573139794936566),
        (100, 10.0, 20, 1.2, 0.75, &[(10, 3)], 2.9295526889947765),
        (1000, 25.5, 7, 1.5, 0.5, &[(3, 2), (400, 1)], 10.738228821788887),
        (50, 8.0, 8, 2.0, 1.0, &[(49, 1), (1, 5)], 7.586339801612884),
        (10, 4.0, 12, 0.9, 0.0, &[(5, 4)], 1.0750854229093028),
        (10, 4.0, 12, 0.9, 1.0, &[(5, 4)], 0.7862565033217289),
        (1, 3.0, 3, 1.2, 0.75, &[(1, 1)], 0.28768207245178085),
        (500, 100.0, 250, 1.2, 0.75, &[(20, 10), (2, 1), (250, 3)], 9.711853084388217),
        (2000, 12.0, 1, 3.0, 0.3, &[(1000, 1), (7, 2)], 11.5779256347403),
    ];
    let mut worst: f64 = 0.0;
    for (num_docs, avg, len, k1, b, terms, expected) in cases {
        let names: Vec<String> = (0..terms.len()).map(|i| format!("t{i}")).collect();
        let dfs = names.iter().zip(terms).map(|(t, &(df, _))| (t.clone(), df)).collect();
        let tfs: BTreeMap<String, usize> = names.iter().zip(terms).map(|(t, &(_, tf))| (t.clone(), tf)).collect();
        let stats = CorpusStats::new(num_docs, dfs, avg, BTreeMap::from([("d".to_string(), len)])).unwrap();
        let got = bm25_score(&names, "d", &tfs, &stats, Bm25Params::new(k1, b).unwrap()).unwrap();
        worst = worst.max((got - expected).abs());
    }

    let mut violations = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let num_docs = rng.random_range(1..5000);
        let df = rng.random_range(1..=num_docs);
        let avg = rng.random_range(1.0..200.0);
        let len = rng.random_range(1..400usize);
        let tf = rng.random_range(1..50usize);
        let params = Bm25Params::new(rng.random_range(0.1..3.0), rng.random_range(0.0..=1.0)).unwrap();
        let stats = CorpusStats::new(
            num_docs,
            BTreeMap::from([("t".to_string(), df)]),
            avg,
            BTreeMap::from([("d".to_string(), len), ("e".to_string(), len + 1)]),
        )
        .unwrap();
        let q = vec!["t".to_string()];
        let score = |doc: &str, f: usize| bm25_score(&q, doc, &BTreeMap::from([("t".to_string(), f)]), &stats, params).unwrap();
        if score("d", tf + 1) < score("d", tf) || score("e", tf) > score("d", tf) {
            violations += 1;
        }
    }
    check(
        worst < 1e-10 && violations == 0,
        format!("max error {worst:.1e} over 10 instances, {violations} monotonicity violations in 1000"),
    )
}

// 6, 9

fn run_pipeline(out: &Path, overrides: &[&str]) -> Result<(), String> {
    let mut sets: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    sets.push(format!("output_dir = {:?}", out.display().to_string()));
    let cfg = PipelineConfig::from_toml_with_overrides("", &sets).map_err(|e| e.to_string())?;
    let stages = [
        Stage::Synth,
        Stage::Ingest,
        Stage::Sessionize,
        Stage::Prespace,
        Stage::Embed,
        Stage::Fit,
        Stage::Geodesic,
        Stage::Diagnose,
    ];
    run_stages(&stages, &cfg, false, |_, _| {}).map_err(|e| e.to_string())
}

fn read_lines<T: serde::de::DeserializeOwned>(path: &Path) -> Vec<T> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn gradient_rms(out: &Path) -> f64 {
    let r: Vec<RoughnessReport> = read_lines(&out.join("diagnose/roughness.jsonl"));
    r[0].gradient_rms
}

fn end_to_end() -> Outcome {
    let start = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let flat = tmp.path().join("flat");
    run_pipeline(&flat, &[])?;

    let mut space: EmbeddedSpace =
        serde_json::from_str(&std::fs::read_to_string(flat.join("embed/space.json")).unwrap()).unwrap();
    space.reindex();
    let events: Vec<ClickEvent> = read_lines(&flat.join("ingest/events.jsonl"));
    let streams: Vec<Clickstream> = read_lines(&flat.join("sessionize/streams.jsonl"));
    let truth: Vec<serde_json::Value> = read_lines(&flat.join("synth/ground_truth.jsonl"));
    let calib: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(flat.join("synth/calibration.json")).unwrap()).unwrap();
    let scale = calib["distance_scale"].as_f64().unwrap();
    let index: HashMap<(&str, u64), usize> = events
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.user_key.as_str(), e.timestamp_ms), i))
        .collect();

    let mut worst_layer: f64 = 0.0;
    for t in 0..space.num_layers() {
        let pts: Vec<_> = space.layer_points(t).collect();
        let emb: Vec<Vec<f64>> = pts.iter().map(|p| p.coords[..2].to_vec()).collect();
        let planted: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| {
                let ev = &streams[p.id.stream as usize].events[p.id.pos as usize];
                let g = &truth[index[&(ev.user_key.as_str(), ev.timestamp_ms)]];
                vec![g["x"].as_f64().unwrap() * scale, g["y"].as_f64().unwrap() * scale]
            })
            .collect();
        let mut diam: f64 = 0.0;
        for a in &planted {
            for b in &planted {
                diam = diam.max(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
            }
        }
        if pts.len() >= 3 && diam > 0.0 {
            worst_layer = worst_layer.max(procrustes_residual(&emb, &planted, true) / diam);
        }
    }

    let field = MetricField::read_jsonl(BufReader::new(std::fs::File::open(flat.join("fit/metric.jsonl")).unwrap()))
        .unwrap();
    let g = field.grid();
    let interior: Vec<DMatrix<f64>> = (0..g.num_nodes())
        .filter(|&k| g.is_interior_node(&g.multi_index(k)))
        .map(|k| field.node_metric(k).view((0, 0), (2, 2)).into_owned())
        .collect();
    let mut diag: Vec<f64> = interior.iter().map(|m| (m[(0, 0)] + m[(1, 1)]) / 2.0).collect();
    diag.sort_by(f64::total_cmp);
    let c = diag[diag.len() / 2];
    let worst_metric = interior
        .iter()
        .map(|m| (m - DMatrix::identity(2, 2) * c).abs().max() / c)
        .fold(0.0, f64::max);

    let bump = tmp.path().join("bump");
    run_pipeline(&bump, &["synth.surface = { kind = \"hemisphere_bump\", radius = 0.2 }"])?;
    let (flat_rms, bump_rms) = (gradient_rms(&flat), gradient_rms(&bump));
    let secs = start.elapsed().as_secs_f64();
    check(
        worst_layer < 0.05 && worst_metric < 0.15 && flat_rms < bump_rms && secs < 60.0,
        format!(
            "layer residual/diameter {:.2}%, metric off c*I by {:.1}%, gradient_rms flat {flat_rms:.3} vs bump {bump_rms:.3}, {secs:.1} s",
            worst_layer * 100.0,
            worst_metric * 100.0
        ),
    )
}

fn collect_files(dir: &Path, base: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            collect_files(&p, base, out);
        } else {
            out.insert(p.strip_prefix(base).unwrap().display().to_string(), std::fs::read(&p).unwrap());
        }
    }
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("nested/b"));
    run_pipeline(&a, &[])?;
    run_pipeline(&b, &[])?;
    let (mut fa, mut fb) = (BTreeMap::new(), BTreeMap::new());
    collect_files(&a, &a, &mut fa);
    collect_files(&b, &b, &mut fb);
    let differing: Vec<&String> = fa.keys().filter(|k| fa.get(*k) != fb.get(*k)).collect();
    check(
        fa.len() == fb.len() && differing.is_empty(),
        format!("{} artifacts compared, {} differ {:?}", fa.len(), differing.len(), differing),
    )
}

// 7

fn sessionization() -> Outcome {
    let n = 1_000_000;
    let gap = 30 * 60 * 1000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut t = vec![0u64; 2000];
    let events: Vec<ClickEvent> = (0..n)
        .map(|_| {
            let u = rng.random_range(0..2000usize);
            t[u] += if rng.random_bool(0.1) {
                rng.random_range(gap - 10..3 * gap)
            } else {
                rng.random_range(0..gap / 4)
            };
            ClickEvent {
                user_key: format!("u{u:04}"),
                timestamp_ms: t[u],
                query_terms: vec![],
                doc_id: String::new(),
                doc_terms: vec![],
            }
        })
        .collect();
    let params = SessionParams::new(gap, 1).unwrap();
    let start = Instant::now();
    let streams = extract_clickstreams(events.clone(), params).map_err(|e| e.to_string())?;
    let rate = n as f64 / start.elapsed().as_secs_f64();

    let mut seen: HashMap<(String, u64), usize> = HashMap::new();
    for e in &events {
        *seen.entry((e.user_key.clone(), e.timestamp_ms)).or_default() += 1;
    }
    let mut total = 0;
    let mut bad = 0;
    let mut last_end: HashMap<&str, u64> = HashMap::new();
    for s in &streams {
        total += s.events.len();
        for w in s.events.windows(2) {
            if w[1].timestamp_ms < w[0].timestamp_ms || w[1].timestamp_ms - w[0].timestamp_ms > gap {
                bad += 1;
            }
        }
        for e in &s.events {
            if e.user_key != s.user_key {
                bad += 1;
            }
            match seen.get_mut(&(e.user_key.clone(), e.timestamp_ms)) {
                Some(c) if *c > 0 => *c -= 1,
                _ => bad += 1,
            }
        }
        let first = s.events[0].timestamp_ms;
        if let Some(&end) = last_end.get(s.user_key.as_str()) {
            if first <= end || first - end <= gap {
                bad += 1;
            }
        }
        last_end.insert(&s.user_key, s.events.last().unwrap().timestamp_ms);
    }
    check(
        total == n && bad == 0 && rate >= 1e5,
        format!("{total} of {n} events in {} streams, {bad} violations, {rate:.0} events/s", streams.len()),
    )
}

// 8

fn comparison() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("env");
    run_pipeline(&out, &[])?;
    let mut a: EmbeddedSpace =
        serde_json::from_str(&std::fs::read_to_string(out.join("embed/space.json")).unwrap()).unwrap();
    a.reindex();
    let pairs: Vec<(String, String)> = a
        .threads
        .iter()
        .map(|t| (t.stream_id.clone(), t.stream_id.clone()))
        .collect();

    let same = compare_environments(&a, &a.clone(), &pairs).map_err(|e| e.to_string())?;
    let ident = same.procrustes_residual.max(same.trajectory_deviation.max);

    let (c, s) = (0.3f64.cos(), 0.3f64.sin());
    let moved = a.map_spatial(|x| vec![-(c * x[0] - s * x[1]) + 2.0, s * x[0] + c * x[1] - 1.0]);
    let rigid = compare_environments(&a, &moved, &pairs).map_err(|e| e.to_string())?;

    let delta = 1e-5;
    let mut b = a.clone();
    let target = a.threads[0].points[1];
    let p = b.points.iter_mut().find(|p| p.id == target).unwrap();
    p.coords[0] += delta;
    b.reindex();
    let pert = compare_environments(&a, &b, &pairs).map_err(|e| e.to_string())?;
    let others = pert.pairs[1..].iter().map(|p| p.frechet).fold(0.0, f64::max);
    let max_dev = pert.trajectory_deviation.max;

    check(
        ident < 1e-8
            && rigid.procrustes_residual < 1e-8
            && (delta / 2.0..=delta).contains(&max_dev)
            && pert.pairs[0].frechet == max_dev
            && others < 1e-6,
        format!(
            "identical {ident:.1e}, rigid copy residual {:.1e}, perturbed max deviation {:.3} delta, others {others:.1e}",
            rigid.procrustes_residual,
            max_dev / delta
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("flat-space geodesics", flat_geodesics),
        ("sphere christoffel and geodesics", sphere_oracle),
        ("geodesic speed conservation", speed_conservation),
        ("layer embedding", embedding),
        ("bm25 scoring", bm25),
        ("end-to-end recovery", end_to_end),
        ("sessionization", sessionization),
        ("environment comparison", comparison),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let took = Duration::from_secs_f64(start.elapsed().as_secs_f64());
        match result {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}) [{took:.2?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail}) [{took:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
