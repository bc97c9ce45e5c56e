//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Criterion 12 needs external embeddings and reports SKIP
//! unless `MSDE_EXTERNAL_DIR` points at them (see README).

mod common;

use std::collections::HashSet;
use std::path::Path;
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use msde::data_io::{generate_synthetic, BlobSpec, EmbeddingMatrix, Format, Points};
use msde::density::{
    build_fuzzy_graph, compute_empirical_weights, satisfied_count, search_radius, PairwiseSpace,
    TARGET_FRACTION,
};
use msde::eval::{auc_roc, average_precision, evaluate};
use msde::knn::{brute_force_knn, build_knn_graph};
use msde::scoring::{run_pipeline, GaussianModel, PcaBasis, ScoreReport};
use msde::shift::{run_shift, shift_step, ShiftParams};
use msde::tune::{make_leakage_split, random_search_observed, SearchSpace};
use msde::{DatasetSplit, MsdeConfig};
use rand::Rng;

use common::*;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = fn() -> Outcome;

fn timed(budget_s: u64, f: impl FnOnce() -> Result<String, String>) -> Outcome {
    let t0 = Instant::now();
    let r = f();
    let el = t0.elapsed();
    match r {
        Ok(detail) if el <= Duration::from_secs(budget_s) => {
            Outcome::Pass(format!("{detail}; {:.2}s of {budget_s}s", el.as_secs_f64()))
        }
        Ok(detail) => Outcome::Fail(format!(
            "{detail}; over budget: {:.2}s > {budget_s}s",
            el.as_secs_f64()
        )),
        Err(e) => Outcome::Fail(format!("{e}; {:.2}s", el.as_secs_f64())),
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// ---------------------------------------------------------------------------

fn c1_knn_oracle() -> Outcome {
    timed(10, || {
        let mut r = rng(1);
        let mut cases = 0;
        for &dim in &[1usize, 2, 8, 64] {
            for inst in 0..20 {
                let n = r.random_range(2..=500usize);
                let k = r.random_range(1..=n.min(60));
                let mut vals = gaussian_values(&mut r, n * dim);
                if inst % 4 == 0 {
                    // coarse grid: many exact distance ties
                    vals.iter_mut().for_each(|v| *v = (*v * 2.0).round());
                }
                let p = Points::new(&vals, dim);
                let fast = build_knn_graph(p, k).map_err(e2s)?;
                let slow = brute_force_knn(p, k).map_err(e2s)?;
                let oracle = knn_oracle(&vals, dim, k);
                for i in 0..n {
                    let want: Vec<usize> = oracle[i].iter().map(|x| x.0).collect();
                    let wd: Vec<f64> = oracle[i].iter().map(|x| x.1).collect();
                    ensure(
                        fast.neighbors(i) == want.as_slice()
                            && slow.neighbors(i) == want.as_slice()
                            && fast.distances(i) == wd.as_slice()
                            && slow.distances(i) == wd.as_slice(),
                        || format!("dim {dim} n {n} k {k}: row {i} differs"),
                    )?;
                }
                cases += 1;
            }
        }
        Ok(format!("{cases} instances identical"))
    })
}

fn c2_metric_oracle() -> Outcome {
    timed(5, || {
        let mut r = rng(2);
        for inst in 0..100 {
            let n = r.random_range(2..=500usize);
            let mut labels: Vec<u8> = (0..n).map(|_| r.random_range(0..2u8)).collect();
            labels[0] = 0;
            labels[1] = 1;
            let scores: Vec<f64> = if inst % 2 == 0 {
                gaussian_values(&mut r, n)
            } else {
                (0..n).map(|_| r.random_range(0..8u32) as f64 / 4.0).collect()
            };
            let a = auc_roc(&scores, &labels).map_err(e2s)?;
            let p = average_precision(&scores, &labels).map_err(e2s)?;
            let (ao, po) = (auc_oracle(&scores, &labels), ap_oracle(&scores, &labels));
            ensure(a == ao && p == po, || {
                format!("instance {inst}: auc {a} vs {ao}, ap {p} vs {po}")
            })?;
        }
        Ok("100 instances exact (50 with ties)".into())
    })
}

fn c3_mahalanobis() -> Outcome {
    timed(2, || {
        let mut r = rng(3);
        let mut worst = 0.0f64;
        for s in 0..50 {
            let d = 1 + (s * 63) / 49;
            let sigma = random_spd(&mut r, d);
            let mu = gaussian_values(&mut r, d);
            let m = GaussianModel::from_parts(mu.clone(), sigma.clone(), 1e-4).map_err(e2s)?;
            let inv = gauss_jordan_inverse(&sigma, d);
            for _ in 0..5 {
                let z = gaussian_values(&mut r, d);
                let diff: Vec<f64> = z.iter().zip(&mu).map(|(a, b)| a - b).collect();
                let got = m.mahalanobis(&z).map_err(e2s)?;
                let want = quad_form_sqrt(&inv, &diff);
                let rel = (got - want).abs() / want.max(1e-300);
                worst = worst.max(rel);
            }
            ensure(m.mahalanobis(&mu).map_err(e2s)? == 0.0, || format!("d {d}: nonzero at mu"))?;
        }
        ensure(worst <= 1e-10, || format!("relative error {worst:e}"))?;
        let id = GaussianModel::from_parts(vec![0.0, 0.0], vec![1.0, 0.0, 0.0, 1.0], 1e-4)
            .map_err(e2s)?;
        let five = id.mahalanobis(&[3.0, 4.0]).map_err(e2s)?;
        ensure(five == 5.0, || format!("identity case gave {five}"))?;
        Ok(format!("max relative error {worst:.2e}; (3,4) -> 5"))
    })
}

fn c4_pca() -> Outcome {
    timed(2, || {
        let mut r = rng(4);
        let (n, d) = (200, 24);
        // anisotropic data so the spectrum is well spread
        let mut vals = gaussian_values(&mut r, n * d);
        for row in vals.chunks_mut(d) {
            for (j, v) in row.iter_mut().enumerate() {
                *v *= 1.0 + j as f64 * 0.3;
            }
        }
        let m = EmbeddingMatrix::from_rows(vals.clone(), d).map_err(e2s)?;
        let basis = PcaBasis::fit(&m, d).map_err(e2s)?;
        let (cov_mean, cov) = msde::scoring::covariance(m.points());
        let _ = cov_mean;
        let (ev, _) = jacobi_eigen(&cov, d);
        let mut worst_ev = 0.0f64;
        for (a, b) in basis.explained_variance.iter().zip(&ev) {
            worst_ev = worst_ev.max((a - b).abs());
        }
        ensure(worst_ev <= 1e-8, || format!("eigenvalue error {worst_ev:e}"))?;
        let k = basis.reduced_dim;
        let mut worst_orth = 0.0f64;
        for a in 0..k {
            for b in 0..k {
                let dot: f64 = basis.component(a).iter().zip(basis.component(b)).map(|(x, y)| x * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                worst_orth = worst_orth.max((dot - want).abs());
            }
        }
        ensure(worst_orth <= 1e-8, || format!("orthonormality error {worst_orth:e}"))?;
        let proj = basis.project(&m).map_err(e2s)?;
        let mut worst_dist = 0.0f64;
        for i in (0..n).step_by(7) {
            for j in (0..n).step_by(11) {
                let a = msde::data_io::sq_dist(m.row(i), m.row(j)).sqrt();
                let b = msde::data_io::sq_dist(proj.row(i), proj.row(j)).sqrt();
                worst_dist = worst_dist.max((a - b).abs());
            }
        }
        ensure(worst_dist <= 1e-8, || format!("distance error {worst_dist:e}"))?;
        Ok(format!(
            "eigen {worst_ev:.1e}, orth {worst_orth:.1e}, dist {worst_dist:.1e}"
        ))
    })
}

fn c5_weights_structure() -> Outcome {
    timed(10, || {
        let mut r = rng(5);
        let (n, d) = (300, 6);
        let vals = gaussian_values(&mut r, n * d);
        let p = Points::new(&vals, d);
        let a = compute_empirical_weights(p, 70, 15).map_err(e2s)?;
        let b = compute_empirical_weights(p, 70, 15).map_err(e2s)?;
        let one = msde::par::with_threads(1, || compute_empirical_weights(p, 70, 15)).map_err(e2s)?;
        let four = msde::par::with_threads(4, || compute_empirical_weights(p, 70, 15)).map_err(e2s)?;
        let bits = |w: &[f64]| w.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        ensure(
            bits(&a.weights) == bits(&b.weights)
                && bits(&a.weights) == bits(&one.weights)
                && bits(&a.weights) == bits(&four.weights)
                && a.schedule.epsilon.to_bits() == four.schedule.epsilon.to_bits(),
            || "weights differ across runs or thread counts".into(),
        )?;
        ensure(a.weights.iter().all(|w| (w * 4.0).fract() == 0.0), || {
            "weight not a multiple of 0.25".into()
        })?;
        ensure(
            a.counts.iter().all(|c| c[0] >= c[1] && c[1] >= c[2] && c[2] >= c[3]),
            || "counts increase as radii shrink".into(),
        )?;
        let g = build_fuzzy_graph(p, 15).map_err(e2s)?;
        let space = g.space();
        let sched = search_radius(&space, 70, TARGET_FRACTION).map_err(e2s)?;
        // Grid scan against a precomputed distance table, with the library's
        // own predicate spot-checked along the way.
        let sorted: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut row: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| space.distance(i, j)).collect();
                row.sort_by(f64::total_cmp);
                row
            })
            .collect();
        let mut prev = 0;
        let steps = 400;
        for s in 0..=steps {
            let eps = sched.epsilon * 2.0 * s as f64 / steps as f64;
            let c = sorted
                .iter()
                .filter(|row| row.partition_point(|&d| d < eps) >= sched.t_nbd)
                .count();
            ensure(c >= prev, || format!("predicate drops at eps {eps}"))?;
            if s % 50 == 0 {
                let lib = satisfied_count(&space, sched.t_nbd, eps);
                ensure(lib == c, || format!("satisfied_count {lib} vs {c} at eps {eps}"))?;
            }
            prev = c;
        }
        ensure(
            satisfied_count(&space, sched.t_nbd, sched.epsilon) >= sched.required,
            || "returned radius does not satisfy the target".into(),
        )?;
        Ok(format!(
            "eps {:.4}, t_nbd {}, {} grid points monotone",
            a.schedule.epsilon,
            a.schedule.t_nbd,
            steps + 1
        ))
    })
}

fn c6_shift_mechanics() -> Outcome {
    timed(5, || {
        let mut r = rng(6);
        let (n, d) = (200, 4);
        let vals = gaussian_values(&mut r, n * d);
        let m = EmbeddingMatrix::from_rows(vals.clone(), d).map_err(e2s)?;
        let tiny = ShiftParams {
            eta: 1e-12,
            k: 10,
            t_nbd: 10,
            ..ShiftParams::default()
        };
        let out = run_shift(&m, &tiny).map_err(e2s)?;
        let moved = out
            .points
            .values()
            .iter()
            .zip(&vals)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        ensure(moved <= 1e-9 && out.trace.iterations_run() == 1 && out.trace.converged, || {
            format!("eta 1e-12: moved {moved:e}, {} iterations", out.trace.iterations_run())
        })?;

        let p = Points::new(&vals, d);
        let w = compute_empirical_weights(p, 10, 15).map_err(e2s)?;
        let g = build_knn_graph(p, 10).map_err(e2s)?;
        let (full, _) = shift_step(p, &g, &w.weights, 1.0).map_err(e2s)?;
        for i in 0..n {
            let nb = g.neighbors(i);
            let tot: f64 = nb.iter().map(|&j| w.weights[j]).sum();
            let uniform = tot == 0.0;
            for c in 0..d {
                let mut acc = 0.0;
                for &j in nb {
                    let wj = if uniform { 1.0 } else { w.weights[j] };
                    if wj != 0.0 {
                        acc += wj * vals[j * d + c];
                    }
                }
                let want = acc / if uniform { nb.len() as f64 } else { tot };
                ensure(full[i * d + c] == want, || format!("eta 1: row {i} col {c}"))?;
            }
        }

        for inst in 0..20 {
            let n = r.random_range(10..150usize);
            let dim = r.random_range(1..6usize);
            let v = gaussian_values(&mut r, n * dim);
            let pts = Points::new(&v, dim);
            let k = r.random_range(1..n.min(20));
            let eta = r.random_range(0.01..1.0);
            let g = build_knn_graph(pts, k).map_err(e2s)?;
            let weights: Vec<f64> = (0..n).map(|_| r.random_range(0..5u32) as f64 * 0.25).collect();
            let (next, _) = shift_step(pts, &g, &weights, eta).map_err(e2s)?;
            for i in 0..n {
                let step = msde::data_io::sq_dist(&next[i * dim..(i + 1) * dim], pts.row(i)).sqrt();
                let reach = g.distances(i).iter().copied().fold(0.0, f64::max);
                ensure(step <= eta * reach * (1.0 + 1e-12) + 1e-15, || {
                    format!("instance {inst} row {i}: step {step} > {}", eta * reach)
                })?;
            }
        }
        Ok("no-op, exact mean, displacement bound on 20 instances".into())
    })
}

/// Every end-to-end report checked here must rank identically on raw and
/// normalized scores.
static REPORTS: Mutex<Vec<(String, bool)>> = Mutex::new(Vec::new());

fn note_report(name: &str, rep: &ScoreReport) {
    let same = match (evaluate(&rep.raw, &rep.labels), evaluate(&rep.normalized, &rep.labels)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    };
    REPORTS.lock().unwrap().push((name.to_string(), same));
}

// Frozen results of the fixed-seed thesis instance (seed 0, defaults).
const GOLDEN_SHIFTED_AUC: f64 = 0.7496;
const GOLDEN_NOSHIFT_AUC: f64 = 0.6546;

fn c7_thesis() -> Outcome {
    timed(60, || {
        let split = generate_synthetic(&BlobSpec::default(), 0).map_err(e2s)?;
        let shifted_cfg = MsdeConfig::default();
        let base_cfg = MsdeConfig {
            shift: ShiftParams {
                max_iters: 0,
                ..ShiftParams::default()
            },
            ..MsdeConfig::default()
        };
        let shifted = run_pipeline(&split, &shifted_cfg).map_err(e2s)?;
        let base = run_pipeline(&split, &base_cfg).map_err(e2s)?;
        note_report("thesis shifted", &shifted.report);
        note_report("thesis no-shift", &base.report);
        let s = shifted.report.metrics.ok_or("no metrics")?.auc;
        let b = base.report.metrics.ok_or("no metrics")?.auc;
        let t = shifted.shift.train_solo.weights_used.as_ref().map(|w| w.schedule.t_nbd);
        let detail = format!("shifted AUC {s:?}, no-shift AUC {b:?}, t_nbd in effect {t:?}");
        ensure((s - GOLDEN_SHIFTED_AUC).abs() <= 1e-12 && (b - GOLDEN_NOSHIFT_AUC).abs() <= 1e-12, || {
            format!("{detail}; golden values {GOLDEN_SHIFTED_AUC} / {GOLDEN_NOSHIFT_AUC} changed")
        })?;
        ensure(s >= b - 0.02, || format!("{detail}; shifted below no-shift - 0.02"))?;
        ensure(s >= 0.90, || format!("{detail}; shifted AUC below 0.90"))?;
        Ok(detail)
    })
}

fn c8_extreme() -> Outcome {
    timed(30, || {
        let spec = BlobSpec {
            anomaly_offset: 100.0,
            ..BlobSpec::default()
        };
        let split = generate_synthetic(&spec, 8).map_err(e2s)?;
        let run = run_pipeline(&split, &MsdeConfig::default()).map_err(e2s)?;
        note_report("offset 100", &run.report);
        let m = run.report.metrics.ok_or("no metrics")?;
        ensure(m.auc == 1.0 && m.ap == 1.0, || format!("auc {} ap {}", m.auc, m.ap))?;
        Ok("AUC 1.0, AP 1.0".into())
    })
}

fn c9_normalization() -> Outcome {
    timed(60, || {
        // one extra small run so the check never rests on a single report
        let spec = BlobSpec {
            dim: 8,
            n_train: 150,
            n_test_normal: 40,
            n_test_anomalous: 40,
            anomaly_offset: 1.5,
            noise_scale: 1.0,
        };
        let split = generate_synthetic(&spec, 9).map_err(e2s)?;
        let cfg = MsdeConfig {
            shift: ShiftParams {
                k: 15,
                t_nbd: 20,
                ..ShiftParams::default()
            },
            ..MsdeConfig::default()
        };
        let run = run_pipeline(&split, &cfg).map_err(e2s)?;
        note_report("small", &run.report);
        let reps = REPORTS.lock().unwrap();
        let bad: Vec<&str> = reps.iter().filter(|r| !r.1).map(|r| r.0.as_str()).collect();
        ensure(bad.is_empty(), || format!("raw and normalized metrics differ on {bad:?}"))?;
        Ok(format!("{} end-to-end reports identical", reps.len()))
    })
}

fn c10_leakage() -> Outcome {
    timed(30, || {
        let spec = BlobSpec {
            dim: 6,
            n_train: 120,
            n_test_normal: 40,
            n_test_anomalous: 40,
            anomaly_offset: 2.5,
            noise_scale: 1.0,
        };
        let split = generate_synthetic(&spec, 10).map_err(e2s)?;
        let ids = |m: &EmbeddingMatrix| m.row_ids().to_vec();
        let train_ids: HashSet<String> = ids(&split.train).into_iter().collect();
        let test_ids: HashSet<String> = ids(&split.test).into_iter().collect();
        for seed in 0..50u64 {
            let l = make_leakage_split(&split, seed).map_err(e2s)?;
            let (fit, vn) = (ids(&l.fit_train), ids(&l.val_normals));
            let (va, ft) = (ids(&l.val_anomalies), ids(&l.final_test));
            let a: HashSet<String> = fit.iter().chain(&vn).cloned().collect();
            let b: HashSet<String> = va.iter().chain(&ft).cloned().collect();
            ensure(
                a.len() == fit.len() + vn.len() && a == train_ids,
                || format!("seed {seed}: train partition not disjoint/exhaustive"),
            )?;
            ensure(
                b.len() == va.len() + ft.len() && b == test_ids,
                || format!("seed {seed}: test partition not disjoint/exhaustive"),
            )?;
            ensure(ids(&l.full_train).into_iter().collect::<HashSet<_>>() == train_ids, || {
                format!("seed {seed}: full train differs")
            })?;
        }

        let seen: Mutex<HashSet<String>> = Mutex::new(HashSet::new());
        let observer = |s: &DatasetSplit| {
            let mut g = seen.lock().unwrap();
            for id in s.train.row_ids().iter().chain(s.test.row_ids()) {
                let raw = id
                    .strip_prefix("train:")
                    .or_else(|| id.strip_prefix("test:"))
                    .unwrap_or(id);
                g.insert(raw.to_string());
            }
        };
        let base = MsdeConfig {
            shift: ShiftParams {
                t_nbd: 20,
                ..ShiftParams::default()
            },
            ..MsdeConfig::default()
        };
        let out = random_search_observed(&split, &SearchSpace::default(), 10, 3, &base, &observer)
            .map_err(e2s)?;
        let seen = seen.into_inner().unwrap();
        let leaked = out
            .leakage
            .final_test
            .row_ids()
            .iter()
            .filter(|id| seen.contains(*id))
            .count();
        ensure(leaked == 0, || format!("{leaked} final-test ids seen during trials"))?;
        ensure(out.trials.len() == 10, || "wrong trial count".into())?;
        Ok(format!(
            "50 splits partition cleanly; {} ids observed in 10 trials, none from final test",
            seen.len()
        ))
    })
}

fn cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_msde"))
        .args(args)
        .output()
        .map_err(e2s)?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "msde {} failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn c11_determinism() -> Outcome {
    timed(60, || {
        let dir = tempfile::tempdir().map_err(e2s)?;
        let d = dir.path();
        let data = d.join("data");
        let s = |p: &Path| p.to_string_lossy().into_owned();
        cli(&["synth", "--seed", "11", "--out", &s(&data)])?;
        let run = |name: &str, threads: &str| -> Result<Vec<u8>, String> {
            let out = d.join(name);
            cli(&[
                "run",
                "--train",
                &s(&data.join("train.npy")),
                "--test",
                &s(&data.join("test.npy")),
                "--labels",
                &s(&data.join("labels.csv")),
                "--out",
                &s(&out),
                "--seed",
                "11",
                "--threads",
                threads,
            ])?;
            std::fs::read(out.join("scores.csv")).map_err(e2s)
        };
        let a = run("a", "1")?;
        let b = run("b", "1")?;
        let c = run("c", "2")?;
        let e = run("e", "4")?;
        ensure(a == b, || "repeat run differs".into())?;
        ensure(a == c && a == e, || "thread count changes scores.csv".into())?;
        Ok(format!("{} bytes identical across 4 runs (threads 1,1,2,4)", a.len()))
    })
}

/// Reads `train.npy`, `test.npy`, `labels.csv` and `expected.txt`
/// (`auc ap` on one line) from `MSDE_EXTERNAL_DIR`.
fn c12_external() -> Outcome {
    let Some(dir) = std::env::var_os("MSDE_EXTERNAL_DIR") else {
        return Outcome::Skip("MSDE_EXTERNAL_DIR not set".into());
    };
    let dir = std::path::PathBuf::from(dir);
    let needed = ["train.npy", "test.npy", "labels.csv", "expected.txt"];
    if let Some(f) = needed.iter().find(|f| !dir.join(f).exists()) {
        return Outcome::Skip(format!("{f} missing in {}", dir.display()));
    }
    timed(3600, || {
        let train = msde::data_io::load_embeddings(dir.join("train.npy"), Format::Npy).map_err(e2s)?;
        let test = msde::data_io::load_embeddings(dir.join("test.npy"), Format::Npy).map_err(e2s)?;
        let test = msde::data_io::attach_labels(test, dir.join("labels.csv")).map_err(e2s)?;
        let split = DatasetSplit::new(train, test).map_err(e2s)?;
        let text = std::fs::read_to_string(dir.join("expected.txt")).map_err(e2s)?;
        let want: Vec<f64> = text
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(e2s))
            .collect::<Result<_, _>>()?;
        ensure(want.len() == 2, || "expected.txt needs `auc ap`".into())?;
        let run = run_pipeline(&split, &MsdeConfig::default()).map_err(e2s)?;
        let m = run.report.metrics.ok_or("no metrics")?;
        let detail = format!("auc {:.4} (want {:.3}), ap {:.4} (want {:.3})", m.auc, want[0], m.ap, want[1]);
        ensure((m.auc - want[0]).abs() <= 0.02 && (m.ap - want[1]).abs() <= 0.02, || detail.clone())?;
        Ok(detail)
    })
}

fn main() {
    let _ = env_logger::Builder::new()
        .filter_level(log::LevelFilter::Error)
        .try_init();
    let checks: [(u32, &str, Check); 12] = [
        (1, "knn matches brute force", c1_knn_oracle),
        (2, "auc/ap match pairwise oracles", c2_metric_oracle),
        (3, "mahalanobis vs explicit inverse", c3_mahalanobis),
        (4, "pca vs dense eigensolve", c4_pca),
        (5, "density weights determinism and structure", c5_weights_structure),
        (6, "shift mechanics", c6_shift_mechanics),
        (7, "synthetic thesis check", c7_thesis),
        (8, "extreme separation", c8_extreme),
        (9, "normalization invariance", c9_normalization),
        (10, "zero-leakage audit", c10_leakage),
        (11, "end-to-end determinism", c11_determinism),
        (12, "external embeddings", c12_external),
    ];
    let filter: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (id, name, check) in checks {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let (tag, detail) = match check() {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("criterion {id:>2} {tag}  {name}: {detail}");
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
