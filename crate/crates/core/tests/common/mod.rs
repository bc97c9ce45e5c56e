//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    use rand_distr::{Distribution, StandardNormal};
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn uniform_values(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Cyclic Jacobi eigensolver for a dense symmetric matrix (row-major).
/// Eigenvalues in descending order with matching eigenvectors as rows.
pub fn jacobi_eigen(a: &[f64], d: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * d + j] * m[i * d + j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = m[p * d + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q * d + q] - m[p * d + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let mkp = m[k * d + p];
                    let mkq = m[k * d + q];
                    m[k * d + p] = c * mkp - s * mkq;
                    m[k * d + q] = s * mkp + c * mkq;
                }
                for k in 0..d {
                    let mpk = m[p * d + k];
                    let mqk = m[q * d + k];
                    m[p * d + k] = c * mpk - s * mqk;
                    m[q * d + k] = s * mpk + c * mqk;
                }
                for k in 0..d {
                    let vkp = v[k * d + p];
                    let vkq = v[k * d + q];
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| m[b * d + b].total_cmp(&m[a * d + a]));
    let values = order.iter().map(|&i| m[i * d + i]).collect();
    let vectors = order
        .iter()
        .map(|&c| (0..d).map(|r| v[r * d + c]).collect())
        .collect();
    (values, vectors)
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn gauss_jordan_inverse(a: &[f64], d: usize) -> Vec<f64> {
    let w = 2 * d;
    let mut aug = vec![0.0; d * w];
    for i in 0..d {
        aug[i * w..i * w + d].copy_from_slice(&a[i * d..(i + 1) * d]);
        aug[i * w + d + i] = 1.0;
    }
    for col in 0..d {
        let piv = (col..d)
            .max_by(|&x, &y| aug[x * w + col].abs().total_cmp(&aug[y * w + col].abs()))
            .unwrap();
        for k in 0..w {
            aug.swap(col * w + k, piv * w + k);
        }
        let p = aug[col * w + col];
        for k in 0..w {
            aug[col * w + k] /= p;
        }
        for r in 0..d {
            if r != col {
                let f = aug[r * w + col];
                if f != 0.0 {
                    for k in 0..w {
                        aug[r * w + k] -= f * aug[col * w + k];
                    }
                }
            }
        }
    }
    (0..d)
        .flat_map(|i| aug[i * w + d..i * w + w].to_vec())
        .collect()
}

/// `sqrt(xᵀ P x)` with an explicit matrix.
pub fn quad_form_sqrt(p: &[f64], x: &[f64]) -> f64 {
    let d = x.len();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            s += x[i] * p[i * d + j] * x[j];
        }
    }
    s.max(0.0).sqrt()
}

/// Random SPD matrix `B Bᵀ + 0.5 I`.
pub fn random_spd(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let b = gaussian_values(rng, d * d);
    let mut a = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut s = 0.0;
            for k in 0..d {
                s += b[i * d + k] * b[j * d + k];
            }
            a[i * d + j] = s;
        }
        a[i * d + i] += 0.5;
    }
    a
}

/// Pairwise AUC: wins in half units over all positive/negative pairs.
pub fn auc_oracle(scores: &[f64], labels: &[u8]) -> f64 {
    let mut half = 0u64;
    let (mut np, mut nn) = (0u64, 0u64);
    for (i, &li) in labels.iter().enumerate() {
        if li == 1 {
            np += 1;
        } else {
            nn += 1;
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if lj == 0 {
                if scores[i] > scores[j] {
                    half += 2;
                } else if scores[i] == scores[j] {
                    half += 1;
                }
            }
        }
    }
    half as f64 / (2 * np * nn) as f64
}

/// AP by scanning distinct thresholds from the top; each tie block
/// contributes once with the precision at its end.
pub fn ap_oracle(scores: &[f64], labels: &[u8]) -> f64 {
    let n_pos = labels.iter().filter(|&&l| l == 1).count() as f64;
    let mut thresholds: Vec<f64> = scores.to_vec();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let mut ap = 0.0;
    for t in thresholds {
        let mut tp = 0u64;
        let mut seen = 0u64;
        let mut at = 0u64;
        for (s, &l) in scores.iter().zip(labels) {
            if *s >= t {
                seen += 1;
                tp += l as u64;
                if *s == t {
                    at += l as u64;
                }
            }
        }
        if at > 0 {
            ap += at as f64 * (tp as f64 / seen as f64);
        }
    }
    ap / n_pos
}

/// Brute-force k nearest others, ordered by (squared distance, index).
pub fn knn_oracle(values: &[f64], dim: usize, k: usize) -> Vec<Vec<(usize, f64)>> {
    let n = values.len() / dim;
    (0..n)
        .map(|i| {
            let xi = &values[i * dim..(i + 1) * dim];
            let mut d: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (msde::data_io::sq_dist(xi, &values[j * dim..(j + 1) * dim]), j))
                .collect();
            d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            d.into_iter().take(k).map(|(d2, j)| (j, d2.sqrt())).collect()
        })
        .collect()
}
