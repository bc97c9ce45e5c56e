//! Empirical density weights.
//!
//! Each sample gets a weight equal to the average number of other samples
//! strictly inside four nested radii, measured in the space whose coordinates
//! are the rows of a UMAP-style fuzzy k-NN membership graph. The outer radius
//! is found by bisection so that 30% of samples have at least `t_nbd` others
//! inside it.

use crate::data_io::{sq_dist, Points};
use crate::error::{MsdeError, Result};
use crate::knn::build_knn_graph;
use crate::par;

/// Fraction of samples that must meet the neighbor threshold at the outer radius.
pub const TARGET_FRACTION: f64 = 0.3;
/// Constant in the radius step `(eps - RADIUS_OFFSET) / 4`.
pub const RADIUS_OFFSET: f64 = 1e-6;
/// Lower bisection bracket used when some points coincide.
pub const ZERO_BRACKET: f64 = 1e-12;
const RADIUS_STEPS: usize = 60;
const RADIUS_RTOL: f64 = 1e-6;
const SIGMA_STEPS: usize = 64;
const SIGMA_FLOOR: f64 = 1e-10;

/// A finite set of items with a symmetric pairwise distance.
pub trait PairwiseSpace: Sync {
    fn len(&self) -> usize;
    fn distance(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Others strictly closer than `radius` to `i`.
    fn count_within(&self, i: usize, radius: f64) -> usize {
        (0..self.len())
            .filter(|&j| j != i && self.distance(i, j) < radius)
            .count()
    }
}

impl PairwiseSpace for Points<'_> {
    fn len(&self) -> usize {
        Points::len(self)
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        sq_dist(self.row(i), self.row(j)).sqrt()
    }
}

/// Symmetric fuzzy membership graph plus the per-sample `rho`/`sigma` that
/// produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyGraph {
    /// Directed memberships `a_ij`, one sorted sparse row per sample.
    pub directed: Vec<Vec<(usize, f64)>>,
    /// Symmetrized `G = A + Aᵀ - A∘Aᵀ`, sorted sparse rows, zero diagonal.
    pub rows: Vec<Vec<(usize, f64)>>,
    pub rho: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Neighbor count actually used after clamping to `n - 1`.
    pub k_umap: usize,
}

impl FuzzyGraph {
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// `G_ij`, zero when absent.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        sparse_get(&self.rows[i], j)
    }

    pub fn space(&self) -> GraphSpace<'_> {
        GraphSpace { rows: &self.rows }
    }
}

fn sparse_get(row: &[(usize, f64)], j: usize) -> f64 {
    row.binary_search_by_key(&j, |e| e.0)
        .map_or(0.0, |p| row[p].1)
}

/// Rows of a fuzzy graph used as coordinates in `R^n`.
#[derive(Debug, Clone, Copy)]
pub struct GraphSpace<'a> {
    rows: &'a [Vec<(usize, f64)>],
}

impl PairwiseSpace for GraphSpace<'_> {
    fn len(&self) -> usize {
        self.rows.len()
    }

    /// Exact sparse Euclidean distance, merged in column order.
    fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (&self.rows[i], &self.rows[j]);
        let (mut p, mut q) = (0, 0);
        let mut acc = 0.0;
        while p < a.len() || q < b.len() {
            let d = match (a.get(p), b.get(q)) {
                (Some(&(ca, va)), Some(&(cb, vb))) if ca == cb => {
                    p += 1;
                    q += 1;
                    va - vb
                }
                (Some(&(ca, va)), Some(&(cb, _))) if ca < cb => {
                    p += 1;
                    va
                }
                (Some(&(_, va)), None) => {
                    p += 1;
                    va
                }
                (_, Some(&(_, vb))) => {
                    q += 1;
                    vb
                }
                (None, None) => unreachable!(),
            };
            acc += d * d;
        }
        acc.sqrt()
    }
}

/// Sum of memberships over the neighbors after the nearest one.
fn membership_mass(dists: &[f64], rho: f64, sigma: f64) -> f64 {
    dists
        .iter()
        .skip(1)
        .map(|&d| (-(d - rho).max(0.0) / sigma).exp())
        .sum()
}

/// Bandwidth `sigma` such that the memberships of the neighbors after the
/// nearest sum to `log2(k)`; the nearest neighbor itself always gets 1.
fn fit_sigma(dists: &[f64], rho: f64, k: usize) -> f64 {
    let target = (k as f64).log2();
    let mut lo = SIGMA_FLOOR;
    let mut hi = (dists.last().copied().unwrap_or(0.0) * 1e3).max(SIGMA_FLOOR);
    for _ in 0..SIGMA_STEPS {
        let mid = lo + (hi - lo) / 2.0;
        if membership_mass(dists, rho, mid) > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo + (hi - lo) / 2.0
}

/// Build the fuzzy simplicial set over `points` with `k_umap` neighbors
/// (clamped to `n - 1`).
pub fn build_fuzzy_graph(points: Points<'_>, k_umap: usize) -> Result<FuzzyGraph> {
    let n = points.len();
    if n < 2 {
        return Err(MsdeError::Density(format!(
            "need at least 2 points for a fuzzy graph, got {n}"
        )));
    }
    if k_umap < 2 {
        return Err(MsdeError::Density(format!("k_umap must be at least 2, got {k_umap}")));
    }
    let knn = build_knn_graph(points, k_umap.min(n - 1))?;
    let k = knn.k();

    let fitted: Vec<(f64, f64, Vec<(usize, f64)>)> = par::map_indices(n, |i| {
        let dists = knn.distances(i);
        let rho = dists[0];
        let sigma = fit_sigma(dists, rho, k);
        let mut row: Vec<(usize, f64)> = knn
            .neighbors(i)
            .iter()
            .zip(dists)
            .map(|(&j, &d)| (j, (-(d - rho).max(0.0) / sigma).exp()))
            .collect();
        row.sort_unstable_by_key(|e| e.0);
        (rho, sigma, row)
    });
    let mut rho = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    let mut directed = Vec::with_capacity(n);
    for (r, s, row) in fitted {
        rho.push(r);
        sigma.push(s);
        directed.push(row);
    }

    // Transpose of A, so each symmetric row can be merged from A[i] and Aᵀ[i].
    let mut transposed: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, row) in directed.iter().enumerate() {
        for &(j, a) in row {
            transposed[j].push((i, a));
        }
    }
    let rows = par::map_indices(n, |i| {
        let (fwd, bwd) = (&directed[i], &transposed[i]);
        let mut out = Vec::with_capacity(fwd.len() + bwd.len());
        let (mut p, mut q) = (0, 0);
        while p < fwd.len() || q < bwd.len() {
            let (j, a, b) = match (fwd.get(p), bwd.get(q)) {
                (Some(&(cf, a)), Some(&(cb, b))) if cf == cb => {
                    p += 1;
                    q += 1;
                    (cf, a, b)
                }
                (Some(&(cf, a)), Some(&(cb, _))) if cf < cb => {
                    p += 1;
                    (cf, a, 0.0)
                }
                (Some(&(cf, a)), None) => {
                    p += 1;
                    (cf, a, 0.0)
                }
                (_, Some(&(cb, b))) => {
                    q += 1;
                    (cb, 0.0, b)
                }
                (None, None) => unreachable!(),
            };
            let g = a + b - a * b;
            if g != 0.0 {
                out.push((j, g));
            }
        }
        out
    });
    Ok(FuzzyGraph {
        directed,
        rows,
        rho,
        sigma,
        k_umap: k,
    })
}

/// The outer radius and the four nested counting radii derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusSchedule {
    pub epsilon: f64,
    pub delta: f64,
    pub radii: [f64; 4],
    /// Neighbor threshold in effect after any clamping.
    pub t_nbd: usize,
    /// Number of samples required to meet the threshold.
    pub required: usize,
}

impl RadiusSchedule {
    pub fn from_epsilon(epsilon: f64, t_nbd: usize, required: usize) -> Self {
        let delta = (epsilon - RADIUS_OFFSET) / 4.0;
        let mut radii = [0.0; 4];
        for (r, slot) in radii.iter_mut().enumerate() {
            *slot = epsilon - r as f64 * delta;
        }
        RadiusSchedule {
            epsilon,
            delta,
            radii,
            t_nbd,
            required,
        }
    }
}

/// `ceil(fraction * n)`, immune to representation error in the product,
/// clamped to `[1, n]`.
pub fn required_count(n: usize, fraction: f64) -> usize {
    let exact = fraction * n as f64;
    let r = exact.round();
    let c = if (exact - r).abs() < 1e-9 { r } else { exact.ceil() };
    (c as usize).clamp(1, n)
}

/// Per-sample sorted distances to the `t` nearest others, plus the global
/// pairwise distance extremes, from one exhaustive pass.
struct NearestTable {
    nearest: Vec<Vec<f64>>,
    d_min: f64,
    d_max: f64,
}

impl NearestTable {
    fn build<S: PairwiseSpace>(space: &S, t: usize) -> Self {
        let n = space.len();
        let keep = t.min(n - 1);
        let per_row = par::map_indices(n, |i| {
            let mut d: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| space.distance(i, j)).collect();
            let (lo, hi) = d
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            if keep < d.len() {
                d.select_nth_unstable_by(keep, f64::total_cmp);
                d.truncate(keep);
            }
            d.sort_unstable_by(f64::total_cmp);
            (d, lo, hi)
        });
        let mut nearest = Vec::with_capacity(n);
        let (mut d_min, mut d_max) = (f64::INFINITY, 0.0f64);
        for (d, lo, hi) in per_row {
            d_min = d_min.min(lo);
            d_max = d_max.max(hi);
            nearest.push(d);
        }
        NearestTable {
            nearest,
            d_min,
            d_max,
        }
    }

    /// Distance to each sample's `t`-th nearest other sample (infinite when
    /// there are fewer than `t` others).
    fn kth(&self, t: usize) -> Vec<f64> {
        self.nearest
            .iter()
            .map(|d| d.get(t - 1).copied().unwrap_or(f64::INFINITY))
            .collect()
    }
}

/// Samples with at least `t` others strictly inside `eps`, given each
/// sample's `t`-th neighbor distance.
fn satisfied(kth: &[f64], eps: f64) -> usize {
    kth.iter().filter(|&&d| d < eps).count()
}

/// Number of samples having at least `t_nbd` others strictly within `eps`.
/// Direct O(n²) count, independent of the bisection bookkeeping.
pub fn satisfied_count<S: PairwiseSpace>(space: &S, t_nbd: usize, eps: f64) -> usize {
    par::map_indices(space.len(), |i| space.count_within(i, eps) >= t_nbd)
        .into_iter()
        .filter(|&ok| ok)
        .count()
}

/// Smallest radius (to relative tolerance 1e-6) at which at least
/// `ceil(target_fraction * n)` samples have `t_nbd` others strictly inside.
pub fn search_radius<S: PairwiseSpace>(
    space: &S,
    t_nbd: usize,
    target_fraction: f64,
) -> Result<RadiusSchedule> {
    let n = space.len();
    if n < 2 {
        return Err(MsdeError::Density(format!(
            "need at least 2 points for a radius search, got {n}"
        )));
    }
    if t_nbd == 0 {
        return Err(MsdeError::Density("t_nbd must be at least 1".into()));
    }
    if !(target_fraction > 0.0 && target_fraction < 1.0) {
        return Err(MsdeError::Density(format!(
            "target fraction must be in (0, 1), got {target_fraction}"
        )));
    }
    let required = required_count(n, target_fraction);
    let table = NearestTable::build(space, t_nbd);
    let lo = if table.d_min > 0.0 { table.d_min } else { ZERO_BRACKET };
    let mut hi = table.d_max;

    let mut t = t_nbd;
    let mut kth = table.kth(t);
    if satisfied(&kth, hi) < required {
        let clamped = t_nbd.min(((n - 1) / 2).max(1));
        log::warn!(
            "t_nbd = {t_nbd} is unreachable on {n} samples; clamping to {clamped}"
        );
        t = clamped;
        kth = table.kth(t);
        if satisfied(&kth, hi) < required {
            // Strict inequality: nothing lies strictly inside d_max when all
            // pairs are equidistant. Widen the bracket past it.
            hi = 2.0 * hi.max(lo);
            log::warn!("no radius up to d_max qualifies; widening the upper bracket to {hi}");
        }
    }

    if satisfied(&kth, lo) >= required {
        return Ok(RadiusSchedule::from_epsilon(lo, t, required));
    }
    let mut lo = lo;
    for _ in 0..RADIUS_STEPS {
        if hi - lo <= RADIUS_RTOL * hi {
            break;
        }
        let mid = lo + (hi - lo) / 2.0;
        if satisfied(&kth, mid) >= required {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(RadiusSchedule::from_epsilon(hi, t, required))
}

/// Per-sample density weights and how they were obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityWeights {
    pub weights: Vec<f64>,
    /// Strict-radius neighbor counts at each of the four radii.
    pub counts: Vec<[usize; 4]>,
    pub schedule: RadiusSchedule,
    /// Share of samples with at least `t_nbd` others inside the outer radius.
    pub satisfied_fraction: f64,
}

impl DensityWeights {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Counts at four radii, averaged.
pub fn multiscale_weights<S: PairwiseSpace>(space: &S, schedule: &RadiusSchedule) -> DensityWeights {
    let n = space.len();
    let radii = schedule.radii;
    let counts: Vec<[usize; 4]> = par::map_indices(n, |i| {
        let mut c = [0usize; 4];
        for j in 0..n {
            if j == i {
                continue;
            }
            let d = space.distance(i, j);
            for (slot, &r) in c.iter_mut().zip(&radii) {
                if d < r {
                    *slot += 1;
                }
            }
        }
        c
    });
    let weights = counts
        .iter()
        .map(|c| c.iter().sum::<usize>() as f64 / 4.0)
        .collect();
    let satisfied = counts.iter().filter(|c| c[0] >= schedule.t_nbd).count();
    DensityWeights {
        weights,
        counts,
        schedule: *schedule,
        satisfied_fraction: satisfied as f64 / n as f64,
    }
}

/// Fuzzy graph, radius search in graph space, multi-scale counting.
pub fn compute_empirical_weights(
    points: Points<'_>,
    t_nbd: usize,
    k_umap: usize,
) -> Result<DensityWeights> {
    let graph = build_fuzzy_graph(points, k_umap)?;
    let space = graph.space();
    let schedule = search_radius(&space, t_nbd, TARGET_FRACTION)?;
    let w = multiscale_weights(&space, &schedule);
    log::debug!(
        "density weights: eps = {:.6e}, t_nbd = {}, satisfied = {:.3}",
        schedule.epsilon,
        schedule.t_nbd,
        w.satisfied_fraction
    );
    Ok(w)
}
