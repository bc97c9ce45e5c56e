//! Exact Euclidean k-nearest-neighbor graphs.
//!
//! [`build_knn_graph`] uses a KD-tree (brute force above
//! [`KDTREE_MAX_DIM`] dimensions) and [`brute_force_knn`] is the exhaustive
//! scan it is tested against. Both order neighbors by `(distance, index)`, so
//! ties go to the lower index and the two agree exactly.

use crate::data_io::{sq_dist, Points};
use crate::error::{MsdeError, Result};
use crate::par;

/// Above this dimension the tree is skipped; pruning stops paying off.
pub const KDTREE_MAX_DIM: usize = 32;
const LEAF_SIZE: usize = 16;

/// Per-sample nearest neighbors, nearest first, without self loops.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborGraph {
    n: usize,
    k: usize,
    neighbors: Vec<usize>,
    distances: Vec<f64>,
}

impl NeighborGraph {
    /// Assemble from explicit rows, checking the graph invariants.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        let mut neighbors = Vec::with_capacity(n * k);
        let mut distances = Vec::with_capacity(n * k);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != k {
                return Err(MsdeError::Graph(format!(
                    "row {i} has {} neighbors, expected {k}",
                    row.len()
                )));
            }
            let mut prev = 0.0;
            for (j, d) in row {
                if j == i {
                    return Err(MsdeError::Graph(format!("self loop at row {i}")));
                }
                if j >= n {
                    return Err(MsdeError::Graph(format!("row {i} points at {j}, n = {n}")));
                }
                if !(d >= prev) || !d.is_finite() {
                    return Err(MsdeError::Graph(format!(
                        "row {i}: distances must be finite and nondecreasing"
                    )));
                }
                prev = d;
                neighbors.push(j);
                distances.push(d);
            }
        }
        Ok(NeighborGraph {
            n,
            k,
            neighbors,
            distances,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i * self.k..(i + 1) * self.k]
    }

    pub fn distances(&self, i: usize) -> &[f64] {
        &self.distances[i * self.k..(i + 1) * self.k]
    }
}

fn effective_k(n: usize, k: usize) -> Result<usize> {
    if n < 2 {
        return Err(MsdeError::Graph(format!(
            "need at least 2 points for a neighbor graph, got {n}"
        )));
    }
    if k == 0 {
        return Err(MsdeError::Graph("k must be at least 1".into()));
    }
    if k > n - 1 {
        log::warn!("k = {k} exceeds n - 1 = {}; clamping", n - 1);
        return Ok(n - 1);
    }
    Ok(k)
}

fn assemble(n: usize, k: usize, rows: Vec<Vec<(f64, usize)>>) -> NeighborGraph {
    let mut neighbors = Vec::with_capacity(n * k);
    let mut distances = Vec::with_capacity(n * k);
    for row in rows {
        for (d2, j) in row {
            neighbors.push(j);
            distances.push(d2.sqrt());
        }
    }
    NeighborGraph {
        n,
        k,
        neighbors,
        distances,
    }
}

#[inline]
fn key_lt(a: (f64, usize), b: (f64, usize)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Exhaustive O(n²d) k-NN.
pub fn brute_force_knn(points: Points<'_>, k: usize) -> Result<NeighborGraph> {
    let n = points.len();
    let k = effective_k(n, k)?;
    let rows = par::map_indices(n, |i| {
        let q = points.row(i);
        let mut all: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (sq_dist(q, points.row(j)), j))
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < all.len() {
            all.select_nth_unstable_by(k, cmp);
            all.truncate(k);
        }
        all.sort_unstable_by(cmp);
        all
    });
    Ok(assemble(n, k, rows))
}

/// Exact k-NN graph over `points`; `k` is clamped to `n - 1` with a warning.
pub fn build_knn_graph(points: Points<'_>, k: usize) -> Result<NeighborGraph> {
    let n = points.len();
    if points.dim() > KDTREE_MAX_DIM || n <= LEAF_SIZE {
        return brute_force_knn(points, k);
    }
    let k = effective_k(n, k)?;
    let tree = KdTree::build(points);
    let rows = par::map_indices(n, |i| tree.query_excluding(i, k));
    Ok(assemble(n, k, rows))
}

#[derive(Debug)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        dim: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Median-split KD-tree over a borrowed point set.
struct KdTree<'a> {
    points: Points<'a>,
    perm: Vec<usize>,
    nodes: Vec<Node>,
}

impl<'a> KdTree<'a> {
    fn build(points: Points<'a>) -> Self {
        let mut tree = KdTree {
            points,
            perm: (0..points.len()).collect(),
            nodes: Vec::new(),
        };
        tree.build_node(0, points.len());
        tree
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return self.nodes.len() - 1;
        }
        let pts = self.points;
        let dim = (0..pts.dim())
            .map(|d| {
                let (lo, hi) = self.perm[start..end]
                    .iter()
                    .map(|&i| pts.row(i)[d])
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                        (lo.min(v), hi.max(v))
                    });
                (hi - lo, d)
            })
            .fold((f64::NEG_INFINITY, 0), |best, cur| if cur.0 > best.0 { cur } else { best })
            .1;
        let mid = start + (end - start) / 2;
        self.perm[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            pts.row(a)[dim].total_cmp(&pts.row(b)[dim]).then(a.cmp(&b))
        });
        let value = pts.row(self.perm[mid])[dim];
        let slot = self.nodes.len();
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[slot] = Node::Split {
            dim,
            value,
            left,
            right,
        };
        slot
    }

    fn query_excluding(&self, qi: usize, k: usize) -> Vec<(f64, usize)> {
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        self.search(0, self.points.row(qi), qi, k, &mut best);
        best
    }

    fn search(&self, node: usize, q: &[f64], skip: usize, k: usize, best: &mut Vec<(f64, usize)>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &j in &self.perm[start..end] {
                    if j == skip {
                        continue;
                    }
                    let cand = (sq_dist(q, self.points.row(j)), j);
                    if best.len() < k || key_lt(cand, best[best.len() - 1]) {
                        let pos = best.partition_point(|&b| key_lt(b, cand));
                        best.insert(pos, cand);
                        best.truncate(k);
                    }
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let diff = q[dim] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, skip, k, best);
                // Left holds coordinates <= value and right holds >= value, so
                // the plane gap lower-bounds every distance on the far side.
                let gap = diff * diff;
                if best.len() < k || gap <= best[best.len() - 1].0 {
                    self.search(far, q, skip, k, best);
                }
            }
        }
    }
}

/// Smallest and largest distance over distinct pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceExtremes {
    pub d_min: f64,
    pub d_max: f64,
}

const TILE: usize = 64;

/// Exhaustive pairwise min/max, scanned in row tiles.
pub fn distance_extremes(points: Points<'_>) -> Result<DistanceExtremes> {
    let n = points.len();
    if n < 2 {
        return Err(MsdeError::Graph(format!(
            "need at least 2 points for distance extremes, got {n}"
        )));
    }
    let tiles = n.div_ceil(TILE);
    let per_tile = par::map_indices(tiles, |ti| {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        let a_end = ((ti + 1) * TILE).min(n);
        for tj in ti..tiles {
            let b_end = ((tj + 1) * TILE).min(n);
            for a in ti * TILE..a_end {
                let ra = points.row(a);
                let b_start = if tj == ti { a + 1 } else { tj * TILE };
                for b in b_start..b_end {
                    let d = sq_dist(ra, points.row(b));
                    lo = lo.min(d);
                    hi = hi.max(d);
                }
            }
        }
        (lo, hi)
    });
    let (lo, hi) = per_tile
        .into_iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)));
    Ok(DistanceExtremes {
        d_min: lo.sqrt(),
        d_max: hi.sqrt(),
    })
}

/// Number of other points strictly closer than `radius` to `center`.
pub fn count_within_radius(points: Points<'_>, center: usize, radius: f64) -> Result<usize> {
    if center >= points.len() {
        return Err(MsdeError::Graph(format!(
            "center {center} out of range for {} points",
            points.len()
        )));
    }
    if !(radius >= 0.0) {
        return Err(MsdeError::Graph(format!("radius must be nonnegative, got {radius}")));
    }
    let c = points.row(center);
    Ok((0..points.len())
        .filter(|&j| j != center && sq_dist(c, points.row(j)).sqrt() < radius)
        .count())
}
