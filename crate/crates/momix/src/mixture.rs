//! Mixture estimation: k-means in moment space, cluster-representative
//! selection, and per-cluster step-graphon estimation with degree-proxy
//! latent positions.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::graphon::{LatentPositions, StepGraphon};
use crate::motifs::{moment_vectors, motif_family, MomentVector};
use crate::rng::{derive_seed, seeded};
use crate::scalar::{fmt_sig17, Real};
use rand::Rng;

/// Lloyd's algorithm output.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult<T> {
    pub centroids: Vec<Vec<T>>,
    pub assignment: Vec<usize>,
    pub inertia: T,
    pub iterations: usize,
}

fn squared_distance<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>()
}

fn nearest<T: Real>(point: &[T], centroids: &[Vec<T>]) -> usize {
    let mut best = 0;
    let mut best_d = squared_distance(point, &centroids[0]);
    for (c, centroid) in centroids.iter().enumerate().skip(1) {
        let d = squared_distance(point, centroid);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

/// Lloyd iterations from k-means++ seeding; converges when assignments are
/// stable or `max_iters` is reached. Empty clusters are reseeded to the point
/// farthest from its current centroid. Deterministic under `seed`.
pub fn kmeans<T: Real>(
    points: &[Vec<T>],
    k: usize,
    max_iters: usize,
    seed: u64,
) -> Result<KMeansResult<T>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k-means needs K >= 1".into()));
    }
    if k > points.len() {
        return Err(Error::TooManyClusters {
            k,
            points: points.len(),
        });
    }
    let mut rng = seeded(seed);
    let mut centroids = plus_plus_seeding(points, k, &mut rng);
    let mut assignment = vec![usize::MAX; points.len()];
    let mut iterations = 0;
    while iterations < max_iters {
        iterations += 1;
        let next: Vec<usize> = points.iter().map(|p| nearest(p, &centroids)).collect();
        let mut changed = next != assignment;
        assignment = next;

        // reseed empty clusters to the farthest point (by current assignment)
        let mut sizes = vec![0usize; k];
        for &a in &assignment {
            sizes[a] += 1;
        }
        for empty in 0..k {
            if sizes[empty] > 0 {
                continue;
            }
            let mut far = None;
            let mut far_d = T::neg_infinity();
            for (i, p) in points.iter().enumerate() {
                if sizes[assignment[i]] <= 1 {
                    continue;
                }
                let d = squared_distance(p, &centroids[assignment[i]]);
                if d > far_d {
                    far_d = d;
                    far = Some(i);
                }
            }
            if let Some(i) = far {
                centroids[empty] = points[i].clone();
                sizes[assignment[i]] -= 1;
                assignment[i] = empty;
                sizes[empty] = 1;
                changed = true;
            }
        }

        // update step: means of assigned points
        let dim = points[0].len();
        let mut sums = vec![vec![T::zero(); dim]; k];
        for (p, &a) in points.iter().zip(&assignment) {
            for (s, &v) in sums[a].iter_mut().zip(p) {
                *s = *s + v;
            }
        }
        for c in 0..k {
            if sizes[c] > 0 {
                let inv = T::from_usize(sizes[c]).unwrap().recip();
                centroids[c] = sums[c].iter().map(|&s| s * inv).collect();
            }
        }
        if !changed {
            break;
        }
    }
    // final pass keeps the nearest-centroid invariant when max_iters cut in
    let assignment: Vec<usize> = points.iter().map(|p| nearest(p, &centroids)).collect();
    let inertia = points
        .iter()
        .zip(&assignment)
        .map(|(p, &a)| squared_distance(p, &centroids[a]))
        .sum();
    Ok(KMeansResult {
        centroids,
        assignment,
        inertia,
        iterations,
    })
}

fn plus_plus_seeding<T: Real>(
    points: &[Vec<T>],
    k: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Vec<Vec<T>> {
    let mut centroids: Vec<Vec<T>> = Vec::with_capacity(k);
    let first = rng.gen_range(0..points.len());
    centroids.push(points[first].clone());
    let mut dist: Vec<T> = points
        .iter()
        .map(|p| squared_distance(p, &centroids[0]))
        .collect();
    while centroids.len() < k {
        let total: T = dist.iter().copied().sum();
        let chosen = if total <= T::zero() {
            rng.gen_range(0..points.len())
        } else {
            let target = T::from_f64(rng.gen::<f64>()).unwrap() * total;
            let mut acc = T::zero();
            let mut idx = points.len() - 1;
            for (i, &d) in dist.iter().enumerate() {
                acc = acc + d;
                if acc > target {
                    idx = i;
                    break;
                }
            }
            idx
        };
        centroids.push(points[chosen].clone());
        for (d, p) in dist.iter_mut().zip(points) {
            let nd = squared_distance(p, centroids.last().unwrap());
            if nd < *d {
                *d = nd;
            }
        }
    }
    centroids
}

/// Repeats [`kmeans`] with derived seeds and keeps the lowest-inertia run.
pub fn kmeans_best_of<T: Real>(
    points: &[Vec<T>],
    k: usize,
    max_iters: usize,
    restarts: usize,
    seed: u64,
) -> Result<KMeansResult<T>> {
    let mut best: Option<KMeansResult<T>> = None;
    for r in 0..restarts.max(1) {
        let run = kmeans(points, k, max_iters, derive_seed(seed, r as u64))?;
        let better = match &best {
            None => true,
            Some(b) => run.inertia < b.inertia,
        };
        if better {
            best = Some(run);
        }
    }
    Ok(best.unwrap())
}

/// Default cluster count for a dataset of `t` graphs: max(1, ceil(ln t)).
pub fn default_cluster_count(t: usize) -> usize {
    debug_assert!(t >= 1);
    ((t as f64).ln().ceil() as usize).max(1)
}

/// Latent positions from the degree ranking: nodes sorted by descending
/// degree (ties by node id), the node at sorted rank p gets (p + 0.5) / n.
pub fn degree_latents<T: Real>(g: &Graph) -> LatentPositions<T> {
    let order = degree_order(g);
    let n = g.node_count();
    let mut values = vec![T::zero(); n];
    for (rank, &node) in order.iter().enumerate() {
        values[node] =
            (T::from_usize(rank).unwrap() + T::from_f64(0.5).unwrap()) / T::from_usize(n).unwrap();
    }
    LatentPositions::new(values).expect("ranks map into [0,1]")
}

fn degree_order(g: &Graph) -> Vec<usize> {
    let degrees = g.degree_sequence();
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(degrees[v]), v));
    order
}

/// Degree-sorts each graph, average-pools its adjacency onto an r x r grid
/// (diagonal entries excluded), and averages the per-graph histograms into
/// one symmetric step graphon. Also returns each graph's latent positions.
pub fn estimate_step_graphon<T: Real>(
    graphs: &[&Graph],
    resolution: usize,
) -> Result<(StepGraphon<T>, Vec<LatentPositions<T>>)> {
    if graphs.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot estimate a graphon from zero graphs".into(),
        ));
    }
    if resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be >= 1".into()));
    }
    let r = resolution;
    let mut acc = vec![0f64; r * r];
    for g in graphs {
        let hist = pooled_histogram(g, r);
        for (a, h) in acc.iter_mut().zip(&hist) {
            *a += h;
        }
    }
    let count = graphs.len() as f64;
    let mut cells: Vec<f64> = acc.into_iter().map(|a| a / count).collect();
    // symmetrize and clamp
    for i in 0..r {
        for j in (i + 1)..r {
            let m = 0.5 * (cells[i * r + j] + cells[j * r + i]);
            cells[i * r + j] = m;
            cells[j * r + i] = m;
        }
    }
    let cells: Vec<T> = cells
        .into_iter()
        .map(|c| T::from_f64(c.clamp(0.0, 1.0)).unwrap())
        .collect();
    let step = StepGraphon::from_cells(r, cells)?;
    let latents = graphs.iter().map(|g| degree_latents(g)).collect();
    Ok((step, latents))
}

/// Average-pooled histogram of the degree-sorted adjacency; block boundaries
/// at floor(a * n / r), diagonal entries excluded from the averages.
fn pooled_histogram(g: &Graph, r: usize) -> Vec<f64> {
    let n = g.node_count();
    let order = degree_order(g);
    let mut rank = vec![0usize; n];
    for (p, &node) in order.iter().enumerate() {
        rank[node] = p;
    }
    let mut block = vec![0usize; n];
    for a in 0..r {
        let lo = a * n / r;
        let hi = (a + 1) * n / r;
        block[lo..hi].fill(a);
    }
    let mut sums = vec![0u64; r * r];
    for &(u, v) in g.edges() {
        let (a, b) = (block[rank[u as usize]], block[rank[v as usize]]);
        sums[a * r + b] += 1;
        sums[b * r + a] += 1;
    }
    let sizes: Vec<usize> = (0..r).map(|a| (a + 1) * n / r - a * n / r).collect();
    let mut hist = vec![0f64; r * r];
    for a in 0..r {
        for b in 0..r {
            let entries = if a == b {
                sizes[a] * sizes[a] - sizes[a]
            } else {
                sizes[a] * sizes[b]
            };
            if entries > 0 {
                hist[a * r + b] = sums[a * r + b] as f64 / entries as f64;
            }
        }
    }
    hist
}

/// Output of the mixture-estimation pipeline: K step graphons, a cluster id
/// per graph, per-graph latent positions, and the k-means centroids.
#[derive(Debug, Clone)]
pub struct MixtureModel<T> {
    pub graphons: Vec<StepGraphon<T>>,
    pub assignment: Vec<usize>,
    pub latents: Vec<LatentPositions<T>>,
    pub centroids: Vec<Vec<T>>,
}

/// Tunables for [`estimate_mixture`].
#[derive(Debug, Clone, Copy)]
pub struct MixtureConfig {
    /// Number of clusters; defaults to max(1, ceil(ln T)).
    pub cluster_count: Option<usize>,
    /// Per-cluster refinement size L: how many centroid-nearest graphs feed
    /// the graphon estimate.
    pub refine_size: usize,
    /// Step-graphon resolution r.
    pub resolution: usize,
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl MixtureConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            cluster_count: None,
            refine_size: 10,
            resolution: 30,
            max_iters: 300,
            restarts: 10,
            seed,
        }
    }
}

/// The full pipeline: 9-motif moment vectors, k-means, per-cluster selection
/// of the L graphs nearest the centroid, step-graphon estimation from each
/// subset, and degree-proxy latents for every graph.
///
/// Points enter k-means in a canonical (lexicographic moment vector) order,
/// so shuffling the dataset permutes the assignment identically.
pub fn estimate_mixture<T: Real>(
    graphs: &[Graph],
    config: MixtureConfig,
) -> Result<MixtureModel<T>> {
    if graphs.is_empty() {
        return Err(Error::InvalidArgument("empty dataset".into()));
    }
    if config.refine_size == 0 {
        return Err(Error::InvalidArgument("refine_size must be >= 1".into()));
    }
    let family = motif_family(4)?;
    let moments: Vec<MomentVector<T>> = moment_vectors(graphs, &family);
    let k = config
        .cluster_count
        .unwrap_or_else(|| default_cluster_count(graphs.len()));

    // canonical point order: lexicographic by moment vector
    let mut canonical: Vec<usize> = (0..graphs.len()).collect();
    canonical.sort_by(|&a, &b| {
        moments[a]
            .values()
            .partial_cmp(moments[b].values())
            .expect("densities are never NaN")
    });
    let points: Vec<Vec<T>> = canonical
        .iter()
        .map(|&i| moments[i].values().to_vec())
        .collect();
    let km = kmeans_best_of(&points, k, config.max_iters, config.restarts, config.seed)?;

    let mut assignment = vec![0usize; graphs.len()];
    for (pos, &orig) in canonical.iter().enumerate() {
        assignment[orig] = km.assignment[pos];
    }

    let mut graphons = Vec::with_capacity(k);
    for c in 0..k {
        let mut members: Vec<usize> = (0..graphs.len()).filter(|&i| assignment[i] == c).collect();
        if members.is_empty() {
            // unreachable with distinct points; fall back to the globally
            // nearest graph so every cluster id stays addressable
            members = vec![nearest_graph_to(&km.centroids[c], &moments)];
        }
        members.sort_by(|&a, &b| {
            let da = squared_distance(moments[a].values(), &km.centroids[c]);
            let db = squared_distance(moments[b].values(), &km.centroids[c]);
            da.partial_cmp(&db).unwrap().then_with(|| {
                moments[a]
                    .values()
                    .partial_cmp(moments[b].values())
                    .unwrap()
            })
        });
        members.truncate(config.refine_size.min(members.len()));
        let subset: Vec<&Graph> = members.iter().map(|&i| &graphs[i]).collect();
        let (step, _) = estimate_step_graphon::<T>(&subset, config.resolution)?;
        graphons.push(step);
    }

    let latents = graphs.iter().map(|g| degree_latents(g)).collect();
    Ok(MixtureModel {
        graphons,
        assignment,
        latents,
        centroids: km.centroids,
    })
}

fn nearest_graph_to<T: Real>(centroid: &[T], moments: &[MomentVector<T>]) -> usize {
    let mut best = 0;
    let mut best_d = squared_distance(moments[0].values(), centroid);
    for (i, m) in moments.iter().enumerate().skip(1) {
        let d = squared_distance(m.values(), centroid);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Assigns each vector to the nearest ground-truth vector (Euclidean,
/// ties to the lowest index).
pub fn theory_assign<T: Real>(
    vectors: &[MomentVector<T>],
    truth: &[MomentVector<T>],
) -> Result<Vec<usize>> {
    if vectors.is_empty() || truth.is_empty() {
        return Err(Error::InvalidArgument("empty vector list".into()));
    }
    let dim = truth[0].len();
    for v in vectors.iter().chain(truth) {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: v.len(),
            });
        }
    }
    Ok(vectors
        .iter()
        .map(|v| {
            let mut best = 0;
            let mut best_d = squared_distance(v.values(), truth[0].values());
            for (i, t) in truth.iter().enumerate().skip(1) {
                let d = squared_distance(v.values(), t.values());
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            best
        })
        .collect())
}

impl<T: Real> MixtureModel<T> {
    pub fn cluster_count(&self) -> usize {
        self.graphons.len()
    }

    /// Serializes to a directory: one step-graphon text file per cluster, an
    /// assignment CSV (graph_index, cluster, semicolon-joined latents), and a
    /// centroid CSV.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        let io_err = |path: &Path, source: std::io::Error| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        for (k, g) in self.graphons.iter().enumerate() {
            let path = dir.join(format!("graphon_{k}.txt"));
            fs::write(&path, g.to_text()).map_err(|e| io_err(&path, e))?;
        }
        let mut assignment = String::from("graph_index,cluster,latents\n");
        for (i, (&c, lat)) in self.assignment.iter().zip(&self.latents).enumerate() {
            let etas: Vec<String> = lat.values().iter().map(|&v| fmt_sig17(v)).collect();
            assignment.push_str(&format!("{i},{c},{}\n", etas.join(";")));
        }
        let path = dir.join("assignment.csv");
        fs::write(&path, assignment).map_err(|e| io_err(&path, e))?;

        let mut centroids = String::from("cluster,coordinates\n");
        for (k, c) in self.centroids.iter().enumerate() {
            let coords: Vec<String> = c.iter().map(|&v| fmt_sig17(v)).collect();
            centroids.push_str(&format!("{k},{}\n", coords.join(";")));
        }
        let path = dir.join("centroids.csv");
        fs::write(&path, centroids).map_err(|e| io_err(&path, e))?;
        Ok(())
    }
}
