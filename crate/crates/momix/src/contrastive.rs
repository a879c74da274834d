//! Model-aware InfoNCE over supplied embedding vectors, its Jensen lower
//! bound, and the true-negative / false-negative ratio metric.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::{fmt_sig17, Real};

/// A batch of anchor/positive embedding pairs with cluster ids, optional
/// class labels, and a softmax temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingBatch<T> {
    anchors: Vec<Vec<T>>,
    positives: Vec<Vec<T>>,
    clusters: Vec<usize>,
    classes: Option<Vec<usize>>,
    tau: T,
}

impl<T: Real> EmbeddingBatch<T> {
    pub fn new(
        anchors: Vec<Vec<T>>,
        positives: Vec<Vec<T>>,
        clusters: Vec<usize>,
        classes: Option<Vec<usize>>,
        tau: T,
    ) -> Result<Self> {
        let len = anchors.len();
        if len == 0 {
            return Err(Error::InvalidBatch("empty batch".into()));
        }
        if positives.len() != len || clusters.len() != len {
            return Err(Error::InvalidBatch(format!(
                "length mismatch: {} anchors, {} positives, {} clusters",
                len,
                positives.len(),
                clusters.len()
            )));
        }
        if let Some(cs) = &classes {
            if cs.len() != len {
                return Err(Error::InvalidBatch(format!(
                    "length mismatch: {} anchors, {} classes",
                    len,
                    cs.len()
                )));
            }
        }
        let dim = anchors[0].len();
        for v in anchors.iter().chain(&positives) {
            if v.len() != dim {
                return Err(Error::InvalidBatch("ragged embedding vectors".into()));
            }
            if v.iter().all(|&x| x == T::zero()) {
                return Err(Error::InvalidBatch(
                    "zero embedding vector: cosine similarity undefined".into(),
                ));
            }
        }
        if tau <= T::zero() {
            return Err(Error::InvalidBatch(format!(
                "temperature must be positive, got {tau}"
            )));
        }
        Ok(Self {
            anchors,
            positives,
            clusters,
            classes,
            tau,
        })
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.anchors[0].len()
    }

    pub fn clusters(&self) -> &[usize] {
        &self.clusters
    }

    pub fn classes(&self) -> Option<&[usize]> {
        self.classes.as_deref()
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    fn negatives_of(&self, t: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.clusters[i] != self.clusters[t])
            .collect()
    }
}

pub fn cosine_similarity<T: Real>(a: &[T], b: &[T]) -> T {
    let dot = a.iter().zip(b).map(|(&x, &y)| x * y).sum::<T>();
    let na = a.iter().map(|&x| x * x).sum::<T>().sqrt();
    let nb = b.iter().map(|&x| x * x).sum::<T>().sqrt();
    dot / (na * nb)
}

fn log_sum_exp<T: Real>(xs: &[T]) -> T {
    let max = xs.iter().copied().fold(T::neg_infinity(), T::max);
    let sum = xs.iter().map(|&x| (x - max).exp()).sum::<T>();
    max + sum.ln()
}

/// Per-anchor losses; `None` marks anchors skipped because every other batch
/// member shares their cluster. `mean` averages the rest and is `None` for a
/// degenerate batch where everything was skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoNceResult<T> {
    pub losses: Vec<Option<T>>,
    pub mean: Option<T>,
    pub skipped: usize,
}

/// InfoNCE with negatives restricted to other clusters:
/// `l_t = -log( exp(sim(z_t, p_t)/tau) / sum_{C_t' != C_t} exp(sim(z_t, p_t')/tau) )`
/// with cosine similarity.
pub fn model_aware_infonce<T: Real>(batch: &EmbeddingBatch<T>) -> InfoNceResult<T> {
    let mut losses = Vec::with_capacity(batch.len());
    let mut sum = T::zero();
    let mut kept = 0usize;
    for t in 0..batch.len() {
        let negatives = batch.negatives_of(t);
        if negatives.is_empty() {
            losses.push(None);
            continue;
        }
        let pos = cosine_similarity(&batch.anchors[t], &batch.positives[t]) / batch.tau;
        let scores: Vec<T> = negatives
            .iter()
            .map(|&k| cosine_similarity(&batch.anchors[t], &batch.positives[k]) / batch.tau)
            .collect();
        let loss = log_sum_exp(&scores) - pos;
        losses.push(Some(loss));
        sum = sum + loss;
        kept += 1;
    }
    let mean = (kept > 0).then(|| sum / T::from_usize(kept).unwrap());
    InfoNceResult {
        skipped: batch.len() - kept,
        losses,
        mean,
    }
}

/// Lower bounds of the per-anchor loss; `None` marks skipped anchors.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoNceLowerBounds<T> {
    /// Jensen form: `ln m_t + mean_k theta(z_t, p_k) - theta(z_t, p_t)`.
    /// Always `<= l_t`, with equality when every negative score is equal.
    pub jensen: Vec<Option<T>>,
    /// Weaker centroid form, scored against the mean negative vector;
    /// reported for inspection only.
    pub centroid: Vec<Option<T>>,
}

pub fn infonce_lower_bound<T: Real>(batch: &EmbeddingBatch<T>) -> InfoNceLowerBounds<T> {
    let mut jensen = Vec::with_capacity(batch.len());
    let mut centroid = Vec::with_capacity(batch.len());
    for t in 0..batch.len() {
        let negatives = batch.negatives_of(t);
        if negatives.is_empty() {
            jensen.push(None);
            centroid.push(None);
            continue;
        }
        let m = T::from_usize(negatives.len()).unwrap();
        let pos = cosine_similarity(&batch.anchors[t], &batch.positives[t]) / batch.tau;
        let mean_score = negatives
            .iter()
            .map(|&k| cosine_similarity(&batch.anchors[t], &batch.positives[k]) / batch.tau)
            .sum::<T>()
            / m;
        jensen.push(Some(m.ln() + mean_score - pos));

        let dim = batch.dim();
        let mut mean_vec = vec![T::zero(); dim];
        for &k in &negatives {
            for (acc, &x) in mean_vec.iter_mut().zip(&batch.positives[k]) {
                *acc = *acc + x;
            }
        }
        for acc in mean_vec.iter_mut() {
            *acc = *acc / m;
        }
        let centroid_score = cosine_similarity(&batch.anchors[t], &mean_vec) / batch.tau;
        centroid.push(Some(m.ln() + centroid_score - pos));
    }
    InfoNceLowerBounds { jensen, centroid }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfrMode {
    /// Negatives are all other batch members.
    Baseline,
    /// Negatives are only batch members from other clusters.
    ModelAware,
}

/// One batch of per-graph class labels and cluster ids.
#[derive(Debug, Clone)]
pub struct TfrBatch {
    pub classes: Vec<usize>,
    pub clusters: Vec<usize>,
}

/// True-negative / false-negative ratio: per anchor, the number of negatives
/// with a different class over max(1, number with the same class), averaged
/// over anchors and then over batches.
pub fn tfr<T: Real>(batches: &[TfrBatch], mode: TfrMode) -> Result<T> {
    if batches.is_empty() {
        return Err(Error::InvalidBatch("no batches".into()));
    }
    let mut batch_sum = T::zero();
    for (bi, batch) in batches.iter().enumerate() {
        let len = batch.classes.len();
        if len == 0 {
            return Err(Error::InvalidBatch(format!("batch {bi} is empty")));
        }
        if batch.clusters.len() != len {
            return Err(Error::InvalidBatch(format!(
                "batch {bi}: {} classes vs {} clusters",
                len,
                batch.clusters.len()
            )));
        }
        let mut anchor_sum = T::zero();
        for i in 0..len {
            let mut tn = 0usize;
            let mut fneg = 0usize;
            for j in 0..len {
                if j == i {
                    continue;
                }
                if mode == TfrMode::ModelAware && batch.clusters[j] == batch.clusters[i] {
                    continue;
                }
                if batch.classes[j] == batch.classes[i] {
                    fneg += 1;
                } else {
                    tn += 1;
                }
            }
            anchor_sum =
                anchor_sum + T::from_usize(tn).unwrap() / T::from_usize(fneg.max(1)).unwrap();
        }
        batch_sum = batch_sum + anchor_sum / T::from_usize(len).unwrap();
    }
    Ok(batch_sum / T::from_usize(batches.len()).unwrap())
}

/// Embedding batch CSV: `graph_index,cluster,class,z_0..z_{F-1},zt_0..zt_{F-1}`
/// with empty class cells when labels are absent.
pub fn batch_to_csv<T: Real>(batch: &EmbeddingBatch<T>) -> String {
    let dim = batch.dim();
    let mut header = String::from("graph_index,cluster,class");
    for i in 0..dim {
        let _ = write!(header, ",z_{i}");
    }
    for i in 0..dim {
        let _ = write!(header, ",zt_{i}");
    }
    let mut out = header;
    out.push('\n');
    for t in 0..batch.len() {
        let class = batch
            .classes
            .as_ref()
            .map_or(String::new(), |cs| cs[t].to_string());
        let _ = write!(out, "{t},{},{class}", batch.clusters[t]);
        for v in &batch.anchors[t] {
            let _ = write!(out, ",{}", fmt_sig17(*v));
        }
        for v in &batch.positives[t] {
            let _ = write!(out, ",{}", fmt_sig17(*v));
        }
        out.push('\n');
    }
    out
}

pub fn batch_from_csv<T: Real>(text: &str, tau: T) -> Result<EmbeddingBatch<T>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidBatch("empty batch file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let dim = cols.iter().filter(|c| c.starts_with("z_")).count();
    let expect = 3 + 2 * dim;
    if dim == 0 || cols.len() != expect {
        return Err(Error::InvalidBatch(format!(
            "unrecognized header layout: {header}"
        )));
    }
    let mut anchors = Vec::new();
    let mut positives = Vec::new();
    let mut clusters = Vec::new();
    let mut classes: Vec<Option<usize>> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != expect {
            return Err(Error::InvalidBatch(format!(
                "row {}: {} cells, expected {expect}",
                lineno + 2,
                cells.len()
            )));
        }
        let bad = |what: &str| Error::InvalidBatch(format!("row {}: bad {what}", lineno + 2));
        clusters.push(cells[1].trim().parse().map_err(|_| bad("cluster"))?);
        let class_cell = cells[2].trim();
        classes.push(if class_cell.is_empty() {
            None
        } else {
            Some(class_cell.parse().map_err(|_| bad("class"))?)
        });
        let parse_vec = |range: std::ops::Range<usize>| -> Result<Vec<T>> {
            range
                .map(|i| {
                    cells[i]
                        .trim()
                        .parse::<f64>()
                        .map(|v| T::from_f64(v).unwrap())
                        .map_err(|_| bad("embedding value"))
                })
                .collect()
        };
        anchors.push(parse_vec(3..3 + dim)?);
        positives.push(parse_vec(3 + dim..expect)?);
    }
    let classes = if classes.iter().all(Option::is_some) {
        Some(classes.into_iter().map(Option::unwrap).collect())
    } else if classes.iter().all(Option::is_none) {
        None
    } else {
        return Err(Error::InvalidBatch(
            "class column must be fully present or fully empty".into(),
        ));
    };
    EmbeddingBatch::new(anchors, positives, clusters, classes, tau)
}
