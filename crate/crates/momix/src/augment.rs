//! Mixture-aware mixup generation and graphon-informed edge resampling.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, LabeledDataset};
use crate::graphon::{mix, sample_graph_with_rng, Graphon, LatentPositions, StepGraphon};
use crate::mixture::{estimate_mixture, MixtureConfig, MixtureModel};
use crate::rng::{derive_seed, seeded};
use crate::scalar::{fmt_sig17, Real};

/// A generated graph with its interpolated soft label.
#[derive(Debug, Clone)]
pub struct MixedSample<T> {
    pub graph: Graph,
    /// Length-C label weights summing to 1; nonzero only at the two source
    /// classes (one when lambda is 0 or 1).
    pub soft_label: Vec<T>,
    /// Ordered 1-based source classes (i, j); lambda weights class i.
    pub source_classes: (usize, usize),
    pub lambda: T,
}

#[derive(Debug, Clone, Copy)]
pub struct MixupConfig {
    /// Augmentation ratio r in (0, 1]; the output has ceil(r * T) samples.
    pub ratio: f64,
    /// Node count of generated graphs; defaults to the rounded mean node
    /// count of the dataset.
    pub target_n: Option<usize>,
    /// Uniform sampling range for the mixing coefficient.
    pub lambda_range: (f64, f64),
    /// Per-class mixture-estimation refinement size L.
    pub refine_size: usize,
    /// Per-class step-graphon resolution.
    pub resolution: usize,
    pub seed: u64,
}

impl MixupConfig {
    pub fn new(ratio: f64, seed: u64) -> Self {
        Self {
            ratio,
            target_n: None,
            lambda_range: (0.0, 0.2),
            refine_size: 10,
            resolution: 30,
            seed,
        }
    }
}

/// Runs the mixture estimator per class, then generates `ceil(r * T)` graphs:
/// each sample draws an ordered pair of distinct classes, one graph from
/// each, mixes the graphons of their assigned clusters with
/// `lambda ~ Uniform(lambda_range)`, and samples a `target_n`-node graph from
/// the mixed graphon.
///
/// Per-sample draw order: class i, class j, graph a, graph b, lambda, then
/// the standard graph-sampling draws.
pub fn mixture_mixup<T: Real>(
    dataset: &LabeledDataset,
    config: &MixupConfig,
) -> Result<Vec<MixedSample<T>>> {
    let labels = dataset
        .labels
        .as_ref()
        .ok_or_else(|| Error::InvalidDataset("mixup needs class labels".into()))?;
    let class_count = dataset.class_count;
    if class_count < 2 {
        return Err(Error::InvalidDataset(format!(
            "mixup needs at least 2 classes, got {class_count}"
        )));
    }
    if !(config.ratio > 0.0 && config.ratio <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "augmentation ratio must lie in (0, 1], got {}",
            config.ratio
        )));
    }
    let (lo, hi) = config.lambda_range;
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
        return Err(Error::InvalidArgument(format!(
            "lambda range [{lo}, {hi}] must be an interval within [0, 1]"
        )));
    }

    let members: Vec<Vec<usize>> = (1..=class_count)
        .map(|c| dataset.class_members(c))
        .collect();
    if let Some(empty) = members.iter().position(|m| m.is_empty()) {
        return Err(Error::InvalidDataset(format!(
            "class {} has no graphs",
            empty + 1
        )));
    }
    debug_assert_eq!(labels.len(), dataset.graphs.len());

    // per-class mixture models
    let phi_base = derive_seed(config.seed, 1);
    let mut models: Vec<MixtureModel<T>> = Vec::with_capacity(class_count);
    for (c, member) in members.iter().enumerate() {
        let graphs: Vec<Graph> = member.iter().map(|&i| dataset.graphs[i].clone()).collect();
        let phi_config = MixtureConfig {
            refine_size: config.refine_size,
            resolution: config.resolution,
            ..MixtureConfig::new(derive_seed(phi_base, c as u64))
        };
        models.push(estimate_mixture(&graphs, phi_config)?);
    }

    let target_n = config.target_n.unwrap_or_else(|| {
        let total: usize = dataset.graphs.iter().map(Graph::node_count).sum();
        ((total as f64 / dataset.len() as f64).round() as usize).max(1)
    });
    let t = dataset.len();
    let sample_count = (config.ratio * t as f64).ceil() as usize;
    let sample_base = derive_seed(config.seed, 2);

    let mut out = Vec::with_capacity(sample_count);
    for m in 0..sample_count {
        let mut rng = seeded(derive_seed(sample_base, m as u64));
        let i = rng.gen_range(0..class_count);
        let mut j = rng.gen_range(0..class_count - 1);
        if j >= i {
            j += 1;
        }
        let a = members[i][rng.gen_range(0..members[i].len())];
        let b = members[j][rng.gen_range(0..members[j].len())];
        let lambda = lo + rng.gen::<f64>() * (hi - lo);

        let wa = models[i].graphons[models[i].assignment[member_rank(&members[i], a)]].clone();
        let wb = models[j].graphons[models[j].assignment[member_rank(&members[j], b)]].clone();
        let mixed = mix(
            Graphon::Step(wa),
            Graphon::Step(wb),
            T::from_f64(lambda).unwrap(),
        )?;
        let (graph, _) = sample_graph_with_rng(&mixed, target_n, &mut rng);

        let mut soft_label = vec![T::zero(); class_count];
        soft_label[i] = T::from_f64(lambda).unwrap();
        soft_label[j] = soft_label[j] + (T::one() - T::from_f64(lambda).unwrap());
        out.push(MixedSample {
            graph,
            soft_label,
            source_classes: (i + 1, j + 1),
            lambda: T::from_f64(lambda).unwrap(),
        });
    }
    Ok(out)
}

fn member_rank(members: &[usize], dataset_index: usize) -> usize {
    members
        .binary_search(&dataset_index)
        .expect("index drawn from the member list")
}

/// Selects `count` unordered pairs uniformly without replacement via a
/// partial Fisher-Yates shuffle of the lexicographically ordered pair list.
pub fn select_pairs(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<(u32, u32)> {
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            pairs.push((u, v));
        }
    }
    let total = pairs.len();
    let count = count.min(total);
    for i in 0..count {
        let j = rng.gen_range(i..total);
        pairs.swap(i, j);
    }
    pairs.truncate(count);
    pairs
}

/// Resamples exactly `round(r% * n(n-1)/2)` uniformly chosen pairs from
/// Bernoulli(w(eta_i, eta_j)); every unselected pair keeps its original
/// state. Bernoulli draws happen in selection order.
pub fn graphon_augment<T: Real>(
    g: &Graph,
    w: &StepGraphon<T>,
    latents: &LatentPositions<T>,
    r_percent: f64,
    seed: u64,
) -> Result<Graph> {
    if latents.len() != g.node_count() {
        return Err(Error::InvalidArgument(format!(
            "{} latents for {} nodes",
            latents.len(),
            g.node_count()
        )));
    }
    if !(0.0..=100.0).contains(&r_percent) {
        return Err(Error::InvalidArgument(format!(
            "resampling percentage {r_percent} outside [0, 100]"
        )));
    }
    let n = g.node_count();
    let total_pairs = n * (n - 1) / 2;
    let count = (r_percent / 100.0 * total_pairs as f64).round() as usize;
    let mut rng = seeded(seed);
    let selected = select_pairs(n, count, &mut rng);

    let selected_set: HashSet<(u32, u32)> = selected.iter().copied().collect();
    let mut edges: Vec<(u32, u32)> = g
        .edges()
        .iter()
        .copied()
        .filter(|p| !selected_set.contains(p))
        .collect();
    let eta = latents.values();
    for &(u, v) in &selected {
        let draw: f64 = rng.gen();
        let p = w.eval(eta[u as usize], eta[v as usize]).to_f64().unwrap();
        if draw < p {
            edges.push((u, v));
        }
    }
    Graph::new(n, edges)
}

/// Writes one edge-list file per sample plus `manifest.csv` with columns
/// file, lambda, class_i, class_j, soft_label (semicolon-joined).
pub fn write_mixed_samples<T: Real>(samples: &[MixedSample<T>], dir: &Path) -> Result<()> {
    let io_err = |path: &Path, source: std::io::Error| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut manifest = String::from("file,lambda,class_i,class_j,soft_label\n");
    for (m, sample) in samples.iter().enumerate() {
        let name = format!("sample_{m:05}.edges");
        let path = dir.join(&name);
        fs::write(&path, sample.graph.to_edge_list()).map_err(|e| io_err(&path, e))?;
        let label: Vec<String> = sample.soft_label.iter().map(|&v| fmt_sig17(v)).collect();
        let _ = writeln!(
            manifest,
            "{name},{},{},{},{}",
            fmt_sig17(sample.lambda),
            sample.source_classes.0,
            sample.source_classes.1,
            label.join(";")
        );
    }
    let path = dir.join("manifest.csv");
    fs::write(&path, manifest).map_err(|e| io_err(&path, e))?;
    Ok(())
}
