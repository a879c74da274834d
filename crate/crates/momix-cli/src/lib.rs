//! Experiment harness behind the command-line surface: the synthetic
//! mixture-recovery experiment, clustering-accuracy scoring, and the
//! motif-count ablation.

use momix::error::{Error, Result};
use momix::graph::Graph;
use momix::graphon::{
    ground_truth_graphon, sample_graph_with_rng, theoretical_moment_vector_with, TheoryOptions,
};
use momix::mixture::{kmeans_best_of, theory_assign};
use momix::motifs::{brute_force_density_capped, moment_vector, motif_family, MomentVector, Motif};
use momix::rng::{derive_seed, seeded};
use momix::scalar::fmt_sig17;
use momix::MomentVector64;

use rand::Rng;
use rayon::prelude::*;

/// Number of predefined ground-truth graphons.
pub const GROUND_TRUTH_COUNT: usize = 7;

/// Graph-size regime of the synthetic experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeMode {
    /// n drawn uniformly from lo..=hi per graph (defaults 75..=300).
    Varying { lo: usize, hi: usize },
    /// every graph has exactly n nodes (default 200).
    Fixed { n: usize },
}

impl SizeMode {
    pub fn varying_default() -> Self {
        SizeMode::Varying { lo: 75, hi: 300 }
    }

    pub fn fixed_default() -> Self {
        SizeMode::Fixed { n: 200 }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SizeMode::Varying { .. } => "varying",
            SizeMode::Fixed { .. } => "fixed",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SynthConfig {
    pub graphs_per_class: usize,
    pub size_mode: SizeMode,
    pub seed: u64,
    /// k-means cluster count.
    pub cluster_count: usize,
    /// Motif family cap: 4 (9 motifs) or 5 (30 motifs).
    pub max_k: usize,
}

impl SynthConfig {
    pub fn new(size_mode: SizeMode, graphs_per_class: usize, seed: u64) -> Self {
        Self {
            graphs_per_class,
            size_mode,
            seed,
            cluster_count: GROUND_TRUTH_COUNT,
            max_k: 4,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.graphs_per_class == 0 {
            return Err(Error::InvalidArgument(
                "graphs_per_class must be >= 1".into(),
            ));
        }
        if let SizeMode::Varying { lo, hi } = self.size_mode {
            if lo == 0 || lo > hi {
                return Err(Error::InvalidArgument(format!(
                    "bad varying size range [{lo}, {hi}]"
                )));
            }
        }
        if self.cluster_count == 0 {
            return Err(Error::InvalidArgument("cluster_count must be >= 1".into()));
        }
        Ok(())
    }
}

/// Best label accuracy over one-to-one matchings between predicted cluster
/// ids and truth labels, solved exactly by subset DP.
pub fn clustering_accuracy(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::InvalidArgument("empty label lists".into()));
    }
    let mut pred_ids = predicted.to_vec();
    pred_ids.sort_unstable();
    pred_ids.dedup();
    let mut truth_ids = truth.to_vec();
    truth_ids.sort_unstable();
    truth_ids.dedup();
    let mut confusion = vec![vec![0u64; truth_ids.len()]; pred_ids.len()];
    for (&p, &t) in predicted.iter().zip(truth) {
        let pi = pred_ids.binary_search(&p).unwrap();
        let ti = truth_ids.binary_search(&t).unwrap();
        confusion[pi][ti] += 1;
    }
    // DP over subsets of the smaller side; the larger side may skip.
    let (large, small, scores) = if pred_ids.len() >= truth_ids.len() {
        (pred_ids.len(), truth_ids.len(), confusion)
    } else {
        let mut t = vec![vec![0u64; pred_ids.len()]; truth_ids.len()];
        for (p, row) in confusion.iter().enumerate() {
            for (q, &v) in row.iter().enumerate() {
                t[q][p] = v;
            }
        }
        (truth_ids.len(), pred_ids.len(), t)
    };
    if small > 16 {
        return Err(Error::InvalidArgument(format!(
            "assignment search supports up to 16 distinct labels on the \
             smaller side, got {small}"
        )));
    }
    let full = 1usize << small;
    let mut dp = vec![0u64; full];
    for scores_row in scores.iter().take(large) {
        let mut next = dp.clone();
        for mask in 0..full {
            for j in 0..small {
                if mask & (1 << j) != 0 {
                    let cand = dp[mask ^ (1 << j)] + scores_row[j];
                    if cand > next[mask] {
                        next[mask] = cand;
                    }
                }
            }
        }
        dp = next;
    }
    Ok(dp[full - 1] as f64 / predicted.len() as f64)
}

/// Majority-class accuracy of a partition: every cluster scores its most
/// frequent truth label (labels may repeat across clusters). Unlike
/// [`clustering_accuracy`] this rewards splitting a noisy class across
/// clusters, so it upper-bounds the matched accuracy.
pub fn cluster_purity(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::InvalidArgument("empty label lists".into()));
    }
    let mut pred_ids = predicted.to_vec();
    pred_ids.sort_unstable();
    pred_ids.dedup();
    let mut truth_ids = truth.to_vec();
    truth_ids.sort_unstable();
    truth_ids.dedup();
    let mut confusion = vec![vec![0usize; truth_ids.len()]; pred_ids.len()];
    for (&p, &t) in predicted.iter().zip(truth) {
        let pi = pred_ids.binary_search(&p).unwrap();
        let ti = truth_ids.binary_search(&t).unwrap();
        confusion[pi][ti] += 1;
    }
    let hits: usize = confusion
        .iter()
        .map(|row| row.iter().copied().max().unwrap_or(0))
        .sum();
    Ok(hits as f64 / predicted.len() as f64)
}

/// One synthetic-experiment run.
#[derive(Debug, Clone)]
pub struct SynthReport {
    /// k-means partition scored by [`cluster_purity`].
    pub mbc_accuracy: f64,
    /// k-means partition scored by the one-to-one matching of
    /// [`clustering_accuracy`].
    pub mbc_matched_accuracy: f64,
    pub theory_accuracy: f64,
    /// rows: truth class, columns: predicted k-means cluster
    pub confusion: Vec<Vec<usize>>,
    pub labels: Vec<usize>,
    pub moments: Vec<MomentVector64>,
    /// mean Euclidean distance from each empirical vector to the theoretical
    /// vector of its generating graphon
    pub mean_truth_distance: f64,
}

fn sample_class_graph(class: usize, index: usize, config: &SynthConfig) -> Graph {
    let w = ground_truth_graphon::<f64>(class).expect("class < 7");
    let global = (class * config.graphs_per_class + index) as u64;
    let mut rng = seeded(derive_seed(config.seed, global));
    // per-graph stream: size draw first (varying mode), then the sampler
    let n = match config.size_mode {
        SizeMode::Fixed { n } => n,
        SizeMode::Varying { lo, hi } => rng.gen_range(lo..=hi),
    };
    sample_graph_with_rng(&w, n, &mut rng).0
}

fn family_for(config: &SynthConfig) -> Result<Vec<Motif>> {
    motif_family(config.max_k)
}

fn theory_vectors(family: &[Motif], seed: u64) -> Result<Vec<MomentVector64>> {
    let opts = TheoryOptions {
        five_node_mc: Some((200_000, derive_seed(seed, 0x7e0))),
        ..TheoryOptions::default()
    };
    (0..GROUND_TRUTH_COUNT)
        .map(|idx| {
            let w = ground_truth_graphon::<f64>(idx)?;
            theoretical_moment_vector_with(&w, family, opts)
        })
        .collect()
}

/// Samples `graphs_per_class` graphs from each ground-truth graphon, clusters
/// their moment vectors with k-means (MBC), assigns each vector to the
/// nearest theoretical vector (theory baseline), and scores both against the
/// generating labels.
pub fn run_synthetic(config: &SynthConfig) -> Result<SynthReport> {
    config.validate()?;
    let family = family_for(config)?;
    let per = config.graphs_per_class;
    let total = GROUND_TRUTH_COUNT * per;
    let labels: Vec<usize> = (0..total).map(|i| i / per).collect();
    let moments: Vec<MomentVector64> = (0..total)
        .into_par_iter()
        .map(|i| {
            let g = sample_class_graph(i / per, i % per, config);
            moment_vector(&g, &family)
        })
        .collect();
    let theory = theory_vectors(&family, config.seed)?;
    synth_report_from_moments(config, &family, labels, moments, &theory)
}

fn synth_report_from_moments(
    config: &SynthConfig,
    family: &[Motif],
    labels: Vec<usize>,
    moments: Vec<MomentVector64>,
    theory: &[MomentVector64],
) -> Result<SynthReport> {
    let points: Vec<Vec<f64>> = moments.iter().map(|m| m.values().to_vec()).collect();
    let km = kmeans_best_of(
        &points,
        config.cluster_count,
        300,
        10,
        derive_seed(config.seed, 0xacc),
    )?;
    let mbc_accuracy = cluster_purity(&km.assignment, &labels)?;
    let mbc_matched_accuracy = clustering_accuracy(&km.assignment, &labels)?;

    let theory_pred = theory_assign(&moments, theory)?;
    let matches = theory_pred
        .iter()
        .zip(&labels)
        .filter(|(p, t)| p == t)
        .count();
    let theory_accuracy = matches as f64 / labels.len() as f64;

    let mut confusion = vec![vec![0usize; config.cluster_count]; GROUND_TRUTH_COUNT];
    for (&cluster, &label) in km.assignment.iter().zip(&labels) {
        confusion[label][cluster] += 1;
    }
    let mean_truth_distance = moments
        .iter()
        .zip(&labels)
        .map(|(m, &l)| m.euclidean_distance(&theory[l]))
        .sum::<f64>()
        / labels.len() as f64;
    debug_assert_eq!(family.len(), moments[0].len());
    Ok(SynthReport {
        mbc_accuracy,
        mbc_matched_accuracy,
        theory_accuracy,
        confusion,
        labels,
        moments,
        mean_truth_distance,
    })
}

/// Repeats [`run_synthetic`] with derived seeds (parallel over repeats).
pub fn run_synthetic_repeats(base: &SynthConfig, repeats: usize) -> Result<Vec<SynthReport>> {
    (0..repeats)
        .into_par_iter()
        .map(|rep| {
            let config = SynthConfig {
                seed: derive_seed(base.seed, rep as u64),
                ..*base
            };
            run_synthetic(&config)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AblationRow {
    /// prefix width: how many family motifs the vectors use
    pub motifs_used: usize,
    pub mbc_accuracy: f64,
    pub theory_accuracy: f64,
}

/// Re-clusters the synthetic dataset on growing prefixes of the motif family
/// (1..=max_motifs entries). Widths above 9 need 5-vertex densities, which
/// are counted exhaustively; `brute_cap` rejects graphs too large for that.
pub fn run_motif_ablation(
    config: &SynthConfig,
    max_motifs: usize,
    brute_cap: usize,
) -> Result<Vec<AblationRow>> {
    config.validate()?;
    if max_motifs == 0 || max_motifs > 30 {
        return Err(Error::InvalidArgument(format!(
            "max_motifs must lie in 1..=30, got {max_motifs}"
        )));
    }
    let family = motif_family(if max_motifs <= 9 { 4 } else { 5 })?;
    let family = &family[..max_motifs.max(9).min(family.len())];
    let per = config.graphs_per_class;
    let total = GROUND_TRUTH_COUNT * per;
    let labels: Vec<usize> = (0..total).map(|i| i / per).collect();

    let nine = motif_family(4)?;
    let wide: Vec<Vec<f64>> = (0..total)
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>> {
            let g = sample_class_graph(i / per, i % per, config);
            let mut values = moment_vector::<f64>(&g, &nine).values().to_vec();
            for f in family.iter().skip(9).take(max_motifs.saturating_sub(9)) {
                values.push(brute_force_density_capped(&g, f, brute_cap)?);
            }
            values.truncate(max_motifs);
            Ok(values)
        })
        .collect::<Result<_>>()?;
    let theory_full = theory_vectors(&family[..max_motifs], config.seed)?;

    let mut rows = Vec::with_capacity(max_motifs);
    for width in 1..=max_motifs {
        let moments: Vec<MomentVector64> = wide
            .iter()
            .map(|v| MomentVector::from_values(v[..width].to_vec()))
            .collect();
        let theory: Vec<MomentVector64> = theory_full
            .iter()
            .map(|t| MomentVector::from_values(t.values()[..width].to_vec()))
            .collect();
        let points: Vec<Vec<f64>> = moments.iter().map(|m| m.values().to_vec()).collect();
        let km = kmeans_best_of(
            &points,
            config.cluster_count,
            300,
            10,
            derive_seed(config.seed, 0xab1 + width as u64),
        )?;
        let mbc_accuracy = cluster_purity(&km.assignment, &labels)?;
        let theory_pred = theory_assign(&moments, &theory)?;
        let matches = theory_pred
            .iter()
            .zip(&labels)
            .filter(|(p, t)| p == t)
            .count();
        rows.push(AblationRow {
            motifs_used: width,
            mbc_accuracy,
            theory_accuracy: matches as f64 / labels.len() as f64,
        });
    }
    Ok(rows)
}

/// Moment CSV with a leading truth-label column (the t-SNE input data,
/// exported raw).
pub fn labeled_moment_csv(family: &[Motif], report: &SynthReport) -> String {
    let mut out = String::from("label");
    for f in family {
        out.push_str(&format!(",motif_{}", f.id()));
    }
    out.push('\n');
    for (label, m) in report.labels.iter().zip(&report.moments) {
        out.push_str(&label.to_string());
        for &v in m.values() {
            out.push(',');
            out.push_str(&fmt_sig17(v));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_identity_and_swap() {
        let truth = vec![0usize, 0, 1, 1, 2];
        assert_eq!(clustering_accuracy(&truth, &truth).unwrap(), 1.0);
        let swapped = vec![2usize, 2, 0, 0, 1];
        assert_eq!(clustering_accuracy(&swapped, &truth).unwrap(), 1.0);
    }

    #[test]
    fn accuracy_half_case() {
        let truth = vec![0usize, 0, 1, 1];
        let predicted = vec![0usize, 1, 0, 1];
        assert_eq!(clustering_accuracy(&predicted, &truth).unwrap(), 0.5);
    }

    #[test]
    fn accuracy_unequal_label_sets() {
        // three predicted clusters onto two truth classes
        let truth = vec![0usize, 0, 0, 1, 1, 1];
        let predicted = vec![0usize, 0, 2, 1, 1, 2];
        // best matching: 0->0, 1->1 (2 unmatched) = 4/6
        assert!((clustering_accuracy(&predicted, &truth).unwrap() - 4.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn accuracy_rejects_mismatched_lengths() {
        assert!(clustering_accuracy(&[0, 1], &[0]).is_err());
        assert!(clustering_accuracy(&[], &[]).is_err());
        assert!(cluster_purity(&[0, 1], &[0]).is_err());
    }

    #[test]
    fn purity_rewards_split_clusters() {
        // class 0 split across clusters 0 and 2: matching loses the extra
        // cluster, purity keeps it
        let truth = vec![0usize, 0, 0, 0, 1, 1];
        let predicted = vec![0usize, 0, 2, 2, 1, 1];
        assert_eq!(cluster_purity(&predicted, &truth).unwrap(), 1.0);
        assert!((clustering_accuracy(&predicted, &truth).unwrap() - 4.0 / 6.0).abs() < 1e-12);
        // purity never falls below the matched accuracy
        let truth = vec![0usize, 0, 1, 1, 2, 2];
        let predicted = vec![0usize, 1, 1, 2, 2, 0];
        assert!(
            cluster_purity(&predicted, &truth).unwrap()
                >= clustering_accuracy(&predicted, &truth).unwrap()
        );
    }

    #[test]
    fn tiny_synthetic_run_is_well_formed() {
        let config = SynthConfig {
            cluster_count: 7,
            ..SynthConfig::new(SizeMode::Fixed { n: 40 }, 1, 5)
        };
        let report = run_synthetic(&config).unwrap();
        assert_eq!(report.labels.len(), 7);
        assert_eq!(report.moments.len(), 7);
        assert_eq!(report.confusion.len(), 7);
        assert!((0.0..=1.0).contains(&report.mbc_accuracy));
        assert!((0.0..=1.0).contains(&report.theory_accuracy));
        let valid = [
            0.0,
            1.0 / 7.0,
            2.0 / 7.0,
            3.0 / 7.0,
            4.0 / 7.0,
            5.0 / 7.0,
            6.0 / 7.0,
            1.0,
        ];
        assert!(valid
            .iter()
            .any(|v| (report.mbc_accuracy - v).abs() < 1e-12));
    }

    #[test]
    fn synthetic_run_is_deterministic() {
        let config = SynthConfig::new(SizeMode::Fixed { n: 30 }, 2, 11);
        let a = run_synthetic(&config).unwrap();
        let b = run_synthetic(&config).unwrap();
        assert_eq!(a.mbc_accuracy, b.mbc_accuracy);
        assert_eq!(a.theory_accuracy, b.theory_accuracy);
        for (x, y) in a.moments.iter().zip(&b.moments) {
            assert_eq!(x.values(), y.values());
        }
    }

    #[test]
    fn ablation_rows_cover_every_prefix() {
        let config = SynthConfig {
            cluster_count: 7,
            ..SynthConfig::new(SizeMode::Fixed { n: 14 }, 2, 3)
        };
        let rows = run_motif_ablation(&config, 12, 50).unwrap();
        assert_eq!(rows.len(), 12);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.motifs_used, i + 1);
            assert!((0.0..=1.0).contains(&row.mbc_accuracy));
        }
    }

    #[test]
    fn ablation_respects_brute_cap() {
        let config = SynthConfig::new(SizeMode::Fixed { n: 60 }, 1, 3);
        assert!(matches!(
            run_motif_ablation(&config, 10, 50),
            Err(Error::BruteForceCap { .. })
        ));
        // widths <= 9 never touch the exhaustive counter
        assert!(run_motif_ablation(&config, 9, 50).is_ok());
    }

    #[test]
    fn labeled_csv_shape() {
        let config = SynthConfig::new(SizeMode::Fixed { n: 25 }, 1, 9);
        let report = run_synthetic(&config).unwrap();
        let family = motif_family(4).unwrap();
        let csv = labeled_moment_csv(&family, &report);
        assert_eq!(csv.lines().count(), 8);
        assert!(csv.starts_with("label,motif_0,"));
    }
}
