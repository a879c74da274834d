use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use momix::augment::{
    graphon_augment, mixture_mixup, write_mixed_samples, MixedSample, MixupConfig,
};
use momix::bounds::bound_comparison;
use momix::contrastive::{
    batch_from_csv, infonce_lower_bound, model_aware_infonce, tfr, TfrBatch, TfrMode,
};
use momix::error::{Error, Result};
use momix::graph::{parse_edge_list, parse_tu_dataset, Graph, LabeledDataset};
use momix::graphon::{LatentPositions, StepGraphon};
use momix::mixture::{
    default_cluster_count, degree_latents, estimate_mixture, kmeans_best_of, MixtureConfig,
};
use momix::motifs::{moment_csv, moment_vector, moment_vectors, motif_family, Motif};
use momix::scalar::fmt_sig17;

use momix_cli::{
    labeled_moment_csv, run_motif_ablation, run_synthetic_repeats, SizeMode, SynthConfig,
    SynthReport,
};

#[derive(Parser)]
#[command(
    name = "momix",
    version,
    about = "Graphon mixture estimation, mixup generation, and motif-density bound calculators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CollectionArgs {
    /// Directory of *.edges files (read in sorted filename order)
    #[arg(long, conflicts_with = "tu")]
    edges_dir: Option<PathBuf>,
    /// Directory holding a TU-format dataset
    #[arg(long, requires = "name")]
    tu: Option<PathBuf>,
    /// TU dataset name (the NAME_*.txt prefix)
    #[arg(long)]
    name: Option<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Varying,
    Fixed,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TfrModeArg {
    Baseline,
    ModelAware,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the motif moment vector of one edge-list graph
    Moments {
        /// Edge-list input file
        #[arg(long = "in")]
        input: PathBuf,
        /// Node count override (default: 1 + max index)
        #[arg(long)]
        nodes: Option<usize>,
        /// Family size: 9 (up to 4-vertex motifs) or 30 (up to 5; exhaustive)
        #[arg(long, default_value_t = 9)]
        family: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cluster a graph collection by k-means on moment vectors
    Cluster {
        #[command(flatten)]
        collection: CollectionArgs,
        /// Cluster count (default: max(1, ceil(ln T)))
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate the graphon mixture and write it to a directory
    Estimate {
        #[command(flatten)]
        collection: CollectionArgs,
        #[arg(long)]
        k: Option<usize>,
        /// Per-cluster refinement size L
        #[arg(long, default_value_t = 10)]
        refine: usize,
        /// Step-graphon resolution
        #[arg(long, default_value_t = 30)]
        resolution: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Generate mixture-aware mixup samples from a labeled collection
    Mixup {
        #[command(flatten)]
        collection: CollectionArgs,
        /// Label file for --edges-dir input: one integer per graph line
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Augmentation ratio r in (0, 1]: emits ceil(r * T) samples
        #[arg(long)]
        ratio: f64,
        /// Node count of generated graphs (default: dataset mean)
        #[arg(long)]
        target_n: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        lambda_min: f64,
        #[arg(long, default_value_t = 0.2)]
        lambda_max: f64,
        #[arg(long, default_value_t = 10)]
        refine: usize,
        #[arg(long, default_value_t = 30)]
        resolution: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Resample a fraction of node pairs from a step graphon
    Augment {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        nodes: Option<usize>,
        /// Step-graphon text file
        #[arg(long)]
        graphon: PathBuf,
        /// Latent positions, one value per line (default: degree ranking)
        #[arg(long)]
        latents: Option<PathBuf>,
        /// Percentage of node pairs to resample, in [0, 100]
        #[arg(long)]
        r_percent: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Model-aware InfoNCE losses and lower bounds over an embedding batch
    Infonce {
        /// Embedding batch CSV
        #[arg(long)]
        batch: PathBuf,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// True-negative / false-negative ratio of labeled batches
    Tfr {
        /// Embedding batch CSVs with class labels (repeatable)
        #[arg(long, required = true)]
        batch: Vec<PathBuf>,
        #[arg(long, value_enum)]
        mode: TfrModeArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sampling-error bound comparison table over motifs and graph sizes
    Bounds {
        #[arg(long, default_value_t = 0.05)]
        eta: f64,
        #[arg(long, default_value_t = 50)]
        n_min: usize,
        #[arg(long, default_value_t = 1000)]
        n_max: usize,
        #[arg(long, default_value_t = 50)]
        n_step: usize,
        /// Family size: 9 or 30
        #[arg(long, default_value_t = 9)]
        family: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthetic mixture-recovery experiment over the 7 predefined graphons
    Synth {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 50)]
        per_class: usize,
        #[arg(long)]
        seed: u64,
        /// k-means cluster count
        #[arg(long, default_value_t = 7)]
        k: usize,
        /// Graph size in fixed mode
        #[arg(long, default_value_t = 200)]
        n_fixed: usize,
        /// Smallest size in varying mode
        #[arg(long, default_value_t = 75)]
        n_min: usize,
        /// Largest size in varying mode
        #[arg(long, default_value_t = 300)]
        n_max: usize,
        /// Independent repeats averaged in the report
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        /// Report file (JSON)
        #[arg(long)]
        out: PathBuf,
        /// Labeled moment-vector CSV of the first repeat
        #[arg(long)]
        moments_out: Option<PathBuf>,
    },
    /// Clustering accuracy over growing motif-family prefixes
    Ablate {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 50)]
        per_class: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 7)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        n_fixed: usize,
        #[arg(long, default_value_t = 75)]
        n_min: usize,
        #[arg(long, default_value_t = 300)]
        n_max: usize,
        /// Largest family prefix evaluated (widths above 9 count 5-vertex
        /// motifs exhaustively)
        #[arg(long)]
        max_motifs: usize,
        /// Node cap for the exhaustive counter
        #[arg(long, default_value_t = 200)]
        brute_cap: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn family_of_size(size: usize) -> Result<Vec<Motif>> {
    match size {
        9 => motif_family(4),
        30 => motif_family(5),
        other => Err(Error::InvalidArgument(format!(
            "family must be 9 or 30, got {other}"
        ))),
    }
}

/// Graphs plus optional labels and per-graph source names.
type Collection = (Vec<Graph>, Option<Vec<usize>>, Vec<String>);

fn load_collection(args: &CollectionArgs) -> Result<Collection> {
    match (&args.edges_dir, &args.tu) {
        (Some(dir), None) => {
            let mut files: Vec<PathBuf> = fs::read_dir(dir)
                .map_err(|source| Error::Io {
                    path: dir.clone(),
                    source,
                })?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "edges"))
                .collect();
            files.sort();
            if files.is_empty() {
                return Err(Error::InvalidDataset(format!(
                    "no .edges files under {}",
                    dir.display()
                )));
            }
            let mut graphs = Vec::with_capacity(files.len());
            let mut names = Vec::with_capacity(files.len());
            for f in &files {
                let (g, _) = parse_edge_list(&read_file(f)?, None)?;
                graphs.push(g);
                names.push(f.file_name().unwrap().to_string_lossy().into_owned());
            }
            Ok((graphs, None, names))
        }
        (None, Some(dir)) => {
            let name = args.name.as_deref().expect("clap enforces --name");
            let (dataset, _) = parse_tu_dataset(dir, name)?;
            let names = (0..dataset.len()).map(|i| format!("{name}[{i}]")).collect();
            let LabeledDataset { graphs, labels, .. } = dataset;
            Ok((graphs, labels, names))
        }
        _ => Err(Error::InvalidArgument(
            "provide exactly one of --edges-dir or --tu/--name".into(),
        )),
    }
}

fn parse_labels_file(path: &Path, expected: usize) -> Result<Vec<usize>> {
    let raw: Vec<i64> = read_file(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse::<i64>()
                .map_err(|_| Error::InvalidDataset(format!("bad label line `{l}`")))
        })
        .collect::<Result<_>>()?;
    if raw.len() != expected {
        return Err(Error::InvalidDataset(format!(
            "{} labels for {} graphs",
            raw.len(),
            expected
        )));
    }
    let mut distinct = raw.clone();
    distinct.sort_unstable();
    distinct.dedup();
    Ok(raw
        .iter()
        .map(|l| distinct.binary_search(l).unwrap() + 1)
        .collect())
}

fn size_mode(mode: ModeArg, n_fixed: usize, n_min: usize, n_max: usize) -> SizeMode {
    match mode {
        ModeArg::Fixed => SizeMode::Fixed { n: n_fixed },
        ModeArg::Varying => SizeMode::Varying {
            lo: n_min,
            hi: n_max,
        },
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Moments {
            input,
            nodes,
            family,
            out,
        } => {
            let family = family_of_size(family)?;
            let (graph, diag) = parse_edge_list(&read_file(&input)?, nodes)?;
            if diag.self_loops_dropped > 0 || diag.duplicate_edges_dropped > 0 {
                eprintln!(
                    "note: dropped {} self-loops, {} duplicate edges",
                    diag.self_loops_dropped, diag.duplicate_edges_dropped
                );
            }
            let mv = moment_vector::<f64>(&graph, &family);
            write_file(&out, &moment_csv(&family, &[mv]))
        }
        Command::Cluster {
            collection,
            k,
            seed,
            out,
        } => {
            let (graphs, _, names) = load_collection(&collection)?;
            let family = motif_family(4)?;
            let points: Vec<Vec<f64>> = moment_vectors::<f64>(&graphs, &family)
                .iter()
                .map(|m| m.values().to_vec())
                .collect();
            let k = k.unwrap_or_else(|| default_cluster_count(graphs.len()));
            let km = kmeans_best_of(&points, k, 300, 10, seed)?;
            let mut csv = String::from("graph_index,source,cluster\n");
            for (i, (name, &c)) in names.iter().zip(&km.assignment).enumerate() {
                let _ = writeln!(csv, "{i},{name},{c}");
            }
            write_file(&out, &csv)
        }
        Command::Estimate {
            collection,
            k,
            refine,
            resolution,
            seed,
            out_dir,
        } => {
            let (graphs, _, _) = load_collection(&collection)?;
            let config = MixtureConfig {
                cluster_count: k,
                refine_size: refine,
                resolution,
                ..MixtureConfig::new(seed)
            };
            let model = estimate_mixture::<f64>(&graphs, config)?;
            model.write_dir(&out_dir)
        }
        Command::Mixup {
            collection,
            labels,
            ratio,
            target_n,
            lambda_min,
            lambda_max,
            refine,
            resolution,
            seed,
            out_dir,
        } => {
            let (graphs, parsed_labels, _) = load_collection(&collection)?;
            let labels = match (parsed_labels, labels) {
                (_, Some(path)) => parse_labels_file(&path, graphs.len())?,
                (Some(l), None) => l,
                (None, None) => {
                    return Err(Error::InvalidDataset(
                        "mixup needs labels: use --tu input or --labels".into(),
                    ))
                }
            };
            let dataset = LabeledDataset::new(graphs, Some(labels))?;
            let config = MixupConfig {
                ratio,
                target_n,
                lambda_range: (lambda_min, lambda_max),
                refine_size: refine,
                resolution,
                seed,
            };
            let samples: Vec<MixedSample<f64>> = mixture_mixup(&dataset, &config)?;
            write_mixed_samples(&samples, &out_dir)
        }
        Command::Augment {
            input,
            nodes,
            graphon,
            latents,
            r_percent,
            seed,
            out,
        } => {
            let (graph, _) = parse_edge_list(&read_file(&input)?, nodes)?;
            let step = StepGraphon::<f64>::from_text(&read_file(&graphon)?)?;
            let eta = match latents {
                Some(path) => {
                    let values: Vec<f64> = read_file(&path)?
                        .lines()
                        .filter(|l| !l.trim().is_empty())
                        .map(|l| {
                            l.trim().parse::<f64>().map_err(|_| {
                                Error::InvalidArgument(format!("bad latent line `{l}`"))
                            })
                        })
                        .collect::<Result<_>>()?;
                    LatentPositions::new(values)?
                }
                None => degree_latents(&graph),
            };
            let augmented = graphon_augment(&graph, &step, &eta, r_percent, seed)?;
            write_file(&out, &augmented.to_edge_list())
        }
        Command::Infonce { batch, tau, out } => {
            let batch = batch_from_csv::<f64>(&read_file(&batch)?, tau)?;
            let losses = model_aware_infonce(&batch);
            let bounds = infonce_lower_bound(&batch);
            let mean = losses.mean.map_or("degenerate".to_string(), fmt_sig17);
            let mut csv = format!("# mean: {mean}, skipped: {}\n", losses.skipped);
            csv.push_str("anchor,skipped,loss,jensen_bound,centroid_bound\n");
            for t in 0..batch.len() {
                match losses.losses[t] {
                    Some(l) => {
                        let _ = writeln!(
                            csv,
                            "{t},false,{},{},{}",
                            fmt_sig17(l),
                            fmt_sig17(bounds.jensen[t].unwrap()),
                            fmt_sig17(bounds.centroid[t].unwrap())
                        );
                    }
                    None => {
                        let _ = writeln!(csv, "{t},true,,,");
                    }
                }
            }
            write_file(&out, &csv)
        }
        Command::Tfr { batch, mode, out } => {
            let mut batches = Vec::with_capacity(batch.len());
            for path in &batch {
                let b = batch_from_csv::<f64>(&read_file(path)?, 1.0)?;
                let classes = b
                    .classes()
                    .ok_or_else(|| {
                        Error::InvalidBatch(format!(
                            "{}: class column required for the ratio",
                            path.display()
                        ))
                    })?
                    .to_vec();
                batches.push(TfrBatch {
                    classes,
                    clusters: b.clusters().to_vec(),
                });
            }
            let mode = match mode {
                TfrModeArg::Baseline => TfrMode::Baseline,
                TfrModeArg::ModelAware => TfrMode::ModelAware,
            };
            let value: f64 = tfr(&batches, mode)?;
            let label = match mode {
                TfrMode::Baseline => "baseline",
                TfrMode::ModelAware => "model_aware",
            };
            write_file(&out, &format!("mode,tfr\n{label},{}\n", fmt_sig17(value)))
        }
        Command::Bounds {
            eta,
            n_min,
            n_max,
            n_step,
            family,
            out,
        } => {
            if n_step == 0 || n_min == 0 || n_min > n_max {
                return Err(Error::InvalidArgument(format!(
                    "bad size grid {n_min}..={n_max} step {n_step}"
                )));
            }
            let family = family_of_size(family)?;
            let sizes: Vec<usize> = (n_min..=n_max).step_by(n_step).collect();
            let cmp = bound_comparison(&sizes, &family, eta)?;
            write_file(&out, &cmp.to_csv())
        }
        Command::Synth {
            mode,
            per_class,
            seed,
            k,
            n_fixed,
            n_min,
            n_max,
            repeats,
            out,
            moments_out,
        } => {
            if repeats == 0 {
                return Err(Error::InvalidArgument("repeats must be >= 1".into()));
            }
            let config = SynthConfig {
                cluster_count: k,
                ..SynthConfig::new(size_mode(mode, n_fixed, n_min, n_max), per_class, seed)
            };
            let reports = run_synthetic_repeats(&config, repeats)?;
            write_file(&out, &synth_report_json(&config, &reports))?;
            if let Some(path) = moments_out {
                let family = motif_family(4)?;
                write_file(&path, &labeled_moment_csv(&family, &reports[0]))?;
            }
            Ok(())
        }
        Command::Ablate {
            mode,
            per_class,
            seed,
            k,
            n_fixed,
            n_min,
            n_max,
            max_motifs,
            brute_cap,
            out,
        } => {
            let config = SynthConfig {
                cluster_count: k,
                ..SynthConfig::new(size_mode(mode, n_fixed, n_min, n_max), per_class, seed)
            };
            let rows = run_motif_ablation(&config, max_motifs, brute_cap)?;
            let mut csv = String::from("motifs_used,mbc_accuracy,theory_accuracy\n");
            for r in &rows {
                let _ = writeln!(
                    csv,
                    "{},{},{}",
                    r.motifs_used,
                    fmt_sig17(r.mbc_accuracy),
                    fmt_sig17(r.theory_accuracy)
                );
            }
            write_file(&out, &csv)
        }
    }
}

fn synth_report_json(config: &SynthConfig, reports: &[SynthReport]) -> String {
    let mean =
        |f: fn(&SynthReport) -> f64| reports.iter().map(f).sum::<f64>() / reports.len() as f64;
    let std = |f: fn(&SynthReport) -> f64, m: f64| {
        (reports.iter().map(|r| (f(r) - m).powi(2)).sum::<f64>() / reports.len() as f64).sqrt()
    };
    let mbc_mean = mean(|r| r.mbc_accuracy);
    let theory_mean = mean(|r| r.theory_accuracy);
    let dist_mean = mean(|r| r.mean_truth_distance);

    let mut out = String::from("{\n");
    let _ = writeln!(out, "  \"mode\": \"{}\",", config.size_mode.label());
    let _ = writeln!(out, "  \"per_class\": {},", config.graphs_per_class);
    let _ = writeln!(out, "  \"cluster_count\": {},", config.cluster_count);
    let _ = writeln!(out, "  \"seed\": {},", config.seed);
    let _ = writeln!(out, "  \"repeats\": [");
    for (i, r) in reports.iter().enumerate() {
        let confusion: Vec<String> = r
            .confusion
            .iter()
            .map(|row| {
                let cells: Vec<String> = row.iter().map(usize::to_string).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        let _ = writeln!(
            out,
            "    {{\"mbc_accuracy\": {}, \"mbc_matched_accuracy\": {}, \
             \"theory_accuracy\": {}, \"mean_truth_distance\": {}, \
             \"confusion\": [{}]}}{}",
            fmt_sig17(r.mbc_accuracy),
            fmt_sig17(r.mbc_matched_accuracy),
            fmt_sig17(r.theory_accuracy),
            fmt_sig17(r.mean_truth_distance),
            confusion.join(","),
            if i + 1 == reports.len() { "" } else { "," }
        );
    }
    let _ = writeln!(out, "  ],");
    let _ = writeln!(out, "  \"mbc_accuracy_mean\": {},", fmt_sig17(mbc_mean));
    let _ = writeln!(
        out,
        "  \"mbc_accuracy_std\": {},",
        fmt_sig17(std(|r| r.mbc_accuracy, mbc_mean))
    );
    let _ = writeln!(
        out,
        "  \"theory_accuracy_mean\": {},",
        fmt_sig17(theory_mean)
    );
    let _ = writeln!(
        out,
        "  \"theory_accuracy_std\": {},",
        fmt_sig17(std(|r| r.theory_accuracy, theory_mean))
    );
    let _ = writeln!(
        out,
        "  \"mean_truth_distance_mean\": {}",
        fmt_sig17(dist_mean)
    );
    out.push_str("}\n");
    out
}
