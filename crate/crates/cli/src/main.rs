//! Command-line driver: dataset generation, law checking, training, and
//! evaluation. Every subcommand takes `--seed` and `--config`; values
//! resolve as explicit flag, then config-file entry, then built-in default.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use embalg::embed::{load_latents, save_latents, train_autoencoder, EmbedConfig};
use embalg::harness::{eval_consistency, eval_performance, ConfigMap};
use embalg::mirrored::{law_matrix, square_side, LawCheckConfig, TolerancePolicy};
use embalg::setgen::gen_dataset;
use embalg::transport::{train_baseline, train_transport, TransportConfig};
use embalg::{
    BaselineKind, CandidateOp, Dataset, DirectBaseline, EmbedModel, EvalConfig,
    ExperimentReport, LatentVector, MirroredPair, TransportModel,
};

#[derive(Parser)]
#[command(name = "embalg", version, about = "Lattice-structured operations on set embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Base seed for all random draws.
    #[arg(long)]
    seed: Option<u64>,
    /// Flat key=value config file; explicit flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a planar set dataset file.
    GenData {
        #[command(flatten)]
        common: Common,
        /// Number of records.
        #[arg(long)]
        n: Option<usize>,
        /// Occupancy grid resolution.
        #[arg(long)]
        res: Option<u32>,
        /// Output dataset file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check all candidate operation pairs against the lattice laws.
    CheckLaws {
        #[command(flatten)]
        common: Common,
        /// Vector dimension for the checks (must be a square number).
        #[arg(long)]
        dim: Option<usize>,
        /// Random argument tuples per (pair, law) cell.
        #[arg(long)]
        samples: Option<usize>,
        /// Tolerance policy: "single" or "semi-relative".
        #[arg(long)]
        policy: Option<String>,
        /// Tolerance for the semi-relative policy.
        #[arg(long)]
        tau: Option<f64>,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the set autoencoder on a dataset.
    TrainEmbed {
        #[command(flatten)]
        common: Common,
        /// Input dataset file.
        #[arg(long)]
        data: PathBuf,
        /// Output model file.
        #[arg(long)]
        out: PathBuf,
        /// Also write the dataset's latent vectors to this file.
        #[arg(long)]
        latents_out: Option<PathBuf>,
        #[arg(long)]
        latent_dim: Option<usize>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        batch: Option<usize>,
        /// Decoder sample points per set per step.
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        weight_decay: Option<f64>,
    },
    /// Train the coupling map for one (meet, join) operation pair.
    TrainTransport {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        data: PathBuf,
        /// Trained autoencoder model file.
        #[arg(long)]
        embed: PathBuf,
        /// Latents file; omitted, latents are recomputed from the dataset.
        #[arg(long)]
        latents: Option<PathBuf>,
        /// Candidate operation realizing meet.
        #[arg(long)]
        meet: Option<String>,
        /// Candidate operation realizing join.
        #[arg(long)]
        join: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        batch_terms: Option<usize>,
        #[arg(long)]
        points_per_term: Option<usize>,
        #[arg(long)]
        ell_max: Option<usize>,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        weight_decay: Option<f64>,
        #[arg(long)]
        val_instances: Option<usize>,
    },
    /// Train a direct baseline network over the same latents.
    TrainBaseline {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        embed: PathBuf,
        #[arg(long)]
        latents: Option<PathBuf>,
        /// Baseline kind: "mlp_concat" or "symmetric".
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        batch_terms: Option<usize>,
        #[arg(long)]
        points_per_term: Option<usize>,
        #[arg(long)]
        ell_max: Option<usize>,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        weight_decay: Option<f64>,
        #[arg(long)]
        val_instances: Option<usize>,
    },
    /// Measure prediction quality (IoU, accuracy) across term sizes.
    EvalIou {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        embed: PathBuf,
        /// Trained coupling or baseline model file.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        latents: Option<PathBuf>,
        /// Output report CSV.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        num_points: Option<usize>,
        #[arg(long)]
        num_terms: Option<usize>,
        #[arg(long)]
        ell_max: Option<usize>,
    },
    /// Measure prediction stability under equivalence-preserving rewrites.
    EvalConsistency {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        embed: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        latents: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        num_points: Option<usize>,
        #[arg(long)]
        num_terms: Option<usize>,
        #[arg(long)]
        ell_max: Option<usize>,
        #[arg(long)]
        j_max: Option<usize>,
    },
    /// Merge report CSVs into a summary table and optional plot series.
    Report {
        #[command(flatten)]
        common: Common,
        /// Input report CSV files.
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        /// Write the summary table here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for per-metric plot-data CSVs.
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn load_config(common: &Common) -> Result<ConfigMap> {
    match &common.config {
        Some(path) => ConfigMap::load(path)
            .with_context(|| format!("loading config {}", path.display())),
        None => Ok(ConfigMap::new()),
    }
}

/// Flag beats config file beats default.
fn resolved<T: FromStr>(flag: Option<T>, cfg: &ConfigMap, key: &str, default: T) -> Result<T> {
    match flag {
        Some(v) => Ok(v),
        None => Ok(cfg.get_or(key, default)?),
    }
}

fn load_dataset(path: &Path) -> Result<Dataset> {
    Dataset::load(path).with_context(|| format!("loading dataset {}", path.display()))
}

fn load_embed(path: &Path) -> Result<EmbedModel> {
    EmbedModel::load(path).with_context(|| format!("loading autoencoder {}", path.display()))
}

/// Latents from a file when given (validated against dataset and model),
/// otherwise recomputed by encoding every record.
fn latents_for(
    embed: &EmbedModel,
    dataset: &Dataset,
    path: &Option<PathBuf>,
) -> Result<Vec<LatentVector>> {
    match path {
        None => Ok(embed.encode_dataset(dataset)),
        Some(p) => {
            let latents =
                load_latents(p).with_context(|| format!("loading latents {}", p.display()))?;
            if latents.len() != dataset.len() {
                bail!("latents file has {} rows, dataset has {}", latents.len(), dataset.len());
            }
            let dim = embed.arch().latent_dim;
            if latents.iter().any(|z| z.len() != dim) {
                bail!("latents file dimension differs from the model's {dim}");
            }
            Ok(latents)
        }
    }
}

fn parse_candidate(id: &str) -> Result<CandidateOp> {
    CandidateOp::from_id(id).ok_or_else(|| {
        anyhow::anyhow!(
            "unknown operation {id:?}; one of max, min, add, sub, hadamard, scaled_add, mat_prod, cyclic_add"
        )
    })
}

enum AnyOps {
    Transport(TransportModel),
    Baseline(DirectBaseline),
}

fn load_ops(path: &Path) -> Result<AnyOps> {
    match TransportModel::load(path) {
        Ok(m) => Ok(AnyOps::Transport(m)),
        Err(transport_err) => match DirectBaseline::load(path) {
            Ok(b) => Ok(AnyOps::Baseline(b)),
            Err(baseline_err) => bail!(
                "{} is neither a coupling model ({transport_err}) nor a baseline ({baseline_err})",
                path.display()
            ),
        },
    }
}

fn transport_config(
    cfg: &ConfigMap,
    base: TransportConfig,
    epochs: Option<usize>,
    batch_terms: Option<usize>,
    points_per_term: Option<usize>,
    ell_max: Option<usize>,
    lr: Option<f64>,
    weight_decay: Option<f64>,
    val_instances: Option<usize>,
) -> Result<TransportConfig> {
    Ok(TransportConfig {
        epochs: resolved(epochs, cfg, "epochs", base.epochs)?,
        batch_terms: resolved(batch_terms, cfg, "batch_terms", base.batch_terms)?,
        points_per_term: resolved(points_per_term, cfg, "points_per_term", base.points_per_term)?,
        ell_max: resolved(ell_max, cfg, "ell_max", base.ell_max)?,
        lr: resolved(lr, cfg, "lr", base.lr)?,
        weight_decay: resolved(weight_decay, cfg, "weight_decay", base.weight_decay)?,
        val_instances: resolved(val_instances, cfg, "val_instances", base.val_instances)?,
    })
}

fn eval_config(
    cfg: &ConfigMap,
    num_points: Option<usize>,
    num_terms: Option<usize>,
    ell_max: Option<usize>,
    j_max: Option<usize>,
) -> Result<EvalConfig> {
    let base = EvalConfig::default();
    Ok(EvalConfig {
        num_points: resolved(num_points, cfg, "num_points", base.num_points)?,
        num_terms: resolved(num_terms, cfg, "num_terms", base.num_terms)?,
        ell_max: resolved(ell_max, cfg, "ell_max", base.ell_max)?,
        j_max: resolved(j_max, cfg, "j_max", base.j_max)?,
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenData { common, n, res, out } => {
            let cfg = load_config(&common)?;
            let seed = resolved(common.seed, &cfg, "seed", 0)?;
            let n = resolved(n, &cfg, "n", 2000)?;
            let res = resolved(res, &cfg, "res", 32)?;
            let dataset = gen_dataset(n, res, seed);
            dataset.save(&out).with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {} records at resolution {res} to {}", dataset.len(), out.display());
        }
        Command::CheckLaws { common, dim, samples, policy, tau, out } => {
            let cfg = load_config(&common)?;
            let seed = resolved(common.seed, &cfg, "seed", 0)?;
            let dim = resolved(dim, &cfg, "dim", 1024)?;
            let samples = resolved(samples, &cfg, "samples", 512)?;
            let policy_name =
                policy.map(Ok).unwrap_or_else(|| cfg.get_or("policy", "single".to_string()).map_err(anyhow::Error::from))?;
            let policy = match policy_name.as_str() {
                "single" => TolerancePolicy::SinglePrecision { atol: 1e-8, rtol: 1e-5 },
                "semi-relative" => {
                    TolerancePolicy::SemiRelative { tau: resolved(tau, &cfg, "tau", 1e-9)? }
                }
                other => bail!("unknown policy {other:?}; one of single, semi-relative"),
            };
            if square_side(dim).is_none() {
                bail!("--dim must be a square number, got {dim}");
            }
            let config = LawCheckConfig { dim, num_samples: samples, policy };
            let matrix = law_matrix(&config, seed).context("checking laws")?;
            let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            matrix.write_csv(file).context("writing law matrix CSV")?;
            println!("checked {} pairs against 8 laws, wrote {}", matrix.rows.len(), out.display());
        }
        Command::TrainEmbed {
            common,
            data,
            out,
            latents_out,
            latent_dim,
            epochs,
            batch,
            points,
            lr,
            weight_decay,
        } => {
            let cfg = load_config(&common)?;
            let seed = resolved(common.seed, &cfg, "seed", 0)?;
            let dataset = load_dataset(&data)?;
            let base = EmbedConfig::default();
            let config = EmbedConfig {
                latent_dim: resolved(latent_dim, &cfg, "latent_dim", base.latent_dim)?,
                enc_hidden: base.enc_hidden,
                dec_hidden: base.dec_hidden,
                epochs: resolved(epochs, &cfg, "epochs", base.epochs)?,
                batch_sets: resolved(batch, &cfg, "batch", base.batch_sets)?,
                points_per_set: resolved(points, &cfg, "points", base.points_per_set)?,
                lr: resolved(lr, &cfg, "lr", base.lr)?,
                weight_decay: resolved(weight_decay, &cfg, "weight_decay", base.weight_decay)?,
            };
            let (model, report) =
                train_autoencoder(&dataset, &config, seed).context("training autoencoder")?;
            model.save(&out).with_context(|| format!("writing {}", out.display()))?;
            println!(
                "trained autoencoder: best val loss {:.6} at epoch {}, wrote {}",
                report.best_val,
                report.best_epoch,
                out.display()
            );
            if let Some(lpath) = latents_out {
                let latents = model.encode_dataset(&dataset);
                save_latents(&lpath, &latents)
                    .with_context(|| format!("writing {}", lpath.display()))?;
                println!("wrote {} latent vectors to {}", latents.len(), lpath.display());
            }
        }
        Command::TrainTransport {
            common,
            data,
            embed,
            latents,
            meet,
            join,
            out,
            epochs,
            batch_terms,
            points_per_term,
            ell_max,
            lr,
            weight_decay,
            val_instances,
        } => {
            let cfg = load_config(&common)?;
            let seed = resolved(common.seed, &cfg, "seed", 0)?;
            let meet_name = resolved(meet, &cfg, "meet", "max".to_string())?;
            let join_name = resolved(join, &cfg, "join", "min".to_string())?;
            let pair = MirroredPair::new(parse_candidate(&meet_name)?, parse_candidate(&join_name)?);
            let dataset = load_dataset(&data)?;
            let embed = load_embed(&embed)?;
            let dim = embed.arch().latent_dim;
            if dim % 2 != 0 {
                bail!("coupling needs an even latent dimension, model has {dim}");
            }
            if pair.uses(CandidateOp::MatProd) && square_side(dim).is_none() {
                bail!("mat_prod needs a square latent dimension, model has {dim}");
            }
            let latents = latents_for(&embed, &dataset, &latents)?;
            let config = transport_config(
                &cfg,
                TransportConfig::default(),
                epochs,
                batch_terms,
                points_per_term,
                ell_max,
                lr,
                weight_decay,
                val_instances,
            )?;
            let (model, report) =
                train_transport(&embed, &dataset, &latents, pair, &config, seed)
                    .context("training coupling")?;
            model.save(&out).with_context(|| format!("writing {}", out.display()))?;
            println!(
                "trained {model}: best val loss {:.6} at epoch {}, wrote {}",
                report.best_val,
                report.best_epoch,
                out.display()
            );
        }
        Command::TrainBaseline {
            common,
            data,
            embed,
            latents,
            kind,
            out,
            epochs,
            batch_terms,
            points_per_term,
            ell_max,
            lr,
            weight_decay,
            val_instances,
        } => {
            let cfg = load_config(&common)?;
            let seed = resolved(common.seed, &cfg, "seed", 0)?;
            let kind_name = resolved(kind, &cfg, "kind", "mlp_concat".to_string())?;
            let kind = BaselineKind::from_id(&kind_name).ok_or_else(|| {
                anyhow::anyhow!("unknown baseline kind {kind_name:?}; one of mlp_concat, symmetric")
            })?;
            let dataset = load_dataset(&data)?;
            let embed = load_embed(&embed)?;
            let latents = latents_for(&embed, &dataset, &latents)?;
            let config = transport_config(
                &cfg,
                TransportConfig::baseline_default(),
                epochs,
                batch_terms,
                points_per_term,
                ell_max,
                lr,
                weight_decay,
                val_instances,
            )?;
            let (model, report) =
                train_baseline(&embed, &dataset, &latents, kind, &config, seed)
                    .context("training baseline")?;
            model.save(&out).with_context(|| format!("writing {}", out.display()))?;
            println!(
                "trained baseline {}: best val loss {:.6} at epoch {}, wrote {}",
                kind,
                report.best_val,
                report.best_epoch,
                out.display()
            );
        }
        Command::EvalIou {
            common,
            data,
            embed,
            model,
            latents,
            out,
            num_points,
            num_terms,
            ell_max,
        } => {
            let cfg = load_config(&common)?;
            let seed = resolved(common.seed, &cfg, "seed", 0)?;
            let dataset = load_dataset(&data)?;
            let embed = load_embed(&embed)?;
            let latents = latents_for(&embed, &dataset, &latents)?;
            let eval_cfg = eval_config(&cfg, num_points, num_terms, ell_max, None)?;
            let ops = load_ops(&model)?;
            let report = match &ops {
                AnyOps::Transport(m) => {
                    eval_performance(m, &embed, &dataset, &latents, &eval_cfg, seed)
                }
                AnyOps::Baseline(b) => {
                    eval_performance(b, &embed, &dataset, &latents, &eval_cfg, seed)
                }
            };
            report.write_csv(&out).with_context(|| format!("writing {}", out.display()))?;
            print!("{}", report.summary_table());
            println!("wrote {} rows to {}", report.rows.len(), out.display());
        }
        Command::EvalConsistency {
            common,
            data,
            embed,
            model,
            latents,
            out,
            num_points,
            num_terms,
            ell_max,
            j_max,
        } => {
            let cfg = load_config(&common)?;
            let seed = resolved(common.seed, &cfg, "seed", 0)?;
            let dataset = load_dataset(&data)?;
            let embed = load_embed(&embed)?;
            let latents = latents_for(&embed, &dataset, &latents)?;
            let eval_cfg = eval_config(&cfg, num_points, num_terms, ell_max, j_max)?;
            let ops = load_ops(&model)?;
            let report = match &ops {
                AnyOps::Transport(m) => {
                    eval_consistency(m, &embed, &dataset, &latents, &eval_cfg, seed)
                }
                AnyOps::Baseline(b) => {
                    eval_consistency(b, &embed, &dataset, &latents, &eval_cfg, seed)
                }
            };
            report.write_csv(&out).with_context(|| format!("writing {}", out.display()))?;
            print!("{}", report.summary_table());
            println!("wrote {} rows to {}", report.rows.len(), out.display());
        }
        Command::Report { common, input, out, plot_data } => {
            let _ = load_config(&common)?;
            let mut merged = ExperimentReport::new();
            for path in &input {
                let part = ExperimentReport::read_csv(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                merged.extend(part);
            }
            let table = merged.summary_table();
            print!("{table}");
            if let Some(path) = out {
                std::fs::write(&path, &table)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(dir) = plot_data {
                std::fs::create_dir_all(&dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
                let mut series: Vec<(String, String)> = merged
                    .rows
                    .iter()
                    .filter(|r| r.metric != "iou")
                    .map(|r| (r.experiment.clone(), r.metric.clone()))
                    .collect();
                series.sort();
                series.dedup();
                for (experiment, metric) in series {
                    let path = dir.join(format!("{experiment}_{metric}.csv"));
                    std::fs::write(&path, merged.plot_series(&experiment, &metric))
                        .with_context(|| format!("writing {}", path.display()))?;
                }
            }
        }
    }
    Ok(())
}
