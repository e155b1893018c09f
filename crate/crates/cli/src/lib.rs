//! `scf-ganlab`: generate reference worlds, train GANs, synthesize
//! records, train and evaluate classifiers, and run the benchmark and
//! ablation pipelines.

pub mod config;
pub mod manifest;
pub mod pipeline;

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use scf_ganlab_core::classifiers::{train_classifier, ClassifierKind, TrainedClassifier};
use scf_ganlab_core::data::{
    load_csv, normalize, normalize_with, save_csv, Dataset, IndicatorSchema,
};
use scf_ganlab_core::gan::{self, generate_records, GanModel};
use scf_ganlab_core::metrics::svg::{loss_curves_svg, roc_svg};
use scf_ganlab_core::metrics::{confusion_and_prf, render_report, roc_and_auc, ReportFormat};
use scf_ganlab_core::nn::{finite_difference_check, half_sq_norm, Activation, MlpModel};
use scf_ganlab_core::{Error, Matrix, Prng, Result};

use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "scf-ganlab", version, about = "GAN-based augmentation lab for imbalanced credit-risk data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Flat key-value config file (`section.key = value`)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed (fallback: env SCF_GANLAB_SEED, then 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic reference world and write it as CSV
    Genworld {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Train a GAN on the minority class of a CSV dataset
    TrainGan {
        #[command(flatten)]
        common: CommonArgs,
        /// Training data CSV
        #[arg(long)]
        data: PathBuf,
        /// GAN flavor
        #[arg(long, value_parser = ["vanilla", "wgan"])]
        mode: Option<String>,
    },
    /// Sample synthetic minority records from a trained GAN bundle
    Synth {
        #[command(flatten)]
        common: CommonArgs,
        /// GAN bundle path
        #[arg(long)]
        model: PathBuf,
        /// Number of records to draw
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
    /// Train a single classifier on a CSV dataset
    TrainClf {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        data: PathBuf,
        /// logreg, linear_svm or mlp_bp
        #[arg(long)]
        kind: String,
    },
    /// Evaluate a classifier bundle on a CSV dataset
    Eval {
        #[command(flatten)]
        common: CommonArgs,
        /// Classifier bundle path
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_parser = ["csv", "md"], default_value = "md")]
        format: String,
    },
    /// Full pipeline: world, split, GAN, augmentation, all classifiers
    Benchmark {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_parser = ["csv", "md"], default_value = "md")]
        format: String,
        #[arg(long, value_parser = ["vanilla", "wgan"])]
        mode: Option<String>,
    },
    /// Augmentation on/off comparison for the MLP over multiple seeds
    Ablate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the finite-difference gradient suite and print the max error
    Gradcheck,
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version via "errors" that exit 0
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn env_seed() -> Option<u64> {
    std::env::var("SCF_GANLAB_SEED").ok()?.parse().ok()
}

/// Load config, then apply --seed/--out overrides and the seed fallback.
fn experiment(common: &CommonArgs) -> Result<(ExperimentConfig, BTreeMap<String, String>)> {
    let (mut cfg, echo) = match &common.config {
        Some(path) => config::load_config(path)?,
        None => (ExperimentConfig::default(), BTreeMap::new()),
    };
    if let Some(seed) = common.seed.or_else(env_seed) {
        cfg.reseed(seed);
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    Ok((cfg, echo))
}

fn parse_format(s: &str) -> ReportFormat {
    match s {
        "csv" => ReportFormat::Csv,
        _ => ReportFormat::Markdown,
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let schema = IndicatorSchema::standard();
    match cli.command {
        Command::Genworld { common } => {
            let (cfg, _) = experiment(&common)?;
            let world = scf_ganlab_core::data::make_reference_world(&cfg.world(cfg.seeds[0]))?;
            std::fs::create_dir_all(&cfg.output_dir)?;
            let path = cfg.output_dir.join("world.csv");
            save_csv(&world, &path, &schema, true)?;
            let (pos, neg) = world.class_counts();
            println!(
                "wrote {} records ({pos} defaults, {neg} non-defaults) to {}",
                world.len(),
                path.display()
            );
            Ok(())
        }
        Command::TrainGan { common, data, mode } => {
            let (mut cfg, _) = experiment(&common)?;
            if let Some(m) = mode {
                cfg.gan_mode = config::parse_gan_mode(&m)?;
            }
            let raw = load_csv(&data, &schema)?;
            let train = normalize(&raw)?;
            let stats = train.norm_stats.clone().expect("normalize sets stats");
            let minority = train.minority_subset();
            let features = minority.feature_matrix();
            let mut gan_cfg = cfg.gan.clone();
            if features.rows() < gan_cfg.batch_size {
                gan_cfg.batch_size = features.rows().max(2);
            }
            let mut rng = Prng::with_stream(gan_cfg.seed, 7);
            let model = GanModel::new(features.cols(), cfg.gan_mode, &cfg.architecture, &mut rng);
            let (model, history) = gan::train(&features, &gan_cfg, model)?;
            std::fs::create_dir_all(&cfg.output_dir)?;
            gan::save_model(&model, Some(&stats), &cfg.output_dir.join("gan.json"))?;
            std::fs::write(cfg.output_dir.join("loss_history.csv"), history.to_csv())?;
            let d: Vec<f64> = history.records.iter().map(|r| r.d_loss_train).collect();
            let g: Vec<f64> = history.records.iter().map(|r| r.g_loss_train).collect();
            std::fs::write(
                cfg.output_dir.join("loss_curves.svg"),
                loss_curves_svg(&[("d_loss", d), ("g_loss", g)]),
            )?;
            println!(
                "trained {} epochs ({} critic / {} generator updates); bundle at {}",
                history.records.len(),
                history.critic_updates,
                history.generator_updates,
                cfg.output_dir.join("gan.json").display()
            );
            Ok(())
        }
        Command::Synth { common, model, n } => {
            let (cfg, _) = experiment(&common)?;
            let (gan_model, stats) = gan::load_model_with_stats(&model)?;
            let stats = stats.ok_or_else(|| {
                Error::Bundle("bundle carries no normalization stats; cannot denormalize".into())
            })?;
            let mut rng = Prng::with_stream(cfg.seeds[0], 11);
            let records = generate_records(&gan_model, n, &stats, &schema, &mut rng)?;
            std::fs::create_dir_all(&cfg.output_dir)?;
            let path = cfg.output_dir.join("synthetic.csv");
            save_csv(&Dataset { records, norm_stats: None }, &path, &schema, false)?;
            println!("wrote {n} synthetic records to {}", path.display());
            Ok(())
        }
        Command::TrainClf { common, data, kind } => {
            let (cfg, _) = experiment(&common)?;
            let kind = ClassifierKind::parse(&kind)?;
            let raw = load_csv(&data, &schema)?;
            let train = normalize(&raw)?;
            let mut clf_cfg = cfg
                .classifiers
                .iter()
                .find(|c| c.kind == kind)
                .cloned()
                .unwrap_or_else(|| scf_ganlab_core::ClassifierConfig::new(kind));
            clf_cfg.seed = cfg.seeds[0];
            let clf = train_classifier(&train, &clf_cfg)?;
            std::fs::create_dir_all(&cfg.output_dir)?;
            let path = cfg.output_dir.join(format!("clf_{}.json", kind.as_str()));
            clf.save(&path)?;
            println!(
                "trained {} for {} epochs (final loss {:.6}); bundle at {}",
                kind.display_name(),
                clf.epochs_run,
                clf.final_train_loss,
                path.display()
            );
            Ok(())
        }
        Command::Eval { common, model, data, format } => {
            let (cfg, _) = experiment(&common)?;
            let clf = TrainedClassifier::load(&model)?;
            let stats = clf.norm_stats.clone().ok_or_else(|| {
                Error::Bundle("classifier bundle carries no normalization stats".into())
            })?;
            let raw = load_csv(&data, &schema)?;
            let test = normalize_with(&raw, &stats)?;
            let preds = clf.predict(&test)?;
            let labels = test.labels();
            let (_, mut row) = confusion_and_prf(&labels, &preds.labels, clf.kind.display_name())?;
            let (curve, auc) = roc_and_auc(&labels, &preds.probabilities)?;
            row.auc = Some(auc);
            std::fs::create_dir_all(&cfg.output_dir)?;
            let mut roc_out = String::from("fpr,tpr,threshold\n");
            for ((fpr, tpr), t) in curve.points.iter().zip(&curve.thresholds) {
                roc_out.push_str(&format!("{fpr},{tpr},{t}\n"));
            }
            std::fs::write(cfg.output_dir.join("roc.csv"), roc_out)?;
            std::fs::write(cfg.output_dir.join("roc.svg"), roc_svg(&curve, auc))?;
            println!("{}", render_report(&[row], parse_format(&format))?);
            Ok(())
        }
        Command::Benchmark { common, format, mode } => {
            let (mut cfg, echo) = experiment(&common)?;
            if let Some(m) = mode {
                cfg.gan_mode = config::parse_gan_mode(&m)?;
            }
            pipeline::run_benchmark(&cfg, echo, parse_format(&format))?;
            Ok(())
        }
        Command::Ablate { common } => {
            let (cfg, echo) = experiment(&common)?;
            pipeline::run_ablation(&cfg, echo)?;
            Ok(())
        }
        Command::Gradcheck => {
            let max = gradcheck_suite()?;
            println!("max relative gradient error over suite: {max:.3e}");
            if max >= 1e-4 {
                return Err(Error::Numeric(format!(
                    "gradient check failed: max relative error {max:.3e} >= 1e-4"
                )));
            }
            Ok(())
        }
    }
}

/// The nn finite-difference suite: every layer type plus the composed
/// network shapes, random trials, central differences.
pub fn gradcheck_suite() -> Result<f64> {
    let mut worst = 0.0_f64;
    for trial in 0..20u64 {
        let mut rng = Prng::new(4000 + trial);
        let configs: Vec<(Vec<usize>, Vec<Activation>, bool, f64)> = vec![
            (vec![4, 3], vec![Activation::Tanh], false, 0.0),
            (vec![4, 3], vec![Activation::Sigmoid], false, 0.0),
            (vec![4, 5, 2], vec![Activation::ReLU, Activation::Identity], false, 3.0),
            (vec![3, 6, 4], vec![Activation::Tanh, Activation::Sigmoid], true, 0.0),
            (vec![6, 4, 1], vec![Activation::Sigmoid, Activation::Identity], false, 0.0),
        ];
        for (dims, acts, bn, offset) in configs {
            let mut model = MlpModel::feedforward(&dims, &acts, bn, &mut rng);
            let rows = 6;
            let input = Matrix::from_vec(
                rows,
                dims[0],
                (0..rows * dims[0]).map(|_| rng.normal() * 0.5 + offset).collect(),
            );
            let rel = finite_difference_check(&mut model, &input, &half_sq_norm, 1e-5)?;
            worst = worst.max(rel);
        }
    }
    Ok(worst)
}
