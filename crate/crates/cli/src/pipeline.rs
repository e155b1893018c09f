//! The two composite pipelines: `benchmark` (Table-II-shaped report) and
//! `ablate` (augmentation on/off comparison over seeds).

use std::collections::BTreeMap;
use std::collections::HashSet;

use scf_ganlab_core::classifiers::{train_classifier, TrainedClassifier};
use scf_ganlab_core::data::{
    augment, make_reference_world, normalize, normalize_with, save_csv, stratified_split, Dataset,
    FirmRecord, IndicatorSchema, NormStats,
};
use scf_ganlab_core::gan::{self, generate_records, GanModel, LossHistory};
use scf_ganlab_core::metrics::{
    confusion_and_prf, render_report, roc_and_auc, table2_f1_discrepancy_note, MetricsRow,
    ReportFormat,
};
use scf_ganlab_core::metrics::svg::{loss_curves_svg, roc_svg};
use scf_ganlab_core::{Error, Prng, Result};

use crate::config::ExperimentConfig;
use crate::manifest::{Manifest, ManifestBuilder};

fn stage<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{name}: {m}")),
        Error::Data(m) => Error::Data(format!("{name}: {m}")),
        Error::Numeric(m) => Error::Numeric(format!("{name}: {m}")),
        Error::State(m) => Error::State(format!("{name}: {m}")),
        Error::Bundle(m) => Error::Bundle(format!("{name}: {m}")),
        other => other,
    })
}

pub struct BenchmarkResult {
    pub rows: Vec<MetricsRow>,
    /// AUC of the oracle that scores by the world's true default
    /// probability; an upper bound for the trained classifiers.
    pub bayes_auc: f64,
    pub manifest: Manifest,
}

struct PreparedData {
    train_raw: Dataset,
    test_raw: Dataset,
    train: Dataset,
    test: Dataset,
    stats: NormStats,
}

fn prepare(config: &ExperimentConfig, seed: u64) -> Result<(Dataset, PreparedData)> {
    let world_cfg = config.world(seed);
    let world = stage("world", make_reference_world(&world_cfg))?;
    let (train_raw, test_raw) =
        stage("split", stratified_split(&world, config.split_fraction, seed))?;
    let train = stage("normalize", normalize(&train_raw))?;
    let stats = train.norm_stats.clone().expect("normalize sets stats");
    let test = stage("normalize", normalize_with(&test_raw, &stats))?;
    Ok((
        world,
        PreparedData {
            train_raw,
            test_raw,
            train,
            test,
            stats,
        },
    ))
}

/// Train the GAN on the training split's minority (default) records.
fn train_gan_on_minority(
    config: &ExperimentConfig,
    data: &PreparedData,
) -> Result<(GanModel, LossHistory)> {
    let minority = data.train.minority_subset();
    let features = minority.feature_matrix();
    let mut gan_cfg = config.gan.clone();
    // minority splits are small; never ask for more rows than exist
    if features.rows() < gan_cfg.batch_size {
        gan_cfg.batch_size = features.rows().max(2);
    }
    let mut rng = Prng::with_stream(gan_cfg.seed, 7);
    let model = GanModel::new(
        features.cols(),
        config.gan_mode,
        &config.architecture,
        &mut rng,
    );
    stage("train-gan", gan::train(&features, &gan_cfg, model))
}

/// Synthesize exactly the records the augmentation target calls for.
fn synthesize(
    config: &ExperimentConfig,
    model: &GanModel,
    data: &PreparedData,
    schema: &IndicatorSchema,
    seed: u64,
) -> Result<Vec<FirmRecord>> {
    let (minority, majority) = {
        let (pos, neg) = data.train.class_counts();
        (pos.min(neg), pos.max(neg))
    };
    let target = (config.augment_target_ratio * majority as f64).ceil() as usize;
    let needed = target.saturating_sub(minority);
    let mut rng = Prng::with_stream(seed, 11);
    stage(
        "synth",
        generate_records(model, needed, &data.stats, schema, &mut rng),
    )
}

/// Raw train plus synthetic records, renormalized through the raw-train
/// statistics so both arms and the test set share one feature space.
fn augmented_train(
    config: &ExperimentConfig,
    data: &PreparedData,
    synthetic: &[FirmRecord],
) -> Result<Dataset> {
    let outcome = stage(
        "augment",
        augment(&data.train_raw, synthetic, config.augment_target_ratio),
    )?;
    if outcome.shortfall > 0 {
        eprintln!(
            "warning: augmentation short by {} synthetic records",
            outcome.shortfall
        );
    }
    stage("normalize", normalize_with(&outcome.dataset, &data.stats))
}

fn evaluate(
    clf: &TrainedClassifier,
    test: &Dataset,
    name: &str,
) -> Result<(MetricsRow, scf_ganlab_core::RocCurve, f64)> {
    let preds = clf.predict(test)?;
    let labels = test.labels();
    let (_, mut row) = confusion_and_prf(&labels, &preds.labels, name)?;
    let (curve, auc) = roc_and_auc(&labels, &preds.probabilities)?;
    row.auc = Some(auc);
    Ok((row, curve, auc))
}

fn roc_csv(curve: &scf_ganlab_core::RocCurve) -> String {
    let mut out = String::from("fpr,tpr,threshold\n");
    for ((fpr, tpr), t) in curve.points.iter().zip(&curve.thresholds) {
        out.push_str(&format!("{fpr},{tpr},{t}\n"));
    }
    out
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect()
}

pub fn run_benchmark(
    config: &ExperimentConfig,
    config_echo: BTreeMap<String, String>,
    format: ReportFormat,
) -> Result<BenchmarkResult> {
    config.validate()?;
    let seed = config.seeds[0];
    let schema = IndicatorSchema::standard();
    let mut manifest = ManifestBuilder::new(&config.output_dir, config_echo);
    std::fs::create_dir_all(manifest.root())?;

    let (world, data) = prepare(config, seed)?;
    save_csv(&world, &manifest.root().join("world.csv"), &schema, true)?;
    manifest.record_existing("world.csv")?;
    save_csv(&data.train_raw, &manifest.root().join("train.csv"), &schema, false)?;
    manifest.record_existing("train.csv")?;
    // the test split stays untouched by synthesis and augmentation
    let test_raw_ids: HashSet<String> = data.test.records.iter().map(|r| r.firm_id.clone()).collect();
    save_csv(&data.test_raw, &manifest.root().join("test.csv"), &schema, false)?;
    manifest.record_existing("test.csv")?;

    let (gan_model, history) = train_gan_on_minority(config, &data)?;
    gan::save_model(&gan_model, Some(&data.stats), &manifest.root().join("gan.json"))?;
    manifest.record_existing("gan.json")?;
    manifest.write("loss_history.csv", history.to_csv().as_bytes())?;
    let d_losses: Vec<f64> = history.records.iter().map(|r| r.d_loss_train).collect();
    let g_losses: Vec<f64> = history.records.iter().map(|r| r.g_loss_train).collect();
    manifest.write(
        "loss_curves.svg",
        loss_curves_svg(&[("d_loss", d_losses), ("g_loss", g_losses)]).as_bytes(),
    )?;

    let synthetic = synthesize(config, &gan_model, &data, &schema, seed)?;
    let synth_ds = Dataset { records: synthetic.clone(), norm_stats: None };
    save_csv(&synth_ds, &manifest.root().join("synthetic.csv"), &schema, false)?;
    manifest.record_existing("synthetic.csv")?;
    let augmented = augmented_train(config, &data, &synthetic)?;

    // test-split isolation: nothing synthetic, nothing from the test ids,
    // may appear in the other role
    if data.test.records.iter().any(|r| r.synthetic) {
        return Err(Error::State("test split contains synthetic records".into()));
    }
    if augmented
        .records
        .iter()
        .any(|r| !r.synthetic && test_raw_ids.contains(&r.firm_id))
    {
        return Err(Error::State("test record leaked into a training arm".into()));
    }

    let mut rows = Vec::new();
    for clf_config in &config.classifiers {
        let mut cfg = clf_config.clone();
        cfg.seed = seed.wrapping_mul(1000).wrapping_add(cfg.kind as u64);
        let name = cfg.kind.display_name().to_string();

        let clf = stage("train-clf", train_classifier(&data.train, &cfg))?;
        let bundle_rel = format!("clf_{}.json", sanitize(&name));
        clf.save(&manifest.root().join(&bundle_rel))?;
        manifest.record_existing(&bundle_rel)?;
        let (row, curve, auc) = stage("eval", evaluate(&clf, &data.test, &name))?;
        manifest.write(&format!("roc_{}.csv", sanitize(&name)), roc_csv(&curve).as_bytes())?;
        manifest.write(
            &format!("roc_{}.svg", sanitize(&name)),
            roc_svg(&curve, auc).as_bytes(),
        )?;
        rows.push(row);

        let aug_name = format!("{name} +GAN");
        let clf_aug = stage("train-clf", train_classifier(&augmented, &cfg))?;
        let bundle_rel = format!("clf_{}.json", sanitize(&aug_name));
        clf_aug.save(&manifest.root().join(&bundle_rel))?;
        manifest.record_existing(&bundle_rel)?;
        let (row, curve, auc) = stage("eval", evaluate(&clf_aug, &data.test, &aug_name))?;
        manifest.write(&format!("roc_{}.csv", sanitize(&aug_name)), roc_csv(&curve).as_bytes())?;
        manifest.write(
            &format!("roc_{}.svg", sanitize(&aug_name)),
            roc_svg(&curve, auc).as_bytes(),
        )?;
        rows.push(row);
    }

    // Bayes oracle: score the test split by its true default probability
    let bayes_scores: Vec<f64> = data
        .test
        .records
        .iter()
        .map(|r| r.ground_truth_p.unwrap_or(0.5))
        .collect();
    let (_, bayes_auc) = roc_and_auc(&data.test.labels(), &bayes_scores)?;

    manifest.write("report.csv", render_report(&rows, ReportFormat::Csv)?.as_bytes())?;
    let mut md = render_report(&rows, ReportFormat::Markdown)?;
    md.push('\n');
    md.push_str(&table2_f1_discrepancy_note());
    md.push('\n');
    md.push_str(&format!("\nBayes-oracle AUC on this world: {bayes_auc:.4}\n"));
    manifest.write("report.md", md.as_bytes())?;

    let rendered = render_report(&rows, format)?;
    println!("{rendered}");
    let manifest = manifest.finish()?;
    Ok(BenchmarkResult {
        rows,
        bayes_auc,
        manifest,
    })
}

#[derive(Debug, Clone)]
pub struct SeedOutcome {
    pub seed: u64,
    pub with_augmentation: MetricsRow,
    pub without_augmentation: MetricsRow,
}

#[derive(Debug, Clone)]
pub struct AblationResult {
    pub per_seed: Vec<SeedOutcome>,
    /// (metric name, median with, median without, median delta)
    pub medians: Vec<(String, f64, f64, f64)>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn run_ablation(
    config: &ExperimentConfig,
    config_echo: BTreeMap<String, String>,
) -> Result<AblationResult> {
    config.validate()?;
    if config.seeds.len() < 3 {
        eprintln!(
            "warning: {} seed(s) configured; medians need at least 3 to be meaningful",
            config.seeds.len()
        );
    }
    let mlp = config
        .classifiers
        .iter()
        .find(|c| c.kind == scf_ganlab_core::ClassifierKind::MlpBp)
        .ok_or_else(|| Error::Config("ablation requires the mlp_bp classifier".into()))?;
    let schema = IndicatorSchema::standard();
    let mut manifest = ManifestBuilder::new(&config.output_dir, config_echo);
    std::fs::create_dir_all(manifest.root())?;

    let mut per_seed = Vec::new();
    for &seed in &config.seeds {
        let mut run_cfg = config.clone();
        run_cfg.gan.seed = seed.wrapping_mul(2).wrapping_add(1);
        let (_, data) = prepare(&run_cfg, seed)?;
        let (gan_model, _) = train_gan_on_minority(&run_cfg, &data)?;
        let synthetic = synthesize(&run_cfg, &gan_model, &data, &schema, seed)?;
        let augmented = augmented_train(&run_cfg, &data, &synthetic)?;

        let mut cfg = mlp.clone();
        cfg.seed = seed.wrapping_mul(1000).wrapping_add(cfg.kind as u64);
        let without = stage("train-clf", train_classifier(&data.train, &cfg))?;
        let with = stage("train-clf", train_classifier(&augmented, &cfg))?;
        // both arms score the identical, untouched test split
        let (row_without, _, _) = stage("eval", evaluate(&without, &data.test, "MLP-BP"))?;
        let (row_with, _, _) = stage("eval", evaluate(&with, &data.test, "MLP-BP +GAN"))?;
        per_seed.push(SeedOutcome {
            seed,
            with_augmentation: row_with,
            without_augmentation: row_without,
        });
    }

    let metric = |f: fn(&MetricsRow) -> f64, name: &str| -> (String, f64, f64, f64) {
        let with: Vec<f64> = per_seed.iter().map(|s| f(&s.with_augmentation)).collect();
        let without: Vec<f64> = per_seed.iter().map(|s| f(&s.without_augmentation)).collect();
        let deltas: Vec<f64> = with.iter().zip(&without).map(|(a, b)| a - b).collect();
        (name.to_string(), median(with), median(without), median(deltas))
    };
    let medians = vec![
        metric(|r| r.accuracy, "accuracy"),
        metric(|r| r.recall, "recall"),
        metric(|r| r.precision, "precision"),
        metric(|r| r.f1, "f1"),
        metric(|r| r.auc.unwrap_or(0.0), "auc"),
    ];

    let mut out = String::from("metric,median_with_gan,median_without_gan,median_delta\n");
    for (name, w, wo, d) in &medians {
        out.push_str(&format!("{name},{w},{wo},{d}\n"));
    }
    manifest.write("ablation.csv", out.as_bytes())?;

    let mut md = String::from("# Ablation: MLP-BP with vs without GAN augmentation\n\n");
    md.push_str("| Metric | With +GAN | Without | Delta |\n|---|---|---|---|\n");
    for (name, w, wo, d) in &medians {
        md.push_str(&format!("| {name} | {w:.4} | {wo:.4} | {d:+.4} |\n"));
    }
    md.push_str(
        "\nReference context (not asserted): the source experiment reports that removing \
         GAN-generated data drops model performance by approximately 5%.\n",
    );
    manifest.write("ablation.md", md.as_bytes())?;
    manifest.finish()?;

    println!("{md}");
    Ok(AblationResult { per_seed, medians })
}
