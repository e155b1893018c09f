//! Baseline credit-risk classifiers: logistic regression, linear SVM
//! (hinge loss via subgradient descent) and a feedforward MLP trained by
//! backpropagation. All share the Adam optimizer and the deterministic
//! seeding contract.

use std::path::Path;

use crate::data::{Dataset, NormStats, FEATURE_COLS};
use crate::error::{Error, Result};
use crate::gan::bundle::{
    norm_stats_from_tuples, norm_stats_to_tuples, read_bundle, write_bundle, BundlePayload,
    NetworkPayload, BUNDLE_MAGIC, FORMAT_VERSION,
};
use crate::matrix::Matrix;
use crate::nn::{adam_step, AdamState, Activation, Mode, MlpModel};
use crate::prng::Prng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierKind {
    LogReg,
    LinearSvm,
    MlpBp,
}

impl ClassifierKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassifierKind::LogReg => "logreg",
            ClassifierKind::LinearSvm => "linear_svm",
            ClassifierKind::MlpBp => "mlp_bp",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "logreg" => Ok(ClassifierKind::LogReg),
            "linear_svm" => Ok(ClassifierKind::LinearSvm),
            "mlp_bp" => Ok(ClassifierKind::MlpBp),
            other => Err(Error::Config(format!("unknown classifier kind: {other:?}"))),
        }
    }

    pub fn display_name(&self) -> &'static str {
        match self {
            ClassifierKind::LogReg => "LogReg",
            ClassifierKind::LinearSvm => "LinearSVM",
            ClassifierKind::MlpBp => "MLP-BP",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassifierConfig {
    pub kind: ClassifierKind,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    /// Hidden layer widths, MlpBp only.
    pub hidden_dims: Vec<usize>,
    pub l2: f64,
    pub seed: u64,
    pub threshold: f64,
}

impl ClassifierConfig {
    pub fn new(kind: ClassifierKind) -> Self {
        ClassifierConfig {
            kind,
            epochs: 200,
            batch_size: 64,
            lr: 0.01,
            hidden_dims: vec![32, 16],
            l2: 1e-4,
            seed: 0,
            threshold: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs < 1 {
            return Err(Error::Config("epochs must be >= 1".into()));
        }
        if self.lr <= 0.0 {
            return Err(Error::Config(format!("lr must be > 0, got {}", self.lr)));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::Config(format!(
                "threshold must be in (0,1), got {}",
                self.threshold
            )));
        }
        if self.l2 < 0.0 {
            return Err(Error::Config("l2 must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainedClassifier {
    pub kind: ClassifierKind,
    pub model: MlpModel,
    pub norm_stats: Option<NormStats>,
    pub threshold: f64,
    pub epochs_run: usize,
    pub final_train_loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Predictions {
    /// Probabilities for LogReg/MlpBp; logistic-squashed margins for the
    /// linear SVM (ranking-preserving, for ROC use).
    pub probabilities: Vec<f64>,
    /// Raw margins (LinearSvm) or probabilities (others).
    pub scores: Vec<f64>,
    pub labels: Vec<u8>,
}

fn build_network(config: &ClassifierConfig, input_dim: usize, rng: &mut Prng) -> MlpModel {
    match config.kind {
        ClassifierKind::LogReg => MlpModel::feedforward(
            &[input_dim, 1],
            &[Activation::Sigmoid],
            false,
            rng,
        ),
        ClassifierKind::LinearSvm => MlpModel::feedforward(
            &[input_dim, 1],
            &[Activation::Identity],
            false,
            rng,
        ),
        ClassifierKind::MlpBp => {
            let mut dims = vec![input_dim];
            dims.extend(&config.hidden_dims);
            dims.push(1);
            let mut acts = vec![Activation::ReLU; config.hidden_dims.len()];
            acts.push(Activation::Sigmoid);
            MlpModel::feedforward(&dims, &acts, false, rng)
        }
    }
}

pub fn train_classifier(train: &Dataset, config: &ClassifierConfig) -> Result<TrainedClassifier> {
    config.validate()?;
    if train.norm_stats.is_none() {
        return Err(Error::State(
            "classifier training requires a normalized dataset".into(),
        ));
    }
    let (pos, neg) = train.class_counts();
    if pos == 0 || neg == 0 {
        match config.kind {
            ClassifierKind::MlpBp => {
                eprintln!("warning: training MLP on single-class data");
            }
            _ => {
                return Err(Error::Data(format!(
                    "{} requires both classes; got {pos} positive / {neg} negative",
                    config.kind.as_str()
                )))
            }
        }
    }

    let features = train.feature_matrix();
    let labels = train.labels();
    let n = features.rows();
    let mut rng = Prng::with_stream(config.seed, 100);
    let mut model = build_network(config, features.cols(), &mut rng);
    let mut opt = AdamState::new(model.param_count(), config.lr);

    let batch_size = config.batch_size.min(n).max(1);
    let mut order: Vec<usize> = (0..n).collect();
    let mut final_loss = 0.0;

    for _epoch in 0..config.epochs {
        rng.shuffle(&mut order);
        let n_batches = (n + batch_size - 1) / batch_size;
        let mut epoch_loss = 0.0;
        for b in 0..n_batches {
            let idx = &order[b * batch_size..((b + 1) * batch_size).min(n)];
            let x = features.select_rows(idx);
            let y: Vec<f64> = idx.iter().map(|&i| labels[i] as f64).collect();
            let m = idx.len() as f64;

            let (out, caches) = model.forward_cached(&x)?;
            let mut upstream = Matrix::zeros(idx.len(), 1);
            let mut loss = 0.0;
            match config.kind {
                ClassifierKind::LogReg | ClassifierKind::MlpBp => {
                    for r in 0..idx.len() {
                        let p = out.get(r, 0).clamp(1e-12, 1.0 - 1e-12);
                        loss -= (y[r] * p.ln() + (1.0 - y[r]) * (1.0 - p).ln()) / m;
                        upstream.set(r, 0, (-(y[r] / p) + (1.0 - y[r]) / (1.0 - p)) / m);
                    }
                }
                ClassifierKind::LinearSvm => {
                    // hinge max(0, 1 - y*s) with labels mapped to +/-1
                    for r in 0..idx.len() {
                        let yy = 2.0 * y[r] - 1.0;
                        let s = out.get(r, 0);
                        let margin = 1.0 - yy * s;
                        if margin > 0.0 {
                            loss += margin / m;
                            upstream.set(r, 0, -yy / m);
                        }
                    }
                }
            }
            epoch_loss += loss;

            let (_, mut grads) = model.backward(&caches, &upstream)?;
            let mut params = model.params_flat();
            if config.l2 > 0.0 {
                for (g, p) in grads.iter_mut().zip(&params) {
                    *g += config.l2 * p;
                }
            }
            adam_step(&mut params, &grads, &mut opt)?;
            model.set_params_flat(&params)?;
        }
        final_loss = epoch_loss / ((n + batch_size - 1) / batch_size) as f64;
    }

    Ok(TrainedClassifier {
        kind: config.kind,
        model,
        norm_stats: train.norm_stats.clone(),
        threshold: config.threshold,
        epochs_run: config.epochs,
        final_train_loss: final_loss,
    })
}

impl TrainedClassifier {
    /// Scores and thresholded labels for a normalized dataset.
    /// Label = 1 iff score >= threshold (ties go positive); the SVM
    /// thresholds raw margins at 0.
    pub fn predict(&self, records: &Dataset) -> Result<Predictions> {
        if records.norm_stats.is_none() {
            return Err(Error::State(
                "prediction requires a normalized dataset".into(),
            ));
        }
        if records.is_empty() {
            return Ok(Predictions {
                probabilities: Vec::new(),
                scores: Vec::new(),
                labels: Vec::new(),
            });
        }
        let features = records.feature_matrix();
        if features.cols() != FEATURE_COLS {
            return Err(Error::shape(
                format!("{FEATURE_COLS} feature columns"),
                features.shape_str(),
            ));
        }
        let mut model = self.model.clone();
        model.set_mode(Mode::Infer);
        let out = model.forward(&features)?;
        let raw: Vec<f64> = (0..out.rows()).map(|r| out.get(r, 0)).collect();
        let (probabilities, labels): (Vec<f64>, Vec<u8>) = match self.kind {
            ClassifierKind::LinearSvm => {
                let probs: Vec<f64> = raw.iter().map(|&s| crate::nn::sigmoid(s)).collect();
                let labels = raw.iter().map(|&s| u8::from(s >= 0.0)).collect();
                (probs, labels)
            }
            _ => {
                let labels = raw.iter().map(|&p| u8::from(p >= self.threshold)).collect();
                (raw.clone(), labels)
            }
        };
        Ok(Predictions {
            probabilities,
            scores: raw,
            labels,
        })
    }

    /// Persist as a model bundle with classifier kind and threshold.
    pub fn save(&self, path: &Path) -> Result<()> {
        let payload = BundlePayload {
            magic: BUNDLE_MAGIC.into(),
            format_version: FORMAT_VERSION,
            kind: self.kind.as_str().into(),
            mode: None,
            noise_spec: None,
            threshold: Some(self.threshold),
            norm_stats: self.norm_stats.as_ref().map(norm_stats_to_tuples),
            networks: vec![NetworkPayload::from_model("classifier", &self.model)],
        };
        write_bundle(&payload, path)
    }

    pub fn load(path: &Path) -> Result<TrainedClassifier> {
        let payload = read_bundle(path)?;
        let kind = ClassifierKind::parse(&payload.kind)
            .map_err(|_| Error::Bundle(format!("not a classifier bundle: kind {:?}", payload.kind)))?;
        let network = payload
            .networks
            .iter()
            .find(|n| n.name == "classifier")
            .ok_or_else(|| Error::Bundle("classifier bundle missing network".into()))?;
        Ok(TrainedClassifier {
            kind,
            model: network.to_model()?,
            norm_stats: payload.norm_stats.as_deref().map(norm_stats_from_tuples),
            threshold: payload.threshold.unwrap_or(0.5),
            epochs_run: 0,
            final_train_loss: f64::NAN,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{normalize, Dataset, FirmRecord, Industry, NUM_FEATURES};

    fn record_with_x(id: &str, x: f64, label: u8) -> FirmRecord {
        let mut indicators = vec![0.0; NUM_FEATURES];
        indicators[0] = x;
        // small per-record variation so no feature has zero variance
        for (i, v) in indicators.iter_mut().enumerate().skip(1) {
            *v = (id.len() as f64 + i as f64) * 0.01 + x * 0.001;
        }
        FirmRecord {
            firm_id: id.to_string(),
            industry: Industry::Steel,
            indicators,
            contract_status: 1,
            label,
            synthetic: false,
            ground_truth_p: None,
        }
    }

    /// 1-D separable data: x < 0 -> 0, x > 0 -> 1, margin 1.
    fn separable_dataset(n_per_class: usize) -> Dataset {
        let mut records = Vec::new();
        for i in 0..n_per_class {
            records.push(record_with_x(&format!("neg{i}"), -1.0 - i as f64 * 0.1, 0));
            records.push(record_with_x(&format!("pos{i:02}"), 1.0 + i as f64 * 0.1, 1));
        }
        normalize(&Dataset::new(records).unwrap()).unwrap()
    }

    // Separability oracle: a hand-picked threshold on x reaches accuracy
    // 1.0, so a trained linear model must too.
    #[test]
    fn separable_data_reaches_full_accuracy() {
        let ds = separable_dataset(20);
        for kind in [
            ClassifierKind::LogReg,
            ClassifierKind::LinearSvm,
            ClassifierKind::MlpBp,
        ] {
            let mut config = ClassifierConfig::new(kind);
            config.epochs = 200;
            config.seed = 3;
            let trained = train_classifier(&ds, &config).unwrap();
            let preds = trained.predict(&ds).unwrap();
            let correct = preds
                .labels
                .iter()
                .zip(ds.labels())
                .filter(|(&p, y)| p == *y)
                .count();
            assert_eq!(correct, ds.len(), "{:?} not separable", kind);
        }
    }

    #[test]
    fn zero_initialized_logreg_predicts_half() {
        let ds = separable_dataset(5);
        let mut config = ClassifierConfig::new(ClassifierKind::LogReg);
        config.epochs = 1;
        let mut trained = train_classifier(&ds, &config).unwrap();
        // zero all parameters: logits vanish, probabilities are exactly 0.5
        trained
            .model
            .set_params_flat(&vec![0.0; trained.model.param_count()])
            .unwrap();
        let preds = trained.predict(&ds).unwrap();
        assert!(preds.probabilities.iter().all(|&p| p == 0.5));
        // threshold semantics: 0.5 >= 0.5 -> positive
        assert!(preds.labels.iter().all(|&l| l == 1));
    }

    #[test]
    fn single_class_rejected_for_linear_models() {
        let records: Vec<FirmRecord> = (0..10)
            .map(|i| record_with_x(&format!("r{i}"), i as f64, 0))
            .collect();
        let ds = normalize(&Dataset::new(records).unwrap()).unwrap();
        for kind in [ClassifierKind::LogReg, ClassifierKind::LinearSvm] {
            let config = ClassifierConfig::new(kind);
            assert!(train_classifier(&ds, &config).is_err());
        }
    }

    #[test]
    fn svm_margin_zero_is_positive() {
        let ds = separable_dataset(5);
        let mut config = ClassifierConfig::new(ClassifierKind::LinearSvm);
        config.epochs = 1;
        let mut trained = train_classifier(&ds, &config).unwrap();
        trained
            .model
            .set_params_flat(&vec![0.0; trained.model.param_count()])
            .unwrap();
        let preds = trained.predict(&ds).unwrap();
        assert!(preds.scores.iter().all(|&s| s == 0.0));
        assert!(preds.labels.iter().all(|&l| l == 1));
    }

    #[test]
    fn empty_prediction_set() {
        let ds = separable_dataset(5);
        let config = ClassifierConfig::new(ClassifierKind::LogReg);
        let trained = train_classifier(&ds, &config).unwrap();
        let empty = Dataset {
            records: Vec::new(),
            norm_stats: ds.norm_stats.clone(),
        };
        let preds = trained.predict(&empty).unwrap();
        assert!(preds.labels.is_empty() && preds.probabilities.is_empty());
    }

    #[test]
    fn deterministic_training() {
        let ds = separable_dataset(10);
        let mut config = ClassifierConfig::new(ClassifierKind::MlpBp);
        config.epochs = 20;
        config.seed = 9;
        let a = train_classifier(&ds, &config).unwrap();
        let b = train_classifier(&ds, &config).unwrap();
        assert_eq!(a.model.params_flat(), b.model.params_flat());
    }

    #[test]
    fn permutation_invariance_of_predictions() {
        let ds = separable_dataset(10);
        let config = ClassifierConfig::new(ClassifierKind::LogReg);
        let trained = train_classifier(&ds, &config).unwrap();
        let preds = trained.predict(&ds).unwrap();
        let mut reversed = ds.clone();
        reversed.records.reverse();
        let preds_rev = trained.predict(&reversed).unwrap();
        let n = ds.len();
        for i in 0..n {
            assert_eq!(preds.labels[i], preds_rev.labels[n - 1 - i]);
            assert_eq!(preds.scores[i], preds_rev.scores[n - 1 - i]);
        }
    }

    #[test]
    fn logreg_monotone_in_single_feature() {
        // only the first feature varies, so probabilities must be monotone
        // in it once training has picked its sign
        let mut records = Vec::new();
        for i in 0..15 {
            let mut neg = record_with_x(&format!("neg{i}"), -1.0 - i as f64 * 0.1, 0);
            let mut pos = record_with_x(&format!("pos{i:02}"), 1.0 + i as f64 * 0.1, 1);
            for v in neg.indicators.iter_mut().skip(1) {
                *v = 0.0;
            }
            for v in pos.indicators.iter_mut().skip(1) {
                *v = 0.0;
            }
            records.push(neg);
            records.push(pos);
        }
        let ds = normalize(&Dataset::new(records).unwrap()).unwrap();
        let mut config = ClassifierConfig::new(ClassifierKind::LogReg);
        config.epochs = 100;
        let trained = train_classifier(&ds, &config).unwrap();
        // sort records by the first feature; probabilities must follow
        let mut sorted = ds.clone();
        sorted
            .records
            .sort_by(|a, b| a.indicators[0].partial_cmp(&b.indicators[0]).unwrap());
        let preds = trained.predict(&sorted).unwrap();
        for w in preds.probabilities.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "{} then {}", w[0], w[1]);
        }
    }

    #[test]
    fn bundle_roundtrip() {
        let ds = separable_dataset(5);
        let mut config = ClassifierConfig::new(ClassifierKind::MlpBp);
        config.epochs = 5;
        let trained = train_classifier(&ds, &config).unwrap();
        let dir = std::env::temp_dir().join("scf-ganlab-clf-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("clf.json");
        trained.save(&path).unwrap();
        let loaded = TrainedClassifier::load(&path).unwrap();
        assert_eq!(loaded.kind, trained.kind);
        assert_eq!(loaded.threshold, trained.threshold);
        assert_eq!(loaded.model.params_flat(), trained.model.params_flat());
        let a = trained.predict(&ds).unwrap();
        let b = loaded.predict(&ds).unwrap();
        assert_eq!(a, b);
    }
}
