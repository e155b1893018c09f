//! Model persistence: a single JSON bundle with a magic string, format
//! version, layer specs, losslessly serialized weights (shortest
//! round-trip decimals, which is serde_json's default float form) and a
//! SHA-256 checksum over the payload. The same container carries trained
//! classifiers, which add `kind`, `threshold` and normalization stats.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{FeatureStat, NormStats};
use crate::error::{Error, Result};
use crate::nn::{LayerSpec, MlpModel};

use super::{GanMode, GanModel, NoiseSpec};

pub const BUNDLE_MAGIC: &str = "scf-ganlab-bundle";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkPayload {
    pub name: String,
    pub layer_specs: Vec<LayerSpec>,
    pub weights: Vec<f64>,
    pub running_stats: Vec<f64>,
}

impl NetworkPayload {
    pub fn from_model(name: &str, model: &MlpModel) -> Self {
        NetworkPayload {
            name: name.to_string(),
            layer_specs: model.layer_specs(),
            weights: model.params_flat(),
            running_stats: model.running_stats_flat(),
        }
    }

    pub fn to_model(&self) -> Result<MlpModel> {
        let mut model = MlpModel::from_specs(&self.layer_specs);
        model.set_params_flat(&self.weights)?;
        model.set_running_stats_flat(&self.running_stats)?;
        Ok(model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundlePayload {
    pub magic: String,
    pub format_version: u32,
    /// "gan" or a classifier kind.
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<GanMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_spec: Option<NoiseSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// (mean, std, zero_variance) per feature, for classifier bundles.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_stats: Option<Vec<(f64, f64, bool)>>,
    pub networks: Vec<NetworkPayload>,
}

#[derive(Serialize, Deserialize)]
struct BundleFile {
    #[serde(flatten)]
    payload: BundlePayload,
    checksum: String,
}

fn payload_checksum(payload: &BundlePayload) -> String {
    let canonical = serde_json::to_string(payload).expect("payload serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_bundle(payload: &BundlePayload, path: &Path) -> Result<()> {
    let file = BundleFile {
        checksum: payload_checksum(payload),
        payload: payload.clone(),
    };
    let json = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::Bundle(format!("serialization failed: {e}")))?;
    std::fs::write(path, json)?;
    Ok(())
}

pub fn read_bundle(path: &Path) -> Result<BundlePayload> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Bundle(format!("truncated or malformed bundle: {e}")))?;
    match value.get("magic").and_then(|m| m.as_str()) {
        Some(BUNDLE_MAGIC) => {}
        _ => return Err(Error::Bundle("not a model bundle".into())),
    }
    let version = value.get("format_version").and_then(|v| v.as_u64());
    if version != Some(FORMAT_VERSION as u64) {
        return Err(Error::Bundle(format!(
            "format_version mismatch: expected {FORMAT_VERSION}, got {version:?}"
        )));
    }
    let file: BundleFile = serde_json::from_str(&text)
        .map_err(|e| Error::Bundle(format!("truncated or malformed bundle: {e}")))?;
    let expected = payload_checksum(&file.payload);
    if expected != file.checksum {
        return Err(Error::Bundle(format!(
            "checksum failure: expected {expected}, found {}",
            file.checksum
        )));
    }
    Ok(file.payload)
}

/// Norm stats are optional: a bundle trained on pre-normalized data can
/// carry the statistics needed to denormalize synthesized records.
pub fn save_model(model: &GanModel, norm_stats: Option<&NormStats>, path: &Path) -> Result<()> {
    let payload = BundlePayload {
        magic: BUNDLE_MAGIC.into(),
        format_version: FORMAT_VERSION,
        kind: "gan".into(),
        mode: Some(model.mode),
        noise_spec: Some(model.noise),
        threshold: None,
        norm_stats: norm_stats.map(norm_stats_to_tuples),
        networks: vec![
            NetworkPayload::from_model("generator", &model.generator),
            NetworkPayload::from_model("critic", &model.critic),
        ],
    };
    write_bundle(&payload, path)
}

pub fn load_model(path: &Path) -> Result<GanModel> {
    load_model_with_stats(path).map(|(m, _)| m)
}

pub fn load_model_with_stats(path: &Path) -> Result<(GanModel, Option<NormStats>)> {
    let payload = read_bundle(path)?;
    if payload.kind != "gan" {
        return Err(Error::Bundle(format!(
            "expected a gan bundle, found kind {:?}",
            payload.kind
        )));
    }
    let mode = payload
        .mode
        .ok_or_else(|| Error::Bundle("gan bundle missing mode".into()))?;
    let noise = payload
        .noise_spec
        .ok_or_else(|| Error::Bundle("gan bundle missing noise_spec".into()))?;
    let find = |name: &str| -> Result<MlpModel> {
        payload
            .networks
            .iter()
            .find(|n| n.name == name)
            .ok_or_else(|| Error::Bundle(format!("gan bundle missing network {name:?}")))?
            .to_model()
    };
    Ok((
        GanModel {
            generator: find("generator")?,
            critic: find("critic")?,
            mode,
            noise,
        },
        payload.norm_stats.as_deref().map(norm_stats_from_tuples),
    ))
}

pub fn norm_stats_to_tuples(stats: &NormStats) -> Vec<(f64, f64, bool)> {
    stats
        .per_feature
        .iter()
        .map(|s| (s.mean, s.std, s.zero_variance))
        .collect()
}

pub fn norm_stats_from_tuples(tuples: &[(f64, f64, bool)]) -> NormStats {
    NormStats {
        per_feature: tuples
            .iter()
            .map(|&(mean, std, zero_variance)| FeatureStat {
                mean,
                std,
                zero_variance,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gan::GanArchitecture;
    use crate::prng::Prng;

    fn tmpfile(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("scf-ganlab-bundle-tests");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    fn model(feature_dim: usize) -> GanModel {
        let mut rng = Prng::new(90);
        GanModel::new(
            feature_dim,
            GanMode::Wasserstein,
            &GanArchitecture::default(),
            &mut rng,
        )
    }

    #[test]
    fn roundtrip_bit_exact() {
        let m = model(16);
        let path = tmpfile("roundtrip.json");
        save_model(&m, None, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(loaded.mode, m.mode);
        assert_eq!(loaded.noise, m.noise);
        let a = m.generator.params_flat();
        let b = loaded.generator.params_flat();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        for (x, y) in m
            .critic
            .running_stats_flat()
            .iter()
            .zip(&loaded.critic.running_stats_flat())
        {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn wrong_magic_is_not_a_bundle() {
        let path = tmpfile("magic.json");
        std::fs::write(&path, r#"{"magic":"something-else","format_version":1}"#).unwrap();
        let err = load_model(&path).unwrap_err();
        assert!(err.to_string().contains("not a model bundle"), "{err}");
    }

    #[test]
    fn version_mismatch_distinct_error() {
        let m = model(16);
        let path = tmpfile("version.json");
        save_model(&m, None, &path).unwrap();
        let text = std::fs::read_to_string(&path)
            .unwrap()
            .replace("\"format_version\": 1", "\"format_version\": 99");
        std::fs::write(&path, text).unwrap();
        let err = load_model(&path).unwrap_err();
        assert!(err.to_string().contains("format_version mismatch"), "{err}");
    }

    #[test]
    fn truncated_file_distinct_error() {
        let m = model(16);
        let path = tmpfile("truncated.json");
        save_model(&m, None, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, &text[..text.len() / 2]).unwrap();
        let err = load_model(&path).unwrap_err();
        assert!(err.to_string().contains("truncated or malformed"), "{err}");
    }

    #[test]
    fn checksum_failure_detected() {
        let m = model(16);
        let path = tmpfile("checksum.json");
        save_model(&m, None, &path).unwrap();
        // perturb one weight without touching the stored checksum
        let text = std::fs::read_to_string(&path).unwrap();
        let idx = text.find("\"weights\": [").unwrap() + "\"weights\": [".len();
        let mut edited = text.clone();
        edited.insert_str(idx, "\n      1234.5,");
        std::fs::write(&path, edited).unwrap();
        let err = load_model(&path).unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("checksum failure") || msg.contains("truncated"),
            "{msg}"
        );
    }

    #[test]
    fn dim_mismatch_detected_at_bind() {
        let m = model(16);
        let path = tmpfile("bind.json");
        save_model(&m, None, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        assert!(loaded.check_feature_dim(10).is_err());
        assert!(loaded.check_feature_dim(16).is_ok());
    }
}

