//! Synthetic minority-record generation from a trained generator.

use crate::data::{FirmRecord, IndicatorSchema, Industry, NormStats, NUM_FEATURES};
use crate::error::{Error, Result};
use crate::nn::Mode;
use crate::prng::Prng;

use super::{sample_noise, GanModel};

/// Draw `n` synthetic minority-class records. Numeric features are
/// denormalized through the training statistics; contract status is the
/// generated value rounded to the nearest valid level. Industry is not
/// modeled by the generator and is sampled uniformly.
pub fn generate_records(
    model: &GanModel,
    n: usize,
    norm_stats: &NormStats,
    schema: &IndicatorSchema,
    rng: &mut Prng,
) -> Result<Vec<FirmRecord>> {
    if norm_stats.per_feature.len() != schema.feature_count() {
        return Err(Error::shape(
            format!("norm stats for {} features", schema.feature_count()),
            format!("{}", norm_stats.per_feature.len()),
        ));
    }
    model.check_feature_dim(schema.feature_count() + 1)?;
    if n == 0 {
        return Ok(Vec::new());
    }

    let mut generator = model.generator.clone();
    generator.set_mode(Mode::Infer);
    let noise = sample_noise(&model.noise, n, rng);
    let out = generator.forward(&noise)?;
    out.check_finite("generator output")?;

    let mut records = Vec::with_capacity(n);
    for r in 0..n {
        let mut indicators = Vec::with_capacity(NUM_FEATURES);
        for (c, stat) in norm_stats.per_feature.iter().enumerate() {
            let v = if stat.zero_variance {
                stat.mean
            } else {
                out.get(r, c) * stat.std + stat.mean
            };
            indicators.push(v);
        }
        let raw_status = out.get(r, NUM_FEATURES);
        let contract_status = if raw_status >= 0.5 { 1 } else { 0 };
        let industry = Industry::ALL[rng.below(3)];
        records.push(FirmRecord {
            firm_id: format!("synth-{r:06}"),
            industry,
            indicators,
            contract_status,
            label: 1,
            synthetic: true,
            ground_truth_p: None,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{FeatureStat, NUM_FEATURES};
    use crate::gan::{GanArchitecture, GanMode};

    fn stats() -> NormStats {
        NormStats {
            per_feature: (0..NUM_FEATURES)
                .map(|i| FeatureStat {
                    mean: i as f64,
                    std: 1.0 + i as f64 * 0.1,
                    zero_variance: false,
                })
                .collect(),
        }
    }

    fn model() -> GanModel {
        let mut rng = Prng::new(50);
        GanModel::new(
            NUM_FEATURES + 1,
            GanMode::Wasserstein,
            &GanArchitecture::default(),
            &mut rng,
        )
    }

    #[test]
    fn zero_records() {
        let m = model();
        let mut rng = Prng::new(1);
        let recs =
            generate_records(&m, 0, &stats(), &IndicatorSchema::standard(), &mut rng).unwrap();
        assert!(recs.is_empty());
    }

    #[test]
    fn deterministic_per_seed() {
        let m = model();
        let schema = IndicatorSchema::standard();
        let mut r1 = Prng::new(77);
        let mut r2 = Prng::new(77);
        let a = generate_records(&m, 20, &stats(), &schema, &mut r1).unwrap();
        let b = generate_records(&m, 20, &stats(), &schema, &mut r2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn records_are_minority_and_flagged() {
        let m = model();
        let mut rng = Prng::new(78);
        let recs =
            generate_records(&m, 10, &stats(), &IndicatorSchema::standard(), &mut rng).unwrap();
        assert_eq!(recs.len(), 10);
        for r in &recs {
            assert_eq!(r.label, 1);
            assert!(r.synthetic);
            assert_eq!(r.indicators.len(), NUM_FEATURES);
            assert!(r.contract_status <= 1);
        }
    }

    #[test]
    fn dimension_mismatch_at_bind_time() {
        let mut rng = Prng::new(51);
        let small = GanModel::new(10, GanMode::Wasserstein, &GanArchitecture::default(), &mut rng);
        let mut gen_rng = Prng::new(1);
        let err = generate_records(&small, 5, &stats(), &IndicatorSchema::standard(), &mut gen_rng)
            .unwrap_err();
        assert!(matches!(err, Error::Shape { .. }), "{err}");
    }
}
