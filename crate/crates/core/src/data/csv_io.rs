//! CSV ingestion and export.
//!
//! UTF-8, header row, decimal point `.`, no thousands separators. Columns
//! are located by header name, not position. Export adds `ground_truth_p`
//! only when requested.

use std::path::Path;

use crate::error::{Error, Result};

use super::{Dataset, FirmRecord, IndicatorSchema, Industry};

pub fn load_csv(path: &Path, schema: &IndicatorSchema) -> Result<Dataset> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("cannot open {}: {e}", path.display()),
        )),
        _ => Error::Data(format!("cannot read {}: {e}", path.display())),
    })?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Data(format!("missing header row: {e}")))?
        .clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Data(format!("missing required column: {name}")))
    };

    let id_col = col("firm_id")?;
    let industry_col = col("industry")?;
    let status_col = col("contract_status")?;
    let label_col = col("label")?;
    let feature_cols: Vec<(usize, &str)> = schema
        .numeric_names
        .iter()
        .map(|n| col(n).map(|i| (i, n.as_str())))
        .collect::<Result<_>>()?;
    let gt_col = headers.iter().position(|h| h == "ground_truth_p");

    let mut records = Vec::new();
    for (row_idx, row) in reader.records().enumerate() {
        let row_no = row_idx + 1; // 1-based data row, matching user expectations
        let row = row.map_err(|e| Error::Data(format!("row {row_no}: {e}")))?;
        let cell = |i: usize| row.get(i).unwrap_or("");
        let parse_num = |i: usize, name: &str| -> Result<f64> {
            cell(i).trim().parse::<f64>().map_err(|_| {
                Error::Data(format!(
                    "row {row_no}, column {name}: cannot parse {:?} as a number",
                    cell(i)
                ))
            })
        };
        let parse_bit = |i: usize, name: &str| -> Result<u8> {
            match cell(i).trim() {
                "0" => Ok(0),
                "1" => Ok(1),
                other => Err(Error::Data(format!(
                    "row {row_no}, column {name}: expected 0 or 1, got {other:?}"
                ))),
            }
        };

        let indicators = feature_cols
            .iter()
            .map(|&(i, name)| parse_num(i, name))
            .collect::<Result<Vec<f64>>>()?;
        let industry = Industry::parse(cell(industry_col).trim())
            .map_err(|e| Error::Data(format!("row {row_no}: {e}")))?;
        let ground_truth_p = match gt_col {
            Some(i) if !cell(i).trim().is_empty() => Some(parse_num(i, "ground_truth_p")?),
            _ => None,
        };
        records.push(FirmRecord {
            firm_id: cell(id_col).to_string(),
            industry,
            indicators,
            contract_status: parse_bit(status_col, "contract_status")?,
            label: parse_bit(label_col, "label")?,
            synthetic: false,
            ground_truth_p,
        });
    }
    Dataset::new(records)
}

pub fn save_csv(
    dataset: &Dataset,
    path: &Path,
    schema: &IndicatorSchema,
    include_ground_truth: bool,
) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = vec!["firm_id".into(), "industry".into()];
    header.extend(schema.numeric_names.iter().cloned());
    header.push("contract_status".into());
    header.push("label".into());
    if include_ground_truth {
        header.push("ground_truth_p".into());
    }
    writer
        .write_record(&header)
        .map_err(|e| Error::Data(format!("csv write: {e}")))?;
    for rec in &dataset.records {
        let mut row: Vec<String> = vec![rec.firm_id.clone(), rec.industry.as_str().into()];
        // f64 Display is the shortest round-trip decimal representation
        row.extend(rec.indicators.iter().map(|v| format!("{v}")));
        row.push(format!("{}", rec.contract_status));
        row.push(format!("{}", rec.label));
        if include_ground_truth {
            row.push(rec.ground_truth_p.map(|p| format!("{p}")).unwrap_or_default());
        }
        writer
            .write_record(&row)
            .map_err(|e| Error::Data(format!("csv write: {e}")))?;
    }
    writer.flush()?;
    Ok(())
}
