use std::io::{Read, Write};
use std::path::Path;

use super::{FeatureRegistry, FeatureVector, Provenance};
use crate::{Error, Result};

const ID_COLUMN: &str = "doc_id";
const GRADE_COLUMN: &str = "grade";

/// Writes `doc_id`, one column per registry feature, then `grade`. Missing
/// cells are empty. Returns (rows, feature columns + grade).
pub fn write_table_to<W: Write>(
    out: W,
    vectors: &[FeatureVector],
    registry: &FeatureRegistry,
) -> Result<(usize, usize)> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![ID_COLUMN];
    header.extend(registry.names());
    header.push(GRADE_COLUMN);
    w.write_record(&header)?;
    for v in vectors {
        if v.values.len() != registry.len() {
            return Err(Error::Config(format!(
                "vector {} has {} values, registry has {}",
                v.doc_id,
                v.values.len(),
                registry.len()
            )));
        }
        let mut row = Vec::with_capacity(registry.len() + 2);
        row.push(v.doc_id.clone());
        for (x, &m) in v.values.iter().zip(&v.missing) {
            // Display for f64 is the shortest string that parses back exactly
            row.push(if m { String::new() } else { x.to_string() });
        }
        row.push(v.grade.map(|g| g.to_string()).unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok((vectors.len(), registry.len() + 1))
}

pub fn export_table(path: &Path, vectors: &[FeatureVector], registry: &FeatureRegistry) -> Result<(usize, usize)> {
    let file = std::fs::File::create(path)?;
    write_table_to(std::io::BufWriter::new(file), vectors, registry)
}

/// Reads a table written by [`write_table_to`]. The header must match the
/// registry exactly.
pub fn read_table_from<R: Read>(input: R, registry: &FeatureRegistry) -> Result<Vec<FeatureVector>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    let mut expected = vec![ID_COLUMN.to_string()];
    expected.extend(registry.names().map(String::from));
    expected.push(GRADE_COLUMN.into());
    if header != expected {
        return Err(Error::Config(format!(
            "feature table header does not match the registry ({} columns found, {} expected)",
            header.len(),
            expected.len()
        )));
    }
    let k = registry.len();
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let bad = |message: String| Error::Schema {
            path: "feature table".into(),
            line,
            message,
        };
        let mut values = Vec::with_capacity(k);
        let mut missing = Vec::with_capacity(k);
        for j in 0..k {
            let cell = &rec[j + 1];
            if cell.is_empty() {
                values.push(0.0);
                missing.push(true);
            } else {
                values.push(cell.parse().map_err(|_| bad(format!("bad number '{cell}'")))?);
                missing.push(false);
            }
        }
        let g = &rec[k + 1];
        let grade = if g.is_empty() {
            None
        } else {
            Some(g.parse().map_err(|_| bad(format!("bad grade '{g}'")))?)
        };
        out.push(FeatureVector {
            doc_id: rec[0].to_string(),
            values,
            missing,
            grade,
            provenance: Provenance::default(),
        });
    }
    Ok(out)
}

pub fn read_table(path: &Path, registry: &FeatureRegistry) -> Result<Vec<FeatureVector>> {
    let file = std::fs::File::open(path).map_err(|e| Error::load(path, e))?;
    read_table_from(std::io::BufReader::new(file), registry)
}
