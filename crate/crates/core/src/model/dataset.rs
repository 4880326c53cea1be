use serde::{Deserialize, Serialize};

use crate::features::{FeatureRegistry, FeatureVector};
use crate::{Error, Result};

/// Dense numeric design: named columns over complete rows, plus the
/// response.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub ids: Vec<String>,
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

/// What listwise deletion removed while building a [`Dataset`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusions {
    /// Rows without a gold grade or with a masked feature.
    pub rows: Vec<String>,
    /// Features masked in more than half of the rows, dropped entirely.
    pub features: Vec<String>,
}

impl Dataset {
    pub fn new(ids: Vec<String>, names: Vec<String>, columns: Vec<Vec<f64>>, y: Vec<f64>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::Config("one name per column required".into()));
        }
        if ids.len() != y.len() || columns.iter().any(|c| c.len() != y.len()) {
            return Err(Error::Config("all columns must have one value per row".into()));
        }
        Ok(Dataset { ids, names, columns, y })
    }

    /// Builds a dataset over `features` (all registry features when None).
    /// Features masked in more than half of the graded rows are dropped;
    /// remaining rows with any masked feature are excluded.
    pub fn from_vectors(
        rows: &[FeatureVector],
        registry: &FeatureRegistry,
        features: Option<&[String]>,
    ) -> Result<(Self, Exclusions)> {
        let wanted: Vec<String> = match features {
            Some(f) => f.to_vec(),
            None => registry.names().map(String::from).collect(),
        };
        let idx: Vec<usize> = wanted
            .iter()
            .map(|n| registry.index_of(n).ok_or_else(|| Error::Config(format!("unknown feature '{n}'"))))
            .collect::<Result<_>>()?;
        let mut excl = Exclusions::default();
        let graded: Vec<&FeatureVector> = rows
            .iter()
            .filter(|r| {
                let keep = r.grade.is_some();
                if !keep {
                    excl.rows.push(r.doc_id.clone());
                }
                keep
            })
            .collect();
        let mut names = Vec::new();
        let mut keep_idx = Vec::new();
        for (name, &i) in wanted.iter().zip(&idx) {
            let masked = graded.iter().filter(|r| r.missing[i]).count();
            if masked * 2 > graded.len() {
                excl.features.push(name.clone());
            } else {
                names.push(name.clone());
                keep_idx.push(i);
            }
        }
        let mut ids = Vec::new();
        let mut y = Vec::new();
        let mut columns = vec![Vec::new(); keep_idx.len()];
        for r in graded {
            if keep_idx.iter().any(|&i| r.missing[i]) {
                excl.rows.push(r.doc_id.clone());
                continue;
            }
            ids.push(r.doc_id.clone());
            y.push(r.grade.expect("filtered") as f64);
            for (c, &i) in columns.iter_mut().zip(&keep_idx) {
                c.push(r.values[i]);
            }
        }
        Ok((Dataset { ids, names, columns, y }, excl))
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.column_index(name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| Error::MissingFeature { features: vec![name.to_string()] })
    }

    /// The named columns, in the given order.
    pub fn columns_for(&self, names: &[String]) -> Result<Vec<&[f64]>> {
        let missing: Vec<String> = names.iter().filter(|n| self.column_index(n).is_none()).cloned().collect();
        if !missing.is_empty() {
            return Err(Error::MissingFeature { features: missing });
        }
        Ok(names.iter().map(|n| self.column(n).expect("checked")).collect())
    }

    /// Rows at `idx`, in that order.
    pub fn select_rows(&self, idx: &[usize]) -> Dataset {
        Dataset {
            ids: idx.iter().map(|&i| self.ids[i].clone()).collect(),
            names: self.names.clone(),
            columns: self.columns.iter().map(|c| idx.iter().map(|&i| c[i]).collect()).collect(),
            y: idx.iter().map(|&i| self.y[i]).collect(),
        }
    }

    /// Appends a column (e.g. a classic readability score).
    pub fn with_column(mut self, name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if values.len() != self.n() {
            return Err(Error::Config(format!("column '{name}' has {} values for {} rows", values.len(), self.n())));
        }
        if self.column_index(&name).is_some() {
            return Err(Error::Config(format!("duplicate column '{name}'")));
        }
        self.names.push(name);
        self.columns.push(values);
        Ok(self)
    }
}
