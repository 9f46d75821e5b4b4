//! Series alignment and Pearson correlation.

use std::collections::BTreeMap;

use super::SpatialError;

/// Two variables aligned over common units, with the ids dropped by the
/// inner join recorded for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPair {
    pub units: Vec<String>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub dropped: Vec<String>,
}

impl SeriesPair {
    /// Inner-joins two unit-keyed series. Requires at least 3 common units.
    pub fn align(
        xs: &BTreeMap<String, f64>,
        ys: &BTreeMap<String, f64>,
    ) -> Result<Self, SpatialError> {
        let mut units = Vec::new();
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut dropped = Vec::new();
        for (unit, &vx) in xs {
            match ys.get(unit) {
                Some(&vy) => {
                    units.push(unit.clone());
                    x.push(vx);
                    y.push(vy);
                }
                None => dropped.push(unit.clone()),
            }
        }
        for unit in ys.keys() {
            if !xs.contains_key(unit) {
                dropped.push(unit.clone());
            }
        }
        dropped.sort();
        if units.len() < 3 {
            return Err(SpatialError::InsufficientOverlap { joined: units.len() });
        }
        Ok(Self { units, x, y, dropped })
    }

    /// Pairs two equal-length vectors with synthetic unit ids.
    pub fn from_vectors(x: Vec<f64>, y: Vec<f64>) -> Result<Self, SpatialError> {
        if x.len() != y.len() {
            return Err(SpatialError::DimensionMismatch(format!(
                "series lengths {} and {}",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 3 {
            return Err(SpatialError::InsufficientOverlap { joined: x.len() });
        }
        Ok(Self {
            units: (0..x.len()).map(|i| i.to_string()).collect(),
            x,
            y,
            dropped: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Pearson correlation coefficient:
/// `sum((x - mean_x)(y - mean_y)) / sqrt(sum((x - mean_x)^2) sum((y - mean_y)^2))`.
pub fn pearson(pair: &SeriesPair) -> Result<f64, SpatialError> {
    let n = pair.len() as f64;
    let mean_x = pair.x.iter().sum::<f64>() / n;
    let mean_y = pair.y.iter().sum::<f64>() / n;

    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (x, y) in pair.x.iter().zip(&pair.y) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Err(SpatialError::ZeroVariance);
    }
    Ok(cov / (var_x * var_y).sqrt())
}
