//! Spatial weights matrices: binary adjacency or k-nearest-neighbor
//! construction, with optional row standardization.

use std::collections::BTreeMap;
use std::io::Read;

use super::SpatialError;

/// Sparse row-major spatial weights. Self-weights are never present and all
/// weights are nonnegative; when `row_standardized`, every nonempty row sums
/// to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightsMatrix {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
    row_standardized: bool,
}

impl WeightsMatrix {
    /// Builds from per-row neighbor lists, validating the invariants.
    pub fn new(rows: Vec<Vec<(usize, f64)>>, row_standardized: bool) -> Result<Self, SpatialError> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            for &(j, w) in row {
                if j >= n {
                    return Err(SpatialError::InvalidWeights(format!(
                        "neighbor index {j} out of range for n={n}"
                    )));
                }
                if i == j {
                    return Err(SpatialError::InvalidWeights(format!("self-weight at unit {i}")));
                }
                if !(w >= 0.0) || !w.is_finite() {
                    return Err(SpatialError::InvalidWeights(format!(
                        "negative or non-finite weight at ({i}, {j})"
                    )));
                }
            }
            if row_standardized && !row.is_empty() {
                let sum: f64 = row.iter().map(|&(_, w)| w).sum();
                if (sum - 1.0).abs() > 1e-12 {
                    return Err(SpatialError::InvalidWeights(format!(
                        "row {i} sums to {sum}, expected 1"
                    )));
                }
            }
        }
        Ok(Self {
            n,
            rows,
            row_standardized,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_row_standardized(&self) -> bool {
        self.row_standardized
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// Sum of all weights.
    pub fn total_weight(&self) -> f64 {
        self.rows.iter().flatten().map(|&(_, w)| w).sum()
    }

    /// The spatial lag `W x`.
    pub fn lag(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "lag dimension mismatch");
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, w)| w * x[j]).sum())
            .collect()
    }

    /// Dense copy, used for eigenvalue work.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, w) in row {
                m[(i, j)] = w;
            }
        }
        m
    }
}

/// A named unit centroid for k-nearest-neighbor construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Centroid {
    pub unit_id: String,
    pub lat: f64,
    pub lon: f64,
}

/// How to build the weights.
#[derive(Debug, Clone)]
pub enum WeightsSpec {
    /// Undirected binary adjacency from an edge list; an explicit weight
    /// overrides the default of 1 (both directions).
    Adjacency(Vec<(String, String, Option<f64>)>),
    /// k nearest neighbors by great-circle distance over centroids. The
    /// result may be asymmetric; ties break by unit id order.
    Knn { centroids: Vec<Centroid>, k: usize },
}

/// A built weights matrix with its unit-id order and any warnings (e.g.
/// isolated units that keep a zero row under standardization).
#[derive(Debug, Clone)]
pub struct WeightsBuild {
    pub ids: Vec<String>,
    pub matrix: WeightsMatrix,
    pub warnings: Vec<String>,
}

impl WeightsBuild {
    pub fn index_of(&self, unit_id: &str) -> Option<usize> {
        self.ids.iter().position(|id| id == unit_id)
    }
}

/// Builds a weights matrix from an adjacency edge list or knn specification.
pub fn build_weights(spec: &WeightsSpec, standardize: bool) -> Result<WeightsBuild, SpatialError> {
    match spec {
        WeightsSpec::Adjacency(edges) => build_from_edges(edges, standardize),
        WeightsSpec::Knn { centroids, k } => build_knn(centroids, *k, standardize),
    }
}

fn build_from_edges(
    edges: &[(String, String, Option<f64>)],
    standardize: bool,
) -> Result<WeightsBuild, SpatialError> {
    let mut ids: Vec<&str> = edges
        .iter()
        .flat_map(|(a, b, _)| [a.as_str(), b.as_str()])
        .collect();
    ids.sort_unstable();
    ids.dedup();
    let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();

    let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); ids.len()];
    for (a, b, weight) in edges {
        if a == b {
            return Err(SpatialError::InvalidWeights(format!("self edge at unit {a:?}")));
        }
        let (i, j) = (index[a.as_str()], index[b.as_str()]);
        let w = weight.unwrap_or(1.0);
        if !(w >= 0.0) || !w.is_finite() {
            return Err(SpatialError::InvalidWeights(format!(
                "negative or non-finite weight on edge {a:?}-{b:?}"
            )));
        }
        rows[i].insert(j, w);
        rows[j].insert(i, w);
    }

    finish(
        ids.into_iter().map(String::from).collect(),
        rows.into_iter()
            .map(|r| r.into_iter().collect())
            .collect(),
        standardize,
    )
}

fn build_knn(centroids: &[Centroid], k: usize, standardize: bool) -> Result<WeightsBuild, SpatialError> {
    if k == 0 {
        return Err(SpatialError::InvalidWeights("knn requires k >= 1".into()));
    }
    if k >= centroids.len() {
        return Err(SpatialError::InvalidWeights(format!(
            "knn k={k} needs more than k units, got {}",
            centroids.len()
        )));
    }
    let mut sorted: Vec<&Centroid> = centroids.iter().collect();
    sorted.sort_by(|a, b| a.unit_id.cmp(&b.unit_id));
    for pair in sorted.windows(2) {
        if pair[0].unit_id == pair[1].unit_id {
            return Err(SpatialError::InvalidWeights(format!(
                "duplicate centroid for unit {:?}",
                pair[0].unit_id
            )));
        }
    }

    let mut rows = Vec::with_capacity(sorted.len());
    for (i, c) in sorted.iter().enumerate() {
        let mut dists: Vec<(usize, f64)> = sorted
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(j, other)| (j, great_circle(c.lat, c.lon, other.lat, other.lon)))
            .collect();
        // Ties break by unit id order, which is index order here.
        dists.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
        let mut row: Vec<(usize, f64)> = dists.into_iter().take(k).map(|(j, _)| (j, 1.0)).collect();
        row.sort_by_key(|&(j, _)| j);
        rows.push(row);
    }

    finish(
        sorted.into_iter().map(|c| c.unit_id.clone()).collect(),
        rows,
        standardize,
    )
}

fn finish(
    ids: Vec<String>,
    mut rows: Vec<Vec<(usize, f64)>>,
    standardize: bool,
) -> Result<WeightsBuild, SpatialError> {
    let mut warnings = Vec::new();
    // Zero-weight entries are no-ops; dropping them makes isolated units
    // recognizable as empty rows.
    for row in rows.iter_mut() {
        row.retain(|&(_, w)| w != 0.0);
    }
    if standardize {
        for (i, row) in rows.iter_mut().enumerate() {
            let sum: f64 = row.iter().map(|&(_, w)| w).sum();
            if row.is_empty() {
                // Isolated unit: zero row retained, never a division by zero.
                warnings.push(format!("unit {:?} has no neighbors; row left zero", ids[i]));
            } else {
                for entry in row.iter_mut() {
                    entry.1 /= sum;
                }
            }
        }
    }
    let matrix = WeightsMatrix::new(rows, standardize)?;
    Ok(WeightsBuild {
        ids,
        matrix,
        warnings,
    })
}

/// Great-circle distance in kilometers (haversine, mean-earth radius).
fn great_circle(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    const EARTH_RADIUS_KM: f64 = 6371.0088;
    let (phi1, phi2) = (lat1.to_radians(), lat2.to_radians());
    let dphi = (lat2 - lat1).to_radians();
    let dlambda = (lon2 - lon1).to_radians();
    let a = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * a.sqrt().asin()
}

/// Reads an edge list CSV `unit_a,unit_b[,weight]` (no header).
pub fn read_edge_list_csv<R: Read>(
    reader: R,
) -> Result<Vec<(String, String, Option<f64>)>, SpatialError> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut edges = Vec::new();
    for (idx, row) in csv_reader.records().enumerate() {
        let row = row.map_err(|e| {
            SpatialError::InvalidWeights(format!("edge list line {}: {e}", idx + 1))
        })?;
        if row.len() < 2 || row.len() > 3 {
            return Err(SpatialError::InvalidWeights(format!(
                "edge list line {}: expected 2 or 3 fields",
                idx + 1
            )));
        }
        let weight = if row.len() == 3 {
            Some(row[2].trim().parse::<f64>().map_err(|_| {
                SpatialError::InvalidWeights(format!(
                    "edge list line {}: bad weight {:?}",
                    idx + 1,
                    &row[2]
                ))
            })?)
        } else {
            None
        };
        edges.push((row[0].trim().to_string(), row[1].trim().to_string(), weight));
    }
    Ok(edges)
}

/// Rook-contiguity adjacency for an `nrows x ncols` lattice with unit ids
/// `r{row}c{col}`. Used by tests and synthetic studies.
pub fn lattice_rook_edges(nrows: usize, ncols: usize) -> Vec<(String, String, Option<f64>)> {
    let name = |r: usize, c: usize| format!("r{r:02}c{c:02}");
    let mut edges = Vec::new();
    for r in 0..nrows {
        for c in 0..ncols {
            if c + 1 < ncols {
                edges.push((name(r, c), name(r, c + 1), None));
            }
            if r + 1 < nrows {
                edges.push((name(r, c), name(r + 1, c), None));
            }
        }
    }
    edges
}
