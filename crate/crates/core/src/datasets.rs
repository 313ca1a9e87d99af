//! Generators for the synthetic experiments and k-NN graphs over point data.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use log::{info, warn};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sgft::SignalVector;

/// Ring of `n` unit-weight edges `(i, i+1 mod n)`, with the listed edges'
/// weights overridden.
pub fn linear_graph(n: usize, weak_edges: &[(usize, usize, f64)]) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "ring needs n >= 3, got {n}"
        )));
    }
    let mut weights = vec![1.0; n];
    for &(i, j, w) in weak_edges {
        let slot = if i < n && j < n && (i + 1) % n == j {
            i
        } else if i < n && j < n && (j + 1) % n == i {
            j
        } else {
            return Err(Error::NotARingEdge(i, j));
        };
        weights[slot] = w;
    }
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n, weights[i])))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub periodic: bool,
    /// Weight of every edge joining the two halves.
    pub boundary_weight: f64,
    /// First column of the right half.
    pub boundary: usize,
}

impl GridSpec {
    /// Periodic grid split down the middle, with unit boundary weight.
    pub fn new(rows: usize, cols: usize) -> Self {
        GridSpec {
            rows,
            cols,
            periodic: true,
            boundary_weight: 1.0,
            boundary: cols / 2,
        }
    }

    pub fn with_boundary_weight(mut self, w: f64) -> Self {
        self.boundary_weight = w;
        self
    }

    pub fn vertex(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn is_left(&self, vertex: usize) -> bool {
        vertex % self.cols < self.boundary
    }
}

/// 4-neighbour grid, vertex `r * cols + c`. Horizontal edges whose endpoints
/// lie in different halves (columns `< boundary` vs `>= boundary`) get
/// `boundary_weight`; on a torus that includes the wrap-around edge between
/// the last and first columns.
pub fn grid_graph(spec: GridSpec) -> Result<Graph> {
    let GridSpec {
        rows,
        cols,
        periodic,
        boundary_weight,
        boundary,
    } = spec;
    if rows < 3 || cols < 3 {
        return Err(Error::InvalidParameter(format!(
            "grid needs at least 3x3, got {rows}x{cols}"
        )));
    }
    if boundary == 0 || boundary >= cols {
        return Err(Error::InvalidParameter(format!(
            "boundary column must be in 1..{cols}, got {boundary}"
        )));
    }
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let v = spec.vertex(r, c);
            if c + 1 < cols || periodic {
                let c2 = (c + 1) % cols;
                let crosses = (c < boundary) != (c2 < boundary);
                let w = if crosses { boundary_weight } else { 1.0 };
                edges.push((v, spec.vertex(r, c2), w));
            }
            if r + 1 < rows || periodic {
                edges.push((v, spec.vertex((r + 1) % rows, c), 1.0));
            }
        }
    }
    Graph::new(rows * cols, edges)
}

/// Sinusoid along the row index: `sin(2π f r / rows)`, with `f = freq_left`
/// on columns `< cols / 2` and `freq_right` on the rest.
pub fn two_waveform_signal(
    rows: usize,
    cols: usize,
    freq_left: f64,
    freq_right: f64,
) -> SignalVector {
    let half = cols / 2;
    let mut values = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let f = if c < half { freq_left } else { freq_right };
            values.push((2.0 * PI * f * r as f64 / rows as f64).sin());
        }
    }
    SignalVector::new(values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightMode {
    /// Raw Euclidean distance.
    Distance,
    InverseDistance,
    Gaussian {
        sigma: f64,
    },
}

impl WeightMode {
    fn weight(self, d: f64) -> f64 {
        match self {
            WeightMode::Distance => d,
            WeightMode::InverseDistance => 1.0 / d,
            WeightMode::Gaussian { sigma } => (-d * d / (2.0 * sigma * sigma)).exp(),
        }
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// The `k` nearest neighbours of every point (ties broken by index).
pub fn nearest_neighbors(points: &[[f64; 2]], k: usize) -> Vec<Vec<usize>> {
    (0..points.len())
        .map(|i| {
            let mut others: Vec<(f64, usize)> = (0..points.len())
                .filter(|&j| j != i)
                .map(|j| (dist(points[i], points[j]), j))
                .collect();
            others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            others.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect()
}

/// Symmetrized k-NN graph: `i ~ j` when either selects the other. Leftover
/// components are joined through their closest cross-component pair.
pub fn knn_graph(points: &[[f64; 2]], k: usize, mode: WeightMode) -> Result<Graph> {
    let n = points.len();
    if n < 2 || k == 0 {
        return Err(Error::InvalidParameter(format!(
            "k-NN graph needs k >= 1 and at least 2 points (k={k}, points={n})"
        )));
    }
    if let WeightMode::Gaussian { sigma } = mode {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
    }
    for i in 0..n {
        if !(points[i][0].is_finite() && points[i][1].is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "point {i} has non-finite coordinates"
            )));
        }
        for j in (i + 1)..n {
            if points[i] == points[j] {
                return Err(Error::DuplicatePoints(i, j));
            }
        }
    }
    let k = k.min(n - 1);
    let mut pairs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (i, nbrs) in nearest_neighbors(points, k).into_iter().enumerate() {
        for j in nbrs {
            pairs.insert((i.min(j), i.max(j)), dist(points[i], points[j]));
        }
    }

    let mut uf = UnionFind::new(n);
    for &(a, b) in pairs.keys() {
        uf.union(a, b);
    }
    while uf.components > 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            for j in (i + 1)..n {
                if uf.find(i) != uf.find(j) {
                    let d = dist(points[i], points[j]);
                    if best.is_none_or(|(bd, _, _)| d < bd) {
                        best = Some((d, i, j));
                    }
                }
            }
        }
        let (d, i, j) = best.expect("more than one component implies a cross pair");
        info!("k-NN graph: joining components through ({i}, {j}) at distance {d}");
        pairs.insert((i, j), d);
        uf.union(i, j);
    }

    Graph::new(
        n,
        pairs.into_iter().map(|((i, j), d)| (i, j, mode.weight(d))),
    )
}

struct UnionFind {
    parent: Vec<usize>,
    components: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            components: n,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
            self.components -= 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationData {
    pub ids: Vec<String>,
    /// `[longitude, latitude]`, used as planar coordinates.
    pub points: Vec<[f64; 2]>,
    pub signal: SignalVector,
    /// Rows dropped for a missing value.
    pub dropped: usize,
}

fn is_missing(field: &str) -> bool {
    let f = field.trim();
    f.is_empty() || f.eq_ignore_ascii_case("na") || f.eq_ignore_ascii_case("nan")
}

/// Reads `station_id,latitude,longitude,value` rows (header required).
/// Rows with a missing field are dropped and counted; anything else that
/// does not parse is an error.
pub fn load_station_csv<P: AsRef<Path>>(path: P) -> Result<StationData> {
    let file = std::fs::File::open(path)?;
    read_station_csv(file)
}

pub fn read_station_csv<R: std::io::Read>(input: R) -> Result<StationData> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(input);
    let header = reader.headers()?.clone();
    let expected = ["station_id", "latitude", "longitude", "value"];
    if header.len() != 4
        || header
            .iter()
            .zip(expected)
            .any(|(h, e)| !h.eq_ignore_ascii_case(e))
    {
        return Err(Error::MalformedRow {
            line: 1,
            reason: format!("header must be {}", expected.join(",")),
        });
    }
    let mut data = StationData {
        ids: Vec::new(),
        points: Vec::new(),
        signal: SignalVector::new(Vec::new()),
        dropped: 0,
    };
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 4 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("expected 4 fields, found {}", record.len()),
            });
        }
        if record.iter().any(is_missing) {
            data.dropped += 1;
            continue;
        }
        let num = |idx: usize, name: &str| -> Result<f64> {
            record[idx]
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::MalformedRow {
                    line,
                    reason: format!("bad {name} {:?}", &record[idx]),
                })
        };
        let lat = num(1, "latitude")?;
        let lon = num(2, "longitude")?;
        let value = num(3, "value")?;
        data.ids.push(record[0].to_string());
        data.points.push([lon, lat]);
        values.push(value);
    }
    if data.dropped > 0 {
        warn!("dropped {} station rows with missing values", data.dropped);
    }
    if values.is_empty() {
        return Err(Error::EmptyDataset);
    }
    data.signal = SignalVector::new(values);
    Ok(data)
}
