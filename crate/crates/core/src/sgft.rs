//! Graph modulation, the short-graph Fourier transform and spectrograms.
//!
//! Frequency indices are 0-based throughout the library: index `0` is the
//! constant mode, for which modulation is the identity. Text exports shift
//! them to 1-based.
//!
//! `SGFT_f(i, k) = ⟨f, M_k w_i⟩` with `M_k f = sqrt(vol V) f ∘ (D^{-1/2} U)_{:k}`
//! and `w_i` the PPR window at vertex `i`. The spectrogram stores
//! `|SGFT_f(i, k)|²` with rows indexed by vertex and columns by frequency.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::par::Execution;
use crate::ppr::{argmax, LocalizationParams, Localizer, Shift, Window};
use crate::spectral::{dot, EigenBasis, OperatorKind};

#[derive(Debug, Clone, PartialEq)]
pub struct SignalVector(Vec<f64>);

impl SignalVector {
    pub fn new(values: Vec<f64>) -> Self {
        SignalVector(values)
    }

    pub fn constant(n: usize, value: f64) -> Self {
        SignalVector(vec![value; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.0.len() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: n,
                found: self.0.len(),
            })
        }
    }
}

impl From<Vec<f64>> for SignalVector {
    fn from(v: Vec<f64>) -> Self {
        SignalVector(v)
    }
}

/// Which transform produced a spectrogram, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Ppr { shift: Shift, frequencies: usize },
    Conv { tau: f64, frequencies: usize },
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Ppr { .. } => "ppr",
            Method::Conv { .. } => "conv",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Ppr {
                shift: Shift::Beta(b),
                frequencies,
            } => write!(f, "method=ppr beta={b} K={frequencies}"),
            Method::Ppr {
                shift: Shift::Gamma(g),
                frequencies,
            } => write!(f, "method=ppr gamma={g} K={frequencies}"),
            Method::Conv { tau, frequencies } => {
                write!(f, "method=conv tau={tau} K={frequencies}")
            }
        }
    }
}

/// `|SGFT|²` values, one row per analysed vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrogramMatrix {
    vertices: Vec<usize>,
    frequencies: usize,
    values: Vec<f64>,
    method: Method,
}

impl SpectrogramMatrix {
    pub(crate) fn from_rows(vertices: Vec<usize>, rows: Vec<Vec<f64>>, method: Method) -> Self {
        let frequencies = match method {
            Method::Ppr { frequencies, .. } | Method::Conv { frequencies, .. } => frequencies,
        };
        let mut values = Vec::with_capacity(vertices.len() * frequencies);
        for row in rows {
            debug_assert_eq!(row.len(), frequencies);
            values.extend(row);
        }
        SpectrogramMatrix {
            vertices,
            frequencies,
            values,
            method,
        }
    }

    /// Vertices in row order.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn frequencies(&self) -> usize {
        self.frequencies
    }

    pub fn rows(&self) -> usize {
        self.vertices.len()
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.frequencies..(r + 1) * self.frequencies]
    }

    pub fn get(&self, r: usize, k: usize) -> f64 {
        self.values[r * self.frequencies + k]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row_of(&self, vertex: usize) -> Option<usize> {
        self.vertices.iter().position(|&v| v == vertex)
    }

    /// Sums each row over groups of frequencies whose eigenvalues differ by
    /// less than `tol` from their neighbour. Only clusters lying entirely
    /// inside the retained range are returned, as `(first, last)` index pairs.
    pub fn cluster_sums(
        &self,
        eigenvalues: &[f64],
        tol: f64,
    ) -> (Vec<(usize, usize)>, Vec<Vec<f64>>) {
        let mut clusters = Vec::new();
        let mut start = 0;
        for k in 1..=eigenvalues.len() {
            if k == eigenvalues.len() || eigenvalues[k] - eigenvalues[k - 1] >= tol {
                if k <= self.frequencies {
                    clusters.push((start, k - 1));
                }
                start = k;
            }
        }
        let sums = (0..self.rows())
            .map(|r| {
                let row = self.row(r);
                clusters
                    .iter()
                    .map(|&(a, b)| row[a..=b].iter().sum())
                    .collect()
            })
            .collect();
        (clusters, sums)
    }
}

/// Vertex-wise multiplier applied to basis vectors: modulation by frequency
/// `k` multiplies a signal by `multiplier ∘ basis_k`.
pub(crate) struct Modulation<'a> {
    basis: &'a EigenBasis,
    multiplier: Vec<f64>,
    count: usize,
}

impl<'a> Modulation<'a> {
    pub(crate) fn new(basis: &'a EigenBasis, multiplier: Vec<f64>, count: usize) -> Self {
        Modulation {
            basis,
            multiplier,
            count,
        }
    }

    pub(crate) fn count(&self) -> usize {
        self.count
    }

    pub(crate) fn check(&self, k: usize) -> Result<()> {
        if k < self.count {
            Ok(())
        } else {
            Err(Error::FrequencyOutOfRange {
                k,
                retained: self.count,
            })
        }
    }

    pub(crate) fn apply(&self, k: usize, f: &[f64]) -> Result<Vec<f64>> {
        self.check(k)?;
        Ok(f.iter()
            .zip(&self.multiplier)
            .zip(self.basis.eigenvector(k))
            .map(|((x, m), u)| x * m * u)
            .collect())
    }

    /// `⟨f, M_k w⟩` for a single `k`.
    pub(crate) fn coefficient(&self, k: usize, f: &[f64], window: &[f64]) -> Result<f64> {
        self.check(k)?;
        Ok(dot(&self.weighted(f, window), self.basis.eigenvector(k)))
    }

    /// `|⟨f, M_k w⟩|²` for every retained `k`.
    pub(crate) fn energy_row(&self, f: &[f64], window: &[f64]) -> Vec<f64> {
        let h = self.weighted(f, window);
        (0..self.count)
            .map(|k| {
                let c = dot(&h, self.basis.eigenvector(k));
                c * c
            })
            .collect()
    }

    fn weighted(&self, f: &[f64], window: &[f64]) -> Vec<f64> {
        f.iter()
            .zip(window)
            .zip(&self.multiplier)
            .map(|((x, w), m)| x * w * m)
            .collect()
    }
}

fn ppr_modulation<'a>(graph: &Graph, basis: &'a EigenBasis, count: usize) -> Modulation<'a> {
    let root_vol = graph.total_volume().sqrt();
    let multiplier = graph
        .degrees()
        .iter()
        .map(|d| root_vol / d.sqrt())
        .collect();
    Modulation::new(basis, multiplier, count)
}

fn check_basis(graph: &Graph, basis: &EigenBasis) -> Result<()> {
    basis.require_kind(OperatorKind::NormalizedLaplacian)?;
    basis.require_len(graph.n())
}

/// `M_k f = sqrt(vol V) f ∘ (D^{-1/2} U)_{:k}`.
pub fn modulate(
    graph: &Graph,
    basis: &EigenBasis,
    k: usize,
    f: &SignalVector,
) -> Result<SignalVector> {
    check_basis(graph, basis)?;
    f.check_len(graph.n())?;
    ppr_modulation(graph, basis, basis.len())
        .apply(k, f.values())
        .map(SignalVector)
}

/// A single short-graph Fourier coefficient `⟨f, M_k w_i⟩`.
pub fn sgft(
    graph: &Graph,
    basis: &EigenBasis,
    f: &SignalVector,
    vertex: usize,
    k: usize,
    params: &LocalizationParams,
) -> Result<f64> {
    check_basis(graph, basis)?;
    f.check_len(graph.n())?;
    graph.check_vertex(vertex)?;
    let localizer = Localizer::new(graph, basis, params)?;
    let modulation = ppr_modulation(graph, basis, params.retained(basis)?);
    modulation.check(k)?;
    let w = localizer.window(graph, vertex, params)?;
    modulation.coefficient(k, f.values(), w.values())
}

fn resolve_vertices(graph: &Graph, vertices: Option<&[usize]>) -> Result<Vec<usize>> {
    match vertices {
        None => Ok((0..graph.n()).collect()),
        Some(vs) => {
            for &v in vs {
                graph.check_vertex(v)?;
            }
            Ok(vs.to_vec())
        }
    }
}

/// PPR spectrogram over `vertices` (all vertices when `None`), using the
/// default execution strategy.
pub fn spectrogram(
    graph: &Graph,
    basis: &EigenBasis,
    f: &SignalVector,
    params: &LocalizationParams,
    vertices: Option<&[usize]>,
) -> Result<SpectrogramMatrix> {
    spectrogram_with(Execution::default(), graph, basis, f, params, vertices)
}

pub fn spectrogram_with(
    exec: Execution,
    graph: &Graph,
    basis: &EigenBasis,
    f: &SignalVector,
    params: &LocalizationParams,
    vertices: Option<&[usize]>,
) -> Result<SpectrogramMatrix> {
    check_basis(graph, basis)?;
    f.check_len(graph.n())?;
    let vertices = resolve_vertices(graph, vertices)?;
    let localizer = Localizer::new(graph, basis, params)?;
    let modulation = ppr_modulation(graph, basis, params.retained(basis)?);
    let rows = exec.try_map(&vertices, |v| {
        let w = localizer.window(graph, v, params)?;
        Ok(modulation.energy_row(f.values(), w.values()))
    })?;
    Ok(SpectrogramMatrix::from_rows(
        vertices,
        rows,
        Method::Ppr {
            shift: params.shift(),
            frequencies: modulation.count(),
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CacheKey {
    shift: (u8, u64),
    scale: u64,
    retained: usize,
    n: usize,
    lambda1: u64,
}

impl CacheKey {
    fn new(basis: &EigenBasis, params: &LocalizationParams) -> Result<Self> {
        let shift = match params.shift() {
            Shift::Beta(b) => (0, b.to_bits()),
            Shift::Gamma(g) => (1, g.to_bits()),
        };
        Ok(CacheKey {
            shift,
            scale: params.scale().to_bits(),
            retained: params.retained(basis)?,
            n: basis.n(),
            lambda1: basis.eigenvalue(0).to_bits(),
        })
    }
}

/// Windows kept across spectrogram calls that share a basis and parameters.
/// A call with different `β`/`γ`, `c` or `K` empties the cache first.
#[derive(Debug, Default)]
pub struct WindowCache {
    key: Option<CacheKey>,
    windows: HashMap<usize, Window>,
}

impl WindowCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn get(&self, vertex: usize) -> Option<&Window> {
        self.windows.get(&vertex)
    }

    /// Computes any windows not already cached for `vertices`.
    pub fn fill(
        &mut self,
        exec: Execution,
        graph: &Graph,
        basis: &EigenBasis,
        params: &LocalizationParams,
        vertices: &[usize],
    ) -> Result<()> {
        check_basis(graph, basis)?;
        let key = CacheKey::new(basis, params)?;
        if self.key != Some(key) {
            self.windows.clear();
            self.key = Some(key);
        }
        let mut missing: Vec<usize> = vertices
            .iter()
            .copied()
            .filter(|v| !self.windows.contains_key(v))
            .collect();
        missing.sort_unstable();
        missing.dedup();
        for &v in &missing {
            graph.check_vertex(v)?;
        }
        let localizer = Localizer::new(graph, basis, params)?;
        let computed = exec.try_map(&missing, |v| localizer.window(graph, v, params))?;
        self.windows.extend(missing.into_iter().zip(computed));
        Ok(())
    }
}

/// Like [`spectrogram_with`], reusing and filling `cache`.
pub fn spectrogram_cached(
    cache: &mut WindowCache,
    exec: Execution,
    graph: &Graph,
    basis: &EigenBasis,
    f: &SignalVector,
    params: &LocalizationParams,
    vertices: Option<&[usize]>,
) -> Result<SpectrogramMatrix> {
    check_basis(graph, basis)?;
    f.check_len(graph.n())?;
    let vertices = resolve_vertices(graph, vertices)?;
    cache.fill(exec, graph, basis, params, &vertices)?;
    let modulation = ppr_modulation(graph, basis, params.retained(basis)?);
    let cache = &*cache;
    let rows = exec.try_map(&vertices, |v| {
        let w = cache.get(v).expect("window filled above");
        Ok(modulation.energy_row(f.values(), w.values()))
    })?;
    Ok(SpectrogramMatrix::from_rows(
        vertices,
        rows,
        Method::Ppr {
            shift: params.shift(),
            frequencies: modulation.count(),
        },
    ))
}

/// Per row, the frequency index with the largest magnitude (smallest index
/// on ties).
pub fn dominant_frequency_map(spec: &SpectrogramMatrix) -> Vec<usize> {
    (0..spec.rows()).map(|r| argmax(spec.row(r))).collect()
}

/// Pearson correlation between the spectral signature (spectrogram row) of
/// `vertex` and that of every row. Rows with constant signatures have no
/// defined correlation and come back as `None`.
pub fn signature_correlation(spec: &SpectrogramMatrix, vertex: usize) -> Result<Vec<Option<f64>>> {
    let seed_row = spec.row_of(vertex).ok_or(Error::VertexOutOfRange {
        vertex,
        n: spec.rows(),
    })?;
    let centered: Vec<Option<Vec<f64>>> = (0..spec.rows())
        .map(|r| {
            let row = spec.row(r);
            let mean = row.iter().sum::<f64>() / row.len() as f64;
            let c: Vec<f64> = row.iter().map(|x| x - mean).collect();
            let norm = dot(&c, &c).sqrt();
            if norm > 0.0 && norm.is_finite() {
                Some(c.into_iter().map(|x| x / norm).collect())
            } else {
                None
            }
        })
        .collect();
    let seed = centered[seed_row]
        .as_ref()
        .ok_or(Error::ZeroVarianceSignature(vertex))?;
    Ok(centered
        .iter()
        .enumerate()
        .map(|(r, c)| {
            if r == seed_row {
                Some(1.0)
            } else {
                c.as_ref().map(|c| dot(seed, c))
            }
        })
        .collect())
}
