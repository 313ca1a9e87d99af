//! Dense symmetric eigendecomposition and the graph Fourier transform.
//!
//! [`EigenBasis`] keeps the `K` smallest eigenpairs of a symmetric operator,
//! sorted by eigenvalue, with every eigenvector scaled so that its entry of
//! largest magnitude is positive (first such index on ties). The decomposition
//! itself is delegated to faer's self-adjoint solver, built without its rayon
//! backend so that results do not depend on the thread count.
//!
//! # Cache file format
//!
//! [`EigenBasis::write_cache`] produces a little-endian binary file:
//!
//! ```text
//! offset  size    field
//! 0       16      magic "SGFT-EIGBASIS-01"
//! 16      1       operator kind (0 normalized, 1 combinatorial, 2 custom)
//! 17      8       n  (u64)
//! 25      8       K  (u64)
//! 33      32      SHA-256 content hash of the source graph (zeros if none)
//! 65      8*K     eigenvalues (f64), nondecreasing
//! ..      8*n*K   eigenvectors (f64), column-major
//! ..      32      SHA-256 of every preceding byte
//! ```

use std::io::{Read, Write};

use faer::{Mat, Side};
use ndarray::Array2;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::Graph;

const CACHE_MAGIC: &[u8; 16] = b"SGFT-EIGBASIS-01";
const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    NormalizedLaplacian,
    CombinatorialLaplacian,
    /// Any other symmetric matrix.
    Custom,
}

impl OperatorKind {
    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::NormalizedLaplacian => "normalized Laplacian",
            OperatorKind::CombinatorialLaplacian => "combinatorial Laplacian",
            OperatorKind::Custom => "custom operator",
        }
    }

    fn tag(self) -> u8 {
        match self {
            OperatorKind::NormalizedLaplacian => 0,
            OperatorKind::CombinatorialLaplacian => 1,
            OperatorKind::Custom => 2,
        }
    }

    fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(OperatorKind::NormalizedLaplacian),
            1 => Some(OperatorKind::CombinatorialLaplacian),
            2 => Some(OperatorKind::Custom),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    kind: OperatorKind,
    n: usize,
    values: Vec<f64>,
    // column-major n x K
    vectors: Vec<f64>,
}

impl EigenBasis {
    /// Computes the `k` smallest eigenpairs of a symmetric matrix.
    pub fn compute(matrix: &Array2<f64>, k: usize, kind: OperatorKind) -> Result<Self> {
        let (n, m) = matrix.dim();
        if n != m {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m,
            });
        }
        if k == 0 || k > n {
            return Err(Error::InvalidRetainedCount { k, n });
        }
        let scale = matrix.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
        let mut max_asymmetry = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                max_asymmetry = max_asymmetry.max((matrix[[i, j]] - matrix[[j, i]]).abs());
            }
        }
        if max_asymmetry > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric { max_asymmetry });
        }

        let mat = Mat::<f64>::from_fn(n, n, |i, j| matrix[[i, j]]);
        let evd = mat
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::ConvergenceFailure(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        let u = evd.U();

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
        order.truncate(k);

        let mut values = Vec::with_capacity(k);
        let mut vectors = Vec::with_capacity(n * k);
        for &col in &order {
            let lambda = s[col];
            if !lambda.is_finite() {
                return Err(Error::ConvergenceFailure(format!(
                    "non-finite eigenvalue {lambda}"
                )));
            }
            values.push(lambda);
            let start = vectors.len();
            vectors.extend((0..n).map(|i| u[(i, col)]));
            fix_sign(&mut vectors[start..]);
        }
        Ok(EigenBasis {
            kind,
            n,
            values,
            vectors,
        })
    }

    /// Eigenbasis of the normalized (`𝓛`) or combinatorial (`L`) Laplacian.
    ///
    /// Graphs are connected, so the kernel is one-dimensional and known in
    /// closed form (`D^{1/2} 1` resp. `1`, normalized). The first eigenpair
    /// is replaced by that exact vector with eigenvalue 0 and the remaining
    /// vectors are projected off it. Without this, a small spectral gap lets
    /// the solver mix the kernel with the next mode at the `ε / λ_2` level.
    pub fn of_graph(graph: &Graph, kind: OperatorKind, k: usize) -> Result<Self> {
        let (matrix, kernel): (_, Vec<f64>) = match kind {
            OperatorKind::NormalizedLaplacian => (
                graph.normalized_laplacian(),
                graph.degrees().iter().map(|d| d.sqrt()).collect(),
            ),
            OperatorKind::CombinatorialLaplacian => (graph.laplacian(), vec![1.0; graph.n()]),
            OperatorKind::Custom => {
                return Err(Error::InvalidParameter(
                    "a graph operator must be one of the two Laplacians".into(),
                ))
            }
        };
        let mut basis = Self::compute(&matrix, k, kind)?;
        basis.pin_kernel(kernel);
        Ok(basis)
    }

    fn pin_kernel(&mut self, mut kernel: Vec<f64>) {
        let norm = dot(&kernel, &kernel).sqrt();
        kernel.iter_mut().for_each(|x| *x /= norm);
        let n = self.n;
        self.values[0] = 0.0;
        self.vectors[..n].copy_from_slice(&kernel);
        for col in 1..self.values.len() {
            let v = &mut self.vectors[col * n..(col + 1) * n];
            let c = dot(&kernel, v);
            axpy(-c, &kernel, v);
            let norm = dot(v, v).sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            fix_sign(v);
        }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of retained eigenpairs.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.n
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn eigenvector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }

    pub fn eigenvectors(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.vectors.chunks_exact(self.n)
    }

    /// Eigenvectors as an `n x K` matrix.
    pub fn to_array(&self) -> Array2<f64> {
        Array2::from_shape_fn((self.n, self.len()), |(i, k)| self.vectors[k * self.n + i])
    }

    /// Keeps the first `k` eigenpairs.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.len() {
            return Err(Error::InvalidRetainedCount { k, n: self.len() });
        }
        Ok(EigenBasis {
            kind: self.kind,
            n: self.n,
            values: self.values[..k].to_vec(),
            vectors: self.vectors[..k * self.n].to_vec(),
        })
    }

    pub(crate) fn require_kind(&self, expected: OperatorKind) -> Result<()> {
        if self.kind == expected {
            Ok(())
        } else {
            Err(Error::WrongOperator {
                expected: expected.name(),
                found: self.kind.name(),
            })
        }
    }

    pub(crate) fn require_full(&self) -> Result<()> {
        if self.is_full() {
            Ok(())
        } else {
            Err(Error::TruncatedBasis {
                k: self.len(),
                n: self.n,
            })
        }
    }

    pub(crate) fn require_len(&self, len: usize) -> Result<()> {
        if len == self.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n,
                found: len,
            })
        }
    }

    /// Graph Fourier transform `f̂ = Vᵀ f`. Needs the full basis.
    pub fn gft(&self, signal: &[f64]) -> Result<Vec<f64>> {
        self.require_full()?;
        self.require_len(signal.len())?;
        Ok(self.eigenvectors().map(|v| dot(v, signal)).collect())
    }

    /// Inverse graph Fourier transform `f = V f̂`. Needs the full basis.
    pub fn igft(&self, spectrum: &[f64]) -> Result<Vec<f64>> {
        self.require_full()?;
        self.require_len(spectrum.len())?;
        let mut out = vec![0.0; self.n];
        for (v, &c) in self.eigenvectors().zip(spectrum) {
            axpy(c, v, &mut out);
        }
        Ok(out)
    }

    pub fn write_cache<W: Write>(&self, mut out: W, graph_hash: Option<&[u8; 32]>) -> Result<()> {
        let mut buf = Vec::with_capacity(97 + 8 * self.len() * (self.n + 1));
        buf.extend_from_slice(CACHE_MAGIC);
        buf.push(self.kind.tag());
        buf.extend_from_slice(&(self.n as u64).to_le_bytes());
        buf.extend_from_slice(&(self.len() as u64).to_le_bytes());
        buf.extend_from_slice(graph_hash.unwrap_or(&[0u8; 32]));
        for x in self.values.iter().chain(&self.vectors) {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        let digest: [u8; 32] = Sha256::digest(&buf).into();
        buf.extend_from_slice(&digest);
        out.write_all(&buf)?;
        Ok(())
    }

    /// Reads a cache file. When `expected_hash` is given, a file written for
    /// a different graph is refused with [`Error::StaleCache`].
    pub fn read_cache<R: Read>(mut input: R, expected_hash: Option<&[u8; 32]>) -> Result<Self> {
        let mut buf = Vec::new();
        input.read_to_end(&mut buf)?;
        if buf.len() < 65 + 32 || &buf[..16] != CACHE_MAGIC {
            return Err(Error::CacheFormat("missing or unknown magic header".into()));
        }
        let (body, digest) = buf.split_at(buf.len() - 32);
        if Sha256::digest(body).as_slice() != digest {
            return Err(Error::CacheFormat(
                "checksum mismatch (file corrupted)".into(),
            ));
        }
        let kind = OperatorKind::from_tag(body[16])
            .ok_or_else(|| Error::CacheFormat(format!("unknown operator tag {}", body[16])))?;
        let read_u64 = |at: usize| u64::from_le_bytes(body[at..at + 8].try_into().unwrap());
        let n = read_u64(17) as usize;
        let k = read_u64(25) as usize;
        let stored_hash: &[u8] = &body[33..65];
        if k == 0 || k > n {
            return Err(Error::CacheFormat(format!(
                "invalid dimensions n={n} K={k}"
            )));
        }
        let payload = &body[65..];
        if payload.len() != 8 * k * (n + 1) {
            return Err(Error::CacheFormat(format!(
                "payload is {} bytes, expected {} for n={n} K={k}",
                payload.len(),
                8 * k * (n + 1)
            )));
        }
        if let Some(expected) = expected_hash {
            if stored_hash != expected.as_slice() {
                return Err(Error::StaleCache);
            }
        }
        let mut floats = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
        let values: Vec<f64> = floats.by_ref().take(k).collect();
        let vectors: Vec<f64> = floats.collect();
        if values.windows(2).any(|w| w[0].partial_cmp(&w[1]).is_none_or(|o| o.is_gt())) {
            return Err(Error::CacheFormat("eigenvalues are not sorted".into()));
        }
        Ok(EigenBasis {
            kind,
            n,
            values,
            vectors,
        })
    }
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
