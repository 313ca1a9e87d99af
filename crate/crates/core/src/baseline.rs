//! Convolutional windowed graph Fourier transform (heat-kernel window).
//!
//! Everything here works in the eigenbasis `V` of the combinatorial
//! Laplacian:
//!
//! - convolution `f * g = V (f̂ ∘ ĝ)`
//! - translation `T_i g = sqrt(n) V ((Vᵀ)_{:i} ∘ ĝ)`
//! - modulation `M̃_k f = sqrt(n) f ∘ V_{:k}`
//! - transform `SGFT_f(i, k) = ⟨f, M̃_k T_i g⟩`
//!
//! with the window defined spectrally as `ĝ_k = exp(-τ λ_k)`. Translation
//! needs all `n` modes; truncation only limits the modulation range.

use crate::error::Result;
use crate::par::Execution;
use crate::sgft::{Method, Modulation, SignalVector, SpectrogramMatrix};
use crate::spectral::{axpy, EigenBasis, OperatorKind};
use crate::Error;

fn check_basis(basis: &EigenBasis) -> Result<()> {
    basis.require_kind(OperatorKind::CombinatorialLaplacian)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatKernelWindow {
    tau: f64,
    spectrum: Vec<f64>,
    vertex: Vec<f64>,
}

impl HeatKernelWindow {
    /// `ĝ_k = exp(-τ λ_k)` over the full combinatorial-Laplacian basis.
    /// Round-off negative eigenvalues are clamped to zero so that `ĝ ≤ 1`.
    pub fn new(basis: &EigenBasis, tau: f64) -> Result<Self> {
        check_basis(basis)?;
        basis.require_full()?;
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must be positive and finite, got {tau}"
            )));
        }
        let spectrum: Vec<f64> = basis
            .eigenvalues()
            .iter()
            .map(|&l| (-tau * l.max(0.0)).exp())
            .collect();
        let vertex = basis.igft(&spectrum)?;
        Ok(HeatKernelWindow {
            tau,
            spectrum,
            vertex,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// The untranslated window `g = V ĝ`.
    pub fn vertex_values(&self) -> &[f64] {
        &self.vertex
    }
}

/// `f * g = V (f̂ ∘ ĝ)`.
pub fn graph_convolve(
    basis: &EigenBasis,
    f: &SignalVector,
    g: &SignalVector,
) -> Result<SignalVector> {
    check_basis(basis)?;
    let fh = basis.gft(f.values())?;
    let gh = basis.gft(g.values())?;
    let prod: Vec<f64> = fh.iter().zip(&gh).map(|(a, b)| a * b).collect();
    basis.igft(&prod).map(SignalVector::new)
}

/// `T_i g = sqrt(n) V ((Vᵀ)_{:i} ∘ ĝ)`.
pub fn translate(basis: &EigenBasis, vertex: usize, g: &SignalVector) -> Result<SignalVector> {
    check_basis(basis)?;
    let gh = basis.gft(g.values())?;
    translate_spectrum(basis, vertex, &gh).map(SignalVector::new)
}

pub(crate) fn translate_spectrum(
    basis: &EigenBasis,
    vertex: usize,
    spectrum: &[f64],
) -> Result<Vec<f64>> {
    basis.require_full()?;
    basis.require_len(spectrum.len())?;
    if vertex >= basis.n() {
        return Err(Error::VertexOutOfRange {
            vertex,
            n: basis.n(),
        });
    }
    let root_n = (basis.n() as f64).sqrt();
    let mut out = vec![0.0; basis.n()];
    for (v, &gk) in basis.eigenvectors().zip(spectrum) {
        let c = root_n * v[vertex] * gk;
        // heat-kernel coefficients underflow to exact zeros at high frequency
        if c != 0.0 {
            axpy(c, v, &mut out);
        }
    }
    Ok(out)
}

fn conv_modulation(basis: &EigenBasis, count: usize) -> Modulation<'_> {
    let root_n = (basis.n() as f64).sqrt();
    Modulation::new(basis, vec![root_n; basis.n()], count)
}

/// `M̃_k f = sqrt(n) f ∘ V_{:k}`.
pub fn baseline_modulate(basis: &EigenBasis, k: usize, f: &SignalVector) -> Result<SignalVector> {
    check_basis(basis)?;
    basis.require_len(f.len())?;
    conv_modulation(basis, basis.len())
        .apply(k, f.values())
        .map(SignalVector::new)
}

/// `⟨f, M̃_k T_i g⟩`.
pub fn baseline_sgft(
    basis: &EigenBasis,
    f: &SignalVector,
    vertex: usize,
    k: usize,
    window: &HeatKernelWindow,
) -> Result<f64> {
    check_basis(basis)?;
    basis.require_len(f.len())?;
    let translated = translate_spectrum(basis, vertex, window.spectrum())?;
    conv_modulation(basis, basis.len()).coefficient(k, f.values(), &translated)
}

pub fn baseline_spectrogram(
    basis: &EigenBasis,
    f: &SignalVector,
    window: &HeatKernelWindow,
    frequencies: usize,
    vertices: Option<&[usize]>,
) -> Result<SpectrogramMatrix> {
    baseline_spectrogram_with(
        Execution::default(),
        basis,
        f,
        window,
        frequencies,
        vertices,
    )
}

/// Squared baseline coefficients for frequencies `0..frequencies`.
pub fn baseline_spectrogram_with(
    exec: Execution,
    basis: &EigenBasis,
    f: &SignalVector,
    window: &HeatKernelWindow,
    frequencies: usize,
    vertices: Option<&[usize]>,
) -> Result<SpectrogramMatrix> {
    check_basis(basis)?;
    basis.require_full()?;
    basis.require_len(f.len())?;
    if frequencies == 0 || frequencies > basis.len() {
        return Err(Error::InvalidRetainedCount {
            k: frequencies,
            n: basis.len(),
        });
    }
    let vertices: Vec<usize> = match vertices {
        Some(vs) => vs.to_vec(),
        None => (0..basis.n()).collect(),
    };
    let modulation = conv_modulation(basis, frequencies);
    let rows = exec.try_map(&vertices, |v| {
        let translated = translate_spectrum(basis, v, window.spectrum())?;
        Ok(modulation.energy_row(f.values(), &translated))
    })?;
    Ok(SpectrogramMatrix::from_rows(
        vertices,
        rows,
        Method::Conv {
            tau: window.tau(),
            frequencies,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ring, Graph};
    use crate::spectral::dot;
    use std::f64::consts::PI;

    fn lbasis(g: &Graph) -> EigenBasis {
        EigenBasis::of_graph(g, OperatorKind::CombinatorialLaplacian, g.n()).unwrap()
    }

    fn signal(n: usize, seed: f64) -> SignalVector {
        SignalVector::new((0..n).map(|i| (seed * (i as f64 + 1.0)).sin()).collect())
    }

    #[test]
    fn identity_kernel_and_commutativity() {
        let g = Graph::new(
            5,
            [
                (0, 1, 1.0),
                (1, 2, 2.0),
                (2, 3, 0.5),
                (3, 4, 1.0),
                (4, 0, 3.0),
                (0, 2, 1.0),
            ],
        )
        .unwrap();
        let b = lbasis(&g);
        let f = signal(5, 0.9);
        let h = signal(5, 2.3);
        let delta_like = SignalVector::new(b.igft(&[1.0; 5]).unwrap());
        let same = graph_convolve(&b, &f, &delta_like).unwrap();
        for (a, c) in same.values().iter().zip(f.values()) {
            assert!((a - c).abs() < 1e-12);
        }
        let fh = graph_convolve(&b, &f, &h).unwrap();
        let hf = graph_convolve(&b, &h, &f).unwrap();
        for (a, c) in fh.values().iter().zip(hf.values()) {
            assert!((a - c).abs() < 1e-10);
        }
        // spectral identity
        let spec = b.gft(fh.values()).unwrap();
        let want: Vec<f64> = b
            .gft(f.values())
            .unwrap()
            .iter()
            .zip(b.gft(h.values()).unwrap())
            .map(|(x, y)| x * y)
            .collect();
        for (a, c) in spec.iter().zip(&want) {
            assert!((a - c).abs() < 1e-10);
        }
    }

    #[test]
    fn ring_convolution_matches_circular_convolution() {
        // On an unweighted ring, V(f̂ ∘ ĝ) with a real symmetric ĝ equals
        // circular convolution of f with the kernel whose DFT is ĝ(λ(k)).
        let n = 8;
        let g = ring(n);
        let b = lbasis(&g);
        let w = HeatKernelWindow::new(&b, 0.7).unwrap();
        let f = signal(n, 1.3);
        let conv = graph_convolve(&b, &f, &SignalVector::new(w.vertex_values().to_vec())).unwrap();
        // brute force: kernel h[m] = (1/n) Σ_k e^{-τ(2-2cos(2πk/n))} cos(2πkm/n)
        let h: Vec<f64> = (0..n)
            .map(|m| {
                (0..n)
                    .map(|k| {
                        let lam = 2.0 - 2.0 * (2.0 * PI * k as f64 / n as f64).cos();
                        (-0.7 * lam).exp() * (2.0 * PI * (k * m) as f64 / n as f64).cos()
                    })
                    .sum::<f64>()
                    / n as f64
            })
            .collect();
        for i in 0..n {
            let want: f64 = (0..n).map(|j| f.values()[j] * h[(i + n - j) % n]).sum();
            assert!((conv.values()[i] - want).abs() < 1e-10);
        }
    }

    #[test]
    fn translation_on_ring_peaks_at_target_and_sum_identity() {
        let g = ring(60);
        let b = lbasis(&g);
        let w = HeatKernelWindow::new(&b, 3.0).unwrap();
        let gsig = SignalVector::new(w.vertex_values().to_vec());
        for i in [0, 17, 42] {
            let t = translate(&b, i, &gsig).unwrap();
            let best = crate::ppr::argmax(t.values());
            assert_eq!(best, i);
            let total: f64 = t.values().iter().sum();
            let v1 = b.eigenvector(0);
            let want = (60f64).sqrt() * w.spectrum()[0] * v1[i] * v1.iter().sum::<f64>();
            assert!((total - want).abs() < 1e-10);
        }
    }

    #[test]
    fn baseline_modulation_properties() {
        let g = Graph::new(4, [(0, 1, 1.0), (1, 2, 5.0), (2, 3, 0.1), (3, 0, 1.0)]).unwrap();
        let b = lbasis(&g);
        let f = signal(4, 0.4);
        let m1 = baseline_modulate(&b, 0, &f).unwrap();
        for (a, c) in m1.values().iter().zip(f.values()) {
            assert!((a - c).abs() < 1e-10);
        }
        let zero = baseline_modulate(&b, 2, &SignalVector::constant(4, 0.0)).unwrap();
        assert!(zero.values().iter().all(|&x| x == 0.0));
        for k in 0..4 {
            let m = baseline_modulate(&b, k, &f).unwrap();
            let vinf = b.eigenvector(k).iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let bound = 2.0 * vinf * dot(f.values(), f.values()).sqrt();
            assert!(dot(m.values(), m.values()).sqrt() <= bound + 1e-12);
        }
        assert!(matches!(
            baseline_modulate(&b, 4, &f),
            Err(Error::FrequencyOutOfRange { .. })
        ));
    }

    #[test]
    fn heat_kernel_monotone_in_tau() {
        let g = ring(12);
        let b = lbasis(&g);
        let a = HeatKernelWindow::new(&b, 1.0).unwrap();
        let c = HeatKernelWindow::new(&b, 2.5).unwrap();
        for ((x, y), l) in a.spectrum().iter().zip(c.spectrum()).zip(b.eigenvalues()) {
            assert!(*x > 0.0 && *x <= 1.0);
            if l.abs() < 1e-12 {
                assert_eq!(x, y);
            } else {
                assert!(y < x);
            }
        }
        assert!(HeatKernelWindow::new(&b, 0.0).is_err());
        let trunc = b.truncated(5).unwrap();
        assert!(matches!(
            HeatKernelWindow::new(&trunc, 1.0),
            Err(Error::TruncatedBasis { .. })
        ));
    }

    #[test]
    fn baseline_sgft_self_product_and_spectrogram() {
        let g = ring(20);
        let b = lbasis(&g);
        let w = HeatKernelWindow::new(&b, 2.0).unwrap();
        let t = translate_spectrum(&b, 7, w.spectrum()).unwrap();
        let f = SignalVector::new(t.clone());
        let c = baseline_sgft(&b, &f, 7, 0, &w).unwrap();
        assert!((c - dot(&t, &t)).abs() < 1e-10);
        let zero =
            baseline_spectrogram(&b, &SignalVector::constant(20, 0.0), &w, 10, None).unwrap();
        assert!(zero.values().iter().all(|&x| x == 0.0));
        let h = signal(20, 0.8);
        let spec = baseline_spectrogram(&b, &h, &w, 10, Some(&[3, 7])).unwrap();
        assert_eq!(spec.frequencies(), 10);
        for (r, &v) in [3usize, 7].iter().enumerate() {
            for k in 0..10 {
                let x = baseline_sgft(&b, &h, v, k, &w).unwrap();
                assert!((spec.get(r, k) - x * x).abs() < 1e-12);
            }
        }
        assert!(baseline_spectrogram(&b, &h, &w, 0, None).is_err());
    }

    #[test]
    fn baseline_rejects_normalized_basis() {
        let g = ring(6);
        let nb = EigenBasis::of_graph(&g, OperatorKind::NormalizedLaplacian, 6).unwrap();
        assert!(matches!(
            HeatKernelWindow::new(&nb, 1.0),
            Err(Error::WrongOperator { .. })
        ));
    }
}
