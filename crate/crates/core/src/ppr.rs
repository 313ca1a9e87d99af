//! Locally-biased spectral solutions and the windows built from them.
//!
//! The seed-correlated spectral problem is solved through its closed form
//!
//! ```text
//! x* = c (D^{-1/2} U) (Λ - γI)^+ (D^{-1/2} U)ᵀ D s
//! ```
//!
//! over the retained eigenpairs of the normalized Laplacian. Because
//! `(D^{-1/2} U)ᵀ D s = Uᵀ D^{1/2} s`, the k-th spectral coefficient is
//! `c (u_kᵀ D^{1/2} s) / (λ_k - γ)`. Modes with `|λ_k - γ| < 1e-12` are
//! dropped, which is the Moore–Penrose convention on a diagonal.
//!
//! For `γ < 0`, `c = -γ` and the full basis, `x*` is the degree-normalized
//! personalized PageRank vector with teleport `1 - α`, `α = 1 / (1 - γ)`;
//! [`verify_ppr`] measures how well a vector satisfies that equation.

use crate::error::{Error, Result};
use crate::graph::{Graph, SeedVector};
use crate::spectral::{axpy, dot, EigenBasis, OperatorKind};

const PINV_TOL: f64 = 1e-12;

/// Where the spectral shift `γ` comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shift {
    /// `γ = λ_1 - β` using the realized smallest eigenvalue.
    Beta(f64),
    /// An explicit `γ`.
    Gamma(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationParams {
    shift: Shift,
    scale: f64,
    retained: Option<usize>,
}

impl LocalizationParams {
    /// `γ = λ_1 - β`, `c = 1`, every eigenpair of the basis.
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must be positive and finite, got {beta}"
            )));
        }
        Ok(LocalizationParams {
            shift: Shift::Beta(beta),
            scale: 1.0,
            retained: None,
        })
    }

    pub fn with_gamma(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma must be finite, got {gamma}"
            )));
        }
        Ok(LocalizationParams {
            shift: Shift::Gamma(gamma),
            scale: 1.0,
            retained: None,
        })
    }

    pub fn scale_by(mut self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale c must be positive and finite, got {c}"
            )));
        }
        self.scale = c;
        Ok(self)
    }

    /// Use only the first `k` eigenpairs of whatever basis is supplied.
    pub fn retain(mut self, k: usize) -> Self {
        self.retained = Some(k);
        self
    }

    pub fn shift(&self) -> Shift {
        self.shift
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn retained_hint(&self) -> Option<usize> {
        self.retained
    }

    pub fn gamma(&self, basis: &EigenBasis) -> f64 {
        match self.shift {
            Shift::Beta(beta) => basis.eigenvalue(0) - beta,
            Shift::Gamma(gamma) => gamma,
        }
    }

    pub fn retained(&self, basis: &EigenBasis) -> Result<usize> {
        match self.retained {
            None => Ok(basis.len()),
            Some(k) if k >= 1 && k <= basis.len() => Ok(k),
            Some(k) => Err(Error::InvalidRetainedCount { k, n: basis.len() }),
        }
    }
}

/// Precomputed pieces shared by every solve against one graph and basis.
pub(crate) struct Localizer<'a> {
    basis: &'a EigenBasis,
    sqrt_degree: Vec<f64>,
    inv_sqrt_degree: Vec<f64>,
    gamma: f64,
    scale: f64,
    retained: usize,
}

impl<'a> Localizer<'a> {
    pub(crate) fn new(
        graph: &Graph,
        basis: &'a EigenBasis,
        params: &LocalizationParams,
    ) -> Result<Self> {
        basis.require_kind(OperatorKind::NormalizedLaplacian)?;
        basis.require_len(graph.n())?;
        let retained = params.retained(basis)?;
        let gamma = params.gamma(basis);
        if retained >= 2 && gamma >= basis.eigenvalue(1) {
            return Err(Error::GammaOutOfRange {
                gamma,
                lambda2: basis.eigenvalue(1),
            });
        }
        Ok(Localizer {
            basis,
            sqrt_degree: graph.degrees().iter().map(|d| d.sqrt()).collect(),
            inv_sqrt_degree: graph.degrees().iter().map(|d| 1.0 / d.sqrt()).collect(),
            gamma,
            scale: params.scale(),
            retained,
        })
    }

    pub(crate) fn coefficients(&self, seed: &[f64]) -> Vec<f64> {
        let weighted: Vec<f64> = seed
            .iter()
            .zip(&self.sqrt_degree)
            .map(|(s, r)| s * r)
            .collect();
        (0..self.retained)
            .map(|k| {
                let gap = self.basis.eigenvalue(k) - self.gamma;
                if gap.abs() < PINV_TOL {
                    0.0
                } else {
                    self.scale * dot(self.basis.eigenvector(k), &weighted) / gap
                }
            })
            .collect()
    }

    pub(crate) fn solve(&self, seed: &[f64]) -> Vec<f64> {
        let coefs = self.coefficients(seed);
        let mut x = vec![0.0; self.basis.n()];
        for (k, &c) in coefs.iter().enumerate() {
            if c != 0.0 {
                axpy(c, self.basis.eigenvector(k), &mut x);
            }
        }
        for (xi, r) in x.iter_mut().zip(&self.inv_sqrt_degree) {
            *xi *= r;
        }
        x
    }

    pub(crate) fn window(
        &self,
        graph: &Graph,
        vertex: usize,
        params: &LocalizationParams,
    ) -> Result<Window> {
        let seed = SeedVector::singleton(graph, vertex)?;
        let x = self.solve(seed.values());
        Window::from_solution(&x, vertex, *params)
    }
}

/// Spectral coefficients of `x*` in the `D^{-1/2} U` basis.
pub fn spectral_coefficients(
    graph: &Graph,
    basis: &EigenBasis,
    seed: &SeedVector,
    params: &LocalizationParams,
) -> Result<Vec<f64>> {
    basis.require_len(seed.values().len())?;
    Ok(Localizer::new(graph, basis, params)?.coefficients(seed.values()))
}

/// Closed-form solution `x*` of the seed-biased spectral problem.
pub fn local_spectral_solution(
    graph: &Graph,
    basis: &EigenBasis,
    seed: &SeedVector,
    params: &LocalizationParams,
) -> Result<Vec<f64>> {
    basis.require_len(seed.values().len())?;
    Ok(Localizer::new(graph, basis, params)?.solve(seed.values()))
}

/// Relative residual of the degree-normalized PPR equation
/// `Dp = (1 - α) Ds + α A D^{-1} (Dp)` at `p = x_star`.
///
/// Only meaningful when `x_star` was produced with `γ < 0`, `c = -γ` and
/// the full basis; anything else is a [`Error::PreconditionViolated`].
pub fn verify_ppr(
    graph: &Graph,
    basis: &EigenBasis,
    x_star: &[f64],
    seed: &SeedVector,
    params: &LocalizationParams,
) -> Result<f64> {
    basis.require_len(x_star.len())?;
    let gamma = params.gamma(basis);
    if gamma >= 0.0 {
        return Err(Error::PreconditionViolated(format!(
            "gamma must be negative, got {gamma}"
        )));
    }
    if (params.scale() + gamma).abs() > 1e-12 * gamma.abs().max(1.0) {
        return Err(Error::PreconditionViolated(format!(
            "scale must equal -gamma = {}, got {}",
            -gamma,
            params.scale()
        )));
    }
    if params.retained(basis)? != basis.n() {
        return Err(Error::PreconditionViolated(
            "the PPR identity needs the full eigenbasis".into(),
        ));
    }
    let alpha = 1.0 / (1.0 - gamma);
    let d = graph.degrees();
    // A D^{-1} (D p) = A p
    let ap = graph.adjacency_apply(x_star);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..graph.n() {
        let dp = d[i] * x_star[i];
        let r = dp - (1.0 - alpha) * d[i] * seed.values()[i] - alpha * ap[i];
        num += r * r;
        den += dp * dp;
    }
    Ok(num.sqrt() / den.sqrt())
}

/// A nonnegative, L1-normalized vertex function localized around a seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    values: Vec<f64>,
    seed: usize,
    params: LocalizationParams,
}

impl Window {
    fn from_solution(x: &[f64], seed: usize, params: LocalizationParams) -> Result<Self> {
        let mass: f64 = x.iter().filter(|&&v| v > 0.0).sum();
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::DegenerateWindow(seed));
        }
        let values = x.iter().map(|&v| v.max(0.0) / mass).collect();
        Ok(Window {
            values,
            seed,
            params,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seed(&self) -> usize {
        self.seed
    }

    pub fn params(&self) -> &LocalizationParams {
        &self.params
    }

    pub fn argmax(&self) -> usize {
        argmax(&self.values)
    }
}

/// Local window at `vertex`: the positive part of `x*` for `s = unit({vertex})`,
/// normalized to unit L1 mass.
pub fn window(
    graph: &Graph,
    basis: &EigenBasis,
    vertex: usize,
    params: &LocalizationParams,
) -> Result<Window> {
    graph.check_vertex(vertex)?;
    Localizer::new(graph, basis, params)?.window(graph, vertex, params)
}

/// Index of the largest entry, first on ties.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ring;

    fn norm(v: &[f64]) -> f64 {
        dot(v, v).sqrt()
    }

    /// Dense Gaussian elimination with partial pivoting; test oracle only.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            for row in col + 1..n {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for row in (0..n).rev() {
            let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
            x[row] = (b[row] - s) / a[row][row];
        }
        x
    }

    fn weighted_ring() -> Graph {
        Graph::new(
            200,
            (0..200).map(|i| {
                let j = (i + 1) % 200;
                let w = if i == 40 || i == 159 { 1e-3 } else { 1.0 };
                (i, j, w)
            }),
        )
        .unwrap()
    }

    #[test]
    fn ring_solution_matches_dense_shifted_solve() {
        let g = ring(200);
        let basis = EigenBasis::of_graph(&g, OperatorKind::NormalizedLaplacian, 200).unwrap();
        let params = LocalizationParams::new(1e-4).unwrap();
        let s = SeedVector::singleton(&g, 50).unwrap();
        let x = local_spectral_solution(&g, &basis, &s, &params).unwrap();
        assert_eq!(argmax(&x), 50);

        // (L - γD) x = c D s
        let gamma = params.gamma(&basis);
        let l = g.laplacian();
        let d = g.degrees();
        let a: Vec<Vec<f64>> = (0..200)
            .map(|i| {
                (0..200)
                    .map(|j| l[[i, j]] - if i == j { gamma * d[i] } else { 0.0 })
                    .collect()
            })
            .collect();
        let rhs: Vec<f64> = (0..200).map(|i| d[i] * s.values()[i]).collect();
        let oracle = dense_solve(a, rhs);
        let diff: Vec<f64> = x.iter().zip(&oracle).map(|(p, q)| p - q).collect();
        assert!(
            norm(&diff) <= 1e-8 * norm(&oracle),
            "{}",
            norm(&diff) / norm(&oracle)
        );
    }

    #[test]
    fn solution_is_linear_in_scale() {
        let g = weighted_ring();
        let basis = EigenBasis::of_graph(&g, OperatorKind::NormalizedLaplacian, 200).unwrap();
        let s = SeedVector::singleton(&g, 45).unwrap();
        let p1 = LocalizationParams::new(1e-4).unwrap();
        let p2 = p1.scale_by(2.0).unwrap();
        let x1 = local_spectral_solution(&g, &basis, &s, &p1).unwrap();
        let x2 = local_spectral_solution(&g, &basis, &s, &p2).unwrap();
        for (a, b) in x1.iter().zip(&x2) {
            assert_eq!(2.0 * a, *b);
        }
    }

    #[test]
    fn near_second_eigenvalue_the_solution_aligns_with_the_fiedler_direction() {
        let g = weighted_ring();
        let basis = EigenBasis::of_graph(&g, OperatorKind::NormalizedLaplacian, 200).unwrap();
        let s = SeedVector::singleton(&g, 100).unwrap();
        let lambda2 = basis.eigenvalue(1);
        let v2: Vec<f64> = basis
            .eigenvector(1)
            .iter()
            .zip(g.degrees())
            .map(|(u, d)| u / d.sqrt())
            .collect();
        // at 1e-9 the gap to lambda2 is below the pseudoinverse cutoff and
        // the Fiedler mode is dropped entirely
        assert!(lambda2 * 1e-9 < 1e-12 && lambda2 * 1e-5 > 1e-12);
        let cosines: Vec<f64> = [1e-2, 1e-5, 1e-9]
            .iter()
            .map(|eps| {
                let params = LocalizationParams::with_gamma(lambda2 - eps * lambda2).unwrap();
                let x = local_spectral_solution(&g, &basis, &s, &params).unwrap();
                dot(&x, &v2).abs() / (norm(&x) * norm(&v2))
            })
            .collect();
        assert!(cosines[0] < cosines[1], "{cosines:?}");
        assert!(cosines[1] > 1.0 - 1e-9, "{cosines:?}");
        assert!(cosines[2] < 0.1, "{cosines:?}");
    }

    #[test]
    fn gamma_at_or_above_lambda2_is_rejected() {
        let g = ring(20);
        let basis = EigenBasis::of_graph(&g, OperatorKind::NormalizedLaplacian, 20).unwrap();
        let s = SeedVector::singleton(&g, 3).unwrap();
        let params = LocalizationParams::with_gamma(basis.eigenvalue(1)).unwrap();
        assert!(matches!(
            local_spectral_solution(&g, &basis, &s, &params),
            Err(Error::GammaOutOfRange { .. })
        ));
    }

    #[test]
    fn wrong_operator_is_rejected() {
        let g = ring(10);
        let basis = EigenBasis::of_graph(&g, OperatorKind::CombinatorialLaplacian, 10).unwrap();
        let params = LocalizationParams::new(1e-3).unwrap();
        assert!(matches!(
            window(&g, &basis, 0, &params),
            Err(Error::WrongOperator { .. })
        ));
    }

    #[test]
    fn coefficients_match_direct_projection() {
        let g = weighted_ring();
        let basis = EigenBasis::of_graph(&g, OperatorKind::NormalizedLaplacian, 200).unwrap();
        let s = SeedVector::unit(&g, &[10, 11, 12]).unwrap();
        let params = LocalizationParams::new(1e-3)
            .unwrap()
            .scale_by(3.0)
            .unwrap();
        let coefs = spectral_coefficients(&g, &basis, &s, &params).unwrap();
        let x = local_spectral_solution(&g, &basis, &s, &params).unwrap();
        // project D^{1/2} x* on u_k
        let y: Vec<f64> = x
            .iter()
            .zip(g.degrees())
            .map(|(v, d)| v * d.sqrt())
            .collect();
        let scale = coefs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        for k in 0..200 {
            let direct = dot(basis.eigenvector(k), &y);
            assert!((direct - coefs[k]).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn ppr_residual_and_preconditions() {
        let g = ring(200);
        let basis = EigenBasis::of_graph(&g, OperatorKind::NormalizedLaplacian, 200).unwrap();
        let s = SeedVector::singleton(&g, 50).unwrap();
        let p = LocalizationParams::new(1e-4).unwrap();
        let gamma = p.gamma(&basis);
        let p = p.scale_by(-gamma).unwrap();
        let x = local_spectral_solution(&g, &basis, &s, &p).unwrap();
        let res = verify_ppr(&g, &basis, &x, &s, &p).unwrap();
        assert!(res <= 1e-8, "{res}");

        let truncated = basis.truncated(100).unwrap();
        let xt = local_spectral_solution(&g, &truncated, &s, &p).unwrap();
        assert!(matches!(
            verify_ppr(&g, &truncated, &xt, &s, &p),
            Err(Error::PreconditionViolated(_))
        ));
        let wrong_c = LocalizationParams::new(1e-4).unwrap();
        assert!(matches!(
            verify_ppr(&g, &basis, &x, &s, &wrong_c),
            Err(Error::PreconditionViolated(_))
        ));
        let positive = LocalizationParams::with_gamma(1e-3).unwrap();
        assert!(matches!(
            verify_ppr(&g, &basis, &x, &s, &positive),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn noisy_solution_fails_the_ppr_check() {
        use rand::{Rng, SeedableRng};
        let g = ring(200);
        let basis = EigenBasis::of_graph(&g, OperatorKind::NormalizedLaplacian, 200).unwrap();
        let s = SeedVector::singleton(&g, 50).unwrap();
        let p = LocalizationParams::new(1e-4).unwrap();
        let p = p.scale_by(-p.gamma(&basis)).unwrap();
        let x = local_spectral_solution(&g, &basis, &s, &p).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let noise: Vec<f64> = (0..200).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let k = 1e-2 * norm(&x) / norm(&noise);
        let noisy: Vec<f64> = x.iter().zip(&noise).map(|(a, b)| a + k * b).collect();
        let res = verify_ppr(&g, &basis, &noisy, &s, &p).unwrap();
        assert!(res > 1e-4, "{res}");
    }

    #[test]
    fn ring_window_is_centered_and_symmetric() {
        let g = ring(200);
        let basis = EigenBasis::of_graph(&g, OperatorKind::NormalizedLaplacian, 200).unwrap();
        let params = LocalizationParams::new(1e-4).unwrap();
        let w = window(&g, &basis, 50, &params).unwrap();
        assert_eq!(w.argmax(), 50);
        let v = w.values();
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(v.iter().all(|&x| x >= 0.0));
        for d in 1..100 {
            assert!((v[50 + d] - v[(50 + 200 - d) % 200]).abs() < 1e-10);
        }
    }

    #[test]
    fn weighted_ring_window_stays_in_its_segment() {
        let g = weighted_ring();
        let basis = EigenBasis::of_graph(&g, OperatorKind::NormalizedLaplacian, 200).unwrap();
        let params = LocalizationParams::new(1e-4).unwrap();
        let w = window(&g, &basis, 45, &params).unwrap();
        assert_eq!(w.argmax(), 45);
        let inside: f64 = w.values()[41..=159].iter().sum();
        assert!(inside >= 0.99, "{inside}");
    }

    #[test]
    fn window_is_scale_invariant() {
        let g = weighted_ring();
        let basis = EigenBasis::of_graph(&g, OperatorKind::NormalizedLaplacian, 200).unwrap();
        let base = LocalizationParams::new(1e-4).unwrap();
        let w1 = window(&g, &basis, 70, &base).unwrap();
        for c in [0.5, 7.3, 1e6] {
            let w = window(&g, &basis, 70, &base.scale_by(c).unwrap()).unwrap();
            for (a, b) in w.values().iter().zip(w1.values()) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn invalid_params_and_vertices() {
        assert!(LocalizationParams::new(0.0).is_err());
        assert!(LocalizationParams::new(-1.0).is_err());
        assert!(LocalizationParams::new(f64::NAN).is_err());
        assert!(LocalizationParams::new(1.0).unwrap().scale_by(0.0).is_err());
        let g = ring(10);
        let basis = EigenBasis::of_graph(&g, OperatorKind::NormalizedLaplacian, 10).unwrap();
        let p = LocalizationParams::new(1e-3).unwrap();
        assert!(matches!(
            window(&g, &basis, 10, &p),
            Err(Error::VertexOutOfRange { .. })
        ));
        assert!(matches!(
            window(&g, &basis, 0, &p.retain(11)),
            Err(Error::InvalidRetainedCount { .. })
        ));
    }
}
