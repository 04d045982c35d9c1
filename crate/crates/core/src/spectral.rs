//! Symmetric eigendecomposition, functional calculus and the unitary
//! propagator `e^{−itℏ⁻¹M} = V e^{−itNΛ} Vᵀ`.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use parking_lot::RwLock;

use crate::bargmann::{BargmannState, SimulationScale};
use crate::cutops::{BandedHermitian, MatrixEntries};
use crate::error::{Error, Result};

const ITERATION_CAP_PER_DIM: usize = 200;

/// Ascending eigenvalues with orthonormal eigenvectors as columns.
///
/// Each eigenvector is signed so that its largest-magnitude component
/// (lowest index on ties) is positive.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.with_function_values(&self.eigenvalues)
    }

    fn with_function_values(&self, fvals: &DVector<f64>) -> DMatrix<f64> {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (mut col, f) in scaled.column_iter_mut().zip(fvals.iter()) {
            col *= *f;
        }
        scaled * v.transpose()
    }
}

pub fn eigendecompose(m: &BandedHermitian) -> Result<EigenSystem> {
    let dim = m.dim();
    let dense = m.to_dense();
    let cap = ITERATION_CAP_PER_DIM * dim.max(1);
    let eig = SymmetricEigen::try_new(dense, f64::EPSILON, cap).ok_or(Error::NoConvergence {
        dim,
        max_abs: m.max_abs(),
        cap,
    })?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues = DVector::from_iterator(dim, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut eigenvectors = DMatrix::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let mut pivot = 0;
        for i in 1..dim {
            if col[i].abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        eigenvectors.set_column(dst, &(col * sign));
    }
    Ok(EigenSystem { eigenvalues, eigenvectors })
}

/// `V f(Λ) Vᵀ` from an existing decomposition.
pub fn apply_function_with<F: Fn(f64) -> f64>(eig: &EigenSystem, f: F) -> Result<DMatrix<f64>> {
    let mut fvals = DVector::zeros(eig.dim());
    for (out, &lambda) in fvals.iter_mut().zip(eig.eigenvalues.iter()) {
        let v = f(lambda);
        if !v.is_finite() {
            return Err(Error::NonFiniteFunction { eigenvalue: lambda, value: v });
        }
        *out = v;
    }
    Ok(eig.with_function_values(&fvals))
}

pub fn apply_function<F: Fn(f64) -> f64>(m: &BandedHermitian, f: F) -> Result<DMatrix<f64>> {
    apply_function_with(&eigendecompose(m)?, f)
}

/// Reusable propagator for one matrix.
#[derive(Clone, Debug)]
pub struct Propagator {
    scale: SimulationScale,
    eig: Arc<EigenSystem>,
}

impl Propagator {
    pub fn new(m: &BandedHermitian) -> Result<Self> {
        Ok(Self { scale: m.scale(), eig: Arc::new(eigendecompose(m)?) })
    }

    pub fn from_eigensystem(scale: SimulationScale, eig: Arc<EigenSystem>) -> Self {
        Self { scale, eig }
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    pub fn eigensystem(&self) -> &EigenSystem {
        &self.eig
    }

    /// `V e^{−itNΛ} Vᵀ c`; the state is zero-padded to the matrix dimension.
    /// At `t = 0` the padded input is returned unchanged.
    pub fn propagate(&self, state: &BargmannState, t: f64) -> Result<BargmannState> {
        self.scale.check_same(&state.scale())?;
        let dim = self.dim();
        if state.len() > dim {
            return Err(Error::DimMismatch { what: "state vs propagator", left: state.len(), right: dim });
        }
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite time {t}")));
        }
        let padded = state.padded(dim);
        if t == 0.0 {
            return Ok(padded);
        }
        let c = padded.coeffs();
        let v = &self.eig.eigenvectors;
        let n = self.scale.n() as f64;
        // y = e^{−itNΛ} Vᵀ c
        let y: Vec<Complex64> = (0..dim)
            .map(|k| {
                let proj: Complex64 = (0..dim).map(|i| c[i] * v[(i, k)]).sum();
                proj * Complex64::from_polar(1.0, -t * n * self.eig.eigenvalues[k])
            })
            .collect();
        let out: Vec<Complex64> = (0..dim)
            .map(|i| (0..dim).map(|k| y[k] * v[(i, k)]).sum())
            .collect();
        BargmannState::new(self.scale, out)
    }
}

pub fn propagate(m: &BandedHermitian, state: &BargmannState, t: f64) -> Result<BargmannState> {
    Propagator::new(m)?.propagate(state, t)
}

/// Exact content key of a banded matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct MatrixKey {
    n: u32,
    dim: usize,
    entries: Vec<(usize, usize, u64)>,
}

impl MatrixKey {
    fn of(m: &BandedHermitian) -> Self {
        Self {
            n: m.scale().n(),
            dim: m.dim(),
            entries: m
                .nonzeros()
                .into_iter()
                .filter(|&(i, j, _)| i <= j)
                .map(|(i, j, v)| (i, j, v.to_bits()))
                .collect(),
        }
    }
}

/// Decompositions keyed by matrix content, shared across readers.
#[derive(Default)]
pub struct SpectralCache {
    entries: RwLock<HashMap<MatrixKey, Arc<EigenSystem>>>,
}

impl SpectralCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_or_compute(&self, m: &BandedHermitian) -> Result<Arc<EigenSystem>> {
        let key = MatrixKey::of(m);
        if let Some(e) = self.entries.read().get(&key) {
            return Ok(Arc::clone(e));
        }
        let eig = Arc::new(eigendecompose(m)?);
        Ok(Arc::clone(self.entries.write().entry(key).or_insert(eig)))
    }

    pub fn propagator(&self, m: &BandedHermitian) -> Result<Propagator> {
        Ok(Propagator::from_eigensystem(m.scale(), self.get_or_compute(m)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutops::build_q_matrix;

    fn scale(n: u32) -> SimulationScale {
        SimulationScale::new(n).unwrap()
    }

    #[test]
    fn small_q_spectrum() {
        let q = build_q_matrix(scale(2), 3).unwrap();
        let eig = eigendecompose(&q).unwrap();
        let h = 0.5 * 2f64.sqrt();
        let want = [-h, 0.0, h];
        for (got, want) in eig.eigenvalues.iter().zip(want) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn identity_spectrum() {
        let id = BandedHermitian::scaled_identity(scale(3), 5, 1.0).unwrap();
        let eig = eigendecompose(&id).unwrap();
        assert!(eig.eigenvalues.iter().all(|&l| (l - 1.0).abs() < 1e-15));
        let vtv = eig.eigenvectors.transpose() * &eig.eigenvectors;
        assert!((vtv - DMatrix::identity(5, 5)).amax() < 1e-14);
    }

    #[test]
    fn sign_convention() {
        let q = build_q_matrix(scale(10), 11).unwrap();
        let eig = eigendecompose(&q).unwrap();
        for col in eig.eigenvectors.column_iter() {
            let pivot = col.iamax();
            assert!(col[pivot] > 0.0);
        }
    }

    #[test]
    fn function_catalogue_identities() {
        let q = build_q_matrix(scale(8), 9).unwrap();
        let dense = q.to_dense();
        assert!((apply_function(&q, |l| l).unwrap() - &dense).amax() < 1e-10);
        assert!((apply_function(&q, |_| 1.0).unwrap() - DMatrix::identity(9, 9)).amax() < 1e-10);
        assert!((apply_function(&q, |l| l * l).unwrap() - &dense * &dense).amax() < 1e-10);
        assert!(matches!(
            apply_function(&q, f64::ln),
            Err(Error::NonFiniteFunction { .. })
        ));
    }

    #[test]
    fn zero_time_is_identity() {
        let sc = scale(10);
        let q = build_q_matrix(sc, 11).unwrap();
        let s = crate::bargmann::coherent_state(Complex64::new(0.2, 0.1), sc, 10).unwrap();
        assert_eq!(propagate(&q, &s, 0.0).unwrap(), s);
        let other = crate::bargmann::coherent_state(Complex64::new(0.2, 0.1), scale(11), 10).unwrap();
        assert!(matches!(propagate(&q, &other, 1.0), Err(Error::ScaleMismatch { .. })));
        let long = crate::bargmann::coherent_state(Complex64::new(0.2, 0.1), sc, 20).unwrap();
        assert!(matches!(propagate(&q, &long, 1.0), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn cache_reuses_decompositions() {
        let cache = SpectralCache::new();
        let q = build_q_matrix(scale(10), 11).unwrap();
        let a = cache.get_or_compute(&q).unwrap();
        let b = cache.get_or_compute(&q.clone()).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        let other = build_q_matrix(scale(11), 11).unwrap();
        let c = cache.get_or_compute(&other).unwrap();
        assert!(!Arc::ptr_eq(&a, &c));
        assert_eq!(cache.len(), 2);
    }
}
