//! Banded operators in the oscillator basis: `Q̂`, `P̂`, spectral projectors,
//! cut operators `Π Q̂ Π`, commutators, and the fiber Toeplitz matrices that
//! model the corner of a cut operator at the cutoff index.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bargmann::SimulationScale;
use crate::error::{Error, Result};
use crate::phase::FourierCoeffs;

/// Read access shared by the banded storage types.
pub trait MatrixEntries {
    fn dim(&self) -> usize;
    fn entry(&self, row: usize, col: usize) -> f64;

    fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| self.entry(i, j))
    }

    fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    /// Nonzero entries in row-major order.
    fn nonzeros(&self) -> Vec<(usize, usize, f64)>;

    /// Dumps nonzeros as `i,j,value` rows.
    fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "i,j,value")?;
        for (i, j, v) in self.nonzeros() {
            writeln!(out, "{i},{j},{v}")?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Real symmetric matrix with entries only for `|m − n| ≤ bandwidth`.
///
/// `bands[k][i]` holds `A[i][i + k]`; the lower triangle is the mirror, so
/// symmetry holds by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedHermitian {
    scale: SimulationScale,
    dim: usize,
    bands: Vec<Vec<f64>>,
}

impl BandedHermitian {
    pub fn zeros(scale: SimulationScale, dim: usize, bandwidth: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be at least 1".into()));
        }
        let bandwidth = bandwidth.min(dim - 1);
        Ok(Self {
            scale,
            dim,
            bands: (0..=bandwidth).map(|k| vec![0.0; dim - k]).collect(),
        })
    }

    /// Symmetric banded matrix from a dense one; entries outside the band
    /// and asymmetric parts must vanish.
    pub fn from_dense(scale: SimulationScale, m: &DMatrix<f64>, bandwidth: usize) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimMismatch { what: "square matrix", left: m.nrows(), right: m.ncols() });
        }
        let mut out = Self::zeros(scale, m.nrows(), bandwidth)?;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v != m[(j, i)] {
                    return Err(Error::InvalidArgument(format!("matrix not symmetric at ({i},{j})")));
                }
                if i.abs_diff(j) > out.bandwidth() {
                    if v != 0.0 {
                        return Err(Error::InvalidArgument(format!("entry ({i},{j}) outside band")));
                    }
                } else if i <= j {
                    out.bands[j - i][i] = v;
                }
            }
        }
        Ok(out)
    }

    /// Identity scaled by `c`.
    pub fn scaled_identity(scale: SimulationScale, dim: usize, c: f64) -> Result<Self> {
        let mut out = Self::zeros(scale, dim, 0)?;
        out.bands[0].fill(c);
        Ok(out)
    }

    pub fn scale(&self) -> SimulationScale {
        self.scale
    }

    pub fn bandwidth(&self) -> usize {
        self.bands.len() - 1
    }

    /// Sets `A[i][j]` and `A[j][i]`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        let (lo, hi) = (i.min(j), i.max(j));
        let k = hi - lo;
        if hi >= self.dim || k > self.bandwidth() {
            return Err(Error::InvalidArgument(format!("({i},{j}) outside the band")));
        }
        self.bands[k][lo] = v;
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.bands.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Leading principal submatrix of size `dim`.
    pub fn truncated(&self, dim: usize) -> Result<Self> {
        if dim == 0 || dim > self.dim {
            return Err(Error::DimMismatch { what: "truncation", left: dim, right: self.dim });
        }
        let bw = self.bandwidth().min(dim - 1);
        Ok(Self {
            scale: self.scale,
            dim,
            bands: (0..=bw).map(|k| self.bands[k][..dim - k].to_vec()).collect(),
        })
    }

    /// `A·x` for a complex vector of length `dim`.
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.dim {
            return Err(Error::DimMismatch { what: "matrix-vector", left: self.dim, right: x.len() });
        }
        let mut y: Vec<Complex64> = x.iter().zip(&self.bands[0]).map(|(v, d)| v * d).collect();
        for (k, band) in self.bands.iter().enumerate().skip(1) {
            for (i, &a) in band.iter().enumerate() {
                if a != 0.0 {
                    y[i] += x[i + k] * a;
                    y[i + k] += x[i] * a;
                }
            }
        }
        Ok(y)
    }

    /// `⟨x, A x⟩ / ⟨x, x⟩`, real for symmetric `A`.
    pub fn expectation(&self, x: &[Complex64]) -> Result<f64> {
        let ax = self.apply(x)?;
        let num: Complex64 = x.iter().zip(&ax).map(|(a, b)| a.conj() * b).sum();
        let den: f64 = x.iter().map(|c| c.norm_sqr()).sum();
        if den == 0.0 {
            return Err(Error::InvalidArgument("expectation in the zero state".into()));
        }
        Ok(num.re / den)
    }

    fn as_general(&self) -> BandMatrix {
        let bw = self.bandwidth();
        BandMatrix::from_fn(self.dim, bw, bw, |i, j| self.entry(i, j))
    }

    /// Banded product `self · other`; bandwidths add.
    pub fn mul(&self, other: &BandedHermitian) -> Result<BandMatrix> {
        self.as_general().mul(&other.as_general())
    }
}

impl MatrixEntries for BandedHermitian {
    fn dim(&self) -> usize {
        self.dim
    }

    fn entry(&self, row: usize, col: usize) -> f64 {
        let (lo, hi) = (row.min(col), row.max(col));
        let k = hi - lo;
        if hi >= self.dim || k > self.bandwidth() {
            0.0
        } else {
            self.bands[k][lo]
        }
    }

    fn nonzeros(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            let lo = i.saturating_sub(self.bandwidth());
            let hi = (i + self.bandwidth()).min(self.dim - 1);
            for j in lo..=hi {
                let v = self.entry(i, j);
                if v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

/// General real banded matrix with `lower` sub- and `upper` super-diagonals,
/// stored row by row as `data[i * width + (j + lower − i)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandMatrix {
    dim: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn from_fn<F: Fn(usize, usize) -> f64>(dim: usize, lower: usize, upper: usize, f: F) -> Self {
        let width = lower + upper + 1;
        let mut data = vec![0.0; dim * width];
        for i in 0..dim {
            for j in i.saturating_sub(lower)..=(i + upper).min(dim.saturating_sub(1)) {
                data[i * width + j + lower - i] = f(i, j);
            }
        }
        Self { dim, lower, upper, data }
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.dim && j < self.dim && j + self.lower >= i && j <= i + self.upper
    }

    pub fn mul(&self, other: &BandMatrix) -> Result<BandMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch { what: "banded product", left: self.dim, right: other.dim });
        }
        let (lower, upper) = (self.lower + other.lower, self.upper + other.upper);
        Ok(BandMatrix::from_fn(self.dim, lower, upper, |i, j| {
            let lo = i.saturating_sub(self.lower).max(j.saturating_sub(other.upper));
            let hi = (i + self.upper).min(j + other.lower).min(self.dim - 1);
            (lo..=hi).map(|k| self.entry(i, k) * other.entry(k, j)).sum()
        }))
    }

    pub fn sub(&self, other: &BandMatrix) -> Result<BandMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch { what: "banded difference", left: self.dim, right: other.dim });
        }
        Ok(BandMatrix::from_fn(
            self.dim,
            self.lower.max(other.lower),
            self.upper.max(other.upper),
            |i, j| self.entry(i, j) - other.entry(i, j),
        ))
    }

    pub fn transpose(&self) -> BandMatrix {
        BandMatrix::from_fn(self.dim, self.upper, self.lower, |i, j| self.entry(j, i))
    }
}

impl MatrixEntries for BandMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn entry(&self, row: usize, col: usize) -> f64 {
        if self.in_band(row, col) {
            self.data[row * (self.lower + self.upper + 1) + col + self.lower - row]
        } else {
            0.0
        }
    }

    fn nonzeros(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in i.saturating_sub(self.lower)..=(i + self.upper).min(self.dim - 1) {
                let v = self.entry(i, j);
                if v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

/// `Q̂ = ℏ²∂²_z + z²` on `b_0..b_{dim−1}`:
/// `Q̂ b_n = ℏ√(n(n−1)) b_{n−2} + ℏ√((n+1)(n+2)) b_{n+2}`.
pub fn build_q_matrix(scale: SimulationScale, dim: usize) -> Result<BandedHermitian> {
    let mut m = BandedHermitian::zeros(scale, dim, 2)?;
    let hbar = scale.hbar();
    if dim > 2 {
        for (n, v) in m.bands[2].iter_mut().enumerate() {
            *v = hbar * (((n + 1) * (n + 2)) as f64).sqrt();
        }
    }
    Ok(m)
}

/// `P̂ = ℏ z∂_z + ℏ/2`, diagonal with eigenvalues `ℏ(n + ½)`.
pub fn build_p_matrix(scale: SimulationScale, dim: usize) -> Result<BandedHermitian> {
    let mut m = BandedHermitian::zeros(scale, dim, 0)?;
    let hbar = scale.hbar();
    for (n, v) in m.bands[0].iter_mut().enumerate() {
        *v = hbar * (n as f64 + 0.5);
    }
    Ok(m)
}

/// Diagonal projector onto `b_0..=b_cutoff_index` inside a `dim`-dimensional
/// ambient space.
pub fn build_projector(scale: SimulationScale, dim: usize, cutoff_index: usize) -> Result<BandedHermitian> {
    let mut m = BandedHermitian::zeros(scale, dim, 0)?;
    for v in m.bands[0].iter_mut().take(cutoff_index + 1) {
        *v = 1.0;
    }
    Ok(m)
}

/// `Π Q̂ Π` restricted to the range of the (diagonal, prefix) projector.
pub fn cut_operator(q: &BandedHermitian, proj: &BandedHermitian) -> Result<BandedHermitian> {
    if q.dim != proj.dim {
        return Err(Error::DimMismatch { what: "cut operator", left: q.dim, right: proj.dim });
    }
    q.scale.check_same(&proj.scale)?;
    if proj.bandwidth() != 0 {
        return Err(Error::InvalidArgument("projector must be diagonal in the oscillator basis".into()));
    }
    let diag = &proj.bands[0];
    if diag.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::InvalidArgument("projector diagonal must be 0/1".into()));
    }
    let rank = diag.iter().rposition(|&v| v == 1.0).map_or(0, |i| i + 1);
    if rank == 0 {
        return Err(Error::InvalidArgument("projector has rank zero".into()));
    }
    let bw = q.bandwidth().min(rank - 1);
    let bands = (0..=bw)
        .map(|k| {
            (0..rank - k)
                .map(|i| diag[i] * q.bands[k][i] * diag[i + k])
                .collect()
        })
        .collect();
    Ok(BandedHermitian { scale: q.scale, dim: rank, bands })
}

/// `AB − BA`.
pub fn commutator(a: &BandedHermitian, b: &BandedHermitian) -> Result<BandMatrix> {
    if a.dim != b.dim {
        return Err(Error::DimMismatch { what: "commutator", left: a.dim, right: b.dim });
    }
    a.mul(b)?.sub(&b.mul(a)?)
}

/// Truncated Toeplitz matrix `T[j][k] = c_{k−j}`, `0 ≤ j, k < size`.
#[derive(Clone, Debug, PartialEq)]
pub struct ToeplitzFiber {
    coeffs: FourierCoeffs,
    matrix: DMatrix<Complex64>,
}

impl ToeplitzFiber {
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn coeffs(&self) -> &FourierCoeffs {
        &self.coeffs
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.matrix == self.matrix.adjoint()
    }
}

pub fn fiber_toeplitz(coeffs: &FourierCoeffs, size: usize) -> Result<ToeplitzFiber> {
    if size == 0 {
        return Err(Error::InvalidArgument("Toeplitz truncation must be at least 1".into()));
    }
    let matrix = DMatrix::from_fn(size, size, |j, k| coeffs.get(k as i64 - j as i64));
    Ok(ToeplitzFiber { coeffs: coeffs.clone(), matrix })
}

/// `max_{j,k<corner} |m[top−j][top−k] − model[j][k]|` with `top = dim − 1`.
pub fn corner_deviation<M: MatrixEntries>(m: &M, model: &DMatrix<Complex64>, corner: usize) -> Result<f64> {
    if corner > m.dim() {
        return Err(Error::DimMismatch { what: "corner vs matrix", left: corner, right: m.dim() });
    }
    if corner > model.nrows() {
        return Err(Error::DimMismatch { what: "corner vs model", left: corner, right: model.nrows() });
    }
    let top = m.dim() - 1;
    let mut worst: f64 = 0.0;
    for j in 0..corner {
        for k in 0..corner {
            let d = (Complex64::new(m.entry(top - j, top - k), 0.0) - model[(j, k)]).norm();
            worst = worst.max(d);
        }
    }
    Ok(worst)
}

/// Deviation of the cut operator's corner at the cutoff from its fiber
/// Toeplitz model.
pub fn edge_symbol_error(cut: &BandedHermitian, fiber: &ToeplitzFiber, corner: usize) -> Result<f64> {
    corner_deviation(cut, fiber.matrix(), corner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{orbit_fourier_coeffs, Domain, Hamiltonian};

    fn scale(n: u32) -> SimulationScale {
        SimulationScale::new(n).unwrap()
    }

    #[test]
    fn small_q_matrix() {
        let q = build_q_matrix(scale(2), 3).unwrap();
        let half_root2 = 0.5 * 2f64.sqrt();
        assert!((q.entry(0, 2) - half_root2).abs() < 1e-15);
        assert_eq!(q.entry(0, 2), q.entry(2, 0));
        let nz = q.nonzeros();
        assert_eq!(nz.len(), 2);
        assert!((0..3).all(|i| q.entry(i, i) == 0.0));
    }

    #[test]
    fn q_matrix_far_entry() {
        let q = build_q_matrix(scale(100), 101).unwrap();
        assert!((q.entry(98, 100) - (99.0f64 * 100.0).sqrt() / 100.0).abs() < 1e-15);
        assert!((q.entry(98, 100) - 0.994987).abs() < 1e-6);
    }

    #[test]
    fn projector_properties() {
        let sc = scale(100);
        let p = build_projector(sc, 103, 100).unwrap();
        assert_eq!(p.trace(), 101.0);
        let p2 = p.mul(&p).unwrap();
        assert_eq!(p2.to_dense(), p.to_dense());
        let mut b = vec![Complex64::new(0.0, 0.0); 103];
        b[101] = Complex64::new(1.0, 0.0);
        assert!(p.apply(&b).unwrap().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn cut_operator_shape() {
        let sc = scale(100);
        let q = build_q_matrix(sc, 103).unwrap();
        let cut = cut_operator(&q, &build_projector(sc, 103, 100).unwrap()).unwrap();
        assert_eq!(cut.dim(), 101);
        assert!(cut.bandwidth() <= q.bandwidth());
        assert_eq!(cut.trace(), 0.0);
        for i in 0..=98 {
            for j in 0..=98 {
                assert_eq!(cut.entry(i, j), q.entry(i, j));
            }
        }
        let wrong = build_projector(sc, 50, 10).unwrap();
        assert!(matches!(cut_operator(&q, &wrong), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn commutator_with_itself_vanishes() {
        let p = build_projector(scale(10), 14, 10).unwrap();
        assert!(commutator(&p, &p).unwrap().nonzeros().is_empty());
    }

    #[test]
    fn fiber_of_hyperbolic_symbol() {
        let d = Domain::new(1.0).unwrap();
        let c = orbit_fourier_coeffs(&Hamiltonian::hyperbolic(), &d, 4, 64).unwrap();
        let t = fiber_toeplitz(&c, 8).unwrap();
        for j in 0..8 {
            for k in 0..8 {
                let want = if usize::abs_diff(j, k) == 2 { 1.0 } else { 0.0 };
                assert!((t.matrix()[(j, k)] - want).norm() < 1e-12);
            }
        }
        let c5 = FourierCoeffs::from_fn(0, |_| Complex64::new(5.0, 0.0));
        let t5 = fiber_toeplitz(&c5, 4).unwrap();
        assert_eq!(t5.matrix(), &DMatrix::from_diagonal_element(4, 4, Complex64::new(5.0, 0.0)));
        assert!(t5.is_hermitian());
    }

    #[test]
    fn edge_error_vanishes_for_identity() {
        let sc = scale(50);
        let m = BandedHermitian::scaled_identity(sc, 51, 3.0).unwrap();
        let c = FourierCoeffs::from_fn(0, |_| Complex64::new(3.0, 0.0));
        let f = fiber_toeplitz(&c, 6).unwrap();
        assert_eq!(edge_symbol_error(&m, &f, 6).unwrap(), 0.0);
        assert!(edge_symbol_error(&m, &f, 7).is_err());
    }

    #[test]
    fn from_dense_rejects_asymmetry() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 1.0]);
        assert!(BandedHermitian::from_dense(scale(1), &m, 1).is_err());
    }
}
