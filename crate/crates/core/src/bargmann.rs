//! States of the Bargmann space at `ℏ = 1/N`, expanded in the orthonormal
//! oscillator basis `b_n = zⁿ/√(ℏⁿ n!)`, and their Husimi densities
//! `|ψ(z)| e^{−|z|²/2ℏ}`.
//!
//! Coefficients and basis monomials are carried as (log-magnitude, phase)
//! pairs until the final sum, so `|w|²/ℏ` in the hundreds does not overflow.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::PhasePoint;

/// Largest coefficient vector a state may carry.
pub const MAX_STATE_DIM: usize = 1 << 16;

/// Semiclassical scale `ℏ = 1/N`. Index arithmetic uses the integer `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SimulationScale {
    n: u32,
}

impl SimulationScale {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("N must be a positive integer".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn hbar(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Index of the last oscillator level kept by the projector onto `{P ≤ E}`.
    ///
    /// For `E = 1` this is `N`, the projector having rank `N + 1`.
    pub fn cutoff_index(&self, energy: f64) -> usize {
        (self.n as f64 * energy + 1e-9).floor().max(0.0) as usize
    }

    pub(crate) fn check_same(&self, other: &SimulationScale) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::ScaleMismatch { left: self.n, right: other.n })
        }
    }
}

/// Finite coefficient vector over `b_0, b_1, …`.
#[derive(Clone, Debug, PartialEq)]
pub struct BargmannState {
    scale: SimulationScale,
    coeffs: Vec<Complex64>,
}

impl BargmannState {
    pub fn new(scale: SimulationScale, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() > MAX_STATE_DIM {
            return Err(Error::InvalidArgument(format!(
                "state dimension {} exceeds cap {MAX_STATE_DIM}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(Self { scale, coeffs })
    }

    /// The basis vector `b_n`, stored with `len` coefficients.
    pub fn basis(scale: SimulationScale, n: usize, len: usize) -> Result<Self> {
        if n >= len {
            return Err(Error::InvalidArgument(format!("b_{n} does not fit in {len} coefficients")));
        }
        let mut c = vec![Complex64::new(0.0, 0.0); len];
        c[n] = Complex64::new(1.0, 0.0);
        Self::new(scale, c)
    }

    pub fn scale(&self) -> SimulationScale {
        self.scale
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidArgument("cannot normalize the zero state".into()));
        }
        Ok(Self {
            scale: self.scale,
            coeffs: self.coeffs.iter().map(|c| c / n).collect(),
        })
    }

    /// Applies the projector onto `b_0..=b_cutoff`; the result has exactly
    /// `cutoff + 1` coefficients.
    pub fn project(&self, cutoff: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(cutoff + 1, Complex64::new(0.0, 0.0));
        Self { scale: self.scale, coeffs }
    }

    /// Zero-padded copy with at least `len` coefficients.
    pub fn padded(&self, len: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        if coeffs.len() < len {
            coeffs.resize(len, Complex64::new(0.0, 0.0));
        }
        Self { scale: self.scale, coeffs }
    }

    /// Largest coefficient-wise distance to another state of the same scale,
    /// missing entries counting as zero.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.scale.check_same(&other.scale)?;
        let len = self.len().max(other.len());
        let zero = Complex64::new(0.0, 0.0);
        let d2: f64 = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(zero);
                let b = other.coeffs.get(i).copied().unwrap_or(zero);
                (a - b).norm_sqr()
            })
            .sum();
        Ok(d2.sqrt())
    }

    /// Writes `n,re,im` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "n,re,im")?;
        for (n, c) in self.coeffs.iter().enumerate() {
            writeln!(out, "{n},{},{}", c.re, c.im)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `Σ a_n conj(b_n)` over the common index range.
pub fn inner(a: &BargmannState, b: &BargmannState) -> Result<Complex64> {
    a.scale.check_same(&b.scale)?;
    Ok(a.coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| x * y.conj())
        .sum())
}

/// `ln(n!)` for `n = 0..len`, by running sums of `ln k`.
fn log_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = 0.0;
    for n in 0..len {
        if n > 0 {
            acc += (n as f64).ln();
        }
        out.push(acc);
    }
    out
}

const LN_MIN_POSITIVE: f64 = -745.0;

/// Coherent state centered at `w`, projected onto `b_0..=b_cutoff`:
/// `c_n = w̄ⁿ e^{−|w|²/2ℏ} / √(n! ℏⁿ)`.
pub fn coherent_state(w: Complex64, scale: SimulationScale, cutoff: usize) -> Result<BargmannState> {
    if cutoff + 1 > MAX_STATE_DIM {
        return Err(Error::InvalidArgument(format!(
            "cutoff {cutoff} exceeds the state dimension cap {MAX_STATE_DIM}"
        )));
    }
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite center {w}")));
    }
    let hbar = scale.hbar();
    let len = cutoff + 1;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
    if w.norm_sqr() == 0.0 {
        coeffs[0] = Complex64::new(1.0, 0.0);
        return BargmannState::new(scale, coeffs);
    }
    let mu = w.norm_sqr() / hbar;
    let ln_abs = w.norm().ln();
    let arg = -w.arg();
    let ln_hbar = hbar.ln();
    let lf = log_factorials(len);
    let mut best = f64::NEG_INFINITY;
    for (n, c) in coeffs.iter_mut().enumerate() {
        let nf = n as f64;
        let log_mag = nf * ln_abs - 0.5 * mu - 0.5 * (lf[n] + nf * ln_hbar);
        best = best.max(log_mag);
        *c = Complex64::from_polar(log_mag.exp(), nf * arg);
    }
    if best < LN_MIN_POSITIVE {
        return Err(Error::CoherentUnderflow {
            mu,
            cutoff,
            suggested: (mu - 6.0 * mu.sqrt()).max(0.0).ceil() as usize,
        });
    }
    BargmannState::new(scale, coeffs)
}

/// Cutoff index beyond which the Poisson weights of a coherent state with
/// `μ = |w|²/ℏ` are below double precision.
pub fn full_cutoff(w: Complex64, scale: SimulationScale) -> usize {
    let mu = w.norm_sqr() / scale.hbar();
    (mu + 12.0 * mu.sqrt() + 60.0).ceil() as usize
}

/// Rectangular `(x, p)` sampling grid with inclusive endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub np: usize,
    pub xmin: f64,
    pub xmax: f64,
    pub pmin: f64,
    pub pmax: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { nx: 200, np: 200, xmin: -2.0, xmax: 2.0, pmin: -2.0, pmax: 2.0 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.np == 0 {
            return Err(Error::InvalidArgument("grid must have at least one point per axis".into()));
        }
        let bounds = [self.xmin, self.xmax, self.pmin, self.pmax];
        if bounds.iter().any(|b| !b.is_finite()) || self.xmin > self.xmax || self.pmin > self.pmax {
            return Err(Error::InvalidArgument(format!("invalid grid bounds {self}")));
        }
        Ok(())
    }

    fn axis(n: usize, lo: f64, hi: f64, i: usize) -> f64 {
        if n == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        Self::axis(self.nx, self.xmin, self.xmax, i)
    }

    pub fn p(&self, j: usize) -> f64 {
        Self::axis(self.np, self.pmin, self.pmax, j)
    }

    pub fn dx(&self) -> f64 {
        if self.nx > 1 { (self.xmax - self.xmin) / (self.nx - 1) as f64 } else { 0.0 }
    }

    pub fn dp(&self) -> f64 {
        if self.np > 1 { (self.pmax - self.pmin) / (self.np - 1) as f64 } else { 0.0 }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}:{}:{}", self.nx, self.np, self.xmin, self.xmax, self.pmin, self.pmax)
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// Parses `nx:np:xmin:xmax:pmin:pmax`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 6 {
            return Err(Error::InvalidArgument(format!(
                "grid must be nx:np:xmin:xmax:pmin:pmax, got {s:?}"
            )));
        }
        let count = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|e| Error::InvalidArgument(format!("grid count {v:?}: {e}")))
        };
        let real = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidArgument(format!("grid bound {v:?}: {e}")))
        };
        let g = GridSpec {
            nx: count(parts[0])?,
            np: count(parts[1])?,
            xmin: real(parts[2])?,
            xmax: real(parts[3])?,
            pmin: real(parts[4])?,
            pmax: real(parts[5])?,
        };
        g.validate()?;
        Ok(g)
    }
}

/// Sidecar metadata written next to a grid CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HusimiMeta {
    #[serde(rename = "N")]
    pub n: u32,
    pub w_re: Option<f64>,
    pub w_im: Option<f64>,
    pub t: f64,
    pub nx: usize,
    pub np: usize,
    pub xmin: f64,
    pub xmax: f64,
    pub pmin: f64,
    pub pmax: f64,
    pub source: String,
}

/// Husimi density samples; `values[i * np + j]` is the density at
/// `(spec.x(i), spec.p(j))`.
#[derive(Clone, Debug, PartialEq)]
pub struct HusimiGrid {
    spec: GridSpec,
    values: Vec<f64>,
    meta: HusimiMeta,
}

/// A strict local maximum of a grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub i: usize,
    pub j: usize,
    pub x: f64,
    pub p: f64,
    pub value: f64,
}

impl Peak {
    pub fn point(&self) -> PhasePoint {
        PhasePoint::new(self.x, self.p)
    }
}

impl HusimiGrid {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn meta(&self) -> &HusimiMeta {
        &self.meta
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.spec.np + j]
    }

    /// Records the source-state center, time and description.
    pub fn with_source(mut self, w: Option<Complex64>, t: f64, source: impl Into<String>) -> Self {
        self.meta.w_re = w.map(|w| w.re);
        self.meta.w_im = w.map(|w| w.im);
        self.meta.t = t;
        self.meta.source = source.into();
        self
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// First grid index of the global maximum.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0);
        let mut v = f64::NEG_INFINITY;
        for (k, &x) in self.values.iter().enumerate() {
            if x > v {
                v = x;
                best = (k / self.spec.np, k % self.spec.np);
            }
        }
        best
    }

    /// Interior cells strictly greater than all 8 neighbours and above
    /// `fraction` times the global maximum, in row-major order.
    pub fn peaks(&self, fraction: f64) -> Vec<Peak> {
        let (nx, np) = (self.spec.nx, self.spec.np);
        let threshold = fraction * self.max();
        let mut out = Vec::new();
        if nx < 3 || np < 3 {
            return out;
        }
        for i in 1..nx - 1 {
            for j in 1..np - 1 {
                let v = self.get(i, j);
                if v <= threshold {
                    continue;
                }
                let is_peak = (i - 1..=i + 1)
                    .flat_map(|a| (j - 1..=j + 1).map(move |b| (a, b)))
                    .filter(|&(a, b)| (a, b) != (i, j))
                    .all(|(a, b)| v > self.get(a, b));
                if is_peak {
                    out.push(Peak { i, j, x: self.spec.x(i), p: self.spec.p(j), value: v });
                }
            }
        }
        out
    }

    /// Writes the `x,p,density` CSV and its JSON sidecar.
    pub fn write(&self, csv_path: &Path, json_path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(csv_path)?);
        writeln!(out, "x,p,density")?;
        for i in 0..self.spec.nx {
            let x = self.spec.x(i);
            for j in 0..self.spec.np {
                writeln!(out, "{x},{},{}", self.spec.p(j), self.get(i, j))?;
            }
        }
        out.flush()?;
        let json = serde_json::to_string_pretty(&self.meta)?;
        std::fs::write(json_path, json + "\n")?;
        Ok(())
    }

    /// Reads a grid back from its CSV and sidecar.
    pub fn read(csv_path: &Path, json_path: &Path) -> Result<Self> {
        let meta: HusimiMeta = serde_json::from_str(&std::fs::read_to_string(json_path)?)?;
        let spec = GridSpec {
            nx: meta.nx,
            np: meta.np,
            xmin: meta.xmin,
            xmax: meta.xmax,
            pmin: meta.pmin,
            pmax: meta.pmax,
        };
        spec.validate()?;
        let reader = BufReader::new(File::open(csv_path)?);
        let mut lines = reader.lines();
        match lines.next() {
            Some(Ok(h)) if h.trim() == "x,p,density" => {}
            _ => return Err(Error::InvalidArgument(format!("{}: missing header", csv_path.display()))),
        }
        let mut values = Vec::with_capacity(spec.nx * spec.np);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let v = line
                .rsplit(',')
                .next()
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::InvalidArgument(format!("malformed row {line:?}")))?;
            values.push(v);
        }
        if values.len() != spec.nx * spec.np {
            return Err(Error::DimMismatch {
                what: "grid rows",
                left: values.len(),
                right: spec.nx * spec.np,
            });
        }
        Ok(Self { spec, values, meta })
    }
}

/// Per-state data reused across every grid point.
struct HusimiKernel<'a> {
    coeffs: &'a [Complex64],
    half_ln_hbar_n: Vec<f64>,
    inv_two_hbar: f64,
}

impl HusimiKernel<'_> {
    fn density(&self, z: Complex64) -> f64 {
        let r2 = z.norm_sqr();
        if r2 == 0.0 {
            return self.coeffs.first().map_or(0.0, |c| c.norm());
        }
        let ln_r = 0.5 * r2.ln();
        let theta = z.arg();
        // ln|A_n(z)|, with A_0 = e^{−|z|²/2ℏ} and A_{n+1} = A_n z/√(ℏ(n+1))
        let mut log_a = -r2 * self.inv_two_hbar;
        let mut sum = Complex64::new(0.0, 0.0);
        for (n, c) in self.coeffs.iter().enumerate() {
            if n > 0 {
                log_a += ln_r - self.half_ln_hbar_n[n];
            }
            if *c != Complex64::new(0.0, 0.0) && log_a > LN_MIN_POSITIVE {
                sum += c * Complex64::from_polar(log_a.exp(), n as f64 * theta);
            }
        }
        sum.norm()
    }
}

/// Husimi density of a state on a grid.
///
/// Each point is an independent, fixed-order sum, so the result does not
/// depend on how rayon splits the rows.
pub fn husimi(state: &BargmannState, spec: &GridSpec) -> Result<HusimiGrid> {
    spec.validate()?;
    let hbar = state.scale.hbar();
    let kernel = HusimiKernel {
        coeffs: &state.coeffs,
        half_ln_hbar_n: (0..state.len())
            .map(|n| if n == 0 { 0.0 } else { 0.5 * (hbar * n as f64).ln() })
            .collect(),
        inv_two_hbar: 0.5 / hbar,
    };
    let mut values = vec![0.0; spec.nx * spec.np];
    values
        .par_chunks_mut(spec.np)
        .enumerate()
        .for_each(|(i, row)| {
            let x = spec.x(i);
            for (j, v) in row.iter_mut().enumerate() {
                *v = kernel.density(PhasePoint::new(x, spec.p(j)).z());
            }
        });
    let meta = HusimiMeta {
        n: state.scale.n(),
        w_re: None,
        w_im: None,
        t: 0.0,
        nx: spec.nx,
        np: spec.np,
        xmin: spec.xmin,
        xmax: spec.xmax,
        pmin: spec.pmin,
        pmax: spec.pmax,
        source: "state".into(),
    };
    Ok(HusimiGrid { spec: *spec, values, meta })
}
