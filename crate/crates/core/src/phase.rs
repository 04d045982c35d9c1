//! Classical phase space of the one-dimensional oscillator: points, the
//! Hamiltonians `P = (x² + p²)/2` and `Q = x² − p²`, their flows, the disk
//! `{P ≤ E}` with its boundary orbit, and quadrature over the disk.
//!
//! Fourier coefficients along the boundary orbit are stored without the
//! symmetric `1/√(2π)` normalization: `h(θ) = Σ c_j e^{ijθ}`. Multiply by
//! `√(2π)` to get the symmetric convention.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre_on;

/// A point `(x, p)` of phase space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint {
    pub x: f64,
    pub p: f64,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { x: 0.0, p: 0.0 };

    pub fn new(x: f64, p: f64) -> Self {
        Self { x, p }
    }

    /// Point whose Bargmann coordinate is `z = (x − ip)/√2`.
    pub fn from_z(z: Complex64) -> Self {
        Self {
            x: SQRT_2 * z.re,
            p: -SQRT_2 * z.im,
        }
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.x * FRAC_1_SQRT_2, -self.p * FRAC_1_SQRT_2)
    }

    /// `z z̄ = (x² + p²)/2`.
    pub fn oscillator_energy(&self) -> f64 {
        0.5 * (self.x * self.x + self.p * self.p)
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.p)
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.p.is_finite()
    }
}

/// Which built-in Hamiltonian, if any, a [`Hamiltonian`] is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HamiltonianTag {
    /// `P = (x² + p²)/2`.
    Oscillator,
    /// `Q = x² − p²`.
    Hyperbolic,
    Constant,
    Custom,
}

type ScalarFn = dyn Fn(f64, f64) -> f64 + Send + Sync;
type GradFn = dyn Fn(f64, f64) -> (f64, f64) + Send + Sync;

/// A classical observable with an analytic gradient.
#[derive(Clone)]
pub struct Hamiltonian {
    name: String,
    tag: HamiltonianTag,
    value: Arc<ScalarFn>,
    gradient: Arc<GradFn>,
}

impl fmt::Debug for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Hamiltonian")
            .field("name", &self.name)
            .field("tag", &self.tag)
            .finish()
    }
}

impl Hamiltonian {
    /// Harmonic oscillator `P = (x² + p²)/2`.
    pub fn oscillator() -> Self {
        Self {
            name: "P".into(),
            tag: HamiltonianTag::Oscillator,
            value: Arc::new(|x, p| 0.5 * (x * x + p * p)),
            gradient: Arc::new(|x, p| (x, p)),
        }
    }

    /// `Q = x² − p²`.
    pub fn hyperbolic() -> Self {
        Self {
            name: "Q".into(),
            tag: HamiltonianTag::Hyperbolic,
            value: Arc::new(|x, p| x * x - p * p),
            gradient: Arc::new(|x, p| (2.0 * x, -2.0 * p)),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            name: format!("const({c})"),
            tag: HamiltonianTag::Constant,
            value: Arc::new(move |_, _| c),
            gradient: Arc::new(|_, _| (0.0, 0.0)),
        }
    }

    pub fn custom<F, G>(name: impl Into<String>, value: F, gradient: G) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64, f64) -> (f64, f64) + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            tag: HamiltonianTag::Custom,
            value: Arc::new(value),
            gradient: Arc::new(gradient),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tag(&self) -> HamiltonianTag {
        self.tag
    }

    pub fn eval(&self, at: PhasePoint) -> f64 {
        (self.value)(at.x, at.p)
    }

    /// `(∂h/∂x, ∂h/∂p)`.
    pub fn gradient(&self, at: PhasePoint) -> (f64, f64) {
        (self.gradient)(at.x, at.p)
    }

    /// Closed-form flow for the built-in quadratic Hamiltonians.
    pub fn exact_flow(&self, start: PhasePoint, t: f64) -> Option<PhasePoint> {
        match self.tag {
            // ẋ = p, ṗ = −x: clockwise rotation.
            HamiltonianTag::Oscillator => {
                let (s, c) = t.sin_cos();
                Some(PhasePoint::new(
                    start.x * c + start.p * s,
                    -start.x * s + start.p * c,
                ))
            }
            // u = x + p decays as e^{−2t}, v = x − p grows as e^{2t}.
            HamiltonianTag::Hyperbolic => {
                let u = (start.x + start.p) * (-2.0 * t).exp();
                let v = (start.x - start.p) * (2.0 * t).exp();
                Some(PhasePoint::new(0.5 * (u + v), 0.5 * (u - v)))
            }
            HamiltonianTag::Constant => Some(start),
            HamiltonianTag::Custom => None,
        }
    }
}

/// The sublevel set `{P ≤ E}` of the oscillator energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    energy: f64,
}

impl Domain {
    pub fn new(energy: f64) -> Result<Self> {
        if !(energy.is_finite() && energy > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "energy cutoff must be finite and positive, got {energy}"
            )));
        }
        Ok(Self { energy })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Radius `√(2E)` of the disk in the `(x, p)` plane.
    pub fn radius(&self) -> f64 {
        (2.0 * self.energy).sqrt()
    }

    pub fn contains(&self, at: PhasePoint) -> bool {
        at.oscillator_energy() <= self.energy
    }

    /// Euclidean distance from an interior point to the boundary circle;
    /// negative outside.
    pub fn distance_to_boundary(&self, at: PhasePoint) -> f64 {
        self.radius() - at.radius()
    }

    /// Boundary point with `z = √E e^{iθ}`.
    pub fn boundary_point(&self, theta: f64) -> PhasePoint {
        PhasePoint::from_z(Complex64::from_polar(self.energy.sqrt(), theta))
    }
}

fn rk4_step(h: &Hamiltonian, s: PhasePoint, dt: f64) -> PhasePoint {
    // ẋ = ∂h/∂p, ṗ = −∂h/∂x
    let field = |q: PhasePoint| {
        let (hx, hp) = h.gradient(q);
        (hp, -hx)
    };
    let (k1x, k1p) = field(s);
    let (k2x, k2p) = field(PhasePoint::new(s.x + 0.5 * dt * k1x, s.p + 0.5 * dt * k1p));
    let (k3x, k3p) = field(PhasePoint::new(s.x + 0.5 * dt * k2x, s.p + 0.5 * dt * k2p));
    let (k4x, k4p) = field(PhasePoint::new(s.x + dt * k3x, s.p + dt * k3p));
    PhasePoint::new(
        s.x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        s.p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
    )
}

pub const DEFAULT_FLOW_STEP: f64 = 1e-3;
const MAX_FLOW_STEPS: f64 = 1e7;

/// Integrates Hamilton's equations with classic RK4 using `⌈|t|/dt⌉` equal
/// steps that land exactly on `t`.
pub fn hamilton_flow(h: &Hamiltonian, start: PhasePoint, t: f64, dt: f64) -> Result<PhasePoint> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("flow step must be positive, got {dt}")));
    }
    if !t.is_finite() || t.abs() / dt > MAX_FLOW_STEPS {
        return Err(Error::InvalidArgument(format!(
            "|t|/dt = {} exceeds the step cap {MAX_FLOW_STEPS}",
            t.abs() / dt
        )));
    }
    if !start.is_finite() {
        return Err(Error::NonFiniteFlow { step: 0, x: start.x, p: start.p });
    }
    let steps = (t.abs() / dt).ceil() as u64;
    if steps == 0 {
        return Ok(start);
    }
    let h_step = t / steps as f64;
    let mut state = start;
    for step in 1..=steps {
        state = rk4_step(h, state, h_step);
        if !state.is_finite() {
            return Err(Error::NonFiniteFlow { step, x: state.x, p: state.p });
        }
    }
    Ok(state)
}

/// `{h1, h2} = ∂h1/∂x ∂h2/∂p − ∂h1/∂p ∂h2/∂x`.
pub fn poisson_bracket(h1: &Hamiltonian, h2: &Hamiltonian, at: PhasePoint) -> Result<f64> {
    let (ax, ap) = h1.gradient(at);
    let (bx, bp) = h2.gradient(at);
    let v = ax * bp - ap * bx;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidArgument(format!("non-finite bracket at ({}, {})", at.x, at.p)))
    }
}

pub const DEFAULT_RADIAL_NODES: usize = 64;
pub const DEFAULT_ANGULAR_NODES: usize = 256;

/// `∫∫_{P ≤ E} f dx dp`.
///
/// Gauss–Legendre in `s = r²` over `[0, 2E]` (where `dx dp = ½ ds dθ`)
/// tensored with the uniform trapezoid rule in θ.
pub fn disk_integral<F>(f: F, domain: &Domain, nr: usize, ntheta: usize) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    if nr < 4 || ntheta < 4 {
        return Err(Error::InvalidArgument(format!(
            "disk quadrature needs at least 4 nodes per axis, got nr={nr}, ntheta={ntheta}"
        )));
    }
    let radial = gauss_legendre_on(nr, 0.0, 2.0 * domain.energy());
    let angles: Vec<(f64, f64)> = (0..ntheta)
        .map(|j| (2.0 * PI * j as f64 / ntheta as f64).sin_cos())
        .collect();
    let dtheta = 2.0 * PI / ntheta as f64;
    let mut total = 0.0;
    for (s, ws) in radial {
        let r = s.sqrt();
        let ring: f64 = angles.iter().map(|&(sn, cs)| f(r * cs, r * sn)).sum();
        total += ws * ring;
    }
    Ok(0.5 * dtheta * total)
}

/// Fourier coefficients `c_{−kmax..=kmax}` of a function on the boundary
/// orbit, `h(θ) = Σ c_j e^{ijθ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierCoeffs {
    kmax: usize,
    coeffs: Vec<Complex64>,
}

impl FourierCoeffs {
    pub fn from_fn<F: Fn(i64) -> Complex64>(kmax: usize, f: F) -> Self {
        let k = kmax as i64;
        Self {
            kmax,
            coeffs: (-k..=k).map(f).collect(),
        }
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    /// `c_j`, zero outside the stored range.
    pub fn get(&self, j: i64) -> Complex64 {
        let k = self.kmax as i64;
        if j.abs() > k {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(j + k) as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let k = self.kmax as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - k, c))
    }

    /// Coefficients in the `h(θ) = Σ Q_j e^{ijθ}/√(2π)` convention.
    pub fn symmetric_normalization(&self) -> Vec<Complex64> {
        let s = (2.0 * PI).sqrt();
        self.coeffs.iter().map(|c| c * s).collect()
    }
}

/// Discrete Fourier coefficients of `h` along `z(θ) = √E e^{iθ}`.
pub fn orbit_fourier_coeffs(
    h: &Hamiltonian,
    domain: &Domain,
    kmax: usize,
    nsamples: usize,
) -> Result<FourierCoeffs> {
    if nsamples < 4 * kmax + 4 {
        return Err(Error::InvalidArgument(format!(
            "need at least {} samples for kmax={kmax}, got {nsamples}",
            4 * kmax + 4
        )));
    }
    let samples: Vec<(f64, f64)> = (0..nsamples)
        .map(|m| {
            let theta = 2.0 * PI * m as f64 / nsamples as f64;
            (theta, h.eval(domain.boundary_point(theta)))
        })
        .collect();
    let inv = 1.0 / nsamples as f64;
    Ok(FourierCoeffs::from_fn(kmax, |j| {
        samples
            .iter()
            .map(|&(theta, v)| Complex64::from_polar(v, -(j as f64) * theta))
            .sum::<Complex64>()
            * inv
    }))
}
