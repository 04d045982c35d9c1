//! Drivers that tie the classical and quantum layers together and check the
//! trace, Szegő, commutator, edge-symbol, Egorov and splitting statements in
//! the oscillator model. Each driver returns an [`ExperimentReport`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bargmann::{coherent_state, husimi, GridSpec, HusimiGrid, SimulationScale};
use crate::cutops::{
    build_p_matrix, build_projector, build_q_matrix, commutator, corner_deviation, cut_operator,
    edge_symbol_error, fiber_toeplitz, BandMatrix, BandedHermitian, MatrixEntries,
};
use crate::error::{Error, Result};
use crate::phase::{
    disk_integral, hamilton_flow, orbit_fourier_coeffs, poisson_bracket, Domain, Hamiltonian,
    PhasePoint, DEFAULT_ANGULAR_NODES, DEFAULT_FLOW_STEP, DEFAULT_RADIAL_NODES,
};
use crate::spectral::{apply_function_with, eigendecompose, Propagator};

/// Where a reference value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Paper,
    ClosedForm,
    QuadratureOracle,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Paper => "paper",
            Provenance::ClosedForm => "closed-form",
            Provenance::QuadratureOracle => "quadrature-oracle",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub name: String,
    pub value: f64,
    pub provenance: Provenance,
}

/// One pass/fail comparison `error ≤ tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub computed: f64,
    pub reference: Option<f64>,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub values: Vec<NamedValue>,
    pub refs: Vec<Reference>,
    pub provenance: Vec<String>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            params: BTreeMap::new(),
            values: Vec::new(),
            refs: Vec::new(),
            provenance: Vec::new(),
            checks: Vec::new(),
            pass: true,
        }
    }

    pub fn param(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.params.insert(key.to_owned(), v.into());
        self
    }

    pub fn value(&mut self, name: impl Into<String>, v: f64) -> &mut Self {
        self.values.push(NamedValue { name: name.into(), value: v });
        self
    }

    pub fn reference(&mut self, name: impl Into<String>, v: f64, provenance: Provenance) -> &mut Self {
        self.refs.push(Reference { name: name.into(), value: v, provenance });
        self.provenance.push(provenance.as_str().to_owned());
        self
    }

    /// Records `|computed − reference| ≤ tolerance`.
    pub fn compare(&mut self, name: impl Into<String>, computed: f64, reference: f64, tolerance: f64) -> bool {
        let error = (computed - reference).abs();
        self.push_check(name.into(), computed, Some(reference), error, tolerance)
    }

    /// Records `computed ≤ bound`.
    pub fn bound(&mut self, name: impl Into<String>, computed: f64, bound: f64) -> bool {
        self.push_check(name.into(), computed, None, computed, bound)
    }

    pub fn require(&mut self, name: impl Into<String>, ok: bool) -> bool {
        self.push_check(name.into(), if ok { 1.0 } else { 0.0 }, Some(1.0), if ok { 0.0 } else { 1.0 }, 0.0)
    }

    fn push_check(&mut self, name: String, computed: f64, reference: Option<f64>, error: f64, tolerance: f64) -> bool {
        let pass = error.is_finite() && error <= tolerance;
        self.pass &= pass;
        self.checks.push(Check { name, computed, reference, error, tolerance, pass });
        pass
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|v| v.name == name).map(|v| v.value)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// One line per check.
    pub fn summary_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                let verdict = if c.pass { "PASS" } else { "FAIL" };
                match c.reference {
                    Some(r) => format!(
                        "{verdict} {}/{}: computed={} reference={} error={:.3e} tol={:.3e}",
                        self.name, c.name, c.computed, r, c.error, c.tolerance
                    ),
                    None => format!(
                        "{verdict} {}/{}: value={:.6e} bound={:.3e}",
                        self.name, c.name, c.computed, c.tolerance
                    ),
                }
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Closed catalogue of spectral functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralFunction {
    Id,
    Square,
    Quartic,
    Cos,
}

impl SpectralFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            SpectralFunction::Id => x,
            SpectralFunction::Square => x * x,
            SpectralFunction::Quartic => (x * x) * (x * x),
            SpectralFunction::Cos => x.cos(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SpectralFunction::Id => "id",
            SpectralFunction::Square => "square",
            SpectralFunction::Quartic => "quartic",
            SpectralFunction::Cos => "cos",
        }
    }
}

impl fmt::Display for SpectralFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpectralFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "id" => Ok(SpectralFunction::Id),
            "square" => Ok(SpectralFunction::Square),
            "quartic" => Ok(SpectralFunction::Quartic),
            "cos" => Ok(SpectralFunction::Cos),
            other => Err(Error::InvalidArgument(format!(
                "unknown function {other:?}; expected one of id, square, quartic, cos"
            ))),
        }
    }
}

/// Built-in observables with both a classical symbol and a Bargmann matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Observable {
    /// Oscillator `P`.
    P,
    /// `Q = x² − p²`.
    Q,
}

impl Observable {
    pub fn hamiltonian(&self) -> Hamiltonian {
        match self {
            Observable::P => Hamiltonian::oscillator(),
            Observable::Q => Hamiltonian::hyperbolic(),
        }
    }

    pub fn matrix(&self, scale: SimulationScale, dim: usize) -> Result<BandedHermitian> {
        match self {
            Observable::P => build_p_matrix(scale, dim),
            Observable::Q => build_q_matrix(scale, dim),
        }
    }

    /// Ambient dimension needed so the band never leaks past the cutoff.
    fn padding(&self) -> usize {
        match self {
            Observable::P => 0,
            Observable::Q => 2,
        }
    }

    /// `Π Â Π` on the range of the projector with the given cutoff index.
    pub fn cut(&self, scale: SimulationScale, cutoff: usize) -> Result<BandedHermitian> {
        let ambient = cutoff + 1 + self.padding();
        cut_operator(&self.matrix(scale, ambient)?, &build_projector(scale, ambient, cutoff)?)
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p" | "P" => Ok(Observable::P),
            "q" | "Q" => Ok(Observable::Q),
            other => Err(Error::InvalidArgument(format!("unknown observable {other:?}; expected p or q"))),
        }
    }
}

/// `Π Q̂ Π` for the disk `{P ≤ E}` at scale `N`.
pub fn cut_q(scale: SimulationScale, energy: f64) -> Result<BandedHermitian> {
    Observable::Q.cut(scale, scale.cutoff_index(energy))
}

const TRACE_TOLERANCE: f64 = 1e-9;

/// Trace of `f(Π Q̂ Π)` against `(N/2π) ∫_{P≤E} f∘Q dx dp`.
///
/// The reported `normalized_error` is `|lhs − rhs| / ln N`, the scale of the
/// remainder in one degree of freedom.
pub fn szego_check(f: SpectralFunction, n: u32, energy: f64) -> Result<ExperimentReport> {
    let scale = SimulationScale::new(n)?;
    let domain = Domain::new(energy)?;
    let cutoff = scale.cutoff_index(energy);
    let cut = cut_q(scale, energy)?;
    let eig = eigendecompose(&cut)?;
    let fm = apply_function_with(&eig, |l| f.eval(l))?;
    let lhs = fm.trace();
    let q = Hamiltonian::hyperbolic();
    let integrand = |x: f64, p: f64| f.eval(q.eval(PhasePoint::new(x, p)));
    let nf = n as f64;
    let rhs = nf / (2.0 * PI)
        * disk_integral(integrand, &domain, DEFAULT_RADIAL_NODES, DEFAULT_ANGULAR_NODES)?;
    let err = (lhs - rhs).abs();

    let mut r = ExperimentReport::new("szego");
    r.param("f", f.name())
        .param("N", n)
        .param("E", energy)
        .param("cutoff_index", cutoff as u64);
    r.value("lhs", lhs).value("rhs", rhs).value("abs_error", err);
    r.value("rel_error", if rhs != 0.0 { err / rhs.abs() } else { err });
    if n >= 2 {
        r.value("normalized_error", err / nf.ln());
        r.value("error_times_n_over_log_n", err * nf / nf.ln());
    }

    match f {
        SpectralFunction::Id => {
            r.reference("lhs", 0.0, Provenance::ClosedForm);
            r.reference("rhs", 0.0, Provenance::ClosedForm);
            r.compare("lhs", lhs, 0.0, TRACE_TOLERANCE);
            r.compare("rhs", rhs, 0.0, TRACE_TOLERANCE);
        }
        SpectralFunction::Square => {
            // tr (ΠQ̂Π)² = 2ℏ² Σ_{k=1}^{K−1} k(k+1) = 2ℏ²(K−1)K(K+1)/3
            let k = cutoff as f64;
            let lhs_exact = 2.0 * (k - 1.0) * k * (k + 1.0) / (3.0 * nf * nf);
            // ∫ (x²−p²)² over the disk = 4πE³/3
            let rhs_exact = 2.0 * nf * energy.powi(3) / 3.0;
            r.reference("lhs", lhs_exact, Provenance::ClosedForm);
            r.reference("rhs", rhs_exact, Provenance::ClosedForm);
            r.compare("lhs", lhs, lhs_exact, TRACE_TOLERANCE);
            r.compare("rhs", rhs, rhs_exact, TRACE_TOLERANCE * rhs_exact.max(1.0));
        }
        SpectralFunction::Quartic => {
            // ∫ (x²−p²)⁴ over the disk = (3π/40)(2E)⁵
            let rhs_exact = nf / (2.0 * PI) * 3.0 * PI / 40.0 * (2.0 * energy).powi(5);
            r.reference("rhs", rhs_exact, Provenance::ClosedForm);
            r.compare("rhs", rhs, rhs_exact, TRACE_TOLERANCE * rhs_exact.max(1.0));
        }
        SpectralFunction::Cos => {
            let fine = nf / (2.0 * PI)
                * disk_integral(integrand, &domain, 2 * DEFAULT_RADIAL_NODES, 2 * DEFAULT_ANGULAR_NODES)?;
            r.reference("rhs", fine, Provenance::QuadratureOracle);
            r.compare("rhs", rhs, fine, TRACE_TOLERANCE * fine.abs().max(1.0));
        }
    }
    Ok(r)
}

/// Szegő checks along a sequence of `N`, asserting the normalized error
/// stays within twice its first value (and, for `square`, that the error is
/// `2/(3N)` within 10% when `E = 1`).
pub fn szego_series(f: SpectralFunction, ns: &[u32], energy: f64) -> Result<(Vec<ExperimentReport>, ExperimentReport)> {
    if ns.len() < 2 || ns.iter().any(|&n| n < 2) {
        return Err(Error::InvalidArgument("a Szegő series needs at least two N ≥ 2".into()));
    }
    let runs: Vec<ExperimentReport> = ns.iter().map(|&n| szego_check(f, n, energy)).collect::<Result<_>>()?;
    let mut r = ExperimentReport::new("szego-series");
    r.param("f", f.name())
        .param("N", ns.iter().map(|&n| Value::from(n)).collect::<Vec<_>>())
        .param("E", energy);
    let first = runs[0].get("normalized_error").unwrap_or(f64::NAN);
    for (run, &n) in runs.iter().zip(ns) {
        let err = run.get("abs_error").unwrap_or(f64::NAN);
        let normalized = run.get("normalized_error").unwrap_or(f64::NAN);
        r.value(format!("abs_error[N={n}]"), err);
        r.value(format!("normalized_error[N={n}]"), normalized);
        if f == SpectralFunction::Square && energy == 1.0 {
            let want = 2.0 / (3.0 * n as f64);
            r.reference(format!("abs_error[N={n}]"), want, Provenance::ClosedForm);
            r.compare(format!("error_is_2_over_3N[N={n}]"), err, want, 0.1 * want);
        }
        if f != SpectralFunction::Id {
            r.bound(format!("normalized_error_bounded[N={n}]"), normalized, 2.0 * first);
        }
    }
    Ok((runs, r))
}

/// Quantum expectation of `Π Â Π` along `e^{−itN ΠĜΠ}` applied to the
/// projected coherent state at `w`, against `a(Φ_t^G(w))`.
///
/// Only generators whose bracket with `P` vanishes are accepted, and the
/// center must lie at least `3√ℏ` inside the disk.
pub fn egorov_check(
    generator: Observable,
    observable: Observable,
    w: Complex64,
    times: &[f64],
    n: u32,
    energy: f64,
) -> Result<ExperimentReport> {
    let scale = SimulationScale::new(n)?;
    let domain = Domain::new(energy)?;
    let hbar = scale.hbar();
    let width = 3.0 * hbar.sqrt();
    let center = PhasePoint::from_z(w);
    let gen_h = generator.hamiltonian();
    let obs_h = observable.hamiltonian();
    let osc = Hamiltonian::oscillator();

    for k in 0..32 {
        let b = domain.boundary_point(2.0 * PI * k as f64 / 32.0);
        for s in [0.25, 0.5, 1.0] {
            let pt = PhasePoint::new(b.x * s, b.p * s);
            if poisson_bracket(&osc, &gen_h, pt)?.abs() > 1e-12 {
                return Err(Error::Hypothesis(format!(
                    "generator {} does not Poisson-commute with P",
                    gen_h.name()
                )));
            }
        }
    }
    let margin = domain.distance_to_boundary(center);
    if margin < width {
        return Err(Error::Hypothesis(format!(
            "center ({:.4}, {:.4}) is {margin:.4} from the boundary, need at least 3√ℏ = {width:.4}",
            center.x, center.p
        )));
    }

    let cutoff = scale.cutoff_index(energy);
    let gen_cut = generator.cut(scale, cutoff)?;
    let obs_cut = observable.cut(scale, cutoff)?;
    let prop = Propagator::new(&gen_cut)?;
    let s0 = coherent_state(w, scale, cutoff)?;

    let mut r = ExperimentReport::new("egorov");
    r.param("generator", format!("{generator:?}"))
        .param("observable", format!("{observable:?}"))
        .param("N", n)
        .param("E", energy)
        .param("w_re", w.re)
        .param("w_im", w.im)
        .param("t", times.to_vec());

    let mut first_expectation = None;
    for &t in times {
        let st = prop.propagate(&s0, t)?;
        let quantum = obs_cut.expectation(st.coeffs())?;
        let moved = match gen_h.exact_flow(center, t) {
            Some(p) => p,
            None => hamilton_flow(&gen_h, center, t, DEFAULT_FLOW_STEP)?,
        };
        let classical = obs_h.eval(moved);
        // largest |∇a| over the coherent-state footprint around the classical point
        let grad_bound = (0..=16)
            .map(|k| {
                let (dx, dp) = if k == 0 {
                    (0.0, 0.0)
                } else {
                    let th = 2.0 * PI * k as f64 / 16.0;
                    (width * th.cos(), width * th.sin())
                };
                let (gx, gp) = obs_h.gradient(PhasePoint::new(moved.x + dx, moved.p + dp));
                gx.hypot(gp)
            })
            .fold(0.0, f64::max);
        let tol = width * grad_bound;
        r.value(format!("quantum[t={t}]"), quantum);
        r.reference(format!("classical[t={t}]"), classical, Provenance::ClosedForm);
        r.compare(format!("tracks_flow[t={t}]"), quantum, classical, tol);
        if generator == observable {
            let e0 = *first_expectation.get_or_insert(quantum);
            r.compare(format!("conserved[t={t}]"), quantum, e0, 1e-8);
        }
    }
    Ok(r)
}

/// Peaks expected in the splitting experiment: one before the center reaches
/// the boundary, two after the split.
pub fn expected_peak_count(t: f64) -> Option<usize> {
    if t.abs() <= 0.15 {
        Some(1)
    } else if (0.4..=0.6).contains(&t) {
        Some(2)
    } else {
        None
    }
}

pub const PEAK_FRACTION: f64 = 0.5;
const ENERGY_MATCH_TOLERANCE: f64 = 0.1;
const ARGMAX_CELLS: f64 = 2.0;

/// Propagates the projected coherent state at `w` under `e^{−itN ΠQ̂Π}` and
/// samples its Husimi density at each time.
pub fn splitting_experiment(
    n: u32,
    w: Complex64,
    times: &[f64],
    grid: &GridSpec,
    renormalize: bool,
) -> Result<(Vec<HusimiGrid>, ExperimentReport)> {
    grid.validate()?;
    let scale = SimulationScale::new(n)?;
    let domain = Domain::new(1.0)?;
    let cutoff = scale.cutoff_index(1.0);
    let prop = Propagator::new(&cut_q(scale, 1.0)?)?;
    let s0 = coherent_state(w, scale, cutoff)?;
    let q = Hamiltonian::hyperbolic();
    let center = PhasePoint::from_z(w);

    let mut r = ExperimentReport::new("splitting");
    r.param("N", n)
        .param("w_re", w.re)
        .param("w_im", w.im)
        .param("t", times.to_vec())
        .param("grid", grid.to_string())
        .param("renormalize", renormalize);

    let mut grids = Vec::with_capacity(times.len());
    for &t in times {
        let mut st = prop.propagate(&s0, t)?;
        if renormalize {
            st = st.normalized()?;
        }
        r.value(format!("norm[t={t}]"), st.norm());
        let g = husimi(&st, grid)?.with_source(
            Some(w),
            t,
            format!("projected coherent state under exp(-itN PiQPi), N={n}"),
        );
        let peaks = g.peaks(PEAK_FRACTION);
        r.value(format!("peak_count[t={t}]"), peaks.len() as f64);
        for (k, pk) in peaks.iter().enumerate() {
            r.value(format!("peak{k}_x[t={t}]"), pk.x);
            r.value(format!("peak{k}_p[t={t}]"), pk.p);
            r.value(format!("peak{k}_Q[t={t}]"), q.eval(pk.point()));
        }
        if let Some(want) = expected_peak_count(t) {
            r.reference(format!("peak_count[t={t}]"), want as f64, Provenance::Paper);
            r.compare(format!("peak_count[t={t}]"), peaks.len() as f64, want as f64, 0.0);
        }
        if t == 0.0 {
            let (i, j) = g.argmax();
            let di = (grid.x(i) - center.x).abs() / grid.dx().max(f64::MIN_POSITIVE);
            let dj = (grid.p(j) - center.p).abs() / grid.dp().max(f64::MIN_POSITIVE);
            r.bound("argmax_at_center_cells[t=0]", di.max(dj), ARGMAX_CELLS);
        }
        if expected_peak_count(t) == Some(2) && peaks.len() == 2 {
            r.require(
                format!("peaks_inside_disk[t={t}]"),
                peaks.iter().all(|pk| domain.contains(pk.point())),
            );
            let dq = (q.eval(peaks[0].point()) - q.eval(peaks[1].point())).abs();
            r.bound(format!("peaks_same_energy[t={t}]"), dq, ENERGY_MATCH_TOLERANCE);
        }
        grids.push(g);
    }
    Ok((grids, r))
}

const ROUND_TRIP_TOLERANCE: f64 = 1e-8;

/// Norm preservation and forward-then-backward recovery of the projected
/// coherent state.
pub fn reversibility_check(n: u32, w: Complex64, times: &[f64], energy: f64) -> Result<ExperimentReport> {
    let scale = SimulationScale::new(n)?;
    let cutoff = scale.cutoff_index(energy);
    let prop = Propagator::new(&cut_q(scale, energy)?)?;
    let s0 = coherent_state(w, scale, cutoff)?;
    let norm0 = s0.norm();
    let mut r = ExperimentReport::new("reversibility");
    r.param("N", n)
        .param("w_re", w.re)
        .param("w_im", w.im)
        .param("t", times.to_vec())
        .param("E", energy);
    for &t in times {
        let fwd = prop.propagate(&s0, t)?;
        let back = prop.propagate(&fwd, -t)?;
        r.compare(format!("norm_preserved[t={t}]"), fwd.norm(), norm0, 1e-10);
        r.bound(format!("round_trip[t={t}]"), back.distance(&s0)?, ROUND_TRIP_TOLERANCE);
    }
    Ok(r)
}

/// `[Π_N, Q̂]` in an ambient space of dimension `N + 3` or larger.
pub fn commutator_check(n: u32, ambient: usize) -> Result<(BandMatrix, ExperimentReport)> {
    let scale = SimulationScale::new(n)?;
    let cutoff = n as usize;
    if ambient < cutoff + 3 {
        return Err(Error::InvalidArgument(format!(
            "ambient dimension {ambient} must be at least N + 3 = {}",
            cutoff + 3
        )));
    }
    let q = build_q_matrix(scale, ambient)?;
    let proj = build_projector(scale, ambient, cutoff)?;
    let c = commutator(&proj, &q)?;

    let mut r = ExperimentReport::new("commutator");
    r.param("N", n).param("ambient_dim", ambient as u64);
    let nz = c.nonzeros();
    let mut positions: Vec<(usize, usize)> = nz.iter().map(|&(i, j, _)| (i, j)).collect();
    positions.sort_unstable();
    let mut expected = vec![
        (cutoff - 1, cutoff + 1),
        (cutoff, cutoff + 2),
        (cutoff + 1, cutoff - 1),
        (cutoff + 2, cutoff),
    ];
    expected.sort_unstable();
    r.value("nonzero_count", nz.len() as f64);
    r.reference("nonzero_count", 4.0, Provenance::ClosedForm);
    r.require("support_straddles_cutoff", positions == expected);

    let edge = c.entry(cutoff, cutoff + 2).abs();
    let want = scale.hbar() * (((cutoff + 1) * (cutoff + 2)) as f64).sqrt();
    r.value("edge_entry", edge);
    r.reference("edge_entry", want, Provenance::ClosedForm);
    r.compare("edge_entry", edge, want, 1e-12);

    let anti = (0..ambient)
        .flat_map(|i| (0..ambient).map(move |j| (i, j)))
        .map(|(i, j)| (c.entry(i, j) + c.entry(j, i)).abs())
        .fold(0.0, f64::max);
    r.bound("antisymmetry", anti, 0.0);

    if ambient <= 64 {
        let (pd, qd) = (proj.to_dense(), q.to_dense());
        let dense: DMatrix<f64> = &pd * &qd - &qd * &pd;
        r.bound("dense_oracle", (dense - c.to_dense()).amax(), 1e-10);
    }
    Ok((c, r))
}

/// Corner of `Π Q̂ Π` at the cutoff against the fiber Toeplitz matrix of
/// `Q` on the boundary orbit, at `N` and `2N`.
pub fn edge_symbol_check(n: u32, corner: usize, energy: f64) -> Result<ExperimentReport> {
    let domain = Domain::new(energy)?;
    let coeffs = orbit_fourier_coeffs(&Hamiltonian::hyperbolic(), &domain, 4, 64)?;
    let fiber = fiber_toeplitz(&coeffs, corner)?;
    let mut errors = Vec::new();
    for nn in [n, 2 * n] {
        let cut = cut_q(SimulationScale::new(nn)?, energy)?;
        errors.push(edge_symbol_error(&cut, &fiber, corner)?);
    }
    let mut r = ExperimentReport::new("edge-symbol");
    r.param("N", n).param("K", corner as u64).param("E", energy);
    r.value("error[N]", errors[0]).value("error[2N]", errors[1]);
    let ratio = errors[1] / errors[0];
    r.value("ratio", ratio);
    r.bound("error_within_(K+2)/N", errors[0], (corner as f64 + 2.0) / n as f64);
    r.compare("halving_ratio", ratio, 0.5, 0.1);
    Ok(r)
}

/// Corner of `(ΠQ̂Π)²` against the product of fiber Toeplitz matrices
/// truncated at `inner`, at `N` and `2N`.
pub fn composition_check(n: u32, corner: usize, inner: usize, energy: f64) -> Result<ExperimentReport> {
    if inner < corner + 4 {
        return Err(Error::InvalidArgument(format!(
            "inner truncation {inner} must exceed the corner {corner} by the symbol bandwidth"
        )));
    }
    let domain = Domain::new(energy)?;
    let coeffs = orbit_fourier_coeffs(&Hamiltonian::hyperbolic(), &domain, 4, 64)?;
    let t = fiber_toeplitz(&coeffs, inner)?;
    let model = t.matrix() * t.matrix();
    let mut errors = Vec::new();
    for nn in [n, 2 * n] {
        let cut = cut_q(SimulationScale::new(nn)?, energy)?;
        errors.push(corner_deviation(&cut.mul(&cut)?, &model, corner)?);
    }
    let mut r = ExperimentReport::new("composition");
    r.param("N", n)
        .param("K", corner as u64)
        .param("inner", inner as u64)
        .param("E", energy);
    r.value("error[N]", errors[0]).value("error[2N]", errors[1]);
    let ratio = errors[1] / errors[0];
    r.value("ratio", ratio);
    r.compare("halving_ratio", ratio, 0.5, 0.1);
    Ok(r)
}
