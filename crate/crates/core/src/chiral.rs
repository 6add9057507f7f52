//! Discretized chiral field on the circle.
//!
//! Real functions on L equally spaced sites carry the complex structure 𝒥
//! (discrete Hilbert transform). Retained Fourier modes `1 ≤ |n| < L/2` are
//! mapped to ℂ^m, m = L/2 − 1, by
//!
//! ```text
//! c_n = √(2n) · conj(û_n),   û_n = (1/L) Σ_j u_j e^{−inθ_j},
//! ```
//!
//! which turns 𝒥 into multiplication by i and the energy form into the
//! standard inner product. All subspaces below live in this mode space.
//!
//! Interval subspaces are spanned by Gaussians that are equally spaced in the
//! log coordinate `u = 2 artanh(tan(φ/2) / tan(h/2))` of the interval, where
//! the geometric Möbius flow is translation `u ↦ u − 2πt`. Only the part of
//! the span that the lattice resolves (K/iK angles above
//! [`LATTICE_RESOLUTION_FLOOR`]) enters the modular computation; it lives in a
//! complex window W ⊂ ℂ^m where it is standard.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular::{
    complex_decode, orthonormal_span, principal_angles, real_encode, subspace_angle, symplectic_complement_basis,
    times_i, tomita_operators, CMatrix, CVector, ConditionReport, ModularData, StandardSubspace,
};
use crate::tolerances::{ANGLE_FLOOR, LATTICE_RESOLUTION_FLOOR};

const TAU: f64 = 2.0 * PI;

/// Angle reduced to (−π, π].
fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(TAU) - PI;
    if y <= -PI {
        y + TAU
    } else {
        y
    }
}

pub struct LatticeModel {
    l: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    modes: CMatrix,
    complex_structure: DMatrix<f64>,
}

impl fmt::Debug for LatticeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LatticeModel").field("l", &self.l).finish()
    }
}

impl LatticeModel {
    /// L must be a power of two, at least 16.
    pub fn build(l: usize) -> Result<LatticeModel> {
        if l < 16 || !l.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("lattice size {l} is not a power of two ≥ 16")));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(l);
        let inverse = planner.plan_fft_inverse(l);
        let mut model = LatticeModel {
            l,
            forward,
            inverse,
            modes: CMatrix::zeros(0, 0),
            complex_structure: DMatrix::zeros(0, 0),
        };
        let m = model.mode_dim();
        let mut modes = CMatrix::zeros(m, l);
        let mut jmat = DMatrix::zeros(l, l);
        for k in 0..l {
            let mut e = DVector::zeros(l);
            e[k] = 1.0;
            let c = model.to_modes(&e);
            modes.set_column(k, &c);
            jmat.set_column(k, &model.from_modes(&c.map(|z| z * Complex64::i())));
        }
        model.modes = modes;
        model.complex_structure = jmat;
        Ok(model)
    }

    pub fn sites(&self) -> usize {
        self.l
    }

    /// Complex dimension m = L/2 − 1 of the retained mode space.
    pub fn mode_dim(&self) -> usize {
        self.l / 2 - 1
    }

    pub fn angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.l as f64
    }

    /// `w_n = n`, n = 1 … m.
    pub fn energy_weights(&self) -> Vec<f64> {
        (1..=self.mode_dim()).map(|n| n as f64).collect()
    }

    /// Site function to mode coordinates.
    pub fn to_modes(&self, u: &DVector<f64>) -> CVector {
        let mut buf: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        let l = self.l as f64;
        CVector::from_fn(self.mode_dim(), |k, _| {
            let n = k + 1;
            (2.0 * n as f64).sqrt() * (buf[n] / l).conj()
        })
    }

    /// Mode coordinates to the band-limited site function.
    pub fn from_modes(&self, c: &CVector) -> DVector<f64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.l];
        for k in 0..self.mode_dim() {
            let n = k + 1;
            let uh = c[k].conj() / (2.0 * n as f64).sqrt();
            buf[n] = uh;
            buf[self.l - n] = uh.conj();
        }
        self.inverse.process(&mut buf);
        DVector::from_iterator(self.l, buf.iter().map(|z| z.re))
    }

    /// The m × L matrix of [`to_modes`](Self::to_modes).
    pub fn modes_matrix(&self) -> &CMatrix {
        &self.modes
    }

    /// 𝒥 as a real L × L matrix.
    pub fn complex_structure(&self) -> &DMatrix<f64> {
        &self.complex_structure
    }

    /// Orthogonal projector onto the retained site functions.
    pub fn retained_projector(&self) -> DMatrix<f64> {
        let mut p = DMatrix::zeros(self.l, self.l);
        for k in 0..self.l {
            p.set_column(k, &self.from_modes(&self.modes.column(k).into_owned()));
        }
        p
    }

    /// `g(u, v) = Σ_{1≤|n|<L/2} |n| û_n conj(v̂_n)`.
    pub fn energy_form(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.to_modes(u).dotc(&self.to_modes(v)).re
    }

    /// `⟨u, v⟩ = g(u, v) + i·g(u, 𝒥v)`.
    pub fn inner_product(&self, u: &DVector<f64>, v: &DVector<f64>) -> Complex64 {
        let jv = &self.complex_structure * v;
        Complex64::new(self.energy_form(u, v), self.energy_form(u, &jv))
    }

    /// Shift by k sites: `(R_k u)_j = u_{j−k}`.
    pub fn rotate(&self, u: &DVector<f64>, k: isize) -> DVector<f64> {
        let l = self.l as isize;
        DVector::from_fn(self.l, |j, _| u[(j as isize - k).rem_euclid(l) as usize])
    }
}

/// Open arc from `a` counterclockwise to `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalOnCircle {
    a: f64,
    b: f64,
}

impl IntervalOnCircle {
    pub fn new(a: f64, b: f64) -> Result<IntervalOnCircle> {
        let len = (b - a).rem_euclid(TAU);
        if !(len > 0.0 && len < TAU) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("arc from {a} to {b} has no interior or is the full circle")));
        }
        let a = a.rem_euclid(TAU);
        Ok(IntervalOnCircle { a, b: a + len })
    }

    /// The half circle starting midway between sites `offset` and `offset + 1`.
    pub fn half_circle(l: usize, offset: isize) -> IntervalOnCircle {
        let a = TAU * (offset as f64 + 0.5) / l as f64;
        IntervalOnCircle::new(a, a + PI).expect("half circle is a proper arc")
    }

    pub fn endpoints(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.b - self.a)
    }

    /// Signed angle from the center, in (−π, π].
    pub fn local_angle(&self, theta: f64) -> f64 {
        wrap(theta - self.center())
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.local_angle(theta).abs() < self.half_width()
    }

    /// Sites strictly inside.
    pub fn sites(&self, l: usize) -> Vec<usize> {
        (0..l).filter(|&j| self.contains(TAU * j as f64 / l as f64)).collect()
    }

    /// Interior of the complement.
    pub fn complement(&self) -> IntervalOnCircle {
        IntervalOnCircle { a: self.b.rem_euclid(TAU), b: self.b.rem_euclid(TAU) + TAU - 2.0 * self.half_width() }
    }

    /// Whether `other` lies in the closure of this arc.
    pub fn encloses(&self, other: &IntervalOnCircle) -> bool {
        let lo = self.local_angle(other.a);
        let hi = lo + (other.b - other.a);
        lo >= -self.half_width() && hi <= self.half_width()
    }

    /// `u = 2 artanh(tan(φ/2) / tan(h/2))`, defined inside the arc.
    pub fn log_coordinate(&self, theta: f64) -> Option<f64> {
        let phi = self.local_angle(theta);
        let h = self.half_width();
        if phi.abs() >= h {
            return None;
        }
        let x = (phi / 2.0).tan() / (h / 2.0).tan();
        Some(2.0 * x.atanh())
    }

    /// Möbius reflection fixing both endpoints and exchanging the arc with its
    /// complement: `tan(φ'/2) = tan²(h/2) / tan(φ/2)`.
    pub fn reflect(&self, theta: f64) -> f64 {
        let phi = self.local_angle(theta);
        let t = (self.half_width() / 2.0).tan();
        let phi_new = 2.0 * (t * t * (phi / 2.0).cos()).atan2((phi / 2.0).sin());
        (self.center() + wrap(phi_new)).rem_euclid(TAU)
    }

    /// Image of `other` under [`reflect`](Self::reflect); orientation reverses.
    pub fn reflect_interval(&self, other: &IntervalOnCircle) -> IntervalOnCircle {
        let a = self.reflect(other.b);
        let b = self.reflect(other.a);
        IntervalOnCircle::new(a, b).expect("reflection of a proper arc is a proper arc")
    }

    /// Möbius flow δ_t fixing the endpoints, acting as `u ↦ u − 2πt` in the
    /// log coordinate. Returns the image and the derivative `dδ_t/dθ`.
    pub fn flow(&self, t: f64, theta: f64) -> (f64, f64) {
        let phi = self.local_angle(theta);
        let t_half = (self.half_width() / 2.0).tan();
        let e = (TAU * t).exp();
        let (s, c) = (phi / 2.0).sin_cos();
        let num = (t_half * c + s) - e * (t_half * c - s);
        let den = (t_half * c + s) + e * (t_half * c - s);
        let phi_new = 2.0 * (t_half * num).atan2(den);
        let derivative = 4.0 * e * t_half * t_half / (den * den + t_half * t_half * num * num);
        ((self.center() + wrap(phi_new)).rem_euclid(TAU), derivative)
    }
}

/// Gaussian `exp(−(u − u0)²/2w²)` in the log coordinate of `interval`,
/// sampled on the sites and zero outside.
pub fn log_gaussian(model: &LatticeModel, interval: &IntervalOnCircle, u0: f64, width: f64) -> DVector<f64> {
    DVector::from_fn(model.sites(), |j, _| match interval.log_coordinate(model.angle(j)) {
        Some(u) => (-(u - u0).powi(2) / (2.0 * width * width)).exp(),
        None => 0.0,
    })
}

/// Placement of the Gaussians spanning an interval subspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Recipe {
    pub count: usize,
    /// Centers run over `[−spread, spread]`.
    pub spread: f64,
    pub width: f64,
}

impl Recipe {
    /// `max(1, n/4)` Gaussians over `|u| ≤ ½ ln 2n`, width 1.3 spacings.
    pub fn for_sites(n_sites: usize) -> Recipe {
        let count = (n_sites / 4).max(1);
        let spread = 0.5 * (2.0 * n_sites as f64).ln();
        let width = if count == 1 { 1.0 } else { 1.3 * 2.0 * spread / (count - 1) as f64 };
        Recipe { count, spread, width }
    }

    /// A single Gaussian at u = 0.
    pub fn probe() -> Recipe {
        Recipe { count: 1, spread: 0.0, width: 0.8 }
    }

    pub fn centers(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![0.0];
        }
        let step = 2.0 * self.spread / (self.count - 1) as f64;
        (0..self.count).map(|k| -self.spread + step * k as f64).collect()
    }
}

/// Orthonormal real basis (2m rows) of the span of the recipe's Gaussians.
pub fn gaussian_span(model: &LatticeModel, interval: &IntervalOnCircle, recipe: &Recipe) -> DMatrix<f64> {
    let centers = recipe.centers();
    let mut b = CMatrix::zeros(model.mode_dim(), centers.len());
    for (k, &u0) in centers.iter().enumerate() {
        b.set_column(k, &(model.modes_matrix() * log_gaussian(model, interval, u0, recipe.width).map(|x| Complex64::new(x, 0.0))));
    }
    orthonormal_span(&real_encode(&b))
}

/// An interval subspace with its resolved part.
#[derive(Debug, Clone)]
pub struct IntervalSubspace {
    pub interval: IntervalOnCircle,
    pub recipe: Recipe,
    /// Orthonormal real basis of the full span in the mode space.
    pub model_basis: DMatrix<f64>,
    /// K/iK conditioning of the full span against the whole mode space.
    pub model_condition: ConditionReport,
    /// Sines of the K/iK angles of the full span, descending.
    pub resolution: Vec<f64>,
    /// Orthonormal complex basis of the window, m × r.
    pub window: CMatrix,
    /// The resolved part, standard in the window.
    pub local: StandardSubspace,
}

impl IntervalSubspace {
    pub fn window_dim(&self) -> usize {
        self.window.ncols()
    }

    /// Whether the full span is standard in the whole mode space.
    pub fn standard_in_model(&self) -> bool {
        self.model_condition.standard()
    }

    pub fn modular(&self) -> Result<ModularData> {
        tomita_operators(&self.local)
    }

    pub fn to_window(&self, v: &CVector) -> CVector {
        self.window.adjoint() * v
    }

    pub fn from_window(&self, w: &CVector) -> CVector {
        &self.window * w
    }
}

fn check_interval(model: &LatticeModel, interval: &IntervalOnCircle) -> Result<()> {
    if interval.sites(model.sites()).is_empty() || interval.complement().sites(model.sites()).is_empty() {
        return Err(Error::InvalidParameter("interval and its complement must both contain sites".into()));
    }
    Ok(())
}

/// K(I) with the default recipe for its site count.
pub fn interval_subspace(model: &LatticeModel, interval: &IntervalOnCircle) -> Result<IntervalSubspace> {
    check_interval(model, interval)?;
    let recipe = Recipe::for_sites(interval.sites(model.sites()).len());
    interval_subspace_with(model, interval, &recipe)
}

pub fn interval_subspace_with(model: &LatticeModel, interval: &IntervalOnCircle, recipe: &Recipe) -> Result<IntervalSubspace> {
    check_interval(model, interval)?;
    let m = model.mode_dim();
    let q = gaussian_span(model, interval, recipe);
    let model_condition = ConditionReport {
        angles: principal_angles(&q, &times_i(&q)),
        real_dim: q.ncols(),
        ambient_dim: m,
        floor: ANGLE_FLOOR,
    };
    // Right singular vectors of the part of iK orthogonal to K, ordered by
    // the sine of their angle to K.
    let iq = times_i(&q);
    let leak = &iq - &q * (q.transpose() * &iq);
    let svd = leak.svd(false, true);
    let vt = svd.v_t.expect("requested Vᵀ");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let resolution: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let kept: Vec<usize> = order.iter().copied().filter(|&i| svd.singular_values[i] >= LATTICE_RESOLUTION_FLOOR).collect();
    if kept.is_empty() {
        return Err(Error::NotStandard(model_condition));
    }
    let ka = &q * DMatrix::from_fn(q.ncols(), kept.len(), |i, j| vt[(kept[j], i)]);
    let kc = complex_decode(&ka);
    let r = kept.len();
    let u = kc.clone().svd(true, false).u.expect("requested U");
    let window = u.columns(0, r).into_owned();
    let local_gens: Vec<CVector> = {
        let local = window.adjoint() * &kc;
        (0..r).map(|j| local.column(j).into_owned()).collect()
    };
    let local = StandardSubspace::with_floor(local_gens, ANGLE_FLOOR)?;
    Ok(IntervalSubspace { interval: *interval, recipe: *recipe, model_basis: q, model_condition, resolution, window, local })
}

/// K(P) for a probe interval: a single Gaussian.
pub fn probe_subspace(model: &LatticeModel, probe: &IntervalOnCircle) -> DMatrix<f64> {
    gaussian_span(model, probe, &Recipe::probe())
}

/// `Σ_{n=1}^{m} cos(nδ)`.
fn cosine_sum(m: usize, delta: f64) -> f64 {
    let half = (0.5 * delta).sin();
    if half.abs() < 1e-6 {
        return (1..=m).map(|n| (n as f64 * delta).cos()).sum();
    }
    ((m as f64 + 0.5) * delta).sin() / (2.0 * half) - 0.5
}

/// `(U(t)f)(θ) = f(δ_{−t}θ) · (δ_{−t}'(θ))^exponent`, with f evaluated off
/// the sites by band-limited interpolation over the retained modes.
pub fn mobius_flow_unitary(model: &LatticeModel, interval: &IntervalOnCircle, t: f64, exponent: f64) -> DMatrix<f64> {
    let l = model.sites();
    let m = model.mode_dim();
    let mut out = DMatrix::zeros(l, l);
    for j in 0..l {
        let (theta, der) = interval.flow(-t, model.angle(j));
        let weight = if exponent == 0.0 { 1.0 } else { der.powf(exponent) };
        for k in 0..l {
            out[(j, k)] = weight * 2.0 * cosine_sum(m, theta - model.angle(k)) / l as f64;
        }
    }
    out
}

/// `max_v ‖U(s)U(t)v − U(s+t)v‖ / ‖v‖` in the energy norm over band-limited
/// test vectors.
pub fn flow_group_law_residual(model: &LatticeModel, interval: &IntervalOnCircle, s: f64, t: f64, family: &[TestVector]) -> f64 {
    let us = mobius_flow_unitary(model, interval, s, 0.0);
    let ut = mobius_flow_unitary(model, interval, t, 0.0);
    let ust = mobius_flow_unitary(model, interval, s + t, 0.0);
    family
        .iter()
        .map(|tv| {
            let f = model.from_modes(&model.to_modes(&log_gaussian(model, interval, tv.u0, tv.width)));
            let diff = &us * (&ut * &f) - &ust * &f;
            model.to_modes(&diff).norm() / model.to_modes(&f).norm()
        })
        .fold(0.0, f64::max)
}

/// Gaussian in the log coordinate of the interval under test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestVector {
    pub u0: f64,
    pub width: f64,
}

pub const STANDARD_FAMILY: [TestVector; 3] = [
    TestVector { u0: 0.0, width: 0.5 },
    TestVector { u0: 0.0, width: 0.7 },
    TestVector { u0: -0.3, width: 0.6 },
];

/// Density exponents reported next to the asserted exponent 0.
pub const DIAGNOSTIC_EXPONENTS: [f64; 2] = [0.5, 1.0];

#[derive(Debug, Clone, Serialize)]
pub struct BwReport {
    pub l: usize,
    pub interval: IntervalOnCircle,
    pub window_dim: usize,
    pub t_grid: Vec<f64>,
    /// max over the family of `‖(Δ^{it} − U(t))v‖ / ‖v‖`, per t, with each
    /// test vector projected to the window.
    pub defects: Vec<f64>,
    /// Same with density exponents 0.5 and 1, per t.
    pub diagnostic_defects: Vec<Vec<f64>>,
    /// max over the family of `‖z(t)v − v‖ / ‖v‖` with `z(t) = Δ^{it}U(−t)`.
    pub z_deviation: Vec<f64>,
    /// max over the family of `‖z(s+t)v − z(s)z(t)v‖ / ‖v‖` with s = t/2.
    pub z_group_law: Vec<f64>,
}

impl BwReport {
    pub fn defect_at(&self, t: f64) -> Option<f64> {
        self.t_grid.iter().position(|&x| x == t).map(|i| self.defects[i])
    }
}

/// Flow matrices memoized by (t, exponent).
struct Geometric<'a> {
    model: &'a LatticeModel,
    interval: &'a IntervalOnCircle,
    cache: RefCell<HashMap<(u64, u64), DMatrix<f64>>>,
}

impl Geometric<'_> {
    fn apply(&self, t: f64, exponent: f64, v: &CVector) -> CVector {
        let mut cache = self.cache.borrow_mut();
        let u = cache
            .entry((t.to_bits(), exponent.to_bits()))
            .or_insert_with(|| mobius_flow_unitary(self.model, self.interval, t, exponent));
        self.model.to_modes(&(&*u * self.model.from_modes(v)))
    }
}

fn validate_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.iter().any(|t| !(t.abs() <= 0.5)) {
        return Err(Error::InvalidParameter("t grid must lie in [−0.5, 0.5]".into()));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("t grid must be non-decreasing".into()));
    }
    Ok(())
}

pub fn bw_defect(
    model: &LatticeModel,
    sub: &IntervalSubspace,
    t_grid: &[f64],
    family: &[TestVector],
) -> Result<BwReport> {
    validate_grid(t_grid)?;
    let md = sub.modular()?;
    let geo = Geometric { model, interval: &sub.interval, cache: RefCell::new(HashMap::new()) };
    // Only the resolved part of each test vector has a modular image.
    let vectors: Vec<CVector> = family
        .iter()
        .map(|tv| {
            let v = model.to_modes(&log_gaussian(model, &sub.interval, tv.u0, tv.width));
            sub.from_window(&sub.to_window(&v))
        })
        .collect();
    let modular = |t: f64, v: &CVector| sub.from_window(&(md.delta_it(t) * sub.to_window(v)));
    let z = |t: f64, v: &CVector| modular(t, &geo.apply(-t, 0.0, v));
    let rel = |a: &CVector, b: &CVector, v: &CVector| (a - b).norm() / v.norm();

    let mut defects = Vec::new();
    let mut diagnostic_defects = vec![Vec::new(); DIAGNOSTIC_EXPONENTS.len()];
    let mut z_deviation = Vec::new();
    let mut z_group_law = Vec::new();
    for &t in t_grid {
        let mut worst = 0.0f64;
        let mut worst_diag = vec![0.0f64; DIAGNOSTIC_EXPONENTS.len()];
        let mut worst_z = 0.0f64;
        let mut worst_law = 0.0f64;
        for v in &vectors {
            let dv = modular(t, v);
            worst = worst.max(rel(&dv, &geo.apply(t, 0.0, v), v));
            for (k, &w) in DIAGNOSTIC_EXPONENTS.iter().enumerate() {
                worst_diag[k] = worst_diag[k].max(rel(&dv, &geo.apply(t, w, v), v));
            }
            worst_z = worst_z.max(rel(&z(t, v), v, v));
            let s = 0.5 * t;
            worst_law = worst_law.max(rel(&z(s + t, v), &z(s, &z(t, v)), v));
        }
        defects.push(worst);
        for (k, d) in worst_diag.into_iter().enumerate() {
            diagnostic_defects[k].push(d);
        }
        z_deviation.push(worst_z);
        z_group_law.push(worst_law);
    }
    Ok(BwReport {
        l: model.sites(),
        interval: sub.interval,
        window_dim: sub.window_dim(),
        t_grid: t_grid.to_vec(),
        defects,
        diagnostic_defects,
        z_deviation,
        z_group_law,
    })
}

/// Largest principal angle between the symplectic complement of K(I) and
/// K(I′), over the dimension of K(I′).
pub fn duality_defect(model: &LatticeModel, interval: &IntervalOnCircle) -> Result<f64> {
    let k = interval_subspace(model, interval)?;
    let kc = interval_subspace(model, &interval.complement())?;
    let complement = symplectic_complement_basis(&k.model_basis);
    Ok(subspace_angle(&complement, &kc.model_basis))
}

/// Norm of the symplectic pairing `Im⟨a, b⟩` between two orthonormal real
/// spans; the sine of the duality defect.
pub fn symplectic_pairing_norm(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let p = a.transpose() * times_i(b);
    if p.is_empty() {
        0.0
    } else {
        p.singular_values().max()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PctReport {
    pub defect: f64,
    pub j_squared_residual: f64,
}

/// Angle between J·K(probe) and K(r·probe), J from K(I) and r the
/// reflection fixing the endpoints of I.
pub fn pct_geometry_defect(model: &LatticeModel, sub: &IntervalSubspace, probe: &IntervalOnCircle) -> Result<PctReport> {
    let i = &sub.interval;
    if !(i.encloses(probe) || i.complement().encloses(probe)) {
        return Err(Error::InvalidParameter("probe must lie inside the interval or its complement".into()));
    }
    let md = sub.modular()?;
    let bp = complex_decode(&probe_subspace(model, probe));
    let jb = &sub.window * md.j.apply_matrix(&(sub.window.adjoint() * bp));
    let reflected = probe_subspace(model, &i.reflect_interval(probe));
    Ok(PctReport { defect: subspace_angle(&real_encode(&jb), &reflected), j_squared_residual: md.j_squared_residual() })
}

/// `Σ_{n=1}^{N} e^{−βn}`, the one-particle partition sum of the conformal
/// Hamiltonian truncated at level N.
pub fn energy_trace(levels: usize, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    Ok((1..=levels).map(|n| (-beta * n as f64).exp()).sum())
}

/// Partition sum over the model's retained levels.
pub fn model_energy_trace(model: &LatticeModel, beta: f64) -> Result<f64> {
    energy_trace(model.energy_weights().len(), beta)
}

/// `e^{−β} / (1 − e^{−β})`, the N → ∞ limit.
pub fn energy_trace_limit(beta: f64) -> f64 {
    (-beta).exp() / -(-beta).exp_m1()
}

/// `e^{−β}(1 − e^{−βN}) / (1 − e^{−β})`, the truncated sum in closed form.
pub fn energy_trace_closed_form(levels: usize, beta: f64) -> f64 {
    (-beta).exp() * (-beta * levels as f64).exp_m1() / (-beta).exp_m1()
}

/// `e^{−βN} / (1 − e^{−β})`, an upper bound on the omitted tail.
pub fn energy_trace_tail_bound(levels: usize, beta: f64) -> f64 {
    (-beta * levels as f64).exp() / -(-beta).exp_m1()
}

/// Chiral quantities at one lattice size for the half circle.
#[derive(Debug, Clone, Serialize)]
pub struct LadderRow {
    pub l: usize,
    pub window_dim: usize,
    pub min_resolved_sine: f64,
    pub bw: BwReport,
    pub duality: f64,
    pub duality_rotated: f64,
    pub pct: PctReport,
    pub modular_identity: f64,
}

/// t values at which the BW defect is recorded.
pub const BW_T_GRID: [f64; 5] = [-0.25, -0.1, 0.0, 0.1, 0.25];

/// Sites by which the rotated duality check shifts the interval.
pub const ROTATION_SITES: isize = 3;

/// Probe for the PCT check: centered 0.3 rad inside the half circle from its
/// center, half-width 0.5.
pub fn standard_probe(interval: &IntervalOnCircle) -> IntervalOnCircle {
    let c = interval.center() + 0.3;
    IntervalOnCircle::new(c - 0.5, c + 0.5).expect("probe is a proper arc")
}

pub fn ladder_row(l: usize) -> Result<LadderRow> {
    let model = LatticeModel::build(l)?;
    let interval = IntervalOnCircle::half_circle(l, 0);
    let sub = interval_subspace(&model, &interval)?;
    let md = sub.modular()?;
    let bw = bw_defect(&model, &sub, &BW_T_GRID, &STANDARD_FAMILY)?;
    let duality = duality_defect(&model, &interval)?;
    let duality_rotated = duality_defect(&model, &IntervalOnCircle::half_circle(l, ROTATION_SITES))?;
    let pct = pct_geometry_defect(&model, &sub, &standard_probe(&interval))?;
    let modular_identity = md
        .s_squared_residual()
        .max(md.j_squared_residual())
        .max(md.j_delta_j_residual())
        .max(md.polar_residual());
    let kept = sub.window_dim();
    Ok(LadderRow {
        l,
        window_dim: kept,
        min_resolved_sine: sub.resolution[kept - 1],
        bw,
        duality,
        duality_rotated,
        pct,
        modular_identity,
    })
}

/// Rows for each size; sizes run on separate threads.
pub fn ladder(sizes: &[usize]) -> Result<Vec<LadderRow>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = sizes.iter().map(|&l| scope.spawn(move || ladder_row(l))).collect();
        handles.into_iter().map(|h| h.join().expect("ladder worker panicked")).collect()
    })
}

/// Frozen results of a calibration run of [`ladder`], the source of the BW
/// ceiling at the top size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub sizes: Vec<usize>,
    pub calibration_size: usize,
    /// Seed of the run. The chiral computations draw no random numbers.
    pub seed: u64,
    pub slack: f64,
    pub t: f64,
    /// Largest BW defect over [`BW_T_GRID`] at the calibration size.
    pub bw_ceiling: f64,
    pub bw_at_t: Vec<f64>,
    pub z_group_law: f64,
    pub duality: Vec<f64>,
    pub pct: Vec<f64>,
    pub environment: BTreeMap<String, String>,
}

impl Calibration {
    pub fn from_rows(rows: &[LadderRow], seed: u64, slack: f64, environment: BTreeMap<String, String>) -> Result<Calibration> {
        let top = rows.iter().max_by_key(|r| r.l).ok_or_else(|| Error::InvalidParameter("no ladder rows".into()))?;
        let t = 0.25;
        let at_t = |r: &LadderRow| r.bw.defect_at(t).ok_or_else(|| Error::InvalidParameter("t = 0.25 missing from the grid".into()));
        Ok(Calibration {
            sizes: rows.iter().map(|r| r.l).collect(),
            calibration_size: top.l,
            seed,
            slack,
            t,
            bw_ceiling: top.bw.defects.iter().copied().fold(0.0, f64::max),
            bw_at_t: rows.iter().map(at_t).collect::<Result<_>>()?,
            z_group_law: top.bw.z_group_law.iter().copied().fold(0.0, f64::max),
            duality: rows.iter().map(|r| r.duality).collect(),
            pct: rows.iter().map(|r| r.pct.defect).collect(),
            environment,
        })
    }

    /// Ceiling with slack applied.
    pub fn limit(&self) -> f64 {
        self.bw_ceiling * (1.0 + self.slack)
    }
}
