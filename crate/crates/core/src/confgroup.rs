//! The conformal group of d-dimensional Minkowski space realized as O(d,2)
//! acting on null rays of ℝ^{d+2}.
//!
//! Ray coordinates are ξ₀ … ξ_{d+1} with the form
//! `Q(ξ) = ξ₀² − ξ₁² − … − ξ_d² + ξ_{d+1}²`. A point x embeds as
//! `(x, (1 + x²)/2, (1 − x²)/2)`, so `ξ_d + ξ_{d+1} = 1` and
//! `ξ_d − ξ_{d+1} = x²`. Most elements are easiest to write in the light-cone
//! pair `p = ξ_d + ξ_{d+1}`, `q = ξ_d − ξ_{d+1}`, where a point reads
//! `(x, 1, x²)` and `Q = η(x, x) − p·q`; [`from_light_cone`] converts such
//! matrices back to ξ coordinates.
//!
//! Elements are compared modulo overall sign: ±g act identically on rays.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{minkowski_norm, minkowski_product, Point};
use crate::tolerances::{ALGEBRA_FORM, AT_INFINITY, GROUP_FORM, NULL_RAY};

/// The diagonal (d,2) form.
pub fn form(d: usize) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(d + 2, d + 2);
    q[(0, 0)] = 1.0;
    for i in 1..=d {
        q[(i, i)] = -1.0;
    }
    q[(d + 1, d + 1)] = 1.0;
    q
}

fn quadratic(xi: &DVector<f64>) -> f64 {
    let n = xi.len();
    let mut s = xi[0] * xi[0] + xi[n - 1] * xi[n - 1];
    for i in 1..n - 1 {
        s -= xi[i] * xi[i];
    }
    s
}

/// Change of basis ξ ↦ (x, p, q).
fn light_cone_basis(d: usize) -> DMatrix<f64> {
    let mut t = DMatrix::identity(d + 2, d + 2);
    t[(d, d)] = 1.0;
    t[(d, d + 1)] = 1.0;
    t[(d + 1, d)] = 1.0;
    t[(d + 1, d + 1)] = -1.0;
    t
}

fn light_cone_basis_inv(d: usize) -> DMatrix<f64> {
    let mut t = DMatrix::identity(d + 2, d + 2);
    t[(d, d)] = 0.5;
    t[(d, d + 1)] = 0.5;
    t[(d + 1, d)] = 0.5;
    t[(d + 1, d + 1)] = -0.5;
    t
}

/// Converts a matrix written in (x, p, q) coordinates to ξ coordinates.
pub fn from_light_cone(d: usize, m: &DMatrix<f64>) -> DMatrix<f64> {
    light_cone_basis_inv(d) * m * light_cone_basis(d)
}

/// Converts a matrix in ξ coordinates to (x, p, q) coordinates.
pub fn to_light_cone(d: usize, m: &DMatrix<f64>) -> DMatrix<f64> {
    light_cone_basis(d) * m * light_cone_basis_inv(d)
}

/// An isotropic ray of ℝ^{d+2}, stored unit-normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct Ray {
    xi: DVector<f64>,
}

impl Ray {
    pub fn new(xi: DVector<f64>) -> Result<Ray> {
        if xi.len() < 3 {
            return Err(Error::Dimension { expected: 3, got: xi.len() });
        }
        let n = xi.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotNull("zero or non-finite vector".into()));
        }
        let xi = xi / n;
        let r = quadratic(&xi);
        if r.abs() > NULL_RAY {
            return Err(Error::NotNull(format!("Q = {r:.3e} after normalization")));
        }
        Ok(Ray { xi })
    }

    pub fn xi(&self) -> &DVector<f64> {
        &self.xi
    }

    /// Spacetime dimension d of the Minkowski chart.
    pub fn dim(&self) -> usize {
        self.xi.len() - 2
    }
}

/// Result of mapping a point: either a finite point or the singular set.
#[derive(Debug, Clone, PartialEq)]
pub enum Image {
    Finite(Point),
    Singular,
}

impl Image {
    pub fn finite(self) -> Option<Point> {
        match self {
            Image::Finite(x) => Some(x),
            Image::Singular => None,
        }
    }

    pub fn is_singular(&self) -> bool {
        matches!(self, Image::Singular)
    }
}

/// Result of [`project`].
#[derive(Debug, Clone, PartialEq)]
pub enum Projected {
    Point(Point),
    AtInfinity,
}

pub fn embed(x: &Point) -> Ray {
    let d = x.len();
    let x2 = minkowski_norm(x);
    let mut xi = DVector::zeros(d + 2);
    xi.rows_mut(0, d).copy_from(x);
    xi[d] = 0.5 * (1.0 + x2);
    xi[d + 1] = 0.5 * (1.0 - x2);
    let n = xi.norm();
    Ray { xi: xi / n }
}

fn project_vector(xi: &DVector<f64>) -> Projected {
    let n = xi.norm();
    let d = xi.len() - 2;
    let p = (xi[d] + xi[d + 1]) / n;
    if p.abs() < AT_INFINITY {
        return Projected::AtInfinity;
    }
    let p = xi[d] + xi[d + 1];
    Projected::Point(xi.rows(0, d).into_owned() / p)
}

pub fn project(r: &Ray) -> Projected {
    project_vector(&r.xi)
}

/// An element of O(d,2).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    m: DMatrix<f64>,
}

impl GroupElement {
    /// Wraps a matrix after checking `gᵀQg = Q`.
    pub fn new(m: DMatrix<f64>) -> Result<GroupElement> {
        if m.nrows() != m.ncols() || m.nrows() < 3 {
            return Err(Error::InvalidParameter(format!(
                "group matrix must be square of size ≥ 3, got {}×{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let r = form_residual(&m);
        if !(r < GROUP_FORM) {
            return Err(Error::NotInGroup(r));
        }
        Ok(GroupElement { m })
    }

    fn trusted(m: DMatrix<f64>) -> GroupElement {
        GroupElement { m }
    }

    pub fn identity(d: usize) -> GroupElement {
        GroupElement { m: DMatrix::identity(d + 2, d + 2) }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows() - 2
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement { m: &self.m * &other.m }
    }

    /// Exact inverse `Q gᵀ Q`.
    pub fn inverse(&self) -> GroupElement {
        let q = form(self.dim());
        GroupElement { m: &q * self.m.transpose() * &q }
    }

    pub fn neg(&self) -> GroupElement {
        GroupElement { m: -&self.m }
    }

    /// Max-norm distance to `other`, minimized over the overall sign.
    pub fn distance_mod_sign(&self, other: &GroupElement) -> f64 {
        sign_distance(&self.m, &other.m)
    }

    /// Residual of the form identity `gᵀQg − Q`.
    pub fn form_residual(&self) -> f64 {
        form_residual(&self.m)
    }

    /// True when g is (±) a Poincaré transformation: it preserves the
    /// light-cone coordinate p up to sign, so it maps the chart to itself.
    pub fn is_poincare(&self) -> bool {
        let d = self.dim();
        let lc = to_light_cone(d, &self.m);
        let s = lc[(d, d)];
        if (s.abs() - 1.0).abs() > GROUP_FORM {
            return false;
        }
        (0..d + 2).filter(|&j| j != d).all(|j| lc[(d, j)].abs() < GROUP_FORM)
    }
}

/// Max-norm distance between two matrices modulo overall sign.
pub fn sign_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let plus = (a - b).amax();
    let minus = (a + b).amax();
    plus.min(minus)
}

fn form_residual(m: &DMatrix<f64>) -> f64 {
    let q = form(m.nrows() - 2);
    (m.transpose() * &q * m - q).amax()
}

/// An element of the Lie algebra o(d,2).
#[derive(Debug, Clone, PartialEq)]
pub struct LieGenerator {
    m: DMatrix<f64>,
}

impl LieGenerator {
    pub fn new(m: DMatrix<f64>) -> Result<LieGenerator> {
        if m.nrows() != m.ncols() || m.nrows() < 3 {
            return Err(Error::InvalidParameter("generator must be square of size ≥ 3".into()));
        }
        let q = form(m.nrows() - 2);
        let r = (m.transpose() * &q + &q * &m).amax();
        if !(r < ALGEBRA_FORM) {
            return Err(Error::NotInAlgebra(r));
        }
        Ok(LieGenerator { m })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows() - 2
    }

    /// `exp(t·A)` by scaling and squaring with a Padé approximant.
    pub fn exp(&self, t: f64) -> GroupElement {
        GroupElement::trusted((&self.m * t).exp())
    }

    pub fn scale(&self, s: f64) -> LieGenerator {
        LieGenerator { m: &self.m * s }
    }

    pub fn add(&self, other: &LieGenerator) -> LieGenerator {
        LieGenerator { m: &self.m + &other.m }
    }

    /// `g A g⁻¹`.
    pub fn conjugate(&self, g: &GroupElement) -> LieGenerator {
        LieGenerator { m: g.matrix() * &self.m * g.inverse().matrix() }
    }
}

/// Elementary conformal transformations. Spatial axes are numbered
/// 1 … d−1; axis 0 is time.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementKind {
    Translation(Vec<f64>),
    Boost { axis: usize, rapidity: f64 },
    Rotation { i: usize, j: usize, angle: f64 },
    Dilation(f64),
    Special(Vec<f64>),
    RayInversion,
    /// `x ↦ −(x₀, …, −xᵢ, …)/x²`.
    R(usize),
    /// Sign change of one spatial coordinate.
    P(usize),
}

fn check_axis(d: usize, i: usize) -> Result<()> {
    if i == 0 || i >= d {
        return Err(Error::InvalidParameter(format!(
            "spatial axis {i} out of range 1..={} for d = {d}",
            d.saturating_sub(1)
        )));
    }
    Ok(())
}

fn check_vector(d: usize, a: &[f64]) -> Result<()> {
    if a.len() != d {
        return Err(Error::Dimension { expected: d, got: a.len() });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite vector entry".into()));
    }
    Ok(())
}

fn translation_lc(d: usize, a: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::identity(d + 2, d + 2);
    let av = DVector::from_column_slice(a);
    for i in 0..d {
        m[(i, d)] = a[i];
        let eta = if i == 0 { 1.0 } else { -1.0 };
        m[(d + 1, i)] = 2.0 * eta * a[i];
    }
    m[(d + 1, d)] = minkowski_norm(&av);
    m
}

fn lorentz_lc(d: usize, l: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::identity(d + 2, d + 2);
    m.view_mut((0, 0), (d, d)).copy_from(l);
    m
}

fn ray_inversion_lc(d: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(d + 2, d + 2);
    for i in 0..d {
        m[(i, i)] = -1.0;
    }
    m[(d, d + 1)] = 1.0;
    m[(d + 1, d)] = 1.0;
    m
}

/// Builds the O(d,2) matrix of an elementary transformation.
pub fn make_element(d: usize, kind: &ElementKind) -> Result<GroupElement> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    let lc = match kind {
        ElementKind::Translation(a) => {
            check_vector(d, a)?;
            translation_lc(d, a)
        }
        ElementKind::Boost { axis, rapidity } => {
            check_axis(d, *axis)?;
            let mut l = DMatrix::identity(d, d);
            let (c, s) = (rapidity.cosh(), rapidity.sinh());
            l[(0, 0)] = c;
            l[(0, *axis)] = s;
            l[(*axis, 0)] = s;
            l[(*axis, *axis)] = c;
            lorentz_lc(d, &l)
        }
        ElementKind::Rotation { i, j, angle } => {
            check_axis(d, *i)?;
            check_axis(d, *j)?;
            if i == j {
                return Err(Error::InvalidParameter("rotation needs two distinct axes".into()));
            }
            let mut l = DMatrix::identity(d, d);
            let (c, s) = (angle.cos(), angle.sin());
            l[(*i, *i)] = c;
            l[(*i, *j)] = -s;
            l[(*j, *i)] = s;
            l[(*j, *j)] = c;
            lorentz_lc(d, &l)
        }
        ElementKind::Dilation(lambda) => {
            if !(*lambda > 0.0) || !lambda.is_finite() {
                return Err(Error::InvalidParameter(format!("dilation factor {lambda} must be > 0")));
            }
            let mut m = DMatrix::identity(d + 2, d + 2);
            m[(d, d)] = 1.0 / lambda;
            m[(d + 1, d + 1)] = *lambda;
            m
        }
        ElementKind::Special(a) => {
            check_vector(d, a)?;
            let r = ray_inversion_lc(d);
            &r * translation_lc(d, a) * &r
        }
        ElementKind::RayInversion => ray_inversion_lc(d),
        ElementKind::R(i) => {
            check_axis(d, *i)?;
            let mut p = DMatrix::identity(d + 2, d + 2);
            p[(*i, *i)] = -1.0;
            ray_inversion_lc(d) * p
        }
        ElementKind::P(i) => {
            check_axis(d, *i)?;
            let mut p = DMatrix::identity(d + 2, d + 2);
            p[(*i, *i)] = -1.0;
            p
        }
    };
    Ok(GroupElement::trusted(from_light_cone(d, &lc)))
}

/// A general Lorentz transformation acting on the x block.
pub fn lorentz(l: &DMatrix<f64>) -> Result<GroupElement> {
    let d = l.nrows();
    GroupElement::new(from_light_cone(d, &lorentz_lc(d, l)))
}

pub fn translation(a: &[f64]) -> GroupElement {
    GroupElement::trusted(from_light_cone(a.len(), &translation_lc(a.len(), a)))
}

pub fn dilation(d: usize, lambda: f64) -> Result<GroupElement> {
    make_element(d, &ElementKind::Dilation(lambda))
}

pub fn ray_inversion(d: usize) -> GroupElement {
    GroupElement::trusted(from_light_cone(d, &ray_inversion_lc(d)))
}

/// `project(g · embed(x))`.
pub fn act(g: &GroupElement, x: &Point) -> Image {
    let d = g.dim();
    debug_assert_eq!(x.len(), d);
    let x2 = minkowski_norm(x);
    let mut xi = DVector::zeros(d + 2);
    xi.rows_mut(0, d).copy_from(x);
    xi[d] = 0.5 * (1.0 + x2);
    xi[d + 1] = 0.5 * (1.0 - x2);
    match project_vector(&(g.matrix() * xi)) {
        Projected::Point(y) => Image::Finite(y),
        Projected::AtInfinity => Image::Singular,
    }
}

/// Whether ±g lies in the identity component SO⁺(d,2), judged by the
/// orientation of the positive block (ξ₀, ξ_{d+1}) and the negative block
/// (ξ₁ … ξ_d).
pub fn in_identity_component(g: &GroupElement) -> bool {
    let d = g.dim();
    let m = g.matrix();
    let mut pos = DMatrix::zeros(2, 2);
    let idx = [0, d + 1];
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            pos[(a, b)] = m[(i, j)];
        }
    }
    let neg = m.view((1, 1), (d, d)).into_owned();
    let dp = pos.determinant();
    let dn = neg.determinant();
    let flip = if d.is_multiple_of(2) { 1.0 } else { -1.0 };
    (dp > 0.0 && dn > 0.0) || (dp > 0.0 && flip * dn > 0.0)
}

/// The one-parameter subgroup `τᵢ(−cot α) D(sin⁻² α) Rᵢ τᵢ(−cot α)`.
///
/// The product has period π in α. Near the multiples of π it is evaluated
/// as `U(α + π/2) Rᵢ⁻¹` to avoid the cancellation in `cot α`, and it is
/// the identity where `sin α` vanishes.
pub fn u_alpha(d: usize, alpha: f64, i: usize) -> Result<GroupElement> {
    check_axis(d, i)?;
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter("non-finite angle".into()));
    }
    let pi = std::f64::consts::PI;
    let a = alpha - pi * (alpha / pi).round();
    if a.sin().abs() < 1e-12 {
        return Ok(GroupElement::identity(d));
    }
    if a.sin().abs() < 0.5 {
        let shifted = u_alpha_product(d, a + 0.5 * pi, i);
        let r = make_element(d, &ElementKind::R(i))?;
        return Ok(shifted.compose(&r.inverse()));
    }
    Ok(u_alpha_product(d, a, i))
}

fn u_alpha_product(d: usize, a: f64, i: usize) -> GroupElement {
    let mut shift = vec![0.0; d];
    shift[i] = -a.cos() / a.sin();
    let tau = translation(&shift);
    let dil = dilation(d, 1.0 / (a.sin() * a.sin())).expect("positive factor");
    let r = make_element(d, &ElementKind::R(i)).expect("valid axis");
    tau.compose(&dil).compose(&r).compose(&tau)
}

/// Distance, modulo sign, between `τᵢ(a) Rᵢ τᵢ(1/a) Rᵢ τᵢ(a) Rᵢ` and `D(a²)`.
pub fn dilation_identity_defect(d: usize, a: f64, i: usize) -> Result<f64> {
    check_axis(d, i)?;
    if a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidParameter("a must be finite and nonzero".into()));
    }
    let along = |s: f64| {
        let mut v = vec![0.0; d];
        v[i] = s;
        translation(&v)
    };
    let r = make_element(d, &ElementKind::R(i))?;
    let lhs = along(a)
        .compose(&r)
        .compose(&along(1.0 / a))
        .compose(&r)
        .compose(&along(a))
        .compose(&r);
    let rhs = dilation(d, a * a)?;
    Ok(lhs.distance_mod_sign(&rhs))
}

/// Generator of time translations, `x ↦ x + s e₀`.
pub fn time_translation_generator(d: usize) -> LieGenerator {
    let mut lc = DMatrix::zeros(d + 2, d + 2);
    lc[(0, d)] = 1.0;
    lc[(d + 1, 0)] = 2.0;
    LieGenerator { m: from_light_cone(d, &lc) }
}

/// Generator of dilations, `x ↦ e^s x`.
pub fn dilation_generator(d: usize) -> LieGenerator {
    let mut lc = DMatrix::zeros(d + 2, d + 2);
    lc[(d, d)] = -1.0;
    lc[(d + 1, d + 1)] = 1.0;
    LieGenerator { m: from_light_cone(d, &lc) }
}

/// Generator of the boost along spatial axis i.
pub fn boost_generator(d: usize, axis: usize) -> Result<LieGenerator> {
    check_axis(d, axis)?;
    let mut lc = DMatrix::zeros(d + 2, d + 2);
    lc[(0, axis)] = 1.0;
    lc[(axis, 0)] = 1.0;
    Ok(LieGenerator { m: from_light_cone(d, &lc) })
}

/// `k = h + ρ h ρ⁻¹` with h the time-translation generator.
pub fn conformal_energy(d: usize) -> LieGenerator {
    let h = time_translation_generator(d);
    let rho = ray_inversion(d);
    h.add(&h.conjugate(&rho))
}

/// Group commutator `g h g⁻¹ h⁻¹`.
pub fn commutator(g: &GroupElement, h: &GroupElement) -> GroupElement {
    g.compose(h).compose(&g.inverse()).compose(&h.inverse())
}

/// Lorentz boost taking e₀ to the unit timelike vector `u`.
pub fn boost_to(u: &Point) -> Result<DMatrix<f64>> {
    let d = u.len();
    let n2 = minkowski_norm(u);
    if !(n2 > 0.0) || u[0] <= 0.0 {
        return Err(Error::InvalidParameter("target must be timelike future-directed".into()));
    }
    let u = u / n2.sqrt();
    let gamma = u[0];
    let v = u.rows(1, d - 1).into_owned();
    let mut l = DMatrix::identity(d, d);
    l[(0, 0)] = gamma;
    for i in 1..d {
        l[(0, i)] = v[i - 1];
        l[(i, 0)] = v[i - 1];
        for j in 1..d {
            l[(i, j)] += v[i - 1] * v[j - 1] / (1.0 + gamma);
        }
    }
    Ok(l)
}

/// A conformal map sending the unit double cone O₁ onto the double cone
/// with tips `past` and `future`: a dilation, a boost and a translation.
pub fn doublecone_map(past: &Point, future: &Point) -> Result<GroupElement> {
    let d = past.len();
    if future.len() != d {
        return Err(Error::Dimension { expected: d, got: future.len() });
    }
    let axis = future - past;
    let n2 = minkowski_norm(&axis);
    if !(n2 > 0.0) || axis[0] <= 0.0 {
        return Err(Error::InvalidParameter("tips must be timelike separated, future after past".into()));
    }
    let r = 0.5 * n2.sqrt();
    let centre = 0.5 * (past + future);
    let l = lorentz(&boost_to(&axis)?)?;
    Ok(translation(centre.as_slice()).compose(&l).compose(&dilation(d, r)?))
}

/// Inner product of the (d,2) form.
pub fn form_product(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let n = a.len();
    let mut s = a[0] * b[0] + a[n - 1] * b[n - 1];
    for i in 1..n - 1 {
        s -= a[i] * b[i];
    }
    s
}

/// Minkowski product re-exported for callers working with rays.
pub fn point_product(x: &Point, y: &Point) -> f64 {
    minkowski_product(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pt(v: &[f64]) -> Point {
        DVector::from_column_slice(v)
    }

    #[test]
    fn embed_origin_is_half_half() {
        let r = embed(&pt(&[0.0; 4]));
        let xi = r.xi() / (r.xi()[4] + r.xi()[5]);
        assert_eq!(xi.as_slice(), &[0.0, 0.0, 0.0, 0.0, 0.5, 0.5]);
    }

    #[test]
    fn lightlike_points_embed_symmetrically() {
        let r = embed(&pt(&[3.0, 1.0, 2.0, 2.0]));
        let s = r.xi()[4] + r.xi()[5];
        assert!((r.xi()[4] / s - 0.5).abs() < 1e-15);
        assert!((r.xi()[5] / s - 0.5).abs() < 1e-15);
    }

    #[test]
    fn point_at_infinity() {
        let xi = DVector::from_column_slice(&[0.0, 0.0, 0.0, 0.0, 1.0, -1.0]);
        let r = Ray::new(xi).unwrap();
        assert_eq!(project(&r), Projected::AtInfinity);
    }

    #[test]
    fn rejects_non_null() {
        let xi = DVector::from_column_slice(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(Ray::new(xi).is_err());
    }

    #[test]
    fn project_inverts_embed() {
        let x = pt(&[1.0, 2.0, 0.0, 0.0]);
        match project(&embed(&x)) {
            Projected::Point(y) => assert!((y - x).amax() < 1e-14),
            Projected::AtInfinity => panic!("finite point projected to infinity"),
        }
    }

    #[test]
    fn elements_preserve_form() {
        let d = 4;
        let kinds = [
            ElementKind::Translation(vec![0.3, -1.0, 2.0, 0.5]),
            ElementKind::Boost { axis: 2, rapidity: 0.7 },
            ElementKind::Rotation { i: 1, j: 3, angle: 1.1 },
            ElementKind::Dilation(2.5),
            ElementKind::Special(vec![0.1, 0.2, -0.3, 0.4]),
            ElementKind::RayInversion,
            ElementKind::R(1),
            ElementKind::P(3),
        ];
        for k in &kinds {
            let g = make_element(d, k).unwrap();
            assert!(g.form_residual() < 1e-12, "{k:?}");
        }
    }

    #[test]
    fn dilation_scales_points() {
        let g = make_element(4, &ElementKind::Dilation(2.0)).unwrap();
        let y = act(&g, &pt(&[1.0, 1.0, 0.0, 0.0])).finite().unwrap();
        assert!((y - pt(&[2.0, 2.0, 0.0, 0.0])).amax() < 1e-14);
    }

    #[test]
    fn translation_has_no_singular_set() {
        let g = make_element(3, &ElementKind::Translation(vec![1.0, -2.0, 0.5])).unwrap();
        let y = act(&g, &pt(&[0.0, 1.0, 1.0])).finite().unwrap();
        assert!((y - pt(&[1.0, -1.0, 1.5])).amax() < 1e-14);
    }

    #[test]
    fn ray_inversion_on_light_cone_is_singular() {
        let g = ray_inversion(4);
        assert!(act(&g, &pt(&[1.0, 1.0, 0.0, 0.0])).is_singular());
    }

    #[test]
    fn ray_inversion_formula() {
        let g = ray_inversion(3);
        let x = pt(&[0.5, 2.0, -1.0]);
        let y = act(&g, &x).finite().unwrap();
        let x2 = minkowski_norm(&x);
        assert!((y + &x / x2).amax() < 1e-14);
    }

    #[test]
    fn r_formula() {
        let g = make_element(3, &ElementKind::R(1)).unwrap();
        let x = pt(&[0.5, 2.0, -1.0]);
        let y = act(&g, &x).finite().unwrap();
        let x2 = minkowski_norm(&x);
        let expect = pt(&[-0.5 / x2, 2.0 / x2, 1.0 / x2]);
        assert!((y - expect).amax() < 1e-14);
    }

    #[test]
    fn invalid_parameters() {
        assert!(make_element(4, &ElementKind::Dilation(0.0)).is_err());
        assert!(make_element(4, &ElementKind::R(0)).is_err());
        assert!(make_element(4, &ElementKind::P(4)).is_err());
        assert!(dilation_identity_defect(4, 0.0, 1).is_err());
    }

    #[test]
    fn component_examples() {
        assert!(in_identity_component(&GroupElement::identity(4)));
        for d in 2..=4 {
            assert!(in_identity_component(&make_element(d, &ElementKind::R(1)).unwrap()));
        }
        assert!(in_identity_component(&make_element(3, &ElementKind::P(1)).unwrap()));
        assert!(!in_identity_component(&make_element(4, &ElementKind::P(1)).unwrap()));
    }

    #[test]
    fn u_alpha_examples() {
        for d in 2..=4 {
            let r = make_element(d, &ElementKind::R(1)).unwrap();
            assert!(u_alpha(d, PI / 2.0, 1).unwrap().distance_mod_sign(&r) < 1e-9);
            let e = GroupElement::identity(d);
            assert!(u_alpha(d, 0.0, 1).unwrap().distance_mod_sign(&e) < 1e-9);
            assert!(u_alpha(d, PI, 1).unwrap().distance_mod_sign(&e) < 1e-9);
        }
    }

    #[test]
    fn u_alpha_branches_agree() {
        // Both evaluation routes are valid where sin α is moderate.
        let d = 3;
        for &a in &[0.45, 0.55, 2.6, -0.5] {
            let direct = u_alpha_product(d, a, 2);
            let r = make_element(d, &ElementKind::R(2)).unwrap();
            let via = u_alpha_product(d, a + PI / 2.0, 2).compose(&r.inverse());
            assert!(direct.distance_mod_sign(&via) < 1e-10, "{a}");
        }
    }

    #[test]
    fn dilation_identity_examples() {
        for d in 2..=4 {
            assert!(dilation_identity_defect(d, 1.0, 1).unwrap() < 1e-9);
        }
        assert!(dilation_identity_defect(4, 3.7, 1).unwrap() < 1e-9);
        assert!(dilation_identity_defect(4, -2.0, 2).unwrap() < 1e-9);
    }

    #[test]
    fn energy_is_periodic_rotation() {
        for d in 1..=4 {
            let k = conformal_energy(d);
            let g = k.exp(2.0 * PI);
            assert!(g.distance_mod_sign(&GroupElement::identity(d)) < 1e-8);
            // Only the (ξ₀, ξ_{d+1}) plane moves.
            let g = k.exp(0.37);
            for i in 1..=d {
                for j in 0..d + 2 {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((g.matrix()[(i, j)] - e).abs() < 1e-12);
                    assert!((g.matrix()[(j, i)] - e).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn r_squares_to_identity_in_matrices() {
        // The order-4 lifts are invisible in O(d,2); R² is exactly ±I here.
        let r = make_element(4, &ElementKind::R(1)).unwrap();
        assert!(r.compose(&r).distance_mod_sign(&GroupElement::identity(4)) < 1e-15);
    }

    #[test]
    fn poincare_detection() {
        assert!(translation(&[1.0, 2.0, 3.0]).is_poincare());
        assert!(make_element(3, &ElementKind::Boost { axis: 1, rapidity: 0.3 }).unwrap().is_poincare());
        assert!(!dilation(3, 2.0).unwrap().is_poincare());
        assert!(!make_element(3, &ElementKind::Special(vec![0.1, 0.0, 0.0])).unwrap().is_poincare());
    }

    #[test]
    fn doublecone_map_sends_tips() {
        let p = pt(&[-1.0, 0.5, 0.2]);
        let f = pt(&[2.0, 1.0, -0.3]);
        let g = doublecone_map(&p, &f).unwrap();
        let lo = act(&g, &pt(&[-1.0, 0.0, 0.0])).finite().unwrap();
        let hi = act(&g, &pt(&[1.0, 0.0, 0.0])).finite().unwrap();
        assert!((lo - p).amax() < 1e-12);
        assert!((hi - f).amax() < 1e-12);
    }
}
