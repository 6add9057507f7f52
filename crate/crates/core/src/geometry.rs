//! Minkowski space ℝ^d, its causal structure and a small region calculus.
//!
//! Regions are open sets described by tags with a membership predicate.
//! Images of regions under conformal maps are kept as [`Region::Transformed`]
//! rather than re-parametrized, since they need not be double cones in the
//! chart (points may go to infinity).

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::confgroup::{act, doublecone_map, GroupElement, Image};
use crate::error::{Error, Result};

/// A point of ℝ^d; index 0 is time.
pub type Point = DVector<f64>;

/// `x₀² − x₁² − … − x_{d−1}²`.
pub fn minkowski_norm(x: &Point) -> f64 {
    minkowski_product(x, x)
}

pub fn minkowski_product(x: &Point, y: &Point) -> f64 {
    let mut s = x[0] * y[0];
    for i in 1..x.len() {
        s -= x[i] * y[i];
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalRelation {
    Spacelike,
    Lightlike,
    TimelikeFuture,
    TimelikePast,
    Equal,
}

/// Classifies `y − x`.
pub fn causal_relation(x: &Point, y: &Point) -> Result<CausalRelation> {
    if x.len() != y.len() {
        return Err(Error::Dimension { expected: x.len(), got: y.len() });
    }
    let v = y - x;
    if v.iter().all(|c| *c == 0.0) {
        return Ok(CausalRelation::Equal);
    }
    let n = minkowski_norm(&v);
    Ok(if n < 0.0 {
        CausalRelation::Spacelike
    } else if n == 0.0 {
        CausalRelation::Lightlike
    } else if v[0] > 0.0 {
        CausalRelation::TimelikeFuture
    } else {
        CausalRelation::TimelikePast
    })
}

fn timelike_future(v: &Point) -> bool {
    v[0] > 0.0 && minkowski_norm(v) > 0.0
}

/// v in the closed future cone (including 0 and future null vectors).
fn causal_future_closed(v: &Point) -> bool {
    v[0] >= 0.0 && minkowski_norm(v) >= 0.0
}

#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    DoubleCone { past: Point, future: Point },
    /// The image of W₁ = {x₁ > |x₀|} under a Poincaré transformation.
    Wedge { poincare: GroupElement },
    FutureCone { apex: Point },
    Transformed { g: GroupElement, base: Box<Region> },
    /// Points spacelike to every point of a double cone.
    CausalComplement(Box<Region>),
    /// Points timelike to every point of a double cone.
    TimelikeComplement(Box<Region>),
}

impl Region {
    pub fn double_cone(past: Point, future: Point) -> Result<Region> {
        if past.len() != future.len() {
            return Err(Error::Dimension { expected: past.len(), got: future.len() });
        }
        if !timelike_future(&(&future - &past)) {
            return Err(Error::InvalidParameter(
                "double cone tips must be timelike separated, future after past".into(),
            ));
        }
        Ok(Region::DoubleCone { past, future })
    }

    /// `|x₀| + |x⃗| < 1`.
    pub fn unit_double_cone(d: usize) -> Region {
        let mut p = Point::zeros(d);
        let mut f = Point::zeros(d);
        p[0] = -1.0;
        f[0] = 1.0;
        Region::DoubleCone { past: p, future: f }
    }

    pub fn wedge(poincare: GroupElement) -> Result<Region> {
        if !poincare.is_poincare() {
            return Err(Error::InvalidParameter("wedge transform must be a Poincaré element".into()));
        }
        Ok(Region::Wedge { poincare })
    }

    /// `x₁ > |x₀|`.
    pub fn standard_wedge(d: usize) -> Region {
        Region::Wedge { poincare: GroupElement::identity(d) }
    }

    pub fn future_cone(apex: Point) -> Region {
        Region::FutureCone { apex }
    }

    /// `x₀ > 0, x² > 0`.
    pub fn forward_light_cone(d: usize) -> Region {
        Region::FutureCone { apex: Point::zeros(d) }
    }

    pub fn transformed(g: GroupElement, base: Region) -> Region {
        Region::Transformed { g, base: Box::new(base) }
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::DoubleCone { past, .. } => past.len(),
            Region::Wedge { poincare } => poincare.dim(),
            Region::FutureCone { apex } => apex.len(),
            Region::Transformed { g, .. } => g.dim(),
            Region::CausalComplement(b) | Region::TimelikeComplement(b) => b.dim(),
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        region_contains(self, x)
    }

    /// Bounded regions can be sampled without a box.
    pub fn is_bounded(&self) -> bool {
        matches!(self, Region::DoubleCone { .. })
    }
}

pub fn region_contains(r: &Region, x: &Point) -> bool {
    match r {
        Region::DoubleCone { past, future } => {
            timelike_future(&(x - past)) && timelike_future(&(future - x))
        }
        Region::Wedge { poincare } => match act(&poincare.inverse(), x) {
            Image::Finite(y) => y[1] > y[0].abs(),
            Image::Singular => false,
        },
        Region::FutureCone { apex } => timelike_future(&(x - apex)),
        Region::Transformed { g, base } => match act(&g.inverse(), x) {
            Image::Finite(y) => region_contains(base, &y),
            Image::Singular => false,
        },
        Region::CausalComplement(base) => match base.as_ref() {
            Region::DoubleCone { past, future } => {
                !causal_future_closed(&(x - past)) && !causal_future_closed(&(future - x))
            }
            _ => false,
        },
        Region::TimelikeComplement(base) => match base.as_ref() {
            Region::DoubleCone { past, future } => {
                timelike_future(&(x - future)) || timelike_future(&(past - x))
            }
            _ => false,
        },
    }
}

fn wedge_reflection(d: usize) -> GroupElement {
    let mut l = nalgebra::DMatrix::identity(d, d);
    l[(0, 0)] = -1.0;
    l[(1, 1)] = -1.0;
    crate::confgroup::lorentz(&l).expect("reflection is Lorentz")
}

/// The open set of points spacelike to every point of `r`.
pub fn spacelike_complement(r: &Region) -> Result<Region> {
    match r {
        Region::Wedge { poincare } => Ok(Region::Wedge {
            poincare: poincare.compose(&wedge_reflection(poincare.dim())),
        }),
        Region::DoubleCone { .. } => Ok(Region::CausalComplement(Box::new(r.clone()))),
        Region::CausalComplement(base) => Ok(base.as_ref().clone()),
        other => Err(Error::UnsupportedRegion(tag_name(other).to_string())),
    }
}

/// The open set of points timelike to every point of a double cone.
pub fn timelike_complement(r: &Region) -> Result<Region> {
    match r {
        Region::DoubleCone { .. } => Ok(Region::TimelikeComplement(Box::new(r.clone()))),
        other => Err(Error::UnsupportedRegion(tag_name(other).to_string())),
    }
}

fn tag_name(r: &Region) -> &'static str {
    match r {
        Region::DoubleCone { .. } => "double cone",
        Region::Wedge { .. } => "wedge",
        Region::FutureCone { .. } => "future cone",
        Region::Transformed { .. } => "transformed region",
        Region::CausalComplement(_) => "causal complement",
        Region::TimelikeComplement(_) => "timelike complement",
    }
}

/// Attempts allowed per requested point before rejection sampling gives up.
const ATTEMPTS_PER_POINT: usize = 10_000;

/// Draws `n` points uniformly from `r`, deterministically from `seed`.
///
/// Double cones are sampled exactly (O₁ by rejection in its bounding cube,
/// then mapped affinely). Every other tag is sampled by rejection from the
/// cube `|xᵢ| ≤ half_width`, which must be supplied.
pub fn sample_region(r: &Region, n: usize, seed: u64, half_width: Option<f64>) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = r.dim();
    if let Region::DoubleCone { past, future } = r {
        let g = doublecone_map(past, future)?;
        let unit = Region::unit_double_cone(d);
        let pts = rejection(&unit, n, d, 1.0, &mut rng)?;
        return Ok(pts
            .into_iter()
            .map(|x| act(&g, &x).finite().expect("affine map has no singular set"))
            .collect());
    }
    let b = half_width.ok_or(Error::UnboundedRegion)?;
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::InvalidParameter(format!("box half-width {b} must be positive")));
    }
    rejection(r, n, d, b, &mut rng)
}

fn rejection(r: &Region, n: usize, d: usize, b: f64, rng: &mut ChaCha8Rng) -> Result<Vec<Point>> {
    let limit = n.saturating_mul(ATTEMPTS_PER_POINT);
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0;
    while out.len() < n {
        if attempts >= limit {
            return Err(Error::SamplingExhausted { attempts, accepted: out.len() });
        }
        attempts += 1;
        let x = Point::from_fn(d, |_, _| rng.random_range(-b..b));
        if region_contains(r, &x) {
            out.push(x);
        }
    }
    Ok(out)
}

/// Uniform points of the cube `|xᵢ| ≤ half_width`, seeded.
pub fn sample_box(d: usize, n: usize, seed: u64, half_width: f64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Point::from_fn(d, |_, _| rng.random_range(-half_width..half_width)))
        .collect()
}
