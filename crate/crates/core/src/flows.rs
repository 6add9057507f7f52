//! Canonical one-parameter conformal groups of the wedge W₁, the unit double
//! cone O₁ and the forward light cone V₊, each as a closed-form point map and
//! as a Lie algebra generator, plus conjugation to other regions.
//!
//! All three use the normalization in which the wedge flow is the boost of
//! rapidity −2πt along x₁.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::confgroup::{
    act, boost_generator, dilation, dilation_generator, lorentz, make_element, ray_inversion,
    time_translation_generator, translation, ElementKind, GroupElement, Image, LieGenerator,
};
use crate::error::{Error, Result};
use crate::geometry::{Point, Region};

/// How a flow acts on points.
#[derive(Debug, Clone, PartialEq)]
pub enum FlowMap {
    /// `(x₀, x₁) ↦ (cosh 2πt·x₀ − sinh 2πt·x₁, −sinh 2πt·x₀ + cosh 2πt·x₁)`.
    Wedge,
    /// Fractional map on the radial light-cone coordinates `x₀ ± |x⃗|`.
    DoubleCone,
    /// `x ↦ eᵗx`.
    Dilation,
    /// `g ∘ inner ∘ g⁻¹`.
    Conjugated { g: GroupElement, inner: Box<FlowMap> },
}

#[derive(Debug, Clone)]
pub struct CanonicalFlow {
    pub region: Region,
    pub generator: LieGenerator,
    pub map: FlowMap,
}

impl CanonicalFlow {
    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    /// Closed-form image of `x` at time `t`.
    pub fn apply(&self, t: f64, x: &Point) -> Image {
        apply_map(&self.map, t, x)
    }

    /// `exp(t·generator)`.
    pub fn element(&self, t: f64) -> GroupElement {
        self.generator.exp(t)
    }

    /// Closed-form images of `x` at each time in `ts`.
    pub fn trajectory(&self, x: &Point, ts: &[f64]) -> Vec<(f64, Image)> {
        ts.iter().map(|&t| (t, self.apply(t, x))).collect()
    }
}

fn apply_map(map: &FlowMap, t: f64, x: &Point) -> Image {
    match map {
        FlowMap::Wedge => {
            let (c, s) = ((2.0 * PI * t).cosh(), (2.0 * PI * t).sinh());
            let mut y = x.clone();
            y[0] = c * x[0] - s * x[1];
            y[1] = -s * x[0] + c * x[1];
            Image::Finite(y)
        }
        FlowMap::DoubleCone => doublecone_point(t, x),
        FlowMap::Dilation => Image::Finite(x * t.exp()),
        FlowMap::Conjugated { g, inner } => match act(&g.inverse(), x) {
            Image::Finite(y) => match apply_map(inner, t, &y) {
                Image::Finite(z) => act(g, &z),
                Image::Singular => Image::Singular,
            },
            Image::Singular => Image::Singular,
        },
    }
}

/// `s ↦ ((1+s) − E(1−s)) / ((1+s) + E(1−s))`, fixing ±1.
fn fractional(s: f64, e: f64) -> Option<f64> {
    let num = (1.0 + s) - e * (1.0 - s);
    let den = (1.0 + s) + e * (1.0 - s);
    let scale = (1.0 + s).abs() + (e * (1.0 - s)).abs();
    if den.abs() <= 1e-14 * scale {
        None
    } else {
        Some(num / den)
    }
}

/// Closed form of the double-cone flow with `E = e^{2πt}`. Rotation
/// invariance reduces it to the plane spanned by e₀ and x⃗/|x⃗|.
pub fn doublecone_point(t: f64, x: &Point) -> Image {
    let d = x.len();
    let e = (2.0 * PI * t).exp();
    let r = x.rows(1, d - 1).norm();
    let (Some(plus), Some(minus)) = (fractional(x[0] + r, e), fractional(x[0] - r, e)) else {
        return Image::Singular;
    };
    let mut y = Point::zeros(d);
    y[0] = 0.5 * (plus + minus);
    if r > 0.0 {
        let s = 0.5 * (plus - minus);
        for i in 1..d {
            y[i] = s * x[i] / r;
        }
    }
    Image::Finite(y)
}

fn require_spatial(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidParameter("this flow needs d ≥ 2".into()));
    }
    Ok(())
}

pub fn wedge_flow(d: usize) -> Result<CanonicalFlow> {
    require_spatial(d)?;
    Ok(CanonicalFlow {
        region: Region::standard_wedge(d),
        generator: boost_generator(d, 1)?.scale(-2.0 * PI),
        map: FlowMap::Wedge,
    })
}

/// Double-cone flow with generator `π(ρhρ − h)`, h the time-translation
/// generator and ρ the ray inversion.
pub fn doublecone_flow(d: usize) -> Result<CanonicalFlow> {
    require_spatial(d)?;
    let h = time_translation_generator(d);
    let k = h.conjugate(&ray_inversion(d));
    Ok(CanonicalFlow {
        region: Region::unit_double_cone(d),
        generator: k.add(&h.scale(-1.0)).scale(PI),
        map: FlowMap::DoubleCone,
    })
}

pub fn cone_flow(d: usize) -> CanonicalFlow {
    CanonicalFlow {
        region: Region::forward_light_cone(d),
        generator: dilation_generator(d),
        map: FlowMap::Dilation,
    }
}

/// The flow of `g·region`: `g Λ_t g⁻¹`.
pub fn conjugate_flow(g: &GroupElement, f: &CanonicalFlow) -> CanonicalFlow {
    CanonicalFlow {
        region: Region::transformed(g.clone(), f.region.clone()),
        generator: f.generator.conjugate(g),
        map: FlowMap::Conjugated { g: g.clone(), inner: Box::new(f.map.clone()) },
    }
}

/// `τ₁(1) D(2) R₁ τ₁(1)`, an identity-component element with g(W₁) = O₁.
pub fn wedge_to_doublecone(d: usize) -> Result<GroupElement> {
    require_spatial(d)?;
    let mut e1 = vec![0.0; d];
    e1[1] = 1.0;
    let tau = translation(&e1);
    let r1 = make_element(d, &ElementKind::R(1))?;
    Ok(tau.compose(&dilation(d, 2.0)?).compose(&r1).compose(&tau))
}

/// Total inversion β, the edge reflection r₁ and the sign flip S_{W₁}.
#[derive(Debug, Clone)]
pub struct PctIngredients {
    /// β as a matrix, provided for even d only.
    pub beta: Option<GroupElement>,
    /// `(x₀, x₁) ↦ (−x₀, −x₁)`.
    pub r1: GroupElement,
    /// Sign flip of x₂ … x_{d−1}.
    pub s_w1: GroupElement,
}

/// `x ↦ −x`.
pub fn beta_map(x: &Point) -> Point {
    -x
}

pub fn pct_ingredients(d: usize) -> Result<PctIngredients> {
    require_spatial(d)?;
    let mut r = DMatrix::identity(d, d);
    r[(0, 0)] = -1.0;
    r[(1, 1)] = -1.0;
    let mut s = DMatrix::identity(d, d);
    for i in 2..d {
        s[(i, i)] = -1.0;
    }
    let beta = if d.is_multiple_of(2) { Some(lorentz(&(-DMatrix::identity(d, d)))?) } else { None };
    Ok(PctIngredients { beta, r1: lorentz(&r)?, s_w1: lorentz(&s)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::confgroup::in_identity_component;
    use crate::geometry::{sample_region, spacelike_complement};

    fn pt(v: &[f64]) -> Point {
        Point::from_column_slice(v)
    }

    #[test]
    fn wedge_flow_examples() {
        let w = wedge_flow(4).unwrap();
        let x = pt(&[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(w.apply(0.0, &x).finite().unwrap(), x);
        let y = w.apply(1.0, &x).finite().unwrap();
        let expect = pt(&[-(2.0 * PI).sinh(), (2.0 * PI).cosh(), 0.0, 0.0]);
        assert!(((y - &expect).amax() / expect.amax()) < 1e-14);
        assert!(wedge_flow(1).is_err());
    }

    #[test]
    fn doublecone_fixed_points_and_identity() {
        let f = doublecone_flow(2).unwrap();
        let x = pt(&[0.2, -0.3]);
        assert!((f.apply(0.0, &x).finite().unwrap() - &x).amax() < 1e-15);
        // x₊ = 1 and x₋ = −1 are the tips' light rays.
        for &t in &[-1.0, 0.3, 2.0] {
            let y = f.apply(t, &pt(&[1.0, 0.0])).finite().unwrap();
            assert!((y - pt(&[1.0, 0.0])).amax() < 1e-12);
            let y = f.apply(t, &pt(&[0.0, 1.0])).finite().unwrap();
            assert!((y - pt(&[0.0, 1.0])).amax() < 1e-12);
        }
    }

    #[test]
    fn cone_flow_example() {
        let c = cone_flow(4);
        let y = c.apply(2f64.ln(), &pt(&[1.0, 0.0, 0.0, 0.0])).finite().unwrap();
        assert!((y - pt(&[2.0, 0.0, 0.0, 0.0])).amax() < 1e-15);
    }

    #[test]
    fn conjugating_element_maps_wedge_into_cone() {
        for d in 2..=4 {
            let g = wedge_to_doublecone(d).unwrap();
            assert!(in_identity_component(&g));
            let o = Region::unit_double_cone(d);
            let pts = sample_region(&Region::standard_wedge(d), 500, 11, Some(5.0)).unwrap();
            for x in pts {
                let y = act(&g, &x).finite().unwrap();
                assert!(o.contains(&y), "{x}");
            }
        }
    }

    #[test]
    fn translated_cone_flow_fixes_apex() {
        let a = [1.0, -0.5, 2.0];
        let g = translation(&a);
        let f = conjugate_flow(&g, &cone_flow(3));
        let apex = pt(&a);
        assert!((f.apply(0.7, &apex).finite().unwrap() - &apex).amax() < 1e-12);
        let shifted = Region::future_cone(apex.clone());
        for x in sample_region(&shifted, 200, 3, Some(6.0)).unwrap() {
            assert!(f.region.contains(&x));
            assert!(shifted.contains(&f.apply(-0.4, &x).finite().unwrap()));
        }
    }

    #[test]
    fn identity_conjugation_is_trivial() {
        let w = wedge_flow(3).unwrap();
        let f = conjugate_flow(&GroupElement::identity(3), &w);
        let x = pt(&[0.1, 0.9, -0.2]);
        let a = f.apply(0.3, &x).finite().unwrap();
        let b = w.apply(0.3, &x).finite().unwrap();
        assert!((a - b).amax() < 1e-13);
        assert!((f.generator.matrix() - w.generator.matrix()).amax() < 1e-13);
    }

    #[test]
    fn pct_examples() {
        for d in 2..=5 {
            let p = pct_ingredients(d).unwrap();
            assert_eq!(p.beta.is_some(), d % 2 == 0);
            let x = Point::from_fn(d, |i, _| 0.3 * i as f64 - 0.4);
            assert_eq!(beta_map(&beta_map(&x)), x);
            let via = act(&p.r1, &act(&p.s_w1, &x).finite().unwrap()).finite().unwrap();
            assert!((via - beta_map(&x)).amax() < 1e-14);
            let w = Region::standard_wedge(d);
            let wp = spacelike_complement(&w).unwrap();
            for y in sample_region(&w, 300, 5, Some(4.0)).unwrap() {
                assert!(wp.contains(&act(&p.r1, &y).finite().unwrap()));
                assert!(w.contains(&act(&p.s_w1, &y).finite().unwrap()));
            }
        }
        assert!(pct_ingredients(1).is_err());
    }
}
