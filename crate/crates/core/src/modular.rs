//! Tomita–Takesaki calculus for standard real subspaces of ℂ^m.
//!
//! A real subspace K ⊂ ℂ^m is standard when K ∩ iK = 0 and K + iK = ℂ^m.
//! Its Tomita operator `S(ξ + iη) = ξ − iη` (ξ, η ∈ K) is antilinear with
//! polar decomposition `S = J Δ^{1/2}`. Second quantization carries these
//! objects to a von Neumann algebra with the same modular data, so
//! identities checked here are the one-particle image of the algebraic
//! statements.
//!
//! Conventions: `⟨u, v⟩ = u†v` (antilinear in the first slot). Real
//! subspaces are handled through the encoding `v ↦ [Re v; Im v] ∈ ℝ^{2m}`,
//! under which multiplication by i is `(a, b) ↦ (−b, a)`. Antilinear
//! operators are stored as `v ↦ M·conj(v)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tolerances::{ANGLE_FLOOR, RANK_CUTOFF};

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

/// `[Re; Im]` columnwise.
pub fn real_encode(m: &CMatrix) -> DMatrix<f64> {
    let (r, c) = m.shape();
    DMatrix::from_fn(2 * r, c, |i, j| if i < r { m[(i, j)].re } else { m[(i - r, j)].im })
}

pub fn real_encode_vector(v: &CVector) -> DVector<f64> {
    let r = v.len();
    DVector::from_fn(2 * r, |i, _| if i < r { v[i].re } else { v[i - r].im })
}

/// Inverse of [`real_encode`].
pub fn complex_decode(a: &DMatrix<f64>) -> CMatrix {
    let r = a.nrows() / 2;
    CMatrix::from_fn(r, a.ncols(), |i, j| Complex64::new(a[(i, j)], a[(i + r, j)]))
}

/// Multiplication by i in the real encoding.
pub fn times_i(a: &DMatrix<f64>) -> DMatrix<f64> {
    let r = a.nrows() / 2;
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| if i < r { -a[(i + r, j)] } else { a[(i - r, j)] })
}

/// Orthonormal basis of the column span, rank decided by a relative
/// singular-value cutoff.
pub fn orthonormal_span(a: &DMatrix<f64>) -> DMatrix<f64> {
    if a.ncols() == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    if !(smax > 0.0) {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > RANK_CUTOFF * smax)
        .collect();
    DMatrix::from_fn(a.nrows(), keep.len(), |i, j| u[(i, keep[j])])
}

/// Orthonormal basis of the orthogonal complement of an orthonormal set.
pub fn orthogonal_complement(q: &DMatrix<f64>) -> DMatrix<f64> {
    let n = q.nrows();
    let k = q.ncols();
    let p = DMatrix::identity(n, n) - q * q.transpose();
    pick_eigenvectors(p, n - k, true)
}

/// Eigenvectors of a symmetric matrix for its `count` largest (or smallest)
/// eigenvalues.
fn pick_eigenvectors(a: DMatrix<f64>, count: usize, largest: bool) -> DMatrix<f64> {
    let n = a.nrows();
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    if largest {
        order.reverse();
    }
    DMatrix::from_fn(n, count, |i, j| eig.eigenvectors[(i, order[j])])
}

/// Principal angles between two real spans, ascending; as many angles as
/// the smaller dimension.
///
/// Small angles come from sines and large ones from cosines so that both
/// ends of the range keep full relative accuracy.
pub fn principal_angles(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    let qa = orthonormal_span(a);
    let qb = orthonormal_span(b);
    let (qa, qb) = if qa.ncols() <= qb.ncols() { (qa, qb) } else { (qb, qa) };
    let p = qa.ncols();
    if p == 0 {
        return Vec::new();
    }
    let residual = &qa - &qb * (qb.transpose() * &qa);
    let mut sines: Vec<f64> = residual.singular_values().iter().map(|s| s.min(1.0)).collect();
    let mut cosines: Vec<f64> = (qb.transpose() * &qa).singular_values().iter().map(|c| c.min(1.0)).collect();
    sines.sort_by(f64::total_cmp);
    cosines.sort_by(|x, y| y.total_cmp(x));
    sines.resize(p, 1.0);
    cosines.resize(p, 0.0);
    (0..p)
        .map(|i| {
            if sines[i] < std::f64::consts::FRAC_1_SQRT_2 {
                sines[i].asin()
            } else {
                cosines[i].acos()
            }
        })
        .collect()
}

/// Largest principal angle between two real spans, in radians.
pub fn subspace_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    principal_angles(a, b).into_iter().fold(0.0, f64::max)
}

/// Principal-angle spectrum between K and iK together with dimensions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub angles: Vec<f64>,
    pub real_dim: usize,
    pub ambient_dim: usize,
    pub floor: f64,
}

impl ConditionReport {
    pub fn min_angle(&self) -> f64 {
        self.angles.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// K ∩ iK = 0 within the floor.
    pub fn separating(&self) -> bool {
        self.real_dim <= self.ambient_dim && self.min_angle() > self.floor
    }

    /// K + iK spans the ambient space.
    pub fn cyclic(&self) -> bool {
        let collapsed = self.angles.iter().filter(|a| **a <= self.floor).count();
        2 * self.real_dim - collapsed.min(2 * self.real_dim) >= 2 * self.ambient_dim
    }

    pub fn standard(&self) -> bool {
        self.real_dim == self.ambient_dim && self.separating()
    }
}

fn condition_of(q: &DMatrix<f64>, m: usize, floor: f64) -> ConditionReport {
    let angles = if q.ncols() == 0 { Vec::new() } else { principal_angles(q, &times_i(q)) };
    ConditionReport { angles, real_dim: q.ncols(), ambient_dim: m, floor }
}

fn generator_matrix(m: usize, generators: &[CVector]) -> Result<DMatrix<f64>> {
    if m == 0 || generators.is_empty() {
        return Err(Error::InvalidParameter("need ambient dimension ≥ 1 and at least one generator".into()));
    }
    let mut a = DMatrix::zeros(2 * m, generators.len());
    for (j, g) in generators.iter().enumerate() {
        if g.len() != m {
            return Err(Error::Dimension { expected: m, got: g.len() });
        }
        if g.iter().all(|z| z.norm() == 0.0) {
            return Err(Error::ZeroGenerator(j));
        }
        a.set_column(j, &real_encode_vector(g));
    }
    Ok(a)
}

/// Checks standardness of the real span of `generators` in ℂ^m.
pub fn is_standard(m: usize, generators: &[CVector]) -> Result<(bool, ConditionReport)> {
    is_standard_with_floor(m, generators, ANGLE_FLOOR)
}

pub fn is_standard_with_floor(m: usize, generators: &[CVector], floor: f64) -> Result<(bool, ConditionReport)> {
    let a = generator_matrix(m, generators)?;
    let q = orthonormal_span(&a);
    let report = condition_of(&q, m, floor);
    Ok((report.standard(), report))
}

/// A standard real subspace with an orthonormal real basis (2m × m).
#[derive(Debug, Clone)]
pub struct StandardSubspace {
    ambient_dim: usize,
    generators: Vec<CVector>,
    basis: DMatrix<f64>,
    report: ConditionReport,
}

impl StandardSubspace {
    pub fn new(generators: Vec<CVector>) -> Result<Self> {
        Self::with_floor(generators, ANGLE_FLOOR)
    }

    pub fn with_floor(generators: Vec<CVector>, floor: f64) -> Result<Self> {
        let m = generators.first().map(|g| g.len()).unwrap_or(0);
        let a = generator_matrix(m, &generators)?;
        let basis = orthonormal_span(&a);
        let report = condition_of(&basis, m, floor);
        if !report.standard() {
            return Err(Error::NotStandard(report));
        }
        Ok(StandardSubspace { ambient_dim: m, generators, basis, report })
    }

    /// From a real-encoded spanning set (2m rows).
    pub fn from_real_span(span: &DMatrix<f64>, floor: f64) -> Result<Self> {
        let c = complex_decode(span);
        let generators = (0..c.ncols()).map(|j| c.column(j).into_owned()).collect();
        Self::with_floor(generators, floor)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn generators(&self) -> &[CVector] {
        &self.generators
    }

    /// Orthonormal real basis, 2m × m.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// The same basis as m complex column vectors.
    pub fn complex_basis(&self) -> CMatrix {
        complex_decode(&self.basis)
    }

    pub fn condition(&self) -> &ConditionReport {
        &self.report
    }
}

/// `v ↦ M·conj(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Antilinear {
    m: CMatrix,
}

impl Antilinear {
    pub fn new(m: CMatrix) -> Self {
        Antilinear { m }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.m * v.conjugate()
    }

    pub fn apply_matrix(&self, v: &CMatrix) -> CMatrix {
        &self.m * v.conjugate()
    }

    /// The antilinear adjoint, defined by `⟨A x, y⟩ = conj⟨x, A* y⟩`.
    pub fn adjoint(&self) -> Antilinear {
        Antilinear { m: self.m.transpose() }
    }

    /// `self ∘ other`, a linear map.
    pub fn then_after(&self, other: &Antilinear) -> CMatrix {
        &self.m * other.m.conjugate()
    }

    /// `self ∘ L`.
    pub fn after_linear(&self, l: &CMatrix) -> Antilinear {
        Antilinear { m: &self.m * l.conjugate() }
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// S, Δ and J of a standard subspace, with the spectral data of Δ.
#[derive(Debug, Clone)]
pub struct ModularData {
    pub s: Antilinear,
    pub j: Antilinear,
    pub delta: CMatrix,
    eigenvalues: DVector<f64>,
    eigenvectors: CMatrix,
}

impl ModularData {
    /// Eigenvalues of Δ.
    pub fn spectrum(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// `Δ^r` for real r.
    pub fn delta_power(&self, r: f64) -> CMatrix {
        let v = &self.eigenvectors;
        let d = CVector::from_iterator(self.eigenvalues.len(), self.eigenvalues.iter().map(|l| Complex64::new(l.powf(r), 0.0)));
        v * CMatrix::from_diagonal(&d) * v.adjoint()
    }

    /// `Δ^{it}`.
    pub fn delta_it(&self, t: f64) -> CMatrix {
        let v = &self.eigenvectors;
        let d = CVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|l| Complex64::from_polar(1.0, t * l.ln())),
        );
        v * CMatrix::from_diagonal(&d) * v.adjoint()
    }

    pub fn dim(&self) -> usize {
        self.delta.nrows()
    }

    /// `‖S² − I‖_max`.
    pub fn s_squared_residual(&self) -> f64 {
        let n = self.dim();
        max_abs(&(self.s.then_after(&self.s) - CMatrix::identity(n, n)))
    }

    /// `‖J² − I‖_max`.
    pub fn j_squared_residual(&self) -> f64 {
        let n = self.dim();
        max_abs(&(self.j.then_after(&self.j) - CMatrix::identity(n, n)))
    }

    /// `‖JΔJ − Δ⁻¹‖ / ‖Δ⁻¹‖` in max norm.
    pub fn j_delta_j_residual(&self) -> f64 {
        let jdj = self.j.after_linear(&self.delta).then_after(&self.j);
        let inv = self.delta_power(-1.0);
        max_abs(&(jdj - &inv)) / max_abs(&inv)
    }

    /// `‖S − JΔ^{1/2}‖ / ‖S‖` in max norm.
    pub fn polar_residual(&self) -> f64 {
        let jd = self.j.after_linear(&self.delta_power(0.5));
        max_abs(&(self.s.matrix() - jd.matrix())) / max_abs(self.s.matrix())
    }

    /// Largest relative violation of `⟨Δ^{1/2}ξ, Δ^{1/2}η⟩ = ⟨Sη, Sξ⟩` over
    /// the columns of `vectors`.
    pub fn kms_residual(&self, vectors: &CMatrix) -> f64 {
        let half = self.delta_power(0.5);
        let dv = &half * vectors;
        let sv = self.s.apply_matrix(vectors);
        let mut worst: f64 = 0.0;
        for a in 0..vectors.ncols() {
            for b in 0..vectors.ncols() {
                let lhs = dv.column(a).dotc(&dv.column(b));
                let rhs = sv.column(b).dotc(&sv.column(a));
                let scale = dv.column(a).norm() * dv.column(b).norm();
                worst = worst.max((lhs - rhs).norm() / scale.max(f64::MIN_POSITIVE));
            }
        }
        worst
    }
}

/// Builds S from `S(Bc) = B conj(c)` and splits it by polar decomposition.
pub fn tomita_operators(k: &StandardSubspace) -> Result<ModularData> {
    if !k.condition().standard() {
        return Err(Error::NotStandard(k.condition().clone()));
    }
    let b = k.complex_basis();
    // M = B conj(B)⁻¹, solved as conj(B)ᵀ Mᵀ = Bᵀ.
    let lu = b.conjugate().transpose().lu();
    let mt = lu
        .solve(&b.transpose())
        .ok_or_else(|| Error::Singular("basis of K is not a complex basis".into()))?;
    let m = mt.transpose();
    modular_from_s(m)
}

/// Modular data from the matrix of an antilinear involution `S = M∘conj`.
pub fn modular_from_s(m: CMatrix) -> Result<ModularData> {
    let n = m.nrows();
    // Δ = S*S = Mᵀ conj(M) = conj(M)† conj(M); the SVD of conj(M) gives Δ
    // without squaring the condition number.
    let svd = m.conjugate().svd(false, true);
    let v = svd.v_t.expect("requested Vᵀ").adjoint();
    let sigma = svd.singular_values;
    if sigma.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::Singular("Tomita operator is not invertible".into()));
    }
    let lambda = sigma.map(|s| s * s);
    let diag = |f: &dyn Fn(f64) -> f64| {
        CMatrix::from_diagonal(&CVector::from_iterator(n, sigma.iter().map(|s| Complex64::new(f(*s), 0.0))))
    };
    let delta = &v * diag(&|s| s * s) * v.adjoint();
    let inv_root = &v * diag(&|s| 1.0 / s) * v.adjoint();
    let j = Antilinear::new(&m * inv_root.conjugate());
    Ok(ModularData { s: Antilinear::new(m), j, delta, eigenvalues: lambda, eigenvectors: v })
}

/// `Δ^{it}`.
pub fn modular_flow(md: &ModularData, t: f64) -> CMatrix {
    md.delta_it(t)
}

/// Orthonormal basis of `{v : Im⟨v, k⟩ = 0 for all k}` for an arbitrary real
/// span, computed as the kernel of the pairing matrix.
pub fn symplectic_complement_basis(span: &DMatrix<f64>) -> DMatrix<f64> {
    let q = orthonormal_span(span);
    let n = q.nrows();
    // Im⟨v, k⟩ = Re(v)·Im(k) − Im(v)·Re(k): one row (Im k, −Re k) per k.
    let mut pairing = DMatrix::zeros(q.ncols(), n);
    let h = n / 2;
    for j in 0..q.ncols() {
        for i in 0..h {
            pairing[(j, i)] = q[(i + h, j)];
            pairing[(j, i + h)] = -q[(i, j)];
        }
    }
    let gram = pairing.transpose() * &pairing;
    pick_eigenvectors(gram, n - q.ncols(), false)
}

/// K′, the symplectic complement of a standard subspace.
pub fn symplectic_complement(k: &StandardSubspace) -> Result<StandardSubspace> {
    let basis = symplectic_complement_basis(k.basis());
    StandardSubspace::from_real_span(&basis, k.condition().floor)
}

/// Random standard subspace of ℂ^m with Gaussian generators, rejecting
/// draws that violate the angle floor.
pub fn random_standard<R: Rng>(m: usize, rng: &mut R) -> StandardSubspace {
    loop {
        let gens: Vec<CVector> = (0..m)
            .map(|_| {
                CVector::from_fn(m, |_, _| {
                    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                })
            })
            .collect();
        if let Ok(k) = StandardSubspace::new(gens) {
            return k;
        }
    }
}
