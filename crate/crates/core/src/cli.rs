//! Batch driver behind the `confmod` binary: suite configuration, check
//! records, JSON reports and CSV export.
//!
//! Randomness comes only from the configured seed. Each suite draws from its
//! own `ChaCha8Rng` seeded with `seed ^ fnv1a(suite name)`, so adding or
//! removing one suite never shifts another suite's stream.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chiral::{
    duality_defect, energy_trace, energy_trace_closed_form, energy_trace_limit, energy_trace_tail_bound,
    flow_group_law_residual, ladder,
    Calibration, IntervalOnCircle, LadderRow, LatticeModel, STANDARD_FAMILY,
};
use crate::confgroup::{
    act, conformal_energy, dilation_identity_defect, in_identity_component, make_element, sign_distance, u_alpha,
    ElementKind, GroupElement, Image,
};
use crate::error::{Error, Result};
use crate::flows::{cone_flow, conjugate_flow, doublecone_flow, wedge_flow, wedge_to_doublecone, CanonicalFlow};
use crate::geometry::{sample_region, Point};
use crate::modular::{
    random_standard, real_encode, subspace_angle, symplectic_complement_basis, tomita_operators, CMatrix,
};
use crate::tolerances::{
    Tolerances, ENERGY_TRACE, FLOW_POINTWISE, LATTICE_FLOW_GROUP_LAW, LATTICE_SYMMETRY, S_FIXES_K,
};

/// Frozen chiral calibration shipped with the crate.
pub const CALIBRATION_JSON: &str = include_str!("../fixtures/chiral_calibration.json");

pub fn calibration() -> Result<Calibration> {
    Ok(serde_json::from_str(CALIBRATION_JSON)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Group,
    Flows,
    Modular,
    Bw,
    Duality,
    Pct,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = ["group", "flows", "modular", "bw", "duality", "pct", "all"];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Group => "group",
            Suite::Flows => "flows",
            Suite::Modular => "modular",
            Suite::Bw => "bw",
            Suite::Duality => "duality",
            Suite::Pct => "pct",
            Suite::All => "all",
        }
    }

    /// Concrete suites in report order.
    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Group, Suite::Flows, Suite::Modular, Suite::Bw, Suite::Duality, Suite::Pct],
            s => vec![s],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Ok(match s {
            "group" => Suite::Group,
            "flows" => Suite::Flows,
            "modular" => Suite::Modular,
            "bw" => Suite::Bw,
            "duality" => Suite::Duality,
            "pct" => Suite::Pct,
            "all" => Suite::All,
            other => {
                return Err(Error::Config(format!("unknown suite {other:?}; expected one of {}", Suite::NAMES.join(", "))))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub dims: Vec<usize>,
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suite: Suite::All,
            dims: vec![2, 3, 4],
            seed: 42,
            sizes: vec![64, 128, 256],
            tolerances: Tolerances::default(),
            out: None,
            csv: None,
        }
    }
}

fn check_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() && !p.is_dir() => {
            Err(Error::Config(format!("directory of {} does not exist", path.display())))
        }
        _ => Ok(()),
    }
}

impl SuiteConfig {
    /// Applies `name=value` overrides.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let o = o.as_ref();
            let (name, value) =
                o.split_once('=').ok_or_else(|| Error::Config(format!("tolerance override {o:?} is not name=value")))?;
            let value: f64 =
                value.trim().parse().map_err(|_| Error::Config(format!("tolerance {name} has a non-numeric value")))?;
            if !(value.is_finite() && value >= f64::EPSILON) {
                return Err(Error::Config(format!("tolerance {name} = {value} is below machine epsilon")));
            }
            if !self.tolerances.set(name.trim(), value) {
                return Err(Error::Config(format!(
                    "unknown tolerance {name:?}; expected one of {}",
                    Tolerances::NAMES.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::Config("dimension list is empty".into()));
        }
        if let Some(d) = self.dims.iter().find(|d| !(2..=6).contains(*d)) {
            return Err(Error::Config(format!("dimension {d} outside 2..=6")));
        }
        if self.sizes.is_empty() {
            return Err(Error::Config("lattice ladder is empty".into()));
        }
        if let Some(l) = self.sizes.iter().find(|l| **l < 16 || !l.is_power_of_two()) {
            return Err(Error::Config(format!("lattice size {l} is not a power of two ≥ 16")));
        }
        for (name, v) in Tolerances::NAMES.iter().zip(tolerance_values(&self.tolerances)) {
            if !(v.is_finite() && v >= f64::EPSILON) {
                return Err(Error::Config(format!("tolerance {name} = {v} is below machine epsilon")));
            }
        }
        for p in self.out.iter().chain(self.csv.iter()) {
            check_parent(p)?;
        }
        Ok(())
    }
}

fn tolerance_values(t: &Tolerances) -> [f64; 8] {
    [
        t.group_identity,
        t.energy_period,
        t.flow_matrix,
        t.flow_group_law,
        t.modular_identity,
        t.modular_angle,
        t.angle_floor,
        t.ceiling_slack,
    ]
}

/// 64-bit FNV-1a.
pub fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

pub fn suite_rng(seed: u64, suite: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(suite))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub suite: String,
    pub name: String,
    pub anchor: String,
    pub status: Status,
    pub measured: Option<f64>,
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub config: SuiteConfig,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
    pub wall_clock_seconds: f64,
}

impl Report {
    pub fn failed(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

struct Recorder {
    suite: &'static str,
    records: Vec<CheckRecord>,
}

impl Recorder {
    fn new(suite: Suite) -> Self {
        Recorder { suite: suite.name(), records: Vec::new() }
    }

    /// Passes when `measured ≤ threshold`.
    fn at_most(&mut self, name: impl Into<String>, anchor: &str, measured: f64, threshold: f64) {
        let status = if measured <= threshold { Status::Pass } else { Status::Fail };
        self.push(name, anchor, status, Some(measured), Some(threshold));
    }

    fn holds(&mut self, name: impl Into<String>, anchor: &str, ok: bool) {
        self.push(name, anchor, if ok { Status::Pass } else { Status::Fail }, None, None);
    }

    fn skip(&mut self, name: impl Into<String>, anchor: &str) {
        self.push(name, anchor, Status::Skip, None, None);
    }

    fn push(&mut self, name: impl Into<String>, anchor: &str, status: Status, measured: Option<f64>, threshold: Option<f64>) {
        self.records.push(CheckRecord {
            suite: self.suite.into(),
            name: name.into(),
            anchor: anchor.into(),
            status,
            measured,
            threshold,
        });
    }

    fn error(&mut self, name: impl Into<String>, anchor: &str, e: &Error) {
        let name = format!("{}: {e}", name.into());
        self.push(name, anchor, Status::Fail, None, None);
    }
}

const A_DILATION: &str = "dilation as a product of translations and the inversion R_i";
const A_U_ALPHA: &str = "one-parameter group u(α) through the inversion R_i";
const A_ENERGY: &str = "conformal energy generates a 2π-periodic flow";
const A_COMPONENT: &str = "membership in the identity component of the conformal group";
const A_COHERENCE: &str = "wedge flow conjugated onto the double cone";
const A_GROUP_LAW: &str = "one-parameter group law of a region flow";
const A_REGION: &str = "region flows preserve their region";
const A_CLOSED_FORM: &str = "closed-form flow equals the exponential of its generator";
const A_TOMITA: &str = "Tomita operator S = JΔ^{1/2} of a standard subspace";
const A_MODULAR_K: &str = "modular group and S leave K invariant";
const A_DUALITY_K: &str = "modular conjugation maps K onto its symplectic complement";
const A_KMS: &str = "KMS symmetry of the modular operator";
const A_BW: &str = "modular group of an interval equals its geometric Möbius flow";
const A_Z: &str = "z(t) = Δ^{it}U(−t) is a trivial one-parameter group";
const A_LATTICE_FLOW: &str = "lattice Möbius flow is a one-parameter group";
const A_MODULAR_LATTICE: &str = "modular identities of interval subspaces";
const A_ENERGY_TRACE: &str = "e^{−βK} is trace class with spectrum of K equal to ℕ";
const A_DUALITY: &str = "duality for interval subspaces on the circle";
const A_ROTATION: &str = "rotation covariance of the lattice net";
const A_PCT: &str = "modular conjugation acts as the reflection fixing the interval endpoints";

fn group_suite(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Vec<CheckRecord> {
    let mut rec = Recorder::new(Suite::Group);
    let tol = cfg.tolerances.group_identity;
    for &d in &cfg.dims {
        let mut worst_dil: f64 = 0.0;
        let mut worst_u: f64 = 0.0;
        let mut failure = None;
        for _ in 0..100 {
            let axis = rng.random_range(1..d);
            let a = rng.random_range(0.1..5.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            match dilation_identity_defect(d, a, axis) {
                Ok(v) => worst_dil = worst_dil.max(v),
                Err(e) => failure = Some(e),
            }
            let e = GroupElement::identity(d);
            let r = make_element(d, &ElementKind::R(axis)).expect("axis drawn in range");
            for (alpha, target) in [(0.0, &e), (PI, &e), (0.5 * PI, &r)] {
                match u_alpha(d, alpha, axis) {
                    Ok(u) => worst_u = worst_u.max(u.distance_mod_sign(target)),
                    Err(e) => failure = Some(e),
                }
            }
        }
        if let Some(e) = failure {
            rec.error(format!("d={d} group identities"), A_DILATION, &e);
        }
        rec.at_most(format!("d={d} dilation identity, 100 draws"), A_DILATION, worst_dil, tol);
        rec.at_most(format!("d={d} u(0) = u(π) = e, u(π/2) = R_i, 100 draws"), A_U_ALPHA, worst_u, tol);
        let period = conformal_energy(d).exp(2.0 * PI);
        rec.at_most(
            format!("d={d} exp(2π·conformal energy) = ±I"),
            A_ENERGY,
            period.distance_mod_sign(&GroupElement::identity(d)),
            cfg.tolerances.energy_period,
        );
        let r1 = make_element(d, &ElementKind::R(1)).expect("axis 1 exists for d ≥ 2");
        rec.holds(format!("d={d} R(1) in identity component"), A_COMPONENT, in_identity_component(&r1));
        let p1 = make_element(d, &ElementKind::P(1)).expect("axis 1 exists for d ≥ 2");
        rec.holds(
            format!("d={d} P(1) in identity component iff d is odd"),
            A_COMPONENT,
            in_identity_component(&p1) == (d % 2 == 1),
        );
    }
    rec.records
}

fn rel(a: &Point, b: &Point) -> f64 {
    (a - b).amax() / b.amax().max(1.0)
}

fn flow_checks(rec: &mut Recorder, cfg: &SuiteConfig, label: &str, f: &CanonicalFlow, seed: u64, rng: &mut ChaCha8Rng) {
    let pts = match sample_region(&f.region, 200, seed, Some(4.0)) {
        Ok(p) => p,
        Err(e) => return rec.error(format!("{label} sampling"), A_REGION, &e),
    };
    let mut law: f64 = 0.0;
    let mut exp_gap: f64 = 0.0;
    let mut escaped = 0usize;
    let mut singular = 0usize;
    for x in &pts {
        let s = rng.random_range(-0.5..0.5);
        let t = rng.random_range(-0.5..0.5);
        let (Image::Finite(ft), Image::Finite(fst)) = (f.apply(t, x), f.apply(s + t, x)) else {
            singular += 1;
            continue;
        };
        match (f.apply(s, &ft), act(&f.element(t), x)) {
            (Image::Finite(two), Image::Finite(via)) => {
                law = law.max(rel(&two, &fst));
                exp_gap = exp_gap.max(rel(&ft, &via));
            }
            _ => singular += 1,
        }
        if !f.region.contains(&fst) {
            escaped += 1;
        }
    }
    rec.at_most(format!("{label} group law"), A_GROUP_LAW, law, cfg.tolerances.flow_group_law);
    rec.at_most(format!("{label} closed form vs exponential"), A_CLOSED_FORM, exp_gap, FLOW_POINTWISE);
    rec.at_most(format!("{label} points leaving the region"), A_REGION, (escaped + singular) as f64, 0.0);
}

fn flows_suite(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Vec<CheckRecord> {
    let mut rec = Recorder::new(Suite::Flows);
    for &d in &cfg.dims {
        let (w, dc, g) = match (wedge_flow(d), doublecone_flow(d), wedge_to_doublecone(d)) {
            (Ok(w), Ok(dc), Ok(g)) => (w, dc, g),
            _ => {
                rec.skip(format!("d={d} flows need a spatial axis"), A_COHERENCE);
                continue;
            }
        };
        let conj = conjugate_flow(&g, &w);
        let mut worst: f64 = 0.0;
        for k in 0..=40 {
            let t = -2.0 + 0.1 * k as f64;
            let a = dc.element(t);
            let b = conj.element(t);
            worst = worst.max(sign_distance(a.matrix(), b.matrix()) / a.matrix().amax());
        }
        rec.at_most(format!("d={d} double-cone flow = g·wedge flow·g⁻¹ on t ∈ [−2, 2]"), A_COHERENCE, worst, cfg.tolerances.flow_matrix);
        let seed: u64 = rng.random();
        for (label, f) in [("wedge", &w), ("double cone", &dc), ("forward cone", &cone_flow(d))] {
            flow_checks(&mut rec, cfg, &format!("d={d} {label}"), f, seed, rng);
        }
    }
    rec.records
}

fn modular_suite(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Vec<CheckRecord> {
    let mut rec = Recorder::new(Suite::Modular);
    let tol = cfg.tolerances.modular_identity;
    let angle = cfg.tolerances.modular_angle;
    let (mut s2, mut j2, mut jdj, mut polar, mut sk, mut sfix, mut dk, mut jk, mut kms) =
        (0f64, 0f64, 0f64, 0f64, 0f64, 0f64, 0f64, 0f64, 0f64);
    for _ in 0..100 {
        let m = rng.random_range(1..=8);
        let k = random_standard(m, rng);
        let md = match tomita_operators(&k) {
            Ok(md) => md,
            Err(e) => {
                rec.error("tomita operators", A_TOMITA, &e);
                continue;
            }
        };
        s2 = s2.max(md.s_squared_residual());
        j2 = j2.max(md.j_squared_residual());
        jdj = jdj.max(md.j_delta_j_residual());
        polar = polar.max(md.polar_residual());
        let b = k.complex_basis();
        sk = sk.max(subspace_angle(&real_encode(&md.s.apply_matrix(&b)), k.basis()));
        let gens = CMatrix::from_columns(k.generators());
        sfix = sfix.max((md.s.apply_matrix(&gens) - &gens).iter().map(|z| z.norm()).fold(0.0, f64::max));
        for t in [-1.3, 0.4, 2.0] {
            dk = dk.max(subspace_angle(&real_encode(&(md.delta_it(t) * &b)), k.basis()));
        }
        jk = jk.max(subspace_angle(&real_encode(&md.j.apply_matrix(&b)), &symplectic_complement_basis(k.basis())));
        let probe = CMatrix::from_fn(m, 3, |_, _| num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        kms = kms.max(md.kms_residual(&probe));
    }
    rec.at_most("S² = I, 100 subspaces", A_TOMITA, s2, tol);
    rec.at_most("J² = I, 100 subspaces", A_TOMITA, j2, tol);
    rec.at_most("JΔJ = Δ⁻¹, 100 subspaces", A_TOMITA, jdj, tol);
    rec.at_most("S = JΔ^{1/2}, 100 subspaces", A_TOMITA, polar, tol);
    rec.at_most("SK = K angle", A_MODULAR_K, sk, angle);
    rec.at_most("S fixes generators", A_MODULAR_K, sfix, S_FIXES_K);
    rec.at_most("Δ^{it}K = K angle", A_MODULAR_K, dk, angle);
    rec.at_most("JK = K′ angle", A_DUALITY_K, jk, angle);
    rec.at_most("KMS symmetry", A_KMS, kms, tol);
    rec.records
}

/// Largest ratio between consecutive values; strict decrease iff < 1.
fn decrease_ratio(values: &[f64]) -> f64 {
    values.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max)
}

fn monotone(rec: &mut Recorder, name: &str, anchor: &str, values: &[f64]) {
    if values.len() < 2 {
        return rec.skip(format!("{name} (needs two sizes)"), anchor);
    }
    let ratio = decrease_ratio(values);
    let status = if ratio < 1.0 { Status::Pass } else { Status::Fail };
    rec.push(name.to_string(), anchor, status, Some(ratio), Some(1.0));
}

fn bw_suite(cfg: &SuiteConfig, rows: &[LadderRow]) -> Vec<CheckRecord> {
    let mut rec = Recorder::new(Suite::Bw);
    let at: Vec<f64> = rows.iter().map(|r| r.bw.defect_at(0.25).unwrap_or(f64::NAN)).collect();
    for r in rows {
        rec.at_most(format!("L={} defect at t = 0", r.l), A_BW, r.bw.defect_at(0.0).unwrap_or(f64::NAN), LATTICE_SYMMETRY);
        rec.at_most(format!("L={} modular identities", r.l), A_MODULAR_LATTICE, r.modular_identity, cfg.tolerances.modular_identity);
    }
    monotone(&mut rec, "BW defect at t = 0.25 decreases with L (max ratio)", A_BW, &at);
    match calibration() {
        Ok(cal) => match rows.iter().find(|r| r.l == cal.calibration_size) {
            Some(top) => {
                let limit = cal.bw_ceiling * (1.0 + cfg.tolerances.ceiling_slack);
                let worst = top.bw.defects.iter().copied().fold(0.0, f64::max);
                rec.at_most(format!("L={} BW defect over the t grid vs calibrated ceiling", top.l), A_BW, worst, limit);
                let law = top.bw.z_group_law.iter().copied().fold(0.0, f64::max);
                rec.at_most(format!("L={} z(t) group law vs calibrated ceiling", top.l), A_Z, law, limit);
                let model = LatticeModel::build(top.l).expect("validated size");
                let interval = IntervalOnCircle::half_circle(top.l, 0);
                let mut worst_flow: f64 = 0.0;
                for (s, t) in [(0.1, 0.1), (0.05, 0.2), (-0.1, 0.25)] {
                    worst_flow = worst_flow.max(flow_group_law_residual(&model, &interval, s, t, &STANDARD_FAMILY));
                }
                rec.at_most(format!("L={} lattice flow group law", top.l), A_LATTICE_FLOW, worst_flow, LATTICE_FLOW_GROUP_LAW);
            }
            None => rec.skip(format!("calibrated ceiling needs L={} in the ladder", cal.calibration_size), A_BW),
        },
        Err(e) => rec.error("calibration fixture", A_BW, &e),
    }
    for beta in [0.5, 1.0, 2.0] {
        match energy_trace(50, beta) {
            Ok(sum) => {
                let closed = energy_trace_closed_form(50, beta);
                rec.at_most(format!("β={beta} N=50 partition sum vs closed form (relative)"), A_ENERGY_TRACE, (sum - closed).abs() / closed, ENERGY_TRACE);
                let limit = energy_trace_limit(beta);
                // The bound plus the rounding of a subtraction at the scale of the limit.
                let bound = energy_trace_tail_bound(50, beta) + 4.0 * f64::EPSILON * limit;
                rec.at_most(format!("β={beta} N=50 distance to the N → ∞ limit within the tail bound"), A_ENERGY_TRACE, (limit - sum).abs(), bound);
            }
            Err(e) => rec.error(format!("β={beta} partition sum"), A_ENERGY_TRACE, &e),
        }
    }
    rec.records
}

fn duality_suite(rows: &[LadderRow]) -> Vec<CheckRecord> {
    let mut rec = Recorder::new(Suite::Duality);
    let values: Vec<f64> = rows.iter().map(|r| r.duality).collect();
    monotone(&mut rec, "duality defect decreases with L (max ratio)", A_DUALITY, &values);
    for r in rows {
        rec.at_most(format!("L={} duality defect invariant under site rotation", r.l), A_ROTATION, (r.duality - r.duality_rotated).abs(), LATTICE_SYMMETRY);
        let swapped = LatticeModel::build(r.l)
            .and_then(|m| duality_defect(&m, &IntervalOnCircle::half_circle(r.l, 0).complement()));
        match swapped {
            Ok(v) => rec.at_most(format!("L={} duality defect symmetric under I ↔ I′", r.l), A_DUALITY, (r.duality - v).abs(), LATTICE_SYMMETRY),
            Err(e) => rec.error(format!("L={} swapped duality", r.l), A_DUALITY, &e),
        }
    }
    rec.records
}

fn pct_suite(cfg: &SuiteConfig, rows: &[LadderRow]) -> Vec<CheckRecord> {
    let mut rec = Recorder::new(Suite::Pct);
    let values: Vec<f64> = rows.iter().map(|r| r.pct.defect).collect();
    monotone(&mut rec, "PCT geometry defect decreases with L (max ratio)", A_PCT, &values);
    for r in rows {
        rec.at_most(format!("L={} J² = I", r.l), A_PCT, r.pct.j_squared_residual, cfg.tolerances.modular_identity);
    }
    rec.records
}

/// Runs the configured suites. Configuration errors surface before any
/// computation.
pub fn run(cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let start = Instant::now();
    let suites = cfg.suite.expand();
    let needs_ladder = suites.iter().any(|s| matches!(s, Suite::Bw | Suite::Duality | Suite::Pct));
    let mut sizes = cfg.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let rows = if needs_ladder { Some(ladder(&sizes)) } else { None };
    let mut records = Vec::new();
    for suite in suites {
        let mut rng = suite_rng(cfg.seed, suite.name());
        let mut out = match (suite, rows.as_ref()) {
            (Suite::Group, _) => group_suite(cfg, &mut rng),
            (Suite::Flows, _) => flows_suite(cfg, &mut rng),
            (Suite::Modular, _) => modular_suite(cfg, &mut rng),
            (_, Some(Err(e))) => {
                let mut rec = Recorder::new(suite);
                rec.error("chiral ladder", A_BW, e);
                rec.records
            }
            (Suite::Bw, Some(Ok(rows))) => bw_suite(cfg, rows),
            (Suite::Duality, Some(Ok(rows))) => duality_suite(rows),
            (Suite::Pct, Some(Ok(rows))) => pct_suite(cfg, rows),
            _ => unreachable!("ladder computed for every chiral suite"),
        };
        records.append(&mut out);
    }
    let mut summary = Summary::default();
    for r in &records {
        match r.status {
            Status::Pass => summary.pass += 1,
            Status::Fail => summary.fail += 1,
            Status::Skip => summary.skip += 1,
        }
    }
    let report = Report {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        records,
        summary,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    if let Some(path) = &cfg.out {
        std::fs::write(path, report.to_json()?)?;
    }
    if let (Some(path), Some(Ok(rows))) = (&cfg.csv, rows.as_ref()) {
        std::fs::write(path, ladder_csv(rows))?;
    }
    Ok(report)
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row per lattice size.
pub fn ladder_csv(rows: &[LadderRow]) -> String {
    let mut s = String::from("L,window_dim,bw_defect_t0.25,z_group_law_max,duality_defect,pct_defect,j_squared_residual\n");
    for r in rows {
        let law = r.bw.z_group_law.iter().copied().fold(0.0, f64::max);
        let bw = r.bw.defect_at(0.25).unwrap_or(f64::NAN);
        let fields = [float(bw), float(law), float(r.duality), float(r.pct.defect), float(r.pct.j_squared_residual)];
        let _ = writeln!(s, "{},{},{}", r.l, r.window_dim, fields.join(","));
    }
    s
}

/// `t,x0,…,x{d−1}`; singular images become empty fields.
pub fn trajectory_csv(dim: usize, trajectory: &[(f64, Image)]) -> String {
    let header: Vec<String> = std::iter::once("t".to_string()).chain((0..dim).map(|i| format!("x{i}"))).collect();
    let mut s = header.join(",") + "\n";
    for (t, img) in trajectory {
        let coords: Vec<String> = match img {
            Image::Finite(p) => p.iter().map(|v| float(*v)).collect(),
            Image::Singular => vec![String::new(); dim],
        };
        let _ = writeln!(s, "{},{}", float(*t), coords.join(","));
    }
    s
}

pub fn export_csv(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a(""), 0xcbf29ce484222325);
        assert_eq!(fnv1a("a"), 0xaf63dc4c8601ec8c);
    }

    #[test]
    fn suite_names_round_trip() {
        for n in Suite::NAMES {
            assert_eq!(n.parse::<Suite>().unwrap().name(), n);
        }
        assert!(matches!("nope".parse::<Suite>(), Err(Error::Config(_))));
    }

    #[test]
    fn config_validation() {
        let mut c = SuiteConfig::default();
        assert!(c.validate().is_ok());
        c.dims = vec![1];
        assert!(c.validate().is_err());
        c = SuiteConfig::default();
        c.sizes = vec![100];
        assert!(c.validate().is_err());
        c = SuiteConfig::default();
        assert!(c.apply_overrides(&["flow_matrix=1e-20"]).is_err());
        assert!(c.apply_overrides(&["bogus=1e-3"]).is_err());
        assert!(c.apply_overrides(&["flow_matrix"]).is_err());
        c.apply_overrides(&["flow_matrix=1e-7"]).unwrap();
        assert_eq!(c.tolerances.flow_matrix, 1e-7);
        c.out = Some(PathBuf::from("/definitely/not/here/report.json"));
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn cone_trajectory_csv() {
        let f = cone_flow(4);
        let x = Point::from_column_slice(&[1.0, 0.0, 0.0, 0.0]);
        let traj = f.trajectory(&x, &[-1.0, -0.5, 0.0, 0.5, 1.0]);
        let csv = trajectory_csv(4, &traj);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0], "t,x0,x1,x2,x3");
        assert!(lines[3].starts_with("0.0000000000000000e0,1.0000000000000000e0,"));
        assert!(!csv.contains('\r'));
        assert_eq!(trajectory_csv(4, &[]), "t,x0,x1,x2,x3\n");
    }

    #[test]
    fn calibration_fixture_parses() {
        let cal = calibration().unwrap();
        assert_eq!(cal.sizes, vec![64, 128, 256]);
        assert!(cal.bw_ceiling > 0.0);
    }

    #[test]
    fn group_suite_passes_and_is_deterministic() {
        let cfg = SuiteConfig { suite: Suite::Group, ..SuiteConfig::default() };
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert!(!a.failed(), "{:#?}", a.records);
        assert_eq!(a.records, b.records);
    }
}
