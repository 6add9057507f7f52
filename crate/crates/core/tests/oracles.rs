//! Independent second routes for quantities the library computes one way.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use confmod::chiral::{interval_subspace, IntervalOnCircle, LatticeModel};
use confmod::confgroup::{
    act, conformal_energy, dilation_identity_defect, embed, make_element, project, ray_inversion, u_alpha,
    ElementKind, Image, Projected, Ray,
};
use confmod::geometry::{
    causal_relation, minkowski_norm, minkowski_product, sample_box, sample_region, spacelike_complement,
    timelike_complement, CausalRelation, Point, Region,
};
use confmod::modular::{
    complex_decode, orthogonal_complement, orthonormal_span, real_encode, real_encode_vector, subspace_angle,
    symplectic_complement_basis, times_i, tomita_operators, random_standard, CMatrix, CVector, StandardSubspace,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// x ↦ (x − a x²) / (1 − 2a·x + a²x²)
fn special_oracle(a: &Point, x: &Point) -> Option<Point> {
    let x2 = minkowski_norm(x);
    let den = 1.0 - 2.0 * minkowski_product(a, x) + minkowski_norm(a) * x2;
    if den.abs() < 1e-9 {
        return None;
    }
    Some((x - a * x2) / den)
}

#[test]
fn special_conformal_matches_the_pointwise_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in 2..=5 {
        for _ in 0..200 {
            let a = Point::from_fn(d, |_, _| rng.random_range(-0.8..0.8));
            let x = Point::from_fn(d, |_, _| rng.random_range(-2.0..2.0));
            let g = make_element(d, &ElementKind::Special(a.iter().copied().collect())).unwrap();
            let Some(want) = special_oracle(&a, &x) else { continue };
            let got = act(&g, &x).finite().unwrap();
            assert!((&got - &want).amax() <= 1e-9 * want.amax().max(1.0), "d={d} a={a} x={x}");
        }
    }
}

#[test]
fn ray_inversion_sends_the_light_cone_to_infinity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in 2..=4 {
        let rho = ray_inversion(d);
        for _ in 0..1000 {
            let mut dir = DVector::from_fn(d - 1, |_, _| rng.random_range(-1.0..1.0));
            while dir.norm() < 1e-3 {
                dir = DVector::from_fn(d - 1, |_, _| rng.random_range(-1.0..1.0));
            }
            let r: f64 = rng.random_range(0.1..5.0);
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let mut x = Point::zeros(d);
            x[0] = sign * r;
            x.rows_mut(1, d - 1).copy_from(&(dir.normalize() * r));
            assert!(act(&rho, &x).is_singular(), "{x}");
        }
        // Off the cone the inversion is x ↦ −x/x².
        let x = Point::from_fn(d, |i, _| 0.3 + 0.2 * i as f64);
        let want = -&x / minkowski_norm(&x);
        assert!((act(&rho, &x).finite().unwrap() - want).amax() < 1e-12);
    }
}

#[test]
fn ray_at_infinity_and_round_trip() {
    for d in 2..=4 {
        let mut xi = DVector::zeros(d + 2);
        xi[d] = 1.0;
        xi[d + 1] = -1.0;
        assert_eq!(project(&Ray::new(xi).unwrap()), Projected::AtInfinity);
        let x = Point::from_fn(d, |i, _| 1.5 - 0.7 * i as f64);
        match project(&embed(&x)) {
            Projected::Point(y) => assert!((y - &x).amax() < 1e-12),
            Projected::AtInfinity => panic!("finite point projected to infinity"),
        }
    }
}

#[test]
fn wedge_complement_agrees_with_brute_force() {
    let d = 3;
    let w = Region::standard_wedge(d);
    let wp = spacelike_complement(&w).unwrap();
    let inside = sample_region(&w, 400, 11, Some(6.0)).unwrap();
    for x in sample_box(d, 10_000, 12, 4.0) {
        let formula = x[1] < -x[0].abs();
        assert_eq!(wp.contains(&x), formula, "{x}");
        if formula {
            for y in &inside {
                assert_eq!(causal_relation(&x, y).unwrap(), CausalRelation::Spacelike);
            }
        }
    }
}

#[test]
fn double_cone_complements_agree_with_formulas() {
    for d in 2..=4 {
        let o = Region::unit_double_cone(d);
        let op = spacelike_complement(&o).unwrap();
        let ot = timelike_complement(&o).unwrap();
        let inside = sample_region(&o, 300, 4, None).unwrap();
        for x in sample_box(d, 10_000, 5, 3.0) {
            let r = x.rows(1, d - 1).norm();
            let formula = r > x[0].abs() + 1.0;
            assert_eq!(op.contains(&x), formula, "{x}");
            assert_eq!(ot.contains(&x), x[0].abs() > r + 1.0, "{x}");
            if formula {
                assert!(inside.iter().all(|y| causal_relation(&x, y).unwrap() == CausalRelation::Spacelike));
            }
        }
    }
}

#[test]
fn timelike_complement_matches_sampled_cone() {
    let d = 3;
    let o = Region::unit_double_cone(d);
    let ot = timelike_complement(&o).unwrap();
    let samples = sample_region(&o, 10_000, 99, None).unwrap();
    let timelike_to_all = |x: &Point| {
        samples.iter().all(|y| {
            matches!(causal_relation(y, x).unwrap(), CausalRelation::TimelikeFuture | CausalRelation::TimelikePast)
        })
    };
    for x in [[1.5, 0.6, 0.0], [3.0, 0.5, 0.0], [-2.5, 0.2, 1.0], [0.2, 2.0, 0.0]] {
        let x = Point::from_column_slice(&x);
        assert_eq!(ot.contains(&x), timelike_to_all(&x), "{x}");
    }
    assert!(!ot.contains(&Point::from_column_slice(&[1.5, 0.6, 0.0])));
}

#[test]
fn u_alpha_is_a_one_parameter_group() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for d in 2..=4 {
        for i in 1..d {
            for _ in 0..100 {
                let a: f64 = rng.random_range(-PI..PI);
                let b: f64 = rng.random_range(-PI..PI);
                let lhs = u_alpha(d, a, i).unwrap().compose(&u_alpha(d, b, i).unwrap());
                let rhs = u_alpha(d, a + b, i).unwrap();
                let scale = lhs.matrix().amax().max(1.0);
                assert!(lhs.distance_mod_sign(&rhs) < 1e-9 * scale, "d={d} i={i} a={a} b={b}");
            }
        }
    }
}

#[test]
fn dilation_identity_at_fixed_points() {
    for d in 2..=4 {
        for a in [1.0, 3.7, -2.0] {
            assert!(dilation_identity_defect(d, a, 1).unwrap() < 1e-9, "d={d} a={a}");
        }
    }
}

#[test]
fn conformal_energy_rotates_the_compact_time_plane() {
    // exp(tk) turns (ξ₀, ξ_{d+1}) at angular speed 2 and fixes the rest.
    for d in 2..=4 {
        let k = conformal_energy(d);
        for t in [0.3f64, 1.1, -0.7] {
            let mut want = DMatrix::identity(d + 2, d + 2);
            let (s, co) = (2.0 * t).sin_cos();
            want[(0, 0)] = co;
            want[(0, d + 1)] = s;
            want[(d + 1, 0)] = -s;
            want[(d + 1, d + 1)] = co;
            assert!((k.exp(t).matrix() - want).amax() < 1e-12, "d={d} t={t}");
        }
    }
}

/// Real 2m × 2m matrix of S, solved densely from S(k) = k and S(ik) = −ik.
fn dense_s(k: &DMatrix<f64>) -> DMatrix<f64> {
    let ik = times_i(k);
    let n = k.nrows();
    let mut from = DMatrix::zeros(n, n);
    let mut to = DMatrix::zeros(n, n);
    let h = k.ncols();
    from.view_mut((0, 0), (n, h)).copy_from(k);
    from.view_mut((0, h), (n, h)).copy_from(&ik);
    to.view_mut((0, 0), (n, h)).copy_from(k);
    to.view_mut((0, h), (n, h)).copy_from(&(-&ik));
    to * from.try_inverse().unwrap()
}

fn assert_s_matches(k: &StandardSubspace, rng: &mut ChaCha8Rng) {
    let md = tomita_operators(k).unwrap();
    let s = dense_s(k.basis());
    let m = k.ambient_dim();
    for _ in 0..10 {
        let v = CVector::from_fn(m, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let a = real_encode_vector(&md.s.apply(&v));
        let b = &s * real_encode_vector(&v);
        assert!((&a - &b).amax() < 1e-8 * b.amax().max(1.0));
    }
}

#[test]
fn tomita_operator_matches_dense_real_solve() {
    let k = StandardSubspace::new(vec![
        CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]),
        CVector::from_vec(vec![c(0.0, 0.5), c(1.0, 0.0)]),
    ])
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert_s_matches(&k, &mut rng);
    for m in 1..=6 {
        let k = random_standard(m, &mut rng);
        assert_s_matches(&k, &mut rng);
    }
}

#[test]
fn symplectic_complement_is_i_times_the_orthogonal_complement() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for m in 1..=6 {
        let k = random_standard(m, &mut rng);
        let via_perp = times_i(&orthogonal_complement(k.basis()));
        let direct = symplectic_complement_basis(k.basis());
        assert!(subspace_angle(&via_perp, &direct) < 1e-8, "m={m}");
    }
}

/// Naive DFT coefficients û_n for n = 0 … L−1.
fn naive_dft(u: &DVector<f64>) -> Vec<Complex64> {
    let l = u.len();
    (0..l)
        .map(|n| {
            u.iter()
                .enumerate()
                .map(|(j, &x)| Complex64::from_polar(x, -2.0 * PI * (n * j) as f64 / l as f64))
                .sum::<Complex64>()
                / l as f64
        })
        .collect()
}

fn signed(n: usize, l: usize) -> i64 {
    if n < l / 2 {
        n as i64
    } else {
        n as i64 - l as i64
    }
}

#[test]
fn energy_form_is_positive_and_matches_naive_sum() {
    let l = 64;
    let model = LatticeModel::build(l).unwrap();
    // Gram matrix of g on site deltas from the naive Fourier sum.
    let deltas: Vec<Vec<Complex64>> = (0..l)
        .map(|k| {
            let mut e = DVector::zeros(l);
            e[k] = 1.0;
            naive_dft(&e)
        })
        .collect();
    let g = DMatrix::from_fn(l, l, |a, b| {
        (1..l)
            .filter(|&n| n != l / 2)
            .map(|n| signed(n, l).unsigned_abs() as f64 * (deltas[a][n] * deltas[b][n].conj()).re)
            .sum::<f64>()
    });
    let eig = g.clone().symmetric_eigen().eigenvalues;
    assert!(eig.min() > -1e-12);
    let zero = eig.iter().filter(|e| e.abs() < 1e-10).count();
    assert_eq!(zero, 2, "constant and alternating modes are the null space");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let u = DVector::from_fn(l, |_, _| rng.random_range(-1.0..1.0));
        let v = DVector::from_fn(l, |_, _| rng.random_range(-1.0..1.0));
        let naive = (u.transpose() * &g * &v)[(0, 0)];
        assert!((model.energy_form(&u, &v) - naive).abs() < 1e-10 * naive.abs().max(1.0));
    }
}

#[test]
fn complex_structure_is_the_discrete_hilbert_transform() {
    let l = 32;
    let model = LatticeModel::build(l).unwrap();
    let j = model.complex_structure();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let u = DVector::from_fn(l, |_, _| rng.random_range(-1.0..1.0));
        let uh = naive_dft(&u);
        let ju: DVector<f64> = DVector::from_fn(l, |s, _| {
            (0..l)
                .filter(|&n| n != 0 && n != l / 2)
                .map(|n| {
                    let mult = c(0.0, -(signed(n, l).signum() as f64));
                    mult * uh[n] * Complex64::from_polar(1.0, 2.0 * PI * (n * s) as f64 / l as f64)
                })
                .sum::<Complex64>()
                .re
        });
        assert!((j * &u - ju).amax() < 1e-12);
    }
    let jj = j * j;
    let p = model.retained_projector();
    assert!((jj + &p).amax() < 1e-10, "𝒥² = −1 on the retained modes");
}

#[test]
fn inner_product_is_hermitian_and_complex_linear() {
    let model = LatticeModel::build(64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..20 {
        let u = DVector::from_fn(64, |_, _| rng.random_range(-1.0..1.0));
        let v = DVector::from_fn(64, |_, _| rng.random_range(-1.0..1.0));
        let uv = model.inner_product(&u, &v);
        let vu = model.inner_product(&v, &u);
        assert!((uv - vu.conj()).norm() < 1e-10 * uv.norm().max(1.0));
        // Linear in the first slot, antilinear in the second.
        let ju = model.complex_structure() * &u;
        let jv = model.complex_structure() * &v;
        let tol = 1e-10 * uv.norm().max(1.0);
        assert!((model.inner_product(&ju, &v) - c(0.0, 1.0) * uv).norm() < tol);
        assert!((model.inner_product(&u, &jv) + c(0.0, 1.0) * uv).norm() < tol);
        let modes = model.to_modes(&v).dotc(&model.to_modes(&u));
        assert!((modes - uv).norm() < tol);
    }
}

#[test]
fn interval_subspace_is_rotation_covariant() {
    for l in [64, 128] {
        let model = LatticeModel::build(l).unwrap();
        let shift = 5;
        let k0 = interval_subspace(&model, &IntervalOnCircle::half_circle(l, 0)).unwrap();
        let k1 = interval_subspace(&model, &IntervalOnCircle::half_circle(l, shift)).unwrap();
        // Shifting sites by k multiplies mode n by e^{2πink/L}.
        let m = model.mode_dim();
        let phase = CMatrix::from_diagonal(&CVector::from_fn(m, |i, _| {
            Complex64::from_polar(1.0, 2.0 * PI * ((i + 1) as isize * shift) as f64 / l as f64)
        }));
        let rotated = real_encode(&(phase * complex_decode(&k0.model_basis)));
        assert!(subspace_angle(&orthonormal_span(&rotated), &k1.model_basis) < 1e-9, "L={l}");
    }
}

#[test]
fn shift_phase_convention_matches_rotate() {
    let l = 32;
    let model = LatticeModel::build(l).unwrap();
    let u = DVector::from_fn(l, |j, _| (0.3 * j as f64).sin() + 0.1 * j as f64);
    let a = model.to_modes(&model.rotate(&u, 3));
    let b = model.to_modes(&u).map_with_location(|i, _, z| z * Complex64::from_polar(1.0, 2.0 * PI * (3 * (i + 1)) as f64 / l as f64));
    assert!((a - b).norm() < 1e-12);
}

#[test]
fn act_agrees_with_pointwise_translation_and_dilation() {
    let x = Point::from_column_slice(&[0.4, -1.2, 2.0]);
    let t = make_element(3, &ElementKind::Translation(vec![1.0, 0.5, -0.5])).unwrap();
    let want = Point::from_column_slice(&[1.4, -0.7, 1.5]);
    assert!((act(&t, &x).finite().unwrap() - want).amax() < 1e-14);
    let dil = make_element(3, &ElementKind::Dilation(2.5)).unwrap();
    match act(&dil, &x) {
        Image::Finite(y) => assert!((y - &x * 2.5).amax() < 1e-14),
        Image::Singular => panic!("dilation is regular everywhere"),
    }
}
