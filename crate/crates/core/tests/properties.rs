use std::f64::consts::PI;

use proptest::prelude::*;

use crofton::bodies::{section_intrinsic_volume, ConvexBody};
use crofton::constants::{ball_intrinsic_volume, kappa};
use crofton::estimators::{
    default_l0, estimate, merge_accumulators, outer_accumulators, Accumulator, Design, EstimatorSpec, Indices, Route,
};
use crofton::geometry::{sample_grassmannian, sample_rotation_fixing, Flat, RngStream, Subspace, Vector};

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
}

proptest! {
    #![proptest_config(cfg(64))]

    // vol(K + eps B) = sum_j kappa_{n-j} eps^{n-j} V_j(K), with the parallel
    // body of a 3-box written out by hand.
    #[test]
    fn steiner_for_boxes(a in 0.1f64..3.0, b in 0.1f64..3.0, c in 0.1f64..3.0, eps in 0.0f64..2.0) {
        let lower = Vector::zeros(3);
        let upper = Vector::from_column_slice(&[a, b, c]);
        let body = ConvexBody::cuboid(lower, upper).unwrap();
        let parallel = a * b * c + 2.0 * eps * (a * b + b * c + c * a) + PI * eps * eps * (a + b + c)
            + 4.0 / 3.0 * PI * eps.powi(3);
        let steiner: f64 = (0..=3)
            .map(|j| kappa(3 - j) * eps.powi(3 - j as i32) * body.exact_intrinsic_volume(j).unwrap())
            .sum();
        prop_assert!((parallel - steiner).abs() <= 1e-12 * parallel.max(1.0));
    }

    #[test]
    fn steiner_for_balls(n in 1usize..9, rho in 0.1f64..2.0, eps in 0.0f64..2.0) {
        let lhs = kappa(n) * (rho + eps).powi(n as i32);
        let rhs: f64 = (0..=n)
            .map(|j| kappa(n - j) * eps.powi((n - j) as i32) * ball_intrinsic_volume(n, j, rho))
            .sum();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs);
    }

    #[test]
    fn homogeneity(n in 3usize..6, m in 0usize..6, lambda in 0.2f64..3.0) {
        prop_assume!(m <= n);
        let ball = ConvexBody::unit_ball(n);
        let cube = ConvexBody::cube(n, -0.5, 1.0).unwrap();
        for body in [ball, cube] {
            let base = body.exact_intrinsic_volume(m).unwrap();
            let scaled = body.scaled(lambda).unwrap().exact_intrinsic_volume(m).unwrap();
            prop_assert!((scaled - lambda.powi(m as i32) * base).abs() <= 1e-12 * scaled.max(1.0));
        }
    }

    // A ball section at distance d is a ball of radius sqrt(1 - d^2).
    #[test]
    fn ball_sections(n in 3usize..7, q in 1usize..6, seed in any::<u64>(), t in 0.0f64..0.99) {
        prop_assume!(q < n);
        let mut rng = RngStream::new(seed);
        let dir = sample_grassmannian(n, q, &mut rng).unwrap();
        let normal = dir.complement();
        let u = normal.embed(&Vector::from_fn(normal.dim(), |i, _| if i == 0 { 1.0 } else { 0.0 }));
        let flat = Flat::new(dir, &(u * t));
        let section = ConvexBody::unit_ball(n).section(&flat);
        prop_assert!(section.is_some());
        let v = section_intrinsic_volume(section.as_ref(), q, &mut rng).unwrap();
        let expected = kappa(q) * (1.0 - t * t).powf(q as f64 / 2.0);
        prop_assert!((v - expected).abs() <= 1e-10 * expected);
    }

    #[test]
    fn rotated_polytope_volume(a in 0.2f64..2.0, b in 0.2f64..2.0, c in 0.2f64..2.0, seed in any::<u64>()) {
        let lower = Vector::from_column_slice(&[-a / 2.0, -b / 3.0, -c / 4.0]);
        let upper = &lower + Vector::from_column_slice(&[a, b, c]);
        let mut normals = Vec::new();
        let mut offsets = Vec::new();
        for i in 0..3 {
            let mut e = Vector::zeros(3);
            e[i] = 1.0;
            normals.push(e.clone());
            offsets.push(upper[i]);
            normals.push(-e);
            offsets.push(-lower[i]);
        }
        let poly = ConvexBody::polytope(normals, offsets).unwrap();
        let mut rng = RngStream::new(seed);
        let rot = sample_rotation_fixing(&Subspace::trivial(3), &mut rng).unwrap();
        let moved = poly.transformed(&rot, &Vector::from_column_slice(&[0.3, -0.2, 0.1])).unwrap();
        let full = Flat::linear(Subspace::full(3));
        let v = section_intrinsic_volume(moved.section(&full).as_ref(), 3, &mut rng).unwrap();
        prop_assert!((v - a * b * c).abs() <= 1e-9 * a * b * c);
        let half_surface = section_intrinsic_volume(moved.section(&full).as_ref(), 2, &mut rng).unwrap();
        prop_assert!((half_surface - (a * b + b * c + c * a)).abs() <= 1e-9 * half_surface);
    }

    // A coordinate plane through a box cuts a rectangle; V_1 is half its perimeter.
    #[test]
    fn box_section_perimeter(a in 0.2f64..2.0, b in 0.2f64..2.0, c in 0.2f64..2.0, h in 0.01f64..0.99) {
        let body = ConvexBody::cuboid(Vector::zeros(3), Vector::from_column_slice(&[a, b, c])).unwrap();
        let flat = Flat::new(Subspace::coordinate(3, &[0, 1]), &Vector::from_column_slice(&[0.0, 0.0, h * c]));
        let mut rng = RngStream::new(1);
        let s = body.section(&flat);
        let v1 = section_intrinsic_volume(s.as_ref(), 1, &mut rng).unwrap();
        let v2 = section_intrinsic_volume(s.as_ref(), 2, &mut rng).unwrap();
        prop_assert!((v1 - (a + b)).abs() <= 1e-9 * (a + b));
        prop_assert!((v2 - a * b).abs() <= 1e-9 * a * b);
    }

    #[test]
    fn accumulator_merge(xs in prop::collection::vec(-1e3f64..1e3, 2..200), split in 0usize..200) {
        let split = split.min(xs.len());
        let whole: Accumulator = xs.iter().copied().collect();
        let mut left: Accumulator = xs[..split].iter().copied().collect();
        let right: Accumulator = xs[split..].iter().copied().collect();
        left.merge(&right);
        prop_assert_eq!(left.count(), whole.count());
        prop_assert!((left.mean() - whole.mean()).abs() <= 1e-9 * (1.0 + whole.mean().abs()));
        prop_assert!((left.variance() - whole.variance()).abs() <= 1e-9 * (1.0 + whole.variance()));
    }
}

proptest! {
    #![proptest_config(cfg(8))]

    // Rotating the body about L0 leaves the distribution of the rotational
    // estimator unchanged.
    #[test]
    fn rotation_about_l0(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let l0 = default_l0(3, 1);
        let rot = sample_rotation_fixing(&l0, &mut rng).unwrap();
        let lower = Vector::from_column_slice(&[-0.3, -0.45, -0.6]);
        let cube = ConvexBody::cuboid(lower.clone(), lower.add_scalar(1.0)).unwrap();
        let turned = cube.transformed(&rot, &Vector::zeros(3)).unwrap();
        let ix = Indices::new(3, 2, 1, 0, 0);
        let a = estimate(&EstimatorSpec::new(ix, cube, l0.clone()).with_outer(20_000).with_seed(seed), Design::Rotational, Route::Volume).unwrap();
        let b = estimate(&EstimatorSpec::new(ix, turned, l0).with_outer(20_000).with_seed(seed ^ 1), Design::Rotational, Route::Volume).unwrap();
        prop_assert!(a.z_between(&b).abs() <= 4.0, "{a:?} vs {b:?}");
    }
}

#[test]
fn kubota_v1_of_a_box() {
    let body = ConvexBody::polytope(
        (0..3)
            .flat_map(|i| {
                let mut e = Vector::zeros(3);
                e[i] = 1.0;
                [e.clone(), -e]
            })
            .collect(),
        vec![1.0, 0.0, 0.5, 0.5, 0.25, 0.25],
    )
    .unwrap();
    let section = body.section(&Flat::linear(Subspace::full(3)));
    let mut rng = RngStream::new(3);
    let acc: Accumulator = (0..400).map(|_| section_intrinsic_volume(section.as_ref(), 1, &mut rng).unwrap()).collect();
    let e = acc.estimate(3);
    assert!(e.z(2.5).abs() <= 4.0, "{e:?}");
}

#[test]
fn routes_agree() {
    let spec = EstimatorSpec::new(Indices::new(4, 3, 1, 0, 0), ConvexBody::unit_ball(4), default_l0(4, 1))
        .with_outer(20_000)
        .with_seed(11);
    let generic = estimate(&spec, Design::Rotational, Route::Generic).unwrap();
    let volume = estimate(&spec, Design::Rotational, Route::Volume).unwrap();
    let radial = estimate(&spec, Design::Rotational, Route::Radial).unwrap();
    let proj = estimate(&spec, Design::Rotational, Route::Projection).unwrap();
    for e in [generic, volume, radial, proj] {
        assert!(e.z(kappa(4)).abs() <= 4.0, "{e:?}");
    }
}

#[test]
fn thread_count_invariance() {
    let cases = [
        (Design::Rotational, Indices::new(3, 2, 0, 1, 1), 3_100),
        (Design::Vertical, Indices::new(3, 2, 1, 1, 1), 5_500),
    ];
    for (design, ix, outer) in cases {
        let spec = EstimatorSpec::new(ix, ConvexBody::unit_ball(3), default_l0(3, ix.r)).with_outer(outer).with_seed(5);
        let one = pool(1).install(|| outer_accumulators(&spec, design, Route::Generic)).unwrap();
        let four = pool(4).install(|| outer_accumulators(&spec, design, Route::Generic)).unwrap();
        let a = merge_accumulators(&one).estimate(5);
        let b = merge_accumulators(&four).estimate(5);
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }
}
