//! Property suites for the geometry invariants: support subadditivity and
//! homogeneity, gauge–support duality, difference-body and projection
//! identities, containment transitivity, sandwich realization, and the
//! double-cone stability margins on generated instances.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use convex_sandwich::body::{GaugeBody, Subspace, VPolytope};
use convex_sandwich::cones::{self, DoubleCone};
use convex_sandwich::generate;
use convex_sandwich::lp;
use convex_sandwich::metrics;
use convex_sandwich::ops;
use convex_sandwich::pipeline;
use convex_sandwich::sampling::GaussianSource;

fn random_gauge_body(src: &mut GaussianSource, dim: usize, variant: usize) -> GaugeBody {
    match variant {
        0 => GaugeBody::unit_ball(dim),
        1 => GaugeBody::cross_polytope(dim),
        2 => GaugeBody::cube(dim),
        3 => GaugeBody::poly(
            generate::random_polytope_with_interior(dim, 3, src).expect("generator"),
        ),
        4 => GaugeBody::double_cone(generate::random_double_cone(dim.max(2), src).expect("cone")),
        5 => GaugeBody::scaled(
            random_gauge_body(src, dim, variant % 3),
            src.uniform_in(0.2, 3.0),
        )
        .expect("positive scale"),
        _ => {
            // well-conditioned affine image with a small shift
            let inner = random_gauge_body(src, dim, variant % 4);
            let d = inner.dim();
            let mut map = DMatrix::identity(d, d);
            for i in 0..d {
                for j in 0..d {
                    map[(i, j)] += 0.25 * src.next_normal();
                }
            }
            if map.clone().try_inverse().is_none() {
                return inner;
            }
            let shift = &map * (src.unit_vector(d) * 0.05);
            GaugeBody::affine_image(inner, map, shift).expect("invertible map")
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn support_subadditive_and_homogeneous(
        seed in any::<u64>(),
        dim in 2usize..=4,
        variant in 0usize..7,
        t in 0.01f64..50.0,
    ) {
        let mut src = GaussianSource::new(seed);
        let body = random_gauge_body(&mut src, dim, variant);
        let d = body.dim();
        let u = src.unit_vector(d) * src.uniform_in(0.1, 5.0);
        let v = src.unit_vector(d) * src.uniform_in(0.1, 5.0);
        let hu = body.support(&u).unwrap();
        let hv = body.support(&v).unwrap();
        let sum = &u + &v;
        if sum.norm() > 1e-9 {
            let hsum = body.support(&sum).unwrap();
            prop_assert!(hsum <= hu + hv + 1e-9 * (hu.abs() + hv.abs() + 1.0));
        }
        let ht = body.support(&(&u * t)).unwrap();
        prop_assert!((ht - t * hu).abs() <= 1e-9 * (1.0 + ht.abs()));
    }

    #[test]
    fn gauge_positively_homogeneous(
        seed in any::<u64>(),
        dim in 2usize..=4,
        variant in 0usize..7,
        t in 0.01f64..20.0,
    ) {
        let mut src = GaussianSource::new(seed);
        let body = random_gauge_body(&mut src, dim, variant);
        let d = body.dim();
        let x = src.unit_vector(d) * src.uniform_in(0.1, 3.0);
        let gx = body.gauge(&x).unwrap();
        let gt = body.gauge(&(&x * t)).unwrap();
        prop_assert!((gt - t * gx).abs() <= 1e-8 * (1.0 + gt.abs()), "{gt} vs {}", t * gx);
        prop_assert!(body.gauge(&DVector::zeros(d)).unwrap() == 0.0);
    }

    #[test]
    fn gauge_support_duality(seed in any::<u64>(), dim in 2usize..=4) {
        let mut src = GaussianSource::new(seed);
        let p = generate::random_polytope_with_interior(dim, 4, &mut src).unwrap();
        let h = ops::polar(&p).unwrap();
        for _ in 0..1000 {
            let u = src.unit_vector(dim);
            let lhs = h.ray_gauge(&u).unwrap();
            let rhs = p.support(&u).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9);
        }
    }

    #[test]
    fn difference_body_support_identity(seed in any::<u64>(), dim in 2usize..=4) {
        let mut src = GaussianSource::new(seed);
        let p = generate::random_polytope_with_interior(dim, 4, &mut src).unwrap();
        let d = ops::difference_body(&p).unwrap();
        prop_assert!(d.is_origin_symmetric(1e-9));
        for _ in 0..100 {
            let u = src.unit_vector(dim);
            let lhs = d.support(&u).unwrap();
            let rhs = p.support(&u).unwrap() + p.support(&(-&u)).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12, "dev {}", (lhs - rhs).abs());
        }
    }

    #[test]
    fn projection_support_identity(seed in any::<u64>(), dim in 2usize..=5, m in 1usize..=3) {
        prop_assume!(m <= dim);
        let mut src = GaussianSource::new(seed);
        let p = generate::random_polytope_with_interior(dim, 3, &mut src).unwrap();
        let s = pipeline::haar_subspace(dim, m, seed ^ 0x5bd1).unwrap();
        let q = ops::project(&p, &s).unwrap();
        for _ in 0..100 {
            let w = src.unit_vector(m);
            let lhs = q.support(&w).unwrap();
            let rhs = p.support(&s.lift(&w)).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10);
        }
    }

    #[test]
    fn containment_transitive(seed in any::<u64>(), dim in 2usize..=4) {
        let mut src = GaussianSource::new(seed);
        let a = generate::random_symmetric_polytope(dim, dim + 2, &mut src).unwrap();
        let mut b_verts = a.vertices().to_vec();
        for _ in 0..3 {
            b_verts.push(src.unit_vector(dim) * src.uniform_in(1.0, 1.8));
            b_verts.push(-b_verts.last().unwrap());
        }
        let b = VPolytope::new(b_verts.clone()).unwrap();
        let mut c_verts = b_verts;
        for _ in 0..3 {
            c_verts.push(src.unit_vector(dim) * src.uniform_in(1.5, 2.5));
            c_verts.push(-c_verts.last().unwrap());
        }
        let c = VPolytope::new(c_verts).unwrap();
        let ga = GaugeBody::poly(a);
        let gb = GaugeBody::poly(b);
        let gc = GaugeBody::poly(c);
        let (ab, _) = ops::contains(&ga, &gb).unwrap();
        let (bc, _) = ops::contains(&gb, &gc).unwrap();
        let (ac, _) = ops::contains(&ga, &gc).unwrap();
        prop_assert!(ab && bc);
        prop_assert!(ac);
    }

    #[test]
    fn sandwich_ratio_is_realized(seed in any::<u64>(), dim in 2usize..=3) {
        let mut src = GaussianSource::new(seed);
        let k = generate::random_symmetric_polytope(dim, dim + 2, &mut src).unwrap();
        let r = generate::random_symmetric_polytope(dim, dim + 2, &mut src).unwrap();
        let mut map = DMatrix::identity(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                map[(i, j)] += 0.3 * src.next_normal();
            }
        }
        prop_assume!(map.clone().try_inverse().is_some());
        let lambda = ops::sandwich_ratio(
            &GaugeBody::poly(k.clone()),
            &GaugeBody::poly(r.clone()),
            &map,
            &DVector::zeros(dim),
        )
        .unwrap();
        prop_assert!(lambda >= 1.0);
        prop_assume!(lambda.is_finite());
        // realize the sandwich: rescale T(K) by the inner scale and check
        // both containments at the reported ratio
        let transformed: Vec<DVector<f64>> = k.vertices().iter().map(|v| &map * v).collect();
        let mut g = 0.0f64;
        for pt in r.vertices() {
            g = g.max(lp::polytope_gauge(&transformed, pt).unwrap());
        }
        let normalized = VPolytope::new(transformed.iter().map(|v| v * g).collect()).unwrap();
        let body = GaugeBody::poly(normalized);
        let (ok_in, m_in) = ops::contains(&GaugeBody::poly(r.clone()), &body).unwrap();
        prop_assert!(ok_in, "inner margin {m_in}");
        let outer = GaugeBody::scaled(GaugeBody::poly(r), lambda * (1.0 + 1e-12)).unwrap();
        let (ok_out, m_out) = ops::contains(&body, &outer).unwrap();
        prop_assert!(ok_out, "outer margin {m_out}");
    }

    #[test]
    fn identity_sandwich_is_one(seed in any::<u64>(), dim in 2usize..=4) {
        let mut src = GaussianSource::new(seed);
        let k = generate::random_symmetric_polytope(dim, dim + 2, &mut src).unwrap();
        let lambda = ops::sandwich_ratio(
            &GaugeBody::poly(k.clone()),
            &GaugeBody::poly(k.clone()),
            &DMatrix::identity(dim, dim),
            &DVector::zeros(dim),
        )
        .unwrap();
        prop_assert!((lambda - 1.0).abs() <= 1e-9);
        let g = GaugeBody::poly(k);
        let (both, margin) = ops::contains(&g, &g).unwrap();
        prop_assert!(both && margin.abs() <= 1e-10);
    }

    #[test]
    fn mvee_contains_points_within_tol(seed in any::<u64>(), dim in 2usize..=4, n in 6usize..=20) {
        prop_assume!(n > dim);
        let mut src = GaussianSource::new(seed);
        let pts: Vec<DVector<f64>> = (0..n).map(|_| src.normal_vector(dim)).collect();
        prop_assume!(VPolytope::flat(pts.clone()).unwrap().affine_rank() == dim);
        let tol = 1e-6;
        let e = metrics::mvee(&pts, tol).unwrap();
        for p in &pts {
            prop_assert!(e.gauge(p) <= 1.0 + tol, "gauge {}", e.gauge(p));
        }
    }

    #[test]
    fn spherical_ratio_scale_invariant(seed in any::<u64>(), s in 0.05f64..20.0) {
        let mut src = GaussianSource::new(seed);
        let p = generate::random_symmetric_polytope(3, 5, &mut src).unwrap();
        let body = GaugeBody::poly(p);
        let scaled = GaugeBody::scaled(body.clone(), s).unwrap();
        let sub = Subspace::full(3);
        let r1 = metrics::spherical_ratio(&body, &sub, 512, seed).unwrap();
        let r2 = metrics::spherical_ratio(&scaled, &sub, 512, seed).unwrap();
        prop_assert!(r1 >= 1.0);
        prop_assert!((r1 - r2).abs() <= 1e-12 * r1);
    }

    #[test]
    fn haar_subspace_always_orthonormal(seed in any::<u64>(), d in 1usize..=8, m in 1usize..=8) {
        prop_assume!(m <= d);
        let s = pipeline::haar_subspace(d, m, seed).unwrap();
        let gram = s.basis() * s.basis().transpose();
        prop_assert!((gram - DMatrix::identity(m, m)).amax() <= 1e-10);
    }

    #[test]
    fn mean_norm_antitone_under_inclusion(seed in any::<u64>(), dim in 2usize..=4) {
        let mut src = GaussianSource::new(seed);
        let k = generate::random_symmetric_polytope(dim, dim + 2, &mut src).unwrap();
        let mut verts = k.vertices().to_vec();
        for _ in 0..2 {
            verts.push(src.unit_vector(dim) * src.uniform_in(1.0, 2.0));
            verts.push(-verts.last().unwrap());
        }
        let bigger = VPolytope::new(verts).unwrap();
        let gk = GaugeBody::poly(k);
        let gb = GaugeBody::poly(bigger);
        // paired sampling: the same directions for both bodies
        for _ in 0..50 {
            let u = src.unit_vector(dim);
            prop_assert!(gk.gauge(&u).unwrap() >= gb.gauge(&u).unwrap() - 1e-12);
        }
    }
}

proptest! {
    // the stability suite is LP-heavy; fewer, larger cases
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lemma3_margins_never_fail_on_valid_instances(seed in any::<u64>(), dim in 2usize..=4) {
        let mut src = GaussianSource::new(seed);
        let t = generate::random_double_cone(dim, &mut src).unwrap();
        let (l, delta) = generate::random_lemma3_instance(&t, &mut src, 3, 0.08, 1.45).unwrap();
        prop_assert!(delta < 1.5);
        let rep = cones::lemma3_verify(&l, &t).unwrap();
        prop_assert!(rep.verdict, "report {rep:?}");
        prop_assert!(rep.inner_margin.unwrap() >= -1e-9);
        prop_assert!(rep.outer_margin.unwrap() >= -1e-9);
    }

    #[test]
    fn recover_center_equivariance(seed in any::<u64>(), dim in 2usize..=4) {
        let mut src = GaussianSource::new(seed);
        let t = generate::random_double_cone(dim, &mut src).unwrap();
        let (l, _) = generate::random_lemma3_instance(&t, &mut src, 2, 0.05, 1.45).unwrap();
        let shift = src.normal_vector(dim);
        let a0 = cones::recover_center(&l, &t).unwrap();
        let a1 = cones::recover_center(&l.translate(&shift).unwrap(), &t).unwrap();
        prop_assert!((a1 - a0 - shift).norm() <= 1e-10);
    }

    #[test]
    fn section_scale_symmetry(delta in 1.0f64..1.49, frac in 0.0f64..=1.0) {
        let lambda = (1.0 - delta) + frac * (2.0 * delta - 1.0);
        let a = cones::section_scale(delta, lambda).unwrap();
        let b = cones::section_scale(delta, 1.0 - lambda).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
        prop_assert!(a >= -1e-12);
    }

    #[test]
    fn slice_identity_holds_for_any_delta(delta in 1.0f64..1.4999) {
        let slices = cones::intersection_identity_slices(delta, 32).unwrap();
        for s in slices {
            prop_assert!(s.discrepancy <= 1e-12);
        }
    }
}

#[test]
fn double_cone_gauge_agrees_with_polytope_gauge() {
    // the cone's LP gauge against the generic polytope-gauge route
    let mut src = GaussianSource::new(2024);
    for dim in 2..=4 {
        let t = generate::random_double_cone(dim, &mut src).unwrap();
        let cone_body = GaugeBody::double_cone(t.clone());
        let poly_body = GaugeBody::poly(t.as_polytope().unwrap());
        for _ in 0..50 {
            let x = src.unit_vector(dim) * src.uniform_in(0.2, 2.0);
            let a = cone_body.gauge(&x).unwrap();
            let b = poly_body.gauge(&x).unwrap();
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}

#[test]
fn mvee_deterministic_for_fixed_input_order() {
    let mut src = GaussianSource::new(99);
    let pts: Vec<DVector<f64>> = (0..12).map(|_| src.normal_vector(3)).collect();
    let a = metrics::mvee(&pts, 1e-7).unwrap();
    let b = metrics::mvee(&pts, 1e-7).unwrap();
    assert_eq!(a.center(), b.center());
    assert_eq!(a.shape(), b.shape());
}

#[test]
fn facet_enum_rejects_oversize_input() {
    let mut src = GaussianSource::new(7);
    let p = generate::random_symmetric_polytope(7, 8, &mut src);
    // dimension 7 exceeds the supported range
    if let Ok(p) = p {
        assert!(matches!(
            metrics::facet_enum(&p),
            Err(convex_sandwich::Error::SizeLimit(_))
        ));
    }
    let t = DoubleCone::b1(2).unwrap();
    let _ = t;
}
