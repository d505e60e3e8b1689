//! Constructions and decisions on convex bodies: polar bodies, difference
//! bodies, projections, exact containment, and fixed-map sandwich ratios.

use nalgebra::{DMatrix, DVector};

use crate::body::{GaugeBody, HPolytope, Subspace, VPolytope};
use crate::error::{Error, Result};
use crate::lp;
use crate::metrics;

/// Polar body `P* = {x : ⟨x, v⟩ ≤ 1 for every vertex v}`. Requires the
/// origin interior to `P`, otherwise the polar is unbounded.
pub fn polar(p: &VPolytope) -> Result<HPolytope> {
    if !lp::origin_in_interior(p.vertices())? {
        return Err(Error::Domain(
            "polar undefined: origin not interior (polar would be unbounded)".into(),
        ));
    }
    // a vertex at the origin contributes the vacuous constraint ⟨0, x⟩ ≤ 1
    HPolytope::new(
        p.vertices()
            .iter()
            .filter(|v| v.norm() > 0.0)
            .map(|v| (v.clone(), 1.0))
            .collect(),
    )
}

/// Difference body `P − P` as a vertex list: all pairwise vertex differences
/// reduced to the extreme points of their hull. The reduction is exact: a
/// candidate is kept iff it is a vertex of the hull (monotone chain in the
/// plane, unique-maximizer fast path plus an LP membership test otherwise).
pub fn difference_body(p: &VPolytope) -> Result<VPolytope> {
    let verts = p.vertices();
    let mut candidates: Vec<DVector<f64>> = Vec::with_capacity(verts.len() * verts.len());
    for a in verts {
        for b in verts {
            candidates.push(a - b);
        }
    }
    let kept = extreme_point_filter(candidates)?;
    VPolytope::flat(kept)
}

/// Reduces a point cloud to the vertex set of its convex hull.
pub(crate) fn extreme_point_filter(points: Vec<DVector<f64>>) -> Result<Vec<DVector<f64>>> {
    let dim = points[0].len();
    let scale = points
        .iter()
        .map(|p| p.amax())
        .fold(0.0f64, f64::max)
        .max(1.0);
    // exact-duplicate collapse
    let mut unique: Vec<DVector<f64>> = Vec::with_capacity(points.len());
    for p in points {
        if !unique.iter().any(|q| (q - &p).amax() <= 1e-13 * scale) {
            unique.push(p);
        }
    }
    if unique.len() <= 1 {
        return Ok(unique);
    }
    if dim == 2 {
        return Ok(hull_2d(unique, scale));
    }
    let mut keep = vec![true; unique.len()];
    for i in 0..unique.len() {
        let p = &unique[i];
        // unique own-direction maximizer is always a vertex
        let own = p.dot(p);
        let best_other = unique
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, q)| p.dot(q))
            .fold(f64::NEG_INFINITY, f64::max);
        if own > best_other + 1e-9 * scale * scale {
            continue;
        }
        let others: Vec<DVector<f64>> = unique
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, q)| q.clone())
            .collect();
        if lp::in_convex_hull(&others, p)? {
            keep[i] = false;
        }
    }
    Ok(unique
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect())
}

/// Andrew's monotone chain with strict turns, so collinear interior points
/// drop out along with interior ones.
fn hull_2d(mut pts: Vec<DVector<f64>>, scale: f64) -> Vec<DVector<f64>> {
    let eps = 1e-12 * scale * scale;
    pts.sort_by(|a, b| {
        a[0].partial_cmp(&b[0])
            .unwrap()
            .then(a[1].partial_cmp(&b[1]).unwrap())
    });
    let cross = |o: &DVector<f64>, a: &DVector<f64>, b: &DVector<f64>| -> f64 {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<DVector<f64>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2
            && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= eps
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<DVector<f64>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= eps
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Orthogonal projection onto `s`, expressed in subspace coordinates:
/// vertices `basis · v`, so `h_{proj}(w) = h_P(basisᵀ w)`.
pub fn project(p: &VPolytope, s: &Subspace) -> Result<VPolytope> {
    if s.ambient_dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: s.ambient_dim(),
        });
    }
    VPolytope::new(p.vertices().iter().map(|v| s.project_point(v)).collect())
}

/// Exact containment `inner ⊆ outer`, decided over the extreme points of
/// `inner` against the gauge of `outer`. The margin is `1 − max gauge`
/// (dimensionless; positive means strict containment). Containment holds at
/// tolerance `margin ≥ −1e-9`.
pub fn contains(inner: &GaugeBody, outer: &GaugeBody) -> Result<(bool, f64)> {
    if inner.dim() != outer.dim() {
        return Err(Error::DimensionMismatch {
            expected: outer.dim(),
            got: inner.dim(),
        });
    }
    let Some(points) = inner.extreme_points() else {
        return Err(Error::UnsupportedPair(
            "inner body has no finite extreme-point enumeration (use the ellipsoid metrics)".into(),
        ));
    };
    let mut worst = 0.0f64;
    for pt in &points {
        if pt.norm() == 0.0 {
            continue;
        }
        match outer.gauge(pt) {
            Ok(g) => worst = worst.max(g),
            // outside the outer's support cone: definitely not contained
            Err(Error::Domain(_)) => return Ok((false, f64::NEG_INFINITY)),
            Err(e) => return Err(e),
        }
    }
    let margin = 1.0 - worst;
    Ok((margin >= -1e-9, margin))
}

fn ball_radius(r: &GaugeBody) -> Option<f64> {
    match r {
        GaugeBody::UnitBall(_) => Some(1.0),
        GaugeBody::Scaled(inner, s) => ball_radius(inner).map(|r| r * s),
        _ => None,
    }
}

/// Smallest `λ` with `R ⊆ c·T(K − a) ⊆ λ·c·R` over positive rescalings `c`,
/// i.e. (outer scale) / (inner scale) of the fixed-position sandwich. `R`
/// must be origin-symmetric; returns `+∞` when `T(K − a)` misses the origin
/// so no rescaling works.
pub fn sandwich_ratio(
    k: &GaugeBody,
    r: &GaugeBody,
    map: &DMatrix<f64>,
    center: &DVector<f64>,
) -> Result<f64> {
    let d = k.dim();
    if r.dim() != d || map.nrows() != d || map.ncols() != d || center.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: r.dim(),
        });
    }
    if map.clone().try_inverse().is_none() {
        return Err(Error::Degenerate("sandwich map is singular".into()));
    }
    if !r.is_origin_symmetric() {
        return Err(Error::Precondition(
            "reference body R must be origin-symmetric".into(),
        ));
    }
    let Some(k_points) = k.extreme_points() else {
        return Err(Error::UnsupportedPair(
            "K needs an extreme-point enumeration".into(),
        ));
    };
    let transformed: Vec<DVector<f64>> =
        k_points.iter().map(|p| map * (p - center)).collect();
    if !lp::in_convex_hull(&transformed, &DVector::zeros(d))? {
        return Ok(f64::INFINITY);
    }
    // outer scale: smallest s with T(K−a) ⊆ sR
    let mut outer = 0.0f64;
    for pt in &transformed {
        if pt.norm() == 0.0 {
            continue;
        }
        match r.gauge(pt) {
            Ok(g) => outer = outer.max(g),
            Err(Error::Domain(_)) => return Ok(f64::INFINITY),
            Err(e) => return Err(e),
        }
    }
    // inner scale: largest t with tR ⊆ T(K−a)
    let inner = if let Some(r_points) = r.extreme_points() {
        let mut g = 0.0f64;
        for pt in &r_points {
            if pt.norm() == 0.0 {
                continue;
            }
            match lp::polytope_gauge(&transformed, pt) {
                Ok(v) => g = g.max(v),
                Err(Error::Domain(_)) => return Ok(f64::INFINITY),
                Err(e) => return Err(e),
            }
        }
        if g <= 1e-15 {
            return Err(Error::Degenerate("reference body collapses to a point".into()));
        }
        1.0 / g
    } else if let Some(radius) = ball_radius(r) {
        let image = VPolytope::flat(transformed.clone())?;
        let hull = metrics::facet_hull(image.vertices())?;
        let inradius = metrics::inradius_about_origin(&hull)?;
        inradius / radius
    } else {
        return Err(Error::UnsupportedPair(
            "R needs an extreme-point enumeration or a closed-form ball gauge".into(),
        ));
    };
    if !(inner > 0.0) {
        return Ok(f64::INFINITY);
    }
    Ok((outer / inner).max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::check_direction;
    use crate::sampling::GaussianSource;
    use nalgebra::dvector;

    fn vpoly(data: &[&[f64]]) -> VPolytope {
        VPolytope::new(data.iter().map(|r| DVector::from_column_slice(r)).collect()).unwrap()
    }

    fn cross2() -> VPolytope {
        vpoly(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]])
    }

    fn square2() -> VPolytope {
        vpoly(&[&[1.0, 1.0], &[-1.0, 1.0], &[-1.0, -1.0], &[1.0, -1.0]])
    }

    #[test]
    fn polar_swaps_cross_and_cube() {
        // (B_1)* = B_∞
        let h = polar(&cross2()).unwrap();
        assert_eq!(h.facets().len(), 4);
        let cube = GaugeBody::cube(2);
        let mut src = GaussianSource::new(5);
        for _ in 0..50 {
            let u = src.unit_vector(2);
            let lhs = h.ray_gauge(&u).unwrap();
            let rhs = cube.gauge(&u).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
        // (B_∞)* = B_1
        let h2 = polar(&square2()).unwrap();
        let cross = GaugeBody::cross_polytope(2);
        for _ in 0..50 {
            let u = src.unit_vector(2);
            assert!((h2.ray_gauge(&u).unwrap() - cross.gauge(&u).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn polar_gauge_duality_sampled() {
        // gauge_{P*}(u) = h_P(u) on 100 sampled directions
        let p = vpoly(&[&[-1.0, -1.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let h = polar(&p).unwrap();
        assert_eq!(h.facets().len(), 3);
        assert!(h.is_bounded().unwrap());
        let mut src = GaussianSource::new(7);
        for _ in 0..100 {
            let u = src.unit_vector(2);
            let lhs = h.ray_gauge(&u).unwrap();
            let rhs = p.support(&u).unwrap();
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn polar_requires_interior_origin() {
        let shifted = vpoly(&[&[1.0, 1.0], &[2.0, 1.0], &[1.0, 2.0]]);
        assert!(polar(&shifted).is_err());
    }

    #[test]
    fn difference_of_symmetric_body_is_double() {
        // K − K = 2K for symmetric K
        let d = difference_body(&cross2()).unwrap();
        assert_eq!(d.vertices().len(), 4);
        let mut src = GaussianSource::new(11);
        for _ in 0..50 {
            let u = src.unit_vector(2);
            let lhs = d.support(&u).unwrap();
            let rhs = 2.0 * cross2().support(&u).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn difference_of_triangle_is_hexagon() {
        // brute force over all 9 pairwise differences reduces to the hexagon
        let tri = vpoly(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let d = difference_body(&tri).unwrap();
        let expected = [
            dvector![1.0, 0.0],
            dvector![-1.0, 0.0],
            dvector![0.0, 1.0],
            dvector![0.0, -1.0],
            dvector![1.0, -1.0],
            dvector![-1.0, 1.0],
        ];
        assert_eq!(d.vertices().len(), 6);
        for e in &expected {
            assert!(
                d.vertices().iter().any(|v| (v - e).norm() < 1e-12),
                "missing vertex {e:?}"
            );
        }
    }

    #[test]
    fn difference_support_identity() {
        // h_{P−P}(u) = h_P(u) + h_P(−u), algebraic identity
        let p = vpoly(&[&[0.2, 0.0], &[1.0, 0.3], &[-0.4, 1.1], &[-0.9, -0.7], &[0.5, -1.0]]);
        let d = difference_body(&p).unwrap();
        let mut src = GaussianSource::new(13);
        for _ in 0..100 {
            let u = src.unit_vector(2);
            let lhs = d.support(&u).unwrap();
            let rhs = p.support(&u).unwrap() + p.support(&(-&u)).unwrap();
            assert!((lhs - rhs).abs() < 1e-12, "dev {}", (lhs - rhs).abs());
        }
    }

    #[test]
    fn difference_in_three_dims_uses_lp_filter() {
        // B_1^3 − B_1^3 = 2·B_1^3: edge midpoints like e_i + e_j must drop out
        let cross3 = vpoly(&[
            &[1.0, 0.0, 0.0],
            &[-1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, -1.0, 0.0],
            &[0.0, 0.0, 1.0],
            &[0.0, 0.0, -1.0],
        ]);
        let d = difference_body(&cross3).unwrap();
        assert_eq!(d.vertices().len(), 6);
        for v in d.vertices() {
            assert!((v.amax() - 2.0).abs() < 1e-12);
        }
        let mut src = GaussianSource::new(17);
        for _ in 0..50 {
            let u = src.unit_vector(3);
            let lhs = d.support(&u).unwrap();
            let rhs = cross3.support(&u).unwrap() + cross3.support(&(-&u)).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn project_cube_to_square() {
        let cube3 = vpoly(&[
            &[1.0, 1.0, 1.0],
            &[1.0, 1.0, -1.0],
            &[1.0, -1.0, 1.0],
            &[1.0, -1.0, -1.0],
            &[-1.0, 1.0, 1.0],
            &[-1.0, 1.0, -1.0],
            &[-1.0, -1.0, 1.0],
            &[-1.0, -1.0, -1.0],
        ]);
        let s = Subspace::coordinate(3, 2).unwrap();
        let q = project(&cube3, &s).unwrap();
        let mut src = GaussianSource::new(19);
        for _ in 0..50 {
            let w = src.unit_vector(2);
            let h = q.support(&w).unwrap();
            let expect = w[0].abs() + w[1].abs();
            assert!((h - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn project_identity_keeps_vertices() {
        let p = cross2();
        let s = Subspace::full(2);
        let q = project(&p, &s).unwrap();
        assert_eq!(p.vertices(), q.vertices());
    }

    #[test]
    fn project_support_identity_on_tilted_plane() {
        let cross3 = vpoly(&[
            &[1.0, 0.0, 0.0],
            &[-1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, -1.0, 0.0],
            &[0.0, 0.0, 1.0],
            &[0.0, 0.0, -1.0],
        ]);
        // fixed tilted orthonormal basis
        let r3 = (3.0f64).sqrt().recip();
        let r6 = (6.0f64).sqrt().recip();
        let basis = DMatrix::from_row_slice(2, 3, &[r3, r3, r3, 2.0 * r6, -r6, -r6]);
        let s = Subspace::new(basis).unwrap();
        let q = project(&cross3, &s).unwrap();
        let mut src = GaussianSource::new(23);
        for _ in 0..100 {
            let w = src.unit_vector(2);
            let lhs = q.support(&w).unwrap();
            let rhs = cross3.support(&s.lift(&w)).unwrap();
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn contains_examples() {
        // B_1 ⊆ B_∞ touching
        let (ok, margin) = contains(&GaugeBody::cross_polytope(2), &GaugeBody::cube(2)).unwrap();
        assert!(ok);
        assert!(margin.abs() < 1e-12);
        // B_∞ ⊆ 2·B_1 touching at the corners
        let outer = GaugeBody::scaled(GaugeBody::cross_polytope(2), 2.0).unwrap();
        let (ok, margin) = contains(&GaugeBody::cube(2), &outer).unwrap();
        assert!(ok);
        assert!(margin.abs() < 1e-12);
        // 1.01·B_1 ⊄ B_1
        let inner = GaugeBody::scaled(GaugeBody::cross_polytope(2), 1.01).unwrap();
        let outer = GaugeBody::poly(cross2());
        let (ok, margin) = contains(&inner, &outer).unwrap();
        assert!(!ok);
        assert!((margin + 0.01).abs() < 1e-9, "margin {margin}");
    }

    #[test]
    fn contains_rejects_ball_inner_against_poly() {
        let r = contains(&GaugeBody::unit_ball(2), &GaugeBody::poly(square2()));
        assert!(matches!(r, Err(Error::UnsupportedPair(_))));
    }

    #[test]
    fn contains_transitivity_smoke() {
        let a = GaugeBody::cross_polytope(2);
        let b = GaugeBody::cube(2);
        let c = GaugeBody::scaled(GaugeBody::cross_polytope(2), 2.0).unwrap();
        let (ab, _) = contains(&a, &b).unwrap();
        let (bc, _) = contains(&b, &c).unwrap();
        let (ac, _) = contains(&a, &c).unwrap();
        assert!(ab && bc && ac);
    }

    #[test]
    fn sandwich_cube_against_ball_is_sqrt2() {
        let lambda = sandwich_ratio(
            &GaugeBody::cube(2),
            &GaugeBody::unit_ball(2),
            &DMatrix::identity(2, 2),
            &dvector![0.0, 0.0],
        )
        .unwrap();
        assert!((lambda - 2.0f64.sqrt()).abs() < 1e-9, "lambda {lambda}");
    }

    #[test]
    fn sandwich_identity_case() {
        let k = GaugeBody::poly(cross2());
        let lambda = sandwich_ratio(
            &k,
            &GaugeBody::cross_polytope(2),
            &DMatrix::identity(2, 2),
            &dvector![0.0, 0.0],
        )
        .unwrap();
        assert!((lambda - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sandwich_hexagon_against_cross_matches_brute_force() {
        let hexagon = vpoly(&[
            &[1.0, 0.0],
            &[-1.0, 0.0],
            &[0.0, 1.0],
            &[0.0, -1.0],
            &[1.0, -1.0],
            &[-1.0, 1.0],
        ]);
        let lambda = sandwich_ratio(
            &GaugeBody::poly(hexagon.clone()),
            &GaugeBody::cross_polytope(2),
            &DMatrix::identity(2, 2),
            &dvector![0.0, 0.0],
        )
        .unwrap();
        // brute force both directions with the closed-form ℓ1 gauge:
        // outer = max ‖v‖₁ over hexagon vertices, inner via hexagon gauge of ±e_i
        let outer = hexagon
            .vertices()
            .iter()
            .map(|v| v.iter().map(|x| x.abs()).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        let mut g = 0.0f64;
        for pt in GaugeBody::cross_polytope(2).extreme_points().unwrap() {
            g = g.max(lp::polytope_gauge(hexagon.vertices(), &pt).unwrap());
        }
        let brute = outer * g;
        assert!(lambda >= 1.0);
        assert!((lambda - brute).abs() < 1e-9);
        assert!((lambda - 2.0).abs() < 1e-9, "hexagon fits 2·B_1 tightly");
    }

    #[test]
    fn sandwich_degenerate_position_is_infinite() {
        let far = vpoly(&[&[9.0, 9.0], &[11.0, 9.0], &[9.0, 11.0]]);
        let lambda = sandwich_ratio(
            &GaugeBody::poly(far),
            &GaugeBody::unit_ball(2),
            &DMatrix::identity(2, 2),
            &dvector![0.0, 0.0],
        )
        .unwrap();
        assert!(lambda.is_infinite());
    }

    #[test]
    fn sandwich_rejects_asymmetric_reference() {
        let tri = vpoly(&[&[-1.0, -1.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let r = sandwich_ratio(
            &GaugeBody::cube(2),
            &GaugeBody::poly(tri),
            &DMatrix::identity(2, 2),
            &dvector![0.0, 0.0],
        );
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn support_direction_validation() {
        let p = cross2();
        assert!(check_direction(&dvector![0.0, 0.0]).is_err());
        assert!(p.support(&dvector![f64::NAN, 1.0]).is_err());
    }
}
