//! Built-in bodies and seeded instance generators for the verification
//! suites.

use nalgebra::{DMatrix, DVector};

use crate::body::VPolytope;
use crate::cones::{self, DoubleCone};
use crate::error::{Error, Result};
use crate::sampling::GaussianSource;

/// `[−1, 1]^d` as a vertex list (d ≤ 16).
pub fn cube(d: usize) -> Result<VPolytope> {
    if d == 0 || d > 16 {
        return Err(Error::InvalidArgument("cube dimension out of range".into()));
    }
    let mut verts = Vec::with_capacity(1 << d);
    for mask in 0u32..(1 << d) {
        verts.push(DVector::from_fn(d, |i, _| {
            if mask & (1 << i) != 0 {
                1.0
            } else {
                -1.0
            }
        }));
    }
    VPolytope::new(verts)
}

/// Cross-polytope `B_1^d` as a vertex list.
pub fn cross_polytope(d: usize) -> Result<VPolytope> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let mut verts = Vec::with_capacity(2 * d);
    for i in 0..d {
        for sign in [1.0, -1.0] {
            let mut v = DVector::zeros(d);
            v[i] = sign;
            verts.push(v);
        }
    }
    VPolytope::new(verts)
}

/// Regular k-gon inscribed in the unit circle, vertex at angle 0.
pub fn regular_ngon(k: usize) -> Result<VPolytope> {
    if k < 3 {
        return Err(Error::InvalidArgument("ngon needs k ≥ 3".into()));
    }
    let verts = (0..k)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / k as f64;
            DVector::from_column_slice(&[a.cos(), a.sin()])
        })
        .collect();
    VPolytope::new(verts)
}

/// Regular simplex with centroid at the origin and circumradius 1,
/// constructed from the Helmert basis of the sum-zero hyperplane.
pub fn centered_simplex(d: usize) -> Result<VPolytope> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let n = d + 1;
    let mut h = DMatrix::zeros(d, n);
    for k in 1..n {
        let norm = (k as f64 * (k + 1) as f64).sqrt();
        for j in 0..k {
            h[(k - 1, j)] = 1.0 / norm;
        }
        h[(k - 1, k)] = -(k as f64) / norm;
    }
    // |H e_i| = sqrt(d/(d+1)); normalize to circumradius 1
    let factor = ((n as f64) / d as f64).sqrt();
    let verts = (0..n)
        .map(|i| {
            let col = h.column(i);
            DVector::from_fn(d, |r, _| col[r] * factor)
        })
        .collect();
    VPolytope::new(verts)
}

/// The canonical `B_1^d` double cone.
pub fn b1_cone(d: usize) -> Result<DoubleCone> {
    DoubleCone::b1(d)
}

/// Quasi-uniform points on `S^2` (Fibonacci lattice).
pub fn fibonacci_sphere(n: usize) -> Vec<DVector<f64>> {
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = std::f64::consts::TAU * (i as f64 / golden).fract();
            DVector::from_column_slice(&[r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

/// Origin-symmetric polytope with `pairs` random ± vertex pairs.
pub fn random_symmetric_polytope(
    d: usize,
    pairs: usize,
    src: &mut GaussianSource,
) -> Result<VPolytope> {
    if pairs < d {
        return Err(Error::InvalidArgument(
            "need at least d vertex pairs for a full-dimensional body".into(),
        ));
    }
    for _ in 0..100 {
        let mut verts = Vec::with_capacity(2 * pairs);
        for _ in 0..pairs {
            let w = src.unit_vector(d) * src.uniform_in(0.6, 1.4);
            verts.push(w.clone());
            verts.push(-w);
        }
        if let Ok(p) = VPolytope::new(verts) {
            return Ok(p);
        }
    }
    Err(Error::Degenerate(
        "failed to sample a full-dimensional symmetric polytope".into(),
    ))
}

/// Non-symmetric polytope that still has the origin in its interior: a
/// symmetric core plus a few extra random vertices.
pub fn random_polytope_with_interior(
    d: usize,
    extra: usize,
    src: &mut GaussianSource,
) -> Result<VPolytope> {
    let core = random_symmetric_polytope(d, d + 1, src)?;
    let mut verts = core.into_vertices();
    for _ in 0..extra {
        verts.push(src.unit_vector(d) * src.uniform_in(0.3, 1.5));
    }
    VPolytope::new(verts)
}

/// Random double cone in `R^m`: symmetric base pairs in the slice plus a
/// tilted apex.
pub fn random_double_cone(m: usize, src: &mut GaussianSource) -> Result<DoubleCone> {
    if m < 2 {
        return Err(Error::InvalidArgument("cones need m ≥ 2".into()));
    }
    let pairs = m.max(3);
    for _ in 0..100 {
        let mut verts = Vec::with_capacity(2 * pairs);
        for _ in 0..pairs {
            let w = src.unit_vector(m - 1) * src.uniform_in(0.5, 1.5);
            let mut v = DVector::zeros(m);
            for i in 0..m - 1 {
                v[i] = w[i];
            }
            verts.push(v.clone());
            verts.push(-v);
        }
        let base = VPolytope::flat(verts)?;
        if base.affine_rank() != m - 1 {
            continue;
        }
        let mut apex = DVector::zeros(m);
        apex[m - 1] = src.uniform_in(0.6, 1.6);
        // small tilt inside the slice keeps the generator general
        let tilt = src.uniform_in(0.0, 0.4);
        if m > 1 {
            let dir = src.unit_vector(m - 1);
            for i in 0..m - 1 {
                apex[i] = tilt * dir[i];
            }
        }
        if let Ok(c) = DoubleCone::new(base, apex) {
            return Ok(c);
        }
    }
    Err(Error::Degenerate("failed to sample a double cone".into()))
}

/// Random point of `conv(vertices)` from exponential weights.
fn random_hull_point(vertices: &[DVector<f64>], src: &mut GaussianSource) -> DVector<f64> {
    let mut weights: Vec<f64> = (0..vertices.len())
        .map(|_| -src.uniform_in(0.0, 1.0).max(1e-12).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut p = DVector::zeros(vertices[0].len());
    for (w, v) in weights.iter().zip(vertices) {
        p += *w * v;
    }
    p
}

/// Stability-suite instance: `L = conv(T/2 ∪ perturbation points)`, rejected
/// and resampled until the measured `δ` stays below `max_delta`. The
/// hypothesis `T ⊆ L − L` holds by construction. Returns `(L, δ)`.
pub fn random_lemma3_instance(
    t: &DoubleCone,
    src: &mut GaussianSource,
    n_perturb: usize,
    noise: f64,
    max_delta: f64,
) -> Result<(VPolytope, f64)> {
    let half = t.as_polytope()?.scale(0.5)?;
    let mut noise = noise;
    for _ in 0..50 {
        let mut verts = half.vertices().to_vec();
        for _ in 0..n_perturb {
            let inside = random_hull_point(half.vertices(), src);
            verts.push(inside + src.normal_vector(t.dim()) * noise);
        }
        let l = VPolytope::new(verts)?;
        let (delta, _) = cones::measure_delta(&l, t)?;
        if delta < max_delta {
            return Ok((l, delta));
        }
        noise *= 0.5;
    }
    // noise annealed away: T/2 itself is always valid at δ = 1
    Ok((half, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_shapes() {
        assert_eq!(cube(3).unwrap().vertices().len(), 8);
        assert_eq!(cross_polytope(4).unwrap().vertices().len(), 8);
        assert_eq!(regular_ngon(64).unwrap().vertices().len(), 64);
        for v in regular_ngon(7).unwrap().vertices() {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn centered_simplex_is_regular() {
        for d in 1..=5 {
            let s = centered_simplex(d).unwrap();
            assert_eq!(s.vertices().len(), d + 1);
            // centroid at the origin, circumradius 1
            let mut c = DVector::zeros(d);
            for v in s.vertices() {
                assert!((v.norm() - 1.0).abs() < 1e-10);
                c += v;
            }
            assert!(c.norm() < 1e-10);
            // all pairwise distances equal
            let d01 = (&s.vertices()[0] - &s.vertices()[1]).norm();
            for i in 0..=d {
                for j in (i + 1)..=d {
                    let dist = (&s.vertices()[i] - &s.vertices()[j]).norm();
                    assert!((dist - d01).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn fibonacci_points_cover_the_sphere() {
        let pts = fibonacci_sphere(64);
        assert_eq!(pts.len(), 64);
        for p in &pts {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
        // crude covering check: every octant sees at least one point
        for sx in [-1.0, 1.0] {
            for sy in [-1.0, 1.0] {
                for sz in [-1.0, 1.0] {
                    assert!(pts
                        .iter()
                        .any(|p| p[0] * sx > 0.0 && p[1] * sy > 0.0 && p[2] * sz > 0.0));
                }
            }
        }
    }

    #[test]
    fn random_generators_have_claimed_invariants() {
        let mut src = GaussianSource::new(13);
        let p = random_symmetric_polytope(3, 5, &mut src).unwrap();
        assert!(p.is_origin_symmetric(1e-9));
        assert!(p.is_full_dimensional());
        let q = random_polytope_with_interior(3, 3, &mut src).unwrap();
        assert!(crate::lp::origin_in_interior(q.vertices()).unwrap());
        let t = random_double_cone(4, &mut src).unwrap();
        assert_eq!(t.dim(), 4);
        assert!(t.as_polytope().unwrap().is_full_dimensional());
    }

    #[test]
    fn lemma3_instances_stay_below_max_delta() {
        let mut src = GaussianSource::new(21);
        let t = DoubleCone::b1(3).unwrap();
        for _ in 0..5 {
            let (l, delta) = random_lemma3_instance(&t, &mut src, 3, 0.08, 1.45).unwrap();
            assert!(delta < 1.45);
            assert!(l.is_full_dimensional());
        }
    }
}
