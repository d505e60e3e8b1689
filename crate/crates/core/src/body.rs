//! Convex body representations and their support / gauge oracles.
//!
//! `VPolytope` is the universal concrete representation (vertex list);
//! `GaugeBody` wraps the bodies we can evaluate exactly: closed forms for the
//! `ℓ_p` balls, vertex-program gauges for polytopal bodies, and composition
//! rules for affine images and dilates.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cones::DoubleCone;
use crate::error::{Error, Result};
use crate::lp;

/// Relative tolerance for affine-rank decisions.
const RANK_TOL: f64 = 1e-10;
/// Orthonormality tolerance for subspace bases.
const ORTHO_TOL: f64 = 1e-10;

pub type Point = DVector<f64>;

pub(crate) fn check_finite(v: &DVector<f64>, what: &str) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("{what} has non-finite entries")));
    }
    Ok(())
}

/// Validates a support-query direction: finite and nonzero.
pub fn check_direction(u: &DVector<f64>) -> Result<()> {
    check_finite(u, "direction")?;
    if u.norm() == 0.0 {
        return Err(Error::InvalidArgument("zero direction".into()));
    }
    Ok(())
}

/// Convex polytope given by a vertex list. The list may contain redundant
/// (non-extreme) points; oracles are hull-correct either way.
#[derive(Debug, Clone, PartialEq)]
pub struct VPolytope {
    dim: usize,
    vertices: Vec<DVector<f64>>,
}

impl VPolytope {
    fn validate_basic(vertices: &[DVector<f64>]) -> Result<usize> {
        let Some(first) = vertices.first() else {
            return Err(Error::InvalidArgument("empty vertex list".into()));
        };
        let dim = first.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("zero-dimensional vertices".into()));
        }
        for v in vertices {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            check_finite(v, "vertex")?;
        }
        Ok(dim)
    }

    /// Convex-body constructor: rejects vertex sets whose affine hull is not
    /// full-dimensional.
    pub fn new(vertices: Vec<DVector<f64>>) -> Result<Self> {
        let dim = Self::validate_basic(&vertices)?;
        let p = Self { dim, vertices };
        if !p.is_full_dimensional() {
            return Err(Error::Degenerate(format!(
                "vertex set spans a {}-dimensional affine hull in R^{}",
                p.affine_rank(),
                dim
            )));
        }
        Ok(p)
    }

    /// Constructor for vertex sets that are allowed to be lower-dimensional
    /// (double-cone bases embedded in a coordinate slice).
    pub fn flat(vertices: Vec<DVector<f64>>) -> Result<Self> {
        let dim = Self::validate_basic(&vertices)?;
        Ok(Self { dim, vertices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<DVector<f64>> {
        self.vertices
    }

    /// Rank of the centered vertex matrix.
    pub fn affine_rank(&self) -> usize {
        if self.vertices.len() < 2 {
            return 0;
        }
        let v0 = &self.vertices[0];
        let m = DMatrix::from_fn(self.vertices.len() - 1, self.dim, |i, j| {
            self.vertices[i + 1][j] - v0[j]
        });
        let svals = m.singular_values();
        let smax = svals.max();
        if smax <= 0.0 {
            return 0;
        }
        svals.iter().filter(|&&s| s > RANK_TOL * smax.max(1.0)).count()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_rank() == self.dim
    }

    pub(crate) fn support_raw(&self, u: &DVector<f64>) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Support function `h(u) = max_i ⟨u, v_i⟩`.
    pub fn support(&self, u: &DVector<f64>) -> Result<f64> {
        check_direction(u)?;
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: u.len(),
            });
        }
        Ok(self.support_raw(u))
    }

    pub fn translate(&self, t: &DVector<f64>) -> Result<Self> {
        if t.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: t.len(),
            });
        }
        check_finite(t, "translation")?;
        Ok(Self {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| v + t).collect(),
        })
    }

    pub fn scale(&self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidArgument("scale must be positive".into()));
        }
        Ok(Self {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| v * s).collect(),
        })
    }

    /// Image under a linear map given by `m` (rows: output coordinates).
    pub fn linear_image(&self, m: &DMatrix<f64>) -> Result<Self> {
        if m.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: m.ncols(),
            });
        }
        Self::flat(self.vertices.iter().map(|v| m * v).collect())
    }

    /// `true` iff the vertex set is closed under negation (within `tol`).
    pub fn is_origin_symmetric(&self, tol: f64) -> bool {
        self.vertices.iter().all(|v| {
            let neg = -v;
            self.vertices.iter().any(|w| (w - &neg).norm() <= tol)
        })
    }
}

/// JSON mirror of `VPolytope`: `{"dim": d, "vertices": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VPolytopeData {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
}

impl From<&VPolytope> for VPolytopeData {
    fn from(p: &VPolytope) -> Self {
        Self {
            dim: p.dim,
            vertices: p.vertices.iter().map(|v| v.iter().copied().collect()).collect(),
        }
    }
}

impl TryFrom<VPolytopeData> for VPolytope {
    type Error = Error;

    fn try_from(d: VPolytopeData) -> Result<Self> {
        let vertices: Vec<DVector<f64>> = d
            .vertices
            .into_iter()
            .map(DVector::from_vec)
            .collect();
        let p = VPolytope::new(vertices)?;
        if p.dim() != d.dim {
            return Err(Error::DimensionMismatch {
                expected: d.dim,
                got: p.dim(),
            });
        }
        Ok(p)
    }
}

/// Intersection of half-spaces `⟨normal, x⟩ ≤ offset`.
#[derive(Debug, Clone)]
pub struct HPolytope {
    facets: Vec<(DVector<f64>, f64)>,
}

impl HPolytope {
    pub fn new(facets: Vec<(DVector<f64>, f64)>) -> Result<Self> {
        if facets.is_empty() {
            return Err(Error::InvalidArgument("empty facet list".into()));
        }
        let dim = facets[0].0.len();
        for (n, c) in &facets {
            if n.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: n.len(),
                });
            }
            check_finite(n, "facet normal")?;
            if !c.is_finite() {
                return Err(Error::InvalidArgument("non-finite facet offset".into()));
            }
            if n.norm() == 0.0 {
                return Err(Error::InvalidArgument("zero facet normal".into()));
            }
        }
        Ok(Self { facets })
    }

    pub fn dim(&self) -> usize {
        self.facets[0].0.len()
    }

    pub fn facets(&self) -> &[(DVector<f64>, f64)] {
        &self.facets
    }

    /// Gauge about the origin: `max_i ⟨n_i, x⟩ / c_i`. Requires every offset
    /// positive (origin interior), checked lazily here.
    pub fn ray_gauge(&self, x: &DVector<f64>) -> Result<f64> {
        self.ray_gauge_about(&DVector::zeros(self.dim()), x)
    }

    /// Gauge of `self − center` at `x − center`.
    pub fn ray_gauge_about(&self, center: &DVector<f64>, x: &DVector<f64>) -> Result<f64> {
        let rel = x - center;
        let mut g = 0.0f64;
        for (n, c) in &self.facets {
            let cc = c - n.dot(center);
            if cc <= 0.0 {
                return Err(Error::Domain(
                    "gauge center not interior to the H-polytope".into(),
                ));
            }
            g = g.max(n.dot(&rel) / cc);
        }
        Ok(g)
    }

    pub fn contains_point(&self, x: &DVector<f64>, tol: f64) -> bool {
        self.facets.iter().all(|(n, c)| n.dot(x) <= c + tol)
    }

    /// Support function via an LP over the facet system.
    pub fn support(&self, u: &DVector<f64>) -> Result<f64> {
        check_direction(u)?;
        let m = self.facets.len();
        let d = self.dim();
        let a = DMatrix::from_fn(m, d, |i, j| self.facets[i].0[j]);
        let b = DVector::from_fn(m, |i, _| self.facets[i].1);
        match lp::max_linear_ineq(&a, &b, u)? {
            lp::MaxResult::Optimal { value, .. } => Ok(value),
            lp::MaxResult::Unbounded => Err(Error::Domain(
                "support unbounded: H-polytope is not bounded in this direction".into(),
            )),
        }
    }

    /// Bounded iff every ± coordinate axis support query is finite.
    pub fn is_bounded(&self) -> Result<bool> {
        let d = self.dim();
        for i in 0..d {
            for sign in [1.0, -1.0] {
                let mut u = DVector::zeros(d);
                u[i] = sign;
                if self.support(&u).is_err() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Linear subspace of `R^d` stored as an orthonormal row basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let m = basis.nrows();
        let d = basis.ncols();
        if m == 0 || m > d {
            return Err(Error::InvalidArgument(format!(
                "subspace dimension {m} out of range 1..={d}"
            )));
        }
        if basis.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite basis entries".into()));
        }
        let gram = &basis * basis.transpose();
        for i in 0..m {
            for j in 0..m {
                let want = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - want).abs() > ORTHO_TOL {
                    return Err(Error::InvalidArgument(
                        "basis rows are not orthonormal".into(),
                    ));
                }
            }
        }
        Ok(Self { basis })
    }

    /// The full space with the identity basis.
    pub fn full(d: usize) -> Self {
        Self {
            basis: DMatrix::identity(d, d),
        }
    }

    /// Coordinate subspace spanned by the first `m` axes.
    pub fn coordinate(d: usize, m: usize) -> Result<Self> {
        let mut basis = DMatrix::zeros(m, d);
        for i in 0..m.min(d) {
            basis[(i, i)] = 1.0;
        }
        Self::new(basis)
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Coordinates of the orthogonal projection of `x`.
    pub fn project_point(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.basis * x
    }

    /// Ambient point for subspace coordinates `w`.
    pub fn lift(&self, w: &DVector<f64>) -> DVector<f64> {
        self.basis.transpose() * w
    }

    /// Subspace of the ambient space corresponding to `inner ⊆ R^{self.dim()}`.
    pub fn compose(&self, inner: &Subspace) -> Result<Subspace> {
        if inner.ambient_dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: inner.ambient_dim(),
            });
        }
        Subspace::new(inner.basis() * self.basis())
    }
}

/// Serializable mirror of `Subspace`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceData {
    pub ambient_dim: usize,
    pub basis: Vec<Vec<f64>>,
}

impl From<&Subspace> for SubspaceData {
    fn from(s: &Subspace) -> Self {
        Self {
            ambient_dim: s.ambient_dim(),
            basis: (0..s.dim())
                .map(|i| s.basis().row(i).iter().copied().collect())
                .collect(),
        }
    }
}

impl TryFrom<SubspaceData> for Subspace {
    type Error = Error;

    fn try_from(d: SubspaceData) -> Result<Self> {
        let m = d.basis.len();
        if m == 0 {
            return Err(Error::InvalidArgument("empty basis".into()));
        }
        let cols = d.ambient_dim;
        for row in &d.basis {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
        }
        let basis = DMatrix::from_fn(m, cols, |i, j| d.basis[i][j]);
        Subspace::new(basis)
    }
}

/// Explicit witness for `L ⊆ T(K − a) ⊆ λL`.
#[derive(Debug, Clone)]
pub struct SandwichCertificate {
    pub map: DMatrix<f64>,
    pub center: DVector<f64>,
    pub ratio: f64,
}

impl SandwichCertificate {
    pub fn new(map: DMatrix<f64>, center: DVector<f64>, ratio: f64) -> Result<Self> {
        if map.nrows() != map.ncols() || map.nrows() != center.len() {
            return Err(Error::DimensionMismatch {
                expected: map.nrows(),
                got: center.len(),
            });
        }
        if map.iter().any(|x| !x.is_finite()) || center.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite certificate data".into()));
        }
        if !(ratio >= 1.0 - 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "sandwich ratio {ratio} below 1"
            )));
        }
        let svals = map.clone().singular_values();
        let smin = svals.min();
        let smax = svals.max();
        if smin <= 0.0 || smax / smin > 1e12 {
            return Err(Error::Degenerate(
                "certificate map is singular or badly conditioned".into(),
            ));
        }
        Ok(Self { map, center, ratio })
    }
}

/// A convex body exposed through exact support and gauge oracles.
#[derive(Debug, Clone)]
pub enum GaugeBody {
    UnitBall(usize),
    CrossPolytope(usize),
    Cube(usize),
    Poly(VPolytope),
    DoubleCone(DoubleCone),
    AffineImage {
        body: Box<GaugeBody>,
        map: DMatrix<f64>,
        shift: DVector<f64>,
    },
    Scaled(Box<GaugeBody>, f64),
}

impl GaugeBody {
    pub fn unit_ball(d: usize) -> Self {
        GaugeBody::UnitBall(d)
    }

    pub fn cross_polytope(d: usize) -> Self {
        GaugeBody::CrossPolytope(d)
    }

    pub fn cube(d: usize) -> Self {
        GaugeBody::Cube(d)
    }

    pub fn poly(p: VPolytope) -> Self {
        GaugeBody::Poly(p)
    }

    pub fn double_cone(c: DoubleCone) -> Self {
        GaugeBody::DoubleCone(c)
    }

    pub fn scaled(body: GaugeBody, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidArgument("scale must be positive".into()));
        }
        Ok(GaugeBody::Scaled(Box::new(body), s))
    }

    /// `map · body + shift` for an invertible `map`.
    pub fn affine_image(body: GaugeBody, map: DMatrix<f64>, shift: DVector<f64>) -> Result<Self> {
        let d = body.dim();
        if map.nrows() != d || map.ncols() != d || shift.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: map.nrows(),
            });
        }
        check_finite(&shift, "affine shift")?;
        if map.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite map entries".into()));
        }
        if map.clone().try_inverse().is_none() {
            return Err(Error::Degenerate("affine image map is singular".into()));
        }
        Ok(GaugeBody::AffineImage {
            body: Box::new(body),
            map,
            shift,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            GaugeBody::UnitBall(d) | GaugeBody::CrossPolytope(d) | GaugeBody::Cube(d) => *d,
            GaugeBody::Poly(p) => p.dim(),
            GaugeBody::DoubleCone(c) => c.dim(),
            GaugeBody::AffineImage { body, .. } => body.dim(),
            GaugeBody::Scaled(body, _) => body.dim(),
        }
    }

    /// Support function `h(u) = sup{⟨u, y⟩ : y ∈ body}`.
    pub fn support(&self, u: &DVector<f64>) -> Result<f64> {
        check_direction(u)?;
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.len(),
            });
        }
        Ok(self.support_unchecked(u))
    }

    fn support_unchecked(&self, u: &DVector<f64>) -> f64 {
        match self {
            GaugeBody::UnitBall(_) => u.norm(),
            GaugeBody::CrossPolytope(_) => u.amax(),
            GaugeBody::Cube(_) => u.iter().map(|x| x.abs()).sum(),
            GaugeBody::Poly(p) => p.support_raw(u),
            GaugeBody::DoubleCone(c) => c.support_raw(u),
            GaugeBody::AffineImage { body, map, shift } => {
                body.support_unchecked(&(map.transpose() * u)) + shift.dot(u)
            }
            GaugeBody::Scaled(body, s) => s * body.support_unchecked(u),
        }
    }

    /// Minkowski gauge `min{t ≥ 0 : x ∈ t · body}`. Requires the origin in
    /// the interior of the body; polytopal variants check lazily through
    /// their feasibility program.
    pub fn gauge(&self, x: &DVector<f64>) -> Result<f64> {
        check_finite(x, "gauge point")?;
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if x.norm() == 0.0 {
            return Ok(0.0);
        }
        match self {
            GaugeBody::UnitBall(_) => Ok(x.norm()),
            GaugeBody::CrossPolytope(_) => Ok(x.iter().map(|v| v.abs()).sum()),
            GaugeBody::Cube(_) => Ok(x.amax()),
            GaugeBody::Poly(p) => lp::polytope_gauge(p.vertices(), x),
            GaugeBody::DoubleCone(c) => lp::polytope_gauge(&c.vertex_list(), x),
            GaugeBody::Scaled(body, s) => Ok(body.gauge(x)? / s),
            GaugeBody::AffineImage { body, map, shift } => {
                if let Some(pts) = self.extreme_points() {
                    let _ = (body, map, shift);
                    lp::polytope_gauge(&pts, x)
                } else {
                    gauge_affine_smooth(body, map, shift, x)
                }
            }
        }
    }

    /// Extreme-point enumeration, when finite. `None` for ball-like bodies.
    pub fn extreme_points(&self) -> Option<Vec<DVector<f64>>> {
        match self {
            GaugeBody::UnitBall(_) => None,
            GaugeBody::CrossPolytope(d) => {
                let mut pts = Vec::with_capacity(2 * d);
                for i in 0..*d {
                    for sign in [1.0, -1.0] {
                        let mut v = DVector::zeros(*d);
                        v[i] = sign;
                        pts.push(v);
                    }
                }
                Some(pts)
            }
            GaugeBody::Cube(d) => {
                if *d > 16 {
                    return None;
                }
                let mut pts = Vec::with_capacity(1 << *d);
                for mask in 0u32..(1 << *d) {
                    let v = DVector::from_fn(*d, |i, _| {
                        if mask & (1 << i) != 0 {
                            1.0
                        } else {
                            -1.0
                        }
                    });
                    pts.push(v);
                }
                Some(pts)
            }
            GaugeBody::Poly(p) => Some(p.vertices().to_vec()),
            GaugeBody::DoubleCone(c) => Some(c.vertex_list()),
            GaugeBody::AffineImage { body, map, shift } => Some(
                body.extreme_points()?
                    .into_iter()
                    .map(|p| map * p + shift)
                    .collect(),
            ),
            GaugeBody::Scaled(body, s) => Some(
                body.extreme_points()?
                    .into_iter()
                    .map(|p| p * *s)
                    .collect(),
            ),
        }
    }

    /// Structural origin-symmetry check (vertex-set check for `Poly`).
    pub fn is_origin_symmetric(&self) -> bool {
        match self {
            GaugeBody::UnitBall(_) | GaugeBody::CrossPolytope(_) | GaugeBody::Cube(_) => true,
            GaugeBody::Poly(p) => p.is_origin_symmetric(1e-9),
            GaugeBody::DoubleCone(_) => true,
            GaugeBody::AffineImage { body, shift, .. } => {
                shift.norm() <= 1e-12 && body.is_origin_symmetric()
            }
            GaugeBody::Scaled(body, _) => body.is_origin_symmetric(),
        }
    }
}

/// Gauge of `map·K + shift` at `x` for a body `K` without extreme-point
/// enumeration. With `w = map⁻¹x`, `b = map⁻¹shift`, the gauge is the least
/// root of the convex function `φ(s) = gauge_K(w − s·b) − s`; `φ` crosses
/// zero before `gauge_K(w) / (1 − gauge_K(−b))`, so bisection on that
/// bracket converges.
fn gauge_affine_smooth(
    body: &GaugeBody,
    map: &DMatrix<f64>,
    shift: &DVector<f64>,
    x: &DVector<f64>,
) -> Result<f64> {
    let inv = map
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("affine image map is singular".into()))?;
    let w = &inv * x;
    let b = &inv * shift;
    let g_negb = body.gauge(&(-&b))?;
    if g_negb >= 1.0 - 1e-12 {
        return Err(Error::Domain(
            "origin not interior to the affine image".into(),
        ));
    }
    let g_w = body.gauge(&w)?;
    if g_w == 0.0 {
        return Ok(0.0);
    }
    let phi = |s: f64| -> Result<f64> { Ok(body.gauge(&(&w - &b * s))? - s) };
    let mut lo = 0.0;
    let mut hi = g_w / (1.0 - g_negb);
    debug_assert!(phi(hi)? <= 1e-9 * hi.max(1.0));
    for _ in 0..200 {
        if hi - lo <= 1e-14 * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if phi(mid)? <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
