//! Double cones and the stability of their irreducibility: the intersection
//! identity `δT ∩ (δT + e) = e/2 + (δ − 1/2)T`, center recovery from a
//! difference pair, and the full containment verifier
//! `(3/2 − δ)T ⊆ L − a ⊆ (δ − 1/2)T`.

use nalgebra::DVector;
use serde::Serialize;

use crate::body::{GaugeBody, HPolytope, VPolytope};
use crate::error::{Error, Result};
use crate::lp;
use crate::metrics;
use crate::ops;

/// Containment tolerance for verdicts, in gauge units.
pub const MARGIN_TOL: f64 = 1e-9;

/// `conv(base ∪ {±apex})` where the origin-symmetric base spans the
/// coordinate slice `x_m = 0` and the apex leaves it.
#[derive(Debug, Clone)]
pub struct DoubleCone {
    base: VPolytope,
    apex: DVector<f64>,
}

impl DoubleCone {
    pub fn new(base: VPolytope, apex: DVector<f64>) -> Result<Self> {
        let m = base.dim();
        if m < 2 {
            return Err(Error::InvalidArgument(
                "double cones need ambient dimension ≥ 2".into(),
            ));
        }
        if apex.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: apex.len(),
            });
        }
        let slice_tol = 1e-12;
        for v in base.vertices() {
            if v[m - 1].abs() > slice_tol {
                return Err(Error::InvalidArgument(
                    "base vertices must lie in the coordinate slice x_m = 0".into(),
                ));
            }
        }
        if !base.is_origin_symmetric(1e-9) {
            return Err(Error::InvalidArgument(
                "base vertex set must be closed under negation".into(),
            ));
        }
        if base.affine_rank() != m - 1 {
            return Err(Error::Degenerate(
                "base must span the (m−1)-dimensional slice".into(),
            ));
        }
        if apex[m - 1].abs() <= 1e-9 {
            return Err(Error::InvalidArgument(
                "apex needs a nonzero component orthogonal to the base slice".into(),
            ));
        }
        Ok(Self { base, apex })
    }

    /// The canonical cross-polytope `B_1^m`: base `±e_1..±e_{m−1}`, apex `e_m`.
    pub fn b1(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument("b1 cone needs m ≥ 2".into()));
        }
        let mut verts = Vec::with_capacity(2 * (m - 1));
        for i in 0..m - 1 {
            for sign in [1.0, -1.0] {
                let mut v = DVector::zeros(m);
                v[i] = sign;
                verts.push(v);
            }
        }
        let mut apex = DVector::zeros(m);
        apex[m - 1] = 1.0;
        DoubleCone::new(VPolytope::flat(verts)?, apex)
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn base(&self) -> &VPolytope {
        &self.base
    }

    pub fn apex(&self) -> &DVector<f64> {
        &self.apex
    }

    /// Base vertices plus `±apex`.
    pub fn vertex_list(&self) -> Vec<DVector<f64>> {
        let mut v = self.base.vertices().to_vec();
        v.push(self.apex.clone());
        v.push(-&self.apex);
        v
    }

    pub fn as_polytope(&self) -> Result<VPolytope> {
        VPolytope::new(self.vertex_list())
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Ok(Self {
            base: self.base.scale(s)?,
            apex: &self.apex * s,
        })
    }

    pub(crate) fn support_raw(&self, u: &DVector<f64>) -> f64 {
        self.base.support_raw(u).max(self.apex.dot(u).abs())
    }
}

/// `T_1`-scale of the slice of `δT ∩ (δT + e)` at height `λ` along the apex:
/// `δ − max{|λ|, |λ−1|}`.
pub fn section_scale(delta: f64, lambda: f64) -> Result<f64> {
    if !(delta.is_finite() && delta >= 1.0) {
        return Err(Error::InvalidArgument(format!("delta {delta} must be ≥ 1")));
    }
    if !(lambda >= 1.0 - delta - 1e-12 && lambda <= delta + 1e-12) {
        return Err(Error::EmptySection(format!(
            "lambda {lambda} outside [{}, {delta}]",
            1.0 - delta
        )));
    }
    Ok(delta - lambda.abs().max((lambda - 1.0).abs()))
}

/// One grid point of the slice identity: both sides of the intersection
/// formula, reduced to their `T_1`-scales.
#[derive(Debug, Clone, Serialize)]
pub struct SliceCheck {
    pub lambda: f64,
    pub lhs_scale: f64,
    pub rhs_scale: f64,
    pub discrepancy: f64,
}

/// Evaluates the slice identity on a uniform grid over `[1 − δ, δ]`: the
/// left side is the intersection slice, the right side the slice of
/// `e/2 + (δ − 1/2)T`; both reduce to `δ − max{|λ|, |λ−1|}`.
pub fn intersection_identity_slices(delta: f64, grid_size: usize) -> Result<Vec<SliceCheck>> {
    if !(1.0..1.5).contains(&delta) {
        return Err(Error::InvalidArgument(format!(
            "delta {delta} must lie in [1, 3/2)"
        )));
    }
    if grid_size < 8 {
        return Err(Error::InvalidArgument("grid_size must be ≥ 8".into()));
    }
    let lo = 1.0 - delta;
    let hi = delta;
    let mut out = Vec::with_capacity(grid_size);
    for k in 0..grid_size {
        let lambda = lo + (hi - lo) * k as f64 / (grid_size - 1) as f64;
        let lhs = section_scale(delta, lambda)?;
        let rhs = (delta - 0.5) - (lambda - 0.5).abs();
        out.push(SliceCheck {
            lambda,
            lhs_scale: lhs,
            rhs_scale: rhs,
            discrepancy: (lhs - rhs).abs(),
        });
    }
    Ok(out)
}

/// Set-level margins for `δT ∩ (δT + e) = e/2 + (δ − 1/2)T`, both ways, in
/// gauge units: (intersection ⊆ rhs, rhs ⊆ intersection). Dimension ≤ 4.
pub fn intersection_identity_set_margins(t: &DoubleCone, delta: f64) -> Result<(f64, f64)> {
    if t.dim() > 4 {
        return Err(Error::SizeLimit(
            "set-level identity check supports dimension ≤ 4".into(),
        ));
    }
    let apex = t.apex().clone();
    let scaled: Vec<DVector<f64>> = t.vertex_list().iter().map(|v| v * delta).collect();
    let facets = metrics::facet_hull(&scaled)?;
    let mut combined = Vec::with_capacity(2 * facets.len());
    for (n, c) in &facets {
        combined.push((n.clone(), *c));
    }
    for (n, c) in &facets {
        combined.push((n.clone(), c + n.dot(&apex)));
    }
    let lhs = HPolytope::new(combined)?;
    let lhs_vertices = metrics::vertex_enum(&lhs)?;
    let center = &apex * 0.5;
    let rhs_scale = delta - 0.5;
    let rhs_vertices: Vec<DVector<f64>> = t
        .vertex_list()
        .iter()
        .map(|v| &center + v * rhs_scale)
        .collect();
    // intersection ⊆ e/2 + (δ−1/2)T via the cone's gauge about e/2
    let cone_scaled: Vec<DVector<f64>> = t.vertex_list().iter().map(|v| v * rhs_scale).collect();
    let mut worst = 0.0f64;
    for x in &lhs_vertices {
        let g = lp::polytope_gauge(&cone_scaled, &(x - &center))?;
        worst = worst.max(g);
    }
    let lhs_in_rhs = 1.0 - worst;
    // e/2 + (δ−1/2)T ⊆ intersection via the H-polytope gauge about e/2
    let mut worst = 0.0f64;
    for x in &rhs_vertices {
        let g = lhs.ray_gauge_about(&center, x)?;
        worst = worst.max(g);
    }
    let rhs_in_lhs = 1.0 - worst;
    Ok((lhs_in_rhs, rhs_in_lhs))
}

/// Full identity check: exact slice algebra on the grid, plus set-level
/// extreme-point containment both ways when the dimension allows it.
pub fn intersection_identity_check(t: &DoubleCone, delta: f64, grid_size: usize) -> Result<bool> {
    let slices = intersection_identity_slices(delta, grid_size)?;
    let algebra_ok = slices.iter().all(|s| s.discrepancy <= 1e-12);
    if t.dim() > 4 {
        return Ok(algebra_ok);
    }
    let (a, b) = intersection_identity_set_margins(t, delta)?;
    Ok(algebra_ok && a >= -MARGIN_TOL && b >= -MARGIN_TOL)
}

/// Finds `l1, l2 ∈ L` with `l1 − l2 = apex(T)` through a feasibility program
/// over vertex weights and returns the midpoint `(l1 + l2) / 2`, the center
/// the stability proof translates to. Any feasible pair is valid; the
/// simplex tie-breaking (Bland) picks one deterministically.
pub fn recover_center(l: &VPolytope, t: &DoubleCone) -> Result<DVector<f64>> {
    recover_center_for_apex(l, t.apex())
}

pub(crate) fn recover_center_for_apex(l: &VPolytope, apex: &DVector<f64>) -> Result<DVector<f64>> {
    let d = l.dim();
    if apex.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: apex.len(),
        });
    }
    let n = l.vertices().len();
    // rows: V λ − V μ = e, 1ᵀλ = 1, 1ᵀμ = 1
    let mut a = nalgebra::DMatrix::zeros(d + 2, 2 * n);
    for (j, v) in l.vertices().iter().enumerate() {
        for i in 0..d {
            a[(i, j)] = v[i];
            a[(i, n + j)] = -v[i];
        }
        a[(d, j)] = 1.0;
        a[(d + 1, n + j)] = 1.0;
    }
    let mut b = DVector::zeros(d + 2);
    b.rows_mut(0, d).copy_from(apex);
    b[d] = 1.0;
    b[d + 1] = 1.0;
    let sol = lp::solve(&a, &b, &DVector::zeros(2 * n))?;
    if sol.status != lp::LpStatus::Optimal {
        return Err(Error::Precondition(
            "apex is not expressible as a difference of points of L".into(),
        ));
    }
    let mut l1 = DVector::zeros(d);
    let mut l2 = DVector::zeros(d);
    for (j, v) in l.vertices().iter().enumerate() {
        l1 += sol.x[j] * v;
        l2 += sol.x[n + j] * v;
    }
    Ok((l1 + l2) * 0.5)
}

/// Verification record for the double-cone stability containments.
#[derive(Debug, Clone, Serialize)]
pub struct Lemma3Report {
    pub delta: f64,
    pub center: Vec<f64>,
    /// Margin of `(3/2 − δ)T ⊆ L − a`; `None` when `δ ≥ 3/2`.
    pub inner_margin: Option<f64>,
    /// Margin of `L − a ⊆ (δ − 1/2)T`; `None` when `δ ≥ 3/2`.
    pub outer_margin: Option<f64>,
    pub verdict: bool,
}

/// Measured sandwich scale of `L − L` against `T` at fixed position:
/// `(outer scale) / (inner scale)` with the identity map, where the inner
/// scale is the largest `t` with `tT ⊆ L − L`. Also returns the inner scale.
pub fn measure_delta(l: &VPolytope, t: &DoubleCone) -> Result<(f64, f64)> {
    let diff = ops::difference_body(l)?;
    measure_delta_of_difference(&diff, t)
}

fn measure_delta_of_difference(diff: &VPolytope, t: &DoubleCone) -> Result<(f64, f64)> {
    let cone_verts = t.vertex_list();
    let mut g_inner = 0.0f64;
    for v in &cone_verts {
        g_inner = g_inner.max(lp::polytope_gauge(diff.vertices(), v)?);
    }
    if g_inner <= 1e-15 {
        return Err(Error::Degenerate("cone collapses to a point".into()));
    }
    let mut s_outer = 0.0f64;
    for p in diff.vertices() {
        if p.norm() == 0.0 {
            continue;
        }
        s_outer = s_outer.max(lp::polytope_gauge(&cone_verts, p)?);
    }
    let t_star = 1.0 / g_inner;
    Ok(((s_outer / t_star).max(1.0), t_star))
}

/// Checks the hypothesis `T ⊆ L − L ⊆ δT`, measures `δ`, recovers the
/// center, and verifies `(3/2 − δ)T ⊆ L − a ⊆ (δ − 1/2)T`. The containments
/// are checked against the inner-normalized cone `t*·T` (the dilate of `T`
/// that makes the inner inclusion tight), which is the position the
/// measured `δ` refers to.
pub fn lemma3_verify(l: &VPolytope, t: &DoubleCone) -> Result<Lemma3Report> {
    if l.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            got: l.dim(),
        });
    }
    if !l.is_full_dimensional() {
        return Err(Error::Precondition("L must be full-dimensional".into()));
    }
    let diff = ops::difference_body(l)?;
    let (hyp_ok, hyp_margin) = ops::contains(
        &GaugeBody::double_cone(t.clone()),
        &GaugeBody::poly(diff.clone()),
    )?;
    if !hyp_ok {
        return Err(Error::HypothesisViolated(format!(
            "T ⊄ L − L (margin {hyp_margin:.3e})"
        )));
    }
    let (delta, t_star) = measure_delta_of_difference(&diff, t)?;
    let t_eff = t.scaled(t_star)?;
    let center = recover_center(l, &t_eff)?;
    if delta >= 1.5 {
        return Ok(Lemma3Report {
            delta,
            center: center.iter().copied().collect(),
            inner_margin: None,
            outer_margin: None,
            verdict: false,
        });
    }
    let shifted = GaugeBody::poly(l.translate(&(-&center))?);
    let inner_body = GaugeBody::scaled(GaugeBody::double_cone(t_eff.clone()), 1.5 - delta)?;
    let outer_body = GaugeBody::scaled(GaugeBody::double_cone(t_eff), delta - 0.5)?;
    let (_, inner_margin) = ops::contains(&inner_body, &shifted)?;
    let (_, outer_margin) = ops::contains(&shifted, &outer_body)?;
    let verdict = inner_margin >= -MARGIN_TOL && outer_margin >= -MARGIN_TOL;
    Ok(Lemma3Report {
        delta,
        center: center.iter().copied().collect(),
        inner_margin: Some(inner_margin),
        outer_margin: Some(outer_margin),
        verdict,
    })
}
