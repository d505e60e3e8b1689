//! The constructive reduction pipeline: spherical mean-norm estimates, the
//! polarity/difference-body bound chain, Haar subspace search, and the
//! symmetrize-then-recover procedure that converts a symmetric-case witness
//! into a certificate for the original body.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::body::{GaugeBody, Subspace, SubspaceData, VPolytope};
use crate::cones::{self, DoubleCone};
use crate::error::{Error, Result};
use crate::lp;
use crate::metrics;
use crate::ops;
use crate::sampling::{self, GaussianSource};

/// Monte Carlo estimate of the spherical mean of a gauge.
#[derive(Debug, Clone, Serialize)]
pub struct MeanNormEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
    /// `1 / mean`, the radius of the typical near-spherical section.
    pub radius: f64,
}

/// Spherical mean of `gauge(body, ·)` over uniform unit directions.
/// Deterministic for a fixed seed, independent of the worker pool.
pub fn mean_norm(body: &GaugeBody, n_samples: usize, seed: u64) -> Result<MeanNormEstimate> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be positive".into()));
    }
    let d = body.dim();
    let partials = sampling::chunked(n_samples, seed, |_ci, src, len| -> Result<(f64, f64)> {
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..len {
            let u = src.unit_vector(d);
            let g = body.gauge(&u)?;
            sum += g;
            sumsq += g * g;
        }
        Ok((sum, sumsq))
    });
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for p in partials {
        let (s, ss) = p?;
        sum += s;
        sumsq += ss;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = if n_samples > 1 {
        ((sumsq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let std_error = (var / n).sqrt();
    Ok(MeanNormEstimate {
        mean,
        std_error,
        n_samples,
        seed,
        radius: 1.0 / mean,
    })
}

/// Outcome of the bound chain `M(L*) = ½∮(h_L(u) + h_L(−u)) ≥ 1/(2δ)`.
#[derive(Debug, Clone, Serialize)]
pub struct Eq2Report {
    /// Measured `1 / inradius(L − L)` under the `L − L ⊆ B_2` normalization.
    pub delta: f64,
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub lower_bound: f64,
    /// Worst pointwise deviation `|gauge_{L*}(u) − h_L(u)|`.
    pub max_dev_polarity: f64,
    /// Worst pointwise deviation `|½(h_L(u)+h_L(−u)) − ½h_{L−L}(u)|`.
    pub max_dev_difference: f64,
    pub links_pass: bool,
    pub mean_pass: bool,
    pub pass: bool,
}

/// Verifies the three links of the spherical-mean lower bound on shared
/// samples: (a) polar gauge equals support, (b) the symmetrized support
/// equals half the difference-body support, (c) the sampled mean clears
/// `1/(2δ)` within three standard errors. Requires the normalization
/// `(1/δ)B_2 ⊆ L − L ⊆ B_2` with `δ ≤ 1 + alpha`, and the origin interior
/// to `L`. Directions are drawn in antithetic `±u` pairs, which makes the
/// mean estimate exactly translation-invariant.
pub fn eq2_chain_check(
    l: &VPolytope,
    alpha: f64,
    n_samples: usize,
    seed: u64,
) -> Result<Eq2Report> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidArgument("alpha must be nonnegative".into()));
    }
    if n_samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    let d = l.dim();
    let diff = ops::difference_body(l)?;
    let circum = diff.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max);
    if circum > 1.0 + 1e-9 {
        return Err(Error::Precondition(format!(
            "normalization violated: L − L reaches norm {circum:.6} > 1"
        )));
    }
    let facets = metrics::facet_hull(diff.vertices())?;
    let inradius = metrics::inradius_about_origin(&facets)?;
    if inradius <= 0.0 {
        return Err(Error::Degenerate("L − L has empty interior".into()));
    }
    let delta = 1.0 / inradius;
    if delta > 1.0 + alpha + 1e-9 {
        return Err(Error::Precondition(format!(
            "measured delta {delta:.6} exceeds 1 + alpha = {:.6}",
            1.0 + alpha
        )));
    }
    if !lp::origin_in_interior(l.vertices())? {
        return Err(Error::Precondition(
            "origin must be interior to L for the polar link".into(),
        ));
    }
    let polar_l = ops::polar(l)?;
    let n_pairs = n_samples.div_ceil(2);
    let partials = sampling::chunked(
        n_pairs,
        seed,
        |_ci, src, len| -> Result<(f64, f64, f64, f64)> {
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            let mut dev_a = 0.0f64;
            let mut dev_b = 0.0f64;
            for _ in 0..len {
                let u = src.unit_vector(d);
                let nu = -&u;
                let h_u = l.support(&u)?;
                let h_nu = l.support(&nu)?;
                let g_u = polar_l.ray_gauge(&u)?;
                let g_nu = polar_l.ray_gauge(&nu)?;
                dev_a = dev_a.max((g_u - h_u).abs()).max((g_nu - h_nu).abs());
                let pair = 0.5 * (h_u + h_nu);
                let half_diff = 0.5 * diff.support(&u)?;
                dev_b = dev_b.max((pair - half_diff).abs());
                sum += pair;
                sumsq += pair * pair;
            }
            Ok((sum, sumsq, dev_a, dev_b))
        },
    );
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let mut dev_a = 0.0f64;
    let mut dev_b = 0.0f64;
    for p in partials {
        let (s, ss, da, db) = p?;
        sum += s;
        sumsq += ss;
        dev_a = dev_a.max(da);
        dev_b = dev_b.max(db);
    }
    let n = n_pairs as f64;
    let mean = sum / n;
    let var = ((sumsq - n * mean * mean) / (n - 1.0).max(1.0)).max(0.0);
    let std_error = (var / n).sqrt();
    let lower_bound = 1.0 / (2.0 * delta);
    let links_pass = dev_a <= 1e-9 && dev_b <= 1e-9;
    let mean_pass = mean >= lower_bound - 3.0 * std_error;
    Ok(Eq2Report {
        delta,
        mean,
        std_error,
        n_samples: 2 * n_pairs,
        lower_bound,
        max_dev_polarity: dev_a,
        max_dev_difference: dev_b,
        links_pass,
        mean_pass,
        pass: links_pass && mean_pass,
    })
}

/// Haar-distributed `m`-dimensional subspace of `R^d`: orthonormalized
/// Gaussian rows. Bit-identical for a fixed seed.
pub fn haar_subspace(d: usize, m: usize, seed: u64) -> Result<Subspace> {
    if m == 0 || m > d {
        return Err(Error::InvalidArgument(format!(
            "subspace dimension {m} out of range 1..={d}"
        )));
    }
    let mut src = GaussianSource::new(seed);
    let mut rows: Vec<DVector<f64>> = Vec::with_capacity(m);
    while rows.len() < m {
        let mut v = src.normal_vector(d);
        // modified Gram–Schmidt, twice for orthogonality at 1e-10 scale
        for _ in 0..2 {
            for r in &rows {
                let c = r.dot(&v);
                v -= c * r;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            rows.push(v / norm);
        }
    }
    let basis = DMatrix::from_fn(m, d, |i, j| rows[i][j]);
    Subspace::new(basis)
}

/// Draws Haar subspaces, scores each by the sampled spherical ratio of the
/// projected body (`h_L(basisᵀu)`), and returns the best. The ratio is an
/// upper-bound certificate for that subspace, not a claim of optimality.
pub fn near_ball_projection_search(
    l: &VPolytope,
    m: usize,
    trials: usize,
    n_samples: usize,
    seed: u64,
) -> Result<(Subspace, f64)> {
    if m == 0 || m >= l.dim() {
        return Err(Error::InvalidArgument(format!(
            "projection dimension {m} must lie in 1..{}",
            l.dim()
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be ≥ 1".into()));
    }
    let body = GaugeBody::poly(l.clone());
    let d = l.dim();
    let scored: Vec<Result<(Subspace, f64)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let sub = haar_subspace(d, m, sampling::derive_seed(seed, 2 * t as u64))?;
            let ratio = metrics::spherical_ratio(
                &body,
                &sub,
                n_samples,
                sampling::derive_seed(seed, 2 * t as u64 + 1),
            )?;
            Ok((sub, ratio))
        })
        .collect();
    let mut best: Option<(Subspace, f64)> = None;
    for s in scored {
        let (sub, ratio) = s?;
        let better = match &best {
            None => true,
            Some((_, br)) => ratio < *br,
        };
        if better {
            best = Some((sub, ratio));
        }
    }
    Ok(best.expect("trials ≥ 1"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseTag {
    Ball,
    CrossPolytope,
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CaseTag::Ball => write!(f, "ball"),
            CaseTag::CrossPolytope => write!(f, "cross-polytope"),
        }
    }
}

/// Symmetric-case witness: the subspace where `K − K` is close to the
/// reference body, with the linear map that normalizes the projected
/// difference body so the reference sandwich uses the identity.
#[derive(Debug, Clone)]
pub struct ReductionWitness {
    pub subspace: Subspace,
    pub case_tag: CaseTag,
    pub normalizing_map: DMatrix<f64>,
}

/// Serializable mirror of `ReductionWitness`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReductionWitnessData {
    pub subspace: SubspaceData,
    pub case_tag: CaseTag,
    pub normalizing_map: Vec<Vec<f64>>,
}

impl From<&ReductionWitness> for ReductionWitnessData {
    fn from(w: &ReductionWitness) -> Self {
        Self {
            subspace: SubspaceData::from(&w.subspace),
            case_tag: w.case_tag,
            normalizing_map: (0..w.normalizing_map.nrows())
                .map(|i| w.normalizing_map.row(i).iter().copied().collect())
                .collect(),
        }
    }
}

impl TryFrom<ReductionWitnessData> for ReductionWitness {
    type Error = Error;

    fn try_from(d: ReductionWitnessData) -> Result<Self> {
        let subspace = Subspace::try_from(d.subspace)?;
        let m = subspace.dim();
        if d.normalizing_map.len() != m || d.normalizing_map.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: d.normalizing_map.len(),
            });
        }
        let map = DMatrix::from_fn(m, m, |i, j| d.normalizing_map[i][j]);
        if map.clone().try_inverse().is_none() {
            return Err(Error::Degenerate("normalizing map is singular".into()));
        }
        Ok(Self {
            subspace,
            case_tag: d.case_tag,
            normalizing_map: map,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ReductionParams {
    /// Witness quality: case (i) requires `δ ≤ 1 + alpha` for the projected
    /// difference body.
    pub alpha: f64,
    /// Haar trials for the sub-subspace search in case (i).
    pub trials: usize,
    /// Sample budget per Monte Carlo stage.
    pub n_samples: usize,
    /// Case (i) sub-projection dimension; default `max(1, m/2)`.
    pub sub_dim: Option<usize>,
    pub seed: u64,
}

impl Default for ReductionParams {
    fn default() -> Self {
        Self {
            alpha: 0.2,
            trials: 64,
            n_samples: 1024,
            sub_dim: None,
            seed: 42,
        }
    }
}

/// Certified outcome of the reduction: the subspace, the recovered center
/// (in the normalized projection frame mapped back through the witness),
/// and the sandwich ratio against the case's reference body.
#[derive(Debug, Clone)]
pub struct ReductionOutcome {
    pub subspace: Subspace,
    pub center: DVector<f64>,
    pub lambda: f64,
    pub case_tag: CaseTag,
}

/// Serializable mirror of `ReductionOutcome`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReductionOutcomeData {
    pub subspace: SubspaceData,
    pub center: Vec<f64>,
    pub lambda: f64,
    pub case_tag: CaseTag,
}

impl From<&ReductionOutcome> for ReductionOutcomeData {
    fn from(o: &ReductionOutcome) -> Self {
        Self {
            subspace: SubspaceData::from(&o.subspace),
            center: o.center.iter().copied().collect(),
            lambda: o.lambda,
            case_tag: o.case_tag,
        }
    }
}

/// Ball-case witness for a coordinate-free subspace: whitens the projected
/// difference body by its MVEE and rescales it into the unit ball.
pub fn make_ball_witness(k: &VPolytope, subspace: Subspace) -> Result<ReductionWitness> {
    let diff = ops::difference_body(k)?;
    let proj = ops::project(&diff, &subspace)?;
    let reduced = ops::extreme_point_filter(proj.vertices().to_vec())?;
    let e = metrics::mvee(&reduced, 1e-7)?;
    let w = e.whitening();
    let rho = reduced
        .iter()
        .map(|v| (&w * v).norm())
        .fold(0.0f64, f64::max);
    if rho <= 0.0 {
        return Err(Error::Degenerate("projected difference body collapsed".into()));
    }
    Ok(ReductionWitness {
        subspace,
        case_tag: CaseTag::Ball,
        normalizing_map: w / rho,
    })
}

/// Cross-polytope-case witness with an identity normalizing map (for bodies
/// already positioned against `B_1^m`).
pub fn make_cross_witness(k: &VPolytope, subspace: Subspace) -> Result<ReductionWitness> {
    if subspace.ambient_dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: subspace.ambient_dim(),
        });
    }
    let m = subspace.dim();
    Ok(ReductionWitness {
        subspace,
        case_tag: CaseTag::CrossPolytope,
        normalizing_map: DMatrix::identity(m, m),
    })
}

fn orthonormalize_rows(m: &DMatrix<f64>) -> Result<Subspace> {
    let mut rows: Vec<DVector<f64>> = Vec::with_capacity(m.nrows());
    for i in 0..m.nrows() {
        let mut v: DVector<f64> = m.row(i).transpose();
        for _ in 0..2 {
            for r in &rows {
                let c = r.dot(&v);
                v -= c * r;
            }
        }
        let norm = v.norm();
        if norm <= 1e-10 {
            return Err(Error::Degenerate("row set is rank deficient".into()));
        }
        rows.push(v / norm);
    }
    Subspace::new(DMatrix::from_fn(rows.len(), m.ncols(), |i, j| rows[i][j]))
}

/// Applies the symmetric-case witness to a non-symmetric body: forms
/// `D = K − K`, re-validates the witness against the projected difference
/// body, and converts the symmetric conclusion into a certificate for the
/// projection of `K` itself. Case ball runs the bound chain and a
/// sub-subspace search (dimension drops); case cross-polytope recovers the
/// center and converts the stability margins into
/// `λ = (δ − 1/2)/(3/2 − δ)` at the same dimension.
pub fn reduce_nonsymmetric(
    k: &VPolytope,
    witness: &ReductionWitness,
    params: &ReductionParams,
) -> Result<ReductionOutcome> {
    let d = k.dim();
    let h = &witness.subspace;
    if h.ambient_dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: h.ambient_dim(),
        });
    }
    let m = h.dim();
    let n = &witness.normalizing_map;
    if n.nrows() != m || n.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: n.nrows(),
        });
    }
    let n_inv = n
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("normalizing map is singular".into()))?;
    let diff = ops::difference_body(k)?;
    let diff_h = ops::project(&diff, h)?;
    let diff_n = VPolytope::new(
        diff_h
            .vertices()
            .iter()
            .map(|v| n * v)
            .collect(),
    )?;
    let l_norm = VPolytope::new(
        ops::project(k, h)?
            .vertices()
            .iter()
            .map(|v| n * v)
            .collect(),
    )?;
    match witness.case_tag {
        CaseTag::Ball => {
            // witness validation: (1/(1+α))B_2 ⊆ N(P_H(D)) ⊆ B_2
            let reduced = ops::extreme_point_filter(diff_n.vertices().to_vec())?;
            let circum = reduced.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if circum > 1.0 + 1e-9 {
                return Err(Error::Precondition(format!(
                    "witness invalid: normalized difference body reaches norm {circum:.6}"
                )));
            }
            let hull = metrics::facet_hull(&reduced)?;
            let inradius = metrics::inradius_about_origin(&hull)?;
            if inradius <= 0.0 {
                return Err(Error::Degenerate("projected difference body flat".into()));
            }
            let delta = 1.0 / inradius;
            if delta > 1.0 + params.alpha + 1e-9 {
                return Err(Error::Precondition(format!(
                    "witness invalid: measured delta {delta:.6} exceeds 1 + alpha"
                )));
            }
            // position L with the origin interior (MVEE center), then chain-check
            let e = metrics::mvee(l_norm.vertices(), 1e-7)?;
            let shift = e.center().clone();
            let l_pos = l_norm.translate(&(-&shift))?;
            let chain = eq2_chain_check(
                &l_pos,
                params.alpha,
                params.n_samples.max(1000),
                sampling::derive_seed(params.seed, 1),
            )?;
            if !chain.pass {
                return Err(Error::Precondition(format!(
                    "bound chain failed: mean {:.6} vs bound {:.6} (links {})",
                    chain.mean, chain.lower_bound, chain.links_pass
                )));
            }
            let sub_dim = params.sub_dim.unwrap_or((m / 2).max(1));
            let (f_sub, _score) = near_ball_projection_search(
                &l_pos,
                sub_dim,
                params.trials,
                params.n_samples,
                sampling::derive_seed(params.seed, 2),
            )?;
            let projected = ops::project(&l_pos, &f_sub)?;
            let (lambda, cert) = metrics::ball_distance(&projected)?;
            // re-verify the certificate containments exactly
            let mapped: Vec<DVector<f64>> = projected
                .vertices()
                .iter()
                .map(|v| &cert.map * (v - &cert.center))
                .collect();
            let mhull = metrics::facet_hull(&mapped)?;
            let inr = metrics::inradius_about_origin(&mhull)?;
            let max_norm = mapped.iter().map(|q| q.norm()).fold(0.0, f64::max);
            if inr < 1.0 - 1e-8 || max_norm > lambda * (1.0 + 1e-8) {
                return Err(Error::Degenerate(
                    "ball certificate failed re-verification".into(),
                ));
            }
            // fold the pipeline maps into an ambient subspace: rows of
            // F·N·H span the reported subspace; the certificate transfers
            // through the invertible in-subspace factor.
            let composed = f_sub.basis() * n * h.basis();
            let out_sub = orthonormalize_rows(&composed)?;
            let a_fact = &composed * out_sub.basis().transpose();
            let a_inv = a_fact
                .try_inverse()
                .ok_or_else(|| Error::Degenerate("composed map singular".into()))?;
            let center = &a_inv * (f_sub.project_point(&shift) + &cert.center);
            Ok(ReductionOutcome {
                subspace: out_sub,
                center,
                lambda,
                case_tag: CaseTag::Ball,
            })
        }
        CaseTag::CrossPolytope => {
            let t = DoubleCone::b1(m)?;
            let rep = cones::lemma3_verify(&l_norm, &t).map_err(|e| match e {
                Error::HypothesisViolated(msg) => {
                    Error::Precondition(format!("witness invalid: {msg}"))
                }
                other => other,
            })?;
            if rep.delta >= 1.5 {
                return Err(Error::Precondition(format!(
                    "witness invalid: measured delta {:.6} ≥ 3/2",
                    rep.delta
                )));
            }
            if !rep.verdict {
                return Err(Error::Degenerate(format!(
                    "stability containments failed: margins {:?} {:?}",
                    rep.inner_margin, rep.outer_margin
                )));
            }
            let lambda = ((rep.delta - 0.5) / (1.5 - rep.delta)).max(1.0);
            let a = DVector::from_column_slice(&rep.center);
            let _ = &diff_n;
            Ok(ReductionOutcome {
                subspace: h.clone(),
                center: &n_inv * a,
                lambda,
                case_tag: CaseTag::CrossPolytope,
            })
        }
    }
}

/// Report for the projection/section polarity duality.
#[derive(Debug, Clone, Serialize)]
pub struct PolarityReport {
    pub max_dev: f64,
    pub n_samples: usize,
    pub pass: bool,
}

/// Verifies `(P_S K)° = K° ∩ S` inside `S` on sampled directions: the gauge
/// of the polar of the projection, the support of the projection, and the
/// ray gauge of the section of `K°` must agree (three code paths, one
/// number). Passes at `1e-8`.
pub fn polarity_corollary_check(
    k: &VPolytope,
    s: &Subspace,
    n_samples: usize,
    seed: u64,
) -> Result<PolarityReport> {
    if s.ambient_dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: s.ambient_dim(),
        });
    }
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be positive".into()));
    }
    if !lp::origin_in_interior(k.vertices())? {
        return Err(Error::Precondition(
            "origin must be interior to K".into(),
        ));
    }
    let m = s.dim();
    let proj = ops::project(k, s)?;
    let polar_proj = ops::polar(&proj)?;
    let polar_k = ops::polar(k)?;
    let partials = sampling::chunked(n_samples, seed, |_ci, src, len| -> Result<f64> {
        let mut dev = 0.0f64;
        for _ in 0..len {
            let w = src.unit_vector(m);
            let g1 = polar_proj.ray_gauge(&w)?;
            let g2 = proj.support(&w)?;
            let x = s.lift(&w);
            let g3 = polar_k.ray_gauge(&x)?;
            dev = dev
                .max((g1 - g2).abs())
                .max((g1 - g3).abs())
                .max((g2 - g3).abs());
        }
        Ok(dev)
    });
    let mut max_dev = 0.0f64;
    for p in partials {
        max_dev = max_dev.max(p?);
    }
    Ok(PolarityReport {
        max_dev,
        n_samples,
        pass: max_dev <= 1e-8,
    })
}
