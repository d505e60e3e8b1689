//! Dense two-phase simplex for the small LPs behind polytope oracles.
//!
//! Problems here are tiny (≤ ~10 equality rows, up to a few thousand
//! columns), so a dense tableau with Bland's rule is enough: deterministic,
//! anti-cycling, no external solver.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Reduced-cost / feasibility tolerance.
const EPS: f64 = 1e-9;
/// Smallest acceptable pivot magnitude.
const PIVOT_MIN: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal solution (all zeros unless `status == Optimal`).
    pub x: DVector<f64>,
    pub value: f64,
}

struct Tableau {
    m: usize,
    /// row-major (m+1) x (n + m + 1); artificials live at n..n+m
    t: Vec<f64>,
    basis: Vec<usize>,
    active: Vec<bool>,
    width: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * self.width + c]
    }

    #[inline]
    fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.t[r * self.width + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width - 1)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let p = self.at(row, col);
        let inv = 1.0 / p;
        for c in 0..w {
            self.t[row * w + c] *= inv;
        }
        self.t[row * w + col] = 1.0;
        for r in 0..=self.m {
            if r == row {
                continue;
            }
            let f = self.at(r, col);
            if f == 0.0 {
                continue;
            }
            for c in 0..w {
                let v = self.at(row, c);
                self.t[r * w + c] -= f * v;
            }
            self.t[r * w + col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Bland's rule iteration over the allowed column range. Returns Ok(true)
    /// when optimal, Ok(false) when unbounded.
    fn iterate(&mut self, allowed_cols: usize) -> Result<bool> {
        let max_iters = 200 * (self.m + allowed_cols + 10);
        for _ in 0..max_iters {
            // entering: smallest index with negative reduced cost
            let mut enter = None;
            for j in 0..allowed_cols {
                if self.at(self.m, j) < -EPS {
                    enter = Some(j);
                    break;
                }
            }
            let Some(enter) = enter else {
                return Ok(true);
            };
            // leaving: min ratio, ties broken by smallest basis variable
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m {
                if !self.active[r] {
                    continue;
                }
                let a = self.at(r, enter);
                if a > PIVOT_MIN {
                    let ratio = self.rhs(r) / a;
                    match leave {
                        None => leave = Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio - 1e-12
                                || ((ratio - bratio).abs() <= 1e-12
                                    && self.basis[r] < self.basis[br])
                            {
                                leave = Some((r, ratio));
                            }
                        }
                    }
                }
            }
            let Some((row, _)) = leave else {
                return Ok(false);
            };
            self.pivot(row, enter);
        }
        Err(Error::Lp("simplex iteration limit exceeded".into()))
    }
}

/// Minimize `c^T x` subject to `A x = b`, `x >= 0`.
pub fn solve(a: &DMatrix<f64>, b: &DVector<f64>, c: &DVector<f64>) -> Result<LpSolution> {
    let m = a.nrows();
    let n = a.ncols();
    if b.len() != m || c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: m.max(n),
            got: b.len().min(c.len()),
        });
    }
    let width = n + m + 1;
    let mut tab = Tableau {
        m,
        t: vec![0.0; (m + 1) * width],
        basis: (n..n + m).collect(),
        active: vec![true; m],
        width,
    };
    // constraint rows, flipped so rhs >= 0, with artificial identity block
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            *tab.at_mut(i, j) = sign * a[(i, j)];
        }
        *tab.at_mut(i, n + i) = 1.0;
        *tab.at_mut(i, width - 1) = sign * b[i];
    }
    // phase 1: minimize the artificial sum; priced-out objective row
    for j in 0..width {
        let mut s = 0.0;
        for i in 0..m {
            s += tab.at(i, j);
        }
        *tab.at_mut(m, j) = -s;
    }
    for i in 0..m {
        *tab.at_mut(m, n + i) = 0.0;
    }
    tab.iterate(n)?;
    let infeas = -tab.rhs(m);
    if infeas > EPS {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            x: DVector::zeros(n),
            value: 0.0,
        });
    }
    // drive artificials out of the basis; rows that cannot pivot are redundant
    for r in 0..m {
        if tab.basis[r] >= n {
            let mut col = None;
            for j in 0..n {
                if tab.at(r, j).abs() > 1e-7 {
                    col = Some(j);
                    break;
                }
            }
            match col {
                Some(j) => tab.pivot(r, j),
                None => tab.active[r] = false,
            }
        }
    }
    // phase 2 objective, priced out against the current basis
    for j in 0..width {
        *tab.at_mut(m, j) = 0.0;
    }
    for j in 0..n {
        *tab.at_mut(m, j) = c[j];
    }
    for r in 0..m {
        if !tab.active[r] {
            continue;
        }
        let bj = tab.basis[r];
        if bj < n {
            let f = tab.at(m, bj);
            if f != 0.0 {
                for jj in 0..width {
                    let v = tab.at(r, jj);
                    *tab.at_mut(m, jj) -= f * v;
                }
                *tab.at_mut(m, bj) = 0.0;
            }
        }
    }
    let optimal = tab.iterate(n)?;
    if !optimal {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: DVector::zeros(n),
            value: f64::NEG_INFINITY,
        });
    }
    let mut x = DVector::zeros(n);
    for r in 0..m {
        if tab.active[r] && tab.basis[r] < n {
            x[tab.basis[r]] = tab.rhs(r).max(0.0);
        }
    }
    let value = c.dot(&x);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        value,
    })
}

fn vertex_matrix(vertices: &[DVector<f64>]) -> DMatrix<f64> {
    let d = vertices[0].len();
    let n = vertices.len();
    DMatrix::from_fn(d, n, |i, j| vertices[j][i])
}

/// Gauge of `conv(vertices)` at `x`: min Σλ s.t. Σ λ_i v_i = x, λ ≥ 0.
///
/// Errors with `Domain` when `x` is not in the cone spanned by the hull,
/// which is how a missing-interior origin surfaces for polytopal bodies.
pub fn polytope_gauge(vertices: &[DVector<f64>], x: &DVector<f64>) -> Result<f64> {
    let v = vertex_matrix(vertices);
    if v.nrows() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: v.nrows(),
            got: x.len(),
        });
    }
    let c = DVector::from_element(vertices.len(), 1.0);
    let sol = solve(&v, x, &c)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.value.max(0.0)),
        LpStatus::Infeasible => Err(Error::Domain(
            "gauge undefined: point outside the hull's support cone (origin not interior)".into(),
        )),
        LpStatus::Unbounded => Err(Error::Lp("gauge program unbounded".into())),
    }
}

/// Membership `x ∈ conv(vertices)` as a pure feasibility program.
pub fn in_convex_hull(vertices: &[DVector<f64>], x: &DVector<f64>) -> Result<bool> {
    let d = x.len();
    let n = vertices.len();
    let mut a = DMatrix::zeros(d + 1, n);
    for j in 0..n {
        for i in 0..d {
            a[(i, j)] = vertices[j][i];
        }
        a[(d, j)] = 1.0;
    }
    let mut b = DVector::zeros(d + 1);
    b.rows_mut(0, d).copy_from(x);
    b[d] = 1.0;
    let sol = solve(&a, &b, &DVector::zeros(n))?;
    Ok(sol.status == LpStatus::Optimal)
}

/// Depth of the origin inside `conv(vertices)`: the largest `t` such that the
/// origin is a convex combination with every weight ≥ `t`. `None` when the
/// origin is not in the hull at all; `Some(t) > 0` iff it is in the relative
/// interior (interior, for full-dimensional hulls).
pub fn origin_depth(vertices: &[DVector<f64>]) -> Result<Option<f64>> {
    let d = vertices[0].len();
    let n = vertices.len();
    // weights λ = μ + t·1 with μ ≥ 0, t ≥ 0: V μ + t (V 1) = 0, 1ᵀμ + n t = 1
    let mut a = DMatrix::zeros(d + 1, n + 1);
    for j in 0..n {
        for i in 0..d {
            a[(i, j)] = vertices[j][i];
        }
        a[(d, j)] = 1.0;
    }
    for i in 0..d {
        let mut s = 0.0;
        for v in vertices {
            s += v[i];
        }
        a[(i, n)] = s;
    }
    a[(d, n)] = n as f64;
    let mut b = DVector::zeros(d + 1);
    b[d] = 1.0;
    let mut c = DVector::zeros(n + 1);
    c[n] = -1.0;
    let sol = solve(&a, &b, &c)?;
    match sol.status {
        LpStatus::Optimal => Ok(Some(-sol.value)),
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(Error::Lp("origin-depth program unbounded".into())),
    }
}

/// `true` iff the origin lies strictly inside `conv(vertices)`.
pub fn origin_in_interior(vertices: &[DVector<f64>]) -> Result<bool> {
    Ok(matches!(origin_depth(vertices)?, Some(t) if t > 1e-10))
}

#[derive(Debug, Clone)]
pub enum MaxResult {
    Optimal { x: DVector<f64>, value: f64 },
    Unbounded,
}

/// Maximize `c^T x` over `A x ≤ b` with `x` free.
pub fn max_linear_ineq(
    a_ub: &DMatrix<f64>,
    b_ub: &DVector<f64>,
    c: &DVector<f64>,
) -> Result<MaxResult> {
    let m = a_ub.nrows();
    let d = a_ub.ncols();
    // x = p - q with p,q ≥ 0, plus slacks
    let n = 2 * d + m;
    let mut a = DMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..d {
            a[(i, j)] = a_ub[(i, j)];
            a[(i, d + j)] = -a_ub[(i, j)];
        }
        a[(i, 2 * d + i)] = 1.0;
    }
    let mut obj = DVector::zeros(n);
    for j in 0..d {
        obj[j] = -c[j];
        obj[d + j] = c[j];
    }
    let sol = solve(&a, b_ub, &obj)?;
    match sol.status {
        LpStatus::Optimal => {
            let x = DVector::from_fn(d, |j, _| sol.x[j] - sol.x[d + j]);
            Ok(MaxResult::Optimal {
                x,
                value: -sol.value,
            })
        }
        LpStatus::Unbounded => Ok(MaxResult::Unbounded),
        LpStatus::Infeasible => Err(Error::Lp("inequality system infeasible".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn vecs(data: &[&[f64]]) -> Vec<DVector<f64>> {
        data.iter()
            .map(|r| DVector::from_column_slice(r))
            .collect()
    }

    #[test]
    fn simple_equality_lp() {
        // min -x - y s.t. x + y = 1, x,y >= 0 → value -1
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let sol = solve(&a, &dvector![1.0], &dvector![-1.0, -1.0]).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_detected() {
        // x = 1 and x = 2 simultaneously
        let a = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let sol = solve(&a, &dvector![1.0, 2.0], &dvector![0.0]).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn redundant_rows_tolerated() {
        // duplicated constraint row
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let sol = solve(&a, &dvector![1.0, 1.0], &dvector![1.0, 2.0]).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gauge_of_square() {
        let square = vecs(&[&[1.0, 1.0], &[-1.0, 1.0], &[-1.0, -1.0], &[1.0, -1.0]]);
        let g = polytope_gauge(&square, &dvector![2.0, 0.0]).unwrap();
        assert!((g - 2.0).abs() < 1e-9);
        let g0 = polytope_gauge(&square, &dvector![0.0, 0.0]).unwrap();
        assert!(g0.abs() < 1e-12);
    }

    #[test]
    fn gauge_outside_cone_errors() {
        // hull = single point away from origin: cone misses (0,1)
        let pts = vecs(&[&[1.0, 0.0]]);
        assert!(polytope_gauge(&pts, &dvector![0.0, 1.0]).is_err());
    }

    #[test]
    fn hull_membership() {
        let tri = vecs(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert!(in_convex_hull(&tri, &dvector![0.25, 0.25]).unwrap());
        assert!(!in_convex_hull(&tri, &dvector![0.8, 0.8]).unwrap());
    }

    #[test]
    fn origin_depth_square() {
        let square = vecs(&[&[1.0, 1.0], &[-1.0, 1.0], &[-1.0, -1.0], &[1.0, -1.0]]);
        let t = origin_depth(&square).unwrap().unwrap();
        assert!((t - 0.25).abs() < 1e-9);
        assert!(origin_in_interior(&square).unwrap());

        let shifted = vecs(&[&[1.0, 1.0], &[2.0, 1.0], &[1.0, 2.0]]);
        assert_eq!(origin_depth(&shifted).unwrap(), None);
    }

    #[test]
    fn origin_on_boundary_has_zero_depth() {
        let tri = vecs(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let t = origin_depth(&tri).unwrap().unwrap();
        assert!(t.abs() < 1e-9);
        assert!(!origin_in_interior(&tri).unwrap());
    }

    #[test]
    fn ineq_max_support_of_square() {
        // square |x|<=1, |y|<=1; maximize x + y → 2 at (1,1)
        let a = DMatrix::from_row_slice(
            4,
            2,
            &[1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0],
        );
        let b = dvector![1.0, 1.0, 1.0, 1.0];
        match max_linear_ineq(&a, &b, &dvector![1.0, 1.0]).unwrap() {
            MaxResult::Optimal { value, x } => {
                assert!((value - 2.0).abs() < 1e-9);
                assert!((x[0] - 1.0).abs() < 1e-9 && (x[1] - 1.0).abs() < 1e-9);
            }
            MaxResult::Unbounded => panic!("bounded problem"),
        }
    }

    #[test]
    fn ineq_unbounded_detected() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        match max_linear_ineq(&a, &dvector![1.0], &dvector![0.0, 1.0]).unwrap() {
            MaxResult::Unbounded => {}
            _ => panic!("expected unbounded"),
        }
    }
}
