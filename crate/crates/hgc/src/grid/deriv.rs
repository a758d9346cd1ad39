//! Finite-difference derivatives and Schwartz-class diagnostics.
//!
//! First derivatives use the 4th-order central stencil
//! `(f_{-2} − 8f_{-1} + 8f_{+1} − f_{+2})/(12h)`; higher and mixed orders
//! compose it. Every application widens the invalid boundary band by the
//! stencil radius, and sup-norm reductions skip that band.

use crate::error::{HgcError, Result};
use crate::group::poly::Multiindex;
use crate::group::{HomogeneousGroup, VectorFieldTable};
use crate::grid::GridFunction;

/// Maximum supported total derivative length `‖α‖`.
pub const MAX_DERIVATIVE_LENGTH: usize = 6;

const STENCIL_RADIUS: usize = 2;

/// Single 4th-order partial derivative along `axis`.
pub fn derivative_axis(f: &GridFunction, axis: usize) -> Result<GridFunction> {
    let n = f.dim();
    if axis >= n {
        return Err(HgcError::InvalidArgument(format!("axis {axis} out of range")));
    }
    let sizes = f.grid.sizes().to_vec();
    let len = sizes[axis];
    if len < 2 * STENCIL_RADIUS + 1 {
        return Err(HgcError::InvalidArgument("grid too small for stencil".into()));
    }
    let h = f.grid.steps()[axis];
    let stride: usize = sizes[axis + 1..].iter().product();
    let outer: usize = sizes[..axis].iter().product();
    let mut out = GridFunction::zeros(&f.grid);
    let inv12h = 1.0 / (12.0 * h);
    for o in 0..outer {
        for i in 0..stride {
            let base = o * len * stride + i;
            for m in STENCIL_RADIUS..len - STENCIL_RADIUS {
                let at = |k: isize| f.values[(base as isize + (m as isize + k) * stride as isize) as usize];
                out.values[base + m * stride] =
                    (at(-2) - at(-1) * 8.0 + at(1) * 8.0 - at(2)) * inv12h;
            }
        }
    }
    out.border = f.border.clone();
    out.border[axis] += STENCIL_RADIUS;
    Ok(out)
}

/// Mixed partial `∂^α f` by composing axis stencils; `‖α‖ ≤ 6`.
pub fn partial_derivative(f: &GridFunction, alpha: &Multiindex) -> Result<GridFunction> {
    if alpha.len_dim() != f.dim() {
        return Err(HgcError::InvalidArgument("multiindex dimension mismatch".into()));
    }
    if alpha.length() > MAX_DERIVATIVE_LENGTH {
        return Err(HgcError::DerivativeOrder {
            requested: alpha.length(),
            supported: MAX_DERIVATIVE_LENGTH,
        });
    }
    let mut cur = f.clone();
    for (axis, &times) in alpha.0.iter().enumerate() {
        for _ in 0..times {
            cur = derivative_axis(&cur, axis)?;
        }
    }
    Ok(cur)
}

/// Apply the left-invariant field `X_j = ∂_j + Σ_k p_{j,k}(x) ∂_k` to
/// sampled data.
pub fn apply_vector_field(
    table: &VectorFieldTable,
    j: usize,
    f: &GridFunction,
) -> Result<GridFunction> {
    let n = f.dim();
    let mut out = GridFunction::zeros(&f.grid);
    out.border = f.border.clone();
    for k in 0..n {
        let coeff = &table.coeffs[j][k];
        if coeff.is_zero() {
            continue;
        }
        let dk = derivative_axis(f, k)?;
        for (flat, x) in f.grid.iter_points() {
            out.values[flat] += dk.values[flat] * coeff.eval(&x);
        }
        out.border = crate::grid::max_border(&out.border, &dk.border);
    }
    Ok(out)
}

/// Table of `sup (1+|x|)^I |∂^α f|` over the valid region, for
/// `I ≤ i_max`, `‖α‖ ≤ alpha_max`, in the homogeneous norm.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SchwartzSeminormReport {
    pub entries: Vec<SchwartzSeminormEntry>,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SchwartzSeminormEntry {
    pub decay_exponent: usize,
    pub alpha: Multiindex,
    pub value: f64,
}

impl SchwartzSeminormReport {
    pub fn max(&self) -> f64 {
        self.entries.iter().map(|e| e.value).fold(0.0, f64::max)
    }

    pub fn get(&self, i: usize, alpha: &Multiindex) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.decay_exponent == i && &e.alpha == alpha)
            .map(|e| e.value)
    }
}

/// Compute the seminorm table. Entries are finite by construction (sup over
/// finitely many samples of finite values).
pub fn schwartz_seminorms(
    group: &HomogeneousGroup,
    f: &GridFunction,
    i_max: usize,
    alpha_max: usize,
) -> Result<SchwartzSeminormReport> {
    let n = f.dim();
    let mut entries = Vec::new();
    for alpha in Multiindex::up_to_length(n, alpha_max) {
        let df = partial_derivative(f, &alpha)?;
        let mut sups = vec![0.0f64; i_max + 1];
        for (flat, x) in df.grid.iter_points() {
            let idx = df.grid.unflatten(flat);
            if !df.is_valid_index(&idx) {
                continue;
            }
            let a = df.values[flat].norm();
            if a == 0.0 {
                continue;
            }
            let w = 1.0 + group.homogeneous_norm(&x);
            let mut pow = 1.0;
            for s in sups.iter_mut() {
                *s = s.max(a * pow);
                pow *= w;
            }
        }
        for (i, &v) in sups.iter().enumerate() {
            entries.push(SchwartzSeminormEntry { decay_exponent: i, alpha: alpha.clone(), value: v });
        }
    }
    Ok(SchwartzSeminormReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use std::f64::consts::PI;

    #[test]
    fn derivative_of_constant_is_zero() {
        let g = Grid::new(vec![4.0], vec![64]).unwrap();
        let f = GridFunction::sample_real(&g, |_| 3.25).unwrap();
        let d = partial_derivative(&f, &Multiindex(vec![1])).unwrap();
        assert!(d.sup_abs() < 1e-13);
        assert_eq!(d.border, vec![2]);
    }

    #[test]
    fn fourth_order_convergence_on_sine() {
        // error ratio ~ 16 when N doubles
        let errs: Vec<f64> = [128usize, 256]
            .iter()
            .map(|&n| {
                let g = Grid::new(vec![4.0], vec![n]).unwrap();
                let k = 2.0 * PI / 4.0;
                let f = GridFunction::sample_real(&g, |x| (k * x[0]).sin()).unwrap();
                let d = partial_derivative(&f, &Multiindex(vec![1])).unwrap();
                let oracle = GridFunction::sample_real(&g, |x| k * (k * x[0]).cos()).unwrap();
                d.sup_abs_diff(&oracle).unwrap()
            })
            .collect();
        let ratio = errs[0] / errs[1];
        assert!((10.0..24.0).contains(&ratio), "ratio = {ratio}, errs = {errs:?}");
    }

    #[test]
    fn mixed_partials_commute() {
        let g = Grid::new(vec![3.0, 3.0], vec![48, 48]).unwrap();
        let f =
            GridFunction::sample_real(&g, |x| (-x[0] * x[0] - x[1] * x[1] + 0.3 * x[0] * x[1]).exp())
                .unwrap();
        let dxy = partial_derivative(
            &partial_derivative(&f, &Multiindex(vec![1, 0])).unwrap(),
            &Multiindex(vec![0, 1]),
        )
        .unwrap();
        let dyx = partial_derivative(
            &partial_derivative(&f, &Multiindex(vec![0, 1])).unwrap(),
            &Multiindex(vec![1, 0]),
        )
        .unwrap();
        let err = dxy.sup_abs_diff(&dyx).unwrap();
        assert!(err < 1e-10, "err = {err}");
    }

    #[test]
    fn order_cap_enforced() {
        let g = Grid::new(vec![4.0], vec![64]).unwrap();
        let f = GridFunction::sample_real(&g, |_| 1.0).unwrap();
        let r = partial_derivative(&f, &Multiindex(vec![7]));
        assert!(matches!(r, Err(HgcError::DerivativeOrder { .. })));
    }

    #[test]
    fn seminorms_zero_function() {
        let g = Grid::new(vec![4.0], vec![32]).unwrap();
        let e1 = HomogeneousGroup::euclidean(1);
        let f = GridFunction::sample_real(&g, |_| 0.0).unwrap();
        let rep = schwartz_seminorms(&e1, &f, 3, 2).unwrap();
        assert_eq!(rep.max(), 0.0);
    }

    #[test]
    fn seminorm_gaussian_finite_nonzero() {
        let g = Grid::new(vec![8.0], vec![256]).unwrap();
        let e1 = HomogeneousGroup::euclidean(1);
        let f = GridFunction::sample_real(&g, |x| (-PI * x[0] * x[0]).exp()).unwrap();
        let rep = schwartz_seminorms(&e1, &f, 4, 3).unwrap();
        assert!(rep.max().is_finite());
        assert!(rep.get(0, &Multiindex(vec![0])).unwrap() == 1.0);
    }

    #[test]
    fn non_schwartz_growth_flagged_by_box_study() {
        // (1+x²)^{-1}: entry at I = 3, α = 0 grows with box size like R
        let e1 = HomogeneousGroup::euclidean(1);
        let vals: Vec<f64> = [8.0, 16.0]
            .iter()
            .map(|&r| {
                let g = Grid::new(vec![r], vec![512]).unwrap();
                let f = GridFunction::sample_real(&g, |x| 1.0 / (1.0 + x[0] * x[0])).unwrap();
                schwartz_seminorms(&e1, &f, 3, 0)
                    .unwrap()
                    .get(3, &Multiindex(vec![0]))
                    .unwrap()
            })
            .collect();
        let growth = vals[1] / vals[0];
        assert!(growth > 1.7, "growth = {growth} (expected ~2)");
    }

    #[test]
    fn heisenberg_vector_field_application() {
        // X1 applied to t equals -y/2 (from X1 = ∂x − (y/2)∂t)
        let g = HomogeneousGroup::heisenberg();
        let table = g.vector_fields().unwrap();
        let grid = Grid::new(vec![2.0, 2.0, 2.0], vec![16, 16, 16]).unwrap();
        let f = GridFunction::sample_real(&grid, |x| x[2]).unwrap();
        let xf = apply_vector_field(&table, 0, &f).unwrap();
        let oracle = GridFunction::sample_real(&grid, |x| -0.5 * x[1]).unwrap();
        let mut err = 0.0f64;
        for (flat, _) in grid.iter_points() {
            let idx = grid.unflatten(flat);
            if xf.is_valid_index(&idx) {
                err = err.max((xf.values[flat] - oracle.values[flat]).norm());
            }
        }
        assert!(err < 1e-11, "err = {err}");
    }
}
