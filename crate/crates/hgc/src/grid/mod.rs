//! Sampled scalar fields on uniform box grids.
//!
//! A `Grid` is a tensor-product box `Π [−Rᵢ, Rᵢ)` with `Nᵢ` samples per
//! axis (even, so the origin is a sample point). `GridFunction` carries
//! complex samples in row-major order plus a per-axis invalid border band
//! produced by derivative stencils.

pub mod convolve;
pub mod cutoff;
pub mod deriv;
pub mod division;
pub mod fourier;
pub mod io;

use num_complex::Complex64;

use crate::error::{HgcError, Result};
use crate::group::HomogeneousGroup;

/// Uniform box grid, origin-centered.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    extents: Vec<f64>,
    sizes: Vec<usize>,
    steps: Vec<f64>,
}

impl Grid {
    pub fn new(extents: Vec<f64>, sizes: Vec<usize>) -> Result<Self> {
        if extents.len() != sizes.len() || extents.is_empty() {
            return Err(HgcError::InvalidArgument("grid extents/sizes mismatch".into()));
        }
        for (&r, &n) in extents.iter().zip(&sizes) {
            if !(r > 0.0) {
                return Err(HgcError::InvalidArgument("grid extent must be positive".into()));
            }
            if n < 8 || n % 2 != 0 {
                return Err(HgcError::InvalidArgument(format!(
                    "points per axis must be even and >= 8, got {n}"
                )));
            }
        }
        let steps = extents.iter().zip(&sizes).map(|(&r, &n)| 2.0 * r / n as f64).collect();
        Ok(Grid { extents, sizes, steps })
    }

    /// Isotropic grid: same extent and size on every axis.
    pub fn isotropic(n_axes: usize, extent: f64, size: usize) -> Result<Self> {
        Grid::new(vec![extent; n_axes], vec![size; n_axes])
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn total_points(&self) -> usize {
        self.sizes.iter().product()
    }

    /// Quadrature weight of one cell, `Π hᵢ`.
    pub fn cell_volume(&self) -> f64 {
        self.steps.iter().product()
    }

    /// Coordinate of the sample with per-axis indices `idx`.
    pub fn point(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(ax, &i)| -self.extents[ax] + i as f64 * self.steps[ax])
            .collect()
    }

    /// Decode a flat row-major index into per-axis indices.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let n = self.dim();
        let mut idx = vec![0usize; n];
        for ax in (0..n).rev() {
            idx[ax] = flat % self.sizes[ax];
            flat /= self.sizes[ax];
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        let mut flat = 0usize;
        for ax in 0..self.dim() {
            flat = flat * self.sizes[ax] + idx[ax];
        }
        flat
    }

    /// Flat index of the origin sample.
    pub fn origin_index(&self) -> usize {
        let idx: Vec<usize> = self.sizes.iter().map(|&n| n / 2).collect();
        self.flatten(&idx)
    }

    /// The reciprocal (frequency) grid of the same size: step `1/(2Rᵢ)`,
    /// half-width `Nᵢ/(4Rᵢ)`.
    pub fn reciprocal(&self) -> Grid {
        let extents: Vec<f64> = self
            .sizes
            .iter()
            .zip(&self.extents)
            .map(|(&n, &r)| n as f64 / (4.0 * r))
            .collect();
        Grid::new(extents, self.sizes.clone()).expect("reciprocal grid is valid")
    }

    pub fn is_power_of_two(&self) -> bool {
        self.sizes.iter().all(|n| n.is_power_of_two())
    }

    /// Iterate all sample coordinates in row-major order.
    pub fn iter_points(&self) -> GridPointIter<'_> {
        GridPointIter { grid: self, flat: 0 }
    }
}

pub struct GridPointIter<'a> {
    grid: &'a Grid,
    flat: usize,
}

impl Iterator for GridPointIter<'_> {
    type Item = (usize, Vec<f64>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.flat >= self.grid.total_points() {
            return None;
        }
        let flat = self.flat;
        self.flat += 1;
        Some((flat, self.grid.point(&self.grid.unflatten(flat))))
    }
}

/// Complex samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
    /// Per-axis width of the invalid boundary band (from derivative
    /// stencils); excluded from sup-type reductions.
    pub border: Vec<usize>,
}

impl GridFunction {
    pub fn zeros(grid: &Grid) -> Self {
        GridFunction {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.total_points()],
            border: vec![0; grid.dim()],
        }
    }

    /// Sample a complex scalar field at every grid point.
    pub fn sample<F>(grid: &Grid, field: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let mut values = vec![Complex64::new(0.0, 0.0); grid.total_points()];
        for (flat, x) in grid.iter_points() {
            let v = field(&x);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(HgcError::NonFiniteSample { index: grid.unflatten(flat), coords: x });
            }
            values[flat] = v;
        }
        Ok(GridFunction { grid: grid.clone(), values, border: vec![0; grid.dim()] })
    }

    /// Sample a real scalar field.
    pub fn sample_real<F>(grid: &Grid, field: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        Self::sample(grid, |x| Complex64::new(field(x), 0.0))
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Multilinear interpolation at an arbitrary point; zero outside the box.
    pub fn interpolate(&self, x: &[f64]) -> Complex64 {
        interpolate_nd(&self.grid, &self.values, x)
    }

    /// Value at the origin sample.
    pub fn at_origin(&self) -> Complex64 {
        self.values[self.grid.origin_index()]
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// Pointwise linear combination `a·self + b·other`.
    pub fn linear_comb(&self, a: Complex64, other: &GridFunction, b: Complex64) -> Result<GridFunction> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&u, &v)| a * u + b * v)
            .collect();
        Ok(GridFunction {
            grid: self.grid.clone(),
            values,
            border: max_border(&self.border, &other.border),
        })
    }

    pub fn scale(&self, a: Complex64) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| a * v).collect(),
            border: self.border.clone(),
        }
    }

    /// Pointwise product.
    pub fn mul_pointwise(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_same_grid(other)?;
        Ok(GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(&u, &v)| u * v).collect(),
            border: max_border(&self.border, &other.border),
        })
    }

    pub fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(HgcError::GridMismatch(format!(
                "grids differ: {:?} vs {:?}",
                self.grid.sizes, other.grid.sizes
            )));
        }
        Ok(())
    }

    /// Whether the per-axis index is inside the valid (non-border) region.
    pub fn is_valid_index(&self, idx: &[usize]) -> bool {
        idx.iter().enumerate().all(|(ax, &i)| {
            let b = self.border[ax];
            i >= b && i < self.grid.sizes[ax] - b
        })
    }

    /// Sup of |f| over the valid region.
    pub fn sup_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for flat in 0..self.values.len() {
            let idx = self.grid.unflatten(flat);
            if self.is_valid_index(&idx) {
                m = m.max(self.values[flat].norm());
            }
        }
        m
    }

    /// Sup of |f − g| over the common valid region.
    pub fn sup_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        let border = max_border(&self.border, &other.border);
        let mut m = 0.0f64;
        for flat in 0..self.values.len() {
            let idx = self.grid.unflatten(flat);
            let ok = idx
                .iter()
                .enumerate()
                .all(|(ax, &i)| i >= border[ax] && i < self.grid.sizes[ax] - border[ax]);
            if ok {
                m = m.max((self.values[flat] - other.values[flat]).norm());
            }
        }
        Ok(m)
    }

    /// L¹ mass `Σ |f| · Π hᵢ`.
    pub fn l1_mass(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum::<f64>() * self.grid.cell_volume()
    }

    /// Quadrature of `f` over the box.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * Complex64::new(self.grid.cell_volume(), 0.0)
    }

    /// Resample `f ∘ δ_r` by multilinear interpolation, zero outside the box.
    pub fn dilate(&self, group: &HomogeneousGroup, r: f64) -> Result<GridFunction> {
        if !(r > 0.0) {
            return Err(HgcError::InvalidArgument("dilation factor must be positive".into()));
        }
        if group.dimension() != self.dim() {
            return Err(HgcError::GridMismatch("group dimension != grid dimension".into()));
        }
        if r == 1.0 {
            return Ok(self.clone());
        }
        let mut out = GridFunction::zeros(&self.grid);
        for (flat, x) in self.grid.iter_points() {
            let xr = group.dilate_unchecked(&x, r);
            out.values[flat] = self.interpolate(&xr);
        }
        Ok(out)
    }

    /// Weighted quadrature moments `∫ x^α f(x) dx` for `‖α‖ ≤ degree_max`,
    /// with the share of |f|-mass in the outer 10% shell of the box.
    pub fn moments(&self, degree_max: usize) -> MomentTable {
        let n = self.dim();
        let alphas = crate::group::Multiindex::up_to_length(n, degree_max);
        let vol = self.grid.cell_volume();
        let mut entries: Vec<(crate::group::Multiindex, Complex64)> =
            alphas.iter().map(|a| (a.clone(), Complex64::new(0.0, 0.0))).collect();
        let mut tail = 0.0;
        let mut total = 0.0;
        for (flat, x) in self.grid.iter_points() {
            let v = self.values[flat];
            let a = v.norm();
            total += a;
            if x
                .iter()
                .enumerate()
                .any(|(ax, &xi)| xi.abs() > 0.9 * self.grid.extents[ax])
            {
                tail += a;
            }
            for (alpha, acc) in entries.iter_mut() {
                *acc += v * alpha.eval(&x);
            }
        }
        for (_, acc) in entries.iter_mut() {
            *acc *= vol;
        }
        MomentTable { entries, tail_mass_share: if total > 0.0 { tail / total } else { 0.0 } }
    }

    /// All moments up to `degree_max` below `tol` in absolute value.
    pub fn is_moment_free(&self, degree_max: usize, tol: f64) -> bool {
        self.moments(degree_max).entries.iter().all(|(_, m)| m.norm() <= tol)
    }
}

/// Quadrature moments with a tail-mass diagnostic.
#[derive(Debug, Clone)]
pub struct MomentTable {
    pub entries: Vec<(crate::group::Multiindex, Complex64)>,
    /// Share of the |f|-mass within 10% of the box boundary.
    pub tail_mass_share: f64,
}

impl MomentTable {
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|(_, m)| m.norm()).fold(0.0, f64::max)
    }
}

/// Default moment tolerance: `1e-8 ·` box volume.
pub fn moment_tolerance(grid: &Grid) -> f64 {
    let volume: f64 = grid.extents.iter().map(|&r| 2.0 * r).product();
    1e-8 * volume
}

pub(crate) fn max_border(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().zip(b).map(|(&x, &y)| x.max(y)).collect()
}

/// Multilinear interpolation over the 2^n surrounding corners, zero
/// extension outside the box.
pub(crate) fn interpolate_nd(grid: &Grid, values: &[Complex64], x: &[f64]) -> Complex64 {
    let n = grid.dim();
    debug_assert!(n <= 8);
    let mut base = [0usize; 8];
    let mut frac = [0.0f64; 8];
    for ax in 0..n {
        let u = (x[ax] + grid.extents[ax]) / grid.steps[ax];
        if !(u >= 0.0) || u > (grid.sizes[ax] - 1) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let i = (u.floor() as usize).min(grid.sizes[ax] - 2);
        base[ax] = i;
        frac[ax] = u - i as f64;
    }
    // accumulate over corners
    let mut acc = Complex64::new(0.0, 0.0);
    let corners = 1usize << n;
    'corner: for c in 0..corners {
        let mut w = 1.0;
        let mut flat = 0usize;
        for ax in 0..n {
            let hi = (c >> ax) & 1 == 1;
            let i = base[ax] + hi as usize;
            if i >= grid.sizes[ax] {
                continue 'corner; // outside: zero extension
            }
            w *= if hi { frac[ax] } else { 1.0 - frac[ax] };
            flat = flat * grid.sizes[ax] + i;
        }
        if w != 0.0 {
            acc += values[flat] * w;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grid_basics() {
        let g = Grid::new(vec![8.0], vec![512]).unwrap();
        assert_eq!(g.steps()[0], 1.0 / 32.0);
        let origin = g.point(&g.unflatten(g.origin_index()));
        assert_eq!(origin, vec![0.0]);
        assert!(Grid::new(vec![8.0], vec![7]).is_err());
        assert!(Grid::new(vec![8.0], vec![6]).is_err());
        assert!(Grid::new(vec![-1.0], vec![16]).is_err());
    }

    #[test]
    fn reciprocal_grid() {
        let g = Grid::new(vec![8.0], vec![512]).unwrap();
        let r = g.reciprocal();
        assert_eq!(r.extents()[0], 16.0);
        assert_eq!(r.steps()[0], 1.0 / 16.0);
    }

    #[test]
    fn sample_constant_and_gaussian() {
        let g = Grid::new(vec![8.0], vec![256]).unwrap();
        let ones = GridFunction::sample_real(&g, |_| 1.0).unwrap();
        assert!(ones.values.iter().all(|v| v.re == 1.0 && v.im == 0.0));

        let gauss = GridFunction::sample_real(&g, |x| (-PI * x[0] * x[0]).exp()).unwrap();
        assert_eq!(gauss.at_origin().re, 1.0);
        let sup = gauss.sup_abs();
        assert_eq!(sup, 1.0);
        // symmetry: f(-x) = f(x); origin index N/2, mirror of i is N - i
        let n = g.sizes()[0];
        for i in 1..n {
            let a = gauss.values[i].re;
            let b = gauss.values[n - i].re;
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn sample_rejects_nonfinite() {
        let g = Grid::new(vec![1.0], vec![8]).unwrap();
        let r = GridFunction::sample_real(&g, |x| 1.0 / x[0]);
        assert!(matches!(r, Err(HgcError::NonFiniteSample { .. })));
    }

    #[test]
    fn heisenberg_norm_zero_only_at_origin() {
        let h = HomogeneousGroup::heisenberg();
        let g = Grid::new(vec![2.0, 2.0, 4.0], vec![16, 16, 16]).unwrap();
        let f = GridFunction::sample_real(&g, |x| h.homogeneous_norm(x)).unwrap();
        for (flat, x) in g.iter_points() {
            if x.iter().all(|&c| c == 0.0) {
                assert_eq!(f.values[flat].re, 0.0);
            } else {
                assert!(f.values[flat].re > 0.0);
            }
        }
    }

    #[test]
    fn interpolation_linear_exact() {
        let g = Grid::new(vec![4.0, 4.0], vec![32, 32]).unwrap();
        let f = GridFunction::sample_real(&g, |x| 2.0 * x[0] - 3.0 * x[1] + 0.5).unwrap();
        // multilinear interpolation reproduces affine functions inside the
        // sampled hull [-R, R - h]
        for (a, b) in [(0.13, -1.71), (2.4, 3.4), (-3.0, 0.01)] {
            let v = f.interpolate(&[a, b]);
            assert!((v.re - (2.0 * a - 3.0 * b + 0.5)).abs() < 1e-12);
        }
        // zero outside
        assert_eq!(f.interpolate(&[5.0, 0.0]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn dilate_function_gaussian() {
        let e1 = HomogeneousGroup::euclidean(1);
        let g = Grid::new(vec![8.0], vec![512]).unwrap();
        let f = GridFunction::sample_real(&g, |x| (-PI * x[0] * x[0]).exp()).unwrap();
        let f2 = f.dilate(&e1, 2.0).unwrap();
        let oracle = GridFunction::sample_real(&g, |x| (-PI * 4.0 * x[0] * x[0]).exp()).unwrap();
        let err = f2.sup_abs_diff(&oracle).unwrap();
        assert!(err < 1e-6, "err = {err}");
        // r = 1 is the identity
        let f1 = f.dilate(&e1, 1.0).unwrap();
        assert_eq!(f1.values, f.values);
    }

    #[test]
    fn dilate_mass_scaling() {
        // L1 mass of 2^{Qk} φ∘δ_{2^k} is k-independent
        let e1 = HomogeneousGroup::euclidean(1);
        let g = Grid::new(vec![8.0], vec![1024]).unwrap();
        let f = GridFunction::sample_real(&g, |x| (-PI * x[0] * x[0]).exp()).unwrap();
        let m0 = f.l1_mass();
        for k in 1..3 {
            let r = 2f64.powi(k);
            let fk = f.dilate(&e1, r).unwrap().scale(Complex64::new(r, 0.0));
            let rel = (fk.l1_mass() - m0).abs() / m0;
            assert!(rel < 1e-3, "k={k} rel={rel}");
        }
    }

    #[test]
    fn moments_gaussian() {
        let g = Grid::new(vec![8.0], vec![256]).unwrap();
        let f = GridFunction::sample_real(&g, |x| (-PI * x[0] * x[0]).exp()).unwrap();
        let m = f.moments(2);
        // zeroth moment = ∫ e^{-πx²} = 1
        let zeroth = m.entries.iter().find(|(a, _)| a.length() == 0).unwrap().1;
        assert!((zeroth.re - 1.0).abs() < 1e-10);
        assert!(!f.is_moment_free(0, moment_tolerance(&g)));
    }

    #[test]
    fn derivative_of_schwartz_is_moment_free_at_zeroth() {
        // d/dx e^{-πx²} has vanishing integral
        let g = Grid::new(vec![8.0], vec![256]).unwrap();
        let f =
            GridFunction::sample_real(&g, |x| -2.0 * PI * x[0] * (-PI * x[0] * x[0]).exp()).unwrap();
        let m = f.moments(0);
        assert!(m.max_abs() < 1e-12);
    }
}
