//! Group convolution by direct quadrature.
//!
//! `(f ∗ h)(x) = ∫ f(xy⁻¹) h(y) dy = ∫ f(y) h(y⁻¹x) dy` against Lebesgue
//! (= Haar) measure. One factor is swept as the quadrature variable over
//! its essential support; the other is evaluated by multilinear
//! interpolation, zero outside the box. The sweep factor is chosen as the
//! one with the smaller support, and summation order is fixed, so results
//! are deterministic and independent of the thread schedule.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{HgcError, Result};
use crate::group::HomogeneousGroup;
use crate::grid::{Grid, GridFunction};

const MAX_DIM: usize = 8;

/// Tuning knobs for the quadrature sweep.
#[derive(Debug, Clone, Copy)]
pub struct ConvolveOptions {
    /// Drop sweep entries with `|value| ≤ tol · max|value|`. Zero keeps
    /// every nonzero sample (plain quadrature).
    pub support_rel_tol: f64,
}

impl Default for ConvolveOptions {
    fn default() -> Self {
        ConvolveOptions { support_rel_tol: 0.0 }
    }
}

/// Group convolution on a common grid.
pub fn group_convolve(
    group: &HomogeneousGroup,
    f: &GridFunction,
    h: &GridFunction,
) -> Result<GridFunction> {
    group_convolve_with(group, f, h, ConvolveOptions::default())
}

pub fn group_convolve_with(
    group: &HomogeneousGroup,
    f: &GridFunction,
    h: &GridFunction,
    opts: ConvolveOptions,
) -> Result<GridFunction> {
    f.check_same_grid(h)?;
    if group.dimension() != f.dim() {
        return Err(HgcError::GridMismatch(format!(
            "group dimension {} != grid dimension {}",
            group.dimension(),
            f.dim()
        )));
    }
    if f.dim() > MAX_DIM {
        return Err(HgcError::InvalidArgument("dimension too large for convolution".into()));
    }

    // Sweep the factor with the smaller essential support.
    let count_f = essential_count(f, opts.support_rel_tol);
    let count_h = essential_count(h, opts.support_rel_tol);
    let (values, miss_share) = if count_h <= count_f {
        // out(x) = Σ_y f(x·y⁻¹) h(y) vol
        let sweep = SupportList::build(group, h, opts.support_rel_tol);
        convolve_sweep(group, f, &sweep, ArgOrder::XTimesInv)
    } else {
        // out(x) = Σ_y f(y) h(y⁻¹·x) vol
        let sweep = SupportList::build(group, f, opts.support_rel_tol);
        convolve_sweep(group, h, &sweep, ArgOrder::InvTimesX)
    };

    if miss_share > 0.2 {
        log::warn!(
            "group_convolve: {:.1}% of quadrature mass hit points outside the box (zero extension)",
            100.0 * miss_share
        );
    }

    Ok(GridFunction { grid: f.grid.clone(), values, border: vec![0; f.dim()] })
}

/// Whether the sweep point multiplies on the left or the right of the
/// output point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgOrder {
    /// interpolated factor evaluated at `x · p` (p stores y⁻¹)
    XTimesInv,
    /// interpolated factor evaluated at `p · x`
    InvTimesX,
}

/// Quadrature sweep list: inverted sample points with weight
/// `value · cell volume`.
pub struct SupportList {
    pub dim: usize,
    /// Flattened y⁻¹ coordinates, stride `dim`.
    pub points_inv: Vec<f64>,
    pub weights: Vec<Complex64>,
    pub all_real: bool,
}

impl SupportList {
    pub fn build(group: &HomogeneousGroup, f: &GridFunction, rel_tol: f64) -> SupportList {
        let n = f.dim();
        let vol = f.grid.cell_volume();
        let max = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let cut = rel_tol * max;
        let mut points_inv = Vec::new();
        let mut weights = Vec::new();
        let mut all_real = true;
        for (flat, y) in f.grid.iter_points() {
            let v = f.values[flat];
            let a = v.norm();
            if a == 0.0 || a <= cut {
                continue;
            }
            let y_inv = group.inverse(&y);
            points_inv.extend_from_slice(&y_inv);
            weights.push(v * vol);
            all_real &= v.im == 0.0;
        }
        SupportList { dim: n, points_inv, weights, all_real }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

fn essential_count(f: &GridFunction, rel_tol: f64) -> usize {
    let max = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let cut = rel_tol * max;
    f.values.iter().filter(|v| v.norm() > cut || (v.norm() > 0.0 && rel_tol == 0.0)).count()
}

/// Monomial tables specialized for tight inner loops.
struct CompiledLaw {
    n: usize,
    /// per output coordinate: (coeff, repeated a-indices, repeated b-indices)
    terms: Vec<Vec<(f64, Vec<u8>, Vec<u8>)>>,
    /// set when every correction monomial is bilinear (degree 1 in each
    /// factor): (coord, coeff, a-index, b-index)
    bilinear: Option<Vec<(u8, f64, u8, u8)>>,
}

impl CompiledLaw {
    fn new(group: &HomogeneousGroup) -> CompiledLaw {
        let law = group.law();
        let n = group.dimension();
        let terms: Vec<Vec<(f64, Vec<u8>, Vec<u8>)>> = law
            .per_coordinate
            .iter()
            .map(|monos| {
                monos
                    .iter()
                    .map(|m| {
                        let expand = |deg: &[usize]| {
                            let mut idx = Vec::new();
                            for (j, &e) in deg.iter().enumerate() {
                                for _ in 0..e {
                                    idx.push(j as u8);
                                }
                            }
                            idx
                        };
                        (m.coeff, expand(&m.xdeg), expand(&m.ydeg))
                    })
                    .collect()
            })
            .collect();
        let mut bilinear = Some(Vec::new());
        'outer: for (i, monos) in terms.iter().enumerate() {
            for (c, ai, bi) in monos {
                if ai.len() == 1 && bi.len() == 1 {
                    if let Some(list) = bilinear.as_mut() {
                        list.push((i as u8, *c, ai[0], bi[0]));
                    }
                } else {
                    bilinear = None;
                    break 'outer;
                }
            }
        }
        CompiledLaw { n, terms, bilinear }
    }

    #[inline(always)]
    fn multiply_into(&self, a: &[f64], b: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            out[i] = a[i] + b[i];
        }
        if let Some(bilin) = &self.bilinear {
            for &(i, c, ia, ib) in bilin {
                out[i as usize] += c * a[ia as usize] * b[ib as usize];
            }
            return;
        }
        for (i, monos) in self.terms.iter().enumerate() {
            for (c, ai, bi) in monos {
                let mut v = *c;
                for &j in ai {
                    v *= a[j as usize];
                }
                for &j in bi {
                    v *= b[j as usize];
                }
                out[i] += v;
            }
        }
    }
}

/// Convolve by sweeping `sweep` against the interpolated factor `interp`.
/// Returns the output values and the share of sweep mass whose argument
/// fell outside the box.
fn convolve_sweep(
    group: &HomogeneousGroup,
    interp: &GridFunction,
    sweep: &SupportList,
    order: ArgOrder,
) -> (Vec<Complex64>, f64) {
    let grid = &interp.grid;
    let law = CompiledLaw::new(group);
    let n_out = grid.total_points();

    let total_mass: f64 = sweep.weights.iter().map(|w| w.norm()).sum();
    if sweep.is_empty() || total_mass == 0.0 {
        return (vec![Complex64::new(0.0, 0.0); n_out], 0.0);
    }

    if sweep.all_real && interp.is_real() {
        let real_vals: Vec<f64> = interp.values.iter().map(|v| v.re).collect();
        // interleaved stream (p0..p_{n-1}, w) for sequential access
        let n = grid.dim();
        let mut stream = Vec::with_capacity(sweep.len() * (n + 1));
        for (chunk, w) in sweep.points_inv.chunks_exact(n).zip(&sweep.weights) {
            stream.extend_from_slice(chunk);
            stream.push(w.re);
        }
        let results: Vec<(f64, f64)> = if n == 3 && law.bilinear.is_some() {
            (0..n_out)
                .into_par_iter()
                .map(|flat| sweep3_real(grid, &law, &real_vals, &stream, order, flat))
                .collect()
        } else {
            (0..n_out)
                .into_par_iter()
                .map(|flat| inner_sweep_real(grid, &law, &real_vals, &stream, order, flat))
                .collect()
        };
        let miss: f64 = results.iter().map(|r| r.1).sum();
        let values = results.iter().map(|r| Complex64::new(r.0, 0.0)).collect();
        (values, miss / (total_mass * n_out as f64))
    } else {
        let results: Vec<(Complex64, f64)> = (0..n_out)
            .into_par_iter()
            .map(|flat| inner_sweep_complex(grid, &law, &interp.values, sweep, order, flat))
            .collect();
        let miss: f64 = results.iter().map(|r| r.1).sum();
        let values = results.iter().map(|r| r.0).collect();
        (values, miss / (total_mass * n_out as f64))
    }
}

#[inline(always)]
fn decode_point(grid: &Grid, mut flat: usize, x: &mut [f64; MAX_DIM]) {
    let n = grid.dim();
    for ax in (0..n).rev() {
        let i = flat % grid.sizes()[ax];
        flat /= grid.sizes()[ax];
        x[ax] = -grid.extents()[ax] + i as f64 * grid.steps()[ax];
    }
}

fn inner_sweep_real(
    grid: &Grid,
    law: &CompiledLaw,
    values: &[f64],
    stream: &[f64],
    order: ArgOrder,
    flat: usize,
) -> (f64, f64) {
    let n = law.n;
    let mut x = [0.0f64; MAX_DIM];
    decode_point(grid, flat, &mut x);
    let mut z = [0.0f64; MAX_DIM];
    let mut acc = 0.0;
    let mut miss = 0.0;
    for entry in stream.chunks_exact(n + 1) {
        let (p, w) = (&entry[..n], entry[n]);
        match order {
            ArgOrder::XTimesInv => law.multiply_into(&x[..n], p, &mut z[..n]),
            ArgOrder::InvTimesX => law.multiply_into(p, &x[..n], &mut z[..n]),
        }
        match interp_real(grid, values, &z[..n]) {
            Some(v) => acc += v * w,
            None => miss += w.abs(),
        }
    }
    (acc, miss)
}

/// Hot path: 3 dimensions, real data, bilinear law corrections.
fn sweep3_real(
    grid: &Grid,
    law: &CompiledLaw,
    values: &[f64],
    stream: &[f64],
    order: ArgOrder,
    flat: usize,
) -> (f64, f64) {
    let sizes = grid.sizes();
    let (d0, d1, d2) = (sizes[0], sizes[1], sizes[2]);
    let ext = grid.extents();
    let steps = grid.steps();
    let (e0, e1, e2) = (ext[0], ext[1], ext[2]);
    let (si0, si1, si2) = (1.0 / steps[0], 1.0 / steps[1], 1.0 / steps[2]);
    let (m0, m1, m2) = ((d0 - 1) as f64, (d1 - 1) as f64, (d2 - 1) as f64);
    let o1 = d2;
    let o2 = d1 * d2;
    let bilin = law.bilinear.as_ref().expect("sweep3_real requires bilinear law");

    let mut x = [0.0f64; MAX_DIM];
    decode_point(grid, flat, &mut x);
    let swap = order == ArgOrder::InvTimesX;

    let mut acc = 0.0;
    let mut miss = 0.0;
    for entry in stream.chunks_exact(4) {
        let p = [entry[0], entry[1], entry[2]];
        let w = entry[3];
        let (a, b): (&[f64], &[f64]) = if swap { (&p, &x[..3]) } else { (&x[..3], &p) };
        let mut z0 = a[0] + b[0];
        let mut z1 = a[1] + b[1];
        let mut z2 = a[2] + b[2];
        for &(i, c, ia, ib) in bilin {
            let t = c * a[ia as usize] * b[ib as usize];
            match i {
                0 => z0 += t,
                1 => z1 += t,
                _ => z2 += t,
            }
        }
        let u0 = (z0 + e0) * si0;
        let u1 = (z1 + e1) * si1;
        let u2 = (z2 + e2) * si2;
        if !(u0 >= 0.0 && u0 <= m0 && u1 >= 0.0 && u1 <= m1 && u2 >= 0.0 && u2 <= m2) {
            miss += w.abs();
            continue;
        }
        // clamp so the +1 corner stays in range (its weight is then 0 or
        // the interpolation is between the last two samples)
        let i0 = (u0 as usize).min(d0 - 2);
        let i1 = (u1 as usize).min(d1 - 2);
        let i2 = (u2 as usize).min(d2 - 2);
        let t0 = u0 - i0 as f64;
        let t1 = u1 - i1 as f64;
        let t2 = u2 - i2 as f64;
        let base = i0 * o2 + i1 * o1 + i2;
        // SAFETY: indices bounded by (d0-2, d1-2, d2-2) + 1 per axis
        unsafe {
            let v000 = *values.get_unchecked(base);
            let v001 = *values.get_unchecked(base + 1);
            let v010 = *values.get_unchecked(base + o1);
            let v011 = *values.get_unchecked(base + o1 + 1);
            let v100 = *values.get_unchecked(base + o2);
            let v101 = *values.get_unchecked(base + o2 + 1);
            let v110 = *values.get_unchecked(base + o2 + o1);
            let v111 = *values.get_unchecked(base + o2 + o1 + 1);
            let c00 = v000 + t0 * (v100 - v000);
            let c10 = v010 + t0 * (v110 - v010);
            let c01 = v001 + t0 * (v101 - v001);
            let c11 = v011 + t0 * (v111 - v011);
            let c0 = c00 + t1 * (c10 - c00);
            let c1 = c01 + t1 * (c11 - c01);
            acc += (c0 + t2 * (c1 - c0)) * w;
        }
    }
    (acc, miss)
}

fn inner_sweep_complex(
    grid: &Grid,
    law: &CompiledLaw,
    values: &[Complex64],
    sweep: &SupportList,
    order: ArgOrder,
    flat: usize,
) -> (Complex64, f64) {
    let n = law.n;
    let mut x = [0.0f64; MAX_DIM];
    decode_point(grid, flat, &mut x);
    let mut z = [0.0f64; MAX_DIM];
    let mut acc = Complex64::new(0.0, 0.0);
    let mut miss = 0.0;
    for (chunk, &w) in sweep.points_inv.chunks_exact(n).zip(&sweep.weights) {
        match order {
            ArgOrder::XTimesInv => law.multiply_into(&x[..n], chunk, &mut z[..n]),
            ArgOrder::InvTimesX => law.multiply_into(chunk, &x[..n], &mut z[..n]),
        }
        match interp_complex(grid, values, &z[..n]) {
            Some(v) => acc += v * w,
            None => miss += w.norm(),
        }
    }
    (acc, miss)
}

/// Single-point convolution `Σ_z kernel(x·z⁻¹)·w_z` against a prebuilt
/// sweep list; the same inner arithmetic as the full sweep.
pub fn convolve_at_point(
    group: &HomogeneousGroup,
    kernel: &GridFunction,
    sweep: &SupportList,
    x: &[f64],
) -> Complex64 {
    let law = CompiledLaw::new(group);
    convolve_at_point_with_law(&law, kernel, sweep, x)
}

fn convolve_at_point_with_law(
    law: &CompiledLaw,
    kernel: &GridFunction,
    sweep: &SupportList,
    x: &[f64],
) -> Complex64 {
    let n = law.n;
    let mut z = [0.0f64; MAX_DIM];
    let mut acc = Complex64::new(0.0, 0.0);
    for (chunk, &w) in sweep.points_inv.chunks_exact(n).zip(&sweep.weights) {
        law.multiply_into(x, chunk, &mut z[..n]);
        if let Some(v) = interp_complex(&kernel.grid, &kernel.values, &z[..n]) {
            acc += v * w;
        }
    }
    acc
}

#[inline(always)]
fn interp_setup(grid: &Grid, x: &[f64], base: &mut [usize; MAX_DIM], frac: &mut [f64; MAX_DIM]) -> bool {
    let n = grid.dim();
    for ax in 0..n {
        let u = (x[ax] + grid.extents()[ax]) / grid.steps()[ax];
        if !(u >= 0.0) || u > (grid.sizes()[ax] - 1) as f64 {
            return false;
        }
        let i = (u.floor() as usize).min(grid.sizes()[ax] - 2);
        base[ax] = i;
        frac[ax] = u - i as f64;
    }
    true
}

#[inline(always)]
fn interp_real(grid: &Grid, values: &[f64], x: &[f64]) -> Option<f64> {
    let n = grid.dim();
    let mut base = [0usize; MAX_DIM];
    let mut frac = [0.0f64; MAX_DIM];
    if !interp_setup(grid, x, &mut base, &mut frac) {
        return None;
    }
    match n {
        1 => {
            let i = base[0];
            let t = frac[0];
            let v0 = values[i];
            let v1 = if i + 1 < grid.sizes()[0] { values[i + 1] } else { 0.0 };
            Some(v0 + t * (v1 - v0))
        }
        3 => {
            let (n1, n2) = (grid.sizes()[1], grid.sizes()[2]);
            let (i, j, k) = (base[0], base[1], base[2]);
            let (t, u, v) = (frac[0], frac[1], frac[2]);
            let at = |a: usize, b: usize, c: usize| -> f64 {
                if a < grid.sizes()[0] && b < n1 && c < n2 {
                    values[(a * n1 + b) * n2 + c]
                } else {
                    0.0
                }
            };
            let lerp = |a: f64, b: f64, t: f64| a + t * (b - a);
            let c00 = lerp(at(i, j, k), at(i + 1, j, k), t);
            let c10 = lerp(at(i, j + 1, k), at(i + 1, j + 1, k), t);
            let c01 = lerp(at(i, j, k + 1), at(i + 1, j, k + 1), t);
            let c11 = lerp(at(i, j + 1, k + 1), at(i + 1, j + 1, k + 1), t);
            Some(lerp(lerp(c00, c10, u), lerp(c01, c11, u), v))
        }
        _ => {
            let mut acc = 0.0;
            let corners = 1usize << n;
            'corner: for c in 0..corners {
                let mut w = 1.0;
                let mut flat = 0usize;
                for ax in 0..n {
                    let hi = (c >> ax) & 1 == 1;
                    let i = base[ax] + hi as usize;
                    if i >= grid.sizes()[ax] {
                        continue 'corner;
                    }
                    w *= if hi { frac[ax] } else { 1.0 - frac[ax] };
                    flat = flat * grid.sizes()[ax] + i;
                }
                if w != 0.0 {
                    acc += values[flat] * w;
                }
            }
            Some(acc)
        }
    }
}

#[inline(always)]
fn interp_complex(grid: &Grid, values: &[Complex64], x: &[f64]) -> Option<Complex64> {
    let n = grid.dim();
    let mut base = [0usize; MAX_DIM];
    let mut frac = [0.0f64; MAX_DIM];
    if !interp_setup(grid, x, &mut base, &mut frac) {
        return None;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let corners = 1usize << n;
    'corner: for c in 0..corners {
        let mut w = 1.0;
        let mut flat = 0usize;
        for ax in 0..n {
            let hi = (c >> ax) & 1 == 1;
            let i = base[ax] + hi as usize;
            if i >= grid.sizes()[ax] {
                continue 'corner;
            }
            w *= if hi { frac[ax] } else { 1.0 - frac[ax] };
            flat = flat * grid.sizes()[ax] + i;
        }
        if w != 0.0 {
            acc += values[flat] * w;
        }
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gauss_grid() -> (HomogeneousGroup, GridFunction) {
        let e1 = HomogeneousGroup::euclidean(1);
        let g = Grid::new(vec![8.0], vec![512]).unwrap();
        let f = GridFunction::sample_real(&g, |x| (-PI * x[0] * x[0]).exp()).unwrap();
        (e1, f)
    }

    #[test]
    fn gaussian_self_convolution() {
        // e^{−πx²} ∗ e^{−πx²} = 2^{−1/2} e^{−πx²/2}
        let (e1, f) = gauss_grid();
        let conv = group_convolve(&e1, &f, &f).unwrap();
        let oracle = GridFunction::sample_real(&f.grid, |x| {
            (0.5f64).sqrt() * (-0.5 * PI * x[0] * x[0]).exp()
        })
        .unwrap();
        let err = conv.sup_abs_diff(&oracle).unwrap();
        assert!(err < 1e-6, "err = {err}");
    }

    #[test]
    fn approximate_identity() {
        // f ∗ (narrow normalized gaussian) ≈ f
        let (e1, f) = gauss_grid();
        let eps = 0.05;
        let narrow = GridFunction::sample_real(&f.grid, |x| {
            (-PI * (x[0] / eps) * (x[0] / eps)).exp() / eps
        })
        .unwrap();
        let conv = group_convolve(&e1, &f, &narrow).unwrap();
        let err = conv.sup_abs_diff(&f).unwrap();
        assert!(err < 5e-3, "err = {err}");
    }

    #[test]
    fn bilinearity() {
        let e1 = HomogeneousGroup::euclidean(1);
        let g = Grid::new(vec![4.0], vec![64]).unwrap();
        let f1 = GridFunction::sample_real(&g, |x| (-x[0] * x[0]).exp()).unwrap();
        let f2 = GridFunction::sample_real(&g, |x| x[0] * (-x[0] * x[0]).exp()).unwrap();
        let h = GridFunction::sample_real(&g, |x| (-2.0 * x[0] * x[0]).exp()).unwrap();
        let a = Complex64::new(2.0, 0.0);
        let b = Complex64::new(-0.75, 0.0);
        let lhs = group_convolve(&e1, &f1.linear_comb(a, &f2, b).unwrap(), &h).unwrap();
        let rhs = group_convolve(&e1, &f1, &h)
            .unwrap()
            .linear_comb(a, &group_convolve(&e1, &f2, &h).unwrap(), b)
            .unwrap();
        let err = lhs.sup_abs_diff(&rhs).unwrap();
        assert!(err < 1e-12, "err = {err}");
    }

    #[test]
    fn heisenberg_noncommutative() {
        let h = HomogeneousGroup::heisenberg();
        let g = Grid::new(vec![3.0, 3.0, 3.0], vec![24, 24, 24]).unwrap();
        let f1 = GridFunction::sample_real(&g, |x| {
            (-(x[0] - 0.5) * (x[0] - 0.5) - x[1] * x[1] - x[2] * x[2]).exp()
        })
        .unwrap();
        let f2 = GridFunction::sample_real(&g, |x| {
            (-x[0] * x[0] - (x[1] - 0.5) * (x[1] - 0.5) - x[2] * x[2]).exp()
        })
        .unwrap();
        let a = group_convolve(&h, &f1, &f2).unwrap();
        let b = group_convolve(&h, &f2, &f1).unwrap();
        let diff = a.sup_abs_diff(&b).unwrap();
        assert!(diff > 1e-4, "convolution unexpectedly commutes, diff = {diff}");
    }

    #[test]
    fn euclidean_matches_fourier_route() {
        // dft(f∗h) = dft(f)·dft(h) for Schwartz-class samples
        let (e1, f) = gauss_grid();
        let h = GridFunction::sample_real(&f.grid, |x| (-2.0 * PI * x[0] * x[0]).exp()).unwrap();
        let conv = group_convolve(&e1, &f, &h).unwrap();
        let lhs = crate::grid::fourier::dft(&conv).unwrap();
        let rhs = crate::grid::fourier::dft(&f)
            .unwrap()
            .mul_pointwise(&crate::grid::fourier::dft(&h).unwrap())
            .unwrap();
        let err = lhs.sup_abs_diff(&rhs).unwrap();
        assert!(err < 1e-6, "err = {err}");
    }

    #[test]
    fn refinement_reduces_error_by_4x_or_more() {
        // On an abelian lattice x·y⁻¹ lands on grid points, so the
        // 2nd-order interpolation error only shows off-lattice; use the
        // Heisenberg group and a fine-quadrature closed-form oracle at
        // probe points shared by the nested grids.
        let h = HomogeneousGroup::heisenberg();
        let r = 2.5;
        let gauss = |x: &[f64]| (-PI * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp();
        let shifted = |x: &[f64]| {
            (-PI * ((x[0] - 0.3) * (x[0] - 0.3) + x[1] * x[1] + (x[2] - 0.2) * (x[2] - 0.2))).exp()
        };

        // oracle: dense quadrature with analytic factors, no interpolation
        let fine = Grid::isotropic(3, r, 96).unwrap();
        let vol = fine.cell_volume();
        let ys: Vec<[f64; 4]> = fine
            .iter_points()
            .map(|(_, y)| [y[0], y[1], y[2], shifted(&y)])
            .collect();
        let oracle = |x: &[f64]| -> f64 {
            let mut acc = 0.0;
            for a in &ys {
                let z0 = x[0] - a[0];
                let z1 = x[1] - a[1];
                let z2 = x[2] - a[2] - 0.5 * (x[0] * a[1] - x[1] * a[0]);
                acc += (-PI * (z0 * z0 + z1 * z1 + z2 * z2)).exp() * a[3];
            }
            acc * vol
        };
        let coarse = Grid::isotropic(3, r, 8).unwrap();
        let mut probes: Vec<Vec<f64>> = Vec::new();
        for i in [2usize, 4, 6] {
            for j in [2usize, 4, 6] {
                for k in [2usize, 4, 6] {
                    probes.push(coarse.point(&[i, j, k]));
                }
            }
        }
        let oracles: Vec<f64> = probes.iter().map(|p| oracle(p)).collect();
        let mut errs = Vec::new();
        for n in [8usize, 16] {
            let g = Grid::isotropic(3, r, n).unwrap();
            let f1 = GridFunction::sample_real(&g, gauss).unwrap();
            let f2 = GridFunction::sample_real(&g, shifted).unwrap();
            let conv = group_convolve(&h, &f1, &f2).unwrap();
            let mean: f64 = probes
                .iter()
                .zip(&oracles)
                .map(|(p, o)| (conv.interpolate(p).re - o).abs())
                .sum::<f64>()
                / probes.len() as f64;
            errs.push(mean);
        }
        assert!(errs[0] / errs[1] >= 4.0, "errs = {errs:?}");
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let e2 = HomogeneousGroup::euclidean(2);
        let g = Grid::new(vec![4.0], vec![64]).unwrap();
        let f = GridFunction::sample_real(&g, |_| 1.0).unwrap();
        assert!(group_convolve(&e2, &f, &f).is_err());
    }

    #[test]
    fn support_threshold_consistent_with_full_sum() {
        let (e1, f) = gauss_grid();
        let full = group_convolve(&e1, &f, &f).unwrap();
        let sparse =
            group_convolve_with(&e1, &f, &f, ConvolveOptions { support_rel_tol: 1e-13 }).unwrap();
        let err = full.sup_abs_diff(&sparse).unwrap();
        assert!(err < 1e-9, "err = {err}");
    }
}
