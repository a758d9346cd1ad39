//! Dyadic decomposition of multipliers.
//!
//! A multiplier of order `j` splits as `m = Σ_k 2^{jk} ψ_k ∘ δ_{2^{-k}}`
//! against a Littlewood–Paley partition of unity; the pieces `ψ_k` are a
//! bounded set in the Schwartz class, supported in a fixed annulus for
//! `k ≥ 1`. Kernel side: `m̌ = Σ_k 2^{(j+Q)k} ψ̌_k ∘ δ_{2^k}`.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HgcError, Result};
use crate::grid::cutoff::CutoffProfile;
use crate::grid::deriv::{schwartz_seminorms, SchwartzSeminormReport};
use crate::grid::fourier::{ft_at_points, idft};
use crate::grid::{Grid, GridFunction};
use crate::group::{gauss_composite, HomogeneousGroup, Multiindex};
use crate::halton::Halton;
use crate::multiplier::Multiplier;

/// Seminorm table caps for the uniform-boundedness certificate.
pub const SEMINORM_DECAY_MAX: usize = 4;
pub const SEMINORM_ALPHA_MAX: usize = 4;

/// The Littlewood–Paley partition: `φ₀` a plateau cutoff (1 inside norm
/// 1/2, 0 outside 2), `φ_k = φ ∘ δ_{2^{-k}}` with the annulus profile
/// `φ(ξ) = φ₀(ξ) − φ₀(δ₂ξ)` supported in `{1/4 ≤ |ξ| ≤ 2}`.
#[derive(Debug, Clone)]
pub struct LittlewoodPaleySystem {
    pub group: HomogeneousGroup,
    profile: CutoffProfile,
}

impl LittlewoodPaleySystem {
    pub fn new(group: &HomogeneousGroup) -> LittlewoodPaleySystem {
        LittlewoodPaleySystem {
            group: group.clone(),
            profile: CutoffProfile::new(0.5, 2.0).expect("static radii"),
        }
    }

    /// `φ₀` as a function of the homogeneous norm.
    #[inline]
    pub fn phi0_norm(&self, t: f64) -> f64 {
        self.profile.eval_norm(t)
    }

    /// The annulus profile `φ` as a function of the norm.
    #[inline]
    pub fn phi_norm(&self, t: f64) -> f64 {
        self.profile.eval_norm(t) - self.profile.eval_norm(2.0 * t)
    }

    /// `φ_k(ξ)` as a function of the norm of `ξ`.
    #[inline]
    pub fn phi_k_norm(&self, k: usize, t: f64) -> f64 {
        if k == 0 {
            self.phi0_norm(t)
        } else {
            let s = 2f64.powi(-(k as i32));
            self.phi_norm(s * t)
        }
    }

    pub fn phi_k(&self, k: usize, xi: &[f64]) -> f64 {
        self.phi_k_norm(k, self.group.homogeneous_norm(xi))
    }

    /// Exact telescoping: `Σ_{k≤K} φ_k(ξ) = φ₀(δ_{2^{-K}} ξ)`.
    pub fn partial_sum_norm(&self, k_max: usize, t: f64) -> f64 {
        self.phi0_norm(2f64.powi(-(k_max as i32)) * t)
    }
}

enum PieceEval {
    /// Closed form (from a closed-form multiplier).
    Closed(Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>),
    /// Direct Fourier quadrature of the space-side kernel piece.
    SpaceQuad,
    /// Multilinear interpolation of the window samples (archive reload).
    WindowInterp,
}

/// A truncated dyadic decomposition: frequency-side pieces on a window
/// grid, kernel-side pieces on its reciprocal, per-piece Schwartz
/// seminorm tables, and point evaluators for reconstruction.
pub struct DyadicDecomposition {
    pub order: f64,
    pub group: HomogeneousGroup,
    pub window_grid: Grid,
    /// `ψ_k` sampled on the window grid.
    pub pieces: Vec<GridFunction>,
    /// `ψ̌_k` on the reciprocal (space) grid.
    pub kernel_pieces: Vec<GridFunction>,
    /// Per-k seminorm tables `(I ≤ 4, ‖α‖ ≤ 4)`.
    pub seminorm_tables: Vec<SchwartzSeminormReport>,
    eval: Vec<PieceEval>,
}

impl std::fmt::Debug for DyadicDecomposition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DyadicDecomposition")
            .field("order", &self.order)
            .field("depth", &self.depth())
            .field("group", &self.group.name())
            .finish()
    }
}

impl DyadicDecomposition {
    /// Number of pieces minus one (pieces run `k = 0..=depth`).
    pub fn depth(&self) -> usize {
        self.pieces.len() - 1
    }

    /// Assemble from space-side kernel pieces `ν_k` (the composition
    /// output path); frequency pieces are their transforms.
    pub fn from_kernel_pieces(
        group: &HomogeneousGroup,
        order: f64,
        kernel_pieces: Vec<GridFunction>,
        compute_tables: bool,
    ) -> Result<DyadicDecomposition> {
        if kernel_pieces.is_empty() {
            return Err(HgcError::InvalidArgument("no kernel pieces".into()));
        }
        let space_grid = kernel_pieces[0].grid.clone();
        let window_grid = space_grid.reciprocal();
        let pieces: Vec<GridFunction> = kernel_pieces
            .iter()
            .map(crate::grid::fourier::dft)
            .collect::<Result<_>>()?;
        let seminorm_tables = if compute_tables {
            pieces
                .iter()
                .map(|p| schwartz_seminorms(group, p, SEMINORM_DECAY_MAX, SEMINORM_ALPHA_MAX))
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        let eval = (0..pieces.len()).map(|_| PieceEval::SpaceQuad).collect();
        Ok(DyadicDecomposition {
            order,
            group: group.clone(),
            window_grid,
            pieces,
            kernel_pieces,
            seminorm_tables,
            eval,
        })
    }

    /// Evaluate piece `k` at an arbitrary frequency point.
    pub fn eval_piece(&self, k: usize, w: &[f64]) -> Complex64 {
        match &self.eval[k] {
            PieceEval::Closed(f) => f(w),
            PieceEval::WindowInterp => self.pieces[k].interpolate(w),
            PieceEval::SpaceQuad => ft_at_points(&self.kernel_pieces[k], &[w.to_vec()])[0],
        }
    }

    /// `Σ_{k≤K} 2^{jk} ψ_k(δ_{2^{-k}} ξ)`.
    pub fn eval_sum(&self, xi: &[f64], truncation: usize) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..=truncation.min(self.depth()) {
            let w = self.group.dilate_unchecked(xi, 2f64.powi(-(k as i32)));
            if k >= 1 && !matches!(self.eval[k], PieceEval::SpaceQuad) {
                // ψ_k vanishes outside 1/4 ≤ |w| ≤ 2
                let t = self.group.homogeneous_norm(&w);
                if !(0.2..=2.2).contains(&t) {
                    continue;
                }
            }
            acc += self.eval_piece(k, &w) * 2f64.powf(self.order * k as f64);
        }
        acc
    }

    /// Batched version of [`eval_sum`]; space-quadrature pieces sweep the
    /// kernel grid once per (piece, point) in parallel.
    pub fn eval_sum_many(&self, points: &[Vec<f64>], truncation: usize) -> Vec<Complex64> {
        let mut acc = vec![Complex64::new(0.0, 0.0); points.len()];
        for k in 0..=truncation.min(self.depth()) {
            let scale = 2f64.powf(self.order * k as f64);
            let rescaled: Vec<Vec<f64>> = points
                .iter()
                .map(|p| self.group.dilate_unchecked(p, 2f64.powi(-(k as i32))))
                .collect();
            match &self.eval[k] {
                PieceEval::SpaceQuad => {
                    let vals = ft_at_points(&self.kernel_pieces[k], &rescaled);
                    for (a, v) in acc.iter_mut().zip(vals) {
                        *a += v * scale;
                    }
                }
                _ => {
                    let vals: Vec<Complex64> =
                        rescaled.par_iter().map(|w| self.eval_piece(k, w)).collect();
                    for (a, v) in acc.iter_mut().zip(vals) {
                        *a += v * scale;
                    }
                }
            }
        }
        acc
    }

    /// The truncated sum as a `Multiplier` of order `j`.
    pub fn partial_sum(self: &Arc<Self>, truncation: usize) -> Multiplier {
        Multiplier::from_dyadic_sum(self.clone(), truncation)
    }

    /// Max seminorm-table entry per piece.
    pub fn table_maxima(&self) -> Vec<f64> {
        self.seminorm_tables.iter().map(|t| t.max()).collect()
    }

    /// Kernel-side piece `f_k = 2^{(j+Q)k} ψ̌_k ∘ δ_{2^k}` resampled on
    /// the space grid by interpolation.
    pub fn scaled_kernel_piece(&self, k: usize) -> Result<GridFunction> {
        let q = self.group.homogeneous_dimension();
        let factor = 2f64.powf((self.order + q) * k as f64);
        let dilated = self.kernel_pieces[k].dilate(&self.group, 2f64.powi(k as i32))?;
        Ok(dilated.scale(Complex64::new(factor, 0.0)))
    }

    /// Dense truncated kernel `Σ_{k≤K} f_k` on the space grid.
    pub fn dense_kernel(&self, truncation: usize) -> Result<GridFunction> {
        let mut acc = GridFunction::zeros(&self.kernel_pieces[0].grid);
        for k in 0..=truncation.min(self.depth()) {
            let fk = self.scaled_kernel_piece(k)?;
            acc = acc.linear_comb(Complex64::new(1.0, 0.0), &fk, Complex64::new(1.0, 0.0))?;
        }
        Ok(acc)
    }
}

/// Decompose a multiplier into rescaled window pieces
/// `ψ₀ = φ₀·m`, `ψ_k = 2^{-jk} φ·(m ∘ δ_{2^k})` on the window grid.
///
/// The window grid must have power-of-two sizes (kernel pieces come from
/// `idft`) and cover the annulus `{|ξ| ≤ 2}`.
pub fn decompose(
    m: &Multiplier,
    window: &Grid,
    depth: usize,
) -> Result<DyadicDecomposition> {
    if !m.is_global() {
        return Err(HgcError::InvalidArgument(
            "decompose needs a multiplier evaluable on rescaled windows (closed form or dyadic sum)"
                .into(),
        ));
    }
    let group = m.group.clone();
    if window.dim() != group.dimension() {
        return Err(HgcError::GridMismatch("window grid dimension != group dimension".into()));
    }
    let lp = LittlewoodPaleySystem::new(&group);
    let order = m.order;

    let mut pieces = Vec::with_capacity(depth + 1);
    let mut eval: Vec<PieceEval> = Vec::with_capacity(depth + 1);
    for k in 0..=depth {
        let scale = 2f64.powf(-order * k as f64);
        let two_k = 2f64.powi(k as i32);
        let mk = m.clone();
        let lpk = lp.clone();
        let field = move |w: &[f64]| -> Complex64 {
            let t = lpk.group.homogeneous_norm(w);
            let profile = if k == 0 { lpk.phi0_norm(t) } else { lpk.phi_norm(t) };
            if profile == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            mk.eval(&lpk.group.dilate_unchecked(w, two_k)) * (profile * scale)
        };
        let samples = GridFunction::sample(window, &field)?;
        pieces.push(samples);
        eval.push(PieceEval::Closed(Arc::new(field)));
    }

    // support check: annulus pieces vanish on {|w| < 1/4}
    for (k, p) in pieces.iter().enumerate().skip(1) {
        for (fl, w) in window.iter_points() {
            if group.homogeneous_norm(&w) < 0.25 && p.values[fl].norm() != 0.0 {
                return Err(HgcError::InvalidArgument(format!(
                    "piece {k} fails its support invariant"
                )));
            }
        }
    }

    let kernel_pieces: Vec<GridFunction> = pieces.iter().map(idft).collect::<Result<_>>()?;
    let seminorm_tables: Vec<SchwartzSeminormReport> = pieces
        .iter()
        .map(|p| schwartz_seminorms(&group, p, SEMINORM_DECAY_MAX, SEMINORM_ALPHA_MAX))
        .collect::<Result<_>>()?;

    Ok(DyadicDecomposition {
        order,
        group,
        window_grid: window.clone(),
        pieces,
        kernel_pieces,
        seminorm_tables,
        eval,
    })
}

/// Sample the truncated reconstruction `Σ_{k≤K} 2^{jk} ψ_k ∘ δ_{2^{-k}}`
/// on a frequency grid.
pub fn reconstruct(dd: &Arc<DyadicDecomposition>, truncation: usize, grid: &Grid) -> Result<GridFunction> {
    dd.partial_sum(truncation).sample(grid)
}

/// Convergence report for the smooth-tail sums: per-(I, J, α) term
/// sequences `t_k = 2^{Ik} sup_{|x|>r} |x|^J |(∂^α ψ̌_k)(δ_{2^k} x)|` and
/// their partial-sum behavior.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailSmoothnessReport {
    pub tail_radius: f64,
    pub rows: Vec<TailRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailRow {
    pub decay_exponent: usize,
    pub power: usize,
    pub alpha: Multiindex,
    pub terms: Vec<f64>,
    /// Absolute quadrature noise amplified by the row weights; terms at
    /// or below this level carry no information.
    pub noise_floor: Vec<f64>,
}

impl TailRow {
    /// Successive term ratios (geometric-convergence certificate).
    pub fn ratios(&self) -> Vec<f64> {
        self.terms.windows(2).map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 }).collect()
    }

    /// Indices whose term exceeds the noise floor.
    pub fn meaningful(&self) -> Vec<bool> {
        self.terms.iter().zip(&self.noise_floor).map(|(t, f)| t > f).collect()
    }

    pub fn partial_sums(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.terms
            .iter()
            .map(|t| {
                acc += t;
                acc
            })
            .collect()
    }
}

/// Verify the absolute convergence of `(1−ζ)m̌ = Σ (1−ζ)f_k` in the
/// Schwartz topology: the tail terms must decay geometrically in `k`.
///
/// Piece derivatives at rescaled tail points are evaluated by adaptive
/// quadrature against the window samples or the closed-form pieces, so
/// the check reaches far beyond the kernel grid's box.
pub fn tail_smoothness_check(
    dd: &DyadicDecomposition,
    zeta: &CutoffProfile,
    max_ij: usize,
) -> Result<TailSmoothnessReport> {
    let group = &dd.group;
    let n = group.dimension();
    let r = zeta.r1;
    // tail sample points with |x| in [r, 2r]
    let mut h = Halton::new(n + 1);
    let mut points = Vec::new();
    while points.len() < 24 {
        let u = h.next_point();
        let dir: Vec<f64> = u[0..n].iter().map(|&t| 2.0 * t - 1.0).collect();
        let norm = group.homogeneous_norm(&dir);
        if norm < 1e-9 {
            continue;
        }
        let radius = r * (1.0 + u[n]);
        points.push((group.dilate_unchecked(&dir, radius / norm), radius));
    }

    let mut alphas = vec![Multiindex::zeros(n)];
    for j in 0..n {
        alphas.push(Multiindex::unit(n, j));
    }

    let mut rows = Vec::new();
    for alpha in &alphas {
        // |∂^α ψ̌_k(δ_{2^k} x)| for each piece and tail point
        let mut per_k_sup: Vec<Vec<f64>> = Vec::new();
        for k in 0..=dd.depth() {
            let two_k = 2f64.powi(k as i32);
            let vals: Vec<f64> = points
                .par_iter()
                .map(|(x, _)| {
                    let z = group.dilate_unchecked(x, two_k);
                    piece_derivative_at(dd, k, alpha, &z).norm()
                })
                .collect();
            per_k_sup.push(vals);
        }
        for i in 0..=max_ij {
            for j in 0..=max_ij {
                let terms: Vec<f64> = (0..=dd.depth())
                    .map(|k| {
                        let w = 2f64.powi((i * k) as i32);
                        points
                            .iter()
                            .zip(&per_k_sup[k])
                            .map(|((_, radius), v)| v * radius.powi(j as i32))
                            .fold(0.0f64, f64::max)
                            * w
                    })
                    .collect();
                // oscillatory quadrature reaches a few 1e-14 absolute
                // accuracy; the row weights and the (2πw)^α integrand
                // factor amplify that floor
                let deriv_amp =
                    (2.0 * std::f64::consts::PI * 2.5).powi(alpha.length() as i32);
                let noise_floor: Vec<f64> = (0..=dd.depth())
                    .map(|k| {
                        2f64.powi((i * k) as i32) * (2.0 * r).powi(j as i32) * deriv_amp * 4e-14
                    })
                    .collect();
                rows.push(TailRow {
                    decay_exponent: i,
                    power: j,
                    alpha: alpha.clone(),
                    terms,
                    noise_floor,
                });
            }
        }
    }
    Ok(TailSmoothnessReport { tail_radius: r, rows })
}

/// `(∂^α ψ̌_k)(z) = ∫ (2πi w)^α ψ_k(w) e^{2πi z·w} dw`, by quadrature
/// adapted to the oscillation length at `z`.
fn piece_derivative_at(
    dd: &DyadicDecomposition,
    k: usize,
    alpha: &Multiindex,
    z: &[f64],
) -> Complex64 {
    let n = dd.group.dimension();
    if n == 1 {
        // adaptive 1-d quadrature over the window support
        let ext = dd.window_grid.extents()[0].min(2.5);
        let panels = (16.0 + 4.0 * z[0].abs() * ext).ceil() as usize;
        let e = alpha.0[0] as i32;
        let re = gauss_composite(-ext, ext, panels.min(200_000), |w| {
            let psi = dd.eval_piece(k, &[w]);
            let phase = 2.0 * std::f64::consts::PI * z[0] * w;
            let factor = Complex64::new(0.0, 2.0 * std::f64::consts::PI * w).powi(e);
            (psi * factor * Complex64::from_polar(1.0, phase)).re
        });
        let im = gauss_composite(-ext, ext, panels.min(200_000), |w| {
            let psi = dd.eval_piece(k, &[w]);
            let phase = 2.0 * std::f64::consts::PI * z[0] * w;
            let factor = Complex64::new(0.0, 2.0 * std::f64::consts::PI * w).powi(e);
            (psi * factor * Complex64::from_polar(1.0, phase)).im
        });
        return Complex64::new(re, im);
    }
    // n-d: grid-sum quadrature of the window samples; valid while the
    // oscillation is resolved, i.e. |z_ax·Δw_ax| ≤ 1/2 per axis
    let grid = &dd.pieces[k].grid;
    let nyquist_ok = (0..n).all(|ax| z[ax].abs() * grid.steps()[ax] <= 0.5);
    if !nyquist_ok {
        return Complex64::new(0.0, 0.0);
    }
    let vol = grid.cell_volume();
    let mut acc = Complex64::new(0.0, 0.0);
    for (fl, w) in grid.iter_points() {
        let psi = dd.pieces[k].values[fl];
        if psi.norm() == 0.0 {
            continue;
        }
        let mut factor = Complex64::new(1.0, 0.0);
        for (ax, &e) in alpha.0.iter().enumerate() {
            if e > 0 {
                factor *= Complex64::new(0.0, 2.0 * std::f64::consts::PI * w[ax]).powi(e as i32);
            }
        }
        let phase: f64 = 2.0 * std::f64::consts::PI * z.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
        acc += psi * factor * Complex64::from_polar(1.0, phase);
    }
    acc * vol
}

/// Manifest of a decomposition archive directory.
#[derive(Debug, Serialize, Deserialize)]
pub struct ArchiveManifest {
    pub order: f64,
    pub depth: usize,
    pub group: crate::group::GroupDefinition,
    pub group_name: String,
    pub seminorm_tables: Vec<SchwartzSeminormReport>,
}

/// Write `manifest.json` plus `psi_<k>.{bin,json}` under `dir`.
pub fn write_archive(dir: &Path, dd: &DyadicDecomposition) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let manifest = ArchiveManifest {
        order: dd.order,
        depth: dd.depth(),
        group: group_definition(&dd.group),
        group_name: dd.group.name().to_string(),
        seminorm_tables: dd.seminorm_tables.clone(),
    };
    serde_json::to_writer_pretty(
        std::io::BufWriter::new(std::fs::File::create(dir.join("manifest.json"))?),
        &manifest,
    )?;
    for (k, p) in dd.pieces.iter().enumerate() {
        crate::grid::io::write_grid_function(&dir.join(format!("psi_{k}")), p)?;
    }
    Ok(())
}

/// Reload an archive; reconstruction uses window interpolation.
pub fn read_archive(dir: &Path) -> Result<DyadicDecomposition> {
    let manifest: ArchiveManifest = serde_json::from_reader(std::io::BufReader::new(
        std::fs::File::open(dir.join("manifest.json"))?,
    ))?;
    let group = HomogeneousGroup::from_definition(&manifest.group_name, &manifest.group)?;
    let mut pieces = Vec::new();
    for k in 0..=manifest.depth {
        pieces.push(crate::grid::io::read_grid_function(&dir.join(format!("psi_{k}")))?);
    }
    let window_grid = pieces[0].grid.clone();
    let kernel_pieces: Vec<GridFunction> = pieces.iter().map(idft).collect::<Result<_>>()?;
    let eval = (0..pieces.len()).map(|_| PieceEval::WindowInterp).collect();
    Ok(DyadicDecomposition {
        order: manifest.order,
        group,
        window_grid,
        pieces,
        kernel_pieces,
        seminorm_tables: manifest.seminorm_tables,
        eval,
    })
}

pub(crate) fn group_definition(group: &HomogeneousGroup) -> crate::group::GroupDefinition {
    crate::group::GroupDefinition {
        dimension: group.dimension(),
        weights: group
            .weights_exact()
            .iter()
            .map(|r| crate::group::WeightSpec::Fraction(format!("{}/{}", r.numer(), r.denom())))
            .collect(),
        law: group.law().per_coordinate.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::builtin;

    fn window_1d() -> Grid {
        Grid::new(vec![8.0], vec![512]).unwrap().reciprocal()
    }

    #[test]
    fn lp_partition_properties() {
        let e1 = HomogeneousGroup::euclidean(1);
        let lp = LittlewoodPaleySystem::new(&e1);
        assert_eq!(lp.phi0_norm(0.0), 1.0);
        // φ₀ + φ₁ = 1 at |ξ| = 1
        let t = 1.0;
        let sum = lp.phi_k_norm(0, t) + lp.phi_k_norm(1, t);
        assert!((sum - 1.0).abs() < 1e-12, "sum = {sum}");
        // φ₃ = φ₁ ∘ δ_{2^{-2}} pointwise
        for t in [0.5, 1.7, 3.0, 9.0] {
            let phi3 = lp.phi_k_norm(3, t);
            let phi1_rescaled = {
                // φ₁(ξ) = φ₀(δ_{1/2}ξ) − φ₀(ξ)
                let s = 0.25 * t;
                lp.phi0_norm(0.5 * s) - lp.phi0_norm(s)
            };
            assert!((phi3 - phi1_rescaled).abs() < 1e-12);
        }
        // partition of unity on |ξ| ≤ 2^{K-1}
        for k_max in [4usize, 8] {
            for i in 0..200 {
                let t = 2f64.powi(k_max as i32 - 1) * i as f64 / 200.0;
                let s: f64 = (0..=k_max).map(|k| lp.phi_k_norm(k, t)).sum();
                assert!((s - 1.0).abs() < 1e-10, "K={k_max} t={t} sum={s}");
            }
        }
        // supports
        assert_eq!(lp.phi_norm(0.24), 0.0);
        assert_eq!(lp.phi_norm(2.01), 0.0);
        assert!(lp.phi_norm(1.0) > 0.0);
    }

    #[test]
    fn decompose_constant_reproduces_partition() {
        let e1 = HomogeneousGroup::euclidean(1);
        let m = builtin::constant(&e1);
        let dd = decompose(&m, &window_1d(), 6).unwrap();
        let lp = LittlewoodPaleySystem::new(&e1);
        // ψ_0 = φ_0, ψ_k = φ for k ≥ 1
        for (fl, w) in dd.window_grid.iter_points() {
            let t = e1.homogeneous_norm(&w);
            assert!((dd.pieces[0].values[fl].re - lp.phi0_norm(t)).abs() < 1e-14);
            assert!((dd.pieces[3].values[fl].re - lp.phi_norm(t)).abs() < 1e-14);
        }
    }

    #[test]
    fn reconstruct_round_trip_1d() {
        let e1 = HomogeneousGroup::euclidean(1);
        let m = builtin::euclidean_bracket(&e1, 1.0);
        let dd = Arc::new(decompose(&m, &window_1d(), 6).unwrap());
        // sup relative error on |ξ| ≤ 4 below 1e-8 with K = 6
        let mut worst = 0.0f64;
        for i in 0..400 {
            let xi = [-4.0 + 8.0 * i as f64 / 399.0];
            let recon = dd.eval_sum(&xi, 6);
            let exact = m.eval(&xi);
            worst = worst.max((recon - exact).norm() / exact.norm());
        }
        assert!(worst < 1e-8, "worst rel error = {worst}");
    }

    #[test]
    fn reconstruct_constant_on_guaranteed_region() {
        let e1 = HomogeneousGroup::euclidean(1);
        let m = builtin::constant(&e1);
        let dd = Arc::new(decompose(&m, &window_1d(), 8).unwrap());
        for i in 0..100 {
            let xi = [2f64.powi(7) * (i as f64 + 1.0) / 100.0];
            let recon = dd.eval_sum(&xi, 8);
            assert!((recon.re - 1.0).abs() < 1e-10, "xi={} recon={recon}", xi[0]);
        }
    }

    #[test]
    fn growth_bound_of_partial_sums() {
        // |Σ m_k| ≤ C (1+|ξ|)^j over the covered region
        let e1 = HomogeneousGroup::euclidean(1);
        let m = builtin::euclidean_bracket(&e1, 1.0);
        let dd = Arc::new(decompose(&m, &window_1d(), 8).unwrap());
        let mut c_best = 0.0f64;
        for i in 0..300 {
            let xi = [256.0 * i as f64 / 299.0];
            let v = dd.eval_sum(&xi, 8).norm();
            c_best = c_best.max(v / (1.0 + xi[0].abs()));
        }
        assert!(c_best.is_finite() && c_best < 3.0, "C = {c_best}");
    }

    #[test]
    fn uniform_boundedness_tables_stabilize() {
        let e1 = HomogeneousGroup::euclidean(1);
        let m = builtin::euclidean_bracket(&e1, 1.0);
        let dd = decompose(&m, &window_1d(), 8).unwrap();
        let maxima = dd.table_maxima();
        let up_to = |k: usize| maxima[..=k].iter().cloned().fold(0.0f64, f64::max);
        let m4 = up_to(4);
        let m8 = up_to(8);
        assert!((m8 - m4).abs() / m8 < 0.01, "max_4 = {m4}, max_8 = {m8}");
        // moment-freeness: transform-side flatness of annulus pieces is
        // structural; kernel pieces integrate to ~0
        for k in 1..=8 {
            let z = dd.kernel_pieces[k].integral().norm();
            assert!(z < 1e-10, "piece {k} zeroth moment {z}");
        }
    }

    #[test]
    fn archive_round_trip() {
        let e1 = HomogeneousGroup::euclidean(1);
        let m = builtin::euclidean_bracket(&e1, 0.5);
        let dd = decompose(&m, &window_1d(), 4).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_archive(dir.path(), &dd).unwrap();
        let back = read_archive(dir.path()).unwrap();
        assert_eq!(back.order, 0.5);
        assert_eq!(back.depth(), 4);
        assert_eq!(back.pieces[2].values, dd.pieces[2].values);
        assert_eq!(back.group.name(), "euclidean:1");
    }

    #[test]
    fn tail_terms_decay_geometrically() {
        let e1 = HomogeneousGroup::euclidean(1);
        let m = builtin::constant(&e1);
        let dd = decompose(&m, &window_1d(), 8).unwrap();
        let zeta = CutoffProfile::new(0.5, 1.0).unwrap();
        let report = tail_smoothness_check(&dd, &zeta, 3).unwrap();
        // every (I ≤ 3, J ≤ 3, α) row: ratio test value < 1/2 beyond
        // k = 2, on terms above the quadrature noise floor
        for row in &report.rows {
            let ok = row.meaningful();
            for (k, r) in row.ratios().iter().enumerate() {
                if k >= 2 && ok[k] && ok[k + 1] {
                    assert!(
                        *r < 0.5,
                        "row (I={}, J={}, α={:?}) ratio at k={k} is {r}",
                        row.decay_exponent,
                        row.power,
                        row.alpha
                    );
                }
            }
        }
    }

    #[test]
    fn tail_partial_sums_stabilize_for_order_one() {
        let e1 = HomogeneousGroup::euclidean(1);
        let m = builtin::euclidean_bracket(&e1, 1.0);
        let dd = decompose(&m, &window_1d(), 8).unwrap();
        let zeta = CutoffProfile::new(0.5, 1.0).unwrap();
        let report = tail_smoothness_check(&dd, &zeta, 3).unwrap();
        for row in &report.rows {
            let sums = row.partial_sums();
            let last_delta = (sums[8] - sums[7]).abs();
            let allowance = 1e-8 + 2.0 * row.noise_floor[8];
            assert!(
                last_delta < allowance,
                "row (I={}, J={}) last increment {last_delta} vs {allowance}",
                row.decay_exponent,
                row.power
            );
        }
    }

    #[test]
    fn single_piece_tail_report() {
        let e1 = HomogeneousGroup::euclidean(1);
        let m = builtin::constant(&e1);
        let dd = decompose(&m, &window_1d(), 0).unwrap();
        let zeta = CutoffProfile::new(0.5, 1.0).unwrap();
        let report = tail_smoothness_check(&dd, &zeta, 2).unwrap();
        for row in &report.rows {
            assert_eq!(row.terms.len(), 1);
            assert!(row.terms[0].is_finite());
        }
    }
}
