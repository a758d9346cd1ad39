//! Multiplier classes on the frequency side: seminorms, order
//! diagnostics, Hörmander-class scoring, and kernel transforms.

pub mod lp;

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{HgcError, Result};
use crate::grid::deriv::partial_derivative;
use crate::grid::fourier::{dft, ft_at_points, idft};
use crate::grid::{Grid, GridFunction};
use crate::group::poly::Multiindex;
use crate::group::HomogeneousGroup;
use crate::halton::Halton;
pub use lp::{decompose, DyadicDecomposition, LittlewoodPaleySystem};

type FieldFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// A frequency-side symbol of declared order `j`, evaluable at arbitrary
/// points.
#[derive(Clone)]
pub struct Multiplier {
    pub order: f64,
    pub group: HomogeneousGroup,
    source: MultiplierSource,
}

#[derive(Clone)]
enum MultiplierSource {
    Closed(FieldFn),
    /// Samples on a frequency grid, multilinear interpolation, zero outside.
    FreqGrid(Arc<GridFunction>),
    /// Truncated dyadic sum `Σ_{k≤K} 2^{jk} ψ_k(δ_{2^{-k}} ξ)`.
    DyadicSum { dd: Arc<DyadicDecomposition>, truncation: usize },
}

impl std::fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Multiplier")
            .field("order", &self.order)
            .field("group", &self.group.name())
            .finish()
    }
}

impl Multiplier {
    pub fn closed<F>(group: &HomogeneousGroup, order: f64, field: F) -> Multiplier
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Multiplier { order, group: group.clone(), source: MultiplierSource::Closed(Arc::new(field)) }
    }

    pub fn closed_real<F>(group: &HomogeneousGroup, order: f64, field: F) -> Multiplier
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Multiplier::closed(group, order, move |xi| Complex64::new(field(xi), 0.0))
    }

    pub fn from_grid(group: &HomogeneousGroup, order: f64, samples: GridFunction) -> Multiplier {
        Multiplier {
            order,
            group: group.clone(),
            source: MultiplierSource::FreqGrid(Arc::new(samples)),
        }
    }

    pub(crate) fn from_dyadic_sum(
        dd: Arc<DyadicDecomposition>,
        truncation: usize,
    ) -> Multiplier {
        Multiplier {
            order: dd.order,
            group: dd.group.clone(),
            source: MultiplierSource::DyadicSum { dd, truncation },
        }
    }

    /// Whether the evaluator is usable at arbitrary points (not clipped to
    /// a sampling box).
    pub fn is_global(&self) -> bool {
        !matches!(self.source, MultiplierSource::FreqGrid(_))
    }

    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        match &self.source {
            MultiplierSource::Closed(f) => f(xi),
            MultiplierSource::FreqGrid(g) => g.interpolate(xi),
            MultiplierSource::DyadicSum { dd, truncation } => dd.eval_sum(xi, *truncation),
        }
    }

    /// Sample onto a frequency grid.
    pub fn sample(&self, grid: &Grid) -> Result<GridFunction> {
        match &self.source {
            MultiplierSource::DyadicSum { dd, truncation } => {
                // batch evaluation (piece evaluators may sweep a grid each)
                let points: Vec<Vec<f64>> = grid.iter_points().map(|(_, p)| p).collect();
                let values = dd.eval_sum_many(&points, *truncation);
                Ok(GridFunction { grid: grid.clone(), values, border: vec![0; grid.dim()] })
            }
            _ => GridFunction::sample(grid, |xi| self.eval(xi)),
        }
    }

    /// The coordinate derivative `∂_axis m` as a new multiplier of order
    /// `j − a_axis`, evaluated by anisotropic central differences.
    pub fn derivative(&self, axis: usize) -> Multiplier {
        let weights = self.group.weights().to_vec();
        let inner = self.clone();
        let a = weights[axis];
        let order = self.order - a;
        let group = self.group.clone();
        Multiplier::closed(&group.clone(), order, move |xi| {
            let scale = 1.0 + inner.group.homogeneous_norm(xi);
            let h = 0.005 * scale.powf(a);
            let mut p = xi.to_vec();
            let at = |p: &mut Vec<f64>, t: f64| {
                p[axis] = xi[axis] + t;
                inner.eval(p)
            };
            (at(&mut p, -2.0 * h) - at(&mut p, -h) * 8.0 + at(&mut p, h) * 8.0
                - at(&mut p, 2.0 * h))
                / (12.0 * h)
        })
    }
}

/// Built-in test multipliers.
pub mod builtin {
    use super::*;

    /// `m ≡ 1`, order 0.
    pub fn constant(group: &HomogeneousGroup) -> Multiplier {
        Multiplier::closed_real(group, 0.0, |_| 1.0)
    }

    /// `⟨ξ⟩^j = (1+‖ξ‖²)^{j/2}` in the Euclidean norm.
    pub fn euclidean_bracket(group: &HomogeneousGroup, j: f64) -> Multiplier {
        Multiplier::closed_real(group, j, move |xi| {
            let e2: f64 = xi.iter().map(|t| t * t).sum();
            (1.0 + e2).powf(0.5 * j)
        })
    }

    /// Smoothed homogeneous-norm power `(1 + Σ ξᵢ^{2A/aᵢ})^{j/(2A)}`; the
    /// inner sum is a polynomial for the built-in groups, so this is
    /// smooth everywhere and grows like `|ξ|^j`.
    pub fn homogeneous_power(group: &HomogeneousGroup, j: f64) -> Multiplier {
        let g = group.clone();
        let two_a = 2.0
            * g.weights_exact().iter().map(|r| crate::group::ratio_to_f64(r)).product::<f64>();
        let exps: Vec<f64> = g.weights().iter().map(|&a| two_a / a).collect();
        Multiplier::closed_real(group, j, move |xi| {
            let s: f64 = xi.iter().zip(&exps).map(|(&t, &e)| t.abs().powf(e)).sum();
            (1.0 + s).powf(j / two_a)
        })
    }

    /// Homogeneous of degree `j` with respect to `δ₂` only (outside a
    /// compact set): `|ξ|^j (1 + 0.3 sin(2π log₂|ξ|))`, cut off near 0.
    pub fn dyadic_homogeneous(group: &HomogeneousGroup, j: f64) -> Multiplier {
        let g = group.clone();
        let window = crate::grid::cutoff::CutoffProfile::new(0.5, 1.0).expect("static radii");
        Multiplier::closed_real(group, j, move |xi| {
            let t = g.homogeneous_norm(xi);
            let w = window.eval_norm_outer(t);
            if w == 0.0 {
                return 0.0;
            }
            w * t.powf(j) * (1.0 + 0.3 * (2.0 * std::f64::consts::PI * t.log2()).sin())
        })
    }

    /// Resolve a named built-in, e.g. `"bracket:1.0"`,
    /// `"homogeneous:0.5"`, `"dyadic:1.0"`, `"constant"`.
    pub fn by_name(group: &HomogeneousGroup, name: &str) -> Result<Multiplier> {
        if name == "constant" {
            return Ok(constant(group));
        }
        let (kind, arg) = name
            .split_once(':')
            .ok_or_else(|| HgcError::InvalidArgument(format!("unknown multiplier '{name}'")))?;
        let j: f64 = arg
            .parse()
            .map_err(|_| HgcError::InvalidArgument(format!("bad order in '{name}'")))?;
        match kind {
            "bracket" => Ok(euclidean_bracket(group, j)),
            "homogeneous" => Ok(homogeneous_power(group, j)),
            "dyadic" => Ok(dyadic_homogeneous(group, j)),
            _ => Err(HgcError::InvalidArgument(format!("unknown multiplier kind '{kind}'"))),
        }
    }
}

/// `‖J‖_{N} = Σ_{|α|≤N} sup (1+|ξ|)^{|α|−j} |∂^α J|` with per-α breakdown.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MultiplierSeminorm {
    pub order: f64,
    pub n_max: usize,
    pub total: f64,
    pub per_alpha: Vec<(Vec<usize>, f64)>,
}

impl MultiplierSeminorm {
    /// Largest single-α entry (the proof's `C_i = max C_{i,α}`).
    pub fn max_entry(&self) -> f64 {
        self.per_alpha.iter().map(|(_, v)| *v).fold(0.0, f64::max)
    }
}

/// Compute the multiplier seminorm of `m` over a frequency grid, using
/// weighted multiindex degrees `|α| ≤ N`.
pub fn multiplier_seminorm(m: &Multiplier, grid: &Grid, n_max: usize) -> Result<MultiplierSeminorm> {
    let samples = m.sample(grid)?;
    multiplier_seminorm_of_samples(&m.group, &samples, m.order, n_max)
}

pub fn multiplier_seminorm_of_samples(
    group: &HomogeneousGroup,
    samples: &GridFunction,
    order: f64,
    n_max: usize,
) -> Result<MultiplierSeminorm> {
    let n = samples.dim();
    let weights = group.weights();
    let mut per_alpha = Vec::new();
    let mut total = 0.0;
    for alpha in Multiindex::up_to_length(n, n_max) {
        let wdeg = alpha.weighted_degree(weights);
        if wdeg > n_max as f64 + 1e-9 {
            continue;
        }
        let d = partial_derivative(samples, &alpha)?;
        let mut sup = 0.0f64;
        for (fl, xi) in d.grid.iter_points() {
            let idx = d.grid.unflatten(fl);
            if !d.is_valid_index(&idx) {
                continue;
            }
            let w = (1.0 + group.homogeneous_norm(&xi)).powf(wdeg - order);
            sup = sup.max(d.values[fl].norm() * w);
        }
        total += sup;
        per_alpha.push((alpha.0.clone(), sup));
    }
    Ok(MultiplierSeminorm { order, n_max, total, per_alpha })
}

/// Hörmander-class table: `sup ⟨ξ⟩^{−m+ρ‖α‖}|∂^α p|` with the Euclidean
/// bracket `⟨ξ⟩ = (1+‖ξ‖²)^{1/2}`, plus the norm-bridge constants
/// `c (1+|ξ|) ≤ ⟨ξ⟩ ≤ C (1+|ξ|)^{aₙ}` measured on the grid.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HormanderReport {
    pub rho: f64,
    pub order: f64,
    pub per_alpha: Vec<(Vec<usize>, f64)>,
    pub total: f64,
    pub bridge_c_lower: f64,
    pub bridge_c_upper: f64,
}

pub fn hormander_seminorm(
    m: &Multiplier,
    grid: &Grid,
    rho: f64,
    order: f64,
    n_max: usize,
) -> Result<HormanderReport> {
    let samples = m.sample(grid)?;
    let n = samples.dim();
    let group = &m.group;
    let a_n = *group.weights().last().unwrap();
    let mut per_alpha = Vec::new();
    let mut total = 0.0;
    for alpha in Multiindex::up_to_length(n, n_max) {
        let d = partial_derivative(&samples, &alpha)?;
        let mut sup = 0.0f64;
        for (fl, xi) in d.grid.iter_points() {
            let idx = d.grid.unflatten(fl);
            if !d.is_valid_index(&idx) {
                continue;
            }
            let e2: f64 = xi.iter().map(|t| t * t).sum();
            let bracket = (1.0 + e2).sqrt();
            let w = bracket.powf(-order + rho * alpha.length() as f64);
            sup = sup.max(d.values[fl].norm() * w);
        }
        total += sup;
        per_alpha.push((alpha.0.clone(), sup));
    }
    let mut c_lower = f64::INFINITY;
    let mut c_upper = 0.0f64;
    for (_, xi) in grid.iter_points() {
        let e2: f64 = xi.iter().map(|t| t * t).sum();
        let bracket = (1.0 + e2).sqrt();
        let hn = 1.0 + group.homogeneous_norm(&xi);
        c_lower = c_lower.min(bracket / hn);
        c_upper = c_upper.max(bracket / hn.powf(a_n));
    }
    Ok(HormanderReport {
        rho,
        order,
        per_alpha,
        total,
        bridge_c_lower: c_lower,
        bridge_c_upper: c_upper,
    })
}

/// Least-squares dyadic slope of `log₂ sup_{annulus k} |m|` against `k`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct OrderFit {
    pub slope: f64,
    pub residual: f64,
    pub annuli: Vec<(i32, f64)>,
}

/// Fit the growth order of `m` over dyadic annuli `2^{k-1} < |ξ| ≤ 2^k`
/// for `k` in the given range, sampling each annulus deterministically.
pub fn estimate_order(m: &Multiplier, k_range: std::ops::RangeInclusive<i32>) -> Result<OrderFit> {
    estimate_order_sampled(m, k_range, 64)
}

pub fn estimate_order_sampled(
    m: &Multiplier,
    k_range: std::ops::RangeInclusive<i32>,
    samples_per_annulus: usize,
) -> Result<OrderFit> {
    if !m.is_global() {
        return Err(HgcError::InvalidArgument(
            "order estimation needs a multiplier evaluable on arbitrary annuli".into(),
        ));
    }
    let group = &m.group;
    let n = group.dimension();
    let mut annuli = Vec::new();
    for k in k_range {
        let mut h = Halton::new(n + 1);
        // deterministic points with |ξ| in (2^{k-1}, 2^k]
        let points: Vec<Vec<f64>> = (0..samples_per_annulus * 2)
            .filter_map(|_| {
                let u = h.next_point();
                let dir: Vec<f64> = u[0..n].iter().map(|&t| 2.0 * t - 1.0).collect();
                let norm = group.homogeneous_norm(&dir);
                if norm < 1e-9 {
                    return None;
                }
                let radius = 2f64.powi(k - 1) * (1.0 + u[n]);
                Some(group.dilate_unchecked(&dir, radius / norm))
            })
            .take(samples_per_annulus)
            .collect();
        let sup = match &m.source {
            MultiplierSource::DyadicSum { dd, truncation } => dd
                .eval_sum_many(&points, *truncation)
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max),
            _ => points.iter().map(|p| m.eval(p).norm()).fold(0.0f64, f64::max),
        };
        annuli.push((k, sup));
    }
    let usable: Vec<(f64, f64)> = annuli
        .iter()
        .filter(|(_, s)| *s > 1e-30)
        .map(|(k, s)| (*k as f64, s.log2()))
        .collect();
    if usable.len() < 3 {
        return Err(HgcError::InvalidArgument(format!(
            "only {} usable annuli for order fit (need >= 3)",
            usable.len()
        )));
    }
    let m_count = usable.len() as f64;
    let sx: f64 = usable.iter().map(|(k, _)| k).sum();
    let sy: f64 = usable.iter().map(|(_, y)| y).sum();
    let sxx: f64 = usable.iter().map(|(k, _)| k * k).sum();
    let sxy: f64 = usable.iter().map(|(k, y)| k * y).sum();
    let slope = (m_count * sxy - sx * sy) / (m_count * sxx - sx * sx);
    let intercept = (sy - slope * sx) / m_count;
    let residual = usable
        .iter()
        .map(|(k, y)| (y - slope * k - intercept).abs())
        .fold(0.0f64, f64::max);
    Ok(OrderFit { slope, residual, annuli })
}

/// Kernel of a multiplier: `idft` of its samples on the given frequency
/// grid (power-of-two sizes).
pub fn kernel_of(m: &Multiplier, freq_grid: &Grid) -> Result<GridFunction> {
    let samples = m.sample(freq_grid)?;
    idft(&samples)
}

/// Multiplier samples of a kernel: `dft` of the space samples.
pub fn multiplier_of(kernel: &GridFunction) -> Result<GridFunction> {
    dft(kernel)
}

/// Evaluate the continuous transform of a space kernel at arbitrary
/// frequency points (direct quadrature).
pub fn multiplier_of_at(kernel: &GridFunction, points: &[Vec<f64>]) -> Vec<Complex64> {
    ft_at_points(kernel, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn freq_grid_1d() -> Grid {
        Grid::new(vec![8.0], vec![512]).unwrap().reciprocal()
    }

    #[test]
    fn seminorm_constant() {
        let e1 = HomogeneousGroup::euclidean(1);
        let m = builtin::constant(&e1);
        let s = multiplier_seminorm(&m, &freq_grid_1d(), 2).unwrap();
        // only α = 0 contributes
        assert!((s.total - 1.0).abs() < 1e-8, "total = {}", s.total);
    }

    #[test]
    fn seminorm_bracket_finite_and_misdeclared_order_grows() {
        let e1 = HomogeneousGroup::euclidean(1);
        let m1 = builtin::euclidean_bracket(&e1, 1.0);
        let ok = multiplier_seminorm(&m1, &freq_grid_1d(), 2).unwrap();
        assert!(ok.total.is_finite() && ok.total < 20.0, "total = {}", ok.total);

        // the same symbol declared order 0 scores a growing seminorm as
        // the box radius doubles
        let wrong = Multiplier::closed_real(&e1, 0.0, |xi| {
            (1.0 + xi[0] * xi[0]).sqrt()
        });
        let small = multiplier_seminorm(&wrong, &Grid::new(vec![8.0], vec![256]).unwrap(), 2)
            .unwrap()
            .total;
        let large = multiplier_seminorm(&wrong, &Grid::new(vec![16.0], vec![512]).unwrap(), 2)
            .unwrap()
            .total;
        assert!(large / small > 1.6, "growth = {}", large / small);
    }

    #[test]
    fn dyadic_homogeneous_is_order_zero_class() {
        // smoothed ξ/|ξ|-style symbol: finite order-0 seminorm
        let e1 = HomogeneousGroup::euclidean(1);
        let m = builtin::dyadic_homogeneous(&e1, 0.0);
        let s = multiplier_seminorm(&m, &freq_grid_1d(), 2).unwrap();
        assert!(s.total.is_finite() && s.total > 0.0);
    }

    #[test]
    fn estimate_order_builtins() {
        let e1 = HomogeneousGroup::euclidean(1);
        let fit = estimate_order(&builtin::constant(&e1), 1..=7).unwrap();
        assert!(fit.slope.abs() < 0.02, "slope = {}", fit.slope);

        let fit = estimate_order(&builtin::euclidean_bracket(&e1, 1.0), 1..=7).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.05, "slope = {}", fit.slope);

        let h = HomogeneousGroup::heisenberg();
        let fit = estimate_order(&builtin::homogeneous_power(&h, 1.0), 1..=7).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.1, "slope = {}", fit.slope);
    }

    #[test]
    fn estimate_order_needs_three_annuli() {
        let e1 = HomogeneousGroup::euclidean(1);
        let zero = Multiplier::closed_real(&e1, 0.0, |_| 0.0);
        assert!(estimate_order(&zero, 1..=6).is_err());
    }

    #[test]
    fn derivative_drops_order_by_axis_weight() {
        let e1 = HomogeneousGroup::euclidean(1);
        let m = builtin::euclidean_bracket(&e1, 1.0);
        let d = m.derivative(0);
        let fit = estimate_order(&d, 1..=8).unwrap();
        assert!(fit.slope.abs() < 0.1, "slope = {} (expected 0 = 1-1)", fit.slope);

        let h = HomogeneousGroup::heisenberg();
        let m = builtin::homogeneous_power(&h, 1.0);
        // axis 3 has weight 2: order drops to -1
        let d = m.derivative(2);
        let fit = estimate_order(&d, 1..=7).unwrap();
        assert!((fit.slope + 1.0).abs() < 0.1, "slope = {}", fit.slope);
    }

    #[test]
    fn kernel_of_constant_is_delta() {
        let e1 = HomogeneousGroup::euclidean(1);
        let freq = freq_grid_1d();
        let k = kernel_of(&builtin::constant(&e1), &freq).unwrap();
        // all mass at the origin sample
        let origin = k.grid.origin_index();
        let peak = k.values[origin].norm();
        let vol = k.grid.cell_volume();
        assert!((peak * vol - 1.0).abs() < 1e-10);
        let off = (0..k.values.len())
            .filter(|&i| i != origin)
            .map(|i| k.values[i].norm())
            .fold(0.0f64, f64::max);
        assert!(off / peak < 1e-10, "off/peak = {}", off / peak);
    }

    #[test]
    fn kernel_multiplier_round_trip() {
        let e1 = HomogeneousGroup::euclidean(1);
        let freq = freq_grid_1d();
        let m = Multiplier::closed_real(&e1, 0.0, |xi| (-PI * xi[0] * xi[0]).exp());
        let k = kernel_of(&m, &freq).unwrap();
        // gaussian multiplier gives gaussian kernel
        let oracle = GridFunction::sample_real(&k.grid, |x| (-PI * x[0] * x[0]).exp()).unwrap();
        assert!(k.sup_abs_diff(&oracle).unwrap() < 1e-8);
        // round trip
        let back = multiplier_of(&k).unwrap();
        let orig = m.sample(&freq).unwrap();
        assert!(back.sup_abs_diff(&orig).unwrap() < 1e-12);
    }

    #[test]
    fn hormander_scoring() {
        // Euclidean: order-1 multiplier in S^1_{1,#}
        let e1 = HomogeneousGroup::euclidean(1);
        let m = builtin::euclidean_bracket(&e1, 1.0);
        let rep = hormander_seminorm(&m, &freq_grid_1d(), 1.0, 1.0, 2).unwrap();
        assert!(rep.total.is_finite() && rep.total < 30.0);
        // bridge constants on the euclidean line: bracket vs 1+|ξ|
        assert!(rep.bridge_c_lower > 0.5 && rep.bridge_c_upper <= 1.1);

        // Heisenberg (a_n = 2): order-1 multiplier scored in S^{1/2}_{1/2,#}
        let h = HomogeneousGroup::heisenberg();
        let m = builtin::homogeneous_power(&h, 1.0);
        let grid = Grid::new(vec![2.0, 2.0, 4.0], vec![32, 32, 32]).unwrap();
        let rep = hormander_seminorm(&m, &grid, 0.5, 0.5, 2).unwrap();
        assert!(rep.total.is_finite(), "total = {}", rep.total);
        assert!(rep.bridge_c_lower > 0.0 && rep.bridge_c_upper.is_finite());
    }
}
