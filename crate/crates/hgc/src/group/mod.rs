//! Homogeneous group structure: anisotropic dilations, the homogeneous
//! norm, polynomial group laws and their measurable constants.

pub mod law;
pub mod poly;
pub mod vector_fields;

use std::path::Path;
use std::sync::Arc;

use num_rational::Ratio;

use crate::error::{HgcError, Result};
use crate::halton::Halton;
pub use law::{GroupDefinition, GroupLaw, LawMonomial, WeightSpec};
pub use poly::{Multiindex, Poly};
pub use vector_fields::VectorFieldTable;

/// A group element is a coordinate vector of length `n`.
pub type Point = Vec<f64>;

/// A homogeneous nilpotent group on ℝⁿ with dilation weights
/// `1 = a₁ ≤ … ≤ aₙ` and a graded polynomial law.
#[derive(Debug, Clone)]
pub struct HomogeneousGroup {
    name: String,
    weights: Vec<Ratio<i64>>,
    weights_f: Vec<f64>,
    law: Arc<GroupLaw>,
    /// Homogeneous dimension `Q = Σ aᵢ`, exact.
    q_exact: Ratio<i64>,
    /// `A = Π aᵢ`, exact.
    a_exact: Ratio<i64>,
    /// Norm exponents `2A/aᵢ` as floats, with integer fast path.
    norm_exponents: Vec<f64>,
    norm_exponents_int: Vec<Option<i32>>,
}

impl HomogeneousGroup {
    /// Build a group from weights and a law, validating the grading.
    pub fn new(name: &str, weights: Vec<Ratio<i64>>, law: GroupLaw) -> Result<Self> {
        if weights.is_empty() {
            return Err(HgcError::InvalidGroup("empty weight list".into()));
        }
        if weights[0] != Ratio::new(1, 1) {
            return Err(HgcError::InvalidGroup(format!(
                "first weight must be 1 (normalization), got {}",
                weights[0]
            )));
        }
        for w in weights.windows(2) {
            if w[0] > w[1] {
                return Err(HgcError::InvalidGroup("weights must be nondecreasing".into()));
            }
        }
        law.validate(&weights)?;

        let q_exact: Ratio<i64> = weights.iter().sum();
        let a_exact: Ratio<i64> = weights.iter().product();
        let weights_f: Vec<f64> = weights.iter().map(ratio_to_f64).collect();
        let two_a = a_exact * 2;
        let mut norm_exponents = Vec::with_capacity(weights.len());
        let mut norm_exponents_int = Vec::with_capacity(weights.len());
        for w in &weights {
            let e = two_a / w;
            norm_exponents.push(ratio_to_f64(&e));
            norm_exponents_int.push(if e.is_integer() {
                Some(*e.numer() as i32)
            } else {
                None
            });
        }
        Ok(HomogeneousGroup {
            name: name.to_string(),
            weights,
            weights_f,
            law: Arc::new(law),
            q_exact,
            a_exact,
            norm_exponents,
            norm_exponents_int,
        })
    }

    /// Abelian ℝⁿ with isotropic dilations.
    pub fn euclidean(n: usize) -> Self {
        HomogeneousGroup::new(
            &format!("euclidean:{n}"),
            vec![Ratio::new(1, 1); n],
            GroupLaw::abelian(n),
        )
        .expect("euclidean group is always valid")
    }

    /// The 3-dimensional Heisenberg group with weights (1, 1, 2) and law
    /// `(x,y,t)·(x',y',t') = (x+x', y+y', t+t'+(xy'−yx')/2)`.
    pub fn heisenberg() -> Self {
        let law = GroupLaw {
            per_coordinate: vec![
                vec![],
                vec![],
                vec![
                    LawMonomial { coeff: 0.5, xdeg: vec![1, 0, 0], ydeg: vec![0, 1, 0] },
                    LawMonomial { coeff: -0.5, xdeg: vec![0, 1, 0], ydeg: vec![1, 0, 0] },
                ],
            ],
        };
        HomogeneousGroup::new(
            "heisenberg:1",
            vec![Ratio::new(1, 1), Ratio::new(1, 1), Ratio::new(2, 1)],
            law,
        )
        .expect("heisenberg group is always valid")
    }

    /// Resolve a built-in name: `euclidean:n` or `heisenberg:1`.
    pub fn from_name(name: &str) -> Result<Self> {
        if let Some(dim) = name.strip_prefix("euclidean:") {
            let n: usize = dim
                .parse()
                .map_err(|_| HgcError::InvalidGroup(format!("bad dimension in '{name}'")))?;
            if n == 0 || n > 8 {
                return Err(HgcError::InvalidGroup(format!("unsupported dimension {n}")));
            }
            return Ok(HomogeneousGroup::euclidean(n));
        }
        if name == "heisenberg:1" {
            return Ok(HomogeneousGroup::heisenberg());
        }
        Err(HgcError::InvalidGroup(format!(
            "unknown group '{name}' (built-ins: euclidean:n, heisenberg:1)"
        )))
    }

    /// Build from a parsed JSON definition.
    pub fn from_definition(name: &str, def: &GroupDefinition) -> Result<Self> {
        if def.weights.len() != def.dimension || def.law.len() != def.dimension {
            return Err(HgcError::InvalidGroup(
                "dimension field does not match weights/law lengths".into(),
            ));
        }
        let weights: Result<Vec<Ratio<i64>>> = def.weights.iter().map(|w| w.to_ratio()).collect();
        HomogeneousGroup::new(name, weights?, GroupLaw { per_coordinate: def.law.clone() })
    }

    /// Load a group definition from a JSON file.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let def: GroupDefinition = serde_json::from_str(&text)?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("custom");
        HomogeneousGroup::from_definition(name, &def)
    }

    /// Resolve either a built-in name or a path to a JSON definition.
    pub fn resolve(spec: &str) -> Result<Self> {
        match HomogeneousGroup::from_name(spec) {
            Ok(g) => Ok(g),
            Err(e) => {
                let p = Path::new(spec);
                if p.exists() {
                    HomogeneousGroup::from_json_file(p)
                } else {
                    Err(e)
                }
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights_f
    }

    pub fn weights_exact(&self) -> &[Ratio<i64>] {
        &self.weights
    }

    pub fn law(&self) -> &GroupLaw {
        &self.law
    }

    pub fn is_abelian(&self) -> bool {
        self.law.per_coordinate.iter().all(|p| p.is_empty())
    }

    /// Homogeneous dimension `Q = Σ aᵢ`.
    pub fn homogeneous_dimension(&self) -> f64 {
        ratio_to_f64(&self.q_exact)
    }

    pub fn homogeneous_dimension_exact(&self) -> Ratio<i64> {
        self.q_exact
    }

    pub fn origin(&self) -> Point {
        vec![0.0; self.dimension()]
    }

    /// Anisotropic dilation `δ_r(x) = (r^{a₁}x₁, …, r^{aₙ}xₙ)`, `r > 0`.
    pub fn dilate(&self, x: &[f64], r: f64) -> Result<Point> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(HgcError::InvalidArgument(format!("dilation factor must be positive, got {r}")));
        }
        Ok(self.dilate_unchecked(x, r))
    }

    #[inline]
    pub fn dilate_unchecked(&self, x: &[f64], r: f64) -> Point {
        x.iter()
            .zip(&self.weights_f)
            .map(|(&xi, &a)| if a == 1.0 { r * xi } else { r.powf(a) * xi })
            .collect()
    }

    /// The homogeneous norm `|x| = (Σ |xᵢ|^{2A/aᵢ})^{1/(2A)}` with `A = Π aᵢ`.
    ///
    /// For isotropic weights this is the Euclidean norm.
    #[inline]
    pub fn homogeneous_norm(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..x.len() {
            let v = x[i].abs();
            s += match self.norm_exponents_int[i] {
                Some(e) => v.powi(e),
                None => v.powf(self.norm_exponents[i]),
            };
        }
        let two_a = 2.0 * ratio_to_f64(&self.a_exact);
        s.powf(1.0 / two_a)
    }

    /// Group product `x·y`.
    #[inline]
    pub fn multiply(&self, x: &[f64], y: &[f64]) -> Point {
        self.law.multiply(x, y)
    }

    /// Group inverse `x⁻¹`.
    #[inline]
    pub fn inverse(&self, x: &[f64]) -> Point {
        self.law.inverse(x)
    }

    /// Left-invariant vector fields and their triangular inverse table.
    pub fn vector_fields(&self) -> Result<VectorFieldTable> {
        VectorFieldTable::build(self)
    }

    /// Empirical quasi-triangle constant and the (yxest) constant.
    ///
    /// `c_triangle` is the sup of `|xy|/(|x|+|y|)` over pairs scaled so the
    /// larger factor has unit norm; `c_halfnorm` is the min of `|y⁻¹x|`
    /// over `{|x| = 1, |y| ≤ 1/2}`. Deterministic Halton sampling, refined
    /// until two successive densities agree within 1%.
    pub fn norm_constants(&self) -> NormConstants {
        let n = self.dimension();
        let mut density = 4096usize;
        let mut prev: Option<(f64, f64)> = None;
        loop {
            let (c_tri, c_half) = self.norm_constants_at(density);
            if let Some((pt, ph)) = prev {
                let rel_t = (c_tri - pt).abs() / c_tri.max(1e-300);
                let rel_h = (c_half - ph).abs() / c_half.max(1e-300);
                if (rel_t < 0.01 && rel_h < 0.01) || density >= (1 << 22) / n.max(1) {
                    return NormConstants {
                        c_triangle: c_tri,
                        c_halfnorm: c_half,
                        samples: density,
                        refinement_error: rel_t.max(rel_h),
                    };
                }
            }
            prev = Some((c_tri, c_half));
            density *= 2;
        }
    }

    fn norm_constants_at(&self, samples: usize) -> (f64, f64) {
        let n = self.dimension();
        // Halton stream: n dims for x-direction, n for y-direction, 1 radius.
        let mut h = Halton::new(2 * n + 1);
        let mut c_tri: f64 = 0.0;
        let mut c_half = f64::INFINITY;
        for _ in 0..samples {
            let u = h.next_point();
            let xdir: Vec<f64> = u[0..n].iter().map(|&t| 2.0 * t - 1.0).collect();
            let ydir: Vec<f64> = u[n..2 * n].iter().map(|&t| 2.0 * t - 1.0).collect();
            let s = u[2 * n];
            let (Some(x), Some(y)) = (self.to_unit_sphere(&xdir), self.to_unit_sphere(&ydir))
            else {
                continue;
            };
            // triangle: larger-norm factor on the unit sphere, both orders
            let ys = self.dilate_unchecked(&y, s.max(1e-12));
            for (a, b) in [(&x, &ys), (&ys, &x)] {
                let prod = self.multiply(a, b);
                let ratio = self.homogeneous_norm(&prod)
                    / (self.homogeneous_norm(a) + self.homogeneous_norm(b));
                c_tri = c_tri.max(ratio);
            }
            // (yxest): |x| = 1, |y| <= 1/2
            let yh = self.dilate_unchecked(&y, 0.5 * s);
            let v = self.multiply(&self.inverse(&yh), &x);
            c_half = c_half.min(self.homogeneous_norm(&v));
        }
        (c_tri, c_half)
    }

    /// Rescale a nonzero direction vector to the unit sphere of the
    /// homogeneous norm.
    fn to_unit_sphere(&self, u: &[f64]) -> Option<Point> {
        let norm = self.homogeneous_norm(u);
        if norm < 1e-9 {
            return None;
        }
        Some(self.dilate_unchecked(u, 1.0 / norm))
    }

    /// `∫_{|x|>r} |x|^p dx` for `p < −Q`, by dyadic-shell quadrature.
    ///
    /// The shell `{r < |x| ≤ 2r}` is integrated with a midpoint rule over
    /// the first n−1 coordinates and exact interval endpoints in the last
    /// coordinate (solving `|x| = ρ` for `|xₙ|` in closed form); the
    /// remaining shells follow by exact homogeneity, summing the geometric
    /// series `Σ 2^{m(p+Q)}`.
    pub fn annulus_integral(&self, p: f64, r: f64) -> Result<f64> {
        let q = self.homogeneous_dimension();
        if p >= -q {
            return Err(HgcError::InvalidArgument(format!(
                "annulus integral diverges: p = {p} >= -Q = {}",
                -q
            )));
        }
        if !(r > 0.0) {
            return Err(HgcError::InvalidArgument("radius must be positive".into()));
        }
        let shell = self.shell_integral(p, r);
        Ok(shell / (1.0 - 2f64.powf(p + q)))
    }

    /// `∫_{r<|x|≤2r} |x|^p dx` by adapted slab quadrature.
    fn shell_integral(&self, p: f64, r: f64) -> f64 {
        let n = self.dimension();
        let two_a = 2.0 * ratio_to_f64(&self.a_exact);
        let lo_pow = r.powf(two_a);
        let hi_pow = (2.0 * r).powf(two_a);
        let last_exp = self.norm_exponents[n - 1];

        // inner integral over the last coordinate for fixed partial sum s
        let inner = |s: f64| -> f64 {
            if s >= hi_pow {
                return 0.0;
            }
            let t_hi = (hi_pow - s).powf(1.0 / last_exp);
            let t_lo = if s >= lo_pow { 0.0 } else { (lo_pow - s).powf(1.0 / last_exp) };
            // 2x for the symmetric negative side
            2.0 * gauss_composite(t_lo, t_hi, 16, |t| (s + t.powf(last_exp)).powf(p / two_a))
        };

        if n == 1 {
            return inner(0.0);
        }

        // midpoint rule over the outer box |x_i| <= (2r)^{a_i}
        let per_axis: usize = match n {
            2 => 4096,
            3 => 640,
            _ => 96,
        };
        let mut total = 0.0;
        let mut idx = vec![0usize; n - 1];
        let half: Vec<f64> =
            (0..n - 1).map(|i| (2.0 * r).powf(self.weights_f[i])).collect();
        let step: Vec<f64> = half.iter().map(|&h| 2.0 * h / per_axis as f64).collect();
        let cell: f64 = step.iter().product();
        loop {
            let mut s = 0.0;
            for i in 0..n - 1 {
                let x = -half[i] + (idx[i] as f64 + 0.5) * step[i];
                s += match self.norm_exponents_int[i] {
                    Some(e) => x.abs().powi(e),
                    None => x.abs().powf(self.norm_exponents[i]),
                };
            }
            total += inner(s) * cell;
            // advance odometer
            let mut i = 0;
            loop {
                if i == n - 1 {
                    return total;
                }
                idx[i] += 1;
                if idx[i] == per_axis {
                    idx[i] = 0;
                    i += 1;
                } else {
                    break;
                }
            }
        }
    }
}

/// Empirical norm constants with the sampling density that produced them.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NormConstants {
    /// sup |xy| / (|x|+|y|)
    pub c_triangle: f64,
    /// min |y⁻¹x| over |x| = 1, |y| ≤ 1/2
    pub c_halfnorm: f64,
    pub samples: usize,
    pub refinement_error: f64,
}

pub(crate) fn ratio_to_f64(r: &Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Composite Gauss–Legendre quadrature with fixed 8-point panels.
pub(crate) fn gauss_composite<F: Fn(f64) -> f64>(a: f64, b: f64, panels: usize, f: F) -> f64 {
    // 8-point Gauss-Legendre nodes/weights on [-1, 1]
    const X: [f64; 4] = [
        0.183_434_642_495_649_8,
        0.525_532_409_916_328_99,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_23,
    ];
    const W: [f64; 4] = [
        0.362_683_783_378_361_98,
        0.313_706_645_877_887_29,
        0.222_381_034_453_374_47,
        0.101_228_536_290_376_26,
    ];
    if b <= a {
        return 0.0;
    }
    let hp = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * hp;
        let mid = lo + 0.5 * hp;
        let scale = 0.5 * hp;
        for j in 0..4 {
            total += W[j] * (f(mid + scale * X[j]) + f(mid - scale * X[j]));
        }
    }
    total * (b - a) / (2.0 * panels as f64)
}
