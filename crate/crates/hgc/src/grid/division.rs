//! Division of moment-free functions.
//!
//! On the transform side, a function flat at the origin splits as
//! `ψ(ξ) = Σ ξ_j ψ_j(ξ)` — algebraic division `ξ_j ψ/‖ξ‖²` away from the
//! origin, a line-integral construction `ζ(ξ)∫₀¹ ∂_jψ(tξ)dt` near it,
//! blended by a smooth radial partition. Pulled back through the inverse
//! transform and the triangular field table, a moment-free `f` splits as
//! `f = Σ X_j f_j`.

use num_complex::Complex64;

use crate::error::{HgcError, Result};
use crate::grid::cutoff::CutoffProfile;
use crate::grid::deriv::{derivative_axis, partial_derivative};
use crate::grid::fourier::{dft, idft};
use crate::grid::{interpolate_nd, GridFunction};
use crate::group::poly::Multiindex;
use crate::group::HomogeneousGroup;

/// Composite 8-point Gauss–Legendre on a complex-valued integrand.
fn gauss_composite_complex<F: Fn(f64) -> Complex64>(
    a: f64,
    b: f64,
    panels: usize,
    f: F,
) -> Complex64 {
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
        return Complex64::new(0.0, 0.0);
    }
    let hp = (b - a) / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * hp;
        let scale = 0.5 * hp;
        for j in 0..4 {
            total += (f(mid + scale * X[j]) + f(mid - scale * X[j])) * W[j];
        }
    }
    total * (b - a) / (2.0 * panels as f64)
}

/// Division parts together with the sup of the reconstruction residual.
#[derive(Debug, Clone)]
pub struct DivisionOutcome {
    pub parts: Vec<GridFunction>,
    pub residual_sup: f64,
}

/// Max |∂^α f| at the origin over `‖α‖ ≤ order`.
pub fn origin_flatness(f: &GridFunction, order: usize) -> Result<f64> {
    let n = f.dim();
    let origin = f.grid.origin_index();
    let mut worst = 0.0f64;
    for alpha in Multiindex::up_to_length(n, order) {
        let d = partial_derivative(f, &alpha)?;
        worst = worst.max(d.values[origin].norm());
    }
    Ok(worst)
}

/// Split `ψ = Σ ξ_j ψ_j` for `ψ` numerically in `Ŝ_o` (transform side).
///
/// `flatness_tol` bounds the allowed derivatives of `ψ` at the origin up
/// to order 4.
pub fn coordinate_division(
    group: &HomogeneousGroup,
    psi: &GridFunction,
    flatness_tol: f64,
) -> Result<DivisionOutcome> {
    let n = psi.dim();
    if group.dimension() != n {
        return Err(HgcError::GridMismatch("group dimension != grid dimension".into()));
    }
    // blend radius: default a quarter of the largest inscribed norm ball,
    // shrunk into the numerical hole of ψ when ψ vanishes near the origin
    // (then the exact algebraic division covers the whole support)
    let rho_box = (0..n)
        .map(|ax| psi.grid.extents()[ax].powf(1.0 / group.weights()[ax]))
        .fold(f64::INFINITY, f64::min);
    let max_abs = psi.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut rho_hole = f64::INFINITY;
    for (fl, xi) in psi.grid.iter_points() {
        if psi.values[fl].norm() > 1e-13 * max_abs {
            rho_hole = rho_hole.min(group.homogeneous_norm(&xi));
        }
    }
    let mut r1 = 0.25 * rho_box;
    if rho_hole.is_finite() && rho_hole > 1e-6 && 0.9 * rho_hole < r1 {
        r1 = 0.9 * rho_hole;
    }

    // Ŝ_o gate: finite differences at the origin when the grid resolves
    // that neighborhood, otherwise the sup of |ψ| over the near ball
    // (anisotropic axes compress holes below any stencil's reach).
    let fd_flat = origin_flatness(psi, 4)?;
    if fd_flat > flatness_tol {
        let mut ball_flat = 0.0f64;
        for (fl, xi) in psi.grid.iter_points() {
            if group.homogeneous_norm(&xi) <= 0.75 * r1 {
                ball_flat = ball_flat.max(psi.values[fl].norm());
            }
        }
        if ball_flat > flatness_tol {
            return Err(HgcError::NotMomentFree(format!(
                "transform side not flat at 0: stencil estimate {fd_flat:.3e}, near-ball sup {ball_flat:.3e}, tol {flatness_tol:.3e}"
            )));
        }
    }

    let chi = CutoffProfile::new(0.5 * r1, r1)?;
    // ζ ≡ 1 on a neighborhood of supp(χψ)
    let zeta = CutoffProfile::new(1.1 * r1, 1.6 * r1)?;

    // far part: ξ_j (1−χ) ψ / ‖ξ‖²
    let mut parts: Vec<GridFunction> = (0..n)
        .map(|j| {
            let mut out = GridFunction::zeros(&psi.grid);
            for (fl, xi) in psi.grid.iter_points() {
                let w = 1.0 - chi.eval(group, &xi);
                if w > 0.0 {
                    let e2: f64 = xi.iter().map(|&t| t * t).sum();
                    out.values[fl] = psi.values[fl] * (w * xi[j] / e2);
                }
            }
            out
        })
        .collect();

    // near part: ζ(ξ) ∫₀¹ ∂_j(χψ)(tξ) dt
    let near = GridFunction {
        grid: psi.grid.clone(),
        values: psi
            .grid
            .iter_points()
            .map(|(fl, xi)| psi.values[fl] * chi.eval(group, &xi))
            .collect(),
        border: psi.border.clone(),
    };
    let grads: Vec<GridFunction> =
        (0..n).map(|j| derivative_axis(&near, j)).collect::<Result<_>>()?;
    for (fl, xi) in psi.grid.iter_points() {
        let z = zeta.eval(group, &xi);
        if z == 0.0 {
            continue;
        }
        for (j, grad) in grads.iter().enumerate() {
            let line = gauss_composite_complex(0.0, 1.0, 8, |t| {
                let p: Vec<f64> = xi.iter().map(|&c| t * c).collect();
                interpolate_nd(&grad.grid, &grad.values, &p)
            });
            parts[j].values[fl] += line * z;
        }
    }

    // reconstruction residual on the valid region
    let border = grads.first().map(|g| g.border.clone()).unwrap_or_else(|| psi.border.clone());
    let mut residual = 0.0f64;
    for (fl, xi) in psi.grid.iter_points() {
        let idx = psi.grid.unflatten(fl);
        let ok = idx
            .iter()
            .enumerate()
            .all(|(ax, &i)| i >= border[ax] && i < psi.grid.sizes()[ax] - border[ax]);
        if !ok {
            continue;
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for (j, p) in parts.iter().enumerate() {
            sum += p.values[fl] * xi[j];
        }
        residual = residual.max((sum - psi.values[fl]).norm());
    }

    Ok(DivisionOutcome { parts, residual_sup: residual })
}

/// Split a moment-free `f` as `f = Σ X_j f_j` (space side).
///
/// Runs [`coordinate_division`] on `f̂`, inverts, and converts `∂_j → X_k`
/// through the triangular table `∂_j = X_j + Σ q_{j,k} X_k`, using that
/// multiplication by `q_{j,k}` commutes with `X_k`.
pub fn vector_field_division(
    group: &HomogeneousGroup,
    f: &GridFunction,
    moment_tol: f64,
) -> Result<DivisionOutcome> {
    let n = f.dim();
    if !f.is_moment_free(2, moment_tol) {
        return Err(HgcError::NotMomentFree(format!(
            "moments up to degree 2 reach {:.3e} > tol {moment_tol:.3e}",
            f.moments(2).max_abs()
        )));
    }
    let fhat = dft(f)?;
    let div = coordinate_division(group, &fhat, moment_tol)?;

    // F_j = idft(ψ_j) / (2πi), so that f = Σ ∂_j F_j
    let scale = Complex64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI));
    let big_f: Vec<GridFunction> =
        div.parts.iter().map(|p| idft(p).map(|g| g.scale(scale))).collect::<Result<_>>()?;

    // f_k = F_k + Σ_{j<k} q_{j,k} F_j
    let table = group.vector_fields()?;
    let mut parts: Vec<GridFunction> = Vec::with_capacity(n);
    for k in 0..n {
        let mut part = GridFunction::zeros(&f.grid);
        for (j, fj) in big_f.iter().enumerate() {
            let q = &table.inverse_coeffs[j][k];
            if q.is_zero() {
                continue;
            }
            for (fl, x) in f.grid.iter_points() {
                part.values[fl] += fj.values[fl] * q.eval(&x);
            }
        }
        parts.push(part);
    }

    // residual of Σ X_k f_k against f; the partials inside X_k are applied
    // spectrally (exact on these band-limited parts), so the residual
    // reflects the division itself rather than stencil truncation
    let mut sum = GridFunction::zeros(&f.grid);
    for (k, part) in parts.iter().enumerate() {
        let xk = apply_vector_field_spectral(&table, k, part)?;
        sum = sum.linear_comb(Complex64::new(1.0, 0.0), &xk, Complex64::new(1.0, 0.0))?;
    }
    let residual = sum.sup_abs_diff(f)?;
    Ok(DivisionOutcome { parts, residual_sup: residual })
}

/// `X_j` with spectral partial derivatives: `∂_k g = idft(2πi ξ_k ĝ)`.
fn apply_vector_field_spectral(
    table: &crate::group::VectorFieldTable,
    j: usize,
    g: &GridFunction,
) -> Result<GridFunction> {
    let n = g.dim();
    let ghat = dft(g)?;
    let mut out = GridFunction::zeros(&g.grid);
    for k in 0..n {
        let coeff = &table.coeffs[j][k];
        if coeff.is_zero() {
            continue;
        }
        let mut dk_hat = ghat.clone();
        for (fl, xi) in ghat.grid.iter_points() {
            dk_hat.values[fl] *= Complex64::new(0.0, 2.0 * std::f64::consts::PI * xi[k]);
        }
        let dk = idft(&dk_hat)?;
        for (fl, x) in g.grid.iter_points() {
            out.values[fl] += dk.values[fl] * coeff.eval(&x);
        }
    }
    Ok(out)
}
