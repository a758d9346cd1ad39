//! Invariant vector fields of a polynomial group law.
//!
//! The left-invariant field agreeing with `∂/∂x_j` at the origin is
//! `X_j = ∂/∂x_j + Σ_k p_{j,k}(x) ∂/∂x_k`, with `p_{j,k}` homogeneous of
//! weighted degree `a_k − a_j`; the coefficients come from differentiating
//! left translation `y ↦ x·y` at the origin, and the converse table
//! `∂/∂x_j = X_j + Σ_k q_{j,k}(x) X_k` from triangular inversion.

use num_rational::Ratio;

use crate::error::{HgcError, Result};
use crate::group::poly::{Multiindex, Poly};
use crate::group::HomogeneousGroup;

/// Which invariance the table encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Coefficient tables of the invariant vector fields.
#[derive(Debug, Clone)]
pub struct VectorFieldTable {
    pub side: Side,
    /// `coeffs[j][k] = p_{j,k}`; the diagonal is the constant 1.
    pub coeffs: Vec<Vec<Poly>>,
    /// `inverse_coeffs[j][k] = q_{j,k}` with `∂_j = Σ_k q-row · X_k`
    /// (diagonal 1).
    pub inverse_coeffs: Vec<Vec<Poly>>,
}

impl VectorFieldTable {
    /// Build the left-invariant table for a group.
    pub fn build(group: &HomogeneousGroup) -> Result<Self> {
        Self::build_side(group, Side::Left)
    }

    pub fn build_side(group: &HomogeneousGroup, side: Side) -> Result<Self> {
        let n = group.dimension();
        let law = group.law();
        // p_{j,k}: derivative of the k-th product coordinate with respect
        // to the j-th coordinate of the translating factor, at the origin.
        // Only monomials linear in that factor survive.
        let mut coeffs = vec![vec![Poly::zero(n); n]; n];
        for j in 0..n {
            coeffs[j][j] = Poly::constant(n, 1.0);
        }
        for k in 0..n {
            for m in &law.per_coordinate[k] {
                let (var_deg, coeff_deg) = match side {
                    Side::Left => (&m.ydeg, &m.xdeg),
                    Side::Right => (&m.xdeg, &m.ydeg),
                };
                if var_deg.iter().sum::<usize>() == 1 {
                    let j = var_deg.iter().position(|&e| e == 1).unwrap();
                    coeffs[j][k] =
                        coeffs[j][k].add(&Poly::monomial(n, Multiindex(coeff_deg.clone()), m.coeff));
                }
            }
        }

        // homogeneity check: p_{j,k} homogeneous of weighted degree a_k - a_j
        let w = group.weights_exact();
        for j in 0..n {
            for k in 0..n {
                if j == k {
                    continue;
                }
                let p = &coeffs[j][k];
                if p.is_zero() {
                    continue;
                }
                if w[k] <= w[j] {
                    return Err(HgcError::InvalidGroup(format!(
                        "vector field coefficient p_{{{},{}}} nonzero but a_k <= a_j",
                        j + 1,
                        k + 1
                    )));
                }
                let want = w[k] - w[j];
                for alpha in p.terms.keys() {
                    let mut deg = Ratio::new(0, 1);
                    for (i, &e) in alpha.0.iter().enumerate() {
                        deg += w[i] * Ratio::new(e as i64, 1);
                    }
                    if deg != want {
                        return Err(HgcError::InvalidGroup(format!(
                            "p_{{{},{}}} not homogeneous of degree a_k - a_j",
                            j + 1,
                            k + 1
                        )));
                    }
                }
            }
        }

        // triangular inversion: with M = I + P (strictly triangular P in
        // weight order), the inverse is the finite Neumann series Σ (−P)^m.
        let inverse_coeffs = invert_unipotent(&coeffs, n)?;
        Ok(VectorFieldTable { side, coeffs, inverse_coeffs })
    }

    /// Apply `X_j` symbolically to a polynomial.
    pub fn apply_to_poly(&self, j: usize, p: &Poly) -> Poly {
        let n = p.n;
        let mut out = Poly::zero(n);
        for k in 0..n {
            let c = &self.coeffs[j][k];
            if !c.is_zero() {
                out = out.add(&c.mul(&p.diff(k)));
            }
        }
        out
    }

    /// Reconstruct `∂_j p` through the inverse table, `Σ_k q_{j,k} X_k p`.
    pub fn partial_via_fields(&self, j: usize, p: &Poly) -> Poly {
        let n = p.n;
        let mut out = Poly::zero(n);
        for k in 0..n {
            let c = &self.inverse_coeffs[j][k];
            if !c.is_zero() {
                out = out.add(&c.mul(&self.apply_to_poly(k, p)));
            }
        }
        out
    }
}

fn invert_unipotent(m: &[Vec<Poly>], n: usize) -> Result<Vec<Vec<Poly>>> {
    // strictly triangular part
    let mut p = vec![vec![Poly::zero(n); n]; n];
    for j in 0..n {
        for k in 0..n {
            if j != k {
                p[j][k] = m[j][k].clone();
            } else {
                let diag = &m[j][k];
                let one = Poly::constant(n, 1.0);
                if diag.coeff_distance(&one) != 0.0 {
                    return Err(HgcError::InvalidGroup("vector field table not unipotent".into()));
                }
            }
        }
    }
    let mut inv = identity(n);
    let mut power = identity(n);
    let mut sign = -1.0;
    for _ in 0..n {
        power = mat_mul(&power, &p, n);
        if power.iter().all(|row| row.iter().all(Poly::is_zero)) {
            break;
        }
        for j in 0..n {
            for k in 0..n {
                inv[j][k] = inv[j][k].add(&power[j][k].scale(sign));
            }
        }
        sign = -sign;
    }
    // verify inv * m = I
    let check = mat_mul(&inv, m, n);
    let id = identity(n);
    for j in 0..n {
        for k in 0..n {
            if check[j][k].coeff_distance(&id[j][k]) > 1e-12 {
                return Err(HgcError::InvalidGroup(
                    "triangular inversion failed; law is not graded".into(),
                ));
            }
        }
    }
    Ok(inv)
}

fn identity(n: usize) -> Vec<Vec<Poly>> {
    let mut m = vec![vec![Poly::zero(n); n]; n];
    for j in 0..n {
        m[j][j] = Poly::constant(n, 1.0);
    }
    m
}

fn mat_mul(a: &[Vec<Poly>], b: &[Vec<Poly>], n: usize) -> Vec<Vec<Poly>> {
    let mut out = vec![vec![Poly::zero(n); n]; n];
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                if !a[j][l].is_zero() && !b[l][k].is_zero() {
                    out[j][k] = out[j][k].add(&a[j][l].mul(&b[l][k]));
                }
            }
        }
    }
    out
}
