//! Small multivariate polynomials with `f64` coefficients.
//!
//! Group laws and invariant vector fields are finite monomial tables, so a
//! minimal exact-coefficient polynomial arithmetic is all that is needed:
//! add, multiply, differentiate, evaluate, compare.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// A multiindex of exponents, one per coordinate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Multiindex(pub Vec<usize>);

impl Multiindex {
    pub fn zeros(n: usize) -> Self {
        Multiindex(vec![0; n])
    }

    /// Unit multiindex `e_j`.
    pub fn unit(n: usize, j: usize) -> Self {
        let mut e = vec![0; n];
        e[j] = 1;
        Multiindex(e)
    }

    pub fn len_dim(&self) -> usize {
        self.0.len()
    }

    /// Unweighted length `‖α‖ = Σ αᵢ`.
    pub fn length(&self) -> usize {
        self.0.iter().sum()
    }

    /// Weighted degree `|α| = Σ aᵢ αᵢ` for the given weights.
    pub fn weighted_degree(&self, weights: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(weights)
            .map(|(&e, &a)| e as f64 * a)
            .sum()
    }

    /// Evaluate the monomial `x^α`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut v = 1.0;
        for (&e, &xi) in self.0.iter().zip(x) {
            if e > 0 {
                v *= xi.powi(e as i32);
            }
        }
        v
    }

    /// All multiindices of dimension `n` with `‖α‖ ≤ max_len`, in
    /// lexicographic order by exponent vector.
    pub fn up_to_length(n: usize, max_len: usize) -> Vec<Multiindex> {
        let mut out = Vec::new();
        let mut cur = vec![0usize; n];
        loop {
            if cur.iter().sum::<usize>() <= max_len {
                out.push(Multiindex(cur.clone()));
            }
            // odometer with per-digit cap max_len
            let mut i = 0;
            loop {
                if i == n {
                    return out;
                }
                cur[i] += 1;
                if cur[i] > max_len {
                    cur[i] = 0;
                    i += 1;
                } else {
                    break;
                }
            }
        }
    }
}

/// Polynomial in `n` variables, stored as a sparse monomial map.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub n: usize,
    pub terms: BTreeMap<Multiindex, f64>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        let mut p = Poly::zero(n);
        if c != 0.0 {
            p.terms.insert(Multiindex::zeros(n), c);
        }
        p
    }

    /// The coordinate polynomial `x_j`.
    pub fn coordinate(n: usize, j: usize) -> Self {
        let mut p = Poly::zero(n);
        p.terms.insert(Multiindex::unit(n, j), 1.0);
        p
    }

    pub fn monomial(n: usize, alpha: Multiindex, c: f64) -> Self {
        let mut p = Poly::zero(n);
        if c != 0.0 {
            p.terms.insert(alpha, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, alpha: Multiindex, c: f64) {
        let entry = self.terms.entry(alpha.clone()).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&alpha);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (alpha, &c) in &other.terms {
            out.add_term(alpha.clone(), c);
        }
        out
    }

    pub fn scale(&self, c: f64) -> Poly {
        if c == 0.0 {
            return Poly::zero(self.n);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.n);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let exps: Vec<usize> = a.0.iter().zip(&b.0).map(|(&x, &y)| x + y).collect();
                out.add_term(Multiindex(exps), ca * cb);
            }
        }
        out
    }

    /// Partial derivative with respect to coordinate `j`.
    pub fn diff(&self, j: usize) -> Poly {
        let mut out = Poly::zero(self.n);
        for (alpha, &c) in &self.terms {
            let e = alpha.0[j];
            if e > 0 {
                let mut down = alpha.clone();
                down.0[j] = e - 1;
                out.add_term(down, c * e as f64);
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(alpha, &c)| c * alpha.eval(x)).sum()
    }

    /// Max absolute coefficient difference to another polynomial.
    pub fn coeff_distance(&self, other: &Poly) -> f64 {
        let mut d: f64 = 0.0;
        for (alpha, &c) in &self.terms {
            d = d.max((c - other.terms.get(alpha).copied().unwrap_or(0.0)).abs());
        }
        for (alpha, &c) in &other.terms {
            if !self.terms.contains_key(alpha) {
                d = d.max(c.abs());
            }
        }
        d
    }
}
