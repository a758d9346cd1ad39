//! Polynomial group laws.
//!
//! A group law on ℝⁿ is stored coordinate by coordinate as
//! `(x·y)_i = x_i + y_i + P_i(x, y)` where each `P_i` is a finite list of
//! monomials `(coeff, x-multiindex, y-multiindex)`. Graded nilpotency
//! requires every monomial of `P_i` to have combined weighted degree equal
//! to the weight `a_i` and to involve only coordinates of weight `< a_i`;
//! both are checked at construction.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{HgcError, Result};
use crate::group::poly::Multiindex;

/// One monomial `coeff · x^xdeg · y^ydeg` of a law polynomial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LawMonomial {
    pub coeff: f64,
    pub xdeg: Vec<usize>,
    pub ydeg: Vec<usize>,
}

/// The corrections `P_i` for every output coordinate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupLaw {
    /// `per_coordinate[i]` lists the monomials of `P_i`.
    pub per_coordinate: Vec<Vec<LawMonomial>>,
}

impl GroupLaw {
    /// The abelian law: all corrections vanish.
    pub fn abelian(n: usize) -> Self {
        GroupLaw { per_coordinate: vec![Vec::new(); n] }
    }

    pub fn dimension(&self) -> usize {
        self.per_coordinate.len()
    }

    /// Validate grading against the weights: each monomial of `P_i` must
    /// involve only coordinates of weight `< a_i` and have total weighted
    /// degree exactly `a_i`.
    pub fn validate(&self, weights: &[Ratio<i64>]) -> Result<()> {
        let n = weights.len();
        if self.per_coordinate.len() != n {
            return Err(HgcError::InvalidGroup(format!(
                "law has {} coordinates, weights have {}",
                self.per_coordinate.len(),
                n
            )));
        }
        for (i, monos) in self.per_coordinate.iter().enumerate() {
            for m in monos {
                if m.xdeg.len() != n || m.ydeg.len() != n {
                    return Err(HgcError::InvalidGroup(format!(
                        "monomial in P_{} has multiindex of wrong dimension",
                        i + 1
                    )));
                }
                if !m.coeff.is_finite() {
                    return Err(HgcError::InvalidGroup(format!(
                        "non-finite coefficient in P_{}",
                        i + 1
                    )));
                }
                let mut degree = Ratio::new(0, 1);
                for k in 0..n {
                    let e = m.xdeg[k] + m.ydeg[k];
                    if e > 0 {
                        if weights[k] >= weights[i] {
                            return Err(HgcError::InvalidGroup(format!(
                                "P_{} refers to coordinate {} of weight {} >= {}",
                                i + 1,
                                k + 1,
                                weights[k],
                                weights[i]
                            )));
                        }
                        degree += weights[k] * Ratio::new(e as i64, 1);
                    }
                }
                if (m.xdeg.iter().sum::<usize>() == 0) || (m.ydeg.iter().sum::<usize>() == 0) {
                    return Err(HgcError::InvalidGroup(format!(
                        "monomial in P_{} must involve both x and y (pure terms belong to x_i + y_i)",
                        i + 1
                    )));
                }
                if degree != weights[i] {
                    return Err(HgcError::InvalidGroup(format!(
                        "monomial in P_{} has weighted degree {} != a_i = {}",
                        i + 1,
                        degree,
                        weights[i]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Evaluate the product `x·y`.
    pub fn multiply(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.dimension();
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(y.len(), n);
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut v = x[i] + y[i];
            for m in &self.per_coordinate[i] {
                v += m.coeff
                    * Multiindex(m.xdeg.clone()).eval(x)
                    * Multiindex(m.ydeg.clone()).eval(y);
            }
            out[i] = v;
        }
        out
    }

    /// Evaluate the inverse, coordinate by coordinate in index order.
    ///
    /// From `(x·z)_i = x_i + z_i + P_i(x, z) = 0` and grading (P_i only
    /// involves lower-weight coordinates, already solved), `z_i` follows in
    /// closed form.
    pub fn inverse(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dimension();
        let mut z = vec![0.0; n];
        for i in 0..n {
            let mut corr = 0.0;
            for m in &self.per_coordinate[i] {
                corr += m.coeff
                    * Multiindex(m.xdeg.clone()).eval(x)
                    * Multiindex(m.ydeg.clone()).eval(&z);
            }
            z[i] = -x[i] - corr;
        }
        z
    }
}

/// On-disk JSON schema for a group definition file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupDefinition {
    pub dimension: usize,
    /// Weights as numbers or "p/q" strings.
    pub weights: Vec<WeightSpec>,
    /// `law[i]` lists the monomials of `P_i`.
    pub law: Vec<Vec<LawMonomial>>,
}

/// A weight given either as an integer/float JSON number or a "p/q" string.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    Number(f64),
    Fraction(String),
}

impl WeightSpec {
    pub fn to_ratio(&self) -> Result<Ratio<i64>> {
        match self {
            WeightSpec::Number(v) => {
                // accept small rationals with denominator up to 64
                for den in 1..=64i64 {
                    let num = v * den as f64;
                    if (num - num.round()).abs() < 1e-9 {
                        return Ok(Ratio::new(num.round() as i64, den));
                    }
                }
                Err(HgcError::InvalidGroup(format!("weight {v} is not a small rational")))
            }
            WeightSpec::Fraction(s) => {
                let parts: Vec<&str> = s.split('/').collect();
                let parse = |t: &str| {
                    t.trim()
                        .parse::<i64>()
                        .map_err(|_| HgcError::InvalidGroup(format!("bad weight fraction '{s}'")))
                };
                match parts.as_slice() {
                    [p] => Ok(Ratio::new(parse(p)?, 1)),
                    [p, q] => Ok(Ratio::new(parse(p)?, parse(q)?)),
                    _ => Err(HgcError::InvalidGroup(format!("bad weight fraction '{s}'"))),
                }
            }
        }
    }
}
