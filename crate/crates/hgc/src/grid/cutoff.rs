//! Smooth radial cutoffs in the homogeneous norm.

use crate::error::{HgcError, Result};
use crate::group::HomogeneousGroup;

/// Smooth transition profile: 1 on `{|x| ≤ r0}`, 0 on `{|x| ≥ r1}`,
/// built from the standard `exp(−1/(1−s²))` bump.
#[derive(Debug, Clone)]
pub struct CutoffProfile {
    pub r0: f64,
    pub r1: f64,
}

impl CutoffProfile {
    pub fn new(r0: f64, r1: f64) -> Result<Self> {
        if !(0.0 < r0 && r0 < r1) {
            return Err(HgcError::InvalidArgument(format!(
                "cutoff radii must satisfy 0 < r0 < r1, got ({r0}, {r1})"
            )));
        }
        Ok(CutoffProfile { r0, r1 })
    }

    /// Profile as a function of the norm value `t`.
    #[inline]
    pub fn eval_norm(&self, t: f64) -> f64 {
        smooth_step((self.r1 - t) / (self.r1 - self.r0))
    }

    /// Profile at a group point, radial in the homogeneous norm.
    #[inline]
    pub fn eval(&self, group: &HomogeneousGroup, x: &[f64]) -> f64 {
        self.eval_norm(group.homogeneous_norm(x))
    }

    /// Complementary profile: 0 inside `r0`, 1 outside `r1`.
    #[inline]
    pub fn eval_norm_outer(&self, t: f64) -> f64 {
        1.0 - self.eval_norm(t)
    }
}

/// C^∞ monotone step: 0 for `s ≤ 0`, 1 for `s ≥ 1`. Equivalent to the
/// normalized integral of the bump `exp(−1/(1−u²))` under `u = 2s−1`.
#[inline]
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / s).exp();
        let b = (-1.0 / (1.0 - s)).exp();
        a / (a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support() {
        let c = CutoffProfile::new(0.5, 2.0).unwrap();
        assert_eq!(c.eval_norm(0.0), 1.0);
        assert_eq!(c.eval_norm(0.5), 1.0);
        assert_eq!(c.eval_norm(2.0), 0.0);
        assert_eq!(c.eval_norm(5.0), 0.0);
        let mid = c.eval_norm(1.25);
        assert!(mid > 0.0 && mid < 1.0);
        // monotone decreasing
        let mut prev = 1.0;
        for i in 0..100 {
            let t = 0.5 + 1.5 * i as f64 / 99.0;
            let v = c.eval_norm(t);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn bad_radii_rejected() {
        assert!(CutoffProfile::new(2.0, 1.0).is_err());
        assert!(CutoffProfile::new(0.0, 1.0).is_err());
    }

    #[test]
    fn smooth_step_derivatives_vanish_at_ends() {
        // finite differences of high order stay bounded near the ends,
        // consistent with C^∞ flatness
        let h = 1e-3;
        let d1_at = |s: f64| (smooth_step(s + h) - smooth_step(s - h)) / (2.0 * h);
        assert!(d1_at(0.01).abs() < 1e-10);
        assert!(d1_at(0.99).abs() < 1e-10);
        assert!(d1_at(0.5) > 0.0);
    }

    #[test]
    fn radial_in_homogeneous_norm() {
        let g = HomogeneousGroup::heisenberg();
        let c = CutoffProfile::new(0.5, 2.0).unwrap();
        // |(0,0,1)| = 1, |(1,0,0)| = 1: same profile value
        let a = c.eval(&g, &[0.0, 0.0, 1.0]);
        let b = c.eval(&g, &[1.0, 0.0, 0.0]);
        assert!((a - b).abs() < 1e-15);
    }
}
