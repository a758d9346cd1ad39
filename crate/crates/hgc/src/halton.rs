//! Deterministic Halton low-discrepancy sequences for dense sampling of
//! compact sets.

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Multi-dimensional Halton sequence over [0,1)^d.
pub struct Halton {
    dim: usize,
    index: u64,
}

impl Halton {
    pub fn new(dim: usize) -> Self {
        assert!(dim <= PRIMES.len(), "Halton dimension too large");
        // skip the first few points, which are degenerate
        Halton { dim, index: 20 }
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        self.index += 1;
        (0..self.dim).map(|j| radical_inverse(self.index, PRIMES[j])).collect()
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 0.0;
    let mut frac = 1.0 / base as f64;
    while i > 0 {
        inv += (i % base) as f64 * frac;
        i /= base;
        frac /= base as f64;
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covers_unit_square() {
        let mut h = Halton::new(2);
        let pts: Vec<Vec<f64>> = (0..1000).map(|_| h.next_point()).collect();
        assert!(pts.iter().all(|p| p.iter().all(|&t| (0.0..1.0).contains(&t))));
        // crude uniformity: each quadrant gets a reasonable share
        let q = pts
            .iter()
            .filter(|p| p[0] < 0.5 && p[1] < 0.5)
            .count();
        assert!((150..350).contains(&q), "quadrant count {q}");
    }

    #[test]
    fn deterministic() {
        let mut a = Halton::new(3);
        let mut b = Halton::new(3);
        for _ in 0..50 {
            assert_eq!(a.next_point(), b.next_point());
        }
    }
}
