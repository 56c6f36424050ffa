//! Gauss-Legendre rules and a globally adaptive integrator built on them.

use crate::{OracleError, Result};

/// Nodes and weights of the `m`-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    assert!(m >= 1, "rule needs at least one node");
    let mut rule = vec![(0.0, 0.0); m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp;
        loop {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=m {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            dp = mf * (z * p1 - p2) / (z * z - 1.0);
            let z_prev = z;
            z = z_prev - p1 / dp;
            if (z - z_prev).abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule[i] = (-z, w);
        rule[m - 1 - i] = (z, w);
    }
    rule
}

/// Fixed composite rule: `panels` equal panels on [a, b], each with `rule`.
pub fn composite<F: FnMut(f64) -> f64>(
    rule: &[(f64, f64)],
    a: f64,
    b: f64,
    panels: usize,
    mut f: F,
) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        let mut s = 0.0;
        for &(x, w) in rule {
            s += w * f(mid + 0.5 * h * x);
        }
        total += 0.5 * h * s;
    }
    total
}

pub struct Adaptive {
    rule: Vec<(f64, f64)>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: u64,
}

struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl Adaptive {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rule: gauss_legendre(15),
            rel_tol,
            abs_tol,
            max_intervals: 20_000,
        }
    }

    fn apply<F: FnMut(f64) -> f64>(&self, f: &mut F, lo: f64, hi: f64) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = lo + half;
        half * self
            .rule
            .iter()
            .map(|&(x, w)| w * f(mid + half * x))
            .sum::<f64>()
    }

    fn segment<F: FnMut(f64) -> f64>(&self, f: &mut F, lo: f64, hi: f64) -> Segment {
        let whole = self.apply(f, lo, hi);
        let mid = 0.5 * (lo + hi);
        let halves = self.apply(f, lo, mid) + self.apply(f, mid, hi);
        Segment {
            lo,
            hi,
            value: halves,
            error: (whole - halves).abs(),
        }
    }

    /// Integrates `f` over [a, b], initially split at `breaks` (which must lie inside).
    pub fn integrate<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        breaks: &[f64],
    ) -> Result<Integral> {
        let per_segment = 3 * self.rule.len() as u64;
        let mut edges = vec![a];
        edges.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
        edges.push(b);
        let mut segs: Vec<Segment> = edges
            .windows(2)
            .map(|w| self.segment(&mut f, w[0], w[1]))
            .collect();
        let mut evaluations = per_segment * segs.len() as u64;
        loop {
            let value: f64 = segs.iter().map(|s| s.value).sum();
            let error: f64 = segs.iter().map(|s| s.error).sum();
            if error <= self.abs_tol.max(self.rel_tol * value.abs()) {
                return Ok(Integral {
                    value,
                    error,
                    evaluations,
                });
            }
            if segs.len() >= self.max_intervals {
                return Err(OracleError::NonConvergence {
                    lo: a,
                    hi: b,
                    intervals: segs.len(),
                    error,
                });
            }
            let worst = segs
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
                .map(|(i, _)| i)
                .expect("at least one segment");
            let s = segs.swap_remove(worst);
            let mid = 0.5 * (s.lo + s.hi);
            segs.push(self.segment(&mut f, s.lo, mid));
            segs.push(self.segment(&mut f, mid, s.hi));
            evaluations += 2 * per_segment;
        }
    }
}
