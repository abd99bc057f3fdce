//! Adaptive one-dimensional quadrature on a (7,15) Gauss–Kronrod pair.
//!
//! Worst-interval-first refinement over a finite window. Callers choose the
//! window so the integrand's tails are negligible (the posterior module uses
//! ±12 effective standard deviations of the relevant Gaussian product).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

// QUADPACK dqk15 abscissae and weights (positive half, last entry is the
// centre point).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Value and error estimate of one integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadEstimate {
    pub value: f64,
    pub error: f64,
    /// Whether the requested tolerance was met before the interval budget
    /// ran out.
    pub converged: bool,
}

#[derive(Debug)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One (7,15) Gauss–Kronrod evaluation over [lo, hi].
fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let fc = f(center);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    let mut resabs = resk.abs();

    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        fv1[j] = f(center - dx);
        fv2[j] = f(center + dx);
        let sum = fv1[j] + fv2[j];
        resk += WGK[j] * sum;
        resabs += WGK[j] * (fv1[j].abs() + fv2[j].abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * sum;
        }
    }

    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }

    let value = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();

    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }

    Segment {
        lo,
        hi,
        value,
        error,
    }
}

/// Integrates `f` over `[lo, hi]` until the summed error estimate drops below
/// `max(abs_tol, rel_tol · |integral|)` or `max_intervals` is reached.
///
/// The window is pre-split into `initial` equal pieces so that a narrow peak
/// inside a wide window cannot be missed by the first coarse rule.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> QuadEstimate {
    debug_assert!(lo.is_finite() && hi.is_finite() && lo < hi);
    const INITIAL: usize = 16;

    let mut heap = BinaryHeap::with_capacity(max_intervals);
    let step = (hi - lo) / INITIAL as f64;
    for i in 0..INITIAL {
        let a = lo + i as f64 * step;
        let b = if i == INITIAL - 1 { hi } else { a + step };
        heap.push(kronrod15(&f, a, b));
    }

    loop {
        let total: f64 = heap.iter().map(|s| s.value).sum();
        let err: f64 = heap.iter().map(|s| s.error).sum();
        let target = abs_tol.max(rel_tol * total.abs());
        if err <= target {
            return QuadEstimate {
                value: total,
                error: err,
                converged: true,
            };
        }
        if heap.len() >= max_intervals {
            return QuadEstimate {
                value: total,
                error: err,
                converged: false,
            };
        }
        let worst = heap.pop().expect("heap is never empty");
        if worst.hi - worst.lo < f64::EPSILON * (worst.lo.abs() + worst.hi.abs()) {
            // Cannot subdivide further; accept what we have.
            let mut est = QuadEstimate {
                value: worst.value,
                error: worst.error,
                converged: false,
            };
            for s in heap.iter() {
                est.value += s.value;
                est.error += s.error;
            }
            return est;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        heap.push(kronrod15(&f, worst.lo, mid));
        heap.push(kronrod15(&f, mid, worst.hi));
    }
}

/// Defaults tuned for the posterior integrals: 1e-12 relative target over a
/// window that already contains all but ~1e-30 of the mass.
pub fn integrate_auto<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> QuadEstimate {
    integrate(f, lo, hi, 1e-12, 1e-300, 2048)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::std_pdf;

    #[test]
    fn normal_density_integrates_to_one() {
        let est = integrate_auto(std_pdf, -12.0, 12.0);
        assert!(est.converged);
        assert!((est.value - 1.0).abs() < 1e-12, "got {}", est.value);
    }

    #[test]
    fn polynomial_is_exact() {
        let est = integrate_auto(|x| 3.0 * x * x, 0.0, 2.0);
        assert!((est.value - 8.0).abs() < 1e-12);
    }

    #[test]
    fn narrow_peak_in_wide_window() {
        // A Gaussian of width 0.01 inside [-10, 10]; the pre-split plus
        // refinement must find it.
        let est = integrate_auto(|x| std_pdf(x / 0.01) / 0.01, -10.0, 10.0);
        assert!((est.value - 1.0).abs() < 1e-10, "got {}", est.value);
    }

    #[test]
    fn reports_non_convergence_when_budget_exhausted() {
        let est = integrate(|x| (1.0 / x.abs().max(1e-18)).min(1e12), -1.0, 1.0, 1e-14, 0.0, 32);
        assert!(!est.converged);
    }
}
