//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

// 15-point Kronrod abscissae; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureControl {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureControl {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_intervals: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    // max-heap on error; ties broken on position so the order is deterministic
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// One 15-point Kronrod rule on `[a, b]` with the QUADPACK error estimate.
pub fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut f1 = [0.0; 7];
    let mut f2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let lo = f(center - dx);
        let hi = f(center + dx);
        f1[j] = lo;
        f2[j] = hi;
        res_k += WGK[j] * (lo + hi);
        res_abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (lo + hi);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, error)
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, ctl: QuadratureControl) -> QuadratureResult {
    integrate_pieces(f, &[a, b], ctl)
}

/// Integrates `f` over `[points[0], points[last]]`, with the interior points as
/// initial breakpoints (kinks, peaks). Points must be increasing.
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    ctl: QuadratureControl,
) -> QuadratureResult {
    assert!(points.len() >= 2, "need at least one interval");
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (value, error) = gauss_kronrod_15(&f, w[0], w[1]);
            heap.push(Segment {
                a: w[0],
                b: w[1],
                value,
                error,
            });
        }
    }
    loop {
        let value: f64 = heap.iter().map(|s| s.value).sum();
        let error: f64 = heap.iter().map(|s| s.error).sum();
        let target = ctl.abs_tol.max(ctl.rel_tol * value.abs());
        let intervals = heap.len();
        if error <= target || !error.is_finite() || intervals >= ctl.max_intervals {
            return QuadratureResult {
                value,
                error,
                intervals,
                converged: error <= target,
            };
        }
        let worst = heap.pop().expect("heap is nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval too small to split further
            heap.push(worst);
            let value: f64 = heap.iter().map(|s| s.value).sum();
            let error: f64 = heap.iter().map(|s| s.error).sum();
            return QuadratureResult {
                value,
                error,
                intervals: heap.len(),
                converged: false,
            };
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gauss_kronrod_15(&f, a, b);
            heap.push(Segment { a, b, value, error });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        // 15-point Kronrod integrates degree 22 exactly
        let (v, _) = gauss_kronrod_15(&|x: f64| x.powi(10) - 3.0 * x.powi(3), -1.0, 2.0);
        let exact = (2f64.powi(11) + 1.0) / 11.0 - 3.0 * (16.0 - 1.0) / 4.0;
        assert!((v - exact).abs() < 1e-12 * exact.abs());
    }

    #[test]
    fn weights_sum_to_interval_length() {
        let k: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        let g: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_peaks() {
        // ∫_0^1 1/(1e-4 + (x-0.3)^2) = 100 [atan(70) + atan(30)]
        let exact = 100.0 * (70f64.atan() + 30f64.atan());
        let r = integrate(|x| 1.0 / (1e-4 + (x - 0.3) * (x - 0.3)), 0.0, 1.0, QuadratureControl::default());
        assert!(r.converged);
        assert!((r.value - exact).abs() < 1e-10 * exact);
        let r2 = integrate_pieces(
            |x| 1.0 / (1e-4 + (x - 0.3) * (x - 0.3)),
            &[0.0, 0.3, 1.0],
            QuadratureControl::default(),
        );
        assert!(r2.intervals <= r.intervals);
        assert!((r2.value - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn sqrt_singularity() {
        let r = integrate(|x: f64| x.sqrt(), 0.0, 1.0, QuadratureControl::default());
        assert!((r.value - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn reports_failure_when_budget_exhausted() {
        let ctl = QuadratureControl {
            abs_tol: 1e-15,
            rel_tol: 0.0,
            max_intervals: 3,
        };
        let r = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, ctl);
        assert!(!r.converged);
        assert_eq!(r.intervals, 3);
    }
}
