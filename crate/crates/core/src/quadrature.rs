//! Fixed-order Gauss–Legendre panels.

/// Number of nodes per panel.
pub const PANEL_ORDER: usize = 8;

// Positive half of the symmetric 8-point rule on [-1, 1].
const NODES: [f64; 4] = [
    0.183_434_642_495_649_804_939_476_1,
    0.525_532_409_916_328_985_817_739_0,
    0.796_666_477_413_626_739_591_553_9,
    0.960_289_856_497_536_231_683_560_9,
];
const WEIGHTS: [f64; 4] = [
    0.362_683_783_378_361_982_965_150_4,
    0.313_706_645_877_887_287_337_962_2,
    0.222_381_034_453_374_470_544_356_0,
    0.101_228_536_290_376_259_152_531_4,
];

/// One 8-point Gauss–Legendre panel on `[a, b]`. Exact for polynomials of
/// degree ≤ 15.
#[inline]
pub fn gauss_legendre<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (x, w) in NODES.iter().zip(WEIGHTS.iter()) {
        acc += w * (f(mid - half * x) + f(mid + half * x));
    }
    acc * half
}

/// Composite Gauss–Legendre over `[a, b]`, splitting at every interior point
/// of `breaks` (assumed sorted) and then into panels no wider than
/// `max_width`. Returns the integral and the number of panels used.
pub fn composite<F: FnMut(f64) -> f64>(a: f64, b: f64, breaks: &[f64], max_width: f64, mut f: F) -> (f64, usize) {
    if b <= a {
        return (0.0, 0);
    }
    let mut total = 0.0;
    let mut panels = 0;
    let mut lo = a;
    let interior = breaks.iter().copied().filter(|&x| x > a && x < b);
    for hi in interior.chain(std::iter::once(b)) {
        if hi <= lo {
            continue;
        }
        let m = ((hi - lo) / max_width).ceil().max(1.0) as usize;
        let h = (hi - lo) / m as f64;
        for j in 0..m {
            let p0 = lo + j as f64 * h;
            let p1 = if j + 1 == m { hi } else { p0 + h };
            total += gauss_legendre(p0, p1, &mut f);
        }
        panels += m;
        lo = hi;
    }
    (total, panels)
}
