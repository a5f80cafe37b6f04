//! Radial potentials `V: [0, 1] → [0, ∞)`.
//!
//! Every profile is stored as a continuous piecewise-linear function on a
//! partition of `[0, 1]`. The builtin kinds are exactly piecewise linear
//! (a constant has one segment, `|r - c|` has a knot at `c`), so evaluation,
//! integrals, the Lipschitz constant and the zero set are all exact.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance below which a value of `V` counts as zero.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    /// `V(r) = c`.
    Constant(f64),
    /// `V(r) = |r - center|`.
    Vee(f64),
    /// Linear interpolation through user-supplied knots.
    PiecewiseLinear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialProfile {
    kind: PotentialKind,
    knots: Vec<f64>,
    values: Vec<f64>,
    sup_bound: f64,
    lipschitz: f64,
}

impl PotentialProfile {
    pub fn constant(c: f64) -> Result<Self> {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::Invalid(format!("constant potential must be finite and >= 0, got {c}")));
        }
        let mut p = Self::from_parts(vec![0.0, 1.0], vec![c, c])?;
        p.kind = PotentialKind::Constant(c);
        Ok(p)
    }

    pub fn vee(center: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::Invalid(format!("vee center must be finite, got {center}")));
        }
        let mut knots = vec![0.0];
        if center > 0.0 && center < 1.0 {
            knots.push(center);
        }
        knots.push(1.0);
        let values = knots.iter().map(|r| (r - center).abs()).collect();
        let mut p = Self::from_parts(knots, values)?;
        p.kind = PotentialKind::Vee(center);
        Ok(p)
    }

    /// Piecewise-linear potential through `(knots[i], values[i])`.
    ///
    /// Knots must be strictly increasing from exactly 0 to exactly 1 and the
    /// values finite and nonnegative.
    pub fn piecewise_linear(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::from_parts(knots, values)
    }

    fn from_parts(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(Error::Invalid(format!(
                "need at least two knots with one value each (got {} knots, {} values)",
                knots.len(),
                values.len()
            )));
        }
        if knots[0] != 0.0 || knots[knots.len() - 1] != 1.0 {
            return Err(Error::Invalid("knots must start at 0 and end at 1".into()));
        }
        if let Some(w) = knots.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid(format!("knots not strictly increasing at {} -> {}", w[0], w[1])));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Invalid(format!("potential values must be finite and >= 0, got {v}")));
        }
        let sup_bound = values.iter().copied().fold(0.0, f64::max);
        let lipschitz = knots
            .windows(2)
            .zip(values.windows(2))
            .map(|(r, v)| ((v[1] - v[0]) / (r[1] - r[0])).abs())
            .fold(0.0, f64::max);
        Ok(Self { kind: PotentialKind::PiecewiseLinear, knots, values, sup_bound, lipschitz })
    }

    /// Parse the `const:<c>` / `vee:<center>` shorthand.
    pub fn from_shorthand(s: &str) -> Result<Self> {
        let (name, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Invalid(format!("expected const:<c> or vee:<center>, got {s:?}")))?;
        let x: f64 = arg
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad number {arg:?} in {s:?}")))?;
        match name.trim() {
            "const" => Self::constant(x),
            "vee" => Self::vee(x),
            other => Err(Error::Invalid(format!("unknown builtin potential {other:?}"))),
        }
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Upper bound `M` with `0 <= V <= M` on `[0, 1]`.
    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    /// Exact Lipschitz constant: the largest absolute segment slope.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn is_identically_zero(&self) -> bool {
        self.sup_bound == 0.0
    }

    /// `V(r)` for `r` in `[0, 1]`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::Domain(format!("radius {r} outside [0, 1]")));
        }
        Ok(self.value(r))
    }

    /// Unchecked evaluation; `r` is clamped to `[0, 1]`.
    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        let r = r.clamp(0.0, 1.0);
        let k = self.segment_index(r);
        let (r0, r1) = (self.knots[k], self.knots[k + 1]);
        let (v0, v1) = (self.values[k], self.values[k + 1]);
        let t = (r - r0) / (r1 - r0);
        (v0 + t * (v1 - v0)).clamp(v0.min(v1), v0.max(v1))
    }

    /// Index `k` of the segment `[knots[k], knots[k+1]]` containing `r`.
    #[inline]
    pub fn segment_index(&self, r: f64) -> usize {
        let k = self.knots.partition_point(|&x| x <= r);
        k.saturating_sub(1).min(self.knots.len() - 2)
    }

    /// `(r0, r1, v0, v1)` for each segment.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.knots
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(r, v)| (r[0], r[1], v[0], v[1]))
    }

    /// Slope of the segment containing `r`.
    pub fn slope_at(&self, r: f64) -> f64 {
        let k = self.segment_index(r.clamp(0.0, 1.0));
        (self.values[k + 1] - self.values[k]) / (self.knots[k + 1] - self.knots[k])
    }

    /// Exact `∫_a^b V(s) ds` for `0 <= a <= b <= 1`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.clamp(0.0, 1.0), b.clamp(0.0, 1.0));
        if b <= a {
            return 0.0;
        }
        let mut total = 0.0;
        for (r0, r1, _, _) in self.segments() {
            let lo = r0.max(a);
            let hi = r1.min(b);
            if hi > lo {
                total += 0.5 * (hi - lo) * (self.value(lo) + self.value(hi));
            }
        }
        total
    }

    /// Where `V` vanishes, up to `tol`.
    ///
    /// `V` is linear and nonnegative on each segment, so it can only vanish at
    /// a segment endpoint or on a whole segment; the result is exact.
    pub fn zero_set(&self, tol: f64) -> ZeroSet {
        let tol = tol.max(0.0);
        let mut intervals: Vec<(f64, f64)> = Vec::new();
        for (r0, r1, v0, v1) in self.segments() {
            if v0 <= tol && v1 <= tol {
                match intervals.last_mut() {
                    Some(last) if last.1 == r0 => last.1 = r1,
                    _ => intervals.push((r0, r1)),
                }
            }
        }
        let in_interval = |x: f64| intervals.iter().any(|&(lo, hi)| lo <= x && x <= hi);
        let points = self
            .knots
            .iter()
            .zip(&self.values)
            .filter(|&(&r, &v)| v <= tol && !in_interval(r))
            .map(|(&r, _)| r)
            .collect();
        ZeroSet { points, intervals }
    }

    /// Short label used in reports, e.g. `const:1` or `vee:0.5`.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for PotentialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PotentialKind::Constant(c) => write!(f, "const:{c}"),
            PotentialKind::Vee(c) => write!(f, "vee:{c}"),
            PotentialKind::PiecewiseLinear => {
                write!(f, "pl[")?;
                for (i, (r, v)) in self.knots.iter().zip(&self.values).enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{r} {v}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Parse the potential file format.
///
/// ```text
/// # comment
/// pl
/// 0   0.5
/// 0.5 0
/// 1   0.5
/// ```
///
/// or a single line `const <c>`.
pub fn parse_potential(text: &str) -> Result<PotentialProfile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (head_line, head) = lines.next().ok_or(Error::Parse { line: 1, message: "empty potential file".into() })?;
    let mut words = head.split_whitespace();
    match words.next() {
        Some("const") => {
            let c = parse_field(words.next(), head_line, "constant value")?;
            if words.next().is_some() {
                return Err(Error::Parse { line: head_line, message: "trailing fields after const value".into() });
            }
            if let Some((line, _)) = lines.next() {
                return Err(Error::Parse { line, message: "unexpected data after const header".into() });
            }
            if c < 0.0 {
                return Err(Error::Parse { line: head_line, message: format!("negative value {c}") });
            }
            PotentialProfile::constant(c).map_err(|e| Error::Parse { line: head_line, message: e.to_string() })
        }
        Some("pl") if words.next().is_none() => {
            let mut knots = Vec::new();
            let mut values = Vec::new();
            let mut last_line = head_line;
            for (line, l) in lines {
                let mut f = l.split_whitespace();
                let r = parse_field(f.next(), line, "radius")?;
                let v = parse_field(f.next(), line, "value")?;
                if f.next().is_some() {
                    return Err(Error::Parse { line, message: "expected exactly two fields `<r> <V(r)>`".into() });
                }
                if v < 0.0 {
                    return Err(Error::Parse { line, message: format!("negative value {v}") });
                }
                if knots.is_empty() && r != 0.0 {
                    return Err(Error::Parse { line, message: format!("first radius must be 0, got {r}") });
                }
                if let Some(&prev) = knots.last() {
                    if r <= prev {
                        return Err(Error::Parse { line, message: format!("radius {r} not greater than {prev}") });
                    }
                }
                if r > 1.0 {
                    return Err(Error::Parse { line, message: format!("radius {r} exceeds 1") });
                }
                knots.push(r);
                values.push(v);
                last_line = line;
            }
            if knots.last() != Some(&1.0) || knots.len() < 2 {
                return Err(Error::Parse { line: last_line, message: "last radius must be 1".into() });
            }
            PotentialProfile::piecewise_linear(knots, values)
                .map_err(|e| Error::Parse { line: last_line, message: e.to_string() })
        }
        _ => Err(Error::Parse { line: head_line, message: format!("expected `const <c>` or `pl`, got {head:?}") }),
    }
}

fn parse_field(field: Option<&str>, line: usize, what: &str) -> Result<f64> {
    let s = field.ok_or_else(|| Error::Parse { line, message: format!("missing {what}") })?;
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Error::Parse { line, message: format!("bad {what} {s:?}") }),
    }
}

impl FromStr for PotentialProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_potential(s)
    }
}

/// The set `{r : V(r) = 0}`: isolated points plus closed intervals.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub points: Vec<f64>,
    pub intervals: Vec<(f64, f64)>,
}

impl ZeroSet {
    pub fn new(points: Vec<f64>, intervals: Vec<(f64, f64)>) -> Self {
        Self { points, intervals }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.intervals.is_empty()
    }

    /// Points at which a hypothesis on the set is checked: every isolated
    /// point and `per_interval` evenly spaced samples of each interval.
    pub fn sample(&self, per_interval: usize) -> Vec<f64> {
        let mut out = self.points.clone();
        let m = per_interval.max(2);
        for &(lo, hi) in &self.intervals {
            out.extend((0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn builtin_values() {
        assert_eq!(PotentialProfile::constant(1.0).unwrap().eval(0.3).unwrap(), 1.0);
        let vee = PotentialProfile::vee(0.5).unwrap();
        assert_eq!(vee.eval(0.5).unwrap(), 0.0);
        assert_eq!(vee.eval(0.0).unwrap(), 0.5);
        assert_eq!(vee.eval(1.0).unwrap(), 0.5);
        assert!((vee.eval(0.3).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(vee.lipschitz(), 1.0);
        assert_eq!(vee.sup_bound(), 0.5);
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let p = PotentialProfile::constant(1.0).unwrap();
        assert!(matches!(p.eval(-0.1), Err(Error::Domain(_))));
        assert!(matches!(p.eval(1.5), Err(Error::Domain(_))));
        assert!(matches!(p.eval(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_sets() {
        let z = PotentialProfile::vee(0.5).unwrap().zero_set(ZERO_TOL);
        assert_eq!(z.points, vec![0.5]);
        assert!(z.intervals.is_empty());

        assert!(PotentialProfile::constant(1.0).unwrap().zero_set(ZERO_TOL).is_empty());

        let z = PotentialProfile::constant(0.0).unwrap().zero_set(ZERO_TOL);
        assert_eq!(z.intervals, vec![(0.0, 1.0)]);
        assert!(z.points.is_empty());

        let flat = PotentialProfile::piecewise_linear(vec![0.0, 0.2, 0.4, 0.6, 1.0], vec![1.0, 0.0, 0.0, 0.0, 2.0])
            .unwrap()
            .zero_set(ZERO_TOL);
        assert_eq!(flat.intervals, vec![(0.2, 0.6)]);
        assert!(flat.points.is_empty());
    }

    #[test]
    fn parse_examples() {
        let p = parse_potential("pl\n0 0.5\n0.5 0\n1 0.5").unwrap();
        assert_eq!(p.lipschitz(), 1.0);
        let vee = PotentialProfile::vee(0.5).unwrap();
        for i in 0..=1000 {
            let r = i as f64 / 1000.0;
            assert!((p.value(r) - vee.value(r)).abs() < 1e-15);
        }
        assert_eq!(p.zero_set(ZERO_TOL), vee.zero_set(ZERO_TOL));

        let c = parse_potential("const 1").unwrap();
        assert_eq!(c.kind(), PotentialKind::Constant(1.0));

        let c = parse_potential("# header comment\n\nconst 2.5\n# trailing\n").unwrap();
        assert_eq!(c.sup_bound(), 2.5);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_potential("pl\n0 1\n1 -1") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("negative"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(parse_potential("pl\n0 1\n0.5 1\n0.4 1\n1 1"), Err(Error::Parse { line: 4, .. })));
        assert!(matches!(parse_potential("pl\n0.1 1\n1 1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_potential("pl\n0 1\n0.5 1"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_potential("pl\n0 1\n1 x"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_potential("quadratic"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_potential(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_potential("const -1"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn shorthand() {
        assert_eq!(PotentialProfile::from_shorthand("const:1").unwrap().kind(), PotentialKind::Constant(1.0));
        assert_eq!(PotentialProfile::from_shorthand("vee:0.5").unwrap().label(), "vee:0.5");
        assert!(PotentialProfile::from_shorthand("bump:1").is_err());
        assert!(PotentialProfile::from_shorthand("const:-2").is_err());
    }

    #[test]
    fn exact_integral() {
        let vee = PotentialProfile::vee(0.5).unwrap();
        assert!((vee.integral(0.0, 1.0) - 0.25).abs() < 1e-16);
        assert!((vee.integral(0.25, 0.75) - 0.0625).abs() < 1e-16);
    }

    fn arb_profile() -> impl Strategy<Value = PotentialProfile> {
        (1usize..8)
            .prop_flat_map(|segments| {
                (
                    proptest::collection::vec(0.05f64..1.0, segments),
                    proptest::collection::vec(0.0f64..3.0, segments + 1),
                )
            })
            .prop_map(|(widths, values)| {
                let total: f64 = widths.iter().sum();
                let mut knots = vec![0.0];
                let mut acc = 0.0;
                for w in &widths[..widths.len() - 1] {
                    acc += w / total;
                    knots.push(acc);
                }
                knots.push(1.0);
                PotentialProfile::piecewise_linear(knots, values).unwrap()
            })
    }

    proptest! {
        #[test]
        fn nonnegative_lipschitz_and_bounded(p in arb_profile()) {
            let n = 10_000;
            let mut prev = p.value(0.0);
            for i in 0..=n {
                let r = i as f64 / n as f64;
                let v = p.value(r);
                prop_assert!(v >= 0.0);
                prop_assert!(v <= p.sup_bound());
                if i > 0 {
                    prop_assert!((v - prev).abs() <= p.lipschitz() / n as f64 * (1.0 + 1e-9) + 1e-15);
                }
                prev = v;
            }
            for &k in p.knots() {
                prop_assert!(p.value(k) >= 0.0);
            }
        }

        #[test]
        fn zero_set_invariant_under_refinement(p in arb_profile(), zero_mask in proptest::collection::vec(any::<bool>(), 9), split in 0.1f64..0.9) {
            // Force some values to zero so there is something to find.
            let values: Vec<f64> = p.values().iter().zip(zero_mask.iter().cycle())
                .map(|(&v, &z)| if z { 0.0 } else { v }).collect();
            let base = PotentialProfile::piecewise_linear(p.knots().to_vec(), values).unwrap();

            let mut knots = Vec::new();
            let mut vals = Vec::new();
            for (r0, r1, v0, v1) in base.segments() {
                knots.push(r0);
                vals.push(v0);
                let mid = r0 + split * (r1 - r0);
                knots.push(mid);
                vals.push(v0 + split * (v1 - v0));
            }
            knots.push(1.0);
            vals.push(*base.values().last().unwrap());
            let refined = PotentialProfile::piecewise_linear(knots, vals).unwrap();
            prop_assert_eq!(base.zero_set(ZERO_TOL), refined.zero_set(ZERO_TOL));
        }
    }
}
