//! Concrete compact metric spaces: a bounded interval (plus a non-compact
//! real-line window), the circle with arc-length metric, the space of
//! bi-infinite periodic binary sequences, and finite products under the max
//! metric. Everything downstream (orbits, hit sets, witness searches)
//! consumes points and distances from here.

pub mod symbolic;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use symbolic::{window_radius_for, SymbolicPoint};

pub const TAU: f64 = std::f64::consts::TAU;
/// Diameter of the circle under the arc-length metric.
pub const CIRCLE_DIAMETER: f64 = std::f64::consts::PI;
/// Diameter of the symbolic space: sum over j of 2^-|j| = 3.
pub const SYMBOLIC_DIAMETER: f64 = 3.0;

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceDescriptor {
    Interval {
        lo: f64,
        hi: f64,
        #[serde(default = "default_true")]
        compact: bool,
    },
    Circle,
    Symbolic,
    Product {
        left: Box<SpaceDescriptor>,
        right: Box<SpaceDescriptor>,
    },
}

impl SpaceDescriptor {
    pub fn unit_interval() -> Self {
        SpaceDescriptor::Interval {
            lo: 0.0,
            hi: 1.0,
            compact: true,
        }
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        // Negated comparison rejects NaN bounds as well.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "interval bounds must be finite with lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(SpaceDescriptor::Interval {
            lo,
            hi,
            compact: true,
        })
    }

    /// The real line as used by the collapsing-constants schedule: represented
    /// by a working window with the compact flag cleared. Property checks that
    /// need a finite cover restrict themselves to this window and record a
    /// caveat in their verdict.
    pub fn real_line_window() -> Self {
        SpaceDescriptor::Interval {
            lo: -5.0,
            hi: 5.0,
            compact: false,
        }
    }

    pub fn product(left: SpaceDescriptor, right: SpaceDescriptor) -> Self {
        SpaceDescriptor::Product {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn is_compact(&self) -> bool {
        match self {
            SpaceDescriptor::Interval { compact, .. } => *compact,
            SpaceDescriptor::Circle | SpaceDescriptor::Symbolic => true,
            SpaceDescriptor::Product { left, right } => left.is_compact() && right.is_compact(),
        }
    }

    /// Same space with the compact flag forced, used to build nets over the
    /// working window of a non-compact descriptor.
    pub fn compact_window(&self) -> SpaceDescriptor {
        match self {
            SpaceDescriptor::Interval { lo, hi, .. } => SpaceDescriptor::Interval {
                lo: *lo,
                hi: *hi,
                compact: true,
            },
            SpaceDescriptor::Product { left, right } => {
                SpaceDescriptor::product(left.compact_window(), right.compact_window())
            }
            other => other.clone(),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            SpaceDescriptor::Interval { lo, hi, .. } => hi - lo,
            SpaceDescriptor::Circle => CIRCLE_DIAMETER,
            SpaceDescriptor::Symbolic => SYMBOLIC_DIAMETER,
            SpaceDescriptor::Product { left, right } => left.diameter().max(right.diameter()),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SpaceDescriptor::Interval { .. } => "interval",
            SpaceDescriptor::Circle => "circle",
            SpaceDescriptor::Symbolic => "symbolic",
            SpaceDescriptor::Product { .. } => "product",
        }
    }

    pub fn contains(&self, p: &SpacePoint) -> bool {
        match (self, p) {
            (SpaceDescriptor::Interval { lo, hi, compact }, SpacePoint::Interval { value }) => {
                !compact || (*lo <= *value && *value <= *hi)
            }
            (SpaceDescriptor::Circle, SpacePoint::Circle { .. }) => true,
            (SpaceDescriptor::Symbolic, SpacePoint::Symbolic { .. }) => true,
            (
                SpaceDescriptor::Product { left, right },
                SpacePoint::Product {
                    left: pl,
                    right: pr,
                },
            ) => left.contains(pl) && right.contains(pr),
            _ => false,
        }
    }

    pub fn check_point(&self, p: &SpacePoint) -> Result<()> {
        if self.kind_name() != p.kind_name() {
            return Err(Error::SpaceMismatch {
                expected: self.kind_name(),
                found: p.kind_name(),
            });
        }
        if !self.contains(p) {
            return Err(Error::InvalidPoint(format!("point {p:?} outside {self:?}")));
        }
        Ok(())
    }

    /// Clamps an interval value back into bounds; other kinds pass through.
    /// Keeps map images of in-space points in-space under f64 rounding.
    pub fn clamp_value(&self, v: f64) -> f64 {
        match self {
            SpaceDescriptor::Interval { lo, hi, compact } if *compact => v.clamp(*lo, *hi),
            _ => v,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpacePoint {
    Interval {
        value: f64,
    },
    Circle {
        angle: f64,
    },
    Symbolic {
        seq: SymbolicPoint,
    },
    Product {
        left: Box<SpacePoint>,
        right: Box<SpacePoint>,
    },
}

impl PartialEq for SpacePoint {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (SpacePoint::Interval { value: a }, SpacePoint::Interval { value: b }) => a == b,
            (SpacePoint::Circle { angle: a }, SpacePoint::Circle { angle: b }) => a == b,
            (SpacePoint::Symbolic { seq: a }, SpacePoint::Symbolic { seq: b }) => a == b,
            (
                SpacePoint::Product {
                    left: al,
                    right: ar,
                },
                SpacePoint::Product {
                    left: bl,
                    right: br,
                },
            ) => al == bl && ar == br,
            _ => false,
        }
    }
}

impl SpacePoint {
    pub fn interval(value: f64) -> Self {
        SpacePoint::Interval { value }
    }

    /// Angle reduced into [0, 2*pi).
    pub fn circle(angle: f64) -> Self {
        SpacePoint::Circle {
            angle: angle.rem_euclid(TAU),
        }
    }

    pub fn symbolic(seq: SymbolicPoint) -> Self {
        SpacePoint::Symbolic { seq }
    }

    pub fn symbolic_str(bits: &str) -> Result<Self> {
        Ok(SpacePoint::Symbolic {
            seq: SymbolicPoint::from_bit_str(bits, 0)?,
        })
    }

    pub fn product(left: SpacePoint, right: SpacePoint) -> Self {
        SpacePoint::Product {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SpacePoint::Interval { .. } => "interval",
            SpacePoint::Circle { .. } => "circle",
            SpacePoint::Symbolic { .. } => "symbolic",
            SpacePoint::Product { .. } => "product",
        }
    }

    pub fn as_interval(&self) -> Result<f64> {
        match self {
            SpacePoint::Interval { value } => Ok(*value),
            other => Err(Error::SpaceMismatch {
                expected: "interval",
                found: other.kind_name(),
            }),
        }
    }

    pub fn as_circle(&self) -> Result<f64> {
        match self {
            SpacePoint::Circle { angle } => Ok(*angle),
            other => Err(Error::SpaceMismatch {
                expected: "circle",
                found: other.kind_name(),
            }),
        }
    }

    pub fn as_symbolic(&self) -> Result<&SymbolicPoint> {
        match self {
            SpacePoint::Symbolic { seq } => Ok(seq),
            other => Err(Error::SpaceMismatch {
                expected: "symbolic",
                found: other.kind_name(),
            }),
        }
    }

    pub fn as_product(&self) -> Result<(&SpacePoint, &SpacePoint)> {
        match self {
            SpacePoint::Product { left, right } => Ok((left, right)),
            other => Err(Error::SpaceMismatch {
                expected: "product",
                found: other.kind_name(),
            }),
        }
    }
}

/// Metric of the space: |p-q| on intervals, arc length on the circle, the
/// weighted coincidence series on sequences, and the max of factor distances
/// on products.
pub fn distance(space: &SpaceDescriptor, p: &SpacePoint, q: &SpacePoint) -> Result<f64> {
    match space {
        SpaceDescriptor::Interval { .. } => Ok((p.as_interval()? - q.as_interval()?).abs()),
        SpaceDescriptor::Circle => {
            let d = (p.as_circle()? - q.as_circle()?).abs();
            Ok(d.min(TAU - d))
        }
        SpaceDescriptor::Symbolic => Ok(symbolic::distance_f64(p.as_symbolic()?, q.as_symbolic()?)),
        SpaceDescriptor::Product { left, right } => {
            let (pl, pr) = p.as_product()?;
            let (ql, qr) = q.as_product()?;
            Ok(distance(left, pl, ql)?.max(distance(right, pr, qr)?))
        }
    }
}

/// A finite union of open balls; the sole open-set representation used by the
/// property checkers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: SpacePoint,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpenBallSet {
    pub balls: Vec<Ball>,
}

impl OpenBallSet {
    pub fn new(balls: Vec<Ball>) -> Result<Self> {
        if balls.is_empty() {
            return Err(Error::InvalidParameter(
                "open ball set must be nonempty".into(),
            ));
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // negation also catches NaN radii
        if balls.iter().any(|b| !(b.radius > 0.0)) {
            return Err(Error::InvalidParameter(
                "ball radii must be positive".into(),
            ));
        }
        Ok(OpenBallSet { balls })
    }

    pub fn single(center: SpacePoint, radius: f64) -> Result<Self> {
        Self::new(vec![Ball { center, radius }])
    }
}

/// Strict membership: distance to some center < its radius.
pub fn ball_contains(space: &SpaceDescriptor, set: &OpenBallSet, p: &SpacePoint) -> Result<bool> {
    for ball in &set.balls {
        if distance(space, &ball.center, p)? < ball.radius {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Finite set of points covering the space within `eps`: every point of the
/// space is strictly within `eps` of some net point.
pub fn epsilon_net(space: &SpaceDescriptor, eps: f64) -> Result<Vec<SpacePoint>> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon net needs eps > 0, got {eps}"
        )));
    }
    if !space.is_compact() {
        return Err(Error::Unsupported(
            "epsilon net over a non-compact space; restrict to a compact window first".into(),
        ));
    }
    match space {
        SpaceDescriptor::Interval { lo, hi, .. } => {
            let len = hi - lo;
            let m = (len / eps).ceil().max(1.0);
            if m > 2e6 {
                return Err(Error::InvalidParameter(format!(
                    "net of {m} points is too fine"
                )));
            }
            let m = m as usize;
            Ok((0..=m)
                .map(|i| SpacePoint::interval(lo + len * i as f64 / m as f64))
                .collect())
        }
        SpaceDescriptor::Circle => {
            let m = (TAU / eps).ceil().max(1.0);
            if m > 2e6 {
                return Err(Error::InvalidParameter(format!(
                    "net of {m} points is too fine"
                )));
            }
            let m = m as usize;
            Ok((0..m)
                .map(|i| SpacePoint::circle(TAU * i as f64 / m as f64))
                .collect())
        }
        SpaceDescriptor::Symbolic => {
            let w = window_radius_for(eps);
            let len = (2 * w + 1) as usize;
            if len > 24 {
                return Err(Error::InvalidParameter(format!(
                    "symbolic net at eps={eps} needs window length {len}; too fine to enumerate"
                )));
            }
            let mut points = Vec::with_capacity(1usize << len);
            for mask in 0..(1u64 << len) {
                let bits: Vec<u8> = (0..len).map(|i| ((mask >> i) & 1) as u8).collect();
                let seq = SymbolicPoint::from_window(bits, -w)?;
                let p = SpacePoint::symbolic(seq);
                if !points.contains(&p) {
                    points.push(p);
                }
            }
            Ok(points)
        }
        SpaceDescriptor::Product { left, right } => {
            let nl = epsilon_net(left, eps)?;
            let nr = epsilon_net(right, eps)?;
            let mut points = Vec::with_capacity(nl.len() * nr.len());
            for a in &nl {
                for b in &nr {
                    points.push(SpacePoint::product(a.clone(), b.clone()));
                }
            }
            Ok(points)
        }
    }
}

/// Deterministic sample points strictly inside one ball: the center, a grid
/// (or window extensions, for sequences), then seeded extras. Every returned
/// point is verified to lie in the ball.
pub fn ball_sample_points<R: Rng>(
    space: &SpaceDescriptor,
    ball: &Ball,
    count: usize,
    rng: &mut R,
) -> Result<Vec<SpacePoint>> {
    let mut out: Vec<SpacePoint> = vec![ball.center.clone()];
    let push =
        |space: &SpaceDescriptor, cand: SpacePoint, out: &mut Vec<SpacePoint>| -> Result<()> {
            if out.len() < count
                && distance(space, &ball.center, &cand)? < ball.radius
                && !out.contains(&cand)
            {
                out.push(cand);
            }
            Ok(())
        };
    match (space, &ball.center) {
        (SpaceDescriptor::Interval { lo, hi, compact }, SpacePoint::Interval { value }) => {
            let (mut a, mut b) = (value - ball.radius * 0.999, value + ball.radius * 0.999);
            if *compact {
                a = a.max(*lo);
                b = b.min(*hi);
            }
            // Golden-ratio sequence: low discrepancy and no symmetric
            // aliasing under maps symmetric about the ball center.
            for i in 1..count as u64 {
                let t = (i as f64 * 0.618_033_988_749_894_9).fract();
                push(space, SpacePoint::interval(a + (b - a) * t), &mut out)?;
            }
            while out.len() < count {
                let v = rng.gen_range(a..=b);
                push(space, SpacePoint::interval(v), &mut out)?;
            }
        }
        (SpaceDescriptor::Circle, SpacePoint::Circle { angle }) => {
            let r = ball.radius.min(CIRCLE_DIAMETER) * 0.999;
            for i in 1..count as u64 {
                let t = (i as f64 * 0.618_033_988_749_894_9).fract();
                push(space, SpacePoint::circle(angle - r + 2.0 * r * t), &mut out)?;
            }
        }
        (SpaceDescriptor::Symbolic, SpacePoint::Symbolic { seq }) => {
            let w = window_radius_for(ball.radius);
            // Points agreeing with the center on |j| <= w are inside the ball;
            // enumerate the first ring of free bits, then random tails.
            let ext = 2i64;
            let span_lo = -w - ext;
            let span_hi = w + ext;
            let base: Vec<u8> = seq.window(-w, w);
            let free = (2 * ext) as usize;
            for mask in 0..(1u32 << free) {
                if out.len() >= count {
                    break;
                }
                let mut bits = Vec::with_capacity((span_hi - span_lo + 1) as usize);
                for (i, j) in (span_lo..=span_hi).enumerate() {
                    if j < -w {
                        bits.push(((mask >> i) & 1) as u8);
                    } else if j > w {
                        let k = (j - w - 1) as usize + ext as usize;
                        bits.push(((mask >> k) & 1) as u8);
                    } else {
                        bits.push(base[(j + w) as usize]);
                    }
                }
                let cand = SpacePoint::symbolic(SymbolicPoint::from_window(bits, span_lo)?);
                push(space, cand, &mut out)?;
            }
            let mut attempts = 0;
            while out.len() < count && attempts < 4 * count {
                attempts += 1;
                let tail = rng.gen_range(1..=6usize);
                let mut bits = seq.window(-w - tail as i64, w + tail as i64);
                for i in 0..tail {
                    bits[i] = rng.gen_range(0..=1u8);
                    let n = bits.len();
                    bits[n - 1 - i] = rng.gen_range(0..=1u8);
                }
                let cand =
                    SpacePoint::symbolic(SymbolicPoint::from_window(bits, -w - tail as i64)?);
                push(space, cand, &mut out)?;
            }
        }
        (
            SpaceDescriptor::Product { left, right },
            SpacePoint::Product {
                left: cl,
                right: cr,
            },
        ) => {
            let sub = (count as f64).sqrt().ceil() as usize;
            let ls = ball_sample_points(
                left,
                &Ball {
                    center: (**cl).clone(),
                    radius: ball.radius,
                },
                sub,
                rng,
            )?;
            let rs = ball_sample_points(
                right,
                &Ball {
                    center: (**cr).clone(),
                    radius: ball.radius,
                },
                sub,
                rng,
            )?;
            for a in &ls {
                for b in &rs {
                    push(space, SpacePoint::product(a.clone(), b.clone()), &mut out)?;
                }
            }
        }
        _ => {
            return Err(Error::SpaceMismatch {
                expected: space.kind_name(),
                found: ball.center.kind_name(),
            })
        }
    }
    Ok(out)
}

/// Seeded uniform-ish point of the space, used by searches and fuzz tests.
pub fn random_point<R: Rng>(space: &SpaceDescriptor, rng: &mut R) -> SpacePoint {
    match space {
        SpaceDescriptor::Interval { lo, hi, .. } => SpacePoint::interval(rng.gen_range(*lo..=*hi)),
        SpaceDescriptor::Circle => SpacePoint::circle(rng.gen_range(0.0..TAU)),
        SpaceDescriptor::Symbolic => {
            let len = rng.gen_range(4..=12usize);
            let bits: Vec<u8> = (0..len).map(|_| rng.gen_range(0..=1u8)).collect();
            let off = rng.gen_range(0..len);
            SpacePoint::symbolic(SymbolicPoint::new(bits, off).expect("valid bits"))
        }
        SpaceDescriptor::Product { left, right } => {
            SpacePoint::product(random_point(left, rng), random_point(right, rng))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn interval_distance() {
        let sp = SpaceDescriptor::unit_interval();
        let d = distance(
            &sp,
            &SpacePoint::interval(0.25),
            &SpacePoint::interval(0.75),
        )
        .unwrap();
        assert_eq!(d, 0.5);
    }

    #[test]
    fn circle_distance_wraps() {
        let sp = SpaceDescriptor::Circle;
        let d = distance(
            &sp,
            &SpacePoint::circle(0.1),
            &SpacePoint::circle(TAU - 0.1),
        )
        .unwrap();
        assert!((d - 0.2).abs() < 1e-12);
    }

    #[test]
    fn product_distance_is_max() {
        let sp = SpaceDescriptor::product(
            SpaceDescriptor::unit_interval(),
            SpaceDescriptor::unit_interval(),
        );
        let p = SpacePoint::product(SpacePoint::interval(0.0), SpacePoint::interval(0.0));
        let q = SpacePoint::product(SpacePoint::interval(0.3), SpacePoint::interval(0.4));
        assert_eq!(distance(&sp, &p, &q).unwrap(), 0.4);
    }

    #[test]
    fn mismatched_kinds_error() {
        let sp = SpaceDescriptor::unit_interval();
        let err = distance(&sp, &SpacePoint::interval(0.0), &SpacePoint::circle(0.0));
        assert!(err.is_err());
    }

    #[test]
    fn interval_net_matches_grid() {
        let sp = SpaceDescriptor::unit_interval();
        let net = epsilon_net(&sp, 0.25).unwrap();
        let values: Vec<f64> = net.iter().map(|p| p.as_interval().unwrap()).collect();
        assert_eq!(values, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn circle_net_covers() {
        let sp = SpaceDescriptor::Circle;
        let net = epsilon_net(&sp, std::f64::consts::PI).unwrap();
        assert_eq!(net.len(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = random_point(&sp, &mut rng);
            let best = net
                .iter()
                .map(|c| distance(&sp, c, &p).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert!(best < std::f64::consts::PI);
        }
    }

    #[test]
    fn symbolic_net_covers_random_words() {
        let sp = SpaceDescriptor::Symbolic;
        let net = epsilon_net(&sp, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let bits: Vec<u8> = (0..12).map(|_| rng.gen_range(0..=1u8)).collect();
            let p = SpacePoint::symbolic(SymbolicPoint::new(bits, 0).unwrap());
            let best = net
                .iter()
                .map(|c| distance(&sp, c, &p).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1.0, "uncovered point at distance {best}");
        }
    }

    #[test]
    fn nets_cover_1000_random_points() {
        for (sp, eps) in [
            (SpaceDescriptor::unit_interval(), 0.13),
            (SpaceDescriptor::Circle, 0.7),
            (SpaceDescriptor::Symbolic, 0.5),
        ] {
            let net = epsilon_net(&sp, eps).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(23);
            for _ in 0..1000 {
                let p = random_point(&sp, &mut rng);
                let best = net
                    .iter()
                    .map(|c| distance(&sp, c, &p).unwrap())
                    .fold(f64::INFINITY, f64::min);
                assert!(best < eps);
            }
        }
    }

    #[test]
    fn ball_membership_is_strict() {
        let sp = SpaceDescriptor::unit_interval();
        let set = OpenBallSet::single(SpacePoint::interval(0.5), 0.1).unwrap();
        assert!(ball_contains(&sp, &set, &SpacePoint::interval(0.55)).unwrap());
        // Boundary excluded; dyadic values keep the comparison exact in f64.
        let set = OpenBallSet::single(SpacePoint::interval(0.5), 0.125).unwrap();
        assert!(!ball_contains(&sp, &set, &SpacePoint::interval(0.625)).unwrap());
    }

    #[test]
    fn cylinder_ball_on_sequences() {
        let sp = SpaceDescriptor::Symbolic;
        let set =
            OpenBallSet::single(SpacePoint::symbolic(SymbolicPoint::all_zeros()), 0.5).unwrap();
        // Differs only at j = 2 (mod 9): rho = 1/4 + small tail < 0.5.
        let mut bits = vec![0u8; 9];
        bits[6] = 1;
        let p = SpacePoint::symbolic(SymbolicPoint::from_window(bits, -4).unwrap());
        assert!(ball_contains(&sp, &set, &p).unwrap());
    }

    #[test]
    fn epsilon_net_rejects_noncompact() {
        let sp = SpaceDescriptor::real_line_window();
        assert!(epsilon_net(&sp, 0.5).is_err());
        assert!(epsilon_net(&sp.compact_window(), 0.5).is_ok());
    }

    #[test]
    fn ball_samples_stay_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (sp, center) in [
            (SpaceDescriptor::unit_interval(), SpacePoint::interval(0.4)),
            (SpaceDescriptor::Circle, SpacePoint::circle(1.0)),
            (
                SpaceDescriptor::Symbolic,
                SpacePoint::symbolic(SymbolicPoint::from_bit_str("0110", 0).unwrap()),
            ),
        ] {
            let ball = Ball {
                center,
                radius: 0.3,
            };
            let pts = ball_sample_points(&sp, &ball, 24, &mut rng).unwrap();
            assert!(!pts.is_empty());
            for p in &pts {
                assert!(distance(&sp, &ball.center, p).unwrap() < ball.radius);
            }
        }
    }

    #[test]
    fn point_json_roundtrip() {
        let p = SpacePoint::product(
            SpacePoint::interval(0.25),
            SpacePoint::symbolic(SymbolicPoint::from_bit_str("011", 1).unwrap()),
        );
        let js = serde_json::to_string(&p).unwrap();
        let back: SpacePoint = serde_json::from_str(&js).unwrap();
        assert_eq!(p, back);
        let sp = SpaceDescriptor::real_line_window();
        let js = serde_json::to_string(&sp).unwrap();
        assert!(js.contains("\"kind\":\"interval\""));
        let back: SpaceDescriptor = serde_json::from_str(&js).unwrap();
        assert_eq!(sp, back);
    }
}
