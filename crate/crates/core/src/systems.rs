//! Non-autonomous map families: named maps, k-periodic generators and
//! infinite schedules, finite compositions `f_n^i`, orbits, the collapse of a
//! k-periodic family to one autonomous map, products, and (semi)conjugacy.

use num_integer::Integer;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{distance, random_point, SpaceDescriptor, SpacePoint};

/// A named map with parameters, total on its declared space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum MapSpec {
    Identity,
    /// x -> a*x*(1-x) on an interval.
    Logistic {
        a: f64,
    },
    /// x -> 2x for x <= 1/2, 2(1-x) otherwise, on [0,1].
    Tent,
    Constant {
        value: SpacePoint,
    },
    /// theta -> (num/den)*theta mod 2*pi.
    CirclePower {
        num: i64,
        den: i64,
    },
    CircleRotate {
        angle: f64,
    },
    /// sigma^m on sequences; exponent may be negative.
    ShiftPower {
        exponent: i64,
    },
    /// x -> sin^2(pi*x/2) on [0,1]; conjugates the tent map to logistic(4).
    SineSquared,
    /// Inverse of `SineSquared`: y -> (2/pi)*asin(sqrt(y)).
    ArcsineSqrt,
    Product {
        left: Box<MapSpec>,
        right: Box<MapSpec>,
    },
    /// Applied left to right: Composition([f, g]) is g after f.
    Composition {
        maps: Vec<MapSpec>,
    },
}

impl MapSpec {
    pub fn apply(&self, space: &SpaceDescriptor, x: &SpacePoint) -> Result<SpacePoint> {
        match self {
            MapSpec::Identity => Ok(x.clone()),
            MapSpec::Logistic { a } => {
                let v = x.as_interval()?;
                Ok(SpacePoint::interval(space.clamp_value(a * v * (1.0 - v))))
            }
            MapSpec::Tent => {
                let v = x.as_interval()?;
                let y = if v <= 0.5 { 2.0 * v } else { 2.0 * (1.0 - v) };
                Ok(SpacePoint::interval(space.clamp_value(y)))
            }
            MapSpec::Constant { value } => {
                space.check_point(value)?;
                Ok(value.clone())
            }
            MapSpec::CirclePower { num, den } => {
                if *den <= 0 {
                    return Err(Error::InvalidParameter(
                        "circle power denominator must be positive".into(),
                    ));
                }
                let theta = x.as_circle()?;
                Ok(SpacePoint::circle(theta * (*num as f64) / (*den as f64)))
            }
            MapSpec::CircleRotate { angle } => Ok(SpacePoint::circle(x.as_circle()? + angle)),
            MapSpec::ShiftPower { exponent } => {
                Ok(SpacePoint::symbolic(x.as_symbolic()?.shifted(*exponent)))
            }
            MapSpec::SineSquared => {
                let v = x.as_interval()?;
                let s = (std::f64::consts::FRAC_PI_2 * v).sin();
                Ok(SpacePoint::interval(space.clamp_value(s * s)))
            }
            MapSpec::ArcsineSqrt => {
                let v = x.as_interval()?.clamp(0.0, 1.0);
                Ok(SpacePoint::interval(
                    space.clamp_value(v.sqrt().asin() * 2.0 / std::f64::consts::PI),
                ))
            }
            MapSpec::Product { left, right } => {
                let (sl, sr) = match space {
                    SpaceDescriptor::Product { left, right } => (left, right),
                    other => {
                        return Err(Error::SpaceMismatch {
                            expected: "product",
                            found: other.kind_name(),
                        })
                    }
                };
                let (xl, xr) = x.as_product()?;
                Ok(SpacePoint::product(
                    left.apply(sl, xl)?,
                    right.apply(sr, xr)?,
                ))
            }
            MapSpec::Composition { maps } => {
                let mut cur = x.clone();
                for m in maps {
                    cur = m.apply(space, &cur)?;
                }
                Ok(cur)
            }
        }
    }

    pub fn is_surjective(&self) -> bool {
        match self {
            MapSpec::Identity
            | MapSpec::Tent
            | MapSpec::CircleRotate { .. }
            | MapSpec::ShiftPower { .. }
            | MapSpec::SineSquared
            | MapSpec::ArcsineSqrt => true,
            MapSpec::Logistic { a } => *a >= 4.0,
            MapSpec::Constant { .. } => false,
            // theta -> c*theta covers the circle whenever |c| >= 1.
            MapSpec::CirclePower { num, den } => num.unsigned_abs() >= den.unsigned_abs(),
            MapSpec::Product { left, right } => left.is_surjective() && right.is_surjective(),
            MapSpec::Composition { maps } => maps.iter().all(|m| m.is_surjective()),
        }
    }

    pub fn is_invertible(&self) -> bool {
        match self {
            MapSpec::Identity
            | MapSpec::CircleRotate { .. }
            | MapSpec::ShiftPower { .. }
            | MapSpec::SineSquared
            | MapSpec::ArcsineSqrt => true,
            MapSpec::CirclePower { num, den } => num.unsigned_abs() == den.unsigned_abs(),
            MapSpec::Logistic { .. } | MapSpec::Tent | MapSpec::Constant { .. } => false,
            MapSpec::Product { left, right } => left.is_invertible() && right.is_invertible(),
            MapSpec::Composition { maps } => maps.iter().all(|m| m.is_invertible()),
        }
    }

    pub fn inverse(&self) -> Option<MapSpec> {
        match self {
            MapSpec::Identity => Some(MapSpec::Identity),
            MapSpec::CircleRotate { angle } => Some(MapSpec::CircleRotate { angle: -angle }),
            MapSpec::ShiftPower { exponent } => Some(MapSpec::ShiftPower {
                exponent: -exponent,
            }),
            MapSpec::SineSquared => Some(MapSpec::ArcsineSqrt),
            MapSpec::ArcsineSqrt => Some(MapSpec::SineSquared),
            MapSpec::Product { left, right } => Some(MapSpec::Product {
                left: Box::new(left.inverse()?),
                right: Box::new(right.inverse()?),
            }),
            MapSpec::Composition { maps } => {
                let mut inv: Vec<MapSpec> = Vec::with_capacity(maps.len());
                for m in maps.iter().rev() {
                    inv.push(m.inverse()?);
                }
                Some(MapSpec::Composition { maps: inv }.simplified())
            }
            _ => None,
        }
    }

    /// Flattens compositions, fuses adjacent shift powers, drops identities.
    pub fn simplified(self) -> MapSpec {
        match self {
            MapSpec::Composition { maps } => {
                let mut flat: Vec<MapSpec> = Vec::new();
                for m in maps {
                    match m.simplified() {
                        MapSpec::Identity => {}
                        MapSpec::Composition { maps: inner } => flat.extend(inner),
                        MapSpec::ShiftPower { exponent } => match flat.last_mut() {
                            Some(MapSpec::ShiftPower { exponent: prev }) => {
                                *prev += exponent;
                                if *prev == 0 {
                                    flat.pop();
                                }
                            }
                            _ => flat.push(MapSpec::ShiftPower { exponent }),
                        },
                        other => flat.push(other),
                    }
                }
                match flat.len() {
                    0 => MapSpec::Identity,
                    1 => flat.into_iter().next().unwrap(),
                    _ => MapSpec::Composition { maps: flat },
                }
            }
            MapSpec::ShiftPower { exponent: 0 } => MapSpec::Identity,
            other => other,
        }
    }
}

/// How the family `f_1, f_2, ...` is generated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "schedule", rename_all = "snake_case")]
pub enum Generator {
    /// `f_{n+k} = f_n` with the listed k maps.
    Periodic { maps: Vec<MapSpec> },
    /// `f_n = constant(2^-n)` on the real-line window.
    CollapsingConstants,
    /// `f_n: theta -> ((n+1)/n) * theta` on the circle.
    CircleStretch,
    /// `sigma, sigma^-1, sigma^2, sigma^-2, ...` on sequences.
    ZigzagShift,
    /// n-th map is `f_n x g_n` of the factor families.
    Product {
        left: Box<MapFamily>,
        right: Box<MapFamily>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapFamily {
    pub space: SpaceDescriptor,
    pub generator: Generator,
    /// Whether every `f_n` is surjective. Needed as a hypothesis by the
    /// mixing <-> quasi-weak-specification equivalence.
    pub surjective: bool,
}

impl MapFamily {
    pub fn periodic(space: SpaceDescriptor, maps: Vec<MapSpec>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidParameter(
                "periodic generator needs k >= 1 maps".into(),
            ));
        }
        let surjective = maps.iter().all(|m| m.is_surjective());
        Ok(MapFamily {
            space,
            generator: Generator::Periodic { maps },
            surjective,
        })
    }

    pub fn autonomous(space: SpaceDescriptor, map: MapSpec) -> Result<Self> {
        Self::periodic(space, vec![map])
    }

    /// The n-th map (1-based).
    pub fn map_at(&self, n: u64) -> MapSpec {
        assert!(n >= 1, "maps are 1-indexed");
        match &self.generator {
            Generator::Periodic { maps } => maps[((n - 1) % maps.len() as u64) as usize].clone(),
            Generator::CollapsingConstants => MapSpec::Constant {
                value: SpacePoint::interval(2f64.powi(-(n.min(1200) as i32))),
            },
            Generator::CircleStretch => MapSpec::CirclePower {
                num: n as i64 + 1,
                den: n as i64,
            },
            Generator::ZigzagShift => {
                let t = n.div_ceil(2) as i64;
                if n % 2 == 1 {
                    MapSpec::ShiftPower { exponent: t }
                } else {
                    MapSpec::ShiftPower { exponent: -t }
                }
            }
            Generator::Product { left, right } => MapSpec::Product {
                left: Box::new(left.map_at(n)),
                right: Box::new(right.map_at(n)),
            },
        }
    }

    /// `Some(k)` when the family is k-periodic by construction.
    pub fn period(&self) -> Option<u64> {
        match &self.generator {
            Generator::Periodic { maps } => Some(maps.len() as u64),
            Generator::Product { left, right } => Some(left.period()?.lcm(&right.period()?)),
            _ => None,
        }
    }

    /// For families of pure shift powers, the cumulative exponent profile:
    /// `f_1^n = sigma^(e(n))`, exact.
    pub fn shift_profile(&self) -> Option<ShiftProfile> {
        if !matches!(self.space, SpaceDescriptor::Symbolic) {
            return None;
        }
        match &self.generator {
            Generator::Periodic { maps } => {
                let mut steps = Vec::with_capacity(maps.len());
                for m in maps {
                    match m.clone().simplified() {
                        MapSpec::ShiftPower { exponent } => steps.push(exponent),
                        MapSpec::Identity => steps.push(0),
                        _ => return None,
                    }
                }
                let mut prefix = vec![0i64];
                for s in &steps {
                    prefix.push(prefix.last().unwrap() + s);
                }
                let step = *prefix.last().unwrap();
                Some(ShiftProfile::PeriodicAffine { prefix, step })
            }
            Generator::ZigzagShift => Some(ShiftProfile::Zigzag),
            _ => None,
        }
    }
}

/// Cumulative shift exponent `e(n)` with `f_1^n = sigma^(e(n))`.
#[derive(Clone, Debug)]
pub enum ShiftProfile {
    /// `e(qk + r) = q * step + prefix[r]` for a k-periodic shift family.
    PeriodicAffine { prefix: Vec<i64>, step: i64 },
    /// The alternating schedule: `e(2t-1) = t`, `e(2t) = 0`.
    Zigzag,
}

impl ShiftProfile {
    pub fn exponent(&self, n: u64) -> i64 {
        match self {
            ShiftProfile::PeriodicAffine { prefix, step } => {
                let k = (prefix.len() - 1) as u64;
                let q = (n / k) as i64;
                let r = (n % k) as usize;
                q * step + prefix[r]
            }
            ShiftProfile::Zigzag => {
                if n % 2 == 1 {
                    (n as i64 + 1) / 2
                } else {
                    0
                }
            }
        }
    }
}

/// `f_n^i(x) = (f_{n+i-1} o ... o f_n)(x)`, with `f_n^0 = id`.
pub fn compose_segment(fam: &MapFamily, n: u64, i: u64, x: &SpacePoint) -> Result<SpacePoint> {
    let mut cur = x.clone();
    for t in 0..i {
        cur = fam.map_at(n + t).apply(&fam.space, &cur)?;
    }
    Ok(cur)
}

/// `[x, f_1^1(x), ..., f_1^N(x)]`, computed incrementally.
pub fn orbit(fam: &MapFamily, x: &SpacePoint, steps: u64) -> Result<Vec<SpacePoint>> {
    let mut out = Vec::with_capacity(steps as usize + 1);
    out.push(x.clone());
    let mut cur = x.clone();
    for n in 1..=steps {
        cur = fam.map_at(n).apply(&fam.space, &cur)?;
        out.push(cur.clone());
    }
    Ok(out)
}

/// Collapse of a k-periodic family to the autonomous map
/// `g = f_k o ... o f_1`, so that `g^j = f_1^(jk)`.
pub fn periodic_collapse(fam: &MapFamily) -> Result<MapSpec> {
    match &fam.generator {
        Generator::Periodic { maps } => {
            Ok(MapSpec::Composition { maps: maps.clone() }.simplified())
        }
        Generator::Product { left, right } => {
            let k = fam
                .period()
                .ok_or_else(|| Error::Unsupported("collapse needs a periodic family".into()))?;
            let (kl, kr) = (left.period().unwrap(), right.period().unwrap());
            let expand = |f: &MapFamily, kf: u64| -> Vec<MapSpec> {
                (0..k / kf)
                    .flat_map(|_| match &f.generator {
                        Generator::Periodic { maps } => maps.clone(),
                        _ => unreachable!("period() implies periodic generator"),
                    })
                    .collect()
            };
            let lm = expand(left, kl);
            let rm = expand(right, kr);
            let maps = lm
                .into_iter()
                .zip(rm)
                .map(|(a, b)| MapSpec::Product {
                    left: Box::new(a),
                    right: Box::new(b),
                })
                .collect();
            Ok(MapSpec::Composition { maps }.simplified())
        }
        _ => Err(Error::Unsupported(
            "collapse needs a periodic family".into(),
        )),
    }
}

/// The collapsed map as a 1-periodic family on the same space.
pub fn collapsed_family(fam: &MapFamily) -> Result<MapFamily> {
    let g = periodic_collapse(fam)?;
    MapFamily::autonomous(fam.space.clone(), g)
}

/// Family on `X x Y` whose n-th map is `f_n x g_n`. Stays a periodic
/// generator when both factors are periodic (period lcm), so it can be
/// collapsed and searched like any other periodic family.
pub fn product_family(fx: &MapFamily, fy: &MapFamily) -> MapFamily {
    let space = SpaceDescriptor::product(fx.space.clone(), fy.space.clone());
    let surjective = fx.surjective && fy.surjective;
    if let (Generator::Periodic { maps: ml }, Generator::Periodic { maps: mr }) =
        (&fx.generator, &fy.generator)
    {
        let k = (ml.len() as u64).lcm(&(mr.len() as u64)) as usize;
        let maps = (0..k)
            .map(|i| MapSpec::Product {
                left: Box::new(ml[i % ml.len()].clone()),
                right: Box::new(mr[i % mr.len()].clone()),
            })
            .collect();
        return MapFamily {
            space,
            generator: Generator::Periodic { maps },
            surjective,
        };
    }
    MapFamily {
        space,
        generator: Generator::Product {
            left: Box::new(fx.clone()),
            right: Box::new(fy.clone()),
        },
        surjective,
    }
}

/// Bounded check of the periodic-point condition `f_1^(nk)(x) = x` for
/// `k = 1..=multiples`. For a k-periodic family with `n` a multiple of the
/// family period the single check `k = 1` already implies every `k`, so only
/// that one is run (the check is then exact rather than horizon-bounded).
pub fn is_periodic_point(
    fam: &MapFamily,
    x: &SpacePoint,
    n: u64,
    multiples: u64,
    tol: f64,
) -> Result<bool> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "periodic point needs n >= 1".into(),
        ));
    }
    let structurally_exact = fam.period().is_some_and(|k| n.is_multiple_of(k));
    let reps = if structurally_exact {
        1
    } else {
        multiples.max(1)
    };
    let mut cur = x.clone();
    for m in 1..=reps {
        for t in ((m - 1) * n)..(m * n) {
            cur = fam.map_at(t + 1).apply(&fam.space, &cur)?;
        }
        if distance(&fam.space, &cur, x)? > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ConjugacyKind {
    Conjugacy,
    Semiconjugacy,
}

/// A checked intertwining `g_n o h = h o f_n` between two families, with the
/// sampled commutation error that backs the claim.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConjugacyRecord {
    pub base: MapFamily,
    pub target: MapFamily,
    pub h: MapSpec,
    pub h_inv: Option<MapSpec>,
    pub kind: ConjugacyKind,
    pub samples_checked: usize,
    pub max_commutation_error: f64,
}

/// Builds the conjugated family `g_n = h o f_n o h_inv` on `target_space` and
/// verifies `h_inv o h = id` and the commutation on sampled points.
pub fn conjugate_family(
    fam: &MapFamily,
    h: MapSpec,
    h_inv: MapSpec,
    target_space: SpaceDescriptor,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<ConjugacyRecord> {
    let maps = match &fam.generator {
        Generator::Periodic { maps } => maps.clone(),
        _ => {
            return Err(Error::Unsupported(
                "conjugation of schedule-generated families is not supported; collapse or re-express the family first".into(),
            ))
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_err = 0.0f64;
    for _ in 0..samples {
        // h_inv(h(x)) == x on samples.
        let x = random_point(&fam.space, &mut rng);
        let hx = h.apply(&fam.space, &x)?;
        let back = h_inv.apply(&target_space, &hx)?;
        max_err = max_err.max(distance(&fam.space, &back, &x)?);
    }
    if max_err > tol {
        return Err(Error::InvalidConjugacy {
            max_error: max_err,
            tol,
        });
    }
    let conjugated: Vec<MapSpec> = maps
        .iter()
        .map(|f| {
            MapSpec::Composition {
                maps: vec![h_inv.clone(), f.clone(), h.clone()],
            }
            .simplified()
        })
        .collect();
    let target = MapFamily {
        space: target_space,
        generator: Generator::Periodic { maps: conjugated },
        surjective: fam.surjective,
    };
    let mut record = ConjugacyRecord {
        base: fam.clone(),
        target,
        h,
        h_inv: Some(h_inv),
        kind: ConjugacyKind::Conjugacy,
        samples_checked: samples,
        max_commutation_error: 0.0,
    };
    let err = commutation_error(&record, samples, seed ^ 0x9e37_79b9)?;
    if err > tol {
        return Err(Error::InvalidConjugacy {
            max_error: err,
            tol,
        });
    }
    record.max_commutation_error = err;
    Ok(record)
}

/// Checks `g_n(h(x)) = h(f_n(x))` on sampled points for a caller-supplied
/// target family (semiconjugacy; `h` need not be invertible).
pub fn check_semiconjugacy(
    base: &MapFamily,
    target: &MapFamily,
    h: MapSpec,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<ConjugacyRecord> {
    let mut record = ConjugacyRecord {
        base: base.clone(),
        target: target.clone(),
        h,
        h_inv: None,
        kind: ConjugacyKind::Semiconjugacy,
        samples_checked: samples,
        max_commutation_error: 0.0,
    };
    let err = commutation_error(&record, samples, seed)?;
    if err > tol {
        return Err(Error::InvalidConjugacy {
            max_error: err,
            tol,
        });
    }
    record.max_commutation_error = err;
    Ok(record)
}

fn commutation_error(record: &ConjugacyRecord, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_err = 0.0f64;
    let horizon = 10u64;
    for _ in 0..samples.max(1) {
        let x = random_point(&record.base.space, &mut rng);
        let n = rng.gen_range(1..=horizon);
        // h(f_1^n(x)) vs g_1^n(h(x))
        let fx = compose_segment(&record.base, 1, n, &x)?;
        let lhs = record.h.apply(&record.base.space, &fx)?;
        let hx = record.h.apply(&record.base.space, &x)?;
        let rhs = compose_segment(&record.target, 1, n, &hx)?;
        max_err = max_err.max(distance(&record.target.space, &lhs, &rhs)?);
    }
    Ok(max_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::SymbolicPoint;

    fn full_shift() -> MapFamily {
        MapFamily::autonomous(
            SpaceDescriptor::Symbolic,
            MapSpec::ShiftPower { exponent: 1 },
        )
        .unwrap()
    }

    fn zigzag() -> MapFamily {
        MapFamily {
            space: SpaceDescriptor::Symbolic,
            generator: Generator::ZigzagShift,
            surjective: true,
        }
    }

    fn logistic4_family() -> MapFamily {
        MapFamily::autonomous(
            SpaceDescriptor::unit_interval(),
            MapSpec::Logistic { a: 4.0 },
        )
        .unwrap()
    }

    #[test]
    fn logistic_segment_values() {
        let fam = logistic4_family();
        let x = SpacePoint::interval(0.5);
        let y = compose_segment(&fam, 1, 1, &x).unwrap();
        assert_eq!(y.as_interval().unwrap(), 1.0);
        let z = compose_segment(&fam, 1, 2, &x).unwrap();
        assert_eq!(z.as_interval().unwrap(), 0.0);
    }

    #[test]
    fn zero_steps_is_identity() {
        let fam = zigzag();
        let x = SpacePoint::symbolic_str("0110").unwrap();
        assert_eq!(compose_segment(&fam, 3, 0, &x).unwrap(), x);
    }

    #[test]
    fn zigzag_odd_times_are_shift_powers() {
        let fam = zigzag();
        let x = SpacePoint::symbolic_str("01").unwrap();
        for k in 1..=5i64 {
            let lhs = compose_segment(&fam, 1, (2 * k - 1) as u64, &x).unwrap();
            let rhs = SpacePoint::symbolic(x.as_symbolic().unwrap().shifted(k));
            assert_eq!(lhs, rhs, "f_1^(2k-1) = sigma^k at k={k}");
        }
        // And even times are the identity.
        for m in 1..=5u64 {
            assert_eq!(compose_segment(&fam, 1, 2 * m, &x).unwrap(), x);
        }
    }

    #[test]
    fn collapsing_constants_orbit() {
        let fam = MapFamily {
            space: SpaceDescriptor::real_line_window(),
            generator: Generator::CollapsingConstants,
            surjective: false,
        };
        let orb = orbit(&fam, &SpacePoint::interval(1.3), 3).unwrap();
        let values: Vec<f64> = orb.iter().map(|p| p.as_interval().unwrap()).collect();
        assert_eq!(values, vec![1.3, 0.5, 0.25, 0.125]);
    }

    #[test]
    fn alternating_inverse_orbit_has_two_points() {
        let fam = MapFamily::periodic(
            SpaceDescriptor::Symbolic,
            vec![
                MapSpec::ShiftPower { exponent: 1 },
                MapSpec::ShiftPower { exponent: -1 },
            ],
        )
        .unwrap();
        let x = SpacePoint::symbolic_str("0010110").unwrap();
        let orb = orbit(&fam, &x, 4).unwrap();
        assert_eq!(orb[0], x);
        assert_eq!(orb[2], x);
        assert_eq!(orb[4], x);
        assert_eq!(orb[1], orb[3]);
        assert_ne!(orb[0], orb[1]);
    }

    #[test]
    fn identity_family_orbit() {
        let fam =
            MapFamily::autonomous(SpaceDescriptor::unit_interval(), MapSpec::Identity).unwrap();
        let orb = orbit(&fam, &SpacePoint::interval(0.3), 5).unwrap();
        assert!(orb.iter().all(|p| *p == SpacePoint::interval(0.3)));
    }

    #[test]
    fn collapse_of_shift_triple_is_single_shift() {
        let fam = MapFamily::periodic(
            SpaceDescriptor::Symbolic,
            vec![
                MapSpec::ShiftPower { exponent: 1 },
                MapSpec::ShiftPower { exponent: -2 },
                MapSpec::ShiftPower { exponent: 2 },
            ],
        )
        .unwrap();
        assert_eq!(
            periodic_collapse(&fam).unwrap(),
            MapSpec::ShiftPower { exponent: 1 }
        );
    }

    #[test]
    fn collapse_of_alternating_inverse_is_identity() {
        let fam = MapFamily::periodic(
            SpaceDescriptor::Symbolic,
            vec![
                MapSpec::ShiftPower { exponent: 1 },
                MapSpec::ShiftPower { exponent: -1 },
            ],
        )
        .unwrap();
        assert_eq!(periodic_collapse(&fam).unwrap(), MapSpec::Identity);
    }

    #[test]
    fn collapse_of_logistic_identity_pair() {
        let fam = MapFamily::periodic(
            SpaceDescriptor::unit_interval(),
            vec![MapSpec::Logistic { a: 4.0 }, MapSpec::Identity],
        )
        .unwrap();
        assert_eq!(
            periodic_collapse(&fam).unwrap(),
            MapSpec::Logistic { a: 4.0 }
        );
    }

    #[test]
    fn collapse_matches_iterates() {
        let fam = MapFamily::periodic(
            SpaceDescriptor::Symbolic,
            vec![
                MapSpec::ShiftPower { exponent: 1 },
                MapSpec::ShiftPower { exponent: -2 },
                MapSpec::ShiftPower { exponent: 2 },
            ],
        )
        .unwrap();
        let g = collapsed_family(&fam).unwrap();
        let x = SpacePoint::symbolic_str("0010110").unwrap();
        for j in 0..=8u64 {
            assert_eq!(
                compose_segment(&fam, 1, 3 * j, &x).unwrap(),
                compose_segment(&g, 1, j, &x).unwrap(),
                "f_1^(3j) = g^j at j={j}"
            );
        }
    }

    #[test]
    fn product_family_evaluates_componentwise() {
        let f = full_shift();
        let g = MapFamily::periodic(
            SpaceDescriptor::unit_interval(),
            vec![MapSpec::Logistic { a: 4.0 }, MapSpec::Identity],
        )
        .unwrap();
        let prod = product_family(&f, &g);
        assert_eq!(prod.period(), Some(2));
        let x = SpacePoint::product(
            SpacePoint::symbolic_str("01").unwrap(),
            SpacePoint::interval(0.5),
        );
        let y = compose_segment(&prod, 1, 2, &x).unwrap();
        let (yl, yr) = y.as_product().unwrap();
        assert_eq!(
            *yl,
            SpacePoint::symbolic(SymbolicPoint::from_bit_str("01", 0).unwrap().shifted(2))
        );
        // Second factor is (logistic, identity): 0.5 -> 1.0, then fixed.
        assert_eq!(yr.as_interval().unwrap(), 1.0);
        // Orbit of the product is the zip of orbits.
        let ox = orbit(&f, &SpacePoint::symbolic_str("01").unwrap(), 12).unwrap();
        let oy = orbit(&g, &SpacePoint::interval(0.5), 12).unwrap();
        let op = orbit(&prod, &x, 12).unwrap();
        for n in 0..=12usize {
            let (l, r) = op[n].as_product().unwrap();
            assert_eq!(*l, ox[n]);
            assert_eq!(*r, oy[n]);
        }
    }

    #[test]
    fn cocycle_identity() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for fam in [zigzag(), full_shift()] {
            for _ in 0..25 {
                let x = random_point(&fam.space, &mut rng);
                let n = rng.gen_range(1..=10u64);
                let i = rng.gen_range(0..=10u64);
                let j = rng.gen_range(0..=10u64);
                let whole = compose_segment(&fam, n, i + j, &x).unwrap();
                let mid = compose_segment(&fam, n, i, &x).unwrap();
                let stepped = compose_segment(&fam, n + i, j, &mid).unwrap();
                assert_eq!(whole, stepped);
            }
        }
        let fam = logistic4_family();
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        for _ in 0..25 {
            let x = random_point(&fam.space, &mut rng);
            let (n, i, j) = (
                rng.gen_range(1..=6u64),
                rng.gen_range(0..=6u64),
                rng.gen_range(0..=6u64),
            );
            let whole = compose_segment(&fam, n, i + j, &x).unwrap();
            let mid = compose_segment(&fam, n, i, &x).unwrap();
            let stepped = compose_segment(&fam, n + i, j, &mid).unwrap();
            let d = distance(&fam.space, &whole, &stepped).unwrap();
            assert!(d <= 1e-12);
        }
    }

    #[test]
    fn periodic_points_of_named_families() {
        // Alternating f, f^-1: every point has n = 2, exactly.
        let alt = MapFamily::periodic(
            SpaceDescriptor::Symbolic,
            vec![
                MapSpec::ShiftPower { exponent: 1 },
                MapSpec::ShiftPower { exponent: -1 },
            ],
        )
        .unwrap();
        let x = SpacePoint::symbolic_str("011010").unwrap();
        assert!(is_periodic_point(&alt, &x, 2, 5, 0.0).unwrap());
        // Zigzag: every point has n = 2 as well.
        assert!(is_periodic_point(&zigzag(), &x, 2, 5, 0.0).unwrap());
        // Logistic(4): 0 is fixed, 0.5 is not periodic (hits the fixed point 0).
        let log = logistic4_family();
        assert!(is_periodic_point(&log, &SpacePoint::interval(0.0), 1, 4, 1e-12).unwrap());
        assert!(!is_periodic_point(&log, &SpacePoint::interval(0.5), 1, 4, 1e-12).unwrap());
    }

    #[test]
    fn conjugation_by_identity_preserves_family() {
        let fam = logistic4_family();
        let rec = conjugate_family(
            &fam,
            MapSpec::Identity,
            MapSpec::Identity,
            SpaceDescriptor::unit_interval(),
            50,
            1e-12,
            1,
        )
        .unwrap();
        let x = SpacePoint::interval(0.37);
        for n in 1..=6 {
            let a = compose_segment(&fam, 1, n, &x).unwrap();
            let b = compose_segment(&rec.target, 1, n, &x).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn tent_is_semiconjugate_to_logistic4() {
        let tent = MapFamily::autonomous(SpaceDescriptor::unit_interval(), MapSpec::Tent).unwrap();
        let log = logistic4_family();
        // h(x) = sin^2(pi x / 2) intertwines: h(T(x)) = L4(h(x)).
        let rec = check_semiconjugacy(&tent, &log, MapSpec::SineSquared, 100, 1e-9, 5).unwrap();
        assert!(rec.max_commutation_error <= 1e-9);
        // Grid check at 100 points, single step.
        for i in 0..=100 {
            let x = SpacePoint::interval(i as f64 / 100.0);
            let tx = MapSpec::Tent.apply(&tent.space, &x).unwrap();
            let lhs = MapSpec::SineSquared.apply(&tent.space, &tx).unwrap();
            let hx = MapSpec::SineSquared.apply(&tent.space, &x).unwrap();
            let rhs = MapSpec::Logistic { a: 4.0 }.apply(&log.space, &hx).unwrap();
            assert!((lhs.as_interval().unwrap() - rhs.as_interval().unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn shift_conjugated_by_shift_is_itself() {
        let fam = full_shift();
        let rec = conjugate_family(
            &fam,
            MapSpec::ShiftPower { exponent: 1 },
            MapSpec::ShiftPower { exponent: -1 },
            SpaceDescriptor::Symbolic,
            30,
            0.0,
            2,
        )
        .unwrap();
        assert_eq!(
            periodic_collapse(&rec.target).unwrap(),
            MapSpec::ShiftPower { exponent: 1 }
        );
    }

    #[test]
    fn bad_conjugacy_is_rejected() {
        let fam = logistic4_family();
        let err = conjugate_family(
            &fam,
            MapSpec::SineSquared,
            MapSpec::SineSquared, // not the inverse
            SpaceDescriptor::unit_interval(),
            50,
            1e-9,
            3,
        );
        assert!(matches!(err, Err(Error::InvalidConjugacy { .. })));
    }

    #[test]
    fn shift_profile_exponents() {
        let fam = MapFamily::periodic(
            SpaceDescriptor::Symbolic,
            vec![
                MapSpec::ShiftPower { exponent: 1 },
                MapSpec::ShiftPower { exponent: -2 },
                MapSpec::ShiftPower { exponent: 2 },
            ],
        )
        .unwrap();
        let prof = fam.shift_profile().unwrap();
        let x = SpacePoint::symbolic_str("0011010").unwrap();
        for n in 0..=20u64 {
            let direct = compose_segment(&fam, 1, n, &x).unwrap();
            let via = SpacePoint::symbolic(x.as_symbolic().unwrap().shifted(prof.exponent(n)));
            assert_eq!(direct, via, "exponent mismatch at n={n}");
        }
        let zz = zigzag();
        let prof = zz.shift_profile().unwrap();
        for n in 0..=20u64 {
            let direct = compose_segment(&zz, 1, n, &x).unwrap();
            let via = SpacePoint::symbolic(x.as_symbolic().unwrap().shifted(prof.exponent(n)));
            assert_eq!(direct, via);
        }
    }

    #[test]
    fn map_family_json_roundtrip() {
        let fam = MapFamily::periodic(
            SpaceDescriptor::unit_interval(),
            vec![MapSpec::Logistic { a: 4.0 }, MapSpec::Identity],
        )
        .unwrap();
        let js = serde_json::to_string(&fam).unwrap();
        let back: MapFamily = serde_json::from_str(&js).unwrap();
        assert_eq!(fam, back);
    }
}
