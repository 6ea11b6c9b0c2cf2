//! Finite compact subsets, the Hausdorff metric, the induced set-valued
//! family, and the lifting/projection of tracing witnesses between a system
//! and its hyperspace.
//!
//! Compacta are represented by their dense family of finite subsets; the
//! induced maps act pointwise, and `f̄_1^n(A) = {f_1^n(a) : a in A}`.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{distance, SpaceDescriptor, SpacePoint};
use crate::specification::{
    evaluate_witness, verify_certificate, PeriodCheck, SegmentSpec, TracingCertificate, PERIOD_TOL,
    RECORD_SLACK,
};
use crate::systems::MapFamily;

/// A nonempty finite subset, deduplicated under canonical point equality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteCompact {
    points: Vec<SpacePoint>,
}

impl FiniteCompact {
    pub fn new(points: Vec<SpacePoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter(
                "finite compact set must be nonempty".into(),
            ));
        }
        let mut dedup: Vec<SpacePoint> = Vec::with_capacity(points.len());
        for p in points {
            if !dedup.contains(&p) {
                dedup.push(p);
            }
        }
        Ok(FiniteCompact { points: dedup })
    }

    pub fn singleton(p: SpacePoint) -> Self {
        FiniteCompact { points: vec![p] }
    }

    pub fn points(&self) -> &[SpacePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// `H(A, B) = max(sup_a inf_b d(a,b), sup_b inf_a d(a,b))`, the finite-set
/// evaluation of the two-sided neighborhood infimum.
pub fn hausdorff(space: &SpaceDescriptor, a: &FiniteCompact, b: &FiniteCompact) -> Result<f64> {
    hausdorff_points(space, &a.points, &b.points)
}

fn hausdorff_points(space: &SpaceDescriptor, a: &[SpacePoint], b: &[SpacePoint]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (xs, ys) in [(a, b), (b, a)] {
        for x in xs {
            let mut best = f64::INFINITY;
            for y in ys {
                let d = distance(space, x, y)?;
                if d < best {
                    best = d;
                }
            }
            if best > worst {
                worst = best;
            }
        }
    }
    Ok(worst)
}

/// Image of a set under the n-th map of the family.
pub fn image_set(fam: &MapFamily, n: u64, a: &FiniteCompact) -> Result<FiniteCompact> {
    let mapped: Result<Vec<SpacePoint>> = a
        .points
        .iter()
        .map(|p| fam.map_at(n).apply(&fam.space, p))
        .collect();
    FiniteCompact::new(mapped?)
}

/// `[A, f̄_1^1(A), ..., f̄_1^N(A)]`; image cardinality may drop.
pub fn induced_orbit(fam: &MapFamily, a: &FiniteCompact, steps: u64) -> Result<Vec<FiniteCompact>> {
    let mut out = Vec::with_capacity(steps as usize + 1);
    out.push(a.clone());
    let mut cur = a.clone();
    for n in 1..=steps {
        cur = image_set(fam, n, &cur)?;
        out.push(cur.clone());
    }
    Ok(out)
}

/// A specification instance on the hyperspace: one finite set per segment,
/// with an aligned enumeration (the i-th element of every set corresponds
/// across segments, repetitions allowed).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperSpec {
    pub segments: Vec<(u64, u64)>,
    pub gap: u64,
    pub sets: Vec<Vec<SpacePoint>>,
    pub eps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<u64>,
}

impl HyperSpec {
    pub fn new(
        segments: Vec<(u64, u64)>,
        gap: u64,
        sets: Vec<Vec<SpacePoint>>,
        eps: f64,
        period: Option<u64>,
    ) -> Result<Self> {
        let n = sets.first().map(|s| s.len()).unwrap_or(0);
        if n == 0 {
            return Err(Error::InvalidSpec(
                "hyperspace targets must be nonempty".into(),
            ));
        }
        if sets.iter().any(|s| s.len() != n) {
            return Err(Error::InvalidSpec(
                "aligned enumerations need the same element count in every set (repeat elements to pad)".into(),
            ));
        }
        // Reuse the scalar validation for times/gap/eps/period.
        let probe: Vec<SpacePoint> = sets.iter().map(|s| s[0].clone()).collect();
        SegmentSpec::new(segments.clone(), gap, probe, eps, period)?;
        Ok(HyperSpec {
            segments,
            gap,
            sets,
            eps,
            period,
        })
    }

    pub fn element_count(&self) -> usize {
        self.sets[0].len()
    }

    pub fn compact_set(&self, l: usize) -> Result<FiniteCompact> {
        FiniteCompact::new(self.sets[l].clone())
    }

    /// The scalar spec traced by element `i` across all segments.
    pub fn element_spec(&self, i: usize, period: Option<u64>) -> Result<SegmentSpec> {
        SegmentSpec::new(
            self.segments.clone(),
            self.gap,
            self.sets.iter().map(|s| s[i].clone()).collect(),
            self.eps,
            period,
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HyperCertificate {
    pub witness: FiniteCompact,
    pub per_segment_max_hausdorff: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub period_evidence: Vec<PeriodCheck>,
}

/// Lifts per-element tracing certificates to a hyperspace certificate:
/// `C = {z_i}` traces every set in Hausdorff distance. The Hausdorff bounds
/// are computed by simulation, not inferred from the pointwise bounds; in the
/// SSP case the set period is the lcm of the element periods.
pub fn lift_witness_hyperspace(
    fam: &MapFamily,
    spec: &HyperSpec,
    element_certs: &[TracingCertificate],
    multiples: u64,
) -> Result<HyperCertificate> {
    let n = spec.element_count();
    if element_certs.len() != n {
        return Err(Error::BadBaseCertificate {
            index: element_certs.len(),
            reason: format!(
                "need one certificate per element, got {} for {n}",
                element_certs.len()
            ),
        });
    }
    let mut period = None;
    if spec.period.is_some() {
        let mut lcm = 1u64;
        for (i, cert) in element_certs.iter().enumerate() {
            let p = cert.period.ok_or_else(|| Error::BadBaseCertificate {
                index: i,
                reason: "set-level period requires periodic element certificates".into(),
            })?;
            lcm = lcm.lcm(&p);
        }
        if spec.period != Some(lcm) {
            return Err(Error::InvalidSpec(format!(
                "set-level period {:?} must be the lcm {lcm} of the element periods",
                spec.period
            )));
        }
        period = Some(lcm);
    }
    for (i, cert) in element_certs.iter().enumerate() {
        let escpec = spec.element_spec(i, cert.period)?;
        if !verify_certificate(fam, &escpec, cert)? {
            return Err(Error::BadBaseCertificate {
                index: i,
                reason: "element certificate fails verification".into(),
            });
        }
    }
    let witness = FiniteCompact::new(element_certs.iter().map(|c| c.witness.clone()).collect())?;
    let (per_segment_max_hausdorff, period_evidence) =
        hyper_trace(fam, spec, &witness, period, multiples)?;
    Ok(HyperCertificate {
        witness,
        per_segment_max_hausdorff,
        period,
        period_evidence,
    })
}

/// Walks the induced orbits and computes the Hausdorff tracing distances and
/// periodic returns; errors are strict-inequality failures mapped to None.
fn hyper_trace(
    fam: &MapFamily,
    spec: &HyperSpec,
    witness: &FiniteCompact,
    period: Option<u64>,
    multiples: u64,
) -> Result<(Vec<f64>, Vec<PeriodCheck>)> {
    let space = &fam.space;
    let horizon = spec.segments.last().unwrap().1;
    let mut seg_max = vec![0.0f64; spec.segments.len()];
    let mut cur_c: Vec<SpacePoint> = witness.points().to_vec();
    let mut cur_sets: Vec<Vec<SpacePoint>> = spec.sets.clone();
    for j in 0..=horizon {
        if j > 0 {
            let m = fam.map_at(j);
            for p in cur_c.iter_mut() {
                *p = m.apply(space, p)?;
            }
            for set in cur_sets.iter_mut() {
                for p in set.iter_mut() {
                    *p = m.apply(space, p)?;
                }
            }
        }
        for (l, &(a, b)) in spec.segments.iter().enumerate() {
            if j < a || j > b {
                continue;
            }
            let h = hausdorff_points(space, &cur_c, &cur_sets[l])?;
            if h >= spec.eps {
                return Err(Error::BadBaseCertificate {
                    index: l,
                    reason: format!("hausdorff tracing failed at time {j}: {h} >= {}", spec.eps),
                });
            }
            if h > seg_max[l] {
                seg_max[l] = h;
            }
        }
    }
    let mut period_evidence = Vec::new();
    if let Some(p) = period {
        let exact = matches!(space, SpaceDescriptor::Symbolic);
        let mut cur: Vec<SpacePoint> = witness.points().to_vec();
        for m in 1..=multiples.max(1) {
            for t in ((m - 1) * p)..(m * p) {
                let map = fam.map_at(t + 1);
                for q in cur.iter_mut() {
                    *q = map.apply(space, q)?;
                }
            }
            let h = hausdorff_points(space, &cur, witness.points())?;
            let ok = if exact { h == 0.0 } else { h <= PERIOD_TOL };
            if !ok {
                return Err(Error::BadBaseCertificate {
                    index: 0,
                    reason: format!("set not fixed by the period-{p} return (H = {h})"),
                });
            }
            period_evidence.push(PeriodCheck {
                multiple: m,
                distance: h,
            });
        }
    }
    Ok((seg_max, period_evidence))
}

/// Re-checks a hyperspace certificate by pure simulation.
pub fn verify_hyper_certificate(
    fam: &MapFamily,
    spec: &HyperSpec,
    cert: &HyperCertificate,
) -> Result<bool> {
    let multiples = cert
        .period_evidence
        .iter()
        .map(|c| c.multiple)
        .max()
        .unwrap_or(1);
    match hyper_trace(fam, spec, &cert.witness, cert.period, multiples) {
        Ok((seg_max, evidence)) => {
            if seg_max.len() != cert.per_segment_max_hausdorff.len() {
                return Ok(false);
            }
            for (a, b) in seg_max.iter().zip(&cert.per_segment_max_hausdorff) {
                if (a - b).abs() > RECORD_SLACK {
                    return Ok(false);
                }
            }
            if spec.period.is_some()
                && (cert.period != spec.period || evidence.len() != cert.period_evidence.len())
            {
                return Ok(false);
            }
            Ok(true)
        }
        Err(Error::BadBaseCertificate { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Extracts a base witness from a hyperspace certificate whose targets are
/// singletons: some element of the witness set must trace the points
/// themselves. Picks the element minimizing the worst traced distance.
pub fn project_witness_from_hyperspace(
    fam: &MapFamily,
    spec: &HyperSpec,
    cert: &HyperCertificate,
) -> Result<TracingCertificate> {
    if spec.sets.iter().any(|s| s.len() != 1) {
        return Err(Error::InvalidSpec(
            "projection needs singleton hyperspace targets".into(),
        ));
    }
    let base_spec = SegmentSpec::new(
        spec.segments.clone(),
        spec.gap,
        spec.sets.iter().map(|s| s[0].clone()).collect(),
        spec.eps,
        spec.period,
    )?;
    let space = &fam.space;
    let horizon = base_spec.last_time();
    // Score each element by its worst in-segment distance.
    let mut best: Option<(usize, f64)> = None;
    for (bi, b) in cert.witness.points().iter().enumerate() {
        let orbit_b = crate::systems::orbit(fam, b, horizon)?;
        let mut worst = 0.0f64;
        for (l, &(a, bb)) in spec.segments.iter().enumerate() {
            let orbit_t = crate::systems::orbit(fam, &spec.sets[l][0], horizon)?;
            for j in a..=bb {
                let d = distance(space, &orbit_b[j as usize], &orbit_t[j as usize])?;
                if d > worst {
                    worst = d;
                }
            }
        }
        if best.map(|(_, w)| worst < w).unwrap_or(true) {
            best = Some((bi, worst));
        }
    }
    let (bi, score) = best.expect("witness set is nonempty");
    if score >= spec.eps {
        return Err(Error::InvalidHypercert { best: score });
    }
    let multiples = cert
        .period_evidence
        .iter()
        .map(|c| c.multiple)
        .max()
        .unwrap_or(1);
    match evaluate_witness(fam, &base_spec, &cert.witness.points()[bi], multiples)? {
        Some(base_cert) => Ok(base_cert),
        None => Err(Error::InvalidHypercert { best: score }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::SymbolicPoint;
    use crate::specification::{find_wsp_witness, SearchOptions};
    use crate::systems::MapSpec;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit() -> SpaceDescriptor {
        SpaceDescriptor::unit_interval()
    }

    fn pts(vals: &[f64]) -> FiniteCompact {
        FiniteCompact::new(vals.iter().map(|&v| SpacePoint::interval(v)).collect()).unwrap()
    }

    #[test]
    fn hausdorff_basics() {
        assert_eq!(hausdorff(&unit(), &pts(&[0.0]), &pts(&[1.0])).unwrap(), 1.0);
        assert_eq!(
            hausdorff(&unit(), &pts(&[0.0, 1.0]), &pts(&[0.5])).unwrap(),
            0.5
        );
        let a = pts(&[0.1, 0.4, 0.9]);
        assert_eq!(hausdorff(&unit(), &a, &a).unwrap(), 0.0);
    }

    #[test]
    fn hausdorff_matches_candidate_enumeration_oracle() {
        // Oracle: the distance is the least eps among all pairwise distances
        // such that each set lies in the eps-neighborhood of the other.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..300 {
            let a: Vec<f64> = (0..rng.gen_range(1..=8)).map(|_| rng.gen()).collect();
            let b: Vec<f64> = (0..rng.gen_range(1..=8)).map(|_| rng.gen()).collect();
            let fa = pts(&a);
            let fb = pts(&b);
            let h = hausdorff(&unit(), &fa, &fb).unwrap();
            let mut candidates: Vec<f64> = Vec::new();
            for x in &a {
                for y in &b {
                    candidates.push((x - y).abs());
                }
            }
            candidates.sort_by(|p, q| p.partial_cmp(q).unwrap());
            let covered = |eps: f64| -> bool {
                a.iter().all(|x| b.iter().any(|y| (x - y).abs() <= eps))
                    && b.iter().all(|y| a.iter().any(|x| (x - y).abs() <= eps))
            };
            let oracle = candidates.iter().copied().find(|&c| covered(c)).unwrap();
            assert_eq!(h, oracle, "a={a:?} b={b:?}");
        }
    }

    #[test]
    fn singleton_embedding_is_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let x: f64 = rng.gen();
            let y: f64 = rng.gen();
            let h = hausdorff(
                &unit(),
                &FiniteCompact::singleton(SpacePoint::interval(x)),
                &FiniteCompact::singleton(SpacePoint::interval(y)),
            )
            .unwrap();
            assert_eq!(h, (x - y).abs());
        }
    }

    #[test]
    fn induced_orbit_matches_pointwise_images() {
        let fam = MapFamily::autonomous(unit(), MapSpec::Logistic { a: 4.0 }).unwrap();
        let a = pts(&[0.5, 0.0]);
        let orb = induced_orbit(&fam, &a, 2).unwrap();
        assert_eq!(orb[1], pts(&[1.0, 0.0]));
        // Cardinality drops once both atoms land on 0.
        assert_eq!(orb[2], pts(&[0.0]));
        // Singleton sets evolve like points.
        let s = FiniteCompact::singleton(SpacePoint::interval(0.3));
        let sorb = induced_orbit(&fam, &s, 3).unwrap();
        let porb = crate::systems::orbit(&fam, &SpacePoint::interval(0.3), 3).unwrap();
        for (set, p) in sorb.iter().zip(&porb) {
            assert_eq!(set.points(), std::slice::from_ref(p));
        }
    }

    #[test]
    fn shift_fixed_points_stay_fixed_as_a_set() {
        let fam = MapFamily::autonomous(
            SpaceDescriptor::Symbolic,
            MapSpec::ShiftPower { exponent: 1 },
        )
        .unwrap();
        let a = FiniteCompact::new(vec![
            SpacePoint::symbolic(SymbolicPoint::all_zeros()),
            SpacePoint::symbolic(SymbolicPoint::all_ones()),
        ])
        .unwrap();
        let orb = induced_orbit(&fam, &a, 5).unwrap();
        for set in orb {
            assert_eq!(set, a);
        }
    }

    #[test]
    fn lift_two_element_sets_on_shift() {
        let fam = MapFamily::autonomous(
            SpaceDescriptor::Symbolic,
            MapSpec::ShiftPower { exponent: 1 },
        )
        .unwrap();
        let a1 = vec![
            SpacePoint::symbolic_str("0").unwrap(),
            SpacePoint::symbolic_str("0110").unwrap(),
        ];
        let a2 = vec![
            SpacePoint::symbolic_str("1").unwrap(),
            SpacePoint::symbolic_str("10").unwrap(),
        ];
        let spec = HyperSpec::new(vec![(0, 1), (10, 11)], 7, vec![a1, a2], 0.5, None).unwrap();
        let mut certs = Vec::new();
        for i in 0..2 {
            let es = spec.element_spec(i, None).unwrap();
            let cert = find_wsp_witness(&fam, &es, &SearchOptions::default())
                .unwrap()
                .certificate()
                .expect("splice witness per element")
                .clone();
            certs.push(cert);
        }
        let hyper = lift_witness_hyperspace(&fam, &spec, &certs, 3).unwrap();
        assert!(verify_hyper_certificate(&fam, &spec, &hyper).unwrap());
        // The achieved Hausdorff bound never exceeds the max pointwise bound.
        for (l, h) in hyper.per_segment_max_hausdorff.iter().enumerate() {
            let pointwise = certs
                .iter()
                .map(|c| c.segment_max_distances[l])
                .fold(0.0f64, f64::max);
            assert!(h <= &(pointwise + 1e-12), "segment {l}: {h} vs {pointwise}");
        }
    }

    #[test]
    fn singleton_lift_projects_back() {
        let fam = MapFamily::autonomous(
            SpaceDescriptor::Symbolic,
            MapSpec::ShiftPower { exponent: 1 },
        )
        .unwrap();
        let spec = HyperSpec::new(
            vec![(0, 0), (9, 9)],
            6,
            vec![
                vec![SpacePoint::symbolic(SymbolicPoint::all_zeros())],
                vec![SpacePoint::symbolic(SymbolicPoint::all_ones())],
            ],
            0.5,
            None,
        )
        .unwrap();
        let es = spec.element_spec(0, None).unwrap();
        let cert = find_wsp_witness(&fam, &es, &SearchOptions::default())
            .unwrap()
            .certificate()
            .unwrap()
            .clone();
        let hyper = lift_witness_hyperspace(&fam, &spec, std::slice::from_ref(&cert), 3).unwrap();
        let base = project_witness_from_hyperspace(&fam, &spec, &hyper).unwrap();
        let base_spec = SegmentSpec::new(
            spec.segments.clone(),
            spec.gap,
            vec![
                SpacePoint::symbolic(SymbolicPoint::all_zeros()),
                SpacePoint::symbolic(SymbolicPoint::all_ones()),
            ],
            0.5,
            None,
        )
        .unwrap();
        assert!(verify_certificate(&fam, &base_spec, &base).unwrap());
    }

    #[test]
    fn adversarial_hypercert_rejected() {
        let fam = MapFamily::autonomous(
            SpaceDescriptor::Symbolic,
            MapSpec::ShiftPower { exponent: 1 },
        )
        .unwrap();
        let spec = HyperSpec::new(
            vec![(0, 0), (9, 9)],
            6,
            vec![
                vec![SpacePoint::symbolic(SymbolicPoint::all_zeros())],
                vec![SpacePoint::symbolic(SymbolicPoint::all_ones())],
            ],
            0.5,
            None,
        )
        .unwrap();
        // All elements far from the targets.
        let bogus = HyperCertificate {
            witness: FiniteCompact::new(vec![SpacePoint::symbolic_str("10").unwrap()]).unwrap(),
            per_segment_max_hausdorff: vec![0.0, 0.0],
            period: None,
            period_evidence: vec![],
        };
        assert!(matches!(
            project_witness_from_hyperspace(&fam, &spec, &bogus),
            Err(Error::InvalidHypercert { .. })
        ));
    }

    #[test]
    fn ssp_lift_takes_lcm_of_element_periods() {
        let fam = MapFamily::autonomous(
            SpaceDescriptor::Symbolic,
            MapSpec::ShiftPower { exponent: 1 },
        )
        .unwrap();
        let spec = HyperSpec::new(
            vec![(0, 1)],
            2,
            vec![vec![
                SpacePoint::symbolic_str("0").unwrap(),
                SpacePoint::symbolic_str("1").unwrap(),
            ]],
            0.5,
            Some(12),
        )
        .unwrap();
        // Build element certificates at periods 4 and 6 by hand.
        let mut certs = Vec::new();
        for (i, p) in [(0usize, 4u64), (1usize, 6u64)] {
            let es = spec.element_spec(i, Some(p)).unwrap();
            let cert = crate::specification::find_ssp_witness(&fam, &es, &SearchOptions::default())
                .unwrap()
                .certificate()
                .expect("periodic splice")
                .clone();
            certs.push(cert);
        }
        let hyper = lift_witness_hyperspace(&fam, &spec, &certs, 3).unwrap();
        assert_eq!(hyper.period, Some(12));
        assert!(verify_hyper_certificate(&fam, &spec, &hyper).unwrap());
    }

    #[test]
    fn hausdorff_metric_axioms_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let sp = unit();
        for _ in 0..200 {
            let mk = |rng: &mut ChaCha8Rng| {
                let n = rng.gen_range(1..=6);
                FiniteCompact::new((0..n).map(|_| SpacePoint::interval(rng.gen())).collect())
                    .unwrap()
            };
            let a = mk(&mut rng);
            let b = mk(&mut rng);
            let c = mk(&mut rng);
            let dab = hausdorff(&sp, &a, &b).unwrap();
            let dba = hausdorff(&sp, &b, &a).unwrap();
            let dac = hausdorff(&sp, &a, &c).unwrap();
            let dcb = hausdorff(&sp, &c, &b).unwrap();
            assert_eq!(dab, dba);
            assert!(hausdorff(&sp, &a, &a).unwrap() == 0.0);
            assert!(dab <= dac + dcb + 1e-12);
        }
    }
}
