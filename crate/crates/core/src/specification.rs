//! Witness search and witness transformation for the strong (SSP), weak
//! (WSP) and quasi-weak (QSP) specification properties.
//!
//! A specification instance asks for one point whose orbit eps-traces several
//! prescribed orbit segments; the SSP variant additionally requires the point
//! to be periodic. Searches emit [`TracingCertificate`]s which are always
//! re-verifiable by [`verify_certificate`] — the ground-truth operation that
//! every constructor and transform in this module must satisfy.

use num_integer::Integer;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::properties::{check_mixing, Evidence, MixingParams, PropertyVerdict, Verdict};
use crate::spaces::{
    ball_sample_points, distance, epsilon_net, random_point, symbolic, window_radius_for, Ball,
    SpaceDescriptor, SpacePoint,
};
use crate::systems::{collapsed_family, MapFamily, MapSpec, ShiftProfile};

/// Tolerance for the periodic-return condition on non-exact (floating-point)
/// spaces; purely symbolic spaces require exact returns.
pub const PERIOD_TOL: f64 = 1e-9;
/// Allowed drift between a certificate's recorded distances and their
/// re-computation.
pub const RECORD_SLACK: f64 = 1e-9;

/// The data of one specification instance: segment times `(a_i, b_i)`, the
/// gap bound, one target point per segment, the tracing radius and, for SSP,
/// the required period.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    pub segments: Vec<(u64, u64)>,
    /// Gap bound M: consecutive segments satisfy `a_j - b_{j-1} > gap`.
    pub gap: u64,
    pub targets: Vec<SpacePoint>,
    pub eps: f64,
    /// SSP period, constrained to `p > gap + b_k - a_1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<u64>,
}

impl SegmentSpec {
    pub fn new(
        segments: Vec<(u64, u64)>,
        gap: u64,
        targets: Vec<SpacePoint>,
        eps: f64,
        period: Option<u64>,
    ) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidSpec("at least one segment required".into()));
        }
        if targets.len() != segments.len() {
            return Err(Error::InvalidSpec(format!(
                "{} targets for {} segments",
                targets.len(),
                segments.len()
            )));
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(eps > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "eps must be positive, got {eps}"
            )));
        }
        for (i, &(a, b)) in segments.iter().enumerate() {
            if a > b {
                return Err(Error::InvalidSpec(format!(
                    "segment {i} has a > b: ({a}, {b})"
                )));
            }
            if i > 0 {
                let prev_b = segments[i - 1].1;
                if a <= prev_b {
                    return Err(Error::InvalidSpec(format!(
                        "segment {i} starts at {a}, not after previous end {prev_b}"
                    )));
                }
                if a - prev_b <= gap {
                    return Err(Error::InvalidSpec(format!(
                        "segment {i} gap {} must exceed bound {gap}",
                        a - prev_b
                    )));
                }
            }
        }
        if let Some(p) = period {
            let span = gap + segments.last().unwrap().1 - segments[0].0;
            if p <= span {
                return Err(Error::InvalidSpec(format!(
                    "period {p} must exceed gap + b_k - a_1 = {span}"
                )));
            }
        }
        Ok(SegmentSpec {
            segments,
            gap,
            targets,
            eps,
            period,
        })
    }

    /// The quasi-weak shape: trace `x1` at time 0 and the orbit of `x2` at
    /// time `n`.
    pub fn qsp(x1: SpacePoint, x2: SpacePoint, n: u64, eps: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidSpec("qsp needs n >= 1".into()));
        }
        Self::new(vec![(0, 0), (n, n)], n - 1, vec![x1, x2], eps, None)
    }

    pub fn last_time(&self) -> u64 {
        self.segments.last().unwrap().1
    }

    /// The same instance with the periodicity requirement dropped; any SSP
    /// certificate for `self` is a valid certificate for the result.
    pub fn without_period(&self) -> SegmentSpec {
        SegmentSpec {
            period: None,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodCheck {
    pub multiple: u64,
    pub distance: f64,
}

/// A claimed witness plus the achieved distances; re-simulation must
/// reproduce every recorded number.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TracingCertificate {
    pub witness: SpacePoint,
    pub segment_max_distances: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub period_evidence: Vec<PeriodCheck>,
    pub budget_used: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchReport {
    pub candidates_tried: u64,
    pub budget: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchResult {
    Found { certificate: TracingCertificate },
    Exhausted { report: SearchReport },
}

impl SearchResult {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchResult::Found { .. })
    }

    pub fn certificate(&self) -> Option<&TracingCertificate> {
        match self {
            SearchResult::Found { certificate } => Some(certificate),
            SearchResult::Exhausted { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Periodic-return multiples checked for SSP certificates.
    pub multiples: u64,
    /// Candidate evaluations before giving up.
    pub budget: u64,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            multiples: 3,
            budget: 4000,
            seed: 0,
        }
    }
}

fn space_is_exact(space: &SpaceDescriptor) -> bool {
    match space {
        SpaceDescriptor::Symbolic => true,
        SpaceDescriptor::Product { left, right } => space_is_exact(left) && space_is_exact(right),
        _ => false,
    }
}

/// Target orbits precomputed once; candidates are then single orbit walks
/// with early abort.
struct Evaluator<'a> {
    fam: &'a MapFamily,
    spec: &'a SegmentSpec,
    target_orbits: Vec<Vec<SpacePoint>>,
    multiples: u64,
    exact: bool,
}

impl<'a> Evaluator<'a> {
    fn new(fam: &'a MapFamily, spec: &'a SegmentSpec, multiples: u64) -> Result<Self> {
        let horizon = spec.last_time();
        let mut target_orbits = Vec::with_capacity(spec.targets.len());
        for t in &spec.targets {
            target_orbits.push(crate::systems::orbit(fam, t, horizon)?);
        }
        Ok(Evaluator {
            fam,
            spec,
            target_orbits,
            multiples,
            exact: space_is_exact(&fam.space),
        })
    }

    /// Full verification of one candidate; `None` means some constraint
    /// failed strictly.
    fn evaluate(&self, z: &SpacePoint) -> Result<Option<TracingCertificate>> {
        let space = &self.fam.space;
        let mut seg_max = vec![0.0f64; self.spec.segments.len()];
        let mut cur = z.clone();
        let horizon = self.spec.last_time();
        for j in 0..=horizon {
            if j > 0 {
                cur = self.fam.map_at(j).apply(space, &cur)?;
            }
            for (i, &(a, b)) in self.spec.segments.iter().enumerate() {
                if j < a || j > b {
                    continue;
                }
                let d = distance(space, &cur, &self.target_orbits[i][j as usize])?;
                if d >= self.spec.eps {
                    return Ok(None);
                }
                if d > seg_max[i] {
                    seg_max[i] = d;
                }
            }
        }
        let mut period_evidence = Vec::new();
        if let Some(p) = self.spec.period {
            let mut cur = z.clone();
            for m in 1..=self.multiples.max(1) {
                for t in ((m - 1) * p)..(m * p) {
                    cur = self.fam.map_at(t + 1).apply(space, &cur)?;
                }
                let d = distance(space, &cur, z)?;
                let ok = if self.exact {
                    d == 0.0
                } else {
                    d <= PERIOD_TOL
                };
                if !ok {
                    return Ok(None);
                }
                period_evidence.push(PeriodCheck {
                    multiple: m,
                    distance: d,
                });
            }
        }
        Ok(Some(TracingCertificate {
            witness: z.clone(),
            segment_max_distances: seg_max,
            period: self.spec.period,
            period_evidence,
            budget_used: 0,
        }))
    }
}

/// Evaluates one concrete point against a spec: `Some(certificate)` iff all
/// tracing and period constraints hold strictly.
pub fn evaluate_witness(
    fam: &MapFamily,
    spec: &SegmentSpec,
    z: &SpacePoint,
    multiples: u64,
) -> Result<Option<TracingCertificate>> {
    Evaluator::new(fam, spec, multiples)?.evaluate(z)
}

/// Ground truth: recomputes every traced distance and periodic return of the
/// certificate by pure simulation. True iff all constraints hold strictly
/// and the recorded numbers reproduce.
pub fn verify_certificate(
    fam: &MapFamily,
    spec: &SegmentSpec,
    cert: &TracingCertificate,
) -> Result<bool> {
    let multiples = cert
        .period_evidence
        .iter()
        .map(|c| c.multiple)
        .max()
        .unwrap_or(1);
    let eval = Evaluator::new(fam, spec, multiples)?;
    let Some(recomputed) = eval.evaluate(&cert.witness)? else {
        return Ok(false);
    };
    if cert.segment_max_distances.len() != recomputed.segment_max_distances.len() {
        return Ok(false);
    }
    for (a, b) in cert
        .segment_max_distances
        .iter()
        .zip(&recomputed.segment_max_distances)
    {
        if (a - b).abs() > RECORD_SLACK {
            return Ok(false);
        }
    }
    if spec.period.is_some() {
        if cert.period != spec.period || cert.period_evidence.is_empty() {
            return Ok(false);
        }
        for (rec, comp) in cert.period_evidence.iter().zip(&recomputed.period_evidence) {
            if rec.multiple != comp.multiple || (rec.distance - comp.distance).abs() > RECORD_SLACK
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Word length forced on a periodic splice witness: the period of the word
/// must divide every shift exponent `e(p*m)`.
fn period_word_length(profile: &ShiftProfile, p: u64, multiples: u64) -> u64 {
    let mut g: u64 = 0;
    for m in 1..=multiples.max(8) {
        g = g.gcd(&profile.exponent(p * m).unsigned_abs());
    }
    g
}

/// Closed-form witness for shift families: read as each target across the
/// windows its segment pins, splice the readings into one word (of length
/// `p`'s forced divisor for SSP, or a plain spanning word otherwise).
fn shift_splice_witness(
    profile: &ShiftProfile,
    spec: &SegmentSpec,
    multiples: u64,
) -> Result<Option<SpacePoint>> {
    let a = window_radius_for(spec.eps);
    let mut constraints = Vec::new();
    for (i, &(ai, bi)) in spec.segments.iter().enumerate() {
        let SpacePoint::Symbolic { seq } = &spec.targets[i] else {
            return Ok(None);
        };
        for j in ai..=bi {
            let e = profile.exponent(j);
            constraints.push(symbolic::SpliceConstraint {
                start: e - a,
                bits: seq.window(e - a, e + a),
            });
        }
    }
    let point = match spec.period {
        None => symbolic::splice_spanning(&constraints, (a + 2) as usize, 0),
        Some(p) => {
            let q = period_word_length(profile, p, multiples);
            if q == 0 {
                // Every relevant composition is the identity; no periodicity
                // constraint on the word.
                symbolic::splice_spanning(&constraints, (a + 2) as usize, 0)
            } else {
                symbolic::splice_periodic(&constraints, q as usize, 0)
            }
        }
    };
    Ok(point.map(SpacePoint::symbolic))
}

/// Core search: closed-form constructors first, then net enumeration, then
/// ball-local and random candidates, in one deterministic order. The first
/// candidate passing full verification is returned.
pub fn find_witness(
    fam: &MapFamily,
    spec: &SegmentSpec,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    let eval = Evaluator::new(fam, spec, opts.multiples)?;
    let mut tried: u64 = 0;
    let consider = |z: &SpacePoint, tried: &mut u64| -> Result<Option<TracingCertificate>> {
        if *tried >= opts.budget {
            return Ok(None);
        }
        *tried += 1;
        if let Some(mut cert) = eval.evaluate(z)? {
            cert.budget_used = *tried;
            return Ok(Some(cert));
        }
        Ok(None)
    };

    // Phase 1: the targets themselves.
    for t in &spec.targets {
        if let Some(cert) = consider(t, &mut tried)? {
            return Ok(SearchResult::Found { certificate: cert });
        }
    }
    // Phase 2: splice constructors on shift families.
    if let Some(profile) = fam.shift_profile() {
        if let Some(z) = shift_splice_witness(&profile, spec, opts.multiples)? {
            if let Some(cert) = consider(&z, &mut tried)? {
                return Ok(SearchResult::Found { certificate: cert });
            }
        }
        // SSP fallback: enumerate all words of the forced length when small.
        if let Some(p) = spec.period {
            let q = period_word_length(&profile, p, opts.multiples);
            if (1..=12).contains(&q) {
                for mask in 0..(1u64 << q) {
                    let bits: Vec<u8> = (0..q).map(|i| ((mask >> i) & 1) as u8).collect();
                    let z = SpacePoint::symbolic(symbolic::SymbolicPoint::new(bits, 0)?);
                    if let Some(cert) = consider(&z, &mut tried)? {
                        return Ok(SearchResult::Found { certificate: cert });
                    }
                    if tried >= opts.budget {
                        break;
                    }
                }
            }
        }
    }
    // Phase 3: eps/2 net enumeration on compact spaces of modest size.
    if fam.space.is_compact() {
        if let Ok(net) = epsilon_net(&fam.space, spec.eps / 2.0) {
            if net.len() <= 4096 {
                for z in &net {
                    if let Some(cert) = consider(z, &mut tried)? {
                        return Ok(SearchResult::Found { certificate: cert });
                    }
                    if tried >= opts.budget {
                        break;
                    }
                }
            }
        }
    }
    // Phase 4: deterministic samples in the ball around the first target,
    // then seeded random points there.
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let ball = Ball {
        center: spec.targets[0].clone(),
        radius: spec.eps,
    };
    if let Ok(samples) = ball_sample_points(&fam.space, &ball, 64, &mut rng) {
        for z in &samples {
            if let Some(cert) = consider(z, &mut tried)? {
                return Ok(SearchResult::Found { certificate: cert });
            }
            if tried >= opts.budget {
                break;
            }
        }
    }
    while tried < opts.budget {
        let raw = random_point(&fam.space, &mut rng);
        // Pull random candidates toward the first target's ball when possible.
        let z = match (&fam.space, &spec.targets[0]) {
            (SpaceDescriptor::Interval { .. }, SpacePoint::Interval { value }) => {
                SpacePoint::interval(value + (rng.gen::<f64>() * 2.0 - 1.0) * spec.eps * 0.999)
            }
            (SpaceDescriptor::Circle, SpacePoint::Circle { angle }) => SpacePoint::circle(
                angle + (rng.gen::<f64>() * 2.0 - 1.0) * spec.eps.min(3.0) * 0.999,
            ),
            _ => raw,
        };
        if let Some(cert) = consider(&z, &mut tried)? {
            return Ok(SearchResult::Found { certificate: cert });
        }
    }
    Ok(SearchResult::Exhausted {
        report: SearchReport {
            candidates_tried: tried,
            budget: opts.budget,
        },
    })
}

/// Quasi-weak specification witness: `d(z, x1) < eps` and
/// `d(f_1^n(z), f_1^n(x2)) < eps`.
pub fn find_qsp_witness(
    fam: &MapFamily,
    x1: &SpacePoint,
    x2: &SpacePoint,
    n: u64,
    eps: f64,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    let spec = SegmentSpec::qsp(x1.clone(), x2.clone(), n, eps)?;
    find_witness(fam, &spec, opts)
}

pub fn find_wsp_witness(
    fam: &MapFamily,
    spec: &SegmentSpec,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    if spec.period.is_some() {
        return Err(Error::InvalidSpec(
            "weak specification takes no period; use the SSP search".into(),
        ));
    }
    find_witness(fam, spec, opts)
}

pub fn find_ssp_witness(
    fam: &MapFamily,
    spec: &SegmentSpec,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    if spec.period.is_none() {
        return Err(Error::InvalidSpec(
            "strong specification requires a period".into(),
        ));
    }
    find_witness(fam, spec, opts)
}

/// Two-segment strong specification (the `k = 2` special case).
pub fn find_psp_witness(
    fam: &MapFamily,
    spec: &SegmentSpec,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    if spec.segments.len() != 2 {
        return Err(Error::InvalidSpec(
            "periodic specification is the two-segment case".into(),
        ));
    }
    find_ssp_witness(fam, spec, opts)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MEstimate {
    pub m: u64,
    pub trials: u64,
    pub validations: u64,
    pub mixing: PropertyVerdict,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum MOutcome {
    Estimated {
        estimate: MEstimate,
    },
    Exhausted {
        reason: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        mixing: Option<PropertyVerdict>,
    },
}

/// Constructive gap constant for QSP from a mixing threshold: runs the
/// mixing check at `eps/2` over a finite cover and returns its threshold
/// `n0` as `M`, validated by random QSP searches at times in `[M, M+20]`.
pub fn estimate_m_qsp(
    fam: &MapFamily,
    eps: f64,
    horizon: u64,
    trials: u64,
    opts: &SearchOptions,
) -> Result<MOutcome> {
    if !fam.space.is_compact() || !fam.surjective {
        return Err(Error::Unsupported(
            "gap estimation requires a compact space and a surjective family".into(),
        ));
    }
    // Finer covers need denser per-ball sampling to certify every hit cell.
    let samples_per_ball = (48.0f64).max((24.0 / eps).ceil()) as usize;
    let mixing = check_mixing(
        fam,
        &MixingParams {
            eps: eps / 2.0,
            horizon,
            samples_per_ball,
            seed: opts.seed,
        },
    )?;
    if mixing.verdict != Verdict::Witnessed {
        return Ok(MOutcome::Exhausted {
            reason: "mixing not witnessed at eps/2".into(),
            mixing: Some(mixing),
        });
    }
    let m = match &mixing.evidence {
        Evidence::MixingThreshold { n0, .. } => *n0,
        _ => {
            return Err(Error::Unsupported(
                "mixing verdict without threshold".into(),
            ))
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xd1b5_4a32_d192_ed03);
    let mut validations = 0u64;
    for _ in 0..trials {
        let x1 = random_point(&fam.space, &mut rng);
        let x2 = random_point(&fam.space, &mut rng);
        let n = rng.gen_range(m..=m + 20);
        let sub = SearchOptions {
            seed: rng.gen(),
            ..*opts
        };
        if find_qsp_witness(fam, &x1, &x2, n, eps, &sub)?.is_found() {
            validations += 1;
        } else {
            return Ok(MOutcome::Exhausted {
                reason: format!(
                    "validation failed at trial {validations} (n = {n}); M = {m} not confirmed"
                ),
                mixing: Some(mixing),
            });
        }
    }
    Ok(MOutcome::Estimated {
        estimate: MEstimate {
            m,
            trials,
            validations,
            mixing,
        },
    })
}

/// Gap arithmetic of the periodic collapse: a gap bound `M` for the base
/// family turns into `floor(M/k) + 1` for the collapsed system.
pub fn collapse_m1(m_eps: u64, k: u64) -> u64 {
    m_eps / k + 1
}

/// Inflates a spec for the collapsed system `g = f_k o ... o f_1` to the
/// base-family spec the collapse argument uses: segments `(k*a_i, k*b_i)`,
/// gap `k*M1`, period `k*p`.
pub fn collapse_spec(g_spec: &SegmentSpec, k: u64) -> Result<SegmentSpec> {
    if k == 0 {
        return Err(Error::InvalidParameter("collapse needs k >= 1".into()));
    }
    SegmentSpec::new(
        g_spec
            .segments
            .iter()
            .map(|&(a, b)| (k * a, k * b))
            .collect(),
        k * g_spec.gap,
        g_spec.targets.clone(),
        g_spec.eps,
        g_spec.period.map(|p| k * p),
    )
}

/// Checks a collapsed-system certificate against the base family at the
/// multiples of `k`: `d(f_1^(k j)(z), f_1^(k j)(x_i)) < eps` for `j` in the
/// collapsed segments, and the periodic return at period `k*p`.
pub fn verify_collapsed_certificate(
    fam: &MapFamily,
    k: u64,
    g_spec: &SegmentSpec,
    cert: &TracingCertificate,
    multiples: u64,
) -> Result<bool> {
    if !fam.period().is_some_and(|fp| k.is_multiple_of(fp)) {
        return Err(Error::Unsupported(
            "collapse verification needs a periodic family".into(),
        ));
    }
    let space = &fam.space;
    let horizon = k * g_spec.last_time();
    let mut target_orbits = Vec::new();
    for t in &g_spec.targets {
        target_orbits.push(crate::systems::orbit(fam, t, horizon)?);
    }
    let z_orbit = crate::systems::orbit(fam, &cert.witness, horizon)?;
    for (i, &(a, b)) in g_spec.segments.iter().enumerate() {
        for j in a..=b {
            let idx = (k * j) as usize;
            if distance(space, &z_orbit[idx], &target_orbits[i][idx])? >= g_spec.eps {
                return Ok(false);
            }
        }
    }
    if let Some(p) = g_spec.period {
        let exact = space_is_exact(space);
        let base_p = k * p;
        let mut cur = cert.witness.clone();
        for m in 1..=multiples.max(1) {
            for t in ((m - 1) * base_p)..(m * base_p) {
                cur = fam.map_at(t + 1).apply(space, &cur)?;
            }
            let d = distance(space, &cur, &cert.witness)?;
            if (exact && d != 0.0) || (!exact && d > PERIOD_TOL) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Restricts a base-family certificate for the inflated spec to a
/// certificate for the collapsed system by sampling at multiples of `k`.
pub fn project_certificate(
    fam: &MapFamily,
    k: u64,
    g_spec: &SegmentSpec,
    cert: &TracingCertificate,
) -> Result<(MapFamily, TracingCertificate)> {
    let g_fam = collapsed_family(fam)?;
    let eval = Evaluator::new(
        &g_fam,
        g_spec,
        cert.period_evidence
            .iter()
            .map(|c| c.multiple)
            .max()
            .unwrap_or(1),
    )?;
    let Some(mut g_cert) = eval.evaluate(&cert.witness)? else {
        return Err(Error::BadBaseCertificate {
            index: 0,
            reason: format!("witness does not trace the collapsed spec at multiples of {k}"),
        });
    };
    g_cert.budget_used = cert.budget_used;
    Ok((g_fam, g_cert))
}

/// Combines factor witnesses into a product witness `(z_x, z_y)` with
/// period `lcm(p1, p2)` in the SSP case. Both specs must share segment
/// structure, gap and eps; the product certificate is re-verified from
/// scratch on the product family.
pub fn product_witness(
    fam_x: &MapFamily,
    fam_y: &MapFamily,
    spec_x: &SegmentSpec,
    spec_y: &SegmentSpec,
    cert_x: &TracingCertificate,
    cert_y: &TracingCertificate,
    multiples: u64,
) -> Result<(MapFamily, SegmentSpec, TracingCertificate)> {
    if spec_x.segments != spec_y.segments || spec_x.gap != spec_y.gap {
        return Err(Error::MismatchedSegments(
            "product witnesses need identical segment structure".into(),
        ));
    }
    if spec_x.eps != spec_y.eps {
        return Err(Error::MismatchedSegments(
            "product witnesses need a common eps".into(),
        ));
    }
    if !verify_certificate(fam_x, spec_x, cert_x)? {
        return Err(Error::BadBaseCertificate {
            index: 0,
            reason: "left certificate fails".into(),
        });
    }
    if !verify_certificate(fam_y, spec_y, cert_y)? {
        return Err(Error::BadBaseCertificate {
            index: 1,
            reason: "right certificate fails".into(),
        });
    }
    let period = match (spec_x.period, spec_y.period) {
        (Some(p1), Some(p2)) => Some(p1.lcm(&p2)),
        (None, None) => None,
        _ => {
            return Err(Error::MismatchedSegments(
                "either both or neither factor spec may carry a period".into(),
            ))
        }
    };
    let fam = crate::systems::product_family(fam_x, fam_y);
    let targets = spec_x
        .targets
        .iter()
        .zip(&spec_y.targets)
        .map(|(a, b)| SpacePoint::product(a.clone(), b.clone()))
        .collect();
    let spec = SegmentSpec::new(
        spec_x.segments.clone(),
        spec_x.gap,
        targets,
        spec_x.eps,
        period,
    )?;
    let eval = Evaluator::new(&fam, &spec, multiples)?;
    let z = SpacePoint::product(cert_x.witness.clone(), cert_y.witness.clone());
    let Some(mut cert) = eval.evaluate(&z)? else {
        return Err(Error::BadBaseCertificate {
            index: 0,
            reason: "product of witnesses fails verification".into(),
        });
    };
    cert.budget_used = cert_x.budget_used + cert_y.budget_used;
    Ok((fam, spec, cert))
}

/// A uniform-continuity modulus `delta(eps)` for a map `h`, required to
/// transport witnesses through a (semi)conjugacy.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "modulus", rename_all = "snake_case")]
pub enum Modulus {
    Identity,
    Lipschitz { constant: f64 },
    Table { pairs: Vec<(f64, f64)> },
}

impl Modulus {
    pub fn delta_for(&self, eps: f64) -> Option<f64> {
        match self {
            Modulus::Identity => Some(eps),
            Modulus::Lipschitz { constant } if *constant > 0.0 => Some(eps / constant),
            Modulus::Lipschitz { .. } => None,
            Modulus::Table { pairs } => pairs
                .iter()
                .filter(|(e, _)| *e <= eps)
                .map(|(_, d)| *d)
                .fold(None, |acc: Option<f64>, d| {
                    Some(acc.map_or(d, |a| a.max(d)))
                }),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransportMap {
    pub h: MapSpec,
    pub modulus: Modulus,
}

/// Transports a certificate through `h`: targets map to `h(x_i)`, the
/// witness to `h(z)`, and the result is verified on the conjugated family at
/// `target_eps`. Requires the source spec to have been built at
/// `eps <= delta(target_eps)`.
pub fn transport_witness(
    fam_x: &MapFamily,
    fam_y: &MapFamily,
    map: &TransportMap,
    spec_x: &SegmentSpec,
    cert_x: &TracingCertificate,
    target_eps: f64,
    multiples: u64,
) -> Result<(SegmentSpec, TracingCertificate)> {
    let delta = map
        .modulus
        .delta_for(target_eps)
        .ok_or(Error::InvalidModulus { eps: target_eps })?;
    if spec_x.eps > delta * (1.0 + 1e-12) {
        return Err(Error::InvalidModulus { eps: target_eps });
    }
    if !verify_certificate(fam_x, spec_x, cert_x)? {
        return Err(Error::BadBaseCertificate {
            index: 0,
            reason: "source certificate fails".into(),
        });
    }
    let targets: Vec<SpacePoint> = spec_x
        .targets
        .iter()
        .map(|t| map.h.apply(&fam_x.space, t))
        .collect::<Result<_>>()?;
    let spec_y = SegmentSpec::new(
        spec_x.segments.clone(),
        spec_x.gap,
        targets,
        target_eps,
        spec_x.period,
    )?;
    let hz = map.h.apply(&fam_x.space, &cert_x.witness)?;
    let eval = Evaluator::new(fam_y, &spec_y, multiples)?;
    let Some(mut cert) = eval.evaluate(&hz)? else {
        return Err(Error::InvalidModulus { eps: target_eps });
    };
    cert.budget_used = cert_x.budget_used;
    Ok((spec_y, cert))
}
