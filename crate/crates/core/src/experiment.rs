//! Batch experiment runner: resolve a system, run one experiment described
//! by a config, and emit a machine-readable report whose certificates can be
//! re-verified without re-running any search.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::catalog::{self, run_check, CheckSpec};
use crate::error::{Error, Result};
use crate::hyperspace::{
    lift_witness_hyperspace, project_witness_from_hyperspace, verify_hyper_certificate,
    HyperCertificate, HyperSpec,
};
use crate::measures::{
    check_mixing_measures, lift_witness_measures, verify_measure_certificate, MeasureCertificate,
    MeasureMixingParams, MeasureSpec,
};
use crate::properties::{verify_verdict, PropertyVerdict, Verdict};
use crate::spaces::{OpenBallSet, SpaceDescriptor, SpacePoint};
use crate::specification::{
    collapse_spec, estimate_m_qsp, find_witness, product_witness, verify_certificate,
    verify_collapsed_certificate, MOutcome, SearchOptions, SearchResult, SegmentSpec,
    TracingCertificate,
};
use crate::systems::{
    check_semiconjugacy, collapsed_family, conjugate_family, ConjugacyRecord, MapFamily, MapSpec,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum SystemRef {
    Catalog { id: String },
    Inline { family: MapFamily },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentKind {
    PropertyCheck {
        check: CheckSpec,
    },
    Qsp {
        x1: SpacePoint,
        x2: SpacePoint,
        n: u64,
        eps: f64,
    },
    Wsp {
        spec: SegmentSpec,
    },
    Ssp {
        spec: SegmentSpec,
        #[serde(default = "default_multiples")]
        multiples: u64,
    },
    EstimateM {
        eps: f64,
        horizon: u64,
        trials: u64,
    },
    /// Search a witness for the collapsed autonomous system and verify it
    /// against the base family at the multiples of its period.
    Collapse {
        g_spec: SegmentSpec,
        #[serde(default = "default_multiples")]
        multiples: u64,
    },
    Product {
        other: SystemRef,
        spec_x: SegmentSpec,
        spec_y: SegmentSpec,
        #[serde(default = "default_multiples")]
        multiples: u64,
    },
    Conjugate {
        h: MapSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        h_inv: Option<MapSpec>,
        target_space: SpaceDescriptor,
        /// Required when `h_inv` is absent (semiconjugacy check).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target: Option<MapFamily>,
        samples: usize,
        tol: f64,
    },
    HyperspaceLift {
        spec: HyperSpec,
        #[serde(default = "default_multiples")]
        multiples: u64,
    },
    MeasureLift {
        spec: MeasureSpec,
        #[serde(default = "default_multiples")]
        multiples: u64,
    },
    MeasureMixing {
        u: OpenBallSet,
        v: OpenBallSet,
        params: MeasureMixingParams,
    },
}

fn default_multiples() -> u64 {
    3
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub system: SystemRef,
    pub experiment: ExperimentKind,
    /// Mandatory seed: identical configs reproduce byte-identical reports
    /// (modulo timing).
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReproResult {
    pub check: CheckSpec,
    pub expected: Verdict,
    pub actual: PropertyVerdict,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum Outcome {
    Verdict {
        verdict: PropertyVerdict,
    },
    Witness {
        spec: SegmentSpec,
        search: SearchResult,
    },
    Estimate {
        outcome: MOutcome,
    },
    Collapse {
        collapsed_map: MapSpec,
        period: u64,
        g_spec: SegmentSpec,
        inflated_spec: SegmentSpec,
        search: SearchResult,
        verified_at_multiples: Option<bool>,
    },
    Product {
        search_x: SearchResult,
        search_y: SearchResult,
        #[serde(skip_serializing_if = "Option::is_none")]
        product_spec: Option<SegmentSpec>,
        #[serde(skip_serializing_if = "Option::is_none")]
        certificate: Option<TracingCertificate>,
    },
    Conjugacy {
        record: ConjugacyRecord,
        tol: f64,
    },
    HyperLift {
        element_searches: Vec<SearchResult>,
        #[serde(skip_serializing_if = "Option::is_none")]
        certificate: Option<HyperCertificate>,
        #[serde(skip_serializing_if = "Option::is_none")]
        projected: Option<TracingCertificate>,
    },
    MeasureLift {
        atom_searches: Vec<SearchResult>,
        #[serde(skip_serializing_if = "Option::is_none")]
        certificate: Option<MeasureCertificate>,
    },
    Repro {
        id: String,
        results: Vec<ReproResult>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Timing {
    pub wall_ms: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub config: ExperimentConfig,
    pub outcome: Outcome,
    /// 0 witnessed/ok, 2 refuted-at-resolution, 3 inconclusive/not-found.
    pub exit_code: i32,
    pub budget_used: u64,
    pub timing: Timing,
}

impl Report {
    /// Clears the timing fields; reports are byte-identical for identical
    /// configs after this.
    pub fn strip_timing(&mut self) {
        self.timing.wall_ms = 0;
    }
}

pub fn resolve_system(system: &SystemRef) -> Result<MapFamily> {
    match system {
        SystemRef::Catalog { id } => Ok(catalog::get(id)?.family),
        SystemRef::Inline { family } => Ok(family.clone()),
    }
}

fn exit_code_for(outcome: &Outcome) -> i32 {
    match outcome {
        Outcome::Verdict { verdict } => match verdict.verdict {
            Verdict::Witnessed => 0,
            Verdict::RefutedAtResolution => 2,
            Verdict::Inconclusive => 3,
        },
        Outcome::Witness { search, .. } => {
            if search.is_found() {
                0
            } else {
                3
            }
        }
        Outcome::Estimate { outcome } => match outcome {
            MOutcome::Estimated { .. } => 0,
            MOutcome::Exhausted { .. } => 3,
        },
        Outcome::Collapse {
            search,
            verified_at_multiples,
            ..
        } => match (search.is_found(), verified_at_multiples) {
            (true, Some(true)) => 0,
            (true, _) => 2,
            (false, _) => 3,
        },
        Outcome::Product { certificate, .. } => {
            if certificate.is_some() {
                0
            } else {
                3
            }
        }
        Outcome::Conjugacy { .. } => 0,
        Outcome::HyperLift { certificate, .. } => {
            if certificate.is_some() {
                0
            } else {
                3
            }
        }
        Outcome::MeasureLift { certificate, .. } => {
            if certificate.is_some() {
                0
            } else {
                3
            }
        }
        Outcome::Repro { results, .. } => {
            if results.iter().all(|r| r.pass) {
                0
            } else {
                1
            }
        }
    }
}

fn budget_used_for(outcome: &Outcome) -> u64 {
    let from_search = |s: &SearchResult| match s {
        SearchResult::Found { certificate } => certificate.budget_used,
        SearchResult::Exhausted { report } => report.candidates_tried,
    };
    match outcome {
        Outcome::Witness { search, .. } => from_search(search),
        Outcome::Collapse { search, .. } => from_search(search),
        Outcome::Product {
            search_x, search_y, ..
        } => from_search(search_x) + from_search(search_y),
        Outcome::HyperLift {
            element_searches, ..
        } => element_searches.iter().map(from_search).sum(),
        Outcome::MeasureLift { atom_searches, .. } => atom_searches.iter().map(from_search).sum(),
        _ => 0,
    }
}

/// Runs one experiment; every nested seed is overridden by the config seed.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    if config.schema != SCHEMA_VERSION {
        return Err(Error::Config {
            path: "schema".into(),
            message: format!(
                "unsupported schema {}, expected {SCHEMA_VERSION}",
                config.schema
            ),
        });
    }
    let start = Instant::now();
    let fam = resolve_system(&config.system)?;
    let opts = SearchOptions {
        multiples: 3,
        budget: config.budget.unwrap_or(4000),
        seed: config.seed,
    };
    let outcome = match &config.experiment {
        ExperimentKind::PropertyCheck { check } => {
            let verdict = run_check(&fam, &check.with_seed(config.seed))?;
            Outcome::Verdict { verdict }
        }
        ExperimentKind::Qsp { x1, x2, n, eps } => {
            let spec = SegmentSpec::qsp(x1.clone(), x2.clone(), *n, *eps)?;
            let search = find_witness(&fam, &spec, &opts)?;
            Outcome::Witness { spec, search }
        }
        ExperimentKind::Wsp { spec } => {
            if spec.period.is_some() {
                return Err(Error::Config {
                    path: "experiment.spec.period".into(),
                    message: "weak specification takes no period".into(),
                });
            }
            let search = find_witness(&fam, spec, &opts)?;
            Outcome::Witness {
                spec: spec.clone(),
                search,
            }
        }
        ExperimentKind::Ssp { spec, multiples } => {
            if spec.period.is_none() {
                return Err(Error::Config {
                    path: "experiment.spec.period".into(),
                    message: "strong specification requires a period".into(),
                });
            }
            let search = find_witness(
                &fam,
                spec,
                &SearchOptions {
                    multiples: *multiples,
                    ..opts
                },
            )?;
            Outcome::Witness {
                spec: spec.clone(),
                search,
            }
        }
        ExperimentKind::EstimateM {
            eps,
            horizon,
            trials,
        } => {
            let outcome = estimate_m_qsp(&fam, *eps, *horizon, *trials, &opts)?;
            Outcome::Estimate { outcome }
        }
        ExperimentKind::Collapse { g_spec, multiples } => {
            let k = fam.period().ok_or_else(|| {
                Error::Unsupported("collapse experiment needs a periodic family".into())
            })?;
            let g_fam = collapsed_family(&fam)?;
            let collapsed_map = crate::systems::periodic_collapse(&fam)?;
            let inflated_spec = collapse_spec(g_spec, k)?;
            let search = find_witness(
                &g_fam,
                g_spec,
                &SearchOptions {
                    multiples: *multiples,
                    ..opts
                },
            )?;
            let verified_at_multiples = match &search {
                SearchResult::Found { certificate } => Some(verify_collapsed_certificate(
                    &fam,
                    k,
                    g_spec,
                    certificate,
                    *multiples,
                )?),
                SearchResult::Exhausted { .. } => None,
            };
            Outcome::Collapse {
                collapsed_map,
                period: k,
                g_spec: g_spec.clone(),
                inflated_spec,
                search,
                verified_at_multiples,
            }
        }
        ExperimentKind::Product {
            other,
            spec_x,
            spec_y,
            multiples,
        } => {
            let fam_y = resolve_system(other)?;
            let search_x = find_witness(
                &fam,
                spec_x,
                &SearchOptions {
                    multiples: *multiples,
                    ..opts
                },
            )?;
            let search_y = find_witness(
                &fam_y,
                spec_y,
                &SearchOptions {
                    multiples: *multiples,
                    ..opts
                },
            )?;
            let (product_spec, certificate) = match (&search_x, &search_y) {
                (
                    SearchResult::Found { certificate: cx },
                    SearchResult::Found { certificate: cy },
                ) => {
                    let (_, ps, pc) =
                        product_witness(&fam, &fam_y, spec_x, spec_y, cx, cy, *multiples)?;
                    (Some(ps), Some(pc))
                }
                _ => (None, None),
            };
            Outcome::Product {
                search_x,
                search_y,
                product_spec,
                certificate,
            }
        }
        ExperimentKind::Conjugate {
            h,
            h_inv,
            target_space,
            target,
            samples,
            tol,
        } => {
            let record = match h_inv {
                Some(h_inv) => conjugate_family(
                    &fam,
                    h.clone(),
                    h_inv.clone(),
                    target_space.clone(),
                    *samples,
                    *tol,
                    config.seed,
                )?,
                None => {
                    let target = target.as_ref().ok_or_else(|| Error::Config {
                        path: "experiment.target".into(),
                        message: "semiconjugacy check needs the target family".into(),
                    })?;
                    check_semiconjugacy(&fam, target, h.clone(), *samples, *tol, config.seed)?
                }
            };
            Outcome::Conjugacy { record, tol: *tol }
        }
        ExperimentKind::HyperspaceLift { spec, multiples } => {
            let mut element_searches = Vec::new();
            let mut certs = Vec::new();
            let mut all_found = true;
            for i in 0..spec.element_count() {
                let es = spec.element_spec(i, spec.period)?;
                let search = find_witness(
                    &fam,
                    &es,
                    &SearchOptions {
                        multiples: *multiples,
                        ..opts
                    },
                )?;
                if let Some(c) = search.certificate() {
                    certs.push(c.clone());
                } else {
                    all_found = false;
                }
                element_searches.push(search);
            }
            let (certificate, projected) = if all_found {
                let cert = lift_witness_hyperspace(&fam, spec, &certs, *multiples)?;
                let projected = if spec.sets.iter().all(|s| s.len() == 1) {
                    Some(project_witness_from_hyperspace(&fam, spec, &cert)?)
                } else {
                    None
                };
                (Some(cert), projected)
            } else {
                (None, None)
            };
            Outcome::HyperLift {
                element_searches,
                certificate,
                projected,
            }
        }
        ExperimentKind::MeasureLift { spec, multiples } => {
            let mut atom_searches = Vec::new();
            let mut certs = Vec::new();
            let mut all_found = true;
            for l in 0..spec.atom_count() {
                let aspec = spec.atom_spec(l, spec.period)?;
                let search = find_witness(
                    &fam,
                    &aspec,
                    &SearchOptions {
                        multiples: *multiples,
                        ..opts
                    },
                )?;
                if let Some(c) = search.certificate() {
                    certs.push(c.clone());
                } else {
                    all_found = false;
                }
                atom_searches.push(search);
            }
            let certificate = if all_found {
                Some(lift_witness_measures(&fam, spec, &certs, *multiples)?)
            } else {
                None
            };
            Outcome::MeasureLift {
                atom_searches,
                certificate,
            }
        }
        ExperimentKind::MeasureMixing { u, v, params } => {
            let verdict = check_mixing_measures(
                &fam,
                u,
                v,
                &MeasureMixingParams {
                    seed: config.seed,
                    ..*params
                },
            )?;
            Outcome::Verdict { verdict }
        }
    };
    let exit_code = exit_code_for(&outcome);
    let budget_used = budget_used_for(&outcome);
    Ok(Report {
        schema: SCHEMA_VERSION,
        config: config.clone(),
        outcome,
        exit_code,
        budget_used,
        timing: Timing {
            wall_ms: start.elapsed().as_millis() as u64,
        },
    })
}

/// Runs a catalog entry's full expected-verdict table.
pub fn repro(id: &str, seed: u64) -> Result<Report> {
    let start = Instant::now();
    let entry = catalog::get(id)?;
    let mut results = Vec::new();
    for exp in &entry.expectations {
        let check = exp.check.with_seed(seed);
        let actual = run_check(&entry.family, &check)?;
        let pass = actual.verdict == exp.expected;
        results.push(ReproResult {
            check,
            expected: exp.expected,
            actual,
            pass,
        });
    }
    let outcome = Outcome::Repro {
        id: id.to_string(),
        results,
    };
    let exit_code = exit_code_for(&outcome);
    Ok(Report {
        schema: SCHEMA_VERSION,
        config: ExperimentConfig {
            schema: SCHEMA_VERSION,
            system: SystemRef::Catalog { id: id.to_string() },
            experiment: ExperimentKind::PropertyCheck {
                check: entry
                    .expectations
                    .first()
                    .map(|e| e.check.with_seed(seed))
                    .unwrap_or(CheckSpec::Transitive(
                        crate::properties::TransitivityParams {
                            eps: 0.5,
                            horizon: 1,
                            samples_per_ball: 1,
                            seed,
                        },
                    )),
            },
            seed,
            budget: None,
            threads: None,
        },
        outcome,
        exit_code,
        budget_used: 0,
        timing: Timing {
            wall_ms: start.elapsed().as_millis() as u64,
        },
    })
}

/// Re-checks every certificate and every piece of positive evidence in a
/// report by recomputation, with no searching.
pub fn verify_report(report: &Report) -> Result<bool> {
    let fam = resolve_system(&report.config.system)?;
    match &report.outcome {
        Outcome::Verdict { verdict } => verify_verdict(&fam, verdict),
        Outcome::Witness { spec, search } => match search {
            SearchResult::Found { certificate } => verify_certificate(&fam, spec, certificate),
            SearchResult::Exhausted { .. } => Ok(true),
        },
        Outcome::Estimate { outcome } => match outcome {
            MOutcome::Estimated { estimate } => verify_verdict(&fam, &estimate.mixing),
            MOutcome::Exhausted { mixing, .. } => match mixing {
                Some(v) => verify_verdict(&fam, v),
                None => Ok(true),
            },
        },
        Outcome::Collapse {
            g_spec,
            search,
            verified_at_multiples,
            period,
            ..
        } => match search {
            SearchResult::Found { certificate } => {
                let g_fam = collapsed_family(&fam)?;
                if !verify_certificate(&g_fam, g_spec, certificate)? {
                    return Ok(false);
                }
                let multiples = certificate
                    .period_evidence
                    .iter()
                    .map(|c| c.multiple)
                    .max()
                    .unwrap_or(1);
                let again =
                    verify_collapsed_certificate(&fam, *period, g_spec, certificate, multiples)?;
                Ok(Some(again) == *verified_at_multiples)
            }
            SearchResult::Exhausted { .. } => Ok(true),
        },
        Outcome::Product {
            certificate,
            product_spec,
            ..
        } => match (certificate, product_spec, &report.config.experiment) {
            (Some(cert), Some(pspec), ExperimentKind::Product { other, .. }) => {
                let fam_y = resolve_system(other)?;
                let pfam = crate::systems::product_family(&fam, &fam_y);
                verify_certificate(&pfam, pspec, cert)
            }
            (None, None, _) => Ok(true),
            _ => Ok(false),
        },
        Outcome::Conjugacy { record, tol } => Ok(record.max_commutation_error <= *tol),
        Outcome::HyperLift {
            certificate,
            projected,
            ..
        } => {
            let ExperimentKind::HyperspaceLift { spec, .. } = &report.config.experiment else {
                return Ok(false);
            };
            if let Some(cert) = certificate {
                if !verify_hyper_certificate(&fam, spec, cert)? {
                    return Ok(false);
                }
            }
            if let Some(base) = projected {
                let base_spec = SegmentSpec::new(
                    spec.segments.clone(),
                    spec.gap,
                    spec.sets.iter().map(|s| s[0].clone()).collect(),
                    spec.eps,
                    spec.period,
                )?;
                if !verify_certificate(&fam, &base_spec, base)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Outcome::MeasureLift { certificate, .. } => {
            let ExperimentKind::MeasureLift { spec, .. } = &report.config.experiment else {
                return Ok(false);
            };
            match certificate {
                Some(cert) => verify_measure_certificate(&fam, spec, cert),
                None => Ok(true),
            }
        }
        Outcome::Repro { results, .. } => {
            for r in results {
                if !verify_verdict(&fam, &r.actual)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}
