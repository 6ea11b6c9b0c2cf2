//! Named, parameter-fixed instances of every system the test suites and the
//! CLI exercise, each with a machine-checkable expected-verdict table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{check_mixing_measures, MeasureMixingParams};
use crate::properties::{
    check_devaney, check_mixing, check_periodic_dense, check_sensitive, check_transitive,
    DevaneyParams, MixingParams, PeriodicDenseParams, PropertyVerdict, SensitivityParams,
    TransitivityParams, Verdict,
};
use crate::spaces::{OpenBallSet, SpaceDescriptor, SpacePoint, SymbolicPoint};
use crate::systems::{Generator, MapFamily, MapSpec};

/// One property check with pinned parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum CheckSpec {
    Transitive(TransitivityParams),
    Mixing(MixingParams),
    Sensitive(SensitivityParams),
    PeriodicDense(PeriodicDenseParams),
    Devaney(DevaneyParams),
    MeasureMixing {
        u: OpenBallSet,
        v: OpenBallSet,
        params: MeasureMixingParams,
    },
}

impl CheckSpec {
    /// Same check with every nested seed replaced, for reproducible reruns.
    pub fn with_seed(&self, seed: u64) -> CheckSpec {
        let mut out = self.clone();
        match &mut out {
            CheckSpec::Transitive(p) => p.seed = seed,
            CheckSpec::Mixing(p) => p.seed = seed,
            CheckSpec::Sensitive(p) => p.seed = seed,
            CheckSpec::PeriodicDense(p) => p.seed = seed,
            CheckSpec::Devaney(p) => {
                p.transitivity.seed = seed;
                p.sensitivity.seed = seed;
                p.periodic.seed = seed;
            }
            CheckSpec::MeasureMixing { params, .. } => params.seed = seed,
        }
        out
    }

    pub fn name(&self) -> &'static str {
        match self {
            CheckSpec::Transitive(_) => "transitive",
            CheckSpec::Mixing(_) => "mixing",
            CheckSpec::Sensitive(_) => "sensitive",
            CheckSpec::PeriodicDense(_) => "periodic-dense",
            CheckSpec::Devaney(_) => "devaney",
            CheckSpec::MeasureMixing { .. } => "measure-mixing",
        }
    }
}

/// Dispatches a check against a family.
pub fn run_check(fam: &MapFamily, check: &CheckSpec) -> Result<PropertyVerdict> {
    match check {
        CheckSpec::Transitive(p) => check_transitive(fam, p),
        CheckSpec::Mixing(p) => check_mixing(fam, p),
        CheckSpec::Sensitive(p) => check_sensitive(fam, p),
        CheckSpec::PeriodicDense(p) => check_periodic_dense(fam, p),
        CheckSpec::Devaney(p) => check_devaney(fam, p),
        CheckSpec::MeasureMixing { u, v, params } => check_mixing_measures(fam, u, v, params),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Expectation {
    pub check: CheckSpec,
    pub expected: Verdict,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub summary: &'static str,
    pub family: MapFamily,
    pub expectations: Vec<Expectation>,
}

fn zeros_ball(radius: f64) -> OpenBallSet {
    OpenBallSet::single(SpacePoint::symbolic(SymbolicPoint::all_zeros()), radius).unwrap()
}

fn ones_ball(radius: f64) -> OpenBallSet {
    OpenBallSet::single(SpacePoint::symbolic(SymbolicPoint::all_ones()), radius).unwrap()
}

pub fn list() -> Vec<&'static str> {
    vec![
        "full-shift",
        "shift-zigzag",
        "shift-3periodic",
        "alternating-inverse",
        "alternating-rotation",
        "circle-stretch",
        "collapsing-constants",
        "logistic-2periodic",
        "identity-interval",
    ]
}

pub fn get(id: &str) -> Result<CatalogEntry> {
    let w = |v| Expectation {
        check: v,
        expected: Verdict::Witnessed,
    };
    let r = |v| Expectation {
        check: v,
        expected: Verdict::RefutedAtResolution,
    };
    match id {
        "full-shift" => Ok(CatalogEntry {
            id: "full-shift",
            summary: "autonomous two-sided shift on binary sequences",
            family: MapFamily::autonomous(
                SpaceDescriptor::Symbolic,
                MapSpec::ShiftPower { exponent: 1 },
            )?,
            expectations: vec![
                w(CheckSpec::Mixing(MixingParams {
                    eps: 0.5,
                    horizon: 30,
                    samples_per_ball: 8,
                    seed: 0,
                })),
                w(CheckSpec::Transitive(TransitivityParams {
                    eps: 0.5,
                    horizon: 20,
                    samples_per_ball: 8,
                    seed: 0,
                })),
                w(CheckSpec::PeriodicDense(PeriodicDenseParams {
                    eps: 0.25,
                    period_bound: 12,
                    multiples: 3,
                    tol: 0.0,
                    samples_per_ball: 4,
                    seed: 0,
                })),
                w(CheckSpec::MeasureMixing {
                    u: zeros_ball(0.5),
                    v: ones_ball(0.5),
                    params: MeasureMixingParams {
                        threshold: 0.8,
                        atom_count: 10,
                        horizon: 40,
                        samples_per_ball: 12,
                        seed: 0,
                    },
                }),
            ],
        }),
        "shift-zigzag" => Ok(CatalogEntry {
            id: "shift-zigzag",
            summary: "alternating shift powers sigma, sigma^-1, sigma^2, sigma^-2, ...",
            family: MapFamily {
                space: SpaceDescriptor::Symbolic,
                generator: Generator::ZigzagShift,
                surjective: true,
            },
            expectations: vec![
                w(CheckSpec::Devaney(DevaneyParams {
                    transitivity: TransitivityParams {
                        eps: 0.5,
                        horizon: 20,
                        samples_per_ball: 8,
                        seed: 0,
                    },
                    sensitivity: SensitivityParams {
                        delta: 0.5,
                        eps_perturb: 0.5,
                        horizon: 24,
                        samples_per_ball: 8,
                        seed: 0,
                    },
                    periodic: PeriodicDenseParams {
                        eps: 0.5,
                        period_bound: 4,
                        multiples: 3,
                        tol: 0.0,
                        samples_per_ball: 4,
                        seed: 0,
                    },
                })),
                r(CheckSpec::Mixing(MixingParams {
                    eps: 0.5,
                    horizon: 40,
                    samples_per_ball: 8,
                    seed: 0,
                })),
                r(CheckSpec::MeasureMixing {
                    u: zeros_ball(0.5),
                    v: ones_ball(0.5),
                    params: MeasureMixingParams {
                        threshold: 0.8,
                        atom_count: 10,
                        horizon: 40,
                        samples_per_ball: 12,
                        seed: 0,
                    },
                }),
            ],
        }),
        "shift-3periodic" => Ok(CatalogEntry {
            id: "shift-3periodic",
            summary: "3-periodic family sigma, sigma^-2, sigma^2 collapsing to sigma",
            family: MapFamily::periodic(
                SpaceDescriptor::Symbolic,
                vec![
                    MapSpec::ShiftPower { exponent: 1 },
                    MapSpec::ShiftPower { exponent: -2 },
                    MapSpec::ShiftPower { exponent: 2 },
                ],
            )?,
            expectations: vec![
                w(CheckSpec::Mixing(MixingParams {
                    eps: 0.5,
                    horizon: 70,
                    samples_per_ball: 8,
                    seed: 0,
                })),
                w(CheckSpec::Transitive(TransitivityParams {
                    eps: 0.5,
                    horizon: 30,
                    samples_per_ball: 8,
                    seed: 0,
                })),
            ],
        }),
        "alternating-inverse" => Ok(CatalogEntry {
            id: "alternating-inverse",
            summary: "f, f^-1, f, f^-1, ... with f the shift: every point 2-periodic",
            family: MapFamily::periodic(
                SpaceDescriptor::Symbolic,
                vec![
                    MapSpec::ShiftPower { exponent: 1 },
                    MapSpec::ShiftPower { exponent: -1 },
                ],
            )?,
            expectations: vec![
                w(CheckSpec::PeriodicDense(PeriodicDenseParams {
                    eps: 0.5,
                    period_bound: 4,
                    multiples: 3,
                    tol: 0.0,
                    samples_per_ball: 4,
                    seed: 0,
                })),
                r(CheckSpec::Transitive(TransitivityParams {
                    eps: 0.5,
                    horizon: 20,
                    samples_per_ball: 8,
                    seed: 0,
                })),
            ],
        }),
        "alternating-rotation" => Ok(CatalogEntry {
            id: "alternating-rotation",
            summary: "f, f^-1, f, f^-1, ... with f a circle rotation: every point 2-periodic",
            family: MapFamily::periodic(
                SpaceDescriptor::Circle,
                vec![
                    MapSpec::CircleRotate { angle: 2.0 },
                    MapSpec::CircleRotate { angle: -2.0 },
                ],
            )?,
            expectations: vec![
                w(CheckSpec::PeriodicDense(PeriodicDenseParams {
                    eps: 0.5,
                    period_bound: 2,
                    multiples: 3,
                    tol: 1e-9,
                    samples_per_ball: 4,
                    seed: 0,
                })),
                r(CheckSpec::Transitive(TransitivityParams {
                    eps: std::f64::consts::FRAC_PI_4,
                    horizon: 30,
                    samples_per_ball: 16,
                    seed: 0,
                })),
            ],
        }),
        "circle-stretch" => Ok(CatalogEntry {
            id: "circle-stretch",
            summary:
                "angle multiplication by (n+1)/n; the n-step composition is multiplication by n+1",
            family: MapFamily {
                space: SpaceDescriptor::Circle,
                generator: Generator::CircleStretch,
                surjective: true,
            },
            expectations: vec![w(CheckSpec::Mixing(MixingParams {
                eps: std::f64::consts::FRAC_PI_4,
                horizon: 60,
                samples_per_ball: 128,
                seed: 0,
            }))],
        }),
        "collapsing-constants" => Ok(CatalogEntry {
            id: "collapsing-constants",
            summary:
                "f_n = constant 2^-n on the line: traces specs with one point yet is not transitive",
            family: MapFamily {
                space: SpaceDescriptor::real_line_window(),
                generator: Generator::CollapsingConstants,
                surjective: false,
            },
            expectations: vec![r(CheckSpec::Transitive(TransitivityParams {
                eps: 1.0,
                horizon: 20,
                samples_per_ball: 8,
                seed: 0,
            }))],
        }),
        "logistic-2periodic" => Ok(CatalogEntry {
            id: "logistic-2periodic",
            summary: "2-periodic pair (logistic a=4, identity) on the unit interval",
            family: MapFamily::periodic(
                SpaceDescriptor::unit_interval(),
                vec![MapSpec::Logistic { a: 4.0 }, MapSpec::Identity],
            )?,
            expectations: vec![
                w(CheckSpec::Mixing(MixingParams {
                    eps: 0.2,
                    horizon: 60,
                    samples_per_ball: 64,
                    seed: 0,
                })),
                w(CheckSpec::Devaney(DevaneyParams {
                    transitivity: TransitivityParams {
                        eps: 0.2,
                        horizon: 40,
                        samples_per_ball: 64,
                        seed: 0,
                    },
                    sensitivity: SensitivityParams {
                        delta: 0.25,
                        eps_perturb: 0.1,
                        horizon: 40,
                        samples_per_ball: 16,
                        seed: 0,
                    },
                    periodic: PeriodicDenseParams {
                        eps: 0.2,
                        period_bound: 16,
                        multiples: 2,
                        tol: 1e-5,
                        samples_per_ball: 8,
                        seed: 0,
                    },
                })),
            ],
        }),
        "identity-interval" => Ok(CatalogEntry {
            id: "identity-interval",
            summary: "the identity family on the unit interval: nothing moves",
            family: MapFamily::autonomous(SpaceDescriptor::unit_interval(), MapSpec::Identity)?,
            expectations: vec![
                r(CheckSpec::Transitive(TransitivityParams {
                    eps: 0.25,
                    horizon: 10,
                    samples_per_ball: 8,
                    seed: 0,
                })),
                r(CheckSpec::Mixing(MixingParams {
                    eps: 0.25,
                    horizon: 10,
                    samples_per_ball: 8,
                    seed: 0,
                })),
                r(CheckSpec::Sensitive(SensitivityParams {
                    delta: 0.1,
                    eps_perturb: 0.1,
                    horizon: 10,
                    samples_per_ball: 8,
                    seed: 0,
                })),
            ],
        }),
        other => Err(Error::UnknownSystem(other.to_string())),
    }
}
