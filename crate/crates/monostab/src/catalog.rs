//! Built-in default configurations, one per experiment. `--print-config`
//! emits these as JSON; a user config replaces them wholesale.

use crate::config::*;
use monostab_core::grid2d::BuilderTag;
use monostab_core::Reaction;

/// `4π²`; reactions at this mass have half-line decay length `1/(2π)`.
pub const HUMP_MASS: f64 = 39.478_417_604_357_43;
pub const HUMP_THETA: f64 = 0.35;
pub const HUMP_EPS: f64 = 1e-2;

/// Interval length carried by the marginally stable cross-section, from the
/// interpolation experiment.
pub const MARGINAL_LENGTH: f64 = 0.902_385;
/// Interpolation weight at which the length map first loses injectivity.
pub const MARGINAL_TAU: f64 = 0.548_937_65;
/// Wall slope of the marginal interval profile.
pub const MARGINAL_ALPHA: f64 = 2.3003;

/// The two-hump reaction tuned for nonuniqueness on unit-scale intervals.
pub fn tuned_hump() -> Reaction {
    Reaction::DoubleHump {
        m: HUMP_MASS,
        theta: HUMP_THETA,
        eps: HUMP_EPS,
    }
}

fn marginal_endpoints() -> (Reaction, Reaction) {
    (Reaction::Logistic { m: HUMP_MASS }, tuned_hump())
}

fn regular_polygon(k: usize, radius: f64) -> Vec<(f64, f64)> {
    (0..k)
        .map(|i| {
            let a = core::f64::consts::TAU * i as f64 / k as f64;
            (radius * a.cos(), radius * a.sin())
        })
        .collect()
}

fn star_polygon(k: usize, outer: f64, inner: f64) -> Vec<(f64, f64)> {
    (0..2 * k)
        .map(|i| {
            let a = core::f64::consts::TAU * i as f64 / (2 * k) as f64;
            let r = if i % 2 == 0 { outer } else { inner };
            (r * a.cos(), r * a.sin())
        })
        .collect()
}

/// Two triangles joined by a waist of half-height 0.05: star-shaped about
/// the origin but with a kernel too thin to hold a disk.
fn hourglass() -> Vec<(f64, f64)> {
    vec![
        (-1.0, -1.0),
        (1.0, -1.0),
        (0.05, 0.0),
        (1.0, 1.0),
        (-1.0, 1.0),
        (-0.05, 0.0),
    ]
}

/// L-shape positioned so the origin sits in its kernel.
fn ell() -> Vec<(f64, f64)> {
    vec![
        (-1.0, -1.0),
        (1.0, -1.0),
        (1.0, 0.2),
        (0.2, 0.2),
        (0.2, 1.0),
        (-1.0, 1.0),
    ]
}

pub fn default_config(kind: ExperimentKind) -> ExperimentConfig {
    match kind {
        ExperimentKind::LengthCurve => ExperimentConfig::LengthCurve(LengthCurveCfg {
            reaction: Reaction::Logistic { m: 1.0 },
            points: 64,
            small_slope_check: true,
        }),
        ExperimentKind::Dilate1D => ExperimentConfig::Dilate1D(Dilate1dCfg {
            reaction: tuned_hump(),
            kappas: vec![1.0, 2.0, 4.0, 8.0],
            h: 1.0 / 128.0,
            kappa_merge: 2.0,
        }),
        ExperimentKind::Dilate2D => ExperimentConfig::Dilate2D(Dilate2dCfg {
            reaction: tuned_hump(),
            base: BuilderTag::Rectangle {
                width: 1.8,
                height: 1.8,
            },
            kappas: vec![1.0, 2.0, 3.0],
            h: 1.0 / 32.0,
        }),
        ExperimentKind::Pocket => ExperimentConfig::Pocket(PocketCfg {
            reaction: tuned_hump(),
            base: 3.0,
            pocket: 1.8,
            bridge_half_length: 0.25,
            deltas: vec![0.2, 0.1, 0.05],
            h: 1.0 / 48.0,
        }),
        ExperimentKind::Marginal => {
            let (f0, f1) = marginal_endpoints();
            ExperimentConfig::Marginal(MarginalCfg {
                f0,
                f1,
                points: 120,
                tau_resolution: 1e-5,
                side_offset: 0.05,
            })
        }
        ExperimentKind::StripOrbit => ExperimentConfig::StripOrbit(StripOrbitCfg {
            reaction: Reaction::Cubic { m: 1.0, c: 2.0 },
            epsilons: vec![1e-3, 2e-3, 5e-3, 1e-2],
            n_sigma: 64,
            ny: 96,
        }),
        ExperimentKind::WellsLambda => {
            let (f0, f1) = marginal_endpoints();
            ExperimentConfig::WellsLambda(WellsCfg {
                f0,
                f1,
                tau0: MARGINAL_TAU,
                alpha0: MARGINAL_ALPHA,
                well_length: MARGINAL_LENGTH,
                nodes_across: 29,
                base_cells: [134, 67],
                depth_factors: vec![2.0, 4.0, 8.0, 16.0],
            })
        }
        ExperimentKind::ExteriorRadial => ExperimentConfig::ExteriorRadial(ExteriorCfg {
            reaction: Reaction::Logistic { m: 1.0 },
            r0: 1.0,
            r1: 7.0,
            r_max: 22.0,
            h: 1.0 / 32.0,
            ray_tol: 0.02,
        }),
        ExperimentKind::LiebSuite => ExperimentConfig::LiebSuite(LiebCfg {
            h: 1.0 / 32.0,
            instances: vec![
                LiebInstance {
                    shape: BuilderTag::Rectangle {
                        width: 1.3,
                        height: 0.9,
                    },
                    potential: PotentialSpec::Zero,
                    r_ball: 0.25,
                },
                LiebInstance {
                    shape: BuilderTag::Disk { radius: 0.9 },
                    potential: PotentialSpec::Sines { amplitude: 4.0 },
                    r_ball: 0.25,
                },
                LiebInstance {
                    shape: BuilderTag::Strip {
                        length: 2.0,
                        half_width: 0.4,
                    },
                    potential: PotentialSpec::Linearized {
                        reaction: Reaction::Logistic { m: 4.0 },
                    },
                    r_ball: 0.25,
                },
                LiebInstance {
                    shape: BuilderTag::Pocket {
                        base: 1.5,
                        bridge_half_length: 0.15,
                        bridge_half_width: 0.1,
                        pocket: 0.8,
                    },
                    potential: PotentialSpec::Zero,
                    r_ball: 0.2,
                },
                LiebInstance {
                    shape: BuilderTag::Wedge {
                        slope: 0.7,
                        truncation: 1.1,
                    },
                    potential: PotentialSpec::Sines { amplitude: -3.0 },
                    r_ball: 0.25,
                },
            ],
            random_masks: 20,
            n_centers: 12,
            seed: 42,
        }),
        ExperimentKind::StarGeom => ExperimentConfig::StarGeom(StarGeomCfg {
            grid: 64,
            kappas: vec![1.5, 2.0, 3.0],
            polygons: vec![
                PolygonSpec {
                    name: "hourglass".into(),
                    vertices: hourglass(),
                    expect_strongly_star: false,
                    apothem: None,
                },
                PolygonSpec {
                    name: "hexagon".into(),
                    vertices: regular_polygon(6, 1.0),
                    expect_strongly_star: true,
                    apothem: Some(3f64.sqrt() / 2.0),
                },
                PolygonSpec {
                    name: "square".into(),
                    vertices: vec![(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)],
                    expect_strongly_star: true,
                    apothem: None,
                },
                PolygonSpec {
                    name: "ell".into(),
                    vertices: ell(),
                    expect_strongly_star: true,
                    apothem: None,
                },
                PolygonSpec {
                    name: "star5".into(),
                    vertices: star_polygon(5, 1.0, 0.5),
                    expect_strongly_star: true,
                    apothem: None,
                },
            ],
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_defaults_validate() {
        for k in ExperimentKind::ALL {
            default_config(k).validate().unwrap();
        }
    }

    #[test]
    fn catalog_polygons_are_simple_ccw() {
        let cfg = match default_config(ExperimentKind::StarGeom) {
            ExperimentConfig::StarGeom(c) => c,
            _ => unreachable!(),
        };
        for p in &cfg.polygons {
            monostab_core::stargeom::Polygon::new(p.vertices.clone())
                .unwrap_or_else(|e| panic!("{}: {e}", p.name));
        }
    }

    #[test]
    fn tuned_hump_is_weak_kpp_but_not_strong() {
        let k = tuned_hump().classify().unwrap();
        assert_eq!(k.is_positive, Some(true));
        assert_eq!(k.is_weak_kpp, Some(true));
        assert_eq!(k.is_strong_kpp, Some(false));
    }
}
