//! Experiment configuration schema. Configs are JSON documents of the form
//! `{"experiment": "<name>", "config": {...}}`; unknown fields are rejected
//! and every config is validated before any compute starts.

use crate::error::PipelineError;
use monostab_core::grid2d::BuilderTag;
use monostab_core::Reaction;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    LengthCurve,
    Dilate1D,
    Dilate2D,
    Pocket,
    Marginal,
    StripOrbit,
    WellsLambda,
    ExteriorRadial,
    LiebSuite,
    StarGeom,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 10] = [
        ExperimentKind::LengthCurve,
        ExperimentKind::Dilate1D,
        ExperimentKind::Dilate2D,
        ExperimentKind::Pocket,
        ExperimentKind::Marginal,
        ExperimentKind::StripOrbit,
        ExperimentKind::WellsLambda,
        ExperimentKind::ExteriorRadial,
        ExperimentKind::LiebSuite,
        ExperimentKind::StarGeom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::LengthCurve => "length-curve",
            ExperimentKind::Dilate1D => "dilate-1d",
            ExperimentKind::Dilate2D => "dilate-2d",
            ExperimentKind::Pocket => "pocket",
            ExperimentKind::Marginal => "marginal",
            ExperimentKind::StripOrbit => "strip-orbit",
            ExperimentKind::WellsLambda => "wells-lambda",
            ExperimentKind::ExteriorRadial => "exterior-radial",
            ExperimentKind::LiebSuite => "lieb-suite",
            ExperimentKind::StarGeom => "star-geom",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            ExperimentKind::LengthCurve => {
                "interval length map alpha -> L_alpha with quadrature/shooting cross-check"
            }
            ExperimentKind::Dilate1D => {
                "extremal states on dilated intervals versus the boundary-distance envelope"
            }
            ExperimentKind::Dilate2D => {
                "extremal states on dilated planar domains versus the envelope"
            }
            ExperimentKind::Pocket => {
                "nonuniqueness on a square with a pocket behind a narrow bridge"
            }
            ExperimentKind::Marginal => {
                "reaction interpolation pinning the marginally stable interval solution"
            }
            ExperimentKind::StripOrbit => {
                "periodic orbit of the spatial dynamics on an infinite strip"
            }
            ExperimentKind::WellsLambda => {
                "principal eigenvalue trend on a slab with one deepening well"
            }
            ExperimentKind::ExteriorRadial => {
                "increasing radial profiles outside a ball, checked against an annulus relaxation"
            }
            ExperimentKind::LiebSuite => {
                "ball-localization eigenvalue inequality on fixed and random masks"
            }
            ExperimentKind::StarGeom => {
                "star-center kernels and dilation separation for test polygons"
            }
        }
    }

    pub fn parse(name: &str) -> Option<ExperimentKind> {
        ExperimentKind::ALL.iter().copied().find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "experiment", content = "config")]
pub enum ExperimentConfig {
    #[serde(rename = "length-curve")]
    LengthCurve(LengthCurveCfg),
    #[serde(rename = "dilate-1d")]
    Dilate1D(Dilate1dCfg),
    #[serde(rename = "dilate-2d")]
    Dilate2D(Dilate2dCfg),
    #[serde(rename = "pocket")]
    Pocket(PocketCfg),
    #[serde(rename = "marginal")]
    Marginal(MarginalCfg),
    #[serde(rename = "strip-orbit")]
    StripOrbit(StripOrbitCfg),
    #[serde(rename = "wells-lambda")]
    WellsLambda(WellsCfg),
    #[serde(rename = "exterior-radial")]
    ExteriorRadial(ExteriorCfg),
    #[serde(rename = "lieb-suite")]
    LiebSuite(LiebCfg),
    #[serde(rename = "star-geom")]
    StarGeom(StarGeomCfg),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LengthCurveCfg {
    pub reaction: Reaction,
    /// Slope-grid size passed to the curve sampler.
    pub points: usize,
    /// Compare `L` at slope `1e-3` against the zero-slope limit
    /// `pi / sqrt(f'(0))`.
    pub small_slope_check: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dilate1dCfg {
    pub reaction: Reaction,
    /// Dilation factors applied to the unit interval, increasing.
    pub kappas: Vec<f64>,
    pub h: f64,
    /// Factor from which on the two extremal states must have merged.
    pub kappa_merge: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dilate2dCfg {
    pub reaction: Reaction,
    pub base: BuilderTag,
    pub kappas: Vec<f64>,
    pub h: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PocketCfg {
    pub reaction: Reaction,
    /// Side of the big room.
    pub base: f64,
    /// Side of the pocket room.
    pub pocket: f64,
    pub bridge_half_length: f64,
    /// Bridge half-widths, swept in the given (descending) order.
    pub deltas: Vec<f64>,
    pub h: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginalCfg {
    /// Interpolation endpoint with an injective length map.
    pub f0: Reaction,
    /// Endpoint with a non-injective length map.
    pub f1: Reaction,
    /// Slope-grid size per interpolation step.
    pub points: usize,
    /// Bisection stops when the bracket is this narrow.
    pub tau_resolution: f64,
    /// Offset for the one-sided scans around the critical interpolation.
    pub side_offset: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripOrbitCfg {
    pub reaction: Reaction,
    /// Pinned orbit amplitudes, increasing.
    pub epsilons: Vec<f64>,
    pub n_sigma: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WellsCfg {
    pub f0: Reaction,
    pub f1: Reaction,
    /// Starting interpolation weight, from the marginal experiment.
    pub tau0: f64,
    /// Starting shooting slope for the marginal interval solution.
    pub alpha0: f64,
    /// Interval length carried by the well cross-section.
    pub well_length: f64,
    /// Interior nodes across the well; the spacing is
    /// `well_length / (nodes_across + 1)`.
    pub nodes_across: usize,
    /// Slab size in grid cells, `[across, up]`; `across` must be even so the
    /// well walls land on lattice lines.
    pub base_cells: [usize; 2],
    /// Well depths as multiples of `well_length`, increasing.
    pub depth_factors: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExteriorCfg {
    pub reaction: Reaction,
    /// Radius of the excluded ball.
    pub r0: f64,
    /// Outer radius of the annulus surrogate.
    pub r1: f64,
    /// March horizon for the radial profiles.
    pub r_max: f64,
    pub h: f64,
    /// Allowed gap between the annulus relaxation and the radial profile
    /// along a ray.
    pub ray_tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    Zero,
    /// `amplitude * sin(pi x / w) * sin(pi y / h)` over the bounding box.
    Sines { amplitude: f64 },
    /// `-f'(Phi)` at the boundary-distance envelope of the mask.
    Linearized { reaction: Reaction },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiebInstance {
    pub shape: BuilderTag,
    pub potential: PotentialSpec,
    pub r_ball: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiebCfg {
    pub h: f64,
    pub instances: Vec<LiebInstance>,
    /// Extra seeded random rectangle masks checked on top of the fixed ones.
    pub random_masks: usize,
    pub n_centers: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonSpec {
    pub name: String,
    pub vertices: Vec<(f64, f64)>,
    pub expect_strongly_star: bool,
    /// Distance from the origin to the nearest edge; when set, the dilation
    /// separation must match `(kappa - 1) * apothem`.
    pub apothem: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarGeomCfg {
    /// Kernel sampling grid per axis.
    pub grid: usize,
    /// Dilation factors, strictly greater than 1, increasing.
    pub kappas: Vec<f64>,
    pub polygons: Vec<PolygonSpec>,
}

fn ensure(cond: bool, why: &str) -> Result<(), PipelineError> {
    if cond {
        Ok(())
    } else {
        Err(PipelineError::Config(why.to_string()))
    }
}

fn ensure_increasing(xs: &[f64], what: &str) -> Result<(), PipelineError> {
    ensure(
        xs.windows(2).all(|w| w[1] > w[0]),
        &format!("{what} must be strictly increasing"),
    )
}

impl ExperimentConfig {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            ExperimentConfig::LengthCurve(_) => ExperimentKind::LengthCurve,
            ExperimentConfig::Dilate1D(_) => ExperimentKind::Dilate1D,
            ExperimentConfig::Dilate2D(_) => ExperimentKind::Dilate2D,
            ExperimentConfig::Pocket(_) => ExperimentKind::Pocket,
            ExperimentConfig::Marginal(_) => ExperimentKind::Marginal,
            ExperimentConfig::StripOrbit(_) => ExperimentKind::StripOrbit,
            ExperimentConfig::WellsLambda(_) => ExperimentKind::WellsLambda,
            ExperimentConfig::ExteriorRadial(_) => ExperimentKind::ExteriorRadial,
            ExperimentConfig::LiebSuite(_) => ExperimentKind::LiebSuite,
            ExperimentConfig::StarGeom(_) => ExperimentKind::StarGeom,
        }
    }

    pub fn from_file(path: &Path) -> Result<ExperimentConfig, PipelineError> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Reseed the randomized parts, if any. Deterministic experiments are
    /// untouched; returns whether the seed was applied.
    pub fn apply_seed(&mut self, seed: u64) -> bool {
        match self {
            ExperimentConfig::LiebSuite(cfg) => {
                cfg.seed = seed;
                true
            }
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        match self {
            ExperimentConfig::LengthCurve(c) => {
                c.reaction.validate()?;
                ensure(c.points >= 8, "need at least 8 slope points")
            }
            ExperimentConfig::Dilate1D(c) => {
                c.reaction.validate()?;
                ensure(!c.kappas.is_empty(), "kappa list must not be empty")?;
                ensure_increasing(&c.kappas, "kappas")?;
                ensure(c.kappas[0] > 0.0, "kappas must be positive")?;
                ensure(c.h > 0.0 && c.h < 0.25, "h must lie in (0, 0.25)")?;
                ensure(
                    c.kappas.contains(&c.kappa_merge),
                    "kappa_merge must be one of the kappas",
                )
            }
            ExperimentConfig::Dilate2D(c) => {
                c.reaction.validate()?;
                ensure(!c.kappas.is_empty(), "kappa list must not be empty")?;
                ensure_increasing(&c.kappas, "kappas")?;
                ensure(c.kappas[0] > 0.0, "kappas must be positive")?;
                ensure(c.h > 0.0, "h must be positive")
            }
            ExperimentConfig::Pocket(c) => {
                c.reaction.validate()?;
                ensure(c.base > 0.0 && c.pocket > 0.0, "room sides must be positive")?;
                ensure(c.pocket <= c.base, "pocket must not exceed the base")?;
                ensure(c.bridge_half_length > 0.0, "bridge length must be positive")?;
                ensure(!c.deltas.is_empty(), "delta sweep must not be empty")?;
                ensure(
                    c.deltas.windows(2).all(|w| w[1] < w[0]),
                    "deltas must be strictly decreasing",
                )?;
                ensure(c.deltas.iter().all(|&d| d > 0.0), "deltas must be positive")?;
                ensure(c.h > 0.0, "h must be positive")
            }
            ExperimentConfig::Marginal(c) => {
                c.f0.validate()?;
                c.f1.validate()?;
                ensure(c.points >= 8, "need at least 8 slope points")?;
                ensure(
                    c.tau_resolution > 0.0 && c.tau_resolution <= 1e-3,
                    "tau_resolution must lie in (0, 1e-3]",
                )?;
                ensure(
                    c.side_offset > 0.0 && c.side_offset < 0.5,
                    "side_offset must lie in (0, 0.5)",
                )
            }
            ExperimentConfig::StripOrbit(c) => {
                c.reaction.validate()?;
                ensure(!c.epsilons.is_empty(), "epsilon list must not be empty")?;
                ensure_increasing(&c.epsilons, "epsilons")?;
                ensure(c.n_sigma >= 16 && c.ny >= 16, "orbit grid must be at least 16x16")
            }
            ExperimentConfig::WellsLambda(c) => {
                c.f0.validate()?;
                c.f1.validate()?;
                ensure((0.0..=1.0).contains(&c.tau0), "tau0 must lie in [0, 1]")?;
                ensure(c.alpha0 > 0.0, "alpha0 must be positive")?;
                ensure(c.well_length > 0.0, "well_length must be positive")?;
                ensure(c.nodes_across >= 9, "need at least 9 nodes across the well")?;
                ensure(
                    c.base_cells[0] % 2 == 0,
                    "base_cells[0] must be even so the well is lattice-centered",
                )?;
                ensure(
                    c.base_cells[0] > c.nodes_across + 2 && c.base_cells[1] >= 4,
                    "slab too small for the well",
                )?;
                ensure(!c.depth_factors.is_empty(), "depth list must not be empty")?;
                ensure_increasing(&c.depth_factors, "depth_factors")?;
                ensure(c.depth_factors[0] > 0.0, "depths must be positive")
            }
            ExperimentConfig::ExteriorRadial(c) => {
                c.reaction.validate()?;
                ensure(c.r0 > 0.0, "r0 must be positive")?;
                ensure(c.r1 > c.r0 + 1.0, "r1 must exceed r0 + 1")?;
                ensure(c.r_max > c.r0 + 20.0, "r_max must exceed r0 + 20")?;
                ensure(c.r_max >= c.r1, "r_max must reach past r1")?;
                ensure(c.h > 0.0 && c.h < 0.25, "h must lie in (0, 0.25)")?;
                ensure(c.ray_tol > 0.0, "ray_tol must be positive")
            }
            ExperimentConfig::LiebSuite(c) => {
                ensure(c.h > 0.0, "h must be positive")?;
                ensure(
                    !c.instances.is_empty() || c.random_masks > 0,
                    "need at least one instance",
                )?;
                for inst in &c.instances {
                    if let PotentialSpec::Linearized { reaction } = &inst.potential {
                        reaction.validate()?;
                    }
                    ensure(inst.r_ball >= 4.0 * c.h, "r_ball must be at least 4h")?;
                }
                ensure(c.n_centers >= 1, "need at least one center")
            }
            ExperimentConfig::StarGeom(c) => {
                ensure(c.grid >= 32, "kernel grid must be at least 32")?;
                ensure(!c.kappas.is_empty(), "kappa list must not be empty")?;
                ensure_increasing(&c.kappas, "kappas")?;
                ensure(c.kappas[0] > 1.0, "dilation factors must exceed 1")?;
                ensure(!c.polygons.is_empty(), "polygon list must not be empty")?;
                for p in &c.polygons {
                    ensure(p.vertices.len() >= 3, "polygons need at least 3 vertices")?;
                    ensure(!p.name.is_empty(), "polygons must be named")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(ExperimentKind::parse(k.name()), Some(k));
        }
        assert_eq!(ExperimentKind::parse("no-such"), None);
    }

    #[test]
    fn config_json_round_trips_and_matches_kind() {
        for k in ExperimentKind::ALL {
            let cfg = crate::catalog::default_config(k);
            assert_eq!(cfg.kind(), k);
            cfg.validate().unwrap();
            let text = serde_json::to_string_pretty(&cfg).unwrap();
            assert!(text.contains(&format!("\"{}\"", k.name())));
            let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
            assert_eq!(back.kind(), k);
            back.validate().unwrap();
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"experiment":"length-curve","config":{"reaction":{"family":"logistic","params":{"m":1.0}},"points":64,"small_slope_check":true,"bogus":1}}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(text).is_err());
    }

    #[test]
    fn mistyped_experiment_tag_is_rejected() {
        let text = r#"{"experiment":"length_curve","config":{}}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(text).is_err());
    }

    #[test]
    fn validation_rejects_bad_sweeps() {
        let mut cfg = match crate::catalog::default_config(ExperimentKind::Pocket) {
            ExperimentConfig::Pocket(c) => c,
            _ => unreachable!(),
        };
        cfg.deltas = vec![0.05, 0.1];
        assert!(ExperimentConfig::Pocket(cfg).validate().is_err());
    }

    #[test]
    fn seed_applies_only_to_randomized_experiments() {
        let mut lieb = crate::catalog::default_config(ExperimentKind::LiebSuite);
        assert!(lieb.apply_seed(99));
        match &lieb {
            ExperimentConfig::LiebSuite(c) => assert_eq!(c.seed, 99),
            _ => unreachable!(),
        }
        let mut curve = crate::catalog::default_config(ExperimentKind::LengthCurve);
        assert!(!curve.apply_seed(99));
    }
}
