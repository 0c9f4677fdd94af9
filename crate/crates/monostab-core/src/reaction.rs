//! Reaction families and their pointwise calculus.
//!
//! Every family in the catalog is a polynomial of degree at most four with
//! `f(0) = 0`, so evaluation, derivatives and the antiderivative all reduce
//! to one coefficient vector. [`Reaction::quartic`] exposes that vector for
//! hot loops that cannot afford per-call validation.

use alloc::boxed::Box;
use core::fmt;
use serde::{Deserialize, Serialize};

/// Nonlinearity on the unit interval, `f(0) = f(1) = 0`, `f'(0) > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum Reaction {
    /// `m s (1 - s)`
    Logistic { m: f64 },
    /// `m s (1 - s) (1 + c s)`, valid for `c > -1`
    Cubic { m: f64, c: f64 },
    /// `A s (1 - s) ((s - theta)^2 + eps)` with `A = m / (theta^2 + eps)`,
    /// so that `f'(0) = m`. A logistic-like profile with a pronounced
    /// plateau near `s = theta`.
    DoubleHump { m: f64, theta: f64, eps: f64 },
    /// `(1 - tau) f0 + tau f1`
    Interpolated {
        tau: f64,
        base0: Box<Reaction>,
        base1: Box<Reaction>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReactionError {
    /// Argument outside the admissible interval for the requested operation.
    Domain { s: f64 },
    /// Derivative order above two.
    Order { order: u8 },
    /// Parameters outside the family's validity range.
    Params(&'static str),
}

impl fmt::Display for ReactionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReactionError::Domain { s } => write!(f, "argument {s} outside admissible interval"),
            ReactionError::Order { order } => write!(f, "derivative order {order} not supported"),
            ReactionError::Params(why) => write!(f, "invalid parameters: {why}"),
        }
    }
}

impl core::error::Error for ReactionError {}

/// Dense quartic `f(s) = c[1] s + c[2] s^2 + c[3] s^3 + c[4] s^4`.
///
/// Unchecked evaluation; obtain one from [`Reaction::quartic`] and keep it
/// for the duration of a march or a relaxation sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartic {
    pub c: [f64; 5],
}

impl Quartic {
    pub const ZERO: Quartic = Quartic { c: [0.0; 5] };

    #[inline]
    pub fn f(&self, s: f64) -> f64 {
        let c = &self.c;
        s * (c[1] + s * (c[2] + s * (c[3] + s * c[4])))
    }

    #[inline]
    pub fn df(&self, s: f64) -> f64 {
        let c = &self.c;
        c[1] + s * (2.0 * c[2] + s * (3.0 * c[3] + s * 4.0 * c[4]))
    }

    #[inline]
    pub fn ddf(&self, s: f64) -> f64 {
        let c = &self.c;
        2.0 * c[2] + s * (6.0 * c[3] + s * 12.0 * c[4])
    }

    /// `F(s) = ∫_0^s f`
    #[inline]
    pub fn anti(&self, s: f64) -> f64 {
        let c = &self.c;
        s * s * (c[1] / 2.0 + s * (c[2] / 3.0 + s * (c[3] / 4.0 + s * c[4] / 5.0)))
    }

    fn axpy(&mut self, a: f64, other: &Quartic) {
        for k in 0..5 {
            self.c[k] += a * other.c[k];
        }
    }
}

/// Outcome of [`Reaction::classify`]. `None` means the property could not be
/// decided within the classification tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KppClass {
    /// `f > 0` on `(0, 1)`
    pub is_positive: Option<bool>,
    /// `f(s) <= f'(0) s` on `(0, 1)`
    pub is_weak_kpp: Option<bool>,
    /// `f(s)/s` strictly decreasing on `(0, 1)`
    pub is_strong_kpp: Option<bool>,
    /// `sup |f'|` over `[0, 1]`
    pub lipschitz: f64,
}

const CLASSIFY_GRID: usize = 10_000;
const CLASSIFY_TOL: f64 = 1e-12;

impl Reaction {
    pub fn validate(&self) -> Result<(), ReactionError> {
        match self {
            Reaction::Logistic { m } => {
                if !(*m > 0.0) {
                    return Err(ReactionError::Params("logistic requires m > 0"));
                }
            }
            Reaction::Cubic { m, c } => {
                if !(*m > 0.0) {
                    return Err(ReactionError::Params("cubic requires m > 0"));
                }
                if !(*c > -1.0) {
                    return Err(ReactionError::Params("cubic requires c > -1"));
                }
            }
            Reaction::DoubleHump { m, theta, eps } => {
                if !(*m > 0.0) {
                    return Err(ReactionError::Params("double_hump requires m > 0"));
                }
                if !(*theta > 0.0 && *theta < 1.0) {
                    return Err(ReactionError::Params("double_hump requires 0 < theta < 1"));
                }
                if !(*eps > 0.0) {
                    return Err(ReactionError::Params("double_hump requires eps > 0"));
                }
            }
            Reaction::Interpolated { tau, base0, base1 } => {
                if !(0.0..=1.0).contains(tau) {
                    return Err(ReactionError::Params("interpolated requires tau in [0, 1]"));
                }
                base0.validate()?;
                base1.validate()?;
            }
        }
        Ok(())
    }

    /// Coefficient form of the family. Validates parameters once; the
    /// returned [`Quartic`] is then free of checks.
    pub fn quartic(&self) -> Result<Quartic, ReactionError> {
        self.validate()?;
        Ok(self.quartic_unchecked())
    }

    fn quartic_unchecked(&self) -> Quartic {
        match self {
            Reaction::Logistic { m } => Quartic {
                c: [0.0, *m, -*m, 0.0, 0.0],
            },
            Reaction::Cubic { m, c } => Quartic {
                c: [0.0, *m, m * (c - 1.0), -m * c, 0.0],
            },
            Reaction::DoubleHump { m, theta, eps } => {
                let a = m / (theta * theta + eps);
                Quartic {
                    c: [
                        0.0,
                        a * (theta * theta + eps),
                        -a * (2.0 * theta + theta * theta + eps),
                        a * (1.0 + 2.0 * theta),
                        -a,
                    ],
                }
            }
            Reaction::Interpolated { tau, base0, base1 } => {
                let mut q = Quartic::ZERO;
                q.axpy(1.0 - tau, &base0.quartic_unchecked());
                q.axpy(*tau, &base1.quartic_unchecked());
                q
            }
        }
    }

    /// `f'(0)`, the linearization at the trivial state.
    pub fn slope_at_zero(&self) -> Result<f64, ReactionError> {
        Ok(self.quartic()?.c[1])
    }

    /// Value (`order = 0`) or derivative (`order = 1, 2`) at `s ∈ [0, 1.5]`.
    pub fn eval(&self, s: f64, order: u8) -> Result<f64, ReactionError> {
        if !(0.0..=1.5).contains(&s) {
            return Err(ReactionError::Domain { s });
        }
        let q = self.quartic()?;
        match order {
            0 => Ok(q.f(s)),
            1 => Ok(q.df(s)),
            2 => Ok(q.ddf(s)),
            _ => Err(ReactionError::Order { order }),
        }
    }

    /// `F(s) = ∫_0^s f` for `s ∈ [0, 1]`.
    pub fn antiderivative(&self, s: f64) -> Result<f64, ReactionError> {
        if !(0.0..=1.0).contains(&s) {
            return Err(ReactionError::Domain { s });
        }
        Ok(self.quartic()?.anti(s))
    }

    /// Positivity and KPP flags, plus the Lipschitz constant on `[0, 1]`.
    ///
    /// Logistic and cubic families are decided in closed form (for the cubic,
    /// `(f/s)' = m (c - 1 - 2 c s)` is negative throughout `(0, 1)` exactly
    /// when `c <= 1`, and `f <= f'(0) s` is equivalent to the same bound).
    /// Other families are sampled on a grid of 10^4 points with tolerance
    /// 1e-12; results inside the tolerance band come back as `None`.
    pub fn classify(&self) -> Result<KppClass, ReactionError> {
        let q = self.quartic()?;
        let lipschitz = grid_lipschitz(&q);
        let (is_positive, is_weak_kpp, is_strong_kpp) = match self {
            Reaction::Logistic { .. } => (Some(true), Some(true), Some(true)),
            Reaction::Cubic { c, .. } => {
                let kpp = Some(*c <= 1.0);
                (Some(true), kpp, kpp)
            }
            _ => grid_classify(&q),
        };
        Ok(KppClass {
            is_positive,
            is_weak_kpp,
            is_strong_kpp,
            lipschitz,
        })
    }
}

fn grid_lipschitz(q: &Quartic) -> f64 {
    let n = CLASSIFY_GRID;
    let mut sup: f64 = 0.0;
    for k in 0..=n {
        let s = k as f64 / n as f64;
        let d = q.df(s);
        sup = sup.max(if d < 0.0 { -d } else { d });
    }
    sup
}

fn grid_classify(q: &Quartic) -> (Option<bool>, Option<bool>, Option<bool>) {
    let n = CLASSIFY_GRID;
    let m = q.c[1];
    let mut min_f = f64::INFINITY;
    let mut max_excess = f64::NEG_INFINITY;
    let mut max_ratio_step = f64::NEG_INFINITY;
    let mut prev_ratio = f64::NAN;
    for k in 1..n {
        let s = k as f64 / n as f64;
        let f = q.f(s);
        min_f = min_f.min(f);
        max_excess = max_excess.max(f - m * s);
        let ratio = f / s;
        if k > 1 {
            max_ratio_step = max_ratio_step.max(ratio - prev_ratio);
        }
        prev_ratio = ratio;
    }
    let decide = |favorable: f64, against: bool| -> Option<bool> {
        if against {
            Some(false)
        } else if favorable > CLASSIFY_TOL {
            Some(true)
        } else {
            None
        }
    };
    let is_positive = decide(min_f, min_f < -CLASSIFY_TOL);
    let is_weak = decide(-max_excess, max_excess > CLASSIFY_TOL);
    let is_strong = decide(-max_ratio_step, max_ratio_step > CLASSIFY_TOL);
    (is_positive, is_weak, is_strong)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn logistic(m: f64) -> Reaction {
        Reaction::Logistic { m }
    }

    fn cubic(m: f64, c: f64) -> Reaction {
        Reaction::Cubic { m, c }
    }

    fn hump(m: f64, theta: f64, eps: f64) -> Reaction {
        Reaction::DoubleHump { m, theta, eps }
    }

    fn blend(tau: f64, a: Reaction, b: Reaction) -> Reaction {
        Reaction::Interpolated {
            tau,
            base0: Box::new(a),
            base1: Box::new(b),
        }
    }

    #[test]
    fn logistic_derivative_at_one() {
        assert_eq!(logistic(1.0).eval(1.0, 1).unwrap(), -1.0);
    }

    #[test]
    fn cubic_second_derivative_at_zero() {
        assert_eq!(cubic(1.0, 2.0).eval(0.0, 2).unwrap(), 2.0);
    }

    #[test]
    fn hump_value_at_plateau_center() {
        let (theta, eps) = (0.35, 1e-2);
        let r = hump(4.0, theta, eps);
        let a = 4.0 / (theta * theta + eps);
        let expect = a * theta * (1.0 - theta) * eps;
        assert!((r.eval(theta, 0).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn antiderivatives_at_one() {
        assert!((logistic(1.0).antiderivative(1.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((cubic(1.0, 2.0).antiderivative(1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(logistic(1.0).antiderivative(0.0).unwrap(), 0.0);
    }

    #[test]
    fn eval_domain_is_enforced() {
        assert!(matches!(
            logistic(1.0).eval(1.6, 0),
            Err(ReactionError::Domain { .. })
        ));
        assert!(matches!(
            logistic(1.0).eval(f64::NAN, 0),
            Err(ReactionError::Domain { .. })
        ));
        assert!(matches!(
            logistic(1.0).eval(0.5, 3),
            Err(ReactionError::Order { order: 3 })
        ));
        assert!(matches!(
            logistic(1.0).antiderivative(1.2),
            Err(ReactionError::Domain { .. })
        ));
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(logistic(0.0).eval(0.5, 0).is_err());
        assert!(cubic(1.0, -1.0).eval(0.5, 0).is_err());
        assert!(hump(1.0, 1.2, 1e-2).eval(0.5, 0).is_err());
        assert!(blend(1.5, logistic(1.0), logistic(2.0)).eval(0.5, 0).is_err());
    }

    #[test]
    fn classify_catalog() {
        let kl = logistic(1.0).classify().unwrap();
        assert_eq!(
            (kl.is_positive, kl.is_weak_kpp, kl.is_strong_kpp),
            (Some(true), Some(true), Some(true))
        );
        assert!((kl.lipschitz - 1.0).abs() < 1e-12);

        let k2 = cubic(1.0, 2.0).classify().unwrap();
        assert_eq!(k2.is_positive, Some(true));
        assert_eq!(k2.is_weak_kpp, Some(false));
        assert_eq!(k2.is_strong_kpp, Some(false));

        let k05 = cubic(1.0, 0.5).classify().unwrap();
        assert_eq!(k05.is_weak_kpp, Some(true));
        assert_eq!(k05.is_strong_kpp, Some(true));

        let kh = hump(4.0 * core::f64::consts::PI * core::f64::consts::PI, 0.35, 1e-2)
            .classify()
            .unwrap();
        assert_eq!(kh.is_positive, Some(true));
        assert_eq!(kh.is_weak_kpp, Some(true));
        assert_eq!(kh.is_strong_kpp, Some(false));
    }

    #[test]
    fn classify_implications_on_samples() {
        let pool = [
            logistic(1.0),
            logistic(25.0),
            cubic(1.0, 0.5),
            cubic(2.0, 1.0),
            cubic(1.0, -0.5),
            cubic(1.0, 2.0),
            hump(39.0, 0.35, 1e-2),
            hump(9.8, 0.4, 1e-3),
            blend(0.3, logistic(1.0), cubic(1.0, 2.0)),
            blend(0.7, logistic(2.0), hump(39.0, 0.35, 1e-2)),
        ];
        for r in &pool {
            let k = r.classify().unwrap();
            if k.is_strong_kpp == Some(true) {
                assert_ne!(k.is_weak_kpp, Some(false), "{r:?}");
            }
            if k.is_weak_kpp == Some(true) {
                assert_ne!(k.is_positive, Some(false), "{r:?}");
            }
            assert!(k.lipschitz > 0.0);
        }
    }

    #[test]
    fn finite_difference_consistency() {
        let pool = [
            logistic(1.0),
            cubic(1.0, 2.0),
            hump(39.478, 0.35, 1e-2),
            blend(0.5, logistic(1.0), hump(39.478, 0.35, 1e-2)),
        ];
        for r in &pool {
            let bound = 40.0 * r.classify().unwrap().lipschitz + 1.0;
            for &h in &[1e-3, 1e-4] {
                for k in 1..10 {
                    let s = k as f64 / 10.0;
                    let fd0 =
                        (r.antiderivative(s + h).unwrap() - r.antiderivative(s - h).unwrap())
                            / (2.0 * h);
                    assert!((fd0 - r.eval(s, 0).unwrap()).abs() <= bound * h * h);
                    let fd1 = (r.eval(s + h, 0).unwrap() - r.eval(s - h, 0).unwrap()) / (2.0 * h);
                    assert!((fd1 - r.eval(s, 1).unwrap()).abs() <= bound * h * h);
                    let fd2 = (r.eval(s + h, 1).unwrap() - r.eval(s - h, 1).unwrap()) / (2.0 * h);
                    assert!((fd2 - r.eval(s, 2).unwrap()).abs() <= bound * h * h);
                }
            }
        }
    }

    #[test]
    fn json_round_trip_exact() {
        let samples = [
            logistic(1.0),
            cubic(0.1 + 1.0 / 3.0, 2.0 / 7.0),
            hump(4.0 * core::f64::consts::PI * core::f64::consts::PI, 0.35, 1e-2),
            blend(
                0.54893765,
                logistic(39.47841760435743),
                hump(39.47841760435743, 0.35, 1e-2),
            ),
        ];
        for r in &samples {
            let text = serde_json::to_string(r).unwrap();
            let back: Reaction = serde_json::from_str(&text).unwrap();
            assert_eq!(&back, r);
        }
        let text = serde_json::to_string(&samples[0]).unwrap();
        assert!(text.contains("\"family\":\"logistic\""));
        assert!(text.contains("\"params\""));
        let hump_text = serde_json::to_string(&samples[2]).unwrap();
        assert!(hump_text.contains("\"double_hump\""));
    }

    proptest::proptest! {
        #[test]
        fn interpolation_of_weak_kpp_is_weak_kpp(tau in 0.0f64..=1.0) {
            let r = blend(tau, logistic(1.0), cubic(2.0, 0.7));
            let k = r.classify().unwrap();
            proptest::prop_assert_ne!(k.is_weak_kpp, Some(false));
        }

        #[test]
        fn interpolation_stays_positive(idx in 0usize..101) {
            let tau = idx as f64 / 100.0;
            let r = blend(tau, cubic(1.0, 2.0), hump(39.478, 0.35, 1e-2));
            let k = r.classify().unwrap();
            proptest::prop_assert_ne!(k.is_positive, Some(false));
        }

        #[test]
        fn eval_matches_quartic_everywhere(s in 0.0f64..=1.5) {
            let r = blend(0.3, logistic(2.0), cubic(1.0, 0.5));
            let q = r.quartic().unwrap();
            proptest::prop_assert_eq!(r.eval(s, 0).unwrap(), q.f(s));
            proptest::prop_assert_eq!(r.eval(s, 1).unwrap(), q.df(s));
        }

        #[test]
        fn json_round_trip_random_cubic(m in 0.1f64..50.0, c in -0.9f64..3.0) {
            let r = cubic(m, c);
            let text = serde_json::to_string(&r).unwrap();
            let back: Reaction = serde_json::from_str(&text).unwrap();
            proptest::prop_assert_eq!(back, r);
        }
    }

    #[test]
    fn interpolated_blend_is_pointwise_convex_combination() {
        let (a, b) = (logistic(1.0), cubic(3.0, 2.0));
        let r = blend(0.25, a.clone(), b.clone());
        let mut worst: f64 = 0.0;
        for k in 0..=30 {
            let s = k as f64 / 20.0;
            let want = 0.75 * a.eval(s, 0).unwrap() + 0.25 * b.eval(s, 0).unwrap();
            worst = worst.max((r.eval(s, 0).unwrap() - want).abs());
        }
        assert!(worst < 1e-14);
    }
}
