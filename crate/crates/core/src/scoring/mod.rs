//! Per-detection scores and their combination into punctual interaction,
//! anomaly and relevance scores.

mod anomaly;
mod interaction;

pub use anomaly::{select_context, ContextChoice, RegionContext, SUBSET_ENUMERATION_LIMIT};
pub use interaction::{interaction_punctual, InteractionTerms};

use crate::config::ScoringConfig;
use crate::detection::{Aux, Detection, DetectionType};

/// Score before clamping to the type's maximum. Metric values used as
/// divisors are floored at `metric_floor`.
pub fn raw_score(d: &Detection, cfg: &ScoringConfig) -> f64 {
    let floor = |x: f64| x.max(cfg.metric_floor);
    let excess = || match d.aux {
        Aux::Limit { limit } => (d.value.abs() - limit).abs(),
        _ => 0.0,
    };
    match d.kind {
        DetectionType::Thw => 1.0 / floor(d.value),
        DetectionType::Dmttcp => {
            let sum = match d.aux {
                Aux::Conflict { mttcp_subject, mttcp_partner, .. } => mttcp_subject + mttcp_partner,
                _ => 0.0,
            };
            (1.0 / floor(d.value)) * (4.0 / floor(sum))
        }
        DetectionType::Ttc => 2.0 * cfg.kappa / floor(d.value),
        DetectionType::Drac => cfg.kappa / 5.0 * d.value,
        DetectionType::Wp => d.value.max(0.0).sqrt(),
        DetectionType::LonAccel => 0.1 * excess(),
        DetectionType::LatAccel => 2.0 * excess(),
        DetectionType::Sideslip => 25.0 * excess(),
        DetectionType::YawRate => excess(),
        DetectionType::AreaUsage => 5.0,
        DetectionType::DrivingDirection => 4.0,
        DetectionType::Velocity => match d.aux {
            Aux::Limit { limit } if limit > 0.0 => 10.0 / limit * (d.value - limit),
            _ => 0.0,
        },
        DetectionType::DrivingBehavior => 1.2 * d.value,
        DetectionType::Trajectory => d.value,
    }
}

/// Upper bound of a type's score; `None` for uncapped types.
pub fn score_cap(kind: DetectionType, cfg: &ScoringConfig) -> Option<f64> {
    let c = &cfg.caps;
    Some(match kind {
        DetectionType::Thw => c.thw,
        DetectionType::Dmttcp => c.dmttcp,
        DetectionType::Ttc => c.ttc * cfg.kappa,
        DetectionType::Drac => c.drac * cfg.kappa,
        DetectionType::Wp => c.wp,
        DetectionType::LonAccel => c.lon_accel,
        DetectionType::LatAccel => c.lat_accel,
        DetectionType::Sideslip => c.sideslip,
        DetectionType::YawRate => c.yaw_rate,
        DetectionType::Velocity => c.velocity,
        DetectionType::Trajectory => c.trajectory,
        DetectionType::AreaUsage => c.area_usage,
        DetectionType::DrivingDirection => c.driving_direction,
        DetectionType::DrivingBehavior => return None,
    })
}

pub fn score_detection(d: &Detection, cfg: &ScoringConfig) -> f64 {
    let raw = raw_score(d, cfg).max(0.0);
    match score_cap(d.kind, cfg) {
        Some(cap) => raw.min(cap),
        None => raw,
    }
}

pub fn relevance_punctual(interaction: f64, anomaly: f64, cfg: &ScoringConfig) -> f64 {
    interaction * anomaly + cfg.gamma_interaction * interaction + cfg.gamma_anomaly * anomaly
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use proptest::prelude::*;

    fn det(kind: DetectionType, value: f64, aux: Aux) -> Detection {
        Detection::punctual(kind, 1, 0, value, aux)
    }

    #[test]
    fn reference_values() {
        let cfg = ScoringConfig::default();
        assert_eq!(score_detection(&det(DetectionType::Thw, 1.0, Aux::None), &cfg), 1.0);
        assert_eq!(score_detection(&det(DetectionType::Thw, 0.25, Aux::None), &cfg), 2.0);
        assert_eq!(score_detection(&det(DetectionType::Thw, 0.0, Aux::None), &cfg), 2.0);
        let k2 = ScoringConfig { kappa: 2.0, ..ScoringConfig::default() };
        assert_eq!(score_detection(&det(DetectionType::Ttc, 2.0, Aux::None), &k2), 2.0);
        assert_eq!(score_detection(&det(DetectionType::AreaUsage, 1.0, Aux::None), &cfg), 5.0);
        assert_eq!(score_detection(&det(DetectionType::DrivingDirection, 3.0, Aux::None), &cfg), 4.0);
        assert_eq!(score_detection(&det(DetectionType::Wp, 16.0, Aux::None), &cfg), 4.0);
        assert_eq!(score_detection(&det(DetectionType::Wp, 100.0, Aux::None), &cfg), 7.75);
        // braking at 6 m/s² against a 4 m/s² limit
        let lon = det(DetectionType::LonAccel, -6.0, Aux::Limit { limit: 4.0 });
        assert!((score_detection(&lon, &cfg) - 0.2).abs() < 1e-12);
        let v = det(DetectionType::Velocity, 15.0, Aux::Limit { limit: 12.5 });
        assert!((score_detection(&v, &cfg) - 2.0).abs() < 1e-12);
        let c =
            det(DetectionType::Dmttcp, 0.5, Aux::Conflict { ccp: Vec2::ZERO, mttcp_subject: 1.0, mttcp_partner: 3.0 });
        assert!((score_detection(&c, &cfg) - 2.0).abs() < 1e-12);
        assert_eq!(score_detection(&det(DetectionType::DrivingBehavior, 10.0, Aux::None), &cfg), 12.0);
    }

    #[test]
    fn relevance_examples() {
        let cfg = ScoringConfig::default();
        assert_eq!(relevance_punctual(0.0, 0.0, &cfg), 0.0);
        assert!((relevance_punctual(2.0, 3.0, &cfg) - 16.3).abs() < 1e-12);
        assert!((relevance_punctual(0.0, 4.0, &cfg) - 0.4).abs() < 1e-12);
    }

    fn any_kind() -> impl Strategy<Value = DetectionType> {
        (0..DetectionType::ALL.len()).prop_map(|i| DetectionType::ALL[i])
    }

    proptest! {
        #[test]
        fn scores_within_caps(kind in any_kind(), value in -50.0f64..50.0, limit in 0.1f64..20.0, kappa in 1.0f64..4.0) {
            let cfg = ScoringConfig { kappa, ..ScoringConfig::default() };
            let aux = match kind {
                DetectionType::Dmttcp => Aux::Conflict { ccp: Vec2::ZERO, mttcp_subject: limit, mttcp_partner: limit / 2.0 },
                DetectionType::LonAccel | DetectionType::LatAccel | DetectionType::Sideslip
                | DetectionType::YawRate | DetectionType::Velocity => Aux::Limit { limit },
                _ => Aux::None,
            };
            let s = score_detection(&det(kind, value.abs(), aux), &cfg);
            prop_assert!(s >= 0.0);
            if let Some(cap) = score_cap(kind, &cfg) {
                prop_assert!(s <= cap);
            }
        }

        #[test]
        fn kappa_scales_ttc_and_drac_only(kind in any_kind(), value in 0.01f64..50.0) {
            let k1 = ScoringConfig::default();
            let k2 = ScoringConfig { kappa: 2.0, ..ScoringConfig::default() };
            let aux = match kind {
                DetectionType::Dmttcp => Aux::Conflict { ccp: Vec2::ZERO, mttcp_subject: 2.0, mttcp_partner: 2.0 },
                DetectionType::LonAccel | DetectionType::LatAccel | DetectionType::Sideslip
                | DetectionType::YawRate | DetectionType::Velocity => Aux::Limit { limit: 1.0 },
                _ => Aux::None,
            };
            let d = det(kind, value, aux);
            let (a, b) = (score_detection(&d, &k1), score_detection(&d, &k2));
            match kind {
                DetectionType::Ttc | DetectionType::Drac => {
                    if raw_score(&d, &k1) < score_cap(kind, &k1).unwrap() {
                        prop_assert!((b - 2.0 * a).abs() < 1e-9);
                    }
                }
                _ => prop_assert_eq!(a, b),
            }
        }

        #[test]
        fn relevance_monotone(i in 0.0f64..50.0, a in 0.0f64..50.0, di in 0.0f64..5.0, da in 0.0f64..5.0) {
            let cfg = ScoringConfig::default();
            let r = relevance_punctual(i, a, &cfg);
            prop_assert!(relevance_punctual(i + di, a, &cfg) >= r);
            prop_assert!(relevance_punctual(i, a + da, &cfg) >= r);
        }
    }
}
