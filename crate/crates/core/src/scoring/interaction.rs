use std::collections::BTreeSet;

use crate::dataset::TrackId;
use crate::detection::Detection;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InteractionTerms {
    pub base: f64,
    pub observed_partners: usize,
    pub mutual: f64,
    pub total: f64,
}

fn partners_of(track: TrackId, at_frame: &[(&Detection, f64)], exclude: Option<TrackId>) -> BTreeSet<TrackId> {
    at_frame
        .iter()
        .filter(|(d, _)| d.subject == track && d.kind.is_relation())
        .filter_map(|(d, _)| d.partner)
        .filter(|p| Some(*p) != exclude)
        .collect()
}

/// Punctual interaction of `subject` given the scored detections of all road
/// users at one frame. The base sum is boosted by the number of partners;
/// each partner adds its own engagements with third parties, weighted by how
/// many of those it has.
pub fn interaction_punctual(subject: TrackId, at_frame: &[(&Detection, f64)]) -> InteractionTerms {
    let own = at_frame.iter().filter(|(d, _)| d.subject == subject && d.kind.is_relation());
    let base: f64 = own.map(|(_, s)| s).sum();
    let partners = partners_of(subject, at_frame, None);
    let mut mutual = 0.0;
    for &p in &partners {
        let r = partners_of(p, at_frame, Some(subject)).len() as f64;
        let others: f64 = at_frame
            .iter()
            .filter(|(d, _)| d.subject == p && d.kind.is_relation() && d.partner != Some(subject))
            .map(|(_, s)| s)
            .sum();
        mutual += 0.1 * r * others;
    }
    let observed = partners.len();
    InteractionTerms { base, observed_partners: observed, mutual, total: base * (1.0 + 0.1 * observed as f64) + mutual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::{Aux, DetectionType};

    fn rel(kind: DetectionType, subject: TrackId, partner: Option<TrackId>) -> Detection {
        let d = Detection::punctual(kind, subject, 7, 1.0, Aux::None);
        match partner {
            Some(p) => d.with_partner(p),
            None => d,
        }
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(interaction_punctual(1, &[]).total, 0.0);
    }

    #[test]
    fn single_follower() {
        let d = rel(DetectionType::Thw, 1, Some(2));
        let t = interaction_punctual(1, &[(&d, 1.0)]);
        assert!((t.total - 1.1).abs() < 1e-12);
        // the leader has nothing of its own
        assert_eq!(interaction_punctual(2, &[(&d, 1.0)]).total, 0.0);
    }

    #[test]
    fn waiting_counts_without_partner() {
        let d = rel(DetectionType::Wp, 1, None);
        let t = interaction_punctual(1, &[(&d, 2.0)]);
        assert_eq!(t.observed_partners, 0);
        assert_eq!(t.total, 2.0);
    }

    #[test]
    fn non_relation_types_ignored() {
        let d = rel(DetectionType::LonAccel, 1, None);
        assert_eq!(interaction_punctual(1, &[(&d, 3.0)]).total, 0.0);
    }

    #[test]
    fn chain_by_hand() {
        // 1 follows 2, 2 follows 3, 3 conflicts with 4
        let a = rel(DetectionType::Thw, 1, Some(2));
        let b = rel(DetectionType::Thw, 2, Some(3));
        let c = rel(DetectionType::Ttc, 2, Some(3));
        let e = rel(DetectionType::Dmttcp, 3, Some(4));
        let f = rel(DetectionType::Dmttcp, 4, Some(3));
        let all = [(&a, 1.0), (&b, 0.5), (&c, 0.8), (&e, 2.0), (&f, 2.0)];
        // subject 1: base 1, one partner; partner 2 has one other partner (3) and detections 0.5 + 0.8
        let t1 = interaction_punctual(1, &all);
        assert!((t1.total - (1.0 * 1.1 + 0.1 * 1.0 * 1.3)).abs() < 1e-12);
        // subject 2: base 1.3, partner 3 has other partner 4 with 2.0
        let t2 = interaction_punctual(2, &all);
        assert!((t2.total - (1.3 * 1.1 + 0.1 * 1.0 * 2.0)).abs() < 1e-12);
        // subject 3: base 2, partner 4 has no other partner
        let t3 = interaction_punctual(3, &all);
        assert!((t3.total - 2.2).abs() < 1e-12);
    }

    #[test]
    fn uniform_scaling_scales_total() {
        let a = rel(DetectionType::Thw, 1, Some(2));
        let b = rel(DetectionType::Thw, 2, Some(3));
        let base = [(&a, 1.0), (&b, 0.7)];
        let scaled = [(&a, 3.0), (&b, 2.1)];
        let (x, y) = (interaction_punctual(1, &base).total, interaction_punctual(1, &scaled).total);
        assert!((y - 3.0 * x).abs() < 1e-12);
    }
}
