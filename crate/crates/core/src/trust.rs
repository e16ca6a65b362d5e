//! Time-discounted trust over a pairwise evaluation sequence.
//!
//! Both quantities walk one evaluator's history of a single worker. The rank
//! is a weighted average of the evaluation values and lives on the same
//! scale; the weight is an unnormalized mass that grows with evidence and
//! decays as that evidence ages.

use crate::config::CreditFn;
use crate::error::{Error, Result};

/// Discount base for a half-life of `half_life` intervals: `q = 2^(1/t)`.
/// Evidence `t` intervals older than the newest counts half as much.
pub fn compute_q(half_life: f64) -> Result<f64> {
    if !half_life.is_finite() || half_life <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "half-life must be a positive finite number of intervals, got {half_life}"
        )));
    }
    Ok(2f64.powf(1.0 / half_life))
}

/// Trust rank over `(interval label, value)` pairs:
/// the q^label-weighted mean of the values.
///
/// Weights are normalized by the newest label before summing, so a
/// single-element sequence yields its value exactly and shifting every label
/// by a constant changes nothing.
pub fn trust_rank(sequence: &[(u32, f64)], q: f64) -> Result<f64> {
    if sequence.is_empty() {
        return Err(Error::EmptySequence);
    }
    if !q.is_finite() || q < 1.0 {
        return Err(Error::InvalidConfig(format!(
            "discount base must satisfy q >= 1, got {q}"
        )));
    }
    let newest = sequence.iter().map(|&(label, _)| label).max().unwrap();
    let mut num = 0.0;
    let mut den = 0.0;
    for &(label, value) in sequence {
        let w = q.powi(label as i32 - newest as i32);
        num += value * w;
        den += w;
    }
    Ok(num / den)
}

/// Weight of trust at horizon `horizon` over `(interval label, credit)`
/// pairs: `sum of q^(label - horizon) * h(credit)` with `h` the credit
/// transform. Unlike the rank this is not normalized; more evidence means
/// strictly more weight, and old evidence decays toward zero.
pub fn trust_weight(
    sequence: &[(u32, f64)],
    horizon: u32,
    q: f64,
    credit_fn: CreditFn,
) -> Result<f64> {
    if !q.is_finite() || q < 1.0 {
        return Err(Error::InvalidConfig(format!(
            "discount base must satisfy q >= 1, got {q}"
        )));
    }
    let mut sum = 0.0;
    for &(label, credit) in sequence {
        if label > horizon {
            return Err(Error::AfterHorizon { label, horizon });
        }
        sum += q.powi(label as i32 - horizon as i32) * credit_fn.apply(credit);
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_for_two_interval_half_life_is_sqrt_two() {
        assert!((compute_q(2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn q_for_unit_half_life_is_exactly_two() {
        assert_eq!(compute_q(1.0).unwrap(), 2.0);
    }

    #[test]
    fn q_rejects_nonpositive_half_life() {
        assert!(compute_q(0.0).is_err());
        assert!(compute_q(-3.0).is_err());
        assert!(compute_q(f64::NAN).is_err());
    }

    #[test]
    fn rank_of_single_evaluation_is_its_value() {
        assert_eq!(trust_rank(&[(5, 2.0)], 2f64.sqrt()).unwrap(), 2.0);
    }

    #[test]
    fn rank_weights_recent_evidence_more() {
        let q = 2f64.sqrt();
        // (q*sqrt(2) + 6) / (sqrt(2) + 2) with the old value down-weighted by 1/q:
        // values 1 then 3 -> (1/q + 3) / (1/q + 1).
        let up = trust_rank(&[(1, 1.0), (2, 3.0)], q).unwrap();
        let down = trust_rank(&[(1, 3.0), (2, 1.0)], q).unwrap();
        assert!((up - 2.171_572_875_253_81).abs() < 1e-12, "up = {up}");
        assert!((down - 1.828_427_124_746_19).abs() < 1e-12, "down = {down}");
        assert!(up > down);
    }

    #[test]
    fn rank_is_invariant_under_label_shifts() {
        let q = compute_q(3.0).unwrap();
        let a = trust_rank(&[(1, 0.5), (2, 2.5), (4, 1.0)], q).unwrap();
        let b = trust_rank(&[(11, 0.5), (12, 2.5), (14, 1.0)], q).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rank_rejects_empty_sequence() {
        assert!(matches!(
            trust_rank(&[], 2.0),
            Err(Error::EmptySequence)
        ));
    }

    #[test]
    fn rank_rejects_discount_below_one() {
        assert!(trust_rank(&[(1, 1.0)], 0.9).is_err());
    }

    #[test]
    fn weight_of_fresh_unit_credit_is_one() {
        let w = trust_weight(&[(2, 1.0)], 2, 2f64.sqrt(), CreditFn::Identity).unwrap();
        assert_eq!(w, 1.0);
    }

    #[test]
    fn weight_decays_with_age_and_grows_with_evidence() {
        let q = 2f64.sqrt();
        let two = trust_weight(&[(1, 1.0), (2, 1.0)], 2, q, CreditFn::Identity).unwrap();
        // 1/sqrt(2) + 1
        assert!((two - 1.707_106_781_186_547_5).abs() < 1e-15, "two = {two}");
        let one = trust_weight(&[(2, 1.0)], 2, q, CreditFn::Identity).unwrap();
        assert!(two > one);
    }

    #[test]
    fn weight_with_unit_credits_at_horizon_is_the_count() {
        let w =
            trust_weight(&[(4, 1.0), (4, 1.0), (4, 1.0)], 4, 2.0, CreditFn::Identity).unwrap();
        assert_eq!(w, 3.0);
    }

    #[test]
    fn weight_scales_with_credit() {
        let w = trust_weight(&[(2, 5.0)], 2, 2f64.sqrt(), CreditFn::Identity).unwrap();
        assert_eq!(w, 5.0);
    }

    #[test]
    fn weight_rejects_evidence_after_horizon() {
        let err = trust_weight(&[(5, 1.0)], 4, 2.0, CreditFn::Identity).unwrap_err();
        assert!(matches!(err, Error::AfterHorizon { label: 5, horizon: 4 }));
    }

    #[test]
    fn weight_of_empty_sequence_is_zero() {
        assert_eq!(
            trust_weight(&[], 4, 2.0, CreditFn::Identity).unwrap(),
            0.0
        );
    }
}
