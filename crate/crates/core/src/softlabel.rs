//! Agreement-graded soft labels and the divergence functions that compare
//! them with model predictions.
//!
//! A soft label spreads probability mass according to how strongly the two
//! annotation perspectives agree on a relation: the annotated class receives
//! 0.9 (high agreement), 0.8 (medium) or 0.6 (low), and the remainder is
//! uniform over the other classes. All logarithms are natural; inputs to a
//! logarithm are clamped below by [`EPS`] to keep sums finite.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// Floor applied to probabilities before taking logarithms.
pub const EPS: f64 = 1e-12;

/// How strongly the two perspectives agree on an annotated relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Agreement {
    /// Both perspectives annotate the same relation over the same pair.
    High,
    /// The relation exists in only one perspective.
    Medium,
    /// Both perspectives annotate the same pair with conflicting labels.
    Low,
}

impl Agreement {
    /// Probability assigned to the annotated class.
    pub fn target_probability(self) -> f64 {
        self.target_tenths() as f64 / 10.0
    }

    fn target_tenths(self) -> u32 {
        match self {
            Agreement::High => 9,
            Agreement::Medium => 8,
            Agreement::Low => 6,
        }
    }
}

/// Probability distribution over relation classes encoding an agreement
/// level. The annotated class always holds the largest entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftLabel {
    pub probs: Vec<f64>,
    pub agreement: Agreement,
    pub target_class: usize,
}

/// A model head's normalized output distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionDistribution {
    pub probs: Vec<f64>,
}

impl PredictionDistribution {
    pub fn new(probs: Vec<f64>) -> Self {
        PredictionDistribution { probs }
    }

    /// Normalized distribution from raw scores via softmax.
    pub fn from_logits(logits: &[f64]) -> Self {
        PredictionDistribution {
            probs: softmax(logits),
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Build the soft label for `target_class` at the given agreement level over
/// `k` classes: the target entry gets the agreement probability and the
/// remaining mass is uniform over the other `k - 1` classes.
pub fn make_soft_label(
    target_class: usize,
    agreement: Agreement,
    k: usize,
) -> Result<SoftLabel, CoreError> {
    if k < 2 {
        return Err(CoreError::TooFewClasses(k));
    }
    if target_class >= k {
        return Err(CoreError::InvalidInput(format!(
            "target class {target_class} out of range for {k} classes"
        )));
    }
    // Work in tenths so the remainder divides without accumulated error:
    // (1 - p) / (K - 1) = (10 - 10p) / (10 (K - 1)).
    let tenths = agreement.target_tenths();
    let p = tenths as f64 / 10.0;
    let rest = (10 - tenths) as f64 / (10 * (k - 1)) as f64;
    let probs = (0..k)
        .map(|i| if i == target_class { p } else { rest })
        .collect();
    Ok(SoftLabel {
        probs,
        agreement,
        target_class,
    })
}

fn check_dims(p: &[f64], q: &[f64]) -> Result<(), CoreError> {
    if p.len() != q.len() {
        return Err(CoreError::DimensionMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(())
}

/// Standard KL divergence D(P‖Q) = Σ P(x) ln(P(x)/Q(x)).
pub fn kl_standard(p: &SoftLabel, q: &PredictionDistribution) -> Result<f64, CoreError> {
    check_dims(&p.probs, &q.probs)?;
    Ok(kl_slices(&p.probs, &q.probs))
}

/// Inverse KL divergence D(Q‖P) = Σ Q(x) ln(Q(x)/P(x)), computed against the
/// raw (non-log-normalized) soft label.
pub fn kl_inverse(p: &SoftLabel, q: &PredictionDistribution) -> Result<f64, CoreError> {
    check_dims(&p.probs, &q.probs)?;
    Ok(kl_slices(&q.probs, &p.probs))
}

/// Cross-entropy −Σ P(x) ln Q(x).
pub fn soft_loss_ce(p: &SoftLabel, q: &PredictionDistribution) -> Result<f64, CoreError> {
    check_dims(&p.probs, &q.probs)?;
    let mut sum = 0.0;
    for (&pi, &qi) in p.probs.iter().zip(&q.probs) {
        sum -= pi * qi.max(EPS).ln();
    }
    Ok(sum)
}

/// Per-class binary cross-entropy, averaged over the K classes so it stays
/// on the same scale as [`soft_loss_ce`].
pub fn soft_loss_bce(p: &SoftLabel, q: &PredictionDistribution) -> Result<f64, CoreError> {
    check_dims(&p.probs, &q.probs)?;
    let k = p.probs.len() as f64;
    let mut sum = 0.0;
    for (&pi, &qi) in p.probs.iter().zip(&q.probs) {
        let qc = qi.clamp(EPS, 1.0 - EPS);
        sum -= pi * qc.ln() + (1.0 - pi) * (1.0 - qc).ln();
    }
    Ok(sum / k)
}

/// Elementwise natural log of the soft label, for pairing with heads that
/// emit log-probabilities. Positivity of the entries guarantees finiteness.
pub fn log_normalize(p: &SoftLabel) -> Vec<f64> {
    p.probs.iter().map(|&pi| pi.ln()).collect()
}

/// Shannon entropy H(P) = −Σ P(x) ln P(x).
pub fn entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .map(|&pi| if pi <= 0.0 { 0.0 } else { -pi * pi.ln() })
        .sum()
}

fn kl_slices(p: &[f64], q: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            sum += pi * (pi / qi.max(EPS)).ln();
        }
    }
    sum
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / sum).collect()
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Divergence used when the soft label supervises a prediction head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Divergence {
    KlStandard,
    KlInverse,
    CrossEntropy,
    Bce,
}

impl Divergence {
    /// Loss value given the head's raw scores. KL and cross-entropy variants
    /// normalize the scores with softmax; BCE squashes each class with a
    /// sigmoid independently.
    pub fn value_from_logits(self, p: &SoftLabel, logits: &[f64]) -> Result<f64, CoreError> {
        check_dims(&p.probs, logits)?;
        match self {
            Divergence::KlStandard => kl_standard(p, &PredictionDistribution::from_logits(logits)),
            Divergence::KlInverse => kl_inverse(p, &PredictionDistribution::from_logits(logits)),
            Divergence::CrossEntropy => {
                soft_loss_ce(p, &PredictionDistribution::from_logits(logits))
            }
            Divergence::Bce => {
                let q = PredictionDistribution::new(logits.iter().map(|&z| sigmoid(z)).collect());
                soft_loss_bce(p, &q)
            }
        }
    }

    /// Analytic gradient of [`Self::value_from_logits`] with respect to the
    /// raw scores.
    pub fn grad_from_logits(self, p: &SoftLabel, logits: &[f64]) -> Result<Vec<f64>, CoreError> {
        check_dims(&p.probs, logits)?;
        match self {
            // d/dz of Σ P (ln P − ln softmax(z)) and of −Σ P ln softmax(z)
            // coincide: softmax(z) − P.
            Divergence::KlStandard | Divergence::CrossEntropy => {
                let q = softmax(logits);
                Ok(q.iter().zip(&p.probs).map(|(&qi, &pi)| qi - pi).collect())
            }
            Divergence::KlInverse => {
                let q = softmax(logits);
                let kl = kl_slices(&q, &p.probs);
                Ok(q.iter()
                    .zip(&p.probs)
                    .map(|(&qi, &pi)| qi * ((qi.max(EPS) / pi.max(EPS)).ln() - kl))
                    .collect())
            }
            Divergence::Bce => {
                let k = logits.len() as f64;
                Ok(logits
                    .iter()
                    .zip(&p.probs)
                    .map(|(&z, &pi)| (sigmoid(z) - pi) / k)
                    .collect())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn high_vector_for_five_classes() {
        let sl = make_soft_label(0, Agreement::High, 5).unwrap();
        assert_eq!(sl.probs, vec![0.9, 0.025, 0.025, 0.025, 0.025]);
    }

    #[test]
    fn low_vector_for_five_classes() {
        let sl = make_soft_label(0, Agreement::Low, 5).unwrap();
        assert_eq!(sl.probs, vec![0.6, 0.1, 0.1, 0.1, 0.1]);
    }

    #[test]
    fn medium_vector_permutes_with_target() {
        let sl = make_soft_label(2, Agreement::Medium, 5).unwrap();
        assert_eq!(sl.probs, vec![0.05, 0.05, 0.8, 0.05, 0.05]);
    }

    #[test]
    fn rejects_degenerate_class_counts() {
        assert!(matches!(
            make_soft_label(0, Agreement::High, 1),
            Err(CoreError::TooFewClasses(1))
        ));
        assert!(make_soft_label(5, Agreement::High, 5).is_err());
    }

    #[test]
    fn kl_of_identical_distributions_is_zero() {
        let p = make_soft_label(0, Agreement::High, 5).unwrap();
        let q = PredictionDistribution::new(p.probs.clone());
        assert!(kl_standard(&p, &q).unwrap().abs() < 1e-12);
        assert!(kl_inverse(&p, &q).unwrap().abs() < 1e-12);
    }

    #[test]
    fn kl_clamps_zero_entries() {
        let p = make_soft_label(0, Agreement::High, 5).unwrap();
        let q = PredictionDistribution::new(vec![0.0, 0.25, 0.25, 0.25, 0.25]);
        let v = kl_standard(&p, &q).unwrap();
        assert!(v.is_finite());
        // Clamped KL against a hard zero dominates any positive-support pair.
        let q_uniform = PredictionDistribution::new(vec![0.2; 5]);
        assert!(v > kl_standard(&p, &q_uniform).unwrap());
    }

    #[test]
    fn inverse_kl_of_one_hot_prediction() {
        // Q concentrated on the target class: D(Q||P) collapses to
        // 1 * ln(1 / 0.9).
        let p = make_soft_label(0, Agreement::High, 5).unwrap();
        let q = PredictionDistribution::new(vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(close(kl_inverse(&p, &q).unwrap(), -(0.9f64.ln()), 1e-12));
    }

    #[test]
    fn ce_against_uniform_is_log_k() {
        let p = make_soft_label(0, Agreement::High, 5).unwrap();
        let q = PredictionDistribution::new(vec![0.2; 5]);
        assert!(close(soft_loss_ce(&p, &q).unwrap(), 5.0_f64.ln(), 1e-12));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let p = make_soft_label(0, Agreement::High, 5).unwrap();
        let q = PredictionDistribution::new(vec![0.5, 0.5]);
        assert!(matches!(
            kl_standard(&p, &q),
            Err(CoreError::DimensionMismatch { left: 5, right: 2 })
        ));
    }

    #[test]
    fn log_normalize_round_trips() {
        let p = make_soft_label(1, Agreement::Medium, 7).unwrap();
        let logs = log_normalize(&p);
        for (l, &pi) in logs.iter().zip(&p.probs) {
            assert!(close(l.exp(), pi, 1e-12));
        }
        // Monotone: ordering preserved under log.
        let mut by_prob: Vec<usize> = (0..7).collect();
        by_prob.sort_by(|&a, &b| p.probs[a].partial_cmp(&p.probs[b]).unwrap());
        let mut by_log: Vec<usize> = (0..7).collect();
        by_log.sort_by(|&a, &b| logs[a].partial_cmp(&logs[b]).unwrap());
        assert_eq!(by_prob, by_log);
    }

    #[test]
    fn gradients_match_central_differences() {
        // Small deterministic logit vector; every divergence's analytic
        // gradient must match finite differences.
        let p = make_soft_label(1, Agreement::Low, 5).unwrap();
        let logits = vec![0.3, -0.7, 1.1, 0.05, -0.4];
        let h = 1e-6;
        for div in [
            Divergence::KlStandard,
            Divergence::KlInverse,
            Divergence::CrossEntropy,
            Divergence::Bce,
        ] {
            let grad = div.grad_from_logits(&p, &logits).unwrap();
            for i in 0..logits.len() {
                let mut plus = logits.clone();
                plus[i] += h;
                let mut minus = logits.clone();
                minus[i] -= h;
                let numeric = (div.value_from_logits(&p, &plus).unwrap()
                    - div.value_from_logits(&p, &minus).unwrap())
                    / (2.0 * h);
                let denom = grad[i].abs().max(numeric.abs()).max(1e-8);
                assert!(
                    (grad[i] - numeric).abs() / denom < 1e-4,
                    "{div:?} grad[{i}]: analytic {} vs numeric {numeric}",
                    grad[i]
                );
            }
        }
    }
}
