//! Linguistic variables and their membership functions over [0, 1].

use alloc::string::String;
use alloc::vec::Vec;

use crate::fabs;

/// Triangular membership function over the normalized domain [0, 1].
///
/// Degree is 0 outside `[left, right]`, 1 at `peak`, linear in between.
/// Degenerate flanks (`left == peak` or `peak == right`) clamp to 1 on
/// the flat side so that boundary anchors behave as shoulders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipFunction {
    pub left: f64,
    pub peak: f64,
    pub right: f64,
}

impl MembershipFunction {
    pub fn new(left: f64, peak: f64, right: f64) -> Option<Self> {
        let ok = (0.0..=1.0).contains(&left)
            && (0.0..=1.0).contains(&right)
            && left <= peak
            && peak <= right;
        ok.then_some(Self { left, peak, right })
    }

    pub fn degree(&self, x: f64) -> f64 {
        if x < self.left || x > self.right {
            return 0.0;
        }
        if x <= self.peak {
            if self.peak == self.left {
                1.0
            } else {
                (x - self.left) / (self.peak - self.left)
            }
        } else if self.right == self.peak {
            1.0
        } else {
            (self.right - x) / (self.right - self.peak)
        }
    }
}

/// A named linguistic concept: an ordered label set (weakest to strongest)
/// with one membership function per label forming a Ruspini partition
/// (degrees sum to 1 at every point of the domain).
#[derive(Debug, Clone, PartialEq)]
pub struct LinguisticVariable {
    pub name: String,
    /// Display spellings, ordered from weakest to strongest.
    pub labels: Vec<String>,
    pub membership: Vec<MembershipFunction>,
    /// Designer-assigned per-label relevance, copied into every perception
    /// produced for this variable. Defaults to all ones.
    pub relevance: Vec<f64>,
}

impl LinguisticVariable {
    /// The default three-label variable: Low = (0, 0, 0.5),
    /// Medium = (0, 0.5, 1), High = (0.5, 1, 1).
    pub fn default_three(name: &str) -> Self {
        Self::uniform(name, &["Low", "Medium", "High"])
    }

    /// A uniform triangular Ruspini partition with evenly spaced peaks.
    pub fn uniform(name: &str, labels: &[&str]) -> Self {
        let n = labels.len();
        assert!(n >= 2, "a linguistic variable needs at least two labels");
        let step = 1.0 / (n - 1) as f64;
        let membership = (0..n)
            .map(|i| {
                let peak = i as f64 * step;
                MembershipFunction {
                    left: if i == 0 { 0.0 } else { peak - step },
                    peak,
                    right: if i == n - 1 { 1.0 } else { peak + step },
                }
            })
            .collect();
        Self {
            name: String::from(name),
            labels: labels.iter().map(|l| String::from(*l)).collect(),
            membership,
            relevance: alloc::vec![1.0; n],
        }
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    /// Index of a label, matched case-insensitively.
    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels
            .iter()
            .position(|l| l.eq_ignore_ascii_case(label))
    }

    /// Evenly spaced label centroids: 0, 1/(n-1), ..., 1.
    pub fn centroids(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.label_count();
        (0..n).map(move |i| i as f64 / (n - 1) as f64)
    }

    /// Checks the Ruspini property on a sample grid: membership degrees sum
    /// to 1 within `tol` at every sampled point.
    pub fn is_ruspini(&self, samples: usize, tol: f64) -> bool {
        (0..samples).all(|i| {
            let x = i as f64 / (samples - 1) as f64;
            let sum: f64 = self.membership.iter().map(|m| m.degree(x)).sum();
            fabs(sum - 1.0) <= tol
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_partition_anchors() {
        let v = LinguisticVariable::default_three("level");
        assert_eq!(v.membership[0].degree(0.0), 1.0);
        assert_eq!(v.membership[1].degree(0.5), 1.0);
        assert_eq!(v.membership[2].degree(1.0), 1.0);
        assert_eq!(v.membership[0].degree(0.5), 0.0);
        assert_eq!(v.membership[2].degree(0.5), 0.0);
    }

    #[test]
    fn flank_midpoint_splits_evenly() {
        let v = LinguisticVariable::default_three("level");
        assert_eq!(v.membership[0].degree(0.25), 0.5);
        assert_eq!(v.membership[1].degree(0.25), 0.5);
    }

    #[test]
    fn uniform_partitions_are_ruspini() {
        for labels in [
            &["a", "b"][..],
            &["low", "medium", "high"],
            &["vl", "l", "m", "h", "vh"],
        ] {
            let v = LinguisticVariable::uniform("x", labels);
            assert!(v.is_ruspini(1001, 1e-9), "{} labels", labels.len());
        }
    }

    #[test]
    fn rejects_misordered_parameters() {
        assert!(MembershipFunction::new(0.5, 0.2, 0.8).is_none());
        assert!(MembershipFunction::new(-0.1, 0.2, 0.8).is_none());
        assert!(MembershipFunction::new(0.0, 0.5, 1.0).is_some());
    }

    #[test]
    fn label_lookup_is_case_insensitive() {
        let v = LinguisticVariable::default_three("level");
        assert_eq!(v.label_index("MEDIUM"), Some(1));
        assert_eq!(v.label_index("high"), Some(2));
        assert_eq!(v.label_index("none"), None);
    }
}
