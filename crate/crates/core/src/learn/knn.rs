//! k-nearest-neighbor classifier over the raw (dv, mp) plane.
//!
//! Fit is storage; predict keeps the k nearest training points in a bounded
//! max-heap ordered by (squared distance, training index), so distance ties
//! resolve to the earlier training sample. k is required to be odd, which
//! makes label ties impossible over two classes.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::learn::dataset::{Dataset, Label, Sample};

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    k: usize,
    samples: Vec<Sample>,
}

/// Heap key: squared distance then training index, totally ordered.
#[derive(PartialEq)]
struct Neighbor(f64, usize, Label);

impl Eq for Neighbor {}

impl PartialOrd for Neighbor {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Neighbor {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

impl KnnModel {
    /// Store the training data verbatim. `k` must be odd, at least 1, and no
    /// larger than the training size. Single-class data is allowed.
    pub fn fit(data: &Dataset, k: usize) -> Result<Self> {
        if k < 1 || k % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "k must be an odd positive integer, got {k}"
            )));
        }
        if k > data.len() {
            return Err(Error::InvalidParameter(format!(
                "k = {k} exceeds training size {}",
                data.len()
            )));
        }
        Ok(Self { k, samples: data.samples().to_vec() })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn predict(&self, dv: f64, mp: u8) -> Label {
        let mut heap: BinaryHeap<Neighbor> = BinaryHeap::with_capacity(self.k + 1);
        for (i, s) in self.samples.iter().enumerate() {
            let ddv = s.dv - dv;
            let dmp = s.mp as f64 - mp as f64;
            heap.push(Neighbor(ddv * ddv + dmp * dmp, i, s.label));
            if heap.len() > self.k {
                heap.pop(); // evict the farthest (ties: the later index)
            }
        }
        let turns = heap.iter().filter(|n| n.2 == Label::Turn).count();
        if 2 * turns > self.k {
            Label::Turn
        } else {
            Label::Straight
        }
    }
}

/// Test-only brute-force oracle: full sort of all (distance, index) pairs,
/// then majority over the first k. Kept separate from the heap-based
/// implementation it checks.
#[doc(hidden)]
pub fn brute_force_predict(samples: &[Sample], k: usize, dv: f64, mp: u8) -> Label {
    let mut dists: Vec<(f64, usize, Label)> = samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let ddv = s.dv - dv;
            let dmp = s.mp as f64 - mp as f64;
            (ddv * ddv + dmp * dmp, i, s.label)
        })
        .collect();
    dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let turns = dists[..k].iter().filter(|(_, _, l)| *l == Label::Turn).count();
    if 2 * turns > k {
        Label::Turn
    } else {
        Label::Straight
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::dataset::tests::{sample, table2};
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    #[test]
    fn fit_stores_data_verbatim() {
        let model = KnnModel::fit(&table2(), 1).unwrap();
        assert_eq!(model.samples(), table2().samples());
        assert_eq!(model.k(), 1);
    }

    #[test]
    fn fit_rejects_bad_k() {
        let data = table2();
        assert!(matches!(KnnModel::fit(&data, 2), Err(Error::InvalidParameter(_))));
        assert!(matches!(KnnModel::fit(&data, 0), Err(Error::InvalidParameter(_))));
        assert!(matches!(KnnModel::fit(&data, 3), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn nearest_table2_rows_win() {
        let model = KnnModel::fit(&table2(), 1).unwrap();
        assert_eq!(model.predict(-3.0, 1), Label::Turn);
        assert_eq!(model.predict(0.1, 0), Label::Straight);
    }

    #[test]
    fn majority_of_three() {
        let data = Dataset::from_samples(vec![
            sample(0.0, 0, Label::Straight),
            sample(4.0, 1, Label::Turn),
            sample(0.2, 0, Label::Straight),
        ]);
        let model = KnnModel::fit(&data, 3).unwrap();
        // Verified against the brute-force oracle: 2 of 3 nearest are S.
        assert_eq!(brute_force_predict(data.samples(), 3, 0.1, 0), Label::Straight);
        assert_eq!(model.predict(0.1, 0), Label::Straight);
    }

    #[test]
    fn distance_tie_prefers_earlier_training_index() {
        // Two points equidistant from the query but differently labeled;
        // with k = 1 the earlier one must win.
        let data = Dataset::from_samples(vec![
            sample(1.0, 0, Label::Turn),
            sample(-1.0, 0, Label::Straight),
        ]);
        let model = KnnModel::fit(&data, 1).unwrap();
        assert_eq!(model.predict(0.0, 0), Label::Turn);

        let flipped = Dataset::from_samples(vec![
            sample(-1.0, 0, Label::Straight),
            sample(1.0, 0, Label::Turn),
        ]);
        let model = KnnModel::fit(&flipped, 1).unwrap();
        assert_eq!(model.predict(0.0, 0), Label::Straight);
    }

    #[test]
    fn k1_memorizes_distinct_training_points() {
        let mut rng = SplitMix64::new(8);
        let samples: Vec<Sample> = (0..40)
            .map(|i| {
                let label = if rng.next_u64() % 2 == 0 { Label::Straight } else { Label::Turn };
                sample(i as f64 * 0.37, (rng.next_u64() % 2) as u8, label)
            })
            .collect();
        let data = Dataset::from_samples(samples.clone());
        let model = KnnModel::fit(&data, 1).unwrap();
        for s in &samples {
            assert_eq!(model.predict(s.dv, s.mp), s.label);
        }
    }

    proptest! {
        // Heap-based predict agrees with the full-sort oracle everywhere.
        #[test]
        fn matches_brute_force_oracle(seed in any::<u64>()) {
            let mut rng = SplitMix64::new(seed);
            let n = 1 + (rng.next_u64() % 50) as usize;
            let samples: Vec<Sample> = (0..n)
                .map(|_| {
                    let dv = rng.gaussian(0.0, 2.0);
                    let mp = (rng.next_u64() % 2) as u8;
                    let label = if rng.next_u64() % 2 == 0 { Label::Straight } else { Label::Turn };
                    sample(dv, mp, label)
                })
                .collect();
            let data = Dataset::from_samples(samples.clone());
            let k = {
                let mut k = 1 + (rng.next_u64() % n as u64) as usize;
                if k % 2 == 0 { k -= 1; }
                k
            };
            let model = KnnModel::fit(&data, k).unwrap();
            for _ in 0..20 {
                let dv = rng.gaussian(0.0, 2.0);
                let mp = (rng.next_u64() % 2) as u8;
                prop_assert_eq!(model.predict(dv, mp), brute_force_predict(&samples, k, dv, mp));
            }
        }
    }
}
