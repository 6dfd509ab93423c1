//! The three-component objective value shared across the crate.

use serde::{Deserialize, Serialize};

/// An objective triple under the maximisation convention: profit is
/// maximised directly, emission and service-level inequality enter
/// negated so that larger is always better.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub profit: f64,
    pub neg_emission: f64,
    pub neg_sl_inequality: f64,
}

impl ObjectiveVector {
    pub const ZERO: ObjectiveVector = ObjectiveVector {
        profit: 0.0,
        neg_emission: 0.0,
        neg_sl_inequality: 0.0,
    };

    pub fn new(profit: f64, neg_emission: f64, neg_sl_inequality: f64) -> Self {
        Self {
            profit,
            neg_emission,
            neg_sl_inequality,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.profit, self.neg_emission, self.neg_sl_inequality]
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.as_array().to_vec()
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn add(&self, other: &ObjectiveVector) -> ObjectiveVector {
        ObjectiveVector::new(
            self.profit + other.profit,
            self.neg_emission + other.neg_emission,
            self.neg_sl_inequality + other.neg_sl_inequality,
        )
    }

    pub fn scale(&self, k: f64) -> ObjectiveVector {
        ObjectiveVector::new(
            self.profit * k,
            self.neg_emission * k,
            self.neg_sl_inequality * k,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.profit.is_finite() && self.neg_emission.is_finite() && self.neg_sl_inequality.is_finite()
    }
}
