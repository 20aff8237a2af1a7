//! Pinned constants, measured once on the seeded corpora and re-checked by
//! the test suite.

/// Upper limit on `|weil_sum| / (k^2 sqrt(q))` over
/// `polynomial_corpus(6, WEIL_CORPUS_SEED)`. Measured maximum: 0.49108.
pub const WEIL_RATIO_THRESHOLD: f64 = 0.5;

pub const WEIL_CORPUS_SEED: u64 = 1;

/// Calibrated constant for `max{|A+A|, |P(A)|}` over fields.
pub const DELTA_SUM_IMAGE: f64 = 1.993377434954678;

/// Calibrated constant for `max{|A+A|, |A.A|}` over Z_m.
pub const DELTA_SUM_PRODUCT_MODULAR: f64 = 1.0046893424865713;

/// Calibrated constant for the distance inequality.
pub const DELTA_DISTANCE: f64 = 7.976091762794357;
