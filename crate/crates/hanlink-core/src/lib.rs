//! Conversion and analysis toolkit for Chinese personal names across
//! romanisation schemes: Jyutping, Pinyin (numeric / diacritic / toneless)
//! and the unstandardised Hong Kong government style, plus the measurement
//! machinery built on top — uniqueness statistics, tone n-gram modelling and
//! imputation, and seeded record-linkage simulation.

pub mod corpusio;
pub mod linksim;
pub mod namekit;
pub mod prondict;
pub mod romanise;
pub mod stats;
pub mod tonemodel;
pub mod syllable;

pub use syllable::{Scheme, Syllable};
