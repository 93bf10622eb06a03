//! Time-indexed scalar data and complex-number serialization helpers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A scalar quantity that is either constant over the horizon or given as an
/// explicit series. Resolved against the grid length at validation time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Profile {
    Constant(f64),
    Series(Vec<f64>),
}

impl Profile {
    pub fn at(&self, k: usize) -> f64 {
        match self {
            Profile::Constant(v) => *v,
            Profile::Series(v) => v[k],
        }
    }

    /// Checks the profile resolves to `n` entries.
    pub fn fits(&self, n: usize) -> bool {
        match self {
            Profile::Constant(_) => true,
            Profile::Series(v) => v.len() == n,
        }
    }

    pub fn max_over(&self, n: usize) -> f64 {
        (0..n).map(|k| self.at(k)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_over(&self, n: usize) -> f64 {
        (0..n).map(|k| self.at(k)).fold(f64::INFINITY, f64::min)
    }

    /// Materializes the profile into a series of length `n`.
    pub fn series(&self, n: usize) -> Vec<f64> {
        (0..n).map(|k| self.at(k)).collect()
    }
}

impl From<f64> for Profile {
    fn from(v: f64) -> Self {
        Profile::Constant(v)
    }
}

impl From<Vec<f64>> for Profile {
    fn from(v: Vec<f64>) -> Self {
        Profile::Series(v)
    }
}

/// Serialize `Complex64` as a `[re, im]` pair.
pub mod cx {
    use super::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [v.re, v.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Serialize a square complex matrix as nested `[re, im]` pairs.
pub mod cx_mat {
    use super::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<Complex64>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = v
            .iter()
            .map(|r| r.iter().map(|c| [c.re, c.im]).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Complex64>>, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        Ok(rows
            .iter()
            .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_series_resolve() {
        let c = Profile::Constant(2.5);
        assert_eq!(c.at(0), 2.5);
        assert_eq!(c.at(7), 2.5);
        assert!(c.fits(3));

        let s = Profile::Series(vec![1.0, 2.0, 3.0]);
        assert_eq!(s.at(1), 2.0);
        assert!(s.fits(3));
        assert!(!s.fits(4));
        assert_eq!(s.max_over(3), 3.0);
    }

    #[test]
    fn profile_json_forms() {
        let c: Profile = serde_json::from_str("1.5").unwrap();
        assert_eq!(c, Profile::Constant(1.5));
        let s: Profile = serde_json::from_str("[1.0,2.0]").unwrap();
        assert_eq!(s, Profile::Series(vec![1.0, 2.0]));
    }
}
