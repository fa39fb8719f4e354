//! Numeric label encoding for the two-class problem.
//!
//! Classification is reduced to regression by substituting a numeric code
//! for each of the two class symbols: `m` for the first class and `n` for
//! the second. The default is `(-1, +1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The pair of numeric class codes `(m, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelEncoding {
    m: f64,
    n: f64,
}

impl LabelEncoding {
    pub fn new(m: f64, n: f64) -> Result<Self> {
        if !m.is_finite() || !n.is_finite() {
            return Err(Error::Domain(format!(
                "label codes must be finite, got ({m}, {n})"
            )));
        }
        if m == n {
            return Err(Error::Domain(format!(
                "label codes must differ, got ({m}, {n})"
            )));
        }
        Ok(Self { m, n })
    }

    /// Code of the first class.
    pub fn m(&self) -> f64 {
        self.m
    }

    /// Code of the second class.
    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn midpoint(&self) -> f64 {
        (self.m + self.n) / 2.0
    }

    pub fn lo(&self) -> f64 {
        self.m.min(self.n)
    }

    pub fn hi(&self) -> f64 {
        self.m.max(self.n)
    }

    /// Swaps the roles of the two codes.
    pub fn swapped(&self) -> Self {
        Self {
            m: self.n,
            n: self.m,
        }
    }
}

impl Default for LabelEncoding {
    fn default() -> Self {
        Self { m: -1.0, n: 1.0 }
    }
}

/// Fixed assignment of the two class symbols onto the codes `m` and `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassMap {
    /// Symbol encoded as `m`.
    pub symbol_m: String,
    /// Symbol encoded as `n`.
    pub symbol_n: String,
}

impl ClassMap {
    pub fn new(symbol_m: impl Into<String>, symbol_n: impl Into<String>) -> Result<Self> {
        let symbol_m = symbol_m.into();
        let symbol_n = symbol_n.into();
        if symbol_m == symbol_n {
            return Err(Error::Encoding(format!(
                "class symbols must differ, got {symbol_m:?} twice"
            )));
        }
        Ok(Self { symbol_m, symbol_n })
    }

    /// Numeric code for `symbol` under `encoding`.
    pub fn code(&self, symbol: &str, encoding: LabelEncoding) -> Result<f64> {
        if symbol == self.symbol_m {
            Ok(encoding.m())
        } else if symbol == self.symbol_n {
            Ok(encoding.n())
        } else {
            Err(Error::Encoding(format!(
                "symbol {symbol:?} is not mapped (classes are {:?} and {:?})",
                self.symbol_m, self.symbol_n
            )))
        }
    }
}

/// A real target vector, one entry per object. Holds either true encoded
/// labels (entries in `{m, n}`) or pseudo-targets (entries in `[lo, hi]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedTargets(Vec<f64>);

impl EncodedTargets {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Errors unless every entry is exactly one of the two class codes.
    pub fn require_hard_labels(&self, encoding: LabelEncoding) -> Result<()> {
        for (i, &v) in self.0.iter().enumerate() {
            if v != encoding.m() && v != encoding.n() {
                return Err(Error::Domain(format!(
                    "target {v} at index {i} is not a class code ({} or {})",
                    encoding.m(),
                    encoding.n()
                )));
            }
        }
        Ok(())
    }
}

/// Replaces each class symbol with its numeric code, preserving order.
///
/// A single-class input is allowed; more than two distinct symbols or a
/// symbol absent from `map` is an encoding error.
pub fn encode_labels(
    labels: &[String],
    map: &ClassMap,
    encoding: LabelEncoding,
) -> Result<EncodedTargets> {
    let mut distinct: Vec<&str> = Vec::new();
    for l in labels {
        if !distinct.contains(&l.as_str()) {
            distinct.push(l);
            if distinct.len() > 2 {
                return Err(Error::Encoding(format!(
                    "more than two distinct class symbols: {distinct:?}"
                )));
            }
        }
    }
    let values = labels
        .iter()
        .map(|l| map.code(l, encoding))
        .collect::<Result<Vec<f64>>>()?;
    Ok(EncodedTargets::new(values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn substitutes_codes_in_order() {
        let map = ClassMap::new("a", "b").unwrap();
        let enc = LabelEncoding::default();
        let t = encode_labels(&sym(&["a", "b", "a"]), &map, enc).unwrap();
        assert_eq!(t.values(), &[-1.0, 1.0, -1.0]);
    }

    #[test]
    fn single_class_is_allowed_at_encode_time() {
        let map = ClassMap::new("a", "b").unwrap();
        let enc = LabelEncoding::default();
        let t = encode_labels(&sym(&["a", "a"]), &map, enc).unwrap();
        assert_eq!(t.values(), &[-1.0, -1.0]);
    }

    #[test]
    fn three_symbols_is_an_error() {
        let map = ClassMap::new("a", "b").unwrap();
        let enc = LabelEncoding::default();
        let err = encode_labels(&sym(&["a", "b", "c"]), &map, enc).unwrap_err();
        assert!(matches!(err, Error::Encoding(_)));
    }

    #[test]
    fn unmapped_symbol_is_an_error() {
        let map = ClassMap::new("a", "b").unwrap();
        let enc = LabelEncoding::default();
        let err = encode_labels(&sym(&["a", "z"]), &map, enc).unwrap_err();
        assert!(matches!(err, Error::Encoding(_)));
    }

    #[test]
    fn encoding_accessors() {
        let enc = LabelEncoding::new(3.0, -2.0).unwrap();
        assert_eq!(enc.midpoint(), 0.5);
        assert_eq!(enc.lo(), -2.0);
        assert_eq!(enc.hi(), 3.0);
        assert_eq!(enc.swapped().m(), -2.0);
    }

    #[test]
    fn equal_codes_rejected() {
        assert!(LabelEncoding::new(1.0, 1.0).is_err());
        assert!(LabelEncoding::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn require_hard_labels_rejects_midpoint() {
        let enc = LabelEncoding::default();
        let t = EncodedTargets::new(vec![-1.0, 0.0]);
        assert!(t.require_hard_labels(enc).is_err());
        let ok = EncodedTargets::new(vec![-1.0, 1.0]);
        assert!(ok.require_hard_labels(enc).is_ok());
    }
}
