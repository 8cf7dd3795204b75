//! JSON documents describing states and splitters.
//!
//! State file:
//! ```json
//! {"modes": 1, "terms": [{"kappa": [1.0, 0.0], "point": [[1.0, 0.0]]}]}
//! ```
//! Unitary file:
//! ```json
//! {"size": 2, "entries": [[[0.7071, 0.0], [-0.7071, 0.0]], [[0.7071, 0.0], [0.7071, 0.0]]]}
//! ```
//! Unknown fields are rejected.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{CoherentPoint, SuperpositionState, Term};
use crate::transforms::SplitterUnitary;

type Pair = [f64; 2];

fn to_c(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn from_c(z: Complex64) -> Pair {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub kappa: Pair,
    pub point: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub modes: usize,
    pub terms: Vec<TermSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitarySpec {
    pub size: usize,
    pub entries: Vec<Vec<Pair>>,
}

impl StateSpec {
    pub fn from_state(s: &SuperpositionState) -> Self {
        Self {
            modes: s.modes(),
            terms: s
                .terms()
                .iter()
                .map(|t| TermSpec {
                    kappa: from_c(t.kappa),
                    point: t.point.amplitudes().iter().copied().map(from_c).collect(),
                })
                .collect(),
        }
    }

    pub fn to_state(&self) -> Result<SuperpositionState> {
        if self.terms.is_empty() {
            return Err(Error::Parse("state file has no terms".into()));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                if t.point.len() != self.modes {
                    return Err(Error::Parse(format!(
                        "point has {} amplitudes, expected {}",
                        t.point.len(),
                        self.modes
                    )));
                }
                Ok(Term::new(
                    to_c(t.kappa),
                    CoherentPoint::new(t.point.iter().copied().map(to_c).collect()),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        SuperpositionState::new(self.modes, terms)
    }
}

impl UnitarySpec {
    pub fn from_unitary(t: &SplitterUnitary) -> Self {
        let m = t.entries();
        Self {
            size: t.size(),
            entries: (0..t.size())
                .map(|j| (0..t.size()).map(|k| from_c(m[(j, k)])).collect())
                .collect(),
        }
    }

    pub fn to_unitary(&self) -> Result<SplitterUnitary> {
        if self.entries.len() != self.size || self.entries.iter().any(|row| row.len() != self.size) {
            return Err(Error::Parse(format!(
                "entries must be a {0}x{0} nested list",
                self.size
            )));
        }
        let flat: Vec<Complex64> = self.entries.iter().flatten().copied().map(to_c).collect();
        SplitterUnitary::from_matrix(DMatrix::from_row_slice(self.size, self.size, &flat))
    }
}

pub fn parse_state(text: &str) -> Result<SuperpositionState> {
    let spec: StateSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    spec.to_state()
}

pub fn write_state(s: &SuperpositionState) -> String {
    serde_json::to_string_pretty(&StateSpec::from_state(s)).expect("state spec serializes")
}

pub fn parse_unitary(text: &str) -> Result<SplitterUnitary> {
    let spec: UnitarySpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    spec.to_unitary()
}

pub fn write_unitary(t: &SplitterUnitary) -> String {
    serde_json::to_string_pretty(&UnitarySpec::from_unitary(t)).expect("unitary spec serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_examples() {
        let s = parse_state(r#"{"modes": 1, "terms": [{"kappa": [1.0, 0.0], "point": [[1.0, 0.0]]}]}"#)
            .unwrap();
        assert_eq!(s.len(), 1);
        let t = parse_unitary(
            r#"{"size": 2, "entries": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]]}"#,
        )
        .unwrap();
        assert_eq!(t.size(), 2);
    }

    #[test]
    fn rejects_unknown_fields() {
        let err = parse_state(r#"{"modes": 1, "terms": [], "comment": "x"}"#).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        let err = parse_state(
            r#"{"modes": 1, "terms": [{"kappa": [1, 0], "point": [[0, 0]], "weight": 1}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        let err = parse_unitary(r#"{"size": 1, "entries": [[[1, 0]]], "name": "id"}"#).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn rejects_shape_errors() {
        assert!(parse_state(r#"{"modes": 2, "terms": [{"kappa": [1, 0], "point": [[0, 0]]}]}"#).is_err());
        assert!(parse_state(r#"{"modes": 1, "terms": []}"#).is_err());
        assert!(parse_unitary(r#"{"size": 2, "entries": [[[1, 0]]]}"#).is_err());
        assert!(matches!(
            parse_unitary(r#"{"size": 1, "entries": [[[2, 0]]]}"#),
            Err(Error::NonUnitary { .. })
        ));
    }

    #[test]
    fn unitary_round_trip() {
        let t = SplitterUnitary::dft(3).unwrap();
        let back = parse_unitary(&write_unitary(&t)).unwrap();
        assert_eq!(back.entries(), t.entries());
    }
}
