//! JSON exchange format for polarized lattices:
//! `{"gram": [[...]], "h": [...], "delta": [[...]]}` with `delta` the Kummer
//! vectors (may be empty or absent).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::EvenLattice;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub gram: Vec<Vec<i64>>,
    pub h: Vec<i64>,
    #[serde(default)]
    pub delta: Vec<Vec<i64>>,
}

impl LatticeJson {
    pub fn from_lattice(l: &EvenLattice) -> Result<LatticeJson> {
        Ok(LatticeJson {
            gram: l.gram.clone(),
            h: l.h()?.to_vec(),
            delta: l.kummer.clone().unwrap_or_default(),
        })
    }

    /// Validated lattice: even, nondegenerate, hyperbolic, `h² > 0`.
    pub fn into_lattice(self) -> Result<EvenLattice> {
        let mut l = EvenLattice::new(self.gram)?.with_polarization(self.h)?;
        if !self.delta.is_empty() {
            l = l.with_kummer(self.delta)?;
        }
        let (p, _) = l.signature();
        if p != 1 {
            return Err(Error::Input(format!("lattice is not hyperbolic: {p} positive squares")));
        }
        let h = l.h()?.to_vec();
        if l.norm(&h) <= 0 {
            return Err(Error::Input("polarization has nonpositive square".into()));
        }
        Ok(l)
    }
}

pub fn parse_lattice(s: &str) -> Result<EvenLattice> {
    let j: LatticeJson = serde_json::from_str(s).map_err(|e| Error::Input(format!("malformed lattice JSON: {e}")))?;
    j.into_lattice()
}

pub fn lattice_to_json(l: &EvenLattice) -> Result<String> {
    Ok(serde_json::to_string(&LatticeJson::from_lattice(l)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polarization_only() {
        let l = parse_lattice(r#"{"gram": [[8]], "h": [1]}"#).unwrap();
        assert_eq!(l.rank(), 1);
        assert_eq!(parse_lattice(&lattice_to_json(&l).unwrap()).unwrap(), l);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_lattice("{").is_err());
        assert!(parse_lattice(r#"{"gram": [[3]], "h": [1]}"#).is_err());
        assert!(parse_lattice(r#"{"gram": [[-2]], "h": [1]}"#).is_err());
        assert!(parse_lattice(r#"{"gram": [[2, 0], [0, 2]], "h": [1, 0]}"#).is_err());
    }
}
