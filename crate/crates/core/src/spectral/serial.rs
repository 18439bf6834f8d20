//! JSON form of spectra: `{"dim": d, "modes": [{"k": [..], "re": [..], "im": [..]}]}`,
//! listing only canonical frequencies (k lexicographically >= -k).

use super::field::{Cochain, Coeff, VectorFieldSpectrum};
use super::freq::Freq;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModeJson {
    pub k: Vec<i32>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumJson {
    pub dim: usize,
    pub modes: Vec<ModeJson>,
}

impl From<&VectorFieldSpectrum> for SpectrumJson {
    fn from(f: &VectorFieldSpectrum) -> Self {
        let modes = f
            .modes()
            .iter()
            .filter(|(k, _)| k.is_canonical())
            .map(|(k, c)| ModeJson {
                k: k.0.to_vec(),
                re: c.iter().map(|z| z.re).collect(),
                im: c.iter().map(|z| z.im).collect(),
            })
            .collect();
        SpectrumJson { dim: f.dim(), modes }
    }
}

impl TryFrom<SpectrumJson> for VectorFieldSpectrum {
    type Error = Error;

    fn try_from(s: SpectrumJson) -> Result<Self> {
        let mut half: BTreeMap<Freq, Coeff> = BTreeMap::new();
        for m in s.modes {
            if m.re.len() != s.dim || m.im.len() != s.dim {
                return Err(Error::DimensionMismatch {
                    expected: s.dim,
                    found: m.re.len().min(m.im.len()),
                });
            }
            let k = Freq::new(&m.k);
            let c: Coeff = m.re.iter().zip(&m.im).map(|(&a, &b)| C64::new(a, b)).collect();
            if half.insert(k, c).is_some() {
                return Err(Error::InvalidInput(format!("duplicate frequency {:?}", m.k)));
            }
        }
        VectorFieldSpectrum::from_half(s.dim, half)
    }
}

pub fn spectrum_to_json(f: &VectorFieldSpectrum) -> serde_json::Value {
    serde_json::to_value(SpectrumJson::from(f)).expect("spectrum serializes")
}

pub fn spectrum_from_json(v: &serde_json::Value) -> Result<VectorFieldSpectrum> {
    let s: SpectrumJson = serde_json::from_value(v.clone())?;
    s.try_into()
}

pub fn cochain_to_json(c: &Cochain) -> serde_json::Value {
    serde_json::Value::Array(c.entries.iter().map(spectrum_to_json).collect())
}

pub fn cochain_from_json(v: &serde_json::Value) -> Result<Cochain> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::InvalidInput("cochain must be a JSON array of spectra".into()))?;
    let entries: Result<Vec<_>> = arr.iter().map(spectrum_from_json).collect();
    Ok(Cochain::new(entries?))
}
