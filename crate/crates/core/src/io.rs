//! Versioned JSON documents holding [`BondiData`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bondi::BondiData;
use crate::error::{Error, Result};
use crate::sphere::{index, CovectorField, HarmonicCoeffs, ScalarField};
use crate::tensor::TracelessTensor;

pub const FORMAT_VERSION: u64 = 1;

type Entry = (i64, i64, f64);

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AngmomDoc {
    grad: Vec<Entry>,
    curl: Vec<Entry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShearDoc {
    electric: Vec<Entry>,
    magnetic: Vec<Entry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    version: u64,
    bandlimit: usize,
    u: f64,
    mass_aspect: Vec<Entry>,
    angmom_aspect: AngmomDoc,
    shear: ShearDoc,
}

fn entries(f: &ScalarField) -> Vec<Entry> {
    f.coeffs()
        .iter()
        .filter(|(_, _, v)| v.to_bits() != 0)
        .map(|(l, mu, v)| (l as i64, mu, v))
        .collect()
}

fn field(name: &str, band_limit: usize, list: &[Entry]) -> Result<ScalarField> {
    let mut c = HarmonicCoeffs::zeros(band_limit);
    let mut seen = vec![false; c.as_slice().len()];
    for &(l, mu, v) in list {
        if l < 0 || mu.abs() > l {
            return Err(Error::Parse(format!(
                "{name}: invalid index (l={l}, mu={mu})"
            )));
        }
        if l as usize > band_limit {
            return Err(Error::BandLimitMismatch(format!(
                "{name}: entry (l={l}, mu={mu}) exceeds declared band limit {band_limit}"
            )));
        }
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("{name} at (l={l}, mu={mu})")));
        }
        let i = index(l as usize, mu);
        if seen[i] {
            return Err(Error::Parse(format!(
                "{name}: duplicate entry (l={l}, mu={mu})"
            )));
        }
        seen[i] = true;
        c.as_mut_slice()[i] = v;
    }
    Ok(ScalarField::new(c))
}

/// Parse a document. In `strict` mode nonzero `l <= 1` shear content is an error.
pub fn from_json(text: &str, strict: bool) -> Result<BondiData> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    match value.get("version") {
        None => return Err(Error::Parse("missing field `version`".into())),
        Some(v) => match v.as_u64() {
            Some(FORMAT_VERSION) => {}
            Some(other) => return Err(Error::UnknownVersion(other)),
            None => return Err(Error::Parse(format!("invalid version {v}"))),
        },
    }
    let doc: Document = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let l = doc.bandlimit;
    let m = field("mass_aspect", l, &doc.mass_aspect)?;
    let g = field("angmom_aspect.grad", l, &doc.angmom_aspect.grad)?;
    let h = field("angmom_aspect.curl", l, &doc.angmom_aspect.curl)?;
    let c = field("shear.electric", l, &doc.shear.electric)?;
    let cb = field("shear.magnetic", l, &doc.shear.magnetic)?;
    let shear = if strict {
        TracelessTensor::new_strict(c, cb)?
    } else {
        TracelessTensor::new(c, cb)
    };
    BondiData::new(m, CovectorField::new(g, h), shear, doc.u)
}

pub fn to_json(data: &BondiData) -> String {
    let n = data.angmom_aspect();
    let doc = Document {
        version: FORMAT_VERSION,
        bandlimit: data.band_limit(),
        u: data.u(),
        mass_aspect: entries(data.mass_aspect()),
        angmom_aspect: AngmomDoc {
            grad: entries(n.grad_potential()),
            curl: entries(n.curl_potential()),
        },
        shear: ShearDoc {
            electric: entries(data.shear().electric()),
            magnetic: entries(data.shear().magnetic()),
        },
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("document serializes");
    s.push('\n');
    s
}

pub fn read_data(path: &Path, strict: bool) -> Result<BondiData> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    from_json(&text, strict)
}

pub fn write_data(data: &BondiData, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(data)).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bondi::{kerr_data, random_data};

    #[test]
    fn round_trip_is_bit_exact() {
        for d in [random_data(11, 9, 0.3, false), kerr_data(2.0, 0.5, 12).unwrap()] {
            let back = from_json(&to_json(&d), true).unwrap();
            assert_eq!(back, d);
        }
    }

    #[test]
    fn missing_field_is_named() {
        let text = r#"{"version":1,"bandlimit":2,"u":0,
            "angmom_aspect":{"grad":[],"curl":[]},
            "shear":{"electric":[],"magnetic":[]}}"#;
        let e = from_json(text, false).unwrap_err();
        assert!(e.to_string().contains("mass_aspect"), "{e}");
    }

    #[test]
    fn unknown_version_and_fields() {
        let d = random_data(1, 3, 0.1, true);
        let text = to_json(&d).replacen("\"version\": 1", "\"version\": 2", 1);
        assert_eq!(from_json(&text, false).unwrap_err(), Error::UnknownVersion(2));
        let text = to_json(&d).replacen("\"u\"", "\"extra\": 1, \"u\"", 1);
        assert!(matches!(from_json(&text, false), Err(Error::Parse(_))));
    }

    #[test]
    fn low_degree_shear_policy() {
        let text = r#"{"version":1,"bandlimit":3,"u":0,"mass_aspect":[[0,0,1.0]],
            "angmom_aspect":{"grad":[],"curl":[]},
            "shear":{"electric":[[1,-1,0.5],[2,0,1.0]],"magnetic":[]}}"#;
        assert!(matches!(
            from_json(text, true),
            Err(Error::LowDegreeShear { field: "electric", l: 1, mu: -1 })
        ));
        let d = from_json(text, false).unwrap();
        assert_eq!(d.shear().electric().coeffs().get(1, -1), 0.0);
        assert_eq!(d.shear().electric().coeffs().get(2, 0), 1.0);
    }

    #[test]
    fn entries_beyond_band_limit_rejected() {
        let text = r#"{"version":1,"bandlimit":2,"u":0,"mass_aspect":[[3,0,1.0]],
            "angmom_aspect":{"grad":[],"curl":[]},
            "shear":{"electric":[],"magnetic":[]}}"#;
        assert!(matches!(from_json(text, false), Err(Error::BandLimitMismatch(_))));
    }
}
