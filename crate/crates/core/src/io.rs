//! Map files and deterministic JSON output.
//!
//! A map file is a JSON object
//!
//! ```json
//! {"dim": 1, "alpha": [0.6180339887], "domain_radius": 0.5,
//!  "coeffs": [[{"n": [0], "re": 0.5, "im": 0}]]}
//! ```
//!
//! where `coeffs[k]` lists the Fourier terms of `c_{k+1}`. An optional
//! `"offset"` key holds `c_0` in the same form. Unknown keys are rejected.

use crate::error::{Error, Result};
use crate::fibered::FiberedMap;
use crate::trig::TrigPoly;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub dim: usize,
    pub alpha: Vec<f64>,
    pub domain_radius: f64,
    pub coeffs: Vec<TrigPoly>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<TrigPoly>,
}

impl MapFile {
    pub fn from_map(map: &FiberedMap) -> Self {
        MapFile {
            dim: map.dim(),
            alpha: map.alpha().to_vec(),
            domain_radius: map.domain_radius(),
            coeffs: map.coeffs().to_vec(),
            offset: map.offset().cloned(),
        }
    }

    /// Checks the shape against `dim` and builds the certified map.
    pub fn into_map(self) -> Result<FiberedMap> {
        let schema = |path: String, message: String| Error::Schema { path, message };
        if self.dim == 0 {
            return Err(schema("dim".into(), "must be at least 1".into()));
        }
        if self.alpha.len() != self.dim {
            return Err(schema(
                "alpha".into(),
                format!("expected {} components, found {}", self.dim, self.alpha.len()),
            ));
        }
        if self.coeffs.is_empty() {
            return Err(schema("coeffs".into(), "the linear coefficient is required".into()));
        }
        let dim = self.dim;
        let coeffs = self
            .coeffs
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.with_dim(dim).map_err(|e| schema(format!("coeffs[{i}]"), e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let offset = self
            .offset
            .map(|c| c.with_dim(dim).map_err(|e| schema("offset".into(), e.to_string())))
            .transpose()?;
        FiberedMap::with_offset(self.alpha, offset, coeffs, self.domain_radius)
    }
}

/// Parses and validates a map given as JSON text.
pub fn parse_map_str(text: &str) -> Result<FiberedMap> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: MapFile = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    file.into_map()
}

pub fn parse_map_file(path: &Path) -> Result<FiberedMap> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_map_str(&text)
}

pub fn map_to_json(map: &FiberedMap) -> Result<String> {
    to_json(&MapFile::from_map(map))
}

/// Pretty JSON with every float written to 17 significant digits, so equal
/// values always produce identical bytes and parse back exactly.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats::default());
    value
        .serialize(&mut ser)
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

#[derive(Default)]
struct FixedFloats {
    pretty: serde_json::ser::PrettyFormatter<'static>,
}

fn write_float<W: ?Sized + Write>(w: &mut W, v: f64) -> std::io::Result<()> {
    if v == 0.0 {
        // -0 and 0 compare equal, so they print the same
        w.write_all(b"0.0000000000000000e0")
    } else if v.is_finite() {
        write!(w, "{v:.16e}")
    } else {
        w.write_all(b"null")
    }
}

impl serde_json::ser::Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> std::io::Result<()> {
        write_float(w, v)
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> std::io::Result<()> {
        write_float(w, v as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.pretty.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.pretty.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.end_object_value(w)
    }
}
