//! Versioned JSON pattern documents. Every number that carries pattern data
//! is a decimal string so a file written in one precision mode can be read
//! back in that mode without loss.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use circlepat_core::lattice::{MultiIndex, SubIndex};
use circlepat_core::real::{cx, Cx, Precision, Real};
use circlepat_core::{PatternParams, RadiusField, ZField};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const FORMAT: &str = "circlepat-document";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// hexagonal pattern z^c
    Hex,
    /// square-grid slice l = 0 of z^c
    Sg,
    /// Log: dual of the z^2 radii
    Log,
    /// z^2 with a point circle at the origin
    Z2,
    /// square-grid Erf radii e^{nm}
    Erf,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Hex => "hex",
            Mode::Sg => "sg",
            Mode::Log => "log",
            Mode::Z2 => "z2",
            Mode::Erf => "erf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    CrossRatio,
    Radius,
    Reconstructed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocParams {
    pub alpha: [String; 3],
    pub c: String,
    pub precision: String,
    /// taxicab generation of the vertex set
    pub generation: i64,
    /// max-norm generation of the radius labels
    pub radius_generation: i64,
    pub mode: Mode,
}

/// (k, l, m, re, im)
pub type VertexEntry = (i64, i64, i64, String, String);
/// (K, L, M, value)
pub type RadiusEntry = (i64, i64, i64, String);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternDocument {
    pub format: String,
    pub version: u32,
    pub tool_version: String,
    pub params: DocParams,
    pub provenance: Provenance,
    pub vertices: Vec<VertexEntry>,
    pub radii: Vec<RadiusEntry>,
    /// labels with a zero radius or a pole
    pub singular: Vec<[i64; 3]>,
    /// residual summary recorded at generation time
    pub residuals: BTreeMap<String, f64>,
}

/// A document parsed into working-precision fields.
pub struct Typed<R> {
    pub params: PatternParams<R>,
    pub z: Option<ZField<R>>,
    pub radii: Option<RadiusField<R>>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::usage(msg)
}

fn parse<R: Real>(s: &str, what: &str) -> Result<R, CliError> {
    R::parse_decimal(s).ok_or_else(|| bad(format!("malformed number for {what}: {s:?}")))
}

impl PatternDocument {
    pub fn new<R: Real>(
        mode: Mode,
        provenance: Provenance,
        params: &PatternParams<R>,
        z: Option<&ZField<R>>,
        radii: Option<&RadiusField<R>>,
    ) -> Self {
        let vertices = z
            .map(|zf| {
                zf.values
                    .iter()
                    .map(|(p, w)| (p.k, p.l, p.m, w.re.to_decimal(), w.im.to_decimal()))
                    .collect()
            })
            .unwrap_or_default();
        let (radii_list, singular) = radii
            .map(|rf| {
                (
                    rf.values
                        .iter()
                        .map(|(s, v)| (s.k, s.l, s.m, v.to_decimal()))
                        .collect(),
                    rf.singular.iter().map(|s| [s.k, s.l, s.m]).collect(),
                )
            })
            .unwrap_or_default();
        PatternDocument {
            format: FORMAT.into(),
            version: VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            params: DocParams {
                alpha: params.alpha.clone().map(|a| a.to_decimal()),
                c: params.c.to_decimal(),
                precision: R::PRECISION.name().into(),
                generation: z.map(|zf| zf.generation).unwrap_or(0),
                radius_generation: radii.map(|rf| rf.generation).unwrap_or(0),
                mode,
            },
            provenance,
            vertices,
            radii: radii_list,
            singular,
            residuals: BTreeMap::new(),
        }
    }

    pub fn precision(&self) -> Result<Precision, CliError> {
        Precision::parse(&self.params.precision)
            .ok_or_else(|| bad(format!("unknown precision {:?}", self.params.precision)))
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.radii.is_empty()
    }

    pub fn typed<R: Real>(&self) -> Result<Typed<R>, CliError> {
        let [a1, a2, a3] = &self.params.alpha;
        let alpha = [
            parse::<R>(a1, "alpha1")?,
            parse(a2, "alpha2")?,
            parse(a3, "alpha3")?,
        ];
        let c = parse::<R>(&self.params.c, "c")?;
        let params = PatternParams::new(alpha, c).map_err(|e| bad(e.to_string()))?;
        let z = if self.vertices.is_empty() {
            None
        } else {
            let mut values = BTreeMap::new();
            for (k, l, m, re, im) in &self.vertices {
                let p = MultiIndex::new(*k, *l, *m);
                let w: Cx<R> = cx(parse(re, "vertex")?, parse(im, "vertex")?);
                if values.insert(p, w).is_some() {
                    return Err(bad(format!("duplicate vertex {p}")));
                }
            }
            Some(ZField {
                params: params.clone(),
                values,
                generation: self.params.generation,
                overdetermination: 0.0,
            })
        };
        let radii = if self.radii.is_empty() {
            None
        } else {
            let mut values = BTreeMap::new();
            for (k, l, m, v) in &self.radii {
                values.insert(SubIndex::new(*k, *l, *m), parse::<R>(v, "radius")?);
            }
            let singular: BTreeSet<SubIndex> = self
                .singular
                .iter()
                .map(|s| SubIndex::new(s[0], s[1], s[2]))
                .collect();
            Some(RadiusField {
                params: params.clone(),
                values,
                sources: BTreeMap::new(),
                singular,
                generation: self.params.radius_generation,
                normalized: self.params.mode != Mode::Erf,
            })
        };
        Ok(Typed { params, z, radii })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let doc: PatternDocument =
            serde_json::from_str(text).map_err(|e| bad(format!("not a pattern document: {e}")))?;
        if doc.format != FORMAT {
            return Err(bad(format!("unexpected format tag {:?}", doc.format)));
        }
        if doc.version != VERSION {
            return Err(bad(format!("unsupported document version {}", doc.version)));
        }
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json())
            .map_err(|e| bad(format!("cannot write {}: {e}", path.display())))
    }
}
