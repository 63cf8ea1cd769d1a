//! JSON input formats and validation with JSON-pointer diagnostics.

use std::fmt;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::action::{AffineElement, GammaActionData, Relator, Word};
use crate::error::Error;
use crate::hull::{SplitHullData, TGenerator};
use crate::jordan;
use crate::lie::{LieAlgebraJson, NilpotentLieAlgebra};
use crate::matrix::Matrix;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HullJson {
    pub lie_algebra: LieAlgebraJson,
    #[serde(
        rename = "T_generators",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub t_generators: Option<Vec<Matrix>>,
    #[serde(default)]
    pub hol_matrices: Vec<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_labels: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GeneratorJson {
    pub name: String,
    pub translation_matrix: Matrix,
    pub hol_matrix: Matrix,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum RelatorJson {
    Word(String),
    Named {
        #[serde(default)]
        name: Option<String>,
        word: String,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GroupJson {
    pub generators: Vec<GeneratorJson>,
    #[serde(default)]
    pub relators: Vec<RelatorJson>,
    pub hirsch_rank: usize,
    #[serde(default)]
    pub fitting_labels: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BundleJson {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub hull: HullJson,
    pub group: GroupJson,
}

/// A problem located by a JSON pointer into the input document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() {
            "/"
        } else {
            &self.path
        };
        write!(f, "{path}: {}", self.message)
    }
}

/// Parses JSON, reporting the pointer of the first offending value.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T, Diagnostic> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let mut pointer = String::new();
        for seg in e.path().iter() {
            match seg {
                serde_path_to_error::Segment::Seq { index } => {
                    pointer.push_str(&format!("/{index}"))
                }
                serde_path_to_error::Segment::Map { key } => {
                    pointer.push('/');
                    pointer.push_str(&key.replace('~', "~0").replace('/', "~1"));
                }
                serde_path_to_error::Segment::Enum { variant } => {
                    pointer.push_str(&format!("/{variant}"))
                }
                serde_path_to_error::Segment::Unknown => pointer.push_str("/?"),
            }
        }
        Diagnostic::new(pointer, e.into_inner().to_string())
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn default_t_labels(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("t{i}")).collect()
}

fn pred_message(e: &Error) -> String {
    match e {
        Error::NotSemisimple => "not semisimple".into(),
        Error::NotUnipotent => "not unipotent".into(),
        other => other.to_string(),
    }
}

/// Builds the split hull, collecting every violation found.
pub fn load_hull(h: &HullJson, base: &str) -> Result<SplitHullData, Vec<Diagnostic>> {
    let alg = NilpotentLieAlgebra::from_json(&h.lie_algebra).map_err(|e| {
        vec![Diagnostic::new(
            format!("{base}/lie_algebra"),
            e.to_string(),
        )]
    })?;
    let k = h.hol_matrices.len();
    let labels = h.t_labels.clone().unwrap_or_else(|| default_t_labels(k));
    let mut diags = Vec::new();
    if labels.len() != k {
        diags.push(Diagnostic::new(
            format!("{base}/t_labels"),
            format!("{} labels for {k} hol matrices", labels.len()),
        ));
    }
    if let Some(ts) = &h.t_generators {
        if ts.len() != k {
            diags.push(Diagnostic::new(
                format!("{base}/T_generators"),
                format!("{} T generators for {k} hol matrices", ts.len()),
            ));
        }
        for (i, t) in ts.iter().enumerate() {
            match jordan::is_semisimple(t) {
                Ok(true) => {}
                Ok(false) => diags.push(Diagnostic::new(
                    format!("{base}/T_generators/{i}"),
                    "not semisimple",
                )),
                Err(e) => diags.push(Diagnostic::new(
                    format!("{base}/T_generators/{i}"),
                    e.to_string(),
                )),
            }
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let mut gens = Vec::with_capacity(k);
    for (i, hol) in h.hol_matrices.iter().enumerate() {
        let t = TGenerator {
            label: labels[i].clone(),
            ambient: h.t_generators.as_ref().map(|ts| ts[i].clone()),
            hol: hol.clone(),
        };
        if let Err(e) = SplitHullData::check_generator(&alg, &t) {
            let path = match (&e, &t.ambient) {
                (Error::NotNormalizing(_) | Error::HolMismatch(_), _) => {
                    format!("{base}/T_generators/{i}")
                }
                (Error::NotSemisimple, Some(m)) if !jordan::is_semisimple(m).unwrap_or(false) => {
                    format!("{base}/T_generators/{i}")
                }
                _ => format!("{base}/hol_matrices/{i}"),
            };
            diags.push(Diagnostic::new(path, pred_message(&e)));
        }
        gens.push(t);
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    SplitHullData::new(alg, gens).map_err(|e| vec![Diagnostic::new(base, e.to_string())])
}

/// Builds the group action over a validated algebra, collecting every violation found.
pub fn load_group(
    g: &GroupJson,
    alg: &NilpotentLieAlgebra,
    base: &str,
) -> Result<GammaActionData, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut gens = Vec::new();
    for (i, gen) in g.generators.iter().enumerate() {
        let p = format!("{base}/generators/{i}");
        match jordan::is_unipotent(&gen.translation_matrix) {
            Ok(true) => {
                if let Err(e) = alg.log_coords(&gen.translation_matrix) {
                    diags.push(Diagnostic::new(
                        format!("{p}/translation_matrix"),
                        e.to_string(),
                    ));
                }
            }
            Ok(false) => diags.push(Diagnostic::new(
                format!("{p}/translation_matrix"),
                "not unipotent",
            )),
            Err(e) => diags.push(Diagnostic::new(
                format!("{p}/translation_matrix"),
                e.to_string(),
            )),
        }
        if let Err(e) = alg.check_automorphism(&gen.hol_matrix) {
            diags.push(Diagnostic::new(format!("{p}/hol_matrix"), e.to_string()));
        }
        gens.push((
            gen.name.clone(),
            AffineElement {
                translation: gen.translation_matrix.clone(),
                automorphism: gen.hol_matrix.clone(),
            },
        ));
    }
    let names: Vec<String> = gens.iter().map(|(n, _)| n.clone()).collect();
    for (i, l) in g.fitting_labels.iter().enumerate() {
        if !names.contains(l) {
            diags.push(Diagnostic::new(
                format!("{base}/fitting_labels/{i}"),
                format!("unknown generator `{l}`"),
            ));
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let relators: Vec<Relator> = g
        .relators
        .iter()
        .enumerate()
        .map(|(i, r)| match r {
            RelatorJson::Word(w) => Relator {
                name: format!("r{}", i + 1),
                word: w.clone(),
            },
            RelatorJson::Named { name, word } => Relator {
                name: name.clone().unwrap_or_else(|| format!("r{}", i + 1)),
                word: word.clone(),
            },
        })
        .collect();
    let data = GammaActionData::new(
        alg.clone(),
        gens,
        vec![],
        g.hirsch_rank,
        g.fitting_labels.clone(),
    )
    .map_err(|e| vec![Diagnostic::new(format!("{base}/generators"), e.to_string())])?;
    for (i, r) in relators.iter().enumerate() {
        let p = format!("{base}/relators/{i}");
        match Word::parse(&r.word, &names).and_then(|w| data.eval(&w)) {
            Ok(e) if e.is_identity() => {}
            Ok(_) => diags.push(Diagnostic::new(
                p,
                format!("relator {} evaluates to non-identity", r.name),
            )),
            Err(e) => diags.push(Diagnostic::new(p, e.to_string())),
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let gens: Vec<(String, AffineElement)> = names
        .into_iter()
        .zip(data.generators().iter().cloned())
        .collect();
    GammaActionData::new(
        alg.clone(),
        gens,
        relators,
        g.hirsch_rank,
        g.fitting_labels.clone(),
    )
    .map_err(|e| vec![Diagnostic::new(base, e.to_string())])
}

/// A validated bundle.
#[derive(Clone, Debug)]
pub struct Bundle {
    pub name: String,
    pub description: Option<String>,
    pub sha256: String,
    pub hull: SplitHullData,
    pub group: GammaActionData,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LoadError {
    /// Not valid JSON for the schema.
    Malformed(Diagnostic),
    /// Well-formed but violating an invariant.
    Invalid(Vec<Diagnostic>),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Malformed(d) => write!(f, "malformed input at {d}"),
            LoadError::Invalid(ds) => {
                let lines: Vec<String> = ds.iter().map(ToString::to_string).collect();
                write!(f, "{}", lines.join("\n"))
            }
        }
    }
}

impl std::error::Error for LoadError {}

pub fn load_bundle(text: &str) -> Result<Bundle, LoadError> {
    let b: BundleJson = parse_json(text).map_err(LoadError::Malformed)?;
    bundle_from_json(&b, sha256_hex(text.as_bytes()))
}

pub fn bundle_from_json(b: &BundleJson, sha256: String) -> Result<Bundle, LoadError> {
    let hull = load_hull(&b.hull, "/hull").map_err(LoadError::Invalid)?;
    let group = load_group(&b.group, hull.algebra(), "/group").map_err(LoadError::Invalid)?;
    Ok(Bundle {
        name: b.name.clone(),
        description: b.description.clone(),
        sha256,
        hull,
        group,
    })
}

/// All diagnostics for a bundle document; empty when it is valid.
pub fn validate(text: &str) -> Vec<Diagnostic> {
    match load_bundle(text) {
        Ok(_) => Vec::new(),
        Err(LoadError::Malformed(d)) => vec![d],
        Err(LoadError::Invalid(ds)) => ds,
    }
}

/// Accepts either a hull document or a full bundle.
pub fn load_hull_document(text: &str) -> Result<SplitHullData, LoadError> {
    let value: serde_json::Value = parse_json(text).map_err(LoadError::Malformed)?;
    if value.get("hull").is_some() {
        let b: BundleJson = parse_json(text).map_err(LoadError::Malformed)?;
        return load_hull(&b.hull, "/hull").map_err(LoadError::Invalid);
    }
    let h: HullJson = parse_json(text).map_err(LoadError::Malformed)?;
    load_hull(&h, "").map_err(LoadError::Invalid)
}

/// Accepts either a group document or a full bundle.
pub fn load_group_document(
    text: &str,
    alg: &NilpotentLieAlgebra,
) -> Result<GammaActionData, LoadError> {
    let value: serde_json::Value = parse_json(text).map_err(LoadError::Malformed)?;
    if value.get("group").is_some() {
        let b: BundleJson = parse_json(text).map_err(LoadError::Malformed)?;
        return load_group(&b.group, alg, "/group").map_err(LoadError::Invalid);
    }
    let g: GroupJson = parse_json(text).map_err(LoadError::Malformed)?;
    load_group(&g, alg, "").map_err(LoadError::Invalid)
}
