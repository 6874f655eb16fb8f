//! JSON documents for polynomials, matrices, graphs, certificates and run
//! manifests. Exact values travel as canonical strings.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{MatchingUnion, Mode, RamanujanCertificate, Verdict};
use crate::matrix::RatMatrix;
use crate::perm::Permutation;
use crate::poly::RatPoly;
use crate::quad::QuadScalar;
use crate::rational::{decimal15, format_rat, parse_rat, Rat};

pub const FORMAT_VERSION: u32 = 1;

fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!("{what}: {e} (line {}, column {})", e.line(), e.column()))
    })
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyDoc {
    pub coeffs: Vec<String>,
}

impl PolyDoc {
    pub fn from_poly(p: &RatPoly) -> Self {
        Self { coeffs: p.coeffs().iter().map(format_rat).collect() }
    }

    pub fn to_poly(&self) -> Result<RatPoly> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| parse_rat(c).map_err(|e| Error::Parse(format!("coeffs[{i}]: {e}"))))
            .collect::<Result<Vec<Rat>>>()?;
        Ok(RatPoly::from_coeffs(coeffs))
    }
}

pub fn poly_to_json(p: &RatPoly) -> String {
    to_json(&PolyDoc::from_poly(p))
}

pub fn poly_from_json(text: &str) -> Result<RatPoly> {
    parse_json::<PolyDoc>(text, "polynomial")?.to_poly()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub n: usize,
    pub entries: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row_sum: Option<String>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &RatMatrix) -> Self {
        Self {
            n: m.dim(),
            entries: m.entries().iter().map(format_rat).collect(),
            row_sum: m.row_sum_annotation().map(format_rat),
        }
    }

    pub fn to_matrix(&self) -> Result<RatMatrix> {
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, c)| parse_rat(c).map_err(|e| Error::Parse(format!("entries[{i}]: {e}"))))
            .collect::<Result<Vec<Rat>>>()?;
        let m = RatMatrix::from_entries(self.n, entries)?;
        match &self.row_sum {
            None => Ok(m),
            Some(s) => {
                let claimed = parse_rat(s)?;
                let m = m.annotate_row_sum()?;
                if m.row_sum_annotation() != Some(&claimed) {
                    return Err(Error::Contract(format!("rows do not all sum to {claimed}")));
                }
                Ok(m)
            }
        }
    }
}

pub fn matrix_to_json(m: &RatMatrix) -> String {
    to_json(&MatrixDoc::from_matrix(m))
}

pub fn matrix_from_json(text: &str) -> Result<RatMatrix> {
    parse_json::<MatrixDoc>(text, "matrix")?.to_matrix()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub version: u32,
    pub mode: Mode,
    pub d: usize,
    pub m: usize,
    pub perms: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn check_version(v: u32, what: &str) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::Parse(format!(
            "{what} has format version {v}; this build reads version {FORMAT_VERSION}"
        )));
    }
    Ok(())
}

impl GraphDoc {
    pub fn from_graph(g: &MatchingUnion) -> Self {
        Self {
            version: FORMAT_VERSION,
            mode: g.mode,
            d: g.d,
            m: g.m,
            perms: g.perms.iter().map(|p| p.image().to_vec()).collect(),
            seed: g.seed,
        }
    }

    pub fn to_graph(&self) -> Result<MatchingUnion> {
        check_version(self.version, "graph")?;
        let perms = self
            .perms
            .iter()
            .enumerate()
            .map(|(i, p)| {
                Permutation::new(p.clone()).map_err(|e| Error::Parse(format!("perms[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        MatchingUnion::new(self.mode, self.d, self.m, perms, self.seed)
    }
}

pub fn graph_to_json(g: &MatchingUnion) -> String {
    to_json(&GraphDoc::from_graph(g))
}

pub fn graph_from_json(text: &str) -> Result<MatchingUnion> {
    parse_json::<GraphDoc>(text, "graph")?.to_graph()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub version: u32,
    pub mode: Mode,
    pub d: usize,
    pub m: usize,
    pub graph: GraphDoc,
    pub char_poly: PolyDoc,
    pub deflated: PolyDoc,
    pub bound: String,
    pub bound_decimal: String,
    pub interior_count: usize,
    pub boundary_count: usize,
    pub exterior_count: usize,
    pub verdict: Verdict,
}

impl CertificateDoc {
    pub fn from_certificate(c: &RamanujanCertificate) -> Self {
        Self {
            version: FORMAT_VERSION,
            mode: c.mode(),
            d: c.d(),
            m: c.m(),
            graph: GraphDoc::from_graph(&c.graph),
            char_poly: PolyDoc::from_poly(&c.char_poly),
            deflated: PolyDoc::from_poly(&c.deflated),
            bound: c.bound.to_string(),
            bound_decimal: decimal15(c.bound.to_f64()),
            interior_count: c.interior_count,
            boundary_count: c.boundary_count,
            exterior_count: c.exterior_count,
            verdict: c.verdict,
        }
    }

    /// Rebuilds the recorded certificate without recomputing anything; see
    /// [`RamanujanCertificate::reverify`].
    pub fn to_certificate(&self) -> Result<RamanujanCertificate> {
        check_version(self.version, "certificate")?;
        let graph = self.graph.to_graph()?;
        if (graph.mode, graph.d, graph.m) != (self.mode, self.d, self.m) {
            return Err(Error::Parse("certificate header disagrees with its graph".into()));
        }
        Ok(RamanujanCertificate {
            graph,
            char_poly: self.char_poly.to_poly()?,
            deflated: self.deflated.to_poly()?,
            bound: QuadScalar::parse(&self.bound)?,
            interior_count: self.interior_count,
            boundary_count: self.boundary_count,
            exterior_count: self.exterior_count,
            verdict: self.verdict,
        })
    }
}

pub fn certificate_to_json(c: &RamanujanCertificate) -> String {
    to_json(&CertificateDoc::from_certificate(c))
}

pub fn certificate_from_json(text: &str) -> Result<RamanujanCertificate> {
    parse_json::<CertificateDoc>(text, "certificate")?.to_certificate()
}

/// Either kind of document accepted by `certify`.
pub enum GraphOrCertificate {
    Graph(MatchingUnion),
    Certificate(Box<RamanujanCertificate>),
}

pub fn graph_or_certificate_from_json(text: &str) -> Result<GraphOrCertificate> {
    let value: serde_json::Value = parse_json(text, "document")?;
    if value.get("graph").is_some() {
        Ok(GraphOrCertificate::Certificate(Box::new(certificate_from_json(text)?)))
    } else {
        Ok(GraphOrCertificate::Graph(graph_from_json(text)?))
    }
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

/// Ties a run's outputs to its command line, seed and budgets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub seed: Option<u64>,
    pub budgets: BTreeMap<String, u64>,
    pub versions: BTreeMap<String, String>,
    pub elapsed_seconds: f64,
    pub threads: usize,
    pub outputs: Vec<OutputDigest>,
}

impl RunManifest {
    pub fn new(command: Vec<String>) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert("ffc-core".to_string(), env!("CARGO_PKG_VERSION").to_string());
        versions.insert("format".to_string(), FORMAT_VERSION.to_string());
        Self {
            command,
            seed: None,
            budgets: BTreeMap::new(),
            versions,
            elapsed_seconds: 0.0,
            threads: rayon::current_num_threads(),
            outputs: Vec::new(),
        }
    }

    pub fn record(&mut self, path: impl Into<String>, bytes: &[u8]) {
        self.outputs.push(OutputDigest { path: path.into(), sha256: sha256_hex(bytes) });
    }

    pub fn write(&self, path: &PathBuf) -> Result<()> {
        std::fs::write(path, to_json(self))?;
        Ok(())
    }
}
