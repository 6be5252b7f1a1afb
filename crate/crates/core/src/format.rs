//! Canonical JSON encodings of complexes, maps, decompositions and verdicts.
//!
//! Matrix entries are `[a, b]` pairs meaning `a + b·r`; a matrix is a list of
//! rows. Field order is fixed so that re-serializing a parsed value is
//! byte-identical.

use serde::{Deserialize, Serialize};

use crate::complex::{ChainComplex, ModuleDescriptor};
use crate::error::{Error, Result};
use crate::lattice::{MinimalPair, Rule, Verdict};
use crate::linalg::Matrix;
use crate::ops::{ChainMap, HomComplex};
use crate::oracle::Extension;
use crate::reduce::Decomposition;
use crate::ring::RingSpec;
use crate::MatrixR;

pub type MatrixRows = Vec<Vec<[u32; 2]>>;

pub fn matrix_rows(m: &MatrixR) -> MatrixRows {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|e| e.pair()).collect())
        .collect()
}

/// Rows of `[a, b]` pairs into a `rows × cols` matrix; the column count comes
/// from the caller because an empty row list carries none.
pub fn matrix_from_rows(spec: RingSpec, rows: usize, cols: usize, data: &MatrixRows) -> Result<MatrixR> {
    if data.len() != rows {
        return Err(Error::Parse(format!("expected {rows} rows, found {}", data.len())));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for (i, row) in data.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Parse(format!(
                "row {i}: expected {cols} entries, found {}",
                row.len()
            )));
        }
        for &[a, b] in row {
            entries.push(
                spec.element(a, b)
                    .map_err(|_| Error::Parse(format!("entry [{a}, {b}] out of range for {spec}")))?,
            );
        }
    }
    Matrix::from_vec(spec, rows, cols, entries)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub ring: RingSpec,
    pub ranks: Vec<usize>,
    pub differentials: Vec<MatrixRows>,
}

impl From<&ChainComplex> for ComplexFile {
    fn from(x: &ChainComplex) -> Self {
        ComplexFile {
            ring: x.ring(),
            ranks: x.ranks().to_vec(),
            differentials: x.diffs().iter().map(matrix_rows).collect(),
        }
    }
}

impl ComplexFile {
    /// Shape and range checks always; `d∘d = 0` unless `force`.
    pub fn into_complex(self, force: bool) -> Result<ChainComplex> {
        let ranks = self.ranks;
        let expected = ranks.len().saturating_sub(1);
        if self.differentials.len() != expected {
            return Err(Error::Parse(format!(
                "{} degrees need {expected} differentials, found {}",
                ranks.len(),
                self.differentials.len()
            )));
        }
        let diffs = self
            .differentials
            .iter()
            .enumerate()
            .map(|(idx, d)| {
                matrix_from_rows(self.ring, ranks[idx], ranks[idx + 1], d)
                    .map_err(|e| Error::Parse(format!("d_{}: {e}", idx + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        if force {
            ChainComplex::from_parts_unchecked(self.ring, ranks, diffs)
        } else {
            ChainComplex::new(self.ring, ranks, diffs)
        }
    }
}

pub fn parse_complex(text: &str, force: bool) -> Result<ChainComplex> {
    let file: ComplexFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_complex(force)
}

pub fn complex_to_string(x: &ChainComplex) -> String {
    serde_json::to_string(&ComplexFile::from(x)).expect("serializable")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainMapFile {
    pub source: ComplexFile,
    pub target: ComplexFile,
    pub mats: Vec<MatrixRows>,
}

impl From<&ChainMap> for ChainMapFile {
    fn from(f: &ChainMap) -> Self {
        ChainMapFile {
            source: f.source().into(),
            target: f.target().into(),
            mats: f.mats().iter().map(matrix_rows).collect(),
        }
    }
}

impl ChainMapFile {
    pub fn into_map(self, force: bool) -> Result<ChainMap> {
        let source = self.source.into_complex(force)?;
        let target = self.target.into_complex(force)?;
        let spec = source.ring();
        let mats = self
            .mats
            .iter()
            .enumerate()
            .map(|(n, m)| {
                matrix_from_rows(spec, target.rank(n), source.rank(n), m)
                    .map_err(|e| Error::Parse(format!("f_{n}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        ChainMap::new(source, target, mats)
    }
}

pub fn parse_chain_map(text: &str, force: bool) -> Result<ChainMap> {
    let file: ChainMapFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_map(force)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionFile {
    /// `[i, j, multiplicity]`
    pub intervals: Vec<[usize; 3]>,
    /// `[n, multiplicity]`
    pub disks: Vec<[usize; 2]>,
}

impl From<&Decomposition> for DecompositionFile {
    fn from(d: &Decomposition) -> Self {
        DecompositionFile {
            intervals: d.interval_counts().into_iter().map(|(iv, m)| [iv.i, iv.j, m]).collect(),
            disks: d.disk_counts().into_iter().map(|(n, m)| [n, m]).collect(),
        }
    }
}

impl From<&DecompositionFile> for Decomposition {
    fn from(f: &DecompositionFile) -> Self {
        let intervals = f
            .intervals
            .iter()
            .flat_map(|&[i, j, m]| std::iter::repeat_n(crate::reduce::Interval::new(i, j), m))
            .collect();
        let disks = f.disks.iter().flat_map(|&[n, m]| std::iter::repeat_n(n, m)).collect();
        Decomposition::new(intervals, disks)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerdictFile {
    pub holds: bool,
    pub rule: Rule,
    pub min_pair_a: Option<[usize; 2]>,
    pub min_pair_x: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_a: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_x: Option<usize>,
}

fn pair(p: Option<MinimalPair>) -> Option<[usize; 2]> {
    p.map(|p| [p.i, p.j])
}

impl From<&Verdict> for VerdictFile {
    fn from(v: &Verdict) -> Self {
        VerdictFile {
            holds: v.holds,
            rule: v.rule,
            min_pair_a: pair(v.min_pair_a),
            min_pair_x: pair(v.min_pair_x),
            beta_a: v.beta_a,
            beta_x: v.beta_x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HomFile {
    pub degree0: ModuleDescriptor,
    pub boundary_image: ModuleDescriptor,
    pub upper: ComplexFile,
    pub full: Option<ComplexFile>,
}

impl From<&HomComplex> for HomFile {
    fn from(h: &HomComplex) -> Self {
        HomFile {
            degree0: h.degree0,
            boundary_image: h.boundary_image,
            upper: (&h.upper).into(),
            full: h.full.as_ref().map(Into::into),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtensionFile {
    pub y: ComplexFile,
    pub inclusion: ChainMapFile,
    pub projection: ChainMapFile,
    pub seed: u64,
}

impl From<&Extension> for ExtensionFile {
    fn from(e: &Extension) -> Self {
        ExtensionFile {
            y: (&e.y).into(),
            inclusion: (&e.inclusion).into(),
            projection: (&e.projection).into(),
            seed: e.seed,
        }
    }
}
