//! Kochen–Specker basis sets over `C^d` with exact Gaussian-integer entries.
//!
//! A vector is stored as integer numerators together with its squared
//! normalisation, i.e. the ray `entries / sqrt(norm_sq)`. Orthogonality and
//! unit-norm checks are then integer identities and need no tolerance.

use std::fmt;
use std::path::Path;

use num_complex::{Complex, Complex64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUNDLED_PERES: &str = include_str!("../data/peres24.json");

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComplexVector {
    entries: Vec<Complex<i64>>,
    norm_sq: u64,
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex<i64>>, norm_sq: u64) -> Self {
        Self { entries, norm_sq }
    }

    /// Real integer vector normalised by its own length.
    pub fn from_real(entries: &[i64]) -> Self {
        let norm_sq = entries.iter().map(|x| (x * x) as u64).sum();
        Self::new(entries.iter().map(|&x| Complex::new(x, 0)).collect(), norm_sq)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex<i64>] {
        &self.entries
    }

    pub fn norm_sq(&self) -> u64 {
        self.norm_sq
    }

    /// Squared length of the numerator vector.
    pub fn numerator_norm_sq(&self) -> u128 {
        self.entries
            .iter()
            .map(|z| (z.re as i128 * z.re as i128 + z.im as i128 * z.im as i128) as u128)
            .sum()
    }

    pub fn is_unit(&self) -> bool {
        self.numerator_norm_sq() == self.norm_sq as u128
    }

    /// Unnormalised `⟨self|other⟩` over the numerators.
    pub fn inner_numerator(&self, other: &Self) -> Result<Complex<i128>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(Complex::new(0i128, 0i128), |acc, (a, b)| {
                let a = Complex::new(a.re as i128, -(a.im as i128));
                let b = Complex::new(b.re as i128, b.im as i128);
                acc + a * b
            }))
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.entries.iter().map(|z| z.conj()).collect(), self.norm_sq)
    }

    pub fn to_f64(&self) -> Vec<Complex64> {
        let scale = (self.norm_sq as f64).sqrt();
        self.entries
            .iter()
            .map(|z| Complex64::new(z.re as f64 / scale, z.im as f64 / scale))
            .collect()
    }
}

impl fmt::Display for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, z) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match (z.re, z.im) {
                (re, 0) => write!(f, "{re}")?,
                (0, im) => write!(f, "{im}i")?,
                (re, im) => write!(f, "{re}{im:+}i")?,
            }
        }
        write!(f, ")/√{}", self.norm_sq)
    }
}

/// Exact orthogonality test.
pub fn is_orthogonal(v: &ComplexVector, w: &ComplexVector) -> Result<bool> {
    let ip = v.inner_numerator(w)?;
    Ok(ip.re == 0 && ip.im == 0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KsBasisSet {
    label: String,
    d: usize,
    bases: Vec<Vec<ComplexVector>>,
}

impl KsBasisSet {
    /// Checks shape only (q ≥ 1, d ≥ 2, every basis has d vectors of length
    /// d); orthonormality is reported by [`validate_basis_set`].
    pub fn new(label: impl Into<String>, d: usize, bases: Vec<Vec<ComplexVector>>) -> Result<Self> {
        if bases.is_empty() {
            return Err(Error::InvalidBasisSet("q must be at least 1".into()));
        }
        if d < 2 {
            return Err(Error::InvalidBasisSet("d must be at least 2".into()));
        }
        for (m, basis) in bases.iter().enumerate() {
            if basis.len() != d {
                return Err(Error::InvalidBasisSet(format!(
                    "basis {m} has {} vectors, expected {d}",
                    basis.len()
                )));
            }
            if let Some((j, v)) = basis.iter().enumerate().find(|(_, v)| v.dim() != d) {
                return Err(Error::InvalidBasisSet(format!(
                    "vector ({m},{j}) has length {}, expected {d}",
                    v.dim()
                )));
            }
        }
        Ok(Self {
            label: label.into(),
            d,
            bases,
        })
    }

    /// Peres' 24 rays in `C^4`, split into six orthonormal bases.
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_PERES).expect("bundled basis set is well formed")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn q(&self) -> usize {
        self.bases.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn bases(&self) -> &[Vec<ComplexVector>] {
        &self.bases
    }

    pub fn basis(&self, m: usize) -> &[ComplexVector] {
        &self.bases[m]
    }

    pub fn vector(&self, m: usize, j: usize) -> &ComplexVector {
        &self.bases[m][j]
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: KsSetFile = serde_json::from_str(text)?;
        file.into_set()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let file = KsSetFile {
            label: self.label.clone(),
            q: self.q(),
            d: self.d,
            norm_sq: None,
            bases: self
                .bases
                .iter()
                .map(|b| {
                    b.iter()
                        .map(|v| {
                            VectorEntry::Full(VectorFile {
                                entries: v.entries.iter().map(|z| [z.re, z.im]).collect(),
                                norm_sq: Some(v.norm_sq),
                            })
                        })
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("basis set serializes")
    }
}

/// On-disk form. Each vector is either a bare array of `[re, im]` integer
/// numerator pairs (normalised by the set-level `norm_sq`, default 1) or an
/// object `{"entries": [...], "norm_sq": n}` carrying its own normalisation.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KsSetFile {
    #[serde(default)]
    pub label: String,
    pub q: usize,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_sq: Option<u64>,
    pub bases: Vec<Vec<VectorEntry>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VectorEntry {
    Bare(Vec<[i64; 2]>),
    Full(VectorFile),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFile {
    pub entries: Vec<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_sq: Option<u64>,
}

impl KsSetFile {
    pub fn into_set(self) -> Result<KsBasisSet> {
        if self.bases.len() != self.q {
            return Err(Error::InvalidBasisSet(format!(
                "declared q = {} but {} bases given",
                self.q,
                self.bases.len()
            )));
        }
        let common = self.norm_sq.unwrap_or(1);
        if common == 0 {
            return Err(Error::InvalidBasisSet("norm_sq must be positive".into()));
        }
        let mut bases = Vec::with_capacity(self.q);
        for basis in self.bases {
            let mut vectors = Vec::with_capacity(basis.len());
            for v in basis {
                let (entries, norm_sq) = match v {
                    VectorEntry::Bare(entries) => (entries, common),
                    VectorEntry::Full(f) => (f.entries, f.norm_sq.unwrap_or(common)),
                };
                if norm_sq == 0 {
                    return Err(Error::InvalidBasisSet("norm_sq must be positive".into()));
                }
                vectors.push(ComplexVector::new(
                    entries.into_iter().map(|[re, im]| Complex::new(re, im)).collect(),
                    norm_sq,
                ));
            }
            bases.push(vectors);
        }
        KsBasisSet::new(self.label, self.d, bases)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NotUnit {
        j: usize,
        numerator_norm_sq: u128,
        norm_sq: u64,
    },
    NotOrthogonal {
        j: usize,
        k: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotUnit {
                j,
                numerator_norm_sq,
                norm_sq,
            } => write!(f, "vector {j} has squared norm {numerator_norm_sq}/{norm_sq}, not 1"),
            Violation::NotOrthogonal { j, k } => write!(f, "vectors {j} and {k} are not orthogonal"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisCheck {
    pub basis: usize,
    pub passed: bool,
    pub violation: Option<Violation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub bases: Vec<BasisCheck>,
}

impl ValidationReport {
    pub fn first_failure(&self) -> Option<&BasisCheck> {
        self.bases.iter().find(|b| !b.passed)
    }
}

fn check_basis(basis: &[ComplexVector]) -> Option<Violation> {
    for (j, v) in basis.iter().enumerate() {
        if !v.is_unit() {
            return Some(Violation::NotUnit {
                j,
                numerator_norm_sq: v.numerator_norm_sq(),
                norm_sq: v.norm_sq(),
            });
        }
    }
    for j in 0..basis.len() {
        for k in j + 1..basis.len() {
            // lengths were checked when the set was built
            if !is_orthogonal(&basis[j], &basis[k]).unwrap_or(false) {
                return Some(Violation::NotOrthogonal { j, k });
            }
        }
    }
    None
}

/// Per-basis orthonormality report; exact, no tolerance.
pub fn validate_basis_set(set: &KsBasisSet) -> ValidationReport {
    let bases: Vec<BasisCheck> = set
        .bases()
        .iter()
        .enumerate()
        .map(|(m, b)| {
            let violation = check_basis(b);
            BasisCheck {
                basis: m,
                passed: violation.is_none(),
                violation,
            }
        })
        .collect();
    ValidationReport {
        passed: bases.iter().all(|b| b.passed),
        bases,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KsVerdict {
    pub holds: bool,
    pub traversals_checked: u64,
    /// When the property fails: the first traversal (vector index per basis,
    /// lexicographic order) without an orthogonal pair.
    pub witness: Option<Vec<usize>>,
}

/// Dense orthogonality table over the flattened index `m * d + j`.
pub(crate) fn orthogonality_table(set: &KsBasisSet) -> Vec<Vec<bool>> {
    let d = set.d();
    let n = set.q() * d;
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    a != b
                        && is_orthogonal(set.vector(a / d, a % d), set.vector(b / d, b % d)).expect("uniform dimension")
                })
                .collect()
        })
        .collect()
}

fn decode_traversal(mut index: u64, q: usize, d: usize) -> Vec<usize> {
    let mut choice = vec![0; q];
    for slot in choice.iter_mut().rev() {
        *slot = (index % d as u64) as usize;
        index /= d as u64;
    }
    choice
}

/// Scans every traversal picking one vector per basis and reports whether each
/// contains an orthogonal pair. Larger selections contain a traversal, so this
/// is the full Kochen–Specker condition.
pub fn verify_ks_property(set: &KsBasisSet) -> KsVerdict {
    let (q, d) = (set.q(), set.d());
    let table = orthogonality_table(set);
    let total = (d as u64).checked_pow(q as u32).expect("d^q traversals fit in u64");
    let has_orthogonal_pair =
        |choice: &[usize]| (0..q).any(|a| (a + 1..q).any(|b| table[a * d + choice[a]][b * d + choice[b]]));
    let witness = (0..total)
        .into_par_iter()
        .map(|i| decode_traversal(i, q, d))
        .find_first(|choice| !has_orthogonal_pair(choice));
    KsVerdict {
        holds: witness.is_none(),
        traversals_checked: total,
        witness,
    }
}

pub fn conjugate_basis(basis: &[ComplexVector]) -> Vec<ComplexVector> {
    basis.iter().map(ComplexVector::conjugate).collect()
}
