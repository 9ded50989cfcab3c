//! Algebra input files: parsing, validation, normalization, and digests.
//!
//! Structures are stated as bracket coefficients: each entry contributes
//! `coeff * e_target` to the bracket of the basis pair `(i, j)` with
//! `i < j`. Coefficients are rational strings such as `"3"` or `"-1/2"`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use liemod::catalog::{self, CatalogLabel};
use liemod::coder::{from_structure, Coderivation};
use liemod::scalars::{parse_rational, render_rational, Rational, Scalar};
use liemod::MAX_DIM;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureEntry {
    pub pair: [usize; 2],
    pub target: usize,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub dim: usize,
    pub structure: Vec<StructureEntry>,
}

/// A validated input: the file in normalized form plus the parsed
/// coderivation it denotes.
#[derive(Debug, Clone)]
pub struct ParsedAlgebra {
    pub normalized: AlgebraFile,
    pub body: Coderivation<Rational>,
}

impl AlgebraFile {
    pub fn parse(text: &str) -> Result<ParsedAlgebra, String> {
        let file: AlgebraFile =
            serde_json::from_str(text).map_err(|e| format!("invalid algebra file: {e}"))?;
        file.validate()
    }

    /// Checks ranges and duplicates, then returns the normalized form
    /// (entries sorted, coefficients reduced) with its coderivation.
    pub fn validate(&self) -> Result<ParsedAlgebra, String> {
        if self.dim < 1 || self.dim > MAX_DIM {
            return Err(format!("dim must lie in 1..={MAX_DIM}, got {}", self.dim));
        }
        let mut entries: Vec<(usize, usize, usize, Rational)> = Vec::new();
        for e in &self.structure {
            let [i, j] = e.pair;
            if !(1 <= i && i < j && j <= self.dim) {
                return Err(format!("pair [{i}, {j}] is not increasing within 1..={}", self.dim));
            }
            if e.target < 1 || e.target > self.dim {
                return Err(format!("target {} is outside 1..={}", e.target, self.dim));
            }
            if entries.iter().any(|(a, b, k, _)| (*a, *b, *k) == (i, j, e.target)) {
                return Err(format!("duplicate entry for pair [{i}, {j}] target {}", e.target));
            }
            let coeff = parse_rational(&e.coeff).map_err(|err| err.to_string())?;
            entries.push((i, j, e.target, coeff));
        }
        entries.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
        let normalized = AlgebraFile {
            dim: self.dim,
            structure: entries
                .iter()
                .map(|(i, j, k, c)| StructureEntry {
                    pair: [*i, *j],
                    target: *k,
                    coeff: render_rational(c),
                })
                .collect(),
        };
        let triples: Vec<((usize, usize), usize, Rational)> =
            entries.into_iter().map(|(i, j, k, c)| ((i, j), k, c)).collect();
        let body = from_structure(self.dim, &triples);
        Ok(ParsedAlgebra { normalized, body })
    }

    /// The normalized JSON rendering used for digests and round-trips.
    pub fn serialize(&self) -> String {
        serde_json::to_string(self).expect("algebra files serialize")
    }
}

impl ParsedAlgebra {
    /// Hex SHA-256 of the normalized serialization, so equivalent inputs
    /// share a digest regardless of entry order or coefficient form.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.normalized.serialize().as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// The catalog structure for a label, in the same parsed form as a file.
pub fn from_label(label: &CatalogLabel) -> ParsedAlgebra {
    let d = catalog::codifferential(label).expect("catalog labels are non-degenerate");
    let m = d.matrix();
    let mut structure = Vec::new();
    for j in 1..=m.cols() {
        let word = liemod::exterior::s_index(j, 2, 3).expect("ordinal in range");
        let pair = [word.entries()[0], word.entries()[1]];
        for i in 1..=3usize {
            let c = m.at(i - 1, j - 1);
            if !c.vanishes() {
                structure.push(StructureEntry { pair, target: i, coeff: render_rational(c) });
            }
        }
    }
    AlgebraFile { dim: 3, structure }.validate().expect("catalog structures are valid files")
}
