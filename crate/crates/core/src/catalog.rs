//! Canonical three-dimensional structures and their frozen presentations.
//!
//! Every isomorphism class of a three-dimensional Lie algebra over the
//! rationals is represented here by a named codifferential: the nilpotent
//! `d1`, the diagonal-plus-unipotent `d2`, the rigid simple-type `d3`, the
//! solvable family `d(lambda:mu)` with its three marked points, and the
//! abelian structure. The classifier in [`crate::classify3`] reduces any
//! certified input to one of these targets.
//!
//! Alongside the raw structures the module keeps curated harmonic prebases
//! for the deformation machinery, chosen so miniversal parameters come out
//! in a fixed, human-checked order.

use crate::coder::{Coderivation, Codifferential};
use crate::cohomology::SplittingOverride;
use crate::exterior::MultiIndex;
use crate::linalg::Matrix;
use crate::scalars::{parse_rational, rat, render_rational, Rational};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown catalog label {0:?}")]
    UnknownLabel(String),
    #[error("family point (0:0) is degenerate")]
    DegeneratePoint,
}

/// Names for the canonical structures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CatalogLabel {
    D1,
    D2,
    D3,
    /// Solvable family member `d(lambda:mu)`; the pair is projective, so
    /// proportional pairs give equivalent structures, but the stored matrix
    /// uses the literal values.
    Family { lambda: Rational, mu: Rational },
    Abelian,
}

impl CatalogLabel {
    pub fn family(lambda: Rational, mu: Rational) -> Self {
        CatalogLabel::Family { lambda, mu }
    }

    /// Parses a label as used on the command line: `d1`, `d2`, `d3`,
    /// `abelian`, the marked points `d_1_0`, `d_1_1`, `d_1_m1`, or a
    /// general `d_lambda_mu(p,q)` with rational `p`, `q`.
    pub fn parse(name: &str) -> Result<Self, CatalogError> {
        let trimmed = name.trim();
        match trimmed {
            "d1" => return Ok(CatalogLabel::D1),
            "d2" => return Ok(CatalogLabel::D2),
            "d3" => return Ok(CatalogLabel::D3),
            "abelian" => return Ok(CatalogLabel::Abelian),
            "d_1_0" => return Ok(CatalogLabel::family(rat(1), rat(0))),
            "d_1_1" => return Ok(CatalogLabel::family(rat(1), rat(1))),
            "d_1_m1" => return Ok(CatalogLabel::family(rat(1), rat(-1))),
            _ => {}
        }
        let unknown = || CatalogError::UnknownLabel(name.to_string());
        let inner = trimmed
            .strip_prefix("d_lambda_mu(")
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(unknown)?;
        let (first, second) = inner.split_once(',').ok_or_else(unknown)?;
        let lambda = parse_rational(first.trim()).map_err(|_| unknown())?;
        let mu = parse_rational(second.trim()).map_err(|_| unknown())?;
        if num::Zero::is_zero(&lambda) && num::Zero::is_zero(&mu) {
            return Err(CatalogError::DegeneratePoint);
        }
        Ok(CatalogLabel::family(lambda, mu))
    }

    pub fn name(&self) -> String {
        match self {
            CatalogLabel::D1 => "d1".to_string(),
            CatalogLabel::D2 => "d2".to_string(),
            CatalogLabel::D3 => "d3".to_string(),
            CatalogLabel::Abelian => "abelian".to_string(),
            CatalogLabel::Family { lambda, mu } => {
                if lambda == &rat(1) && mu == &rat(0) {
                    "d_1_0".to_string()
                } else if lambda == &rat(1) && mu == &rat(1) {
                    "d_1_1".to_string()
                } else if lambda == &rat(1) && mu == &rat(-1) {
                    "d_1_m1".to_string()
                } else {
                    format!(
                        "d_lambda_mu({},{})",
                        render_rational(lambda),
                        render_rational(mu)
                    )
                }
            }
        }
    }
}

impl fmt::Display for CatalogLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// The fixed labels shown in overview listings; general family points are
/// constructed on demand.
pub fn standard_labels() -> Vec<CatalogLabel> {
    vec![
        CatalogLabel::D1,
        CatalogLabel::D2,
        CatalogLabel::D3,
        CatalogLabel::family(rat(1), rat(1)),
        CatalogLabel::family(rat(1), rat(0)),
        CatalogLabel::family(rat(1), rat(-1)),
        CatalogLabel::Abelian,
    ]
}

fn grid3(rows: [[Rational; 3]; 3]) -> Coderivation<Rational> {
    let data: Vec<Vec<Rational>> = rows.into_iter().map(|r| r.to_vec()).collect();
    Coderivation::from_grid(3, 2, Matrix::from_rows(data)).expect("3x3 grid is well formed")
}

/// The canonical codifferential for a label. Columns run over the 2-words
/// `(1,2), (1,3), (2,3)`; rows over targets.
pub fn codifferential(label: &CatalogLabel) -> Result<Codifferential<Rational>, CatalogError> {
    let z = rat(0);
    let o = rat(1);
    let body = match label {
        CatalogLabel::D1 => grid3([
            [z.clone(), z.clone(), o.clone()],
            [z.clone(), z.clone(), z.clone()],
            [z.clone(), z.clone(), z.clone()],
        ]),
        CatalogLabel::D2 => grid3([
            [z.clone(), o.clone(), z.clone()],
            [z.clone(), z.clone(), o.clone()],
            [z.clone(), z.clone(), z.clone()],
        ]),
        CatalogLabel::D3 => grid3([
            [z.clone(), z.clone(), o.clone()],
            [z.clone(), o.clone(), z.clone()],
            [o.clone(), z.clone(), z.clone()],
        ]),
        CatalogLabel::Family { lambda, mu } => {
            if num::Zero::is_zero(lambda) && num::Zero::is_zero(mu) {
                return Err(CatalogError::DegeneratePoint);
            }
            grid3([
                [z.clone(), lambda.clone(), o.clone()],
                [z.clone(), z.clone(), mu.clone()],
                [z.clone(), z.clone(), z.clone()],
            ])
        }
        CatalogLabel::Abelian => Coderivation::zero(3, 2),
    };
    Ok(Codifferential::certify(body).expect("canonical structures satisfy the quadratic identity"))
}

fn psi(word: [usize; 2], target: usize) -> Coderivation<Rational> {
    Coderivation::basis(3, 2, &MultiIndex::new(word.to_vec()).unwrap(), target)
}

fn phi(target: usize) -> Coderivation<Rational> {
    Coderivation::basis(3, 3, &MultiIndex::new(vec![1, 2, 3]).unwrap(), target)
}

/// Curated harmonic prebases per label. The degree-2 entries fix the order
/// of deformation parameters; degree-3 entries fix the coordinates used
/// for obstructions. Labels without an entry fall back to computed bases.
pub fn fixture_prebases(label: &CatalogLabel) -> SplittingOverride {
    match label {
        CatalogLabel::D1 => SplittingOverride::none()
            .with(
                2,
                vec![
                    psi([1, 2], 1),
                    psi([1, 2], 3),
                    psi([1, 3], 1),
                    psi([1, 3], 2),
                    psi([1, 3], 3).sub(&psi([1, 2], 2)),
                ],
            )
            .with(3, vec![phi(2), phi(3)]),
        CatalogLabel::D2 => SplittingOverride::none().with(
            2,
            vec![psi([1, 3], 1), psi([1, 3], 2), psi([2, 3], 1)],
        ),
        CatalogLabel::Family { lambda, mu } if lambda == &rat(1) && mu == &rat(-1) => {
            SplittingOverride::none()
                .with(2, vec![psi([1, 3], 1), psi([1, 2], 3)])
                .with(3, vec![phi(3)])
        }
        CatalogLabel::Family { .. } => {
            SplittingOverride::none().with(2, vec![psi([1, 3], 2)])
        }
        CatalogLabel::D3 | CatalogLabel::Abelian => SplittingOverride::none(),
    }
}
