//! Adjoint cohomology of a certified quadratic codifferential.
//!
//! The coboundary operator in degree `k` is `D_k = [d, -]` from arity-`k`
//! coderivations to arity-`k+1` ones; its matrix uses the column-major slot
//! order of [`Coderivation::to_vec`]. Degree 0 identifies coderivations
//! with vectors of the underlying space, and `D_0` sends a vector to the
//! adjoint map bracketing with it, so degree-1 cohomology is outer
//! derivations and degree-2 classifies infinitesimal deformations.
//!
//! Each degree also carries a splitting of the chain module into harmonic
//! representatives, boundaries and a complement mapping isomorphically onto
//! the next boundaries. The harmonic prebasis can be overridden (after
//! validation) to pin reports to a preferred presentation.

use crate::coder::{bracket, Coderivation, Codifferential};
use crate::exterior::binomial;
use crate::linalg::{echelon, nullspace, Matrix, SpanBuilder};
use crate::scalars::{rat, Rational};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("maximum degree {got} exceeds the dimension {dim}")]
    DegreeOutOfRange { got: usize, dim: usize },
    #[error("harmonic prebasis override at degree {degree} is invalid: {reason}")]
    BadOverride { degree: usize, reason: String },
}

/// Matrix of `[d, -]` out of arity-`k` coderivations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoboundaryMatrix {
    pub degree: usize,
    pub matrix: Matrix<Rational>,
}

/// Builds the coboundary matrix in degree `k`: shape
/// `N*C(N,k+1) x N*C(N,k)`, column `(j-1)*N + i` holding the bracket of
/// `d` with the basis coderivation at word ordinal `j`, target `i`.
pub fn coboundary_matrix(d: &Codifferential<Rational>, k: usize) -> CoboundaryMatrix {
    let dim = d.dim();
    let cols = dim * binomial(dim, k);
    let rows = dim * binomial(dim, k + 1);
    let mut matrix = Matrix::zero(rows, cols);
    for j in 1..=binomial(dim, k) {
        let word = crate::exterior::s_index(j, k, dim).expect("ordinal in range");
        for i in 1..=dim {
            let basis = Coderivation::basis(dim, k, &word, i);
            let image = bracket(d.body(), &basis).to_vec();
            let col = (j - 1) * dim + (i - 1);
            for (row, v) in image.into_iter().enumerate() {
                matrix.set(row, col, v);
            }
        }
    }
    CoboundaryMatrix { degree: k, matrix }
}

/// Splitting of the arity-`k` coderivations adapted to the coboundary
/// operators on both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splitting {
    /// Cocycles spanning a complement of the boundaries inside the kernel;
    /// their classes form a basis of the cohomology in this degree.
    pub harmonic: Vec<Coderivation<Rational>>,
    /// Basis of the boundaries: images of the previous complement, i.e. the
    /// pivot columns of the incoming coboundary matrix, in pivot order.
    pub boundaries: Vec<Coderivation<Rational>>,
    /// Standard basis coderivations at the pivot columns of the outgoing
    /// coboundary matrix; the operator is injective on their span with
    /// image the next degree's boundaries.
    pub complement: Vec<Coderivation<Rational>>,
}

/// Per-degree dimensions plus the splitting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeReport {
    pub degree: usize,
    /// Dimension of the chain module of arity-`degree` coderivations.
    pub dim_chains: usize,
    /// Rank of the outgoing coboundary.
    pub rank_out: usize,
    /// Rank of the incoming coboundary.
    pub rank_in: usize,
    pub dim_cocycles: usize,
    pub dim_cohomology: usize,
    pub splitting: Splitting,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyReport {
    pub dim: usize,
    /// Reports for degrees `0..=max_degree`, in order.
    pub degrees: Vec<DegreeReport>,
}

impl CohomologyReport {
    pub fn degree(&self, k: usize) -> &DegreeReport {
        &self.degrees[k]
    }

    /// The `(dim H^1, dim H^2, dim H^3)` triple, the headline row for
    /// three-dimensional structures.
    pub fn h123(&self) -> (usize, usize, usize) {
        (
            self.degree(1).dim_cohomology,
            self.degree(2).dim_cohomology,
            self.degree(3).dim_cohomology,
        )
    }
}

/// Replacement harmonic prebases keyed by degree. Entries are validated
/// against the computed cohomology before use.
#[derive(Debug, Clone, Default)]
pub struct SplittingOverride {
    pub prebases: BTreeMap<usize, Vec<Coderivation<Rational>>>,
}

impl SplittingOverride {
    pub fn none() -> Self {
        SplittingOverride::default()
    }

    pub fn with(mut self, degree: usize, prebasis: Vec<Coderivation<Rational>>) -> Self {
        self.prebases.insert(degree, prebasis);
        self
    }
}

/// Computes dimensions and splittings for degrees `0..=max_degree`.
pub fn cohomology_report(
    d: &Codifferential<Rational>,
    max_degree: usize,
) -> Result<CohomologyReport, CohomologyError> {
    cohomology_report_with(d, max_degree, &SplittingOverride::none())
}

/// As [`cohomology_report`], with harmonic prebases overridden in the
/// given degrees.
pub fn cohomology_report_with(
    d: &Codifferential<Rational>,
    max_degree: usize,
    overrides: &SplittingOverride,
) -> Result<CohomologyReport, CohomologyError> {
    let dim = d.dim();
    if max_degree > dim {
        return Err(CohomologyError::DegreeOutOfRange { got: max_degree, dim });
    }
    let matrices: Vec<CoboundaryMatrix> =
        (0..=max_degree).map(|k| coboundary_matrix(d, k)).collect();
    let echelons: Vec<_> = matrices.iter().map(|cb| echelon(&cb.matrix)).collect();

    let mut degrees = Vec::with_capacity(max_degree + 1);
    for k in 0..=max_degree {
        let dim_chains = dim * binomial(dim, k);
        let rank_out = echelons[k].rank;
        let rank_in = if k == 0 { 0 } else { echelons[k - 1].rank };
        let dim_cocycles = dim_chains - rank_out;
        let dim_cohomology = dim_cocycles - rank_in;

        let boundaries: Vec<Coderivation<Rational>> = if k == 0 {
            Vec::new()
        } else {
            echelons[k - 1]
                .pivots
                .iter()
                .map(|&p| Coderivation::from_vec(dim, k, &matrices[k - 1].matrix.col(p)))
                .collect()
        };
        let complement: Vec<Coderivation<Rational>> = echelons[k]
            .pivots
            .iter()
            .map(|&p| {
                let mut unit = vec![rat(0); dim_chains];
                unit[p] = rat(1);
                Coderivation::from_vec(dim, k, &unit)
            })
            .collect();

        let harmonic = match overrides.prebases.get(&k) {
            Some(prebasis) => validated_override(
                k,
                prebasis,
                &matrices[k].matrix,
                &boundaries,
                dim_cohomology,
                dim,
            )?,
            None => {
                let mut span = SpanBuilder::new();
                for b in &boundaries {
                    let fresh = span.try_insert(&rationals_of(b));
                    debug_assert!(fresh, "boundary basis must be independent");
                }
                let mut harmonic = Vec::new();
                for ns in nullspace(&matrices[k].matrix) {
                    if span.try_insert(&ns) {
                        harmonic.push(Coderivation::from_vec(dim, k, &ns));
                    }
                }
                harmonic
            }
        };
        debug_assert_eq!(harmonic.len(), dim_cohomology, "harmonic count at degree {k}");

        degrees.push(DegreeReport {
            degree: k,
            dim_chains,
            rank_out,
            rank_in,
            dim_cocycles,
            dim_cohomology,
            splitting: Splitting { harmonic, boundaries, complement },
        });
    }
    Ok(CohomologyReport { dim, degrees })
}

fn rationals_of(c: &Coderivation<Rational>) -> Vec<Rational> {
    c.to_vec()
}

fn validated_override(
    degree: usize,
    prebasis: &[Coderivation<Rational>],
    coboundary: &Matrix<Rational>,
    boundaries: &[Coderivation<Rational>],
    dim_cohomology: usize,
    dim: usize,
) -> Result<Vec<Coderivation<Rational>>, CohomologyError> {
    let fail = |reason: &str| CohomologyError::BadOverride {
        degree,
        reason: reason.to_string(),
    };
    if prebasis.len() != dim_cohomology {
        return Err(fail(&format!(
            "expected {dim_cohomology} elements, got {}",
            prebasis.len()
        )));
    }
    let mut span = SpanBuilder::new();
    for b in boundaries {
        span.try_insert(&rationals_of(b));
    }
    for c in prebasis {
        if c.dim() != dim || c.arity() != degree {
            return Err(fail("element has wrong dimension or arity"));
        }
        let vec = rationals_of(c);
        let image = coboundary.mul_vec(&vec);
        if image.iter().any(|v| !num::Zero::is_zero(v)) {
            return Err(fail("element is not a cocycle"));
        }
        if !span.try_insert(&vec) {
            return Err(fail("elements are dependent modulo boundaries"));
        }
    }
    Ok(prebasis.to_vec())
}
