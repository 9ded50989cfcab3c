//! Formal deformations with exact coefficients: the universal infinitesimal
//! deformation, the miniversal deformation together with its base relations,
//! branch analysis at rational parameter points, and the jump/move graph the
//! branches trace out on the moduli space of three-dimensional structures.
//!
//! A deformation perturbs a certified codifferential by quadratic
//! coderivations with polynomial coefficients. Cohomology directions carry
//! independent parameters `t1, t2, ...`; complement directions carry
//! correction coefficients solved order by order. The self-bracket of the
//! deformed structure lives one degree up, and its coordinates along the
//! harmonic part there are the relations cutting out the deformation base.

use std::collections::BTreeMap;

use num::Zero;
use thiserror::Error;

use crate::catalog::{self, CatalogLabel};
use crate::classify3::{classify, CanonicalClass, Classification, FamilyInvariant};
use crate::coder::{bracket, render_linear, Coderivation, Codifferential};
use crate::cohomology::{cohomology_report_with, CohomologyReport, Splitting};
use crate::linalg::{inverse, Matrix};
use crate::scalars::{rat, ratio, MultiPoly, ParamName, PointAssignment, RatFun, Rational, ScalarError};

/// Failure modes of the deformation machinery.
#[derive(Debug, Error)]
pub enum DeformError {
    /// The supplied splitting does not form a basis of the chain module
    /// where the self-bracket lives.
    #[error("splitting does not span the degree-three chain module")]
    SplitNotSpanning,
    /// Correction coefficients kept changing past the requested order.
    #[error("corrections fail to stabilise at truncation degree {0}")]
    TruncationTooSmall(u32),
    /// A branch assignment leaves a base relation alive.
    #[error("assignment violates base relation `{relation}`: residue `{residue}`")]
    RelationViolated { relation: String, residue: String },
    /// A branch denominator vanishes at the sample point.
    #[error("a denominator vanishes at the sample point")]
    DenominatorVanishes,
    /// The sample point leaves a parameter without a value.
    #[error("parameter {0} has no value at the sample point")]
    Unbound(ParamName),
    /// The evaluated structure fails the Jacobi identity.
    #[error("sample point fails the Jacobi identity: {0}")]
    Obstructed(String),
    /// Malformed input (bad label, bad literal).
    #[error("{0}")]
    Invalid(String),
}

impl From<ScalarError> for DeformError {
    fn from(e: ScalarError) -> Self {
        match e {
            ScalarError::DenominatorVanishes => DeformError::DenominatorVanishes,
            ScalarError::UnboundParameter(p) => DeformError::Unbound(p),
            other => DeformError::Invalid(other.to_string()),
        }
    }
}

/// Coefficient on a complement direction: still an unknown, or solved as a
/// polynomial in the cohomology parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum XCoefficient {
    Free(ParamName),
    Solved(MultiPoly),
}

/// A codifferential perturbed by parameterised quadratic coderivations.
///
/// Writing `d` for the base, the full structure is
/// `d + sum_i delta_i t^i + sum_j gamma_j x^j` where the `delta_i` span the
/// second cohomology and the `gamma_j` span a complement of the cocycles.
/// Setting every parameter to zero recovers the base.
#[derive(Debug, Clone)]
pub struct DeformedCodifferential {
    base: Codifferential<Rational>,
    h_terms: Vec<(Coderivation<Rational>, ParamName)>,
    p_terms: Vec<(Coderivation<Rational>, XCoefficient)>,
}

impl DeformedCodifferential {
    pub fn base(&self) -> &Codifferential<Rational> {
        &self.base
    }

    /// Cohomology directions with their parameters, in splitting order.
    pub fn h_terms(&self) -> &[(Coderivation<Rational>, ParamName)] {
        &self.h_terms
    }

    /// Complement directions with their free or solved coefficients.
    pub fn p_terms(&self) -> &[(Coderivation<Rational>, XCoefficient)] {
        &self.p_terms
    }

    /// Every parameter that still needs a value: the cohomology parameters
    /// followed by any unsolved complement coefficients.
    pub fn parameters(&self) -> Vec<ParamName> {
        let mut out: Vec<ParamName> = self.h_terms.iter().map(|(_, p)| *p).collect();
        for (_, x) in &self.p_terms {
            if let XCoefficient::Free(p) = x {
                out.push(*p);
            }
        }
        out
    }

    /// The deformed coderivation with polynomial coefficients.
    pub fn body(&self) -> Coderivation<MultiPoly> {
        let mut acc = self.base.body().map(|c| MultiPoly::constant(c.clone()));
        for (delta, p) in &self.h_terms {
            let var = MultiPoly::var(*p);
            acc = acc.add(&delta.map(|c| var.scale(c)));
        }
        for (gamma, x) in &self.p_terms {
            let coeff = match x {
                XCoefficient::Free(p) => MultiPoly::var(*p),
                XCoefficient::Solved(v) => v.clone(),
            };
            if coeff.is_zero() {
                continue;
            }
            acc = acc.add(&gamma.map(|c| coeff.scale(c)));
        }
        acc
    }

    /// Coefficient matrix of [`Self::body`].
    pub fn matrix(&self) -> Matrix<MultiPoly> {
        self.body().coeffs().clone()
    }

    /// The all-zeroes parameter point.
    pub fn origin(&self) -> PointAssignment {
        self.parameters().into_iter().map(|p| (p, rat(0))).collect()
    }

    /// Entrywise evaluation; no Jacobi check.
    pub fn eval_raw(&self, point: &PointAssignment) -> Result<Coderivation<Rational>, DeformError> {
        Ok(eval_coder(&self.body(), point)?)
    }

    /// Evaluation followed by certification of the Jacobi identity.
    pub fn eval(&self, point: &PointAssignment) -> Result<Codifferential<Rational>, DeformError> {
        let raw = self.eval_raw(point)?;
        Codifferential::certify(raw).map_err(|e| DeformError::Obstructed(e.to_string()))
    }

    pub fn render(&self) -> String {
        render_linear(&self.body())
    }
}

/// Evaluates every polynomial coefficient at a rational point.
pub fn eval_coder(
    c: &Coderivation<MultiPoly>,
    point: &PointAssignment,
) -> Result<Coderivation<Rational>, ScalarError> {
    let polys = c.to_vec();
    let mut values = Vec::with_capacity(polys.len());
    for p in &polys {
        values.push(p.eval(point)?);
    }
    Ok(Coderivation::from_vec(c.dim(), c.arity(), &values))
}

/// The universal infinitesimal deformation: one parameter per cohomology
/// class in degree two, on the report's harmonic representatives.
pub fn infinitesimal(
    d: &Codifferential<Rational>,
    report: &CohomologyReport,
) -> DeformedCodifferential {
    assert_eq!(report.dim, d.dim(), "report belongs to another dimension");
    assert!(report.degrees.len() > 2, "report must cover degree two");
    let h_terms = report
        .degree(2)
        .splitting
        .harmonic
        .iter()
        .enumerate()
        .map(|(i, delta)| (delta.clone(), ParamName::t(i as u32 + 1)))
        .collect();
    DeformedCodifferential { base: d.clone(), h_terms, p_terms: Vec::new() }
}

/// Coordinates of a degree-three coderivation over a splitting of that
/// degree: along the harmonic part, the coboundaries, and the complement.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketCoords {
    pub alpha: Vec<MultiPoly>,
    pub beta: Vec<MultiPoly>,
    pub tau: Vec<MultiPoly>,
}

/// Expresses `xi` in the basis supplied by `split`. The splitting must be a
/// basis of the full chain module of `xi`'s arity.
pub fn bracket_decompose(
    xi: &Coderivation<MultiPoly>,
    split: &Splitting,
) -> Result<BracketCoords, DeformError> {
    let vec = xi.to_vec();
    let n = vec.len();
    let parts = [&split.harmonic, &split.boundaries, &split.complement];
    let mut cols: Vec<Vec<Rational>> = Vec::new();
    for part in parts {
        for c in part.iter() {
            if c.dim() != xi.dim() || c.arity() != xi.arity() {
                return Err(DeformError::SplitNotSpanning);
            }
            cols.push(c.to_vec());
        }
    }
    if cols.len() != n {
        return Err(DeformError::SplitNotSpanning);
    }
    let basis = Matrix::from_cols(cols);
    let binv = inverse(&basis).ok_or(DeformError::SplitNotSpanning)?;
    let mut coords = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = MultiPoly::zero();
        for (j, poly) in vec.iter().enumerate() {
            let w = binv.at(i, j);
            if !w.is_zero() {
                acc = &acc + &poly.scale(w);
            }
        }
        coords.push(acc);
    }
    let rest = coords.split_off(split.harmonic.len());
    let (beta, tau) = {
        let mut rest = rest;
        let tau = rest.split_off(split.boundaries.len());
        (rest, tau)
    };
    Ok(BracketCoords { alpha: coords, beta, tau })
}

/// A miniversal deformation: the deformed structure with every correction
/// coefficient solved, plus the relations generating the base ideal.
#[derive(Debug, Clone)]
pub struct MiniversalResult {
    pub deformation: DeformedCodifferential,
    /// Primitive generators of the relation ideal, in harmonic order, with
    /// the first printed term positive; duplicates and zeroes dropped.
    pub relations: Vec<MultiPoly>,
    /// Harmonic coordinates of the self-bracket exactly as computed.
    pub alpha_coefficients: Vec<MultiPoly>,
    /// True when the self-bracket reduces to the relations without any
    /// truncation.
    pub exact: bool,
    pub truncation_degree: u32,
}

/// Builds the miniversal deformation of `d` over the report's splittings.
///
/// Correction coefficients start at zero and are refined by subtracting half
/// of the coboundary coordinates of the self-bracket, truncated at the
/// requested degree, until those coordinates vanish up to that degree.
pub fn miniversal(
    d: &Codifferential<Rational>,
    report: &CohomologyReport,
    truncation: u32,
) -> Result<MiniversalResult, DeformError> {
    assert!(truncation >= 2, "truncation degree must be at least two");
    assert!(report.degrees.len() > 3, "report must cover degree three");
    let infinitesimal_part = infinitesimal(d, report);
    let gammas = report.degree(2).splitting.complement.clone();
    let split3 = &report.degree(3).splitting;

    let assemble = |xs: &[MultiPoly]| -> DeformedCodifferential {
        DeformedCodifferential {
            base: infinitesimal_part.base.clone(),
            h_terms: infinitesimal_part.h_terms.clone(),
            p_terms: gammas
                .iter()
                .zip(xs)
                .map(|(g, x)| (g.clone(), XCoefficient::Solved(x.clone())))
                .collect(),
        }
    };

    let mut xs = vec![MultiPoly::zero(); gammas.len()];
    let mut settled: Option<(DeformedCodifferential, BracketCoords)> = None;
    for _ in 0..=truncation + 1 {
        let def = assemble(&xs);
        let body = def.body();
        let coords = bracket_decompose(&bracket(&body, &body), split3)?;
        if coords.beta.iter().all(|s| s.truncate(truncation).is_zero()) {
            settled = Some((def, coords));
            break;
        }
        let half = ratio(-1, 2);
        for (x, s) in xs.iter_mut().zip(&coords.beta) {
            *x = (&*x + &s.scale(&half)).truncate(truncation);
        }
    }
    let Some((deformation, coords)) = settled else {
        return Err(DeformError::TruncationTooSmall(truncation));
    };

    let mut relations: Vec<MultiPoly> = Vec::new();
    for r in &coords.alpha {
        if r.is_zero() {
            continue;
        }
        let (prim, _) = r.primitive();
        if !relations.contains(&prim) {
            relations.push(prim);
        }
    }
    // Exactness: the coboundary coordinates vanish identically (not merely
    // up to the truncation degree) and every complement coordinate already
    // sits inside the relation ideal.
    let beta_closed = coords.beta.iter().all(MultiPoly::is_zero);
    let tau_closed = coords
        .tau
        .iter()
        .all(|y| y.is_zero() || relations.iter().any(|r| y.try_div(r).is_some()));
    Ok(MiniversalResult {
        deformation,
        relations,
        alpha_coefficients: coords.alpha,
        exact: beta_closed && tau_closed,
        truncation_degree: truncation,
    })
}

/// Miniversal deformation of a catalog structure over its curated splitting.
pub fn catalog_miniversal(
    label: &CatalogLabel,
    truncation: u32,
) -> Result<MiniversalResult, DeformError> {
    let d = catalog::codifferential(label).map_err(|e| DeformError::Invalid(e.to_string()))?;
    let report = cohomology_report_with(&d, 3, &catalog::fixture_prebases(label))
        .expect("catalog splittings validate");
    miniversal(&d, &report, truncation)
}

/// A solution branch of the base relations: some parameters bound to
/// rational functions of the remaining free ones.
#[derive(Debug, Clone)]
pub struct Branch {
    pub name: String,
    pub assignment: BTreeMap<ParamName, RatFun>,
}

impl Branch {
    pub fn new(
        name: impl Into<String>,
        pairs: impl IntoIterator<Item = (ParamName, RatFun)>,
    ) -> Branch {
        Branch { name: name.into(), assignment: pairs.into_iter().collect() }
    }

    /// The branch that binds nothing (valid when there are no relations).
    pub fn unconstrained(name: impl Into<String>) -> Branch {
        Branch { name: name.into(), assignment: BTreeMap::new() }
    }

    /// Completes a sample of the free parameters to a full parameter point.
    pub fn resolve(
        &self,
        sample: &PointAssignment,
        params: &[ParamName],
    ) -> Result<PointAssignment, DeformError> {
        let mut point = PointAssignment::new();
        for p in params {
            let value = match self.assignment.get(p) {
                Some(rf) => rf.eval(sample)?,
                None => sample.get(p).cloned().ok_or(DeformError::Unbound(*p))?,
            };
            point.insert(*p, value);
        }
        Ok(point)
    }
}

/// Checks that the branch kills every base relation identically.
pub fn validate_branch(mv: &MiniversalResult, branch: &Branch) -> Result<(), DeformError> {
    for r in &mv.relations {
        let image = r.substitute(&branch.assignment);
        if !image.is_zero() {
            return Err(DeformError::RelationViolated {
                relation: r.render_machine(),
                residue: image.render_machine(),
            });
        }
    }
    Ok(())
}

/// One evaluated point on a branch.
#[derive(Debug, Clone)]
pub struct BranchSample {
    /// The values given to the free parameters.
    pub sample: PointAssignment,
    /// The full parameter point after applying the branch assignment.
    pub point: PointAssignment,
    pub classification: Classification,
}

/// Validates the branch, then evaluates and classifies the deformed
/// structure at each sample of the free parameters.
pub fn analyze_branch(
    mv: &MiniversalResult,
    branch: &Branch,
    samples: &[PointAssignment],
) -> Result<Vec<BranchSample>, DeformError> {
    validate_branch(mv, branch)?;
    let params = mv.deformation.parameters();
    let mut out = Vec::with_capacity(samples.len());
    for sample in samples {
        let point = branch.resolve(sample, &params)?;
        let structure = mv.deformation.eval(&point)?;
        out.push(BranchSample {
            sample: sample.clone(),
            point,
            classification: classify(&structure),
        });
    }
    Ok(out)
}

/// The known solution branches of the catalog base relations. Structures
/// without relations get the single unconstrained branch.
pub fn builtin_branches(label: &CatalogLabel) -> Vec<Branch> {
    let t = ParamName::t;
    let zero = RatFun::zero();
    match label {
        CatalogLabel::D1 => {
            let t1 = MultiPoly::var(t(1));
            let t3 = MultiPoly::var(t(3));
            let t4 = MultiPoly::var(t(4));
            let minus_t1_t4 = (&t1 * &t4).scale(&rat(-1));
            let fifth = RatFun::new(minus_t1_t4.clone(), t3.clone()).unwrap();
            let second = RatFun::new(&minus_t1_t4 * &t1, &t3 * &t3).unwrap();
            vec![
                Branch::new("t1=t3=0", [(t(1), zero.clone()), (t(3), zero.clone())]),
                Branch::new(
                    "t3=t4=t5=0",
                    [(t(3), zero.clone()), (t(4), zero.clone()), (t(5), zero)],
                ),
                Branch::new("t5=-t1*t4/t3, t2=-t1^2*t4/t3^2", [(t(5), fifth), (t(2), second)]),
            ]
        }
        CatalogLabel::Family { lambda, mu }
            if !lambda.is_zero() && !mu.is_zero() && (lambda + mu).is_zero() =>
        {
            vec![Branch::new("t1=0", [(t(1), zero.clone())]), Branch::new("t2=0", [(t(2), zero)])]
        }
        _ => vec![Branch::unconstrained("unconstrained")],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeKind {
    /// A single equivalence class.
    Point,
    /// A one-parameter family of classes.
    Family,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GraphNode {
    pub id: String,
    pub kind: NodeKind,
    /// Marked points when the node is a family.
    pub marked: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeKind {
    /// A deformation whose class is constant away from the origin.
    Jump,
    /// Motion along a family: the class varies continuously with the
    /// parameter.
    Move,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GraphEdge {
    pub from: String,
    /// Marked source point when the source is a family.
    pub from_point: Option<String>,
    pub to: String,
    /// Target point annotation when the target is a family.
    pub to_point: Option<String>,
    pub kind: EdgeKind,
}

/// Stratification of the moduli space: which classes deform to which.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuliGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
}

impl ModuliGraph {
    /// Graphviz rendering with stable ordering and quoted identifiers.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph moduli {\n");
        for n in &self.nodes {
            let kind = match n.kind {
                NodeKind::Point => "point",
                NodeKind::Family => "family",
            };
            if n.marked.is_empty() {
                out.push_str(&format!("  \"{}\" [kind=\"{}\"];\n", n.id, kind));
            } else {
                out.push_str(&format!(
                    "  \"{}\" [kind=\"{}\", marked=\"{}\"];\n",
                    n.id,
                    kind,
                    n.marked.join(" ")
                ));
            }
        }
        for e in &self.edges {
            let mut attrs = vec![format!(
                "kind=\"{}\"",
                match e.kind {
                    EdgeKind::Jump => "jump",
                    EdgeKind::Move => "move",
                }
            )];
            if let Some(p) = &e.from_point {
                attrs.push(format!("from=\"{p}\""));
            }
            if let Some(p) = &e.to_point {
                attrs.push(format!("to=\"{p}\""));
            }
            out.push_str(&format!("  \"{}\" -> \"{}\" [{}];\n", e.from, e.to, attrs.join(", ")));
        }
        out.push('}');
        out.push('\n');
        out
    }
}

/// Tag for a family point: a marked point when the invariant singles one
/// out, otherwise `generic`.
fn family_point_tag(inv: &FamilyInvariant) -> String {
    match inv {
        FamilyInvariant::ZeroProduct => "(1:0)".to_string(),
        FamilyInvariant::Kappa(k) if *k == rat(4) => "(1:1)".to_string(),
        FamilyInvariant::Kappa(k) if k.is_zero() => "(1:-1)".to_string(),
        FamilyInvariant::Kappa(_) => "generic".to_string(),
    }
}

fn jump(from: &str, from_point: Option<&str>, to: &str, to_point: Option<&str>) -> GraphEdge {
    GraphEdge {
        from: from.to_string(),
        from_point: from_point.map(str::to_string),
        to: to.to_string(),
        to_point: to_point.map(str::to_string),
        kind: EdgeKind::Jump,
    }
}

fn sample_of(vals: &[(u32, Rational)]) -> PointAssignment {
    vals.iter().map(|(i, v)| (ParamName::t(*i), v.clone())).collect()
}

fn sampled_class(mv: &MiniversalResult, branch: &Branch, vals: &[(u32, Rational)]) -> CanonicalClass {
    let sample = sample_of(vals);
    analyze_branch(mv, branch, std::slice::from_ref(&sample))
        .expect("builtin branch analysis succeeds")
        .pop()
        .unwrap()
        .classification
        .class
}

/// Builds the stratification graph by sampling the builtin branches of the
/// catalog structures. Every edge is backed by an evaluated, classified
/// deformation; the builder panics if a sample stops matching its class,
/// since that would mean the machinery itself has drifted.
pub fn moduli_graph(include_abelian: bool) -> ModuliGraph {
    let mut nodes = vec![
        GraphNode { id: "d1".into(), kind: NodeKind::Point, marked: vec![] },
        GraphNode { id: "d2".into(), kind: NodeKind::Point, marked: vec![] },
        GraphNode { id: "d3".into(), kind: NodeKind::Point, marked: vec![] },
        GraphNode {
            id: "family".into(),
            kind: NodeKind::Family,
            marked: vec!["(1:1)".into(), "(1:0)".into(), "(1:-1)".into()],
        },
    ];
    let mut edges = Vec::new();

    // Out of the doubly-nilpotent structure: one jump per relation branch.
    let mv1 = catalog_miniversal(&CatalogLabel::D1, 4).unwrap();
    let b1 = builtin_branches(&CatalogLabel::D1);
    let c = sampled_class(&mv1, &b1[0], &[(2, rat(0)), (4, rat(0)), (5, rat(1))]);
    assert_eq!(c, CanonicalClass::D3, "first branch reaches the anti-diagonal structure");
    edges.push(jump("d1", None, "d3", None));
    let c = sampled_class(&mv1, &b1[1], &[(1, rat(0)), (2, rat(-1))]);
    assert_eq!(c.family_point().map(family_point_tag).as_deref(), Some("(1:-1)"));
    edges.push(jump("d1", None, "family", Some("(1:-1)")));
    let c = sampled_class(&mv1, &b1[1], &[(1, rat(5)), (2, rat(6))]);
    assert_eq!(c.family_point().map(family_point_tag).as_deref(), Some("generic"));
    edges.push(jump("d1", None, "family", Some("generic")));

    // The solvable structure jumps onto the doubled eigenvalue point.
    let mv2 = catalog_miniversal(&CatalogLabel::D2, 4).unwrap();
    let b2 = builtin_branches(&CatalogLabel::D2);
    let c = sampled_class(&mv2, &b2[0], &[(1, rat(0)), (2, rat(0)), (3, rat(1))]);
    assert_eq!(c.family_point().map(family_point_tag).as_deref(), Some("(1:1)"));
    edges.push(jump("d2", None, "family", Some("(1:1)")));

    // The opposite-eigenvalue point jumps onto the anti-diagonal structure
    // along one branch and moves along the family on the other.
    let marked = CatalogLabel::family(rat(1), rat(-1));
    let mvm = catalog_miniversal(&marked, 4).unwrap();
    let bm = builtin_branches(&marked);
    let c = sampled_class(&mvm, &bm[0], &[(2, rat(1))]);
    assert_eq!(c, CanonicalClass::D3, "the curve through the second parameter jumps");
    edges.push(jump("family", Some("(1:-1)"), "d3", None));
    let c = sampled_class(&mvm, &bm[1], &[(1, rat(1))]);
    assert_eq!(c.family_point().map(family_point_tag).as_deref(), Some("generic"));

    // Generic family points move along the family as well.
    let generic = CatalogLabel::family(rat(2), rat(3));
    let mvg = catalog_miniversal(&generic, 4).unwrap();
    let bg = builtin_branches(&generic);
    let c = sampled_class(&mvg, &bg[0], &[(1, rat(1))]);
    assert_eq!(
        c,
        CanonicalClass::Family(FamilyInvariant::Kappa(rat(5))),
        "the family parameter shifts the invariant"
    );
    edges.push(GraphEdge {
        from: "family".into(),
        from_point: None,
        to: "family".into(),
        to_point: None,
        kind: EdgeKind::Move,
    });

    if include_abelian {
        nodes.push(GraphNode { id: "abelian".into(), kind: NodeKind::Point, marked: vec![] });
        for e in abelian_edges() {
            edges.push(e);
        }
    }

    nodes.sort();
    edges.sort();
    edges.dedup();
    ModuliGraph { nodes, edges }
}

/// Jumps out of the zero structure: every class sits on a line through the
/// origin of its deformation space, because scaling a structure by a
/// nonzero constant never changes its class.
fn abelian_edges() -> Vec<GraphEdge> {
    let mv = catalog_miniversal(&CatalogLabel::Abelian, 4).unwrap();
    assert_eq!(mv.relations.len(), 3, "the zero structure has one relation per chain slot");
    let deltas = mv.deformation.h_terms();
    let basis = Matrix::from_cols(deltas.iter().map(|(d, _)| d.to_vec()).collect());
    let binv = inverse(&basis).expect("degree-two splitting of the zero structure spans");

    let mut out = Vec::new();
    let targets = [
        CatalogLabel::D1,
        CatalogLabel::D2,
        CatalogLabel::D3,
        CatalogLabel::family(rat(2), rat(3)),
    ];
    for target in targets {
        let structure = catalog::codifferential(&target).unwrap();
        let coords = binv.mul_vec(&structure.body().to_vec());
        let lead = coords
            .iter()
            .position(|c| !c.is_zero())
            .expect("a nonzero structure has nonzero coordinates");
        let lead_param = deltas[lead].1;
        let scale = RatFun::var(lead_param);
        let mut assignment = Vec::new();
        for (k, c) in coords.iter().enumerate() {
            if k != lead {
                let slope = RatFun::constant(c / &coords[lead]);
                assignment.push((deltas[k].1, scale.mul(&slope)));
            }
        }
        let branch = Branch::new(format!("toward {target}"), assignment);
        let class = sampled_class(&mv, &branch, &[(lead_param.index, coords[lead].clone())]);
        let expected = classify(&structure).class;
        assert_eq!(class, expected, "the line through {target} lands on its class");
        out.push(jump("abelian", None, class.label(), None));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::standard_labels;
    use crate::coder::jacobi_residual;

    fn c(n: i64) -> MultiPoly {
        MultiPoly::constant(rat(n))
    }

    fn v(i: u32) -> MultiPoly {
        MultiPoly::var(ParamName::t(i))
    }

    fn fixture_report(label: &CatalogLabel) -> (Codifferential<Rational>, CohomologyReport) {
        let d = catalog::codifferential(label).unwrap();
        let report = cohomology_report_with(&d, 3, &catalog::fixture_prebases(label)).unwrap();
        (d, report)
    }

    #[test]
    fn infinitesimal_matrix_opposite_eigenvalue_point() {
        let (d, report) = fixture_report(&CatalogLabel::family(rat(1), rat(-1)));
        let def = infinitesimal(&d, &report);
        let expected = Matrix::from_rows(vec![
            vec![c(0), &c(1) + &v(1), c(1)],
            vec![c(0), c(0), c(-1)],
            vec![v(2), c(0), c(0)],
        ]);
        assert_eq!(def.matrix(), expected);
    }

    #[test]
    fn infinitesimal_matrix_doubly_nilpotent() {
        let (d, report) = fixture_report(&CatalogLabel::D1);
        let def = infinitesimal(&d, &report);
        let expected = Matrix::from_rows(vec![
            vec![v(1), v(3), c(1)],
            vec![v(5).scale(&rat(-1)), v(4), c(0)],
            vec![v(2), v(5), c(0)],
        ]);
        assert_eq!(def.matrix(), expected);
        assert_eq!(def.parameters().len(), 5);
    }

    #[test]
    fn infinitesimal_matrix_solvable() {
        let (d, report) = fixture_report(&CatalogLabel::D2);
        let def = infinitesimal(&d, &report);
        let expected = Matrix::from_rows(vec![
            vec![c(0), &c(1) + &v(1), v(3)],
            vec![c(0), v(2), c(1)],
            vec![c(0), c(0), c(0)],
        ]);
        assert_eq!(def.matrix(), expected);
    }

    #[test]
    fn infinitesimal_matrix_generic_family_point() {
        let (d, report) = fixture_report(&CatalogLabel::family(rat(2), rat(3)));
        let def = infinitesimal(&d, &report);
        let expected = Matrix::from_rows(vec![
            vec![c(0), c(2), c(1)],
            vec![c(0), v(1), c(3)],
            vec![c(0), c(0), c(0)],
        ]);
        assert_eq!(def.matrix(), expected);
    }

    #[test]
    fn origin_recovers_the_base() {
        for label in standard_labels() {
            let (d, report) = fixture_report(&label);
            let def = infinitesimal(&d, &report);
            let at_origin = def.eval_raw(&def.origin()).unwrap();
            assert_eq!(&at_origin, d.body(), "{label}");
        }
    }

    #[test]
    fn bracket_coordinates_opposite_eigenvalue_point() {
        let (d, report) = fixture_report(&CatalogLabel::family(rat(1), rat(-1)));
        let def = infinitesimal(&d, &report);
        let body = def.body();
        let coords = bracket_decompose(&bracket(&body, &body), &report.degree(3).splitting).unwrap();
        let expected = (&v(1) * &v(2)).scale(&rat(-2));
        assert_eq!(coords.alpha, vec![expected]);
        assert!(coords.beta.iter().all(MultiPoly::is_zero));
        assert!(coords.tau.is_empty());
    }

    #[test]
    fn bracket_coordinates_doubly_nilpotent() {
        let (d, report) = fixture_report(&CatalogLabel::D1);
        let def = infinitesimal(&d, &report);
        let body = def.body();
        let coords = bracket_decompose(&bracket(&body, &body), &report.degree(3).splitting).unwrap();
        let first = (&(&v(1) * &v(4)) + &(&v(3) * &v(5))).scale(&rat(2));
        let second = (&(&v(1) * &v(5)) - &(&v(2) * &v(3))).scale(&rat(2));
        assert_eq!(coords.alpha, vec![first, second]);
        assert!(coords.beta.iter().all(MultiPoly::is_zero));
    }

    #[test]
    fn miniversal_relations_opposite_eigenvalue_point() {
        let mv = catalog_miniversal(&CatalogLabel::family(rat(1), rat(-1)), 4).unwrap();
        assert!(mv.exact);
        assert_eq!(mv.relations, vec![&v(1) * &v(2)]);
        assert_eq!(mv.alpha_coefficients, vec![(&v(1) * &v(2)).scale(&rat(-2))]);
        for (_, x) in mv.deformation.p_terms() {
            assert_eq!(x, &XCoefficient::Solved(MultiPoly::zero()));
        }
    }

    #[test]
    fn miniversal_relations_doubly_nilpotent() {
        let mv = catalog_miniversal(&CatalogLabel::D1, 4).unwrap();
        assert!(mv.exact);
        let first = &(&v(1) * &v(4)) + &(&v(3) * &v(5));
        let second = &(&v(1) * &v(5)) - &(&v(2) * &v(3));
        assert_eq!(mv.relations, vec![first, second]);
        // Corrections stay zero, so the full deformation is the
        // infinitesimal one.
        let (d, report) = fixture_report(&CatalogLabel::D1);
        assert_eq!(mv.deformation.matrix(), infinitesimal(&d, &report).matrix());
    }

    #[test]
    fn miniversal_without_relations() {
        for label in [
            CatalogLabel::D2,
            CatalogLabel::D3,
            CatalogLabel::family(rat(2), rat(3)),
            CatalogLabel::family(rat(1), rat(0)),
        ] {
            let mv = catalog_miniversal(&label, 4).unwrap();
            assert!(mv.exact, "{label}");
            assert!(mv.relations.is_empty(), "{label}");
        }
    }

    #[test]
    fn miniversal_of_the_zero_structure() {
        let mv = catalog_miniversal(&CatalogLabel::Abelian, 4).unwrap();
        assert!(mv.exact);
        assert_eq!(mv.deformation.parameters().len(), 9);
        assert_eq!(mv.relations.len(), 3);
        for r in &mv.relations {
            assert_eq!(r.total_degree(), 2);
        }
        // A certified structure's coordinates satisfy all three relations.
        let d1 = catalog::codifferential(&CatalogLabel::D1).unwrap();
        let point: PointAssignment = mv
            .deformation
            .parameters()
            .into_iter()
            .zip(d1.body().to_vec())
            .collect();
        for r in &mv.relations {
            assert!(r.eval(&point).unwrap().is_zero());
        }
    }

    #[test]
    fn builtin_branches_validate() {
        let mv = catalog_miniversal(&CatalogLabel::D1, 4).unwrap();
        for branch in builtin_branches(&CatalogLabel::D1) {
            validate_branch(&mv, &branch).unwrap();
        }
        let mvm = catalog_miniversal(&CatalogLabel::family(rat(1), rat(-1)), 4).unwrap();
        for branch in builtin_branches(&CatalogLabel::family(rat(1), rat(-1))) {
            validate_branch(&mvm, &branch).unwrap();
        }
    }

    #[test]
    fn dependent_curve_needs_the_squared_leading_parameter() {
        // Binding t2 with t4 squared instead of t1 squared leaves the
        // second relation alive on the curve.
        let t = ParamName::t;
        let t1 = MultiPoly::var(t(1));
        let t3 = MultiPoly::var(t(3));
        let t4 = MultiPoly::var(t(4));
        let fifth = RatFun::new((&t1 * &t4).scale(&rat(-1)), t3.clone()).unwrap();
        let wrong = RatFun::new((&t1 * &(&t4 * &t4)).scale(&rat(-1)), &t3 * &t3).unwrap();
        let branch = Branch::new("wrong exponent", [(t(5), fifth), (t(2), wrong)]);
        let mv = catalog_miniversal(&CatalogLabel::D1, 4).unwrap();
        assert!(matches!(
            validate_branch(&mv, &branch),
            Err(DeformError::RelationViolated { .. })
        ));
    }

    #[test]
    fn unconstrained_branch_rejected_when_relations_exist() {
        let mv = catalog_miniversal(&CatalogLabel::D1, 4).unwrap();
        let err = analyze_branch(&mv, &Branch::unconstrained("nope"), &[]).unwrap_err();
        assert!(matches!(err, DeformError::RelationViolated { .. }));
    }

    #[test]
    fn branch_samples_classify() {
        // The curve with the second parameter free jumps onto the
        // anti-diagonal structure; the other one moves along the family.
        let marked = CatalogLabel::family(rat(1), rat(-1));
        let mv = catalog_miniversal(&marked, 4).unwrap();
        let branches = builtin_branches(&marked);
        let out = analyze_branch(&mv, &branches[0], &[sample_of(&[(2, rat(1))])]).unwrap();
        assert_eq!(out[0].classification.class, CanonicalClass::D3);
        let out = analyze_branch(&mv, &branches[1], &[sample_of(&[(1, rat(1))])]).unwrap();
        assert_eq!(
            out[0].classification.class,
            CanonicalClass::Family(FamilyInvariant::Kappa(ratio(-1, 2)))
        );
    }

    #[test]
    fn eigenvalue_pair_from_the_second_branch() {
        let mv = catalog_miniversal(&CatalogLabel::D1, 4).unwrap();
        let branch = &builtin_branches(&CatalogLabel::D1)[1];
        let out = analyze_branch(&mv, branch, &[sample_of(&[(1, rat(5)), (2, rat(6))])]).unwrap();
        assert_eq!(
            out[0].classification.class,
            CanonicalClass::Family(FamilyInvariant::Kappa(ratio(25, 6)))
        );
        assert_eq!(
            out[0].classification.representative_label,
            Some(CatalogLabel::family(rat(3), rat(2)))
        );
    }

    #[test]
    fn family_motion_shifts_the_invariant() {
        let mv = catalog_miniversal(&CatalogLabel::family(rat(2), rat(3)), 4).unwrap();
        let branch = Branch::unconstrained("motion");
        let out = analyze_branch(&mv, &branch, &[sample_of(&[(1, rat(1))])]).unwrap();
        // trace 5, determinant 6 - 1: the invariant becomes 25/5.
        assert_eq!(
            out[0].classification.class,
            CanonicalClass::Family(FamilyInvariant::Kappa(rat(5)))
        );
    }

    #[test]
    fn denominator_vanishing_is_reported() {
        let mv = catalog_miniversal(&CatalogLabel::D1, 4).unwrap();
        let branch = &builtin_branches(&CatalogLabel::D1)[2];
        let bad = sample_of(&[(1, rat(1)), (3, rat(0)), (4, rat(1))]);
        let err = analyze_branch(&mv, branch, &[bad]).unwrap_err();
        assert!(matches!(err, DeformError::DenominatorVanishes));
    }

    #[test]
    fn off_branch_points_obstruct() {
        let (d, report) = fixture_report(&CatalogLabel::family(rat(1), rat(-1)));
        let def = infinitesimal(&d, &report);
        let off = sample_of(&[(1, rat(1)), (2, rat(1))]);
        let raw = def.eval_raw(&off).unwrap();
        assert!(!jacobi_residual(&raw).is_zero());
        assert!(matches!(def.eval(&off), Err(DeformError::Obstructed(_))));
        let on = sample_of(&[(1, rat(0)), (2, rat(1))]);
        assert!(def.eval(&on).is_ok());
    }

    #[test]
    fn moduli_graph_edge_set() {
        let graph = moduli_graph(false);
        let ids: Vec<&str> = graph.nodes.iter().map(|n| n.id.as_str()).collect();
        assert_eq!(ids, vec!["d1", "d2", "d3", "family"]);
        let expected = vec![
            jump("d1", None, "d3", None),
            jump("d1", None, "family", Some("(1:-1)")),
            jump("d1", None, "family", Some("generic")),
            jump("d2", None, "family", Some("(1:1)")),
            GraphEdge {
                from: "family".into(),
                from_point: None,
                to: "family".into(),
                to_point: None,
                kind: EdgeKind::Move,
            },
            jump("family", Some("(1:-1)"), "d3", None),
        ];
        assert_eq!(graph.edges, expected);
        // No route from the doubly-nilpotent structure into the solvable
        // one.
        assert!(!graph.edges.iter().any(|e| e.from == "d1" && e.to == "d2"));
    }

    #[test]
    fn moduli_graph_dot_rendering() {
        let dot = moduli_graph(false).to_dot();
        let expected = "digraph moduli {\n  \"d1\" [kind=\"point\"];\n  \"d2\" [kind=\"point\"];\n  \"d3\" [kind=\"point\"];\n  \"family\" [kind=\"family\", marked=\"(1:1) (1:0) (1:-1)\"];\n  \"d1\" -> \"d3\" [kind=\"jump\"];\n  \"d1\" -> \"family\" [kind=\"jump\", to=\"(1:-1)\"];\n  \"d1\" -> \"family\" [kind=\"jump\", to=\"generic\"];\n  \"d2\" -> \"family\" [kind=\"jump\", to=\"(1:1)\"];\n  \"family\" -> \"family\" [kind=\"move\"];\n  \"family\" -> \"d3\" [kind=\"jump\", from=\"(1:-1)\"];\n}\n";
        assert_eq!(dot, expected);
    }

    #[test]
    fn moduli_graph_with_the_zero_structure() {
        let graph = moduli_graph(true);
        assert_eq!(graph.nodes.len(), 5);
        let from_zero: Vec<&str> = graph
            .edges
            .iter()
            .filter(|e| e.from == "abelian")
            .map(|e| e.to.as_str())
            .collect();
        assert_eq!(from_zero, vec!["d1", "d2", "d3", "family"]);
    }
}
