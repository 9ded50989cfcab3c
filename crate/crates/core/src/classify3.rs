//! Equivalence of quadratic codifferentials under basis change, and the
//! constructive classification in dimension three.
//!
//! A basis change `g` acts on a structure matrix `A` by `A' = G^{-1} A Q`
//! where `Q` is the induced map on 2-vectors; `verify_equiv` checks the
//! cleared form `G A' = A Q`. The convention is pinned by the worked
//! examples in the tests: `Diag(t,1,t)` rescales a family structure to
//! `d(t*lambda : t*mu)`, and the basis swap `[[0,-1,0],[1,0,0],[0,0,1]]`
//! exchanges the two family slots with a sign.
//!
//! `classify` reduces any certified three-dimensional structure to a
//! catalog representative with an explicit rational witness. The dispatch
//! runs on the rank of `A` (the dimension of the derived subalgebra):
//! rank 0 is abelian; rank 3 reduces through a normal form built from a
//! cyclic vector; rank 1 or 2 passes through a two-dimensional abelian
//! ideal and classifies the induced 2x2 action up to similarity and a
//! scalar. Everything stays inside the rationals: when a reduction would
//! demand an irrational square root, the class is still identified by its
//! invariant, and the witness maps onto an explicitly stored rational
//! representative instead of the catalog matrix.

use crate::catalog::{self, CatalogError, CatalogLabel};
use crate::coder::{Coderivation, Codifferential};
use crate::exterior::{binomial, s_index};
use crate::linalg::{echelon, inverse, nullspace, rank, Matrix, SpanBuilder};
use crate::scalars::{rat, rational_sqrt, FieldScalar, Rational, Scalar};
use num::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("basis-change matrix is singular")]
    Singular,
    #[error("family point (0:0) is degenerate")]
    BothZero,
}

/// Second exterior power of `g`: the `C(N,2) x C(N,2)` matrix whose
/// column at a source 2-word holds the coordinates of the wedge of the
/// corresponding column pair of `g`.
pub fn induced_q<S: FieldScalar>(g: &Matrix<S>) -> Result<Matrix<S>, ClassifyError> {
    if g.det().vanishes() {
        return Err(ClassifyError::Singular);
    }
    Ok(lambda2(g))
}

fn lambda2<S: Scalar>(g: &Matrix<S>) -> Matrix<S> {
    let n = g.rows();
    assert_eq!(n, g.cols(), "basis change must be square");
    let m = binomial(n, 2);
    Matrix::from_fn(m, m, |i, j| {
        let target = s_index(i + 1, 2, n).expect("row ordinal in range");
        let source = s_index(j + 1, 2, n).expect("column ordinal in range");
        let (k, l) = (target.entries()[0] - 1, target.entries()[1] - 1);
        let (u, v) = (source.entries()[0] - 1, source.entries()[1] - 1);
        g.at(k, u)
            .mul(g.at(l, v))
            .sub(&g.at(l, u).mul(g.at(k, v)))
    })
}

/// Pulls a certified structure through a basis change: `A' = G^{-1} A Q`.
pub fn transport<S: FieldScalar>(
    d: &Codifferential<S>,
    g: &Matrix<S>,
) -> Result<Codifferential<S>, ClassifyError> {
    let n = d.dim();
    assert_eq!((g.rows(), g.cols()), (n, n), "basis change shape disagrees");
    let ginv = g.inverse_field().ok_or(ClassifyError::Singular)?;
    let moved = ginv.mul(&d.matrix().mul(&lambda2(g)));
    let body = Coderivation::from_grid(n, 2, moved).expect("transport preserves the grid shape");
    Ok(Codifferential::certify(body).expect("transport preserves the quadratic identity"))
}

/// True when `g` carries the first structure onto the second, i.e.
/// `G A' = A Q` exactly with invertible `g`. A singular `g` yields false.
pub fn verify_equiv<S: FieldScalar>(
    d: &Codifferential<S>,
    d_prime: &Codifferential<S>,
    g: &Matrix<S>,
) -> bool {
    let n = d.dim();
    if d_prime.dim() != n || g.rows() != n || g.cols() != n {
        return false;
    }
    if g.det().vanishes() {
        return false;
    }
    g.mul(d_prime.matrix()) == d.matrix().mul(&lambda2(g))
}

/// Complete invariant of a family point `(lambda : mu)` under swapping
/// the slots and rescaling both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyInvariant {
    /// The orbit with `lambda * mu = 0`, the point `(1:0)`.
    ZeroProduct,
    /// `kappa = (lambda + mu)^2 / (lambda * mu)` otherwise.
    Kappa(Rational),
}

pub fn family_invariant(
    lambda: &Rational,
    mu: &Rational,
) -> Result<FamilyInvariant, ClassifyError> {
    if lambda.is_zero() && mu.is_zero() {
        return Err(ClassifyError::BothZero);
    }
    let product = lambda * mu;
    if product.is_zero() {
        return Ok(FamilyInvariant::ZeroProduct);
    }
    let sum = lambda + mu;
    Ok(FamilyInvariant::Kappa(&(&sum * &sum) / &product))
}

/// The equivalence class of a three-dimensional structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CanonicalClass {
    Abelian,
    D1,
    D2,
    D3,
    Family(FamilyInvariant),
}

impl CanonicalClass {
    pub fn label(&self) -> &'static str {
        match self {
            CanonicalClass::Abelian => "abelian",
            CanonicalClass::D1 => "d1",
            CanonicalClass::D2 => "d2",
            CanonicalClass::D3 => "d3",
            CanonicalClass::Family(_) => "family",
        }
    }

    pub fn family_point(&self) -> Option<&FamilyInvariant> {
        match self {
            CanonicalClass::Family(inv) => Some(inv),
            _ => None,
        }
    }
}

/// An invertible rational basis change together with its induced action
/// on 2-vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    g: Matrix<Rational>,
    q: Matrix<Rational>,
}

impl Witness {
    pub fn new(g: Matrix<Rational>) -> Result<Self, ClassifyError> {
        if g.det().vanishes() {
            return Err(ClassifyError::Singular);
        }
        let q = lambda2(&g);
        Ok(Witness { g, q })
    }

    pub fn g(&self) -> &Matrix<Rational> {
        &self.g
    }

    pub fn q(&self) -> &Matrix<Rational> {
        &self.q
    }
}

/// Output of `classify`: the class, a representative the witness maps
/// onto the input, and its catalog name when the catalog matrix itself is
/// rationally reachable.
#[derive(Debug, Clone)]
pub struct Classification {
    pub class: CanonicalClass,
    pub representative: Codifferential<Rational>,
    pub representative_label: Option<CatalogLabel>,
    pub witness: Witness,
}

impl Classification {
    pub fn representative_is_canonical(&self) -> bool {
        self.representative_label.is_some()
    }
}

/// The catalog structure for a label.
pub fn canonical(label: &CatalogLabel) -> Result<Codifferential<Rational>, CatalogError> {
    catalog::codifferential(label)
}

/// Coordinates of the bracket of two vectors under `d`.
fn bracket_vectors(
    d: &Codifferential<Rational>,
    u: &[Rational],
    v: &[Rational],
) -> Vec<Rational> {
    let n = d.dim();
    let pairs = binomial(n, 2);
    let mut wedge = Vec::with_capacity(pairs);
    for j in 1..=pairs {
        let word = s_index(j, 2, n).expect("ordinal in range");
        let (p, q) = (word.entries()[0] - 1, word.entries()[1] - 1);
        wedge.push((&u[p] * &v[q]) - (&u[q] * &v[p]));
    }
    d.matrix().mul_vec(&wedge)
}

fn embed2(s: &Matrix<Rational>) -> Matrix<Rational> {
    Matrix::from_fn(3, 3, |i, j| {
        if i < 2 && j < 2 {
            s.at(i, j).clone()
        } else if i == 2 && j == 2 {
            rat(1)
        } else {
            rat(0)
        }
    })
}

fn diag(entries: &[Rational]) -> Matrix<Rational> {
    Matrix::from_fn(entries.len(), entries.len(), |i, j| {
        if i == j {
            entries[i].clone()
        } else {
            rat(0)
        }
    })
}

/// A basis `[v, M v]` turning the non-scalar `M` into its companion
/// matrix; one of the three candidate vectors is always cyclic.
fn companion_basis(m: &Matrix<Rational>) -> Matrix<Rational> {
    let candidates = [
        vec![rat(1), rat(0)],
        vec![rat(0), rat(1)],
        vec![rat(1), rat(1)],
    ];
    for v in candidates {
        let mv = m.mul_vec(&v);
        let dt = (&v[0] * &mv[1]) - (&v[1] * &mv[0]);
        if !dt.is_zero() {
            return Matrix::from_cols(vec![v, mv]);
        }
    }
    unreachable!("a non-scalar 2x2 matrix has a cyclic vector among e1, e2, e1+e2");
}

/// Like [`companion_basis`], but when `beta` (the square of `M`, a scalar)
/// is a perfect square it hunts a small grid for a cyclic vector whose
/// companion determinant is plus or minus a square. Such a vector lets the
/// final diagonal rescaling stay rational, so the reduction can finish on
/// the canonical anti-diagonal representative instead of stopping early.
fn preferred_companion_basis(m: &Matrix<Rational>, beta: &Rational) -> Matrix<Rational> {
    if rational_sqrt(beta).is_some() {
        for a in -4..=4i64 {
            for b in -4..=4i64 {
                if (a, b) == (0, 0) {
                    continue;
                }
                let v = vec![rat(a), rat(b)];
                let mv = m.mul_vec(&v);
                let dt = (&v[0] * &mv[1]) - (&v[1] * &mv[0]);
                if dt.is_zero() {
                    continue;
                }
                if rational_sqrt(&dt).is_some() || rational_sqrt(&-&dt).is_some() {
                    return Matrix::from_cols(vec![v, mv]);
                }
            }
        }
    }
    companion_basis(m)
}

/// Conjugator between 2x2 matrices with the same characteristic
/// polynomial, neither scalar: returns `S` with `S^{-1} M S = target`.
fn sim2(m: &Matrix<Rational>, target: &Matrix<Rational>) -> Matrix<Rational> {
    let pa = companion_basis(m);
    let pb = companion_basis(target);
    let s = pa.mul(&inverse(&pb).expect("companion basis is invertible"));
    debug_assert_eq!(
        &inverse(&s).expect("conjugator is invertible").mul(&m.mul(&s)),
        target,
        "conjugation must land on the target form"
    );
    s
}

/// Scales a pair of distinct nonzero rationals to the coprime integer
/// pair printed in reports: larger magnitude first, first entry positive.
fn display_pair(a: &Rational, b: &Rational) -> (Rational, Rational) {
    use num::Integer;
    let l = a.denom().lcm(b.denom());
    let lr = Rational::from(l);
    let mut p = (a * &lr).to_integer();
    let mut q = (b * &lr).to_integer();
    let g = p.gcd(&q);
    p /= &g;
    q /= &g;
    if p.magnitude() < q.magnitude() {
        std::mem::swap(&mut p, &mut q);
    }
    if p.is_negative() {
        p = -p;
        q = -q;
    }
    (Rational::from(p), Rational::from(q))
}

/// Full classification of a certified three-dimensional structure with a
/// rational witness: `verify_equiv(representative, d, witness.g())` holds
/// for every result.
pub fn classify(d: &Codifferential<Rational>) -> Classification {
    assert_eq!(d.dim(), 3, "full classification is specific to dimension three");
    let out = match rank(d.matrix()) {
        0 => Classification {
            class: CanonicalClass::Abelian,
            representative: catalog::codifferential(&CatalogLabel::Abelian).unwrap(),
            representative_label: Some(CatalogLabel::Abelian),
            witness: Witness::new(Matrix::identity(3)).unwrap(),
        },
        3 => classify_invertible(d),
        r => classify_with_ideal(d, r),
    };
    debug_assert!(
        verify_equiv(&out.representative, d, out.witness.g()),
        "classification witness must certify"
    );
    out
}

/// Rank-3 case. A basis `(u, v, [u,v])` with nonzero determinant turns
/// the matrix into the normal form `[[0,x,y],[0,z,-x],[1,0,0]]`; a cyclic
/// vector for `T = [[x,y],[z,-x]]` then produces the anti-diagonal form
/// `[[0,0,mu],[0,lambda,0],[1,0,0]]`. The catalog matrix needs
/// `1/lambda` and `1/mu` to be squares (possibly after the slot swap), a
/// rescaling freedom of `lambda -> r^2 lambda`, `mu -> s^2 mu`;
/// otherwise the anti-diagonal form itself is the stored representative.
fn classify_invertible(d: &Codifferential<Rational>) -> Classification {
    let mut grid = Vec::new();
    for a in 0..3i64 {
        for b in 0..3i64 {
            for c in 0..3i64 {
                if (a, b, c) != (0, 0, 0) {
                    grid.push(vec![rat(a), rat(b), rat(c)]);
                }
            }
        }
    }
    let mut found = None;
    'search: for u in &grid {
        for v in &grid {
            let w = bracket_vectors(d, u, v);
            let g1 = Matrix::from_cols(vec![u.clone(), v.clone(), w]);
            if !g1.det().is_zero() {
                found = Some(g1);
                break 'search;
            }
        }
    }
    // The defect of all small-grid pairs would force the bracket to keep
    // every pair inside its own span, which caps the rank at two.
    let g1 = found.expect("a rank-3 structure admits an independent triple (u, v, [u,v])");
    let a1 = transport(d, &g1).expect("triple with nonzero determinant");

    let m = a1.matrix();
    let x = m.at(0, 1).clone();
    let y = m.at(0, 2).clone();
    let z = m.at(1, 1).clone();
    assert_eq!(m.col(0), vec![rat(0), rat(0), rat(1)], "first column must be the third basis vector");
    assert_eq!(m.at(1, 2), &-&x, "trace part must cancel");
    assert!(m.at(2, 1).is_zero() && m.at(2, 2).is_zero(), "third row must vanish");

    let beta = &(&x * &x) + &(&y * &z);
    let t = Matrix::from_rows(vec![vec![x.clone(), y], vec![z, -&x]]);
    let pa = preferred_companion_basis(&t, &beta);
    let dt = pa.det();
    let g2 = Matrix::from_cols(vec![
        vec![pa.at(0, 0).clone(), pa.at(1, 0).clone(), rat(0)],
        vec![pa.at(0, 1).clone(), pa.at(1, 1).clone(), rat(0)],
        vec![rat(0), rat(0), dt],
    ]);
    let a2 = transport(&a1, &g2).expect("cyclic basis is invertible");
    let m2 = a2.matrix();
    let lambda = m2.at(1, 1).clone();
    let mu = m2.at(0, 2).clone();
    assert!(
        m2.at(0, 1).is_zero() && m2.at(1, 2).is_zero() && m2.at(2, 1).is_zero() && m2.at(2, 2).is_zero(),
        "anti-diagonal form must be reached"
    );

    let mut chain = g1.mul(&g2);
    let mut current = a2;
    // Optional slot swap (lambda, mu) -> (-mu, -lambda) before scaling.
    let attempts = [false, true];
    for swapped in attempts {
        let (lam, mmu) = if swapped {
            (-&mu, -&lambda)
        } else {
            (lambda.clone(), mu.clone())
        };
        let (r2, s2) = (
            rational_sqrt(&(rat(1) / &lam)),
            rational_sqrt(&(rat(1) / &mmu)),
        );
        if let (Some(r), Some(s)) = (r2, s2) {
            let mut g3 = diag(&[r.clone(), s.clone(), &r * &s]);
            if swapped {
                let swap = Matrix::from_rows(vec![
                    vec![rat(0), rat(-1), rat(0)],
                    vec![rat(1), rat(0), rat(0)],
                    vec![rat(0), rat(0), rat(1)],
                ]);
                g3 = swap.mul(&g3);
            }
            current = transport(&current, &g3).expect("diagonal scaling is invertible");
            chain = chain.mul(&g3);
            let rep = catalog::codifferential(&CatalogLabel::D3).unwrap();
            assert_eq!(current.matrix(), rep.matrix(), "scaling must finish the reduction");
            return Classification {
                class: CanonicalClass::D3,
                representative: rep,
                representative_label: Some(CatalogLabel::D3),
                witness: Witness::new(inverse(&chain).expect("chain of invertible steps")).unwrap(),
            };
        }
    }
    Classification {
        class: CanonicalClass::D3,
        representative: current,
        representative_label: None,
        witness: Witness::new(inverse(&chain).expect("chain of invertible steps")).unwrap(),
    }
}

/// Rank-1 and rank-2 cases, which factor through a two-dimensional
/// abelian ideal containing the derived subalgebra.
fn classify_with_ideal(d: &Codifferential<Rational>, rk: usize) -> Classification {
    let a = d.matrix();
    let ech = echelon(a);
    let (w1, w2) = if rk == 2 {
        let w1 = a.col(ech.pivots[0]);
        let w2 = a.col(ech.pivots[1]);
        let br = bracket_vectors(d, &w1, &w2);
        assert!(
            br.iter().all(Rational::is_zero),
            "a two-dimensional derived subalgebra is abelian"
        );
        (w1, w2)
    } else {
        let w = a.col(ech.pivots[0]);
        // Kernel of v -> [w, v]; it contains w and has dimension >= 2
        // because the image lies in the derived line.
        let ad = Matrix::from_cols(
            (0..3)
                .map(|j| {
                    let mut e = vec![rat(0); 3];
                    e[j] = rat(1);
                    bracket_vectors(d, &w, &e)
                })
                .collect(),
        );
        let mut span = SpanBuilder::new();
        span.try_insert(&w);
        let u = nullspace(&ad)
            .into_iter()
            .find(|v| span.try_insert(v))
            .expect("the centraliser of the derived line has dimension at least two");
        (w, u)
    };
    let f3 = (0..3)
        .map(|i| {
            let mut e = vec![rat(0); 3];
            e[i] = rat(1);
            e
        })
        .find(|e| {
            !Matrix::from_cols(vec![w1.clone(), w2.clone(), e.clone()])
                .det()
                .is_zero()
        })
        .expect("the ideal extends to a basis by a coordinate vector");
    let g0 = Matrix::from_cols(vec![w1, w2, f3]);
    let a_new = transport(d, &g0).expect("ideal basis is invertible");
    let m = a_new.matrix();
    assert!(
        m.col(0).iter().all(Rational::is_zero) && m.at(2, 1).is_zero() && m.at(2, 2).is_zero(),
        "the ideal must reduce the matrix to the block form [[0, R], [0, 0]]"
    );
    let r = Matrix::from_rows(vec![
        vec![m.at(0, 1).clone(), m.at(0, 2).clone()],
        vec![m.at(1, 1).clone(), m.at(1, 2).clone()],
    ]);

    let tr = m.at(0, 1) + m.at(1, 2);
    let det = r.det();
    let is_scalar = m.at(1, 1).is_zero() && m.at(0, 2).is_zero() && m.at(0, 1) == m.at(1, 2);

    let (class, scale, r_canon, rep_label) = if is_scalar {
        // R = cI with c != 0, the diagonal solvable structure.
        (
            CanonicalClass::D2,
            m.at(0, 1).clone(),
            Matrix::identity(2),
            Some(CatalogLabel::D2),
        )
    } else if det.is_zero() && tr.is_zero() {
        (
            CanonicalClass::D1,
            rat(1),
            Matrix::from_rows(vec![vec![rat(0), rat(1)], vec![rat(0), rat(0)]]),
            Some(CatalogLabel::D1),
        )
    } else if det.is_zero() {
        (
            CanonicalClass::Family(FamilyInvariant::ZeroProduct),
            tr.clone(),
            Matrix::from_rows(vec![vec![rat(1), rat(1)], vec![rat(0), rat(0)]]),
            Some(CatalogLabel::family(rat(1), rat(0))),
        )
    } else {
        let kappa = &(&tr * &tr) / &det;
        let disc = (&tr * &tr) - &(rat(4) * &det);
        if disc.is_zero() {
            (
                CanonicalClass::Family(FamilyInvariant::Kappa(rat(4))),
                &tr / &rat(2),
                Matrix::from_rows(vec![vec![rat(1), rat(1)], vec![rat(0), rat(1)]]),
                Some(CatalogLabel::family(rat(1), rat(1))),
            )
        } else if let Some(s) = rational_sqrt(&disc) {
            let ev_a = &(&tr + &s) / &rat(2);
            let ev_b = &(&tr - &s) / &rat(2);
            let (lam_hat, mu_hat) = display_pair(&ev_a, &ev_b);
            let c = if &(&ev_a / &lam_hat) * &mu_hat == ev_b {
                &ev_a / &lam_hat
            } else {
                &ev_a / &mu_hat
            };
            (
                CanonicalClass::Family(FamilyInvariant::Kappa(kappa)),
                c,
                Matrix::from_rows(vec![
                    vec![lam_hat.clone(), rat(1)],
                    vec![rat(0), mu_hat.clone()],
                ]),
                Some(CatalogLabel::family(lam_hat, mu_hat)),
            )
        } else {
            // Irrational eigenvalues: keep the companion form of R as the
            // stored representative; the invariant identifies the class.
            (
                CanonicalClass::Family(FamilyInvariant::Kappa(kappa)),
                rat(1),
                Matrix::from_rows(vec![vec![rat(0), -&det], vec![rat(1), tr.clone()]]),
                None,
            )
        }
    };

    let representative = match &rep_label {
        Some(label) => catalog::codifferential(label).unwrap(),
        None => {
            let rows = vec![
                vec![rat(0), r_canon.at(0, 0).clone(), r_canon.at(0, 1).clone()],
                vec![rat(0), r_canon.at(1, 0).clone(), r_canon.at(1, 1).clone()],
                vec![rat(0), rat(0), rat(0)],
            ];
            let body = Coderivation::from_grid(3, 2, Matrix::from_rows(rows)).unwrap();
            Codifferential::certify(body).expect("abelian-ideal block forms satisfy the quadratic identity")
        }
    };

    let r_scaled = r.map(|v| v / &scale);
    let s = if is_scalar {
        Matrix::identity(2)
    } else {
        sim2(&r_scaled, &r_canon)
    };
    let s_inv = inverse(&s).expect("conjugator is invertible");
    let g_w = embed2(&s_inv)
        .mul(&diag(&[rat(1), rat(1), scale]))
        .mul(&inverse(&g0).expect("ideal basis is invertible"));
    Classification {
        class,
        representative,
        representative_label: rep_label,
        witness: Witness::new(g_w).unwrap(),
    }
}
