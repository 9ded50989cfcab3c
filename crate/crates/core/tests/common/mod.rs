//! Helpers shared by the integration test targets: fixed-seed random
//! generators for rational matrices and coderivations, and the
//! comultiplication-based harness for the coderivation law.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num::Zero;
use rand::rngs::StdRng;
use rand::Rng;

use liemod::coder::Coderivation;
use liemod::exterior::{binomial, comultiply, MultiIndex};
use liemod::linalg::Matrix;
use liemod::scalars::{rat, ratio};
use liemod::Rational;

pub fn rand_rat(rng: &mut StdRng) -> Rational {
    ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4))
}

pub fn rand_matrix(rng: &mut StdRng, n: usize) -> Matrix<Rational> {
    Matrix::from_fn(n, n, |_, _| rand_rat(rng))
}

pub fn rand_invertible(rng: &mut StdRng, n: usize) -> Matrix<Rational> {
    loop {
        let g = rand_matrix(rng, n);
        if !g.det().is_zero() {
            return g;
        }
    }
}

pub fn rand_coderivation(rng: &mut StdRng, dim: usize, arity: usize) -> Coderivation<Rational> {
    let cols = binomial(dim, arity);
    let grid = Matrix::from_fn(dim, cols, |_, _| rand_rat(rng));
    Coderivation::from_grid(dim, arity, grid).expect("grid shape matches the arity")
}

pub type SplitKey = (Vec<usize>, Vec<usize>);

fn accumulate(map: &mut BTreeMap<SplitKey, Rational>, key: SplitKey, c: Rational) {
    let slot = map.entry(key).or_insert_with(|| rat(0));
    *slot = &*slot + &c;
}

fn drop_zeros(map: BTreeMap<SplitKey, Rational>) -> BTreeMap<SplitKey, Rational> {
    map.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Full counital coproduct of a word: the proper splits from the oracle
/// plus the two empty-block terms (a single diagonal term for the empty
/// word). The empty blocks are what make arity-zero extensions satisfy the
/// law; proper splits alone cover arity one and up.
pub fn full_splits(x: &MultiIndex) -> Vec<(MultiIndex, MultiIndex, i32)> {
    if x.is_empty() {
        return vec![(MultiIndex::empty(), MultiIndex::empty(), 1)];
    }
    let mut out = comultiply(x).expect("words stay small");
    out.push((MultiIndex::empty(), x.clone(), 1));
    out.push((x.clone(), MultiIndex::empty(), 1));
    out
}

/// Both sides of the coderivation law on one word: the coproduct of the
/// extended image versus the extension applied inside each block of the
/// coproduct, with the Koszul sign for passing the map over the first
/// block.
pub fn law_sides(
    phi: &Coderivation<Rational>,
    w: &MultiIndex,
) -> (BTreeMap<SplitKey, Rational>, BTreeMap<SplitKey, Rational>) {
    let degree = phi.arity() as i64 - 1;
    let mut lhs = BTreeMap::new();
    if w.len() >= phi.arity() {
        for (img, c) in phi.extend_apply(w).expect("length checked") {
            for (u, v, s) in full_splits(&img) {
                let key = (u.entries().to_vec(), v.entries().to_vec());
                accumulate(&mut lhs, key, &c * &rat(s as i64));
            }
        }
    }
    let mut rhs = BTreeMap::new();
    for (u, v, s) in full_splits(w) {
        if u.len() >= phi.arity() {
            for (u2, c) in phi.extend_apply(&u).expect("length checked") {
                let key = (u2.entries().to_vec(), v.entries().to_vec());
                accumulate(&mut rhs, key, &c * &rat(s as i64));
            }
        }
        if v.len() >= phi.arity() {
            let pass = if (degree * u.len() as i64).rem_euclid(2) == 0 { 1 } else { -1 };
            for (v2, c) in phi.extend_apply(&v).expect("length checked") {
                let key = (u.entries().to_vec(), v2.entries().to_vec());
                accumulate(&mut rhs, key, &c * &rat((s as i64) * pass));
            }
        }
    }
    (drop_zeros(lhs), drop_zeros(rhs))
}

/// Checks the coderivation law for every basis map and every basis word at
/// the given dimension.
pub fn assert_law_for_dimension(dim: usize) {
    use liemod::exterior::s_index;
    for arity in 0..=dim {
        for n in 1..=binomial(dim, arity) {
            let word = s_index(n, arity, dim).expect("ordinal in range");
            for target in 1..=dim {
                let phi = Coderivation::basis(dim, arity, &word, target);
                for m in 0..=dim {
                    for wn in 1..=binomial(dim, m) {
                        let w = s_index(wn, m, dim).expect("ordinal in range");
                        let (lhs, rhs) = law_sides(&phi, &w);
                        assert_eq!(
                            lhs,
                            rhs,
                            "law fails for dim {dim}, word {:?} -> e{target} on {:?}",
                            word.entries(),
                            w.entries()
                        );
                    }
                }
            }
        }
    }
}
