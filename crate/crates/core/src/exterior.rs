//! Combinatorics of the exterior coalgebra on an `N`-dimensional space:
//! ordered basis words, their ordinal ranking, unshuffle enumerations and
//! the comultiplication used as an independent oracle in the test suite.
//!
//! Basis `k`-words are strictly increasing index tuples `(i1 < ... < ik)`
//! with entries in `1..=N`. The ranking pairs words with ordinals
//! `1..=C(N,k)` so that appending the largest entry last is compatible with
//! the recursion `rank = 1 + sum_j C(i_j - 1, j)`; concretely the words for
//! `N=3, k=2` come out as `(1,2), (1,3), (2,3)`.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExteriorError {
    #[error("ordinal {ordinal} out of range for {k}-words on {dim} indices")]
    OrdinalOutOfRange { ordinal: usize, k: usize, dim: usize },
    #[error("word {0:?} is not strictly increasing with entries >= 1")]
    MalformedWord(Vec<usize>),
    #[error("unshuffle enumeration capped at k + l <= {max}, got {got}")]
    TooLarge { got: usize, max: usize },
}

/// Largest `k + l` the unshuffle enumerator will accept. `C(12,6) = 924`
/// summands is still instant; beyond that the caller is almost certainly
/// holding the construction wrong.
pub const MAX_UNSHUFFLE: usize = 12;

/// Binomial coefficient with the usual convention `C(n,k) = 0` for `n < k`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// A strictly increasing word of 1-based basis indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Result<MultiIndex, ExteriorError> {
        let ok = entries.windows(2).all(|w| w[0] < w[1])
            && entries.first().map(|&e| e >= 1).unwrap_or(true);
        if ok {
            Ok(MultiIndex(entries))
        } else {
            Err(ExteriorError::MalformedWord(entries))
        }
    }

    pub fn empty() -> MultiIndex {
        MultiIndex(Vec::new())
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.0.binary_search(&idx).is_ok()
    }

    /// Inserts a new index, returning the sorted word and the sign of the
    /// permutation that moves the index from the front into place. `None`
    /// when the index already occurs (the wedge is zero).
    pub fn insert_front(&self, idx: usize) -> Option<(MultiIndex, i32)> {
        match self.0.binary_search(&idx) {
            Ok(_) => None,
            Err(pos) => {
                let mut entries = self.0.clone();
                entries.insert(pos, idx);
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                Some((MultiIndex(entries), sign))
            }
        }
    }

    /// Picks out the subword at the given 1-based positions.
    pub fn select(&self, positions: &[usize]) -> MultiIndex {
        MultiIndex(positions.iter().map(|&p| self.0[p - 1]).collect())
    }

    /// Renders like `123` (entry digits run together), matching the
    /// superscripts in basis-monomial names.
    pub fn render_compact(&self) -> String {
        self.0.iter().map(|e| e.to_string()).collect()
    }
}

/// The `n`-th `k`-word (1-based `n`) on `dim` indices.
pub fn s_index(n: usize, k: usize, dim: usize) -> Result<MultiIndex, ExteriorError> {
    if n < 1 || n > binomial(dim, k) {
        return Err(ExteriorError::OrdinalOutOfRange { ordinal: n, k, dim });
    }
    let mut entries = vec![0usize; k];
    let mut n = n;
    let mut kk = k;
    while kk > 0 {
        if kk == 1 {
            entries[0] = n;
            break;
        }
        // Smallest l with C(l, kk) >= n; the word ends in l and the prefix
        // is the (n - C(l-1, kk))-th (kk-1)-word.
        let mut l = kk;
        while binomial(l, kk) < n {
            l += 1;
        }
        entries[kk - 1] = l;
        n -= binomial(l - 1, kk);
        kk -= 1;
    }
    Ok(MultiIndex(entries))
}

/// Rank of a `k`-word among all `k`-words, inverse to [`s_index`].
pub fn ordinal_of(word: &MultiIndex) -> usize {
    1 + word
        .entries()
        .iter()
        .enumerate()
        .map(|(pos, &i)| binomial(i - 1, pos + 1))
        .sum::<usize>()
}

/// One term of an unshuffle sum: 1-based positions of the first and second
/// blocks (each strictly increasing) and the permutation sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unshuffle {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub sign: i32,
}

/// All `(k,l)`-unshuffles of `1..=k+l` in lexicographic order of the first
/// block. The sign is the parity of the block permutation, i.e. of the
/// number of pairs crossing from the second block back before the first.
pub fn unshuffles(k: usize, l: usize) -> Result<Vec<Unshuffle>, ExteriorError> {
    let n = k + l;
    if n > MAX_UNSHUFFLE {
        return Err(ExteriorError::TooLarge { got: n, max: MAX_UNSHUFFLE });
    }
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut first: Vec<usize> = (1..=k).collect();
    loop {
        let second: Vec<usize> = (1..=n).filter(|p| !first.contains(p)).collect();
        // Crossing inversions: pairs (a in first, b in second) with a > b.
        let crossings = first
            .iter()
            .map(|&a| second.iter().filter(|&&b| b < a).count())
            .sum::<usize>();
        out.push(Unshuffle {
            first: first.clone(),
            second,
            sign: if crossings % 2 == 0 { 1 } else { -1 },
        });
        // Advance the first block to the next k-subset in lex order.
        if k == 0 {
            break;
        }
        let mut i = k;
        while i > 0 && first[i - 1] == n - (k - i) {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        first[i - 1] += 1;
        for j in i..k {
            first[j] = first[j - 1] + 1;
        }
    }
    Ok(out)
}

/// Comultiplication of a basis word: all signed splittings into two
/// nonempty blocks. Used as the independent oracle when testing that
/// coderivation extensions satisfy the coderivation law.
pub fn comultiply(word: &MultiIndex) -> Result<Vec<(MultiIndex, MultiIndex, i32)>, ExteriorError> {
    let n = word.len();
    let mut out = Vec::new();
    for k in 1..n {
        for sh in unshuffles(k, n - k)? {
            out.push((word.select(&sh.first), word.select(&sh.second), sh.sign));
        }
    }
    Ok(out)
}
