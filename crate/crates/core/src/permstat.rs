//! Permutations, `inv`/`maj`, and the parabolic quotients `S(n,k)` and
//! `S'(n,k)` together with their signed distributions.
//!
//! Words are one-line notation with 1-indexed values: `[2, 3, 1]` sends
//! 1 ↦ 2, 2 ↦ 3, 3 ↦ 1.

use std::fmt;

use crate::error::{Error, Result};
use crate::qpoly::IntPolynomial;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    word: Vec<usize>,
}

impl Permutation {
    pub fn new(word: Vec<usize>) -> Result<Self> {
        let n = word.len();
        let mut seen = vec![false; n + 1];
        for &v in &word {
            if v == 0 || v > n || seen[v] {
                return Err(Error::InvalidPermutation { n, word });
            }
            seen[v] = true;
        }
        Ok(Permutation { word })
    }

    pub(crate) fn from_word_unchecked(word: Vec<usize>) -> Self {
        debug_assert!(Permutation::new(word.clone()).is_ok());
        Permutation { word }
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            word: (1..=n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    /// `σ(i)` for `1 ≤ i ≤ n`.
    pub fn at(&self, i: usize) -> usize {
        self.word[i - 1]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.word.len()];
        for (i, &v) in self.word.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { word: inv }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "composing permutations of different sizes");
        Permutation {
            word: other.word.iter().map(|&j| self.word[j - 1]).collect(),
        }
    }

    pub fn inv(&self) -> usize {
        word_inv(&self.word)
    }

    /// Descent positions `i` (1-indexed) with `σ(i) > σ(i+1)`.
    pub fn descents(&self) -> Vec<usize> {
        self.word
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] > w[1])
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn maj(&self) -> usize {
        word_maj(&self.word)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.word)
    }
}

/// Inversion number of any sequence of distinct comparable values.
pub fn word_inv<T: Ord>(word: &[T]) -> usize {
    let mut count = 0;
    for i in 0..word.len() {
        for j in i + 1..word.len() {
            if word[i] > word[j] {
                count += 1;
            }
        }
    }
    count
}

/// Major index of any sequence.
pub fn word_maj<T: Ord>(word: &[T]) -> usize {
    word.windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] > w[1])
        .map(|(i, _)| i + 1)
        .sum()
}

/// Lexicographic stream of the words on `[n]` in which each value appears
/// after every value in its predecessor set.
///
/// This is the set of linear extensions of a partial order on the values; the
/// depth-first construction never dead-ends, so each step costs `O(n²)` at
/// most and nothing is filtered out.
#[derive(Clone, Debug)]
pub struct LinearExtensions {
    n: usize,
    /// `preds[v - 1]`: bitmask of values (bit `u - 1`) that must precede `v`.
    preds: Vec<u64>,
    word: Vec<usize>,
    used: u64,
    started: bool,
    done: bool,
}

impl LinearExtensions {
    /// `relations` lists pairs `(a, b)` meaning `a` must appear before `b`.
    pub fn new(n: usize, relations: &[(usize, usize)]) -> Self {
        assert!(n <= 64, "enumeration supports at most 64 letters");
        let mut preds = vec![0u64; n];
        for &(a, b) in relations {
            assert!((1..=n).contains(&a) && (1..=n).contains(&b) && a != b);
            preds[b - 1] |= 1 << (a - 1);
        }
        LinearExtensions {
            n,
            preds,
            word: Vec::with_capacity(n),
            used: 0,
            started: false,
            done: false,
        }
    }

    fn available(&self, v: usize) -> bool {
        self.used & (1 << (v - 1)) == 0 && self.preds[v - 1] & !self.used == 0
    }

    fn push(&mut self, v: usize) {
        self.word.push(v);
        self.used |= 1 << (v - 1);
    }

    fn pop(&mut self) -> Option<usize> {
        let v = self.word.pop()?;
        self.used &= !(1 << (v - 1));
        Some(v)
    }

    /// Completes the current prefix with the lexicographically least valid
    /// suffix. Returns false if the constraints are cyclic.
    fn fill(&mut self) -> bool {
        while self.word.len() < self.n {
            match (1..=self.n).find(|&v| self.available(v)) {
                Some(v) => self.push(v),
                None => return false,
            }
        }
        true
    }
}

impl Iterator for LinearExtensions {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if !self.fill() {
                self.done = true;
                return None;
            }
            return Some(Permutation::from_word_unchecked(self.word.clone()));
        }
        while let Some(last) = self.pop() {
            if let Some(v) = (last + 1..=self.n).find(|&v| self.available(v)) {
                self.push(v);
                let ok = self.fill();
                debug_assert!(ok);
                return Some(Permutation::from_word_unchecked(self.word.clone()));
            }
        }
        self.done = true;
        None
    }
}

/// `k = 0` and `k = 1` name the same quotient (`J = ∅`).
pub fn normalize_k(k: usize) -> usize {
    k.max(1)
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if k > n {
        return Err(Error::OutOfRange(format!("need 0 <= k <= n, got n={n}, k={k}")));
    }
    if n > 64 {
        return Err(Error::OutOfRange(format!("n={n} exceeds 64")));
    }
    Ok(())
}

/// `S(n,k)`: permutations in which `n-k+1, …, n` occur left to right, in
/// lexicographic order. `n!/k!` elements.
pub fn enumerate_quotient(n: usize, k: usize) -> Result<LinearExtensions> {
    check_nk(n, k)?;
    if n == 0 {
        return Ok(LinearExtensions::new(0, &[]));
    }
    let k = normalize_k(k);
    let chain: Vec<(usize, usize)> = (n - k + 1..n).map(|v| (v, v + 1)).collect();
    Ok(LinearExtensions::new(n, &chain))
}

/// `S'(n,k)`: permutations in which `1, …, k` occur left to right.
pub fn enumerate_quotient_prime(n: usize, k: usize) -> Result<LinearExtensions> {
    check_nk(n, k)?;
    let k = normalize_k(k);
    let chain: Vec<(usize, usize)> = (1..k).map(|v| (v, v + 1)).collect();
    Ok(LinearExtensions::new(n, &chain))
}

/// Whether `σ ∈ S(n,k)`.
pub fn in_quotient(sigma: &Permutation, k: usize) -> bool {
    let n = sigma.len();
    let k = normalize_k(k);
    if k > n {
        return false;
    }
    let pos = sigma.inverse();
    (n - k + 1..n).all(|v| pos.at(v) < pos.at(v + 1))
}

/// The catalytic statistic: `σ(n) - 1` if `σ(n) ≤ n - k`, else `n - k`.
pub fn s_stat(sigma: &Permutation, n: usize, k: usize) -> Result<usize> {
    check_nk(n, k)?;
    let k = normalize_k(k);
    if sigma.len() != n || !in_quotient(sigma, k) {
        return Err(Error::NotInQuotient {
            word: sigma.word.clone(),
            n,
            k,
        });
    }
    let last = sigma.at(n);
    if last <= n - k {
        Ok(last - 1)
    } else if last == n {
        Ok(n - k)
    } else {
        Err(Error::NotInQuotient {
            word: sigma.word.clone(),
            n,
            k,
        })
    }
}

/// `Σ_{σ ∈ S(n,k)} (-1)^inv(σ) q^maj(σ) z^s(σ)` over `(q, z)`; without
/// `signed` the sign is dropped.
pub fn signed_distribution(n: usize, k: usize, signed: bool) -> Result<IntPolynomial> {
    let kk = normalize_k(k);
    let max_maj = n * n.saturating_sub(1) / 2;
    let max_s = n.saturating_sub(kk.min(n));
    let mut table = vec![vec![0i64; max_s + 1]; max_maj + 1];
    for sigma in enumerate_quotient(n, k)? {
        let sign = if signed && sigma.inv() % 2 == 1 { -1 } else { 1 };
        let s = if n == 0 { 0 } else { s_stat(&sigma, n, kk)? };
        table[sigma.maj()][s] += sign;
    }
    Ok(IntPolynomial::from_dense(&["q", "z"], &table))
}

/// `Σ_{σ ∈ S'(n,k)} (-1)^inv(σ) q^maj(σ)` (or unsigned).
pub fn signed_distribution_prime(n: usize, k: usize, signed: bool) -> Result<IntPolynomial> {
    maj_sign_distribution(enumerate_quotient_prime(n, k)?, n, signed)
}

/// `Σ (-1)^inv q^maj` over any stream of permutations of `[n]`.
pub fn maj_sign_distribution(
    perms: impl IntoIterator<Item = Permutation>,
    n: usize,
    signed: bool,
) -> Result<IntPolynomial> {
    let max_maj = n * n.saturating_sub(1) / 2;
    let mut table = vec![vec![0i64]; max_maj + 1];
    for sigma in perms {
        let sign = if signed && sigma.inv() % 2 == 1 { -1 } else { 1 };
        table[sigma.maj()][0] += sign;
    }
    Ok(IntPolynomial::from_dense(&["q"], &table))
}
