//! Colored permutations `G(r,n)`, the subgroups `G(r,p,n)`, the quotients
//! `G(r,p,n)* = G(r,n)/C_p`, and the flag-major index on them.
//!
//! An element `g = [σ_1^{z_1}, …, σ_n^{z_n}]` sends `i^0 ↦ σ_i^{z_i}` and
//! `i^c ↦ σ_i^{z_i + c}`. `C_p` is generated by the uniform color shift by
//! `r/p`; an element of the quotient is stored through the representative
//! whose minimal decreasing color lift (the k-vector) is entrywise least.

use std::collections::BTreeMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::permstat::{LinearExtensions, Permutation};
use crate::qpoly::IntPolynomial;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredPermutation {
    r: u32,
    word: Permutation,
    colors: Vec<u32>,
}

impl ColoredPermutation {
    pub fn new(r: u32, word: Vec<usize>, colors: Vec<u32>) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidColoredPermutation("modulus r must be positive".into()));
        }
        if word.len() != colors.len() {
            return Err(Error::InvalidColoredPermutation(format!(
                "{} letters but {} colors",
                word.len(),
                colors.len()
            )));
        }
        let word = Permutation::new(word)?;
        let colors = colors.into_iter().map(|c| c % r).collect();
        Ok(ColoredPermutation { r, word, colors })
    }

    pub fn identity(r: u32, n: usize) -> Self {
        ColoredPermutation {
            r,
            word: Permutation::identity(n),
            colors: vec![0; n],
        }
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// `|g|`.
    pub fn abs(&self) -> &Permutation {
        &self.word
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    /// `(self · other)(i^0) = self(other(i^0))`.
    pub fn multiply(&self, other: &ColoredPermutation) -> Result<ColoredPermutation> {
        if self.r != other.r {
            return Err(Error::ModulusMismatch(self.r, other.r));
        }
        if self.len() != other.len() {
            return Err(Error::InvalidColoredPermutation(format!(
                "sizes {} and {} differ",
                self.len(),
                other.len()
            )));
        }
        let colors = (1..=self.len())
            .map(|i| {
                let j = other.word.at(i);
                (self.colors[j - 1] + other.colors[i - 1]) % self.r
            })
            .collect();
        Ok(ColoredPermutation {
            r: self.r,
            word: self.word.compose(&other.word),
            colors,
        })
    }

    /// `[τ_1^{-z_{τ_1}}, …]` with `τ = σ⁻¹`.
    pub fn inverse(&self) -> ColoredPermutation {
        let tau = self.word.inverse();
        let colors = tau
            .word()
            .iter()
            .map(|&t| (self.r - self.colors[t - 1]) % self.r)
            .collect();
        ColoredPermutation {
            r: self.r,
            word: tau,
            colors,
        }
    }

    /// All colors shifted by `c`.
    pub fn shifted(&self, c: u32) -> ColoredPermutation {
        ColoredPermutation {
            r: self.r,
            word: self.word.clone(),
            colors: self.colors.iter().map(|&z| (z + c) % self.r).collect(),
        }
    }

    /// Homogeneous descents: `z_i = z_{i+1}` and `σ_i > σ_{i+1}`.
    pub fn hdes(&self) -> Vec<usize> {
        (1..self.len())
            .filter(|&i| self.colors[i - 1] == self.colors[i] && self.word.at(i) > self.word.at(i + 1))
            .collect()
    }

    /// Longest increasing subsequence of `|g|` among positions of color `z`.
    pub fn is_z(&self, z: u32) -> usize {
        let vals: Vec<usize> = (1..=self.len())
            .filter(|&i| self.colors[i - 1] == z % self.r)
            .map(|i| self.word.at(i))
            .collect();
        let mut best = vec![1usize; vals.len()];
        for i in 0..vals.len() {
            for j in 0..i {
                if vals[j] < vals[i] {
                    best[i] = best[i].max(best[j] + 1);
                }
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    pub fn color_sum(&self) -> u64 {
        self.colors.iter().map(|&c| c as u64).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ColoredWire {
            r: self.r,
            p: None,
            word: self.word.word().to_vec(),
            colors: self.colors.clone(),
        })
        .expect("colored permutation serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let w: ColoredWire = serde_json::from_str(s)
            .map_err(|e| Error::InvalidColoredPermutation(e.to_string()))?;
        ColoredPermutation::new(w.r, w.word, w.colors)
    }
}

#[derive(Serialize, Deserialize)]
struct ColoredWire {
    r: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    p: Option<u32>,
    word: Vec<usize>,
    colors: Vec<u32>,
}

/// Least weakly decreasing `k` with `k_i ≡ z_i (mod r)`, built right to left.
pub fn minimal_lift(colors: &[u32], r: u32) -> Vec<u64> {
    let r = r as u64;
    let mut k = vec![0u64; colors.len()];
    let mut floor = 0u64;
    for i in (0..colors.len()).rev() {
        let z = colors[i] as u64 % r;
        let v = floor + (z + r - floor % r) % r;
        k[i] = v;
        floor = v;
    }
    k
}

fn check_rp(r: u32, p: u32) -> Result<()> {
    if r == 0 || p == 0 || !r.is_multiple_of(p) {
        return Err(Error::OutOfRange(format!("need p | r with r, p >= 1, got r={r}, p={p}")));
    }
    Ok(())
}

/// An element of `G(r,p,n)* = G(r,n)/C_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualGroupElement {
    p: u32,
    rep: ColoredPermutation,
    k: Vec<u64>,
}

/// Picks, among the `p` uniformly shifted representatives of `g`'s coset,
/// the one whose minimal decreasing lift is entrywise least.
pub fn canonical_dual(g: &ColoredPermutation, p: u32) -> Result<DualGroupElement> {
    check_rp(g.r, p)?;
    let step = g.r / p;
    let candidates: Vec<(ColoredPermutation, Vec<u64>)> = (0..p)
        .map(|m| {
            let rep = g.shifted(m * step);
            let k = minimal_lift(&rep.colors, g.r);
            (rep, k)
        })
        .collect();
    let (rep, k) = candidates
        .iter()
        .find(|(_, k)| {
            candidates
                .iter()
                .all(|(_, other)| k.iter().zip(other).all(|(a, b)| a <= b))
        })
        .cloned()
        .ok_or(Error::NoEntrywiseMinimum)?;
    Ok(DualGroupElement { p, rep, k })
}

impl DualGroupElement {
    pub fn r(&self) -> u32 {
        self.rep.r
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.rep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rep.is_empty()
    }

    /// The canonical representative in `G(r,n)`.
    pub fn rep(&self) -> &ColoredPermutation {
        &self.rep
    }

    pub fn hdes(&self) -> Vec<usize> {
        self.rep.hdes()
    }

    /// `h_i = #{j ≥ i : j ∈ HDes}`.
    pub fn h_vec(&self) -> Vec<u64> {
        let hdes = self.hdes();
        (1..=self.len())
            .map(|i| hdes.iter().filter(|&&j| j >= i).count() as u64)
            .collect()
    }

    pub fn k_vec(&self) -> &[u64] {
        &self.k
    }

    /// `λ_i = r·h_i + k_i`.
    pub fn lambda_vec(&self) -> Vec<u64> {
        let r = self.r() as u64;
        self.h_vec()
            .iter()
            .zip(&self.k)
            .map(|(h, k)| r * h + k)
            .collect()
    }

    pub fn fmaj(&self) -> u64 {
        self.lambda_vec().iter().sum()
    }

    /// The inverse coset, `C_p` being central.
    pub fn inverse(&self) -> DualGroupElement {
        canonical_dual(&self.rep.inverse(), self.p).expect("shifted lifts are totally ordered")
    }

    /// Whether some representative has its first `k` colors zero and an
    /// increasing first `k` window.
    pub fn in_c_k(&self, k: usize) -> bool {
        let word = self.rep.word.word();
        if !word[..k].windows(2).all(|w| w[0] < w[1]) {
            return false;
        }
        if k == 0 {
            return true;
        }
        let step = self.r() / self.p;
        (0..self.p).any(|m| {
            let shift = m * step;
            self.rep.colors[..k]
                .iter()
                .all(|&z| (z + shift).is_multiple_of(self.r()))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ColoredWire {
            r: self.r(),
            p: Some(self.p),
            word: self.rep.word.word().to_vec(),
            colors: self.rep.colors.clone(),
        })
        .expect("dual element serializes")
    }
}

/// All color vectors in `Z_r^n`, lexicographically.
#[derive(Clone, Debug)]
struct ColorVectors {
    r: u32,
    next: Option<Vec<u32>>,
}

fn color_vectors(r: u32, n: usize) -> ColorVectors {
    ColorVectors {
        r,
        next: (r > 0 || n == 0).then(|| vec![0; n]),
    }
}

impl Iterator for ColorVectors {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for i in (0..succ.len()).rev() {
            succ[i] += 1;
            if succ[i] < self.r {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    }
}

/// `G(r,n)`: words in lexicographic order, then colors lexicographically.
pub fn enumerate_group(r: u32, n: usize) -> impl Iterator<Item = ColoredPermutation> {
    LinearExtensions::new(n, &[]).flat_map(move |word| {
        color_vectors(r, n).map(move |colors| ColoredPermutation {
            r,
            word: word.clone(),
            colors,
        })
    })
}

/// `G(r,p,n)`: color sum divisible by `p`.
pub fn enumerate_grpn(r: u32, p: u32, n: usize) -> Result<impl Iterator<Item = ColoredPermutation>> {
    check_rp(r, p)?;
    Ok(enumerate_group(r, n).filter(move |g| g.color_sum() % p as u64 == 0))
}

/// `G(r,p,n)*`, one canonical representative per coset: the representatives
/// with `z_n < r/p` (the shifted lifts differ by a constant vector, so the
/// least one has the least last entry).
pub fn enumerate_dual(r: u32, p: u32, n: usize) -> Result<impl Iterator<Item = DualGroupElement>> {
    check_rp(r, p)?;
    let step = r / p;
    Ok(enumerate_group(r, n)
        .filter(move |g| g.colors.last().is_none_or(|&z| z < step))
        .map(move |rep| {
            let k = minimal_lift(&rep.colors, r);
            DualGroupElement { p, rep, k }
        }))
}

/// The representatives `[σ_1^0, …, σ_k^0, g_{k+1}, …, g_n]` with
/// `σ_1 < … < σ_k`, each mapped to its dual element. For `k ≥ 1` distinct
/// representatives give distinct dual elements; for `k = 0` every dual
/// element appears `p` times (once per representative in `G(r,n)`).
pub fn c_k_set(
    r: u32,
    p: u32,
    n: usize,
    k: usize,
) -> Result<impl Iterator<Item = Result<DualGroupElement>>> {
    check_rp(r, p)?;
    if k >= n && !(n == 0 && k == 0) {
        return Err(Error::OutOfRange(format!("C_k needs k < n, got n={n}, k={k}")));
    }
    Ok(c_k_representatives(r, n, k).map(move |g| canonical_dual(&g, p)))
}

/// The `G(r,n)` elements behind [`c_k_set`].
pub fn c_k_representatives(r: u32, n: usize, k: usize) -> impl Iterator<Item = ColoredPermutation> {
    let chain: Vec<(usize, usize)> = (1..k.max(1)).map(|i| (i, i + 1)).collect();
    // σ_1 < … < σ_k on positions: enumerate inverses of words where values
    // 1..k appear left to right.
    let words: Vec<Permutation> = LinearExtensions::new(n, &chain)
        .map(|w| w.inverse())
        .sorted()
        .collect();
    words.into_iter().flat_map(move |word| {
        color_vectors(r, n - k).map(move |tail| {
            let mut colors = vec![0; k];
            colors.extend(tail);
            ColoredPermutation {
                r,
                word: word.clone(),
                colors,
            }
        })
    })
}

pub type CosetKey = (Vec<usize>, Vec<usize>, Vec<u32>);

/// Identifies the coset `g · G(r,k) · C_p`: the set of the first `k` values,
/// the tail word, and the least uniform shift of the tail colors.
pub fn right_coset_key(g: &ColoredPermutation, p: u32, k: usize) -> CosetKey {
    let word = g.word.word();
    let mut head: Vec<usize> = word[..k].to_vec();
    head.sort_unstable();
    let step = g.r / p;
    let tail_colors = (0..p)
        .map(|m| {
            g.colors[k..]
                .iter()
                .map(|&z| (z + m * step) % g.r)
                .collect::<Vec<_>>()
        })
        .min()
        .unwrap_or_default();
    (head, word[k..].to_vec(), tail_colors)
}

/// `Σ q^fmaj(g)`.
pub fn fmaj_distribution<'a>(elements: impl IntoIterator<Item = &'a DualGroupElement>) -> IntPolynomial {
    histogram(elements.into_iter().map(|g| (g.fmaj() as usize, 1)))
}

/// `Σ q^fmaj(g⁻¹)`.
pub fn fmaj_inverse_distribution<'a>(
    elements: impl IntoIterator<Item = &'a DualGroupElement>,
) -> IntPolynomial {
    histogram(elements.into_iter().map(|g| (g.inverse().fmaj() as usize, 1)))
}

/// `Σ (-1)^inv(|g|) q^fmaj(g⁻¹)`.
pub fn signed_fmaj_inverse_distribution<'a>(
    elements: impl IntoIterator<Item = &'a DualGroupElement>,
) -> IntPolynomial {
    histogram(elements.into_iter().map(|g| {
        let sign = if g.rep.word.inv() % 2 == 1 { -1 } else { 1 };
        (g.inverse().fmaj() as usize, sign)
    }))
}

fn histogram(entries: impl Iterator<Item = (usize, i64)>) -> IntPolynomial {
    let mut table: Vec<Vec<i64>> = Vec::new();
    for (e, c) in entries {
        if table.len() <= e {
            table.resize(e + 1, vec![0]);
        }
        table[e][0] += c;
    }
    IntPolynomial::from_dense(&["q"], &table)
}

/// `Π(r,n,k)`: first `n-k` entries increasing and uncolored, and the longest
/// uncolored increasing subsequence has length exactly `n-k`.
pub fn pi_set(r: u32, n: usize, k: usize) -> Result<impl Iterator<Item = ColoredPermutation>> {
    if k > n {
        return Err(Error::OutOfRange(format!("Π needs k <= n, got n={n}, k={k}")));
    }
    Ok(c_k_representatives(r, n, n - k).filter(move |g| g.is_z(0) == n - k))
}

/// An integer vector `f ∈ ℕ^n`, as produced by [`encode_compatible`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompatibleVector(pub Vec<u64>);

impl CompatibleVector {
    pub fn size(&self) -> u64 {
        self.0.iter().sum()
    }

    /// The `h` with `f_i ≡ h·r/p (mod r)` for all `i`, if any.
    pub fn nrp_class(&self, r: u32, p: u32) -> Option<u32> {
        residue_class(&self.0, r, p)
    }

    /// Membership in `𝒜`: `f_1 ≥ … ≥ f_k` and `(f_1, …, f_k) ∈ ℕ^k_(r,p)`.
    pub fn in_a(&self, r: u32, p: u32, k: usize) -> bool {
        let head = &self.0[..k];
        head.windows(2).all(|w| w[0] >= w[1]) && residue_class(head, r, p).is_some()
    }
}

fn residue_class(f: &[u64], r: u32, p: u32) -> Option<u32> {
    let (r64, step) = (r as u64, (r / p) as u64);
    let Some(&first) = f.first() else {
        return Some(0);
    };
    let res = first % r64;
    if res % step != 0 || f.iter().any(|&x| x % r64 != res) {
        return None;
    }
    Some((res / step) as u32)
}

/// `f_{σ_j} = λ_j(g) + r·λ_j + h·r/p`.
pub fn encode_compatible(g: &DualGroupElement, lambda: &[u64], h: u32) -> Result<CompatibleVector> {
    let n = g.len();
    if lambda.len() != n || !lambda.windows(2).all(|w| w[0] >= w[1]) {
        return Err(Error::OutOfRange(format!("{lambda:?} is not a partition with {n} parts")));
    }
    if h >= g.p {
        return Err(Error::OutOfRange(format!("h={h} must be below p={}", g.p)));
    }
    let r = g.r() as u64;
    let shift = h as u64 * (r / g.p as u64);
    let stat = g.lambda_vec();
    let mut f = vec![0u64; n];
    for j in 1..=n {
        f[g.rep.word.at(j) - 1] = stat[j - 1] + r * lambda[j - 1] + shift;
    }
    Ok(CompatibleVector(f))
}

/// Inverse of [`encode_compatible`]. The positions sorted by decreasing `f`
/// (ties by increasing index) give `|g|`; the colors are `f mod r` up to the
/// `C_p` shift, which fixes `g`; then `h` and `λ` follow.
pub fn decode_compatible(
    f: &CompatibleVector,
    r: u32,
    p: u32,
) -> Result<(DualGroupElement, Vec<u64>, u32)> {
    check_rp(r, p)?;
    let n = f.0.len();
    let r64 = r as u64;
    let mut order: Vec<usize> = (1..=n).collect();
    order.sort_by(|&a, &b| f.0[b - 1].cmp(&f.0[a - 1]).then(a.cmp(&b)));
    let sorted: Vec<u64> = order.iter().map(|&i| f.0[i - 1]).collect();
    let colors = sorted.iter().map(|&v| (v % r64) as u32).collect();
    let g = canonical_dual(&ColoredPermutation::new(r, order, colors)?, p)?;
    let stat = g.lambda_vec();
    let mismatch = || Error::DecodeMismatch(f.0.clone());
    let step = r64 / p as u64;
    let h = match n {
        0 => 0,
        _ => {
            let excess = sorted[n - 1].checked_sub(stat[n - 1]).ok_or_else(mismatch)?;
            ((excess % r64) / step) as u32
        }
    };
    let lambda = sorted
        .iter()
        .zip(&stat)
        .map(|(&v, &s)| {
            let rest = v.checked_sub(s + h as u64 * step).ok_or_else(mismatch)?;
            if rest % r64 != 0 {
                return Err(mismatch());
            }
            Ok(rest / r64)
        })
        .collect::<Result<Vec<u64>>>()?;
    if encode_compatible(&g, &lambda, h)? != *f {
        return Err(mismatch());
    }
    Ok((g, lambda, h))
}

/// `(λ_1(g) + λ_{|g(1)|}(g⁻¹), …)`.
pub fn colori_vector(g: &DualGroupElement) -> CompatibleVector {
    let own = g.lambda_vec();
    let inv = g.inverse().lambda_vec();
    CompatibleVector(
        (1..=g.len())
            .map(|i| own[i - 1] + inv[g.rep.word.at(i) - 1])
            .collect(),
    )
}

pub fn colori_check(g: &DualGroupElement) -> bool {
    colori_vector(g).nrp_class(g.r(), g.p).is_some()
}

/// All `f ∈ ℕ^n` with `|f| ≤ d`, lexicographically.
pub fn bounded_vectors(n: usize, d: u64) -> Vec<Vec<u64>> {
    fn rec(n: usize, budget: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for v in 0..=budget {
            prefix.push(v);
            rec(n, budget - v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

/// `Σ_{f g-compatible, |f| ≤ d} q^|f|`, by decoding every bounded vector.
pub fn fg_series_by_enumeration(g: &DualGroupElement, d: u64) -> Result<IntPolynomial> {
    let mut entries = Vec::new();
    for f in bounded_vectors(g.len(), d) {
        let f = CompatibleVector(f);
        let (owner, _, _) = decode_compatible(&f, g.r(), g.p)?;
        if owner == *g {
            entries.push((f.size() as usize, 1));
        }
    }
    Ok(histogram(entries.into_iter()).truncated(d as u32))
}

/// The product form of `F_g(q, …, q)` expanded to degree `d`:
/// `q^fmaj(g) / ((1-q^r)(1-q^{2r})⋯(1-q^{r(n-1)})(1-q^{rn/p}))`.
pub fn fg_series_closed_form(g: &DualGroupElement, d: u64) -> IntPolynomial {
    let (r, n) = (g.r() as u64, g.len() as u64);
    let d32 = d as u32;
    let mut series = IntPolynomial::monomial(&["q"], &[g.fmaj() as u32], 1).truncated(d32);
    let mut periods: Vec<u64> = (1..n).map(|i| r * i).collect();
    if n > 0 {
        periods.push(r * n / g.p as u64);
    }
    for m in periods {
        let mut geometric = IntPolynomial::zero(&["q"]);
        let mut e = 0;
        while e <= d {
            geometric += &IntPolynomial::monomial(&["q"], &[e as u32], 1);
            e += m;
        }
        series = (&series * &geometric).truncated(d32);
    }
    series
}

/// Counts, per right coset of `G(r,k)` in `G(r,p,n)*`, how many members of
/// `C_k` it contains; also returns the total number of such cosets.
pub fn coset_multiplicities(r: u32, p: u32, n: usize, k: usize) -> Result<(BTreeMap<CosetKey, usize>, usize)> {
    check_rp(r, p)?;
    let universe: std::collections::BTreeSet<_> = enumerate_group(r, n).map(|g| right_coset_key(&g, p, k)).collect();
    let mut counts = BTreeMap::new();
    for g in c_k_representatives(r, n, k) {
        *counts.entry(right_coset_key(&g, p, k)).or_insert(0) += 1;
    }
    Ok((counts, universe.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpoly::Sign;

    fn cp(r: u32, word: &[usize], colors: &[u32]) -> ColoredPermutation {
        ColoredPermutation::new(r, word.to_vec(), colors.to_vec()).unwrap()
    }

    fn example_element() -> DualGroupElement {
        let g = cp(6, &[2, 7, 6, 4, 8, 1, 5, 3], &[2, 3, 3, 5, 1, 1, 3, 2]);
        canonical_dual(&g, 3).unwrap()
    }

    #[test]
    fn worked_example() {
        let g = example_element();
        assert_eq!(g.hdes(), vec![2, 5]);
        assert_eq!(g.h_vec(), vec![2, 2, 1, 1, 1, 0, 0, 0]);
        assert_eq!(g.k_vec(), &[18, 13, 13, 9, 5, 5, 1, 0]);
        assert_eq!(g.lambda_vec(), vec![30, 25, 19, 15, 11, 5, 1, 0]);
        assert_eq!(g.fmaj(), 106);
    }

    #[test]
    fn inverses() {
        let id = ColoredPermutation::identity(3, 4);
        assert_eq!(id.inverse(), id);
        assert_eq!(cp(2, &[2, 1], &[0, 1]).inverse(), cp(2, &[2, 1], &[1, 0]));
        assert_eq!(
            cp(2, &[2, 1], &[0, 1]).multiply(&cp(3, &[1, 2], &[0, 0])),
            Err(Error::ModulusMismatch(2, 3))
        );
    }

    #[test]
    fn group_laws() {
        for (r, n) in [(2u32, 3usize), (3, 3)] {
            let elems: Vec<_> = enumerate_group(r, n).collect();
            let id = ColoredPermutation::identity(r, n);
            for g in &elems {
                assert_eq!(g.inverse().inverse(), *g);
                assert_eq!(g.multiply(&g.inverse()).unwrap(), id);
                assert_eq!(g.inverse().multiply(g).unwrap(), id);
                assert_eq!(g.multiply(&id).unwrap(), *g);
            }
            // associativity on a deterministic sample of triples
            for (i, a) in elems.iter().enumerate().step_by(7) {
                for b in elems.iter().skip(i % 5).step_by(11) {
                    for c in elems.iter().skip(i % 3).step_by(13) {
                        let left = a.multiply(b).unwrap().multiply(c).unwrap();
                        let right = a.multiply(&b.multiply(c).unwrap()).unwrap();
                        assert_eq!(left, right);
                    }
                }
            }
        }
    }

    #[test]
    fn action_on_colored_integers() {
        // g(i^c) = σ_i^{z_i + c}; (gh)(i^0) = g(h(i^0))
        let g = cp(3, &[3, 1, 2], &[1, 2, 0]);
        let h = cp(3, &[2, 3, 1], &[2, 2, 1]);
        let apply = |x: &ColoredPermutation, i: usize, c: u32| (x.abs().at(i), (x.colors()[i - 1] + c) % 3);
        let gh = g.multiply(&h).unwrap();
        for i in 1..=3 {
            let (j, c) = apply(&h, i, 0);
            assert_eq!(apply(&gh, i, 0), apply(&g, j, c));
        }
    }

    #[test]
    fn cardinalities() {
        assert_eq!(enumerate_group(2, 2).count(), 8);
        assert_eq!(enumerate_grpn(2, 2, 2).unwrap().count(), 4);
        assert_eq!(enumerate_dual(6, 3, 3).unwrap().count(), 6 * 6 * 6 * 6 / 3);
        assert!(enumerate_dual(6, 4, 3).is_err());
    }

    #[test]
    fn dual_enumeration_matches_canonicalization() {
        for (r, p, n) in [(2, 2, 3), (4, 2, 3), (6, 3, 2), (6, 6, 2), (3, 3, 3)] {
            let direct: std::collections::BTreeSet<_> = enumerate_dual(r, p, n).unwrap().collect();
            let mut counts = BTreeMap::new();
            for g in enumerate_group(r, n) {
                *counts.entry(canonical_dual(&g, p).unwrap()).or_insert(0) += 1;
            }
            assert!(counts.values().all(|&c| c == p as usize));
            assert_eq!(direct, counts.keys().cloned().collect());
        }
    }

    #[test]
    fn trivial_duals() {
        let g = cp(4, &[2, 3, 1], &[3, 1, 2]);
        let d = canonical_dual(&g, 1).unwrap();
        assert_eq!(d.rep(), &g);
        assert_eq!(d.k_vec(), minimal_lift(g.colors(), 4).as_slice());
        for (r, p) in [(2, 2), (6, 3), (4, 1)] {
            let id = canonical_dual(&ColoredPermutation::identity(r, 4), p).unwrap();
            assert_eq!(id.k_vec(), &[0, 0, 0, 0]);
        }
    }

    #[test]
    fn fmaj_specializes_to_maj() {
        for g in enumerate_dual(1, 1, 5).unwrap() {
            assert_eq!(g.fmaj() as usize, g.rep().abs().maj());
        }
    }

    #[test]
    fn lambda_is_a_color_lift() {
        for r in 1..=6u32 {
            for p in (1..=r).filter(|p| r % p == 0) {
                for n in 1..=3 {
                    for g in enumerate_dual(r, p, n).unwrap() {
                        let lambda = g.lambda_vec();
                        assert!(lambda.windows(2).all(|w| w[0] >= w[1]));
                        for (l, &z) in lambda.iter().zip(g.rep().colors()) {
                            assert_eq!(l % r as u64, z as u64);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn k_vector_is_minimal() {
        for (r, p) in [(2u32, 1u32), (2, 2), (4, 2), (3, 3)] {
            for g in enumerate_dual(r, p, 3).unwrap() {
                let k = g.k_vec().to_vec();
                let step = r / p;
                let bound: Vec<u64> = k.iter().map(|x| x + r as u64).collect();
                for beta in bound.iter().map(|&b| 0..=b).multi_cartesian_product() {
                    if !beta.windows(2).all(|w| w[0] >= w[1]) {
                        continue;
                    }
                    let lifts = (0..p).any(|m| {
                        beta.iter()
                            .zip(g.rep().colors())
                            .all(|(&b, &z)| b % r as u64 == ((z + m * step) % r) as u64)
                    });
                    if lifts {
                        assert!(beta.iter().zip(&k).all(|(b, k)| b >= k), "{beta:?} vs {k:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn c_k_hand_example() {
        let set: Vec<_> = c_k_set(2, 1, 2, 1)
            .unwrap()
            .map(|g| g.unwrap().rep().clone())
            .collect();
        assert_eq!(
            set,
            vec![
                cp(2, &[1, 2], &[0, 0]),
                cp(2, &[1, 2], &[0, 1]),
                cp(2, &[2, 1], &[0, 0]),
                cp(2, &[2, 1], &[0, 1]),
            ]
        );
        let elems: Vec<_> = c_k_set(2, 1, 2, 1).unwrap().map(|g| g.unwrap()).collect();
        let fm: Vec<u64> = elems.iter().map(|g| g.inverse().fmaj()).collect();
        assert_eq!(fm, vec![0, 3, 2, 1]);
        assert_eq!(fmaj_inverse_distribution(&elems), IntPolynomial::bracket(4, Sign::Plus));
    }

    #[test]
    fn c_k_sizes() {
        for (r, n, k) in [(2u32, 3usize, 1usize), (3, 3, 2), (2, 4, 2)] {
            let expected = r.pow((n - k) as u32) as usize * (1..=n).product::<usize>() / (1..=k).product::<usize>();
            assert_eq!(c_k_set(r, 1, n, k).unwrap().count(), expected);
        }
        let all: Vec<_> = c_k_set(2, 2, 2, 0).unwrap().map(|g| g.unwrap()).collect();
        assert_eq!(all.len(), 8);
        let distinct: std::collections::BTreeSet<_> = all.into_iter().collect();
        assert_eq!(distinct.len(), 4);
    }

    #[test]
    fn is_z_examples() {
        assert_eq!(ColoredPermutation::identity(2, 4).is_z(0), 4);
        let g = cp(2, &[2, 1, 3], &[1, 0, 0]);
        assert_eq!(g.is_z(0), 2);
        assert_eq!(g.is_z(1), 1);
    }

    #[test]
    fn pi_set_for_r_one_is_panova_set() {
        for n in 1..=6 {
            for k in 0..=n / 2 {
                let set: Vec<Vec<usize>> = pi_set(1, n, k).unwrap().map(|g| g.abs().word().to_vec()).collect();
                let expected: Vec<Vec<usize>> = LinearExtensions::new(n, &[])
                    .filter(|s| s.word()[..n - k].windows(2).all(|w| w[0] < w[1]))
                    .filter(|s| ColoredPermutation::new(1, s.word().to_vec(), vec![0; n]).unwrap().is_z(0) == n - k)
                    .map(|s| s.word().to_vec())
                    .sorted()
                    .collect();
                assert_eq!(set, expected);
            }
        }
    }

    #[test]
    fn pi_set_k_zero_is_identity() {
        let set: Vec<_> = pi_set(3, 4, 0).unwrap().collect();
        assert_eq!(set, vec![ColoredPermutation::identity(3, 4)]);
    }

    #[test]
    fn compatible_vector_round_trips() {
        let id = canonical_dual(&ColoredPermutation::identity(2, 3), 1).unwrap();
        assert_eq!(encode_compatible(&id, &[0, 0, 0], 0).unwrap(), CompatibleVector(vec![0, 0, 0]));
        for g in enumerate_dual(2, 1, 3).unwrap() {
            for lambda in (0..=4u64).combinations_with_replacement(3) {
                let lambda: Vec<u64> = lambda.into_iter().rev().collect();
                let f = encode_compatible(&g, &lambda, 0).unwrap();
                assert_eq!(decode_compatible(&f, 2, 1).unwrap(), (g.clone(), lambda, 0));
            }
        }
        for f in (0..6u64).map(|_| 0..6u64).multi_cartesian_product() {
            let f = CompatibleVector(f);
            let (g, lambda, h) = decode_compatible(&f, 2, 2).unwrap();
            assert_eq!(encode_compatible(&g, &lambda, h).unwrap(), f);
        }
        assert!(encode_compatible(&id, &[0, 1, 0], 0).is_err());
        assert!(encode_compatible(&id, &[0, 0, 0], 1).is_err());
    }

    #[test]
    fn fg_series_examples() {
        // r = p = 1, g = identity: partitions with at most n parts, by size
        let g = canonical_dual(&ColoredPermutation::identity(1, 3), 1).unwrap();
        let series = fg_series_by_enumeration(&g, 3).unwrap();
        assert_eq!(series, IntPolynomial::from_dense(&["q"], &[vec![1], vec![1], vec![2], vec![3]]));
        assert_eq!(fg_series_closed_form(&g, 3), series);
        let ex = example_element();
        let low = fg_series_closed_form(&ex, 106);
        assert_eq!(low, IntPolynomial::monomial(&["q"], &[106], 1));
    }

    #[test]
    fn colori_examples() {
        let id = canonical_dual(&ColoredPermutation::identity(4, 3), 2).unwrap();
        assert_eq!(colori_vector(&id), CompatibleVector(vec![0, 0, 0]));
        assert!(colori_check(&id));
    }

    #[test]
    fn json_formats() {
        let g = cp(6, &[2, 7, 6, 4, 8, 1, 5, 3], &[2, 3, 3, 5, 1, 1, 3, 2]);
        let s = g.to_json();
        assert_eq!(s, r#"{"r":6,"word":[2,7,6,4,8,1,5,3],"colors":[2,3,3,5,1,1,3,2]}"#);
        assert_eq!(ColoredPermutation::from_json_str(&s).unwrap(), g);
        let d = example_element().to_json();
        assert!(d.contains(r#""p":3"#));
    }
}
