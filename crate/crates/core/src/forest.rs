//! Forest posets and their labellings.
//!
//! A forest is stored as a parent map: vertex `x` is covered by `parent(x)`,
//! roots have no parent. Vertices are named `1..=n` at the API boundary
//! (`x_1, …, x_n`). A labelling is a bijection from vertices to `[n]`.
//!
//! Besides the general statistics this module builds the two special families
//! used by the identities: `T(n,k)` (isolated points next to a chain) and the
//! rakes `R(n,k)` (k teeth under a handle), the canonical rake classes, and
//! the label-pairing involution used for even `n`.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::permstat::{LinearExtensions, Permutation};
use crate::qpoly::IntPolynomial;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ForestPoset {
    /// 0-indexed parent of each 0-indexed vertex.
    parent: Vec<Option<usize>>,
}

impl ForestPoset {
    /// `parents[i]` is the (1-indexed) parent of vertex `i + 1`.
    pub fn new(parents: &[Option<usize>]) -> Result<Self> {
        let n = parents.len();
        if n > 64 {
            return Err(Error::InvalidForest(format!("{n} vertices exceeds 64")));
        }
        let mut parent = Vec::with_capacity(n);
        for (i, p) in parents.iter().enumerate() {
            match *p {
                None => parent.push(None),
                Some(v) if v == 0 || v > n => {
                    return Err(Error::InvalidForest(format!(
                        "vertex {} has parent {v} outside 1..={n}",
                        i + 1
                    )))
                }
                Some(v) if v == i + 1 => {
                    return Err(Error::InvalidForest(format!("vertex {v} is its own parent")))
                }
                Some(v) => parent.push(Some(v - 1)),
            }
        }
        let forest = ForestPoset { parent };
        for x in 0..n {
            let mut steps = 0;
            let mut cur = forest.parent[x];
            while let Some(y) = cur {
                steps += 1;
                if steps > n {
                    return Err(Error::InvalidForest(format!(
                        "cycle through vertex {}",
                        x + 1
                    )));
                }
                cur = forest.parent[y];
            }
        }
        Ok(forest)
    }

    pub fn antichain(n: usize) -> Self {
        ForestPoset {
            parent: vec![None; n],
        }
    }

    /// `x_1 < x_2 < … < x_n`.
    pub fn chain(n: usize) -> Self {
        ForestPoset {
            parent: (0..n).map(|i| (i + 1 < n).then_some(i + 1)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// 1-indexed parent of 1-indexed vertex `x`.
    pub fn parent(&self, x: usize) -> Option<usize> {
        self.parent[x - 1].map(|p| p + 1)
    }

    pub fn parents(&self) -> Vec<Option<usize>> {
        self.parent.iter().map(|p| p.map(|v| v + 1)).collect()
    }

    fn ancestors(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::successors(self.parent[x], move |&y| self.parent[y])
    }

    /// `x < y` in the poset (1-indexed).
    pub fn less(&self, x: usize, y: usize) -> bool {
        self.ancestors(x - 1).any(|a| a == y - 1)
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.less(x, y) || self.less(y, x)
    }

    /// One covers the other.
    pub fn adjacent(&self, x: usize, y: usize) -> bool {
        self.parent[x - 1] == Some(y - 1) || self.parent[y - 1] == Some(x - 1)
    }

    /// `h_x = |{a ≤ x}|`, in vertex order.
    pub fn hook_lengths(&self) -> Vec<usize> {
        let mut hooks = vec![1; self.len()];
        for x in 0..self.len() {
            for a in self.ancestors(x) {
                hooks[a] += 1;
            }
        }
        hooks
    }

    /// Rooted-forest isomorphism invariant (nested parenthesis encoding).
    pub fn canonical_form(&self) -> String {
        let n = self.len();
        let mut children = vec![Vec::new(); n];
        for (x, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(x);
            }
        }
        fn encode(x: usize, children: &[Vec<usize>]) -> String {
            let mut parts: Vec<String> = children[x].iter().map(|&c| encode(c, children)).collect();
            parts.sort();
            format!("({})", parts.concat())
        }
        let mut roots: Vec<String> = (0..n)
            .filter(|&x| self.parent[x].is_none())
            .map(|x| encode(x, &children))
            .collect();
        roots.sort();
        roots.concat()
    }

    /// One representative per isomorphism class of forests on `n` vertices.
    /// Every forest admits a vertex order in which parents come later, so it
    /// is enough to scan those `n!` parent maps.
    pub fn all_shapes(n: usize) -> Vec<ForestPoset> {
        let choices: Vec<Vec<Option<usize>>> = (0..n)
            .map(|i| std::iter::once(None).chain((i + 1..n).map(Some)).collect())
            .collect();
        let mut seen = BTreeMap::new();
        for parent in choices.into_iter().multi_cartesian_product() {
            let forest = ForestPoset { parent };
            seen.entry(forest.canonical_form()).or_insert(forest);
        }
        if n == 0 {
            seen.insert(String::new(), ForestPoset::antichain(0));
        }
        seen.into_values().collect()
    }

    /// A random forest in which each vertex picks its parent uniformly among
    /// "no parent" and the later vertices.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ForestPoset {
        let parent = (0..n)
            .map(|i| {
                let pick = rng.gen_range(i..n);
                (pick != i).then_some(pick)
            })
            .collect();
        ForestPoset { parent }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let wire = ForestWire {
            n: self.len(),
            parent: self
                .parent
                .iter()
                .enumerate()
                .filter_map(|(x, p)| p.map(|p| (x + 1, p + 1)))
                .collect(),
        };
        serde_json::to_value(wire).expect("forest serializes")
    }

    /// Parses `{"n":7,"parent":{"1":5,…}}`; absent keys are roots.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let wire: ForestWire =
            serde_json::from_str(s).map_err(|e| Error::InvalidForest(e.to_string()))?;
        let mut parents = vec![None; wire.n];
        for (&x, &p) in &wire.parent {
            if x == 0 || x > wire.n {
                return Err(Error::InvalidForest(format!("vertex {x} outside 1..={}", wire.n)));
            }
            parents[x - 1] = Some(p);
        }
        ForestPoset::new(&parents)
    }
}

#[derive(Serialize, Deserialize)]
struct ForestWire {
    n: usize,
    #[serde(default)]
    parent: BTreeMap<usize, usize>,
}

/// `T(n,k)`: `x_i < x_j` iff `n-k < i < j`; `n-k` isolated vertices next to a
/// `k`-chain.
pub fn make_tnk(n: usize, k: usize) -> Result<ForestPoset> {
    if k > n {
        return Err(Error::OutOfRange(format!("T(n,k) needs k <= n, got n={n}, k={k}")));
    }
    Ok(ForestPoset {
        parent: (0..n)
            .map(|i| (i >= n - k && i + 1 < n).then_some(i + 1))
            .collect(),
    })
}

/// The rake `R(n,k)`: `x_i < x_j` iff `i, k < j`. Teeth `x_1..x_k` sit under
/// the handle `x_{k+1} < … < x_n`.
pub fn make_rake(n: usize, k: usize) -> Result<ForestPoset> {
    if !(k < n || (k <= 1 && k == n)) {
        return Err(Error::OutOfRange(format!("R(n,k) needs k < n, got n={n}, k={k}")));
    }
    let base = k.max(1);
    Ok(ForestPoset {
        parent: (0..n)
            .map(|i| {
                if i + 1 >= n {
                    None
                } else if i < base {
                    Some(base)
                } else {
                    Some(i + 1)
                }
            })
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Labelling {
    forest: ForestPoset,
    /// `labels[i] = w(x_{i+1})`.
    labels: Vec<usize>,
}

impl Labelling {
    pub fn new(forest: ForestPoset, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != forest.len() {
            return Err(Error::InvalidLabelling(format!(
                "{} labels for {} vertices",
                labels.len(),
                forest.len()
            )));
        }
        Permutation::new(labels.clone())
            .map_err(|_| Error::InvalidLabelling(format!("{labels:?} is not a bijection")))?;
        Ok(Labelling { forest, labels })
    }

    /// `w(x_i) = i`.
    pub fn natural(forest: ForestPoset) -> Self {
        let labels = (1..=forest.len()).collect();
        Labelling { forest, labels }
    }

    pub fn forest(&self) -> &ForestPoset {
        &self.forest
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// `w(x)` for 1-indexed `x`.
    pub fn label(&self, x: usize) -> usize {
        self.labels[x - 1]
    }

    /// `w⁻¹(a)`.
    pub fn vertex_of(&self, a: usize) -> usize {
        self.labels.iter().position(|&l| l == a).expect("label in range") + 1
    }

    /// Pairs `x < y` with `w(x) > w(y)`.
    pub fn inv(&self) -> usize {
        (0..self.labels.len())
            .map(|x| {
                self.forest
                    .ancestors(x)
                    .filter(|&y| self.labels[x] > self.labels[y])
                    .count()
            })
            .sum()
    }

    /// Vertices covered by a smaller label.
    pub fn descents(&self) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&x| matches!(self.forest.parent[x], Some(y) if self.labels[x] > self.labels[y]))
            .map(|x| x + 1)
            .collect()
    }

    /// `Σ_{x ∈ Des(w)} h_x`.
    pub fn maj(&self) -> usize {
        let hooks = self.forest.hook_lengths();
        self.descents().iter().map(|&x| hooks[x - 1]).sum()
    }

    /// Permutations `σ` with `σ⁻¹(w(x)) < σ⁻¹(w(y))` whenever `x < y`.
    pub fn linear_extensions(&self) -> LinearExtensions {
        let relations: Vec<(usize, usize)> = (0..self.labels.len())
            .filter_map(|x| self.forest.parent[x].map(|y| (self.labels[x], self.labels[y])))
            .collect();
        LinearExtensions::new(self.labels.len(), &relations)
    }

    /// `n - w(x_n)` (rake top is `x_n`).
    pub fn r_stat(&self) -> usize {
        let n = self.labels.len();
        n - self.labels[n - 1]
    }
}

/// `Σ_{w ∈ W(P)} q^maj(w)` over all `n!` labellings.
pub fn maj_distribution(forest: &ForestPoset) -> IntPolynomial {
    label_distribution(forest, false)
}

/// `Σ_{w ∈ W(P)} (-1)^inv(w) q^maj(w)` (or unsigned).
pub fn label_distribution(forest: &ForestPoset, signed: bool) -> IntPolynomial {
    let n = forest.len();
    let max_maj: usize = forest.hook_lengths().iter().sum();
    let mut table = vec![vec![0i64]; max_maj + 1];
    for labels in LinearExtensions::new(n, &[]) {
        let w = Labelling {
            forest: forest.clone(),
            labels: labels.word().to_vec(),
        };
        let sign = if signed && w.inv() % 2 == 1 { -1 } else { 1 };
        table[w.maj()][0] += sign;
    }
    IntPolynomial::from_dense(&["q"], &table)
}

/// `Σ_{σ ∈ L(w)} q^maj(σ)`.
pub fn le_maj_distribution(w: &Labelling) -> IntPolynomial {
    let n = w.labels.len();
    let mut table = vec![vec![0i64]; n * n.saturating_sub(1) / 2 + 1];
    for sigma in w.linear_extensions() {
        table[sigma.maj()][0] += 1;
    }
    IntPolynomial::from_dense(&["q"], &table)
}

/// Canonical representatives of `W(R(n,k)) / Aut`: labellings whose teeth
/// labels increase with the vertex index, in lexicographic order of the label
/// vector. `n!/k!` of them.
pub fn rake_classes(n: usize, k: usize) -> Result<impl Iterator<Item = Labelling>> {
    let forest = make_rake(n, k)?;
    let teeth = k.max(1);
    Ok((1..=n).combinations(teeth).flat_map(move |tooth_labels| {
        let rest: Vec<usize> = (1..=n).filter(|v| !tooth_labels.contains(v)).collect();
        let forest = forest.clone();
        let len = rest.len();
        rest.into_iter().permutations(len).map(move |handle| {
            let mut labels = tooth_labels.clone();
            labels.extend(handle);
            Labelling {
                forest: forest.clone(),
                labels,
            }
        })
    }))
}

/// `Σ_{w ∈ R(n,k)} (-1)^inv(w) q^maj(w) t^r(w)` over `(q, t)`.
pub fn rake_signed_distribution(n: usize, k: usize) -> Result<IntPolynomial> {
    rake_distribution(n, k, true)
}

pub fn rake_distribution(n: usize, k: usize, signed: bool) -> Result<IntPolynomial> {
    let max_maj = n * (n + 1) / 2;
    let mut table = vec![vec![0i64; n]; max_maj + 1];
    for w in rake_classes(n, k)? {
        let sign = if signed && w.inv() % 2 == 1 { -1 } else { 1 };
        table[w.maj()][w.r_stat()] += sign;
    }
    Ok(IntPolynomial::from_dense(&["q", "t"], &table))
}

/// Swaps labels `2i-1` and `2i` for the least `i` at which their vertices are
/// comparable but not adjacent; the identity if there is no such `i`.
pub fn phi(w: &Labelling) -> Labelling {
    let n = w.labels.len();
    for i in 1..=n / 2 {
        let (a, b) = (w.vertex_of(2 * i - 1), w.vertex_of(2 * i));
        if w.forest.comparable(a, b) && !w.forest.adjacent(a, b) {
            let mut labels = w.labels.clone();
            labels.swap(a - 1, b - 1);
            return Labelling {
                forest: w.forest.clone(),
                labels,
            };
        }
    }
    w.clone()
}

/// Splits a fixed point of [`phi`] on `R(n,k)`, `n` even, into a class of
/// `R(n/2, ⌊k/2⌋)` and the 0-1 orientation vector of its adjacent label pairs.
///
/// Label pairs `{2i-1, 2i}` lying in the teeth become teeth `i` of the half
/// rake; the remaining (adjacent) pairs fill the handle bottom to top in the
/// order of the vertex carrying `2i`. `a_j = 1` iff `2i_j` sits below
/// `2i_j - 1`.
pub fn halve(w: &Labelling, k: usize) -> Result<(Labelling, Vec<u8>)> {
    let n = w.labels.len();
    if n % 2 == 1 {
        return Err(Error::OutOfRange(format!("halving needs n even, got {n}")));
    }
    if w.forest != make_rake(n, k)? {
        return Err(Error::InvalidLabelling(format!("not a labelling of R({n},{k})")));
    }
    let teeth = k.max(1);
    if !w.labels[..teeth].windows(2).all(|p| p[0] < p[1]) {
        return Err(Error::InvalidLabelling("teeth labels are not increasing".into()));
    }
    if phi(w) != *w {
        return Err(Error::NotFixedPoint);
    }
    let half = n / 2;
    let mut tooth_pairs = BTreeSet::new();
    // (vertex of 2i, i)
    let mut handle_pairs = Vec::new();
    for i in 1..=half {
        let (lo, hi) = (w.vertex_of(2 * i - 1), w.vertex_of(2 * i));
        if lo <= k && hi <= k {
            tooth_pairs.insert(i);
        } else {
            debug_assert!(w.forest.adjacent(lo, hi));
            handle_pairs.push((hi, i));
        }
    }
    handle_pairs.sort_unstable();
    let half_k = k / 2;
    if tooth_pairs.len() != half_k || handle_pairs.len() != half - half_k {
        return Err(Error::InvalidLabelling(format!(
            "{} tooth pairs and {} handle pairs do not fit R({half},{half_k})",
            tooth_pairs.len(),
            handle_pairs.len()
        )));
    }
    let mut labels: Vec<usize> = tooth_pairs.into_iter().collect();
    labels.extend(handle_pairs.iter().map(|&(_, i)| i));
    let a = handle_pairs
        .iter()
        .map(|&(hi, i)| u8::from(hi < w.vertex_of(2 * i - 1)))
        .collect();
    let bar = Labelling {
        forest: make_rake(half, half_k)?,
        labels,
    };
    Ok((bar, a))
}
