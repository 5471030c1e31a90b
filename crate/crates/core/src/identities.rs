//! Closed forms and recursions for the signed and unsigned Mahonian
//! identities, and a driver that checks each one against enumeration.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest::{self, ForestPoset, Labelling};
use crate::permstat;
use crate::qpoly::{IntPolynomial, Sign};
use crate::wreath::{self, CompatibleVector};

const QZ: [&str; 2] = ["q", "z"];
const QT: [&str; 2] = ["q", "t"];

fn eps(e: usize) -> Sign {
    Sign::parity(e as u64)
}

fn br(n: usize, sign: Sign) -> IntPolynomial {
    IntPolynomial::bracket(n as u32, sign)
}

/// `Π_{j ∈ range} [j]_{sign(j)·q}`.
fn product(range: impl IntoIterator<Item = usize>, sign: impl Fn(usize) -> Sign) -> IntPolynomial {
    range
        .into_iter()
        .fold(IntPolynomial::one(&["q"]), |acc, j| &acc * &br(j, sign(j)))
}

fn mono(vars: &[&str], exps: &[usize], c: i64) -> IntPolynomial {
    let exps: Vec<u32> = exps.iter().map(|&e| e as u32).collect();
    IntPolynomial::monomial(vars, &exps, c)
}

/// `(-q)^e`.
fn neg_q_pow(e: usize) -> IntPolynomial {
    mono(&["q"], &[e], eps(e).as_i64())
}

fn check_range(ok: bool, what: &str, n: usize, k: usize) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{what}: n={n}, k={k}")))
    }
}

/// `s_{n,k}(q,z)` from the recursion in `n`, with `s_{n,n} = 1` and
/// `s_{n,0} = s_{n,1}`.
pub fn s_recur(n: usize, k: usize) -> Result<IntPolynomial> {
    check_range(k <= n, "s_recur needs k <= n", n, k)?;
    let mut memo = HashMap::new();
    s_recur_memo(n, k, &mut memo)
}

fn s_recur_memo(
    n: usize,
    k: usize,
    memo: &mut HashMap<(usize, usize), IntPolynomial>,
) -> Result<IntPolynomial> {
    let k = if n > 0 { permstat::normalize_k(k) } else { 0 };
    if k == n {
        return Ok(IntPolynomial::one(&QZ));
    }
    if let Some(p) = memo.get(&(n, k)) {
        return Ok(p.clone());
    }
    let prev = s_recur_memo(n - 1, k, memo)?;
    let prev_at_one = prev.eval_at_one("z")?.lift_to(&QZ)?;
    let prev_neg = prev.substitute_sign("z")?;
    let lower = s_recur_memo(n - 1, k - 1, memo)?.eval_at_one("z")?;
    let z_top = mono(&QZ, &[0, n - k], 1);

    let first = &(&z_top.scale(eps(k).as_i64()) + &neg_q_pow(n - 1)) * &prev_at_one;
    let one_minus = &IntPolynomial::one(&["q"]) - &mono(&["q"], &[n - 1], 1);
    let second = &(&mono(&QZ, &[0, 1], eps(n).as_i64()) * &one_minus) * &prev_neg;
    let one_plus_z = &IntPolynomial::one(&QZ) + &mono(&QZ, &[0, 1], 1);
    let out = &(&first + &second).exact_div(&one_plus_z)? + &(&z_top * &lower);
    memo.insert((n, k), out.clone());
    Ok(out)
}

/// `s_{n,n-1}(q,z) = z[n-1]_{-q} + (-q)^{n-1}`.
pub fn lemma_n_n1(n: usize) -> Result<IntPolynomial> {
    check_range(n >= 1, "needs n >= 1", n, n.saturating_sub(1))?;
    let z = mono(&QZ, &[0, 1], 1);
    Ok(&(&z * &br(n - 1, Sign::Minus)) + &neg_q_pow(n - 1))
}

/// The explicit formula for `s_{n,k}(q,z)`, `1 ≤ k < n`. The case `k = n-1`
/// uses [`lemma_n_n1`].
pub fn s_closed(n: usize, k: usize) -> Result<IntPolynomial> {
    let k = permstat::normalize_k(k);
    check_range(k < n, "s_closed needs 1 <= k < n", n, k)?;
    if k == n - 1 {
        return lemma_n_n1(n);
    }
    let zi = |i: usize| mono(&QZ, &[0, i], 1);
    if k % 2 == 1 {
        let prefix = product(k + 1..n, |j| eps(j + 1));
        let mut tail = &zi(n - k) * &br(k, eps(n - 1));
        for i in 0..n - k {
            tail += &mono(&QZ, &[n - i - 1, i], eps((n + 1) * (n - i - 1)).as_i64());
        }
        return Ok(&prefix * &tail);
    }
    let prefix = product(k + 2..n, |j| eps(j + 1));
    let head = br(k + 1, eps(n));
    let mut inner = IntPolynomial::zero(&QZ);
    for i in 0..n - k {
        inner += &(&(&head * &br(n - i - 1, eps(n + 1))) * &zi(i));
    }
    let diff = &br(k, Sign::Minus) - &br(k, Sign::Plus);
    for i in (0..n - k).step_by(2) {
        inner += &(&mono(&QZ, &[n - i - 1, i], 1) * &diff);
    }
    let z_minus_one = &zi(1) - &IntPolynomial::one(&QZ);
    let body = &(&head * &br(n, eps(n - 1))) + &(&z_minus_one * &inner);
    Ok(&prefix * &body)
}

/// `[k+1]_{ε^{k+n+nk}q} [k+2]_{ε^{k+1}q} ⋯ [n]_{ε^{n-1}q}`.
pub fn s_corollary(n: usize, k: usize) -> Result<IntPolynomial> {
    check_range(k <= n, "needs k <= n", n, k)?;
    let k = if n > 0 { permstat::normalize_k(k) } else { 0 };
    if k == n {
        return Ok(IntPolynomial::one(&["q"]));
    }
    let first = br(k + 1, eps(k + n + n * k));
    Ok(&first * &product(k + 2..=n, |j| eps(j - 1)))
}

/// `[2]_{-q}[3]_q ⋯ [n]_{ε^{n-1}q}`.
pub fn gessel_simion(n: usize) -> IntPolynomial {
    product(2..=n, |j| eps(j - 1))
}

/// `r_{n,k}(q,t)` from the recursion in `n`, starting at
/// `r_{k+1,k} = [k+1]_{-qt}`.
pub fn r_recur(n: usize, k: usize) -> Result<IntPolynomial> {
    let k = permstat::normalize_k(k);
    check_range(k < n, "r_recur needs k < n", n, k)?;
    let mut r = IntPolynomial::zero(&QT);
    for i in 0..=k {
        r += &mono(&QT, &[i, i], eps(i).as_i64());
    }
    let one_plus_t = &IntPolynomial::one(&QT) + &mono(&QT, &[0, 1], 1);
    for m in k + 2..=n {
        let at_one = r.eval_at_one("t")?.lift_to(&QT)?;
        let neg = r.substitute_sign("t")?;
        let one_minus = &IntPolynomial::one(&["q"]) - &mono(&["q"], &[m - 1], 1);
        let first = &(&mono(&QT, &[0, 1], 1) * &one_minus) * &neg;
        let coeff = &IntPolynomial::one(&QT) + &mono(&QT, &[m - 1, m], eps(m - 1).as_i64());
        r = (&first + &(&coeff * &at_one)).exact_div(&one_plus_t)?;
    }
    Ok(r)
}

/// `[k+1]_{-q}[k+2]_q ⋯ [n-1]_{ε^n q}[n]_{ε^{n+1}qt}` for odd `k < n`.
pub fn r_closed_odd(n: usize, k: usize) -> Result<IntPolynomial> {
    check_range(k % 2 == 1 && k < n, "r_closed_odd needs odd k < n", n, k)?;
    let mut last = IntPolynomial::zero(&QT);
    for i in 0..n {
        last += &mono(&QT, &[i, i], eps((n + 1) * i).as_i64());
    }
    Ok(&product(k + 1..n, |j| eps(j + 1)) * &last)
}

/// `r_{n,k}(q) = [k+1]_{ε^k q}[k+2]_{ε^{k+1}q} ⋯ [n]_{-q}` for even `n`.
pub fn r_closed_even_n(n: usize, k: usize) -> Result<IntPolynomial> {
    check_range(n.is_multiple_of(2) && k < n, "r_closed_even_n needs even n and k < n", n, k)?;
    Ok(product(k + 1..=n, |j| eps(j - 1)))
}

fn factorial(n: usize) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// `(n! / Π h_x) Π [h_x]_q`.
pub fn bw_forest_rhs(forest: &ForestPoset) -> IntPolynomial {
    let hooks = forest.hook_lengths();
    let denom: BigInt = hooks.iter().map(|&h| BigInt::from(h)).product();
    product(hooks, |_| Sign::Plus).scale(factorial(forest.len()) / denom)
}

/// `q^maj(w) [n]_q! / Π [h_x]_q`.
pub fn bw_extension_rhs(w: &Labelling) -> Result<IntPolynomial> {
    let num = mono(&["q"], &[w.maj()], 1);
    let num = &num * &product(1..=w.labels().len(), |_| Sign::Plus);
    num.exact_div(&product(w.forest().hook_lengths(), |_| Sign::Plus))
}

fn check_rp(r: u32, p: u32, n: usize, k: usize) -> Result<()> {
    if r == 0 || p == 0 || !r.is_multiple_of(p) || k >= n {
        return Err(Error::OutOfRange(format!("need p | r and k < n, got r={r}, p={p}, n={n}, k={k}")));
    }
    Ok(())
}

/// `[d_1]_q ⋯ [d_n]_q` with `d_i = ri` for `i < n` and `d_n = rn/p`.
pub fn fmaj_dual_rhs(r: u32, p: u32, n: usize) -> Result<IntPolynomial> {
    if n == 0 {
        return Ok(IntPolynomial::one(&["q"]));
    }
    check_rp(r, p, n, 0)?;
    let r = r as usize;
    let degrees = (1..n).map(|i| r * i).chain(std::iter::once(r * n / p as usize));
    Ok(product(degrees, |_| Sign::Plus))
}

/// `[p]_{q^{kr/p}} [r(k+1)]_q ⋯ [r(n-1)]_q [rn/p]_q`.
pub fn grpn_rhs(r: u32, p: u32, n: usize, k: usize) -> Result<IntPolynomial> {
    check_rp(r, p, n, k)?;
    let r = r as usize;
    let lead = IntPolynomial::bracket_at_power(p, Sign::Plus, (k * r / p as usize) as u32);
    let middle = product((k + 1..n).map(|j| r * j), |_| Sign::Plus);
    Ok(&(&lead * &middle) * &br(r * n / p as usize, Sign::Plus))
}

/// `[r(k+1)]_q ⋯ [rn]_q`.
pub fn grn_rhs(r: u32, n: usize, k: usize) -> Result<IntPolynomial> {
    grpn_rhs(r, 1, n, k)
}

fn pi_sum(r: u32, n: usize, k: usize, sign: impl Fn(usize) -> Sign) -> Result<IntPolynomial> {
    check_range(n >= 2 * k, "needs n >= 2k", n, k)?;
    let r = r as usize;
    let mut out = IntPolynomial::zero(&["q"]);
    let mut binom = BigInt::from(1);
    for i in 0..=k {
        let term = product((n - i + 1..=n).map(|j| r * j), |_| Sign::Plus);
        out += &term.scale(&binom * sign(i).as_i64());
        binom = binom * (k - i) / (i + 1);
    }
    Ok(out)
}

/// `Σ_{i=0}^{k} (-1)^{k-i} C(k,i) [r(n-i+1)]_q ⋯ [rn]_q`.
pub fn pi_rhs(r: u32, n: usize, k: usize) -> Result<IntPolynomial> {
    pi_sum(r, n, k, |i| eps(k - i))
}

/// The same sum with the sign `(-1)^i`; it differs from [`pi_rhs`] by the
/// factor `(-1)^k`.
pub fn pi_rhs_as_printed(r: u32, n: usize, k: usize) -> Result<IntPolynomial> {
    pi_sum(r, n, k, eps)
}

/// Writes `poly` as a product `Π [m_i]_{±q}` with `m_1 ≥ m_2 ≥ … ≥ 2`, if
/// possible.
pub fn bracket_factorization(poly: &IntPolynomial) -> Option<Vec<(u32, Sign)>> {
    fn search(poly: &IntPolynomial, max: u32, acc: &mut Vec<(u32, Sign)>, fuel: &mut u32) -> bool {
        if *poly == IntPolynomial::one(&["q"]) {
            return true;
        }
        let deg = match poly.degree_in("q") {
            Ok(Some(d)) if d > 0 => d,
            _ => return false,
        };
        for m in (2..=max.min(deg + 1)).rev() {
            for sign in [Sign::Plus, Sign::Minus] {
                if *fuel == 0 {
                    return false;
                }
                *fuel -= 1;
                if let Ok(rest) = poly.exact_div(&IntPolynomial::bracket(m, sign)) {
                    acc.push((m, sign));
                    if search(&rest, m, acc, fuel) {
                        return true;
                    }
                    acc.pop();
                }
            }
        }
        false
    }
    if poly.num_vars() != 1 {
        return None;
    }
    let mut acc = Vec::new();
    let mut fuel = 100_000;
    let max = poly.degree_in("q").ok().flatten().unwrap_or(0) + 1;
    search(poly, max, &mut acc, &mut fuel).then_some(acc)
}

pub fn format_factorization(factors: &[(u32, Sign)]) -> String {
    if factors.is_empty() {
        return "1".into();
    }
    factors
        .iter()
        .map(|(m, s)| match s {
            Sign::Plus => format!("[{m}]_{{q}}"),
            Sign::Minus => format!("[{m}]_{{-q}}"),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Identity {
    Cormain,
    Main,
    Recur,
    GesselSimion,
    LemmaNN1,
    RakeRecur,
    RakeOdd,
    RakeEvenN,
    SnkEqRnk,
    Bw1,
    Bw2,
    FmajDual,
    Grpn,
    Grn,
    Pi,
    Bij,
    Colori,
    CalA,
    Fg,
    Problem1,
    Problem2,
}

impl Identity {
    pub const ALL: [Identity; 21] = [
        Identity::Cormain,
        Identity::Main,
        Identity::Recur,
        Identity::GesselSimion,
        Identity::LemmaNN1,
        Identity::RakeRecur,
        Identity::RakeOdd,
        Identity::RakeEvenN,
        Identity::SnkEqRnk,
        Identity::Bw1,
        Identity::Bw2,
        Identity::FmajDual,
        Identity::Grpn,
        Identity::Grn,
        Identity::Pi,
        Identity::Bij,
        Identity::Colori,
        Identity::CalA,
        Identity::Fg,
        Identity::Problem1,
        Identity::Problem2,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Identity::Cormain => "cormain",
            Identity::Main => "main",
            Identity::Recur => "recur",
            Identity::GesselSimion => "gessel-simion",
            Identity::LemmaNN1 => "lemma-n-n1",
            Identity::RakeRecur => "rake-recur",
            Identity::RakeOdd => "rake-odd",
            Identity::RakeEvenN => "rake-even-n",
            Identity::SnkEqRnk => "snk-eq-rnk",
            Identity::Bw1 => "bw1",
            Identity::Bw2 => "bw2",
            Identity::FmajDual => "fmaj-dual",
            Identity::Grpn => "grpn",
            Identity::Grn => "grn",
            Identity::Pi => "pi",
            Identity::Bij => "bij",
            Identity::Colori => "colori",
            Identity::CalA => "calA",
            Identity::Fg => "fg",
            Identity::Problem1 => "problem1",
            Identity::Problem2 => "problem2",
        }
    }

    /// Conjectures: their reports are printed but never counted as failures.
    pub fn is_observation(self) -> bool {
        matches!(self, Identity::Problem1 | Identity::Problem2)
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        Identity::ALL
            .into_iter()
            .find(|id| id.id().to_ascii_lowercase() == norm)
            .ok_or_else(|| Error::OutOfRange(format!("unknown identity `{s}`")))
    }
}

/// One point of a parameter grid.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<usize>,
}

impl Params {
    fn nk(n: usize, k: usize) -> Self {
        Params {
            n,
            k: Some(k),
            ..Params::default()
        }
    }

    fn k(&self) -> usize {
        self.k.unwrap_or(0)
    }

    fn r(&self) -> u32 {
        self.r.unwrap_or(1)
    }

    fn p(&self) -> u32 {
        self.p.unwrap_or(1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub params: Params,
    pub lhs: IntPolynomial,
    pub rhs: IntPolynomial,
    pub equal: bool,
    /// The expected value of `equal`; `None` when nothing is claimed.
    pub expected: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factorization: Option<String>,
}

impl IdentityReport {
    fn new(identity: Identity, params: Params, lhs: IntPolynomial, rhs: IntPolynomial, expected: Option<bool>) -> Self {
        let equal = lhs == rhs;
        IdentityReport {
            identity: identity.id().to_string(),
            params,
            lhs,
            rhs,
            equal,
            expected,
            factorization: None,
        }
    }

    /// Whether the outcome matches the claim.
    pub fn holds(&self) -> bool {
        self.expected.is_none_or(|e| e == self.equal)
    }
}

/// Parameter ranges for [`verify`]. Unset fields fall back to per-identity
/// defaults.
#[derive(Clone, Debug)]
pub struct Grid {
    pub n: Option<usize>,
    pub n_max: usize,
    pub k: Option<usize>,
    pub k_max: Option<usize>,
    pub r: Vec<u32>,
    pub p: Vec<u32>,
    pub samples: Option<usize>,
    pub seed: u64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            n: None,
            n_max: 6,
            k: None,
            k_max: None,
            r: Vec::new(),
            p: Vec::new(),
            samples: None,
            seed: 0,
        }
    }
}

impl Grid {
    pub fn with_n_max(n_max: usize) -> Self {
        Grid {
            n_max,
            ..Grid::default()
        }
    }

    fn ns(&self, from: usize) -> Vec<usize> {
        match self.n {
            Some(n) => vec![n],
            None => (from..=self.n_max).collect(),
        }
    }

    fn ks(&self, range: std::ops::RangeInclusive<usize>) -> Vec<usize> {
        let cap = self.k_max.unwrap_or(usize::MAX);
        range
            .filter(|k| self.k.is_none_or(|fixed| fixed == *k) && *k <= cap)
            .collect()
    }

    fn rs(&self, default: &[u32]) -> Vec<u32> {
        if self.r.is_empty() {
            default.to_vec()
        } else {
            self.r.clone()
        }
    }

    fn ps(&self, r: u32) -> Vec<u32> {
        (1..=r)
            .filter(|p| r.is_multiple_of(*p) && (self.p.is_empty() || self.p.contains(p)))
            .collect()
    }

    fn nk_pairs(&self, from: usize, k_range: impl Fn(usize) -> std::ops::RangeInclusive<usize>) -> Vec<Params> {
        self.ns(from)
            .into_iter()
            .flat_map(|n| self.ks(k_range(n)).into_iter().map(move |k| Params::nk(n, k)))
            .collect()
    }

    fn rpn(&self, default_r: &[u32], from: usize) -> Vec<(u32, u32, usize)> {
        let mut out = Vec::new();
        for r in self.rs(default_r) {
            for p in self.ps(r) {
                for n in self.ns(from) {
                    out.push((r, p, n));
                }
            }
        }
        out
    }
}

const DEFAULT_R: [u32; 5] = [1, 2, 3, 4, 6];

/// The parameter tuples of `identity` on `grid`, in report order.
pub fn tuples(identity: Identity, grid: &Grid) -> Vec<Params> {
    use Identity::*;
    let upto = |n: usize| 1..=n.saturating_sub(1);
    match identity {
        Cormain | Problem1 => grid.nk_pairs(1, |n| 1..=n),
        Main | Recur | SnkEqRnk | RakeRecur => grid.nk_pairs(2, upto),
        RakeOdd => grid
            .nk_pairs(2, upto)
            .into_iter()
            .filter(|t| t.k() % 2 == 1)
            .collect(),
        RakeEvenN => grid
            .nk_pairs(2, upto)
            .into_iter()
            .filter(|t| t.n % 2 == 0)
            .collect(),
        GesselSimion => grid.ns(1).into_iter().map(|n| Params::nk(n, 1)).collect(),
        LemmaNN1 => grid.ns(1).into_iter().map(|n| Params::nk(n, n - 1)).collect(),
        Bw1 => grid
            .ns(1)
            .into_iter()
            .flat_map(|n| {
                (0..ForestPoset::all_shapes(n).len()).map(move |s| Params {
                    n,
                    sample: Some(s),
                    ..Params::default()
                })
            })
            .collect(),
        Bw2 => (0..grid.samples.unwrap_or(200))
            .map(|s| Params {
                n: bw2_instance(grid, s).labels().len(),
                sample: Some(s),
                ..Params::default()
            })
            .collect(),
        FmajDual | Bij | Colori => grid
            .rpn(&DEFAULT_R, 1)
            .into_iter()
            .map(|(r, p, n)| Params {
                r: Some(r),
                p: Some(p),
                n,
                ..Params::default()
            })
            .collect(),
        Fg => grid
            .rpn(&DEFAULT_R, 1)
            .into_iter()
            .flat_map(|(r, p, n)| {
                (0..grid.samples.unwrap_or(20)).map(move |s| Params {
                    r: Some(r),
                    p: Some(p),
                    n,
                    k: None,
                    sample: Some(s),
                })
            })
            .collect(),
        Grpn | CalA => grid
            .rpn(&DEFAULT_R, 1)
            .into_iter()
            .flat_map(|(r, p, n)| {
                grid.ks(0..=n - 1).into_iter().map(move |k| Params {
                    r: Some(r),
                    p: Some(p),
                    n,
                    k: Some(k),
                    sample: None,
                })
            })
            .collect(),
        Grn | Problem2 => grid
            .rs(&[1, 2, 3])
            .into_iter()
            .flat_map(|r| {
                grid.ns(1).into_iter().flat_map(move |n| {
                    grid.ks(0..=n - 1).into_iter().map(move |k| Params {
                        r: Some(r),
                        p: None,
                        n,
                        k: Some(k),
                        sample: None,
                    })
                })
            })
            .collect(),
        Pi => grid
            .rs(&[1, 2, 3])
            .into_iter()
            .flat_map(|r| {
                grid.ns(0).into_iter().flat_map(move |n| {
                    grid.ks(0..=n / 2).into_iter().map(move |k| Params {
                        r: Some(r),
                        p: None,
                        n,
                        k: Some(k),
                        sample: None,
                    })
                })
            })
            .collect(),
    }
}

/// The labelled forest behind sample `s` of `bw2`: a random forest on
/// `1..=n_max` vertices with a uniformly random labelling.
pub fn bw2_instance(grid: &Grid, s: usize) -> Labelling {
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed.wrapping_add(s as u64));
    let n = grid.n.unwrap_or_else(|| rng.gen_range(1..=grid.n_max.max(1)));
    let forest = ForestPoset::random(n, &mut rng);
    let mut labels: Vec<usize> = (1..=n).collect();
    labels.shuffle(&mut rng);
    Labelling::new(forest, labels).expect("shuffled labels are a bijection")
}

fn fg_instance(grid: &Grid, t: &Params) -> Result<wreath::DualGroupElement> {
    let s = t.sample.unwrap_or(0) as u64;
    let seed = grid.seed ^ ((t.r() as u64) << 40 | (t.p() as u64) << 32 | (t.n as u64) << 24 | s);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<_> = wreath::enumerate_dual(t.r(), t.p(), t.n)?.collect();
    Ok(all.choose(&mut rng).expect("G(r,p,n)* is non-empty").clone())
}

/// Number of objects enumerated to evaluate `identity` at `t`.
pub fn cost(identity: Identity, t: &Params) -> u128 {
    use Identity::*;
    let fact = |m: usize| (1..=m as u128).product::<u128>();
    let n = t.n;
    let k = t.k();
    let r = t.r() as u128;
    let pow = |b: u128, e: usize| b.saturating_pow(e as u32);
    match identity {
        Cormain | Main | Recur | GesselSimion | LemmaNN1 | Problem1 => 2 * fact(n) / fact(k.max(1)),
        RakeRecur | RakeOdd | RakeEvenN | SnkEqRnk => 2 * fact(n) / fact(k.max(1)),
        Bw1 => fact(n),
        Bw2 => fact(n),
        FmajDual | Colori => pow(r, n) * fact(n),
        Grpn | CalA | Grn | Problem2 | Pi => pow(r, n) * fact(n),
        Bij => pow(2 * r, n),
        Fg => pow(r, n) * fact(n) + pow(13, n),
    }
}

fn constant(c: usize) -> IntPolynomial {
    IntPolynomial::constant(&["q"], c)
}

/// Evaluates one tuple.
pub fn evaluate(identity: Identity, t: &Params, grid: &Grid) -> Result<IdentityReport> {
    use Identity::*;
    let (n, k) = (t.n, t.k());
    let report = |lhs, rhs| IdentityReport::new(identity, t.clone(), lhs, rhs, Some(true));
    Ok(match identity {
        Cormain => report(permstat::signed_distribution(n, k, true)?.eval_at_one("z")?, s_corollary(n, k)?),
        Main => report(permstat::signed_distribution(n, k, true)?, s_closed(n, k)?),
        Recur => report(permstat::signed_distribution(n, k, true)?, s_recur(n, k)?),
        GesselSimion => report(permstat::signed_distribution(n, 1, true)?.eval_at_one("z")?, gessel_simion(n)),
        LemmaNN1 => report(permstat::signed_distribution(n, k, true)?, lemma_n_n1(n)?),
        RakeRecur => report(forest::rake_signed_distribution(n, k)?, r_recur(n, k)?),
        RakeOdd => report(forest::rake_signed_distribution(n, k)?, r_closed_odd(n, k)?),
        RakeEvenN => report(
            forest::rake_signed_distribution(n, k)?.eval_at_one("t")?,
            r_closed_even_n(n, k)?,
        ),
        SnkEqRnk => IdentityReport::new(
            identity,
            t.clone(),
            permstat::signed_distribution(n, k, true)?.eval_at_one("z")?,
            forest::rake_signed_distribution(n, k)?.eval_at_one("t")?,
            (!(n % 2 == 1 && k % 2 == 0)).then_some(true),
        ),
        Bw1 => {
            let shape = ForestPoset::all_shapes(n)
                .into_iter()
                .nth(t.sample.unwrap_or(0))
                .ok_or_else(|| Error::OutOfRange(format!("no forest shape {:?} on {n} vertices", t.sample)))?;
            report(forest::maj_distribution(&shape), bw_forest_rhs(&shape))
        }
        Bw2 => {
            let w = bw2_instance(grid, t.sample.unwrap_or(0));
            report(forest::le_maj_distribution(&w), bw_extension_rhs(&w)?)
        }
        FmajDual => {
            let all: Vec<_> = wreath::enumerate_dual(t.r(), t.p(), n)?.collect();
            report(wreath::fmaj_distribution(&all), fmaj_dual_rhs(t.r(), t.p(), n)?)
        }
        Grpn | Grn => {
            let c_k = wreath::c_k_set(t.r(), t.p(), n, k)?.collect::<Result<Vec<_>>>()?;
            report(wreath::fmaj_inverse_distribution(&c_k), grpn_rhs(t.r(), t.p(), n, k)?)
        }
        Pi => {
            let set: Vec<_> = wreath::pi_set(t.r(), n, k)?
                .map(|g| wreath::canonical_dual(&g, 1))
                .collect::<Result<_>>()?;
            report(wreath::fmaj_inverse_distribution(&set), pi_rhs(t.r(), n, k)?)
        }
        Bij => {
            let side = 2 * t.r() as u64;
            let mut ok = 0;
            let mut total = 0;
            for f in (0..n).map(|_| 0..side).multi_product() {
                total += 1;
                let f = CompatibleVector(f);
                if let Ok((g, lambda, h)) = wreath::decode_compatible(&f, t.r(), t.p()) {
                    if wreath::encode_compatible(&g, &lambda, h)? == f {
                        ok += 1;
                    }
                }
            }
            report(constant(ok), constant(total))
        }
        Colori => {
            let mut ok = 0;
            let mut total = 0;
            for g in wreath::enumerate_dual(t.r(), t.p(), n)? {
                total += 1;
                ok += usize::from(wreath::colori_check(&g));
            }
            report(constant(ok), constant(total))
        }
        CalA => {
            let side = 2 * t.r() as u64;
            let mut agree = 0;
            let mut total = 0;
            for f in (0..n).map(|_| 0..side).multi_product() {
                total += 1;
                let f = CompatibleVector(f);
                let (g, _, _) = wreath::decode_compatible(&f, t.r(), t.p())?;
                agree += usize::from(f.in_a(t.r(), t.p(), k) == g.inverse().in_c_k(k));
            }
            report(constant(agree), constant(total))
        }
        Fg => {
            let g = fg_instance(grid, t)?;
            report(wreath::fg_series_by_enumeration(&g, 12)?, wreath::fg_series_closed_form(&g, 12))
        }
        Problem1 => {
            let mut rep = IdentityReport::new(
                identity,
                t.clone(),
                permstat::signed_distribution_prime(n, k, true)?,
                permstat::signed_distribution(n, k, true)?.eval_at_one("z")?,
                Some(n % 2 == 0 || k % 2 == 1),
            );
            rep.factorization = bracket_factorization(&rep.lhs).map(|f| format_factorization(&f));
            rep
        }
        Problem2 => {
            let reps: Vec<_> = wreath::c_k_representatives(t.r(), n, k).collect();
            let elems = reps
                .iter()
                .map(|g| wreath::canonical_dual(g, 1))
                .collect::<Result<Vec<_>>>()?;
            let mut rep = IdentityReport::new(
                identity,
                t.clone(),
                wreath::signed_fmaj_inverse_distribution(&elems),
                grn_rhs(t.r(), n, k)?,
                None,
            );
            rep.factorization = bracket_factorization(&rep.lhs).map(|f| format_factorization(&f));
            rep
        }
    })
}

/// Runs `identity` over `grid`, handing reports to `sink` in tuple order.
/// Tuples are evaluated in parallel, a chunk at a time.
pub fn verify_each(identity: Identity, grid: &Grid, mut sink: impl FnMut(IdentityReport)) -> Result<()> {
    let all = tuples(identity, grid);
    for chunk in all.chunks(64) {
        let reports = chunk
            .par_iter()
            .map(|t| evaluate(identity, t, grid))
            .collect::<Result<Vec<_>>>()?;
        reports.into_iter().for_each(&mut sink);
    }
    Ok(())
}

pub fn verify(identity: Identity, grid: &Grid) -> Result<Vec<IdentityReport>> {
    let mut out = Vec::new();
    verify_each(identity, grid, |r| out.push(r))?;
    Ok(out)
}

trait MultiProduct: Iterator<Item = std::ops::Range<u64>> + Sized {
    /// Cartesian power in lexicographic order; one empty vector for no
    /// factors.
    fn multi_product(self) -> Box<dyn Iterator<Item = Vec<u64>>> {
        let ranges: Vec<_> = self.collect();
        if ranges.is_empty() {
            return Box::new(std::iter::once(Vec::new()));
        }
        Box::new(itertools::Itertools::multi_cartesian_product(ranges.into_iter()))
    }
}

impl<I: Iterator<Item = std::ops::Range<u64>>> MultiProduct for I {}

#[cfg(test)]
mod tests {
    use super::*;

    fn qz(s: &IntPolynomial) -> String {
        s.to_string()
    }

    #[test]
    fn recursion_examples() {
        assert_eq!(s_recur(3, 2).unwrap(), lemma_n_n1(3).unwrap());
        assert_eq!(s_recur(5, 5).unwrap(), IntPolynomial::one(&QZ));
        let expected = &(&mono(&QZ, &[0, 1], 1) * &br(3, Sign::Minus)) - &mono(&QZ, &[3, 0], 1);
        assert_eq!(s_recur(4, 3).unwrap(), expected);
        assert_eq!(s_recur(4, 0).unwrap(), s_recur(4, 1).unwrap());
    }

    #[test]
    fn lemma_examples() {
        let l = lemma_n_n1(3).unwrap();
        assert_eq!(l, permstat::signed_distribution(3, 2, true).unwrap());
        assert_eq!(l.eval_at_one("z").unwrap(), br(3, Sign::Minus));
        assert_eq!(qz(&s_closed(3, 2).unwrap()), qz(&l));
    }

    #[test]
    fn corollary_examples() {
        assert_eq!(s_corollary(3, 2).unwrap(), br(3, Sign::Minus));
        let one_minus_q3 = &IntPolynomial::one(&["q"]) - &mono(&["q"], &[3], 1);
        assert_eq!(s_corollary(3, 1).unwrap(), one_minus_q3);
        assert_eq!(gessel_simion(3), one_minus_q3);
        assert_eq!(s_corollary(6, 6).unwrap(), IntPolynomial::one(&["q"]));
        let gs4 = IntPolynomial::bracket_product(&[(2, Sign::Minus), (3, Sign::Plus), (4, Sign::Minus)]);
        assert_eq!(s_closed(4, 1).unwrap().eval_at_one("z").unwrap(), gs4);
    }

    #[test]
    fn closed_form_matches_enumeration_small() {
        for n in 2..=6 {
            for k in 1..n {
                let brute = permstat::signed_distribution(n, k, true).unwrap();
                assert_eq!(s_closed(n, k).unwrap(), brute, "closed ({n},{k})");
                assert_eq!(s_recur(n, k).unwrap(), brute, "recur ({n},{k})");
                assert_eq!(
                    s_closed(n, k).unwrap().eval_at_one("z").unwrap(),
                    s_corollary(n, k).unwrap()
                );
            }
        }
        assert!(s_closed(3, 3).is_err());
    }

    #[test]
    fn rake_examples() {
        let one_minus_q3 = &IntPolynomial::one(&["q"]) - &mono(&["q"], &[3], 1);
        assert_eq!(r_closed_odd(3, 1).unwrap().eval_at_one("t").unwrap(), one_minus_q3);
        assert_eq!(
            r_closed_even_n(4, 2).unwrap(),
            IntPolynomial::bracket_product(&[(3, Sign::Plus), (4, Sign::Minus)])
        );
        assert_eq!(r_recur(4, 1).unwrap(), r_closed_odd(4, 1).unwrap());
        assert!(r_closed_odd(4, 2).is_err());
        assert!(r_closed_even_n(5, 2).is_err());
        for n in (2..=8).step_by(2) {
            for k in (1..n).step_by(2) {
                assert_eq!(
                    r_closed_odd(n, k).unwrap().eval_at_one("t").unwrap(),
                    r_closed_even_n(n, k).unwrap()
                );
            }
        }
    }

    #[test]
    fn wreath_rhs_examples() {
        assert_eq!(grn_rhs(2, 2, 1).unwrap(), br(4, Sign::Plus));
        assert_eq!(grpn_rhs(2, 2, 2, 1).unwrap(), IntPolynomial::from_dense(&["q"], &[vec![1], vec![2], vec![1]]));
        for (r, n, k) in [(3, 4, 1), (2, 3, 0), (4, 2, 1)] {
            assert_eq!(grpn_rhs(r, 1, n, k).unwrap(), grn_rhs(r, n, k).unwrap());
        }
        assert_eq!(pi_rhs(2, 5, 0).unwrap(), IntPolynomial::one(&["q"]));
        assert!(pi_rhs(1, 3, 2).is_err());
        let printed = pi_rhs_as_printed(1, 4, 1).unwrap();
        assert_eq!(printed, -pi_rhs(1, 4, 1).unwrap());
        assert_eq!(fmaj_dual_rhs(2, 2, 2).unwrap(), IntPolynomial::bracket_product(&[(2, Sign::Plus), (2, Sign::Plus)]));
    }

    #[test]
    fn factorization_search() {
        let p = IntPolynomial::bracket_product(&[(4, Sign::Minus), (3, Sign::Plus), (2, Sign::Minus)]);
        let f = bracket_factorization(&p).unwrap();
        let back = IntPolynomial::bracket_product(&f);
        assert_eq!(back, p);
        assert_eq!(bracket_factorization(&IntPolynomial::one(&["q"])), Some(vec![]));
        let not = &IntPolynomial::one(&["q"]) + &mono(&["q"], &[1], 2);
        assert_eq!(bracket_factorization(&not), None);
    }

    #[test]
    fn identity_ids_round_trip() {
        for id in Identity::ALL {
            assert_eq!(id.id().parse::<Identity>().unwrap(), id);
        }
        assert_eq!("snk_eq_rnk".parse::<Identity>().unwrap(), Identity::SnkEqRnk);
        assert!("bogus".parse::<Identity>().is_err());
    }

    #[test]
    fn verify_small_grids() {
        let grid = Grid::with_n_max(5);
        for id in [Identity::Cormain, Identity::Main, Identity::Recur, Identity::RakeRecur, Identity::SnkEqRnk] {
            let reports = verify(id, &grid).unwrap();
            assert!(!reports.is_empty());
            assert!(reports.iter().all(IdentityReport::holds), "{id}");
        }
        let reports = verify(Identity::Problem1, &Grid::with_n_max(1)).unwrap();
        assert_eq!(reports.len(), 1);
        assert!(reports[0].equal);
    }

    #[test]
    fn reports_serialize_as_json_lines() {
        let r = evaluate(Identity::Cormain, &Params::nk(3, 2), &Grid::default()).unwrap();
        let line = serde_json::to_string(&r).unwrap();
        assert!(line.starts_with(r#"{"identity":"cormain","params":{"n":3,"k":2},"lhs":"#));
        assert!(!line.contains('\n'));
    }
}
