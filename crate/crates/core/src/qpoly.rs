//! Exact sparse polynomials over the integers in one or two variables.
//!
//! Every distribution in this crate is returned as an [`IntPolynomial`]. The
//! first variable is conventionally `q`; the optional second one is the
//! catalytic variable (`z` for parabolic quotients, `t` for rakes).
//!
//! Terms live in a `BTreeMap` keyed by exponent pairs, so iteration (and hence
//! serialization) is always in lexicographic exponent order. Univariate
//! polynomials keep the unused second exponent at zero.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type Exponents = [u32; 2];

/// A sign `+1` or `-1`, used to build `[n]_{±q}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `(-1)^e`.
    pub fn parity(e: u64) -> Sign {
        if e.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "WirePolynomial", into = "WirePolynomial")]
pub struct IntPolynomial {
    vars: Vec<String>,
    terms: BTreeMap<Exponents, BigInt>,
}

impl IntPolynomial {
    fn with_vars(vars: &[&str]) -> Self {
        assert!(
            (1..=2).contains(&vars.len()),
            "an IntPolynomial has one or two variables"
        );
        IntPolynomial {
            vars: vars.iter().map(|v| v.to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn zero(vars: &[&str]) -> Self {
        Self::with_vars(vars)
    }

    pub fn one(vars: &[&str]) -> Self {
        Self::constant(vars, 1)
    }

    pub fn constant(vars: &[&str], c: impl Into<BigInt>) -> Self {
        Self::monomial(vars, &[0; 2][..vars.len()], c)
    }

    /// `c · v1^e1 (· v2^e2)`; `exps` has one entry per variable.
    pub fn monomial(vars: &[&str], exps: &[u32], c: impl Into<BigInt>) -> Self {
        let mut p = Self::with_vars(vars);
        assert_eq!(exps.len(), vars.len(), "exponent arity mismatch");
        let mut key = [0u32; 2];
        key[..exps.len()].copy_from_slice(exps);
        p.add_term(key, c.into());
        p
    }

    /// The variable `name` as a polynomial over `vars`.
    pub fn var(vars: &[&str], name: &str) -> Result<Self> {
        let idx = vars
            .iter()
            .position(|v| *v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let mut exps = [0u32; 2];
        exps[idx] = 1;
        Ok(Self::monomial(vars, &exps[..vars.len()], 1))
    }

    /// The univariate `q`.
    pub fn q() -> Self {
        Self::monomial(&["q"], &[1], 1)
    }

    /// Builds a polynomial from a dense coefficient table `table[i][j]` of
    /// `v1^i v2^j` (or `table[i][0]` for univariate input).
    pub fn from_dense(vars: &[&str], table: &[Vec<i64>]) -> Self {
        let mut p = Self::with_vars(vars);
        for (i, row) in table.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c != 0 {
                    assert!(vars.len() == 2 || j == 0);
                    p.add_term([i as u32, j as u32], BigInt::from(c));
                }
            }
        }
        p
    }

    pub fn vars(&self) -> Vec<&str> {
        self.vars.iter().map(String::as_str).collect()
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigInt)> + '_ {
        let arity = self.vars.len();
        self.terms.iter().map(move |(e, c)| (&e[..arity], c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| *e == [0, 0])
    }

    pub fn coeff(&self, exps: &[u32]) -> BigInt {
        let mut key = [0u32; 2];
        key[..exps.len()].copy_from_slice(exps);
        self.terms.get(&key).cloned().unwrap_or_default()
    }

    /// Sum of all coefficients.
    pub fn coefficient_sum(&self) -> BigInt {
        self.terms.values().sum()
    }

    fn var_index(&self, var: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))
    }

    /// Highest exponent of `var` appearing in a nonzero term.
    pub fn degree_in(&self, var: &str) -> Result<Option<u32>> {
        let idx = self.var_index(var)?;
        Ok(self.terms.keys().map(|e| e[idx]).max())
    }

    fn add_term(&mut self, exps: Exponents, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    /// `self += c · x^shift · other`.
    fn add_scaled_shifted(&mut self, other: &IntPolynomial, shift: Exponents, c: &BigInt) {
        for (e, oc) in &other.terms {
            self.add_term([e[0] + shift[0], e[1] + shift[1]], oc * c);
        }
    }

    /// Reconciles the variable lists of two operands. Constants adopt the
    /// other operand's variables; a univariate polynomial in `v` lifts into
    /// `(v, w)`.
    fn unify(a: &IntPolynomial, b: &IntPolynomial) -> Result<Vec<String>> {
        if a.vars == b.vars {
            return Ok(a.vars.clone());
        }
        if a.is_constant() {
            if b.is_constant() {
                return Ok(if a.vars.len() >= b.vars.len() {
                    a.vars.clone()
                } else {
                    b.vars.clone()
                });
            }
            return Ok(b.vars.clone());
        }
        if b.is_constant() {
            return Ok(a.vars.clone());
        }
        let (short, long) = if a.vars.len() < b.vars.len() {
            (a, b)
        } else {
            (b, a)
        };
        if long.vars.starts_with(&short.vars) {
            Ok(long.vars.clone())
        } else {
            Err(Error::VariableMismatch(a.vars.clone(), b.vars.clone()))
        }
    }

    /// Re-expresses `self` over `vars`. Only valid for the liftings accepted by
    /// [`IntPolynomial::unify`].
    fn relabel(mut self, vars: &[String]) -> Self {
        if self.vars.as_slice() != vars {
            debug_assert!(self.is_constant() || vars.starts_with(&self.vars));
            self.vars = vars.to_vec();
        }
        self
    }

    /// Same polynomial over a different variable list; fails if the lists are
    /// not compatible.
    pub fn lift_to(&self, vars: &[&str]) -> Result<Self> {
        let target: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
        if self.is_constant() || target.starts_with(&self.vars) {
            Ok(self.clone().relabel(&target))
        } else {
            Err(Error::VariableMismatch(self.vars.clone(), target))
        }
    }

    /// Same terms under new variable names.
    pub fn renamed(&self, names: &[&str]) -> Result<Self> {
        if names.len() != self.vars.len() || (names.len() == 2 && names[0] == names[1]) {
            return Err(Error::VariableMismatch(
                self.vars.clone(),
                names.iter().map(|v| v.to_string()).collect(),
            ));
        }
        Ok(IntPolynomial {
            vars: names.iter().map(|v| v.to_string()).collect(),
            terms: self.terms.clone(),
        })
    }

    pub fn checked_add(&self, other: &IntPolynomial) -> Result<IntPolynomial> {
        let vars = Self::unify(self, other)?;
        let mut out = self.clone().relabel(&vars);
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &IntPolynomial) -> Result<IntPolynomial> {
        let vars = Self::unify(self, other)?;
        let mut out = IntPolynomial {
            vars,
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            out.add_scaled_shifted(other, *e, c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: impl Into<BigInt>) -> IntPolynomial {
        let c = c.into();
        let mut out = IntPolynomial {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
        };
        out.add_scaled_shifted(self, [0, 0], &c);
        out
    }

    /// Multiplies by the monomial `x^exps`.
    pub fn shift(&self, exps: &[u32]) -> IntPolynomial {
        let mut key = [0u32; 2];
        key[..exps.len()].copy_from_slice(exps);
        IntPolynomial {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| ([e[0] + key[0], e[1] + key[1]], c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> IntPolynomial {
        let mut out = IntPolynomial {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
        };
        out.add_term([0, 0], BigInt::one());
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Drops every term whose exponent of the first variable exceeds `degree`.
    pub fn truncated(&self, degree: u32) -> IntPolynomial {
        IntPolynomial {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e[0] <= degree)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    /// `Σ_{i<n} base^i`.
    pub fn geometric_sum(base: &IntPolynomial, n: u32) -> IntPolynomial {
        let mut acc = IntPolynomial::zero(&base.vars());
        let mut power = IntPolynomial::one(&base.vars());
        for _ in 0..n {
            acc = &acc + &power;
            power = &power * base;
        }
        acc
    }

    /// `[n]_{sign·q} = Σ_{i<n} (sign·q)^i`.
    pub fn bracket(n: u32, sign: Sign) -> IntPolynomial {
        Self::bracket_at_power(n, sign, 1)
    }

    /// `[n]_{sign·q^step}`.
    pub fn bracket_at_power(n: u32, sign: Sign, step: u32) -> IntPolynomial {
        let mut p = IntPolynomial::zero(&["q"]);
        let mut c = BigInt::one();
        for i in 0..n {
            p.add_term([i * step, 0], c.clone());
            c *= sign.as_i64();
        }
        p
    }

    pub fn bracket_product(factors: &[(u32, Sign)]) -> IntPolynomial {
        factors
            .iter()
            .fold(IntPolynomial::one(&["q"]), |acc, &(n, s)| {
                &acc * &IntPolynomial::bracket(n, s)
            })
    }

    fn leading(&self) -> Option<(&Exponents, &BigInt)> {
        self.terms.last_key_value()
    }

    /// Exact quotient `num / den`; [`Error::NotDivisible`] if a remainder is
    /// left. Long division on lexicographically leading terms.
    pub fn exact_div(&self, den: &IntPolynomial) -> Result<IntPolynomial> {
        let vars = Self::unify(self, den)?;
        let (dexp, dcoeff) = match den.leading() {
            Some((e, c)) => (*e, c.clone()),
            None => return Err(Error::DivisionByZero),
        };
        let mut rem = self.clone().relabel(&vars);
        let mut quot = IntPolynomial {
            vars,
            terms: BTreeMap::new(),
        };
        while let Some((rexp, rcoeff)) = rem.leading() {
            if rexp[0] < dexp[0] || rexp[1] < dexp[1] {
                return Err(Error::NotDivisible);
            }
            if !(rcoeff % &dcoeff).is_zero() {
                return Err(Error::NotDivisible);
            }
            let shift = [rexp[0] - dexp[0], rexp[1] - dexp[1]];
            let c = rcoeff / &dcoeff;
            rem.add_scaled_shifted(den, shift, &-&c);
            quot.add_term(shift, c);
        }
        Ok(quot)
    }

    /// `var → -var`.
    pub fn substitute_sign(&self, var: &str) -> Result<IntPolynomial> {
        let idx = self.var_index(var)?;
        Ok(IntPolynomial {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (*e, if e[idx] % 2 == 1 { -c } else { c.clone() }))
                .collect(),
        })
    }

    /// `var → 1`. The result is a polynomial in the remaining variable; a
    /// univariate input collapses to a constant over its own variable.
    pub fn eval_at_one(&self, var: &str) -> Result<IntPolynomial> {
        let idx = self.var_index(var)?;
        let mut out = if self.vars.len() == 2 {
            IntPolynomial {
                vars: vec![self.vars[1 - idx].clone()],
                terms: BTreeMap::new(),
            }
        } else {
            IntPolynomial {
                vars: self.vars.clone(),
                terms: BTreeMap::new(),
            }
        };
        for (e, c) in &self.terms {
            let key = if self.vars.len() == 2 {
                [e[1 - idx], 0]
            } else {
                [0, 0]
            };
            out.add_term(key, c.clone());
        }
        Ok(out)
    }

    /// One `(exponents…, coefficient)` row per term, in serialization order.
    pub fn rows(&self) -> Vec<(Vec<u32>, BigInt)> {
        self.terms().map(|(e, c)| (e.to_vec(), c.clone())).collect()
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial({})", self)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let mut mono = Vec::new();
            for (v, &k) in self.vars.iter().zip(e.iter()) {
                match k {
                    0 => {}
                    1 => mono.push(v.clone()),
                    _ => mono.push(format!("{v}^{k}")),
                }
            }
            let mag = c.abs();
            let body = if mono.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                mono.join("*")
            } else {
                format!("{}*{}", mag, mono.join("*"))
            };
            match (i, c.is_negative()) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:expr) => {
        impl $trait<&IntPolynomial> for &IntPolynomial {
            type Output = IntPolynomial;

            fn $method(self, rhs: &IntPolynomial) -> IntPolynomial {
                let f: fn(&IntPolynomial, &IntPolynomial) -> Result<IntPolynomial> = $checked;
                f(self, rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }

        impl $trait<IntPolynomial> for IntPolynomial {
            type Output = IntPolynomial;

            fn $method(self, rhs: IntPolynomial) -> IntPolynomial {
                (&self).$method(&rhs)
            }
        }

        impl $trait<&IntPolynomial> for IntPolynomial {
            type Output = IntPolynomial;

            fn $method(self, rhs: &IntPolynomial) -> IntPolynomial {
                (&self).$method(rhs)
            }
        }

        impl $trait<IntPolynomial> for &IntPolynomial {
            type Output = IntPolynomial;

            fn $method(self, rhs: IntPolynomial) -> IntPolynomial {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.checked_add(b));
forward_binop!(Sub, sub, |a, b| a.checked_add(&-b));
forward_binop!(Mul, mul, |a, b| a.checked_mul(b));

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;

    fn neg(self) -> IntPolynomial {
        IntPolynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for IntPolynomial {
    type Output = IntPolynomial;

    fn neg(self) -> IntPolynomial {
        -&self
    }
}

impl AddAssign<&IntPolynomial> for IntPolynomial {
    fn add_assign(&mut self, rhs: &IntPolynomial) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&IntPolynomial> for IntPolynomial {
    fn sub_assign(&mut self, rhs: &IntPolynomial) {
        *self = &*self - rhs;
    }
}

// Wire format: {"vars":[..],"terms":[{"e":[..],"c":n},..]}. Coefficients that
// do not fit in an i64 are written as decimal strings.

#[derive(Serialize, Deserialize)]
struct WirePolynomial {
    vars: Vec<String>,
    terms: Vec<WireTerm>,
}

#[derive(Serialize, Deserialize)]
struct WireTerm {
    e: Vec<u32>,
    c: WireCoeff,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WireCoeff {
    Small(i64),
    Big(String),
}

impl From<IntPolynomial> for WirePolynomial {
    fn from(p: IntPolynomial) -> Self {
        let arity = p.vars.len();
        WirePolynomial {
            terms: p
                .terms
                .iter()
                .map(|(e, c)| WireTerm {
                    e: e[..arity].to_vec(),
                    c: match c.to_i64() {
                        Some(v) => WireCoeff::Small(v),
                        None => WireCoeff::Big(c.to_string()),
                    },
                })
                .collect(),
            vars: p.vars,
        }
    }
}

impl TryFrom<WirePolynomial> for IntPolynomial {
    type Error = String;

    fn try_from(w: WirePolynomial) -> std::result::Result<Self, String> {
        if !(1..=2).contains(&w.vars.len()) {
            return Err(format!("expected 1 or 2 variables, got {}", w.vars.len()));
        }
        let mut p = IntPolynomial {
            vars: w.vars,
            terms: BTreeMap::new(),
        };
        for t in w.terms {
            if t.e.len() != p.vars.len() {
                return Err(format!("exponent {:?} has the wrong arity", t.e));
            }
            let c = match t.c {
                WireCoeff::Small(v) => BigInt::from(v),
                WireCoeff::Big(s) => s.parse::<BigInt>().map_err(|e| e.to_string())?,
            };
            if c.is_zero() {
                return Err(format!("zero coefficient at {:?}", t.e));
            }
            let mut key = [0u32; 2];
            key[..t.e.len()].copy_from_slice(&t.e);
            if p.terms.insert(key, c).is_some() {
                return Err(format!("duplicate exponent {:?}", t.e));
            }
        }
        Ok(p)
    }
}
