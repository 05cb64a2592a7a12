//! Exact arithmetic in the two local base rings.
//!
//! * `Truncated`: `R_N = F_p[t]/(t^N)`, elements stored as coefficient
//!   vectors of length exactly `N`.
//! * `Pattern`: `A = F_p[t]_(t)`, the localization of `F_p[t]` at `(t)`,
//!   elements stored as reduced fractions `num(t)/den(t)` with `den(0) != 0`
//!   and monic denominator. Arithmetic is exact, no precision involved.
//!
//! Both are local rings with maximal ideal `(t)` and residue field `F_p`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp::{is_prime, Fp};

pub const INFINITE_VALUATION: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Backend {
    /// `F_p[t]/(t^N)`.
    Truncated,
    /// `F_p[t]` localized at `(t)`, as reduced rational functions.
    Pattern,
}

/// Which base ring we are working in. `precision` is only meaningful for the
/// truncated backend and is a hard global: every scalar of a ring carries it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingDescriptor {
    pub backend: Backend,
    pub prime: u64,
    pub precision: usize,
}

impl RingDescriptor {
    pub fn truncated(prime: u64, precision: usize) -> Self {
        assert!(is_prime(prime), "{prime} is not prime");
        assert!(precision >= 1, "precision must be at least 1");
        RingDescriptor { backend: Backend::Truncated, prime, precision }
    }

    pub fn pattern(prime: u64) -> Self {
        assert!(is_prime(prime), "{prime} is not prime");
        RingDescriptor { backend: Backend::Pattern, prime, precision: 0 }
    }

    pub fn field(&self) -> Fp {
        Fp::new(self.prime)
    }

    pub fn same_as(&self, other: &RingDescriptor) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::RingMismatch(format!("{self:?}"), format!("{other:?}")))
        }
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.backend {
            Backend::Truncated => write!(f, "F_{}[t]/(t^{})", self.prime, self.precision),
            Backend::Pattern => write!(f, "F_{}[t]_(t)", self.prime),
        }
    }
}

// ---------------------------------------------------------------------------
// polynomial helpers (dense, ascending powers, trimmed)

pub(crate) fn poly_trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

pub(crate) fn poly_add(f: Fp, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0; n];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *slot = f.add(x, y);
    }
    poly_trim(out)
}

pub(crate) fn poly_neg(f: Fp, a: &[u64]) -> Vec<u64> {
    a.iter().map(|&x| f.neg(x)).collect()
}

#[allow(dead_code)]
pub(crate) fn poly_sub(f: Fp, a: &[u64], b: &[u64]) -> Vec<u64> {
    poly_add(f, a, &poly_neg(f, b))
}

pub(crate) fn poly_mul(f: Fp, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    poly_trim(out)
}

/// Division with remainder; `b` must be nonzero.
pub(crate) fn poly_divrem(f: Fp, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let b = poly_trim(b.to_vec());
    assert!(!b.is_empty(), "polynomial division by zero");
    let mut rem = poly_trim(a.to_vec());
    let mut quot = vec![0; rem.len().saturating_sub(b.len()) + 1];
    let lead_inv = f.inv(*b.last().unwrap());
    while rem.len() >= b.len() && !rem.is_empty() {
        let shift = rem.len() - b.len();
        let coef = f.mul(*rem.last().unwrap(), lead_inv);
        quot[shift] = coef;
        for (i, &bi) in b.iter().enumerate() {
            rem[shift + i] = f.sub(rem[shift + i], f.mul(coef, bi));
        }
        rem = poly_trim(rem);
    }
    (poly_trim(quot), rem)
}

pub(crate) fn poly_gcd(f: Fp, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut a = poly_trim(a.to_vec());
    let mut b = poly_trim(b.to_vec());
    while !b.is_empty() {
        let (_, r) = poly_divrem(f, &a, &b);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        let inv = f.inv(lead);
        a = a.iter().map(|&c| f.mul(c, inv)).collect();
    }
    a
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// Coefficient vector of length exactly `N`.
    Coeffs(Vec<u64>),
    /// Reduced fraction with monic denominator, `den(0) != 0`.
    Frac { num: Vec<u64>, den: Vec<u64> },
}

/// An element of the base ring selected by its `RingDescriptor`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdicScalar {
    ring: RingDescriptor,
    repr: Repr,
}

impl AdicScalar {
    pub fn ring(&self) -> &RingDescriptor {
        &self.ring
    }

    pub fn zero(ring: RingDescriptor) -> Self {
        Self::from_poly(ring, &[])
    }

    pub fn one(ring: RingDescriptor) -> Self {
        Self::from_poly(ring, &[1])
    }

    /// `c * t^k` for a constant `c`.
    pub fn monomial(ring: RingDescriptor, c: u64, k: usize) -> Self {
        let mut v = vec![0; k + 1];
        v[k] = c % ring.prime;
        Self::from_poly(ring, &v)
    }

    pub fn constant(ring: RingDescriptor, c: u64) -> Self {
        Self::from_poly(ring, &[c % ring.prime])
    }

    /// Build from a polynomial in `t` (ascending coefficients).
    pub fn from_poly(ring: RingDescriptor, coeffs: &[u64]) -> Self {
        let f = ring.field();
        let reduced: Vec<u64> = coeffs.iter().map(|&c| c % f.p).collect();
        match ring.backend {
            Backend::Truncated => {
                let mut v = reduced;
                v.resize(ring.precision, 0);
                v.truncate(ring.precision);
                AdicScalar { ring, repr: Repr::Coeffs(v) }
            }
            Backend::Pattern => {
                AdicScalar { ring, repr: Repr::Frac { num: poly_trim(reduced), den: vec![1] } }
            }
        }
    }

    /// Build a Pattern-backend fraction `num/den`; fails if `den(0) = 0`.
    pub fn fraction(ring: RingDescriptor, num: &[u64], den: &[u64]) -> Result<Self> {
        assert_eq!(ring.backend, Backend::Pattern);
        let f = ring.field();
        let num: Vec<u64> = poly_trim(num.iter().map(|&c| c % f.p).collect());
        let den: Vec<u64> = poly_trim(den.iter().map(|&c| c % f.p).collect());
        if den.is_empty() || den[0] == 0 {
            return Err(Error::Invalid("denominator must be a t-unit (den(0) != 0)".into()));
        }
        Ok(Self::reduce_frac(ring, num, den))
    }

    fn reduce_frac(ring: RingDescriptor, num: Vec<u64>, den: Vec<u64>) -> Self {
        let f = ring.field();
        if num.is_empty() {
            return AdicScalar { ring, repr: Repr::Frac { num, den: vec![1] } };
        }
        let g = poly_gcd(f, &num, &den);
        let (num, _) = poly_divrem(f, &num, &g);
        let (den, _) = poly_divrem(f, &den, &g);
        // normalize to a monic denominator
        let lead = *den.last().unwrap();
        let inv = f.inv(lead);
        let den: Vec<u64> = den.iter().map(|&c| f.mul(c, inv)).collect();
        let num: Vec<u64> = num.iter().map(|&c| f.mul(c, inv)).collect();
        AdicScalar { ring, repr: Repr::Frac { num, den } }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Coeffs(v) => v.iter().all(|&c| c == 0),
            Repr::Frac { num, .. } => num.is_empty(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(self.ring)
    }

    pub fn add(&self, other: &AdicScalar) -> AdicScalar {
        self.ring.same_as(&other.ring).expect("scalar ring mismatch");
        let f = self.ring.field();
        match (&self.repr, &other.repr) {
            (Repr::Coeffs(a), Repr::Coeffs(b)) => {
                Self::from_poly(self.ring, &poly_add(f, a, b))
            }
            (Repr::Frac { num: n1, den: d1 }, Repr::Frac { num: n2, den: d2 }) => {
                let num = poly_add(f, &poly_mul(f, n1, d2), &poly_mul(f, n2, d1));
                let den = poly_mul(f, d1, d2);
                Self::reduce_frac(self.ring, num, den)
            }
            _ => unreachable!("ring descriptors agree"),
        }
    }

    pub fn neg(&self) -> AdicScalar {
        let f = self.ring.field();
        match &self.repr {
            Repr::Coeffs(v) => Self::from_poly(self.ring, &poly_neg(f, v)),
            Repr::Frac { num, den } => AdicScalar {
                ring: self.ring,
                repr: Repr::Frac { num: poly_neg(f, num), den: den.clone() },
            },
        }
    }

    pub fn sub(&self, other: &AdicScalar) -> AdicScalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &AdicScalar) -> AdicScalar {
        self.ring.same_as(&other.ring).expect("scalar ring mismatch");
        let f = self.ring.field();
        match (&self.repr, &other.repr) {
            (Repr::Coeffs(a), Repr::Coeffs(b)) => {
                Self::from_poly(self.ring, &poly_mul(f, a, b))
            }
            (Repr::Frac { num: n1, den: d1 }, Repr::Frac { num: n2, den: d2 }) => {
                Self::reduce_frac(self.ring, poly_mul(f, n1, n2), poly_mul(f, d1, d2))
            }
            _ => unreachable!("ring descriptors agree"),
        }
    }

    /// t-adic valuation; `INFINITE_VALUATION` for zero. In the truncated
    /// backend a valuation that would be `>= N` is reported as infinite.
    pub fn valuation(&self) -> usize {
        match &self.repr {
            Repr::Coeffs(v) => {
                v.iter().position(|&c| c != 0).unwrap_or(INFINITE_VALUATION)
            }
            Repr::Frac { num, .. } => {
                // den(0) != 0, so the valuation is carried by the numerator
                num.iter().position(|&c| c != 0).unwrap_or(INFINITE_VALUATION)
            }
        }
    }

    /// Image in the residue field `F_p = R/(t)`.
    pub fn residue(&self) -> u64 {
        let f = self.ring.field();
        match &self.repr {
            Repr::Coeffs(v) => v.first().copied().unwrap_or(0),
            Repr::Frac { num, den } => {
                let n0 = num.first().copied().unwrap_or(0);
                let d0 = den.first().copied().unwrap_or(0);
                f.mul(n0, f.inv(d0))
            }
        }
    }

    pub fn is_unit(&self) -> bool {
        self.residue() != 0
    }

    /// Exact inverse of a unit.
    pub fn invert(&self) -> Result<AdicScalar> {
        let v = self.valuation();
        if v != 0 {
            return Err(Error::NonUnit { valuation: v });
        }
        match &self.repr {
            Repr::Coeffs(a) => {
                // power series inversion mod t^N
                let f = self.ring.field();
                let n = self.ring.precision;
                let mut inv = vec![0u64; n];
                inv[0] = f.inv(a[0]);
                for k in 1..n {
                    let mut acc = 0;
                    for j in 1..=k {
                        acc = f.add(acc, f.mul(a[j], inv[k - j]));
                    }
                    inv[k] = f.neg(f.mul(acc, inv[0]));
                }
                Ok(Self::from_poly(self.ring, &inv))
            }
            Repr::Frac { num, den } => {
                Ok(Self::reduce_frac(self.ring, den.clone(), num.clone()))
            }
        }
    }

    /// Multiply by `t^k`.
    pub fn shift_up(&self, k: usize) -> AdicScalar {
        self.mul(&Self::monomial(self.ring, 1, k))
    }

    /// Exact division by `t^k`; requires `valuation >= k` (or zero).
    pub fn shift_down(&self, k: usize) -> AdicScalar {
        if self.is_zero() {
            return self.clone();
        }
        assert!(self.valuation() >= k, "shift_down below the valuation");
        match &self.repr {
            Repr::Coeffs(v) => Self::from_poly(self.ring, &v[k..]),
            Repr::Frac { num, den } => AdicScalar {
                ring: self.ring,
                repr: Repr::Frac { num: num[k..].to_vec(), den: den.clone() },
            },
        }
    }

    /// Exact division: `self / other` where `valuation(self) >= valuation(other)`.
    /// In the truncated backend the quotient is one valid witness of
    /// divisibility (exact in `R_N`).
    pub fn divide_by(&self, other: &AdicScalar) -> Result<AdicScalar> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let v = other.valuation();
        if v == INFINITE_VALUATION || self.valuation() < v {
            return Err(Error::Invalid("not divisible".into()));
        }
        let unit = other.shift_down(v).invert()?;
        Ok(self.shift_down(v).mul(&unit))
    }

    /// Truncate a Truncated-backend scalar to a coarser precision `m < N`.
    pub fn truncate_to(&self, target: &RingDescriptor) -> AdicScalar {
        match &self.repr {
            Repr::Coeffs(v) => Self::from_poly(*target, v),
            Repr::Frac { .. } => panic!("truncate_to applies to the truncated backend"),
        }
    }

    /// Coefficient access for the truncated backend.
    pub fn coeffs(&self) -> &[u64] {
        match &self.repr {
            Repr::Coeffs(v) => v,
            Repr::Frac { .. } => panic!("coeffs() applies to the truncated backend"),
        }
    }

    pub fn frac_parts(&self) -> (&[u64], &[u64]) {
        match &self.repr {
            Repr::Frac { num, den } => (num, den),
            Repr::Coeffs(_) => panic!("frac_parts() applies to the pattern backend"),
        }
    }

    /// Reduce mod `t^k` (used for hom-block canonical forms).
    pub fn reduce_mod(&self, k: usize) -> AdicScalar {
        match &self.repr {
            Repr::Coeffs(v) => {
                let mut w = v.clone();
                for c in w.iter_mut().skip(k) {
                    *c = 0;
                }
                Self::from_poly(self.ring, &w)
            }
            Repr::Frac { .. } => panic!("reduce_mod applies to the truncated backend"),
        }
    }
}

// ---------------------------------------------------------------------------
// parsing and display: "1 + t + 2*t^3", fractions "(poly)/(poly)"

fn poly_to_string(v: &[u64]) -> String {
    if v.iter().all(|&c| c == 0) {
        return "0".into();
    }
    let mut terms = Vec::new();
    for (k, &c) in v.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let term = match (c, k) {
            (c, 0) => format!("{c}"),
            (1, 1) => "t".into(),
            (c, 1) => format!("{c}*t"),
            (1, k) => format!("t^{k}"),
            (c, k) => format!("{c}*t^{k}"),
        };
        terms.push(term);
    }
    terms.join(" + ")
}

fn parse_poly(s: &str, p: u64) -> Result<Vec<u64>> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    // split on '+' and '-' while tracking signs
    let mut coeffs: Vec<i64> = Vec::new();
    let mut sign = 1i64;
    let mut term = String::new();
    let push_term = |term: &str, sign: i64, coeffs: &mut Vec<i64>| -> Result<()> {
        let term = term.trim();
        if term.is_empty() {
            return Err(Error::Parse("empty term".into()));
        }
        let (coef_str, pow) = if let Some(idx) = term.find('t') {
            let before = term[..idx].trim().trim_end_matches('*').trim();
            let after = term[idx + 1..].trim();
            let pow = if after.is_empty() {
                1
            } else if let Some(rest) = after.strip_prefix('^') {
                rest.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad exponent in '{term}'")))?
            } else {
                return Err(Error::Parse(format!("bad term '{term}'")));
            };
            (before.to_string(), pow)
        } else {
            (term.to_string(), 0)
        };
        let coef: i64 = if coef_str.is_empty() {
            1
        } else {
            coef_str
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient '{coef_str}'")))?
        };
        if coeffs.len() <= pow {
            coeffs.resize(pow + 1, 0);
        }
        coeffs[pow] += sign * coef;
        Ok(())
    };
    for ch in s.chars() {
        match ch {
            '+' | '-' if !term.trim().is_empty() => {
                push_term(&term, sign, &mut coeffs)?;
                term.clear();
                sign = if ch == '-' { -1 } else { 1 };
            }
            '-' => {
                sign = -sign;
            }
            '+' => {}
            _ => term.push(ch),
        }
    }
    push_term(&term, sign, &mut coeffs)?;
    let p_i = p as i64;
    Ok(coeffs.into_iter().map(|c| (c.rem_euclid(p_i)) as u64).collect())
}

impl AdicScalar {
    pub fn parse(ring: RingDescriptor, s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = split_fraction(s) {
            if ring.backend != Backend::Pattern {
                return Err(Error::Parse("fractions only exist in the pattern backend".into()));
            }
            let num = parse_poly(num, ring.prime)?;
            let den = parse_poly(den, ring.prime)?;
            return Self::fraction(ring, &num, &den);
        }
        let coeffs = parse_poly(s, ring.prime)?;
        Ok(Self::from_poly(ring, &coeffs))
    }
}

/// Split "(num)/(den)" into its parts, if the string has that shape.
fn split_fraction(s: &str) -> Option<(&str, &str)> {
    let s = s.trim();
    if !s.starts_with('(') {
        return None;
    }
    let mut depth = 0usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    let rest = s[i + 1..].trim_start();
                    let rest = rest.strip_prefix('/')?;
                    let rest = rest.trim();
                    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
                    return Some((&s[1..i], inner));
                }
            }
            _ => {}
        }
    }
    None
}

impl fmt::Display for AdicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Coeffs(v) => write!(f, "{}", poly_to_string(v)),
            Repr::Frac { num, den } => {
                if den == &[1] {
                    write!(f, "{}", poly_to_string(num))
                } else {
                    write!(f, "({})/({})", poly_to_string(num), poly_to_string(den))
                }
            }
        }
    }
}
