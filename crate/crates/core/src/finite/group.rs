use std::fmt;

use serde::{Serialize, Serializer};

use super::OracleError;
use crate::primes::{as_prime_power, factorize};

/// `Z(m_1) x ... x Z(m_k)` with every `m_i` a prime power, sorted by
/// `(prime, exponent)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    factors: Vec<u64>,
    strides: Vec<usize>,
}

/// Residue tuple; `coords[i]` lies in `[0, m_i)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    pub coords: Vec<u64>,
}

impl Element {
    pub fn new(coords: Vec<u64>) -> Self {
        Element { coords }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn factor_key(m: u64) -> (u64, u32) {
    as_prime_power(m).expect("factors are prime powers")
}

impl FiniteAbelianGroup {
    /// Cyclic factors given as prime powers, in any order. Factors equal to
    /// 1 are dropped.
    pub fn new(mut factors: Vec<u64>) -> Result<Self, OracleError> {
        factors.retain(|&m| m != 1);
        for &m in &factors {
            if as_prime_power(m).is_none() {
                return Err(OracleError::NotPrimePower(m));
            }
        }
        factors.sort_by_key(|&m| factor_key(m));
        let mut strides = vec![1usize; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1].saturating_mul(factors[i + 1] as usize);
        }
        Ok(FiniteAbelianGroup { factors, strides })
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup::new(vec![]).expect("no factors")
    }

    pub fn cyclic(m: u64) -> Result<Self, OracleError> {
        FiniteAbelianGroup::from_invariants(&[m])
    }

    /// Splits arbitrary cyclic orders into primary components.
    pub fn from_invariants(orders: &[u64]) -> Result<Self, OracleError> {
        let mut factors = Vec::new();
        for &d in orders {
            if d == 0 {
                return Err(OracleError::InfiniteFactor);
            }
            factors.extend(factorize(d).into_iter().map(|(p, e)| p.pow(e)));
        }
        FiniteAbelianGroup::new(factors)
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    /// Number of cyclic factors.
    pub fn arity(&self) -> usize {
        self.factors.len()
    }

    /// `None` if the order does not fit in a `u64`.
    pub fn checked_order(&self) -> Option<u64> {
        self.factors.iter().try_fold(1u64, |acc, &m| acc.checked_mul(m))
    }

    pub fn order(&self) -> u64 {
        self.checked_order().expect("group order fits in u64")
    }

    pub fn ensure_within(&self, bound: u64) -> Result<usize, OracleError> {
        match self.checked_order() {
            Some(n) if n <= bound => Ok(n as usize),
            _ => Err(OracleError::BoundExceeded {
                group: self.to_string(),
                bound,
            }),
        }
    }

    /// Least common multiple of the factors.
    pub fn exponent(&self) -> u64 {
        self.factors
            .iter()
            .fold(1, |acc, &m| acc / crate::primes::gcd(acc, m) * m)
    }

    /// The primes dividing the order.
    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.factors.iter().map(|&m| factor_key(m).0).collect();
        ps.dedup();
        ps
    }

    pub fn zero(&self) -> Element {
        Element::new(vec![0; self.arity()])
    }

    /// The `i`-th standard generator.
    pub fn generator(&self, i: usize) -> Element {
        let mut e = self.zero();
        e.coords[i] = 1 % self.factors[i];
        e
    }

    pub fn contains(&self, a: &Element) -> bool {
        a.coords.len() == self.arity() && a.coords.iter().zip(&self.factors).all(|(&x, &m)| x < m)
    }

    pub fn check(&self, a: &Element) -> Result<(), OracleError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(OracleError::InvalidElement {
                element: a.to_string(),
                group: self.to_string(),
            })
        }
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        Element::new(
            a.coords
                .iter()
                .zip(&b.coords)
                .zip(&self.factors)
                .map(|((&x, &y), &m)| (x + y) % m)
                .collect(),
        )
    }

    pub fn neg(&self, a: &Element) -> Element {
        Element::new(
            a.coords
                .iter()
                .zip(&self.factors)
                .map(|(&x, &m)| (m - x) % m)
                .collect(),
        )
    }

    /// `n * a` for any integer `n`.
    pub fn scale(&self, n: i64, a: &Element) -> Element {
        Element::new(
            a.coords
                .iter()
                .zip(&self.factors)
                .map(|(&x, &m)| {
                    let k = i128::from(n).rem_euclid(i128::from(m));
                    ((k * i128::from(x)) % i128::from(m)) as u64
                })
                .collect(),
        )
    }

    pub fn order_of(&self, a: &Element) -> u64 {
        a.coords
            .iter()
            .zip(&self.factors)
            .map(|(&x, &m)| m / crate::primes::gcd(x, m))
            .fold(1, |acc, o| acc / crate::primes::gcd(acc, o) * o)
    }

    /// Mixed-radix index, first coordinate most significant.
    pub fn index_of(&self, a: &Element) -> usize {
        a.coords
            .iter()
            .zip(&self.strides)
            .map(|(&x, &s)| x as usize * s)
            .sum()
    }

    pub fn element(&self, mut index: usize) -> Element {
        let mut coords = vec![0; self.arity()];
        for (i, &s) in self.strides.iter().enumerate() {
            coords[i] = (index / s) as u64;
            index %= s;
        }
        Element::new(coords)
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.order() as usize).map(|i| self.element(i))
    }

    /// `{x : n x = 0}`.
    pub fn torsion_elements(&self, n: u64) -> Vec<Element> {
        let n = n as i64;
        self.elements().filter(|x| self.scale(n, x) == self.zero()).collect()
    }

    /// The `p`-primary component as its own group, when `p` divides the order.
    pub fn primary_component(&self, p: u64) -> FiniteAbelianGroup {
        let factors = self
            .factors
            .iter()
            .copied()
            .filter(|&m| factor_key(m).0 == p)
            .collect();
        FiniteAbelianGroup::new(factors).expect("prime powers")
    }
}

impl fmt::Display for FiniteAbelianGroup {
    /// `Z4 x Z2`, or `0` for the trivial group.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.factors.iter().map(|m| format!("Z{m}")).collect();
        f.write_str(&parts.join(" x "))
    }
}

impl Serialize for FiniteAbelianGroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses `Z4 x Z2`, `Z(2^2) x Z(2)`, `Z6` (factored into `Z2 x Z3`) or `0`.
///
/// Unlike the symbolic grammar, composite moduli are accepted and split into
/// primary components.
pub fn parse_finite_group(text: &str) -> Result<FiniteAbelianGroup, OracleError> {
    let err = |position: usize, message: &str| OracleError::Syntax {
        position,
        message: message.to_string(),
    };
    let trimmed = text.trim();
    if trimmed == "0" || trimmed == "1" {
        return Ok(FiniteAbelianGroup::trivial());
    }
    let mut orders = Vec::new();
    let mut offset = 0;
    for piece in text.split(['x', 'X']) {
        let start = offset + (piece.len() - piece.trim_start().len());
        offset += piece.len() + 1;
        let body = piece.trim();
        let rest = body
            .strip_prefix('Z')
            .ok_or_else(|| err(start, "expected a factor such as Z4 or Z(2^2)"))?;
        let rest = rest.strip_prefix('_').unwrap_or(rest);
        let value = if let Some(inner) = rest.strip_prefix('(') {
            let inner = inner
                .strip_suffix(')')
                .ok_or_else(|| err(start, "missing ')'"))?;
            let (base, exp) = match inner.split_once('^') {
                Some((b, e)) => (b.trim(), e.trim()),
                None => (inner.trim(), "1"),
            };
            let base: u64 = base.parse().map_err(|_| err(start, "bad base"))?;
            let exp: u32 = exp.parse().map_err(|_| err(start, "bad exponent"))?;
            base.checked_pow(exp).ok_or_else(|| err(start, "factor too large"))?
        } else {
            rest.trim().parse::<u64>().map_err(|_| err(start, "bad cyclic order"))?
        };
        orders.push(value);
    }
    FiniteAbelianGroup::from_invariants(&orders).map_err(|e| match e {
        OracleError::InfiniteFactor => err(0, "Z0 is infinite; only finite groups are accepted"),
        other => other,
    })
}
