use super::group::{Element, FiniteAbelianGroup};
use super::OracleError;
use crate::characteristic::Height;
use crate::primes::as_prime_power;

/// Largest `k` with `a` in `p^k G`.
///
/// In a primary decomposition `p^k G` is `p^k Z(p^e)` on the `p`-factors
/// and everything elsewhere, so the height is the least `p`-adic valuation
/// among nonzero `p`-coordinates; with none, `a` lies in every `p^k G`.
pub fn element_height(g: &FiniteAbelianGroup, a: &Element, p: u64) -> Result<Height, OracleError> {
    g.check(a)?;
    let mut height: Option<u32> = None;
    for (&x, &m) in a.coords.iter().zip(g.factors()) {
        let (q, _) = as_prime_power(m).expect("prime-power factor");
        if q != p || x == 0 {
            continue;
        }
        let mut v = 0;
        let mut y = x;
        while y % p == 0 {
            y /= p;
            v += 1;
        }
        height = Some(height.map_or(v, |h| h.min(v)));
    }
    Ok(height.map_or(Height::Infinite, Height::Finite))
}

fn inverse_mod(c: i64, n: u64) -> Option<u64> {
    let n = i128::from(n);
    let (mut r0, mut r1) = (i128::from(c).rem_euclid(n), n);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1 || n == 1).then(|| s0.rem_euclid(n) as u64)
}

/// Value at `b/c` of the hom `Z_(p) -> M` with `1 -> a`, for a `p`-group `M`:
/// `b y a` where `c y = 1` modulo the order of `a`.
pub fn localization_hom_image(m: &FiniteAbelianGroup, a: &Element, b: i64, c: i64) -> Result<Element, OracleError> {
    m.check(a)?;
    let primes = m.primes();
    if primes.len() > 1 {
        return Err(OracleError::NotPGroup { group: m.to_string() });
    }
    let p = primes.first().copied().unwrap_or(0);
    if c == 0 || (p != 0 && c.rem_euclid(p as i64) == 0) {
        return Err(OracleError::NotCoprime { c, p });
    }
    let n = m.order_of(a);
    let y = inverse_mod(c, n).expect("c is a unit modulo a power of p");
    let k = (i128::from(b).rem_euclid(i128::from(n)) * i128::from(y)) % i128::from(n);
    Ok(m.scale(k as i64, a))
}
