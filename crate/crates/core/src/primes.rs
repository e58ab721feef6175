//! Small prime utilities shared by the symbolic and finite layers.

/// Deterministic primality test for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    primal_check::miller_rabin(n)
}

/// Primes in ascending order starting from 2.
pub fn primes() -> impl Iterator<Item = u64> {
    (2u64..).filter(|&n| is_prime(n))
}

/// All primes `p <= bound`.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    primes().take_while(|&p| p <= bound).collect()
}

/// The smallest prime that is not a member of `avoid`.
pub fn first_prime_not_in(avoid: &std::collections::BTreeSet<u64>) -> u64 {
    primes()
        .find(|p| !avoid.contains(p))
        .expect("infinitely many primes")
}

/// Factors `n >= 1` into ascending `(prime, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Returns `(p, e)` when `n = p^e` with `e >= 1`.
pub fn as_prime_power(n: u64) -> Option<(u64, u32)> {
    match factorize(n).as_slice() {
        [(p, e)] => Some((*p, *e)),
        _ => None,
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
