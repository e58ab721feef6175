use super::group::{Element, FiniteAbelianGroup};
use super::snf::{solve_integer_system, IntMatrix};
use super::subgroup::{enumerate_subgroups, is_direct_summand, relation_lattice, PurityTest, SubgroupBasis};
use super::{OracleError, CROSSCHECK_LIMIT};
use crate::primes::gcd;

fn validate(
    g: &FiniteAbelianGroup,
    m: &FiniteAbelianGroup,
    sources: &[Element],
    images: &[Element],
) -> Result<(), OracleError> {
    if sources.len() != images.len() {
        return Err(OracleError::ArityMismatch {
            sources: sources.len(),
            images: images.len(),
        });
    }
    for x in sources {
        g.check(x)?;
    }
    for y in images {
        m.check(y)?;
    }
    let refs: Vec<&Element> = sources.iter().collect();
    let lattice = relation_lattice(g, &refs)?;
    for col in 0..lattice.cols() {
        let rel = lattice.column(col);
        let value = rel
            .iter()
            .zip(images)
            .fold(m.zero(), |acc, (&c, y)| m.add(&acc, &m.scale(c, y)));
        if value != m.zero() {
            let terms: Vec<String> = rel.iter().map(i64::to_string).collect();
            return Err(OracleError::IllDefinedHom {
                relation: format!("[{}]", terms.join(",")),
            });
        }
    }
    Ok(())
}

/// Decides extension one target coordinate at a time. A hom `G -> Z(m_t)`
/// sends the `i`-th generator to a multiple of `s_i = m_t / gcd(n_i, m_t)`,
/// so the images `y_i` are free and the constraints are the congruences
/// `sum_i c_ji s_i y_i = f_j (mod m_t)`.
fn extends_snf_unchecked(
    g: &FiniteAbelianGroup,
    m: &FiniteAbelianGroup,
    sources: &[Element],
    images: &[Element],
) -> Result<bool, OracleError> {
    let k = g.arity();
    let r = sources.len();
    if r == 0 {
        return Ok(true);
    }
    for (t, &mt) in m.factors().iter().enumerate() {
        let mt_i = mt as i64;
        let mut a = IntMatrix::zeros(r, k + r);
        for (j, x) in sources.iter().enumerate() {
            for (i, &ni) in g.factors().iter().enumerate() {
                let s = mt / gcd(ni, mt);
                a[(j, i)] = (x.coords[i] * s % mt) as i64;
            }
            a[(j, k + j)] = mt_i;
        }
        let b: Vec<i64> = images.iter().map(|y| y.coords[t] as i64).collect();
        if solve_integer_system(&a, &b)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Searches every admissible image of the generators of `G`, one target
/// coordinate at a time (the coordinates of a hom into a product are
/// independent).
fn extends_exhaustive_unchecked(
    g: &FiniteAbelianGroup,
    m: &FiniteAbelianGroup,
    sources: &[Element],
    images: &[Element],
) -> bool {
    m.factors().iter().enumerate().all(|(t, &mt)| {
        let candidates: Vec<Vec<u64>> = g
            .factors()
            .iter()
            .map(|&ni| (0..mt).filter(|x| ni * x % mt == 0).collect())
            .collect();
        let mut pick = vec![0usize; g.arity()];
        loop {
            let ok = sources.iter().zip(images).all(|(x, y)| {
                let v = x
                    .coords
                    .iter()
                    .zip(&pick)
                    .enumerate()
                    .map(|(i, (&c, &p))| c * candidates[i][p] % mt)
                    .sum::<u64>();
                v % mt == y.coords[t]
            });
            if ok {
                return true;
            }
            let mut i = 0;
            loop {
                if i == pick.len() {
                    return false;
                }
                pick[i] += 1;
                if pick[i] < candidates[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
        }
    })
}

/// Whether the hom on `<sources>` given by `sources[j] -> images[j]`
/// extends to all of `G`, by integer congruence solving.
pub fn hom_extends_snf(
    g: &FiniteAbelianGroup,
    m: &FiniteAbelianGroup,
    sources: &[Element],
    images: &[Element],
) -> Result<bool, OracleError> {
    validate(g, m, sources, images)?;
    extends_snf_unchecked(g, m, sources, images)
}

/// Same question as [`hom_extends_snf`], by enumeration of generator images.
pub fn hom_extends_exhaustive(
    g: &FiniteAbelianGroup,
    m: &FiniteAbelianGroup,
    sources: &[Element],
    images: &[Element],
) -> Result<bool, OracleError> {
    validate(g, m, sources, images)?;
    Ok(extends_exhaustive_unchecked(g, m, sources, images))
}

/// SNF verdict, compared against enumeration when both groups have order at
/// most [`CROSSCHECK_LIMIT`].
pub fn hom_extends(
    g: &FiniteAbelianGroup,
    m: &FiniteAbelianGroup,
    sources: &[Element],
    images: &[Element],
) -> Result<bool, OracleError> {
    validate(g, m, sources, images)?;
    let verdict = extends_snf_unchecked(g, m, sources, images)?;
    let small = |x: &FiniteAbelianGroup| x.checked_order().is_some_and(|n| n <= CROSSCHECK_LIMIT);
    if small(g) && small(m) {
        let brute = extends_exhaustive_unchecked(g, m, sources, images);
        if brute != verdict {
            return Err(OracleError::RouteDisagreement {
                detail: format!("G = {g}, M = {m}, snf = {verdict}, exhaustive = {brute}"),
            });
        }
    }
    Ok(verdict)
}

/// Generators of `Hom(K, M)` for `K` given by a basis: the basis element
/// `b_i` of order `d_i` goes to `(m_t / gcd(d_i, m_t)) e_t`, all others to 0.
///
/// Extendable homs form a subgroup of `Hom(K, M)`, so it is enough to try
/// these.
pub fn restriction_homs(k: &SubgroupBasis, m: &FiniteAbelianGroup) -> Vec<Vec<Element>> {
    let mut out = Vec::new();
    for (i, &d) in k.group.factors().iter().enumerate() {
        for (t, &mt) in m.factors().iter().enumerate() {
            let g = gcd(d, mt);
            if g == 1 {
                continue;
            }
            let mut images = vec![m.zero(); k.basis.len()];
            images[i].coords[t] = mt / g;
            out.push(images);
        }
    }
    out
}

fn injective_over(
    m: &FiniteAbelianGroup,
    n: &FiniteAbelianGroup,
    bound: u64,
    pure_only: bool,
) -> Result<bool, OracleError> {
    let subgroups = enumerate_subgroups(n, bound)?;
    let purity = pure_only.then(|| PurityTest::new(n));
    for k in &subgroups {
        if let Some(test) = &purity {
            if !test.is_pure(k.members()) {
                continue;
            }
        }
        let basis = k.basis()?;
        for images in restriction_homs(&basis, m) {
            if !extends_snf_unchecked(n, m, &basis.basis, &images)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether every hom from a subgroup of `N` into `M` extends to `N`.
pub fn is_relatively_injective(m: &FiniteAbelianGroup, n: &FiniteAbelianGroup, bound: u64) -> Result<bool, OracleError> {
    injective_over(m, n, bound, false)
}

/// As [`is_relatively_injective`], over pure subgroups of `N` only.
pub fn is_relatively_pure_injective(
    m: &FiniteAbelianGroup,
    n: &FiniteAbelianGroup,
    bound: u64,
) -> Result<bool, OracleError> {
    injective_over(m, n, bound, true)
}

/// Whether every pure subgroup of `N` is a direct summand.
pub fn is_pure_split_finite(n: &FiniteAbelianGroup, bound: u64) -> Result<bool, OracleError> {
    let purity = PurityTest::new(n);
    for k in enumerate_subgroups(n, bound)? {
        if purity.is_pure(k.members()) && !is_direct_summand(&k, n)? {
            return Ok(false);
        }
    }
    Ok(true)
}
