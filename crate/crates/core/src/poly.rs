//! Sparse multivariate polynomials over the integers, divided differences, and an
//! independent Schubert polynomial oracle used to check everything built on pipe dreams.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Exponent vector `(e_1, e_2, …)` with trailing zeros trimmed.
pub type Exponents = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Exponents, BigInt>,
}

fn trim(mut e: Exponents) -> Exponents {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Vec::new(), BigInt::one())
    }

    pub fn monomial(exponents: Exponents, coeff: BigInt) -> Self {
        let mut p = Self::zero();
        p.add_term(exponents, coeff);
        p
    }

    /// The variable `x_i` (1-based).
    pub fn var(i: usize) -> Self {
        let mut e = vec![0; i];
        e[i - 1] = 1;
        Self::monomial(e, BigInt::one())
    }

    /// `x_1 + … + x_k`.
    pub fn elementary_sum(k: usize) -> Self {
        (1..=k).fold(Self::zero(), |acc, i| &acc + &Self::var(i))
    }

    pub fn add_term(&mut self, exponents: Exponents, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let key = trim(exponents);
        let entry = self.terms.entry(key.clone()).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing lexicographic order of exponent vectors (`e_1` compared first).
    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exponents: &[u32]) -> BigInt {
        self.terms
            .get(&trim(exponents.to_vec()))
            .cloned()
            .unwrap_or_default()
    }

    /// Lexicographically smallest exponent vector and its coefficient.
    pub fn lex_min(&self) -> Option<(&Exponents, &BigInt)> {
        self.terms.iter().next()
    }

    /// Largest variable index appearing.
    pub fn num_vars(&self) -> usize {
        self.terms.keys().map(|e| e.len()).max().unwrap_or(0)
    }

    pub fn degrees(&self) -> impl Iterator<Item = u32> + '_ {
        self.terms.keys().map(|e| e.iter().sum())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    /// `s_i f`: exchange `x_i` and `x_{i+1}`.
    pub fn swap_vars(&self, i: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut e = e.clone();
            if e.len() < i + 1 {
                e.resize(i + 1, 0);
            }
            e.swap(i - 1, i);
            out.add_term(e, c.clone());
        }
        out
    }

    /// `∂_i f = (f − s_i f) / (x_i − x_{i+1})`.
    ///
    /// Each term is divided in closed form; the quotient is then multiplied back and
    /// compared with the numerator, so a wrong quotient surfaces as an error.
    pub fn divided_difference(&self, i: usize) -> Result<Self> {
        assert!(i >= 1, "divided differences are indexed from 1");
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let a = e.get(i - 1).copied().unwrap_or(0);
            let b = e.get(i).copied().unwrap_or(0);
            if a == b {
                continue;
            }
            let (hi, lo) = (a.max(b), a.min(b));
            let coeff = if a > b { c.clone() } else { -c };
            let mut base = e.clone();
            if base.len() < i + 1 {
                base.resize(i + 1, 0);
            }
            for t in 0..(hi - lo) {
                base[i - 1] = hi - 1 - t;
                base[i] = lo + t;
                out.add_term(base.clone(), coeff.clone());
            }
        }
        let numerator = self - &self.swap_vars(i);
        let denominator = &Self::var(i) - &Self::var(i + 1);
        if &out * &denominator != numerator {
            return Err(Error::DivisionRemainder);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let coeff = match c.to_i64() {
                    Some(v) => serde_json::Value::from(v),
                    None => serde_json::Value::from(c.to_string()),
                };
                serde_json::json!({ "coeff": coeff, "exponents": e })
            })
            .collect();
        serde_json::Value::Array(terms)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&BigInt::from(-1))
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    // Exponents add when monomials multiply.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let n = e1.len().max(e2.len());
                let e: Exponents = (0..n)
                    .map(|i| e1.get(i).copied().unwrap_or(0) + e2.get(i).copied().unwrap_or(0))
                    .collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl std::iter::Sum for Polynomial {
    fn sum<I: Iterator<Item = Polynomial>>(iter: I) -> Self {
        iter.fold(Polynomial::zero(), |acc, p| &acc + &p)
    }
}

fn format_monomial(e: &[u32]) -> String {
    e.iter()
        .enumerate()
        .filter(|(_, &a)| a > 0)
        .map(|(i, &a)| {
            if a == 1 {
                format!("x{}", i + 1)
            } else {
                format!("x{}^{a}", i + 1)
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let abs = c.abs();
            let sign = c.is_negative();
            match (idx, sign) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mono = format_monomial(e);
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                f.write_str(&mono)?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl FromStr for Polynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad polynomial `{s}`"));
        let normalized = s.replace('-', "+-");
        let mut out = Polynomial::zero();
        for raw in normalized.split('+') {
            let mut term = raw.trim();
            if term.is_empty() {
                continue;
            }
            let mut coeff = BigInt::one();
            if let Some(rest) = term.strip_prefix('-') {
                coeff = -coeff;
                term = rest.trim();
            }
            let mut factors = term;
            if let Some((c, rest)) = term.split_once('*') {
                coeff *= c.trim().parse::<BigInt>().map_err(|_| bad())?;
                factors = rest;
            } else if term.chars().all(|ch| ch.is_ascii_digit()) {
                coeff *= term.parse::<BigInt>().map_err(|_| bad())?;
                factors = "";
            }
            let mut e: Exponents = Vec::new();
            for factor in factors.split_whitespace() {
                let body = factor.strip_prefix('x').ok_or_else(bad)?;
                let (idx, pow) = match body.split_once('^') {
                    Some((i, p)) => (i, p.parse::<u32>().map_err(|_| bad())?),
                    None => (body, 1),
                };
                let idx: usize = idx.parse().map_err(|_| bad())?;
                if idx == 0 {
                    return Err(bad());
                }
                if e.len() < idx {
                    e.resize(idx, 0);
                }
                e[idx - 1] += pow;
            }
            out.add_term(e, coeff);
        }
        Ok(out)
    }
}

type SchubertCache = RwLock<HashMap<Permutation, Arc<Polynomial>>>;

fn schubert_cache() -> &'static SchubertCache {
    static CACHE: OnceLock<SchubertCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn is_dominant(code: &[usize]) -> bool {
    code.windows(2).all(|w| w[0] >= w[1])
}

fn code_monomial(w: &Permutation) -> Polynomial {
    Polynomial::monomial(
        w.code().into_iter().map(|c| c as u32).collect(),
        BigInt::one(),
    )
}

/// Schubert polynomial by divided differences.
///
/// Walks up right weak order (`w ↦ w s_i` at code ascents) until reaching a dominant
/// permutation `d`, whose Schubert polynomial is the monomial `x^{code(d)}`, then applies
/// `∂_i` back down. Results are memoized for the life of the process.
pub fn schubert_oracle(w: &Permutation) -> Polynomial {
    (*schubert_arc(w)).clone()
}

fn schubert_arc(w: &Permutation) -> Arc<Polynomial> {
    if let Some(p) = schubert_cache().read().unwrap().get(w) {
        return p.clone();
    }
    let mut path: Vec<(Permutation, usize)> = Vec::new();
    let mut cur = w.clone();
    let mut known: Option<Arc<Polynomial>> = None;
    loop {
        if let Some(p) = schubert_cache().read().unwrap().get(&cur) {
            known = Some(p.clone());
            break;
        }
        let code = cur.code();
        if is_dominant(&code) {
            break;
        }
        let i = (1..code.len())
            .rev()
            .find(|&i| code[i - 1] < code[i])
            .expect("non-dominant code has a strict ascent");
        let up = cur.swap_positions(i, i + 1);
        path.push((cur, i));
        cur = up;
    }
    let mut poly = known.unwrap_or_else(|| {
        let p = Arc::new(code_monomial(&cur));
        schubert_cache()
            .write()
            .unwrap()
            .insert(cur.clone(), p.clone());
        p
    });
    for (perm, i) in path.into_iter().rev() {
        let next = poly
            .divided_difference(i)
            .expect("divided difference of a polynomial is exact");
        poly = Arc::new(next);
        schubert_cache().write().unwrap().insert(perm, poly.clone());
    }
    poly
}

/// Schubert polynomial from the longest element of `S_n`, `n` the support of `w`:
/// `𝔖_{w0} = x_1^{n-1} ⋯ x_{n-1}` and `𝔖_w = ∂_i 𝔖_{w s_i}` at ascents. Uncached; used to
/// cross-check [`schubert_oracle`] on small groups.
pub fn schubert_from_longest(w: &Permutation) -> Polynomial {
    let n = w.size();
    let mut path = Vec::new();
    let mut cur = w.clone();
    while let Some(i) = (1..n).find(|&i| cur.apply(i) < cur.apply(i + 1)) {
        path.push(i);
        cur = cur.swap_positions(i, i + 1);
    }
    let staircase: Exponents = (1..n).map(|i| (n - i) as u32).collect();
    let mut poly = Polynomial::monomial(staircase, BigInt::one());
    for i in path.into_iter().rev() {
        poly = poly.divided_difference(i).expect("exact division");
    }
    poly
}

pub type SchubertExpansion = BTreeMap<Permutation, BigInt>;

fn recombine(expansion: &SchubertExpansion) -> Polynomial {
    expansion
        .iter()
        .map(|(u, c)| schubert_oracle(u).scale(c))
        .sum()
}

/// Expands `p` in the Schubert basis.
///
/// Greedy: the lex-smallest monomial `x^e` of the remainder must be the leading monomial of
/// `𝔖_u` with `code(u) = e`. If a coefficient turns negative or that leading-term property
/// fails, falls back to [`expand_by_linear_solve`]. The result is checked to recombine to `p`.
pub fn expand_in_schubert_basis(p: &Polynomial) -> Result<SchubertExpansion> {
    match expand_greedy(p) {
        Some(exp) => Ok(exp),
        None => expand_by_linear_solve(p),
    }
}

fn expand_greedy(p: &Polynomial) -> Option<SchubertExpansion> {
    let mut rest = p.clone();
    let mut out = SchubertExpansion::new();
    let budget = 4 * p.num_terms() + 64;
    for _ in 0..budget {
        let Some((e, c)) = rest.lex_min() else {
            break;
        };
        if c.is_negative() {
            return None;
        }
        let (e, c) = (e.clone(), c.clone());
        let code: Vec<usize> = e.iter().map(|&a| a as usize).collect();
        let u = Permutation::from_code(&code);
        let s = schubert_arc(&u);
        if s.lex_min().map(|(lead, _)| lead) != Some(&e) {
            return None;
        }
        rest = &rest - &s.scale(&c);
        *out.entry(u).or_insert_with(BigInt::zero) += c;
    }
    if !rest.is_zero() || out.values().any(|c| !c.is_positive()) {
        return None;
    }
    (recombine(&out) == *p).then_some(out)
}

/// Expands `p` by solving the exact linear system over candidate Schubert polynomials:
/// every `u` with `code(u)` in the support of `p` whose own support lies inside it.
pub fn expand_by_linear_solve(p: &Polynomial) -> Result<SchubertExpansion> {
    let rows: Vec<&Exponents> = p.terms.keys().collect();
    let row_index: HashMap<&Exponents, usize> =
        rows.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let mut candidates = Vec::new();
    let mut columns: Vec<Vec<BigRational>> = Vec::new();
    for e in &rows {
        let code: Vec<usize> = e.iter().map(|&a| a as usize).collect();
        let u = Permutation::from_code(&code);
        let s = schubert_arc(&u);
        let mut col = vec![BigRational::zero(); rows.len()];
        let mut inside = true;
        for (m, c) in s.terms() {
            match row_index.get(m) {
                Some(&r) => col[r] = BigRational::from_integer(c.clone()),
                None => {
                    inside = false;
                    break;
                }
            }
        }
        if inside {
            candidates.push(u);
            columns.push(col);
        }
    }
    let rhs: Vec<BigRational> = rows
        .iter()
        .map(|e| BigRational::from_integer(p.terms[*e].clone()))
        .collect();
    let solution = solve_exact(&columns, &rhs)
        .ok_or_else(|| Error::ExpansionFailed("linear system has no solution".into()))?;
    let mut out = SchubertExpansion::new();
    for (u, x) in candidates.into_iter().zip(solution) {
        if x.is_zero() {
            continue;
        }
        if !x.is_integer() || x.is_negative() {
            return Err(Error::ExpansionFailed(format!(
                "coefficient of {u} is {x}, not a nonnegative integer"
            )));
        }
        out.insert(u, x.to_integer());
    }
    if recombine(&out) != *p {
        return Err(Error::ExpansionFailed("recombination mismatch".into()));
    }
    Ok(out)
}

/// Solves `Σ_j x_j columns[j] = rhs` by Gauss–Jordan elimination; free variables are zero.
#[allow(clippy::needless_range_loop)]
fn solve_exact(columns: &[Vec<BigRational>], rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let m = rhs.len();
    let n = columns.len();
    let mut a: Vec<Vec<BigRational>> = (0..m)
        .map(|r| {
            let mut row: Vec<BigRational> = columns.iter().map(|c| c[r].clone()).collect();
            row.push(rhs[r].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..m {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=n {
                    let delta = &f * &a[row][c];
                    a[r][c] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m {
            break;
        }
    }
    if a[row..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = a[r][n].clone();
    }
    Some(x)
}

/// `(x_1 + … + x_k) 𝔖_p` in the Schubert basis.
pub fn monk_product(p: &Permutation, k: usize) -> Result<SchubertExpansion> {
    expand_in_schubert_basis(&(&Polynomial::elementary_sum(k) * &schubert_oracle(p)))
}

/// `𝔖_w 𝔖_v` in the Schubert basis.
pub fn schubert_product(w: &Permutation, v: &Permutation) -> Result<SchubertExpansion> {
    expand_in_schubert_basis(&(&schubert_oracle(w) * &schubert_oracle(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::all_permutations;
    use proptest::prelude::*;

    fn poly(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    fn perm(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn divided_difference_examples() {
        assert_eq!(poly("x1^2").divided_difference(1).unwrap(), poly("x1 + x2"));
        assert!(poly("x1 x2").divided_difference(1).unwrap().is_zero());
        assert_eq!(poly("x1^2 x2").divided_difference(2).unwrap(), poly("x1^2"));
    }

    #[test]
    fn schubert_examples() {
        assert_eq!(schubert_oracle(&Permutation::identity()), Polynomial::one());
        assert_eq!(
            schubert_oracle(&perm("31524")),
            poly("x1^2 x3^2 + x1^2 x2 x3 + x1^2 x2^2 + x1^3 x3 + x1^3 x2")
        );
        assert_eq!(
            schubert_oracle(&perm("1432")),
            poly("x2^2 x3 + x1 x2 x3 + x1^2 x3 + x1 x2^2 + x1^2 x2")
        );
    }

    #[test]
    fn dominant_start_agrees_with_longest_element() {
        for w in all_permutations(5) {
            assert_eq!(schubert_oracle(&w), schubert_from_longest(&w), "{w}");
        }
    }

    #[test]
    fn schubert_shape() {
        for w in all_permutations(5) {
            let s = schubert_oracle(&w);
            assert!(s.terms().all(|(_, c)| c.is_positive()));
            assert!(s.degrees().all(|d| d as usize == w.length()));
            let code: Exponents = w.code().into_iter().map(|c| c as u32).collect();
            assert_eq!(s.lex_min().unwrap().0, &code);
        }
    }

    #[test]
    fn text_form() {
        let p = poly("x1^2 x3^2 + x1^3 x2 - 3*x2 + 7");
        assert_eq!(p.to_string(), "7 - 3*x2 + x1^2 x3^2 + x1^3 x2");
        assert_eq!(p.to_string().parse::<Polynomial>().unwrap(), p);
        assert_eq!(Polynomial::zero().to_string(), "0");
        assert!("x0".parse::<Polynomial>().is_err());
        assert!("y1".parse::<Polynomial>().is_err());
    }

    #[test]
    fn json_form() {
        let v = poly("2*x1 x3 + 1").to_json();
        assert_eq!(
            v.to_string(),
            r#"[{"coeff":1,"exponents":[]},{"coeff":2,"exponents":[1,0,1]}]"#
        );
    }

    #[test]
    fn expansion_examples() {
        let e = expand_in_schubert_basis(&schubert_oracle(&perm("1432"))).unwrap();
        assert_eq!(e, [(perm("1432"), BigInt::one())].into_iter().collect());

        let e = expand_in_schubert_basis(&poly("x1^2 + x1 x2")).unwrap();
        let expect: SchubertExpansion =
            [(perm("312"), BigInt::one()), (perm("231"), BigInt::one())]
                .into_iter()
                .collect();
        assert_eq!(e, expect);

        let e = schubert_product(&perm("13542"), &perm("1432")).unwrap();
        let expect: SchubertExpansion = [
            "34521", "25431", "35412", "246315", "263415", "156324", "164325",
        ]
        .iter()
        .map(|s| (perm(s), BigInt::one()))
        .collect();
        assert_eq!(e, expect);
    }

    #[test]
    fn linear_solve_fallback_agrees() {
        for (w, v) in [("132", "213"), ("1432", "2143"), ("13542", "1432")] {
            let p = &schubert_oracle(&perm(w)) * &schubert_oracle(&perm(v));
            assert_eq!(
                expand_by_linear_solve(&p).unwrap(),
                expand_in_schubert_basis(&p).unwrap()
            );
        }
    }

    #[test]
    fn non_schubert_positive_is_rejected() {
        assert!(expand_in_schubert_basis(&poly("x2")).is_err());
        assert!(expand_in_schubert_basis(&poly("x1 - x2")).is_err());
    }

    #[test]
    fn monk_examples() {
        let covers = perm("1234").all_k_covers_up(2);
        let m = monk_product(&perm("1234"), 2).unwrap();
        assert_eq!(m.keys().cloned().collect::<Vec<_>>(), covers);
        assert!(m.values().all(|c| c.is_one()));

        let m = monk_product(&Permutation::identity(), 1).unwrap();
        assert_eq!(m, [(perm("21"), BigInt::one())].into_iter().collect());

        let m = monk_product(&perm("31524"), 3).unwrap();
        assert_eq!(
            m.keys().cloned().collect::<Vec<_>>(),
            perm("31524").k_covers_up(3, 6)
        );
        assert!(m.values().all(|c| c.is_one()));
    }

    #[test]
    fn monk_rule_over_s4() {
        for w in all_permutations(4) {
            for k in 1..=4 {
                let m = monk_product(&w, k).unwrap();
                assert_eq!(m.keys().cloned().collect::<Vec<_>>(), w.all_k_covers_up(k));
                assert!(m.values().all(|c| c.is_one()));
            }
        }
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((prop::collection::vec(0u32..4, 0..5), -5i64..6), 0..6).prop_map(
            |terms| {
                let mut p = Polynomial::zero();
                for (e, c) in terms {
                    p.add_term(e, BigInt::from(c));
                }
                p
            },
        )
    }

    proptest! {
        #[test]
        fn nilpotent(p in arb_poly(), i in 1usize..4) {
            let once = p.divided_difference(i).unwrap();
            prop_assert!(once.divided_difference(i).unwrap().is_zero());
        }

        #[test]
        fn braid(p in arb_poly(), i in 1usize..4) {
            let lhs = p.divided_difference(i).unwrap()
                .divided_difference(i + 1).unwrap()
                .divided_difference(i).unwrap();
            let rhs = p.divided_difference(i + 1).unwrap()
                .divided_difference(i).unwrap()
                .divided_difference(i + 1).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn text_roundtrip(p in arb_poly()) {
            prop_assert_eq!(p.to_string().parse::<Polynomial>().unwrap(), p);
        }
    }
}
