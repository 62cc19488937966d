//! Coefficient tables `Y_{b,n}` of the characteristic system and the full and
//! reduced characteristic matrices of each block `p`.
//!
//! Every coefficient has the common factor `4π` divided out. The two formal
//! variables are `μ = φ_μ U^μ` (written `λ` after the comoving substitution)
//! and `φ`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::Value;

use crate::combinatorics::{binomial, double_factorial, factorial, int, Rational};
use crate::error::{Error, Result};
use crate::linalg;

/// Coefficient of `X_{(h,k)}` inside `Y_{b,n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YTerm {
    pub h: usize,
    pub k: usize,
    pub mu_coeff: Rational,
    pub phi_coeff: Rational,
}

impl fmt::Display for YTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.h, self.k, self.mu_coeff, self.phi_coeff)
    }
}

/// Which of the two formal variables a partial sum multiplies.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Part {
    Mu,
    Phi,
}

#[derive(Default)]
struct Accumulator(BTreeMap<(usize, usize), (Rational, Rational)>);

impl Accumulator {
    fn add(&mut self, h: usize, k: usize, part: Part, c: Rational) {
        let e = self.0.entry((h, k)).or_insert_with(|| (Rational::zero(), Rational::zero()));
        match part {
            Part::Mu => e.0 += c,
            Part::Phi => e.1 += c,
        }
    }

    /// Merged terms in column order (`h` descending), zero terms dropped.
    fn finish(self) -> Vec<YTerm> {
        let mut out: Vec<YTerm> = self
            .0
            .into_iter()
            .filter(|(_, (mu, phi))| !(mu.is_zero() && phi.is_zero()))
            .map(|((h, k), (mu_coeff, phi_coeff))| YTerm { h, k, mu_coeff, phi_coeff })
            .collect();
        out.sort_by_key(|t| std::cmp::Reverse(t.h));
        out
    }
}

fn fact(n: i64, ctx: &str) -> Result<Rational> {
    factorial(n)
        .map(Rational::from_integer)
        .map_err(|e| Error::domain(format!("{e} at {ctx}")))
}

fn dfact(n: i64, ctx: &str) -> Result<Rational> {
    double_factorial(n)
        .map(Rational::from_integer)
        .map_err(|e| Error::domain(format!("{e} at {ctx}")))
}

fn sign(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Indices shared by one quadruple sum. `top` is the upper binomial argument
/// before the `+1` shift of the φ part and `numer_fact` the argument of the
/// factorial in the numerator of the ratio of factorials.
struct SumShape {
    p: i64,
    b: i64,
    n: i64,
    top: i64,
    numer_fact: i64,
    /// 0 for the μ part, 1 for the φ part.
    shift: i64,
}

impl SumShape {
    /// One summand (without the overall sign of the part) and its X label.
    fn term(&self, r: i64, s: i64, t: i64) -> Result<((usize, usize), Rational)> {
        let SumShape { p, b, n, top, numer_fact, shift } = *self;
        let ctx = format!("p={p}, b={b}, n={n}, r={r}, s={s}, T={t}");
        let c = Rational::new(BigInt::one(), BigInt::from(2 * r + 1))
            * int(binomial(top + shift, 2 * r))
            * sign(top + shift)
            * int(binomial(r, s))
            * fact(2 * r - 2 * s, &ctx)?
            / fact(2 * r - 2 * s - b - shift, &ctx)?
            * fact(numer_fact, &ctx)?
            / fact(top + shift, &ctx)?
            * dfact(2 * s, &ctx)?
            / dfact(2 * s - 2 * p, &ctx)?
            * int(binomial(s - p, t))
            * sign(t);
        let h = n - p - 2 * r + b + 2 * s - 2 * t + shift;
        let k = 2 * r - b - 2 * s + 2 * t - shift;
        if h < 0 || k < 0 {
            return Err(Error::domain(format!("negative X label ({h}, {k}) at {ctx}")));
        }
        Ok(((h as usize, k as usize), c))
    }

    fn accumulate(
        &self,
        acc: &mut Accumulator,
        part: Part,
        negate: bool,
        r_range: (i64, i64),
        s_max: impl Fn(i64) -> i64,
    ) -> Result<()> {
        for r in r_range.0..=r_range.1 {
            for s in self.p..=s_max(r) {
                for t in 0..=s - self.p {
                    let ((h, k), c) = self.term(r, s, t)?;
                    acc.add(h, k, part, if negate { -c } else { c });
                }
            }
        }
        Ok(())
    }
}

/// `Y_{b,n}` for block `p` from the four case formulas (b even or odd,
/// `n = p` or `n > p`).
pub fn y_coeff(p: usize, b: usize, n: usize) -> Result<Vec<YTerm>> {
    if n < p {
        return Err(Error::domain(format!("y_coeff: n={n} < p={p}")));
    }
    let (pi, bi, ni) = (p as i64, b as i64, n as i64);
    let ctx = format!("p={p}, b={b}, n={n}");
    let mut acc = Accumulator::default();
    let even = b.is_multiple_of(2);
    if n == p {
        let (value, part) = if even {
            let v = int(binomial(pi + bi / 2, pi)) * fact(bi, &ctx)? * fact(pi, &ctx)? * dfact(2 * pi, &ctx)?
                / fact(2 * pi + bi + 1, &ctx)?;
            (-v, Part::Mu)
        } else {
            let v = int(binomial(pi + (bi + 1) / 2, pi))
                * fact(bi + 1, &ctx)?
                * fact(pi, &ctx)?
                * dfact(2 * pi, &ctx)?
                / fact(2 * pi + bi + 2, &ctx)?;
            (v, Part::Phi)
        };
        acc.add(0, 0, part, value);
        return Ok(acc.finish());
    }
    let top = pi + bi + ni;
    let mu = SumShape { p: pi, b: bi, n: ni, top, numer_fact: ni, shift: 0 };
    let phi = SumShape { shift: 1, ..mu };
    let mu_hi = top / 2;
    let phi_hi = (top + 1) / 2;
    if even {
        let half = bi / 2;
        mu.accumulate(&mut acc, Part::Mu, true, (pi + half, mu_hi), |r| r - half)?;
        phi.accumulate(&mut acc, Part::Phi, false, (pi + 1 + half, phi_hi), |r| r - (bi + 2) / 2)?;
    } else {
        let half = (bi + 1) / 2;
        mu.accumulate(&mut acc, Part::Mu, true, (pi + half, mu_hi), |r| r - half)?;
        phi.accumulate(&mut acc, Part::Phi, false, (pi + half, phi_hi), |r| r - half)?;
    }
    Ok(acc.finish())
}

/// `Y_{b,n}` read off the general system for the equation labelled `(m, a, b)`,
/// with `a + b = m - p`. The `m` and `a` dependence is kept verbatim.
pub fn y_coeff_from_eq7(p: usize, m: usize, a: usize, b: usize, n: usize) -> Result<Vec<YTerm>> {
    if m < p || a + b != m - p {
        return Err(Error::domain(format!("need a + b = m - p, got p={p}, m={m}, a={a}, b={b}")));
    }
    if n < p {
        return Err(Error::domain(format!("n={n} < p={p}")));
    }
    let (pi, mi, ai, bi, ni) = (p as i64, m as i64, a as i64, b as i64, n as i64);
    let top = mi + ni - ai;
    let numer_fact = top - bi - pi;
    let mut acc = Accumulator::default();

    let mu = SumShape { p: pi, b: bi, n: ni, top, numer_fact, shift: 0 };
    if ni >= pi + bi - 2 * (bi / 2) {
        mu.accumulate(&mut acc, Part::Mu, true, ((2 * pi + bi + 1) / 2, top / 2), |r| (2 * r - bi) / 2)?;
    }
    let phi = SumShape { shift: 1, ..mu };
    if ni >= pi + bi + 1 - 2 * ((bi + 1) / 2) {
        phi.accumulate(&mut acc, Part::Phi, false, ((2 * pi + bi + 2) / 2, (top + 1) / 2), |r| {
            (2 * r - bi - 1) / 2
        })?;
    }
    Ok(acc.finish())
}

/// Side of the block-`p` system at order `N`: `(N-p+1)(N-p+2)/2`.
pub fn block_side(p: usize, order: usize) -> usize {
    let d = order - p;
    (d + 1) * (d + 2) / 2
}

/// Number of independent copies of block `p` in the full spectrum.
pub fn block_multiplicity(p: usize) -> usize {
    if p == 0 {
        1
    } else {
        2
    }
}

/// Unknown labels `(h, k)` ordered by `n = p+h+k` ascending, then `h` descending.
pub fn column_labels(p: usize, order: usize) -> Vec<(usize, usize)> {
    (0..=order - p).flat_map(eta_labels).collect()
}

fn eta_labels(eta: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=eta).rev().map(move |h| (h, eta - h))
}

/// Entry `mu·λ + phi·φ`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinearEntry {
    pub mu: Rational,
    pub phi: Rational,
}

impl LinearEntry {
    pub fn is_zero(&self) -> bool {
        self.mu.is_zero() && self.phi.is_zero()
    }
}

/// Square matrix of degree-one entries in `(λ, φ)`.
///
/// For a full block the rows are `(b, m)`; for a reduced subsystem they are
/// `(q, p+η)`, the equation `Y_{q,p+η} = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharMatrix {
    pub p: usize,
    pub order: usize,
    pub rows: Vec<(usize, usize)>,
    pub cols: Vec<(usize, usize)>,
    pub entries: Vec<Vec<LinearEntry>>,
}

impl CharMatrix {
    pub fn side(&self) -> usize {
        self.rows.len()
    }
}

/// Symmetric `(N+1)×(N+1)` matrix of closure scalars `G_{m,n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentMatrix<T> {
    order: usize,
    g: Vec<Vec<T>>,
}

impl<T: Clone + PartialEq> MomentMatrix<T> {
    pub fn new(g: Vec<Vec<T>>) -> Result<Self> {
        let size = g.len();
        if size == 0 || g.iter().any(|row| row.len() != size) {
            return Err(Error::Closure("G must be a non-empty square matrix".into()));
        }
        for i in 0..size {
            for j in 0..i {
                if g[i][j] != g[j][i] {
                    return Err(Error::Closure(format!("G is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(MomentMatrix { order: size - 1, g })
    }

    pub fn from_fn(order: usize, f: impl Fn(usize, usize) -> T) -> Result<Self> {
        MomentMatrix::new((0..=order).map(|m| (0..=order).map(|n| f(m, n)).collect()).collect())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, m: usize, n: usize) -> &T {
        &self.g[m][n]
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.g
    }
}

impl MomentMatrix<Rational> {
    /// Determinants of the trailing blocks `{j..N}`, `j = 0..=N`.
    pub fn trailing_minors(&self) -> Vec<Rational> {
        linalg::trailing_minors(&self.g)
    }

    pub fn is_admissible(&self) -> bool {
        self.trailing_minors().iter().all(|d| !d.is_zero())
    }

    /// Reads `{"N": .., "G": [...]}` with `G` row-major (flat or nested);
    /// entries are decimal numbers or `"num/den"` strings, all read exactly.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let order = doc
            .get("N")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing non-negative integer field N".into()))? as usize;
        let raw = doc.get("G").and_then(Value::as_array).ok_or_else(|| Error::Parse("missing array field G".into()))?;
        let flat: Vec<&Value> = if raw.iter().all(Value::is_array) {
            raw.iter().flat_map(|r| r.as_array().unwrap().iter()).collect()
        } else {
            raw.iter().collect()
        };
        let size = order + 1;
        if flat.len() != size * size {
            return Err(Error::Parse(format!("G has {} entries, expected {}", flat.len(), size * size)));
        }
        let values = flat.into_iter().map(parse_entry).collect::<Result<Vec<_>>>()?;
        MomentMatrix::new(values.chunks(size).map(<[Rational]>::to_vec).collect())
    }
}

fn parse_entry(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_decimal(&n.to_string()),
        other => Err(Error::Parse(format!("unsupported G entry {other}"))),
    }
}

/// `"a/b"`, an integer, or a decimal literal.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
            let den: BigInt = den.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(num, den))
        }
        None => parse_decimal(s),
    }
}

/// Exact value of a decimal literal such as `-12.5e-3`.
pub fn parse_decimal(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("bad decimal {s:?}"));
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    let all = format!("{int_part}{frac_part}");
    if all.is_empty() || !all.bytes().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let value: BigInt = all.parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut q = Rational::from_integer(value);
    if scale >= 0 {
        q *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -q } else { q })
}

fn entry_from_terms(terms: &[YTerm], col: (usize, usize), scale: &Rational) -> LinearEntry {
    terms
        .iter()
        .find(|t| (t.h, t.k) == col)
        .map(|t| LinearEntry { mu: scale * &t.mu_coeff, phi: scale * &t.phi_coeff })
        .unwrap_or_default()
}

/// The block-`p` system `Σ_n G_{m,n} Y_{b,n} = 0`, rows `(b, m)` with
/// `b = 0..=N-p`, `m = p+b..=N`.
pub fn full_matrix(p: usize, order: usize, g: &MomentMatrix<Rational>) -> Result<CharMatrix> {
    if p > order {
        return Err(Error::domain(format!("block p={p} exceeds N={order}")));
    }
    if g.order() != order {
        return Err(Error::Closure(format!("G has order {} but N={order}", g.order())));
    }
    if !g.is_admissible() {
        return Err(Error::Closure("G has a singular trailing principal block".into()));
    }
    let rows: Vec<(usize, usize)> =
        (0..=order - p).flat_map(|b| (p + b..=order).map(move |m| (b, m))).collect();
    let cols = column_labels(p, order);
    let tables: Vec<Vec<Vec<YTerm>>> = (0..=order - p)
        .map(|b| (p..=order).map(|n| y_coeff(p, b, n)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let entries = rows
        .iter()
        .map(|&(b, m)| {
            cols.iter()
                .map(|&(h, k)| {
                    let n = p + h + k;
                    entry_from_terms(&tables[b][n - p], (h, k), g.get(m, n))
                })
                .collect()
        })
        .collect();
    Ok(CharMatrix { p, order, rows, cols, entries })
}

/// The closure-free subsystem `Y_{q,p+η} = 0`, `q = 0..=η`, on the unknowns
/// with `h + k = η`.
pub fn reduced_matrix(p: usize, eta: usize) -> Result<CharMatrix> {
    let n = p + eta;
    let cols: Vec<(usize, usize)> = eta_labels(eta).collect();
    let one = Rational::one();
    let mut entries = Vec::with_capacity(eta + 1);
    for q in 0..=eta {
        let terms = y_coeff(p, q, n)?;
        entries.push(cols.iter().map(|&c| entry_from_terms(&terms, c, &one)).collect());
    }
    Ok(CharMatrix { p, order: n, rows: (0..=eta).map(|q| (q, n)).collect(), cols, entries })
}
