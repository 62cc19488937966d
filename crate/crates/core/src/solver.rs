//! Characteristic polynomials, exact real-root isolation and speed sets.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::charsys::{block_multiplicity, full_matrix, reduced_matrix, CharMatrix, MomentMatrix};
use crate::combinatorics::{int, rational, Rational};
use crate::error::{Error, Result};
use crate::poly::{count_roots, root_bound, RationalPoly};
use crate::real::Real;

pub const DEFAULT_TOL: f64 = 1e-12;

/// `det M` with `φ := phi`, as a polynomial in `λ`, by fraction-free
/// elimination over `Q[λ]`.
pub fn char_poly(m: &CharMatrix, phi: &Rational) -> RationalPoly {
    let mut a: Vec<Vec<RationalPoly>> = m
        .entries
        .iter()
        .map(|row| row.iter().map(|e| RationalPoly::linear(&e.phi * phi, e.mu.clone())).collect())
        .collect();
    let n = a.len();
    if n == 0 {
        return RationalPoly::one();
    }
    let mut negate = false;
    let mut prev = RationalPoly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(sel) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return RationalPoly::zero();
            };
            a.swap(k, sel);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.exact_div(&prev).expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// How a root is known exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactForm {
    Rational(Rational),
    /// `sign · √q` with `q > 0` not a rational square.
    Sqrt { sign: i8, q: Rational },
    /// The unique root of `poly` in the open interval `(lo, hi)`.
    Interval { lo: Rational, hi: Rational, poly: RationalPoly },
}

impl ExactForm {
    pub fn kind(&self) -> &'static str {
        match self {
            ExactForm::Rational(_) => "rational",
            ExactForm::Sqrt { .. } => "sqrt",
            ExactForm::Interval { .. } => "interval",
        }
    }
}

impl fmt::Display for ExactForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactForm::Rational(q) => write!(f, "{q}"),
            ExactForm::Sqrt { sign, q } => write!(f, "{}√({q})", if *sign < 0 { "-" } else { "" }),
            ExactForm::Interval { lo, hi, .. } => write!(f, "in ({}, {})", to_f64(lo), to_f64(hi)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Root {
    pub approx: Real,
    pub multiplicity: usize,
    pub exact: ExactForm,
}

impl Root {
    pub fn rational(q: Rational, multiplicity: usize) -> Self {
        Root { approx: Real::from_rational(&q), multiplicity, exact: ExactForm::Rational(q) }
    }

    pub fn sqrt(sign: i8, q: Rational, multiplicity: usize) -> Self {
        let r = Real::from_rational(&q).sqrt();
        let approx = if sign < 0 { -r } else { r };
        Root { approx, multiplicity, exact: ExactForm::Sqrt { sign, q } }
    }

    /// Exact equality of the represented real numbers.
    pub fn same_value(&self, other: &Root) -> bool {
        use ExactForm::*;
        match (&self.exact, &other.exact) {
            (Rational(a), Rational(b)) => a == b,
            (Sqrt { sign: s1, q: q1 }, Sqrt { sign: s2, q: q2 }) => s1 == s2 && q1 == q2,
            (Interval { lo: l1, hi: h1, poly: p1 }, Interval { lo: l2, hi: h2, poly: p2 }) => {
                let lo = l1.max(l2);
                let hi = h1.min(h2);
                if lo >= hi {
                    return false;
                }
                let g = p1.gcd(p2);
                g.degree().unwrap_or(0) > 0 && count_roots(&g.sturm_chain(), lo, hi) > 0
            }
            // Interval roots are neither rational nor square roots of rationals.
            _ => false,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.approx.to_f64()
    }
}

fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn tol_rational(tol: f64) -> Rational {
    Rational::from_float(tol).unwrap_or_else(|| rational(1, 1_000_000_000_000i64))
}

/// Integer leading coefficient of the primitive form of `g`.
fn primitive_leading(g: &RationalPoly) -> BigInt {
    g.primitive_part().leading().to_integer().abs()
}

fn sign_at(g: &RationalPoly, x: &Rational) -> i8 {
    let v = g.eval(x);
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

enum Refined {
    Exact(Rational),
    Bracket(Rational, Rational),
}

/// Bisects the bracket of a simple root until `done(lo, hi)`.
fn refine(g: &RationalPoly, mut lo: Rational, mut hi: Rational, done: impl Fn(&Rational, &Rational) -> bool) -> Refined {
    let s_lo = sign_at(g, &lo);
    while !done(&lo, &hi) {
        let mid = (&lo + &hi) / int(2);
        match sign_at(g, &mid) {
            0 => return Refined::Exact(mid),
            s if s == s_lo => lo = mid,
            _ => hi = mid,
        }
    }
    Refined::Bracket(lo, hi)
}

/// Open intervals each holding exactly one root of the square-free `g`;
/// endpoints are never roots.
fn isolate(g: &RationalPoly) -> Vec<(Rational, Rational)> {
    let chain = g.sturm_chain();
    let bound = root_bound(g);
    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((lo, hi)) = stack.pop() {
        match count_roots(&chain, &lo, &hi) {
            0 => {}
            1 => out.push((lo, hi)),
            _ => {
                let width = &hi - &lo;
                let mut t = 1u32;
                let mut mid = &lo + &width / int(2);
                while g.eval(&mid).is_zero() {
                    t += 1;
                    mid = &lo + &width * (rational(1, 2) + Rational::new(BigInt::one(), BigInt::one() << (t + 1)));
                }
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
    out
}

/// Lattice points `j/lc` inside `[lo, hi]`.
fn lattice_points(lo: &Rational, hi: &Rational, lc: &BigInt) -> Vec<Rational> {
    let lcq = Rational::from_integer(lc.clone());
    let first = (lo * &lcq).ceil().to_integer();
    let last = (hi * &lcq).floor().to_integer();
    let mut out = Vec::new();
    let mut j = first;
    while j <= last {
        out.push(Rational::new(j.clone(), lc.clone()));
        j += 1;
    }
    out
}

fn is_rational_square(q: &Rational) -> bool {
    let is_sq = |n: &BigInt| {
        let r = n.sqrt();
        &r * &r == *n
    };
    !q.is_negative() && is_sq(q.numer()) && is_sq(q.denom())
}

/// Classifies the single root of the square-free `g` inside `(lo, hi)`.
fn classify(g: &RationalPoly, lo: Rational, hi: Rational, tol: &Rational) -> ExactForm {
    let lc = primitive_leading(g);
    let lcq = Rational::from_integer(lc.clone());
    let half = rational(1, 2);
    let (lo, hi) = match refine(g, lo, hi, |l, h| (h - l) * &lcq < half) {
        Refined::Exact(q) => return ExactForm::Rational(q),
        Refined::Bracket(l, h) => (l, h),
    };
    for cand in lattice_points(&lo, &hi, &lc) {
        if g.eval(&cand).is_zero() {
            return ExactForm::Rational(cand);
        }
    }
    // A factor d·x² - k of the primitive g has d | lc, so x² is on the same lattice.
    let sq_bracket = |l: &Rational, h: &Rational| -> Option<(Rational, Rational)> {
        if !l.is_negative() {
            Some((l * l, h * h))
        } else if !h.is_positive() {
            Some((h * h, l * l))
        } else {
            None
        }
    };
    let (lo, hi) = match refine(g, lo, hi, |l, h| {
        sq_bracket(l, h).is_some_and(|(a, b)| (b - a) * &lcq < half) && (h - l) <= *tol
    }) {
        Refined::Exact(q) => return ExactForm::Rational(q),
        Refined::Bracket(l, h) => (l, h),
    };
    let (sq_lo, sq_hi) = sq_bracket(&lo, &hi).expect("bracket excludes zero");
    let sign: i8 = if lo.is_negative() { -1 } else { 1 };
    for q in lattice_points(&sq_lo, &sq_hi, &lc) {
        if !q.is_positive() || is_rational_square(&q) {
            continue;
        }
        let factor = RationalPoly::new(vec![-q.clone(), Rational::zero(), Rational::one()]);
        if g.exact_div(&factor).is_some() {
            return ExactForm::Sqrt { sign, q };
        }
    }
    ExactForm::Interval { lo, hi, poly: g.monic() }
}

/// All real roots of `f` with multiplicities, ascending. Non-real roots are
/// not reported (compare the multiplicity total with the degree to detect them).
pub fn real_roots(f: &RationalPoly, tol: f64) -> Result<Vec<Root>> {
    if f.is_zero() {
        return Err(Error::Degenerate("the zero polynomial has no isolated roots".into()));
    }
    let tol = tol_rational(tol);
    let mut roots = Vec::new();
    for (g, mult) in f.square_free() {
        for (lo, hi) in isolate(&g) {
            let exact = classify(&g, lo, hi, &tol);
            let root = match exact {
                ExactForm::Rational(q) => Root::rational(q, mult),
                ExactForm::Sqrt { sign, q } => Root::sqrt(sign, q, mult),
                ExactForm::Interval { lo, hi, poly } => {
                    let approx = Real::from_rational(&((&lo + &hi) / int(2)));
                    Root { approx, multiplicity: mult, exact: ExactForm::Interval { lo, hi, poly } }
                }
            };
            roots.push(root);
        }
    }
    roots.sort_by(|a, b| a.approx.cmp(&b.approx));
    Ok(roots)
}

/// Multiset of characteristic speeds.
#[derive(Clone, Debug)]
pub struct SpeedSet {
    /// Block rank, or `None` for the whole model.
    pub p: Option<usize>,
    pub roots: Vec<Root>,
}

impl SpeedSet {
    pub fn new(p: Option<usize>) -> Self {
        SpeedSet { p, roots: Vec::new() }
    }

    pub fn total(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn insert(&mut self, root: Root, weight: usize) {
        let add = root.multiplicity * weight;
        if let Some(existing) = self.roots.iter_mut().find(|r| r.same_value(&root)) {
            existing.multiplicity += add;
        } else {
            self.roots.push(Root { multiplicity: add, ..root });
            self.roots.sort_by(|a, b| a.approx.cmp(&b.approx));
        }
    }

    pub fn merge(&mut self, other: &SpeedSet, weight: usize) {
        for r in &other.roots {
            self.insert(r.clone(), weight);
        }
    }

    /// Every root repeated by multiplicity, ascending.
    pub fn expanded(&self) -> Vec<f64> {
        self.roots.iter().flat_map(|r| std::iter::repeat_n(r.to_f64(), r.multiplicity)).collect()
    }

    pub fn multiplicity_of(&self, root: &Root) -> usize {
        self.roots.iter().find(|r| r.same_value(root)).map_or(0, |r| r.multiplicity)
    }

    /// Largest `|λ|` exceeding `1 + tol`, if any.
    pub fn superluminal(&self, tol: f64) -> Option<&Root> {
        let bound = Real::one() + Real::from_f64(tol);
        self.roots.iter().find(|r| r.approx.abs() > bound)
    }

    /// Multiset symmetric under `λ → -λ` (a zero root may have any multiplicity).
    pub fn is_symmetric(&self) -> bool {
        self.roots.iter().all(|r| {
            let mirror = match &r.exact {
                ExactForm::Rational(q) if q.is_zero() => return true,
                ExactForm::Rational(q) => Root::rational(-q.clone(), 0),
                ExactForm::Sqrt { sign, q } => Root::sqrt(-sign, q.clone(), 0),
                ExactForm::Interval { lo, hi, poly } => {
                    let coeffs = poly.coeffs().iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() });
                    Root {
                        approx: -r.approx.clone(),
                        multiplicity: 0,
                        exact: ExactForm::Interval { lo: -hi.clone(), hi: -lo.clone(), poly: RationalPoly::new(coeffs.collect()) },
                    }
                }
            };
            self.multiplicity_of(&mirror) == r.multiplicity
        })
    }
}

/// `det` of each reduced subsystem `η = 0..=N-p` at `φ = 1`.
pub fn reduced_polynomials(p: usize, order: usize) -> Result<Vec<RationalPoly>> {
    if p > order {
        return Err(Error::domain(format!("block p={p} exceeds N={order}")));
    }
    (0..=order - p).map(|eta| Ok(char_poly(&reduced_matrix(p, eta)?, &Rational::one()))).collect()
}

/// Speeds of block `p`: roots of all reduced subsystems.
pub fn block_speeds(p: usize, order: usize) -> Result<SpeedSet> {
    let mut set = SpeedSet::new(Some(p));
    for (eta, f) in reduced_polynomials(p, order)?.into_iter().enumerate() {
        let roots = real_roots(&f, DEFAULT_TOL)?;
        let found: usize = roots.iter().map(|r| r.multiplicity).sum();
        if found != eta + 1 {
            return Err(Error::NonReal(format!("block p={p}, η={eta}: {found} real roots of {} expected", eta + 1)));
        }
        for r in roots {
            set.insert(r, 1);
        }
    }
    Ok(set)
}

/// All speeds of the order-`N` model, each block weighted by its multiplicity.
pub fn model_speeds(order: usize) -> Result<SpeedSet> {
    let mut set = SpeedSet::new(None);
    for p in 0..=order {
        set.merge(&block_speeds(p, order)?, block_multiplicity(p));
    }
    Ok(set)
}

#[derive(Clone, Debug)]
pub struct BlockComparison {
    pub p: usize,
    /// Primitive part of the full block determinant.
    pub full: RationalPoly,
    /// Primitive part of the product of the reduced determinants.
    pub reduced: RationalPoly,
    pub equal: bool,
    pub degrees_match: bool,
}

/// Compares every block of the closure `g` with its reduced factorization.
pub fn compare_closure(order: usize, g: &MomentMatrix<Rational>) -> Result<Vec<BlockComparison>> {
    (0..=order)
        .map(|p| {
            let reduced_parts = reduced_polynomials(p, order)?;
            let reduced_degree: usize = reduced_parts.iter().map(|f| f.degree().unwrap_or(0)).sum();
            let product = reduced_parts.iter().fold(RationalPoly::one(), |acc, f| &acc * f);
            let full_raw = char_poly(&full_matrix(p, order, g)?, &Rational::one());
            let full = full_raw.primitive_part();
            let reduced = product.primitive_part();
            Ok(BlockComparison {
                p,
                equal: full == reduced,
                degrees_match: full_raw.degree() == Some(reduced_degree),
                full,
                reduced,
            })
        })
        .collect()
}

pub const MAX_RESAMPLES: usize = 100;

/// Symmetric `G` with entries `1 + k/1000 ∈ [1, 10]`, redrawn until every
/// trailing principal block is nonsingular. Returns the matrix and the number
/// of rejected draws.
pub fn random_admissible(order: usize, rng: &mut impl Rng) -> Result<(MomentMatrix<Rational>, usize)> {
    for rejected in 0..=MAX_RESAMPLES {
        let size = order + 1;
        let mut g = vec![vec![Rational::zero(); size]; size];
        for i in 0..size {
            for j in i..size {
                let v = Rational::one() + rational(rng.gen_range(0..=9000i64), 1000);
                g[i][j] = v.clone();
                g[j][i] = v;
            }
        }
        let g = MomentMatrix::new(g)?;
        if g.is_admissible() {
            return Ok((g, rejected));
        }
    }
    Err(Error::Sampling(format!("no admissible G of order {order} after {MAX_RESAMPLES} resamples")))
}

#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub resamples: usize,
    pub blocks: Vec<BlockComparison>,
}

impl TrialOutcome {
    pub fn pass(&self) -> bool {
        self.blocks.iter().all(|b| b.equal && b.degrees_match)
    }
}

#[derive(Clone, Debug)]
pub struct IndependenceReport {
    pub order: usize,
    pub seed: u64,
    pub trials: Vec<TrialOutcome>,
}

impl IndependenceReport {
    pub fn pass(&self) -> bool {
        self.trials.iter().all(TrialOutcome::pass)
    }
}

/// Closure independence over `trials` random admissible closures; trial `t`
/// draws from a generator seeded with `seed + t`.
pub fn verify_independence(order: usize, trials: usize, seed: u64) -> Result<IndependenceReport> {
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let mut out = Vec::with_capacity(trials);
    for trial in 0..trials {
        let trial_seed = seed.wrapping_add(trial as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let (g, resamples) = random_admissible(order, &mut rng)?;
        out.push(TrialOutcome { trial, seed: trial_seed, resamples, blocks: compare_closure(order, &g)? });
    }
    Ok(IndependenceReport { order, seed, trials: out })
}
