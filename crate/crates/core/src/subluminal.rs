//! Speeds `λ² = k` seen from an arbitrary time-like direction `U`, in the frame
//! where `ξ = (1,0,0,0)` and `η = (0,1,0,0)`: the roots of
//! `f(λ) = λ²[U0²(1-k)+k] - 2λ U0 U1 (1-k) + U1²(1-k) - k`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::Rational;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::solver::{model_speeds, ExactForm};

#[derive(Clone, Debug, PartialEq)]
pub struct FourVelocity {
    pub u: [Real; 4],
}

impl FourVelocity {
    /// Checks `-U0² + |U|² = -1` within `tol` and `U0 > 0`.
    pub fn new(u: [Real; 4], tol: f64) -> Result<Self> {
        let norm = -(&u[0] * &u[0]) + &u[1] * &u[1] + &u[2] * &u[2] + &u[3] * &u[3];
        if (norm + Real::one()).abs() > Real::from_f64(tol) || !(u[0] > Real::zero()) {
            return Err(Error::domain(format!("U = {u:?} is not a future unit time-like vector")));
        }
        Ok(FourVelocity { u })
    }

    pub fn from_f64(u: [f64; 4], tol: f64) -> Result<Self> {
        FourVelocity::new(u.map(Real::from_f64), tol)
    }

    pub fn rest() -> Self {
        FourVelocity { u: [Real::one(), Real::zero(), Real::zero(), Real::zero()] }
    }

    /// Boost of `(1,0,0,0)` with rapidity `zeta` along the unit vector `dir`.
    pub fn boost(zeta: &Real, dir: [Real; 3]) -> Self {
        let e = zeta.exp();
        let inv = Real::one() / &e;
        let two = Real::from_int(2);
        let cosh = (&e + &inv) / &two;
        let sinh = (&e - &inv) / &two;
        let [x, y, z] = dir;
        FourVelocity { u: [cosh, &sinh * x, &sinh * y, &sinh * z] }
    }

    /// Uniform direction, rapidity uniform in `[0, max_rapidity]`.
    pub fn random(rng: &mut impl Rng, max_rapidity: f64) -> Self {
        let v = loop {
            let v: [f64; 3] = [rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)];
            let r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            if r2 > 1e-6 && r2 <= 1.0 {
                break v;
            }
        };
        let v = v.map(Real::from_f64);
        let norm = (&v[0] * &v[0] + &v[1] * &v[1] + &v[2] * &v[2]).sqrt();
        let dir = [&v[0] / &norm, &v[1] / &norm, &v[2] / &norm];
        FourVelocity::boost(&Real::from_f64(rng.gen_range(0.0..=max_rapidity)), dir)
    }
}

fn check_k(k: &Real) -> Result<()> {
    if k.is_negative() || *k > Real::one() {
        return Err(Error::domain(format!("k = {k} outside [0, 1]")));
    }
    Ok(())
}

/// `(A, B, C)` of `f(λ) = Aλ² + Bλ + C`.
pub fn quadratic_coeffs(k: &Real, u: &FourVelocity) -> Result<(Real, Real, Real)> {
    check_k(k)?;
    let one_minus = Real::one() - k;
    let [u0, u1, ..] = &u.u;
    let a = u0 * u0 * &one_minus + k;
    let b = -(Real::from_int(2) * u0 * u1 * &one_minus);
    let c = u1 * u1 * &one_minus - k;
    Ok((a, b, c))
}

/// Both roots of `f`, ascending. A discriminant below `-tol` or a root
/// outside `[-1-tol, 1+tol]` contradicts the theory and is reported as an error.
pub fn speeds_in_direction(k: &Real, u: &FourVelocity, tol: f64) -> Result<(Real, Real)> {
    let (a, b, c) = quadratic_coeffs(k, u)?;
    let half_b = &b / Real::from_int(2);
    let disc = &half_b * &half_b - &a * &c;
    let tol_r = Real::from_f64(tol);
    if disc < -tol_r.clone() {
        return Err(Error::NonReal(format!("Δ/4 = {disc} for k = {k}")));
    }
    let root = if disc.is_negative() { Real::zero() } else { disc.sqrt() };
    let lo = (-&half_b - &root) / &a;
    let hi = (-&half_b + &root) / &a;
    let bound = Real::one() + tol_r;
    if lo.abs() > bound || hi.abs() > bound {
        return Err(Error::Hyperbolicity(format!("root outside [-1, 1]: ({lo}, {hi}) for k = {k}")));
    }
    Ok((lo, hi))
}

/// `Δ/4 = (B/2)² - AC` against `k + k(1-k)(U2² + U3²)`.
pub fn discriminant_gap(k: &Real, u: &FourVelocity) -> Result<Real> {
    let (a, b, c) = quadratic_coeffs(k, u)?;
    let half_b = &b / Real::from_int(2);
    let direct = &half_b * &half_b - &a * &c;
    let [_, _, u2, u3] = &u.u;
    let closed = k + k * (Real::one() - k) * (u2 * u2 + u3 * u3);
    Ok((direct - closed).abs())
}

pub fn verify_discriminant(k: &Real, u: &FourVelocity, tol: f64) -> bool {
    discriminant_gap(k, u).is_ok_and(|gap| gap <= Real::from_f64(tol))
}

/// `f(1) ≥ 0`, `f(-1) ≥ 0`, `f'(1) > 0`, `f'(-1) < 0` (the first two within `tol`).
pub fn sign_conditions(k: &Real, u: &FourVelocity, tol: f64) -> Result<bool> {
    let (a, b, c) = quadratic_coeffs(k, u)?;
    let f_plus = &a + &b + &c;
    let f_minus = &a - &b + &c;
    let two_a = Real::from_int(2) * &a;
    let df_plus = &two_a + &b;
    let df_minus = -two_a + &b;
    let neg_tol = -Real::from_f64(tol);
    Ok(f_plus >= neg_tol && f_minus >= neg_tol && df_plus > Real::zero() && df_minus < Real::zero())
}

/// Distinct `λ²` values of the model speeds up to order `max_order`.
pub fn model_k_values(max_order: usize) -> Result<Vec<Real>> {
    let mut ks: Vec<Rational> = Vec::new();
    let mut approx: Vec<Real> = Vec::new();
    for order in 0..=max_order {
        for r in model_speeds(order)?.roots {
            match &r.exact {
                ExactForm::Rational(q) => {
                    let k = q * q;
                    if !ks.contains(&k) {
                        ks.push(k);
                    }
                }
                ExactForm::Sqrt { q, .. } => {
                    if !ks.contains(q) {
                        ks.push(q.clone());
                    }
                }
                ExactForm::Interval { .. } => approx.push(&r.approx * &r.approx),
            }
        }
    }
    let mut out: Vec<Real> = ks.iter().map(Real::from_rational).collect();
    for a in approx {
        if !out.iter().any(|k| (k - &a).abs() < Real::from_f64(1e-20)) {
            out.push(a);
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct SublumReport {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_discriminant_gap: f64,
    pub max_abs_root: f64,
    pub failures: Vec<String>,
    /// Grid points where the larger root decreased in `k` (diagnostic only).
    pub monotonicity_flags: usize,
}

impl SublumReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `samples` random `(k, U)`: even samples take `k` from the model speeds of
/// orders up to `max_order`, odd samples draw `k` uniformly from `[0, 1]`.
pub fn verify_sublum(samples: usize, seed: u64, tol: f64, max_rapidity: f64, max_order: usize) -> Result<SublumReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model_ks = model_k_values(max_order)?;
    let mut failures = Vec::new();
    let mut max_gap = Real::zero();
    let mut max_root = Real::zero();
    let mut monotonicity_flags = 0;
    for i in 0..samples {
        let k = if i % 2 == 0 {
            model_ks[rng.gen_range(0..model_ks.len())].clone()
        } else {
            Real::from_f64(rng.gen_range(0.0..=1.0))
        };
        let u = FourVelocity::random(&mut rng, max_rapidity);
        let gap = discriminant_gap(&k, &u)?;
        if gap > Real::from_f64(tol) {
            failures.push(format!("sample {i}: discriminant identity off by {gap}"));
        }
        max_gap = max_gap.max(gap);
        match speeds_in_direction(&k, &u, tol) {
            Ok((lo, hi)) => max_root = max_root.max(lo.abs()).max(hi.abs()),
            Err(e) => failures.push(format!("sample {i}: {e}")),
        }
        if !sign_conditions(&k, &u, tol)? {
            failures.push(format!("sample {i}: sign conditions violated at k = {k}"));
        }
        if i % 50 == 0 {
            monotonicity_flags += monotonicity_violations(&u, 20, tol)?;
        }
    }
    Ok(SublumReport {
        samples,
        seed,
        tol,
        max_discriminant_gap: max_gap.to_f64(),
        max_abs_root: max_root.to_f64(),
        failures,
        monotonicity_flags,
    })
}

/// Number of steps on a uniform `k` grid where the larger root decreases.
pub fn monotonicity_violations(u: &FourVelocity, steps: usize, tol: f64) -> Result<usize> {
    let mut prev: Option<Real> = None;
    let mut flags = 0;
    for i in 0..=steps {
        let k = Real::from_int(i as i64) / Real::from_int(steps as i64);
        let (_, hi) = speeds_in_direction(&k, u, tol)?;
        if let Some(p) = &prev {
            if &hi + Real::from_f64(tol) < *p {
                flags += 1;
            }
        }
        prev = Some(hi);
    }
    Ok(flags)
}
