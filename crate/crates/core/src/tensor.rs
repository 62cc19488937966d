//! Dense exact tensor algebra over 4D Minkowski space, signature (-,+,+,+).
//!
//! This is the brute-force side of every projector identity: tensors are
//! stored with all `4^rank` components and every contraction and
//! symmetrization is carried out component by component. Components are
//! 128-bit rationals with checked arithmetic; an overflow aborts instead of
//! producing a wrong answer.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::combinatorics::{coeff_a, coeff_b, double_factorial, factorial, Rational};
use crate::error::{Error, Result};

/// Dense storage cap: `4^12` components.
pub const MAX_RANK: usize = 12;

/// Exact tensor component.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Component(Ratio<i128>);

impl Component {
    pub fn new(num: i128, den: i128) -> Self {
        Component(Ratio::new(num, den))
    }

    pub fn int(n: i128) -> Self {
        Component(Ratio::from_integer(n))
    }

    pub fn abs(self) -> Self {
        Component(self.0.abs())
    }

    pub fn to_rational(self) -> Rational {
        Rational::new(BigInt::from(*self.0.numer()), BigInt::from(*self.0.denom()))
    }

    pub fn from_rational(q: &Rational) -> Result<Self> {
        match (q.numer().to_i128(), q.denom().to_i128()) {
            (Some(n), Some(d)) => Ok(Component::new(n, d)),
            _ => Err(Error::domain(format!("{q} does not fit a 128-bit tensor component"))),
        }
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

fn overflow() -> ! {
    panic!("exact tensor component overflowed 128-bit rational range")
}

impl Zero for Component {
    fn zero() -> Self {
        Component(Ratio::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Component {
    fn one() -> Self {
        Component(Ratio::one())
    }
}

impl Add for Component {
    type Output = Component;
    fn add(self, rhs: Self) -> Self {
        if rhs.is_zero() {
            return self;
        }
        if self.is_zero() {
            return rhs;
        }
        Component(self.0.checked_add(&rhs.0).unwrap_or_else(|| overflow()))
    }
}

impl AddAssign for Component {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for Component {
    type Output = Component;
    fn sub(self, rhs: Self) -> Self {
        if rhs.is_zero() {
            return self;
        }
        Component(self.0.checked_sub(&rhs.0).unwrap_or_else(|| overflow()))
    }
}

impl Mul for Component {
    type Output = Component;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Component::zero();
        }
        Component(self.0.checked_mul(&rhs.0).unwrap_or_else(|| overflow()))
    }
}

impl Div for Component {
    type Output = Component;
    fn div(self, rhs: Self) -> Self {
        Component(self.0.checked_div(&rhs.0).expect("division by zero or overflow"))
    }
}

impl Neg for Component {
    type Output = Component;
    fn neg(self) -> Self {
        Component(-self.0)
    }
}

impl fmt::Debug for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variance {
    Upper,
    Lower,
}

impl Variance {
    fn flipped(self) -> Self {
        match self {
            Variance::Upper => Variance::Lower,
            Variance::Lower => Variance::Upper,
        }
    }
}

/// Dense rank-r tensor with one variance marker per index.
#[derive(Clone, PartialEq, Eq)]
pub struct MinkTensor {
    variance: Vec<Variance>,
    data: Vec<Component>,
}

impl fmt::Debug for MinkTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MinkTensor")
            .field("variance", &self.variance)
            .field("nonzero", &self.data.iter().filter(|c| !c.is_zero()).count())
            .finish()
    }
}

fn component_count(rank: usize) -> usize {
    1usize << (2 * rank)
}

impl MinkTensor {
    pub fn zeros(variance: Vec<Variance>) -> Self {
        assert!(variance.len() <= MAX_RANK, "rank {} exceeds dense cap {MAX_RANK}", variance.len());
        let len = component_count(variance.len());
        MinkTensor { variance, data: vec![Component::zero(); len] }
    }

    pub fn scalar(value: Component) -> Self {
        MinkTensor { variance: Vec::new(), data: vec![value] }
    }

    pub fn vector(components: [Component; 4], variance: Variance) -> Self {
        MinkTensor { variance: vec![variance], data: components.to_vec() }
    }

    /// Minkowski metric `g` with both indices of the given variance.
    pub fn metric(variance: Variance) -> Self {
        let mut g = MinkTensor::zeros(vec![variance, variance]);
        g.set(&[0, 0], Component::int(-1));
        for i in 1..4 {
            g.set(&[i, i], Component::one());
        }
        g
    }

    /// Kronecker delta `δ_a^b`.
    pub fn delta() -> Self {
        let mut d = MinkTensor::zeros(vec![Variance::Lower, Variance::Upper]);
        for i in 0..4 {
            d.set(&[i, i], Component::one());
        }
        d
    }

    pub fn from_fn(variance: Vec<Variance>, mut f: impl FnMut(&[usize]) -> Component) -> Self {
        let mut t = MinkTensor::zeros(variance);
        let rank = t.rank();
        let mut idx = vec![0usize; rank];
        for lin in 0..t.data.len() {
            decode(lin, &mut idx);
            t.data[lin] = f(&idx);
        }
        t
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn components(&self) -> &[Component] {
        &self.data
    }

    pub fn get(&self, idx: &[usize]) -> Component {
        self.data[encode(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: Component) {
        let lin = encode(idx);
        self.data[lin] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn outer(&self, other: &MinkTensor) -> MinkTensor {
        let mut variance = self.variance.clone();
        variance.extend_from_slice(&other.variance);
        assert!(variance.len() <= MAX_RANK, "rank {} exceeds dense cap {MAX_RANK}", variance.len());
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for &a in &self.data {
            if a.is_zero() {
                data.extend(std::iter::repeat_n(Component::zero(), other.data.len()));
            } else {
                data.extend(other.data.iter().map(|&b| a * b));
            }
        }
        MinkTensor { variance, data }
    }

    /// Outer product of a list of factors, left to right.
    pub fn outer_all<'a>(factors: impl IntoIterator<Item = &'a MinkTensor>) -> MinkTensor {
        factors
            .into_iter()
            .fold(MinkTensor::scalar(Component::one()), |acc, t| acc.outer(t))
    }

    /// Reorders axes: axis `i` of the result is axis `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> MinkTensor {
        let rank = self.rank();
        assert_eq!(order.len(), rank);
        if order.iter().enumerate().all(|(i, &o)| i == o) {
            return self.clone();
        }
        let variance = order.iter().map(|&o| self.variance[o]).collect();
        let mut out = MinkTensor::zeros(variance);
        let strides = strides(rank);
        let mut idx = vec![0usize; rank];
        for lin in 0..out.data.len() {
            decode(lin, &mut idx);
            let src: usize = order.iter().enumerate().map(|(i, &o)| idx[i] * strides[o]).sum();
            out.data[lin] = self.data[src];
        }
        out
    }

    /// Raises or lowers one index with the metric.
    pub fn flip_index(&self, axis: usize) -> MinkTensor {
        let mut out = self.clone();
        out.variance[axis] = out.variance[axis].flipped();
        let mut idx = vec![0usize; self.rank()];
        for lin in 0..out.data.len() {
            decode(lin, &mut idx);
            if idx[axis] == 0 {
                out.data[lin] = -out.data[lin];
            }
        }
        out
    }

    pub fn with_variance(&self, axis: usize, variance: Variance) -> MinkTensor {
        if self.variance[axis] == variance {
            self.clone()
        } else {
            self.flip_index(axis)
        }
    }

    /// Contracts axis `pairs[i].0` of `self` with axis `pairs[i].1` of `other`.
    /// Result axes: remaining axes of `self` in order, then remaining axes of `other`.
    /// Same-variance pairs are contracted through the metric.
    pub fn contract(&self, other: &MinkTensor, pairs: &[(usize, usize)]) -> MinkTensor {
        let mut rhs = other.clone();
        for &(a, b) in pairs {
            if self.variance[a] == rhs.variance[b] {
                rhs = rhs.flip_index(b);
            }
        }
        let self_keep: Vec<usize> = (0..self.rank()).filter(|a| pairs.iter().all(|p| p.0 != *a)).collect();
        let other_keep: Vec<usize> = (0..rhs.rank()).filter(|b| pairs.iter().all(|p| p.1 != *b)).collect();
        let mut lorder = self_keep.clone();
        lorder.extend(pairs.iter().map(|p| p.0));
        let mut rorder: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        rorder.extend(other_keep.iter().copied());
        let left = self.permuted(&lorder);
        let right = rhs.permuted(&rorder);

        let k = component_count(pairs.len());
        let m = component_count(self_keep.len());
        let n = component_count(other_keep.len());
        let mut variance: Vec<Variance> = self_keep.iter().map(|&a| self.variance[a]).collect();
        variance.extend(other_keep.iter().map(|&b| rhs.variance[b]));
        let mut out = MinkTensor::zeros(variance);
        for i in 0..m {
            let row = &left.data[i * k..(i + 1) * k];
            let dst = &mut out.data[i * n..(i + 1) * n];
            for (kk, &a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let src = &right.data[kk * n..(kk + 1) * n];
                for (d, &b) in dst.iter_mut().zip(src) {
                    if !b.is_zero() {
                        *d += a * b;
                    }
                }
            }
        }
        out
    }

    /// Contracts two axes of the same tensor.
    pub fn trace(&self, a: usize, b: usize) -> MinkTensor {
        assert!(a != b);
        let t = if self.variance[a] == self.variance[b] { self.flip_index(b) } else { self.clone() };
        let rank = t.rank();
        let keep: Vec<usize> = (0..rank).filter(|&x| x != a && x != b).collect();
        let variance = keep.iter().map(|&x| t.variance[x]).collect();
        let strides = strides(rank);
        let mut out = MinkTensor::zeros(variance);
        let mut idx = vec![0usize; keep.len()];
        for lin in 0..out.data.len() {
            decode(lin, &mut idx);
            let base: usize = keep.iter().zip(&idx).map(|(&ax, &i)| i * strides[ax]).sum();
            let mut acc = Component::zero();
            for i in 0..4 {
                acc += t.data[base + i * strides[a] + i * strides[b]];
            }
            out.data[lin] = acc;
        }
        out
    }

    /// Average over all permutations of all indices.
    pub fn symmetrized(&self) -> MinkTensor {
        let axes: Vec<usize> = (0..self.rank()).collect();
        self.symmetrized_axes(&axes)
    }

    /// Average over all permutations of the listed axes, which must share variance.
    pub fn symmetrized_axes(&self, axes: &[usize]) -> MinkTensor {
        if axes.len() < 2 {
            return self.clone();
        }
        assert!(
            axes.iter().all(|&a| self.variance[a] == self.variance[axes[0]]),
            "symmetrization over indices of mixed variance"
        );
        let rank = self.rank();
        let strides = strides(rank);
        let mut out = self.clone();
        let mut idx = vec![0usize; rank];
        let mut vals = vec![0usize; axes.len()];
        let mut positions = Vec::new();
        for lin in 0..self.data.len() {
            decode(lin, &mut idx);
            if !axes.windows(2).all(|w| idx[w[0]] <= idx[w[1]]) {
                continue;
            }
            for (v, &a) in vals.iter_mut().zip(axes) {
                *v = idx[a];
            }
            let base = lin - axes.iter().map(|&a| idx[a] * strides[a]).sum::<usize>();
            positions.clear();
            let mut sum = Component::zero();
            loop {
                let pos = base + vals.iter().zip(axes).map(|(&v, &a)| v * strides[a]).sum::<usize>();
                positions.push(pos);
                sum += self.data[pos];
                if !next_permutation(&mut vals) {
                    break;
                }
            }
            let avg = if sum.is_zero() { sum } else { sum / Component::int(positions.len() as i128) };
            for &pos in &positions {
                out.data[pos] = avg;
            }
        }
        out
    }

    pub fn scaled(&self, factor: Component) -> MinkTensor {
        MinkTensor { variance: self.variance.clone(), data: self.data.iter().map(|&c| c * factor).collect() }
    }

    /// Largest absolute component of `self - other`.
    pub fn max_abs_diff(&self, other: &MinkTensor) -> Component {
        assert_eq!(self.variance, other.variance, "comparing tensors of different shape");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .max()
            .unwrap_or_else(Component::zero)
    }

    /// Rank of the tensor viewed as a linear map from its first `split` axes
    /// to the remaining ones, by exact elimination.
    pub fn matrix_rank(&self, split: usize) -> usize {
        let rows = component_count(split);
        let cols = component_count(self.rank() - split);
        let matrix: Vec<Vec<Rational>> = (0..rows)
            .map(|i| self.data[i * cols..(i + 1) * cols].iter().map(|c| c.to_rational()).collect())
            .collect();
        crate::linalg::rank(matrix)
    }
}

impl Add for &MinkTensor {
    type Output = MinkTensor;
    fn add(self, rhs: &MinkTensor) -> MinkTensor {
        assert_eq!(self.variance, rhs.variance, "adding tensors of different shape");
        MinkTensor {
            variance: self.variance.clone(),
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl Sub for &MinkTensor {
    type Output = MinkTensor;
    fn sub(self, rhs: &MinkTensor) -> MinkTensor {
        assert_eq!(self.variance, rhs.variance, "subtracting tensors of different shape");
        MinkTensor {
            variance: self.variance.clone(),
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

fn strides(rank: usize) -> Vec<usize> {
    (0..rank).map(|i| 1usize << (2 * (rank - 1 - i))).collect()
}

fn encode(idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| {
        debug_assert!(i < 4);
        acc * 4 + i
    })
}

fn decode(mut lin: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut().rev() {
        *slot = lin & 3;
        lin >>= 2;
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Minkowski inner product of two contravariant component arrays.
pub fn dot(a: &[Component; 4], b: &[Component; 4]) -> Component {
    -(a[0] * b[0]) + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Frame vectors and projectors: `h = g + u⊗u`, `K = h - v⊗v`.
/// All stored with lower indices.
#[derive(Clone, Debug)]
pub struct FrameProjectors {
    pub u: MinkTensor,
    pub v: MinkTensor,
    pub h: MinkTensor,
    pub k: MinkTensor,
}

impl FrameProjectors {
    /// `u = (1,0,0,0)`, `v = (0,1,0,0)`.
    pub fn canonical() -> Self {
        let (z, o) = (Component::zero(), Component::one());
        build_frame([o, z, z, z], [z, o, z, z]).expect("canonical frame is normalized")
    }

    /// A fixed frame boosted with rapidity `ln 2` along `(3/5, 4/5, 0)` and
    /// with `v` rotated off the boost axis, so that `K` has time-space
    /// components. Denominators stay small enough for rank-12 checks.
    pub fn boosted() -> Self {
        let c = Component::new;
        build_frame(
            [c(5, 4), c(9, 20), c(3, 5), c(0, 1)],
            [c(0, 1), c(4, 5), c(-3, 5), c(0, 1)],
        )
        .expect("boosted frame is normalized")
    }

    /// A random exactly normalized frame: a rational rotation followed by a
    /// rational boost along a random rational direction.
    pub fn random(rng: &mut impl Rng) -> Self {
        let rotation = rational_rotation(rng);
        let direction = rational_rotation(rng)[0];
        let t = Component::new(rng.gen_range(1..=4), 5);
        let one = Component::one();
        let denom = one - t * t;
        let gamma = (one + t * t) / denom;
        let gamma_beta = (t + t) / denom;
        let boost = |x: [Component; 4]| -> [Component; 4] {
            let nx = direction[0] * x[1] + direction[1] * x[2] + direction[2] * x[3];
            let mut out = [gamma * x[0] + gamma_beta * nx, x[1], x[2], x[3]];
            for i in 0..3 {
                out[i + 1] = x[i + 1] + direction[i] * (gamma_beta * x[0] + (gamma - one) * nx);
            }
            out
        };
        let z = Component::zero();
        let u = boost([one, z, z, z]);
        let spatial = rotation[1];
        let v = boost([z, spatial[0], spatial[1], spatial[2]]);
        build_frame(u, v).expect("boosted rational frame is normalized")
    }

    pub fn u_upper(&self) -> MinkTensor {
        self.u.flip_index(0)
    }

    pub fn v_upper(&self) -> MinkTensor {
        self.v.flip_index(0)
    }

    pub fn k_lower(&self) -> MinkTensor {
        self.k.clone()
    }

    /// `K_a^b`.
    pub fn k_mixed(&self) -> MinkTensor {
        self.k.flip_index(1)
    }

    pub fn k_upper(&self) -> MinkTensor {
        self.k.flip_index(0).flip_index(1)
    }
}

/// Rows of a rational rotation matrix from a random integer quaternion.
fn rational_rotation(rng: &mut impl Rng) -> [[Component; 3]; 3] {
    let (a, b, c, d) = loop {
        let q: [i128; 4] = [rng.gen_range(-3..=3), rng.gen_range(-3..=3), rng.gen_range(-3..=3), rng.gen_range(-3..=3)];
        if q.iter().any(|&x| x != 0) {
            break (q[0], q[1], q[2], q[3]);
        }
    };
    let n = a * a + b * b + c * c + d * d;
    let r = |x: i128| Component::new(x, n);
    [
        [r(a * a + b * b - c * c - d * d), r(2 * (b * c - a * d)), r(2 * (b * d + a * c))],
        [r(2 * (b * c + a * d)), r(a * a - b * b + c * c - d * d), r(2 * (c * d - a * b))],
        [r(2 * (b * d - a * c)), r(2 * (c * d + a * b)), r(a * a - b * b - c * c + d * d)],
    ]
}

/// Builds `h` and `K` from contravariant `u`, `v`.
pub fn build_frame(u: [Component; 4], v: [Component; 4]) -> Result<FrameProjectors> {
    if dot(&u, &u) != Component::int(-1) {
        return Err(Error::Frame(format!("u·u = {} (expected -1)", dot(&u, &u))));
    }
    if dot(&v, &v) != Component::one() {
        return Err(Error::Frame(format!("v·v = {} (expected 1)", dot(&v, &v))));
    }
    if !dot(&u, &v).is_zero() {
        return Err(Error::Frame(format!("u·v = {} (expected 0)", dot(&u, &v))));
    }
    let u = MinkTensor::vector(u, Variance::Upper).flip_index(0);
    let v = MinkTensor::vector(v, Variance::Upper).flip_index(0);
    let h = &MinkTensor::metric(Variance::Lower) + &u.outer(&u);
    let k = &h - &v.outer(&v);
    Ok(FrameProjectors { u, v, h, k })
}

fn comp(q: Rational) -> Component {
    Component::from_rational(&q).expect("coefficient fits a tensor component")
}

fn repeat(t: &MinkTensor, n: usize) -> Vec<&MinkTensor> {
    std::iter::repeat_n(t, n).collect()
}

/// The rank-`2p` 2D trace-less projector, axes `[β_1..β_p` lower`, γ_1..γ_p` upper`]`.
pub fn traceless2_projector(frame: &FrameProjectors, p: usize) -> MinkTensor {
    if p == 0 {
        return MinkTensor::scalar(Component::one());
    }
    assert!(2 * p <= MAX_RANK, "projector rank {} exceeds dense cap", 2 * p);
    let (kl, km, ku) = (frame.k_lower(), frame.k_mixed(), frame.k_upper());
    let lower_group: Vec<usize> = (0..p).collect();
    let upper_group: Vec<usize> = (p..2 * p).collect();
    let mut total: Option<MinkTensor> = None;
    for s in 0..=p / 2 {
        let mixed = p - 2 * s;
        let mut factors = repeat(&kl, s);
        factors.extend(repeat(&km, mixed));
        factors.extend(repeat(&ku, s));
        let raw = MinkTensor::outer_all(factors);
        // raw axes: [β pairs (2s)] [β γ]×mixed [γ pairs (2s)]
        let mut order: Vec<usize> = (0..2 * s).collect();
        order.extend((0..mixed).map(|i| 2 * s + 2 * i));
        order.extend((0..2 * s).map(|i| 2 * s + 2 * mixed + i));
        order.extend((0..mixed).map(|i| 2 * s + 2 * i + 1));
        let term = raw
            .permuted(&order)
            .symmetrized_axes(&lower_group)
            .symmetrized_axes(&upper_group)
            .scaled(comp(coeff_a(p, s).expect("s within range")));
        total = Some(match total {
            None => term,
            Some(acc) => &acc + &term,
        });
    }
    total.expect("at least the s = 0 term")
}

/// The projector contracted with `K_{γ1γ2}` vanishes identically.
pub fn verify_theorem1(frame: &FrameProjectors, p: usize) -> bool {
    assert!(p >= 2);
    let proj = traceless2_projector(frame, p);
    proj.contract(&frame.k_lower(), &[(p, 0), (p + 1, 1)]).is_zero()
}

/// `sym_β(K^{⊗r})` minus its expansion in 2D trace-less parts built with the
/// given coefficient function. Axes `[α_1..α_r` lower`, β_1..β_r` upper`]`.
pub fn theorem2_residual(
    frame: &FrameProjectors,
    r: usize,
    coeff: impl Fn(usize, usize) -> Result<Rational>,
) -> Result<MinkTensor> {
    assert!(r >= 1);
    let lower_group: Vec<usize> = (0..r).collect();
    let upper_group: Vec<usize> = (r..2 * r).collect();
    let km = frame.k_mixed();
    let mut order: Vec<usize> = (0..r).map(|i| 2 * i).collect();
    order.extend((0..r).map(|i| 2 * i + 1));
    let lhs = MinkTensor::outer_all(repeat(&km, r)).permuted(&order).symmetrized_axes(&upper_group);

    let (kl, ku) = (frame.k_lower(), frame.k_upper());
    let mut rhs = MinkTensor::zeros(lhs.variance().to_vec());
    for s in 0..=r / 2 {
        let proj = traceless2_projector(frame, r - 2 * s);
        let mut factors = repeat(&kl, s);
        factors.push(&proj);
        factors.extend(repeat(&ku, s));
        let term = MinkTensor::outer_all(factors)
            .symmetrized_axes(&lower_group)
            .symmetrized_axes(&upper_group)
            .scaled(comp(coeff(r, s)?));
        rhs = &rhs + &term;
    }
    Ok(&lhs - &rhs)
}

/// `sym(K^{⊗r})` equals its expansion with [`coeff_b`], exactly.
pub fn verify_theorem2(frame: &FrameProjectors, r: usize) -> bool {
    theorem2_residual(frame, r, coeff_b).map(|t| t.is_zero()).unwrap_or(false)
}

#[derive(Clone, Debug)]
pub struct Theorem3Report {
    pub p: usize,
    pub s: usize,
    pub c: usize,
    pub d: usize,
    pub pass: bool,
    pub max_abs_component_diff: Rational,
    /// Which indices are free on both sides of the compared identity.
    pub index_layout: String,
}

/// Builds both sides of the contraction identity for the projector acting on
/// `sym(K^{⊗s} V^{⊗c} U^{⊗d})` and compares them component by component.
///
/// Left side: the first `p` indices of the fully symmetrized product are
/// contracted with the projector's lower indices. Right side: the projector's
/// lower indices are carried onto `p` of the remaining indices through `K`,
/// the rest is filled with `K^{s-p} V^c U^d`, and all `2s+c+d-p` non-projector
/// indices are symmetrized, times `(2s)!!/(2s-2p)!! · (2s+c+d-p)!/(2s+c+d)!`.
pub fn verify_theorem3(frame: &FrameProjectors, p: usize, s: usize, c: usize, d: usize) -> Result<Theorem3Report> {
    if s < p {
        return Err(Error::domain(format!("theorem 3 needs s >= p, got p={p}, s={s}")));
    }
    let total = 2 * s + c + d;
    if total > MAX_RANK {
        return Err(Error::domain(format!("rank {total} exceeds dense cap")));
    }
    let (ku, vu, uu) = (frame.k_upper(), frame.v_upper(), frame.u_upper());
    let proj = traceless2_projector(frame, p);

    let mut factors = repeat(&ku, s);
    factors.extend(repeat(&vu, c));
    factors.extend(repeat(&uu, d));
    let sym = MinkTensor::outer_all(factors).symmetrized();
    let pairs: Vec<(usize, usize)> = (0..p).map(|i| (i, i)).collect();
    let lhs = proj.contract(&sym, &pairs);

    // P_{β..}^{γ..} K^{β_i α_{p+i}}: K factors laid out as [α_i α_{p+i}] pairs.
    let carried = if p == 0 {
        proj
    } else {
        let ks = MinkTensor::outer_all(repeat(&ku, p));
        let pairs: Vec<(usize, usize)> = (0..p).map(|i| (i, 2 * i)).collect();
        proj.contract(&ks, &pairs)
    };
    let mut factors = vec![&carried];
    factors.extend(repeat(&ku, s - p));
    factors.extend(repeat(&vu, c));
    factors.extend(repeat(&uu, d));
    let underlined: Vec<usize> = (p..total).collect();
    let prefactor = Rational::from_integer(double_factorial(2 * s as i64)?)
        / Rational::from_integer(double_factorial(2 * (s - p) as i64)?)
        * Rational::from_integer(factorial((total - p) as i64)?)
        / Rational::from_integer(factorial(total as i64)?);
    let rhs = MinkTensor::outer_all(factors).symmetrized_axes(&underlined).scaled(comp(prefactor));

    let diff = lhs.max_abs_diff(&rhs);
    Ok(Theorem3Report {
        p,
        s,
        c,
        d,
        pass: diff.is_zero(),
        max_abs_component_diff: diff.to_rational(),
        index_layout: format!(
            "free: γ_1..γ_{p} (projector, upper) then α_{}..α_{total} (upper, symmetrized); contracted: α_1..α_{p}",
            p + 1
        ),
    })
}
