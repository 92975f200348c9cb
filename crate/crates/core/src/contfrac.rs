//! Continued fractions `α = [a₁, a₂, a₃, …]` with exact convergents and the
//! frequency statistics that enter the dimension bounds.
//!
//! A [`ContinuedFraction`] is a finite prefix of partial quotients followed by
//! an optional periodic tail, so quadratic irrationals such as the golden mean
//! `[1, 1, 1, …]` and the constant-quotient frequencies `[n, n, n, …]` are
//! represented exactly. Quotients and convergents are arbitrary-precision
//! integers.
//!
//! The literal syntax used by the CLI is `[a1,a2,…;t1,t2,…]`: everything after
//! the `;` repeats forever. `[;5]` is `[5, 5, 5, …]` and `[7,15,1]` is finite.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::bigutil::{ln_biguint, ratio_to_f64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContFracError {
    #[error("partial quotient a_{index} is zero; every quotient must be >= 1")]
    ZeroQuotient { index: usize },
    #[error("periodic tail must be nonempty")]
    EmptyTail,
    #[error("continued fraction has no quotients")]
    Empty,
    #[error("insufficient quotients: requested {requested}, only {available} available")]
    InsufficientQuotients { requested: usize, available: usize },
    #[error("depth must be at least {min}, got {got}")]
    DepthTooSmall { min: usize, got: usize },
    #[error("cannot parse continued fraction {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("expected a real number in (0, 1), got {0}")]
    OutOfUnitInterval(f64),
    #[error("frequency distance is only defined for irrational (periodic-tail) inputs")]
    Rational,
}

/// Partial quotients `a₁ … a_k` followed by an optional tail repeated forever.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    prefix: Vec<BigUint>,
    tail: Option<Vec<BigUint>>,
}

impl ContinuedFraction {
    pub fn new(prefix: Vec<BigUint>, tail: Option<Vec<BigUint>>) -> Result<Self, ContFracError> {
        if let Some(t) = &tail {
            if t.is_empty() {
                return Err(ContFracError::EmptyTail);
            }
        }
        if prefix.is_empty() && tail.is_none() {
            return Err(ContFracError::Empty);
        }
        let cf = ContinuedFraction { prefix, tail };
        let checked = cf.prefix.len() + cf.period();
        for i in 1..=checked {
            if cf.quotient(i).is_some_and(|a| a.is_zero()) {
                return Err(ContFracError::ZeroQuotient { index: i });
            }
        }
        Ok(cf)
    }

    pub fn finite<I: IntoIterator<Item = u64>>(prefix: I) -> Result<Self, ContFracError> {
        Self::new(prefix.into_iter().map(BigUint::from).collect(), None)
    }

    pub fn periodic<I, J>(prefix: I, tail: J) -> Result<Self, ContFracError>
    where
        I: IntoIterator<Item = u64>,
        J: IntoIterator<Item = u64>,
    {
        Self::new(
            prefix.into_iter().map(BigUint::from).collect(),
            Some(tail.into_iter().map(BigUint::from).collect()),
        )
    }

    /// `α_n = [n, n, n, …]`.
    pub fn constant(n: u64) -> Self {
        Self::periodic([], [n.max(1)]).expect("nonzero constant quotient")
    }

    /// The golden mean `(√5 − 1)/2 = [1, 1, 1, …]`.
    pub fn golden() -> Self {
        Self::constant(1)
    }

    pub fn prefix(&self) -> &[BigUint] {
        &self.prefix
    }

    pub fn tail(&self) -> Option<&[BigUint]> {
        self.tail.as_deref()
    }

    pub fn is_periodic(&self) -> bool {
        self.tail.is_some()
    }

    /// Length of the periodic tail, 0 for finite expansions.
    pub fn period(&self) -> usize {
        self.tail.as_ref().map_or(0, Vec::len)
    }

    /// Number of quotients, `None` when the tail makes it infinite.
    pub fn available(&self) -> Option<usize> {
        match self.tail {
            Some(_) => None,
            None => Some(self.prefix.len()),
        }
    }

    /// The 1-based partial quotient `a_i`, unrolling the tail as needed.
    pub fn quotient(&self, i: usize) -> Option<&BigUint> {
        if i == 0 {
            return None;
        }
        let k = i - 1;
        if k < self.prefix.len() {
            return self.prefix.get(k);
        }
        let tail = self.tail.as_ref()?;
        tail.get((k - self.prefix.len()) % tail.len())
    }

    /// `a_i` as a float (infinite for quotients beyond the `f64` range).
    pub fn quotient_f64(&self, i: usize) -> Option<f64> {
        self.quotient(i)
            .map(|a| a.to_f64().unwrap_or(f64::INFINITY))
    }

    /// The first `n` quotients.
    pub fn quotients(&self, n: usize) -> Result<Vec<BigUint>, ContFracError> {
        self.require(n)?;
        Ok((1..=n).map(|i| self.quotient(i).unwrap().clone()).collect())
    }

    fn require(&self, n: usize) -> Result<(), ContFracError> {
        match self.available() {
            Some(avail) if avail < n => Err(ContFracError::InsufficientQuotients {
                requested: n,
                available: avail,
            }),
            _ => Ok(()),
        }
    }

    /// Convergents `p_k/q_k` for `k = 1…n`.
    pub fn convergents(&self, n: usize) -> Result<Vec<Convergent>, ContFracError> {
        self.require(n)?;
        let mut out = Vec::with_capacity(n);
        let (mut p_prev, mut q_prev) = (BigUint::one(), BigUint::zero()); // p₋₁, q₋₁
        let (mut p, mut q) = (BigUint::zero(), BigUint::one()); // p₀, q₀
        for k in 1..=n {
            let a = self.quotient(k).unwrap();
            let p_next = a * &p + &p_prev;
            let q_next = a * &q + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
            out.push(Convergent {
                p: p.clone(),
                q: q.clone(),
                index: k,
            });
        }
        Ok(out)
    }

    /// The `n`-th convergent alone.
    pub fn convergent(&self, n: usize) -> Result<Convergent, ContFracError> {
        if n == 0 {
            return Ok(Convergent {
                p: BigUint::zero(),
                q: BigUint::one(),
                index: 0,
            });
        }
        Ok(self.convergents(n)?.pop().unwrap())
    }

    /// Value of the continued fraction as an `f64`.
    ///
    /// A periodic tail is summed in closed form: its value `t` is the positive
    /// root of `q_{P−1} t² + (q_P − p_{P−1}) t − p_P = 0`, where `p_k/q_k` are
    /// convergents of one period. The prefix is then folded in backwards.
    pub fn value(&self) -> f64 {
        let Some(tail) = &self.tail else {
            let c = self.convergent(self.prefix.len()).expect("finite prefix");
            return c.to_f64();
        };
        let t = periodic_value(tail);
        self.prefix.iter().rev().fold(t, |x, a| {
            1.0 / (a.to_f64().unwrap_or(f64::INFINITY) + x)
        })
    }

    /// Finite-depth estimates of `β`, `A*` and `G*`, see [`FrequencyStats`].
    pub fn stats(&self, n: usize) -> Result<FrequencyStats, ContFracError> {
        if n < 2 {
            return Err(ContFracError::DepthTooSmall { min: 2, got: n });
        }
        // q_{n} is needed for the last Liouville ratio.
        let convs = self.convergents(n)?;
        let lo = n.div_ceil(2);

        let mut beta: f64 = 0.0;
        for k in lo.max(1)..n {
            let qk = &convs[k - 1].q;
            let q_next = &convs[k].q;
            let denom = qk.to_f64().unwrap_or(f64::INFINITY);
            beta = beta.max(ln_biguint(q_next) / denom);
        }

        // Running sums are sampled at period boundaries when there is a tail,
        // where the periodic structure makes them exact.
        let checkpoints: Vec<usize> = match &self.tail {
            Some(t) => {
                let start = self.prefix.len();
                (1..)
                    .map(|j| start + j * t.len())
                    .take_while(|&k| k <= n)
                    .collect()
            }
            None => (1..=n).collect(),
        };
        let mut window: Vec<usize> = checkpoints.iter().copied().filter(|&k| k >= lo).collect();
        if window.is_empty() {
            window.push(checkpoints.last().copied().unwrap_or(n));
        }

        let mut sum = 0.0;
        let mut log_sum = 0.0;
        let mut a_star = f64::NEG_INFINITY;
        let mut log_g_star = f64::INFINITY;
        let mut w = window.iter().peekable();
        for k in 1..=n {
            let a = self.quotient(k).unwrap();
            sum += a.to_f64().unwrap_or(f64::INFINITY);
            log_sum += ln_biguint(a);
            if w.peek() == Some(&&k) {
                w.next();
                a_star = a_star.max(sum / k as f64);
                log_g_star = log_g_star.min(log_sum / k as f64);
            }
        }
        Ok(FrequencyStats {
            depth: n,
            beta_estimate: beta,
            a_star_estimate: a_star,
            g_star_estimate: log_g_star.exp(),
            log_g_star_estimate: log_g_star,
        })
    }

    /// Membership in the frequency class `a_i ≤ M (i ≤ m)`, `a_i ≥ C (i > m)`.
    ///
    /// Periodic tails are decided exactly; finite expansions are decided over
    /// the available quotients and reported as inexact.
    pub fn theorem2_class(&self, big_m: f64, m: usize, c: f64) -> ClassDecision {
        let horizon = match &self.tail {
            Some(t) => self.prefix.len().max(m) + t.len(),
            None => self.prefix.len(),
        };
        let mut member = true;
        let mut first_violation = None;
        for i in 1..=horizon {
            let a = self.quotient_f64(i).unwrap();
            let ok = if i <= m { a <= big_m } else { a >= c };
            if !ok {
                member = false;
                first_violation = Some(i);
                break;
            }
        }
        if self.tail.is_none() && self.prefix.len() < m {
            // the bounded block itself is not fully inspectable
            member = false;
        }
        ClassDecision {
            member,
            exact: self.tail.is_some(),
            first_violation,
        }
    }
}

/// Value in (0,1) of the purely periodic expansion `[t₁, …, t_P, t₁, …]`.
fn periodic_value(tail: &[BigUint]) -> f64 {
    // convergents of one period
    let (mut p_prev, mut q_prev) = (BigUint::one(), BigUint::zero());
    let (mut p, mut q) = (BigUint::zero(), BigUint::one());
    for a in tail {
        let p_next = a * &p + &p_prev;
        let q_next = a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
    let f = |x: &BigUint| x.to_f64().unwrap_or(f64::INFINITY);
    let (pp, qp, pm, qm) = (f(&p), f(&q), f(&p_prev), f(&q_prev));
    if [pp, qp, pm, qm].iter().all(|v| v.is_finite()) && qp < 1e150 {
        // q_{P−1} t² + b t − p_P = 0, b = q_P − p_{P−1} ≥ 0
        let b = qp - pm;
        let disc = (b * b + 4.0 * qm * pp).sqrt();
        return 2.0 * pp / (b + disc);
    }
    // enormous period: a deep convergent is already exact to f64
    let n = tail.len() * 2;
    let cf = ContinuedFraction::new(Vec::new(), Some(tail.to_vec())).expect("valid tail");
    cf.convergent(n).expect("periodic").to_f64()
}

/// A convergent `p_n/q_n`, `gcd(p_n, q_n) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergent {
    #[serde(with = "biguint_repr")]
    pub p: BigUint,
    #[serde(with = "biguint_repr")]
    pub q: BigUint,
    pub index: usize,
}

impl Convergent {
    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&BigInt::from(self.p.clone()), &BigInt::from(self.q.clone()))
    }

    /// `(p, q)` as machine integers, if they fit.
    pub fn as_u64(&self) -> Option<(u64, u64)> {
        Some((self.p.to_u64()?, self.q.to_u64()?))
    }

    pub fn is_reduced(&self) -> bool {
        self.p.gcd(&self.q).is_one()
    }
}

/// Finite-depth estimates of the frequency statistics.
///
/// * `beta_estimate` is the largest `log q_{k+1} / q_k` over the second half
///   `⌈n/2⌉ ≤ k < n` of the computed convergents. It is evidence about `β`,
///   not the limsup itself.
/// * `a_star_estimate` is the largest running mean `(a₁+…+a_k)/k` over the
///   same window; `g_star_estimate` the smallest running geometric mean. With
///   a periodic tail the running means are sampled at period boundaries, so a
///   purely periodic expansion reports the period mean and period geometric
///   mean exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyStats {
    pub depth: usize,
    pub beta_estimate: f64,
    pub a_star_estimate: f64,
    pub g_star_estimate: f64,
    pub log_g_star_estimate: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClassDecision {
    pub member: bool,
    /// `false` when only a finite prefix could be inspected.
    pub exact: bool,
    pub first_violation: Option<usize>,
}

/// Result of running the Gauss map on a float.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    pub cf: ContinuedFraction,
    /// The residual vanished to working precision: `x` is rational as far as
    /// `f64` can tell and `cf` is its complete expansion.
    pub exact: bool,
    /// Number of leading quotients certified by the propagated error bound.
    pub reliable: usize,
}

/// Expands `x ∈ (0, 1)` into at most `n` partial quotients with the Gauss
/// map `x ↦ 1/x − ⌊1/x⌋`.
///
/// Expansion stops early once the residual drops below 64 ulp; quotients
/// after the first uncertified one are still returned but are not counted in
/// [`Expansion::reliable`].
pub fn expand(x: f64, n: usize) -> Result<Expansion, ContFracError> {
    if !(x > 0.0 && x < 1.0) {
        return Err(ContFracError::OutOfUnitInterval(x));
    }
    let eps = f64::EPSILON;
    let mut quotients = Vec::new();
    let mut r = x;
    let mut err = 0.5 * eps * x;
    let mut reliable = 0;
    let mut certified = true;
    let mut exact = false;
    while quotients.len() < n {
        let inv = 1.0 / r;
        let a = inv.floor();
        // interval of 1/r given |r − r_true| ≤ err
        if certified {
            let lo = 1.0 / (r + err);
            let hi = if r > err { 1.0 / (r - err) } else { f64::INFINITY };
            if lo.floor() == a && hi.floor() == a && (hi - a) < 1.0 {
                reliable += 1;
            } else {
                certified = false;
            }
        }
        quotients.push(BigUint::from(a as u64));
        let next = inv - a;
        if next < 64.0 * eps {
            exact = true;
            break;
        }
        err = err / (r * r) + eps * inv;
        r = next;
    }
    Ok(Expansion {
        cf: ContinuedFraction::new(quotients, None)?,
        exact,
        reliable,
    })
}

/// `d_H(α, α') = 1/(n+1)` where `n` is the first index at which the
/// expansions differ; zero for identical frequencies. Only defined for
/// irrational (periodic-tail) inputs.
pub fn frequency_distance(
    a: &ContinuedFraction,
    b: &ContinuedFraction,
) -> Result<f64, ContFracError> {
    let (Some(ta), Some(tb)) = (a.tail(), b.tail()) else {
        return Err(ContFracError::Rational);
    };
    // Two eventually periodic sequences that agree on this many terms agree
    // everywhere.
    let horizon = a.prefix.len().max(b.prefix.len()) + ta.len().lcm(&tb.len());
    for i in 1..=horizon {
        if a.quotient(i) != b.quotient(i) {
            return Ok(1.0 / (i as f64 + 1.0));
        }
    }
    Ok(0.0)
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[BigUint]| {
            v.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        match &self.tail {
            Some(t) => write!(f, "[{};{}]", join(&self.prefix), join(t)),
            None => write!(f, "[{}]", join(&self.prefix)),
        }
    }
}

impl FromStr for ContinuedFraction {
    type Err = ContFracError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_err = |reason: &str| ContFracError::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| parse_err("expected [a1,a2,...;t1,...]"))?;
        let list = |part: &str| -> Result<Vec<BigUint>, ContFracError> {
            part.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<BigUint>()
                        .map_err(|_| parse_err(&format!("{t:?} is not a positive integer")))
                })
                .collect()
        };
        let (prefix, tail) = match inner.split_once(';') {
            Some((p, t)) => {
                let tail = list(t)?;
                if tail.is_empty() {
                    return Err(ContFracError::EmptyTail);
                }
                (list(p)?, Some(tail))
            }
            None => (list(inner)?, None),
        };
        ContinuedFraction::new(prefix, tail)
    }
}

/// JSON form `{"prefix":[…],"tail":[…]|null}`; quotients beyond `u64` are
/// written as decimal strings.
#[derive(Serialize, Deserialize)]
struct CfRepr {
    prefix: Vec<QuotientRepr>,
    tail: Option<Vec<QuotientRepr>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum QuotientRepr {
    Small(u64),
    Big(String),
}

impl From<&BigUint> for QuotientRepr {
    fn from(a: &BigUint) -> Self {
        match a.to_u64() {
            Some(v) => QuotientRepr::Small(v),
            None => QuotientRepr::Big(a.to_string()),
        }
    }
}

impl QuotientRepr {
    fn into_biguint<E: serde::de::Error>(self) -> Result<BigUint, E> {
        match self {
            QuotientRepr::Small(v) => Ok(BigUint::from(v)),
            QuotientRepr::Big(s) => s.parse().map_err(E::custom),
        }
    }
}

impl Serialize for ContinuedFraction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CfRepr {
            prefix: self.prefix.iter().map(QuotientRepr::from).collect(),
            tail: self
                .tail
                .as_ref()
                .map(|t| t.iter().map(QuotientRepr::from).collect()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ContinuedFraction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = CfRepr::deserialize(deserializer)?;
        let prefix = repr
            .prefix
            .into_iter()
            .map(QuotientRepr::into_biguint)
            .collect::<Result<Vec<_>, D::Error>>()?;
        let tail = repr
            .tail
            .map(|t| {
                t.into_iter()
                    .map(QuotientRepr::into_biguint)
                    .collect::<Result<Vec<_>, D::Error>>()
            })
            .transpose()?;
        ContinuedFraction::new(prefix, tail).map_err(D::Error::custom)
    }
}

pub(crate) mod biguint_repr {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        QuotientRepr::from(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        QuotientRepr::deserialize(d)?.into_biguint()
    }
}
