//! The parameterized group bundles `T` and `S` over `X = {0} u {1/n}`, the fiberwise
//! isomorphism `phi: T -> S` that is not a homeomorphism, sequence certificates for
//! the relevant limits, and finite Pontryagin double duality.

use std::f64::consts::TAU;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::groups::GroupTable;
use crate::induction::characters;
use crate::linalg::{c, C64};

/// Representative of `v` in `{-k..k}`, the balanced residues mod `2k+1`.
pub fn balanced(v: i64, k: i64) -> i64 {
    (v + k).rem_euclid(2 * k + 1) - k
}

/// `x_n = 1/n`, `x_0 = 0`.
pub fn base_point(n: u32) -> f64 {
    if n == 0 { 0.0 } else { 1.0 / n as f64 }
}

fn same_fiber(a: u32, b: u32) -> Result<u32> {
    if a == b { Ok(a) } else { Err(Error::FiberMismatch(a, b)) }
}

/// `(m, x_n)` with `m` in `Z_{6n+3}` (balanced) for `n > 0` and `m` in `Z` for `n = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TElement {
    pub m: i64,
    pub n: u32,
}

impl TElement {
    pub fn new(m: i64, n: u32) -> Result<Self> {
        if n > 0 && m.abs() > 3 * n as i64 + 1 {
            return Err(Error::InvalidParameter(format!("{m} is not a balanced residue mod {}", 6 * n + 3)));
        }
        Ok(TElement { m, n })
    }

    pub fn zero(n: u32) -> Self {
        TElement { m: 0, n }
    }

    /// The whole fiber for `n > 0`; for `n = 0` the window `[-w, w]`.
    pub fn fiber(n: u32, w: i64) -> Vec<Self> {
        let k = if n == 0 { w } else { 3 * n as i64 + 1 };
        (-k..=k).map(|m| TElement { m, n }).collect()
    }

    /// Coordinates in `Z x X`.
    pub fn ambient(&self) -> [f64; 2] {
        [self.m as f64, base_point(self.n)]
    }
}

impl fmt::Display for TElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, x_{})", self.m, self.n)
    }
}

/// `(a^n(d), r, x_n)` with `d` in `{-1, 0, 1}` (`d = 0` at `n = 0`) and `r` in `Z_{2n+1}` balanced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SElement {
    pub d: i64,
    pub r: i64,
    pub n: u32,
}

impl SElement {
    pub fn new(d: i64, r: i64, n: u32) -> Result<Self> {
        let ok = if n == 0 { d == 0 } else { d.abs() <= 1 && r.abs() <= n as i64 };
        if !ok {
            return Err(Error::InvalidParameter(format!("({d}, {r}) is not in S_{n}")));
        }
        Ok(SElement { d, r, n })
    }

    pub fn zero(n: u32) -> Self {
        SElement { d: 0, r: 0, n }
    }

    /// `a^n(d) = d/n`, and `0` at `n = 0`.
    pub fn a(&self) -> f64 {
        if self.n == 0 { 0.0 } else { self.d as f64 / self.n as f64 }
    }

    /// Coordinates in `R x Z x X`.
    pub fn ambient(&self) -> [f64; 3] {
        [self.a(), self.r as f64, base_point(self.n)]
    }
}

impl fmt::Display for SElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.n, self.d) {
            (_, 0) => write!(f, "(0, {}, x_{})", self.r, self.n),
            (n, d) if d > 0 => write!(f, "(1/{n}, {}, x_{n})", self.r),
            (n, _) => write!(f, "(-1/{n}, {}, x_{n})", self.r),
        }
    }
}

pub fn t_multiply(x: TElement, y: TElement) -> Result<TElement> {
    let n = same_fiber(x.n, y.n)?;
    if n == 0 {
        let m = x.m.checked_add(y.m).ok_or_else(|| Error::InvalidParameter("integer overflow in T_0".into()))?;
        return Ok(TElement { m, n });
    }
    Ok(TElement { m: balanced(x.m + y.m, 3 * n as i64 + 1), n })
}

pub fn t_invert(x: TElement) -> TElement {
    TElement { m: -x.m, n: x.n }
}

pub fn s_multiply(x: SElement, y: SElement) -> Result<SElement> {
    let n = same_fiber(x.n, y.n)?;
    if n == 0 {
        let r = x.r.checked_add(y.r).ok_or_else(|| Error::InvalidParameter("integer overflow in S_0".into()))?;
        return Ok(SElement { d: 0, r, n });
    }
    let (k, w) = (n as i64, 2 * n as i64 + 1);
    let s = x.r + y.r;
    let (carry, r) = if s > k {
        (1, s - w)
    } else if s < -k {
        (-1, s + w)
    } else {
        (0, s)
    };
    Ok(SElement { d: balanced(x.d + y.d + carry, 1), r, n })
}

pub fn s_invert(x: SElement) -> SElement {
    SElement { d: -x.d, r: -x.r, n: x.n }
}

/// Balanced division `m = d(2n+1) + r`, `|r| <= n`; `(0, m, x_0)` at `n = 0`.
pub fn phi(x: TElement) -> SElement {
    if x.n == 0 {
        return SElement { d: 0, r: x.m, n: 0 };
    }
    let k = x.n as i64;
    let r = balanced(x.m, k);
    SElement { d: (x.m - r) / (2 * k + 1), r, n: x.n }
}

pub fn phi_inverse(y: SElement) -> TElement {
    TElement { m: y.d * (2 * y.n as i64 + 1) + y.r, n: y.n }
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiFiberCheck {
    pub n: u32,
    pub elements: usize,
    pub bijective: bool,
    pub multiplicative_failures: usize,
    /// First failing pair, if any.
    pub witness: Option<(TElement, TElement)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiIsoReport {
    pub up_to: u32,
    pub fibers: Vec<PhiFiberCheck>,
    pub passed: bool,
}

fn check_phi_fiber(n: u32, window: i64) -> PhiFiberCheck {
    let fiber = TElement::fiber(n, window);
    let images: Vec<SElement> = fiber.iter().map(|&x| phi(x)).collect();
    let mut seen = std::collections::HashSet::new();
    let valid = images.iter().all(|y| SElement::new(y.d, y.r, y.n).is_ok() && seen.insert(*y));
    // for n > 0 the fiber sizes agree, so injective = bijective; at n = 0 the window maps
    // onto the matching window of S_0
    let bijective = valid && fiber.iter().zip(&images).all(|(&x, &y)| phi_inverse(y) == x);
    let mut failures = 0;
    let mut witness = None;
    for (i, &x) in fiber.iter().enumerate() {
        for &y in &fiber {
            let lhs = t_multiply(x, y).map(phi);
            let rhs = s_multiply(images[i], phi(y));
            if lhs.ok() != rhs.ok() {
                failures += 1;
                witness.get_or_insert((x, y));
            }
        }
    }
    PhiFiberCheck { n, elements: fiber.len(), bijective, multiplicative_failures: failures, witness }
}

/// Exhaustive on `T_1..T_N`; on `T_0` over the window `[-3N-1, 3N+1]`.
pub fn verify_phi_iso_up_to(up_to: u32, exec: Exec) -> Result<PhiIsoReport> {
    if up_to == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let window = 3 * up_to as i64 + 1;
    let fibers = exec.map_range(0..up_to as usize + 1, |n| check_phi_fiber(n as u32, window));
    let passed = fibers.iter().all(|f| f.bijective && f.multiplicative_failures == 0);
    Ok(PhiIsoReport { up_to, fibers, passed })
}

/// Group axioms of `T_n` and `S_n` checked exhaustively (`n > 0`): closure, unit, inverses,
/// commutativity and associativity. Returns a description of the first failure.
pub fn fiber_group_axioms(n: u32) -> std::result::Result<(), String> {
    if n == 0 {
        return Err("T_0 and S_0 are infinite".into());
    }
    let ts = TElement::fiber(n, 0);
    let k = n as i64;
    let ss: Vec<SElement> = (-1..=1).flat_map(|d| (-k..=k).map(move |r| SElement { d, r, n })).collect();
    fn axioms<E: Copy + PartialEq + fmt::Display>(
        elems: &[E],
        zero: E,
        mul: impl Fn(E, E) -> E,
        inv: impl Fn(E) -> E,
        valid: impl Fn(E) -> bool,
    ) -> std::result::Result<(), String> {
        for &a in elems {
            if mul(a, zero) != a || mul(zero, a) != a {
                return Err(format!("unit fails at {a}"));
            }
            if mul(a, inv(a)) != zero {
                return Err(format!("inverse fails at {a}"));
            }
            for &b in elems {
                let ab = mul(a, b);
                if !valid(ab) {
                    return Err(format!("{a} + {b} leaves the fiber"));
                }
                if ab != mul(b, a) {
                    return Err(format!("{a} and {b} do not commute"));
                }
                for &c in elems {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        return Err(format!("associativity fails at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        Ok(())
    }
    let t_mul = |a, b| t_multiply(a, b).expect("same fiber");
    let s_mul = |a, b| s_multiply(a, b).expect("same fiber");
    axioms(&ts, TElement::zero(n), t_mul, t_invert, |x: TElement| TElement::new(x.m, x.n).is_ok())
        .map_err(|e| format!("T_{n}: {e}"))?;
    axioms(&ss, SElement::zero(n), s_mul, s_invert, |x: SElement| SElement::new(x.d, x.r, x.n).is_ok())
        .map_err(|e| format!("S_{n}: {e}"))
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum CertificateVerdict {
    CertifiedConvergent { epsilon: f64, truncation: usize },
    CertifiedEscaping { lower_bound: f64 },
    Inconclusive,
}

/// A claim about the sampled indices `1..=N` only.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceCertificate {
    pub truncation: usize,
    /// `(n, distance to the candidate limit)`.
    pub distances: Vec<(usize, f64)>,
    pub verdict: CertificateVerdict,
}

impl ConvergenceCertificate {
    fn tail(distances: &[(usize, f64)], truncation: usize) -> impl Iterator<Item = f64> + '_ {
        let start = truncation.div_ceil(2);
        distances.iter().filter(move |(n, _)| *n >= start).map(|(_, d)| *d)
    }

    /// Convergent when every distance on the tail `n >= N/2` is at most `eps`, escaping when
    /// every tail distance exceeds `eps` (bounded below by the tail minimum).
    pub fn against_limit(distances: Vec<(usize, f64)>, eps: f64) -> Self {
        let truncation = distances.iter().map(|(n, _)| *n).max().unwrap_or(0);
        let max = Self::tail(&distances, truncation).fold(0.0f64, f64::max);
        let min = Self::tail(&distances, truncation).fold(f64::INFINITY, f64::min);
        let verdict = if distances.is_empty() {
            CertificateVerdict::Inconclusive
        } else if max <= eps {
            CertificateVerdict::CertifiedConvergent { epsilon: eps, truncation }
        } else if min > eps {
            CertificateVerdict::CertifiedEscaping { lower_bound: min }
        } else {
            CertificateVerdict::Inconclusive
        };
        ConvergenceCertificate { truncation, distances, verdict }
    }

    /// Escaping when all sampled points are pairwise more than `eps` apart, the bound being
    /// the least pairwise distance; such a sequence of distinct points has no limit.
    pub fn uniformly_discrete(points: &[(usize, Vec<f64>)], limit: &[f64], eps: f64) -> Self {
        let truncation = points.iter().map(|(n, _)| *n).max().unwrap_or(0);
        let distances = points.iter().map(|(n, p)| (*n, dist(p, limit))).collect();
        let mut gap = f64::INFINITY;
        for (i, (_, p)) in points.iter().enumerate() {
            for (_, q) in &points[i + 1..] {
                gap = gap.min(dist(p, q));
            }
        }
        let verdict = if points.len() >= 2 && gap > eps {
            CertificateVerdict::CertifiedEscaping { lower_bound: gap }
        } else {
            CertificateVerdict::Inconclusive
        };
        ConvergenceCertificate { truncation, distances, verdict }
    }

    pub fn is_convergent(&self) -> bool {
        matches!(self.verdict, CertificateVerdict::CertifiedConvergent { .. })
    }

    pub fn is_escaping(&self) -> bool {
        matches!(self.verdict, CertificateVerdict::CertifiedEscaping { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DemoRow {
    pub n: usize,
    pub element: String,
    pub image: String,
    pub distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleDemo {
    pub rows: Vec<DemoRow>,
    /// `phi(s_n) -> (0, 0, x_0)`.
    pub image: ConvergenceCertificate,
    /// `s_n` has no limit in `T`.
    pub preimage: ConvergenceCertificate,
    pub epsilon: f64,
}

/// `s_n = (2n+1, x_n)` for `n = 1..=N`: `phi(s_n) = (1/n, 0, x_n)` converges to the unit
/// over `x_0` while `s_n` escapes. The tolerance is `eps_N = 2 / ceil(N/2)`.
pub fn counterexample_demo(truncation: usize) -> Result<CounterexampleDemo> {
    if truncation < 2 {
        return Err(Error::InvalidParameter("N must be at least 2".into()));
    }
    let eps = 2.0 / truncation.div_ceil(2) as f64;
    let limit_s = SElement::zero(0).ambient();
    let limit_t = phi_inverse(SElement::zero(0)).ambient();
    let mut rows = Vec::with_capacity(truncation);
    let mut image_d = Vec::with_capacity(truncation);
    let mut pre = Vec::with_capacity(truncation);
    for n in 1..=truncation {
        let s = TElement::new(2 * n as i64 + 1, n as u32)?;
        let y = phi(s);
        let d = dist(&y.ambient(), &limit_s);
        rows.push(DemoRow { n, element: s.to_string(), image: y.to_string(), distance: d });
        image_d.push((n, d));
        pre.push((n, s.ambient().to_vec()));
    }
    Ok(CounterexampleDemo {
        rows,
        image: ConvergenceCertificate::against_limit(image_d, eps),
        preimage: ConvergenceCertificate::uniformly_discrete(&pre, &limit_t, eps),
        epsilon: eps,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DoubleDualReport {
    pub order: usize,
    pub dual_order: usize,
    pub homomorphism: bool,
    pub injective: bool,
    pub onto_double_dual: bool,
    pub passed: bool,
}

/// `s -> s^` with `s^(w) = w(s)`, computed exactly on character turns.
pub fn finite_double_dual_check(group: &GroupTable) -> Result<DoubleDualReport> {
    let dual = characters(group)?;
    let k = dual.len();
    let e = group.exponent();
    let index = |turns: &[usize]| dual.iter().position(|w| w.turns == turns);
    let mut table = vec![vec![0; k]; k];
    for (a, wa) in dual.iter().enumerate() {
        for (b, wb) in dual.iter().enumerate() {
            let prod: Vec<usize> = wa.turns.iter().zip(&wb.turns).map(|(x, y)| (x + y) % e).collect();
            table[a][b] = index(&prod).ok_or_else(|| Error::Numerical("dual is not closed".into()))?;
        }
    }
    let dual_group = GroupTable::new(table)?;
    let double = characters(&dual_group)?;
    let de = dual_group.exponent();
    // s^ as turns over the dual, rescaled to the exponent of the dual group
    let hat = |s: usize| -> Option<Vec<usize>> {
        dual.iter().map(|w| (w.turns[s] * de % e == 0).then(|| w.turns[s] * de / e)).collect()
    };
    let hats: Vec<Option<Vec<usize>>> = (0..group.order()).map(hat).collect();
    let homomorphism = (0..group.order()).all(|s| {
        (0..group.order()).all(|t| match (&hats[s], &hats[t], &hats[group.mul(s, t)]) {
            (Some(a), Some(b), Some(ab)) => a.iter().zip(b).zip(ab).all(|((x, y), z)| (x + y) % de == *z),
            _ => false,
        })
    });
    let mut distinct = std::collections::HashSet::new();
    let injective = hats.iter().all(|h| h.as_ref().is_some_and(|h| distinct.insert(h.clone())));
    let onto_double_dual = double.len() == group.order()
        && double.iter().all(|chi| distinct.contains(&chi.turns));
    Ok(DoubleDualReport {
        order: group.order(),
        dual_order: k,
        homomorphism,
        injective,
        onto_double_dual,
        passed: homomorphism && injective && onto_double_dual,
    })
}

/// The candidate limit of a sequence of characters on fibers of `T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum DualLimit {
    /// A character value `w_k(m)` on the finite fiber `T_n`.
    Fiber { n: u32, k: i64, m: i64 },
    /// A value `e^{i angle}` over `x_0`, whose dual fiber is the circle.
    Origin { angle: f64 },
}

/// `w_k(m) = e^{2 pi i k m / (6n+3)}` on `T_n`, `n > 0`.
pub fn t_character(n: u32, k: i64, m: i64) -> C64 {
    let t = TAU * (k * m) as f64 / (6 * n as i64 + 3) as f64;
    c(t.cos(), t.sin())
}

/// Samples `n -> (fiber, character label, element label)` for `n = 1..=N` and certifies
/// both `p(w_n) -> p(w_0)` and `w_n(s_n) -> w_0(s_0)`; the per-index distance is the larger
/// of the two.
pub fn dual_convergence_check(
    generator: impl Fn(usize) -> (u32, i64, i64),
    limit: DualLimit,
    truncation: usize,
    eps: f64,
) -> Result<ConvergenceCertificate> {
    let (x0, v0) = match limit {
        DualLimit::Fiber { n, k, m } => {
            if n == 0 || k.abs() > 3 * n as i64 + 1 || m.abs() > 3 * n as i64 + 1 {
                return Err(Error::InvalidParameter(format!("limit ({n}, {k}, {m}) is not a character value on a finite fiber")));
            }
            (base_point(n), t_character(n, k, m))
        }
        DualLimit::Origin { angle } => (0.0, c(angle.cos(), angle.sin())),
    };
    let mut distances = Vec::with_capacity(truncation);
    for i in 1..=truncation {
        let (n, k, m) = generator(i);
        if n == 0 {
            return Err(Error::OutOfFiber { index: i, reason: "the fiber over x_0 has a circle as dual".into() });
        }
        let bound = 3 * n as i64 + 1;
        if k.abs() > bound || m.abs() > bound {
            return Err(Error::OutOfFiber { index: i, reason: format!("({k}, {m}) is not balanced mod {}", 6 * n + 3) });
        }
        let base = (base_point(n) - x0).abs();
        let value = (t_character(n, k, m) - v0).norm();
        distances.push((i, base.max(value)));
    }
    Ok(ConvergenceCertificate::against_limit(distances, eps))
}
