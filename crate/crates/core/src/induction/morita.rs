use rand::Rng;
use serde::Serialize;

use crate::algebra::{c_star_spectrum, GroupoidFunction, RegularModel};
use crate::error::{Error, Result};
use crate::groupoid::{subgroupoid, unit_orbits, ElemId, FiniteGroupoid, GroupoidActionOnSet};
use crate::linalg::{rank, zeros, C64, ZERO};
use crate::report::{Check, Verdicts};
use crate::star_algebra::{positivity_check, NumericOptions};

/// A finite `(G, H)`-equivalence: a set with commuting free left `G`- and right
/// `H`-actions whose anchors induce `X/H = G0` and `G\X = H0`.
#[derive(Clone, Debug)]
pub struct GroupoidEquivalence {
    pub points: Vec<String>,
    /// `r: X -> G0`.
    pub left_anchor: Vec<ElemId>,
    /// `s: X -> H0`.
    pub right_anchor: Vec<ElemId>,
    g_len: usize,
    h_len: usize,
    /// `left[x * |X| + p]` is `x . p`.
    left: Vec<Option<usize>>,
    /// `right[p * |H| + y]` is `p . y`.
    right: Vec<Option<usize>>,
}

impl GroupoidEquivalence {
    /// Tables are `left[x][p]` and `right[p][y]`; fails with the first violated axiom.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        g: &FiniteGroupoid,
        h: &FiniteGroupoid,
        points: Vec<String>,
        left_anchor: Vec<ElemId>,
        right_anchor: Vec<ElemId>,
        left: Vec<Vec<Option<usize>>>,
        right: Vec<Vec<Option<usize>>>,
    ) -> Result<Self> {
        let n = points.len();
        if left_anchor.len() != n || right_anchor.len() != n || left.len() != g.len() || right.len() != n {
            return Err(Error::InvalidEquivalence("table sizes".into()));
        }
        if left.iter().any(|row| row.len() != n) || right.iter().any(|row| row.len() != h.len()) {
            return Err(Error::InvalidEquivalence("table sizes".into()));
        }
        let eq = GroupoidEquivalence {
            points,
            left_anchor,
            right_anchor,
            g_len: g.len(),
            h_len: h.len(),
            left: left.into_iter().flatten().collect(),
            right: right.into_iter().flatten().collect(),
        };
        eq.validate(g, h)?;
        Ok(eq)
    }

    /// `X = s^-1(H0)` for a subgroupoid `H` (ambient ids) with `G` acting on the left
    /// and `H` on the right by multiplication; returns `H` with local ids.
    /// This is an equivalence exactly when `X/H` meets every unit of `G` once.
    pub fn from_subgroupoid(g: &FiniteGroupoid, h_elems: &[ElemId]) -> Result<(FiniteGroupoid, Self)> {
        let emb = subgroupoid(g, h_elems)?;
        let h = emb.groupoid.clone();
        let mut in_h0 = vec![false; g.len()];
        for &k in h.units() {
            in_h0[emb.inclusion[k]] = true;
        }
        let xs: Vec<ElemId> = g.elements().filter(|&x| in_h0[g.source(x)]).collect();
        let pos = |x: ElemId| xs.binary_search(&x).ok();
        let left = g
            .elements()
            .map(|a| xs.iter().map(|&p| g.mul(a, p).and_then(pos)).collect())
            .collect();
        let right = xs
            .iter()
            .map(|&p| emb.inclusion.iter().map(|&y| g.mul(p, y).and_then(pos)).collect())
            .collect();
        let points = xs.iter().map(|&x| g.name(x).to_string()).collect();
        let left_anchor = xs.iter().map(|&x| g.range(x)).collect();
        let right_anchor = xs.iter().map(|&x| emb.local(g.source(x)).expect("unit of H")).collect();
        let eq = Self::new(g, &h, points, left_anchor, right_anchor, left, right)?;
        Ok((h, eq))
    }

    /// `G` as a `(G, G)`-equivalence.
    pub fn identity(g: &FiniteGroupoid) -> Result<(FiniteGroupoid, Self)> {
        let all: Vec<ElemId> = g.elements().collect();
        Self::from_subgroupoid(g, &all)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn act_left(&self, x: ElemId, p: usize) -> Option<usize> {
        self.left[x * self.len() + p]
    }

    pub fn act_right(&self, p: usize, y: ElemId) -> Option<usize> {
        self.right[p * self.h_len + y]
    }

    fn validate(&self, g: &FiniteGroupoid, h: &FiniteGroupoid) -> Result<()> {
        let fail = |axiom: &str, detail: String| Err(Error::InvalidEquivalence(format!("{axiom}: {detail}")));
        let n = self.len();
        for p in 0..n {
            if !g.is_unit(self.left_anchor[p]) || !h.is_unit(self.right_anchor[p]) {
                return fail("anchors", format!("point {} has a non-unit anchor", self.points[p]));
            }
        }
        for x in 0..self.g_len {
            for p in 0..n {
                let defined = self.act_left(x, p);
                if defined.is_some() != (g.source(x) == self.left_anchor[p]) {
                    return fail("left action domain", format!("{} . {}", g.name(x), self.points[p]));
                }
                if let Some(q) = defined {
                    if self.left_anchor[q] != g.range(x) {
                        return fail("left anchor equivariance", format!("{} . {}", g.name(x), self.points[p]));
                    }
                    if g.is_unit(x) && q != p {
                        return fail("left unit", self.points[p].clone());
                    }
                    if q == p && !g.is_unit(x) {
                        return fail("free left action", format!("{} fixes {}", g.name(x), self.points[p]));
                    }
                    if self.right_anchor[q] != self.right_anchor[p] {
                        return fail("commuting anchors", format!("{} . {}", g.name(x), self.points[p]));
                    }
                }
            }
        }
        for a in 0..self.g_len {
            for b in 0..self.g_len {
                let Some(ab) = g.mul(a, b) else { continue };
                for p in 0..n {
                    if let Some(bp) = self.act_left(b, p) {
                        if self.act_left(a, bp) != self.act_left(ab, p) {
                            return fail("left associativity", format!("({} {}) . {}", g.name(a), g.name(b), self.points[p]));
                        }
                    }
                }
            }
        }
        for p in 0..n {
            for y in 0..self.h_len {
                let defined = self.act_right(p, y);
                if defined.is_some() != (h.range(y) == self.right_anchor[p]) {
                    return fail("right action domain", format!("{} . {}", self.points[p], h.name(y)));
                }
                if let Some(q) = defined {
                    if self.right_anchor[q] != h.source(y) {
                        return fail("right anchor equivariance", format!("{} . {}", self.points[p], h.name(y)));
                    }
                    if h.is_unit(y) && q != p {
                        return fail("right unit", self.points[p].clone());
                    }
                    if q == p && !h.is_unit(y) {
                        return fail("free right action", format!("{} fixes {}", h.name(y), self.points[p]));
                    }
                    if self.left_anchor[q] != self.left_anchor[p] {
                        return fail("commuting anchors", format!("{} . {}", self.points[p], h.name(y)));
                    }
                }
            }
        }
        for a in 0..self.h_len {
            for b in 0..self.h_len {
                let Some(ab) = h.mul(a, b) else { continue };
                for p in 0..n {
                    if let Some(pa) = self.act_right(p, a) {
                        if self.act_right(pa, b) != self.act_right(p, ab) {
                            return fail("right associativity", format!("{} . ({} {})", self.points[p], h.name(a), h.name(b)));
                        }
                    }
                }
            }
        }
        for x in 0..self.g_len {
            for p in 0..n {
                let Some(xp) = self.act_left(x, p) else { continue };
                for y in 0..self.h_len {
                    if self.act_right(p, y).and_then(|py| self.act_left(x, py)) != self.act_right(xp, y) {
                        return fail("commuting actions", format!("({} . {}) . {}", g.name(x), self.points[p], h.name(y)));
                    }
                }
            }
        }
        // r induces X/H = G0 and s induces G\X = H0
        for &u in g.units() {
            let fiber: Vec<usize> = (0..n).filter(|&p| self.left_anchor[p] == u).collect();
            let Some(&p0) = fiber.first() else {
                return fail("left anchor onto G0", format!("nothing over {}", g.name(u)));
            };
            if let Some(&q) = fiber.iter().find(|&&q| !(0..self.h_len).any(|y| self.act_right(p0, y) == Some(q))) {
                return fail("X/H = G0", format!("{} and {} are not H-related", self.points[p0], self.points[q]));
            }
        }
        for &v in h.units() {
            let fiber: Vec<usize> = (0..n).filter(|&p| self.right_anchor[p] == v).collect();
            let Some(&p0) = fiber.first() else {
                return fail("right anchor onto H0", format!("nothing over {}", h.name(v)));
            };
            if let Some(&q) = fiber.iter().find(|&&q| !(0..self.g_len).any(|x| self.act_left(x, p0) == Some(q))) {
                return fail("G\\X = H0", format!("{} and {} are not G-related", self.points[p0], self.points[q]));
            }
        }
        Ok(())
    }
}

/// The bimodule operations with counting measures.
struct Bimodule<'a> {
    g: &'a FiniteGroupoid,
    h: &'a FiniteGroupoid,
    x: &'a GroupoidEquivalence,
}

impl Bimodule<'_> {
    /// `(f . phi)(p) = sum over a in G^{r(p)} of f(a) phi(a^-1 . p)`.
    fn left(&self, f: &GroupoidFunction<'_>, phi: &[C64]) -> Vec<C64> {
        (0..self.x.len())
            .map(|p| {
                self.g
                    .range_fiber(self.x.left_anchor[p])
                    .iter()
                    .map(|&a| f.at(a) * phi[self.x.act_left(self.g.inverse(a), p).expect("anchor")])
                    .sum()
            })
            .collect()
    }

    /// `(phi . k)(p) = sum over y in H^{s(p)} of phi(p . y) k(y^-1)`.
    fn right(&self, phi: &[C64], k: &GroupoidFunction<'_>) -> Vec<C64> {
        (0..self.x.len())
            .map(|p| {
                self.h
                    .range_fiber(self.x.right_anchor[p])
                    .iter()
                    .map(|&y| phi[self.x.act_right(p, y).expect("anchor")] * k.at(self.h.inverse(y)))
                    .sum()
            })
            .collect()
    }

    /// `<phi, psi>_H(y) = sum over a in G^{r(p)} of conj(phi(a^-1 . p)) psi(a^-1 . p . y)`
    /// for a base point `p` with `s(p) = r(y)`.
    fn right_inner_at(&self, phi: &[C64], psi: &[C64], y: ElemId, p: usize) -> C64 {
        let py = self.x.act_right(p, y).expect("base point over r(y)");
        self.g
            .range_fiber(self.x.left_anchor[p])
            .iter()
            .map(|&a| {
                let ainv = self.g.inverse(a);
                phi[self.x.act_left(ainv, p).expect("anchor")].conj() * psi[self.x.act_left(ainv, py).expect("anchor")]
            })
            .sum()
    }

    /// `G<phi, psi>(a) = sum over y in H^{s(p)} of phi(p . y) conj(psi(a^-1 . p . y))`
    /// for a base point `p` with `r(p) = r(a)`.
    fn left_inner_at(&self, phi: &[C64], psi: &[C64], a: ElemId, p: usize) -> C64 {
        let ainv = self.g.inverse(a);
        self.h
            .range_fiber(self.x.right_anchor[p])
            .iter()
            .map(|&y| {
                let py = self.x.act_right(p, y).expect("anchor");
                phi[py] * psi[self.x.act_left(ainv, py).expect("anchor")].conj()
            })
            .sum()
    }

    /// Evaluates with every admissible base point; returns the function and the spread.
    fn right_inner(&self, phi: &[C64], psi: &[C64]) -> (Vec<C64>, f64) {
        let mut spread = 0.0f64;
        let values = self
            .h
            .elements()
            .map(|y| {
                let vals: Vec<C64> = (0..self.x.len())
                    .filter(|&p| self.x.right_anchor[p] == self.h.range(y))
                    .map(|p| self.right_inner_at(phi, psi, y, p))
                    .collect();
                for v in &vals {
                    spread = spread.max((v - vals[0]).norm());
                }
                vals[0]
            })
            .collect();
        (values, spread)
    }

    fn left_inner(&self, phi: &[C64], psi: &[C64]) -> (Vec<C64>, f64) {
        let mut spread = 0.0f64;
        let values = self
            .g
            .elements()
            .map(|a| {
                let vals: Vec<C64> = (0..self.x.len())
                    .filter(|&p| self.x.left_anchor[p] == self.g.range(a))
                    .map(|p| self.left_inner_at(phi, psi, a, p))
                    .collect();
                for v in &vals {
                    spread = spread.max((v - vals[0]).norm());
                }
                vals[0]
            })
            .collect();
        (values, spread)
    }
}

fn diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn random_vec<R: Rng>(n: usize, rng: &mut R) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

fn sorted_block_dims_by_orbit(g: &FiniteGroupoid, opts: &NumericOptions) -> Result<Vec<Vec<usize>>> {
    let spec = c_star_spectrum(g, opts)?;
    let (orbits, _) = unit_orbits(g);
    let mut per = vec![Vec::new(); orbits.len()];
    for b in &spec.blocks {
        per[b.orbit].push(b.dim);
    }
    for v in &mut per {
        v.sort_unstable();
    }
    Ok(per)
}

#[derive(Clone, Debug, Serialize)]
pub struct MoritaReport {
    pub points: usize,
    pub g_block_dims: Vec<usize>,
    pub h_block_dims: Vec<usize>,
    /// Per matched orbit pair, `(|orbit in G0|, |orbit in H0|)`.
    pub orbit_sizes: Vec<(usize, usize)>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Verdicts for MoritaReport {
    fn checks(&self) -> Vec<Check> {
        self.checks.clone()
    }
}

/// Evaluates the four bimodule operations on `C(X)` and checks the module axioms,
/// inner product identities, the imprimitivity relation, positivity, fullness and
/// the induced correspondence of block dimensions.
pub fn morita_bimodule_check(
    g: &FiniteGroupoid,
    h: &FiniteGroupoid,
    x: &GroupoidEquivalence,
    opts: &NumericOptions,
) -> Result<MoritaReport> {
    if x.g_len != g.len() || x.h_len != h.len() {
        return Err(Error::InvalidEquivalence("equivalence built for other groupoids".into()));
    }
    if !g.weights().is_counting() || !h.weights().is_counting() {
        return Err(Error::InvalidParameter("bimodule formulas assume counting Haar weights".into()));
    }
    let bm = Bimodule { g, h, x };
    let tol = opts.assert_tol;
    let mut rng = opts.rng(0x4d4f_5249);
    let n = x.len();
    let (mut left_mod, mut right_mod, mut bimod) = (0.0f64, 0.0f64, 0.0f64);
    let (mut rlin, mut radj, mut llin, mut ladj, mut compat, mut impr, mut spread) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut positive = true;
    let g_model = RegularModel::full(g);
    let h_model = RegularModel::full(h);
    for _ in 0..3 {
        let f1 = GroupoidFunction::random(g, &mut rng);
        let f2 = GroupoidFunction::random(g, &mut rng);
        let k1 = GroupoidFunction::random(h, &mut rng);
        let k2 = GroupoidFunction::random(h, &mut rng);
        let (phi, psi, chi) = (random_vec(n, &mut rng), random_vec(n, &mut rng), random_vec(n, &mut rng));

        left_mod = left_mod.max(diff(&bm.left(&f1.convolve(&f2)?, &phi), &bm.left(&f1, &bm.left(&f2, &phi))));
        right_mod = right_mod.max(diff(&bm.right(&phi, &k1.convolve(&k2)?), &bm.right(&bm.right(&phi, &k1), &k2)));
        bimod = bimod.max(diff(&bm.right(&bm.left(&f1, &phi), &k1), &bm.left(&f1, &bm.right(&phi, &k1))));

        let (r_pp, s1) = bm.right_inner(&phi, &psi);
        let (r_qp, s2) = bm.right_inner(&psi, &phi);
        let (l_pp, s3) = bm.left_inner(&phi, &psi);
        let (l_qp, s4) = bm.left_inner(&psi, &phi);
        spread = spread.max(s1).max(s2).max(s3).max(s4);
        let r_pp = GroupoidFunction::new(h, r_pp)?;
        let l_pp = GroupoidFunction::new(g, l_pp)?;

        let lhs = bm.right_inner(&phi, &bm.right(&psi, &k1)).0;
        rlin = rlin.max(diff(&lhs, r_pp.convolve(&k1)?.values()));
        radj = radj.max(diff(r_pp.involute().values(), &r_qp));
        let lhs = bm.left_inner(&bm.left(&f1, &phi), &psi).0;
        llin = llin.max(diff(&lhs, f1.convolve(&l_pp)?.values()));
        ladj = ladj.max(diff(l_pp.involute().values(), &l_qp));

        let a = bm.right_inner(&bm.left(&f1, &phi), &psi).0;
        let b = bm.right_inner(&phi, &bm.left(&f1.involute(), &psi)).0;
        compat = compat.max(diff(&a, &b));
        let a = bm.left_inner(&bm.right(&phi, &k1), &psi).0;
        let b = bm.left_inner(&phi, &bm.right(&psi, &k1.involute())).0;
        compat = compat.max(diff(&a, &b));

        // G<phi, psi> . chi = phi . <psi, chi>_H
        let lhs = bm.left(&l_pp, &chi);
        let rhs = bm.right(&phi, &GroupoidFunction::new(h, bm.right_inner(&psi, &chi).0)?);
        impr = impr.max(diff(&lhs, &rhs));

        let zz_h = GroupoidFunction::new(h, bm.right_inner(&phi, &phi).0)?;
        let zz_g = GroupoidFunction::new(g, bm.left_inner(&phi, &phi).0)?;
        positive &= positivity_check(&h_model.embed(&zz_h)?, tol) && positivity_check(&g_model.embed(&zz_g)?, tol);
    }

    let mut checks = vec![
        Check::residual("left module", left_mod, tol),
        Check::residual("right module", right_mod, tol),
        Check::residual("bimodule", bimod, tol),
        Check::residual("inner products independent of base point", spread, tol),
        Check::residual("<phi, psi . k>_H = <phi, psi>_H * k", rlin, tol),
        Check::residual("<phi, psi>_H^* = <psi, phi>_H", radj, tol),
        Check::residual("G<f . phi, psi> = f * G<phi, psi>", llin, tol),
        Check::residual("G<phi, psi>^* = G<psi, phi>", ladj, tol),
        Check::residual("adjointable actions", compat, tol),
        Check::residual("imprimitivity G<phi, psi> . chi = phi . <psi, chi>_H", impr, tol),
        Check::new("positivity of <z, z> in both models", positive, || "a sampled <z, z> is not positive".into()),
    ];

    // fullness: the inner products of point masses span each algebra
    let delta = |p: usize| {
        let mut v = vec![ZERO; n];
        v[p] = C64::new(1.0, 0.0);
        v
    };
    let mut h_rows = zeros(n * n, h.len());
    let mut g_rows = zeros(n * n, g.len());
    for p in 0..n {
        for q in 0..n {
            let (dp, dq) = (delta(p), delta(q));
            for (y, v) in bm.right_inner(&dp, &dq).0.into_iter().enumerate() {
                h_rows[(p * n + q, y)] = v;
            }
            for (a, v) in bm.left_inner(&dp, &dq).0.into_iter().enumerate() {
                g_rows[(p * n + q, a)] = v;
            }
        }
    }
    let (rh, rg) = (rank(&h_rows, 1e-9), rank(&g_rows, 1e-9));
    checks.push(Check::new("fullness", rh == h.len() && rg == g.len(), || {
        format!("span ranks {rg}/{} in C*(G), {rh}/{} in C*(H)", g.len(), h.len())
    }));

    // orbits correspond through X; each block dimension scales by |orbit in G0| / |orbit in H0|
    let (g_orbits, g_orbit_of) = unit_orbits(g);
    let (h_orbits, h_orbit_of) = unit_orbits(h);
    let mut partner = vec![None; g_orbits.len()];
    let mut consistent = g_orbits.len() == h_orbits.len();
    for p in 0..n {
        let go = g_orbit_of[g.unit_pos(x.left_anchor[p])];
        let ho = h_orbit_of[h.unit_pos(x.right_anchor[p])];
        match partner[go] {
            None => partner[go] = Some(ho),
            Some(prev) => consistent &= prev == ho,
        }
    }
    let g_dims = sorted_block_dims_by_orbit(g, opts)?;
    let h_dims = sorted_block_dims_by_orbit(h, opts)?;
    let mut orbit_sizes = Vec::new();
    let mut witness = String::new();
    for (go, ho) in partner.iter().enumerate() {
        let Some(ho) = *ho else {
            consistent = false;
            continue;
        };
        let (sg, sh) = (g_orbits[go].len(), h_orbits[ho].len());
        orbit_sizes.push((sg, sh));
        let scaled: Vec<usize> = h_dims[ho].iter().map(|&d| d * sg).collect();
        let lhs: Vec<usize> = g_dims[go].iter().map(|&d| d * sh).collect();
        if scaled != lhs {
            consistent = false;
            witness = format!("orbit {go}: G blocks {:?} vs H blocks {:?}", g_dims[go], h_dims[ho]);
        }
    }
    checks.push(Check::new("block dimensions correspond", consistent, || {
        if witness.is_empty() { "orbits of G0 and H0 do not correspond".into() } else { witness.clone() }
    }));

    let passed = checks.iter().all(Check::passed);
    let flat = |v: Vec<Vec<usize>>| {
        let mut f: Vec<usize> = v.into_iter().flatten().collect();
        f.sort_unstable();
        f
    };
    Ok(MoritaReport {
        points: n,
        g_block_dims: flat(g_dims),
        h_block_dims: flat(h_dims),
        orbit_sizes,
        checks,
        passed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StoneVonNeumannReport {
    /// `(unit, |G_u|)` per unit of `G`.
    pub expected: Vec<(String, usize)>,
    /// Block dimensions of `C*(G x| G)` per orbit, the orbit named by its unit of `G`.
    pub found: Vec<(String, Vec<usize>)>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Verdicts for StoneVonNeumannReport {
    fn checks(&self) -> Vec<Check> {
        self.checks.clone()
    }
}

/// `C*(G x| G)` for left translation has exactly one block per unit `u`, of dimension `|G_u|`.
pub fn stone_von_neumann_check(g: &FiniteGroupoid, opts: &NumericOptions) -> Result<StoneVonNeumannReport> {
    let act = GroupoidActionOnSet::left_translation(g);
    let t = FiniteGroupoid::transformation_groupoid(&act);
    let spec = c_star_spectrum(&t, opts)?;
    let (orbits, _) = unit_orbits(&t);
    // a unit of G x| G is a point of G; its orbit is the source fiber containing it
    let unit_point = |k: usize| -> ElemId {
        t.units().iter().position(|&v| v == orbits[k][0]).expect("unit")
    };
    let mut found: Vec<(ElemId, Vec<usize>)> = (0..orbits.len()).map(|k| (g.source(unit_point(k)), Vec::new())).collect();
    for b in &spec.blocks {
        found[b.orbit].1.push(b.dim);
    }
    found.sort_by_key(|(u, _)| *u);
    let expected: Vec<(ElemId, usize)> = g.units().iter().map(|&u| (u, g.source_fiber(u).len())).collect();
    let ok = found.len() == expected.len()
        && found.iter().zip(&expected).all(|((u, dims), (v, n))| u == v && dims.as_slice() == [*n]);
    let checks = vec![Check::new("one block of dimension |G_u| per unit", ok, || {
        let bad: Vec<String> = found
            .iter()
            .filter(|(u, dims)| dims.as_slice() != [g.source_fiber(*u).len()])
            .map(|(u, dims)| format!("{}: {:?}", g.name(*u), dims))
            .collect();
        format!("found {} orbits for {} units; mismatches: {}", found.len(), expected.len(), bad.join(", "))
    })];
    Ok(StoneVonNeumannReport {
        expected: expected.iter().map(|&(u, n)| (g.name(u).to_string(), n)).collect(),
        found: found.into_iter().map(|(u, d)| (g.name(u).to_string(), d)).collect(),
        passed: ok,
        checks,
    })
}
