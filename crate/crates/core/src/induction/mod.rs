//! Character duals of abelian isotropy, the groupoid action on them, induced
//! representations and the verifiers built on them.

mod induce;
mod main_theorem;
mod morita;

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::groupoid::{stabilizer_subgroupoid, ElemId, FiniteGroupoid, IsotropyFiber};
use crate::groups::GroupTable;
use crate::linalg::{c, C64};

pub use induce::{
    conjugate_fiber_rep, fiber_covariant_reps, induce_character, induce_covariant, scalar_rep_residual, FiberCovariantRep,
};
pub use main_theorem::{verify_crossed_main_theorem, verify_scalar_main_theorem, CrossedTheoremReport, ScalarTheoremReport};
pub use morita::{morita_bimodule_check, stone_von_neumann_check, GroupoidEquivalence, MoritaReport, StoneVonNeumannReport};

/// A homomorphism into the `e`-th roots of unity, stored exactly as turns:
/// `chi(g) = exp(2 pi i turns[g] / e)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroupCharacter {
    pub exponent: usize,
    pub turns: Vec<usize>,
}

impl GroupCharacter {
    pub fn value(&self, g: usize) -> C64 {
        let t = TAU * self.turns[g] as f64 / self.exponent as f64;
        c(t.cos(), t.sin())
    }

    pub fn values(&self) -> Vec<C64> {
        (0..self.turns.len()).map(|g| self.value(g)).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.turns.iter().all(|&t| t == 0)
    }
}

/// All characters of a finite abelian group. Built along the chain
/// `1 < <g1> < <g1,g2> < ...` with each `g_j` the least element not yet reached;
/// a character extends to the next step in exactly `[H_j : H_j-1]` ways.
pub fn characters(group: &GroupTable) -> Result<Vec<GroupCharacter>> {
    if !group.is_abelian() {
        return Err(Error::NonAbelian(format!("group of order {}", group.order())));
    }
    let n = group.order();
    let e = group.exponent();
    let id = group.identity();
    let mut members = vec![id];
    let mut in_h = vec![false; n];
    in_h[id] = true;
    let mut partial: Vec<Vec<Option<usize>>> = vec![{
        let mut t = vec![None; n];
        t[id] = Some(0);
        t
    }];
    while let Some(g) = (0..n).find(|&g| !in_h[g]) {
        let mut m = 1;
        let mut p = g;
        while !in_h[p] {
            p = group.mul(p, g);
            m += 1;
        }
        // p = g^m is the first power back in H
        let mut next_members = Vec::with_capacity(members.len() * m);
        let mut power = id;
        for _ in 0..m {
            for &h in &members {
                next_members.push(group.mul(h, power));
            }
            power = group.mul(power, g);
        }
        let mut next = Vec::with_capacity(partial.len() * m);
        for chi in &partial {
            let k0 = chi[p].expect("g^m lies in H");
            debug_assert_eq!(k0 % m, 0);
            for t in 0..m {
                let v = (k0 / m + t * e / m) % e;
                let mut ext = chi.clone();
                let mut power = id;
                for i in 0..m {
                    for &h in &members {
                        ext[group.mul(h, power)] = Some((chi[h].expect("member") + i * v) % e);
                    }
                    power = group.mul(power, g);
                }
                next.push(ext);
            }
        }
        for &x in &next_members {
            in_h[x] = true;
        }
        members = next_members;
        partial = next;
    }
    Ok(partial
        .into_iter()
        .map(|t| GroupCharacter { exponent: e, turns: t.into_iter().map(|x| x.expect("all reached")).collect() })
        .collect())
}

/// `sum_s chi(s) conj(psi(s)) = |S| [chi = psi]`: worst deviation over all pairs.
pub fn orthogonality_residual(chars: &[GroupCharacter]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in chars.iter().enumerate() {
        for (j, b) in chars.iter().enumerate() {
            let n = a.turns.len();
            let s: C64 = (0..n).map(|g| a.value(g) * b.value(g).conj()).sum();
            let expected = if i == j { n as f64 } else { 0.0 };
            worst = worst.max((s - c(expected, 0.0)).norm());
        }
    }
    worst
}

/// A character of the isotropy group at `unit`, indexed like `FiniteGroupoid::isotropy(unit)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Character {
    pub unit: ElemId,
    pub elements: Vec<ElemId>,
    pub character: GroupCharacter,
}

impl Character {
    /// `omega(s)` for an isotropy element `s` at `unit`.
    pub fn at(&self, s: ElemId) -> Option<C64> {
        self.position(s).map(|k| self.character.value(k))
    }

    pub fn position(&self, s: ElemId) -> Option<usize> {
        self.elements.binary_search(&s).ok()
    }

    pub fn turns_at(&self, s: ElemId) -> Option<usize> {
        self.position(s).map(|k| self.character.turns[k])
    }
}

/// `S^ = disjoint union of the character groups of the isotropy fibers`.
#[derive(Clone, Debug, Serialize)]
pub struct DualBundle {
    pub characters: Vec<Character>,
    /// Indices into `characters` per unit position.
    pub by_unit: Vec<Vec<usize>>,
}

impl DualBundle {
    /// `p^(omega)`.
    pub fn projection(&self, k: usize) -> ElemId {
        self.characters[k].unit
    }

    pub fn find(&self, chi: &Character, g: &FiniteGroupoid) -> Option<usize> {
        self.by_unit[g.unit_pos(chi.unit)]
            .iter()
            .copied()
            .find(|&k| self.characters[k].character.turns == chi.character.turns)
    }
}

fn fiber_characters(fiber: &IsotropyFiber, g: &FiniteGroupoid) -> Result<Vec<Character>> {
    let chars = characters(&fiber.group)
        .map_err(|_| Error::NonAbelian(format!("isotropy at {} is not abelian", g.name(fiber.unit))))?;
    Ok(chars
        .into_iter()
        .map(|character| Character { unit: fiber.unit, elements: fiber.elements.clone(), character })
        .collect())
}

/// The dual bundle of the isotropy of `g`; fails on the first nonabelian fiber.
pub fn dual_bundle(g: &FiniteGroupoid) -> Result<DualBundle> {
    let stab = stabilizer_subgroupoid(g);
    let mut characters = Vec::new();
    let mut by_unit = Vec::with_capacity(stab.fibers.len());
    for fiber in &stab.fibers {
        debug_assert!(fiber.elements.windows(2).all(|w| w[0] < w[1]));
        let start = characters.len();
        characters.extend(fiber_characters(fiber, g)?);
        by_unit.push((start..characters.len()).collect());
    }
    Ok(DualBundle { characters, by_unit })
}

/// `(x . omega)(s) = omega(x^-1 s x)` for `s` in the isotropy at `r(x)`.
pub fn g_action_on_dual(g: &FiniteGroupoid, omega: &Character, x: ElemId) -> Result<Character> {
    if g.source(x) != omega.unit {
        return Err(Error::FiberMismatch(g.source(x) as u32, omega.unit as u32));
    }
    let r = g.range(x);
    let xinv = g.inverse(x);
    let elements = g.isotropy(r);
    let turns = elements
        .iter()
        .map(|&s| {
            let conj = g.mul_unchecked(g.mul_unchecked(xinv, s), x);
            omega.turns_at(conj).ok_or_else(|| Error::Numerical("conjugate left the isotropy".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Character {
        unit: r,
        elements,
        character: GroupCharacter { exponent: omega.character.exponent, turns },
    })
}

/// Orbits of the `G`-action on the dual bundle, as sorted index lists.
pub fn dual_orbits(g: &FiniteGroupoid, dual: &DualBundle) -> Result<Vec<Vec<usize>>> {
    let n = dual.characters.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for x in g.elements() {
        for &k in &dual.by_unit[g.unit_pos(g.source(x))] {
            let moved = g_action_on_dual(g, &dual.characters[k], x)?;
            let j = dual
                .find(&moved, g)
                .ok_or_else(|| Error::Numerical("transported character not in the dual".into()))?;
            let (a, b) = (find(&mut parent, k), find(&mut parent, j));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for k in 0..n {
        let r = find(&mut parent, k);
        if slot[r] == usize::MAX {
            slot[r] = orbits.len();
            orbits.push(Vec::new());
        }
        orbits[slot[r]].push(k);
    }
    Ok(orbits)
}

/// Representatives `c` of `G_u / S_u` and the residual `delta(x) = c([x])^-1 x`.
///
/// The class of `x` in `G_u` is determined by `r(x)`.
#[derive(Clone, Debug, Serialize)]
pub struct QuotientSection {
    pub unit: ElemId,
    pub representatives: Vec<ElemId>,
    /// Class index per element, `None` off `G_u`.
    class_of: Vec<Option<usize>>,
    delta: Vec<Option<ElemId>>,
}

impl QuotientSection {
    fn build(g: &FiniteGroupoid, u: ElemId, pick_max: bool) -> Self {
        let fiber = g.source_fiber(u);
        let mut rep_at_range: Vec<Option<ElemId>> = vec![None; g.len()];
        for &x in fiber {
            let slot = &mut rep_at_range[g.range(x)];
            *slot = match *slot {
                None => Some(x),
                Some(y) => Some(if pick_max { y.max(x) } else { y.min(x) }),
            };
        }
        let mut representatives: Vec<ElemId> = rep_at_range.iter().flatten().copied().collect();
        representatives.sort_unstable();
        let mut class_of = vec![None; g.len()];
        let mut delta = vec![None; g.len()];
        for &x in fiber {
            let rep = rep_at_range[g.range(x)].expect("range hit");
            class_of[x] = representatives.binary_search(&rep).ok();
            delta[x] = Some(g.mul_unchecked(g.inverse(rep), x));
        }
        QuotientSection { unit: u, representatives, class_of, delta }
    }

    /// The least element id in each class.
    pub fn minimal(g: &FiniteGroupoid, u: ElemId) -> Self {
        Self::build(g, u, false)
    }

    /// The greatest element id in each class.
    pub fn maximal(g: &FiniteGroupoid, u: ElemId) -> Self {
        Self::build(g, u, true)
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn class(&self, x: ElemId) -> Option<usize> {
        self.class_of[x]
    }

    pub fn delta(&self, x: ElemId) -> Option<ElemId> {
        self.delta[x]
    }

    /// The representative whose class sits over the unit `v`, if `v` is in the orbit.
    pub fn representative_over(&self, g: &FiniteGroupoid, v: ElemId) -> Option<(usize, ElemId)> {
        self.representatives.iter().copied().enumerate().find(|&(_, x)| g.range(x) == v)
    }
}
