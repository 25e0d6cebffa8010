use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{ElemId, FiniteGroupoid, HaarWeights, NONE};
use crate::error::{Error, Result};
use crate::groups::GroupTable;

/// A groupoid together with its inclusion into an ambient groupoid.
#[derive(Clone, Debug)]
pub struct Embedded {
    pub groupoid: FiniteGroupoid,
    /// `inclusion[k]` is the ambient id of local element `k`.
    pub inclusion: Vec<ElemId>,
}

impl Embedded {
    /// Local id of an ambient element, if it lies in the subgroupoid.
    pub fn local(&self, ambient: ElemId) -> Option<ElemId> {
        self.inclusion.binary_search(&ambient).ok()
    }
}

/// The isotropy group `S_u` at one unit, with its group table indexed by position in `elements`.
#[derive(Clone, Debug)]
pub struct IsotropyFiber {
    pub unit: ElemId,
    pub elements: Vec<ElemId>,
    pub group: GroupTable,
}

impl IsotropyFiber {
    /// Position of an ambient element in this fiber.
    pub fn position(&self, g: ElemId) -> Option<usize> {
        self.elements.binary_search(&g).ok()
    }
}

#[derive(Clone, Debug)]
pub struct Stabilizer {
    pub embedded: Embedded,
    /// One fiber per unit, in the order of `FiniteGroupoid::units`.
    pub fibers: Vec<IsotropyFiber>,
}

#[derive(Clone, Debug)]
pub struct OrbitStructure {
    /// Orbits as sorted lists of unit ids, ordered by their least unit.
    pub orbits: Vec<Vec<ElemId>>,
    /// Orbit index of each unit, indexed by unit position.
    pub orbit_of_unit: Vec<usize>,
    /// The orbit groupoid `R`: pairs `(u, v)` of units in a common orbit.
    pub orbit_groupoid: FiniteGroupoid,
    /// `pi(g) = (r(g), s(g))` as an element of `R`.
    pub projection: Vec<ElemId>,
}

impl OrbitStructure {
    pub fn orbit_of(&self, g: &FiniteGroupoid, u: ElemId) -> usize {
        self.orbit_of_unit[g.unit_pos(u)]
    }
}

#[derive(Clone, Debug)]
pub struct ImprimitivityGroupoid {
    pub groupoid: FiniteGroupoid,
    /// Representative pair `(x, y)` of every class `[x, y]`.
    pub classes: Vec<(ElemId, ElemId)>,
    /// `[x, y] -> x y^-1`, a homomorphism into the ambient groupoid.
    pub to_ambient: Vec<ElemId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralFlags {
    pub is_transitive: bool,
    pub is_principal: bool,
    pub has_abelian_isotropy: bool,
    pub is_group_bundle: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomomorphismReport {
    pub is_homomorphism: bool,
    /// Composable pairs `(a, b)` whose images are not composable or whose product is not preserved.
    pub violations: Vec<(ElemId, ElemId)>,
}

pub fn is_bijection(perm: &[usize], n: usize) -> bool {
    if perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}

/// Builds the subgroupoid on `elems` (ambient ids), checking closure.
pub(crate) fn subgroupoid(g: &FiniteGroupoid, elems: &[ElemId]) -> Result<Embedded> {
    let mut inclusion = elems.to_vec();
    inclusion.sort_unstable();
    inclusion.dedup();
    if inclusion.iter().any(|&x| x >= g.len()) {
        return Err(Error::NotSubgroupoid("element id out of range".into()));
    }
    let mut local = vec![NONE; g.len()];
    for (k, &x) in inclusion.iter().enumerate() {
        local[x] = k as u32;
    }
    let loc = |x: ElemId| -> Result<usize> {
        match local[x] {
            NONE => Err(Error::NotSubgroupoid(format!("{} is missing", g.name(x)))),
            k => Ok(k as usize),
        }
    };
    let m = inclusion.len();
    let mut range = Vec::with_capacity(m);
    let mut source = Vec::with_capacity(m);
    let mut inverse = Vec::with_capacity(m);
    for &x in &inclusion {
        range.push(loc(g.range(x))?);
        source.push(loc(g.source(x))?);
        inverse.push(loc(g.inverse(x))?);
    }
    let mut mult = vec![NONE; m * m];
    for (i, &a) in inclusion.iter().enumerate() {
        for (j, &b) in inclusion.iter().enumerate() {
            if let Some(c) = g.mul(a, b) {
                mult[i * m + j] = loc(c)? as u32;
            }
        }
    }
    let units: Vec<ElemId> = (0..m).filter(|&k| g.is_unit(inclusion[k])).collect();
    let names = inclusion.iter().map(|&x| g.name(x).to_string()).collect();
    let weights = HaarWeights::new(units.iter().map(|&k| g.weight(inclusion[k])).collect())?;
    let sub = FiniteGroupoid::assemble(names, units, range, source, inverse, mult);
    let sub = if weights.is_counting() { sub } else { sub.with_weights(weights)? };
    Ok(Embedded { groupoid: sub, inclusion })
}

/// The isotropy bundle `S = {g : r(g) = s(g)}` with its fiber groups.
pub fn stabilizer_subgroupoid(g: &FiniteGroupoid) -> Stabilizer {
    let elems: Vec<ElemId> = g.elements().filter(|&x| g.range(x) == g.source(x)).collect();
    let embedded = subgroupoid(g, &elems).expect("isotropy is always a subgroupoid");
    let fibers = g
        .units()
        .iter()
        .map(|&u| {
            let elements = g.isotropy(u);
            let pos: HashMap<ElemId, usize> = elements.iter().enumerate().map(|(i, &x)| (x, i)).collect();
            let table = elements
                .iter()
                .map(|&a| elements.iter().map(|&b| pos[&g.mul_unchecked(a, b)]).collect())
                .collect();
            let names = elements.iter().map(|&x| g.name(x).to_string()).collect();
            let group = GroupTable::new(table)
                .and_then(|t| t.with_names(names))
                .expect("isotropy of a valid groupoid is a group");
            IsotropyFiber { unit: u, elements, group }
        })
        .collect();
    Stabilizer { embedded, fibers }
}

pub(crate) fn unit_orbits(g: &FiniteGroupoid) -> (Vec<Vec<ElemId>>, Vec<usize>) {
    let k = g.units().len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for x in g.elements() {
        let a = find(&mut parent, g.unit_pos(g.range(x)));
        let b = find(&mut parent, g.unit_pos(g.source(x)));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut orbit_of_root = vec![usize::MAX; k];
    let mut orbits: Vec<Vec<ElemId>> = Vec::new();
    let mut orbit_of_unit = vec![0; k];
    for (i, &u) in g.units().iter().enumerate() {
        let r = find(&mut parent, i);
        if orbit_of_root[r] == usize::MAX {
            orbit_of_root[r] = orbits.len();
            orbits.push(Vec::new());
        }
        orbit_of_unit[i] = orbit_of_root[r];
        orbits[orbit_of_root[r]].push(u);
    }
    (orbits, orbit_of_unit)
}

/// Orbits of the unit space, the orbit groupoid and the canonical map `(r, s)`.
pub fn orbit_structure(g: &FiniteGroupoid) -> OrbitStructure {
    let (orbits, orbit_of_unit) = unit_orbits(g);
    let mut pairs: Vec<(ElemId, ElemId)> = Vec::new();
    for orbit in &orbits {
        for &u in orbit {
            for &v in orbit {
                pairs.push((u, v));
            }
        }
    }
    let index: HashMap<(ElemId, ElemId), ElemId> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let n = pairs.len();
    let mut mult = vec![NONE; n * n];
    for (i, &(u, v)) in pairs.iter().enumerate() {
        for (j, &(v2, w)) in pairs.iter().enumerate() {
            if v == v2 {
                mult[i * n + j] = index[&(u, w)] as u32;
            }
        }
    }
    let names = pairs.iter().map(|&(u, v)| format!("({},{})", g.name(u), g.name(v))).collect();
    let r = pairs.iter().map(|&(u, _)| index[&(u, u)]).collect();
    let s = pairs.iter().map(|&(_, v)| index[&(v, v)]).collect();
    let inv = pairs.iter().map(|&(u, v)| index[&(v, u)]).collect();
    let units = g.units().iter().map(|&u| index[&(u, u)]).collect();
    let orbit_groupoid = FiniteGroupoid::assemble(names, units, r, s, inv, mult);
    let projection = g.elements().map(|x| index[&(g.range(x), g.source(x))]).collect();
    OrbitStructure { orbits, orbit_of_unit, orbit_groupoid, projection }
}

/// `G|_Y = r^-1(Y)` for a set `Y` of units closed under the orbit relation.
pub fn restriction(g: &FiniteGroupoid, y: &[ElemId]) -> Result<Embedded> {
    let mut in_y = vec![false; g.len()];
    for &u in y {
        if u >= g.len() || !g.is_unit(u) {
            return Err(Error::InvalidParameter(format!("{u} is not a unit")));
        }
        in_y[u] = true;
    }
    if let Some(x) = g.elements().find(|&x| in_y[g.range(x)] != in_y[g.source(x)]) {
        return Err(Error::NotInvariant { element: x });
    }
    let elems: Vec<ElemId> = g.elements().filter(|&x| in_y[g.range(x)]).collect();
    subgroupoid(g, &elems)
}

/// The imprimitivity groupoid `G^H` of the right `H`-space `X = s^-1(H0)`, where `h`
/// lists the ambient ids of a subgroupoid `H`.
pub fn imprimitivity_groupoid(g: &FiniteGroupoid, h: &[ElemId]) -> Result<ImprimitivityGroupoid> {
    let sub = subgroupoid(g, h)?;
    let h_units: Vec<ElemId> = sub.groupoid.units().iter().map(|&k| sub.inclusion[k]).collect();
    let mut in_h0 = vec![false; g.len()];
    for &u in &h_units {
        in_h0[u] = true;
    }
    let x_space: Vec<ElemId> = g.elements().filter(|&x| in_h0[g.source(x)]).collect();
    let h_at = |u: ElemId| -> Vec<ElemId> {
        sub.groupoid
            .range_fiber(sub.local(u).expect("unit of H"))
            .iter()
            .map(|&k| sub.inclusion[k])
            .collect()
    };
    // canonical representative of [x, y]: minimise x over the H-orbit
    let mut class_index: HashMap<(ElemId, ElemId), usize> = HashMap::new();
    let mut classes: Vec<(ElemId, ElemId)> = Vec::new();
    for &x in &x_space {
        for &y in &x_space {
            if g.source(x) != g.source(y) || class_index.contains_key(&(x, y)) {
                continue;
            }
            let k = classes.len();
            for eta in h_at(g.source(x)) {
                let pair = (g.mul_unchecked(x, eta), g.mul_unchecked(y, eta));
                class_index.insert(pair, k);
            }
            classes.push((x, y));
        }
    }
    let n = classes.len();
    let cls = |x: ElemId, y: ElemId| class_index[&(x, y)];
    let mut names = Vec::with_capacity(n);
    let (mut range, mut source, mut inverse) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let mut units = Vec::new();
    for (k, &(x, y)) in classes.iter().enumerate() {
        names.push(format!("[{},{}]", g.name(x), g.name(y)));
        range.push(cls(x, x));
        source.push(cls(y, y));
        inverse.push(cls(y, x));
        if cls(x, x) == k {
            units.push(k);
        }
    }
    // [x,y][w,z] is defined when [y] = [w] in X/H; then w = y eta and [w,z] = [y, z eta^-1]
    let mut mult = vec![NONE; n * n];
    for (i, &(x, y)) in classes.iter().enumerate() {
        for (j, &(w, z)) in classes.iter().enumerate() {
            if source[i] != range[j] {
                continue;
            }
            let eta = g.mul_unchecked(g.inverse(y), w);
            let z2 = g.mul_unchecked(z, g.inverse(eta));
            mult[i * n + j] = cls(x, z2) as u32;
        }
    }
    let to_ambient = classes.iter().map(|&(x, y)| g.mul_unchecked(x, g.inverse(y))).collect();
    let groupoid = FiniteGroupoid::assemble(names, units, range, source, inverse, mult);
    Ok(ImprimitivityGroupoid { groupoid, classes, to_ambient })
}

pub fn structural_queries(g: &FiniteGroupoid) -> StructuralFlags {
    let (orbits, _) = unit_orbits(g);
    let stab = stabilizer_subgroupoid(g);
    StructuralFlags {
        is_transitive: orbits.len() == 1,
        is_principal: stab.fibers.iter().all(|f| f.elements.len() == 1),
        has_abelian_isotropy: stab.fibers.iter().all(|f| f.group.is_abelian()),
        is_group_bundle: g.elements().all(|x| g.range(x) == g.source(x)),
    }
}

/// Exhaustive check that `phi: G -> H` maps composable pairs to composable pairs and preserves products.
pub fn check_homomorphism(g: &FiniteGroupoid, h: &FiniteGroupoid, phi: &[ElemId]) -> HomomorphismReport {
    if phi.len() != g.len() || phi.iter().any(|&x| x >= h.len()) {
        return HomomorphismReport { is_homomorphism: false, violations: Vec::new() };
    }
    let mut violations = Vec::new();
    for a in g.elements() {
        for b in g.elements() {
            let Some(ab) = g.mul(a, b) else { continue };
            if h.mul(phi[a], phi[b]) != Some(phi[ab]) {
                violations.push((a, b));
            }
        }
    }
    HomomorphismReport { is_homomorphism: violations.is_empty(), violations }
}

fn invariants(g: &FiniteGroupoid) -> Vec<(bool, bool, usize, usize, usize, usize)> {
    g.elements()
        .map(|x| {
            let r = g.range(x);
            let iso = g.isotropy(r).len();
            let order = if r == g.source(x) {
                let mut k = 1;
                let mut y = x;
                while y != r {
                    y = g.mul_unchecked(y, x);
                    k += 1;
                }
                k
            } else {
                0
            };
            (g.is_unit(x), r == g.source(x), iso, order, g.range_fiber(r).len(), g.source_fiber(g.source(x)).len())
        })
        .collect()
}

/// Backtracking search for an isomorphism `G -> H`, propagating forced products.
pub fn find_isomorphism(g: &FiniteGroupoid, h: &FiniteGroupoid) -> Option<Vec<ElemId>> {
    if g.len() != h.len() || g.units().len() != h.units().len() {
        return None;
    }
    let (ig, ih) = (invariants(g), invariants(h));
    let mut sg = ig.clone();
    let mut sh = ih.clone();
    sg.sort_unstable();
    sh.sort_unstable();
    if sg != sh {
        return None;
    }
    let n = g.len();
    let mut order: Vec<ElemId> = g.units().to_vec();
    order.extend(g.elements().filter(|&x| !g.is_unit(x)));
    let state = Assignment { phi: vec![usize::MAX; n], used: vec![false; n] };
    search(g, h, &ig, &ih, &order, state)
}

#[derive(Clone)]
struct Assignment {
    phi: Vec<usize>,
    used: Vec<bool>,
}

type Inv = (bool, bool, usize, usize, usize, usize);

fn search(
    g: &FiniteGroupoid,
    h: &FiniteGroupoid,
    ig: &[Inv],
    ih: &[Inv],
    order: &[ElemId],
    state: Assignment,
) -> Option<Vec<ElemId>> {
    let Some(&a) = order.iter().find(|&&a| state.phi[a] == usize::MAX) else {
        return Some(state.phi);
    };
    for b in h.elements() {
        if state.used[b] || ig[a] != ih[b] {
            continue;
        }
        let mut next = state.clone();
        if assign(g, h, ig, ih, &mut next, a, b) {
            if let Some(phi) = search(g, h, ig, ih, order, next) {
                return Some(phi);
            }
        }
    }
    None
}

fn assign(g: &FiniteGroupoid, h: &FiniteGroupoid, ig: &[Inv], ih: &[Inv], st: &mut Assignment, a: ElemId, b: ElemId) -> bool {
    let mut queue = vec![(a, b)];
    while let Some((a, b)) = queue.pop() {
        if st.phi[a] != usize::MAX {
            if st.phi[a] != b {
                return false;
            }
            continue;
        }
        if st.used[b] || ig[a] != ih[b] {
            return false;
        }
        st.phi[a] = b;
        st.used[b] = true;
        queue.push((g.range(a), h.range(b)));
        queue.push((g.source(a), h.source(b)));
        queue.push((g.inverse(a), h.inverse(b)));
        for c in g.elements() {
            let pc = st.phi[c];
            if pc == usize::MAX {
                continue;
            }
            for (x, y, px, py) in [(a, c, b, pc), (c, a, pc, b)] {
                match (g.mul(x, y), h.mul(px, py)) {
                    (Some(xy), Some(pxy)) => queue.push((xy, pxy)),
                    (None, None) => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{validate, GroupoidActionOnSet};

    fn z(m: usize) -> GroupTable {
        GroupTable::cyclic(m).unwrap()
    }

    fn ab() -> Vec<String> {
        vec!["a".into(), "b".into()]
    }

    fn swap() -> FiniteGroupoid {
        let act = GroupoidActionOnSet::from_permutations(&z(2), ab(), vec![vec![0, 1], vec![1, 0]]).unwrap();
        FiniteGroupoid::transformation_groupoid(&act)
    }

    fn trivial_z2() -> FiniteGroupoid {
        let act = GroupoidActionOnSet::from_permutations(&z(2), ab(), vec![vec![0, 1], vec![0, 1]]).unwrap();
        FiniteGroupoid::transformation_groupoid(&act)
    }

    fn union() -> FiniteGroupoid {
        FiniteGroupoid::disjoint_union(&[&FiniteGroupoid::pair_groupoid(2).unwrap(), &FiniteGroupoid::from_group(&z(3))])
    }

    #[test]
    fn stabilizers() {
        let p3 = FiniteGroupoid::pair_groupoid(3).unwrap();
        let s = stabilizer_subgroupoid(&p3);
        assert_eq!(s.embedded.inclusion, p3.units().to_vec());
        let g4 = FiniteGroupoid::from_group(&z(4));
        assert_eq!(stabilizer_subgroupoid(&g4).embedded.groupoid.len(), 4);
        let t = trivial_z2();
        let s = stabilizer_subgroupoid(&t);
        assert_eq!(s.embedded.groupoid.len(), 4);
        assert!(s.fibers.iter().all(|f| f.group.order() == 2));
        assert!(validate(&s.embedded.groupoid.table()).is_valid());
        assert!(structural_queries(&s.embedded.groupoid).is_group_bundle);
    }

    #[test]
    fn orbits() {
        let p3 = FiniteGroupoid::pair_groupoid(3).unwrap();
        let o = orbit_structure(&p3);
        assert_eq!(o.orbits.len(), 1);
        assert!(is_bijection(&o.projection, o.orbit_groupoid.len()));
        assert!(check_homomorphism(&p3, &o.orbit_groupoid, &o.projection).is_homomorphism);

        let o = orbit_structure(&trivial_z2());
        assert_eq!(o.orbits.len(), 2);
        assert_eq!(o.orbit_groupoid.len(), 2);

        let u = union();
        let o = orbit_structure(&u);
        assert_eq!(o.orbits.len(), 2);
        assert_eq!(o.orbit_groupoid.len(), 5);
        assert!(validate(&o.orbit_groupoid.table()).is_valid());
        assert!(check_homomorphism(&u, &o.orbit_groupoid, &o.projection).is_homomorphism);
    }

    #[test]
    fn restrictions() {
        let t = trivial_z2();
        let all = restriction(&t, t.units()).unwrap();
        assert_eq!(all.groupoid, t);
        let a = restriction(&t, &[t.units()[0]]).unwrap();
        assert_eq!(a.groupoid.len(), 2);
        assert!(find_isomorphism(&a.groupoid, &FiniteGroupoid::from_group(&z(2))).is_some());

        let u = union();
        let pair_units: Vec<ElemId> = u.units().iter().copied().filter(|&x| u.range_fiber(x).len() == 2).collect();
        let r = restriction(&u, &pair_units).unwrap();
        assert!(find_isomorphism(&r.groupoid, &FiniteGroupoid::pair_groupoid(2).unwrap()).is_some());

        let s = swap();
        match restriction(&s, &[s.units()[0]]) {
            Err(Error::NotInvariant { element }) => assert!(!s.is_unit(element)),
            other => panic!("expected NotInvariant, got {other:?}"),
        }
    }

    #[test]
    fn imprimitivity() {
        // H = G for a group: one unit class, G^G = G
        let g = FiniteGroupoid::from_group(&GroupTable::symmetric(3).unwrap());
        let all: Vec<ElemId> = g.elements().collect();
        let gg = imprimitivity_groupoid(&g, &all).unwrap();
        assert_eq!(gg.groupoid.units().len(), 1);
        assert!(validate(&gg.groupoid.table()).is_valid());
        assert!(check_homomorphism(&gg.groupoid, &g, &gg.to_ambient).is_homomorphism);
        assert!(is_bijection(&gg.to_ambient, g.len()));

        // H a single unit of the pair groupoid
        let p2 = FiniteGroupoid::pair_groupoid(2).unwrap();
        let gh = imprimitivity_groupoid(&p2, &[p2.units()[0]]).unwrap();
        assert!(is_bijection(&gh.to_ambient, 4));
        assert!(check_homomorphism(&gh.groupoid, &p2, &gh.to_ambient).is_homomorphism);
        // H all units: trivial action, X*X fibred over s
        let gh = imprimitivity_groupoid(&p2, p2.units()).unwrap();
        assert_eq!(gh.groupoid.len(), 8);
        assert!(validate(&gh.groupoid.table()).is_valid());

        let s = swap();
        let a = s.units()[0];
        let gh = imprimitivity_groupoid(&s, &[a]).unwrap();
        assert!(is_bijection(&gh.to_ambient, s.len()));
        assert!(check_homomorphism(&gh.groupoid, &s, &gh.to_ambient).is_homomorphism);

        let non = s.elements().find(|&x| !s.is_unit(x)).unwrap();
        assert!(matches!(imprimitivity_groupoid(&s, &[non]), Err(Error::NotSubgroupoid(_))));
    }

    #[test]
    fn flags() {
        let f = structural_queries(&FiniteGroupoid::pair_groupoid(4).unwrap());
        assert!(f.is_transitive && f.is_principal);
        let f = structural_queries(&FiniteGroupoid::from_group(&GroupTable::symmetric(3).unwrap()));
        assert!(f.is_transitive && !f.has_abelian_isotropy);
        let b = FiniteGroupoid::group_bundle(&ab(), &[z(2), z(2)]).unwrap();
        let f = structural_queries(&b);
        assert!(f.is_group_bundle && f.has_abelian_isotropy && !f.is_transitive);
    }

    #[test]
    fn homomorphisms() {
        let g4 = FiniteGroupoid::from_group(&z(4));
        let id: Vec<ElemId> = g4.elements().collect();
        assert!(check_homomorphism(&g4, &g4, &id).is_homomorphism);
        let g2 = FiniteGroupoid::from_group(&z(2));
        let parity: Vec<ElemId> = (0..4).map(|k| k % 2).collect();
        assert!(check_homomorphism(&g4, &g2, &parity).is_homomorphism);
        let bad: Vec<ElemId> = vec![0, 1, 1, 0];
        let rep = check_homomorphism(&g4, &g2, &bad);
        assert!(!rep.is_homomorphism && !rep.violations.is_empty());
    }

    #[test]
    fn isomorphism_search() {
        let b = FiniteGroupoid::group_bundle(&["p".into(), "q".into(), "r".into()], &[z(2), z(2), z(2)]).unwrap();
        let prod = FiniteGroupoid::product(&FiniteGroupoid::cotrivial(3).unwrap(), &FiniteGroupoid::from_group(&z(2)));
        let phi = find_isomorphism(&b, &prod).unwrap();
        assert!(is_bijection(&phi, b.len()));
        assert!(check_homomorphism(&b, &prod, &phi).is_homomorphism);

        let z4 = FiniteGroupoid::from_group(&z(4));
        let v4 = FiniteGroupoid::from_group(&GroupTable::abelian(&[2, 2]).unwrap());
        assert!(find_isomorphism(&z4, &v4).is_none());

        let p = FiniteGroupoid::pair_groupoid(4).unwrap();
        let q = p.permuted(&[15, 3, 7, 1, 0, 2, 4, 5, 6, 8, 9, 10, 11, 12, 13, 14]).unwrap();
        assert!(find_isomorphism(&p, &q).is_some());
    }
}
