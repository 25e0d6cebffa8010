use super::{ElemId, FiniteGroupoid, GroupoidActionOnSet, NONE};
use crate::error::{Error, Result};
use crate::groups::GroupTable;

fn build(
    names: Vec<String>,
    units: Vec<ElemId>,
    range: Vec<ElemId>,
    source: Vec<ElemId>,
    inverse: Vec<ElemId>,
    mul: impl Fn(ElemId, ElemId) -> ElemId,
) -> FiniteGroupoid {
    let n = names.len();
    let mut mult = vec![NONE; n * n];
    for a in 0..n {
        for b in 0..n {
            if source[a] == range[b] {
                mult[a * n + b] = mul(a, b) as u32;
            }
        }
    }
    FiniteGroupoid::assemble(names, units, range, source, inverse, mult)
}

impl FiniteGroupoid {
    /// A group viewed as a groupoid with a single unit (its identity).
    pub fn from_group(group: &GroupTable) -> Self {
        let n = group.order();
        let e = group.identity();
        build(
            group.names().to_vec(),
            vec![e],
            vec![e; n],
            vec![e; n],
            (0..n).map(|g| group.inv(g)).collect(),
            |a, b| group.mul(a, b),
        )
    }

    /// Validates `table` as a group and returns it as a one-unit groupoid.
    pub fn from_group_table(table: Vec<Vec<usize>>) -> Result<Self> {
        Ok(Self::from_group(&GroupTable::new(table)?))
    }

    /// The pair groupoid on `{1..n}`: elements `(x, y)` with `(x, y)(y, z) = (x, z)`.
    pub fn pair_groupoid(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("pair groupoid needs n >= 1".into()));
        }
        let id = |x: usize, y: usize| x * n + y;
        let names = (0..n * n).map(|k| format!("({},{})", k / n + 1, k % n + 1)).collect();
        Ok(build(
            names,
            (0..n).map(|x| id(x, x)).collect(),
            (0..n * n).map(|k| id(k / n, k / n)).collect(),
            (0..n * n).map(|k| id(k % n, k % n)).collect(),
            (0..n * n).map(|k| id(k % n, k / n)).collect(),
            |a, b| id(a / n, b % n),
        ))
    }

    /// `n` units and nothing else.
    pub fn cotrivial(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("cotrivial groupoid needs n >= 1".into()));
        }
        let ids: Vec<ElemId> = (0..n).collect();
        Ok(build(
            (1..=n).map(|k| k.to_string()).collect(),
            ids.clone(),
            ids.clone(),
            ids.clone(),
            ids,
            |a, _| a,
        ))
    }

    /// Disjoint union of groups over the named base points.
    pub fn group_bundle(base: &[String], fibers: &[GroupTable]) -> Result<Self> {
        if base.len() != fibers.len() || base.is_empty() {
            return Err(Error::InvalidParameter("one fiber group per base point required".into()));
        }
        let parts: Vec<FiniteGroupoid> = base
            .iter()
            .zip(fibers)
            .map(|(p, g)| {
                let names = g.names().iter().map(|n| format!("{n}@{p}")).collect();
                FiniteGroupoid::from_group(&g.clone().with_names(names).expect("same length"))
            })
            .collect();
        Ok(Self::disjoint_union(&parts.iter().collect::<Vec<_>>()))
    }

    /// Transformation groupoid `G x| X`: elements `(g, x)` with `range(g) = anchor(x)`,
    /// `range(g, x) = x`, `source(g, x) = g^-1 . x` and `(g, x)(h, g^-1 . x) = (gh, x)`.
    pub fn transformation_groupoid(action: &GroupoidActionOnSet) -> Self {
        let g = action.groupoid();
        let np = action.num_points();
        let mut pairs: Vec<(ElemId, usize)> = Vec::new();
        for x in 0..np {
            for &a in g.range_fiber(action.anchor(x)) {
                pairs.push((a, x));
            }
        }
        let index: std::collections::HashMap<(ElemId, usize), ElemId> =
            pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let at = |a: ElemId, x: usize| index[&(a, x)];
        let act_inv = |a: ElemId, x: usize| action.act(g.inverse(a), x).expect("anchored");
        let names = pairs
            .iter()
            .map(|&(a, x)| format!("({},{})", g.name(a), action.points()[x]))
            .collect();
        let unit_of = |x: usize| at(action.anchor(x), x);
        build(
            names,
            (0..np).map(unit_of).collect(),
            pairs.iter().map(|&(_, x)| unit_of(x)).collect(),
            pairs.iter().map(|&(a, x)| unit_of(act_inv(a, x))).collect(),
            pairs.iter().map(|&(a, x)| at(g.inverse(a), act_inv(a, x))).collect(),
            |p, q| {
                let (a, x) = pairs[p];
                let (b, _) = pairs[q];
                at(g.mul_unchecked(a, b), x)
            },
        )
    }

    /// Disjoint union; element ids are concatenated in argument order.
    pub fn disjoint_union(parts: &[&FiniteGroupoid]) -> Self {
        let mut offsets = Vec::with_capacity(parts.len());
        let mut total = 0;
        for p in parts {
            offsets.push(total);
            total += p.len();
        }
        let locate = |g: ElemId| {
            let k = offsets.partition_point(|&o| o <= g) - 1;
            (k, g - offsets[k])
        };
        let mut names = Vec::with_capacity(total);
        let (mut units, mut range, mut source, mut inverse) = (vec![], vec![], vec![], vec![]);
        for (k, p) in parts.iter().enumerate() {
            let o = offsets[k];
            names.extend(p.names().iter().cloned());
            units.extend(p.units().iter().map(|u| u + o));
            range.extend(p.elements().map(|g| p.range(g) + o));
            source.extend(p.elements().map(|g| p.source(g) + o));
            inverse.extend(p.elements().map(|g| p.inverse(g) + o));
        }
        // disambiguate duplicated names across components
        let mut seen = std::collections::HashSet::new();
        let dup = names.iter().any(|n| !seen.insert(n.clone()));
        if dup {
            for (g, name) in names.iter_mut().enumerate() {
                *name = format!("{name}#{}", locate(g).0);
            }
        }
        build(names, units, range, source, inverse, |a, b| {
            let (k, la) = locate(a);
            let (_, lb) = locate(b);
            parts[k].mul_unchecked(la, lb) + offsets[k]
        })
    }

    /// Direct product `G x H` with `(g, h)` encoded as `g * |H| + h`.
    pub fn product(g: &FiniteGroupoid, h: &FiniteGroupoid) -> Self {
        let m = h.len();
        let n = g.len() * m;
        let split = |x: ElemId| (x / m, x % m);
        let names = (0..n)
            .map(|x| format!("({},{})", g.name(x / m), h.name(x % m)))
            .collect();
        let mut units = Vec::new();
        for &u in g.units() {
            for &v in h.units() {
                units.push(u * m + v);
            }
        }
        build(
            names,
            units,
            (0..n).map(|x| g.range(split(x).0) * m + h.range(split(x).1)).collect(),
            (0..n).map(|x| g.source(split(x).0) * m + h.source(split(x).1)).collect(),
            (0..n).map(|x| g.inverse(split(x).0) * m + h.inverse(split(x).1)).collect(),
            |a, b| {
                let ((a1, a2), (b1, b2)) = (split(a), split(b));
                g.mul_unchecked(a1, b1) * m + h.mul_unchecked(a2, b2)
            },
        )
    }
}
