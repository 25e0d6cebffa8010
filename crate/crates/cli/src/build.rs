//! Turns parsed input documents into library objects, resolving every name.

use std::collections::HashMap;

use gcstar::crossed::DynamicalSystem;
use gcstar::groupoid::{GroupoidActionOnSet, HaarWeights};
use gcstar::linalg::{c, identity, ComplexMatrix};
use gcstar::{FiniteGroupoid, GroupTable, GroupoidTable};

use crate::error::{CliError, Context};
use crate::spec::{escape, ActionSpec, Constructor, GroupoidSpec, MatrixSpec, SystemSpec, TableSpec};

/// Raw tables with names resolved; weights by unit id, when given.
pub struct ResolvedTable {
    pub table: GroupoidTable,
    pub weights: Option<Vec<(usize, f64)>>,
}

pub fn resolve_table(t: &TableSpec, ptr: &str) -> Result<ResolvedTable, CliError> {
    let mut index = HashMap::new();
    for (i, name) in t.elements.iter().enumerate() {
        if index.insert(name.as_str(), i).is_some() {
            return Err(CliError::schema(&format!("{ptr}/elements/{i}"), format!("duplicate element {name:?}")));
        }
    }
    let lookup = |name: &str, at: String| {
        index.get(name).copied().ok_or_else(|| CliError::schema(&at, format!("unknown element {name:?}")))
    };
    let units = t
        .units
        .iter()
        .enumerate()
        .map(|(i, u)| lookup(u, format!("{ptr}/units/{i}")))
        .collect::<Result<Vec<_>, _>>()?;
    let map = |which: &str, m: &std::collections::BTreeMap<String, String>| -> Result<Vec<usize>, CliError> {
        let mut out = vec![usize::MAX; t.elements.len()];
        for (k, v) in m {
            let at = format!("{ptr}/{which}/{}", escape(k));
            let key = lookup(k, at.clone())?;
            out[key] = lookup(v, at)?;
        }
        if let Some(missing) = out.iter().position(|&x| x == usize::MAX) {
            return Err(CliError::schema(
                &format!("{ptr}/{which}"),
                format!("no entry for element {:?}", t.elements[missing]),
            ));
        }
        Ok(out)
    };
    let range = map("range", &t.range)?;
    let source = map("source", &t.source)?;
    let inverse = map("inverse", &t.inverse)?;
    let mut mult = Vec::with_capacity(t.mult.len());
    for (i, [a, b, ab]) in t.mult.iter().enumerate() {
        let at = |j: usize| format!("{ptr}/mult/{i}/{j}");
        mult.push((lookup(a, at(0))?, lookup(b, at(1))?, lookup(ab, at(2))?));
    }
    let weights = match &t.weights {
        None => None,
        Some(w) => Some(
            w.iter()
                .map(|(u, &x)| {
                    let at = format!("{ptr}/weights/{}", escape(u));
                    let id = lookup(u, at.clone())?;
                    if !units.contains(&id) {
                        return Err(CliError::schema(&at, format!("{u:?} is not a unit")));
                    }
                    Ok((id, x))
                })
                .collect::<Result<_, _>>()?,
        ),
    };
    Ok(ResolvedTable { table: GroupoidTable { names: t.elements.clone(), units, range, source, inverse, mult }, weights })
}

pub fn build_groupoid(spec: &GroupoidSpec, ptr: &str) -> Result<FiniteGroupoid, CliError> {
    match spec {
        GroupoidSpec::GroupoidTable(t) => {
            let r = resolve_table(t, ptr)?;
            let g = FiniteGroupoid::from_table(&r.table).context(format!("groupoid at {}", display_ptr(ptr)))?;
            match r.weights {
                None => Ok(g),
                Some(w) => {
                    let mut by_pos = vec![1.0; g.units().len()];
                    for (u, x) in w {
                        by_pos[g.unit_pos(u)] = x;
                    }
                    let weights = HaarWeights::new(by_pos).context("Haar weights")?;
                    g.with_weights(weights).context("Haar weights")
                }
            }
        }
        GroupoidSpec::Constructor(c) => build_constructor(c, ptr),
    }
}

fn display_ptr(ptr: &str) -> &str {
    if ptr.is_empty() {
        "/"
    } else {
        ptr
    }
}

/// `Some` for the group-valued constructors.
pub fn build_group(c: &Constructor, ptr: &str) -> Result<Option<GroupTable>, CliError> {
    let at = display_ptr(ptr);
    Ok(Some(match c {
        Constructor::Cyclic { order } => GroupTable::cyclic(*order).context(at)?,
        Constructor::Dihedral { n } => GroupTable::dihedral(*n).context(at)?,
        Constructor::Symmetric { n } => GroupTable::symmetric(*n).context(at)?,
        Constructor::Abelian { factors } => GroupTable::abelian(factors).context(at)?,
        Constructor::Group { table } => GroupTable::new(table.clone()).context(at)?,
        _ => return Ok(None),
    }))
}

fn require_group(c: &Constructor, ptr: &str) -> Result<GroupTable, CliError> {
    build_group(c, ptr)?.ok_or_else(|| CliError::schema(ptr, "expected a group constructor"))
}

pub fn build_constructor(c: &Constructor, ptr: &str) -> Result<FiniteGroupoid, CliError> {
    if let Some(group) = build_group(c, ptr)? {
        return Ok(FiniteGroupoid::from_group(&group));
    }
    let at = display_ptr(ptr);
    match c {
        Constructor::Pair { n } => FiniteGroupoid::pair_groupoid(*n).context(at),
        Constructor::Cotrivial { n } => FiniteGroupoid::cotrivial(*n).context(at),
        Constructor::GroupBundle { base, fibers } => {
            let groups = fibers
                .iter()
                .enumerate()
                .map(|(i, f)| require_group(f, &format!("{ptr}/fibers/{i}")))
                .collect::<Result<Vec<_>, _>>()?;
            FiniteGroupoid::group_bundle(base, &groups).context(at)
        }
        Constructor::Transformation { group, action } => {
            let group = require_group(group, &format!("{ptr}/group"))?;
            let act = match action {
                ActionSpec::Cosets { generators } => {
                    if let Some(i) = generators.iter().position(|&g| g >= group.order()) {
                        return Err(CliError::schema(&format!("{ptr}/action/generators/{i}"), "not a group element"));
                    }
                    GroupoidActionOnSet::coset_action(&group, generators)
                }
                ActionSpec::Permutations { points, permutations } => {
                    GroupoidActionOnSet::from_permutations(&group, points.clone(), permutations.clone())
                }
            }
            .context(format!("action at {ptr}/action"))?;
            Ok(FiniteGroupoid::transformation_groupoid(&act))
        }
        Constructor::DisjointUnion { parts } => {
            if parts.is_empty() {
                return Err(CliError::schema(&format!("{ptr}/parts"), "at least one part required"));
            }
            let built = parts
                .iter()
                .enumerate()
                .map(|(i, p)| build_groupoid(p, &format!("{ptr}/parts/{i}")))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(FiniteGroupoid::disjoint_union(&built.iter().collect::<Vec<_>>()))
        }
        Constructor::Product { left, right } => {
            let l = build_groupoid(left, &format!("{ptr}/left"))?;
            let r = build_groupoid(right, &format!("{ptr}/right"))?;
            Ok(FiniteGroupoid::product(&l, &r))
        }
        _ => unreachable!("group constructors handled above"),
    }
}

/// Groupoid, fiber dimensions by unit position and one matrix per element, not yet validated.
pub struct RawSystem {
    pub groupoid: FiniteGroupoid,
    pub dims: Vec<usize>,
    pub unitaries: Vec<ComplexMatrix>,
}

impl RawSystem {
    pub fn into_system(self) -> Result<DynamicalSystem, CliError> {
        DynamicalSystem::new(self.groupoid, self.dims, self.unitaries).context("dynamical system")
    }
}

fn matrix(m: &MatrixSpec, ptr: &str) -> Result<ComplexMatrix, CliError> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if let Some(i) = m.iter().position(|r| r.len() != cols) {
        return Err(CliError::schema(&format!("{ptr}/{i}"), format!("row length differs from {cols}")));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| c(m[i][j][0], m[i][j][1])))
}

pub fn build_system(s: &SystemSpec) -> Result<RawSystem, CliError> {
    let g = build_groupoid(&s.groupoid, "/groupoid")?;
    let mut dims = vec![1; g.units().len()];
    for (name, &d) in &s.fibers {
        let at = format!("/fibers/{}", escape(name));
        match g.find(name) {
            Some(u) if g.is_unit(u) => dims[g.unit_pos(u)] = d,
            Some(_) => return Err(CliError::schema(&at, format!("{name:?} is not a unit"))),
            None => return Err(CliError::schema(&at, format!("unknown unit {name:?}"))),
        }
    }
    let mut unitaries: Vec<Option<ComplexMatrix>> = vec![None; g.len()];
    for (name, m) in &s.unitaries {
        let at = format!("/unitaries/{}", escape(name));
        let x = g.find(name).ok_or_else(|| CliError::schema(&at, format!("unknown element {name:?}")))?;
        unitaries[x] = Some(matrix(m, &at)?);
    }
    let unitaries = unitaries
        .into_iter()
        .enumerate()
        .map(|(x, u)| u.unwrap_or_else(|| identity(dims[g.unit_pos(g.source(x))])))
        .collect();
    Ok(RawSystem { groupoid: g, dims, unitaries })
}
