use serde::{Deserialize, Serialize};

use super::{ElemId, FiniteGroupoid, NONE};
use crate::error::{Error, Result};
use crate::groups::GroupTable;

/// Left action of a finite groupoid on a finite set `X` with anchor map `X -> G0`.
///
/// `act(g, x)` is defined exactly when `source(g) = anchor(x)`.
#[derive(Clone, Debug)]
pub struct GroupoidActionOnSet {
    groupoid: FiniteGroupoid,
    points: Vec<String>,
    anchor: Vec<ElemId>,
    act: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionViolation {
    AnchorNotUnit { point: usize },
    Definedness { element: ElemId, point: usize },
    AnchorOfImage { element: ElemId, point: usize },
    UnitNotIdentity { point: usize },
    Composition { left: ElemId, right: ElemId, point: usize },
}

impl GroupoidActionOnSet {
    /// `table[g][x]` is `Some(g.x)` where defined.
    pub fn new(
        groupoid: FiniteGroupoid,
        points: Vec<String>,
        anchor: Vec<ElemId>,
        table: Vec<Vec<Option<usize>>>,
    ) -> Result<Self> {
        let np = points.len();
        if anchor.len() != np || table.len() != groupoid.len() || table.iter().any(|r| r.len() != np) {
            return Err(Error::InvalidAction("table shape does not match |G| x |X|".into()));
        }
        let mut act = vec![NONE; groupoid.len() * np];
        for (g, row) in table.iter().enumerate() {
            for (x, y) in row.iter().enumerate() {
                if let Some(y) = *y {
                    if y >= np {
                        return Err(Error::InvalidAction(format!("image {y} out of range")));
                    }
                    act[g * np + x] = y as u32;
                }
            }
        }
        if anchor.iter().any(|&a| a >= groupoid.len()) {
            return Err(Error::InvalidAction("anchor id out of range".into()));
        }
        let action = GroupoidActionOnSet { groupoid, points, anchor, act };
        let violations = action.violations();
        if let Some(v) = violations.first() {
            return Err(Error::InvalidAction(format!("{v:?} ({} violations)", violations.len())));
        }
        Ok(action)
    }

    /// A group action given as one permutation of the points per group element.
    pub fn from_permutations(group: &GroupTable, points: Vec<String>, perms: Vec<Vec<usize>>) -> Result<Self> {
        let gpd = FiniteGroupoid::from_group(group);
        if perms.len() != group.order() {
            return Err(Error::InvalidAction("one permutation per group element expected".into()));
        }
        let e = gpd.units()[0];
        let anchor = vec![e; points.len()];
        let table = perms.into_iter().map(|p| p.into_iter().map(Some).collect()).collect();
        Self::new(gpd, points, anchor, table)
    }

    /// Action of `group` on the left cosets `gK` of the subgroup generated by `subgroup_gens`.
    pub fn coset_action(group: &GroupTable, subgroup_gens: &[usize]) -> Result<Self> {
        let k = group.generated_subgroup(subgroup_gens);
        let mut cosets: Vec<Vec<usize>> = Vec::new();
        let mut coset_of = vec![usize::MAX; group.order()];
        for g in 0..group.order() {
            if coset_of[g] != usize::MAX {
                continue;
            }
            let mut c: Vec<usize> = k.iter().map(|&h| group.mul(g, h)).collect();
            c.sort_unstable();
            for &x in &c {
                coset_of[x] = cosets.len();
            }
            cosets.push(c);
        }
        let perms = (0..group.order())
            .map(|g| cosets.iter().map(|c| coset_of[group.mul(g, c[0])]).collect())
            .collect();
        let points = cosets.iter().map(|c| format!("{}K", group.names()[c[0]])).collect();
        Self::from_permutations(group, points, perms)
    }

    /// `G` acting on itself by left multiplication, anchored by the range map.
    pub fn left_translation(g: &FiniteGroupoid) -> Self {
        let n = g.len();
        let mut act = vec![NONE; n * n];
        for a in 0..n {
            for x in 0..n {
                if let Some(y) = g.mul(a, x) {
                    act[a * n + x] = y as u32;
                }
            }
        }
        GroupoidActionOnSet {
            groupoid: g.clone(),
            points: g.names().to_vec(),
            anchor: (0..n).map(|x| g.range(x)).collect(),
            act,
        }
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.groupoid
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn anchor(&self, x: usize) -> ElemId {
        self.anchor[x]
    }

    pub fn act(&self, g: ElemId, x: usize) -> Option<usize> {
        let y = self.act[g * self.points.len() + x];
        (y != NONE).then_some(y as usize)
    }

    /// Exhaustive check of the left action axioms.
    pub fn violations(&self) -> Vec<ActionViolation> {
        let g = &self.groupoid;
        let np = self.points.len();
        let mut out = Vec::new();
        for x in 0..np {
            if !g.is_unit(self.anchor[x]) {
                out.push(ActionViolation::AnchorNotUnit { point: x });
                return out;
            }
        }
        for a in g.elements() {
            for x in 0..np {
                let defined = self.act(a, x).is_some();
                if defined != (g.source(a) == self.anchor[x]) {
                    out.push(ActionViolation::Definedness { element: a, point: x });
                } else if let Some(y) = self.act(a, x) {
                    if self.anchor[y] != g.range(a) {
                        out.push(ActionViolation::AnchorOfImage { element: a, point: x });
                    }
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for x in 0..np {
            if self.act(self.anchor[x], x) != Some(x) {
                out.push(ActionViolation::UnitNotIdentity { point: x });
            }
        }
        for a in g.elements() {
            for b in g.elements() {
                let Some(ab) = g.mul(a, b) else { continue };
                for x in 0..np {
                    let Some(bx) = self.act(b, x) else { continue };
                    if self.act(a, bx) != self.act(ab, x) {
                        out.push(ActionViolation::Composition { left: a, right: b, point: x });
                    }
                }
            }
        }
        out
    }
}
