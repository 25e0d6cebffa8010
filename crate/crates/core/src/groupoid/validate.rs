use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ElemId, GroupoidTable};

/// Malformed tables: these are reported instead of axiom failures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum StructuralError {
    LengthMismatch { table: &'static str, len: usize, expected: usize },
    IdOutOfRange { table: &'static str, id: ElemId },
    ConflictingProduct { left: ElemId, right: ElemId },
}

/// One failed axiom instance, carrying every element id it involves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxiomViolation {
    /// A listed unit is not its own range, source, inverse and square.
    UnitMisbehavior { unit: ElemId },
    /// `range(g)` or `source(g)` is not in the unit set.
    EndpointNotUnit { element: ElemId, endpoint: ElemId },
    /// The product is defined exactly when `source(left) = range(right)`.
    Composability { left: ElemId, right: ElemId, defined: bool },
    /// `range(ab) = range(a)` and `source(ab) = source(b)`.
    ProductEndpoints { left: ElemId, right: ElemId, product: ElemId },
    /// `inverse(inverse(g)) = g` fails; `inverse` is `inverse(g)`.
    Involution { element: ElemId, inverse: ElemId },
    /// `g g^-1 = range(g)` or `g^-1 g = source(g)` fails.
    InverseProduct { element: ElemId, inverse: ElemId },
    /// `r(g) g = g` or `g s(g) = g` fails.
    UnitIdentity { element: ElemId },
    /// `a^-1 (a b) = b` or `(a b) b^-1 = a` fails.
    Cancellation { left: ElemId, right: ElemId },
    Associativity { a: ElemId, b: ElemId, c: ElemId },
}

impl AxiomViolation {
    pub fn elements(&self) -> Vec<ElemId> {
        use AxiomViolation::*;
        match *self {
            UnitMisbehavior { unit } => vec![unit],
            EndpointNotUnit { element, endpoint } => vec![element, endpoint],
            Composability { left, right, .. } => vec![left, right],
            ProductEndpoints { left, right, product } => vec![left, right, product],
            Involution { element, inverse } | InverseProduct { element, inverse } => vec![element, inverse],
            UnitIdentity { element } => vec![element],
            Cancellation { left, right } => vec![left, right],
            Associativity { a, b, c } => vec![a, b, c],
        }
    }

    pub fn kind(&self) -> &'static str {
        use AxiomViolation::*;
        match self {
            UnitMisbehavior { .. } => "unit",
            EndpointNotUnit { .. } => "endpoint",
            Composability { .. } => "composability",
            ProductEndpoints { .. } => "product-endpoints",
            Involution { .. } => "involution",
            InverseProduct { .. } => "inverse-product",
            UnitIdentity { .. } => "unit-identity",
            Cancellation { .. } => "cancellation",
            Associativity { .. } => "associativity",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub structural: Vec<StructuralError>,
    pub violations: Vec<AxiomViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.structural.is_empty() && self.violations.is_empty()
    }

    /// First `limit` problems, one per line.
    pub fn summary(&self, limit: usize) -> String {
        let mut lines: Vec<String> = self.structural.iter().map(|e| format!("{e:?}")).collect();
        lines.extend(self.violations.iter().map(|v| format!("{v:?}")));
        let total = lines.len();
        lines.truncate(limit);
        if total > limit {
            lines.push(format!("... {} more", total - limit));
        }
        lines.join("; ")
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary(usize::MAX))
    }
}

/// Exhaustive axiom scan. Cubic in `|G|` because of associativity.
pub fn validate(t: &GroupoidTable) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = t.names.len();
    for (table, len) in [("range", t.range.len()), ("source", t.source.len()), ("inverse", t.inverse.len())] {
        if len != n {
            report.structural.push(StructuralError::LengthMismatch { table, len, expected: n });
        }
    }
    if !report.structural.is_empty() {
        return report;
    }
    let mut check_ids = |table: &'static str, ids: &mut dyn Iterator<Item = ElemId>| {
        for id in ids {
            if id >= n {
                report.structural.push(StructuralError::IdOutOfRange { table, id });
            }
        }
    };
    check_ids("units", &mut t.units.iter().copied());
    check_ids("range", &mut t.range.iter().copied());
    check_ids("source", &mut t.source.iter().copied());
    check_ids("inverse", &mut t.inverse.iter().copied());
    check_ids("mult", &mut t.mult.iter().flat_map(|&(a, b, c)| [a, b, c]));
    if !report.structural.is_empty() {
        return report;
    }
    let mut mult: Vec<Option<ElemId>> = vec![None; n * n];
    for &(a, b, c) in &t.mult {
        match mult[a * n + b] {
            Some(prev) if prev != c => {
                report.structural.push(StructuralError::ConflictingProduct { left: a, right: b })
            }
            _ => mult[a * n + b] = Some(c),
        }
    }
    if !report.structural.is_empty() {
        return report;
    }

    let m = |a: ElemId, b: ElemId| mult[a * n + b];
    let mut is_unit = vec![false; n];
    for &u in &t.units {
        is_unit[u] = true;
    }
    let v = &mut report.violations;
    let mut units = t.units.clone();
    units.sort_unstable();
    units.dedup();
    for &u in &units {
        if t.range[u] != u || t.source[u] != u || t.inverse[u] != u || m(u, u) != Some(u) {
            v.push(AxiomViolation::UnitMisbehavior { unit: u });
        }
    }
    for g in 0..n {
        for endpoint in [t.range[g], t.source[g]] {
            if !is_unit[endpoint] {
                v.push(AxiomViolation::EndpointNotUnit { element: g, endpoint });
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            let composable = t.source[a] == t.range[b];
            match (composable, m(a, b)) {
                (true, None) => v.push(AxiomViolation::Composability { left: a, right: b, defined: false }),
                (false, Some(_)) => v.push(AxiomViolation::Composability { left: a, right: b, defined: true }),
                (true, Some(c)) => {
                    if t.range[c] != t.range[a] || t.source[c] != t.source[b] {
                        v.push(AxiomViolation::ProductEndpoints { left: a, right: b, product: c });
                    }
                }
                (false, None) => {}
            }
        }
    }
    for g in 0..n {
        let gi = t.inverse[g];
        if t.inverse[gi] != g {
            v.push(AxiomViolation::Involution { element: g, inverse: gi });
        }
        if m(g, gi) != Some(t.range[g]) || m(gi, g) != Some(t.source[g]) {
            v.push(AxiomViolation::InverseProduct { element: g, inverse: gi });
        }
        if m(t.range[g], g) != Some(g) || m(g, t.source[g]) != Some(g) {
            v.push(AxiomViolation::UnitIdentity { element: g });
        }
    }
    for a in 0..n {
        for b in 0..n {
            let Some(ab) = m(a, b) else { continue };
            if m(t.inverse[a], ab) != Some(b) || m(ab, t.inverse[b]) != Some(a) {
                v.push(AxiomViolation::Cancellation { left: a, right: b });
            }
        }
    }
    // associativity over composable triples
    let mut by_range: Vec<Vec<ElemId>> = vec![Vec::new(); n];
    for c in 0..n {
        by_range[t.range[c]].push(c);
    }
    for a in 0..n {
        for b in 0..n {
            let Some(ab) = m(a, b) else { continue };
            for &c in &by_range[t.source[b]] {
                let left = m(ab, c);
                let right = m(b, c).and_then(|bc| m(a, bc));
                if left != right || left.is_none() {
                    v.push(AxiomViolation::Associativity { a, b, c });
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::FiniteGroupoid;

    #[test]
    fn pair_groupoid_is_valid() {
        let g = FiniteGroupoid::pair_groupoid(3).unwrap();
        assert!(validate(&g.table()).is_valid());
    }

    #[test]
    fn non_composable_product_is_reported() {
        let g = FiniteGroupoid::pair_groupoid(2).unwrap();
        let mut t = g.table();
        let a = g.find("(1,2)").unwrap();
        t.mult.push((a, a, a));
        let report = validate(&t);
        assert!(report.structural.is_empty());
        assert!(report
            .violations
            .contains(&AxiomViolation::Composability { left: a, right: a, defined: true }));
    }

    #[test]
    fn structural_errors_are_separate() {
        let g = FiniteGroupoid::pair_groupoid(2).unwrap();
        let mut t = g.table();
        t.range[0] = 99;
        let report = validate(&t);
        assert_eq!(report.structural, vec![StructuralError::IdOutOfRange { table: "range", id: 99 }]);
        assert!(report.violations.is_empty());

        let mut t = g.table();
        t.inverse.pop();
        assert!(matches!(validate(&t).structural[0], StructuralError::LengthMismatch { .. }));

        let mut t = g.table();
        let (a, b, c) = t.mult[0];
        t.mult.push((a, b, (c + 1) % 4));
        assert_eq!(validate(&t).structural, vec![StructuralError::ConflictingProduct { left: a, right: b }]);
    }
}
