//! Finite groups given by multiplication tables, plus the small catalogue of
//! groups used to build corpora (cyclic, symmetric, dihedral, direct products,
//! every abelian group of a given order).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite group on `0..order` with a dense multiplication table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTable {
    order: usize,
    mult: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
    names: Vec<String>,
}

impl GroupTable {
    /// Validates a square table as a group: closure, an identity, inverses, associativity.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::NotAGroup("empty table".into()));
        }
        let mut mult = Vec::with_capacity(order * order);
        for (i, row) in table.iter().enumerate() {
            if row.len() != order {
                return Err(Error::NotAGroup(format!("row {i} has length {}, expected {order}", row.len())));
            }
            for &v in row {
                if v >= order {
                    return Err(Error::NotAGroup(format!("entry {v} in row {i} is out of range")));
                }
                mult.push(v);
            }
        }
        let at = |a: usize, b: usize| mult[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|g| at(e, g) == g && at(g, e) == g))
            .ok_or_else(|| Error::NotAGroup("no identity element".into()))?;
        let mut inverse = vec![0; order];
        for g in 0..order {
            inverse[g] = (0..order)
                .find(|&h| at(g, h) == identity && at(h, g) == identity)
                .ok_or_else(|| Error::NotAGroup(format!("element {g} has no inverse")))?;
        }
        for a in 0..order {
            for b in 0..order {
                let ab = at(a, b);
                for c in 0..order {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(Error::NotAGroup(format!("associativity fails on ({a},{b},{c})")));
                    }
                }
            }
        }
        let names = (0..order).map(|g| format!("g{g}")).collect();
        Ok(GroupTable { order, mult, identity, inverse, names })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.order {
            return Err(Error::InvalidParameter(format!(
                "{} names for a group of order {}",
                names.len(),
                self.order
            )));
        }
        self.names = names;
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.mult.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut k = 1;
        let mut x = g;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Least common multiple of the element orders.
    pub fn exponent(&self) -> usize {
        (0..self.order).fold(1, |acc, g| lcm(acc, self.element_order(g)))
    }

    pub fn pow(&self, g: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, g))
    }

    /// Sorted element list of the subgroup generated by `gens`.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[self.identity] = true;
        let mut stack = vec![self.identity];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        (0..self.order).filter(|&g| seen[g]).collect()
    }

    /// Cyclic group `Z_m` with `k` written as `k`.
    pub fn cyclic(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("cyclic group of order 0".into()));
        }
        let table = (0..m).map(|a| (0..m).map(|b| (a + b) % m).collect()).collect();
        GroupTable::new(table)?.with_names((0..m).map(|k| k.to_string()).collect())
    }

    /// Symmetric group on `k` letters, permutations in lexicographic order.
    pub fn symmetric(k: usize) -> Result<Self> {
        if k == 0 || k > 5 {
            return Err(Error::InvalidParameter(format!("symmetric group degree {k} outside 1..=5")));
        }
        let perms = permutations(k);
        let index = |p: &[usize]| perms.iter().position(|q| q.as_slice() == p).unwrap();
        let table = perms
            .iter()
            .map(|p| {
                perms
                    .iter()
                    .map(|q| {
                        // (p q)(i) = p(q(i))
                        let c: Vec<usize> = (0..k).map(|i| p[q[i]]).collect();
                        index(&c)
                    })
                    .collect()
            })
            .collect();
        let names = perms
            .iter()
            .map(|p| p.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(""))
            .collect();
        GroupTable::new(table)?.with_names(names)
    }

    /// Dihedral group of order `2k`: element `(s, j)` encoded as `s * k + j`, meaning `r^j` when
    /// `s = 0` and `r^j f` when `s = 1`.
    pub fn dihedral(k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidParameter("dihedral group needs k >= 1".into()));
        }
        let n = 2 * k;
        let table = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let (sa, ja) = (a / k, a % k);
                        let (sb, jb) = (b / k, b % k);
                        // r^ja f^sa r^jb f^sb = r^(ja +/- jb) f^(sa+sb)
                        let j = if sa == 0 { (ja + jb) % k } else { (ja + k - jb) % k };
                        ((sa + sb) % 2) * k + j
                    })
                    .collect()
            })
            .collect();
        let names = (0..n)
            .map(|a| if a / k == 0 { format!("r{}", a % k) } else { format!("r{}f", a % k) })
            .collect();
        GroupTable::new(table)?.with_names(names)
    }

    /// Direct product with pairs `(a, b)` encoded as `a * |other| + b`.
    pub fn direct_product(&self, other: &GroupTable) -> GroupTable {
        let (n, m) = (self.order, other.order);
        let order = n * m;
        let mut mult = Vec::with_capacity(order * order);
        for x in 0..order {
            for y in 0..order {
                let (a, b) = (x / m, x % m);
                let (c, d) = (y / m, y % m);
                mult.push(self.mul(a, c) * m + other.mul(b, d));
            }
        }
        let inverse = (0..order).map(|x| self.inv(x / m) * m + other.inv(x % m)).collect();
        let names = (0..order)
            .map(|x| format!("({},{})", self.names[x / m], other.names[x % m]))
            .collect();
        GroupTable {
            order,
            mult,
            identity: self.identity * m + other.identity,
            inverse,
            names,
        }
    }

    /// Product of cyclic groups `Z_{f1} x Z_{f2} x ...`.
    pub fn abelian(factors: &[usize]) -> Result<Self> {
        let mut g = GroupTable::cyclic(1)?;
        for &f in factors {
            g = g.direct_product(&GroupTable::cyclic(f)?);
        }
        if factors.is_empty() {
            return Ok(g);
        }
        // drop the leading trivial factor from the names
        let names = (0..g.order)
            .map(|x| {
                let mut parts = Vec::with_capacity(factors.len());
                let mut rest = x;
                for &f in factors.iter().rev() {
                    parts.push((rest % f).to_string());
                    rest /= f;
                }
                parts.reverse();
                format!("({})", parts.join(","))
            })
            .collect();
        g.with_names(names)
    }
}

/// One representative per isomorphism class of abelian groups of order `n`, as the list of
/// cyclic factor orders (prime powers) together with the table.
pub fn abelian_groups_of_order(n: usize) -> Result<Vec<(Vec<usize>, GroupTable)>> {
    if n == 0 {
        return Err(Error::InvalidParameter("group order 0".into()));
    }
    let mut choices: Vec<Vec<Vec<usize>>> = Vec::new();
    for (p, a) in factorize(n) {
        choices.push(
            partitions(a)
                .into_iter()
                .map(|part| part.into_iter().map(|e| p.pow(e as u32)).collect())
                .collect(),
        );
    }
    let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
    for opts in &choices {
        let mut next = Vec::new();
        for c in &combos {
            for o in opts {
                let mut v = c.clone();
                v.extend_from_slice(o);
                next.push(v);
            }
        }
        combos = next;
    }
    combos
        .into_iter()
        .map(|factors| GroupTable::abelian(&factors).map(|g| (factors, g)))
        .collect()
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn factorize(mut n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut a = 0;
        while n % p == 0 {
            n /= p;
            a += 1;
        }
        if a > 0 {
            out.push((p, a));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn partitions(a: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=rest.min(max)).rev() {
            cur.push(k);
            rec(rest - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(a, a, &mut Vec::new(), &mut out);
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}
