// SPDX-License-Identifier: Apache-2.0

//! Finite abelian groups presented as products of cyclic factors.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::semiring::C64;
use crate::error::{Error, Result};

/// `Z_{d_1} × … × Z_{d_r}`.
///
/// Factors of order 1 are dropped on construction unless the group is
/// trivial, in which case the factor list is `[1]`. The factor order is
/// otherwise kept as given, because it fixes the element enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    factors: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub residues: Vec<u64>,
}

impl GroupElement {
    pub fn new(residues: Vec<u64>) -> Self {
        Self { residues }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.residues.len() == 1 {
            return write!(f, "{}", self.residues[0]);
        }
        let parts: Vec<String> = self.residues.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("no cyclic factors".into()));
        }
        if factors.contains(&0) {
            return Err(Error::InvalidGroup("cyclic factor of order 0".into()));
        }
        let mut kept: Vec<u64> = factors.into_iter().filter(|&d| d != 1).collect();
        if kept.is_empty() {
            kept.push(1);
        }
        Ok(Self { factors: kept })
    }

    pub fn cyclic(d: u64) -> Result<Self> {
        Self::new(vec![d])
    }

    pub fn trivial() -> Self {
        Self { factors: vec![1] }
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.factors.iter().product::<u64>() as usize
    }

    pub fn is_trivial(&self) -> bool {
        self.factors == [1]
    }

    /// Largest element order, i.e. the lcm of the factor orders.
    pub fn exponent(&self) -> u64 {
        self.factors.iter().fold(1, |acc, &d| acc.lcm(&d))
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement::new(vec![0; self.factors.len()])
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.residues.len() == self.factors.len()
            && g.residues.iter().zip(&self.factors).all(|(&r, &d)| r < d)
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::ElementMismatch { element: g.residues.clone(), group: self.to_string() })
        }
    }

    /// Elements in lexicographic residue order; this is also the basis
    /// order of every model built on the group.
    pub fn elements(&self) -> Vec<GroupElement> {
        (0..self.order()).map(|i| self.element(i)).collect()
    }

    pub fn element(&self, mut index: usize) -> GroupElement {
        let mut residues = vec![0; self.factors.len()];
        for (slot, &d) in residues.iter_mut().zip(&self.factors).rev() {
            *slot = (index as u64) % d;
            index /= d as usize;
        }
        GroupElement::new(residues)
    }

    pub fn index_of(&self, g: &GroupElement) -> Result<usize> {
        self.check(g)?;
        Ok(g.residues
            .iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&r, &d)| acc * d as usize + r as usize))
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(GroupElement::new(
            a.residues
                .iter()
                .zip(&b.residues)
                .zip(&self.factors)
                .map(|((&x, &y), &d)| (x + y) % d)
                .collect(),
        ))
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        Ok(GroupElement::new(
            a.residues.iter().zip(&self.factors).map(|(&x, &d)| (d - x) % d).collect(),
        ))
    }

    /// Index-level addition, for hot loops over the basis.
    pub fn add_index(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        let mut out = 0usize;
        let mut place = 1usize;
        for &d in self.factors.iter().rev() {
            let d = d as usize;
            out += ((a % d + b % d) % d) * place;
            place *= d;
            a /= d;
            b /= d;
        }
        out
    }

    pub fn neg_index(&self, a: usize) -> usize {
        let mut a = a;
        let mut out = 0usize;
        let mut place = 1usize;
        for &d in self.factors.iter().rev() {
            let d = d as usize;
            out += ((d - a % d) % d) * place;
            place *= d;
            a /= d;
        }
        out
    }

    pub fn element_order(&self, g: &GroupElement) -> Result<u64> {
        self.check(g)?;
        Ok(g.residues
            .iter()
            .zip(&self.factors)
            .map(|(&r, &d)| d / r.gcd(&d))
            .fold(1, |acc, o| acc.lcm(&o)))
    }

    /// `χ_j(g) = exp(2πi Σ_k j_k g_k / d_k)`.
    pub fn character_value(&self, j: &GroupElement, g: &GroupElement) -> Result<C64> {
        self.check(j)?;
        self.check(g)?;
        Ok(self.character_phase(j, g))
    }

    fn character_phase(&self, j: &GroupElement, g: &GroupElement) -> C64 {
        // Accumulate the exponent as an exact fraction of a full turn per
        // factor and reduce before converting, so χ_0 is exactly 1.
        let turns: f64 = j
            .residues
            .iter()
            .zip(&g.residues)
            .zip(&self.factors)
            .map(|((&a, &b), &d)| ((a * b) % d) as f64 / d as f64)
            .sum();
        let turns = turns.fract();
        if turns == 0.0 {
            return C64::new(1.0, 0.0);
        }
        C64::from_polar(1.0, 2.0 * PI * turns)
    }

    /// The character `χ_j` as a column over the element basis.
    pub fn character_vector(&self, j: &GroupElement) -> Result<Vec<C64>> {
        self.check(j)?;
        Ok(self.elements().iter().map(|g| self.character_phase(j, g)).collect())
    }

    /// Invariant factors `n_1 | n_2 | … | n_s`, each ≥ 2, or `[1]` for the
    /// trivial group. Two groups are isomorphic iff these agree.
    pub fn invariant_factors(&self) -> Vec<u64> {
        let mut prime_powers: Vec<(u64, Vec<u32>)> = Vec::new();
        for &d in &self.factors {
            for (p, e) in factorize(d) {
                match prime_powers.iter_mut().find(|(q, _)| *q == p) {
                    Some((_, es)) => es.push(e),
                    None => prime_powers.push((p, vec![e])),
                }
            }
        }
        invariant_factors_from_primary(prime_powers)
    }

    pub fn canonical(&self) -> Self {
        Self { factors: self.invariant_factors() }
    }

    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.invariant_factors() == other.invariant_factors()
    }
}

/// Combines elementary divisors `p^e` into ascending invariant factors.
fn invariant_factors_from_primary(mut prime_powers: Vec<(u64, Vec<u32>)>) -> Vec<u64> {
    let len = prime_powers.iter().map(|(_, es)| es.len()).max().unwrap_or(0);
    if len == 0 {
        return vec![1];
    }
    for (_, es) in prime_powers.iter_mut() {
        es.sort_unstable_by(|a, b| b.cmp(a));
    }
    // The largest invariant factor takes the largest power of every prime,
    // the next one the second largest, and so on.
    let mut out: Vec<u64> = (0..len)
        .map(|i| {
            prime_powers
                .iter()
                .map(|(p, es)| es.get(i).map_or(1, |&e| p.pow(e)))
                .product()
        })
        .collect();
    out.reverse();
    out
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Identifies the isomorphism type of a finite group given by its Cayley
/// table (`table[a][b] = a·b`).
///
/// Group axioms and commutativity are checked exhaustively. The type is then
/// read off from the census of element orders: for each prime `p`, the
/// number of solutions of `p^k·x = 0` determines the partition of
/// `p`-power exponents.
pub fn classify_table(table: &[Vec<usize>]) -> Result<FiniteAbelianGroup> {
    let n = table.len();
    if n == 0 {
        return Err(Error::NotAGroup("empty table".into()));
    }
    if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
        return Err(Error::NotAGroup("table is not closed".into()));
    }
    let identity = (0..n)
        .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
        .ok_or_else(|| Error::NotAGroup("no identity element".into()))?;
    for a in 0..n {
        if !(0..n).any(|b| table[a][b] == identity) {
            return Err(Error::NotAGroup(format!("element {a} has no inverse")));
        }
        for b in 0..n {
            if table[a][b] != table[b][a] {
                return Err(Error::NotAGroup(format!("{a}·{b} ≠ {b}·{a}")));
            }
            for c in 0..n {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(Error::NotAGroup(format!("({a}·{b})·{c} ≠ {a}·({b}·{c})")));
                }
            }
        }
    }

    let power = |x: usize, k: u64| -> usize {
        let mut acc = identity;
        for _ in 0..k {
            acc = table[acc][x];
        }
        acc
    };

    let mut primary = Vec::new();
    for (p, e_total) in factorize(n as u64) {
        // s_k = log_p #{x : p^k x = 0}
        let mut s = vec![0u32];
        let mut k = 1u32;
        while *s.last().unwrap() < e_total {
            let count = (0..n).filter(|&x| power(x, p.pow(k)) == identity).count() as u64;
            s.push(log_exact(count, p));
            k += 1;
        }
        // #{i : e_i ≥ k} = s_k − s_{k−1}
        let at_least: Vec<u32> = s.windows(2).map(|w| w[1] - w[0]).collect();
        let mut exps = Vec::new();
        for (idx, &cnt) in at_least.iter().enumerate() {
            let next = at_least.get(idx + 1).copied().unwrap_or(0);
            for _ in 0..(cnt - next) {
                exps.push(idx as u32 + 1);
            }
        }
        primary.push((p, exps));
    }
    FiniteAbelianGroup::new(invariant_factors_from_primary(primary))
}

fn log_exact(mut n: u64, p: u64) -> u32 {
    let mut e = 0;
    while n > 1 {
        n /= p;
        e += 1;
    }
    e
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|d| format!("Z{d}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for FiniteAbelianGroup {
    type Err = Error;

    /// Accepts `Z2xZ4`, `Z2 x Z4`, `Z2×Z4`, `Z2*Z4` (case-insensitive).
    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let cleaned = cleaned.replace(['×', '*'], "x").to_lowercase();
        if cleaned.is_empty() {
            return Err(Error::InvalidGroup("empty group name".into()));
        }
        let factors = cleaned
            .split('x')
            .map(|part| {
                part.strip_prefix('z')
                    .and_then(|d| d.parse::<u64>().ok())
                    .ok_or_else(|| Error::InvalidGroup(format!("cannot parse factor `{part}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }
}
